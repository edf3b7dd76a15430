pub mod cert;
pub mod cone;
pub mod curve;
pub mod error;
pub mod lattice;
pub mod linear;
pub mod product;
pub mod scenario;
pub mod surface;
