//! Products `X = S × B` of a ruled surface and a curve, and hypersurfaces
//! `T ⊂ X` in an exterior-product linear system.

use serde::Serialize;

use crate::cert::{les_interval, Certificate, HValue, Hval, Rule};
use crate::curve::{CurveModel, DivisorClass};
use crate::error::{EngineError, Result};
use crate::lattice::Lattice;
use crate::linear::{ClassVec, LinearForm};
use crate::surface::{RuledSurfaceModel, Side, SurfaceClass};

pub const RESTRICTION_INJECTIVE: &str =
    "restriction of divisor classes from the product to the hypersurface is injective";

/// `pr₁*D₁ + pr₂*D₂`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProductClass {
    pub s: SurfaceClass,
    pub b: DivisorClass,
}

impl ProductClass {
    pub fn new(s: SurfaceClass, b: DivisorClass) -> Self {
        let n_lo = s.guard().max(b.guard());
        ProductClass { s: s.with_guard(n_lo), b: b.with_guard(n_lo) }
    }

    pub fn is_constant(&self) -> bool {
        self.s.is_constant() && self.b.is_constant()
    }

    pub fn guard(&self) -> i64 {
        self.s.guard().max(self.b.guard())
    }

    pub fn scale(&self, k: i64) -> Self {
        ProductClass::new(self.s.scale(k), self.b.scale(k))
    }

    pub fn scale_form(&self, k: &LinearForm) -> Option<Self> {
        Some(ProductClass::new(self.s.scale_form(k)?, self.b.scale_form(k)?))
    }

    pub fn at(&self, n: i64) -> Self {
        ProductClass::new(self.s.at(n), self.b.at(n))
    }

    pub fn with_guard(&self, n_lo: i64) -> Self {
        ProductClass { s: self.s.with_guard(n_lo), b: self.b.with_guard(n_lo) }
    }

    /// Coordinates `[e; C-coordinates; B-coordinates]`.
    pub fn flat(&self) -> ClassVec {
        let e = ClassVec::from_coords(&[self.s.e]);
        e.concat(&self.s.base.0).concat(&self.b.0).with_guard(self.guard())
    }
}

impl std::ops::Add for &ProductClass {
    type Output = ProductClass;
    fn add(self, rhs: &ProductClass) -> ProductClass {
        ProductClass::new(&self.s + &rhs.s, &self.b + &rhs.b)
    }
}

impl std::ops::Sub for &ProductClass {
    type Output = ProductClass;
    fn sub(self, rhs: &ProductClass) -> ProductClass {
        ProductClass::new(&self.s - &rhs.s, &self.b - &rhs.b)
    }
}

impl std::ops::Neg for &ProductClass {
    type Output = ProductClass;
    fn neg(self) -> ProductClass {
        self.scale(-1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductModel {
    name: String,
    surface: RuledSurfaceModel,
    curve: CurveModel,
}

impl ProductModel {
    pub fn new(name: &str, surface: RuledSurfaceModel, curve: CurveModel) -> Self {
        ProductModel { name: name.to_string(), surface, curve }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn surface(&self) -> &RuledSurfaceModel {
        &self.surface
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn zero(&self) -> ProductClass {
        ProductClass::new(self.surface.zero(), self.curve.zero())
    }

    pub fn canonical_class(&self) -> ProductClass {
        ProductClass::new(self.surface.canonical_class(), self.curve.canonical_class())
    }

    pub fn check_class(&self, c: &ProductClass) -> Result<()> {
        self.surface.check_class(&c.s)?;
        self.curve.check_class(&c.b)
    }

    pub fn flat_dim(&self) -> usize {
        1 + self.surface.curve().rank() + self.curve.rank()
    }

    /// Relations of `Pic(S) ⊕ Pic(B)` in flat coordinates.
    pub fn relation_lattice(&self) -> Lattice {
        let rc = self.surface.curve().rank();
        let rb = self.curve.rank();
        let mut gens = Vec::new();
        for r in self.surface.curve().relations() {
            let mut v = vec![0; 1 + rc + rb];
            v[1..1 + rc].copy_from_slice(r);
            gens.push(v);
        }
        for r in self.curve.relations() {
            let mut v = vec![0; 1 + rc + rb];
            v[1 + rc..].copy_from_slice(r);
            gens.push(v);
        }
        Lattice::new(self.flat_dim(), &gens)
    }

    /// Künneth: `hⁿ(X, (D₁, D₂)) = Σ_{i+j=n} hⁱ(S, D₁)·hʲ(B, D₂)`.
    pub fn h(&self, c: &ProductClass, n: usize) -> Hval {
        let claim = format!("h{n}({}, {})", self.name, self.display(c));
        if n > 3 {
            return Certificate::count(claim, Rule::AboveDimension { degree: n, dim: 3 }, HValue::zero_from(c.guard()))
                .into();
        }
        let mut premises = Vec::new();
        let mut total = HValue::zero_from(c.guard());
        for i in 0..=2usize {
            if n < i || n - i > 1 {
                continue;
            }
            let hs = self.surface.h(&c.s, i).certificate;
            let hb = self.curve.cohomology(&c.b, n - i).certificate;
            total = total.add(&hs.value().mul(&hb.value()));
            premises.push(hs);
            premises.push(hb);
        }
        Certificate::count(claim, Rule::Kunneth { degree: n }, total).with_premises(premises).into()
    }

    pub fn cohomology(&self, c: &ProductClass) -> [Hval; 4] {
        [self.h(c, 0), self.h(c, 1), self.h(c, 2), self.h(c, 3)]
    }

    /// `χ(X, (D₁, D₂)) = χ(S, D₁)·χ(B, D₂)`.
    pub fn chi(&self, c: &ProductClass) -> Result<LinearForm> {
        let a = self.surface.chi(&c.s)?;
        let b = self.curve.chi(&c.b);
        a.checked_mul(&b).ok_or_else(|| EngineError::Nonlinear(format!("chi of {}", self.display(c))))
    }

    /// `(D₁,D₂)·(D₁′,D₂′)·(D₁″,D₂″)`: only terms with two surface factors
    /// and one curve factor survive.
    pub fn intersect3(&self, a: &ProductClass, b: &ProductClass, c: &ProductClass) -> Result<LinearForm> {
        let s = &self.surface;
        let nonlinear = || EngineError::Nonlinear("triple intersection".into());
        let term = |x: &ProductClass, y: &ProductClass, z: &ProductClass| -> Result<LinearForm> {
            let d = self.curve.degree(&z.b);
            s.intersect(&x.s, &y.s)?.checked_mul(&d).ok_or_else(nonlinear)
        };
        Ok(term(a, b, c)? + term(a, c, b)? + term(b, c, a)?)
    }

    pub fn is_ample(&self, c: &ProductClass) -> Result<Certificate> {
        let s = self.surface.is_ample(&c.s)?;
        if !c.b.is_constant() {
            return Err(EngineError::Symbolic(format!("positivity test of {}", self.display(c))));
        }
        let deg = self.curve.degree(&c.b);
        let b = Certificate::count(
            format!("deg({}, {})", self.curve.name(), self.curve.display(&c.b)),
            Rule::Intersection { value: deg },
            HValue::exact(deg),
        );
        let ok = s.truth_value() == Some(true) && deg.offset > 0;
        Ok(Certificate::truth(format!("ample({}, {})", self.name, self.display(c)), Rule::ProductAmple, Some(ok))
            .with_premises(vec![s, b]))
    }

    pub fn display(&self, c: &ProductClass) -> String {
        format!("({}, {})", self.surface.display(&c.s), self.curve.display(&c.b))
    }
}

/// A class on the hypersurface, represented by a lift to the product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RestrictedClass(pub ProductClass);

/// `0 → O_X(G − T) → O_X(G) → O_T(G) → 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SesRecord {
    pub left: ProductClass,
    pub middle: ProductClass,
    pub right: RestrictedClass,
    pub twist: ProductClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypersurfaceModel {
    name: String,
    ambient: ProductModel,
    class: ProductClass,
    kernel: Vec<ProductClass>,
    restriction_injective: bool,
    #[serde(skip)]
    lattice: Lattice,
}

impl HypersurfaceModel {
    /// `kernel` lists classes declared to restrict trivially; with
    /// `restriction_injective` the kernel is exactly their span.
    pub fn new(
        name: &str,
        ambient: ProductModel,
        class: ProductClass,
        kernel: Vec<ProductClass>,
        restriction_injective: bool,
    ) -> Result<Self> {
        ambient.check_class(&class)?;
        if !class.is_constant() {
            return Err(EngineError::Symbolic(format!("class of {name}")));
        }
        for k in &kernel {
            ambient.check_class(k)?;
            if !k.is_constant() {
                return Err(EngineError::Symbolic(format!("restriction kernel of {name}")));
            }
        }
        let extra: Vec<Vec<i64>> = kernel.iter().map(|k| k.flat().offset).collect();
        let lattice = ambient.relation_lattice().extended(&extra);
        Ok(HypersurfaceModel { name: name.to_string(), ambient, class, kernel, restriction_injective, lattice })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> &ProductModel {
        &self.ambient
    }

    pub fn class(&self) -> &ProductClass {
        &self.class
    }

    pub fn kernel(&self) -> &[ProductClass] {
        &self.kernel
    }

    pub fn restriction_assumption(&self) -> String {
        if self.restriction_injective && self.kernel.is_empty() {
            RESTRICTION_INJECTIVE.to_string()
        } else {
            format!("kernel of restriction to {} is spanned by the declared classes", self.name)
        }
    }

    pub fn restriction_is_declared(&self) -> bool {
        self.restriction_injective
    }

    fn restriction_premise(&self) -> Certificate {
        Certificate::truth(
            format!("Pic({}) → Pic({})", self.ambient.name, self.name),
            Rule::Assumed { assumption: self.restriction_assumption() },
            Some(true),
        )
    }

    pub fn restrict(&self, g: &ProductClass) -> RestrictedClass {
        RestrictedClass(g.clone())
    }

    /// Linear equivalence on `T`, under the declared restriction kernel.
    pub fn is_equivalent(&self, a: &RestrictedClass, b: &RestrictedClass) -> Result<Option<bool>> {
        if !self.restriction_injective {
            return Err(EngineError::Precondition(format!(
                "equivalence on {} needs a declared restriction kernel",
                self.name
            )));
        }
        let d = (&a.0 - &b.0).flat();
        Ok(self.lattice.affine_solutions(&d.offset, &d.slope).for_all_from(d.n_lo))
    }

    pub fn restricted_lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn twist_ideal_sequence(&self, g: &ProductClass) -> SesRecord {
        let cls = self.class.with_guard(g.guard());
        SesRecord { left: g - &cls, middle: g.clone(), right: self.restrict(g), twist: g.clone() }
    }

    /// `hⁱ(T, G|_T)` from the cohomology of `X` along the twisted sequence.
    pub fn les_deduce(&self, rec: &SesRecord, i: usize) -> Hval {
        let claim = format!("h{i}({}, {})", self.name, self.display(&rec.right));
        let guard = rec.middle.guard();
        if i > 2 {
            return Certificate::count(claim, Rule::AboveDimension { degree: i, dim: 2 }, HValue::zero_from(guard))
                .into();
        }
        let mid = self.ambient.h(&rec.middle, i).certificate;
        let left = self.ambient.h(&rec.left, i).certificate;
        let next_left = self.ambient.h(&rec.left, i + 1).certificate;
        let next_mid = self.ambient.h(&rec.middle, i + 1).certificate;
        let (m, l, nl, nm) = (mid.value(), left.value(), next_left.value(), next_mid.value());
        let premises = vec![mid, left, next_left, next_mid];
        if m.is_zero() && nl.is_zero() {
            return Certificate::count(claim, Rule::LesVanishing { degree: i }, HValue::zero_from(guard))
                .with_premises(premises)
                .into();
        }
        if l.is_zero() && nl.is_zero() && m.form().is_some() {
            return Certificate::count(claim, Rule::LesIsomorphism { degree: i }, m).with_premises(premises).into();
        }
        let bounds = les_interval(&m, &l, &nl, &nm);
        Certificate::count(claim, Rule::LesBounds { degree: i }, bounds).with_premises(premises).into()
    }

    pub fn h(&self, c: &RestrictedClass, i: usize) -> Hval {
        self.les_deduce(&self.twist_ideal_sequence(&c.0), i)
    }

    pub fn cohomology(&self, c: &RestrictedClass) -> [Hval; 3] {
        [self.h(c, 0), self.h(c, 1), self.h(c, 2)]
    }

    /// The hypersurface is nef and big, hence connected.
    pub fn connectedness_cert(&self) -> Result<Certificate> {
        let d1 = &self.class.s;
        let nb = self.ambient.surface.is_nef_big(d1)?;
        let degree = self.ambient.curve.degree(&self.class.b).offset;
        let triple = self.ambient.intersect3(&self.class, &self.class, &self.class)?.offset;
        let ok = nb.nef && degree > 0 && triple > 0;
        Ok(Certificate::truth(format!("{} connected", self.name), Rule::BigNefConnected { triple, degree }, Some(ok))
            .with_premises(vec![nb.certificate]))
    }

    /// General member smooth: `Bs|D₁|` is one reduced point and `|D₂|` is free.
    pub fn smoothness_cert(&self) -> Result<Certificate> {
        let claim = format!("{} smooth", self.name);
        let s = &self.ambient.surface;
        let (region, bs) = s.base_locus(&self.class.s)?;
        let b_free = self.ambient.curve.is_basepoint_free(&self.class.b);
        let Some(region) = region else {
            return Ok(Certificate::unresolved_truth(claim, "base locus unresolved").with_premises(vec![bs, b_free]));
        };
        let Some((point, side)) = region.single_point() else {
            let ok = if region.is_empty() { b_free.truth_value() } else { Some(false) };
            let rule = if ok.is_some() {
                Rule::SmoothGeneralMember
            } else {
                Rule::Unresolved { reason: "basepoint freeness on the curve factor unresolved".into() }
            };
            return Ok(Certificate::truth(claim, rule, ok).with_premises(vec![bs, b_free]));
        };
        let reduced = s.reduced_base_point(&self.class.s, point, side)?;
        let ok = match (reduced.truth_value(), b_free.truth_value()) {
            (Some(true), Some(true)) => Some(true),
            (Some(false), _) | (_, Some(false)) => Some(false),
            _ => None,
        };
        let rule = if ok.is_some() {
            Rule::SmoothGeneralMember
        } else {
            Rule::Unresolved { reason: "reducedness or freeness unresolved".into() }
        };
        Ok(Certificate::truth(claim, rule, ok).with_premises(vec![bs, reduced, b_free]))
    }

    /// `(pr₁*section)|_T` is smooth when `T` is and the base point avoids the section.
    pub fn boundary_smoothness(&self, side: Side) -> Result<Certificate> {
        let claim = format!("({side} x {})|{} smooth", self.ambient.curve.name(), self.name);
        let smooth = self.smoothness_cert()?;
        let s = &self.ambient.surface;
        let (region, _) = s.base_locus(&self.class.s)?;
        let avoid = match region.as_ref().and_then(|r| r.single_point()) {
            Some((point, _)) => {
                let (on, cert) = s.confirm_section_point(&self.class.s, point, side)?;
                (on.map(|b| !b), Some(cert))
            }
            None if region.as_ref().is_some_and(|r| r.is_empty()) => (Some(true), None),
            None => (None, None),
        };
        let ok = match (smooth.truth_value(), avoid.0) {
            (Some(true), Some(true)) => Some(true),
            (Some(false), _) | (_, Some(false)) => Some(false),
            _ => None,
        };
        let mut premises = vec![smooth];
        premises.extend(avoid.1);
        let rule = if ok.is_some() { Rule::SmoothBoundary } else { Rule::Unresolved { reason: "unresolved".into() } };
        Ok(Certificate::truth(claim, rule, ok).with_premises(premises))
    }

    /// `K_T = (K_X + T)|_T`, for smooth, connected `T`.
    pub fn adjunction_canonical(&self) -> Result<RestrictedClass> {
        if self.smoothness_cert()?.truth_value() != Some(true) {
            return Err(EngineError::Precondition(format!("{} lacks a smoothness certificate", self.name)));
        }
        if self.connectedness_cert()?.truth_value() != Some(true) {
            return Err(EngineError::Precondition(format!("{} is not certified big and nef", self.name)));
        }
        Ok(self.restrict(&(&self.ambient.canonical_class() + &self.class)))
    }

    pub fn is_ample(&self, c: &RestrictedClass) -> Result<Certificate> {
        let amb = self.ambient.is_ample(&c.0)?;
        let ok = amb.truth_value();
        Ok(Certificate::truth(format!("ample({}, {})", self.name, self.display(c)), Rule::ProductAmple, ok)
            .with_premises(vec![amb, self.restriction_premise()]))
    }

    pub fn display(&self, c: &RestrictedClass) -> String {
        format!("{}|{}", self.ambient.display(&c.0), self.name)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::curve::{DoubleCover, FactTable, Generator};

    pub(crate) fn paper_hypersurface() -> HypersurfaceModel {
        let gens = vec![
            Generator { name: "g12".into(), degree: 2, point: false },
            Generator { name: "R1".into(), degree: 1, point: true },
        ];
        let facts = FactTable {
            double_cover: Some(DoubleCover { g12: DivisorClass::constant(vec![1, 0]), twists: vec![0, -8] }),
            ..FactTable::default()
        };
        let c = CurveModel::new("C", 7, gens, vec![vec![-1, 2]], vec![6, 0], facts).unwrap();
        let s = RuledSurfaceModel::new("S", c, DivisorClass::constant(vec![0, 1])).unwrap();
        let bgens = vec![
            Generator { name: "Theta".into(), degree: 1, point: false },
            Generator { name: "P".into(), degree: 1, point: true },
        ];
        let b = CurveModel::new("B", 2, bgens, vec![], vec![2, 0], FactTable::default()).unwrap();
        let theta = b.generator_class("Theta").unwrap();
        let b = b.with_facts(b.theta_facts(&theta, "Theta").unwrap().facts);
        let x = ProductModel::new("X", s, b);
        let l = x.surface().class(1, DivisorClass::constant(vec![2, 0]));
        let d1 = &l.scale(5) - &x.surface().canonical_class();
        let class = ProductClass::new(d1, DivisorClass::constant(vec![3, 0]));
        HypersurfaceModel::new("T", x, class, vec![], true).unwrap()
    }

    fn m(t: &HypersurfaceModel) -> ProductClass {
        let l = t.ambient().surface().class(1, DivisorClass::constant(vec![2, 0]));
        ProductClass::new(l.scale(4), DivisorClass::constant(vec![4, 0]))
    }

    fn num(h: &Hval) -> i64 {
        h.value.as_number().unwrap_or_else(|| panic!("unresolved: {}", h.certificate.render()))
    }

    #[test]
    fn kunneth_values() {
        let t = paper_hypersurface();
        let x = t.ambient();
        assert_eq!(num(&x.h(&m(&t), 1)), 3);
        let seq = t.twist_ideal_sequence(&m(&t));
        let l = x.surface().class(1, DivisorClass::constant(vec![2, 0]));
        let expected_left = ProductClass::new(&x.surface().canonical_class() - &l, DivisorClass::constant(vec![1, 0]));
        assert!(t
            .is_equivalent(&RestrictedClass(seq.left.clone()), &RestrictedClass(expected_left.clone()))
            .unwrap()
            .unwrap());
        for i in 0..=3 {
            assert_eq!(num(&x.h(&expected_left, i)), 0);
        }
        let chi = x.chi(&m(&t)).unwrap().as_constant().unwrap();
        let alt: i64 = (0..=3).map(|i| num(&x.h(&m(&t), i)) * if i % 2 == 0 { 1 } else { -1 }).sum();
        assert_eq!(chi, alt);
    }

    #[test]
    fn hypersurface_values() {
        let t = paper_hypersurface();
        let h1 = t.h(&t.restrict(&m(&t)), 1);
        assert_eq!(num(&h1), 3);
        assert!(matches!(h1.certificate.rule, Rule::LesIsomorphism { .. }));
        h1.certificate.check().unwrap();
        let seq = t.twist_ideal_sequence(t.class());
        assert_eq!(seq.left, t.ambient().zero());
    }

    #[test]
    fn certificates_for_the_hypersurface() {
        let t = paper_hypersurface();
        let conn = t.connectedness_cert().unwrap();
        assert_eq!(conn.truth_value(), Some(true));
        assert!(matches!(conn.rule, Rule::BigNefConnected { triple: 693, .. }));
        conn.check().unwrap();
        assert_eq!(t.smoothness_cert().unwrap().truth_value(), Some(true));
        assert_eq!(t.boundary_smoothness(Side::E).unwrap().truth_value(), Some(true));
        assert_eq!(t.boundary_smoothness(Side::EInf).unwrap().truth_value(), Some(false));
    }

    #[test]
    fn canonical_class_by_adjunction() {
        let t = paper_hypersurface();
        let k = t.adjunction_canonical().unwrap();
        let l = t.ambient().surface().class(1, DivisorClass::constant(vec![2, 0]));
        let five = RestrictedClass(ProductClass::new(l.scale(5), DivisorClass::constant(vec![5, 0])));
        assert!(t.is_equivalent(&k, &five).unwrap().unwrap());
        let four_k = RestrictedClass(k.0.scale(4));
        let five_m = RestrictedClass(m(&t).scale(5));
        assert!(t.is_equivalent(&four_k, &five_m).unwrap().unwrap());
    }

    #[test]
    fn triple_intersections() {
        let t = paper_hypersurface();
        let x = t.ambient();
        let l = x.surface().class(1, DivisorClass::constant(vec![2, 0]));
        let lt = ProductClass::new(l, DivisorClass::constant(vec![1, 0]));
        assert_eq!(x.intersect3(&lt, &lt, &lt).unwrap().as_constant(), Some(21));
        let f = ProductClass::new(x.surface().fiber().unwrap(), x.curve().zero());
        assert_eq!(x.intersect3(&f, &f, &f).unwrap().as_constant(), Some(0));
    }
}
