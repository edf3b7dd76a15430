//! The Du Bois criterion for cones over polarized varieties.
//!
//! `(C(X, M), C(Σ))` is a Du Bois pair iff `hⁱ(X, nM − Σ) = 0` for all
//! `i ≥ 1`, `n ≥ 1`. The quantifier over `n` is discharged by one symbolic
//! certificate valid for `n ≥ n₀` plus explicit values for `1 ≤ n ≤ N`.

use serde::Serialize;

use crate::cert::{Certificate, HValue, Hval, Rule};
use crate::curve::{CurveModel, DivisorClass};
use crate::error::{EngineError, Result};
use crate::lattice::{Lattice, Solutions};
use crate::linear::{ClassVec, LinearForm};
use crate::product::{HypersurfaceModel, ProductClass, RestrictedClass};
use crate::surface::{RuledSurfaceModel, Side, SurfaceClass};

pub const DEFAULT_SWEEP: i64 = 8;

pub const FAITHFUL_PRESENTATION: &str =
    "declared relations generate all linear equivalences among the named generators";

/// A projective variety whose line-bundle cohomology the engine can compute.
pub trait PolarizedBase {
    type Class: Clone;

    fn label(&self) -> &str;
    fn dim(&self) -> usize;
    fn h(&self, c: &Self::Class, i: usize) -> Hval;
    fn ample(&self, m: &Self::Class) -> Result<Certificate>;
    fn scale_param(&self, m: &Self::Class, n_lo: i64) -> Option<Self::Class>;
    fn sub(&self, a: &Self::Class, b: &Self::Class) -> Self::Class;
    fn with_guard(&self, c: &Self::Class, n_lo: i64) -> Self::Class;
    fn at(&self, c: &Self::Class, n: i64) -> Self::Class;
    fn display(&self, c: &Self::Class) -> String;
    fn canonical(&self) -> Result<Self::Class>;
    /// Class-group lattice in flat coordinates, for index computations.
    fn relation_lattice(&self) -> Result<Lattice>;
    fn flat(&self, c: &Self::Class) -> ClassVec;
    fn certificates(&self) -> Result<Vec<(String, Certificate)>> {
        Ok(Vec::new())
    }
    fn assumptions(&self) -> Vec<String> {
        vec![FAITHFUL_PRESENTATION.to_string()]
    }

    /// `n·m − σ` for `n ≥ n_lo`.
    fn family(&self, m: &Self::Class, sigma: Option<&Self::Class>, n_lo: i64) -> Result<Self::Class> {
        let nm = self.scale_param(m, n_lo).ok_or_else(|| EngineError::Nonlinear(format!("n·({})", self.display(m))))?;
        Ok(match sigma {
            Some(s) => self.sub(&nm, &self.with_guard(s, n_lo)),
            None => nm,
        })
    }
}

impl PolarizedBase for CurveModel {
    type Class = DivisorClass;

    fn label(&self) -> &str {
        self.name()
    }
    fn dim(&self) -> usize {
        1
    }
    fn h(&self, c: &DivisorClass, i: usize) -> Hval {
        self.cohomology(c, i)
    }
    fn ample(&self, m: &DivisorClass) -> Result<Certificate> {
        if !m.is_constant() {
            return Err(EngineError::Symbolic(format!("ampleness of {}", self.display(m))));
        }
        let deg = self.degree(m);
        let d = Certificate::count(
            format!("deg({})", self.display(m)),
            Rule::Intersection { value: deg },
            HValue::exact(deg),
        );
        Ok(Certificate::truth(
            format!("ample({}, {})", self.name(), self.display(m)),
            Rule::ProductAmple,
            Some(deg.offset > 0),
        )
        .with_premises(vec![d]))
    }
    fn scale_param(&self, m: &DivisorClass, n_lo: i64) -> Option<DivisorClass> {
        m.scale_form(&LinearForm::param(n_lo))
    }
    fn sub(&self, a: &DivisorClass, b: &DivisorClass) -> DivisorClass {
        a - b
    }
    fn with_guard(&self, c: &DivisorClass, n_lo: i64) -> DivisorClass {
        c.with_guard(n_lo)
    }
    fn at(&self, c: &DivisorClass, n: i64) -> DivisorClass {
        c.at(n)
    }
    fn display(&self, c: &DivisorClass) -> String {
        CurveModel::display(self, c)
    }
    fn canonical(&self) -> Result<DivisorClass> {
        Ok(self.canonical_class())
    }
    fn relation_lattice(&self) -> Result<Lattice> {
        Ok(self.lattice().clone())
    }
    fn flat(&self, c: &DivisorClass) -> ClassVec {
        c.0.clone()
    }
}

impl PolarizedBase for RuledSurfaceModel {
    type Class = SurfaceClass;

    fn label(&self) -> &str {
        self.name()
    }
    fn dim(&self) -> usize {
        2
    }
    fn h(&self, c: &SurfaceClass, i: usize) -> Hval {
        RuledSurfaceModel::h(self, c, i)
    }
    fn ample(&self, m: &SurfaceClass) -> Result<Certificate> {
        self.is_ample(m)
    }
    fn scale_param(&self, m: &SurfaceClass, n_lo: i64) -> Option<SurfaceClass> {
        m.scale_form(&LinearForm::param(n_lo))
    }
    fn sub(&self, a: &SurfaceClass, b: &SurfaceClass) -> SurfaceClass {
        a - b
    }
    fn with_guard(&self, c: &SurfaceClass, n_lo: i64) -> SurfaceClass {
        c.with_guard(n_lo)
    }
    fn at(&self, c: &SurfaceClass, n: i64) -> SurfaceClass {
        c.at(n)
    }
    fn display(&self, c: &SurfaceClass) -> String {
        RuledSurfaceModel::display(self, c)
    }
    fn canonical(&self) -> Result<SurfaceClass> {
        Ok(self.canonical_class())
    }
    fn relation_lattice(&self) -> Result<Lattice> {
        let r = self.curve().rank();
        let gens: Vec<Vec<i64>> = self
            .curve()
            .relations()
            .iter()
            .map(|rel| std::iter::once(0).chain(rel.iter().copied()).collect())
            .collect();
        Ok(Lattice::new(r + 1, &gens))
    }
    fn flat(&self, c: &SurfaceClass) -> ClassVec {
        ClassVec::from_coords(&[c.e]).concat(&c.base.0).with_guard(c.guard())
    }
}

impl PolarizedBase for HypersurfaceModel {
    type Class = RestrictedClass;

    fn label(&self) -> &str {
        self.name()
    }
    fn dim(&self) -> usize {
        2
    }
    fn h(&self, c: &RestrictedClass, i: usize) -> Hval {
        HypersurfaceModel::h(self, c, i)
    }
    fn ample(&self, m: &RestrictedClass) -> Result<Certificate> {
        self.is_ample(m)
    }
    fn scale_param(&self, m: &RestrictedClass, n_lo: i64) -> Option<RestrictedClass> {
        m.0.scale_form(&LinearForm::param(n_lo)).map(RestrictedClass)
    }
    fn sub(&self, a: &RestrictedClass, b: &RestrictedClass) -> RestrictedClass {
        RestrictedClass(&a.0 - &b.0)
    }
    fn with_guard(&self, c: &RestrictedClass, n_lo: i64) -> RestrictedClass {
        RestrictedClass(c.0.with_guard(n_lo))
    }
    fn at(&self, c: &RestrictedClass, n: i64) -> RestrictedClass {
        RestrictedClass(c.0.at(n))
    }
    fn display(&self, c: &RestrictedClass) -> String {
        HypersurfaceModel::display(self, c)
    }
    fn canonical(&self) -> Result<RestrictedClass> {
        self.adjunction_canonical()
    }
    fn relation_lattice(&self) -> Result<Lattice> {
        if !self.restriction_is_declared() {
            return Err(EngineError::Precondition(format!(
                "class group of {} needs a declared restriction kernel",
                self.name()
            )));
        }
        Ok(self.restricted_lattice().clone())
    }
    fn flat(&self, c: &RestrictedClass) -> ClassVec {
        c.0.flat()
    }
    fn certificates(&self) -> Result<Vec<(String, Certificate)>> {
        Ok(vec![("connected".to_string(), self.connectedness_cert()?), ("smooth".to_string(), self.smoothness_cert()?)])
    }
    fn assumptions(&self) -> Vec<String> {
        vec![FAITHFUL_PRESENTATION.to_string(), self.restriction_assumption()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepEntry {
    pub n: i64,
    pub i: usize,
    pub value: HValue,
    #[serde(skip)]
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingCertificate {
    /// The symbolic part covers every `n ≥ n_lo`.
    pub n_lo: i64,
    pub symbolic: Vec<Certificate>,
    pub sweep: Vec<SweepEntry>,
    pub assumptions: Vec<String>,
}

impl VanishingCertificate {
    /// Coverage and replay: every symbolic node checks and concludes zero,
    /// the sweep covers `1 ≤ n < n_lo` in every degree, all with value zero.
    pub fn check(&self, dim: usize) -> std::result::Result<(), String> {
        if self.symbolic.len() != dim {
            return Err("one symbolic certificate per degree expected".into());
        }
        for c in &self.symbolic {
            c.check().map_err(|e| e.to_string())?;
            match c.value().form() {
                Some(f) if f.is_identically(0) && f.n_lo <= self.n_lo => {}
                _ => return Err(format!("{} does not vanish from n = {}", c.claim, self.n_lo)),
            }
        }
        for n in 1..self.n_lo {
            for i in 1..=dim {
                let e = self
                    .sweep
                    .iter()
                    .find(|e| e.n == n && e.i == i)
                    .ok_or_else(|| format!("sweep misses (i, n) = ({i}, {n})"))?;
                e.certificate.check().map_err(|e| e.to_string())?;
                if !e.value.is_zero() {
                    return Err(format!("nonzero value at (i, n) = ({i}, {n})"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub i: usize,
    pub n: i64,
    pub value: HValue,
    #[serde(skip)]
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionOutcome {
    pub value: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<VanishingCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unresolved: Vec<String>,
}

/// `hⁱ(base, nM − Σ) = 0` for all `1 ≤ i ≤ dim`, `n ≥ 1`.
pub fn db_criterion<P: PolarizedBase>(
    base: &P,
    m: &P::Class,
    sigma: Option<&P::Class>,
    nmax: i64,
) -> Result<CriterionOutcome> {
    let amp = base.ample(m)?;
    if amp.truth_value() != Some(true) {
        return Err(EngineError::Precondition(format!(
            "polarization {} has no ampleness certificate",
            base.display(m)
        )));
    }
    let dim = base.dim();
    let mut symbolic = None;
    for g0 in 1..=nmax.max(1) {
        let fam = base.family(m, sigma, g0)?;
        let certs: Vec<Certificate> = (1..=dim).map(|i| base.h(&fam, i).certificate).collect();
        if certs.iter().all(|c| c.value().is_zero()) {
            symbolic = Some((g0, certs));
            break;
        }
    }
    let fam = base.family(m, sigma, 1)?;
    let mut sweep = Vec::new();
    let mut unresolved = Vec::new();
    for n in 1..=nmax {
        let c = base.at(&fam, n);
        for i in 1..=dim {
            let h = base.h(&c, i);
            if h.value.is_certainly_nonzero() {
                return Ok(CriterionOutcome {
                    value: Some(false),
                    certificate: None,
                    witness: Some(Witness { i, n, value: h.value, certificate: h.certificate }),
                    unresolved: Vec::new(),
                });
            }
            if !h.value.is_zero() {
                unresolved.push(h.certificate.claim.clone());
            }
            sweep.push(SweepEntry { n, i, value: h.value, certificate: h.certificate });
        }
    }
    let Some((n_lo, symbolic)) = symbolic else {
        unresolved.push(format!("no symbolic vanishing for h^i({}, n({}) - Σ)", base.label(), base.display(m)));
        return Ok(CriterionOutcome { value: None, certificate: None, witness: None, unresolved });
    };
    let below: Vec<String> =
        sweep.iter().filter(|e| e.n < n_lo && !e.value.is_zero()).map(|e| e.certificate.claim.clone()).collect();
    if !below.is_empty() {
        return Ok(CriterionOutcome { value: None, certificate: None, witness: None, unresolved: below });
    }
    let mut assumptions = base.assumptions();
    for c in symbolic.iter().chain(sweep.iter().map(|e| &e.certificate)).chain(std::iter::once(&amp)) {
        for a in c.assumptions() {
            if !assumptions.contains(&a) {
                assumptions.push(a);
            }
        }
    }
    Ok(CriterionOutcome {
        value: Some(true),
        certificate: Some(VanishingCertificate { n_lo, symbolic, sweep, assumptions }),
        witness: None,
        unresolved: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexResult {
    /// Smallest `m ≥ 1` with `m·K ∈ ℤ·M`.
    pub index: i64,
    /// The `s` with `index·K ∼ s·M`.
    pub multiple: i64,
}

/// Smallest `m ≥ 1` with `m·k ∈ ℤ·m_class + Λ`.
pub fn lattice_index(lattice: &Lattice, k: &[i64], m: &[i64]) -> Result<IndexResult> {
    let span = lattice.extended(&[m.to_vec()]);
    let zero = vec![0; k.len()];
    let index = match span.affine_solutions(&zero, k) {
        Solutions::Progression { modulus, residue: 0 } if modulus >= 1 => modulus,
        _ => return Err(EngineError::NoIndex("no positive multiple of K lies in the span of M".into())),
    };
    let mk: Vec<i64> = k.iter().map(|x| x * index).collect();
    let neg_m: Vec<i64> = m.iter().map(|x| -x).collect();
    let multiple = match lattice.affine_solutions(&mk, &neg_m) {
        Solutions::Single(s) => s,
        Solutions::Progression { residue, .. } => residue,
        Solutions::Empty => return Err(EngineError::NoIndex("inconsistent lattice data".into())),
    };
    Ok(IndexResult { index, multiple })
}

/// Whether `m·K` is linearly equivalent to a multiple of `M`.
pub fn multiple_in_span<P: PolarizedBase>(base: &P, k: &P::Class, pol: &P::Class, m: i64) -> Result<bool> {
    let lattice = base.relation_lattice()?;
    let span = lattice.extended(&[concrete(base, pol)?]);
    let kk: Vec<i64> = concrete(base, k)?.iter().map(|x| x * m).collect();
    Ok(span.contains(&kk))
}

fn concrete<P: PolarizedBase>(base: &P, c: &P::Class) -> Result<Vec<i64>> {
    let v = base.flat(c);
    if !v.is_constant() {
        return Err(EngineError::Symbolic(base.display(c)));
    }
    Ok(v.offset)
}

pub fn cartier_index<P: PolarizedBase>(base: &P, pol: &P::Class) -> Result<IndexResult> {
    let k = base.canonical()?;
    let lattice = base.relation_lattice()?;
    lattice_index(&lattice, &concrete(base, &k)?, &concrete(base, pol)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub base: String,
    pub polarization: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,
    pub db_pair: CriterionOutcome,
    pub db_space: CriterionOutcome,
    pub cartier_index: Option<IndexResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_error: Option<String>,
    pub certificates: Vec<(String, Certificate)>,
    pub assumptions: Vec<String>,
}

/// Bundle the pair criterion, the space criterion and the Cartier index.
pub fn assemble_verdict<P: PolarizedBase>(
    base: &P,
    pol: &P::Class,
    boundary: Option<&P::Class>,
    nmax: i64,
) -> Result<Verdict> {
    let db_pair = db_criterion(base, pol, boundary, nmax)?;
    let db_space = db_criterion(base, pol, None, nmax)?;
    let (cartier_index, index_error) = match cartier_index(base, pol) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let certificates = base.certificates()?;
    let mut assumptions = base.assumptions();
    let sources = [&db_pair, &db_space].into_iter().filter_map(|o| o.certificate.as_ref());
    for a in sources
        .flat_map(|c| c.assumptions.iter().cloned())
        .chain(certificates.iter().flat_map(|(_, c)| c.assumptions()))
    {
        if !assumptions.contains(&a) {
            assumptions.push(a);
        }
    }
    Ok(Verdict {
        base: base.label().to_string(),
        polarization: base.display(pol),
        boundary: boundary.map(|b| base.display(b)),
        db_pair,
        db_space,
        cartier_index,
        index_error,
        certificates,
        assumptions,
    })
}

/// Evaluate `hⁱ` of a family for all `n ≥ guard`, splitting off finitely
/// many initial values when the symbolic rules only apply further out.
pub fn resolve_family<P: PolarizedBase>(base: &P, c: &P::Class, i: usize, guard: i64, nmax: i64) -> Hval {
    let direct = base.h(c, i);
    if direct.value.is_known() {
        return direct;
    }
    for g in guard + 1..=guard + nmax {
        let tail = base.h(&base.with_guard(c, g), i);
        let Some(form) = tail.value.form() else { continue };
        let heads: Vec<Hval> = (guard..g).map(|n| base.h(&base.at(c, n), i)).collect();
        if heads.iter().enumerate().all(|(j, h)| h.value.as_number() == Some(form.value_at(guard + j as i64))) {
            let mut premises: Vec<Certificate> = heads.into_iter().map(|h| h.certificate).collect();
            premises.push(tail.certificate);
            return Certificate::count(
                direct.certificate.claim.clone(),
                Rule::CaseSplit { n_lo: guard, symbolic_from: g },
                HValue::exact(form.with_guard(guard)),
            )
            .with_premises(premises)
            .into();
        }
        break;
    }
    direct
}

/// `F = (pr₁*E)|_T` is smooth: the boundary certificate for the pair.
pub fn boundary_certificate(t: &HypersurfaceModel, boundary: &RestrictedClass) -> Result<Option<Certificate>> {
    let s = t.ambient().surface();
    let zero_b = t.ambient().curve().zero();
    for side in [Side::E, Side::EInf] {
        let sec = match side {
            Side::E => s.section_e(),
            Side::EInf => s.section_inf(),
        };
        let lift = RestrictedClass(ProductClass::new(sec, zero_b.clone()));
        if t.is_equivalent(boundary, &lift)? == Some(true) {
            return t.boundary_smoothness(side).map(Some);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{FactTable, Generator};

    fn genus2() -> CurveModel {
        let gens = vec![
            Generator { name: "Theta".into(), degree: 1, point: false },
            Generator { name: "P".into(), degree: 1, point: true },
        ];
        let b = CurveModel::new("B", 2, gens, vec![], vec![2, 0], FactTable::default()).unwrap();
        let theta = b.generator_class("Theta").unwrap();
        b.with_facts(b.theta_facts(&theta, "Theta").unwrap().facts)
    }

    #[test]
    fn cone_over_genus_two_curve() {
        let b = genus2();
        let m = DivisorClass::constant(vec![3, 0]);
        let out = db_criterion(&b, &m, None, DEFAULT_SWEEP).unwrap();
        assert_eq!(out.value, Some(true));
        let cert = out.certificate.unwrap();
        assert_eq!(cert.n_lo, 1);
        cert.check(1).unwrap();
    }

    #[test]
    fn failing_criterion_has_witness() {
        let b = genus2();
        // M = Theta + P has degree 2: h1(M) = h0(Theta - P) = 0, but
        // h1(nM - 2P) at n = 1 is h0(K - Theta + P) = h0(Theta + P) >= 1.
        let m = DivisorClass::constant(vec![1, 1]);
        let sigma = DivisorClass::constant(vec![0, 2]);
        let out = db_criterion(&b, &m, Some(&sigma), DEFAULT_SWEEP).unwrap();
        assert_eq!(out.value, Some(false));
        let w = out.witness.unwrap();
        assert_eq!((w.i, w.n), (1, 1));
    }

    #[test]
    fn ampleness_required() {
        let b = genus2();
        let m = DivisorClass::constant(vec![0, 0]);
        assert!(db_criterion(&b, &m, None, 4).is_err());
    }

    #[test]
    fn index_congruences() {
        let l = Lattice::zero(1);
        assert_eq!(lattice_index(&l, &[1], &[1]).unwrap(), IndexResult { index: 1, multiple: 1 });
        assert_eq!(lattice_index(&l, &[3], &[2]).unwrap(), IndexResult { index: 2, multiple: 3 });
        assert_eq!(lattice_index(&l, &[5], &[4]).unwrap(), IndexResult { index: 4, multiple: 5 });
        assert!(lattice_index(&Lattice::zero(2), &[1, 0], &[0, 1]).is_err());
    }

    #[test]
    fn paper_verdict() {
        let t = crate::product::tests::paper_hypersurface();
        let s = t.ambient().surface();
        let l = s.class(1, DivisorClass::constant(vec![2, 0]));
        let m = RestrictedClass(ProductClass::new(l.scale(4), DivisorClass::constant(vec![4, 0])));
        let f = RestrictedClass(ProductClass::new(s.section_e(), t.ambient().curve().zero()));
        let v = assemble_verdict(&t, &m, Some(&f), DEFAULT_SWEEP).unwrap();
        assert_eq!(v.db_pair.value, Some(true));
        v.db_pair.certificate.as_ref().unwrap().check(2).unwrap();
        assert_eq!(v.db_space.value, Some(false));
        let w = v.db_space.witness.unwrap();
        assert_eq!((w.i, w.n, w.value.as_number()), (1, 1, Some(3)));
        assert_eq!(v.cartier_index, Some(IndexResult { index: 4, multiple: 5 }));
        let k = t.adjunction_canonical().unwrap();
        for bad in 1..=3 {
            assert!(!multiple_in_span(&t, &k, &m, bad).unwrap());
        }
        assert!(multiple_in_span(&t, &k, &m, 4).unwrap());
        assert_eq!(boundary_certificate(&t, &f).unwrap().unwrap().truth_value(), Some(true));
    }
}
