//! Divisor classes on a smooth projective curve.
//!
//! `Pic(C)` is modelled as `ℤ^r / Λ` over named generators, with `Λ` the
//! declared relation lattice. `h⁰` is computed by a fixed, first-match rule
//! chain; every answer is a [`Certificate`]. Classes may depend linearly on
//! a parameter `n`, in which case each rule fires only when its hypothesis
//! holds for all `n` in the guard range.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::Serialize;

use crate::cert::{Certificate, HValue, Hval, Rule};
use crate::error::{EngineError, Result};
use crate::lattice::Lattice;
use crate::linear::{ClassVec, LinearForm};

/// Default cap on nested point-subtraction / duality / drop-test steps.
pub const DEFAULT_DEPTH_CAP: u8 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    /// Points take part in base-point tests and point subtraction.
    pub point: bool,
}

/// Coordinates of a class over the generators of one curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DivisorClass(pub ClassVec);

impl DivisorClass {
    pub fn constant(coords: Vec<i64>) -> Self {
        DivisorClass(ClassVec::constant(coords))
    }

    pub fn zero(len: usize) -> Self {
        DivisorClass(ClassVec::zero(len))
    }

    pub fn coords(&self) -> &ClassVec {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_constant()
    }

    pub fn scale(&self, k: i64) -> Self {
        DivisorClass(self.0.scale(k))
    }

    pub fn scale_form(&self, k: &LinearForm) -> Option<Self> {
        self.0.scale_form(k).map(DivisorClass)
    }

    pub fn at(&self, n: i64) -> Self {
        DivisorClass(self.0.at(n))
    }

    pub fn with_guard(&self, n_lo: i64) -> Self {
        DivisorClass(self.0.clone().with_guard(n_lo))
    }

    pub fn guard(&self) -> i64 {
        self.0.n_lo
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass(&self.0 + &rhs.0)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass(&self.0 - &rhs.0)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass(-&self.0)
    }
}

/// `f_*O_C = ⊕ O_{P¹}(t)` for the double cover defined by `g12`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCover {
    pub g12: DivisorClass,
    pub twists: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelledClass {
    pub label: String,
    pub class: DivisorClass,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactTable {
    pub h0: Vec<(LabelledClass, u64)>,
    pub basepoint_free: Vec<LabelledClass>,
    pub noneffective: Vec<LabelledClass>,
    pub double_cover: Option<DoubleCover>,
}

impl FactTable {
    /// Record `h⁰ = value`; a zero value also marks the class non-effective.
    pub fn insert_h0(&mut self, label: &str, class: DivisorClass, value: u64) {
        let lc = LabelledClass { label: label.to_string(), class };
        if value == 0 && !self.noneffective.contains(&lc) {
            self.noneffective.push(lc.clone());
        }
        if !self.h0.iter().any(|(c, _)| c == &lc) {
            self.h0.push((lc, value));
        }
    }

    pub fn insert_basepoint_free(&mut self, label: &str, class: DivisorClass) {
        self.basepoint_free.push(LabelledClass { label: label.to_string(), class });
    }

    pub fn insert_noneffective(&mut self, label: &str, class: DivisorClass) {
        let lc = LabelledClass { label: label.to_string(), class };
        if !self.noneffective.contains(&lc) {
            self.noneffective.push(lc);
        }
    }

    pub fn merge(&mut self, other: FactTable) {
        for (lc, v) in other.h0 {
            self.insert_h0(&lc.label, lc.class, v);
        }
        self.basepoint_free.extend(other.basepoint_free);
        for lc in other.noneffective {
            self.insert_noneffective(&lc.label, lc.class);
        }
        if other.double_cover.is_some() {
            self.double_cover = other.double_cover;
        }
    }
}

/// A smooth projective curve with a finitely presented class group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveModel {
    name: String,
    genus: i64,
    generators: Vec<Generator>,
    relations: Vec<Vec<i64>>,
    #[serde(skip)]
    lattice: Lattice,
    canonical: DivisorClass,
    facts: FactTable,
    depth_cap: u8,
}

/// Base locus of a complete linear system on a curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum CurveLocus {
    Empty,
    Points(Vec<String>),
    Everything,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaParity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub parity: ThetaParity,
    pub reason: String,
    /// Theta characteristics up to equivalence: all, odd (effective), even.
    pub counts: (u64, u64, u64),
    pub facts: FactTable,
}

impl CurveModel {
    pub fn new(
        name: &str,
        genus: i64,
        generators: Vec<Generator>,
        relations: Vec<Vec<i64>>,
        canonical: Vec<i64>,
        facts: FactTable,
    ) -> Result<Self> {
        let r = generators.len();
        let check_len = |len: usize| {
            if len != r {
                Err(EngineError::Length { model: name.to_string(), expected: r, found: len })
            } else {
                Ok(())
            }
        };
        if genus < 0 {
            return Err(EngineError::InvalidModel { model: name.into(), what: "negative genus".into() });
        }
        let degrees: Vec<i64> = generators.iter().map(|g| g.degree).collect();
        for rel in &relations {
            check_len(rel.len())?;
            let degree: i64 = rel.iter().zip(&degrees).map(|(a, d)| a * d).sum();
            if degree != 0 {
                return Err(EngineError::RelationDegree { model: name.into(), relation: rel.clone(), degree });
            }
        }
        check_len(canonical.len())?;
        let kdeg: i64 = canonical.iter().zip(&degrees).map(|(a, d)| a * d).sum();
        if kdeg != 2 * genus - 2 {
            return Err(EngineError::CanonicalDegree { model: name.into(), expected: 2 * genus - 2, found: kdeg });
        }
        for (lc, _) in &facts.h0 {
            check_len(lc.class.len())?;
        }
        for lc in facts.basepoint_free.iter().chain(&facts.noneffective) {
            check_len(lc.class.len())?;
        }
        if let Some(dc) = &facts.double_cover {
            check_len(dc.g12.len())?;
            let d: i64 = dc.g12.0.offset.iter().zip(&degrees).map(|(a, d)| a * d).sum();
            if d != 2 || !dc.g12.is_constant() {
                return Err(EngineError::InvalidModel {
                    model: name.into(),
                    what: format!("double cover class must be a concrete class of degree 2, found degree {d}"),
                });
            }
            if dc.twists.is_empty() {
                return Err(EngineError::InvalidModel { model: name.into(), what: "double cover needs twists".into() });
            }
        }
        let lattice = Lattice::new(r, &relations);
        Ok(CurveModel {
            name: name.to_string(),
            genus,
            generators,
            relations,
            lattice,
            canonical: DivisorClass::constant(canonical),
            facts,
            depth_cap: DEFAULT_DEPTH_CAP,
        })
    }

    pub fn with_depth_cap(mut self, cap: u8) -> Self {
        self.depth_cap = cap;
        self
    }

    pub fn with_facts(&self, extra: FactTable) -> Self {
        let mut c = self.clone();
        c.facts.merge(extra);
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vec<i64>] {
        &self.relations
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn facts(&self) -> &FactTable {
        &self.facts
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn generator_class(&self, name: &str) -> Option<DivisorClass> {
        self.generator_index(name).map(|i| DivisorClass(ClassVec::unit(self.rank(), i)))
    }

    pub fn zero(&self) -> DivisorClass {
        DivisorClass::zero(self.rank())
    }

    pub fn canonical_class(&self) -> DivisorClass {
        self.canonical.clone()
    }

    /// Some degree-one point generator, used as the fibre representative on
    /// ruled surfaces.
    pub fn first_point(&self) -> Option<DivisorClass> {
        self.generators
            .iter()
            .position(|g| g.point && g.degree == 1)
            .map(|i| DivisorClass(ClassVec::unit(self.rank(), i)))
    }

    fn points(&self) -> Vec<(String, DivisorClass)> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.point)
            .map(|(i, g)| (g.name.clone(), DivisorClass(ClassVec::unit(self.rank(), i))))
            .collect()
    }

    pub fn check_class(&self, d: &DivisorClass) -> Result<()> {
        if d.len() != self.rank() {
            return Err(EngineError::Length { model: self.name.clone(), expected: self.rank(), found: d.len() });
        }
        Ok(())
    }

    pub fn degree(&self, d: &DivisorClass) -> LinearForm {
        d.0.dot(&self.degrees())
    }

    /// Canonical representative modulo the relation lattice.
    pub fn normalize(&self, d: &DivisorClass) -> DivisorClass {
        DivisorClass(ClassVec {
            offset: self.lattice.reduce(&d.0.offset),
            slope: self.lattice.reduce(&d.0.slope),
            n_lo: d.0.n_lo,
        })
    }

    /// Linear equivalence, decided for every `n` in the guard range;
    /// `None` when it holds for some admissible `n` but not others.
    pub fn is_equivalent(&self, a: &DivisorClass, b: &DivisorClass) -> Option<bool> {
        let diff = a - b;
        self.lattice.affine_solutions(&diff.0.offset, &diff.0.slope).for_all_from(diff.0.n_lo)
    }

    pub fn serre_dual(&self, d: &DivisorClass) -> DivisorClass {
        &self.canonical.with_guard(d.guard()) - d
    }

    /// Riemann–Roch: `χ = deg − g + 1`.
    pub fn chi(&self, d: &DivisorClass) -> LinearForm {
        self.degree(d) - LinearForm::constant(self.genus - 1)
    }

    pub fn h0(&self, d: &DivisorClass) -> Hval {
        Eval::new(self).h0(d, 0).into()
    }

    pub fn h1(&self, d: &DivisorClass) -> Hval {
        let dual = self.serre_dual(d);
        let h = Eval::new(self).h0(&dual, 0);
        Certificate::count(format!("h1({}, {})", self.name, self.display(d)), Rule::SerreDual, h.value())
            .with_premises(vec![h])
            .into()
    }

    /// `h^i` for `i = 0, 1`; zero above the dimension.
    pub fn cohomology(&self, d: &DivisorClass, i: usize) -> Hval {
        match i {
            0 => self.h0(d),
            1 => self.h1(d),
            _ => Certificate::count(
                format!("h{i}({}, {})", self.name, self.display(d)),
                Rule::AboveDimension { degree: i, dim: 1 },
                HValue::zero_from(d.guard()),
            )
            .into(),
        }
    }

    pub fn is_basepoint_free(&self, d: &DivisorClass) -> Certificate {
        Eval::new(self).bpf(d, 0)
    }

    /// Support of the base locus of `|d|`, when it can be pinned down.
    pub fn base_locus(&self, d: &DivisorClass) -> (Option<CurveLocus>, Certificate) {
        let ev = Eval::new(self);
        let claim = format!("Bs|{}| on {}", self.display(d), self.name);
        let h = ev.h0(d, 0);
        if h.value().is_zero() {
            let c = Certificate::truth(claim, Rule::EmptySystem, Some(false)).with_premises(vec![h]);
            return (Some(CurveLocus::Everything), c);
        }
        let bpf = ev.bpf(d, 0);
        if bpf.truth_value() == Some(true) {
            return (Some(CurveLocus::Empty), bpf);
        }
        let Some(hd) = h.value().form() else {
            return (None, Certificate::unresolved_truth(claim, "h0 unresolved").with_premises(vec![h]));
        };
        for (name, p) in self.points() {
            let rest = d - &p;
            let rest_bpf = ev.bpf(&rest, 0);
            let rest_h = ev.h0(&rest, 0);
            let Some(hr) = rest_h.value().form() else { continue };
            if rest_bpf.truth_value() != Some(true) || !hr.always_ge(1) {
                continue;
            }
            // |d| ⊇ |d − P| + P with |d − P| free, so Bs|d| ⊆ {P}.
            let locus = if hr.same_values(&hd) { CurveLocus::Points(vec![name.clone()]) } else { CurveLocus::Empty };
            let c = Certificate::truth(claim, Rule::BaseLocusAtMost { point: name }, Some(true))
                .with_premises(vec![h, rest_h, rest_bpf]);
            return (Some(locus), c);
        }
        (None, Certificate::unresolved_truth(claim, "no point isolates the base locus").with_premises(vec![h, bpf]))
    }

    /// Classify a square root of `K` on a genus-2 curve and, if even,
    /// produce the facts `h⁰(Θ) = 0` and `Θ` non-effective.
    pub fn classify_theta(&self, theta: &DivisorClass, label: &str) -> Result<ThetaReport> {
        if self.genus != 2 {
            return Err(EngineError::Precondition(format!(
                "theta characteristics are classified on genus-2 curves; {} has genus {}",
                self.name, self.genus
            )));
        }
        self.check_class(theta)?;
        if self.is_equivalent(&theta.scale(2), &self.canonical) != Some(true) {
            return Err(EngineError::Theta(format!("2·{label} is not canonical on {}", self.name)));
        }
        let g = self.genus as u32;
        let counts = (1u64 << (2 * g), (1u64 << (g - 1)) * ((1u64 << g) - 1), (1u64 << (g - 1)) * ((1u64 << g) + 1));
        let mut parity = ThetaParity::Even;
        let mut reason = format!("{label} is not equivalent to any point and carries no sections");
        for (name, p) in self.points() {
            if self.is_equivalent(theta, &p) == Some(true) {
                parity = ThetaParity::Odd;
                reason = format!("{label} ~ {name} is effective");
            }
        }
        if parity == ThetaParity::Even {
            if let Some(v) = self.h0(theta).value.as_number() {
                if v > 0 {
                    parity = ThetaParity::Odd;
                    reason = format!("h0({label}) = {v}");
                }
            }
        }
        let mut facts = FactTable::default();
        if parity == ThetaParity::Even {
            facts.insert_h0(label, theta.clone(), 0);
        }
        Ok(ThetaReport { parity, reason, counts, facts })
    }

    /// The facts a valid (even) theta characteristic installs; odd ones are rejected.
    pub fn theta_facts(&self, theta: &DivisorClass, label: &str) -> Result<ThetaReport> {
        let report = self.classify_theta(theta, label)?;
        match report.parity {
            ThetaParity::Even => Ok(report),
            ThetaParity::Odd => Err(EngineError::Theta(report.reason)),
        }
    }

    pub fn display(&self, d: &DivisorClass) -> String {
        let names: Vec<&str> = self.generators.iter().map(|g| g.name.as_str()).collect();
        display_combination(&names, &d.0)
    }
}

/// Render `Σ cᵢ·nameᵢ` with coefficients that may depend on `n`.
pub fn display_combination(names: &[&str], v: &ClassVec) -> String {
    let mut out = String::new();
    for (i, name) in names.iter().enumerate() {
        let c = v.coord(i);
        if c.is_identically(0) {
            continue;
        }
        let (neg, mag) = if c.is_constant() {
            (c.offset < 0, LinearForm::constant(c.offset.abs()))
        } else if c.slope < 0 {
            (true, -c)
        } else {
            (false, c)
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag.is_identically(1) {
            out.push_str(name);
        } else if mag.is_constant() {
            out.push_str(&format!("{}*{name}", mag.offset));
        } else {
            out.push_str(&format!("({mag})*{name}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for CurveLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveLocus::Empty => write!(f, "{{}}"),
            CurveLocus::Everything => write!(f, "everything"),
            CurveLocus::Points(ps) => write!(f, "{{{}}}", ps.join(", ")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Query {
    H0,
    Bpf,
}

/// One evaluation session: results are memoised per (query, class, depth),
/// so they are a pure function of their inputs.
struct Eval<'a> {
    curve: &'a CurveModel,
    memo: RefCell<HashMap<(Query, DivisorClass, u8), Certificate>>,
}

impl<'a> Eval<'a> {
    fn new(curve: &'a CurveModel) -> Self {
        Eval { curve, memo: RefCell::new(HashMap::new()) }
    }

    fn cached(
        &self,
        q: Query,
        d: &DivisorClass,
        depth: u8,
        f: impl FnOnce(&DivisorClass) -> Certificate,
    ) -> Certificate {
        let d = self.curve.normalize(d);
        let key = (q, d.clone(), depth);
        if let Some(c) = self.memo.borrow().get(&key) {
            return c.clone();
        }
        let c = f(&d);
        self.memo.borrow_mut().insert(key, c.clone());
        c
    }

    fn double_cover_multiple(&self, d: &DivisorClass) -> Option<LinearForm> {
        let dc = self.curve.facts.double_cover.as_ref()?;
        let deg = self.curve.degree(d);
        if deg.slope % 2 != 0 || deg.offset % 2 != 0 {
            return None;
        }
        let k = LinearForm::new(deg.slope / 2, deg.offset / 2, deg.n_lo);
        let pulled = dc.g12.scale_form(&k)?;
        (self.curve.is_equivalent(d, &pulled) == Some(true)).then_some(k)
    }

    fn h0(&self, d: &DivisorClass, depth: u8) -> Certificate {
        self.cached(Query::H0, d, depth, |d| self.h0_rules(d, depth))
    }

    fn h0_rules(&self, d: &DivisorClass, depth: u8) -> Certificate {
        let c = self.curve;
        let g = c.genus;
        let deg = c.degree(d);
        let guard = d.guard();
        let claim = format!("h0({}, {})", c.name, c.display(d));
        let zero = HValue::zero_from(guard);

        // R1
        if deg.always_lt(0) {
            return Certificate::count(claim, Rule::NegativeDegree { degree: deg }, zero);
        }
        // R2
        if deg.is_identically(0) {
            if let Some(trivial) = c.is_equivalent(d, &c.zero()) {
                let v = HValue::exact(LinearForm::new(0, i64::from(trivial), guard));
                return Certificate::count(claim, Rule::DegreeZero { trivial }, v);
            }
        }
        // R3
        if deg.always_gt(2 * g - 2) {
            let v = HValue::exact(deg - LinearForm::constant(g - 1));
            return Certificate::count(claim, Rule::NonSpecial { degree: deg, genus: g }, v);
        }
        // R4
        for (lc, v) in &c.facts.h0 {
            if c.is_equivalent(d, &lc.class) == Some(true) {
                let value = HValue::exact(LinearForm::new(0, *v as i64, guard));
                return Certificate::count(claim, Rule::Fact { fact: format!("h0({}) = {v}", lc.label) }, value);
            }
        }
        for lc in &c.facts.noneffective {
            if c.is_equivalent(d, &lc.class) == Some(true) {
                return Certificate::count(claim, Rule::Fact { fact: format!("{} not effective", lc.label) }, zero);
            }
        }
        // a point on a curve of positive genus does not move
        if g >= 1 && d.is_constant() {
            for (name, p) in c.points() {
                if c.is_equivalent(d, &p) == Some(true) {
                    return Certificate::count(claim, Rule::SinglePoint { point: name, genus: g }, HValue::number(1));
                }
            }
        }
        // R5
        if let (Some(k), Some(dc)) = (self.double_cover_multiple(d), c.facts.double_cover.as_ref()) {
            let parts: Option<Vec<LinearForm>> =
                dc.twists.iter().map(|t| (k + LinearForm::constant(t + 1)).positive_part()).collect();
            if let Some(parts) = parts {
                let total = parts.into_iter().fold(LinearForm::new(0, 0, guard), |a, b| a + b);
                return Certificate::count(
                    claim,
                    Rule::DoubleCover { multiple: k, twists: dc.twists.clone() },
                    HValue::exact(total),
                );
            }
        }
        if depth >= c.depth_cap {
            return Certificate::unresolved_count(claim, "recursion depth cap reached");
        }
        // R6
        for (name, p) in c.points() {
            let bigger = d + &p;
            let bpf = self.bpf(&bigger, depth + 1);
            if bpf.truth_value() != Some(true) {
                continue;
            }
            let h = self.h0(&bigger, depth + 1);
            if let Some(f) = h.value().form() {
                if f.always_ge(1) {
                    let v = HValue::exact(f - LinearForm::constant(1));
                    return Certificate::count(claim, Rule::PointSubtraction { point: name }, v)
                        .with_premises(vec![h, bpf]);
                }
            }
        }
        // R7
        let dual = c.serre_dual(d);
        let h = self.h0(&dual, depth + 1);
        if let Some(f) = h.value().form() {
            let v = HValue::exact(f + deg - LinearForm::constant(g - 1));
            return Certificate::count(claim, Rule::SerreRiemannRoch { degree: deg, genus: g }, v)
                .with_premises(vec![h]);
        }
        Certificate::unresolved_count(claim, "no rule applies")
    }

    fn bpf(&self, d: &DivisorClass, depth: u8) -> Certificate {
        self.cached(Query::Bpf, d, depth, |d| self.bpf_rules(d, depth))
    }

    fn bpf_rules(&self, d: &DivisorClass, depth: u8) -> Certificate {
        let c = self.curve;
        let g = c.genus;
        let deg = c.degree(d);
        let claim = format!("bpf({}, {})", c.name, c.display(d));

        if c.is_equivalent(d, &c.zero()) == Some(true) {
            return Certificate::truth(claim, Rule::TrivialClass, Some(true));
        }
        if deg.always_lt(0) {
            let h = self.h0(d, depth);
            return Certificate::truth(claim, Rule::EmptySystem, Some(false)).with_premises(vec![h]);
        }
        for lc in &c.facts.basepoint_free {
            if c.is_equivalent(d, &lc.class) == Some(true) {
                return Certificate::truth(claim, Rule::DeclaredBasepointFree { fact: lc.label.clone() }, Some(true));
            }
        }
        if deg.always_ge(2 * g) {
            return Certificate::truth(claim, Rule::LargeDegree { degree: deg, genus: g }, Some(true));
        }
        if let Some(k) = self.double_cover_multiple(d) {
            if k.always_ge(0) {
                return Certificate::truth(claim, Rule::PullbackBasepointFree { multiple: k }, Some(true));
            }
        }
        if depth >= c.depth_cap {
            return Certificate::unresolved_truth(claim, "recursion depth cap reached");
        }
        let h = self.h0(d, depth + 1);
        if h.value().is_zero() {
            return Certificate::truth(claim, Rule::EmptySystem, Some(false)).with_premises(vec![h]);
        }
        let Some(hf) = h.value().form().filter(|f| f.always_ge(1)) else {
            return Certificate::unresolved_truth(claim, "h0 unresolved").with_premises(vec![h]);
        };
        let points = c.points();
        if points.is_empty() {
            return Certificate::unresolved_truth(claim, "no point generators to test");
        }
        let mut premises = vec![h.clone()];
        let mut names = Vec::new();
        let mut undecided = false;
        for (name, p) in points {
            let w = self.h0(&(d - &p), depth + 1);
            match w.value().form() {
                Some(wf) if wf.same_values(&hf) => {
                    return Certificate::truth(claim, Rule::BasePoint { point: name }, Some(false))
                        .with_premises(vec![h, w]);
                }
                Some(wf) if wf.same_values(&(hf - LinearForm::constant(1))) => {
                    names.push(name);
                    premises.push(w);
                }
                _ => undecided = true,
            }
        }
        if undecided {
            return Certificate::unresolved_truth(claim, "drop test inconclusive");
        }
        Certificate::truth(claim, Rule::PointDrop { points: names }, Some(true)).with_premises(premises)
    }
}
