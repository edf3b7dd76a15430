//! Derivation certificates.
//!
//! Every number the engine reports is the conclusion of a tree of rule
//! applications. [`Certificate::check`] re-derives each node's conclusion
//! from its recorded data and its premises' conclusions, so a tree can be
//! audited without trusting the code path that built it.

use std::fmt;

use serde::Serialize;

use crate::linear::LinearForm;

/// A cohomology dimension: exact (possibly as a form in `n`), bounded, or
/// unknown. Unknown never turns into zero by itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HValue {
    Exact { value: LinearForm },
    Bounds { lo: i64, hi: Option<i64> },
    Unknown,
}

impl HValue {
    pub fn exact(v: LinearForm) -> Self {
        HValue::Exact { value: v }
    }

    pub fn number(v: i64) -> Self {
        HValue::Exact { value: LinearForm::constant(v) }
    }

    pub fn zero_from(n_lo: i64) -> Self {
        HValue::Exact { value: LinearForm::new(0, 0, n_lo) }
    }

    pub fn form(&self) -> Option<LinearForm> {
        match self {
            HValue::Exact { value } => Some(*value),
            _ => None,
        }
    }

    /// Exact and independent of `n`.
    pub fn as_number(&self) -> Option<i64> {
        self.form().and_then(|f| f.as_constant())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, HValue::Exact { value } if value.is_identically(0))
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, HValue::Unknown)
    }

    /// Certainly nonzero: a positive exact value or a positive lower bound.
    pub fn is_certainly_nonzero(&self) -> bool {
        match self {
            HValue::Exact { value } => value.always_gt(0),
            HValue::Bounds { lo, .. } => *lo > 0,
            HValue::Unknown => false,
        }
    }

    /// Sum; any unknown addend makes the sum unknown.
    pub fn add(&self, other: &HValue) -> HValue {
        match (self, other) {
            (HValue::Exact { value: a }, HValue::Exact { value: b }) => HValue::exact(*a + *b),
            (HValue::Unknown, _) | (_, HValue::Unknown) => HValue::Unknown,
            (a, b) => {
                let (alo, ahi) = a.bounds().expect("known");
                let (blo, bhi) = b.bounds().expect("known");
                HValue::Bounds { lo: alo + blo, hi: ahi.zip(bhi).map(|(x, y)| x + y) }
            }
        }
    }

    /// Product with the conventions `Unknown·0 = 0` and `Unknown·x = Unknown`.
    pub fn mul(&self, other: &HValue) -> HValue {
        if self.is_zero() {
            return self.clone();
        }
        if other.is_zero() {
            return other.clone();
        }
        match (self, other) {
            (HValue::Exact { value: a }, HValue::Exact { value: b }) => match a.checked_mul(b) {
                Some(p) => HValue::exact(p),
                None => HValue::Unknown,
            },
            _ => HValue::Unknown,
        }
    }

    /// `(lo, hi)` for concrete values.
    pub fn bounds(&self) -> Option<(i64, Option<i64>)> {
        match self {
            HValue::Exact { value } => value.as_constant().map(|v| (v, Some(v))),
            HValue::Bounds { lo, hi } => Some((*lo, *hi)),
            HValue::Unknown => None,
        }
    }
}

impl fmt::Display for HValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HValue::Exact { value } => write!(f, "{value}"),
            HValue::Bounds { lo, hi: Some(hi) } => write!(f, "[{lo}, {hi}]"),
            HValue::Bounds { lo, hi: None } => write!(f, "[{lo}, ∞)"),
            HValue::Unknown => write!(f, "unknown"),
        }
    }
}

/// What a certificate node establishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Conclusion {
    Count { value: HValue },
    Truth { value: Option<bool> },
}

impl Conclusion {
    pub fn count(&self) -> Option<&HValue> {
        match self {
            Conclusion::Count { value } => Some(value),
            Conclusion::Truth { .. } => None,
        }
    }

    pub fn truth(&self) -> Option<bool> {
        match self {
            Conclusion::Truth { value } => *value,
            Conclusion::Count { .. } => None,
        }
    }
}

/// The inference used at a node, with the data needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    // curve h0
    NegativeDegree { degree: LinearForm },
    DegreeZero { trivial: bool },
    SinglePoint { point: String, genus: i64 },
    NonSpecial { degree: LinearForm, genus: i64 },
    Fact { fact: String },
    DoubleCover { multiple: LinearForm, twists: Vec<i64> },
    PointSubtraction { point: String },
    SerreRiemannRoch { degree: LinearForm, genus: i64 },
    SerreDual,
    // curve base points
    TrivialClass,
    DeclaredBasepointFree { fact: String },
    LargeDegree { degree: LinearForm, genus: i64 },
    PullbackBasepointFree { multiple: LinearForm },
    EmptySystem,
    PointDrop { points: Vec<String> },
    BasePoint { point: String },
    BaseLocusAtMost { point: String },
    // surfaces
    PushforwardSum { degree: usize },
    SymbolicRange { degree: usize, low_end: LinearForm, high_end: LinearForm, genus: i64 },
    RelativeVanishing { degree: usize },
    SurfaceSerre { degree: usize },
    Intersection { value: LinearForm },
    NakaiTwoRay { dot_section: i64, dot_fiber: i64, square: i64 },
    NefBig { dot_section: i64, dot_fiber: i64, square: i64, big: bool },
    SummandBaseLoci,
    ReducedBasePoint { point: String },
    // products and hypersurfaces
    Kunneth { degree: usize },
    LesVanishing { degree: usize },
    LesIsomorphism { degree: usize },
    LesBounds { degree: usize },
    ProductAmple,
    SmoothGeneralMember,
    SmoothBoundary,
    BigNefConnected { triple: i64, degree: i64 },
    AboveDimension { degree: usize, dim: usize },
    // parameterized families
    CaseSplit { n_lo: i64, symbolic_from: i64 },
    Sweep { n: i64 },
    // assumptions and declared inputs
    Assumed { assumption: String },
    Unresolved { reason: String },
}

/// A replayable derivation tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub claim: String,
    #[serde(flatten)]
    pub rule: Rule,
    pub conclusion: Conclusion,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<Certificate>,
}

/// A value together with the derivation that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hval {
    pub value: HValue,
    pub certificate: Certificate,
}

impl From<Certificate> for Hval {
    fn from(certificate: Certificate) -> Self {
        Hval { value: certificate.value(), certificate }
    }
}

/// A node whose conclusion does not follow from its rule and premises.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("certificate node `{claim}` does not check: {reason}")]
pub struct CheckError {
    pub claim: String,
    pub reason: String,
}

impl Certificate {
    pub fn new(claim: impl Into<String>, rule: Rule, conclusion: Conclusion) -> Self {
        Certificate { claim: claim.into(), rule, conclusion, premises: Vec::new() }
    }

    pub fn count(claim: impl Into<String>, rule: Rule, value: HValue) -> Self {
        Certificate::new(claim, rule, Conclusion::Count { value })
    }

    pub fn truth(claim: impl Into<String>, rule: Rule, value: Option<bool>) -> Self {
        Certificate::new(claim, rule, Conclusion::Truth { value })
    }

    pub fn unresolved_count(claim: impl Into<String>, reason: impl Into<String>) -> Self {
        Certificate::count(claim, Rule::Unresolved { reason: reason.into() }, HValue::Unknown)
    }

    pub fn unresolved_truth(claim: impl Into<String>, reason: impl Into<String>) -> Self {
        Certificate::truth(claim, Rule::Unresolved { reason: reason.into() }, None)
    }

    pub fn with_premises(mut self, premises: Vec<Certificate>) -> Self {
        self.premises = premises;
        self
    }

    pub fn value(&self) -> HValue {
        self.conclusion.count().cloned().unwrap_or(HValue::Unknown)
    }

    pub fn truth_value(&self) -> Option<bool> {
        self.conclusion.truth()
    }

    /// Assumptions named anywhere in the tree, deduplicated, in first-use order.
    pub fn assumptions(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_assumptions(&mut out);
        out
    }

    fn collect_assumptions(&self, out: &mut Vec<String>) {
        if let Rule::Assumed { assumption } = &self.rule {
            if !out.contains(assumption) {
                out.push(assumption.clone());
            }
        }
        for p in &self.premises {
            p.collect_assumptions(out);
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Certificate::node_count).sum::<usize>()
    }

    /// Re-derive every node bottom-up.
    pub fn check(&self) -> Result<(), CheckError> {
        for p in &self.premises {
            p.check()?;
        }
        self.check_node()
    }

    fn fail(&self, reason: impl Into<String>) -> Result<(), CheckError> {
        Err(CheckError { claim: self.claim.clone(), reason: reason.into() })
    }

    fn expect_count(&self, expected: HValue) -> Result<(), CheckError> {
        match self.conclusion.count() {
            Some(v) if same_value(v, &expected) => Ok(()),
            Some(v) => self.fail(format!("concludes {v}, rule gives {expected}")),
            None => self.fail("expected a count conclusion"),
        }
    }

    fn expect_truth(&self, expected: bool) -> Result<(), CheckError> {
        match self.conclusion.truth() {
            Some(v) if v == expected => Ok(()),
            other => self.fail(format!("concludes {other:?}, rule gives {expected}")),
        }
    }

    fn premise_count(&self, i: usize) -> Result<HValue, CheckError> {
        match self.premises.get(i).and_then(|p| p.conclusion.count()) {
            Some(v) => Ok(v.clone()),
            None => Err(CheckError { claim: self.claim.clone(), reason: format!("missing count premise {i}") }),
        }
    }

    fn premise_sum(&self) -> HValue {
        self.premises.iter().map(|p| p.value()).fold(HValue::number(0), |acc, v| acc.add(&v))
    }

    fn check_node(&self) -> Result<(), CheckError> {
        match &self.rule {
            Rule::NegativeDegree { degree } => {
                if !degree.always_lt(0) {
                    return self.fail("degree not negative on the whole range");
                }
                self.expect_count(HValue::number(0))
            }
            Rule::DegreeZero { trivial } => self.expect_count(HValue::number(i64::from(*trivial))),
            Rule::SinglePoint { genus, .. } => {
                if *genus < 1 {
                    return self.fail("a point moves on a rational curve");
                }
                self.expect_count(HValue::number(1))
            }
            Rule::NonSpecial { degree, genus } => {
                if !degree.always_gt(2 * genus - 2) {
                    return self.fail("degree not above 2g - 2 on the whole range");
                }
                self.expect_count(HValue::exact(*degree - LinearForm::constant(genus - 1)))
            }
            Rule::DoubleCover { multiple, twists } => {
                let mut total = LinearForm::ZERO;
                for t in twists {
                    match (*multiple + LinearForm::constant(t + 1)).positive_part() {
                        Some(p) => total = total + p,
                        None => return self.fail("twisted summand changes sign on the range"),
                    }
                }
                self.expect_count(HValue::exact(total))
            }
            Rule::PointSubtraction { .. } => {
                let h = self.premise_count(0)?;
                if self.premises.get(1).and_then(|p| p.truth_value()) != Some(true) {
                    return self.fail("second premise must certify basepoint freeness");
                }
                match h.form() {
                    Some(f) if f.always_ge(1) => self.expect_count(HValue::exact(f - LinearForm::constant(1))),
                    _ => self.fail("h0 of the enlarged class must be a positive form"),
                }
            }
            Rule::SerreRiemannRoch { degree, genus } => {
                let dual = self.premise_count(0)?;
                match dual.form() {
                    Some(f) => self.expect_count(HValue::exact(f + *degree - LinearForm::constant(genus - 1))),
                    None => self.fail("dual premise unresolved"),
                }
            }
            Rule::SerreDual | Rule::SurfaceSerre { .. } => self.expect_count(self.premise_count(0)?),
            Rule::TrivialClass | Rule::DeclaredBasepointFree { .. } => self.expect_truth(true),
            Rule::LargeDegree { degree, genus } => {
                if !degree.always_ge(2 * genus) {
                    return self.fail("degree below 2g");
                }
                self.expect_truth(true)
            }
            Rule::PullbackBasepointFree { multiple } => {
                if !multiple.always_ge(0) {
                    return self.fail("negative pullback multiple");
                }
                self.expect_truth(true)
            }
            Rule::EmptySystem => {
                if !self.premise_count(0)?.is_zero() {
                    return self.fail("system is not empty");
                }
                self.expect_truth(false)
            }
            Rule::PointDrop { points } => {
                let h = self.premise_count(0)?;
                let Some(h) = h.form() else { return self.fail("h0 unresolved") };
                if self.premises.len() != points.len() + 1 {
                    return self.fail("one premise per point expected");
                }
                for (i, point) in points.iter().enumerate() {
                    let w = self.premise_count(i + 1)?;
                    if !w.form().is_some_and(|w| w.same_values(&(h - LinearForm::constant(1)))) {
                        return self.fail(format!("no drop at {point}"));
                    }
                }
                self.expect_truth(true)
            }
            Rule::BasePoint { .. } => {
                let h = self.premise_count(0)?;
                let w = self.premise_count(1)?;
                match (h.form(), w.form()) {
                    (Some(h), Some(w)) if h.same_values(&w) && h.always_ge(1) => self.expect_truth(false),
                    _ => self.fail("h0 does not stay constant"),
                }
            }
            Rule::PushforwardSum { .. } | Rule::Kunneth { .. } => {
                let expected = if matches!(self.rule, Rule::Kunneth { .. }) {
                    self.premises
                        .chunks(2)
                        .map(|pair| pair[0].value().mul(&pair[1].value()))
                        .fold(HValue::number(0), |acc, v| acc.add(&v))
                } else {
                    self.premise_sum()
                };
                if !expected.is_known() {
                    return match self.conclusion.count() {
                        Some(HValue::Unknown) => Ok(()),
                        _ => self.fail("known conclusion from unknown premises"),
                    };
                }
                self.expect_count(expected)
            }
            Rule::SymbolicRange { degree, low_end, high_end, genus } => {
                let ok = match degree {
                    0 => low_end.always_lt(0) && high_end.always_lt(0),
                    1 => low_end.always_gt(2 * genus - 2) && high_end.always_gt(2 * genus - 2),
                    _ => false,
                };
                if !ok {
                    return self.fail("range endpoints do not force vanishing");
                }
                self.expect_count(HValue::number(0))
            }
            Rule::RelativeVanishing { .. } => match self.conclusion.count() {
                Some(v) if v.is_zero() => Ok(()),
                _ => self.fail("relative vanishing concludes zero"),
            },
            Rule::Intersection { value } => self.expect_count(HValue::exact(*value)),
            Rule::NakaiTwoRay { dot_section, dot_fiber, square } => {
                self.expect_truth(*dot_section > 0 && *dot_fiber > 0 && *square > 0)
            }
            Rule::NefBig { dot_section, dot_fiber, square, big } => {
                let nef = *dot_section >= 0 && *dot_fiber >= 0;
                if *big != (nef && *square > 0) {
                    return self.fail("bigness flag inconsistent");
                }
                self.expect_truth(nef)
            }
            Rule::LesVanishing { .. } => {
                let (mid, next_left) = (self.premise_count(0)?, self.premise_count(2)?);
                if !(mid.is_zero() && next_left.is_zero()) {
                    return self.fail("flanking terms do not vanish");
                }
                match self.conclusion.count() {
                    Some(v) if v.is_zero() => Ok(()),
                    _ => self.fail("expected zero"),
                }
            }
            Rule::LesIsomorphism { .. } => {
                let (mid, left, next_left) = (self.premise_count(0)?, self.premise_count(1)?, self.premise_count(2)?);
                if !(left.is_zero() && next_left.is_zero()) {
                    return self.fail("left terms do not vanish");
                }
                self.expect_count(mid)
            }
            Rule::LesBounds { .. } => {
                let vals: Vec<HValue> = (0..4).map(|i| self.premise_count(i)).collect::<Result<_, _>>()?;
                let expected = les_interval(&vals[0], &vals[1], &vals[2], &vals[3]);
                match self.conclusion.count() {
                    Some(v) if *v == expected => Ok(()),
                    Some(v) => self.fail(format!("interval {v} differs from {expected}")),
                    None => self.fail("expected a count"),
                }
            }
            Rule::BigNefConnected { triple, degree } => {
                let nef = self.premises.first().and_then(|p| p.truth_value()) == Some(true);
                self.expect_truth(nef && *degree > 0 && *triple > 0)
            }
            Rule::AboveDimension { degree, dim } => {
                if degree <= dim {
                    return self.fail("degree within the dimension");
                }
                match self.conclusion.count() {
                    Some(v) if v.is_zero() => Ok(()),
                    _ => self.fail("expected zero"),
                }
            }
            Rule::CaseSplit { n_lo, symbolic_from } => {
                let Some(last) = self.premises.last() else { return self.fail("no premises") };
                let Some(form) = last.value().form() else { return self.fail("symbolic tail unresolved") };
                if form.n_lo != *symbolic_from || self.premises.len() as i64 != symbolic_from - n_lo + 1 {
                    return self.fail("case split does not cover the range");
                }
                for (i, p) in self.premises[..self.premises.len() - 1].iter().enumerate() {
                    let n = n_lo + i as i64;
                    if p.value().as_number() != Some(form.value_at(n)) {
                        return self.fail(format!("value at n = {n} off the symbolic form"));
                    }
                }
                self.expect_count(HValue::exact(form.with_guard(*n_lo)))
            }
            // Nodes whose content is a recorded input or a structural summary.
            Rule::Fact { .. }
            | Rule::BaseLocusAtMost { .. }
            | Rule::SummandBaseLoci
            | Rule::ReducedBasePoint { .. }
            | Rule::ProductAmple
            | Rule::SmoothGeneralMember
            | Rule::SmoothBoundary
            | Rule::Sweep { .. }
            | Rule::Assumed { .. } => Ok(()),
            Rule::Unresolved { .. } => match &self.conclusion {
                Conclusion::Count { value: HValue::Unknown } | Conclusion::Truth { value: None } => Ok(()),
                _ => self.fail("unresolved node carries a value"),
            },
        }
    }

    /// Indented tree rendering used by `explain`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        use std::fmt::Write;
        let value = match &self.conclusion {
            Conclusion::Count { value } => value.to_string(),
            Conclusion::Truth { value: Some(b) } => b.to_string(),
            Conclusion::Truth { value: None } => "unknown".to_string(),
        };
        let rule = serde_json::to_value(&self.rule)
            .ok()
            .and_then(|v| v.get("rule").and_then(|r| r.as_str()).map(str::to_string))
            .unwrap_or_default();
        let _ = writeln!(out, "{}{} = {}   [{}]", "  ".repeat(depth), self.claim, value, rule);
        for p in &self.premises {
            p.render_into(out, depth + 1);
        }
    }
}

fn same_value(a: &HValue, b: &HValue) -> bool {
    match (a, b) {
        (HValue::Exact { value: x }, HValue::Exact { value: y }) => x.same_values(y),
        _ => a == b,
    }
}

/// Range of `h^i(T)` allowed by exactness of
/// `H^i(left) → H^i(mid) → H^i(T) → H^{i+1}(left) → H^{i+1}(mid)`.
pub fn les_interval(mid: &HValue, left: &HValue, next_left: &HValue, next_mid: &HValue) -> HValue {
    let lower_coker = match (mid.bounds(), left.bounds()) {
        (Some((m_lo, _)), Some((_, Some(l_hi)))) => (m_lo - l_hi).max(0),
        _ => 0,
    };
    let lower_ker = match (next_left.bounds(), next_mid.bounds()) {
        (Some((l_lo, _)), Some((_, Some(m_hi)))) => (l_lo - m_hi).max(0),
        _ => 0,
    };
    let hi = match (mid.bounds(), next_left.bounds()) {
        (Some((_, Some(a))), Some((_, Some(b)))) => Some(a + b),
        _ => None,
    };
    let lo = lower_coker + lower_ker;
    if lo == 0 && hi.is_none() {
        HValue::Unknown
    } else {
        HValue::Bounds { lo, hi }
    }
}
