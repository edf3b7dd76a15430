//! Split ruled surfaces `S = P(O_C ⊕ O_C(−A))` over a curve.
//!
//! A class is `aE + π*M`. Cohomology goes through `π_*O_S(aE + π*M) =
//! ⊕_{k=0}^{a} O_C(M − kA)` for `a ≥ 0`, vanishing for `a = −1`, and Serre
//! duality for `a ≤ −2`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::cert::{Certificate, HValue, Hval, Rule};
use crate::curve::{CurveLocus, CurveModel, DivisorClass};
use crate::error::{EngineError, Result};
use crate::linear::LinearForm;

/// Largest concrete `E`-coefficient expanded summand by summand.
pub const MAX_SUMMANDS: i64 = 10_000;

pub const CONE_OF_CURVES: &str = "curves on the ruled surface are numerically spanned by E and the fibre";
pub const TANGENT_TRANSVERSALITY: &str = "two members smooth at the base point meet it in different tangent directions";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SurfaceClass {
    /// Coefficient of the negative section `E`.
    pub e: LinearForm,
    /// The `M` of `π*M`.
    pub base: DivisorClass,
}

impl SurfaceClass {
    pub fn new(e: LinearForm, base: DivisorClass) -> Self {
        let n_lo = e.n_lo.max(base.guard());
        SurfaceClass { e: e.with_guard(n_lo), base: base.with_guard(n_lo) }
    }

    pub fn is_constant(&self) -> bool {
        self.e.is_constant() && self.base.is_constant()
    }

    pub fn guard(&self) -> i64 {
        self.e.n_lo.max(self.base.guard())
    }

    pub fn scale(&self, k: i64) -> Self {
        SurfaceClass::new(self.e * k, self.base.scale(k))
    }

    pub fn scale_form(&self, k: &LinearForm) -> Option<Self> {
        Some(SurfaceClass::new(self.e.checked_mul(k)?, self.base.scale_form(k)?))
    }

    pub fn at(&self, n: i64) -> Self {
        SurfaceClass::new(LinearForm::constant(self.e.value_at(n)), self.base.at(n))
    }

    pub fn with_guard(&self, n_lo: i64) -> Self {
        SurfaceClass { e: self.e.with_guard(n_lo), base: self.base.with_guard(n_lo) }
    }
}

impl std::ops::Add for &SurfaceClass {
    type Output = SurfaceClass;
    fn add(self, rhs: &SurfaceClass) -> SurfaceClass {
        SurfaceClass::new(self.e + rhs.e, &self.base + &rhs.base)
    }
}

impl std::ops::Sub for &SurfaceClass {
    type Output = SurfaceClass;
    fn sub(self, rhs: &SurfaceClass) -> SurfaceClass {
        SurfaceClass::new(self.e - rhs.e, &self.base - &rhs.base)
    }
}

impl std::ops::Neg for &SurfaceClass {
    type Output = SurfaceClass;
    fn neg(self) -> SurfaceClass {
        self.scale(-1)
    }
}

/// `π_*O_S(c)` as a list of line bundles on `C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pushforward {
    Summands(Vec<DivisorClass>),
    /// `base − k·twist` for `0 ≤ k ≤ top`.
    Family {
        top: LinearForm,
        base: DivisorClass,
        twist: DivisorClass,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    E,
    EInf,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::E => write!(f, "E"),
            Side::EInf => write!(f, "E_inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocusComponent {
    Everything,
    Section {
        side: Side,
    },
    Fiber {
        point: String,
    },
    /// The point of the fibre over `point` lying on `side`.
    Point {
        point: String,
        side: Side,
    },
}

impl fmt::Display for LocusComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocusComponent::Everything => write!(f, "S"),
            LocusComponent::Section { side } => write!(f, "{side}"),
            LocusComponent::Fiber { point } => write!(f, "fiber({point})"),
            LocusComponent::Point { point, side } => write!(f, "point({point}, {side})"),
        }
    }
}

/// Support of a base locus; no components means empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseLocusRegion {
    pub components: Vec<LocusComponent>,
}

impl BaseLocusRegion {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn single_point(&self) -> Option<(&str, Side)> {
        match self.components.as_slice() {
            [LocusComponent::Point { point, side }] => Some((point, *side)),
            _ => None,
        }
    }
}

impl fmt::Display for BaseLocusRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum PointSet {
    All,
    Some(BTreeSet<String>),
}

impl PointSet {
    fn none() -> Self {
        PointSet::Some(BTreeSet::new())
    }

    fn meet(&self, other: &PointSet) -> PointSet {
        match (self, other) {
            (PointSet::All, x) | (x, PointSet::All) => x.clone(),
            (PointSet::Some(a), PointSet::Some(b)) => PointSet::Some(a.intersection(b).cloned().collect()),
        }
    }
}

/// A closed set cut out by fibres and the two disjoint sections, recorded
/// by its trace on the open part and on each section.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Region {
    fibers: PointSet,
    on_e: PointSet,
    on_inf: PointSet,
}

impl Region {
    fn everything() -> Self {
        Region { fibers: PointSet::All, on_e: PointSet::All, on_inf: PointSet::All }
    }

    fn meet(&self, other: &Region) -> Region {
        Region {
            fibers: self.fibers.meet(&other.fibers),
            on_e: self.on_e.meet(&other.on_e),
            on_inf: self.on_inf.meet(&other.on_inf),
        }
    }

    fn components(&self) -> Vec<LocusComponent> {
        let fibers = match &self.fibers {
            PointSet::All => return vec![LocusComponent::Everything],
            PointSet::Some(f) => f,
        };
        let mut out: Vec<LocusComponent> = fibers.iter().map(|p| LocusComponent::Fiber { point: p.clone() }).collect();
        for (set, side) in [(&self.on_e, Side::E), (&self.on_inf, Side::EInf)] {
            match set {
                PointSet::All => out.push(LocusComponent::Section { side }),
                PointSet::Some(ps) => {
                    out.extend(ps.difference(fibers).map(|p| LocusComponent::Point { point: p.clone(), side }))
                }
            }
        }
        out
    }
}

/// One summand's share of a member of `|aE + π*M|`: `π*D + (a−k)E + kE_∞`
/// with `D ∈ |M − kA|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionDivisor {
    pub k: i64,
    pub base: DivisorClass,
    pub e_multiplicity: i64,
    pub inf_multiplicity: i64,
    pub h0: HValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NefBig {
    pub nef: bool,
    pub big: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuledSurfaceModel {
    name: String,
    curve: CurveModel,
    twist: DivisorClass,
    twist_degree: i64,
}

impl RuledSurfaceModel {
    pub fn new(name: &str, curve: CurveModel, twist: DivisorClass) -> Result<Self> {
        curve.check_class(&twist)?;
        if !twist.is_constant() {
            return Err(EngineError::Symbolic(format!("twist of {name}")));
        }
        let twist_degree = curve.degree(&twist).offset;
        if twist_degree < 1 {
            return Err(EngineError::InvalidModel {
                model: name.into(),
                what: format!("twist must have positive degree, found {twist_degree}"),
            });
        }
        Ok(RuledSurfaceModel { name: name.to_string(), curve, twist, twist_degree })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn twist(&self) -> &DivisorClass {
        &self.twist
    }

    pub fn twist_degree(&self) -> i64 {
        self.twist_degree
    }

    pub fn class(&self, e: i64, base: DivisorClass) -> SurfaceClass {
        SurfaceClass::new(LinearForm::constant(e), base)
    }

    pub fn zero(&self) -> SurfaceClass {
        self.class(0, self.curve.zero())
    }

    pub fn section_e(&self) -> SurfaceClass {
        self.class(1, self.curve.zero())
    }

    /// `E_∞ ∼ E + π*A`.
    pub fn section_inf(&self) -> SurfaceClass {
        self.class(1, self.twist.clone())
    }

    pub fn pullback(&self, d: &DivisorClass) -> SurfaceClass {
        SurfaceClass::new(LinearForm::new(0, 0, d.guard()), d.clone())
    }

    pub fn fiber(&self) -> Result<SurfaceClass> {
        self.curve
            .first_point()
            .map(|p| self.pullback(&p))
            .ok_or_else(|| EngineError::Precondition(format!("{} has no degree-1 point generator", self.curve.name())))
    }

    /// `K_S = −2E + π*(K_C − A)`.
    pub fn canonical_class(&self) -> SurfaceClass {
        self.class(-2, &self.curve.canonical_class() - &self.twist)
    }

    pub fn check_class(&self, c: &SurfaceClass) -> Result<()> {
        self.curve.check_class(&c.base)
    }

    pub fn normalize(&self, c: &SurfaceClass) -> SurfaceClass {
        SurfaceClass { e: c.e, base: self.curve.normalize(&c.base) }
    }

    pub fn is_equivalent(&self, a: &SurfaceClass, b: &SurfaceClass) -> Option<bool> {
        let de = a.e - b.e;
        if de.is_identically(0) {
            return self.curve.is_equivalent(&a.base, &b.base);
        }
        if de.always_gt(0) || de.always_lt(0) {
            return Some(false);
        }
        None
    }

    /// `(a₁E + π*M₁)·(a₂E + π*M₂) = −a₁a₂·deg A + a₁·deg M₂ + a₂·deg M₁`.
    pub fn intersect(&self, c1: &SurfaceClass, c2: &SurfaceClass) -> Result<LinearForm> {
        let nonlinear = || EngineError::Nonlinear(format!("{} · {}", self.display(c1), self.display(c2)));
        let d1 = self.curve.degree(&c1.base);
        let d2 = self.curve.degree(&c2.base);
        let ee = c1.e.checked_mul(&c2.e).ok_or_else(nonlinear)?;
        let a = c1.e.checked_mul(&d2).ok_or_else(nonlinear)?;
        let b = c2.e.checked_mul(&d1).ok_or_else(nonlinear)?;
        Ok(a + b - ee * self.twist_degree)
    }

    pub fn intersect_cert(&self, c1: &SurfaceClass, c2: &SurfaceClass) -> Result<Certificate> {
        let v = self.intersect(c1, c2)?;
        Ok(Certificate::count(
            format!("({}) · ({}) on {}", self.display(c1), self.display(c2), self.name),
            Rule::Intersection { value: v },
            HValue::exact(v),
        ))
    }

    /// `χ(S, c) = χ(O_S) + c·(c − K_S)/2` with `χ(O_S) = 1 − g`.
    pub fn chi(&self, c: &SurfaceClass) -> Result<LinearForm> {
        let twice = self.intersect(c, &(c - &self.canonical_class()))?;
        if twice.slope % 2 != 0 || twice.offset % 2 != 0 {
            return Err(EngineError::Precondition(format!("odd value of c·(c − K) for {}", self.display(c))));
        }
        Ok(LinearForm::new(twice.slope / 2, twice.offset / 2, twice.n_lo)
            + LinearForm::constant(1 - self.curve.genus()))
    }

    pub fn pushforward(&self, c: &SurfaceClass) -> Result<Pushforward> {
        if !c.e.always_ge(0) {
            return Err(EngineError::Precondition(format!(
                "pushforward needs a non-negative E-coefficient, found {}",
                c.e
            )));
        }
        match c.e.as_constant() {
            Some(a) => Ok(Pushforward::Summands((0..=a).map(|k| self.summand(c, k)).collect())),
            None => Ok(Pushforward::Family { top: c.e, base: c.base.clone(), twist: self.twist.clone() }),
        }
    }

    fn summand(&self, c: &SurfaceClass, k: i64) -> DivisorClass {
        &c.base - &self.twist.scale(k).with_guard(c.guard())
    }

    /// `(aE + π*M)|_E = M − aA`, `(aE + π*M)|_{E_∞} = M`.
    pub fn restrict_to_section(&self, c: &SurfaceClass, side: Side) -> Result<DivisorClass> {
        match side {
            Side::EInf => Ok(c.base.clone()),
            Side::E => {
                let at = self.twist.scale_form(&c.e).ok_or_else(|| EngineError::Nonlinear(self.display(c)))?;
                Ok(&c.base - &at)
            }
        }
    }

    pub fn section_divisor(&self, c: &SurfaceClass, k: i64) -> Result<SectionDivisor> {
        let a = c.e.as_constant().filter(|_| c.is_constant()).ok_or_else(|| EngineError::Symbolic(self.display(c)))?;
        if k < 0 || k > a {
            return Err(EngineError::Precondition(format!("summand index {k} outside 0..={a}")));
        }
        let base = self.summand(c, k);
        let h0 = self.curve.h0(&base).value;
        if !h0.is_certainly_nonzero() {
            return Err(EngineError::Precondition(format!(
                "summand {k} of |{}| is not known to be nonempty (h0 = {h0})",
                self.display(c)
            )));
        }
        Ok(SectionDivisor { k, base, e_multiplicity: a - k, inf_multiplicity: k, h0 })
    }

    pub fn h(&self, c: &SurfaceClass, i: usize) -> Hval {
        self.coh(c, i, 0).into()
    }

    pub fn cohomology(&self, c: &SurfaceClass) -> [Hval; 3] {
        [self.h(c, 0), self.h(c, 1), self.h(c, 2)]
    }

    fn coh(&self, c: &SurfaceClass, i: usize, depth: u8) -> Certificate {
        let c = &self.normalize(c);
        let claim = format!("h{i}({}, {})", self.name, self.display(c));
        let guard = c.guard();
        let a = c.e;
        if i > 2 {
            return Certificate::count(claim, Rule::AboveDimension { degree: i, dim: 2 }, HValue::zero_from(guard));
        }
        if a.always_ge(0) {
            if i == 2 {
                return Certificate::count(claim, Rule::RelativeVanishing { degree: 2 }, HValue::zero_from(guard));
            }
            if let Some(top) = a.as_constant() {
                if top > MAX_SUMMANDS {
                    return Certificate::unresolved_count(claim, "too many summands");
                }
                let premises: Vec<Certificate> =
                    (0..=top).map(|k| self.curve.cohomology(&self.summand(c, k), i).certificate).collect();
                let total = premises.iter().fold(HValue::zero_from(guard), |acc, p| acc.add(&p.value()));
                return Certificate::count(claim, Rule::PushforwardSum { degree: i }, total).with_premises(premises);
            }
            let g = self.curve.genus();
            let high_end = self.curve.degree(&c.base);
            let low_end = high_end - a * self.twist_degree;
            let forced = match i {
                0 => low_end.always_lt(0) && high_end.always_lt(0),
                _ => low_end.always_gt(2 * g - 2) && high_end.always_gt(2 * g - 2),
            };
            if forced {
                return Certificate::count(
                    claim,
                    Rule::SymbolicRange { degree: i, low_end, high_end, genus: g },
                    HValue::zero_from(guard),
                );
            }
            return Certificate::unresolved_count(claim, "summand range of symbolic length not forced to vanish");
        }
        if a.is_identically(-1) {
            return Certificate::count(claim, Rule::RelativeVanishing { degree: i }, HValue::zero_from(guard));
        }
        if a.always_le(-2) && depth == 0 {
            let dual = &self.canonical_class().with_guard(guard) - c;
            let p = self.coh(&dual, 2 - i, depth + 1);
            let v = p.value();
            return Certificate::count(claim, Rule::SurfaceSerre { degree: i }, v).with_premises(vec![p]);
        }
        Certificate::unresolved_count(claim, format!("E-coefficient {a} changes regime on the range"))
    }

    fn numerics(&self, c: &SurfaceClass) -> Result<(i64, i64, i64)> {
        if !c.is_constant() {
            return Err(EngineError::Symbolic(format!("positivity test of {}", self.display(c))));
        }
        let dot_section = self.intersect(c, &self.section_e())?.offset;
        let dot_fiber = c.e.offset;
        let square = self.intersect(c, c)?.offset;
        Ok((dot_section, dot_fiber, square))
    }

    fn cone_premise() -> Certificate {
        Certificate::truth("cone of curves", Rule::Assumed { assumption: CONE_OF_CURVES.to_string() }, Some(true))
    }

    /// Nakai–Moishezon against the two extremal rays `E` and `f`.
    pub fn is_ample(&self, c: &SurfaceClass) -> Result<Certificate> {
        let (dot_section, dot_fiber, square) = self.numerics(c)?;
        let value = dot_section > 0 && dot_fiber > 0 && square > 0;
        Ok(Certificate::truth(
            format!("ample({}, {})", self.name, self.display(c)),
            Rule::NakaiTwoRay { dot_section, dot_fiber, square },
            Some(value),
        )
        .with_premises(vec![Self::cone_premise()]))
    }

    pub fn is_nef_big(&self, c: &SurfaceClass) -> Result<NefBig> {
        let (dot_section, dot_fiber, square) = self.numerics(c)?;
        let nef = dot_section >= 0 && dot_fiber >= 0;
        let big = nef && square > 0;
        let certificate = Certificate::truth(
            format!("nef({}, {})", self.name, self.display(c)),
            Rule::NefBig { dot_section, dot_fiber, square, big },
            Some(nef),
        )
        .with_premises(vec![Self::cone_premise()]);
        Ok(NefBig { nef, big, certificate })
    }

    /// Support of `Bs|c|` from the summand decomposition of its sections.
    pub fn base_locus(&self, c: &SurfaceClass) -> Result<(Option<BaseLocusRegion>, Certificate)> {
        let a = match c.e.as_constant() {
            Some(a) if c.is_constant() => a,
            _ => return Err(EngineError::Symbolic(format!("base locus of {}", self.display(c)))),
        };
        let claim = format!("Bs|{}| on {}", self.display(c), self.name);
        if a < 0 {
            return Err(EngineError::Precondition(format!("base locus needs a ≥ 0, found {a}")));
        }
        if a > MAX_SUMMANDS {
            return Ok((None, Certificate::unresolved_truth(claim, "too many summands")));
        }
        let mut region = Region::everything();
        let mut premises = Vec::new();
        let mut unknown = Vec::new();
        let mut nonempty = false;
        for k in 0..=a {
            let m = self.summand(c, k);
            let (locus, cert) = self.curve.base_locus(&m);
            premises.push(cert);
            let fibers = match locus {
                Some(CurveLocus::Everything) => continue,
                Some(CurveLocus::Empty) => PointSet::none(),
                Some(CurveLocus::Points(ps)) => PointSet::Some(ps.into_iter().collect()),
                None => {
                    unknown.push(k);
                    continue;
                }
            };
            nonempty = true;
            let on_e = if a - k > 0 { PointSet::All } else { fibers.clone() };
            let on_inf = if k > 0 { PointSet::All } else { fibers.clone() };
            region = region.meet(&Region { fibers, on_e, on_inf });
        }
        if !unknown.is_empty() {
            let reason = format!("curve base locus unresolved for summands k = {unknown:?}");
            return Ok((None, Certificate::unresolved_truth(claim, reason).with_premises(premises)));
        }
        if !nonempty {
            let r = BaseLocusRegion { components: vec![LocusComponent::Everything] };
            return Ok((Some(r), Certificate::truth(claim, Rule::EmptySystem, Some(false)).with_premises(premises)));
        }
        let region = BaseLocusRegion { components: region.components() };
        let bpf = region.is_empty();
        Ok((Some(region), Certificate::truth(claim, Rule::SummandBaseLoci, Some(bpf)).with_premises(premises)))
    }

    /// A section point is a base point iff its image is a base point of the
    /// restricted system: only one summand restricts nontrivially to each
    /// section.
    pub fn confirm_section_point(
        &self,
        c: &SurfaceClass,
        point: &str,
        side: Side,
    ) -> Result<(Option<bool>, Certificate)> {
        let restricted = self.restrict_to_section(c, side)?;
        let (locus, cert) = self.curve.base_locus(&restricted);
        let verdict = locus.map(|l| match l {
            CurveLocus::Everything => true,
            CurveLocus::Empty => false,
            CurveLocus::Points(ps) => ps.iter().any(|p| p == point),
        });
        Ok((verdict, cert))
    }

    /// Scheme-theoretic reducedness of an isolated base point `b` on a
    /// section. With `b` over `Q` on `E_∞`: the `k = 1` summand is nonempty
    /// and free at `Q` (giving a member through `b` transverse to the
    /// fibre), and `|M − Q|` is free (giving a member through `b` along
    /// `π*D`). Transversality of the two tangent directions is assumed.
    pub fn reduced_base_point(&self, c: &SurfaceClass, point: &str, side: Side) -> Result<Certificate> {
        let a = c.e.as_constant().filter(|_| c.is_constant()).ok_or_else(|| EngineError::Symbolic(self.display(c)))?;
        let claim = format!("reduced base point {point} on {side} of |{}|", self.display(c));
        let q = self
            .curve
            .generator_class(point)
            .ok_or_else(|| EngineError::Precondition(format!("unknown point {point}")))?;
        let (next_k, own) = match side {
            Side::EInf => (1, 0),
            Side::E => (a - 1, a),
        };
        if a < 1 {
            return Ok(Certificate::truth(claim, Rule::ReducedBasePoint { point: point.into() }, Some(false)));
        }
        let neighbour = self.summand(c, next_k);
        let h = self.curve.h0(&neighbour).certificate;
        let (locus, bs) = self.curve.base_locus(&neighbour);
        let free_at_q = match &locus {
            Some(CurveLocus::Empty) => Some(true),
            Some(CurveLocus::Points(ps)) => Some(!ps.iter().any(|p| p == point)),
            Some(CurveLocus::Everything) => Some(false),
            None => None,
        };
        let rest = &self.summand(c, own) - &q;
        let rest_bpf = self.curve.is_basepoint_free(&rest);
        let ok = match (h.value().is_certainly_nonzero(), free_at_q, rest_bpf.truth_value()) {
            (true, Some(true), Some(true)) => Some(true),
            (_, None, _) | (_, _, None) => None,
            _ => Some(false),
        };
        let transversal = Certificate::truth(
            "tangent directions",
            Rule::Assumed { assumption: TANGENT_TRANSVERSALITY.to_string() },
            Some(true),
        );
        let rule = if ok.is_some() {
            Rule::ReducedBasePoint { point: point.into() }
        } else {
            Rule::Unresolved { reason: "summand data unresolved".into() }
        };
        Ok(Certificate::truth(claim, rule, ok).with_premises(vec![h, bs, rest_bpf, transversal]))
    }

    pub fn display(&self, c: &SurfaceClass) -> String {
        let base = self.curve.display(&c.base);
        let e = if c.e.is_identically(0) {
            String::new()
        } else if c.e.is_identically(1) {
            "E".into()
        } else if c.e.is_identically(-1) {
            "-E".into()
        } else if c.e.is_constant() {
            format!("{}*E", c.e)
        } else {
            format!("({})*E", c.e)
        };
        match (e.is_empty(), base.as_str()) {
            (true, _) => format!("pi*({base})"),
            (false, "0") => e,
            (false, _) => format!("{e} + pi*({base})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{DoubleCover, FactTable, Generator};

    fn paper_surface() -> RuledSurfaceModel {
        let gens = vec![
            Generator { name: "g12".into(), degree: 2, point: false },
            Generator { name: "R1".into(), degree: 1, point: true },
        ];
        let facts = FactTable {
            double_cover: Some(DoubleCover { g12: DivisorClass::constant(vec![1, 0]), twists: vec![0, -8] }),
            ..FactTable::default()
        };
        let c = CurveModel::new("C", 7, gens, vec![vec![-1, 2]], vec![6, 0], facts).unwrap();
        RuledSurfaceModel::new("S", c, DivisorClass::constant(vec![0, 1])).unwrap()
    }

    fn l(s: &RuledSurfaceModel) -> SurfaceClass {
        s.class(1, DivisorClass::constant(vec![2, 0]))
    }

    fn num(h: &Hval) -> i64 {
        h.value.as_number().unwrap_or_else(|| panic!("unresolved: {}", h.certificate.render()))
    }

    #[test]
    fn intersection_numbers() {
        let s = paper_surface();
        let l = l(&s);
        let dot = |a: &SurfaceClass, b: &SurfaceClass| s.intersect(a, b).unwrap().as_constant().unwrap();
        assert_eq!(dot(&l, &l), 7);
        assert_eq!(dot(&l, &s.section_e()), 3);
        assert_eq!(dot(&l, &s.fiber().unwrap()), 1);
        let c = &l.scale(5) - &s.canonical_class();
        assert_eq!(dot(&c, &c), 77);
        assert_eq!(dot(&s.canonical_class(), &s.fiber().unwrap()), -2);
        assert_eq!(dot(&s.section_e(), &s.section_e()), -1);
        assert_eq!(dot(&s.section_e(), &s.section_inf()), 0);
        assert_eq!(s.is_equivalent(&c, &s.class(7, DivisorClass::constant(vec![4, 1]))), Some(true));
    }

    #[test]
    fn cohomology_of_multiples_of_l() {
        let s = paper_surface();
        let four_l = l(&s).scale(4);
        assert_eq!(num(&s.h(&four_l, 0)), 41);
        assert_eq!(num(&s.h(&four_l, 1)), 1);
        assert_eq!(num(&s.h(&four_l, 2)), 0);
        assert_eq!(s.chi(&four_l).unwrap().as_constant(), Some(40));
        let c = &l(&s).scale(5) - &s.canonical_class();
        assert_eq!(num(&s.h(&c, 0)), 28);
        assert_eq!(num(&s.h(&l(&s).scale(-1), 0)), 0);
    }

    #[test]
    fn symbolic_vanishing() {
        let s = paper_surface();
        let family = &l(&s).scale_form(&LinearForm::new(4, 0, 1)).unwrap() - &s.section_e();
        for i in 1..=2 {
            let h = s.h(&family, i);
            assert!(h.value.is_zero(), "{}", h.certificate.render());
            h.certificate.check().unwrap();
        }
        for n in 1..=8 {
            let concrete = family.at(n);
            assert_eq!(num(&s.h(&concrete, 1)), 0);
        }
        // K_S + (4n - 5)L - E for n >= 2
        let t = &(&s.canonical_class() + &l(&s).scale_form(&LinearForm::new(4, -5, 2)).unwrap()) - &s.section_e();
        let h = s.h(&t, 2);
        assert!(h.value.is_zero(), "{}", h.certificate.render());
    }

    #[test]
    fn positivity() {
        let s = paper_surface();
        assert_eq!(s.is_ample(&l(&s)).unwrap().truth_value(), Some(true));
        let c = &l(&s).scale(5) - &s.canonical_class();
        assert_eq!(s.is_ample(&c).unwrap().truth_value(), Some(true));
        let nb = s.is_nef_big(&c).unwrap();
        assert!(nb.nef && nb.big);
        let f = s.is_nef_big(&s.fiber().unwrap()).unwrap();
        assert!(f.nef && !f.big);
        let e = s.is_nef_big(&s.section_e()).unwrap();
        assert!(!e.nef && !e.big);
        assert_eq!(s.is_ample(&l(&s).scale(-1)).unwrap().truth_value(), Some(false));
        assert!(s.is_ample(&l(&s).scale_form(&LinearForm::param(1)).unwrap()).is_err());
    }

    #[test]
    fn base_locus_of_paper_system() {
        let s = paper_surface();
        let c = &l(&s).scale(5) - &s.canonical_class();
        let (region, cert) = s.base_locus(&c).unwrap();
        let region = region.unwrap();
        assert_eq!(region.single_point(), Some(("R1", Side::EInf)));
        assert!(cert.check().is_ok());
        let (on, _) = s.confirm_section_point(&c, "R1", Side::EInf).unwrap();
        assert_eq!(on, Some(true));
        let (on_e, _) = s.confirm_section_point(&c, "R1", Side::E).unwrap();
        assert_eq!(on_e, Some(false));
        let red = s.reduced_base_point(&c, "R1", Side::EInf).unwrap();
        assert_eq!(red.truth_value(), Some(true));
        assert_eq!(red.assumptions(), vec![TANGENT_TRANSVERSALITY.to_string()]);
        let fiber = s.fiber().unwrap();
        let (r, _) = s.base_locus(&fiber).unwrap();
        assert_eq!(r.unwrap().components, vec![LocusComponent::Fiber { point: "R1".into() }]);
    }

    #[test]
    fn pushforward_shapes() {
        let s = paper_surface();
        match s.pushforward(&s.section_e()).unwrap() {
            Pushforward::Summands(v) => assert_eq!(v, vec![s.curve().zero(), DivisorClass::constant(vec![0, -1])]),
            other => panic!("{other:?}"),
        }
        assert!(s.pushforward(&s.section_e().scale(-1)).is_err());
        let family = &l(&s).scale_form(&LinearForm::new(4, 0, 1)).unwrap() - &s.section_e();
        assert!(matches!(s.pushforward(&family).unwrap(), Pushforward::Family { .. }));
    }

    #[test]
    fn sections_and_restrictions() {
        let s = paper_surface();
        let c = &l(&s).scale(5) - &s.canonical_class();
        let d0 = s.section_divisor(&c, 0).unwrap();
        assert_eq!((d0.e_multiplicity, d0.inf_multiplicity), (7, 0));
        let d7 = s.section_divisor(&c, 7).unwrap();
        assert_eq!(s.curve().is_equivalent(&d7.base, &DivisorClass::constant(vec![1, 0])), Some(true));
        let four_l = l(&s).scale(4);
        let r = s.restrict_to_section(&four_l, Side::E).unwrap();
        assert_eq!(s.curve().is_equivalent(&r, &s.curve().canonical_class()), Some(true));
        let r = s.restrict_to_section(&c, Side::EInf).unwrap();
        assert_eq!(s.curve().is_equivalent(&r, &DivisorClass::constant(vec![4, 1])), Some(true));
    }
}
