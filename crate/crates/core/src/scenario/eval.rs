//! Expression evaluation over a loaded scenario.

use serde_json::json;

use super::load::Scenario;
use super::syntax::{parse_expr, Expr, ExprKind, Literal, Pos};
use super::ScenarioError;
use crate::cert::{Certificate, HValue, Hval, Rule};
use crate::cone::{self, CriterionOutcome, IndexResult, PolarizedBase, Verdict};
use crate::curve::{CurveModel, DivisorClass};
use crate::error::EngineError;
use crate::linear::{ClassVec, LinearForm};
use crate::product::{HypersurfaceModel, ProductClass, RestrictedClass};
use crate::surface::{Pushforward, RuledSurfaceModel, Side, SurfaceClass};

/// Largest coefficient magnitude an expression may produce. Keeps every
/// downstream computation far from `i64` overflow.
pub const COEFF_LIMIT: i64 = 1_000_000;

/// Functions understood by the evaluator.
pub const FUNCTIONS: [&str; 32] = [
    "h0",
    "h1",
    "h2",
    "h3",
    "chi",
    "cohomology",
    "deg",
    "intersect",
    "bpf",
    "bs",
    "in_bs",
    "reduced",
    "restrict",
    "equiv",
    "serre",
    "ample",
    "nef",
    "big",
    "pushforward",
    "db_pair",
    "db",
    "cartier_index",
    "in_span",
    "smooth",
    "connected",
    "theta",
    "theta_counts",
    "canonical",
    "section",
    "section_inf",
    "fiber",
    "at",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Int(LinearForm),
    Count(Hval),
    Truth(Option<bool>, Option<Certificate>),
    Curve(String, DivisorClass),
    Surface(String, SurfaceClass),
    Product(String, ProductClass),
    Restricted(String, RestrictedClass),
    Model(String),
    Text(String, Option<Certificate>),
    Tuple(Vec<Value>),
    Criterion(Box<CriterionOutcome>),
    Index(IndexResult),
}

/// Which model a class lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Curve(String),
    Surface(String),
    Product(String),
    Restricted(String),
}

impl Kind {
    fn model(&self) -> &str {
        match self {
            Kind::Curve(m) | Kind::Surface(m) | Kind::Product(m) | Kind::Restricted(m) => m,
        }
    }
}

impl Value {
    pub fn kind(&self) -> Option<Kind> {
        match self {
            Value::Curve(m, _) => Some(Kind::Curve(m.clone())),
            Value::Surface(m, _) => Some(Kind::Surface(m.clone())),
            Value::Product(m, _) => Some(Kind::Product(m.clone())),
            Value::Restricted(m, _) => Some(Kind::Restricted(m.clone())),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        match self {
            Value::Int(_) => "an integer".into(),
            Value::Count(_) => "a cohomology value".into(),
            Value::Truth(..) => "a truth value".into(),
            Value::Curve(m, _) => format!("a class on {m}"),
            Value::Surface(m, _) => format!("a class on {m}"),
            Value::Product(m, _) => format!("a class on {m}"),
            Value::Restricted(m, _) => format!("a class on {m}"),
            Value::Model(m) => format!("the model {m}"),
            Value::Text(..) => "a text value".into(),
            Value::Tuple(_) => "a tuple".into(),
            Value::Criterion(_) => "a criterion outcome".into(),
            Value::Index(_) => "an index".into(),
        }
    }

    /// The certificate attached to the value, if any.
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Value::Count(h) => Some(&h.certificate),
            Value::Truth(_, c) | Value::Text(_, c) => c.as_ref(),
            _ => None,
        }
    }

    pub fn assumptions(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |a: String| {
            if !out.contains(&a) {
                out.push(a);
            }
        };
        match self {
            Value::Tuple(items) => items.iter().flat_map(|v| v.assumptions()).for_each(&mut push),
            Value::Criterion(o) => {
                if let Some(c) = &o.certificate {
                    c.assumptions.iter().cloned().for_each(&mut push);
                }
                if let Some(w) = &o.witness {
                    w.certificate.assumptions().into_iter().for_each(&mut push);
                }
            }
            v => {
                if let Some(c) = v.certificate() {
                    c.assumptions().into_iter().for_each(&mut push);
                }
            }
        }
        out
    }

    /// Human-readable rendering.
    pub fn render(&self, sc: &Scenario) -> String {
        match self {
            Value::Int(f) => f.to_string(),
            Value::Count(h) => h.value.to_string(),
            Value::Truth(t, _) => truth_str(*t).to_string(),
            Value::Curve(m, d) => sc.curves[m].display(d),
            Value::Surface(m, s) => sc.surfaces[m].display(s),
            Value::Product(m, p) => sc.products[m].display(p),
            Value::Restricted(m, r) => sc.hypersurfaces[m].display(r),
            Value::Model(m) => m.clone(),
            Value::Text(t, _) => t.clone(),
            Value::Tuple(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.render(sc)).collect();
                format!("({})", parts.join(", "))
            }
            Value::Criterion(o) => render_outcome(o),
            Value::Index(r) => format!("{} ({}*K ~ {}*M)", r.index, r.index, r.multiple),
        }
    }

    /// Machine-readable rendering; numbers stay numbers.
    pub fn to_json(&self, sc: &Scenario) -> serde_json::Value {
        match self {
            Value::Int(f) => serde_json::to_value(f).unwrap_or_default(),
            Value::Count(h) => hvalue_json(&h.value),
            Value::Truth(t, _) => json!(t),
            Value::Tuple(items) => serde_json::Value::Array(items.iter().map(|v| v.to_json(sc)).collect()),
            Value::Criterion(o) => serde_json::to_value(o.as_ref()).unwrap_or_default(),
            Value::Index(r) => serde_json::to_value(r).unwrap_or_default(),
            other => json!(other.render(sc)),
        }
    }

    /// Certificate tree, or a short justification for values without one.
    pub fn explain(&self, sc: &Scenario) -> String {
        match self {
            Value::Tuple(items) => items.iter().map(|v| v.explain(sc)).collect::<Vec<_>>().join(""),
            Value::Criterion(o) => explain_outcome(o),
            Value::Index(r) => format!(
                "{r_i}*K ~ {r_m}*M; m*K lies outside Z*M for 1 <= m < {r_i}   [lattice_index]\n",
                r_i = r.index,
                r_m = r.multiple
            ),
            v => match v.certificate() {
                Some(c) => c.render(),
                None => format!("{}   [arithmetic]\n", v.render(sc)),
            },
        }
    }

    /// Whether the value meets an expectation literal.
    pub fn matches(&self, lit: &Literal, sc: &Scenario) -> bool {
        match (self, lit) {
            (Value::Int(f), Literal::Int(k)) => f.is_identically(*k),
            (Value::Count(h), Literal::Int(k)) => h.value.form().is_some_and(|f| f.is_identically(*k)),
            (Value::Count(h), Literal::Interval(lo, hi)) => h.value == HValue::Bounds { lo: *lo, hi: Some(*hi) },
            (Value::Count(h), Literal::Unknown) => h.value == HValue::Unknown,
            (Value::Truth(t, _), Literal::Bool(b)) => *t == Some(*b),
            (Value::Truth(t, _), Literal::Unknown) => t.is_none(),
            (Value::Criterion(o), Literal::Bool(b)) => o.value == Some(*b),
            (Value::Criterion(o), Literal::Unknown) => o.value.is_none(),
            (Value::Criterion(o), Literal::Tuple(items)) => {
                o.witness.as_ref().is_some_and(|w| witness_literal(w.i, w.n, &w.value).as_slice() == items.as_slice())
            }
            (Value::Index(r), Literal::Int(k)) => r.index == *k,
            (Value::Index(r), Literal::Tuple(items)) => {
                items.as_slice() == [Literal::Int(r.index), Literal::Int(r.multiple)]
            }
            (Value::Tuple(vs), Literal::Tuple(items)) => {
                vs.len() == items.len() && vs.iter().zip(items).all(|(v, l)| v.matches(l, sc))
            }
            (v, Literal::Str(s)) => v.render(sc) == *s,
            _ => false,
        }
    }
}

pub fn witness_literal(i: usize, n: i64, value: &HValue) -> Vec<Literal> {
    let v = match value.as_number() {
        Some(x) => Literal::Int(x),
        None => Literal::Str(value.to_string()),
    };
    vec![Literal::Int(i as i64), Literal::Int(n), v]
}

pub fn truth_str(t: Option<bool>) -> &'static str {
    match t {
        Some(true) => "true",
        Some(false) => "false",
        None => "unknown",
    }
}

pub fn hvalue_json(h: &HValue) -> serde_json::Value {
    match h {
        HValue::Exact { value } => serde_json::to_value(value).unwrap_or_default(),
        HValue::Bounds { lo, hi } => json!({ "lo": lo, "hi": hi }),
        HValue::Unknown => json!("unknown"),
    }
}

pub fn render_outcome(o: &CriterionOutcome) -> String {
    match (&o.value, &o.witness, &o.certificate) {
        (Some(false), Some(w), _) => format!("false (witness h{}, n = {}: {})", w.i, w.n, w.value),
        (Some(true), _, Some(c)) => format!("true (symbolic from n = {}, swept below)", c.n_lo),
        (v, _, _) => truth_str(*v).to_string(),
    }
}

fn explain_outcome(o: &CriterionOutcome) -> String {
    let mut out = format!("{}\n", render_outcome(o));
    if let Some(w) = &o.witness {
        out.push_str(&w.certificate.render());
    }
    if let Some(c) = &o.certificate {
        for s in &c.symbolic {
            out.push_str(&s.render());
        }
        for e in &c.sweep {
            out.push_str(&format!("  n = {}: {} = {}\n", e.n, e.certificate.claim, e.value));
        }
    }
    for u in &o.unresolved {
        out.push_str(&format!("  unresolved: {u}\n"));
    }
    out
}

/// Connects a polarizable model to the value representation of its classes.
pub trait ClassValue: PolarizedBase {
    fn kind(&self) -> Kind;
    fn take(v: Value) -> Option<Self::Class>;
    fn extra_certificates(&self, _boundary: Option<&Self::Class>) -> crate::error::Result<Vec<(String, Certificate)>> {
        Ok(Vec::new())
    }
}

impl ClassValue for CurveModel {
    fn kind(&self) -> Kind {
        Kind::Curve(self.name().to_string())
    }
    fn take(v: Value) -> Option<DivisorClass> {
        match v {
            Value::Curve(_, d) => Some(d),
            _ => None,
        }
    }
}

impl ClassValue for RuledSurfaceModel {
    fn kind(&self) -> Kind {
        Kind::Surface(self.name().to_string())
    }
    fn take(v: Value) -> Option<SurfaceClass> {
        match v {
            Value::Surface(_, s) => Some(s),
            _ => None,
        }
    }
}

impl ClassValue for HypersurfaceModel {
    fn kind(&self) -> Kind {
        Kind::Restricted(self.name().to_string())
    }
    fn take(v: Value) -> Option<RestrictedClass> {
        match v {
            Value::Restricted(_, r) => Some(r),
            _ => None,
        }
    }
    fn extra_certificates(
        &self,
        boundary: Option<&RestrictedClass>,
    ) -> crate::error::Result<Vec<(String, Certificate)>> {
        let Some(b) = boundary else { return Ok(Vec::new()) };
        Ok(cone::boundary_certificate(self, b)?.map(|c| ("boundary smooth".to_string(), c)).into_iter().collect())
    }
}

/// Evaluation context: the scenario, the sweep depth, the lower bound for
/// `n`, and integer locals such as a table variable.
pub struct Ctx<'a> {
    pub sc: &'a Scenario,
    pub nmax: i64,
    pub guard: i64,
    pub locals: Vec<(String, i64)>,
}

macro_rules! on_base {
    ($ctx:expr, $name:expr, $pos:expr, |$b:ident| $body:expr) => {{
        if let Some($b) = $ctx.sc.curves.get($name) {
            $body
        } else if let Some($b) = $ctx.sc.surfaces.get($name) {
            $body
        } else if let Some($b) = $ctx.sc.hypersurfaces.get($name) {
            $body
        } else {
            Err(ScenarioError::at($pos, format!("`{}` is not a curve, ruled surface or hypersurface", $name)))
        }
    }};
}

fn engine(pos: Pos) -> impl Fn(EngineError) -> ScenarioError {
    move |e| ScenarioError::at(pos, e.to_string())
}

fn max_coeff(v: &Value) -> i64 {
    fn cv(c: &ClassVec) -> i64 {
        c.offset.iter().chain(c.slope.iter()).map(|x| x.saturating_abs()).max().unwrap_or(0)
    }
    fn lf(f: &LinearForm) -> i64 {
        f.offset.saturating_abs().max(f.slope.saturating_abs())
    }
    match v {
        Value::Int(f) => lf(f),
        Value::Curve(_, d) => cv(&d.0),
        Value::Surface(_, s) => lf(&s.e).max(cv(&s.base.0)),
        Value::Product(_, p) => lf(&p.s.e).max(cv(&p.s.base.0)).max(cv(&p.b.0)),
        Value::Restricted(_, r) => lf(&r.0.s.e).max(cv(&r.0.s.base.0)).max(cv(&r.0.b.0)),
        _ => 0,
    }
}

impl<'a> Ctx<'a> {
    pub fn new(sc: &'a Scenario) -> Self {
        Ctx { sc, nmax: sc.nmax, guard: 1, locals: Vec::new() }
    }

    fn model_kind(&self, name: &str) -> Option<Kind> {
        let n = name.to_string();
        if self.sc.curves.contains_key(name) {
            Some(Kind::Curve(n))
        } else if self.sc.surfaces.contains_key(name) {
            Some(Kind::Surface(n))
        } else if self.sc.products.contains_key(name) {
            Some(Kind::Product(n))
        } else if self.sc.hypersurfaces.contains_key(name) {
            Some(Kind::Restricted(n))
        } else {
            None
        }
    }

    fn zero_of(&self, k: &Kind) -> Value {
        match k {
            Kind::Curve(m) => Value::Curve(m.clone(), self.sc.curves[m].zero()),
            Kind::Surface(m) => Value::Surface(m.clone(), self.sc.surfaces[m].zero()),
            Kind::Product(m) => Value::Product(m.clone(), self.sc.products[m].zero()),
            Kind::Restricted(m) => {
                let amb = self.sc.hypersurfaces[m].ambient();
                Value::Restricted(m.clone(), RestrictedClass(amb.zero()))
            }
        }
    }

    /// Move a value onto the model `target` by pullback or restriction.
    pub fn lift(&self, v: Value, target: &Kind, pos: Pos) -> Result<Value, ScenarioError> {
        if let Value::Int(f) = &v {
            if f.is_constant() && f.offset == 0 {
                return Ok(self.zero_of(target));
            }
        }
        if v.kind().as_ref() == Some(target) {
            return Ok(v);
        }
        let fail =
            |v: &Value| ScenarioError::at(pos, format!("cannot use {} as a class on {}", v.describe(), target.model()));
        match (v, target) {
            (Value::Curve(c, d), Kind::Surface(s)) if self.sc.surfaces[s].curve().name() == c => {
                Ok(Value::Surface(s.clone(), self.sc.surfaces[s].pullback(&d)))
            }
            (Value::Curve(c, d), Kind::Product(x)) => {
                let xm = &self.sc.products[x];
                match (xm.surface().curve().name() == c, xm.curve().name() == c) {
                    (true, false) => {
                        Ok(Value::Product(x.clone(), ProductClass::new(xm.surface().pullback(&d), xm.curve().zero())))
                    }
                    (false, true) => Ok(Value::Product(x.clone(), ProductClass::new(xm.surface().zero(), d))),
                    (true, true) => {
                        Err(ScenarioError::at(pos, format!("class on {c} pulls back to {x} in two ways; write a pair")))
                    }
                    _ => Err(fail(&Value::Curve(c, d))),
                }
            }
            (Value::Surface(s, c), Kind::Product(x)) if self.sc.products[x].surface().name() == s => {
                Ok(Value::Product(x.clone(), ProductClass::new(c, self.sc.products[x].curve().zero())))
            }
            (v @ (Value::Curve(..) | Value::Surface(..) | Value::Product(..)), Kind::Restricted(t)) => {
                let amb = Kind::Product(self.sc.hypersurfaces[t].ambient().name().to_string());
                match self.lift(v, &amb, pos)? {
                    Value::Product(_, p) => Ok(Value::Restricted(t.clone(), RestrictedClass(p))),
                    _ => unreachable!(),
                }
            }
            (v, _) => Err(fail(&v)),
        }
    }

    fn unify(&self, a: Value, b: Value, pos: Pos) -> Result<(Value, Value), ScenarioError> {
        match (a.kind(), b.kind()) {
            (None, None) => Ok((a, b)),
            (Some(ka), None) => Ok((a, self.lift(b, &ka, pos)?)),
            (None, Some(kb)) => Ok((self.lift(a, &kb, pos)?, b)),
            (Some(ka), Some(kb)) if ka == kb => Ok((a, b)),
            (Some(ka), Some(kb)) => {
                if let Ok(a2) = self.lift(a.clone(), &kb, pos) {
                    return Ok((a2, b));
                }
                if let Ok(b2) = self.lift(b.clone(), &ka, pos) {
                    return Ok((a, b2));
                }
                Err(ScenarioError::at(pos, format!("cannot combine {} with {}", a.describe(), b.describe())))
            }
        }
    }

    fn add(&self, a: Value, b: Value, pos: Pos) -> Result<Value, ScenarioError> {
        let (a, b) = self.unify(a, b, pos)?;
        Ok(match (a, b) {
            (Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (Value::Curve(m, x), Value::Curve(_, y)) => Value::Curve(m, &x + &y),
            (Value::Surface(m, x), Value::Surface(_, y)) => Value::Surface(m, &x + &y),
            (Value::Product(m, x), Value::Product(_, y)) => Value::Product(m, &x + &y),
            (Value::Restricted(m, x), Value::Restricted(_, y)) => Value::Restricted(m, RestrictedClass(&x.0 + &y.0)),
            (a, b) => return Err(ScenarioError::at(pos, format!("cannot add {} and {}", a.describe(), b.describe()))),
        })
    }

    fn neg(&self, a: Value, pos: Pos) -> Result<Value, ScenarioError> {
        Ok(match a {
            Value::Int(x) => Value::Int(-x),
            Value::Curve(m, x) => Value::Curve(m, -&x),
            Value::Surface(m, x) => Value::Surface(m, -&x),
            Value::Product(m, x) => Value::Product(m, -&x),
            Value::Restricted(m, x) => Value::Restricted(m, RestrictedClass(-&x.0)),
            a => return Err(ScenarioError::at(pos, format!("cannot negate {}", a.describe()))),
        })
    }

    fn scale(&self, k: LinearForm, v: Value, pos: Pos) -> Result<Value, ScenarioError> {
        let nonlinear = || ScenarioError::at(pos, "product is not linear in n");
        Ok(match v {
            Value::Int(x) => Value::Int(k.checked_mul(&x).ok_or_else(nonlinear)?),
            Value::Curve(m, x) => Value::Curve(m, x.scale_form(&k).ok_or_else(nonlinear)?),
            Value::Surface(m, x) => Value::Surface(m, x.scale_form(&k).ok_or_else(nonlinear)?),
            Value::Product(m, x) => Value::Product(m, x.scale_form(&k).ok_or_else(nonlinear)?),
            Value::Restricted(m, x) => Value::Restricted(m, RestrictedClass(x.0.scale_form(&k).ok_or_else(nonlinear)?)),
            v => return Err(ScenarioError::at(pos, format!("cannot scale {}", v.describe()))),
        })
    }

    fn mul(&self, a: Value, b: Value, pos: Pos) -> Result<Value, ScenarioError> {
        match (a, b) {
            (Value::Int(k), v) | (v, Value::Int(k)) => self.scale(k, v, pos),
            (a, b) => Err(ScenarioError::at(pos, format!("cannot multiply {} by {}", a.describe(), b.describe()))),
        }
    }

    fn infer_pair(&self, a: Value, b: Value, pos: Pos) -> Result<Value, ScenarioError> {
        let mut found = Vec::new();
        for (name, x) in &self.sc.products {
            let s = self.lift(a.clone(), &Kind::Surface(x.surface().name().to_string()), pos);
            let c = self.lift(b.clone(), &Kind::Curve(x.curve().name().to_string()), pos);
            if let (Ok(Value::Surface(_, s)), Ok(Value::Curve(_, c))) = (s, c) {
                found.push(Value::Product(name.clone(), ProductClass::new(s, c)));
            }
        }
        match found.len() {
            1 => Ok(found.pop().expect("one candidate")),
            0 => {
                Err(ScenarioError::at(pos, format!("no product has {} and {} as factors", a.describe(), b.describe())))
            }
            _ => Err(ScenarioError::at(pos, "pair matches several products")),
        }
    }

    fn checked(&self, v: Value, pos: Pos) -> Result<Value, ScenarioError> {
        if max_coeff(&v) > COEFF_LIMIT {
            return Err(ScenarioError::at(pos, format!("coefficient exceeds the limit {COEFF_LIMIT}")));
        }
        Ok(v)
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, ScenarioError> {
        let pos = e.pos;
        let v = match &e.kind {
            ExprKind::Int(k) => Value::Int(LinearForm::constant(*k)),
            ExprKind::Ident(name) => self.lookup(name, pos)?,
            ExprKind::Neg(a) => self.neg(self.eval(a)?, pos)?,
            ExprKind::Add(a, b) => self.add(self.eval(a)?, self.eval(b)?, pos)?,
            ExprKind::Sub(a, b) => {
                let b = self.neg(self.eval(b)?, b.pos)?;
                self.add(self.eval(a)?, b, pos)?
            }
            ExprKind::Mul(a, b) => self.mul(self.eval(a)?, self.eval(b)?, pos)?,
            ExprKind::Pair(a, b) => self.infer_pair(self.eval(a)?, self.eval(b)?, pos)?,
            ExprKind::Call(name, args) => self.call(name, args, pos)?,
        };
        self.checked(v, pos)
    }

    fn lookup(&self, name: &str, pos: Pos) -> Result<Value, ScenarioError> {
        if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| n == name) {
            return Ok(Value::Int(LinearForm::constant(*v)));
        }
        if name == "n" {
            return Ok(Value::Int(LinearForm::param(self.guard)));
        }
        if let Some(v) = self.sc.bindings.get(name) {
            return Ok(v.clone());
        }
        if let Some(c) = self.sc.generators.get(name) {
            let d = self.sc.curves[c].generator_class(name).expect("registered generator");
            return Ok(Value::Curve(c.clone(), d));
        }
        if self.model_kind(name).is_some() {
            return Ok(Value::Model(name.to_string()));
        }
        Err(ScenarioError::at(pos, format!("undefined name `{name}`")))
    }

    fn class_arg(&self, vals: &[(Value, Pos)], pos: Pos) -> Result<Value, ScenarioError> {
        match vals {
            [(Value::Model(m), _), (c, cp)] => {
                let k = self.model_kind(m).expect("model value names a model");
                self.lift(c.clone(), &k, *cp)
            }
            [(c, cp)] if c.kind().is_some() => Ok(c.clone()),
            [(c, cp)] => Err(ScenarioError::at(*cp, format!("expected a class, found {}", c.describe()))),
            _ => Err(ScenarioError::at(pos, "expected (model, class) or (class)")),
        }
    }

    fn model_arg<'v>(&self, v: &'v (Value, Pos)) -> Result<&'v str, ScenarioError> {
        match &v.0 {
            Value::Model(m) => Ok(m),
            other => Err(ScenarioError::at(v.1, format!("expected a model name, found {}", other.describe()))),
        }
    }

    fn arity(&self, name: &str, vals: &[(Value, Pos)], lo: usize, hi: usize, pos: Pos) -> Result<(), ScenarioError> {
        if vals.len() < lo || vals.len() > hi {
            let want = if lo == hi { lo.to_string() } else { format!("{lo} to {hi}") };
            return Err(ScenarioError::at(pos, format!("{name} takes {want} arguments, got {}", vals.len())));
        }
        Ok(())
    }

    fn family_h<P: ClassValue>(&self, base: &P, c: &P::Class, i: usize, constant: bool, guard: i64) -> Hval {
        if i > base.dim() {
            let claim = format!("h{i}({}, {})", base.label(), base.display(c));
            return Certificate::count(
                claim,
                Rule::AboveDimension { degree: i, dim: base.dim() },
                HValue::zero_from(guard),
            )
            .into();
        }
        if constant {
            base.h(c, i)
        } else {
            cone::resolve_family(base, c, i, guard, self.nmax)
        }
    }

    pub fn h(&self, c: &Value, i: usize, pos: Pos) -> Result<Hval, ScenarioError> {
        Ok(match c {
            Value::Curve(m, d) => self.family_h(&self.sc.curves[m], d, i, d.is_constant(), d.guard()),
            Value::Surface(m, s) => self.family_h(&self.sc.surfaces[m], s, i, s.is_constant(), s.guard()),
            Value::Product(m, p) => self.sc.products[m].h(p, i),
            Value::Restricted(m, r) => self.family_h(&self.sc.hypersurfaces[m], r, i, r.0.is_constant(), r.0.guard()),
            v => return Err(ScenarioError::at(pos, format!("cohomology of {} is undefined", v.describe()))),
        })
    }

    fn dim_of(&self, c: &Value) -> usize {
        match c {
            Value::Curve(..) => 1,
            Value::Product(..) => 3,
            _ => 2,
        }
    }

    fn side_of(&self, s: &RuledSurfaceModel, v: &Value, pos: Pos) -> Result<Side, ScenarioError> {
        let c = match self.lift(v.clone(), &Kind::Surface(s.name().to_string()), pos)? {
            Value::Surface(_, c) => c,
            _ => unreachable!(),
        };
        if s.is_equivalent(&c, &s.section_e()) == Some(true) {
            Ok(Side::E)
        } else if s.is_equivalent(&c, &s.section_inf()) == Some(true) {
            Ok(Side::EInf)
        } else {
            Err(ScenarioError::at(pos, format!("{} is not the class of E or E_inf", s.display(&c))))
        }
    }

    fn point_name(&self, v: &(Value, Pos)) -> Result<String, ScenarioError> {
        if let Value::Curve(m, d) = &v.0 {
            let model = &self.sc.curves[m];
            if let Some(g) =
                model.generators().iter().find(|g| g.point && model.generator_class(&g.name).as_ref() == Some(d))
            {
                return Ok(g.name.clone());
            }
        }
        Err(ScenarioError::at(v.1, "expected a named point generator"))
    }

    fn surface_of<'v>(
        &self,
        v: &'v Value,
        pos: Pos,
    ) -> Result<(&'a RuledSurfaceModel, &'v SurfaceClass), ScenarioError> {
        match v {
            Value::Surface(m, s) => Ok((&self.sc.surfaces[m], s)),
            other => {
                Err(ScenarioError::at(pos, format!("expected a class on a ruled surface, found {}", other.describe())))
            }
        }
    }

    fn criterion<P: ClassValue>(
        &self,
        base: &P,
        m: Value,
        sigma: Option<Value>,
        pos: Pos,
    ) -> Result<Value, ScenarioError> {
        let k = base.kind();
        let m = P::take(self.lift(m, &k, pos)?).expect("lifted");
        let sigma = match sigma {
            Some(s) => Some(P::take(self.lift(s, &k, pos)?).expect("lifted")),
            None => None,
        };
        let out = cone::db_criterion(base, &m, sigma.as_ref(), self.nmax).map_err(engine(pos))?;
        Ok(Value::Criterion(Box::new(out)))
    }

    fn index<P: ClassValue>(&self, base: &P, m: Value, pos: Pos) -> Result<Value, ScenarioError> {
        let m = P::take(self.lift(m, &base.kind(), pos)?).expect("lifted");
        Ok(Value::Index(cone::cartier_index(base, &m).map_err(engine(pos))?))
    }

    fn in_span<P: ClassValue>(&self, base: &P, m: Value, k: i64, pos: Pos) -> Result<Value, ScenarioError> {
        let m = P::take(self.lift(m, &base.kind(), pos)?).expect("lifted");
        let canon = base.canonical().map_err(engine(pos))?;
        Ok(Value::Truth(Some(cone::multiple_in_span(base, &canon, &m, k).map_err(engine(pos))?), None))
    }

    pub fn verdict_on<P: ClassValue>(
        &self,
        base: &P,
        m: Value,
        boundary: Option<Value>,
        pos: Pos,
    ) -> Result<Verdict, ScenarioError> {
        let k = base.kind();
        let m = P::take(self.lift(m, &k, pos)?).expect("lifted");
        let boundary = match boundary {
            Some(b) => Some(P::take(self.lift(b, &k, pos)?).expect("lifted")),
            None => None,
        };
        let mut v = cone::assemble_verdict(base, &m, boundary.as_ref(), self.nmax).map_err(engine(pos))?;
        let extra = base.extra_certificates(boundary.as_ref()).map_err(engine(pos))?;
        for (_, c) in &extra {
            for a in c.assumptions() {
                if !v.assumptions.contains(&a) {
                    v.assumptions.push(a);
                }
            }
        }
        v.certificates.extend(extra);
        Ok(v)
    }

    pub fn verdict(&self, base: &str, m: Value, boundary: Option<Value>, pos: Pos) -> Result<Verdict, ScenarioError> {
        on_base!(self, base, pos, |b| self.verdict_on(b, m, boundary, pos))
    }

    fn call(&self, name: &str, args: &[Expr], pos: Pos) -> Result<Value, ScenarioError> {
        if !FUNCTIONS.contains(&name) {
            return Err(ScenarioError::at(pos, format!("unknown function `{name}`")));
        }
        if name == "at" {
            return self.call_at(args, pos);
        }
        let vals: Vec<(Value, Pos)> =
            args.iter().map(|a| Ok((self.eval(a)?, a.pos))).collect::<Result<_, ScenarioError>>()?;
        match name {
            "h0" | "h1" | "h2" | "h3" => {
                self.arity(name, &vals, 1, 2, pos)?;
                let i = name[1..].parse::<usize>().expect("degree digit");
                let c = self.class_arg(&vals, pos)?;
                Ok(Value::Count(self.h(&c, i, pos)?))
            }
            "cohomology" => {
                self.arity(name, &vals, 1, 2, pos)?;
                let c = self.class_arg(&vals, pos)?;
                let hs = (0..=self.dim_of(&c)).map(|i| Ok(Value::Count(self.h(&c, i, pos)?)));
                Ok(Value::Tuple(hs.collect::<Result<_, ScenarioError>>()?))
            }
            "chi" => {
                self.arity(name, &vals, 1, 2, pos)?;
                let c = self.class_arg(&vals, pos)?;
                let f = match &c {
                    Value::Curve(m, d) => self.sc.curves[m].chi(d),
                    Value::Surface(m, s) => self.sc.surfaces[m].chi(s).map_err(engine(pos))?,
                    Value::Product(m, p) => self.sc.products[m].chi(p).map_err(engine(pos))?,
                    Value::Restricted(..) => {
                        let mut total = HValue::number(0);
                        for i in 0..=2 {
                            let h = self.h(&c, i, pos)?.value;
                            let signed = if i % 2 == 1 { h.mul(&HValue::number(-1)) } else { h };
                            total = total.add(&signed);
                        }
                        total
                            .form()
                            .ok_or_else(|| ScenarioError::at(pos, "Euler characteristic needs known cohomology"))?
                    }
                    _ => unreachable!(),
                };
                Ok(Value::Int(f))
            }
            "deg" => {
                self.arity(name, &vals, 1, 2, pos)?;
                match self.class_arg(&vals, pos)? {
                    Value::Curve(m, d) => Ok(Value::Int(self.sc.curves[&m].degree(&d))),
                    other => {
                        Err(ScenarioError::at(pos, format!("deg expects a curve class, found {}", other.describe())))
                    }
                }
            }
            "intersect" => {
                self.arity(name, &vals, 2, 3, pos)?;
                if vals.len() == 2 {
                    let (a, b) = self.unify(vals[0].0.clone(), vals[1].0.clone(), pos)?;
                    match (a, b) {
                        (Value::Surface(m, x), Value::Surface(_, y)) => {
                            let c = self.sc.surfaces[&m].intersect_cert(&x, &y).map_err(engine(pos))?;
                            Ok(Value::Count(c.into()))
                        }
                        (Value::Curve(..), Value::Curve(..)) => Err(ScenarioError::at(
                            pos,
                            "two curve classes do not intersect on a common surface; pull them back",
                        )),
                        (a, _) => {
                            Err(ScenarioError::at(pos, format!("cannot intersect two copies of {}", a.describe())))
                        }
                    }
                } else {
                    let (a, b) = self.unify(vals[0].0.clone(), vals[1].0.clone(), pos)?;
                    let (a, c) = self.unify(a, vals[2].0.clone(), pos)?;
                    let (b, c) = self.unify(b, c, pos)?;
                    let (a, b) = self.unify(a, b, pos)?;
                    match (a, b, c) {
                        (Value::Product(m, x), Value::Product(_, y), Value::Product(_, z)) => {
                            Ok(Value::Int(self.sc.products[&m].intersect3(&x, &y, &z).map_err(engine(pos))?))
                        }
                        (a, _, _) => Err(ScenarioError::at(
                            pos,
                            format!("triple intersection needs product classes, found {}", a.describe()),
                        )),
                    }
                }
            }
            "bpf" | "bs" => {
                self.arity(name, &vals, 1, 2, pos)?;
                match self.class_arg(&vals, pos)? {
                    Value::Curve(m, d) => {
                        let model = &self.sc.curves[&m];
                        if name == "bpf" {
                            let c = model.is_basepoint_free(&d);
                            Ok(Value::Truth(c.truth_value(), Some(c)))
                        } else {
                            let (locus, c) = model.base_locus(&d);
                            let text = locus.map(|l| l.to_string()).unwrap_or_else(|| "unknown".into());
                            Ok(Value::Text(text, Some(c)))
                        }
                    }
                    Value::Surface(m, s) => {
                        let (region, c) = self.sc.surfaces[&m].base_locus(&s).map_err(engine(pos))?;
                        if name == "bpf" {
                            Ok(Value::Truth(region.map(|r| r.is_empty()), Some(c)))
                        } else {
                            let text = region.map(|r| r.to_string()).unwrap_or_else(|| "unknown".into());
                            Ok(Value::Text(text, Some(c)))
                        }
                    }
                    other => Err(ScenarioError::at(
                        pos,
                        format!("{name} expects a curve or surface class, found {}", other.describe()),
                    )),
                }
            }
            "in_bs" => {
                self.arity(name, &vals, 3, 3, pos)?;
                let (s, c) = self.surface_of(&vals[0].0, vals[0].1)?;
                let point = self.point_name(&vals[1])?;
                let side = self.side_of(s, &vals[2].0, vals[2].1)?;
                let (t, cert) = s.confirm_section_point(c, &point, side).map_err(engine(pos))?;
                Ok(Value::Truth(t, Some(cert)))
            }
            "reduced" => {
                self.arity(name, &vals, 1, 1, pos)?;
                let (s, c) = self.surface_of(&vals[0].0, vals[0].1)?;
                let (region, _) = s.base_locus(c).map_err(engine(pos))?;
                let Some((point, side)) = region.as_ref().and_then(|r| r.single_point()) else {
                    return Err(ScenarioError::at(pos, "base locus is not a single known point"));
                };
                let cert = s.reduced_base_point(c, point, side).map_err(engine(pos))?;
                Ok(Value::Truth(cert.truth_value(), Some(cert)))
            }
            "restrict" => {
                self.arity(name, &vals, 2, 2, pos)?;
                if let Value::Model(t) = &vals[0].0 {
                    if !self.sc.hypersurfaces.contains_key(t) {
                        return Err(ScenarioError::at(vals[0].1, format!("`{t}` is not a hypersurface")));
                    }
                    return self.lift(vals[1].0.clone(), &Kind::Restricted(t.clone()), vals[1].1);
                }
                let (s, c) = self.surface_of(&vals[0].0, vals[0].1)?;
                let side = self.side_of(s, &vals[1].0, vals[1].1)?;
                let d = s.restrict_to_section(c, side).map_err(engine(pos))?;
                Ok(Value::Curve(s.curve().name().to_string(), d))
            }
            "equiv" => {
                self.arity(name, &vals, 2, 2, pos)?;
                let (a, b) = self.unify(vals[0].0.clone(), vals[1].0.clone(), pos)?;
                let t = match (&a, &b) {
                    (Value::Curve(m, x), Value::Curve(_, y)) => self.sc.curves[m].is_equivalent(x, y),
                    (Value::Surface(m, x), Value::Surface(_, y)) => self.sc.surfaces[m].is_equivalent(x, y),
                    (Value::Product(m, x), Value::Product(_, y)) => {
                        let d = (x - y).flat();
                        if d.is_constant() {
                            Some(self.sc.products[m].relation_lattice().contains(&d.offset))
                        } else {
                            None
                        }
                    }
                    (Value::Restricted(m, x), Value::Restricted(_, y)) => {
                        self.sc.hypersurfaces[m].is_equivalent(x, y).map_err(engine(pos))?
                    }
                    (Value::Int(x), Value::Int(y)) => Some(x.same_values(y)),
                    _ => return Err(ScenarioError::at(pos, "equiv expects two classes")),
                };
                Ok(Value::Truth(t, None))
            }
            "serre" => {
                self.arity(name, &vals, 1, 2, pos)?;
                match self.class_arg(&vals, pos)? {
                    Value::Curve(m, d) => Ok(Value::Curve(m.clone(), self.sc.curves[&m].serre_dual(&d))),
                    Value::Surface(m, s) => {
                        let k = self.sc.surfaces[&m].canonical_class().with_guard(s.guard());
                        Ok(Value::Surface(m, &k - &s))
                    }
                    other => Err(ScenarioError::at(
                        pos,
                        format!("serre expects a curve or surface class, found {}", other.describe()),
                    )),
                }
            }
            "ample" => {
                self.arity(name, &vals, 1, 2, pos)?;
                let cert = match self.class_arg(&vals, pos)? {
                    Value::Curve(m, d) => self.sc.curves[&m].ample(&d),
                    Value::Surface(m, s) => self.sc.surfaces[&m].is_ample(&s),
                    Value::Product(m, p) => self.sc.products[&m].is_ample(&p),
                    Value::Restricted(m, r) => self.sc.hypersurfaces[&m].is_ample(&r),
                    _ => unreachable!(),
                }
                .map_err(engine(pos))?;
                Ok(Value::Truth(cert.truth_value(), Some(cert)))
            }
            "nef" | "big" => {
                self.arity(name, &vals, 1, 1, pos)?;
                let (s, c) = self.surface_of(&vals[0].0, vals[0].1)?;
                let nb = s.is_nef_big(c).map_err(engine(pos))?;
                let t = if name == "nef" { nb.nef } else { nb.big };
                Ok(Value::Truth(Some(t), Some(nb.certificate)))
            }
            "pushforward" => {
                self.arity(name, &vals, 1, 1, pos)?;
                let (s, c) = self.surface_of(&vals[0].0, vals[0].1)?;
                let curve = s.curve().name().to_string();
                match s.pushforward(c).map_err(engine(pos))? {
                    Pushforward::Summands(ds) => {
                        Ok(Value::Tuple(ds.into_iter().map(|d| Value::Curve(curve.clone(), d)).collect()))
                    }
                    Pushforward::Family { top, base, twist } => Ok(Value::Text(
                        format!("{} - k*({}) for 0 <= k <= {top}", s.curve().display(&base), s.curve().display(&twist)),
                        None,
                    )),
                }
            }
            "db_pair" | "db" => {
                let (lo, hi) = if name == "db_pair" { (3, 3) } else { (2, 3) };
                self.arity(name, &vals, lo, hi, pos)?;
                let base = self.model_arg(&vals[0])?;
                let m = vals[1].0.clone();
                let sigma = vals.get(2).map(|v| v.0.clone());
                on_base!(self, base, vals[0].1, |b| self.criterion(b, m, sigma, pos))
            }
            "cartier_index" => {
                self.arity(name, &vals, 2, 2, pos)?;
                let base = self.model_arg(&vals[0])?;
                let m = vals[1].0.clone();
                on_base!(self, base, vals[0].1, |b| self.index(b, m, pos))
            }
            "in_span" => {
                self.arity(name, &vals, 3, 3, pos)?;
                let base = self.model_arg(&vals[0])?;
                let m = vals[1].0.clone();
                let k = match &vals[2].0 {
                    Value::Int(f) if f.is_constant() => f.offset,
                    _ => return Err(ScenarioError::at(vals[2].1, "expected an integer multiple")),
                };
                on_base!(self, base, vals[0].1, |b| self.in_span(b, m, k, pos))
            }
            "smooth" | "connected" => {
                self.arity(name, &vals, 1, 2, pos)?;
                let t = self.model_arg(&vals[0])?;
                let Some(model) = self.sc.hypersurfaces.get(t) else {
                    return Err(ScenarioError::at(vals[0].1, format!("`{t}` is not a hypersurface")));
                };
                let cert = match (name, vals.get(1)) {
                    ("connected", None) => model.connectedness_cert().map_err(engine(pos))?,
                    ("smooth", None) => model.smoothness_cert().map_err(engine(pos))?,
                    ("smooth", Some((b, bp))) => {
                        let Value::Restricted(_, b) = self.lift(b.clone(), &model.kind(), *bp)? else { unreachable!() };
                        match cone::boundary_certificate(model, &b).map_err(engine(pos))? {
                            Some(c) => c,
                            None => return Err(ScenarioError::at(*bp, "no smoothness rule for this divisor")),
                        }
                    }
                    _ => return Err(ScenarioError::at(pos, "connected takes one argument")),
                };
                Ok(Value::Truth(cert.truth_value(), Some(cert)))
            }
            "theta" | "theta_counts" => {
                self.arity(name, &vals, 1, 2, pos)?;
                match self.class_arg(&vals, pos)? {
                    Value::Curve(m, d) => {
                        let model = &self.sc.curves[&m];
                        let report = model.classify_theta(&d, &model.display(&d)).map_err(engine(pos))?;
                        if name == "theta" {
                            let parity =
                                serde_json::to_value(report.parity).ok().and_then(|v| v.as_str().map(str::to_string));
                            Ok(Value::Text(parity.unwrap_or_default(), None))
                        } else {
                            let (a, b, c) = report.counts;
                            let int = |x: u64| Value::Int(LinearForm::constant(x as i64));
                            Ok(Value::Tuple(vec![int(a), int(b), int(c)]))
                        }
                    }
                    other => {
                        Err(ScenarioError::at(pos, format!("{name} expects a curve class, found {}", other.describe())))
                    }
                }
            }
            "canonical" => {
                self.arity(name, &vals, 1, 1, pos)?;
                let m = self.model_arg(&vals[0])?.to_string();
                Ok(match self.model_kind(&m).expect("model") {
                    Kind::Curve(_) => Value::Curve(m.clone(), self.sc.curves[&m].canonical_class()),
                    Kind::Surface(_) => Value::Surface(m.clone(), self.sc.surfaces[&m].canonical_class()),
                    Kind::Product(_) => Value::Product(m.clone(), self.sc.products[&m].canonical_class()),
                    Kind::Restricted(_) => Value::Restricted(
                        m.clone(),
                        self.sc.hypersurfaces[&m].adjunction_canonical().map_err(engine(pos))?,
                    ),
                })
            }
            "section" | "section_inf" | "fiber" => {
                self.arity(name, &vals, 1, 1, pos)?;
                let m = self.model_arg(&vals[0])?;
                let Some(s) = self.sc.surfaces.get(m) else {
                    return Err(ScenarioError::at(vals[0].1, format!("`{m}` is not a ruled surface")));
                };
                let c = match name {
                    "section" => s.section_e(),
                    "section_inf" => s.section_inf(),
                    _ => s.fiber().map_err(engine(pos))?,
                };
                Ok(Value::Surface(m.to_string(), c))
            }
            _ => unreachable!("listed function"),
        }
    }

    /// `at(expr, k)`: evaluate `expr` with `n` fixed to `k`.
    fn call_at(&self, args: &[Expr], pos: Pos) -> Result<Value, ScenarioError> {
        if args.len() != 2 {
            return Err(ScenarioError::at(pos, format!("at takes 2 arguments, got {}", args.len())));
        }
        let k = match self.eval(&args[1])? {
            Value::Int(f) if f.is_constant() => f.offset,
            _ => return Err(ScenarioError::at(args[1].pos, "expected an integer value for n")),
        };
        let mut inner = Ctx { sc: self.sc, nmax: self.nmax, guard: self.guard, locals: self.locals.clone() };
        inner.locals.push(("n".to_string(), k));
        inner.eval(&args[0])
    }

    /// Reject references to names the scenario does not define.
    pub fn check_names(&self, e: &Expr, extra: &[&str]) -> Result<(), ScenarioError> {
        match &e.kind {
            ExprKind::Int(_) => Ok(()),
            ExprKind::Ident(name) => {
                if name == "n" || extra.contains(&name.as_str()) || self.sc.is_defined(name) {
                    Ok(())
                } else {
                    Err(ScenarioError::at(e.pos, format!("undefined name `{name}`")))
                }
            }
            ExprKind::Neg(a) => self.check_names(a, extra),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) | ExprKind::Pair(a, b) => {
                self.check_names(a, extra)?;
                self.check_names(b, extra)
            }
            ExprKind::Call(name, args) => {
                if !FUNCTIONS.contains(&name.as_str()) {
                    return Err(ScenarioError::at(e.pos, format!("unknown function `{name}`")));
                }
                args.iter().try_for_each(|a| self.check_names(a, extra))
            }
        }
    }
}

/// Parse and evaluate one expression against a scenario, with `n ≥ guard`.
pub fn eval_str(sc: &Scenario, src: &str, guard: i64) -> Result<Value, ScenarioError> {
    let e = parse_expr(src)?;
    let ctx = Ctx { guard, ..Ctx::new(sc) };
    ctx.check_names(&e, &[])?;
    ctx.eval(&e)
}
