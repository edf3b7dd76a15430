//! Building and validating the model graph of a scenario.

use std::collections::BTreeMap;
use std::path::Path;

use super::eval::{Ctx, Kind, Value, FUNCTIONS};
use super::syntax::{
    parse_scenario, CheckDecl, CurveDecl, Expr, ExprKind, FactDecl, HypersurfaceDecl, Item, Pos, ScenarioAst,
    TableDecl, VerdictDecl, BUILTIN_NAMES,
};
use super::ScenarioError;
use crate::cone::DEFAULT_SWEEP;
use crate::curve::{CurveModel, DivisorClass, DoubleCover, FactTable, Generator, ThetaReport};
use crate::product::{HypersurfaceModel, ProductModel};
use crate::surface::RuledSurfaceModel;

/// A loaded scenario: validated models, named classes and the pipeline.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub ast: ScenarioAst,
    pub curves: BTreeMap<String, CurveModel>,
    pub surfaces: BTreeMap<String, RuledSurfaceModel>,
    pub products: BTreeMap<String, ProductModel>,
    pub hypersurfaces: BTreeMap<String, HypersurfaceModel>,
    pub bindings: BTreeMap<String, Value>,
    /// Generator name to the curve declaring it.
    pub generators: BTreeMap<String, String>,
    /// `(curve, label, report)` for every declared theta characteristic.
    pub theta_reports: Vec<(String, String, ThetaReport)>,
    pub nmax: i64,
    pub run: Vec<String>,
    pub has_pipeline: bool,
    pub checks: Vec<CheckDecl>,
    pub tables: Vec<TableDecl>,
    pub verdict: Option<VerdictDecl>,
}

impl Scenario {
    pub fn name(&self) -> &str {
        &self.ast.name
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.curves.contains_key(name)
            || self.surfaces.contains_key(name)
            || self.products.contains_key(name)
            || self.hypersurfaces.contains_key(name)
            || self.bindings.contains_key(name)
            || self.generators.contains_key(name)
    }

    /// Names of the pipeline steps: checks, tables and `verdict`.
    pub fn step_names(&self) -> Vec<String> {
        let mut out: Vec<String> = self.checks.iter().map(|c| c.name.clone()).collect();
        out.extend(self.tables.iter().map(|t| t.name.clone()));
        if self.verdict.is_some() {
            out.push("verdict".to_string());
        }
        out
    }
}

pub fn load_file(path: &Path) -> Result<Scenario, ScenarioError> {
    let src = std::fs::read_to_string(path).map_err(|e| ScenarioError {
        line: 0,
        col: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    load_str(&src)
}

pub fn load_str(src: &str) -> Result<Scenario, ScenarioError> {
    let ast = parse_scenario(src)?;
    let mut sc = Scenario {
        ast: ast.clone(),
        curves: BTreeMap::new(),
        surfaces: BTreeMap::new(),
        products: BTreeMap::new(),
        hypersurfaces: BTreeMap::new(),
        bindings: BTreeMap::new(),
        generators: BTreeMap::new(),
        theta_reports: Vec::new(),
        nmax: DEFAULT_SWEEP,
        run: Vec::new(),
        has_pipeline: false,
        checks: Vec::new(),
        tables: Vec::new(),
        verdict: None,
    };
    for item in &ast.items {
        match item {
            Item::Curve(d) => load_curve(&mut sc, d)?,
            Item::Surface(d) => {
                fresh(&sc, &d.name, d.pos)?;
                let (base, bpos) = d.base.as_ref().ok_or_else(|| missing(d.pos, &d.name, "base"))?;
                let curve = sc
                    .curves
                    .get(base)
                    .ok_or_else(|| ScenarioError::at(*bpos, format!("`{base}` is not a curve")))?
                    .clone();
                let twist = d.twist.as_ref().ok_or_else(|| missing(d.pos, &d.name, "twist"))?;
                let names: Vec<String> = curve.generators().iter().map(|g| g.name.clone()).collect();
                let t = combination(twist, &names)?;
                let s = RuledSurfaceModel::new(&d.name, curve, DivisorClass::constant(t))
                    .map_err(|e| ScenarioError::at(twist.pos, e.to_string()))?;
                sc.surfaces.insert(d.name.clone(), s);
            }
            Item::Product(d) => {
                fresh(&sc, &d.name, d.pos)?;
                let (s, spos) = d.surface.as_ref().ok_or_else(|| missing(d.pos, &d.name, "surface"))?;
                let (c, cpos) = d.curve.as_ref().ok_or_else(|| missing(d.pos, &d.name, "curve"))?;
                let s = sc
                    .surfaces
                    .get(s)
                    .ok_or_else(|| ScenarioError::at(*spos, format!("`{s}` is not a ruled surface")))?;
                let c = sc.curves.get(c).ok_or_else(|| ScenarioError::at(*cpos, format!("`{c}` is not a curve")))?;
                let x = ProductModel::new(&d.name, s.clone(), c.clone());
                sc.products.insert(d.name.clone(), x);
            }
            Item::Hypersurface(d) => load_hypersurface(&mut sc, d)?,
            Item::Let(name, e, pos) => {
                fresh(&sc, name, *pos)?;
                let ctx = Ctx::new(&sc);
                ctx.check_names(e, &[])?;
                let v = ctx.eval(e)?;
                if v.kind().is_none() && !matches!(v, Value::Int(_)) {
                    return Err(ScenarioError::at(e.pos, format!("`{name}` must name a class or an integer")));
                }
                sc.bindings.insert(name.clone(), v);
            }
            Item::Table(t) => {
                step_fresh(&sc, &t.name, t.pos)?;
                if t.to < t.from || t.to - t.from > 1000 {
                    return Err(ScenarioError::at(t.pos, "table range must be non-empty and at most 1000 long"));
                }
                sc.tables.push(t.clone());
            }
            Item::Check(c) => {
                step_fresh(&sc, &c.name, c.pos)?;
                sc.checks.push(c.clone());
            }
            Item::Pipeline(p) => {
                if sc.has_pipeline {
                    return Err(ScenarioError::at(p.pos, "duplicate pipeline block"));
                }
                sc.has_pipeline = true;
                if let Some(n) = p.nmax {
                    sc.nmax = n;
                }
                sc.run = p.run.clone();
            }
            Item::Verdict(v) => {
                if sc.verdict.is_some() {
                    return Err(ScenarioError::at(v.pos, "duplicate verdict block"));
                }
                if !(sc.curves.contains_key(&v.base)
                    || sc.surfaces.contains_key(&v.base)
                    || sc.hypersurfaces.contains_key(&v.base))
                {
                    return Err(ScenarioError::at(
                        v.pos,
                        format!("`{}` is not a curve, ruled surface or hypersurface", v.base),
                    ));
                }
                if v.polarization.is_none() {
                    return Err(missing(v.pos, "verdict", "polarization"));
                }
                sc.verdict = Some(v.clone());
            }
        }
    }
    // Names in deferred expressions must resolve now, not at run time.
    let ctx = Ctx::new(&sc);
    for c in &sc.checks {
        ctx.check_names(&c.expr, &[])?;
    }
    for t in &sc.tables {
        ctx.check_names(&t.expr, &[t.var.as_str()])?;
    }
    if let Some(v) = &sc.verdict {
        for e in v.polarization.iter().chain(v.boundary.iter()) {
            ctx.check_names(e, &[])?;
        }
    }
    let steps = sc.step_names();
    for r in &sc.run {
        if !steps.contains(r) {
            let pos = ast
                .items
                .iter()
                .find_map(|i| match i {
                    Item::Pipeline(p) => Some(p.pos),
                    _ => None,
                })
                .unwrap_or(Pos { line: 1, col: 1 });
            return Err(ScenarioError::at(pos, format!("pipeline runs unknown step `{r}`")));
        }
    }
    Ok(sc)
}

fn missing(pos: Pos, block: &str, what: &str) -> ScenarioError {
    ScenarioError::at(pos, format!("{block}: missing `{what}`"))
}

fn fresh(sc: &Scenario, name: &str, pos: Pos) -> Result<(), ScenarioError> {
    if sc.is_defined(name) {
        return Err(ScenarioError::at(pos, format!("`{name}` is already defined")));
    }
    if BUILTIN_NAMES.contains(&name) || FUNCTIONS.contains(&name) {
        return Err(ScenarioError::at(pos, format!("`{name}` is reserved")));
    }
    Ok(())
}

fn step_fresh(sc: &Scenario, name: &str, pos: Pos) -> Result<(), ScenarioError> {
    if name == "verdict" || sc.step_names().iter().any(|s| s == name) {
        return Err(ScenarioError::at(pos, format!("duplicate step name `{name}`")));
    }
    Ok(())
}

/// Integer combination of named generators, as used inside model blocks.
fn combination(e: &Expr, names: &[String]) -> Result<Vec<i64>, ScenarioError> {
    enum Lin {
        Scalar(i64),
        Vector(Vec<i64>),
    }
    fn go(e: &Expr, names: &[String]) -> Result<Lin, ScenarioError> {
        let overflow = || ScenarioError::at(e.pos, "coefficient overflow");
        let scale = |k: i64, v: Vec<i64>| -> Result<Vec<i64>, ScenarioError> {
            v.into_iter().map(|x| x.checked_mul(k).ok_or_else(overflow)).collect()
        };
        Ok(match &e.kind {
            ExprKind::Int(k) => Lin::Scalar(*k),
            ExprKind::Ident(n) => match names.iter().position(|g| g == n) {
                Some(i) => {
                    let mut v = vec![0; names.len()];
                    v[i] = 1;
                    Lin::Vector(v)
                }
                None => {
                    return Err(ScenarioError::at(
                        e.pos,
                        format!("undefined generator `{n}` (known: {})", names.join(", ")),
                    ))
                }
            },
            ExprKind::Neg(a) => match go(a, names)? {
                Lin::Scalar(k) => Lin::Scalar(k.checked_neg().ok_or_else(overflow)?),
                Lin::Vector(v) => Lin::Vector(scale(-1, v)?),
            },
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let sign = if matches!(e.kind, ExprKind::Sub(..)) { -1 } else { 1 };
                match (go(a, names)?, go(b, names)?) {
                    (Lin::Scalar(x), Lin::Scalar(y)) => {
                        Lin::Scalar(y.checked_mul(sign).and_then(|y| x.checked_add(y)).ok_or_else(overflow)?)
                    }
                    (Lin::Vector(x), Lin::Vector(y)) => Lin::Vector(
                        x.iter()
                            .zip(&y)
                            .map(|(p, q)| q.checked_mul(sign).and_then(|q| p.checked_add(q)).ok_or_else(overflow))
                            .collect::<Result<_, _>>()?,
                    ),
                    (Lin::Vector(x), Lin::Scalar(0)) => Lin::Vector(x),
                    (Lin::Scalar(0), Lin::Vector(y)) => Lin::Vector(scale(sign, y)?),
                    _ => return Err(ScenarioError::at(e.pos, "cannot add an integer to a class")),
                }
            }
            ExprKind::Mul(a, b) => match (go(a, names)?, go(b, names)?) {
                (Lin::Scalar(x), Lin::Scalar(y)) => Lin::Scalar(x.checked_mul(y).ok_or_else(overflow)?),
                (Lin::Scalar(k), Lin::Vector(v)) | (Lin::Vector(v), Lin::Scalar(k)) => Lin::Vector(scale(k, v)?),
                _ => return Err(ScenarioError::at(e.pos, "cannot multiply two classes")),
            },
            ExprKind::Pair(..) | ExprKind::Call(..) => {
                return Err(ScenarioError::at(e.pos, "only integer combinations of generators are allowed here"))
            }
        })
    }
    match go(e, names)? {
        Lin::Vector(v) => Ok(v),
        Lin::Scalar(0) => Ok(vec![0; names.len()]),
        Lin::Scalar(_) => Err(ScenarioError::at(e.pos, "expected a combination of generators")),
    }
}

fn load_curve(sc: &mut Scenario, d: &CurveDecl) -> Result<(), ScenarioError> {
    fresh(sc, &d.name, d.pos)?;
    let genus = d.genus.ok_or_else(|| missing(d.pos, &d.name, "genus"))?;
    let mut names: Vec<String> = Vec::new();
    for g in &d.generators {
        if names.contains(&g.name) || g.name == d.name {
            return Err(ScenarioError::at(g.pos, format!("`{}` is already defined", g.name)));
        }
        fresh(sc, &g.name, g.pos)?;
        if g.point && g.degree != 1 {
            return Err(ScenarioError::at(g.pos, format!("point generator `{}` must have degree 1", g.name)));
        }
        names.push(g.name.clone());
    }
    let degrees: Vec<i64> = d.generators.iter().map(|g| g.degree).collect();
    let mut relations = Vec::new();
    for r in &d.relations {
        let v = combination(r, &names)?;
        let deg: i64 = v.iter().zip(&degrees).map(|(a, b)| a * b).sum();
        if deg != 0 {
            return Err(ScenarioError::at(
                r.pos,
                format!("relation `{r}` has degree {deg}; relations must have degree 0"),
            ));
        }
        relations.push(v);
    }
    let canonical = d.canonical.as_ref().ok_or_else(|| missing(d.pos, &d.name, "canonical"))?;
    let canonical_v = combination(canonical, &names)?;
    let mut facts = FactTable::default();
    for f in &d.facts {
        match f {
            FactDecl::H0(e, v) => {
                facts.insert_h0(&e.to_string(), DivisorClass::constant(combination(e, &names)?), *v as u64)
            }
            FactDecl::Bpf(e) => {
                facts.insert_basepoint_free(&e.to_string(), DivisorClass::constant(combination(e, &names)?))
            }
            FactDecl::Noneffective(e) => {
                facts.insert_noneffective(&e.to_string(), DivisorClass::constant(combination(e, &names)?))
            }
        }
    }
    if let Some((e, twists)) = &d.double_cover {
        facts.double_cover =
            Some(DoubleCover { g12: DivisorClass::constant(combination(e, &names)?), twists: twists.clone() });
    }
    let generators: Vec<Generator> =
        d.generators.iter().map(|g| Generator { name: g.name.clone(), degree: g.degree, point: g.point }).collect();
    let mut model = CurveModel::new(&d.name, genus, generators, relations, canonical_v, facts)
        .map_err(|e| ScenarioError::at(d.pos, e.to_string()))?;
    for t in &d.theta {
        let class = DivisorClass::constant(combination(t, &names)?);
        let label = t.to_string();
        let report = model.theta_facts(&class, &label).map_err(|e| ScenarioError::at(t.pos, e.to_string()))?;
        model = model.with_facts(report.facts.clone());
        sc.theta_reports.push((d.name.clone(), label, report));
    }
    for g in &names {
        sc.generators.insert(g.clone(), d.name.clone());
    }
    sc.curves.insert(d.name.clone(), model);
    Ok(())
}

fn load_hypersurface(sc: &mut Scenario, d: &HypersurfaceDecl) -> Result<(), ScenarioError> {
    fresh(sc, &d.name, d.pos)?;
    let (amb, apos) = d.ambient.as_ref().ok_or_else(|| missing(d.pos, &d.name, "ambient"))?;
    let ambient =
        sc.products.get(amb).ok_or_else(|| ScenarioError::at(*apos, format!("`{amb}` is not a product")))?.clone();
    let class_e = d.class.as_ref().ok_or_else(|| missing(d.pos, &d.name, "class"))?;
    let mut injective = false;
    for a in &d.assumptions {
        match a.as_str() {
            "restriction_injective" => injective = true,
            other => {
                return Err(ScenarioError::at(d.pos, format!("unknown assumption `{other}` (restriction_injective)")))
            }
        }
    }
    let ctx = Ctx::new(sc);
    let target = Kind::Product(amb.clone());
    let as_product = |e: &Expr| -> Result<_, ScenarioError> {
        ctx.check_names(e, &[])?;
        match ctx.lift(ctx.eval(e)?, &target, e.pos)? {
            Value::Product(_, p) => Ok(p),
            _ => unreachable!(),
        }
    };
    let class = as_product(class_e)?;
    let kernel = d.kernel.iter().map(as_product).collect::<Result<Vec<_>, _>>()?;
    let t = HypersurfaceModel::new(&d.name, ambient, class, kernel, injective)
        .map_err(|e| ScenarioError::at(class_e.pos, e.to_string()))?;
    sc.hypersurfaces.insert(d.name.clone(), t);
    Ok(())
}
