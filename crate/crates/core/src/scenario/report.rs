//! Running a scenario's pipeline and rendering the report.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::eval::{render_outcome, truth_str, witness_literal, Ctx, Value};
use super::load::Scenario;
use super::syntax::{Literal, Pos};
use super::ScenarioError;
use crate::cert::Certificate;
use crate::cone::Verdict;

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Overrides the pipeline's sweep depth.
    pub nmax: Option<i64>,
    /// Run a single step instead of the pipeline's list.
    pub only: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub expression: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard: Option<i64>,
    pub expected: String,
    pub value: serde_json::Value,
    pub display: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub k: i64,
    pub value: serde_json::Value,
    pub display: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub variable: String,
    pub expression: String,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Expectation {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub expectations: Vec<Expectation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub nmax: i64,
    pub checks: Vec<CheckResult>,
    pub verdict: Option<VerdictReport>,
    pub assumptions: Vec<String>,
    pub tables: BTreeMap<String, TableReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
            && self.verdict.as_ref().is_none_or(|v| v.expectations.iter().all(|e| e.passed))
    }

    /// 0 when every expectation holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {} (nmax {})", self.scenario, self.nmax);
        if !self.checks.is_empty() {
            let _ = writeln!(out, "\nchecks");
            let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &self.checks {
                let guard = c.guard.map(|g| format!(" for n >= {g}")).unwrap_or_default();
                let status = if c.passed { "PASS" } else { "FAIL" };
                let _ = write!(out, "  {status}  {:width$}  {}{guard} = {}", c.name, c.expression, c.display);
                if !c.passed {
                    let _ = write!(out, "   (expected {})", c.expected);
                }
                out.push('\n');
            }
        }
        if !self.tables.is_empty() {
            let _ = writeln!(out, "\ntables");
            for (name, t) in &self.tables {
                let _ = writeln!(out, "  {name}: {}", t.expression);
                for r in &t.rows {
                    let _ = writeln!(out, "    {} = {}: {}", t.variable, r.k, r.display);
                }
            }
        }
        if let Some(v) = &self.verdict {
            let d = &v.verdict;
            let _ = writeln!(out, "\nverdict {}", d.base);
            let _ = writeln!(out, "  polarization    {}", d.polarization);
            if let Some(b) = &d.boundary {
                let _ = writeln!(out, "  boundary        {b}");
            }
            let _ = writeln!(out, "  db_pair         {}", render_outcome(&d.db_pair));
            let _ = writeln!(out, "  db_space        {}", render_outcome(&d.db_space));
            match (&d.cartier_index, &d.index_error) {
                (Some(r), _) => {
                    let _ = writeln!(out, "  cartier_index   {} ({}*K ~ {}*M)", r.index, r.index, r.multiple);
                }
                (None, Some(e)) => {
                    let _ = writeln!(out, "  cartier_index   none: {e}");
                }
                _ => {}
            }
            for (name, c) in &d.certificates {
                let _ = writeln!(out, "  {name:16}{}   [{}]", truth_str(c.truth_value()), c.claim);
            }
            for u in d.db_pair.unresolved.iter().chain(&d.db_space.unresolved) {
                let _ = writeln!(out, "  unresolved      {u}");
            }
            for e in &v.expectations {
                let status = if e.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "  {status}  expect {} = {} (got {})", e.name, e.expected, e.actual);
            }
        }
        if !self.assumptions.is_empty() {
            let _ = writeln!(out, "\nassumptions");
            for a in &self.assumptions {
                let _ = writeln!(out, "  - {a}");
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count()
            + self.verdict.as_ref().map_or(0, |v| v.expectations.iter().filter(|e| !e.passed).count());
        if failed == 0 {
            let _ = writeln!(out, "\nresult: ok");
        } else {
            let _ = writeln!(out, "\nresult: {failed} expectation(s) failed");
        }
        out
    }
}

fn note_assumptions(into: &mut Vec<String>, extra: impl IntoIterator<Item = String>) {
    for a in extra {
        if !into.contains(&a) {
            into.push(a);
        }
    }
}

fn verdict_expectation(v: &Verdict, name: &str, lit: &Literal) -> (String, bool) {
    match name {
        "db_pair" | "db_space" => {
            let o = if name == "db_pair" { &v.db_pair } else { &v.db_space };
            let ok = match lit {
                Literal::Bool(b) => o.value == Some(*b),
                Literal::Unknown => o.value.is_none(),
                _ => false,
            };
            (truth_str(o.value).to_string(), ok)
        }
        "witness" => match &v.db_space.witness {
            Some(w) => {
                let items = witness_literal(w.i, w.n, &w.value);
                let ok = matches!(lit, Literal::Tuple(t) if *t == items);
                (Literal::Tuple(items).to_string(), ok)
            }
            None => ("none".to_string(), false),
        },
        "index" => match &v.cartier_index {
            Some(r) => {
                let ok = match lit {
                    Literal::Int(k) => r.index == *k,
                    Literal::Tuple(t) => t.as_slice() == [Literal::Int(r.index), Literal::Int(r.multiple)],
                    _ => false,
                };
                (r.index.to_string(), ok)
            }
            None => ("none".to_string(), false),
        },
        _ => ("unsupported".to_string(), false),
    }
}

/// Run the pipeline. Evaluation errors abort the run; failed expectations
/// are recorded in the report.
pub fn verify(sc: &Scenario, opts: &Options) -> Result<Report, ScenarioError> {
    if !sc.has_pipeline {
        return Err(ScenarioError::at(Pos { line: 1, col: 1 }, "scenario has no pipeline block"));
    }
    let nmax = opts.nmax.unwrap_or(sc.nmax);
    if nmax < 1 {
        return Err(ScenarioError::at(Pos { line: 1, col: 1 }, "nmax must be at least 1"));
    }
    let steps: Vec<String> = match &opts.only {
        Some(name) => {
            if !sc.step_names().contains(name) {
                return Err(ScenarioError::at(Pos { line: 1, col: 1 }, format!("no pipeline step named `{name}`")));
            }
            vec![name.clone()]
        }
        None if !sc.run.is_empty() => sc.run.clone(),
        None => sc.step_names(),
    };
    let mut report = Report {
        scenario: sc.name().to_string(),
        nmax,
        checks: Vec::new(),
        verdict: None,
        assumptions: vec![crate::cone::FAITHFUL_PRESENTATION.to_string()],
        tables: BTreeMap::new(),
    };
    for c in sc.checks.iter().filter(|c| steps.contains(&c.name)) {
        let ctx = Ctx { nmax, guard: c.guard.unwrap_or(1), ..Ctx::new(sc) };
        let v = ctx.eval(&c.expr)?;
        note_assumptions(&mut report.assumptions, v.assumptions());
        report.checks.push(CheckResult {
            name: c.name.clone(),
            expression: c.expr.to_string(),
            guard: c.guard,
            expected: c.expected.to_string(),
            value: v.to_json(sc),
            display: v.render(sc),
            passed: v.matches(&c.expected, sc),
            certificate: v.certificate().cloned(),
        });
    }
    for t in sc.tables.iter().filter(|t| steps.contains(&t.name)) {
        let mut rows = Vec::new();
        for k in t.from..=t.to {
            let ctx = Ctx { nmax, locals: vec![(t.var.clone(), k)], ..Ctx::new(sc) };
            let v = ctx.eval(&t.expr)?;
            note_assumptions(&mut report.assumptions, v.assumptions());
            rows.push(TableRow { k, value: v.to_json(sc), display: v.render(sc) });
        }
        report
            .tables
            .insert(t.name.clone(), TableReport { variable: t.var.clone(), expression: t.expr.to_string(), rows });
    }
    if let (Some(vd), true) = (&sc.verdict, steps.iter().any(|s| s == "verdict")) {
        let ctx = Ctx { nmax, ..Ctx::new(sc) };
        let pol_e = vd.polarization.as_ref().expect("validated at load");
        let pol = ctx.eval(pol_e)?;
        let boundary = match &vd.boundary {
            Some(b) => Some(ctx.eval(b)?),
            None => None,
        };
        let verdict = ctx.verdict(&vd.base, pol, boundary, vd.pos)?;
        note_assumptions(&mut report.assumptions, verdict.assumptions.iter().cloned());
        if let Some(w) = &verdict.db_space.witness {
            note_assumptions(&mut report.assumptions, w.certificate.assumptions());
        }
        let expectations = vd
            .expects
            .iter()
            .map(|(name, lit, _)| {
                let (actual, passed) = verdict_expectation(&verdict, name, lit);
                Expectation { name: name.clone(), expected: lit.to_string(), actual, passed }
            })
            .collect();
        report.verdict = Some(VerdictReport { verdict, expectations });
    }
    Ok(report)
}

/// Value and certificate tree for one expression, as printed by `explain`.
pub fn explain(sc: &Scenario, v: &Value) -> String {
    format!("{}\n{}", v.render(sc), v.explain(sc))
}
