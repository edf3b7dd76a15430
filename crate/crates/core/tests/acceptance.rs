//! One PASS/FAIL line per acceptance criterion. Expected values come from
//! the oracles in `common`, not from the engine's own rules.

mod common;

use std::process::{Command, ExitCode};

use common::*;
use conecheck::cert::HValue;
use conecheck::scenario::{eval_str, Scenario, Value};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&Scenario) -> Outcome);

fn eval(sc: &Scenario, src: &str, guard: i64) -> Result<Value, String> {
    eval_str(sc, src, guard).map_err(|e| format!("{src}: {e}"))
}

fn hvalue(sc: &Scenario, src: &str, guard: i64) -> Result<HValue, String> {
    match eval(sc, src, guard)? {
        Value::Count(h) => {
            h.certificate.check().map_err(|e| format!("{src}: certificate does not replay: {e}"))?;
            Ok(h.value)
        }
        Value::Int(f) => Ok(HValue::exact(f)),
        other => Err(format!("{src}: expected a count, got {other:?}")),
    }
}

fn number(sc: &Scenario, src: &str) -> Result<i64, String> {
    hvalue(sc, src, 1)?.as_number().ok_or_else(|| format!("{src}: not decided"))
}

fn truth(sc: &Scenario, src: &str) -> Result<Option<bool>, String> {
    match eval(sc, src, 1)? {
        Value::Truth(t, _) => Ok(t),
        other => Err(format!("{src}: expected a truth value, got {other:?}")),
    }
}

fn expect_eq(what: &str, got: i64, want: i64) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what} = {got}, expected {want}"))
    }
}

/// The value must be a single form that is zero for every `n ≥ guard`.
fn symbolic_zero(sc: &Scenario, src: &str, guard: i64) -> Result<(), String> {
    let v = hvalue(sc, src, guard)?;
    match v.form() {
        Some(f) if f.is_identically(0) && (!f.is_guarded() || f.n_lo <= guard) => Ok(()),
        _ => Err(format!("{src} for n >= {guard} is {v}, not symbolically 0")),
    }
}

fn intersections(sc: &Scenario) -> Outcome {
    let l = SClass { e: 1, a: 2, b: 0 };
    let e = SClass { e: 1, a: 0, b: 0 };
    let f = SClass { e: 0, a: 0, b: 1 };
    let pol = SClass { e: 5 * l.e - K_S.e, a: 5 * l.a - K_S.a, b: 5 * l.b - K_S.b };
    let cases = [
        ("intersect(L, L)", s_dot(l, l), 7),
        ("intersect(L, E)", s_dot(l, e), 3),
        ("intersect(L, f)", s_dot(l, f), 1),
        ("intersect(5*L - K_S, 5*L - K_S)", s_dot(pol, pol), 77),
    ];
    for (src, oracle, stated) in cases {
        expect_eq(&format!("oracle {src}"), oracle, stated)?;
        expect_eq(src, number(sc, src)?, oracle)?;
    }
    Ok("L^2 = 7, L.E = 3, L.f = 1, (5L - K_S)^2 = 77".into())
}

fn pushforward(sc: &Scenario) -> Outcome {
    for k in 0..=10 {
        let stated = (k + 1) + (k - 7).max(0);
        expect_eq(&format!("semigroup h0({k} g12)"), c_h0(k, 0), stated)?;
        expect_eq(&format!("h0(C, {k}*g12)"), number(sc, &format!("h0(C, {k}*g12)"))?, stated)?;
    }
    Ok("h0(C, k g12) = (k+1) + max(0, k-7) for k = 0..10".into())
}

fn theta(sc: &Scenario) -> Outcome {
    expect_eq("h0(B, Theta)", number(sc, "h0(B, Theta)")?, 0)?;
    expect_eq("h1(B, Theta)", number(sc, "h1(B, Theta)")?, 0)?;
    for n in 3..=10 {
        let h0 = number(sc, &format!("h0(B, {n}*Theta)"))?;
        expect_eq(&format!("h0(B, {n}*Theta)"), h0, b_h0(n, 0).unwrap())?;
        expect_eq(&format!("h0(B, {n}*Theta)"), h0, n - 1)?;
        expect_eq(&format!("h1(B, {n}*Theta)"), number(sc, &format!("h1(B, {n}*Theta)"))?, 0)?;
        if truth(sc, &format!("bpf(B, {n}*Theta)"))? != Some(true) {
            return Err(format!("|{n} Theta| not certified basepoint-free"));
        }
    }
    symbolic_zero(sc, "h1(B, n*Theta)", 3)?;
    Ok("h0 = h1 = 0 for Theta; h0(n Theta) = n - 1, h1 = 0, basepoint-free for n = 3..10".into())
}

fn surface_vanishing(sc: &Scenario) -> Outcome {
    for i in 1..=2 {
        symbolic_zero(sc, &format!("h{i}(S, 4*n*L - E)"), 1)?;
        for n in 1..=8 {
            let class = SClass { e: 4 * n - 1, a: 8 * n, b: 0 };
            let got = number(sc, &format!("h{i}(S, {}*L - E)", 4 * n))?;
            expect_eq(&format!("oracle h{i}(S, {}L - E)", 4 * n), s_h(class, i as usize), 0)?;
            expect_eq(&format!("h{i}(S, {}L - E)", 4 * n), got, 0)?;
        }
    }
    symbolic_zero(sc, "h2(S, K_S + (4*n - 5)*L - E)", 2)?;
    Ok("h1, h2(S, 4nL - E) = 0 for all n >= 1 with sweep n = 1..8; h2(K_S + (4n-5)L - E) = 0 for n >= 2".into())
}

fn witness(sc: &Scenario) -> Outcome {
    let four_l = SClass { e: 4, a: 8, b: 0 };
    expect_eq("h1(S, 4*L)", number(sc, "h1(S, 4*L)")?, s_h(four_l, 1))?;
    expect_eq("oracle h1(S, 4L)", s_h(four_l, 1), 1)?;
    let x1 = x_h(four_l, 4, 0, 1).unwrap();
    expect_eq("h1(X, (4*L, 4*Theta))", number(sc, "h1(X, (4*L, 4*Theta))")?, x1)?;
    expect_eq("oracle h1(X, (4L, 4Theta))", x1, 3)?;
    let sub = SClass { e: -3, a: 4, b: -1 };
    let a: Vec<i64> = (0..4).map(|n| x_h(sub, 1, 0, n).unwrap()).collect();
    let b: Vec<i64> = (0..4).map(|n| x_h(four_l, 4, 0, n).unwrap()).collect();
    let admissible = les_possible([a[0], a[1], a[2], a[3]], [b[0], b[1], b[2], b[3]]);
    if admissible.is_empty() || admissible.iter().any(|h| h[1] != 3) {
        return Err(format!("sequence oracle admits h1(T, M) in {admissible:?}"));
    }
    expect_eq("h1(T, M)", number(sc, "h1(T, M)")?, 3)?;
    Ok("h1(S, 4L) = 1, h1(X, (4L, 4Theta)) = 3, h1(T, M) = 3 forced by the sequence oracle".into())
}

fn base_locus(sc: &Scenario) -> Outcome {
    match eval(sc, "bs(5*L - K_S)", 1)? {
        Value::Text(t, _) if t == "{point(R1, E_inf)}" => {}
        other => return Err(format!("Bs|5L - K_S| = {}", other.render(sc))),
    }
    if truth(sc, "in_bs(5*L - K_S, R1, E_inf)")? != Some(true) {
        return Err("base point on E_inf not certified".into());
    }
    if truth(sc, "in_bs(5*L - K_S, R1, E)")? != Some(false) {
        return Err("base point not excluded from E".into());
    }
    let with_point = number(sc, "h0(C, 4*g12 + R1)")?;
    let without = number(sc, "h0(C, 4*g12)")?;
    expect_eq("h0(C, 4*g12 + R1)", with_point, c_h0(4, 1))?;
    expect_eq("h0(C, 4*g12)", without, 5)?;
    expect_eq("h0(C, 4*g12 + R1) - h0(C, 4*g12)", with_point - without, 0)?;
    Ok("Bs|5L - K_S| = {R1 on E_inf}, off E; h0(4g12 + R1) = h0(4g12) = 5".into())
}

fn hypersurface_vanishing(sc: &Scenario) -> Outcome {
    // T is a surface: the vanishing concerns i = 1, 2, and h3 is zero by dimension
    for i in 1..=3 {
        symbolic_zero(sc, &format!("h{i}(T, n*M - F)"), 1)?;
    }
    Ok("h^i(T, nM - F) = 0 for i >= 1 and all n >= 1".into())
}

fn canonical_index(sc: &Scenario) -> Outcome {
    if truth(sc, "equiv(4*K_T, 5*M)")? != Some(true) {
        return Err("4 K_T ~ 5 M not certified".into());
    }
    for m in 1..=3 {
        if truth(sc, &format!("in_span(T, M, {m})"))? != Some(false) {
            return Err(format!("index {m} not rejected"));
        }
    }
    let oracle = cartier_brute([5, 10, 0, 5, 0], [4, 8, 0, 4, 0], 6);
    match eval(sc, "cartier_index(T, M)", 1)? {
        Value::Index(r) if Some((r.index, r.multiple)) == oracle && r.index == 4 => {}
        other => return Err(format!("cartier_index = {}, brute force {oracle:?}", other.render(sc))),
    }
    Ok("4 K_T ~ 5 M, index 4, multiples 1..3 rejected".into())
}

fn run_cli(scenario: &str) -> Result<(Option<i32>, serde_json::Value), String> {
    let path = scenario_path(scenario);
    let out = Command::new(env!("CARGO_BIN_EXE_conecheck"))
        .args(["verify", path.to_str().unwrap(), "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    let json = serde_json::from_slice(&out.stdout).map_err(|e| format!("{scenario}: {e}"))?;
    Ok((out.status.code(), json))
}

fn end_to_end(sc: &Scenario) -> Outcome {
    let (code, report) = run_cli("paper.scenario")?;
    if code != Some(0) {
        return Err(format!("verify exited with {code:?}"));
    }
    let v = &report["verdict"];
    let witness = &v["db_space"]["witness"];
    let ok = v["db_pair"]["value"] == true
        && v["db_space"]["value"] == false
        && witness["i"] == 1
        && witness["n"] == 1
        && witness["value"]["value"] == 3
        && v["cartier_index"]["index"] == 4;
    if !ok {
        return Err(format!("verdict {v}"));
    }
    let certs = v["certificates"].as_array().cloned().unwrap_or_default();
    for name in ["connected", "smooth"] {
        let issued = certs.iter().any(|c| c[0] == name && c[1]["conclusion"]["value"] == true);
        if !issued {
            return Err(format!("{name} certificate missing"));
        }
    }
    let pol = SClass { e: 7, a: 4, b: 1 };
    let triple = 3 * s_dot(pol, pol) * 3;
    expect_eq("oracle (5L - K_S, 3Theta)^3", triple, 693)?;
    let src = "intersect((5*L - K_S, 3*Theta), (5*L - K_S, 3*Theta), (5*L - K_S, 3*Theta))";
    expect_eq("(5L - K_S, 3Theta)^3", number(sc, src)?, triple)?;
    Ok("exit 0; db_pair true, db_space false with witness (1, 1, 3), index 4; triple product 693".into())
}

fn properties(sc: &Scenario) -> Outcome {
    let src = std::fs::read_to_string(scenario_path("paper.scenario")).map_err(|e| e.to_string())?;
    let mut failed = Vec::new();
    let suites = props::all_suites(sc, &src, props::CASES);
    for (name, r) in &suites {
        if let Err(e) = r {
            failed.push(format!("{name}: {e}"));
        }
    }
    let four_l = SClass { e: 4, a: 8, b: 0 };
    let chi = match eval(sc, "chi(S, 4*L)", 1)? {
        Value::Int(f) => f.as_constant(),
        Value::Count(h) => h.value.as_number(),
        _ => None,
    };
    if chi != Some(s_chi(four_l)) || s_chi(four_l) != 40 {
        failed.push(format!("chi(S, 4L) = {chi:?}"));
    }
    if failed.is_empty() {
        Ok(format!("{} suites x {} cases; chi(S, 4L) = 40 both ways", suites.len(), props::CASES))
    } else {
        Err(failed.join("; "))
    }
}

fn negative_control(_: &Scenario) -> Outcome {
    let (code, report) = run_cli("odd_theta.scenario")?;
    if code != Some(1) {
        return Err(format!("odd theta scenario exited with {code:?}"));
    }
    let v = &report["verdict"];
    if v["db_pair"]["value"] != false || v["db_pair"]["witness"].is_null() {
        return Err(format!("no db_pair witness reported: {}", v["db_pair"]));
    }
    let w = &v["db_pair"]["witness"];
    Ok(format!("exit 1; db_pair false with witness h{} at n = {}", w["i"], w["n"]))
}

fn main() -> ExitCode {
    let sc = paper();
    let criteria: [Criterion; 11] = [
        ("intersection numbers", intersections),
        ("pushforward structure", pushforward),
        ("theta characteristic suite", theta),
        ("surface vanishing, symbolic", surface_vanishing),
        ("non-vanishing witness", witness),
        ("base locus", base_locus),
        ("hypersurface vanishing, symbolic", hypersurface_vanishing),
        ("canonical relation and index", canonical_index),
        ("end-to-end verdict", end_to_end),
        ("property suites", properties),
        ("negative control", negative_control),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f(&sc) {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(e) => {
                all = false;
                println!("criterion {}: FAIL {name}: {e}", i + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
