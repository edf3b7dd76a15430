//! Property suites over random classes on the bundled scenario's models. Each suite
//! runs a deterministic proptest runner and reports the first failure.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use conecheck::cert::{Certificate, HValue};
use conecheck::cone::{self, PolarizedBase};
use conecheck::curve::DivisorClass;
use conecheck::linear::LinearForm;
use conecheck::product::{ProductClass, RestrictedClass};
use conecheck::scenario::{parse_expr, parse_scenario, Scenario};
use conecheck::surface::SurfaceClass;

use super::*;

pub const CASES: u32 = 256;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn num(v: &HValue) -> Option<i64> {
    v.as_number()
}

fn c_class(a: i64, b: i64) -> DivisorClass {
    DivisorClass::constant(vec![a, b])
}

fn b_class(t: i64, p: i64) -> DivisorClass {
    DivisorClass::constant(vec![t, p])
}

fn s_class(sc: &Scenario, d: SClass) -> SurfaceClass {
    sc.surfaces["S"].class(d.e, c_class(d.a, d.b))
}

fn c_strategy() -> impl Strategy<Value = (i64, i64)> {
    (-8i64..16, -12i64..12)
}

fn b_strategy() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..8, -6i64..8)
}

fn s_strategy() -> impl Strategy<Value = SClass> {
    (-7i64..7, -6i64..12, -6i64..6).prop_map(|(e, a, b)| SClass { e, a, b })
}

/// `hⁱ(D) = h^{1−i}(K − D)` on both curves, `hⁱ(D) = h^{2−i}(K − D)` on `S`,
/// and dualizing twice returns the original class.
pub fn serre_duality(sc: &Scenario, cases: u32) -> Result<(), String> {
    let c = &sc.curves["C"];
    let b = &sc.curves["B"];
    let s = &sc.surfaces["S"];
    run(cases, (c_strategy(), b_strategy(), s_strategy()), |((ca, cb), (bt, bp), d)| {
        for (curve, class) in [(c, c_class(ca, cb)), (b, b_class(bt, bp))] {
            let dual = curve.serre_dual(&class);
            prop_assert_eq!(curve.is_equivalent(&curve.serre_dual(&dual), &class), Some(true));
            prop_assert_eq!(curve.h0(&class).value, curve.h1(&dual).value);
            prop_assert_eq!(curve.h1(&class).value, curve.h0(&dual).value);
        }
        let x = s_class(sc, d);
        let kx = &s.canonical_class() - &x;
        for i in 0..=2 {
            let (l, r) = (s.h(&x, i).value, s.h(&kx, 2 - i).value);
            if l.is_known() && r.is_known() {
                prop_assert_eq!(l, r, "h{}({:?})", i, d);
            }
        }
        Ok(())
    })
}

/// `h⁰ − h¹ = deg − g + 1` on `C` and `B`, values equal to the oracles; on
/// `S` the engine's χ, the alternating sum of its `hⁱ`, the oracle `hⁱ`
/// and `χ(O_S) + D(D − K)/2` all coincide.
pub fn riemann_roch(sc: &Scenario, cases: u32) -> Result<(), String> {
    let c = &sc.curves["C"];
    let b = &sc.curves["B"];
    let s = &sc.surfaces["S"];
    run(cases, (c_strategy(), b_strategy(), s_strategy()), |((ca, cb), (bt, bp), d)| {
        let x = c_class(ca, cb);
        let (h0, h1) = (num(&c.h0(&x).value), num(&c.h1(&x).value));
        prop_assert_eq!(h0, Some(c_h0(ca, cb)), "h0(C, {}*g12 + {}*R1)", ca, cb);
        prop_assert_eq!(h1, Some(c_h1(ca, cb)));
        prop_assert_eq!(c.chi(&x).as_constant(), Some(2 * ca + cb - GENUS_C + 1));

        let y = b_class(bt, bp);
        if let (Some(h0), Some(h1)) = (num(&b.h0(&y).value), num(&b.h1(&y).value)) {
            prop_assert_eq!(h0 - h1, bt + bp - GENUS_B + 1);
            if let Some(o) = b_h0(bt, bp) {
                prop_assert_eq!(h0, o);
            }
        }

        let z = s_class(sc, d);
        let chi = s.chi(&z).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(chi.as_constant(), Some(s_chi(d)), "chi({:?})", d);
        let hs: Vec<Option<i64>> = (0..=2).map(|i| num(&s.h(&z, i).value)).collect();
        for (i, h) in hs.iter().enumerate() {
            if let Some(h) = h {
                prop_assert_eq!(*h, s_h(d, i), "h{}(S, {:?})", i, d);
            }
        }
        if let [Some(h0), Some(h1), Some(h2)] = hs.as_slice() {
            prop_assert_eq!(h0 - h1 + h2, s_chi(d));
        }
        Ok(())
    })
}

/// `χ(X, (D₁, D₂)) = χ(S, D₁)·χ(B, D₂)`, and the Künneth values agree with
/// the oracle where the genus-2 data decide them.
pub fn kunneth(sc: &Scenario, cases: u32) -> Result<(), String> {
    let x = &sc.products["X"];
    run(cases, (s_strategy(), b_strategy()), |(d, (t, p))| {
        let class = ProductClass::new(s_class(sc, d), b_class(t, p));
        let chi = x.chi(&class).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(chi.as_constant(), Some(s_chi(d) * (t + p - GENUS_B + 1)));
        let hs: Vec<Option<i64>> = (0..=3).map(|n| num(&x.h(&class, n).value)).collect();
        for (n, h) in hs.iter().enumerate() {
            if let (Some(h), Some(o)) = (h, x_h(d, t, p, n)) {
                prop_assert_eq!(*h, o, "h{}(X, {:?}, {}Θ + {}P)", n, d, t, p);
            }
        }
        if hs.iter().all(Option::is_some) {
            let alt: i64 = hs.iter().enumerate().map(|(n, h)| if n % 2 == 0 { h.unwrap() } else { -h.unwrap() }).sum();
            prop_assert_eq!(alt, s_chi(d) * (t + p - GENUS_B + 1));
        }
        Ok(())
    })
}

/// Adding multiples of the relation `2R₁ − g¹₂` changes no answer.
pub fn relation_invariance(sc: &Scenario, cases: u32) -> Result<(), String> {
    let c = &sc.curves["C"];
    let s = &sc.surfaces["S"];
    let t = &sc.hypersurfaces["T"];
    let rel = c_class(-1, 2);
    let strategy = (c_strategy(), s_strategy(), s_strategy(), -4i64..5, -3i64..4, -2i64..5);
    run(cases, strategy, |((ca, cb), d, d2, k, theta, p)| {
        let x = c_class(ca, cb);
        let y = &x + &rel.scale(k);
        prop_assert_eq!(c.h0(&x).value, c.h0(&y).value);
        prop_assert_eq!(c.h1(&x).value, c.h1(&y).value);
        prop_assert_eq!(c.degree(&x), c.degree(&y));
        prop_assert_eq!(c.is_basepoint_free(&x).truth_value(), c.is_basepoint_free(&y).truth_value());
        prop_assert_eq!(c.is_equivalent(&x, &y), Some(true));

        let u = s_class(sc, d);
        let v = &u + &s.pullback(&rel.scale(k));
        let w = s_class(sc, d2);
        for i in 0..=2 {
            prop_assert_eq!(s.h(&u, i).value, s.h(&v, i).value);
        }
        prop_assert_eq!(s.intersect(&u, &w).ok(), s.intersect(&v, &w).ok());
        prop_assert_eq!(s.is_equivalent(&u, &v), Some(true));

        let g = RestrictedClass(ProductClass::new(u, b_class(theta, p)));
        let g2 = RestrictedClass(ProductClass::new(v, b_class(theta, p)));
        for i in 0..=2 {
            prop_assert_eq!(t.h(&g, i).value, t.h(&g2, i).value);
        }
        prop_assert_eq!(t.is_equivalent(&g, &g2).ok(), Some(Some(true)));
        Ok(())
    })
}

fn replay(c: &Certificate) -> Result<(), TestCaseError> {
    c.check().map_err(|e| TestCaseError::fail(format!("{}: {e}", c.claim)))
}

/// Every certificate re-checks locally, and evaluating twice gives the
/// same tree, byte for byte.
pub fn certificate_replay(sc: &Scenario, cases: u32) -> Result<(), String> {
    let c = &sc.curves["C"];
    let b = &sc.curves["B"];
    let s = &sc.surfaces["S"];
    let t = &sc.hypersurfaces["T"];
    run(cases, (c_strategy(), b_strategy(), s_strategy()), |((ca, cb), (bt, bp), d)| {
        let certs = |_: ()| -> Vec<Certificate> {
            let x = c_class(ca, cb);
            let y = b_class(bt, bp);
            let z = s_class(sc, d);
            let g = RestrictedClass(ProductClass::new(z.clone(), y.clone()));
            vec![
                c.h0(&x).certificate,
                c.h1(&x).certificate,
                c.is_basepoint_free(&x).clone(),
                c.base_locus(&x).1,
                b.h0(&y).certificate,
                b.is_basepoint_free(&y),
                s.h(&z, 0).certificate,
                s.h(&z, 1).certificate,
                s.h(&z, 2).certificate,
                t.h(&g, 1).certificate,
                t.h(&g, 2).certificate,
            ]
        };
        let first = certs(());
        let second = certs(());
        prop_assert_eq!(&first, &second);
        for cert in &first {
            replay(cert)?;
            let a = serde_json::to_string(cert).unwrap();
            let b = serde_json::to_string(second.iter().find(|c| c.claim == cert.claim).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
        Ok(())
    })
}

/// A symbolic value for `n ≥ g` must agree with direct evaluation at every
/// `n` from the guard boundary on, and with the oracle.
pub fn symbolic_vs_sweep(sc: &Scenario, cases: u32) -> Result<(), String> {
    let s = &sc.surfaces["S"];
    let c = &sc.curves["C"];
    let t = &sc.hypersurfaces["T"];
    let strategy = (s_strategy(), (0i64..4, -2i64..6, -2i64..3), 1i64..4, (-3i64..6, -4i64..4), 0i64..3);
    run(cases, strategy, |(base, (se, sa, sb), guard, (ca, cb), tk)| {
        let step = SClass { e: se, a: sa, b: sb };
        let param = LinearForm::param(guard);
        // surface family base + n·step
        let fam = &s_class(sc, base).with_guard(guard) + &s_class(sc, step).scale_form(&param).unwrap();
        for i in 0..=2 {
            let h = cone::resolve_family(s, &fam, i, guard, 8);
            replay(&h.certificate)?;
            if let Some(f) = h.value.form() {
                for n in guard..guard + 6 {
                    let at = SClass { e: base.e + n * se, a: base.a + n * sa, b: base.b + n * sb };
                    let direct = s.h(&s.at(&fam, n), i).value;
                    if let Some(v) = direct.as_number() {
                        prop_assert_eq!(v, f.value_at(n), "h{} at n = {} of {:?} + n{:?}", i, n, base, step);
                    }
                    prop_assert_eq!(f.value_at(n), s_h(at, i), "oracle h{} at n = {}", i, n);
                }
            }
        }
        // curve family (ca g12 + cb R1) + n g12
        let cf = &c_class(ca, cb).with_guard(guard) + &c_class(1, 0).scale_form(&param).unwrap();
        for i in 0..=1 {
            let h = cone::resolve_family(c, &cf, i, guard, 8);
            replay(&h.certificate)?;
            if let Some(f) = h.value.form() {
                for n in guard..guard + 6 {
                    prop_assert_eq!(f.value_at(n), c_h(ca + n, cb, i));
                }
            }
        }
        // hypersurface family n·M − F twisted by a small class
        let m = ProductClass::new(s_class(sc, SClass { e: 4, a: 8, b: 0 }), b_class(4, 0));
        let extra = ProductClass::new(s_class(sc, SClass { e: -1, a: tk, b: 0 }), b_class(0, 0));
        let tf = RestrictedClass(&m.scale_form(&param).unwrap() + &extra.with_guard(guard));
        for i in 1..=2 {
            let h = cone::resolve_family(t, &tf, i, guard, 8);
            replay(&h.certificate)?;
            if let Some(f) = h.value.form() {
                for n in guard..guard + 4 {
                    let direct = t.h(&t.at(&tf, n), i).value;
                    if let Some(v) = direct.as_number() {
                        prop_assert_eq!(v, f.value_at(n));
                    }
                }
            }
        }
        Ok(())
    })
}

const IDENTS: [&str; 12] = ["L", "E", "f", "K_S", "g12", "R1", "Theta", "P", "M", "F", "S", "T"];
const FUNCS: [&str; 8] = ["h0", "h1", "h2", "chi", "deg", "intersect", "bpf", "restrict"];

fn expr_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0i64..50).prop_map(|k| k.to_string()),
        proptest::sample::select(IDENTS.to_vec()).prop_map(str::to_string),
        Just("n".to_string()),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} + {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*{b}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}, {b})")),
            (proptest::sample::select(FUNCS.to_vec()), proptest::collection::vec(inner, 1..3))
                .prop_map(|(f, args)| format!("{f}({})", args.join(", "))),
        ]
    })
}

/// Every string parses or yields a diagnostic positioned inside the input;
/// evaluation of parsed expressions never panics; printing is a fixed
/// point after one normalization.
pub fn parser_totality(sc: &Scenario, cases: u32) -> Result<(), String> {
    let noise = "[ -~]{0,40}";
    run(cases, (noise, expr_strategy()), |(raw, built)| {
        match parse_expr(&raw) {
            Ok(e) => {
                let once = e.to_string();
                prop_assert_eq!(parse_expr(&once).map(|e| e.to_string()), Ok(once));
            }
            Err(err) => {
                prop_assert_eq!(err.line, 1);
                prop_assert!(err.col >= 1 && err.col <= raw.chars().count() + 1, "col {} for {:?}", err.col, raw);
            }
        }
        let e = parse_expr(&built).map_err(|e| TestCaseError::fail(format!("{built}: {e}")))?;
        let once = e.to_string();
        let twice = parse_expr(&once).unwrap().to_string();
        prop_assert_eq!(&once, &twice);
        let _ = conecheck::scenario::eval_str(sc, &built, 1);
        let lines: Vec<&str> = raw.split(';').collect();
        let text = format!("scenario fuzz\n{}\n", lines.join("\n"));
        if let Err(err) = parse_scenario(&text) {
            prop_assert!(err.line >= 1 && err.line <= text.lines().count() + 1);
        }
        Ok(())
    })
}

/// Deleting any one line of the paper scenario either still loads or is
/// rejected with a positioned diagnostic, and the normalized form of the
/// file is a fixed point.
pub fn scenario_round_trip(src: &str, cases: u32) -> Result<(), String> {
    let ast = parse_scenario(src).map_err(|e| e.to_string())?;
    let once = ast.to_string();
    let twice = parse_scenario(&once).map_err(|e| e.to_string())?.to_string();
    if once != twice {
        return Err("normalized scenario is not a fixed point".into());
    }
    let lines: Vec<&str> = src.lines().collect();
    run(cases, 0..lines.len(), |drop| {
        let text: Vec<&str> = lines.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, l)| *l).collect();
        let text = text.join("\n");
        if let Err(e) = conecheck::scenario::load_str(&text) {
            prop_assert!(e.line >= 1 && e.line <= lines.len(), "line {} for dropped line {}", e.line, drop + 1);
        }
        Ok(())
    })
}

pub fn all_suites(sc: &Scenario, src: &str, cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("serre duality involution", serre_duality(sc, cases)),
        ("riemann-roch on curves and surface", riemann_roch(sc, cases)),
        ("kunneth chi multiplicativity", kunneth(sc, cases)),
        ("relation invariance", relation_invariance(sc, cases)),
        ("certificate replay determinism", certificate_replay(sc, cases)),
        ("symbolic vs sweep", symbolic_vs_sweep(sc, cases)),
        ("parser totality and round trip", parser_totality(sc, cases)),
        ("scenario round trip", scenario_round_trip(src, cases)),
    ]
}
