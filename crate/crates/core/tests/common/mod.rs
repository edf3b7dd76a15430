//! Independent oracles and property suites shared by the integration tests
//! and the acceptance harness. Nothing here calls the engine's rule chain
//! to produce an expected value.

#![allow(dead_code)]

pub mod props;

use std::collections::BTreeSet;
use std::path::PathBuf;

use conecheck::scenario::{load_file, Scenario};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn paper() -> Scenario {
    load_file(&scenario_path("paper.scenario")).expect("paper scenario loads")
}

pub const GENUS_C: i64 = 7;
pub const GENUS_B: i64 = 2;

/// `h⁰(C, d·R₁)` from the Weierstrass semigroup `⟨2, 2g+1⟩` at `R₁`.
pub fn semigroup_h0(d: i64) -> i64 {
    if d < 0 {
        return 0;
    }
    (0..=d).filter(|s| s % 2 == 0 || *s > 2 * GENUS_C).count() as i64
}

/// On `C` every named class is a multiple of `R₁` since `g¹₂ ∼ 2R₁`.
pub fn c_h0(a: i64, b: i64) -> i64 {
    semigroup_h0(2 * a + b)
}

pub fn c_h1(a: i64, b: i64) -> i64 {
    c_h0(a, b) - (2 * a + b - GENUS_C + 1)
}

pub fn c_h(a: i64, b: i64, i: usize) -> i64 {
    match i {
        0 => c_h0(a, b),
        1 => c_h1(a, b),
        _ => 0,
    }
}

/// `h⁰(B, t·Θ + p·P)` for an even theta characteristic `Θ` and a point `P`
/// with no relation between them; `None` where the data do not decide it.
pub fn b_h0(t: i64, p: i64) -> Option<i64> {
    let d = t + p;
    match d {
        d if d < 0 => Some(0),
        0 => Some(i64::from(t == 0 && p == 0)),
        1 => match (t, p) {
            (1, 0) => Some(0),
            (0, 1) => Some(1),
            (2, -1) => Some(1),
            _ => None,
        },
        2 => Some(if (t, p) == (2, 0) { 2 } else { 1 }),
        d => Some(d - GENUS_B + 1),
    }
}

pub fn b_h(t: i64, p: i64, i: usize) -> Option<i64> {
    match i {
        0 => b_h0(t, p),
        1 => b_h0(t, p).map(|h| h - (t + p - GENUS_B + 1)),
        _ => Some(0),
    }
}

/// A class `e·E + π*(a·g¹₂ + b·R₁)` on the ruled surface over `C` with
/// twist `A = R₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SClass {
    pub e: i64,
    pub a: i64,
    pub b: i64,
}

impl SClass {
    pub fn deg(&self) -> i64 {
        2 * self.a + self.b
    }
}

pub const K_S: SClass = SClass { e: -2, a: 6, b: -1 };

/// `E² = −deg A = −1`, `E·f = 1`, `f² = 0`.
pub fn s_dot(x: SClass, y: SClass) -> i64 {
    -x.e * y.e + x.e * y.deg() + y.e * x.deg()
}

/// `χ(O_S) + D·(D − K)/2` with `χ(O_S) = 1 − g`.
pub fn s_chi(d: SClass) -> i64 {
    let dk = SClass { e: d.e - K_S.e, a: d.a - K_S.a, b: d.b - K_S.b };
    (1 - GENUS_C) + s_dot(d, dk) / 2
}

/// `hⁱ(S, D)` from `π_*O(D) = ⊕_{k=0}^{e} O_C(D₀ − kA)` and Serre duality.
pub fn s_h(d: SClass, i: usize) -> i64 {
    if d.e >= 0 {
        if i == 2 {
            return 0;
        }
        return (0..=d.e).map(|k| c_h(d.a, d.b - k, i)).sum();
    }
    if d.e == -1 {
        return 0;
    }
    let dual = SClass { e: K_S.e - d.e, a: K_S.a - d.a, b: K_S.b - d.b };
    s_h(dual, 2 - i)
}

/// `hⁿ(S × B, (D₁, t·Θ + p·P))` by Künneth.
pub fn x_h(s: SClass, t: i64, p: i64, n: usize) -> Option<i64> {
    let mut total = 0;
    for i in 0..=2usize {
        if n < i || n - i > 1 {
            continue;
        }
        total += s_h(s, i) * b_h(t, p, n - i)?;
    }
    Some(total)
}

/// Every `hⁱ(T)` compatible with exactness of the long exact sequence of
/// `0 → A → B → O_T(G) → 0` on a threefold, by enumerating map ranks.
/// Returns the set of admissible `(h⁰, h¹, h²)`.
pub fn les_possible(a: [i64; 4], b: [i64; 4]) -> BTreeSet<[i64; 3]> {
    let mut out = BTreeSet::new();
    // alpha[i] = rank(Hⁱ(A) → Hⁱ(B)); H⁰(A) injects and H³(B) is hit.
    let ranges: Vec<Vec<i64>> = (0..4).map(|i| (0..=a[i].min(b[i])).collect()).collect();
    for &r0 in &ranges[0] {
        for &r1 in &ranges[1] {
            for &r2 in &ranges[2] {
                for &r3 in &ranges[3] {
                    let alpha = [r0, r1, r2, r3];
                    if alpha[0] != a[0] || alpha[3] != b[3] {
                        continue;
                    }
                    // delta[i] = rank(Hⁱ(T) → Hⁱ⁺¹(A)) = a[i+1] − alpha[i+1]
                    let delta: Vec<i64> = (0..3).map(|i| a[i + 1] - alpha[i + 1]).collect();
                    let beta: Vec<i64> = (0..3).map(|i| b[i] - alpha[i]).collect();
                    out.insert([beta[0] + delta[0], beta[1] + delta[1], beta[2] + delta[2]]);
                }
            }
        }
    }
    out
}

/// Flat class on `X` as `(e, a, b, t, p)`: surface part then `B` part.
pub type Flat = [i64; 5];

/// Membership in the relation lattice of `X`, spanned by `2R₁ − g¹₂`.
pub fn x_relation(v: Flat) -> bool {
    v[0] == 0 && v[3] == 0 && v[4] == 0 && v[1] == -v[2] / 2 && v[2] % 2 == 0
}

/// Smallest `m` with `m·K ∈ ℤ·M + Λ`, by search; returns `(m, s)` with
/// `m·K ∼ s·M`.
pub fn cartier_brute(k: Flat, m: Flat, bound: i64) -> Option<(i64, i64)> {
    for mult in 1..=bound {
        for s in -bound * 10..=bound * 10 {
            let v: Vec<i64> = (0..5).map(|j| mult * k[j] - s * m[j]).collect();
            if x_relation([v[0], v[1], v[2], v[3], v[4]]) {
                return Some((mult, s));
            }
        }
    }
    None
}
