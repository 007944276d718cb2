#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slugflow::admissibility::{line_roots, ShockData};
use slugflow::ModelPair;

/// Reference model: full Jouguet regime.
pub fn rm1() -> ModelPair {
    ModelPair::reference()
}

/// Exactly one sign change of the Jouguet sign condition (near ζ ≈ 0.17).
pub fn rm_one_change() -> ModelPair {
    ModelPair::new(1.0, 0.5, 5.0, 2.0).unwrap()
}

/// Two sign changes: holds near 0 and 1, fails in between.
pub fn rm_two_changes() -> ModelPair {
    ModelPair::new(1.0, 0.5, 3.0, 2.0).unwrap()
}

/// Randomised Corey/Langmuir models inside the supported parameter box.
pub fn random_models(n: usize, seed: u64) -> Vec<ModelPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            ModelPair::new(
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.2..2.0),
                rng.gen_range(0.5..4.0),
                rng.gen_range(0.3..3.0),
            )
            .unwrap()
        })
        .collect()
}

/// Slope of the tangent from `(-d, 0)` to `f(·, c)`, by bisection on the
/// tangency condition `f_s (s + d) = f` over the concave branch.
pub fn tangent_from(model: &ModelPair, c: f64, d: f64) -> (f64, f64) {
    let fl = &model.fluid;
    let g = |s: f64| fl.f_s(s, c) * (s + d) - fl.f(s, c);
    let mut lo = fl.inflection(c).unwrap();
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    (s, fl.f_s(s, c))
}

/// Constant-injection chemical front (c: 1 → 0), computed in original
/// coordinates: tangent state behind, smaller line root ahead.
pub fn oa_shock(model: &ModelPair) -> ShockData {
    let d1 = model.ads.a(1.0);
    let (sm, v) = tangent_from(model, 1.0, d1);
    let sp = line_roots(model, 0.0, v, d1)[0];
    ShockData::new(sm, sp, 1.0, 0.0, v).unwrap()
}

pub struct RandomShock {
    pub shock: ShockData,
    pub expect_admissible: bool,
    pub label: String,
}

/// Rankine–Hugoniot-consistent shocks for a model; s-shocks and c-shocks in
/// all index pairings, plus concentration-increasing ones. Near-degenerate
/// critical points (|eigenvalue| < 1e-2) are skipped so the fixed-step oracle
/// converges within its budget.
pub fn random_shock_suite(model: &ModelPair, n: usize, seed: u64) -> Vec<RandomShock> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fl = &model.fluid;
    let mut out = Vec::new();
    while out.len() < n {
        let kind = out.len() % 3;
        if kind == 0 {
            let c: f64 = rng.gen_range(0.0..1.0);
            let sm: f64 = rng.gen_range(0.02..1.0);
            let sp: f64 = rng.gen_range(0.0..1.0);
            if (sm - sp).abs() < 0.02 {
                continue;
            }
            let sh = ShockData::s_shock(model, sm, sp, c).unwrap();
            let (lm, lp) = (fl.f_s(sm, c) - sh.v, fl.f_s(sp, c) - sh.v);
            if lm.abs() < 1e-2 || lp.abs() < 1e-2 {
                continue;
            }
            // Oleinik by dense sampling, independent of the library routine
            let dir = (sp - sm).signum();
            let fm = fl.f(sm, c);
            let ok = (1..2000).all(|k| {
                let s = sm + (sp - sm) * k as f64 / 2000.0;
                (fl.f(s, c) - fm - sh.v * (s - sm)) * dir > 0.0
            });
            out.push(RandomShock {
                shock: sh,
                expect_admissible: ok,
                label: format!("s-shock c={c:.3} {sm:.3}->{sp:.3}"),
            });
        } else {
            let cm: f64 = rng.gen_range(0.2..1.0);
            let cp: f64 = rng.gen_range(0.0..cm - 0.1);
            let d1 = (model.ads.a(cm) - model.ads.a(cp)) / (cm - cp);
            let vmin = 1.0 / (1.0 + d1);
            let vmax = tangent_from(model, cm, d1).1.min(tangent_from(model, cp, d1).1);
            if vmax - vmin < 1e-2 {
                continue;
            }
            let v = rng.gen_range(vmin + 0.05 * (vmax - vmin)..vmax - 0.05 * (vmax - vmin));
            let rm = line_roots(model, cm, v, d1);
            let rp = line_roots(model, cp, v, d1);
            if rm.len() != 2 || rp.len() != 2 {
                continue;
            }
            let (i, j) = (rng.gen_range(0..2), rng.gen_range(0..2));
            let (sm, sp) = (rm[i], rp[j]);
            let bad_eig = (fl.f_s(sm, cm) - v).abs() < 1e-2 || (fl.f_s(sp, cp) - v).abs() < 1e-2;
            if bad_eig {
                continue;
            }
            if kind == 2 && rng.gen_bool(0.25) {
                // reversed concentrations: same critical points, c increasing
                let sh = ShockData::new(sp, sm, cp, cm, v).unwrap();
                out.push(RandomShock {
                    shock: sh,
                    expect_admissible: false,
                    label: format!("c-increasing {cp:.3}->{cm:.3}"),
                });
                continue;
            }
            let sh = ShockData::new(sm, sp, cm, cp, v).unwrap();
            out.push(RandomShock {
                shock: sh,
                expect_admissible: !(i == 1 && j == 0),
                label: format!("c-shock u{}- -> u{}+ c {cm:.3}->{cp:.3} v={v:.4}", i + 1, j + 1),
            });
        }
    }
    out
}
