mod common;

use common::*;
use proptest::prelude::*;
use slugflow::fv::*;
use slugflow::transform::GridField;
use slugflow::Error;

fn uniform(s: f64, c: f64) -> FvConfig {
    FvConfig {
        eps: 1e-2,
        dx: 0.02,
        cfl: 0.4,
        length: 1.0,
        t_final: 0.5,
        snapshots: 1,
        t_inj: 10.0,
        c_inj: c,
        s_inlet: s,
        s_init: s,
        c_init: c,
    }
}

#[test]
fn constant_state_is_preserved_exactly() {
    let model = rm1();
    for (s, c) in [(0.3, 0.0), (0.6, 0.4)] {
        let mut st = FvState::new(&model, &uniform(s, c)).unwrap();
        let (s0, m0) = (st.s.clone(), st.m.clone());
        for _ in 0..200 {
            let dt = st.stable_dt();
            st.step(dt).unwrap();
            assert_eq!(st.s, s0);
            assert_eq!(st.m, m0);
            assert!(st.c.iter().all(|&v| (v - c).abs() < 1e-14));
        }
    }
}

/// Position where `s` first drops below `level`, linearly interpolated.
fn front_at(xs: &[f64], s: &[f64], level: f64) -> f64 {
    let k = s.iter().position(|&v| v < level).unwrap();
    let (x0, x1, s0, s1) = (xs[k - 1], xs[k], s[k - 1], s[k]);
    x0 + (s0 - level) / (s0 - s1) * (x1 - x0)
}

#[test]
fn buckley_leverett_front_speed() {
    let model = rm1();
    let mut cfg = FvConfig::slug(1e-4, 1.0 / 2000.0, 1.5, 0.8, 0.0);
    cfg.c_inj = 0.0;
    cfg.snapshots = 2;
    let g = run_fv(&model, &cfg).unwrap();
    assert!(g.c.iter().all(|&c| c == 0.0));
    // level half-way up the shock s* = 1/√2
    let level = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
    let row = |j: usize| &g.s[j * g.nx()..(j + 1) * g.nx()];
    let (x1, x2) = (front_at(&g.xs, row(1), level), front_at(&g.xs, row(2), level));
    let speed = (x2 - x1) / (g.ts[2] - g.ts[1]);
    let exact = 0.5 * (1.0 + std::f64::consts::SQRT_2);
    assert!((speed - exact).abs() < 0.02 * exact, "{speed}");
}

#[test]
fn discrete_conservation() {
    let model = rm1();
    let cfg = FvConfig::slug(5e-3, 5e-3, 1.0, 1.0, 0.3);
    let mut st = FvState::new(&model, &cfg).unwrap();
    let mut steps = 0;
    while st.t < 1.0 {
        let dt = st.stable_dt().min(if st.t < 0.3 { 0.3 - st.t } else { 1.0 });
        let before = st.totals();
        let bf = st.step(dt).unwrap();
        let after = st.totals();
        for k in 0..2 {
            let expect = dt * (bf.inlet[k] - bf.outlet[k]);
            let scale = before[k].abs() + after[k].abs() + 1.0;
            assert!((after[k] - before[k] - expect).abs() < 1e-13 * scale, "step {steps}, component {k}");
        }
        assert!(st.c.iter().all(|c| (0.0..=1.0).contains(c)));
        steps += 1;
    }
    assert!(steps > 100);
}

#[test]
fn stability_violations_are_reported() {
    let model = rm1();
    let mut cfg = FvConfig::slug(1e-3, 1e-3, 1.0, 1.0, 0.5);
    cfg.cfl = 0.5;
    assert!(matches!(FvState::new(&model, &cfg), Err(Error::Cfl(_))));
    assert!(matches!(run_fv(&model, &cfg), Err(Error::Cfl(_))));
    cfg.cfl = 0.4;
    let mut st = FvState::new(&model, &cfg).unwrap();
    let dt = st.stable_dt();
    assert!(matches!(st.step(2.0 * dt), Err(Error::Cfl(_))));
    st.step(dt).unwrap();
}

#[test]
fn c_recovery_rejects_impossible_mass() {
    let model = rm1();
    assert!(recover_c(&model, 0.5, -0.1, 0.5).is_err());
    assert!(recover_c(&model, 0.5, 0.5 + model.ads.a(1.0) + 0.1, 0.5).is_err());
    // empty cell: a(c) = m alone
    let c = recover_c(&model, 0.0, model.ads.a(0.37), 0.0).unwrap();
    assert!((c - 0.37).abs() < 1e-14);
}

proptest! {
    #[test]
    fn c_recovery_round_trip(s in 0.0f64..1.0, c in 0.0f64..1.0, guess in 0.0f64..1.0) {
        let model = rm1();
        let m = c * s + model.ads.a(c);
        let back = recover_c(&model, s, m, guess).unwrap();
        prop_assert!((back - c).abs() < 1e-12);
    }

    #[test]
    fn c_recovery_is_monotone(s in 0.0f64..1.0, m1 in 0.0f64..1.0, m2 in 0.0f64..1.0) {
        let model = rm1();
        let (lo, hi) = (m1.min(m2), m1.max(m2));
        let (a, b) = (recover_c(&model, s, lo, 0.5).unwrap(), recover_c(&model, s, hi, 0.5).unwrap());
        prop_assert!(a <= b);
    }
}

fn field(xs: Vec<f64>, nt: usize, fill: f64) -> GridField {
    let n = xs.len() * nt;
    GridField {
        xs,
        ts: (0..nt).map(|j| j as f64).collect(),
        s: vec![fill; n],
        c: vec![fill; n],
        model: rm1(),
        t_inj: 1.0,
        label: "test".into(),
    }
}

#[test]
fn compare_fields_norm() {
    let xs: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
    let a = field(xs.clone(), 3, 0.2);
    assert_eq!(compare_fields(&a, &a, Component::S).unwrap(), 0.0);
    let mut b = a.clone();
    let k = b.index(4, 1);
    b.c[k] += 0.25;
    assert_eq!(compare_fields(&a, &b, Component::S).unwrap(), 0.0);
    let d = compare_fields(&a, &b, Component::C).unwrap();
    assert!((d - 0.25 * 0.1 / 3.0).abs() < 1e-15);
    let other = field(xs[..9].to_vec(), 3, 0.2);
    assert!(matches!(compare_fields(&a, &other, Component::S), Err(Error::GridMismatch(_))));
}
