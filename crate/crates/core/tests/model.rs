use proptest::prelude::*;
use slugflow::model::{validate_assumptions, ModelPair};
use slugflow::Error;

fn rm1() -> ModelPair {
    ModelPair::reference()
}

/// Closed-form inverse of `θ` for Corey flux: `s = √M/(√M + √(U-1))`.
fn vartheta_closed(model: &ModelPair, u: f64, c: f64) -> f64 {
    let m = model.fluid.mobility(c).sqrt();
    m / (m + (u - 1.0).sqrt())
}

#[test]
fn vartheta_hand_values() {
    let fl = rm1().flux();
    assert!((fl.vartheta(2.0, 0.0).unwrap() - 0.5).abs() < 1e-13);
    assert!((fl.vartheta(3.0, 1.0).unwrap() - 0.5).abs() < 1e-13);
    for z in [0.0, 0.3, 1.0] {
        assert_eq!(fl.vartheta(1.0, z).unwrap(), 1.0);
    }
}

#[test]
fn vartheta_residual_and_closed_form() {
    let m = rm1();
    let fl = m.flux();
    for i in 0..50 {
        let u = 1.0 + 10f64.powf(-8.0 + 12.0 * i as f64 / 49.0);
        for z in [0.0, 0.25, 0.5, 1.0] {
            let s = fl.vartheta(u, z).unwrap();
            assert!((m.fluid.f(s, z) - 1.0 / u).abs() <= 1e-12, "u={u} z={z}");
            assert!((s - vartheta_closed(&m, u, z)).abs() < 1e-11);
        }
    }
}

#[test]
fn vartheta_is_clamped_far_out() {
    let m = rm1();
    let fl = m.flux();
    let s = fl.vartheta(1e12, 0.5).unwrap();
    assert!((m.fluid.f(s, 0.5) - 1e-8).abs() < 1e-16);
    assert!(matches!(fl.vartheta(0.5, 0.0), Err(Error::OutOfRange(_))));
}

#[test]
fn flux_hand_values() {
    let fl = rm1().flux();
    assert!((fl.flux_value(2.0, 0.0).unwrap() + 1.0).abs() < 1e-12);
    assert!((fl.flux_value(3.0, 1.0).unwrap() + 1.5).abs() < 1e-12);
    assert!((fl.flux_value(1.0, 0.4).unwrap() + 1.0).abs() < 1e-15);
    let d = fl.flux_derivs(2.0, 0.0).unwrap();
    assert!((d.flux + 1.0).abs() < 1e-12);
    assert!(matches!(fl.flux_derivs(1.0, 0.0), Err(Error::UnitU(_))));
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-3)
}

#[test]
fn flow_and_adsorption_partials_match_differences() {
    let m = rm1();
    let h = 1e-5;
    let fl = &m.fluid;
    for i in 1..64 {
        for j in 1..64 {
            let (s, c) = (0.05 + 0.9 * i as f64 / 64.0, j as f64 / 64.0);
            let fd_s = (fl.f(s + h, c) - fl.f(s - h, c)) / (2.0 * h);
            let fd_c = (fl.f(s, c + h) - fl.f(s, c - h)) / (2.0 * h);
            let fd_ss = (fl.f_s(s + h, c) - fl.f_s(s - h, c)) / (2.0 * h);
            let fd_sc = (fl.f_s(s, c + h) - fl.f_s(s, c - h)) / (2.0 * h);
            assert!(rel_close(fl.f_s(s, c), fd_s, 1e-5));
            assert!(rel_close(fl.f_c(s, c), fd_c, 1e-5));
            assert!(rel_close(fl.f_ss(s, c), fd_ss, 1e-5));
            assert!(rel_close(fl.f_sc(s, c), fd_sc, 1e-5));
        }
    }
    let ad = &m.ads;
    for i in 1..64 {
        let z = i as f64 / 64.0;
        assert!(rel_close(ad.a_z(z), (ad.a(z + h) - ad.a(z - h)) / (2.0 * h), 1e-5));
        assert!(rel_close(ad.a_zz(z), (ad.a_z(z + h) - ad.a_z(z - h)) / (2.0 * h), 1e-5));
        assert!(rel_close(ad.a_zzz(z), (ad.a_zz(z + h) - ad.a_zz(z - h)) / (2.0 * h), 1e-5));
    }
}

#[test]
fn lagrange_partials_match_differences() {
    let m = rm1();
    let fl = m.flux();
    let h = 1e-5;
    for i in 1..64 {
        for j in 1..64 {
            // keep U away from 1 where the s-map is singular
            let u = 1.05 + 6.0 * i as f64 / 64.0;
            let z = 0.02 + 0.96 * j as f64 / 64.0;
            let d = fl.flux_derivs(u, z).unwrap();
            let fv = |u: f64, z: f64| fl.flux_value(u, z).unwrap();
            let fu = |u: f64, z: f64| fl.flux_derivs(u, z).unwrap().f_u;
            let fd_u = (fv(u + h, z) - fv(u - h, z)) / (2.0 * h);
            let fd_z = (fv(u, z + h) - fv(u, z - h)) / (2.0 * h);
            let fd_uu = (fu(u + h, z) - fu(u - h, z)) / (2.0 * h);
            let fd_uz = (fu(u, z + h) - fu(u, z - h)) / (2.0 * h);
            assert!(rel_close(d.f_u, fd_u, 1e-5), "F_U at {u},{z}");
            assert!(rel_close(d.f_z, fd_z, 1e-5), "F_z at {u},{z}");
            assert!(rel_close(d.f_uu, fd_uu, 1e-5), "F_UU at {u},{z}: {} {}", d.f_uu, fd_uu);
            assert!(rel_close(d.f_uz, fd_uz, 1e-5), "F_Uz at {u},{z}");
            // F_ζ = U f_c / f_s at s = ϑ(U)
            let s = d.s;
            let alt = u * m.fluid.f_c(s, z) / m.fluid.f_s(s, z);
            assert!(rel_close(d.f_z, alt, 1e-12));
        }
    }
}

#[test]
fn lagrange_flux_structure() {
    let m = rm1();
    let fl = m.flux();
    for j in 0..=20 {
        let z = j as f64 / 20.0;
        let umax = fl.u_max(z).unwrap();
        let ui = fl.u_inflection(z).unwrap();
        assert!(fl.flux_derivs(umax, z).unwrap().f_u.abs() <= 1e-10);
        assert!(fl.flux_derivs(ui, z).unwrap().f_uu.abs() <= 1e-10);
        assert!(ui > umax);
        for i in 1..200 {
            let u = 1.0 + 50.0 * (i as f64 / 200.0).powi(2);
            let d = fl.flux_derivs(u, z).unwrap();
            assert!(d.flux < 0.0);
            assert_eq!(d.f_u > 0.0, u < umax, "u={u} z={z}");
            if d.f_u > 0.0 {
                assert!(d.f_uu < 0.0);
            }
            if z > 0.0 {
                assert!(d.f_z < 0.0);
            }
        }
        // F → -∞ as U → ∞
        assert!(fl.flux_value(1e8, z).unwrap() < -5e3);
    }
}

#[test]
fn buckley_leverett_front_point() {
    let m = rm1();
    let s = m.fluid.welge_point(0.0).unwrap();
    assert!((s - 0.5f64.sqrt()).abs() < 1e-13);
    let v = m.fluid.f(s, 0.0) / s;
    assert!((v - (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-12);
}

#[test]
fn adsorption_inverses_and_signs() {
    let ad = rm1().ads;
    assert_eq!(ad.a(0.0), 0.0);
    // p(ζ) = 2ζ²/(1+ζ)² for Γ=2, β=1
    assert!((ad.q(0.125) - 1.0 / 3.0).abs() < 1e-15);
    for i in 1..=200 {
        let z = i as f64 / 200.0;
        let g = ad.g(ad.a_z(z));
        let q = ad.q(ad.p(z));
        assert!(((g - z) / z).abs() < 1e-12);
        assert!(((q - z) / z).abs() < 1e-12);
        assert!((ad.g_bracketed(ad.a_z(z)).unwrap() - g).abs() <= 1e-12 * z.max(1e-3));
        assert!((ad.q_bracketed(ad.p(z)).unwrap() - q).abs() <= 1e-12 * z.max(1e-3));
        assert!(ad.a_z(z) > 0.0 && ad.a_zz(z) < 0.0 && ad.b(z) > 0.0);
        // d/dζ (a/ζ) = -b/ζ < 0
        let h = 1e-6;
        assert!(ad.chord_slope(z + h) < ad.chord_slope(z));
        assert!((ad.b(z) - (ad.a(z) / z - ad.a_z(z))).abs() < 1e-13);
    }
}

#[test]
fn assumption_report_for_reference_model() {
    let r = validate_assumptions(&rm1(), 64).unwrap();
    assert_eq!(r.checks.len(), 7);
    assert!(r.all_passed(), "{r:?}");
    assert!(validate_assumptions(&rm1(), 8).is_err());
}

#[test]
fn flat_in_c_flux_is_flagged() {
    let m = ModelPair::new(1.0, 0.0, 2.0, 1.0).unwrap();
    let r = validate_assumptions(&m, 64).unwrap();
    let c = r.get("flux_decreasing_in_c").unwrap();
    assert!(!c.passed && c.worst.is_some());
}

#[test]
fn parameter_domain_is_enforced() {
    assert!(ModelPair::new(1.0, 1.0, 2.0, -1.0).is_err());
    assert!(ModelPair::new(1.0, 1.0, 0.0, 1.0).is_err());
    assert!(ModelPair::new(0.0, 1.0, 2.0, 1.0).is_err());
    assert!(ModelPair::new(1.0, -0.1, 2.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn vartheta_round_trip(s in 0.05f64..=1.0, c in 0.0f64..=1.0,
                           m0 in 0.2f64..5.0, m in 0.0f64..4.0) {
        let model = ModelPair::new(m0, m, 2.0, 1.0).unwrap();
        let fl = model.flux();
        let back = fl.vartheta(fl.theta(s, c), c).unwrap();
        prop_assert!((back - s).abs() <= 1e-10);
    }

    #[test]
    fn random_models_satisfy_assumptions(m0 in 0.2f64..5.0, m in 0.05f64..4.0,
                                         gamma in 0.1f64..10.0, beta in 0.1f64..10.0) {
        let model = ModelPair::new(m0, m, gamma, beta).unwrap();
        let r = validate_assumptions(&model, 32).unwrap();
        prop_assert!(r.all_passed());
    }
}
