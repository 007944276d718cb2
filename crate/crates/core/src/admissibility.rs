//! Shock admissibility in original coordinates and the one-to-one mapping of
//! shocks into Lagrange coordinates.
//!
//! Jumps are `[q] = q(s⁺, c⁺) - q(s⁻, c⁻)`; the travelling-wave system for
//! a shock of speed `v` is
//! `s_ξ = f(s,c) - v(s + d₁)`, `c_ξ = v(d₁c - d₂ - a(c))`.

use crate::error::{Error, Result};
use crate::model::ModelPair;
use crate::ode::rk4_step;
use crate::roots::{bisect, golden_max};

/// Tolerance used to decide whether shock data satisfy Rankine–Hugoniot.
pub const RH_TOL: f64 = 1e-8;
const OLEINIK_SAMPLES: usize = 256;
const ROOT_SCAN: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockData {
    pub s_minus: f64,
    pub s_plus: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    pub v: f64,
}

impl ShockData {
    pub fn new(s_minus: f64, s_plus: f64, c_minus: f64, c_plus: f64, v: f64) -> Result<Self> {
        for (name, x) in [
            ("s_minus", s_minus),
            ("s_plus", s_plus),
            ("c_minus", c_minus),
            ("c_plus", c_plus),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfRange(format!("{name} = {x} not in [0, 1]")));
            }
        }
        if !v.is_finite() {
            return Err(Error::OutOfRange(format!("shock speed {v} is not finite")));
        }
        Ok(Self { s_minus, s_plus, c_minus, c_plus, v })
    }

    /// s-shock with the speed fixed by the first Rankine–Hugoniot line.
    pub fn s_shock(model: &ModelPair, s_minus: f64, s_plus: f64, c: f64) -> Result<Self> {
        let f = |s| model.fluid.f(s, c);
        let v = (f(s_plus) - f(s_minus)) / (s_plus - s_minus);
        Self::new(s_minus, s_plus, c, c, v)
    }

    pub fn is_c_shock(&self) -> bool {
        self.c_minus != self.c_plus
    }

    /// `d₁ = [a]/[c]`, defined when `c⁺ ≠ c⁻`.
    pub fn d1(&self, model: &ModelPair) -> Option<f64> {
        self.is_c_shock().then(|| {
            (model.ads.a(self.c_minus) - model.ads.a(self.c_plus)) / (self.c_minus - self.c_plus)
        })
    }

    /// `d₂ = (c⁺a⁻ - c⁻a⁺)/(c⁻ - c⁺)`, defined when `c⁺ ≠ c⁻`.
    pub fn d2(&self, model: &ModelPair) -> Option<f64> {
        self.is_c_shock().then(|| {
            let am = model.ads.a(self.c_minus);
            let ap = model.ads.a(self.c_plus);
            (self.c_plus * am - self.c_minus * ap) / (self.c_minus - self.c_plus)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    VelocityRange,
    ZeroLeftState,
    EqualS,
    CIncreasing,
    OleinikFail,
    LaxFail,
    U2ToU1,
    Ok,
}

impl Reason {
    pub fn tag(&self) -> &'static str {
        match self {
            Reason::VelocityRange => "velocity-range",
            Reason::ZeroLeftState => "zero-left-state",
            Reason::EqualS => "equal-s",
            Reason::CIncreasing => "c-increasing",
            Reason::OleinikFail => "oleinik-fail",
            Reason::LaxFail => "lax-fail",
            Reason::U2ToU1 => "u2-to-u1",
            Reason::Ok => "ok",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShockVerdict {
    pub admissible: bool,
    pub reason: Reason,
    pub orbit: Option<OrbitOutcome>,
}

impl ShockVerdict {
    fn from_reason(reason: Reason) -> Self {
        Self {
            admissible: reason == Reason::Ok,
            reason,
            orbit: None,
        }
    }
}

/// `(v[s] - [f], v[cs + a] - [cf])`.
pub fn rh_residual(model: &ModelPair, sh: &ShockData) -> (f64, f64) {
    let f = |s, c| model.fluid.f(s, c);
    let a = |c| model.ads.a(c);
    let (sm, sp, cm, cp) = (sh.s_minus, sh.s_plus, sh.c_minus, sh.c_plus);
    let r1 = sh.v * (sp - sm) - (f(sp, cp) - f(sm, cm));
    let r2 = sh.v * ((cp * sp + a(cp)) - (cm * sm + a(cm))) - (cp * f(sp, cp) - cm * f(sm, cm));
    (r1, r2)
}

fn check_rh(model: &ModelPair, sh: &ShockData) -> Result<()> {
    let (r1, r2) = rh_residual(model, sh);
    if r1.abs() > RH_TOL || r2.abs() > RH_TOL {
        return Err(Error::InconsistentShock(format!(
            "Rankine-Hugoniot residuals ({r1:.3e}, {r2:.3e}) exceed {RH_TOL:e}"
        )));
    }
    Ok(())
}

/// Sampled bound for `‖f‖_{C¹}` on `[0,1]²`.
pub fn c1_norm(model: &ModelPair) -> f64 {
    let n = 64;
    let mut best: f64 = 1.0;
    for j in 0..=n {
        let c = j as f64 / n as f64;
        if let Ok(v) = model.fluid.max_speed(c) {
            best = best.max(v);
        }
        for i in 0..=n {
            let s = i as f64 / n as f64;
            best = best.max(model.fluid.f_c(s, c).abs());
        }
    }
    best
}

fn velocity_in_range(model: &ModelPair, v: f64) -> bool {
    v > 0.0 && v < c1_norm(model)
}

/// Oleinik and Lax tests for a shock with `c⁺ = c⁻ = c`.
pub fn s_shock_admissible(
    model: &ModelPair,
    s_minus: f64,
    s_plus: f64,
    c: f64,
    v: f64,
) -> Result<ShockVerdict> {
    let sh = ShockData::new(s_minus, s_plus, c, c, v)?;
    if s_minus == 0.0 {
        return Ok(ShockVerdict::from_reason(Reason::ZeroLeftState));
    }
    if s_minus == s_plus {
        return Ok(ShockVerdict::from_reason(Reason::EqualS));
    }
    check_rh(model, &sh)?;
    if !velocity_in_range(model, v) {
        return Ok(ShockVerdict::from_reason(Reason::VelocityRange));
    }
    let fl = &model.fluid;
    let fm = fl.f(s_minus, c);
    let dir = (s_plus - s_minus).signum();
    // Ψ(s)·sign(s⁺ - s⁻) must stay positive strictly between the states
    let psi = |s: f64| (fl.f(s, c) - fm - v * (s - s_minus)) * dir;
    let n = OLEINIK_SAMPLES;
    let pts: Vec<f64> = (1..=n)
        .map(|k| s_minus + (s_plus - s_minus) * k as f64 / (n + 1) as f64)
        .collect();
    let vals: Vec<f64> = pts.iter().map(|&s| psi(s)).collect();
    if vals.iter().any(|&p| p <= 0.0) {
        return Ok(ShockVerdict::from_reason(Reason::OleinikFail));
    }
    // refine interior local minima so that a tangential zero between samples is caught
    for k in 1..n - 1 {
        if vals[k] <= vals[k - 1] && vals[k] <= vals[k + 1] {
            let (a, b) = (pts[k - 1].min(pts[k + 1]), pts[k - 1].max(pts[k + 1]));
            let smin = golden_max(|s| -psi(s), a, b, 1e-12);
            if psi(smin) <= 0.0 {
                return Ok(ShockVerdict::from_reason(Reason::OleinikFail));
            }
        }
    }
    let lo = fl.f_s(s_plus, c) - v;
    let hi = v - fl.f_s(s_minus, c);
    let tol = 1e-10;
    let lax = lo <= tol && hi <= tol && !(lo.abs() <= tol && hi.abs() <= tol);
    if !lax {
        return Ok(ShockVerdict::from_reason(Reason::LaxFail));
    }
    Ok(ShockVerdict::from_reason(Reason::Ok))
}

/// Saturations on each side that are Rankine–Hugoniot compatible with speed
/// `v`, ascending: `minus = [s₁⁻, s₂⁻]`, `plus = [s₁⁺, s₂⁺]` (possibly fewer,
/// a double root is reported twice).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CShockRoots {
    pub minus: Vec<f64>,
    pub plus: Vec<f64>,
}

impl CShockRoots {
    /// Index-aligned pairs `(s_i⁻, s_i⁺)`.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.minus.iter().copied().zip(self.plus.iter().copied()).collect()
    }
}

/// Roots of `f(s, c) = v(s + d₁)` in `[0, 1]`, ascending.
pub fn line_roots(model: &ModelPair, c: f64, v: f64, d1: f64) -> Vec<f64> {
    let g = |s: f64| model.fluid.f(s, c) - v * (s + d1);
    let n = ROOT_SCAN;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&s| g(s)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        if gs[i] == 0.0 {
            roots.push(xs[i]);
        } else if gs[i].signum() != gs[i + 1].signum() && gs[i + 1] != 0.0 {
            if let Ok(r) = bisect(g, xs[i], xs[i + 1], 1e-15) {
                roots.push(r);
            }
        }
    }
    if gs[n] == 0.0 {
        roots.push(1.0);
    }
    // two close roots can hide inside one scan cell, or touch as a tangent
    // double root: refine every sampled local maximum that lies below zero
    for k in 0..=n {
        let left = if k > 0 { gs[k - 1] } else { f64::NEG_INFINITY };
        let right = if k < n { gs[k + 1] } else { f64::NEG_INFINITY };
        if !(gs[k] < 0.0 && gs[k] >= left && gs[k] >= right) {
            continue;
        }
        let (a, b) = (xs[k.saturating_sub(1)], xs[(k + 1).min(n)]);
        let sm = golden_max(g, a, b, 1e-13);
        let gm = g(sm);
        if gm > 1e-9 {
            for (lo, hi) in [(a, sm), (sm, b)] {
                if let Ok(r) = bisect(g, lo, hi, 1e-15) {
                    roots.push(r);
                }
            }
        } else if gm >= -1e-9 {
            roots.push(sm);
            roots.push(sm);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Candidate states of a c-shock with speed `v` between `c⁻ > c⁺`.
pub fn c_shock_roots(model: &ModelPair, v: f64, c_minus: f64, c_plus: f64) -> CShockRoots {
    if !(c_minus > c_plus) || !(v > 0.0) {
        return CShockRoots::default();
    }
    let d1 = (model.ads.a(c_minus) - model.ads.a(c_plus)) / (c_minus - c_plus);
    CShockRoots {
        minus: line_roots(model, c_minus, v, d1),
        plus: line_roots(model, c_plus, v, d1),
    }
}

/// Admissibility of a shock with `c⁺ ≠ c⁻`.
pub fn c_shock_admissible(model: &ModelPair, sh: &ShockData) -> Result<ShockVerdict> {
    if !sh.is_c_shock() {
        return Err(Error::InconsistentShock("c-shock test needs c⁺ ≠ c⁻".into()));
    }
    check_rh(model, sh)?;
    if sh.c_plus > sh.c_minus {
        return Ok(ShockVerdict::from_reason(Reason::CIncreasing));
    }
    if sh.s_minus == 0.0 {
        return Ok(ShockVerdict::from_reason(Reason::ZeroLeftState));
    }
    if sh.s_minus == sh.s_plus {
        return Ok(ShockVerdict::from_reason(Reason::EqualS));
    }
    if !velocity_in_range(model, sh.v) {
        return Ok(ShockVerdict::from_reason(Reason::VelocityRange));
    }
    let roots = c_shock_roots(model, sh.v, sh.c_minus, sh.c_plus);
    let index_of = |list: &[f64], s: f64| -> Option<usize> {
        list.iter()
            .enumerate()
            .filter(|(_, &r)| (r - s).abs() < 1e-6)
            .min_by(|a, b| (a.1 - s).abs().total_cmp(&(b.1 - s).abs()))
            .map(|(i, _)| i)
    };
    // s⁻ belongs to a root when g stays within the RH tolerance all the way
    // between them (near a tangency the root itself is ill-conditioned); two
    // roots enclosing a bump of g below that tolerance are one double root
    let d1 = (model.ads.a(sh.c_minus) - model.ads.a(sh.c_plus)) / (sh.c_minus - sh.c_plus);
    let g = |s: f64| model.fluid.f(s, sh.c_minus) - sh.v * (s + d1);
    let same_root = |r: f64| (0..=16).all(|k| g(sh.s_minus + (r - sh.s_minus) * k as f64 / 16.0).abs() <= RH_TOL);
    let tangent = roots.minus.len() == 2 && {
        let (r0, r1) = (roots.minus[0], roots.minus[1]);
        g(golden_max(g, r0, r1, 1e-13)) <= RH_TOL && (same_root(r0) || same_root(r1))
    };
    let im = if tangent {
        0
    } else {
        index_of(&roots.minus, sh.s_minus)
            .or_else(|| {
                (0..roots.minus.len())
                    .filter(|&i| same_root(roots.minus[i]))
                    .min_by(|&a, &b| (roots.minus[a] - sh.s_minus).abs().total_cmp(&(roots.minus[b] - sh.s_minus).abs()))
            })
            .ok_or_else(|| Error::InconsistentShock(format!("s⁻ = {} is not a critical point", sh.s_minus)))?
    };
    index_of(&roots.plus, sh.s_plus).ok_or_else(|| {
        Error::InconsistentShock(format!("s⁺ = {} is not a critical point", sh.s_plus))
    })?;
    let two_minus = !tangent && roots.minus.len() == 2 && roots.minus[1] - roots.minus[0] > 1e-9;
    let is_u2_minus = two_minus && im == 1;
    let is_u1_plus = (sh.s_plus - roots.plus[0]).abs() < 1e-6;
    if is_u2_minus && is_u1_plus {
        return Ok(ShockVerdict::from_reason(Reason::U2ToU1));
    }
    Ok(ShockVerdict::from_reason(Reason::Ok))
}

/// Dispatches to the s- or c-shock test.
pub fn shock_admissible(model: &ModelPair, sh: &ShockData) -> Result<ShockVerdict> {
    if sh.is_c_shock() {
        c_shock_admissible(model, sh)
    } else {
        s_shock_admissible(model, sh.s_minus, sh.s_plus, sh.c_minus, sh.v)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    pub step: f64,
    pub perturbation: f64,
    /// Used instead of `perturbation` when the source is degenerate
    /// (`|f_s - v| < 1e-3` there): escape is then algebraic, and a 1e-6 kick
    /// would need ~1e9 steps to leave the critical point.
    pub degenerate_perturbation: f64,
    pub ball: f64,
    pub max_steps: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            perturbation: 1e-6,
            degenerate_perturbation: 1e-3,
            ball: 1e-4,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitOutcome {
    /// A trajectory from `u⁻` entered the ball around `u⁺`.
    Connected { steps: usize, path: Vec<(f64, f64)> },
    /// The candidate trajectories settled or escaped elsewhere.
    NotConnected { end: (f64, f64) },
    /// Step budget exhausted or the test is not decisive for this geometry.
    Inconclusive { detail: String },
}

impl OrbitOutcome {
    pub fn is_connected(&self) -> bool {
        matches!(self, OrbitOutcome::Connected { .. })
    }
    pub fn is_conclusive(&self) -> bool {
        !matches!(self, OrbitOutcome::Inconclusive { .. })
    }
}

enum Run {
    Hit(usize, Vec<(f64, f64)>),
    Settled((f64, f64)),
    Escaped((f64, f64)),
    Budget,
}

struct WaveSystem<'a> {
    model: &'a ModelPair,
    v: f64,
    vd1: f64,
    vd2: f64,
    /// s-shocks live on the invariant line `c = c⁻`; freezing `c` keeps
    /// round-off from being amplified along an unstable `c`-direction.
    freeze_c: bool,
}

impl WaveSystem<'_> {
    fn rhs(&self, y: &[f64; 2]) -> [f64; 2] {
        let (s, c) = (y[0], y[1]);
        let dc = if self.freeze_c {
            0.0
        } else {
            self.vd1 * c - self.vd2 - self.v * self.model.ads.a(c)
        };
        [self.model.fluid.f(s, c) - self.v * s - self.vd1, dc]
    }

    /// Integrates from `start` (forward if `sign > 0`) until the trajectory
    /// reaches `target`, stalls, leaves the box, or the budget runs out.
    fn run(&self, start: [f64; 2], target: (f64, f64), sign: f64, opt: &OrbitOptions) -> Run {
        let f = |y: &[f64; 2]| {
            let r = self.rhs(y);
            [sign * r[0], sign * r[1]]
        };
        let mut y = start;
        let mut path = vec![(y[0], y[1])];
        let stride = 100;
        for k in 1..=opt.max_steps {
            y = rk4_step(&f, &y, opt.step);
            let d = ((y[0] - target.0).powi(2) + (y[1] - target.1).powi(2)).sqrt();
            if d < opt.ball {
                path.push((y[0], y[1]));
                return Run::Hit(k, path);
            }
            if !(-0.05..=1.05).contains(&y[0]) || !(-0.05..=1.05).contains(&y[1]) || !y[0].is_finite()
            {
                return Run::Escaped((y[0], y[1]));
            }
            if k % stride == 0 {
                path.push((y[0], y[1]));
                let r = self.rhs(&y);
                if r[0].hypot(r[1]) < 1e-10 {
                    return Run::Settled((y[0], y[1]));
                }
            }
        }
        Run::Budget
    }
}

/// Phase-plane oracle: does a travelling wave connect `u⁻` to `u⁺`?
pub fn traveling_wave_orbit(
    model: &ModelPair,
    sh: &ShockData,
    opt: &OrbitOptions,
) -> Result<OrbitOutcome> {
    check_rh(model, sh)?;
    let um = (sh.s_minus, sh.c_minus);
    let up = (sh.s_plus, sh.c_plus);
    if (um.0 - up.0).hypot(um.1 - up.1) < opt.ball {
        return Ok(OrbitOutcome::Connected { steps: 0, path: vec![um, up] });
    }
    let v = sh.v;
    let vd1 = model.fluid.f(sh.s_minus, sh.c_minus) - v * sh.s_minus;
    let vd2 = vd1 * sh.c_minus - v * model.ads.a(sh.c_minus);
    let sys = WaveSystem { model, v, vd1, vd2, freeze_c: !sh.is_c_shock() };
    let fl = &model.fluid;
    let source_eps = if (fl.f_s(um.0, um.1) - v).abs() < 1e-3 {
        opt.degenerate_perturbation
    } else {
        opt.perturbation
    };

    if !sh.is_c_shock() {
        // one-dimensional along c = const
        let dir = (up.0 - um.0).signum();
        let start = [um.0 + dir * source_eps, um.1];
        return Ok(match sys.run(start, up, 1.0, opt) {
            Run::Hit(steps, path) => OrbitOutcome::Connected { steps, path },
            Run::Settled(e) | Run::Escaped(e) => OrbitOutcome::NotConnected { end: e },
            Run::Budget => OrbitOutcome::Inconclusive { detail: "step budget exhausted".into() },
        });
    }

    // the concentration equation decouples: check it first
    let h = |c: f64| vd1 * c - vd2 - v * model.ads.a(c);
    let cdir = (up.1 - um.1).signum();
    let n = 256;
    for k in 1..n {
        let c = um.1 + (up.1 - um.1) * k as f64 / n as f64;
        if h(c) * cdir <= 0.0 {
            return Ok(OrbitOutcome::NotConnected { end: (f64::NAN, c) });
        }
    }

    // linearisation: J = [[f_s - v, f_c], [0, λ_c]]
    let lam_c = |c: f64| vd1 - v * model.ads.a_z(c);
    let lam_s = |s: f64, c: f64| fl.f_s(s, c) - v;
    let eig_c = |s: f64, c: f64, toward: f64| -> [f64; 2] {
        let (l1, l2) = (lam_s(s, c), lam_c(c));
        let e = [fl.f_c(s, c), l2 - l1];
        let norm = e[0].hypot(e[1]);
        let sgn = if e[1] * toward >= 0.0 { 1.0 } else { -1.0 };
        [sgn * e[0] / norm, sgn * e[1] / norm]
    };
    let tol = 1e-9;
    let plus_saddle = lam_s(up.0, up.1) > tol && lam_c(up.1) < 0.0;
    if plus_saddle {
        // unique incoming orbit: the stable manifold of u⁺, traced backward
        let e = eig_c(up.0, up.1, um.1 - up.1);
        let eps = opt.perturbation;
        let start = [up.0 + eps * e[0], up.1 + eps * e[1]];
        return Ok(match sys.run(start, um, -1.0, opt) {
            Run::Hit(steps, path) => {
                let mut path = path;
                path.reverse();
                OrbitOutcome::Connected { steps, path }
            }
            Run::Settled(e) | Run::Escaped(e) => OrbitOutcome::NotConnected { end: e },
            Run::Budget => OrbitOutcome::Inconclusive { detail: "step budget exhausted".into() },
        });
    }

    // forward from u⁻ along its unstable directions
    let l1m = lam_s(um.0, um.1);
    let e2 = eig_c(um.0, um.1, up.1 - um.1);
    let mut dirs = vec![e2];
    let minus_saddle = l1m < -tol;
    if !minus_saddle {
        for th in [0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 1.4, -1.4] {
            let (ct, st): (f64, f64) = (f64::cos(th), f64::sin(th));
            // rotate within the unstable cone; keep the c-component heading to c⁺
            let d = [ct * e2[0] + st * 1.0, ct * e2[1]];
            let norm = d[0].hypot(d[1]);
            dirs.push([d[0] / norm, d[1] / norm]);
        }
    }
    let mut last_end = um;
    let mut budget_hit = false;
    for d in dirs {
        let start = [um.0 + source_eps * d[0], um.1 + source_eps * d[1]];
        match sys.run(start, up, 1.0, opt) {
            Run::Hit(steps, path) => return Ok(OrbitOutcome::Connected { steps, path }),
            Run::Settled(e) | Run::Escaped(e) => last_end = e,
            Run::Budget => budget_hit = true,
        }
        if minus_saddle {
            break;
        }
    }
    if minus_saddle && !budget_hit {
        Ok(OrbitOutcome::NotConnected { end: last_end })
    } else if budget_hit {
        Ok(OrbitOutcome::Inconclusive { detail: "step budget exhausted".into() })
    } else {
        Ok(OrbitOutcome::Inconclusive {
            detail: "no sampled direction from the source node reached u⁺".into(),
        })
    }
}

/// A shock in Lagrange coordinates: `U⁻, ζ⁻` on the lower-`φ` side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeShock {
    pub u_minus: f64,
    pub u_plus: f64,
    pub z_minus: f64,
    pub z_plus: f64,
    pub v_star: f64,
}

/// Maps an original-coordinates shock to Lagrange coordinates (sides swap).
pub fn map_shock_to_lagrange(model: &ModelPair, sh: &ShockData) -> Result<LagrangeShock> {
    if !(sh.s_minus > 0.0) {
        return Err(Error::OutOfRange("s⁻ = 0: the Lagrange transform is undefined".into()));
    }
    if !(sh.s_plus > 0.0) {
        return Err(Error::OutOfRange(
            "s⁺ = 0: the shock bounds the zero-saturation region and has no Lagrange image".into(),
        ));
    }
    if sh.v == 0.0 {
        return Err(Error::OutOfRange("zero shock speed".into()));
    }
    let fm = model.fluid.f(sh.s_minus, sh.c_minus);
    let fp = model.fluid.f(sh.s_plus, sh.c_plus);
    Ok(LagrangeShock {
        u_plus: 1.0 / fm,
        u_minus: 1.0 / fp,
        z_plus: sh.c_minus,
        z_minus: sh.c_plus,
        v_star: fm / sh.v - sh.s_minus,
    })
}

/// Inverse of [`map_shock_to_lagrange`].
pub fn map_shock_to_original(model: &ModelPair, ls: &LagrangeShock) -> Result<ShockData> {
    let fl = model.flux();
    let s_minus = fl.vartheta(ls.u_plus, ls.z_plus)?;
    let s_plus = fl.vartheta(ls.u_minus, ls.z_minus)?;
    let v = model.fluid.f(s_minus, ls.z_plus) / (ls.v_star + s_minus);
    ShockData::new(s_minus, s_plus, ls.z_plus, ls.z_minus, v)
}

/// Residuals of `v*[U] = [F(U,ζ)]` and `v*[ζ] = [a(ζ)]`.
pub fn lagrange_rh_residual(model: &ModelPair, ls: &LagrangeShock) -> Result<(f64, f64)> {
    let fl = model.flux();
    let fp = fl.flux_value(ls.u_plus, ls.z_plus)?;
    let fm = fl.flux_value(ls.u_minus, ls.z_minus)?;
    let r1 = ls.v_star * (ls.u_plus - ls.u_minus) - (fp - fm);
    let r2 = ls.v_star * (ls.z_plus - ls.z_minus) - (model.ads.a(ls.z_plus) - model.ads.a(ls.z_minus));
    Ok((r1, r2))
}

/// Lax test for a Lagrange s-shock: `F_U(U⁻) ≥ v* ≥ F_U(U⁺)`, not both equal.
pub fn lagrange_lax(model: &ModelPair, ls: &LagrangeShock) -> Result<bool> {
    let fl = model.flux();
    let left = fl.flux_derivs(ls.u_minus, ls.z_minus)?.f_u - ls.v_star;
    let right = ls.v_star - fl.flux_derivs(ls.u_plus, ls.z_plus)?.f_u;
    let tol = 1e-10;
    Ok(left >= -tol && right >= -tol && !(left.abs() <= tol && right.abs() <= tol))
}
