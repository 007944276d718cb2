//! Corey fractional flow, Langmuir adsorption and the Lagrange flux
//! `F(U, ζ) = -s/f(s, ζ)` with `U = 1/f`.

use crate::error::{Error, Result};
use crate::roots::{bisect, newton_bisect};

/// Requests for `U` above this value are answered at the cap.
pub const U_CAP: f64 = 1e8;
const S_TOL: f64 = 1e-15;

/// `f(s,c) = s² / (s² + M(c)(1-s)²)` with `M(c) = M₀(1 + m c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidModel {
    m0: f64,
    m: f64,
}

/// Values of `f` and its partial derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub struct FlowDerivs {
    pub f: f64,
    pub fs: f64,
    pub fc: f64,
    pub fss: f64,
    pub fsc: f64,
}

impl FluidModel {
    /// `m = 0` is accepted (the flux is then independent of `c` and the
    /// decreasing-in-`c` assumption fails in the validation report).
    pub fn new(m0: f64, m: f64) -> Result<Self> {
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "m0",
                reason: format!("must be positive and finite, got {m0}"),
            });
        }
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: format!("must be non-negative and finite, got {m}"),
            });
        }
        Ok(Self { m0, m })
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn mobility(&self, c: f64) -> f64 {
        self.m0 * (1.0 + self.m * c)
    }

    fn denom(&self, s: f64, c: f64) -> f64 {
        s * s + self.mobility(c) * (1.0 - s) * (1.0 - s)
    }

    pub fn f(&self, s: f64, c: f64) -> f64 {
        s * s / self.denom(s, c)
    }

    /// `1 - f`, evaluated without cancellation near `s = 1`.
    pub fn oil_fraction(&self, s: f64, c: f64) -> f64 {
        self.mobility(c) * (1.0 - s) * (1.0 - s) / self.denom(s, c)
    }

    pub fn f_s(&self, s: f64, c: f64) -> f64 {
        let d = self.denom(s, c);
        2.0 * self.mobility(c) * s * (1.0 - s) / (d * d)
    }

    pub fn f_c(&self, s: f64, c: f64) -> f64 {
        let d = self.denom(s, c);
        let w = s * (1.0 - s);
        -w * w * self.m0 * self.m / (d * d)
    }

    pub fn f_ss(&self, s: f64, c: f64) -> f64 {
        let mm = self.mobility(c);
        let d = self.denom(s, c);
        let ds = 2.0 * s - 2.0 * mm * (1.0 - s);
        2.0 * mm * ((1.0 - 2.0 * s) * d - 2.0 * s * (1.0 - s) * ds) / (d * d * d)
    }

    pub fn f_sc(&self, s: f64, c: f64) -> f64 {
        let mm = self.mobility(c);
        let dm = self.m0 * self.m;
        let d = self.denom(s, c);
        let dc = dm * (1.0 - s) * (1.0 - s);
        let w = s * (1.0 - s);
        2.0 * dm * w / (d * d) - 4.0 * mm * w * dc / (d * d * d)
    }

    pub fn derivs(&self, s: f64, c: f64) -> FlowDerivs {
        FlowDerivs {
            f: self.f(s, c),
            fs: self.f_s(s, c),
            fc: self.f_c(s, c),
            fss: self.f_ss(s, c),
            fsc: self.f_sc(s, c),
        }
    }

    /// Inflection point `s^I(c)`: the unique zero of `f_ss` in (0,1).
    pub fn inflection(&self, c: f64) -> Result<f64> {
        bisect(|s| self.f_ss(s, c), 0.0, 1.0, S_TOL)
    }

    /// Tangency point `s*(c)` of the chord from the origin (maximum of f/s).
    pub fn welge_point(&self, c: f64) -> Result<f64> {
        let lo = self.inflection(c)?;
        bisect(|s| self.f(s, c) - s * self.f_s(s, c), lo, 1.0, S_TOL)
    }

    /// Largest characteristic speed `max_s f_s(s, c)` (attained at `s^I`).
    pub fn max_speed(&self, c: f64) -> Result<f64> {
        Ok(self.f_s(self.inflection(c)?, c))
    }
}

/// Langmuir isotherm `a(ζ) = Γβζ/(1+βζ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdsorptionModel {
    gamma: f64,
    beta: f64,
}

impl AdsorptionModel {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be positive and finite, got {gamma}"),
            });
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("must be positive and finite (a convex isotherm is not supported), got {beta}"),
            });
        }
        Ok(Self { gamma, beta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self, z: f64) -> f64 {
        self.gamma * self.beta * z / (1.0 + self.beta * z)
    }

    pub fn a_z(&self, z: f64) -> f64 {
        let d = 1.0 + self.beta * z;
        self.gamma * self.beta / (d * d)
    }

    pub fn a_zz(&self, z: f64) -> f64 {
        let d = 1.0 + self.beta * z;
        -2.0 * self.gamma * self.beta * self.beta / (d * d * d)
    }

    pub fn a_zzz(&self, z: f64) -> f64 {
        let d = 1.0 + self.beta * z;
        6.0 * self.gamma * self.beta.powi(3) / (d * d * d * d)
    }

    /// Inverse of `a_ζ`: the concentration at which the isotherm slope is `r`.
    pub fn g(&self, r: f64) -> f64 {
        ((self.gamma * self.beta / r).sqrt() - 1.0) / self.beta
    }

    /// `p(ζ) = a(ζ) - ζ a_ζ(ζ)`, increasing from 0.
    pub fn p(&self, z: f64) -> f64 {
        let w = self.beta * z / (1.0 + self.beta * z);
        self.gamma * w * w
    }

    /// Inverse of `p`.
    pub fn q(&self, y: f64) -> f64 {
        let w = (y / self.gamma).sqrt();
        w / (self.beta * (1.0 - w))
    }

    /// Adsorption defect `b(ζ) = a(ζ)/ζ - a_ζ(ζ)`.
    pub fn b(&self, z: f64) -> f64 {
        let d = 1.0 + self.beta * z;
        self.gamma * self.beta * self.beta * z / (d * d)
    }

    /// `a(ζ)/ζ`, extended continuously by `a_ζ(0)` at the origin.
    pub fn chord_slope(&self, z: f64) -> f64 {
        self.gamma * self.beta / (1.0 + self.beta * z)
    }

    /// Root-solved inverse of `a_ζ` (reference for the closed form).
    pub fn g_bracketed(&self, r: f64) -> Result<f64> {
        let hi = self.g_upper_bound(r);
        newton_bisect(|z| (self.a_z(z) - r, self.a_zz(z)), 0.0, hi, 1e-15)
    }

    /// Root-solved inverse of `p` (reference for the closed form).
    pub fn q_bracketed(&self, y: f64) -> Result<f64> {
        let mut hi = 1.0;
        while self.p(hi) < y {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NoBracket { lo: 0.0, hi });
            }
        }
        // p'(ζ) = -ζ a_ζζ(ζ)
        newton_bisect(|z| (self.p(z) - y, -z * self.a_zz(z)), 0.0, hi, 1e-15)
    }

    fn g_upper_bound(&self, r: f64) -> f64 {
        let mut hi = 1.0;
        while self.a_z(hi) > r && hi < 1e12 {
            hi *= 2.0;
        }
        hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPair {
    pub fluid: FluidModel,
    pub ads: AdsorptionModel,
}

impl ModelPair {
    pub fn new(m0: f64, m: f64, gamma: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            fluid: FluidModel::new(m0, m)?,
            ads: AdsorptionModel::new(gamma, beta)?,
        })
    }

    /// The reference model used throughout the tests: `M₀=1, m=1, Γ=2, β=1`.
    pub fn reference() -> Self {
        Self::new(1.0, 1.0, 2.0, 1.0).unwrap()
    }

    pub fn flux(&self) -> LagrangeFlux {
        LagrangeFlux { model: *self }
    }

    /// Slope `v(1,0) = (a(1) - a(0)) / 1` of the straight chemical front.
    pub fn v10(&self) -> f64 {
        self.ads.a(1.0)
    }
}

/// `F` and its partials at one `(U, ζ)`.
#[derive(Debug, Clone, Copy)]
pub struct FluxDerivs {
    pub s: f64,
    pub flux: f64,
    pub f_u: f64,
    pub f_z: f64,
    pub f_uu: f64,
    pub f_uz: f64,
}

/// The transformed flux `F(U,ζ) = -ϑ_ζ(U) U`, with `ϑ_ζ` the inverse of
/// `θ_ζ(s) = 1/f(s, ζ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeFlux {
    pub model: ModelPair,
}

impl LagrangeFlux {
    fn fluid(&self) -> &FluidModel {
        &self.model.fluid
    }

    pub fn theta(&self, s: f64, z: f64) -> f64 {
        1.0 / self.fluid().f(s, z)
    }

    /// `s` with `f(s, ζ) = 1/U`.
    pub fn vartheta(&self, u: f64, z: f64) -> Result<f64> {
        if !(u >= 1.0) {
            return Err(Error::OutOfRange(format!("vartheta needs U >= 1, got {u}")));
        }
        self.vartheta_excess(u.min(U_CAP) - 1.0, z)
    }

    /// `ϑ_ζ(1 + δ)`, taking the excess `δ = U - 1` directly so that states
    /// very close to `U = 1` keep full relative precision.
    pub fn vartheta_excess(&self, delta: f64, z: f64) -> Result<f64> {
        if !(delta >= 0.0) {
            return Err(Error::OutOfRange(format!("U - 1 must be >= 0, got {delta}")));
        }
        if delta == 0.0 {
            return Ok(1.0);
        }
        let delta = delta.min(U_CAP - 1.0);
        let fl = self.fluid();
        // (1 - f) - δ f = 0  ⇔  f = 1/(1+δ); decreasing in s
        newton_bisect(
            |s| {
                let r = fl.oil_fraction(s, z) - delta * fl.f(s, z);
                (r, -(1.0 + delta) * fl.f_s(s, z))
            },
            0.0,
            1.0,
            S_TOL,
        )
    }

    pub fn flux_value(&self, u: f64, z: f64) -> Result<f64> {
        Ok(-self.vartheta(u, z)? * u)
    }

    /// All partials at `(U, ζ)`; needs `U > 1`.
    pub fn flux_derivs(&self, u: f64, z: f64) -> Result<FluxDerivs> {
        if !(u > 1.0) {
            return Err(Error::UnitU(u));
        }
        let s = self.vartheta(u, z)?;
        Ok(self.derivs_at_s(s, z))
    }

    /// Partials expressed through the saturation `s = ϑ_ζ(U)`, `0 < s < 1`.
    pub fn derivs_at_s(&self, s: f64, z: f64) -> FluxDerivs {
        let d = self.fluid().derivs(s, z);
        let u = 1.0 / d.f;
        let fs3 = d.fs * d.fs * d.fs;
        FluxDerivs {
            s,
            flux: -s * u,
            f_u: d.f / d.fs - s,
            f_z: d.fc / (d.f * d.fs),
            f_uu: d.f * d.f * d.f * d.fss / fs3,
            f_uz: (d.fc * d.fs - d.f * d.fsc) / (d.fs * d.fs) + d.f * d.fss * d.fc / fs3,
        }
    }

    /// `𝓕_U` as a function of `s` (cheap; no root solve).
    pub fn f_u_at_s(&self, s: f64, z: f64) -> f64 {
        let fl = self.fluid();
        fl.f(s, z) / fl.f_s(s, z) - s
    }

    /// `U^max(ζ)`, the maximiser of `F(·, ζ)`.
    pub fn u_max(&self, z: f64) -> Result<f64> {
        Ok(self.theta(self.fluid().welge_point(z)?, z))
    }

    /// `U^I(ζ)`, the zero of `F_UU(·, ζ)`.
    pub fn u_inflection(&self, z: f64) -> Result<f64> {
        Ok(self.theta(self.fluid().inflection(z)?, z))
    }
}

/// One structural assumption and the outcome of checking it on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    /// Worst sample `(s, c)` (or `(ζ, NaN)` for adsorption) and its value.
    pub worst: Option<((f64, f64), f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Worst {
    at: Option<((f64, f64), f64)>,
    score: f64,
}

impl Worst {
    fn new() -> Self {
        Self { at: None, score: f64::NEG_INFINITY }
    }
    /// `violation > 0` marks a failed sample; the largest is kept.
    fn record(&mut self, point: (f64, f64), value: f64, violation: f64) {
        if violation > self.score {
            self.score = violation;
            self.at = Some((point, value));
        }
    }
    fn finish(self, name: &'static str, statement: &'static str) -> AssumptionCheck {
        let passed = self.score <= 0.0;
        AssumptionCheck {
            name,
            statement,
            passed,
            worst: if passed { None } else { self.at },
        }
    }
}

/// Violation score for a strict inequality: negative iff it holds.
fn strict(holds: bool, magnitude: f64) -> f64 {
    if holds {
        -magnitude.abs()
    } else {
        1.0 + magnitude.abs()
    }
}

/// Checks the structural assumptions on an `n × n` grid.
///
/// Failures are report entries; the only error is `n < 16`.
pub fn validate_assumptions(model: &ModelPair, n: usize) -> Result<AssumptionReport> {
    if n < 16 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("grid resolution must be at least 16, got {n}"),
        });
    }
    let fl = &model.fluid;
    let ad = &model.ads;
    let cs: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let interior: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();

    let mut endpoints = Worst::new();
    let mut monotone = Worst::new();
    let mut s_shape = Worst::new();
    let mut dec_c = Worst::new();
    for &c in &cs {
        let f0 = fl.f(0.0, c);
        let f1 = fl.f(1.0, c);
        endpoints.record((0.0, c), f0, f0.abs() - 1e-14);
        endpoints.record((1.0, c), f1, (f1 - 1.0).abs() - 1e-14);
        for &(s, v) in &[(0.0, fl.f_s(0.0, c)), (1.0, fl.f_s(1.0, c))] {
            monotone.record((s, c), v, v.abs() - 1e-14);
        }
        // f_ss must go from + to - exactly once
        let signs: Vec<f64> = interior.iter().map(|&s| fl.f_ss(s, c)).collect();
        let changes = signs.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
        let ok = signs[0] > 0.0 && *signs.last().unwrap() < 0.0 && changes == 1;
        s_shape.record((f64::NAN, c), changes as f64, if ok { -1.0 } else { 1.0 });
        for &s in &interior {
            let fs = fl.f_s(s, c);
            monotone.record((s, c), fs, strict(fs > 0.0, -fs));
        }
        if c > 0.0 && c < 1.0 {
            for &s in &interior {
                let v = fl.f_c(s, c);
                dec_c.record((s, c), v, strict(v < 0.0, v));
            }
        }
    }

    let mut origin = Worst::new();
    let a0 = ad.a(0.0);
    origin.record((0.0, f64::NAN), a0, a0.abs() - 1e-15);
    let mut increasing = Worst::new();
    let mut concave = Worst::new();
    for &z in &cs {
        let d1 = ad.a_z(z);
        increasing.record((z, f64::NAN), d1, strict(d1 > 0.0, -d1));
        let d2 = ad.a_zz(z);
        concave.record((z, f64::NAN), d2, strict(d2 < 0.0, d2));
    }
    let checks = vec![
        endpoints.finish("flux_endpoints", "f(0,c) = 0 and f(1,c) = 1"),
        monotone.finish(
            "flux_increasing",
            "f_s > 0 on (0,1), f_s(0,c) = f_s(1,c) = 0",
        ),
        s_shape.finish("flux_s_shaped", "f(.,c) has exactly one inflection, convex then concave"),
        dec_c.finish("flux_decreasing_in_c", "f_c < 0 on (0,1)^2"),
        origin.finish("adsorption_origin", "a(0) = 0"),
        increasing.finish("adsorption_increasing", "a_c > 0 on [0,1]"),
        concave.finish("adsorption_concave", "a_cc < 0 on [0,1]"),
    ];
    Ok(AssumptionReport { checks })
}
