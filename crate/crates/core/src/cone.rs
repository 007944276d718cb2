//! The `U`-field: `U_x + 𝓕(U, ζ)_φ = 0` with `ζ` known.
//!
//! In the triangle `O T A` (ζ = 1) the solution is a centred fan. In the cone
//! between the rays `TA` (ζ = 1) and `ζ = 0` the characteristics are curves
//! built in fan coordinates `(ζ, ψ)`: one family starts on `TA`, and on
//! stretches of the front where the Jouguet sign condition holds a second
//! family starts tangentially on `Φ`. Where the condition fails, the front
//! is fed by characteristics that cross it from inside the cone; the
//! boundary curve of the crossing range touches `Φ` at a point where the
//! condition holds, and the Jouguet family restarts there.
//!
//! Characteristics are integrated in the saturation `s = ϑ_ζ(U)` rather than
//! in `U`, which keeps full precision as `U → 1` near the point `T`.

use rayon::prelude::*;

use crate::admissibility::{map_shock_to_original, LagrangeShock, ShockData};
use crate::error::{Error, Result};
use crate::model::{LagrangeFlux, ModelPair};
use crate::ode::{dopri5_plain, DenseSolution, Tolerances};
use crate::pchip::{hermite_local, pchip_eval};
use crate::roots::{bisect, golden_max};
use crate::zeta::ZetaField;

const S_TOL: f64 = 1e-15;
/// Sign changes beyond this many are treated as the unsupported regime.
pub const MAX_SIGN_CHANGES: usize = 16;

// ---------------------------------------------------------------------------
// Jouguet branch and the straight front

/// Saturation on the Jouguet branch: the root `s ∈ (s*(ζ), 1)` of
/// `𝓕_U = a(ζ)/ζ` (of `𝓕_U = a_ζ(0)` at ζ = 0).
pub fn jouguet_state(model: &ModelPair, z: f64) -> Result<f64> {
    speed_state(model, z, model.ads.chord_slope(z))
}

/// `s ∈ [s*(ζ), 1)` with `𝓕_U = λ ≥ 0` (where `𝓕_U` increases in `s`).
fn speed_state(model: &ModelPair, z: f64, lambda: f64) -> Result<f64> {
    let fl = model.flux();
    let lo = model.fluid.welge_point(z)?;
    if lambda <= 0.0 {
        return Ok(lo);
    }
    bisect(
        |s| if s >= 1.0 { f64::INFINITY } else { fl.f_u_at_s(s, z) - lambda },
        lo,
        1.0,
        S_TOL,
    )
}

/// `U - 1` at saturation `s`, without cancellation.
fn excess_at(model: &ModelPair, s: f64, z: f64) -> f64 {
    model.fluid.oil_fraction(s, z) / model.fluid.f(s, z)
}

pub fn u_jouguet(model: &ModelPair, z: f64) -> Result<f64> {
    Ok(1.0 + excess_at(model, jouguet_state(model, z)?, z))
}

/// Upper state of the straight front: `𝓕_U(U⁺, 1) = v(1,0)`, `U⁺ < U^max(1)`.
pub fn u_plus_oa(model: &ModelPair) -> Result<f64> {
    let s = speed_state(model, 1.0, model.v10()).map_err(|_| {
        Error::Regime("no upper state for the straight front".to_string())
    })?;
    Ok(1.0 + excess_at(model, s, 1.0))
}

/// State below a front with upper state `(U⁺, ζ⁺)` and slope `v*`, on the
/// `ζ = 0` side: the smaller-saturation root of the RH relation, i.e. the
/// larger `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerState {
    pub s: f64,
    pub u: f64,
    /// `𝓕_U(U⁻, 0)`, the incline of characteristics leaving the front.
    pub incline: f64,
    /// The RH line is tangent to `f(·,0)` (double root).
    pub degenerate: bool,
}

pub fn lower_state(model: &ModelPair, u_plus: f64, z_plus: f64, v_star: f64) -> Result<LowerState> {
    let fl = &model.fluid;
    let s_plus = model.flux().vartheta(u_plus, z_plus)?;
    // K f(s,0) = s + v*,  K = U⁺(v* + s⁺)
    let k = u_plus * (v_star + s_plus);
    let g = |s: f64| k * fl.f(s, 0.0) - s - v_star;
    let si = fl.inflection(0.0)?;
    if k * fl.f_s(si, 0.0) <= 1.0 {
        return Err(Error::InconsistentShock(format!(
            "no lower state: RH line steeper than f(.,0) (K = {k})"
        )));
    }
    // g falls, rises between the two roots of K f_s = 1, then falls again;
    // its maximum sits at the larger of those roots
    let s_top = bisect(|s| k * fl.f_s(s, 0.0) - 1.0, si, 1.0, S_TOL)?;
    let g_top = g(s_top);
    let (s, degenerate) = if g_top.abs() <= 1e-12 {
        (s_top, true)
    } else if g_top < 0.0 {
        return Err(Error::InconsistentShock(format!(
            "no lower state: RH line misses f(.,0) (gap {g_top:e})"
        )));
    } else {
        (bisect(g, 0.0, s_top, S_TOL)?, false)
    };
    let u = 1.0 + excess_at(model, s, 0.0);
    if !(u > u_plus) {
        return Err(Error::InconsistentShock(format!(
            "lower state U = {u} does not exceed upper state {u_plus}"
        )));
    }
    Ok(LowerState {
        s,
        u,
        incline: model.flux().f_u_at_s(s, 0.0),
        degenerate,
    })
}

/// What fills the region below the straight front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BelowOa {
    /// Constant `U⁻_OA` (characteristics leave the front with incline ≤ 0).
    Constant,
    /// Centred fan at the origin with inclines in `[0, 𝓕_U(U⁻_OA, 0)]`.
    OriginFan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OaFront {
    pub u_plus: f64,
    pub s_plus: f64,
    pub lower: LowerState,
    pub below: BelowOa,
}

impl OaFront {
    pub fn u_minus(&self) -> f64 {
        self.lower.u
    }
}

pub fn oa_front(model: &ModelPair) -> Result<OaFront> {
    let u_plus = u_plus_oa(model)?;
    let lower = lower_state(model, u_plus, 1.0, model.v10())?;
    Ok(OaFront {
        u_plus,
        s_plus: model.flux().vartheta(u_plus, 1.0)?,
        lower,
        below: if lower.incline > 0.0 { BelowOa::OriginFan } else { BelowOa::Constant },
    })
}

// ---------------------------------------------------------------------------
// Jouguet sign condition

/// Left-hand side of the Jouguet sign condition at `(U_J(ζ), ζ)`:
/// `−𝓕_UU 𝓕_ζ + (𝓕_Uζ + b/ζ) b`. Jouguet data are admissible where it is
/// negative.
pub fn jouguet_sign_lhs(model: &ModelPair, z: f64) -> Result<f64> {
    let s = jouguet_state(model, z)?;
    let d = model.flux().derivs_at_s(s, z);
    let ad = &model.ads;
    // b(ζ)/ζ = Γβ²/(1+βζ)² = −a_ζζ(1+βζ)/2: no 0/0 as ζ → 0
    let b_over_z = -0.5 * ad.a_zz(z) * (1.0 + ad.beta() * z);
    let b = b_over_z * z;
    Ok(-d.f_uu * d.f_z + (d.f_uz + b_over_z) * b)
}

/// Points in `(0, 1)` where [`jouguet_sign_lhs`] changes sign, ascending,
/// each refined to an interval of width `tol`.
pub fn find_sign_changes(model: &ModelPair, tol: f64) -> Result<Vec<f64>> {
    let n = 512;
    let mut zs: Vec<f64> = (0..32)
        .map(|i| 1e-6 * (1.0 / (n as f64 * 1e-6)).powf(i as f64 / 32.0))
        .collect();
    zs.extend((1..=n).map(|i| i as f64 / n as f64));
    let vals = zs
        .iter()
        .map(|&z| jouguet_sign_lhs(model, z))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    let mut last = (zs[0], vals[0]);
    for (&z, &v) in zs.iter().zip(&vals).skip(1) {
        if v == 0.0 {
            continue;
        }
        if last.1 != 0.0 && last.1.signum() != v.signum() {
            let r = bisect(
                |x| jouguet_sign_lhs(model, x).unwrap_or(f64::NAN),
                last.0,
                z,
                tol,
            )?;
            out.push(r);
            if out.len() > MAX_SIGN_CHANGES {
                return Err(Error::TooManySignChanges(out.len()));
            }
        }
        last = (z, v);
    }
    Ok(out)
}

/// Maximal interval of `[0, 1]` on which the sign condition does not change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stretch {
    pub lo: f64,
    pub hi: f64,
    pub jouguet: bool,
}

/// Stretches from the top (`ζ = 1`) down.
pub fn stretches(model: &ModelPair, changes: &[f64]) -> Result<Vec<Stretch>> {
    let mut pts = vec![0.0];
    pts.extend_from_slice(changes);
    pts.push(1.0);
    let mut out = Vec::new();
    for w in pts.windows(2).rev() {
        let mid = 0.5 * (w[0] + w[1]);
        out.push(Stretch { lo: w[0], hi: w[1], jouguet: jouguet_sign_lhs(model, mid)? < 0.0 });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Characteristics in fan coordinates

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// Starts on `TA` with `U₀ = 1 + excess`.
    Ta { excess: f64 },
    /// Starts tangentially on `Φ` at `ζ₀`.
    Jouguet { zeta0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharOptions {
    pub rtol: f64,
    pub atol: f64,
    /// A crossing of `Φ` is declared once `ψ − ψ_Φ` exceeds this.
    pub crossing_threshold: f64,
}

impl Default for CharOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-13, crossing_threshold: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub s: f64,
    pub u: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub zeta: f64,
    pub u: f64,
}

/// One characteristic `ζ ↦ (U(ζ), ψ(ζ))`, stored as `(s, ψ)` with dense
/// output; `ζ` decreases along the integration. A curve that leaves the cone
/// through `Φ` ends at its crossing.
#[derive(Debug, Clone)]
pub struct CharCurve {
    pub origin: Origin,
    pub crossing: Option<Crossing>,
    model: ModelPair,
    sol: DenseSolution<2>,
    z_stop: f64,
}

impl CharCurve {
    pub fn zeta_start(&self) -> f64 {
        self.sol.t_start()
    }

    pub fn zeta_end(&self) -> f64 {
        self.z_stop
    }

    pub fn covers(&self, z: f64) -> bool {
        z >= self.z_stop && z <= self.zeta_start()
    }

    pub fn point(&self, z: f64) -> CurvePoint {
        let [s, psi] = self.sol.eval(z);
        CurvePoint { s, u: 1.0 + excess_at(&self.model, s, z), psi }
    }

    pub fn psi(&self, z: f64) -> f64 {
        self.sol.eval(z)[1]
    }

    pub fn excess(&self, z: f64) -> f64 {
        excess_at(&self.model, self.sol.eval(z)[0], z)
    }

    /// Accepted integration nodes `(ζ, s, ψ)` within the curve's span.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let stop = self.z_stop;
        self.sol
            .t
            .iter()
            .zip(&self.sol.y)
            .filter(move |(&z, _)| z >= stop)
            .map(|(&z, y)| (z, y[0], y[1]))
    }
}

/// `(ds/dζ, dψ/dζ)` along a characteristic; fails if `𝓕_U ≤ a_ζ`.
fn char_rhs(model: &ModelPair, z: f64, s: f64) -> Result<[f64; 2]> {
    let fl = &model.fluid;
    let ad = &model.ads;
    let s = s.min(1.0);
    let (f, fs, fc) = (fl.f(s, z), fl.f_s(s, z), fl.f_c(s, z));
    let (az, azz) = (ad.a_z(z), ad.a_zz(z));
    // f − (s + a_ζ) f_s = f_s (𝓕_U − a_ζ)
    let den = f - (s + az) * fs;
    if !(den > 0.0) {
        return Err(Error::Consistency(format!(
            "characteristic lost transversality at zeta = {z}, s = {s} (F_U - a_z <= 0)"
        )));
    }
    Ok([fc * (s + az) / den, azz * az / (1.0 + az * az) + azz * fs / den])
}

/// Initial `(ζ₀, s₀, ψ₀)` of a characteristic.
pub fn char_start(model: &ModelPair, zf: &ZetaField, origin: Origin) -> Result<(f64, f64, f64)> {
    match origin {
        Origin::Ta { excess } => {
            let s = model.flux().vartheta_excess(excess, 1.0)?;
            let lambda = model.flux().f_u_at_s(s, 1.0);
            Ok((1.0, s, zf.psi_ta(lambda)))
        }
        Origin::Jouguet { zeta0 } => {
            Ok((zeta0, jouguet_state(model, zeta0)?, zf.psi_phi(zeta0)))
        }
    }
}

/// Integrates down to `z_stop` and records the first crossing of `Φ`
/// (`ψ − ψ_Φ` exceeding the threshold) above it.
fn integrate_to(
    model: &ModelPair,
    zf: &ZetaField,
    origin: Origin,
    z_stop: f64,
    opts: &CharOptions,
) -> Result<CharCurve> {
    let (z0, s0, psi0) = char_start(model, zf, origin)?;
    let tol = Tolerances { rtol: opts.rtol, atol: opts.atol, max_steps: 100_000 };
    let sol = dopri5_plain(|z, y: &[f64; 2]| char_rhs(model, z, y[0]), z0, [s0, psi0], z_stop, tol)?;
    let mut c = CharCurve { origin, crossing: None, model: *model, sol, z_stop };
    if let Some(z) = first_crossing(zf, &c, opts.crossing_threshold) {
        c.crossing = Some(Crossing { zeta: z, u: c.point(z).u });
        c.z_stop = z;
    }
    Ok(c)
}

/// Scans the dense output (eight samples per step) for the first place
/// where `ψ − ψ_Φ` rises above `thr`. Interior maxima between samples are
/// refined, so narrow excursions past `Φ` are not stepped over.
fn first_crossing(zf: &ZetaField, c: &CharCurve, thr: f64) -> Option<f64> {
    let e = |z: f64| c.psi(z) - zf.psi_phi(z) - thr;
    let ts = &c.sol.t;
    let mut zs = vec![ts[0]];
    for w in ts.windows(2) {
        zs.extend((1..=8).map(|j| w[0] + (w[1] - w[0]) * j as f64 / 8.0));
    }
    let vs: Vec<f64> = zs.iter().map(|&z| e(z)).collect();
    for j in 1..zs.len() {
        if vs[j - 1] <= 0.0 && vs[j] > 0.0 {
            return bisect(e, zs[j], zs[j - 1], 1e-15).ok();
        }
        if j + 1 < zs.len() && vs[j] > vs[j - 1] && vs[j] >= vs[j + 1] {
            let (a, b) = (zs[j + 1], zs[j - 1]);
            let zm = golden_max(e, a, b, 1e-13 * (1.0 + a.abs()));
            if e(zm) > 0.0 {
                return bisect(e, zm, zs[j - 1], 1e-15).ok();
            }
        }
    }
    None
}

/// Integrates a characteristic down to `ζ = 0`, ending it early if it
/// leaves the cone through `Φ`.
pub fn integrate_char(
    model: &ModelPair,
    zf: &ZetaField,
    origin: Origin,
    opts: &CharOptions,
) -> Result<CharCurve> {
    integrate_to(model, zf, origin, 0.0, opts)
}

// ---------------------------------------------------------------------------
// Family assembly

#[derive(Debug, Clone, Copy, PartialEq)]
enum Segment {
    /// `U₀ − 1` geometric in `[lo, hi]`.
    Ta { lo: f64, hi: f64 },
    /// `ζ₀` from `top` down to `bottom`.
    Jouguet { top: f64, bottom: f64 },
}

impl Segment {
    fn origin(&self, t: f64) -> Origin {
        match *self {
            Segment::Ta { lo, hi } => Origin::Ta { excess: lo * (hi / lo).powf(t) },
            Segment::Jouguet { top, bottom } => Origin::Jouguet { zeta0: top - t * (top - bottom) },
        }
    }
}

/// The part of the family still alive, as pieces `(segment, t_lo, t_hi)`.
#[derive(Debug, Clone)]
struct Path(Vec<(usize, f64, f64)>);

impl Path {
    fn len(&self) -> f64 {
        self.0.len() as f64
    }

    /// Segment and local parameter of the global parameter `p ∈ [0, len]`.
    fn at(&self, p: f64) -> (usize, f64) {
        let k = (p.floor() as usize).min(self.0.len() - 1);
        let (seg, a, b) = self.0[k];
        (seg, a + (p - k as f64).clamp(0.0, 1.0) * (b - a))
    }

    /// Keeps everything below `p`; returns the removed upper part.
    fn cut(&mut self, p: f64) -> Vec<(usize, f64, f64)> {
        let k = (p.floor() as usize).min(self.0.len() - 1);
        let (seg, t) = self.at(p);
        let mut upper = vec![(seg, t, self.0[k].2)];
        upper.extend_from_slice(&self.0[k + 1..]);
        self.0.truncate(k + 1);
        self.0[k].2 = t;
        upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeOptions {
    pub ta_curves: usize,
    pub jouguet_curves: usize,
    /// Extra geometrically spaced Jouguet curves toward `zeta_min`.
    pub tail_curves: usize,
    /// Subdivision of grid cells adjacent to touch points and sign changes.
    pub refine: usize,
    /// Extra curves spread over each range of front-crossing curves.
    pub crossing_curves: usize,
    pub ta_min_excess: f64,
    pub zeta_min: f64,
    pub sign_tol: f64,
    pub chars: CharOptions,
    /// Right end of the tabulated below-front values (default `64 x_A`).
    pub x_max: f64,
    pub below_front_samples: usize,
}

impl Default for ConeOptions {
    fn default() -> Self {
        Self {
            ta_curves: 128,
            jouguet_curves: 128,
            tail_curves: 32,
            refine: 8,
            crossing_curves: 64,
            ta_min_excess: 1e-8,
            zeta_min: 1e-6,
            sign_tol: 1e-12,
            chars: CharOptions::default(),
            x_max: 0.0,
            below_front_samples: 2048,
        }
    }
}

impl ConeOptions {
    /// Family grids scaled by `factor` (refinement studies, quick runs).
    pub fn scaled(factor: f64) -> Self {
        let d = Self::default();
        let sc = |n: usize| ((n as f64 * factor).round() as usize).max(4);
        Self {
            ta_curves: sc(d.ta_curves),
            jouguet_curves: sc(d.jouguet_curves),
            tail_curves: sc(d.tail_curves),
            crossing_curves: sc(d.crossing_curves),
            ..d
        }
    }
}

/// Boundary characteristic `C` of a range of front-crossing curves: it
/// touches `Φ` without crossing, and the Jouguet family continues from the
/// touch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub zeta_touch: f64,
    /// The sign change closing the failing stretch above the touch.
    pub zeta_b: f64,
    pub origin: Origin,
    /// `max (ψ − ψ_Φ)` on the touching curve (≈ 0 from below).
    pub psi_residual: f64,
    /// `U − U_J` at the touch point.
    pub u_residual: f64,
}

/// How the upper side of a stretch `[lo, hi]` of the front gets its `U`.
#[derive(Debug, Clone, PartialEq)]
pub enum FrontFeed {
    /// Jouguet condition, `U_Φ = U_J`.
    Jouguet,
    /// Characteristics arriving from inside the cone; `U_Φ` sampled at
    /// their crossings (`ζ` ascending).
    Crossing { zeta: Vec<f64>, u: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontPiece {
    pub lo: f64,
    pub hi: f64,
    pub feed: FrontFeed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeDiagnostics {
    /// `|ψ_TA(U⁺_OA) − ψ_Φ(1)|` and `|U_J(1) − U⁺_OA|`: the `A`
    /// characteristic is both a `TA` and a Jouguet curve.
    pub a_coincidence: (f64, f64),
    /// Largest `U_J − U_Φ` over crossing samples (≤ 0 when consistent).
    pub feed_below_jouguet: f64,
    /// First `x` beyond which below-front characteristics may collide.
    pub collision_x: f64,
}

/// Tabulated values just below the curved front.
#[derive(Debug, Clone, PartialEq)]
pub struct BelowFront {
    pub x: Vec<f64>,
    pub u_plus: Vec<f64>,
    pub u_minus: Vec<f64>,
    pub incline: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BelowFrontValues {
    pub x: f64,
    pub zeta_plus: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub v_star: f64,
    pub incline: f64,
}

#[derive(Debug, Clone)]
pub struct ConeSolution {
    pub model: ModelPair,
    pub zf: ZetaField,
    pub oa: OaFront,
    pub sign_changes: Vec<f64>,
    pub stretches: Vec<Stretch>,
    /// In family order: `ψ` increases along the list at any shared `ζ`.
    pub curves: Vec<CharCurve>,
    pub tangencies: Vec<Tangency>,
    /// Front pieces from `ζ = 1` down.
    pub front: Vec<FrontPiece>,
    /// `(ψ, ln(U − 1), 𝓕_U)` of the family on the upper edge `ζ = 0`,
    /// ascending in `ψ`.
    pub edge: Vec<(f64, f64, f64)>,
    pub below: BelowFront,
    pub diagnostics: ConeDiagnostics,
    spans: Vec<(f64, f64)>,
}

/// Builds the whole `U`-field for a slug of length `t_inj`.
///
/// The front is swept from `ζ = 1` down. On a stretch where the sign
/// condition holds and no characteristic arrives from inside, Jouguet
/// curves start on `Φ`. Where it fails, the front is fed by crossing
/// characteristics; feeding continues until the highest surviving member
/// touches `Φ`, which happens inside a stretch where the condition holds
/// (possibly below its upper end), and the Jouguet family restarts there.
pub fn build_cone(model: &ModelPair, zf: &ZetaField, opts: &ConeOptions) -> Result<ConeSolution> {
    let oa = oa_front(model)?;
    let sign_changes = find_sign_changes(model, opts.sign_tol)?;
    let stretches = stretches(model, &sign_changes)?;
    let co = &opts.chars;

    let mut segs = vec![Segment::Ta { lo: opts.ta_min_excess, hi: oa.u_plus - 1.0 }];
    let mut path = Path(vec![(0, 0.0, 1.0)]);
    let mut cuts: Vec<(usize, f64, f64)> = Vec::new();
    let mut tangencies = Vec::new();
    let mut pieces: Vec<(f64, f64, bool)> = Vec::new();
    let mut feed_top: Option<f64> = None;
    for st in &stretches {
        if !st.jouguet {
            feed_top.get_or_insert(st.hi);
            continue;
        }
        let mut top = st.hi;
        if let Some(ftop) = feed_top {
            let (p_below, zc) = split_path(model, zf, &segs, &path, st.lo, co)?;
            if st.lo > 0.0 && zc < st.lo + 1e-7 {
                // crossing continues through this stretch
                continue;
            }
            let (seg, t) = path.at(p_below);
            let tan = touch_point(model, zf, segs[seg].origin(t), st, zc, co)?;
            tangencies.push(tan);
            let upper = path.cut(p_below);
            cuts.push(upper[0]);
            pieces.push((tan.zeta_touch, ftop, false));
            feed_top = None;
            top = tan.zeta_touch;
        }
        pieces.push((st.lo, top, true));
        let bottom = st.lo.max(opts.zeta_min);
        if top > bottom {
            segs.push(Segment::Jouguet { top, bottom });
            path.0.push((segs.len() - 1, 0.0, 1.0));
        }
    }
    if let Some(ftop) = feed_top {
        return Err(Error::Regime(format!(
            "front fed from inside down to zeta = 0 (feeding starts at {ftop})"
        )));
    }

    let origins = family_origins(&segs, &cuts, &sign_changes, opts);
    let curves = origins
        .par_iter()
        .map(|&o| integrate_char(model, zf, o, co))
        .collect::<Result<Vec<_>>>()?;
    let spans = curves.iter().map(|c| (c.zeta_end(), c.zeta_start())).collect();

    let mut cone = ConeSolution {
        model: *model,
        zf: *zf,
        oa,
        sign_changes,
        stretches,
        curves,
        tangencies,
        front: Vec::new(),
        edge: Vec::new(),
        below: BelowFront { x: vec![], u_plus: vec![], u_minus: vec![], incline: vec![] },
        diagnostics: ConeDiagnostics {
            a_coincidence: (0.0, 0.0),
            feed_below_jouguet: f64::NEG_INFINITY,
            collision_x: f64::INFINITY,
        },
        spans,
    };
    cone.check_family_order()?;
    cone.collect_front(&pieces)?;
    cone.edge = cone
        .active(0.0)
        .into_iter()
        .map(|i| {
            let c = &cone.curves[i];
            let p = c.point(0.0);
            (p.psi, (p.u - 1.0).ln(), model.flux().f_u_at_s(p.s, 0.0))
        })
        .collect();
    let lam_a = model.flux().f_u_at_s(oa.s_plus, 1.0);
    cone.diagnostics.a_coincidence = (
        (zf.psi_ta(lam_a) - zf.psi_phi(1.0)).abs(),
        (u_jouguet(model, 1.0)? - oa.u_plus).abs(),
    );
    let x_max = if opts.x_max > zf.x_a { opts.x_max } else { 64.0 * zf.x_a };
    cone.tabulate_below_front(x_max, opts.below_front_samples.max(16))?;
    Ok(cone)
}

/// Splits the alive family at `ζ = lo`: returns the global parameter of the
/// highest member that reaches `lo` inside the cone, and the crossing `ζ`
/// of the members just above it.
fn split_path(
    model: &ModelPair,
    zf: &ZetaField,
    segs: &[Segment],
    path: &Path,
    lo: f64,
    co: &CharOptions,
) -> Result<(f64, f64)> {
    let cross = |p: f64| -> Option<f64> {
        let (seg, t) = path.at(p);
        integrate_to(model, zf, segs[seg].origin(t), lo, co)
            .ok()
            .and_then(|c| c.crossing.map(|x| x.zeta))
    };
    let n = path.len();
    if cross(0.0).is_some() || cross(n).is_none() {
        return Err(Error::Regime(format!(
            "cannot split the characteristic family at zeta = {lo}"
        )));
    }
    let (mut a, mut b) = (0.0, n);
    while b - a > 1e-15 * n {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if cross(m).is_some() {
            b = m;
        } else {
            a = m;
        }
    }
    Ok((a, cross(b).unwrap_or(lo)))
}

/// Locates where the boundary member `origin` touches `Φ`, near the
/// crossing `zc` of its neighbours.
fn touch_point(
    model: &ModelPair,
    zf: &ZetaField,
    origin: Origin,
    st: &Stretch,
    zc: f64,
    co: &CharOptions,
) -> Result<Tangency> {
    let c = integrate_to(model, zf, origin, st.lo, &CharOptions { crossing_threshold: f64::INFINITY, ..*co })?;
    let e = |z: f64| c.psi(z) - zf.psi_phi(z);
    let w = 0.05 * (c.zeta_start() - st.lo);
    let (a, b) = ((zc - w).max(st.lo), (zc + w).min(c.zeta_start()));
    let z = golden_max(e, a, b, 1e-12).min(st.hi);
    Ok(Tangency {
        zeta_touch: z,
        zeta_b: st.hi,
        origin,
        psi_residual: e(z),
        u_residual: c.point(z).u - u_jouguet(model, z)?,
    })
}

/// Parameter grid of every family, in family order.
fn family_origins(
    segs: &[Segment],
    cuts: &[(usize, f64, f64)],
    changes: &[f64],
    opts: &ConeOptions,
) -> Vec<Origin> {
    let is_change = |z: f64| changes.iter().any(|&c| (c - z).abs() < 1e-13);
    let r = opts.refine.max(1) as f64;
    let mut ts: Vec<Vec<f64>> = vec![Vec::new(); segs.len()];
    for (k, seg) in segs.iter().enumerate() {
        match *seg {
            Segment::Ta { .. } => {
                let n = opts.ta_curves.max(2);
                ts[k].extend((0..n).map(|i| i as f64 / (n - 1) as f64));
                // members from A close to the top leave nearly tangent to Φ;
                // ψ bends sharply in the excess there
                if let Segment::Ta { lo, hi } = *seg {
                    let d1 = 1.0 - (lo / hi).powf(1.0 / (n - 1) as f64);
                    for j in 1..=2 * opts.refine {
                        let d = d1 * 0.5f64.powi(j as i32);
                        ts[k].push(1.0 + (1.0 - d).ln() / (hi / lo).ln());
                    }
                }
            }
            Segment::Jouguet { top, bottom } => {
                let n = opts.jouguet_curves.max(2);
                let h = 1.0 / n as f64;
                // t = 0 repeats the member that ends the alive family
                ts[k].extend((1..=n).map(|i| i as f64 * h));
                for j in 1..opts.refine {
                    ts[k].push(j as f64 * h / r);
                    if is_change(bottom) {
                        ts[k].push(1.0 - j as f64 * h / r);
                    }
                }
                if bottom <= opts.zeta_min * (1.0 + 1e-12) && opts.tail_curves > 0 {
                    // geometric tail of ζ₀ between the last uniform node and ζ_min
                    let z_hi = bottom + (top - bottom) * h;
                    for i in 1..opts.tail_curves {
                        let z = z_hi * (bottom / z_hi).powf(i as f64 / opts.tail_curves as f64);
                        ts[k].push((top - z) / (top - bottom));
                    }
                }
            }
        }
    }
    for &(k, a, b) in cuts {
        let h = match segs[k] {
            Segment::Ta { .. } => 1.0 / (opts.ta_curves.max(2) - 1) as f64,
            Segment::Jouguet { .. } => 1.0 / opts.jouguet_curves.max(2) as f64,
        };
        ts[k].push(a);
        for j in 1..=opts.refine {
            let d = j as f64 * h / r;
            ts[k].push((a - d).max(0.0));
            ts[k].push((a + d).min(1.0));
        }
        let m = opts.crossing_curves;
        for j in 1..=m {
            ts[k].push(a + (b - a) * j as f64 / m as f64);
        }
    }
    let mut out = Vec::new();
    for (k, t) in ts.iter_mut().enumerate() {
        t.sort_by(f64::total_cmp);
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        out.extend(t.iter().map(|&t| segs[k].origin(t)));
    }
    out
}

impl ConeSolution {
    fn flux(&self) -> LagrangeFlux {
        self.model.flux()
    }

    /// Indices of the curves alive at `ζ`, in family order.
    pub fn active(&self, z: f64) -> Vec<usize> {
        (0..self.curves.len())
            .filter(|&i| {
                let (a, b) = self.spans[i];
                z >= a && z <= b
            })
            .collect()
    }

    fn check_family_order(&self) -> Result<()> {
        let mut zs: Vec<f64> = (0..=256).map(|i| i as f64 / 256.0).collect();
        zs.extend(self.sign_changes.iter().map(|&z| z * (1.0 - 1e-9)));
        for z in zs {
            let act = self.active(z);
            let pts: Vec<CurvePoint> = act.iter().map(|&i| self.curves[i].point(z)).collect();
            for (w, ix) in pts.windows(2).zip(act.windows(2)) {
                if !(w[1].psi > w[0].psi) || w[1].u < w[0].u {
                    return Err(Error::FamilyOrder {
                        zeta: z,
                        detail: format!(
                            "curves {:?} / {:?}: psi {} -> {}, U {} -> {}",
                            self.curves[ix[0]].origin,
                            self.curves[ix[1]].origin,
                            w[0].psi,
                            w[1].psi,
                            w[0].u,
                            w[1].u
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    fn collect_front(&mut self, pieces: &[(f64, f64, bool)]) -> Result<()> {
        let mut worst = f64::NEG_INFINITY;
        let mut front = Vec::new();
        for &(lo, hi, jouguet) in pieces {
            if jouguet {
                front.push(FrontPiece { lo, hi, feed: FrontFeed::Jouguet });
                continue;
            }
            let mut pts: Vec<(f64, f64)> = self
                .curves
                .iter()
                .filter_map(|c| c.crossing)
                .filter(|c| c.zeta >= lo && c.zeta <= hi)
                .map(|c| (c.zeta, c.u))
                .collect();
            let u_hi = if hi >= 1.0 { self.oa.u_plus } else { u_jouguet(&self.model, hi)? };
            pts.push((lo, u_jouguet(&self.model, lo)?));
            pts.push((hi, u_hi));
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
            for &(z, u) in &pts {
                worst = worst.max(u_jouguet(&self.model, z)? - u);
            }
            front.push(FrontPiece {
                lo,
                hi,
                feed: FrontFeed::Crossing {
                    zeta: pts.iter().map(|p| p.0).collect(),
                    u: pts.iter().map(|p| p.1).collect(),
                },
            });
        }
        self.front = front;
        self.diagnostics.feed_below_jouguet = worst;
        Ok(())
    }

    /// Front piece containing `ζ`.
    pub fn front_piece(&self, z: f64) -> &FrontPiece {
        self.front
            .iter()
            .find(|p| z >= p.lo && z <= p.hi)
            .unwrap_or(&self.front[0])
    }

    /// `U_Φ(ζ)`: the value on the upper side of the front point carrying `ζ`.
    pub fn u_phi(&self, z: f64) -> Result<f64> {
        if z >= 1.0 {
            return Ok(self.oa.u_plus);
        }
        match &self.front_piece(z).feed {
            FrontFeed::Jouguet => u_jouguet(&self.model, z),
            FrontFeed::Crossing { zeta, u } => Ok(pchip_eval(zeta, u, z)),
        }
    }

    /// `U` at fan coordinates `(ζ, ψ)` inside the cone.
    ///
    /// Between curves, `ln(U − 1)` is interpolated by a local cubic. The log
    /// is close to linear near `T`, where `U − 1 ∝ e^{2ψ}`. Jouguet curves
    /// leave `Φ` tangentially, so next to a Jouguet-fed front `U` behaves
    /// like `√(ψ_Φ − ψ)`. Intervals topped by a Jouguet member are therefore
    /// interpolated in `w = −√(ψ_Φ(ζ) − ψ)`, and all others in `ψ`.
    pub fn eval_fan(&self, z: f64, psi: f64) -> Result<f64> {
        let act = self.active(z);
        if act.is_empty() {
            return Err(Error::Consistency(format!("no characteristic alive at zeta = {z}")));
        }
        let psi_top = if z > 0.0 { self.zf.psi_phi(z) } else { f64::INFINITY };
        let lex = |c: &CharCurve| -> (f64, f64) {
            let [s, p] = c.sol.eval(z);
            (p, excess_at(&self.model, s, z).ln())
        };
        let first = lex(&self.curves[act[0]]);
        if psi <= first.0 {
            // U ≡ 1 is the degenerate member at ψ = −∞
            return Ok(1.0 + (first.1 + 2.0 * (psi - first.0)).exp());
        }
        let last = lex(&self.curves[*act.last().unwrap()]);
        let with_top = psi_top.is_finite() && psi_top > last.0 + 1e-12;
        let n = act.len() + usize::from(with_top);
        let node = |j: usize| -> (f64, f64) {
            if j < act.len() {
                lex(&self.curves[act[j]])
            } else {
                (psi_top, (self.u_phi(z).unwrap_or(f64::NAN) - 1.0).ln())
            }
        };
        let top = node(n - 1);
        if psi >= top.0 {
            return Ok(1.0 + top.1.exp());
        }
        let (mut lo, mut hi) = (0usize, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if node(mid).0 <= psi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let jouguet_above = if hi < act.len() {
            matches!(self.curves[act[hi]].origin, Origin::Jouguet { .. })
        } else {
            matches!(self.front_piece(z).feed, FrontFeed::Jouguet)
        };
        let l = if jouguet_above && psi_top.is_finite() {
            let w = |p: f64| -(psi_top - p).max(0.0).sqrt();
            hermite_local(n, lo, |j| { let (p, l) = node(j); (w(p), l) }, w(psi))
        } else {
            hermite_local(n, lo, node, psi)
        };
        Ok(1.0 + l.exp())
    }

    /// `U(φ, x)` anywhere in the quadrant, with the upper-side value on
    /// the fronts.
    pub fn eval_u(&self, phi: f64, x: f64) -> Result<f64> {
        let zf = &self.zf;
        let ad = &self.model.ads;
        if x <= 0.0 {
            return Ok(1.0);
        }
        if phi < zf.front_curve(x) {
            return self.eval_below(phi, x);
        }
        if phi < zf.t_inj + ad.a_z(1.0) * x {
            return self.triangle(phi / x);
        }
        if phi >= zf.t_inj + ad.a_z(0.0) * x {
            return self.eval_above(phi, x);
        }
        let z = zf.eval_zeta(phi, x);
        self.eval_fan(z, zf.psi_of_x(z, x))
    }

    /// Triangle fan: `𝓕_U(U, 1) = φ/x`.
    pub fn triangle(&self, slope: f64) -> Result<f64> {
        let s = speed_state(&self.model, 1.0, slope.max(self.zf.v10))?;
        Ok(1.0 + excess_at(&self.model, s, 1.0))
    }

    fn edge_u(&self, psi: f64) -> f64 {
        let e = &self.edge;
        if psi <= e[0].0 {
            return 1.0 + (e[0].1 + 2.0 * (psi - e[0].0)).exp();
        }
        let n = e.len();
        if psi >= e[n - 1].0 {
            return 1.0 + e[n - 1].1.exp();
        }
        let k = e.partition_point(|p| p.0 <= psi) - 1;
        1.0 + hermite_local(n, k, |j| (e[j].0, e[j].1), psi).exp()
    }

    /// Incline `𝓕_U(U, 0)` of the straight characteristic leaving the upper
    /// edge at `ψ`.
    fn edge_incline(&self, psi: f64) -> f64 {
        let e = &self.edge;
        let n = e.len();
        if psi > e[0].0 && psi < e[n - 1].0 {
            let k = e.partition_point(|p| p.0 <= psi) - 1;
            return hermite_local(n, k, |j| (e[j].0, e[j].2), psi);
        }
        if psi >= e[n - 1].0 {
            return e[n - 1].2;
        }
        let fl = self.flux();
        fl.vartheta_excess(self.edge_u(psi) - 1.0, 0.0)
            .map(|s| fl.f_u_at_s(s, 0.0))
            .unwrap_or(f64::NAN)
    }

    /// Above the cone: straight characteristics from the upper edge.
    fn eval_above(&self, phi: f64, x: f64) -> Result<f64> {
        let zf = &self.zf;
        let a0 = self.model.ads.a_z(0.0);
        let norm = (1.0 + a0 * a0).sqrt();
        let resid = |pe: f64| -> f64 {
            let xe = pe.exp() / norm;
            if xe >= x {
                return zf.t_inj + a0 * x - phi;
            }
            zf.t_inj + a0 * xe + self.edge_incline(pe) * (x - xe) - phi
        };
        let hi = zf.psi_of_x(0.0, x);
        if resid(hi) >= 0.0 {
            return Ok(self.edge_u(hi));
        }
        let mut lo = hi - 1.0;
        while resid(lo) <= 0.0 {
            lo -= 2.0;
            if lo < hi - 200.0 {
                return Ok(1.0);
            }
        }
        let pe = bisect(resid, lo, hi, 1e-13 * (1.0 + hi.abs()))?;
        Ok(self.edge_u(pe))
    }

    /// Values just below the curved front at `x > x_A` (direct solve).
    pub fn below_front_values(&self, x: f64) -> Result<BelowFrontValues> {
        let fp = self.zf.front_phi(x)?;
        let u_plus = self.u_phi(fp.zeta)?;
        let low = lower_state(&self.model, u_plus, fp.zeta, fp.slope)?;
        Ok(BelowFrontValues {
            x,
            zeta_plus: fp.zeta,
            u_plus,
            u_minus: low.u,
            v_star: fp.slope,
            incline: low.incline,
        })
    }

    fn tabulate_below_front(&mut self, x_max: f64, n: usize) -> Result<()> {
        let xa = self.zf.x_a;
        let d0 = 1e-9 * xa;
        let xs: Vec<f64> = std::iter::once(xa)
            .chain((0..n).map(|i| xa + d0 * ((x_max - xa) / d0).powf(i as f64 / (n - 1) as f64)))
            .collect();
        let vals = xs
            .par_iter()
            .map(|&x| {
                if x <= xa {
                    Ok(BelowFrontValues {
                        x,
                        zeta_plus: 1.0,
                        u_plus: self.oa.u_plus,
                        u_minus: self.oa.lower.u,
                        v_star: self.zf.v10,
                        incline: self.oa.lower.incline,
                    })
                } else {
                    self.below_front_values(x)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        // first point where neighbouring characteristics meet
        let mut coll = f64::INFINITY;
        for w in vals.windows(2) {
            let dl = (w[1].incline - w[0].incline) / (w[1].x - w[0].x);
            if dl < 0.0 {
                let xi = w[0].x;
                let fp = self.zf.front_phi(xi.max(xa))?;
                let gap = fp.slope - w[0].incline;
                coll = coll.min(xi + gap / -dl);
            }
        }
        self.diagnostics.collision_x = coll;
        self.below = BelowFront {
            x: xs,
            u_plus: vals.iter().map(|v| v.u_plus).collect(),
            u_minus: vals.iter().map(|v| v.u_minus).collect(),
            incline: vals.iter().map(|v| v.incline).collect(),
        };
        Ok(())
    }

    fn below_at(&self, xi: f64) -> Result<(f64, f64)> {
        let b = &self.below;
        if xi <= *b.x.last().unwrap() {
            Ok((pchip_eval(&b.x, &b.u_minus, xi), pchip_eval(&b.x, &b.incline, xi)))
        } else {
            let v = self.below_front_values(xi)?;
            Ok((v.u_minus, v.incline))
        }
    }

    /// Below the chemical front.
    fn eval_below(&self, phi: f64, x: f64) -> Result<f64> {
        let zf = &self.zf;
        let lam_a = self.oa.lower.incline;
        if x > zf.x_a {
            let line_a = zf.phi_a + lam_a * (x - zf.x_a);
            if phi > line_a {
                if x >= self.diagnostics.collision_x {
                    return Err(Error::UnsupportedRegion { phi, x });
                }
                let r = |xi: f64| -> f64 {
                    match self.below_at(xi) {
                        Ok((_, lam)) => zf.front_curve(xi) + lam * (x - xi) - phi,
                        Err(_) => f64::NAN,
                    }
                };
                let xi = bisect(r, zf.x_a, x, 1e-14 * x)?;
                return Ok(self.below_at(xi)?.0);
            }
        }
        if self.oa.below == BelowOa::OriginFan && phi < lam_a * x {
            let s = speed_state(&self.model, 0.0, phi / x)?;
            return Ok(1.0 + excess_at(&self.model, s, 0.0));
        }
        Ok(self.oa.lower.u)
    }

    /// Saturation and concentration at `(φ, x)` (upper side on fronts).
    pub fn eval_state(&self, phi: f64, x: f64) -> Result<(f64, f64, f64)> {
        let u = self.eval_u(phi, x)?;
        let z = self.zf.eval_zeta(phi, x);
        let s = self.flux().vartheta_excess((u - 1.0).max(0.0), z)?;
        Ok((u, s, z))
    }
}

/// A discontinuity of the constructed solution, in original coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmittedShock {
    pub label: String,
    /// Where it was sampled (`NaN` for the self-similar fronts).
    pub x: f64,
    pub shock: ShockData,
    /// Lagrange image; `None` for the leading water front, which borders
    /// the zero-saturation region.
    pub lagrange: Option<LagrangeShock>,
}

impl ConeSolution {
    /// The leading water front, the straight chemical front and `n` samples
    /// of the curved front on `[x_A, x_max]` (log-spaced).
    pub fn emitted_shocks(&self, n: usize, x_max: f64) -> Result<Vec<EmittedShock>> {
        let m = &self.model;
        let sw = m.fluid.welge_point(0.0)?;
        let mut out = vec![EmittedShock {
            label: "water-front".into(),
            x: f64::NAN,
            shock: ShockData::s_shock(m, sw, 0.0, 0.0)?,
            lagrange: None,
        }];
        let oa = LagrangeShock {
            u_minus: self.oa.u_minus(),
            u_plus: self.oa.u_plus,
            z_minus: 0.0,
            z_plus: 1.0,
            v_star: self.zf.v10,
        };
        out.push(EmittedShock {
            label: "straight-front".into(),
            x: f64::NAN,
            shock: map_shock_to_original(m, &oa)?,
            lagrange: Some(oa),
        });
        let xa = self.zf.x_a;
        for k in 0..n {
            let x = if n == 1 { xa } else { xa * (x_max / xa).powf(k as f64 / (n - 1) as f64) };
            // strictly past A, where the front carries ζ < 1
            let x = x.max(xa * (1.0 + 1e-9));
            let b = self.below_front_values(x)?;
            let ls = LagrangeShock {
                u_minus: b.u_minus,
                u_plus: b.u_plus,
                z_minus: 0.0,
                z_plus: b.zeta_plus,
                v_star: b.v_star,
            };
            out.push(EmittedShock {
                label: "curved-front".into(),
                x,
                shock: map_shock_to_original(m, &ls)?,
                lagrange: Some(ls),
            });
        }
        Ok(out)
    }
}
