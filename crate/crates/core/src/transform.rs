//! Map from Lagrange coordinates `(φ, x)` back to the physical plane.
//!
//! The inverse differential is `dt = U dφ + sU dx` (`U = 1/f`, `s = ϑ_ζ(U)`),
//! exact on the whole quadrant, with `t(φ, 0) = φ` at the inlet. Two paths
//! are used: along `x` at fixed `φ` ([`time_of`]), and along `φ` from the
//! lower boundary `φ = 0⁺`, whose image is the leading water front `t₀(x)`
//! ([`Column`]). The zero-saturation region `t < t₀(x)` collapses onto
//! `φ = 0`.

use rayon::prelude::*;

use crate::cone::{BelowOa, ConeSolution};
use crate::error::{Error, Result};
use crate::model::ModelPair;
use crate::quad::gauss_kronrod;

/// Five-point Gauss–Legendre rule on `[-1, 1]`.
const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL_X.iter().zip(GL_W).map(|(&x, w)| w * f(m + h * x)).sum::<f64>() * h
}

/// Sum of adaptive integrals over the pieces between `breaks`; each piece
/// sees only its own one-sided values.
fn piecewise<F: Fn(f64) -> Result<f64>>(f: &F, breaks: &[f64], tol: f64) -> Result<f64> {
    let total = breaks.last().unwrap() - breaks[0];
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let eta = 1e-13 * (1.0 + b.abs());
        if b - a <= 4.0 * eta {
            acc += (b - a) * f(0.5 * (a + b))?;
            continue;
        }
        let err = std::cell::Cell::new(None);
        let g = |y: f64| match f(y.clamp(a + eta, b - eta)) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                f64::NAN
            }
        };
        let share = (tol * (b - a) / total).max(1e-15);
        let r = gauss_kronrod(&g, a, b, share);
        if let Some(e) = err.take() {
            return Err(e);
        }
        acc += r?;
    }
    Ok(acc)
}

/// `φ`-lines through `x` across which `U` is discontinuous or has a kink:
/// chemical front, `TA`, upper fan edge, and the two straight lines
/// bounding the constant state below `OA`.
fn phi_breaks(cone: &ConeSolution, x: f64) -> Vec<f64> {
    let zf = &cone.zf;
    let ad = &cone.model.ads;
    let lam = cone.oa.lower.incline;
    let mut v = vec![
        zf.front_curve(x),
        zf.t_inj + ad.a_z(1.0) * x,
        zf.t_inj + ad.a_z(0.0) * x,
    ];
    if cone.oa.below == BelowOa::OriginFan {
        v.push(lam * x);
    }
    if x > zf.x_a {
        v.push(zf.phi_a + lam * (x - zf.x_a));
    }
    v.retain(|p| p.is_finite() && *p > 0.0);
    v
}

/// Abscissas where the horizontal line at height `φ` meets the same set of
/// lines, inside `(0, x)`.
fn x_breaks(cone: &ConeSolution, phi: f64, x: f64) -> Vec<f64> {
    let zf = &cone.zf;
    let ad = &cone.model.ads;
    let lam = cone.oa.lower.incline;
    let mut v = vec![0.0, x];
    let mut add = |b: f64| {
        if b.is_finite() && b > 0.0 && b < x {
            v.push(b);
        }
    };
    if phi > 0.0 {
        add(zf.front_x_of_phi(phi));
    }
    if phi > zf.t_inj {
        add((phi - zf.t_inj) / ad.a_z(1.0));
        add((phi - zf.t_inj) / ad.a_z(0.0));
    }
    if lam != 0.0 {
        if cone.oa.below == BelowOa::OriginFan {
            add(phi / lam);
        }
        add(zf.x_a + (phi - zf.phi_a) / lam);
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `sU = −F(U, ζ)` at `(φ, x)`.
fn t_x(cone: &ConeSolution, phi: f64, x: f64) -> Result<f64> {
    let (u, s, _) = cone.eval_state(phi, x)?;
    Ok(s * u)
}

/// `t(φ, x) = φ + ∫₀ˣ sU(φ, x′) dx′`, split at the known discontinuities.
pub fn time_of(cone: &ConeSolution, phi: f64, x: f64, tol: f64) -> Result<f64> {
    if !(phi >= 0.0 && x >= 0.0) {
        return Err(Error::OutOfRange(format!("(phi, x) = ({phi}, {x}) outside the quadrant")));
    }
    if x == 0.0 {
        return Ok(phi);
    }
    let br = x_breaks(cone, phi, x);
    Ok(phi + piecewise(&|y| t_x(cone, phi, y), &br, tol)?)
}

/// Leading water front `t₀(x)`: the image of `φ = 0⁺`.
pub fn t0(cone: &ConeSolution, x: f64, tol: f64) -> Result<f64> {
    time_of(cone, 0.0, x, tol)
}

pub fn t0_curve(cone: &ConeSolution, xs: &[f64], tol: f64) -> Result<Vec<f64>> {
    xs.par_iter().map(|&x| t0(cone, x, tol)).collect()
}

/// Physical position of the chemical front at time `t > 0`: the root of
/// `t(Φ(x), x) = t`, increasing in `x`.
pub fn chemical_front_x(cone: &ConeSolution, t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("front position needs t > 0, got {t}")));
    }
    let g = |x: f64| -> Result<f64> { Ok(time_of(cone, cone.zf.front_curve(x), x, tol)? - t) };
    let (mut lo, mut hi) = (0.0, t.max(1.0));
    while g(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoBracket { lo, hi });
        }
    }
    while hi - lo > 1e-12 * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy)]
pub struct ColumnOptions {
    /// Uniform panels over `[0, φ_max]` before splitting at breaks.
    pub panels: usize,
    /// Geometric refinement levels on each side of every break; `U` has a
    /// square-root profile next to a Jouguet-fed front.
    pub grading: usize,
    /// Newton corrections applied to the interpolated inverse.
    pub newton: usize,
    pub tol: f64,
}

impl Default for ColumnOptions {
    fn default() -> Self {
        Self { panels: 256, grading: 14, newton: 2, tol: 1e-11 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    ta: f64,
    tb: f64,
    /// One-sided `U` at the panel ends.
    ua: f64,
    ub: f64,
}

/// `t(φ)` along one vertical line `x = const`, tabulated on graded panels.
#[derive(Debug, Clone)]
pub struct Column {
    pub x: f64,
    pub t0: f64,
    panels: Vec<Panel>,
}

impl Column {
    pub fn build(cone: &ConeSolution, x: f64, phi_max: f64, opts: &ColumnOptions) -> Result<Self> {
        let t0 = if x > 0.0 { t0(cone, x, opts.tol)? } else { 0.0 };
        let phi_max = phi_max.max(1e-12);
        let n = opts.panels.max(1);
        let h = phi_max / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let mut breaks = if x > 0.0 { phi_breaks(cone, x) } else { vec![cone.zf.t_inj] };
        breaks.retain(|&b| b < phi_max);
        breaks.push(0.0);
        for &b in &breaks {
            nodes.push(b);
            for k in 1..=opts.grading {
                let d = h * 0.5f64.powi(k as i32);
                nodes.push(b - d);
                nodes.push(b + d);
            }
        }
        nodes.retain(|&p| (0.0..=phi_max).contains(&p));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
        let u = |p: f64| cone.eval_u(p, x);
        let spans: Vec<(f64, f64)> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
        let parts = spans
            .par_iter()
            .map(|&(a, b)| {
                let eta = 1e-13 * (1.0 + b.abs());
                let ua = u(a + eta)?;
                let ub = u(b - eta)?;
                let err = std::cell::Cell::new(None);
                let g = |p: f64| {
                    u(p).unwrap_or_else(|e| {
                        err.set(Some(e));
                        f64::NAN
                    })
                };
                let dt = gauss(&g, a, b);
                if let Some(e) = err.take() {
                    return Err(e);
                }
                Ok((ua, ub, dt))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = t0;
        let panels = spans
            .iter()
            .zip(parts)
            .map(|(&(a, b), (ua, ub, dt))| {
                let p = Panel { a, b, ta: t, tb: t + dt, ua, ub };
                t += dt;
                p
            })
            .collect();
        Ok(Column { x, t0, panels })
    }

    pub fn phi_max(&self) -> f64 {
        self.panels.last().map_or(0.0, |p| p.b)
    }

    pub fn t_max(&self) -> f64 {
        self.panels.last().map_or(self.t0, |p| p.tb)
    }

    fn hermite(p: &Panel, phi: f64) -> f64 {
        let h = p.b - p.a;
        let s = (phi - p.a) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * p.ta
            + (s3 - 2.0 * s2 + s) * h * p.ua
            + (-2.0 * s3 + 3.0 * s2) * p.tb
            + (s3 - s2) * h * p.ub
    }

    /// `t(φ)` from the table (cubic Hermite with the exact slopes `U`).
    pub fn time_at(&self, phi: f64) -> Option<f64> {
        if !(phi >= 0.0 && phi <= self.phi_max()) {
            return None;
        }
        let k = self.panels.partition_point(|p| p.b < phi).min(self.panels.len() - 1);
        Some(Self::hermite(&self.panels[k], phi))
    }

    /// `φ` with `t(φ, x) = t`, for `t₀ ≤ t ≤ t_max`.
    pub fn phi_at(&self, cone: &ConeSolution, t: f64, newton: usize) -> Result<f64> {
        if !(t >= self.t0 && t <= self.t_max()) {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside [{}, {}] at x = {}",
                self.t0,
                self.t_max(),
                self.x
            )));
        }
        let k = self.panels.partition_point(|p| p.tb < t).min(self.panels.len() - 1);
        let p = &self.panels[k];
        let (mut lo, mut hi) = (p.a, p.b);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if Self::hermite(p, m) < t {
                lo = m;
            } else {
                hi = m;
            }
        }
        let mut phi = 0.5 * (lo + hi);
        let eta = 1e-13 * (1.0 + p.b.abs());
        let u = |q: f64| cone.eval_u(q.clamp(p.a + eta, p.b - eta), self.x);
        for _ in 0..newton {
            let err = std::cell::Cell::new(None);
            let g = |q: f64| {
                u(q).unwrap_or_else(|e| {
                    err.set(Some(e));
                    f64::NAN
                })
            };
            let tp = p.ta + gauss(&g, p.a, phi);
            if let Some(e) = err.take() {
                return Err(e);
            }
            phi = (phi - (tp - t) / u(phi)?).clamp(p.a, p.b);
        }
        Ok(phi)
    }
}

/// Physical fields on a tensor grid; `s` and `c` are stored row by row in
/// time (`index = j·nx + i` for `(x_i, t_j)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub s: Vec<f64>,
    pub c: Vec<f64>,
    pub model: ModelPair,
    pub t_inj: f64,
    /// Producer and its resolution, for reports.
    pub label: String,
}

impl GridField {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.xs.len() + i
    }

    pub fn s_at(&self, i: usize, j: usize) -> f64 {
        self.s[self.index(i, j)]
    }

    pub fn c_at(&self, i: usize, j: usize) -> f64 {
        self.c[self.index(i, j)]
    }

    /// Trapezoidal `∫ w(s, c) dx` along the row `t = t_j`.
    pub fn integrate_row<W: Fn(f64, f64) -> f64>(&self, j: usize, w: W) -> f64 {
        let vals: Vec<f64> = (0..self.nx()).map(|i| w(self.s_at(i, j), self.c_at(i, j))).collect();
        self.xs
            .windows(2)
            .zip(vals.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }
}

/// `(s, c)` at `t` on a prepared column: zero ahead of the water front,
/// else the Lagrange state at the inverted `φ`.
pub fn state_on_column(cone: &ConeSolution, col: &Column, t: f64, newton: usize) -> Result<(f64, f64)> {
    if col.x == 0.0 {
        // inlet: s = 1, slug for t < t_inj
        return Ok((1.0, if t < cone.zf.t_inj { 1.0 } else { 0.0 }));
    }
    if t < col.t0 {
        return Ok((0.0, 0.0));
    }
    let phi = col.phi_at(cone, t, newton)?;
    let (_, s, z) = cone.eval_state(phi, col.x)?;
    Ok((s, z))
}

/// Samples `(s, c)` at every `(x_i, t_j)`.
pub fn sample_at(cone: &ConeSolution, xs: &[f64], ts: &[f64], opts: &ColumnOptions) -> Result<GridField> {
    if xs.iter().chain(ts).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::OutOfRange("grid coordinates must be finite and non-negative".into()));
    }
    let t_max = ts.iter().copied().fold(0.0, f64::max);
    let cols = xs
        .par_iter()
        .map(|&x| {
            let col = Column::build(cone, x, t_max, opts)?;
            ts.iter().map(|&t| state_on_column(cone, &col, t, opts.newton)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (nx, nt) = (xs.len(), ts.len());
    let mut s = vec![0.0; nx * nt];
    let mut c = vec![0.0; nx * nt];
    for (i, col) in cols.iter().enumerate() {
        for (j, &(sv, cv)) in col.iter().enumerate() {
            s[j * nx + i] = sv;
            c[j * nx + i] = cv;
        }
    }
    Ok(GridField {
        xs: xs.to_vec(),
        ts: ts.to_vec(),
        s,
        c,
        model: cone.model,
        t_inj: cone.zf.t_inj,
        label: "semi-analytic".into(),
    })
}

/// Uniform `nx × nt` grid on `[0, x_max] × [0, t_max]`, end points included.
pub fn sample_grid(
    cone: &ConeSolution,
    nx: usize,
    nt: usize,
    x_max: f64,
    t_max: f64,
    opts: &ColumnOptions,
) -> Result<GridField> {
    if nx < 2 || nt < 2 || !(x_max > 0.0) || !(t_max > 0.0) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("need nx, nt >= 2 and positive extents, got {nx}x{nt} on {x_max}x{t_max}"),
        });
    }
    let lin = |n: usize, m: f64| (0..n).map(|i| m * i as f64 / (n - 1) as f64).collect::<Vec<_>>();
    sample_at(cone, &lin(nx, x_max), &lin(nt, t_max), opts)
}
