//! Dormand–Prince 5(4) with Hairer's continuous extension and event location,
//! plus a classical fixed-step RK4 for reproducible phase-plane orbits.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 100_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Accepted steps with their interpolation coefficients.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    /// Step boundaries in integration order (monotone, either direction).
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    coef: Vec<[[f64; N]; 5]>,
    /// Set when integration stopped on an event.
    pub event: Option<f64>,
}

impl<const N: usize> DenseSolution<N> {
    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    pub fn y_end(&self) -> [f64; N] {
        *self.y.last().unwrap()
    }

    fn forward(&self) -> bool {
        self.t_end() >= self.t_start()
    }

    /// Whether `t` lies inside the integrated span (inclusive).
    pub fn covers(&self, t: f64) -> bool {
        let (a, b) = (self.t_start().min(self.t_end()), self.t_start().max(self.t_end()));
        t >= a && t <= b
    }

    /// Dense-output value; `t` is clamped to the integrated span.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let n = self.coef.len();
        if n == 0 {
            return self.y[0];
        }
        let fwd = self.forward();
        // index of the step containing t
        let k = if fwd {
            self.t[1..n].partition_point(|&s| s < t)
        } else {
            self.t[1..n].partition_point(|&s| s > t)
        };
        let (t0, t1) = (self.t[k], self.t[k + 1]);
        let theta = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        interp(&self.coef[k], theta)
    }
}

fn interp<const N: usize>(c: &[[f64; N]; 5], theta: f64) -> [f64; N] {
    let th1 = 1.0 - theta;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = c[0][i]
            + theta * (c[1][i] + th1 * (c[2][i] + theta * (c[3][i] + th1 * c[4][i])));
    }
    out
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// If `event` is given, integration stops at the first point where it
/// changes from `<= 0` to `> 0`; the crossing is located on the dense
/// output to `1e-14` relative in `t`.
pub fn dopri5<const N: usize, F, G>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerances,
    event: Option<G>,
) -> Result<DenseSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    G: Fn(f64, &[f64; N]) -> f64,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut sol = DenseSolution {
        t: vec![t0],
        y: vec![y0],
        coef: Vec::new(),
        event: None,
    };
    if span == 0.0 {
        return Ok(sol);
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut g_prev = event.as_ref().map(|g| g(t, &y));
    let mut h = initial_step(&f, t0, &y0, &k1, dir, span, tol)?.min(span);
    let mut steps = 0;
    let mut last_rejected = false;
    loop {
        if steps >= tol.max_steps {
            return Err(Error::NoConvergence(steps));
        }
        steps += 1;
        let remaining = (t1 - t).abs();
        if h >= remaining {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow(t));
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(
            t + C4 * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = f(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            t + hs,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y_new = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if h == remaining { t1 } else { t + hs };
        let k7 = f(t_new, &y_new)?;
        let mut err = 0.0;
        for i in 0..N {
            let e = hs
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
            continue;
        }
        let mut c = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y_new[i] - y[i];
            let bspl = hs * k1[i] - ydiff;
            c[0][i] = y[i];
            c[1][i] = ydiff;
            c[2][i] = bspl;
            c[3][i] = ydiff - hs * k7[i] - bspl;
            c[4][i] = hs
                * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        if let (Some(g), Some(gp)) = (event.as_ref(), g_prev) {
            let g_new = g(t_new, &y_new);
            if gp <= 0.0 && g_new > 0.0 {
                // locate on the continuous extension
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let tm = t + mid * hs;
                    if g(tm, &interp(&c, mid)) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo < 1e-15 {
                        break;
                    }
                }
                let te = t + hi * hs;
                let ye = interp(&c, hi);
                // rescale the last step's coefficients onto [t, te]
                sol.coef.push(c);
                sol.t.push(t_new);
                sol.y.push(y_new);
                truncate_last(&mut sol, te, ye, hi);
                sol.event = Some(te);
                return Ok(sol);
            }
            g_prev = Some(g_new);
        }
        sol.coef.push(c);
        sol.t.push(t_new);
        sol.y.push(y_new);
        t = t_new;
        y = y_new;
        k1 = k7;
        if t == t1 {
            return Ok(sol);
        }
        let mut fac = if err == 0.0 { 10.0 } else { 0.9 * err.powf(-0.2) };
        fac = fac.clamp(0.2, 10.0);
        if last_rejected {
            fac = fac.min(1.0);
        }
        last_rejected = false;
        h *= fac;
    }
}

/// Replace the final step `[t_k, t_{k+1}]` by `[t_k, te]` keeping the same
/// interpolant: stores the cut fraction by resampling the polynomial.
fn truncate_last<const N: usize>(sol: &mut DenseSolution<N>, te: f64, ye: [f64; N], frac: f64) {
    let k = sol.coef.len() - 1;
    let old = sol.coef[k];
    // New interpolant p(θ') = old(frac·θ'), re-expressed in the same basis by
    // sampling five points and solving the small collocation system.
    let thetas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let vals: Vec<[f64; N]> = thetas.iter().map(|&s| interp(&old, frac * s)).collect();
    let basis = |th: f64| -> [f64; 5] {
        let th1 = 1.0 - th;
        [1.0, th, th * th1, th * th1 * th, th * th1 * th * th1]
    };
    let mut a = [[0.0; 5]; 5];
    for (r, &th) in thetas.iter().enumerate() {
        a[r] = basis(th);
    }
    let mut c = [[0.0; N]; 5];
    for i in 0..N {
        let rhs: [f64; 5] = std::array::from_fn(|r| vals[r][i]);
        let x = solve5(a, rhs);
        for j in 0..5 {
            c[j][i] = x[j];
        }
    }
    sol.coef[k] = c;
    sol.t[k + 1] = te;
    sol.y[k + 1] = ye;
}

fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> [f64; 5] {
    for col in 0..5 {
        let piv = (col..5)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..5 {
            let m = a[r][col] / a[col][col];
            for cc in col..5 {
                a[r][cc] -= m * a[col][cc];
            }
            b[r] -= m * b[col];
        }
    }
    let mut x = [0.0; 5];
    for r in (0..5).rev() {
        let mut s = b[r];
        for cc in r + 1..5 {
            s -= a[r][cc] * x[cc];
        }
        x[r] = s / a[r][r];
    }
    x
}

fn initial_step<const N: usize, F>(
    f: &F,
    t0: f64,
    y0: &[f64; N],
    k1: &[f64; N],
    dir: f64,
    span: f64,
    tol: Tolerances,
) -> Result<f64>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (k1[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    // the trial point must stay inside the span, where f may be undefined beyond
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(0.5 * span);
    let y1 = axpy(y0, dir * h0, &[(1.0, k1)]);
    let k2 = f(t0 + dir * h0, &y1)?;
    let mut d2 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs();
        d2 += ((k2[i] - k1[i]) / sc).powi(2);
    }
    let d2 = (d2 / N as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1))
}

/// One classical RK4 step.
pub fn rk4_step<const N: usize, F>(f: &F, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let k1 = f(y);
    let k2 = f(&axpy(y, h, &[(0.5, &k1)]));
    let k3 = f(&axpy(y, h, &[(0.5, &k2)]));
    let k4 = f(&axpy(y, h, &[(1.0, &k3)]));
    axpy(
        y,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    )
}

type NoEvent<const N: usize> = fn(f64, &[f64; N]) -> f64;

/// Convenience wrapper without an event function.
pub fn dopri5_plain<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerances,
) -> Result<DenseSolution<N>>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    dopri5(f, t0, y0, t1, tol, None::<NoEvent<N>>)
}
