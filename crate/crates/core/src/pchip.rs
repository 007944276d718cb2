//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson slopes).

/// Evaluates the PCHIP interpolant through `(xs, ys)` at `x`.
///
/// `xs` must be strictly increasing; `x` outside the range is clamped.
/// Slopes are computed from the local stencil only, so a single evaluation
/// touches at most four nodes.
pub fn pchip_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert_eq!(n, ys.len());
    if n == 1 {
        return ys[0];
    }
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2);
    let h = xs[k + 1] - xs[k];
    let d0 = node_slope(xs, ys, k);
    let d1 = node_slope(xs, ys, k + 1);
    let t = (x - xs[k]) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[k] + h10 * h * d0 + h01 * ys[k + 1] + h11 * h * d1
}

/// Same interpolant with nodes fetched on demand: `node(i)` returns the
/// `i`-th of `n` nodes `(x_i, y_i)`, and `k` is the interval `[x_k, x_{k+1}]`
/// containing `x`. At most four nodes are requested.
pub fn pchip_local<F>(n: usize, k: usize, node: F, x: f64) -> f64
where
    F: Fn(usize) -> (f64, f64),
{
    let lo = k.saturating_sub(1);
    let hi = (k + 2).min(n - 1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=hi).map(&node).unzip();
    // the window always holds both neighbours of an interior node, so the
    // local slopes equal the global ones
    let kk = k - lo;
    let h = xs[kk + 1] - xs[kk];
    let d0 = node_slope(&xs, &ys, kk);
    let d1 = node_slope(&xs, &ys, kk + 1);
    let t = ((x - xs[kk]) / h).clamp(0.0, 1.0);
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * ys[kk]
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * ys[kk + 1]
        + (t3 - t2) * h * d1
}

/// Like [`pchip_local`] but with unlimited three-point (parabolic) slopes:
/// third-order on smooth data, without the monotonicity guarantee.
pub fn hermite_local<F>(n: usize, k: usize, node: F, x: f64) -> f64
where
    F: Fn(usize) -> (f64, f64),
{
    let lo = k.saturating_sub(1);
    let hi = (k + 2).min(n - 1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (lo..=hi).map(&node).unzip();
    let kk = k - lo;
    let h = xs[kk + 1] - xs[kk];
    let d0 = parabolic_slope(&xs, &ys, kk);
    let d1 = parabolic_slope(&xs, &ys, kk + 1);
    let t = ((x - xs[kk]) / h).clamp(0.0, 1.0);
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * ys[kk]
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * ys[kk + 1]
        + (t3 - t2) * h * d1
}

fn parabolic_slope(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    let n = xs.len();
    if n == 2 {
        return secant(xs, ys, 0);
    }
    let i = k.clamp(1, n - 2) - 1;
    let (h0, h1) = (xs[i + 1] - xs[i], xs[i + 2] - xs[i + 1]);
    let (d0, d1) = (secant(xs, ys, i), secant(xs, ys, i + 1));
    match k - i {
        0 => ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1),
        1 => (h1 * d0 + h0 * d1) / (h0 + h1),
        _ => ((2.0 * h1 + h0) * d1 - h1 * d0) / (h0 + h1),
    }
}

fn secant(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])
}

fn node_slope(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    let n = xs.len();
    if n == 2 {
        return secant(xs, ys, 0);
    }
    if k == 0 || k == n - 1 {
        // three-point one-sided estimate, limited for shape preservation
        let (i, sgn) = if k == 0 { (0, 1.0) } else { (n - 3, -1.0) };
        let (h0, h1) = (xs[i + 1] - xs[i], xs[i + 2] - xs[i + 1]);
        let (del0, del1) = (secant(xs, ys, i), secant(xs, ys, i + 1));
        let (ha, hb, da, db) = if sgn > 0.0 {
            (h0, h1, del0, del1)
        } else {
            (h1, h0, del1, del0)
        };
        let d = ((2.0 * ha + hb) * da - ha * db) / (ha + hb);
        if d.signum() != da.signum() {
            0.0
        } else if da.signum() != db.signum() && d.abs() > 3.0 * da.abs() {
            3.0 * da
        } else {
            d
        }
    } else {
        let (h0, h1) = (xs[k] - xs[k - 1], xs[k + 1] - xs[k]);
        let (del0, del1) = (secant(xs, ys, k - 1), secant(xs, ys, k));
        if del0 == 0.0 || del1 == 0.0 || del0.signum() != del1.signum() {
            0.0
        } else {
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            (w1 + w2) / (w1 / del0 + w2 / del1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_and_linear_data() {
        let xs = [0.0, 0.5, 1.5, 2.0];
        let ys = [1.0, 2.0, 4.0, 5.0];
        for (x, y) in xs.iter().zip(ys) {
            assert!((pchip_eval(&xs, &ys, *x) - y).abs() < 1e-14);
        }
        assert!((pchip_eval(&xs, &ys, 1.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn local_matches_global() {
        let xs: Vec<f64> = (0..12).map(|i| (i as f64).powf(1.3)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (x * 0.4).sin() + x).collect();
        for i in 0..=300 {
            let x = xs[11] * i as f64 / 300.0;
            let k = xs.partition_point(|&v| v <= x).saturating_sub(1).min(10);
            let a = pchip_eval(&xs, &ys, x);
            let b = pchip_local(12, k, |j| (xs[j], ys[j]), x);
            assert!((a - b).abs() < 1e-13, "{x}: {a} {b}");
        }
    }

    #[test]
    fn preserves_monotonicity_of_steep_data() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [0.0, 0.0, 1.0, 1.0, 1.0];
        let mut prev = -1.0;
        for i in 0..=400 {
            let v = pchip_eval(&xs, &ys, i as f64 / 100.0);
            assert!(v >= prev - 1e-15 && (-1e-15..=1.0 + 1e-15).contains(&v));
            prev = v;
        }
    }
}
