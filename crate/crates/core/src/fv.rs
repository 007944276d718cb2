//! First-order finite-volume solver for the dissipative system
//!
//! `s_t + f_x = ε s_xx`, `(cs + a(c))_t + (cf)_x = ε (c s_x)_x + ε c_xx`,
//!
//! used as a vanishing-viscosity reference. Conserved variables are `s` and
//! `m = cs + a(c)`; `c` is recovered per cell from `m` (monotone in `c`).
//! Advection uses local Lax–Friedrichs fluxes with the two characteristic
//! speeds `f_s` and `f/(s + a_c)`; dissipation uses centred differences.

use crate::error::{Error, Result};
use crate::model::ModelPair;
use crate::transform::GridField;

#[derive(Debug, Clone, PartialEq)]
pub struct FvConfig {
    pub eps: f64,
    pub dx: f64,
    pub cfl: f64,
    pub length: f64,
    pub t_final: f64,
    /// Snapshots are stored at `t_final · j / snapshots`, `j = 0..=snapshots`.
    pub snapshots: usize,
    pub t_inj: f64,
    pub c_inj: f64,
    pub s_inlet: f64,
    pub s_init: f64,
    pub c_init: f64,
}

impl FvConfig {
    /// Slug injection into an empty reservoir.
    pub fn slug(eps: f64, dx: f64, length: f64, t_final: f64, t_inj: f64) -> Self {
        Self {
            eps,
            dx,
            cfl: 0.4,
            length,
            t_final,
            snapshots: 1,
            t_inj,
            c_inj: 1.0,
            s_inlet: 1.0,
            s_init: 0.0,
            c_init: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps", format!("must be positive, got {}", self.eps));
        }
        if !(self.dx > 0.0 && self.length > 0.0 && self.dx < self.length) {
            return bad("dx", format!("need 0 < dx < length, got {} and {}", self.dx, self.length));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.4) {
            return Err(Error::Cfl(format!("CFL number must lie in (0, 0.4], got {}", self.cfl)));
        }
        if !(self.t_final > 0.0 && self.t_inj >= 0.0) {
            return bad("t_final", format!("need t_final > 0, t_inj >= 0, got {} and {}", self.t_final, self.t_inj));
        }
        for (name, v) in [
            ("c_inj", self.c_inj),
            ("s_inlet", self.s_inlet),
            ("s_init", self.s_init),
            ("c_init", self.c_init),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(name, format!("must lie in [0, 1], got {v}"));
            }
        }
        if self.snapshots == 0 {
            return bad("snapshots", "need at least one".into());
        }
        Ok(())
    }
}

/// Per-step boundary fluxes `(s, m)` through the inlet and the outlet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFlux {
    pub inlet: [f64; 2],
    pub outlet: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct FvState {
    pub model: ModelPair,
    pub cfg: FvConfig,
    pub t: f64,
    pub s: Vec<f64>,
    pub m: Vec<f64>,
    pub c: Vec<f64>,
}

impl FvState {
    pub fn new(model: &ModelPair, cfg: &FvConfig) -> Result<Self> {
        cfg.validate()?;
        let n = (cfg.length / cfg.dx).round() as usize;
        let m0 = cfg.c_init * cfg.s_init + model.ads.a(cfg.c_init);
        Ok(Self {
            model: *model,
            cfg: cfg.clone(),
            t: 0.0,
            s: vec![cfg.s_init; n],
            m: vec![m0; n],
            c: vec![cfg.c_init; n],
        })
    }

    pub fn cells(&self) -> usize {
        self.s.len()
    }

    pub fn centres(&self) -> Vec<f64> {
        (0..self.cells()).map(|i| (i as f64 + 0.5) * self.cfg.dx).collect()
    }

    /// Injected state: the schedule.
    fn inlet(&self) -> (f64, f64) {
        let c = if self.t < self.cfg.t_inj { self.cfg.c_inj } else { 0.0 };
        (self.cfg.s_inlet, c)
    }

    fn speed(&self, s: f64, c: f64) -> f64 {
        let fl = &self.model.fluid;
        fl.f_s(s, c).abs().max(fl.f(s, c) / (s + self.model.ads.a_z(c)))
    }

    /// Largest `Δt` allowed by the CFL condition with both advection and
    /// dissipation; `c` diffuses with coefficient `ε/(s + a_c)`.
    pub fn stable_dt(&self) -> f64 {
        let (sg, cg) = self.inlet();
        let mut lam = self.speed(sg, cg);
        let mut diff: f64 = 1.0;
        for (&s, &c) in self.s.iter().zip(&self.c) {
            lam = lam.max(self.speed(s, c));
            diff = diff.max(1.0 / (s + self.model.ads.a_z(c)));
        }
        let dx = self.cfg.dx;
        self.cfg.cfl / (lam / dx + 2.0 * self.cfg.eps * diff / (dx * dx))
    }

    /// Total flux `(s, m)` across the interface between two states.
    fn flux(&self, (sl, cl): (f64, f64), (sr, cr): (f64, f64)) -> [f64; 2] {
        let fl = &self.model.fluid;
        let ad = &self.model.ads;
        let (fa, fb) = (fl.f(sl, cl), fl.f(sr, cr));
        let (ml, mr) = (cl * sl + ad.a(cl), cr * sr + ad.a(cr));
        let alpha = self.speed(sl, cl).max(self.speed(sr, cr));
        let (eps, dx) = (self.cfg.eps, self.cfg.dx);
        let ds = (sr - sl) / dx;
        let dc = (cr - cl) / dx;
        [
            0.5 * (fa + fb) - 0.5 * alpha * (sr - sl) - eps * ds,
            0.5 * (cl * fa + cr * fb) - 0.5 * alpha * (mr - ml) - eps * 0.5 * (cl + cr) * ds - eps * dc,
        ]
    }

    /// One explicit step; fails if `dt` exceeds the stability bound.
    pub fn step(&mut self, dt: f64) -> Result<BoundaryFlux> {
        let limit = self.stable_dt();
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl(format!("dt = {dt} exceeds the stable step {limit}")));
        }
        let n = self.cells();
        let state = |i: usize| (self.s[i], self.c[i]);
        let mut g = Vec::with_capacity(n + 1);
        // inlet: the total flux equals the injection rate (no dissipative
        // exchange with a ghost state, which would add O(ε) mass)
        let (sg, cg) = self.inlet();
        let fg = self.model.fluid.f(sg, cg);
        g.push([fg, cg * fg]);
        for i in 0..n - 1 {
            g.push(self.flux(state(i), state(i + 1)));
        }
        // outflow: zero-gradient ghost
        g.push(self.flux(state(n - 1), state(n - 1)));
        let r = dt / self.cfg.dx;
        for i in 0..n {
            self.s[i] -= r * (g[i + 1][0] - g[i][0]);
            self.m[i] -= r * (g[i + 1][1] - g[i][1]);
        }
        for i in 0..n {
            self.c[i] = recover_c(&self.model, self.s[i], self.m[i], self.c[i])?;
        }
        self.t += dt;
        Ok(BoundaryFlux { inlet: g[0], outlet: g[n] })
    }

    /// `(Σ s Δx, Σ m Δx)`.
    pub fn totals(&self) -> [f64; 2] {
        let dx = self.cfg.dx;
        [self.s.iter().sum::<f64>() * dx, self.m.iter().sum::<f64>() * dx]
    }

    /// Advances to exactly `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.t < t_end {
            let dt = self.stable_dt().min(t_end - self.t);
            // the inlet switches at t_inj: do not step across it
            let dt = if self.t < self.cfg.t_inj { dt.min(self.cfg.t_inj - self.t) } else { dt };
            self.step(dt)?;
            if t_end - self.t < 1e-14 * t_end {
                self.t = t_end;
            }
        }
        Ok(())
    }
}

/// `c ∈ [0, 1]` with `cs + a(c) = m`, warm-started at `guess`.
pub fn recover_c(model: &ModelPair, s: f64, m: f64, guess: f64) -> Result<f64> {
    let ad = &model.ads;
    let (lo, hi) = (0.0, s.max(0.0) + ad.a(1.0));
    let slack = 1e-9 * (1.0 + m.abs());
    if m < lo - slack || m > hi + slack || !m.is_finite() {
        return Err(Error::OutOfRange(format!("c-recovery: m = {m} outside [{lo}, {hi}] for s = {s}")));
    }
    if m <= 0.0 {
        return Ok(0.0);
    }
    if m >= hi {
        return Ok(1.0);
    }
    if s <= 1e-12 {
        // a(c) = m in closed form
        let (g, b) = (ad.gamma(), ad.beta());
        return Ok((m / (b * (g - m))).clamp(0.0, 1.0));
    }
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = guess.clamp(0.0, 1.0);
    for _ in 0..100 {
        let r = c * s + ad.a(c) - m;
        if r == 0.0 {
            return Ok(c);
        }
        if r < 0.0 {
            a = c;
        } else {
            b = c;
        }
        let next = c - r / (s + ad.a_z(c));
        let next = if next > a && next < b { next } else { 0.5 * (a + b) };
        if (next - c).abs() <= 1e-15 {
            return Ok(next);
        }
        c = next;
    }
    Err(Error::NoConvergence(100))
}

/// Runs the configured case and returns cell-centred snapshots.
pub fn run_fv(model: &ModelPair, cfg: &FvConfig) -> Result<GridField> {
    let mut st = FvState::new(model, cfg)?;
    let xs = st.centres();
    let ts: Vec<f64> = (0..=cfg.snapshots).map(|j| cfg.t_final * j as f64 / cfg.snapshots as f64).collect();
    let mut s = Vec::with_capacity(xs.len() * ts.len());
    let mut c = Vec::with_capacity(xs.len() * ts.len());
    for &t in &ts {
        st.advance_to(t)?;
        s.extend_from_slice(&st.s);
        c.extend_from_slice(&st.c);
    }
    Ok(GridField {
        xs,
        ts,
        s,
        c,
        model: *model,
        t_inj: cfg.t_inj,
        label: format!("fv eps={} dx={}", cfg.eps, cfg.dx),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    S,
    C,
}

/// Cell-averaged L1 distance: `Σ |a − b| w_i / n_t`, with `w_i` the width
/// of the cell around `x_i` (bounded by midpoints, mirrored at the ends).
pub fn compare_fields(a: &GridField, b: &GridField, which: Component) -> Result<f64> {
    let same = |u: &[f64], v: &[f64]| u.len() == v.len() && u.iter().zip(v).all(|(p, q)| (p - q).abs() <= 1e-12 * (1.0 + p.abs()));
    if !same(&a.xs, &b.xs) || !same(&a.ts, &b.ts) {
        return Err(Error::GridMismatch(format!(
            "{}x{} vs {}x{} (or different coordinates)",
            a.nx(),
            a.nt(),
            b.nx(),
            b.nt()
        )));
    }
    let w = cell_widths(&a.xs);
    let (u, v) = match which {
        Component::S => (&a.s, &b.s),
        Component::C => (&a.c, &b.c),
    };
    let nx = a.nx();
    let total: f64 = u.iter().zip(v).enumerate().map(|(k, (p, q))| (p - q).abs() * w[k % nx]).sum();
    Ok(total / a.nt() as f64)
}

fn cell_widths(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| {
            let lo = if i == 0 { xs[0] - 0.5 * (xs[1] - xs[0]) } else { 0.5 * (xs[i - 1] + xs[i]) };
            let hi = if i == n - 1 { xs[n - 1] + 0.5 * (xs[n - 1] - xs[n - 2]) } else { 0.5 * (xs[i] + xs[i + 1]) };
            hi - lo
        })
        .collect()
}
