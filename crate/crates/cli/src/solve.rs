use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use slugflow::admissibility::{rh_residual, shock_admissible, RH_TOL};
use slugflow::cone::{build_cone, ConeSolution};
use slugflow::export::{write_characteristics, write_field, write_front, write_lagrange_field};
use slugflow::fv::{compare_fields, run_fv, Component, FvConfig};
use slugflow::model::validate_assumptions;
use slugflow::transform::{sample_at, sample_grid, t0, ColumnOptions, GridField};
use slugflow::zeta::build_zeta;
use slugflow::ModelPair;

use crate::config::SolveConfig;
use crate::CliError;

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn write_file(dir: &Path, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
}

pub fn run(config: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut cfg = SolveConfig::load(config)?;
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    let model = cfg.model()?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;

    let zf = build_zeta(&model, cfg.t_inj)?;
    let cone = build_cone(&model, &zf, &cfg.cone_options())?;
    let copts = ColumnOptions { tol: cfg.quad_tol, ..ColumnOptions::default() };

    let xa = zf.x_a;
    let front_xs: Vec<f64> = (0..cfg.front_points)
        .map(|k| xa * 1e-2 * 1e4f64.powf(k as f64 / (cfg.front_points.max(2) - 1) as f64))
        .collect();
    write_file(&dir, "zeta_front.csv", |w| write_front(w, &zf, &front_xs))?;
    write_file(&dir, "characteristics.csv", |w| write_characteristics(w, &cone))?;
    let phis = linspace(0.0, cfg.phi_max, cfg.lagrange_nphi);
    let lxs = linspace(0.0, cfg.x_max, cfg.lagrange_nx);
    write_file(&dir, "field_lagrange.csv", |w| write_lagrange_field(w, &cone, &phis, &lxs))?;
    let field = sample_grid(&cone, cfg.nx, cfg.nt, cfg.x_max, cfg.t_max, &copts)?;
    write_file(&dir, "field_physical.csv", |w| write_field(w, &field))?;

    let mut report = String::new();
    let mut checks = Vec::new();
    summary(&mut report, &model, &cone);
    checks.push(check_assumptions(&model)?);
    checks.push(check_shocks(&mut report, &model, &cone, cfg.shock_samples)?);
    checks.push(check_tangency(&cone));
    checks.push(check_field(&field));
    checks.push(check_water(&cone, &field, cfg.quad_tol)?);
    if !cfg.fv_eps.is_empty() {
        checks.push(fv_sweep(&mut report, &model, &cone, &cfg, &copts)?);
    }

    let _ = writeln!(report, "\n[checks]");
    for c in &checks {
        let _ = writeln!(report, "{:<20} {}  {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
    }
    let _ = writeln!(report, "\n[config]\n{}", cfg.echo());
    fs::write(dir.join("report.txt"), report)?;

    match checks.iter().find(|c| !c.passed) {
        Some(c) => Err(CliError::Check(format!("{} ({})", c.name, c.detail))),
        None => Ok(()),
    }
}

fn summary(r: &mut String, model: &ModelPair, cone: &ConeSolution) {
    let zf = &cone.zf;
    let _ = writeln!(r, "[solution]");
    let _ = writeln!(
        r,
        "model          M0={} m={} Gamma={} beta={}",
        model.fluid.m0(),
        model.fluid.m(),
        model.ads.gamma(),
        model.ads.beta()
    );
    let _ = writeln!(r, "U+_OA          {}", cone.oa.u_plus);
    let _ = writeln!(r, "U-_OA          {}", cone.oa.u_minus());
    let _ = writeln!(r, "x_A            {}", zf.x_a);
    let _ = writeln!(r, "phi_A          {}", zf.phi_a);
    let zb: Vec<String> = cone.sign_changes.iter().map(|z| z.to_string()).collect();
    let _ = writeln!(r, "zeta_B         [{}]", zb.join(", "));
    for t in &cone.tangencies {
        let _ = writeln!(
            r,
            "touch          zeta={} (closing sign change {}), psi residual {:.3e}, U residual {:.3e}",
            t.zeta_touch, t.zeta_b, t.psi_residual, t.u_residual
        );
    }
    let _ = writeln!(r, "family curves  {}", cone.curves.len());
}

fn check_assumptions(model: &ModelPair) -> Result<Check, CliError> {
    let rep = validate_assumptions(model, 200)?;
    let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    Ok(Check {
        name: "model-assumptions",
        passed: failed.is_empty(),
        detail: if failed.is_empty() { format!("{} checks", rep.checks.len()) } else { failed.join(", ") },
    })
}

fn check_shocks(r: &mut String, model: &ModelPair, cone: &ConeSolution, n: usize) -> Result<Check, CliError> {
    let shocks = cone.emitted_shocks(n, 64.0 * cone.zf.x_a)?;
    let _ = writeln!(r, "\n[shocks]\nlabel,x,s_minus,s_plus,c_minus,c_plus,v,rh_s,rh_c,verdict");
    let mut bad = 0;
    for e in &shocks {
        let sh = &e.shock;
        let (r1, r2) = rh_residual(model, sh);
        let v = shock_admissible(model, sh)?;
        let ok = v.admissible && r1.abs() <= RH_TOL && r2.abs() <= RH_TOL;
        bad += usize::from(!ok);
        let _ = writeln!(
            r,
            "{},{},{},{},{},{},{},{:.2e},{:.2e},{}",
            e.label,
            e.x,
            sh.s_minus,
            sh.s_plus,
            sh.c_minus,
            sh.c_plus,
            sh.v,
            r1,
            r2,
            v.reason.tag()
        );
    }
    Ok(Check {
        name: "shock-admissibility",
        passed: bad == 0,
        detail: format!("{} of {} shocks rejected", bad, shocks.len()),
    })
}

fn check_tangency(cone: &ConeSolution) -> Check {
    let worst = cone.tangencies.iter().map(|t| t.psi_residual.abs().max(t.u_residual.abs())).fold(0.0, f64::max);
    Check {
        name: "tangency",
        passed: worst <= 1e-8,
        detail: format!("{} touch points, worst residual {worst:.2e}", cone.tangencies.len()),
    }
}

fn check_field(g: &GridField) -> Check {
    let mut bad = 0;
    for (&s, &c) in g.s.iter().zip(&g.c) {
        let ok = (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&c) && (s > 0.0 || c == 0.0);
        bad += usize::from(!ok);
    }
    Check {
        name: "field-bounds",
        passed: bad == 0,
        detail: format!("{bad} of {} samples outside 0<=s,c<=1 or with c>0 where s=0", g.s.len()),
    }
}

/// `∫ s dx = t` while the water front is inside the grid (trapezoid; the
/// allowance covers the O(Δx) error at the fronts).
fn check_water(cone: &ConeSolution, g: &GridField, tol: f64) -> Result<Check, CliError> {
    let x_end = *g.xs.last().unwrap();
    let t_exit = t0(cone, x_end, tol)?;
    let dx = x_end / (g.nx() - 1) as f64;
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for (j, &t) in g.ts.iter().enumerate() {
        if t > t_exit {
            continue;
        }
        let w = g.integrate_row(j, |s, _| s);
        worst = worst.max((w - t).abs() / (0.01 * t + 2.0 * dx));
        rows += 1;
    }
    Ok(Check {
        name: "water-balance",
        passed: worst <= 1.0,
        detail: format!("{rows} rows, worst error {worst:.3} of the allowance (1% + 2 dx)"),
    })
}

fn fv_sweep(r: &mut String, model: &ModelPair, cone: &ConeSolution, cfg: &SolveConfig, copts: &ColumnOptions) -> Result<Check, CliError> {
    let mut eps = cfg.fv_eps.clone();
    eps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let _ = writeln!(r, "\n[fv]\neps,dx,l1_s,l1_c");
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for &e in &eps {
        let mut fc = FvConfig::slug(e, e * cfg.fv_dx_ratio, cfg.x_max, cfg.t_max, cfg.t_inj);
        fc.snapshots = cfg.fv_snapshots;
        let fv = run_fv(model, &fc)?;
        let exact = sample_at(cone, &fv.xs, &fv.ts, copts)?;
        let (ls, lc) = (compare_fields(&fv, &exact, Component::S)?, compare_fields(&fv, &exact, Component::C)?);
        let _ = writeln!(r, "{e},{},{ls},{lc}", fc.dx);
        rows.push((ls, lc));
    }
    let monotone = rows.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    Ok(Check {
        name: "fv-convergence",
        passed: monotone,
        detail: format!("{} levels, L1 {}", rows.len(), if monotone { "decreasing" } else { "not decreasing" }),
    })
}
