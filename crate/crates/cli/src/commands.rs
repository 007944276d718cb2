use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use slugflow::admissibility::{rh_residual, shock_admissible, traveling_wave_orbit, OrbitOptions, OrbitOutcome, ShockData};
use slugflow::cone::{build_cone, ConeOptions};
use slugflow::export::{write_characteristics, write_front, FIELD_HEADER};
use slugflow::fv::{compare_fields, Component};
use slugflow::model::validate_assumptions;
use slugflow::transform::GridField;
use slugflow::zeta::build_zeta;
use slugflow::ModelPair;

use crate::grid::parse_grid;
use crate::{CliError, ModelArgs, Which};

/// Runs `body` against the file `out`, or stdout.
pub fn emit(out: Option<PathBuf>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(&p)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("`--{name}` must be positive, got {v}")))
    }
}

pub fn front(model: &ModelArgs, t_inj: f64, x: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    positive("t-inj", t_inj)?;
    let xs = parse_grid(x)?;
    if xs.iter().any(|&x| x < 0.0) {
        return Err(CliError::Config("`--x` must not be negative".into()));
    }
    let zf = build_zeta(&model.model()?, t_inj)?;
    emit(out, |w| write_front(w, &zf, &xs))
}

pub fn characteristics(model: &ModelArgs, t_inj: f64, scale: f64, out: Option<PathBuf>) -> Result<(), CliError> {
    positive("t-inj", t_inj)?;
    positive("scale", scale)?;
    let m = model.model()?;
    let zf = build_zeta(&m, t_inj)?;
    let cone = build_cone(&m, &zf, &ConeOptions::scaled(scale))?;
    emit(out, |w| write_characteristics(w, &cone))
}

pub fn check_shock(model: &ModelArgs, [sm, sp, cm, cp]: [f64; 4], v: Option<f64>, orbit: bool, out: Option<PathBuf>) -> Result<(), CliError> {
    let m = model.model()?;
    let sh = match v {
        Some(v) => ShockData::new(sm, sp, cm, cp, v),
        None if cm == cp => ShockData::s_shock(&m, sm, sp, cm),
        None => {
            // `[f]/[s]` also fixes the speed of a concentration jump
            let v = (m.fluid.f(sp, cp) - m.fluid.f(sm, cm)) / (sp - sm);
            ShockData::new(sm, sp, cm, cp, v)
        }
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    let (r1, r2) = rh_residual(&m, &sh);
    let verdict = shock_admissible(&m, &sh);
    let (admissible, reason) = match &verdict {
        Ok(v) => (v.admissible, v.reason.tag().to_string()),
        Err(e) => (false, format!("\"{e}\"")),
    };
    let orbit_tag = if orbit {
        match traveling_wave_orbit(&m, &sh, &OrbitOptions::default()) {
            Ok(OrbitOutcome::Connected { .. }) => "connected",
            Ok(OrbitOutcome::NotConnected { .. }) => "not-connected",
            Ok(OrbitOutcome::Inconclusive { .. }) | Err(_) => "inconclusive",
        }
    } else {
        "skipped"
    };
    emit(out, |w| {
        writeln!(w, "s_minus,s_plus,c_minus,c_plus,v,rh_s,rh_c,admissible,reason,orbit")?;
        writeln!(w, "{sm},{sp},{cm},{cp},{},{r1},{r2},{admissible},{reason},{orbit_tag}", sh.v)
    })?;
    if admissible {
        Ok(())
    } else {
        Err(CliError::Check(format!("shock not admissible ({reason})")))
    }
}

/// Reads an `x,t,s,c` field written by `solve` or the library exporter.
pub fn read_field(path: &Path) -> Result<GridField, CliError> {
    let bad = |why: String| CliError::Config(format!("{}: {why}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = rdr.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
    if header.join(",") != FIELD_HEADER {
        return Err(bad(format!("expected header `{FIELD_HEADER}`")));
    }
    let (mut xs, mut ts, mut s, mut c) = (Vec::new(), Vec::<f64>::new(), Vec::new(), Vec::new());
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let v: Vec<f64> = rec.iter().map(|f| f.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad(format!("row {}: not a number", k + 2)))?;
        let (x, t) = (v[0], v[1]);
        if ts.last() != Some(&t) {
            ts.push(t);
        }
        if ts.len() == 1 {
            xs.push(x);
        } else if xs.get(k % xs.len().max(1)) != Some(&x) {
            return Err(bad(format!("row {}: not a tensor grid ordered by t, then x", k + 2)));
        }
        s.push(v[2]);
        c.push(v[3]);
    }
    if s.len() != xs.len() * ts.len() {
        return Err(bad("incomplete last time row".into()));
    }
    Ok(GridField {
        xs,
        ts,
        s,
        c,
        model: ModelPair::reference(),
        t_inj: f64::NAN,
        label: path.display().to_string(),
    })
}

pub fn compare(a: &Path, b: &Path, which: Which, out: Option<PathBuf>) -> Result<(), CliError> {
    let (fa, fb) = (read_field(a)?, read_field(b)?);
    let comps: &[(&str, Component)] = match which {
        Which::S => &[("s", Component::S)],
        Which::C => &[("c", Component::C)],
        Which::Both => &[("s", Component::S), ("c", Component::C)],
    };
    let mut rows = Vec::new();
    for &(name, comp) in comps {
        let d = compare_fields(&fa, &fb, comp).map_err(|e| CliError::Config(e.to_string()))?;
        rows.push((name, d));
    }
    emit(out, |w| {
        writeln!(w, "component,l1")?;
        for (name, d) in &rows {
            writeln!(w, "{name},{d}")?;
        }
        Ok(())
    })
}

pub fn validate_model(model: &ModelArgs, n: usize, out: Option<PathBuf>) -> Result<(), CliError> {
    let m = model.model()?;
    let report = validate_assumptions(&m, n).map_err(|e| CliError::Config(e.to_string()))?;
    emit(out, |w| {
        writeln!(w, "name,passed,worst_s,worst_c,value,statement")?;
        for ch in &report.checks {
            let ((ws, wc), val) = ch.worst.unwrap_or(((f64::NAN, f64::NAN), f64::NAN));
            writeln!(w, "{},{},{ws},{wc},{val},\"{}\"", ch.name, ch.passed, ch.statement)?;
        }
        Ok(())
    })?;
    match report.checks.iter().find(|c| !c.passed) {
        Some(c) => Err(CliError::Check(format!("model assumption `{}`", c.name))),
        None => Ok(()),
    }
}
