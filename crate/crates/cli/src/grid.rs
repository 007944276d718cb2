use crate::CliError;

/// Parses `a:b[:n][:lin|log]` (options in either order, `n` defaults to 50).
/// `n = 0` is a valid, empty grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Config(format!("grid `{spec}`: {why} (expected a:b[:n][:lin|log])"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() < 2 || parts.len() > 4 {
        return Err(bad("wrong number of fields"));
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bounds must be numbers"));
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    if !(a.is_finite() && b.is_finite()) {
        return Err(bad("bounds must be finite"));
    }
    let (mut n, mut log) = (50usize, false);
    for p in &parts[2..] {
        match p.trim() {
            "log" => log = true,
            "lin" => log = false,
            other => n = other.parse().map_err(|_| bad("unknown option"))?,
        }
    }
    if log && !(a > 0.0 && b > 0.0) {
        return Err(bad("log spacing needs positive bounds"));
    }
    Ok(match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                let r = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    b
                } else if log {
                    a * (b / a).powf(r)
                } else {
                    a + (b - a) * r
                }
            })
            .collect(),
    })
}
