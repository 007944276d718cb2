//! CSV emission. Every writer emits its header even when there are no rows;
//! numbers use the shortest representation that round-trips, so identical
//! inputs give byte-identical files.

use std::io::{self, Write};

use crate::cone::{ConeSolution, Origin};
use crate::transform::GridField;
use crate::zeta::ZetaField;

pub const FIELD_HEADER: &str = "x,t,s,c";
pub const FRONT_HEADER: &str = "x,phi,zeta,slope";
pub const CHARACTERISTICS_HEADER: &str = "family,param,zeta,u,psi,phi,x";
pub const LAGRANGE_HEADER: &str = "phi,x,u,zeta,s";

fn row<W: Write + ?Sized>(w: &mut W, vals: &[f64]) -> io::Result<()> {
    let mut first = true;
    for v in vals {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        write!(w, "{v}")?;
    }
    w.write_all(b"\n")
}

/// Rows ordered by `t`, then `x`.
pub fn write_field<W: Write + ?Sized>(w: &mut W, g: &GridField) -> io::Result<()> {
    writeln!(w, "{FIELD_HEADER}")?;
    for (j, &t) in g.ts.iter().enumerate() {
        for (i, &x) in g.xs.iter().enumerate() {
            row(w, &[x, t, g.s_at(i, j), g.c_at(i, j)])?;
        }
    }
    Ok(())
}

/// Chemical front `Φ(x)`, its concentration and slope; straight up to `x_A`.
pub fn write_front<W: Write + ?Sized>(w: &mut W, zf: &ZetaField, xs: &[f64]) -> io::Result<()> {
    writeln!(w, "{FRONT_HEADER}")?;
    for &x in xs {
        let (phi, zeta, slope) = if x <= zf.x_a {
            (zf.v10 * x, 1.0, zf.v10)
        } else {
            match zf.front_phi(x) {
                Ok(p) => (p.phi, p.zeta, p.slope),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            }
        };
        row(w, &[x, phi, zeta, slope])?;
    }
    Ok(())
}

/// `ta` (ends on the upper edge), `crossing` (a `TA` member leaving through
/// `Φ`) or `jouguet`, with the family parameter `U₀ − 1` or `ζ₀`.
pub fn family_of(origin: Origin, crossing: bool) -> (&'static str, f64) {
    match origin {
        Origin::Ta { excess } => (if crossing { "crossing" } else { "ta" }, excess),
        Origin::Jouguet { zeta0 } => ("jouguet", zeta0),
    }
}

/// Every family curve at its accepted integration nodes, in family order.
pub fn write_characteristics<W: Write + ?Sized>(w: &mut W, cone: &ConeSolution) -> io::Result<()> {
    writeln!(w, "{CHARACTERISTICS_HEADER}")?;
    for cv in &cone.curves {
        let (family, param) = family_of(cv.origin, cv.crossing.is_some());
        for (z, _, psi) in cv.nodes() {
            let u = cv.point(z).u;
            let (phi, x) = cone.zf.fan_point(z, psi);
            write!(w, "{family},")?;
            row(w, &[param, z, u, psi, phi, x])?;
        }
    }
    Ok(())
}

/// `(U, ζ, s)` on a tensor grid in Lagrange coordinates, `φ` outer. Points
/// the cone cannot evaluate are written as NaN.
pub fn write_lagrange_field<W: Write + ?Sized>(w: &mut W, cone: &ConeSolution, phis: &[f64], xs: &[f64]) -> io::Result<()> {
    writeln!(w, "{LAGRANGE_HEADER}")?;
    for &phi in phis {
        for &x in xs {
            let (u, s, z) = cone.eval_state(phi, x).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            row(w, &[phi, x, u, z, s])?;
        }
    }
    Ok(())
}
