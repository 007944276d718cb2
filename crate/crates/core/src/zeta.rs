//! Solution of the chromatography equation `ζ_x + a(ζ)_φ = 0` for the slug:
//! straight front `OA`, the rarefaction fan centred at `T = (t_inj, 0)`,
//! and the curved front `Φ`.
//!
//! Along the fan, `ζ` is constant on rays `φ - t_inj = a_ζ(ζ) x`. The
//! radial coordinate `ψ` with `x = e^ψ / √(1 + a_ζ²)` parametrises each ray.

use crate::error::{Error, Result};
use crate::model::ModelPair;
use crate::roots::bisect;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaField {
    pub model: ModelPair,
    pub t_inj: f64,
    /// Slope of the straight front, `v(1,0) = a(1) - a(0)`.
    pub v10: f64,
    pub x_a: f64,
    pub phi_a: f64,
}

/// A point on the curved front with its upper-side concentration and slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontPoint {
    pub x: f64,
    pub phi: f64,
    pub zeta: f64,
    pub slope: f64,
}

pub fn build_zeta(model: &ModelPair, t_inj: f64) -> Result<ZetaField> {
    if !(t_inj.is_finite() && t_inj > 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_inj",
            reason: format!("must be positive, got {t_inj}"),
        });
    }
    let v10 = model.v10();
    // intersection of φ = v10 x with the lowest fan ray φ = t_inj + a_ζ(1) x
    let x_a = t_inj / (v10 - model.ads.a_z(1.0));
    Ok(ZetaField {
        model: *model,
        t_inj,
        v10,
        x_a,
        phi_a: v10 * x_a,
    })
}

impl ZetaField {
    fn ads(&self) -> &crate::model::AdsorptionModel {
        &self.model.ads
    }

    /// Curved front at `x ≥ x_A`: `Φ = t_inj + a_ζ(ζ_Φ) x`, `ζ_Φ = q(t_inj/x)`.
    pub fn front_phi(&self, x: f64) -> Result<FrontPoint> {
        if !(x >= self.x_a * (1.0 - 1e-14)) {
            return Err(Error::OutOfRange(format!(
                "curved front starts at x_A = {}, got x = {x}",
                self.x_a
            )));
        }
        if x <= self.x_a {
            return Ok(FrontPoint { x, phi: self.phi_a, zeta: 1.0, slope: self.v10 });
        }
        let z = self.ads().q(self.t_inj / x).min(1.0);
        Ok(self.front_point_at_zeta(z, x))
    }

    fn front_point_at_zeta(&self, z: f64, x: f64) -> FrontPoint {
        let ad = self.ads();
        FrontPoint {
            x,
            phi: self.t_inj + ad.a_z(z) * x,
            zeta: z,
            slope: ad.chord_slope(z),
        }
    }

    /// Front point carrying concentration `ζ ∈ (0, 1]`.
    pub fn front_at_zeta(&self, z: f64) -> FrontPoint {
        self.front_point_at_zeta(z, self.front_x_of_zeta(z))
    }

    /// `x` at which the curved front carries `ζ`: `x p(ζ) = t_inj`.
    pub fn front_x_of_zeta(&self, z: f64) -> f64 {
        self.t_inj / self.ads().p(z)
    }

    /// Whole chemical front `φ(x)`: straight up to `x_A`, curved after.
    pub fn front_curve(&self, x: f64) -> f64 {
        if x <= self.x_a {
            self.v10 * x
        } else {
            self.front_phi(x).map(|p| p.phi).unwrap_or(f64::NAN)
        }
    }

    /// Abscissa where the horizontal line `φ = const` meets the front.
    pub fn front_x_of_phi(&self, phi: f64) -> f64 {
        if phi <= self.phi_a {
            return phi / self.v10;
        }
        // Φ is increasing; bracket then bisect
        let mut hi = 2.0 * self.x_a;
        while self.front_curve(hi) < phi {
            hi *= 2.0;
        }
        bisect(|x| self.front_curve(x) - phi, self.x_a, hi, 1e-14 * hi).unwrap_or(hi)
    }

    /// `ζ(φ, x)`; on discontinuities the value from the upper-`φ` side.
    pub fn eval_zeta(&self, phi: f64, x: f64) -> f64 {
        let ad = self.ads();
        if x <= 0.0 {
            return if phi < self.t_inj { 1.0 } else { 0.0 };
        }
        if phi < self.front_curve(x) {
            return 0.0;
        }
        let r = (phi - self.t_inj) / x;
        if r < ad.a_z(1.0) {
            return 1.0;
        }
        if r >= ad.a_z(0.0) {
            return 0.0;
        }
        ad.g(r).clamp(0.0, 1.0)
    }

    /// Maps fan coordinates `(ζ, ψ)` to `(φ, x)`.
    pub fn fan_point(&self, z: f64, psi: f64) -> (f64, f64) {
        let az = self.ads().a_z(z);
        let x = psi.exp() / (1.0 + az * az).sqrt();
        (self.t_inj + az * x, x)
    }

    /// Radial coordinate of a point on the fan ray of concentration `ζ`.
    pub fn psi_of_x(&self, z: f64, x: f64) -> f64 {
        let az = self.ads().a_z(z);
        x.ln() + 0.5 * (1.0 + az * az).ln()
    }

    /// `ψ` of the front point on the ray of concentration `ζ`.
    pub fn psi_phi(&self, z: f64) -> f64 {
        let az = self.ads().a_z(z);
        self.t_inj.ln() - self.ads().p(z).ln() + 0.5 * (1.0 + az * az).ln()
    }

    /// `ψ` at which the triangle-fan characteristic of speed `λ = F_U(U₀,1)`
    /// meets the lowest ray `TA` (needs `λ > a_ζ(1)`).
    pub fn psi_ta(&self, lambda: f64) -> f64 {
        let a1 = self.ads().a_z(1.0);
        (self.t_inj / (lambda - a1)).ln() + 0.5 * (1.0 + a1 * a1).ln()
    }
}
