//! Semi-analytic solution of two-phase flow with a chemical slug.
//!
//! The system `s_t + f(s,c)_x = 0`, `(cs + a(c))_t + (cf)_x = 0` with a slug
//! of chemical injected over `0 < t < t_inj` is solved in Lagrange
//! coordinates `(φ, x)`, where it splits into a scalar chromatography
//! equation for `ζ = c` and a scalar equation for `U = 1/f`. The pieces:
//!
//! * [`model`]: flux and adsorption functions, the Lagrange flux `F(U, ζ)`;
//! * [`admissibility`]: Rankine–Hugoniot, entropy tests, travelling waves;
//! * [`zeta`]: the concentration field and chemical front `Φ`;
//! * [`cone`]: the `U`-field, including the Jouguet construction;
//! * [`transform`]: mapping back to `(x, t)`;
//! * [`fv`]: a dissipative finite-volume reference solver.

pub mod admissibility;
pub mod cone;
pub mod error;
pub mod export;
pub mod fv;
pub mod model;
pub mod ode;
pub mod pchip;
pub mod quad;
pub mod roots;
pub mod transform;
pub mod zeta;

pub use error::{Error, Result};
pub use model::{AdsorptionModel, FluidModel, LagrangeFlux, ModelPair};
