//! Closed-form limit laws for the modular surface.
//!
//! * `Ψ(r)`: Hall's density, the limit law of rescaled first hitting times
//!   and of rescaled Farey gaps.
//! * `Ψ(r, t)`: its refinement by the height `t` of the hit.
//! * `ρ(s) = e^{-s} Ψ(e^{-s})`: limit density of the maximal cusp excursion
//!   height minus `log T`.
//! * `ω_y(s) = ρ(s - ℓ_y)`: the same law for the distance from a base point `y`
//!   at distance `ℓ_y` from the length-one horocycle.
//!
//! The large-argument branch of `Ψ` (and the matching branch of `ρ`) is
//! evaluated in a cancellation-free form. With `q = √(1/4 - 1/r)` and
//! `e = (1/r) / (q + 1/2) = 1/2 - q`, the printed expression
//! `-1 + 2/r + 2q - (4/r) log(1/2 + q)` equals `-2e² - (4/r) log(1 - e)`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::quad::integrate_with_breaks;

/// `1 / (π vol(F))` for `vol(F) = π/3`: the flat value of `Ψ` and the
/// intensity of the hitting-time process.
pub const INTENSITY: f64 = 3.0 / (PI * PI);

/// Mean return time `π vol(F) = π²/3`.
pub const MEAN_RETURN_TIME: f64 = PI * PI / 3.0;

/// Area of the modular surface.
pub const MODULAR_AREA: f64 = PI / 3.0;

/// Density of primitive vectors in the plane.
pub const PRIMITIVE_DENSITY: f64 = 6.0 / (PI * PI);

pub const ZETA_3: f64 = 1.202_056_903_159_594_285_4;

/// `1 - (12/π²) ζ(3)`.
pub const RHO_MEAN: f64 = 1.0 - 12.0 / (PI * PI) * ZETA_3;

/// Branch point of `ρ` separating the logarithmic and quadratic pieces.
pub const RHO_LOWER_EDGE: f64 = -2.0 * LN_2;

const QUAD_TOL: f64 = 1e-13;
// ρ(s) < e^{s}, so truncating the lower tail 45 units below loses < 3e-20.
const LOWER_TAIL_SPAN: f64 = 45.0;

/// `-2e² - (4/r) ln(1 - e)` for `r ≥ 4`, the bracket of the third Hall branch.
fn hall_tail_bracket(r: f64) -> f64 {
    let q = ((r - 4.0) / (4.0 * r)).sqrt();
    let e = (1.0 / r) / (q + 0.5);
    -2.0 * e * e - 4.0 / r * (-e).ln_1p()
}

pub fn hall_psi(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("Ψ(r) needs r ≥ 0, got {r}")));
    }
    let bracket = if r < 1.0 {
        1.0
    } else if r <= 4.0 {
        -1.0 + 2.0 / r + 2.0 / r * r.ln()
    } else if r.is_finite() {
        hall_tail_bracket(r)
    } else {
        0.0
    };
    Ok(INTENSITY * bracket)
}

/// Joint density `Ψ(r, t) = ∫₀¹ Ψ(r, s, t) ds` of hitting time and height.
///
/// The first branch applies when `r e^{-t/2} ≤ 1`.
pub fn hall_psi_rt(r: f64, t: f64) -> Result<f64> {
    if !(r >= 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!("Ψ(r, t) needs r, t ≥ 0, got ({r}, {t})")));
    }
    let x = (-0.5 * t).exp();
    let rx = r * x;
    let bracket = if rx <= 1.0 {
        1.0
    } else if rx * (1.0 - x) <= 1.0 {
        // 1 - e^{t/2} + r^{-1} e^{t}
        1.0 - 1.0 / x + 1.0 / (r * x * x)
    } else {
        0.0
    };
    Ok(INTENSITY * bracket)
}

/// Break points in `t` where `Ψ(r, ·)` changes branch.
pub fn hall_psi_rt_breaks(r: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if r > 1.0 {
        out.push(2.0 * r.ln());
    }
    if r > 4.0 {
        let q = (0.25 - 1.0 / r).sqrt();
        for x in [0.5 + q, 0.5 - q] {
            out.push(-2.0 * x.ln());
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Extreme-value density `ρ(s)`.
pub fn rho(s: f64) -> f64 {
    if s.is_nan() {
        return f64::NAN;
    }
    let bracket = if s >= 0.0 {
        (-s).exp()
    } else if s >= RHO_LOWER_EDGE {
        -(-s).exp() + 2.0 - 2.0 * s
    } else {
        // e^{-s} × bracket of the third Hall branch at r = e^{-s}
        let x = s.exp();
        let q = (0.25 - x).max(0.0).sqrt();
        let e = x / (q + 0.5);
        -2.0 * e * e / x - 4.0 * (-e).ln_1p()
    };
    INTENSITY * bracket
}

/// `ρ(s)` evaluated as `e^{-s} Ψ(e^{-s})`.
pub fn rho_via_psi(s: f64) -> f64 {
    let r = (-s).exp();
    match hall_psi(r) {
        Ok(p) if r.is_finite() => r * p,
        _ => 0.0,
    }
}

/// `∫_H^∞ ρ(s) ds`.
pub fn rho_cdf_upper(h: f64) -> f64 {
    if h.is_nan() {
        return f64::NAN;
    }
    if h == f64::INFINITY {
        return 0.0;
    }
    if h == f64::NEG_INFINITY {
        return 1.0;
    }
    if h >= 0.0 {
        return INTENSITY * (-h).exp();
    }
    if h >= RHO_LOWER_EDGE {
        // ∫_H^0 (-e^{-s} + 2 - 2s) ds plus the exponential branch mass
        return INTENSITY * (2.0 - (-h).exp() - 2.0 * h + h * h);
    }
    1.0 - rho_cdf_lower(h)
}

/// `∫_{-∞}^H ρ(s) ds`, accurate for very negative `H`.
pub fn rho_cdf_lower(h: f64) -> f64 {
    if h >= RHO_LOWER_EDGE {
        return 1.0 - rho_cdf_upper(h);
    }
    if h == f64::NEG_INFINITY {
        return 0.0;
    }
    let scale = rho(h).max(f64::MIN_POSITIVE);
    integrate_with_breaks(rho, &[h - LOWER_TAIL_SPAN, h], QUAD_TOL * scale.min(1.0))
        .expect("ρ is smooth below its lower branch point")
}

/// CDF of `Ψ`: `∫₀^X Ψ(r) dr = ∫_{-log X}^∞ ρ`.
pub fn psi_cdf(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    rho_cdf_upper(-x.ln())
}

/// `∫_X^∞ Ψ(r) dr`.
pub fn psi_tail(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    rho_cdf_lower(-x.ln())
}

/// `ω_y(s) = ρ(s - ℓ_y)`.
pub fn omega_y(s: f64, ell_y: f64) -> Result<f64> {
    if !(ell_y >= 0.0) {
        return Err(Error::Domain(format!("ℓ_y must be ≥ 0, got {ell_y}")));
    }
    Ok(rho(s - ell_y))
}

/// Mean return time `π vol / Σ_κ e^{-σ_κ}` for a section spread over `K` cusps.
pub fn eta_bar_multi(sigma: &[f64], vol: f64) -> Result<f64> {
    if sigma.is_empty() {
        return Err(Error::Domain("need at least one cusp".into()));
    }
    if !(vol > 0.0) {
        return Err(Error::Domain(format!("surface area must be positive, got {vol}")));
    }
    let z: f64 = sigma.iter().map(|s| (-s).exp()).sum();
    Ok(PI * vol / z)
}

/// Value of `Ψ_σ(r)` for small `r`; independent of `σ`.
pub fn psi_sigma_flat(vol: f64) -> Result<f64> {
    if !(vol > 0.0) {
        return Err(Error::Domain(format!("surface area must be positive, got {vol}")));
    }
    Ok(1.0 / (PI * vol))
}

/// `Ψ(r) r² / (6/π²)`; tends to 1.
pub fn tail_ratio(r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::Domain(format!("tail ratio needs r ≥ 1, got {r}")));
    }
    Ok(hall_psi(r)? * r * r / PRIMITIVE_DENSITY)
}

/// Density of the log of the smallest denominator, `2ρ(-2s)`.
pub fn eta_log(s: f64) -> f64 {
    2.0 * rho(-2.0 * s)
}

/// The same law in the `2 log α₁` normalisation: `2ρ(2r)`.
pub fn rho_kmk(r: f64) -> f64 {
    2.0 * rho(2.0 * r)
}

const RHO_BREAKS: [f64; 4] = [-60.0, RHO_LOWER_EDGE, 0.0, 60.0];

/// `∫ s^k ρ(s) ds` by quadrature.
pub fn rho_moment(k: i32) -> Result<f64> {
    integrate_with_breaks(|s| s.powi(k) * rho(s), &RHO_BREAKS, 1e-12)
}

pub fn rho_total_mass() -> Result<f64> {
    rho_moment(0)
}

pub fn psi_total_mass() -> Result<f64> {
    let head = integrate_with_breaks(|r| hall_psi(r).unwrap(), &[0.0, 1.0, 4.0, 1e3], 1e-13)?;
    // Ψ(1/x)/x² on (0, 1e-3] covers [1e3, ∞)
    let tail = integrate_with_breaks(
        |x| if x > 0.0 { hall_psi(1.0 / x).unwrap() / (x * x) } else { 2.0 * INTENSITY },
        &[0.0, 1e-3],
        1e-14,
    )?;
    Ok(head + tail)
}

/// The limit densities as a single evaluator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticDensity {
    Psi,
    Rho,
    Omega { ell_y: f64 },
}

impl AnalyticDensity {
    pub fn pdf(&self, x: f64) -> Result<f64> {
        match *self {
            AnalyticDensity::Psi => hall_psi(x),
            AnalyticDensity::Rho => Ok(rho(x)),
            AnalyticDensity::Omega { ell_y } => omega_y(x, ell_y),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            AnalyticDensity::Psi => psi_cdf(x),
            AnalyticDensity::Rho => 1.0 - rho_cdf_upper(x),
            AnalyticDensity::Omega { ell_y } => 1.0 - rho_cdf_upper(x - ell_y),
        }
    }

    pub fn moment(&self, k: i32) -> Result<f64> {
        match *self {
            AnalyticDensity::Psi => {
                if k >= 1 {
                    // Ψ(r) ~ c r^{-2}: no first or higher moments
                    return Err(Error::Domain(format!("Ψ has no moment of order {k}")));
                }
                psi_total_mass()
            }
            AnalyticDensity::Rho => rho_moment(k),
            AnalyticDensity::Omega { ell_y } => {
                let shifted = |s: f64| (s + ell_y).powi(k) * rho(s);
                integrate_with_breaks(shifted, &RHO_BREAKS, 1e-12)
            }
        }
    }
}
