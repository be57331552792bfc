//! Separation-dependent dipole-dipole coupling constant and the collective
//! decay rates it induces. Everything here is in units of the single-ion
//! Einstein coefficient `A`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{check_domain, Error, Result};
use crate::statespace::C64;

/// Dipole orientation perpendicular to the inter-ion axis.
pub const DEFAULT_THETA: f64 = FRAC_PI_2;

/// Search bracket for [`k0r_for_shift`].
pub const SHIFT_SEARCH_BRACKET: (f64, f64) = (1e-3, 0.5);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstant {
    /// `C` in units of `A`.
    pub value: C64,
    /// `k0 r = 2 pi r / lambda0`.
    pub k0r: f64,
    /// Angle between the dipole moment and the inter-ion axis, radians.
    pub theta: f64,
}

impl CouplingConstant {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRates {
    pub gamma_s: f64,
    pub gamma_a: f64,
    pub gamma_e: f64,
}

impl DecayRates {
    /// Rates of two independent ions.
    pub const INDEPENDENT: DecayRates = DecayRates {
        gamma_s: 1.0,
        gamma_a: 1.0,
        gamma_e: 2.0,
    };

    pub fn from_re_c(re_c: f64) -> Self {
        Self {
            gamma_s: 1.0 + re_c,
            gamma_a: 1.0 - re_c,
            gamma_e: 2.0,
        }
    }
}

/// Which closed form to use for the cooperative shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftFormula {
    /// Imaginary part of the full retarded coupling at `theta = pi/2`.
    Full,
    /// The small-separation expression `-3 [sin x / x^2 + cos x / x^3]`.
    SmallSeparation,
}

fn check_k0r(k0r: f64) -> Result<()> {
    check_domain("k0r", k0r, k0r > 0.0, "k0r > 0")
}

/// Retarded electric-dipole coupling between the two ions:
///
/// `C = 3/2 e^{ix} [ (1 - cos^2 t)/(ix) + (1/x^2 - 1/(i x^3)) (1 - 3 cos^2 t) ]`
/// with `x = k0 r`.
pub fn coupling_c(k0r: f64, theta: f64) -> Result<CouplingConstant> {
    check_k0r(k0r)?;
    check_domain(
        "theta",
        theta,
        (0.0..=PI).contains(&theta),
        "0 <= theta <= pi",
    )?;

    let x = k0r;
    let i = C64::i();
    let cos2 = theta.cos().powi(2);
    let far = (1.0 - cos2) / (i * x);
    let near = (C64::from(1.0 / (x * x)) - 1.0 / (i * x.powi(3))) * (1.0 - 3.0 * cos2);
    let value = 1.5 * (i * x).exp() * (far + near);
    Ok(CouplingConstant { value, k0r, theta })
}

/// Small-separation cooperative shift `-3 [sin x / x^2 + cos x / x^3]`.
pub fn im_c_small_r(k0r: f64) -> Result<f64> {
    check_k0r(k0r)?;
    let x = k0r;
    Ok(-3.0 * (x.sin() / (x * x) + x.cos() / x.powi(3)))
}

/// Leading near-field magnitude `3 / (k0 r)^3`.
pub fn leading_shift(k0r: f64) -> Result<f64> {
    check_k0r(k0r)?;
    Ok(3.0 / k0r.powi(3))
}

pub fn shift_magnitude(k0r: f64, formula: ShiftFormula) -> Result<f64> {
    match formula {
        ShiftFormula::Full => coupling_c(k0r, DEFAULT_THETA).map(|c| c.im().abs()),
        ShiftFormula::SmallSeparation => im_c_small_r(k0r).map(f64::abs),
    }
}

pub fn decay_rates(c: &CouplingConstant) -> DecayRates {
    DecayRates::from_re_c(c.re())
}

/// Separation at which `|Im C|` reaches `target`, found by bisection inside
/// [`SHIFT_SEARCH_BRACKET`].
pub fn k0r_for_shift(target: f64, formula: ShiftFormula) -> Result<f64> {
    check_domain("target", target, target > 0.0, "target > 0")?;
    let (mut lo, mut hi) = SHIFT_SEARCH_BRACKET;
    let excess = |x: f64| shift_magnitude(x, formula).map(|s| s - target);

    let (f_lo, f_hi) = (excess(lo)?, excess(hi)?);
    if !(f_lo >= 0.0 && f_hi <= 0.0) {
        return Err(Error::NoSolution { target });
    }
    // |Im C| decreases through the bracket.
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
