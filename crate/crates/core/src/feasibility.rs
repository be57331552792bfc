//! Conversions to laboratory units: ion separation, the trap frequency that
//! holds the ions at that separation, and per-scenario summaries.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::coupling::{coupling_c, decay_rates, im_c_small_r, leading_shift, DecayRates};
use crate::error::{check_domain, Result};
use crate::gates::{cnot_pi_time, prep_pi_time};

/// CODATA 2018.
pub mod constants {
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Vacuum permittivity, F/m.
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    /// Atomic mass unit, kg.
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
}

/// Rabi frequency, in units of `|Im C|`, assumed when quoting gate times.
pub const REFERENCE_RABI: f64 = 0.25;

/// `r = k0r lambda0 / (2 pi)`, metres.
pub fn separation(k0r: f64, lambda0: f64) -> Result<f64> {
    check_domain("k0r", k0r, k0r > 0.0, "k0r > 0")?;
    check_domain("lambda0", lambda0, lambda0 > 0.0, "lambda0 > 0")?;
    Ok(k0r * lambda0 / (2.0 * PI))
}

/// Centre-of-mass trap frequency (Hz) at which the Coulomb repulsion of two
/// singly charged ions of mass `mass_amu` balances at separation `r` (m).
pub fn trap_frequency(mass_amu: f64, r: f64) -> Result<f64> {
    use constants::*;
    check_domain("mass", mass_amu, mass_amu > 0.0, "mass > 0")?;
    check_domain("r", r, r > 0.0, "r > 0")?;
    let omega_sq = ELEMENTARY_CHARGE.powi(2)
        / (2.0 * PI * VACUUM_PERMITTIVITY * mass_amu * ATOMIC_MASS_UNIT * r.powi(3));
    Ok(omega_sq.sqrt() / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScenario {
    /// Transition wavelength, m.
    pub lambda0: f64,
    pub k0r: f64,
    pub mass_amu: f64,
    pub theta: f64,
    /// Single-ion Einstein coefficient, 1/s.
    pub einstein_a: Option<f64>,
}

impl PhysicalScenario {
    /// Rydberg ions with a 10 um transition at `k0 r = 0.2`.
    pub fn rydberg() -> Self {
        Self {
            lambda0: 10e-6,
            k0r: 0.2,
            mass_amu: 100.0,
            theta: FRAC_PI_2,
            einstein_a: None,
        }
    }

    /// Yb+ on its 3.43 um line at `k0 r = 0.25`.
    pub fn ytterbium() -> Self {
        Self {
            lambda0: 3.43e-6,
            k0r: 0.25,
            mass_amu: 171.0,
            theta: FRAC_PI_2,
            einstein_a: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_domain("lambda0", self.lambda0, self.lambda0 > 0.0, "lambda0 > 0")?;
        check_domain(
            "k0r",
            self.k0r,
            self.k0r > 0.0 && self.k0r <= 1.0,
            "0 < k0r <= 1",
        )?;
        check_domain("mass", self.mass_amu, self.mass_amu > 0.0, "mass > 0")?;
        check_domain(
            "theta",
            self.theta,
            (0.0..=PI).contains(&self.theta),
            "0 <= theta <= pi",
        )?;
        if let Some(a) = self.einstein_a {
            check_domain("einstein_a", a, a > 0.0, "A > 0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioReport {
    pub scenario: PhysicalScenario,
    /// m
    pub separation: f64,
    /// `|Im C|/A` from the full retarded coupling at the scenario's angle.
    pub shift_full: f64,
    /// `|Im C|/A` from the small-separation expression.
    pub shift_small_r: f64,
    /// `3/(k0 r)^3`
    pub shift_leading: f64,
    pub re_c: f64,
    pub decay_rates: DecayRates,
    /// Hz
    pub trap_frequency: f64,
    /// State-preparation pi pulse at [`REFERENCE_RABI`], units of `1/A`,
    /// using the leading-order shift.
    pub prep_time_over_a: f64,
    /// CNOT pulse at [`REFERENCE_RABI`], units of `1/A`.
    pub cnot_time_over_a: f64,
    /// Seconds, when the Einstein coefficient is known.
    pub prep_time_s: Option<f64>,
    pub cnot_time_s: Option<f64>,
}

pub fn scenario_report(s: &PhysicalScenario) -> Result<ScenarioReport> {
    s.validate()?;
    let r = separation(s.k0r, s.lambda0)?;
    let c = coupling_c(s.k0r, s.theta)?;
    let shift_leading = leading_shift(s.k0r)?;
    let prep_time_over_a = prep_pi_time(REFERENCE_RABI) / shift_leading;
    let cnot_time_over_a = cnot_pi_time(REFERENCE_RABI) / shift_leading;
    Ok(ScenarioReport {
        scenario: *s,
        separation: r,
        shift_full: c.im().abs(),
        shift_small_r: im_c_small_r(s.k0r)?.abs(),
        shift_leading,
        re_c: c.re(),
        decay_rates: decay_rates(&c),
        trap_frequency: trap_frequency(s.mass_amu, r)?,
        prep_time_over_a,
        cnot_time_over_a,
        prep_time_s: s.einstein_a.map(|a| prep_time_over_a / a),
        cnot_time_s: s.einstein_a.map(|a| cnot_time_over_a / a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within(value: f64, expected: f64, rel: f64) -> bool {
        ((value - expected) / expected).abs() <= rel
    }

    #[test]
    fn separations() {
        assert!(within(separation(0.2, 10e-6).unwrap(), 0.3183e-6, 2e-4));
        assert!(within(separation(0.25, 3.43e-6).unwrap(), 0.1365e-6, 2e-4));
        assert!(within(separation(2.0 * PI, 7e-7).unwrap(), 7e-7, 1e-15));
        assert!(separation(0.0, 1e-6).is_err());
        let r1 = separation(0.1, 1e-6).unwrap();
        for k in 1..5 {
            let k = k as f64;
            assert!(within(separation(0.1 * k, 1e-6).unwrap(), k * r1, 1e-14));
            assert!(within(separation(0.1, k * 1e-6).unwrap(), k * r1, 1e-14));
        }
    }

    #[test]
    fn trap_frequencies() {
        // 40-digit evaluation with the same constants
        assert!(within(
            trap_frequency(100.0, 0.318e-6).unwrap(),
            46_784_392.828_955_33,
            1e-12
        ));
        let r = separation(0.25, 3.43e-6).unwrap();
        assert!(within(
            trap_frequency(171.0, r).unwrap(),
            127_251_301.173_536_66,
            1e-12
        ));
        let r = separation(0.2, 3.43e-6).unwrap();
        assert!(within(
            trap_frequency(171.0, r).unwrap(),
            177_839_099.780_829_2,
            1e-12
        ));
        assert!(trap_frequency(0.0, 1e-6).is_err());
        assert!(trap_frequency(1.0, -1e-6).is_err());
    }

    #[test]
    fn trap_frequency_scaling() {
        let r = 0.3e-6;
        let ratio = trap_frequency(100.0, r).unwrap() / trap_frequency(100.0, 4.0 * r).unwrap();
        assert!((ratio - 8.0).abs() < 1e-9);
        let ratio = trap_frequency(100.0, r).unwrap() / trap_frequency(400.0, r).unwrap();
        assert!((ratio - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rydberg_report() {
        let rep = scenario_report(&PhysicalScenario::rydberg()).unwrap();
        assert!((rep.shift_leading - 375.0).abs() < 1e-9);
        assert!((rep.shift_small_r - 382.425).abs() < 1e-3);
        assert!(within(rep.trap_frequency, 46.8e6, 0.01));
        assert!(within(rep.prep_time_over_a, 0.024, 0.02));
        assert!(within(rep.cnot_time_over_a, 0.017, 0.03));
        assert_eq!(rep.prep_time_s, None);
    }

    #[test]
    fn ytterbium_and_variants() {
        let rep = scenario_report(&PhysicalScenario::ytterbium()).unwrap();
        assert!(within(rep.trap_frequency, 127e6, 0.02));

        let mut close = PhysicalScenario::rydberg();
        close.k0r = 0.1;
        close.einstein_a = Some(1e3);
        let rep = scenario_report(&close).unwrap();
        assert!((rep.shift_leading - 3000.0).abs() < 1e-6);
        let t = rep.prep_time_s.unwrap();
        assert!(within(t, rep.prep_time_over_a * 1e-3, 1e-15));

        close.k0r = 2.0;
        assert!(scenario_report(&close).is_err());
    }
}
