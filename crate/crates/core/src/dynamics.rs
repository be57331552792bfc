//! Time integration of `i dpsi/dt = H(t) psi` (hbar = 1) for possibly
//! non-Hermitian `H`. The state is never renormalized, so with decay enabled
//! the squared norm is the probability that no photon has been emitted.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{check_domain, Error, Result};
use crate::statespace::{expect_basis, populations, Amplitudes, Basis, Operator, StateVector, C64};

/// Time-dependent generator in the collective basis.
pub trait Hamiltonian: Sync {
    fn at(&self, t: f64) -> Operator;
}

impl<F> Hamiltonian for F
where
    F: Fn(f64) -> Operator + Sync,
{
    fn at(&self, t: f64) -> Operator {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FixedRK4,
    AdaptiveRK45,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step; the fixed-step method uses it as its step.
    pub max_dt: f64,
    pub sample_every: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            method: Method::AdaptiveRK45,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            // resolves the fastest phase e^{i t} with 50 steps per period
            max_dt: 2.0 * PI / 50.0,
            sample_every: 0.02,
        }
    }
}

impl IntegratorOptions {
    pub fn fixed(dt: f64) -> Self {
        Self {
            method: Method::FixedRK4,
            max_dt: dt,
            ..Self::default()
        }
    }

    pub fn with_sample_every(mut self, sample_every: f64) -> Self {
        self.sample_every = sample_every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_domain("rel_tol", self.rel_tol, self.rel_tol > 0.0, "rel_tol > 0")?;
        check_domain("abs_tol", self.abs_tol, self.abs_tol > 0.0, "abs_tol > 0")?;
        check_domain("max_dt", self.max_dt, self.max_dt > 0.0, "max_dt > 0")?;
        check_domain(
            "sample_every",
            self.sample_every,
            self.sample_every > 0.0,
            "sample_every > 0",
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub norms: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&StateVector> {
        self.states.last()
    }

    pub fn populations(&self) -> Vec<[f64; 4]> {
        self.states.iter().map(populations).collect()
    }

    /// Appends `other`, dropping its first sample when it repeats our last time.
    pub fn extend(&mut self, other: Trajectory) {
        let skip = match (self.times.last(), other.times.first()) {
            (Some(a), Some(b)) if a == b => 1,
            _ => 0,
        };
        self.times.extend(other.times.into_iter().skip(skip));
        self.states.extend(other.states.into_iter().skip(skip));
        self.norms.extend(other.norms.into_iter().skip(skip));
    }
}

/// Sample times `t0 + k * every` strictly inside the interval, plus both ends.
pub fn sample_grid(t0: f64, t1: f64, every: f64) -> Vec<f64> {
    let span = t1 - t0;
    let n = (span.abs() / every * (1.0 - 1e-12)).ceil() as usize;
    let dir = span.signum();
    let mut grid: Vec<f64> = (0..n).map(|k| t0 + dir * every * k as f64).collect();
    grid.push(t1);
    grid
}

/// Integrates from `psi0` at `t0` to `t1`, recording the state on the
/// sampling grid. `t1 < t0` integrates backwards.
pub fn evolve_between<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    expect_basis(Basis::Collective, psi0.basis())?;
    opts.validate()?;
    let grid = sample_grid(t0, t1, opts.sample_every);
    let mut stepper = Stepper::new(opts);
    let mut y = *psi0.amplitudes();
    let mut traj = Trajectory {
        times: Vec::with_capacity(grid.len()),
        states: Vec::with_capacity(grid.len()),
        norms: Vec::with_capacity(grid.len()),
    };
    let mut record = |t: f64, y: &Amplitudes| {
        traj.times.push(t);
        traj.norms.push(y.norm());
        traj.states
            .push(StateVector::unchecked(*y, Basis::Collective));
    };
    record(grid[0], &y);
    for w in grid.windows(2) {
        y = stepper.advance(h, y, w[0], w[1])?;
        record(w[1], &y);
    }
    Ok(traj)
}

pub fn evolve<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_domain("t_end", t_end, t_end > 0.0, "t_end > 0")?;
    evolve_between(h, psi0, 0.0, t_end, opts)
}

/// Final state only; no sampling grid.
pub fn propagate<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    opts: &IntegratorOptions,
) -> Result<StateVector> {
    expect_basis(Basis::Collective, psi0.basis())?;
    opts.validate()?;
    let y = Stepper::new(opts).advance(h, *psi0.amplitudes(), t0, t1)?;
    Ok(StateVector::unchecked(y, Basis::Collective))
}

/// `sin^2(Omega_1 t / sqrt2)`: `g -> s` transfer when the `s-e` coupling is
/// negligible.
pub fn rabi_analytic_ps(omega1: f64, t: f64) -> f64 {
    (omega1 * t / SQRT_2).sin().powi(2)
}

/// Squared norm per sample, i.e. the probability of no photon emission.
pub fn survival_probability(traj: &Trajectory) -> Vec<f64> {
    traj.norms.iter().map(|n| n * n).collect()
}

/// Evolves forward to `t_end` and back to 0, returning the Euclidean
/// distance to `psi0`. Requires a Hermitian generator.
pub fn time_reversal_check<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let defect = h.at(0.0).hermiticity_defect();
    check_domain(
        "hermiticity defect",
        defect,
        defect <= 1e-12,
        "decay disabled",
    )?;
    let forward = propagate(h, psi0, 0.0, t_end, opts)?;
    let back = propagate(h, &forward, t_end, 0.0, opts)?;
    Ok((back.amplitudes() - psi0.amplitudes()).norm())
}

fn derivative<H: Hamiltonian + ?Sized>(h: &H, t: f64, y: &Amplitudes) -> Amplitudes {
    h.at(t).matrix() * y * C64::new(0.0, -1.0)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper {
    opts: IntegratorOptions,
    /// Magnitude of the last accepted adaptive step.
    hint: f64,
}

impl Stepper {
    fn new(opts: &IntegratorOptions) -> Self {
        Self {
            opts: *opts,
            hint: opts.max_dt / 10.0,
        }
    }

    fn advance<H: Hamiltonian + ?Sized>(
        &mut self,
        h: &H,
        y: Amplitudes,
        t0: f64,
        t1: f64,
    ) -> Result<Amplitudes> {
        if t0 == t1 {
            return Ok(y);
        }
        match self.opts.method {
            Method::FixedRK4 => {
                let y = self.rk4(h, y, t0, t1);
                if y.iter().all(|z| z.is_finite()) {
                    Ok(y)
                } else {
                    Err(Error::Integration {
                        t: t1,
                        reason: "non-finite state".into(),
                    })
                }
            }
            Method::AdaptiveRK45 => self.dopri(h, y, t0, t1),
        }
    }

    fn rk4<H: Hamiltonian + ?Sized>(
        &self,
        h: &H,
        mut y: Amplitudes,
        t0: f64,
        t1: f64,
    ) -> Amplitudes {
        let span = t1 - t0;
        let n = (span.abs() / self.opts.max_dt - 1e-9).ceil().max(1.0) as usize;
        let dt = span / n as f64;
        for k in 0..n {
            let t = t0 + dt * k as f64;
            let k1 = derivative(h, t, &y);
            let k2 = derivative(h, t + dt / 2.0, &(y + k1 * C64::from(dt / 2.0)));
            let k3 = derivative(h, t + dt / 2.0, &(y + k2 * C64::from(dt / 2.0)));
            let k4 = derivative(h, t + dt, &(y + k3 * C64::from(dt)));
            y += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(dt / 6.0);
        }
        y
    }

    fn dopri<H: Hamiltonian + ?Sized>(
        &mut self,
        h: &H,
        mut y: Amplitudes,
        t0: f64,
        t1: f64,
    ) -> Result<Amplitudes> {
        let dir = (t1 - t0).signum();
        let mut t = t0;
        let mut step = self.hint.min(self.opts.max_dt);
        let mut k = [Amplitudes::zeros(); 7];
        loop {
            let remaining = (t1 - t).abs();
            if remaining <= 1e-14 * t1.abs().max(1.0) {
                return Ok(y);
            }
            let last = step >= remaining;
            let dt = dir * step.min(remaining);
            if dt.abs() < 1e-13 * t.abs().max(1.0) {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (dt = {dt:e})"),
                });
            }

            k[0] = derivative(h, t, &y);
            for s in 1..7 {
                let mut ys = y;
                for j in 0..s {
                    if A[s][j] != 0.0 {
                        ys += k[j] * C64::from(dt * A[s][j]);
                    }
                }
                k[s] = derivative(h, t + C[s] * dt, &ys);
            }
            let mut y5 = y;
            let mut err = Amplitudes::zeros();
            for s in 0..7 {
                y5 += k[s] * C64::from(dt * B5[s]);
                err += k[s] * C64::from(dt * (B5[s] - B4[s]));
            }

            let mut ratio: f64 = 0.0;
            for i in 0..4 {
                let scale = self.opts.abs_tol + self.opts.rel_tol * y[i].norm().max(y5[i].norm());
                let r = err[i].norm() / scale;
                ratio = if r.is_nan() { f64::NAN } else { ratio.max(r) };
                if !ratio.is_finite() {
                    break;
                }
            }
            if !ratio.is_finite() || !y5.iter().all(|z| z.is_finite()) {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }

            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            if ratio <= 1.0 {
                t = if last { t1 } else { t + dt };
                y = y5;
                if !last {
                    self.hint = dt.abs();
                }
                step = (dt.abs() * factor).min(self.opts.max_dt);
            } else {
                step = dt.abs() * factor.min(1.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::DecayRates;
    use crate::hamiltonians::{h_cnot, h_cnot_ideal, Decay, Units};
    use crate::statespace::Level;

    fn zero(_t: f64) -> Operator {
        Operator::zero(Basis::Collective)
    }

    #[test]
    fn zero_hamiltonian_is_static() {
        let psi = StateVector::s_plus_a();
        let traj = evolve(&zero, &psi, 3.0, &IntegratorOptions::default()).unwrap();
        assert_eq!(traj.times.first(), Some(&0.0));
        assert_eq!(traj.times.last(), Some(&3.0));
        assert!(traj.states.iter().all(|s| s == &psi));
        assert_eq!(
            time_reversal_check(&zero, &psi, 2.0, &IntegratorOptions::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn grid_is_uniform_plus_end() {
        let g = sample_grid(0.0, 1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert!((g[3] - 0.9).abs() < 1e-15);
        assert_eq!(g[4], 1.0);
        assert_eq!(sample_grid(0.0, 1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(sample_grid(1.0, 0.0, 2.0), vec![1.0, 0.0]);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn analytic_rabi() {
        let w = 0.25;
        assert_eq!(rabi_analytic_ps(w, 0.0), 0.0);
        assert!((rabi_analytic_ps(w, PI / (SQRT_2 * w)) - 1.0).abs() < 1e-15);
        assert!((rabi_analytic_ps(w, PI / (2.0 * SQRT_2 * w)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cnot_ideal_swap_closed_form() {
        let omega = 0.5;
        let h = move |_t: f64| h_cnot_ideal(omega);
        let traj = evolve(
            &h,
            &StateVector::level(Level::E),
            4.0 * PI / omega,
            &IntegratorOptions::default(),
        )
        .unwrap();
        let coupled = StateVector::s_minus_a();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let on_e = s.amplitudes()[3];
            let on_c = coupled.inner(s).unwrap();
            assert!((on_e - C64::from((omega * t / 2.0).cos())).norm() < 1e-8);
            assert!((on_c - C64::new(0.0, -(omega * t / 2.0).sin())).norm() < 1e-8);
        }
    }

    #[test]
    fn excited_state_decay_matches_exponential() {
        let a = 1.0 / 375.0;
        let decay = Decay {
            units: Units { a_over_imc: a },
            rates: DecayRates::from_re_c(0.99),
        };
        let op = decay.operator();
        let h = move |_t: f64| op.clone();
        let opts = IntegratorOptions::default().with_sample_every(5.0);
        let traj = evolve(&h, &StateVector::level(Level::E), 100.0, &opts).unwrap();
        for (t, p) in traj.times.iter().zip(survival_probability(&traj)) {
            let exact = (-2.0 * a * t).exp();
            assert!((p - exact).abs() < 1e-10, "t={t}: {p} vs {exact}");
        }
        assert!(traj.norms.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn subradiant_state_barely_decays() {
        let decay = Decay {
            units: Units {
                a_over_imc: 1.0 / 375.0,
            },
            rates: DecayRates::from_re_c(1.0),
        };
        let op = decay.operator();
        let h = move |_t: f64| op.clone();
        let traj = evolve(
            &h,
            &StateVector::level(Level::A),
            50.0,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(survival_probability(&traj)
            .iter()
            .all(|p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn survival_without_decay_is_one() {
        let h = |t: f64| h_cnot(0.25, t);
        let traj = evolve(
            &h,
            &StateVector::level(Level::E),
            10.0,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(survival_probability(&traj)
            .iter()
            .all(|p| (p - 1.0).abs() < 1e-9));
    }

    #[test]
    fn reversal_of_cnot_drive() {
        let h = |t: f64| h_cnot(0.25, t);
        let d = time_reversal_check(
            &h,
            &StateVector::level(Level::E),
            2.0 * PI,
            &IntegratorOptions::default(),
        )
        .unwrap();
        assert!(d <= 1e-7, "distance {d}");
    }

    #[test]
    fn reversal_rejects_decay() {
        let op = Decay {
            units: Units { a_over_imc: 0.1 },
            rates: DecayRates::INDEPENDENT,
        }
        .operator();
        let h = move |_t: f64| op.clone();
        assert!(time_reversal_check(
            &h,
            &StateVector::level(Level::E),
            1.0,
            &IntegratorOptions::default()
        )
        .is_err());
    }

    #[test]
    fn bad_options_rejected() {
        let opts = IntegratorOptions {
            rel_tol: 0.0,
            ..IntegratorOptions::default()
        };
        assert!(evolve(&zero, &StateVector::level(Level::G), 1.0, &opts).is_err());
        let opts = IntegratorOptions::default();
        assert!(evolve(&zero, &StateVector::level(Level::G), 0.0, &opts).is_err());
        let product = StateVector::basis_state(Basis::Product, 0);
        assert!(evolve(&zero, &product, 1.0, &opts).is_err());
    }

    #[test]
    fn blow_up_reports_failure_time() {
        // Growth rate 1e200 overflows at the first step.
        let op = Operator::diagonal(
            [
                C64::new(0.0, 1e200),
                C64::default(),
                C64::default(),
                C64::default(),
            ],
            Basis::Collective,
        );
        let h = move |_t: f64| op.clone();
        let err = propagate(
            &h,
            &StateVector::level(Level::G),
            0.0,
            1.0,
            &IntegratorOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integration { .. }), "{err:?}");
    }
}
