//! Laser pulse schedules for entangled-state preparation, the CNOT and
//! single-ion rotations, plus the fidelity measures used to grade them.

use std::f64::consts::{PI, SQRT_2};

use log::warn;
use rayon::prelude::*;

use crate::dynamics::{evolve_between, propagate, Hamiltonian, IntegratorOptions, Trajectory};
use crate::error::{check_domain, Error, Result};
use crate::hamiltonians::{drive_hamiltonian, Decay, LaserDrive, PairedDrive, TransitionPair};
use crate::statespace::{expect_basis, Basis, Level, Matrix, Operator, StateVector, C64};

/// Largest Rabi frequency (units of `|Im C|`) for which the off-resonant
/// couplings stay a small correction.
pub const MAX_VALID_RABI: f64 = 0.5;

/// The schedules never need more simultaneous lasers than this.
pub const MAX_SIMULTANEOUS_DRIVES: usize = 2;

/// Laser field present during one segment.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// Independent lasers, each acting on both ions through its Rabi pair.
    Lasers(Vec<LaserDrive>),
    /// A running and a standing wave tuned to one pair of transitions.
    Paired(PairedDrive),
}

impl Coupling {
    pub fn laser_count(&self) -> usize {
        match self {
            Coupling::Lasers(d) => d.len(),
            Coupling::Paired(_) => 2,
        }
    }

    pub fn at(&self, t: f64) -> Operator {
        match self {
            Coupling::Lasers(d) => drive_hamiltonian(d, t),
            Coupling::Paired(p) => p.at(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub coupling: Coupling,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
    pub label: String,
}

impl PulseSchedule {
    pub fn new(label: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Schedule("no segments".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.duration > 0.0 && seg.duration.is_finite()) {
                return Err(Error::Schedule(format!(
                    "segment {i} has non-positive duration {}",
                    seg.duration
                )));
            }
            if seg.coupling.laser_count() > MAX_SIMULTANEOUS_DRIVES {
                return Err(Error::Schedule(format!(
                    "segment {i} has {} simultaneous drives",
                    seg.coupling.laser_count()
                )));
            }
        }
        Ok(Self {
            segments,
            label: label.into(),
        })
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// `(start, end)` of each segment.
    pub fn boundaries(&self) -> Vec<(f64, f64)> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration;
                (start, t)
            })
            .collect()
    }

    /// Repeats the schedule `times` times back to back.
    pub fn repeated(&self, times: usize) -> Result<Self> {
        let segments = std::iter::repeat_n(self.segments.iter().cloned(), times)
            .flatten()
            .collect();
        Self::new(format!("{} x{times}", self.label), segments)
    }
}

struct SegmentHamiltonian<'a> {
    coupling: &'a Coupling,
    decay: Option<Operator>,
}

impl Hamiltonian for SegmentHamiltonian<'_> {
    fn at(&self, t: f64) -> Operator {
        let h = self.coupling.at(t);
        match &self.decay {
            Some(d) => Operator::new(h.matrix() + d.matrix(), Basis::Collective),
            None => h,
        }
    }
}

fn decay_term(decay: &Decay) -> Option<Operator> {
    decay.is_enabled().then(|| decay.operator())
}

/// Runs the schedule from `psi0` at `t = 0`, sampling on each segment's grid.
/// Laser phases are referenced to the schedule start.
pub fn run_schedule(
    schedule: &PulseSchedule,
    psi0: &StateVector,
    decay: &Decay,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let decay = decay_term(decay);
    let mut traj: Option<Trajectory> = None;
    let mut psi = psi0.clone();
    for (seg, (t0, t1)) in schedule.segments.iter().zip(schedule.boundaries()) {
        let h = SegmentHamiltonian {
            coupling: &seg.coupling,
            decay: decay.clone(),
        };
        let part = evolve_between(&h, &psi, t0, t1, opts)?;
        psi = part.last_state().cloned().expect("trajectory has samples");
        match traj.as_mut() {
            Some(all) => all.extend(part),
            None => traj = Some(part),
        }
    }
    Ok(traj.expect("schedule has segments"))
}

/// State after the full schedule.
pub fn final_state(
    schedule: &PulseSchedule,
    psi0: &StateVector,
    decay: &Decay,
    opts: &IntegratorOptions,
) -> Result<StateVector> {
    let decay = decay_term(decay);
    let mut psi = psi0.clone();
    for (seg, (t0, t1)) in schedule.segments.iter().zip(schedule.boundaries()) {
        let h = SegmentHamiltonian {
            coupling: &seg.coupling,
            decay: decay.clone(),
        };
        psi = propagate(&h, &psi, t0, t1, opts)?;
    }
    Ok(psi)
}

fn check_rabi(name: &'static str, omega: f64) -> Result<()> {
    check_domain(name, omega, omega > 0.0, "Rabi frequency > 0")?;
    if omega > MAX_VALID_RABI {
        warn!("{name} = {omega} exceeds {MAX_VALID_RABI} |Im C|; off-resonant terms will be significant");
    }
    Ok(())
}

/// `pi/(sqrt2 Omega_1)`
pub fn prep_pi_time(omega1: f64) -> f64 {
    PI / (SQRT_2 * omega1)
}

/// `pi/(2 Omega_1r)`
pub fn cnot_pi_time(omega1r: f64) -> f64 {
    PI / (2.0 * omega1r)
}

/// Running wave, in phase on both ions, tuned `+|Im C|/2` to the `g-s` line.
pub fn schedule_prepare_s(omega1: f64) -> Result<PulseSchedule> {
    check_rabi("omega1", omega1)?;
    PulseSchedule::new(
        "prepare |s>",
        vec![Segment {
            coupling: Coupling::Lasers(vec![LaserDrive::running(omega1, 0.5)]),
            duration: prep_pi_time(omega1),
        }],
    )
}

/// Standing wave with the ions straddling a node (opposite Rabi signs), tuned
/// `-|Im C|/2` to the `g-a` line.
pub fn schedule_prepare_a(omega1: f64) -> Result<PulseSchedule> {
    check_rabi("omega1", omega1)?;
    PulseSchedule::new(
        "prepare |a>",
        vec![Segment {
            coupling: Coupling::Lasers(vec![LaserDrive::standing_with_rabi(omega1, -0.5)]),
            duration: prep_pi_time(omega1),
        }],
    )
}

/// Running wave on `s-e` (Rabi `omega1r`) together with a standing wave on
/// `a-e` (Rabi `-omega1r`). Swaps `|e>` with `(|s> - |a>)/sqrt2 = |10>`.
pub fn schedule_cnot(omega1r: f64) -> Result<PulseSchedule> {
    check_rabi("omega1r", omega1r)?;
    PulseSchedule::new(
        "CNOT",
        vec![Segment {
            coupling: Coupling::Paired(PairedDrive {
                pair: TransitionPair::Upper,
                omega_r: omega1r,
                omega_s: -omega1r,
            }),
            duration: cnot_pi_time(omega1r),
        }],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ion {
    First,
    Second,
}

/// Rotation `exp(-i theta sigma_x / 2)` on one ion, built from two steps:
/// first the `g-s`/`g-a` lines rotate `|g>` into the product state with the
/// target ion flipped, then the `s-e`/`a-e` lines do the same for the other
/// pair. The relative sign of the running and standing Rabi frequencies
/// selects which combination of `|s>` and `|a>` is driven.
pub fn schedule_single_qubit(ion: Ion, theta: f64, omega: f64) -> Result<PulseSchedule> {
    check_domain("theta", theta, theta > 0.0, "theta > 0")?;
    if theta > 2.0 * PI {
        warn!("theta = {theta} exceeds 2 pi");
    }
    check_rabi("omega", omega)?;
    let half = omega / 2.0;
    // ion 1: g <-> |10> then |01> <-> e; ion 2: g <-> |01> then |10> <-> e
    let sign = match ion {
        Ion::First => 1.0,
        Ion::Second => -1.0,
    };
    let duration = theta / omega;
    PulseSchedule::new(
        format!(
            "R_x({theta}) on ion {}",
            if ion == Ion::First { 1 } else { 2 }
        ),
        vec![
            Segment {
                coupling: Coupling::Paired(PairedDrive {
                    pair: TransitionPair::Lower,
                    omega_r: half,
                    omega_s: -sign * half,
                }),
                duration,
            },
            Segment {
                coupling: Coupling::Paired(PairedDrive {
                    pair: TransitionPair::Upper,
                    omega_r: half,
                    omega_s: sign * half,
                }),
                duration,
            },
        ],
    )
}

/// `|<target|psi>|^2`
pub fn state_fidelity(psi: &StateVector, target: &StateVector) -> Result<f64> {
    Ok(target.inner(psi)?.norm_sqr())
}

/// Best fidelity along the trajectory and the first time it is reached.
pub fn prep_fidelity_max(traj: &Trajectory, target: &StateVector) -> Result<(f64, f64)> {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let f = state_fidelity(s, target)?;
        if f > best.0 {
            best = (f, *t);
        }
    }
    if traj.is_empty() {
        return Err(Error::Schedule("empty trajectory".into()));
    }
    Ok(best)
}

fn product_op(entries: [[C64; 4]; 4]) -> Operator {
    let mut m = Matrix::zeros();
    for (i, row) in entries.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    Operator::new(m, Basis::Product).in_basis(Basis::Collective)
}

/// Target CNOT (control ion 1) with the `-i` phases of the resonant swap:
/// `|10> -> -i|11>`, `|11> -> -i|10>`, `|00>` and `|01>` unchanged.
pub fn ideal_cnot() -> Operator {
    let (o, z, mi) = (C64::new(1.0, 0.0), C64::default(), C64::new(0.0, -1.0));
    product_op([[o, z, z, z], [z, o, z, z], [z, z, z, mi], [z, z, mi, z]])
}

/// `exp(-i theta sigma_x / 2)` on one ion, identity on the other.
pub fn ideal_single_qubit(ion: Ion, theta: f64) -> Operator {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    let z = C64::default();
    match ion {
        Ion::First => product_op([[c, z, s, z], [z, c, z, s], [s, z, c, z], [z, s, z, c]]),
        Ion::Second => product_op([[c, s, z, z], [s, c, z, z], [z, z, c, s], [z, z, s, c]]),
    }
}

/// Mean over the product-basis inputs of `|<ideal out|realized out>|^2`.
pub fn truth_table_fidelity(realized: &Operator, ideal: &Operator) -> Result<f64> {
    expect_basis(realized.basis(), ideal.basis())?;
    let u = realized.in_basis(Basis::Product);
    let v = ideal.in_basis(Basis::Product);
    Ok((0..4)
        .map(|k| v.matrix().column(k).dotc(&u.matrix().column(k)).norm_sqr())
        .sum::<f64>()
        / 4.0)
}

/// `|Tr(V^dagger U)|^2 / 16`, optionally maximized over a diagonal output
/// phase frame `D` in the product basis (`|Tr(V^dagger D U)|^2 / 16`).
pub fn process_fidelity(
    realized: &Operator,
    ideal: &Operator,
    phase_corrected: bool,
) -> Result<f64> {
    expect_basis(realized.basis(), ideal.basis())?;
    let u = realized.in_basis(Basis::Product);
    let v = ideal.in_basis(Basis::Product);
    let m = u.matrix() * v.matrix().adjoint();
    let overlap = if phase_corrected {
        (0..4).map(|j| m[(j, j)].norm()).sum::<f64>()
    } else {
        m.trace().norm()
    };
    Ok(overlap * overlap / 16.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    /// Realized map in the collective basis, one evolved basis state per column.
    pub realized: Operator,
    pub duration: f64,
    pub fidelity_vs_ideal: f64,
    pub process_fidelity: f64,
    pub phase_corrected_fidelity: f64,
}

impl GateResult {
    pub fn compare(realized: Operator, ideal: &Operator, duration: f64) -> Result<Self> {
        Ok(Self {
            fidelity_vs_ideal: truth_table_fidelity(&realized, ideal)?,
            process_fidelity: process_fidelity(&realized, ideal, false)?,
            phase_corrected_fidelity: process_fidelity(&realized, ideal, true)?,
            realized,
            duration,
        })
    }
}

/// Evolves the four collective basis states (in parallel) and assembles the
/// realized operator column by column.
pub fn realize_operator<F>(evolve_column: F) -> Result<Operator>
where
    F: Fn(&StateVector) -> Result<StateVector> + Sync,
{
    let columns: Vec<StateVector> = Level::ALL
        .par_iter()
        .map(|&l| evolve_column(&StateVector::level(l)))
        .collect::<Result<_>>()?;
    let mut m = Matrix::zeros();
    for (j, col) in columns.iter().enumerate() {
        m.set_column(j, col.amplitudes());
    }
    Ok(Operator::new(m, Basis::Collective))
}

pub fn realize_schedule(
    schedule: &PulseSchedule,
    decay: &Decay,
    opts: &IntegratorOptions,
) -> Result<Operator> {
    realize_operator(|psi| final_state(schedule, psi, decay, opts))
}

/// Realized gate of `schedule` graded against `ideal`.
pub fn gate_result(
    schedule: &PulseSchedule,
    ideal: &Operator,
    decay: &Decay,
    opts: &IntegratorOptions,
) -> Result<GateResult> {
    let realized = realize_schedule(schedule, decay, opts)?;
    GateResult::compare(realized, ideal, schedule.duration())
}

/// Truth table of a CNOT schedule against [`ideal_cnot`], evaluated at the
/// scheduled end time.
pub fn truth_table(
    schedule: &PulseSchedule,
    decay: &Decay,
    opts: &IntegratorOptions,
) -> Result<GateResult> {
    gate_result(schedule, &ideal_cnot(), decay, opts)
}
