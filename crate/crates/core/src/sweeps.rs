//! Deterministic parameter sweeps and population dynamics rendered as CSV.
//!
//! CSV layout: a `#`-prefixed header line naming the columns, one
//! comma-separated row per point with 12 significant digits, LF endings.
//! Scalar summaries follow the rows as `# name=value` lines.

use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;

use crate::coupling::{coupling_c, im_c_small_r, leading_shift, DEFAULT_THETA};
use crate::dynamics::IntegratorOptions;
use crate::error::{check_domain, Error, Result};
use crate::gates::{
    cnot_pi_time, final_state, prep_pi_time, run_schedule, schedule_single_qubit, Coupling, Ion,
    PulseSchedule, Segment, MAX_VALID_RABI,
};
use crate::hamiltonians::{Decay, LaserDrive};
use crate::statespace::{populations, to_product, Level, StateVector};

pub const DEFAULT_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub notes: Vec<(String, f64)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, name: &str, value: f64) {
        self.notes.push((name.to_string(), value));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn note_value(&self, name: &str) -> Option<f64> {
        self.notes.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|&x| format_sig(x)).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        for (name, value) in &self.notes {
            let _ = writeln!(out, "# {name}={}", format_sig(*value));
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Renders `x` with 12 significant digits, fixed notation for exponents in
/// `[-5, 12)` and scientific otherwise; trailing zeros are dropped.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn linspace(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Domain {
            name: "points",
            value: points as f64,
            requirement: "points >= 2",
        });
    }
    check_domain("min", min, min < max && max.is_finite(), "min < max")?;
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k == points - 1 {
                max
            } else {
                min + step * k as f64
            }
        })
        .collect())
}

/// Cooperative shift against separation.
pub fn run_shift_sweep(min_k0r: f64, max_k0r: f64, points: usize) -> Result<Table> {
    check_domain("min", min_k0r, min_k0r > 0.0, "min > 0")?;
    check_domain("max", max_k0r, max_k0r <= 0.5, "max <= 0.5")?;
    let grid = linspace(min_k0r, max_k0r, points)?;
    let mut table = Table::new(&["k0r", "log10_shift", "log10_shift_leading", "re_c"]);
    for x in grid {
        table.push(vec![
            x,
            im_c_small_r(x)?.abs().log10(),
            leading_shift(x)?.log10(),
            coupling_c(x, DEFAULT_THETA)?.re(),
        ]);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepTarget {
    Symmetric,
    Antisymmetric,
}

impl PrepTarget {
    pub fn level(self) -> Level {
        match self {
            PrepTarget::Symmetric => Level::S,
            PrepTarget::Antisymmetric => Level::A,
        }
    }

    /// Drive with executed Rabi frequency `omega` and detuning
    /// `detuning_ratio * |Im C|/2` from the bare transition.
    pub fn drive(self, omega: f64, detuning_ratio: f64) -> LaserDrive {
        match self {
            PrepTarget::Symmetric => LaserDrive::running(omega, 0.5 * detuning_ratio),
            PrepTarget::Antisymmetric => {
                LaserDrive::standing_with_rabi(omega, -0.5 * detuning_ratio)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepParams {
    pub target: PrepTarget,
    /// Nominal Rabi frequency; fixes the pulse length `pi/(sqrt2 omega1)`.
    pub omega1: f64,
    pub detuning_ratio: f64,
    /// Executed Rabi frequency over the nominal one.
    pub rabi_ratio: f64,
    pub decay: Decay,
    pub opts: IntegratorOptions,
}

impl PrepParams {
    pub fn new(target: PrepTarget, omega1: f64) -> Self {
        Self {
            target,
            omega1,
            detuning_ratio: 1.0,
            rabi_ratio: 1.0,
            decay: Decay::off(),
            opts: IntegratorOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        check_domain(
            "omega1",
            self.omega1,
            self.omega1 > 0.0 && self.omega1 <= MAX_VALID_RABI,
            "0 < omega1 <= 0.5",
        )?;
        check_domain(
            "detuning_ratio",
            self.detuning_ratio,
            self.detuning_ratio > 0.0,
            "ratio > 0",
        )?;
        check_domain(
            "rabi_ratio",
            self.rabi_ratio,
            self.rabi_ratio > 0.0,
            "ratio > 0",
        )
    }

    pub fn pi_time(&self) -> f64 {
        prep_pi_time(self.omega1)
    }

    fn schedule(&self, duration: f64) -> Result<PulseSchedule> {
        PulseSchedule::new(
            "state preparation",
            vec![Segment {
                coupling: Coupling::Lasers(vec![self
                    .target
                    .drive(self.rabi_ratio * self.omega1, self.detuning_ratio)]),
                duration,
            }],
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepPoint {
    /// Target population at the end of the `pi/(sqrt2 omega1)` pulse.
    pub at_pi_time: f64,
    /// Largest target population during the pulse.
    pub max_during_pulse: f64,
}

/// One preparation pulse of the nominal length.
pub fn prep_point(params: &PrepParams) -> Result<PrepPoint> {
    params.validate()?;
    let traj = run_schedule(
        &params.schedule(params.pi_time())?,
        &StateVector::level(Level::G),
        &params.decay,
        &params.opts,
    )?;
    let idx = params.target.level().index();
    let pops = traj.populations();
    Ok(PrepPoint {
        at_pi_time: pops.last().expect("samples")[idx],
        max_during_pulse: pops.iter().map(|p| p[idx]).fold(0.0, f64::max),
    })
}

/// Population dynamics of a preparation pulse out to `t_max`.
///
/// Notes: `fidelity` (largest target population), `t_at_max`, and
/// `population_at_t_pi`.
pub fn run_state_prep(params: &PrepParams, t_max: f64) -> Result<Table> {
    params.validate()?;
    check_domain("t_max", t_max, t_max > 0.0, "t_max > 0")?;
    let traj = run_schedule(
        &params.schedule(t_max)?,
        &StateVector::level(Level::G),
        &params.decay,
        &params.opts,
    )?;
    let idx = params.target.level().index();
    let mut table = Table::new(&["t", "p_g", "p_s", "p_a", "p_e", "norm"]);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for ((t, s), norm) in traj.times.iter().zip(&traj.states).zip(&traj.norms) {
        let p = populations(s);
        if p[idx] > best.0 {
            best = (p[idx], *t);
        }
        table.push(vec![*t, p[0], p[1], p[2], p[3], *norm]);
    }
    let at_pi = final_state(
        &params.schedule(params.pi_time())?,
        &StateVector::level(Level::G),
        &params.decay,
        &params.opts,
    )?;
    table.note("fidelity", best.0);
    table.note("t_at_max", best.1);
    table.note("t_pi", params.pi_time());
    table.note("population_at_t_pi", populations(&at_pi)[idx]);
    Ok(table)
}

fn robustness_sweep(
    base: &PrepParams,
    grid: Vec<f64>,
    first_column: &str,
    set: impl Fn(&mut PrepParams, f64) + Sync,
) -> Result<Table> {
    let points: Vec<PrepPoint> = grid
        .par_iter()
        .map(|&x| {
            let mut p = *base;
            set(&mut p, x);
            prep_point(&p)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[first_column, "p_target_at_t_pi", "p_target_max"]);
    for (x, pt) in grid.iter().zip(points) {
        table.push(vec![*x, pt.at_pi_time, pt.max_during_pulse]);
    }
    Ok(table)
}

/// Target population after the nominal pulse when the executed Rabi
/// frequency is `ratio * omega1`.
pub fn run_rabi_error_sweep(base: &PrepParams, min: f64, max: f64, points: usize) -> Result<Table> {
    check_domain("min", min, min > 0.0, "ratio > 0")?;
    robustness_sweep(base, linspace(min, max, points)?, "rabi_ratio", |p, x| {
        p.rabi_ratio = x
    })
}

/// Target population after the nominal pulse against the detuning, in
/// units of the ideal `|Im C|/2`.
pub fn run_detuning_sweep(base: &PrepParams, min: f64, max: f64, points: usize) -> Result<Table> {
    check_domain("min", min, min > 0.0, "ratio > 0")?;
    robustness_sweep(
        base,
        linspace(min, max, points)?,
        "detuning_ratio",
        |p, x| p.detuning_ratio = x,
    )
}

/// CNOT drive applied to `|e>` out to `t_max`. `p_swap` is the population of
/// `(|s> - |a>)/sqrt2 = |10>`, `p_frozen` that of `(|s> + |a>)/sqrt2 = |01>`.
pub fn run_cnot_dynamics(
    omega1r: f64,
    t_max: f64,
    decay: &Decay,
    opts: &IntegratorOptions,
) -> Result<Table> {
    check_domain(
        "omega1r",
        omega1r,
        omega1r > 0.0 && omega1r <= MAX_VALID_RABI,
        "0 < omega1r <= 0.5",
    )?;
    check_domain("t_max", t_max, t_max > 0.0, "t_max > 0")?;
    let template = crate::gates::schedule_cnot(omega1r)?;
    let mut seg = template.segments[0].clone();
    seg.duration = t_max;
    let schedule = PulseSchedule::new("CNOT dynamics", vec![seg])?;
    let traj = run_schedule(&schedule, &StateVector::level(Level::E), decay, opts)?;

    let mut table = Table::new(&["t", "p_g", "p_e", "p_swap", "p_frozen", "norm"]);
    for ((t, s), norm) in traj.times.iter().zip(&traj.states).zip(&traj.norms) {
        let p = populations(&to_product(s)?);
        table.push(vec![*t, p[0], p[3], p[2], p[1], *norm]);
    }
    let end = final_state(&template, &StateVector::level(Level::E), decay, opts)?;
    let p = populations(&to_product(&end)?);
    table.note("t_pi", cnot_pi_time(omega1r));
    table.note("p_swap_at_t_pi", p[2]);
    table.note("p_e_at_t_pi", p[3]);
    Ok(table)
}

/// Product-basis populations during a single-ion rotation started in `|00>`.
pub fn run_single_qubit_dynamics(
    ion: Ion,
    theta: f64,
    omega: f64,
    decay: &Decay,
    opts: &IntegratorOptions,
) -> Result<Table> {
    let schedule = schedule_single_qubit(ion, theta, omega)?;
    let traj = run_schedule(&schedule, &StateVector::level(Level::G), decay, opts)?;
    let mut table = Table::new(&["t", "p_00", "p_01", "p_10", "p_11", "norm"]);
    for ((t, s), norm) in traj.times.iter().zip(&traj.states).zip(&traj.norms) {
        let p = populations(&to_product(s)?);
        table.push(vec![*t, p[0], p[1], p[2], p[3], *norm]);
    }
    table.note("duration", schedule.duration());
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    ShiftVsSeparation,
    StatePrepDynamics,
    RabiErrorFidelity,
    DetuningFidelity,
    CnotDynamics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub omega1: f64,
    pub detuning_ratio: f64,
    pub rabi_ratio: f64,
    pub t_max: f64,
    pub decay: Decay,
    pub opts: IntegratorOptions,
}

impl SweepSpec {
    /// Figure-style defaults for each kind.
    pub fn new(kind: SweepKind) -> Self {
        let (min, max, t_max) = match kind {
            SweepKind::ShiftVsSeparation => (0.02, 0.5, 0.0),
            SweepKind::StatePrepDynamics => (0.0, 0.0, 20.0),
            SweepKind::RabiErrorFidelity => (0.8, 1.2, 0.0),
            SweepKind::DetuningFidelity => (0.6, 1.4, 0.0),
            SweepKind::CnotDynamics => (0.0, 0.0, 10.0),
        };
        Self {
            kind,
            min,
            max,
            points: DEFAULT_POINTS,
            omega1: 0.25,
            detuning_ratio: 1.0,
            rabi_ratio: 1.0,
            t_max,
            decay: Decay::off(),
            opts: IntegratorOptions::default(),
        }
    }

    fn prep_params(&self) -> PrepParams {
        PrepParams {
            target: PrepTarget::Symmetric,
            omega1: self.omega1,
            detuning_ratio: self.detuning_ratio,
            rabi_ratio: self.rabi_ratio,
            decay: self.decay,
            opts: self.opts,
        }
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    match spec.kind {
        SweepKind::ShiftVsSeparation => run_shift_sweep(spec.min, spec.max, spec.points),
        SweepKind::StatePrepDynamics => run_state_prep(&spec.prep_params(), spec.t_max),
        SweepKind::RabiErrorFidelity => {
            run_rabi_error_sweep(&spec.prep_params(), spec.min, spec.max, spec.points)
        }
        SweepKind::DetuningFidelity => {
            run_detuning_sweep(&spec.prep_params(), spec.min, spec.max, spec.points)
        }
        SweepKind::CnotDynamics => {
            run_cnot_dynamics(spec.omega1, spec.t_max, &spec.decay, &spec.opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(-2.5), "-2.5");
        assert_eq!(format_sig(2.0_f64.log10()), "0.301029995664");
        assert_eq!(format_sig(46_784_392.828_955_33), "46784392.829");
        assert_eq!(format_sig(1.0 / 3.0 * 1e-7), "3.33333333333e-8");
        assert_eq!(format_sig(6.02214076e23), "6.02214076e23");
        assert_eq!(format_sig(123_456_789_012.0), "123456789012");
        assert_eq!(format_sig(0.000_012_5), "0.0000125");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0, 0.5]);
        t.note("best", 0.25);
        assert_eq!(t.to_csv(), "# a,b\n1,0.5\n# best=0.25\n");
    }

    #[test]
    fn linspace_checks() {
        assert_eq!(linspace(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 1).is_err());
        assert!(linspace(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn shift_sweep_values() {
        let t = run_shift_sweep(0.02, 0.5, 25).unwrap();
        let shift = t.column("log10_shift").unwrap();
        assert!(shift.windows(2).all(|w| w[1] < w[0]));
        assert!((shift[24] - 1.428_379_225_708_464).abs() < 1e-12);
        let t = run_shift_sweep(0.2, 0.5, 2).unwrap();
        assert!((t.rows[0][1] - 2.582_546_464_442_149).abs() < 1e-12);
        assert!((t.rows[0][2] - 375f64.log10()).abs() < 1e-12);
        assert!(run_shift_sweep(0.0, 0.5, 10).is_err());
        assert!(run_shift_sweep(0.1, 0.6, 10).is_err());
    }

    #[test]
    fn state_prep_table_closes() {
        let params = PrepParams::new(PrepTarget::Symmetric, 0.25);
        let t = run_state_prep(&params, 20.0).unwrap();
        assert_eq!(t.rows[0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        for row in &t.rows {
            let sum: f64 = row[1..5].iter().sum();
            assert!((sum - row[5] * row[5]).abs() < 1e-9);
        }
        let f = t.note_value("fidelity").unwrap();
        assert!((f - 0.96).abs() < 0.01);
        assert!((t.note_value("t_at_max").unwrap() - 8.886).abs() < 0.05 * 8.886);
    }

    #[test]
    fn cnot_dynamics_rows() {
        let t =
            run_cnot_dynamics(0.25, 10.0, &Decay::off(), &IntegratorOptions::default()).unwrap();
        assert_eq!(t.rows[0][2], 1.0);
        assert!(t.column("p_frozen").unwrap().iter().all(|&p| p <= 0.05));
        assert!(t.note_value("p_swap_at_t_pi").unwrap() >= 0.95);
        assert!(t.note_value("p_e_at_t_pi").unwrap() <= 0.05);
    }

    #[test]
    fn sweep_spec_dispatch() {
        let mut spec = SweepSpec::new(SweepKind::ShiftVsSeparation);
        spec.points = 5;
        assert_eq!(run_sweep(&spec).unwrap().rows.len(), 5);
        let mut spec = SweepSpec::new(SweepKind::RabiErrorFidelity);
        spec.points = 3;
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.columns[0], "rabi_ratio");
        assert_eq!(t.rows.len(), 3);
    }
}
