mod config;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::debug;

use dipoledyn::coupling::{coupling_c, decay_rates, im_c_small_r, leading_shift};
use dipoledyn::feasibility::scenario_report;
use dipoledyn::gates::{
    gate_result, ideal_single_qubit, schedule_single_qubit, truth_table, GateResult,
};
use dipoledyn::sweeps::{
    run_cnot_dynamics, run_single_qubit_dynamics, run_state_prep, run_sweep, PrepParams,
    PrepTarget, SweepKind, SweepSpec, Table,
};
use dipoledyn::{Basis, Decay, IntegratorOptions, Ion, Method, PhysicalScenario};

use config::RunConfig;

const THREADS_ENV: &str = "DIPOLEDYN_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "dipoledyn",
    version,
    about = "Gate dynamics of two dipole-dipole coupled two-level ions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coupling constant, cooperative shift and collective decay rates.
    Coupling,
    /// Population dynamics of the |s> preparation pulse.
    PrepS,
    /// Population dynamics of the |a> preparation pulse.
    PrepA,
    /// Population dynamics of the CNOT drive started in |e>.
    Cnot,
    /// Product-state populations during a single-ion rotation from |00>.
    SingleQubit,
    /// Realized gate in the product basis with fidelities (CNOT, or a
    /// single-ion rotation when --ion is given).
    TruthTable,
    /// Figure-style parameter sweeps.
    Sweep {
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Separation, shift, trap frequency and gate times for a physical scenario.
    Feasibility,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Shift,
    StatePrep,
    RabiError,
    Detuning,
    Cnot,
}

impl From<KindArg> for SweepKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Shift => SweepKind::ShiftVsSeparation,
            KindArg::StatePrep => SweepKind::StatePrepDynamics,
            KindArg::RabiError => SweepKind::RabiErrorFidelity,
            KindArg::Detuning => SweepKind::DetuningFidelity,
            KindArg::Cnot => SweepKind::CnotDynamics,
        }
    }
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// Rabi frequency in units of |Im C|.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rabi: Option<f64>,
    /// Laser detuning over its ideal value.
    #[arg(long, global = true, allow_negative_numbers = true)]
    detuning_ratio: Option<f64>,
    /// Executed over nominal Rabi frequency.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rabi_ratio: Option<f64>,
    /// End time in units of 1/|Im C|.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tmax: Option<f64>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    max: Option<f64>,
    /// Ion mass in atomic mass units.
    #[arg(long, global = true, allow_negative_numbers = true)]
    mass: Option<f64>,
    /// Transition wavelength in metres.
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    k0r: Option<f64>,
    /// Dipole angle in radians.
    #[arg(long, global = true, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Single-ion decay rate over |Im C|; 0 disables decay.
    #[arg(long, global = true, allow_negative_numbers = true)]
    decay_a_over_imc: Option<f64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Target ion of a single-ion rotation.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=2))]
    ion: Option<u8>,
    /// Rotation angle in radians.
    #[arg(long, global = true, allow_negative_numbers = true)]
    angle: Option<f64>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<dipoledyn::Error> for Failure {
    fn from(e: dipoledyn::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(format!("i/o error: {e}"))
    }
}

/// Flag values layered over the config file.
struct Settings {
    flags: Flags,
    file: RunConfig,
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

impl Settings {
    fn rabi(&self) -> f64 {
        pick(self.flags.rabi, self.file.drive.rabi, 0.25)
    }

    fn detuning_ratio(&self) -> f64 {
        pick(
            self.flags.detuning_ratio,
            self.file.drive.detuning_ratio,
            1.0,
        )
    }

    fn rabi_ratio(&self) -> f64 {
        pick(self.flags.rabi_ratio, self.file.drive.rabi_ratio, 1.0)
    }

    fn t_max(&self, default: f64) -> f64 {
        pick(self.flags.tmax, self.file.drive.t_max, default)
    }

    fn scenario(&self) -> PhysicalScenario {
        let base = PhysicalScenario::rydberg();
        let s = &self.file.scenario;
        PhysicalScenario {
            lambda0: pick(self.flags.lambda0, s.lambda0, base.lambda0),
            k0r: pick(self.flags.k0r, s.k0r, base.k0r),
            mass_amu: pick(self.flags.mass, s.mass, base.mass_amu),
            theta: pick(self.flags.theta, s.theta, FRAC_PI_2),
            einstein_a: s.einstein_a,
        }
    }

    fn decay(&self) -> Result<Decay, Failure> {
        let a = pick(
            self.flags.decay_a_over_imc,
            self.file.drive.decay_a_over_imc,
            0.0,
        );
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Failure::Domain(format!(
                "decay-a-over-imc = {a} must be a finite value >= 0"
            )));
        }
        if a == 0.0 {
            return Ok(Decay::off());
        }
        let s = self.scenario();
        Ok(Decay::new(a, &coupling_c(s.k0r, s.theta)?))
    }

    fn opts(&self) -> Result<IntegratorOptions, Failure> {
        let base = IntegratorOptions::default();
        let c = &self.file.integrator;
        let method = match c.method.as_deref() {
            None | Some("adaptive") => Method::AdaptiveRK45,
            Some("rk4") => Method::FixedRK4,
            Some(other) => {
                return Err(Failure::Usage(format!(
                    "integrator.method must be \"adaptive\" or \"rk4\", got {other:?}"
                )))
            }
        };
        let opts = IntegratorOptions {
            method,
            rel_tol: c.rel_tol.unwrap_or(base.rel_tol),
            abs_tol: c.abs_tol.unwrap_or(base.abs_tol),
            max_dt: c.max_dt.unwrap_or(base.max_dt),
            sample_every: c.sample_every.unwrap_or(base.sample_every),
        };
        opts.validate()?;
        Ok(opts)
    }

    fn ion(&self) -> Result<Option<Ion>, Failure> {
        match self.flags.ion.or(self.file.gate.ion) {
            None => Ok(None),
            Some(1) => Ok(Some(Ion::First)),
            Some(2) => Ok(Some(Ion::Second)),
            Some(n) => Err(Failure::Usage(format!("gate.ion must be 1 or 2, got {n}"))),
        }
    }

    fn angle(&self) -> f64 {
        pick(self.flags.angle, self.file.gate.angle, PI)
    }

    fn prep(&self, target: PrepTarget) -> Result<PrepParams, Failure> {
        let mut p = PrepParams::new(target, self.rabi());
        p.detuning_ratio = self.detuning_ratio();
        p.rabi_ratio = self.rabi_ratio();
        p.decay = self.decay()?;
        p.opts = self.opts()?;
        Ok(p)
    }

    fn sweep(&self, kind: Option<KindArg>) -> Result<SweepSpec, Failure> {
        let kind = match (kind, self.file.sweep.kind.as_deref()) {
            (Some(k), _) => k,
            (None, Some(name)) => KindArg::from_str(name, true)
                .map_err(|_| Failure::Usage(format!("unknown sweep.kind {name:?}")))?,
            (None, None) => {
                return Err(Failure::Usage(
                    "sweep needs --kind (shift, state-prep, rabi-error, detuning, cnot)".into(),
                ))
            }
        };
        let mut spec = SweepSpec::new(kind.into());
        let s = &self.file.sweep;
        spec.min = pick(self.flags.min, s.min, spec.min);
        spec.max = pick(self.flags.max, s.max, spec.max);
        spec.points = pick(self.flags.points, s.points, spec.points);
        spec.omega1 = self.rabi();
        spec.detuning_ratio = self.detuning_ratio();
        spec.rabi_ratio = self.rabi_ratio();
        spec.t_max = self.t_max(spec.t_max);
        spec.decay = self.decay()?;
        spec.opts = self.opts()?;
        Ok(spec)
    }
}

fn single_row(columns: &[(&str, f64)]) -> Table {
    let names: Vec<&str> = columns.iter().map(|(n, _)| *n).collect();
    let mut table = Table::new(&names);
    table.push(columns.iter().map(|(_, v)| *v).collect());
    table
}

fn coupling_table(settings: &Settings) -> Result<Table, Failure> {
    let s = settings.scenario();
    let c = coupling_c(s.k0r, s.theta)?;
    let rates = decay_rates(&c);
    Ok(single_row(&[
        ("k0r", s.k0r),
        ("theta", s.theta),
        ("re_c", c.re()),
        ("im_c", c.im()),
        ("im_c_small_r", im_c_small_r(s.k0r)?),
        ("shift_leading", leading_shift(s.k0r)?),
        ("gamma_s", rates.gamma_s),
        ("gamma_a", rates.gamma_a),
        ("gamma_e", rates.gamma_e),
    ]))
}

fn feasibility_table(settings: &Settings) -> Result<Table, Failure> {
    let r = scenario_report(&settings.scenario())?;
    let mut columns = vec![
        ("lambda0_m", r.scenario.lambda0),
        ("k0r", r.scenario.k0r),
        ("mass_amu", r.scenario.mass_amu),
        ("separation_m", r.separation),
        ("shift_full", r.shift_full),
        ("shift_small_r", r.shift_small_r),
        ("shift_leading", r.shift_leading),
        ("re_c", r.re_c),
        ("gamma_s", r.decay_rates.gamma_s),
        ("gamma_a", r.decay_rates.gamma_a),
        ("gamma_e", r.decay_rates.gamma_e),
        ("trap_frequency_mhz", r.trap_frequency / 1e6),
        ("prep_time_over_a", r.prep_time_over_a),
        ("cnot_time_over_a", r.cnot_time_over_a),
    ];
    if let (Some(prep), Some(cnot)) = (r.prep_time_s, r.cnot_time_s) {
        columns.push(("prep_time_s", prep));
        columns.push(("cnot_time_s", cnot));
    }
    Ok(single_row(&columns))
}

fn gate_table(result: &GateResult) -> Table {
    let realized = result.realized.in_basis(Basis::Product);
    let mut table = Table::new(&["input", "output", "re", "im", "probability"]);
    for input in 0..4 {
        for output in 0..4 {
            let z = realized.entry(output, input);
            table.push(vec![input as f64, output as f64, z.re, z.im, z.norm_sqr()]);
        }
    }
    table.note("fidelity_vs_ideal", result.fidelity_vs_ideal);
    table.note("process_fidelity", result.process_fidelity);
    table.note("phase_corrected_fidelity", result.phase_corrected_fidelity);
    table.note("duration", result.duration);
    table
}

fn truth_table_result(settings: &Settings) -> Result<GateResult, Failure> {
    let decay = settings.decay()?;
    let opts = settings.opts()?;
    match settings.ion()? {
        None => {
            let schedule = dipoledyn::gates::schedule_cnot(settings.rabi())?;
            Ok(truth_table(&schedule, &decay, &opts)?)
        }
        Some(ion) => {
            let angle = settings.angle();
            let schedule = schedule_single_qubit(ion, angle, settings.rabi())?;
            Ok(gate_result(
                &schedule,
                &ideal_single_qubit(ion, angle),
                &decay,
                &opts,
            )?)
        }
    }
}

fn execute(command: Command, settings: &Settings) -> Result<Table, Failure> {
    match command {
        Command::Coupling => coupling_table(settings),
        Command::PrepS => {
            let p = settings.prep(PrepTarget::Symmetric)?;
            Ok(run_state_prep(&p, settings.t_max(20.0))?)
        }
        Command::PrepA => {
            let p = settings.prep(PrepTarget::Antisymmetric)?;
            Ok(run_state_prep(&p, settings.t_max(20.0))?)
        }
        Command::Cnot => Ok(run_cnot_dynamics(
            settings.rabi(),
            settings.t_max(10.0),
            &settings.decay()?,
            &settings.opts()?,
        )?),
        Command::SingleQubit => Ok(run_single_qubit_dynamics(
            settings.ion()?.unwrap_or(Ion::First),
            settings.angle(),
            settings.rabi(),
            &settings.decay()?,
            &settings.opts()?,
        )?),
        Command::TruthTable => Ok(gate_table(&truth_table_result(settings)?)),
        Command::Sweep { kind } => Ok(run_sweep(&settings.sweep(kind)?)?),
        Command::Feasibility => feasibility_table(settings),
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size thread pool: {e}")))?;
    debug!("using {threads} worker threads");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let file = match &cli.flags.config {
        Some(path) => RunConfig::load(path).map_err(Failure::Usage)?,
        None => RunConfig::default(),
    };
    let out = cli.flags.out.clone();
    let settings = Settings {
        flags: cli.flags,
        file,
    };
    let table = execute(cli.command, &settings)?;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path)?);
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            let mut w = io::stdout().lock();
            match w.write_all(&buf).and_then(|()| w.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
