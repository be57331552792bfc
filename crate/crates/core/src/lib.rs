//! Simulation of two dipole-dipole coupled two-level ions: the cooperative
//! level shift, laser-driven preparation of the entangled states `|s>` and
//! `|a>`, a CNOT and single-ion rotations, and the trap parameters needed to
//! reach the required separations.
//!
//! Dynamics are computed in the collective basis `[|g>, |s>, |a>, |e>]`, in
//! the interaction picture with respect to the shifted free Hamiltonian, with
//! frequencies in units of the cooperative shift `|Im C|`.

pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod feasibility;
pub mod gates;
pub mod hamiltonians;
pub mod statespace;
pub mod sweeps;

pub use coupling::{CouplingConstant, DecayRates, ShiftFormula};
pub use dynamics::{IntegratorOptions, Method, Trajectory};
pub use error::{Error, Result};
pub use feasibility::{PhysicalScenario, ScenarioReport};
pub use gates::{Coupling, GateResult, Ion, PulseSchedule, Segment};
pub use hamiltonians::{Decay, LaserDrive, PairedDrive, RabiPair, TransitionPair, Units, WaveMode};
pub use statespace::{Basis, Level, Operator, StateVector, C64};
pub use sweeps::{PrepParams, PrepTarget, SweepKind, SweepSpec, Table};
