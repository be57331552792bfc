//! Hamiltonian builders in the collective basis.
//!
//! Frequencies are measured in units of the cooperative shift `|Im C|` and
//! times in `1/|Im C|`, with hbar = 1. The single-ion decay rate enters only
//! through [`Units::a_over_imc`].

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use log::warn;

use crate::coupling::{CouplingConstant, DecayRates};
use crate::statespace::{Basis, Level, Matrix, Operator, C64};

/// `k_L r` assumed for standing-wave drives unless stated otherwise.
pub const DEFAULT_KLR: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    /// Einstein coefficient in units of `|Im C|`; zero disables dissipation.
    pub a_over_imc: f64,
}

impl Default for Units {
    /// `|Im C| = 375 A`, the `k0 r = 0.2` working point.
    fn default() -> Self {
        Self {
            a_over_imc: 1.0 / 375.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveMode {
    /// Running wave with `k_L` perpendicular to the ion axis: both ions see
    /// the same phase.
    RunningPerpendicular,
    /// Standing wave with the ions placed symmetrically around a node: the
    /// two Rabi frequencies have opposite sign.
    StandingNode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserDrive {
    pub wave_mode: WaveMode,
    /// Base Rabi amplitude `e D.E0 / hbar`.
    pub omega0: C64,
    /// `omega_L - omega_0`.
    pub detuning: f64,
    /// `k_L r`; only used by [`WaveMode::StandingNode`].
    pub klr: f64,
}

impl LaserDrive {
    pub fn running(omega: f64, detuning: f64) -> Self {
        Self {
            wave_mode: WaveMode::RunningPerpendicular,
            omega0: C64::new(omega, 0.0),
            detuning,
            klr: 0.0,
        }
    }

    pub fn standing(omega0: C64, klr: f64, detuning: f64) -> Self {
        Self {
            wave_mode: WaveMode::StandingNode,
            omega0,
            detuning,
            klr,
        }
    }

    /// Standing-wave drive whose Rabi frequency at ion 1 is exactly `omega1`
    /// (and `-omega1` at ion 2), at `k_L r = DEFAULT_KLR`.
    pub fn standing_with_rabi(omega1: f64, detuning: f64) -> Self {
        let node_factor = C64::new(0.0, 2.0 * (DEFAULT_KLR / 2.0).sin());
        Self::standing(C64::new(omega1, 0.0) / node_factor, DEFAULT_KLR, detuning)
    }

    pub fn rabi_pair(&self) -> RabiPair {
        rabi_pair(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiPair {
    pub omega1: C64,
    pub omega2: C64,
}

pub fn rabi_pair(drive: &LaserDrive) -> RabiPair {
    match drive.wave_mode {
        WaveMode::RunningPerpendicular => RabiPair {
            omega1: drive.omega0,
            omega2: drive.omega0,
        },
        WaveMode::StandingNode => {
            if drive.klr == 0.0 {
                warn!("standing-wave drive with k_L r = 0 has zero Rabi frequency");
            }
            let omega1 = drive.omega0 * C64::new(0.0, 2.0 * (drive.klr / 2.0).sin());
            RabiPair {
                omega1,
                omega2: -omega1,
            }
        }
    }
}

/// Conditional Hamiltonian `(1/2i)[(A + C)|s><s| + (A - C)|a><a| + 2A|e><e|]`
/// with `A` and `C` taken in whatever common unit the caller uses.
pub fn h_cond_raw(a: f64, c: C64) -> Operator {
    let half_inv_i = C64::new(0.0, -0.5);
    Operator::diagonal(
        [
            C64::default(),
            (a + c) * half_inv_i,
            (a - c) * half_inv_i,
            C64::new(2.0 * a, 0.0) * half_inv_i,
        ],
        Basis::Collective,
    )
}

/// Conditional Hamiltonian in `|Im C|` units: the `|s>` level sits `+1/2`
/// above its bare energy, `|a>` sits `-1/2` below, and the anti-Hermitian part
/// carries the collective decay scaled by `a_over_imc`.
pub fn h_cond(units: Units, c: &CouplingConstant) -> Operator {
    let a = units.a_over_imc;
    h_cond_raw(a, C64::new(a * c.re(), 1.0))
}

/// Free Hamiltonian `w0(|s><s| + |a><a| + 2|e><e|) + shift/2 (|s><s| - |a><a|)`.
pub fn h0(omega0_level: f64, shift: f64) -> Operator {
    let r = |x: f64| C64::new(x, 0.0);
    Operator::diagonal(
        [
            r(0.0),
            r(omega0_level + shift / 2.0),
            r(omega0_level - shift / 2.0),
            r(2.0 * omega0_level),
        ],
        Basis::Collective,
    )
}

/// Laser coupling in the interaction picture with respect to [`h0`], summed
/// over drives given as `(Rabi pair, detuning)`.
pub fn h_interaction(drives: &[(RabiPair, f64)], t: f64) -> Operator {
    let (g, s, a, e) = (
        Level::G.index(),
        Level::S.index(),
        Level::A.index(),
        Level::E.index(),
    );
    let mut m = Matrix::zeros();
    let k = 1.0 / (2.0 * SQRT_2);
    let half_fwd = C64::from_polar(1.0, t / 2.0);
    let half_back = half_fwd.conj();
    for (pair, detuning) in drives {
        let phase = C64::from_polar(1.0, detuning * t);
        let sum = (pair.omega1 + pair.omega2) * k * phase;
        let diff = (pair.omega1 - pair.omega2) * k * phase;
        m[(g, s)] += sum * half_back;
        m[(s, e)] += sum * half_fwd;
        m[(g, a)] -= diff * half_fwd;
        m[(a, e)] += diff * half_back;
    }
    Operator::new(m + m.adjoint(), Basis::Collective)
}

pub fn drive_hamiltonian(drives: &[LaserDrive], t: f64) -> Operator {
    let pairs: Vec<(RabiPair, f64)> = drives.iter().map(|d| (d.rabi_pair(), d.detuning)).collect();
    h_interaction(&pairs, t)
}

/// Transitions a pair of simultaneous lasers is tuned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionPair {
    /// `g-s` and `g-a` resonant; `s-e` and `a-e` off resonant.
    Lower,
    /// `s-e` and `a-e` resonant; `g-s` and `g-a` off resonant.
    Upper,
}

/// Two lasers addressing the `s` and `a` branches of one [`TransitionPair`]
/// with real Rabi frequencies `omega_r` (running wave, `s` branch) and
/// `omega_s` (standing wave, `a` branch). Each laser also drives the other
/// transition of its branch, detuned by `|Im C|`, with the same amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedDrive {
    pub pair: TransitionPair,
    pub omega_r: f64,
    pub omega_s: f64,
}

impl PairedDrive {
    pub fn at(&self, t: f64) -> Operator {
        let (g, s, a, e) = (
            Level::G.index(),
            Level::S.index(),
            Level::A.index(),
            Level::E.index(),
        );
        let (wr, ws) = (self.omega_r * FRAC_1_SQRT_2, self.omega_s * FRAC_1_SQRT_2);
        let mut m = Matrix::zeros();
        match self.pair {
            TransitionPair::Lower => {
                m[(g, s)] = C64::new(wr, 0.0);
                m[(g, a)] = C64::new(ws, 0.0);
                m[(s, e)] = C64::from_polar(wr, t);
                m[(a, e)] = C64::from_polar(ws, -t);
            }
            TransitionPair::Upper => {
                m[(s, e)] = C64::new(wr, 0.0);
                m[(a, e)] = C64::new(ws, 0.0);
                m[(g, s)] = C64::from_polar(wr, -t);
                m[(g, a)] = C64::from_polar(ws, t);
            }
        }
        Operator::new(m + m.adjoint(), Basis::Collective)
    }
}

/// CNOT drive: running wave on `s-e` with Rabi `omega1r` plus standing wave
/// on `a-e` with Rabi `-omega1r`, including the off-resonant `g-s` and `g-a`
/// couplings that oscillate at the cooperative shift.
pub fn h_cnot(omega1r: f64, t: f64) -> Operator {
    PairedDrive {
        pair: TransitionPair::Upper,
        omega_r: omega1r,
        omega_s: -omega1r,
    }
    .at(t)
}

/// Resonant CNOT coupling `(Omega/2)(|e><c| + |c><e|)` with
/// `|c> = (|s> - |a>)/sqrt2`.
pub fn h_cnot_ideal(omega: f64) -> Operator {
    let (s, a, e) = (Level::S.index(), Level::A.index(), Level::E.index());
    let w = C64::new(omega / 2.0 * FRAC_1_SQRT_2, 0.0);
    let mut m = Matrix::zeros();
    m[(e, s)] = w;
    m[(e, a)] = -w;
    Operator::new(m + m.adjoint(), Basis::Collective)
}

/// Anti-Hermitian part of the conditional Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub units: Units,
    pub rates: DecayRates,
}

impl Decay {
    pub fn off() -> Self {
        Self {
            units: Units { a_over_imc: 0.0 },
            rates: DecayRates::INDEPENDENT,
        }
    }

    pub fn new(a_over_imc: f64, coupling: &CouplingConstant) -> Self {
        Self {
            units: Units { a_over_imc },
            rates: crate::coupling::decay_rates(coupling),
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.units.a_over_imc > 0.0
    }

    /// `-(i/2) A diag(0, gamma_s, gamma_a, gamma_e)`
    pub fn operator(&self) -> Operator {
        let a = self.units.a_over_imc;
        let d = |gamma: f64| C64::new(0.0, -0.5 * a * gamma);
        Operator::diagonal(
            [
                C64::default(),
                d(self.rates.gamma_s),
                d(self.rates.gamma_a),
                d(self.rates.gamma_e),
            ],
            Basis::Collective,
        )
    }
}

impl Default for Decay {
    fn default() -> Self {
        Self::off()
    }
}
