//! The standard matrix of boundary conditions and potentials used by the
//! examples, the integration tests and the acceptance run.

use crate::bc_algebra::CanonicalBc;
use crate::potential_rep::PotentialSpec;
use crate::C64;

pub const RANDOM_SEED: u64 = 7;
pub const RANDOM_HARMONICS: i64 = 8;
pub const RANDOM_NORM: f64 = 0.5;
pub const DEMO_AMPLITUDE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedBc {
    Periodic,
    Antiperiodic,
    Dirichlet,
    Strict,
    CaseI,
}

impl NamedBc {
    pub const ALL: [NamedBc; 5] = [NamedBc::Periodic, NamedBc::Antiperiodic, NamedBc::Dirichlet, NamedBc::Strict, NamedBc::CaseI];

    pub fn name(self) -> &'static str {
        match self {
            NamedBc::Periodic => "periodic",
            NamedBc::Antiperiodic => "antiperiodic",
            NamedBc::Dirichlet => "dirichlet",
            NamedBc::Strict => "strict",
            NamedBc::CaseI => "case-i",
        }
    }

    /// `(b, a, d, c)`.
    pub fn params(self) -> (f64, f64, f64, f64) {
        match self {
            NamedBc::Periodic => (-1.0, 0.0, 0.0, -1.0),
            NamedBc::Antiperiodic => (1.0, 0.0, 0.0, 1.0),
            NamedBc::Dirichlet => (0.0, 1.0, 1.0, 0.0),
            NamedBc::Strict => (3.0, 1.0, 1.0, 1.0),
            NamedBc::CaseI => (1.0, 0.0, 1.0, 1.0),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|bc| bc.name() == name)
    }

    pub fn canonical(self) -> CanonicalBc {
        let (b, a, d, c) = self.params();
        CanonicalBc::real(b, a, d, c).expect("standard conditions are regular")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedPotential {
    Zero,
    Demo,
    Random,
}

impl NamedPotential {
    pub const ALL: [NamedPotential; 3] = [NamedPotential::Zero, NamedPotential::Demo, NamedPotential::Random];

    pub fn name(self) -> &'static str {
        match self {
            NamedPotential::Zero => "zero",
            NamedPotential::Demo => "demo",
            NamedPotential::Random => "random",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    pub fn spec(self) -> PotentialSpec {
        match self {
            NamedPotential::Zero => PotentialSpec::zero(),
            NamedPotential::Demo => demo_potential(),
            NamedPotential::Random => random_potential(),
        }
    }
}

/// `P = Q = 0.2·e^{2ix}`.
pub fn demo_potential() -> PotentialSpec {
    let c = C64::new(DEMO_AMPLITUDE, 0.0);
    PotentialSpec::single_mode(2, c, c).expect("single mode is valid")
}

pub fn random_potential() -> PotentialSpec {
    PotentialSpec::random_trig(RANDOM_SEED, RANDOM_HARMONICS, RANDOM_NORM).expect("parameters are valid")
}
