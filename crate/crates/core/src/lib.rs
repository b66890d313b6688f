//! Reduced-parameter quantum imaginary time evolution for diagonal
//! optimization Hamiltonians, simulated on a real-amplitude statevector.

pub mod analysis;
pub mod error;
pub mod hardware;
pub mod pauli;
pub mod problem;
pub mod qite;
pub mod statevector;

pub use error::{Error, Result};
pub use hardware::{HardwareParams, Implementation};
pub use pauli::{Letter, PauliString, PhasedPauli};
pub use problem::{build_hamiltonian, parse_instance, GroundStateReport, IsingHamiltonian, ProblemInstance};
pub use qite::{run_qite, AnsatzSpec, AnsatzVariant, QiteConfig, QiteTrace};
pub use statevector::{init_plus_state, RealStatevector, ShotSampler, TwoQubitAxis};
