//! Set-partitioning instances, their Ising encoding and brute-force oracles.

mod generate;
mod hamiltonian;
mod instance;
mod pivot;

pub use hamiltonian::{
    build_hamiltonian, conflict_density, diagonal_energies, diagonal_energies_capped, ground_states,
    ground_states_capped, report_from_diagonal, DiagonalEvaluator, GroundStateReport, IsingHamiltonian,
    RawCouplings, BRUTE_FORCE_CAP,
};
pub use generate::{generate_instance, GeneratorConfig, GeneratorStyle};
pub use instance::{parse_instance, ProblemInstance};
pub use pivot::{ground_state_pivot, pivot_ranking, restart_count, PivotRanking};
