//! Ansatz construction, linear-system assembly, parameter updates and the
//! QITE driver.

mod ansatz;
mod closed_form;
mod expect;
mod grouping;
mod realize;
mod run;
mod system;

pub use ansatz::{all_odd_y_of_weight, build_operator_basis, AnsatzSpec, AnsatzVariant, OperatorBasis, P2A_CAP};
pub use closed_form::{compression_error_leading_term, first_step_closed_form, ReducedZyCoefficients};
pub use expect::{BranchProductState, ExpectationSource};
pub use grouping::{estimate_grouped, qwc_group, semiclassical_split, MeasurementGroup, SemiclassicalSplit};
pub use realize::{apply_layer, branch_product_form, realize_into, realize_state, AnsatzParameters, LayerOrder};
pub use run::{
    exact_ite_reference, qite_step, run_qite, AdaptiveDtau, DtauRule, IteSnapshot, QiteConfig, QiteEngine, QiteRun,
    QiteTrace, StateMetrics, StepRecord, SHOTS_DEFAULT, TRACE_CSV_HEADER,
};
pub use system::{
    assemble_from_values, assemble_linear_system, normalization, solve_coefficients, LinearSystem, OffsetMode,
    SolveReport, SymbolicSystem, DEFAULT_RIDGE,
};
