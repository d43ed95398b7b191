//! Verification engine for q-series identities.

pub mod catalog;
pub mod engine;
pub mod error;
pub mod eval;
pub mod expr;
pub mod harness;
pub mod numeric;
pub mod qfunc;
pub mod series;

pub use catalog::{
    list_identities, lookup, residual_exact, residual_num, rho, rho_expr, xi, xi_expr, BackendKind, Constraint,
    IdentityEntry, ParamSlot, Precision, RhoRep, SeriesValue, SlotSort, XiForm,
};
pub use engine::{
    build_vwp, growth_check, sum_bilateral, sum_series, sum_unilateral, Admissibility, ExtraFactor, Growth, PochTerm,
    SeriesKind, SeriesSpec, VwpSpec,
};
pub use error::{Direction, Error, Result};
pub use eval::{eval_expr, evaluate_exact, Backend, ExactBackend, Expr};
pub use expr::{p, Affine, Assignment, IndexExpr, ParamExpr, Value};
pub use harness::{
    coeffs, coeffs_expr, compare_rho, sample_params, select, verify, verify_assignments, BackendSelector, CoeffTable,
    Record, Report, SampleConfig, Verdict,
};
pub use numeric::{
    eval_poch_num, eval_sum_num, evaluate_numeric, relative_residual, NumEnv, NumericBackend, NumericConfig,
};
pub use qfunc::{poch, poch_mono, poch_mono_inf, poch_step, qbinom, PochIndex, PochValue};
pub use series::{make_monomial, LaurentSeries, QMonomial};
