//! Scalar special functions: Pochhammer symbols, gamma, and the
//! hypergeometric series every other module is built on.

pub mod gamma;
pub mod hyper;
pub mod sum;

pub use gamma::{gamma, gamma_abs_sq, gamma_complex, gamma_pair, ln_gamma, ln_gamma_complex, rgamma_complex};
pub use hyper::{
    gauss_2f1, gauss_2f1_regularized, hyp_3f2_unit, hyp_3f2_unit_detailed, kampe_de_feriet_2221,
    pochhammer, pochhammer_checked, KdfParams, SeriesControl, SeriesValue, DEGENERATE_STEP,
};
pub use sum::{sum_f64, Compensated, CompensatedValue};
