//! Special functions: log-gamma, Barnes G, terminating hypergeometric
//! series and Jacobi polynomials.

mod barnes;
mod gamma;
mod hypergeometric;
mod jacobi;

pub use barnes::{barnes_g, log_barnes_g, ZETA_PRIME_MINUS_ONE};
pub use gamma::{gamma, gamma_real, ln_gamma_pos, log_gamma, rgamma};
pub use hypergeometric::{generalized_binomial, generalized_binomial_gamma, hyp2f1_terminating};
pub use jacobi::{
    jacobi_leading_coefficient, jacobi_normalization, jacobi_p, jacobi_p_deriv,
    jacobi_p_hypergeometric, jacobi_p_recurrence, jacobi_weight, JacobiOrder, NormalizationData,
    WeightConvention,
};

pub(crate) use gamma::is_nonpositive_integer;
