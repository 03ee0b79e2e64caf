//! Closed forms and residue series for `SO(2N)` and its excised version.

mod excised;
mod kernel;
mod so2n;

pub use excised::{
    excised_integrand, excised_residue_at_zero, gap_exponent, normalization_ratio,
    normalization_ratio_leading, normalization_ratio_line_integral, r1_excised,
    r1_excised_line_integral, theta_inf, DensityGrid, ExcisedDensity, ExcisedValue, LineValue,
    NormalizationRatio, ResidueSeries, DEFAULT_POLES, LINE_ABSCISSA, RESIDUE_NODES,
    RESIDUE_RADIUS, SERIES_TOLERANCE,
};
pub use kernel::{
    cd_kernel, cd_kernel_diag, kernel_diag_direct, kernel_direct, n_level_density, wronskian_p,
    NLevelDensity,
};
pub use so2n::{
    c_so2n, h_asymptotic, h_exact, moments_so2n, r1_so2n_cumulative, r1_so2n_scaled_expansion,
    r1_so2n_unscaled, selberg_integral, value_cdf_small_x, value_density_small_x,
};
