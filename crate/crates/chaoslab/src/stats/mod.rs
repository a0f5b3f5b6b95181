//! Estimators and hypothesis tests for the asymptotic laws of chaos measures.

mod estimate;
mod extremes;
mod gumbel;
mod kahane;
mod ks;
mod martingale;
mod meander;
mod ratio;
mod scaling;
mod star_eq;
mod tail;
mod thick;

pub use estimate::{mean_and_se, median, normal_cdf, quantile, EstimateResult};
pub use extremes::{extremes, extremes_from_samples, fit_gumbel_shift, recentring, ExtremesReport, GumbelShiftFit, LadderPoint, IQR_BAND};
pub use gumbel::{gumbel_cdf, gumbel_test, GumbelReport, GUMBEL_MEDIAN_TARGET};
pub use kahane::{check_domination, kahane_compare, KahaneReport};
pub use ks::{kolmogorov_pvalue, ks_one_sample, ks_two_sample, ks_weighted_two_sample, KsReport};
pub use martingale::{martingale_check, MartingaleReport};
pub use meander::{meander_asymptote, meander_endpoints, meander_exact, meander_laplace, MeanderReport, MEANDER_STEPS};
pub use ratio::{ratio_summary, sh_ratio, RatioReport, SH_TARGET};
pub use scaling::{fit_line, moment_scaling, BoxMoments, Exponent, ScalingFit};
pub use star_eq::{star_equation_check, StarEquationReport};
pub use tail::{tail_estimate, tail_target, TailPoint, TailReport, TAIL_BAND, TAIL_MIN_EXCEEDANCES, TAIL_MIN_SAMPLES};
pub use thick::{thick_point_sample, thick_point_statistic, ThickMode};
