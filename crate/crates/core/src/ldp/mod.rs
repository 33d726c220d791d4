//! Large-deviation tooling: rate curves, their assembly into a rate
//! function, convex duality, joint displacement spectra and the exact
//! comparison inequalities between translation length and displacement.

mod rate;
mod sandwich;
mod spectrum;

pub use rate::{
    analytic_rate_free, assemble_rate, chernoff_upper, convexity_violation, enumerate_displacements,
    legendre, mgf_derivatives_at_zero, rate_curve_enum, rate_curve_exact, rate_curve_mc,
    rate_curve_tau_exact, rate_row_from_samples, Provenance, RateCell, RateCurve, RateFunction,
    RateRow, ENUM_BUDGET,
};
pub use sandwich::{
    below_subadditivity, check_upper_inequality, fit_upper_constant, tau_sandwich_check, AboveFit,
    BelowCell, SandwichReport, SubadditivityReport, UpperConstantFit,
};
pub use spectrum::{
    berger_wang, hausdorff_to_interval, joint_spectrum, non_arithmetic, Arithmeticity, BergerWang,
    Bracket, JointSpectrum, SpectrumLevel, JOINT_BUDGET,
};
