//! Low-dimensional embedding: similarity curve, loss and SGD.

mod curve;
mod loss;
mod sgd;

pub use curve::{
    fit_curve, fit_curve_report, low_dim_weight, target_profile, CurveFit, CurveParams, FIT_MAX_RMS, FIT_SAMPLES,
};
pub use loss::{loss, loss_gradient, loss_terms, LossTerms, EPS_LOG};
pub use sgd::{epochs_per_sample, optimize, pca_init, random_init, sampled_gradient, Init, OptimizerConfig};
