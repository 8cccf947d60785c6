use thiserror::Error;

use crate::coefficients::Family;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("layer {index}: {reason}")]
    InvalidLayer { index: usize, reason: String },

    #[error("invalid stack: {0}")]
    InvalidStack(String),

    #[error("degenerate medium (epsilon = 0 or mu = 0) in layer {index}")]
    DegenerateMedium { index: usize },

    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("layer index {index} out of range for a stack with {layers} layers")]
    LayerIndex { index: usize, layers: usize },

    #[error("interface {interface}: Fresnel denominator vanishes for the {family} family")]
    FresnelSingular { interface: usize, family: Family },

    #[error("layer {layer}: evaluation sits on a lossless resonance pole of the {family} family")]
    ResonancePole { layer: usize, family: Family },

    #[error("{side} lead is lossless; integral-route quantities need a lead loss floor")]
    LosslessLead { side: &'static str },

    #[error(
        "adaptive quadrature on [{a:e}, {b:e}] did not converge after {subdivisions} subdivisions \
         (error estimate {error:e})"
    )]
    QuadratureNonConvergence {
        a: f64,
        b: f64,
        subdivisions: usize,
        error: f64,
    },

    #[error("local density of states underflows at x = {x:e} m, omega = {omega:e} rad/s")]
    DegenerateLdos { x: f64, omega: f64 },

    #[error("probe layer {layer} is lossless and does not couple thermally")]
    LosslessProbe { layer: usize },

    #[error("net emission has no sign change on [{low} K, {high} K]")]
    NoSignChange { low: f64, high: f64 },
}
