use thiserror::Error;

/// Errors raised by the geometric operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("curve speed {speed:e} below degeneracy threshold at parameter {param}")]
    SingularSpeed { param: f64, speed: f64 },

    #[error("curvature {kappa:e} below degeneracy threshold at parameter {param}")]
    VanishingCurvature { param: f64, kappa: f64 },

    #[error("at least {required} samples are required, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("surface is singular at (u, v) = ({u}, {v}): |S_u x S_v| = {norm:e}")]
    SingularPoint { u: f64, v: f64, norm: f64 },

    #[error("curve is not unit speed: |alpha'| = {speed} at s = {s}")]
    NotUnitSpeed { s: f64, speed: f64 },

    #[error("k_n^2 + tau_g^2 = {value:e} is degenerate at s = {s}")]
    DegenerateNormalData { s: f64, value: f64 },

    #[error("no consistent axis: branch residuals {plus:e} (+) and {minus:e} (-) both exceed {tol:e}")]
    NoConsistentAxis { plus: f64, minus: f64, tol: f64 },

    #[error("curve is not a certified isophote (mu spread {spread:e})")]
    NotCertifiedIsophote { spread: f64 },

    #[error("radius slope |r'| = {slope} must be < 1 (at s = {s})")]
    RadiusSlopeTooLarge { s: f64, slope: f64 },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("closed-form value {value} fails its defining relation (residual {residual:e} > {tol:e})")]
    FormulaInconsistent {
        value: f64,
        residual: f64,
        tol: f64,
        /// Roots of the defining relation, when it is a quadratic.
        roots: Vec<f64>,
    },

    #[error("spine is neither a general helix nor a slant helix")]
    NotAHelix,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
