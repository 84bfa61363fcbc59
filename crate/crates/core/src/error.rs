use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular atomic response: denominator vanished (all damping rates zero?)")]
    SingularResponse,

    #[error("frequency grid too small: {edge_fraction:.2e} of the output energy sits within 3 samples of the time-grid edge (limit 1e-6)")]
    GridTooSmall { edge_fraction: f64 },

    #[error("quadrature failed to converge to relative {target:.1e} (best estimate {best:.6e})")]
    QuadratureNonConvergence { target: f64, best: f64 },

    #[error("degenerate envelope: {0}")]
    DegenerateEnvelope(String),

    #[error("spectrum is under-informative: {0}")]
    UnderInformative(String),

    #[error("singular normal equations; degenerate direction {direction:?}")]
    SingularNormalEquations { direction: Vec<f64> },

    #[error("unknown sweep axis '{axis}'; valid axes: {valid}")]
    UnknownAxis { axis: String, valid: String },

    #[error("unknown scheme '{0}'")]
    UnknownScheme(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 1 for validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::UnknownAxis { .. }
            | Error::UnknownScheme(_)
            | Error::Config(_)
            | Error::UnderInformative(_)
            | Error::Io(_) => 1,
            Error::SingularResponse
            | Error::GridTooSmall { .. }
            | Error::QuadratureNonConvergence { .. }
            | Error::DegenerateEnvelope(_)
            | Error::SingularNormalEquations { .. } => 2,
        }
    }
}
