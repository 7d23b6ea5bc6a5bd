use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine can report.
///
/// Each variant carries a stable machine-readable [`code`](Error::code) used by
/// the CLI and the HTTP service.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies strictly inside the conic")]
    PointInsideConic,
    #[error("circumcircle family requires a circular outer conic (a = b), got a={a}, b={b}")]
    InvalidAspect { a: f64, b: f64 },
    #[error("free parameter {value} outside {range}")]
    FreeParamOutOfRange { value: f64, range: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate triangle")]
    DegenerateTriangle,
    #[error("unknown triangle center X{0}")]
    UnknownCenter(u32),
    #[error("triangle center X{0} is at infinity for this triangle")]
    CenterAtInfinity(u32),
    #[error("derived triangle is degenerate")]
    DegenerateDerived,
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("every sample of the sweep produced a degenerate triangle")]
    AllSamplesDegenerate,
    #[error("scene has nothing to draw")]
    EmptyScene,
    #[error("corrupt state blob: {0}")]
    CorruptBlob(String),
    #[error("unsupported state schema version {0}")]
    UnsupportedVersion(u8),
    #[error("state field out of range: {0}")]
    OutOfRange(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::PointInsideConic => "PointInsideConic",
            Error::InvalidAspect { .. } => "InvalidAspect",
            Error::FreeParamOutOfRange { .. } => "FreeParamOutOfRange",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DegenerateTriangle => "DegenerateTriangle",
            Error::UnknownCenter(_) => "UnknownCenter",
            Error::CenterAtInfinity(_) => "CenterAtInfinity",
            Error::DegenerateDerived => "DegenerateDerived",
            Error::InsufficientPoints { .. } => "InsufficientPoints",
            Error::AllSamplesDegenerate => "AllSamplesDegenerate",
            Error::EmptyScene => "EmptyScene",
            Error::CorruptBlob(_) => "CorruptBlob",
            Error::UnsupportedVersion(_) => "UnsupportedVersion",
            Error::OutOfRange(_) => "OutOfRange",
        }
    }

    /// Validation failures map to 400, geometric impossibilities to 422.
    pub fn http_status(&self) -> u16 {
        match self {
            Error::InvalidParameter(_)
            | Error::FreeParamOutOfRange { .. }
            | Error::UnknownCenter(_)
            | Error::CorruptBlob(_)
            | Error::UnsupportedVersion(_)
            | Error::OutOfRange(_) => 400,
            _ => 422,
        }
    }
}
