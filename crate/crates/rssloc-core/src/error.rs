use core::fmt;

/// Error type for geometry and parameter failures.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The evaluation point coincides with an anchor (log of zero distance).
    SingularGeometry { anchor: usize },
    /// The anchor geometry is rank-deficient (e.g. all anchors collinear).
    DegenerateGeometry,
    /// The Cramér-Rao bound is undefined (sigma = 0).
    UndefinedBound,
    /// A parameter violates its documented range.
    InvalidParameter { name: &'static str },
    /// A measurement vector does not match the anchor count.
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularGeometry { anchor } => {
                write!(f, "point coincides with anchor {}", anchor)
            }
            Error::DegenerateGeometry => write!(f, "degenerate anchor geometry"),
            Error::UndefinedBound => write!(f, "bound undefined for sigma = 0"),
            Error::InvalidParameter { name } => write!(f, "invalid parameter: {}", name),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "expected {} measurements, got {}", expected, got)
            }
        }
    }
}

impl core::error::Error for Error {}
