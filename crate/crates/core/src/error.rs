use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid image data: {0}")]
    InvalidData(String),

    #[error("image is {width}x{height}, at least {min}x{min} is required")]
    DimensionTooSmall { width: usize, height: usize, min: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: Dims, right: Dims },

    #[error("upsample target {target} is smaller than source {source_dims}")]
    TargetSmallerThanSource { source_dims: Dims, target: Dims },

    #[error("rotation by {angle} degrees leaves an inscribed region of {width}x{height}")]
    OutputTooSmall { angle: f64, width: usize, height: usize },

    #[error("angle {0} is outside [0, 90)")]
    InvalidAngle(f64),

    #[error("invalid rotation sweep: {0}")]
    InvalidSweep(String),

    #[error("degenerate content: HH subband energy {e_hh:e} is too small for an edge index")]
    DegenerateContent { e_hh: f64 },

    #[error("{image_id}: {source}")]
    Image { image_id: String, source: Box<Error> },

    #[error("need at least {min} records, got {got}")]
    TooFewRecords { got: usize, min: usize },

    #[error("record {0} has no quadrant assigned")]
    Unassigned(String),

    #[error("image id sets differ: {0}")]
    IdSetMismatch(String),

    #[error("record {0} falls in different cells for the two models")]
    PartitionMismatch(String),

    #[error("invalid grid {0}x{1}: each axis needs at least 2 levels")]
    InvalidGrid(usize, usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("zero variance in input")]
    ZeroVariance,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Codec(#[from] image::ImageError),
}

impl Error {
    /// Attaches an image id to an error raised while processing that image.
    pub fn for_image(self, image_id: impl Into<String>) -> Self {
        Error::Image { image_id: image_id.into(), source: Box::new(self) }
    }

    /// The innermost error, skipping any image-id wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Image { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Width x height pair used in error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims(pub usize, pub usize);

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.0, self.1)
    }
}
