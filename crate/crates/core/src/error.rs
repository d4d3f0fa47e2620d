use std::io;

use thiserror::Error;

use crate::grid::ObjectId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for {field}: {reason}")]
    OutOfRange { field: String, reason: String },

    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),

    #[error("voxel model of {requested} cells exceeds the cap of {cap} cells")]
    TooManyVoxels { requested: u128, cap: u64 },

    #[error("unknown object id {0}")]
    UnknownObject(ObjectId),

    #[error("duplicate object id {0}")]
    DuplicateObject(ObjectId),

    #[error("unknown light index {0}")]
    UnknownLight(usize),

    #[error("grid coordinate ({0}, {1}, {2}) is outside the world")]
    CoordOutOfBounds(usize, usize, usize),

    #[error("frame {index} rejected: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error("bad volume file: {0}")]
    BadVolume(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn range(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::OutOfRange {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
