use thiserror::Error;

use crate::field::CellId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cell {id} is out of range for a field of {cells} cells")]
    InvalidCell { id: u64, cells: usize },

    #[error("field map format error on line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("matrix shape error: {0}")]
    Shape(String),

    #[error("cell {0} is an obstacle and cannot host a source or destination")]
    InvalidPlacement(CellId),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Broken internal invariant, e.g. a cycle in the intermediate-vertex matrix.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}

/// Allocates a zero-initialised `n * n` buffer, reporting failure instead of aborting.
pub(crate) fn square_buffer<T: Clone>(n: usize, fill: T) -> Result<Vec<T>> {
    let len = n
        .checked_mul(n)
        .ok_or_else(|| Error::Capacity(format!("{n}x{n} matrix overflows the address space")))?;
    let mut buf = Vec::new();
    buf.try_reserve_exact(len).map_err(|_| {
        Error::Capacity(format!(
            "cannot allocate a {n}x{n} matrix of {} bytes",
            len.saturating_mul(std::mem::size_of::<T>())
        ))
    })?;
    buf.resize(len, fill);
    Ok(buf)
}
