use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Arguments are outside an operation's domain (mismatched spaces,
    /// overlapping cells where disjointness is required, empty supports...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An exponential operation would exceed the configured enumeration cap.
    #[error("capacity error: {what} has size {size}, cap is {cap}")]
    Capacity {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    /// Input has no usable content, e.g. an amplitude table of total measure zero.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Operation needs a mode the input does not provide (pure states, rank-1 projectors).
    #[error("unsupported mode: {0}")]
    Unsupported(String),

    /// A structural invariant does not hold within tolerance.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::Capacity { what, size, cap })
    } else {
        Ok(())
    }
}
