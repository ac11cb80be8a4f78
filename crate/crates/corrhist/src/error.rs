use std::path::PathBuf;

/// Errors of the IO layer. Every variant maps to exit status 1 in the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Byte offsets count decompressed bytes for gzip input.
    #[error("malformed XML at byte {offset}: {message}")]
    Syntax { offset: u64, message: String },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("declared date {declared} does not match header date {header}")]
    DateMismatch { declared: corrhist_core::Date, header: corrhist_core::Date },

    #[error("snapshot dates not increasing: {} ({}) followed by {} ({})", first.1.display(), first.0, second.1.display(), second.0)]
    NonMonotone {
        first: (corrhist_core::Date, PathBuf),
        second: (corrhist_core::Date, PathBuf),
    },

    #[error("line {line}: {message}")]
    Tsv { line: usize, message: String },

    #[error("no snapshot files in {}", .0.display())]
    NoSnapshots(PathBuf),

    /// Displays the inner error in full, so it is not also a `source`.
    #[error("{}: {inner}", path.display())]
    InFile { path: PathBuf, inner: Box<Error> },

    #[error(transparent)]
    Integrity(#[from] corrhist_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::InFile { path: path.into(), inner: Box::new(self) }
    }

    /// The error beneath any file context.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { inner, .. } => inner.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
