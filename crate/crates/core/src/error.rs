use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the operation's domain (bad symbol, negative time, ...).
    #[error("{0}")]
    Domain(String),

    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("geo graph is disconnected: node {0} is unreachable from node 0")]
    Disconnected(usize),

    #[error("random walk does not mix (lambda = {0}); bipartite graphs can be repaired with small self-loops")]
    NotMixing(f64),

    #[error("invalid geo parameter: {0}")]
    GeoParameter(String),

    #[error("supremum estimate {estimate} for walk pair ({x}, {y}) exceeds the upper bound B = {bound}")]
    BoundsViolation {
        x: usize,
        y: usize,
        estimate: f64,
        bound: f64,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("instance too large: {0}")]
    Size(String),

    #[error("pair ({u}, {v}): {source}")]
    Pair {
        u: String,
        v: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    pub(crate) fn parse(source_name: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) | Error::Domain(_) => 1,
            Error::Model(_) | Error::Numeric(_) | Error::Size(_) => 2,
            Error::Disconnected(_)
            | Error::NotMixing(_)
            | Error::GeoParameter(_)
            | Error::BoundsViolation { .. } => 3,
            Error::Pair { source, .. } => source.exit_code(),
        }
    }
}
