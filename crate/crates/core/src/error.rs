use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("overlapping zones: {0}")]
    Overlap(String),
    #[error("unknown zone `{0}`")]
    UnknownZone(String),
    #[error("missing zone {0}")]
    MissingZone(String),
    #[error("operation requires a {expected} arena")]
    WrongArena { expected: &'static str },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChemistryError {
    #[error("field grid {field:?} does not match arena grid {arena:?}")]
    Misaligned {
        field: (usize, usize),
        arena: (usize, usize),
    },
    #[error(
        "species `{name}` is unstable: 4 * diffusivity ({diffusivity}) exceeds cell_size^2 ({limit})"
    )]
    Unstable {
        name: String,
        diffusivity: f64,
        limit: f64,
    },
    #[error("species `{name}`: {reason}")]
    InvalidSpecies { name: String, reason: String },
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("input assignment: {0}")]
    Assignment(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SwarmError {
    #[error("swarm needs at least one agent")]
    NoAgents,
    #[error("arena has no inoculation zone")]
    MissingInoculation,
    #[error("invalid motion parameter: {0}")]
    InvalidParams(String),
}

/// Anything that can stop a trial from being set up. Trials never fail once
/// they start stepping.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Chemistry(#[from] ChemistryError),
    #[error(transparent)]
    Swarm(#[from] SwarmError),
    #[error("invalid trial configuration: {0}")]
    Config(String),
    #[error("mst needs at least 2 points and at most {max}, got {got}")]
    MstSize { got: usize, max: usize },
}

/// Failures surfaced by the command-line front end. Everything except I/O
/// maps to exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("cannot parse {path} at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}
