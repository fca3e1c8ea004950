use alloc::string::String;
use core::fmt;

/// Failures reported by the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    InvalidDeltaMap,
    InvalidObject(String),
    LevelMismatch { expected: u8, found: u8 },
    NotComposable,
    InconsistentLift,
    InvalidShape(&'static str),
    InvalidGenerator(usize),
    InvalidElement,
    RelationViolated(usize),
    Parse(String),
    /// An evaluation needed a level above the configured degree bound.
    BoundExceeded { degree: u32, bound: u32 },
    /// A search space exceeded the configured candidate ceiling.
    SearchLimit(u64),
    Unsupported(&'static str),
    Malformed(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDeltaMap => write!(f, "not a monotone map between finite ordinals"),
            Error::InvalidObject(s) => write!(f, "invalid object: {s}"),
            Error::LevelMismatch { expected, found } => {
                write!(f, "level mismatch: expected n={expected}, found n={found}")
            }
            Error::NotComposable => write!(f, "morphisms are not composable"),
            Error::InconsistentLift => write!(f, "lift components do not match the objects"),
            Error::InvalidShape(s) => write!(f, "invalid shape: {s}"),
            Error::InvalidGenerator(i) => write!(f, "generator index {i} out of range"),
            Error::InvalidElement => write!(f, "element does not belong to the level"),
            Error::RelationViolated(j) => write!(f, "relation {j} is not respected"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::BoundExceeded { degree, bound } => {
                write!(f, "degree {degree} exceeds the bound {bound}")
            }
            Error::SearchLimit(n) => write!(f, "search space exceeds {n} candidates"),
            Error::Unsupported(s) => write!(f, "unsupported: {s}"),
            Error::Malformed(s) => write!(f, "malformed input: {s}"),
        }
    }
}

impl core::error::Error for Error {}
