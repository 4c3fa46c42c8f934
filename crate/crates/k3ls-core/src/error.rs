use alloc::string::String;
use core::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A divisor class violates the lattice invariants (odd or too small `n`).
    InvalidClass(String),
    /// Binary lattice operation on classes living on different surfaces.
    MismatchedLattice { left: u64, right: u64 },
    /// Exact arithmetic left the checked 128-bit range.
    Overflow(&'static str),
    /// Degree-0 classes are the trivial system and cannot be classified.
    TrivialSystem,
    /// Operation requires a non-empty system.
    EmptySystem,
    /// The homogeneous system is already a single-point leaf.
    NotReducible,
    /// Point distribution exceeds the available point budget.
    PlanBudget { needed: u64, available: u64 },
    /// Planar non-speciality is only known for 4 or 9 points per plane.
    UnsupportedPlaneCount(u64),
    /// No concrete model exists for this polarization degree.
    UnsupportedModel(u64),
    /// The chosen prime fails validation (composite or too small).
    InvalidPrime(u64),
    /// Point sampling exhausted its retry budget.
    Sampling(String),
    /// All candidate partial derivatives vanish at the point.
    SingularPoint,
    /// Chart truncation order is smaller than the requested multiplicity.
    ChartOrder { have: u64, need: u64 },
    /// Two fat points coincide.
    DuplicatePoint,
    /// Matrix exceeds the elimination frontier cap.
    MatrixCap { entries: u64, cap: u64 },
    /// Section degree exceeds what the model supports.
    DegreeCap { degree: u64, cap: u64 },
    /// Oracle model and system live on different polarizations.
    ModelMismatch { model_n: u64, class_n: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidClass(msg) => write!(f, "invalid system class: {msg}"),
            Error::MismatchedLattice { left, right } => {
                write!(f, "mismatched lattices: n={left} vs n={right}")
            }
            Error::Overflow(what) => write!(f, "exact arithmetic overflow in {what}"),
            Error::TrivialSystem => write!(f, "degree-0 class is the trivial system"),
            Error::EmptySystem => write!(f, "operation requires a non-empty system"),
            Error::NotReducible => write!(f, "system is already a single-point leaf"),
            Error::PlanBudget { needed, available } => {
                write!(f, "point budget exceeded: need {needed}, have {available}")
            }
            Error::UnsupportedPlaneCount(c) => {
                write!(f, "unsupported per-plane point count {c} (only 4 and 9)")
            }
            Error::UnsupportedModel(n) => write!(f, "no concrete model for n={n}"),
            Error::InvalidPrime(p) => write!(f, "invalid prime {p} (must be prime and > 10^6)"),
            Error::Sampling(msg) => write!(f, "point sampling failed: {msg}"),
            Error::SingularPoint => write!(f, "singular point: all candidate partials vanish"),
            Error::ChartOrder { have, need } => {
                write!(f, "chart order {have} too small for multiplicity {need}")
            }
            Error::DuplicatePoint => write!(f, "duplicate fat point"),
            Error::MatrixCap { entries, cap } => {
                write!(f, "matrix of {entries} entries exceeds elimination cap {cap}")
            }
            Error::DegreeCap { degree, cap } => {
                write!(f, "degree {degree} exceeds model cap {cap}")
            }
            Error::ModelMismatch { model_n, class_n } => {
                write!(f, "model has n={model_n} but class has n={class_n}")
            }
        }
    }
}

impl core::error::Error for Error {}
