//! Crate-wide error type.

use core::fmt;

use crate::model::LinkId;

/// Alias for results produced by this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by construction and algorithm entry points.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Path-loss exponent must exceed the doubling dimension of the plane.
    InvalidAlpha { alpha: f64, m: u32 },
    /// SIR threshold below 1.
    InvalidBeta(f64),
    /// Negative or non-finite link weight.
    InvalidWeight(f64),
    /// A coordinate is NaN or infinite.
    NonFiniteCoordinate,
    /// Sender and receiver coincide.
    ZeroLengthLink(LinkId),
    /// Two links in one instance carry the same identifier.
    DuplicateLinkId(LinkId),
    /// An operation referenced a link id absent from the given set.
    LinkNotFound(LinkId),
    /// Power exponent outside the open interval (0, 1).
    InvalidTau(f64),
    /// Conflict threshold scale below 1.
    InvalidGamma(f64),
    /// Conflict threshold exponent outside [0, 1).
    InvalidDelta(f64),
    /// The admissible power-exponent interval is empty for this delta.
    EmptyTauInterval { delta: f64, lo: f64, hi: f64 },
    /// Iterated threshold application failed to settle within the cap.
    IterationLimit,
    /// An order passed to a coloring routine is not a permutation of the
    /// graph's vertices.
    InvalidOrder,
    /// Weighted selection requires non-negative weights.
    NegativeWeight { id: LinkId, weight: f64 },
    /// No weight supplied for a vertex of the graph.
    MissingWeight(LinkId),
    /// Channel count must be at least 1.
    InvalidChannelCount(usize),
    /// A utility specification carries no levels.
    EmptyLevels(LinkId),
    /// Utility levels must be strictly increasing with thresholds >= 1.
    InvalidLevels(LinkId),
    /// No utility specification found for a link.
    MissingUtility(LinkId),
    /// The expansion needed the other utility form for this link.
    WrongUtilityForm(LinkId),
    /// A utility claimed monotone decreased during threshold inversion.
    NonMonotoneUtility(LinkId),
    /// Two selected replicas collapse onto the same original link.
    DuplicateOrigin(LinkId),
    /// A node has no antenna/channel capabilities entry.
    MissingCaps { x: f64, y: f64 },
    /// Antenna count or channel set invalid.
    InvalidCaps,
    /// A virtual link references an original missing from the base graph.
    UnknownOriginal(LinkId),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidAlpha { alpha, m } => {
                write!(f, "path-loss exponent {alpha} must exceed dimension {m}")
            }
            Error::InvalidBeta(b) => write!(f, "SIR threshold {b} must be >= 1"),
            Error::InvalidWeight(w) => write!(f, "weight {w} must be finite and >= 0"),
            Error::NonFiniteCoordinate => write!(f, "coordinates must be finite"),
            Error::ZeroLengthLink(id) => write!(f, "link {id} has zero length"),
            Error::DuplicateLinkId(id) => write!(f, "duplicate link id {id}"),
            Error::LinkNotFound(id) => write!(f, "link {id} not present in the given set"),
            Error::InvalidTau(t) => write!(f, "power exponent {t} must lie in (0, 1)"),
            Error::InvalidGamma(g) => write!(f, "conflict scale {g} must be >= 1"),
            Error::InvalidDelta(d) => write!(f, "conflict exponent {d} must lie in [0, 1)"),
            Error::EmptyTauInterval { delta, lo, hi } => write!(
                f,
                "no admissible power exponent for delta {delta}: interval ({lo}, {hi}) is empty"
            ),
            Error::IterationLimit => write!(f, "iterated threshold did not settle within 64 steps"),
            Error::InvalidOrder => write!(f, "order is not a permutation of the graph vertices"),
            Error::NegativeWeight { id, weight } => {
                write!(f, "link {id} has negative weight {weight}")
            }
            Error::MissingWeight(id) => write!(f, "no weight supplied for link {id}"),
            Error::InvalidChannelCount(c) => write!(f, "channel count {c} must be >= 1"),
            Error::EmptyLevels(id) => write!(f, "utility of link {id} has no levels"),
            Error::InvalidLevels(id) => write!(f, "utility levels of link {id} are invalid"),
            Error::MissingUtility(id) => write!(f, "no utility specification for link {id}"),
            Error::WrongUtilityForm(id) => {
                write!(
                    f,
                    "utility of link {id} is not in the form this expansion needs"
                )
            }
            Error::NonMonotoneUtility(id) => {
                write!(f, "utility of link {id} is not monotone non-decreasing")
            }
            Error::DuplicateOrigin(id) => {
                write!(f, "two selected replicas share the original link {id}")
            }
            Error::MissingCaps { x, y } => {
                write!(f, "no antenna/channel capabilities for node ({x}, {y})")
            }
            Error::InvalidCaps => write!(f, "antennas must be >= 1 and channel sets nonempty"),
            Error::UnknownOriginal(id) => {
                write!(
                    f,
                    "virtual link references original {id} absent from the base graph"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
