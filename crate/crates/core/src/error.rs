use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a genus-0 curve needs at least 3 marked points, got {0}")]
    GenusZeroTooFewPoints(usize),
    #[error("duplicate marked point label `{0}`")]
    DuplicateLabel(String),
    #[error("marked points `{0}` and `{1}` share a coordinate")]
    DuplicateCoordinate(String, String),
    #[error("point `{label}` has level {level}; levels must be at least 2")]
    LevelTooSmall { label: String, level: u32 },
    #[error("cover degree {degree} is not divisible by the level {level} of point `{label}`")]
    IndivisibleCoverDegree {
        degree: u64,
        label: String,
        level: u32,
    },
    #[error("ramification data gives 2g_Y - 2 = {0}, which is not a valid genus")]
    NegativeGenus(i64),
    #[error("bundles live on different marked curves")]
    CurveMismatch,
    #[error("orbifold bundles use different cover degrees ({0} vs {1})")]
    CoverMismatch(u64, u64),
    #[error("no marked point labelled `{0}`")]
    UnknownPoint(String),
    #[error("operation needs a genus-0 curve, curve has genus {0}")]
    GenusNotZero(u32),
    #[error("declared summands do not decompose the bundle: {0}")]
    SummandInconsistent(String),
    #[error("invalid parabolic bundle: {0}")]
    InvalidBundle(String),
    #[error("point `{label}` has even level {level}; oper constructions need level 2c+1")]
    LevelNotOdd { label: String, level: u32 },
    #[error("point `{label}` has level {level}; oper constructions need c = (N-1)/2 >= 2")]
    LevelTooSmallForOper { label: String, level: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("component has Y-degree {y_degree}, whose pushforward degree is not integral")]
    NonIntegralPushforward { y_degree: i64 },
    #[error("invalid orbifold bundle: {0}")]
    InvalidOrbifold(String),
    #[error("oracle mismatch for {expression}: parabolic {parabolic}, orbifold {orbifold}")]
    OracleMismatch {
        expression: String,
        parabolic: String,
        orbifold: String,
    },
    #[error("two punctures share the coordinate {0}")]
    DuplicatePuncture(String),
    #[error("no puncture labelled `{0}`")]
    UnknownPuncture(String),
    #[error("integration failed: {0}")]
    IntegrationFailure(String),
    #[error("operation is not supported for rank {0}")]
    UnsupportedRank(usize),
    #[error("operator is not regular singular at {0}")]
    IrregularSingularity(String),
    #[error("operator singularities do not match the marked points: {0}")]
    SingularityMismatch(String),
    #[error("exact local analysis needs a rational or infinite puncture, got {0}")]
    UnsupportedPuncture(String),
    #[error("parse error: {0}")]
    Parse(String),
}
