use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid algebra spec: {0}")]
    InvalidSpec(String),
    #[error("quotient is not Artinian: {0}")]
    NotArtinian(String),
    #[error("quotient is not local: {0}")]
    NotLocal(String),
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("element is not a 1-unit: {0}")]
    NotOneUnit(String),
    #[error("variable name `{0}` already in use")]
    NameCollision(String),
    #[error("operands live over different algebras or modules")]
    AlgebraMismatch,
    #[error("symbol entry is not a unit: {0}")]
    NonUnitEntry(String),
    #[error("symbol is not of generator shape: {0}")]
    NotGeneratorShape(String),
    #[error("no distinguished variable is designated as the last variable")]
    SigmaNotDesignated,
    #[error("quotient by the distinguished variable is not local: {0}")]
    QuotientNotLocal(String),
    #[error("side condition failed: {0}")]
    SideConditionFailed(String),
    #[error("invalid position: {0}")]
    PositionInvalid(String),
    #[error("certificate parameter c is not a unit: {0}")]
    NonUnitC(String),
    #[error("precision {precision} insufficient: {reason}")]
    PrecisionInsufficient { precision: u32, reason: String },
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
