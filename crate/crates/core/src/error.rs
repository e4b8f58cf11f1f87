use thiserror::Error;

/// Errors raised by the numerical core.
///
/// The `Display` text of each variant starts with a stable kebab-case code
/// that the CLI surfaces verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad-dims: {0}")]
    BadDims(String),
    #[error("not-hermitian: asymmetry {0:.3e}")]
    NotHermitian(f64),
    #[error("not-unitary: deviation {0:.3e}")]
    NotUnitary(f64),
    #[error("not-a-state: {0}")]
    NotAState(String),
    #[error("not-normalized: norm {0}")]
    NotNormalized(f64),
    #[error("bad-probabilities: {0}")]
    BadProbabilities(String),
    #[error("not-product-ensemble: member {0} is entangled")]
    NotProductEnsemble(usize),
    #[error("not-orthogonal: members {0} and {1} overlap")]
    NotOrthogonal(usize, usize),
    #[error("gram-not-identity: deviation {0:.3e}")]
    GramNotIdentity(f64),
    #[error("trivial-set: at least two members required")]
    TrivialSet,
    #[error("unsupported-dims: {0}")]
    UnsupportedDims(String),
    #[error("unsupported-mode: {0}")]
    UnsupportedMode(String),
    #[error("no-such-entry: {0}")]
    NoSuchEntry(String),
    #[error("bad-params: {0}")]
    BadParams(String),
}

impl Error {
    /// The stable kebab-case code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadDims(_) => "bad-dims",
            Error::NotHermitian(_) => "not-hermitian",
            Error::NotUnitary(_) => "not-unitary",
            Error::NotAState(_) => "not-a-state",
            Error::NotNormalized(_) => "not-normalized",
            Error::BadProbabilities(_) => "bad-probabilities",
            Error::NotProductEnsemble(_) => "not-product-ensemble",
            Error::NotOrthogonal(..) => "not-orthogonal",
            Error::GramNotIdentity(_) => "gram-not-identity",
            Error::TrivialSet => "trivial-set",
            Error::UnsupportedDims(_) => "unsupported-dims",
            Error::UnsupportedMode(_) => "unsupported-mode",
            Error::NoSuchEntry(_) => "no-such-entry",
            Error::BadParams(_) => "bad-params",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
