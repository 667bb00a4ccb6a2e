use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarvestError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular argument: eps and delta are both zero")]
    SingularArgument,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("imaginary residue {residue:.3e} exceeds tolerance {tolerance:.3e} in {quantity}")]
    ImaginaryResidue {
        quantity: &'static str,
        residue: f64,
        tolerance: f64,
    },
    #[error("negative probability {value:.3e} in {quantity} (tolerance {tolerance:.3e})")]
    NegativeProbability {
        quantity: &'static str,
        value: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, HarvestError>;
