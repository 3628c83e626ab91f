//! Engine error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at evaluation point: denominator of `{0}` vanishes")]
    PoleAtPoint(String),
    #[error("actions of phi and sigma do not commute on variable `{0}`")]
    NonCommutingActions(String),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("unsupported root structure: {0}")]
    UnsupportedRootStructure(String),
    #[error("lambda is not constant in the top variable")]
    NonConstantLambda,
    #[error("word is not in the kernel of the dependence system: consistency sum failed at (k={k}, class={class})")]
    InconsistentWord { k: i64, class: usize },
    #[error("witness matrix is singular")]
    SingularWitness,
    #[error("coefficient matrix is singular or undefined at index {0}")]
    SingularAAtIndex(i64),
    #[error("unsupported tower for this operation: {0}")]
    UnsupportedTower(String),
    #[error("trailing coefficient of the scalar equation is zero")]
    ZeroTrailingCoefficient,
    #[error("every sample in the plan hit a pole")]
    AllSamplesHitPoles,
    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),
    #[error("factor search budget exceeded (degree too large for the Kronecker step)")]
    FactorBudgetExceeded,
}

impl EngineError {
    /// Stable machine-readable code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::DivisionByZero => "division-by-zero",
            EngineError::PoleAtPoint(_) => "pole-at-point",
            EngineError::NonCommutingActions(_) => "non-commuting-actions",
            EngineError::InvalidTower(_) => "invalid-tower",
            EngineError::UnsupportedRootStructure(_) => "unsupported-root-structure",
            EngineError::NonConstantLambda => "non-constant-lambda",
            EngineError::InconsistentWord { .. } => "inconsistent-word",
            EngineError::SingularWitness => "singular-b",
            EngineError::SingularAAtIndex(_) => "singular-a-at-index",
            EngineError::UnsupportedTower(_) => "unsupported-tower",
            EngineError::ZeroTrailingCoefficient => "zero-trailing-coefficient",
            EngineError::AllSamplesHitPoles => "all-samples-hit-poles",
            EngineError::DimensionMismatch(_) => "dimension-mismatch",
            EngineError::FactorBudgetExceeded => "factor-budget-exceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, EngineError>;
