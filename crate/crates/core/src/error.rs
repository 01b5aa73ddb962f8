//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("phase order must be at least 1")]
    ZeroPhaseOrder,

    #[error("phase order lcm({0}, {1}) exceeds the 64-bit range")]
    PhaseOrderOverflow(u64, u64),

    #[error("order {target} is not a multiple of phase order {have}")]
    IncompatiblePhaseOrder { have: u64, target: u64 },

    #[error("dimension must be at least 2 (got {0})")]
    InvalidDimension(usize),

    #[error("number of parties must be at least 2 (got {0})")]
    InvalidParties(usize),

    #[error("number of settings must be at least 2 (got {0})")]
    InvalidSettings(usize),

    #[error("operator level {level} out of range 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("setting value {value} out of range 0..{settings}")]
    SettingOutOfRange { value: usize, settings: usize },

    #[error("setting vector has {got} entries, scenario has {expected} parties")]
    SettingVectorLength { got: usize, expected: usize },

    #[error("operator shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("state space of {size} amplitudes exceeds the dense cap {cap}")]
    DenseCapExceeded { size: u128, cap: usize },

    #[error("assignment space of {space} assignments exceeds the budget {budget}")]
    BudgetExceeded { space: u128, budget: u128 },

    #[error("{count} constraints exceed the subset-enumeration cap {cap}")]
    TooManyConstraints { count: usize, cap: usize },

    #[error(
        "constraint family (settings {constraint_settings}, modulus {constraint_modulus}) \
             does not match assignment (settings {assignment_settings}, dim {assignment_dim})"
    )]
    ConstraintMismatch {
        constraint_settings: usize,
        constraint_modulus: i64,
        assignment_settings: usize,
        assignment_dim: usize,
    },

    #[error("congruence modulus must be positive (got {0})")]
    InvalidModulus(i64),
}

pub type Result<T> = std::result::Result<T, Error>;
