use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("invalid brane: {0}")]
    InvalidBrane(String),

    #[error("pole in Pochhammer symbol ({a})_{n}")]
    Pole { a: String, n: i64 },

    #[error("root of unity of order {needed} is not in Q(zeta_{m}); enlarge the order")]
    Order { needed: String, m: u32 },

    #[error("order {m} exceeds the configured cap {cap}")]
    OrderCap { m: u32, cap: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("series: {0}")]
    Series(String),

    #[error("exponent {exponent} of {var} needs a denominator dividing {denom}; enlarge the denominator")]
    Denominator {
        var: String,
        exponent: String,
        denom: u32,
    },

    #[error("newton iteration stalled after {0} steps")]
    NoConvergence(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("input: {0}")]
    Input(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
