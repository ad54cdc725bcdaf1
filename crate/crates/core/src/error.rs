use thiserror::Error;

/// Errors produced by the workbench numerics.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid argument (empty grid, shape mismatch, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An iterative limit did not settle within the iteration budget.
    /// Carries the sequence of successive distances for diagnosis.
    #[error("convergence failure after {iterations} iterations; last distance {last}")]
    Convergence {
        iterations: usize,
        last: f64,
        distances: Vec<f64>,
    },

    /// A quadrature did not reach the requested accuracy.
    #[error("quadrature failure: residual estimate {residual}")]
    Quadrature { residual: f64 },

    /// A matrix factorization or eigensolve failed.
    #[error("linear algebra failure: {0}")]
    Linalg(String),

    /// Jordan chain extraction left a residual above tolerance.
    #[error("defective clustering at eigenvalue {eigenvalue}: residual {residual}")]
    DefectiveCluster { eigenvalue: String, residual: f64 },

    /// Series of block norms did not become summable within the budget.
    #[error("block series diverged; {retained} blocks retained")]
    SeriesDivergence {
        retained: usize,
        partial_sums: Vec<f64>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
