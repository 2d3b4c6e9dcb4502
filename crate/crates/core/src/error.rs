use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: relative asymmetry {0:.3e}")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite: eigenvalue {lambda:.3e} below -1e-10*lambda_max")]
    NotPsd { lambda: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("equality constraints are rank deficient (rank {rank} < {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },

    #[error(
        "robust problem is infeasible: sigma_max(Q) = {sigma_max:.6e} <= eta = {eta:.6e}; \
         no w satisfies ||Qw|| - eta*||w|| >= 1"
    )]
    InfeasibleFactorBound { sigma_max: f64, eta: f64 },

    #[error("degenerate linearization: ||Q w_k|| = {norm:.3e} too close to zero")]
    DegenerateLinearization { norm: f64 },

    #[error("subproblem solve failed at outer iteration {iter}: status {status:?}")]
    SubproblemFailed {
        iter: usize,
        status: crate::socp::SolveStatus,
    },

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
