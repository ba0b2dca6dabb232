use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation at omega = {omega} rad/s is within tolerance of the pole {pole}")]
    PoleProximity { omega: f64, pole: Complex64 },

    #[error("unsupported configuration: {0}")]
    Configuration(String),

    #[error("monotonicity assumption violated: {0}")]
    Monotonicity(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
