use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown unit `{unit}` for `{key}`")]
    UnknownUnit { key: String, unit: String },

    #[error("missing config key `{0}`")]
    MissingKey(String),

    #[error("oblate geometry not supported (semi_major_a {a} < semi_minor_b {b})")]
    Oblate { a: f64, b: f64 },

    #[error("integrator failed to meet tolerance; last good time {t_last}")]
    StepFailure { t_last: f64 },

    #[error("integrator exceeded {max_steps} steps; last good time {t_last}")]
    TooManySteps { max_steps: usize, t_last: f64 },

    #[error(
        "response is not linear in velocity: quadratic/linear = {ratio:.3}; use smaller velocities"
    )]
    Nonlinear { ratio: f64 },

    #[error("time step too coarse: omega0*dt = {0:.3} (must be <= 0.1)")]
    CoarseTimeStep(f64),

    #[error("non-positive momentum diffusion coefficient: {0}")]
    NonPositiveDiffusion(f64),

    #[error("dark state: drive couplings vanish, steady state is |0>")]
    DarkState,

    #[error("{0}")]
    Invalid(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
