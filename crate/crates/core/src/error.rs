use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid quantity: {0}")]
    InvalidQuantity(String),

    #[error("unknown unit `{0}`")]
    UnknownUnit(String),

    #[error("invalid mass {0}: must be finite and > 0")]
    InvalidMass(f64),

    #[error("radius {radius} is not outside the horizon 2M = {horizon}")]
    InsideHorizon { radius: f64, horizon: f64 },

    #[error("mass change leaves M = {remaining}, not above zero")]
    EvaporatedPastZero { remaining: f64 },

    #[error("mass change leaves M = {remaining}, below the floor {floor}")]
    EvaporatedPastFloor { remaining: f64, floor: f64 },

    #[error(
        "complementarity violation: the {read} channel was already read, {requested} is destroyed"
    )]
    ComplementarityViolation {
        read: &'static str,
        requested: &'static str,
    },

    #[error("invalid shell window {0}: must be finite and > 0")]
    InvalidWindow(f64),

    #[error("invalid disk profile: {0}")]
    InvalidProfile(String),

    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),

    #[error("invalid event schedule: {0}")]
    InvalidSchedule(String),

    #[error("step size underflow at t = {t}, M = {mass}, h = {step}")]
    Stiffness { t: f64, mass: f64, step: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid feedback model: {0}")]
    InvalidModel(String),
}
