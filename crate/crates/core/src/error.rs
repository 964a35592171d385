use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("d and k must both be at least 3 (got d = {d}, k = {k})")]
    DegenerateParams { d: u32, k: u32 },

    #[error("(d, k) = ({d}, {k}) is not hyperbolic: (d-2)(k-2) = {product} <= 4")]
    NotHyperbolic { d: u32, k: u32, product: u64 },

    #[error(
        "vertex budget of {budget} exceeded while building radius {radius} \
         (stopped in layer {level}); roughly {estimate} vertices would be required"
    )]
    VertexBudget {
        budget: usize,
        radius: u32,
        level: u32,
        estimate: u64,
    },

    #[error("map construction failed: {0}")]
    Construction(String),

    #[error("length {n} needs a map complete within radius {needed}, but the map is complete only within {available}")]
    BeyondRadius { n: u32, needed: u32, available: u32 },

    #[error("vertex {0} is not in the map")]
    NoSuchVertex(u32),

    #[error("no vertex classification defined for H({d},{k}) with {scheme} layers")]
    NoClassification {
        d: u32,
        k: u32,
        scheme: &'static str,
    },

    #[error("vertex {0} lies outside the region where its class is determined")]
    ClassUndetermined(u32),

    #[error("cannot certify the bounded side of the polygon: {0}")]
    InteriorUncertified(String),

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("N_k is only defined for k >= 6 (got k = {0})")]
    Deg3Undefined(u32),

    #[error("formula branch invalid: R^2 - 4(d-1) = {0} < 0")]
    InvalidBranch(f64),

    #[error("unknown recurrence system `{0}`")]
    UnknownSystem(String),

    #[error("the parametric system requires d >= 7 (got d = {0})")]
    ParamTooSmall(u32),

    #[error("matrix is not primitive")]
    NotPrimitive,

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
}
