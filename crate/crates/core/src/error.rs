use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("microstrip synthesis out of range for z0 = {z0} ohm: {reason}")]
    SynthesisRange { z0: f64, reason: String },

    #[error("design out of range in {component}: {reason}")]
    DesignRange {
        component: &'static str,
        reason: String,
    },

    #[error(
        "inset feed has no solution: target {r_target} ohm exceeds edge resistance {r_edge} ohm"
    )]
    InsetNoSolution { r_edge: f64, r_target: f64 },

    #[error("beam index {index} out of range 1..={max}")]
    BeamIndex { index: i64, max: usize },

    #[error("beam not visible: |alpha| = {alpha} rad exceeds beta*d = {limit} rad")]
    BeamInvisible { alpha: f64, limit: f64 },

    #[error("degenerate pattern: {0}")]
    DegeneratePattern(String),

    #[error("netlist validation failed: {0}")]
    Netlist(String),

    #[error("topology resonance joining {a} and {b}: denominator magnitude {denominator:e}")]
    TopologyResonance {
        a: String,
        b: String,
        denominator: f64,
    },

    #[error("frequencies must be strictly ascending (index {index})")]
    Ordering { index: usize },

    #[error("inconsistent sweep: {0}")]
    Consistency(String),

    #[error("touchstone parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
