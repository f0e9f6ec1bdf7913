use thiserror::Error;

/// Errors raised by automaton construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "nondeterministic transition: state `{state}` has several targets on symbol `{symbol}`"
    )]
    Nondeterministic { state: String, symbol: String },

    #[error(
        "output map is not injective: states `{first}` and `{second}` share output `{output}`"
    )]
    NonInjectiveOutput {
        first: String,
        second: String,
        output: String,
    },

    #[error("state `{0}` has conflicting output declarations")]
    ConflictingOutput(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("state `{0}` has no output symbol")]
    MissingOutput(String),

    #[error("forbidden input `{symbol}` in state `{state}`{}", position.map(|p| format!(" at position {p}")).unwrap_or_default())]
    ForbiddenInput {
        state: String,
        symbol: String,
        position: Option<usize>,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),

    #[error("information content must be non-negative, got {0} bits")]
    NegativeInformation(f64),

    #[error("input port of module `{0}` is driven more than once")]
    MultiplyDrivenPort(String),

    #[error("alphabet mismatch: output `{output}` of `{source_module}` has no image in the inputs of `{destination}`")]
    AlphabetMismatch {
        source_module: String,
        destination: String,
        output: String,
    },

    #[error("unknown module `{0}`")]
    UnknownModule(String),

    #[error("automaton `{0}` has no initial state")]
    MissingInitial(String),

    #[error("automaton `{automaton}` is not testable: {} arrow(s) cannot be covered", uncovered.len())]
    Untestable {
        automaton: String,
        uncovered: Vec<(String, String)>,
    },

    #[error("size limit exceeded: {states} states (limit {limit})")]
    SizeLimit { states: u128, limit: u128 },

    #[error("device refused input at step {0}")]
    DeviceRefused(usize),

    #[error("no rule for control state `{state}` reading `{symbol}`")]
    NoRule { state: String, symbol: String },

    #[error("machine is halted")]
    Halted,

    #[error("run did not halt")]
    NotHalted,

    #[error("machine did not halt within {0} steps")]
    NotHalting(usize),

    #[error("configuration `{0}` repeats in a trace")]
    RepeatedConfiguration(String),

    #[error("backward step {step} disagrees with the recorded forward configuration")]
    IrreversibleStep { step: usize },

    #[error("tape alphabet needs at least two symbols, got {0}")]
    AlphabetTooSmall(usize),

    #[error("tape exceeds {0} cells")]
    TapeLimit(usize),

    #[error("invalid machine: {0}")]
    InvalidMachine(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
