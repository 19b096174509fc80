use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    TargetOutOfRange { index: usize, n_qubits: usize },

    #[error("register size {0} is not supported (1 to 3 qubits)")]
    UnsupportedWidth(usize),

    #[error("malformed Pauli label {0:?}")]
    MalformedPauli(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("observable is not a Hermitian involution (deviation {0:.3e})")]
    NotInvolution(f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("projective measurement requires a random source")]
    MissingRng,

    #[error("measurement branch {outcome:+} has probability {probability:.3e}")]
    DegenerateBranch { outcome: i8, probability: f64 },

    #[error("circuit contains a non-unitary operation ({0})")]
    NonUnitaryCircuit(&'static str),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("degenerate ground state: {multiplicity} states at energy {energy}")]
    DegenerateGround { multiplicity: usize, energy: f64 },

    #[error("unknown state label {0:?}")]
    UnknownStateLabel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameter length mismatch for {what}: expected {expected}, found {found}")]
    ParameterLength { what: &'static str, expected: usize, found: usize },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("infeasible (epsilon, n_targ) pair: threshold {0:.3e} is not positive")]
    InfeasibleThreshold(f64),

    #[error("circuit needs an ancilla qubit but the register is already {0} qubits wide")]
    MissingAncilla(usize),

    #[error("calibration matrix is singular (condition number {0:.3e})")]
    SingularCalibration(f64),

    #[error("REFF evolution requested without trained parameters")]
    MissingReffParameters,

    #[error("time grid is not uniform")]
    NonUniformGrid,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("missing correlation series {0}")]
    MissingSeries(String),

    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),
}
