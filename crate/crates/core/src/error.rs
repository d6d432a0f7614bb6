use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("invalid characteristic {0}: must be a prime in 2..=251")]
    InvalidModulus(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("operands live over different prime fields or variable sets")]
    ContextMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("separable minimal polynomial is not separable: {0}")]
    SeparabilityFailure(String),
    #[error("separable minimal polynomial is reducible: {0}")]
    IrreducibilityFailure(String),
    #[error("irreducibility of a degree {0} minimal polynomial cannot be verified; pass trust-irreducible")]
    IrreducibilityUnchecked(usize),
    #[error("automorphism data does not form a group acting on the roots: {0}")]
    AutomorphismGroupFailure(String),
    #[error("inseparable generator {0} is not p-independent of the preceding tower")]
    PIndependenceFailure(usize),
    #[error("malformed tower description: {0}")]
    InvalidSpec(String),
    #[error("elements belong to different towers")]
    SpecMismatch,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("unknown automorphism {0}")]
    UnknownAutomorphism(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Errors raised by the truncated ring, the Heerema–Galois layer and the
/// Galois–Hopf algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("elements belong to different towers")]
    SpecMismatch,
    #[error("element is not a unit of L[X]: its constant coefficient vanishes")]
    NotAUnit,
    #[error("higher derivations of ranks {0} and {1} cannot be multiplied")]
    RankMismatch(usize, usize),
    #[error("family violates the Leibniz rule: {0}")]
    NotLeibniz(String),
    #[error("automorphism is not congruent to the identity modulo X")]
    NotInA0,
    #[error("invalid automorphism data: {0}")]
    InvalidHgElement(String),
    #[error("Galois–Hopf elements from different contexts")]
    ContextMismatch,
    #[error("extracted action is not a semilinear module structure: {0}")]
    SemilinearityFailure(String),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("internal invariant violated: {0}")]
    InternalInconsistency(String),
    #[error("invariants do not form a K-form: found {found} independent invariants, module has dimension {expected}")]
    NotAForm { found: usize, expected: usize },
    #[error("deformation criterion needs exponent at most 1, tower has exponent {0}")]
    ExponentTooLarge(u32),
    #[error("truncated module is not free: closed fiber has rank {rank} for {len} generators")]
    NotFree { rank: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid morphism data: {0}")]
    InvalidMorphism(String),
    #[error("generator data does not define an action: {0}")]
    InvalidAction(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Problems with an input document, each tied to a position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("syntax error at line {line}, column {col}: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("unknown identifier {name} at line {line}, column {col}")]
    Resolution { name: String, line: usize, col: usize },
    #[error("invalid input at line {line}, column {col}: {message}")]
    Invalid { line: usize, col: usize, message: String },
}
