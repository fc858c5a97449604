//! Error type shared by the kernel modules.

use alloc::string::String;
use alloc::vec::Vec;

/// Everything the kernel can reject, with enough context to fix the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("cannot parse {text:?} as a rational (expected `p` or `p/q` with nonzero q)")]
    BadRational { text: String },

    #[error("graph is not connected; components: {components:?}")]
    Disconnected { components: Vec<Vec<String>> },

    #[error("line {line} references unknown vertex {vertex:?}")]
    UnknownVertex { line: u32, vertex: String },

    #[error("external leg {leg:?} references unknown vertex {vertex:?}")]
    UnknownLegVertex { leg: String, vertex: String },

    #[error("duplicate line id {line}")]
    DuplicateLine { line: u32 },

    #[error("line ids must be 1..=L with no gaps, got {got:?}")]
    BadLineIds { got: Vec<u32> },

    #[error("antisymmetric matrix is {got}x{got}, needs dimension at least {need}")]
    MatrixTooSmall { need: usize, got: usize },

    #[error("duplicate external leg label {leg:?}")]
    DuplicateLeg { leg: String },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("no invariant declared for external-leg split {split:?}; add it to the invariants table")]
    MissingInvariant { split: Vec<String> },

    #[error("matrix is not antisymmetric at entry ({row},{col})")]
    NotAntisymmetric { row: usize, col: usize },

    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("indices {description} must be disjoint")]
    OverlappingIndices { description: String },

    #[error("antisymmetric matrix must be {expected}x{expected} here, got {got}x{got}")]
    WrongMatrixDimension { expected: usize, got: usize },

    #[error("coupling matrix row {row} has {got} entries, expected {expected}")]
    RaggedCoupling { row: usize, expected: usize, got: usize },

    #[error("{got} external values supplied, coupling matrix has {expected} rows")]
    ExternalCountMismatch { expected: usize, got: usize },

    #[error("external components must come in blocks of {block} per leg, got {got} rows")]
    ExternalBlockMismatch { block: usize, got: usize },

    #[error("contributing index set {mask:?} has negative weight exponent {exponent}; check faces/genus/parity")]
    NegativeWeightExponent { mask: Vec<usize>, exponent: i64 },

    #[error("face count must be at least 1, got {faces}")]
    BadFaceCount { faces: i64 },

    #[error("genus must be nonnegative, got {genus}")]
    BadGenus { genus: i64 },

    #[error("operation requires the {expected} model, input declares {got}")]
    ModelMismatch { expected: String, got: String },

    #[error("line count must be at least 1, got {lines}")]
    BadLineCount { lines: i64 },

    #[error("polynomial {name} built over {got} lines, expected {expected}")]
    LineCountMismatch {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("monomial exponent {exponent} out of range (only 0, 1, 2 are representable)")]
    ExponentOutOfRange { exponent: i64 },

    #[error("{name} has no monomials; the Mellin representation does not exist for this input")]
    NoMonomials { name: String },

    #[error("Mellin domain is empty at D = {dim}; no contour is available there")]
    EmptyDomainAt { dim: String },

    #[error("invariant symbol {symbol:?} has no value; supply one")]
    MissingSymbolValue { symbol: String },
}
