//! Classical two-stage solver for full-sampling hidden linear function
//! instances on symmetric binary matrices.
//!
//! Stage one ([`cla`]) runs GF(2) elimination on `A` to get the rank `r`,
//! the pivot columns, a kernel basis and one particular solution `z_a`.
//! Stage two ([`cpc`]) produces every solution `z_a ⊕ y` with `y ∈ Col(A)`,
//! either gate by gate through the layered circuit or by Gray-code
//! streaming. [`oracle`] holds the independent checks.

pub mod bench;
pub mod cla;
pub mod cpc;
pub mod error;
pub mod gf2;
pub mod instance;
pub mod oracle;
pub mod plot;
pub mod timing;

pub use cla::{run_cla, verify_q_linearity, ClaSummary};
pub use cpc::{
    compile_cpc, enumerate_chunk, enumerate_solutions, eval_circuit, Digest, LayeredCircuit,
    SolutionSpace,
};
pub use error::{HlfError, Result};
pub use gf2::{BitMatrix, BitVector};
pub use instance::{EdgeColoring, HlfInstance};
