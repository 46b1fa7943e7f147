//! Feedforward networks on a DAG with piecewise and transcendental activations.

use xprlab_bignum::BigError;
use xprlab_certify::CertifyError;

mod fig1;
mod graph;
mod h4;

pub use fig1::{build_universal_sin_arcsin, mult_via_sines, MultApprox, FIG1_BLOCKS, FIG1_NODES, FIG1_PARAMS};
pub use graph::{
    branch_coloring, eval_network, validate_single_transcendental, Activation, BranchTrace, Edge, LayerCheck,
    NetworkGraph, Node,
};
pub use h4::{branched_certificate, random_branched_network, BranchedNetwork};

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("neuron {node}: {message}")]
    Domain { node: usize, message: String },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Big(#[from] BigError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

pub type Result<T> = std::result::Result<T, NetError>;
