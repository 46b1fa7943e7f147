//! Random networks with one transcendental neuron behind a piecewise-linear
//! neuron, and their branch-colored constraint certificates.

use rand::Rng;
use serde::Serialize;
use xprlab_bignum::BigReal;
use xprlab_certify::{vdw_composite_certificate, Certificate, SubCertifier};

use crate::graph::{eval_network, Activation, Edge, NetworkGraph, Node};
use crate::{NetError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct BranchedNetwork {
    pub net: NetworkGraph,
    /// Certifier that holds on every single branch.
    pub sub: SubCertifier,
    /// Sub-progression length the certifier consumes.
    pub s: usize,
    /// Upper bound on the number of branch colors.
    pub p: usize,
}

/// Draws `x → piecewise → [identity] → sin | gaussian → readout`, at most
/// five nodes, with the kink inside `[0.2, 0.8]`.
///
/// On each branch the transcendental neuron sees an affine function of `x`,
/// so the output is one sine wave (determinant certificate, `N = 1`) or the
/// exponential of a quadratic (level-2 exponential identity).
pub fn random_branched_network(rng: &mut impl Rng, bits: u32) -> BranchedNetwork {
    let b = |v: f64| BigReal::from_f64(v, bits);
    let piecewise = match rng.gen_range(0..3) {
        0 => Activation::Relu,
        1 => Activation::LeakyRelu(rng.gen_range(0.05..0.5)),
        _ => Activation::Step,
    };
    let w = rng.gen_range(1.0..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let kink = rng.gen_range(0.2..0.8);
    let mut nodes = vec![
        Node { id: 0, act: Activation::Identity, inputs: vec![], bias: b(0.0) },
        Node { id: 1, act: piecewise, inputs: vec![Edge { from: 0, w: b(w) }], bias: b(-w * kink) },
    ];
    let mut feed = 1;
    if rng.gen_bool(0.5) {
        nodes.push(Node { id: 2, act: Activation::Identity, inputs: vec![Edge { from: 1, w: b(rng.gen_range(-2.0..2.0)) }], bias: b(rng.gen_range(-1.0..1.0)) });
        feed = 2;
    }
    let gaussian = rng.gen_bool(0.5);
    let t = feed + 1;
    nodes.push(Node {
        id: t,
        act: if gaussian { Activation::Gaussian } else { Activation::Sin },
        inputs: vec![Edge { from: feed, w: b(rng.gen_range(-2.0..2.0)) }, Edge { from: 0, w: b(rng.gen_range(-3.0..3.0)) }],
        bias: b(rng.gen_range(-1.0..1.0)),
    });
    let c = rng.gen_range(0.5..2.0);
    let c = if gaussian || rng.gen_bool(0.5) { c } else { -c };
    nodes.push(Node { id: t + 1, act: Activation::Identity, inputs: vec![Edge { from: t, w: b(c) }], bias: b(0.0) });
    let net = NetworkGraph { nodes, input: 0, output: t + 1 };
    let (sub, s) = if gaussian { (SubCertifier::ExpPoly { d: 2 }, 4) } else { (SubCertifier::Det { n: 1 }, 5) };
    BranchedNetwork { net, sub, s, p: 2 }
}

/// Colors the van der Waerden grid on `[a, b]` by branch and certifies the
/// monochromatic sub-progression it must contain.
pub fn branched_certificate(bn: &BranchedNetwork, a: &BigReal, b: &BigReal, tol: Option<BigReal>) -> Result<Certificate> {
    bn.net.validate()?;
    let pieces = bn.net.nodes.iter().filter(|n| n.act.is_piecewise()).count();
    if 1usize << pieces > bn.p {
        return Err(NetError::Invalid(format!("{pieces} piecewise neurons exceed p = {}", bn.p)));
    }
    let g = |x: &BigReal| eval_network(&bn.net, x).map(|(y, _)| y);
    let colorer = |x: &BigReal| eval_network(&bn.net, x).map(|(_, t)| t.index());
    Ok(vdw_composite_certificate(g, a, b, colorer, bn.sub.clone(), bn.s, bn.p, tol)?)
}
