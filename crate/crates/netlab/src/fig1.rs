//! The fixed-size sin/arcsin universal graph and the multiplication replacement.
//!
//! Block `j` (of four), each neuron fed by an affine combination of the listed inputs:
//!
//! ```text
//! a1 = sin(x)          a2 = arcsin(a1)      a3 = sin(a2)      a4 = arcsin(a3)
//! a5 = id(a4, a2)      b1 = sin(x, a2 of block j−1 mod 4)      b2 = sin(b1)
//! m  = a5 · b2
//! ```
//!
//! and the readout is an affine combination of the four products.

use serde::Serialize;
use xprlab_bignum::BigReal;

use crate::graph::{Activation, Edge, NetworkGraph, Node};
use crate::{NetError, Result};

pub const FIG1_BLOCKS: usize = 4;
pub const FIG1_NODES: usize = 2 + 8 * FIG1_BLOCKS;
pub const FIG1_PARAMS: usize = 16 * FIG1_BLOCKS + FIG1_BLOCKS + 1;

/// Builds the graph from `FIG1_PARAMS` weights: per block the `(w…, h)` of
/// a1, a2, a3, a4, a5 (w from a4, w from a2), b1 (w from x, w from the
/// neighbour's a2), b2; then the four readout weights and the readout bias.
pub fn build_universal_sin_arcsin(weights: &[BigReal]) -> Result<NetworkGraph> {
    if weights.len() != FIG1_PARAMS {
        return Err(NetError::Invalid(format!("expected {FIG1_PARAMS} weights, got {}", weights.len())));
    }
    let mut it = weights.iter().cloned();
    let mut next = || it.next().unwrap();
    let id = |block: usize, k: usize| 1 + 8 * block + k;
    let mut nodes = vec![Node { id: 0, act: Activation::Identity, inputs: vec![], bias: BigReal::zero(weights[0].bits()) }];
    let std_node = |nodes: &mut Vec<Node>, id: usize, act: Activation, from: &[usize], next: &mut dyn FnMut() -> BigReal| {
        let inputs = from.iter().map(|&f| Edge { from: f, w: next() }).collect();
        nodes.push(Node { id, act, inputs, bias: next() });
    };
    for j in 0..FIG1_BLOCKS {
        let prev = (j + FIG1_BLOCKS - 1) % FIG1_BLOCKS;
        std_node(&mut nodes, id(j, 0), Activation::Sin, &[0], &mut next);
        std_node(&mut nodes, id(j, 1), Activation::Arcsin, &[id(j, 0)], &mut next);
        std_node(&mut nodes, id(j, 2), Activation::Sin, &[id(j, 1)], &mut next);
        std_node(&mut nodes, id(j, 3), Activation::Arcsin, &[id(j, 2)], &mut next);
        std_node(&mut nodes, id(j, 4), Activation::Identity, &[id(j, 3), id(j, 1)], &mut next);
        std_node(&mut nodes, id(j, 5), Activation::Sin, &[0, id(prev, 1)], &mut next);
        std_node(&mut nodes, id(j, 6), Activation::Sin, &[id(j, 5)], &mut next);
    }
    let bits = weights[0].bits();
    for j in 0..FIG1_BLOCKS {
        let one = || BigReal::one(bits);
        nodes.push(Node {
            id: id(j, 7),
            act: Activation::Multiply,
            inputs: vec![Edge { from: id(j, 6), w: one() }, Edge { from: id(j, 4), w: one() }],
            bias: BigReal::zero(bits),
        });
    }
    let out = FIG1_NODES - 1;
    let readout: Vec<usize> = (0..FIG1_BLOCKS).map(|j| id(j, 7)).collect();
    std_node(&mut nodes, out, Activation::Identity, &readout, &mut next);
    let net = NetworkGraph { nodes, input: 0, output: out };
    net.validate()?;
    Ok(net)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultApprox {
    pub value: BigReal,
    /// Guaranteed `|value − z₁z₂|`.
    pub bound: BigReal,
    /// `C` with `bound = C·ε²`.
    pub constant: BigReal,
}

/// `z₁z₂` from six sine neurons `sin(ε(u₁z₁ + u₂z₂) + π/2)` read out with
/// weights `∓1/(2ε²)`: two polarizations of the product through
/// `u² ≈ 2(1 − cos εu)/ε²`, averaged.
pub fn mult_via_sines(z1: &BigReal, z2: &BigReal, eps: &BigReal) -> Result<MultApprox> {
    if z1.abs() > 1.0 || z2.abs() > 1.0 {
        return Err(NetError::OutOfRange("inputs must lie in [-1, 1]".into()));
    }
    if eps.signum() <= 0 || *eps > 0.1 {
        return Err(NetError::OutOfRange("ε must lie in (0, 0.1]".into()));
    }
    let bits = z1.bits().max(z2.bits()).max(eps.bits());
    let half_pi = BigReal::pi(bits).ldexp(-1);
    // (u₁, u₂, readout sign) per neuron; the z₁², z₂² neurons of the two groups cancel
    const NEURONS: [(f64, f64, f64); 6] =
        [(1.0, 1.0, -1.0), (1.0, 0.0, 1.0), (0.0, 1.0, 1.0), (1.0, 0.0, -1.0), (0.0, 1.0, -1.0), (1.0, -1.0, 1.0)];
    let scale = (eps.square().ldexp(1)).recip();
    let mut value = BigReal::zero(bits);
    for (u1, u2, sign) in NEURONS {
        let s = (eps * (z1 * u1 + z2 * u2) + &half_pi).sin()?;
        value += s * &scale * sign;
    }
    // leading error ε²z₁z₂(z₁²+z₂²)/6 ≤ ε²/3, remainder below ε⁴/10
    let constant = BigReal::ratio(1, 3, bits) + eps.square() * 0.1;
    let bound = &constant * eps.square();
    Ok(MultApprox { value, bound, constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{eval_network, validate_single_transcendental, LayerCheck};

    const B: u32 = 128;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, B)
    }

    #[test]
    fn sizes() {
        let net = build_universal_sin_arcsin(&vec![b(0.0); FIG1_PARAMS]).unwrap();
        assert_eq!(net.nodes.len(), FIG1_NODES);
        assert_eq!(net.param_count(), FIG1_PARAMS);
        assert_eq!(FIG1_PARAMS, 69);
        assert!(build_universal_sin_arcsin(&vec![b(0.0); 68]).is_err());
    }

    #[test]
    fn zero_weights_give_a_constant() {
        let net = build_universal_sin_arcsin(&vec![b(0.0); FIG1_PARAMS]).unwrap();
        let y0 = eval_network(&net, &b(0.1)).unwrap().0;
        let y1 = eval_network(&net, &b(0.9)).unwrap().0;
        assert_eq!(y0, y1);
        assert!(y0.is_zero());
    }

    #[test]
    fn stacks_transcendental_layers() {
        let net = build_universal_sin_arcsin(&vec![b(0.1); FIG1_PARAMS]).unwrap();
        assert!(matches!(validate_single_transcendental(&net).unwrap(), LayerCheck::Violation { .. }));
    }

    #[test]
    fn product_at_the_corner() {
        let r = mult_via_sines(&b(1.0), &b(1.0), &b(1e-2)).unwrap();
        assert!((&r.value - 1.0).abs() < 1e-3);
        assert!((&r.value - 1.0).abs() <= r.bound);
        let z = mult_via_sines(&b(0.7), &b(0.0), &b(1e-2)).unwrap();
        assert!(z.value.abs() <= z.bound);
        assert!(mult_via_sines(&b(1.5), &b(0.0), &b(1e-2)).is_err());
    }
}
