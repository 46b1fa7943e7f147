use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xprlab_bignum::BigReal;
use xprlab_certify::Coloring;

use crate::{NetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Step,
    Relu,
    LeakyRelu(f64),
    SqRelu,
    Sin,
    Arcsin,
    Tanh,
    Sigmoid,
    Elu(f64),
    Swish,
    Gaussian,
    /// Product of the weighted inputs plus the bias.
    Multiply,
}

impl Activation {
    /// Has two analytic branches split at 0.
    pub fn is_piecewise(self) -> bool {
        matches!(self, Activation::Step | Activation::Relu | Activation::LeakyRelu(_) | Activation::SqRelu | Activation::Elu(_))
    }

    /// Not polynomial on its branches.
    pub fn is_transcendental(self) -> bool {
        matches!(
            self,
            Activation::Sin
                | Activation::Arcsin
                | Activation::Tanh
                | Activation::Sigmoid
                | Activation::Elu(_)
                | Activation::Swish
                | Activation::Gaussian
        )
    }

    fn apply(self, z: &BigReal) -> std::result::Result<BigReal, String> {
        let bits = z.bits();
        let neg = z.is_negative();
        let e = |v: std::result::Result<BigReal, xprlab_bignum::BigError>| v.map_err(|e| e.to_string());
        Ok(match self {
            Activation::Identity | Activation::Multiply => z.clone(),
            Activation::Step => BigReal::from_i64(i64::from(!neg), bits),
            Activation::Relu => if neg { BigReal::zero(bits) } else { z.clone() },
            Activation::LeakyRelu(a) => if neg { z * a } else { z.clone() },
            Activation::SqRelu => if neg { BigReal::zero(bits) } else { z.square() },
            Activation::Sin => e(z.sin())?,
            Activation::Arcsin => {
                let slop = BigReal::one(bits).ldexp(-(bits as i32) / 2);
                let over = z.abs() - 1.0;
                if over > slop {
                    return Err(format!("arcsin input {} outside [-1, 1]", z.to_short(12)));
                }
                if over.signum() > 0 {
                    e(BigReal::from_i64(z.signum().into(), bits).asin())?
                } else {
                    e(z.asin())?
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => (e((-z).exp())? + 1.0).recip(),
            Activation::Elu(a) => if neg { (e(z.exp())? - 1.0) * a } else { z.clone() },
            Activation::Swish => z / (e((-z).exp())? + 1.0),
            Activation::Gaussian => e((-z.square()).exp())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub w: BigReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub act: Activation,
    #[serde(default)]
    pub inputs: Vec<Edge>,
    pub bias: BigReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkGraph {
    pub nodes: Vec<Node>,
    pub input: usize,
    pub output: usize,
}

/// Branch taken by each piecewise neuron, in topological order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchTrace {
    pub branches: Vec<(usize, u8)>,
}

impl BranchTrace {
    /// `Σ b_i 2^i` over the piecewise neurons.
    pub fn index(&self) -> usize {
        self.branches.iter().enumerate().map(|(i, (_, b))| usize::from(*b) << i).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LayerCheck {
    Ok,
    Violation { path: Vec<usize> },
}

impl NetworkGraph {
    fn position(&self) -> HashMap<usize, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect()
    }

    /// Topological order as node indices; errors on cycles and dangling edges.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let pos = self.position();
        if pos.len() != self.nodes.len() {
            return Err(NetError::Invalid("duplicate node ids".into()));
        }
        let mut indeg = vec![0usize; self.nodes.len()];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for e in &n.inputs {
                let j = *pos.get(&e.from).ok_or_else(|| NetError::Invalid(format!("node {} reads missing node {}", n.id, e.from)))?;
                indeg[i] += 1;
                out[j].push(i);
            }
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop() {
            order.push(i);
            for &k in out[i].iter().rev() {
                indeg[k] -= 1;
                if indeg[k] == 0 {
                    ready.push(k);
                }
            }
        }
        if order.len() != self.nodes.len() {
            return Err(NetError::Invalid("graph has a cycle".into()));
        }
        Ok(order)
    }

    pub fn validate(&self) -> Result<Vec<usize>> {
        let order = self.topological_order()?;
        let pos = self.position();
        let input = pos.get(&self.input).ok_or_else(|| NetError::Invalid("missing input node".into()))?;
        let output = pos.get(&self.output).ok_or_else(|| NetError::Invalid("missing output node".into()))?;
        if !self.nodes[*input].inputs.is_empty() {
            return Err(NetError::Invalid("the input node has incoming edges".into()));
        }
        if self.nodes[*output].act != Activation::Identity {
            return Err(NetError::Invalid("the output neuron must be an affine readout".into()));
        }
        if let Some(n) = self.nodes.iter().find(|n| n.act == Activation::Multiply && n.inputs.len() < 2) {
            return Err(NetError::Invalid(format!("multiplication neuron {} needs two inputs", n.id)));
        }
        Ok(order)
    }

    /// Neurons other than the input and output.
    pub fn hidden_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.id != self.input && n.id != self.output).count()
    }

    /// Weights and biases of standard neurons; multiplication neurons carry none.
    pub fn param_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.id != self.input && n.act != Activation::Multiply)
            .map(|n| n.inputs.len() + 1)
            .sum()
    }
}

/// Output and branch trace at `x`.
pub fn eval_network(net: &NetworkGraph, x: &BigReal) -> Result<(BigReal, BranchTrace)> {
    let order = net.validate()?;
    eval_ordered(net, &order, x)
}

fn eval_ordered(net: &NetworkGraph, order: &[usize], x: &BigReal) -> Result<(BigReal, BranchTrace)> {
    let pos = net.position();
    let mut value: Vec<Option<BigReal>> = vec![None; net.nodes.len()];
    let mut branches = Vec::new();
    for &i in order {
        let n = &net.nodes[i];
        let v = if n.id == net.input {
            x.clone()
        } else if n.act == Activation::Multiply {
            n.inputs.iter().fold(BigReal::one(x.bits()), |acc, e| acc * (&e.w * value[pos[&e.from]].as_ref().unwrap())) + &n.bias
        } else {
            let z = n.inputs.iter().fold(n.bias.clone(), |acc, e| acc + &e.w * value[pos[&e.from]].as_ref().unwrap());
            if n.act.is_piecewise() {
                branches.push((n.id, u8::from(!z.is_negative())));
            }
            n.act.apply(&z).map_err(|message| NetError::Domain { node: n.id, message })?
        };
        value[i] = Some(v);
    }
    Ok((value[pos[&net.output]].take().unwrap(), BranchTrace { branches }))
}

/// Colors of `a + kh`, `k = 0..=m`, numbered densely by first appearance.
pub fn branch_coloring(net: &NetworkGraph, a: &BigReal, h: &BigReal, m: usize) -> Result<Coloring> {
    let order = net.validate()?;
    let traces = (0..=m)
        .into_par_iter()
        .map(|k| eval_ordered(net, &order, &(a + h * (k as f64))).map(|(_, t)| t))
        .collect::<Result<Vec<_>>>()?;
    let mut seen: HashMap<BranchTrace, usize> = HashMap::new();
    let colors = traces
        .into_iter()
        .map(|t| {
            let next = seen.len();
            *seen.entry(t).or_insert(next)
        })
        .collect();
    Ok(Coloring { colors })
}

/// Every input-to-output path meets at most one transcendental neuron.
pub fn validate_single_transcendental(net: &NetworkGraph) -> Result<LayerCheck> {
    let order = net.validate()?;
    let pos = net.position();
    // most transcendental neurons on a path from the input, with the predecessor realizing it
    let mut best: Vec<Option<(usize, Option<usize>)>> = vec![None; net.nodes.len()];
    for &i in &order {
        let n = &net.nodes[i];
        let own = usize::from(n.act.is_transcendental());
        if n.id == net.input {
            best[i] = Some((own, None));
            continue;
        }
        best[i] = n
            .inputs
            .iter()
            .filter_map(|e| {
                let j = pos[&e.from];
                best[j].map(|(c, _)| (c + own, Some(j)))
            })
            .max_by_key(|(c, _)| *c);
    }
    let out = pos[&net.output];
    match best[out] {
        Some((c, _)) if c > 1 => {
            let mut path = vec![net.nodes[out].id];
            let mut at = out;
            while let Some((_, Some(prev))) = best[at] {
                path.push(net.nodes[prev].id);
                at = prev;
            }
            path.reverse();
            Ok(LayerCheck::Violation { path })
        }
        _ => Ok(LayerCheck::Ok),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u32 = 128;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, B)
    }

    fn node(id: usize, act: Activation, inputs: &[(usize, f64)], bias: f64) -> Node {
        Node { id, act, inputs: inputs.iter().map(|&(from, w)| Edge { from, w: b(w) }).collect(), bias: b(bias) }
    }

    pub(crate) fn chain(acts: &[Activation]) -> NetworkGraph {
        let mut nodes = vec![node(0, Activation::Identity, &[], 0.0)];
        for (i, a) in acts.iter().enumerate() {
            nodes.push(node(i + 1, *a, &[(i, 1.0)], 0.0));
        }
        let out = acts.len() + 1;
        nodes.push(node(out, Activation::Identity, &[(out - 1, 1.0)], 0.0));
        NetworkGraph { nodes, input: 0, output: out }
    }

    #[test]
    fn relu_on_the_negative_side() {
        let (y, t) = eval_network(&chain(&[Activation::Relu]), &b(-0.5)).unwrap();
        assert!(y.is_zero());
        assert_eq!(t.branches, vec![(1, 0)]);
    }

    #[test]
    fn sine_neuron() {
        let x = BigReal::pi(B).ldexp(-2);
        let (y, _) = eval_network(&chain(&[Activation::Sin]), &x).unwrap();
        assert!((y - x.sin().unwrap()).is_zero());
    }

    #[test]
    fn identity_chain() {
        let net = chain(&[Activation::Identity; 3]);
        assert_eq!(eval_network(&net, &b(0.37)).unwrap().0, b(0.37));
    }

    #[test]
    fn arcsin_domain_names_the_node() {
        let mut net = chain(&[Activation::Arcsin]);
        net.nodes[1].inputs[0].w = b(3.0);
        assert!(matches!(eval_network(&net, &b(0.5)), Err(NetError::Domain { node: 1, .. })));
        let slop = BigReal::one(B) + BigReal::one(B).ldexp(-100);
        let (y, _) = eval_network(&chain(&[Activation::Arcsin]), &slop).unwrap();
        assert!((y - BigReal::pi(B).ldexp(-1)).is_zero());
    }

    #[test]
    fn cycles_and_readouts() {
        let mut net = chain(&[Activation::Relu, Activation::Relu]);
        net.nodes[1].inputs.push(Edge { from: 2, w: b(1.0) });
        assert!(matches!(net.validate(), Err(NetError::Invalid(_))));
        let mut net = chain(&[Activation::Relu]);
        net.nodes[2].act = Activation::Sin;
        assert!(net.validate().is_err());
    }

    #[test]
    fn layer_validation() {
        assert_eq!(validate_single_transcendental(&chain(&[Activation::Relu, Activation::Sin, Activation::Identity])).unwrap(), LayerCheck::Ok);
        let v = validate_single_transcendental(&chain(&[Activation::Sin, Activation::Sin])).unwrap();
        assert_eq!(v, LayerCheck::Violation { path: vec![0, 1, 2, 3] });
    }

    #[test]
    fn kink_splits_the_grid_in_two_runs() {
        let mut net = chain(&[Activation::Relu]);
        net.nodes[1].bias = b(-0.5);
        let c = branch_coloring(&net, &b(0.0), &b(0.05), 20).unwrap();
        let runs = c.colors.windows(2).filter(|w| w[0] != w[1]).count() + 1;
        assert_eq!(runs, 2);
        assert_eq!(c.colors[0], 0);
        let flat = branch_coloring(&chain(&[Activation::Sin]), &b(0.0), &b(0.05), 20).unwrap();
        assert!(flat.colors.iter().all(|&c| c == 0));
    }

    #[test]
    fn json_schema() {
        let net = chain(&[Activation::LeakyRelu(0.1)]);
        let s = serde_json::to_string(&net).unwrap();
        assert!(s.contains("\"act\":{\"leaky_relu\":0.1}"));
        assert!(s.contains("\"from\":0"));
        let back: NetworkGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, net);
    }
}
