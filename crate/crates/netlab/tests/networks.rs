use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xprlab_bignum::BigReal;
use xprlab_netlab::*;

const B: u32 = 128;

fn b(x: f64) -> BigReal {
    BigReal::from_f64(x, B)
}

/// Straight-line transcription of the universal graph in f64.
fn fig1_f64(w: &[f64], x: f64) -> f64 {
    let mut a2 = [0.0; 4];
    for j in 0..4 {
        let p = &w[16 * j..];
        a2[j] = (p[2] * (p[0] * x + p[1]).sin() + p[3]).asin();
    }
    let mut y = w[68];
    for j in 0..4 {
        let p = &w[16 * j..];
        let a3 = (p[4] * a2[j] + p[5]).sin();
        let a4 = (p[6] * a3 + p[7]).asin();
        let a5 = p[8] * a4 + p[9] * a2[j] + p[10];
        let b1 = (p[11] * x + p[12] * a2[(j + 3) % 4] + p[13]).sin();
        let b2 = (p[14] * b1 + p[15]).sin();
        y += w[64 + j] * a5 * b2;
    }
    y
}

#[test]
fn universal_graph_matches_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let w: Vec<f64> = (0..FIG1_PARAMS).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let net = build_universal_sin_arcsin(&w.iter().map(|&v| b(v)).collect::<Vec<_>>()).unwrap();
        let x = rng.gen_range(0.0..1.0);
        let y = eval_network(&net, &b(x)).unwrap().0.to_f64();
        assert!((y - fig1_f64(&w, x)).abs() < 1e-12);
    }
    let net = build_universal_sin_arcsin(&vec![b(0.2); FIG1_PARAMS]).unwrap();
    assert!(matches!(validate_single_transcendental(&net).unwrap(), LayerCheck::Violation { .. }));
}

const ACTS: [Activation; 11] = [
    Activation::Identity,
    Activation::Step,
    Activation::Relu,
    Activation::LeakyRelu(0.2),
    Activation::SqRelu,
    Activation::Sin,
    Activation::Tanh,
    Activation::Sigmoid,
    Activation::Elu(0.7),
    Activation::Swish,
    Activation::Gaussian,
];

fn act_f64(a: Activation, z: f64) -> f64 {
    match a {
        Activation::Identity => z,
        Activation::Step => f64::from(u8::from(z >= 0.0)),
        Activation::Relu => z.max(0.0),
        Activation::LeakyRelu(s) => if z < 0.0 { s * z } else { z },
        Activation::SqRelu => z.max(0.0).powi(2),
        Activation::Sin => z.sin(),
        Activation::Tanh => z.tanh(),
        Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        Activation::Elu(s) => if z < 0.0 { s * (z.exp() - 1.0) } else { z },
        Activation::Swish => z / (1.0 + (-z).exp()),
        Activation::Gaussian => (-z * z).exp(),
        _ => unreachable!(),
    }
}

fn naive(net: &NetworkGraph, id: usize, x: f64) -> f64 {
    let n = net.nodes.iter().find(|n| n.id == id).unwrap();
    if id == net.input {
        return x;
    }
    if n.act == Activation::Multiply {
        return n.inputs.iter().map(|e| e.w.to_f64() * naive(net, e.from, x)).product::<f64>() + n.bias.to_f64();
    }
    let z = n.inputs.iter().map(|e| e.w.to_f64() * naive(net, e.from, x)).sum::<f64>() + n.bias.to_f64();
    act_f64(n.act, z)
}

fn random_dag(rng: &mut impl Rng) -> NetworkGraph {
    let size = rng.gen_range(3..=12);
    // ids shuffled so evaluation order cannot rely on them
    let mut ids: Vec<usize> = (0..size).map(|i| i * 7 + 3).collect();
    for i in (1..size).rev() {
        ids.swap(i, rng.gen_range(0..=i));
    }
    let mut nodes = vec![Node { id: ids[0], act: Activation::Identity, inputs: vec![], bias: b(0.0) }];
    for k in 1..size {
        let act = if k == size - 1 {
            Activation::Identity
        } else if rng.gen_bool(0.1) {
            Activation::Multiply
        } else {
            ACTS[rng.gen_range(0..ACTS.len())]
        };
        let fan = if act == Activation::Multiply { 2 } else { rng.gen_range(1..=k.min(3)) };
        let inputs = (0..fan).map(|_| Edge { from: ids[rng.gen_range(0..k)], w: b(rng.gen_range(-1.5..1.5)) }).collect();
        nodes.push(Node { id: ids[k], act, inputs, bias: b(rng.gen_range(-1.0..1.0)) });
    }
    nodes.reverse();
    NetworkGraph { nodes, input: ids[0], output: ids[size - 1] }
}

#[test]
fn evaluator_agrees_with_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let net = random_dag(&mut rng);
        let x = rng.gen_range(0.0..1.0);
        let (y, _) = eval_network(&net, &b(x)).unwrap();
        let want = naive(&net, net.output, x);
        assert!((y.to_f64() - want).abs() <= 1e-9 * (1.0 + want.abs()), "{y:?} vs {want}");
        assert_eq!(eval_network(&net, &b(x)).unwrap().0, y);
    }
}

#[test]
fn product_error_quarters() {
    let worst = |eps: f64| {
        let mut m: f64 = 0.0;
        for i in 0..20 {
            for j in 0..20 {
                let (z1, z2) = (-1.0 + 2.0 * i as f64 / 19.0, -1.0 + 2.0 * j as f64 / 19.0);
                let r = mult_via_sines(&b(z1), &b(z2), &b(eps)).unwrap();
                let err = (r.value - b(z1) * b(z2)).abs();
                assert!(err <= r.bound);
                m = m.max(err.to_f64());
            }
        }
        m
    };
    let ratio = worst(5e-3) / worst(1e-2);
    assert!((0.15..=0.35).contains(&ratio), "{ratio}");
}

#[test]
fn branched_networks_certify() {
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let bn = random_branched_network(&mut rng, 256);
        assert!(bn.net.hidden_count() <= 6);
        let a = rng.gen_range(0.0..0.4);
        let hi = rng.gen_range(a + 0.2..1.0);
        let c = branched_certificate(&bn, &BigReal::from_f64(a, 256), &BigReal::from_f64(hi, 256), None).unwrap();
        assert!(c.pass, "network {i}: {c:?}");
        let colors = c.metadata["colors"].as_array().unwrap();
        assert!(colors.iter().all(|c| c.as_u64().unwrap() < 4));
    }
}

#[test]
fn colors_are_constant_between_kinks() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let bn = random_branched_network(&mut rng, B);
        let coarse = branch_coloring(&bn.net, &b(0.0), &b(0.05), 20).unwrap();
        let fine = branch_coloring(&bn.net, &b(0.0), &b(0.005), 200).unwrap();
        let edges = |c: &[usize], h: f64| c.windows(2).enumerate().filter(|(_, w)| w[0] != w[1]).map(|(k, _)| k as f64 * h).collect::<Vec<_>>();
        let (ce, fe) = (edges(&coarse.colors, 0.05), edges(&fine.colors, 0.005));
        assert_eq!(ce.len(), fe.len());
        for (x, y) in ce.iter().zip(&fe) {
            assert!((x - y).abs() < 0.05);
        }
    }
}
