#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

use qap_core::apgen::{ApComponent, ApGenerator};
use qap_core::hopfield::{Activation, Delays, HopfieldSpec, IntGen};

pub fn cst(v: f64) -> ApGenerator {
    ApGenerator::constant(v)
}

pub fn scalar_example() -> HopfieldSpec {
    HopfieldSpec::constant(2.0, &[0.5], &[vec![0.2]], &[vec![vec![0.1]]], &[0.1], vec![Activation::tanh()]).unwrap()
}

/// Root of `0.5x = 0.2 tanh x + 0.1 tanh²x + 0.1` by bisection.
pub fn scalar_fixed_point() -> f64 {
    let h = |x: f64| 0.5 * x - 0.2 * x.tanh() - 0.1 * x.tanh().powi(2) - 0.1;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    assert!(h(lo) < 0.0 && h(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Three neurons whose coefficients mix frequencies `w1` and `w2`.
pub fn three_neuron(w1: f64, w2: f64, delays: Delays) -> HopfieldSpec {
    let m = 3;
    let gen = |offset: f64, terms: &[(f64, f64, f64)]| {
        ApGenerator::scalar(
            terms
                .iter()
                .fold(ApComponent::constant(offset), |c, &(a, f, p)| c.with_term(a, f, p)),
        )
    };
    let c_hat = (0..m)
        .map(|i| gen(0.6, &[(0.1, w1, 0.0), (0.05, w2, i as f64)]))
        .collect();
    let a_hat = (0..m)
        .map(|i| (0..m).map(|j| gen(0.03, &[(0.02, w2, (i + j) as f64)])).collect())
        .collect();
    let b_hat = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (0..m).map(|l| gen(0.0, &[(0.005, w1, (i * 9 + j * 3 + l) as f64)])).collect())
                .collect()
        })
        .collect();
    let i_hat = (0..m)
        .map(|i| gen(0.05, &[(0.1, w1, 0.0), (0.05, w2, i as f64)]))
        .collect();
    HopfieldSpec::new(m, 2.0, c_hat, a_hat, b_hat, i_hat, vec![Activation::tanh(); m], delays).unwrap()
}

pub fn two_frequency(delays: Delays) -> HopfieldSpec {
    three_neuron(1.0, SQRT_2, delays)
}

pub fn rational(delays: Delays) -> HopfieldSpec {
    three_neuron(2.0 * PI / 5.0, 2.0 * PI / 7.0, delays)
}

/// Constant and periodic delays; every table period divides 35.
pub fn mixed_delays(m: usize) -> Delays {
    let gamma = (0..m)
        .map(|i| (0..m).map(|j| IntGen::Const((i + j) % 3)).collect())
        .collect();
    let omega = (0..m)
        .map(|_| {
            (0..m)
                .map(|j| {
                    (0..m)
                        .map(|_| IntGen::Periodic { periodic: vec![0, 1, 2, 1, j] })
                        .collect()
                })
                .collect()
        })
        .collect();
    let v = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| (0..m).map(|l| IntGen::Periodic { periodic: vec![l, 0, 1, 2, 3, 0, 1] }).collect())
                .collect()
        })
        .collect();
    Delays { gamma, omega, v }
}
