#![allow(dead_code)]

use gmak::matrix::{int, rat, Rational};
use gmak::{Complex, GeneralizedNetwork, Reaction, SubspaceBasis};
use rand::seq::SliceRandom;
use rand::Rng;

const NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

fn random_complex(rng: &mut impl Rng, n: usize, values: &[Rational]) -> Complex {
    Complex::from_terms((0..n).map(|s| (s, values[rng.random_range(0..values.len())].clone())))
        .expect("nonnegative coefficients")
}

fn distinct_complexes(rng: &mut impl Rng, n: usize, m: usize, values: &[Rational]) -> Option<Vec<Complex>> {
    let mut out: Vec<Complex> = Vec::with_capacity(m);
    for _ in 0..m {
        let mut tries = 0;
        loop {
            let c = random_complex(rng, n, values);
            if !out.contains(&c) {
                out.push(c);
                break;
            }
            tries += 1;
            if tries > 50 {
                return None;
            }
        }
    }
    Some(out)
}

pub fn random_rate(rng: &mut impl Rng) -> Rational {
    rat(rng.random_range(1..=9), rng.random_range(1..=4))
}

/// A random valid network with at most 6 species and 8 complexes. Kinetic
/// complexes take values in {0, 1/2, 1, 3/2, 2}; about a third of the
/// networks are classical. With `weakly_reversible` every linkage class is
/// built around a directed cycle.
pub fn random_network(rng: &mut impl Rng, weakly_reversible: bool) -> GeneralizedNetwork {
    let stoich = [int(0), int(1), int(2)];
    let orders = [int(0), rat(1, 2), int(1), rat(3, 2), int(2)];
    loop {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(2..=8);
        let Some(complexes) = distinct_complexes(rng, n, m, &stoich) else {
            continue;
        };
        let kinetic = if rng.random_bool(1.0 / 3.0) {
            complexes.clone()
        } else {
            match distinct_complexes(rng, n, m, &orders) {
                Some(k) => k,
                None => continue,
            }
        };
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let push = |e: (usize, usize), edges: &mut Vec<(usize, usize)>| {
            if e.0 != e.1 && !edges.contains(&e) {
                edges.push(e);
            }
        };
        if weakly_reversible {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(rng);
            let mut groups: Vec<Vec<usize>> = Vec::new();
            let mut i = 0;
            while i < m {
                let remaining = m - i;
                let size = if remaining <= 3 { remaining } else { rng.random_range(2..=(remaining - 2).min(4)) };
                groups.push(order[i..i + size].to_vec());
                i += size;
            }
            for g in &groups {
                for k in 0..g.len() {
                    push((g[k], g[(k + 1) % g.len()]), &mut edges);
                }
                for _ in 0..rng.random_range(0..=2) {
                    let a = g[rng.random_range(0..g.len())];
                    let b = g[rng.random_range(0..g.len())];
                    push((a, b), &mut edges);
                }
            }
        } else {
            for a in 0..m {
                let mut b = rng.random_range(0..m - 1);
                if b >= a {
                    b += 1;
                }
                let e = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
                push(e, &mut edges);
            }
            for _ in 0..rng.random_range(0..=3) {
                let a = rng.random_range(0..m);
                let b = rng.random_range(0..m);
                push((a, b), &mut edges);
            }
        }
        let reactions = edges
            .into_iter()
            .map(|(source, target)| Reaction {
                source,
                target,
                rate: Some(random_rate(rng)),
            })
            .collect();
        let names = NAMES[..n].iter().map(|s| s.to_string()).collect();
        if let Ok(net) = GeneralizedNetwork::new(names, complexes, kinetic, reactions) {
            return net;
        }
    }
}

pub fn random_matrix_columns(rng: &mut impl Rng, n: usize, d: usize, range: i64) -> Vec<Vec<Rational>> {
    (0..d)
        .map(|_| (0..n).map(|_| int(rng.random_range(-range..=range))).collect())
        .collect()
}

/// The span of `d` random integer vectors in `Qⁿ`.
pub fn random_subspace(rng: &mut impl Rng, n: usize, d: usize) -> SubspaceBasis {
    SubspaceBasis::span(&random_matrix_columns(rng, n, d, 2), n)
}

pub fn rates_of(net: &GeneralizedNetwork) -> Vec<Rational> {
    net.rates().expect("generated networks carry rates")
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
