//! Test-side oracles. Nothing here calls the spectral code under test: the
//! characters, DFTs, subgroups and frame operators are recomputed by brute
//! force from their definitions.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use abelbank::{FilterBank, Group, GroupElement, Lattice, Signal};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn el(g: &Group, coords: &[i64]) -> GroupElement {
    g.element(coords.to_vec()).unwrap()
}

pub fn delta(g: &Group, coords: &[i64]) -> Signal {
    Signal::delta(g, &el(g, coords)).unwrap()
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_signal(g: &Group, rng: &mut ChaCha8Rng) -> Signal {
    let n = g.cardinality().unwrap();
    Signal::from_dense(g, (0..n).map(|_| random_complex(rng)).collect()).unwrap()
}

/// Random filter with up to `taps` nonzero samples at random positions.
pub fn random_fir(g: &Group, rng: &mut ChaCha8Rng, taps: usize) -> Signal {
    let orders = g.orders().unwrap().to_vec();
    let mut support = BTreeSet::new();
    for _ in 0..taps {
        support.insert(orders.iter().map(|&s| rng.gen_range(0..s)).collect::<Vec<_>>());
    }
    Signal::from_samples(g, support.into_iter().map(|p| (el(g, &p), random_complex(rng)))).unwrap()
}

/// `exp(2 pi i sum_j n_j xi_j / s_j)` in floating point.
pub fn character(orders: &[i64], n: &[i64], xi: &[i64]) -> Complex64 {
    let phase: f64 = orders
        .iter()
        .zip(n.iter().zip(xi))
        .map(|(&s, (&a, &b))| (a * b).rem_euclid(s) as f64 / s as f64)
        .sum();
    Complex64::cis(TAU * phase)
}

/// All elements, first coordinate fastest.
pub fn elements(orders: &[i64]) -> Vec<Vec<i64>> {
    let total: i64 = orders.iter().product();
    (0..total)
        .map(|mut i| {
            orders
                .iter()
                .map(|&s| {
                    let v = i % s;
                    i /= s;
                    v
                })
                .collect()
        })
        .collect()
}

pub fn dft(x: &Signal) -> Vec<Complex64> {
    let orders = x.group().orders().unwrap().to_vec();
    let pts = elements(&orders);
    let vals: Vec<Complex64> = pts.iter().map(|p| x.get(&el(x.group(), p))).collect();
    pts.iter()
        .map(|xi| {
            pts.iter()
                .zip(&vals)
                .map(|(n, v)| v * character(&orders, n, xi).conj())
                .sum()
        })
        .collect()
}

/// Closure of the generators under addition.
pub fn subgroup(orders: &[i64], gens: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    let mut set = BTreeSet::from([vec![0; orders.len()]]);
    let mut frontier = vec![vec![0; orders.len()]];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q: Vec<i64> = p.iter().zip(g).zip(orders).map(|((a, b), s)| (a + b).rem_euclid(*s)).collect();
            if set.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    set
}

/// Characters trivial on the subgroup.
pub fn annihilator(orders: &[i64], members: &BTreeSet<Vec<i64>>) -> Vec<Vec<i64>> {
    elements(orders)
        .into_iter()
        .filter(|xi| members.iter().all(|m| (character(orders, m, xi) - c(1.0)).norm() < 1e-9))
        .collect()
}

pub fn add(orders: &[i64], a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).zip(orders).map(|((x, y), s)| (x + y).rem_euclid(*s)).collect()
}

/// Dense vector of a signal in colexicographic order.
pub fn dense(x: &Signal) -> Vec<Complex64> {
    let orders = x.group().orders().unwrap().to_vec();
    elements(&orders).iter().map(|p| x.get(&el(x.group(), p))).collect()
}

fn index_of(orders: &[i64], p: &[i64]) -> usize {
    let mut idx = 0i64;
    let mut stride = 1i64;
    for (v, s) in p.iter().zip(orders) {
        idx += v * stride;
        stride *= s;
    }
    idx as usize
}

/// Matrix whose columns are the translates `T_m f` of each signal over `members`.
pub fn translates(signals: &[Signal], members: &BTreeSet<Vec<i64>>) -> DMatrix<Complex64> {
    let g = signals[0].group();
    let orders = g.orders().unwrap().to_vec();
    let n = g.cardinality().unwrap();
    let mut cols = Vec::new();
    for f in signals {
        let base = dense(f);
        for m in members {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for (i, p) in elements(&orders).iter().enumerate() {
                col[index_of(&orders, &add(&orders, p, m))] = base[i];
            }
            cols.push(nalgebra::DVector::from_vec(col));
        }
    }
    DMatrix::from_columns(&cols)
}

/// `S = sum_k sum_m (T_m f_k)(T_m f_k)*` with `f_k = involution(h_k)`.
pub fn frame_operator(bank: &FilterBank, members: &BTreeSet<Vec<i64>>) -> DMatrix<Complex64> {
    let f: Vec<Signal> = bank.analysis().iter().map(involution).collect();
    let t = translates(&f, members);
    &t * t.adjoint()
}

pub fn involution(x: &Signal) -> Signal {
    let g = x.group();
    let orders = g.orders().unwrap().to_vec();
    let pts = elements(&orders);
    Signal::from_samples(
        g,
        pts.iter().map(|p| {
            let neg: Vec<i64> = p.iter().zip(&orders).map(|(v, s)| (-v).rem_euclid(*s)).collect();
            (el(g, p), x.get(&el(g, &neg)).conj())
        }),
    )
    .unwrap()
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn extremes(m: DMatrix<Complex64>) -> (f64, f64) {
    let e = m.symmetric_eigen().eigenvalues;
    e.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
}

pub fn lattice(g: &Group, gens: &[Vec<i64>]) -> Lattice {
    let gens: Vec<GroupElement> = gens.iter().map(|p| el(g, p)).collect();
    Lattice::from_generators(g, &gens).unwrap()
}

pub fn lazy_z4() -> FilterBank {
    let g = Group::cyclic(4).unwrap();
    FilterBank::new(
        lattice(&g, &[vec![2]]),
        vec![delta(&g, &[0]), delta(&g, &[3])],
        Some(vec![delta(&g, &[0]), delta(&g, &[1])]),
    )
    .unwrap()
}

pub fn haar_taps(g: &Group, minus_one: &[i64]) -> Vec<Signal> {
    let r = c(0.5f64.sqrt());
    let zero = vec![0; g.rank()];
    let (a, b) = (delta(g, &zero), delta(g, minus_one));
    vec![a.add(&b).unwrap().scale(r), a.sub(&b).unwrap().scale(r)]
}

pub fn haar_z4() -> FilterBank {
    let g = Group::cyclic(4).unwrap();
    let h = haar_taps(&g, &[3]);
    let s = h.iter().map(involution).collect();
    FilterBank::new(lattice(&g, &[vec![2]]), h, Some(s)).unwrap()
}

pub fn three_channel_z4() -> FilterBank {
    let g = Group::cyclic(4).unwrap();
    let h3 = delta(&g, &[0]).add(&delta(&g, &[3])).unwrap().scale(c(0.5f64.sqrt()));
    FilterBank::new(lattice(&g, &[vec![2]]), vec![delta(&g, &[0]), delta(&g, &[3]), h3], None).unwrap()
}

/// A random group with `|G| <= 512`, a random subgroup of index at most 16,
/// and its generators.
pub fn random_setting(rng: &mut ChaCha8Rng) -> (Group, Vec<Vec<i64>>) {
    loop {
        let rank = rng.gen_range(1..=2);
        let orders: Vec<i64> = if rank == 1 {
            vec![rng.gen_range(2..=64)]
        } else {
            vec![rng.gen_range(2..=16), rng.gen_range(2..=16)]
        };
        let n: i64 = orders.iter().product();
        let ngens = rng.gen_range(1..=2);
        let gens: Vec<Vec<i64>> = (0..ngens)
            .map(|_| orders.iter().map(|&s| rng.gen_range(0..s)).collect())
            .collect();
        let l = n as usize / subgroup(&orders, &gens).len();
        if n <= 512 && (1..=16).contains(&l) {
            return (Group::finite(orders).unwrap(), gens);
        }
    }
}

pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    num / den
}
