//! Independent oracles and literal reference data shared by the test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use svetlichny::{catalog, CommGraph, DeterministicStrategy};

/// Signs of the sixteen `A_1^{x_1}A_2^{x_2}A_3^{x_3}A_4^{x_4}` terms of the
/// four-party polynomial, all of magnitude 1/4, as written out term by term:
/// outer key `(x1, x2)`, inner order `(x3, x4) = 00, 01, 10, 11`.
pub const S4_SIGNS: [((u32, u32), [i8; 4]); 4] = [
    ((0, 0), [-1, 1, 1, 1]),
    ((1, 0), [1, 1, 1, -1]),
    ((0, 1), [1, 1, 1, -1]),
    ((1, 1), [1, -1, -1, -1]),
];

/// Sign of the four-party coefficient at input word `x` (party 1 in bit 0).
pub fn s4_sign(x: u32) -> i8 {
    let (x1, x2, x3, x4) = (x & 1, x >> 1 & 1, x >> 2 & 1, x >> 3 & 1);
    let row = S4_SIGNS.iter().find(|(k, _)| *k == (x1, x2)).unwrap();
    row.1[(x3 << 1 | x4) as usize]
}

/// The explicit four-party strategy reaching 4, as monomial masks per party:
/// `a1 = x1x3 + x1`, `a2 = x1x2 + x2`, `a3 = x2x3 + x3x4 + x3`,
/// `a4 = x1x4 + x2x4 + x4 + 1`.
pub fn explicit_monomials() -> Vec<Vec<u32>> {
    vec![
        vec![0b0101, 0b0001],
        vec![0b0011, 0b0010],
        vec![0b0110, 0b1100, 0b0100],
        vec![0b1001, 0b1010, 0b1000, 0],
    ]
}

pub fn explicit_strategy() -> DeterministicStrategy {
    let g = catalog("fig1_ivb", None, None).unwrap();
    DeterministicStrategy::from_monomials(&g, &explicit_monomials()).unwrap()
}

/// Outputs of the explicit strategy computed straight from the formulas.
pub fn explicit_outputs(x: u32) -> [u32; 4] {
    let b = |i: u32| x >> (i - 1) & 1;
    [
        (b(1) & b(3)) ^ b(1),
        (b(1) & b(2)) ^ b(2),
        (b(2) & b(3)) ^ (b(3) & b(4)) ^ b(3),
        (b(1) & b(4)) ^ (b(2) & b(4)) ^ b(4) ^ 1,
    ]
}

/// Polynomial in the commuting symbols `A_i^0, A_i^1`, keyed by the input
/// word selecting one symbol per party.
pub type Poly = BTreeMap<u32, f64>;

/// Mermin polynomial coefficients by operator algebra:
/// `M_n = ½[M_{n-1}(A_n^0 + A_n^1) + M'_{n-1}(A_n^0 - A_n^1)]`, where `M'`
/// swaps `A^0 ↔ A^1` for every party, starting from
/// `M_2 = ½(A_1^0A_2^0 + A_1^1A_2^0 + A_1^0A_2^1 - A_1^1A_2^1)`.
pub fn mermin_poly(m: usize) -> Poly {
    let mut p: Poly = [(0b00, 0.5), (0b01, 0.5), (0b10, 0.5), (0b11, -0.5)].into_iter().collect();
    for n in 3..=m {
        let prev_mask = (1u32 << (n - 1)) - 1;
        let mut next = Poly::new();
        for (&word, &c) in &p {
            let swapped = !word & prev_mask;
            let hi = 1u32 << (n - 1);
            *next.entry(word).or_default() += 0.5 * c;
            *next.entry(word | hi).or_default() += 0.5 * c;
            *next.entry(swapped).or_default() += 0.5 * c;
            *next.entry(swapped | hi).or_default() -= 0.5 * c;
        }
        p = next;
    }
    p
}

/// Svetlichny coefficients: `M_m` for even `m`, `½(M_m + M'_m)` for odd.
pub fn svetlichny_poly(m: usize) -> Vec<f64> {
    let p = mermin_poly(m);
    let mask = (1u32 << m) - 1;
    (0..1u32 << m)
        .map(|x| {
            let f = p.get(&x).copied().unwrap_or(0.0);
            if m.is_multiple_of(2) {
                f
            } else {
                0.5 * (f + p.get(&(!x & mask)).copied().unwrap_or(0.0))
            }
        })
        .collect()
}

/// `Dep(i)` masks straight from an edge list.
pub fn deps_from_edges(m: usize, edges: &[(usize, usize)]) -> Vec<u32> {
    (1..=m)
        .map(|i| {
            edges
                .iter()
                .filter(|&&(_, j)| j == i)
                .fold(1u32 << (i - 1), |acc, &(k, _)| acc | 1 << (k - 1))
        })
        .collect()
}

/// Partially paired iff some pair of inputs is seen together by nobody.
pub fn oracle_is_pp(deps: &[u32]) -> bool {
    let m = deps.len();
    (0..m).any(|i| (i + 1..m).any(|j| !deps.iter().any(|&d| d >> i & 1 == 1 && d >> j & 1 == 1)))
}

/// Disconnected undirected support, by union-find.
pub fn oracle_separable(m: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i - 1), find(&mut parent, j - 1));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..m).any(|i| find(&mut parent, i) != root)
}

/// Literal maximum over every assignment of truth tables, each table
/// indexed by the ascending bits of `x` inside `Dep(i)`. Coefficients are
/// `weights[x] / 2^shift`; returns the maximizing numerator.
pub fn literal_max(deps: &[u32], weights: &[i64]) -> i64 {
    let m = deps.len();
    let local = |x: u32, d: u32| -> u32 {
        let mut out = 0;
        let mut k = 0;
        for b in 0..m {
            if d >> b & 1 == 1 {
                out |= (x >> b & 1) << k;
                k += 1;
            }
        }
        out
    };
    let widths: Vec<u32> = deps.iter().map(|d| 1u32 << d.count_ones()).collect();
    let total_bits: u32 = widths.iter().sum();
    assert!(total_bits <= 24, "literal enumeration too large");
    let mut best = i64::MIN;
    for code in 0..1u64 << total_bits {
        let mut shift = 0;
        let mut value = 0i64;
        let tables: Vec<u64> = widths
            .iter()
            .map(|&w| {
                let t = code >> shift & ((1u64 << w) - 1);
                shift += w;
                t
            })
            .collect();
        for x in 0..1u32 << m {
            let parity = (0..m).map(|i| (tables[i] >> local(x, deps[i]) & 1) as u32).sum::<u32>() & 1;
            value += if parity == 1 { -weights[x as usize] } else { weights[x as usize] };
        }
        best = best.max(value);
    }
    best
}

/// Uniformly random truth tables on the graph.
pub fn random_strategy(g: &CommGraph, rng: &mut impl Rng) -> DeterministicStrategy {
    let m = g.m();
    let salt: Vec<u64> = (0..m).map(|_| rng.random()).collect();
    DeterministicStrategy::from_fn(g, |i, x| {
        let h = (x as u64 ^ salt[i - 1]).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt[i - 1].rotate_left(17);
        (h.wrapping_mul(0xbf58_476d_1ce4_e5b9) >> 63) as u8
    })
}

/// Random directed graph on `m` parties with each ordered pair present with
/// probability `p`.
pub fn random_graph(m: usize, p: f64, rng: &mut impl Rng) -> CommGraph {
    let edges: Vec<(usize, usize)> = (1..=m)
        .flat_map(|i| (1..=m).filter(move |&j| j != i).map(move |j| (i, j)))
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    CommGraph::from_edges(m, &edges).unwrap()
}
