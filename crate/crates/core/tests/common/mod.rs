//! Independent oracles for the integration tests: small-integer arithmetic
//! written without the library's lattice code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;
use torus_sponge::{IntMatrix, IntVector};

pub fn big(v: &BigInt) -> i128 {
    i128::try_from(v).expect("small integer")
}

pub fn vec_i128(v: &IntVector) -> Vec<i128> {
    v.entries().iter().map(big).collect()
}

pub fn matrix_i128(m: &IntMatrix) -> Vec<Vec<i128>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| big(m.get(i, j))).collect()).collect()
}

pub fn to_matrix(rows: &[Vec<i128>]) -> IntMatrix {
    let cols = rows.first().map_or(0, Vec::len);
    let data = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
    IntMatrix::new(rows.len(), cols, data).unwrap()
}

pub fn to_vector(v: &[i128]) -> IntVector {
    IntVector::new(v.iter().map(|&x| BigInt::from(x)).collect())
}

/// Determinant by Laplace expansion along the first row.
pub fn laplace_det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut total = 0;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] * laplace_det(&minor);
    }
    total
}

/// `c̃_i = (-1)^i det(α_1, ..., α̂_i, ..., α_n)` with one-based `i`.
pub fn cramer_oracle(weights: &[Vec<i128>]) -> Vec<i128> {
    (0..weights.len())
        .map(|i| {
            let rest: Vec<Vec<i128>> =
                weights.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, w)| w.clone()).collect();
            let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
            sign * laplace_det(&rest)
        })
        .collect()
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rank over the rationals by fraction-free elimination.
pub fn rational_rank(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r == rank || m[r][c] == 0 {
                continue;
            }
            let (a, b) = (m[rank][c], m[r][c]);
            let row: Vec<i128> = (0..cols).map(|k| a * m[r][k] - b * m[rank][k]).collect();
            let g = row.iter().fold(0, |g, &x| gcd(g, x)).max(1);
            m[r] = row.into_iter().map(|x| x / g).collect();
        }
        rank += 1;
    }
    rank
}

/// Betti numbers over the rationals of the simplicial complex generated by
/// `facets` (vertex lists), with boundaries taken in sorted vertex order.
pub fn simplicial_betti(facets: &[Vec<usize>]) -> Vec<usize> {
    let mut by_dim: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for f in facets {
        let mut f = f.clone();
        f.sort_unstable();
        for mask in 1u32..(1 << f.len()) {
            let s: Vec<usize> = (0..f.len()).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect();
            by_dim.entry(s.len() - 1).or_default().push(s);
        }
    }
    for v in by_dim.values_mut() {
        v.sort();
        v.dedup();
    }
    let top = *by_dim.keys().last().unwrap();
    let boundary_rank = |d: usize| -> usize {
        // rank of ∂_d : C_d -> C_{d-1}
        if d == 0 || d > top {
            return 0;
        }
        let lower = &by_dim[&(d - 1)];
        let rows: Vec<Vec<i128>> = by_dim[&d]
            .iter()
            .map(|s| {
                let mut row = vec![0; lower.len()];
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    let k = lower.binary_search(&face).unwrap();
                    row[k] = if i % 2 == 0 { 1 } else { -1 };
                }
                row
            })
            .collect();
        rational_rank(&rows)
    };
    (0..=top).map(|d| by_dim[&d].len() - boundary_rank(d) - boundary_rank(d + 1)).collect()
}

/// `#{y ∈ (Z/k)^m : yᵀA ≡ 0 mod k}` for an `m x n` matrix, by enumeration.
pub fn hom_count(a: &[Vec<i128>], k: i128) -> u64 {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut count = 0;
    let mut y = vec![0i128; m];
    loop {
        if (0..n).all(|j| (0..m).map(|i| y[i] * a[i][j]).sum::<i128>().rem_euclid(k) == 0) {
            count += 1;
        }
        let mut i = 0;
        while i < m {
            y[i] += 1;
            if y[i] < k {
                break;
            }
            y[i] = 0;
            i += 1;
        }
        if i == m {
            return count;
        }
    }
}

/// Random unimodular matrix as a product of elementary operations.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> Vec<Vec<i128>> {
    let mut m: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 if n > 1 => {
                let j = (i + rng.gen_range(1..n)) % n;
                let k = rng.gen_range(-2..=2);
                let row = m[j].clone();
                for (x, y) in m[i].iter_mut().zip(row) {
                    *x += k * y;
                }
            }
            1 if n > 1 => {
                let j = (i + rng.gen_range(1..n)) % n;
                m.swap(i, j);
            }
            _ => {
                for x in m[i].iter_mut() {
                    *x = -*x;
                }
            }
        }
    }
    m
}

pub fn mat_vec(m: &[Vec<i128>], v: &[i128]) -> Vec<i128> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Random weight system in general position: `n` vectors of `Z^{n-1}` with
/// entries in `[-bound, bound]` and every cofactor nonzero.
pub fn random_general_position(rng: &mut impl Rng, n: usize, bound: i128) -> Vec<Vec<i128>> {
    loop {
        let w: Vec<Vec<i128>> = (0..n).map(|_| (0..n - 1).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
        if cramer_oracle(&w).iter().all(|&c| c != 0) {
            return w;
        }
    }
}
