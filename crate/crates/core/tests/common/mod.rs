// Independent reference arithmetic for prime fields: plain u64 mod p with
// textbook Gaussian elimination. Shares nothing with the library's field or
// linear algebra code; only the parity matrix entries are read from it.

#![allow(dead_code)]

use oamds::code::CodeParams;
use oamds::field::FieldElement;

pub fn inv_mod(x: u64, p: u64) -> u64 {
    // Fermat: x^(p-2)
    let (mut base, mut exp, mut acc) = (x % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Reduces `m` to row echelon form in place and returns the pivot columns.
fn echelon(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank_mod(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    echelon(&mut m, p).len()
}

/// Solves `a x = b` for a square invertible `a`.
pub fn solve_mod(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = a.len();
    let mut aug: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let pivots = echelon(&mut aug, p);
    if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.iter().map(|row| row[n]).collect())
}

pub fn prime_of(params: &CodeParams) -> u64 {
    params.field().order()
}

/// The full `rl x nl` parity-check matrix, read entry by entry.
pub fn parity_check(params: &CodeParams) -> Vec<Vec<u64>> {
    let (r, l, n) = (params.r(), params.l(), params.n());
    let mut h = vec![vec![0u64; n * l]; r * l];
    for t in 0..r {
        for i in 1..=n {
            for a in 0..l {
                for b in 0..l {
                    h[t * l + a][(i - 1) * l + b] =
                        params.matrix_entry(t, i, a, b).unwrap().value() as u64;
                }
            }
        }
    }
    h
}

/// Columns of `h` belonging to the given 1-based nodes.
pub fn node_columns(h: &[Vec<u64>], l: usize, nodes: &[usize]) -> Vec<Vec<u64>> {
    h.iter()
        .map(|row| {
            nodes
                .iter()
                .flat_map(|&i| row[(i - 1) * l..i * l].iter().copied())
                .collect()
        })
        .collect()
}

/// Whether every `r`-subset's block matrix has full rank.
pub fn mds_verdicts(params: &CodeParams) -> Vec<(Vec<usize>, bool)> {
    let p = prime_of(params);
    let h = parity_check(params);
    let side = params.r() * params.l();
    oamds::verify::subsets(params.n(), params.r())
        .into_iter()
        .map(|subset| {
            let ok = rank_mod(node_columns(&h, params.l(), &subset), p) == side;
            (subset, ok)
        })
        .collect()
}

/// Solves for the columns of `unknown` given all other columns.
pub fn solve_columns(
    params: &CodeParams,
    columns: &[Vec<FieldElement>],
    unknown: &[usize],
) -> Vec<Vec<u32>> {
    let p = prime_of(params);
    let l = params.l();
    let h = parity_check(params);
    let known: Vec<usize> = (1..=params.n()).filter(|i| !unknown.contains(i)).collect();
    let hk = node_columns(&h, l, &known);
    let hu = node_columns(&h, l, unknown);
    let x: Vec<u64> = known
        .iter()
        .flat_map(|&i| columns[i - 1].iter().map(|v| v.value() as u64))
        .collect();
    let rhs: Vec<u64> = hk
        .iter()
        .map(|row| {
            let s = row.iter().zip(&x).fold(0, |acc, (a, b)| (acc + a * b) % p);
            (p - s) % p
        })
        .collect();
    // pick independent rows of hu greedily
    let mut chosen: Vec<usize> = Vec::new();
    for row in 0..hu.len() {
        let mut trial: Vec<Vec<u64>> = chosen.iter().map(|&i| hu[i].clone()).collect();
        trial.push(hu[row].clone());
        if rank_mod(trial, p) == chosen.len() + 1 {
            chosen.push(row);
        }
        if chosen.len() == unknown.len() * l {
            break;
        }
    }
    let a: Vec<Vec<u64>> = chosen.iter().map(|&i| hu[i].clone()).collect();
    let b: Vec<u64> = chosen.iter().map(|&i| rhs[i]).collect();
    let sol = solve_mod(&a, &b, p).expect("erasure system is solvable");
    sol.chunks(l)
        .map(|c| c.iter().map(|&v| v as u32).collect())
        .collect()
}

/// Reference systematic encoder: data columns followed by solved parity columns.
pub fn oracle_encode(params: &CodeParams, data: &[Vec<FieldElement>]) -> Vec<Vec<u32>> {
    let mut columns: Vec<Vec<FieldElement>> = data.to_vec();
    columns.resize(params.n(), vec![FieldElement::ZERO; params.l()]);
    let parity: Vec<usize> = (params.k() + 1..=params.n()).collect();
    let mut out: Vec<Vec<u32>> = data
        .iter()
        .map(|c| c.iter().map(|v| v.value()).collect())
        .collect();
    out.extend(solve_columns(params, &columns, &parity));
    out
}
