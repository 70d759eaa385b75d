// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Dense maximum-weight bipartite matching with an optimal dual.
//!
//! Rows may stay unmatched. Internally every row `i` gets a private zero-cost
//! "unmatched" column, which turns the problem into a rectangular assignment
//! solved by shortest augmenting paths with potentials (Hungarian method).
//! The returned dual `(row_dual, col_dual)` is nonnegative, satisfies
//! `row_dual[i] + col_dual[j] >= w(i, j)`, and sums to the matching value.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct MatchingSolution {
    pub value: f64,
    pub row_match: Vec<Option<usize>>,
    pub row_dual: Vec<f64>,
    pub col_dual: Vec<f64>,
}

impl MatchingSolution {
    /// `a_i + b_j - w(i, j)`: how much forcing `(i, j)` can cost at most
    /// relative to the dual bound.
    pub fn reduced_cost(&self, i: usize, j: usize, w: f64) -> f64 {
        self.row_dual[i] + self.col_dual[j] - w
    }

    pub fn dual_value(&self) -> f64 {
        self.row_dual.iter().sum::<f64>() + self.col_dual.iter().sum::<f64>()
    }
}

/// Maximum-weight matching on a row-major `rows × cols` weight matrix.
/// Weights may be negative; such edges are simply never worth taking.
pub fn max_weight_matching(rows: usize, cols: usize, weights: &[f64]) -> MatchingSolution {
    assert_eq!(weights.len(), rows * cols);
    let total = cols + rows;
    // 1-based, column 0 is the virtual root
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; total + 1];
    let mut p = vec![0usize; total + 1];
    let mut way = vec![0usize; total + 1];
    let mut minv = vec![f64::INFINITY; total + 1];
    let mut used = vec![false; total + 1];
    // dummies of rows already scanned in the current search; the others
    // have an infinite slack and need no bookkeeping
    let mut scanned_dummies: Vec<usize> = Vec::with_capacity(rows);

    for i in 1..=rows {
        p[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        scanned_dummies.clear();
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let dummy = cols + i0;
            scanned_dummies.push(dummy);
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let row = &weights[(i0 - 1) * cols..i0 * cols];
            let ui0 = u[i0];
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = -row[j - 1] - ui0 - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if !used[dummy] {
                let cur = -ui0 - v[dummy];
                if cur < minv[dummy] {
                    minv[dummy] = cur;
                    way[dummy] = j0;
                }
            }
            for &d in &scanned_dummies {
                if !used[d] && minv[d] < delta {
                    delta = minv[d];
                    j1 = d;
                }
            }
            debug_assert!(delta.is_finite());
            for j in 0..=cols {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            for &d in &scanned_dummies {
                if used[d] {
                    u[p[d]] += delta;
                    v[d] -= delta;
                } else {
                    minv[d] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_match = vec![None; rows];
    let mut value = 0.0;
    for j in 1..=cols {
        if p[j] != 0 {
            row_match[p[j] - 1] = Some(j - 1);
        }
    }
    for (i, m) in row_match.iter().enumerate() {
        if let Some(j) = *m {
            value += weights[i * cols + j];
        }
    }
    let col_dual: Vec<f64> = (1..=cols).map(|j| (-v[j]).max(0.0)).collect();
    let row_dual: Vec<f64> = (1..=rows)
        .map(|i| (-u[i] - v[cols + i]).max(0.0))
        .collect();
    MatchingSolution {
        value,
        row_match,
        row_dual,
        col_dual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(rows: usize, cols: usize, w: &[f64]) -> f64 {
        fn go(i: usize, rows: usize, cols: usize, w: &[f64], taken: &mut [bool]) -> f64 {
            if i == rows {
                return 0.0;
            }
            let mut best = go(i + 1, rows, cols, w, taken);
            for j in 0..cols {
                if !taken[j] {
                    taken[j] = true;
                    best = best.max(w[i * cols + j] + go(i + 1, rows, cols, w, taken));
                    taken[j] = false;
                }
            }
            best
        }
        go(0, rows, cols, w, &mut vec![false; cols])
    }

    fn lcg(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *seed >> 33
    }

    #[test]
    fn matches_brute_force_and_dual_is_certificate() {
        let mut seed = 17u64;
        for _ in 0..300 {
            let rows = (lcg(&mut seed) % 6) as usize;
            let cols = (lcg(&mut seed) % 6) as usize;
            let w: Vec<f64> = (0..rows * cols)
                .map(|_| (lcg(&mut seed) % 15) as f64 - 4.0)
                .collect();
            let sol = max_weight_matching(rows, cols, &w);
            assert_eq!(sol.value, brute(rows, cols, &w), "{rows}x{cols} {w:?}");
            assert!((sol.dual_value() - sol.value).abs() < 1e-9);
            for i in 0..rows {
                for j in 0..cols {
                    assert!(sol.reduced_cost(i, j, w[i * cols + j]) > -1e-9);
                }
            }
            let mut seen = vec![false; cols];
            for j in sol.row_match.iter().flatten() {
                assert!(!seen[*j]);
                seen[*j] = true;
            }
        }
    }

    #[test]
    fn empty_shapes() {
        assert_eq!(max_weight_matching(0, 3, &[]).value, 0.0);
        let sol = max_weight_matching(2, 0, &[]);
        assert_eq!(sol.row_match, vec![None, None]);
    }
}
