//! Exact counts of merge and split deviations and the iteration bound of the
//! formation algorithm. All counts are arbitrary-precision integers.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for t in 0..k {
        acc *= n - t;
        acc /= t + 1;
    }
    acc
}

/// All `r`-subsets of `0..m` in lexicographic order. Empty when `r > m`.
pub fn lex_combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        // Rightmost position that can still advance.
        let Some(p) = (0..r).rev().find(|&p| idx[p] < m - r + p) else {
            return out;
        };
        idx[p] += 1;
        for t in p + 1..r {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Number of ways to merge between 2 and `q` of `m` coalitions:
/// `sum_{j=2}^{min(q,m)} C(m, j)`.
pub fn merge_count(m: usize, q: usize) -> BigUint {
    (2..=q.min(m)).map(|j| binomial(m, j)).sum()
}

/// Stirling numbers of the second kind `S(n, k)`, via
/// `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    if k == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    // row[j] holds S(i, j) for the current i.
    let mut row = vec![BigUint::zero(); k + 1];
    row[0] = BigUint::one();
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            let prev = std::mem::take(&mut row[j]);
            row[j] = prev * j + &row[j - 1];
        }
        row[0] = BigUint::zero();
    }
    row[k].clone()
}

/// Bell number `B(n)`, the number of partitions of an `n`-set.
pub fn bell(n: usize) -> BigUint {
    (0..=n).map(|k| stirling2(n, k)).sum()
}

/// Number of ways to split an `n`-set into between 2 and `q` blocks.
pub fn split_count(n: usize, q: usize) -> BigUint {
    (2..=q.min(n)).map(|k| stirling2(n, k)).sum()
}

/// Worst-case iteration count of the formation scan,
/// `W(K, q) = sum_{i=0}^{K-2} D(K - i, q)`.
pub fn worst_case_iters(k: usize, q: usize) -> BigUint {
    if k < 2 {
        return BigUint::zero();
    }
    (2..=k).map(|m| merge_count(m, q)).sum()
}

/// Convenience for bounds checks on small problems.
pub fn worst_case_iters_u64(k: usize, q: usize) -> Option<u64> {
    u64::try_from(worst_case_iters(k, q)).ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub k: usize,
    pub q: usize,
    #[serde(serialize_with = "big_as_string")]
    pub merges: BigUint,
    #[serde(serialize_with = "big_as_string")]
    pub splits: BigUint,
    #[serde(serialize_with = "big_as_string")]
    pub worst_case_iters: BigUint,
}

fn big_as_string<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Rows of `(K, q, D, T, W)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
}

impl CountTable {
    /// One row per `K` in `ks` and `q` in `qs`. Values of `q` above `K` are
    /// kept; the counts saturate there.
    pub fn build(ks: impl IntoIterator<Item = usize>, qs: &[usize]) -> Self {
        let mut rows = Vec::new();
        for k in ks {
            for &q in qs {
                rows.push(CountRow {
                    k,
                    q,
                    merges: merge_count(k, q),
                    splits: split_count(k, q),
                    worst_case_iters: worst_case_iters(k, q),
                });
            }
        }
        CountTable { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("K,q,D,T,W\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.k, r.q, r.merges, r.splits, r.worst_case_iters);
        }
        out
    }
}
