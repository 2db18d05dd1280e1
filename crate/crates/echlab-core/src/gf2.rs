//! Sparse linear algebra over GF(2).
//!
//! Columns are sorted index lists. Addition is symmetric difference.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub type Column = Vec<usize>;

/// Sum of two sorted columns mod 2.
pub fn add(x: &[usize], y: &[usize]) -> Column {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(x.len() + y.len());
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            core::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    out
}

/// Normalizes an arbitrary multiset of indices to a column mod 2.
pub fn from_multiset(mut v: Vec<usize>) -> Column {
    v.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Standard column reduction by lowest (largest) index.
///
/// Returns the reduced columns; `pivots[r] = c` when column c has low r.
pub fn reduce(cols: &[Column]) -> (Vec<Column>, BTreeMap<usize, usize>) {
    let mut reduced: Vec<Column> = cols.to_vec();
    let mut pivots: BTreeMap<usize, usize> = BTreeMap::new();
    for c in 0..reduced.len() {
        while let Some(&low) = reduced[c].last() {
            match pivots.get(&low) {
                Some(&other) => {
                    let sum = add(&reduced[c], &reduced[other]);
                    reduced[c] = sum;
                }
                None => {
                    pivots.insert(low, c);
                    break;
                }
            }
        }
    }
    (reduced, pivots)
}

pub fn rank(cols: &[Column]) -> usize {
    reduce(cols).1.len()
}

/// Composition of two sparse maps: (g ∘ f)(e) for each basis column of f.
pub fn compose(g: &[Column], f: &[Column]) -> Vec<Column> {
    f.iter()
        .map(|col| {
            let mut acc = Vec::new();
            for &i in col {
                acc.extend_from_slice(&g[i]);
            }
            from_multiset(acc)
        })
        .collect()
}
