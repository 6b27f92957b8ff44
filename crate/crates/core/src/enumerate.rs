//! Exhaustive enumeration of small patterns up to row and column
//! permutation.

use std::collections::BTreeSet;

use crate::pattern::Pattern;

/// Default seed for randomized checks, overridable through `QUASIMLE_SEED`.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Reads `QUASIMLE_SEED` (decimal or `0x` hexadecimal), falling back to
/// [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("QUASIMLE_SEED")
        .ok()
        .and_then(|v| parse_seed(&v))
        .unwrap_or(DEFAULT_SEED)
}

fn parse_seed(text: &str) -> Option<u64> {
    let text = text.trim();
    match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => text.parse().ok(),
    }
}

/// Row-major bits of an `m × n` 0/1 matrix, bit `(i-1)*n + (j-1)`.
fn column_codes(m: usize, n: usize, bits: u32, row_perm: &[usize]) -> Vec<u32> {
    let mut codes: Vec<u32> = (0..n)
        .map(|j| {
            (0..m)
                .filter(|&i| bits >> (i * n + j) & 1 == 1)
                .map(|i| 1u32 << row_perm[i])
                .sum()
        })
        .collect();
    codes.sort_unstable();
    codes
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// The smallest sorted list of column codes over all row orders; two
/// matrices get the same key exactly when they differ by row and column
/// permutations.
fn canonical_key(m: usize, n: usize, bits: u32, perms: &[Vec<usize>]) -> Vec<u32> {
    perms
        .iter()
        .map(|p| column_codes(m, n, bits, p))
        .min()
        .expect("at least one permutation")
}

fn has_no_empty_line(m: usize, n: usize, bits: u32) -> bool {
    let row_ok = (0..m).all(|i| (0..n).any(|j| bits >> (i * n + j) & 1 == 1));
    let col_ok = (0..n).all(|j| (0..m).any(|i| bits >> (i * n + j) & 1 == 1));
    row_ok && col_ok
}

/// One representative per permutation class of `m × n` patterns without
/// empty rows or columns, in a deterministic order.
pub fn patterns_of_shape(m: usize, n: usize) -> Vec<Pattern> {
    assert!(m * n <= 25, "exhaustive enumeration is for desk-scale shapes");
    let perms = permutations(m);
    let mut seen = BTreeSet::new();
    for bits in 0u32..(1u32 << (m * n)) {
        if has_no_empty_line(m, n, bits) {
            seen.insert(canonical_key(m, n, bits, &perms));
        }
    }
    seen.into_iter()
        .map(|codes| {
            let cells = codes.iter().enumerate().flat_map(|(j, &code)| {
                (0..m)
                    .filter(move |&i| code >> i & 1 == 1)
                    .map(move |i| (i + 1, j + 1))
            });
            Pattern::new(m, n, cells).expect("no empty row or column")
        })
        .collect()
}

/// Every pattern with `m, n ≤ max_side`, one per permutation class.
pub fn all_patterns(max_side: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    for m in 1..=max_side {
        for n in 1..=max_side {
            out.extend(patterns_of_shape(m, n));
        }
    }
    out
}
