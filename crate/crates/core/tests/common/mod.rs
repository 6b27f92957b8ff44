//! Independent oracles for the integration tests. Nothing here calls the
//! library's own classification, clique or estimation code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use quasimle::classify::Verdict;
use quasimle::pattern::{Cell, CountTable, Pattern};
use quasimle::rational::Rational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Parses `"11, 21, 31"` into cells.
pub fn cells(text: &str) -> BTreeSet<Cell> {
    text.split(',')
        .map(|t| {
            let b = t.trim().as_bytes();
            assert_eq!(b.len(), 2, "two-digit cell label expected: {t:?}");
            Cell::new((b[0] - b'0') as usize, (b[1] - b'0') as usize)
        })
        .collect()
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let seed = quasimle::enumerate::seed_from_env();
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Positive integer counts drawn uniformly from `1..=max`.
pub fn random_counts(s: &Pattern, rng: &mut ChaCha8Rng, max: i64) -> CountTable {
    let values: Vec<i64> = (0..s.len()).map(|_| rng.gen_range(1..=max)).collect();
    CountTable::from_integers(s.clone(), &values).expect("positive counts")
}

/// Every simple cycle of the bipartite graph of `s`, as vertex lists
/// (rows `0..m`, columns `m..m+n`), each reported once per direction.
fn simple_cycles(s: &Pattern) -> Vec<Vec<usize>> {
    let (m, n) = (s.m(), s.n());
    let v = m + n;
    let mut adj = vec![vec![false; v]; v];
    for c in s.cells() {
        let (a, b) = (c.row - 1, m + c.col - 1);
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let mut out = Vec::new();
    for start in 0..v {
        let mut path = vec![start];
        let mut used = vec![false; v];
        used[start] = true;
        walk(&adj, start, &mut path, &mut used, &mut out);
    }
    out
}

fn walk(adj: &[Vec<bool>], start: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let last = *path.last().expect("nonempty");
    for next in 0..adj.len() {
        if !adj[last][next] {
            continue;
        }
        if next == start && path.len() >= 4 {
            out.push(path.clone());
        }
        if next > start && !used[next] {
            used[next] = true;
            path.push(next);
            walk(adj, start, path, used, out);
            path.pop();
            used[next] = false;
        }
    }
}

fn chords(adj_of: impl Fn(usize, usize) -> bool, cycle: &[usize]) -> usize {
    let l = cycle.len();
    let mut count = 0;
    for a in 0..l {
        for b in a + 2..l {
            if a == 0 && b == l - 1 {
                continue;
            }
            if adj_of(cycle[a], cycle[b]) {
                count += 1;
            }
        }
    }
    count
}

/// Classifies by counting chords on every cycle of length at least 6.
pub fn classify_by_chord_count(s: &Pattern) -> Verdict {
    let m = s.m();
    let adj_of = |a: usize, b: usize| {
        let (r, c) = if a < m { (a, b) } else { (b, a) };
        r < m && c >= m && s.contains(r + 1, c - m + 1)
    };
    let mut fewest = usize::MAX;
    for cycle in simple_cycles(s) {
        if cycle.len() >= 6 {
            fewest = fewest.min(chords(adj_of, &cycle));
        }
    }
    match fewest {
        0 => Verdict::NotChordalBipartite,
        1 => Verdict::ChordalBipartiteOnly,
        _ => Verdict::DoublyChordalBipartite,
    }
}

/// `u_{i+} u_{+j} / u_{++}²` on every cell of a full table.
pub fn independence_mle(u: &CountTable) -> Vec<Rational> {
    let s = u.pattern();
    let total: Rational = u.values().iter().sum();
    s.cells()
        .iter()
        .map(|c| {
            let row: Rational = (1..=s.n()).filter_map(|j| u.get(c.row, j)).sum();
            let col: Rational = (1..=s.m()).filter_map(|i| u.get(i, c.col)).sum();
            row * col / (&total * &total)
        })
        .collect()
}

pub fn max_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
