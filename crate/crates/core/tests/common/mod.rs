//! Brute-force oracles shared by the integration tests. They recompute
//! everything from the block table, never from the library's origin map.
#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use simplicial::composition::{Block, CompositionRule, Keep};
use simplicial::io::parse_theory;
use simplicial::theory::Theory;
use simplicial::{rat, RVector, Rational};

pub const TOY_FILE: &str = r#"{
  "format_version": "1",
  "systems": [
    {"name": "A", "dim": 2, "effect_model": "full_dual"},
    {"name": "B", "dim": 2, "effect_model": "full_dual"}
  ],
  "composites": [
    {"name": "AB", "left": "A", "right": "B", "dim": 5, "blocks": [
      {"i": 1, "j": 1, "vertices": [1, 2], "weights": ["1/2", "1/2"]},
      {"i": 1, "j": 2, "vertices": [3], "weights": ["1"]},
      {"i": 2, "j": 1, "vertices": [4], "weights": ["1"]},
      {"i": 2, "j": 2, "vertices": [5], "weights": ["1"]}
    ]}
  ]
}
"#;

pub fn toy() -> Theory {
    parse_theory(TOY_FILE).expect("TOY parses")
}

/// `sum_ij rho_i sigma_j sum_{k in I_ij} p_k |k>`, straight from the blocks.
pub fn product_oracle(rule: &CompositionRule, rho: &[Rational], sigma: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); rule.composite_dim()];
    for b in rule.blocks() {
        for (v, w) in b.vertices.iter().zip(&b.weights) {
            out[v - 1] += &rho[b.i - 1] * &sigma[b.j - 1] * w;
        }
    }
    out
}

/// Sum over the discarded index, block by block.
pub fn marginal_oracle(rule: &CompositionRule, omega: &[Rational], keep: Keep) -> Vec<Rational> {
    let dim = match keep {
        Keep::Left => rule.left().dim(),
        Keep::Right => rule.right().dim(),
    };
    let mut out = vec![Rational::zero(); dim];
    for b in rule.blocks() {
        let idx = if keep == Keep::Left { b.i } else { b.j };
        for v in &b.vertices {
            out[idx - 1] += &omega[v - 1];
        }
    }
    out
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rational::zero(), |s, t| s + t)
}

/// Disjoint, covering, positive weights summing to one, one block per pair.
pub fn partition_violation(rule: &CompositionRule) -> Option<String> {
    let (da, db, d) = (rule.left().dim(), rule.right().dim(), rule.composite_dim());
    if d < da * db {
        return Some(format!("dimension {d} below {da}x{db}"));
    }
    let mut owner = vec![None; d];
    let mut seen = vec![vec![false; db]; da];
    for Block { i, j, vertices, weights } in rule.blocks() {
        if seen[i - 1][j - 1] {
            return Some(format!("duplicate block ({i},{j})"));
        }
        seen[i - 1][j - 1] = true;
        if vertices.is_empty() || vertices.len() != weights.len() {
            return Some(format!("malformed block ({i},{j})"));
        }
        for v in vertices {
            if owner[v - 1].replace((*i, *j)).is_some() {
                return Some(format!("vertex {v} in two blocks"));
            }
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Some(format!("non-positive weight in ({i},{j})"));
        }
        if !weights.iter().fold(Rational::zero(), |s, w| s + w).is_one() {
            return Some(format!("weights of ({i},{j}) do not sum to 1"));
        }
    }
    if let Some(v) = owner.iter().position(Option::is_none) {
        return Some(format!("vertex {} uncovered", v + 1));
    }
    if seen.iter().flatten().any(|s| !s) {
        return Some("missing block".into());
    }
    None
}

/// Textbook Gaussian elimination over the rationals.
pub fn gauss_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        let prow = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot;
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn uniform(n: usize) -> RVector {
    RVector::new(vec![rat(1, n as i64); n])
}
