//! Composite systems.
//!
//! A composition rule for `A` and `B` fixes the composite dimension
//! `D_AB >= D_A * D_B` and, for every pair of vertices `(i, j)`, the block
//! `I_ij` of composite vertices that convexly refine the product
//! `|i>_A |j>_B`, together with positive weights `p_k^ij` summing to 1:
//!
//! ```text
//! |i>_A |j>_B = sum_{k in I_ij} p_k^ij |k>_AB
//! ```
//!
//! Blocks partition the composite vertex set, so every composite vertex
//! `k` has a unique origin `(i_k, j_k)`. Products of states and effects,
//! and marginals, all follow bilinearly from that map.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{format_rational, RVector, Rational};
use crate::error::{Error, Result};
use crate::system::{EffectModel, EffectVector, StateVector, SystemSpace};
use crate::theory::Theory;

/// The refinement block `I_ij` with aligned weights (indices 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub i: usize,
    pub j: usize,
    pub vertices: Vec<usize>,
    pub weights: Vec<Rational>,
}

impl Block {
    pub fn new(i: usize, j: usize, vertices: Vec<usize>, weights: Vec<Rational>) -> Self {
        Block { i, j, vertices, weights }
    }

    pub fn singleton(i: usize, j: usize, vertex: usize) -> Self {
        Block { i, j, vertices: vec![vertex], weights: vec![Rational::one()] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DimensionBelowProduct { composite_dim: usize, product: usize },
    BlockIndexOutOfRange { i: usize, j: usize },
    DuplicateBlock { i: usize, j: usize },
    MissingBlock { i: usize, j: usize },
    EmptyBlock { i: usize, j: usize },
    WeightCountMismatch { i: usize, j: usize, vertices: usize, weights: usize },
    VertexOutOfRange { i: usize, j: usize, vertex: usize },
    BlocksNotDisjoint { vertex: usize, first: (usize, usize), second: (usize, usize) },
    UncoveredVertex { vertex: usize },
    NonPositiveWeight { i: usize, j: usize, vertex: usize },
    WeightsDoNotSumToOne { i: usize, j: usize, sum: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionBelowProduct { composite_dim, product } => {
                write!(f, "composite dimension {composite_dim} < {product} = D_A * D_B")
            }
            Violation::BlockIndexOutOfRange { i, j } => write!(f, "block ({i},{j}) out of range"),
            Violation::DuplicateBlock { i, j } => write!(f, "block ({i},{j}) declared twice"),
            Violation::MissingBlock { i, j } => write!(f, "block ({i},{j}) missing"),
            Violation::EmptyBlock { i, j } => write!(f, "block ({i},{j}) is empty"),
            Violation::WeightCountMismatch { i, j, vertices, weights } => write!(
                f,
                "block ({i},{j}) has {vertices} vertices but {weights} weights"
            ),
            Violation::VertexOutOfRange { i, j, vertex } => {
                write!(f, "block ({i},{j}) names vertex {vertex} outside the composite")
            }
            Violation::BlocksNotDisjoint { vertex, first, second } => write!(
                f,
                "blocks not disjoint: vertex {vertex} in ({},{}) and ({},{})",
                first.0, first.1, second.0, second.1
            ),
            Violation::UncoveredVertex { vertex } => {
                write!(f, "vertex {vertex} belongs to no block")
            }
            Violation::NonPositiveWeight { i, j, vertex } => {
                write!(f, "block ({i},{j}) has a non-positive weight on vertex {vertex}")
            }
            Violation::WeightsDoNotSumToOne { i, j, sum } => {
                write!(f, "weights sum ≠ 1 in block ({i},{j}) (sum = {})", format_rational(sum))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks the block-partition invariants on raw rule data.
pub fn validate_rule(
    left_dim: usize,
    right_dim: usize,
    composite_dim: usize,
    blocks: &[Block],
) -> ValidationReport {
    let mut violations = Vec::new();
    let product = left_dim * right_dim;
    if composite_dim < product {
        violations.push(Violation::DimensionBelowProduct { composite_dim, product });
    }
    let mut seen_blocks = BTreeMap::new();
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; composite_dim];
    for block in blocks {
        let (i, j) = (block.i, block.j);
        if i == 0 || i > left_dim || j == 0 || j > right_dim {
            violations.push(Violation::BlockIndexOutOfRange { i, j });
            continue;
        }
        if seen_blocks.insert((i, j), ()).is_some() {
            violations.push(Violation::DuplicateBlock { i, j });
        }
        if block.vertices.is_empty() {
            violations.push(Violation::EmptyBlock { i, j });
        }
        if block.vertices.len() != block.weights.len() {
            violations.push(Violation::WeightCountMismatch {
                i,
                j,
                vertices: block.vertices.len(),
                weights: block.weights.len(),
            });
        }
        for &v in &block.vertices {
            if v == 0 || v > composite_dim {
                violations.push(Violation::VertexOutOfRange { i, j, vertex: v });
                continue;
            }
            match owner[v - 1] {
                Some(first) => violations.push(Violation::BlocksNotDisjoint {
                    vertex: v,
                    first,
                    second: (i, j),
                }),
                None => owner[v - 1] = Some((i, j)),
            }
        }
        for (&v, w) in block.vertices.iter().zip(&block.weights) {
            if !w.is_positive() {
                violations.push(Violation::NonPositiveWeight { i, j, vertex: v });
            }
        }
        let sum = block.weights.iter().fold(Rational::zero(), |acc, w| acc + w);
        if !block.vertices.is_empty() && !sum.is_one() {
            violations.push(Violation::WeightsDoNotSumToOne { i, j, sum });
        }
    }
    for i in 1..=left_dim {
        for j in 1..=right_dim {
            if !seen_blocks.contains_key(&(i, j)) {
                violations.push(Violation::MissingBlock { i, j });
            }
        }
    }
    for (k, o) in owner.iter().enumerate() {
        if o.is_none() {
            violations.push(Violation::UncoveredVertex { vertex: k + 1 });
        }
    }
    ValidationReport { violations }
}

/// Which factor a marginal keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    Left,
    Right,
}

/// A validated composition rule for `left ⊠ right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionRule {
    composite: String,
    left: SystemSpace,
    right: SystemSpace,
    composite_dim: usize,
    blocks: Vec<Block>,
    /// Per composite vertex (0-based): origin `(i_k, j_k)` and weight `p_k`.
    origin: Vec<(usize, usize)>,
    weight: Vec<Rational>,
}

impl CompositionRule {
    pub fn new(
        composite: impl Into<String>,
        left: SystemSpace,
        right: SystemSpace,
        composite_dim: usize,
        mut blocks: Vec<Block>,
    ) -> Result<Self> {
        let report = validate_rule(left.dim(), right.dim(), composite_dim, &blocks);
        if !report.is_valid() {
            return Err(Error::InvalidRule(report));
        }
        blocks.sort_by_key(|b| (b.i, b.j));
        let mut origin = vec![(0, 0); composite_dim];
        let mut weight = vec![Rational::zero(); composite_dim];
        for b in &blocks {
            for (&v, w) in b.vertices.iter().zip(&b.weights) {
                origin[v - 1] = (b.i, b.j);
                weight[v - 1] = w.clone();
            }
        }
        Ok(CompositionRule { composite: composite.into(), left, right, composite_dim, blocks, origin, weight })
    }

    /// Canonical numbering: blocks in lexicographic `(i, j)` order, vertices
    /// numbered consecutively. `weights[(i-1) * D_B + (j-1)]` is block `(i, j)`.
    pub fn canonical(
        composite: impl Into<String>,
        left: SystemSpace,
        right: SystemSpace,
        weights: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let db = right.dim();
        if weights.len() != left.dim() * db {
            return Err(Error::InvalidParameter(format!(
                "expected {} weight lists, got {}",
                left.dim() * db,
                weights.len()
            )));
        }
        let mut next = 1;
        let mut blocks = Vec::with_capacity(weights.len());
        for (idx, w) in weights.into_iter().enumerate() {
            let vertices: Vec<usize> = (next..next + w.len()).collect();
            next += w.len();
            blocks.push(Block::new(idx / db + 1, idx % db + 1, vertices, w));
        }
        Self::new(composite, left, right, next - 1, blocks)
    }

    /// Local-discriminability composition: singleton blocks, `D_AB = D_A D_B`.
    pub fn product(composite: impl Into<String>, left: SystemSpace, right: SystemSpace) -> Result<Self> {
        let n = left.dim() * right.dim();
        Self::canonical(composite, left, right, vec![vec![Rational::one()]; n])
    }

    pub fn composite_name(&self) -> &str {
        &self.composite
    }

    pub fn left(&self) -> &SystemSpace {
        &self.left
    }

    pub fn right(&self) -> &SystemSpace {
        &self.right
    }

    pub fn composite_dim(&self) -> usize {
        self.composite_dim
    }

    /// Blocks sorted by `(i, j)`.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&Block> {
        self.blocks.iter().find(|b| b.i == i && b.j == j)
    }

    /// Origin `(i_k, j_k)` of the 1-based composite vertex `k`.
    pub fn origin(&self, k: usize) -> (usize, usize) {
        self.origin[k - 1]
    }

    pub fn weight(&self, k: usize) -> &Rational {
        &self.weight[k - 1]
    }

    /// `D_AB - D_A D_B`.
    pub fn excess_dimension(&self) -> usize {
        self.composite_dim - self.left.dim() * self.right.dim()
    }

    pub fn compose_states(&self, rho: &StateVector, sigma: &StateVector) -> Result<StateVector> {
        self.left.check_state(rho)?;
        self.right.check_state(sigma)?;
        let coords = self
            .origin
            .iter()
            .zip(&self.weight)
            .map(|(&(i, j), p)| &rho.coords()[i - 1] * &sigma.coords()[j - 1] * p)
            .collect();
        Ok(StateVector::from_parts(&self.composite, coords))
    }

    pub fn compose_effects(&self, a: &EffectVector, b: &EffectVector) -> Result<EffectVector> {
        self.left.check_effect(a)?;
        self.right.check_effect(b)?;
        let coords = self
            .origin
            .iter()
            .map(|&(i, j)| &a.coords()[i - 1] * &b.coords()[j - 1])
            .collect();
        Ok(EffectVector::from_parts(&self.composite, coords))
    }

    /// The product state `|i>_A ⊠ |j>_B`.
    pub fn product_vertex(&self, i: usize, j: usize) -> Result<StateVector> {
        self.compose_states(&self.left.vertex(i)?, &self.right.vertex(j)?)
    }

    /// Applies the deterministic effect of the discarded factor.
    pub fn marginalize(&self, omega: &StateVector, keep: Keep) -> Result<StateVector> {
        if omega.system() != self.composite || omega.coords().dim() != self.composite_dim {
            return Err(Error::SystemMismatch {
                expected: self.composite.clone(),
                found: omega.system().to_string(),
            });
        }
        let kept = match keep {
            Keep::Left => &self.left,
            Keep::Right => &self.right,
        };
        let mut out = RVector::zeros(kept.dim()).into_inner();
        for (&(i, j), w) in self.origin.iter().zip(omega.coords().iter()) {
            let idx = if keep == Keep::Left { i } else { j };
            out[idx - 1] += w;
        }
        Ok(StateVector::from_parts(kept.name(), RVector::new(out)))
    }
}

/// A composite system: its own state space plus the rule that built it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeSystem {
    space: SystemSpace,
    rule: CompositionRule,
}

impl CompositeSystem {
    /// Defaults to the full dual effect model on the composite simplex.
    pub fn new(rule: CompositionRule, effect_model: Option<EffectModel>) -> Result<Self> {
        let space = SystemSpace::new(
            rule.composite_name(),
            rule.composite_dim(),
            effect_model.unwrap_or(EffectModel::FullDual),
        )?;
        Ok(CompositeSystem { space, rule })
    }

    pub fn name(&self) -> &str {
        self.space.name()
    }

    pub fn space(&self) -> &SystemSpace {
        &self.space
    }

    pub fn rule(&self) -> &CompositionRule {
        &self.rule
    }
}

/// Left-associated n-fold composite `((A1 A2) A3)...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NFoldComposite {
    pub space: SystemSpace,
    pub factors: Vec<String>,
    /// Per 1-based vertex `k` (stored at `k - 1`): the tuple of factor
    /// vertices whose product `k` refines.
    pub origins: Vec<Vec<usize>>,
    /// Weight of vertex `k` in the expansion of that product.
    pub weights: Vec<Rational>,
}

impl NFoldComposite {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

pub fn compose_nfold(theory: &Theory, factors: &[&str]) -> Result<NFoldComposite> {
    let Some((first, rest)) = factors.split_first() else {
        return Err(Error::InvalidParameter("at least one factor is required".into()));
    };
    let mut space = theory.system(first)?.clone();
    let mut origins: Vec<Vec<usize>> = (1..=space.dim()).map(|j| vec![j]).collect();
    let mut weights = vec![Rational::one(); space.dim()];
    for next in rest {
        theory.system(next)?;
        let comp = theory.rule_for(space.name(), next).ok_or_else(|| Error::MissingRule {
            left: space.name().to_string(),
            right: next.to_string(),
        })?;
        let rule = comp.rule();
        let (o, w): (Vec<_>, Vec<_>) = (1..=rule.composite_dim())
            .map(|k| {
                let (i, j) = rule.origin(k);
                let mut tuple = origins[i - 1].clone();
                tuple.push(j);
                (tuple, &weights[i - 1] * rule.weight(k))
            })
            .unzip();
        origins = o;
        weights = w;
        space = comp.space().clone();
    }
    Ok(NFoldComposite {
        space,
        factors: factors.iter().map(|s| s.to_string()).collect(),
        origins,
        weights,
    })
}
