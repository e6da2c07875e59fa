//! Structural decision procedures with certificates.
//!
//! Entanglement, atomicity and local discriminability of a composite are
//! read off the block structure of its composition rule; causality and
//! classicality of a single system are decided by exact linear solves and
//! LPs against its effect model.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arith::{LinearSolution, RMatrix, RVector, Rational};
use crate::composition::{compose_nfold, CompositeSystem, CompositionRule, NFoldComposite};
use crate::error::{Error, Result};
use crate::lp::{lp_feasible, FarkasCertificate, Feasibility, LPProblem};
use crate::system::{is_effect, EffectModel, EffectVector, StateVector, SystemSpace};
use crate::theory::Theory;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparabilityCertificate {
    /// `omega = sum lambda_ij (|i> ⊠ |j>)`, `lambda_ij >= 0`.
    Separable { lambda: BTreeMap<(usize, usize), Rational> },
    /// Inside `block`, vertices `indices` carry different ratios
    /// `omega_k / p_k^ij`.
    Entangled {
        block: (usize, usize),
        indices: (usize, usize),
        ratios: (Rational, Rational),
    },
}

impl SeparabilityCertificate {
    pub fn is_separable(&self) -> bool {
        matches!(self, SeparabilityCertificate::Separable { .. })
    }

    /// Rebuilds the state from the product decomposition.
    pub fn reconstruct(&self, rule: &CompositionRule) -> Option<Result<StateVector>> {
        let SeparabilityCertificate::Separable { lambda } = self else {
            return None;
        };
        let mut acc = RVector::zeros(rule.composite_dim());
        for (&(i, j), l) in lambda {
            match rule.product_vertex(i, j) {
                Ok(p) => acc = acc.add(&p.coords().scale(l)),
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(StateVector::from_parts(rule.composite_name(), acc)))
    }
}

/// Closed-form separability: blocks are disjoint, so `omega` is separable
/// iff `omega_k / p_k^ij` is constant on every block.
pub fn is_separable(rule: &CompositionRule, omega: &StateVector) -> Result<SeparabilityCertificate> {
    check_composite_state(rule, omega)?;
    let mut lambda = BTreeMap::new();
    for block in rule.blocks() {
        let ratio = |v: usize| &omega.coords()[v - 1] / &block.weights[pos(block, v)];
        let first = block.vertices[0];
        let r0 = ratio(first);
        if let Some(&other) = block.vertices[1..].iter().find(|&&v| ratio(v) != r0) {
            return Ok(SeparabilityCertificate::Entangled {
                block: (block.i, block.j),
                indices: (first, other),
                ratios: (r0, ratio(other)),
            });
        }
        lambda.insert((block.i, block.j), r0);
    }
    Ok(SeparabilityCertificate::Separable { lambda })
}

fn pos(block: &crate::composition::Block, v: usize) -> usize {
    block.vertices.iter().position(|&x| x == v).expect("vertex in block")
}

/// Independent check: LP for `lambda >= 0` with `sum lambda_ij Pi(i,j) = omega`.
/// Variables are ordered `(i, j)` lexicographically.
pub fn separable_by_lp(rule: &CompositionRule, omega: &StateVector) -> Result<Feasibility> {
    check_composite_state(rule, omega)?;
    let (da, db) = (rule.left().dim(), rule.right().dim());
    let mut products = Vec::with_capacity(da * db);
    for i in 1..=da {
        for j in 1..=db {
            products.push(rule.product_vertex(i, j)?);
        }
    }
    let mut p = LPProblem::nonnegative(products.len());
    for k in 0..rule.composite_dim() {
        let row: RVector = products.iter().map(|pr| pr.coords()[k].clone()).collect();
        p.add_eq(row, omega.coords()[k].clone());
    }
    Ok(lp_feasible(&p)?)
}

fn check_composite_state(rule: &CompositionRule, omega: &StateVector) -> Result<()> {
    if omega.system() != rule.composite_name() || omega.coords().dim() != rule.composite_dim() {
        return Err(Error::SystemMismatch {
            expected: rule.composite_name().to_string(),
            found: omega.system().to_string(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entanglement {
    pub present: bool,
    /// Lowest vertex of the lexicographically first block with two or more
    /// vertices.
    pub witness: Option<usize>,
}

pub fn entanglement_present(rule: &CompositionRule) -> Result<Entanglement> {
    let Some(block) = rule.blocks().iter().find(|b| b.vertices.len() >= 2) else {
        return Ok(Entanglement { present: false, witness: None });
    };
    let witness = *block.vertices.iter().min().expect("nonempty block");
    let vertex = StateVector::from_parts(rule.composite_name(), RVector::unit(rule.composite_dim(), witness - 1));
    if is_separable(rule, &vertex)?.is_separable() {
        return Err(Error::InconsistentReport(format!(
            "vertex {witness} of an oversized block decomposes into products"
        )));
    }
    Ok(Entanglement { present: true, witness: Some(witness) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicityResult {
    pub atomic: bool,
    /// A pair `(i, j)` whose product is refined by two or more vertices.
    pub violating: Option<(usize, usize)>,
}

pub fn check_atomicity(rule: &CompositionRule) -> AtomicityResult {
    let violating = rule.blocks().iter().find(|b| b.vertices.len() >= 2).map(|b| (b.i, b.j));
    AtomicityResult { atomic: violating.is_none(), violating }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalityResult {
    pub deterministic_effect: EffectVector,
}

/// Solves `<a|j> = 1` for every vertex `j` and checks the solution lies in
/// the effect model.
pub fn check_causality(s: &SystemSpace) -> Result<CausalityResult> {
    let evaluations = RMatrix::new(s.vertices().map(|v| v.coords().clone()).collect(), s.dim())?;
    match evaluations.solve(&RVector::ones(s.dim()))? {
        LinearSolution::Unique(a) => {
            if is_effect(s, &a)?.is_member() {
                Ok(CausalityResult { deterministic_effect: EffectVector::from_parts(s.name(), a) })
            } else {
                Err(Error::NoDeterministicEffect(s.name().to_string()))
            }
        }
        LinearSolution::Underdetermined { .. } => {
            Err(Error::NonUniqueDeterministicEffect(s.name().to_string()))
        }
        LinearSolution::Inconsistent => Err(Error::NoDeterministicEffect(s.name().to_string())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Discrimination {
    /// `test[i]` reads 1 on the i-th listed vertex and 0 on the others.
    Discriminable { test: Vec<EffectVector> },
    NotDiscriminable { certificate: FarkasCertificate },
}

impl Discrimination {
    pub fn is_discriminable(&self) -> bool {
        matches!(self, Discrimination::Discriminable { .. })
    }
}

/// LP for an observation `{a_i}` in the effect model with
/// `<a_i|set_j> = delta_ij` and `sum_i a_i = e`.
///
/// Variables: `a_i` coordinates (`i`-major), then, for restricted cones,
/// one block of generator coefficients per `a_i`.
pub(crate) fn discrimination_problem(s: &SystemSpace, set: &[usize]) -> LPProblem {
    let d = set.len();
    let dim = s.dim();
    let gens: &[RVector] = match s.effect_model() {
        EffectModel::FullDual => &[],
        EffectModel::RestrictedCone { generators } => generators,
    };
    let n_eff = d * dim;
    let n = n_eff + d * gens.len();
    let var = |i: usize, j: usize| i * dim + j;
    let mut p = LPProblem::nonnegative(n);
    for (i, _) in set.iter().enumerate() {
        for (i2, &v) in set.iter().enumerate() {
            let mut row = RVector::zeros(n).into_inner();
            row[var(i, v - 1)] = Rational::from_integer(1.into());
            let rhs = if i == i2 { 1 } else { 0 };
            p.add_eq(RVector::new(row), Rational::from_integer(rhs.into()));
        }
    }
    for j in 0..dim {
        let mut row = RVector::zeros(n).into_inner();
        for i in 0..d {
            row[var(i, j)] = Rational::from_integer(1.into());
        }
        p.add_eq(RVector::new(row), Rational::from_integer(1.into()));
    }
    for i in 0..d {
        for j in 0..dim {
            if gens.is_empty() {
                break;
            }
            let mut row = RVector::zeros(n).into_inner();
            row[var(i, j)] = Rational::from_integer(1.into());
            for (g, gen) in gens.iter().enumerate() {
                row[n_eff + i * gens.len() + g] = -gen[j].clone();
            }
            p.add_eq(RVector::new(row), Rational::zero());
        }
    }
    p
}

/// Joint perfect discriminability of the listed (1-based) vertices.
pub fn jointly_discriminable(s: &SystemSpace, set: &[usize]) -> Result<Discrimination> {
    for &v in set {
        s.vertex(v)?;
    }
    let p = discrimination_problem(s, set);
    Ok(match lp_feasible(&p)? {
        Feasibility::Feasible(x) => {
            let dim = s.dim();
            let test = (0..set.len())
                .map(|i| EffectVector::from_parts(s.name(), x.entries()[i * dim..(i + 1) * dim].iter().cloned().collect()))
                .collect();
            Discrimination::Discriminable { test }
        }
        Feasibility::Infeasible(certificate) => Discrimination::NotDiscriminable { certificate },
    })
}

/// Classical iff all vertices are jointly perfectly discriminable.
pub fn check_classicality(s: &SystemSpace) -> Result<Discrimination> {
    let all: Vec<usize> = (1..=s.dim()).collect();
    jointly_discriminable(s, &all)
}

/// Smallest `n` such that products of effects on groups of at most `n`
/// adjacent factors span the dual of the (left-associated) composite.
///
/// Factor effect sets span their duals, so the product span is the span of
/// indicator functionals of the vertex classes `k -> (origin in each group)`.
/// The `{A|BC}` grouping is used only when the `(B, C)` and `(A, BC)` rules
/// are declared and associate with the `((AB)C)` bracketing.
pub fn discriminability_degree(theory: &Theory, factors: &[&str]) -> Result<usize> {
    match factors.len() {
        0 => Err(Error::InvalidParameter("no factors given".into())),
        1 => {
            theory.system(factors[0])?;
            Ok(1)
        }
        2 => {
            let rule = theory.require_rule(factors[0], factors[1])?.rule();
            let classes: Vec<(usize, usize)> = (1..=rule.composite_dim()).map(|k| rule.origin(k)).collect();
            Ok(if class_rank(&classes) == rule.composite_dim() { 1 } else { 2 })
        }
        3 => {
            let (a, b, c) = (factors[0], factors[1], factors[2]);
            let nfold = compose_nfold(theory, factors)?;
            let dim = nfold.dim();
            if class_rank(&nfold.origins) == dim {
                return Ok(1);
            }
            let ab = theory.require_rule(a, b)?;
            let abc = theory.require_rule(ab.name(), c)?.rule();
            let mut functionals = indicator_functionals(&(1..=dim).map(|m| abc.origin(m)).collect::<Vec<_>>());
            if let Some(bijection) = right_bracket_bijection(theory, a, b, c)? {
                let bc = theory.require_rule(b, c)?;
                let a_bc = theory.require_rule(a, bc.name())?.rule();
                let classes: Vec<(usize, usize)> = bijection.iter().map(|&n| a_bc.origin(n)).collect();
                functionals.extend(indicator_functionals(&classes));
            }
            let rank = RMatrix::new(functionals, dim)?.rank();
            Ok(if rank == dim { 2 } else { 3 })
        }
        n => Err(Error::TooManyFactors(n)),
    }
}

fn right_bracket_bijection(theory: &Theory, a: &str, b: &str, c: &str) -> Result<Option<Vec<usize>>> {
    let declared = theory
        .rule_for(b, c)
        .is_some_and(|bc| theory.rule_for(a, bc.name()).is_some());
    if !declared {
        return Ok(None);
    }
    Ok(match check_associativity(theory, a, b, c)? {
        AssociativityResult::Associative { bijection } => Some(bijection),
        AssociativityResult::Mismatch(_) => None,
    })
}

/// One 0/1 functional per distinct class label.
fn indicator_functionals<T: Ord + Clone>(classes: &[T]) -> Vec<RVector> {
    let mut by_class: BTreeMap<T, Vec<usize>> = BTreeMap::new();
    for (k, c) in classes.iter().enumerate() {
        by_class.entry(c.clone()).or_default().push(k);
    }
    by_class
        .values()
        .map(|members| {
            let mut v = RVector::zeros(classes.len()).into_inner();
            for &k in members {
                v[k] = Rational::from_integer(1.into());
            }
            RVector::new(v)
        })
        .collect()
}

fn class_rank<T: Ord + Clone>(classes: &[T]) -> usize {
    RMatrix::new(indicator_functionals(classes), classes.len())
        .expect("indicator rows have composite length")
        .rank()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssociativityMismatch {
    Dimension { left_bracket: usize, right_bracket: usize },
    /// Different numbers of vertices refine the triple product `(i, j, c)`.
    Signature { triple: (usize, usize, usize), left_count: usize, right_count: usize },
    /// Same counts but different composed weights.
    Weights { triple: (usize, usize, usize), left: Vec<Rational>, right: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AssociativityResult {
    /// `bijection[m - 1]` is the `A(BC)` vertex matched to `(AB)C` vertex `m`.
    Associative { bijection: Vec<usize> },
    Mismatch(AssociativityMismatch),
}

impl AssociativityResult {
    pub fn is_associative(&self) -> bool {
        matches!(self, AssociativityResult::Associative { .. })
    }
}

/// Compares `(AB)C` with `A(BC)` vertex by vertex: each vertex refines a
/// triple product with a composed weight, and both bracketings must carry
/// the same multiset of `(triple, weight)` labels.
pub fn check_associativity(theory: &Theory, a: &str, b: &str, c: &str) -> Result<AssociativityResult> {
    let left: NFoldComposite = compose_nfold(theory, &[a, b, c])?;
    let bc = theory.require_rule(b, c)?;
    let a_bc: &CompositeSystem = theory.require_rule(a, bc.name())?;
    let (bc, a_bc) = (bc.rule(), a_bc.rule());
    if left.dim() != a_bc.composite_dim() {
        return Ok(AssociativityResult::Mismatch(AssociativityMismatch::Dimension {
            left_bracket: left.dim(),
            right_bracket: a_bc.composite_dim(),
        }));
    }
    type Groups = BTreeMap<(usize, usize, usize), Vec<(Rational, usize)>>;
    let mut lgroups: Groups = BTreeMap::new();
    for (m, (o, w)) in left.origins.iter().zip(&left.weights).enumerate() {
        lgroups.entry((o[0], o[1], o[2])).or_default().push((w.clone(), m + 1));
    }
    let mut rgroups: Groups = BTreeMap::new();
    for n in 1..=a_bc.composite_dim() {
        let (i, l) = a_bc.origin(n);
        let (j, k) = bc.origin(l);
        rgroups.entry((i, j, k)).or_default().push((bc.weight(l) * a_bc.weight(n), n));
    }
    let mut bijection = vec![0; left.dim()];
    let triples: std::collections::BTreeSet<_> = lgroups.keys().chain(rgroups.keys()).cloned().collect();
    for triple in triples {
        let mut l = lgroups.remove(&triple).unwrap_or_default();
        let mut r = rgroups.remove(&triple).unwrap_or_default();
        if l.len() != r.len() {
            return Ok(AssociativityResult::Mismatch(AssociativityMismatch::Signature {
                triple,
                left_count: l.len(),
                right_count: r.len(),
            }));
        }
        l.sort();
        r.sort();
        if l.iter().zip(&r).any(|(x, y)| x.0 != y.0) {
            return Ok(AssociativityResult::Mismatch(AssociativityMismatch::Weights {
                triple,
                left: l.into_iter().map(|x| x.0).collect(),
                right: r.into_iter().map(|x| x.0).collect(),
            }));
        }
        for ((_, m), (_, n)) in l.iter().zip(&r) {
            bijection[m - 1] = *n;
        }
    }
    Ok(AssociativityResult::Associative { bijection })
}

/// Per-composite summary; the constructor cross-checks the equivalences
/// between entanglement, local discriminability and atomicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub composite: String,
    pub left: String,
    pub right: String,
    pub excess_dimension: usize,
    pub causal: CausalityResult,
    pub classical: Discrimination,
    pub atomic_composition: AtomicityResult,
    pub local_discriminability: bool,
    pub entanglement: Entanglement,
    pub discriminability_degree: usize,
}

impl AnalysisReport {
    pub fn for_composite(theory: &Theory, name: &str) -> Result<Self> {
        let comp = theory.composite(name)?;
        let rule = comp.rule();
        let (left, right) = (rule.left().name(), rule.right().name());
        let degree = discriminability_degree(theory, &[left, right])?;
        let report = AnalysisReport {
            composite: name.to_string(),
            left: left.to_string(),
            right: right.to_string(),
            excess_dimension: rule.excess_dimension(),
            causal: check_causality(comp.space())?,
            classical: check_classicality(comp.space())?,
            atomic_composition: check_atomicity(rule),
            local_discriminability: degree == 1,
            entanglement: entanglement_present(rule)?,
            discriminability_degree: degree,
        };
        report.check_consistency()?;
        Ok(report)
    }

    fn check_consistency(&self) -> Result<()> {
        let ent = self.entanglement.present;
        let fail = |what: &str| Err(Error::InconsistentReport(format!("{}: {what}", self.composite)));
        if ent == self.local_discriminability {
            return fail("entanglement and local discriminability disagree");
        }
        if ent == self.atomic_composition.atomic {
            return fail("entanglement and atomicity of composition disagree");
        }
        if ent != (self.excess_dimension > 0) {
            return fail("entanglement and excess dimension disagree");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::composition::Block;

    fn toy_theory() -> Theory {
        let mut t = Theory::new();
        t.add_system(SystemSpace::full_dual("A", 2).unwrap()).unwrap();
        t.add_system(SystemSpace::full_dual("B", 2).unwrap()).unwrap();
        t.add_composite(
            "AB",
            "A",
            "B",
            5,
            vec![
                Block::new(1, 1, vec![1, 2], vec![rat(1, 2), rat(1, 2)]),
                Block::singleton(1, 2, 3),
                Block::singleton(2, 1, 4),
                Block::singleton(2, 2, 5),
            ],
            None,
        )
        .unwrap();
        t
    }

    fn ct_theory(dims: &[usize]) -> Theory {
        let mut t = Theory::new();
        let names: Vec<String> = (0..dims.len()).map(|i| ((b'A' + i as u8) as char).to_string()).collect();
        for (n, &d) in names.iter().zip(dims) {
            t.add_system(SystemSpace::full_dual(n.as_str(), d).unwrap()).unwrap();
        }
        t
    }

    fn add_product(t: &mut Theory, l: &str, r: &str) -> String {
        let name = format!("{l}{r}");
        let rule = CompositionRule::product(&name, t.system(l).unwrap().clone(), t.system(r).unwrap().clone())
            .unwrap();
        t.insert_rule(rule, None).unwrap();
        name
    }

    fn state(t: &Theory, sys: &str, xs: &[Rational]) -> StateVector {
        t.system(sys).unwrap().state(RVector::new(xs.to_vec())).unwrap()
    }

    #[test]
    fn toy_separability() {
        let t = toy_theory();
        let rule = t.composite("AB").unwrap().rule();
        let prod = state(&t, "AB", &[rat(1, 2), rat(1, 2), int(0), int(0), int(0)]);
        let cert = is_separable(rule, &prod).unwrap();
        let SeparabilityCertificate::Separable { lambda } = &cert else { panic!("{cert:?}") };
        assert_eq!(lambda[&(1, 1)], int(1));
        assert_eq!(cert.reconstruct(rule).unwrap().unwrap(), prod);
        assert!(separable_by_lp(rule, &prod).unwrap().is_feasible());

        let v1 = state(&t, "AB", &[int(1), int(0), int(0), int(0), int(0)]);
        assert_eq!(
            is_separable(rule, &v1).unwrap(),
            SeparabilityCertificate::Entangled { block: (1, 1), indices: (1, 2), ratios: (int(2), int(0)) }
        );
        let Feasibility::Infeasible(cert) = separable_by_lp(rule, &v1).unwrap() else { panic!() };
        let _ = cert;
    }

    #[test]
    fn ct_states_are_separable() {
        let mut t = ct_theory(&[2, 2]);
        add_product(&mut t, "A", "B");
        let rule = t.composite("AB").unwrap().rule();
        for xs in [[1, 0, 0, 0], [1, 1, 1, 1], [0, 3, 1, 0], [2, 0, 0, 5]] {
            let total: i64 = xs.iter().sum::<i64>().max(1);
            let coords: Vec<Rational> = xs.iter().map(|&x| rat(x, total)).collect();
            assert!(is_separable(rule, &state(&t, "AB", &coords)).unwrap().is_separable());
        }
    }

    #[test]
    fn entanglement_examples() {
        let t = toy_theory();
        assert_eq!(
            entanglement_present(t.composite("AB").unwrap().rule()).unwrap(),
            Entanglement { present: true, witness: Some(1) }
        );
        let mut ct = ct_theory(&[2, 2]);
        add_product(&mut ct, "A", "B");
        assert!(!entanglement_present(ct.composite("AB").unwrap().rule()).unwrap().present);
    }

    #[test]
    fn causality_examples() {
        let s = SystemSpace::full_dual("A", 4).unwrap();
        assert_eq!(check_causality(&s).unwrap().deterministic_effect.coords(), &RVector::ones(4));
        let s = SystemSpace::restricted("A", vec![RVector::from_ints(&[1, 1]), RVector::from_ints(&[1, 0])]).unwrap();
        assert_eq!(check_causality(&s).unwrap().deterministic_effect.coords(), &RVector::ones(2));
        let s = SystemSpace::restricted(
            "A",
            vec![RVector::new(vec![rat(1, 2), int(0)]), RVector::new(vec![int(1), rat(1, 2)])],
        )
        .unwrap();
        assert_eq!(check_causality(&s).unwrap_err(), Error::NoDeterministicEffect("A".into()));
    }

    #[test]
    fn classicality_examples() {
        for d in 1..=4 {
            let s = SystemSpace::full_dual("A", d).unwrap();
            let Discrimination::Discriminable { test } = check_classicality(&s).unwrap() else { panic!() };
            for (i, a) in test.iter().enumerate() {
                assert_eq!(a.coords(), &RVector::unit(d, i));
            }
        }
        let s = SystemSpace::restricted("A", vec![RVector::from_ints(&[1, 1]), RVector::from_ints(&[1, 0])]).unwrap();
        match check_classicality(&s).unwrap() {
            Discrimination::NotDiscriminable { certificate } => {
                assert!(certificate.verify(&discrimination_problem(&s, &[1, 2])))
            }
            other => panic!("{other:?}"),
        }
        let s = SystemSpace::restricted("A", vec![RVector::from_ints(&[1, 0]), RVector::from_ints(&[0, 1])]).unwrap();
        assert!(check_classicality(&s).unwrap().is_discriminable());
    }

    #[test]
    fn atomicity_examples() {
        let t = toy_theory();
        assert_eq!(
            check_atomicity(t.composite("AB").unwrap().rule()),
            AtomicityResult { atomic: false, violating: Some((1, 1)) }
        );
        let mut ct = ct_theory(&[2, 3]);
        add_product(&mut ct, "A", "B");
        assert!(check_atomicity(ct.composite("AB").unwrap().rule()).atomic);
    }

    #[test]
    fn degree_examples() {
        let mut ct = ct_theory(&[2, 2, 2]);
        let ab = add_product(&mut ct, "A", "B");
        assert_eq!(discriminability_degree(&ct, &["A", "B"]).unwrap(), 1);
        add_product(&mut ct, &ab, "C");
        assert_eq!(discriminability_degree(&ct, &["A", "B", "C"]).unwrap(), 1);
        assert_eq!(discriminability_degree(&toy_theory(), &["A", "B"]).unwrap(), 2);
        assert_eq!(discriminability_degree(&ct, &["A", "B", "C", "A"]).unwrap_err(), Error::TooManyFactors(4));
        assert!(matches!(discriminability_degree(&ct, &["B", "C"]), Err(Error::MissingRule { .. })));
    }

    #[test]
    fn degree_three_factors_with_outer_excess() {
        // AB is a product but (AB)C has an extra vertex on |11>|1>: even
        // {AB|C} products span only 8 of 9 dimensions.
        let mut t = ct_theory(&[2, 2, 2]);
        add_product(&mut t, "A", "B");
        let mut weights = vec![vec![int(1)]; 8];
        weights[0] = vec![rat(1, 3), rat(2, 3)];
        let rule = CompositionRule::canonical(
            "ABC",
            t.system("AB").unwrap().clone(),
            t.system("C").unwrap().clone(),
            weights,
        )
        .unwrap();
        t.insert_rule(rule, None).unwrap();
        assert_eq!(discriminability_degree(&t, &["A", "B", "C"]).unwrap(), 3);
    }

    #[test]
    fn degree_three_factors_with_inner_excess() {
        // AB has excess 1 (D = 5) and (AB)C is a product (D = 10):
        // tripartite products span 8 dimensions, {AB|C} products all 10.
        let mut t = toy_theory();
        t.add_system(SystemSpace::full_dual("C", 2).unwrap()).unwrap();
        add_product(&mut t, "AB", "C");
        assert_eq!(discriminability_degree(&t, &["A", "B", "C"]).unwrap(), 2);
    }

    #[test]
    fn associativity_ct_triple() {
        let mut t = ct_theory(&[2, 2, 2]);
        let ab = add_product(&mut t, "A", "B");
        add_product(&mut t, &ab, "C");
        let bc = add_product(&mut t, "B", "C");
        let rule = CompositionRule::product("A_BC", t.system("A").unwrap().clone(), t.system(&bc).unwrap().clone())
            .unwrap();
        t.insert_rule(rule, None).unwrap();
        let AssociativityResult::Associative { bijection } = check_associativity(&t, "A", "B", "C").unwrap() else {
            panic!()
        };
        assert_eq!(bijection, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn associativity_dimension_mismatch() {
        let mut t = ct_theory(&[2, 2, 2]);
        add_product(&mut t, "A", "B");
        add_product(&mut t, "B", "C");
        let extra = |n: usize| {
            let mut w = vec![vec![int(1)]; 8];
            for slot in w.iter_mut().take(n) {
                *slot = vec![rat(1, 2), rat(1, 2)];
            }
            w
        };
        let r1 = CompositionRule::canonical("ABC", t.system("AB").unwrap().clone(), t.system("C").unwrap().clone(), extra(2)).unwrap();
        let r2 = CompositionRule::canonical("A_BC", t.system("A").unwrap().clone(), t.system("BC").unwrap().clone(), extra(4)).unwrap();
        t.insert_rule(r1, None).unwrap();
        t.insert_rule(r2, None).unwrap();
        assert_eq!(
            check_associativity(&t, "A", "B", "C").unwrap(),
            AssociativityResult::Mismatch(AssociativityMismatch::Dimension { left_bracket: 10, right_bracket: 12 })
        );
    }

    #[test]
    fn report_for_toy() {
        let t = toy_theory();
        let r = AnalysisReport::for_composite(&t, "AB").unwrap();
        assert_eq!(r.excess_dimension, 1);
        assert!(r.entanglement.present);
        assert!(!r.local_discriminability);
        assert!(!r.atomic_composition.atomic);
        assert_eq!(r.discriminability_degree, 2);
        assert!(r.classical.is_discriminable());
    }
}
