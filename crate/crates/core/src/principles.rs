//! Superposition and purification checkers.
//!
//! Fix a maximal jointly discriminable vertex set `I` with complement `K`.
//! Every observation `{a_i}` discriminating `I` reads `delta_ij` on `I` and
//! some column `q_k = (q_k^i)_i` of a probability distribution on each
//! `k in K`:
//!
//! ```text
//! a_i = f_i + sum_{k in K} q_k^i f_k,   q_k^i >= 0,   sum_i q_k^i = 1
//! ```
//!
//! so a pure state `|v>` produces the outcome distribution `delta_v` when
//! `v in I` and `q_v` when `v in K`. All superposition questions reduce to
//! LPs over the polytope of admissible columns `q` (the `q`-polytope
//! intersected with the effect model).

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::analysis::jointly_discriminable;
use crate::arith::{format_rational, rat, RVector, Rational};
use crate::composition::Keep;
use crate::error::{Error, Result};
use crate::lp::{lp_feasible, lp_optimize, Direction, LPProblem, Optimum};
use crate::system::{deterministic_effect, is_effect, EffectModel, EffectVector, StateVector, SystemSpace};
use crate::theory::Theory;

/// Greedy lexicographic extension from vertex 1.
pub fn maximal_discriminable_set(s: &SystemSpace) -> Result<Vec<usize>> {
    let mut set = vec![1];
    for v in 2..=s.dim() {
        set.push(v);
        if !jointly_discriminable(s, &set)?.is_discriminable() {
            set.pop();
        }
    }
    Ok(set)
}

/// An observation discriminating `base_set`, given by its free columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminatingObservation {
    /// The discriminated vertices `I` (1-based), in outcome order.
    pub base_set: Vec<usize>,
    /// For each vertex `k` outside `I`: `q_k[i]` = value of `a_i` on `|k>`.
    pub free_weights: BTreeMap<usize, Vec<Rational>>,
}

impl DiscriminatingObservation {
    /// Effect vectors `a_i` in dual-basis coordinates.
    pub fn effect_coords(&self, dim: usize) -> Vec<RVector> {
        (0..self.base_set.len())
            .map(|i| {
                (1..=dim)
                    .map(|v| match self.free_weights.get(&v) {
                        Some(q) => q[i].clone(),
                        None if v == self.base_set[i] => Rational::one(),
                        None => Rational::zero(),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn effects(&self, s: &SystemSpace) -> Vec<EffectVector> {
        self.effect_coords(s.dim())
            .into_iter()
            .map(|c| EffectVector::from_parts(s.name(), c))
            .collect()
    }

    /// Outcome distribution `(<a_i|v>)_i` on the pure state `|v>`.
    pub fn outcomes_on_vertex(&self, v: usize) -> Vec<Rational> {
        match self.free_weights.get(&v) {
            Some(q) => q.clone(),
            None => self
                .base_set
                .iter()
                .map(|&b| if b == v { Rational::one() } else { Rational::zero() })
                .collect(),
        }
    }

    /// Checks the column constraints, that the effects sum to `e`, and that
    /// each effect lies in the system's effect model.
    pub fn validate(&self, s: &SystemSpace) -> Result<()> {
        let d = self.base_set.len();
        let bad = |m: String| Err(Error::InvalidEffect { system: s.name().to_string(), reason: m });
        for v in 1..=s.dim() {
            let in_base = self.base_set.contains(&v);
            match (in_base, self.free_weights.get(&v)) {
                (true, Some(_)) => return bad(format!("vertex {v} is both discriminated and free")),
                (false, None) => return bad(format!("no column for free vertex {v}")),
                (false, Some(q)) => {
                    if q.len() != d || q.iter().any(Signed::is_negative) {
                        return bad(format!("column for vertex {v} is not a distribution"));
                    }
                    if !q.iter().fold(Rational::zero(), |a, x| a + x).is_one() {
                        return bad(format!("column for vertex {v} does not sum to 1"));
                    }
                }
                (true, None) => {}
            }
        }
        let coords = self.effect_coords(s.dim());
        let total = coords.iter().fold(RVector::zeros(s.dim()), |acc, a| acc.add(a));
        if total != RVector::ones(s.dim()) {
            return bad("effects do not sum to the deterministic effect".into());
        }
        for a in &coords {
            if !is_effect(s, a)?.is_member() {
                return bad(format!("{a} is outside the effect model"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuperpositionMode {
    Ultraweak,
    Weak,
    Strong,
}

impl std::str::FromStr for SuperpositionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ultraweak" => Ok(SuperpositionMode::Ultraweak),
            "weak" => Ok(SuperpositionMode::Weak),
            "strong" => Ok(SuperpositionMode::Strong),
            other => Err(Error::InvalidParameter(format!("unknown superposition mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for SuperpositionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SuperpositionMode::Ultraweak => "ultraweak",
            SuperpositionMode::Weak => "weak",
            SuperpositionMode::Strong => "strong",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SuperpositionOutcome {
    /// Fewer than two discriminable vertices: the property says nothing.
    Vacuous,
    /// `vertex` reproduces `p` on `observation` (and, for weak and strong
    /// modes, on every admissible observation).
    Holds { observation: DiscriminatingObservation, vertex: usize },
    /// For weak and strong modes, an admissible observation on which no
    /// pure state reproduces `p`. Ultraweak failures carry no witness: the
    /// scan over all pure states found every LP infeasible.
    Fails { counterexample: Option<DiscriminatingObservation> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperpositionVerdict {
    pub mode: SuperpositionMode,
    pub outcome: SuperpositionOutcome,
}

impl SuperpositionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.outcome, SuperpositionOutcome::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self.outcome, SuperpositionOutcome::Fails { .. })
    }
}

/// The admissible `q`-polytope as an LP.
///
/// Variables: `q_k^i` for each free vertex `k` (in increasing order) and
/// outcome `i`, then, for restricted cones, generator coefficients for each
/// `a_i`.
struct ObservationPolytope {
    base: Vec<usize>,
    free: Vec<usize>,
    problem: LPProblem,
}

impl ObservationPolytope {
    fn new(system: &SystemSpace, base: &[usize]) -> Self {
        let d = base.len();
        let free: Vec<usize> = (1..=system.dim()).filter(|v| !base.contains(v)).collect();
        let gens: &[RVector] = match system.effect_model() {
            EffectModel::FullDual => &[],
            EffectModel::RestrictedCone { generators } => generators,
        };
        let nq = free.len() * d;
        let n = nq + d * gens.len();
        let mut problem = LPProblem::nonnegative(n);
        let one = Rational::one();
        for f in 0..free.len() {
            let mut row = RVector::zeros(n).into_inner();
            for i in 0..d {
                row[f * d + i] = one.clone();
            }
            problem.add_eq(RVector::new(row), one.clone());
        }
        if !gens.is_empty() {
            for (i, &bi) in base.iter().enumerate() {
                for v in 1..=system.dim() {
                    let mut row = RVector::zeros(n).into_inner();
                    for (g, gen) in gens.iter().enumerate() {
                        row[nq + i * gens.len() + g] = -gen[v - 1].clone();
                    }
                    let rhs = match free.iter().position(|&k| k == v) {
                        Some(f) => {
                            row[f * d + i] = one.clone();
                            Rational::zero()
                        }
                        None if v == bi => -one.clone(),
                        None => Rational::zero(),
                    };
                    problem.add_eq(RVector::new(row), rhs);
                }
            }
        }
        ObservationPolytope { base: base.to_vec(), free, problem }
    }

    fn d(&self) -> usize {
        self.base.len()
    }

    fn var(&self, k: usize, i: usize) -> usize {
        let f = self.free.iter().position(|&x| x == k).expect("free vertex");
        f * self.d() + i
    }

    fn observation(&self, x: &RVector) -> DiscriminatingObservation {
        let free_weights = self
            .free
            .iter()
            .map(|&k| (k, (0..self.d()).map(|i| x[self.var(k, i)].clone()).collect()))
            .collect();
        DiscriminatingObservation { base_set: self.base.clone(), free_weights }
    }

    fn column(&self, x: &RVector, k: usize) -> Vec<Rational> {
        (0..self.d()).map(|i| x[self.var(k, i)].clone()).collect()
    }

    fn any_point(&self) -> Result<Option<RVector>> {
        Ok(lp_feasible(&self.problem)?.witness().cloned())
    }

    /// A point with `q_k = p`, if any.
    fn point_with_column(&self, k: usize, p: &[Rational]) -> Result<Option<RVector>> {
        let mut lp = self.problem.clone();
        for (i, pi) in p.iter().enumerate() {
            lp.add_eq(RVector::unit(lp.num_vars, self.var(k, i)), pi.clone());
        }
        Ok(lp_feasible(&lp)?.witness().cloned())
    }

    /// A point with `q_k != p`, or `None` when the whole polytope has
    /// `q_k = p`.
    fn point_avoiding_column(&self, k: usize, p: &[Rational]) -> Result<Option<RVector>> {
        for (i, pi) in p.iter().enumerate() {
            let obj = RVector::unit(self.problem.num_vars, self.var(k, i));
            for dir in [Direction::Maximize, Direction::Minimize] {
                match lp_optimize(&self.problem, &obj, dir)? {
                    Optimum::Optimal { point, value } if &value != pi => return Ok(Some(point)),
                    Optimum::Optimal { .. } => {}
                    Optimum::Infeasible(_) => return Ok(None),
                    // q lies in [0, 1]; cone coefficients do not enter the objective.
                    Optimum::Unbounded => unreachable!("bounded objective"),
                }
            }
        }
        Ok(None)
    }
}

fn validate_distribution(p: &[Rational], d: usize) -> Result<()> {
    if p.len() != d {
        return Err(Error::InvalidDistribution(format!("expected {d} entries, got {}", p.len())));
    }
    if p.iter().any(Signed::is_negative) {
        return Err(Error::InvalidDistribution("negative entry".into()));
    }
    let total = p.iter().fold(Rational::zero(), |a, x| a + x);
    if !total.is_one() {
        return Err(Error::InvalidDistribution(format!("entries sum to {}", format_rational(&total))));
    }
    Ok(())
}

fn validate_base_set(s: &SystemSpace, set: &[usize]) -> Result<()> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() || set.is_empty() {
        return Err(Error::InvalidParameter(format!("{set:?} is not a nonempty set of distinct vertices")));
    }
    if !jointly_discriminable(s, set)?.is_discriminable() {
        return Err(Error::NotDiscriminable(set.to_vec()));
    }
    for v in (1..=s.dim()).filter(|v| !set.contains(v)) {
        let mut bigger = set.to_vec();
        bigger.push(v);
        if jointly_discriminable(s, &bigger)?.is_discriminable() {
            return Err(Error::NotMaximal { set: set.to_vec(), extendable_by: v });
        }
    }
    Ok(())
}

/// Decides one formulation of the superposition principle for the outcome
/// distribution `p` over the maximal discriminable set `set`.
pub fn check_superposition(
    s: &SystemSpace,
    set: &[usize],
    p: &[Rational],
    mode: SuperpositionMode,
) -> Result<SuperpositionVerdict> {
    validate_base_set(s, set)?;
    validate_distribution(p, set.len())?;
    let verdict = |outcome| SuperpositionVerdict { mode, outcome };
    if set.len() < 2 {
        return Ok(verdict(SuperpositionOutcome::Vacuous));
    }
    let poly = ObservationPolytope::new(s, set);

    // A point mass delta_{i0} is reproduced by |set[i0]> on every observation.
    if let Some(i0) = p.iter().position(One::is_one) {
        let x = poly.any_point()?.ok_or_else(|| Error::NotDiscriminable(set.to_vec()))?;
        return finish(s, p, mode, SuperpositionOutcome::Holds { observation: poly.observation(&x), vertex: set[i0] });
    }

    let outcome = match mode {
        SuperpositionMode::Ultraweak => {
            let mut found = None;
            for &k in &poly.free {
                if let Some(x) = poly.point_with_column(k, p)? {
                    found = Some(SuperpositionOutcome::Holds { observation: poly.observation(&x), vertex: k });
                    break;
                }
            }
            found.unwrap_or(SuperpositionOutcome::Fails { counterexample: None })
        }
        // A convex polytope covered by finitely many affine slices
        // {q_k = p} lies inside one of them, so "for every observation some
        // vertex works" collapses to "some free vertex works on every
        // observation": weak and strong coincide.
        SuperpositionMode::Weak | SuperpositionMode::Strong => {
            let mut avoiding = Vec::with_capacity(poly.free.len());
            let mut forced = None;
            for &k in &poly.free {
                match poly.point_avoiding_column(k, p)? {
                    Some(x) => avoiding.push((k, x)),
                    None => {
                        forced = Some(k);
                        break;
                    }
                }
            }
            match forced {
                Some(k) => {
                    let x = poly.any_point()?.expect("polytope is nonempty");
                    SuperpositionOutcome::Holds { observation: poly.observation(&x), vertex: k }
                }
                None => {
                    let x = match avoiding.is_empty() {
                        true => poly.any_point()?.expect("polytope is nonempty"),
                        false => avoid_all(&poly, p, &avoiding),
                    };
                    SuperpositionOutcome::Fails { counterexample: Some(poly.observation(&x)) }
                }
            }
        }
    };
    finish(s, p, mode, outcome)
}

/// Convex combination of the per-slice escape points lying outside every
/// slice `{q_k = p}`.
fn avoid_all(poly: &ObservationPolytope, p: &[Rational], avoiding: &[(usize, RVector)]) -> RVector {
    let outside = |x: &RVector, k: usize| poly.column(x, k) != p;
    let mut y = avoiding[0].1.clone();
    for (idx, (k, xk)) in avoiding.iter().enumerate() {
        if outside(&y, *k) {
            continue;
        }
        // The segment y -> xk meets each earlier slice at most once, so one
        // of the first idx + 1 step sizes works.
        y = (2..)
            .map(|n| {
                let t = rat(1, n);
                y.scale(&(Rational::one() - &t)).add(&xk.scale(&t))
            })
            .find(|cand| avoiding[..=idx].iter().all(|(m, _)| outside(cand, *m)))
            .expect("finitely many bad step sizes");
    }
    y
}

/// Re-evaluates the witness or counterexample exactly before returning.
fn finish(
    s: &SystemSpace,
    p: &[Rational],
    mode: SuperpositionMode,
    outcome: SuperpositionOutcome,
) -> Result<SuperpositionVerdict> {
    let inconsistent = |m: &str| Err(Error::InconsistentReport(m.to_string()));
    match &outcome {
        SuperpositionOutcome::Holds { observation, vertex } => {
            observation.validate(s)?;
            if observation.outcomes_on_vertex(*vertex) != p {
                return inconsistent("superposition witness does not reproduce p");
            }
        }
        SuperpositionOutcome::Fails { counterexample: Some(obs) } => {
            obs.validate(s)?;
            if (1..=s.dim()).any(|v| obs.outcomes_on_vertex(v) == p) {
                return inconsistent("counterexample observation is reproduced by a pure state");
            }
        }
        _ => {}
    }
    Ok(SuperpositionVerdict { mode, outcome })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PurificationResult {
    /// Vertex `vertex` of `composite` marginalizes to the state under
    /// `ancilla_effect`.
    Purifiable { composite: String, vertex: usize, ancilla_effect: EffectVector },
    NotPurifiable { scanned: usize },
}

impl PurificationResult {
    pub fn is_purifiable(&self) -> bool {
        matches!(self, PurificationResult::Purifiable { .. })
    }
}

/// Scans every pure state of the declared composite of `rho`'s system with
/// `ancilla` (in either order) for one whose marginal is `rho`.
pub fn check_purification(theory: &Theory, rho: &StateVector, ancilla: &str) -> Result<PurificationResult> {
    let system = theory.system(rho.system())?;
    system.check_state(rho)?;
    if !rho.is_deterministic() {
        return Err(Error::NotDeterministic(format_rational(&rho.norm())));
    }
    let (comp, keep) = match theory.rule_for(system.name(), ancilla) {
        Some(c) => (c, Keep::Left),
        None => match theory.rule_for(ancilla, system.name()) {
            Some(c) => (c, Keep::Right),
            None => {
                return Err(Error::MissingRule { left: system.name().to_string(), right: ancilla.to_string() })
            }
        },
    };
    let rule = comp.rule();
    let ancilla_space = match keep {
        Keep::Left => rule.right(),
        Keep::Right => rule.left(),
    };
    for (k, vertex) in comp.space().vertices().enumerate() {
        if &rule.marginalize(&vertex, keep)? == rho {
            return Ok(PurificationResult::Purifiable {
                composite: comp.name().to_string(),
                vertex: k + 1,
                ancilla_effect: deterministic_effect(ancilla_space)?,
            });
        }
    }
    Ok(PurificationResult::NotPurifiable { scanned: rule.composite_dim() })
}

/// Tries every declared ancilla; the first purification found wins.
pub fn check_purification_any(theory: &Theory, rho: &StateVector) -> Result<PurificationResult> {
    let mut scanned = 0;
    for comp in theory.ancillas_for(rho.system()) {
        let rule = comp.rule();
        let ancilla = if rule.left().name() == rho.system() { rule.right().name() } else { rule.left().name() };
        match check_purification(theory, rho, ancilla)? {
            found @ PurificationResult::Purifiable { .. } => return Ok(found),
            PurificationResult::NotPurifiable { scanned: n } => scanned += n,
        }
    }
    Ok(PurificationResult::NotPurifiable { scanned })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::composition::Block;

    fn bit() -> SystemSpace {
        SystemSpace::full_dual("A", 2).unwrap()
    }

    /// {1, 2} is maximal and the only observation has q_3 = (1, 0).
    fn restricted_trit() -> SystemSpace {
        SystemSpace::restricted(
            "A",
            vec![RVector::from_ints(&[1, 0, 1]), RVector::from_ints(&[0, 1, 0]), RVector::from_ints(&[1, 0, 0])],
        )
        .unwrap()
    }

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

    #[test]
    fn maximal_sets() {
        assert_eq!(maximal_discriminable_set(&SystemSpace::full_dual("A", 3).unwrap()).unwrap(), vec![1, 2, 3]);
        let s = SystemSpace::restricted("A", vec![RVector::from_ints(&[1, 1]), RVector::from_ints(&[1, 0])]).unwrap();
        assert_eq!(maximal_discriminable_set(&s).unwrap(), vec![1]);
        assert!(jointly_discriminable(&s, &[2]).unwrap().is_discriminable());
        assert!(!jointly_discriminable(&s, &[1, 2]).unwrap().is_discriminable());
        assert_eq!(maximal_discriminable_set(&restricted_trit()).unwrap(), vec![1, 2]);
    }

    #[test]
    fn classical_bit_ultraweak_fails() {
        let v = check_superposition(&bit(), &[1, 2], &[rat(1, 2), rat(1, 2)], SuperpositionMode::Ultraweak).unwrap();
        assert_eq!(v.outcome, SuperpositionOutcome::Fails { counterexample: None });
    }

    #[test]
    fn classical_bit_point_mass_strong_holds() {
        let v = check_superposition(&bit(), &[1, 2], &[int(1), int(0)], SuperpositionMode::Strong).unwrap();
        let SuperpositionOutcome::Holds { observation, vertex } = v.outcome else { panic!() };
        assert_eq!(vertex, 1);
        assert!(observation.free_weights.is_empty());
    }

    #[test]
    fn restricted_trit_weak_fails() {
        let s = restricted_trit();
        let v = check_superposition(&s, &[1, 2], &[rat(1, 3), rat(2, 3)], SuperpositionMode::Weak).unwrap();
        let SuperpositionOutcome::Fails { counterexample: Some(obs) } = v.outcome else { panic!("{v:?}") };
        assert_eq!(obs.free_weights[&3], vec![int(1), int(0)]);
    }

    #[test]
    fn forced_column_makes_weak_hold() {
        // The only observation discriminating {1, 2} reads (1/2, 1/2) on |3>.
        let s = SystemSpace::restricted(
            "A",
            vec![
                RVector::new(vec![int(1), int(0), rat(1, 2)]),
                RVector::new(vec![int(0), int(1), rat(1, 2)]),
                RVector::from_ints(&[1, 0, 0]),
            ],
        )
        .unwrap();
        let half = [rat(1, 2), rat(1, 2)];
        for mode in [SuperpositionMode::Weak, SuperpositionMode::Strong, SuperpositionMode::Ultraweak] {
            let v = check_superposition(&s, &[1, 2], &half, mode).unwrap();
            assert!(matches!(v.outcome, SuperpositionOutcome::Holds { vertex: 3, .. }), "{mode}");
        }
        let v = check_superposition(&s, &[1, 2], &[rat(1, 3), rat(2, 3)], SuperpositionMode::Weak).unwrap();
        assert!(v.fails());
    }

    #[test]
    fn superposition_input_errors() {
        assert!(matches!(
            check_superposition(&bit(), &[1, 2], &[rat(1, 2), rat(1, 3)], SuperpositionMode::Weak),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            check_superposition(&bit(), &[1], &[int(1)], SuperpositionMode::Weak),
            Err(Error::NotMaximal { extendable_by: 2, .. })
        ));
        let s = SystemSpace::restricted("A", vec![RVector::from_ints(&[1, 1]), RVector::from_ints(&[1, 0])]).unwrap();
        assert!(matches!(
            check_superposition(&s, &[1, 2], &[rat(1, 2), rat(1, 2)], SuperpositionMode::Weak),
            Err(Error::NotDiscriminable(_))
        ));
        let v = check_superposition(&s, &[1], &[int(1)], SuperpositionMode::Weak).unwrap();
        assert_eq!(v.outcome, SuperpositionOutcome::Vacuous);
    }

    #[test]
    fn toy_purification() {
        let t = toy_theory();
        let a = t.system("A").unwrap();
        match check_purification(&t, &a.vertex(1).unwrap(), "B").unwrap() {
            PurificationResult::Purifiable { vertex, ancilla_effect, .. } => {
                assert!((1..=3).contains(&vertex));
                assert_eq!(ancilla_effect.coords(), &RVector::ones(2));
            }
            other => panic!("{other:?}"),
        }
        let mixed = a.state(RVector::new(vec![rat(1, 2), rat(1, 2)])).unwrap();
        assert_eq!(check_purification(&t, &mixed, "B").unwrap(), PurificationResult::NotPurifiable { scanned: 5 });
        // B appears on the right of AB: marginalize onto the right factor.
        let b = t.system("B").unwrap();
        assert!(check_purification(&t, &b.vertex(2).unwrap(), "A").unwrap().is_purifiable());
    }

    #[test]
    fn purification_errors() {
        let t = toy_theory();
        let a = t.system("A").unwrap();
        let sub = a.state(RVector::new(vec![rat(1, 2), int(0)])).unwrap();
        assert!(matches!(check_purification(&t, &sub, "B"), Err(Error::NotDeterministic(_))));
        assert!(matches!(check_purification(&t, &a.vertex(1).unwrap(), "A"), Err(Error::MissingRule { .. })));
    }
}
