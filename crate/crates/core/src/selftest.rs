//! A quick property battery over seeded random theories.

use num_traits::One;

use crate::analysis::{check_causality, is_separable, separable_by_lp, AnalysisReport};
use crate::arith::RVector;
use crate::error::Result;
use crate::generate::{generate_random, random_distribution, rng_from_seed};
use crate::principles::{check_purification, check_superposition, SuperpositionMode};
use crate::system::StateVector;
use crate::theory::Theory;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckLine {
    fn new(name: &'static str) -> Self {
        CheckLine { name, checked: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every check on `count` theories drawn from seeds `seed..seed + count`.
pub fn run_selftest(seed: u64, count: u64, max_den: u32) -> Result<Vec<CheckLine>> {
    let mut causality = CheckLine::new("deterministic effect exists and is unique");
    let mut equivalences = CheckLine::new("entanglement <=> excess > 0 <=> non-atomic <=> degree 2");
    let mut separability = CheckLine::new("closed-form separability agrees with the LP");
    let mut purification = CheckLine::new("mixed states have no purification, vertices do");
    let mut superposition = CheckLine::new("full-dual systems fail ultraweak superposition");

    for s in seed..seed + count {
        let theory = generate_random(s, max_den)?;
        let mut rng = rng_from_seed(s ^ 0x5eed);
        for space in theory.all_spaces() {
            let ok = match check_causality(space) {
                Ok(c) => !space.is_full_dual() || c.deterministic_effect.coords() == &RVector::ones(space.dim()),
                Err(_) => false,
            };
            causality.record(ok, || format!("seed {s}: system {}", space.name()));
        }
        for comp in theory.composites() {
            equivalences.record(AnalysisReport::for_composite(&theory, comp.name()).is_ok(), || {
                format!("seed {s}: composite {}", comp.name())
            });
            let rule = comp.rule();
            let mut states: Vec<StateVector> = comp.space().vertices().collect();
            states.push(comp.space().state(random_distribution(&mut rng, rule.composite_dim(), max_den).into())?);
            for omega in states {
                let closed = is_separable(rule, &omega)?.is_separable();
                let lp = separable_by_lp(rule, &omega)?.is_feasible();
                separability.record(closed == lp, || format!("seed {s}: {} at {}", comp.name(), omega.coords()));
            }
        }
        check_purifications(&theory, s, &mut purification)?;
        for space in theory.systems().iter().filter(|x| x.is_full_dual() && x.dim() >= 2) {
            let set: Vec<usize> = (1..=space.dim()).collect();
            let p = random_distribution(&mut rng, space.dim(), max_den);
            if p.iter().any(One::is_one) {
                continue;
            }
            let v = check_superposition(space, &set, &p, SuperpositionMode::Ultraweak)?;
            superposition.record(v.fails(), || format!("seed {s}: system {}", space.name()));
        }
    }
    Ok(vec![causality, equivalences, separability, purification, superposition])
}

fn check_purifications(theory: &Theory, seed: u64, line: &mut CheckLine) -> Result<()> {
    for space in theory.systems() {
        for comp in theory.ancillas_for(space.name()) {
            let rule = comp.rule();
            let ancilla = if rule.left().name() == space.name() { rule.right().name() } else { rule.left().name() };
            for v in space.vertices() {
                let ok = check_purification(theory, &v, ancilla)?.is_purifiable();
                line.record(ok, || format!("seed {seed}: vertex {} of {} via {ancilla}", v.coords(), space.name()));
            }
            if space.dim() >= 2 {
                let uniform = space.state(RVector::new(vec![crate::arith::rat(1, space.dim() as i64); space.dim()]))?;
                let ok = !check_purification(theory, &uniform, ancilla)?.is_purifiable();
                line.record(ok, || format!("seed {seed}: uniform state of {} via {ancilla}", space.name()));
            }
        }
    }
    Ok(())
}
