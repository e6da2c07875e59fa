//! Acceptance battery. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process exits non-zero
//! if any criterion fails. All comparisons are exact.

mod common;

use std::time::Instant;

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{dot, marginal_oracle, partition_violation, product_oracle, toy};
use simplicial::analysis::{
    check_atomicity, check_causality, check_classicality, discriminability_degree, entanglement_present,
    is_separable, separable_by_lp,
};
use simplicial::composition::{CompositionRule, Keep};
use simplicial::generate::{
    generate_ct, generate_random, generate_toy, random_box_vector, random_distribution, random_nonclassical_system,
    random_restricted_system, random_rule, rng_from_seed, DEFAULT_MAX_DEN,
};
use simplicial::io::{parse_theory, serialize_theory};
use simplicial::principles::{
    check_purification, check_superposition, maximal_discriminable_set, SuperpositionMode, SuperpositionOutcome,
};
use simplicial::report::ReportDocument;
use simplicial::system::{classify_state, pair, StateClass, SystemSpace};
use simplicial::theory::Theory;
use simplicial::{RVector, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: simplicial::Error) -> String {
    e.to_string()
}

fn full_dual(name: &str, dim: usize) -> SystemSpace {
    SystemSpace::full_dual(name, dim).expect("valid dimension")
}

fn is_point_mass(p: &[Rational]) -> bool {
    p.iter().any(One::is_one)
}

/// Non-point-mass distribution on `n >= 2` outcomes.
fn mixed_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let p = random_distribution(rng, n, DEFAULT_MAX_DEN);
        if !is_point_mass(&p) {
            return p;
        }
    }
}

/// Two factor systems, possibly restricted, and a rule with excess `delta`.
fn battery_theory(rng: &mut ChaCha8Rng, n: usize) -> Result<Theory, String> {
    let da = rng.gen_range(1..=4);
    let db = rng.gen_range(1..=4);
    let delta = if n.is_multiple_of(2) { 0 } else { rng.gen_range(1..=4) };
    let make = |rng: &mut ChaCha8Rng, name: &str, d: usize| {
        if d >= 2 && rng.gen_bool(0.3) {
            random_restricted_system(rng, name, d, 8)
        } else {
            SystemSpace::full_dual(name, d)
        }
    };
    let a = make(rng, "A", da).map_err(e2s)?;
    let b = make(rng, "B", db).map_err(e2s)?;
    let rule = random_rule(rng, "AB", &a, &b, delta, DEFAULT_MAX_DEN).map_err(e2s)?;
    let mut t = Theory::new();
    t.add_system(a).map_err(e2s)?;
    t.add_system(b).map_err(e2s)?;
    t.insert_rule(rule, None).map_err(e2s)?;
    Ok(t)
}

fn battery() -> Result<Vec<Theory>, String> {
    let mut rng = rng_from_seed(2024);
    (0..200).map(|n| battery_theory(&mut rng, n)).collect()
}

fn rule_of(t: &Theory) -> &CompositionRule {
    t.composites()[0].rule()
}

fn criterion_1() -> Outcome {
    let mut rng = rng_from_seed(1);
    let (mut full, mut cones) = (0, 0);
    for n in 0..200 {
        let s = if n % 2 == 0 {
            full += 1;
            full_dual("S", rng.gen_range(1..=8))
        } else {
            cones += 1;
            let d = rng.gen_range(2..=6);
            random_restricted_system(&mut rng, "S", d, DEFAULT_MAX_DEN).map_err(e2s)?
        };
        let e = check_causality(&s).map_err(|e| format!("system {n}: {e}"))?.deterministic_effect;
        for v in s.vertices() {
            ensure(pair(&e, &v).map_err(e2s)?.is_one(), || format!("system {n}: e is not 1 on {}", v.coords()))?;
        }
        if s.is_full_dual() {
            ensure(e.coords() == &RVector::ones(s.dim()), || format!("system {n}: e != all-ones"))?;
        }
    }
    Ok(format!("{full} full-dual and {cones} restricted systems have a unique deterministic effect"))
}

fn criterion_2(theories: &[Theory]) -> Outcome {
    let mut entangled = 0;
    for (n, t) in theories.iter().enumerate() {
        let rule = rule_of(t);
        let ent = entanglement_present(rule).map_err(e2s)?.present;
        let excess = rule.excess_dimension() > 0;
        let degree = discriminability_degree(t, &["A", "B"]).map_err(e2s)?;
        ensure(ent == excess && excess == (degree == 2), || {
            format!("rule {n}: entangled {ent}, excess {}, degree {degree}", rule.excess_dimension())
        })?;
        entangled += usize::from(ent);
    }
    Ok(format!("{} rules ({entangled} entangled): entanglement <=> excess > 0 <=> degree 2", theories.len()))
}

fn criterion_3(theories: &[Theory]) -> Outcome {
    for (n, t) in theories.iter().enumerate() {
        let rule = rule_of(t);
        let ent = entanglement_present(rule).map_err(e2s)?.present;
        let atomic = check_atomicity(rule).atomic;
        ensure(ent != atomic, || format!("rule {n}: entangled {ent}, atomic {atomic}"))?;
    }
    Ok(format!("{} rules: entanglement <=> atomicity fails", theories.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = rng_from_seed(4);
    let (mut states, mut separable, mut rules) = (0, 0, 0);
    for n in 0..120 {
        let a = full_dual("A", rng.gen_range(1..=3));
        let b = full_dual("B", rng.gen_range(1..=3));
        let delta = rng.gen_range(0..=3);
        let rule = random_rule(&mut rng, "AB", &a, &b, delta, DEFAULT_MAX_DEN).map_err(e2s)?;
        rules += 1;
        let space = SystemSpace::full_dual("AB", rule.composite_dim()).map_err(e2s)?;
        let mut omegas = Vec::new();
        for v in space.vertices().take(3) {
            omegas.push(v.coords().clone());
        }
        for _ in 0..3 {
            let rho = random_distribution(&mut rng, a.dim(), DEFAULT_MAX_DEN);
            let sigma = random_distribution(&mut rng, b.dim(), DEFAULT_MAX_DEN);
            omegas.push(RVector::new(product_oracle(&rule, &rho, &sigma)));
        }
        for _ in 0..2 {
            // Convex mixtures of products are separable by construction.
            let mix = random_distribution(&mut rng, a.dim() * b.dim(), DEFAULT_MAX_DEN);
            let mut acc = vec![Rational::zero(); rule.composite_dim()];
            for (idx, w) in mix.iter().enumerate() {
                let rho = RVector::unit(a.dim(), idx / b.dim());
                let sigma = RVector::unit(b.dim(), idx % b.dim());
                for (x, y) in acc.iter_mut().zip(product_oracle(&rule, &rho, &sigma)) {
                    *x += w * y;
                }
            }
            omegas.push(RVector::new(acc));
        }
        for _ in 0..2 {
            omegas.push(random_distribution(&mut rng, rule.composite_dim(), DEFAULT_MAX_DEN).into());
        }
        for coords in omegas {
            let omega = space.state(coords).map_err(e2s)?;
            let closed = is_separable(&rule, &omega).map_err(e2s)?;
            let lp = separable_by_lp(&rule, &omega).map_err(e2s)?;
            ensure(closed.is_separable() == lp.is_feasible(), || {
                format!("rule {n}: closed form {} vs LP {} at {}", closed.is_separable(), lp.is_feasible(), omega.coords())
            })?;
            if let Some(rebuilt) = closed.reconstruct(&rule) {
                let rebuilt = rebuilt.map_err(e2s)?;
                ensure(rebuilt.coords() == omega.coords(), || format!("rule {n}: lambda does not rebuild omega"))?;
                separable += 1;
            }
            states += 1;
        }
    }
    ensure(states >= 1000, || format!("only {states} states"))?;
    Ok(format!("{states} states over {rules} rules agree ({separable} separable, all rebuilt exactly)"))
}

fn criterion_5(theories: &[Theory]) -> Outcome {
    for (n, t) in theories.iter().enumerate() {
        if let Some(v) = partition_violation(rule_of(t)) {
            return Err(format!("rule {n}: {v}"));
        }
    }
    let mut rng = rng_from_seed(5);
    for q in 0..1000 {
        let t = &theories[q % theories.len()];
        let rule = rule_of(t);
        let (a, b) = (rule.left(), rule.right());
        let rho = a.state(random_distribution(&mut rng, a.dim(), DEFAULT_MAX_DEN).into()).map_err(e2s)?;
        let sigma = b.state(random_distribution(&mut rng, b.dim(), DEFAULT_MAX_DEN).into()).map_err(e2s)?;
        // Effects: the full box on full-dual systems, scaled generators otherwise.
        let effect = |rng: &mut ChaCha8Rng, s: &SystemSpace| {
            let coords = match s.effect_model() {
                simplicial::system::EffectModel::FullDual => random_box_vector(rng, s.dim(), DEFAULT_MAX_DEN),
                simplicial::system::EffectModel::RestrictedCone { generators } => {
                    generators[rng.gen_range(0..generators.len())].clone()
                }
            };
            s.effect(coords)
        };
        let ea = effect(&mut rng, a).map_err(e2s)?;
        let eb = effect(&mut rng, b).map_err(e2s)?;
        let omega = rule.compose_states(&rho, &sigma).map_err(e2s)?;
        let ab = rule.compose_effects(&ea, &eb).map_err(e2s)?;
        ensure(omega.coords().entries() == &product_oracle(rule, rho.coords(), sigma.coords())[..], || {
            format!("quadruple {q}: product state differs from block expansion")
        })?;
        let lhs = pair(&ab, &omega).map_err(e2s)?;
        let rhs = dot(ea.coords(), rho.coords()) * dot(eb.coords(), sigma.coords());
        ensure(lhs == rhs, || format!("quadruple {q}: <a b|rho sigma> = {lhs} but <a|rho><b|sigma> = {rhs}"))?;
    }
    Ok(format!("{} rules are valid partitions; pairing factorizes on 1000 quadruples", theories.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(6);
    let mut classical_checks = 0;
    for d in 2..=6 {
        let s = full_dual("A", d);
        let set: Vec<usize> = (1..=d).collect();
        for _ in 0..50 {
            let p = mixed_distribution(&mut rng, d);
            let v = check_superposition(&s, &set, &p, SuperpositionMode::Ultraweak).map_err(e2s)?;
            ensure(v.fails(), || format!("full dual D={d}: ultraweak holds for {p:?}"))?;
            classical_checks += 1;
        }
    }
    let mut restricted_checks = 0;
    for n in 0..20 {
        let s = random_nonclassical_system(&mut rng, "A", 8).map_err(e2s)?;
        let set = maximal_discriminable_set(&s).map_err(e2s)?;
        ensure(set.len() >= 2 && set.len() < s.dim(), || format!("system {n}: trivial complement"))?;
        for _ in 0..10 {
            let p = mixed_distribution(&mut rng, set.len());
            let v = check_superposition(&s, &set, &p, SuperpositionMode::Weak).map_err(e2s)?;
            let SuperpositionOutcome::Fails { counterexample: Some(obs) } = &v.outcome else {
                return Err(format!("system {n}: weak does not fail for {p:?}: {v:?}"));
            };
            obs.validate(&s).map_err(e2s)?;
            // Re-evaluate every pure state on the counterexample observation.
            let effects = obs.effects(&s);
            for vertex in s.vertices() {
                let outcomes: Vec<Rational> = effects.iter().map(|a| pair(a, &vertex).unwrap()).collect();
                ensure(outcomes != p, || format!("system {n}: counterexample reproduced by {}", vertex.coords()))?;
            }
            restricted_checks += 1;
        }
        for i0 in 0..set.len() {
            let mut p = vec![Rational::zero(); set.len()];
            p[i0] = Rational::one();
            let v = check_superposition(&s, &set, &p, SuperpositionMode::Weak).map_err(e2s)?;
            let SuperpositionOutcome::Holds { observation, vertex } = &v.outcome else {
                return Err(format!("system {n}: point mass {i0} does not hold"));
            };
            let state = s.vertex(*vertex).map_err(e2s)?;
            let outcomes: Vec<Rational> =
                observation.effects(&s).iter().map(|a| pair(a, &state).unwrap()).collect();
            ensure(outcomes == p, || format!("system {n}: point-mass witness does not re-evaluate"))?;
        }
    }
    Ok(format!(
        "ultraweak fails on {classical_checks} full-dual instances; weak fails on {restricted_checks} restricted instances; point masses hold"
    ))
}

fn entangled_theories() -> Result<Vec<Theory>, String> {
    let mut out = Vec::new();
    for seed in 0..30 {
        let (da, db) = (2 + (seed % 3) as usize, 2 + (seed / 3 % 3) as usize);
        out.push(generate_toy(da, db, 1 + (seed % 4) as usize, seed, DEFAULT_MAX_DEN).map_err(e2s)?);
    }
    for seed in 0..60 {
        let t = generate_random(seed, DEFAULT_MAX_DEN).map_err(e2s)?;
        if t.composites().iter().any(|c| c.rule().excess_dimension() > 0) {
            out.push(t);
        }
    }
    Ok(out)
}

fn criterion_7() -> Outcome {
    let theories = entangled_theories()?;
    let mut rng = rng_from_seed(7);
    let (mut mixed, mut pure) = (0, 0);
    for (n, t) in theories.iter().enumerate() {
        for comp in t.composites() {
            let rule = comp.rule();
            for (s, ancilla, keep) in [(rule.left(), rule.right(), Keep::Left), (rule.right(), rule.left(), Keep::Right)] {
                if s.name() == ancilla.name() {
                    continue;
                }
                for v in s.vertices() {
                    let result = check_purification(t, &v, ancilla.name()).map_err(e2s)?;
                    let simplicial::principles::PurificationResult::Purifiable { vertex, .. } = result else {
                        return Err(format!("theory {n}: vertex {} of {} not purifiable", v.coords(), s.name()));
                    };
                    let omega = RVector::unit(rule.composite_dim(), vertex - 1);
                    ensure(marginal_oracle(rule, &omega, keep) == v.coords().entries(), || {
                        format!("theory {n}: witness {vertex} does not marginalize to {}", v.coords())
                    })?;
                    pure += 1;
                }
                if s.dim() < 2 {
                    continue;
                }
                for _ in 0..4 {
                    let rho = s.state(mixed_distribution(&mut rng, s.dim()).into()).map_err(e2s)?;
                    ensure(classify_state(&rho) == StateClass::DeterministicMixed, || "sampler bug".into())?;
                    let result = check_purification(t, &rho, ancilla.name()).map_err(e2s)?;
                    ensure(!result.is_purifiable(), || {
                        format!("theory {n}: mixed {} of {} purified by {}", rho.coords(), s.name(), ancilla.name())
                    })?;
                    mixed += 1;
                }
            }
        }
    }
    ensure(mixed >= 500, || format!("only {mixed} mixed states sampled"))?;
    Ok(format!("{} theories: {mixed} mixed states not purifiable, {pure} vertices purified exactly", theories.len()))
}

fn criterion_8() -> Outcome {
    let t = generate_ct(&[2, 2]).map_err(e2s)?;
    let rule = t.composite("AB").map_err(e2s)?.rule();
    ensure(rule.excess_dimension() == 0, || "excess is not 0".into())?;
    ensure(!entanglement_present(rule).map_err(e2s)?.present, || "CT has entanglement".into())?;
    for name in ["A", "B", "AB"] {
        let s = t.system(name).map_err(e2s)?;
        ensure(check_classicality(s).map_err(e2s)?.is_discriminable(), || format!("{name} not classical"))?;
    }
    let a = t.system("A").map_err(e2s)?;
    let mut rng = rng_from_seed(8);
    for _ in 0..20 {
        let p = mixed_distribution(&mut rng, 2);
        let v = check_superposition(a, &[1, 2], &p, SuperpositionMode::Weak).map_err(e2s)?;
        ensure(v.fails(), || format!("weak holds for {p:?}"))?;
        let rho = a.state(p.clone().into()).map_err(e2s)?;
        ensure(!check_purification(&t, &rho, "B").map_err(e2s)?.is_purifiable(), || format!("{p:?} purified"))?;
    }
    for p in [[Rational::one(), Rational::zero()], [Rational::zero(), Rational::one()]] {
        let v = check_superposition(a, &[1, 2], &p, SuperpositionMode::Weak).map_err(e2s)?;
        ensure(v.holds(), || format!("weak fails for point mass {p:?}"))?;
    }
    Ok("CT(2,2): classical, no entanglement, excess 0, weak only for point masses, no mixed purification".into())
}

fn criterion_9() -> Outcome {
    let golden = include_str!("golden/toy_report.json");
    let doc = ReportDocument::build(&toy()).map_err(e2s)?;
    let json = doc.to_json();
    ensure(json == golden, || "report JSON differs from the golden file".into())?;
    ensure(ReportDocument::build(&toy()).map_err(e2s)?.to_json() == json, || "report is not deterministic".into())?;
    let ab = doc.composites.iter().find(|c| c.composite == "AB").ok_or("no AB")?;
    let w = ab.entanglement_witness.as_ref().ok_or("no witness")?;
    ensure(
        ab.excess_dimension == 1
            && w.vertex == 1
            && !ab.atomic_composition
            && ab.discriminability_degree == 2
            && w.marginal_left == ["1", "0"],
        || format!("unexpected toy-theory values: {ab:?}"),
    )?;
    Ok("toy report is byte-identical to the golden file (excess 1, witness 1, non-atomic, degree 2, marginal |1>)".into())
}

fn criterion_10() -> Outcome {
    for n in 0..100u64 {
        let t = match n % 3 {
            0 => generate_random(n, DEFAULT_MAX_DEN),
            1 => generate_toy(1 + (n % 4) as usize, 1 + (n % 3) as usize, 1 + (n % 5) as usize, n, DEFAULT_MAX_DEN),
            _ => generate_ct(&(0..1 + n % 4).map(|k| 1 + ((n + k) % 4) as usize).collect::<Vec<_>>()),
        }
        .map_err(e2s)?;
        let canonical = serialize_theory(&t);
        let reparsed = parse_theory(&canonical).map_err(|e| format!("file {n}: {e}"))?;
        ensure(serialize_theory(&reparsed) == canonical, || format!("file {n}: round trip changed bytes"))?;
        ensure(reparsed == t, || format!("file {n}: round trip changed the theory"))?;
    }
    Ok("100 canonical generated files round-trip byte-exactly".into())
}

fn main() {
    let start = Instant::now();
    let theories = battery();
    let with_battery = |f: fn(&[Theory]) -> Outcome| -> Outcome {
        match &theories {
            Ok(t) => f(t),
            Err(e) => Err(format!("battery generation failed: {e}")),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("causality", criterion_1()),
        ("entanglement, excess and degree", with_battery(criterion_2)),
        ("entanglement and atomicity", with_battery(criterion_3)),
        ("separability oracles", criterion_4()),
        ("block structure and pairing", with_battery(criterion_5)),
        ("no superposition", criterion_6()),
        ("no purification", criterion_7()),
        ("classical regression", criterion_8()),
        ("toy golden report", criterion_9()),
        ("round trip", criterion_10()),
    ];
    let mut failed = 0;
    for (n, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
