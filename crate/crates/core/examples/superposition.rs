//! The three formulations of the superposition principle on a classical bit
//! and on a system whose effects are restricted.

use simplicial::arith::format_rational;
use simplicial::principles::{
    check_superposition, maximal_discriminable_set, DiscriminatingObservation, SuperpositionMode, SuperpositionOutcome,
};
use simplicial::system::SystemSpace;
use simplicial::{rat, RVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bit = SystemSpace::full_dual("A", 2)?;
    let half = [rat(1, 2), rat(1, 2)];
    for mode in [SuperpositionMode::Ultraweak, SuperpositionMode::Weak, SuperpositionMode::Strong] {
        let v = check_superposition(&bit, &[1, 2], &half, mode)?;
        println!("bit, p = (1/2, 1/2), {mode}: {}", describe(&v.outcome));
    }

    // Vertices 1 and 2 are discriminable, vertex 3 is not; every admissible
    // observation reads (1, 0) on |3>.
    let trit = SystemSpace::restricted(
        "T",
        vec![RVector::from_ints(&[1, 0, 1]), RVector::from_ints(&[0, 1, 0]), RVector::from_ints(&[1, 0, 0])],
    )?;
    let set = maximal_discriminable_set(&trit)?;
    let p = [rat(1, 3), rat(2, 3)];
    let v = check_superposition(&trit, &set, &p, SuperpositionMode::Weak)?;
    println!("restricted trit over {set:?}, p = (1/3, 2/3), weak: {}", describe(&v.outcome));
    Ok(())
}

fn columns(o: &DiscriminatingObservation) -> String {
    if o.free_weights.is_empty() {
        return "the unique observation".into();
    }
    let cols: Vec<String> = o
        .free_weights
        .iter()
        .map(|(k, q)| format!("q_{k} = ({})", q.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
        .collect();
    cols.join(", ")
}

fn describe(outcome: &SuperpositionOutcome) -> String {
    match outcome {
        SuperpositionOutcome::Vacuous => "vacuous".into(),
        SuperpositionOutcome::Holds { observation, vertex } => {
            format!("holds with |{vertex}> on {}", columns(observation))
        }
        SuperpositionOutcome::Fails { counterexample: None } => "fails: no pure state on any observation".into(),
        SuperpositionOutcome::Fails { counterexample: Some(o) } => {
            format!("fails: no pure state reproduces p on {}", columns(o))
        }
    }
}
