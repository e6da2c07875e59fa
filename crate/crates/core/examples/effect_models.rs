//! Causality and classicality under full and restricted effect models.

use simplicial::analysis::{check_causality, check_classicality, jointly_discriminable};
use simplicial::principles::maximal_discriminable_set;
use simplicial::system::{cone_membership_problem, is_effect, EffectMembership, EffectModel, SystemSpace};
use simplicial::RVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trit = SystemSpace::full_dual("T", 3)?;
    println!("trit: e = {}", check_causality(&trit)?.deterministic_effect.coords());
    println!("trit classical: {}", check_classicality(&trit)?.is_discriminable());

    // Effects restricted to the cone spanned by (1, 1) and (1, 0).
    let cone = SystemSpace::restricted("R", vec![RVector::from_ints(&[1, 1]), RVector::from_ints(&[1, 0])])?;
    println!("cone: e = {}", check_causality(&cone)?.deterministic_effect.coords());
    for v in [RVector::from_ints(&[1, 0]), RVector::from_ints(&[0, 1])] {
        match is_effect(&cone, &v)? {
            EffectMembership::InCone(coeffs) => println!("{v} = cone combination with coefficients {coeffs}"),
            EffectMembership::OutsideCone(cert) => {
                let (row, rhs) = cert.combination(&cone_membership_problem(generators(&cone), &v));
                println!("{v} is not an effect: {row} . c = {rhs} has no solution c >= 0");
            }
            other => println!("{v}: {other:?}"),
        }
    }
    println!("{{1, 2}} discriminable: {}", jointly_discriminable(&cone, &[1, 2])?.is_discriminable());
    println!("greedy maximal discriminable set: {:?}", maximal_discriminable_set(&cone)?);
    Ok(())
}

fn generators(s: &SystemSpace) -> &[RVector] {
    match s.effect_model() {
        EffectModel::RestrictedCone { generators } => generators,
        EffectModel::FullDual => &[],
    }
}
