//! A classical theory with entanglement: two bits whose composite has one
//! extra pure state refining |1>|1>.

use simplicial::analysis::{entanglement_present, is_separable, separable_by_lp, AnalysisReport, SeparabilityCertificate};
use simplicial::arith::format_rational;
use simplicial::composition::{Block, Keep};
use simplicial::system::SystemSpace;
use simplicial::theory::Theory;
use simplicial::{rat, RVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut t = Theory::new();
    t.add_system(SystemSpace::full_dual("A", 2)?)?;
    t.add_system(SystemSpace::full_dual("B", 2)?)?;
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
    )?;
    let ab = t.composite("AB")?;
    let rule = ab.rule();
    println!("excess dimension: {}", rule.excess_dimension());

    let a = t.system("A")?;
    let b = t.system("B")?;
    let plus = b.state(RVector::new(vec![rat(1, 2), rat(1, 2)]))?;
    let product = rule.compose_states(&a.vertex(1)?, &plus)?;
    println!("|1>_A x (1/2, 1/2)_B = {}", product.coords());

    let ent = entanglement_present(rule)?;
    let v = ab.space().vertex(ent.witness.expect("entangled"))?;
    if let SeparabilityCertificate::Entangled { block, indices, ratios } = is_separable(rule, &v)? {
        println!(
            "vertex {} is entangled: in block {block:?}, omega_k / p_k is {} at vertex {} but {} at vertex {}",
            ent.witness.unwrap(),
            format_rational(&ratios.0),
            indices.0,
            format_rational(&ratios.1),
            indices.1
        );
    }
    println!("LP agrees: separable = {}", separable_by_lp(rule, &v)?.is_feasible());
    println!("its marginal on A: {}", rule.marginalize(&v, Keep::Left)?.coords());

    let report = AnalysisReport::for_composite(&t, "AB")?;
    println!(
        "atomic: {}, local discriminability: {}, degree: {}",
        report.atomic_composition.atomic, report.local_discriminability, report.discriminability_degree
    );
    Ok(())
}
