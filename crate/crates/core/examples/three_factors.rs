//! Associativity and discriminability degree for three factors.

use simplicial::analysis::{check_associativity, discriminability_degree, AssociativityResult};
use simplicial::composition::{compose_nfold, CompositionRule};
use simplicial::generate::{random_rule, rng_from_seed};
use simplicial::system::SystemSpace;
use simplicial::theory::Theory;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut t = Theory::new();
    for name in ["A", "B", "C"] {
        t.add_system(SystemSpace::full_dual(name, 2)?)?;
    }
    let mut rng = rng_from_seed(1);
    // (AB)C with an entangled inner pair; A(BC) with products only.
    let ab = random_rule(&mut rng, "AB", t.system("A")?, t.system("B")?, 1, 4)?;
    t.insert_rule(ab, None)?;
    let abc = CompositionRule::product("(AB)C", t.system("AB")?.clone(), t.system("C")?.clone())?;
    t.insert_rule(abc, None)?;
    let bc = CompositionRule::product("BC", t.system("B")?.clone(), t.system("C")?.clone())?;
    t.insert_rule(bc, None)?;
    let a_bc = CompositionRule::product("A(BC)", t.system("A")?.clone(), t.system("BC")?.clone())?;
    t.insert_rule(a_bc, None)?;

    println!("dim (AB)C = {}", compose_nfold(&t, &["A", "B", "C"])?.dim());
    println!("degree of A, B, C: {}", discriminability_degree(&t, &["A", "B", "C"])?);
    match check_associativity(&t, "A", "B", "C")? {
        AssociativityResult::Associative { bijection } => println!("associative via {bijection:?}"),
        AssociativityResult::Mismatch(m) => println!("not associative: {m:?}"),
    }
    Ok(())
}
