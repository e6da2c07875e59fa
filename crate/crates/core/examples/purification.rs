//! Purification: pure states purify, mixed states never do.

use simplicial::generate::{generate_toy, DEFAULT_MAX_DEN};
use simplicial::principles::{check_purification, PurificationResult};
use simplicial::{rat, RVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t = generate_toy(2, 3, 2, 11, DEFAULT_MAX_DEN)?;
    let a = t.system("A")?;
    for v in a.vertices() {
        println!("{} -> {}", v.coords(), describe(&check_purification(&t, &v, "B")?));
    }
    let mixed = a.state(RVector::new(vec![rat(1, 3), rat(2, 3)]))?;
    println!("{} -> {}", mixed.coords(), describe(&check_purification(&t, &mixed, "B")?));
    Ok(())
}

fn describe(r: &PurificationResult) -> String {
    match r {
        PurificationResult::Purifiable { composite, vertex, ancilla_effect } => {
            format!("vertex {vertex} of {composite}, discarding with {}", ancilla_effect.coords())
        }
        PurificationResult::NotPurifiable { scanned } => format!("no purification among {scanned} pure states"),
    }
}
