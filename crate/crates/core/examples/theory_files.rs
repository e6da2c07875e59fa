//! Generate a theory, write it as canonical JSON, read it back and report.

use simplicial::generate::generate_random;
use simplicial::io::{parse_theory, serialize_theory};
use simplicial::report::ReportDocument;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let theory = generate_random(seed, 8)?;
    let text = serialize_theory(&theory);
    println!("{text}");
    let reparsed = parse_theory(&text)?;
    assert_eq!(serialize_theory(&reparsed), text);
    print!("{}", ReportDocument::build(&reparsed)?.to_text());
    Ok(())
}
