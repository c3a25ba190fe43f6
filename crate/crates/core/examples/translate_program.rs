//! Translate a theory into a normal program and look at where rules come from.

use bq::fixtures;
use bq::program::parse_program;
use bq::translate::{translate, translation_report, TranslateOptions};

fn main() {
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let program = translate(&theory, &TranslateOptions::default()).unwrap();
    let report = translation_report(&program);

    println!("{} rules, {} atoms", program.rules.len(), program.atoms().len());
    for c in report.counts.iter().filter(|c| c.count > 0) {
        println!("  {:>4} {}", c.count, c.category);
    }

    println!("\nrules for close at time 0:");
    for rule in program.rules.iter().filter(|r| r.time() == 0 && r.to_string().contains("close")) {
        println!("  {rule}");
    }
    if let Some(q) = program.q_rules.first() {
        println!("  {q}");
    }

    // Only the numbered rules, with nothing added.
    let literal = translate(&theory, &TranslateOptions::core_only()).unwrap();
    println!("\nnumbered rules only: {} rules", literal.rules.len());

    // The text form parses back to the same program.
    let text = program.to_text();
    assert_eq!(parse_program(&text).unwrap(), program);
    println!("text form: {} lines, round-trips", text.lines().count());
}
