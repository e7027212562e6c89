//! Load an instance file and match it under the three modes.
//!
//! cargo run --example solve_instance [path/to/instance.toml]

use std::path::PathBuf;

use recipmatch::io::{matching_to_text, read_instance};
use recipmatch::{generalized_match, reciprocating_market, MechanismConfig, Mode};

fn main() -> recipmatch::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/campus.toml")));
    let inst = read_instance(&path)?;

    let config = MechanismConfig::new(Mode::Generalized, 0);
    let market = reciprocating_market(&inst, &inst.student_prefs, &config)?;
    println!("reciprocating preferences:");
    for (c, list) in inst.colleges.iter().zip(&market.college_prefs) {
        let names: Vec<&str> = list.iter().map(|s| inst.students[s.index()].id.as_str()).collect();
        println!("  {:<6} (alpha {:.1}): {}", c.id, c.alpha, names.join(" > "));
    }

    for mode in [Mode::Generalized, Mode::PureDa, Mode::PureBm] {
        let m = generalized_match(&inst, &inst.student_prefs, &MechanismConfig::new(mode, 0))?;
        println!("\n{mode:?}\n{}", matching_to_text(&m, &inst).trim_end());
    }
    Ok(())
}
