//! Enumerate every stable matching of a small market and inspect blocking
//! pairs of an unstable one.

use recipmatch::io::{college_names, parse_matching, read_instance, student_names};
use recipmatch::stability::write_blocking_pairs_csv;
use recipmatch::{
    blocking_pairs, deferred_acceptance, enumerate_stable, is_student_optimal, reciprocating_market, MechanismConfig,
    Mode,
};

fn main() -> recipmatch::Result<()> {
    let inst = read_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/campus.toml").as_ref())?;
    let market = reciprocating_market(&inst, &inst.student_prefs, &MechanismConfig::new(Mode::Generalized, 0))?;

    let stable = enumerate_stable(&market)?;
    let da = deferred_acceptance(&market);
    println!(
        "{} stable matching(s); DA output student-optimal: {}",
        stable.len(),
        is_student_optimal(&da, &stable, &market)?
    );

    // Boston's outcome on the same lists is not stable.
    let bm = parse_matching("ana,north\nben,-\nchloe,east\ndev,west\n", &inst)?;
    let pairs = blocking_pairs(&bm, &market);
    println!("\nblocking pairs of the Boston outcome:");
    write_blocking_pairs_csv(
        &pairs,
        &student_names(&inst),
        &college_names(&inst),
        std::io::stdout().lock(),
    )
}
