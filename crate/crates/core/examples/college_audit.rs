//! Try every way a college could drop applicants from its list, and trace a
//! rejection chain.

use recipmatch::io::read_instance;
use recipmatch::strategy::{audit_market, college_manipulation_audit, rejection_chains, write_audit_csv};
use recipmatch::{
    deferred_acceptance, gen_instance, reciprocating_market, CollegeId, GenConfig, MechanismConfig, Mode,
};

fn main() -> recipmatch::Result<()> {
    let inst = read_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/campus.toml").as_ref())?;
    let config = MechanismConfig::new(Mode::Generalized, 0);
    let east = inst.college_index("east").unwrap();
    let report = college_manipulation_audit(&inst, &inst.student_prefs, &config, east, usize::MAX)?;
    write_audit_csv(&[(0, "east", &report)], std::io::stdout().lock())?;
    println!("profitable for east: {}\n", report.profitable());

    let market = reciprocating_market(&inst, &inst.student_prefs, &config)?;
    let mu = deferred_acceptance(&market);
    let chain = rejection_chains(&market, &mu, east, &mu.students_of(east))?;
    println!("east rejects its admit: chain returns to east: {}", chain.returns_to_c);

    let mut profitable = 0;
    for seed in 0..300 {
        let g = gen_instance(&GenConfig {
            seed,
            ..GenConfig::sized(5, 3)
        })?;
        let mk = reciprocating_market(&g, &g.student_prefs, &MechanismConfig::new(Mode::Generalized, seed))?;
        for c in 0..3 {
            profitable += usize::from(audit_market(&mk, CollegeId(c), usize::MAX)?.profitable());
        }
    }
    println!("random 5x3 markets: {profitable} profitable manipulations out of 900 audits");
    Ok(())
}
