//! Banded bonus tables: every choice inside a band earns the same bonus.

use recipmatch::io::{matching_to_text, read_instance};
use recipmatch::merit::band_bonus;
use recipmatch::{generalized_match, merit_score, BandTable, MechanismConfig, Mode};

fn main() -> recipmatch::Result<()> {
    let bands = BandTable::jupas();
    let h = band_bonus(&bands, &[100.0, 80.0, 60.0, 40.0, 20.0])?;
    for rank in [1, 3, 4, 10, 25] {
        println!(
            "choice {rank:>2}: band {}, bonus {}",
            bands.bands[bands.band_of(rank).unwrap()].label,
            h.get(rank)?
        );
    }
    println!(
        "merit of a 70-point applicant listing the college 2nd, alpha 0.3: {}",
        merit_score(0.3, 70.0, &h, 2)?
    );

    let inst = read_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/banded.toml").as_ref())?;
    let m = generalized_match(&inst, &inst.student_prefs, &MechanismConfig::new(Mode::Generalized, 0))?;
    print!("\n{}", matching_to_text(&m, &inst));
    Ok(())
}
