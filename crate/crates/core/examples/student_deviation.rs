//! A student can gain by promoting a safer college when its score edge over a
//! rival is below the deviation threshold.

use recipmatch::strategy::{deviation_threshold, deviation_witness};
use recipmatch::{BonusFunction, MechanismConfig, Mode};

fn main() -> recipmatch::Result<()> {
    let h = BonusFunction::linear(110.0, 10.0, 2);
    let config = MechanismConfig::new(Mode::Generalized, 0);
    for eps in [0.1, 0.5, 0.9] {
        let delta = deviation_threshold(eps, &h)?;
        println!("epsilon {eps}: threshold {delta:.2}");
        for gap in [0.5 * delta, 2.0 * delta] {
            let f2 = 5.0;
            if f2 + gap > 100.0 {
                continue;
            }
            let out = deviation_witness(eps, f2 + gap, f2, h.clone(), &config)?;
            println!(
                "  gap {gap:>6.2}: truthful rank {:?}, after swap {:?}, pays: {}",
                out.truthful_rank,
                out.deviating_rank,
                out.deviation_pays()
            );
        }
    }
    Ok(())
}
