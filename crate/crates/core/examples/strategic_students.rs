//! Fully correlated preferences: what strategy S earns as more students use it.

use recipmatch::harness::{run_strategy_count, ExperimentSpec, StrategicSelection};

fn main() -> recipmatch::Result<()> {
    for selection in [StrategicSelection::Random, StrategicSelection::Lowest] {
        let spec = ExperimentSpec {
            seed: 3,
            trials: 1000,
            strategic_selection: selection,
            ..ExperimentSpec::default()
        };
        let out = run_strategy_count(&spec, None)?;
        println!("{selection:?} selection");
        println!(
            "{:>3} {:>10} {:>10} {:>6} {:>9} {:>9}",
            "k", "strategic", "truthful", "piS", "piC sub", "piC true"
        );
        for r in &out.rows {
            let show =
                |s: Option<recipmatch::harness::Summary>| s.map_or("-".to_string(), |s| format!("{:.3}", s.mean));
            println!(
                "{:>3} {:>10} {:>10} {:>6.1} {:>9.3} {:>9.3}",
                r.k,
                show(r.u_strategic),
                show(r.u_truthful),
                r.pi_s.mean,
                r.pi_c_submitted.mean,
                r.pi_c_true.mean
            );
        }
        println!();
    }
    Ok(())
}
