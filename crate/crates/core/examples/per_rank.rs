//! Expected utility by score rank, truthful against strategy S, for a lone
//! deviator.

use recipmatch::harness::{run_per_rank, ExperimentSpec, PerRankMode};

fn main() -> recipmatch::Result<()> {
    let spec = ExperimentSpec {
        seed: 4,
        trials: 1000,
        ..ExperimentSpec::default()
    };
    let out = run_per_rank(&spec, None)?;
    for &beta in &spec.per_rank_betas {
        println!("beta {beta:.1}");
        for rank in 1..=10 {
            let t = out.row(beta, rank, PerRankMode::Truthful).unwrap().utility;
            let s = out.row(beta, rank, PerRankMode::StrategyS).unwrap().utility;
            println!("  rank {rank:>2}: truthful {:>5.2}  strategy S {:>5.2}", t.mean, s.mean);
        }
    }
    Ok(())
}
