//! Student, college and total welfare as preferences become correlated.

use recipmatch::harness::{run_welfare_sweep, write_welfare_csv, ExperimentSpec};

fn main() -> recipmatch::Result<()> {
    let spec = ExperimentSpec {
        seed: 1,
        trials: 300,
        beta_step: 0.1,
        ..ExperimentSpec::default()
    };
    let out = run_welfare_sweep(&spec, None)?;
    println!("{:>5} {:>7} {:>7} {:>7} {:>7}", "beta", "mech", "piS", "piC", "Pi");
    for r in &out.rows {
        println!(
            "{:>5.1} {:>7} {:>7.2} {:>7.2} {:>7.2}",
            r.beta, r.mechanism, r.pi_s.mean, r.pi_c.mean, r.pi.mean
        );
    }
    write_welfare_csv(&out.rows, std::io::sink())
}
