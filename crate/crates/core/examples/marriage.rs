//! One-to-one matching where both sides reward suitors who ranked them highly.

use recipmatch::marriage::{marriage_match, MarriageProblem, Proposer, Side};
use recipmatch::{BonusFunction, CollegeId, PreferenceList, StudentId};

fn main() -> recipmatch::Result<()> {
    let h = BonusFunction::linear(110.0, 10.0, 3);
    let men: Vec<PreferenceList<CollegeId>> = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
        .iter()
        .map(|l| l.iter().map(|&w| CollegeId(w)).collect())
        .collect();
    let women: Vec<PreferenceList<StudentId>> = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
        .iter()
        .map(|l| l.iter().map(|&m| StudentId(m)).collect())
        .collect();
    let ratings = |lists: &[[usize; 3]]| -> Vec<Vec<f64>> {
        lists
            .iter()
            .map(|l| {
                let mut r = vec![0.0; 3];
                for (pos, &j) in l.iter().enumerate() {
                    r[j] = 90.0 - 10.0 * pos as f64;
                }
                r
            })
            .collect()
    };
    let men_r = ratings(&[[0, 1, 2], [1, 2, 0], [2, 0, 1]]);
    let women_r = ratings(&[[1, 2, 0], [2, 0, 1], [0, 1, 2]]);

    for alpha in [0.0, 0.5, 1.0] {
        let p = MarriageProblem {
            men: Side::new(men.clone(), men_r.clone(), vec![alpha; 3], vec![h.clone(); 3]),
            women: Side::new(women.clone(), women_r.clone(), vec![alpha; 3], vec![h.clone(); 3]),
            lottery_seed: 0,
        };
        for proposer in [Proposer::Men, Proposer::Women] {
            let m = marriage_match(&p, proposer)?;
            let pairs: Vec<String> = m
                .assignment()
                .iter()
                .enumerate()
                .map(|(i, w)| format!("m{i}-{}", w.map_or("none".into(), |w| format!("w{}", w.index()))))
                .collect();
            println!("alpha {alpha:.1}, {proposer:?} propose: {}", pairs.join(" "));
        }
    }
    Ok(())
}
