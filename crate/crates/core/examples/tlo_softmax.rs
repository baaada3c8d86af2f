//! Thresholded lexicographic ordering and softmax-t exploration on a few
//! hand-picked vectors.

use morl::rng::SeededRng;
use morl::utility::{Schedule, UtilityOrdering};
use morl::RewardVector;

fn main() -> morl::Result<()> {
    let ordering = UtilityOrdering::single(0.88);
    let candidates: Vec<RewardVector> = vec![
        [0.9, -19.9].into(),
        [0.9, -14.5].into(),
        [0.81, -12.61].into(),
        [1.0, -22.0].into(),
    ];
    for c in &candidates {
        println!("{c:<16} key {:?}", ordering.tlo_key(c)?.values());
    }
    println!("best: {}", candidates[ordering.tlo_argbest(&candidates)?]);

    let temperature = Schedule::linear(10.0, 2.0, 5);
    let mut rng = SeededRng::new(0);
    for episode in 0..5 {
        let t = temperature.value(episode)?;
        let p = ordering.softmax_probabilities(&candidates, t)?;
        let pick = ordering.softmax_t(&candidates, t, &mut rng)?;
        let shown: Vec<String> = p.iter().map(|x| format!("{x:.3}")).collect();
        println!("T = {t:>4}: p = [{}], sampled {pick}", shown.join(", "));
    }
    Ok(())
}
