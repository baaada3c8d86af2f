//! Exact mean returns of every deterministic policy in each variant.
//!
//! Also contrasts the two optimisation criteria on the original problem:
//! SER ranks policies by their mean return, while ESR averages a utility
//! applied to each episode's return.

use morl::environments::{build, build_original, default_threshold, VARIANTS};
use morl::oracle::{enumerate_policies, esr_value, evaluate_all, ser_optimal};
use morl::utility::UtilityOrdering;
use morl::RewardVector;

fn main() -> morl::Result<()> {
    for name in VARIANTS {
        let env = build(name)?;
        let ordering = UtilityOrdering::single(default_threshold(name));
        let (best, _) = ser_optimal(&env, &ordering);
        println!("== {name} (threshold {}) ==", ordering.thresholds()[0]);
        for e in evaluate_all(&env) {
            let mark = if e.policy == best {
                "  <- SER-optimal"
            } else {
                ""
            };
            let meets = if ordering.meets_thresholds(&e.mean_return) {
                "meets"
            } else {
                "     "
            };
            println!(
                "  {:<4} {:<32} {} {} trajectories{}",
                e.policy.identifier,
                e.mean_return.to_string(),
                meets,
                e.trajectories.len(),
                mark
            );
        }
    }

    // A step utility: 1 when the mission succeeds within 15 time units.
    let env = build_original();
    let fast_success = |r: &RewardVector| f64::from(r[0] >= 1.0 && r[1] >= -15.0);
    println!("\nP(success within 15 time units), an ESR utility:");
    for policy in enumerate_policies(&env) {
        println!(
            "  {:<3} {:.4}",
            policy.identifier,
            esr_value(&env, &policy, fast_success)
        );
    }
    Ok(())
}
