//! Value-based multi-objective reinforcement learning on small stochastic
//! MOMDPs.
//!
//! The crate bundles:
//!
//! * [`momdp`]: environment specifications, validation and episode running;
//! * [`environments`]: the Space Traders variants and JSON loading;
//! * [`utility`]: thresholded lexicographic ordering, softmax-t and schedules;
//! * [`agents`]: the baseline, MOSS and policy-options Q(λ) learners;
//! * [`oracle`]: exact policy evaluation by outcome-tree expansion;
//! * [`harness`]: seeded experiments and CSV/JSON artifacts.
//!
//! ```
//! use morl::environments::build_original;
//! use morl::oracle::ser_optimal;
//! use morl::utility::UtilityOrdering;
//!
//! let env = build_original();
//! let (policy, mean) = ser_optimal(&env, &UtilityOrdering::single(0.88));
//! assert_eq!(policy.identifier, "DI");
//! assert!((mean[1] + 14.5).abs() < 1e-9);
//! ```

pub mod agents;
pub mod environments;
pub mod error;
pub mod harness;
pub mod momdp;
pub mod oracle;
pub mod reward;
pub mod rng;
pub mod utility;

pub use error::{Error, Result};
pub use reward::RewardVector;
