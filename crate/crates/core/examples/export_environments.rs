//! Writes each built-in Space Traders variant as JSON.
//!
//! ```text
//! cargo run --example export_environments -- [DIR]
//! ```
//!
//! Without an argument the files go to the crate's `environments/`
//! directory, which is where `morl --env <path>` users usually start from.

use std::fs;
use std::path::PathBuf;

use morl::environments::{build, shipped_dir, VARIANTS};

fn main() -> morl::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(shipped_dir);
    fs::create_dir_all(&dir)?;
    for name in VARIANTS {
        let spec = build(name)?;
        let path = dir.join(format!("{name}.json"));
        fs::write(&path, spec.to_json() + "\n")?;
        println!(
            "{:<9} {} states, {} policies -> {}",
            name,
            spec.state_count(),
            (0..spec.state_count())
                .map(|s| spec.action_count(s))
                .product::<usize>(),
            path.display()
        );
    }
    Ok(())
}
