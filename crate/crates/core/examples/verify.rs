//! The property suite on a reduced grid, one line per property.

use lifted_spectrum::experiment::{run_verification, VERIFY_SEED};
use lifted_spectrum::ProblemConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ProblemConfig::reference_case().with_grids(41, 104, 26);
    let checks = run_verification(&config, VERIFY_SEED)?;
    for c in &checks {
        println!("{c}");
    }
    if checks.iter().any(|c| !c.passed) {
        std::process::exit(1);
    }
    Ok(())
}
