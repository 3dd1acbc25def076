//! Plain, weighted and approximated spectra with their critical indices.
//!
//! Runs on a reduced grid by default; pass `full` for the reference grids
//! (dense eigensolves of 5248 x 5248 matrices, a few minutes).

use lifted_spectrum::experiment::{approx_spectrum, lifting_spectra, product_closed_form};
use lifted_spectrum::{compute_bounds, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let full = std::env::args().any(|a| a == "full");
    let config = if full {
        ProblemConfig::reference_case()
    } else {
        ProblemConfig::reference_case().with_grids(61, 104, 26)
    };
    println!(
        "grids n_x={} n_u={} n_s={}, bound {}",
        config.n_x,
        config.n_u,
        config.n_s,
        compute_bounds(&config)?
    );

    let (plain, weighted) = lifting_spectra(&config)?;
    let approx = approx_spectrum(&config)?;
    let product = product_closed_form(&config)?;
    for s in [&plain, &weighted, &approx, &product] {
        println!(
            "{:<20} top {:.4e}  critical index at {} dB: {:>4}  at -10 dB: {:>4}",
            s.kind.label(),
            s.values[0],
            s.threshold_db,
            s.critical_index,
            s.critical_index_at(-10.0)?
        );
    }
    Ok(())
}
