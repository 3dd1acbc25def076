//! Closed-form bounds for the reference geometry and a few apertures.

use lifted_spectrum::{compute_bounds, validate_fresnel_regime, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let reference = ProblemConfig::reference_case();
    println!("reference: {}", compute_bounds(&reference)?);

    for a in [2.5, 5.0, 10.0, 20.0] {
        let config = ProblemConfig { a, ..reference };
        let b = compute_bounds(&config)?;
        println!(
            "a = {a:>4}: m_u = {:>6.2} m_s = {:>5.2} m_bar = {:>7.2} -> {}",
            b.m_u, b.m_s, b.m_bar, b.m_bar_ceil
        );
        for w in validate_fresnel_regime(&config) {
            println!("          warning: {w}");
        }
    }
    Ok(())
}
