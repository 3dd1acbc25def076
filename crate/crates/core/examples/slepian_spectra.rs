//! Normalized eigenvalues of the two sinc operators and their product.

use lifted_spectrum::slepian::{
    closed_form_scale, product_spectrum, s_axis_spectrum, u_axis_spectrum,
};
use lifted_spectrum::ProblemConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ProblemConfig::reference_case();
    let u = u_axis_spectrum(&config)?;
    let s = s_axis_spectrum(&config)?;
    for (name, spec) in [("u", &u), ("s", &s)] {
        println!(
            "{name} axis: shannon number {:.1}, {} eigenvalues above 0.5",
            spec.shannon,
            spec.count_above(0.5)
        );
    }
    println!("u-axis plunge:");
    for i in 36..46 {
        println!("  {:>3} {:.6e}", i + 1, u.eigenvalues[i]);
    }

    let product = product_spectrum(&u, &s, closed_form_scale(&config), config.tau_db)?;
    for tau in [-10.0, -20.0, -40.0] {
        println!(
            "product spectrum: critical index {} at {tau} dB",
            product.critical_index_at(tau)?
        );
    }
    Ok(())
}
