//! Radiated field of a uniform strip on the observation grid.

use lifted_spectrum::experiment::forward_operator;
use lifted_spectrum::forward::apply_t;
use lifted_spectrum::grids::observation_grid;
use lifted_spectrum::ProblemConfig;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ProblemConfig::reference_case().with_grids(121, 21, 4);
    let t = forward_operator(&config)?;
    let source = vec![Complex64::new(1.0, 0.0); config.n_x];
    let intensity = apply_t(&t, &source)?.intensity();

    let grid = observation_grid(&config)?;
    println!("{:>8} {:>8} {:>12}", "r", "u", "|E|^2");
    for (k, value) in intensity.iter().enumerate() {
        let (r, u) = grid.node(k);
        if k % config.n_u == config.n_u / 2 || k % config.n_u == 0 {
            println!("{r:>8.2} {u:>8.3} {value:>12.4e}");
        }
    }
    Ok(())
}
