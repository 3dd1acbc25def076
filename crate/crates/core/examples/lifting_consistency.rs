//! The lifted operator applied to `J J^H` reproduces `|T J|^2`.

use lifted_spectrum::experiment::{
    forward_operator, lifting_consistency_error, lifting_operator, VERIFY_SEED,
};
use lifted_spectrum::ProblemConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n_x in [8, 21, 41] {
        let config = ProblemConfig::reference_case().with_grids(n_x, 41, 8);
        let a = lifting_operator(&config)?;
        let t = forward_operator(&config)?;
        let err = lifting_consistency_error(&a, &t, 20, VERIFY_SEED)?;
        println!(
            "n_x = {n_x:>3}: A is {} x {}, max relative error {err:.2e}",
            a.nrows(),
            a.ncols()
        );
    }
    Ok(())
}
