//! Image of the source square under the lifting change of variables.

use lifted_spectrum::lifting::{enclosing_rectangle, sample_lifted_domain};
use lifted_spectrum::report::domain_csv;
use lifted_spectrum::ProblemConfig;

fn main() {
    let config = ProblemConfig::reference_case();
    let sample = sample_lifted_domain(&config, 40);
    let rect = enclosing_rectangle(&config);
    println!("{} samples", sample.points.len());
    println!(
        "sample box    X1 {:?} X2 {:?}",
        sample.bbox.x1, sample.bbox.x2
    );
    println!("enclosing box X1 {:?} X2 {:?}", rect.x1, rect.x2);

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, domain_csv(&sample, &config)).expect("write csv");
        println!("wrote {path}");
    }
}
