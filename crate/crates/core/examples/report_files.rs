//! CSV and SVG output for the sinc-operator spectra, plus a run manifest.

use std::path::PathBuf;

use lifted_spectrum::report::{slepian_csv, slepian_svg, RunManifest};
use lifted_spectrum::slepian::{s_axis_spectrum, u_axis_spectrum};
use lifted_spectrum::ProblemConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let config = ProblemConfig::reference_case();
    let mut manifest = RunManifest::new("slepian", &config);
    for (name, spec) in [
        ("u", u_axis_spectrum(&config)?),
        ("s", s_axis_spectrum(&config)?),
    ] {
        manifest.emit(
            &dir.join(format!("slepian_{name}.csv")),
            "slepian_csv",
            &slepian_csv(&spec),
        )?;
        manifest.emit(
            &dir.join(format!("slepian_{name}.svg")),
            "slepian_svg",
            &slepian_svg(&spec, name),
        )?;
    }
    manifest.write(&dir.join("slepian.manifest.json"))?;
    for a in &manifest.artifacts {
        println!("{}", a.path.display());
    }
    Ok(())
}
