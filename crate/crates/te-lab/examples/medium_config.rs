//! Media from key-value documents and from a sampled custom symbol table.

use std::f64::consts::TAU;

use te_lab::config::{parse_custom_csv, parse_medium};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    let doc = "\
# a rhombic medium
kind = rhombic
params.tau1 = 4
params.tau2 = 2
params.mu = 1
params.lambda = 1
gamma = 1
kappa = 1
";
    let m = parse_medium(doc, None)?;
    println!("parsed {}", m.name());

    match parse_medium("kind = cubic\nparams.tau = 1\nparams.mu = 1\nparams.lambda = 2\ngamma = 1\nkappa = 1\n", None) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected with exit status {}: {e}", e.exit_code()),
    }

    // A(eta) = I + 2 eta⊗eta sampled at 64 angles
    let mut csv = String::from("phi,a11_re,a12_re,a12_im,a22_re\n");
    for k in 0..64 {
        let p = TAU * k as f64 / 64.0;
        let (c, s) = (p.cos(), p.sin());
        csv += &format!("{p},{},{},0,{}\n", 1.0 + 2.0 * c * c, 2.0 * c * s, 1.0 + 2.0 * s * s);
    }
    let custom = Medium::custom(parse_custom_csv(&csv)?, 1.0, 1.0)?;
    let f = custom.frame(0.4);
    println!("custom medium at phi = 0.4: kappa = {:.6?}, omega = {:.6?}", f.kappa, f.omega);
    Ok(())
}
