//! Labelled spectrum of the 5×5 symbol, the quintic against a dense
//! eigensolve, spectral projectors and the exact propagator.

use te_lab::symbol::{assemble_b, char_quintic, direct_eigenvalues, projector, propagator, spectrum};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    let m = Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0)?;
    let xi = [0.7, -0.4];
    let rep = spectrum(&m, xi)?;
    println!("{} at xi = {xi:?}", m.name());
    for k in 0..5 {
        println!(
            "  {:<5} {:+.10} {:+.10}i  residual {:.1e}",
            rep.labels[k], rep.eigenvalues[k].re, rep.eigenvalues[k].im, rep.residuals[k]
        );
    }

    let q = char_quintic(&m, xi)?;
    let coeffs: Vec<String> = q.iter().map(|c| format!("{:+.4}{:+.4}i", c.re, c.im)).collect();
    println!("quintic coefficients: {}", coeffs.join("  "));
    let sm = assemble_b(&m, xi)?;
    let dense = direct_eigenvalues(&sm)?;
    let worst = rep
        .eigenvalues
        .iter()
        .map(|a| dense.iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    println!("largest distance to the dense eigensolve: {worst:.1e}");

    let ps = (0..5).map(|k| projector(&sm.b, &rep.eigenvalues, k)).collect::<te_lab::Result<Vec<_>>>()?;
    let sum: te_lab::linalg::Mat5 = ps.iter().sum();
    let idem = ps.iter().map(|p| (p * p - p).norm()).fold(0.0, f64::max);
    println!("|sum P - I| = {:.1e}, max |P^2 - P| = {idem:.1e}", (sum - te_lab::linalg::Mat5::identity()).norm());

    // exp(itB) = sum of exp(it nu_k) P_k
    let t = 3.0;
    let spectral: te_lab::linalg::Mat5 =
        ps.iter().zip(rep.eigenvalues.iter()).map(|(p, nu)| p * (te_lab::C64::i() * t * nu).exp()).sum();
    println!("propagator at t = {t}: spectral vs expm difference {:.1e}", (spectral - propagator(&sm, t)).norm());
    Ok(())
}
