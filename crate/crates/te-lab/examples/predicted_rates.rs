//! Decay exponents predicted from the census and Fresnel contact orders.

use te_lab::decay::{predict_global, regularity_threshold};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    for m in [
        Medium::isotropic(1.0, 1.0, 1.0, 1.0)?,
        Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0)?,
        Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0)?,
        Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0)?,
    ] {
        let p = predict_global(&m)?;
        println!("{}: global exponent {}", p.medium, p.global_exponent);
        for d in &p.per_direction {
            println!(
                "  phi = {:.4} sheet {} l = {:?} contact {} -> 1/{} ({:?})",
                d.phi, d.sheet, d.ell, d.gamma_bar, d.denominator, d.rule
            );
        }
    }
    println!("L1 -> Linf needs data regularity above {}", regularity_threshold(1.0, f64::INFINITY));
    let p = predict_global(&Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0)?)?;
    println!("{}", p.report());
    Ok(())
}
