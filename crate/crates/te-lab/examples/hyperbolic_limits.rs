//! Imaginary parts of the hyperbolic branch near a hyperbolic direction
//! against the closed-form limit law, and the two-level model at a
//! degenerate direction.

use std::f64::consts::FRAC_PI_4;

use te_lab::asymptotics::{
    delta_pm, hyperbolic_eigenvalue_near_degenerate, hyperbolic_im_limit, hyperbolic_limit_constants,
};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0)?;
    let data = hyperbolic_limit_constants(&m, [1.0, 0.0])?;
    println!("{}: C = {:.6}, D = {:.6} at phi = 0 (sheet {})", m.name(), data.c, data.d, data.j0 + 1);
    for s in [0.5, 1.0, 2.0, 10.0] {
        let got = hyperbolic_im_limit(&m, &data, s, 1.0)?;
        println!("  |xi| = {s:<4}  extrapolated {got:.6}  limit law {:.6}", data.im_ratio(s));
    }

    // weakly coupled cubic medium, degenerate on the diagonal
    let m = Medium::cubic(2.0, 1.0, -1.0, 1.0, 1.0)?;
    let bar = FRAC_PI_4;
    println!("{}: a1^2 on the diagonal = {:.6}", m.name(), m.frame(bar).a[0].powi(2));
    for h in [1e-2, 1e-3, 1e-4] {
        let f = m.frame(bar + h);
        let nu = hyperbolic_eigenvalue_near_degenerate(&m, bar + h, 1.0)?;
        let (w1, w2) = (f.omega[0], f.omega[1]);
        println!("  offset {h:e}: (w1 - Re nu)/(w1 - w2) = {:.6}", (w1 - nu.re) / (w1 - w2));
    }
    // the two-level model is accurate to O(1/|xi|) once |xi|·offset is large
    let h = 1e-2;
    let f = m.frame(bar + h);
    for s in [1e2, 1e3, 1e4, 1e5] {
        let (dm, _) = delta_pm(&f, s, m.gamma, m.kappa);
        let nu = hyperbolic_eigenvalue_near_degenerate(&m, bar + h, s)?;
        println!("  |xi| = {s:e}: |nu - delta-| = {:.3e}, times |xi| = {:.4}", (nu - dm).norm(), s * (nu - dm).norm());
    }
    Ok(())
}
