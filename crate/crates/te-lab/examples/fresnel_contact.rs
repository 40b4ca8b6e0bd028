//! Contact orders of Fresnel sheets at hyperbolic directions, checked by two
//! independent differentiation methods, and the derivative bounds of the
//! hyperbolic eigenvalue near such a direction.

use te_lab::classify::find_special_directions;
use te_lab::fresnel::{verify_derivative_bounds, FdOracle, FresnelProfile, PROFILE_N};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    for m in [Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0)?, Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0)?] {
        println!("{}", m.name());
        let census = find_special_directions(&m, 1024)?;
        for d in census.hyperbolic() {
            let j = d.tag.j0().unwrap();
            let fft = FresnelProfile::new(&m, j, PROFILE_N)?.contact_order(d.phi);
            let fd = FdOracle::new(&m, j).contact_order(d.phi);
            println!(
                "  phi = {:.6}  sheet {}  order {:?}  contact (fft) {:?}  contact (fd) {:?}",
                d.phi,
                j + 1,
                d.vanishing_order,
                fft,
                fd
            );
        }
        let d = &census.hyperbolic()[0];
        let j = d.tag.j0().unwrap();
        let ell = d.vanishing_order.and_then(|v| v.finite()).unwrap_or(1) as usize;
        let rep = verify_derivative_bounds(&m, d.eta, j, 2 * ell - 1)?;
        println!("  derivative bounds at phi = {:.4} (l = {})", rep.phi_bar, rep.ell);
        for ((s, cr), (_, ci)) in rep.c_re.iter().zip(&rep.c_im) {
            println!("    |xi| = {s:9.3e}  c_re = {cr:10.3e}  c_im = {ci:10.3e}");
        }
        let sl = |f: &Option<te_lab::fit::LineFit>| f.map_or(f64::NAN, |f| f.slope);
        println!(
            "    c slopes: small |xi| re {:.3} im {:.3}; large |xi| re {:.3} im {:.3}",
            sl(&rep.small_fit_re),
            sl(&rep.small_fit_im),
            sl(&rep.large_fit_re),
            sl(&rep.large_fit_im)
        );
    }
    Ok(())
}
