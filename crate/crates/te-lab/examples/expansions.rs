//! Small- and large-frequency eigenvalue expansions against the exact spectrum,
//! plus the residuals of both diagonalisation schemes.

use te_lab::asymptotics::{
    large_freq_blockdiag, large_freq_coeffs_frame, small_freq_coeffs_frame, small_freq_diagonalize,
};
use te_lab::fit::{geomspace, loglog};
use te_lab::poly::optimal_matching;
use te_lab::symbol::quintic_roots;
use te_lab::{unit, Medium};

fn main() -> te_lab::Result<()> {
    let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0)?;
    let phi: f64 = 0.3;
    let f = m.frame(phi);
    let eta = unit(phi);
    println!("medium {}, direction phi = {phi}", m.name());

    let small = small_freq_coeffs_frame(&f, m.gamma)?;
    let radii = geomspace(1e-3, 1e-1, 9);
    let mut res = vec![Vec::new(); 5];
    for &s in &radii {
        let exact = quintic_roots(&f, s, m.gamma, m.kappa)?;
        let pred = small.predict(s, m.kappa);
        let p = optimal_matching(&pred, &exact);
        for i in 0..5 {
            res[i].push((exact[p[i]] - pred[i]).norm());
        }
    }
    for (i, r) in res.iter().enumerate() {
        println!("small |xi|, branch {i}: residual slope {:.3}", loglog(&radii, r).map_or(f64::NAN, |f| f.slope));
    }

    let large = large_freq_coeffs_frame(&f, m.gamma, m.kappa);
    let radii = geomspace(10.0, 1e3, 9);
    let mut res = vec![Vec::new(); 5];
    for &s in &radii {
        let exact = quintic_roots(&f, s, m.gamma, m.kappa)?;
        let pred = large.predict(&f, s, m.kappa);
        let p = optimal_matching(&pred, &exact);
        for i in 0..5 {
            res[i].push((exact[p[i]] - pred[i]).norm());
        }
    }
    for (i, r) in res.iter().enumerate() {
        println!("large |xi|, branch {i}: residual slope {:.3}", loglog(&radii, r).map_or(f64::NAN, |f| f.slope));
    }

    for k in 1..=3 {
        let radii = geomspace(1e-3, 1e-1, 7);
        let r: Vec<f64> = radii
            .iter()
            .map(|&s| small_freq_diagonalize(&m, [s * eta[0], s * eta[1]], k).map(|d| d.residual))
            .collect::<te_lab::Result<_>>()?;
        println!("small scheme k={k}: residual slope {:.3}", loglog(&radii, &r).map_or(f64::NAN, |f| f.slope));
    }
    for k in 1..=3 {
        let radii = geomspace(10.0, 1e3, 7);
        let r: Vec<f64> = radii
            .iter()
            .map(|&s| large_freq_blockdiag(&m, [s * eta[0], s * eta[1]], k).map(|d| d.residual))
            .collect::<te_lab::Result<_>>()?;
        println!("large scheme k={k}: residual slope {:.3}", loglog(&radii, &r).map_or(f64::NAN, |f| f.slope));
    }
    Ok(())
}
