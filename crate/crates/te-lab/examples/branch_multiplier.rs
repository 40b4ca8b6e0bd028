//! Sup-norm decay of a single hyperbolic branch multiplier in a cone around
//! the axis of rhombic(3,2,1,1), where the coupling vanishes to third order,
//! next to the pure wave reference with the same cutoff.

use te_lab::decay::predict_global;
use te_lab::fit::geomspace;
use te_lab::simulator::{gaussian_field, model_multiplier_decay, GridSpec, Multiplier};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    let m = Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0)?;
    let p = predict_global(&m)?;
    let axis = p.per_direction.iter().find(|d| d.phi.abs() < 1e-6).expect("axis is hyperbolic");
    println!("{}: predicted exponent on the axis 1/{} = {}", m.name(), axis.denominator, axis.exponent);

    let grid = GridSpec::default();
    let f = gaussian_field(&grid, 4.0);
    let times = geomspace(5.0, 50.0, 16);
    for (name, mult) in
        [("branch", Multiplier::Branch { sign: 1.0 }), ("wave", Multiplier::ConstantWave { omega: 1.0 })]
    {
        let r = model_multiplier_decay(&m, [1.0, 0.0], mult, &f, &grid, 0.5, &times)?;
        println!(
            "  {name:<6} exponent {:.4} +- {:.4} over {} times",
            r.fitted_exponent.unwrap_or(f64::NAN),
            r.ci.unwrap_or(f64::NAN),
            r.times.len()
        );
    }
    Ok(())
}
