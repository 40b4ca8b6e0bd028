//! Special-direction census of the built-in media: hyperbolic directions,
//! vanishing orders of the coupling and the check that the spectrum at each
//! hyperbolic direction carries a real pair.

use te_lab::classify::{closest_pair, find_special_directions, Census};
use te_lab::symbol::{spectrum, Label};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    let media = [
        Medium::isotropic(1.0, 1.0, 1.0, 1.0)?,
        Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0)?,
        Medium::cubic(3.0, 1.0, -0.5, 1.0, 1.0)?,
        Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0)?,
        Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0)?,
    ];
    for m in &media {
        match find_special_directions(m, 2048)? {
            Census::Decoupled { branch } => {
                println!("{}: decoupled, every direction hyperbolic for sheet {}", m.name(), branch + 1)
            }
            Census::AllDegenerate => println!("{}: degenerate everywhere", m.name()),
            census @ Census::Isolated(_) => {
                println!("{}: {} special directions", m.name(), census.directions().len());
                for d in census.directions() {
                    let mut line = format!("  phi = {:.6}  {:<16} order {:?}", d.phi, d.tag.name(), d.vanishing_order);
                    if let Some(j) = d.tag.j0() {
                        let rep = spectrum(m, d.eta)?;
                        let nu = rep.get(Label::of_branch(j, 1.0));
                        line += &format!("  nu at eta: {:.3e}{:+.1e}i", nu.re, nu.im);
                    }
                    println!("{line}");
                }
                if let Some((gap, a, b)) = closest_pair(census.directions()) {
                    println!("  closest pair {a:.4} / {b:.4}, chordal gap {gap:.4}");
                }
            }
        }
    }
    Ok(())
}
