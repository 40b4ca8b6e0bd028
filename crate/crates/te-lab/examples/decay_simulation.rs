//! Filtered decay of a Gaussian initial state on the periodic grid, with
//! power-law fits and the dissipated energy.
//!
//! `cargo run --release --example decay_simulation -- 256` picks the grid size.

use te_lab::fit::geomspace;
use te_lab::simulator::{measure_decay, non_increasing, CauchyData, FilterSpec, Functional, GridSpec};
use te_lab::Medium;

fn main() -> te_lab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(256);
    let grid = GridSpec::new(n, 100.0 * n as f64 / 256.0)?;
    let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0)?;
    let data = CauchyData::gaussian(&grid, 4.0);
    let times = geomspace(2.5, 25.0 * n as f64 / 256.0, 12);
    println!("{} on n = {n}, L = {}", m.name(), grid.l);
    for (filter, functional) in
        [("none", Functional::L2), ("hyp", Functional::Sup), ("par+low", Functional::Sup), ("none", Functional::Energy)]
    {
        let spec = FilterSpec::parse(filter, 0.1, 1.0)?;
        let r = measure_decay(&m, &data, &grid, &spec, functional, &times)?;
        println!(
            "  {:<8} {:<6} exponent {:>7.4} +- {:.4}  ({} times, wrapped at {:?}, energy non-increasing: {})",
            r.filter,
            functional.name(),
            r.fitted_exponent.unwrap_or(f64::NAN),
            r.ci.unwrap_or(f64::NAN),
            r.times.len(),
            r.wrapped_at,
            non_increasing(&r.weighted_energy, 1e-12)
        );
    }
    Ok(())
}
