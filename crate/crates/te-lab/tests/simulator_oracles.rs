//! Simulator checks against oracles built outside the crate's own
//! propagation code: a closed-form 2×2 matrix square root for the energy
//! reconstruction, analytic divergence-free data for the isotropic shear
//! block, and filter identities over random frequencies.

use proptest::prelude::*;
use rustfft::FftPlanner;

use te_lab::fit::geomspace;
use te_lab::simulator::{
    build_v0, measure_decay, reconstruct, CauchyData, FilterKind, FilterSpec, Functional, GridSpec, MicrolocalFilter,
};
use te_lab::{Medium, C64};

/// Unnormalised forward (`sign = -1`) or normalised inverse 2D DFT, row-major.
fn dft2(f: &mut [C64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for row in f.chunks_mut(n) {
        plan.process(row);
    }
    let mut col = vec![C64::new(0.0, 0.0); n];
    for x in 0..n {
        for y in 0..n {
            col[y] = f[y * n + x];
        }
        plan.process(&mut col);
        for y in 0..n {
            f[y * n + x] = col[y];
        }
    }
    if inverse {
        let s = 1.0 / (n * n) as f64;
        f.iter_mut().for_each(|z| *z *= s);
    }
}

fn wavenumber(k: usize, n: usize, l: f64) -> f64 {
    let k = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
    std::f64::consts::TAU * k / l
}

/// `√A(D)u` with the closed form `√M = (M + √det M·I)/√(tr M + 2√det M)`.
fn sqrt_a_closed_form(m: &Medium, grid: &GridSpec, u: [&[f64]; 2]) -> [Vec<C64>; 2] {
    let n = grid.n;
    let mut hat: [Vec<C64>; 2] =
        [u[0].iter().map(|&x| C64::new(x, 0.0)).collect(), u[1].iter().map(|&x| C64::new(x, 0.0)).collect()];
    for h in hat.iter_mut() {
        dft2(h, n, false);
    }
    let mut out = [vec![C64::new(0.0, 0.0); n * n], vec![C64::new(0.0, 0.0); n * n]];
    for y in 0..n {
        for x in 0..n {
            let (kx, ky) = (wavenumber(x, n, grid.l), wavenumber(y, n, grid.l));
            let s2 = kx * kx + ky * ky;
            if s2 == 0.0 {
                continue;
            }
            let a = m.symbol_at(ky.atan2(kx)).map(|z| z * s2);
            let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).re;
            let r = det.sqrt();
            let norm = ((a[(0, 0)] + a[(1, 1)]).re + 2.0 * r).sqrt();
            let i = y * n + x;
            let (h0, h1) = (hat[0][i], hat[1][i]);
            out[0][i] = ((a[(0, 0)] + r) * h0 + a[(0, 1)] * h1) / norm;
            out[1][i] = (a[(1, 0)] * h0 + (a[(1, 1)] + r) * h1) / norm;
        }
    }
    for o in out.iter_mut() {
        dft2(o, n, true);
    }
    out
}

fn bump(grid: &GridSpec, cx: f64, cy: f64, w: f64) -> Vec<f64> {
    let n = grid.n;
    (0..n * n)
        .map(|i| {
            let (x, y) = (grid.position(i % n) - cx, grid.position(i / n) - cy);
            (-(x * x + y * y) / (2.0 * w * w)).exp()
        })
        .collect()
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn reconstruction_matches_closed_form_square_root() {
    let grid = GridSpec::new(64, 40.0).unwrap();
    for m in [
        Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap(),
        Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap(),
        Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap(),
    ] {
        let mut data = CauchyData::zero(&grid);
        data.u1 = [bump(&grid, 1.0, -2.0, 3.0), bump(&grid, -3.0, 0.5, 2.5)];
        data.u2 = [bump(&grid, 0.0, 2.0, 2.0), bump(&grid, 2.0, 2.0, 3.5)];
        data.theta0 = bump(&grid, -1.0, -1.0, 2.0);
        let rec = reconstruct(&m, &build_v0(&m, &data, &grid).unwrap());
        let want = sqrt_a_closed_form(&m, &grid, [&data.u1[0], &data.u1[1]]);
        for k in 0..2 {
            assert!(max_diff(&rec.sqrt_a_u[k], &want[k]) < 1e-10, "{} sqrt(A)U component {k}", m.name());
            // D_tU = −i∂_tU
            let dtu: Vec<C64> = data.u2[k].iter().map(|&x| C64::new(0.0, -x)).collect();
            assert!(max_diff(&rec.dtu[k], &dtu) < 1e-10, "{} D_tU component {k}", m.name());
        }
        let th: Vec<C64> = data.theta0.iter().map(|&x| C64::new(x, 0.0)).collect();
        assert!(max_diff(&rec.theta, &th) < 1e-10);
    }
}

/// `(∂_yψ, −∂_xψ)` for a Gaussian `ψ`: divergence free, hence pure shear in
/// an isotropic medium.
fn shear_field(grid: &GridSpec, w: f64) -> [Vec<f64>; 2] {
    let n = grid.n;
    let psi = bump(grid, 0.0, 0.0, w);
    let mut u = [vec![0.0; n * n], vec![0.0; n * n]];
    for i in 0..n * n {
        let (x, y) = (grid.position(i % n), grid.position(i / n));
        u[0][i] = -y / (w * w) * psi[i];
        u[1][i] = x / (w * w) * psi[i];
    }
    u
}

#[test]
fn isotropic_shear_block_conserves_l2() {
    let m = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(128, 80.0).unwrap();
    let mut data = CauchyData::zero(&grid);
    data.u1 = shear_field(&grid, 3.0);
    data.u2 = shear_field(&grid, 2.0);
    let times = geomspace(2.0, 15.0, 8);
    for filter in ["none", "hyp", "low", "high"] {
        let spec = FilterSpec::parse(filter, 0.1, 1.0).unwrap();
        let r = measure_decay(&m, &data, &grid, &spec, Functional::L2, &times).unwrap();
        let e = r.fitted_exponent.unwrap();
        assert!(e.abs() <= 0.05, "{filter}: L2 exponent {e}");
        let spread = r.norms.iter().fold(0.0f64, |a, &v| a.max((v / r.norms[0] - 1.0).abs()));
        assert!(spread < 1e-9, "{filter}: L2 norm drift {spread}");
    }
}

#[test]
fn coupled_l2_norm_decays() {
    // the longitudinal block is coupled to heat, so its L2 norm drops
    let m = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
    let grid = GridSpec::new(64, 40.0).unwrap();
    let data = CauchyData::gaussian(&grid, 4.0);
    let r = measure_decay(&m, &data, &grid, &FilterSpec::none(), Functional::L2, &geomspace(1.0, 8.0, 6)).unwrap();
    assert!(r.norms.windows(2).all(|w| w[1] < w[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn filter_partition_of_unity(phi in 0.0..std::f64::consts::TAU, s in 1e-3f64..1e3) {
        let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let spec = FilterSpec::parse("par", 0.1, 1.0).unwrap();
        let f = MicrolocalFilter::new(&m, &spec).unwrap();
        let eta = [phi.cos(), phi.sin()];
        let (p, h) = (f.p_par(eta), f.p_hyp(eta));
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&h));
        prop_assert!((p + h - 1.0).abs() < 1e-15);
        // outside every 2ε cone the hyperbolic part vanishes
        let far = f.hyperbolic.iter().all(|d| (d[0] - eta[0]).hypot(d[1] - eta[1]) > 0.2);
        if far {
            prop_assert_eq!(h, 0.0);
        }
        let lo = FilterSpec::parse("low", 0.1, 1.0).unwrap();
        let hi = FilterSpec::parse("high", 0.1, 1.0).unwrap();
        let xi = [s * eta[0], s * eta[1]];
        let sum = MicrolocalFilter::new(&m, &lo).unwrap().weight(xi) + MicrolocalFilter::new(&m, &hi).unwrap().weight(xi);
        prop_assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn branch_filter_needs_hyperbolic_direction(phi in 0.1f64..0.6) {
        let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let spec = FilterSpec { kinds: vec![FilterKind::Branch(phi)], ..FilterSpec::none() };
        prop_assert!(MicrolocalFilter::new(&m, &spec).is_err());
    }
}
