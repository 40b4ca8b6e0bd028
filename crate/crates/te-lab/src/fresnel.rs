//! Fresnel curves: the curvature factor `ω_j + ∂²ω_j`, contact orders, and
//! derivative bounds for the hyperbolic eigenvalue near its direction.
//!
//! Derivatives in `φ` come from FFT differentiation of sampled branches. A
//! finite-difference oracle built on direct eigensolves provides the
//! independent cross-check.

use serde::Serialize;

use crate::asymptotics::angular_distance;
use crate::classify::{tag_of, vanishing_order_at, Tag, VanishingOrder, DERIV_ZERO_REL};
use crate::error::{LabError, Result};
use crate::fit::{geomspace, loglog, LineFit};
use crate::media::{Medium, TABLE_SIZE};
use crate::series::Series;
use crate::spectral::{first_nonzero_derivative, FirstNonzero, Periodic};
use crate::symbol::quintic_roots;
use crate::{angle_of, C64};

/// Default number of samples for spectral profiles.
pub const PROFILE_N: usize = 2048;
/// Grid resolution of the finite-difference oracle.
pub const FD_N: usize = 8192;
/// Largest contact order examined.
pub const CONTACT_CAP: u32 = 8;
/// Relative size of the highest Fourier modes above which a branch is not
/// resolved (typically a non-smooth crossing).
const SMOOTH_TAIL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContactOrder {
    Finite(u32),
    /// Every derivative up to the cap vanishes.
    AboveCap,
}

impl ContactOrder {
    pub fn finite(self) -> Option<u32> {
        match self {
            ContactOrder::Finite(g) => Some(g),
            ContactOrder::AboveCap => None,
        }
    }
}

fn contact_from(first: FirstNonzero) -> ContactOrder {
    match first {
        FirstNonzero::Order(k) => ContactOrder::Finite(k + 2),
        FirstNonzero::AboveCap => ContactOrder::AboveCap,
    }
}

/// Spectral profile of one sheet.
#[derive(Debug, Clone)]
pub struct FresnelProfile {
    pub j: usize,
    omega: Periodic,
    factor: Periodic,
}

impl FresnelProfile {
    pub fn new(m: &Medium, j: usize, n: usize) -> Result<Self> {
        if j > 1 {
            return Err(LabError::InvalidInput(format!("sheet index must be 1 or 2 (got {})", j + 1)));
        }
        if n < 64 || !n.is_power_of_two() {
            return Err(LabError::InvalidInput(format!("profile size must be a power of two >= 64 (got {n})")));
        }
        let omega = m.omega_profile(j, n);
        let w = omega.derivative_samples(0);
        let tail = tail_ratio(&w);
        if tail > SMOOTH_TAIL {
            return Err(LabError::Branch(format!(
                "sheet {} is not resolved by {n} samples (tail ratio {tail:e}); a branch crossing makes derivatives unreliable",
                j + 1
            )));
        }
        let w2 = omega.derivative_samples(2);
        let g: Vec<f64> = w.iter().zip(&w2).map(|(a, b)| a + b).collect();
        Ok(FresnelProfile { j, omega, factor: Periodic::from_samples(&g, false) })
    }

    pub fn omega(&self, phi: f64) -> f64 {
        self.omega.value(phi)
    }

    pub fn omega_derivative(&self, k: u32, phi: f64) -> f64 {
        self.omega.derivative(k, phi)
    }

    /// `ω_j + ∂²ω_j` at `phi`.
    pub fn curvature_factor(&self, phi: f64) -> f64 {
        self.factor.value(phi)
    }

    /// `∂^k(ω_j + ∂²ω_j)` at `phi`.
    pub fn factor_derivative(&self, k: u32, phi: f64) -> f64 {
        self.factor.derivative(k, phi)
    }

    /// Samples of the curvature factor on the profile grid.
    pub fn factor_samples(&self) -> Vec<f64> {
        self.factor.derivative_samples(0)
    }

    pub fn contact_order(&self, phi: f64) -> ContactOrder {
        contact_from(first_nonzero_derivative(&self.factor, phi, 0, CONTACT_CAP - 2, DERIV_ZERO_REL))
    }
}

/// Largest Fourier coefficient in the upper half of the spectrum relative to the largest overall.
fn tail_ratio(samples: &[f64]) -> f64 {
    let n = samples.len();
    let mut buf: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    rustfft::FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf.iter().map(|z| z.norm()).collect();
    let max = mags.iter().cloned().fold(0.0, f64::max);
    let tail = (n / 4..=n / 2).map(|k| mags[k].max(mags[(n - k) % n])).fold(0.0, f64::max);
    if max == 0.0 {
        0.0
    } else {
        tail / max
    }
}

fn check_unit(eta: [f64; 2]) -> Result<f64> {
    if ((eta[0].hypot(eta[1])) - 1.0).abs() > 1e-12 {
        return Err(LabError::InvalidInput("eta must be a unit vector".into()));
    }
    Ok(angle_of(eta))
}

/// `ω_j(η) + ∂²_φ ω_j(η)`; `j` is 0-based.
pub fn curvature_factor(m: &Medium, j: usize, eta: [f64; 2]) -> Result<f64> {
    let phi = check_unit(eta)?;
    Ok(FresnelProfile::new(m, j, PROFILE_N)?.curvature_factor(phi))
}

/// Contact order `γ̄_j(η̄)`.
pub fn contact_order(m: &Medium, j: usize, eta_bar: [f64; 2]) -> Result<ContactOrder> {
    let phi = check_unit(eta_bar)?;
    Ok(FresnelProfile::new(m, j, PROFILE_N)?.contact_order(phi))
}

/// Contact order at several profile resolutions (stability check).
pub fn contact_order_across(m: &Medium, j: usize, phi: f64, sizes: &[usize]) -> Result<Vec<ContactOrder>> {
    sizes.iter().map(|&n| Ok(FresnelProfile::new(m, j, n)?.contact_order(phi))).collect()
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

/// Finite-difference weights for the `order`-th derivative at 0 on the
/// given nodes (Fornberg's recursion).
pub fn fd_weights(nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Finite differences of `ω_j` from direct eigensolves on a grid of
/// spacing `2π/FD_N`, using every 16th (orders above 4: every 32nd) node.
#[derive(Debug, Clone)]
pub struct FdOracle<'a> {
    m: &'a Medium,
    j: usize,
    n: usize,
}

impl<'a> FdOracle<'a> {
    pub fn new(m: &'a Medium, j: usize) -> Self {
        FdOracle { m, j, n: FD_N }
    }

    fn stencil(&self, order: u32) -> (f64, Vec<f64>, Vec<f64>) {
        let dphi = std::f64::consts::TAU / self.n as f64;
        // wide stencils on a moderate step: steps much below 0.01 rad are
        // round-off dominated, much above it truncation suffers from the
        // nearby complex singularities of ω_j
        let half = order as usize / 2 + 6;
        let stride = if order <= 4 { 16.0 } else { 32.0 };
        let h = stride * dphi;
        let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|i| i as f64).collect();
        let w = fd_weights(&nodes, order as usize);
        (h, nodes, w)
    }

    /// `∂^k ω_j` at `phi`.
    pub fn omega_derivative(&self, order: u32, phi: f64) -> f64 {
        if order == 0 {
            return self.m.frame(phi).omega[self.j];
        }
        let (h, nodes, w) = self.stencil(order);
        let mut acc = 0.0;
        for (x, wi) in nodes.iter().zip(&w) {
            acc += wi * self.m.frame(phi + x * h).omega[self.j];
        }
        acc / h.powi(order as i32)
    }

    /// `∂^k(ω_j + ∂²ω_j)` at `phi`.
    pub fn factor_derivative(&self, k: u32, phi: f64) -> f64 {
        self.omega_derivative(k, phi) + self.omega_derivative(k + 2, phi)
    }

    /// Max of `|∂^k(ω + ∂²ω)|` over 256 equispaced directions.
    pub fn factor_derivative_scale(&self, k: u32) -> f64 {
        (0..256).map(|i| self.factor_derivative(k, std::f64::consts::TAU * i as f64 / 256.0).abs()).fold(0.0, f64::max)
    }

    pub fn contact_order(&self, phi: f64) -> ContactOrder {
        for k in 0..=(CONTACT_CAP - 2) {
            let scale = self.factor_derivative_scale(k);
            if scale > 0.0 && self.factor_derivative(k, phi).abs() > DERIV_ZERO_REL * scale {
                return ContactOrder::Finite(k + 2);
            }
        }
        ContactOrder::AboveCap
    }
}

// ---------------------------------------------------------------------------
// Derivative bounds of the hyperbolic eigenvalue

/// Taylor series in `δ` of the hyperbolic branch at `s·η(φ₀ + δ)`.
#[derive(Debug, Clone)]
pub struct BranchSeries {
    /// `ν(δ)`.
    pub nu: Series,
    /// `ν(δ) ∓ sω_{j₀}(δ)`, computed without cancellation.
    pub shift: Series,
}

impl BranchSeries {
    /// `k`-th `φ`-derivative of `ν ∓ sω_{j₀}`.
    pub fn shift_derivative(&self, k: usize) -> C64 {
        self.shift.derivative(k)
    }
}

/// Branch data shared by all evaluation points.
pub struct BranchProfiles {
    kappa: [Periodic; 2],
    a_sq: [Periodic; 2],
    omega: Periodic,
    j0: usize,
}

impl BranchProfiles {
    pub fn new(m: &Medium, j0: usize) -> Self {
        BranchProfiles {
            kappa: [m.kappa_profile(0, TABLE_SIZE), m.kappa_profile(1, TABLE_SIZE)],
            a_sq: [m.coupling_sq_profile(0, TABLE_SIZE), m.coupling_sq_profile(1, TABLE_SIZE)],
            omega: m.omega_profile(j0, TABLE_SIZE),
            j0,
        }
    }
}

fn horner(coeffs: &[Series], x: &Series) -> Series {
    let mut acc = coeffs[0].clone();
    for co in &coeffs[1..] {
        acc = &(&acc * x) + co;
    }
    acc
}

/// Series of the hyperbolic eigenvalue `ν_{j₀}^±` at `(s, φ₀)` up to `order`.
///
/// The root nearest `±sω_{j₀}(φ₀)` is expanded by Newton's method in series
/// arithmetic on the quintic; the shift uses
/// `ν² − s²κ_{j₀} = γ²s²a_{j₀}²/(1 − iκs²/ν − γ²s²a_o²/(ν² − s²κ_o))`.
pub fn hyperbolic_branch_series(
    m: &Medium,
    prof: &BranchProfiles,
    phi0: f64,
    s: f64,
    sign: f64,
    order: usize,
) -> Result<BranchSeries> {
    let j0 = prof.j0;
    let o = 1 - j0;
    let s2 = s * s;
    let sc = |p: &Periodic, k: f64| Series::from_real(&p.taylor(phi0, order).iter().map(|v| v * k).collect::<Vec<_>>());
    let kk = [sc(&prof.kappa[0], s2), sc(&prof.kappa[1], s2)];
    let g = m.gamma * m.gamma * s2;
    let aa = [sc(&prof.a_sq[0], g), sc(&prof.a_sq[1], g)];
    let cc = C64::new(0.0, m.kappa * s2);
    let one = Series::constant(C64::new(1.0, 0.0), order);
    let cst = |z: C64| Series::constant(z, order);
    let ksum = &kk[0] + &kk[1];
    let kprod = &kk[0] * &kk[1];
    let coeffs = [
        one.clone(),
        cst(-cc),
        -&(&ksum + &(&aa[0] + &aa[1])),
        ksum.scale(cc),
        &kprod + &(&(&aa[0] * &kk[1]) + &(&aa[1] * &kk[0])),
        kprod.scale(-cc),
    ];
    let dcoeffs: Vec<Series> = (0..5).map(|i| coeffs[i].scale(C64::new((5 - i) as f64, 0.0))).collect();
    let frame = m.frame(phi0);
    let w0 = sign * s * frame.omega[j0];
    let roots = quintic_roots(&frame, s, m.gamma, m.kappa)?;
    let nu0 = *roots.iter().min_by(|a, b| (*a - w0).norm().partial_cmp(&(*b - w0).norm()).unwrap()).unwrap();
    let mut nu = cst(nu0);
    for _ in 0..(2 + (order.max(1) as f64).log2().ceil() as usize + 2) {
        let p = horner(&coeffs, &nu);
        let dp = horner(&dcoeffs, &nu);
        nu = &nu - &p.div(&dp);
    }
    let omega_s = sc(&prof.omega, sign * s);
    let r = &(&one - &nu.recip().scale(cc)) - &aa[o].div(&(&(&nu * &nu) - &kk[o]));
    let shift = aa[j0].div(&(&r * &(&nu + &omega_s)));
    Ok(BranchSeries { nu, shift })
}

/// One row of [`verify_derivative_bounds`]: largest ratios over the offset grid.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeBoundRow {
    pub s: f64,
    pub k: usize,
    pub sign: f64,
    /// `max_h |∂^k(Re ν ∓ ω(ξ))|/(s·h^{2ℓ−k})`.
    pub max_re_ratio: f64,
    /// `max_h |∂^k Im ν|/h^{2ℓ−k}`.
    pub max_im_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeBoundReport {
    pub phi_bar: f64,
    pub j0: usize,
    pub ell: u32,
    pub rows: Vec<DerivativeBoundRow>,
    /// Estimated constants `c(s)` from the real-part and imaginary-part bounds.
    pub c_re: Vec<(f64, f64)>,
    pub c_im: Vec<(f64, f64)>,
    /// Log-log fits of `c(s)` over the small radii.
    pub small_fit_re: Option<LineFit>,
    pub small_fit_im: Option<LineFit>,
    /// Log-log fits of `c(s)` over the large radii.
    pub large_fit_re: Option<LineFit>,
    pub large_fit_im: Option<LineFit>,
}

/// Checks the derivative bounds near a hyperbolic direction with default
/// grids: `|η−η̄| ∈ [1e-3, 1e-1]`, small radii `[1e-3, 1e-1]`, large `[10, 10³]`.
pub fn verify_derivative_bounds(
    m: &Medium,
    eta_bar: [f64; 2],
    j0: usize,
    k_max: usize,
) -> Result<DerivativeBoundReport> {
    verify_derivative_bounds_with(
        m,
        eta_bar,
        j0,
        k_max,
        &geomspace(1e-3, 1e-1, 5),
        &geomspace(10.0, 1e3, 5),
        &geomspace(1e-3, 1e-1, 9),
    )
}

pub fn verify_derivative_bounds_with(
    m: &Medium,
    eta_bar: [f64; 2],
    j0: usize,
    k_max: usize,
    small: &[f64],
    large: &[f64],
    offsets: &[f64],
) -> Result<DerivativeBoundReport> {
    let phi_bar = check_unit(eta_bar)?;
    let f = m.frame(phi_bar);
    match tag_of(&f, m.gamma) {
        Tag::Hyperbolic(j) | Tag::GammaDegenerate(j) if j == j0 => {}
        _ => {
            return Err(LabError::InvalidInput(format!(
                "direction phi={phi_bar} is not hyperbolic w.r.t. branch {}",
                j0 + 1
            )))
        }
    }
    let ell = match vanishing_order_at(m, phi_bar, j0, TABLE_SIZE) {
        VanishingOrder::Finite(l) => l,
        VanishingOrder::IdenticallyVanishing => {
            return Err(LabError::InvalidInput("coupling vanishes identically; no finite order".into()))
        }
    };
    if k_max > 2 * ell as usize - 1 {
        return Err(LabError::InvalidInput(format!("k_max must not exceed 2l-1 = {}", 2 * ell - 1)));
    }
    let prof = BranchProfiles::new(m, j0);
    let mut rows = Vec::new();
    let mut c_re = Vec::new();
    let mut c_im = Vec::new();
    for &s in small.iter().chain(large) {
        let (mut cr, mut ci) = (0.0f64, 0.0f64);
        for sign in [1.0, -1.0] {
            let mut best = vec![(0.0f64, 0.0f64); k_max + 1];
            for &h in offsets {
                let bs = hyperbolic_branch_series(m, &prof, phi_bar + h, s, sign, k_max)?;
                for (k, b) in best.iter_mut().enumerate() {
                    let d = bs.shift_derivative(k);
                    let scale = h.powi(2 * ell as i32 - k as i32);
                    b.0 = b.0.max(d.re.abs() / (s * scale));
                    b.1 = b.1.max(d.im.abs() / scale);
                }
            }
            for (k, b) in best.iter().enumerate() {
                cr = cr.max(b.0);
                ci = ci.max(b.1);
                rows.push(DerivativeBoundRow { s, k, sign, max_re_ratio: b.0, max_im_ratio: b.1 });
            }
        }
        c_re.push((s, cr));
        c_im.push((s, ci));
    }
    let fit = |pts: &[(f64, f64)], n0: usize, n1: usize| {
        let x: Vec<f64> = pts[n0..n1].iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts[n0..n1].iter().map(|p| p.1).collect();
        loglog(&x, &y)
    };
    let ns = small.len();
    let nt = ns + large.len();
    Ok(DerivativeBoundReport {
        phi_bar,
        j0,
        ell,
        small_fit_re: fit(&c_re, 0, ns),
        small_fit_im: fit(&c_im, 0, ns),
        large_fit_re: fit(&c_re, ns, nt),
        large_fit_im: fit(&c_im, ns, nt),
        rows,
        c_re,
        c_im,
    })
}

/// Angles in `[0, 2π)` where the curvature factor of sheet `j` changes sign.
pub fn flat_points(m: &Medium, j: usize, n: usize) -> Result<Vec<f64>> {
    let p = FresnelProfile::new(m, j, n)?;
    let g = p.factor_samples();
    let h = std::f64::consts::TAU / n as f64;
    let mut out = Vec::new();
    for k in 0..n {
        let (a, b) = (g[k], g[(k + 1) % n]);
        if a == 0.0 || a * b < 0.0 {
            let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
            let flo = p.curvature_factor(lo);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (p.curvature_factor(mid) > 0.0) == (flo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    out.dedup_by(|a, b| angular_distance(*a, *b) < 1e-9);
    Ok(out)
}
