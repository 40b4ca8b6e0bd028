//! Direction taxonomy: parabolic, hyperbolic (a coupling function vanishes),
//! degenerate (`κ₁ = κ₂`) and γ-degenerate (hyperbolic with `γ² = 2κ_{j₀} − tr A`).
//! Also locates the special directions on the circle and measures the
//! vanishing order of the coupling function there.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::media::{ElasticEigenFrame, Medium, TABLE_SIZE};
use crate::spectral::{first_nonzero_derivative, FirstNonzero};

/// `|a_j| ≤ HYP_TOL` marks a hyperbolic direction.
pub const HYP_TOL: f64 = 1e-7;
/// Relative threshold for the zero test of derivatives.
pub const DERIV_ZERO_REL: f64 = 1e-6;
/// Highest derivative order examined.
pub const ORDER_CAP: u32 = 8;
/// Threshold on `|a_j|` for even-order zeros found as local minima.
const EVEN_ZERO_TOL: f64 = 1e-8;
const MERGE_TOL: f64 = 1e-7;
/// Sup-norm below which a coupling function counts as identically zero.
const IDENTICALLY_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tag {
    Parabolic,
    /// Hyperbolic with respect to branch `j0` (0-based).
    Hyperbolic(usize),
    Degenerate,
    /// Hyperbolic with respect to `j0`, but `γ² = 2κ_{j0} − tr A` there.
    GammaDegenerate(usize),
}

impl Tag {
    pub fn j0(self) -> Option<usize> {
        match self {
            Tag::Hyperbolic(j) | Tag::GammaDegenerate(j) => Some(j),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::Parabolic => "parabolic",
            Tag::Hyperbolic(_) => "hyperbolic",
            Tag::Degenerate => "degenerate",
            Tag::GammaDegenerate(_) => "gamma_degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VanishingOrder {
    Finite(u32),
    /// Every derivative up to the cap vanishes (identically zero or order > 8).
    IdenticallyVanishing,
}

impl VanishingOrder {
    pub fn finite(self) -> Option<u32> {
        match self {
            VanishingOrder::Finite(l) => Some(l),
            VanishingOrder::IdenticallyVanishing => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionClass {
    pub tag: Tag,
    pub phi: f64,
    pub eta: [f64; 2],
    pub vanishing_order: Option<VanishingOrder>,
    pub a4_ok: bool,
}

/// Outcome of the special-direction search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Census {
    /// Isolated special directions sorted by angle.
    Isolated(Vec<DirectionClass>),
    /// Coupling function of `branch` vanishes on an arc (isotropic-like):
    /// every direction there is hyperbolic.
    Decoupled { branch: usize },
    /// `κ₁ = κ₂` everywhere.
    AllDegenerate,
}

impl Census {
    pub fn directions(&self) -> &[DirectionClass] {
        match self {
            Census::Isolated(v) => v,
            _ => &[],
        }
    }

    pub fn hyperbolic(&self) -> Vec<&DirectionClass> {
        self.directions().iter().filter(|d| matches!(d.tag, Tag::Hyperbolic(_) | Tag::GammaDegenerate(_))).collect()
    }
}

/// `γ² ≠ 2κ_{j0} − tr A` at a direction hyperbolic with respect to `j0`.
pub fn check_a4(m: &Medium, eta_bar: [f64; 2], j0: usize) -> bool {
    let f = m.frame(crate::angle_of(eta_bar));
    a4_from_frame(&f, j0, m.gamma)
}

fn a4_from_frame(f: &ElasticEigenFrame, j0: usize, gamma: f64) -> bool {
    let tr = f.kappa[0] + f.kappa[1];
    let g2 = gamma * gamma;
    (g2 - (2.0 * f.kappa[j0] - tr)).abs() > 1e-9 * (g2 + tr)
}

/// Vanishing order of `a_{j0}` at `eta_bar` by spectral differentiation.
pub fn vanishing_order(m: &Medium, eta_bar: [f64; 2], j0: usize) -> VanishingOrder {
    vanishing_order_at(m, crate::angle_of(eta_bar), j0, TABLE_SIZE)
}

/// Same as [`vanishing_order`] with an explicit angle and sample count.
pub fn vanishing_order_at(m: &Medium, phi: f64, j0: usize, n: usize) -> VanishingOrder {
    let prof = m.coupling_profile(j0, n);
    // couplings are O(1) (a₁² + a₂² = 1); round-off level means identically zero
    if prof.max_abs_derivative(0) <= IDENTICALLY_ZERO {
        return VanishingOrder::IdenticallyVanishing;
    }
    match first_nonzero_derivative(&prof, phi, 1, ORDER_CAP, DERIV_ZERO_REL) {
        FirstNonzero::Order(l) => VanishingOrder::Finite(l),
        FirstNonzero::AboveCap => VanishingOrder::IdenticallyVanishing,
    }
}

/// Tag of a direction from its frame alone (no vanishing-order work).
pub fn tag_of(f: &ElasticEigenFrame, gamma: f64) -> Tag {
    if f.is_degenerate() {
        return Tag::Degenerate;
    }
    let j = if f.a[0].abs() <= f.a[1].abs() { 0 } else { 1 };
    if f.a[j].abs() <= HYP_TOL {
        if a4_from_frame(f, j, gamma) {
            Tag::Hyperbolic(j)
        } else {
            Tag::GammaDegenerate(j)
        }
    } else {
        Tag::Parabolic
    }
}

/// Classifies one direction.
pub fn classify_direction(m: &Medium, eta: [f64; 2]) -> DirectionClass {
    classify_angle(m, crate::angle_of(eta))
}

pub fn classify_angle(m: &Medium, phi: f64) -> DirectionClass {
    let f = m.frame(phi);
    let tag = tag_of(&f, m.gamma);
    let (vanishing_order, a4_ok) = match tag.j0() {
        Some(j) => (Some(vanishing_order_at(m, phi, j, TABLE_SIZE)), a4_from_frame(&f, j, m.gamma)),
        None => (None, true),
    };
    DirectionClass { tag, phi: f.phi, eta: f.eta, vanishing_order, a4_ok }
}

fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo);
    for _ in 0..200 {
        if hi - lo <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, g(x))
}

/// Zeros of a sampled function on the circle: sign changes refined by
/// bisection plus local minima of `|g|` below `even_tol`.
fn circle_zeros<G: Fn(f64) -> f64>(samples: &[f64], wrap_sign: f64, g: G, even_tol: f64) -> Vec<f64> {
    let n = samples.len();
    let h = TAU / n as f64;
    let mut roots = Vec::new();
    let at = |k: usize| if k < n { samples[k] } else { wrap_sign * samples[k - n] };
    for k in 0..n {
        let (a, b) = (at(k), at(k + 1));
        if a == 0.0 {
            roots.push(k as f64 * h);
        } else if a * b < 0.0 {
            let lo = k as f64 * h;
            let hi = lo + h;
            let gg = |x: f64| if x >= TAU { wrap_sign * g(x) } else { g(x) };
            roots.push(bisect(gg, lo, hi).rem_euclid(TAU));
        }
    }
    for k in 0..n {
        let prev = at((k + n - 1) % n).abs();
        let cur = samples[k].abs();
        let next = at(k + 1).abs();
        if cur <= prev && cur <= next && cur < 1e-3 {
            let lo = (k as f64 - 1.0) * h;
            let (x, v) = golden_min(|x| g(x.rem_euclid(TAU)).abs(), lo, lo + 2.0 * h);
            if v <= even_tol {
                roots.push(x.rem_euclid(TAU));
            }
        }
    }
    roots
}

fn merge(v: Vec<f64>) -> Vec<f64> {
    // angles just below 2π belong to the zero direction
    let mut v: Vec<f64> = v.into_iter().map(|x| if TAU - x < 1e-12 { 0.0 } else { x }).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last() {
            Some(&l) if (x - l).abs() < MERGE_TOL => {}
            _ => out.push(x),
        }
    }
    if out.len() > 1 && (out[0] + TAU - out[out.len() - 1]).abs() < MERGE_TOL {
        out.pop();
    }
    out
}

/// Sign bisection locates a zero of order ℓ only to about eps^(1/ℓ); the
/// (ℓ−1)-th derivative has a simple zero at the same point, so Newton on the
/// spectral derivative restores full accuracy.
fn refine_multiple_zero(prof: &crate::spectral::Periodic, phi: f64, h: f64) -> f64 {
    let l = match first_nonzero_derivative(prof, phi, 1, ORDER_CAP, DERIV_ZERO_REL) {
        FirstNonzero::Order(l) if l >= 2 => l,
        _ => return phi,
    };
    let mut x = phi;
    for _ in 0..20 {
        let g = prof.derivative(l - 1, x);
        let dg = prof.derivative(l, x);
        if dg == 0.0 {
            break;
        }
        let step = g / dg;
        x -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    if (x - phi).abs() < h {
        x.rem_euclid(TAU)
    } else {
        phi
    }
}

/// Locates all isolated special directions with a scan of `n_scan` angles.
pub fn find_special_directions(m: &Medium, n_scan: usize) -> crate::Result<Census> {
    if n_scan < 256 || !n_scan.is_power_of_two() {
        return Err(crate::LabError::InvalidInput(format!(
            "scan resolution must be a power of two >= 256 (got {n_scan})"
        )));
    }
    let frames = m.frames(n_scan);
    if frames.iter().all(|f| f.is_degenerate()) {
        return Ok(Census::AllDegenerate);
    }
    let run_needed = (n_scan / 64).max(8);
    for j in 0..2 {
        let mut run = 0usize;
        let mut best = 0usize;
        for k in 0..(2 * n_scan) {
            if frames[k % n_scan].a[j].abs() <= HYP_TOL {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
        if best >= run_needed {
            return Ok(Census::Decoupled { branch: j });
        }
    }
    let mut angles = Vec::new();
    let h = TAU / n_scan as f64;
    for j in 0..2 {
        let samples: Vec<f64> = frames.iter().map(|f| f.a[j]).collect();
        let wrap = if m.is_antiperiodic(j) { -1.0 } else { 1.0 };
        let prof = m.coupling_profile(j, TABLE_SIZE);
        for phi in circle_zeros(&samples, wrap, |x| m.frame(x).a[j], EVEN_ZERO_TOL) {
            angles.push(refine_multiple_zero(&prof, phi, h));
        }
    }
    let diff: Vec<f64> = frames.iter().map(|f| f.kappa[0] - f.kappa[1]).collect();
    let scale = frames.iter().map(|f| f.kappa[1].abs()).fold(0.0, f64::max);
    angles.extend(circle_zeros(
        &diff,
        1.0,
        |x| {
            let f = m.frame(x);
            f.kappa[0] - f.kappa[1]
        },
        crate::media::DEGENERATE_TOL * scale,
    ));
    let dirs =
        merge(angles).into_iter().map(|phi| classify_angle(m, phi)).filter(|d| d.tag != Tag::Parabolic).collect();
    Ok(Census::Isolated(dirs))
}

/// Smallest chordal distance between two special directions, with the pair.
pub fn closest_pair(dirs: &[DirectionClass]) -> Option<(f64, f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..dirs.len() {
        for j in 0..i {
            let d = (dirs[i].eta[0] - dirs[j].eta[0]).hypot(dirs[i].eta[1] - dirs[j].eta[1]);
            if best.map_or(true, |b| d < b.0) {
                best = Some((d, dirs[j].phi, dirs[i].phi));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn cubic_axis_is_hyperbolic_with_a4() {
        let m = Medium::cubic(3.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let d = classify_direction(&m, [1.0, 0.0]);
        let j = d.tag.j0().expect("hyperbolic");
        assert!((m.frame(0.0).kappa[j] - 1.0).abs() < 1e-12);
        assert!(d.a4_ok);
    }

    #[test]
    fn identity_medium_is_degenerate() {
        let m = Medium::cubic(1.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(classify_direction(&m, [0.6, 0.8]).tag, Tag::Degenerate);
        assert_eq!(find_special_directions(&m, 512).unwrap(), Census::AllDegenerate);
    }

    #[test]
    fn isotropic_is_decoupled() {
        let m = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
        let d = classify_direction(&m, [0.6, 0.8]);
        let j = d.tag.j0().unwrap();
        assert!(m.frame(d.phi).a[j].abs() < 1e-12);
        assert_eq!(d.vanishing_order, Some(VanishingOrder::IdenticallyVanishing));
        assert!(matches!(find_special_directions(&m, 512).unwrap(), Census::Decoupled { .. }));
    }

    #[test]
    fn generic_cubic_has_eight_simple_directions() {
        let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let c = find_special_directions(&m, 1024).unwrap();
        let h = c.hyperbolic();
        assert_eq!(h.len(), 8);
        for (k, d) in h.iter().enumerate() {
            assert!((d.phi - k as f64 * FRAC_PI_4).abs() < 1e-10, "{}", d.phi);
            assert_eq!(d.vanishing_order, Some(VanishingOrder::Finite(1)));
        }
    }

    #[test]
    fn rhombic_case_three_orders() {
        let m = Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let c = find_special_directions(&m, 512).unwrap();
        let h = c.hyperbolic();
        assert_eq!(h.len(), 4);
        for d in h {
            let on_x_axis = d.phi.abs() < 1e-9 || (d.phi - PI).abs() < 1e-9;
            let expect = if on_x_axis { 3 } else { 1 };
            assert_eq!(d.vanishing_order, Some(VanishingOrder::Finite(expect)), "phi = {}", d.phi);
            assert!(on_x_axis || (d.phi - FRAC_PI_2).abs() < 1e-9 || (d.phi - 3.0 * FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn a4_fixture_fails() {
        // A = 1·η⊗η + 3·η⊥⊗η⊥ is hyperbolic w.r.t. the κ = 3 branch everywhere;
        // with γ² = 2 = κ_j0 − κ_other the condition fails by construction.
        let n = 64;
        let mats: Vec<_> = (0..n)
            .map(|k| {
                let phi = TAU * k as f64 / n as f64;
                let (c, s) = (phi.cos(), phi.sin());
                // eigenvector η⊥ has κ = 3, eigenvector η has κ = 1
                let a11 = 1.0 * c * c + 3.0 * s * s;
                let a22 = 1.0 * s * s + 3.0 * c * c;
                let a12 = (1.0 - 3.0) * c * s;
                nalgebra::Matrix2::new(
                    crate::C64::new(a11, 0.0),
                    crate::C64::new(a12, 0.0),
                    crate::C64::new(a12, 0.0),
                    crate::C64::new(a22, 0.0),
                )
            })
            .collect();
        let m = Medium::custom_from_matrices(&mats, 2f64.sqrt(), 1.0).unwrap();
        let d = classify_direction(&m, [1.0, 0.0]);
        let j = d.tag.j0().unwrap();
        assert!((m.frame(0.0).kappa[j] - 3.0).abs() < 1e-10);
        assert!(!check_a4(&m, [1.0, 0.0], j));
        assert!(matches!(d.tag, Tag::GammaDegenerate(_)));
    }

    #[test]
    fn scan_rejects_bad_resolution() {
        let m = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(find_special_directions(&m, 100).is_err());
    }
}
