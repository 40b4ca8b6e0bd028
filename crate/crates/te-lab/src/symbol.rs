//! The 5×5 symbol `B(ξ)`, its characteristic quintic, labelled spectra,
//! eigenprojections and the exact per-mode propagator `exp(itB(ξ))`.
//!
//! Row/column order is `(+ω₁, +ω₂, −ω₁, −ω₂, θ)`.

use std::fmt;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::linalg::{self, Mat5, Vec5};
use crate::media::{ElasticEigenFrame, Medium};
use crate::poly;
use crate::{angle_of, C64};

/// `|Im ν| ≤ REAL_TOL·(1+|ν|)` counts as a real eigenvalue.
pub const REAL_TOL: f64 = 1e-9;
/// Relative spectral gap required by the projector formula.
pub const GAP_TOL: f64 = 1e-6;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Branch names of the five eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    Nu0,
    Nu1Plus,
    Nu2Plus,
    Nu1Minus,
    Nu2Minus,
}

impl Label {
    /// Labels in matrix order `(+ω₁, +ω₂, −ω₁, −ω₂, θ)`.
    pub const MATRIX_ORDER: [Label; 5] = [Label::Nu1Plus, Label::Nu2Plus, Label::Nu1Minus, Label::Nu2Minus, Label::Nu0];

    /// `(j, sign)` for the elastic branches, `None` for `ν₀`.
    pub fn branch(self) -> Option<(usize, f64)> {
        match self {
            Label::Nu0 => None,
            Label::Nu1Plus => Some((0, 1.0)),
            Label::Nu2Plus => Some((1, 1.0)),
            Label::Nu1Minus => Some((0, -1.0)),
            Label::Nu2Minus => Some((1, -1.0)),
        }
    }

    pub fn of_branch(j: usize, sign: f64) -> Label {
        match (j, sign > 0.0) {
            (0, true) => Label::Nu1Plus,
            (1, true) => Label::Nu2Plus,
            (0, false) => Label::Nu1Minus,
            _ => Label::Nu2Minus,
        }
    }

    /// Index in matrix order.
    pub fn index(self) -> usize {
        Self::MATRIX_ORDER.iter().position(|&l| l == self).unwrap()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::Nu0 => "nu0",
            Label::Nu1Plus => "nu1+",
            Label::Nu2Plus => "nu2+",
            Label::Nu1Minus => "nu1-",
            Label::Nu2Minus => "nu2-",
        };
        f.write_str(s)
    }
}

/// `B(ξ)` with its homogeneous parts and the scalar data it was built from.
#[derive(Debug, Clone)]
pub struct SymbolMatrix {
    pub xi: [f64; 2],
    pub s: f64,
    pub b: Mat5,
    pub b1: Mat5,
    pub b2: Mat5,
    pub frame: ElasticEigenFrame,
    pub gamma: f64,
    pub kappa: f64,
}

impl SymbolMatrix {
    /// Monic characteristic quintic, descending coefficients.
    pub fn quintic(&self) -> [C64; 6] {
        quintic_coeffs(&self.frame, self.s, self.gamma, self.kappa)
    }

    /// Roots of the quintic.
    pub fn roots(&self) -> Result<[C64; 5]> {
        quintic_roots(&self.frame, self.s, self.gamma, self.kappa)
    }
}

/// Unit-frequency homogeneous parts `(B₁(η), B₂(η))` so that
/// `B(sη) = s·B₁ + s²·B₂`.
pub fn homogeneous_parts(frame: &ElasticEigenFrame, gamma: f64, kappa: f64) -> (Mat5, Mat5) {
    let mut b1 = Mat5::zeros();
    let mut b2 = Mat5::zeros();
    for j in 0..2 {
        b1[(j, j)] = c(frame.omega[j]);
        b1[(j + 2, j + 2)] = c(-frame.omega[j]);
        for row in [j, j + 2] {
            b1[(row, 4)] = I * gamma * frame.a[j];
            b1[(4, row)] = -0.5 * I * gamma * frame.a[j];
        }
    }
    b2[(4, 4)] = I * kappa;
    (b1, b2)
}

/// `B(ξ)` for `ξ = s·η` with a precomputed frame.
pub fn assemble_from_frame(frame: &ElasticEigenFrame, s: f64, gamma: f64, kappa: f64) -> SymbolMatrix {
    let (u1, u2) = homogeneous_parts(frame, gamma, kappa);
    let b1 = u1 * c(s);
    let b2 = u2 * c(s * s);
    SymbolMatrix { xi: [s * frame.eta[0], s * frame.eta[1]], s, b: b1 + b2, b1, b2, frame: frame.clone(), gamma, kappa }
}

fn split_xi(xi: [f64; 2]) -> Result<(f64, f64)> {
    let s = xi[0].hypot(xi[1]);
    if !(s > 0.0) || !s.is_finite() {
        return Err(LabError::InvalidInput("xi must be nonzero and finite".into()));
    }
    Ok((s, angle_of(xi)))
}

/// Assembles `B(ξ)`.
pub fn assemble_b(m: &Medium, xi: [f64; 2]) -> Result<SymbolMatrix> {
    let (s, phi) = split_xi(xi)?;
    let frame = m.frame(phi);
    Ok(assemble_from_frame(&frame, s, m.gamma, m.kappa))
}

/// Quintic coefficients from frame data.
pub fn quintic_coeffs(frame: &ElasticEigenFrame, s: f64, gamma: f64, kappa: f64) -> [C64; 6] {
    let s2 = s * s;
    let k1 = s2 * frame.kappa[0];
    let k2 = s2 * frame.kappa[1];
    let a1 = frame.a[0] * frame.a[0];
    let a2 = frame.a[1] * frame.a[1];
    let g = gamma * gamma * s2;
    let cc = I * kappa * s2;
    [c(1.0), -cc, c(-(k1 + k2) - g * (a1 + a2)), cc * (k1 + k2), c(k1 * k2 + g * (a1 * k2 + a2 * k1)), -cc * (k1 * k2)]
}

/// Characteristic quintic of `B(ξ)` (monic, descending).
pub fn char_quintic(m: &Medium, xi: [f64; 2]) -> Result<[C64; 6]> {
    let (s, phi) = split_xi(xi)?;
    Ok(quintic_coeffs(&m.frame(phi), s, m.gamma, m.kappa))
}

/// Unlabelled roots of the quintic; the cheap path used on grids.
pub fn quintic_roots(frame: &ElasticEigenFrame, s: f64, gamma: f64, kappa: f64) -> Result<[C64; 5]> {
    let co = quintic_coeffs(frame, s, gamma, kappa);
    let r = poly::roots(&co)?;
    Ok([r[0], r[1], r[2], r[3], r[4]])
}

/// Eigenvalues of the assembled matrix by direct 5×5 eigensolve.
pub fn direct_eigenvalues(sm: &SymbolMatrix) -> Result<[C64; 5]> {
    linalg::eigenvalues5(&sm.b)
}

/// Large-frequency predictions in matrix order.
pub fn asymptotic_seed(frame: &ElasticEigenFrame, s: f64, gamma: f64, kappa: f64) -> [C64; 5] {
    let mut out = [C64::new(0.0, 0.0); 5];
    for (idx, l) in Label::MATRIX_ORDER.iter().enumerate() {
        out[idx] = match l.branch() {
            Some((j, sign)) => {
                C64::new(sign * s * frame.omega[j], gamma * gamma * frame.a[j] * frame.a[j] / (2.0 * kappa))
            }
            None => C64::new(0.0, kappa * s * s - gamma * gamma / kappa),
        };
    }
    out
}

fn min_separation(v: &[C64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..v.len() {
        for j in 0..i {
            m = m.min((v[i] - v[j]).norm());
        }
    }
    m
}

fn reorder(roots: &[C64; 5], reference: &[C64; 5]) -> ([C64; 5], f64) {
    let p = poly::optimal_matching(reference, roots);
    let mut out = [C64::new(0.0, 0.0); 5];
    let mut disp: f64 = 0.0;
    for i in 0..5 {
        out[i] = roots[p[i]];
        disp = disp.max((out[i] - reference[i]).norm());
    }
    (out, disp)
}

/// Labelled spectra (matrix order) along the ray through `frame` at each radius.
///
/// Labels are seeded from the large-frequency asymptotics at a large radius
/// and continued inward by optimal matching with adaptive steps.
pub fn label_ray(frame: &ElasticEigenFrame, radii: &[f64], gamma: f64, kappa: f64) -> Result<Vec<[C64; 5]>> {
    if radii.is_empty() {
        return Ok(Vec::new());
    }
    if radii.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(LabError::InvalidInput("radii must be positive".into()));
    }
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[b].partial_cmp(&radii[a]).unwrap());
    let s_max = radii[order[0]];
    let mut s = (4.0 * s_max).max(400.0);
    let seed = asymptotic_seed(frame, s, gamma, kappa);
    let (mut cur, _) = reorder(&quintic_roots(frame, s, gamma, kappa)?, &seed);
    let mut out = vec![[C64::new(0.0, 0.0); 5]; radii.len()];
    // previous accepted point, for a linear predictor in s
    let mut prev: Option<(f64, [C64; 5])> = None;
    for &idx in &order {
        let target = radii[idx];
        let mut ratio: f64 = 0.8;
        while s > target {
            let next = (s * ratio).max(target);
            let mut pred = cur;
            if let Some((sp, vp)) = prev {
                let w = (next - s) / (s - sp);
                for k in 0..5 {
                    pred[k] = cur[k] + (cur[k] - vp[k]) * w;
                }
            }
            let roots = quintic_roots(frame, next, gamma, kappa)?;
            let (cand, disp) = reorder(&roots, &pred);
            let sep = min_separation(&cand);
            if disp <= 0.3 * sep || ratio > 0.999_999 {
                prev = Some((s, cur));
                cur = cand;
                s = next;
                ratio = (ratio * ratio).max(0.8);
            } else {
                ratio = ratio.sqrt();
            }
        }
        out[idx] = cur;
    }
    Ok(out)
}

/// Result of [`spectrum`].
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub xi: [f64; 2],
    /// Eigenvalues in matrix order, labelled by `labels`.
    #[serde(skip)]
    pub eigenvalues: [C64; 5],
    pub labels: [Label; 5],
    /// `‖(νI − B)v‖` for the computed unit eigenvector `v`.
    pub residuals: [f64; 5],
}

/// Labelled spectrum of `B(ξ)`.
pub fn spectrum(m: &Medium, xi: [f64; 2]) -> Result<SpectrumReport> {
    let sm = assemble_b(m, xi)?;
    let ev = label_ray(&sm.frame, &[sm.s], m.gamma, m.kappa)?[0];
    let mut residuals = [0.0; 5];
    for k in 0..5 {
        let shifted = Mat5::identity() * ev[k] - sm.b;
        let (v, _) = linalg::null_vector(&shifted);
        residuals[k] = (shifted * v).norm();
    }
    Ok(SpectrumReport { xi, eigenvalues: ev, labels: Label::MATRIX_ORDER, residuals })
}

impl SpectrumReport {
    pub fn get(&self, l: Label) -> C64 {
        self.eigenvalues[l.index()]
    }
}

/// Smallest distance from `nus[k]` to the other eigenvalues and the
/// threshold it is compared with.
pub fn gap(nus: &[C64; 5], k: usize) -> (f64, f64) {
    let g = (0..5).filter(|&j| j != k).map(|j| (nus[j] - nus[k]).norm()).fold(f64::INFINITY, f64::min);
    let scale = nus.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (g, GAP_TOL * (1.0 + scale))
}

/// Whether every eigenvalue is simple in the sense of [`GAP_TOL`].
pub fn spectrum_is_simple(nus: &[C64; 5]) -> bool {
    (0..5).all(|k| {
        let (g, t) = gap(nus, k);
        g > t
    })
}

/// Product formula `P_ν = Π_{ν̃≠ν} (ν̃I − B)/(ν̃ − ν)`.
pub fn projector(b: &Mat5, nus: &[C64; 5], k: usize) -> Result<Mat5> {
    let (g, t) = gap(nus, k);
    if !(g > t) {
        return Err(LabError::NearMultiple { nu: nus[k], gap: g, threshold: t });
    }
    let mut p = Mat5::identity();
    for j in 0..5 {
        if j != k {
            p = ((Mat5::identity() * nus[j] - b) * p) / (nus[j] - nus[k]);
        }
    }
    Ok(p)
}

/// Eigenprojection for the eigenvalue of `spec` nearest to `nu`.
pub fn eigenprojection(sm: &SymbolMatrix, nu: C64, spec: &SpectrumReport) -> Result<Mat5> {
    let k = (0..5)
        .min_by(|&a, &b| (spec.eigenvalues[a] - nu).norm().partial_cmp(&(spec.eigenvalues[b] - nu).norm()).unwrap())
        .unwrap();
    projector(&sm.b, &spec.eigenvalues, k)
}

/// Components `P_ν v` for every eigenvalue, applying the product formula to
/// a vector. `None` when the spectrum is not simple.
pub fn project_vector(b: &Mat5, nus: &[C64; 5], v: &Vec5) -> Option<[Vec5; 5]> {
    if !spectrum_is_simple(nus) {
        return None;
    }
    let mut out = [Vec5::zeros(); 5];
    for k in 0..5 {
        let mut w = *v;
        for j in 0..5 {
            if j != k {
                w = (Mat5::identity() * nus[j] - b) * w / (nus[j] - nus[k]);
            }
        }
        out[k] = w;
    }
    Some(out)
}

/// `exp(itB(ξ))`, by spectral sum when the spectrum is simple and by Padé
/// scaling-and-squaring otherwise.
pub fn propagator(sm: &SymbolMatrix, t: f64) -> Mat5 {
    if t == 0.0 {
        return Mat5::identity();
    }
    if let Ok(nus) = sm.roots() {
        if spectrum_is_simple(&nus) {
            let mut acc = Mat5::zeros();
            for k in 0..5 {
                let p = projector(&sm.b, &nus, k).expect("simple spectrum");
                acc += p * (I * t * nus[k]).exp();
            }
            return acc;
        }
    }
    linalg::expm(&(sm.b * (I * t)))
}

/// Whether `ν` is real in the sense of [`REAL_TOL`].
pub fn is_real(nu: C64) -> bool {
    nu.im.abs() <= REAL_TOL * (1.0 + nu.norm())
}
