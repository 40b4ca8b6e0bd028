//! Closed-form asymptotic data of the spectrum and the two recursive
//! diagonalisation schemes.
//!
//! Small frequencies: `B(sη) = s·B₁(η) + s²·B₂(η)` is diagonalised around the
//! five distinct eigenvalues of `B₁`. Large frequencies: the dominant heat
//! corner `iκs²` splits off a (4,1) block structure first, then the 4×4 wave
//! block is diagonalised around `±ω_j`.
//!
//! Both schemes share [`perturb`], which solves `M(ε)N(ε) = N(ε)D(ε)` order by
//! order for a power series `M(ε) = Σ εᵖ Mₚ` with diagonal `M₀`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::classify::{tag_of, Tag, HYP_TOL};
use crate::error::{LabError, Result};
use crate::linalg::{self, Mat5};
use crate::media::{ElasticEigenFrame, Medium};
use crate::symbol::{self, homogeneous_parts, label_ray, Label, REAL_TOL};
use crate::{angle_of, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };
/// Expansion order cap of both schemes.
pub const MAX_ORDER: usize = 3;
/// Condition number above which a transform counts as non-invertible.
pub const MAX_CONDITION: f64 = 1e10;
/// Relative gap below which eigenvalues of `B₁` count as coincident.
pub const B1_GAP_TOL: f64 = 1e-8;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn to_dyn(m: &Mat5) -> DMatrix<C64> {
    DMatrix::from_iterator(5, 5, m.iter().cloned())
}

fn to_mat5(m: &DMatrix<C64>) -> Mat5 {
    Mat5::from_iterator(m.iter().cloned())
}

fn non_gamma_degenerate(f: &ElasticEigenFrame, gamma: f64) -> Result<()> {
    match tag_of(f, gamma) {
        Tag::GammaDegenerate(_) => Err(LabError::GammaDegenerate { phi: f.phi }),
        _ => Ok(()),
    }
}

fn frame_of(m: &Medium, eta: [f64; 2]) -> Result<ElasticEigenFrame> {
    m.elastic_eigen(eta)
}

// ---------------------------------------------------------------------------
// Spectrum of B₁ and the small-frequency coefficients

/// Squares `ν̃₁² ≤ ν̃₂²` of the nonzero eigenvalues of `B₁(η)`.
///
/// They solve `x² − (κ₁+κ₂+γ²)x + κ₁κ₂ + γ²(a₁²κ₂ + a₂²κ₁) = 0`, which covers
/// parabolic, hyperbolic and degenerate directions alike.
pub fn nu_tilde_sq(f: &ElasticEigenFrame, gamma: f64) -> Result<[f64; 2]> {
    non_gamma_degenerate(f, gamma)?;
    let g2 = gamma * gamma;
    let (k1, k2) = (f.kappa[0], f.kappa[1]);
    let (a1, a2) = (f.a[0] * f.a[0], f.a[1] * f.a[1]);
    let p = k1 + k2 + g2;
    let q = k1 * k2 + g2 * (a1 * k2 + a2 * k1);
    let disc = (p * p - 4.0 * q).max(0.0);
    // stable quadratic formula; q > 0 by positivity of A
    let big = 0.5 * (p + disc.sqrt());
    let small = q / big;
    Ok([small, big])
}

/// Eigenvalues `{0, ν̃₁, −ν̃₁, ν̃₂, −ν̃₂}` of `B₁(η)` in that order.
pub fn b1_spectrum(m: &Medium, eta: [f64; 2]) -> Result<[f64; 5]> {
    let f = frame_of(m, eta)?;
    let x = nu_tilde_sq(&f, m.gamma)?;
    let (n1, n2) = (x[0].sqrt(), x[1].sqrt());
    Ok([0.0, n1, -n1, n2, -n2])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallFreqCoeffs {
    pub nu_tilde1: f64,
    pub nu_tilde2: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
}

impl SmallFreqCoeffs {
    /// Second-order predictions `iκs²b₀`, `±sν̃_j + iκs²b_j` in the order
    /// `(ν₀, +ν̃₁, −ν̃₁, +ν̃₂, −ν̃₂)`.
    pub fn predict(&self, s: f64, kappa: f64) -> [C64; 5] {
        let q = kappa * s * s;
        [
            C64::new(0.0, q * self.b0),
            C64::new(s * self.nu_tilde1, q * self.b1),
            C64::new(-s * self.nu_tilde1, q * self.b1),
            C64::new(s * self.nu_tilde2, q * self.b2),
            C64::new(-s * self.nu_tilde2, q * self.b2),
        ]
    }

    pub fn b(&self, j: usize) -> f64 {
        [self.b1, self.b2][j]
    }
}

/// Small-frequency coefficients from a frame.
pub fn small_freq_coeffs_frame(f: &ElasticEigenFrame, gamma: f64) -> Result<SmallFreqCoeffs> {
    let x = nu_tilde_sq(f, gamma)?;
    let g2 = gamma * gamma;
    let a2 = [f.a[0] * f.a[0], f.a[1] * f.a[1]];
    let b0 = 1.0 / (1.0 + g2 * a2[0] / f.kappa[0] + g2 * a2[1] / f.kappa[1]);
    let kmax = f.kappa[0].max(f.kappa[1]);
    let bj = |xj: f64| -> f64 {
        let mut sum = 1.0;
        for i in 0..2 {
            let d = xj - f.kappa[i];
            if d.abs() <= 1e-9 * kmax {
                // ν̃_j² sits on κ_i: hyperbolic (or degenerate) limit b_j = 0
                if a2[i] > HYP_TOL * HYP_TOL || f.is_degenerate() {
                    return 0.0;
                }
                continue;
            }
            sum += g2 * a2[i] * (xj + f.kappa[i]) / (d * d);
        }
        1.0 / sum
    };
    let mut b = [bj(x[0]), bj(x[1])];
    // exact zero at hyperbolic directions w.r.t. j₀ for the root on κ_{j₀}
    for j in 0..2 {
        for i in 0..2 {
            if f.a[i].abs() <= HYP_TOL && (x[j] - f.kappa[i]).abs() <= 1e-9 * kmax {
                b[j] = 0.0;
            }
        }
    }
    Ok(SmallFreqCoeffs { nu_tilde1: x[0].sqrt(), nu_tilde2: x[1].sqrt(), b0, b1: b[0], b2: b[1] })
}

pub fn small_freq_coeffs(m: &Medium, eta: [f64; 2]) -> Result<SmallFreqCoeffs> {
    small_freq_coeffs_frame(&frame_of(m, eta)?, m.gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeFreqCoeffs {
    /// Constant correction of `ν₀`: `−iγ²/κ`.
    #[serde(skip)]
    pub drift0: C64,
    /// `γ²a_j²/(2κ)`.
    pub im_shift1: f64,
    pub im_shift2: f64,
}

impl LargeFreqCoeffs {
    /// Predictions in matrix order `(+ω₁, +ω₂, −ω₁, −ω₂, θ)`.
    pub fn predict(&self, f: &ElasticEigenFrame, s: f64, kappa: f64) -> [C64; 5] {
        let sh = [self.im_shift1, self.im_shift2];
        let mut out = [C64::new(0.0, 0.0); 5];
        for (idx, l) in Label::MATRIX_ORDER.iter().enumerate() {
            out[idx] = match l.branch() {
                Some((j, sign)) => C64::new(sign * s * f.omega[j], sh[j]),
                None => C64::new(0.0, kappa * s * s) + self.drift0,
            };
        }
        out
    }
}

pub fn large_freq_coeffs_frame(f: &ElasticEigenFrame, gamma: f64, kappa: f64) -> LargeFreqCoeffs {
    let g2 = gamma * gamma;
    LargeFreqCoeffs {
        drift0: C64::new(0.0, -g2 / kappa),
        im_shift1: g2 * f.a[0] * f.a[0] / (2.0 * kappa),
        im_shift2: g2 * f.a[1] * f.a[1] / (2.0 * kappa),
    }
}

pub fn large_freq_coeffs(m: &Medium, eta: [f64; 2]) -> Result<LargeFreqCoeffs> {
    Ok(large_freq_coeffs_frame(&frame_of(m, eta)?, m.gamma, m.kappa))
}

// ---------------------------------------------------------------------------
// Generic perturbation scheme

/// Solution of `M(ε)N(ε) = N(ε)D(ε)` up to order `k`.
#[derive(Debug, Clone)]
pub struct Perturbation {
    /// `N₀ = I, N₁, …, N_k`.
    pub n: Vec<DMatrix<C64>>,
    /// `D₀ = M₀, D₁, …, D_k`, block diagonal with respect to the groups.
    pub d: Vec<DMatrix<C64>>,
}

impl Perturbation {
    /// `Σ εᵖ Nₚ`.
    pub fn transform(&self, eps: f64) -> DMatrix<C64> {
        sum_series(&self.n, eps)
    }

    /// `Σ εᵖ Dₚ`.
    pub fn normal_form(&self, eps: f64) -> DMatrix<C64> {
        sum_series(&self.d, eps)
    }
}

fn sum_series(terms: &[DMatrix<C64>], eps: f64) -> DMatrix<C64> {
    let mut acc = DMatrix::zeros(terms[0].nrows(), terms[0].ncols());
    let mut w = 1.0;
    for t in terms {
        acc += t * c(w);
        w *= eps;
    }
    acc
}

/// Recursive diagonaliser modulo blocks.
///
/// `terms[0]` must be diagonal; indices with equal `groups` entries form a
/// block that is kept, all other couplings are removed order by order:
/// `R̃ₘ = Σ_{p≥1} MₚN_{m−p} − Σ_{q=1}^{m−1} N_{m−q}D_q`, `Dₘ` its block part and
/// `Nₘ[i,j] = R̃ₘ[i,j]/(d_j − d_i)` across blocks.
pub fn perturb(terms: &[DMatrix<C64>], groups: &[usize], k: usize, gap_tol: f64) -> Result<Perturbation> {
    let dim = terms[0].nrows();
    if groups.len() != dim || terms.iter().any(|t| t.nrows() != dim || t.ncols() != dim) {
        return Err(LabError::InvalidInput("perturbation terms and groups must agree in size".into()));
    }
    let d0: Vec<C64> = (0..dim).map(|i| terms[0][(i, i)]).collect();
    let scale = d0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..dim {
        for j in 0..dim {
            if i != j && terms[0][(i, j)].norm() > 1e-14 * scale {
                return Err(LabError::InvalidInput("leading perturbation term must be diagonal".into()));
            }
            if groups[i] != groups[j] {
                let gap = (d0[j] - d0[i]).norm();
                if gap < gap_tol * scale {
                    return Err(LabError::NearMultiple { nu: d0[i], gap, threshold: gap_tol * scale });
                }
            }
        }
    }
    let mut n = vec![DMatrix::identity(dim, dim)];
    let mut d = vec![terms[0].clone()];
    for m in 1..=k {
        let mut r = DMatrix::zeros(dim, dim);
        for p in 1..=m.min(terms.len() - 1) {
            r += &terms[p] * &n[m - p];
        }
        for q in 1..m {
            r -= &n[m - q] * &d[q];
        }
        let mut dm = DMatrix::zeros(dim, dim);
        let mut nm = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                if groups[i] == groups[j] {
                    dm[(i, j)] = r[(i, j)];
                } else {
                    nm[(i, j)] = r[(i, j)] / (d0[j] - d0[i]);
                }
            }
        }
        n.push(nm);
        d.push(dm);
    }
    Ok(Perturbation { n, d })
}

fn check_order(k: usize, min: usize) -> Result<()> {
    if k < min || k > MAX_ORDER {
        return Err(LabError::InvalidInput(format!("expansion order must lie in [{min}, {MAX_ORDER}] (got {k})")));
    }
    Ok(())
}

fn split(xi: [f64; 2]) -> Result<(f64, f64)> {
    let s = xi[0].hypot(xi[1]);
    if !(s > 0.0) || !s.is_finite() {
        return Err(LabError::InvalidInput("xi must be nonzero and finite".into()));
    }
    Ok((s, angle_of(xi)))
}

fn checked_inverse(t: &Mat5, what: &str) -> Result<(Mat5, f64)> {
    let cond = linalg::condition_number(t);
    if !(cond <= MAX_CONDITION) {
        return Err(LabError::Numerical(format!("{what} is not invertible here (condition number {cond:e})")));
    }
    let inv = t.try_inverse().ok_or_else(|| LabError::Numerical(format!("{what} is singular")))?;
    Ok((inv, cond))
}

// ---------------------------------------------------------------------------
// Small frequencies

/// Output of [`small_freq_diagonalize`].
#[derive(Debug, Clone)]
pub struct SmallFreqDiag {
    pub s: f64,
    /// Diagonals of `D₁, …, D_{k+1}` (coefficient of `sʲ`), in the order
    /// `(0, ν̃₁, −ν̃₁, ν̃₂, −ν̃₂)` of the leading term.
    pub diag: Vec<[C64; 5]>,
    /// Full transform `T·N_k(s)`, columns approximate eigenvectors of `B`.
    pub transform: Mat5,
    /// `‖(TN)⁻¹B(TN) − Σ sʲDⱼ‖_F`.
    pub residual: f64,
    pub condition: f64,
}

/// Diagonalises `B(ξ)` as `|ξ| → 0` to order `k ∈ [1, 3]`.
pub fn small_freq_diagonalize(m: &Medium, xi: [f64; 2], k: usize) -> Result<SmallFreqDiag> {
    check_order(k, 1)?;
    let (s, phi) = split(xi)?;
    let f = m.frame(phi);
    let x = nu_tilde_sq(&f, m.gamma)?;
    let (u1, u2) = homogeneous_parts(&f, m.gamma, m.kappa);
    let ev = [0.0, x[0].sqrt(), -x[0].sqrt(), x[1].sqrt(), -x[1].sqrt()];
    let scale = 1.0 + ev[3];
    for i in 0..5 {
        for j in 0..i {
            if (ev[i] - ev[j]).abs() < B1_GAP_TOL * scale {
                return Err(LabError::NearMultiple {
                    nu: c(ev[i]),
                    gap: (ev[i] - ev[j]).abs(),
                    threshold: B1_GAP_TOL * scale,
                });
            }
        }
    }
    let mut t = Mat5::zeros();
    for (col, &lam) in ev.iter().enumerate() {
        let (v, _) = linalg::null_vector(&(u1 - Mat5::identity() * c(lam)));
        t.set_column(col, &v);
    }
    let (tinv, _) = checked_inverse(&t, "the eigenbasis of B1")?;
    let d1 = Mat5::from_diagonal(&nalgebra::Vector5::from_iterator(ev.iter().map(|&v| c(v))));
    let m1 = tinv * u2 * t;
    let pert = perturb(&[to_dyn(&d1), to_dyn(&m1)], &[0, 1, 2, 3, 4], k, B1_GAP_TOL)?;
    let tr = t * to_mat5(&pert.transform(s));
    let (trinv, cond) = checked_inverse(&tr, "the small-frequency diagonaliser")?;
    let b = u1 * c(s) + u2 * c(s * s);
    let mut model = Mat5::zeros();
    let mut diag = Vec::with_capacity(k + 1);
    for (p, dp) in pert.d.iter().enumerate() {
        let dp = to_mat5(dp);
        model += dp * c(s.powi(p as i32 + 1));
        diag.push([dp[(0, 0)], dp[(1, 1)], dp[(2, 2)], dp[(3, 3)], dp[(4, 4)]]);
    }
    let residual = (trinv * b * tr - model).norm();
    Ok(SmallFreqDiag { s, diag, transform: tr, residual, condition: cond })
}

// ---------------------------------------------------------------------------
// Large frequencies

/// Output of [`large_freq_blockdiag`].
#[derive(Debug, Clone)]
pub struct LargeFreqDiag {
    pub s: f64,
    /// First-stage (4,1) block terms; entry `p` multiplies `s^{2−p}`.
    pub blocks: Vec<Mat5>,
    /// First-stage remainder `R̃` of order zero in `s` (its block part is `blocks[2]`).
    pub r_tilde0: Mat5,
    /// Diagonals of the fully reduced form; entry `p` multiplies `s^{2−p}`,
    /// matrix order `(+ω₁, +ω₂, −ω₁, −ω₂, θ)`.
    pub diag: Vec<[C64; 5]>,
    /// `M_k(s)·diag(N_{k−1}(s), 1)`.
    pub transform: Mat5,
    /// `‖T⁻¹BT − Σ s^{2−p} diag_p‖_F`.
    pub residual: f64,
    pub condition: f64,
}

/// Two-stage reduction of `B(ξ)` as `|ξ| → ∞` to order `k ∈ [1, 3]`.
pub fn large_freq_blockdiag(m: &Medium, xi: [f64; 2], k: usize) -> Result<LargeFreqDiag> {
    check_order(k, 1)?;
    let (s, phi) = split(xi)?;
    let f = m.frame(phi);
    if f.is_degenerate() {
        return Err(LabError::Degenerate { phi: f.phi, hint: "use the degenerate model eigenvalue instead".into() });
    }
    let (u1, u2) = homogeneous_parts(&f, m.gamma, m.kappa);
    let rho = 1.0 / s;
    // stage one: M(ρ) = B₂ + ρB₁, heat corner against the wave block
    let st1 = perturb(&[to_dyn(&u2), to_dyn(&u1)], &[0, 0, 0, 0, 1], k, 1e-12)?;
    let blocks: Vec<Mat5> = st1.d.iter().map(to_mat5).collect();
    let n1 = to_mat5(&st1.n[1]);
    let r_tilde0 = u1 * n1 - n1 * blocks[1];
    // stage two: W(ρ) = Σ ρᵖ D_{p+1}[upper], p < k
    let w: Vec<DMatrix<C64>> = (1..=k).map(|p| st1.d[p].view((0, 0), (4, 4)).into_owned()).collect();
    let st2 = perturb(&w, &[0, 1, 2, 3], k - 1, 1e-12)?;
    let mut n2 = Mat5::identity();
    n2.view_mut((0, 0), (4, 4)).copy_from(&st2.transform(rho));
    let tr = to_mat5(&st1.transform(rho)) * n2;
    let (trinv, cond) = checked_inverse(&tr, "the large-frequency block diagonaliser")?;
    let mut diag = Vec::with_capacity(k + 1);
    let mut model = Mat5::zeros();
    for p in 0..=k {
        let mut dg = [C64::new(0.0, 0.0); 5];
        dg[4] = blocks[p][(4, 4)];
        if p >= 1 {
            for i in 0..4 {
                dg[i] = st2.d[p - 1][(i, i)];
            }
        }
        for i in 0..5 {
            model[(i, i)] += dg[i] * s.powi(2 - p as i32);
        }
        diag.push(dg);
    }
    let b = u1 * c(s) + u2 * c(s * s);
    let residual = (trinv * b * tr - model).norm();
    Ok(LargeFreqDiag { s, blocks, r_tilde0, diag, transform: tr, residual, condition: cond })
}

// ---------------------------------------------------------------------------
// Hyperbolic directions

/// Limit constants at a non-degenerate hyperbolic direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicLimitData {
    pub phi_bar: f64,
    pub j0: usize,
    pub c: f64,
    pub d: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl HyperbolicLimitData {
    /// Limit of `a_{j₀}²(ξ)/(ν±² − κ_{j₀}(ξ))`: `C ∓ iD|ξ|`.
    pub fn q(&self, s: f64, sign: f64) -> C64 {
        C64::new(self.c, -sign * self.d * s)
    }

    /// Limit of `Im ν±/a_{j₀}²`: `(γ²/2κ)·D²s²/(C² + D²s²)`.
    pub fn im_ratio(&self, s: f64) -> f64 {
        let ds = self.d * s;
        self.gamma * self.gamma / (2.0 * self.kappa) * ds * ds / (self.c * self.c + ds * ds)
    }
}

/// Branch index with vanishing coupling at a hyperbolic direction.
fn hyperbolic_branch(f: &ElasticEigenFrame, gamma: f64) -> Result<usize> {
    match tag_of(f, gamma) {
        Tag::Hyperbolic(j) => Ok(j),
        Tag::GammaDegenerate(_) => Err(LabError::GammaDegenerate { phi: f.phi }),
        Tag::Degenerate => {
            Err(LabError::Degenerate { phi: f.phi, hint: "limit constants need a non-degenerate direction".into() })
        }
        Tag::Parabolic => Err(LabError::InvalidInput(format!("direction phi={} is not hyperbolic", f.phi))),
    }
}

pub fn hyperbolic_limit_constants(m: &Medium, eta_bar: [f64; 2]) -> Result<HyperbolicLimitData> {
    let f = frame_of(m, eta_bar)?;
    let j0 = hyperbolic_branch(&f, m.gamma)?;
    let g2 = m.gamma * m.gamma;
    let c = (1.0 - g2 / (f.kappa[j0] - f.kappa[1 - j0])) / g2;
    let d = m.kappa / (f.omega[j0] * g2);
    Ok(HyperbolicLimitData { phi_bar: f.phi, j0, c, d, gamma: m.gamma, kappa: m.kappa })
}

/// Polynomial extrapolation to `h = 0` through `(hᵢ, vᵢ)` (Neville).
pub fn extrapolate_to_zero(h: &[f64], v: &[f64]) -> f64 {
    let mut p = v.to_vec();
    let n = p.len();
    for lvl in 1..n {
        for i in 0..(n - lvl) {
            p[i] = (h[i + lvl] * p[i] - h[i] * p[i + 1]) / (h[i + lvl] - h[i]);
        }
    }
    p[0]
}

/// Angular offsets of the radial approach used for limits.
pub const LIMIT_OFFSETS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Labelled eigenvalue `ν_j^±` at `s·η(φ)`.
pub fn labelled_eigenvalue(m: &Medium, phi: f64, s: f64, label: Label) -> Result<C64> {
    let f = m.frame(phi);
    Ok(label_ray(&f, &[s], m.gamma, m.kappa)?[0][label.index()])
}

/// Extrapolated `lim Im ν_{j₀}^±/a_{j₀}²` along the approach `φ̄ + h`.
pub fn hyperbolic_im_limit(m: &Medium, data: &HyperbolicLimitData, s: f64, sign: f64) -> Result<f64> {
    let label = Label::of_branch(data.j0, sign);
    let mut vals = Vec::new();
    for &h in &LIMIT_OFFSETS {
        let phi = data.phi_bar + h;
        let a = m.frame(phi).a[data.j0];
        let nu = labelled_eigenvalue(m, phi, s, label)?;
        vals.push(nu.im / (a * a));
    }
    Ok(extrapolate_to_zero(&LIMIT_OFFSETS, &vals))
}

// ---------------------------------------------------------------------------
// Degenerate directions

/// `(δ₋, δ₊)`: eigenvalues of `s·diag(ω₁, ω₂) + (iγ²/2κ)·a⊗a`.
///
/// The square root takes the branch with nonnegative imaginary part, which
/// is continuous through the degenerate direction where its argument is
/// the negative real `−γ⁴/(16κ²)`; there `δ₋ = sω₁`.
pub fn delta_pm(f: &ElasticEigenFrame, s: f64, gamma: f64, kappa: f64) -> (C64, C64) {
    let (w1, w2) = (s * f.omega[0], s * f.omega[1]);
    let g2 = gamma * gamma;
    let diff = w1 - w2;
    let arg = C64::new(
        diff * diff / 4.0 - g2 * g2 / (16.0 * kappa * kappa),
        g2 * diff * (f.a[0] * f.a[0] - f.a[1] * f.a[1]) / (4.0 * kappa),
    );
    let w = I * (-arg).sqrt();
    let mid = C64::new(0.5 * (w1 + w2), g2 / (4.0 * kappa));
    (mid - w, mid + w)
}

/// The degenerate model near an isolated degenerate direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateModel {
    pub phi_bar: f64,
    /// Angular half-width of the admissible cone.
    pub cone: f64,
}

impl DegenerateModel {
    pub fn new(m: &Medium, eta_bar: [f64; 2], cone: f64) -> Result<Self> {
        let f = frame_of(m, eta_bar)?;
        if !f.is_degenerate() {
            return Err(LabError::InvalidInput(format!("direction phi={} is not degenerate", f.phi)));
        }
        if !(cone > 0.0 && cone < 0.5) {
            return Err(LabError::InvalidInput(format!("cone half-width must lie in (0, 0.5) (got {cone})")));
        }
        Ok(DegenerateModel { phi_bar: f.phi, cone })
    }

    /// `(δ₋, δ₊)` at `ξ`, rejecting frequencies outside the cone.
    pub fn eigenvalues(&self, m: &Medium, xi: [f64; 2]) -> Result<(C64, C64)> {
        let (s, phi) = split(xi)?;
        let d = angular_distance(phi, self.phi_bar);
        if d > self.cone {
            return Err(LabError::InvalidInput(format!(
                "direction phi={phi} lies outside the cone of half-width {} around {}",
                self.cone, self.phi_bar
            )));
        }
        Ok(delta_pm(&m.frame(phi), s, m.gamma, m.kappa))
    }
}

pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// `δ₋(ξ)` and `δ₊(ξ)` near a degenerate direction (cone half-width 0.1 rad).
pub fn degenerate_model_eigenvalue(m: &Medium, eta_bar: [f64; 2], xi: [f64; 2]) -> Result<(C64, C64)> {
    DegenerateModel::new(m, eta_bar, 0.1)?.eigenvalues(m, xi)
}

/// The positive-frequency eigenvalue closest to `δ₋` (the hyperbolic one).
pub fn hyperbolic_eigenvalue_near_degenerate(m: &Medium, phi: f64, s: f64) -> Result<C64> {
    let f = m.frame(phi);
    let (dm, _) = delta_pm(&f, s, m.gamma, m.kappa);
    let roots = symbol::quintic_roots(&f, s, m.gamma, m.kappa)?;
    Ok(*roots.iter().min_by(|a, b| (*a - dm).norm().partial_cmp(&(*b - dm).norm()).unwrap()).unwrap())
}

// ---------------------------------------------------------------------------
// Imaginary parts by regime

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    ParabolicLarge,
    ParabolicSmall,
    HyperbolicLarge,
    HyperbolicSmall,
    HyperbolicExact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub s: f64,
    pub label: String,
    pub regime: Regime,
    pub im: f64,
    /// The normalised quantity that the regime bounds.
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

/// Checks the imaginary-part bounds at `η` over `radii` with frequency split `c`.
///
/// Without `eta_bar` the direction must be parabolic: `Im ν > 0` for `s ≥ c`
/// and `Im ν/(κ b s²) ∈ [1/2, 2]` for `s < c`. With `eta_bar` (a hyperbolic
/// direction w.r.t. `j₀`) the branches `ν_{j₀}^±` are checked: the ratio to the
/// limit law `Im ν/a² ≈ (γ²/2κ)D²s²/(C²+D²s²)` must lie in `[1/2, 2]`, and
/// `Im ν_{j₀} = 0` exactly at `η̄`. Violations are returned as data.
pub fn im_part_regimes(
    m: &Medium,
    eta: [f64; 2],
    radii: &[f64],
    c_split: f64,
    eta_bar: Option<[f64; 2]>,
) -> Result<Vec<RegimeRow>> {
    if radii.iter().any(|&s| !(s > 0.0)) || !(c_split > 0.0) {
        return Err(LabError::InvalidInput("radii and the frequency split must be positive".into()));
    }
    let f = frame_of(m, eta)?;
    let labelled = label_ray(&f, radii, m.gamma, m.kappa)?;
    let mut rows = Vec::new();
    match eta_bar {
        None => {
            if tag_of(&f, m.gamma) != Tag::Parabolic {
                return Err(LabError::InvalidInput(format!("direction phi={} is not parabolic", f.phi)));
            }
            let co = small_freq_coeffs_frame(&f, m.gamma)?;
            let bs = [co.b0, co.b1, co.b1, co.b2, co.b2];
            for (&s, nus) in radii.iter().zip(&labelled) {
                if s >= c_split {
                    for (idx, l) in Label::MATRIX_ORDER.iter().enumerate() {
                        let im = nus[idx].im;
                        rows.push(RegimeRow {
                            s,
                            label: l.to_string(),
                            regime: Regime::ParabolicLarge,
                            im,
                            ratio: im,
                            lower: 0.0,
                            upper: f64::INFINITY,
                            ok: im > REAL_TOL * (1.0 + nus[idx].norm()),
                        });
                    }
                } else {
                    let pred = co.predict(s, m.kappa);
                    let perm = crate::poly::optimal_matching(&pred, nus);
                    let names = ["nu0", "+nu_tilde1", "-nu_tilde1", "+nu_tilde2", "-nu_tilde2"];
                    for i in 0..5 {
                        let im = nus[perm[i]].im;
                        let ratio = im / (m.kappa * bs[i] * s * s);
                        rows.push(RegimeRow {
                            s,
                            label: names[i].to_string(),
                            regime: Regime::ParabolicSmall,
                            im,
                            ratio,
                            lower: 0.5,
                            upper: 2.0,
                            ok: (0.5..=2.0).contains(&ratio),
                        });
                    }
                }
            }
        }
        Some(bar) => {
            let data = hyperbolic_limit_constants(m, bar)?;
            let a = f.a[data.j0];
            let exact = angular_distance(f.phi, data.phi_bar) <= 1e-12 || a.abs() <= HYP_TOL;
            for (&s, nus) in radii.iter().zip(&labelled) {
                for sign in [1.0, -1.0] {
                    let l = Label::of_branch(data.j0, sign);
                    let nu = nus[l.index()];
                    if exact {
                        rows.push(RegimeRow {
                            s,
                            label: l.to_string(),
                            regime: Regime::HyperbolicExact,
                            im: nu.im,
                            ratio: nu.im,
                            lower: -REAL_TOL * (1.0 + nu.norm()),
                            upper: REAL_TOL * (1.0 + nu.norm()),
                            ok: symbol::is_real(nu),
                        });
                        continue;
                    }
                    let ratio = nu.im / (a * a) / data.im_ratio(s);
                    rows.push(RegimeRow {
                        s,
                        label: l.to_string(),
                        regime: if s >= c_split { Regime::HyperbolicLarge } else { Regime::HyperbolicSmall },
                        im: nu.im,
                        ratio,
                        lower: 0.5,
                        upper: 2.0,
                        ok: (0.5..=2.0).contains(&ratio),
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn generic() -> Medium {
        Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn b1_spectrum_isotropic_and_identity() {
        let iso = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
        let v = b1_spectrum(&iso, [0.6, 0.8]).unwrap();
        for (x, e) in v.iter().zip([0.0, 1.0, -1.0, 2.0, -2.0]) {
            assert!((x - e).abs() < 1e-12, "{v:?}");
        }
        let id = Medium::cubic(1.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        let v = b1_spectrum(&id, [1.0, 0.0]).unwrap();
        assert!((v[3] - 2f64.sqrt()).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn b1_spectrum_matches_direct_eigensolve() {
        let m = generic();
        let phi: f64 = 0.3;
        let f = m.frame(phi);
        let (u1, _) = homogeneous_parts(&f, m.gamma, m.kappa);
        let mut direct: Vec<f64> = linalg::eigenvalues5(&u1).unwrap().iter().map(|z| z.re).collect();
        direct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ours = b1_spectrum(&m, [phi.cos(), phi.sin()]).unwrap().to_vec();
        ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in direct.iter().zip(&ours) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn b_coefficients() {
        let iso = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
        let co = small_freq_coeffs(&iso, [1.0, 0.0]).unwrap();
        assert!((co.b0 - 0.75).abs() < 1e-14);
        assert_eq!(co.b1, 0.0);
        let id = Medium::cubic(1.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        let co = small_freq_coeffs(&id, [0.6, 0.8]).unwrap();
        assert!((co.b2 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn small_scheme_leading_terms() {
        let m = generic();
        let phi: f64 = 0.3;
        let r = small_freq_diagonalize(&m, [1e-2 * phi.cos(), 1e-2 * phi.sin()], 2).unwrap();
        let co = small_freq_coeffs(&m, [phi.cos(), phi.sin()]).unwrap();
        let d1 = [0.0, co.nu_tilde1, -co.nu_tilde1, co.nu_tilde2, -co.nu_tilde2];
        let d2 = [co.b0, co.b1, co.b1, co.b2, co.b2];
        for i in 0..5 {
            assert!((r.diag[0][i] - c(d1[i])).norm() < 1e-12);
            assert!(
                (r.diag[1][i] - C64::new(0.0, m.kappa * d2[i])).norm() < 1e-10,
                "{i}: {} vs {}",
                r.diag[1][i],
                d2[i]
            );
        }
    }

    #[test]
    fn large_scheme_first_remainder() {
        let m = generic();
        let phi: f64 = 0.3;
        let f = m.frame(phi);
        let r = large_freq_blockdiag(&m, [100.0 * phi.cos(), 100.0 * phi.sin()], 2).unwrap();
        let g2 = m.gamma * m.gamma;
        assert!((r.r_tilde0[(4, 4)] - C64::new(0.0, -g2 / m.kappa)).norm() < 1e-12);
        let a = [f.a[0], f.a[1], f.a[0], f.a[1]];
        for i in 0..4 {
            for j in 0..4 {
                let e = C64::new(0.0, g2 * a[i] * a[j] / (2.0 * m.kappa));
                assert!((r.r_tilde0[(i, j)] - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn perturb_exact_two_by_two() {
        // M(ε) = diag(1, −1) + ε[[0,1],[1,0]] has eigenvalues ±√(1+ε²)
        let m0 = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
        let m1 = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let p = perturb(&[m0, m1], &[0, 1], 3, 1e-12).unwrap();
        assert!(p.d[1].norm() < 1e-15);
        assert!((p.d[2][(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((p.d[2][(1, 1)] - c(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn hyperbolic_constants_generic_cubic() {
        let m = generic();
        let d = hyperbolic_limit_constants(&m, [1.0, 0.0]).unwrap();
        let f = m.frame(0.0);
        assert!((f.kappa[d.j0] - 1.0).abs() < 1e-12);
        assert!((d.c - 1.5).abs() < 1e-12 && (d.d - 1.0).abs() < 1e-12);
        let lim = hyperbolic_im_limit(&m, &d, 1.0, 1.0).unwrap();
        assert!((lim / d.im_ratio(1.0) - 1.0).abs() < 0.02, "{lim} vs {}", d.im_ratio(1.0));
    }

    #[test]
    fn delta_at_degenerate_direction() {
        let m = Medium::cubic(2.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        let eta = [FRAC_PI_4.cos(), FRAC_PI_4.sin()];
        let f = m.frame(FRAC_PI_4);
        assert!(f.is_degenerate());
        let (dm, dp) = degenerate_model_eigenvalue(&m, eta, [10.0 * eta[0], 10.0 * eta[1]]).unwrap();
        let w = 10.0 * f.omega[0];
        assert!((dm - c(w)).norm() < 1e-12);
        assert!((dp - C64::new(w, m.gamma * m.gamma / (2.0 * m.kappa))).norm() < 1e-12);
        assert!(degenerate_model_eigenvalue(&m, eta, [10.0, 0.0]).is_err());
    }

    #[test]
    fn gamma_degenerate_is_rejected() {
        // κ values {3, 1} on the axis, hyperbolic w.r.t. κ = 3 needs γ² = 2
        let n = 64;
        let mats: Vec<_> = (0..n)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / n as f64;
                let (cs, sn) = (phi.cos(), phi.sin());
                nalgebra::Matrix2::new(
                    c(cs * cs + 3.0 * sn * sn),
                    c(-2.0 * cs * sn),
                    c(-2.0 * cs * sn),
                    c(sn * sn + 3.0 * cs * cs),
                )
            })
            .collect();
        let m = Medium::custom_from_matrices(&mats, 2f64.sqrt(), 1.0).unwrap();
        assert!(matches!(b1_spectrum(&m, [1.0, 0.0]), Err(LabError::GammaDegenerate { .. })));
    }
}
