//! Elastic symbol families `A(η)` on the unit circle, their continuous
//! eigen-branches and the coupling functions `a_j(η) = r_j(η)·η`.
//!
//! Branches are labelled by ascending eigenvalue at `φ = 0` and then continued
//! by eigenvector overlap, so `κ_j` is smooth rather than pointwise sorted.
//! Signs are fixed by the same continuation. At an exactly degenerate
//! direction the frame is the one-sided limit from smaller angles.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use crate::error::{LabError, Result};
use crate::spectral::Periodic;
use crate::{unit, C64};

/// Angular resolution of the precomputed branch table.
pub const TABLE_SIZE: usize = 4096;
/// Relative eigenvalue gap below which a direction counts as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-9;
/// Angular offset used for one-sided limits at degenerate directions.
const ONE_SIDED_STEP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub enum MediumKind {
    Isotropic { lambda: f64, mu: f64 },
    Cubic { tau: f64, mu: f64, lambda: f64 },
    Rhombic { tau1: f64, tau2: f64, mu: f64, lambda: f64 },
    Custom(CustomSamples),
}

/// Hermitian 2×2 samples at `N` equispaced angles `2πk/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomSamples {
    pub a11: Vec<f64>,
    pub a12: Vec<C64>,
    pub a22: Vec<f64>,
}

#[derive(Debug)]
struct CustomInterp {
    a11: Periodic,
    a12: Periodic,
    a22: Periodic,
    real: bool,
}

impl CustomInterp {
    fn at(&self, phi: f64) -> Matrix2<C64> {
        let a12 = self.a12.derivative_complex(0, phi);
        let a12 = if self.real { C64::new(a12.re, 0.0) } else { a12 };
        Matrix2::new(C64::new(self.a11.value(phi), 0.0), a12, a12.conj(), C64::new(self.a22.value(phi), 0.0))
    }
}

/// Continuous eigen-frame at one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticEigenFrame {
    pub phi: f64,
    pub eta: [f64; 2],
    /// Branch eigenvalues `κ_j(η)`.
    pub kappa: [f64; 2],
    /// `ω_j = √κ_j`.
    pub omega: [f64; 2],
    /// Unit eigenvectors `r_j(η)`.
    pub r: [Vector2<C64>; 2],
    /// Coupling values `a_j(η)`.
    pub a: [f64; 2],
}

impl ElasticEigenFrame {
    pub fn is_degenerate(&self) -> bool {
        (self.kappa[0] - self.kappa[1]).abs() <= DEGENERATE_TOL * self.kappa[0].max(self.kappa[1])
    }

    /// The unitary matrix `M(η) = (r_1 | r_2)`.
    pub fn m(&self) -> Matrix2<C64> {
        Matrix2::from_columns(&[self.r[0], self.r[1]])
    }
}

#[derive(Debug)]
struct BranchTable {
    frames: Vec<ElasticEigenFrame>,
    antiperiodic: [bool; 2],
}

/// A thermo-elastic medium: elastic symbol family plus `γ` and `κ`.
#[derive(Debug, Clone)]
pub struct Medium {
    kind: MediumKind,
    pub gamma: f64,
    pub kappa: f64,
    custom: Option<Arc<CustomInterp>>,
    table: Arc<BranchTable>,
}

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(LabError::InvalidMedium(format!("{msg} violated")))
    }
}

impl Medium {
    pub fn isotropic(lambda: f64, mu: f64, gamma: f64, kappa: f64) -> Result<Self> {
        Self::new(MediumKind::Isotropic { lambda, mu }, gamma, kappa)
    }

    pub fn cubic(tau: f64, mu: f64, lambda: f64, gamma: f64, kappa: f64) -> Result<Self> {
        Self::new(MediumKind::Cubic { tau, mu, lambda }, gamma, kappa)
    }

    pub fn rhombic(tau1: f64, tau2: f64, mu: f64, lambda: f64, gamma: f64, kappa: f64) -> Result<Self> {
        Self::new(MediumKind::Rhombic { tau1, tau2, mu, lambda }, gamma, kappa)
    }

    /// Custom medium from Hermitian samples at equispaced angles.
    pub fn custom(samples: CustomSamples, gamma: f64, kappa: f64) -> Result<Self> {
        Self::new(MediumKind::Custom(samples), gamma, kappa)
    }

    /// Custom medium from full 2×2 matrices; rejects non-Hermitian input.
    pub fn custom_from_matrices(mats: &[Matrix2<C64>], gamma: f64, kappa: f64) -> Result<Self> {
        let mut s = CustomSamples { a11: vec![], a12: vec![], a22: vec![] };
        for (k, a) in mats.iter().enumerate() {
            let scale = a.norm().max(1e-300);
            let herm = (a - a.adjoint()).norm();
            if herm > 1e-12 * scale {
                return Err(LabError::InvalidMedium(format!("sample {k} is not Hermitian (|A - A*| = {herm:e})")));
            }
            s.a11.push(a[(0, 0)].re);
            s.a12.push(a[(0, 1)]);
            s.a22.push(a[(1, 1)].re);
        }
        Self::custom(s, gamma, kappa)
    }

    pub fn new(kind: MediumKind, gamma: f64, kappa: f64) -> Result<Self> {
        check(gamma.is_finite() && gamma != 0.0, "gamma != 0")?;
        check(kappa.is_finite() && kappa > 0.0, "kappa > 0")?;
        let custom = match &kind {
            MediumKind::Isotropic { lambda, mu } => {
                check(*mu > 0.0, "mu > 0")?;
                check(lambda + mu > 0.0, "lambda + mu > 0")?;
                None
            }
            MediumKind::Cubic { tau, mu, lambda } => {
                check(*tau > 0.0, "tau > 0")?;
                check(*mu > 0.0, "mu > 0")?;
                check(-2.0 * mu - tau < *lambda, "-2mu - tau < lambda")?;
                check(*lambda < *tau, "lambda < tau")?;
                None
            }
            MediumKind::Rhombic { tau1, tau2, mu, lambda } => {
                check(*tau1 > 0.0, "tau1 > 0")?;
                check(*tau2 > 0.0, "tau2 > 0")?;
                check(*mu > 0.0, "mu > 0")?;
                let g = (tau1 * tau2).sqrt();
                check(-2.0 * mu - g < *lambda, "-2mu - sqrt(tau1 tau2) < lambda")?;
                check(*lambda < g, "lambda < sqrt(tau1 tau2)")?;
                None
            }
            MediumKind::Custom(s) => {
                let n = s.a11.len();
                if n < 8 || !n.is_power_of_two() || s.a12.len() != n || s.a22.len() != n {
                    return Err(LabError::InvalidMedium(format!(
                        "custom table needs N equal-length columns with N a power of two >= 8 (got {n})"
                    )));
                }
                if s.a11.iter().chain(s.a22.iter()).any(|v| !v.is_finite())
                    || s.a12.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
                {
                    return Err(LabError::InvalidMedium("custom table contains non-finite entries".into()));
                }
                for k in 0..n {
                    let det = s.a11[k] * s.a22[k] - s.a12[k].norm_sqr();
                    if !(s.a11[k] > 0.0 && det > 0.0) {
                        return Err(LabError::InvalidMedium(format!(
                            "A(eta) positive definite violated at sample {k}"
                        )));
                    }
                }
                let real = s.a12.iter().all(|z| z.im == 0.0);
                Some(Arc::new(CustomInterp {
                    a11: Periodic::from_samples(&s.a11, false),
                    a12: Periodic::from_complex_samples(&s.a12, false),
                    a22: Periodic::from_samples(&s.a22, false),
                    real,
                }))
            }
        };
        let mut m = Medium {
            kind,
            gamma,
            kappa,
            custom,
            table: Arc::new(BranchTable { frames: Vec::new(), antiperiodic: [false; 2] }),
        };
        for k in 0..64 {
            let a = m.symbol_at(TAU * k as f64 / 64.0);
            let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).re;
            if !(a[(0, 0)].re > 0.0 && det > 0.0) {
                return Err(LabError::InvalidMedium(format!(
                    "A(eta) positive definite violated at phi = {}",
                    TAU * k as f64 / 64.0
                )));
            }
        }
        m.table = Arc::new(m.sweep()?);
        Ok(m)
    }

    pub fn kind(&self) -> &MediumKind {
        &self.kind
    }

    /// Short human-readable name, e.g. `cubic(3,1,1)`.
    pub fn name(&self) -> String {
        match &self.kind {
            MediumKind::Isotropic { lambda, mu } => format!("isotropic({lambda},{mu})"),
            MediumKind::Cubic { tau, mu, lambda } => format!("cubic({tau},{mu},{lambda})"),
            MediumKind::Rhombic { tau1, tau2, mu, lambda } => format!("rhombic({tau1},{tau2},{mu},{lambda})"),
            MediumKind::Custom(s) => format!("custom(N={})", s.a11.len()),
        }
    }

    /// True when `A(−η) = A(η)` holds by construction.
    pub fn is_even(&self) -> bool {
        !matches!(self.kind, MediumKind::Custom(_))
    }

    /// Whether branch `j`'s eigenvector changes sign after one loop.
    pub fn is_antiperiodic(&self, j: usize) -> bool {
        self.table.antiperiodic[j]
    }

    /// `A(η)` at the angle `phi`.
    pub fn symbol_at(&self, phi: f64) -> Matrix2<C64> {
        let [e1, e2] = unit(phi);
        let r = |x: f64| C64::new(x, 0.0);
        match &self.kind {
            MediumKind::Isotropic { lambda, mu } => {
                let l = lambda + mu;
                Matrix2::new(r(mu + l * e1 * e1), r(l * e1 * e2), r(l * e1 * e2), r(mu + l * e2 * e2))
            }
            MediumKind::Cubic { tau, mu, lambda } => Matrix2::new(
                r((tau - mu) * e1 * e1 + mu),
                r((lambda + mu) * e1 * e2),
                r((lambda + mu) * e1 * e2),
                r((tau - mu) * e2 * e2 + mu),
            ),
            MediumKind::Rhombic { tau1, tau2, mu, lambda } => Matrix2::new(
                r((tau1 - mu) * e1 * e1 + mu),
                r((lambda + mu) * e1 * e2),
                r((lambda + mu) * e1 * e2),
                r((tau2 - mu) * e2 * e2 + mu),
            ),
            MediumKind::Custom(_) => self.custom.as_ref().expect("custom interpolant").at(phi),
        }
    }

    /// `A(η)` for a unit vector `eta`.
    pub fn elastic_symbol(&self, eta: [f64; 2]) -> Result<Matrix2<C64>> {
        let n = eta[0].hypot(eta[1]);
        if (n - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidInput(format!("eta must be a unit vector (|eta| = {n})")));
        }
        Ok(self.symbol_at(crate::angle_of(eta)))
    }

    /// Unordered eigenpairs of `A` at `phi`.
    fn raw_eigen(&self, phi: f64) -> ([f64; 2], [Vector2<C64>; 2]) {
        let a = self.symbol_at(phi);
        let real = a.iter().all(|z| z.im == 0.0);
        if real {
            let ar = a.map(|z| z.re);
            let e = ar.symmetric_eigen();
            let v0 = e.eigenvectors.column(0).map(|x| C64::new(x, 0.0));
            let v1 = e.eigenvectors.column(1).map(|x| C64::new(x, 0.0));
            ([e.eigenvalues[0], e.eigenvalues[1]], [v0, v1])
        } else {
            let e = a.symmetric_eigen();
            let v0 = e.eigenvectors.column(0).into_owned();
            let v1 = e.eigenvectors.column(1).into_owned();
            ([e.eigenvalues[0], e.eigenvalues[1]], [v0, v1])
        }
    }

    /// Frame at `phi`, continued from the reference vectors `reference`.
    fn continue_frame(&self, phi: f64, reference: &[Vector2<C64>; 2]) -> ElasticEigenFrame {
        let (mut lam, mut vecs) = self.raw_eigen(phi);
        let degenerate = (lam[0] - lam[1]).abs() <= DEGENERATE_TOL * lam[0].abs().max(lam[1].abs());
        if degenerate {
            // one-sided limit: eigenvectors from just below phi
            let (_, v) = self.raw_eigen(phi - ONE_SIDED_STEP);
            vecs = v;
            let mean = 0.5 * (lam[0] + lam[1]);
            lam = [mean, mean];
        }
        let ov = |t: &Vector2<C64>, v: &Vector2<C64>| t.dotc(v).norm();
        let same = ov(&reference[0], &vecs[0]) + ov(&reference[1], &vecs[1]);
        let swap = ov(&reference[0], &vecs[1]) + ov(&reference[1], &vecs[0]);
        if swap > same {
            lam.swap(0, 1);
            vecs.swap(0, 1);
        }
        let eta = unit(phi);
        let eta_c = Vector2::new(C64::new(eta[0], 0.0), C64::new(eta[1], 0.0));
        let mut r = vecs;
        let mut a = [0.0; 2];
        for j in 0..2 {
            let v = r[j] / C64::new(r[j].norm(), 0.0);
            let ac = v.dotc(&eta_c);
            // gauge: make a_j real when it is resolvable, otherwise align with the reference
            let phase = if ac.norm() > 1e-12 {
                ac / ac.norm()
            } else {
                let o = reference[j].dotc(&v);
                if o.norm() > 0.0 {
                    o.conj() / o.norm()
                } else {
                    C64::new(1.0, 0.0)
                }
            };
            let mut w = v * phase;
            if reference[j].dotc(&w).re < 0.0 {
                w = -w;
            }
            r[j] = w;
            a[j] = w.dotc(&eta_c).re;
        }
        let kappa = lam;
        ElasticEigenFrame { phi, eta, kappa, omega: [kappa[0].max(0.0).sqrt(), kappa[1].max(0.0).sqrt()], r, a }
    }

    fn sweep(&self) -> Result<BranchTable> {
        let n = TABLE_SIZE;
        let (lam, mut vecs) = self.raw_eigen(0.0);
        let mut order = [0usize, 1];
        if lam[1] < lam[0] {
            order = [1, 0];
        }
        if (lam[0] - lam[1]).abs() <= DEGENERATE_TOL * lam[0].abs().max(lam[1].abs()) {
            let one = C64::new(1.0, 0.0);
            let zero = C64::new(0.0, 0.0);
            vecs = [Vector2::new(one, zero), Vector2::new(zero, one)];
            order = [0, 1];
        }
        // lexicographically positive seed
        let mut seed = [vecs[order[0]], vecs[order[1]]];
        for v in seed.iter_mut() {
            let lead = if v[0].norm() > 1e-14 { v[0] } else { v[1] };
            *v *= lead.conj() / lead.norm();
        }
        let mut frames = Vec::with_capacity(n);
        let mut reference = seed;
        for k in 0..n {
            let f = self.continue_frame(TAU * k as f64 / n as f64, &reference);
            reference = f.r;
            frames.push(f);
        }
        let closing = self.continue_frame(TAU, &reference);
        let f0 = &frames[0];
        let same = f0.r[0].dotc(&closing.r[0]).norm() + f0.r[1].dotc(&closing.r[1]).norm();
        let swap = f0.r[0].dotc(&closing.r[1]).norm() + f0.r[1].dotc(&closing.r[0]).norm();
        if swap > same && !f0.is_degenerate() {
            return Err(LabError::InvalidMedium(
                "eigen-branches exchange labels after one loop; smooth branches do not close".into(),
            ));
        }
        let antiperiodic = [f0.r[0].dotc(&closing.r[0]).re < 0.0, f0.r[1].dotc(&closing.r[1]).re < 0.0];
        Ok(BranchTable { frames, antiperiodic })
    }

    /// Continuous frame at the angle `phi` (any real value).
    pub fn frame(&self, phi: f64) -> ElasticEigenFrame {
        let p = phi.rem_euclid(TAU);
        let n = TABLE_SIZE;
        let step = TAU / n as f64;
        let k = ((p / step).floor() as usize).min(n - 1);
        let base = &self.table.frames[k];
        if (p - base.phi).abs() < 1e-15 {
            return base.clone();
        }
        self.continue_frame(p, &base.r)
    }

    /// Frame for a unit vector `eta`.
    pub fn elastic_eigen(&self, eta: [f64; 2]) -> Result<ElasticEigenFrame> {
        self.elastic_symbol(eta)?;
        Ok(self.frame(crate::angle_of(eta)))
    }

    /// Coupling values `(a_1, a_2)` at `eta`.
    pub fn coupling(&self, eta: [f64; 2]) -> Result<(f64, f64)> {
        let f = self.elastic_eigen(eta)?;
        Ok((f.a[0], f.a[1]))
    }

    /// Frames at `n` equispaced angles `2πk/n`.
    pub fn frames(&self, n: usize) -> Vec<ElasticEigenFrame> {
        if TABLE_SIZE % n == 0 {
            let stride = TABLE_SIZE / n;
            return (0..n).map(|k| self.table.frames[k * stride].clone()).collect();
        }
        (0..n).map(|k| self.frame(TAU * k as f64 / n as f64)).collect()
    }

    /// Spectral interpolant of `κ_j` on the circle from `n` samples.
    pub fn kappa_profile(&self, j: usize, n: usize) -> Periodic {
        let s: Vec<f64> = self.frames(n).iter().map(|f| f.kappa[j]).collect();
        Periodic::from_samples(&s, false)
    }

    /// Spectral interpolant of `ω_j`.
    pub fn omega_profile(&self, j: usize, n: usize) -> Periodic {
        let s: Vec<f64> = self.frames(n).iter().map(|f| f.omega[j]).collect();
        Periodic::from_samples(&s, false)
    }

    /// Spectral interpolant of `a_j` (anti-periodic if the branch flips).
    pub fn coupling_profile(&self, j: usize, n: usize) -> Periodic {
        let s: Vec<f64> = self.frames(n).iter().map(|f| f.a[j]).collect();
        Periodic::from_samples(&s, self.is_antiperiodic(j))
    }

    /// Spectral interpolant of `a_j²`.
    pub fn coupling_sq_profile(&self, j: usize, n: usize) -> Periodic {
        let s: Vec<f64> = self.frames(n).iter().map(|f| f.a[j] * f.a[j]).collect();
        Periodic::from_samples(&s, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn validation_messages() {
        let e = Medium::cubic(1.0, 1.0, 2.0, 1.0, 1.0).unwrap_err();
        assert_eq!(e, LabError::InvalidMedium("lambda < tau violated".into()));
        assert!(Medium::cubic(3.0, 1.0, 1.0, 1.0, 1.0).is_ok());
        assert!(Medium::rhombic(3.0, 2.0, 1.0, 1.0, 1.0, 1.0).is_ok());
        assert!(Medium::isotropic(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Medium::isotropic(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Medium::isotropic(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn symbol_values() {
        let m = Medium::cubic(3.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let a = m.elastic_symbol([1.0, 0.0]).unwrap();
        assert_eq!(a, Matrix2::new(r(3.0), r(0.0), r(0.0), r(1.0)));
        let s = 0.5f64.sqrt();
        let a = m.elastic_symbol([s, s]).unwrap();
        assert!((a - Matrix2::new(r(2.0), r(1.0), r(1.0), r(2.0))).norm() < 1e-14);
        assert!(m.elastic_symbol([1.0, 0.1]).is_err());
    }

    #[test]
    fn cubic_axis_frame() {
        let m = Medium::cubic(3.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let f = m.elastic_eigen([1.0, 0.0]).unwrap();
        let j = if f.kappa[0] < f.kappa[1] { 0 } else { 1 };
        assert!((f.kappa[j] - 1.0).abs() < 1e-14 && (f.kappa[1 - j] - 3.0).abs() < 1e-14);
        assert!(f.a[j].abs() < 1e-14);
        assert!((f.r[j][1].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn isotropic_couplings() {
        let m = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
        for k in 0..37 {
            let f = m.frame(0.17 * k as f64);
            let (small, big) = if f.a[0].abs() < f.a[1].abs() { (0, 1) } else { (1, 0) };
            assert!(f.a[small].abs() < 1e-12);
            assert!((f.a[big].abs() - 1.0).abs() < 1e-12);
            assert!((f.kappa[small] - 1.0).abs() < 1e-12 && (f.kappa[big] - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_everywhere_medium() {
        let m = Medium::cubic(1.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        for k in 0..10 {
            let f = m.frame(0.3 * k as f64);
            assert!(f.is_degenerate());
            assert!((f.a[0] * f.a[0] + f.a[1] * f.a[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn branch_continuity_through_crossings() {
        // weakly coupled cubic: A = diag(η1²+1, η2²+1) crosses on the diagonals
        let m = Medium::cubic(2.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        let fr = m.frames(512);
        for w in fr.windows(2) {
            for j in 0..2 {
                assert!(w[0].r[j].dotc(&w[1].r[j]).norm() > 0.99);
            }
        }
        // the smooth branch starting as the smaller eigenvalue is η2² + 1
        let f = m.frame(1.0);
        assert!((f.kappa[0] - (1.0f64.sin().powi(2) + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn custom_matches_builtin() {
        let b = Medium::rhombic(4.0, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let n = 64;
        let mats: Vec<_> = (0..n).map(|k| b.symbol_at(TAU * k as f64 / n as f64)).collect();
        let c = Medium::custom_from_matrices(&mats, 1.0, 1.0).unwrap();
        for k in 0..20 {
            let phi = 0.31 * k as f64;
            let (fb, fc) = (b.frame(phi), c.frame(phi));
            for j in 0..2 {
                assert!((fb.kappa[j] - fc.kappa[j]).abs() < 1e-10);
                assert!((fb.a[j].abs() - fc.a[j].abs()).abs() < 1e-10);
            }
        }
        let mut bad = mats.clone();
        bad[3][(0, 1)] += r(0.5);
        assert!(Medium::custom_from_matrices(&bad, 1.0, 1.0).is_err());
    }

    #[test]
    fn complex_hermitian_custom() {
        // unitary conjugation of a real medium by diag(1, e^{iφ}) keeps the spectrum
        let b = Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let n = 128;
        let mats: Vec<_> = (0..n)
            .map(|k| {
                let phi = TAU * k as f64 / n as f64;
                let mut a = b.symbol_at(phi);
                let u = C64::from_polar(1.0, 0.4);
                a[(0, 1)] *= u;
                a[(1, 0)] *= u.conj();
                a
            })
            .collect();
        let c = Medium::custom_from_matrices(&mats, 1.0, 1.0).unwrap();
        let f = c.frame(0.9);
        let g = b.frame(0.9);
        for j in 0..2 {
            assert!((f.kappa[j] - g.kappa[j]).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn frame_invariants(phi in 0.0f64..TAU, tau in 1.5f64..5.0, mu in 0.3f64..1.4, lam in -1.0f64..1.4) {
            let m = Medium::cubic(tau, mu, lam, 1.0, 1.0).unwrap();
            let f = m.frame(phi);
            let a = m.symbol_at(phi);
            for j in 0..2 {
                let res = (a * f.r[j] - f.r[j] * C64::new(f.kappa[j], 0.0)).norm();
                prop_assert!(res <= 1e-10 * a.norm());
                prop_assert!((f.r[j].norm() - 1.0).abs() < 1e-12);
            }
            prop_assert!(f.r[0].dotc(&f.r[1]).norm() < 1e-10);
            prop_assert!((f.a[0] * f.a[0] + f.a[1] * f.a[1] - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn even_symmetry(phi in 0.0f64..TAU, t1 in 1.5f64..5.0, t2 in 1.5f64..5.0) {
            let m = Medium::rhombic(t1, t2, 1.0, 0.5, 1.0, 1.0).unwrap();
            let d = m.symbol_at(phi) - m.symbol_at(phi + std::f64::consts::PI);
            prop_assert!(d.norm() < 1e-12);
        }
    }
}
