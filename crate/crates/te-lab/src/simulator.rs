//! Exact per-mode propagation of `D_t V = B(D)V` on a periodic grid,
//! micro-local filters, and decay measurements with power-law fits.
//!
//! Every Fourier mode is decomposed once into its spectral components
//! `P_k V₀`, so evaluating the solution at any time costs one weighted sum per
//! mode plus inverse FFTs.

use std::f64::consts::TAU;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::classify::{classify_angle, closest_pair, find_special_directions, Census};
use crate::fit::{loglog, LineFit};
use crate::linalg::Vec5;
use crate::media::Medium;
use crate::symbol::{assemble_from_frame, label_ray, project_vector, propagator, Label, SymbolMatrix};
use crate::{angle_of, unit, LabError, Result, C64};

pub const DEFAULT_N: usize = 512;
pub const DEFAULT_L: f64 = 200.0;
/// Default Gaussian width in grid cells.
pub const DEFAULT_WIDTH_CELLS: f64 = 4.0;
/// Points with `|x|∞` beyond this fraction of the period form the wrap strip.
pub const WRAP_STRIP: f64 = 0.45;
/// Largest tolerated growth of the share of `|V|²` inside the wrap strip,
/// measured on the unfiltered solution against the initial field.
pub const WRAP_MASS: f64 = 0.01;
/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "TE_LAB_THREADS";
/// Scan resolution for the special directions used by the filters.
const FILTER_SCAN: usize = 4096;
/// Relative mismatch of `Σ P_k v` above which a mode falls back to `expm`.
const SPLIT_TOL: f64 = 1e-8;
/// Nearest root must be closer than this share of the runner-up distance.
const LABEL_AMBIGUITY: f64 = 0.5;

/// Runs `f` on a pool sized by `TE_LAB_THREADS` (all cores when unset).
pub fn with_threads<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let n = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    match n {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Points per axis (power of two).
    pub n: usize,
    /// Physical period.
    pub l: f64,
    /// Zero modes beyond two thirds of the Nyquist index.
    pub dealias: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n: DEFAULT_N, l: DEFAULT_L, dealias: false }
    }
}

impl GridSpec {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        let g = GridSpec { n, l, dealias: false };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(LabError::InvalidInput(format!("grid size must be a power of two >= 16 (got {})", self.n)));
        }
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(LabError::InvalidInput(format!("period must be positive (got {})", self.l)));
        }
        Ok(())
    }

    pub fn cell(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `2πk/L` for the DFT index `k`, with `k ≥ n/2` mapped to `k − n`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        let kk = if k < self.n / 2 { k as f64 } else { k as f64 - self.n as f64 };
        TAU * kk / self.l
    }

    /// Frequency of the row-major mode `idx`; columns run along `x₁`.
    pub fn xi(&self, idx: usize) -> [f64; 2] {
        [self.wavenumber(idx % self.n), self.wavenumber(idx / self.n)]
    }

    /// Coordinate of grid index `k`; the domain is `[−L/2, L/2)`.
    pub fn position(&self, k: usize) -> f64 {
        -0.5 * self.l + k as f64 * self.cell()
    }

    fn keeps(&self, idx: usize) -> bool {
        if !self.dealias {
            return true;
        }
        let lim = self.n as f64 / 3.0;
        let k = |i: usize| {
            let i = i as f64;
            if i < self.n as f64 / 2.0 {
                i
            } else {
                self.n as f64 - i
            }
        };
        k(idx % self.n) <= lim && k(idx / self.n) <= lim
    }

    /// Time until a front leaving the centre reaches the boundary.
    pub fn reliable_time(&self, m: &Medium) -> f64 {
        let w = m.frames(256).iter().map(|f| f.omega[1].max(f.omega[0])).fold(0.0, f64::max);
        self.l / (2.0 * w)
    }
}

/// Complex scalar field on the grid, row-major with rows along `x₂`.
pub type Field = Vec<C64>;

/// Two-dimensional FFT built from row transforms and transposes.
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Fft2 { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    fn pass(&self, plan: &Arc<dyn Fft<f64>>, a: &mut [C64]) {
        let n = self.n;
        a.par_chunks_mut(n).for_each(|row| plan.process(row));
        let mut t = transpose(a, n);
        t.par_chunks_mut(n).for_each(|row| plan.process(row));
        a.copy_from_slice(&transpose(&t, n));
    }

    /// Unnormalised forward transform.
    pub fn forward(&self, a: &mut [C64]) {
        self.pass(&self.fwd, a);
    }

    /// Inverse transform including the `1/n²` factor.
    pub fn inverse(&self, a: &mut [C64]) {
        self.pass(&self.inv, a);
        let s = 1.0 / (self.n * self.n) as f64;
        a.par_iter_mut().for_each(|z| *z *= s);
    }
}

fn transpose(a: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(c, row)| {
        for (r, v) in row.iter_mut().enumerate() {
            *v = a[r * n + c];
        }
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Gaussian,
    SeparableBump,
    Custom,
}

/// Cauchy data `(U₁, U₂, θ₀)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub n: usize,
    pub u1: [Vec<f64>; 2],
    pub u2: [Vec<f64>; 2],
    pub theta0: Vec<f64>,
    pub preset: Preset,
}

/// Centred Gaussian `exp(−|x|²/(2σ²))` with `σ` in grid cells.
pub fn gaussian_field(grid: &GridSpec, width_cells: f64) -> Vec<f64> {
    let s = width_cells * grid.cell();
    let n = grid.n;
    (0..n * n)
        .map(|i| {
            let (x, y) = (grid.position(i % n), grid.position(i / n));
            (-(x * x + y * y) / (2.0 * s * s)).exp()
        })
        .collect()
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

impl CauchyData {
    pub fn zero(grid: &GridSpec) -> Self {
        let z = vec![0.0; grid.len()];
        CauchyData {
            n: grid.n,
            u1: [z.clone(), z.clone()],
            u2: [z.clone(), z.clone()],
            theta0: z,
            preset: Preset::Custom,
        }
    }

    /// The same centred Gaussian in every field.
    pub fn gaussian(grid: &GridSpec, width_cells: f64) -> Self {
        let g = gaussian_field(grid, width_cells);
        CauchyData {
            n: grid.n,
            u1: [g.clone(), g.clone()],
            u2: [g.clone(), g.clone()],
            theta0: g,
            preset: Preset::Gaussian,
        }
    }

    /// Product of compactly supported bumps of half-width `width_cells`.
    pub fn separable_bump(grid: &GridSpec, width_cells: f64) -> Self {
        let w = width_cells * grid.cell();
        let n = grid.n;
        let g: Vec<f64> = (0..n * n).map(|i| bump(grid.position(i % n) / w) * bump(grid.position(i / n) / w)).collect();
        CauchyData {
            n,
            u1: [g.clone(), g.clone()],
            u2: [g.clone(), g.clone()],
            theta0: g,
            preset: Preset::SeparableBump,
        }
    }

    /// Accepts complex samples, rejecting any with a non-negligible imaginary part.
    pub fn from_complex(grid: &GridSpec, fields: [&[C64]; 5]) -> Result<Self> {
        let names = ["U1_x", "U1_y", "U2_x", "U2_y", "theta0"];
        let mut out = Vec::with_capacity(5);
        for (f, name) in fields.iter().zip(names) {
            if f.len() != grid.len() {
                return Err(LabError::InvalidInput(format!(
                    "{name}: expected {} samples, got {}",
                    grid.len(),
                    f.len()
                )));
            }
            let scale = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.im.abs() > 1e-12 * scale.max(1e-300)) {
                return Err(LabError::InvalidInput(format!("{name} is not a real field")));
            }
            out.push(f.iter().map(|z| z.re).collect::<Vec<f64>>());
        }
        let mut it = out.into_iter();
        let mut next = || it.next().unwrap();
        Ok(CauchyData { n: grid.n, u1: [next(), next()], u2: [next(), next()], theta0: next(), preset: Preset::Custom })
    }

    /// Reads `n²` rows `u1x,u1y,u2x,u2y,theta` in row-major point order; a
    /// header line is skipped.
    pub fn from_csv(grid: &GridSpec, text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut cols: [Vec<f64>; 5] = Default::default();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| LabError::Config(format!("data csv: {e}")))?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(f64::from_str).collect();
            match parsed {
                Ok(v) if v.len() == 5 => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(LabError::InvalidInput(format!("data csv line {}: non-finite value", line + 1)));
                    }
                    for (c, x) in cols.iter_mut().zip(v) {
                        c.push(x);
                    }
                }
                Ok(v) => {
                    return Err(LabError::Config(format!(
                        "data csv line {}: expected 5 columns, got {}",
                        line + 1,
                        v.len()
                    )))
                }
                Err(_) if line == 0 && rec.iter().all(|t| t.parse::<f64>().is_err()) => continue,
                Err(_) => {
                    return Err(LabError::InvalidInput(format!(
                        "data csv line {}: fields must be real numbers",
                        line + 1
                    )))
                }
            }
        }
        if cols[0].len() != grid.len() {
            return Err(LabError::Config(format!("data csv: expected {} rows, got {}", grid.len(), cols[0].len())));
        }
        let [a, b, c, d, e] = cols;
        Ok(CauchyData { n: grid.n, u1: [a, b], u2: [c, d], theta0: e, preset: Preset::Custom })
    }
}

/// Frequency-side solution vector, one field per component in the order
/// `(+ω₁, +ω₂, −ω₁, −ω₂, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VField {
    pub grid: GridSpec,
    pub c: [Field; 5],
}

impl VField {
    pub fn zeros(grid: &GridSpec) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.len()];
        VField { grid: *grid, c: [z.clone(), z.clone(), z.clone(), z.clone(), z] }
    }

    pub fn mode(&self, idx: usize) -> Vec5 {
        Vec5::from_fn(|k, _| self.c[k][idx])
    }

    fn from_modes(grid: &GridSpec, modes: Vec<Vec5>) -> Self {
        let mut out = VField::zeros(grid);
        for (k, comp) in out.c.iter_mut().enumerate() {
            comp.par_iter_mut().zip(modes.par_iter()).for_each(|(z, v)| *z = v[k]);
        }
        out
    }

    /// Multiplies every component by a per-mode weight.
    pub fn scale(&mut self, w: &[f64]) {
        for comp in self.c.iter_mut() {
            comp.par_iter_mut().zip(w.par_iter()).for_each(|(z, &x)| *z *= x);
        }
    }

    /// Literal discrete energy `Σ_ξ |V(ξ)|²`.
    pub fn energy(&self) -> f64 {
        self.weighted_energy([1.0; 5])
    }

    /// `Σ_ξ Σ_k w_k |V_k(ξ)|²` with a fixed summation order.
    pub fn weighted_energy(&self, w: [f64; 5]) -> f64 {
        let n = self.grid.n;
        let mut total = 0.0;
        for (k, comp) in self.c.iter().enumerate() {
            let rows: Vec<f64> = comp.par_chunks(n).map(|r| r.iter().map(|z| z.norm_sqr()).sum()).collect();
            total += w[k] * rows.iter().sum::<f64>();
        }
        total
    }

    /// Inverse FFT of every component.
    pub fn to_space(&self, fft: &Fft2) -> [Field; 5] {
        let mut out = self.c.clone();
        for f in out.iter_mut() {
            fft.inverse(f);
        }
        out
    }
}

/// Weights for which `Σ w_k|V_k|²` is non-increasing in time: twice the
/// physical energy `|U_t|² + |√A U|² + |θ|²`.
pub const ENERGY_WEIGHTS: [f64; 5] = [1.0, 1.0, 1.0, 1.0, 2.0];

fn frame_at(m: &Medium, xi: [f64; 2]) -> (f64, crate::ElasticEigenFrame) {
    let s = xi[0].hypot(xi[1]);
    if s == 0.0 {
        (0.0, m.frame(0.0))
    } else {
        (s, m.frame(angle_of(xi)))
    }
}

fn check_data(data: &CauchyData, grid: &GridSpec) -> Result<()> {
    grid.validate()?;
    let fields = [&data.u1[0], &data.u1[1], &data.u2[0], &data.u2[1], &data.theta0];
    if data.n != grid.n || fields.iter().any(|f| f.len() != grid.len()) {
        return Err(LabError::InvalidInput(format!("data does not match the {}x{} grid", grid.n, grid.n)));
    }
    if fields.iter().any(|f| f.iter().any(|x| !x.is_finite())) {
        return Err(LabError::InvalidInput("data contains non-finite values".into()));
    }
    Ok(())
}

/// Initial vector `V⁽⁰⁾` from Cauchy data: `U⁽⁰⁾ = MᵀÛ` and
/// `V_j^± = −i(MᵀÛ₂)_j ± |ξ|ω_j(MᵀÛ₁)_j`, `V₅ = θ̂₀`.
pub fn build_v0(m: &Medium, data: &CauchyData, grid: &GridSpec) -> Result<VField> {
    check_data(data, grid)?;
    with_threads(|| {
        let fft = Fft2::new(grid.n);
        let hat = |f: &Vec<f64>| {
            let mut z: Field = f.iter().map(|&x| C64::new(x, 0.0)).collect();
            fft.forward(&mut z);
            z
        };
        let u1 = [hat(&data.u1[0]), hat(&data.u1[1])];
        let u2 = [hat(&data.u2[0]), hat(&data.u2[1])];
        let th = hat(&data.theta0);
        let modes: Vec<Vec5> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                if !grid.keeps(idx) {
                    return Vec5::zeros();
                }
                let (s, f) = frame_at(m, grid.xi(idx));
                let mt = f.m().transpose();
                let a = mt * nalgebra::Vector2::new(u1[0][idx], u1[1][idx]);
                let b = mt * nalgebra::Vector2::new(u2[0][idx], u2[1][idx]);
                let i = C64::new(0.0, 1.0);
                let mut v = Vec5::zeros();
                for j in 0..2 {
                    let w = s * f.omega[j];
                    v[j] = -i * b[j] + a[j] * w;
                    v[j + 2] = -i * b[j] - a[j] * w;
                }
                v[4] = th[idx];
                v
            })
            .collect();
        Ok(VField::from_modes(grid, modes))
    })
}

/// `D_tU`, `√A(D)U` and `θ` in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub dtu: [Field; 2],
    pub sqrt_a_u: [Field; 2],
    pub theta: Field,
}

/// Inverts the `V` wiring: `D_tU⁽⁰⁾ = (V⁺+V⁻)/2`, `|ξ|ωU⁽⁰⁾ = (V⁺−V⁻)/2`, then
/// `Û = (Mᵀ)⁻¹U⁽⁰⁾` and `√A(ξ) = |ξ| M diag(ω) M*`.
pub fn reconstruct(m: &Medium, v: &VField) -> Reconstruction {
    with_threads(|| {
        let grid = v.grid;
        let fft = Fft2::new(grid.n);
        let parts: Vec<[C64; 5]> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (s, f) = frame_at(m, grid.xi(idx));
                let mm = f.m();
                let inv_t = mm.transpose().try_inverse().expect("eigenvector matrix is unitary");
                let (p0, p1) = (v.c[0][idx], v.c[1][idx]);
                let (q0, q1) = (v.c[2][idx], v.c[3][idx]);
                let dt0 = nalgebra::Vector2::new((p0 + q0) * 0.5, (p1 + q1) * 0.5);
                let dtu = inv_t * dt0;
                let sq = if s == 0.0 {
                    nalgebra::Vector2::zeros()
                } else {
                    // √A Û = M diag(|ξ|ω) M* (Mᵀ)⁻¹ U⁽⁰⁾ and |ξ|ω U⁽⁰⁾ = (V⁺−V⁻)/2
                    let half = nalgebra::Vector2::new((p0 - q0) * 0.5, (p1 - q1) * 0.5);
                    let u0 = nalgebra::Vector2::new(half[0] / (s * f.omega[0]), half[1] / (s * f.omega[1]));
                    let d = nalgebra::Matrix2::new(
                        C64::new(s * f.omega[0], 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(s * f.omega[1], 0.0),
                    );
                    mm * d * mm.adjoint() * inv_t * u0
                };
                [dtu[0], dtu[1], sq[0], sq[1], v.c[4][idx]]
            })
            .collect();
        let mut fields: Vec<Field> = (0..5).map(|k| parts.iter().map(|p| p[k]).collect()).collect();
        for f in fields.iter_mut() {
            fft.inverse(f);
        }
        let mut it = fields.into_iter();
        let mut next = || it.next().unwrap();
        Reconstruction { dtu: [next(), next()], sqrt_a_u: [next(), next()], theta: next() }
    })
}

#[derive(Debug, Clone)]
enum Mode {
    Zero,
    /// `ξ = 0`: `B` vanishes and the mode is constant.
    Constant(Vec5),
    /// Spectral split `v = Σ P_k v` with eigenvalues `ν_k`.
    Spectral {
        nus: [C64; 5],
        parts: [Vec5; 5],
    },
    /// Non-simple spectrum: full matrix exponential at every time.
    Matrix(Box<(SymbolMatrix, Vec5)>),
}

/// Per-mode propagator for one initial field.
pub struct Evolver {
    pub grid: GridSpec,
    modes: Vec<Mode>,
}

impl Evolver {
    pub fn new(m: &Medium, v0: &VField) -> Result<Self> {
        let grid = v0.grid;
        grid.validate()?;
        let modes: Result<Vec<Mode>> = with_threads(|| {
            (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    let v = v0.mode(idx);
                    if v.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                        return Ok(Mode::Zero);
                    }
                    let (s, f) = frame_at(m, grid.xi(idx));
                    if s == 0.0 {
                        return Ok(Mode::Constant(v));
                    }
                    let sm = assemble_from_frame(&f, s, m.gamma, m.kappa);
                    let nus = sm.roots()?;
                    if let Some(parts) = project_vector(&sm.b, &nus, &v) {
                        let sum: Vec5 = parts.iter().sum();
                        if (sum - v).norm() <= SPLIT_TOL * v.norm() {
                            return Ok(Mode::Spectral { nus, parts });
                        }
                    }
                    Ok(Mode::Matrix(Box::new((sm, v))))
                })
                .collect()
        });
        Ok(Evolver { grid, modes: modes? })
    }

    /// Number of modes propagated by the matrix exponential.
    pub fn fallback_modes(&self) -> usize {
        self.modes.iter().filter(|m| matches!(m, Mode::Matrix(_))).count()
    }

    /// `V(t) = exp(itB)V₀` per mode.
    pub fn at(&self, t: f64) -> VField {
        let i = C64::new(0.0, 1.0);
        let modes: Vec<Vec5> = with_threads(|| {
            self.modes
                .par_iter()
                .map(|md| match md {
                    Mode::Zero => Vec5::zeros(),
                    Mode::Constant(v) => *v,
                    Mode::Spectral { nus, parts } => {
                        let mut acc = Vec5::zeros();
                        for k in 0..5 {
                            acc += parts[k] * (i * t * nus[k]).exp();
                        }
                        acc
                    }
                    Mode::Matrix(b) => propagator(&b.0, t) * b.1,
                })
                .collect()
        });
        VField::from_modes(&self.grid, modes)
    }

    /// Keeps only the spectral components chosen by `pick`, which sees the
    /// mode frequency and its eigenvalues. Modes without a spectral split are
    /// rejected because their components cannot be separated.
    pub fn retain<F>(&mut self, pick: F) -> Result<()>
    where
        F: Fn([f64; 2], &[C64; 5]) -> Result<[bool; 5]> + Sync,
    {
        let grid = self.grid;
        with_threads(|| {
            self.modes.par_iter_mut().enumerate().try_for_each(|(idx, md)| match md {
                Mode::Spectral { nus, parts } => {
                    let keep = pick(grid.xi(idx), nus)?;
                    for k in 0..5 {
                        if !keep[k] {
                            parts[k] = Vec5::zeros();
                        }
                    }
                    Ok(())
                }
                Mode::Matrix(_) => Err(LabError::Branch(format!(
                    "mode xi={:?} has a multiple eigenvalue; branch components are not separable",
                    grid.xi(idx)
                ))),
                _ => Ok(()),
            })
        })
    }
}

/// `exp(itB(D))V₀`.
pub fn evolve(m: &Medium, v0: &VField, t: f64) -> Result<VField> {
    Ok(Evolver::new(m, v0)?.at(t))
}

/// Cutoff profile rising from 0 at `lo` to 1 at `2·lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// Quintic smoothstep (C²).
    Smoothstep,
    /// `C^∞` transition built from `exp(−1/x)`.
    Bump,
}

impl Cutoff {
    pub fn chi(self, s: f64, lo: f64) -> f64 {
        let x = (s - lo) / lo;
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            Cutoff::Smoothstep => x * x * x * (10.0 - 15.0 * x + 6.0 * x * x),
            Cutoff::Bump => {
                let f = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
                f(x) / (f(x) + f(1.0 - x))
            }
        }
    }
}

impl FromStr for Cutoff {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoothstep" => Ok(Cutoff::Smoothstep),
            "bump" => Ok(Cutoff::Bump),
            _ => Err(LabError::Config(format!("unknown cutoff '{s}' (smoothstep|bump)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    /// Away from hyperbolic directions.
    Par,
    /// Conical neighbourhood of the hyperbolic directions.
    Hyp,
    /// `|ξ| ≲ c`.
    Low,
    /// `|ξ| ≳ c`.
    High,
    /// Cone around the direction at this angle, projected on its hyperbolic branch pair.
    Branch(f64),
}

impl FilterKind {
    pub fn name(&self) -> String {
        match self {
            FilterKind::Par => "par".into(),
            FilterKind::Hyp => "hyp".into(),
            FilterKind::Low => "low".into(),
            FilterKind::High => "high".into(),
            FilterKind::Branch(phi) => format!("branch:{phi}"),
        }
    }
}

impl FromStr for FilterKind {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "par" => Ok(FilterKind::Par),
            "hyp" => Ok(FilterKind::Hyp),
            "low" => Ok(FilterKind::Low),
            "high" => Ok(FilterKind::High),
            _ => match s.strip_prefix("branch:") {
                Some(p) => p
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .map(|x| FilterKind::Branch(x.rem_euclid(TAU)))
                    .ok_or_else(|| LabError::Config(format!("bad branch angle '{p}'"))),
                None => Err(LabError::Config(format!("unknown filter '{s}' (par|hyp|low|high|branch:PHI)"))),
            },
        }
    }
}

/// Product of filters, e.g. `par+low`; empty means no filtering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterSpec {
    pub kinds: Vec<FilterKind>,
    /// Angular cutoff: cones have chordal radius between `eps` and `2·eps`.
    pub eps: f64,
    /// Frequency split.
    pub c: f64,
    pub cutoff: Cutoff,
}

impl FilterSpec {
    pub fn none() -> Self {
        FilterSpec { kinds: Vec::new(), eps: 0.1, c: 1.0, cutoff: Cutoff::Smoothstep }
    }

    pub fn parse(s: &str, eps: f64, c: f64) -> Result<Self> {
        let kinds = if s.is_empty() || s == "none" {
            Vec::new()
        } else {
            s.split('+').map(|k| k.trim().parse()).collect::<Result<Vec<_>>>()?
        };
        Ok(FilterSpec { kinds, eps, c, cutoff: Cutoff::Smoothstep })
    }

    pub fn name(&self) -> String {
        if self.kinds.is_empty() {
            "none".into()
        } else {
            self.kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join("+")
        }
    }

    fn directional(&self) -> bool {
        self.kinds.iter().any(|k| !matches!(k, FilterKind::Low | FilterKind::High))
    }
}

fn chordal(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Micro-local cutoffs `P_par`, `P_hyp` and frequency bands for one medium.
#[derive(Debug, Clone)]
pub struct MicrolocalFilter {
    pub spec: FilterSpec,
    /// Hyperbolic (including degenerate) directions.
    pub hyperbolic: Vec<[f64; 2]>,
    /// Every direction is hyperbolic, so `P_par ≡ 0`.
    pub all_hyperbolic: bool,
}

impl MicrolocalFilter {
    pub fn new(m: &Medium, spec: &FilterSpec) -> Result<Self> {
        if !(spec.eps > 0.0) || !spec.eps.is_finite() {
            return Err(LabError::InvalidInput(format!("eps must be positive (got {})", spec.eps)));
        }
        if !(spec.c > 0.0) || !spec.c.is_finite() {
            return Err(LabError::InvalidInput(format!("frequency split c must be positive (got {})", spec.c)));
        }
        let mut f = MicrolocalFilter { spec: spec.clone(), hyperbolic: Vec::new(), all_hyperbolic: false };
        if !spec.directional() {
            return Ok(f);
        }
        match find_special_directions(m, FILTER_SCAN)? {
            Census::Decoupled { .. } | Census::AllDegenerate => f.all_hyperbolic = true,
            Census::Isolated(dirs) => {
                if let Some((d, a, b)) = closest_pair(&dirs) {
                    if spec.eps >= 0.5 * d {
                        return Err(LabError::InvalidInput(format!(
                            "eps={} is not below half the gap {d:.6} between the special directions phi={a:.6} and phi={b:.6}",
                            spec.eps
                        )));
                    }
                }
                f.hyperbolic = dirs.iter().map(|d| d.eta).collect();
            }
        }
        for k in &spec.kinds {
            if let FilterKind::Branch(phi) = k {
                if spec.eps >= 1.0 {
                    return Err(LabError::InvalidInput("branch cone needs eps < 1".into()));
                }
                if classify_angle(m, *phi).tag.j0().is_none() {
                    return Err(LabError::InvalidInput(format!("phi={phi} is not a hyperbolic direction")));
                }
            }
        }
        Ok(f)
    }

    /// `Π χ(|η − η̄|)` over hyperbolic `η̄`.
    pub fn p_par(&self, eta: [f64; 2]) -> f64 {
        if self.all_hyperbolic {
            return 0.0;
        }
        self.hyperbolic.iter().map(|&h| self.spec.cutoff.chi(chordal(eta, h), self.spec.eps)).product()
    }

    pub fn p_hyp(&self, eta: [f64; 2]) -> f64 {
        1.0 - self.p_par(eta)
    }

    /// Cone of chordal radius `2·eps` around `phi`.
    pub fn cone(&self, eta: [f64; 2], phi: f64) -> f64 {
        1.0 - self.spec.cutoff.chi(chordal(eta, unit(phi)), self.spec.eps)
    }

    /// Scalar weight at `ξ`. Directional cutoffs vanish at `ξ = 0`.
    pub fn weight(&self, xi: [f64; 2]) -> f64 {
        let s = xi[0].hypot(xi[1]);
        let eta = if s > 0.0 { [xi[0] / s, xi[1] / s] } else { [0.0, 0.0] };
        let low = 1.0 - self.spec.cutoff.chi(s, self.spec.c);
        let mut w = 1.0;
        for k in &self.spec.kinds {
            w *= match k {
                FilterKind::Low => low,
                FilterKind::High => 1.0 - low,
                _ if s == 0.0 => 0.0,
                FilterKind::Par => self.p_par(eta),
                FilterKind::Hyp => self.p_hyp(eta),
                FilterKind::Branch(phi) => self.cone(eta, *phi),
            };
        }
        w
    }

    pub fn apply(&self, f: &mut VField) {
        let grid = f.grid;
        let w: Vec<f64> = (0..grid.len()).into_par_iter().map(|i| self.weight(grid.xi(i))).collect();
        f.scale(&w);
    }

    /// Angles of the branch cones among the filter kinds.
    pub fn branches(&self) -> Vec<f64> {
        self.spec.kinds.iter().filter_map(|k| if let FilterKind::Branch(p) = k { Some(*p) } else { None }).collect()
    }
}

/// Applies one filter kind to a field.
pub fn microlocal_filter(m: &Medium, field: &VField, which: FilterKind, eps: f64, c: f64) -> Result<VField> {
    let spec = FilterSpec { kinds: vec![which], eps, c, cutoff: Cutoff::Smoothstep };
    let f = MicrolocalFilter::new(m, &spec)?;
    let mut out = field.clone();
    with_threads(|| f.apply(&mut out));
    Ok(out)
}

/// Labelled eigenvalues on a polar table covering a cone, used to follow one
/// branch across the cone.
#[derive(Debug, Clone)]
pub struct BranchTracker {
    pub phi_bar: f64,
    pub j0: usize,
    phis: Vec<f64>,
    log_radii: Vec<f64>,
    table: Vec<[C64; 5]>,
    gamma: f64,
    kappa: f64,
}

impl BranchTracker {
    /// Table over angles within `half_angle` of `phi_bar` and radii in `[s_min, s_max]`.
    pub fn new(m: &Medium, phi_bar: f64, half_angle: f64, s_min: f64, s_max: f64) -> Result<Self> {
        let j0 = classify_angle(m, phi_bar)
            .tag
            .j0()
            .ok_or_else(|| LabError::InvalidInput(format!("phi={phi_bar} is not a hyperbolic direction")))?;
        if !(s_min > 0.0 && s_max > s_min) {
            return Err(LabError::InvalidInput("radius range must satisfy 0 < s_min < s_max".into()));
        }
        let np = 129;
        let phis: Vec<f64> =
            (0..np).map(|k| phi_bar - half_angle + 2.0 * half_angle * k as f64 / (np - 1) as f64).collect();
        let radii = crate::fit::geomspace(s_min, s_max, 161);
        let rows: Result<Vec<Vec<[C64; 5]>>> =
            with_threads(|| phis.par_iter().map(|&p| label_ray(&m.frame(p), &radii, m.gamma, m.kappa)).collect());
        let table = rows?.into_iter().flatten().collect();
        Ok(BranchTracker {
            phi_bar,
            j0,
            phis,
            log_radii: radii.iter().map(|r| r.ln()).collect(),
            table,
            gamma: m.gamma,
            kappa: m.kappa,
        })
    }

    fn bracket(grid: &[f64], x: f64) -> Option<(usize, f64)> {
        let n = grid.len();
        if x < grid[0] - 1e-12 || x > grid[n - 1] + 1e-12 {
            return None;
        }
        let step = (grid[n - 1] - grid[0]) / (n - 1) as f64;
        let k = (((x - grid[0]) / step).floor() as usize).min(n - 2);
        Some((k, ((x - grid[k]) / step).clamp(0.0, 1.0)))
    }

    /// Interpolated table value of `label` at `xi`.
    pub fn reference(&self, xi: [f64; 2], label: Label) -> Result<C64> {
        let s = xi[0].hypot(xi[1]);
        let mut phi = angle_of(xi);
        let d = (phi - self.phi_bar + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
        phi = self.phi_bar + d;
        let out = || LabError::Branch(format!("xi={xi:?} lies outside the tracked cone"));
        let (i, u) = Self::bracket(&self.phis, phi).ok_or_else(out)?;
        let (j, v) = Self::bracket(&self.log_radii, s.ln()).ok_or_else(out)?;
        let nr = self.log_radii.len();
        let at = |a: usize, b: usize| self.table[a * nr + b][label.index()];
        Ok(at(i, j) * ((1.0 - u) * (1.0 - v))
            + at(i + 1, j) * (u * (1.0 - v))
            + at(i, j + 1) * ((1.0 - u) * v)
            + at(i + 1, j + 1) * (u * v))
    }

    /// Index in `roots` of the branch `label` at `xi`.
    pub fn pick(&self, xi: [f64; 2], roots: &[C64; 5], label: Label) -> Result<usize> {
        let r = self.reference(xi, label)?;
        let mut d: Vec<(f64, usize)> = roots.iter().enumerate().map(|(k, z)| ((z - r).norm(), k)).collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if d[0].0 > LABEL_AMBIGUITY * d[1].0 {
            return Err(LabError::Branch(format!(
                "branch {label} is ambiguous at xi={xi:?} (distances {:e} and {:e})",
                d[0].0, d[1].0
            )));
        }
        Ok(d[0].1)
    }

    /// The eigenvalue of branch `label` at `xi`, computed exactly.
    pub fn eigenvalue(&self, m: &Medium, xi: [f64; 2], label: Label) -> Result<C64> {
        let s = xi[0].hypot(xi[1]);
        let f = m.frame(angle_of(xi));
        let roots = crate::symbol::quintic_roots(&f, s, self.gamma, self.kappa)?;
        Ok(roots[self.pick(xi, &roots, label)?])
    }

    /// Labels of the hyperbolic pair `ν_{j₀}^±`.
    pub fn pair(&self) -> [Label; 2] {
        [Label::of_branch(self.j0, 1.0), Label::of_branch(self.j0, -1.0)]
    }
}

fn cone_half_angle(eps: f64) -> f64 {
    2.0 * (eps.min(1.0)).asin() * 1.02 + 1e-3
}

fn tracker_for(m: &Medium, grid: &GridSpec, phi: f64, eps: f64) -> Result<BranchTracker> {
    let k = TAU / grid.l;
    let s_max = std::f64::consts::SQRT_2 * std::f64::consts::PI * grid.n as f64 / grid.l;
    BranchTracker::new(m, phi, cone_half_angle(eps), 0.5 * k, 1.01 * s_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `sup_x |V(t,x)|`.
    Sup,
    /// `‖V(t,·)‖₂` with cell weight `(L/n)²`.
    L2,
    /// `sup|D_tU| + sup|√A U| + sup|θ|`.
    Energy,
}

impl Functional {
    pub fn name(self) -> &'static str {
        match self {
            Functional::Sup => "sup",
            Functional::L2 => "l2",
            Functional::Energy => "energy",
        }
    }
}

impl FromStr for Functional {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup" => Ok(Functional::Sup),
            "l2" => Ok(Functional::L2),
            "energy" => Ok(Functional::Energy),
            _ => Err(LabError::Config(format!("unknown functional '{s}' (sup|l2|energy)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayMeasurement {
    pub functional: Functional,
    pub filter: String,
    /// Times actually used (truncated at the first wrap-around).
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// `−slope` of `log norm` against `log t`.
    pub fitted_exponent: Option<f64>,
    /// Standard error of the slope.
    pub ci: Option<f64>,
    pub fit: Option<LineFit>,
    /// First requested time rejected for wrap-around.
    pub wrapped_at: Option<f64>,
    /// `Σ_ξ |V(t,ξ)|²` at each used time.
    pub energy: Vec<f64>,
    /// `Σ_ξ Σ_k w_k |V_k(t,ξ)|²` with [`ENERGY_WEIGHTS`].
    pub weighted_energy: Vec<f64>,
    pub fallback_modes: usize,
}

/// Whether `v` never grows by more than `rel` of its first value.
pub fn non_increasing(v: &[f64], rel: f64) -> bool {
    let scale = v.first().copied().unwrap_or(0.0).abs();
    v.windows(2).all(|w| w[1] <= w[0] + rel * scale)
}

fn sup_norm(fields: &[&Field], n: usize) -> f64 {
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|r| {
            (r * n..(r + 1) * n).map(|i| fields.iter().map(|f| f[i].norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max)
        })
        .collect();
    rows.into_iter().fold(0.0, f64::max)
}

/// Share of `Σ|f|²` in the strip `|x|∞ > WRAP_STRIP·L`.
pub fn wrap_fraction(fields: &[&Field], grid: &GridSpec) -> f64 {
    let n = grid.n;
    let lim = WRAP_STRIP * grid.l;
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|r| {
            let y = grid.position(r).abs();
            let (mut tot, mut strip) = (0.0, 0.0);
            for c in 0..n {
                let e: f64 = fields.iter().map(|f| f[r * n + c].norm_sqr()).sum();
                tot += e;
                if y > lim || grid.position(c).abs() > lim {
                    strip += e;
                }
            }
            (tot, strip)
        })
        .collect();
    let (tot, strip) = rows.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    if tot == 0.0 {
        0.0
    } else {
        strip / tot
    }
}

fn fit_exponent(times: &[f64], norms: &[f64]) -> Option<LineFit> {
    if times.len() < 3 {
        return None;
    }
    loglog(times, norms)
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(LabError::InvalidInput("times must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Builds `V₀`, filters it, evolves it and evaluates `functional` at `times`.
pub fn measure_decay(
    m: &Medium,
    data: &CauchyData,
    grid: &GridSpec,
    filter: &FilterSpec,
    functional: Functional,
    times: &[f64],
) -> Result<DecayMeasurement> {
    check_times(times)?;
    let filt = MicrolocalFilter::new(m, filter)?;
    let v0 = build_v0(m, data, grid)?;
    // filters are scalar multipliers and commute with the evolution, so one
    // unfiltered evolver serves both the wrap test and the measurement
    let full = Evolver::new(m, &v0)?;
    let weights: Vec<f64> = with_threads(|| (0..grid.len()).into_par_iter().map(|i| filt.weight(grid.xi(i))).collect());
    let branches = filt.branches();
    let projected = if branches.is_empty() {
        None
    } else {
        let mut vf = v0.clone();
        vf.scale(&weights);
        let mut ev = Evolver::new(m, &vf)?;
        for phi in branches {
            let tr = tracker_for(m, grid, phi, filter.eps)?;
            let pair = tr.pair();
            ev.retain(|xi, nus| {
                let mut keep = [true; 5];
                if filt.cone(unit(angle_of(xi)), phi) > 0.0 {
                    keep = [false; 5];
                    for l in pair {
                        keep[tr.pick(xi, nus, l)?] = true;
                    }
                }
                Ok(keep)
            })?;
        }
        Some(ev)
    };
    with_threads(|| {
        let fft = Fft2::new(grid.n);
        let mut out = DecayMeasurement {
            functional,
            filter: filter.name(),
            times: Vec::new(),
            norms: Vec::new(),
            fitted_exponent: None,
            ci: None,
            fit: None,
            wrapped_at: None,
            energy: Vec::new(),
            weighted_energy: Vec::new(),
            fallback_modes: full.fallback_modes() + projected.as_ref().map_or(0, |e| e.fallback_modes()),
        };
        // the mean does not propagate; leave it out of the wrap test
        let strip = |v: &VField| {
            let mut w = v.clone();
            for c in w.c.iter_mut() {
                c[0] = C64::new(0.0, 0.0);
            }
            let x = w.to_space(&fft);
            wrap_fraction(&x.iter().collect::<Vec<_>>(), grid)
        };
        let base = strip(&v0);
        for &t in times {
            let vt = full.at(t);
            if strip(&vt) > base + WRAP_MASS {
                out.wrapped_at = Some(t);
                break;
            }
            let v = match &projected {
                Some(ev) => ev.at(t),
                None => {
                    let mut v = vt;
                    v.scale(&weights);
                    v
                }
            };
            let norm = match functional {
                Functional::Sup => {
                    let x = v.to_space(&fft);
                    sup_norm(&x.iter().collect::<Vec<_>>(), grid.n)
                }
                // Parseval: Σ_x |V(x)|² = Σ_ξ |V̂(ξ)|² / n²
                Functional::L2 => (v.energy() / grid.len() as f64).sqrt() * grid.cell(),
                Functional::Energy => {
                    let r = reconstruct(m, &v);
                    sup_norm(&[&r.dtu[0], &r.dtu[1]], grid.n)
                        + sup_norm(&[&r.sqrt_a_u[0], &r.sqrt_a_u[1]], grid.n)
                        + sup_norm(&[&r.theta], grid.n)
                }
            };
            out.times.push(t);
            out.norms.push(norm);
            out.energy.push(v.energy());
            out.weighted_energy.push(v.weighted_energy(ENERGY_WEIGHTS));
        }
        out.fit = fit_exponent(&out.times, &out.norms);
        out.fitted_exponent = out.fit.map(|f| -f.slope);
        out.ci = out.fit.map(|f| f.stderr);
        Ok(out)
    })
}

/// Scalar multiplier used by [`model_multiplier_decay`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplier {
    /// `exp(itν)` for the hyperbolic branch `ν_{j₀}^±` (sign ±1).
    Branch { sign: f64 },
    /// `exp(it|ξ|ω)` with constant `ω`, the pure wave reference.
    ConstantWave { omega: f64 },
}

/// Sup-norm decay of `exp(itν(D))f` where `f` is `data` restricted to the
/// cone of chordal radius `2·eps` around `eta_bar`. Times beyond
/// [`GridSpec::reliable_time`] are cut off as wrapped.
pub fn model_multiplier_decay(
    m: &Medium,
    eta_bar: [f64; 2],
    branch: Multiplier,
    data: &[f64],
    grid: &GridSpec,
    eps: f64,
    times: &[f64],
) -> Result<DecayMeasurement> {
    grid.validate()?;
    check_times(times)?;
    if data.len() != grid.len() || data.iter().any(|x| !x.is_finite()) {
        return Err(LabError::InvalidInput("scalar data does not match the grid".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LabError::InvalidInput(format!("eps must lie in (0, 1) (got {eps})")));
    }
    let phi = angle_of(eta_bar);
    let spec = FilterSpec { kinds: vec![FilterKind::Branch(phi)], eps, c: 1.0, cutoff: Cutoff::Smoothstep };
    let filt = MicrolocalFilter { spec, hyperbolic: Vec::new(), all_hyperbolic: false };
    let tracker = match branch {
        Multiplier::Branch { .. } => Some(tracker_for(m, grid, phi, eps)?),
        Multiplier::ConstantWave { .. } => None,
    };
    with_threads(|| {
        let fft = Fft2::new(grid.n);
        let mut f: Field = data.iter().map(|&x| C64::new(x, 0.0)).collect();
        fft.forward(&mut f);
        let symbols: Result<Vec<(C64, C64)>> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let xi = grid.xi(idx);
                let w = filt.weight(xi);
                if w == 0.0 {
                    return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
                }
                let s = xi[0].hypot(xi[1]);
                let nu = match (branch, &tracker) {
                    (Multiplier::Branch { sign }, Some(tr)) => {
                        tr.eigenvalue(m, xi, Label::of_branch(tr.j0, if sign < 0.0 { -1.0 } else { 1.0 }))?
                    }
                    (Multiplier::ConstantWave { omega }, _) => C64::new(s * omega, 0.0),
                    _ => unreachable!(),
                };
                Ok((f[idx] * w, nu))
            })
            .collect();
        let symbols = symbols?;
        let i = C64::new(0.0, 1.0);
        let mut out = DecayMeasurement {
            functional: Functional::Sup,
            filter: format!("cone:{phi}"),
            times: Vec::new(),
            norms: Vec::new(),
            fitted_exponent: None,
            ci: None,
            fit: None,
            wrapped_at: None,
            energy: Vec::new(),
            weighted_energy: Vec::new(),
            fallback_modes: 0,
        };
        let t_max = grid.reliable_time(m);
        for &t in times {
            if t > t_max {
                out.wrapped_at = Some(t);
                break;
            }
            let mut g: Field = symbols.par_iter().map(|(a, nu)| a * (i * t * nu).exp()).collect();
            let e: f64 = g
                .par_chunks(grid.n)
                .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .collect::<Vec<_>>()
                .iter()
                .sum();
            fft.inverse(&mut g);
            out.times.push(t);
            out.norms.push(sup_norm(&[&g], grid.n));
            out.energy.push(e);
            out.weighted_energy.push(e);
        }
        out.fit = fit_exponent(&out.times, &out.norms);
        out.fitted_exponent = out.fit.map(|f| -f.slope);
        out.ci = out.fit.map(|f| f.stderr);
        Ok(out)
    })
}

/// Default measurement times: 16 geometric points in `[5, 50]`.
pub fn default_times() -> Vec<f64> {
    crate::fit::geomspace(5.0, 50.0, 16)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GridSpec {
        GridSpec { n: 64, l: 40.0, dealias: false }
    }

    fn cubic() -> Medium {
        Medium::cubic(3.0, 1.0, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn fft_round_trip_and_plancherel() {
        let g = small();
        let fft = Fft2::new(g.n);
        let x: Field = gaussian_field(&g, 3.0).iter().enumerate().map(|(i, &v)| C64::new(v, (i % 7) as f64)).collect();
        let mut y = x.clone();
        fft.forward(&mut y);
        let ex: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let ey: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / g.len() as f64;
        assert!((ex - ey).abs() <= 1e-12 * ex);
        fft.inverse(&mut y);
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-12 * (1.0 + a.norm())));
    }

    #[test]
    fn theta_only_data() {
        let g = small();
        let mut d = CauchyData::zero(&g);
        d.theta0 = gaussian_field(&g, 3.0);
        let v = build_v0(&cubic(), &d, &g).unwrap();
        for k in 0..4 {
            assert!(v.c[k].iter().all(|z| z.norm() == 0.0));
        }
        assert!(v.c[4].iter().any(|z| z.norm() > 0.0));
    }

    #[test]
    fn displacement_only_data_pairs() {
        let g = small();
        let mut d = CauchyData::zero(&g);
        d.u1 = [gaussian_field(&g, 3.0), gaussian_field(&g, 2.0)];
        let v = build_v0(&cubic(), &d, &g).unwrap();
        for idx in 0..g.len() {
            for j in 0..2 {
                assert!((v.c[j][idx] + v.c[j + 2][idx]).norm() < 1e-12 * (1.0 + v.c[j][idx].norm()));
            }
        }
    }

    #[test]
    fn semigroup_and_theta_mass() {
        let (m, g) = (cubic(), small());
        let v0 = build_v0(&m, &CauchyData::gaussian(&g, 3.0), &g).unwrap();
        let ev = Evolver::new(&m, &v0).unwrap();
        let a = Evolver::new(&m, &ev.at(1.3)).unwrap().at(2.1);
        let b = ev.at(3.4);
        let scale = b.energy().sqrt();
        let diff: f64 = (0..5).map(|k| a.c[k].iter().zip(&b.c[k]).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()).sum();
        assert!(diff.sqrt() <= 1e-7 * scale);
        assert_eq!(b.c[4][0], v0.c[4][0]);
    }

    #[test]
    fn filters_partition_unity() {
        let m = cubic();
        let spec = FilterSpec::parse("par", 0.2, 1.0).unwrap();
        let f = MicrolocalFilter::new(&m, &spec).unwrap();
        assert_eq!(f.hyperbolic.len(), 8);
        for k in 0..200 {
            let eta = unit(0.0314 * k as f64);
            assert!((f.p_par(eta) + f.p_hyp(eta) - 1.0).abs() < 1e-15);
            let far = f.hyperbolic.iter().all(|&h| chordal(eta, h) >= 2.0 * spec.eps);
            if far {
                assert_eq!(f.p_hyp(eta), 0.0);
            }
        }
        let iso = Medium::isotropic(1.0, 1.0, 1.0, 1.0).unwrap();
        let f = MicrolocalFilter::new(&iso, &spec).unwrap();
        assert_eq!(f.p_par([0.6, 0.8]), 0.0);
    }

    #[test]
    fn eps_too_large_names_pair() {
        let err = MicrolocalFilter::new(&cubic(), &FilterSpec::parse("hyp", 0.5, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, LabError::InvalidInput(ref s) if s.contains("phi=")), "{err}");
    }

    #[test]
    fn filter_parsing() {
        let s = FilterSpec::parse("par+low", 0.1, 1.0).unwrap();
        assert_eq!(s.kinds, vec![FilterKind::Par, FilterKind::Low]);
        assert_eq!(s.name(), "par+low");
        assert!(matches!("branch:0".parse::<FilterKind>(), Ok(FilterKind::Branch(p)) if p == 0.0));
        assert!("wedge".parse::<FilterKind>().is_err());
    }

    #[test]
    fn csv_data_rejects_complex_tokens() {
        let g = GridSpec { n: 16, l: 10.0, dealias: false };
        let row = "0,0,0,0,1\n".repeat(g.len());
        assert!(CauchyData::from_csv(&g, &format!("u1x,u1y,u2x,u2y,theta\n{row}")).is_ok());
        let bad = row.replacen("1\n", "1+2i\n", 1);
        assert!(matches!(CauchyData::from_csv(&g, &bad), Err(LabError::InvalidInput(_))));
        let z = vec![C64::new(0.0, 0.0); g.len()];
        let mut w = z.clone();
        w[3] = C64::new(1.0, 0.5);
        assert!(CauchyData::from_complex(&g, [&z, &z, &z, &z, &w]).is_err());
    }
}
