//! Small dense complex linear algebra: a shifted QR eigenvalue iteration for
//! Hessenberg matrices, balancing, null vectors and the matrix exponential.

use nalgebra::{DMatrix, DVector, Matrix5, Vector5};

use crate::error::{LabError, Result};
use crate::C64;

pub type Mat5 = Matrix5<C64>;
pub type Vec5 = Vector5<C64>;

const QR_MAX_SWEEPS: usize = 60;

/// Eigenvalues of a general square complex matrix.
///
/// Reduces to Hessenberg form, then runs the single-shift QR iteration.
pub fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let h = nalgebra::linalg::Hessenberg::new(m.clone()).h();
    hessenberg_eigenvalues(h)
}

/// Eigenvalues of a 5×5 complex matrix.
pub fn eigenvalues5(m: &Mat5) -> Result<[C64; 5]> {
    let d = DMatrix::from_iterator(5, 5, m.iter().cloned());
    let v = eigenvalues(&d)?;
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

/// Complex Givens rotation `(c, s)` with real `c` that maps `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    if r == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    (ax / r, x * y.conj() / (ax * r))
}

/// Eigenvalues of an upper Hessenberg matrix by the Wilkinson-shifted
/// complex QR iteration with deflation.
pub fn hessenberg_eigenvalues(mut h: DMatrix<C64>) -> Result<Vec<C64>> {
    let n = h.nrows();
    let mut eig = vec![C64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let tol = f64::EPSILON * if diag > 0.0 { diag } else { scale };
            if sub <= tol {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > QR_MAX_SWEEPS {
            return Err(LabError::NoConvergence { residuals: (l..hi).map(|k| h[(k + 1, k)].norm()).collect() });
        }
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let c = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mut shift = if iter % 11 == 10 {
            // exceptional shift to break symmetric stalls
            d + C64::new(0.75 * c.norm(), 0.43 * c.norm())
        } else {
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
            let mu1 = half_tr + disc;
            let mu2 = half_tr - disc;
            if (mu1 - d).norm() < (mu2 - d).norm() {
                mu1
            } else {
                mu2
            }
        };
        if !shift.re.is_finite() || !shift.im.is_finite() {
            shift = d;
        }
        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * cs + sn * y;
                h[(k + 1, j)] = -sn.conj() * x + y * cs;
            }
            rots.push((cs, sn));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (cs, sn) = rots[idx];
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * cs + sn.conj() * y;
                h[(i, k + 1)] = -sn * x + y * cs;
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
        if total > QR_MAX_SWEEPS * n * 4 {
            return Err(LabError::NoConvergence { residuals: (l..hi).map(|k| h[(k + 1, k)].norm()).collect() });
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

/// Diagonal similarity balancing (powers of two), returns the scaling.
pub fn balance(m: &mut DMatrix<C64>) -> DVector<f64> {
    let n = m.nrows();
    let mut d = DVector::from_element(n, 1.0);
    let radix = 2.0f64;
    let mut converged = false;
    let mut rounds = 0;
    while !converged && rounds < 100 {
        converged = true;
        rounds += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / radix {
                cc *= radix;
                rr /= radix;
                f *= radix;
            }
            while cc >= rr * radix {
                cc /= radix;
                rr *= radix;
                f /= radix;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    d
}

/// Unit vector `v` minimising `‖m v‖` (right singular vector of the smallest
/// singular value) together with that singular value.
pub fn null_vector(m: &Mat5) -> (Vec5, f64) {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let (k, smin) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let v: Vec5 = vt.row(k).transpose().map(|z| z.conj());
    (v, smin)
}

/// `exp(m)` via scaling-and-squaring with diagonal Padé approximants.
pub fn expm(m: &Mat5) -> Mat5 {
    m.exp()
}

/// Frobenius-norm relative difference helper.
pub fn rel_diff(a: &Mat5, b: &Mat5) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// Spectral condition number `σ_max/σ_min`.
pub fn condition_number(m: &Mat5) -> f64 {
    let sv = m.singular_values();
    let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

pub fn identity5() -> Mat5 {
    Mat5::identity()
}
