//! Polynomial roots through a balanced companion matrix, Newton polishing and
//! optimal matching of small root sets.

use nalgebra::DMatrix;

use crate::error::{LabError, Result};
use crate::linalg;
use crate::C64;

/// Evaluates a polynomial with coefficients in descending order, plus its
/// derivative (Horner).
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Roots of a monic polynomial given in descending order (`coeffs[0] == 1`).
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[0];
    if lead.norm() == 0.0 {
        return Err(LabError::InvalidInput("leading coefficient is zero".into()));
    }
    let mut comp = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for j in 0..n {
        comp[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..n {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    linalg::balance(&mut comp);
    let mut r = linalg::hessenberg_eigenvalues(comp).map_err(|e| match e {
        LabError::NoConvergence { .. } => {
            LabError::NoConvergence { residuals: coeffs.iter().map(|c| c.norm()).collect() }
        }
        other => other,
    })?;
    for z in r.iter_mut() {
        *z = polish(coeffs, *z);
    }
    Ok(r)
}

/// A few Newton steps, kept only while the residual decreases.
pub fn polish(coeffs: &[C64], mut z: C64) -> C64 {
    let (mut p, mut dp) = eval_with_derivative(coeffs, z);
    for _ in 0..3 {
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let (pc, dpc) = eval_with_derivative(coeffs, cand);
        if pc.norm() < p.norm() {
            z = cand;
            p = pc;
            dp = dpc;
        } else {
            break;
        }
    }
    z
}

/// Polynomial coefficients (descending, monic) of `Π (z − r_k)`.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck;
            next[k + 1] -= ck * r;
        }
        c = next;
    }
    c
}

/// All permutations of `0..n` in a fixed (lexicographic) order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Permutation `p` minimising `Σ |reference[i] − candidates[p[i]]|`.
///
/// Brute force; intended for the five eigenvalues of the symbol.
pub fn optimal_matching(reference: &[C64], candidates: &[C64]) -> Vec<usize> {
    assert_eq!(reference.len(), candidates.len());
    let n = reference.len();
    let mut best = (f64::INFINITY, Vec::new());
    for p in permutations(n) {
        let cost: f64 = (0..n).map(|i| (reference[i] - candidates[p[i]]).norm()).sum();
        if cost < best.0 {
            best = (cost, p);
        }
    }
    best.1
}

/// Largest distance after optimal matching.
pub fn matched_distance(a: &[C64], b: &[C64]) -> f64 {
    let p = optimal_matching(a, b);
    (0..a.len()).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_roots() {
        let c = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let r = roots(&c).unwrap();
        assert!(matched_distance(&r, &[C64::new(0.0, 1.0), C64::new(0.0, -1.0)]) < 1e-14);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(5).len(), 120);
    }

    proptest! {
        #[test]
        fn roots_roundtrip(re in proptest::collection::vec(-3.0f64..3.0, 5), im in proptest::collection::vec(-3.0f64..3.0, 5)) {
            let truth: Vec<C64> = re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)).collect();
            let coeffs = from_roots(&truth);
            let found = roots(&coeffs).unwrap();
            // conditioning: clustered roots lose accuracy like eps^(1/m)
            let mut gap = f64::INFINITY;
            for i in 0..5 { for j in 0..i { gap = gap.min((truth[i] - truth[j]).norm()); } }
            let tol = if gap > 0.1 { 1e-9 } else { 1e-4 };
            prop_assert!(matched_distance(&truth, &found) < tol);
        }
    }
}
