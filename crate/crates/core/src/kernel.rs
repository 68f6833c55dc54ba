//! Gaussian kernel, Gram matrices and dominant-eigenvalue estimation.

use crate::error::{contract, Error, Result};

/// Relative tolerance on successive Rayleigh quotients in [`lambda_max`].
pub const POWER_ITERATION_TOL: f64 = 1e-9;
/// Iteration cap for [`lambda_max`].
pub const POWER_ITERATION_CAP: usize = 10_000;

/// Bandwidth `h` of the kernel `exp(-h * |u - v|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    h: f64,
}

impl KernelParams {
    pub fn new(h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(contract(format!("kernel bandwidth must be positive and finite, got {h}")));
        }
        Ok(Self { h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

pub(crate) fn squared_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Kernel evaluation without argument checks, for hot loops whose inputs were
/// validated upstream.
#[inline]
pub(crate) fn kernel_unchecked(u: &[f64], v: &[f64], h: f64) -> f64 {
    (-h * squared_distance(u, v)).exp()
}

/// `exp(-h * |u - v|^2)`.
pub fn gaussian_kernel(u: &[f64], v: &[f64], params: KernelParams) -> Result<f64> {
    if u.len() != v.len() {
        return Err(contract(format!("kernel arguments differ in length ({} vs {})", u.len(), v.len())));
    }
    if u.iter().chain(v).any(|x| !x.is_finite()) {
        return Err(contract("kernel arguments must be finite"));
    }
    Ok(kernel_unchecked(u, v, params.h))
}

/// Symmetric kernel matrix over a set of points, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    /// Wraps raw row-major entries after checking the Gram invariants:
    /// exact symmetry, unit diagonal and entries in [0, 1]. Zero is admitted
    /// because distant points underflow the exponential.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(contract(format!("expected {n}x{n} entries, got {}", entries.len())));
        }
        for i in 0..n {
            if entries[i * n + i] != 1.0 {
                return Err(contract(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let x = entries[i * n + j];
                if !(0.0..=1.0).contains(&x) {
                    return Err(contract(format!("entry ({i},{j}) = {x} outside [0, 1]")));
                }
                if x != entries[j * n + i] {
                    return Err(contract(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Builds the Gram matrix of `points`, evaluating each unordered pair once.
pub fn gram_matrix<P: AsRef<[f64]>>(points: &[P], params: KernelParams) -> Result<GramMatrix> {
    let n = points.len();
    if n == 0 {
        return Err(contract("gram matrix needs at least one point"));
    }
    let dim = points[0].as_ref().len();
    for (i, p) in points.iter().enumerate() {
        let p = p.as_ref();
        if p.len() != dim {
            return Err(contract(format!("point {i} has length {}, expected {dim}", p.len())));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(contract(format!("point {i} has non-finite entries")));
        }
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        entries[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let k = kernel_unchecked(points[i].as_ref(), points[j].as_ref(), params.h);
            entries[i * n + j] = k;
            entries[j * n + i] = k;
        }
    }
    Ok(GramMatrix { n, entries })
}

/// Largest eigenvalue of the sample-scaled Gram matrix `(1/n) G`.
///
/// This is the estimate of the top eigenvalue of the feature-space
/// autocorrelation operator used by the step-size diagnostics.
pub fn lambda_max(gram: &GramMatrix) -> Result<f64> {
    let top = dominant_eigenvalue(gram.entries(), gram.n())?;
    Ok(top / gram.n() as f64)
}

/// Power iteration for the dominant eigenvalue of a symmetric positive
/// semi-definite matrix given row-major.
///
/// Starts from the normalized all-ones vector and stops when successive
/// Rayleigh quotients agree to [`POWER_ITERATION_TOL`] relative.
pub fn dominant_eigenvalue(matrix: &[f64], n: usize) -> Result<f64> {
    if n == 0 || matrix.len() != n * n {
        return Err(contract("dominant_eigenvalue needs a nonempty square matrix"));
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut previous = f64::NAN;
    for _ in 0..POWER_ITERATION_CAP {
        for (i, wi) in w.iter_mut().enumerate() {
            let row = &matrix[i * n..(i + 1) * n];
            *wi = row.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        // v is unit length, so v.w is the Rayleigh quotient
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Numerical {
                message: "power iteration collapsed to a zero or non-finite vector".into(),
                last: rayleigh,
            });
        }
        if (rayleigh - previous).abs() <= POWER_ITERATION_TOL * rayleigh.abs() {
            return Ok(rayleigh);
        }
        previous = rayleigh;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    Err(Error::Numerical {
        message: format!("power iteration did not converge in {POWER_ITERATION_CAP} iterations"),
        last: previous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(h: f64) -> KernelParams {
        KernelParams::new(h).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(gaussian_kernel(&[0.3, -1.0], &[0.3, -1.0], params(7.0)).unwrap(), 1.0);
        // exp(-1) = 0.36787944117144233
        let e_inv = 0.367_879_441_171_442_33;
        assert!((gaussian_kernel(&[0.0], &[1.0], params(1.0)).unwrap() - e_inv).abs() < 1e-10);
        assert!((gaussian_kernel(&[0.0, 0.0], &[1.0, 1.0], params(0.5)).unwrap() - e_inv).abs() < 1e-10);
    }

    #[test]
    fn kernel_rejects_bad_input() {
        assert!(matches!(gaussian_kernel(&[0.0], &[0.0, 1.0], params(1.0)), Err(Error::Contract(_))));
        assert!(matches!(gaussian_kernel(&[f64::NAN], &[0.0], params(1.0)), Err(Error::Contract(_))));
        assert!(KernelParams::new(0.0).is_err());
        assert!(KernelParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn gram_small_cases() {
        let g = gram_matrix(&[vec![0.0]], params(3.0)).unwrap();
        assert_eq!(g.entries(), &[1.0]);
        let g = gram_matrix(&[vec![0.0], vec![1.0]], params(1.0)).unwrap();
        let e_inv = (-1.0f64).exp();
        assert_eq!(g.get(0, 0), 1.0);
        assert_eq!(g.get(1, 1), 1.0);
        assert!((g.get(0, 1) - e_inv).abs() < 1e-15);
        assert_eq!(g.get(0, 1), g.get(1, 0));
        assert!(gram_matrix::<Vec<f64>>(&[], params(1.0)).is_err());
        assert!(gram_matrix(&[vec![0.0], vec![1.0, 2.0]], params(1.0)).is_err());
    }

    #[test]
    fn lambda_max_closed_forms() {
        let identity = GramMatrix::from_entries(3, vec![1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        assert!((lambda_max(&identity).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(GramMatrix::from_entries(2, vec![1., 0.5, 0.4, 1.]).is_err());
        assert!(GramMatrix::from_entries(2, vec![0.9, 0.5, 0.5, 1.]).is_err());

        let dup = gram_matrix(&[vec![0.5, 0.5], vec![0.5, 0.5]], params(1.0)).unwrap();
        assert!((lambda_max(&dup).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_max_far_apart_points() {
        // Gram is numerically the identity when points are far apart
        let pts: Vec<Vec<f64>> = (0..3).map(|i| vec![100.0 * i as f64]).collect();
        let g = gram_matrix(&pts, params(1.0)).unwrap();
        let lam = lambda_max(&g).unwrap();
        assert!((lam - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_reports_zero_matrix() {
        match dominant_eigenvalue(&[0.0; 4], 2) {
            Err(Error::Numerical { .. }) => {}
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }
}
