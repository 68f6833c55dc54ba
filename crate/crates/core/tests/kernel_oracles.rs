use klmat::kernel::{gaussian_kernel, gram_matrix, lambda_max, KernelParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Characteristic polynomial coefficients of a 4x4 matrix by
/// Faddeev-LeVerrier: p(x) = x^4 + c[3] x^3 + c[2] x^2 + c[1] x + c[0].
fn char_poly(a: &[[f64; 4]; 4]) -> [f64; 4] {
    let mut m = [[0.0; 4]; 4];
    let mut c = [0.0; 5];
    c[4] = 1.0;
    for k in 1..=4 {
        // m = a * m_prev + c[5-k] * I
        let mut next = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                next[i][j] = (0..4).map(|l| a[i][l] * m[l][j]).sum::<f64>();
            }
            next[i][i] += c[4 - k + 1];
        }
        m = next;
        let am_trace: f64 = (0..4).map(|i| (0..4).map(|l| a[i][l] * m[l][i]).sum::<f64>()).sum();
        c[4 - k] = -am_trace / k as f64;
    }
    [c[0], c[1], c[2], c[3]]
}

fn eval(c: &[f64; 4], x: f64) -> f64 {
    (((x + c[3]) * x + c[2]) * x + c[1]) * x + c[0]
}

/// Largest root of a monic quartic with real roots in [0, hi]: scan down from
/// `hi` for the first sign change, then bisect.
fn largest_root(c: &[f64; 4], hi: f64) -> f64 {
    let steps = 200_000;
    let dx = hi / steps as f64;
    let mut right = hi;
    for k in (0..steps).rev() {
        let left = k as f64 * dx;
        if eval(c, left).signum() != eval(c, right).signum() || eval(c, left) == 0.0 {
            let (mut lo, mut up) = (left, right);
            for _ in 0..200 {
                let mid = 0.5 * (lo + up);
                if eval(c, mid).signum() == eval(c, up).signum() {
                    up = mid;
                } else {
                    lo = mid;
                }
            }
            return 0.5 * (lo + up);
        }
        right = left;
    }
    panic!("no root found");
}

#[test]
fn lambda_max_matches_characteristic_polynomial_on_4x4() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..20 {
        let h: f64 = rng.random_range(0.2..3.0);
        let points: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let mut scaled = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum();
                scaled[i][j] = (-h * d2).exp() / 4.0;
            }
        }
        let c = char_poly(&scaled);
        // trace bounds every eigenvalue of a PSD matrix
        let expected = largest_root(&c, 1.0 + 1e-9);
        let g = gram_matrix(&points, KernelParams::new(h).unwrap()).unwrap();
        let got = lambda_max(&g).unwrap();
        assert!((got - expected).abs() < 1e-7, "trial {trial}: {got} vs {expected}");
    }
}

#[test]
fn lambda_max_respects_gershgorin() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2usize, 5, 30] {
        let pts: Vec<Vec<f64>> =
            (0..n).map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let g = gram_matrix(&pts, KernelParams::new(0.7).unwrap()).unwrap();
        let max_row = (0..n).map(|i| (0..n).map(|j| g.get(i, j)).sum::<f64>()).fold(0.0, f64::max) / n as f64;
        let lam = lambda_max(&g).unwrap();
        assert!(lam > 0.0 && lam <= 1.0 + 1e-12);
        assert!(lam <= max_row + 1e-12, "{lam} > {max_row}");
    }
}

fn vec_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..6).prop_flat_map(|d| (prop::collection::vec(-10.0f64..10.0, d), prop::collection::vec(-10.0f64..10.0, d)))
}

proptest! {
    #[test]
    fn kernel_is_symmetric_and_bounded((u, v) in vec_pair(), h in 1e-3f64..10.0) {
        let p = KernelParams::new(h).unwrap();
        let a = gaussian_kernel(&u, &v, p).unwrap();
        prop_assert_eq!(a.to_bits(), gaussian_kernel(&v, &u, p).unwrap().to_bits());
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(gaussian_kernel(&u, &u, p).unwrap(), 1.0);
    }

    #[test]
    fn kernel_decreases_with_distance(r1 in 0.0f64..3.0, dr in 1e-3f64..3.0, h in 0.05f64..2.0) {
        let p = KernelParams::new(h).unwrap();
        let near = gaussian_kernel(&[0.0], &[r1], p).unwrap();
        let far = gaussian_kernel(&[0.0], &[r1 + dr], p).unwrap();
        prop_assert!(far < near);
    }

    #[test]
    fn gram_is_symmetric_with_unit_diagonal(pts in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 1..12), h in 0.1f64..3.0) {
        let g = gram_matrix(&pts, KernelParams::new(h).unwrap()).unwrap();
        for i in 0..g.n() {
            prop_assert_eq!(g.get(i, i), 1.0);
            for j in 0..g.n() {
                prop_assert_eq!(g.get(i, j).to_bits(), g.get(j, i).to_bits());
            }
        }
    }
}
