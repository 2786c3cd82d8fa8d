//! Seeded random sampling of vectors and operators.
//!
//! All generators are ChaCha8 keyed by `seed_from_u64(seed)`; independent
//! streams of the same seed are selected with [`stream_rng`], so a draw is
//! reproducible from `(seed, stream)` alone.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{norm, ComplexMatrix, ComplexVector};

pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Vector of independent standard complex Gaussian entries.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    ComplexVector::new((0..dim).map(|_| complex_gaussian(rng)).collect()).expect("gaussian samples are finite")
}

/// Normalized complex Gaussian vector (uniform on the unit sphere).
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let v = random_vector(rng, dim);
        let n = norm(&v);
        if n > 0.0 {
            return v.scale(Complex64::new(1.0 / n, 0.0)).expect("finite");
        }
    }
}

/// Haar-random unitary: Gram-Schmidt QR of a complex Gaussian matrix.
///
/// Gram-Schmidt produces an `R` factor with positive diagonal, which is the
/// phase convention that makes the `Q` factor Haar distributed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while columns.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &columns {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, qi) in v.iter_mut().zip(q) {
                    *x -= proj * qi;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-8 {
            continue;
        }
        columns.push(v.into_iter().map(|z| z / n).collect());
    }
    let mut data = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for col in &columns {
            data.push(col[i]);
        }
    }
    ComplexMatrix::new(dim, dim, data).expect("finite")
}

/// `(A + A^dagger)/2` for complex Gaussian `A`; exactly Hermitian.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let a = ComplexMatrix::new(dim, dim, random_vector(rng, dim * dim).into_entries()).expect("finite");
    let mut data = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            data.push((a.get(i, j) + a.get(j, i).conj()) * 0.5);
        }
    }
    ComplexMatrix::new(dim, dim, data).expect("finite")
}

/// `W diag(sigma) V` with Haar `W`, `V` and log-uniform singular values in
/// `[1/4, 4]`, with condition number forced to at least `min_condition`.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, dim: usize, min_condition: f64) -> ComplexMatrix {
    assert!(dim >= 2, "a non-unitary invertible operator needs dim >= 2");
    let mut sigma: Vec<f64> = (0..dim).map(|_| 4f64.powf(rng.random_range(-1.0..1.0))).collect();
    let max = sigma.iter().cloned().fold(f64::MIN, f64::max);
    let min = sigma.iter().cloned().fold(f64::MAX, f64::min);
    if max / min < min_condition {
        sigma[0] = min * min_condition * 1.5;
        sigma[1] = min;
    }
    let w = random_unitary(rng, dim);
    let v = random_unitary(rng, dim);
    let d = ComplexMatrix::diag_real(&sigma).expect("finite");
    w.matmul(&d).and_then(|m| m.matmul(&v)).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{singular_values, DEFAULT_CLASSIFY_TOL};
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = stream_rng(42, 3).next_u64();
        assert_eq!(a, stream_rng(42, 3).next_u64());
        assert_ne!(a, stream_rng(42, 4).next_u64());
        assert_ne!(a, stream_rng(43, 3).next_u64());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(1);
        for dim in 1..8 {
            let u = random_unitary(&mut rng, dim);
            let gram = u.adjoint().matmul(&u).unwrap();
            let res = gram.distance_to_scaled_identity(Complex64::new(1.0, 0.0)).unwrap();
            assert!(res < DEFAULT_CLASSIFY_TOL * 1e-3, "dim={dim} res={res}");
        }
    }

    #[test]
    fn random_invertible_condition_floor() {
        let mut rng = seeded_rng(2);
        for _ in 0..50 {
            let m = random_invertible(&mut rng, 3, 1.01);
            let sv = singular_values(&m);
            assert!(sv[0] / sv[2] >= 1.01 - 1e-12);
        }
    }
}
