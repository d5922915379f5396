#![allow(dead_code)]

use mwca_core::{DenseMatrix, DenseTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> DenseTensor {
    let len: usize = shape.iter().product();
    DenseTensor::new(shape.to_vec(), (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

pub fn random_positive(rng: &mut ChaCha8Rng, shape: &[usize]) -> DenseTensor {
    let len: usize = shape.iter().product();
    DenseTensor::new(shape.to_vec(), (0..len).map(|_| rng.gen_range(0.05..1.0)).collect()).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

pub fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (a - b).norm() / a.norm().max(f64::MIN_POSITIVE)
}

/// Explicit `Π_{η≠µ}` reversed Kronecker chain `A_d ⊗ … ⊗ A_1` omitting `mode`.
pub fn explicit_reversed_chain(factors: &[DenseMatrix], mode: usize) -> DenseMatrix {
    let mut mats: Vec<&DenseMatrix> = factors
        .iter()
        .enumerate()
        .filter(|(pos, _)| pos + 1 != mode)
        .map(|(_, m)| m)
        .collect();
    mats.reverse();
    mwca_core::tensor::kronecker_chain(&mats).unwrap()
}
