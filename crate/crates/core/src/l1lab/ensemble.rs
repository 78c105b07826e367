use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::models::ProblemSize;
use crate::seeding;

/// Measurement ensemble tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// i.i.d. `N(0, 1/n)` entries.
    Gaussian,
}

/// A measurement matrix together with the data needed to rebuild it.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingInstance {
    size: ProblemSize,
    matrix: DMatrix<f64>,
    seed: u64,
    ensemble: Ensemble,
}

impl SensingInstance {
    pub fn size(&self) -> ProblemSize {
        self.size
    }

    /// The `n x N` matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn ambient(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn measurements(&self) -> usize {
        self.matrix.nrows()
    }

    /// `A x`.
    pub fn measure(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ambient(), "signal length must equal N");
        (&self.matrix * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    /// Euclidean norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        self.matrix.column_iter().map(|c| c.norm()).collect()
    }

    /// Wraps an explicit matrix (used by tests and examples).
    pub fn from_matrix(matrix: DMatrix<f64>, seed: u64) -> crate::Result<Self> {
        let size = ProblemSize::new(matrix.ncols(), matrix.nrows(), 0)?;
        Ok(SensingInstance { size, matrix, seed, ensemble: Ensemble::Gaussian })
    }
}

/// Gaussian instance of the given size; bit-identical for a fixed seed.
pub fn gaussian_instance(size: ProblemSize, seed: u64) -> SensingInstance {
    let (n, big_n) = (size.measurements, size.ambient);
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = seeding::rng(seed);
    // draw row-major so the stream order does not depend on the storage layout
    let mut data = vec![0.0; n * big_n];
    for v in data.iter_mut() {
        let g: f64 = StandardNormal.sample(&mut rng);
        *v = g * scale;
    }
    let matrix = DMatrix::from_row_slice(n, big_n, &data);
    SensingInstance { size, matrix, seed, ensemble: Ensemble::Gaussian }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let size = ProblemSize::new(20, 8, 2).unwrap();
        let a = gaussian_instance(size, 11);
        let b = gaussian_instance(size, 11);
        let c = gaussian_instance(size, 12);
        assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
        assert_ne!(a.matrix().as_slice(), c.matrix().as_slice());
    }

    #[test]
    fn square_instances_are_full_rank() {
        let inst = gaussian_instance(ProblemSize::new(4, 4, 1).unwrap(), 3);
        let sv = inst.matrix().clone().singular_values();
        assert!(sv.iter().all(|&s| s > 1e-8));
    }

    #[test]
    fn column_norms_concentrate() {
        let inst = gaussian_instance(ProblemSize::new(1000, 500, 10).unwrap(), 5);
        let norms = inst.column_norms();
        let mean = norms.iter().sum::<f64>() / norms.len() as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean column norm {mean}");
    }
}
