use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Largest simulated register, in qubits.
pub const MAX_QUBITS: u32 = 6;
/// Tolerance for the Hermitian, trace and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-9;

pub(crate) fn ensure_budget(qubits: u32) -> Result<()> {
    if qubits > MAX_QUBITS {
        return Err(Error::BudgetExceeded {
            what: "qubits",
            count: qubits as u64,
            limit: MAX_QUBITS as u64,
        });
    }
    Ok(())
}

/// A mixed state on at most [`MAX_QUBITS`] qubits. Qubit 0 is the most
/// significant bit of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    qubits: u32,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(qubits: u32, matrix: DMatrix<Complex64>) -> Result<Self> {
        ensure_budget(qubits)?;
        let dim = 1usize << qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(invalid(format!("expected a {dim}x{dim} matrix for {qubits} qubits")));
        }
        let state = Self { qubits, matrix };
        state.validate()?;
        Ok(state)
    }

    fn validate(&self) -> Result<()> {
        let m = &self.matrix;
        let dim = m.nrows();
        for i in 0..dim {
            for j in 0..dim {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > STATE_TOLERANCE {
                    return Err(invalid("density matrix is not Hermitian"));
                }
            }
        }
        if (self.trace() - 1.0).abs() > STATE_TOLERANCE {
            return Err(invalid(format!("density matrix has trace {}", self.trace())));
        }
        if self.min_eigenvalue() < -STATE_TOLERANCE {
            return Err(invalid("density matrix is not positive semidefinite"));
        }
        Ok(())
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `amplitudes`.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(invalid("amplitude count must be a power of two"));
        }
        let a = DMatrix::from_column_slice(dim, 1, amplitudes);
        Self::from_purification(&a)
    }

    /// `A A† / Tr(A A†)`: the reduced state of a purification with
    /// amplitude matrix `A` (rows index the system).
    pub fn from_purification(a: &DMatrix<Complex64>) -> Result<Self> {
        let dim = a.nrows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(invalid("row count must be a power of two"));
        }
        let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("purification has zero or non-finite norm"));
        }
        let mut m = a * a.adjoint() / Complex64::new(norm, 0.0);
        hermitize(&mut m);
        Self::new(dim.trailing_zeros(), m)
    }

    pub fn basis(qubits: u32, index: usize) -> Result<Self> {
        ensure_budget(qubits)?;
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut m = DMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, matrix: m })
    }

    pub fn maximally_mixed(qubits: u32) -> Result<Self> {
        ensure_budget(qubits)?;
        let dim = 1usize << qubits;
        let m = DMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0);
        Ok(Self { qubits, matrix: m })
    }

    /// One-qubit state `(I + x X + y Y + z Z) / 2` with `x²+y²+z² <= 1`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        if x * x + y * y + z * z > 1.0 + STATE_TOLERANCE {
            return Err(invalid("Bloch vector longer than 1"));
        }
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[c((1.0 + z) / 2.0, 0.0), c(x / 2.0, -y / 2.0), c(x / 2.0, y / 2.0), c((1.0 - z) / 2.0, 0.0)],
        );
        Self::new(1, m)
    }

    /// Random state from a Gaussian `dim x dim` purification.
    pub fn random<R: Rng + ?Sized>(qubits: u32, rng: &mut R) -> Result<Self> {
        ensure_budget(qubits)?;
        let dim = 1usize << qubits;
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self::from_purification(&a)
    }

    /// Random pure state with Gaussian amplitudes.
    pub fn random_pure<R: Rng + ?Sized>(qubits: u32, rng: &mut R) -> Result<Self> {
        ensure_budget(qubits)?;
        let dim = 1usize << qubits;
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::pure(&amps)
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Eigenvalues and eigenvectors (as columns).
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let e = SymmetricEigen::new(self.matrix.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }

    /// An amplitude matrix `A` with `A A† = ρ`.
    pub fn purification(&self) -> DMatrix<Complex64> {
        let (vals, vecs) = self.eigen();
        let mut a = vecs;
        for (j, v) in vals.iter().enumerate() {
            let s = v.max(0.0).sqrt();
            for i in 0..a.nrows() {
                a[(i, j)] *= s;
            }
        }
        a
    }

    /// `Re Tr(E ρ)`.
    pub fn expectation(&self, effect: &DMatrix<Complex64>) -> f64 {
        let dim = self.dim();
        let mut total = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                total += (effect[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        total
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        ensure_budget(self.qubits + other.qubits)?;
        Ok(Self {
            qubits: self.qubits + other.qubits,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn tensor_all(states: &[DensityMatrix]) -> Result<Self> {
        let (first, rest) = states.split_first().ok_or_else(|| invalid("no states to combine"))?;
        rest.iter().try_fold(first.clone(), |acc, s| acc.tensor(s))
    }

    /// Reduced state of qubits `start..start+len`.
    pub fn partial_trace(&self, start: u32, len: u32) -> Result<Self> {
        if len == 0 || start + len > self.qubits {
            return Err(invalid(format!("qubit block {start}+{len} out of range")));
        }
        let after = self.qubits - start - len;
        let (da, dk, db) = (1usize << start, 1usize << len, 1usize << after);
        let mut m = DMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut z = Complex64::new(0.0, 0.0);
                for a in 0..da {
                    for b in 0..db {
                        let r = (a * dk + i) * db + b;
                        let c = (a * dk + j) * db + b;
                        z += self.matrix[(r, c)];
                    }
                }
                m[(i, j)] = z;
            }
        }
        Ok(Self { qubits: len, matrix: m })
    }

    /// `λ self + (1-λ) other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<Self> {
        if self.qubits != other.qubits || !(0.0..=1.0).contains(&lambda) {
            return Err(invalid("mixing needs equal sizes and λ in [0,1]"));
        }
        let l = Complex64::new(lambda, 0.0);
        let k = Complex64::new(1.0 - lambda, 0.0);
        Ok(Self {
            qubits: self.qubits,
            matrix: &self.matrix * l + &other.matrix * k,
        })
    }

    /// Re-and-imaginary parts of every entry, row-major.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        let dim = self.dim();
        (0..dim * dim)
            .map(|k| {
                let z = self.matrix[(k / dim, k % dim)];
                [z.re, z.im]
            })
            .collect()
    }

    pub fn from_pairs(qubits: u32, pairs: &[[f64; 2]]) -> Result<Self> {
        ensure_budget(qubits)?;
        let dim = 1usize << qubits;
        if pairs.len() != dim * dim {
            return Err(invalid("wrong number of matrix entries"));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = pairs[i * dim + j];
            Complex64::new(re, im)
        });
        Self::new(qubits, m)
    }

    pub(crate) fn from_matrix_unchecked(qubits: u32, matrix: DMatrix<Complex64>) -> Self {
        Self { qubits, matrix }
    }
}

pub(crate) fn hermitize(m: &mut DMatrix<Complex64>) {
    let dim = m.nrows();
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in i + 1..dim {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn basic_states_are_valid() {
        assert_eq!(DensityMatrix::basis(2, 3).unwrap().trace(), 1.0);
        let mm = DensityMatrix::maximally_mixed(3).unwrap();
        assert!((mm.min_eigenvalue() - 0.125).abs() < 1e-12);
        assert!(DensityMatrix::from_bloch(0.6, 0.0, 0.8).is_ok());
        assert!(DensityMatrix::from_bloch(1.0, 1.0, 0.0).is_err());
        assert!(DensityMatrix::maximally_mixed(7).is_err());
    }

    #[test]
    fn invalid_matrices_rejected() {
        let c = |re: f64| Complex64::new(re, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(1, m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.3), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(1, m).is_err());
    }

    #[test]
    fn purification_round_trip() {
        let mut rng = substream(1, 1);
        for _ in 0..10 {
            let rho = DensityMatrix::random(2, &mut rng).unwrap();
            let back = DensityMatrix::from_purification(&rho.purification()).unwrap();
            assert!((rho.matrix() - back.matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = substream(2, 1);
        let a = DensityMatrix::random(1, &mut rng).unwrap();
        let b = DensityMatrix::random(2, &mut rng).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!((ab.partial_trace(0, 1).unwrap().matrix() - a.matrix()).norm() < 1e-12);
        assert!((ab.partial_trace(1, 2).unwrap().matrix() - b.matrix()).norm() < 1e-12);
    }

    #[test]
    fn bell_state_reduces_to_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let bell = DensityMatrix::pure(&[Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)]).unwrap();
        let r = bell.partial_trace(1, 1).unwrap();
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((r.matrix() - mm.matrix()).norm() < 1e-12);
    }

    #[test]
    fn pairs_round_trip() {
        let mut rng = substream(3, 1);
        let rho = DensityMatrix::random(1, &mut rng).unwrap();
        let back = DensityMatrix::from_pairs(1, &rho.to_pairs()).unwrap();
        assert_eq!(back, rho);
    }
}
