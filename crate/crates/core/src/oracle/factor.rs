use nalgebra::DMatrix;
use num_complex::Complex64;

/// One factor `A(i, i')` of a product-form two-photon amplitude, indexed by
/// the first and second photon slot. Sparse shapes cover the correlated and
/// anti-correlated cases exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum PairFactor {
    /// `A(i, i) = v[i]`.
    Diagonal(Vec<Complex64>),
    /// `A(i, n-1-i) = u[i]`.
    AntiDiagonal(Vec<Complex64>),
    Full(DMatrix<Complex64>),
}

/// Photon slot within the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    First,
    Second,
}

impl PairFactor {
    pub fn dim(&self) -> usize {
        match self {
            PairFactor::Diagonal(v) | PairFactor::AntiDiagonal(v) => v.len(),
            PairFactor::Full(m) => m.nrows(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let n = self.dim();
        match self {
            PairFactor::Diagonal(v) if i == j => v[i],
            PairFactor::AntiDiagonal(u) if j == n - 1 - i => u[i],
            PairFactor::Full(m) => m[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    /// Nonzero-pattern entries `(i, j, value)`.
    pub fn entries(&self) -> Vec<(usize, usize, Complex64)> {
        let n = self.dim();
        match self {
            PairFactor::Diagonal(v) => v.iter().enumerate().map(|(i, &x)| (i, i, x)).collect(),
            PairFactor::AntiDiagonal(u) => u
                .iter()
                .enumerate()
                .map(|(i, &x)| (i, n - 1 - i, x))
                .collect(),
            PairFactor::Full(m) => (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, m[(i, j)]))
                .collect(),
        }
    }

    /// Multiplies the amplitude by `ph[index]` of the given slot.
    pub fn scale_slot(&self, slot: Slot, ph: &[Complex64]) -> Self {
        let n = self.dim();
        match (self, slot) {
            (PairFactor::Diagonal(v), _) => {
                PairFactor::Diagonal(v.iter().zip(ph).map(|(a, b)| a * b).collect())
            }
            (PairFactor::AntiDiagonal(u), Slot::First) => {
                PairFactor::AntiDiagonal(u.iter().zip(ph).map(|(a, b)| a * b).collect())
            }
            (PairFactor::AntiDiagonal(u), Slot::Second) => {
                PairFactor::AntiDiagonal((0..n).map(|i| u[i] * ph[n - 1 - i]).collect())
            }
            (PairFactor::Full(m), Slot::First) => {
                PairFactor::Full(DMatrix::from_fn(n, n, |i, j| m[(i, j)] * ph[i]))
            }
            (PairFactor::Full(m), Slot::Second) => {
                PairFactor::Full(DMatrix::from_fn(n, n, |i, j| m[(i, j)] * ph[j]))
            }
        }
    }

    /// Reverses the index of the given slot: `i → n-1-i`.
    pub fn reverse_slot(&self, slot: Slot) -> Self {
        let n = self.dim();
        match (self, slot) {
            (PairFactor::Diagonal(v), Slot::First) => {
                PairFactor::AntiDiagonal((0..n).map(|i| v[n - 1 - i]).collect())
            }
            (PairFactor::Diagonal(v), Slot::Second) => PairFactor::AntiDiagonal(v.clone()),
            (PairFactor::AntiDiagonal(u), Slot::First) => {
                PairFactor::Diagonal((0..n).map(|i| u[n - 1 - i]).collect())
            }
            (PairFactor::AntiDiagonal(u), Slot::Second) => PairFactor::Diagonal(u.clone()),
            (PairFactor::Full(m), Slot::First) => {
                PairFactor::Full(DMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, j)]))
            }
            (PairFactor::Full(m), Slot::Second) => {
                PairFactor::Full(DMatrix::from_fn(n, n, |i, j| m[(i, n - 1 - j)]))
            }
        }
    }

    /// Swaps the two slots.
    pub fn transpose(&self) -> Self {
        match self {
            PairFactor::Diagonal(v) => PairFactor::Diagonal(v.clone()),
            PairFactor::AntiDiagonal(u) => {
                PairFactor::AntiDiagonal(u.iter().rev().copied().collect())
            }
            PairFactor::Full(m) => PairFactor::Full(m.transpose()),
        }
    }

    /// Frobenius inner product `Σ conj(A) B`.
    pub fn inner(&self, other: &PairFactor) -> Complex64 {
        let n = self.dim();
        match (self, other) {
            (PairFactor::Diagonal(a), PairFactor::Diagonal(b))
            | (PairFactor::AntiDiagonal(a), PairFactor::AntiDiagonal(b)) => {
                a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
            }
            (PairFactor::Diagonal(a), PairFactor::AntiDiagonal(b))
            | (PairFactor::AntiDiagonal(a), PairFactor::Diagonal(b)) => {
                if n % 2 == 1 {
                    let c = n / 2;
                    a[c].conj() * b[c]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            (PairFactor::Full(a), PairFactor::Full(b)) => a.dotc(b),
            (sparse, PairFactor::Full(m)) => sparse
                .entries()
                .into_iter()
                .map(|(i, j, x)| x.conj() * m[(i, j)])
                .sum(),
            (PairFactor::Full(m), sparse) => sparse
                .entries()
                .into_iter()
                .map(|(i, j, x)| m[(i, j)].conj() * x)
                .sum(),
        }
    }

    /// Diagonal of `A A†`: the first slot's marginal probabilities.
    pub fn row_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        for (i, _, x) in self.entries() {
            w[i] += x.norm_sqr();
        }
        w
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }
}
