//! Dense complex-matrix primitives: density matrices with declared subsystem
//! dimensions, partial trace, partial transpose, realignment, and the norms
//! and spectra the criteria are built from.
//!
//! Composite indices are lexicographic with the first subsystem most
//! significant, so for dims `[m, n]` the basis vector `|i>|j>` sits at
//! `i * n + j`.

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Absolute tolerance for Hermiticity, unit trace and positivity of states.
pub const STATE_TOL: f64 = 1e-10;

/// Smallest subsystem dimension accepted anywhere in the crate.
pub const MIN_DIM: usize = 2;

/// Largest `|m - m^dagger|` entry.
pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of the Hermitian part of `h`, ascending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let residual = hermitian_residual(h);
    if residual > STATE_TOL {
        return Err(Error::NotHermitian { residual });
    }
    Ok(hermitian_eigenvalues(h).first().copied().unwrap_or(0.0))
}

/// Singular values in descending order.
pub fn singular_values<T>(m: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    if m.is_empty() {
        return Vec::new();
    }
    let mut values: Vec<f64> = m.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Ky Fan (trace) norm: the sum of singular values.
pub fn trace_norm<T>(m: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    singular_values(m).iter().sum()
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm<T>(m: &DMatrix<T>) -> f64
where
    T: ComplexField<RealField = f64>,
{
    m.norm()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * dims[p + 1];
    }
    strides
}

/// Residuals of the three density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateResiduals {
    pub hermitian: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl StateResiduals {
    pub fn of(matrix: &ComplexMatrix) -> Self {
        Self {
            hermitian: hermitian_residual(matrix),
            trace: (trace(matrix) - Complex64::new(1.0, 0.0)).norm(),
            min_eigenvalue: hermitian_eigenvalues(matrix)
                .first()
                .copied()
                .unwrap_or(0.0),
        }
    }

    /// First violated invariant, if any.
    pub fn check(&self) -> Result<()> {
        if self.hermitian > STATE_TOL {
            return Err(Error::NotHermitian {
                residual: self.hermitian,
            });
        }
        if self.trace > STATE_TOL {
            return Err(Error::NotUnitTrace {
                residual: self.trace,
            });
        }
        if self.min_eigenvalue < -STATE_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: self.min_eigenvalue,
            });
        }
        Ok(())
    }
}

/// A multipartite quantum state: a positive semidefinite, unit-trace Hermitian
/// matrix over the tensor product of subsystems with the given dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every invariant before accepting the matrix.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::check_shape(&dims, &matrix)?;
        StateResiduals::of(&matrix).check()?;
        Ok(Self { dims, matrix })
    }

    /// Skips the spectral checks. Used for matrices that are states by
    /// construction (reduced states, convex combinations, products).
    pub(crate) fn from_parts(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        Self { dims, matrix }
    }

    fn check_shape(dims: &[usize], matrix: &ComplexMatrix) -> Result<()> {
        if dims.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(&d) = dims.iter().find(|&&d| d < MIN_DIM) {
            return Err(Error::InvalidDimension(d));
        }
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let total: usize = dims.iter().product();
        if total != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: matrix.nrows(),
            });
        }
        Ok(())
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn from_pure(dims: Vec<usize>, psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let n = psi.len();
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self::check_shape(&dims, &matrix)?;
        Ok(Self { dims, matrix })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        let matrix = ComplexMatrix::identity(total, total).unscale(total as f64);
        Self::check_shape(&dims, &matrix)?;
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.norm_squared()
    }

    pub fn residuals(&self) -> StateResiduals {
        StateResiduals::of(&self.matrix)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts(dims, kron(&self.matrix, &other.matrix))
    }

    /// Returns `(m, n)` for a bipartite state.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            &[m, n] => Ok((m, n)),
            _ => Err(Error::NotBipartite {
                parties: self.parties(),
            }),
        }
    }

    /// Reorders subsystems so that new party `p` is old party `order[p]`.
    pub fn permute(&self, order: &[usize]) -> Result<DensityMatrix> {
        let n = self.parties();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::PartyCount {
                expected: n,
                found: order.len(),
            });
        }
        for &p in order {
            if p >= n {
                return Err(Error::InvalidSubsystem { index: p, parties: n });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::SameParty(p));
            }
        }
        let new_dims: Vec<usize> = order.iter().map(|&p| self.dims[p]).collect();
        let old_strides = strides(&self.dims);
        let new_strides = strides(&new_dims);
        let total = self.dim();
        // map[new_index] = old_index
        let map: Vec<usize> = (0..total)
            .map(|idx| {
                order
                    .iter()
                    .enumerate()
                    .map(|(q, &p)| (idx / new_strides[q]) % new_dims[q] * old_strides[p])
                    .sum()
            })
            .collect();
        let matrix = ComplexMatrix::from_fn(total, total, |r, c| self.matrix[(map[r], map[c])]);
        Ok(Self::from_parts(new_dims, matrix))
    }

    /// Views the state as bipartite across the cut `group | rest`. Parties keep
    /// their relative order inside each side.
    pub fn bipartite_cut(&self, group: &[usize]) -> Result<DensityMatrix> {
        let n = self.parties();
        let group = normalize_selection(group, n)?;
        if group.len() == n {
            return Err(Error::InvalidPartition(
                "cut must leave at least one party on each side".into(),
            ));
        }
        let rest: Vec<usize> = (0..n).filter(|p| !group.contains(p)).collect();
        let order: Vec<usize> = group.iter().chain(rest.iter()).copied().collect();
        let permuted = self.permute(&order)?;
        let left: usize = group.iter().map(|&p| self.dims[p]).product();
        let right: usize = rest.iter().map(|&p| self.dims[p]).product();
        Ok(Self::from_parts(vec![left, right], permuted.matrix))
    }

    /// Applies `U_1 (x) ... (x) U_n` by conjugation.
    pub fn local_unitary(&self, unitaries: &[ComplexMatrix]) -> Result<DensityMatrix> {
        if unitaries.len() != self.parties() {
            return Err(Error::PartyCount {
                expected: self.parties(),
                found: unitaries.len(),
            });
        }
        let mut u = ComplexMatrix::identity(1, 1);
        for (local, &d) in unitaries.iter().zip(&self.dims) {
            if local.nrows() != d || local.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: local.nrows(),
                });
            }
            u = kron(&u, local);
        }
        let matrix = &u * &self.matrix * u.adjoint();
        Ok(Self::from_parts(self.dims.clone(), matrix))
    }
}

fn normalize_selection(keep: &[usize], parties: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&index) = keep.iter().find(|&&p| p >= parties) {
        return Err(Error::InvalidSubsystem { index, parties });
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

/// Traces out every subsystem not listed in `keep`. The result keeps the
/// surviving subsystems in their original order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims();
    let keep = normalize_selection(keep, dims.len())?;
    if keep.len() == dims.len() {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let full_strides = strides(dims);
    let kept_strides = strides(&kept_dims);
    let traced_strides = strides(&traced_dims);

    let compose = |k: usize, t: usize| -> usize {
        let mut idx = 0;
        for (q, &p) in keep.iter().enumerate() {
            idx += (k / kept_strides[q]) % kept_dims[q] * full_strides[p];
        }
        for (q, &p) in traced.iter().enumerate() {
            idx += (t / traced_strides[q]) % traced_dims[q] * full_strides[p];
        }
        idx
    };
    let table: Vec<usize> = (0..kept_total)
        .flat_map(|k| (0..traced_total).map(move |t| (k, t)))
        .map(|(k, t)| compose(k, t))
        .collect();

    let m = rho.matrix();
    let reduced = ComplexMatrix::from_fn(kept_total, kept_total, |r, c| {
        (0..traced_total)
            .map(|t| m[(table[r * traced_total + t], table[c * traced_total + t])])
            .sum()
    });
    Ok(DensityMatrix::from_parts(kept_dims, reduced))
}

/// Transposes the indices of one subsystem.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    let dims = rho.dims();
    if subsystem >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: subsystem,
            parties: dims.len(),
        });
    }
    let stride = strides(dims)[subsystem];
    let d = dims[subsystem];
    let total = rho.dim();
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let dr = (r / stride) % d;
        for c in 0..total {
            let dc = (c / stride) % d;
            let nr = r - dr * stride + dc * stride;
            let nc = c - dc * stride + dr * stride;
            out[(nr, nc)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Realignment of a bipartite `m x n` state:
/// `R[(i m + k), (j n + l)] = rho[(i n + j), (k n + l)]`, an `m^2 x n^2` matrix.
pub fn realign(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let (m, n) = rho.bipartite_dims()?;
    Ok(realign_matrix(rho.matrix(), m, n))
}

/// Realignment of an arbitrary `mn x mn` operator; linear in its argument.
pub fn realign_matrix(op: &ComplexMatrix, m: usize, n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m * m, n * n);
    for i in 0..m {
        for j in 0..n {
            for k in 0..m {
                for l in 0..n {
                    out[(i * m + k, j * n + l)] = op[(i * n + j, k * n + l)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v)),
        ))
    }

    fn mes(d: usize) -> DensityMatrix {
        let mut psi = vec![c(0.0); d * d];
        for i in 0..d {
            psi[i * d + i] = c(1.0 / (d as f64).sqrt());
        }
        DensityMatrix::from_pure(vec![d, d], &psi).unwrap()
    }

    fn qubit(p0: f64, coherence: Complex64) -> DensityMatrix {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(p0), coherence, coherence.conj(), c(1.0 - p0)]);
        DensityMatrix::new(vec![2], m).unwrap()
    }

    fn qutrit() -> DensityMatrix {
        let m = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.5),
                Complex64::new(0.1, 0.05),
                c(0.0),
                Complex64::new(0.1, -0.05),
                c(0.3),
                Complex64::new(0.0, 0.02),
                c(0.0),
                Complex64::new(0.0, -0.02),
                c(0.2),
            ],
        );
        DensityMatrix::new(vec![3], m).unwrap()
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_invalid_states() {
        let not_herm = ComplexMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(matches!(
            DensityMatrix::new(vec![2], not_herm),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(vec![2], diag(&[0.5, 0.6])),
            Err(Error::NotUnitTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(vec![2], diag(&[1.2, -0.2])),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(vec![1, 2], diag(&[0.5, 0.5])),
            Err(Error::InvalidDimension(1))
        ));
        assert!(matches!(
            DensityMatrix::new(vec![3], diag(&[0.5, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_factorizes() {
        let a = qubit(0.7, Complex64::new(0.2, 0.1));
        let b = qutrit();
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, &[0]).unwrap();
        let rb = partial_trace(&ab, &[1]).unwrap();
        assert_eq!(ra.dims(), &[2]);
        assert!(max_diff(ra.matrix(), a.matrix()) < 1e-14);
        assert!(max_diff(rb.matrix(), b.matrix()) < 1e-14);
    }

    #[test]
    fn partial_trace_of_mes_is_maximally_mixed() {
        let ra = partial_trace(&mes(3), &[0]).unwrap();
        let expected = ComplexMatrix::identity(3, 3).unscale(3.0);
        assert!(max_diff(ra.matrix(), &expected) < 1e-14);
    }

    #[test]
    fn partial_trace_in_steps_matches_single_step() {
        let abc = qubit(0.6, Complex64::new(0.1, -0.2))
            .tensor(&mes(2))
            .tensor(&qutrit());
        // entangle across the cut as well by mixing with a permuted copy
        let swapped = abc.permute(&[1, 0, 2, 3]).unwrap();
        let mixed = DensityMatrix::from_parts(
            abc.dims().to_vec(),
            (abc.matrix() + swapped.matrix()).scale(0.5),
        );
        let once = partial_trace(&mixed, &[0, 3]).unwrap();
        let step = partial_trace(&mixed, &[0, 2, 3]).unwrap();
        let twice = partial_trace(&step, &[0, 2]).unwrap();
        assert!(max_diff(once.matrix(), twice.matrix()) < 1e-12);
        assert_abs_diff_eq!(trace(once.matrix()).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = mes(2);
        assert!(matches!(
            partial_trace(&rho, &[2]),
            Err(Error::InvalidSubsystem { index: 2, parties: 2 })
        ));
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::EmptySelection)));
        assert_eq!(partial_trace(&rho, &[1, 0]).unwrap(), rho);
    }

    #[test]
    fn partial_transpose_of_product_and_involution() {
        let a = qubit(0.7, Complex64::new(0.2, 0.1));
        let b = qutrit();
        let ab = a.tensor(&b);
        let pt = partial_transpose(&ab, 0).unwrap();
        let expected = kron(&a.matrix().transpose(), b.matrix());
        assert!(max_diff(&pt, &expected) < 1e-15);

        let back = partial_transpose(&DensityMatrix::from_parts(vec![2, 3], pt), 0).unwrap();
        assert!(max_diff(&back, ab.matrix()) < 1e-15);
        assert!(partial_transpose(&ab, 2).is_err());
    }

    #[test]
    fn partial_transpose_of_bell_state_is_negative() {
        let pt = partial_transpose(&mes(2), 0).unwrap();
        assert!(hermitian_residual(&pt) < 1e-15);
        assert_abs_diff_eq!(min_eigenvalue(&pt).unwrap(), -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(trace(&pt).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn realignment_norms() {
        let a = qubit(0.7, Complex64::new(0.2, 0.1));
        let b = qutrit();
        let r = realign(&a.tensor(&b)).unwrap();
        assert_eq!((r.nrows(), r.ncols()), (4, 9));
        let expected = hs_norm(a.matrix()) * hs_norm(b.matrix());
        assert_abs_diff_eq!(trace_norm(&r), expected, epsilon = 1e-12);
        assert!(trace_norm(&r) <= 1.0 + 1e-12);

        assert_abs_diff_eq!(trace_norm(&realign(&mes(3)).unwrap()), 3.0, epsilon = 1e-12);
        assert!(matches!(
            realign(&a.tensor(&b).tensor(&a)),
            Err(Error::NotBipartite { parties: 3 })
        ));
    }

    #[test]
    fn realignment_is_linear() {
        let x = mes(2);
        let y = qubit(0.3, c(0.1)).tensor(&qubit(0.9, Complex64::new(0.0, 0.2)));
        let combo = x.matrix().scale(0.25) + y.matrix().scale(0.75);
        let lhs = realign_matrix(&combo, 2, 2);
        let rhs = realign(&x).unwrap().scale(0.25) + realign(&y).unwrap().scale(0.75);
        assert!(max_diff(&lhs, &rhs) < 1e-15);
    }

    #[test]
    fn norms_of_simple_matrices() {
        let id = ComplexMatrix::identity(4, 4);
        assert_abs_diff_eq!(trace_norm(&id), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hs_norm(&id), 2.0, epsilon = 1e-14);
        let zero = ComplexMatrix::zeros(3, 3);
        assert_eq!(trace_norm(&zero), 0.0);
        assert_eq!(hs_norm(&zero), 0.0);
        let d = diag(&[3.0, -4.0]);
        assert_abs_diff_eq!(trace_norm(&d), 7.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hs_norm(&d), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn min_eigenvalue_cases() {
        assert_abs_diff_eq!(
            min_eigenvalue(&ComplexMatrix::identity(3, 3)).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(min_eigenvalue(&diag(&[0.2, 0.8])).unwrap(), 0.2, epsilon = 1e-14);
        let skew = ComplexMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(min_eigenvalue(&skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn bipartite_cut_groups_parties() {
        let a = qubit(0.7, Complex64::new(0.2, 0.1));
        let b = qutrit();
        let abc = a.tensor(&b).tensor(&mes(2));
        let cut = abc.bipartite_cut(&[1]).unwrap();
        assert_eq!(cut.dims(), &[3, 8]);
        let expected = b.tensor(&a).tensor(&mes(2));
        assert!(max_diff(cut.matrix(), expected.matrix()) < 1e-15);
        assert!(abc.bipartite_cut(&[0, 1, 2, 3]).is_err());
    }
}
