//! Covariance matrices of local observables and their block structure.
//!
//! For observables `{M_k}` the covariance matrix is
//! `gamma_ij = <{M_i, M_j}>/2 - <M_i><M_j>`. When the observables are local
//! bases on each party, `gamma` splits into diagonal blocks (covariance of the
//! single-party reduced states) and cross blocks
//! `(A_ij)_mn = <G_m^i (x) G_n^j> - <G_m^i><G_n^j>`, which only depend on the
//! two-party reduced state.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_residual, kron, partial_trace, trace_of_product, ComplexMatrix, DensityMatrix,
};
use crate::observables::{gell_mann_basis, pad_basis, pad_to_common, ObservableBasis};

const IMAG_TOL: f64 = 1e-10;
const OBSERVABLE_TOL: f64 = 1e-10;

/// `tr(rho m)` for a Hermitian `m`.
pub fn expectation(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<f64> {
    if m.nrows() != rho.dim() || m.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: m.nrows(),
        });
    }
    complex_to_real(trace_of_product(rho.matrix(), m))
}

fn complex_to_real(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ComplexExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// Symmetrized covariance matrix of an arbitrary list of observables.
pub fn covariance_matrix(rho: &DensityMatrix, ms: &[ComplexMatrix]) -> Result<DMatrix<f64>> {
    for m in ms {
        if m.nrows() != rho.dim() || m.ncols() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: m.nrows(),
            });
        }
        let residual = hermitian_residual(m);
        if residual > OBSERVABLE_TOL {
            return Err(Error::NotHermitian { residual });
        }
    }
    let means = ms
        .iter()
        .map(|m| expectation(rho, m))
        .collect::<Result<Vec<_>>>()?;
    let n = ms.len();
    let mut gamma = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let anti = (&ms[i] * &ms[j] + &ms[j] * &ms[i]).scale(0.5);
            let value = expectation(rho, &anti)? - means[i] * means[j];
            gamma[(i, j)] = value;
            gamma[(j, i)] = value;
        }
    }
    Ok(gamma)
}

fn check_basis(rho: &DensityMatrix, party: usize, basis: &ObservableBasis) -> Result<()> {
    let dims = rho.dims();
    if party >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: party,
            parties: dims.len(),
        });
    }
    if basis.dim() != dims[party] {
        return Err(Error::DimensionMismatch {
            expected: dims[party],
            found: basis.dim(),
        });
    }
    Ok(())
}

/// Expectation values of each basis element in a single-party state.
fn local_means(rho: &DensityMatrix, basis: &ObservableBasis) -> Vec<f64> {
    basis
        .elements()
        .iter()
        .map(|g| trace_of_product(rho.matrix(), g).re)
        .collect()
}

/// Cross-correlation block between parties `i` and `j`:
/// `C_mn = <G_m^i (x) G_n^j> - <G_m^i><G_n^j>`, rows indexed by `basis_i`.
pub fn correlation_block(
    rho: &DensityMatrix,
    i: usize,
    j: usize,
    basis_i: &ObservableBasis,
    basis_j: &ObservableBasis,
) -> Result<DMatrix<f64>> {
    check_basis(rho, i, basis_i)?;
    check_basis(rho, j, basis_j)?;
    if i == j {
        return Err(Error::SameParty(i));
    }
    if i > j {
        return Ok(correlation_block(rho, j, i, basis_j, basis_i)?.transpose());
    }

    let pair = partial_trace(rho, &[i, j])?;
    let rho_i = partial_trace(&pair, &[0])?;
    let rho_j = partial_trace(&pair, &[1])?;
    let mean_i = local_means(&rho_i, basis_i);
    let mean_j = local_means(&rho_j, basis_j);

    let (da, db) = (basis_i.dim(), basis_j.dim());
    let p = pair.matrix();
    let mut block = DMatrix::zeros(basis_i.len(), basis_j.len());
    for (m, a_op) in basis_i.elements().iter().enumerate() {
        // x[b, b'] = sum_{a, a'} rho[(a b), (a' b')] A[a', a]
        let x = ComplexMatrix::from_fn(db, db, |b, bp| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..da {
                for ap in 0..da {
                    acc += p[(a * db + b, ap * db + bp)] * a_op[(ap, a)];
                }
            }
            acc
        });
        for (n, b_op) in basis_j.elements().iter().enumerate() {
            let joint = trace_of_product(&x, b_op).re;
            block[(m, n)] = joint - mean_i[m] * mean_j[n];
        }
    }
    Ok(block)
}

/// Block decomposition of the covariance matrix of a multipartite state with
/// one local basis per party.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBlocks {
    pub n_parties: usize,
    /// Covariance of each single-party reduced state in its own basis.
    pub diag: Vec<DMatrix<f64>>,
    /// Cross blocks keyed by `(i, j)` with `i < j`.
    pub cross: BTreeMap<(usize, usize), DMatrix<f64>>,
}

impl CovarianceBlocks {
    /// Cross block for any ordered pair; `(j, i)` is the transpose of `(i, j)`.
    pub fn cross(&self, i: usize, j: usize) -> Option<DMatrix<f64>> {
        if i < j {
            self.cross.get(&(i, j)).cloned()
        } else {
            self.cross.get(&(j, i)).map(|m| m.transpose())
        }
    }

    /// The full covariance matrix with all blocks in place.
    pub fn assemble(&self) -> DMatrix<f64> {
        let len = self.diag.first().map_or(0, |b| b.nrows());
        let n = self.n_parties * len;
        let mut gamma = DMatrix::zeros(n, n);
        for (p, block) in self.diag.iter().enumerate() {
            gamma
                .view_mut((p * len, p * len), (len, len))
                .copy_from(block);
        }
        for (&(i, j), block) in &self.cross {
            gamma.view_mut((i * len, j * len), (len, len)).copy_from(block);
            gamma
                .view_mut((j * len, i * len), (len, len))
                .copy_from(&block.transpose());
        }
        gamma
    }
}

/// All diagonal and cross blocks. Bases of different lengths are zero-padded
/// to the longest one first.
pub fn all_blocks(rho: &DensityMatrix, bases: &[ObservableBasis]) -> Result<CovarianceBlocks> {
    let n = rho.parties();
    if bases.len() != n {
        return Err(Error::PartyCount {
            expected: n,
            found: bases.len(),
        });
    }
    for (p, basis) in bases.iter().enumerate() {
        check_basis(rho, p, basis)?;
    }
    let bases = pad_to_common(bases);

    let diag = (0..n)
        .map(|p| {
            let local = partial_trace(rho, &[p])?;
            covariance_matrix(&local, bases[p].elements())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cross = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            cross.insert((i, j), correlation_block(rho, i, j, &bases[i], &bases[j])?);
        }
    }
    Ok(CovarianceBlocks {
        n_parties: n,
        diag,
        cross,
    })
}

/// Cross block between two parties in zero-padded Gell-Mann bases, with the
/// linear entropies `1 - tr(rho_i^2)` of both reduced states.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCorrelation {
    pub block: DMatrix<f64>,
    pub linear_entropy_i: f64,
    pub linear_entropy_j: f64,
}

/// Gell-Mann correlation data for parties `i < j`. Both bases are padded to
/// `max(d)^2` over all parties so blocks of one state share a shape.
pub fn gell_mann_pair(rho: &DensityMatrix, i: usize, j: usize) -> Result<PairCorrelation> {
    let dims = rho.dims();
    for &p in &[i, j] {
        if p >= dims.len() {
            return Err(Error::InvalidSubsystem {
                index: p,
                parties: dims.len(),
            });
        }
    }
    let widest = dims.iter().copied().max().unwrap_or(0);
    let basis_i = pad_basis(&gell_mann_basis(dims[i])?, widest * widest)?;
    let basis_j = pad_basis(&gell_mann_basis(dims[j])?, widest * widest)?;
    let block = correlation_block(rho, i, j, &basis_i, &basis_j)?;
    Ok(PairCorrelation {
        block,
        linear_entropy_i: 1.0 - partial_trace(rho, &[i])?.purity(),
        linear_entropy_j: 1.0 - partial_trace(rho, &[j])?.purity(),
    })
}

/// Lifts a local operator on `party` to the full space.
pub fn embed_local(dims: &[usize], party: usize, op: &ComplexMatrix) -> ComplexMatrix {
    dims.iter()
        .enumerate()
        .fold(ComplexMatrix::identity(1, 1), |acc, (p, &d)| {
            if p == party {
                kron(&acc, op)
            } else {
                kron(&acc, &ComplexMatrix::identity(d, d))
            }
        })
}

/// `sum_i Var(G_i^A (x) I + I (x) G_i^B)` for a bipartite state, evaluated on
/// the full space. The bases must have equal length.
pub fn joint_variance_sum(
    rho: &DensityMatrix,
    basis_a: &ObservableBasis,
    basis_b: &ObservableBasis,
) -> Result<f64> {
    rho.bipartite_dims()?;
    check_basis(rho, 0, basis_a)?;
    check_basis(rho, 1, basis_b)?;
    if basis_a.len() != basis_b.len() {
        return Err(Error::BasisLength {
            left: basis_a.len(),
            right: basis_b.len(),
        });
    }
    let dims = rho.dims();
    let mut total = 0.0;
    for (ga, gb) in basis_a.elements().iter().zip(basis_b.elements()) {
        let k = embed_local(dims, 0, ga) + embed_local(dims, 1, gb);
        let mean = expectation(rho, &k)?;
        total += expectation(rho, &(&k * &k))? - mean * mean;
    }
    Ok(total)
}
