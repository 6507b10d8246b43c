//! Orthonormal local observable bases.
//!
//! A basis on a `d`-level system holds `d^2` Hermitian matrices with
//! `tr(G_a G_b) = delta_ab`. Such a set satisfies `sum_k G_k^2 = d I`, and the
//! variances of its elements in any state sum to `d - tr(rho^2)`.
//!
//! Bases may be zero-padded to a longer length so that parties of different
//! dimension can share one summation index, and mixed by a real orthogonal
//! matrix. A padded-then-rotated basis is no longer orthonormal element by
//! element, but its Gram matrix stays an orthogonal projector of rank `d^2`
//! and the completeness identity still holds. [`ObservableBasis::residuals`]
//! checks exactly those properties.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_residual, trace_of_product, ComplexMatrix, MIN_DIM};

const ORTHOGONAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

/// Worst-case deviations from the basis identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisResiduals {
    /// Largest `|G - G^dagger|` entry over all elements.
    pub hermitian: f64,
    /// Deviation of the Gram matrix from a rank-`d^2` orthogonal projector.
    pub orthonormality: f64,
    /// Largest entry of `sum_k G_k^2 - d I`.
    pub completeness: f64,
}

impl ObservableBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Number of elements including zero padding.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of genuine (orthonormal) directions, `d^2`.
    pub fn span(&self) -> usize {
        self.dim * self.dim
    }

    /// Real Gram matrix `tr(G_a G_b)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |a, b| {
            trace_of_product(&self.elements[a], &self.elements[b]).re
        })
    }

    pub fn square_sum(&self) -> ComplexMatrix {
        self.elements
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, g| acc + g * g)
    }

    pub fn residuals(&self) -> BasisResiduals {
        let hermitian = self
            .elements
            .iter()
            .map(hermitian_residual)
            .fold(0.0, f64::max);

        let gram = self.gram();
        let idempotent = (&gram * &gram - &gram).amax();
        let symmetric = (&gram - gram.transpose()).amax();
        let rank = (gram.trace() - self.span() as f64).abs();
        let orthonormality = idempotent.max(symmetric).max(rank);

        let target = ComplexMatrix::identity(self.dim, self.dim).scale(self.dim as f64);
        let completeness = (self.square_sum() - target)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);

        BasisResiduals {
            hermitian,
            orthonormality,
            completeness,
        }
    }

    /// Appends zero observables up to `target` elements.
    pub fn padded(&self, target: usize) -> Result<ObservableBasis> {
        pad_basis(self, target)
    }

    /// Mixes the elements with a real orthogonal matrix: `G'_i = sum_l u_il G_l`.
    pub fn rotated(&self, u: &DMatrix<f64>) -> Result<ObservableBasis> {
        rotate_basis(self, u)
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The identity `I/sqrt(d)` followed by the `d^2 - 1` generalized Gell-Mann
/// matrices, all normalized to `tr(G^2) = 1`.
///
/// Order: identity; symmetric `(E_jk + E_kj)/sqrt2` for `j < k` ascending;
/// antisymmetric `(-i E_jk + i E_kj)/sqrt2` in the same order; diagonal
/// `(E_00 + ... + E_{l-1,l-1} - l E_ll)/sqrt(l(l+1))` for `l = 1..d-1`.
/// For `d = 2` this is `{I, X, Y, Z}/sqrt2`.
pub fn gell_mann_basis(d: usize) -> Result<ObservableBasis> {
    if d < MIN_DIM {
        return Err(Error::InvalidDimension(d));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut elements = Vec::with_capacity(d * d);
    elements.push(ComplexMatrix::identity(d, d).unscale((d as f64).sqrt()));

    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
        .collect();
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = real(inv_sqrt2);
        m[(k, j)] = real(inv_sqrt2);
        elements.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = Complex64::new(0.0, -inv_sqrt2);
        m[(k, j)] = Complex64::new(0.0, inv_sqrt2);
        elements.push(m);
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..l {
            m[(i, i)] = real(1.0 / norm);
        }
        m[(l, l)] = real(-(l as f64) / norm);
        elements.push(m);
    }
    Ok(ObservableBasis { dim: d, elements })
}

pub fn pad_basis(basis: &ObservableBasis, target: usize) -> Result<ObservableBasis> {
    if target < basis.len() {
        return Err(Error::PadTarget {
            target,
            size: basis.len(),
        });
    }
    let mut elements = basis.elements.clone();
    elements.resize(target, ComplexMatrix::zeros(basis.dim, basis.dim));
    Ok(ObservableBasis {
        dim: basis.dim,
        elements,
    })
}

/// Pads every basis to the length of the longest one.
pub fn pad_to_common(bases: &[ObservableBasis]) -> Vec<ObservableBasis> {
    let target = bases.iter().map(ObservableBasis::len).max().unwrap_or(0);
    bases
        .iter()
        .map(|b| pad_basis(b, target).expect("target is the maximum length"))
        .collect()
}

pub fn rotate_basis(basis: &ObservableBasis, u: &DMatrix<f64>) -> Result<ObservableBasis> {
    let n = basis.len();
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.nrows(),
        });
    }
    let residual = (u * u.transpose() - DMatrix::<f64>::identity(n, n)).amax();
    if residual > ORTHOGONAL_TOL {
        return Err(Error::NotOrthogonal { residual });
    }
    let d = basis.dim;
    let elements = (0..n)
        .map(|i| {
            basis
                .elements
                .iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(d, d), |acc, (l, g)| {
                    acc + g.scale(u[(i, l)])
                })
        })
        .collect();
    Ok(ObservableBasis { dim: d, elements })
}
