//! Pure-state concurrence and three lower bounds for mixed bipartite states.
//!
//! With `M <= N` the local dimensions and `p_X = tr(rho_X^2)`:
//! - `bound_ccnr_ppt`: `sqrt(2 / (M (M - 1))) (max(||rho^T_A||, ||R(rho)||) - 1)`
//! - `bound_lur`: `(M + N - 2 - sum_i Var(G_i^A (x) I + I (x) G_i^B)) / sqrt(2 M (M - 1))`
//! - `bound_optimized`: `(2 ||C||_KF - (1 - p_A) - (1 - p_B)) / sqrt(2 M (M - 1))`
//!
//! `bound_optimized` is the maximum of `bound_lur` over all pairs of local
//! orthonormal bases; [`optimal_lur_bases`] returns a maximizing pair built
//! from the singular value decomposition of the correlation block.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::covariance::{gell_mann_pair, joint_variance_sum};
use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace, partial_transpose, realign, trace_norm, DensityMatrix, STATE_TOL,
};
use crate::observables::{gell_mann_basis, pad_basis, rotate_basis, ObservableBasis};

/// Purity above which a density matrix is treated as a pure state.
pub const PURE_TOL: f64 = 1e-10;

/// Label recorded for the Gell-Mann choice of `bound_lur`.
pub const GELL_MANN: &str = "gell_mann";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceBounds {
    /// Smaller local dimension.
    pub m: usize,
    /// Larger local dimension.
    pub n: usize,
    /// True when the first party is the larger one.
    pub swapped: bool,
    pub bound_ccnr_ppt: f64,
    pub bound_lur: f64,
    pub lur_basis: String,
    pub bound_optimized: f64,
    pub exact_pure: Option<f64>,
    /// Largest bound, clamped at zero.
    pub best: f64,
}

fn ordered_dims(rho: &DensityMatrix) -> Result<(usize, usize, bool)> {
    let (a, b) = rho.bipartite_dims()?;
    Ok((a.min(b), a.max(b), a > b))
}

fn lur_scale(m: usize) -> f64 {
    (2.0 * (m * (m - 1)) as f64).sqrt()
}

/// `sqrt(2 (1 - tr rho_A^2))` for a normalized vector on an `m x n` system.
pub fn pure_concurrence(psi: &[Complex64], dims: (usize, usize)) -> Result<f64> {
    let (m, n) = dims;
    if psi.len() != m * n {
        return Err(Error::DimensionMismatch {
            expected: m * n,
            found: psi.len(),
        });
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > STATE_TOL {
        return Err(Error::NotNormalized { norm });
    }
    let coeffs = DMatrix::from_row_slice(m, n, psi);
    let reduced = &coeffs * coeffs.adjoint();
    Ok(linear_entropy_concurrence(reduced.norm_squared()))
}

fn linear_entropy_concurrence(purity: f64) -> f64 {
    (2.0 * (1.0 - purity)).max(0.0).sqrt()
}

/// Partial-transpose / realignment bound.
pub fn bound_ccnr_ppt(rho: &DensityMatrix) -> Result<f64> {
    let (m, _, _) = ordered_dims(rho)?;
    let pt = trace_norm(&partial_transpose(rho, 0)?);
    let r = trace_norm(&realign(rho)?);
    Ok((2.0 / (m * (m - 1)) as f64).sqrt() * (pt.max(r) - 1.0))
}

/// Local-uncertainty bound for the given bases, which must have equal length.
pub fn bound_lur(
    rho: &DensityMatrix,
    basis_a: &ObservableBasis,
    basis_b: &ObservableBasis,
) -> Result<f64> {
    let (m, n, _) = ordered_dims(rho)?;
    let variance = joint_variance_sum(rho, basis_a, basis_b)?;
    Ok(((m + n) as f64 - 2.0 - variance) / lur_scale(m))
}

fn padded_gell_mann(rho: &DensityMatrix) -> Result<(ObservableBasis, ObservableBasis)> {
    let (a, b) = rho.bipartite_dims()?;
    let len = a.max(b).pow(2);
    Ok((
        pad_basis(&gell_mann_basis(a)?, len)?,
        pad_basis(&gell_mann_basis(b)?, len)?,
    ))
}

/// [`bound_lur`] with zero-padded Gell-Mann bases on both sides.
pub fn bound_lur_gell_mann(rho: &DensityMatrix) -> Result<f64> {
    let (ga, gb) = padded_gell_mann(rho)?;
    bound_lur(rho, &ga, &gb)
}

/// Basis-independent bound from the Ky Fan norm of the correlation block.
pub fn bound_optimized(rho: &DensityMatrix) -> Result<f64> {
    let (m, _, _) = ordered_dims(rho)?;
    let pair = gell_mann_pair(rho, 0, 1)?;
    let kf = trace_norm(&pair.block);
    Ok((2.0 * kf - pair.linear_entropy_i - pair.linear_entropy_j) / lur_scale(m))
}

/// Bases that attain [`bound_optimized`] in [`bound_lur`]: with the SVD
/// `C = W S X^T` in padded Gell-Mann bases, `A' = W^T A` and `B' = -X^T B`,
/// so the cross block becomes `-S`.
pub fn optimal_lur_bases(rho: &DensityMatrix) -> Result<(ObservableBasis, ObservableBasis)> {
    let (ga, gb) = padded_gell_mann(rho)?;
    let pair = gell_mann_pair(rho, 0, 1)?;
    let svd = pair.block.svd(true, true);
    let w = svd.u.expect("requested U");
    let xt = svd.v_t.expect("requested V^T");
    Ok((rotate_basis(&ga, &w.transpose())?, rotate_basis(&gb, &(-xt))?))
}

/// All bounds, plus the exact value when the state is pure.
pub fn concurrence_bounds(rho: &DensityMatrix) -> Result<ConcurrenceBounds> {
    let (m, n, swapped) = ordered_dims(rho)?;
    let bound_ccnr_ppt = bound_ccnr_ppt(rho)?;
    let bound_lur = bound_lur_gell_mann(rho)?;
    let bound_optimized = bound_optimized(rho)?;
    let exact_pure = if rho.purity() >= 1.0 - PURE_TOL {
        Some(linear_entropy_concurrence(partial_trace(rho, &[0])?.purity()))
    } else {
        None
    };
    let best = bound_ccnr_ppt.max(bound_lur).max(bound_optimized).max(0.0);
    Ok(ConcurrenceBounds {
        m,
        n,
        swapped,
        bound_ccnr_ppt,
        bound_lur,
        lur_basis: GELL_MANN.to_string(),
        bound_optimized,
        exact_pure,
        best,
    })
}
