//! The metric operator η of a block and the η-inner product.
//!
//! `η = |φ+⟩⟨φ+| + |φ−⟩⟨φ−|` built from the adjoint eigenvectors works out to
//!
//! ```text
//! η = [[1, −sin α], [−sin α, 1]] = I − sin α (σ₊ + σ₋)
//! ```
//!
//! with eigenvalues `1 ± sin α`: positive definite for `α < π/2`, singular at
//! the exceptional point. It intertwines the block Hamiltonian,
//! `η H = H† η`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::blocks::{self, adjoint_block_eigenvectors, alpha_of};
use crate::error::{Error, Result};
use crate::fockspace::{FockSpinBasis, FockSpinOperator, ModelParams, Spin};
use crate::linalg::{self, CMatrix, C64};

/// A per-block metric. `matrix` is always the closed form in `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricOperator {
    alpha: f64,
    matrix: CMatrix,
}

impl MetricOperator {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_positive_definite(&self) -> bool {
        metric_eigenvalues(self).1 > 0.0
    }
}

/// Relative threshold under which an η-norm counts as degenerate.
pub const DEGENERATE_NORM_REL: f64 = 1e-14;

/// `η` from the spectral sum over the adjoint eigenvectors of block `n`.
///
/// The returned matrix is the spectral sum itself; `alpha` is recorded
/// alongside so that it can be compared against [`metric_closed_form`].
pub fn metric_spectral(n: usize, params: &ModelParams) -> Result<MetricOperator> {
    let alpha = alpha_of(n, params)?;
    let phi = adjoint_block_eigenvectors(n, params)?;
    let matrix = &CMatrix::outer(&phi.plus, &phi.plus) + &CMatrix::outer(&phi.minus, &phi.minus);
    Ok(MetricOperator { alpha, matrix })
}

/// `[[1, −sin α], [−sin α, 1]]` for `0 ≤ α ≤ π/2`.
pub fn metric_closed_form(alpha: f64) -> Result<MetricOperator> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::OutOfRange { what: "alpha", value: alpha, min: 0.0, max: FRAC_PI_2 });
    }
    let s = -libm::sin(alpha);
    Ok(MetricOperator { alpha, matrix: CMatrix::real_2x2(1.0, s, s, 1.0) })
}

/// The same matrix written as `I − sin α (σ₊ + σ₋)`.
pub fn metric_from_ladder(alpha: f64) -> CMatrix {
    let sigma_plus = CMatrix::real_2x2(0.0, 1.0, 0.0, 0.0);
    let sigma_minus = CMatrix::real_2x2(0.0, 0.0, 1.0, 0.0);
    &CMatrix::identity(2) - &(&sigma_plus + &sigma_minus).scale(C64::from(libm::sin(alpha)))
}

/// `(1 + sin α, 1 − sin α)`.
pub fn metric_eigenvalues(eta: &MetricOperator) -> (f64, f64) {
    let s = libm::sin(eta.alpha);
    (1.0 + s, 1.0 - s)
}

/// `u† η v`.
pub fn eta_inner(u: &[C64], v: &[C64], eta: &MetricOperator) -> Result<C64> {
    if u.len() != 2 || v.len() != 2 {
        return Err(Error::Dimension { expected: "two-component vectors", found: (u.len(), v.len()) });
    }
    Ok(linalg::dirac_inner(u, &eta.matrix.apply(v)?))
}

/// `max |η H − H† η|` on block `n`.
pub fn quasi_hermiticity_residual(n: usize, params: &ModelParams) -> Result<f64> {
    let eta = metric_spectral(n, params)?;
    let h = blocks::block_hamiltonian(n, params);
    let lhs = &eta.matrix * &h;
    let rhs = &h.adjoint() * &eta.matrix;
    Ok(lhs.max_abs_diff(&rhs))
}

/// `⟨v|η|v⟩`, rejecting zero and negative values.
pub fn eta_norm_sqr(v: &[C64], eta: &MetricOperator) -> Result<f64> {
    let n2 = eta_inner(v, v, eta)?.re;
    let dirac = linalg::dirac_inner(v, v).re;
    if !(n2 > DEGENERATE_NORM_REL * dirac) {
        return Err(Error::DegenerateNorm { value: n2 });
    }
    Ok(n2)
}

/// `v / √⟨v|η|v⟩`.
pub fn eta_normalize(v: &[C64], eta: &MetricOperator) -> Result<[C64; 2]> {
    let scale = 1.0 / libm::sqrt(eta_norm_sqr(v, eta)?);
    Ok([v[0] * scale, v[1] * scale])
}

/// Block-diagonal η on the whole truncated space.
///
/// Each complete block `n < n_max` gets its own `η(α_n)`; the ground state
/// and the dangling `|n_max, ½⟩` get 1. Fails if any block is outside the
/// reality domain.
pub fn full_space_metric(params: &ModelParams, basis: FockSpinBasis) -> Result<FockSpinOperator> {
    let d = basis.dimension();
    let mut m = CMatrix::identity(d);
    for n in 0..basis.n_max() {
        let eta = metric_closed_form(alpha_of(n, params)?)?;
        let [i, j] = basis.block_indices(n).expect("complete block");
        m[(i, j)] = eta.matrix[(0, 1)];
        m[(j, i)] = eta.matrix[(1, 0)];
    }
    debug_assert_eq!(basis.index(0, Spin::Down).map(|g| m[(g, g)]), Some(C64::from(1.0)));
    FockSpinOperator::new(basis, m)
}

/// Per-block `α_n` for the complete blocks of `basis`.
pub fn block_alphas(params: &ModelParams, basis: FockSpinBasis) -> Result<Vec<f64>> {
    (0..basis.n_max()).map(|n| alpha_of(n, params)).collect()
}
