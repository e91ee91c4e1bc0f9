//! Two-state invariant blocks `span{|n, ½⟩, |n+1, −½⟩}`.
//!
//! On block `n` the Hamiltonian is
//!
//! ```text
//! H_{n+1} = [[ ε/2 + nħω,    ρ√(n+1)          ],
//!            [ −ρ√(n+1),     −ε/2 + (n+1)ħω   ]]
//! ```
//!
//! with eigenvalues `λ± = ½[(2n+1)ħω ± √((ħω−ε)² − 4ρ²(n+1))]`, real iff
//! `ħω − ε ≥ 2ρ√(n+1)`. Writing `(ħω − ε) sin α = 2ρ√(n+1)` the eigenvectors
//! are real and simple functions of `α/2`; they coalesce at `α = π/2`, the
//! exceptional point.

use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::fockspace::ModelParams;
use crate::linalg::{self, CMatrix, C64};

fn coupling(n: usize, params: &ModelParams) -> f64 {
    params.rho * libm::sqrt((n + 1) as f64)
}

pub fn block_hamiltonian(n: usize, params: &ModelParams) -> CMatrix {
    let g = coupling(n, params);
    let nf = n as f64;
    CMatrix::real_2x2(
        0.5 * params.eps_energy + nf * params.hbar_omega,
        g,
        -g,
        -0.5 * params.eps_energy + (nf + 1.0) * params.hbar_omega,
    )
}

/// `(ħω − ε)² − 4ρ²(n+1)`.
pub fn discriminant(n: usize, params: &ModelParams) -> f64 {
    let d = params.detuning();
    let g = coupling(n, params);
    d * d - 4.0 * g * g
}

/// `|2ρ√(n+1)/(ħω − ε) − 1|` at or below this counts as the exceptional
/// point. Two ulps: parameters built from the boundary formula land within
/// rounding of it on either side.
pub const EXCEPTIONAL_TOL: f64 = 2.0 * f64::EPSILON;

fn ratio(n: usize, params: &ModelParams) -> f64 {
    2.0 * coupling(n, params) / params.detuning()
}

/// Block `n` sits on its exceptional point (to within [`EXCEPTIONAL_TOL`]).
pub fn is_exceptional(n: usize, params: &ModelParams) -> bool {
    params.detuning() > 0.0 && (ratio(n, params) - 1.0).abs() <= EXCEPTIONAL_TOL
}

/// `ħω − ε ≥ 2ρ√(n+1)`; the boundary (exceptional point) is admitted.
pub fn reality_condition(n: usize, params: &ModelParams) -> bool {
    params.detuning() >= 2.0 * coupling(n, params) || is_exceptional(n, params)
}

/// `(λ+, λ−)` with `λ+ ≥ λ−`.
pub fn block_eigenvalues(n: usize, params: &ModelParams) -> Result<(f64, f64)> {
    let disc = discriminant(n, params);
    if !reality_condition(n, params) {
        return Err(Error::ComplexSpectrum { n, discriminant: disc });
    }
    let root = if is_exceptional(n, params) { 0.0 } else { libm::sqrt(disc.max(0.0)) };
    let centre = (2 * n + 1) as f64 * params.hbar_omega;
    Ok((0.5 * (centre + root), 0.5 * (centre - root)))
}

/// Eigenvalues continued into the broken regime, where they form a
/// complex-conjugate pair.
pub fn block_eigenvalues_complex(n: usize, params: &ModelParams) -> [C64; 2] {
    if let Ok((p, m)) = block_eigenvalues(n, params) {
        return [p.into(), m.into()];
    }
    let centre = C64::from((2 * n + 1) as f64 * params.hbar_omega);
    let root = C64::from(discriminant(n, params)).sqrt();
    [(centre + root) * 0.5, (centre - root) * 0.5]
}

/// `sin α = 2ρ√(n+1) / (ħω − ε)`.
pub fn sin_alpha(n: usize, params: &ModelParams) -> Result<f64> {
    let d = params.detuning();
    if d <= 0.0 {
        return Err(Error::RealityViolated { n, sin_alpha: f64::INFINITY });
    }
    if is_exceptional(n, params) {
        return Ok(1.0);
    }
    let s = ratio(n, params);
    if s > 1.0 {
        return Err(Error::RealityViolated { n, sin_alpha: s });
    }
    Ok(s)
}

/// `α = arcsin(2ρ√(n+1)/(ħω−ε)) ∈ [0, π/2]`.
pub fn alpha_of(n: usize, params: &ModelParams) -> Result<f64> {
    Ok(libm::asin(sin_alpha(n, params)?))
}

/// Right eigenvectors `ψ± = (sin α/2, cos α/2)`, `(cos α/2, sin α/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigenvectors {
    /// Eigenvalue `λ+`.
    pub plus: [C64; 2],
    /// Eigenvalue `λ−`.
    pub minus: [C64; 2],
    /// `α = π/2`: both vectors are `(1, 1)/√2`.
    pub coalesced: bool,
}

/// Eigenvectors of `H† = H(ρ → −ρ)`, `φ+ = (cos α/2, −sin α/2)` and
/// `φ− = (−sin α/2, cos α/2)`.
///
/// The labels follow the metric construction, not the eigenvalues:
/// `H†φ+ = λ−φ+` and `H†φ− = λ+φ−`. Equivalently `φ+` is orthogonal to `ψ+`
/// and `φ−` to `ψ−`, which is the usual biorthogonal pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointEigenvectors {
    pub plus: [C64; 2],
    pub minus: [C64; 2],
    pub coalesced: bool,
}

fn half_angles(n: usize, params: &ModelParams) -> Result<(f64, f64, bool)> {
    let s = sin_alpha(n, params)?;
    let alpha = libm::asin(s);
    Ok((libm::sin(0.5 * alpha), libm::cos(0.5 * alpha), s >= 1.0))
}

pub fn block_eigenvectors(n: usize, params: &ModelParams) -> Result<BlockEigenvectors> {
    let (s, c, coalesced) = half_angles(n, params)?;
    if coalesced {
        let v = [C64::from(core::f64::consts::FRAC_1_SQRT_2); 2];
        return Ok(BlockEigenvectors { plus: v, minus: v, coalesced });
    }
    Ok(BlockEigenvectors { plus: [s.into(), c.into()], minus: [c.into(), s.into()], coalesced })
}

pub fn adjoint_block_eigenvectors(n: usize, params: &ModelParams) -> Result<AdjointEigenvectors> {
    let (s, c, coalesced) = half_angles(n, params)?;
    if coalesced {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let v = [C64::from(h), C64::from(-h)];
        return Ok(AdjointEigenvectors { plus: v, minus: [-v[0], -v[1]], coalesced });
    }
    Ok(AdjointEigenvectors { plus: [c.into(), (-s).into()], minus: [(-s).into(), c.into()], coalesced })
}

/// Principal angle between `ψ+` and `ψ−`; analytically `π/2 − α`, zero at
/// the exceptional point.
pub fn coalescence_measure(n: usize, params: &ModelParams) -> Result<f64> {
    let v = block_eigenvectors(n, params)?;
    Ok(linalg::principal_angle(&v.plus, &v.minus))
}

/// A block with its eigensystem, valid inside the reality domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    pub n: usize,
    pub params: ModelParams,
    pub h: CMatrix,
    pub alpha: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl BlockSystem {
    pub fn new(n: usize, params: ModelParams) -> Result<Self> {
        let alpha = alpha_of(n, &params)?;
        let (lambda_plus, lambda_minus) = block_eigenvalues(n, &params)?;
        Ok(Self { n, params, h: block_hamiltonian(n, &params), alpha, lambda_plus, lambda_minus })
    }

    pub fn is_exceptional(&self) -> bool {
        self.alpha >= FRAC_PI_2
    }

    pub fn eigenvectors(&self) -> BlockEigenvectors {
        block_eigenvectors(self.n, &self.params).expect("validated on construction")
    }

    pub fn adjoint_eigenvectors(&self) -> AdjointEigenvectors {
        adjoint_block_eigenvectors(self.n, &self.params).expect("validated on construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dirac_inner, eig_2x2};
    use core::f64::consts::FRAC_PI_6;

    fn p(eps: f64, hw: f64, rho: f64) -> ModelParams {
        ModelParams::new(eps, hw, rho).unwrap()
    }

    fn residual(h: &CMatrix, v: &[C64; 2], lambda: f64) -> f64 {
        let hv = h.apply(v).unwrap();
        hv.iter().zip(v).map(|(a, b)| (a - b * lambda).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn hamiltonian_entries() {
        let q = p(0.4, 1.0, 0.2);
        assert_eq!(block_hamiltonian(0, &q), CMatrix::real_2x2(0.2, 0.2, -0.2, 0.8));
        assert_eq!(block_hamiltonian(0, &p(0.4, 1.0, 0.0)), CMatrix::real_2x2(0.2, 0.0, 0.0, 0.8));
        let h3 = block_hamiltonian(3, &p(0.2, 1.0, 0.05));
        assert!((h3[(0, 1)].re - 0.1).abs() < 1e-16 && (h3[(1, 0)].re + 0.1).abs() < 1e-16);
    }

    #[test]
    fn eigenvalue_cases() {
        let (lp, lm) = block_eigenvalues(0, &p(0.4, 1.0, 0.0)).unwrap();
        assert!((lp - 0.8).abs() < 1e-15 && (lm - 0.2).abs() < 1e-15);
        let (lp, lm) = block_eigenvalues(0, &p(0.5, 1.0, 0.1)).unwrap();
        assert!((lp - 0.729_128_784_747_792).abs() < 1e-12);
        assert!((lm - 0.270_871_215_252_208).abs() < 1e-12);
        // exceptional point: ħω − ε = 1 = 2ρ√4
        let (lp, lm) = block_eigenvalues(3, &p(0.0, 1.0, 0.25)).unwrap();
        assert_eq!(lp, 3.5);
        assert_eq!(lm, 3.5);
        match block_eigenvalues(0, &p(0.9, 1.0, 0.1)) {
            Err(Error::ComplexSpectrum { discriminant, .. }) => assert!((discriminant + 0.03).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let [a, b] = block_eigenvalues_complex(0, &p(0.9, 1.0, 0.1));
        assert_eq!(a, b.conj());
    }

    #[test]
    fn alpha_cases() {
        assert_eq!(alpha_of(0, &p(0.3, 1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(alpha_of(0, &p(0.0, 1.0, 0.5)).unwrap(), FRAC_PI_2);
        assert!((alpha_of(0, &p(0.0, 1.0, 0.25)).unwrap() - FRAC_PI_6).abs() < 1e-15);
        assert!(matches!(alpha_of(0, &p(0.9, 1.0, 0.1)), Err(Error::RealityViolated { .. })));
        assert!(matches!(alpha_of(0, &p(1.0, 1.0, 0.0)), Err(Error::RealityViolated { .. })));
        assert!(matches!(alpha_of(0, &p(1.5, 1.0, 0.0)), Err(Error::RealityViolated { .. })));
    }

    #[test]
    fn reality_cases() {
        assert!(reality_condition(0, &p(0.3, 1.0, 0.0)));
        assert!(reality_condition(0, &p(0.0, 1.0, 0.5)));
        assert!(!reality_condition(0, &p(0.9, 1.0, 0.1)));
    }

    #[test]
    fn eigenvector_cases() {
        let v = block_eigenvectors(0, &p(0.3, 1.0, 0.0)).unwrap();
        assert_eq!(v.plus, [C64::from(0.0), C64::from(1.0)]);
        assert_eq!(v.minus, [C64::from(1.0), C64::from(0.0)]);
        let ep = block_eigenvectors(0, &p(0.0, 1.0, 0.5)).unwrap();
        assert!(ep.coalesced);
        assert_eq!(ep.plus, ep.minus);
        let q = p(0.3, 1.0, 0.15);
        let h = block_hamiltonian(0, &q);
        let (lp, lm) = block_eigenvalues(0, &q).unwrap();
        let v = block_eigenvectors(0, &q).unwrap();
        assert!(residual(&h, &v.plus, lp) < 1e-12);
        assert!(residual(&h, &v.minus, lm) < 1e-12);
        // generic solver agrees up to phase
        let g = eig_2x2(&h).unwrap();
        assert!(linalg::principal_angle(&g.vectors[0], &v.plus) < 1e-12);
        assert!(linalg::principal_angle(&g.vectors[1], &v.minus) < 1e-12);
    }

    #[test]
    fn adjoint_eigenvector_cases() {
        let a = adjoint_block_eigenvectors(0, &p(0.3, 1.0, 0.0)).unwrap();
        assert_eq!(a.plus, [C64::from(1.0), C64::from(-0.0)]);
        assert_eq!(a.minus, [C64::from(-0.0), C64::from(1.0)]);

        let q = p(0.3, 1.0, 0.2);
        let alpha = alpha_of(0, &q).unwrap();
        let hd = block_hamiltonian(0, &q).adjoint();
        let (lp, lm) = block_eigenvalues(0, &q).unwrap();
        let a = adjoint_block_eigenvectors(0, &q).unwrap();
        assert!(residual(&hd, &a.plus, lm) < 1e-12);
        assert!(residual(&hd, &a.minus, lp) < 1e-12);

        // H† = H(ρ → −ρ): the adjoint pair spans the eigenlines of the negated-ρ block
        let neg = CMatrix::real_2x2(hd[(0, 0)].re, -q.rho, q.rho, hd[(1, 1)].re);
        assert_eq!(neg, hd);
        let g = eig_2x2(&neg).unwrap();
        assert!(linalg::principal_angle(&g.vectors[0], &a.minus) < 1e-12);
        assert!(linalg::principal_angle(&g.vectors[1], &a.plus) < 1e-12);

        let v = block_eigenvectors(0, &q).unwrap();
        assert!(dirac_inner(&a.plus, &v.plus).norm() < 1e-15);
        assert!(dirac_inner(&a.minus, &v.minus).norm() < 1e-15);
        assert!((dirac_inner(&a.plus, &v.minus).re - libm::cos(alpha)).abs() < 1e-15);
        assert!((dirac_inner(&v.plus, &v.minus).re - libm::sin(alpha)).abs() < 1e-15);
    }

    #[test]
    fn coalescence_cases() {
        assert!((coalescence_measure(0, &p(0.3, 1.0, 0.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(coalescence_measure(0, &p(0.0, 1.0, 0.5)).unwrap() < 1e-15);
        let mut last = f64::INFINITY;
        for k in 0..100 {
            let alpha = FRAC_PI_2 * k as f64 / 99.0;
            let q = p(0.0, 1.0, 0.5 * libm::sin(alpha));
            let m = coalescence_measure(0, &q).unwrap();
            assert!(m < last || k == 0);
            assert!((m - (FRAC_PI_2 - alpha_of(0, &q).unwrap())).abs() < 1e-10);
            last = m;
        }
    }

    #[test]
    fn block_system_flags() {
        let b = BlockSystem::new(0, p(0.0, 1.0, 0.5)).unwrap();
        assert!(b.is_exceptional());
        assert_eq!(b.lambda_plus, b.lambda_minus);
        assert!(BlockSystem::new(0, p(0.9, 1.0, 0.1)).is_err());
        assert!(!BlockSystem::new(2, p(0.1, 1.0, 0.1)).unwrap().is_exceptional());
    }
}
