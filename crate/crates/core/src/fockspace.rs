//! The full model on a truncated Fock ⊗ spin space.
//!
//! This is the brute-force representation: it exists to check that the
//! two-state block picture used everywhere else is faithful, and to provide
//! an independent evolution oracle.
//!
//! Parity is realised as `(−1)^{a†a} ⊗ I_spin`. It satisfies `P a P⁻¹ = −a`,
//! which is all that is needed for `H† = P H P⁻¹`. The alternative
//! `(−1)^{a†a} ⊗ σ_z` would work equally well and is not provided.

use alloc::vec::Vec;

use crate::blocks;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};

/// Default Fock cutoff.
pub const DEFAULT_N_MAX: usize = 31;

/// Physical parameters of `H = (ε/2)σ_z + ħω a†a + ρ(σ₊a − σ₋a†)`.
///
/// `eps_energy` is `ε = 2μB_z`. ħ = 1, so all three share one energy unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub eps_energy: f64,
    pub hbar_omega: f64,
    pub rho: f64,
}

impl ModelParams {
    pub fn new(eps_energy: f64, hbar_omega: f64, rho: f64) -> Result<Self> {
        if !(eps_energy.is_finite() && hbar_omega.is_finite() && rho.is_finite()) {
            return Err(Error::NonFinite("model parameter"));
        }
        if hbar_omega <= 0.0 {
            return Err(Error::InvalidParams("hbar_omega must be positive"));
        }
        if rho < 0.0 {
            return Err(Error::InvalidParams("rho must be non-negative"));
        }
        Ok(Self { eps_energy, hbar_omega, rho })
    }

    /// `ħω − ε`, the gap that sets the reality domain.
    pub fn detuning(&self) -> f64 {
        self.hbar_omega - self.eps_energy
    }
}

/// Spin projection, `m_s = ±1` in units of ½.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn m_s(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

/// Ordered basis `|n, ½m_s⟩`, `0 ≤ n ≤ n_max`.
///
/// Index of `(n, Up)` is `2n`, of `(n, Down)` is `2n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpinBasis {
    n_max: usize,
}

impl FockSpinBasis {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dimension(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, n: usize, spin: Spin) -> Option<usize> {
        (n <= self.n_max).then(|| 2 * n + usize::from(spin == Spin::Down))
    }

    pub fn label(&self, index: usize) -> Option<(usize, Spin)> {
        (index < self.dimension()).then(|| (index / 2, if index % 2 == 0 { Spin::Up } else { Spin::Down }))
    }

    pub fn ordering(&self) -> Vec<(usize, Spin)> {
        (0..self.dimension()).filter_map(|i| self.label(i)).collect()
    }

    /// Unit vector for `|n, ½m_s⟩`.
    pub fn ket(&self, n: usize, spin: Spin) -> Option<Vec<C64>> {
        let i = self.index(n, spin)?;
        let mut v = alloc::vec![ZERO; self.dimension()];
        v[i] = ONE;
        Some(v)
    }

    /// Basis indices of the invariant block `{|n, ½⟩, |n+1, −½⟩}`, if it fits.
    pub fn block_indices(&self, n: usize) -> Option<[usize; 2]> {
        Some([self.index(n, Spin::Up)?, self.index(n + 1, Spin::Down)?])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockSpinOperator {
    pub basis: FockSpinBasis,
    pub matrix: CMatrix,
}

impl FockSpinOperator {
    pub fn new(basis: FockSpinBasis, matrix: CMatrix) -> Result<Self> {
        let d = basis.dimension();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::Dimension { expected: "basis dimension", found: (matrix.rows(), matrix.cols()) });
        }
        Ok(Self { basis, matrix })
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        self.matrix.apply(v)
    }

    pub fn compose(&self, other: &FockSpinOperator) -> Result<FockSpinOperator> {
        Self::new(self.basis, self.matrix.matmul(&other.matrix)?)
    }

    pub fn adjoint(&self) -> FockSpinOperator {
        Self { basis: self.basis, matrix: self.matrix.adjoint() }
    }

    /// 2×2 submatrix on the given pair of basis indices.
    pub fn submatrix(&self, idx: [usize; 2]) -> CMatrix {
        let m = &self.matrix;
        CMatrix::from_2x2(m[(idx[0], idx[0])], m[(idx[0], idx[1])], m[(idx[1], idx[0])], m[(idx[1], idx[1])])
    }
}

fn diagonal_operator(basis: FockSpinBasis, f: impl Fn(usize, Spin) -> f64) -> FockSpinOperator {
    let diag: Vec<C64> = basis.ordering().into_iter().map(|(n, s)| C64::from(f(n, s))).collect();
    FockSpinOperator { basis, matrix: CMatrix::from_diagonal(&diag) }
}

/// `a ⊗ I_spin`. The top Fock level is mapped down as usual, so `a` itself
/// loses nothing to the cutoff.
pub fn ladder_lowering(basis: FockSpinBasis) -> FockSpinOperator {
    let mut m = CMatrix::zeros(basis.dimension(), basis.dimension());
    for n in 1..=basis.n_max() {
        for s in [Spin::Up, Spin::Down] {
            let (from, to) = (basis.index(n, s).unwrap(), basis.index(n - 1, s).unwrap());
            m[(to, from)] = C64::from(libm::sqrt(n as f64));
        }
    }
    FockSpinOperator { basis, matrix: m }
}

/// `a†a ⊗ I_spin`.
pub fn number_operator(basis: FockSpinBasis) -> FockSpinOperator {
    diagonal_operator(basis, |n, _| n as f64)
}

/// Dense matrix of the model Hamiltonian.
///
/// `σ₊a|n, −½⟩ = √n |n−1, ½⟩` and `σ₋a†|n, ½⟩ = √(n+1) |n+1, −½⟩`; the latter
/// is dropped at `n = n_max`.
pub fn build_full_hamiltonian(params: &ModelParams, basis: FockSpinBasis) -> FockSpinOperator {
    let mut op = diagonal_operator(basis, |n, s| {
        0.5 * params.eps_energy * s.m_s() as f64 + params.hbar_omega * n as f64
    });
    let m = &mut op.matrix;
    for n in 0..basis.n_max() {
        let up = basis.index(n, Spin::Up).unwrap();
        let down_next = basis.index(n + 1, Spin::Down).unwrap();
        let g = params.rho * libm::sqrt((n + 1) as f64);
        m[(up, down_next)] = C64::from(g);
        m[(down_next, up)] = C64::from(-g);
    }
    op
}

/// `(−1)^{a†a} ⊗ I_spin`.
pub fn parity_operator(basis: FockSpinBasis) -> FockSpinOperator {
    diagonal_operator(basis, |n, _| if n % 2 == 0 { 1.0 } else { -1.0 })
}

/// `I_Fock ⊗ σ_z`.
pub fn sigma_z_operator(basis: FockSpinBasis) -> FockSpinOperator {
    diagonal_operator(basis, |_, s| s.m_s() as f64)
}

/// `max |O H O⁻¹ − H†|` over rows and columns with Fock index `< n_max`.
pub fn pseudo_hermiticity_residual(h: &FockSpinOperator, o: &FockSpinOperator) -> Result<f64> {
    if h.basis != o.basis {
        return Err(Error::Dimension {
            expected: "operators on the same basis",
            found: (h.basis.dimension(), o.basis.dimension()),
        });
    }
    let o_inv = o.matrix.inverse()?;
    let conj = &(&o.matrix * &h.matrix) * &o_inv;
    let adj = h.matrix.adjoint();
    let basis = h.basis;
    let keep: Vec<usize> =
        (0..basis.dimension()).filter(|&i| basis.label(i).is_some_and(|(n, _)| n < basis.n_max())).collect();
    let mut worst: f64 = 0.0;
    for &i in &keep {
        for &j in &keep {
            worst = worst.max((conj[(i, j)] - adj[(i, j)]).norm());
        }
    }
    Ok(worst)
}

/// Which eigenvalue a spectrum entry is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumLabel {
    /// `|0, −½⟩`, energy `−ε/2`.
    Ground,
    /// Upper (`+`) or lower (`−`) root of block `n`.
    Block { n: usize, upper: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub label: SpectrumLabel,
    /// Complex outside the reality domain.
    pub value: C64,
}

/// Spectrum of the truncated model from the block closed forms: the ground
/// value plus both roots of every complete block `n = 0..n_max−1`.
pub fn full_spectrum(params: &ModelParams, basis: FockSpinBasis) -> Vec<SpectrumEntry> {
    let mut out = Vec::with_capacity(2 * basis.n_max() + 1);
    out.push(SpectrumEntry { label: SpectrumLabel::Ground, value: C64::from(-0.5 * params.eps_energy) });
    for n in 0..basis.n_max() {
        let [plus, minus] = blocks::block_eigenvalues_complex(n, params);
        out.push(SpectrumEntry { label: SpectrumLabel::Block { n, upper: true }, value: plus });
        out.push(SpectrumEntry { label: SpectrumLabel::Block { n, upper: false }, value: minus });
    }
    out
}

/// `exp(−iHt)·state` on the truncated space, by series exponentiation.
pub fn evolve_full(state: &[C64], t: f64, params: &ModelParams, basis: FockSpinBasis) -> Result<Vec<C64>> {
    if state.len() != basis.dimension() {
        return Err(Error::Dimension { expected: "state length == basis dimension", found: (state.len(), basis.dimension()) });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let h = build_full_hamiltonian(params, basis);
    let u = linalg::exp_series(&h.matrix, C64::new(0.0, -t))?;
    u.apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dirac_inner;

    fn params() -> ModelParams {
        ModelParams::new(0.5, 1.0, 0.1).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.0, 0.1).is_err());
        assert!(ModelParams::new(0.0, 1.0, -0.1).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 0.1).is_err());
    }

    #[test]
    fn basis_bijection() {
        let b = FockSpinBasis::new(5);
        assert_eq!(b.dimension(), 12);
        let ord = b.ordering();
        assert_eq!(ord.len(), 12);
        for (i, &(n, s)) in ord.iter().enumerate() {
            assert_eq!(b.index(n, s), Some(i));
        }
        assert_eq!(b.index(6, Spin::Up), None);
        assert_eq!(b.block_indices(5), None);
        assert_eq!(b.block_indices(0), Some([0, 3]));
    }

    #[test]
    fn lowering_operator_action() {
        let b = FockSpinBasis::new(4);
        let a = ladder_lowering(b);
        for s in [Spin::Up, Spin::Down] {
            assert!(a.apply(&b.ket(0, s).unwrap()).unwrap().iter().all(|z| *z == ZERO));
            assert_eq!(a.apply(&b.ket(1, s).unwrap()).unwrap(), b.ket(0, s).unwrap());
        }
        let num = a.adjoint().compose(&a).unwrap();
        for n in 0..=b.n_max() {
            let v = num.apply(&b.ket(n, Spin::Up).unwrap()).unwrap();
            let want: Vec<C64> = b.ket(n, Spin::Up).unwrap().iter().map(|z| z * n as f64).collect();
            assert!(v.iter().zip(&want).all(|(x, y)| (x - y).norm() < 1e-14));
        }
        assert!(num.matrix.max_abs_diff(&number_operator(b).matrix) < 1e-14);
    }

    #[test]
    fn hamiltonian_low_lying_action() {
        let p = params();
        let b = FockSpinBasis::new(6);
        let h = build_full_hamiltonian(&p, b);
        let ground = b.ket(0, Spin::Down).unwrap();
        let hg = h.apply(&ground).unwrap();
        assert!(hg.iter().zip(&ground).all(|(x, y)| (x - y * (-p.eps_energy / 2.0)).norm() < 1e-15));

        let hv = h.apply(&b.ket(0, Spin::Up).unwrap()).unwrap();
        assert_eq!(hv[b.index(0, Spin::Up).unwrap()], C64::from(p.eps_energy / 2.0));
        assert_eq!(hv[b.index(1, Spin::Down).unwrap()], C64::from(-p.rho));
        assert_eq!(hv.iter().filter(|z| **z != ZERO).count(), 2);

        let hv = h.apply(&b.ket(1, Spin::Down).unwrap()).unwrap();
        assert_eq!(hv[b.index(0, Spin::Up).unwrap()], C64::from(p.rho));
        assert_eq!(hv[b.index(1, Spin::Down).unwrap()], C64::from(p.hbar_omega - p.eps_energy / 2.0));
        assert_eq!(hv.iter().filter(|z| **z != ZERO).count(), 2);
    }

    #[test]
    fn blocks_match_full_matrix() {
        let p = ModelParams::new(0.2, 1.0, 0.05).unwrap();
        let b = FockSpinBasis::new(8);
        let h = build_full_hamiltonian(&p, b);
        for n in 0..b.n_max() {
            let sub = h.submatrix(b.block_indices(n).unwrap());
            assert_eq!(sub, blocks::block_hamiltonian(n, &p));
        }
        let sub3 = h.submatrix(b.block_indices(3).unwrap());
        assert!((sub3[(0, 1)].re - 0.1).abs() < 1e-16);
        assert!((sub3[(1, 0)].re + 0.1).abs() < 1e-16);
    }

    #[test]
    fn parity_and_sigma_z() {
        let b = FockSpinBasis::new(3);
        let p = parity_operator(b);
        assert_eq!(p.apply(&b.ket(0, Spin::Up).unwrap()).unwrap(), b.ket(0, Spin::Up).unwrap());
        let odd = p.apply(&b.ket(1, Spin::Down).unwrap()).unwrap();
        assert_eq!(odd[b.index(1, Spin::Down).unwrap()], -ONE);
        let id = CMatrix::identity(b.dimension());
        assert_eq!(p.compose(&p).unwrap().matrix, id);
        let sz = sigma_z_operator(b);
        assert_eq!(sz.apply(&b.ket(2, Spin::Up).unwrap()).unwrap(), b.ket(2, Spin::Up).unwrap());
        assert_eq!(sz.apply(&b.ket(2, Spin::Down).unwrap()).unwrap()[5], -ONE);
        assert_eq!(sz.compose(&sz).unwrap().matrix, id);
        // P a P⁻¹ = −a
        let a = ladder_lowering(b);
        let pap = p.compose(&a).unwrap().compose(&p).unwrap();
        assert!(pap.matrix.max_abs_diff(&a.matrix.scale(-ONE)) < 1e-15);
    }

    #[test]
    fn pseudo_hermiticity() {
        let b = FockSpinBasis::new(DEFAULT_N_MAX);
        let h = build_full_hamiltonian(&params(), b);
        assert!(pseudo_hermiticity_residual(&h, &parity_operator(b)).unwrap() <= 1e-13);
        assert!(pseudo_hermiticity_residual(&h, &sigma_z_operator(b)).unwrap() <= 1e-13);
        let id = FockSpinOperator::new(b, CMatrix::identity(b.dimension())).unwrap();
        let herm = build_full_hamiltonian(&ModelParams::new(0.5, 1.0, 0.0).unwrap(), b);
        assert_eq!(pseudo_hermiticity_residual(&herm, &id).unwrap(), 0.0);
        // non-Hermitian H is not pseudo-Hermitian under the identity
        assert!(pseudo_hermiticity_residual(&h, &id).unwrap() > 0.1);
        let singular = FockSpinOperator::new(b, CMatrix::zeros(b.dimension(), b.dimension())).unwrap();
        assert_eq!(pseudo_hermiticity_residual(&h, &singular), Err(Error::Singular));
    }

    #[test]
    fn spectrum_decoupled_ladder() {
        let p = ModelParams::new(0.3, 1.0, 0.0).unwrap();
        let spec = full_spectrum(&p, FockSpinBasis::new(4));
        assert_eq!(spec.len(), 9);
        assert_eq!(spec[0].value, C64::from(-0.15));
        for e in &spec[1..] {
            let SpectrumLabel::Block { n, upper } = e.label else { panic!() };
            // upper root is |n+1, −½⟩ (−ε/2 + (n+1)ħω), lower is |n, ½⟩
            let want = if upper { -0.15 + (n + 1) as f64 } else { 0.15 + n as f64 };
            assert!((e.value - C64::from(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn evolve_full_cases() {
        let p = params();
        let b = FockSpinBasis::new(5);
        let psi = b.ket(0, Spin::Up).unwrap();
        assert_eq!(evolve_full(&psi, 0.0, &p, b).unwrap(), psi);
        let t = 1.7;
        let g = evolve_full(&b.ket(0, Spin::Down).unwrap(), t, &p, b).unwrap();
        let phase = C64::new(0.0, p.eps_energy * t / 2.0).exp();
        assert!((g[1] - phase).norm() < 1e-12);
        assert!(evolve_full(&psi[..3], 1.0, &p, b).is_err());
        // ρ = 0: unitary
        let herm = ModelParams::new(0.5, 1.0, 0.0).unwrap();
        let v: Vec<C64> = (0..b.dimension()).map(|i| C64::new(i as f64, 1.0)).collect();
        let w = evolve_full(&v, 3.3, &herm, b).unwrap();
        assert!((dirac_inner(&w, &w) - dirac_inner(&v, &v)).norm() < 1e-10 * dirac_inner(&v, &v).norm());
    }
}
