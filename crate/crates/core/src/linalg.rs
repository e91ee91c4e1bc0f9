//! Small dense complex linear algebra.
//!
//! Everything in scope is at most a few dozen rows square, so matrices are
//! stored densely in row-major order and no attempt is made at blocking or
//! sparse formats.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: "rows * cols entries",
                found: (data.len(), rows * cols),
            });
        }
        if data.iter().any(|z| !is_finite(*z)) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// `[[a, b], [c, d]]`.
    pub fn from_2x2(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { rows: 2, cols: 2, data: vec![a, b, c, d] }
    }

    /// Real 2×2 matrix `[[a, b], [c, d]]`.
    pub fn real_2x2(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::from_2x2(a.into(), b.into(), c.into(), d.into())
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension { expected: "lhs.cols == rhs.rows", found: (self.cols, rhs.rows) });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                out.data[i * rhs.cols + j] = cdot((0..self.cols).map(|k| (self[(i, k)], rhs[(k, j)])));
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: "vector length == cols", found: (v.len(), self.cols) });
        }
        Ok((0..self.rows).map(|i| cdot(self.row(i).iter().copied().zip(v.iter().copied()))).collect())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`; `INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension { expected: "square matrix", found: (self.rows, self.cols) });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[(p, col)].norm().total_cmp(&a[(q, col)].norm()))
                .unwrap_or(col);
            if a[(pivot, col)].norm() <= f64::EPSILON * scale * n as f64 || scale == 0.0 {
                return Err(Error::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] *= p;
                inv[(col, j)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    fn require_2x2(&self) -> Result<()> {
        if self.rows == 2 && self.cols == 2 {
            Ok(())
        } else {
            Err(Error::Dimension { expected: "2x2 matrix", found: (self.rows, self.cols) })
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix sum shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix difference shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn sigma_x() -> CMatrix {
    CMatrix::real_2x2(0.0, 1.0, 1.0, 0.0)
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_2x2(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> CMatrix {
    CMatrix::real_2x2(1.0, 0.0, 0.0, -1.0)
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Real `Σ x_i y_i` accumulated in doubled precision: each product is split
/// exactly with an FMA and the rounding errors are summed separately. The
/// result is as accurate as if computed in twice the working precision and
/// then rounded.
pub fn dot2(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (x, y) in pairs {
        let p = x * y;
        let pe = libm::fma(x, y, -p);
        let (t, se) = two_sum(s, p);
        s = t;
        c += pe + se;
    }
    s + c
}

/// Complex `Σ a_k b_k` with [`dot2`] accumulation on both parts.
pub fn cdot(pairs: impl Iterator<Item = (C64, C64)> + Clone) -> C64 {
    let re = dot2(pairs.clone().flat_map(|(a, b)| [(a.re, b.re), (-a.im, b.im)]));
    let im = dot2(pairs.flat_map(|(a, b)| [(a.re, b.im), (a.im, b.re)]));
    C64::new(re, im)
}

/// Dirac inner product `u† v`.
pub fn dirac_inner(u: &[C64], v: &[C64]) -> C64 {
    cdot(u.iter().zip(v).map(|(a, b)| (a.conj(), *b)))
}

pub fn norm(v: &[C64]) -> f64 {
    libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// Principal angle in `[0, π/2]` between the lines spanned by `u` and `v`.
///
/// Computed as `atan2(‖v⊥‖, |⟨û, v⟩|)` so that nearly parallel vectors keep
/// full relative accuracy (an `acos` would lose half the digits).
pub fn principal_angle(u: &[C64], v: &[C64]) -> f64 {
    let nu = norm(u);
    let nv = norm(v);
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let uh: Vec<C64> = u.iter().map(|z| z / nu).collect();
    let vh: Vec<C64> = v.iter().map(|z| z / nv).collect();
    let p = dirac_inner(&uh, &vh);
    let perp: Vec<C64> = vh.iter().zip(&uh).map(|(b, a)| b - p * a).collect();
    libm::atan2(norm(&perp), p.norm())
}

/// `M = c0·I + m·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomposition {
    pub c0: C64,
    /// Coefficients of `(σ_x, σ_y, σ_z)`.
    pub m: [C64; 3],
}

impl PauliDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let [mx, my, mz] = self.m;
        CMatrix::from_2x2(self.c0 + mz, mx - I * my, mx + I * my, self.c0 - mz)
    }

    /// `m·m` (bilinear, no conjugation).
    pub fn m_dot_m(&self) -> C64 {
        self.m.iter().map(|z| z * z).sum()
    }
}

pub fn pauli_decompose(m: &CMatrix) -> Result<PauliDecomposition> {
    m.require_2x2()?;
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    // tr(σ_k M)/2 written out
    Ok(PauliDecomposition {
        c0: (a + d) * 0.5,
        m: [(b + c) * 0.5, (b - c) * I * 0.5, (a - d) * 0.5],
    })
}

/// `e^{sM}` for a 2×2 matrix through its Pauli form.
///
/// With `M = c0·I + N` and `z² = s²(m·m)`:
/// `e^{sM} = e^{s·c0} [cosh z · I + (sinh z / z) · sN]`.
/// Both factors are even in `z`, so the branch of the square root cannot
/// change the result; the principal branch is taken. The `z → 0` limit is
/// handled by a short Taylor expansion.
pub fn exp_2x2(m: &CMatrix, s: C64) -> Result<CMatrix> {
    let p = pauli_decompose(m)?;
    let z = (s * s * p.m_dot_m()).sqrt();
    let (ch, shc) = cosh_sinhc(z);
    let pre = (s * p.c0).exp();
    let n = m - &CMatrix::identity(2).scale(p.c0);
    let out = &CMatrix::identity(2).scale(ch) + &n.scale(s * shc);
    Ok(out.scale(pre))
}

/// `(cosh z, sinh z / z)` with the removable singularity at 0 filled in.
fn cosh_sinhc(z: C64) -> (C64, C64) {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        let ch = ONE + z2 * (0.5 + z2 * (1.0 / 24.0 + z2 / 720.0));
        let shc = ONE + z2 * (1.0 / 6.0 + z2 * (1.0 / 120.0 + z2 / 5040.0));
        (ch, shc)
    } else {
        (z.cosh(), z.sinh() / z)
    }
}

/// `e^{sM}` by scaling and squaring with a truncated Taylor series.
///
/// The scaled matrix has max-row-sum norm ≤ 0.5; terms are summed until
/// their norm drops below 1e-18.
pub fn exp_series(m: &CMatrix, s: C64) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension { expected: "square matrix", found: (m.rows, m.cols) });
    }
    let a = m.scale(s);
    let nrm = a.norm_inf();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while nrm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a.scale(scale.into());
    let n = m.rows;
    let mut result = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for j in 1..200 {
        term = (&term * &b).scale(C64::from(1.0 / j as f64));
        result = &result + &term;
        if term.norm_inf() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Eigensystem of a 2×2 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen2 {
    /// Ordered by descending real part, then descending imaginary part.
    pub values: [C64; 2],
    /// Unit Dirac norm; `vectors[k]` belongs to `values[k]`.
    pub vectors: [[C64; 2]; 2],
    /// Set when the eigenvalues and eigenvectors have coalesced
    /// (gap < 1e-10‖M‖ and eigenvector angle < 1e-8 rad).
    pub defective: bool,
}

pub const DEFECTIVE_GAP_REL: f64 = 1e-10;
pub const DEFECTIVE_ANGLE: f64 = 1e-8;

/// Closed-form eigenvalues and eigenvectors of a 2×2 matrix.
pub fn eig_2x2(m: &CMatrix) -> Result<Eigen2> {
    m.require_2x2()?;
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let half_tr = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let r = (half_diff * half_diff + b * c).sqrt();
    let mut pairs = [(half_tr + r, r), (half_tr - r, -r)];
    if (pairs[1].0.re, pairs[1].0.im) > (pairs[0].0.re, pairs[0].0.im) {
        pairs.swap(0, 1);
    }
    let scale = m.norm_fro();
    let vec_for = |root: C64, fallback: usize| -> [C64; 2] {
        // (b, λ−a) and (λ−d, c) both solve (M − λ)v = 0; keep the larger.
        let v1 = [b, root - half_diff];
        let v2 = [half_diff + root, c];
        let (n1, n2) = (norm(&v1), norm(&v2));
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n <= f64::EPSILON * scale || n == 0.0 {
            let mut e = [ZERO; 2];
            e[fallback] = ONE;
            e
        } else {
            [v[0] / n, v[1] / n]
        }
    };
    let v0 = vec_for(pairs[0].1, 0);
    let v1 = vec_for(pairs[1].1, 1);
    let gap = (pairs[0].0 - pairs[1].0).norm();
    let defective = gap < DEFECTIVE_GAP_REL * scale && principal_angle(&v0, &v1) < DEFECTIVE_ANGLE;
    Ok(Eigen2 { values: [pairs[0].0, pairs[1].0], vectors: [v0, v1], defective })
}
