//! Discrimination by non-unitary time evolution.
//!
//! The effective two-level Hamiltonian is the `n = 0` block written in Pauli
//! form, `H = ½ħω·I + σ·(0, iρ, ½(ε − ħω))`, with
//! `β = √(¼(ε − ħω)² − ρ²) = ½(ħω − ε) cos α`. States evolve with `e^{−iHt}`
//! and are compared with the plain Dirac product, so the relevant kernel is
//!
//! ```text
//! G(t) = e^{iH†t} e^{−iHt},   overlap(t) = ψ1† G(t) ψ2.
//! ```
//!
//! Working the product out gives
//!
//! ```text
//! cos²α · G(t) = [cos²βt cos²α + sin²βt (1 + sin²α)] I
//!                − 2 sin²βt sin α · σ_x
//!                + sin 2βt sin α cos α · σ_y
//! ```
//!
//! The σ_y part makes the overlap complex for the `θ = π/2 − ϵ` pair:
//! `Im overlap = sin ϵ · Im G₀₁`. An exact zero therefore needs
//! `sin 2βt = 0` as well as a vanishing real part, which happens only at
//! `βt = π/2` and `sin α = tan(π/4 − ϵ/2)` (see [`orthogonality_alpha`]).
//! [`find_orthogonality_time`] searches for that exact zero;
//! [`find_real_part_zero`] reports the weaker real-part crossing.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::blocks;
use crate::error::{Error, Result};
use crate::fockspace::ModelParams;
use crate::linalg::{self, exp_2x2, CMatrix, PauliDecomposition, C64, I, ZERO};
use crate::roots;
use crate::states::{make_psi_pair_12, rho_for_alpha, ThetaEps};

/// `|overlap(t*)|` must be at most this for `t*` to count as an orthogonality time.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Default scan horizon, in units of `2π/β`.
pub const DEFAULT_PERIODS: f64 = 50.0;

/// Samples per overlap period `π/β` in the bracketing pass.
const SAMPLES_PER_PERIOD: f64 = 64.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    pub params: ModelParams,
    pub h: CMatrix,
    /// Inverse time.
    pub beta: f64,
    /// `α` of the `n = 0` block.
    pub alpha: f64,
}

impl EffectiveHamiltonian {
    /// Requires `ħω − ε ≥ 2ρ` (reality of the `n = 0` block).
    pub fn new(params: ModelParams) -> Result<Self> {
        let alpha = blocks::alpha_of(0, &params)?;
        let h = Self::pauli_form(&params).reconstruct();
        let d = params.eps_energy - params.hbar_omega;
        let beta = libm::sqrt((0.25 * d * d - params.rho * params.rho).max(0.0));
        Ok(Self { params, h, beta, alpha })
    }

    /// `(c0, m) = (½ħω, (0, iρ, ½(ε − ħω)))`.
    pub fn pauli_form(params: &ModelParams) -> PauliDecomposition {
        PauliDecomposition {
            c0: C64::from(0.5 * params.hbar_omega),
            m: [ZERO, C64::new(0.0, params.rho), C64::from(0.5 * (params.eps_energy - params.hbar_omega))],
        }
    }

    /// `e^{−iHt}`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        exp_2x2(&self.h, C64::new(0.0, -t)).expect("2x2")
    }

    /// `G(t) = e^{iH†t} e^{−iHt}`.
    pub fn gram(&self, t: f64) -> CMatrix {
        let fwd = self.propagator(t);
        let adj = exp_2x2(&self.h.adjoint(), C64::new(0.0, t)).expect("2x2");
        &adj * &fwd
    }

    /// `u† G(t) v`, evaluated as `⟨U u | U v⟩` with `U = e^{−iHt}`.
    pub fn overlap(&self, u: &[C64; 2], v: &[C64; 2], t: f64) -> C64 {
        let p = self.propagator(t);
        let mv = |x: &[C64; 2], i: usize| p[(i, 0)] * x[0] + p[(i, 1)] * x[1];
        let (pu, pv) = ([mv(u, 0), mv(u, 1)], [mv(v, 0), mv(v, 1)]);
        linalg::dirac_inner(&pu, &pv)
    }

    fn period(&self) -> Option<f64> {
        (self.beta > 0.0).then(|| PI / self.beta)
    }
}

pub fn effective_hamiltonian(params: ModelParams) -> Result<EffectiveHamiltonian> {
    EffectiveHamiltonian::new(params)
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::OutOfRange { what: "time", value: t, min: 0.0, max: f64::INFINITY });
    }
    Ok(())
}

pub fn gram_kernel(t: f64, params: ModelParams) -> Result<CMatrix> {
    check_time(t)?;
    Ok(EffectiveHamiltonian::new(params)?.gram(t))
}

/// The tabulated closed form of `cos²α · G(t)`, entry for entry as printed:
/// diagonal `cos²βt cos²α + sin²βt (1 + sin²α)`, off-diagonal
/// `sin 2βt sin α (∓i cos α − sin βt)`.
pub fn tabulated_scaled_gram(t: f64, alpha: f64, beta: f64) -> CMatrix {
    let (sb, cb) = (libm::sin(beta * t), libm::cos(beta * t));
    let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
    let s2b = libm::sin(2.0 * beta * t);
    let diag = C64::from(cb * cb * ca * ca + sb * sb * (1.0 + sa * sa));
    let upper = C64::new(-s2b * sa * sb, -s2b * sa * ca);
    let lower = C64::new(-s2b * sa * sb, s2b * sa * ca);
    CMatrix::from_2x2(diag, upper, lower, diag)
}

/// Max residuals of `cos²α · G(t)` against [`tabulated_scaled_gram`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TabulatedResidual {
    pub diag: f64,
    pub offdiag: f64,
}

pub fn eq20_residual(t: f64, params: ModelParams) -> Result<TabulatedResidual> {
    check_time(t)?;
    let eh = EffectiveHamiltonian::new(params)?;
    let ca = libm::cos(eh.alpha);
    let numeric = eh.gram(t).scale(C64::from(ca * ca));
    let printed = tabulated_scaled_gram(t, eh.alpha, eh.beta);
    let d = |i: usize, j: usize| (numeric[(i, j)] - printed[(i, j)]).norm();
    Ok(TabulatedResidual { diag: d(0, 0).max(d(1, 1)), offdiag: d(0, 1).max(d(1, 0)) })
}

/// Sampled `⟨ψ1|G(t)|ψ2⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub overlaps: Vec<C64>,
    /// Earliest exact orthogonality time within the sampled range.
    pub t_star: Option<f64>,
    pub alpha: f64,
    pub eps_state: f64,
}

pub fn overlap_trajectory(te: ThetaEps, params: ModelParams, t_grid: &[f64]) -> Result<EvolutionTrace> {
    let eh = EffectiveHamiltonian::new(params)?;
    let (a, b) = make_psi_pair_12(te);
    let (u, v) = (a.as_array(), b.as_array());
    let mut overlaps = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        check_time(t)?;
        overlaps.push(eh.overlap(&u, &v, t));
    }
    let t_end = t_grid.iter().copied().fold(0.0, f64::max);
    let t_star = if t_end > 0.0 { Samples::new(&eh, te, t_end).orthogonality() } else { None };
    Ok(EvolutionTrace { times: t_grid.to_vec(), overlaps, t_star, alpha: eh.alpha, eps_state: te.eps_state })
}

/// The pair overlap sampled on a uniform grid over `[0, t_max]`.
struct Samples<'a> {
    eh: &'a EffectiveHamiltonian,
    u: [C64; 2],
    v: [C64; 2],
    t_max: f64,
    ts: Vec<f64>,
    vals: Vec<C64>,
}

impl<'a> Samples<'a> {
    fn new(eh: &'a EffectiveHamiltonian, te: ThetaEps, t_max: f64) -> Self {
        let (a, b) = make_psi_pair_12(te);
        let (u, v) = (a.as_array(), b.as_array());
        let n = match eh.period() {
            Some(p) => libm::ceil(t_max / p * SAMPLES_PER_PERIOD).clamp(256.0, 400_000.0) as usize,
            None => 4096,
        };
        let ts: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
        let vals = ts.iter().map(|&t| eh.overlap(&u, &v, t)).collect();
        Self { eh, u, v, t_max, ts, vals }
    }

    fn at(&self, t: f64) -> C64 {
        self.eh.overlap(&self.u, &self.v, t)
    }

    fn xtol(&self) -> f64 {
        4.0 * f64::EPSILON * self.t_max
    }

    fn orthogonality(&self) -> Option<f64> {
        let (ts, vals) = (&self.ts, &self.vals);
        let abs = |t: f64| self.at(t).norm();
        for i in 1..ts.len() {
            let mut found: Option<f64> = None;
            // real-part sign change, then confirm the full complex value vanishes
            if (vals[i - 1].re < 0.0) != (vals[i].re < 0.0) || vals[i].re == 0.0 {
                let r = roots::bisect(|t| self.at(t).re, ts[i - 1], ts[i], self.xtol());
                if abs(r) <= ORTHOGONALITY_TOL {
                    found = Some(r);
                }
            }
            // touching zero without a sign change; only refine minima deep
            // enough that the local slope could carry them to zero
            if i + 1 < ts.len() {
                let (l, m, r) = (vals[i - 1].norm(), vals[i].norm(), vals[i + 1].norm());
                let slope = (vals[i] - vals[i - 1]).norm().max((vals[i + 1] - vals[i]).norm());
                if m <= l && m <= r && m <= 2.0 * slope {
                    let (t, f) = roots::golden_min(abs, ts[i - 1], ts[i + 1], self.xtol());
                    if f <= ORTHOGONALITY_TOL && t > 0.0 {
                        found = Some(found.map_or(t, |x: f64| x.min(t)));
                    }
                }
            } else if vals[i].norm() <= ORTHOGONALITY_TOL {
                found = Some(found.map_or(ts[i], |x: f64| x.min(ts[i])));
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn real_part_zero(&self) -> Option<f64> {
        for i in 1..self.ts.len() {
            let (a, b) = (self.vals[i - 1].re, self.vals[i].re);
            if b == 0.0 {
                return Some(self.ts[i]);
            }
            if (a < 0.0) != (b < 0.0) {
                return Some(roots::bisect(|t| self.at(t).re, self.ts[i - 1], self.ts[i], self.xtol()));
            }
        }
        None
    }
}

fn check_horizon(t_max: f64) -> Result<()> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::OutOfRange { what: "t_max", value: t_max, min: 0.0, max: f64::INFINITY });
    }
    Ok(())
}

/// Earliest `t ∈ (0, t_max]` with `|⟨ψ1|G(t)|ψ2⟩| ≤ 1e-10`, or `None`.
pub fn find_orthogonality_time(te: ThetaEps, params: ModelParams, t_max: f64) -> Result<Option<f64>> {
    check_horizon(t_max)?;
    let eh = EffectiveHamiltonian::new(params)?;
    Ok(Samples::new(&eh, te, t_max).orthogonality())
}

/// Earliest `t ∈ (0, t_max]` where `Re⟨ψ1|G(t)|ψ2⟩` changes sign.
pub fn find_real_part_zero(te: ThetaEps, params: ModelParams, t_max: f64) -> Result<Option<f64>> {
    check_horizon(t_max)?;
    let eh = EffectiveHamiltonian::new(params)?;
    Ok(Samples::new(&eh, te, t_max).real_part_zero())
}

/// The only α at which the `θ = π/2 − ϵ` pair becomes exactly orthogonal:
/// `sin α = tan(π/4 − ϵ/2)`, reached at `βt = π/2`.
pub fn orthogonality_alpha(eps_state: f64) -> Result<f64> {
    if !(eps_state > 0.0 && eps_state < FRAC_PI_2) {
        return Err(Error::OutOfRange { what: "eps_state", value: eps_state, min: 0.0, max: FRAC_PI_2 });
    }
    Ok(libm::asin(libm::tan(FRAC_PI_4 - 0.5 * eps_state)))
}

/// `sin²βt` at which the real part of the overlap vanishes:
/// `cos²α cos ϵ / (2 sin α (1 − sin α cos ϵ))`. A crossing exists only when
/// this is at most 1.
pub fn real_part_zero_sin2bt(alpha: f64, eps_state: f64) -> Result<f64> {
    let (sa, ca, ce) = (libm::sin(alpha), libm::cos(alpha), libm::cos(eps_state));
    let den = 2.0 * sa * (1.0 - sa * ce);
    if den.abs() < 1e-300 {
        return Err(Error::SingularPoint("vanishing denominator"));
    }
    Ok(ca * ca * ce / den)
}

/// The tabulated closed-form solution for `sin²βt`, evaluated as printed.
///
/// The printed expression has one factor with a missing argument,
/// `cos ϵ sin`; it is read as `cos ϵ sin α`, matching the same bracket in the
/// denominator. No claim is made that the result equals `sin²(βt*)`.
pub fn closed_form_sin2bt(alpha: f64, eps_state: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::OutOfRange { what: "alpha", value: alpha, min: 0.0, max: FRAC_PI_2 });
    }
    let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
    let ce = libm::cos(eps_state);
    let c2a = libm::cos(2.0 * alpha);
    let c2e = libm::cos(2.0 * eps_state);
    let s2a = libm::sin(2.0 * alpha);
    let s3a = libm::sin(3.0 * alpha);
    let cot = ca / sa;

    let q = (c2a + ce * sa) * (c2a + ce * sa) - 4.0 * ca * ca * sa;
    let lead = -4.0 * ca * ((1.0 - 3.0 * c2a) * ce * cot + (1.0 - c2e - 4.0 * sa) * ca);
    let bracket = (c2e + 4.0 * sa - 1.0) * s2a * s2a + 2.0 * ca * ca * ce * (3.0 * s3a - 5.0 * sa);
    let ca4 = ca * ca * ca * ca;
    let radicand = -4.0 * ca4 * sa * sa * (ce - sa) * (ce - sa) * q + bracket * bracket / 16.0;
    if radicand < 0.0 {
        return Err(Error::SingularPoint("negative radicand"));
    }
    let den = 2.0 * q;
    if den.abs() < 1e-14 {
        return Err(Error::SingularPoint("vanishing denominator"));
    }
    Ok((lead + libm::sqrt(radicand)) / den)
}

/// Fixed `ħω` and `ε`; `ρ` is chosen per α on the `n = 0` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamsFamily {
    pub hbar_omega: f64,
    pub eps_energy: f64,
}

impl ParamsFamily {
    pub fn at_alpha(&self, alpha: f64) -> Result<ModelParams> {
        ModelParams::new(self.eps_energy, self.hbar_omega, rho_for_alpha(0, self.hbar_omega, self.eps_energy, alpha)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub eps_state: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t_star: Option<f64>,
    pub beta_t_star: Option<f64>,
    pub sin2_beta_t_star: Option<f64>,
    /// No exact orthogonality within the horizon.
    pub divergent: bool,
    /// Earliest real-part crossing within the same horizon.
    pub re_t_star: Option<f64>,
    pub re_sin2_beta_t_star: Option<f64>,
}

/// Orthogonality times over an (ϵ, α) grid, ordered by ϵ then α.
///
/// The horizon for each row is `periods · 2π/β`; at `β = 0` (the exceptional
/// point) the horizon is unbounded and the row is marked divergent outright.
pub fn scan_alpha(eps_list: &[f64], alpha_grid: &[f64], family: ParamsFamily, periods: f64) -> Result<Vec<ScanRow>> {
    if !(periods.is_finite() && periods > 0.0) {
        return Err(Error::OutOfRange { what: "periods", value: periods, min: 0.0, max: f64::INFINITY });
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(f64::total_cmp);
    let mut alphas = alpha_grid.to_vec();
    alphas.sort_by(f64::total_cmp);

    let mut rows = Vec::with_capacity(eps_sorted.len() * alphas.len());
    for &eps in &eps_sorted {
        let te = ThetaEps::symmetric(eps)?;
        for &alpha in &alphas {
            let params = family.at_alpha(alpha)?;
            let eh = EffectiveHamiltonian::new(params)?;
            let mut row = ScanRow {
                eps_state: eps,
                alpha,
                beta: eh.beta,
                t_star: None,
                beta_t_star: None,
                sin2_beta_t_star: None,
                divergent: true,
                re_t_star: None,
                re_sin2_beta_t_star: None,
            };
            if eh.beta > 0.0 {
                let t_max = periods * 2.0 * PI / eh.beta;
                let sin2 = |t: f64| {
                    let s = libm::sin(eh.beta * t);
                    s * s
                };
                let samples = Samples::new(&eh, te, t_max);
                row.t_star = samples.orthogonality();
                row.beta_t_star = row.t_star.map(|t| eh.beta * t);
                row.sin2_beta_t_star = row.t_star.map(sin2);
                row.divergent = row.t_star.is_none();
                row.re_t_star = samples.real_part_zero();
                row.re_sin2_beta_t_star = row.re_t_star.map(sin2);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

/// `det e^{−iHt}` against `e^{−i tr(H) t}`.
pub fn liouville_residual(eh: &EffectiveHamiltonian, t: f64) -> f64 {
    let u = eh.propagator(t);
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    (det - (-I * eh.h.trace() * t).exp()).norm()
}
