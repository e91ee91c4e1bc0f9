//! Entangled state pairs, their η-overlaps, η-dual bras and projectors.
//!
//! States live in a two-dimensional sector space spanned by the normalised
//! entangled kets
//!
//! ```text
//! |A⟩ = (|0, ½⟩ + |1, −½⟩)/√2,   |B⟩ = (|0, −½⟩ + |1, ½⟩)/√2.
//! ```
//!
//! The metric acts on the sector coefficients `(c_A, c_B)`. Conversion to the
//! explicit four-ket form is [`embed_4d`], an isometry.
//!
//! With `θ = π/2 − ϵ` the pair `ψ1, ψ2` has Dirac overlap `cos ϵ` and η-overlap
//! `cos ϵ − sin α`, so choosing `sin α = cos ϵ` makes them η-orthogonal. The
//! second pair `ψ3, ψ4` is *not* η-orthogonal at that α: its η-overlap is
//! `cos ϵ − sin α cos 2ϵ = 2 cos ϵ sin²ϵ`. Note also that `ψ3 = ψ2` exactly
//! under this parameterisation.

use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::blocks;
use crate::error::{Error, Result};
use crate::fockspace::ModelParams;
use crate::linalg::{self, CMatrix, C64};
use crate::metric::{self, eta_inner, metric_closed_form, MetricOperator};

/// Coefficients on `(|A⟩, |B⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorState {
    pub c_a: C64,
    pub c_b: C64,
}

impl SectorState {
    pub fn new(c_a: C64, c_b: C64) -> Self {
        Self { c_a, c_b }
    }

    pub fn real(c_a: f64, c_b: f64) -> Self {
        Self { c_a: c_a.into(), c_b: c_b.into() }
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.c_a, self.c_b]
    }

    pub fn dirac_norm_sqr(&self) -> f64 {
        self.c_a.norm_sqr() + self.c_b.norm_sqr()
    }
}

/// Amplitudes on the ordered kets `(|0,½⟩, |1,−½⟩, |0,−½⟩, |1,½⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledState4 {
    pub amps: [C64; 4],
}

/// State angle θ and the small separation ϵ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEps {
    pub theta: f64,
    pub eps_state: f64,
}

/// Above this separation the "nearly identical states" regime no longer applies.
pub const SMALL_EPS_LIMIT: f64 = 0.3;

impl ThetaEps {
    pub fn new(theta: f64, eps_state: f64) -> Result<Self> {
        if !(theta.is_finite() && eps_state.is_finite()) {
            return Err(Error::NonFinite("theta/eps"));
        }
        Ok(Self { theta, eps_state })
    }

    /// The symmetric choice `θ = π/2 − ϵ` used throughout.
    pub fn symmetric(eps_state: f64) -> Result<Self> {
        Self::new(FRAC_PI_2 - eps_state, eps_state)
    }

    /// `true` when ϵ is outside `(0, 0.3]`; callers may want to warn.
    pub fn outside_small_regime(&self) -> bool {
        !(self.eps_state > 0.0 && self.eps_state <= SMALL_EPS_LIMIT)
    }
}

/// `ψ1 = (cos θ/2, sin θ/2)`, `ψ2 = (cos(θ/2 + ϵ), sin(θ/2 + ϵ))`.
pub fn make_psi_pair_12(te: ThetaEps) -> (SectorState, SectorState) {
    let h = 0.5 * te.theta;
    let e = te.eps_state;
    (
        SectorState::real(libm::cos(h), libm::sin(h)),
        SectorState::real(libm::cos(h + e), libm::sin(h + e)),
    )
}

/// `ψ3 = (sin θ/2, cos θ/2)`, `ψ4 = (sin(θ/2 − ϵ), cos(θ/2 − ϵ))`.
pub fn make_psi_pair_34(te: ThetaEps) -> (SectorState, SectorState) {
    let h = 0.5 * te.theta;
    let e = te.eps_state;
    (
        SectorState::real(libm::sin(h), libm::cos(h)),
        SectorState::real(libm::sin(h - e), libm::cos(h - e)),
    )
}

/// `(c_A/√2, c_A/√2, c_B/√2, c_B/√2)`.
pub fn embed_4d(s: SectorState) -> EntangledState4 {
    let a = s.c_a * FRAC_1_SQRT_2;
    let b = s.c_b * FRAC_1_SQRT_2;
    EntangledState4 { amps: [a, a, b, b] }
}

/// The 4×2 isometry behind [`embed_4d`].
pub fn embedding_matrix() -> CMatrix {
    let h = C64::from(FRAC_1_SQRT_2);
    let mut m = CMatrix::zeros(4, 2);
    m[(0, 0)] = h;
    m[(1, 0)] = h;
    m[(2, 1)] = h;
    m[(3, 1)] = h;
    m
}

/// Lift a sector operator `X` to `E X E†` on the four-ket space.
pub fn lift_to_4d(x: &CMatrix) -> Result<CMatrix> {
    let e = embedding_matrix();
    e.matmul(x)?.matmul(&e.adjoint())
}

/// `α = arcsin(cos ϵ)`, the metric angle that makes `ψ1 ⟂_η ψ2`.
pub fn discrimination_alpha(eps_state: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&eps_state) {
        return Err(Error::OutOfRange { what: "eps_state", value: eps_state, min: 0.0, max: FRAC_PI_2 });
    }
    Ok(libm::asin(libm::cos(eps_state)))
}

/// `ρ` that puts block `n` at angle `α`: `ρ = (ħω − ε) sin α / (2√(n+1))`.
pub fn rho_for_alpha(n: usize, hbar_omega: f64, eps_energy: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::OutOfRange { what: "alpha", value: alpha, min: 0.0, max: FRAC_PI_2 });
    }
    if hbar_omega - eps_energy <= 0.0 {
        return Err(Error::RealityViolated { n, sin_alpha: f64::INFINITY });
    }
    Ok((hbar_omega - eps_energy) * libm::sin(alpha) / (2.0 * libm::sqrt((n + 1) as f64)))
}

/// Whether block `n` of `params` sits at `alpha` to within `tol`.
pub fn realizes_alpha(n: usize, params: &ModelParams, alpha: f64, tol: f64) -> bool {
    blocks::alpha_of(n, params).is_ok_and(|a| (a - alpha).abs() <= tol)
}

/// `⟨ψ1|η|ψ2⟩` by explicit vector arithmetic.
pub fn eta_overlap_12(te: ThetaEps, eta: &MetricOperator) -> C64 {
    let (a, b) = make_psi_pair_12(te);
    eta_inner(&a.as_array(), &b.as_array(), eta).expect("two-component states")
}

/// Raw and η-normalised overlap of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapReport {
    pub raw: C64,
    /// `raw / √(⟨u|η|u⟩⟨v|η|v⟩)`; `None` when either η-norm is degenerate.
    pub normalized: Option<C64>,
}

fn overlap_report(u: SectorState, v: SectorState, eta: &MetricOperator) -> OverlapReport {
    let (u, v) = (u.as_array(), v.as_array());
    let raw = eta_inner(&u, &v, eta).expect("two-component states");
    let normalized = metric::eta_norm_sqr(&u, eta)
        .and_then(|nu| Ok(nu * metric::eta_norm_sqr(&v, eta)?))
        .ok()
        .map(|n| raw / libm::sqrt(n));
    OverlapReport { raw, normalized }
}

/// η-overlap report for `(ψ1, ψ2)`.
pub fn eta_overlap_report_12(te: ThetaEps, eta: &MetricOperator) -> OverlapReport {
    let (a, b) = make_psi_pair_12(te);
    overlap_report(a, b, eta)
}

/// η-overlap report for `(ψ3, ψ4)`.
pub fn eta_overlap_34(te: ThetaEps, eta: &MetricOperator) -> OverlapReport {
    let (a, b) = make_psi_pair_34(te);
    overlap_report(a, b, eta)
}

/// η-dual bra `(η s)† / √⟨s|η|s⟩`, returned as the row of coefficients.
///
/// Pairing it with the η-normalised ket `s/√⟨s|η|s⟩` gives 1; pairing with an
/// η-orthogonal partner gives 0.
pub fn eta_bra(s: SectorState, eta: &MetricOperator) -> Result<[C64; 2]> {
    let v = s.as_array();
    let scale = 1.0 / libm::sqrt(metric::eta_norm_sqr(&v, eta)?);
    let ev = eta.matrix().apply(&v)?;
    Ok([ev[0].conj() * scale, ev[1].conj() * scale])
}

/// [`eta_bra`] spread over the four kets; each sector coefficient picks up
/// the `1/√2` of the embedding.
pub fn eta_bra_4d(s: SectorState, eta: &MetricOperator) -> Result<[C64; 4]> {
    let [a, b] = eta_bra(s, eta)?;
    let (a, b) = (a * FRAC_1_SQRT_2, b * FRAC_1_SQRT_2);
    Ok([a, a, b, b])
}

/// Apply a bra (row of coefficients) to a ket.
pub fn pair(bra: &[C64], ket: &[C64]) -> C64 {
    linalg::cdot(bra.iter().copied().zip(ket.iter().copied()))
}

fn state(i: usize, te: ThetaEps) -> Result<SectorState> {
    let (p1, p2) = make_psi_pair_12(te);
    let (p3, p4) = make_psi_pair_34(te);
    match i {
        1 => Ok(p1),
        2 => Ok(p2),
        3 => Ok(p3),
        4 => Ok(p4),
        _ => Err(Error::OutOfRange { what: "projector index", value: i as f64, min: 1.0, max: 4.0 }),
    }
}

/// `P_i = |ψ̂_i⟩⟨ψ̂_i|_η = ψ_i ψ_i† η / ⟨ψ_i|η|ψ_i⟩`, `i ∈ 1..=4`.
///
/// Idempotent for any admissible η. At `sin α = cos ϵ` also `P_1 ψ_2 = 0` and
/// `P_1 + P_2 = I`.
pub fn projector(i: usize, te: ThetaEps, eta: &MetricOperator) -> Result<CMatrix> {
    let ket = state(i, te)?.as_array();
    let n2 = metric::eta_norm_sqr(&ket, eta)?;
    // (ψ†η)_c = conj((ηψ)_c) for Hermitian η
    let ev = eta.matrix().apply(&ket)?;
    let mut p = CMatrix::zeros(2, 2);
    for r in 0..2 {
        for c in 0..2 {
            p[(r, c)] = ket[r] * ev[c].conj() / n2;
        }
    }
    Ok(p)
}

/// Sector-space images of the four-ket operators A, B, C, D:
/// `2|A⟩⟨A|`, `2|B⟩⟨B|`, `2|A⟩⟨B|`, `2|B⟩⟨A|`.
fn abcd_sector() -> [CMatrix; 4] {
    [
        CMatrix::real_2x2(2.0, 0.0, 0.0, 0.0),
        CMatrix::real_2x2(0.0, 0.0, 0.0, 2.0),
        CMatrix::real_2x2(0.0, 2.0, 0.0, 0.0),
        CMatrix::real_2x2(0.0, 0.0, 2.0, 0.0),
    ]
}

/// Coefficients `[a, b, c, d]` of `P_i = (aA + bB + cC + dD) / (4 sin ϵ)` as
/// tabulated in the published projector list. Entries for `i = 1, 4` coincide,
/// as do those for `i = 2, 3`.
pub fn tabulated_projector_coefficients(i: usize, eps_state: f64) -> Result<[f64; 4]> {
    let (s, c) = (libm::sin(eps_state), libm::cos(eps_state));
    match i {
        1 | 4 => Ok([1.0 + s, s - 1.0, -c, c]),
        2 | 3 => Ok([s - 1.0, s + 1.0, c, -c]),
        _ => Err(Error::OutOfRange { what: "projector index", value: i as f64, min: 1.0, max: 4.0 }),
    }
}

/// The tabulated `P_i` in sector space.
pub fn tabulated_projector(i: usize, eps_state: f64) -> Result<CMatrix> {
    let k = tabulated_projector_coefficients(i, eps_state)?;
    let s = libm::sin(eps_state);
    if s == 0.0 {
        return Err(Error::DegenerateNorm { value: 0.0 });
    }
    let ops = abcd_sector();
    let mut p = CMatrix::zeros(2, 2);
    for (coef, op) in k.iter().zip(&ops) {
        p = &p + &op.scale(C64::from(*coef / (4.0 * s)));
    }
    Ok(p)
}

/// The tabulated `P_i` on the four-ket space, assembled from [`abcd_operators`].
pub fn tabulated_projector_4d(i: usize, eps_state: f64) -> Result<CMatrix> {
    let k = tabulated_projector_coefficients(i, eps_state)?;
    let s = libm::sin(eps_state);
    if s == 0.0 {
        return Err(Error::DegenerateNorm { value: 0.0 });
    }
    let ops = abcd_operators();
    let mut p = CMatrix::zeros(4, 4);
    for (coef, op) in k.iter().zip(&ops) {
        p = &p + &op.scale(C64::from(*coef / (4.0 * s)));
    }
    Ok(p)
}

/// The outer-product sums A, B, C, D over `(|0,½⟩, |1,−½⟩, |0,−½⟩, |1,½⟩)`.
///
/// A sums every `|x⟩⟨y|` with `x, y` in the first pair, B in the second
/// pair, C maps the second pair into the first, D the first into the second.
pub fn abcd_operators() -> [CMatrix; 4] {
    let block = |rows: [usize; 2], cols: [usize; 2]| {
        let mut m = CMatrix::zeros(4, 4);
        for r in rows {
            for c in cols {
                m[(r, c)] = C64::from(1.0);
            }
        }
        m
    };
    let (first, second) = ([0, 1], [2, 3]);
    [block(first, first), block(second, second), block(first, second), block(second, first)]
}

/// Completeness and pairwise-identity residuals (max-abs) in sector space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletenessReport {
    pub eps_state: f64,
    pub alpha: f64,
    /// `‖P_1 + P_2 − I‖`.
    pub p12_minus_identity: f64,
    /// `‖P_3 + P_4 − I‖`; nonzero because ψ3, ψ4 are not η-orthogonal.
    pub p34_minus_identity: f64,
    /// `‖Σ P_i − 2I‖` for the constructed projectors.
    pub sum4_minus_two_identity: f64,
    /// `‖P_1 − P_4‖`, constructed.
    pub p1_minus_p4: f64,
    /// `‖P_2 − P_3‖`, constructed (zero: `ψ3 = ψ2`).
    pub p2_minus_p3: f64,
    /// `‖Σ P_i − 2I‖` for the tabulated coefficient formulas.
    pub tabulated_sum4_minus_two_identity: f64,
    /// `‖Σ P_i − I‖` for the tabulated formulas (the literal completeness claim).
    pub tabulated_sum4_minus_identity: f64,
    pub tabulated_p1_minus_p4: f64,
    pub tabulated_p2_minus_p3: f64,
    /// Constructed `P_1` against its tabulated formula.
    pub tabulated_vs_constructed_p1: f64,
    pub tabulated_vs_constructed_p2: f64,
    /// Worst idempotency residual `‖P_i² − P_i‖` over the constructed projectors.
    pub max_idempotency_residual: f64,
}

/// Projector bookkeeping at the discrimination point `sin α = cos ϵ`.
pub fn completeness_report(te: ThetaEps) -> Result<CompletenessReport> {
    let alpha = discrimination_alpha(te.eps_state)?;
    let eta = metric_closed_form(alpha)?;
    let p: [CMatrix; 4] = [
        projector(1, te, &eta)?,
        projector(2, te, &eta)?,
        projector(3, te, &eta)?,
        projector(4, te, &eta)?,
    ];
    let t: [CMatrix; 4] = [
        tabulated_projector(1, te.eps_state)?,
        tabulated_projector(2, te.eps_state)?,
        tabulated_projector(3, te.eps_state)?,
        tabulated_projector(4, te.eps_state)?,
    ];
    let id = CMatrix::identity(2);
    let two = id.scale(C64::from(2.0));
    let sum = |m: &[CMatrix; 4]| m.iter().skip(1).fold(m[0].clone(), |acc, x| &acc + x);
    let max_idem = p.iter().map(|x| (x * x).max_abs_diff(x)).fold(0.0, f64::max);
    Ok(CompletenessReport {
        eps_state: te.eps_state,
        alpha,
        p12_minus_identity: (&p[0] + &p[1]).max_abs_diff(&id),
        p34_minus_identity: (&p[2] + &p[3]).max_abs_diff(&id),
        sum4_minus_two_identity: sum(&p).max_abs_diff(&two),
        p1_minus_p4: p[0].max_abs_diff(&p[3]),
        p2_minus_p3: p[1].max_abs_diff(&p[2]),
        tabulated_sum4_minus_two_identity: sum(&t).max_abs_diff(&two),
        tabulated_sum4_minus_identity: sum(&t).max_abs_diff(&id),
        tabulated_p1_minus_p4: t[0].max_abs_diff(&t[3]),
        tabulated_p2_minus_p3: t[1].max_abs_diff(&t[2]),
        tabulated_vs_constructed_p1: t[0].max_abs_diff(&p[0]),
        tabulated_vs_constructed_p2: t[1].max_abs_diff(&p[1]),
        max_idempotency_residual: max_idem,
    })
}

/// Equal amplitudes within each sector pair, i.e. the image of [`embed_4d`].
pub fn is_embedded(state: &EntangledState4, tol: f64) -> bool {
    (state.amps[0] - state.amps[1]).norm() <= tol && (state.amps[2] - state.amps[3]).norm() <= tol
}

/// Dirac norm² of a four-ket state.
pub fn norm_sqr_4d(state: &EntangledState4) -> f64 {
    linalg::dirac_inner(&state.amps, &state.amps).re
}
