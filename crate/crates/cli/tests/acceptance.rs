//! Acceptance criteria. Runs every criterion, prints one line each, and exits
//! non-zero if any fails.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use pseudoherm_core::blocks::{block_eigenvalues, block_hamiltonian, coalescence_measure};
use pseudoherm_core::evolution::{self, linspace, scan_alpha, EffectiveHamiltonian, ParamsFamily};
use pseudoherm_core::fockspace::{
    build_full_hamiltonian, parity_operator, pseudo_hermiticity_residual, sigma_z_operator, FockSpinBasis,
};
use pseudoherm_core::linalg::{self, eig_2x2, exp_2x2, exp_series, CMatrix, C64};
use pseudoherm_core::metric::{metric_closed_form, metric_spectral, quasi_hermiticity_residual};
use pseudoherm_core::states::{self, make_psi_pair_12, rho_for_alpha, ThetaEps};
use pseudoherm_core::ModelParams;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn params(eps: f64, hw: f64, rho: f64) -> ModelParams {
    ModelParams::new(eps, hw, rho).unwrap()
}

fn eps_grid() -> Vec<f64> {
    linspace(0.01, 0.5, 50)
}

fn metric_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    let mut pd_ok = true;
    let grid = linspace(0.0, FRAC_PI_2, 200);
    for &alpha in &grid {
        let p = params(0.0, 1.0, rho_for_alpha(0, 1.0, 0.0, alpha).unwrap());
        let spectral = metric_spectral(0, &p).unwrap();
        let closed = metric_closed_form(alpha).unwrap();
        worst = worst.max(spectral.matrix().max_abs_diff(closed.matrix()));
        let lo = eig_2x2(spectral.matrix()).unwrap().values[1].re;
        if alpha < FRAC_PI_2 {
            pd_ok &= lo > 0.0;
        }
    }
    let at_ep = metric_spectral(0, &params(0.0, 1.0, 0.5)).unwrap();
    let m = at_ep.matrix();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm();
    let singular = det <= 1e-14 && !at_ep.is_positive_definite();
    verdict(
        worst <= 1e-14 && pd_ok && singular,
        format!("max |spectral − closed| = {worst:.3e} over 200 α; positive definite below π/2: {pd_ok}; det at π/2 = {det:.3e}"),
    )
}

fn quasi_hermiticity() -> Verdict {
    let worst = Cell::new(0.0f64);
    let strat = (0usize..31, 0.3..3.0f64, -1.0..0.9f64, 0.0..=1.0f64);
    runner(1000)
        .run(&strat, |(n, hw, e_frac, r)| {
            let eps = e_frac * hw;
            let rho = r * (hw - eps) / (2.0 * ((n + 1) as f64).sqrt());
            let res = quasi_hermiticity_residual(n, &params(eps, hw, rho)).unwrap();
            worst.set(worst.get().max(res));
            Ok(())
        })
        .unwrap();
    let w = worst.get();
    verdict(w <= 1e-12, format!("max ‖ηH − H†η‖ = {w:.3e} over 1000 random (n, params)"))
}

fn pseudo_hermiticity() -> Verdict {
    let b = FockSpinBasis::new(31);
    let mut worst_p = 0.0f64;
    let mut worst_z = 0.0f64;
    for p in [params(0.0, 1.0, 0.25), params(0.3, 1.0, 0.1), params(-0.5, 2.0, 1.5), params(0.7, 1.3, 0.05)] {
        let h = build_full_hamiltonian(&p, b);
        worst_p = worst_p.max(pseudo_hermiticity_residual(&h, &parity_operator(b)).unwrap());
        worst_z = worst_z.max(pseudo_hermiticity_residual(&h, &sigma_z_operator(b)).unwrap());
    }
    verdict(
        worst_p <= 1e-13 && worst_z <= 1e-13,
        format!("n_max = 31: parity residual {worst_p:.3e}, σ_z residual {worst_z:.3e}"),
    )
}

fn discrimination_identity() -> Verdict {
    let mut worst = 0.0f64;
    let mut worst_dirac = 0.0f64;
    let mut series_ok = true;
    for eps in eps_grid() {
        let te = ThetaEps::symmetric(eps).unwrap();
        let eta = metric_closed_form(states::discrimination_alpha(eps).unwrap()).unwrap();
        let n = states::eta_overlap_report_12(te, &eta).normalized.map_or(f64::INFINITY, |z| z.norm());
        worst = worst.max(n);
        let (a, b) = make_psi_pair_12(te);
        let d2 = linalg::dirac_inner(&a.as_array(), &b.as_array()).norm_sqr();
        let c2 = eps.cos().powi(2);
        worst_dirac = worst_dirac.max((d2 - c2).abs());
        // alternating series: |cos²ϵ − (1 − ϵ²)| ≤ ϵ⁴/3
        series_ok &= (c2 - (1.0 - eps * eps)).abs() <= eps.powi(4) / 3.0;
    }
    verdict(
        worst <= 1e-10 && worst_dirac <= 1e-14 && series_ok,
        format!("max normalised η-overlap {worst:.3e}; max |Dirac² − cos²ϵ| {worst_dirac:.3e}; 1−ϵ² within O(ϵ⁴): {series_ok}"),
    )
}

fn projector_suite() -> Verdict {
    let mut idem = 0.0f64;
    let mut annihilate = 0.0f64;
    let mut p12 = 0.0f64;
    let mut tab_two = 0.0f64;
    let mut tab_14 = 0.0f64;
    let mut tab_23 = 0.0f64;
    let mut built_23 = 0.0f64;
    let mut built_14 = 0.0f64;
    let mut built_sum = 0.0f64;
    for eps in eps_grid() {
        let te = ThetaEps::symmetric(eps).unwrap();
        let eta = metric_closed_form(states::discrimination_alpha(eps).unwrap()).unwrap();
        let r = states::completeness_report(te).unwrap();
        idem = idem.max(r.max_idempotency_residual);
        p12 = p12.max(r.p12_minus_identity);
        tab_two = tab_two.max(r.tabulated_sum4_minus_two_identity);
        tab_14 = tab_14.max(r.tabulated_p1_minus_p4);
        tab_23 = tab_23.max(r.tabulated_p2_minus_p3);
        built_23 = built_23.max(r.p2_minus_p3);
        built_14 = built_14.max(r.p1_minus_p4);
        built_sum = built_sum.max(r.sum4_minus_two_identity);
        let p1 = states::projector(1, te, &eta).unwrap();
        let (_, psi2) = make_psi_pair_12(te);
        annihilate = annihilate.max(linalg::norm(&p1.apply(&psi2.as_array()).unwrap()));
    }
    let pass = idem <= 1e-12 && annihilate <= 1e-12 && p12 <= 1e-12 && tab_two <= 1e-12 && tab_14 <= 1e-12 && tab_23 <= 1e-12;
    verdict(
        pass,
        format!(
            "idempotency {idem:.3e}; ‖P1ψ2‖ {annihilate:.3e}; ‖P1+P2−I‖ {p12:.3e}; tabulated ‖ΣP−2I‖ {tab_two:.3e}, ‖P1−P4‖ {tab_14:.3e}, ‖P2−P3‖ {tab_23:.3e}; constructed ‖P2−P3‖ {built_23:.3e}, ‖P1−P4‖ {built_14:.3e}, ‖ΣP−2I‖ {built_sum:.3e}"
        ),
    )
}

fn psi34_audit() -> Verdict {
    let mut worst = 0.0f64;
    let mut min_val = f64::INFINITY;
    let mut at_01 = 0.0;
    for eps in eps_grid() {
        let te = ThetaEps::symmetric(eps).unwrap();
        let eta = metric_closed_form(states::discrimination_alpha(eps).unwrap()).unwrap();
        let raw = states::eta_overlap_34(te, &eta).raw;
        let want = 2.0 * eps.cos() * eps.sin().powi(2);
        worst = worst.max((raw - C64::from(want)).norm());
        min_val = min_val.min(raw.norm());
        if (eps - 0.1).abs() < 1e-12 {
            at_01 = raw.re;
        }
    }
    verdict(
        worst <= 1e-12 && min_val > 0.0,
        format!("max |raw − 2cosϵ sin²ϵ| {worst:.3e}; smallest |raw| {min_val:.3e}; value at ϵ=0.1 {at_01:.17e}"),
    )
}

fn eigensystem() -> Verdict {
    let mut worst = 0.0f64;
    for n in 0..=10usize {
        for hw in [0.5, 1.0, 2.0] {
            for e_frac in [-0.5, 0.0, 0.5] {
                let eps = e_frac * hw;
                for r in [0.0, 0.25, 0.5, 0.75, 0.95, 0.999] {
                    let rho = r * (hw - eps) / (2.0 * ((n + 1) as f64).sqrt());
                    let p = params(eps, hw, rho);
                    let (lp, lm) = block_eigenvalues(n, &p).unwrap();
                    let e = eig_2x2(&block_hamiltonian(n, &p)).unwrap();
                    worst = worst.max((e.values[0] - C64::from(lp)).norm()).max((e.values[1] - C64::from(lm)).norm());
                }
            }
        }
    }
    // exceptional point: 2ρ√(n+1) = ħω − ε
    let mut ep_eig = 0.0f64;
    let mut ep_angle = 0.0f64;
    for n in 0..=10usize {
        for (hw, eps) in [(1.0, 0.0), (1.0, 0.5), (2.0, -0.5)] {
            let p = params(eps, hw, (hw - eps) / (2.0 * ((n + 1) as f64).sqrt()));
            let centre = (2 * n + 1) as f64 * hw / 2.0;
            let (lp, lm) = block_eigenvalues(n, &p).unwrap();
            ep_eig = ep_eig.max((lp - centre).abs()).max((lm - centre).abs());
            ep_angle = ep_angle.max(coalescence_measure(n, &p).unwrap());
        }
    }
    verdict(
        worst <= 1e-12 && ep_eig <= 1e-12 && ep_angle <= 1e-8,
        format!("max |closed − solver| {worst:.3e}; at the exceptional point |λ± − (2n+1)ħω/2| {ep_eig:.3e}, coalescence measure {ep_angle:.3e}"),
    )
}

fn evolution_kernel() -> Verdict {
    let worst_exp = Cell::new(0.0f64);
    let entry = || (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b));
    let strat = (entry(), entry(), entry(), entry(), -3.0..3.0f64);
    runner(1000)
        .run(&strat, |(a, b, c, d, t)| {
            let m = CMatrix::from_2x2(a, b, c, d);
            let s = C64::new(0.0, t);
            let x = exp_2x2(&m, s).unwrap();
            let y = exp_series(&m, s).unwrap();
            worst_exp.set(worst_exp.get().max(x.max_abs_diff(&y) / y.max_abs().max(1.0)));
            Ok(())
        })
        .unwrap();

    let g0 = evolution::gram_kernel(0.0, params(0.1, 1.0, 0.3)).unwrap().max_abs_diff(&CMatrix::identity(2));

    let te = ThetaEps::symmetric(0.1).unwrap();
    let flat = evolution::overlap_trajectory(te, params(0.2, 1.0, 0.0), &linspace(0.0, 50.0, 101)).unwrap();
    let spread = flat.overlaps.iter().map(|z| (z - flat.overlaps[0]).norm()).fold(0.0, f64::max);

    let fam = ParamsFamily { hbar_omega: 1.0, eps_energy: 0.0 };
    let (mut diag, mut off) = (0.0f64, 0.0f64);
    for alpha in linspace(0.05, 1.5, 15) {
        let p = fam.at_alpha(alpha).unwrap();
        let beta = EffectiveHamiltonian::new(p).unwrap().beta;
        for bt in linspace(0.0, 2.0 * PI, 17) {
            let r = evolution::eq20_residual(bt / beta, p).unwrap();
            diag = diag.max(r.diag);
            off = off.max(r.offdiag);
        }
    }
    let we = worst_exp.get();
    verdict(
        we <= 1e-10 && g0 == 0.0 && spread <= 1e-12 && diag <= 1e-10,
        format!(
            "exp_2x2 vs series {we:.3e} (1000 cases); ‖G(0)−I‖ {g0:.3e}; ρ=0 overlap spread {spread:.3e}; diagonal residual {diag:.3e}; off-diagonal residual (reported) {off:.3e}"
        ),
    )
}

fn scan_reproduction() -> Verdict {
    let fam = ParamsFamily { hbar_omega: 1.0, eps_energy: 0.0 };
    let eps_list = [0.05, 0.1, 0.2];
    let grid = linspace(0.0, FRAC_PI_2, 50);
    let rows = scan_alpha(&eps_list, &grid, fam, evolution::DEFAULT_PERIODS).unwrap();
    let window: Vec<_> = rows.iter().filter(|r| (0.3..=1.4).contains(&r.alpha)).collect();
    let finite = window.iter().filter(|r| r.t_star.is_some()).count();
    let part_a = finite == window.len();

    // cos α ≤ 0.01, including the exceptional point itself
    let near: Vec<f64> = [0.01f64, 0.005, 0.001].iter().map(|c| c.acos()).chain([FRAC_PI_2]).collect();
    let edge = scan_alpha(&eps_list, &near, fam, evolution::DEFAULT_PERIODS).unwrap();
    let part_b = edge.iter().all(|r| r.divergent)
        && rows.iter().filter(|r| r.alpha.cos() <= 0.01).all(|r| r.divergent);

    verdict(
        part_a && part_b,
        format!(
            "finite t* for α ∈ [0.3, 1.4]: {finite}/{} rows (part a {}); divergence for cos α ≤ 0.01: {} rows all divergent (part b {})",
            window.len(),
            if part_a { "pass" } else { "FAIL" },
            edge.len(),
            if part_b { "pass" } else { "FAIL" },
        ),
    )
}

fn scan_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("scan{k}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_pseudoherm"))
            .args(["scan", "--out", path.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    let same = outputs[0] == outputs[1];
    verdict(same && !outputs[0].is_empty(), format!("two runs, {} bytes each, identical: {same}", outputs[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("metric equivalence", metric_equivalence),
        ("quasi-Hermiticity", quasi_hermiticity),
        ("pseudo-Hermiticity of the full model", pseudo_hermiticity),
        ("discrimination identity", discrimination_identity),
        ("projector suite", projector_suite),
        ("ψ3/ψ4 η-overlap audit", psi34_audit),
        ("eigensystem and coalescence", eigensystem),
        ("evolution kernel", evolution_kernel),
        ("orthogonality-time scan", scan_reproduction),
        ("scan determinism", scan_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| verdict(false, "panicked".into()));
        if !v.pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
