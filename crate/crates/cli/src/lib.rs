//! Command-line experiments over `pseudoherm-core`.
//!
//! Every command builds a [`Report`] which is then rendered as CSV or JSON.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pseudoherm_core::blocks::{self, alpha_of, block_eigenvalues_complex, reality_condition};
use pseudoherm_core::evolution::{
    self, closed_form_sin2bt, eq20_residual, linspace, overlap_trajectory, real_part_zero_sin2bt, scan_alpha,
    EffectiveHamiltonian, ParamsFamily,
};
use pseudoherm_core::linalg::{self, CMatrix, C64};
use pseudoherm_core::metric::{self, metric_closed_form, metric_eigenvalues, metric_spectral};
use pseudoherm_core::states::{self, ThetaEps};
use pseudoherm_core::{Error as CoreError, ModelParams};
use thiserror::Error;

pub mod output;

pub use output::{Cell, Format, Report, Table};

/// Label attached to the `eq-audit` report.
pub const AUDIT_LABEL: &str = "closed-form audit";

#[derive(Debug, Parser)]
#[command(name = "pseudoherm", version, about = "Pseudo-Hermitian state discrimination experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Block eigenvalues for n = 0..n_max−1
    Spectrum,
    /// Metric operator of block --n
    Metric,
    /// η-overlaps and projector residuals at sin α = cos ϵ (needs --eps)
    Discriminate,
    /// Constructed and tabulated projectors (needs --eps)
    Projectors,
    /// Overlap trajectory under the effective Hamiltonian
    Evolve,
    /// Orthogonality times over an (ϵ, α) grid
    Scan,
    /// Closed-form kernel and orthogonality-time audit
    EqAudit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Metric => "metric",
            Command::Discriminate => "discriminate",
            Command::Projectors => "projectors",
            Command::Evolve => "evolve",
            Command::Scan => "scan",
            Command::EqAudit => "eq-audit",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hbar_omega: f64,
    /// ε = 2μB_z
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps_energy: f64,
    #[arg(long, global = true, default_value_t = 0.25, allow_negative_numbers = true)]
    pub rho: f64,
    /// State separation ϵ (default 0.1 where optional)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = pseudoherm_core::fockspace::DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Evolution horizon (default: two Gram periods, 2π/β)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, global = true, default_value_t = 201)]
    pub t_points: usize,
    #[arg(long, global = true, default_value_t = 50)]
    pub alpha_points: usize,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_min: f64,
    #[arg(long, global = true, default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub alpha_max: f64,
    #[arg(long, global = true, value_delimiter = ',', default_value = "0.05,0.1,0.2", allow_negative_numbers = true)]
    pub eps_list: Vec<f64>,
    /// Scan horizon in units of 2π/β
    #[arg(long, global = true, default_value_t = evolution::DEFAULT_PERIODS, allow_negative_numbers = true)]
    pub periods: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub eps_state: Option<f64>,
    pub n: usize,
    pub n_max: usize,
    pub t_max: Option<f64>,
    pub t_points: usize,
    pub alpha_points: usize,
    pub alpha_range: (f64, f64),
    pub eps_list: Vec<f64>,
    pub periods: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

const DEFAULT_EPS: f64 = 0.1;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_eps(flag: &str, e: f64) -> CliResult<()> {
    if !(e.is_finite() && e > 0.0 && e < FRAC_PI_2) {
        return Err(usage(format!("{flag} must lie in (0, π/2), got {e}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let o = cli.opts;
        let params = ModelParams::new(o.eps_energy, o.hbar_omega, o.rho).map_err(|e| usage(e.to_string()))?;
        if let Some(e) = o.eps {
            check_eps("--eps", e)?;
        }
        if matches!(cli.command, Command::Discriminate | Command::Projectors) && o.eps.is_none() {
            return Err(usage(format!("--eps is required for {}", cli.command.name())));
        }
        if o.n_max == 0 {
            return Err(usage("--n-max must be at least 1"));
        }
        if let Some(t) = o.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(usage(format!("--t-max must be positive, got {t}")));
            }
        }
        if o.t_points == 0 {
            return Err(usage("--t-points must be at least 1"));
        }
        if o.alpha_points == 0 {
            return Err(usage("--alpha-points must be at least 1"));
        }
        let in_quadrant = |a: f64| a.is_finite() && (0.0..=FRAC_PI_2).contains(&a);
        if !(in_quadrant(o.alpha_min) && in_quadrant(o.alpha_max) && o.alpha_min <= o.alpha_max) {
            return Err(usage("--alpha-min/--alpha-max must satisfy 0 ≤ min ≤ max ≤ π/2"));
        }
        if o.eps_list.is_empty() {
            return Err(usage("--eps-list must not be empty"));
        }
        for &e in &o.eps_list {
            check_eps("--eps-list entries", e)?;
        }
        if !(o.periods.is_finite() && o.periods > 0.0) {
            return Err(usage(format!("--periods must be positive, got {}", o.periods)));
        }
        Ok(Self {
            command: cli.command,
            params,
            eps_state: o.eps,
            n: o.n,
            n_max: o.n_max,
            t_max: o.t_max,
            t_points: o.t_points,
            alpha_points: o.alpha_points,
            alpha_range: (o.alpha_min, o.alpha_max),
            eps_list: o.eps_list,
            periods: o.periods,
            format: o.format,
            out: o.out,
        })
    }

    fn eps(&self) -> f64 {
        self.eps_state.unwrap_or(DEFAULT_EPS)
    }

    fn family(&self) -> ParamsFamily {
        ParamsFamily { hbar_omega: self.params.hbar_omega, eps_energy: self.params.eps_energy }
    }
}

/// Turns a core error into an exit-3 diagnostic, spelling out the violated
/// inequality where there is one.
fn domain(e: CoreError, p: &ModelParams) -> CliError {
    let msg = match e {
        CoreError::RealityViolated { n, .. } | CoreError::ComplexSpectrum { n, .. } => format!(
            "reality condition ħω − ε ≥ 2ρ√(n+1) violated for n = {n} (ħω = {}, ε = {}, ρ = {})",
            p.hbar_omega, p.eps_energy, p.rho
        ),
        other => other.to_string(),
    };
    CliError::Domain(msg)
}

/// Output plus any stderr warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub warnings: Vec<String>,
}

fn regime_warning(eps: f64, warnings: &mut Vec<String>) {
    if eps > states::SMALL_EPS_LIMIT {
        warnings.push(format!("warning: ϵ = {eps} is outside the small-separation regime (ϵ ≤ {})", states::SMALL_EPS_LIMIT));
    }
}

pub fn execute(cfg: &RunConfig) -> CliResult<Outcome> {
    let mut warnings = Vec::new();
    let report = match cfg.command {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Metric => cmd_metric(cfg)?,
        Command::Discriminate => {
            regime_warning(cfg.eps(), &mut warnings);
            cmd_discriminate(cfg)?
        }
        Command::Projectors => {
            regime_warning(cfg.eps(), &mut warnings);
            cmd_projectors(cfg)?
        }
        Command::Evolve => {
            regime_warning(cfg.eps(), &mut warnings);
            cmd_evolve(cfg)?
        }
        Command::Scan => {
            for &e in &cfg.eps_list {
                regime_warning(e, &mut warnings);
            }
            cmd_scan(cfg)?
        }
        Command::EqAudit => cmd_eq_audit(cfg)?,
    };
    Ok(Outcome { report, warnings })
}

/// Parse-independent entry: validate, compute, write.
pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::from_cli(cli)?;
    let outcome = execute(&cfg)?;
    for w in &outcome.warnings {
        eprintln!("{w}");
    }
    match &cfg.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            output::write_report(&outcome.report, cfg.format, &mut w)?;
            w.flush()?;
        }
        None => output::write_report(&outcome.report, cfg.format, io::stdout().lock())?,
    }
    Ok(())
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Report {
    let p = &cfg.params;
    let mut t = Table::new(
        "spectrum",
        &["n", "lambda_plus_re", "lambda_plus_im", "lambda_minus_re", "lambda_minus_im", "alpha", "reality", "exceptional"],
    );
    for n in 0..cfg.n_max {
        let [lp, lm] = block_eigenvalues_complex(n, p);
        t.push(vec![
            n.into(),
            lp.re.into(),
            lp.im.into(),
            lm.re.into(),
            lm.im.into(),
            Cell::opt(alpha_of(n, p).ok()),
            reality_condition(n, p).into(),
            blocks::is_exceptional(n, p).into(),
        ]);
    }
    let mut r = Report::new("spectrum");
    r.tables.push(t);
    r
}

pub fn cmd_metric(cfg: &RunConfig) -> CliResult<Report> {
    let p = &cfg.params;
    let eta = metric_spectral(cfg.n, p).map_err(|e| domain(e, p))?;
    let closed = metric_closed_form(eta.alpha()).map_err(|e| domain(e, p))?;
    let (ep, em) = metric_eigenvalues(&closed);
    let m = eta.matrix();
    let mut r = Report::new("metric");
    r.field("n", cfg.n);
    r.field("alpha", eta.alpha());
    r.field("sin_alpha", eta.alpha().sin());
    r.field("eta_00", m[(0, 0)].re);
    r.field("eta_01", m[(0, 1)].re);
    r.field("eta_10", m[(1, 0)].re);
    r.field("eta_11", m[(1, 1)].re);
    r.field("eigenvalue_plus", ep);
    r.field("eigenvalue_minus", em);
    r.field("positive_definite", closed.is_positive_definite());
    r.field("spectral_vs_closed_residual", m.max_abs_diff(closed.matrix()));
    r.field(
        "quasi_hermiticity_residual",
        metric::quasi_hermiticity_residual(cfg.n, p).map_err(|e| domain(e, p))?,
    );
    r.field("coalescence_measure", blocks::coalescence_measure(cfg.n, p).map_err(|e| domain(e, p))?);
    Ok(r)
}

fn push_complex(r: &mut Report, re: &'static str, im: &'static str, z: Option<C64>) {
    r.field(re, Cell::opt(z.map(|z| z.re)));
    r.field(im, Cell::opt(z.map(|z| z.im)));
}

pub fn cmd_discriminate(cfg: &RunConfig) -> CliResult<Report> {
    let p = &cfg.params;
    let eps = cfg.eps();
    let te = ThetaEps::symmetric(eps).map_err(|e| usage(e.to_string()))?;
    let alpha = states::discrimination_alpha(eps).map_err(|e| usage(e.to_string()))?;
    let eta = metric_closed_form(alpha).map_err(|e| domain(e, p))?;
    let o12 = states::eta_overlap_report_12(te, &eta);
    let o34 = states::eta_overlap_34(te, &eta);
    let c = states::completeness_report(te).map_err(|e| domain(e, p))?;
    let (a, b) = states::make_psi_pair_12(te);
    let dirac = linalg::dirac_inner(&a.as_array(), &b.as_array());

    let mut r = Report::new("discriminate");
    r.field("eps_state", eps);
    r.field("alpha", alpha);
    r.field("sin_alpha", alpha.sin());
    r.field(
        "rho_block0",
        Cell::opt(states::rho_for_alpha(0, p.hbar_omega, p.eps_energy, alpha).ok()),
    );
    let m = eta.matrix();
    r.field("eta_00", m[(0, 0)].re);
    r.field("eta_01", m[(0, 1)].re);
    r.field("eta_10", m[(1, 0)].re);
    r.field("eta_11", m[(1, 1)].re);
    r.field("dirac_overlap_12", dirac.re);
    push_complex(&mut r, "eta_overlap_12_raw_re", "eta_overlap_12_raw_im", Some(o12.raw));
    push_complex(&mut r, "eta_overlap_12_normalized_re", "eta_overlap_12_normalized_im", o12.normalized);
    push_complex(&mut r, "eta_overlap_34_raw_re", "eta_overlap_34_raw_im", Some(o34.raw));
    push_complex(&mut r, "eta_overlap_34_normalized_re", "eta_overlap_34_normalized_im", o34.normalized);
    r.field("p12_minus_identity", c.p12_minus_identity);
    r.field("p34_minus_identity", c.p34_minus_identity);
    r.field("sum4_minus_two_identity", c.sum4_minus_two_identity);
    r.field("p1_minus_p4", c.p1_minus_p4);
    r.field("p2_minus_p3", c.p2_minus_p3);
    r.field("tabulated_sum4_minus_two_identity", c.tabulated_sum4_minus_two_identity);
    r.field("tabulated_sum4_minus_identity", c.tabulated_sum4_minus_identity);
    r.field("tabulated_p1_minus_p4", c.tabulated_p1_minus_p4);
    r.field("tabulated_p2_minus_p3", c.tabulated_p2_minus_p3);
    r.field("tabulated_vs_constructed_p1", c.tabulated_vs_constructed_p1);
    r.field("tabulated_vs_constructed_p2", c.tabulated_vs_constructed_p2);
    r.field("max_idempotency_residual", c.max_idempotency_residual);
    Ok(r)
}

fn matrix_cells(m: &CMatrix) -> Vec<Cell> {
    m.as_slice().iter().flat_map(|z| [Cell::Float(z.re), Cell::Float(z.im)]).collect()
}

pub fn cmd_projectors(cfg: &RunConfig) -> CliResult<Report> {
    let p = &cfg.params;
    let eps = cfg.eps();
    let te = ThetaEps::symmetric(eps).map_err(|e| usage(e.to_string()))?;
    let alpha = states::discrimination_alpha(eps).map_err(|e| usage(e.to_string()))?;
    let eta = metric_closed_form(alpha).map_err(|e| domain(e, p))?;
    let (s1, s2) = states::make_psi_pair_12(te);
    let (s3, s4) = states::make_psi_pair_34(te);
    // the state each projector should annihilate
    let partner = [s2, s1, s4, s3];

    let mut t = Table::new(
        "projectors",
        &[
            "index", "source", "p00_re", "p00_im", "p01_re", "p01_im", "p10_re", "p10_im", "p11_re", "p11_im",
            "idempotency_residual", "partner_image_norm",
        ],
    );
    for i in 1..=4 {
        let built = states::projector(i, te, &eta).map_err(|e| domain(e, p))?;
        let tab = states::tabulated_projector(i, eps).map_err(|e| domain(e, p))?;
        for (source, m) in [("constructed", built), ("tabulated", tab)] {
            let idem = (&m * &m).max_abs_diff(&m);
            let img = m.apply(&partner[i - 1].as_array()).expect("2x2");
            let mut row = vec![i.into(), source.into()];
            row.extend(matrix_cells(&m));
            row.push(idem.into());
            row.push(linalg::norm(&img).into());
            t.push(row);
        }
    }
    let mut r = Report::new("projectors");
    r.tables.push(t);
    Ok(r)
}

fn default_t_max(eh: &EffectiveHamiltonian) -> f64 {
    if eh.beta > 0.0 {
        2.0 * PI / eh.beta
    } else {
        20.0 / eh.params.hbar_omega
    }
}

pub fn cmd_evolve(cfg: &RunConfig) -> CliResult<Report> {
    let p = &cfg.params;
    let te = ThetaEps::symmetric(cfg.eps()).map_err(|e| usage(e.to_string()))?;
    let eh = EffectiveHamiltonian::new(*p).map_err(|e| domain(e, p))?;
    let t_max = cfg.t_max.unwrap_or_else(|| default_t_max(&eh));
    let grid = if cfg.t_points == 1 { vec![0.0] } else { linspace(0.0, t_max, cfg.t_points) };
    let trace = overlap_trajectory(te, *p, &grid).map_err(|e| domain(e, p))?;

    let mut t = Table::new("trace", &["t", "re_overlap", "im_overlap", "abs_overlap"]);
    for (&time, z) in trace.times.iter().zip(&trace.overlaps) {
        t.push(vec![time.into(), z.re.into(), z.im.into(), z.norm().into()]);
    }
    let mut r = Report::new("evolve");
    r.tables.push(t);
    r.footer = Some(("t_star", trace.t_star.map_or_else(|| "divergent".into(), Cell::Float)));
    Ok(r)
}

pub fn cmd_scan(cfg: &RunConfig) -> CliResult<Report> {
    let p = &cfg.params;
    let (lo, hi) = cfg.alpha_range;
    let grid = linspace(lo, hi, cfg.alpha_points);
    let rows = scan_alpha(&cfg.eps_list, &grid, cfg.family(), cfg.periods).map_err(|e| domain(e, p))?;
    let mut t = Table::new(
        "scan",
        &[
            "eps_state", "alpha", "beta", "t_star", "beta_t_star", "sin2_beta_t_star", "divergent_flag", "re_t_star",
            "re_sin2_beta_t_star",
        ],
    );
    for row in rows {
        t.push(vec![
            row.eps_state.into(),
            row.alpha.into(),
            row.beta.into(),
            Cell::opt(row.t_star),
            Cell::opt(row.beta_t_star),
            Cell::opt(row.sin2_beta_t_star),
            row.divergent.into(),
            Cell::opt(row.re_t_star),
            Cell::opt(row.re_sin2_beta_t_star),
        ]);
    }
    let mut r = Report::new("scan");
    r.tables.push(t);
    Ok(r)
}

/// α values used by the audit tables.
pub const AUDIT_ALPHAS: [f64; 6] = [0.3, FRAC_PI_6, 0.6, 0.9, 1.2, 1.4];

pub fn cmd_eq_audit(cfg: &RunConfig) -> CliResult<Report> {
    let p = &cfg.params;
    let eps = cfg.eps();
    let fam = cfg.family();

    let mut g = Table::new("gram_table", &["alpha", "beta_t", "t", "diag_residual", "offdiag_residual"]);
    let (mut max_d, mut max_o) = (0.0f64, 0.0f64);
    for &alpha in &AUDIT_ALPHAS {
        let q = fam.at_alpha(alpha).map_err(|e| domain(e, p))?;
        let eh = EffectiveHamiltonian::new(q).map_err(|e| domain(e, p))?;
        for k in 0..=8 {
            let bt = k as f64 * PI / 8.0;
            let t = bt / eh.beta;
            let res = eq20_residual(t, q).map_err(|e| domain(e, p))?;
            max_d = max_d.max(res.diag);
            max_o = max_o.max(res.offdiag);
            g.push(vec![alpha.into(), bt.into(), t.into(), res.diag.into(), res.offdiag.into()]);
        }
    }

    let mut c = Table::new(
        "root_formula",
        &[
            "eps_state", "alpha", "closed_form", "closed_form_error", "t_star", "sin2_beta_t_star", "abs_diff",
            "re_sin2_beta_t_star", "re_closed_form",
        ],
    );
    for e in [eps, 0.0] {
        let te = ThetaEps::symmetric(e).map_err(|err| usage(err.to_string()))?;
        for alpha in [0.3, 0.6, 0.9, 1.2] {
            let q = fam.at_alpha(alpha).map_err(|err| domain(err, p))?;
            let eh = EffectiveHamiltonian::new(q).map_err(|err| domain(err, p))?;
            let t_max = cfg.periods * 2.0 * PI / eh.beta;
            let sin2 = |t: f64| (eh.beta * t).sin().powi(2);
            let closed = closed_form_sin2bt(alpha, e);
            let t_star = evolution::find_orthogonality_time(te, q, t_max).map_err(|err| domain(err, p))?;
            let re_t = evolution::find_real_part_zero(te, q, t_max).map_err(|err| domain(err, p))?;
            let num = t_star.map(sin2);
            let diff = match (&closed, num) {
                (Ok(cf), Some(n)) => Some((cf - n).abs()),
                _ => None,
            };
            c.push(vec![
                e.into(),
                alpha.into(),
                Cell::opt(closed.as_ref().ok().copied()),
                closed.as_ref().err().map_or(Cell::Null, |err| Cell::Text(err.to_string())),
                Cell::opt(t_star),
                Cell::opt(num),
                Cell::opt(diff),
                Cell::opt(re_t.map(sin2)),
                Cell::opt(real_part_zero_sin2bt(alpha, e).ok()),
            ]);
        }
    }

    let mut r = Report::new("eq-audit");
    r.label = Some(AUDIT_LABEL);
    r.field("eps_state", eps);
    r.field("max_diag_residual", max_d);
    r.field("max_offdiag_residual", max_o);
    r.field("orthogonality_alpha", Cell::opt(evolution::orthogonality_alpha(eps).ok()));
    r.tables.push(g);
    r.tables.push(c);
    Ok(r)
}
