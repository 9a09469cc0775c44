//! Config-driven driver for the `hypext` library: runs one task, prints a
//! summary line per result and writes CSV artifacts atomically.

pub mod config;

use config::{RunConfig, Task};
use hypext::eisenstein::{self, InteriorPoint, ScanGrid};
use hypext::extension::{self, BoundarySection};
use hypext::intertwine::j_multiplier;
use hypext::lie_core::{iwasawa_decompose, weyl_reflect, BoundaryPoint, SpectralParam};
use hypext::poincare::{critical_exponent, poincare_series, trivializer};
use hypext::scattering::{fredholm_indicator, verify_funeq, ScatteringContext};
use hypext::schottky::{embed_next_rank, enumerate_words, SchottkyData};
use hypext::{Rank, Result as CoreResult};
use num_complex::Complex64 as C;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at line {line}, column {col}: {msg}")]
    Config { line: usize, col: usize, msg: String },

    #[error("invalid config field `{field}`: {msg}")]
    Invalid { field: String, msg: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{source}")]
    Core { source: hypext::Error },

    #[error("{task} requires δ_Γ < 0, but δ_Γ = {delta:.6}: embed the group into the next rank (δ_Γ shifts by −1/2); scattering in rank 3 is not supported")]
    PositiveExponent { task: &'static str, delta: f64 },

    #[error("{failed} verification suite(s) failed")]
    VerificationFailed { failed: usize },
}

impl CliError {
    /// Kebab-case name used as the diagnostic prefix.
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Config { .. } => "config-syntax",
            CliError::Invalid { .. } => "config-invalid",
            CliError::Io { .. } => "io",
            CliError::Core { source } => source.name(),
            CliError::PositiveExponent { .. } => "nonnegative-exponent",
            CliError::VerificationFailed { .. } => "verification-failed",
        }
    }
}

impl From<hypext::Error> for CliError {
    fn from(source: hypext::Error) -> Self {
        CliError::Core { source }
    }
}

/// One CSV artifact, rendered in memory before anything touches the disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(file: &str, header: &[&'static str]) -> Self {
        Self { file: file.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Floats with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of a task: summary lines and artifacts.
#[derive(Debug, Default)]
pub struct Outcome {
    pub summary: Vec<String>,
    pub tables: Vec<Table>,
    pub failed_suites: usize,
}

/// Run `task` (or the config's own task) and write its artifacts to `out_dir`.
pub fn run(cfg: &RunConfig, task: Option<Task>, out_dir: &Path) -> Result<Outcome, CliError> {
    let task = match (task, cfg.task) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Invalid {
                field: "task".into(),
                msg: format!("config selects `{}` but `{}` was requested", b.name(), a.name()),
            })
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(CliError::Invalid { field: "task".into(), msg: "no task selected".into() }),
    };
    let outcome = compute(cfg, task)?;
    write_all(out_dir, &outcome.tables)?;
    if outcome.failed_suites > 0 {
        for s in &outcome.summary {
            println!("{s}");
        }
        return Err(CliError::VerificationFailed { failed: outcome.failed_suites });
    }
    Ok(outcome)
}

/// Compute a task without writing anything.
pub fn compute(cfg: &RunConfig, task: Task) -> Result<Outcome, CliError> {
    let base = cfg.build_group()?;
    if cfg.group.rank == 3 && task != Task::Exponent {
        return Err(hypext::Error::UnsupportedRank(3).into());
    }
    match task {
        Task::Exponent => exponent_task(cfg, &base),
        Task::Scatter => scatter_task(cfg, &base),
        Task::Eisenstein => eisenstein_task(cfg, &base),
        Task::Resonances => resonance_task(cfg, &base),
        Task::Verify => verify_task(cfg, &base),
    }
}

/// Write every table to a temporary file first, then rename them into place.
fn write_all(dir: &Path, tables: &[Table]) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut staged = Vec::new();
    for t in tables {
        let target = dir.join(&t.file);
        let tmp = dir.join(format!(".{}.{}.tmp", t.file, std::process::id()));
        let result = std::fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(t.render().as_bytes())?;
            f.sync_all()
        });
        if let Err(e) = result {
            let _ = std::fs::remove_file(&tmp);
            for (p, _) in &staged {
                let _ = std::fs::remove_file(p);
            }
            return Err(io(&tmp)(e));
        }
        staged.push((tmp, target));
    }
    for (tmp, target) in staged {
        std::fs::rename(&tmp, &target).map_err(io(&target))?;
    }
    Ok(())
}

fn fmt_lambda(l: C) -> String {
    if l.im == 0.0 {
        format!("{:.6}", l.re)
    } else {
        format!("{:.6}{:+.6}i", l.re, l.im)
    }
}

/// δ_Γ of a nontrivial group; scattering-type tasks need it negative.
fn require_negative_exponent(cfg: &RunConfig, g: &SchottkyData, task: Task) -> Result<Option<f64>, CliError> {
    if g.is_trivial() {
        return Ok(None);
    }
    let delta = critical_exponent(g, cfg.tolerances.exponent_tol)?;
    if delta >= 0.0 {
        return Err(CliError::PositiveExponent { task: task.name(), delta });
    }
    Ok(Some(delta))
}

fn exponent_task(cfg: &RunConfig, base: &SchottkyData) -> Result<Outcome, CliError> {
    let g = if cfg.group.rank == 3 { embed_next_rank(base)? } else { base.clone() };
    let delta = critical_exponent(&g, cfg.tolerances.exponent_tol)?;
    let theta = g.fundamental.arcs[0].at(0.5);
    let b = match g.rank {
        Rank::Two => BoundaryPoint::circle(theta),
        Rank::Three => BoundaryPoint::circle(theta).to_sphere(),
    };
    let e = &cfg.exponent;
    let mut table = Table::new("exponent_sweep.csv", &["s", "value", "tail_bound"]);
    for k in 1..=e.sweep_points {
        let s = delta + e.sweep_step * k as f64;
        let r = poincare_series(&g, C::new(s, 0.0), &b, e.sweep_length, f64::INFINITY)?;
        table.rows.push(vec![num(s), num(r.value.re), num(r.tail_bound)]);
    }
    Ok(Outcome {
        summary: vec![format!("δ_Γ = {delta:.6} ± {:.1e} (rank {})", cfg.tolerances.exponent_tol, g.rank.tag())],
        tables: vec![table],
        failed_suites: 0,
    })
}

fn scatter_task(cfg: &RunConfig, g: &SchottkyData) -> Result<Outcome, CliError> {
    require_negative_exponent(cfg, g, Task::Scatter)?;
    let ctx = ScatteringContext::new(g, cfg.discretization.build())?;
    let margin = cfg.tolerances.margin;
    let mut table = Table::new("scatter.csv", &["re_lambda", "im_lambda", "funeq_residual", "indicator", "min_sv"]);
    let mut summary = Vec::new();
    for lam in cfg.lambda.values() {
        let p = SpectralParam::new(lam, Rank::Two);
        let r = verify_funeq(&ctx, &p, margin)?;
        // the indicator at λ needs the direct S at −λ
        let (ind, min_sv) = if ctx.direct_ok(-lam, margin) {
            let i = fredholm_indicator(&ctx, &p)?;
            (i.log_det, i.min_sv)
        } else {
            (f64::NAN, f64::NAN)
        };
        summary.push(format!("λ = {}: funeq residual {r:.3e}, indicator {ind:.6}, min sv {min_sv:.3e}", fmt_lambda(lam)));
        table.rows.push(vec![num(lam.re), num(lam.im), num(r), num(ind), num(min_sv)]);
    }
    Ok(Outcome { summary, tables: vec![table], failed_suites: 0 })
}

fn phi_section(cfg: &RunConfig, ctx: &ScatteringContext<'_>, lam: C) -> BoundarySection {
    let n = ctx.disc.fourier_order;
    let basis = ctx.basis(n);
    let mut modes = vec![C::new(0.0, 0.0); basis.dim()];
    if cfg.eisenstein.phi_modes.is_empty() {
        for c in 0..basis.circles {
            modes[basis.index(c, 0)] = C::new(1.0, 0.0);
        }
    } else {
        for m in &cfg.eisenstein.phi_modes {
            let (c, k) = (m[0] as usize, m[1] as i64);
            if c < basis.circles && k.unsigned_abs() as usize <= n {
                modes[basis.index(c, k)] += C::new(m[2], m[3]);
            }
        }
    }
    BoundarySection::quotient_from_modes(&ctx.grid, ctx.rho(), SpectralParam::new(lam, Rank::Two), &modes)
}

fn eisenstein_task(cfg: &RunConfig, g: &SchottkyData) -> Result<Outcome, CliError> {
    require_negative_exponent(cfg, g, Task::Eisenstein)?;
    let ctx = ScatteringContext::new(g, cfg.discretization.build())?;
    let t = &cfg.tolerances;
    let e = &cfg.eisenstein;
    let mut table = Table::new(
        "eisenstein.csv",
        &["re_lambda", "im_lambda", "ktype", "x", "y", "re_value", "im_value", "via_continuation", "min_sv"],
    );
    let mut summary = Vec::new();
    for lam in cfg.lambda.values() {
        let phi = phi_section(cfg, &ctx, lam);
        for p in &e.points {
            let z = InteriorPoint::new(p[0], p[1])?;
            let v = eisenstein::eisenstein(&ctx, &phi, e.ktype, &z, t.word_length, t.series_tol, t.margin)?;
            let min_sv = v.min_sv.unwrap_or(f64::NAN);
            summary.push(format!(
                "E(λ = {}, z = ({}, {})) = {:.10e}{:+.10e}i{}",
                fmt_lambda(lam),
                p[0],
                p[1],
                v.value.re,
                v.value.im,
                if v.via_continuation { " (continued)" } else { "" }
            ));
            table.rows.push(vec![
                num(lam.re),
                num(lam.im),
                e.ktype.to_string(),
                num(p[0]),
                num(p[1]),
                num(v.value.re),
                num(v.value.im),
                v.via_continuation.to_string(),
                num(min_sv),
            ]);
        }
    }
    Ok(Outcome { summary, tables: vec![table], failed_suites: 0 })
}

fn resonance_task(cfg: &RunConfig, g: &SchottkyData) -> Result<Outcome, CliError> {
    let delta = require_negative_exponent(cfg, g, Task::Resonances)?;
    let ctx = ScatteringContext::new(g, cfg.discretization.build())?;
    let r = &cfg.resonances;
    let grid = ScanGrid { re: (r.re_min, r.re_max), im: (r.im_min, r.im_max), steps: (r.re_steps, r.im_steps) };
    let scan = eisenstein::resonance_scan(&ctx, &grid, r.refine_tol);
    let mut points = Table::new("resonance_scan.csv", &["re_lambda", "im_lambda", "indicator", "min_sv", "flag"]);
    for p in &scan.points {
        points.rows.push(vec![num(p.lam.re), num(p.lam.im), num(p.indicator), num(p.min_sv), p.flag.clone()]);
    }
    let mut dips = Table::new("resonance_dips.csv", &["re_lambda", "im_lambda", "rank_deficiency"]);
    let mut summary = Vec::new();
    if let Some(d) = delta {
        summary.push(format!("δ_Γ = {d:.6}"));
    }
    for d in &scan.dips {
        dips.rows.push(vec![num(d.lam.re), num(d.lam.im), d.rank_deficiency.to_string()]);
        summary.push(format!("dip at λ = {} (rank deficiency {})", fmt_lambda(d.lam), d.rank_deficiency));
    }
    if scan.dips.is_empty() {
        summary.push("no dips on the scan grid".into());
    }
    Ok(Outcome { summary, tables: vec![points, dips], failed_suites: 0 })
}

struct Suite {
    name: &'static str,
    value: f64,
    threshold: f64,
}

fn verify_task(cfg: &RunConfig, g: &SchottkyData) -> Result<Outcome, CliError> {
    let t = &cfg.tolerances;
    let lams: Vec<C> = {
        let v = cfg.lambda.values();
        if v.is_empty() {
            vec![C::new(0.2, 0.0)]
        } else {
            v
        }
    };
    let delta = if g.is_trivial() { None } else { Some(critical_exponent(g, t.exponent_tol)?) };
    let mut suites = vec![
        Suite { name: "iwasawa-round-trip", value: iwasawa_defect(g)?, threshold: 1e-10 },
        Suite { name: "intertwiner-functional-equation", value: intertwiner_defect(&lams)?, threshold: 1e-7 },
    ];
    let ctx = ScatteringContext::new(g, cfg.discretization.build())?;
    // ext needs Re λ > δ_Γ: test it at the first such λ
    let above = lams.iter().copied().find(|l| delta.is_none_or(|d| l.re > d + t.margin));
    if let Some(lam) = above {
        suites.push(Suite { name: "average-of-constant", value: constant_average_defect(&ctx, lam, t)?, threshold: 1e-8 });
        suites.push(Suite { name: "ext-gamma-invariance", value: invariance_defect(&ctx, lam, t)?, threshold: 1e-6 });
    }
    if delta.is_none_or(|d| d < 0.0) {
        let mut worst: f64 = 0.0;
        for &lam in &lams {
            worst = worse(worst, verify_funeq(&ctx, &SpectralParam::new(lam, Rank::Two), t.margin)?);
        }
        suites.push(Suite { name: "scattering-functional-equation", value: worst, threshold: t.funeq_tol });
    }
    let one = BoundarySection::full_from_fn(64, SpectralParam::new(-lams[0], Rank::Two), |th| C::new(2.0 + th.cos(), 0.0));
    let z = InteriorPoint::new(0.3, -0.2)?;
    let pde = eisenstein::poisson_pde_residual(&one, &SpectralParam::new(lams[0], Rank::Two), &z, 1e-2)?;
    suites.push(Suite { name: "poisson-pde", value: pde, threshold: 1e-3 });

    let mut table = Table::new("verify.csv", &["suite", "value", "threshold", "status"]);
    let mut summary = Vec::new();
    let mut failed = 0;
    for s in &suites {
        let ok = s.value <= s.threshold;
        if !ok {
            failed += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        summary.push(format!("{status} {}: {:.3e} (threshold {:.1e})", s.name, s.value, s.threshold));
        table.rows.push(vec![s.name.to_string(), num(s.value), num(s.threshold), status.to_string()]);
    }
    Ok(Outcome { summary, tables: vec![table], failed_suites: failed })
}

fn iwasawa_defect(g: &SchottkyData) -> CoreResult<f64> {
    let mut worst: f64 = 0.0;
    for (_, m) in enumerate_words(g, 3) {
        let f = iwasawa_decompose(&m)?;
        let scale = m.matrix().iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        for (x, y) in f.reconstruct().iter().flatten().zip(m.matrix().iter().flatten()) {
            worst = worse(worst, (x - y).norm() / scale);
        }
    }
    Ok(worst)
}

fn intertwiner_defect(lams: &[C]) -> CoreResult<f64> {
    let mut worst: f64 = 0.0;
    for &l in lams {
        let p = SpectralParam::new(l, Rank::Two);
        if hypext::lie_core::is_bad(&p) {
            continue;
        }
        for n in -16..=16 {
            worst = worse(worst, (j_multiplier(&p, n)? * j_multiplier(&weyl_reflect(&p), n)? - 1.0).norm());
        }
    }
    Ok(worst)
}

/// Average of the constant section against the trivializer at the nodes.
fn constant_average_defect(ctx: &ScatteringContext<'_>, lam: C, t: &config::Tolerances) -> CoreResult<f64> {
    let g = ctx.group;
    let one = BoundarySection::full_from_fn(16, SpectralParam::new(-lam, Rank::Two), |_| C::new(1.0, 0.0));
    let avg = extension::average(g, &ctx.grid, &one, t.word_length, t.series_tol)?;
    let mut worst: f64 = 0.0;
    for (node, v) in ctx.grid.nodes.iter().zip(&avg.samples).step_by(16) {
        let want = trivializer(g, lam.re, &BoundaryPoint::circle(node.theta), 60)?;
        worst = worse(worst, (v - want).norm() / want);
    }
    Ok(if lam.im == 0.0 { worst } else { 0.0 })
}

fn invariance_defect(ctx: &ScatteringContext<'_>, lam: C, t: &config::Tolerances) -> CoreResult<f64> {
    let g = ctx.group;
    let f = BoundarySection::full_from_fn(2048, SpectralParam::new(-lam, Rank::Two), |th| {
        C::new(1.0 + 0.5 * th.cos(), 0.3 * (2.0 * th).sin())
    });
    let phi = BoundarySection::quotient_from_fn(&ctx.grid, ctx.rho(), SpectralParam::new(lam, Rank::Two), |c, s| {
        C::new((2.0 * std::f64::consts::PI * s).cos() + c as f64, 0.2)
    });
    let base = extension::ext_pair(g, &phi, &f, t.word_length, t.series_tol)?;
    let mut worst: f64 = 0.0;
    for &letter in &g.letters() {
        let moved = extension::twisted_act(&g.letter_element(letter), &f)?;
        let v = extension::ext_pair(g, &phi, &moved, t.word_length, t.series_tol)?;
        worst = worse(worst, (v - base).norm() / (1.0 + base.norm()));
    }
    Ok(worst)
}

/// Render the summary as printed by the binary.
pub fn summary_text(o: &Outcome) -> String {
    let mut s = String::new();
    for line in &o.summary {
        let _ = writeln!(s, "{line}");
    }
    s
}

/// NaN-propagating maximum: a NaN defect must never read as a pass.
fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
