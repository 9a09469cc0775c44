//! Run configuration: a flat TOML file with one table per concern.
//!
//! ```toml
//! task = "scatter"
//!
//! [group]
//! kind = "two_generator"   # trivial | cylinder | two_generator | custom
//! ell = 4.0
//!
//! [lambda]
//! re = [0.1, -0.1]
//! ```

use crate::CliError;
use hypext::lie_core::GroupElement;
use hypext::scattering::Discretization;
use hypext::schottky::{self, Arc, SchottkyData};
use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Exponent,
    Scatter,
    Eisenstein,
    Resonances,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Exponent => "exponent",
            Task::Scatter => "scatter",
            Task::Eisenstein => "eisenstein",
            Task::Resonances => "resonances",
            Task::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Option<Task>,
    pub threads: Option<usize>,
    pub group: GroupConfig,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub lambda: LambdaConfig,
    #[serde(default)]
    pub exponent: ExponentConfig,
    #[serde(default)]
    pub eisenstein: EisensteinConfig,
    #[serde(default)]
    pub resonances: ResonanceConfig,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Trivial,
    Cylinder,
    TwoGenerator,
    Custom,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub kind: GroupKind,
    /// Translation length for the built-in families.
    pub ell: Option<f64>,
    #[serde(default = "default_rank")]
    pub rank: u32,
    /// Custom generators, row-major `[a, b, c, d]`.
    #[serde(default)]
    pub generators: Vec<[f64; 4]>,
    /// Custom arcs `[source_start, source_len, target_start, target_len]`.
    #[serde(default)]
    pub arcs: Vec<[f64; 4]>,
}

fn default_rank() -> u32 {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscretizationConfig {
    pub fourier_order: usize,
    pub nodes_per_circle: Option<usize>,
    pub fine_grid: usize,
    pub interp_order: usize,
    pub cheb_nodes: usize,
    pub lcheck: usize,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        let d = Discretization::default();
        Self {
            fourier_order: d.fourier_order,
            nodes_per_circle: None,
            fine_grid: d.fine_grid,
            interp_order: d.interp_order,
            cheb_nodes: d.cheb_nodes,
            lcheck: d.lcheck,
        }
    }
}

impl DiscretizationConfig {
    pub fn build(&self) -> Discretization {
        let mut d = Discretization::with_order(self.fourier_order);
        if let Some(n) = self.nodes_per_circle {
            d.nodes_per_circle = n;
        }
        d.fine_grid = self.fine_grid;
        d.interp_order = self.interp_order;
        d.cheb_nodes = self.cheb_nodes;
        d.lcheck = self.lcheck;
        d
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Maximal word length of truncated sums.
    pub word_length: usize,
    /// Truncation tolerance of word sums.
    pub series_tol: f64,
    /// Bisection tolerance of the critical exponent.
    pub exponent_tol: f64,
    /// Distance from δ_Γ below which direct sums are avoided.
    pub margin: f64,
    /// Threshold of the functional-equation checks.
    pub funeq_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { word_length: 400, series_tol: 1e-12, exponent_tol: 1e-4, margin: 0.05, funeq_tol: 1e-4 }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambdaConfig {
    pub re: Vec<f64>,
    /// Imaginary parts; empty means real λ.
    pub im: Vec<f64>,
}

impl LambdaConfig {
    pub fn values(&self) -> Vec<Complex64> {
        self.re.iter().enumerate().map(|(i, &x)| Complex64::new(x, self.im.get(i).copied().unwrap_or(0.0))).collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentConfig {
    /// Sweep points are `δ_Γ + k · sweep_step`, `k = 1..=sweep_points`.
    pub sweep_step: f64,
    pub sweep_points: usize,
    pub sweep_length: usize,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        Self { sweep_step: 0.05, sweep_points: 20, sweep_length: 12 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EisensteinConfig {
    pub ktype: i64,
    /// Evaluation points `[x, y]` in the unit disk.
    pub points: Vec<[f64; 2]>,
    /// Fourier coefficients of φ, `[circle, mode, re, im]`; empty means φ ≡ 1.
    pub phi_modes: Vec<[f64; 4]>,
}

impl Default for EisensteinConfig {
    fn default() -> Self {
        Self { ktype: 0, points: vec![[0.0, 0.0]], phi_modes: Vec::new() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub re_steps: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub im_steps: usize,
    pub refine_tol: f64,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        Self { re_min: -0.45, re_max: 0.15, re_steps: 25, im_min: 0.0, im_max: 0.0, im_steps: 1, refine_tol: 1e-3 }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, col) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
            CliError::Config { line, col, msg: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: &str| Err(CliError::Invalid { field: field.to_string(), msg: msg.to_string() });
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.series_tol", t.series_tol),
            ("tolerances.exponent_tol", t.exponent_tol),
            ("tolerances.funeq_tol", t.funeq_tol),
            ("resonances.refine_tol", self.resonances.refine_tol),
        ] {
            if !(v > 0.0) {
                return bad(name, "tolerances must be positive");
            }
        }
        if t.margin < 0.0 {
            return bad("tolerances.margin", "must be non-negative");
        }
        if t.word_length == 0 {
            return bad("tolerances.word_length", "must be positive");
        }
        let d = &self.discretization;
        if d.fourier_order < 4 {
            return bad("discretization.fourier_order", "must be at least 4");
        }
        if !d.fine_grid.is_power_of_two() || d.fine_grid < 8 * d.fourier_order {
            return bad("discretization.fine_grid", "must be a power of two of at least 8 · fourier_order");
        }
        if self.threads == Some(0) {
            return bad("threads", "must be positive");
        }
        if !self.lambda.im.is_empty() && self.lambda.im.len() != self.lambda.re.len() {
            return bad("lambda.im", "must be empty or match lambda.re in length");
        }
        let g = &self.group;
        if g.rank != 2 && g.rank != 3 {
            return bad("group.rank", "must be 2 or 3");
        }
        match g.kind {
            GroupKind::Cylinder | GroupKind::TwoGenerator if g.ell.is_none_or(|l| !(l > 0.0)) => {
                return bad("group.ell", "a positive translation length is required");
            }
            GroupKind::Custom if g.generators.len() != g.arcs.len() => {
                return bad("group.arcs", "one arc pair per generator is required");
            }
            _ => {}
        }
        for p in &self.eisenstein.points {
            if p[0].hypot(p[1]) >= 1.0 {
                return bad("eisenstein.points", "points must lie inside the unit disk");
            }
        }
        let r = &self.resonances;
        if r.re_steps == 0 || r.im_steps == 0 || r.re_min > r.re_max || r.im_min > r.im_max {
            return bad("resonances", "empty scan rectangle");
        }
        Ok(())
    }

    /// The rank-2 group described by `[group]` (before any embedding).
    pub fn build_group(&self) -> hypext::Result<SchottkyData> {
        let g = &self.group;
        match g.kind {
            GroupKind::Trivial => Ok(schottky::trivial_group()),
            GroupKind::Cylinder => schottky::hyperbolic_cylinder(g.ell.unwrap_or_default()),
            GroupKind::TwoGenerator => schottky::two_generator(g.ell.unwrap_or_default()),
            GroupKind::Custom => {
                let gens = g.generators.iter().map(|m| GroupElement::real(m[0], m[1], m[2], m[3])).collect::<hypext::Result<Vec<_>>>()?;
                let arcs = g.arcs.iter().map(|a| (Arc::new(a[0], a[1]), Arc::new(a[2], a[3]))).collect();
                schottky::build_schottky(gens, arcs)
            }
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}
