//! Discretized scattering matrices `S_λ = res ∘ J_λ ∘ ext`, the cutoff
//! intertwiner J̃, Fredholm continuation and functional-equation checks.
//!
//! Operators act on sections over B expanded in Fourier modes `e^{2πimŝ}`
//! per glued circle (see [`crate::quotient`]). A column of `S_λ` is obtained
//! by lifting a basis section to the circle with a partition of unity,
//! applying `J_λ` exactly in Fourier space on a fine grid, and averaging
//! over Γ. The average is resummed with a transfer operator on the
//! Schottky disks instead of an explicit word sum.

use crate::error::{Error, Result};
use crate::intertwine::{j_kernel, j_table};
use crate::lie_core::{act_circle, is_bad, SpectralParam};
use crate::numerics::{
    apply_multiplier, barycentric_row, chebyshev, fourier_coefficients, smooth_step, smoothstep_c2, PeriodicInterp,
};
use crate::poincare::check_convergence;
use crate::quotient::{ChartPoint, QuotientChart, QuotientGrid};
use crate::schottky::{min_displacement, SchottkyData};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Discretization parameters shared by all scattering computations.
#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    /// Fourier truncation order N per circle of B (modes −N..=N).
    pub fourier_order: usize,
    /// Collocation nodes per circle of B.
    pub nodes_per_circle: usize,
    /// Uniform grid size on the full circle (power of two).
    pub fine_grid: usize,
    /// Local interpolation order on the fine grid.
    pub interp_order: usize,
    /// Chebyshev nodes per Schottky disk for the resummed average.
    pub cheb_nodes: usize,
    /// Word length for discontinuity checks.
    pub lcheck: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self { fourier_order: 16, nodes_per_circle: 256, fine_grid: 4096, interp_order: 12, cheb_nodes: 40, lcheck: 3 }
    }
}

impl Discretization {
    pub fn with_order(order: usize) -> Self {
        let mut d = Self::default();
        d.fourier_order = order;
        d.nodes_per_circle = d.nodes_per_circle.max((8 * order + 1).next_power_of_two());
        d
    }
}

/// Fourier basis over the circles of B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Basis {
    pub circles: usize,
    pub order: usize,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.circles * (2 * self.order + 1)
    }

    pub fn index(&self, circle: usize, mode: i64) -> usize {
        circle * (2 * self.order + 1) + (mode + self.order as i64) as usize
    }

    /// `(circle, mode)` of an index.
    pub fn label(&self, i: usize) -> (usize, i64) {
        let w = 2 * self.order + 1;
        (i / w, (i % w) as i64 - self.order as i64)
    }

    /// Selection of the rows/columns of `self` inside a larger basis.
    fn embed_into(&self, big: &Basis) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                let (c, m) = self.label(i);
                big.index(c, m)
            })
            .collect()
    }
}

/// A dense operator on a declared basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<C>,
    pub basis: Basis,
    pub lam: SpectralParam,
}

impl OperatorMatrix {
    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.is_finite())
    }
}

/// The Γ-invariant cutoff χ near the diagonal of Ω × Ω.
///
/// χ is a C² smoothstep in the invariant ŝ-distance: 1 below
/// `epsilon_s / 2`, 0 above `epsilon_s`; pairs at chordal distance above
/// `epsilon` (a quarter of the minimal displacement) are always cut, so
/// `χ(x, γx) = 0` for γ ≠ 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffField {
    pub epsilon: f64,
    pub epsilon_s: f64,
    pub smoothstep_order: u32,
}

impl CutoffField {
    fn profile(&self, d: f64) -> f64 {
        1.0 - smoothstep_c2((d - 0.5 * self.epsilon_s) / (0.5 * self.epsilon_s))
    }
}

#[derive(Clone, Copy, Debug)]
struct FinePoint {
    chart: ChartPoint,
    circle: usize,
    s: f64,
}

/// Precomputed geometry for scattering computations on one group.
pub struct ScatteringContext<'g> {
    pub group: &'g SchottkyData,
    pub chart: QuotientChart,
    pub disc: Discretization,
    pub grid: Arc<QuotientGrid>,
    pub cutoff: CutoffField,
    fine: Vec<Option<FinePoint>>,
    /// Half-width (ŝ) of the partition-of-unity transitions at arc ends.
    eta: f64,
    interp: PeriodicInterp,
}

/// Transfer-operator resummation of `T(x) = Σ_γ a(γk_x)^e F(γx)` at the
/// quotient nodes, as a linear map from values of F at `points`.
struct Averager {
    points: Vec<f64>,
    weights: DMatrix<C>,
}

impl<'g> ScatteringContext<'g> {
    pub fn new(group: &'g SchottkyData, disc: Discretization) -> Result<Self> {
        if disc.fourier_order < 1 || disc.nodes_per_circle < 4 * disc.fourier_order + 2 {
            return Err(Error::InvalidConfiguration("nodes_per_circle must exceed 4·fourier_order + 1".into()));
        }
        let chart = QuotientChart::new(group)?;
        let grid = Arc::new(chart.grid(disc.nodes_per_circle));
        let m = disc.fine_grid;
        let fine: Vec<Option<FinePoint>> = (0..m)
            .into_par_iter()
            .map(|j| {
                let t = 2.0 * PI * j as f64 / m as f64;
                chart.classify(t).map(|p| {
                    let (circle, s) = chart.circle_coord(&p);
                    FinePoint { chart: p, circle, s }
                })
            })
            .collect();
        let eta = 0.8 * chart.collar;
        let cutoff = if group.is_trivial() {
            CutoffField { epsilon: f64::INFINITY, epsilon_s: f64::INFINITY, smoothstep_order: 2 }
        } else {
            let epsilon = min_displacement(group, disc.lcheck)? / 4.0;
            let w_min = fine.iter().flatten().map(|p| p.chart.w_hat).fold(f64::INFINITY, f64::min);
            let epsilon_s = (epsilon * w_min / (2.0 * PI)).min(chart.collar / 3.0);
            CutoffField { epsilon, epsilon_s, smoothstep_order: 2 }
        };
        let interp = PeriodicInterp::new(disc.interp_order);
        Ok(Self { group, chart, disc, grid, cutoff, fine, eta, interp })
    }

    pub fn rho(&self) -> f64 {
        self.chart.rho()
    }

    pub fn basis(&self, order: usize) -> Basis {
        Basis { circles: self.chart.num_circles(), order }
    }

    fn param(&self, lambda: C) -> SpectralParam {
        SpectralParam::new(lambda, self.group.rank)
    }

    /// `ŵ^{(ρ−ν)/2ρ}` factor of a weight-ν section.
    fn weight_factor(&self, nu: C, w_hat: f64) -> C {
        (self.chart.weight_exponent(nu) * w_hat.ln()).exp()
    }

    fn partition(&self, p: &ChartPoint) -> f64 {
        if self.chart.is_trivial() {
            return 1.0;
        }
        let len = self.chart.arc_len[p.arc];
        smooth_step(p.local / self.eta) * smooth_step((len - p.local) / self.eta)
    }

    /// Bump equal to 1 on the `epsilon_s`-neighbourhood of the arc, 0 outside
    /// the collars.
    fn collar_bump(&self, p: &ChartPoint) -> f64 {
        if self.chart.is_trivial() {
            return 1.0;
        }
        let len = self.chart.arc_len[p.arc];
        let inner = 1.05 * self.cutoff.epsilon_s;
        let outer = 0.95 * self.chart.collar;
        let (a, b) = (0.5 * (outer + inner), 0.5 * (outer - inner));
        smooth_step((p.local + a) / b) * smooth_step((len + a - p.local) / b)
    }

    /// Fine-grid samples of `profile · ŵ^{(ρ−ν)/2ρ} e^{2πimŝ}` for a basis
    /// section on `circle`.
    fn lift(&self, nu: C, circle: usize, m: i64, bump: bool) -> Vec<C> {
        self.fine
            .iter()
            .map(|fp| match fp {
                Some(p) if p.circle == circle => {
                    let chi = if bump { self.collar_bump(&p.chart) } else { self.partition(&p.chart) };
                    if chi == 0.0 {
                        ZERO
                    } else {
                        self.weight_factor(nu, p.chart.w_hat) * chi * C::from_polar(1.0, 2.0 * PI * m as f64 * p.s)
                    }
                }
                _ => ZERO,
            })
            .collect()
    }

    /// Fourier coefficients (modes −order..=order per circle) of node values
    /// of a weight-ν section.
    fn project(&self, values: &[C], nu: C, order: usize) -> Vec<C> {
        let ns = self.grid.per_circle;
        let mut out = Vec::with_capacity(self.chart.num_circles() * (2 * order + 1));
        for (c, chunk) in values.chunks(ns).enumerate() {
            let v: Vec<C> = chunk
                .iter()
                .zip(&self.grid.nodes[c * ns..(c + 1) * ns])
                .map(|(u, n)| u / self.weight_factor(nu, n.w_hat))
                .collect();
            let f = fourier_coefficients(&v);
            for k in -(order as i64)..=(order as i64) {
                out.push(f[k.rem_euclid(ns as i64) as usize]);
            }
        }
        out
    }

    fn interp_rows(&self, points: &[f64]) -> Vec<(isize, Vec<f64>)> {
        points.iter().map(|&t| self.interp.stencil(self.disc.fine_grid, t)).collect()
    }

    fn eval_points(&self, rows: &[(isize, Vec<f64>)], fine: &[C]) -> Vec<C> {
        let m = fine.len() as isize;
        rows.iter()
            .map(|(start, w)| w.iter().enumerate().map(|(j, wj)| fine[(start + j as isize).rem_euclid(m) as usize] * *wj).sum())
            .collect()
    }

    /// Build the resummed average for the exponent `e` (the factor is
    /// `a(γk_x)^e`; convergence needs Re e < −ρ − δ_Γ).
    fn averager(&self, e: C) -> Result<Averager> {
        let g = self.group;
        let nodes: Vec<f64> = self.grid.nodes.iter().map(|n| n.theta).collect();
        let nq = nodes.len();
        if g.is_trivial() {
            return Ok(Averager { points: nodes, weights: DMatrix::identity(nq, nq) });
        }
        let letters = g.letters();
        let p = self.disc.cheb_nodes;
        let cheb: Vec<(Vec<f64>, Vec<f64>)> =
            g.disks.iter().map(|d| chebyshev(p, d.start, d.start + d.len)).collect();
        let disk_of = |t: i32| SchottkyData::image_disk(t);
        // points on a disk boundary may fall outside by roundoff; never wrap
        let unwrap = |d: usize, y: f64| g.disks[d].start + g.disks[d].clamped_offset(y);
        // unknown G_s on the disk of t (t ≠ s⁻¹), Chebyshev node k
        let mut pairs = Vec::new();
        for &s in &letters {
            for &t in &letters {
                if t != -s {
                    pairs.push((s, t));
                }
            }
        }
        let pair_index: std::collections::BTreeMap<(i32, i32), usize> =
            pairs.iter().enumerate().map(|(i, st)| (*st, i)).collect();
        let nunk = pairs.len() * p;
        let mut points: Vec<f64> = nodes.clone();
        let mut a = DMatrix::<C>::zeros(nunk, nunk);
        let mut b_entries: Vec<(usize, usize, C)> = Vec::new();
        for (pi, &(s, t)) in pairs.iter().enumerate() {
            let dt = disk_of(t);
            let ds = disk_of(s);
            for k in 0..p {
                let row = pi * p + k;
                let y = cheb[dt].0[k];
                let (sy, la) = act_circle(g.letter_matrix(s), y);
                let c = (e * la).exp();
                b_entries.push((row, points.len(), c));
                points.push(sy);
                let r = barycentric_row(&cheb[ds].0, &cheb[ds].1, unwrap(ds, sy));
                for &s2 in &letters {
                    if s2 == -s {
                        continue;
                    }
                    let base = pair_index[&(s2, s)] * p;
                    for (kk, rk) in r.iter().enumerate() {
                        a[(row, base + kk)] -= c * *rk;
                    }
                }
                a[(row, row)] += ONE;
            }
        }
        let np_solve = points.len();
        // direct terms and interpolation of G at t·x
        let mut direct: Vec<(usize, usize, C)> = Vec::new();
        let mut rmat = DMatrix::<C>::zeros(nq, nunk);
        for (i, &x) in nodes.iter().enumerate() {
            direct.push((i, i, ONE));
            for &t in &letters {
                let (tx, la) = act_circle(g.letter_matrix(t), x);
                let c = (e * la).exp();
                direct.push((i, points.len(), c));
                points.push(tx);
                let dt = disk_of(t);
                let r = barycentric_row(&cheb[dt].0, &cheb[dt].1, unwrap(dt, tx));
                for &s in &letters {
                    if s == -t {
                        continue;
                    }
                    let base = pair_index[&(s, t)] * p;
                    for (kk, rk) in r.iter().enumerate() {
                        rmat[(i, base + kk)] += c * *rk;
                    }
                }
            }
        }
        let np = points.len();
        let mut bmat = DMatrix::<C>::zeros(nunk, np);
        for (r, col, v) in b_entries {
            bmat[(r, col)] += v;
        }
        debug_assert!(np_solve <= np);
        let lu = a.lu();
        let q = lu.solve(&bmat).ok_or(Error::SingularParameter { lambda: -e - self.rho(), min_sv: 0.0 })?;
        let mut weights = &rmat * q;
        for (i, col, v) in direct {
            weights[(i, col)] += v;
        }
        Ok(Averager { points, weights })
    }

    /// Apply an averager to fine-grid columns; returns node values per column.
    fn average_columns(&self, av: &Averager, cols: &[Vec<C>]) -> DMatrix<C> {
        let rows = self.interp_rows(&av.points);
        let fp: Vec<Vec<C>> = cols.par_iter().map(|c| self.eval_points(&rows, c)).collect();
        let fmat = DMatrix::from_fn(av.points.len(), cols.len(), |i, j| fp[j][i]);
        &av.weights * fmat
    }
}

/// Cutoff and regularity data of a continued scattering matrix.
#[derive(Clone, Debug)]
pub struct Continuation {
    pub s_matrix: OperatorMatrix,
    /// Smallest singular value of `id + R₁`.
    pub min_sv: f64,
}

/// Fredholm indicator data at one parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Indicator {
    /// `log |det(id + R₁)|`.
    pub log_det: f64,
    pub min_sv: f64,
    pub max_sv: f64,
    /// Number of singular values below `1e-3 · max_sv`.
    pub rank_deficiency: usize,
}

impl<'g> ScatteringContext<'g> {
    fn check_parameter(&self, lam: C) -> Result<Vec<C>> {
        j_table(&self.param(lam), self.disc.fine_grid / 2 + 1)
    }

    /// Columns of `S_λ` from basis order `n_in` to `n_out`.
    pub fn s_direct_rect(&self, lam: C, n_out: usize, n_in: usize) -> Result<DMatrix<C>> {
        let table = self.check_parameter(lam)?;
        check_convergence(self.group, lam)?;
        let av = self.averager(-lam - self.rho())?;
        let basis = self.basis(n_in);
        let cols: Vec<Vec<C>> = (0..basis.dim())
            .into_par_iter()
            .map(|i| {
                let (c, m) = basis.label(i);
                let psi = self.lift(lam, c, m, false);
                apply_multiplier(&psi, |n| table[n.unsigned_abs() as usize])
            })
            .collect();
        let t = self.average_columns(&av, &cols);
        let out = self.basis(n_out);
        let mut s = DMatrix::<C>::zeros(out.dim(), basis.dim());
        for j in 0..basis.dim() {
            let col: Vec<C> = t.column(j).iter().cloned().collect();
            let coeffs = self.project(&col, -lam, n_out);
            for (i, v) in coeffs.into_iter().enumerate() {
                s[(i, j)] = v;
            }
        }
        Ok(s)
    }

    /// Columns of the cutoff intertwiner `J̃_λ` from order `n_in` to `n_out`.
    pub fn j_tilde_rect(&self, lam: C, chi: &CutoffField, n_out: usize, n_in: usize) -> Result<DMatrix<C>> {
        let table = self.check_parameter(lam)?;
        let basis = self.basis(n_in);
        let nodes = &self.grid.nodes;
        let node_theta: Vec<f64> = nodes.iter().map(|n| n.theta).collect();
        let rows = self.interp_rows(&node_theta);
        let m = self.disc.fine_grid;
        // smooth far part (1 − χ) K on the support of the collar bump
        let support: Vec<usize> = (0..m)
            .filter(|&j| self.fine[j].is_some_and(|p| self.collar_bump(&p.chart) > 0.0))
            .collect();
        let corr: Option<DMatrix<C>> = if self.chart.is_trivial() {
            None
        } else {
            let node_charts: Vec<(usize, f64)> = nodes.iter().map(|n| (n.circle, n.s)).collect();
            let data: Vec<C> = (0..nodes.len())
                .into_par_iter()
                .flat_map_iter(|i| {
                    let (cx, sx) = node_charts[i];
                    let tx = node_theta[i];
                    support.iter().map(move |&j| {
                        let p = self.fine[j].unwrap();
                        let ty = 2.0 * PI * j as f64 / m as f64;
                        let chord = 2.0 * (0.5 * (tx - ty)).sin().abs();
                        let chi_v = if chord > chi.epsilon || p.circle != cx {
                            0.0
                        } else {
                            let d = (sx - p.s).rem_euclid(1.0);
                            chi.profile(d.min(1.0 - d))
                        };
                        if chi_v >= 1.0 {
                            ZERO
                        } else {
                            j_kernel(lam, tx - ty) * ((1.0 - chi_v) / m as f64)
                        }
                    })
                })
                .collect();
            Some(DMatrix::from_row_slice(nodes.len(), support.len(), &data))
        };
        let cols: Vec<Vec<C>> = (0..basis.dim())
            .into_par_iter()
            .map(|i| {
                let (c, mo) = basis.label(i);
                let psi = self.lift(lam, c, mo, true);
                let jpsi = apply_multiplier(&psi, |n| table[n.unsigned_abs() as usize]);
                let mut vals = self.eval_points(&rows, &jpsi);
                if let Some(k) = &corr {
                    let ps = nalgebra::DVector::from_iterator(support.len(), support.iter().map(|&j| psi[j]));
                    let cv = k * ps;
                    for (v, c) in vals.iter_mut().zip(cv.iter()) {
                        *v -= c;
                    }
                }
                self.project(&vals, -lam, n_out)
            })
            .collect();
        let out = self.basis(n_out);
        Ok(DMatrix::from_fn(out.dim(), basis.dim(), |i, j| cols[j][i]))
    }

    /// `id + R₁ = J̃_{λ_w} S_{−λ_w}` on order `n` (inner order `2n`).
    fn fredholm_matrix(&self, lam_w: C, n: usize) -> Result<(DMatrix<C>, DMatrix<C>)> {
        let s = self.s_direct_rect(-lam_w, 2 * n, n)?;
        let jt = self.j_tilde_rect(lam_w, &self.cutoff, n, 2 * n)?;
        let p = &jt * &s;
        let idx = self.basis(n).embed_into(&self.basis(2 * n));
        let jt_n = DMatrix::from_fn(p.nrows(), idx.len(), |i, j| jt[(i, idx[j])]);
        Ok((p, jt_n))
    }

    /// Continued `S_{λ_w} = (id + R₁)⁻¹ J̃_{λ_w}` on order `n`.
    pub fn continue_rect(&self, lam_w: C, n: usize) -> Result<Continuation> {
        let (p, jt) = self.fredholm_matrix(lam_w, n)?;
        let sv = p.clone().svd(false, false).singular_values;
        let min_sv = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_sv < 1e-10 {
            return Err(Error::SingularParameter { lambda: lam_w, min_sv });
        }
        let x = p.lu().solve(&jt).ok_or(Error::SingularParameter { lambda: lam_w, min_sv })?;
        Ok(Continuation {
            s_matrix: OperatorMatrix { entries: x, basis: self.basis(n), lam: self.param(lam_w) },
            min_sv,
        })
    }

    pub fn indicator(&self, lam_w: C, n: usize) -> Result<Indicator> {
        let (p, _) = self.fredholm_matrix(lam_w, n)?;
        let sv = p.clone().svd(false, false).singular_values;
        let max_sv = sv.iter().cloned().fold(0.0, f64::max);
        let min_sv = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let rank_deficiency = sv.iter().filter(|&&v| v < 1e-3 * max_sv).count();
        let log_det = p.lu().determinant().norm().ln();
        Ok(Indicator { log_det, min_sv, max_sv, rank_deficiency })
    }

    /// Whether `S_λ` is in the direct region, with a safety margin.
    pub fn direct_ok(&self, lam: C, margin: f64) -> bool {
        check_convergence(self.group, lam - margin).is_ok()
    }

    /// `S_λ` from order `n_in` to `n_out`, directly or by continuation.
    pub fn s_any_rect(&self, lam: C, n_out: usize, n_in: usize, margin: f64) -> Result<DMatrix<C>> {
        if self.direct_ok(lam, margin) {
            return self.s_direct_rect(lam, n_out, n_in);
        }
        let n = n_out.max(n_in);
        let x = self.continue_rect(lam, n)?.s_matrix.entries;
        let big = self.basis(n);
        let ro = self.basis(n_out).embed_into(&big);
        let ci = self.basis(n_in).embed_into(&big);
        Ok(DMatrix::from_fn(ro.len(), ci.len(), |i, j| x[(ro[i], ci[j])]))
    }
}

/// `χ` with `ε` a quarter of the minimal displacement.
pub fn chi_cutoff(ctx: &ScatteringContext<'_>, lcheck: usize) -> Result<CutoffField> {
    if ctx.group.is_trivial() {
        return Ok(ctx.cutoff);
    }
    let epsilon = min_displacement(ctx.group, lcheck)? / 4.0;
    let scale = epsilon / ctx.cutoff.epsilon;
    Ok(CutoffField { epsilon, epsilon_s: ctx.cutoff.epsilon_s * scale.min(1.0), smoothstep_order: 2 })
}

/// Evaluate χ between two boundary points of F ∪ collars.
pub fn chi_value(ctx: &ScatteringContext<'_>, chi: &CutoffField, x: f64, y: f64) -> f64 {
    if ctx.group.is_trivial() {
        return 1.0;
    }
    let chord = 2.0 * (0.5 * (x - y)).sin().abs();
    if chord > chi.epsilon {
        return 0.0;
    }
    match (ctx.chart.classify(x), ctx.chart.classify(y)) {
        (Some(p), Some(q)) => {
            let (cp, sp) = ctx.chart.circle_coord(&p);
            let (cq, sq) = ctx.chart.circle_coord(&q);
            if cp != cq {
                return 0.0;
            }
            let d = (sp - sq).rem_euclid(1.0);
            chi.profile(d.min(1.0 - d))
        }
        _ => 0.0,
    }
}

/// Matrix of `S_λ` on the basis of order `disc.fourier_order`.
pub fn s_direct(ctx: &ScatteringContext<'_>, lam: &SpectralParam) -> Result<OperatorMatrix> {
    let n = ctx.disc.fourier_order;
    Ok(OperatorMatrix { entries: ctx.s_direct_rect(lam.lambda, n, n)?, basis: ctx.basis(n), lam: *lam })
}

/// Matrix of the cutoff intertwiner `J̃_λ`.
pub fn j_tilde(ctx: &ScatteringContext<'_>, lam: &SpectralParam, chi: &CutoffField) -> Result<OperatorMatrix> {
    let n = ctx.disc.fourier_order;
    Ok(OperatorMatrix { entries: ctx.j_tilde_rect(lam.lambda, chi, n, n)?, basis: ctx.basis(n), lam: *lam })
}

/// Continued scattering matrix at `λ_w` from the direct one at `−λ_w`.
pub fn continue_s_inverse(ctx: &ScatteringContext<'_>, lam_w: &SpectralParam) -> Result<Continuation> {
    ctx.continue_rect(lam_w.lambda, ctx.disc.fourier_order)
}

/// `log |det(id + R₁(λ))|` on the truncated basis.
pub fn fredholm_indicator(ctx: &ScatteringContext<'_>, lam: &SpectralParam) -> Result<Indicator> {
    ctx.indicator(lam.lambda, ctx.disc.fourier_order)
}

/// `‖S_{−λ} S_λ − id‖₂` on the truncated basis (inner order doubled).
pub fn verify_funeq(ctx: &ScatteringContext<'_>, lam: &SpectralParam, margin: f64) -> Result<f64> {
    if is_bad(lam) {
        return Err(Error::BadPoint { lambda: lam.lambda });
    }
    let n = ctx.disc.fourier_order;
    let a = ctx.s_any_rect(lam.lambda, 2 * n, n, margin)?;
    let b = ctx.s_any_rect(-lam.lambda, n, 2 * n, margin)?;
    let mut r = &b * &a;
    for i in 0..r.nrows() {
        r[(i, i)] -= ONE;
    }
    Ok(r.svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max))
}
