//! Boundary sections, the twisted Γ-action, averaging, and the extension
//! pairing `⟨ext φ, f⟩ = ⟨φ, f̄⟩`.

use crate::error::{Error, Result};
use crate::intertwine::j_apply;
use crate::scattering::{continue_s_inverse, ScatteringContext};
use crate::lie_core::{act_circle, weyl_reflect, GroupElement, SpectralParam};
use crate::numerics::{fourier_coefficients, fourier_synthesis, signed_index, trig_interp, PeriodicInterp};
use crate::poincare::{check_convergence, orbit_dfs};
use crate::quotient::{QuotientChart, QuotientGrid};
use crate::schottky::SchottkyData;
use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// Where the samples of a section live.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Uniform nodes `2πj/M` on the whole circle.
    Full,
    /// Nodes uniform in ŝ on the circles of B.
    Quotient(Arc<QuotientGrid>),
}

/// A sampled section of weight `lam`.
///
/// Full-domain samples are values at `θ_j = 2πj/M`. Quotient samples are
/// the section values `u = ŵ^{(ρ−λ)/2ρ} v` at the grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySection {
    pub samples: Vec<Complex64>,
    pub lam: SpectralParam,
    pub fourier_order: usize,
    pub domain: Domain,
}

impl BoundarySection {
    /// Sample `f` at `m` uniform nodes of the circle.
    pub fn full_from_fn<F: Fn(f64) -> Complex64>(m: usize, lam: SpectralParam, f: F) -> Self {
        let samples = (0..m).map(|j| f(2.0 * PI * j as f64 / m as f64)).collect();
        Self { samples, lam, fourier_order: (m - 1) / 2, domain: Domain::Full }
    }

    /// The character `e^{inθ}` on the full circle.
    pub fn full_mode(m: usize, lam: SpectralParam, n: i64) -> Self {
        Self::full_from_fn(m, lam, |t| Complex64::from_polar(1.0, n as f64 * t))
    }

    /// Quotient section with trivialized values `v(circle, ŝ)`.
    pub fn quotient_from_fn<F: Fn(usize, f64) -> Complex64>(
        grid: &Arc<QuotientGrid>,
        rho: f64,
        lam: SpectralParam,
        f: F,
    ) -> Self {
        let k = (rho - lam.lambda) / (2.0 * rho);
        let samples = grid.nodes.iter().map(|n| f(n.circle, n.s) * (k * n.w_hat.ln()).exp()).collect();
        Self { samples, lam, fourier_order: (grid.per_circle - 1) / 2, domain: Domain::Quotient(grid.clone()) }
    }

    /// Quotient section from Fourier coefficients in ŝ, circle-major with
    /// modes `−order..=order`.
    pub fn quotient_from_modes(grid: &Arc<QuotientGrid>, rho: f64, lam: SpectralParam, coeffs: &[Complex64]) -> Self {
        let circles = grid.nodes.last().map_or(0, |n| n.circle + 1);
        let width = coeffs.len() / circles.max(1);
        let order = (width - 1) / 2;
        let mut s = Self::quotient_from_fn(grid, rho, lam, |c, x| {
            (0..width)
                .map(|i| coeffs[c * width + i] * Complex64::from_polar(1.0, 2.0 * PI * (i as f64 - order as f64) * x))
                .sum()
        });
        s.fourier_order = order;
        s
    }

    pub fn is_full(&self) -> bool {
        matches!(self.domain, Domain::Full)
    }

    fn grid(&self) -> Result<&Arc<QuotientGrid>> {
        match &self.domain {
            Domain::Quotient(g) => Ok(g),
            Domain::Full => Err(Error::DomainMismatch("expected a section over B".into())),
        }
    }

    /// Trivialized values `v` of a quotient section.
    pub fn trivialized(&self, rho: f64) -> Result<Vec<Complex64>> {
        let g = self.grid()?;
        let k = (rho - self.lam.lambda) / (2.0 * rho);
        Ok(self.samples.iter().zip(&g.nodes).map(|(u, n)| u * (-k * n.w_hat.ln()).exp()).collect())
    }

    /// Fourier coefficients in ŝ of a quotient section, circle-major with
    /// modes `−order..=order`.
    pub fn quotient_modes(&self, rho: f64, order: usize) -> Result<Vec<Complex64>> {
        let g = self.grid()?;
        let v = self.trivialized(rho)?;
        let ns = g.per_circle;
        let mut out = Vec::new();
        for chunk in v.chunks(ns) {
            let c = fourier_coefficients(chunk);
            for n in -(order as i64)..=(order as i64) {
                out.push(c[n.rem_euclid(ns as i64) as usize]);
            }
        }
        Ok(out)
    }

    /// `a·self + b·other` (same domain and weight).
    pub fn combine(&self, a: Complex64, other: &BoundarySection, b: Complex64) -> Result<BoundarySection> {
        if self.domain != other.domain || self.samples.len() != other.samples.len() {
            return Err(Error::DomainMismatch("sections on different nodes".into()));
        }
        let samples = self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect();
        Ok(BoundarySection { samples, ..self.clone() })
    }
}

/// Trigonometric interpolant of a full-domain section.
pub struct FullInterpolant {
    coeffs: Vec<Complex64>,
    fine: Vec<Complex64>,
    local: PeriodicInterp,
}

impl FullInterpolant {
    pub fn new(f: &BoundarySection) -> Result<Self> {
        if !f.is_full() {
            return Err(Error::DomainMismatch("expected a full-circle section".into()));
        }
        let coeffs = fourier_coefficients(&f.samples);
        // 8× zero-padded samples make local interpolation spectrally accurate
        let m = coeffs.len();
        let q = (8 * m).max(4096).next_power_of_two();
        let mut padded = vec![Complex64::new(0.0, 0.0); q];
        for (k, c) in coeffs.iter().enumerate() {
            let n = signed_index(k, m);
            if m.is_multiple_of(2) && k == m / 2 {
                padded[k] += 0.5 * c;
                padded[q - k] += 0.5 * c;
            } else {
                padded[n.rem_euclid(q as i64) as usize] = *c;
            }
        }
        let fine = fourier_synthesis(&padded);
        Ok(Self { coeffs, fine, local: PeriodicInterp::new(16) })
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.local.eval(&self.fine, theta)
    }

    /// Exact trigonometric interpolant.
    pub fn eval_exact(&self, theta: f64) -> Complex64 {
        trig_interp(&self.coeffs, theta)
    }

    pub fn sup_bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// `(π(g) f)(k) = a(g⁻¹k)^{ν−ρ} f(κ(g⁻¹k))` for a section `f` of weight ν,
/// resampled at the original nodes.
pub fn twisted_act(g: &GroupElement, f: &BoundarySection) -> Result<BoundarySection> {
    let ip = FullInterpolant::new(f)?;
    let m = g.inverse().real_matrix().ok_or_else(|| Error::DomainMismatch("circle sections need real elements".into()))?;
    let e = f.lam.lambda - f.lam.rho();
    let n = f.samples.len();
    let samples = (0..n)
        .into_par_iter()
        .map(|j| {
            let (t, la) = act_circle(&m, 2.0 * PI * j as f64 / n as f64);
            (e * la).exp() * ip.eval(t)
        })
        .collect();
    Ok(BoundarySection { samples, ..f.clone() })
}

/// Values at the grid nodes of `Σ_h a(h k_x)^{ν−ρ} f(h x)`, the average of a
/// function of weight ν given pointwise with sup bound `sup`.
pub fn average_fn<F>(
    g: &SchottkyData,
    grid: &QuotientGrid,
    nu: Complex64,
    f: F,
    sup: f64,
    l: usize,
    tol: f64,
) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    check_convergence(g, -nu)?;
    let e = nu - g.rank.rho();
    let log_cut = if e.re < 0.0 { (tol / sup.max(1e-300)).ln() / e.re } else { 0.0 };
    Ok(grid
        .nodes
        .par_iter()
        .map(|node| {
            let mut acc = Complex64::new(0.0, 0.0);
            orbit_dfs(g, node.theta, l, log_cut, |p| acc += (e * p.log_a).exp() * f(p.theta));
            acc
        })
        .collect())
}

/// The averaged section `f̄ = Σ_γ π(γ) f` restricted to B.
pub fn average(
    g: &SchottkyData,
    grid: &Arc<QuotientGrid>,
    f: &BoundarySection,
    l: usize,
    tol: f64,
) -> Result<BoundarySection> {
    let ip = FullInterpolant::new(f)?;
    let samples = average_fn(g, grid, f.lam.lambda, |t| ip.eval(t), ip.sup_bound(), l, tol)?;
    Ok(BoundarySection {
        samples,
        lam: f.lam,
        fourier_order: f.fourier_order,
        domain: Domain::Quotient(grid.clone()),
    })
}

/// `⟨φ, ψ⟩_B` for quotient sections of opposite weights.
pub fn pair_quotient(phi: &BoundarySection, psi: &BoundarySection) -> Result<Complex64> {
    let grid = phi.grid()?;
    if psi.grid()? != grid {
        return Err(Error::DomainMismatch("sections on different quotient grids".into()));
    }
    if (phi.lam.lambda + psi.lam.lambda).norm() > 1e-12 {
        return Err(Error::DomainMismatch("pairing needs opposite weights".into()));
    }
    let ns = grid.per_circle as f64;
    Ok(phi.samples.iter().zip(&psi.samples).zip(&grid.nodes).map(|((a, b), n)| a * b / n.w_hat).sum::<Complex64>() / ns)
}

/// `⟨ext φ, f⟩ = ⟨φ, f̄⟩` for φ over B of weight λ and f on the circle of
/// weight −λ.
pub fn ext_pair(g: &SchottkyData, phi: &BoundarySection, f: &BoundarySection, l: usize, tol: f64) -> Result<Complex64> {
    let grid = phi.grid()?.clone();
    if !f.is_full() {
        return Err(Error::DomainMismatch("test function must live on the full circle".into()));
    }
    if (phi.lam.lambda + f.lam.lambda).norm() > 1e-12 {
        return Err(Error::DomainMismatch("test function must have the dual weight".into()));
    }
    let fbar = average(g, &grid, f, l, tol)?;
    pair_quotient(phi, &fbar)
}

/// The continued extension paired against `f`: `⟨J_{−λ} ∘ ext ∘ S_λ(φ), f⟩`
/// for `Re(−λ) > δ_Γ`, with `S_λ` from the Fredholm continuation on the
/// basis of `ctx`.
pub fn ext_continued_pair(
    ctx: &ScatteringContext<'_>,
    phi: &BoundarySection,
    f: &BoundarySection,
    l: usize,
    tol: f64,
) -> Result<Complex64> {
    let grid = phi.grid()?.clone();
    if !f.is_full() {
        return Err(Error::DomainMismatch("test function must live on the full circle".into()));
    }
    if (phi.lam.lambda + f.lam.lambda).norm() > 1e-12 {
        return Err(Error::DomainMismatch("test function must have the dual weight".into()));
    }
    let rho = ctx.rho();
    let lam = phi.lam;
    let s = continue_s_inverse(ctx, &lam)?.s_matrix.entries;
    let coeffs = DVector::from_vec(phi.quotient_modes(rho, ctx.disc.fourier_order)?);
    let psi_coeffs: Vec<Complex64> = (&s * coeffs).iter().cloned().collect();
    let psi = BoundarySection::quotient_from_modes(&grid, rho, weyl_reflect(&lam), &psi_coeffs);
    // ⟨J u, f⟩ = ⟨u, J f⟩: the kernel of J is symmetric
    let jf = j_apply(f, &f.lam)?;
    ext_pair(ctx.group, &psi, &jf, l, tol)
}

pub fn quotient_grid(chart: &QuotientChart, per_circle: usize) -> Arc<QuotientGrid> {
    Arc::new(chart.grid(per_circle))
}
