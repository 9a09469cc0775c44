//! Poisson transforms and Eisenstein series `E(λ, φ) = P_λ ∘ ext(φ)`,
//! with their continuation, the eigen-equation check, the functional
//! equation, and resonance scans.

use crate::error::{Error, Result};
use crate::extension::{average_fn, pair_quotient, BoundarySection, Domain};
use crate::intertwine::{c_gamma, c_minimal, j_table, weyl_phase};
use crate::lie_core::{act_circle, disk_point_element, is_bad, weyl_reflect, SpectralParam};
use crate::numerics::{apply_multiplier, fourier_coefficients, fourier_synthesis, PeriodicInterp};
use crate::scattering::{continue_s_inverse, fredholm_indicator, ScatteringContext};
use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

/// A point of the unit-disk model of H².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteriorPoint {
    pub z: C,
}

impl InteriorPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let z = C::new(x, y);
        if !(z.norm() < 1.0) {
            return Err(Error::InvalidConfiguration(format!("interior point {z} outside the unit disk")));
        }
        Ok(Self { z })
    }

    pub fn origin() -> Self {
        Self { z: C::new(0.0, 0.0) }
    }

    /// `g_z⁻¹` as a real matrix, with `g_z · o = z`.
    fn inverse_matrix(&self) -> [[f64; 2]; 2] {
        disk_point_element(self.z).inverse().real_matrix().expect("rank-two element")
    }

    fn offset(&self, dx: f64, dy: f64) -> Result<Self> {
        Self::new(self.z.re + dx, self.z.im + dy)
    }
}

/// A value of E with its provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EisensteinValue {
    pub value: C,
    pub lam: SpectralParam,
    pub ktype: i64,
    pub via_continuation: bool,
    /// Smallest singular value of `id + R₁` when continued.
    pub min_sv: Option<f64>,
}

/// The Poisson integrand `k ↦ a(g_z⁻¹k)^{−(λ+ρ)} γ(κ(g_z⁻¹k))`, a test
/// section of weight −λ.
#[derive(Clone, Copy, Debug)]
struct PoissonKernel {
    ginv: [[f64; 2]; 2],
    exponent: C,
    ktype: i64,
    sup: f64,
}

impl PoissonKernel {
    fn new(lam: C, rho: f64, ktype: i64, z: &InteriorPoint) -> Self {
        let r = z.z.norm();
        let ginv = z.inverse_matrix();
        let exponent = -(lam + rho);
        let sup = ((1.0 + r) / (1.0 - r)).powf(exponent.re.abs());
        Self { ginv, exponent, ktype, sup }
    }

    fn eval(&self, theta: f64) -> C {
        let (t2, la) = act_circle(&self.ginv, theta);
        (self.exponent * la).exp() * C::from_polar(1.0, self.ktype as f64 * t2)
    }
}

/// Quadrature size resolving the Poisson kernel at radius `r`.
fn kernel_nodes(r: f64, min: usize) -> usize {
    ((40.0 / (1.0 - r)).ceil() as usize).max(min).next_power_of_two()
}

/// Trigonometric resampling of uniform periodic samples to `q ≥ len` nodes.
fn resample(samples: &[C], q: usize) -> Vec<C> {
    let m = samples.len();
    if q == m {
        return samples.to_vec();
    }
    let c = fourier_coefficients(samples);
    let mut padded = vec![C::new(0.0, 0.0); q];
    let half = (m - 1) / 2;
    for k in 0..=half {
        padded[k] = c[k];
        if k > 0 {
            padded[q - k] = c[m - k];
        }
    }
    fourier_synthesis(&padded)
}

/// `P^γ_λ f(g_z) = ∫_K a(g_z⁻¹k)^{−(λ+ρ)} γ(κ(g_z⁻¹k)) f(k) dk`, trapezoid rule
/// over the probability measure on K.
pub fn poisson_transform(f: &BoundarySection, lam: &SpectralParam, ktype: i64, z: &InteriorPoint) -> Result<C> {
    if !f.is_full() {
        return Err(Error::DomainMismatch("the Poisson transform needs a full-circle section".into()));
    }
    let q = kernel_nodes(z.z.norm(), f.samples.len());
    let values = resample(&f.samples, q);
    let p = PoissonKernel::new(lam.lambda, lam.rho(), ktype, z);
    let sum: C = values.iter().enumerate().map(|(j, v)| p.eval(2.0 * PI * j as f64 / q as f64) * v).sum();
    Ok(sum / q as f64)
}

/// Direct `E(λ, φ)(z) = ⟨φ, avg(p_{λ,z})⟩` for `Re λ > δ_Γ`.
pub fn eisenstein_direct(
    ctx: &ScatteringContext<'_>,
    phi: &BoundarySection,
    ktype: i64,
    z: &InteriorPoint,
    l: usize,
    tol: f64,
) -> Result<EisensteinValue> {
    let grid = match &phi.domain {
        Domain::Quotient(g) => g.clone(),
        Domain::Full => return Err(Error::DomainMismatch("φ must be a section over B".into())),
    };
    let lam = phi.lam;
    let p = PoissonKernel::new(lam.lambda, ctx.rho(), ktype, z);
    let nu = -lam.lambda;
    let samples = average_fn(ctx.group, &grid, nu, |t| p.eval(t), p.sup, l, tol)?;
    let psi = BoundarySection {
        samples,
        lam: weyl_reflect(&lam),
        fourier_order: phi.fourier_order,
        domain: Domain::Quotient(grid),
    };
    Ok(EisensteinValue { value: pair_quotient(phi, &psi)?, lam, ktype, via_continuation: false, min_sv: None })
}

/// Continued `E(λ, φ)(z) = ⟨S_λ φ, avg(J_{−λ} p_{λ,z})⟩` for `Re(−λ) > δ_Γ`.
pub fn eisenstein_continued(
    ctx: &ScatteringContext<'_>,
    phi: &BoundarySection,
    ktype: i64,
    z: &InteriorPoint,
    l: usize,
    tol: f64,
) -> Result<EisensteinValue> {
    let grid = match &phi.domain {
        Domain::Quotient(g) => g.clone(),
        Domain::Full => return Err(Error::DomainMismatch("φ must be a section over B".into())),
    };
    let lam = phi.lam;
    let rho = ctx.rho();
    let cont = continue_s_inverse(ctx, &lam)?;
    let coeffs = DVector::from_vec(phi.quotient_modes(rho, ctx.disc.fourier_order)?);
    let psi_coeffs: Vec<C> = (&cont.s_matrix.entries * coeffs).iter().cloned().collect();
    let psi = BoundarySection::quotient_from_modes(&grid, rho, weyl_reflect(&lam), &psi_coeffs);
    // J_{−λ} p on a fine grid, then local interpolation inside the word sum
    let p = PoissonKernel::new(lam.lambda, rho, ktype, z);
    let q = kernel_nodes(z.z.norm(), 4096);
    let samples: Vec<C> = (0..q).map(|j| p.eval(2.0 * PI * j as f64 / q as f64)).collect();
    let table = j_table(&weyl_reflect(&lam), q / 2 + 1)?;
    let jp = apply_multiplier(&samples, |n| table[n.unsigned_abs() as usize]);
    let sup = jp.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let interp = PeriodicInterp::new(16);
    let avg = average_fn(ctx.group, &grid, lam.lambda, |t| interp.eval(&jp, t), sup, l, tol)?;
    let avg = BoundarySection { samples: avg, lam, fourier_order: phi.fourier_order, domain: Domain::Quotient(grid) };
    Ok(EisensteinValue {
        value: pair_quotient(&psi, &avg)?,
        lam,
        ktype,
        via_continuation: true,
        min_sv: Some(cont.min_sv),
    })
}

/// E by the direct definition where it converges (with `margin`), by
/// continuation otherwise.
pub fn eisenstein(
    ctx: &ScatteringContext<'_>,
    phi: &BoundarySection,
    ktype: i64,
    z: &InteriorPoint,
    l: usize,
    tol: f64,
    margin: f64,
) -> Result<EisensteinValue> {
    if ctx.direct_ok(phi.lam.lambda, margin) {
        eisenstein_direct(ctx, phi, ktype, z, l, tol)
    } else {
        eisenstein_continued(ctx, phi, ktype, z, l, tol)
    }
}

/// Geometer's Laplacian `−(1−|z|²)²/4 · (∂²_x + ∂²_y)` by the 5-point stencil.
fn laplacian<F>(e: F, z: &InteriorPoint, h: f64) -> Result<(C, C)>
where
    F: Fn(&InteriorPoint) -> Result<C> + Sync,
{
    let pts = [(0.0, 0.0), (h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)];
    let vals: Vec<C> = pts.par_iter().map(|&(dx, dy)| e(&z.offset(dx, dy)?)).collect::<Result<_>>()?;
    let flat = (vals[1] + vals[2] + vals[3] + vals[4] - 4.0 * vals[0]) / (h * h);
    let conf = (1.0 - z.z.norm_sqr()).powi(2) / 4.0;
    Ok((vals[0], -conf * flat))
}

/// Relative residual `|Δ_X E − (ρ² − λ²) E| / |E|` at `z` with stencil step `h`
/// (scalar K-type).
pub fn pde_residual(
    ctx: &ScatteringContext<'_>,
    phi: &BoundarySection,
    z: &InteriorPoint,
    h: f64,
    l: usize,
    tol: f64,
    margin: f64,
) -> Result<f64> {
    if z.z.norm() + h > 0.95 {
        return Err(Error::InvalidConfiguration("stencil must stay within |z| ≤ 0.95".into()));
    }
    let lam = phi.lam.lambda;
    let (e0, lap) = laplacian(|w| Ok(eisenstein(ctx, phi, 0, w, l, tol, margin)?.value), z, h)?;
    if e0.norm() < 1e-12 {
        return Err(Error::UndefinedResidual { magnitude: e0.norm() });
    }
    let rho = ctx.rho();
    Ok((lap - (rho * rho - lam * lam) * e0).norm() / e0.norm())
}

/// Same residual for a plain Poisson transform (no group).
pub fn poisson_pde_residual(f: &BoundarySection, lam: &SpectralParam, z: &InteriorPoint, h: f64) -> Result<f64> {
    let (e0, lap) = laplacian(|w| poisson_transform(f, lam, 0, w), z, h)?;
    if e0.norm() < 1e-12 {
        return Err(Error::UndefinedResidual { magnitude: e0.norm() });
    }
    let rho = lam.rho();
    Ok((lap - (rho * rho - lam.lambda * lam.lambda) * e0).norm() / e0.norm())
}

/// Residual of `c(λ) E(λ, S_{−λ}φ) = γ(m_w) c_γ(λ) E(−λ, φ)` at `z`, for φ of
/// weight `−λ`, normalized by the larger side.
pub fn verify_eis_funeq(
    ctx: &ScatteringContext<'_>,
    phi: &BoundarySection,
    ktype: i64,
    z: &InteriorPoint,
    l: usize,
    tol: f64,
    margin: f64,
) -> Result<f64> {
    let lam = weyl_reflect(&phi.lam);
    if is_bad(&lam) {
        return Err(Error::BadPoint { lambda: lam.lambda });
    }
    let cw = c_minimal(&lam);
    let cg = c_gamma(&lam, ktype);
    if cw.pole_flag || cg.pole_flag {
        return Err(Error::BadPoint { lambda: lam.lambda });
    }
    let grid = match &phi.domain {
        Domain::Quotient(g) => g.clone(),
        Domain::Full => return Err(Error::DomainMismatch("φ must be a section over B".into())),
    };
    let n = ctx.disc.fourier_order;
    let rho = ctx.rho();
    let s = ctx.s_any_rect(phi.lam.lambda, n, n, margin)?;
    let coeffs = DVector::from_vec(phi.quotient_modes(rho, n)?);
    let psi_coeffs: Vec<C> = (&s * coeffs).iter().cloned().collect();
    let psi = BoundarySection::quotient_from_modes(&grid, rho, lam, &psi_coeffs);
    let lhs = cw.value * eisenstein(ctx, &psi, ktype, z, l, tol, margin)?.value;
    let rhs = weyl_phase(ktype) * cg.value * eisenstein(ctx, phi, ktype, z, l, tol, margin)?.value;
    Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
}

/// One point of a resonance scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub lam: C,
    pub indicator: f64,
    pub min_sv: f64,
    pub rank_deficiency: usize,
    /// `ok`, or the error name when the indicator could not be evaluated.
    pub flag: String,
}

/// A refined dip of the indicator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dip {
    pub lam: C,
    pub indicator: f64,
    pub rank_deficiency: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanTable {
    pub points: Vec<ScanPoint>,
    pub dips: Vec<Dip>,
}

/// Rectangle `[re.0, re.1] × [im.0, im.1]` with `steps` points per side
/// (a single point when the side is degenerate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanGrid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub steps: (usize, usize),
}

impl ScanGrid {
    fn axis(range: (f64, f64), steps: usize) -> Vec<f64> {
        if steps <= 1 || range.0 == range.1 {
            return vec![range.0];
        }
        (0..steps).map(|k| range.0 + (range.1 - range.0) * k as f64 / (steps - 1) as f64).collect()
    }

    pub fn points(&self) -> (Vec<f64>, Vec<f64>) {
        (Self::axis(self.re, self.steps.0), Self::axis(self.im, self.steps.1))
    }
}

fn scan_point(ctx: &ScatteringContext<'_>, lam: C) -> ScanPoint {
    let p = SpectralParam::new(lam, ctx.group.rank);
    match fredholm_indicator(ctx, &p) {
        Ok(i) => ScanPoint {
            lam,
            indicator: i.log_det,
            min_sv: i.min_sv,
            rank_deficiency: i.rank_deficiency,
            flag: if i.min_sv < 1e-10 { "singular-parameter".into() } else { "ok".into() },
        },
        Err(e) => ScanPoint { lam, indicator: f64::NAN, min_sv: f64::NAN, rank_deficiency: 0, flag: e.name().into() },
    }
}

/// Golden-section minimization of the indicator on the real interval `[a, b]`.
fn golden_refine(ctx: &ScatteringContext<'_>, mut a: f64, mut b: f64, tol: f64) -> ScanPoint {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let eval = |x: f64| scan_point(ctx, C::new(x, 0.0));
    let val = |p: &ScanPoint| if p.indicator.is_nan() { f64::INFINITY } else { p.indicator };
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut pc, mut pd) = rayon::join(|| eval(c), || eval(d));
    while b - a > tol {
        if val(&pc) < val(&pd) {
            b = d;
            d = c;
            pd = pc;
            c = b - r * (b - a);
            pc = eval(c);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + r * (b - a);
            pd = eval(d);
        }
    }
    if val(&pc) < val(&pd) {
        pc
    } else {
        pd
    }
}

/// Fredholm indicator over a grid of continuation parameters, with dips
/// (strict local minima along each row) refined on the real axis.
pub fn resonance_scan(ctx: &ScatteringContext<'_>, grid: &ScanGrid, refine_tol: f64) -> ScanTable {
    let (res, ims) = grid.points();
    let lams: Vec<C> = ims.iter().flat_map(|&y| res.iter().map(move |&x| C::new(x, y))).collect();
    let points: Vec<ScanPoint> = lams.par_iter().map(|&l| scan_point(ctx, l)).collect();
    let nx = res.len();
    let mut dips = Vec::new();
    for (row, &y) in ims.iter().enumerate() {
        let r = &points[row * nx..(row + 1) * nx];
        for i in 1..nx.saturating_sub(1) {
            let (a, b, c) = (r[i - 1].indicator, r[i].indicator, r[i + 1].indicator);
            if !(b < a - 1e-8 && b < c - 1e-8) {
                continue;
            }
            let best = if y == 0.0 {
                golden_refine(ctx, res[i - 1], res[i + 1], refine_tol)
            } else {
                r[i].clone()
            };
            dips.push(Dip { lam: best.lam, indicator: best.indicator, rank_deficiency: best.rank_deficiency });
        }
    }
    ScanTable { points, dips }
}
