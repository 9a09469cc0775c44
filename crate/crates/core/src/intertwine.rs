//! Knapp–Stein intertwiners in the compact picture and their c-functions.
//!
//! With the section convention `π^ν(g)f(k) = a(g⁻¹k)^{ν−ρ} f(κ(g⁻¹k))`,
//! the unnormalized intertwiner Ĵ_λ maps weight λ to weight −λ; its
//! integral kernel `|sin((θ−θ')/2)|^{-1-2λ}` is integrable for Re λ < 0.
//! On the character `e^{inθ}` it acts by `ĵ_n(λ) = c(−λ) j_n(λ)` with
//! `j_n(λ) = Π_{k=1}^{|n|} (k − 1/2 + λ)/(k − 1/2 − λ)`, and the normalized
//! operator `J_λ = Ĵ_λ / c(−λ)` acts by `j_n(λ)`.

use crate::error::{Error, Result};
use crate::extension::{BoundarySection, Domain};
use crate::lie_core::SpectralParam;
use crate::numerics::{apply_multiplier, tanh_sinh};
use crate::special::{distance_to_pole, gamma, rgamma};
use num_complex::Complex64;
use std::f64::consts::PI;

const POLE_TOL: f64 = 1e-8;

/// A c-function value with its pole flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CFunctionValue {
    pub value: Complex64,
    pub lam: SpectralParam,
    pub pole_flag: bool,
}

fn near_pole(z: Complex64) -> bool {
    distance_to_pole(z).is_some_and(|d| d < POLE_TOL)
}

/// `c(λ) = ∫_R (1+x²)^{-(λ+1/2)} dx = √π Γ(λ)/Γ(λ+1/2)`.
pub fn c_minimal(lam: &SpectralParam) -> CFunctionValue {
    let l = lam.lambda;
    let pole_flag = near_pole(l);
    let value = if pole_flag { Complex64::new(f64::INFINITY, 0.0) } else { PI.sqrt() * gamma(l) * rgamma(l + 0.5) };
    CFunctionValue { value, lam: *lam, pole_flag }
}

/// `c(λ)` by tanh–sinh quadrature of `∫ cos^{2λ−1}φ dφ` over (−π/2, π/2);
/// requires Re λ > 0.
pub fn c_minimal_quadrature(lam: Complex64, tol: f64) -> Complex64 {
    c_gamma_quadrature(lam, 0, tol)
}

/// `c_γ(λ) = ∫ a(n̄_x)^{-(λ+ρ)} e^{in·2·atan x} dx` for the character
/// `γ = e^{inθ}`, from the closed form
/// `c(λ) Π_{k=1}^{|n|} (λ + 1/2 − k)/(λ − 1/2 + k)`.
pub fn c_gamma(lam: &SpectralParam, n: i64) -> CFunctionValue {
    let l = lam.lambda;
    let base = c_minimal(lam);
    let mut prod = Complex64::new(1.0, 0.0);
    let mut pole = base.pole_flag;
    for k in 1..=n.unsigned_abs() {
        let den = l - 0.5 + k as f64;
        if den.norm() < POLE_TOL {
            pole = true;
        }
        prod *= (l + 0.5 - k as f64) / den;
    }
    let value = if pole { Complex64::new(f64::INFINITY, 0.0) } else { base.value * prod };
    CFunctionValue { value, lam: *lam, pole_flag: pole }
}

/// Quadrature oracle for [`c_gamma`]: `∫ cos^{2λ−1}φ e^{2inφ} dφ`, Re λ > 0.
pub fn c_gamma_quadrature(lam: Complex64, n: i64, tol: f64) -> Complex64 {
    let e = 2.0 * lam - 1.0;
    tanh_sinh(
        |phi, da, db| {
            // cos φ = sin(distance to the nearer endpoint)
            let c = da.min(db).sin();
            (e * c.ln()).exp() * Complex64::from_polar(1.0, 2.0 * n as f64 * phi)
        },
        -PI / 2.0,
        PI / 2.0,
        tol,
    )
}

/// Normalized multiplier `j_n(λ)`; bad-point error at its poles.
pub fn j_multiplier(lam: &SpectralParam, n: i64) -> Result<Complex64> {
    let l = lam.lambda;
    let mut prod = Complex64::new(1.0, 0.0);
    for k in 1..=n.unsigned_abs() {
        let den = k as f64 - 0.5 - l;
        if den.norm() < 1e-12 {
            return Err(Error::BadPoint { lambda: l });
        }
        prod *= (k as f64 - 0.5 + l) / den;
    }
    Ok(prod)
}

/// Table `j_n(λ)` for `0 ≤ n ≤ order`, by the one-step recursion
/// `j_n / j_{n−1} = (n − 1/2 + λ)/(n − 1/2 − λ)`.
pub fn j_table(lam: &SpectralParam, order: usize) -> Result<Vec<Complex64>> {
    let l = lam.lambda;
    let mut t = Vec::with_capacity(order + 1);
    t.push(Complex64::new(1.0, 0.0));
    for n in 1..=order {
        let den = n as f64 - 0.5 - l;
        if den.norm() < 1e-12 {
            return Err(Error::BadPoint { lambda: l });
        }
        let prev = t[n - 1];
        t.push(prev * (n as f64 - 0.5 + l) / den);
    }
    Ok(t)
}

/// Unnormalized multiplier `ĵ_n(λ) = c(−λ) j_n(λ)`.
pub fn jhat_multiplier(lam: &SpectralParam, n: i64) -> Result<Complex64> {
    let c = c_minimal(&SpectralParam::new(-lam.lambda, lam.rank));
    if c.pole_flag {
        return Err(Error::BadPoint { lambda: lam.lambda });
    }
    Ok(c.value * j_multiplier(lam, n)?)
}

/// Quadrature oracle for `ĵ_n(λ)` by the noncompact picture, valid for
/// Re λ < 0 where the kernel is integrable: `ĵ_n(λ) = γ(m_w) c_γ(−λ)` with
/// `γ = e^{inθ}`; the Weyl representative m_w shifts the boundary by π and
/// contributes `γ(m_w) = (−1)^n`.
pub fn jhat_multiplier_quadrature(lam: Complex64, n: i64, tol: f64) -> Complex64 {
    weyl_phase(n) * c_gamma_quadrature(-lam, n, tol)
}

/// `γ(m_w)` for the character `e^{inθ}`.
pub fn weyl_phase(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_full(f: &BoundarySection) -> Result<()> {
    match f.domain {
        Domain::Full => Ok(()),
        Domain::Quotient(_) => Err(Error::DomainMismatch("intertwiners act on full-circle sections".into())),
    }
}

/// `Ĵ_λ f`, applied diagonally in the Fourier basis.
pub fn jhat_apply(f: &BoundarySection, lam: &SpectralParam) -> Result<BoundarySection> {
    check_full(f)?;
    let c = c_minimal(&SpectralParam::new(-lam.lambda, lam.rank));
    if c.pole_flag {
        return Err(Error::BadPoint { lambda: lam.lambda });
    }
    let mut out = j_apply(f, lam)?;
    for v in out.samples.iter_mut() {
        *v *= c.value;
    }
    Ok(out)
}

/// The normalized intertwiner `J_λ = Ĵ_λ / c(−λ)`.
pub fn j_apply(f: &BoundarySection, lam: &SpectralParam) -> Result<BoundarySection> {
    check_full(f)?;
    if rgamma(0.5 - lam.lambda).norm() < 1e-14 {
        return Err(Error::NormalizationZero { lambda: lam.lambda });
    }
    let order = f.samples.len() / 2 + 1;
    let table = j_table(lam, order)?;
    let samples = apply_multiplier(&f.samples, |n| table[n.unsigned_abs() as usize]);
    Ok(BoundarySection {
        samples,
        lam: SpectralParam::new(-lam.lambda, lam.rank),
        fourier_order: f.fourier_order,
        domain: Domain::Full,
    })
}

/// The off-diagonal distributional kernel of `J_λ` with respect to
/// `dθ'/2π`: `K(θ, θ') = |sin((θ−θ')/2)|^{-1-2λ} · π / c(−λ)`.
/// Vanishes identically at λ = 0.
pub fn j_kernel(lam: Complex64, dtheta: f64) -> Complex64 {
    let s = (0.5 * dtheta).sin().abs();
    let inv_c = rgamma(-lam) * gamma(0.5 - lam) / PI.sqrt();
    PI * inv_c * (-(1.0 + 2.0 * lam) * s.ln()).exp()
}
