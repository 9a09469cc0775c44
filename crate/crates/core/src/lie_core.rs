//! The rank-one matrix model: `SL(2,R)` acting on the circle (rank tag 2)
//! and `SL(2,C)` acting on the sphere (rank tag 3).
//!
//! Normalization: `a_t = diag(e^{t/2}, e^{-t/2})`, so that
//! `log_a(g) = log(|g₁₁|² + |g₂₁|²)` and `ρ = (n - 1)/2` for rank tag `n`.
//! A boundary point θ of the circle is `κ = rot(θ/2)`, whose first column
//! is `(cos θ/2, sin θ/2)`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub type Mat2 = [[Complex64; 2]; 2];

const DET_TOL: f64 = 1e-12;

/// Which symmetric space the group acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rank {
    /// Hyperbolic plane, boundary S¹.
    Two,
    /// Hyperbolic 3-space, boundary S².
    Three,
}

impl Rank {
    pub fn from_tag(tag: u32) -> Result<Rank> {
        match tag {
            2 => Ok(Rank::Two),
            3 => Ok(Rank::Three),
            t => Err(Error::UnsupportedRank(t)),
        }
    }

    pub fn tag(self) -> u32 {
        match self {
            Rank::Two => 2,
            Rank::Three => 3,
        }
    }

    pub fn rho(self) -> f64 {
        (self.tag() as f64 - 1.0) / 2.0
    }
}

/// Half-sum of positive roots for a rank tag.
pub fn rho(rank_tag: u32) -> Result<f64> {
    Ok(Rank::from_tag(rank_tag)?.rho())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A unit-determinant 2×2 matrix with its rank tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    m: Mat2,
    rank: Rank,
}

impl GroupElement {
    pub fn new(m: Mat2, rank: Rank) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (det - 1.0).norm() > DET_TOL || !det.is_finite() {
            return Err(Error::InvalidElement { det });
        }
        if rank == Rank::Two && m.iter().flatten().any(|z| z.im != 0.0) {
            return Err(Error::InvalidConfiguration(
                "rank-2 elements must have real entries".into(),
            ));
        }
        Ok(Self { m, rank })
    }

    /// Real matrix `[[a, b], [c, d]]` in the rank-2 model.
    pub fn real(a: f64, b: f64, cc: f64, d: f64) -> Result<Self> {
        Self::new([[c(a), c(b)], [c(cc), c(d)]], Rank::Two)
    }

    pub fn identity(rank: Rank) -> Self {
        Self { m: [[c(1.0), c(0.0)], [c(0.0), c(1.0)]], rank }
    }

    /// The element of K acting on the boundary circle as θ ↦ θ + α.
    pub fn rotation(alpha: f64) -> Self {
        let (s, co) = (alpha / 2.0).sin_cos();
        Self { m: [[c(co), c(-s)], [c(s), c(co)]], rank: Rank::Two }
    }

    /// `a_t = diag(e^{t/2}, e^{-t/2})`, translation length t.
    pub fn boost(t: f64) -> Self {
        Self { m: [[c((t / 2.0).exp()), c(0.0)], [c(0.0), c((-t / 2.0).exp())]], rank: Rank::Two }
    }

    /// Lower unipotent `n̄_x = [[1, 0], [x, 1]]`.
    pub fn lower_unipotent(x: f64) -> Self {
        Self { m: [[c(1.0), c(0.0)], [c(x), c(1.0)]], rank: Rank::Two }
    }

    /// The fixed Weyl representative `m_w`: rotation of the matrix by π/2,
    /// i.e. boundary rotation by π.
    pub fn weyl_representative() -> Self {
        Self::rotation(PI)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// Real entries, if the matrix is real.
    pub fn real_matrix(&self) -> Option<[[f64; 2]; 2]> {
        if self.m.iter().flatten().any(|z| z.im.abs() > 0.0) {
            return None;
        }
        Some([[self.m[0][0].re, self.m[0][1].re], [self.m[1][0].re, self.m[1][1].re]])
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        let (a, b) = (&self.m, &o.m);
        let mut m = [[c(0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let rank = if self.rank == Rank::Three || o.rank == Rank::Three { Rank::Three } else { Rank::Two };
        GroupElement { m, rank }
    }

    pub fn inverse(&self) -> GroupElement {
        let m = &self.m;
        GroupElement { m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]], rank: self.rank }
    }

    /// Reinterpret in the rank-3 model (verbatim entries).
    pub fn embed(&self) -> GroupElement {
        GroupElement { m: self.m, rank: Rank::Three }
    }

    pub fn with_rank(&self, rank: Rank) -> GroupElement {
        GroupElement { m: self.m, rank }
    }

    /// Entrywise max-norm distance.
    pub fn max_dist(&self, o: &GroupElement) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(o.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check(&self) -> Result<()> {
        let det = self.det();
        if (det - 1.0).norm() > DET_TOL || !det.is_finite() {
            return Err(Error::InvalidElement { det });
        }
        Ok(())
    }
}

/// The factors of `g = κ a n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IwasawaFactors {
    pub kappa: Mat2,
    pub log_a: f64,
    pub n_entry: Complex64,
}

impl IwasawaFactors {
    /// Recompose `κ · a · n`.
    pub fn reconstruct(&self) -> Mat2 {
        let r = (self.log_a / 2.0).exp();
        let k = &self.kappa;
        let x = self.n_entry;
        [
            [k[0][0] * r, k[0][0] * r * x + k[0][1] / r],
            [k[1][0] * r, k[1][0] * r * x + k[1][1] / r],
        ]
    }
}

pub fn iwasawa_decompose(g: &GroupElement) -> Result<IwasawaFactors> {
    g.check()?;
    let m = &g.m;
    let (a, b, cc, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let r2 = a.norm_sqr() + cc.norm_sqr();
    let r = r2.sqrt();
    let kappa = [[a / r, -cc.conj() / r], [cc / r, a.conj() / r]];
    let n_entry = (a.conj() * b + cc.conj() * d) / r2;
    Ok(IwasawaFactors { kappa, log_a: r2.ln(), n_entry })
}

/// `log_a(g)` without validation (hot path).
#[inline]
pub fn log_a_unchecked(m: &Mat2) -> f64 {
    (m[0][0].norm_sqr() + m[1][0].norm_sqr()).ln()
}

/// `a(g)^λ = exp(λ · log_a(g))`.
pub fn a_power(g: &GroupElement, lam: &SpectralParam) -> Result<Complex64> {
    let f = iwasawa_decompose(g)?;
    Ok((lam.lambda * f.log_a).exp())
}

/// A complex spectral parameter with its rank tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParam {
    pub lambda: Complex64,
    pub rank: Rank,
}

impl SpectralParam {
    pub fn new(lambda: Complex64, rank: Rank) -> Self {
        Self { lambda, rank }
    }

    pub fn real(lambda: f64) -> Self {
        Self { lambda: c(lambda), rank: Rank::Two }
    }

    pub fn rho(&self) -> f64 {
        self.rank.rho()
    }
}

/// True iff 2λ is an integer (bad points of the rank-one intertwiner).
pub fn is_bad(lam: &SpectralParam) -> bool {
    let two = 2.0 * lam.lambda;
    two.im.abs() <= 1e-12 && (two.re - two.re.round()).abs() <= 1e-12
}

/// The nontrivial Weyl reflection λ ↦ −λ.
pub fn weyl_reflect(lam: &SpectralParam) -> SpectralParam {
    SpectralParam { lambda: -lam.lambda, rank: lam.rank }
}

/// A boundary point: an angle on S¹, or spherical coordinates on S².
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Circle { theta: f64 },
    Sphere { polar: f64, azimuth: f64 },
}

impl BoundaryPoint {
    pub fn circle(theta: f64) -> Self {
        BoundaryPoint::Circle { theta: canonical_angle(theta) }
    }

    pub fn sphere(polar: f64, azimuth: f64) -> Self {
        BoundaryPoint::Sphere { polar: polar.clamp(0.0, PI), azimuth: canonical_angle(azimuth) }
    }

    /// First column of the representative `k_b ∈ K`.
    pub fn frame(&self) -> [Complex64; 2] {
        match *self {
            BoundaryPoint::Circle { theta } => {
                let (s, co) = (theta / 2.0).sin_cos();
                [c(co), c(s)]
            }
            BoundaryPoint::Sphere { polar, azimuth } => {
                let (s, co) = (polar / 2.0).sin_cos();
                [c(co), Complex64::from_polar(s, azimuth)]
            }
        }
    }

    /// The same point viewed on S²; the circle embeds as the great circle
    /// with azimuth 0 or π.
    pub fn to_sphere(&self) -> BoundaryPoint {
        match *self {
            BoundaryPoint::Circle { theta } if theta <= PI => BoundaryPoint::sphere(theta, 0.0),
            BoundaryPoint::Circle { theta } => BoundaryPoint::sphere(2.0 * PI - theta, PI),
            s => s,
        }
    }

    /// Chordal distance between points of the same kind (diameter 2).
    pub fn chordal(&self, o: &BoundaryPoint) -> f64 {
        let p = self.frame();
        let q = o.frame();
        // |u ∧ v| for unit spinors is half the chordal distance on the unit sphere
        2.0 * (p[0] * q[1] - p[1] * q[0]).norm()
    }
}

/// Reduce an angle to [0, 2π).
pub fn canonical_angle(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// The point `κ(g k_b) M`.
pub fn boundary_act(g: &GroupElement, b: &BoundaryPoint) -> BoundaryPoint {
    let f = b.frame();
    let m = &g.m;
    let u = m[0][0] * f[0] + m[0][1] * f[1];
    let v = m[1][0] * f[0] + m[1][1] * f[1];
    match b {
        BoundaryPoint::Circle { .. } if g.real_matrix().is_some() => {
            BoundaryPoint::circle(2.0 * v.re.atan2(u.re))
        }
        _ => {
            let polar = 2.0 * v.norm().atan2(u.norm());
            let azimuth = if v.norm() == 0.0 || u.norm() == 0.0 { 0.0 } else { v.arg() - u.arg() };
            BoundaryPoint::sphere(polar, azimuth)
        }
    }
}

/// Image angle and `log_a(g k_θ)` for a real matrix acting on the circle.
#[inline]
pub fn act_circle(m: &[[f64; 2]; 2], theta: f64) -> (f64, f64) {
    let (s, co) = (theta / 2.0).sin_cos();
    let u = m[0][0] * co + m[0][1] * s;
    let v = m[1][0] * co + m[1][1] * s;
    (canonical_angle(2.0 * v.atan2(u)), (u * u + v * v).ln())
}

/// Angle of `κ(g k_θ)` relative to the image point, as a phase e^{iψ}
/// with ψ ∈ (−π, π]: for real g, `κ(g k_θ) = rot(θ'/2)` up to the sign ±1,
/// and the sign is returned as ψ ∈ {0, π} in boundary units.
#[inline]
pub fn kappa_sign(m: &[[f64; 2]; 2], theta: f64) -> f64 {
    let (s, co) = (theta / 2.0).sin_cos();
    let u = m[0][0] * co + m[0][1] * s;
    let v = m[1][0] * co + m[1][1] * s;
    // κ first column is (u, v)/r = ±(cos θ'/2, sin θ'/2) with θ' ∈ [0, 2π)
    let half = canonical_angle(2.0 * v.atan2(u)) / 2.0;
    if u * half.cos() + v * half.sin() >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Disk-model coefficients (α, β) of the Cayley conjugate of a real matrix,
/// acting by z ↦ (αz + β)/(β̄z + ᾱ).
pub fn disk_coefficients(m: &[[f64; 2]; 2]) -> (Complex64, Complex64) {
    let (a, b, cc, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    (Complex64::new(a + d, cc - b) * 0.5, Complex64::new(a - d, b + cc) * 0.5)
}

/// Möbius action of a real matrix on the closed unit disk.
pub fn disk_act(m: &[[f64; 2]; 2], z: Complex64) -> Complex64 {
    let (al, be) = disk_coefficients(m);
    (al * z + be) / (be.conj() * z + al.conj())
}

/// The canonical element `g_z = k_α a_t k_α⁻¹` with `g_z · 0 = z`.
pub fn disk_point_element(z: Complex64) -> GroupElement {
    let r = z.norm();
    if r == 0.0 {
        return GroupElement::identity(Rank::Two);
    }
    let alpha = z.arg();
    let t = 2.0 * r.atanh();
    GroupElement::rotation(alpha).mul(&GroupElement::boost(t)).mul(&GroupElement::rotation(-alpha))
}
