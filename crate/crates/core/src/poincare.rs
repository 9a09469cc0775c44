//! Poincaré series, the critical exponent, and trivializing sections.

use crate::error::{Error, Result};
use crate::lie_core::{canonical_angle, BoundaryPoint, Rank};
use crate::schottky::SchottkyData;
use num_complex::Complex64;
use rayon::prelude::*;

/// A truncated series with its tail estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub length_used: usize,
    pub tail_bound: f64,
    pub converged: bool,
}

/// Shell ratio above which a series is declared not yet geometric.
pub const RATIO_CONVERGED: f64 = 0.95;

/// A point `w · b` of an orbit, with `log_a(w k_b)`.
#[derive(Clone, Copy, Debug)]
pub struct OrbitPoint {
    pub depth: usize,
    pub log_a: f64,
    pub theta: f64,
    /// First column of `w k_b` (unnormalized); its direction fixes κ.
    pub frame: [f64; 2],
}

/// Depth-first traversal of the orbit `{w · θ}` by left extension of
/// reduced words. A branch is not extended below a node whose `log_a`
/// exceeds `log_cut` (its subtree is then negligible by Schottky
/// contraction), nor beyond `max_len` letters.
pub fn orbit_dfs<F>(g: &SchottkyData, theta: f64, max_len: usize, log_cut: f64, mut visit: F)
where
    F: FnMut(&OrbitPoint),
{
    let (s, c) = (theta / 2.0).sin_cos();
    let root = OrbitPoint { depth: 0, log_a: 0.0, theta: canonical_angle(theta), frame: [c, s] };
    visit(&root);
    if g.is_trivial() || max_len == 0 {
        return;
    }
    let letters = g.letters();
    // explicit stack: (point, first letter of its word)
    let mut stack: Vec<(OrbitPoint, i32)> = Vec::with_capacity(64);
    for &a in letters.iter().rev() {
        stack.push((root, a));
    }
    while let Some((p, a)) = stack.pop() {
        let m = g.letter_matrix(a);
        let u = m[0][0] * p.frame[0] + m[0][1] * p.frame[1];
        let v = m[1][0] * p.frame[0] + m[1][1] * p.frame[1];
        let q = OrbitPoint {
            depth: p.depth + 1,
            log_a: (u * u + v * v).ln(),
            theta: canonical_angle(2.0 * v.atan2(u)),
            frame: [u, v],
        };
        visit(&q);
        if q.depth < max_len && q.log_a <= log_cut {
            for &b in letters.iter().rev() {
                if b != -a {
                    stack.push((q, b));
                }
            }
        }
    }
}

/// `log_a(w k_θ)` for all reduced words, grouped by word length.
pub fn shell_logs(g: &SchottkyData, theta: f64, l: usize) -> Vec<Vec<f64>> {
    let mut shells = vec![Vec::new(); l + 1];
    orbit_dfs(g, theta, l, f64::INFINITY, |p| shells[p.depth].push(p.log_a));
    shells
}

fn theta_of(b: &BoundaryPoint) -> Result<f64> {
    match *b {
        BoundaryPoint::Circle { theta } => Ok(theta),
        BoundaryPoint::Sphere { polar, azimuth } => {
            // only the embedded great circle carries the limit set
            let a = canonical_angle(azimuth);
            if a.abs() < 1e-12 || (a - 2.0 * std::f64::consts::PI).abs() < 1e-12 {
                Ok(polar)
            } else if (a - std::f64::consts::PI).abs() < 1e-12 {
                Ok(2.0 * std::f64::consts::PI - polar)
            } else {
                Err(Error::DomainMismatch("sphere point off the embedded circle".into()))
            }
        }
    }
}

/// `Σ_{|w| ≤ L} a(w k_b)^{-s-ρ}` with a geometric tail bound from the last
/// two shells.
pub fn poincare_series(g: &SchottkyData, s: Complex64, b: &BoundaryPoint, l: usize, tol: f64) -> Result<SeriesResult> {
    let l = l.max(1);
    let theta = theta_of(b)?;
    let rho = g.rank.rho();
    let e = -(s + rho);
    let shells = shell_logs(g, theta, l);
    let mut value = Complex64::new(0.0, 0.0);
    let mut mags = Vec::with_capacity(l + 1);
    for sh in &shells {
        let mut m = 0.0;
        for &x in sh {
            let t = (e * x).exp();
            value += t;
            m += t.norm();
        }
        mags.push(m);
    }
    if g.is_trivial() {
        return Ok(SeriesResult { value, length_used: 0, tail_bound: 0.0, converged: true });
    }
    let ratio = mags[l] / mags[l - 1];
    if !(ratio < 1.0) {
        return Err(Error::DivergenceDetected { param: s, ratio });
    }
    let tail_bound = mags[l] * ratio / (1.0 - ratio);
    Ok(SeriesResult { value, length_used: l, tail_bound, converged: ratio < RATIO_CONVERGED && tail_bound <= tol })
}

/// Sample points for uniformity checks: `per_arc` interior points of each
/// fundamental arc.
pub fn fundamental_grid(g: &SchottkyData, per_arc: usize) -> Vec<f64> {
    g.fundamental
        .arcs
        .iter()
        .flat_map(|a| (0..per_arc).map(move |k| a.at((k as f64 + 0.5) / per_arc as f64)))
        .collect()
}

fn max_shell_ratio(tails: &[(Vec<f64>, Vec<f64>)], c: f64) -> f64 {
    tails
        .par_iter()
        .map(|(prev, last)| {
            let sp: f64 = prev.iter().map(|x| (-c * x).exp()).sum();
            let sl: f64 = last.iter().map(|x| (-c * x).exp()).sum();
            sl / sp
        })
        .reduce(|| 0.0, f64::max)
}

fn bisect_exponent(tails: &[(Vec<f64>, Vec<f64>)], rho: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-rho, 3.0 * rho);
    // divergent at lo (ratio ≥ 1), convergent at hi
    if max_shell_ratio(tails, hi + rho) >= 1.0 || max_shell_ratio(tails, lo + rho) < 1.0 - 1e-12 {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > 0.25 * tol {
        let mid = 0.5 * (lo + hi);
        if max_shell_ratio(tails, mid + rho) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Word length used for shell ratios: the deepest shell with at most
/// `budget` words.
fn shell_depth(g: &SchottkyData, budget: usize) -> usize {
    let r = g.num_generators();
    if r == 1 {
        return 40;
    }
    let mut l = 2;
    let mut shell = 2 * r * (2 * r - 1);
    while shell * (2 * r - 1) <= budget && l < 40 {
        shell *= 2 * r - 1;
        l += 1;
    }
    l
}

/// The critical exponent δ_Γ, by bisection on the shell growth rate over a
/// 32-point grid per fundamental arc.
pub fn critical_exponent(g: &SchottkyData, tol: f64) -> Result<f64> {
    let rho = g.rank.rho();
    if g.is_trivial() {
        return Err(Error::BracketFailure { lo: -rho, hi: 3.0 * rho });
    }
    let grid = fundamental_grid(g, 32);
    let depth = shell_depth(g, 60_000);
    let tails: Vec<(Vec<f64>, Vec<f64>)> = grid
        .par_iter()
        .map(|&t| {
            let mut sh = shell_logs(g, t, depth);
            let last = sh.pop().unwrap();
            let prev = sh.pop().unwrap();
            (prev, last)
        })
        .collect();
    bisect_exponent(&tails, rho, tol)
}

/// δ^{n+1} = δ^n − (ρ(n+1) − ρ(n)).
pub fn exponent_shift(delta_n: f64, n: u32) -> Result<f64> {
    if n != 2 {
        return Err(Error::UnsupportedRank(n));
    }
    Ok(delta_n - (Rank::Three.rho() - Rank::Two.rho()))
}

/// `ē_μ(b) = Σ_{|w| ≤ L} a(w k_b)^{-μ-ρ}`, the average of the constant
/// section at weight μ.
pub fn trivializer(g: &SchottkyData, mu: f64, b: &BoundaryPoint, l: usize) -> Result<f64> {
    if g.is_trivial() {
        return Ok(1.0);
    }
    let r = poincare_series(g, Complex64::new(mu, 0.0), b, l, f64::INFINITY)?;
    Ok(r.value.re)
}

/// Quick shell-ratio test that `Σ a(w k)^{-s-ρ}` converges (Re s > δ_Γ),
/// on a small grid of fundamental points and moderate word length.
pub fn check_convergence(g: &SchottkyData, s: Complex64) -> Result<()> {
    if g.is_trivial() {
        return Ok(());
    }
    let c = s.re + g.rank.rho();
    let depth = shell_depth(g, 4_000).min(16);
    for &t in &fundamental_grid(g, 4) {
        let sh = shell_logs(g, t, depth);
        let sum = |v: &Vec<f64>| v.iter().map(|x| (-c * x).exp()).sum::<f64>();
        let ratio = sum(&sh[depth]) / sum(&sh[depth - 1]);
        if !(ratio < 1.0) {
            return Err(Error::DivergenceDetected { param: s, ratio });
        }
    }
    Ok(())
}

/// Fast evaluator of the trivializing section at weight μ, using pruned
/// orbit traversal. Convergence (μ > δ_Γ) is certified once on
/// construction.
#[derive(Clone, Debug)]
pub struct Trivializer<'a> {
    group: &'a SchottkyData,
    exponent: f64,
    log_cut: f64,
    max_len: usize,
}

impl<'a> Trivializer<'a> {
    pub fn new(group: &'a SchottkyData, mu: f64, rel_tol: f64) -> Result<Self> {
        let rho = group.rank.rho();
        check_convergence(group, Complex64::new(mu, 0.0))?;
        let exponent = mu + rho;
        Ok(Self { group, exponent, log_cut: -rel_tol.ln() / exponent, max_len: 200 })
    }

    pub fn value(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        orbit_dfs(self.group, theta, self.max_len, self.log_cut, |p| acc += (-self.exponent * p.log_a).exp());
        acc
    }
}
