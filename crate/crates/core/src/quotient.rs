//! Coordinates on B = Γ\Ω.
//!
//! Each glued circle of B is parametrized by ŝ ∈ [0, 1), the arc length of
//! the Γ-invariant density `ŵ dθ/2π`, where `ŵ ∝ ē_1^{2ρ/(1+ρ)}` is built
//! from the trivializing section at μ = 1 and normalized to total length 1
//! per circle. A section of weight ν is stored as `u = ŵ^{(ρ-ν)/2ρ} · v(ŝ)`
//! with `v` periodic, so that the pairing of weights ν and −ν is
//! `∫ v₁ v₂ dŝ`.

use crate::error::Result;
use crate::lie_core::act_circle;
use crate::numerics::gauss_legendre;
use crate::poincare::Trivializer;
use crate::schottky::SchottkyData;
use rayon::prelude::*;
use std::f64::consts::PI;

const PANELS: usize = 32;
const ORDER: usize = 16;

#[derive(Clone, Debug)]
struct Panel {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    vals: Vec<f64>,
    bary: Vec<f64>,
    cum: f64,
}

impl Panel {
    fn interp(&self, x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((xj, vj), wj) in self.nodes.iter().zip(&self.vals).zip(&self.bary) {
            let d = x - xj;
            if d == 0.0 {
                return *vj;
            }
            let t = wj / d;
            num += t * vj;
            den += t;
        }
        num / den
    }
}

/// Position of a boundary point in the chart of one fundamental arc,
/// possibly extended into the collars beyond the arc's ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    pub arc: usize,
    /// ŝ-offset from the arc start; negative or beyond the arc length in
    /// collars.
    pub local: f64,
    /// Normalized invariant density at the point.
    pub w_hat: f64,
}

/// The Γ-invariant chart of B.
#[derive(Clone, Debug)]
pub struct QuotientChart {
    rho: f64,
    panels: Vec<Vec<Panel>>,
    /// ŝ-length of each arc.
    pub arc_len: Vec<f64>,
    /// ŝ-offset of each arc within its circle.
    pub arc_offset: Vec<f64>,
    pub arc_circle: Vec<usize>,
    /// Unnormalized length of each circle.
    pub circle_len: Vec<f64>,
    /// Width (in ŝ) of the collars recognized beyond each arc end.
    pub collar: f64,
    arcs: Vec<crate::schottky::Arc>,
    disks: Vec<crate::schottky::Arc>,
    start_disk: Vec<Option<usize>>,
    end_disk: Vec<Option<usize>>,
    trivial: bool,
    escaping: Vec<[[f64; 2]; 2]>,
}

fn bary_weights(x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(j, xj)| {
            let p: f64 = x.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, xk)| xj - xk).product();
            1.0 / p
        })
        .collect()
}

impl QuotientChart {
    pub fn new(g: &SchottkyData) -> Result<Self> {
        let rho = g.rank.rho();
        let triv = Trivializer::new(g, 1.0, 1e-18)?;
        let power = 2.0 * rho / (1.0 + rho);
        let (gx, gw) = gauss_legendre(ORDER);
        let fb = &g.fundamental;
        let mut panels = Vec::with_capacity(fb.arcs.len());
        let mut raw_len = Vec::with_capacity(fb.arcs.len());
        for arc in &fb.arcs {
            let h = arc.len / PANELS as f64;
            let mut ps: Vec<Panel> = (0..PANELS)
                .into_par_iter()
                .map(|k| {
                    let a = arc.start + k as f64 * h;
                    let b = a + h;
                    let nodes: Vec<f64> = gx.iter().map(|x| a + 0.5 * h * (x + 1.0)).collect();
                    let vals: Vec<f64> = nodes.iter().map(|&t| triv.value(t).powf(power)).collect();
                    let bary = bary_weights(&nodes);
                    Panel { a, b, nodes, vals, bary, cum: 0.0 }
                })
                .collect();
            let mut cum = 0.0;
            for p in ps.iter_mut() {
                p.cum = cum;
                let s: f64 = p.vals.iter().zip(&gw).map(|(v, w)| v * w).sum();
                cum += s * 0.5 * (p.b - p.a) / (2.0 * PI);
            }
            panels.push(ps);
            raw_len.push(cum);
        }
        let n = fb.arcs.len();
        let mut arc_circle = vec![0; n];
        let mut arc_offset = vec![0.0; n];
        let mut circle_len = Vec::with_capacity(fb.circles.len());
        for (c, cyc) in fb.circles.iter().enumerate() {
            let total: f64 = cyc.iter().map(|&a| raw_len[a]).sum();
            let mut off = 0.0;
            for &a in cyc {
                arc_circle[a] = c;
                arc_offset[a] = off / total;
                off += raw_len[a];
            }
            circle_len.push(total);
        }
        let arc_len: Vec<f64> = (0..n).map(|a| raw_len[a] / circle_len[arc_circle[a]]).collect();
        for (a, ps) in panels.iter_mut().enumerate() {
            let l = circle_len[arc_circle[a]];
            for p in ps.iter_mut() {
                p.cum /= l;
                for v in p.vals.iter_mut() {
                    *v /= l;
                }
            }
        }
        let collar = 0.3 * arc_len.iter().cloned().fold(f64::INFINITY, f64::min);
        let escaping = (0..g.disks.len())
            .map(|d| *g.letter_matrix(SchottkyData::escaping_letter(d)))
            .collect();
        Ok(Self {
            rho,
            panels,
            arc_len,
            arc_offset,
            arc_circle,
            circle_len,
            collar,
            arcs: fb.arcs.clone(),
            disks: g.disks.clone(),
            start_disk: fb.start_disk.clone(),
            end_disk: fb.end_disk.clone(),
            trivial: g.is_trivial(),
            escaping,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn num_circles(&self) -> usize {
        self.circle_len.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    fn panel_index(&self, arc: usize, theta: f64) -> (usize, f64) {
        let a = &self.arcs[arc];
        let x = a.start + a.clamped_offset(theta);
        let h = a.len / PANELS as f64;
        let k = (((x - a.start) / h).floor() as usize).min(PANELS - 1);
        (k, x)
    }

    /// ŵ at a point of the given fundamental arc.
    pub fn w_hat_on_arc(&self, arc: usize, theta: f64) -> f64 {
        let (k, x) = self.panel_index(arc, theta);
        self.panels[arc][k].interp(x)
    }

    /// ŝ-offset of θ from the start of `arc` (θ on the arc).
    pub fn local_on_arc(&self, arc: usize, theta: f64) -> f64 {
        let (k, x) = self.panel_index(arc, theta);
        let p = &self.panels[arc][k];
        let (gx, gw) = gauss_legendre(ORDER);
        let h = x - p.a;
        let s: f64 = gx.iter().zip(&gw).map(|(t, w)| w * p.interp(p.a + 0.5 * h * (t + 1.0))).sum();
        p.cum + s * 0.5 * h / (2.0 * PI)
    }

    /// Inverse of [`local_on_arc`](Self::local_on_arc).
    pub fn theta_at(&self, arc: usize, local: f64) -> f64 {
        let ps = &self.panels[arc];
        let local = local.clamp(0.0, self.arc_len[arc]);
        let k = ps.iter().rposition(|p| p.cum <= local).unwrap_or(0);
        let p = &ps[k];
        let next = if k + 1 < ps.len() { ps[k + 1].cum } else { self.arc_len[arc] };
        let mut x = p.a + (p.b - p.a) * ((local - p.cum) / (next - p.cum)).clamp(0.0, 1.0);
        for _ in 0..50 {
            let f = self.local_on_arc(arc, x) - local;
            let dx = f / (self.w_hat_on_arc(arc, x) / (2.0 * PI));
            x = (x - dx).clamp(p.a, p.b);
            if dx.abs() < 1e-15 {
                break;
            }
        }
        x
    }

    /// Locate θ in the chart of a fundamental arc or one of its collars.
    pub fn classify(&self, theta: f64) -> Option<ChartPoint> {
        if self.trivial {
            return Some(ChartPoint { arc: 0, local: theta.rem_euclid(2.0 * PI) / (2.0 * PI), w_hat: 1.0 });
        }
        if let Some(arc) = self.arcs.iter().position(|a| a.contains(theta)) {
            return Some(ChartPoint {
                arc,
                local: self.local_on_arc(arc, theta),
                w_hat: self.w_hat_on_arc(arc, theta),
            });
        }
        let d = self.disks.iter().position(|a| a.contains(theta))?;
        let p = SchottkyData::partner_disk(d);
        let (z, log_a) = act_circle(&self.escaping[d], theta);
        let jac = (-log_a).exp();
        // z just past the end of the partner disk: θ near the start of d
        let ga = self.start_disk.iter().position(|&s| s == Some(p))?;
        if self.arcs[ga].contains(z) {
            let t = self.local_on_arc(ga, z);
            if t < self.collar {
                let arc = self.end_disk.iter().position(|&s| s == Some(d))?;
                return Some(ChartPoint { arc, local: self.arc_len[arc] + t, w_hat: self.w_hat_on_arc(ga, z) * jac });
            }
        }
        let gb = self.end_disk.iter().position(|&s| s == Some(p))?;
        if self.arcs[gb].contains(z) {
            let t = self.arc_len[gb] - self.local_on_arc(gb, z);
            if t < self.collar {
                let arc = self.start_disk.iter().position(|&s| s == Some(d))?;
                return Some(ChartPoint { arc, local: -t, w_hat: self.w_hat_on_arc(gb, z) * jac });
            }
        }
        None
    }

    /// Circle index and ŝ ∈ [0, 1) of a chart point.
    pub fn circle_coord(&self, p: &ChartPoint) -> (usize, f64) {
        (self.arc_circle[p.arc], (self.arc_offset[p.arc] + p.local).rem_euclid(1.0))
    }

    /// Exponent of ŵ in the trivialization of weight ν: `(ρ − ν)/2ρ`.
    pub fn weight_exponent(&self, nu: num_complex::Complex64) -> num_complex::Complex64 {
        (self.rho - nu) / (2.0 * self.rho)
    }

    /// Nodes uniform in ŝ, `per_circle` on each circle, circle-major.
    pub fn grid(&self, per_circle: usize) -> QuotientGrid {
        let mut nodes = Vec::with_capacity(per_circle * self.num_circles());
        for c in 0..self.num_circles() {
            let mut arcs: Vec<usize> = (0..self.num_arcs()).filter(|&a| self.arc_circle[a] == c).collect();
            arcs.sort_by(|&a, &b| self.arc_offset[a].total_cmp(&self.arc_offset[b]));
            let mut row: Vec<QuotientNode> = (0..per_circle)
                .into_par_iter()
                .map(|k| {
                    let s = k as f64 / per_circle as f64;
                    let arc = *arcs.iter().rev().find(|&&a| self.arc_offset[a] <= s + 1e-15).unwrap_or(&arcs[0]);
                    let local = s - self.arc_offset[arc];
                    let theta = if self.trivial { 2.0 * PI * s } else { self.theta_at(arc, local) };
                    let w_hat = if self.trivial { 1.0 } else { self.w_hat_on_arc(arc, theta) };
                    QuotientNode { circle: c, s, arc, theta, w_hat }
                })
                .collect();
            nodes.append(&mut row);
        }
        QuotientGrid { per_circle, nodes }
    }
}

/// One collocation node on B.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuotientNode {
    pub circle: usize,
    pub s: f64,
    pub arc: usize,
    pub theta: f64,
    pub w_hat: f64,
}

/// Collocation nodes uniform in ŝ on each circle of B.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientGrid {
    pub per_circle: usize,
    pub nodes: Vec<QuotientNode>,
}
