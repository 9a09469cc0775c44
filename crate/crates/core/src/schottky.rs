//! Schottky data: generators with paired boundary arcs, the fundamental
//! boundary of Γ\Ω, word enumeration, and the rank embedding.

use crate::error::{Error, Result};
use crate::lie_core::{act_circle, canonical_angle, GroupElement, Rank};
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Sample count per arc for the mapping and discontinuity checks.
pub const CHECK_SAMPLES: usize = 256;

/// A closed counter-clockwise arc `[start, start + len]` of the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub len: f64,
}

impl Arc {
    pub fn new(start: f64, len: f64) -> Self {
        Self { start: canonical_angle(start), len }
    }

    /// Arc from `start` counter-clockwise to `end`.
    pub fn between(start: f64, end: f64) -> Self {
        let len = (end - start).rem_euclid(TWO_PI);
        Self::new(start, len)
    }

    pub fn end(&self) -> f64 {
        canonical_angle(self.start + self.len)
    }

    pub fn full() -> Self {
        Self { start: 0.0, len: TWO_PI }
    }

    pub fn is_full(&self) -> bool {
        self.len >= TWO_PI
    }

    /// Counter-clockwise offset of θ from the start, in [0, 2π).
    pub fn offset(&self, theta: f64) -> f64 {
        (theta - self.start).rem_euclid(TWO_PI)
    }

    /// Offset clamped to `[0, len]`, snapping points outside the arc to the
    /// nearer endpoint.
    pub fn clamped_offset(&self, theta: f64) -> f64 {
        let o = self.offset(theta);
        if o <= self.len {
            o
        } else if o - self.len < TWO_PI - o {
            self.len
        } else {
            0.0
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.is_full() || self.offset(theta) <= self.len
    }

    pub fn contains_interior(&self, theta: f64) -> bool {
        let o = self.offset(theta);
        self.is_full() || (o > 0.0 && o < self.len)
    }

    pub fn overlaps(&self, o: &Arc) -> bool {
        self.contains(o.start) || o.contains(self.start)
    }

    pub fn contains_arc(&self, o: &Arc) -> bool {
        self.is_full() || (self.contains(o.start) && self.offset(o.start) + o.len <= self.len + 1e-13)
    }

    /// Point at fraction `t ∈ [0, 1]` along the arc.
    pub fn at(&self, t: f64) -> f64 {
        canonical_angle(self.start + t * self.len)
    }

    /// The closed complement.
    pub fn complement(&self) -> Arc {
        Arc::new(self.end(), TWO_PI - self.len)
    }
}

/// A reduced word in the generators; letter `+k` is generator `k-1`,
/// letter `-k` its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub letters: Vec<i32>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// Reduced concatenation.
    pub fn concat(&self, o: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &o.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != -w[1]) && self.letters.iter().all(|&l| l != 0)
    }
}

/// Identification of the end of one fundamental arc with the start of the
/// next: the generator word `letter` maps the former onto the latter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gluing {
    pub from_arc: usize,
    pub to_arc: usize,
    pub letter: i32,
}

/// Fundamental arcs covering B = Γ\Ω and their gluing into circles.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalBoundary {
    pub arcs: Vec<Arc>,
    /// Disk whose end is the start of each arc (`None` for the full circle).
    pub start_disk: Vec<Option<usize>>,
    /// Disk whose start is the end of each arc.
    pub end_disk: Vec<Option<usize>>,
    pub gluings: Vec<Gluing>,
    /// Each glued circle of B as a cyclic list of arc indices.
    pub circles: Vec<Vec<usize>>,
}

impl FundamentalBoundary {
    pub fn arc_containing(&self, theta: f64) -> Option<usize> {
        self.arcs.iter().position(|a| a.contains(theta))
    }

    pub fn circle_of(&self, arc: usize) -> usize {
        self.circles.iter().position(|c| c.contains(&arc)).expect("arc belongs to a circle")
    }

    /// Arc whose start is the end of disk `d`.
    pub fn arc_after_disk(&self, d: usize) -> usize {
        self.start_disk.iter().position(|&s| s == Some(d)).expect("disk is followed by an arc")
    }

    /// Arc whose end is the start of disk `d`.
    pub fn arc_before_disk(&self, d: usize) -> usize {
        self.end_disk.iter().position(|&s| s == Some(d)).expect("disk is preceded by an arc")
    }
}

/// Validated Schottky data.
///
/// Disk `2i` is the source arc of generator `i` (repelling side), disk
/// `2i + 1` the exact image `g_i(S¹ ∖ D_{2i})` (attracting side).
#[derive(Clone, Debug)]
pub struct SchottkyData {
    pub generators: Vec<GroupElement>,
    pub paired_arcs: Vec<(Arc, Arc)>,
    pub disks: Vec<Arc>,
    pub fundamental: FundamentalBoundary,
    pub rank: Rank,
    real: Vec<[[f64; 2]; 2]>,
    real_inv: Vec<[[f64; 2]; 2]>,
}

impl SchottkyData {
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// All letters in canonical order `1, -1, 2, -2, …`.
    pub fn letters(&self) -> Vec<i32> {
        (1..=self.generators.len() as i32).flat_map(|k| [k, -k]).collect()
    }

    /// Real matrix of a letter.
    pub fn letter_matrix(&self, letter: i32) -> &[[f64; 2]; 2] {
        let i = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            &self.real[i]
        } else {
            &self.real_inv[i]
        }
    }

    pub fn letter_element(&self, letter: i32) -> GroupElement {
        let i = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.generators[i]
        } else {
            self.generators[i].inverse()
        }
    }

    /// Disk containing the image of everything outside the disk of the
    /// inverse letter.
    pub fn image_disk(letter: i32) -> usize {
        let i = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            2 * i + 1
        } else {
            2 * i
        }
    }

    /// Letter mapping points of disk `d` out to the closed complement of its
    /// partner disk.
    pub fn escaping_letter(d: usize) -> i32 {
        let k = (d / 2 + 1) as i32;
        if d.is_multiple_of(2) {
            k
        } else {
            -k
        }
    }

    pub fn partner_disk(d: usize) -> usize {
        d ^ 1
    }

    /// Matrix of a word (product left to right).
    pub fn word_matrix(&self, w: &Word) -> GroupElement {
        w.letters
            .iter()
            .fold(GroupElement::identity(self.rank), |acc, &l| acc.mul(&self.letter_element(l).with_rank(self.rank)))
    }
}

fn check_real(g: &GroupElement) -> Result<[[f64; 2]; 2]> {
    g.real_matrix().ok_or_else(|| {
        Error::InvalidConfiguration("Schottky generators must have real entries".into())
    })
}

/// Validate generators and arcs and compute the fundamental boundary.
pub fn build_schottky(gens: Vec<GroupElement>, arcs: Vec<(Arc, Arc)>) -> Result<SchottkyData> {
    if gens.len() != arcs.len() {
        return Err(Error::InvalidConfiguration(format!(
            "{} generators but {} arc pairs",
            gens.len(),
            arcs.len()
        )));
    }
    let rank = gens.first().map(|g| g.rank()).unwrap_or(Rank::Two);
    if gens.iter().any(|g| g.rank() != rank) {
        return Err(Error::InvalidConfiguration("generators have mixed rank tags".into()));
    }
    let real = gens.iter().map(check_real).collect::<Result<Vec<_>>>()?;
    let real_inv = gens.iter().map(|g| check_real(&g.inverse())).collect::<Result<Vec<_>>>()?;

    let user: Vec<Arc> = arcs.iter().flat_map(|(s, t)| [*s, *t]).collect();
    for (i, a) in user.iter().enumerate() {
        if !(a.len > 0.0 && a.len < TWO_PI) {
            return Err(Error::InvalidConfiguration(format!("arc {i} has length {}", a.len)));
        }
        for (j, b) in user.iter().enumerate().skip(i + 1) {
            if a.overlaps(b) {
                return Err(Error::InvalidConfiguration(format!("arcs {i} and {j} overlap")));
            }
        }
    }

    let mut disks = Vec::with_capacity(user.len());
    for (i, (src, tgt)) in arcs.iter().enumerate() {
        let m = &real[i];
        let ext = src.complement();
        for k in 0..CHECK_SAMPLES {
            let x = ext.at((k as f64 + 0.5) / CHECK_SAMPLES as f64);
            let (y, _) = act_circle(m, x);
            if !tgt.contains_interior(y) {
                return Err(Error::NotSchottky(format!(
                    "generator {i} maps {x:.6} outside its target arc (to {y:.6})"
                )));
            }
        }
        let exact = Arc::between(act_circle(m, src.end()).0, act_circle(m, src.start).0);
        if !tgt.contains_arc(&exact) {
            return Err(Error::NotSchottky(format!(
                "image of the exterior of source arc {i} is not inside its target arc"
            )));
        }
        disks.push(*src);
        disks.push(exact);
    }

    let fundamental = fundamental_boundary(&disks);
    Ok(SchottkyData { generators: gens, paired_arcs: arcs, disks, fundamental, rank, real, real_inv })
}

fn fundamental_boundary(disks: &[Arc]) -> FundamentalBoundary {
    if disks.is_empty() {
        return FundamentalBoundary {
            arcs: vec![Arc::full()],
            start_disk: vec![None],
            end_disk: vec![None],
            gluings: vec![Gluing { from_arc: 0, to_arc: 0, letter: 0 }],
            circles: vec![vec![0]],
        };
    }
    let mut order: Vec<usize> = (0..disks.len()).collect();
    order.sort_by(|&a, &b| disks[a].start.total_cmp(&disks[b].start));
    let n = order.len();
    let mut arcs = Vec::with_capacity(n);
    let mut start_disk = Vec::with_capacity(n);
    let mut end_disk = Vec::with_capacity(n);
    for k in 0..n {
        let a = order[k];
        let b = order[(k + 1) % n];
        arcs.push(Arc::between(disks[a].end(), disks[b].start));
        start_disk.push(Some(a));
        end_disk.push(Some(b));
    }
    let find_after = |d: usize| start_disk.iter().position(|&s| s == Some(d)).unwrap();
    let mut gluings = Vec::with_capacity(n);
    let mut next = vec![0; n];
    for k in 0..n {
        let d = end_disk[k].unwrap();
        // d = D⁻ (even): g maps D⁻.start to D⁺.end; d = D⁺: g⁻¹ maps D⁺.start to D⁻.end
        let letter = SchottkyData::escaping_letter(d);
        let to = find_after(SchottkyData::partner_disk(d));
        next[k] = to;
        gluings.push(Gluing { from_arc: k, to_arc: to, letter });
    }
    let mut seen = vec![false; n];
    let mut circles = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            cyc.push(k);
            k = next[k];
        }
        circles.push(cyc);
    }
    FundamentalBoundary { arcs, start_disk, end_disk, gluings, circles }
}

/// All reduced words of length ≤ `l` with their matrices, ordered by length
/// and then lexicographically in the letter order `1, -1, 2, -2, …`.
pub fn enumerate_words(g: &SchottkyData, l: usize) -> Vec<(Word, GroupElement)> {
    let letters = g.letters();
    let mut out = vec![(Word::identity(), GroupElement::identity(g.rank))];
    let mut shell_start = 0;
    for _ in 0..l {
        let shell_end = out.len();
        for idx in shell_start..shell_end {
            for &a in &letters {
                let (w, m) = &out[idx];
                if w.letters.last() == Some(&-a) {
                    continue;
                }
                let mut nw = w.clone();
                nw.letters.push(a);
                let nm = m.mul(&g.letter_element(a).with_rank(g.rank));
                out.push((nw, nm));
            }
        }
        shell_start = shell_end;
    }
    out
}

/// Number of reduced words of length ≤ `l` in `r` free generators.
pub fn word_count(r: usize, l: usize) -> usize {
    if r == 0 {
        return 1;
    }
    let mut total = 1;
    let mut shell = 2 * r;
    for _ in 0..l {
        total += shell;
        shell *= 2 * r - 1;
    }
    total
}

/// Minimal chordal displacement `|x - w x|` over nontrivial words of length
/// ≤ `lcheck` and sample points of the fundamental arcs. Infinite for the
/// trivial group.
pub fn min_displacement(g: &SchottkyData, lcheck: usize) -> Result<f64> {
    let words = enumerate_words(g, lcheck.max(1));
    let mut best = f64::INFINITY;
    for arc in &g.fundamental.arcs {
        for k in 0..=CHECK_SAMPLES {
            let x = arc.at(k as f64 / CHECK_SAMPLES as f64);
            for (w, m) in words.iter().skip(1) {
                let (y, _) = act_circle(&m.real_matrix().expect("real Schottky matrices"), x);
                let d = 2.0 * ((x - y) / 2.0).sin().abs();
                if d < 1e-12 {
                    return Err(Error::NotProperlyDiscontinuous(format!(
                        "word {:?} fixes the point {x:.12}",
                        w.letters
                    )));
                }
                best = best.min(d);
            }
        }
    }
    Ok(best)
}

/// Reinterpret rank-2 data in the rank-3 model.
pub fn embed_next_rank(g: &SchottkyData) -> Result<SchottkyData> {
    if g.rank != Rank::Two {
        return Err(Error::UnsupportedRank(g.rank.tag()));
    }
    let mut out = g.clone();
    out.generators = g.generators.iter().map(|h| h.embed()).collect();
    out.rank = Rank::Three;
    Ok(out)
}

/// The trivial group: B is the whole circle.
pub fn trivial_group() -> SchottkyData {
    build_schottky(Vec::new(), Vec::new()).expect("trivial group is valid")
}

/// Half-width α of the exact disks of `diag(e^{ℓ/2}, e^{-ℓ/2})` that are
/// symmetric about the fixed points: `tan(α/2) = e^{-ℓ/2}`.
pub fn symmetric_half_width(ell: f64) -> f64 {
    2.0 * (-ell / 2.0).exp().atan()
}

fn symmetric_pair(ell: f64, center: f64, slack: f64) -> (GroupElement, (Arc, Arc)) {
    let k = GroupElement::rotation(center);
    let h = k.mul(&GroupElement::boost(ell)).mul(&k.inverse());
    let a = symmetric_half_width(ell);
    let src = Arc::new(center + PI - a, 2.0 * a);
    let tgt = Arc::new(center - a * (1.0 + slack), 2.0 * a * (1.0 + slack));
    (h, (src, tgt))
}

/// Hyperbolic cylinder generated by `diag(e^{ℓ/2}, e^{-ℓ/2})`.
pub fn hyperbolic_cylinder(ell: f64) -> Result<SchottkyData> {
    let (h, arcs) = symmetric_pair(ell, 0.0, 0.02);
    build_schottky(vec![h], vec![arcs])
}

/// Two conjugate boosts of translation length ℓ with axes rotated by π/2
/// on the boundary (a one-holed torus); requires `ℓ > 1.77`.
pub fn two_generator(ell: f64) -> Result<SchottkyData> {
    let (h1, a1) = symmetric_pair(ell, 0.0, 0.02);
    let (h2, a2) = symmetric_pair(ell, PI / 2.0, 0.02);
    build_schottky(vec![h1, h2], vec![a1, a2])
}
