use hypext::extension::*;
use hypext::lie_core::act_circle;
use hypext::numerics::gauss_legendre;
use hypext::quotient::QuotientChart;
use hypext::schottky::*;
use hypext::SpectralParam;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

const L: usize = 400;

// (group, three λ above δ_Γ, truncation tolerance): word sums close to δ_Γ
// converge slowly, so the two-generator group is tested further right
const CASES: [(usize, [f64; 3], f64); 2] = [(0, [0.1, 0.3, 0.6], 1e-12), (1, [0.3, 0.6, 1.0], 1e-11)];

struct Setup {
    group: SchottkyData,
    chart: QuotientChart,
    grid: Arc<hypext::quotient::QuotientGrid>,
}

fn setup(which: usize) -> &'static Setup {
    static CELLS: [OnceLock<Setup>; 2] = [OnceLock::new(), OnceLock::new()];
    CELLS[which].get_or_init(|| {
        let group = if which == 0 { hyperbolic_cylinder(1.0).unwrap() } else { two_generator(4.0).unwrap() };
        let chart = QuotientChart::new(&group).unwrap();
        let grid = quotient_grid(&chart, 256);
        Setup { group, chart, grid }
    })
}

fn low_mode_fn(coeffs: &[(f64, f64)]) -> impl Fn(f64) -> C + '_ {
    move |t| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| C::new(a, b) * C::from_polar(1.0, (k as f64 - 2.0) * t))
            .sum()
    }
}

fn phi_from(s: &Setup, lam: f64, coeffs: &[(f64, f64)]) -> BoundarySection {
    let f = low_mode_fn(coeffs);
    BoundarySection::quotient_from_fn(&s.grid, 0.5, SpectralParam::real(lam), |c, x| f(2.0 * PI * x) * (1.0 + c as f64))
}

fn test_fn(lam: f64, m: usize, coeffs: &[(f64, f64)]) -> BoundarySection {
    BoundarySection::full_from_fn(m, SpectralParam::real(-lam), low_mode_fn(coeffs))
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 5)
}

#[test]
fn res_ext_is_identity_on_localized_test_functions() {
    for (which, lams, tol) in CASES {
        let s = setup(which);
        for lam in lams {
            let phi = BoundarySection::quotient_from_fn(&s.grid, 0.5, SpectralParam::real(lam), |_, _| C::new(1.0, 0.0));
            for arc in &s.group.fundamental.arcs {
                let centre = arc.at(0.5);
                let width = 0.08 * arc.len.min(1.0);
                let bump = |t: f64| {
                    let d = (t - centre + PI).rem_euclid(2.0 * PI) - PI;
                    C::new((-(d / width).powi(2)).exp(), 0.0)
                };
                let f = BoundarySection::full_from_fn(2048, SpectralParam::real(-lam), bump);
                let got = ext_pair(&s.group, &phi, &f, L, tol).unwrap();
                // oracle: plain quadrature of φ·f over the arc
                let (x, w) = gauss_legendre(64);
                let panels = 32;
                let h = arc.len / panels as f64;
                let mut want = C::new(0.0, 0.0);
                for p in 0..panels {
                    for (xi, wi) in x.iter().zip(&w) {
                        let t = arc.start + h * (p as f64 + 0.5 * (xi + 1.0));
                        let w_hat = s.chart.classify(t).unwrap().w_hat;
                        let phi_t = w_hat.powf((0.5 - lam) / 1.0);
                        want += 0.5 * h * wi * phi_t * bump(t) / (2.0 * PI);
                    }
                }
                assert!((got - want).norm() < 1e-6 * want.norm().max(1e-3), "{which} {lam}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn cyclic_average_matches_brute_force_word_sum() {
    let s = setup(0);
    let lam = 1.0;
    let f = BoundarySection::full_mode(64, SpectralParam::real(-lam), 2);
    let avg = average(&s.group, &s.grid, &f, 200, 1e-16).unwrap();
    let words = enumerate_words(&s.group, 50);
    for (i, node) in s.grid.nodes.iter().enumerate().step_by(17) {
        let mut want = C::new(0.0, 0.0);
        for (_, w) in &words {
            let (t, la) = act_circle(&w.real_matrix().unwrap(), node.theta);
            want += (-(lam + 0.5) * la).exp() * C::from_polar(1.0, 2.0 * t);
        }
        assert!((avg.samples[i] - want).norm() < 1e-8, "{i}");
    }
}

#[test]
fn holomorphic_in_lambda() {
    // discrete Cauchy mean over a small circle equals the centre value
    let s = setup(0);
    let coeffs = [(0.3, 0.1), (-0.2, 0.4), (1.0, 0.0), (0.5, -0.3), (0.1, 0.2)];
    let value = |lam: C| {
        let f = BoundarySection::full_from_fn(128, SpectralParam::new(-lam, s.group.rank), low_mode_fn(&coeffs));
        let phi = BoundarySection::quotient_from_fn(&s.grid, 0.5, SpectralParam::new(lam, s.group.rank), |c, x| {
            C::new((2.0 * PI * x).cos() + c as f64, 0.5)
        });
        ext_pair(&s.group, &phi, &f, L, 1e-14).unwrap()
    };
    let centre = C::new(0.4, 0.0);
    let k = 16;
    let mean: C = (0..k).map(|j| value(centre + C::from_polar(0.05, 2.0 * PI * j as f64 / k as f64))).sum::<C>() / k as f64;
    let v0 = value(centre);
    assert!((mean - v0).norm() < 1e-6 * v0.norm(), "{mean} vs {v0}");
}

#[test]
fn divergence_below_exponent_is_reported() {
    let s = setup(0);
    let f = BoundarySection::full_mode(32, SpectralParam::real(0.7), 0);
    let err = average(&s.group, &s.grid, &f, L, 1e-12).unwrap_err();
    assert_eq!(err.name(), "divergence-detected");
}

#[test]
fn fast_interpolant_matches_exact() {
    let f = BoundarySection::full_from_fn(256, SpectralParam::real(0.2), |t| C::new((3.0 * t).sin().exp(), t.cos()));
    let ip = FullInterpolant::new(&f).unwrap();
    for k in 0..200 {
        let t = 0.0314159 * k as f64 + 0.001;
        assert!((ip.eval(t) - ip.eval_exact(t)).norm() < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, .. ProptestConfig::default() })]

    #[test]
    fn ext_pair_is_bilinear(c1 in coeff_strategy(), c2 in coeff_strategy(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let s = setup(0);
        let lam = 0.3;
        let (f1, f2) = (test_fn(lam, 128, &c1), test_fn(lam, 128, &c2));
        let phi = phi_from(s, lam, &c1);
        let comb = f1.combine(C::new(a, 0.0), &f2, C::new(0.0, b)).unwrap();
        let lhs = ext_pair(&s.group, &phi, &comb, L, 1e-14).unwrap();
        let rhs = a * ext_pair(&s.group, &phi, &f1, L, 1e-14).unwrap()
            + C::new(0.0, b) * ext_pair(&s.group, &phi, &f2, L, 1e-14).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        let (p1, p2) = (phi_from(s, lam, &c1), phi_from(s, lam, &c2));
        let pc = p1.combine(C::new(a, 0.0), &p2, C::new(b, 0.0)).unwrap();
        let lhs = ext_pair(&s.group, &pc, &f1, L, 1e-14).unwrap();
        let rhs = a * ext_pair(&s.group, &p1, &f1, L, 1e-14).unwrap() + b * ext_pair(&s.group, &p2, &f1, L, 1e-14).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn twisted_act_is_linear_and_a_group_action(c1 in coeff_strategy(), c2 in coeff_strategy(), a in -2.0..2.0f64) {
        let s = setup(0);
        let (f1, f2) = (test_fn(0.3, 256, &c1), test_fn(0.3, 256, &c2));
        let g = s.group.letter_element(1);
        let comb = f1.combine(C::new(a, 0.0), &f2, C::new(1.0, 0.0)).unwrap();
        let lhs = twisted_act(&g, &comb).unwrap();
        let rhs = twisted_act(&g, &f1).unwrap().combine(C::new(a, 0.0), &twisted_act(&g, &f2).unwrap(), C::new(1.0, 0.0)).unwrap();
        for (x, y) in lhs.samples.iter().zip(&rhs.samples) {
            prop_assert!((x - y).norm() < 1e-10 * (1.0 + y.norm()));
        }
        let r = hypext::GroupElement::rotation(0.7);
        let two_step = twisted_act(&r, &twisted_act(&g, &f1).unwrap()).unwrap();
        let one_step = twisted_act(&r.mul(&g), &f1).unwrap();
        for (x, y) in two_step.samples.iter().zip(&one_step.samples) {
            prop_assert!((x - y).norm() < 1e-7 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn ext_is_gamma_invariant(c1 in coeff_strategy(), c2 in coeff_strategy(), which in 0usize..2, li in 0usize..3) {
        let (_, lams, tol) = CASES[which];
        let s = setup(which);
        let lam = lams[li];
        let f = test_fn(lam, 2048, &c1);
        let phi = phi_from(s, lam, &c2);
        let base = ext_pair(&s.group, &phi, &f, L, tol).unwrap();
        for &letter in &s.group.letters() {
            let moved = twisted_act(&s.group.letter_element(letter), &f).unwrap();
            let v = ext_pair(&s.group, &phi, &moved, L, tol).unwrap();
            prop_assert!((v - base).norm() < 1e-6 * (1.0 + base.norm()), "{} vs {}", v, base);
        }
    }
}
