use hypext::eisenstein::*;
use hypext::extension::BoundarySection;
use hypext::lie_core::disk_act;
use hypext::scattering::{Discretization, ScatteringContext};
use hypext::schottky::*;
use hypext::{Rank, SpectralParam};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

const L: usize = 400;

fn cyclic() -> &'static SchottkyData {
    static G: OnceLock<SchottkyData> = OnceLock::new();
    G.get_or_init(|| hyperbolic_cylinder(1.0).unwrap())
}

fn generic_phi(ctx: &ScatteringContext<'_>, lam: C) -> BoundarySection {
    let b = ctx.basis(ctx.disc.fourier_order);
    let modes: Vec<C> = (0..b.dim())
        .map(|i| {
            let (c, m) = b.label(i);
            C::new(1.0 / (1.0 + (m * m) as f64), 0.2 * m as f64 / (1.0 + (m * m * m * m) as f64) + 0.3 * c as f64)
        })
        .collect();
    BoundarySection::quotient_from_modes(&ctx.grid, ctx.rho(), SpectralParam::new(lam, Rank::Two), &modes)
}

fn z0() -> InteriorPoint {
    InteriorPoint::new(0.3, -0.2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, .. ProptestConfig::default() })]

    #[test]
    fn poisson_transforms_are_eigenfunctions(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 5),
        lam in -1.0..1.0f64,
        x in -0.5..0.5f64,
        y in -0.5..0.5f64,
    ) {
        let f = BoundarySection::full_from_fn(64, SpectralParam::real(-lam), |t| {
            // keep the constant term dominant so the value at z stays away from zero
            C::new(3.0, 0.0)
                + coeffs.iter().enumerate().map(|(k, &(a, b))| C::new(a, b) * C::from_polar(1.0, (k as f64 + 1.0) * t)).sum::<C>()
        });
        let z = InteriorPoint::new(x, y).unwrap();
        let r1 = poisson_pde_residual(&f, &SpectralParam::real(lam), &z, 1e-2).unwrap();
        let r2 = poisson_pde_residual(&f, &SpectralParam::real(lam), &z, 5e-3).unwrap();
        prop_assert!(r1 <= 1e-3, "{}", r1);
        prop_assert!((3.5..=4.5).contains(&(r1 / r2)), "{} {}", r1, r2);
    }
}

#[test]
fn eisenstein_is_holomorphic_in_lambda() {
    let ctx = ScatteringContext::new(cyclic(), Discretization::with_order(8)).unwrap();
    for centre in [0.3, -0.3] {
        let value = |lam: C| eisenstein(&ctx, &generic_phi(&ctx, lam), 0, &z0(), L, 1e-14, 0.05).unwrap().value;
        let k = 16;
        let mean = (0..k).map(|j| value(C::new(centre, 0.0) + C::from_polar(0.05, 2.0 * PI * j as f64 / k as f64))).sum::<C>()
            / k as f64;
        let v0 = value(C::new(centre, 0.0));
        assert!((mean - v0).norm() < 1e-5 * v0.norm(), "{centre}: {mean} vs {v0}");
    }
}

#[test]
fn eisenstein_pde_and_evenness() {
    let ctx = ScatteringContext::new(cyclic(), Discretization::default()).unwrap();
    let h = 1e-2;
    let plus = pde_residual(&ctx, &generic_phi(&ctx, C::new(0.4, 0.0)), &z0(), h, L, 1e-14, 0.05).unwrap();
    let minus = pde_residual(&ctx, &generic_phi(&ctx, C::new(-0.4, 0.0)), &z0(), h, L, 1e-14, 0.05).unwrap();
    assert!(plus < 1e-3 && minus < 1e-3, "{plus} {minus}");
    // both are O(h²) stencil errors of eigenfunctions with the same eigenvalue
    assert!(plus.max(minus) < 10.0 * h * h, "{plus} {minus}");
}

#[test]
fn prop_functional_equation_at_origin() {
    let ctx = ScatteringContext::new(cyclic(), Discretization::default()).unwrap();
    let phi = generic_phi(&ctx, C::new(-0.25, 0.0));
    let r = verify_eis_funeq(&ctx, &phi, 0, &InteriorPoint::origin(), L, 1e-14, 0.05).unwrap();
    assert!(r <= 1e-3, "{r}");
}

#[test]
fn two_generator_eisenstein_is_gamma_invariant() {
    let g = two_generator(4.0).unwrap();
    let ctx = ScatteringContext::new(&g, Discretization::with_order(8)).unwrap();
    let phi = generic_phi(&ctx, C::new(0.6, 0.0));
    let e = eisenstein_direct(&ctx, &phi, 0, &z0(), L, 1e-11).unwrap().value;
    for &letter in &g.letters() {
        let w = disk_act(g.letter_matrix(letter), z0().z);
        let moved = eisenstein_direct(&ctx, &phi, 0, &InteriorPoint::new(w.re, w.im).unwrap(), L, 1e-11).unwrap().value;
        assert!((moved - e).norm() < 1e-5 * e.norm(), "{letter}: {moved} vs {e}");
    }
}
