//! Complex Gamma function (Lanczos, g = 7) and its reciprocal.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_right(z: Complex64) -> Complex64 {
    // valid for Re z >= 1/2
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// Distance from `z` to the nearest non-positive integer, or `None` when
/// the nearest integer is positive.
pub fn distance_to_pole(z: Complex64) -> Option<f64> {
    let k = z.re.round();
    if k > 0.0 {
        return None;
    }
    Some((z - k).norm())
}

/// Γ(z). Returns a non-finite value at the poles z ∈ {0, −1, −2, …}.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (PI * z).sin();
        PI / (s * lanczos_right(1.0 - z))
    } else {
        lanczos_right(z)
    }
}

/// 1/Γ(z), entire; exactly zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    if let Some(d) = distance_to_pole(z) {
        if d == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
    }
    if z.re < 0.5 {
        (PI * z).sin() * lanczos_right(1.0 - z) / PI
    } else {
        1.0 / lanczos_right(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert!((gamma(c(1.0, 0.0)) - 1.0).norm() < 1e-14);
        assert!((gamma(c(5.0, 0.0)) - 24.0).norm() < 1e-12);
        assert!((gamma(c(0.5, 0.0)) - PI.sqrt()).norm() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn recurrence_in_the_complex_plane() {
        for &(re, im) in &[(0.3, 0.7), (-1.7, 2.2), (3.1, -4.0), (0.01, 0.0)] {
            let z = c(re, im);
            let lhs = gamma(z + 1.0);
            let rhs = z * gamma(z);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm(), "{z}");
        }
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        assert_eq!(rgamma(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(rgamma(c(-3.0, 0.0)), c(0.0, 0.0));
        let z = c(2.3, -0.4);
        assert!((rgamma(z) * gamma(z) - 1.0).norm() < 1e-13);
    }

    #[test]
    fn reflection_formula() {
        let z = c(0.25, 0.6);
        let lhs = gamma(z) * gamma(1.0 - z);
        let rhs = PI / (PI * z).sin();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }
}
