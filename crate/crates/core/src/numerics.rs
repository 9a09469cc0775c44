//! Quadrature rules, interpolation, smooth steps and FFT plumbing.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Tanh–sinh quadrature of `f` over (a, b).
///
/// The integrand receives `(x, x - a, b - x)` so that endpoint
/// singularities can be evaluated without cancellation.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64) -> Complex64
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> Complex64 {
        let u = 0.5 * PI * t.sinh();
        let c = u.cosh();
        // distance from either endpoint in units of `half`
        let d = 1.0 / (c * c * (1.0 + u.tanh().abs()));
        let d = d.max(0.0);
        let wt = 0.5 * PI * t.cosh() / (c * c);
        if d * half == 0.0 || !wt.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let (x, da, db) = if t < 0.0 {
            (a + half * d, half * d, 2.0 * half - half * d)
        } else {
            (b - half * d, 2.0 * half - half * d, half * d)
        };
        f(x, da, db) * (wt * half)
    };
    let tmax = 4.0;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut est = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let next = sum * h;
        let diff = (next - est).norm();
        est = next;
        if diff <= tol * est.norm().max(1e-300) {
            break;
        }
    }
    est
}

/// C^∞ step on [-1, 1]: 0 at -1, 1 at 1, with `s(t) + s(-t) = 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= -1.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
    let p = f(0.5 * (1.0 + t));
    let q = f(0.5 * (1.0 - t));
    p / (p + q)
}

/// C² polynomial smoothstep on [0, 1].
pub fn smoothstep_c2(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Local Lagrange interpolation of periodic samples on a uniform grid of [0, 2π).
#[derive(Clone, Debug)]
pub struct PeriodicInterp {
    order: usize,
}

impl PeriodicInterp {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2);
        Self { order }
    }

    /// Stencil start index and weights for the point `theta`.
    pub fn stencil(&self, m: usize, theta: f64) -> (isize, Vec<f64>) {
        let h = 2.0 * PI / m as f64;
        let s = theta.rem_euclid(2.0 * PI) / h;
        let p = self.order;
        let start = s.floor() as isize - (p as isize - 1) / 2;
        let mut w = vec![1.0; p];
        for (j, wj) in w.iter_mut().enumerate() {
            let xj = (start + j as isize) as f64;
            for k in 0..p {
                if k != j {
                    let xk = (start + k as isize) as f64;
                    *wj *= (s - xk) / (xj - xk);
                }
            }
        }
        (start, w)
    }

    pub fn eval(&self, values: &[Complex64], theta: f64) -> Complex64 {
        let m = values.len() as isize;
        let (start, w) = self.stencil(values.len(), theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            acc += values[(start + j as isize).rem_euclid(m) as usize] * *wj;
        }
        acc
    }
}

/// Chebyshev points of the first kind on [a, b] with barycentric weights.
pub fn chebyshev(p: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(p);
    let mut w = Vec::with_capacity(p);
    for j in 0..p {
        let ang = PI * (2 * j + 1) as f64 / (2 * p) as f64;
        x.push(0.5 * (a + b) + 0.5 * (b - a) * ang.cos());
        let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
        w.push(sgn * ang.sin());
    }
    (x, w)
}

/// Barycentric interpolation weights at `t` for nodes `x` with weights `w`.
pub fn barycentric_row(x: &[f64], w: &[f64], t: f64) -> Vec<f64> {
    if let Some(j) = x.iter().position(|&xj| xj == t) {
        let mut r = vec![0.0; x.len()];
        r[j] = 1.0;
        return r;
    }
    let mut r: Vec<f64> = x.iter().zip(w).map(|(xj, wj)| wj / (t - xj)).collect();
    let s: f64 = r.iter().sum();
    for v in &mut r {
        *v /= s;
    }
    r
}

/// Forward DFT normalized so that `c[k]` is the k-th Fourier coefficient
/// (index k taken modulo the length).
pub fn fourier_coefficients(values: &[Complex64]) -> Vec<Complex64> {
    let m = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let s = 1.0 / m as f64;
    buf.iter().map(|v| v * s).collect()
}

/// Inverse of [`fourier_coefficients`].
pub fn fourier_synthesis(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Apply a Fourier multiplier `mult(n)` to periodic samples.
pub fn apply_multiplier<F>(values: &[Complex64], mult: F) -> Vec<Complex64>
where
    F: Fn(i64) -> Complex64,
{
    let m = values.len();
    let mut c = fourier_coefficients(values);
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= mult(signed_index(k, m));
    }
    fourier_synthesis(&c)
}

/// Map a DFT index to the symmetric range.
pub fn signed_index(k: usize, m: usize) -> i64 {
    if k <= m / 2 {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

/// Trigonometric interpolation of uniform periodic samples at `theta`.
pub fn trig_interp(coeffs: &[Complex64], theta: f64) -> Complex64 {
    let m = coeffs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, ck) in coeffs.iter().enumerate() {
        let n = signed_index(k, m);
        // split the Nyquist mode symmetrically
        if m.is_multiple_of(2) && k == m / 2 {
            acc += ck * (n as f64 * theta).cos();
        } else {
            acc += ck * Complex64::from_polar(1.0, n as f64 * theta);
        }
    }
    acc
}
