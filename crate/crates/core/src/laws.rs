//! Closed forms and exact samplers for the sign-change process and the
//! slope statistics it is built on.
//!
//! The generating function of the number of sign changes on `[1, x]` is
//! `a(x, z) = c1(z) x^{l1(z)} + c2(z) x^{l2(z)}` with
//! `l1,2(z) = (-3 +- sqrt(5 + 4z)) / 2`. It is analytic off the cut
//! `(-inf, -5/4]`, which is rejected here.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::quad;

/// Branch point of `sqrt(5 + 4z)`.
pub const BRANCH_POINT: f64 = -1.25;

const SERIES_TERM_BUDGET: usize = 10_000;
const SMALL_S: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticEval {
    pub z: Complex64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl AnalyticEval {
    /// `x^{l1} c1 + x^{l2} c2`, i.e. `E z^{k(x)}`.
    pub fn a(&self, x: f64) -> Complex64 {
        self.c1 * xpow(x, self.lambda1) + self.c2 * xpow(x, self.lambda2)
    }

    /// Coefficients of `x^{l1}`, `x^{l2}` in `b(x, z)`.
    fn b_coeffs(&self) -> (Complex64, Complex64) {
        let one_minus_z = Complex64::new(1.0, 0.0) - self.z;
        (
            self.c1 * (1.0 + self.lambda1 / one_minus_z),
            self.c2 * (1.0 + self.lambda2 / one_minus_z),
        )
    }

    pub fn b(&self, x: f64) -> Complex64 {
        let (b1, b2) = self.b_coeffs();
        b1 * xpow(x, self.lambda1) + b2 * xpow(x, self.lambda2)
    }
}

fn xpow(x: f64, e: Complex64) -> Complex64 {
    (e * x.ln()).exp()
}

pub fn exponents(z: Complex64) -> Result<AnalyticEval> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::DomainError(format!("z = {z}")));
    }
    if z.im == 0.0 && z.re <= BRANCH_POINT {
        return Err(Error::DomainError(format!("z = {z} (branch cut)")));
    }
    let root = (Complex64::new(5.0, 0.0) + 4.0 * z).sqrt();
    let lambda1 = (root - 3.0) / 2.0;
    let lambda2 = (-root - 3.0) / 2.0;
    let third = (z - 1.0) / 3.0;
    let gap = lambda1 - lambda2;
    Ok(AnalyticEval {
        z,
        lambda1,
        lambda2,
        c1: (third - lambda2) / gap,
        c2: (lambda1 - third) / gap,
    })
}

fn check_level(x: f64) -> Result<()> {
    if x >= 1.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("level x = {x} (need x >= 1)")))
    }
}

/// `E z^{k(x)}`.
pub fn genfun(x: f64, z: Complex64) -> Result<Complex64> {
    check_level(x)?;
    Ok(exponents(z)?.a(x))
}

pub fn genfun_real(x: f64, z: f64) -> Result<f64> {
    Ok(genfun(x, Complex64::new(z, 0.0))?.re)
}

pub fn b_coeff(x: f64, z: Complex64) -> Result<Complex64> {
    check_level(x)?;
    if z == Complex64::new(1.0, 0.0) {
        return Err(Error::DomainError("z = 1 in b(x, z)".into()));
    }
    Ok(exponents(z)?.b(x))
}

/// Exponents and coefficients at `z = 0`, all real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroExponents {
    pub lambda1: f64,
    pub lambda2: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn zero_exponents() -> ZeroExponents {
    let r5 = 5f64.sqrt();
    let lambda1 = (r5 - 3.0) / 2.0;
    let lambda2 = (-r5 - 3.0) / 2.0;
    let c1 = (-1.0 / 3.0 - lambda2) / r5;
    ZeroExponents {
        lambda1,
        lambda2,
        c1,
        c2: 1.0 - c1,
    }
}

/// `P(k(x) = 0) = a(x, 0)`: `b` keeps its sign on `[1, x]`.
pub fn survival(x: f64) -> f64 {
    let e = zero_exponents();
    e.c1 * x.powf(e.lambda1) + e.c2 * x.powf(e.lambda2)
}

fn survival_derivative(x: f64) -> f64 {
    let e = zero_exponents();
    (e.c1 * e.lambda1 * x.powf(e.lambda1) + e.c2 * e.lambda2 * x.powf(e.lambda2)) / x
}

/// Density of the ratio of consecutive sign-change levels.
pub fn ratio_density(r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::DomainError(format!("ratio r = {r} (need r >= 1)")));
    }
    let e = zero_exponents();
    Ok((r.powf(e.lambda1 - 1.0) - r.powf(e.lambda2 - 1.0)) / (e.lambda1 - e.lambda2))
}

pub fn ratio_cdf(r: f64) -> f64 {
    if !(r > 1.0) {
        return 0.0;
    }
    if r == f64::INFINITY {
        return 1.0;
    }
    let e = zero_exponents();
    let part = |l: f64| (r.powf(l) - 1.0) / l;
    (part(e.lambda1) - part(e.lambda2)) / (e.lambda1 - e.lambda2)
}

/// Exact draw: `log r` is the sum of independent exponentials with rates
/// `-l1` and `-l2` (their product is 1).
pub fn sample_ratio<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let e = zero_exponents();
    let a: f64 = rng.sample(Exp1);
    let b: f64 = rng.sample(Exp1);
    (a / -e.lambda1 + b / -e.lambda2).exp()
}

/// Hypoexponential density of `log r`.
pub fn log_ratio_density(y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    let e = zero_exponents();
    let (ra, rb) = (-e.lambda1, -e.lambda2);
    ra * rb / (rb - ra) * ((-ra * y).exp() - (-rb * y).exp())
}

/// Density of the next sign-change level after one at `x`.
pub fn transition_density(y: f64, x: f64) -> f64 {
    if !(y >= x) {
        return 0.0;
    }
    let e = zero_exponents();
    let q = y / x;
    (q.powf(e.lambda1) - q.powf(e.lambda2)) / ((e.lambda1 - e.lambda2) * y)
}

/// Density `(2y + 1) e^{-y} / 3` of the central excess height at level 1.
pub fn central_excess_density(y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    (2.0 * y + 1.0) * (-y).exp() / 3.0
}

pub fn central_excess_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    1.0 - (-y).exp() * (1.0 + 2.0 * y / 3.0)
}

/// Mixture draw: Exp(1) with probability 1/3, Gamma(2, 1) otherwise.
pub fn sample_central_excess<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let pick: f64 = rng.random();
    let first: f64 = rng.sample(Exp1);
    if pick < 1.0 / 3.0 {
        first
    } else {
        let second: f64 = rng.sample(Exp1);
        first + second
    }
}

/// Density of a generic 1-slope length (first time reflected Brownian
/// motion hits 1), by its alternating theta series truncated once the
/// remaining tail is below `tol`.
pub fn slope_length_density(t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) || !(tol > 0.0) {
        return Err(Error::DomainError(format!("t = {t}, tol = {tol}")));
    }
    let c = PI * PI * t / 2.0;
    // Terms u e^{-c u^2} decrease once u exceeds this.
    let peak = (1.0 / (2.0 * c)).sqrt();
    let mut sum = 0.0;
    for k in 0..SERIES_TERM_BUDGET {
        let u = k as f64 + 0.5;
        let mag = u * (-c * u * u).exp();
        if u > peak && PI * mag < tol {
            return Ok(PI * sum);
        }
        sum += if k % 2 == 0 { mag } else { -mag };
    }
    Err(Error::TruncationNotConverged {
        t,
        terms: SERIES_TERM_BUDGET,
    })
}

/// `E g(l)` for a 1-slope length `l`, by quadrature of the series density.
/// The mass outside `[0.01, 80]` is below `1e-20` and is dropped.
pub fn length_expectation(g: impl Fn(f64) -> f64) -> f64 {
    let f = |t: f64| g(t) * slope_length_density(t, 1e-16).expect("series converges on [0.01, 80]");
    [(0.01, 0.5), (0.5, 2.0), (2.0, 10.0), (10.0, 80.0)]
        .iter()
        .map(|&(a, b)| quad::integrate(f, a, b, 1e-14))
        .sum()
}

/// Laplace transform `1 / cosh sqrt(2 lambda)` of the slope length.
pub fn length_laplace(lambda: f64) -> f64 {
    1.0 / (2.0 * lambda).sqrt().cosh()
}

/// `(phi(s), psi(s)) = (u coth u - 1, u / sinh u)` with `u = sqrt(2s)`.
pub fn phi_psi(s: f64) -> (f64, f64) {
    if s < SMALL_S {
        let phi = s * (2.0 / 3.0 + s * (-4.0 / 45.0 + s * (16.0 / 945.0 - s * 16.0 / 4725.0)));
        let psi = 1.0 + s * (-1.0 / 3.0 + s * (7.0 / 90.0 - s * 31.0 / 1890.0));
        return (phi, psi);
    }
    let u = (2.0 * s).sqrt();
    if u > 20.0 {
        let q = (-2.0 * u).exp();
        let phi = u * (1.0 + q) / (1.0 - q) - 1.0;
        let psi = 2.0 * u * (-u).exp() / (1.0 - q);
        return (phi, psi);
    }
    (u / u.tanh() - 1.0, u / u.sinh())
}

/// Large-deviation rate of `k(e^t) / t`.
pub fn rate_function(a: f64) -> f64 {
    if a < 0.0 {
        return f64::INFINITY;
    }
    let root = (a * a + 1.25).sqrt();
    let log_term = if a == 0.0 {
        0.0
    } else {
        a * (2.0 * a * (a + root)).ln()
    };
    log_term + 1.5 - (a + root)
}

/// CDF of the first sign-change level: `1 - a(x, 0)`.
pub fn first_flip_cdf(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        1.0 - survival(x)
    }
}

/// Level `x >= 1` with `first_flip_cdf(x) = p`, by bracketed Newton
/// iteration to relative precision 1e-12.
pub fn first_flip_quantile(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::DomainError(format!("probability {p}")));
    }
    let target = 1.0 - p;
    if target >= 1.0 {
        return Ok(1.0);
    }
    let e = zero_exponents();
    let f = |x: f64| survival(x) - target;
    let mut x = (target / e.c1).powf(1.0 / e.lambda1).max(1.0);
    let (mut lo, mut hi) = (1.0, x.max(2.0));
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let fx = f(x);
        if fx > 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let mut next = x - fx / survival_derivative(x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-12 * x {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

pub fn sample_first_flip<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    first_flip_quantile(u).expect("uniform draw lies in [0, 1)")
}

/// `M(x, y, z) = [a(x, z) + b(x, z) y] e^{-y}` for real `z` in
/// `(-5/4, 1)`.
pub fn m_value(x: f64, y: f64, z: f64) -> Result<f64> {
    let ev = real_eval(z)?;
    Ok((ev.a(x).re + ev.b(x).re * y) * (-y).exp())
}

fn real_eval(z: f64) -> Result<AnalyticEval> {
    if !(z > BRANCH_POINT && z < 1.0) {
        return Err(Error::DomainError(format!("z = {z} (need -5/4 < z < 1)")));
    }
    exponents(Complex64::new(z, 0.0))
}

/// Left minus right side of the transport equation for `M`, with
/// central differences of width `fd_step` for the partial derivatives and
/// the exact convolution `(M * e^{-.})(y) = e^{-y} (a y + b y^2 / 2)`.
pub fn pde_residual(x: f64, y: f64, z: f64, fd_step: f64) -> Result<f64> {
    if !(x > 1.0 && y > 0.0 && fd_step > 0.0) {
        return Err(Error::DomainError(format!(
            "x = {x}, y = {y}, fd_step = {fd_step}"
        )));
    }
    let ev = real_eval(z)?;
    let m = |x: f64, y: f64| (ev.a(x).re + ev.b(x).re * y) * (-y).exp();
    let h = fd_step;
    let dx = (m(x + h, y) - m(x - h, y)) / (2.0 * h);
    let dy = (m(x, y + h) - m(x, y - h)) / (2.0 * h);
    let lhs = x * dx - (1.0 + y) * dy + 2.0 * m(x, y);
    let (a, b) = (ev.a(x).re, ev.b(x).re);
    let ey = (-y).exp();
    let conv = ey * (a * y + b * y * y / 2.0);
    let rhs = 2.0 * conv + 2.0 * ey * a - (y + 1.0) * ey * z * (b - a);
    Ok(lhs - rhs)
}

/// Residuals of the two first-order equations for `a` and `b`, using exact
/// derivatives of the closed forms.
pub fn ode_residual(x: f64, z: f64) -> Result<(f64, f64)> {
    if !(x > 1.0) {
        return Err(Error::DomainError(format!("x = {x}")));
    }
    let ev = real_eval(z)?;
    let (b1, b2) = ev.b_coeffs();
    let (p1, p2) = (xpow(x, ev.lambda1), xpow(x, ev.lambda2));
    let a = ev.a(x);
    let b = ev.b(x);
    let x_da = ev.c1 * ev.lambda1 * p1 + ev.c2 * ev.lambda2 * p2;
    let x_db = b1 * ev.lambda1 * p1 + b2 * ev.lambda2 * p2;
    let r_a = x_da + (z - 1.0) * (b - a);
    let r_b = x_db + (2.0 + z) * b - (z + 1.0) * a;
    Ok((r_a.re, r_b.re))
}

/// `M(1, y, z)` minus its prescribed initial profile `(2y/3 + 1) e^{-y}`.
pub fn initial_condition_residual(y: f64, z: f64) -> Result<f64> {
    Ok(m_value(1.0, y, z)? - (2.0 * y / 3.0 + 1.0) * (-y).exp())
}
