//! Real special-function kernels.
//!
//! Everything here is a pure function of its arguments: Gamma machinery,
//! Pochhammer products, generalized binomials, associated Laguerre
//! polynomials, modified Bessel functions, the azimuthal sinc coefficient
//!
//! ```text
//! C_qk = (1/2π) ∫₀^{2π} e^{i(q-k)φ} dφ = e^{i(q-k)π} sin((q-k)π) / ((q-k)π)
//! ```
//!
//! and the radial coupling kernel
//!
//! ```text
//! I_{p,h}(l,k) = ∫₀^∞ e^{-x} x^{(|l|+|k|)/2} L_p^{(|l|)}(x) L_h^{(|k|)}(x) dx
//! ```
//!
//! evaluated through a terminating Appell F₂ double sum at unit arguments.
//!
//! Fractional-plate algebra leans on the analytic structure of Gamma: terms
//! that should vanish do so through poles of a *denominator* Gamma, so the
//! reciprocal is implemented as an entire function returning exactly zero
//! there instead of propagating NaN.

use crate::error::{CoreError, Result};
use crate::Complex;

/// Gamma arguments past this overflow f64.
const GAMMA_OVERFLOW_X: f64 = 171.624;

/// Tolerance for classifying an argument as a non-positive integer (a pole).
const POLE_TOL: f64 = 1e-12;

/// Lanczos coefficients, g = 7, n = 9 (GSL set).
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

const LN_SQRT_2PI: f64 = 0.918938533204672741780329736406;

/// True when `x` sits on a Gamma pole (0, -1, -2, ...).
pub fn is_gamma_pole(x: f64) -> bool {
    x < 0.5 && (x - x.round()).abs() < POLE_TOL
}

/// sin(πx) with argument reduction so zeros at integers are exact.
fn sin_pi(x: f64) -> f64 {
    let r = x - x.round();
    let s = (std::f64::consts::PI * r).sin();
    // round() moves by an integer; each unit flips the sign
    if (x.round() as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// cos(πx) with the same reduction.
fn cos_pi(x: f64) -> f64 {
    let r = x - x.round();
    let c = (std::f64::consts::PI * r).cos();
    if (x.round() as i64) % 2 == 0 {
        c
    } else {
        -c
    }
}

/// ln Γ(x) for x > 0 (Lanczos).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs x > 0, got {x}");
    if x < 0.5 {
        // reflection keeps the Lanczos series in its accurate range
        return std::f64::consts::PI.ln() - sin_pi(x).abs().ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut t = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        t += c / (z + i as f64);
    }
    let w = z + 7.5;
    LN_SQRT_2PI + (z + 0.5) * w.ln() - w + t.ln()
}

/// ln |Γ(x)| together with the sign of Γ(x), for any non-pole x.
///
/// Lets Gamma ratios with large or negative arguments be combined in log
/// space without overflow.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        (ln_gamma(x), 1.0)
    } else {
        debug_assert!(!is_gamma_pole(x));
        let s = sin_pi(x);
        let ln = std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
        (ln, s.signum())
    }
}

/// Γ(x).
///
/// Non-positive integers are reported as [`CoreError::GammaPole`]; arguments
/// large enough to overflow f64 as [`CoreError::GammaOverflow`] (the two are
/// distinct failure modes).
pub fn gamma(x: f64) -> Result<f64> {
    if is_gamma_pole(x) {
        return Err(CoreError::GammaPole(x));
    }
    if x > GAMMA_OVERFLOW_X {
        return Err(CoreError::GammaOverflow(x));
    }
    if x < 0.5 {
        // Γ(x) = π / (sin(πx) Γ(1-x))
        let denom = sin_pi(x) * gamma(1.0 - x)?;
        if denom == 0.0 || !denom.is_finite() {
            // Γ(1-x) itself overflowed: Γ(x) underflows to ±0
            return Ok(std::f64::consts::PI / denom);
        }
        return Ok(std::f64::consts::PI / denom);
    }
    let z = x - 1.0;
    let mut t = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        t += c / (z + i as f64);
    }
    let w = z + 7.5;
    Ok((2.0 * std::f64::consts::PI).sqrt() * w.powf(z + 0.5) * (-w).exp() * t)
}

/// 1/Γ(x) as an entire function: exactly 0 at the poles of Γ.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return 0.0;
    }
    if x > 0.5 {
        if x > GAMMA_OVERFLOW_X {
            // Γ overflows, its reciprocal underflows
            return (-ln_gamma(x)).exp();
        }
        return 1.0 / gamma(x).expect("pole excluded");
    }
    // 1/Γ(x) = sin(πx) Γ(1-x) / π
    let (ln, sign) = ln_gamma_signed(1.0 - x);
    let s = sin_pi(x);
    s.signum() * sign * (ln + s.abs().ln() - std::f64::consts::PI.ln()).exp()
}

/// ln(n!).
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Falling factorial r(r-1)⋯(r-h+1) as an explicit product.
///
/// Equal to Γ(1+r)/Γ(1+r-h) wherever both Gammas are finite, but free of
/// poles: a vanishing factor gives an exact zero.
pub fn pochhammer_falling(r: f64, h: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..h {
        acc *= r - j as f64;
    }
    acc
}

/// Rising factorial a(a+1)⋯(a+n-1).
pub fn pochhammer_rising(a: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for j in 0..n {
        acc *= a + j as f64;
    }
    acc
}

/// Generalized binomial coefficient with real upper argument,
/// `binom(r, h) = (r)_h / h!` with the falling Pochhammer.
pub fn gen_binomial(r: f64, h: u32) -> f64 {
    pochhammer_falling(r, h) * (-ln_factorial(h)).exp()
}

/// Azimuthal expansion coefficient `e^{i(q-k)π} sin((q-k)π)/((q-k)π)`.
///
/// Exactly 1 at q = k (removable singularity); for integer q - k it is
/// exactly 0, so integer plates select a single harmonic with no residue.
pub fn sinc_phase(q: f64, k: f64) -> Complex {
    let d = q - k;
    if (d - d.round()).abs() < POLE_TOL {
        return if d.round() == 0.0 {
            Complex::new(1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        };
    }
    let f = sin_pi(d) / (d * std::f64::consts::PI);
    Complex::new(cos_pi(d), sin_pi(d)) * f
}

/// Associated Laguerre polynomial L_p^{(α)}(x) by the upward three-term
/// recurrence (stable over the ranges used here, p ≤ 60, x ≤ 50).
pub fn laguerre(p: u32, alpha: f64, x: f64) -> f64 {
    if p == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 + alpha - x;
    for n in 1..p {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + alpha - x) * l - (nf + alpha) * lm1) / (nf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// Modified Bessel function I_l(x) by its power series, with term-ratio
/// stopping at relative 1e-15. I_{-l} = I_l.
pub fn bessel_i(l: i32, x: f64) -> f64 {
    let al = l.unsigned_abs();
    let (x, parity) = if x < 0.0 {
        (-x, if al % 2 == 0 { 1.0 } else { -1.0 })
    } else {
        (x, 1.0)
    };
    if x == 0.0 {
        return if al == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut term = (al as f64 * half.ln() - ln_factorial(al)).exp();
    let mut sum = term;
    let q = half * half;
    for m in 0..500u32 {
        term *= q / ((m as f64 + 1.0) * (m as f64 + 1.0 + al as f64));
        sum += term;
        if term < 1e-15 * sum {
            break;
        }
    }
    parity * sum
}

/// Appell F₂(a; -p, -h; c1, c2; 1, 1) as its terminating double sum
///
/// ```text
/// Σ_{r=0}^{p} Σ_{s=0}^{h} (a)_{r+s} (-p)_r (-h)_s / ((c1)_r (c2)_s r! s!)
/// ```
///
/// with rising Pochhammers. The negative-integer numerator parameters cut
/// the series off, so this is exact up to rounding.
pub fn appell_f2_unit(a: f64, p: u32, h: u32, c1: f64, c2: f64) -> Result<f64> {
    for (c, span, name) in [(c1, p, "c1"), (c2, h, "c2")] {
        if c <= 0.5 && (c - c.round()).abs() < POLE_TOL && (-c.round()) < span as f64 {
            return Err(CoreError::InvalidParameter(format!(
                "{name} = {c} is a non-positive integer inside the F2 summation range"
            )));
        }
    }
    let mut sum = 0.0;
    // outer factor (-p)_r / ((c1)_r r!), running product over r
    let mut outer = 1.0;
    for r in 0..=p {
        let rf = r as f64;
        // inner starts from (a)_r at s = 0 and walks s
        let mut inner = outer * pochhammer_rising(a, r);
        sum += inner;
        for s in 0..h {
            let sf = s as f64;
            inner *= (a + rf + sf) * (-(h as f64) + sf) / ((c2 + sf) * (sf + 1.0));
            sum += inner;
        }
        if r < p {
            outer *= (-(p as f64) + rf) / ((c1 + rf) * (rf + 1.0));
        }
    }
    Ok(sum)
}

/// Radial coupling kernel
///
/// ```text
/// I_{p,h}(l,k) = Γ(m+1) (|l|+1)_p (|k|+1)_h / (p! h!) · F₂(m+1; -p, -h; |l|+1, |k|+1; 1, 1)
/// ```
///
/// with m = (|l|+|k|)/2. This is the closed form of the overlap integral
/// between scaled Laguerre modes; it is independent of the beam waist after
/// the substitution x = 2r²/w₀². The quadrature in [`crate::oracle`] is the
/// normative definition this must reproduce.
pub fn coupling_kernel(p: u32, h: u32, l: i32, k: i32) -> f64 {
    let al = l.unsigned_abs() as f64;
    let ak = k.unsigned_abs() as f64;
    let m = 0.5 * (al + ak);
    // Γ(m+1) (|l|+1)_p (|k|+1)_h / (p! h!), all positive: combine in log space
    let ln_pref = ln_gamma(m + 1.0) + ln_gamma(al + 1.0 + p as f64) - ln_gamma(al + 1.0)
        + ln_gamma(ak + 1.0 + h as f64)
        - ln_gamma(ak + 1.0)
        - ln_factorial(p)
        - ln_factorial(h);
    let f2 = appell_f2_unit(m + 1.0, p, h, al + 1.0, ak + 1.0)
        .expect("|l|+1, |k|+1 are positive integers");
    ln_pref.exp() * f2
}
