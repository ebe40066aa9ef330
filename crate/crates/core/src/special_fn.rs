//! Complex log-Gamma, digamma and the trigamma/tetragamma functions.
//!
//! All three are evaluated with the same recipe: lift the argument by the
//! recurrence until `Re z >= 10`, apply the Stirling series with eight
//! Bernoulli terms, and use the reflection formula for `Re z < 0`.
//! The recurrence contributions are accumulated additively so that
//! `log_gamma` stays on the principal branch, continuous on `C \ (-inf, 0]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar used for every special-function and contour computation.
pub type ComplexValue = Complex64;

const STIRLING_THRESHOLD: f64 = 10.0;

/// B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn check_argument(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(z));
    }
    Ok(())
}

fn check_value(z: Complex64, value: Complex64, what: &str) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("{what}({z}) is not representable")))
    }
}

/// `cot(pi z)`, stable for large `|Im z|`.
fn cot_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return cot_pi(z.conj()).conj();
    }
    if z.im == 0.0 {
        let x = PI * z.re;
        return Complex64::new(x.cos() / x.sin(), 0.0);
    }
    // |e^{2 pi i z}| < 1 in the upper half plane.
    let w = (Complex64::i() * 2.0 * PI * z).exp();
    Complex64::i() * (w + 1.0) / (w - 1.0)
}

fn stirling_log_gamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        series += term * (b / (2.0 * k * (2.0 * k - 1.0)));
        term *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

/// Principal branch of `log Gamma(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    let value = if z.re < 0.0 {
        reflected_log_gamma(z)?
    } else {
        lifted_log_gamma(z)
    };
    check_value(z, value, "log_gamma")
}

fn lifted_log_gamma(mut z: Complex64) -> Complex64 {
    // log Gamma(z) = log Gamma(z + N) - sum_{k<N} log(z + k)
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < STIRLING_THRESHOLD {
        shift += z.ln();
        z += 1.0;
    }
    stirling_log_gamma(z) - shift
}

fn reflected_log_gamma(z: Complex64) -> Result<Complex64> {
    if z.im < 0.0 {
        return Ok(reflected_log_gamma(z.conj())?.conj());
    }
    // Upper half plane (and the upper rim of the cut):
    // log Gamma(z) = ln pi - log Gamma(1 - z) + ln 2 - i pi/2 + i pi z - log(1 - e^{2 pi i z}).
    // Both sides are continuous on the closed upper half plane minus the poles
    // and agree at z = 1/2, so no 2 pi i correction is needed.
    let i = Complex64::i();
    let w = (i * 2.0 * PI * z).exp();
    let value =
        PI.ln() - lifted_log_gamma(1.0 - z) + std::f64::consts::LN_2 - i * (PI / 2.0) + i * PI * z - (1.0 - w).ln();
    Ok(value)
}

fn stirling_digamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut term = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        series += term * (b / (2.0 * k));
        term *= inv2;
    }
    z.ln() - 0.5 * inv - series
}

fn stirling_trigamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut term = inv2 * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for b in BERNOULLI.iter() {
        series += term * *b;
        term *= inv2;
    }
    inv + 0.5 * inv2 + series
}

fn stirling_tetragamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut term = inv2 * inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        series += term * (b * (2.0 * k + 1.0));
        term *= inv2;
    }
    -inv2 - inv2 * inv - series
}

/// Digamma function `psi = Gamma'/Gamma`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    let value = if z.re < 0.0 {
        // psi(z) = psi(1 - z) - pi cot(pi z)
        lifted_digamma(1.0 - z) - PI * cot_pi(z)
    } else {
        lifted_digamma(z)
    };
    check_value(z, value, "digamma")
}

fn lifted_digamma(mut z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < STIRLING_THRESHOLD {
        shift += z.inv();
        z += 1.0;
    }
    stirling_digamma(z) - shift
}

fn lifted_polygamma(order: u32, mut z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < STIRLING_THRESHOLD {
        let inv = z.inv();
        shift += match order {
            1 => inv * inv,
            _ => -2.0 * inv * inv * inv,
        };
        z += 1.0;
    }
    let tail = match order {
        1 => stirling_trigamma(z),
        _ => stirling_tetragamma(z),
    };
    tail + shift
}

/// Polygamma function `psi^(k)` for `k` in {1, 2}.
pub fn polygamma(order: u32, z: Complex64) -> Result<Complex64> {
    if order != 1 && order != 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    check_argument(z)?;
    let value = if z.re < 0.0 {
        let cot = cot_pi(z);
        let csc2 = 1.0 + cot * cot;
        match order {
            // psi'(z) + psi'(1 - z) = pi^2 csc^2(pi z)
            1 => PI * PI * csc2 - lifted_polygamma(1, 1.0 - z),
            // psi''(z) = psi''(1 - z) - 2 pi^3 csc^2(pi z) cot(pi z)
            _ => lifted_polygamma(2, 1.0 - z) - 2.0 * PI * PI * PI * csc2 * cot,
        }
    } else {
        lifted_polygamma(order, z)
    };
    check_value(z, value, "polygamma")
}

/// `psi` on the positive real axis.
pub fn digamma_real(x: f64) -> Result<f64> {
    digamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

/// `psi^(k)` on the positive real axis.
pub fn polygamma_real(order: u32, x: f64) -> Result<f64> {
    polygamma(order, Complex64::new(x, 0.0)).map(|v| v.re)
}
