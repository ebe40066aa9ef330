//! The phase function `h(ζ; s, θ)`, its derivatives and θ→0 limit, the
//! sign regions of `Re h(ζ; s, 0)`, and the `g`/`q` functions built from `h`
//! by a Cauchy transform over the cut `[-b, b]`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::chebyshev_first;
use crate::special_fn::{digamma, log_gamma, polygamma};

/// Parameters `(s, θ)` of the phase function; `theta == 0` selects the limit branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub s: f64,
    pub theta: f64,
}

impl PhaseParams {
    pub fn new(s: f64, theta: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("s must be positive, got {s}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("theta must be >= 0, got {theta}")));
        }
        Ok(Self { s, theta })
    }
}

fn singular(zeta: Complex64, p: &PhaseParams) -> Error {
    Error::Singularity(format!("h(.; s={}, theta={}) at zeta={zeta}", p.s, p.theta))
}

fn lift(e: Error, zeta: Complex64, p: &PhaseParams) -> Error {
    match e {
        Error::Pole(_) => singular(zeta, p),
        other => other,
    }
}

/// `h`, `h'` or `h''` at `zeta` (order 0, 1, 2).
///
/// For `θ > 0`:
/// `h = log Γ(θ(1 − iζ/2)) − log Γ(θ(1 + iζ/2)) − isζ`,
/// `h' = −i[(θ/2)(ψ(θ(1 − iζ/2)) + ψ(θ(1 + iζ/2))) + s]`,
/// `h'' = (θ²/4)[ψ'(θ(1 + iζ/2)) − ψ'(θ(1 − iζ/2))]`.
///
/// For `θ = 0` the limit `log(2 + iζ) − log(2 − iζ) − isζ` and its derivatives.
pub fn h_eval(order: u32, zeta: Complex64, p: &PhaseParams) -> Result<Complex64> {
    if !zeta.re.is_finite() || !zeta.im.is_finite() {
        return Err(Error::Domain(format!("non-finite zeta {zeta}")));
    }
    let i = Complex64::i();
    if p.theta == 0.0 {
        let plus = 2.0 + i * zeta;
        let minus = 2.0 - i * zeta;
        if plus.norm() == 0.0 || minus.norm() == 0.0 {
            return Err(singular(zeta, p));
        }
        return match order {
            0 => Ok(plus.ln() - minus.ln() - i * p.s * zeta),
            1 => Ok(i * 4.0 / (plus * minus) - i * p.s),
            2 => {
                let d = plus * minus;
                Ok(-8.0 * i * zeta / (d * d))
            }
            k => Err(Error::UnsupportedOrder(k)),
        };
    }
    let th = p.theta;
    let a = th * (1.0 - i * zeta / 2.0);
    let b = th * (1.0 + i * zeta / 2.0);
    let value = match order {
        0 => log_gamma(a).map_err(|e| lift(e, zeta, p))? - log_gamma(b).map_err(|e| lift(e, zeta, p))? - i * p.s * zeta,
        1 => {
            let sum = digamma(a).map_err(|e| lift(e, zeta, p))? + digamma(b).map_err(|e| lift(e, zeta, p))?;
            -i * (0.5 * th * sum + p.s)
        }
        2 => {
            let diff =
                polygamma(1, b).map_err(|e| lift(e, zeta, p))? - polygamma(1, a).map_err(|e| lift(e, zeta, p))?;
            0.25 * th * th * diff
        }
        k => return Err(Error::UnsupportedOrder(k)),
    };
    Ok(value)
}

/// Per-node sign of `Re h(ζ; s, 0)` on a rectangular grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major over the imaginary axis: `cells[iy * nx + ix]`.
    pub cells: Vec<i8>,
}

/// Band of `|Re h|` reported as sign 0.
pub const SIGN_TOLERANCE: f64 = 1e-9;

impl SignGrid {
    pub fn node(&self, ix: usize, iy: usize) -> Complex64 {
        let re = self.re_min + (self.re_max - self.re_min) * ix as f64 / (self.nx - 1) as f64;
        let im = self.im_min + (self.im_max - self.im_min) * iy as f64 / (self.ny - 1) as f64;
        Complex64::new(re, im)
    }

    pub fn sign_at(&self, ix: usize, iy: usize) -> i8 {
        self.cells[iy * self.nx + ix]
    }

    /// CSV with header `re,im,sign`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,sign\n");
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let z = self.node(ix, iy);
                let _ = writeln!(out, "{:.16e},{:.16e},{}", z.re, z.im, self.sign_at(ix, iy));
            }
        }
        out
    }
}

/// `Re h(ζ; s, 0) = log|2 + iζ| − log|2 − iζ| + s Im ζ`.
pub fn re_h_zero_temp(zeta: Complex64, s: f64) -> f64 {
    let i = Complex64::i();
    (2.0 + i * zeta).norm().ln() - (2.0 - i * zeta).norm().ln() + s * zeta.im
}

pub fn sign_grid(s: f64, re_range: (f64, f64), im_range: (f64, f64), nx: usize, ny: usize) -> Result<SignGrid> {
    if nx < 2 || ny < 2 {
        return Err(Error::Config("sign grid needs nx, ny >= 2".into()));
    }
    if re_range.0 >= re_range.1 || im_range.0 >= im_range.1 {
        return Err(Error::Config("sign grid bounds must be increasing".into()));
    }
    let mut grid = SignGrid {
        re_min: re_range.0,
        re_max: re_range.1,
        im_min: im_range.0,
        im_max: im_range.1,
        nx,
        ny,
        cells: Vec::with_capacity(nx * ny),
    };
    for iy in 0..ny {
        for ix in 0..nx {
            let mut z = grid.node(ix, iy);
            for pole in [Complex64::new(0.0, 2.0), Complex64::new(0.0, -2.0)] {
                if (z - pole).norm() < 1e-9 {
                    z += Complex64::new(2e-9, 0.0);
                }
            }
            let v = re_h_zero_temp(z, s);
            let sign = if v.abs() < SIGN_TOLERANCE {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            };
            grid.cells.push(sign);
        }
    }
    Ok(grid)
}

/// `a(ζ) = ((ζ − b)(ζ + b))^{1/2}` with cut `[-b, b]` and `a(ζ) ~ ζ` at infinity.
pub fn cut_root(zeta: Complex64, b: f64) -> Complex64 {
    (0.5 * ((zeta - b).ln() + (zeta + b).ln())).exp()
}

/// Relative distance below which the subtracted Cauchy transform is used.
const NEAR_CUT: f64 = 0.05;

fn check_cut(zeta: Complex64, b: f64, m: usize) -> Result<()> {
    if m < 16 {
        return Err(Error::Config(format!("g/q quadrature needs m >= 16, got {m}")));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("b must be positive, got {b}")));
    }
    if zeta.im == 0.0 && zeta.re.abs() <= b {
        return Err(Error::Domain(format!("zeta={zeta} lies on the cut [-{b}, {b}]")));
    }
    Ok(())
}

fn cut_distance(zeta: Complex64, b: f64) -> f64 {
    let x = zeta.re.clamp(-b, b);
    (zeta - x).norm()
}

/// Returns `(q, h(ζ)/2)` if the subtracted form is used, else `(g, 0)`.
fn cauchy_transform(zeta: Complex64, p: &PhaseParams, b: f64, m: usize) -> Result<(Complex64, Option<Complex64>)> {
    let near = cut_distance(zeta, b) < NEAR_CUT * b;
    let m = if near { 2 * m } else { m };
    let rule = chebyshev_first(m);
    let a = cut_root(zeta, b);
    let h_zeta = if near { Some(h_eval(0, zeta, p)?) } else { None };
    let mut sum = Complex64::new(0.0, 0.0);
    for &x in &rule.nodes {
        let u = Complex64::new(b * x, 0.0);
        let mut hu = h_eval(0, u, p)?;
        if let Some(hz) = h_zeta {
            hu -= hz;
        }
        sum += hu / (u - zeta);
    }
    // a(ζ)/(2πi) ∫ h(u) du / (a₊(u)(u − ζ)) with a₊(u) = i√(b² − u²)
    let value = -a * sum / (2.0 * m as f64);
    Ok((value, h_zeta.map(|h| 0.5 * h)))
}

/// `g(ζ)`, the bounded solution of `g₊ + g₋ = h` on `[-b, b]` vanishing at infinity.
pub fn g_eval(zeta: Complex64, s: f64, theta: f64, b: f64, m: usize) -> Result<Complex64> {
    check_cut(zeta, b, m)?;
    let p = PhaseParams::new(s, theta)?;
    let (v, half_h) = cauchy_transform(zeta, &p, b, m)?;
    Ok(match half_h {
        Some(hh) => v + hh,
        None => v,
    })
}

/// `g(ζ)` together with `|g(m) − g(2m)|`.
pub fn g_eval_refined(zeta: Complex64, s: f64, theta: f64, b: f64, m: usize) -> Result<(Complex64, f64)> {
    let coarse = g_eval(zeta, s, theta, b, m)?;
    let fine = g_eval(zeta, s, theta, b, 2 * m)?;
    Ok((fine, (fine - coarse).norm()))
}

/// `q(ζ) = g(ζ) − h(ζ)/2`.
pub fn q_eval(zeta: Complex64, s: f64, theta: f64, b: f64, m: usize) -> Result<Complex64> {
    check_cut(zeta, b, m)?;
    let p = PhaseParams::new(s, theta)?;
    let (v, half_h) = cauchy_transform(zeta, &p, b, m)?;
    match half_h {
        Some(_) => Ok(v),
        None => Ok(v - 0.5 * h_eval(0, zeta, &p)?),
    }
}

/// Closed form `q'(ζ; s, 0) = isζ a(ζ) / (2(ζ² + 4))`, valid for `b = 2√(1/s² − 1)`.
pub fn q_prime_zero_temp(zeta: Complex64, s: f64, b: f64) -> Result<Complex64> {
    check_cut(zeta, b, 16)?;
    let d = zeta * zeta + 4.0;
    if d.norm() == 0.0 {
        return Err(Error::Singularity(format!("q'(.; s, 0) at zeta={zeta}")));
    }
    Ok(Complex64::i() * s * zeta * cut_root(zeta, b) / (2.0 * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn h_vanishes_at_origin() {
        for theta in [0.0, 0.3, 1.0] {
            let p = PhaseParams::new(1.3, theta).unwrap();
            assert!(h_eval(0, c(0.0, 0.0), &p).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn zero_temperature_value_at_i() {
        let p = PhaseParams::new(1.5, 0.0).unwrap();
        let v = h_eval(0, c(0.0, 1.0), &p).unwrap();
        assert!((v.re - (1.5 - 3f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn h_is_odd() {
        let p = PhaseParams::new(1.0, 0.3).unwrap();
        let z = c(0.8, 0.4);
        let r = h_eval(0, z, &p).unwrap() + h_eval(0, -z, &p).unwrap();
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn singular_points() {
        let p0 = PhaseParams::new(1.0, 0.0).unwrap();
        assert!(matches!(h_eval(0, c(0.0, 2.0), &p0), Err(Error::Singularity(_))));
        let p = PhaseParams::new(1.0, 0.5).unwrap();
        // θ(1 + iζ/2) = 0 at ζ = 2i
        assert!(matches!(h_eval(1, c(0.0, 2.0), &p), Err(Error::Singularity(_))));
        // θ(1 − iζ/2) = −1 at ζ = −2i(1 + 1/θ)
        assert!(matches!(h_eval(0, c(0.0, -6.0), &p), Err(Error::Singularity(_))));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for theta in [0.0, 0.4] {
            let p = PhaseParams::new(0.7, theta).unwrap();
            let z = c(0.9, 0.3);
            let e = 1e-5;
            let fd1 = (h_eval(0, z + e, &p).unwrap() - h_eval(0, z - e, &p).unwrap()) / (2.0 * e);
            let fd2 = (h_eval(1, z + e, &p).unwrap() - h_eval(1, z - e, &p).unwrap()) / (2.0 * e);
            assert!((fd1 - h_eval(1, z, &p).unwrap()).norm() < 1e-8);
            assert!((fd2 - h_eval(2, z, &p).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn sign_grid_examples() {
        let g = sign_grid(1.5, (-1.0, 1.0), (-1.0, 1.0), 3, 3).unwrap();
        assert_eq!(g.sign_at(1, 2), 1); // ζ = i
        assert_eq!(g.sign_at(1, 0), -1); // ζ = −i
        assert_eq!(g.sign_at(0, 1), 0); // ζ = −1
        assert_eq!(g.sign_at(2, 1), 0);
    }

    #[test]
    fn sign_grid_avoids_poles() {
        let g = sign_grid(1.0, (-1.0, 1.0), (-2.0, 2.0), 3, 5).unwrap();
        assert_eq!(g.cells.len(), 15);
        assert!(g.to_csv().starts_with("re,im,sign\n"));
    }

    #[test]
    fn cut_root_branch() {
        let b = 2.0;
        assert!((cut_root(c(3.0, 0.0), b) - c(5f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!((cut_root(c(-3.0, 0.0), b) - c(-(5f64.sqrt()), 0.0)).norm() < 1e-14);
        let above = cut_root(c(0.5, 1e-14), b);
        assert!((above - c(0.0, (4.0f64 - 0.25).sqrt())).norm() < 1e-12);
        let far = c(3e4, -4e4);
        assert!((cut_root(far, b) / far - 1.0).norm() < 1e-8);
    }

    #[test]
    fn g_rejects_points_on_the_cut() {
        assert!(matches!(g_eval(c(0.5, 0.0), 0.5, 0.3, 2.0, 32), Err(Error::Domain(_))));
        assert!(matches!(g_eval(c(3.0, 0.0), 0.5, 0.3, 2.0, 8), Err(Error::Config(_))));
    }

    #[test]
    fn g_is_odd_and_decays() {
        let z = c(1.3, 0.7);
        let a = g_eval(z, 0.6, 0.2, 2.5, 64).unwrap();
        let b = g_eval(-z, 0.6, 0.2, 2.5, 64).unwrap();
        assert!((a + b).norm() < 1e-12);
        let far = g_eval(c(0.0, 1e4), 0.6, 0.2, 2.5, 64).unwrap();
        assert!(far.norm() < 1e-3);
    }

    #[test]
    fn q_prime_closed_form_sign_on_real_axis() {
        let s = 0.5;
        let b = 2.0 * (1.0 / (s * s) - 1.0f64).sqrt();
        let v = q_prime_zero_temp(c(1.05 * b, 0.0), s, b).unwrap();
        let w = -Complex64::i() * v;
        assert!(w.re > 0.0 && w.im.abs() < 1e-14);
    }
}
