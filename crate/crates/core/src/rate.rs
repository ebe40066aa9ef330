//! The rate function `F(s, θ)`.
//!
//! `b(s, θ)` is the positive root of
//! `H(b) = ∫₀¹ ih'(bu) / √(1 − u²) du`, where
//! `ih'(x) = (θ/2)[ψ(θ(1 − ix/2)) + ψ(θ(1 + ix/2))] + s`.
//! Then `f = (b²/π) ∫₀¹ ih'(bu) √(1 − u²) du` and `F(s) = −∫_s^{s*} f(t) dt`
//! with `s* = −θψ(θ)`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{chebyshev_first, chebyshev_second, panel_legendre, Rule};
use crate::special_fn::{digamma, digamma_real, polygamma, polygamma_real};

/// Largest θ accepted by the rate module.
pub const THETA_MAX: f64 = 1.0;

const BISECTION_WIDTH: f64 = 1e-12;
const H_TOLERANCE: f64 = 1e-10;
const BRACKET_LIMIT: f64 = 1e6;
const IMAG_LIMIT: f64 = 1e-9;
/// Below this distance to `s*` the edge asymptotic replaces the solver.
const EDGE_SWITCH: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub m_cheb1: usize,
    pub m_cheb2: usize,
    pub m_legendre: usize,
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            m_cheb1: 64,
            m_cheb2: 64,
            m_legendre: 32,
            panels: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let all = [self.m_cheb1, self.m_cheb2, self.m_legendre, self.panels];
        if all.iter().any(|&k| k < 8) {
            return Err(Error::Config(format!("quadrature sizes must be >= 8: {self:?}")));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            m_cheb1: 2 * self.m_cheb1,
            m_cheb2: 2 * self.m_cheb2,
            m_legendre: 2 * self.m_legendre,
            panels: self.panels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateQuery {
    pub s: f64,
    pub theta: f64,
    pub quad: QuadratureSpec,
}

impl RateQuery {
    pub fn new(s: f64, theta: f64) -> Self {
        Self {
            s,
            theta,
            quad: QuadratureSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quad.validate()?;
        if !(self.theta >= 0.0 && self.theta <= THETA_MAX) {
            return Err(Error::Domain(format!(
                "theta must lie in [0, {THETA_MAX}], got {}",
                self.theta
            )));
        }
        let star = s_star(self.theta)?;
        if !(self.s > 0.0 && self.s <= star) {
            return Err(Error::Domain(format!("s must lie in (0, s*={star}], got {}", self.s)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub s: f64,
    pub theta: f64,
    pub b: f64,
    pub f: f64,
    #[serde(rename = "F")]
    pub big_f: f64,
    pub s_star: f64,
    #[serde(rename = "residual_H")]
    pub residual_h: f64,
    pub refine_delta: f64,
}

/// `s*(θ) = −θψ(θ)`, with `s*(0) = 1`.
pub fn s_star(theta: f64) -> Result<f64> {
    if theta == 0.0 {
        return Ok(1.0);
    }
    if !(theta > 0.0 && theta <= THETA_MAX) {
        return Err(Error::Domain(format!(
            "theta must lie in [0, {THETA_MAX}], got {theta}"
        )));
    }
    Ok(-theta * digamma_real(theta)?)
}

/// `(b₀, f₀, F₀)` at θ = 0.
pub fn zero_temp_closed_forms(s: f64) -> Result<(f64, f64, f64)> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("closed forms need 0 < s <= 1, got {s}")));
    }
    let b0 = 2.0 * (1.0 / (s * s) - 1.0).max(0.0).sqrt();
    let f0 = 2.0 - s - 1.0 / s;
    let big_f0 = -0.5 * s * s - 1.5 + 2.0 * s - s.ln();
    Ok((b0, f0, big_f0))
}

/// `ih'(x)` and the absolute imaginary part of the evaluated sum.
fn ih_prime(x: f64, s: f64, theta: f64) -> Result<(f64, f64)> {
    let z = Complex64::new(theta, 0.5 * theta * x);
    let v = 0.5 * theta * (digamma(z)? + digamma(z.conj())?) + s;
    Ok((v.re, v.im.abs()))
}

/// `ih''(x) = −(θ²/2) Im ψ'(θ(1 + ix/2))`.
fn ih_second(x: f64, theta: f64) -> Result<f64> {
    let z = Complex64::new(theta, 0.5 * theta * x);
    Ok(-0.5 * theta * theta * polygamma(1, z)?.im)
}

fn check_imag(imag: f64) -> Result<()> {
    if imag > IMAG_LIMIT {
        return Err(Error::Quadrature(format!(
            "imaginary residual {imag:e} exceeds {IMAG_LIMIT:e}"
        )));
    }
    Ok(())
}

/// `H(b)` by Gauss–Chebyshev of the first kind (`m` nodes on [-1, 1], using evenness).
pub fn endpoint_h(b: f64, s: f64, theta: f64, m: usize) -> Result<f64> {
    endpoint_h_with_rule(b, s, theta, &chebyshev_first(m))
}

fn endpoint_h_with_rule(b: f64, s: f64, theta: f64, rule: &Rule) -> Result<f64> {
    let mut sum = 0.0;
    let mut imag: f64 = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (v, im) = ih_prime(b * x, s, theta)?;
        sum += w * v;
        imag = imag.max(im);
    }
    check_imag(imag)?;
    Ok(0.5 * sum)
}

/// `H'(b) = ∫₀¹ u ih''(bu) / √(1 − u²) du`.
pub fn endpoint_h_prime(b: f64, theta: f64, m: usize) -> Result<f64> {
    endpoint_h_prime_with_rule(b, theta, &chebyshev_first(m))
}

fn endpoint_h_prime_with_rule(b: f64, theta: f64, rule: &Rule) -> Result<f64> {
    let mut sum = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        sum += w * x * ih_second(b * x, theta)?;
    }
    Ok(0.5 * sum)
}

/// Leading behaviour `b ≈ 4√((s + θψ(θ)) / (θ³ψ''(θ)))` as `s → s*`.
pub fn b_edge_asymptotic(s: f64, theta: f64) -> Result<f64> {
    let psi = digamma_real(theta)?;
    let psi2 = polygamma_real(2, theta)?;
    Ok(4.0 * ((s + theta * psi) / (theta.powi(3) * psi2)).max(0.0).sqrt())
}

/// Leading behaviour `F ≈ (2/(3θ³ψ''(θ)))(s + θψ(θ))³` as `s → s*`.
pub fn big_f_edge_asymptotic(s: f64, theta: f64) -> Result<f64> {
    let psi = digamma_real(theta)?;
    let psi2 = polygamma_real(2, theta)?;
    Ok(2.0 / (3.0 * theta.powi(3) * psi2) * (s + theta * psi).powi(3))
}

/// Solves `H(b) = 0`; returns `(b, |H(b)|)`.
pub fn solve_b(q: &RateQuery) -> Result<(f64, f64)> {
    q.validate()?;
    if q.theta == 0.0 {
        return Ok((zero_temp_closed_forms(q.s)?.0, 0.0));
    }
    solve_b_unchecked(q.s, q.theta, &chebyshev_first(q.quad.m_cheb1))
}

fn solve_b_unchecked(s: f64, theta: f64, rule: &Rule) -> Result<(f64, f64)> {
    let star = s_star(theta)?;
    if star - s <= 0.0 {
        return Ok((0.0, 0.0));
    }
    if star - s < EDGE_SWITCH {
        let b = b_edge_asymptotic(s, theta)?;
        return Ok((b, endpoint_h_with_rule(b, s, theta, rule)?.abs()));
    }
    let h = |b: f64| endpoint_h_with_rule(b, s, theta, rule);
    let mut lo = 0.0;
    let mut hi = 4.0;
    while h(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::NoRoot(format!(
                "no sign change of H below b={BRACKET_LIMIT:e} (s={s}, theta={theta})"
            )));
        }
    }
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut b = 0.5 * (lo + hi);
    let mut hb = h(b)?;
    for _ in 0..2 {
        let d = endpoint_h_prime_with_rule(b, theta, rule)?;
        if d <= 0.0 {
            break;
        }
        let next = b - hb / d;
        if !(next > lo - BISECTION_WIDTH && next < hi + BISECTION_WIDTH) {
            break;
        }
        let hn = h(next)?;
        if hn.abs() >= hb.abs() {
            break;
        }
        b = next;
        hb = hn;
    }
    if hb.abs() > H_TOLERANCE {
        return Err(Error::NoRoot(format!(
            "|H(b)|={:e} above tolerance at s={s}, theta={theta}",
            hb.abs()
        )));
    }
    Ok((b, hb.abs()))
}

/// `f(s, θ)` for a given endpoint `b`, by Gauss–Chebyshev of the second kind.
pub fn f_value(s: f64, theta: f64, b: f64, q: &QuadratureSpec) -> Result<f64> {
    if theta == 0.0 {
        return Ok(zero_temp_closed_forms(s)?.1);
    }
    f_value_with_rule(s, theta, b, &chebyshev_second(q.m_cheb2))
}

fn f_value_with_rule(s: f64, theta: f64, b: f64, rule: &Rule) -> Result<f64> {
    if b == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    let mut imag: f64 = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (v, im) = ih_prime(b * x, s, theta)?;
        sum += w * v;
        imag = imag.max(im);
    }
    check_imag(imag)?;
    Ok(b * b / std::f64::consts::PI * 0.5 * sum)
}

/// Integration panels on `[s, s*]`: equal panels then a final edge panel of width
/// `min(0.1 (s* − s), 1e-2)`.
fn t_edges(s: f64, star: f64, panels: usize) -> Vec<f64> {
    let w = (0.1 * (star - s)).min(1e-2);
    let split = star - w;
    let mut edges: Vec<f64> = (0..panels)
        .map(|k| s + (split - s) * k as f64 / (panels - 1) as f64)
        .collect();
    edges.push(star);
    edges
}

fn big_f_at(s: f64, theta: f64, quad: &QuadratureSpec) -> Result<(f64, f64, f64)> {
    let cheb1 = chebyshev_first(quad.m_cheb1);
    let cheb2 = chebyshev_second(quad.m_cheb2);
    let star = s_star(theta)?;
    let (b, residual) = solve_b_unchecked(s, theta, &cheb1)?;
    if star - s <= 0.0 {
        return Ok((b, residual, 0.0));
    }
    let rule = panel_legendre(&t_edges(s, star, quad.panels), quad.m_legendre);
    let mut integral = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (bt, _) = solve_b_unchecked(t, theta, &cheb1)?;
        integral += w * f_value_with_rule(t, theta, bt, &cheb2)?;
    }
    Ok((b, residual, -integral))
}

/// `F(s, θ) = −∫_s^{s*} f(t, θ) dt`, with `refine_delta = |F(m) − F(2m)|`.
pub fn big_f(q: &RateQuery) -> Result<RateResult> {
    q.validate()?;
    let star = s_star(q.theta)?;
    if q.theta == 0.0 {
        let (b, f, big_f) = zero_temp_closed_forms(q.s)?;
        return Ok(RateResult {
            s: q.s,
            theta: 0.0,
            b,
            f,
            big_f,
            s_star: star,
            residual_h: 0.0,
            refine_delta: 0.0,
        });
    }
    let (b, residual, coarse) = big_f_at(q.s, q.theta, &q.quad)?;
    let fine_quad = q.quad.doubled();
    let (_, _, fine) = big_f_at(q.s, q.theta, &fine_quad)?;
    let f = f_value_with_rule(q.s, q.theta, b, &chebyshev_second(q.quad.m_cheb2))?;
    Ok(RateResult {
        s: q.s,
        theta: q.theta,
        b,
        f,
        big_f: coarse,
        s_star: star,
        residual_h: residual,
        refine_delta: (coarse - fine).abs(),
    })
}

/// One row of a rate table; failed rows carry the error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub s: f64,
    pub theta: f64,
    pub result: Option<RateResult>,
    pub error: Option<String>,
}

/// Evaluates `big_f` over `s_grid`; rows are computed in parallel and returned in grid order.
pub fn rate_table(s_grid: &[f64], theta: f64, quad: QuadratureSpec) -> Vec<RateRow> {
    s_grid
        .par_iter()
        .map(|&s| {
            let q = RateQuery { s, theta, quad };
            match big_f(&q) {
                Ok(r) => RateRow {
                    s,
                    theta,
                    result: Some(r),
                    error: None,
                },
                Err(e) => RateRow {
                    s,
                    theta,
                    result: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

pub const RATE_CSV_HEADER: &str = "s,theta,b,f,F,residual_H,refine_delta";

/// CSV for a rate table; failed rows have `NaN` numeric fields.
pub fn rate_table_csv(rows: &[RateRow]) -> String {
    let mut out = String::from(RATE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let r = row.result.unwrap_or(RateResult {
            s: row.s,
            theta: row.theta,
            b: f64::NAN,
            f: f64::NAN,
            big_f: f64::NAN,
            s_star: f64::NAN,
            residual_h: f64::NAN,
            refine_delta: f64::NAN,
        });
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            row.s, row.theta, r.b, r.f, r.big_f, r.residual_h, r.refine_delta
        );
    }
    out
}
