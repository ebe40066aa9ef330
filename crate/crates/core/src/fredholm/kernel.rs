//! The rescaled kernel
//! `L̂(y, y') = (2πi)^{-2} ∮_Σ du ∫_V dv Ŵ(v) e^{−vy} / (Ŵ(u) e^{−uy'}) / (v − u)`
//! with `Ŵ(z) = Γ(θ(1 − z/2n))ⁿ / Γ(θ(1 + z/2n))ⁿ` (rational at θ = 0), and the
//! step and smoothed determinants built from it.
//!
//! Each determinant has two independent discretizations: a Nyström grid in `y`,
//! and the `L²(Σ)` form obtained by doing the `y`-integral in closed form
//! (`det(1 − AB) = det(1 − BA)`). For the step function
//! `∫_s^∞ e^{−(v−u)y} dy = e^{−(v−u)s} / (v − u)`; for the sigmoid
//! `σ(y) = 1/(1 + e^{−k(y−s)})`, `k = 2n/θ`,
//! `∫ σ(y) e^{−(v−u)y} dy = e^{−(v−u)s} (π/k) / sin(π(v − u)/k)` for `0 < Re(v − u) < k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{det_result, ContourSpec, DetResult, NystromGrid};
use crate::error::{Error, Result};
use crate::linalg::{log_det, CMatrix, LogDet};
use crate::rate::s_star;
use crate::special_fn::log_gamma;

const LOG_LIMIT: f64 = 700.0;
const TRUNCATION_LIMIT: f64 = 1e-6;

/// `log Ŵ(z)`.
pub fn log_w_hat(z: Complex64, n: usize, theta: f64) -> Result<Complex64> {
    let nf = n as f64;
    let x = z / (2.0 * nf);
    if theta == 0.0 {
        let (p, m) = (1.0 + x, 1.0 - x);
        if p.norm() == 0.0 || m.norm() == 0.0 {
            return Err(Error::Singularity(format!("Ŵ at z={z}")));
        }
        return Ok(nf * (p.ln() - m.ln()));
    }
    let l = log_gamma(theta * (1.0 - x)).map_err(|_| Error::Singularity(format!("Ŵ pole at z={z}")))?;
    let r = log_gamma(theta * (1.0 + x)).map_err(|_| Error::Singularity(format!("Ŵ zero at z={z}")))?;
    Ok(nf * (l - r))
}

/// Σ circle and `v`-contour for the kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelContours {
    pub sigma: ContourSpec,
    pub v: ContourSpec,
}

fn default_mu(n: usize) -> usize {
    if n <= 16 {
        256
    } else {
        16 * n
    }
}

impl KernelContours {
    /// Circle at `−2n` of radius `2n − 1/2`; wedge with apex `3/2`, opening `π/3`,
    /// reaching `max(20n, 80/y_min)` so that `e^{−vy}` has decayed for all `y >= y_min`.
    /// At θ = 0, `Ŵ → (−1)ⁿ` along the wedge, so the reach really matters for small `y`;
    /// `y_min` is floored at `1e−4`.
    pub fn wedge_default(n: usize, y_min: f64) -> Self {
        let nf = n as f64;
        let reach = (20.0 * nf).max(80.0 / y_min.max(1e-4));
        Self {
            sigma: ContourSpec::Circle {
                center: Complex64::new(-2.0 * nf, 0.0),
                radius: 2.0 * nf - 0.5,
                m: default_mu(n),
            },
            v: ContourSpec::Wedge {
                apex: 1.5,
                angle: PI / 3.0,
                reach,
                m: 16,
                first: 0.5,
                ratio: 1.5,
            },
        }
    }

    /// Contours for the smoothed determinant in its `L²(Σ)` form; requires
    /// `k = 2n/θ > 4n + 1` so that `0 < Re(v − u) < k` with room on both sides.
    pub fn smoothed_default(n: usize, theta: f64, s: f64) -> Result<Self> {
        let nf = n as f64;
        if theta <= 0.0 {
            return Err(Error::Contour("smoothed determinant needs θ > 0".into()));
        }
        let k = 2.0 * nf / theta;
        let c = if k > 4.0 * nf {
            nf.min(0.5 * (k - 4.0 * nf))
        } else {
            0.5 * (2.0 * nf).min(k)
        };
        let r = (2.0 * nf - 0.5).min(k - c - 2.0 * nf - 0.5);
        if r <= 0.0 {
            return Err(Error::Contour(format!("no admissible Σ for n={n}, θ={theta} (k={k})")));
        }
        // distance from the line to the nearest singularity of the integrand
        let dist = (c + 2.0 * nf - r).min(2.0 * nf - c).min(k - 2.0 * nf - c - r);
        let first = (0.5 * dist).clamp(0.25, 2.0);
        let max_width = first.max((0.5 * k).min(4.0 * PI / s.abs().max(0.1)));
        Ok(Self {
            sigma: ContourSpec::Circle {
                center: Complex64::new(-2.0 * nf, 0.0),
                radius: r,
                m: default_mu(n),
            },
            v: ContourSpec::VLine {
                c,
                v_cut: 36.0 * k / PI,
                m: 16,
                first,
                ratio: 1.25,
                max_width,
            },
        })
    }

    pub fn refined(&self) -> Self {
        Self {
            sigma: self.sigma.refined(),
            v: self.v.refined(),
        }
    }

    fn check_sigma(&self, n: usize) -> Result<(Complex64, f64)> {
        let nf = n as f64;
        let (center, radius) = match self.sigma {
            ContourSpec::Circle { center, radius, .. } => (center, radius),
            _ => return Err(Error::Contour("Σ must be a circle".into())),
        };
        if (center - Complex64::new(-2.0 * nf, 0.0)).norm() > 1e-12 || radius >= 2.0 * nf {
            return Err(Error::Contour(format!(
                "Σ must be a circle around −2n of radius < 2n (n={n})"
            )));
        }
        Ok((center, radius))
    }

    fn check(&self, n: usize, theta: f64) -> Result<()> {
        let nf = n as f64;
        let (center, radius) = self.check_sigma(n)?;
        let c = match self.v {
            ContourSpec::VLine { c, .. } | ContourSpec::Wedge { apex: c, .. } => c,
            _ => return Err(Error::Contour("V must be a vertical line or a wedge".into())),
        };
        let upper = if theta > 0.0 {
            (2.0 * nf).min(2.0 * nf * (1.0 - theta) / theta)
        } else {
            2.0 * nf
        };
        if !(c > 1.0 && c < upper) {
            return Err(Error::Contour(format!(
                "V must cross the real axis in (1, {upper}), got {c}"
            )));
        }
        if c <= center.re + radius {
            return Err(Error::Contour("V must lie to the right of Σ".into()));
        }
        Ok(())
    }
}

struct Nodes {
    u: NystromGrid,
    lw_u: Vec<Complex64>,
    v: NystromGrid,
    lw_v: Vec<Complex64>,
}

fn nodes(n: usize, theta: f64, contours: &KernelContours) -> Result<Nodes> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 1), got {theta}")));
    }
    let u = contours.sigma.discretize()?;
    let v = contours.v.discretize()?;
    let lw_u = u
        .nodes
        .par_iter()
        .map(|&z| log_w_hat(z, n, theta))
        .collect::<Result<Vec<_>>>()?;
    let lw_v = v
        .nodes
        .par_iter()
        .map(|&z| log_w_hat(z, n, theta))
        .collect::<Result<Vec<_>>>()?;
    Ok(Nodes { u, lw_u, v, lw_v })
}

fn checked_exp(e: Complex64) -> Result<Complex64> {
    if e.re > LOG_LIMIT {
        return Err(Error::Overflow(format!(
            "log-magnitude {} exceeds {LOG_LIMIT}; contour misplaced",
            e.re
        )));
    }
    Ok(e.exp())
}

fn scale() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI).powi(2).inv()
}

/// `L̂(ys[i], yps[j])` as a matrix.
fn kernel_matrix(ys: &[f64], yps: &[f64], nd: &Nodes) -> Result<CMatrix> {
    let (mv, mu) = (nd.v.len(), nd.u.len());
    let ev = try_matrix(ys.len(), mv, |i, k| {
        Ok(nd.v.weights[k] * checked_exp(nd.lw_v[k] - nd.v.nodes[k] * ys[i])?)
    })?;
    // (C · Euᵀ)[k, j] = Σ_l wu_l e^{−log Ŵ(u_l) + u_l y'_j} / (v_k − u_l)
    let eu = try_matrix(mu, yps.len(), |l, j| {
        Ok(nd.u.weights[l] * checked_exp(nd.u.nodes[l] * yps[j] - nd.lw_u[l])?)
    })?;
    let c = CMatrix::from_fn(mv, mu, |k, l| (nd.v.nodes[k] - nd.u.nodes[l]).inv());
    let mut out = ev.matmul(&c.matmul(&eu));
    let s = scale();
    out.data.iter_mut().for_each(|x| *x *= s);
    Ok(out)
}

fn try_matrix<F>(rows: usize, cols: usize, f: F) -> Result<CMatrix>
where
    F: Fn(usize, usize) -> Result<Complex64> + Sync,
{
    let cells: Vec<Result<Complex64>> = (0..rows * cols)
        .into_par_iter()
        .map(|idx| f(idx / cols, idx % cols))
        .collect();
    let data = cells.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CMatrix { rows, cols, data })
}

/// `L̂(y, y')` by double-contour quadrature.
pub fn rescaled_kernel(y: f64, y_prime: f64, n: usize, theta: f64, contours: &KernelContours) -> Result<Complex64> {
    contours.check(n, theta)?;
    let nd = nodes(n, theta, contours)?;
    Ok(kernel_matrix(&[y], &[y_prime], &nd)?.get(0, 0))
}

/// `L̂(ys[i], yps[j])` for whole grids, sharing one set of contour nodes.
pub fn rescaled_kernel_matrix(
    ys: &[f64],
    yps: &[f64],
    n: usize,
    theta: f64,
    contours: &KernelContours,
) -> Result<CMatrix> {
    contours.check(n, theta)?;
    let nd = nodes(n, theta, contours)?;
    kernel_matrix(ys, yps, &nd)
}

/// Marchenko–Pastur density `(2/π)√((1 − y)/y)` on (0, 1), zero elsewhere.
pub fn marchenko_pastur(y: f64) -> f64 {
    if y > 0.0 && y < 1.0 {
        2.0 / PI * ((1.0 - y) / y).sqrt()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpRow {
    pub y: f64,
    pub kernel_over_n: f64,
    pub mp_density: f64,
}

/// `(1/n) L̂(y, y)` at θ = 0 against the Marchenko–Pastur density.
pub fn mp_check(n: usize, ys: &[f64]) -> Result<Vec<MpRow>> {
    let y_min = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let contours = KernelContours::wedge_default(n, y_min);
    let k = rescaled_kernel_matrix(ys, ys, n, 0.0, &contours)?;
    Ok(ys
        .iter()
        .enumerate()
        .map(|(i, &y)| MpRow {
            y,
            kernel_over_n: k.get(i, i).re / n as f64,
            mp_density: marchenko_pastur(y),
        })
        .collect())
}

/// Options shared by the step and smoothed determinants. `None` picks defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct DetOptions {
    pub contours: Option<KernelContours>,
    /// `y`-grid length beyond `s` (Nyström routes).
    pub y_cut: Option<f64>,
    /// Gauss–Legendre panels on the `y`-grid (16 nodes each).
    pub panels: Option<usize>,
    /// Recompute with every node count doubled and report the change.
    pub refine: bool,
}

impl Default for DetOptions {
    fn default() -> Self {
        Self {
            contours: None,
            y_cut: None,
            panels: None,
            refine: true,
        }
    }
}

impl DetOptions {
    pub fn quick() -> Self {
        Self {
            refine: false,
            ..Self::default()
        }
    }
}

fn y_grid(a: f64, len: f64, panels: usize) -> Result<NystromGrid> {
    ContourSpec::HalfLine {
        origin: a,
        y_cut: len,
        m: 16,
        panels,
    }
    .discretize()
}

/// `det(1 − √w W L̂ √w W)` on a real grid with extra weights `extra`.
fn ygrid_log_det(nd: &Nodes, grid: &NystromGrid, extra: &[f64]) -> Result<LogDet> {
    let ys: Vec<f64> = grid.nodes.iter().map(|z| z.re).collect();
    let k = kernel_matrix(&ys, &ys, nd)?;
    let sw: Vec<f64> = grid.weights.iter().zip(extra).map(|(w, e)| (w.re * e).sqrt()).collect();
    let n = ys.len();
    let m = CMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - sw[i] * k.get(i, j) * sw[j]
    });
    Ok(log_det(m))
}

fn check_s(s: f64, n: usize, theta: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("s must be finite, got {s}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 1), got {theta}")));
    }
    Ok(())
}

/// Step determinant `Q_n^θ(s) = det(1 − L̂)_{L²(s, ∞)}` by Nyström on `[s, s + y_cut]`.
///
/// With `refine`, `refine_delta` compares against doubled panels, and doubling
/// `y_cut` must not move the value by more than `1e-6`.
pub fn step_det(s: f64, n: usize, theta: f64, opts: &DetOptions) -> Result<DetResult> {
    check_s(s, n, theta)?;
    if s <= 0.0 {
        return Err(Error::Domain(format!("step determinant needs s > 0, got {s}")));
    }
    let star = if theta == 0.0 { 1.0 } else { s_star(theta)? };
    let y_cut = opts.y_cut.unwrap_or(4.0);
    if y_cut < 2.0 * star {
        return Err(Error::Contour(format!("y_cut={y_cut} below 2 s*(θ)={}", 2.0 * star)));
    }
    let panels = opts.panels.unwrap_or(16.max(n));
    let contours = opts
        .contours
        .clone()
        .unwrap_or_else(|| KernelContours::wedge_default(n, s));
    contours.check(n, theta)?;
    let nd = nodes(n, theta, &contours)?;
    let run = |len: f64, p: usize| -> Result<LogDet> {
        let g = y_grid(s, len, p)?;
        ygrid_log_det(&nd, &g, &vec![1.0; g.len()])
    };
    let base = run(y_cut, panels)?;
    let dims = panels * 16;
    if !opts.refine {
        return Ok(det_result(base.ln(), None, dims));
    }
    let fine = run(y_cut, 2 * panels)?;
    let long = run(2.0 * y_cut, 2 * panels)?;
    let moved = (long.value() - fine.value()).norm();
    if moved > TRUNCATION_LIMIT {
        return Err(Error::Truncation(format!("doubling y_cut moved Q by {moved:e}")));
    }
    Ok(det_result(base.ln(), Some(fine.ln()), dims))
}

/// `det(1 − 𝒯)` on `L²(Σ)`, where `𝒯 = A B / (2πi)²` with
/// `A[i,k] = wv_k e^{lv_k − lu_i} t(v_k − u_i)` and `B[k,j] = wu_j / (v_k − u_j)`.
fn sigma_log_det<T>(s: f64, nd: &Nodes, transform: T) -> Result<LogDet>
where
    T: Fn(Complex64) -> Complex64 + Sync,
{
    let lv: Vec<Complex64> = nd.v.nodes.iter().zip(&nd.lw_v).map(|(&v, &l)| l - v * s).collect();
    let lu: Vec<Complex64> = nd.u.nodes.iter().zip(&nd.lw_u).map(|(&u, &l)| l - u * s).collect();
    let (mu, mv) = (nd.u.len(), nd.v.len());
    let a = try_matrix(mu, mv, |i, k| {
        let d = nd.v.nodes[k] - nd.u.nodes[i];
        Ok(nd.v.weights[k] * checked_exp(lv[k] - lu[i])? * transform(d))
    })?;
    let b = CMatrix::from_fn(mv, mu, |k, j| nd.u.weights[j] / (nd.v.nodes[k] - nd.u.nodes[j]));
    let t = a.matmul(&b);
    let sc = scale();
    let m = CMatrix::from_fn(mu, mu, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - t.get(i, j) * sc
    });
    Ok(log_det(m))
}

/// Step determinant through its `L²(Σ)` form (independent of any `y`-grid).
pub fn step_det_contour(s: f64, n: usize, theta: f64, opts: &DetOptions) -> Result<DetResult> {
    check_s(s, n, theta)?;
    let contours = opts
        .contours
        .clone()
        .unwrap_or_else(|| KernelContours::wedge_default(n, s.max(0.05)));
    contours.check(n, theta)?;
    let run = |c: &KernelContours| -> Result<LogDet> {
        let nd = nodes(n, theta, c)?;
        sigma_log_det(s, &nd, |d| d.inv())
    };
    let base = run(&contours)?;
    let dims = contours.sigma.discretize()?.len();
    let fine = if opts.refine {
        Some(run(&contours.refined())?.ln())
    } else {
        None
    };
    Ok(det_result(base.ln(), fine, dims))
}

/// Smoothed determinant `Q̃_n^θ(s) = det(1 − σ_{s,n,θ} L̂)` through its `L²(Σ)` form.
pub fn smoothed_det(s: f64, n: usize, theta: f64, opts: &DetOptions) -> Result<DetResult> {
    check_s(s, n, theta)?;
    let contours = match &opts.contours {
        Some(c) => c.clone(),
        None => KernelContours::smoothed_default(n, theta, s)?,
    };
    let k = 2.0 * n as f64 / theta;
    contours.check_sigma(n)?;
    if !matches!(contours.v, ContourSpec::VLine { .. }) {
        return Err(Error::Contour("smoothed determinant needs a vertical v-line".into()));
    }
    let lo = contours.v.min_re() - contours.sigma.max_re();
    let hi = contours.v.max_re() - contours.sigma.min_re();
    if !(lo > 0.0 && hi < k) {
        return Err(Error::Contour(format!(
            "Re(v − u) ranges over [{lo}, {hi}], must lie in (0, {k})"
        )));
    }
    let run = |c: &KernelContours| -> Result<LogDet> {
        let nd = nodes(n, theta, c)?;
        sigma_log_det(s, &nd, |d| (PI / k) / (PI * d / k).sin())
    };
    let base = run(&contours)?;
    let dims = contours.sigma.discretize()?.len();
    let fine = if opts.refine {
        Some(run(&contours.refined())?.ln())
    } else {
        None
    };
    Ok(det_result(base.ln(), fine, dims))
}

/// Smoothed determinant by Nyström on `[s − pad, s + y_cut]`, `pad = (θ/2n) log 1e14`.
/// Requires `s − pad > 0`.
pub fn smoothed_det_ygrid(s: f64, n: usize, theta: f64, opts: &DetOptions) -> Result<DetResult> {
    check_s(s, n, theta)?;
    if theta <= 0.0 {
        return Err(Error::Domain("smoothed determinant needs θ > 0".into()));
    }
    let k = 2.0 * n as f64 / theta;
    let pad = 14.0 * 10f64.ln() / k;
    let start = s - pad;
    if start <= 0.0 {
        return Err(Error::Contour(format!("y-grid would start at s − pad = {start} <= 0")));
    }
    let y_cut = opts.y_cut.unwrap_or(4.0);
    let panels = opts.panels.unwrap_or(16.max(n));
    let contours = opts
        .contours
        .clone()
        .unwrap_or_else(|| KernelContours::wedge_default(n, start));
    contours.check(n, theta)?;
    let nd = nodes(n, theta, &contours)?;
    let run = |p: usize| -> Result<LogDet> {
        let g = y_grid(start, pad + y_cut, p)?;
        let sig: Vec<f64> = g.nodes.iter().map(|y| 1.0 / (1.0 + (-k * (y.re - s)).exp())).collect();
        ygrid_log_det(&nd, &g, &sig)
    };
    let base = run(panels)?;
    let fine = if opts.refine { Some(run(2 * panels)?.ln()) } else { None };
    Ok(det_result(base.ln(), fine, panels * 16))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    #[serde(rename = "logQ")]
    pub log_q: f64,
    #[serde(rename = "logQtilde")]
    pub log_q_tilde: f64,
    pub gap_over_n2: f64,
}

pub const GAP_CSV_HEADER: &str = "n,logQ,logQtilde,gap_over_n2";

/// `|log Q̃ − log Q| / n²` over `n_list`.
pub fn ansatz_gap(s: f64, theta: f64, n_list: &[usize], opts: &DetOptions) -> Result<Vec<GapRow>> {
    n_list
        .iter()
        .map(|&n| {
            let q = step_det(s, n, theta, opts)?;
            let qt = smoothed_det(
                s,
                n,
                theta,
                &DetOptions {
                    contours: None,
                    ..opts.clone()
                },
            )?;
            let (lq, lqt) = (q.log_value.re, qt.log_value.re);
            Ok(GapRow {
                n,
                log_q: lq,
                log_q_tilde: lqt,
                gap_over_n2: (lqt - lq).abs() / (n * n) as f64,
            })
        })
        .collect()
}

pub fn gap_csv(rows: &[GapRow]) -> String {
    let mut out = format!("{GAP_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e}\n",
            r.n, r.log_q, r.log_q_tilde, r.gap_over_n2
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_temperature_weight_is_rational() {
        let z = Complex64::new(0.7, -0.4);
        let n = 5;
        let x = z / 10.0;
        let direct = ((1.0 + x) / (1.0 - x)).powi(5);
        assert!((log_w_hat(z, n, 0.0).unwrap().exp() - direct).norm() < 1e-13);
    }

    #[test]
    fn small_theta_weight_approaches_rational() {
        let z = Complex64::new(0.7, -0.4);
        let a = log_w_hat(z, 3, 1e-7).unwrap().exp();
        let b = log_w_hat(z, 3, 0.0).unwrap().exp();
        assert!((a - b).norm() < 1e-5);
    }

    #[test]
    fn contour_checks() {
        let mut c = KernelContours::wedge_default(4, 0.5);
        assert!(c.check(4, 0.3).is_ok());
        c.v = ContourSpec::Wedge {
            apex: 0.5,
            angle: PI / 3.0,
            reach: 80.0,
            m: 16,
            first: 0.5,
            ratio: 1.5,
        };
        assert!(matches!(c.check(4, 0.3), Err(Error::Contour(_))));
    }

    #[test]
    fn mp_density_support() {
        assert_eq!(marchenko_pastur(1.5), 0.0);
        assert!((marchenko_pastur(0.5) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn smoothed_ygrid_rejects_negative_start() {
        assert!(matches!(
            smoothed_det_ygrid(0.5, 1, 0.25, &DetOptions::quick()),
            Err(Error::Contour(_))
        ));
    }
}
