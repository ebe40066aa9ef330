//! `E exp(−u Z_n(θ)) = det(I + K)` on a small circle around `−θ`, with
//! `K(v, v') = (2πi)^{-2} ∫_ℓ π u^{w−v} / sin π(v−w) · W(w)/W(v) · dw / (w − v')`
//! and `W(z) = Γ(θ − z)ⁿ / Γ(θ + z)ⁿ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{det_result, ContourSpec, DetResult, NystromGrid};
use crate::error::{Error, Result};
use crate::linalg::{log_det, CMatrix};
use crate::special_fn::log_gamma;

const TAIL_LIMIT: f64 = 1e-10;

/// `log W(z) = n(log Γ(θ − z) − log Γ(θ + z))`.
pub fn log_w(z: Complex64, n: usize, theta: f64) -> Result<Complex64> {
    Ok(n as f64 * (log_gamma(theta - z)? - log_gamma(theta + z)?))
}

/// Default contours: circle at `−θ` of radius `min(θ, 1/2)/2`, line midway
/// between the circle and `min(θ, 1 − θ − r)`.
pub fn laplace_contours(theta: f64) -> (ContourSpec, ContourSpec) {
    let r = 0.5 * theta.min(0.5);
    let lo = -theta + r;
    let hi = theta.min(1.0 - theta - r);
    let c = 0.5 * (lo + hi);
    (
        ContourSpec::Circle {
            center: Complex64::new(-theta, 0.0),
            radius: r,
            m: 64,
        },
        ContourSpec::VLine {
            c,
            v_cut: 40.0,
            m: 16,
            first: 0.25,
            ratio: 1.0,
            max_width: 0.25,
        },
    )
}

fn check_contours(theta: f64, sigma: &ContourSpec, ell: &ContourSpec) -> Result<()> {
    let (center, radius) = match *sigma {
        ContourSpec::Circle { center, radius, .. } => (center, radius),
        _ => return Err(Error::Contour("Σ must be a circle".into())),
    };
    let c = match *ell {
        ContourSpec::VLine { c, .. } => c,
        _ => return Err(Error::Contour("ℓ must be a vertical line".into())),
    };
    if (center - Complex64::new(-theta, 0.0)).norm() > 1e-12 || radius >= theta {
        return Err(Error::Contour(format!(
            "Σ must be a circle around −θ with radius < θ (θ={theta})"
        )));
    }
    if !(c > -theta + radius && c < theta) {
        return Err(Error::Contour(format!(
            "ℓ at Re w={c} must lie strictly between Σ and θ={theta}"
        )));
    }
    if c + theta + radius >= 1.0 {
        return Err(Error::Contour(format!(
            "Re(w − v) reaches {} >= 1, crossing a zero of sin π(v − w)",
            c + theta + radius
        )));
    }
    Ok(())
}

fn assemble(u: f64, n: usize, theta: f64, v: &NystromGrid, w: &NystromGrid) -> Result<(CMatrix, f64)> {
    let ln_u = u.ln();
    let lw_v = v
        .nodes
        .iter()
        .map(|&z| log_w(z, n, theta))
        .collect::<Result<Vec<_>>>()?;
    let lw_w = w
        .nodes
        .iter()
        .map(|&z| log_w(z, n, theta))
        .collect::<Result<Vec<_>>>()?;
    let a = CMatrix::from_fn(v.len(), w.len(), |i, k| {
        let d = w.nodes[k] - v.nodes[i];
        let e = d * ln_u + lw_w[k] - lw_v[i];
        w.weights[k] * PI * e.exp() / (PI * (v.nodes[i] - w.nodes[k])).sin()
    });
    if a.data.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Overflow("Laplace kernel entry not representable".into()));
    }
    let peak = a.data.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let last = w.len() - 1;
    let edge = (0..v.len())
        .map(|i| a.get(i, 0).norm().max(a.get(i, last).norm()))
        .fold(0.0, f64::max);
    let tail = if peak > 0.0 { edge / peak } else { 0.0 };
    let b = CMatrix::from_fn(w.len(), v.len(), |k, j| (w.nodes[k] - v.nodes[j]).inv());
    let scale = Complex64::new(0.0, 2.0 * PI).powi(2).inv();
    let kernel = a.matmul(&b);
    let mut m = CMatrix::identity(v.len());
    let sw: Vec<Complex64> = v.weights.iter().map(|x| x.sqrt()).collect();
    for i in 0..v.len() {
        for j in 0..v.len() {
            let x = m.get(i, j) + sw[i] * kernel.get(i, j) * sw[j] * scale;
            m.set(i, j, x);
        }
    }
    Ok((m, tail))
}

fn laplace_value(u: f64, n: usize, theta: f64, sigma: &ContourSpec, ell: &ContourSpec) -> Result<Complex64> {
    let v = sigma.discretize()?;
    let w = ell.discretize()?;
    let (m, tail) = assemble(u, n, theta, &v, &w)?;
    if tail > TAIL_LIMIT {
        return Err(Error::Truncation(format!(
            "line integrand at the cut is {tail:e} of its peak"
        )));
    }
    Ok(log_det(m).ln())
}

/// `det(I + K_n^{u,θ})`, which equals `E exp(−u Z_n(θ))`.
pub fn laplace_det(u: f64, n: usize, theta: f64, sigma: &ContourSpec, ell: &ContourSpec) -> Result<DetResult> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::Domain(format!("u must be positive, got {u}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    check_contours(theta, sigma, ell)?;
    let dims = sigma.discretize()?.len();
    let ln = laplace_value(u, n, theta, sigma, ell)?;
    let fine = laplace_value(u, n, theta, &sigma.refined(), &ell.refined())?;
    Ok(det_result(ln, Some(fine), dims))
}

/// `E exp(−u X)` for `X` inverse-Gamma with shape `2θ`, by the trapezoid rule in `log x`.
pub fn inverse_gamma_laplace(u: f64, theta: f64) -> f64 {
    let shape = 2.0 * theta;
    let ln_norm = crate::special_fn::log_gamma(Complex64::new(shape, 0.0))
        .map(|v| v.re)
        .unwrap_or(f64::NAN);
    let lo = -40.0;
    let hi = if u > 0.0 {
        40.0f64.max(40.0 - u.ln())
    } else {
        40.0 + 40.0 / shape
    };
    let h = 2e-4;
    let steps = ((hi - lo) / h).ceil() as usize;
    let h = (hi - lo) / steps as f64;
    let mut sum = 0.0;
    for k in 0..=steps {
        let y = lo + k as f64 * h;
        let e = -u * y.exp() - shape * y - (-y).exp() - ln_norm;
        let wgt = if k == 0 || k == steps { 0.5 } else { 1.0 };
        sum += wgt * e.exp();
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_is_normalized_at_zero() {
        assert!((inverse_gamma_laplace(0.0, 0.75) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn n1_matches_oracle() {
        let (s, l) = laplace_contours(0.25);
        let d = laplace_det(1.0, 1, 0.25, &s, &l).unwrap();
        let o = inverse_gamma_laplace(1.0, 0.25);
        assert!((d.value.re - o).abs() < 1e-8, "{} vs {o}", d.value.re);
        assert!(d.imag_residual < 1e-8);
        assert!(d.refine_delta < 1e-8);
    }

    #[test]
    fn rejects_bad_contours() {
        let (_, l) = laplace_contours(0.25);
        let big = ContourSpec::Circle {
            center: Complex64::new(-0.25, 0.0),
            radius: 0.3,
            m: 64,
        };
        assert!(matches!(laplace_det(1.0, 1, 0.25, &big, &l), Err(Error::Contour(_))));
        let (s, _) = laplace_contours(0.25);
        let short = ContourSpec::VLine {
            c: 0.0,
            v_cut: 3.0,
            m: 16,
            first: 0.25,
            ratio: 1.0,
            max_width: 0.25,
        };
        assert!(matches!(
            laplace_det(1.0, 2, 0.25, &s, &short),
            Err(Error::Truncation(_))
        ));
    }
}
