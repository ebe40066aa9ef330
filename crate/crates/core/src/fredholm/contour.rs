use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{composite_legendre, panel_legendre};

/// An integration contour together with its discretization parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ContourSpec {
    /// Positively oriented circle, `m` trapezoid nodes.
    Circle { center: Complex64, radius: f64, m: usize },
    /// Upward vertical line `Re v = c`, truncated at `|Im v| <= v_cut`.
    /// Gauss–Legendre panels of `m` nodes; widths start at `first` near `Im v = 0`
    /// and grow by `ratio` up to `max_width` (`ratio = 1` gives uniform panels).
    VLine {
        c: f64,
        v_cut: f64,
        m: usize,
        first: f64,
        ratio: f64,
        max_width: f64,
    },
    /// Real segment `[origin, origin + y_cut]` in `panels` Gauss–Legendre panels.
    HalfLine {
        origin: f64,
        y_cut: f64,
        m: usize,
        panels: usize,
    },
    /// Two rays `apex + ρ e^{±i angle}`, `0 <= ρ <= reach`, traversed from
    /// `∞ e^{-i angle}` through the apex to `∞ e^{+i angle}` (homotopic to an
    /// upward vertical line). Graded panels as for `VLine`.
    Wedge {
        apex: f64,
        angle: f64,
        reach: f64,
        m: usize,
        first: f64,
        ratio: f64,
    },
}

/// Quadrature nodes and complex weights (`dz` included) of a discretized contour.
#[derive(Debug, Clone, PartialEq)]
pub struct NystromGrid {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

impl NystromGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn graded(reach: f64, first: f64, ratio: f64, max_width: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut h = first;
    while *edges.last().unwrap() < reach {
        let next = (edges.last().unwrap() + h).min(reach);
        edges.push(next);
        h = (h * ratio).min(max_width);
    }
    edges
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Contour(msg));
        match *self {
            ContourSpec::Circle { radius, m, .. } => {
                if !(radius > 0.0) || m < 8 {
                    return bad(format!("circle needs radius > 0 and m >= 8: {self:?}"));
                }
            }
            ContourSpec::VLine {
                v_cut,
                m,
                first,
                ratio,
                max_width,
                ..
            } => {
                if !(v_cut > 0.0) || m < 8 || !(first > 0.0) || ratio < 1.0 || max_width < first {
                    return bad(format!("invalid vertical line {self:?}"));
                }
            }
            ContourSpec::HalfLine { y_cut, m, panels, .. } => {
                if !(y_cut > 0.0) || m < 8 || panels == 0 {
                    return bad(format!("invalid half-line grid {self:?}"));
                }
            }
            ContourSpec::Wedge {
                angle,
                reach,
                m,
                first,
                ratio,
                ..
            } => {
                if !(angle > 0.0 && angle < PI / 2.0) || !(reach > 0.0) || m < 8 || !(first > 0.0) || ratio < 1.0 {
                    return bad(format!("invalid wedge {self:?}"));
                }
            }
        }
        Ok(())
    }

    /// Same contour with every node count doubled.
    pub fn refined(&self) -> Self {
        let mut out = self.clone();
        match &mut out {
            ContourSpec::Circle { m, .. } | ContourSpec::VLine { m, .. } | ContourSpec::Wedge { m, .. } => *m *= 2,
            ContourSpec::HalfLine { panels, .. } => *panels *= 2,
        }
        out
    }

    /// Largest real part reached by the contour.
    pub fn max_re(&self) -> f64 {
        match *self {
            ContourSpec::Circle { center, radius, .. } => center.re + radius,
            ContourSpec::VLine { c, .. } => c,
            ContourSpec::HalfLine { origin, y_cut, .. } => origin + y_cut,
            ContourSpec::Wedge { .. } => f64::INFINITY,
        }
    }

    /// Smallest real part reached by the contour.
    pub fn min_re(&self) -> f64 {
        match *self {
            ContourSpec::Circle { center, radius, .. } => center.re - radius,
            ContourSpec::VLine { c, .. } => c,
            ContourSpec::HalfLine { origin, .. } => origin,
            ContourSpec::Wedge { apex, .. } => apex,
        }
    }

    pub fn discretize(&self) -> Result<NystromGrid> {
        self.validate()?;
        let i = Complex64::i();
        let grid = match *self {
            ContourSpec::Circle { center, radius, m } => {
                let (nodes, weights) = (0..m)
                    .map(|k| {
                        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                        (center + radius * e, (2.0 * PI / m as f64) * i * radius * e)
                    })
                    .unzip();
                NystromGrid { nodes, weights }
            }
            ContourSpec::VLine {
                c,
                v_cut,
                m,
                first,
                ratio,
                max_width,
            } => {
                let rule = panel_legendre(&graded(v_cut, first, ratio, max_width), m);
                let mut nodes = Vec::with_capacity(2 * rule.len());
                let mut weights = Vec::with_capacity(2 * rule.len());
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights).rev() {
                    nodes.push(Complex64::new(c, -t));
                    weights.push(i * w);
                }
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    nodes.push(Complex64::new(c, t));
                    weights.push(i * w);
                }
                NystromGrid { nodes, weights }
            }
            ContourSpec::HalfLine {
                origin,
                y_cut,
                m,
                panels,
            } => {
                let rule = composite_legendre(origin, origin + y_cut, panels, m);
                NystromGrid {
                    nodes: rule.nodes.iter().map(|&y| Complex64::new(y, 0.0)).collect(),
                    weights: rule.weights.iter().map(|&w| Complex64::new(w, 0.0)).collect(),
                }
            }
            ContourSpec::Wedge {
                apex,
                angle,
                reach,
                m,
                first,
                ratio,
            } => {
                let rule = panel_legendre(&graded(reach, first, ratio, f64::INFINITY), m);
                let up = Complex64::from_polar(1.0, angle);
                let down = up.conj();
                let mut nodes = Vec::with_capacity(2 * rule.len());
                let mut weights = Vec::with_capacity(2 * rule.len());
                for (&r, &w) in rule.nodes.iter().zip(&rule.weights).rev() {
                    nodes.push(apex + r * down);
                    weights.push(-down * w);
                }
                for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
                    nodes.push(apex + r * up);
                    weights.push(up * w);
                }
                NystromGrid { nodes, weights }
            }
        };
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_integrates_residue() {
        let g = ContourSpec::Circle {
            center: c(-1.0, 0.0),
            radius: 0.5,
            m: 32,
        }
        .discretize()
        .unwrap();
        let s: Complex64 = g.nodes.iter().zip(&g.weights).map(|(z, w)| w / (z + 1.0)).sum();
        assert!((s - c(0.0, 2.0 * PI)).norm() < 1e-13);
    }

    #[test]
    fn vertical_line_gaussian() {
        // ∫ e^{v²} dv over Re v = 0 upward = i√π
        let g = ContourSpec::VLine {
            c: 0.0,
            v_cut: 10.0,
            m: 16,
            first: 0.5,
            ratio: 1.2,
            max_width: 2.0,
        }
        .discretize()
        .unwrap();
        let s: Complex64 = g.nodes.iter().zip(&g.weights).map(|(z, w)| w * (z * z).exp()).sum();
        assert!((s - c(0.0, PI.sqrt())).norm() < 1e-13);
    }

    #[test]
    fn wedge_matches_vertical_line() {
        // e^{v²} decays in the sectors |arg v ∓ π/2| < π/4
        let g = ContourSpec::Wedge {
            apex: 0.0,
            angle: PI / 2.0 - 0.3,
            reach: 12.0,
            m: 16,
            first: 0.5,
            ratio: 1.3,
        }
        .discretize()
        .unwrap();
        let s: Complex64 = g.nodes.iter().zip(&g.weights).map(|(z, w)| w * (z * z).exp()).sum();
        assert!((s - c(0.0, PI.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn half_line_length() {
        let g = ContourSpec::HalfLine {
            origin: 0.5,
            y_cut: 4.0,
            m: 16,
            panels: 4,
        }
        .discretize()
        .unwrap();
        let total: f64 = g.weights.iter().map(|w| w.re).sum();
        assert!((total - 4.0).abs() < 1e-13);
        assert_eq!(g.len(), 64);
    }

    #[test]
    fn invalid_contours() {
        assert!(ContourSpec::Circle {
            center: c(0.0, 0.0),
            radius: -1.0,
            m: 16
        }
        .discretize()
        .is_err());
        assert!(ContourSpec::HalfLine {
            origin: 0.0,
            y_cut: 1.0,
            m: 4,
            panels: 2
        }
        .discretize()
        .is_err());
    }

    #[test]
    fn refinement_doubles_nodes() {
        let s = ContourSpec::Circle {
            center: c(0.0, 0.0),
            radius: 1.0,
            m: 16,
        };
        assert_eq!(s.refined().discretize().unwrap().len(), 32);
    }
}
