use lgpoly::phase::{g_eval, h_eval, q_eval, q_prime_zero_temp, sign_grid, PhaseParams};
use lgpoly::rate::{solve_b, RateQuery};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn q_prime_closed_form_matches_finite_difference() {
    let (s, b) = (0.5, 2.0 * 3f64.sqrt());
    let eps = 1e-5;
    for theta in [0.0, 1e-6] {
        for z in [c(4.0, 0.0), c(1.0, 0.5), c(-2.0, 1.5)] {
            let fd =
                (q_eval(z + eps, s, theta, b, 256).unwrap() - q_eval(z - eps, s, theta, b, 256).unwrap()) / (2.0 * eps);
            let exact = q_prime_zero_temp(z, s, b).unwrap();
            assert!((fd - exact).norm() < 1e-5, "θ={theta} ζ={z}: fd={fd} exact={exact}");
        }
    }
}

#[test]
fn h_zero_temperature_limit_is_continuous() {
    let p0 = PhaseParams::new(0.4, 0.0).unwrap();
    let p1 = PhaseParams::new(0.4, 1e-7).unwrap();
    for z in [c(0.5, 0.2), c(3.0, -0.7), c(-1.0, 1.0)] {
        for order in 0..=2 {
            let a = h_eval(order, z, &p0).unwrap();
            let b = h_eval(order, z, &p1).unwrap();
            assert!((a - b).norm() < 1e-5, "order {order} ζ={z}: {a} vs {b}");
        }
    }
}

#[test]
fn h_derivatives_match_finite_differences() {
    let p = PhaseParams::new(0.6, 0.3).unwrap();
    let eps = 1e-5;
    for z in [c(0.7, 0.3), c(2.5, -0.4)] {
        for order in 0..2u32 {
            let fd = (h_eval(order, z + eps, &p).unwrap() - h_eval(order, z - eps, &p).unwrap()) / (2.0 * eps);
            let d = h_eval(order + 1, z, &p).unwrap();
            assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0), "order {order} ζ={z}");
        }
    }
}

#[test]
fn sign_grid_is_odd_under_reflection() {
    let g = sign_grid(0.5, (-3.0, 3.0), (-2.0, 2.0), 41, 31).unwrap();
    for ix in 0..g.nx {
        for iy in 0..g.ny {
            assert_eq!(
                g.sign_at(ix, iy),
                -g.sign_at(g.nx - 1 - ix, g.ny - 1 - iy),
                "cell ({ix},{iy})"
            );
        }
    }
    let csv = g.to_csv();
    assert!(csv.starts_with("re,im,sign\n"));
    assert_eq!(csv.lines().count(), 1 + 41 * 31);
}

#[test]
fn g_jump_and_decay() {
    for (s, theta) in [(0.4, 0.1), (0.7, 0.5)] {
        let (b, _) = solve_b(&RateQuery::new(s, theta)).unwrap();
        let p = PhaseParams::new(s, theta).unwrap();
        for frac in [-0.6, 0.1, 0.8] {
            let x = frac * b;
            let gp = g_eval(c(x, 1e-7), s, theta, b, 64).unwrap();
            let gm = g_eval(c(x, -1e-7), s, theta, b, 64).unwrap();
            let h = h_eval(0, c(x, 0.0), &p).unwrap();
            assert!((gp + gm - h).norm() < 1e-6, "s={s} θ={theta} x={x}");
        }
        let far = g_eval(c(0.0, 1e6), s, theta, b, 64).unwrap();
        assert!(far.norm() < 1e-5);
    }
}
