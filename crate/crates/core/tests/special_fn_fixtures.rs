use lgpoly::special_fn::{digamma, log_gamma, polygamma};
use num_complex::Complex64;

struct Row {
    z: Complex64,
    vals: [Complex64; 4],
}

fn load() -> Vec<Row> {
    let text = include_str!("fixtures/special_fn.csv");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("re,"))
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            let v = |k: usize| Complex64::new(c[2 + 2 * k], c[3 + 2 * k]);
            Row {
                z: Complex64::new(c[0], c[1]),
                vals: [v(0), v(1), v(2), v(3)],
            }
        })
        .collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[test]
fn fixture_has_1000_points() {
    assert_eq!(load().len(), 1000);
}

#[test]
fn log_gamma_matches_reference() {
    let mut worst: f64 = 0.0;
    for r in load() {
        let got = log_gamma(r.z).unwrap();
        // compare modulo the branch of the logarithm
        let k = ((got.im - r.vals[0].im) / (2.0 * std::f64::consts::PI)).round();
        let got = got - Complex64::new(0.0, 2.0 * std::f64::consts::PI * k);
        worst = worst.max(rel(got, r.vals[0]));
    }
    println!("lnΓ worst {worst:e}");
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn digamma_matches_reference() {
    let worst = load()
        .iter()
        .map(|r| rel(digamma(r.z).unwrap(), r.vals[1]))
        .fold(0.0, f64::max);
    println!("ψ worst {worst:e}");
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn polygamma_matches_reference() {
    for order in [1u32, 2] {
        let worst = load()
            .iter()
            .map(|r| rel(polygamma(order, r.z).unwrap(), r.vals[order as usize + 1]))
            .fold(0.0, f64::max);
        println!("ψ{order} worst {worst:e}");
        assert!(worst < 1e-12, "order {order}: {worst}");
    }
}
