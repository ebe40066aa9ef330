use lgpoly::rate::{big_f, rate_table, rate_table_csv, s_star, QuadratureSpec, RateQuery, RATE_CSV_HEADER};

#[test]
fn reference_value_at_half_and_point_three() {
    let r = big_f(&RateQuery::new(0.5, 0.3)).unwrap();
    assert!((r.big_f - 0.092_735_881_4).abs() < 1e-8, "{}", r.big_f);
    assert!((r.b - 3.711_501_3).abs() < 1e-6, "{}", r.b);
    assert!(r.residual_h < 1e-10);
    assert!(r.refine_delta < 1e-8);
}

#[test]
fn derivative_of_rate_is_f() {
    let (s, theta, e) = (0.5, 0.3, 1e-4);
    let hi = big_f(&RateQuery::new(s + e, theta)).unwrap().big_f;
    let lo = big_f(&RateQuery::new(s - e, theta)).unwrap().big_f;
    let mid = big_f(&RateQuery::new(s, theta)).unwrap();
    let fd = (hi - lo) / (2.0 * e);
    assert!((fd - mid.f).abs() < 1e-6, "fd={fd} f={}", mid.f);
}

#[test]
fn table_is_ordered_positive_and_decreasing() {
    let theta = 0.4;
    let star = s_star(theta).unwrap();
    let grid = [0.2, 0.4, 0.6, 0.8, star + 0.01];
    let rows = rate_table(&grid, theta, QuadratureSpec::default());
    assert_eq!(rows.iter().map(|r| r.s).collect::<Vec<_>>(), grid.to_vec());
    let values: Vec<f64> = rows[..4].iter().map(|r| r.result.unwrap().big_f).collect();
    assert!(values.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0), "{values:?}");
    assert!(rows[4].result.is_none() && rows[4].error.is_some());
    let csv = rate_table_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], RATE_CSV_HEADER);
    assert_eq!(lines.len(), 6);
    assert!(lines[5].contains("NaN"));
}

#[test]
fn json_uses_documented_field_names() {
    let r = big_f(&RateQuery::new(0.6, 0.0)).unwrap();
    let v = serde_json::to_value(r).unwrap();
    for key in ["s", "theta", "b", "f", "F", "s_star", "residual_H", "refine_delta"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn theta_outside_supported_range_is_rejected() {
    assert!(big_f(&RateQuery::new(0.3, 1.5)).is_err());
    assert!(big_f(&RateQuery::new(0.3, -0.1)).is_err());
    assert!(big_f(&RateQuery::new(0.0, 0.3)).is_err());
}
