use egdss_core::inference::{log_likelihood, neg_hessian, score};
use egdss_core::quadrature::Quadrature;
use egdss_core::reliability::{r_closed_form, r_gradient, r_numeric_oracle, ParamPair};
use egdss_core::{EgdModel, Rate, Sample};
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = f64> {
    (-2.3f64..2.3).prop_map(f64::exp)
}

fn pair(a: f64, b: f64) -> ParamPair {
    ParamPair::new(a, b).unwrap()
}

proptest! {
    #[test]
    fn complementarity(a in rate(), b in rate()) {
        let sum = r_closed_form(&pair(a, b)) + r_closed_form(&pair(b, a));
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn r_in_open_unit_interval(a in rate(), b in rate()) {
        let r = r_closed_form(&pair(a, b));
        prop_assert!(r > 0.0 && r < 1.0);
    }

    #[test]
    fn r_monotone_in_each_rate(a in rate(), b in rate(), f in 1.01f64..2.0) {
        let r = r_closed_form(&pair(a, b));
        prop_assert!(r_closed_form(&pair(a * f, b)) < r);
        prop_assert!(r_closed_form(&pair(a, b * f)) > r);
        let g = r_gradient(&pair(a, b));
        prop_assert!(g.d1 < 0.0 && g.d2 > 0.0);
    }

    #[test]
    fn gradient_antisymmetric_under_swap(a in rate(), b in rate()) {
        let g = r_gradient(&pair(a, b));
        let h = r_gradient(&pair(b, a));
        prop_assert!((g.d1 + h.d2).abs() <= 1e-12 * g.d1.abs().max(1.0));
        prop_assert!((g.d2 + h.d1).abs() <= 1e-12 * g.d2.abs().max(1.0));
    }

    #[test]
    fn cdf_nondecreasing(l in rate(), mut xs in prop::collection::vec(0.0f64..100.0, 2..50)) {
        let m = EgdModel::with_rate(l).unwrap();
        xs.sort_by(f64::total_cmp);
        for w in xs.windows(2) {
            prop_assert!(m.cdf(w[0]) <= m.cdf(w[1]));
        }
    }

    #[test]
    fn quantile_strictly_increasing(l in rate(), p in 0.001f64..0.99, dp in 1e-4f64..0.009) {
        let m = EgdModel::with_rate(l).unwrap();
        let a = m.quantile(p).unwrap();
        let b = m.quantile(p + dp).unwrap();
        prop_assert!(a < b);
        prop_assert!((m.cdf(a) - p).abs() <= 1e-12);
    }

    #[test]
    fn score_and_hessian_match_finite_differences(
        l in 0.05f64..5.0,
        values in prop::collection::vec(0.01f64..30.0, 2..40),
    ) {
        let data = Sample::new("p", values).unwrap();
        let at = Rate::new(l).unwrap();
        let h = 1e-5 * l;
        let up = Rate::new(l + h).unwrap();
        let dn = Rate::new(l - h).unwrap();
        let s = score(at, &data);
        let fd = (log_likelihood(up, &data) - log_likelihood(dn, &data)) / (2.0 * h);
        prop_assert!((s - fd).abs() <= 1e-6 * s.abs().max(1.0));
        let nh = neg_hessian(at, &data);
        prop_assert!(nh > 0.0);
        let fd = -(score(up, &data) - score(dn, &data)) / (2.0 * h);
        prop_assert!((nh - fd).abs() <= 1e-6 * nh);
    }
}

#[test]
fn closed_form_matches_oracle_on_grid() {
    let grid: Vec<f64> = (0..10).map(|i| 0.1 * 100f64.powf(i as f64 / 9.0)).collect();
    for &a in &grid {
        for &b in &grid {
            let p = pair(a, b);
            let diff = (r_closed_form(&p) - r_numeric_oracle(&p).unwrap()).abs();
            assert!(diff <= 1e-10, "({a}, {b}): {diff:e}");
        }
    }
}

#[test]
fn monotone_along_grid_lines() {
    let grid: Vec<f64> = (0..10).map(|i| 0.1 * 100f64.powf(i as f64 / 9.0)).collect();
    for &b in &grid {
        let rs: Vec<f64> = grid.iter().map(|&a| r_closed_form(&pair(a, b))).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
    }
    for &a in &grid {
        let rs: Vec<f64> = grid.iter().map(|&b| r_closed_form(&pair(a, b))).collect();
        assert!(rs.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn pdf_integrates_to_one() {
    for l in [0.1, 0.5, 1.0, 1.5, 5.0, 20.0] {
        let m = EgdModel::with_rate(l).unwrap();
        let upper = 80.0 / l;
        assert!(m.sf(upper) < 1e-20);
        let mass = Quadrature::with_tolerances(1e-13, 0.0)
            .integrate(|x| m.pdf(x), 0.0, upper)
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() <= 1e-8, "λ = {l}: {mass}");
    }
}

#[test]
fn cdf_derivative_is_pdf() {
    for l in [0.5, 1.0, 1.5] {
        let m = EgdModel::with_rate(l).unwrap();
        for i in 1..=50 {
            let x = i as f64 * 0.2 / l;
            let h = 1e-5 * x;
            let fd = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
            let rel = (fd - m.pdf(x)).abs() / m.pdf(x);
            assert!(rel <= 1e-6, "λ = {l}, x = {x}: {rel:e}");
        }
    }
}

#[test]
fn quantile_round_trip_in_bulk() {
    // points where the CDF is not saturated in double precision
    for l in [0.5, 1.0, 1.5] {
        let m = EgdModel::with_rate(l).unwrap();
        for x in [0.01, 0.1, 1.0, 5.0] {
            let back = m.quantile(m.cdf(x)).unwrap();
            assert!((back - x).abs() <= 1e-8, "λ = {l}, x = {x}: {back}");
        }
    }
}
