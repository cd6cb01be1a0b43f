use proptest::prelude::*;

use codrisk::copula::Copula;
use codrisk::distortion::Distortion;
use codrisk::figures::{run_figure, FigureId, FigureOptions};
use codrisk::marginal::Marginal;
use codrisk::oracle::mc_cod_at;
use codrisk::riskcore::{BivariateModel, Engine};

fn marginal() -> impl Strategy<Value = Marginal> {
    prop_oneof![
        (-2.0..2.0f64, 0.3..3.0f64).prop_map(|(m, s)| Marginal::normal(m, s).unwrap()),
        (0.3..4.0f64, 0.3..3.0f64).prop_map(|(a, b)| Marginal::gamma(a, b).unwrap()),
        (0.5..3.0f64, 0.6..3.0f64).prop_map(|(l, k)| Marginal::weibull(l, k).unwrap()),
        (-1.0..1.0f64, 0.1..3.0f64).prop_map(|(a, w)| Marginal::uniform(a, a + w).unwrap()),
    ]
}

fn distortion() -> impl Strategy<Value = Distortion> {
    prop_oneof![
        (0.05..0.95f64).prop_map(|a| Distortion::es(a).unwrap()),
        (0.3..4.0f64).prop_map(|g| Distortion::power(g).unwrap()),
        (1u32..6).prop_map(|k| Distortion::dual_power(k).unwrap()),
        (-1.0..1.0f64).prop_map(|l| Distortion::wang(l).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn both_distortion_routes_agree(x in marginal(), g in distortion()) {
        let e = Engine::default();
        let a = e.tail_integral(&g, &x).unwrap();
        let b = e.quantile_integral(&g, &x).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn cod_grows_with_gumbel_parameter(
        t1 in 1.0..5.0f64, dt in 0.05..3.0f64, u in 0.5..0.99f64, y in marginal(), h in distortion(),
    ) {
        let e = Engine::default();
        let x = Marginal::normal(0.0, 1.0).unwrap();
        let lo = BivariateModel::new(Copula::gumbel(t1).unwrap(), x, y);
        let hi = BivariateModel::new(Copula::gumbel(t1 + dt).unwrap(), x, y);
        let a = e.cod_at(&lo, u, &h).unwrap().value;
        let b = e.cod_at(&hi, u, &h).unwrap().value;
        prop_assert!(b - a >= -1e-6, "{a} > {b}");
    }

    #[test]
    fn conditional_quantile_inverts_cdf(alpha in -1.0..1.0f64, u in 0.0..0.99f64, p in 0.001..0.999f64) {
        let c = Copula::fgm(alpha).unwrap();
        let v = c.cond_tail_quantile(u, p).unwrap();
        prop_assert!((c.cond_tail_cdf(u, v).unwrap() - p).abs() < 1e-9);
    }

    #[test]
    fn cod_sits_between_support_ends_of_h(u in 0.0..0.99f64, y in marginal()) {
        let m = BivariateModel::new(Copula::gumbel(2.0).unwrap(), Marginal::normal(0.0, 1.0).unwrap(), y);
        let e = Engine::default();
        let lo = e.cod_at(&m, u, &Distortion::es(0.01).unwrap()).unwrap().value;
        let hi = e.cod_at(&m, u, &Distortion::es(0.99).unwrap()).unwrap().value;
        let mid = e.cod_at(&m, u, &Distortion::es(0.5).unwrap()).unwrap().value;
        prop_assert!(lo <= mid + 1e-9 && mid <= hi + 1e-9);
    }
}

#[test]
fn model_strings_round_trip() {
    for s in [
        "gumbel:2,normal:0,1,gamma:0.5,1",
        "fgm:-0.3,exp:1,weibull:1,2",
        "indep,uniform:0,1,normal:1,2",
    ] {
        let m: BivariateModel = s.parse().unwrap();
        let again: BivariateModel = m.to_string().parse().unwrap();
        assert_eq!(m.to_string(), again.to_string());
    }
}

#[test]
fn oracle_estimate_serializes() {
    let m: BivariateModel = "gumbel:2,normal:0,1,normal:0,1".parse().unwrap();
    let est = mc_cod_at(&m, 0.9, &Distortion::es(0.5).unwrap(), 20_000, 3, 10).unwrap();
    let v = serde_json::to_value(&est).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["n_total"], 20_000);
    assert!(v["stderr"].as_f64().unwrap() > 0.0);
}

#[test]
fn figure_tables_are_complete() {
    let opts = FigureOptions {
        grid: 12,
        ..FigureOptions::default()
    };
    for id in [FigureId::F2a, FigureId::F6a, FigureId::F7a] {
        let t = run_figure(id, &opts).unwrap();
        assert!(!t.rows.is_empty() && !t.checks.is_empty(), "{id}");
        assert!(t.rows.iter().all(|r| r.x.is_finite() && r.y.is_finite()));
        assert!(t.all_checks_pass(), "{id}");
        for name in t.series_names() {
            assert!(t.series(&name).len() >= 12);
        }
    }
}
