use concentrate::harness::{
    format_number, run_check_suite, run_experiment, run_sweep, Cell, CurveKind, Experiment, ExperimentConfig,
};
use concentrate::{Error, Regime, SchmidtSpectrum};
use proptest::prelude::*;
use serde_json::Value;

/// Known to exceed its tolerance: near `r = 0` the yields leave `H(p)` like `sqrt(r)`.
const SQRT_LAW_PROPERTY: &str = "small_exponent_entropy_limit";

#[test]
fn check_suite_over_ten_seeds() {
    for seed in 0..10 {
        let out = run_check_suite(seed, None);
        assert_eq!(out.failures, vec![SQRT_LAW_PROPERTY.to_string()], "seed {seed}");
    }
}

#[test]
fn corrupted_tolerance_produces_failures() {
    let out = run_check_suite(5, Some(-1.0));
    assert!(!out.all_pass);
    assert!(out.failures.len() > 20);
}

#[test]
fn out_of_regime_rate_is_an_error() {
    let p = SchmidtSpectrum::new(&[0.75, 0.25]).unwrap();
    let cfg = ExperimentConfig::new(p, Experiment::Converge { rate: 0.95, regime: Regime::Direct, n_list: vec![10] });
    assert!(matches!(run_experiment(&cfg), Err(Error::RateOutOfRange { .. })));
}

fn csv_cells(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn csv_and_json_carry_the_same_values(weights in prop::collection::vec(0.05f64..1.0, 2..6), top in 0.1f64..2.0) {
        let p = SchmidtSpectrum::with_renormalize(&weights, true).unwrap();
        let grid: Vec<f64> = (1..=12).map(|i| top * i as f64 / 12.0).collect();
        let rec = run_sweep(&p, &grid, &CurveKind::ALL).unwrap();
        let json: Value = serde_json::from_str(&rec.to_json()).unwrap();
        let rows = csv_cells(&rec.to_csv());
        prop_assert_eq!(rows.len(), grid.len());
        for (i, row) in rows.iter().enumerate() {
            for (j, column) in rec.columns.iter().enumerate() {
                let from_json = &json["rows"][i][column];
                match &rec.rows[i][j] {
                    Cell::Num(v) => {
                        prop_assert_eq!(&row[j], &format_number(*v));
                        prop_assert_eq!(row[j].parse::<f64>().unwrap(), from_json.as_f64().unwrap());
                    }
                    Cell::Text(s) => prop_assert_eq!(from_json.as_str().unwrap(), s.as_str()),
                    Cell::Empty => {
                        prop_assert!(from_json.is_null());
                        prop_assert!(row[j].is_empty());
                    }
                    other => prop_assert!(false, "unexpected cell {:?}", other),
                }
            }
        }
    }

    #[test]
    fn rows_are_recomputable_from_the_serialized_spectrum(weights in prop::collection::vec(0.05f64..1.0, 2..5)) {
        let p = SchmidtSpectrum::with_renormalize(&weights, true).unwrap();
        let rec = run_sweep(&p, &[0.05, 0.2, 0.8], &CurveKind::ALL).unwrap();
        let Some(Cell::Text(text)) = rec.meta_value("spectrum") else { panic!("spectrum metadata") };
        let values: Vec<f64> = text.split(',').map(|v| v.parse().unwrap()).collect();
        let again = run_sweep(&SchmidtSpectrum::new(&values).unwrap(), &[0.05, 0.2, 0.8], &CurveKind::ALL).unwrap();
        prop_assert_eq!(rec.to_csv(), again.to_csv());
    }
}
