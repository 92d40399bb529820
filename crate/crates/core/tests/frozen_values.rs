//! Values frozen from 40-digit evaluations that optimise over the simplex
//! directly or enumerate sequences with exact rationals, without the tilted family.

use approx::assert_abs_diff_eq;
use concentrate::harness::{run_convergence, Cell};
use concentrate::rates::FidelityConverseCurve;
use concentrate::{
    converse_yield, direct_yield, exact_success_prob, inverse_converse, inverse_direct, r_prime, shannon_entropy,
    solve_plan, CurveRegime, Regime, SchmidtSpectrum,
};

fn skewed() -> SchmidtSpectrum {
    SchmidtSpectrum::new(&[0.75, 0.25]).unwrap()
}

const DIRECT_AT_0_1: f64 = 0.578_138_996_924_684_976_84;
const DIRECT_AT_0_05: f64 = 0.641_125_017_756_442_094_02;
const CONVERSE_AT_0_1: f64 = 0.981_756_702_931_173_089_99;
const CONVERSE_AT_0_05: f64 = 0.949_913_107_764_340_318_32;
const INVERSE_DIRECT_0_6: f64 = 0.080_204_701_871_015_084_65;
const INVERSE_CONVERSE_0_95: f64 = 0.050_091_139_394_906_960_261;
/// `D(q||p)` at `q_1 = sqrt 3 / (1 + sqrt 3)`, where `dE*/dr = 1`.
const R_PRIME: f64 = 0.047_602_705_817_753_470_942;
const FIDELITY_CONVERSE_AT_0_1: f64 = 0.999_968_626_952_991_697_84;

#[test]
fn yields_at_interior_exponents() {
    let p = skewed();
    assert_abs_diff_eq!(direct_yield(&p, 0.1).unwrap().yield_bits, DIRECT_AT_0_1, epsilon = 1e-12);
    assert_abs_diff_eq!(direct_yield(&p, 0.05).unwrap().yield_bits, DIRECT_AT_0_05, epsilon = 1e-12);
    assert_abs_diff_eq!(converse_yield(&p, 0.1).unwrap().yield_bits, CONVERSE_AT_0_1, epsilon = 1e-12);
    assert_abs_diff_eq!(converse_yield(&p, 0.05).unwrap().yield_bits, CONVERSE_AT_0_05, epsilon = 1e-12);
}

#[test]
fn inverse_maps() {
    let p = skewed();
    assert_abs_diff_eq!(inverse_direct(&p, 0.6).unwrap(), INVERSE_DIRECT_0_6, epsilon = 1e-12);
    assert_abs_diff_eq!(inverse_converse(&p, 0.95).unwrap(), INVERSE_CONVERSE_0_95, epsilon = 1e-12);
}

#[test]
fn fidelity_converse_kink() {
    let p = skewed();
    let rp = r_prime(&p);
    assert!(!rp.degenerate);
    assert_abs_diff_eq!(rp.value, R_PRIME, epsilon = 1e-9);
    let pt = FidelityConverseCurve::new(&p).eval(0.1).unwrap();
    assert_eq!(pt.regime, CurveRegime::Linear);
    assert_abs_diff_eq!(pt.yield_bits, FIDELITY_CONVERSE_AT_0_1, epsilon = 1e-9);
}

#[test]
fn exact_probabilities_match_rational_enumeration() {
    let p = skewed();
    // (n, L, P) with P as an exact fraction.
    let cases: [(u64, u64, f64); 4] = [
        (3, 2, 1.0),
        (3, 5, 185.0 / 256.0),
        (10, 100, 19_817_425.0 / 23_330_816.0),
        (10, 300, 4_406_475.0 / 8_126_464.0),
    ];
    for (n, l, prob) in cases {
        let (log_p, log_fail) = exact_success_prob(&p, n, (l as f64).log2()).unwrap();
        assert_abs_diff_eq!(log_p.exp2(), prob, epsilon = 1e-13);
        if prob < 1.0 {
            assert_abs_diff_eq!(log_fail.exp2(), 1.0 - prob, epsilon = 1e-13);
        }
    }
}

#[test]
fn single_copy_example() {
    let plan = solve_plan(&SchmidtSpectrum::new(&[0.5, 0.3, 0.2]).unwrap(), 3).unwrap();
    assert_abs_diff_eq!(plan.success_prob, 0.6, epsilon = 1e-15);
    assert_abs_diff_eq!(plan.threshold, 0.2, epsilon = 1e-15);
    assert_eq!(plan.cut_index, 3);
}

#[test]
fn convergence_record_is_self_consistent() {
    let p = skewed();
    let rec = run_convergence(&p, 0.6, Regime::Direct, &[100, 400], None).unwrap();
    let col = |name: &str| rec.column(name).unwrap();
    for row in &rec.rows {
        let (Cell::Num(e), Cell::Num(pred), Cell::Num(res)) = (&row[col("exponent")], &row[col("predicted")], &row[col("residual")])
        else {
            panic!("numeric cells expected")
        };
        assert_eq!(*res, e - pred);
        assert_abs_diff_eq!(*pred, INVERSE_DIRECT_0_6, epsilon = 1e-12);
    }
    assert_eq!(rec.meta_value("spectrum"), Some(&Cell::from("0.75,0.25")));
    assert!(shannon_entropy(&p) > 0.6);
}
