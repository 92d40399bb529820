//! Experiments assembled from the library, emitted as [`ExperimentRecord`]s.
//!
//! Every experiment is a pure function of its configuration: no clocks, no
//! host data, and rows assembled in input order even when computed in
//! parallel. Equal configurations therefore give byte-identical files.

mod checks;
mod record;

pub use checks::{run_check_suite, CheckOutcome};
pub use record::{format_number, Cell, ExperimentRecord, OutputFormat};

use crate::distributions::{shannon_entropy, SchmidtSpectrum};
use crate::error::{Error, Result};
use crate::fidelity::{check_high_fidelity_truncation, check_low_fidelity_bound};
use crate::finite::{deterministic_yield, solve_plan};
use crate::iid::{
    converse_exponent_lower_bound, direct_exponent_lower_bound, exponent_sweep, type_correction, Regime,
};
use crate::random::{DEFAULT_SEED, RNG_NAME};
use crate::rates::{
    converse_yield, direct_yield, fidelity_direct_yield, inverse_converse, inverse_direct, nonadditivity_report,
    r_prime, CurveRegime, FidelityConverseCurve, RateCurvePoint,
};
use crate::util::ordered_map;

/// Default accepted `|residual|` at the largest `n` of a convergence run.
pub const DEFAULT_CONVERGENCE_TOLERANCE: f64 = 0.02;

/// One of the four yield curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    Direct,
    Converse,
    FidelityDirect,
    FidelityConverse,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] =
        [CurveKind::Direct, CurveKind::Converse, CurveKind::FidelityDirect, CurveKind::FidelityConverse];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Direct => "direct",
            CurveKind::Converse => "converse",
            CurveKind::FidelityDirect => "fidelity_direct",
            CurveKind::FidelityConverse => "fidelity_converse",
        }
    }
}

/// Which experiment a configuration runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Converge { rate: f64, regime: Regime, n_list: Vec<u64> },
    Sweep { r_grid: Vec<f64>, curves: Vec<CurveKind> },
    NonAdditivity { sigma: SchmidtSpectrum, r_grid: Vec<f64> },
    CheckSuite,
}

/// A complete, validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub spectrum: SchmidtSpectrum,
    pub experiment: Experiment,
    pub seed: u64,
    pub tolerance: Option<f64>,
}

fn check_sorted_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("r grid is empty".into()));
    }
    if grid.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidConfig("r grid values must be finite and positive".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidConfig("r grid must be sorted ascending".into()));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(spectrum: SchmidtSpectrum, experiment: Experiment) -> Self {
        ExperimentConfig { spectrum, experiment, seed: DEFAULT_SEED, tolerance: None }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.experiment {
            Experiment::Converge { rate, regime, n_list } => {
                if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidConfig("n list must be non-empty, positive and strictly increasing".into()));
                }
                regime.check_rate(&self.spectrum, *rate)
            }
            Experiment::Sweep { r_grid, curves } => {
                if curves.is_empty() {
                    return Err(Error::InvalidConfig("no curve selected".into()));
                }
                check_sorted_grid(r_grid)
            }
            Experiment::NonAdditivity { r_grid, .. } => check_sorted_grid(r_grid),
            Experiment::CheckSuite => Ok(()),
        }
    }
}

/// Validates and runs any configured experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let p = &cfg.spectrum;
    match &cfg.experiment {
        Experiment::Converge { rate, regime, n_list } => run_convergence(p, *rate, *regime, n_list, cfg.tolerance),
        Experiment::Sweep { r_grid, curves } => run_sweep(p, r_grid, curves),
        Experiment::NonAdditivity { sigma, r_grid } => run_nonadditivity(p, sigma, r_grid),
        Experiment::CheckSuite => Ok(run_check_suite(cfg.seed, cfg.tolerance).record),
    }
}

/// `p_1,p_2,...` with full precision, as stored in metadata.
pub fn spectrum_text(p: &SchmidtSpectrum) -> String {
    p.probs().iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
}

fn base_record(columns: &[&str], experiment: &str) -> ExperimentRecord {
    let mut rec = ExperimentRecord::new(columns);
    rec.set_meta("tool", concat!("concentrate ", env!("CARGO_PKG_VERSION")));
    rec.set_meta("experiment", experiment);
    rec.set_meta("log_base", 2u64);
    rec
}

fn describe_spectrum(rec: &mut ExperimentRecord, key: &str, p: &SchmidtSpectrum) {
    rec.set_meta(key, spectrum_text(p));
}

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::Direct => "direct",
        Regime::Converse => "converse",
    }
}

/// Name of a curve regime as written to output.
pub fn curve_regime_name(regime: CurveRegime) -> &'static str {
    match regime {
        CurveRegime::Interior => "interior",
        CurveRegime::SaturatedDeterministic => "saturated",
        CurveRegime::SaturatedMaximal => "saturated",
        CurveRegime::Linear => "linear",
    }
}

/// The regime a per-copy rate belongs to: below `H(p)` direct, otherwise converse.
pub fn infer_regime(p: &SchmidtSpectrum, rate: f64) -> Result<Regime> {
    let regime = if rate < shannon_entropy(p) { Regime::Direct } else { Regime::Converse };
    regime.check_rate(p, rate)?;
    Ok(regime)
}

/// `points` evenly spaced exponents on `(0, 1.25 max(-log2(m p_1), c)]`, reaching both saturations.
pub fn default_r_grid(p: &SchmidtSpectrum, points: usize) -> Vec<f64> {
    let r_max = 1.25 * p.direct_saturation().max(p.uniform_divergence()).max(0.1);
    (1..=points).map(|i| r_max * i as f64 / points as f64).collect()
}

/// Finite-`n` exponents against the asymptotic prediction.
///
/// `predicted` is the inverse yield at the requested rate; `residual` is
/// `exponent - predicted`; `finite_n_bound` is the type-counting lower bound
/// on the exponent at that `n`, and `type_correction` its `(d/n) log2 (n+1)` term.
pub fn run_convergence(
    p: &SchmidtSpectrum,
    rate: f64,
    regime: Regime,
    n_list: &[u64],
    tolerance: Option<f64>,
) -> Result<ExperimentRecord> {
    let samples = exponent_sweep(p, rate, n_list, regime)?;
    let predicted = match regime {
        Regime::Direct => inverse_direct(p, rate)?,
        Regime::Converse => inverse_converse(p, rate)?,
    };
    let bounds: Vec<Result<Option<f64>>> = ordered_map(&samples, |s| match regime {
        Regime::Direct => direct_exponent_lower_bound(p, s.n, s.threshold_rate),
        Regime::Converse => converse_exponent_lower_bound(p, s.n, s.threshold_rate).map(Some),
    });

    let mut rec = base_record(
        &[
            "n",
            "rate_requested",
            "rate_actual",
            "threshold_rate",
            "log2_success",
            "log2_failure",
            "exponent",
            "predicted",
            "residual",
            "type_correction",
            "finite_n_bound",
            "bound_holds",
        ],
        "converge",
    );
    describe_spectrum(&mut rec, "spectrum", p);
    rec.set_meta("regime", regime_name(regime));
    rec.set_meta("rate", rate);
    rec.set_meta("predicted", predicted);

    let mut last_residual = None;
    for (s, bound) in samples.iter().zip(bounds) {
        let bound = bound?;
        let exponent = s.exponent(regime);
        let residual = exponent.map(|e| e - predicted);
        let holds = match (exponent, bound) {
            (Some(e), Some(b)) => Cell::Bool(e >= b - 1e-12),
            _ => Cell::Empty,
        };
        last_residual = residual;
        rec.push_row(vec![
            s.n.into(),
            rate.into(),
            s.rate.into(),
            s.threshold_rate.into(),
            s.log_success.into(),
            s.log_failure.into(),
            exponent.into(),
            predicted.into(),
            residual.into(),
            type_correction(s.n, p.dim()).into(),
            bound.into(),
            holds,
        ]);
    }
    let tol = tolerance.unwrap_or(DEFAULT_CONVERGENCE_TOLERANCE);
    rec.set_meta("tolerance", tol);
    rec.set_meta("final_residual", Cell::from(last_residual));
    rec.set_meta("pass", last_residual.is_some_and(|r| r.abs() <= tol));
    Ok(rec)
}

/// The four yield curves on an exponent grid, with the tilt of each interior point.
pub fn run_sweep(p: &SchmidtSpectrum, r_grid: &[f64], curves: &[CurveKind]) -> Result<ExperimentRecord> {
    let fidelity_curve = FidelityConverseCurve::new(p);
    let points: Vec<Result<Vec<RateCurvePoint>>> = ordered_map(r_grid, |&r| {
        curves
            .iter()
            .map(|kind| match kind {
                CurveKind::Direct => direct_yield(p, r),
                CurveKind::Converse => converse_yield(p, r),
                CurveKind::FidelityDirect => fidelity_direct_yield(p, r),
                CurveKind::FidelityConverse => fidelity_curve.eval(r),
            })
            .collect()
    });

    let mut columns: Vec<String> = vec!["r".into()];
    for kind in curves {
        for suffix in ["", "_regime", "_tilt"] {
            columns.push(format!("{}{suffix}", kind.name()));
        }
    }
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut rec = base_record(&column_refs, "sweep");
    describe_spectrum(&mut rec, "spectrum", p);
    rec.set_meta("entropy", shannon_entropy(p));
    rec.set_meta("min_entropy", p.min_entropy());
    rec.set_meta("direct_saturation", p.direct_saturation());
    rec.set_meta("uniform_divergence", p.uniform_divergence());
    rec.set_meta("r_prime", fidelity_curve.r_prime().value);
    rec.set_meta("r_prime_degenerate", fidelity_curve.r_prime().degenerate);

    for (&r, row) in r_grid.iter().zip(points) {
        let mut cells = vec![Cell::Num(r)];
        for pt in row? {
            cells.push(pt.yield_bits.into());
            cells.push(curve_regime_name(pt.regime).into());
            cells.push(pt.s_star.into());
        }
        rec.push_row(cells);
    }
    Ok(rec)
}

/// Composite-state yields and their relations for each `r` in the grid.
pub fn run_nonadditivity(rho: &SchmidtSpectrum, sigma: &SchmidtSpectrum, r_grid: &[f64]) -> Result<ExperimentRecord> {
    let reports: Vec<_> = ordered_map(r_grid, |&r| nonadditivity_report(rho, sigma, r));
    let mut rec = base_record(
        &[
            "r",
            "rho",
            "sigma",
            "joint",
            "rho_half",
            "sigma_half",
            "rho_doubled",
            "sigma_doubled",
            "subadditive",
            "doubling_identity",
            "average_bound",
            "superadditive",
            "strictly_superadditive",
        ],
        "nonadd",
    );
    describe_spectrum(&mut rec, "rho", rho);
    describe_spectrum(&mut rec, "sigma", sigma);
    let mut all_hold = true;
    for rep in reports {
        let rep = rep?;
        all_hold &= rep.subadditive && rep.doubling_identity && rep.average_bound && rep.superadditive;
        rec.push_row(vec![
            rep.r.into(),
            rep.rho.into(),
            rep.sigma.into(),
            rep.joint.into(),
            rep.rho_half.into(),
            rep.sigma_half.into(),
            rep.rho_doubled.into(),
            rep.sigma_doubled.into(),
            rep.subadditive.into(),
            rep.doubling_identity.into(),
            rep.average_bound.into(),
            rep.superadditive.into(),
            rep.strictly_superadditive.into(),
        ]);
    }
    rec.set_meta("pass", all_hold);
    Ok(rec)
}

/// Single-copy summary of a spectrum.
pub fn info_record(p: &SchmidtSpectrum) -> ExperimentRecord {
    let mut rec = base_record(
        &[
            "dim",
            "entropy",
            "min_entropy",
            "uniform_divergence",
            "direct_saturation",
            "deterministic_yield",
            "r_prime",
            "is_uniform",
        ],
        "info",
    );
    describe_spectrum(&mut rec, "spectrum", p);
    let rp = r_prime(p);
    rec.push_row(vec![
        p.dim().into(),
        shannon_entropy(p).into(),
        p.min_entropy().into(),
        p.uniform_divergence().into(),
        p.direct_saturation().into(),
        deterministic_yield(p).into(),
        if rp.degenerate { Cell::Empty } else { rp.value.into() },
        p.is_uniform().into(),
    ]);
    rec
}

/// Optimal single-copy plans, for one size or for every size `1..=d`.
pub fn finite_record(p: &SchmidtSpectrum, size: Option<usize>) -> Result<ExperimentRecord> {
    let sizes: Vec<usize> = match size {
        Some(l) => vec![l],
        None => (1..=p.dim()).collect(),
    };
    let mut rec = base_record(
        &["size", "success_prob", "failure_prob", "threshold", "cut_index", "measurement_coeffs"],
        "finite",
    );
    describe_spectrum(&mut rec, "spectrum", p);
    for l in sizes {
        let plan = solve_plan(p, l)?;
        let coeffs = plan.measurement_coeffs.iter().map(|&c| format_number(c)).collect::<Vec<_>>().join(";");
        rec.push_row(vec![
            l.into(),
            plan.success_prob.into(),
            plan.failure_prob().into(),
            plan.threshold.into(),
            plan.cut_index.into(),
            coeffs.into(),
        ]);
    }
    Ok(rec)
}

/// Yield values at one exponent for the selected curves.
pub fn yield_record(p: &SchmidtSpectrum, r: f64, curves: &[CurveKind]) -> Result<ExperimentRecord> {
    let mut rec = base_record(&["r", "kind", "yield", "regime", "tilt"], "yield");
    describe_spectrum(&mut rec, "spectrum", p);
    for &kind in curves {
        let pt = match kind {
            CurveKind::Direct => direct_yield(p, r)?,
            CurveKind::Converse => converse_yield(p, r)?,
            CurveKind::FidelityDirect => fidelity_direct_yield(p, r)?,
            CurveKind::FidelityConverse => FidelityConverseCurve::new(p).eval(r)?,
        };
        rec.push_row(vec![
            r.into(),
            kind.name().into(),
            pt.yield_bits.into(),
            curve_regime_name(pt.regime).into(),
            pt.s_star.into(),
        ]);
    }
    Ok(rec)
}

/// Fidelity-conversion checks for one target size or every feasible one.
///
/// Each row compares a `quantity` with a `bound` under `relation`. Targets
/// whose fidelity deficit is `>= 1/6` skip the truncation checks.
pub fn fidelity_record(p: &SchmidtSpectrum, target: Option<usize>) -> Result<ExperimentRecord> {
    let targets: Vec<usize> = match target {
        Some(t) => vec![t],
        None => (1..=p.dim()).collect(),
    };
    let mut rec = base_record(&["check", "target", "fidelity", "quantity", "relation", "bound", "holds"], "fidelity");
    describe_spectrum(&mut rec, "spectrum", p);
    let mut all_hold = true;
    for t in targets {
        if t >= 2 || target.is_some() {
            let c = check_low_fidelity_bound(p, t)?;
            all_hold &= c.holds;
            rec.push_row(vec![
                "low_fidelity_sqrt_pl".into(),
                t.into(),
                c.fidelity.into(),
                c.best_sqrt_pl.into(),
                ">=".into(),
                c.bound.into(),
                c.holds.into(),
            ]);
        }
        let c = match check_high_fidelity_truncation(p, t) {
            Ok(c) => c,
            Err(Error::EpsTooLarge(_)) if target.is_none() => continue,
            Err(e) => return Err(e),
        };
        let fid = 1.0 - c.eps;
        let budget = 6.0 * c.eps;
        let rows: [(&str, f64, &str, f64, bool); 4] = [
            ("truncation_weight", c.delta, "<=", budget, c.delta_within_budget),
            (
                "truncation_remainder_largest",
                c.remainder_largest,
                "<=",
                6.0 / (t as f64 * (1.0 - budget)),
                c.remainder_flat_enough,
            ),
            ("truncation_yield", c.remainder_yield as f64, ">=", c.output_size as f64, c.yield_reached),
            ("truncation_probability", 1.0 - c.delta, ">=", 1.0 - budget, c.probability_reached),
        ];
        for (name, quantity, relation, bound, holds) in rows {
            all_hold &= holds;
            rec.push_row(vec![
                name.into(),
                t.into(),
                fid.into(),
                quantity.into(),
                relation.into(),
                bound.into(),
                holds.into(),
            ]);
        }
    }
    rec.set_meta("pass", all_hold);
    Ok(rec)
}

/// Records the RNG and seed in metadata.
pub fn record_seed(rec: &mut ExperimentRecord, seed: u64) {
    rec.set_meta("rng", RNG_NAME);
    rec.set_meta("seed", seed);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[f64]) -> SchmidtSpectrum {
        SchmidtSpectrum::new(v).unwrap()
    }

    fn num(rec: &ExperimentRecord, row: usize, col: &str) -> f64 {
        match &rec.rows[row][rec.column(col).unwrap()] {
            Cell::Num(v) => *v,
            other => panic!("not a number: {other:?}"),
        }
    }

    #[test]
    fn convergence_shrinks_residuals() {
        let p = sp(&[0.75, 0.25]);
        let rec = run_convergence(&p, 0.6, Regime::Direct, &[50, 200, 800], None).unwrap();
        let res: Vec<f64> = (0..3).map(|i| num(&rec, i, "residual").abs()).collect();
        assert!(res[2] < res[0]);
        assert!(rec.rows.iter().all(|r| r[rec.column("bound_holds").unwrap()] == Cell::Bool(true)));
        assert!(matches!(
            run_convergence(&p, 0.9, Regime::Direct, &[10], None),
            Err(Error::RateOutOfRange { .. })
        ));
    }

    #[test]
    fn sweep_shapes() {
        let p = sp(&[0.75, 0.25]);
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 * 0.01).collect();
        let rec = run_sweep(&p, &grid, &CurveKind::ALL).unwrap();
        for i in 1..grid.len() {
            assert!(num(&rec, i, "direct") <= num(&rec, i - 1, "direct") + 1e-12);
            assert!(num(&rec, i, "converse") >= num(&rec, i - 1, "converse") - 1e-12);
            assert!(num(&rec, i, "fidelity_converse") >= num(&rec, i, "converse") - 1e-12);
            assert_eq!(num(&rec, i, "fidelity_direct"), num(&rec, i, "direct"));
        }
        let last = grid.len() - 1;
        assert_eq!(rec.rows[last][rec.column("direct_regime").unwrap()], Cell::from("saturated"));
        assert_eq!(rec.rows[last][rec.column("converse_regime").unwrap()], Cell::from("saturated"));
        assert_eq!(rec.rows[last][rec.column("fidelity_converse_regime").unwrap()], Cell::from("linear"));

        let u = SchmidtSpectrum::uniform(4).unwrap();
        let rec = run_sweep(&u, &grid, &[CurveKind::Direct, CurveKind::Converse]).unwrap();
        assert!((0..grid.len()).all(|i| num(&rec, i, "direct") == 2.0 && num(&rec, i, "converse") == 2.0));
    }

    #[test]
    fn regime_inference() {
        let p = sp(&[0.75, 0.25]);
        assert_eq!(infer_regime(&p, 0.6).unwrap(), Regime::Direct);
        assert_eq!(infer_regime(&p, 0.95).unwrap(), Regime::Converse);
        assert!(infer_regime(&p, 0.3).is_err());
        let grid = default_r_grid(&p, 200);
        assert_eq!(grid.len(), 200);
        assert!(grid[0] > 0.0 && grid[199] > p.uniform_divergence() && grid[199] > p.min_entropy());
    }

    #[test]
    fn config_validation() {
        let p = sp(&[0.75, 0.25]);
        let bad_n = ExperimentConfig::new(
            p.clone(),
            Experiment::Converge { rate: 0.6, regime: Regime::Direct, n_list: vec![10, 10] },
        );
        assert!(matches!(bad_n.validate(), Err(Error::InvalidConfig(_))));
        let bad_grid =
            ExperimentConfig::new(p.clone(), Experiment::Sweep { r_grid: vec![0.2, 0.1], curves: CurveKind::ALL.to_vec() });
        assert!(matches!(bad_grid.validate(), Err(Error::InvalidConfig(_))));
        let ok = ExperimentConfig::new(p, Experiment::Sweep { r_grid: vec![0.1, 0.2], curves: vec![CurveKind::Direct] });
        assert_eq!(run_experiment(&ok).unwrap().rows.len(), 2);
    }

    #[test]
    fn single_shot_records() {
        let p = sp(&[0.5, 0.3, 0.2]);
        let rec = finite_record(&p, Some(3)).unwrap();
        assert!((num(&rec, 0, "success_prob") - 0.6).abs() < 1e-15);
        assert!((num(&rec, 0, "threshold") - 0.2).abs() < 1e-15);
        assert_eq!(rec.rows[0][rec.column("cut_index").unwrap()], Cell::Int(3));

        let rec = yield_record(&sp(&[0.75, 0.25]), 1.0, &[CurveKind::Direct]).unwrap();
        assert_eq!(num(&rec, 0, "yield"), -(0.75f64).log2());
        assert_eq!(rec.rows[0][3], Cell::from("saturated"));

        let rec = info_record(&sp(&[0.75, 0.25]));
        assert_eq!(rec.rows[0][rec.column("deterministic_yield").unwrap()], Cell::Int(1));

        let rec = fidelity_record(&sp(&[0.3, 0.25, 0.25, 0.2]), None).unwrap();
        assert_eq!(rec.meta_value("pass"), Some(&Cell::Bool(true)));
    }

    #[test]
    fn nonadditivity_rows() {
        let rho = sp(&[0.75, 0.25]);
        let rec = run_nonadditivity(&rho, &rho, &[0.1, 0.2, 1.0]).unwrap();
        assert_eq!(rec.meta_value("pass"), Some(&Cell::Bool(true)));
        assert_eq!(rec.rows[1][rec.column("strictly_superadditive").unwrap()], Cell::Bool(true));
    }
}
