//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes the spectrum as a comma-separated string and returns a
//! JSON document of the form `{"meta": {...}, "rows": [...]}`.

use concentrate::harness::{finite_record, infer_regime, run_convergence, run_sweep, CurveKind};
use concentrate::SchmidtSpectrum;
use wasm_bindgen::prelude::*;

/// Largest block length offered by the convergence view.
pub const MAX_BLOCK_LENGTH: u64 = 4000;

fn parse_spectrum(text: &str) -> Result<SchmidtSpectrum, String> {
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("not a number: {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    SchmidtSpectrum::with_renormalize(&values, true).map_err(|e| e.to_string())
}

/// All four yield curves on `points` exponents up to `r_max`.
pub fn yield_curves_json(spectrum: &str, r_max: f64, points: usize) -> Result<String, String> {
    let p = parse_spectrum(spectrum)?;
    if !(r_max > 0.0) || points == 0 {
        return Err("need r_max > 0 and at least one point".into());
    }
    let grid: Vec<f64> = (1..=points).map(|i| r_max * i as f64 / points as f64).collect();
    Ok(run_sweep(&p, &grid, &CurveKind::ALL).map_err(|e| e.to_string())?.to_json())
}

/// Optimal single-copy plans for every target size.
pub fn finite_plan_json(spectrum: &str) -> Result<String, String> {
    let p = parse_spectrum(spectrum)?;
    Ok(finite_record(&p, None).map_err(|e| e.to_string())?.to_json())
}

/// Exact finite-`n` exponents at `rate` for `steps` block lengths up to `n_max`.
pub fn convergence_json(spectrum: &str, rate: f64, n_max: u64, steps: u64) -> Result<String, String> {
    let p = parse_spectrum(spectrum)?;
    if n_max == 0 || n_max > MAX_BLOCK_LENGTH || steps == 0 {
        return Err(format!("block length must lie in [1, {MAX_BLOCK_LENGTH}]"));
    }
    let regime = infer_regime(&p, rate).map_err(|e| e.to_string())?;
    let mut n_list: Vec<u64> = (1..=steps).map(|i| (n_max * i / steps).max(1)).collect();
    n_list.dedup();
    Ok(run_convergence(&p, rate, regime, &n_list, None).map_err(|e| e.to_string())?.to_json())
}

#[wasm_bindgen]
pub fn yield_curves(spectrum: &str, r_max: f64, points: usize) -> Result<String, JsError> {
    yield_curves_json(spectrum, r_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn finite_plan(spectrum: &str) -> Result<String, JsError> {
    finite_plan_json(spectrum).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn convergence(spectrum: &str, rate: f64, n_max: u32, steps: u32) -> Result<String, JsError> {
    convergence_json(spectrum, rate, n_max.into(), steps.into()).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_document() {
        let json = yield_curves_json("3, 1", 1.0, 50).unwrap();
        assert!(json.contains("\"fidelity_converse\""));
        assert_eq!(json.matches("\"r\":").count(), 50);
        assert!(yield_curves_json("0.5,x", 1.0, 5).is_err());
    }

    #[test]
    fn plan_document() {
        let json = finite_plan_json("0.5,0.3,0.2").unwrap();
        assert_eq!(json.matches("\"size\":").count(), 3);
    }

    #[test]
    fn convergence_document() {
        let json = convergence_json("0.75,0.25", 0.6, 400, 4).unwrap();
        assert_eq!(json.matches("\"residual\":").count(), 4);
        assert!(convergence_json("0.75,0.25", 0.3, 400, 4).unwrap_err().contains("outside"));
        assert!(convergence_json("0.75,0.25", 0.6, MAX_BLOCK_LENGTH + 1, 4).is_err());
    }
}
