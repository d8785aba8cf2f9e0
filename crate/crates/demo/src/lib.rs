//! Browser bindings: every export takes plain strings and numbers and
//! returns a JSON string; errors come back as `{"error": "..."}`.

use breeding_edp::catalog::{self, CatalogEntry};
use breeding_edp::eaqecc::convert_pure;
use breeding_edp::engine::{
    exact_fidelity, simulate, verify_guarantee, ChannelModel, PostSelect, DEFAULT_ENUMERATION_CAP,
};
use breeding_edp::BreedingProtocolSpec;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Res = Result<Value, String>;

fn finish(r: Res) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// A built-in name, or catalog text whose first entry is used.
fn resolve(source: &str) -> Result<CatalogEntry, String> {
    let cat = catalog::builtin();
    if let Ok(e) = catalog::find(&cat, source.trim()) {
        return Ok(e.clone());
    }
    let entries = catalog::load_catalog(source).map_err(|e| e.to_string())?;
    entries
        .into_iter()
        .next()
        .ok_or_else(|| "no code given".to_string())
}

fn parse_positions(csv: &str, n: usize) -> Result<Vec<usize>, String> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<usize>() {
            Ok(p) if (1..=n).contains(&p) => Ok(p - 1),
            _ => Err(format!("bad position `{s}` (use 1..={n})")),
        })
        .collect()
}

fn protocol(entry: &CatalogEntry, puncture: &str) -> Result<BreedingProtocolSpec, String> {
    let positions = parse_positions(puncture, entry.n)?;
    if positions.is_empty() {
        return Ok(BreedingProtocolSpec::hashing(entry.code().clone()));
    }
    convert_pure(entry.code(), &positions).map_err(|e| e.to_string())
}

pub fn codes_json() -> Res {
    let list: Vec<Value> = catalog::builtin()
        .iter()
        .map(|e| json!({"name": e.name, "p": e.p, "n": e.n, "k": e.k, "d": e.d, "pure": e.pure}))
        .collect();
    Ok(Value::Array(list))
}

pub fn analyze_json(source: &str) -> Res {
    let e = resolve(source)?;
    Ok(json!({
        "name": e.name, "p": e.p, "n": e.n, "k": e.k, "d": e.d, "pure": e.pure,
        "dual_dim": e.code().dual().dim(),
        "generators": e.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
    }))
}

fn curve(spec: &BreedingProtocolSpec, rates: &[f64], trials: u64, seed: u64) -> Res {
    let mut exact = Vec::with_capacity(rates.len());
    let mut sampled = Vec::with_capacity(rates.len());
    for (i, &r) in rates.iter().enumerate() {
        let ch = ChannelModel::depolarizing(r).map_err(|e| e.to_string())?;
        exact.push(
            exact_fidelity(spec, &ch, PostSelect::None, DEFAULT_ENUMERATION_CAP)
                .ok()
                .map(|x| x.fidelity),
        );
        if trials > 0 {
            let rep = simulate(
                spec,
                &ch,
                trials,
                seed.wrapping_add(i as u64),
                PostSelect::None,
                1,
            )
            .map_err(|e| e.to_string())?;
            sampled.push(json!({"fidelity": rep.fidelity_estimate, "ci": rep.ci_half_width}));
        }
    }
    let p = spec.params();
    Ok(json!({
        "noisy": p.n, "preshared": p.c, "gross": p.gross_k, "net": p.net_yield(),
        "d": p.d.value(), "exact": exact, "simulated": sampled,
    }))
}

/// Fidelity against depolarizing rate for the breeding protocol given by
/// `puncture` and for hashing with the same code.
pub fn fidelity_curve_json(
    source: &str,
    puncture: &str,
    max_rate: f64,
    points: u32,
    trials: u64,
    seed: u64,
) -> Res {
    if !(0.0..=1.0).contains(&max_rate) || points < 2 {
        return Err("need 0 <= max_rate <= 1 and at least 2 points".into());
    }
    let e = resolve(source)?;
    let rates: Vec<f64> = (0..points)
        .map(|i| max_rate * i as f64 / (points - 1) as f64)
        .collect();
    let breeding = protocol(&e, puncture)?;
    let hashing = BreedingProtocolSpec::hashing(e.code().clone());
    Ok(json!({
        "code": e.name,
        "rates": rates,
        "breeding": curve(&breeding, &rates, trials, seed)?,
        "hashing": curve(&hashing, &rates, trials, seed)?,
    }))
}

pub fn verify_json(source: &str, puncture: &str) -> Res {
    let e = resolve(source)?;
    let spec = protocol(&e, puncture)?;
    let cert = verify_guarantee(&spec, DEFAULT_ENUMERATION_CAP, 1).map_err(|e| e.to_string())?;
    Ok(json!({
        "code": e.name,
        "passed": cert.passed,
        "d": cert.d,
        "patterns": cert.patterns,
        "cases": cert.cases,
        "counterexample": cert.counterexample.map(|c| json!({
            "error": c.error.to_string(),
            "erased": c.erased.iter().map(|p| p + 1).collect::<Vec<_>>(),
        })),
    }))
}

#[wasm_bindgen]
pub fn codes() -> String {
    finish(codes_json())
}

#[wasm_bindgen]
pub fn analyze(source: &str) -> String {
    finish(analyze_json(source))
}

#[wasm_bindgen]
pub fn fidelity_curve(
    source: &str,
    puncture: &str,
    max_rate: f64,
    points: u32,
    trials: u32,
    seed: u32,
) -> String {
    finish(fidelity_curve_json(
        source,
        puncture,
        max_rate,
        points,
        trials as u64,
        seed as u64,
    ))
}

#[wasm_bindgen]
pub fn verify(source: &str, puncture: &str) -> String {
    finish(verify_json(source, puncture))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_by_name_and_text() {
        let v = analyze_json("6-4-2").unwrap();
        assert_eq!(
            (v["n"].as_u64(), v["k"].as_u64(), v["d"].as_u64()),
            (Some(6), Some(4), Some(2))
        );
        let v = analyze_json("code x p=2 n=4 k=2 d=2 pure=1\n1111|0000\n0000|1111\n").unwrap();
        assert_eq!(v["name"], "x");
        assert!(analyze("nonsense").contains("error"));
    }

    #[test]
    fn curve_shapes() {
        let v = fidelity_curve_json("6-4-2", "6", 0.3, 4, 200, 1).unwrap();
        assert_eq!(v["rates"].as_array().unwrap().len(), 4);
        assert_eq!(v["breeding"]["net"], 3);
        assert_eq!(v["hashing"]["net"], 4);
        assert_eq!(v["breeding"]["exact"][0], 1.0);
        let f = v["breeding"]["exact"][3].as_f64().unwrap();
        assert!((f - 0.7f64.powi(4)).abs() < 1e-12);
        assert!(fidelity_curve_json("6-4-2", "6", 2.0, 4, 0, 0).is_err());
        assert!(fidelity_curve_json("6-4-2", "1,2", 0.3, 4, 0, 0).is_err());
    }

    #[test]
    fn verify_results() {
        let v = verify_json("6-4-2", "6").unwrap();
        assert_eq!(v["passed"], true);
        assert_eq!(v["patterns"], 16);
        assert!(verify("6-4-2", "9").contains("error"));
    }

    #[test]
    fn codes_lists_builtin() {
        let v = codes_json().unwrap();
        assert!(v.as_array().unwrap().iter().any(|c| c["name"] == "5-1-3"));
    }
}
