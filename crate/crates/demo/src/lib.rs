//! Browser bindings: evaluate a profile, scan the monopoly landscape, run the
//! competition report. Each call takes an instance document and returns JSON.

use serde_json::json;
use sigcomp::harness::{named_instance, run_ratio_experiment, Instance};
use sigcomp::rational::to_text;
use sigcomp::{
    analyze_monopoly, best_response_dynamics, buyer_utility, check_monopoly_bounds,
    monopoly_rows, seller_utility, social_welfare, Budget, BuyerAssignment, SellerProfile,
};
use wasm_bindgen::prelude::*;

/// Keeps a single call interactive in the browser.
fn demo_budget() -> Budget {
    Budget {
        profiles: 50_000,
        assignments: 100_000,
        ..Budget::default()
    }
}

fn parse(doc: &str) -> Result<Instance, String> {
    Instance::parse(doc).map_err(|e| e.to_string())
}

/// The document of a named instance such as `thm63(2)`.
pub fn named_doc(name: &str) -> Result<String, String> {
    named_instance(name).map(|x| x.emit()).map_err(|e| e.to_string())
}

/// Best-response dynamics from `start` (empty: everyone at seller 0), with the
/// resulting utilities.
pub fn evaluate_json(doc: &str, profile: &str, start: &str) -> Result<String, String> {
    let x = parse(doc)?;
    let v = &x.valuation;
    let profile = SellerProfile::parse(profile, v.num_goods()).map_err(|e| e.to_string())?;
    if profile.num_sellers() != x.sellers {
        return Err(format!(
            "profile has {} partitions, instance has {} sellers",
            profile.num_sellers(),
            x.sellers
        ));
    }
    let start = if start.trim().is_empty() {
        BuyerAssignment::all_to(v.num_buyers(), 0)
    } else {
        BuyerAssignment::parse(start, x.sellers).map_err(|e| e.to_string())?
    };
    let result = best_response_dynamics(v, &profile, &start).map_err(|e| e.to_string())?;
    let a = &result.assignment;
    let revenue: Vec<String> = (0..x.sellers)
        .map(|s| to_text(&seller_utility(v, &profile, a, s).unwrap()))
        .collect();
    let utility: Vec<String> = (0..v.num_buyers())
        .map(|b| to_text(&buyer_utility(v, &profile, a, b).unwrap()))
        .collect();
    let doc = json!({
        "profile": profile.to_string(),
        "assignment": a.to_string(),
        "is_nash": result.is_nash,
        "steps": result.steps,
        "welfare": to_text(&social_welfare(v, &profile, a).unwrap()),
        "seller_revenue": revenue,
        "buyer_utility": utility,
    });
    Ok(doc.to_string())
}

/// Revenue and welfare of every single-seller partition, plus the bounds.
pub fn monopoly_json(doc: &str) -> Result<String, String> {
    let x = parse(doc)?;
    let budget = demo_budget();
    let analysis = analyze_monopoly(&x.valuation, &budget).map_err(|e| e.to_string())?;
    let rows = monopoly_rows(&x.valuation, &budget).map_err(|e| e.to_string())?;
    let verdicts = check_monopoly_bounds(&analysis, &x.valuation.demand_profile());
    Ok(json!({ "analysis": analysis, "rows": rows, "verdicts": verdicts }).to_string())
}

/// The full competition-versus-monopoly report.
pub fn ratio_json(doc: &str) -> Result<String, String> {
    let x = parse(doc)?;
    Ok(run_ratio_experiment(&x, &demo_budget()).to_json())
}

#[wasm_bindgen]
pub fn named(name: &str) -> Result<String, JsError> {
    named_doc(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn evaluate(doc: &str, profile: &str, start: &str) -> Result<String, JsError> {
    evaluate_json(doc, profile, start).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn monopoly(doc: &str) -> Result<String, JsError> {
    monopoly_json(doc).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ratio(doc: &str) -> Result<String, JsError> {
    ratio_json(doc).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn value(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn evaluates_the_three_buyer_instance() {
        let doc = named_doc("ex41").unwrap();
        let out = value(&evaluate_json(&doc, "0,1|2", "").unwrap());
        assert_eq!(out["welfare"], "1/1");
        assert_eq!(out["seller_revenue"][0], "2/3");
        assert_eq!(out["buyer_utility"][1], "1/3");
        assert_eq!(out["is_nash"], true);
    }

    #[test]
    fn dynamics_split_the_thin_market() {
        let doc = named_doc("thm63(2)").unwrap();
        let out = value(&evaluate_json(&doc, "0,1;0|1", "0,0,0").unwrap());
        assert_eq!(out["is_nash"], true);
        assert!(evaluate_json(&doc, "0,1", "").is_err());
    }

    #[test]
    fn monopoly_lists_every_partition() {
        let out = value(&monopoly_json(&named_doc("thm43-identity").unwrap()).unwrap());
        assert_eq!(out["rows"].as_array().unwrap().len(), 5);
        assert_eq!(out["analysis"]["max_revenue"], "1/3");
    }

    #[test]
    fn ratio_report_is_exact() {
        let out = value(&ratio_json(&named_doc("thm63(2)").unwrap()).unwrap());
        assert_eq!(out["ratio_max"], "3/2");
    }

    #[test]
    fn bad_documents_are_reported() {
        assert!(ratio_json("sellers: 1\n").is_err());
        assert!(named_doc("nope").is_err());
    }
}
