//! Browser bindings for a few growthlab operations. Each returns a JSON string.

use growthlab::bounds;
use growthlab::coxeter::{self, Family};
use growthlab::exact::rat_string;
use growthlab::group;
use serde_json::json;
use wasm_bindgen::prelude::*;

const BUDGET: usize = 200_000;

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Cumulative ball sizes of a built-in group, e.g. `builtin:heisenberg`.
#[wasm_bindgen]
pub fn ball_profile(group_name: &str, radius: usize) -> Result<String, JsValue> {
    let g = group::builtin(group_name).map_err(err)?;
    let p = group::ball_profile(&g, radius, BUDGET).map_err(err)?;
    Ok(json!({ "group": group_name, "valency": g.valency(), "profile": p }).to_string())
}

/// Exact asymptotic constant and the first `terms` cumulative counts of an affine Coxeter group.
#[wasm_bindgen]
pub fn coxeter_constant(family: &str, terms: usize) -> Result<String, JsValue> {
    let fam: Family = family.parse().map_err(err)?;
    let datum = coxeter::builtin_family(fam);
    let c = coxeter::asymptotic_constant(&datum);
    let series = coxeter::bott_cumulative_series(&datum, terms.min(200));
    Ok(json!({
        "family": fam.to_string(),
        "exponents": datum.exponents,
        "limit": rat_string(&c),
        "decimal": bounds::approx(&c),
        "series": series,
    })
    .to_string())
}

/// Tower-interval enclosure of `epsilon_d` at constant `C`, with the branch attaining the minimum.
#[wasm_bindgen]
pub fn epsilon(d: u32, c: u32) -> Result<String, JsValue> {
    if d == 0 || c < 2 {
        return Err(err("need d >= 1 and C >= 2"));
    }
    let r = bounds::epsilon_d(d as u64, c as u64);
    let show = |t: &Option<growthlab::tower::TowerReal>| t.as_ref().map(|t| t.to_string());
    Ok(json!({
        "d": d,
        "C": c,
        "branch": r.branch,
        "value": show(&r.value),
        "first": show(&r.first),
        "second": show(&r.second),
    })
    .to_string())
}
