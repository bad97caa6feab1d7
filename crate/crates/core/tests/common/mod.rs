#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use useqmine::dataio::{parse_uncertain_db, parse_weights};
use useqmine::{ScoredPattern, UncertainDatabase, WeightTable};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn base_db() -> UncertainDatabase {
    parse_uncertain_db(data("base.useq")).unwrap()
}

pub fn delta1() -> UncertainDatabase {
    parse_uncertain_db(data("delta1.useq")).unwrap()
}

pub fn delta2() -> UncertainDatabase {
    parse_uncertain_db(data("delta2.useq")).unwrap()
}

pub fn weights() -> WeightTable {
    parse_weights(data("weights.txt")).unwrap()
}

/// Pattern text to WES.
pub fn by_name(v: &[ScoredPattern]) -> BTreeMap<String, f64> {
    v.iter().map(|s| (s.pattern.to_string(), s.wes)).collect()
}

/// Same keys and every value within `tol`.
pub fn matches(got: &BTreeMap<String, f64>, want: &[(&str, f64)], tol: f64) -> Result<(), String> {
    let keys: Vec<&str> = got.keys().map(String::as_str).collect();
    let mut want_keys: Vec<&str> = want.iter().map(|w| w.0).collect();
    want_keys.sort_unstable();
    if keys != want_keys {
        return Err(format!("patterns {keys:?}, expected {want_keys:?}"));
    }
    for (k, v) in want {
        let g = got[*k];
        if (g - v).abs() > tol {
            return Err(format!("{k}: {g} vs {v}"));
        }
    }
    Ok(())
}
