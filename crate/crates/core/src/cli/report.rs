use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Summary of one CLI run. Serialized as JSON or as a one-row CSV with the
/// field order below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub n: u64,
    pub d: usize,
    pub delta: f64,
    pub r: f64,
    pub seed: u64,
    pub trials: u64,
    pub c_delta: f64,
    pub size: u64,
    pub raw_size: u64,
    pub ap_count: u64,
    pub best_trial: u64,
    pub elapsed_ms: u64,
    pub vol_s_estimate: f64,
    pub vol_s_std_error: f64,
    pub size_floor: f64,
    pub shape_term: f64,
    pub behrend_size: Option<u64>,
    pub behrend_bound: f64,
    pub elkin_bound: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("bad report JSON: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(self).expect("report serializes");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 csv")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        r.deserialize()
            .next()
            .ok_or_else(|| invalid("report CSV has no data row"))?
            .map_err(|e| invalid(format!("bad report CSV: {e}")))
    }
}

/// One row of `sweep` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub d: usize,
    pub delta: f64,
    pub r: f64,
    pub elkin_size: u64,
    pub behrend_size: u64,
    pub behrend_bound: f64,
    pub elkin_bound: f64,
    /// `elkin_size / elkin_bound`
    pub ratio: f64,
}

pub const SWEEP_HEADER: &str = "N,d,delta,r,elkin_size,behrend_size,behrend_bound,elkin_bound,ratio";
