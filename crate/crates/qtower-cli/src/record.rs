//! Structured output records, one JSON object per line.

use serde::{Deserialize, Serialize};

use qtower::classify::{self, AppendixIIReport, Branch, CaseRecord, TowerVerdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub d: i64,
    pub factorization: Vec<i64>,
    pub case_type: String,
    pub label: String,
    pub assignment: [i64; 4],
    pub symbol_matrix: [u8; 6],
    pub g_type: Vec<String>,
    pub gplus_label: String,
    pub g_order_formula: String,
    pub verdict: String,
    pub justification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub octic_cl2: Option<Vec<u64>>,
}

impl ClassifyReport {
    pub fn new(rec: &CaseRecord, factorization: Vec<i64>, verdict: &TowerVerdict, octic: Option<Vec<u64>>) -> Self {
        ClassifyReport {
            d: rec.d,
            factorization,
            case_type: rec.case_type.to_string(),
            label: rec.label.clone(),
            assignment: rec.values(),
            symbol_matrix: rec.symbol_matrix,
            g_type: rec.g_type.iter().map(|g| g.to_string()).collect(),
            gplus_label: rec.gplus_label.clone(),
            g_order_formula: rec.g_order_formula.clone(),
            verdict: format!("{:?}", verdict.verdict),
            justification: verdict.justification.clone(),
            octic_cl2: octic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub all_match: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    /// Columns whose computed value is not among the accepted alternatives.
    pub mismatched: Vec<String>,
    /// column=alternative for cells that list several alternatives.
    pub alternatives: Vec<String>,
}

impl From<&AppendixIIReport> for VerificationSummary {
    fn from(r: &AppendixIIReport) -> Self {
        let mut mismatched: Vec<String> = r.entries.iter().filter(|e| !e.matched).map(|e| e.column.clone()).collect();
        if !r.nu_matches {
            mismatched.insert(0, "nu".into());
        }
        VerificationSummary {
            all_match: r.all_match(),
            branch: r.branch.map(|b| match b {
                Branch::Top => "top".to_string(),
                Branch::Bottom => "bottom".to_string(),
            }),
            mismatched,
            alternatives: r
                .entries
                .iter()
                .filter_map(|e| e.matched_alternative.as_ref().map(|a| format!("{}={a}", e.column)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub d: i64,
    pub factorization: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gplus_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_us: Option<u64>,
}

impl ScanRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_line(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }

    pub fn csv_header() -> [&'static str; 8] {
        ["d", "factorization", "case_type", "label", "gplus_label", "verdict", "all_match", "error"]
    }

    pub fn csv_row(&self) -> [String; 8] {
        let f: Vec<String> = self.factorization.iter().map(i64::to_string).collect();
        [
            self.d.to_string(),
            f.join("*"),
            self.case_type.clone().unwrap_or_default(),
            self.label.clone().unwrap_or_default(),
            self.gplus_label.clone().unwrap_or_default(),
            self.verdict.clone().unwrap_or_default(),
            self.verification.as_ref().map(|v| v.all_match.to_string()).unwrap_or_default(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// Classifies d; None when d is outside the tabulated family.
pub fn scan_record(d: i64, verify: bool) -> Option<ScanRecord> {
    let f = classify::check_preconditions(d).ok()?;
    let mut factorization: Vec<i64> = f.factors.iter().map(|p| p.value()).collect();
    factorization.sort_unstable();
    let mut rec = ScanRecord {
        d,
        factorization,
        case_type: None,
        label: None,
        gplus_label: None,
        verdict: None,
        verification: None,
        error: None,
        timing_us: None,
    };
    match classify::classify_factors(d, &f.factors) {
        Ok(c) => {
            rec.verdict = Some(format!("{:?}", classify::tower_verdict(&c, None).verdict));
            if verify && classify::tables().unit_row(&c.label).is_some() {
                match classify::verify_record(&c) {
                    Ok(r) => rec.verification = Some(VerificationSummary::from(&r)),
                    Err(e) => rec.error = Some(e.to_string()),
                }
            }
            rec.case_type = Some(c.case_type.to_string());
            rec.label = Some(c.label);
            rec.gplus_label = Some(c.gplus_label);
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    Some(rec)
}
