//! Structured run reports. Exact fractions are the source of truth; the
//! decimal rendering is for reading only.

use std::collections::BTreeMap;

use deftally_core::kb::{decimal6, Rational};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub kb_digest: String,
    pub settings: BTreeMap<&'static str, String>,
    pub status: Status,
    pub result: CommandResult,
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Violation,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum CommandResult {
    Generate(GenerateResult),
    Extend(ExtendResult),
    Soundness(SoundnessResult),
    Lottery(LotteryResult),
    VerifyOracle(VerifyResult),
}

#[derive(Serialize, Clone, Debug, PartialEq, Eq)]
pub struct Exact {
    pub exact: String,
    pub decimal: String,
}

impl From<&Rational> for Exact {
    fn from(r: &Rational) -> Self {
        Exact {
            exact: format!("{}/{}", r.numer(), r.denom()),
            decimal: decimal6(r),
        }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[derive(Serialize)]
pub struct RuleEntry {
    pub rule: String,
    pub origin: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    pub cases: Vec<String>,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Serialize)]
pub struct TargetResult {
    pub target: String,
    pub candidates: Vec<RuleEntry>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct GenerateResult {
    pub delta: Exact,
    pub targets: Vec<TargetResult>,
    pub kept: Vec<String>,
}

#[derive(Serialize)]
pub struct StepEntry {
    pub step: usize,
    pub rule: String,
    pub constant: String,
    pub proportion: Exact,
}

#[derive(Serialize)]
pub struct ExtensionEntry {
    pub conclusions: Vec<String>,
    pub trace: Vec<StepEntry>,
    pub proportion: Exact,
}

#[derive(Serialize)]
pub struct ThresholdEntry {
    pub epsilon_star: Exact,
    pub ordering: String,
    pub successful: bool,
    pub extension: ExtensionEntry,
    /// 1-based step at which no rule cleared the threshold.
    pub halted_at_step: usize,
    pub below_threshold: Vec<StepEntry>,
}

#[derive(Serialize)]
pub struct ExtendResult {
    pub mode: &'static str,
    pub rules: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extensions: Option<Vec<ExtensionEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdEntry>,
}

#[derive(Serialize)]
pub struct SoundnessEntry {
    pub rule: String,
    pub origin: &'static str,
    pub valid: bool,
    pub worst_error: Option<Exact>,
    pub worst_evidence: Option<Vec<String>>,
    pub evidence_sets: u64,
    pub consistent_sets: u64,
    pub applicable_cases: u64,
}

#[derive(Serialize)]
pub struct SoundnessResult {
    pub delta: Exact,
    pub constants: usize,
    pub rules: Vec<SoundnessEntry>,
    pub violations: usize,
}

#[derive(Serialize)]
pub struct LotteryExtension {
    pub spared: Vec<String>,
    pub bound: Option<Exact>,
    pub within_bound: bool,
    pub extension: ExtensionEntry,
}

#[derive(Serialize)]
pub struct LotteryResult {
    pub species: usize,
    pub domain: usize,
    pub intervals: Vec<[Exact; 2]>,
    pub delta_star: Exact,
    pub rules: Vec<String>,
    pub reiter: Vec<LotteryExtension>,
    pub threshold: ThresholdEntry,
    pub threshold_exceeds_reiter: bool,
}

#[derive(Serialize)]
pub struct CheckEntry {
    pub sample: usize,
    pub query: String,
    pub counter: String,
    pub oracle: String,
    pub equal: bool,
}

#[derive(Serialize)]
pub struct VerifyResult {
    pub samples: usize,
    pub checks: Vec<CheckEntry>,
    pub mismatches: usize,
}
