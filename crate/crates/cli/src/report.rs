//! Result bundle assembled by a scenario run.

use serde::{Deserialize, Serialize};
use warpcav_core::concavity::{ConcavityCertificate, Verdict};
use warpcav_core::geometry::ConditionReport;
use warpcav_core::profile::RadialProfile;
use warpcav_core::thresholds::ThresholdReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub tag: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    pub scenario_hash: String,
    pub certificate: ConcavityCertificate,
}

/// A profile held for emission (CSV/SVG), tagged with its α for the
/// transformed columns.
#[derive(Debug, Clone)]
pub struct NamedProfile {
    pub label: String,
    pub time: Option<f64>,
    pub alpha: f64,
    pub profile: RadialProfile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportBundle {
    pub scenario: String,
    pub config_version: u32,
    pub scenario_hash: String,
    pub condition_reports: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onset_time: Option<f64>,
    pub certificates: Vec<CertificateRecord>,
    pub verdicts: Vec<TheoremVerdict>,
    #[serde(skip)]
    pub profiles: Vec<NamedProfile>,
}

impl ReportBundle {
    pub fn new(scenario: &str, hash: &str) -> Self {
        ReportBundle {
            scenario: scenario.to_string(),
            config_version: crate::config::CONFIG_VERSION,
            scenario_hash: hash.to_string(),
            condition_reports: Vec::new(),
            lambda1: None,
            threshold: None,
            onset_time: None,
            certificates: Vec::new(),
            verdicts: Vec::new(),
            profiles: Vec::new(),
        }
    }

    pub fn push_certificate(
        &mut self,
        label: impl Into<String>,
        time: Option<f64>,
        certificate: ConcavityCertificate,
    ) {
        self.certificates.push(CertificateRecord {
            label: label.into(),
            time,
            scenario_hash: self.scenario_hash.clone(),
            certificate,
        });
    }

    /// Worst verdict across a set (strict < weak < violated).
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::CertifiedStrict;
        for v in verdicts {
            out = match (out, v) {
                (_, Verdict::Violated) | (Verdict::Violated, _) => Verdict::Violated,
                (_, Verdict::CertifiedWeak) | (Verdict::CertifiedWeak, _) => Verdict::CertifiedWeak,
                _ => Verdict::CertifiedStrict,
            };
        }
        out
    }

    /// 0 = everything certified; 2 = at least one violated verdict.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.iter().any(|v| v.verdict == Verdict::Violated) {
            2
        } else {
            0
        }
    }
}
