//! Rendering of assessment results: a prose summary paragraph and a
//! lossless JSON document.
//!
//! Every number printed in the prose equals the corresponding
//! full-precision structured value after the declared rounding rules
//! (see the `format_*` helpers), so the two renderings never drift apart.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use serde::{Deserialize, Serialize};

use crate::assess::{AssessmentResult, Caveat, Mode};
use crate::model::Classification;
use crate::stats::{PrecisionReport, Warning};

/// Version of the JSON document layout. Field evolution is append-only.
pub const FORMAT_VERSION: &str = "1";

/// The machine-readable rendering: every statistic at full precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuredReport {
    pub format_version: String,
    pub tool_version: String,
    /// Citation strings for where the measured values were reported.
    pub provenance: Vec<String>,
    pub assessment: AssessmentResult,
}

impl StructuredReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json_str(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Builds the structured document for an assessment result.
pub fn render_structured(result: &AssessmentResult, provenance: &[String]) -> StructuredReport {
    StructuredReport {
        format_version: FORMAT_VERSION.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        provenance: provenance.to_vec(),
        assessment: result.clone(),
    }
}

/// Both renderings of one assessment.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportBundle {
    pub text: String,
    pub structured: StructuredReport,
}

impl ReportBundle {
    pub fn new(result: &AssessmentResult, provenance: &[String]) -> Self {
        ReportBundle {
            text: render_text(result, provenance),
            structured: render_structured(result, provenance),
        }
    }
}

fn trim_decimals(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn nonzero(v: f64) -> f64 {
    // Collapse -0.0 so it never prints with a sign.
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// CV* prose rounding: three decimals below 10, three significant figures
/// from 10 up, and a bare `0` for an exactly zero score.
pub fn format_cv_star(v: f64) -> String {
    let v = nonzero(v);
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = libm::fabs(v);
    if magnitude < 10.0 {
        return trim_decimals(format!("{v:.3}"));
    }
    let exponent = libm::floor(libm::log10(magnitude)) as i32;
    if exponent <= 2 {
        let decimals = (2 - exponent) as usize;
        trim_decimals(format!("{v:.*}", decimals))
    } else {
        let scale = libm::pow(10.0, f64::from(exponent - 2));
        format!("{:.0}", libm::round(v / scale) * scale)
    }
}

/// Mean/stddev/CI prose rounding: the input data's decimal precision plus
/// two, capped at four decimals, trailing zeros trimmed.
pub fn format_quantity(v: f64, value_decimals: u8) -> String {
    let decimals = (usize::from(value_decimals) + 2).min(4);
    trim_decimals(format!("{:.*}", decimals, nonzero(v)))
}

/// Within-k percentages: up to two decimals, trailing zeros trimmed.
pub fn format_percent(v: f64) -> String {
    trim_decimals(format!("{:.2}", nonzero(v)))
}

/// Confidence level as a percentage, e.g. `0.95` renders as `95`.
pub fn format_level_percent(level: f64) -> String {
    trim_decimals(format!("{:.1}", level * 100.0))
}

/// Signed CV* effect, three decimals: `+0.114`, `-1.5`, `0`.
pub fn format_effect(delta: f64) -> String {
    let delta = nonzero(delta);
    if delta == 0.0 {
        return "0".to_string();
    }
    trim_decimals(format!("{delta:+.3}"))
}

/// Sentence-cases a measurand name, leaving mixed-case names like `wF1`
/// untouched.
fn sentence_case(measurand: &str) -> String {
    let has_upper = measurand.chars().any(|c| c.is_uppercase());
    let mut chars = measurand.chars();
    match chars.next() {
        Some(first) if first.is_ascii_lowercase() && !has_upper => {
            let mut out = String::new();
            out.push(first.to_ascii_uppercase());
            out.push_str(chars.as_str());
            out
        }
        _ => measurand.to_string(),
    }
}

fn classification_word(classification: Classification) -> &'static str {
    match classification {
        Classification::Repeatability => "repeatability",
        // An indeterminate set is still reported as a reproducibility
        // assessment; the caveat carries the doubt.
        Classification::Reproducibility | Classification::Indeterminate => "reproducibility",
    }
}

fn within_sentence(report: &PrecisionReport) -> String {
    let w1 = report.within_1sd_percent;
    let w2 = report.within_2sd_percent;
    if w1 == 100.0 {
        "All measured values fall within one standard deviation.".to_string()
    } else if w2 == 100.0 {
        format!(
            "All measured values fall within two standard deviations, {}% within one standard deviation.",
            format_percent(w1)
        )
    } else {
        format!(
            "{}% of measured values fall within two standard deviations, {}% within one standard deviation.",
            format_percent(w2),
            format_percent(w1)
        )
    }
}

fn score_paragraph(
    measurand: &str,
    object_id: &str,
    classification: Classification,
    provenance: &[String],
    report: &PrecisionReport,
    value_decimals: u8,
) -> String {
    let word = classification_word(classification);
    let recorded_in = if provenance.is_empty() {
        String::new()
    } else {
        format!(", as recorded in {},", provenance.join("; "))
    };
    let cv_star = match report.cv_star_percent {
        Some(v) => format!("**{}**", format_cv_star(v)),
        None => "undefined (non-positive mean)".to_string(),
    };
    format!(
        "{measurand} measurement {word} under {word} conditions of measurement{recorded_in} \
was assessed on the basis of {n} measurements of {object_id}: \
the unbiased coefficient of variation is {cv_star}, for a mean of {mean}, \
unbiased sample standard deviation of {stddev} with {level}% CI ({lo}, {hi}), \
and sample size {n}. {within}",
        measurand = sentence_case(measurand),
        n = report.n,
        mean = format_quantity(report.mean, value_decimals),
        stddev = format_quantity(report.unbiased_stddev, value_decimals),
        level = format_level_percent(report.ci_level),
        lo = format_quantity(report.ci_low, value_decimals),
        hi = format_quantity(report.ci_high, value_decimals),
        within = within_sentence(report),
    )
}

fn warning_sentence(warning: Warning) -> &'static str {
    match warning {
        Warning::SampleTooSmall => {
            "Sample size is below 3; CV* quantifies the variation found in this sample but is a weak estimate of the population coefficient of variation."
        }
        Warning::ZeroDispersion => {
            "All measured values are identical, so the confidence interval degenerates to (0, 0)."
        }
        Warning::NonpositiveMean => {
            "The sample mean is not positive, so the coefficient of variation is undefined."
        }
        Warning::NegativeCiLowerBound => {
            "The confidence interval extends below zero, an artifact of the normal approximation at very small sample sizes."
        }
    }
}

fn caveat_sentence(caveat: &Caveat) -> String {
    match caveat {
        Caveat::BaselineUnavailable => {
            "No repeatability baseline is available for these existing measurements, so the R score stands alone."
                .to_string()
        }
        Caveat::BaselineNotConverged(candidates) => {
            if candidates.is_empty() {
                "Baseline CV* exceeds the target precision; further conditions need to be fixed and the repeatability phase repeated.".to_string()
            } else {
                format!(
                    "Baseline CV* exceeds the target precision; candidate conditions to fix before repeating the repeatability phase: {candidates}."
                )
            }
        }
        Caveat::UnequalSampleSizes(labels) => format!(
            "Sample sizes differ from the baseline for {labels}; effect estimates are less accurate than with equal sizes."
        ),
        Caveat::SingletonGroup(label) => format!(
            "Group [{label}] holds a single measurement and was not scored."
        ),
        Caveat::IndeterminateGroup(label) => format!(
            "Group [{label}] is keyed on unknown condition values and was not scored."
        ),
        Caveat::IndeterminateClassification => {
            "Some condition values are unknown or only partially known; the repeatability/reproducibility classification of this set is indeterminate."
                .to_string()
        }
        Caveat::ScaleNotZeroBased(unit) => format!(
            "The measurement scale '{unit}' does not start at 0; CV* is only comparable across studies when scales are first mapped to start at 0."
        ),
    }
}

/// Renders the prose report: one headline paragraph per score, effect
/// estimates when a baseline exists, and a caveat list covering both
/// report warnings and assessment caveats.
pub fn render_text(result: &AssessmentResult, provenance: &[String]) -> String {
    let mut out = String::new();
    let mut caveat_lines: Vec<String> = Vec::new();

    match result.mode {
        Mode::OnePhase => {
            if let Some(score) = result.r_scores.first() {
                out.push_str(&score_paragraph(
                    &result.measurand,
                    &result.object_id,
                    result.classification,
                    provenance,
                    &score.report,
                    result.value_decimals,
                ));
                out.push('\n');
                for w in &score.report.warnings {
                    caveat_lines.push(warning_sentence(*w).to_string());
                }
            }
        }
        Mode::TwoPhase => {
            if let Some(r0) = &result.r0 {
                out.push_str("Baseline repeatability (R0): ");
                out.push_str(&score_paragraph(
                    &result.measurand,
                    &result.object_id,
                    Classification::Repeatability,
                    provenance,
                    r0,
                    result.value_decimals,
                ));
                out.push('\n');
                for w in &r0.warnings {
                    caveat_lines.push(format!("baseline R0: {}", warning_sentence(*w)));
                }
            }
            for score in &result.r_scores {
                let label = score.combination.label();
                let _ = write!(out, "\nR [{label}]: ");
                out.push_str(&score_paragraph(
                    &result.measurand,
                    &result.object_id,
                    result.classification,
                    provenance,
                    &score.report,
                    result.value_decimals,
                ));
                out.push('\n');
                for w in &score.report.warnings {
                    caveat_lines.push(format!("R [{label}]: {}", warning_sentence(*w)));
                }
            }
            if !result.effect_estimates.is_empty() {
                out.push_str("\nEffect estimates (CV* difference against baseline):\n");
                for effect in &result.effect_estimates {
                    let delta = match effect.cv_star_delta {
                        Some(d) => format_effect(d),
                        None => "undefined".to_string(),
                    };
                    let _ = writeln!(out, "- {}: {delta}", effect.combination.label());
                }
            }
        }
    }

    caveat_lines.extend(result.caveats.iter().map(caveat_sentence));
    if !caveat_lines.is_empty() {
        out.push_str("\nCaveats:\n");
        for line in caveat_lines {
            let _ = writeln!(out, "- {line}");
        }
    }
    out
}
