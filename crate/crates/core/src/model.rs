//! Measurements, conditions of measurement, and the
//! repeatability/reproducibility classification.
//!
//! A condition of measurement is a named attribute-value pair describing a
//! circumstance that may influence the measured value. Conditions come in
//! three groups: object conditions, measurement-method conditions, and
//! measurement-procedure conditions. Values may be unknown or only
//! partially known ("JF?" style records), and the comparison logic is
//! three-valued: an unknown never counts as equal to anything, including
//! another unknown.
//!
//! Date and team are provenance, not conditions: they are carried and
//! reported but never used to classify a measurement set.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

/// Errors raised by construction and transformation of model types.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    /// Two conditions with the same (name, group) in one condition set.
    DuplicateCondition { name: String },
    /// A value lies outside the declared measurement scale.
    OutOfScale { index: usize, value: f64 },
    /// The scale bounds are not an ordered pair.
    BadScale { min: f64, max: f64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DuplicateCondition { name } => {
                write!(f, "duplicate condition '{name}'")
            }
            ModelError::OutOfScale { index, value } => {
                write!(f, "measurement {index} has value {value} outside the declared scale")
            }
            ModelError::BadScale { min, max } => {
                write!(f, "invalid scale {min}..{max}")
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// A magnitude together with its unit label, e.g. `87.47 g` or `0.726 wF1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantityValue {
    pub magnitude: f64,
    pub unit: String,
}

impl QuantityValue {
    pub fn new(magnitude: f64, unit: impl Into<String>) -> Self {
        QuantityValue {
            magnitude,
            unit: unit.into(),
        }
    }
}

/// The recorded state of one condition value.
///
/// `PartiallyKnown` mirrors records like "JF?" or "0?": a best guess whose
/// correctness is in doubt. It displays with its trailing question mark and
/// compares like an unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionValue {
    Known(String),
    Unknown,
    PartiallyKnown(String),
}

impl ConditionValue {
    /// Parses the dataset notation: a literal `?` is unknown, a trailing
    /// `?` after text marks a partially known value.
    pub fn from_label(label: &str) -> Self {
        let trimmed = label.trim();
        if trimmed == "?" {
            ConditionValue::Unknown
        } else if let Some(body) = trimmed.strip_suffix('?') {
            ConditionValue::PartiallyKnown(body.trim_end().to_string())
        } else {
            ConditionValue::Known(trimmed.to_string())
        }
    }

    /// Inverse of [`ConditionValue::from_label`].
    pub fn label(&self) -> String {
        match self {
            ConditionValue::Known(v) => v.clone(),
            ConditionValue::Unknown => "?".to_string(),
            ConditionValue::PartiallyKnown(v) => format!("{v}?"),
        }
    }

    pub fn is_fully_known(&self) -> bool {
        matches!(self, ConditionValue::Known(_))
    }

    /// Comparison key for fully known values: trimmed and case-folded.
    /// Values are opaque labels; no structured equality is attempted.
    fn known_key(&self) -> Option<String> {
        match self {
            ConditionValue::Known(v) => Some(normalize(v)),
            _ => None,
        }
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_lowercase()
}

/// The three groups conditions are sorted into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionGroup {
    /// Conditions of the object under measurement.
    Object,
    /// Conditions of the measurement method.
    Method,
    /// Conditions of the measurement procedure.
    Procedure,
}

impl ConditionGroup {
    /// Single-letter prefix used in dataset column names.
    pub fn prefix(self) -> char {
        match self {
            ConditionGroup::Object => 'O',
            ConditionGroup::Method => 'N',
            ConditionGroup::Procedure => 'P',
        }
    }

    pub fn from_prefix(c: char) -> Option<Self> {
        match c {
            'O' => Some(ConditionGroup::Object),
            'N' => Some(ConditionGroup::Method),
            'P' => Some(ConditionGroup::Procedure),
            _ => None,
        }
    }
}

impl fmt::Display for ConditionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConditionGroup::Object => "object",
            ConditionGroup::Method => "method",
            ConditionGroup::Procedure => "procedure",
        };
        f.write_str(s)
    }
}

/// One named condition with its recorded value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub group: ConditionGroup,
    pub value: ConditionValue,
}

impl Condition {
    pub fn new(name: impl Into<String>, group: ConditionGroup, value: ConditionValue) -> Self {
        Condition {
            name: name.into(),
            group,
            value,
        }
    }
}

/// The conditions recorded for one measurement, unique by (name, group).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionSet {
    entries: Vec<Condition>,
}

impl ConditionSet {
    pub fn new() -> Self {
        ConditionSet::default()
    }

    pub fn from_conditions(conditions: Vec<Condition>) -> Result<Self, ModelError> {
        let mut set = ConditionSet::new();
        for c in conditions {
            set.insert(c)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, condition: Condition) -> Result<(), ModelError> {
        if self
            .entries
            .iter()
            .any(|c| c.group == condition.group && c.name == condition.name)
        {
            return Err(ModelError::DuplicateCondition {
                name: condition.name,
            });
        }
        self.entries.push(condition);
        Ok(())
    }

    pub fn get(&self, group: ConditionGroup, name: &str) -> Option<&ConditionValue> {
        self.entries
            .iter()
            .find(|c| c.group == group && c.name == name)
            .map(|c| &c.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Condition> {
        self.entries.iter()
    }
}

/// One entry of a condition schema: a condition a dataset is expected to
/// record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemaEntry {
    pub name: String,
    pub group: ConditionGroup,
    #[serde(default)]
    pub description: String,
}

/// A named, versioned list of conditions. Condition names are unique across
/// all three groups so they can be referred to by bare name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSchema {
    pub name: String,
    pub version: String,
    pub conditions: Vec<SchemaEntry>,
}

impl ConditionSchema {
    pub fn new(
        name: impl Into<String>,
        version: impl Into<String>,
        conditions: Vec<SchemaEntry>,
    ) -> Result<Self, ModelError> {
        for (i, c) in conditions.iter().enumerate() {
            if conditions[..i].iter().any(|p| p.name == c.name) {
                return Err(ModelError::DuplicateCondition {
                    name: c.name.clone(),
                });
            }
        }
        Ok(ConditionSchema {
            name: name.into(),
            version: version.into(),
            conditions,
        })
    }

    pub fn entry(&self, name: &str) -> Option<&SchemaEntry> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// One measurement: a measured quantity value plus identifying metadata and
/// the conditions it was obtained under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub object_id: String,
    pub measurand: String,
    pub value: QuantityValue,
    /// Provenance; `?` when unrecorded. Never used for classification.
    pub date: ConditionValue,
    /// Provenance; `?` when unrecorded. Never used for classification.
    pub team: ConditionValue,
    pub conditions: ConditionSet,
    /// Free-text citation for where the value was reported.
    pub source: String,
}

/// Agreement status of one condition across a measurement set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffStatus {
    AllSame,
    Differs,
    /// At least one unknown or partially known value is present.
    Indeterminate,
}

/// The diff status of one schema condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionDiff {
    pub name: String,
    pub group: ConditionGroup,
    pub status: DiffStatus,
}

/// Classification of the conditions a measurement set was obtained under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Every condition value identical across measurements.
    Repeatability,
    /// At least one condition known to differ.
    Reproducibility,
    /// Unknown values prevent a definite classification.
    Indeterminate,
}

/// A dataset-level violation found by [`MeasurementSet::validate`].
/// Violations are data, not errors: validation always runs to completion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Zero-based index of the offending measurement, when applicable.
    pub index: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    MixedObject,
    MixedMeasurand,
    MixedUnit,
    UnknownCondition,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::MixedObject => "MIXED_OBJECT",
            ViolationKind::MixedMeasurand => "MIXED_MEASURAND",
            ViolationKind::MixedUnit => "MIXED_UNIT",
            ViolationKind::UnknownCondition => "UNKNOWN_CONDITION",
        };
        write!(f, "{kind}: {}", self.detail)
    }
}

/// A collection of measurements sharing one object, measurand, and unit;
/// the unit of assessment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    schema: ConditionSchema,
    measurements: Vec<Measurement>,
}

impl MeasurementSet {
    pub fn new(schema: ConditionSchema, measurements: Vec<Measurement>) -> Self {
        MeasurementSet {
            schema,
            measurements,
        }
    }

    pub fn schema(&self) -> &ConditionSchema {
        &self.schema
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.measurements
            .iter()
            .map(|m| m.value.magnitude)
            .collect()
    }

    /// Checks object/measurand/unit agreement and schema conformance.
    /// Returns an empty list when the set is sound.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let Some(first) = self.measurements.first() else {
            return violations;
        };
        for (i, m) in self.measurements.iter().enumerate().skip(1) {
            if m.object_id != first.object_id {
                violations.push(Violation {
                    kind: ViolationKind::MixedObject,
                    index: Some(i),
                    detail: format!(
                        "measurement {} has object '{}', expected '{}'",
                        i + 1,
                        m.object_id,
                        first.object_id
                    ),
                });
            }
            if m.measurand != first.measurand {
                violations.push(Violation {
                    kind: ViolationKind::MixedMeasurand,
                    index: Some(i),
                    detail: format!(
                        "measurement {} has measurand '{}', expected '{}'",
                        i + 1,
                        m.measurand,
                        first.measurand
                    ),
                });
            }
            if m.value.unit != first.value.unit {
                violations.push(Violation {
                    kind: ViolationKind::MixedUnit,
                    index: Some(i),
                    detail: format!(
                        "measurement {} has unit '{}', expected '{}'",
                        i + 1,
                        m.value.unit,
                        first.value.unit
                    ),
                });
            }
        }
        for (i, m) in self.measurements.iter().enumerate() {
            for c in m.conditions.iter() {
                let in_schema = self
                    .schema
                    .conditions
                    .iter()
                    .any(|e| e.name == c.name && e.group == c.group);
                if !in_schema {
                    violations.push(Violation {
                        kind: ViolationKind::UnknownCondition,
                        index: Some(i),
                        detail: format!(
                            "measurement {} records condition '{}' ({}) absent from schema '{}'",
                            i + 1,
                            c.name,
                            c.group,
                            self.schema.name
                        ),
                    });
                }
            }
        }
        violations
    }

    /// Per-condition agreement status across the set, in schema order.
    ///
    /// A condition missing from a measurement counts as unknown. Any
    /// unknown or partially known value makes the condition indeterminate,
    /// even when two known values already differ.
    pub fn condition_diff(&self) -> Vec<ConditionDiff> {
        self.schema
            .conditions
            .iter()
            .map(|entry| {
                let mut status = DiffStatus::AllSame;
                let mut first_key: Option<String> = None;
                for m in &self.measurements {
                    let value = m.conditions.get(entry.group, &entry.name);
                    let key = value.and_then(ConditionValue::known_key);
                    match key {
                        None => {
                            status = DiffStatus::Indeterminate;
                            break;
                        }
                        Some(k) => match &first_key {
                            None => first_key = Some(k),
                            Some(f) if *f != k => status = DiffStatus::Differs,
                            Some(_) => {}
                        },
                    }
                }
                ConditionDiff {
                    name: entry.name.clone(),
                    group: entry.group,
                    status,
                }
            })
            .collect()
    }

    /// Repeatability iff every condition is all-same; reproducibility iff at
    /// least one condition is known to differ; indeterminate otherwise.
    ///
    /// A set with no schema conditions at all is indeterminate: with nothing
    /// recorded, repeatability cannot be confirmed.
    pub fn classify(&self) -> Classification {
        let diffs = self.condition_diff();
        if diffs.iter().any(|d| d.status == DiffStatus::Differs) {
            return Classification::Reproducibility;
        }
        if diffs.is_empty() || diffs.iter().any(|d| d.status == DiffStatus::Indeterminate) {
            return Classification::Indeterminate;
        }
        Classification::Repeatability
    }

    /// Returns a new set with every value shifted so the scale starts at 0,
    /// leaving this set untouched. Dispersion statistics are unaffected;
    /// mean-dependent ones (CV, CV*) change, which is the point: CV* values
    /// are only comparable across scales anchored at 0.
    pub fn rescale_to_zero(&self, scale_min: f64, scale_max: f64) -> Result<Self, ModelError> {
        if !(scale_min < scale_max) || !scale_min.is_finite() || !scale_max.is_finite() {
            return Err(ModelError::BadScale {
                min: scale_min,
                max: scale_max,
            });
        }
        for (i, m) in self.measurements.iter().enumerate() {
            let v = m.value.magnitude;
            if v < scale_min || v > scale_max {
                return Err(ModelError::OutOfScale { index: i, value: v });
            }
        }
        let measurements = self
            .measurements
            .iter()
            .map(|m| {
                let mut out = m.clone();
                out.value.magnitude -= scale_min;
                out.value.unit = rescaled_unit(&m.value.unit, scale_min, scale_max);
                out
            })
            .collect();
        Ok(MeasurementSet {
            schema: self.schema.clone(),
            measurements,
        })
    }
}

/// Relabels a unit after shifting its scale to start at 0: a trailing
/// `<min>..<max>` range is rewritten (e.g. `rating-1..7` to `rating-0..6`);
/// anything else gets an explicit suffix.
fn rescaled_unit(unit: &str, scale_min: f64, scale_max: f64) -> String {
    let span = scale_max - scale_min;
    let old_suffix = format!("{}..{}", fmt_scale(scale_min), fmt_scale(scale_max));
    let new_suffix = format!("0..{}", fmt_scale(span));
    match unit.strip_suffix(old_suffix.as_str()) {
        Some(prefix) => format!("{prefix}{new_suffix}"),
        None => format!("{unit} (rescaled {new_suffix})"),
    }
}

fn fmt_scale(v: f64) -> String {
    if v == libm::trunc(v) && libm::fabs(v) < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Parses a trailing `<lo>..<hi>` range out of a unit label, the notation
/// used for bounded rating scales. Bounds are non-negative numbers; a
/// hyphen is always a separator (`rating-1..7` has `lo = 1`).
pub fn unit_scale_range(unit: &str) -> Option<(f64, f64)> {
    let idx = unit.find("..")?;
    let (head, tail) = (&unit[..idx], &unit[idx + 2..]);
    let lo_start = head
        .rfind(|c: char| !(c.is_ascii_digit() || c == '.'))
        .map(|i| i + 1)
        .unwrap_or(0);
    let lo: f64 = head[lo_start..].parse().ok()?;
    let hi: f64 = tail.parse().ok()?;
    (lo < hi).then_some((lo, hi))
}
