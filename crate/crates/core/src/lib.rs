//! Quantified repeatability/reproducibility assessment for sets of repeat
//! measurements.
//!
//! The crate follows the measurement vocabulary of metrology (VIM): a set of
//! measured quantity values for one object and measurand is scored by its
//! *precision*, and that precision is called repeatability when every
//! recorded condition of measurement held the same value, reproducibility
//! when at least one differed. The headline score is the small-sample
//! corrected coefficient of variation CV*, which is unitless and therefore
//! comparable across studies and measurement scales.
//!
//! Modules:
//!
//! * [`stats`] — de-biased small-sample estimators: the unbiased standard
//!   deviation `s* = s / c4(n)`, its standard error, t-based confidence
//!   intervals, CV*, and the special functions behind them.
//! * [`model`] — measurements, condition sets with unknown/partially known
//!   values, condition schemas, and the repeatability/reproducibility
//!   classification.
//! * [`assess`] — the 1-phase and 2-phase assessment procedures producing
//!   baseline (R0) and per-condition-combination (R) precision scores.
//! * [`report`] — plain-text and JSON rendering of assessment results.
//!
//! The crate is `no_std` (with `alloc`); all operations are pure functions
//! over immutable inputs and safe to call concurrently.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assess;
pub mod model;
pub mod report;
pub mod stats;

pub use assess::{
    assess_one_phase, assess_two_phase, group_by_varied_conditions, AssessError, AssessmentConfig,
    AssessmentResult,
};
pub use model::{
    Classification, Condition, ConditionGroup, ConditionSchema, ConditionSet, ConditionValue,
    Measurement, MeasurementSet, QuantityValue,
};
pub use report::ReportBundle;
pub use stats::{PrecisionReport, Sample, StatsError};
