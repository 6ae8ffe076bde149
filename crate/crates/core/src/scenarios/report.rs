use serde::Serialize;

use crate::calculus::{InternalState, PossibleInternalStates};
use crate::tensor::Subsystem;

/// A possible-internal-state table for one subsystem set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateTable {
    pub label: String,
    pub anchor: String,
    pub subsystems: Vec<String>,
    pub degenerate: bool,
    pub entries: Vec<InternalState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

/// Joint probabilities `P(row_j, col_k)` with labeled rows and columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointTable {
    pub label: String,
    pub anchor: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

/// A named scalar result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub anchor: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

/// A checked relation: `residual ≤ tolerance` passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub anchor: String,
    pub expected: f64,
    pub actual: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

/// Structured result of a scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ScenarioReport {
    pub scenario: String,
    pub parameters: Vec<(String, String)>,
    pub systems: Vec<Subsystem>,
    pub state_tables: Vec<StateTable>,
    pub joint_tables: Vec<JointTable>,
    pub values: Vec<NamedValue>,
    pub assertions: Vec<Assertion>,
}

impl ScenarioReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        ScenarioReport { scenario: scenario.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.passed).collect()
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.parameters.push((name.to_string(), value.to_string()));
    }

    pub fn systems(&mut self, systems: &[Subsystem]) {
        self.systems.extend(systems.iter().cloned());
    }

    pub fn table(&mut self, label: &str, anchor: &str, pis: &PossibleInternalStates) {
        self.state_tables.push(StateTable {
            label: label.to_string(),
            anchor: anchor.to_string(),
            subsystems: pis.subset().names().iter().map(|s| s.to_string()).collect(),
            degenerate: pis.degenerate,
            entries: pis.entries.clone(),
            origin: None,
        });
    }

    pub fn joint(&mut self, label: &str, anchor: &str, rows: &[&str], columns: &[&str], cells: Vec<Vec<f64>>) {
        self.joint_tables.push(JointTable {
            label: label.to_string(),
            anchor: anchor.to_string(),
            rows: rows.iter().map(|s| s.to_string()).collect(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            cells,
            origin: None,
        });
    }

    pub fn value(&mut self, name: &str, anchor: &str, value: f64) {
        self.values.push(NamedValue { name: name.to_string(), anchor: anchor.to_string(), value, origin: None });
    }

    /// `|actual − expected| ≤ tol`.
    pub fn check_close(&mut self, name: &str, anchor: &str, expected: f64, actual: f64, tol: f64) -> bool {
        let residual = (actual - expected).abs();
        self.push(name, anchor, expected, actual, residual, tol)
    }

    /// `actual ≤ bound + tol`; the residual is the excess over the bound.
    pub fn check_at_most(&mut self, name: &str, anchor: &str, bound: f64, actual: f64, tol: f64) -> bool {
        let residual = (actual - bound).max(0.0);
        self.push(name, anchor, bound, actual, residual, tol)
    }

    /// `actual ≥ bound − tol`; the residual is the shortfall below the bound.
    pub fn check_at_least(&mut self, name: &str, anchor: &str, bound: f64, actual: f64, tol: f64) -> bool {
        let residual = (bound - actual).max(0.0);
        self.push(name, anchor, bound, actual, residual, tol)
    }

    fn push(&mut self, name: &str, anchor: &str, expected: f64, actual: f64, residual: f64, tol: f64) -> bool {
        let passed = residual <= tol && residual.is_finite();
        self.assertions.push(Assertion {
            name: name.to_string(),
            anchor: anchor.to_string(),
            expected,
            actual,
            residual,
            tolerance: tol,
            passed,
            origin: None,
        });
        passed
    }

    /// Tags every row added since `from` with a source origin.
    pub fn tag_since(&mut self, from: ReportMark, origin: &str) {
        let o = Some(origin.to_string());
        self.state_tables[from.tables..].iter_mut().for_each(|t| t.origin = o.clone());
        self.joint_tables[from.joints..].iter_mut().for_each(|t| t.origin = o.clone());
        self.values[from.values..].iter_mut().for_each(|t| t.origin = o.clone());
        self.assertions[from.assertions..].iter_mut().for_each(|t| t.origin = o.clone());
    }

    pub fn mark(&self) -> ReportMark {
        ReportMark {
            tables: self.state_tables.len(),
            joints: self.joint_tables.len(),
            values: self.values.len(),
            assertions: self.assertions.len(),
        }
    }

    /// Appends everything from `other`.
    pub fn absorb(&mut self, other: ScenarioReport) {
        self.state_tables.extend(other.state_tables);
        self.joint_tables.extend(other.joint_tables);
        self.values.extend(other.values);
        self.assertions.extend(other.assertions);
    }
}

/// Row counts of a report at some point, for tagging later additions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportMark {
    tables: usize,
    joints: usize,
    values: usize,
    assertions: usize,
}

/// Worst-case accumulator for repeated checks over many trials.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Worst {
    pub value: f64,
    pub trial: Option<u64>,
}

impl Worst {
    pub fn update(&mut self, value: f64, trial: u64) {
        if self.trial.is_none() || value > self.value || value.is_nan() {
            self.value = value;
            self.trial = Some(trial);
        }
    }
}
