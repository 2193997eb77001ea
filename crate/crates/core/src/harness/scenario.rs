use serde::{Deserialize, Serialize};

use super::{replay, summarize, DecisionSummary, LearningCurve};
use crate::error::{Error, Result};
use crate::roi::CostParameters;

/// Named alternative economics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub parameters: CostParameters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub curve: LearningCurve,
    pub summary: DecisionSummary,
}

/// Re-derive economics and decisions for every scenario from the stored
/// confusion matrices. The input curve is left untouched.
pub fn scenario_analysis(
    curve: &LearningCurve,
    scenarios: &[Scenario],
    epsilon_f1: f64,
    epsilon_roi: f64,
) -> Result<Vec<ScenarioOutcome>> {
    if scenarios.is_empty() {
        return Err(Error::Harness("scenario analysis needs at least one scenario".into()));
    }
    scenarios
        .iter()
        .map(|s| {
            let wrap = |e: Error| Error::Scenario {
                scenario: s.name.clone(),
                source: Box::new(e),
            };
            s.parameters.validate().map_err(wrap)?;
            let replayed = replay(curve, &s.parameters).map_err(wrap)?;
            let summary = summarize(&replayed, &[], epsilon_f1, epsilon_roi).map_err(wrap)?;
            Ok(ScenarioOutcome {
                name: s.name.clone(),
                curve: replayed,
                summary,
            })
        })
        .collect()
}
