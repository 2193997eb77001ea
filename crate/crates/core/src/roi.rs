//! Economics of a classification run: processing cost, misclassification
//! penalty, benefit and return on investment.
//!
//! Per-sample cost factors are expressed in minutes of human effort and
//! converted to dollars through the headcount and hourly rate. Penalties and
//! product value are plain dollar amounts.

use serde::{Deserialize, Serialize};

use crate::classify::ConfusionMatrix;
use crate::error::{Error, Result};

/// One per-sample cost factor of the ML process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostFactor {
    /// Planning (phase A).
    CPl,
    /// Data gathering (phase B).
    CDg,
    /// Pre-processing (phase B).
    CPp,
    /// Labeling (phase B).
    CL,
    /// Hyperparameter tuning (phase C).
    CT,
    /// Training and testing (phase C).
    CTrainTest,
    /// External validation (phase D).
    CE,
}

impl CostFactor {
    pub const ALL: [CostFactor; 7] = [
        CostFactor::CPl,
        CostFactor::CDg,
        CostFactor::CPp,
        CostFactor::CL,
        CostFactor::CT,
        CostFactor::CTrainTest,
        CostFactor::CE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostFactor::CPl => "c_pl",
            CostFactor::CDg => "c_dg",
            CostFactor::CPp => "c_pp",
            CostFactor::CL => "c_l",
            CostFactor::CT => "c_t",
            CostFactor::CTrainTest => "c_train_test",
            CostFactor::CE => "c_e",
        }
    }
}

fn default_applicable() -> Vec<CostFactor> {
    vec![
        CostFactor::CDg,
        CostFactor::CPp,
        CostFactor::CL,
        CostFactor::CTrainTest,
    ]
}

/// Economic inputs of the ROI model.
///
/// `c_*` fields are minutes per processed sample. Only the factors listed in
/// `applicable_factors` enter the cost; planning, tuning and external
/// validation are excluded unless explicitly listed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParameters {
    pub c_pl: f64,
    pub c_dg: f64,
    pub c_pp: f64,
    pub c_l: f64,
    pub c_t: f64,
    pub c_train_test: f64,
    pub c_e: f64,
    pub cost_fp: f64,
    pub cost_fn: f64,
    pub n_hr: u32,
    pub c_hr: f64,
    pub value_prod: f64,
    #[serde(default = "default_applicable")]
    pub applicable_factors: Vec<CostFactor>,
}

impl CostParameters {
    /// Industry estimates for requirements dependency classification:
    /// 1.5 min/sample of data preparation split evenly over gathering,
    /// pre-processing and labeling, 0.3 min/sample of training and testing,
    /// ten people at $70/h, $10k per false positive, $25k per false negative
    /// and a $4M product value per release cycle.
    pub fn table5_default() -> Self {
        CostParameters {
            c_pl: 0.0,
            c_dg: 0.5,
            c_pp: 0.5,
            c_l: 0.5,
            c_t: 0.0,
            c_train_test: 0.3,
            c_e: 0.0,
            cost_fp: 10_000.0,
            cost_fn: 25_000.0,
            n_hr: 10,
            c_hr: 70.0,
            value_prod: 4_000_000.0,
            applicable_factors: default_applicable(),
        }
    }

    /// Industry effort figures with product value and penalties scaled for
    /// corpora of a few thousand pairs.
    pub fn desk_scale() -> Self {
        CostParameters {
            cost_fp: 500.0,
            cost_fn: 1_250.0,
            value_prod: 50_000.0,
            ..Self::table5_default()
        }
    }

    /// Look up a shipped preset by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "table5-default" => Some(Self::table5_default()),
            "desk-scale" => Some(Self::desk_scale()),
            _ => None,
        }
    }

    pub const PRESET_NAMES: [&'static str; 2] = ["table5-default", "desk-scale"];

    pub fn factor(&self, factor: CostFactor) -> f64 {
        match factor {
            CostFactor::CPl => self.c_pl,
            CostFactor::CDg => self.c_dg,
            CostFactor::CPp => self.c_pp,
            CostFactor::CL => self.c_l,
            CostFactor::CT => self.c_t,
            CostFactor::CTrainTest => self.c_train_test,
            CostFactor::CE => self.c_e,
        }
    }

    /// Sum of the applicable per-sample factors, in minutes. A factor listed
    /// twice counts once.
    pub fn minutes_per_sample(&self) -> f64 {
        CostFactor::ALL
            .iter()
            .filter(|f| self.applicable_factors.contains(f))
            .map(|&f| self.factor(f))
            .sum()
    }

    /// Hard invariants. Violations are errors.
    pub fn validate(&self) -> Result<()> {
        for factor in CostFactor::ALL {
            check_nonneg(factor.name(), self.factor(factor))?;
        }
        check_nonneg("cost_fp", self.cost_fp)?;
        check_nonneg("cost_fn", self.cost_fn)?;
        check_nonneg("value_prod", self.value_prod)?;
        if self.n_hr < 1 {
            return Err(Error::Parameter("n_hr must be at least 1".into()));
        }
        if !(self.c_hr.is_finite() && self.c_hr > 0.0) {
            return Err(Error::Parameter(format!(
                "c_hr must be positive, got {}",
                self.c_hr
            )));
        }
        Ok(())
    }

    /// Soft checks that only produce warnings. Currently the share of data
    /// preparation in the data preparation + execution effort, expected
    /// around 80%.
    pub fn advisories(&self) -> Vec<String> {
        let phase_b = self.c_dg + self.c_pp + self.c_l;
        let phase_c = self.c_t + self.c_train_test;
        let total = phase_b + phase_c;
        if total <= 0.0 {
            return vec!["phase B and phase C effort are both zero".into()];
        }
        let share = phase_b / total;
        if (share - 0.80).abs() > 0.05 + 1e-12 {
            vec![format!(
                "phase B share of B+C effort is {:.3}, outside 0.80 +/- 0.05",
                share
            )]
        } else {
            Vec::new()
        }
    }
}

fn check_nonneg(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} must be a finite non-negative number, got {value}"
        )))
    }
}

/// Dollar figures for one evaluated training-set size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EconomicOutcome {
    pub n_processed: u64,
    pub cost_usd: f64,
    pub penalty_usd: f64,
    pub benefit_usd: f64,
    pub roi: f64,
}

/// `2·tp / (2·tp + fp + fn)`, or 0 when nothing was predicted or present as
/// positive.
pub fn f1_score(cm: &ConfusionMatrix) -> f64 {
    let denom = 2 * cm.tp + cm.fp + cm.fn_;
    if denom == 0 {
        0.0
    } else {
        (2 * cm.tp) as f64 / denom as f64
    }
}

/// Cost of processing `n` samples: minutes per sample times headcount times
/// hourly rate, converted from minutes to hours.
pub fn processing_cost(n: u64, p: &CostParameters) -> Result<f64> {
    p.validate()?;
    Ok(n as f64 * p.minutes_per_sample() * f64::from(p.n_hr) * p.c_hr / 60.0)
}

pub fn total_penalty(cm: &ConfusionMatrix, p: &CostParameters) -> f64 {
    cm.fp as f64 * p.cost_fp + cm.fn_ as f64 * p.cost_fn
}

/// Product value minus misclassification penalty. May be negative.
pub fn benefit(cm: &ConfusionMatrix, p: &CostParameters) -> f64 {
    p.value_prod - total_penalty(cm, p)
}

pub fn roi(benefit_usd: f64, cost_usd: f64) -> Result<f64> {
    if !cost_usd.is_finite() || cost_usd <= 0.0 {
        return Err(Error::UndefinedRoi { cost: cost_usd });
    }
    Ok((benefit_usd - cost_usd) / cost_usd)
}

pub fn economic_outcome(n: u64, cm: &ConfusionMatrix, p: &CostParameters) -> Result<EconomicOutcome> {
    let cost_usd = processing_cost(n, p)?;
    let penalty_usd = total_penalty(cm, p);
    let benefit_usd = p.value_prod - penalty_usd;
    let roi = roi(benefit_usd, cost_usd)?;
    Ok(EconomicOutcome {
        n_processed: n,
        cost_usd,
        penalty_usd,
        benefit_usd,
        roi,
    })
}
