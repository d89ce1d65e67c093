use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{selector_seed, Evaluation, RunOutput, Truth};
use crate::datagen::{generate, ScenarioConfig};
use crate::error::{Result, SubdataError};
use crate::regression::{expand_interactions, InteractionSpec};
use crate::selectors::SelectorSpec;

/// Which covariates IBOSS sees in an interaction scenario. The other
/// selectors always use the base covariates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IbossDesign {
    #[default]
    Main,
    Expanded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub scenario: ScenarioConfig,
    pub selectors: Vec<SelectorSpec>,
    pub reps: usize,
    pub iboss_design: IbossDesign,
}

impl SimulationPlan {
    pub fn new(scenario: ScenarioConfig, selectors: Vec<SelectorSpec>, reps: usize) -> Self {
        Self {
            scenario,
            selectors,
            reps,
            iboss_design: IbossDesign::Main,
        }
    }

    fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.reps == 0 {
            return Err(SubdataError::Config("reps must be at least 1".into()));
        }
        if self.selectors.is_empty() {
            return Err(SubdataError::Config("no selectors requested".into()));
        }
        let (n, k) = (self.scenario.n, self.scenario.k);
        for s in &self.selectors {
            if matches!(s, SelectorSpec::Levss { .. } | SelectorSpec::Oss) && k >= n {
                return Err(SubdataError::Config(format!("{} needs k < n, got k = n = {n}", s.label())));
            }
        }
        Ok(())
    }
}

/// Records come back ordered by repetition, then by selector as listed in
/// the plan, whatever the thread count.
pub fn run_simulation(plan: &SimulationPlan) -> Result<RunOutput> {
    plan.validate()?;
    let outputs: Vec<Result<RunOutput>> = (0..plan.reps)
        .into_par_iter()
        .map(|rep| run_repetition(plan, rep))
        .collect();
    let mut out = RunOutput::default();
    for o in outputs {
        out.extend(o?);
    }
    if !out.failures.is_empty() {
        warn!("{} selections failed and are excluded from aggregates", out.failures.len());
    }
    Ok(out)
}

fn run_repetition(plan: &SimulationPlan, rep: usize) -> Result<RunOutput> {
    let cfg = plan.scenario.for_repetition(rep);
    let data = generate(&cfg)?;
    let y = data.response().expect("generated with response").to_vec();
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;

    let expanded = if cfg.interaction {
        Some(expand_interactions(&data, &InteractionSpec::all_pairs(cfg.p))?)
    } else {
        None
    };
    let design = expanded.as_ref().unwrap_or(&data);
    let design_means = design.column_means();

    let mut out = RunOutput::default();
    for spec in &plan.selectors {
        let select_on = match (spec, plan.iboss_design) {
            (SelectorSpec::Iboss, IbossDesign::Expanded) => design,
            _ => &data,
        };
        let eval = Evaluation {
            design,
            select_on,
            design_means: &design_means,
            y_mean,
            sigma2: cfg.sigma2,
            truth: Truth {
                intercept: cfg.beta0,
                slopes: &cfg.beta_slopes,
                main_split: cfg.interaction.then_some(cfg.p),
            },
        };
        match eval.run(spec, cfg.k, selector_seed(cfg.seed), rep) {
            Ok(r) => out.records.push(r),
            Err(f) => out.failures.push(f),
        }
    }
    Ok(out)
}
