use indexmap::IndexMap;
use qcavity::mtparams::{
    feasibility_report, parameter_dimension, EstimateMode, EstimateReport, MtParameterSet, PARAMETERS,
};
use qcavity::units::{Dimension, Quantity};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::output::RunContext;
use crate::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Raw,
    Anchored,
    #[default]
    Both,
}

impl ModeChoice {
    pub fn modes(self) -> Vec<EstimateMode> {
        match self {
            ModeChoice::Raw => vec![EstimateMode::Raw],
            ModeChoice::Anchored => vec![EstimateMode::Anchored],
            ModeChoice::Both => vec![EstimateMode::Raw, EstimateMode::Anchored],
        }
    }
}

/// Parameter overrides: unit strings for dimensioned entries, numbers otherwise.
pub type ParameterMap = IndexMap<String, Value>;

fn parse_parameter(name: &str, dim: Option<Dimension>, value: &Value) -> CliResult<f64> {
    let key = format!("parameters.{name}");
    match (dim, value) {
        (Some(d), Value::String(s)) => {
            let q: Quantity = s.parse().map_err(|e| CliError::config(format!("{key}: {e}")))?;
            Ok(q.si_as(d, &key)?)
        }
        (Some(d), _) => Err(CliError::config(format!(
            "{key} needs a {d} with a unit, e.g. \"1 {}\"",
            Quantity::from_si(1.0, d).unit()
        ))),
        (None, Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| CliError::config(format!("{key} is not a finite number"))),
        (None, _) => Err(CliError::config(format!("{key} must be a plain number"))),
    }
}

/// Defaults with `overrides` applied.
pub fn parameter_set(overrides: &ParameterMap) -> CliResult<MtParameterSet> {
    let mut set = MtParameterSet::published_defaults();
    for (name, value) in overrides {
        let dim = parameter_dimension(name).ok_or_else(|| {
            let known: Vec<&str> = PARAMETERS.iter().map(|p| p.0).collect();
            CliError::config(format!(
                "unknown parameter 'parameters.{name}', expected one of {known:?}"
            ))
        })?;
        set.set(name, parse_parameter(name, dim, value)?)?;
    }
    set.validate()?;
    Ok(set)
}

/// Every parameter of `set` written out in SI units.
pub fn resolved_parameters(set: &MtParameterSet) -> CliResult<ParameterMap> {
    let mut out = ParameterMap::new();
    for &(name, dim) in PARAMETERS {
        if name == "t_r" && set.t_r.is_none() {
            continue;
        }
        let v = set.get(name)?;
        let json = match dim {
            Some(d) => Value::String(Quantity::from_si(v, d).to_string()),
            None => serde_json::Number::from_f64(v)
                .map(Value::Number)
                .ok_or_else(|| CliError::config(format!("parameter {name} is not finite")))?,
        };
        out.insert(name.to_string(), json);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default)]
    pub mode: ModeChoice,
    #[serde(default)]
    pub parameters: ParameterMap,
}

impl EstimateConfig {
    pub fn reports(&self) -> CliResult<IndexMap<EstimateMode, EstimateReport>> {
        let set = parameter_set(&self.parameters)?;
        self.mode
            .modes()
            .into_iter()
            .map(|m| Ok((m, feasibility_report(&set, m)?)))
            .collect()
    }
}

impl Task for EstimateConfig {
    const NAME: &'static str = "estimate";

    fn default_config() -> Option<Self> {
        Some(Self::default())
    }

    fn resolve(mut self) -> CliResult<Self> {
        let set = parameter_set(&self.parameters)?;
        self.parameters = resolved_parameters(&set)?;
        Ok(self)
    }

    fn execute(&self, ctx: &RunContext) -> CliResult<()> {
        let reports = self.reports()?;
        for r in reports.values() {
            for note in &r.notes {
                log::info!("{:?}: {note}", r.mode);
            }
        }
        ctx.write_json("estimate_report.json", &reports)?;
        Ok(())
    }
}
