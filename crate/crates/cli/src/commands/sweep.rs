use qcavity::mtparams::{feasibility_report, parameter_dimension, EstimateMode};
use qcavity::units::Quantity;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::commands::estimate::{parameter_set, resolved_parameters, ParameterMap};
use crate::error::{CliError, CliResult};
use crate::output::{RunContext, Table};
use crate::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

/// Sweep values given as explicit entries or as a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValues {
    List(Vec<Value>),
    Range {
        start: Value,
        stop: Value,
        samples: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: SweepValues,
    #[serde(default = "default_mode")]
    pub mode: EstimateMode,
    /// Report quantities added as extra columns.
    #[serde(default)]
    pub quantities: Vec<String>,
    /// Base parameter overrides.
    #[serde(default)]
    pub parameters: ParameterMap,
}

fn default_mode() -> EstimateMode {
    EstimateMode::Anchored
}

impl SweepConfig {
    fn parse_value(&self, v: &Value) -> CliResult<f64> {
        let mut probe = ParameterMap::new();
        probe.insert(self.parameter.clone(), v.clone());
        // reuse the override parser for unit handling
        let set = parameter_set(&probe)?;
        Ok(set.get(&self.parameter)?)
    }

    /// SI values of the swept parameter.
    pub fn points(&self) -> CliResult<Vec<f64>> {
        match &self.values {
            SweepValues::List(vs) => vs.iter().map(|v| self.parse_value(v)).collect(),
            SweepValues::Range {
                start,
                stop,
                samples,
                spacing,
            } => {
                let (a, b) = (self.parse_value(start)?, self.parse_value(stop)?);
                if *samples < 2 {
                    return Err(CliError::config("values.samples must be at least 2"));
                }
                let k = (*samples - 1) as f64;
                Ok((0..*samples)
                    .map(|i| {
                        let f = i as f64 / k;
                        match spacing {
                            Spacing::Linear => a + (b - a) * f,
                            Spacing::Log => (a.ln() + (b.ln() - a.ln()) * f).exp(),
                        }
                    })
                    .collect())
            }
        }
    }
}

impl Task for SweepConfig {
    const NAME: &'static str = "sweep";

    fn resolve(mut self) -> CliResult<Self> {
        let dim = parameter_dimension(&self.parameter)
            .ok_or_else(|| CliError::config(format!("unknown sweep parameter '{}'", self.parameter)))?;
        if let SweepValues::Range {
            start,
            stop,
            spacing: Spacing::Log,
            ..
        } = &self.values
        {
            if !(self.parse_value(start)? > 0.0 && self.parse_value(stop)? > 0.0) {
                return Err(CliError::config("log spacing needs positive start and stop"));
            }
        }
        let points = self.points()?;
        if points.is_empty() {
            return Err(CliError::config("values is empty"));
        }
        let set = parameter_set(&self.parameters)?;
        self.parameters = resolved_parameters(&set)?;
        self.values = SweepValues::List(
            points
                .iter()
                .map(|&v| match dim {
                    Some(d) => Value::String(Quantity::from_si(v, d).to_string()),
                    None => serde_json::Number::from_f64(v)
                        .map(Value::Number)
                        .unwrap_or(Value::Null),
                })
                .collect(),
        );
        let report = feasibility_report(&set, self.mode)?;
        if let Some(q) = self.quantities.iter().find(|q| report.get(q).is_none()) {
            return Err(CliError::config(format!("unknown report quantity '{q}'")));
        }
        Ok(self)
    }

    fn execute(&self, ctx: &RunContext) -> CliResult<()> {
        let base = parameter_set(&self.parameters)?;
        let mut columns = vec![
            self.parameter.clone(),
            "verdict".into(),
            "margin".into(),
            "feasible_n_max".into(),
            "collapse_window_lower".into(),
            "collapse_window_upper".into(),
        ];
        columns.extend(self.quantities.iter().cloned());
        let mut table = Table::new(columns);
        for v in self.points()? {
            let mut set = base;
            set.set(&self.parameter, v)?;
            let r = feasibility_report(&set, self.mode)?;
            let mut row = vec![
                v.into(),
                r.verdict.into(),
                r.margin.into(),
                r.feasible_n_max.map(|n| (n as usize).into()).unwrap_or(0usize.into()),
                r.collapse_window.lower.into(),
                r.collapse_window.upper.into(),
            ];
            for q in &self.quantities {
                row.push(r.value(q).unwrap_or(f64::NAN).into());
            }
            table.push(row);
        }
        ctx.write_table("sweep", &table)?;
        Ok(())
    }
}
