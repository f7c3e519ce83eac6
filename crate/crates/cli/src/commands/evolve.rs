use qcavity::lindblad::{evolve, phase_damping_solution, EvolutionRecord, IntegratorConfig};
use qcavity::qstate::{trace_distance, DensityMatrix, Diagnostics};
use qcavity::units::{Dimension, Quantity};
use serde::{Deserialize, Serialize};

use crate::config::{si, InitialStateConfig, ModelConfig};
use crate::error::{CliError, CliResult};
use crate::output::{RunContext, Table};
use crate::Task;

/// Samples kept by default when `sample_every` is omitted.
const DEFAULT_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntegratorChoice {
    Rk4 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dt: Option<Quantity>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sample_every: Option<usize>,
    },
    Rk45 {
        tolerance: f64,
        intervals: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub model: ModelConfig,
    pub initial_state: InitialStateConfig,
    pub t_final: Quantity,
    pub integrator: IntegratorChoice,
    /// Observable names; all supported ones when empty.
    #[serde(default)]
    pub observables: Vec<String>,
}

impl EvolveConfig {
    fn integrator(&self) -> CliResult<IntegratorConfig> {
        let t_final = si(&self.t_final, Dimension::Time, "t_final")?;
        let cfg = match &self.integrator {
            IntegratorChoice::Rk4 {
                dt: Some(dt),
                sample_every: Some(every),
            } => IntegratorConfig::rk4(si(dt, Dimension::Time, "integrator.dt")?, t_final, *every),
            IntegratorChoice::Rk4 { .. } => return Err(CliError::config("integrator is not resolved")),
            IntegratorChoice::Rk45 { tolerance, intervals } => IntegratorConfig::rk45(*tolerance, t_final, *intervals),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Observable, entropy and diagnostics tables of a master-equation record.
pub fn observable_table(record: &EvolutionRecord, names: &[String]) -> Table {
    let mut table = Table::new(std::iter::once("t".to_string()).chain(names.iter().cloned()));
    for (i, &t) in record.times.iter().enumerate() {
        let mut row = vec![t.into()];
        row.extend(names.iter().map(|n| record.observables[n][i].into()));
        table.push(row);
    }
    table
}

#[derive(Debug, Serialize)]
struct Summary {
    samples: usize,
    accepted_steps: usize,
    rejected_steps: usize,
    warnings: Vec<String>,
    final_diagnostics: Diagnostics,
    final_purity: f64,
    /// Largest trace distance to the exact phase-damping solution, when it applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_solution_max_trace_distance: Option<f64>,
}

impl Task for EvolveConfig {
    const NAME: &'static str = "evolve";

    fn resolve(mut self) -> CliResult<Self> {
        let built = self.model.build()?;
        built.observables(&self.observables)?;
        self.initial_state.build(&built)?;
        let t_final = si(&self.t_final, Dimension::Time, "t_final")?;
        if let IntegratorChoice::Rk4 { dt, sample_every } = &mut self.integrator {
            let step = match dt {
                Some(q) => si(q, Dimension::Time, "integrator.dt")?,
                None => {
                    let d = IntegratorConfig::default_dt(&built.model);
                    *dt = Some(Quantity::from_si(d, Dimension::Time));
                    d
                }
            };
            if sample_every.is_none() {
                let steps = (t_final / step).ceil().max(1.0) as usize;
                *sample_every = Some(steps.div_ceil(DEFAULT_SAMPLES).max(1));
            }
        }
        self.integrator()?;
        Ok(self)
    }

    fn execute(&self, ctx: &RunContext) -> CliResult<()> {
        let built = self.model.build()?;
        let observables = built.observables(&self.observables)?;
        let psi0 = self.initial_state.build(&built)?;
        let rho0 = DensityMatrix::from_pure(&psi0);
        let mut record = evolve(&built.model, &rho0, &self.integrator()?)?;
        let names: Vec<String> = observables.iter().map(|(n, _)| n.clone()).collect();
        for (name, op) in &observables {
            record.add_observable(name, op);
        }
        ctx.write_table("observables", &observable_table(&record, &names))?;

        let mut entropy = Table::new(["t", "von_neumann_entropy", "purity"]);
        for (t, s) in record.times.iter().zip(&record.states) {
            entropy.push(vec![(*t).into(), s.von_neumann_entropy().into(), s.purity().into()]);
        }
        ctx.write_table("entropy", &entropy)?;

        let exact = match built.phase_damping {
            Some((omega, kappa)) => {
                let mut worst: f64 = 0.0;
                for (t, s) in record.times.iter().zip(&record.states) {
                    let reference = phase_damping_solution(rho0.matrix(), omega, kappa, *t);
                    worst = worst.max(trace_distance(s.matrix(), &reference)?);
                }
                Some(worst)
            }
            None => None,
        };
        let last = record.final_state();
        let summary = Summary {
            samples: record.times.len(),
            accepted_steps: record.accepted_steps,
            rejected_steps: record.rejected_steps,
            warnings: record.warnings.clone(),
            final_diagnostics: last.validate(),
            final_purity: last.purity(),
            exact_solution_max_trace_distance: exact,
        };
        ctx.write_json("summary.json", &summary)?;
        Ok(())
    }
}
