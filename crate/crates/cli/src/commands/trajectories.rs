use qcavity::lindblad::{evolve, EvolutionRecord, IntegratorConfig};
use qcavity::qstate::{trace_distance, DensityMatrix};
use qcavity::trajectories::{run_ensemble, ChannelProjectors, EnsembleResult, ItoConfig};
use qcavity::units::{Dimension, Quantity};
use serde::{Deserialize, Serialize};

use crate::commands::evolve::observable_table;
use crate::config::{si, BuiltModel, InitialStateConfig, ModelConfig};
use crate::error::CliResult;
use crate::output::{RunContext, Table};
use crate::Task;

const DEFAULT_RECORDS: usize = 100;

/// Basis whose projectors define the dispersion-entropy channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelChoice {
    /// Boson number states.
    #[default]
    Number,
    /// Every basis state of the composite space.
    Basis,
    None,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoriesConfig {
    pub model: ModelConfig,
    pub initial_state: InitialStateConfig,
    pub dt: Quantity,
    pub steps: usize,
    pub ensemble_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(default)]
    pub channels: ChannelChoice,
    /// Compare the ensemble average with the master equation at every record.
    #[serde(default = "default_true")]
    pub cross_check: bool,
    #[serde(default)]
    pub observables: Vec<String>,
}

impl TrajectoriesConfig {
    pub fn ito(&self, seed: u64) -> CliResult<ItoConfig> {
        let cfg = ItoConfig {
            dt: si(&self.dt, Dimension::Time, "dt")?,
            steps: self.steps,
            ensemble_size: self.ensemble_size,
            base_seed: seed,
            record_every: self.record_every.unwrap_or(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn projectors(&self, built: &BuiltModel) -> Option<ChannelProjectors> {
        match self.channels {
            ChannelChoice::Number => Some(ChannelProjectors::number_basis(built.layout)),
            ChannelChoice::Basis => Some(ChannelProjectors::computational_basis(built.layout.dim())),
            ChannelChoice::None => None,
        }
    }
}

/// Master-equation reference sampled at the ensemble record times, using an
/// RK4 step that divides the stochastic step.
pub fn reference_record(built: &BuiltModel, rho0: &DensityMatrix, ito: &ItoConfig) -> CliResult<EvolutionRecord> {
    let sub = (ito.dt / IntegratorConfig::default_dt(&built.model)).ceil().max(1.0) as usize;
    let cfg = IntegratorConfig::rk4(ito.dt / sub as f64, ito.t_final(), ito.record_every * sub);
    Ok(evolve(&built.model, rho0, &cfg)?)
}

/// Trace distance between ensemble average and reference at each record time.
pub fn cross_check(ens: &EnsembleResult, reference: &EvolutionRecord) -> CliResult<Vec<f64>> {
    ens.times
        .iter()
        .zip(&ens.mean_rho)
        .map(|(&t, rho)| {
            let r = &reference.states[reference.nearest_index(t)];
            Ok(trace_distance(rho.matrix(), r.matrix())?)
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct FailureEntry {
    index: usize,
    error: String,
}

#[derive(Debug, Serialize)]
struct Summary {
    seed: u64,
    ensemble_size: usize,
    completed: usize,
    failures: Vec<FailureEntry>,
    max_renorm_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_trace_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_trace_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_entropy_initial: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_entropy_final: Option<f64>,
}

impl Task for TrajectoriesConfig {
    const NAME: &'static str = "trajectories";

    fn resolve(mut self) -> CliResult<Self> {
        let built = self.model.build()?;
        built.observables(&self.observables)?;
        self.initial_state.build(&built)?;
        if self.record_every.is_none() {
            self.record_every = Some(self.steps.div_ceil(DEFAULT_RECORDS).max(1));
        }
        self.ito(0)?;
        Ok(self)
    }

    fn execute(&self, ctx: &RunContext) -> CliResult<()> {
        let built = self.model.build()?;
        let observables = built.observables(&self.observables)?;
        let psi0 = self.initial_state.build(&built)?;
        let ito = self.ito(ctx.seed)?;
        let projectors = self.projectors(&built);
        let ens = run_ensemble(&built.model, &psi0, &ito, projectors.as_ref())?;
        for (index, e) in &ens.failures {
            log::warn!("trajectory {index} failed: {e}");
        }

        let mut record = EvolutionRecord {
            times: ens.times.clone(),
            states: ens.mean_rho.clone(),
            ..Default::default()
        };
        let names: Vec<String> = observables.iter().map(|(n, _)| n.clone()).collect();
        for (name, op) in &observables {
            record.add_observable(name, op);
        }
        let distances = if self.cross_check {
            let reference = reference_record(&built, &DensityMatrix::from_pure(&psi0), &ito)?;
            Some(cross_check(&ens, &reference)?)
        } else {
            None
        };
        let mut table = observable_table(&record, &names);
        if let Some(d) = &distances {
            table.columns.push("trace_distance".into());
            for (row, v) in table.rows.iter_mut().zip(d) {
                row.push((*v).into());
            }
        }
        ctx.write_table("observables", &table)?;

        let mut entropy = Table::new(["t", "mean", "std_dev", "median"]);
        if let Some(loc) = &ens.localization {
            for (i, &t) in ens.times.iter().enumerate() {
                entropy.push(vec![
                    t.into(),
                    loc.mean[i].into(),
                    loc.std_dev[i].into(),
                    loc.median[i].into(),
                ]);
            }
        }
        ctx.write_table("entropy", &entropy)?;

        let summary = Summary {
            seed: ctx.seed,
            ensemble_size: ito.ensemble_size,
            completed: ens.completed,
            failures: ens
                .failures
                .iter()
                .map(|(index, e)| FailureEntry {
                    index: *index,
                    error: e.to_string(),
                })
                .collect(),
            max_renorm_deviation: ens.max_renorm_deviation,
            max_trace_distance: distances.as_ref().map(|d| d.iter().copied().fold(0.0, f64::max)),
            final_trace_distance: distances.as_ref().and_then(|d| d.last().copied()),
            median_entropy_initial: ens.localization.as_ref().and_then(|l| l.median.first().copied()),
            median_entropy_final: ens.localization.as_ref().and_then(|l| l.median.last().copied()),
        };
        ctx.write_json("summary.json", &summary)?;
        Ok(())
    }
}
