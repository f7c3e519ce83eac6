//! Configuration pieces shared by several commands.

use indexmap::IndexMap;
use num_complex::Complex64;
use qcavity::decoherence::cat_state;
use qcavity::models::{cavity_decay_model, phase_damping_model, LindbladModel, PhaseDampingParams, RabiModelParams};
use qcavity::qstate::{
    boson_number, build_operator_set, ComplexMatrix, HilbertSpace, ModeLayout, SpinSector, StateVector,
};
use qcavity::units::{Dimension, Quantity};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Deserializes `value`, naming the offending key on failure.
pub fn parse<T: DeserializeOwned>(value: serde_json::Value) -> CliResult<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::config(inner.to_string())
        } else {
            CliError::config(format!("at `{path}`: {inner}"))
        }
    })
}

pub fn to_value<T: Serialize>(v: &T) -> CliResult<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| CliError::config(e.to_string()))
}

pub fn si(q: &Quantity, dim: Dimension, key: &str) -> CliResult<f64> {
    Ok(q.si_as(dim, key)?)
}

pub fn freq(q: &Quantity, key: &str) -> CliResult<f64> {
    si(q, Dimension::Frequency, key)
}

/// Inclusive uniform grid of a dimensioned quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: Quantity,
    pub stop: Quantity,
    pub samples: usize,
}

impl GridConfig {
    pub fn from_si(start: f64, stop: f64, samples: usize, dim: Dimension) -> Self {
        Self {
            start: Quantity::from_si(start, dim),
            stop: Quantity::from_si(stop, dim),
            samples,
        }
    }

    pub fn points(&self, dim: Dimension, key: &str) -> CliResult<Vec<f64>> {
        let a = si(&self.start, dim, &format!("{key}.start"))?;
        let b = si(&self.stop, dim, &format!("{key}.stop"))?;
        if self.samples < 2 {
            return Err(CliError::config(format!("{key}.samples must be at least 2")));
        }
        let step = (b - a) / (self.samples - 1) as f64;
        Ok((0..self.samples).map(|i| a + step * i as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Tavis–Cummings emitters in a cavity that leaks photons.
    CavityDecay {
        omega0: Quantity,
        omega: Quantity,
        lambda: Quantity,
        n_emitters: usize,
        kappa: Quantity,
        boson_cutoff: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sector: Option<SpinSector>,
    },
    /// Single oscillator with number-basis dephasing.
    PhaseDamping {
        omega: Quantity,
        kappa_phi: Quantity,
        boson_cutoff: usize,
    },
}

/// A model together with the observables it supports.
pub struct BuiltModel {
    pub model: LindbladModel,
    pub layout: ModeLayout,
    pub space: Option<HilbertSpace>,
    pub operators: IndexMap<String, ComplexMatrix>,
    /// (ω, κ_φ) when the exact phase-damping solution applies.
    pub phase_damping: Option<(f64, f64)>,
}

impl BuiltModel {
    /// Selected observables; an empty request yields every supported one.
    pub fn observables(&self, requested: &[String]) -> CliResult<Vec<(String, ComplexMatrix)>> {
        if requested.is_empty() {
            return Ok(self.operators.iter().map(|(k, v)| (k.clone(), v.clone())).collect());
        }
        requested
            .iter()
            .map(|name| {
                self.operators
                    .get(name)
                    .map(|op| (name.clone(), op.clone()))
                    .ok_or_else(|| {
                        let known: Vec<&str> = self.operators.keys().map(String::as_str).collect();
                        CliError::config(format!("unknown observable '{name}', expected one of {known:?}"))
                    })
            })
            .collect()
    }
}

impl ModelConfig {
    pub fn build(&self) -> CliResult<BuiltModel> {
        match self {
            ModelConfig::CavityDecay {
                omega0,
                omega,
                lambda,
                n_emitters,
                kappa,
                boson_cutoff,
                sector,
            } => {
                let p = RabiModelParams {
                    omega0: freq(omega0, "model.omega0")?,
                    omega: freq(omega, "model.omega")?,
                    lambda: freq(lambda, "model.lambda")?,
                    n_emitters: *n_emitters,
                    kappa: freq(kappa, "model.kappa")?,
                };
                let space = HilbertSpace::new(*n_emitters, *boson_cutoff, sector.unwrap_or(SpinSector::Collective))?;
                let model = cavity_decay_model(&p, &space)?;
                let ops = build_operator_set(&space);
                let n = ops.number();
                let mut operators = IndexMap::new();
                operators.insert("excitations".to_string(), &n + &ops.sz);
                operators.insert("n".to_string(), n);
                operators.insert("sz".to_string(), ops.sz.clone());
                operators.sort_keys();
                Ok(BuiltModel {
                    layout: space.layout(),
                    model,
                    space: Some(space),
                    operators,
                    phase_damping: None,
                })
            }
            ModelConfig::PhaseDamping {
                omega,
                kappa_phi,
                boson_cutoff,
            } => {
                let p = PhaseDampingParams {
                    omega: freq(omega, "model.omega")?,
                    kappa_phi: freq(kappa_phi, "model.kappa_phi")?,
                };
                let model = phase_damping_model(&p, *boson_cutoff)?;
                let mut operators = IndexMap::new();
                operators.insert("n".to_string(), boson_number(boson_cutoff + 1));
                Ok(BuiltModel {
                    layout: ModeLayout::oscillator(*boson_cutoff),
                    model,
                    space: None,
                    operators,
                    phase_damping: Some((p.omega, p.kappa_phi)),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateConfig {
    /// Spin basis state `spin` (Dicke index, 0 = all ground) with `n` quanta.
    Basis {
        #[serde(default)]
        spin: usize,
        n: usize,
    },
    /// Equal superposition of number states with a common spin state.
    Superposition {
        #[serde(default)]
        spin: usize,
        levels: Vec<usize>,
    },
    /// |e, √n e^{iφ}⟩ + |g, √n e^{−iφ}⟩ for a single emitter.
    Cat { n: f64, phi: Quantity },
}

impl InitialStateConfig {
    pub fn build(&self, built: &BuiltModel) -> CliResult<StateVector> {
        let layout = built.layout;
        let index = |spin: usize, n: usize| -> CliResult<usize> {
            if spin >= layout.spin_dim {
                return Err(CliError::config(format!(
                    "initial_state.spin {spin} is outside the {} spin states",
                    layout.spin_dim
                )));
            }
            if n >= layout.boson_dim {
                return Err(CliError::config(format!(
                    "initial_state level {n} exceeds the boson cutoff {}",
                    layout.boson_dim - 1
                )));
            }
            Ok(spin * layout.boson_dim + n)
        };
        match self {
            InitialStateConfig::Basis { spin, n } => Ok(StateVector::basis(layout.dim(), index(*spin, *n)?)),
            InitialStateConfig::Superposition { spin, levels } => {
                let idx = levels.iter().map(|&n| index(*spin, n)).collect::<CliResult<Vec<_>>>()?;
                Ok(StateVector::equal_superposition(layout.dim(), &idx)?)
            }
            InitialStateConfig::Cat { n, phi } => {
                let collective_one = built
                    .space
                    .is_some_and(|s| s.n_emitters() == 1 && s.sector() == SpinSector::Collective);
                if !collective_one {
                    return Err(CliError::config(
                        "initial_state.kind = cat needs a cavity_decay model with one emitter",
                    ));
                }
                let phi = si(phi, Dimension::Angle, "initial_state.phi")?;
                Ok(cat_state(*n, phi, layout.boson_dim - 1)?)
            }
        }
    }
}

/// Complex number written as `[re, im]`.
pub fn complex_from_pair(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}
