//! Ito state-vector unraveling of the master equation.
//!
//! Each jump (L, r) becomes a noise channel B = √(2r)·L driven by a complex
//! Wiener increment with E|dξ|² = dt, so the ensemble average of |ψ⟩⟨ψ|
//! follows exactly the generator used in [`crate::lindblad`].

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::LindbladModel;
use crate::qstate::{complex, ComplexMatrix, ComplexVector, DensityMatrix, ModeLayout, StateVector};

/// Largest allowed dt·max(rate).
pub const STABILITY_LIMIT: f64 = 0.05;
/// Norm below which a trajectory is declared collapsed.
pub const NORM_FLOOR: f64 = 1e-12;
/// Largest tolerated fraction of failed trajectories.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;
/// Channel populations at or below this are ignored in entropy sums.
pub const POPULATION_FLOOR: f64 = 1e-15;

const PROJECTOR_TOL: f64 = 1e-10;
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItoConfig {
    pub dt: f64,
    pub steps: usize,
    pub ensemble_size: usize,
    pub base_seed: u64,
    pub record_every: usize,
}

impl ItoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be >= 1".into()));
        }
        if self.ensemble_size == 0 {
            return Err(Error::Config("ensemble_size must be >= 1".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be >= 1".into()));
        }
        Ok(())
    }

    /// Step indices at which states are recorded (always includes 0 and the last step).
    pub fn record_steps(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..=self.steps).step_by(self.record_every).collect();
        if *out.last().unwrap() != self.steps {
            out.push(self.steps);
        }
        out
    }

    pub fn record_times(&self) -> Vec<f64> {
        self.record_steps().into_iter().map(|k| k as f64 * self.dt).collect()
    }

    pub fn t_final(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// Complete set of orthogonal projectors defining the channels of the
/// dispersion entropy.
#[derive(Debug, Clone)]
pub struct ChannelProjectors {
    projectors: Vec<ComplexMatrix>,
}

impl ChannelProjectors {
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::Model("at least one channel projector is required".into()))?;
        let d = first.nrows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, p) in projectors.iter().enumerate() {
            if p.shape() != (d, d) {
                return Err(Error::Shape(format!(
                    "projector {k} has shape {:?}, expected {d}x{d}",
                    p.shape()
                )));
            }
            if crate::qstate::max_abs(&(p - p.adjoint())) > PROJECTOR_TOL {
                return Err(Error::Model(format!("projector {k} is not Hermitian")));
            }
            if crate::qstate::max_abs(&(p * p - p)) > PROJECTOR_TOL {
                return Err(Error::Model(format!("projector {k} is not idempotent")));
            }
            for (j, q) in projectors.iter().enumerate().take(k) {
                if crate::qstate::max_abs(&(p * q)) > PROJECTOR_TOL {
                    return Err(Error::Model(format!("projectors {j} and {k} are not orthogonal")));
                }
            }
            sum += p;
        }
        if crate::qstate::max_abs(&(sum - ComplexMatrix::identity(d, d))) > PROJECTOR_TOL {
            return Err(Error::Model("channel projectors do not sum to the identity".into()));
        }
        Ok(Self { projectors })
    }

    /// One channel per boson number level n: P_n = 1_spin ⊗ |n⟩⟨n|.
    pub fn number_basis(layout: ModeLayout) -> Self {
        let d = layout.dim();
        let projectors = (0..layout.boson_dim)
            .map(|n| {
                ComplexMatrix::from_fn(d, d, |i, j| {
                    if i == j && layout.boson_level(i) == n {
                        complex(1.0)
                    } else {
                        complex(0.0)
                    }
                })
            })
            .collect();
        Self { projectors }
    }

    /// One channel per computational basis state.
    pub fn computational_basis(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|k| {
                let mut p = ComplexMatrix::zeros(dim, dim);
                p[(k, k)] = complex(1.0);
                p
            })
            .collect();
        Self { projectors }
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// ⟨P_k⟩ for each channel.
    pub fn populations(&self, psi: &StateVector) -> Vec<f64> {
        self.projectors.iter().map(|p| psi.expectation(p).re).collect()
    }
}

/// K = −Σ ⟨P_k⟩ ln ⟨P_k⟩.
pub fn dispersion_entropy(psi: &StateVector, projectors: &ChannelProjectors) -> f64 {
    projectors
        .populations(psi)
        .into_iter()
        .filter(|&p| p > POPULATION_FLOOR)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// −Σ_k ((1 − ⟨P_k⟩)/⟨P_k⟩) R_k with R_k = Σ_j |⟨P_k L_j P_k⟩|².
pub fn entropy_production_rate(psi: &StateVector, projectors: &ChannelProjectors, jump_ops: &[ComplexMatrix]) -> f64 {
    let mut rate = 0.0;
    for p in projectors.projectors() {
        let pk = psi.expectation(p).re;
        if pk <= POPULATION_FLOOR {
            continue;
        }
        let r_k: f64 = jump_ops.iter().map(|l| psi.expectation(&(p * l * p)).norm_sqr()).sum();
        rate -= ((1.0 - pk).max(0.0) / pk) * r_k;
    }
    rate
}

/// Precomputed operators for Euler–Maruyama steps.
#[derive(Debug, Clone)]
pub struct ItoStepper {
    hamiltonian: ComplexMatrix,
    channels: Vec<(ComplexMatrix, ComplexMatrix)>,
    max_rate: f64,
}

impl ItoStepper {
    pub fn new(model: &LindbladModel) -> Self {
        let channels = model
            .jumps()
            .iter()
            .filter(|j| j.rate() > 0.0)
            .map(|j| {
                let b = j.operator() * complex((2.0 * j.rate()).sqrt());
                let b_dag_b = b.adjoint() * &b;
                (b, b_dag_b)
            })
            .collect();
        Self {
            hamiltonian: model.hamiltonian().clone(),
            channels,
            max_rate: model.max_rate(),
        }
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    pub fn check_stability(&self, dt: f64) -> Result<()> {
        let product = dt * self.max_rate;
        if product >= STABILITY_LIMIT {
            return Err(Error::Stability(format!(
                "dt * max(rate) = {product:.4} must stay below {STABILITY_LIMIT}; reduce dt below {:.4e}",
                STABILITY_LIMIT / self.max_rate
            )));
        }
        Ok(())
    }

    /// One Euler–Maruyama update followed by renormalisation. Returns the new
    /// state and the norm it was divided by.
    pub fn step(
        &self,
        psi: &ComplexVector,
        noise: &[Complex64],
        dt: f64,
    ) -> std::result::Result<(ComplexVector, f64), String> {
        if noise.len() != self.channels.len() {
            return Err(format!(
                "{} noise increments for {} channels",
                noise.len(),
                self.channels.len()
            ));
        }
        let mut next = psi - (&self.hamiltonian * psi) * (I * dt);
        for ((b, b_dag_b), &dxi) in self.channels.iter().zip(noise) {
            let b_psi = b * psi;
            let mean_b = psi.dotc(&b_psi);
            let mean_b_dag = mean_b.conj();
            next += &b_psi * (mean_b_dag * dt);
            next -= (b_dag_b * psi) * complex(0.5 * dt);
            next -= psi * (0.5 * mean_b_dag * mean_b * dt);
            if dxi != complex(0.0) {
                next += (b_psi - psi * mean_b) * dxi;
            }
        }
        let norm = next.norm();
        if !(norm.is_finite() && norm > NORM_FLOOR) {
            return Err(format!("state norm collapsed to {norm:e}"));
        }
        next /= complex(norm);
        Ok((next, norm))
    }
}

/// Single Ito step on a normalised state.
pub fn ito_step(psi: &StateVector, model: &LindbladModel, noise: &[Complex64], dt: f64) -> Result<(StateVector, f64)> {
    if !psi.is_normalized() {
        return Err(Error::InvalidState("Ito step requires a normalised state".into()));
    }
    if psi.dim() != model.dim() {
        return Err(Error::Shape(format!(
            "state dimension {} does not match model dimension {}",
            psi.dim(),
            model.dim()
        )));
    }
    let stepper = ItoStepper::new(model);
    let (next, factor) = stepper
        .step(psi.amplitudes(), noise, dt)
        .map_err(|reason| Error::Numerical { step: 1, reason })?;
    Ok((StateVector::new(next)?, factor))
}

/// Complex Wiener increment with independent real and imaginary parts of variance dt/2.
pub fn wiener_increment<R: rand::Rng + ?Sized>(rng: &mut R, dt: f64) -> Complex64 {
    let scale = (0.5 * dt).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(scale * re, scale * im)
}

/// Generator for trajectory `index` of an ensemble seeded with `base_seed`.
pub fn trajectory_rng(base_seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index as u64);
    rng
}

/// Recorded states of one trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub index: usize,
    pub states: Vec<ComplexVector>,
    /// Largest deviation of the pre-renormalisation norm from 1.
    pub max_renorm_deviation: f64,
}

/// Integrates a single trajectory with its own deterministic noise stream.
pub fn run_trajectory(stepper: &ItoStepper, psi0: &ComplexVector, cfg: &ItoConfig, index: usize) -> Result<Trajectory> {
    let mut rng = trajectory_rng(cfg.base_seed, index);
    let mut psi = psi0.clone();
    let mut states = vec![psi.clone()];
    let mut max_dev: f64 = 0.0;
    let mut noise = vec![complex(0.0); stepper.n_channels()];
    for step in 1..=cfg.steps {
        for xi in noise.iter_mut() {
            *xi = wiener_increment(&mut rng, cfg.dt);
        }
        let (next, factor) = stepper.step(&psi, &noise, cfg.dt).map_err(|reason| Error::Trajectory {
            index,
            reason: format!("step {step}: {reason}"),
        })?;
        max_dev = max_dev.max((factor - 1.0).abs());
        psi = next;
        if step % cfg.record_every == 0 || step == cfg.steps {
            states.push(psi.clone());
        }
    }
    Ok(Trajectory {
        index,
        states,
        max_renorm_deviation: max_dev,
    })
}

/// Summary of dispersion entropy across the ensemble at each recorded time.
#[derive(Debug, Clone, Serialize)]
pub struct LocalizationStats {
    pub mean: Vec<f64>,
    pub std_dev: Vec<f64>,
    pub median: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Ensemble average of |ψ⟩⟨ψ| at each recorded time.
    pub mean_rho: Vec<DensityMatrix>,
    /// Dispersion entropy per trajectory (outer index) and time (inner index).
    pub entropy: Vec<Vec<f64>>,
    pub localization: Option<LocalizationStats>,
    /// Failed trajectories, listed by index.
    pub failures: Vec<(usize, Error)>,
    pub completed: usize,
    pub max_renorm_deviation: f64,
}

fn run_all(stepper: &ItoStepper, psi0: &ComplexVector, cfg: &ItoConfig) -> Vec<Result<Trajectory>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..cfg.ensemble_size)
            .into_par_iter()
            .map(|i| run_trajectory(stepper, psi0, cfg, i))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..cfg.ensemble_size)
            .map(|i| run_trajectory(stepper, psi0, cfg, i))
            .collect()
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Runs `cfg.ensemble_size` trajectories and averages them in index order,
/// so results do not depend on the number of worker threads.
pub fn run_ensemble(
    model: &LindbladModel,
    psi0: &StateVector,
    cfg: &ItoConfig,
    projectors: Option<&ChannelProjectors>,
) -> Result<EnsembleResult> {
    cfg.validate()?;
    if psi0.dim() != model.dim() {
        return Err(Error::Shape(format!(
            "initial state dimension {} does not match model dimension {}",
            psi0.dim(),
            model.dim()
        )));
    }
    if !psi0.is_normalized() {
        return Err(Error::InvalidState("initial state must be normalised".into()));
    }
    if let Some(p) = projectors {
        if p.dim() != model.dim() {
            return Err(Error::Shape(
                "channel projectors do not match the model dimension".into(),
            ));
        }
    }
    let stepper = ItoStepper::new(model);
    stepper.check_stability(cfg.dt)?;

    let times = cfg.record_times();
    let n_times = times.len();
    let d = model.dim();
    let mut sums = vec![ComplexMatrix::zeros(d, d); n_times];
    let mut entropy = Vec::new();
    let mut failures = Vec::new();
    let mut completed = 0usize;
    let mut max_dev: f64 = 0.0;

    for outcome in run_all(&stepper, psi0.amplitudes(), cfg) {
        match outcome {
            Ok(traj) => {
                for (sum, psi) in sums.iter_mut().zip(&traj.states) {
                    sum.gerc(complex(1.0), psi, psi, complex(1.0));
                }
                if let Some(p) = projectors {
                    entropy.push(
                        traj.states
                            .iter()
                            .map(|psi| dispersion_entropy(&StateVector::new(psi.clone()).expect("renormalised"), p))
                            .collect(),
                    );
                }
                max_dev = max_dev.max(traj.max_renorm_deviation);
                completed += 1;
            }
            Err(e) => {
                let index = match &e {
                    Error::Trajectory { index, .. } => *index,
                    _ => usize::MAX,
                };
                failures.push((index, e));
            }
        }
    }

    if failures.len() as f64 > MAX_FAILURE_FRACTION * cfg.ensemble_size as f64 || completed == 0 {
        let first = failures
            .first()
            .map(|(_, e)| e.to_string())
            .unwrap_or_else(|| "no trajectory completed".into());
        return Err(Error::Ensemble {
            failed: failures.len(),
            total: cfg.ensemble_size,
            first,
        });
    }

    let scale = complex(1.0 / completed as f64);
    let mean_rho = sums
        .into_iter()
        .map(|s| DensityMatrix::from_matrix(s * scale).expect("average of projectors is square"))
        .collect();

    let localization = projectors.map(|_| {
        let mut mean = vec![0.0; n_times];
        let mut std_dev = vec![0.0; n_times];
        let mut med = vec![0.0; n_times];
        for t in 0..n_times {
            let mut column: Vec<f64> = entropy.iter().map(|row: &Vec<f64>| row[t]).collect();
            let m = column.iter().sum::<f64>() / column.len() as f64;
            let var =
                column.iter().map(|k| (k - m).powi(2)).sum::<f64>() / column.len().max(2).saturating_sub(1) as f64;
            mean[t] = m;
            std_dev[t] = var.sqrt();
            med[t] = median(&mut column);
        }
        LocalizationStats {
            mean,
            std_dev,
            median: med,
        }
    });

    Ok(EnsembleResult {
        times,
        mean_rho,
        entropy,
        localization,
        failures,
        completed,
        max_renorm_deviation: max_dev,
    })
}
