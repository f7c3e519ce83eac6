//! Master-equation integration.
//!
//! The generator is applied directly to ρ through matrix products:
//! dρ/dt = −i(H_eff ρ − ρ H_eff†) + Σ 2r L ρ L†, with H_eff = H − i Σ r L†L.

use indexmap::IndexMap;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::LindbladModel;
use crate::qstate::{complex, cutoff_warning, tensor_product, ComplexMatrix, DensityMatrix};

/// Largest Hilbert dimension for which [`liouvillian`] builds the dense superoperator.
pub const MAX_SUPEROPERATOR_DIM: usize = 64;

/// Trace drift above which states are renormalised (with a warning).
pub const TRACE_RENORM_THRESHOLD: f64 = 1e-8;

/// Default local error tolerance of the adaptive integrator.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with fixed step.
    Rk4 { dt: f64 },
    /// Dormand–Prince 5(4) with local error control.
    Rk45 { tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_final: f64,
    /// RK4: record every `sample_every` steps. RK45: number of equal output
    /// intervals on [0, t_final].
    pub sample_every: usize,
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_final: f64, sample_every: usize) -> Self {
        Self {
            method: Method::Rk4 { dt },
            t_final,
            sample_every,
        }
    }

    pub fn rk45(tolerance: f64, t_final: f64, intervals: usize) -> Self {
        Self {
            method: Method::Rk45 { tolerance },
            t_final,
            sample_every: intervals,
        }
    }

    /// Fixed step resolving the fastest generator scale with 50 steps.
    pub fn default_dt(model: &LindbladModel) -> f64 {
        let scale = model.frequency_scale();
        if scale > 0.0 {
            1.0 / (50.0 * scale)
        } else {
            1e-2
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config(format!("t_final must be > 0, got {}", self.t_final)));
        }
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be >= 1".into()));
        }
        match self.method {
            Method::Rk4 { dt } if !(dt.is_finite() && dt > 0.0) => {
                Err(Error::Config(format!("dt must be > 0, got {dt}")))
            }
            Method::Rk45 { tolerance } if !(tolerance > 0.0 && tolerance < 1e-2) => Err(Error::Config(format!(
                "tolerance must lie in (0, 1e-2), got {tolerance}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvolutionRecord {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: IndexMap<String, Vec<f64>>,
    pub warnings: Vec<String>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl EvolutionRecord {
    /// Re tr(ρ(t) O) at every sampled time.
    pub fn expectation_series(&self, op: &ComplexMatrix) -> Vec<f64> {
        self.states.iter().map(|s| s.expectation(op)).collect()
    }

    /// Computes and stores an observable series under `name`.
    pub fn add_observable(&mut self, name: &str, op: &ComplexMatrix) -> &[f64] {
        let series = self.expectation_series(op);
        self.observables.insert(name.to_string(), series);
        &self.observables[name]
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("records hold at least the initial state")
    }

    /// Index of the sample closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        self.times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Precomputed pieces of the Lindblad generator.
#[derive(Debug, Clone)]
pub struct Generator {
    h_eff: ComplexMatrix,
    h_eff_dag: ComplexMatrix,
    feeds: Vec<(ComplexMatrix, ComplexMatrix, Complex64)>,
}

impl Generator {
    pub fn new(model: &LindbladModel) -> Self {
        let mut h_eff = model.hamiltonian().clone();
        let mut feeds = Vec::new();
        for jump in model.jumps().iter().filter(|j| j.rate() > 0.0) {
            h_eff -= jump.ldag_l() * (I * jump.rate());
            feeds.push((
                jump.operator().clone(),
                jump.adjoint().clone(),
                complex(2.0 * jump.rate()),
            ));
        }
        let h_eff_dag = h_eff.adjoint();
        Self {
            h_eff,
            h_eff_dag,
            feeds,
        }
    }

    pub fn dim(&self) -> usize {
        self.h_eff.nrows()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = (&self.h_eff * rho - rho * &self.h_eff_dag) * (-I);
        for (l, l_dag, two_r) in &self.feeds {
            out += (l * rho * l_dag) * *two_r;
        }
        out
    }
}

/// dρ/dt = −i[H, ρ] + Σ r (2 L ρ L† − {L†L, ρ}).
pub fn lindblad_rhs(model: &LindbladModel, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.shape() != (model.dim(), model.dim()) {
        return Err(Error::Shape(format!(
            "state has shape {:?}, model dimension is {}",
            rho.shape(),
            model.dim()
        )));
    }
    Ok(Generator::new(model).apply(rho))
}

/// Column-stacking superoperator of the generator: vec(dρ/dt) = 𝓛 vec(ρ).
pub fn liouvillian(model: &LindbladModel) -> Result<ComplexMatrix> {
    let d = model.dim();
    if d > MAX_SUPEROPERATOR_DIM {
        return Err(Error::Shape(format!(
            "superoperator requested for dimension {d} > {MAX_SUPEROPERATOR_DIM}"
        )));
    }
    let gen = Generator::new(model);
    let id = ComplexMatrix::identity(d, d);
    // vec(AXB) = (Bᵀ ⊗ A) vec(X)
    let mut sup = (tensor_product(&id, &gen.h_eff) - tensor_product(&gen.h_eff_dag.transpose(), &id)) * (-I);
    for (l, l_dag, two_r) in &gen.feeds {
        sup += tensor_product(&l_dag.transpose(), l) * *two_r;
    }
    Ok(sup)
}

struct Tracker<'a> {
    model: &'a LindbladModel,
    warnings: Vec<String>,
    renormalisations: usize,
    worst_drift: f64,
    cutoff_warned: bool,
}

impl<'a> Tracker<'a> {
    fn new(model: &'a LindbladModel) -> Self {
        Self {
            model,
            warnings: Vec::new(),
            renormalisations: 0,
            worst_drift: 0.0,
            cutoff_warned: false,
        }
    }

    fn renormalise(&mut self, rho: &mut ComplexMatrix, t: f64) {
        let tr = rho.trace();
        let drift = (tr - complex(1.0)).norm();
        if drift > TRACE_RENORM_THRESHOLD {
            if self.renormalisations == 0 {
                log::warn!("trace drift {drift:.3e} at t = {t:.6e}; renormalising");
            }
            self.renormalisations += 1;
            self.worst_drift = self.worst_drift.max(drift);
            *rho /= tr;
        }
    }

    fn sample(&mut self, record: &mut EvolutionRecord, rho: &ComplexMatrix, t: f64) {
        if let (Some(layout), false) = (self.model.layout(), self.cutoff_warned) {
            if let Some(msg) = cutoff_warning(rho, layout) {
                log::warn!("{msg} at t = {t:.6e}");
                self.warnings.push(format!("{msg} at t = {t:.6e}"));
                self.cutoff_warned = true;
            }
        }
        record.times.push(t);
        record
            .states
            .push(DensityMatrix::from_matrix(rho.clone()).expect("integrator keeps states square and finite"));
    }

    fn finish(mut self, record: &mut EvolutionRecord) {
        if self.renormalisations > 0 {
            self.warnings.push(format!(
                "trace renormalised {} times (largest drift {:.3e})",
                self.renormalisations, self.worst_drift
            ));
        }
        record.warnings = self.warnings;
    }
}

/// Integrates the master equation from `rho0` according to `cfg`.
pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix, cfg: &IntegratorConfig) -> Result<EvolutionRecord> {
    cfg.validate()?;
    if rho0.dim() != model.dim() {
        return Err(Error::Shape(format!(
            "initial state has dimension {}, model dimension is {}",
            rho0.dim(),
            model.dim()
        )));
    }
    let diag = rho0.validate();
    if !diag.passes(1e-6) {
        return Err(Error::InvalidState(format!("initial state fails validation: {diag:?}")));
    }
    let gen = Generator::new(model);
    match cfg.method {
        Method::Rk4 { dt } => evolve_rk4(model, &gen, rho0.matrix(), dt, cfg),
        Method::Rk45 { tolerance } => evolve_rk45(model, &gen, rho0.matrix(), tolerance, cfg),
    }
}

fn rk4_step(gen: &Generator, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let half = complex(0.5 * h);
    let k1 = gen.apply(rho);
    let k2 = gen.apply(&(rho + &k1 * half));
    let k3 = gen.apply(&(rho + &k2 * half));
    let k4 = gen.apply(&(rho + &k3 * complex(h)));
    rho + (k1 + (k2 + k3) * complex(2.0) + k4) * complex(h / 6.0)
}

fn evolve_rk4(
    model: &LindbladModel,
    gen: &Generator,
    rho0: &ComplexMatrix,
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<EvolutionRecord> {
    let n_steps = ((cfg.t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut record = EvolutionRecord::default();
    let mut tracker = Tracker::new(model);
    let mut rho = rho0.clone();
    tracker.sample(&mut record, &rho, 0.0);
    for step in 1..=n_steps {
        let t_prev = (step - 1) as f64 * dt;
        let t = if step == n_steps { cfg.t_final } else { step as f64 * dt };
        rho = rk4_step(gen, &rho, t - t_prev);
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical {
                step,
                reason: format!("non-finite state at t = {t:e}"),
            });
        }
        tracker.renormalise(&mut rho, t);
        if step % cfg.sample_every == 0 || step == n_steps {
            tracker.sample(&mut record, &rho, t);
        }
    }
    record.accepted_steps = n_steps;
    tracker.finish(&mut record);
    Ok(record)
}

// Dormand–Prince 5(4) tableau
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step(gen: &Generator, rho: &ComplexMatrix, h: f64) -> (ComplexMatrix, ComplexMatrix) {
    let mut k: Vec<ComplexMatrix> = Vec::with_capacity(7);
    for stage in 0..7 {
        debug_assert!(DP_C[stage] <= 1.0);
        let mut y = rho.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = DP_A[stage][j];
            if a != 0.0 {
                y += kj * complex(h * a);
            }
        }
        k.push(gen.apply(&y));
    }
    let mut high = rho.clone();
    let mut err = ComplexMatrix::zeros(rho.nrows(), rho.ncols());
    for (j, kj) in k.iter().enumerate() {
        if DP_B[j] != 0.0 {
            high += kj * complex(h * DP_B[j]);
        }
        let e = DP_B[j] - DP_B_LOW[j];
        if e != 0.0 {
            err += kj * complex(h * e);
        }
    }
    (high, err)
}

fn evolve_rk45(
    model: &LindbladModel,
    gen: &Generator,
    rho0: &ComplexMatrix,
    tol: f64,
    cfg: &IntegratorConfig,
) -> Result<EvolutionRecord> {
    let mut record = EvolutionRecord::default();
    let mut tracker = Tracker::new(model);
    let mut rho = rho0.clone();
    tracker.sample(&mut record, &rho, 0.0);

    let interval = cfg.t_final / cfg.sample_every as f64;
    let scale = model.frequency_scale().max(1e-300);
    let mut h = (0.01 / scale).min(interval);
    let mut t = 0.0;
    for k in 1..=cfg.sample_every {
        let target = if k == cfg.sample_every {
            cfg.t_final
        } else {
            k as f64 * interval
        };
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Stiffness {
                    t,
                    reason: format!("step size {step:e} underflowed"),
                });
            }
            let (candidate, err) = dp_step(gen, &rho, step);
            let mut err_norm: f64 = 0.0;
            for (e, (y0, y1)) in err.iter().zip(rho.iter().zip(candidate.iter())) {
                let sc = tol + tol * y0.norm().max(y1.norm());
                err_norm = err_norm.max(e.norm() / sc);
            }
            if !err_norm.is_finite() {
                return Err(Error::Stiffness {
                    t,
                    reason: "non-finite error estimate".into(),
                });
            }
            let factor = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err_norm <= 1.0 {
                t = if last { target } else { t + step };
                rho = candidate;
                tracker.renormalise(&mut rho, t);
                record.accepted_steps += 1;
                if !last {
                    h = step * factor;
                }
            } else {
                record.rejected_steps += 1;
                h = step * factor.min(1.0);
            }
        }
        tracker.sample(&mut record, &rho, t);
    }
    tracker.finish(&mut record);
    Ok(record)
}

/// Exact pure-dephasing solution ρ_nm(t) = e^{−κ(n−m)²t/2} ρ_nm(0) in the number basis.
pub fn phase_damping_oracle(rho0: &ComplexMatrix, kappa: f64, t: f64) -> ComplexMatrix {
    phase_damping_solution(rho0, 0.0, kappa, t)
}

/// Dephasing solution including the free rotation of H = ω a†a:
/// ρ_nm(t) = e^{−iω(n−m)t − κ(n−m)²t/2} ρ_nm(0).
pub fn phase_damping_solution(rho0: &ComplexMatrix, omega: f64, kappa: f64, t: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rho0.nrows(), rho0.ncols(), |n, m| {
        let d = n as f64 - m as f64;
        rho0[(n, m)] * Complex64::new(-kappa * d * d * t / 2.0, -omega * d * t).exp()
    })
}

/// Eigen-decomposition of a Hermitian Hamiltonian, energies ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, in the order of `energies`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn of(h: &ComplexMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::Shape("Hamiltonian must be square".into()));
        }
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..h.nrows()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = ComplexMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { energies, vectors })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }
}

/// Secular evolution ρ_ij(t) = e^{−i(E_i − E_j)t − Γ_ij t} ρ_ij(0) in the
/// eigenbasis of H, returned in the original basis.
pub fn secular_evolve(eig: &Eigensystem, gammas: &DMatrix<f64>, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let d = eig.dim();
    if gammas.shape() != (d, d) || rho0.shape() != (d, d) {
        return Err(Error::Shape(format!(
            "secular evolution needs {d}x{d} damping and state matrices"
        )));
    }
    for i in 0..d {
        for j in 0..d {
            let g = gammas[(i, j)];
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::Model(format!("damping Γ[{i},{j}] = {g} must be >= 0")));
            }
            if (g - gammas[(j, i)]).abs() > 1e-12 * g.abs().max(1.0) {
                return Err(Error::Model(format!("damping matrix not symmetric at ({i},{j})")));
            }
        }
    }
    let v = &eig.vectors;
    let in_eigenbasis = v.adjoint() * rho0 * v;
    let evolved = ComplexMatrix::from_fn(d, d, |i, j| {
        let phase = -(eig.energies[i] - eig.energies[j]) * t;
        in_eigenbasis[(i, j)] * Complex64::new(-gammas[(i, j)] * t, phase).exp()
    });
    Ok(v * evolved * v.adjoint())
}
