use num_complex::Complex64;
use qcavity::decoherence::{
    coherence_decay_fit, collapse_time, collapse_window_over_quanta, pointer_distance, CollapseTime, CollapseWindow,
};
use qcavity::lindblad::{evolve, IntegratorConfig};
use qcavity::models::{phase_damping_model, PhaseDampingParams};
use qcavity::qstate::{ComplexMatrix, DensityMatrix, StateVector};
use qcavity::units::{Dimension, Quantity};
use serde::{Deserialize, Serialize};

use crate::config::{freq, si, GridConfig};
use crate::error::{CliError, CliResult};
use crate::output::{RunContext, Table};
use crate::Task;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantaWindow {
    pub n_sys: f64,
    pub n_min: f64,
    pub n_max: f64,
}

/// Numerical check of the dephasing law on number-state cats |n⟩ + |m⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingCheck {
    pub kappa: Quantity,
    /// Level pairs (n, m); the pointer distance is |n − m|.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatConfig {
    pub t_r: Quantity,
    /// Mean quanta in each coherent branch.
    pub n_quanta: f64,
    /// Phase grid for the branch separation.
    pub phi: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<QuantaWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing_check: Option<DephasingCheck>,
}

/// Fitted and predicted decay of the |n⟩⟨m| coherence under phase damping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DephasingFit {
    pub n: usize,
    pub m: usize,
    pub distance: f64,
    pub fitted_rate: f64,
    pub predicted_rate: f64,
    pub r_squared: f64,
}

/// Evolves |n⟩ + |m⟩ for two predicted e-folding times and fits the decay.
pub fn fit_number_cat(n: usize, m: usize, kappa: f64) -> CliResult<DephasingFit> {
    if n == m {
        return Err(CliError::config(format!("pair ({n}, {m}) has zero distance")));
    }
    // two spare levels keep the cutoff monitor quiet; populations do not move
    let n_max = n.max(m) + 2;
    let model = phase_damping_model(
        &PhaseDampingParams {
            omega: 1.0,
            kappa_phi: kappa,
        },
        n_max,
    )?;
    let psi = StateVector::equal_superposition(n_max + 1, &[n, m])?;
    let d2 = (n as f64 - m as f64).powi(2);
    let predicted_rate = kappa * d2 / 2.0;
    let t_final = 2.0 / predicted_rate;
    let dt = (t_final / 400.0).min(IntegratorConfig::default_dt(&model));
    let steps = (t_final / dt).ceil() as usize;
    let rec = evolve(
        &model,
        &DensityMatrix::from_pure(&psi),
        &IntegratorConfig::rk4(t_final / steps as f64, t_final, steps.div_ceil(40)),
    )?;
    let mut pa = ComplexMatrix::zeros(n_max + 1, n_max + 1);
    let mut pb = pa.clone();
    pa[(n, n)] = Complex64::new(1.0, 0.0);
    pb[(m, m)] = Complex64::new(1.0, 0.0);
    let fit = coherence_decay_fit(&rec, (&pa, &pb))?;
    Ok(DephasingFit {
        n,
        m,
        distance: d2.sqrt(),
        fitted_rate: fit.rate,
        predicted_rate,
        r_squared: fit.r_squared,
    })
}

#[derive(Debug, Serialize)]
struct WindowReport {
    window: CollapseWindow,
    t_r: f64,
    n_sys: f64,
    n_min: f64,
    n_max: f64,
}

impl Task for CatConfig {
    const NAME: &'static str = "cat";

    fn resolve(self) -> CliResult<Self> {
        let t_r = si(&self.t_r, Dimension::Time, "t_r")?;
        if t_r.is_nan() || t_r <= 0.0 {
            return Err(CliError::config("t_r must be > 0"));
        }
        if !(self.n_quanta.is_finite() && self.n_quanta >= 0.0) {
            return Err(CliError::config("n_quanta must be >= 0"));
        }
        self.phi.points(Dimension::Angle, "phi")?;
        if let Some(w) = &self.window {
            collapse_window_over_quanta(t_r, w.n_sys, w.n_min, w.n_max)?;
        }
        if let Some(c) = &self.dephasing_check {
            freq(&c.kappa, "dephasing_check.kappa")?;
            if let Some((n, m)) = c.pairs.iter().find(|(n, m)| n == m) {
                return Err(CliError::config(format!(
                    "dephasing_check pair ({n}, {m}) has zero distance"
                )));
            }
        }
        Ok(self)
    }

    fn execute(&self, ctx: &RunContext) -> CliResult<()> {
        let t_r = si(&self.t_r, Dimension::Time, "t_r")?;
        let mut table = Table::new(["phi", "distance", "distance_sq", "t_collapse", "t_collapse_over_t_r"]);
        for phi in self.phi.points(Dimension::Angle, "phi")? {
            let d = pointer_distance(self.n_quanta, phi);
            let t = match collapse_time(t_r, d)? {
                CollapseTime::Finite(t) => t,
                CollapseTime::Infinite => f64::INFINITY,
            };
            table.push(vec![phi.into(), d.into(), (d * d).into(), t.into(), (t / t_r).into()]);
        }
        ctx.write_table("collapse", &table)?;

        if let Some(w) = &self.window {
            let report = WindowReport {
                window: collapse_window_over_quanta(t_r, w.n_sys, w.n_min, w.n_max)?,
                t_r,
                n_sys: w.n_sys,
                n_min: w.n_min,
                n_max: w.n_max,
            };
            ctx.write_json("collapse_window.json", &report)?;
        }

        if let Some(c) = &self.dephasing_check {
            let kappa = freq(&c.kappa, "dephasing_check.kappa")?;
            let mut fits = Table::new(["n", "m", "distance_sq", "fitted_rate", "predicted_rate", "r_squared"]);
            for &(n, m) in &c.pairs {
                let f = fit_number_cat(n, m, kappa)?;
                fits.push(vec![
                    n.into(),
                    m.into(),
                    (f.distance * f.distance).into(),
                    f.fitted_rate.into(),
                    f.predicted_rate.into(),
                    f.r_squared.into(),
                ]);
            }
            ctx.write_table("collapse_fit", &fits)?;
        }
        Ok(())
    }
}
