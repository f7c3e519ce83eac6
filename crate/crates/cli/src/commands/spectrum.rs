use qcavity::spectra::{
    evaluate_spectrum, power_law_exponent, split_weights, Peak, PeakPrediction, ProbeGrid, SpectrumParams,
    SpectrumResult,
};
use qcavity::units::{Dimension, Quantity};
use serde::{Deserialize, Serialize};

use crate::config::{freq, si, GridConfig};
use crate::error::{CliError, CliResult};
use crate::output::{line_plot_svg, RunContext, Table};
use crate::Task;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub omega0: Quantity,
    pub omega: Quantity,
    pub lambda: Quantity,
    pub n_emitters: usize,
    /// Shorthand for equal widths; replaced by `gamma_plus`/`gamma_minus` on resolve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_plus: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_minus: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Quantity>,
    /// Probe grid; defaults to one covering both peaks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Emitter numbers for the splitting-versus-N check, each on its own grid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scaling_n: Vec<usize>,
}

impl SpectrumConfig {
    pub fn params(&self) -> CliResult<SpectrumParams> {
        let width = |q: &Option<Quantity>, key: &str| -> CliResult<f64> {
            q.as_ref()
                .ok_or_else(|| CliError::config(format!("{key} is required (or give gamma)")))
                .and_then(|q| freq(q, key))
        };
        let p = SpectrumParams {
            omega0: freq(&self.omega0, "omega0")?,
            omega: freq(&self.omega, "omega")?,
            lambda: freq(&self.lambda, "lambda")?,
            n_emitters: self.n_emitters,
            gamma_plus: width(&self.gamma_plus, "gamma_plus")?,
            gamma_minus: width(&self.gamma_minus, "gamma_minus")?,
            theta: self
                .theta
                .as_ref()
                .map(|t| si(t, Dimension::Angle, "theta"))
                .transpose()?,
        };
        p.validate()?;
        Ok(p)
    }

    fn probe_grid(&self) -> CliResult<ProbeGrid> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::config("grid is not resolved"))?;
        Ok(ProbeGrid::new(
            freq(&g.start, "grid.start")?,
            freq(&g.stop, "grid.stop")?,
            g.samples,
        )?)
    }
}

/// Distance between the two tallest detected peaks.
pub fn measured_splitting(peaks: &[Peak]) -> Option<f64> {
    let mut sorted: Vec<&Peak> = peaks.iter().collect();
    sorted.sort_by(|a, b| b.height.total_cmp(&a.height));
    match sorted.as_slice() {
        [a, b, ..] => Some((a.position - b.position).abs()),
        _ => None,
    }
}

#[derive(Debug, Serialize)]
struct ScalingRow {
    n_emitters: usize,
    measured_splitting: Option<f64>,
    predicted_splitting: f64,
    grid_step: f64,
}

#[derive(Debug, Serialize)]
struct Scaling {
    rows: Vec<ScalingRow>,
    fitted_exponent: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PeaksReport<'a> {
    detected: &'a [Peak],
    predicted: &'a PeakPrediction,
    measured_splitting: Option<f64>,
    unresolved: bool,
    grid_step: f64,
    integrated_weight_lower: f64,
    integrated_weight_upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling: Option<Scaling>,
}

fn scaling(base: &SpectrumParams, ns: &[usize]) -> CliResult<Option<Scaling>> {
    if ns.is_empty() {
        return Ok(None);
    }
    let mut rows = Vec::new();
    for &n in ns {
        let p = SpectrumParams { n_emitters: n, ..*base };
        let grid = ProbeGrid::auto(&p);
        let r: SpectrumResult = evaluate_spectrum(&p, &grid)?;
        rows.push(ScalingRow {
            n_emitters: n,
            measured_splitting: measured_splitting(&r.peaks),
            predicted_splitting: r.predicted.splitting(),
            grid_step: grid.step(),
        });
    }
    let measured: Option<Vec<f64>> = rows.iter().map(|r| r.measured_splitting).collect();
    let fitted_exponent = match measured {
        Some(m) if ns.len() >= 2 => Some(power_law_exponent(ns, &m)),
        _ => None,
    };
    Ok(Some(Scaling { rows, fitted_exponent }))
}

impl Task for SpectrumConfig {
    const NAME: &'static str = "spectrum";

    fn resolve(mut self) -> CliResult<Self> {
        if let Some(g) = self.gamma.take() {
            if self.gamma_plus.is_some() || self.gamma_minus.is_some() {
                return Err(CliError::config(
                    "give either gamma or gamma_plus/gamma_minus, not both",
                ));
            }
            self.gamma_plus = Some(g.clone());
            self.gamma_minus = Some(g);
        }
        let p = self.params()?;
        if self.grid.is_none() {
            let g = ProbeGrid::auto(&p);
            self.grid = Some(GridConfig::from_si(g.start, g.stop, g.samples, Dimension::Frequency));
        }
        self.probe_grid()?.check_covers(&p)?;
        Ok(self)
    }

    fn execute(&self, ctx: &RunContext) -> CliResult<()> {
        let p = self.params()?;
        let grid = self.probe_grid()?;
        let result = evaluate_spectrum(&p, &grid)?;
        if result.unresolved {
            log::warn!("doublet is not resolved: only {} peak(s) visible", result.peaks.len());
        }

        let mut table = Table::new(["omega", "im_chi"]);
        for (&w, &v) in result.omegas.iter().zip(&result.imchi) {
            table.push(vec![w.into(), v.into()]);
        }
        ctx.write_table("spectrum", &table)?;

        let (lower, upper) = split_weights(&result);
        let report = PeaksReport {
            detected: &result.peaks,
            predicted: &result.predicted,
            measured_splitting: measured_splitting(&result.peaks),
            unresolved: result.unresolved,
            grid_step: grid.step(),
            integrated_weight_lower: lower,
            integrated_weight_upper: upper,
            scaling: scaling(&p, &self.scaling_n)?,
        };
        ctx.write_json("peaks.json", &report)?;
        ctx.write_text(
            "spectrum.svg",
            &line_plot_svg(&result.omegas, &result.imchi, "probe frequency (rad/s)", "Im chi"),
        )?;
        Ok(())
    }
}
