use qcavity::holography::{
    far_field_intensity, fringe_contrast, measured_fringe_period, two_source_fringe_period, wavelength_check, Detector,
    HoloScene, Scatterer, Vec3, WavelengthCheck,
};
use qcavity::units::{Dimension, Quantity};
use serde::{Deserialize, Serialize};

use crate::config::{complex_from_pair, freq, si};
use crate::error::CliResult;
use crate::output::{raster_svg, RunContext, Table};
use crate::Task;

const SVG_MAX_CELLS: usize = 160;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererConfig {
    pub position: [Quantity; 3],
    /// Complex amplitude as [re, im].
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub distance: Quantity,
    pub extent: Quantity,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavelengthConfig {
    pub phase_velocity: Quantity,
    pub omega: Quantity,
    pub spacing: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HologramConfig {
    pub wavenumber: Quantity,
    pub source: [Quantity; 3],
    pub scatterers: Vec<ScattererConfig>,
    pub detector: DetectorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength_check: Option<WavelengthConfig>,
}

fn vec3(q: &[Quantity; 3], key: &str) -> CliResult<Vec3> {
    Ok([
        si(&q[0], Dimension::Length, &format!("{key}[0]"))?,
        si(&q[1], Dimension::Length, &format!("{key}[1]"))?,
        si(&q[2], Dimension::Length, &format!("{key}[2]"))?,
    ])
}

impl HologramConfig {
    pub fn scene(&self) -> CliResult<HoloScene> {
        let scatterers = self
            .scatterers
            .iter()
            .enumerate()
            .map(|(j, s)| {
                Ok(Scatterer {
                    position: vec3(&s.position, &format!("scatterers[{j}].position"))?,
                    amplitude: complex_from_pair(s.amplitude),
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        let scene = HoloScene {
            wavenumber: si(&self.wavenumber, Dimension::Wavenumber, "wavenumber")?,
            source: vec3(&self.source, "source")?,
            scatterers,
            detector: Detector {
                distance: si(&self.detector.distance, Dimension::Length, "detector.distance")?,
                extent: si(&self.detector.extent, Dimension::Length, "detector.extent")?,
                nx: self.detector.nx,
                ny: self.detector.ny,
            },
        };
        scene.validate()?;
        Ok(scene)
    }

    fn wavelength(&self) -> CliResult<Option<WavelengthCheck>> {
        self.wavelength_check
            .as_ref()
            .map(|w| {
                Ok(wavelength_check(
                    si(&w.phase_velocity, Dimension::Speed, "wavelength_check.phase_velocity")?,
                    freq(&w.omega, "wavelength_check.omega")?,
                    si(&w.spacing, Dimension::Length, "wavelength_check.spacing")?,
                )?)
            })
            .transpose()
    }
}

#[derive(Debug, Serialize)]
struct FringeReport {
    transverse_separation: f64,
    predicted_period: f64,
    measured_period: Option<f64>,
}

#[derive(Debug, Serialize)]
struct HologramReport {
    contrast: f64,
    intensity_min: f64,
    intensity_max: f64,
    /// Present for a single scatterer displaced along x.
    #[serde(skip_serializing_if = "Option::is_none")]
    fringes: Option<FringeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wavelength_check: Option<WavelengthCheck>,
}

impl Task for HologramConfig {
    const NAME: &'static str = "hologram";

    fn resolve(self) -> CliResult<Self> {
        self.scene()?;
        self.wavelength()?;
        Ok(self)
    }

    fn execute(&self, ctx: &RunContext) -> CliResult<()> {
        let scene = self.scene()?;
        let grid = far_field_intensity(&scene)?;
        let mut table = Table::new(["x", "y", "intensity"]);
        for (iy, &y) in grid.ys.iter().enumerate() {
            for (ix, &x) in grid.xs.iter().enumerate() {
                table.push(vec![x.into(), y.into(), grid.at(ix, iy).into()]);
            }
        }
        ctx.write_table("intensity", &table)?;
        ctx.write_text(
            "hologram.svg",
            &raster_svg(&grid.values, grid.nx(), grid.ny(), SVG_MAX_CELLS),
        )?;

        let fringes = match scene.scatterers.as_slice() {
            [s] if (s.position[0] - scene.source[0]).abs() > 0.0 => {
                let dx = (s.position[0] - scene.source[0]).abs();
                let row = grid.row(grid.ny() / 2);
                Some(FringeReport {
                    transverse_separation: dx,
                    predicted_period: two_source_fringe_period(scene.wavenumber, dx, scene.detector.distance),
                    measured_period: measured_fringe_period(&grid.xs, row),
                })
            }
            _ => None,
        };
        let report = HologramReport {
            contrast: fringe_contrast(&grid.values),
            intensity_min: grid.values.iter().copied().fold(f64::INFINITY, f64::min),
            intensity_max: grid.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            fringes,
            wavelength_check: self.wavelength()?,
        };
        ctx.write_json("hologram.json", &report)?;
        Ok(())
    }
}
