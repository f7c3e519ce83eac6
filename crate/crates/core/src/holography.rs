//! Scalar far-field model of internal-source holography: a reference wave
//! from a point source interfering with single-scattered object waves.
//!
//! Intensities are angular (per solid angle), so the common 1/R² falloff of
//! the far field is dropped and a bare reference gives a flat hologram.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum ratio of detector distance to scene diameter.
pub const FAR_FIELD_RATIO: f64 = 50.0;

pub type Vec3 = [f64; 3];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn length(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position: Vec3,
    /// Complex scattering amplitude f, serialised as [re, im].
    pub amplitude: Complex64,
}

/// Square-grid detector in the plane z = distance, centred on the z axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub distance: f64,
    /// Side length of the detector square.
    pub extent: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Detector {
    pub fn coordinates(&self) -> (Vec<f64>, Vec<f64>) {
        let axis = |n: usize| -> Vec<f64> {
            if n == 1 {
                return vec![0.0];
            }
            let h = self.extent / (n - 1) as f64;
            (0..n).map(|i| -0.5 * self.extent + i as f64 * h).collect()
        };
        (axis(self.nx), axis(self.ny))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoloScene {
    pub wavenumber: f64,
    pub source: Vec3,
    pub scatterers: Vec<Scatterer>,
    pub detector: Detector,
}

impl HoloScene {
    /// Largest distance between any two of source and scatterers.
    pub fn diameter(&self) -> f64 {
        let mut points = vec![self.source];
        points.extend(self.scatterers.iter().map(|s| s.position));
        let mut d: f64 = 0.0;
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                d = d.max(length(sub(*a, *b)));
            }
        }
        d
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavenumber.is_finite() && self.wavenumber > 0.0) {
            return Err(Error::Config(format!(
                "wavenumber must be > 0, got {}",
                self.wavenumber
            )));
        }
        let det = &self.detector;
        if !(det.distance.is_finite() && det.distance > 0.0) {
            return Err(Error::Config(format!(
                "detector distance must be > 0, got {}",
                det.distance
            )));
        }
        if !(det.extent.is_finite() && det.extent >= 0.0) {
            return Err(Error::Config(format!(
                "detector extent must be >= 0, got {}",
                det.extent
            )));
        }
        if det.nx == 0 || det.ny == 0 {
            return Err(Error::Config("detector grid counts must be >= 1".into()));
        }
        let diameter = self.diameter();
        for (j, s) in self.scatterers.iter().enumerate() {
            let d = length(sub(s.position, self.source));
            if d == 0.0 || d <= 1e-12 * diameter {
                return Err(Error::Geometry(format!("scatterer {j} coincides with the source")));
            }
        }
        if diameter > 0.0 && det.distance < FAR_FIELD_RATIO * diameter {
            return Err(Error::Geometry(format!(
                "detector distance {:e} is below {FAR_FIELD_RATIO} x scene diameter {:e}",
                det.distance, diameter
            )));
        }
        Ok(())
    }
}

/// Unit direction from the origin towards a detector pixel.
pub fn direction(detector: &Detector, x: f64, y: f64) -> Vec3 {
    let v = [x, y, detector.distance];
    let n = length(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Field bracket 1 + Σ f_j (e^{ik d_j}/d_j) e^{ik k̂·(r_s − r_j)}, d_j = |r_j − r_s|,
/// with the common spherical factor e^{ikR}/R removed.
pub fn far_field_amplitude(scene: &HoloScene, k_hat: Vec3) -> Complex64 {
    let k = scene.wavenumber;
    let mut a = Complex64::new(1.0, 0.0);
    for s in &scene.scatterers {
        let d = length(sub(s.position, scene.source));
        let path = k * d + k * dot(k_hat, sub(scene.source, s.position));
        a += s.amplitude / d * Complex64::from_polar(1.0, path);
    }
    a
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensityGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major, one row per y.
    pub values: Vec<f64>,
}

impl IntensityGrid {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx() + ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        &self.values[iy * self.nx()..(iy + 1) * self.nx()]
    }
}

/// Complex field over the detector grid, row-major.
pub fn far_field_grid(scene: &HoloScene) -> Result<Vec<Complex64>> {
    scene.validate()?;
    let (xs, ys) = scene.detector.coordinates();
    Ok(ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
        .map(|(x, y)| far_field_amplitude(scene, direction(&scene.detector, x, y)))
        .collect())
}

/// I = |A|² over the detector grid.
pub fn far_field_intensity(scene: &HoloScene) -> Result<IntensityGrid> {
    let field = far_field_grid(scene)?;
    let (xs, ys) = scene.detector.coordinates();
    Ok(IntensityGrid {
        xs,
        ys,
        values: field.iter().map(|a| a.norm_sqr()).collect(),
    })
}

/// (I_max − I_min)/(I_max + I_min); 0 for an empty or all-zero grid.
pub fn fringe_contrast(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() || max + min <= 0.0 {
        return 0.0;
    }
    ((max - min) / (max + min)).clamp(0.0, 1.0)
}

/// Two-point interference period on the detector, Λ = 2πR/(kΔ).
pub fn two_source_fringe_period(wavenumber: f64, transverse_separation: f64, distance: f64) -> f64 {
    2.0 * PI * distance / (wavenumber * transverse_separation)
}

/// Mean spacing of parabola-refined maxima along a sampled line; `None`
/// with fewer than two maxima.
pub fn measured_fringe_period(coords: &[f64], values: &[f64]) -> Option<f64> {
    let n = coords.len().min(values.len());
    let mut maxima = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let offset = if denom < 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            maxima.push(coords[i] + offset * (coords[i + 1] - coords[i]));
        }
    }
    (maxima.len() >= 2).then(|| (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavelengthCheck {
    pub wavelength: f64,
    pub spacing: f64,
    /// wavelength / spacing.
    pub ratio: f64,
    pub resolves: bool,
}

/// λ = 2πv/ω compared with a structural spacing.
pub fn wavelength_check(phase_velocity: f64, omega: f64, spacing: f64) -> Result<WavelengthCheck> {
    for (name, v) in [
        ("phase velocity", phase_velocity),
        ("omega", omega),
        ("spacing", spacing),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!("{name} must be > 0, got {v}")));
        }
    }
    let wavelength = 2.0 * PI * phase_velocity / omega;
    Ok(WavelengthCheck {
        wavelength,
        spacing,
        ratio: wavelength / spacing,
        resolves: wavelength < spacing,
    })
}
