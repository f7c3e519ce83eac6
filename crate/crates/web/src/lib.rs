//! WebAssembly bindings for the browser demo.
//!
//! Each export has a plain Rust counterpart returning `qcavity::Result`, so
//! the logic is testable natively; the exports only map errors to `JsError`.

use qcavity::decoherence::{collapse_time, pointer_distance, CollapseTime};
use qcavity::holography::{
    far_field_intensity, fringe_contrast, measured_fringe_period, Detector, HoloScene, Scatterer,
};
use qcavity::mtparams::{feasibility_report, EstimateMode, MtParameterSet};
use qcavity::spectra::{evaluate_spectrum, ProbeGrid, SpectrumParams};
use qcavity::{Complex64, Error, Result};
use wasm_bindgen::prelude::*;

/// Absorption spectrum Im χ(Ω) with detected and predicted peaks.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct SpectrumView {
    omegas: Vec<f64>,
    imchi: Vec<f64>,
    peaks: Vec<f64>,
    predicted: Vec<f64>,
    unresolved: bool,
}

#[wasm_bindgen]
impl SpectrumView {
    #[wasm_bindgen(getter)]
    pub fn omegas(&self) -> Vec<f64> {
        self.omegas.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn imchi(&self) -> Vec<f64> {
        self.imchi.clone()
    }

    /// Detected peak positions, ascending.
    #[wasm_bindgen(getter)]
    pub fn peaks(&self) -> Vec<f64> {
        self.peaks.clone()
    }

    /// Predicted [lower, upper] line positions.
    #[wasm_bindgen(getter)]
    pub fn predicted(&self) -> Vec<f64> {
        self.predicted.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn unresolved(&self) -> bool {
        self.unresolved
    }
}

/// Spectrum on `samples` points spanning both lines; `samples = 0` picks
/// the automatic grid.
pub fn spectrum_view(
    omega0: f64,
    omega: f64,
    lambda: f64,
    n_emitters: usize,
    gamma: f64,
    samples: usize,
) -> Result<SpectrumView> {
    let p = SpectrumParams::new(omega0, omega, lambda, n_emitters, gamma);
    p.validate()?;
    let auto = ProbeGrid::auto(&p);
    let grid = if samples == 0 {
        auto
    } else {
        ProbeGrid::new(auto.start, auto.stop, samples)?
    };
    let res = evaluate_spectrum(&p, &grid)?;
    let mut peaks: Vec<f64> = res.peaks.iter().map(|pk| pk.position).collect();
    peaks.sort_by(f64::total_cmp);
    Ok(SpectrumView {
        omegas: res.omegas,
        imchi: res.imchi,
        peaks,
        predicted: vec![res.predicted.lower.position, res.predicted.upper.position],
        unresolved: res.unresolved,
    })
}

/// Far-field intensity over the detector, row-major.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct HologramView {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    contrast: f64,
    period: Option<f64>,
}

#[wasm_bindgen]
impl HologramView {
    #[wasm_bindgen(getter)]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[wasm_bindgen(getter)]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn contrast(&self) -> f64 {
        self.contrast
    }

    /// Fringe period along the central row; NaN when no fringes are found.
    #[wasm_bindgen(getter)]
    pub fn period(&self) -> f64 {
        self.period.unwrap_or(f64::NAN)
    }
}

/// Hologram of a source at the origin and scatterers given as flat
/// `[x, y, z, re f, im f]` records.
pub fn hologram_view(
    wavenumber: f64,
    scatterers: &[f64],
    distance: f64,
    extent: f64,
    nx: usize,
    ny: usize,
) -> Result<HologramView> {
    if !scatterers.len().is_multiple_of(5) {
        return Err(Error::Config("scatterers must be [x, y, z, re, im] records".into()));
    }
    let scene = HoloScene {
        wavenumber,
        source: [0.0; 3],
        scatterers: scatterers
            .chunks_exact(5)
            .map(|r| Scatterer {
                position: [r[0], r[1], r[2]],
                amplitude: Complex64::new(r[3], r[4]),
            })
            .collect(),
        detector: Detector {
            distance,
            extent,
            nx,
            ny,
        },
    };
    scene.validate()?;
    let grid = far_field_intensity(&scene)?;
    Ok(HologramView {
        nx: grid.nx(),
        ny: grid.ny(),
        contrast: fringe_contrast(&grid.values),
        period: measured_fringe_period(&grid.xs, grid.row(grid.ny() / 2)),
        values: grid.values,
    })
}

/// Anchored collapse window and verdict for a chosen damping time.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct CollapseView {
    lower: f64,
    upper: f64,
    n_sys: f64,
    verdict: bool,
    margin: f64,
    feasible_n_max: u32,
    cat_times: Vec<f64>,
}

#[wasm_bindgen]
impl CollapseView {
    #[wasm_bindgen(getter)]
    pub fn lower(&self) -> f64 {
        self.lower
    }

    #[wasm_bindgen(getter)]
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Number of dimers N in the chain.
    #[wasm_bindgen(getter)]
    pub fn n_sys(&self) -> f64 {
        self.n_sys
    }

    #[wasm_bindgen(getter)]
    pub fn verdict(&self) -> bool {
        self.verdict
    }

    #[wasm_bindgen(getter)]
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Largest feasible quanta number; 0 when none is.
    #[wasm_bindgen(getter)]
    pub fn feasible_n_max(&self) -> u32 {
        self.feasible_n_max
    }

    /// Collapse time 2T_r/D² of a coherent cat with `cat_quanta` quanta per
    /// branch, at branch phases 0..π/2 in `CAT_PHASES` steps; infinite at φ = 0.
    #[wasm_bindgen(getter)]
    pub fn cat_times(&self) -> Vec<f64> {
        self.cat_times.clone()
    }
}

/// Number of branch phases sampled for `CollapseView::cat_times`.
pub const CAT_PHASES: usize = 91;

pub fn collapse_view(t_r: f64, n_min: f64, n_max: f64, t_kink: f64, cat_quanta: f64) -> Result<CollapseView> {
    let mut set = MtParameterSet::published_defaults();
    set.set("t_r", t_r)?;
    set.set("n_quanta_min", n_min)?;
    set.set("n_quanta_max", n_max)?;
    set.set("t_kink", t_kink)?;
    let report = feasibility_report(&set, EstimateMode::Anchored)?;
    let cat_times = (0..CAT_PHASES)
        .map(|i| {
            let phi = std::f64::consts::FRAC_PI_2 * i as f64 / (CAT_PHASES - 1) as f64;
            match collapse_time(t_r, pointer_distance(cat_quanta, phi))? {
                CollapseTime::Finite(t) => Ok(t),
                CollapseTime::Infinite => Ok(f64::INFINITY),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CollapseView {
        lower: report.collapse_window.lower,
        upper: report.collapse_window.upper,
        n_sys: report.value("n_dimers").unwrap_or(f64::NAN),
        verdict: report.verdict,
        margin: report.margin,
        feasible_n_max: report.feasible_n_max.unwrap_or(0),
        cat_times,
    })
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn spectrum(
    omega0: f64,
    omega: f64,
    lambda: f64,
    n_emitters: usize,
    gamma: f64,
    samples: usize,
) -> std::result::Result<SpectrumView, JsError> {
    spectrum_view(omega0, omega, lambda, n_emitters, gamma, samples).map_err(js)
}

#[wasm_bindgen]
pub fn hologram(
    wavenumber: f64,
    scatterers: &[f64],
    distance: f64,
    extent: f64,
    nx: usize,
    ny: usize,
) -> std::result::Result<HologramView, JsError> {
    hologram_view(wavenumber, scatterers, distance, extent, nx, ny).map_err(js)
}

#[wasm_bindgen]
pub fn collapse_window(
    t_r: f64,
    n_min: f64,
    n_max: f64,
    t_kink: f64,
    cat_quanta: f64,
) -> std::result::Result<CollapseView, JsError> {
    collapse_view(t_r, n_min, n_max, t_kink, cat_quanta).map_err(js)
}
