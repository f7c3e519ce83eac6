//! Vacuum Rabi absorption spectra in closed form and numeric peak extraction.
//!
//! Im χ is reported with unit proportionality constant, so heights are only
//! meaningful as ratios.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per linewidth required of a probe grid.
pub const SAMPLES_PER_LINEWIDTH: f64 = 20.0;
/// λ²N/Δ² below which the dispersive approximation is considered valid.
pub const DISPERSIVE_VALIDITY: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub omega0: f64,
    pub omega: f64,
    pub lambda: f64,
    pub n_emitters: usize,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Dressed-state mixing angle; `None` uses tan 2θ = 2λ√N/Δ.
    #[serde(default)]
    pub theta: Option<f64>,
}

impl SpectrumParams {
    /// Parameters with equal widths Γ₊ = Γ₋ = `gamma` and the default mixing angle.
    pub fn new(omega0: f64, omega: f64, lambda: f64, n_emitters: usize, gamma: f64) -> Self {
        Self {
            omega0,
            omega,
            lambda,
            n_emitters,
            gamma_plus: gamma,
            gamma_minus: gamma,
            theta: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega0", self.omega0), ("omega", self.omega), ("lambda", self.lambda)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if self.lambda < 0.0 {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.n_emitters == 0 {
            return Err(Error::Config("n_emitters must be >= 1".into()));
        }
        for (name, g) in [("gamma_plus", self.gamma_plus), ("gamma_minus", self.gamma_minus)] {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {g}")));
            }
        }
        if let Some(t) = self.theta {
            if !t.is_finite() {
                return Err(Error::Config("theta must be finite".into()));
            }
        }
        Ok(())
    }

    /// Δ = ω₀ − ω.
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }

    /// λ√N.
    pub fn collective_coupling(&self) -> f64 {
        self.lambda * (self.n_emitters as f64).sqrt()
    }

    /// ½√(Δ² + 4Nλ²).
    pub fn half_splitting(&self) -> f64 {
        let d = self.detuning();
        let g = self.collective_coupling();
        0.5 * (d * d + 4.0 * g * g).sqrt()
    }

    pub fn theta(&self) -> f64 {
        self.theta
            .unwrap_or_else(|| mixing_angle(self.lambda, self.n_emitters, self.detuning()))
    }

    pub fn max_width(&self) -> f64 {
        self.gamma_plus.max(self.gamma_minus)
    }

    pub fn min_width(&self) -> f64 {
        self.gamma_plus.min(self.gamma_minus)
    }
}

/// θ with tan 2θ = 2λ√N/Δ, in [0, π/2]; π/4 on resonance.
pub fn mixing_angle(lambda: f64, n_emitters: usize, detuning: f64) -> f64 {
    0.5 * (2.0 * lambda * (n_emitters as f64).sqrt()).atan2(detuning)
}

/// 2λ√N.
pub fn rabi_frequency(lambda: f64, n_emitters: usize) -> Result<f64> {
    if n_emitters == 0 {
        return Err(Error::Config("rabi frequency needs N >= 1".into()));
    }
    Ok(2.0 * lambda * (n_emitters as f64).sqrt())
}

/// Im χ(Ω) = cos²θ (Γ₋/π)/(Γ₋² + (Ω − Ω₊)²) + sin²θ (Γ₊/π)/(Γ₊² + (Ω − Ω₋)²),
/// with Ω± = ω₀ − Δ/2 ± ½√(Δ² + 4Nλ²).
pub fn susceptibility_im(p: &SpectrumParams, big_omega: f64) -> f64 {
    let center = p.omega0 - 0.5 * p.detuning();
    let half = p.half_splitting();
    let theta = p.theta();
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let upper = big_omega - (center + half);
    let lower = big_omega - (center - half);
    c2 * (p.gamma_minus / PI) / (p.gamma_minus.powi(2) + upper * upper)
        + s2 * (p.gamma_plus / PI) / (p.gamma_plus.powi(2) + lower * lower)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedPeak {
    pub position: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersiveLimit {
    /// Nλ²/|Δ|.
    pub shift: f64,
    /// max(ω₀, ω) + shift.
    pub upper: f64,
    /// min(ω₀, ω) − shift.
    pub lower: f64,
    /// λ²N/Δ² < 0.01.
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakPrediction {
    pub upper: PredictedPeak,
    pub lower: PredictedPeak,
    /// Absent on exact resonance.
    pub dispersive: Option<DispersiveLimit>,
}

impl PeakPrediction {
    pub fn splitting(&self) -> f64 {
        self.upper.position - self.lower.position
    }
}

pub fn predicted_peaks(p: &SpectrumParams) -> PeakPrediction {
    let center = p.omega0 - 0.5 * p.detuning();
    let half = p.half_splitting();
    let theta = p.theta();
    let d = p.detuning();
    let dispersive = (d != 0.0).then(|| {
        let g2 = p.collective_coupling().powi(2);
        let shift = g2 / d.abs();
        DispersiveLimit {
            shift,
            upper: p.omega0.max(p.omega) + shift,
            lower: p.omega0.min(p.omega) - shift,
            valid: g2 / (d * d) < DISPERSIVE_VALIDITY,
        }
    });
    PeakPrediction {
        upper: PredictedPeak {
            position: center + half,
            weight: theta.cos().powi(2),
        },
        lower: PredictedPeak {
            position: center - half,
            weight: theta.sin().powi(2),
        },
        dispersive,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    pub start: f64,
    pub stop: f64,
    pub samples: usize,
}

impl ProbeGrid {
    pub fn new(start: f64, stop: f64, samples: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && stop > start) {
            return Err(Error::Config(format!("probe range [{start}, {stop}] is empty")));
        }
        if samples < 3 {
            return Err(Error::Config("probe grid needs at least 3 samples".into()));
        }
        Ok(Self { start, stop, samples })
    }

    /// Grid spanning both predicted peaks with 10 linewidths of margin and
    /// 20 samples per narrowest linewidth.
    pub fn auto(p: &SpectrumParams) -> Self {
        let pred = predicted_peaks(p);
        let margin = 10.0 * p.max_width();
        let start = pred.lower.position - margin;
        let stop = pred.upper.position + margin;
        let step = p.min_width() / SAMPLES_PER_LINEWIDTH;
        let samples = ((stop - start) / step).ceil() as usize + 1;
        Self { start, stop, samples }
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.samples - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.samples).map(|i| self.start + i as f64 * h).collect()
    }

    /// Checks the grid covers both predicted peaks at the required density.
    pub fn check_covers(&self, p: &SpectrumParams) -> Result<()> {
        let pred = predicted_peaks(p);
        if pred.lower.position < self.start || pred.upper.position > self.stop {
            return Err(Error::Config(format!(
                "probe grid [{:e}, {:e}] misses predicted peaks at {:e} and {:e}",
                self.start, self.stop, pred.lower.position, pred.upper.position
            )));
        }
        if self.step() > p.min_width() / SAMPLES_PER_LINEWIDTH * (1.0 + 1e-9) {
            return Err(Error::Config(format!(
                "probe grid step {:e} exceeds linewidth/{SAMPLES_PER_LINEWIDTH} = {:e}",
                self.step(),
                p.min_width() / SAMPLES_PER_LINEWIDTH
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    /// Full width at half maximum; `None` if a half-maximum crossing lies off-grid.
    pub width: Option<f64>,
}

/// Local maxima refined by a three-point parabola, with FWHM from linear
/// interpolation of the half-maximum crossings.
pub fn find_peaks(omegas: &[f64], values: &[f64]) -> Vec<Peak> {
    let n = omegas.len().min(values.len());
    let mut peaks = Vec::new();
    if n < 3 {
        return peaks;
    }
    for i in 1..n - 1 {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if !(b > a && b >= c) {
            continue;
        }
        let h = omegas[i + 1] - omegas[i];
        let denom = a - 2.0 * b + c;
        let (offset, height) = if denom < 0.0 {
            let x = 0.5 * (a - c) / denom;
            (x, b - 0.25 * (a - c) * x)
        } else {
            (0.0, b)
        };
        let half = 0.5 * height;
        let left = (0..i).rev().find(|&j| values[j] < half).map(|j| {
            let (y0, y1) = (values[j], values[j + 1]);
            omegas[j] + (half - y0) / (y1 - y0) * (omegas[j + 1] - omegas[j])
        });
        let right = (i + 1..n).find(|&j| values[j] < half).map(|j| {
            let (y0, y1) = (values[j - 1], values[j]);
            omegas[j - 1] + (y0 - half) / (y0 - y1) * (omegas[j] - omegas[j - 1])
        });
        peaks.push(Peak {
            position: omegas[i] + offset * h,
            height,
            width: left.zip(right).map(|(l, r)| r - l),
        });
    }
    peaks
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub omegas: Vec<f64>,
    pub imchi: Vec<f64>,
    pub peaks: Vec<Peak>,
    pub predicted: PeakPrediction,
    /// Two distinct lines are predicted but only one peak is visible.
    pub unresolved: bool,
}

pub fn evaluate_spectrum(p: &SpectrumParams, grid: &ProbeGrid) -> Result<SpectrumResult> {
    p.validate()?;
    grid.check_covers(p)?;
    let omegas = grid.points();
    let imchi: Vec<f64> = omegas.iter().map(|&w| susceptibility_im(p, w)).collect();
    let peaks = find_peaks(&omegas, &imchi);
    let predicted = predicted_peaks(p);
    let distinct = predicted.splitting() > grid.step() && predicted.lower.weight > 0.0 && predicted.upper.weight > 0.0;
    let unresolved = distinct && peaks.len() < 2;
    Ok(SpectrumResult {
        omegas,
        imchi,
        peaks,
        predicted,
        unresolved,
    })
}

/// Area under one Lorentzian term over the whole axis equals its weight; this
/// integrates Im χ numerically on either side of the midpoint between the peaks.
pub fn split_weights(result: &SpectrumResult) -> (f64, f64) {
    let mid = 0.5 * (result.predicted.lower.position + result.predicted.upper.position);
    let (mut low, mut high) = (0.0, 0.0);
    for w in result.omegas.windows(2).zip(result.imchi.windows(2)) {
        let (x, y) = w;
        let area = 0.5 * (y[0] + y[1]) * (x[1] - x[0]);
        if 0.5 * (x[0] + x[1]) < mid {
            low += area;
        } else {
            high += area;
        }
    }
    (low, high)
}

/// Least-squares slope of ln(splitting) against ln N, i.e. the fitted power law exponent.
pub fn power_law_exponent(n_values: &[usize], splittings: &[f64]) -> f64 {
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = splittings.iter().map(|s| s.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn resonant(lambda: f64, n: usize, gamma: f64) -> SpectrumParams {
        SpectrumParams::new(1.0, 1.0, lambda, n, gamma)
    }

    #[test]
    fn resonant_doublet_is_symmetric() {
        let p = resonant(0.05, 4, 0.01);
        assert!((p.theta() - FRAC_PI_4).abs() < 1e-15);
        let g = 0.1;
        let a = susceptibility_im(&p, 1.0 + g);
        let b = susceptibility_im(&p, 1.0 - g);
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn uncoupled_line_is_a_single_lorentzian() {
        let p = SpectrumParams {
            theta: Some(0.0),
            ..SpectrumParams::new(1.0, 1.0, 0.0, 1, 0.02)
        };
        assert!((susceptibility_im(&p, 1.0) - 1.0 / (PI * 0.02)).abs() < 1e-12);
        let r = evaluate_spectrum(&p, &ProbeGrid::auto(&p)).unwrap();
        assert_eq!(r.peaks.len(), 1);
        assert!(!r.unresolved);
    }

    #[test]
    fn resonant_peaks_are_found_at_predicted_positions() {
        let p = resonant(0.05, 4, 0.01);
        let grid = ProbeGrid::auto(&p);
        let r = evaluate_spectrum(&p, &grid).unwrap();
        assert_eq!(r.peaks.len(), 2);
        assert!((r.peaks[0].position - 0.9).abs() < grid.step());
        assert!((r.peaks[1].position - 1.1).abs() < grid.step());
        assert!((r.peaks[0].height / r.peaks[1].height - 1.0).abs() < 0.01);
        // each line has FWHM 2Γ
        let w = r.peaks[0].width.unwrap();
        assert!((w - 0.02).abs() < 0.02 * 0.02, "{w}");
    }

    #[test]
    fn predicted_examples() {
        let pred = predicted_peaks(&resonant(0.1, 1, 0.01));
        assert!((pred.upper.position - 1.1).abs() < 1e-15);
        assert!((pred.lower.position - 0.9).abs() < 1e-15);
        assert!((pred.upper.weight - 0.5).abs() < 1e-15);

        let detuned = SpectrumParams::new(1.0, 0.7, 0.0, 3, 0.01);
        let pred = predicted_peaks(&detuned);
        assert!((pred.upper.position - 1.0).abs() < 1e-15);
        assert!((pred.lower.position - 0.7).abs() < 1e-15);
    }

    #[test]
    fn dispersive_limit_matches_exact_shift() {
        let (lambda, n) = (0.01, 4);
        let delta = 100.0 * lambda * 2.0;
        let p = SpectrumParams::new(1.0 + delta, 1.0, lambda, n, 1e-4);
        let pred = predicted_peaks(&p);
        let disp = pred.dispersive.unwrap();
        assert!(disp.valid);
        let exact_shift = pred.upper.position - p.omega0;
        assert!((exact_shift - disp.shift).abs() < 0.01 * disp.shift);
        let exact_low = p.omega - pred.lower.position;
        assert!((exact_low - disp.shift).abs() < 0.01 * disp.shift);
        // the line near the emitter dominates
        assert!(pred.upper.weight > 0.99);
    }

    #[test]
    fn rabi_frequency_examples() {
        assert_eq!(rabi_frequency(0.3, 1).unwrap(), 0.6);
        assert!((rabi_frequency(0.05, 100).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(rabi_frequency(0.2, 4).unwrap() / rabi_frequency(0.2, 1).unwrap(), 2.0);
        assert!(rabi_frequency(0.2, 0).is_err());
    }

    #[test]
    fn lorentzian_peak_located_to_half_step() {
        let omegas: Vec<f64> = (0..2001).map(|i| 0.3 + i as f64 * 0.001).collect();
        let values: Vec<f64> = omegas
            .iter()
            .map(|w| 0.01 / PI / (0.01f64.powi(2) + (w - 1.0f64).powi(2)))
            .collect();
        let peaks = find_peaks(&omegas, &values);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].position - 1.0).abs() <= 0.0005);
        assert!(find_peaks(&omegas, &vec![1.0; omegas.len()]).is_empty());
    }

    #[test]
    fn unresolved_doublet_is_flagged() {
        // λ√N below Γ/√3: the two Lorentzians merge into one maximum
        let p = resonant(0.002, 4, 0.01);
        let r = evaluate_spectrum(&p, &ProbeGrid::auto(&p)).unwrap();
        assert_eq!(r.peaks.len(), 1);
        assert!(r.unresolved);
        let p = resonant(0.007, 4, 0.01);
        let r = evaluate_spectrum(&p, &ProbeGrid::auto(&p)).unwrap();
        assert_eq!(r.peaks.len(), 2);
    }

    #[test]
    fn sqrt_n_enhancement() {
        let ns = [1usize, 4, 16, 64];
        let splits: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let p = resonant(0.02, n, 0.002);
                let r = evaluate_spectrum(&p, &ProbeGrid::auto(&p)).unwrap();
                assert_eq!(r.peaks.len(), 2);
                let s = r.peaks[1].position - r.peaks[0].position;
                assert!((s / rabi_frequency(0.02, n).unwrap() - 1.0).abs() < 0.02);
                s
            })
            .collect();
        assert!((power_law_exponent(&ns, &splits) - 0.5).abs() < 0.01);
    }

    #[test]
    fn resonant_weights_are_equal() {
        let p = resonant(0.1, 1, 0.005);
        let mut grid = ProbeGrid::auto(&p);
        grid.start -= 5.0;
        grid.stop += 5.0;
        grid.samples = ((grid.stop - grid.start) / (0.005 / 20.0)) as usize + 1;
        let r = evaluate_spectrum(&p, &grid).unwrap();
        let (lo, hi) = split_weights(&r);
        assert!((0.98..=1.02).contains(&(lo / hi)));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = resonant(0.05, 4, 0.01);
        let grid = ProbeGrid::new(0.8, 1.2, 50).unwrap();
        assert!(matches!(evaluate_spectrum(&p, &grid), Err(Error::Config(_))));
        let narrow = ProbeGrid::new(0.95, 1.05, 10_000).unwrap();
        assert!(evaluate_spectrum(&p, &narrow).is_err());
    }

    proptest! {
        #[test]
        fn spectrum_is_positive(lambda in 0.0f64..0.2, n in 1usize..50, g in 1e-3f64..0.1, d in -0.5f64..0.5, w in 0.0f64..2.0) {
            let p = SpectrumParams::new(1.0 + d, 1.0, lambda, n, g);
            prop_assert!(susceptibility_im(&p, w) > 0.0);
        }

        #[test]
        fn resonant_spectrum_mirror_symmetry(lambda in 0.01f64..0.2, n in 1usize..20, x in 0.0f64..1.0) {
            let p = resonant(lambda, n, 0.01);
            let a = susceptibility_im(&p, 1.0 + x);
            let b = susceptibility_im(&p, 1.0 - x);
            prop_assert!((a - b).abs() <= 1e-10 * a.max(b));
        }
    }
}
