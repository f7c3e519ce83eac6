//! Phase-entangled cat states and collapse-time laws.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::EvolutionRecord;
use crate::qstate::{ComplexMatrix, ComplexVector, HilbertSpace, StateVector};

/// Minimum R² accepted by [`coherence_decay_fit`].
pub const MIN_FIT_R_SQUARED: f64 = 0.99;

/// Coherent-state amplitudes e^{−|α|²/2} αᵏ/√k! for k = 0..=n_max.
pub fn coherent_amplitudes(alpha: Complex64, n_max: usize) -> ComplexVector {
    let mut amps = ComplexVector::zeros(n_max + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 0..=n_max {
        amps[k] = c;
        c *= alpha / ((k + 1) as f64).sqrt();
    }
    amps
}

/// ⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + ᾱβ).
pub fn coherent_overlap(alpha: Complex64, beta: Complex64) -> Complex64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp()
}

/// Smallest cutoff accepted for mean occupation `n` (at least 1).
pub fn required_cutoff(n: f64) -> usize {
    ((n + 5.0 * n.sqrt()).ceil() as usize).max(1)
}

/// Normalised |e, √n e^{iφ}⟩ + |g, √n e^{−iφ}⟩ on the one-emitter space with
/// boson cutoff `n_max`.
pub fn cat_state(n: f64, phi: f64, n_max: usize) -> Result<StateVector> {
    if !(n.is_finite() && n >= 0.0) {
        return Err(Error::Config(format!("mean quanta must be >= 0, got {n}")));
    }
    if n_max < required_cutoff(n) {
        return Err(Error::Cutoff(format!(
            "cutoff {n_max} is below n + 5√n = {} for n = {n}",
            required_cutoff(n)
        )));
    }
    let space = HilbertSpace::collective(1, n_max)?;
    let radius = n.sqrt();
    let excited = coherent_amplitudes(Complex64::from_polar(radius, phi), n_max);
    let ground = coherent_amplitudes(Complex64::from_polar(radius, -phi), n_max);
    let mut amps = ComplexVector::zeros(space.dim());
    for k in 0..=n_max {
        amps[space.index(1, k)] = excited[k];
        amps[space.index(0, k)] = ground[k];
    }
    StateVector::normalized(amps)
}

/// Branch projectors (|e⟩⟨e| ⊗ 1, |g⟩⟨g| ⊗ 1) on the one-emitter space.
pub fn spin_branch_projectors(n_max: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let space = HilbertSpace::collective(1, n_max)?;
    let d = space.dim();
    let mut pe = ComplexMatrix::zeros(d, d);
    let mut pg = ComplexMatrix::zeros(d, d);
    for k in 0..=n_max {
        pe[(space.index(1, k), space.index(1, k))] = Complex64::new(1.0, 0.0);
        pg[(space.index(0, k), space.index(0, k))] = Complex64::new(1.0, 0.0);
    }
    Ok((pe, pg))
}

/// D = 2√n sin φ, the distance between the two coherent branches.
pub fn pointer_distance(n: f64, phi: f64) -> f64 {
    2.0 * n.sqrt() * phi.sin()
}

/// Dispersive phase φ = nλ²t/Δ (unit proportionality constant).
pub fn dispersive_phase(n: f64, lambda: f64, t: f64, delta: f64) -> f64 {
    n * lambda * lambda * t / delta
}

/// Small-φ distance D ≈ 2n^{3/2}λ²t/Δ.
pub fn pointer_distance_small_phase(n: f64, lambda: f64, t: f64, delta: f64) -> f64 {
    2.0 * n.powf(1.5) * lambda * lambda * t / delta
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "seconds", rename_all = "snake_case")]
pub enum CollapseTime {
    Finite(f64),
    /// No decoherence (D = 0 or sin² = 0).
    Infinite,
}

impl CollapseTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            CollapseTime::Finite(t) => Some(t),
            CollapseTime::Infinite => None,
        }
    }
}

/// t = 2T_r/D².
pub fn collapse_time(t_r: f64, distance: f64) -> Result<CollapseTime> {
    if !(t_r.is_finite() && t_r > 0.0) {
        return Err(Error::Config(format!("T_r must be > 0, got {t_r}")));
    }
    if !distance.is_finite() {
        return Err(Error::Config("distance must be finite".into()));
    }
    if distance == 0.0 {
        return Ok(CollapseTime::Infinite);
    }
    Ok(CollapseTime::Finite(2.0 * t_r / (distance * distance)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MtCollapseInput {
    pub t_r: f64,
    pub n: f64,
    pub n_sys: f64,
    pub lambda0: f64,
    pub t: f64,
    pub delta: f64,
}

impl MtCollapseInput {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("T_r", self.t_r),
            ("n", self.n),
            ("N", self.n_sys),
            ("lambda0", self.lambda0),
            ("t", self.t),
            ("delta", self.delta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Nnλ₀²t/Δ.
    pub fn phase(&self) -> f64 {
        self.n_sys * self.n * self.lambda0 * self.lambda0 * self.t / self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseMode {
    Instantaneous,
    Bounds,
}

/// Collapse window for sin² between ½ (time average, upper time) and 1 (lower time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseWindow {
    pub lower: f64,
    pub upper: f64,
}

impl CollapseWindow {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.lower && t <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MtCollapse {
    Instantaneous(CollapseTime),
    Window(CollapseWindow),
}

/// t = T_r/(2nN sin²(Nnλ₀²t/Δ)), either evaluated literally or bracketed.
pub fn mt_collapse_time(input: &MtCollapseInput, mode: CollapseMode) -> Result<MtCollapse> {
    input.validate()?;
    let base = input.t_r / (2.0 * input.n * input.n_sys);
    Ok(match mode {
        CollapseMode::Instantaneous => {
            let s2 = input.phase().sin().powi(2);
            if s2 <= f64::EPSILON * f64::EPSILON {
                MtCollapse::Instantaneous(CollapseTime::Infinite)
            } else {
                MtCollapse::Instantaneous(CollapseTime::Finite(base / s2))
            }
        }
        CollapseMode::Bounds => MtCollapse::Window(CollapseWindow {
            lower: base,
            upper: 2.0 * base,
        }),
    })
}

/// Window over a range of quanta [n_lo, n_hi]: [T_r/(2 n_hi N), T_r/(n_lo N)].
pub fn collapse_window_over_quanta(t_r: f64, n_sys: f64, n_lo: f64, n_hi: f64) -> Result<CollapseWindow> {
    if !(n_lo > 0.0 && n_hi >= n_lo && t_r > 0.0 && n_sys > 0.0) {
        return Err(Error::Config(format!(
            "invalid collapse window inputs T_r = {t_r}, N = {n_sys}, n in [{n_lo}, {n_hi}]"
        )));
    }
    Ok(CollapseWindow {
        lower: t_r / (2.0 * n_hi * n_sys),
        upper: t_r / (n_lo * n_sys),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Fitted decay rate of the branch coherence, 1/time.
    pub rate: f64,
    /// Fitted coherence at t = 0.
    pub amplitude: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// ‖P_a ρ P_b‖_F at each sample of `record`.
pub fn branch_coherence(record: &EvolutionRecord, branches: (&ComplexMatrix, &ComplexMatrix)) -> Vec<f64> {
    record
        .states
        .iter()
        .map(|s| (branches.0 * s.matrix() * branches.1).norm())
        .collect()
}

/// Least-squares fit of ln|coherence| = ln A − rate·t.
pub fn coherence_decay_fit(record: &EvolutionRecord, branches: (&ComplexMatrix, &ComplexMatrix)) -> Result<DecayFit> {
    let coherence = branch_coherence(record, branches);
    let pts: Vec<(f64, f64)> = record
        .times
        .iter()
        .zip(&coherence)
        .filter(|(_, &c)| c > 1e-300)
        .map(|(&t, &c)| (t, c.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::FitQuality {
            r_squared: f64::NAN,
            required: MIN_FIT_R_SQUARED,
        });
    }
    let m = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    // a flat series is fitted exactly by a constant
    let r_squared = if ss_res <= 1e-24 * m {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    if r_squared.is_nan() || r_squared < MIN_FIT_R_SQUARED {
        return Err(Error::FitQuality {
            r_squared,
            required: MIN_FIT_R_SQUARED,
        });
    }
    Ok(DecayFit {
        rate: -slope,
        amplitude: intercept.exp(),
        r_squared,
        points: pts.len(),
    })
}
