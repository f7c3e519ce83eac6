//! Order-of-magnitude estimation chain for a microtubule treated as a
//! dielectric cavity: dimer dipoles, vacuum field, Rabi coupling, timescales,
//! quality factor and the collapse-versus-transport feasibility verdict.
//!
//! All inputs and outputs are SI. Every estimate can be run in two modes:
//! `Raw` chains computed values, `Anchored` replaces the headline
//! intermediates by their rounded published values before feeding them on.

use std::f64::consts::PI;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::decoherence::{collapse_window_over_quanta, CollapseWindow};
use crate::error::{Error, Result};
use crate::units::{self, Dimension};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub e_charge: f64,
    pub eps0: f64,
    pub k_b: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: units::HBAR,
        c: units::SPEED_OF_LIGHT,
        e_charge: units::ELEMENTARY_CHARGE,
        eps0: units::VACUUM_PERMITTIVITY,
        k_b: units::BOLTZMANN,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Rounded published values substituted in anchored mode, and the targets
/// each reported quantity is compared against.
pub mod anchors {
    pub const DIMER_DIPOLE: f64 = 3e-28;
    pub const CAVITY_VOLUME: f64 = 5e-22;
    pub const WATER_MODE_FREQUENCY: f64 = 6e12;
    pub const VACUUM_FIELD: f64 = 1e4;
    pub const N_DIMERS: f64 = 1e2;
    pub const LAMBDA_MT: f64 = 3e11;
    pub const HBAR_LAMBDA_MT_MEV: f64 = 0.1;
    pub const STRING_SCALE_EV: f64 = 1.5e-4;
    pub const PUMPING_TIME: f64 = 1e-10;
    pub const SUPERRADIANCE_LIFETIME: f64 = 1e-4;
    pub const WATER_COHERENCE_TIME: f64 = 1e-14;
    pub const T_R: f64 = 1e-4;
    pub const QUALITY_FACTOR: f64 = 1e8;
    pub const DIPOLE_ENERGY_EV: f64 = 1e-2;
    pub const COLLAPSE_LOWER: f64 = 1e-7;
    pub const COLLAPSE_UPPER: f64 = 1e-6;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    Raw,
    Anchored,
}

/// Where a reported number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueMode {
    Raw,
    Anchored,
    Calibrated,
}

/// Inputs of the estimation chain, all SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MtParameterSet {
    /// Microtubule length, m.
    pub mt_length: f64,
    /// Tubulin dimer length, m.
    pub dimer_length: f64,
    /// Mobile charge per dimer in units of e.
    pub q_mobile: f64,
    /// Hydrophobic-pocket separation, m.
    pub d_min: f64,
    pub eps_r_water: f64,
    pub eps_r_protein: f64,
    /// Cavity volume, m³.
    pub volume: f64,
    /// Two-level gap of ordered water, J.
    pub hbar_omega_c: f64,
    /// Water molecule dipole, C·m.
    pub d_ej: f64,
    /// Number of coherent water molecules.
    pub n_water: f64,
    /// Water molecule moment of inertia, kg·m².
    pub i_water: f64,
    /// Sound speed, m/s.
    pub v0: f64,
    /// Dimer oscillation frequency, rad/s.
    pub omega0_dimer: f64,
    /// Temperature, K.
    pub temperature: f64,
    /// Kink transfer time along the chain, s.
    pub t_kink: f64,
    /// String-coupling calibration constant.
    pub g_s: f64,
    /// Kink kinetic energy, J.
    pub e_kin: f64,
    pub n_quanta_min: f64,
    pub n_quanta_max: f64,
    /// Water-water separation used for the dipole-dipole estimate, m.
    pub water_separation: f64,
    /// Cavity damping time, s; `None` takes the super-radiance lifetime.
    #[serde(default)]
    pub t_r: Option<f64>,
}

/// Parameter names with their dimension (`None` for pure numbers).
pub const PARAMETERS: &[(&str, Option<Dimension>)] = &[
    ("mt_length", Some(Dimension::Length)),
    ("dimer_length", Some(Dimension::Length)),
    ("q_mobile", None),
    ("d_min", Some(Dimension::Length)),
    ("eps_r_water", None),
    ("eps_r_protein", None),
    ("volume", Some(Dimension::Volume)),
    ("hbar_omega_c", Some(Dimension::Energy)),
    ("d_ej", Some(Dimension::DipoleMoment)),
    ("n_water", None),
    ("i_water", Some(Dimension::MomentOfInertia)),
    ("v0", Some(Dimension::Speed)),
    ("omega0_dimer", Some(Dimension::Frequency)),
    ("temperature", Some(Dimension::Temperature)),
    ("t_kink", Some(Dimension::Time)),
    ("g_s", None),
    ("e_kin", Some(Dimension::Energy)),
    ("n_quanta_min", None),
    ("n_quanta_max", None),
    ("water_separation", Some(Dimension::Length)),
    ("t_r", Some(Dimension::Time)),
];

/// Dimension of a named parameter; the outer `None` means the name is unknown.
pub fn parameter_dimension(name: &str) -> Option<Option<Dimension>> {
    PARAMETERS.iter().find(|(n, _)| *n == name).map(|&(_, d)| d)
}

impl MtParameterSet {
    /// Published defaults, with g_s calibrated to the 10⁻¹⁰ s pumping time.
    pub fn published_defaults() -> Self {
        let c = PhysicalConstants::CODATA;
        let e_kin = units::ev_to_joule(5e-8);
        Self {
            mt_length: 1e-6,
            dimer_length: 8e-9,
            q_mobile: 36.0,
            d_min: 4e-9,
            eps_r_water: 80.0,
            eps_r_protein: 10.0,
            volume: 5e-22,
            hbar_omega_c: units::mev_to_joule(4.0),
            d_ej: 2.0 * c.e_charge * 0.2e-10,
            n_water: 1e8,
            i_water: 1e-47,
            v0: 1000.0,
            omega0_dimer: 1e12,
            temperature: 300.0,
            t_kink: 5e-7,
            g_s: calibrate_g_s(anchors::PUMPING_TIME, e_kin, &c),
            e_kin,
            n_quanta_min: 1.0,
            n_quanta_max: 10.0,
            water_separation: 4e-10,
            t_r: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mt_length", self.mt_length),
            ("dimer_length", self.dimer_length),
            ("d_min", self.d_min),
            ("eps_r_water", self.eps_r_water),
            ("eps_r_protein", self.eps_r_protein),
            ("volume", self.volume),
            ("hbar_omega_c", self.hbar_omega_c),
            ("d_ej", self.d_ej),
            ("n_water", self.n_water),
            ("i_water", self.i_water),
            ("v0", self.v0),
            ("omega0_dimer", self.omega0_dimer),
            ("temperature", self.temperature),
            ("g_s", self.g_s),
            ("e_kin", self.e_kin),
            ("n_quanta_min", self.n_quanta_min),
            ("n_quanta_max", self.n_quanta_max),
            ("water_separation", self.water_separation),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("q_mobile", self.q_mobile), ("t_kink", self.t_kink)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.n_quanta_max < self.n_quanta_min {
            return Err(Error::Config(format!(
                "n_quanta_max {} is below n_quanta_min {}",
                self.n_quanta_max, self.n_quanta_min
            )));
        }
        if let Some(t) = self.t_r {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("t_r must be > 0, got {t}")));
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "mt_length" => self.mt_length,
            "dimer_length" => self.dimer_length,
            "q_mobile" => self.q_mobile,
            "d_min" => self.d_min,
            "eps_r_water" => self.eps_r_water,
            "eps_r_protein" => self.eps_r_protein,
            "volume" => self.volume,
            "hbar_omega_c" => self.hbar_omega_c,
            "d_ej" => self.d_ej,
            "n_water" => self.n_water,
            "i_water" => self.i_water,
            "v0" => self.v0,
            "omega0_dimer" => self.omega0_dimer,
            "temperature" => self.temperature,
            "t_kink" => self.t_kink,
            "g_s" => self.g_s,
            "e_kin" => self.e_kin,
            "n_quanta_min" => self.n_quanta_min,
            "n_quanta_max" => self.n_quanta_max,
            "water_separation" => self.water_separation,
            "t_r" => {
                return self
                    .t_r
                    .ok_or_else(|| Error::Config("t_r is not set (derived from the lifetime)".into()))
            }
            other => return Err(Error::Config(format!("unknown parameter '{other}'"))),
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "mt_length" => &mut self.mt_length,
            "dimer_length" => &mut self.dimer_length,
            "q_mobile" => &mut self.q_mobile,
            "d_min" => &mut self.d_min,
            "eps_r_water" => &mut self.eps_r_water,
            "eps_r_protein" => &mut self.eps_r_protein,
            "volume" => &mut self.volume,
            "hbar_omega_c" => &mut self.hbar_omega_c,
            "d_ej" => &mut self.d_ej,
            "n_water" => &mut self.n_water,
            "i_water" => &mut self.i_water,
            "v0" => &mut self.v0,
            "omega0_dimer" => &mut self.omega0_dimer,
            "temperature" => &mut self.temperature,
            "t_kink" => &mut self.t_kink,
            "g_s" => &mut self.g_s,
            "e_kin" => &mut self.e_kin,
            "n_quanta_min" => &mut self.n_quanta_min,
            "n_quanta_max" => &mut self.n_quanta_max,
            "water_separation" => &mut self.water_separation,
            "t_r" => {
                self.t_r = Some(value);
                return Ok(());
            }
            other => return Err(Error::Config(format!("unknown parameter '{other}'"))),
        };
        *slot = value;
        Ok(())
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be > 0, got {v}")))
    }
}

/// d = q e d_min / ε_r(water).
pub fn dimer_dipole(set: &MtParameterSet, c: &PhysicalConstants) -> f64 {
    set.q_mobile * c.e_charge * set.d_min / set.eps_r_water
}

pub fn cavity_volume(set: &MtParameterSet) -> f64 {
    set.volume
}

/// ω_c = ħω_c / ħ.
pub fn water_mode_frequency(set: &MtParameterSet, c: &PhysicalConstants) -> f64 {
    set.hbar_omega_c / c.hbar
}

/// E = √(2πħω_c / (ε_r ε₀ V)).
pub fn vacuum_amplitude(omega_c: f64, volume: f64, eps_r: f64, c: &PhysicalConstants) -> Result<f64> {
    require_positive("omega_c", omega_c)?;
    require_positive("volume", volume)?;
    require_positive("eps_r", eps_r)?;
    Ok((2.0 * PI * c.hbar * omega_c / (eps_r * c.eps0 * volume)).sqrt())
}

/// N = L / dimer length.
pub fn dimer_count(set: &MtParameterSet) -> f64 {
    set.mt_length / set.dimer_length
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiCouplingMt {
    pub dimer_dipole: f64,
    pub omega_c: f64,
    pub vacuum_field: f64,
    pub lambda0: f64,
    pub n_dimers: f64,
    pub lambda_mt: f64,
    /// ħλ_MT in meV.
    pub hbar_lambda_mt_mev: f64,
    /// Δ = ω_c − ω₀(dimer).
    pub detuning: f64,
    /// Δ/λ₀.
    pub detuning_ratio: f64,
}

/// λ₀ = dE/ħ and λ_MT = √N λ₀.
pub fn rabi_coupling_mt(set: &MtParameterSet, c: &PhysicalConstants, mode: EstimateMode) -> Result<RabiCouplingMt> {
    set.validate()?;
    let (d, omega_c, field, n) = match mode {
        EstimateMode::Raw => {
            let omega_c = water_mode_frequency(set, c);
            (
                dimer_dipole(set, c),
                omega_c,
                vacuum_amplitude(omega_c, set.volume, set.eps_r_water, c)?,
                dimer_count(set),
            )
        }
        EstimateMode::Anchored => (
            anchors::DIMER_DIPOLE,
            anchors::WATER_MODE_FREQUENCY,
            anchors::VACUUM_FIELD,
            anchors::N_DIMERS,
        ),
    };
    let lambda0 = d * field / c.hbar;
    let lambda_mt = n.sqrt() * lambda0;
    let detuning = omega_c - set.omega0_dimer;
    Ok(RabiCouplingMt {
        dimer_dipole: d,
        omega_c,
        vacuum_field: field,
        lambda0,
        n_dimers: n,
        lambda_mt,
        hbar_lambda_mt_mev: units::joule_to_mev(c.hbar * lambda_mt),
        detuning,
        detuning_ratio: detuning / lambda0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StringScale {
    pub joule: f64,
    pub ev: f64,
    /// E_kin / M_s.
    pub kink_ratio: f64,
}

/// M_s = ħ v₀ / d_min.
pub fn string_scale(set: &MtParameterSet, c: &PhysicalConstants) -> Result<StringScale> {
    require_positive("v0", set.v0)?;
    require_positive("d_min", set.d_min)?;
    let joule = c.hbar * set.v0 / set.d_min;
    Ok(StringScale {
        joule,
        ev: units::joule_to_ev(joule),
        kink_ratio: set.e_kin / joule,
    })
}

/// t = 16π g_s ħ / (v_d² M_s) with v_d² = E_kin/M_s.
pub fn pumping_time_with(g_s: f64, e_kin: f64, m_s: f64, c: &PhysicalConstants) -> Result<f64> {
    require_positive("g_s", g_s)?;
    require_positive("e_kin", e_kin)?;
    require_positive("M_s", m_s)?;
    let v_d2 = e_kin / m_s;
    Ok(16.0 * PI * g_s * c.hbar / (v_d2 * m_s))
}

pub fn pumping_time(set: &MtParameterSet, c: &PhysicalConstants) -> Result<f64> {
    pumping_time_with(set.g_s, set.e_kin, string_scale(set, c)?.joule, c)
}

/// g_s that makes the pumping time equal `target`.
pub fn calibrate_g_s(target: f64, e_kin: f64, c: &PhysicalConstants) -> f64 {
    target * e_kin / (16.0 * PI * c.hbar)
}

/// t = c ħ² V / (4π d_ej² ε N_w L), with ε the two-level gap energy.
pub fn superradiance_lifetime(set: &MtParameterSet, c: &PhysicalConstants) -> Result<f64> {
    set.validate()?;
    Ok(c.c * c.hbar * c.hbar * set.volume
        / (4.0 * PI * set.d_ej * set.d_ej * set.hbar_omega_c * set.n_water * set.mt_length))
}

/// t = 2π/ω₀ with ω₀ = ħ/I.
pub fn water_coherence_time(set: &MtParameterSet, c: &PhysicalConstants) -> Result<f64> {
    require_positive("i_water", set.i_water)?;
    Ok(2.0 * PI * set.i_water / c.hbar)
}

/// Q = ω_c T_r.
pub fn quality_factor(omega_c: f64, t_r: f64) -> Result<f64> {
    require_positive("omega_c", omega_c)?;
    require_positive("T_r", t_r)?;
    Ok(omega_c * t_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DipoleGeometry {
    /// Both dipoles parallel to each other and perpendicular to r.
    ParallelTransverse,
    /// Both dipoles along r.
    Collinear,
    /// Polar angles of each dipole to r and the azimuth between them.
    General { theta_i: f64, theta_j: f64, phi: f64 },
}

impl DipoleGeometry {
    /// 3(η̂·d̂_i)(η̂·d̂_j) − d̂_i·d̂_j.
    pub fn factor(&self) -> f64 {
        match *self {
            DipoleGeometry::ParallelTransverse => -1.0,
            DipoleGeometry::Collinear => 2.0,
            DipoleGeometry::General { theta_i, theta_j, phi } => {
                let (ci, cj) = (theta_i.cos(), theta_j.cos());
                let dot = ci * cj + theta_i.sin() * theta_j.sin() * phi.cos();
                3.0 * ci * cj - dot
            }
        }
    }
}

/// E = −(1/4πε)(3(η̂·d_i)(η̂·d_j) − d_i·d_j)/r³ with ε = ε_r ε₀.
pub fn dipole_dipole_energy(
    d_i: f64,
    d_j: f64,
    r: f64,
    geometry: DipoleGeometry,
    eps_r: f64,
    c: &PhysicalConstants,
) -> Result<f64> {
    require_positive("r", r)?;
    require_positive("eps_r", eps_r)?;
    Ok(-geometry.factor() * d_i * d_j / (4.0 * PI * eps_r * c.eps0 * r.powi(3)))
}

/// Largest separation at which |E_dd| still reaches k_B T.
pub fn thermal_isolation_radius(
    d_i: f64,
    d_j: f64,
    geometry: DipoleGeometry,
    eps_r: f64,
    temperature: f64,
    c: &PhysicalConstants,
) -> Result<f64> {
    require_positive("eps_r", eps_r)?;
    require_positive("temperature", temperature)?;
    let strength = geometry.factor().abs() * d_i.abs() * d_j.abs() / (4.0 * PI * eps_r * c.eps0);
    Ok((strength / (c.k_b * temperature)).cbrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Permittivity {
    Finite(f64),
    /// ω² = ω_T².
    Pole,
}

/// ε(ω) = ε(∞) + Ω_p²/(ω_T² − ω²).
pub fn ferroelectric_epsilon(omega: f64, omega_p2: f64, omega_t2: f64, eps_inf: f64) -> Result<Permittivity> {
    require_positive("eps_inf", eps_inf)?;
    let denom = omega_t2 - omega * omega;
    if denom.abs() <= 1e-15 * omega_t2.abs().max(omega * omega) {
        return Ok(Permittivity::Pole);
    }
    Ok(Permittivity::Finite(eps_inf + omega_p2 / denom))
}

/// ω* = √(Ω_p²/ε(∞) − |ω_T²|) when ω_T² < 0 and the radicand is positive.
pub fn critical_frequency(omega_p2: f64, omega_t2: f64, eps_inf: f64) -> Result<Option<f64>> {
    require_positive("eps_inf", eps_inf)?;
    if omega_t2 >= 0.0 {
        return Ok(None);
    }
    let radicand = omega_p2 / eps_inf - omega_t2.abs();
    Ok((radicand > 0.0).then(|| radicand.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DielectricRegime {
    /// ε < 0 (opaque) for ω < ω*, zero at ω*.
    Ferroelectric {
        omega_star: f64,
    },
    /// Ordinary transverse resonance at ω_T.
    Resonant {
        omega_t: f64,
    },
    NoCrossing,
}

pub fn dielectric_regime(omega_p2: f64, omega_t2: f64, eps_inf: f64) -> Result<DielectricRegime> {
    if let Some(omega_star) = critical_frequency(omega_p2, omega_t2, eps_inf)? {
        return Ok(DielectricRegime::Ferroelectric { omega_star });
    }
    if omega_t2 > 0.0 {
        return Ok(DielectricRegime::Resonant {
            omega_t: omega_t2.sqrt(),
        });
    }
    Ok(DielectricRegime::NoCrossing)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub value_si: f64,
    pub unit: String,
    pub published_target: Option<f64>,
    pub log10_dev: Option<f64>,
    pub mode: ValueMode,
    pub formula_anchor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub mode: EstimateMode,
    pub quantities: IndexMap<String, ReportEntry>,
    pub collapse_window: CollapseWindow,
    /// Time-averaged collapse time T_r/(nN) at the smallest n, compared with t_kink.
    pub verdict: bool,
    /// Ratio of that collapse time to t_kink.
    pub margin: f64,
    /// Largest integer n in range whose time-averaged collapse time reaches t_kink.
    pub feasible_n_max: Option<u32>,
    pub notes: Vec<String>,
}

impl EstimateReport {
    pub fn get(&self, name: &str) -> Option<&ReportEntry> {
        self.quantities.get(name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).map(|e| e.value_si)
    }
}

struct ReportBuilder {
    quantities: IndexMap<String, ReportEntry>,
}

impl ReportBuilder {
    fn push(&mut self, name: &str, value: f64, unit: &str, target: Option<f64>, mode: ValueMode, anchor: &str) {
        let log10_dev = target.filter(|t| *t > 0.0 && value > 0.0).map(|t| (value / t).log10());
        self.quantities.insert(
            name.to_string(),
            ReportEntry {
                value_si: value,
                unit: unit.to_string(),
                published_target: target,
                log10_dev,
                mode,
                formula_anchor: anchor.to_string(),
            },
        );
    }
}

/// Relative slack when comparing a collapse time with t_kink, so that exact
/// equality in the published numbers is not lost to rounding.
const VERDICT_RTOL: f64 = 1e-9;

/// Runs the whole chain and the feasibility verdict.
pub fn feasibility_report(set: &MtParameterSet, mode: EstimateMode) -> Result<EstimateReport> {
    set.validate()?;
    let c = PhysicalConstants::CODATA;
    let snapped = match mode {
        EstimateMode::Raw => ValueMode::Raw,
        EstimateMode::Anchored => ValueMode::Anchored,
    };
    let mut b = ReportBuilder {
        quantities: IndexMap::new(),
    };
    let q = |name: &'static str| move |e: Error| e.in_quantity(name);

    let coupling = rabi_coupling_mt(set, &c, mode).map_err(q("lambda_mt"))?;
    b.push(
        "d_dimer",
        coupling.dimer_dipole,
        "C*m",
        Some(anchors::DIMER_DIPOLE),
        snapped,
        "q e d_min / eps_r_water",
    );
    b.push(
        "cavity_volume",
        cavity_volume(set),
        "m3",
        Some(anchors::CAVITY_VOLUME),
        ValueMode::Raw,
        "V (configured)",
    );
    b.push(
        "omega_c",
        coupling.omega_c,
        "rad/s",
        Some(anchors::WATER_MODE_FREQUENCY),
        snapped,
        "hbar_omega_c / hbar",
    );
    b.push(
        "e_ow",
        coupling.vacuum_field,
        "V/m",
        Some(anchors::VACUUM_FIELD),
        snapped,
        "sqrt(2 pi hbar omega_c / (eps_r_water eps0 V))",
    );
    b.push(
        "n_dimers",
        coupling.n_dimers,
        "1",
        Some(anchors::N_DIMERS),
        snapped,
        "L / dimer_length",
    );
    b.push(
        "lambda0",
        coupling.lambda0,
        "rad/s",
        None,
        snapped,
        "d_dimer e_ow / hbar",
    );
    b.push(
        "lambda_mt",
        coupling.lambda_mt,
        "rad/s",
        Some(anchors::LAMBDA_MT),
        snapped,
        "sqrt(N) lambda0",
    );
    b.push(
        "hbar_lambda_mt",
        c.hbar * coupling.lambda_mt,
        "J",
        Some(units::mev_to_joule(anchors::HBAR_LAMBDA_MT_MEV)),
        snapped,
        "hbar lambda_mt",
    );
    b.push(
        "detuning",
        coupling.detuning,
        "rad/s",
        None,
        snapped,
        "omega_c - omega0_dimer",
    );
    b.push(
        "detuning_ratio",
        coupling.detuning_ratio,
        "1",
        None,
        snapped,
        "detuning / lambda0",
    );

    let strings = string_scale(set, &c).map_err(q("string_scale"))?;
    b.push(
        "string_scale",
        strings.joule,
        "J",
        Some(units::ev_to_joule(anchors::STRING_SCALE_EV)),
        ValueMode::Raw,
        "hbar v0 / d_min",
    );
    b.push(
        "kink_energy_ratio",
        strings.kink_ratio,
        "1",
        None,
        ValueMode::Raw,
        "E_kin / M_s",
    );
    b.push(
        "g_s",
        set.g_s,
        "1",
        None,
        ValueMode::Calibrated,
        "solved from the pumping-time target",
    );
    let m_s = match mode {
        EstimateMode::Raw => strings.joule,
        EstimateMode::Anchored => units::ev_to_joule(anchors::STRING_SCALE_EV),
    };
    let pump = pumping_time_with(set.g_s, set.e_kin, m_s, &c).map_err(q("pumping_time"))?;
    b.push(
        "pumping_time",
        pump,
        "s",
        Some(anchors::PUMPING_TIME),
        ValueMode::Calibrated,
        "16 pi g_s hbar / (v_d^2 M_s), v_d^2 = E_kin / M_s",
    );

    let lifetime = superradiance_lifetime(set, &c).map_err(q("superradiance_lifetime"))?;
    b.push(
        "superradiance_lifetime",
        lifetime,
        "s",
        Some(anchors::SUPERRADIANCE_LIFETIME),
        ValueMode::Raw,
        "c hbar^2 V / (4 pi d_ej^2 hbar_omega_c N_w L)",
    );
    let coherence = water_coherence_time(set, &c).map_err(q("water_coherence_time"))?;
    b.push(
        "water_coherence_time",
        coherence,
        "s",
        Some(anchors::WATER_COHERENCE_TIME),
        ValueMode::Raw,
        "2 pi / omega0, omega0 = hbar / I_water",
    );

    let (t_r, t_r_mode) = match (set.t_r, mode) {
        (Some(t), _) => (t, ValueMode::Raw),
        (None, EstimateMode::Raw) => (lifetime, ValueMode::Raw),
        (None, EstimateMode::Anchored) => (anchors::T_R, ValueMode::Anchored),
    };
    b.push(
        "t_r",
        t_r,
        "s",
        Some(anchors::T_R),
        t_r_mode,
        "T_r = super-radiance lifetime",
    );
    let qf = quality_factor(coupling.omega_c, t_r).map_err(q("quality_factor"))?;
    b.push(
        "quality_factor",
        qf,
        "1",
        Some(anchors::QUALITY_FACTOR),
        snapped,
        "omega_c T_r",
    );

    let e_dd = dipole_dipole_energy(
        set.d_ej,
        set.d_ej,
        set.water_separation,
        DipoleGeometry::ParallelTransverse,
        set.eps_r_protein,
        &c,
    )
    .map_err(q("water_dipole_energy"))?;
    b.push(
        "water_dipole_energy",
        e_dd.abs(),
        "J",
        Some(units::ev_to_joule(anchors::DIPOLE_ENERGY_EV)),
        ValueMode::Raw,
        "|d_ej^2 / (4 pi eps_r_protein eps0 r^3)|, parallel transverse",
    );
    let r_iso = thermal_isolation_radius(
        set.d_ej,
        set.d_ej,
        DipoleGeometry::ParallelTransverse,
        set.eps_r_protein,
        set.temperature,
        &c,
    )
    .map_err(q("thermal_isolation_radius"))?;
    b.push(
        "thermal_isolation_radius",
        r_iso,
        "m",
        None,
        ValueMode::Raw,
        "|E_dd(r)| = k_B T",
    );

    let window = collapse_window_over_quanta(t_r, coupling.n_dimers, set.n_quanta_min, set.n_quanta_max)
        .map_err(q("collapse_window"))?;
    b.push(
        "collapse_window_lower",
        window.lower,
        "s",
        Some(anchors::COLLAPSE_LOWER),
        t_r_mode,
        "T_r / (2 n_max N)",
    );
    b.push(
        "collapse_window_upper",
        window.upper,
        "s",
        Some(anchors::COLLAPSE_UPPER),
        t_r_mode,
        "T_r / (n_min N)",
    );
    b.push("t_kink", set.t_kink, "s", None, ValueMode::Raw, "configured");

    let averaged = |n: f64| t_r / (n * coupling.n_dimers);
    let reaches = |n: f64| averaged(n) >= set.t_kink * (1.0 - VERDICT_RTOL);
    let verdict = reaches(set.n_quanta_min);
    let margin = if set.t_kink > 0.0 {
        averaged(set.n_quanta_min) / set.t_kink
    } else {
        f64::INFINITY
    };
    let first = set.n_quanta_min.ceil() as u32;
    let last = set.n_quanta_max.floor() as u32;
    let feasible_n_max = (first..=last).rev().find(|&n| reaches(n as f64));

    let mut notes = Vec::new();
    if let Some(n) = feasible_n_max {
        if (n as f64) < set.n_quanta_max {
            notes.push(format!(
                "collapse time reaches t_kink only for n <= {n}; larger n decohere faster than the kink transfer"
            ));
        }
    }
    if mode == EstimateMode::Raw {
        notes.push("raw mode chains computed values; deviations from rounded published values accumulate".into());
    }
    notes.push(format!(
        "g_s = {:.6e} is a calibration constant solved from the {:e} s pumping-time target",
        set.g_s,
        anchors::PUMPING_TIME
    ));

    Ok(EstimateReport {
        mode,
        quantities: b.quantities,
        collapse_window: window,
        verdict,
        margin,
        feasible_n_max,
        notes,
    })
}
