//! Concrete Hamiltonians and dissipators.
//!
//! Every dissipator uses one convention: a jump `(L, r)` contributes
//! `r (2 L ρ L† − {L†L, ρ})` to dρ/dt. Constructors document how their rate
//! maps onto this form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    boson_lowering, boson_number, build_operator_set, hermiticity_defect, infinity_norm, max_abs, ComplexMatrix,
    HilbertSpace, ModeLayout,
};

/// Tolerance on ‖H − H†‖ (entrywise, relative to the largest entry when that exceeds 1).
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Jump {
    operator: ComplexMatrix,
    rate: f64,
    adjoint: ComplexMatrix,
    ldag_l: ComplexMatrix,
}

impl Jump {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::Model(format!("jump rate must be finite and >= 0, got {rate}")));
        }
        if !operator.is_square() {
            return Err(Error::Shape("jump operator must be square".into()));
        }
        let adjoint = operator.adjoint();
        let ldag_l = &adjoint * &operator;
        Ok(Self {
            operator,
            rate,
            adjoint,
            ldag_l,
        })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    pub fn adjoint(&self) -> &ComplexMatrix {
        &self.adjoint
    }

    /// L†L.
    pub fn ldag_l(&self) -> &ComplexMatrix {
        &self.ldag_l
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: ComplexMatrix,
    jumps: Vec<Jump>,
    layout: Option<ModeLayout>,
}

impl LindbladModel {
    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// Boson layout when the model was built on a spin ⊗ boson space.
    pub fn layout(&self) -> Option<ModeLayout> {
        self.layout
    }

    pub fn with_layout(mut self, layout: ModeLayout) -> Result<Self> {
        if layout.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "layout dimension {} does not match model dimension {}",
                layout.dim(),
                self.dim()
            )));
        }
        self.layout = Some(layout);
        Ok(self)
    }

    pub fn is_closed(&self) -> bool {
        self.jumps.iter().all(|j| j.rate == 0.0)
    }

    pub fn max_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate).fold(0.0, f64::max)
    }

    /// Fastest scale of the generator: max(‖H‖∞, r‖L†L‖∞).
    pub fn frequency_scale(&self) -> f64 {
        self.jumps
            .iter()
            .map(|j| j.rate * infinity_norm(&j.ldag_l))
            .fold(infinity_norm(&self.hamiltonian), f64::max)
    }
}

/// Validates a Hamiltonian and a jump list into a model.
pub fn generic_lindblad(hamiltonian: ComplexMatrix, jumps: Vec<(ComplexMatrix, f64)>) -> Result<LindbladModel> {
    if !hamiltonian.is_square() {
        return Err(Error::Shape(format!(
            "Hamiltonian must be square, got {}x{}",
            hamiltonian.nrows(),
            hamiltonian.ncols()
        )));
    }
    let scale = max_abs(&hamiltonian).max(1.0);
    let defect = hermiticity_defect(&hamiltonian);
    if defect > HERMITICITY_TOL * scale {
        return Err(Error::Model(format!(
            "Hamiltonian is not Hermitian (defect {defect:.3e})"
        )));
    }
    let dim = hamiltonian.nrows();
    let jumps = jumps
        .into_iter()
        .enumerate()
        .map(|(m, (op, rate))| {
            if op.shape() != (dim, dim) {
                return Err(Error::Shape(format!(
                    "jump {m} has shape {:?}, model dimension is {dim}",
                    op.shape()
                )));
            }
            Jump::new(op, rate).map_err(|e| match e {
                Error::Model(msg) => Error::Model(format!("jump {m}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LindbladModel {
        hamiltonian,
        jumps,
        layout: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiModelParams {
    /// Emitter transition frequency ω₀.
    pub omega0: f64,
    /// Cavity frequency ω.
    pub omega: f64,
    /// Emitter-field coupling λ.
    pub lambda: f64,
    pub n_emitters: usize,
    /// Cavity leak κ.
    pub kappa: f64,
}

impl RabiModelParams {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega0", self.omega0),
            ("omega", self.omega),
            ("lambda", self.lambda),
            ("kappa", self.kappa),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDampingParams {
    pub omega: f64,
    /// Phase-damping rate κ.
    pub kappa_phi: f64,
}

/// H = ω₀ Sz + ω a†a + λ (S+ a + a† S−).
pub fn tavis_cummings_hamiltonian(p: &RabiModelParams, space: &HilbertSpace) -> Result<ComplexMatrix> {
    p.validate()?;
    if space.n_emitters() != p.n_emitters {
        return Err(Error::Config(format!(
            "parameters describe N = {} emitters but the space holds {}",
            p.n_emitters,
            space.n_emitters()
        )));
    }
    let ops = build_operator_set(space);
    let c = |x: f64| crate::qstate::complex(x);
    let h = &ops.sz * c(p.omega0)
        + ops.number() * c(p.omega)
        + (&ops.splus * &ops.a + &ops.a_dag * &ops.sminus) * c(p.lambda);
    Ok(h)
}

/// Tavis–Cummings model with cavity leakage
/// ∂ρ = −i[H, ρ] − κ(a†aρ − 2aρa† + ρa†a),
/// i.e. jump `a` at rate κ in this crate's convention.
pub fn cavity_decay_model(p: &RabiModelParams, space: &HilbertSpace) -> Result<LindbladModel> {
    let h = tavis_cummings_hamiltonian(p, space)?;
    let a = build_operator_set(space).a;
    generic_lindblad(h, vec![(a, p.kappa)])?.with_layout(space.layout())
}

/// Oscillator under pure phase damping
/// ∂ρ = (κ/2)(2 n ρ n − ρ n² − n² ρ) with n = a†a,
/// i.e. jump `a†a` at rate κ/2, plus H = ω a†a.
pub fn phase_damping_model(p: &PhaseDampingParams, n_max: usize) -> Result<LindbladModel> {
    if n_max == 0 {
        return Err(Error::InvalidSpace("boson cutoff must be at least 1".into()));
    }
    if !(p.omega.is_finite() && p.omega >= 0.0 && p.kappa_phi.is_finite() && p.kappa_phi >= 0.0) {
        return Err(Error::Config(format!(
            "phase damping needs omega, kappa >= 0, got ({}, {})",
            p.omega, p.kappa_phi
        )));
    }
    let dim = n_max + 1;
    let n = boson_number(dim);
    let h = &n * crate::qstate::complex(p.omega);
    generic_lindblad(h, vec![(n, p.kappa_phi / 2.0)])?.with_layout(ModeLayout::oscillator(n_max))
}

/// Bare damped oscillator: jump `a` at rate κ, H = ω a†a.
pub fn damped_oscillator_model(omega: f64, kappa: f64, n_max: usize) -> Result<LindbladModel> {
    let dim = n_max + 1;
    let a = boson_lowering(dim);
    let h = boson_number(dim) * crate::qstate::complex(omega);
    generic_lindblad(h, vec![(a, kappa)])?.with_layout(ModeLayout::oscillator(n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::hermitian_eigenvalues;
    use num_complex::Complex64;

    fn params(n: usize, lambda: f64) -> RabiModelParams {
        RabiModelParams {
            omega0: 1.0,
            omega: 1.0,
            lambda,
            n_emitters: n,
            kappa: 0.0,
        }
    }

    /// Gap between the two eigenvalues of H restricted to the one-excitation
    /// manifold above the ground state (C = 1 − N/2).
    fn one_excitation_gap(n: usize, lambda: f64) -> f64 {
        let space = HilbertSpace::collective(n, 2).unwrap();
        let h = tavis_cummings_hamiltonian(&params(n, lambda), &space).unwrap();
        let idx = [space.index(1, 0), space.index(0, 1)];
        let block = ComplexMatrix::from_fn(2, 2, |i, j| h[(idx[i], idx[j])]);
        let ev = hermitian_eigenvalues(&block);
        ev[1] - ev[0]
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        let space = HilbertSpace::collective(2, 3).unwrap();
        let p = RabiModelParams {
            omega0: 1.3,
            omega: 0.7,
            lambda: 0.0,
            n_emitters: 2,
            kappa: 0.0,
        };
        let h = tavis_cummings_hamiltonian(&p, &space).unwrap();
        for k in 0..3 {
            for n in 0..4 {
                let i = space.index(k, n);
                let m = k as f64 - 1.0;
                assert!((h[(i, i)].re - (1.3 * m + 0.7 * n as f64)).abs() < 1e-14);
            }
        }
        let off: f64 = (0..h.nrows())
            .flat_map(|i| (0..h.ncols()).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| h[(i, j)].norm())
            .sum();
        assert_eq!(off, 0.0);
    }

    #[test]
    fn single_emitter_resonant_gap_is_two_lambda() {
        // 2×2 block [[0, λ], [λ, 0]] (relative to the common diagonal) has eigenvalues ±λ
        assert!((one_excitation_gap(1, 0.3) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn collective_gap_scales_with_sqrt_n() {
        for n in [1usize, 2, 4, 9, 16] {
            let gap = one_excitation_gap(n, 0.05);
            let expected = 2.0 * 0.05 * (n as f64).sqrt();
            assert!(
                ((gap - expected) / expected).abs() < 1e-8,
                "N = {n}: {gap} vs {expected}"
            );
        }
        assert!((one_excitation_gap(4, 0.1) - 0.4).abs() < 1e-10);
    }

    #[test]
    fn emitter_count_mismatch_is_a_configuration_error() {
        let space = HilbertSpace::collective(3, 2).unwrap();
        assert!(matches!(
            tavis_cummings_hamiltonian(&params(2, 0.1), &space),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cavity_decay_uses_rate_kappa_on_a() {
        let space = HilbertSpace::collective(1, 3).unwrap();
        let p = RabiModelParams {
            kappa: 0.25,
            ..params(1, 0.1)
        };
        let model = cavity_decay_model(&p, &space).unwrap();
        assert_eq!(model.jumps().len(), 1);
        assert_eq!(model.jumps()[0].rate(), 0.25);
        assert_eq!(model.jumps()[0].operator(), &build_operator_set(&space).a);
        assert_eq!(model.layout(), Some(space.layout()));
    }

    #[test]
    fn phase_damping_uses_half_rate_on_number_operator() {
        let model = phase_damping_model(
            &PhaseDampingParams {
                omega: 2.0,
                kappa_phi: 1.0,
            },
            4,
        )
        .unwrap();
        assert_eq!(model.jumps()[0].rate(), 0.5);
        assert_eq!(model.jumps()[0].operator(), &boson_number(5));
        assert!(phase_damping_model(
            &PhaseDampingParams {
                omega: 0.0,
                kappa_phi: 1.0
            },
            0
        )
        .is_err());
    }

    #[test]
    fn generic_model_validation() {
        let h = ComplexMatrix::identity(2, 2);
        let closed = generic_lindblad(h.clone(), vec![]).unwrap();
        assert!(closed.is_closed());

        let mut sm = ComplexMatrix::zeros(2, 2);
        sm[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            generic_lindblad(h.clone(), vec![(sm.clone(), -1.0)]),
            Err(Error::Model(_))
        ));

        let mut skew = ComplexMatrix::zeros(2, 2);
        skew[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(generic_lindblad(skew, vec![]), Err(Error::Model(_))));

        let wrong = ComplexMatrix::zeros(3, 3);
        assert!(matches!(generic_lindblad(h, vec![(wrong, 1.0)]), Err(Error::Shape(_))));
    }
}
