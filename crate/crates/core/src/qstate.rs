//! Dense complex operators and states on the composite space
//! (spin sector of N two-level emitters) ⊗ (boson mode truncated at `n_max` quanta).
//!
//! Composite basis ordering is spin-major: index = spin_index · (n_max + 1) + n.
//! In the collective sector the spin index `k = 0..=N` labels the Dicke state
//! with `m = k − N/2`, so `k = 0` is the all-ground state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Largest emitter count for which the full 2^N product basis may be built.
pub const MAX_SINGLE_EMITTERS: usize = 10;

/// Population of the two highest boson levels above which a state is reported
/// as feeling the truncation.
pub const CUTOFF_WARNING_THRESHOLD: f64 = 1e-6;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinSector {
    /// Symmetric Dicke ladder with S = N/2.
    Collective,
    /// All 2^N product states of N independent spins.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_emitters: usize,
    boson_cutoff: usize,
    sector: SpinSector,
}

impl HilbertSpace {
    pub fn new(n_emitters: usize, boson_cutoff: usize, sector: SpinSector) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::InvalidSpace("at least one emitter is required".into()));
        }
        if boson_cutoff == 0 {
            return Err(Error::InvalidSpace("boson cutoff must be at least 1".into()));
        }
        if sector == SpinSector::Single && n_emitters > MAX_SINGLE_EMITTERS {
            return Err(Error::InvalidSpace(format!(
                "single-spin sector limited to N <= {MAX_SINGLE_EMITTERS}, got {n_emitters}"
            )));
        }
        Ok(Self {
            n_emitters,
            boson_cutoff,
            sector,
        })
    }

    pub fn collective(n_emitters: usize, boson_cutoff: usize) -> Result<Self> {
        Self::new(n_emitters, boson_cutoff, SpinSector::Collective)
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn boson_cutoff(&self) -> usize {
        self.boson_cutoff
    }

    pub fn sector(&self) -> SpinSector {
        self.sector
    }

    pub fn spin_dim(&self) -> usize {
        match self.sector {
            SpinSector::Collective => self.n_emitters + 1,
            SpinSector::Single => 1 << self.n_emitters,
        }
    }

    pub fn boson_dim(&self) -> usize {
        self.boson_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.boson_dim()
    }

    pub fn layout(&self) -> ModeLayout {
        ModeLayout {
            spin_dim: self.spin_dim(),
            boson_dim: self.boson_dim(),
        }
    }

    /// Composite index of spin basis state `spin` with `n` bosons.
    pub fn index(&self, spin: usize, n: usize) -> usize {
        debug_assert!(spin < self.spin_dim() && n < self.boson_dim());
        spin * self.boson_dim() + n
    }
}

/// Factor dimensions of a spin ⊗ boson space; enough to locate boson levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLayout {
    pub spin_dim: usize,
    pub boson_dim: usize,
}

impl ModeLayout {
    /// A bare oscillator with levels `0..=n_max`.
    pub fn oscillator(n_max: usize) -> Self {
        Self {
            spin_dim: 1,
            boson_dim: n_max + 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.spin_dim * self.boson_dim
    }

    pub fn boson_level(&self, index: usize) -> usize {
        index % self.boson_dim
    }
}

/// The operator symbols of the emitter-cavity Hamiltonian as concrete matrices
/// on the full composite space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub sz: ComplexMatrix,
    pub splus: ComplexMatrix,
    pub sminus: ComplexMatrix,
    pub identity: ComplexMatrix,
}

impl OperatorSet {
    pub fn number(&self) -> ComplexMatrix {
        &self.a_dag * &self.a
    }
}

/// Truncated annihilation operator on levels `0..dim`.
pub fn boson_lowering(dim: usize) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Diagonal number operator on levels `0..dim`.
pub fn boson_number(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_fn(dim, |n, _| Complex64::new(n as f64, 0.0)))
}

/// (Sz, S+, S−) on the S = N/2 Dicke ladder, dimension N + 1.
pub fn dicke_operators(n_emitters: usize) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let dim = n_emitters + 1;
    let s = n_emitters as f64 / 2.0;
    let mut sz = ComplexMatrix::zeros(dim, dim);
    let mut splus = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        let m = k as f64 - s;
        sz[(k, k)] = Complex64::new(m, 0.0);
        if k + 1 < dim {
            splus[(k + 1, k)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let sminus = splus.adjoint();
    (sz, splus, sminus)
}

/// Total (Sz, S+, S−) of N independent spins in the 2^N product basis.
/// Bit `i` of a basis index set means emitter `i` is excited.
fn product_spin_operators(n_emitters: usize) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let dim = 1usize << n_emitters;
    let mut sz = ComplexMatrix::zeros(dim, dim);
    let mut splus = ComplexMatrix::zeros(dim, dim);
    for b in 0..dim {
        let up = b.count_ones() as f64;
        sz[(b, b)] = Complex64::new(up - n_emitters as f64 / 2.0, 0.0);
        for i in 0..n_emitters {
            if b & (1 << i) == 0 {
                splus[(b | (1 << i), b)] += ONE;
            }
        }
    }
    let sminus = splus.adjoint();
    (sz, splus, sminus)
}

pub fn build_operator_set(space: &HilbertSpace) -> OperatorSet {
    let (sz, splus, sminus) = match space.sector() {
        SpinSector::Collective => dicke_operators(space.n_emitters()),
        SpinSector::Single => product_spin_operators(space.n_emitters()),
    };
    let spin_id = ComplexMatrix::identity(space.spin_dim(), space.spin_dim());
    let boson_id = ComplexMatrix::identity(space.boson_dim(), space.boson_dim());
    let a_local = boson_lowering(space.boson_dim());

    let a = tensor_product(&spin_id, &a_local);
    let a_dag = a.adjoint();
    OperatorSet {
        a,
        a_dag,
        sz: tensor_product(&sz, &boson_id),
        splus: tensor_product(&splus, &boson_id),
        sminus: tensor_product(&sminus, &boson_id),
        identity: ComplexMatrix::identity(space.dim(), space.dim()),
    }
}

/// Kronecker product `A ⊗ B`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entrywise modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Maximum absolute row sum.
pub fn infinity_norm(m: &ComplexMatrix) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part `(m + m†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

/// Trace distance ½‖a − b‖₁ of two Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "trace distance of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    Ok(0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|v| v.abs()).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: ComplexVector,
}

impl StateVector {
    /// Wraps amplitudes as given; the norm must be finite and positive.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState(format!(
                "state norm {norm} is not positive and finite"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let mut psi = Self::new(amplitudes)?;
        psi.normalize();
        Ok(psi)
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::normalized(ComplexVector::from_column_slice(amplitudes))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = ComplexVector::zeros(dim);
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    /// Equal-weight superposition of the listed basis states.
    pub fn equal_superposition(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut amplitudes = ComplexVector::zeros(dim);
        for &i in indices {
            if i >= dim {
                return Err(Error::InvalidState(format!("basis index {i} outside dimension {dim}")));
            }
            amplitudes[i] = ONE;
        }
        Self::normalized(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }

    /// Rescales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> f64 {
        let norm = self.norm();
        self.amplitudes /= Complex64::new(norm, 0.0);
        norm
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn into_inner(self) -> ComplexVector {
        self.amplitudes
    }

    /// ⟨ψ|O|ψ⟩ / ⟨ψ|ψ⟩.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        self.amplitudes.dotc(&(op * &self.amplitudes)) / self.amplitudes.norm_squared()
    }

    pub fn projector(&self) -> ComplexMatrix {
        let psi = &self.amplitudes / Complex64::new(self.norm(), 0.0);
        &psi * psi.adjoint()
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps a square matrix with finite entries. No positivity check; use
    /// [`validate_density_matrix`] for that.
    pub fn from_matrix(entries: ComplexMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Shape(format!(
                "density matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("density matrix has non-finite entries".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self {
            entries: psi.projector(),
        }
    }

    /// Diagonal state with the given populations (renormalised).
    pub fn from_populations(populations: &[f64]) -> Result<Self> {
        let total: f64 = populations.iter().sum();
        if populations.iter().any(|p| *p < 0.0 || !p.is_finite()) || total <= 0.0 {
            return Err(Error::InvalidState(
                "populations must be non-negative with positive sum".into(),
            ));
        }
        let diag = ComplexVector::from_iterator(
            populations.len(),
            populations.iter().map(|p| Complex64::new(p / total, 0.0)),
        );
        Ok(Self {
            entries: ComplexMatrix::from_diagonal(&diag),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Re tr(ρ O).
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        (op * &self.entries).trace().re
    }

    /// Divides by the trace and returns the trace before rescaling.
    pub fn normalize_trace(&mut self) -> Complex64 {
        let tr = self.trace();
        self.entries /= tr;
        tr
    }

    pub fn von_neumann_entropy(&self) -> f64 {
        hermitian_eigenvalues(&self.entries)
            .into_iter()
            .filter(|p| *p > 1e-15)
            .map(|p| -p * p.ln())
            .sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    pub fn validate(&self) -> Diagnostics {
        diagnostics(&self.entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    pub fn passes(&self, tol: f64) -> bool {
        self.hermiticity_defect <= tol && self.trace_defect <= tol && self.min_eigenvalue >= -tol
    }

    pub fn worst_defect(&self) -> f64 {
        self.hermiticity_defect
            .max(self.trace_defect)
            .max((-self.min_eigenvalue).max(0.0))
    }
}

fn diagnostics(rho: &ComplexMatrix) -> Diagnostics {
    Diagnostics {
        hermiticity_defect: hermiticity_defect(rho),
        trace_defect: (rho.trace() - ONE).norm(),
        min_eigenvalue: hermitian_eigenvalues(rho).first().copied().unwrap_or(0.0),
    }
}

/// Hermiticity, trace and positivity defects of a candidate density matrix.
/// The caller decides what tolerance counts as valid.
pub fn validate_density_matrix(rho: &ComplexMatrix) -> Result<Diagnostics> {
    if !rho.is_square() {
        return Err(Error::Shape(format!(
            "density matrix must be square, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    Ok(diagnostics(rho))
}

/// Total population of the top `levels` boson levels.
pub fn boson_tail_population(rho: &ComplexMatrix, layout: ModeLayout, levels: usize) -> f64 {
    let first = layout.boson_dim.saturating_sub(levels);
    (0..rho.nrows())
        .filter(|&i| layout.boson_level(i) >= first)
        .map(|i| rho[(i, i)].re)
        .sum()
}

/// Same as [`boson_tail_population`] for a pure state.
pub fn boson_tail_population_pure(psi: &StateVector, layout: ModeLayout, levels: usize) -> f64 {
    let first = layout.boson_dim.saturating_sub(levels);
    let norm2 = psi.amplitudes().norm_squared();
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| layout.boson_level(*i) >= first)
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        / norm2
}

/// Message when the two highest boson levels hold more than
/// [`CUTOFF_WARNING_THRESHOLD`] of the population.
pub fn cutoff_warning(rho: &ComplexMatrix, layout: ModeLayout) -> Option<String> {
    let tail = boson_tail_population(rho, layout, 2);
    (tail > CUTOFF_WARNING_THRESHOLD).then(|| {
        format!(
            "boson cutoff n_max = {} reached: top two levels hold population {tail:.3e}",
            layout.boson_dim - 1
        )
    })
}

pub(crate) fn complex(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
