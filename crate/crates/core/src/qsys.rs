//! Three-qubit states and subsystem operations.
//!
//! Basis convention used everywhere in the crate: qubit 1 is the most
//! significant bit, so `|q1 q2 q3>` sits at index `4*q1 + 2*q2 + q3`.
//! Qubits are addressed by their 1-based labels.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, C64, ZERO};

pub const DIM: usize = 8;
const NORM_TOL: f64 = 1e-12;
/// Default tolerance for the density-matrix invariants.
pub const STATE_TOL: f64 = 1e-10;

/// Bit position (0 = least significant) of a 1-based qubit label.
fn bit(qubit: usize) -> Result<usize> {
    match qubit {
        1..=3 => Ok(3 - qubit),
        other => Err(Error::BadIndex(other)),
    }
}

/// Normalized three-qubit state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: [C64; DIM],
}

impl PureState {
    pub fn new(amplitudes: [C64; DIM]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state `|index>`.
    pub fn basis(index: usize) -> Self {
        let mut amplitudes = [ZERO; DIM];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// `(|000> + |111>) / sqrt(2)`.
pub fn make_ghz() -> PureState {
    let mut amplitudes = [ZERO; DIM];
    amplitudes[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[7] = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState { amplitudes }
}

/// `(sqrt(2)|001> + |010> + |100>) / 2`; the excitation on qubit 3 carries
/// twice the weight of the other two.
pub fn make_w() -> PureState {
    let mut amplitudes = [ZERO; DIM];
    amplitudes[1] = C64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[2] = C64::new(0.5, 0.0);
    amplitudes[4] = C64::new(0.5, 0.0);
    PureState { amplitudes }
}

/// Initial states the crate knows how to evolve in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InitialState {
    Ghz,
    W,
}

impl InitialState {
    pub fn pure(self) -> PureState {
        match self {
            InitialState::Ghz => make_ghz(),
            InitialState::W => make_w(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitialState::Ghz => "ghz",
            InitialState::W => "w",
        }
    }
}

/// An 8x8 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants at [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STATE_TOL)
    }

    /// Validates Hermiticity, unit trace and positivity at `tol`.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if matrix.rows() != DIM || matrix.cols() != DIM {
            return Err(Error::InvariantViolation(format!(
                "expected 8x8, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = matrix.hermitian_deviation();
        if dev > tol {
            return Err(Error::InvariantViolation(format!(
                "not Hermitian ({dev:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvariantViolation(format!("trace {tr}")));
        }
        let min = hermitian_eigen(&matrix.hermitian_part())?.min();
        if min < -tol {
            return Err(Error::InvariantViolation(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix without checking; callers guarantee the invariants.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: ComplexMatrix::identity(DIM).scale_real(1.0 / DIM as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(&self.matrix)?.values)
    }
}

/// Reduced 2x2 state of a single qubit; the other two are traced out.
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<ComplexMatrix> {
    let b = bit(keep)?;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..DIM {
        for j in 0..DIM {
            // the traced-out bits must agree
            if (i ^ j) & !(1 << b) & (DIM - 1) != 0 {
                continue;
            }
            out[((i >> b) & 1, (j >> b) & 1)] += m[(i, j)];
        }
    }
    Ok(out)
}

/// Transposes the indices of one qubit, leaving the others untouched.
pub fn partial_transpose(rho: &DensityMatrix, qubit: usize) -> Result<ComplexMatrix> {
    let b = bit(qubit)?;
    let m = rho.matrix();
    let mask = 1 << b;
    Ok(ComplexMatrix::from_fn(DIM, DIM, |i, j| {
        // swap bit b between the row and column index
        let (bi, bj) = (i & mask, j & mask);
        m[((i & !mask) | bj, (j & !mask) | bi)]
    }))
}

/// Checks that `perm` is a bijection on `{1, 2, 3}`.
pub fn validate_permutation(perm: [usize; 3]) -> Result<()> {
    let mut seen = [false; 3];
    for &p in &perm {
        if !(1..=3).contains(&p) || seen[p - 1] {
            return Err(Error::BadPermutation(perm));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

/// Basis index after relabeling `|q1 q2 q3> -> |q_perm(1) q_perm(2) q_perm(3)>`.
fn permuted_index(index: usize, perm: [usize; 3]) -> usize {
    let qubit_value = |q: usize| (index >> (3 - q)) & 1;
    (qubit_value(perm[0]) << 2) | (qubit_value(perm[1]) << 1) | qubit_value(perm[2])
}

/// Reorders the qubits so that new position `j` holds old qubit `perm[j]`.
pub fn permute_qubits(rho: &DensityMatrix, perm: [usize; 3]) -> Result<DensityMatrix> {
    validate_permutation(perm)?;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(DIM, DIM);
    for i in 0..DIM {
        for j in 0..DIM {
            out[(permuted_index(i, perm), permuted_index(j, perm))] = m[(i, j)];
        }
    }
    Ok(DensityMatrix::new_unchecked(out))
}

/// Inverse of a valid permutation.
pub fn inverse_permutation(perm: [usize; 3]) -> Result<[usize; 3]> {
    validate_permutation(perm)?;
    let mut inv = [0; 3];
    for (j, &p) in perm.iter().enumerate() {
        inv[p - 1] = j + 1;
    }
    Ok(inv)
}

/// A split of the three qubits into a pair and a singleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BipartiteCut {
    /// qubits 1,2 against 3
    Cut12_3,
    /// qubits 1,3 against 2
    Cut13_2,
    /// qubits 2,3 against 1
    Cut23_1,
}

impl BipartiteCut {
    pub const ALL: [BipartiteCut; 3] = [
        BipartiteCut::Cut12_3,
        BipartiteCut::Cut13_2,
        BipartiteCut::Cut23_1,
    ];

    /// Qubit order that puts the paired qubits in the leading four-dimensional factor.
    pub fn permutation(self) -> [usize; 3] {
        match self {
            BipartiteCut::Cut12_3 => [1, 2, 3],
            BipartiteCut::Cut13_2 => [1, 3, 2],
            BipartiteCut::Cut23_1 => [2, 3, 1],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BipartiteCut::Cut12_3 => "12|3",
            BipartiteCut::Cut13_2 => "13|2",
            BipartiteCut::Cut23_1 => "23|1",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn projector(index: usize) -> DensityMatrix {
        PureState::basis(index).density()
    }

    /// Random density matrix a a^H / tr(a a^H).
    fn random_rho(entries: &[f64]) -> DensityMatrix {
        let a = ComplexMatrix::from_fn(DIM, DIM, |i, j| {
            let k = 2 * (i * DIM + j);
            C64::new(entries[k], entries[k + 1])
        });
        let m = &a * &a.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
    }

    #[test]
    fn ghz_amplitudes() {
        let ghz = make_ghz();
        let h = FRAC_1_SQRT_2;
        for (i, a) in ghz.amplitudes().iter().enumerate() {
            let want = if i == 0 || i == 7 { h } else { 0.0 };
            assert_eq!(*a, C64::new(want, 0.0));
        }
        assert!((ghz.norm() - 1.0).abs() < 1e-15);
        let rho = ghz.density();
        let nonzero: Vec<_> = rho
            .matrix()
            .as_slice()
            .iter()
            .filter(|z| z.norm() > 0.0)
            .collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|z| (z.re - 0.5).abs() < 1e-15));
    }

    #[test]
    fn w_amplitudes() {
        let w = make_w();
        let want = [0.0, FRAC_1_SQRT_2, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0];
        for (a, b) in w.amplitudes().iter().zip(want) {
            assert_eq!(*a, C64::new(b, 0.0));
        }
        assert!((w.norm() - 1.0).abs() < 1e-15);
        assert_eq!(make_ghz().inner(&w), ZERO);
    }

    #[test]
    fn rejects_unnormalized_vector() {
        let mut amps = [ZERO; DIM];
        amps[0] = C64::new(2.0, 0.0);
        assert!(matches!(
            PureState::new(amps),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn constructors_satisfy_invariants() {
        for psi in [make_ghz(), make_w()] {
            DensityMatrix::new(psi.density().into_matrix()).unwrap();
        }
        DensityMatrix::new(DensityMatrix::maximally_mixed().into_matrix()).unwrap();
    }

    #[test]
    fn invalid_density_matrices_are_rejected() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(8)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25)).is_err());
        let neg = ComplexMatrix::diag(&[1.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let half = ComplexMatrix::diag(&[0.5, 0.5]);
        let ghz = make_ghz().density();
        assert!(partial_trace(&ghz, 3).unwrap().distance(&half) < 1e-15);
        let r = partial_trace(&projector(0), 1).unwrap();
        assert!(r.distance(&ComplexMatrix::diag(&[1.0, 0.0])) < 1e-15);
        let w = make_w().density();
        assert!(partial_trace(&w, 3).unwrap().distance(&half) < 1e-15);
        // qubits 1 and 2 carry a quarter of the excitation each
        let q1 = ComplexMatrix::diag(&[0.75, 0.25]);
        assert!(partial_trace(&w, 1).unwrap().distance(&q1) < 1e-15);
        assert!(partial_trace(&w, 2).unwrap().distance(&q1) < 1e-15);
        assert!(matches!(partial_trace(&w, 4), Err(Error::BadIndex(4))));
        assert!(matches!(partial_trace(&w, 0), Err(Error::BadIndex(0))));
    }

    #[test]
    fn partial_transpose_examples() {
        let p = projector(0);
        assert_eq!(&partial_transpose(&p, 2).unwrap(), p.matrix());
        let ghz = make_ghz().density();
        let pt = partial_transpose(&ghz, 3).unwrap();
        let eig = hermitian_eigen(&pt).unwrap();
        assert!((eig.min() + 0.5).abs() < 1e-12);
        assert!(matches!(
            partial_transpose(&ghz, 7),
            Err(Error::BadIndex(7))
        ));
    }

    #[test]
    fn permutation_examples() {
        let p = projector(0b001);
        let moved = permute_qubits(&p, [2, 3, 1]).unwrap();
        assert_eq!(moved, projector(0b010));
        let w = make_w().density();
        assert_eq!(permute_qubits(&w, [1, 2, 3]).unwrap(), w);
        assert!(matches!(
            permute_qubits(&w, [1, 1, 2]),
            Err(Error::BadPermutation(_))
        ));
        assert!(matches!(
            permute_qubits(&w, [0, 1, 2]),
            Err(Error::BadPermutation(_))
        ));
        assert_eq!(inverse_permutation([2, 3, 1]).unwrap(), [3, 1, 2]);
    }

    #[test]
    fn cut_permutations_are_bijections() {
        for cut in BipartiteCut::ALL {
            validate_permutation(cut.permutation()).unwrap();
        }
    }

    fn rho_entries() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, 2 * DIM * DIM)
    }

    fn perms() -> impl Strategy<Value = [usize; 3]> {
        prop::sample::select(vec![
            [1, 2, 3],
            [1, 3, 2],
            [2, 1, 3],
            [2, 3, 1],
            [3, 1, 2],
            [3, 2, 1],
        ])
    }

    proptest! {
        #[test]
        fn marginals_have_unit_trace(e in rho_entries(), q in 1usize..=3) {
            let rho = random_rho(&e);
            let r = partial_trace(&rho, q).unwrap();
            prop_assert!((r.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(r.hermitian_deviation() < 1e-12);
        }

        #[test]
        fn partial_transpose_is_hermitian_involution(e in rho_entries(), q in 1usize..=3) {
            let rho = random_rho(&e);
            let pt = partial_transpose(&rho, q).unwrap();
            prop_assert!((pt.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(pt.hermitian_deviation() < 1e-12);
            let back = partial_transpose(&DensityMatrix::new_unchecked(pt), q).unwrap();
            prop_assert_eq!(&back, rho.matrix());
        }

        #[test]
        fn permutation_round_trip_and_spectrum(e in rho_entries(), perm in perms()) {
            let rho = random_rho(&e);
            let moved = permute_qubits(&rho, perm).unwrap();
            let back = permute_qubits(&moved, inverse_permutation(perm).unwrap()).unwrap();
            prop_assert_eq!(&back, &rho);
            let (a, b) = (rho.spectrum().unwrap(), moved.spectrum().unwrap());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
            prop_assert!((moved.trace() - 1.0).abs() < 1e-10);
        }
    }
}
