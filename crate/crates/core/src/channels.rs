//! Noisy channels: Lindblad operators, the dissipative right-hand side, a
//! fixed-step RK4 integrator and the closed-form evolved states.
//!
//! The system Hamiltonian is zero throughout; every channel here is pure
//! dissipation generated by single-qubit Pauli jump operators.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{clamp_psd, hermitian_eigen, kron, pauli, ComplexMatrix, C64, PSD_TOL};
use crate::qsys::{DensityMatrix, InitialState, DIM};

/// Output of the integrator must satisfy the state invariants to this level.
pub const NUMERIC_STATE_TOL: f64 = 1e-6;
/// Largest accepted `k * dt`.
pub const MAX_K_DT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    PauliZ,
    PauliX,
    PauliY,
    Depolarizing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::PauliZ,
        ChannelKind::PauliX,
        ChannelKind::PauliY,
        ChannelKind::Depolarizing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::PauliZ => "pauli-z",
            ChannelKind::PauliX => "pauli-x",
            ChannelKind::PauliY => "pauli-y",
            ChannelKind::Depolarizing => "depolarizing",
        }
    }

    /// Single-qubit Paulis applied to every qubit.
    fn paulis(self) -> Vec<ComplexMatrix> {
        match self {
            ChannelKind::PauliZ => vec![pauli::z()],
            ChannelKind::PauliX => vec![pauli::x()],
            ChannelKind::PauliY => vec![pauli::y()],
            ChannelKind::Depolarizing => vec![pauli::x(), pauli::y(), pauli::z()],
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ChannelKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown channel `{s}`"))
    }
}

/// A channel together with its coupling constant `k` (inverse time).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    kind: ChannelKind,
    k: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::BadCoupling(k));
        }
        Ok(Self { kind, k })
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// Jump operators of one channel, already scaled by `sqrt(k)`.
#[derive(Clone, Debug)]
pub struct LindbladSet {
    pub operators: Vec<ComplexMatrix>,
}

/// `sigma` acting on the 1-based `qubit`, identity elsewhere.
fn embed(sigma: &ComplexMatrix, qubit: usize) -> ComplexMatrix {
    let id = pauli::identity();
    let factors: [&ComplexMatrix; 3] = match qubit {
        1 => [sigma, &id, &id],
        2 => [&id, sigma, &id],
        _ => [&id, &id, sigma],
    };
    kron(&kron(factors[0], factors[1]), factors[2])
}

/// Three operators per Pauli channel, nine for the depolarizing channel,
/// ordered qubit-major (for depolarizing: x, y, z on qubit 1, then qubit 2, ...).
pub fn lindblad_ops(spec: &ChannelSpec) -> LindbladSet {
    let amp = C64::new(spec.k.sqrt(), 0.0);
    let paulis = spec.kind.paulis();
    let operators = (1..=3)
        .flat_map(|q| paulis.iter().map(move |s| embed(s, q).scale(amp)))
        .collect();
    LindbladSet { operators }
}

/// `sum_i L_i rho L_i^H - 1/2 {L_i^H L_i, rho}` for an arbitrary matrix.
pub fn dissipator(rho: &ComplexMatrix, ops: &LindbladSet) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for l in &ops.operators {
        let ld = l.adjoint();
        let ldl = &ld * l;
        let jump = &(l * rho) * &ld;
        let anti = &(&ldl * rho) + &(rho * &ldl);
        out = &(&out + &jump) - &anti.scale_real(0.5);
    }
    out
}

/// Time derivative of `rho` under the master equation with no Hamiltonian.
pub fn lindblad_rhs(rho: &DensityMatrix, ops: &LindbladSet) -> ComplexMatrix {
    dissipator(rho.matrix(), ops)
}

/// The dissipator as a 64x64 superoperator on row-major `vec(rho)`.
///
/// Uses `vec(A X B) = (A kron B^T) vec(X)`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    generator: ComplexMatrix,
}

impl Liouvillian {
    pub fn new(ops: &LindbladSet) -> Self {
        let n = DIM;
        let id = ComplexMatrix::identity(n);
        let mut generator = ComplexMatrix::zeros(n * n, n * n);
        for l in &ops.operators {
            let ldl = &l.adjoint() * l;
            let jump = kron(l, &l.conj());
            let left = kron(&ldl, &id);
            let right = kron(&id, &ldl.transpose());
            generator = &(&generator + &jump) - &(&left + &right).scale_real(0.5);
        }
        Self { generator }
    }

    pub fn apply(&self, vec_rho: &[C64]) -> Vec<C64> {
        self.generator.apply(vec_rho)
    }
}

/// Integrates the master equation with classical RK4 over fixed steps of
/// `dt`, finishing with a shorter step when `t` is not a multiple of `dt`.
/// The result is re-symmetrized and cleaned of roundoff-negative eigenvalues.
pub fn evolve_numeric(
    rho0: &DensityMatrix,
    spec: &ChannelSpec,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::BadTime { t, dt });
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::BadTime { t, dt });
    }
    let k_dt = spec.k * dt;
    if k_dt > MAX_K_DT {
        return Err(Error::StepTooLarge { k_dt });
    }
    if dt > t {
        return Err(Error::BadTime { t, dt });
    }

    let liouvillian = Liouvillian::new(&lindblad_ops(spec));
    let ratio = t / dt;
    let (full_steps, remainder) = if (ratio - ratio.round()).abs() < 1e-9 {
        (ratio.round() as usize, 0.0)
    } else {
        let n = ratio.floor();
        (n as usize, t - n * dt)
    };

    let mut state: Vec<C64> = rho0.matrix().as_slice().to_vec();
    for _ in 0..full_steps {
        state = rk4_step(&liouvillian, &state, dt);
    }
    if remainder > 0.0 {
        state = rk4_step(&liouvillian, &state, remainder);
    }

    let m = ComplexMatrix::from_rows(DIM, DIM, state)?.hermitian_part();
    let m = clamp_roundoff(m)?.hermitian_part();
    DensityMatrix::with_tolerance(m, NUMERIC_STATE_TOL)
}

fn rk4_step(liouvillian: &Liouvillian, y: &[C64], h: f64) -> Vec<C64> {
    let axpy =
        |a: f64, x: &[C64]| -> Vec<C64> { y.iter().zip(x).map(|(y, x)| y + x * a).collect() };
    let k1 = liouvillian.apply(y);
    let k2 = liouvillian.apply(&axpy(h / 2.0, &k1));
    let k3 = liouvillian.apply(&axpy(h / 2.0, &k2));
    let k4 = liouvillian.apply(&axpy(h, &k3));
    y.iter()
        .enumerate()
        .map(|(i, y)| y + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
        .collect()
}

/// Zeroes eigenvalues in `[-PSD_TOL, 0)`; anything more negative is left for
/// the invariant check to reject.
fn clamp_roundoff(m: ComplexMatrix) -> Result<ComplexMatrix> {
    let mut eig = hermitian_eigen(&m)?;
    let min = eig.min();
    if !(-PSD_TOL..0.0).contains(&min) {
        return Ok(m);
    }
    clamp_psd(&mut eig)?;
    Ok(eig.reconstruct())
}

/// Time-dependent scalars of the closed-form solutions, all functions of `kt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticCoefficients {
    /// `1 + 3e^{-4kt}` and `1 - e^{-4kt}` (GHZ, bit flip and bit-phase flip).
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    /// `3e^{-2kt} + e^{-6kt}` and `e^{-2kt} - e^{-6kt}` (GHZ, bit-phase flip).
    pub beta1: f64,
    pub beta2: f64,
    /// GHZ, depolarizing.
    pub alpha_bar_plus: f64,
    pub alpha_bar_minus: f64,
    pub gamma: f64,
    /// W, bit flip / bit-phase flip.
    pub alpha: [f64; 4],
    pub beta_plus: f64,
    pub beta_minus: f64,
    /// W, depolarizing.
    pub alpha_bar: [f64; 4],
    pub beta_bar_plus: f64,
    pub beta_bar_minus: f64,
    pub gamma_bar_plus: f64,
    pub gamma_bar_minus: f64,
}

impl AnalyticCoefficients {
    pub fn at(kt: f64) -> Self {
        let e = |n: f64| (-n * kt).exp();
        let (e2, e4, e6, e8, e12) = (e(2.0), e(4.0), e(6.0), e(8.0), e(12.0));
        Self {
            alpha_plus: 1.0 + 3.0 * e4,
            alpha_minus: 1.0 - e4,
            beta1: 3.0 * e2 + e6,
            beta2: e2 - e6,
            alpha_bar_plus: 1.0 + 3.0 * e8,
            alpha_bar_minus: 1.0 - e8,
            gamma: 4.0 * e12,
            alpha: [
                1.0 + e2 + e4 + e6,
                1.0 + e2 - e4 - e6,
                1.0 - e2 - e4 + e6,
                1.0 - e2 + e4 - e6,
            ],
            beta_plus: 1.0 + e6,
            beta_minus: 1.0 - e6,
            alpha_bar: [
                1.0 + e4 + e8 + e12,
                1.0 + e4 - e8 - e12,
                1.0 - e4 - e8 + e12,
                1.0 - e4 + e8 - e12,
            ],
            beta_bar_plus: 1.0 + e12,
            beta_bar_minus: 1.0 - e12,
            gamma_bar_plus: e8 + e12,
            gamma_bar_minus: e8 - e12,
        }
    }

    pub fn all(&self) -> Vec<f64> {
        let mut v = vec![
            self.alpha_plus,
            self.alpha_minus,
            self.beta1,
            self.beta2,
            self.alpha_bar_plus,
            self.alpha_bar_minus,
            self.gamma,
            self.beta_plus,
            self.beta_minus,
            self.beta_bar_plus,
            self.beta_bar_minus,
            self.gamma_bar_plus,
            self.gamma_bar_minus,
        ];
        v.extend(self.alpha);
        v.extend(self.alpha_bar);
        v
    }
}

/// Real symmetric 8x8 builder: setting (i, j) also sets (j, i).
struct SymBuilder {
    m: [[f64; DIM]; DIM],
}

impl SymBuilder {
    fn new() -> Self {
        Self {
            m: [[0.0; DIM]; DIM],
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.m[i][j] = v;
        self.m[j][i] = v;
    }

    fn finish(self, prefactor: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(DIM, DIM, |i, j| C64::new(self.m[i][j] * prefactor, 0.0))
    }
}

/// Closed-form state at dimensionless time `kt`.
pub fn evolve_analytic(initial: InitialState, kind: ChannelKind, kt: f64) -> Result<DensityMatrix> {
    if !(kt.is_finite() && kt >= 0.0) {
        return Err(Error::BadTime { t: kt, dt: 0.0 });
    }
    let m = analytic_matrix(initial, kind, &AnalyticCoefficients::at(kt), kt);
    DensityMatrix::new(m)
}

pub(crate) fn analytic_matrix(
    initial: InitialState,
    kind: ChannelKind,
    c: &AnalyticCoefficients,
    kt: f64,
) -> ComplexMatrix {
    let mut b = SymBuilder::new();
    match (initial, kind) {
        (InitialState::Ghz, ChannelKind::PauliZ) => {
            b.set(0, 0, 1.0);
            b.set(7, 7, 1.0);
            b.set(0, 7, (-6.0 * kt).exp());
            b.finish(0.5)
        }
        (InitialState::Ghz, ChannelKind::PauliX) | (InitialState::Ghz, ChannelKind::PauliY) => {
            let (corner, anti) = match kind {
                ChannelKind::PauliX => (c.alpha_plus, c.alpha_minus),
                _ => (c.beta1, -c.beta2),
            };
            for i in 0..DIM {
                let diag = if i == 0 || i == 7 {
                    c.alpha_plus
                } else {
                    c.alpha_minus
                };
                b.set(i, i, diag);
            }
            b.set(0, 7, corner);
            for i in 1..4 {
                b.set(i, 7 - i, anti);
            }
            b.finish(1.0 / 8.0)
        }
        (InitialState::Ghz, ChannelKind::Depolarizing) => {
            for i in 0..DIM {
                let diag = if i == 0 || i == 7 {
                    c.alpha_bar_plus
                } else {
                    c.alpha_bar_minus
                };
                b.set(i, i, diag);
            }
            b.set(0, 7, c.gamma);
            b.finish(1.0 / 8.0)
        }
        (InitialState::W, ChannelKind::PauliZ) => {
            let e4 = (-4.0 * kt).exp();
            b.set(1, 1, 2.0);
            b.set(2, 2, 1.0);
            b.set(4, 4, 1.0);
            b.set(1, 2, SQRT_2 * e4);
            b.set(1, 4, SQRT_2 * e4);
            b.set(2, 4, e4);
            b.finish(0.25)
        }
        (InitialState::W, ChannelKind::PauliX) | (InitialState::W, ChannelKind::PauliY) => {
            // + for bit flip, - for bit-phase flip
            let s = if kind == ChannelKind::PauliX {
                1.0
            } else {
                -1.0
            };
            let [a1, a2, a3, a4] = c.alpha;
            b.set(0, 0, 2.0 * a2);
            b.set(1, 1, 2.0 * a1);
            b.set(2, 2, 2.0 * c.beta_plus);
            b.set(3, 3, 2.0 * c.beta_minus);
            b.set(4, 4, 2.0 * c.beta_plus);
            b.set(5, 5, 2.0 * c.beta_minus);
            b.set(6, 6, 2.0 * a4);
            b.set(7, 7, 2.0 * a3);
            b.set(0, 3, s * SQRT_2 * a2);
            b.set(0, 5, s * SQRT_2 * a2);
            b.set(0, 6, s * a2);
            b.set(1, 2, SQRT_2 * a1);
            b.set(1, 4, SQRT_2 * a1);
            b.set(1, 7, s * a3);
            b.set(2, 4, a1);
            b.set(2, 7, s * SQRT_2 * a3);
            b.set(3, 5, a4);
            b.set(3, 6, SQRT_2 * a4);
            b.set(4, 7, s * SQRT_2 * a3);
            b.set(5, 6, SQRT_2 * a4);
            b.finish(1.0 / 16.0)
        }
        (InitialState::W, ChannelKind::Depolarizing) => {
            let [a1, a2, a3, a4] = c.alpha_bar;
            let (gp, gm) = (c.gamma_bar_plus, c.gamma_bar_minus);
            b.set(0, 0, a2);
            b.set(1, 1, a1);
            b.set(2, 2, c.beta_bar_plus);
            b.set(3, 3, c.beta_bar_minus);
            b.set(4, 4, c.beta_bar_plus);
            b.set(5, 5, c.beta_bar_minus);
            b.set(6, 6, a4);
            b.set(7, 7, a3);
            b.set(1, 2, SQRT_2 * gp);
            b.set(1, 4, SQRT_2 * gp);
            b.set(2, 4, gp);
            b.set(3, 5, gm);
            b.set(3, 6, SQRT_2 * gm);
            b.set(5, 6, SQRT_2 * gm);
            b.finish(1.0 / 8.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;
    use crate::qsys::{make_ghz, make_w};

    fn spec(kind: ChannelKind, k: f64) -> ChannelSpec {
        ChannelSpec::new(kind, k).unwrap()
    }

    #[test]
    fn rejects_nonpositive_coupling() {
        assert!(matches!(
            ChannelSpec::new(ChannelKind::PauliZ, 0.0),
            Err(Error::BadCoupling(_))
        ));
        assert!(ChannelSpec::new(ChannelKind::PauliZ, -1.0).is_err());
        assert!(ChannelSpec::new(ChannelKind::PauliZ, f64::NAN).is_err());
    }

    #[test]
    fn channel_names_round_trip() {
        for kind in ChannelKind::ALL {
            assert_eq!(kind.name().parse::<ChannelKind>().unwrap(), kind);
        }
        assert!("pauli-w".parse::<ChannelKind>().is_err());
    }

    #[test]
    fn pauli_z_operators() {
        let ops = lindblad_ops(&spec(ChannelKind::PauliZ, 1.0));
        assert_eq!(ops.operators.len(), 3);
        let id = pauli::identity();
        let z = pauli::z();
        let expected = [
            kron(&kron(&z, &id), &id),
            kron(&kron(&id, &z), &id),
            kron(&kron(&id, &id), &z),
        ];
        for (op, want) in ops.operators.iter().zip(&expected) {
            assert_eq!(op, want);
        }
    }

    #[test]
    fn depolarizing_has_nine_hermitian_operators() {
        let ops = lindblad_ops(&spec(ChannelKind::Depolarizing, 1.0));
        assert_eq!(ops.operators.len(), 9);
        for op in &ops.operators {
            assert_eq!(op.hermitian_deviation(), 0.0);
        }
        // qubit-major: the second operator is sigma_y on qubit 1
        assert_eq!(ops.operators[1], embed(&pauli::y(), 1));
    }

    #[test]
    fn coupling_scales_operators() {
        let ops = lindblad_ops(&spec(ChannelKind::PauliX, 4.0));
        let unit = lindblad_ops(&spec(ChannelKind::PauliX, 1.0));
        for (a, b) in ops.operators.iter().zip(&unit.operators) {
            assert!(a.distance(&b.scale_real(2.0)) < 1e-15);
        }
    }

    #[test]
    fn maximally_mixed_is_a_fixed_point() {
        let rho = DensityMatrix::maximally_mixed();
        for kind in ChannelKind::ALL {
            let d = lindblad_rhs(&rho, &lindblad_ops(&spec(kind, 1.0)));
            assert!(d.frobenius_norm() < 1e-15);
        }
    }

    #[test]
    fn ghz_coherence_decays_at_six_k() {
        let rho = make_ghz().density();
        let d = lindblad_rhs(&rho, &lindblad_ops(&spec(ChannelKind::PauliZ, 1.0)));
        assert!((d[(0, 7)] - C64::new(-3.0, 0.0)).norm() < 1e-14);
        assert!((d[(7, 0)] - C64::new(-3.0, 0.0)).norm() < 1e-14);
        assert!(d.trace().norm() < 1e-15);
    }

    #[test]
    fn rhs_is_hermitian_and_traceless() {
        for psi in [make_ghz(), make_w()] {
            for kind in ChannelKind::ALL {
                let d = lindblad_rhs(&psi.density(), &lindblad_ops(&spec(kind, 0.7)));
                assert!(d.trace().norm() < 1e-12);
                assert!(d.hermitian_deviation() < 1e-12);
            }
        }
    }

    #[test]
    fn superoperator_matches_direct_rhs() {
        let rho = make_w().density();
        for kind in ChannelKind::ALL {
            let ops = lindblad_ops(&spec(kind, 1.3));
            let direct = lindblad_rhs(&rho, &ops);
            let vec = Liouvillian::new(&ops).apply(rho.matrix().as_slice());
            let via = ComplexMatrix::from_rows(DIM, DIM, vec).unwrap();
            assert!(direct.distance(&via) < 1e-13, "{kind}");
        }
    }

    #[test]
    fn zero_time_returns_initial_state() {
        let rho = make_w().density();
        let out = evolve_numeric(&rho, &spec(ChannelKind::PauliY, 1.0), 0.0, 1e-3).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn step_size_is_guarded() {
        let rho = make_ghz().density();
        let err = evolve_numeric(&rho, &spec(ChannelKind::PauliZ, 1.0), 1.0, 0.2).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
        assert!(matches!(
            evolve_numeric(&rho, &spec(ChannelKind::PauliZ, 1.0), 1.0, 0.0),
            Err(Error::BadTime { .. })
        ));
        assert!(matches!(
            evolve_numeric(&rho, &spec(ChannelKind::PauliZ, 1.0), -1.0, 0.01),
            Err(Error::BadTime { .. })
        ));
    }

    #[test]
    fn rk4_matches_ghz_dephasing() {
        let rho = make_ghz().density();
        let out = evolve_numeric(&rho, &spec(ChannelKind::PauliZ, 1.0), 0.5, 1e-3).unwrap();
        let exact = evolve_analytic(InitialState::Ghz, ChannelKind::PauliZ, 0.5).unwrap();
        assert!(out.matrix().distance(exact.matrix()) < 1e-8);
    }

    #[test]
    fn rk4_matches_w_depolarizing() {
        let rho = make_w().density();
        let out = evolve_numeric(&rho, &spec(ChannelKind::Depolarizing, 1.0), 0.3, 1e-3).unwrap();
        let exact = evolve_analytic(InitialState::W, ChannelKind::Depolarizing, 0.3).unwrap();
        assert!(out.matrix().distance(exact.matrix()) < 1e-8);
    }

    #[test]
    fn partial_final_step_and_time_scaling() {
        // k = 2, t = 0.25 is the same kt as k = 1, t = 0.5; 0.25 / 0.003 leaves a remainder
        let rho = make_ghz().density();
        let out = evolve_numeric(&rho, &spec(ChannelKind::PauliX, 2.0), 0.25, 0.003).unwrap();
        let exact = evolve_analytic(InitialState::Ghz, ChannelKind::PauliX, 0.5).unwrap();
        assert!(out.matrix().distance(exact.matrix()) < 1e-8);
    }

    #[test]
    fn analytic_initial_conditions() {
        for initial in [InitialState::Ghz, InitialState::W] {
            let pure = initial.pure().density();
            for kind in ChannelKind::ALL {
                let rho = evolve_analytic(initial, kind, 0.0).unwrap();
                assert!(
                    rho.matrix().distance(pure.matrix()) < 1e-15,
                    "{initial:?} {kind}"
                );
            }
        }
    }

    #[test]
    fn analytic_entries_match_closed_forms() {
        let kt = 0.37;
        let ghz = evolve_analytic(InitialState::Ghz, ChannelKind::PauliZ, kt).unwrap();
        let m = ghz.matrix();
        assert_eq!(m[(0, 0)].re, 0.5);
        assert_eq!(m[(7, 7)].re, 0.5);
        assert!((m[(0, 7)].re - (-6.0 * kt).exp() / 2.0).abs() < 1e-16);
        assert_eq!(m[(0, 7)], m[(7, 0)]);
        let w = evolve_analytic(InitialState::W, ChannelKind::PauliZ, kt).unwrap();
        assert!((w.matrix()[(1, 2)].re - SQRT_2 * (-4.0 * kt).exp() / 4.0).abs() < 1e-16);
    }

    #[test]
    fn ghz_depolarizing_tends_to_maximally_mixed() {
        let rho = evolve_analytic(InitialState::Ghz, ChannelKind::Depolarizing, 60.0).unwrap();
        assert!(
            rho.matrix()
                .distance(DensityMatrix::maximally_mixed().matrix())
                < 1e-15
        );
    }

    #[test]
    fn coefficients_stay_in_range() {
        for i in 0..=400 {
            let kt = i as f64 * 0.025;
            for c in AnalyticCoefficients::at(kt).all() {
                assert!((0.0..=4.0).contains(&c), "kt = {kt}: {c}");
            }
        }
    }

    #[test]
    fn analytic_states_are_valid_on_dense_grid() {
        for i in 0..=100 {
            let kt = i as f64 * 0.1;
            for initial in [InitialState::Ghz, InitialState::W] {
                for kind in ChannelKind::ALL {
                    evolve_analytic(initial, kind, kt).unwrap();
                }
            }
        }
    }

    #[test]
    fn analytic_ranks() {
        let cases = [
            (InitialState::Ghz, ChannelKind::PauliZ, 2),
            (InitialState::Ghz, ChannelKind::PauliX, 4),
            (InitialState::Ghz, ChannelKind::PauliY, 8),
            (InitialState::Ghz, ChannelKind::Depolarizing, 8),
            (InitialState::W, ChannelKind::PauliZ, 3),
            (InitialState::W, ChannelKind::PauliX, 8),
            (InitialState::W, ChannelKind::PauliY, 8),
            (InitialState::W, ChannelKind::Depolarizing, 8),
        ];
        for (initial, kind, rank) in cases {
            for kt in [0.1, 1.0] {
                let rho = evolve_analytic(initial, kind, kt).unwrap();
                assert_eq!(
                    numerical_rank(rho.matrix(), None).unwrap(),
                    rank,
                    "{initial:?} {kind} {kt}"
                );
            }
        }
    }

    #[test]
    fn bit_flip_and_bit_phase_flip_w_share_a_spectrum() {
        for kt in [0.05, 0.3, 1.1] {
            let plus = evolve_analytic(InitialState::W, ChannelKind::PauliX, kt).unwrap();
            let minus = evolve_analytic(InitialState::W, ChannelKind::PauliY, kt).unwrap();
            for (a, b) in plus
                .spectrum()
                .unwrap()
                .iter()
                .zip(&minus.spectrum().unwrap())
            {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn numeric_preserves_trace_for_all_channels() {
        for psi in [make_ghz(), make_w()] {
            for kind in ChannelKind::ALL {
                let out = evolve_numeric(&psi.density(), &spec(kind, 1.0), 2.0, 0.01).unwrap();
                assert!((out.trace() - 1.0).abs() < 1e-9);
                assert_eq!(out.matrix().hermitian_deviation(), 0.0);
            }
        }
    }
}
