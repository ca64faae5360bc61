//! Three-qubit concurrence: the pure-state formula and the lower bound built
//! from bipartite concurrences across the three cuts.
//!
//! The bound needs the spectra of the non-Hermitian products `rho * rho~_i`.
//! Because `rho~_i = S_i rho^* S_i` with `S_i` real symmetric, those spectra
//! coincide with the spectra of the Hermitian PSD matrices
//! `sqrt(rho) rho~_i sqrt(rho)`, which is what gets diagonalized here.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, pauli, psd_sqrt, ComplexMatrix, C64};
use crate::qsys::{
    make_ghz, make_w, partial_trace, permute_qubits, BipartiteCut, DensityMatrix, InitialState,
    PureState,
};

/// Eigenvalues of `sqrt(rho) rho~ sqrt(rho)` below this count as vanishing.
pub const VANISHING_EIGENVALUE: f64 = 1e-12;

/// Index pairs `(k, l)` of the SO(4) generators, 0-based, in enumeration order.
pub const GENERATOR_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `sqrt((3 - tr rho_1^2 - tr rho_2^2 - tr rho_3^2) / 3)`, unnormalized.
pub fn pure_c3(psi: &PureState) -> f64 {
    let rho = psi.density();
    let purity_sum: f64 = (1..=3)
        .map(|q| {
            let r = partial_trace(&rho, q).expect("qubit labels 1..=3 are valid");
            (&r * &r).trace().re
        })
        .sum();
    ((3.0 - purity_sum) / 3.0).max(0.0).sqrt()
}

/// Which initial state a curve is normalized against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Ghz,
    W,
    None,
}

impl From<InitialState> for Family {
    fn from(s: InitialState) -> Self {
        match s {
            InitialState::Ghz => Family::Ghz,
            InitialState::W => Family::W,
        }
    }
}

impl Family {
    fn pure(self) -> Option<PureState> {
        match self {
            Family::Ghz => Some(make_ghz()),
            Family::W => Some(make_w()),
            Family::None => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Ghz => "ghz",
            Family::W => "w",
            Family::None => "none",
        }
    }

    /// `1 / tau3_raw(|psi><psi|)` for the family's pure state, 1 for `None`.
    pub fn tau3_factor(self) -> f64 {
        static GHZ: OnceLock<f64> = OnceLock::new();
        static W: OnceLock<f64> = OnceLock::new();
        let cell = match self {
            Family::Ghz => &GHZ,
            Family::W => &W,
            Family::None => return 1.0,
        };
        *cell.get_or_init(|| {
            let rho = self.pure().expect("family has a pure state").density();
            1.0 / tau3_raw(&rho).expect("pure reference states are well conditioned")
        })
    }

    /// `1 / pure_c3(psi)` for the family's pure state, 1 for `None`.
    pub fn c3_factor(self) -> f64 {
        self.pure().map_or(1.0, |psi| 1.0 / pure_c3(&psi))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ghz" => Ok(Family::Ghz),
            "w" => Ok(Family::W),
            "none" => Ok(Family::None),
            other => Err(format!("unknown state family `{other}`")),
        }
    }
}

/// The SO(2) generator on the single qubit and the six SO(4) generators on
/// the pair.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub l0: ComplexMatrix,
    pub l12: [ComplexMatrix; 6],
}

impl GeneratorSet {
    /// `S_i = L_i (x) L_0`, a real symmetric 8x8 matrix.
    pub fn s(&self, i: usize) -> ComplexMatrix {
        kron(&self.l12[i], &self.l0)
    }
}

/// Sign of the permutation `(a, b, c, d)` of `(0, 1, 2, 3)`, or 0 when an
/// index repeats.
fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `(L_kl)_mn = -i eps_klmn` and `L_0 = sigma_y`.
pub fn generators() -> GeneratorSet {
    let l12 = GENERATOR_PAIRS.map(|(k, l)| {
        ComplexMatrix::from_fn(4, 4, |m, n| C64::new(0.0, -levi_civita([k, l, m, n])))
    });
    GeneratorSet {
        l0: pauli::y(),
        l12,
    }
}

fn cached_s() -> &'static [ComplexMatrix; 6] {
    static S: OnceLock<[ComplexMatrix; 6]> = OnceLock::new();
    S.get_or_init(|| {
        let g = generators();
        std::array::from_fn(|i| g.s(i))
    })
}

/// `S_i rho^* S_i` after permuting `rho` so the cut's pair leads.
/// `i` runs over `1..=6`.
pub fn tilde_rho(rho: &DensityMatrix, cut: BipartiteCut, i: usize) -> Result<ComplexMatrix> {
    if !(1..=6).contains(&i) {
        return Err(Error::BadGeneratorIndex(i));
    }
    let permuted = permute_qubits(rho, cut.permutation())?;
    Ok(sandwich(&cached_s()[i - 1], permuted.matrix()))
}

fn sandwich(s: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    &(s * &rho.conj()) * s
}

/// The six concurrence terms of one cut, with the square-rooted spectra they
/// came from.
#[derive(Clone, Debug, PartialEq)]
pub struct CutBreakdown {
    pub cut: BipartiteCut,
    pub terms: [f64; 6],
    /// Four largest square-rooted eigenvalues per generator, descending.
    pub lambdas: [[f64; 4]; 6],
}

impl CutBreakdown {
    pub fn sum_of_squares(&self) -> f64 {
        self.terms.iter().map(|c| c * c).sum()
    }
}

/// `max(0, l1 - l2 - l3 - l4)` for each generator of the cut.
pub fn cut_terms(rho: &DensityMatrix, cut: BipartiteCut) -> Result<CutBreakdown> {
    let permuted = permute_qubits(rho, cut.permutation())?;
    let root = psd_sqrt(permuted.matrix())?;
    let mut terms = [0.0; 6];
    let mut lambdas = [[0.0; 4]; 6];
    for (i, s) in cached_s().iter().enumerate() {
        let tilde = sandwich(s, permuted.matrix());
        let m = (&(&root * &tilde) * &root).hermitian_part();
        let eig = hermitian_eigen(&m)?;
        let mut lam = [0.0; 4];
        for (slot, &v) in lam.iter_mut().zip(&eig.values) {
            *slot = if v < VANISHING_EIGENVALUE {
                0.0
            } else {
                v.sqrt()
            };
        }
        lambdas[i] = lam;
        terms[i] = (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0);
    }
    Ok(CutBreakdown {
        cut,
        terms,
        lambdas,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tau3Result {
    pub raw: f64,
    pub normalized: f64,
    pub normalization_factor: f64,
    pub per_cut: [CutBreakdown; 3],
}

fn tau3_parts(rho: &DensityMatrix) -> Result<(f64, [CutBreakdown; 3])> {
    let per_cut = [
        cut_terms(rho, BipartiteCut::Cut12_3)?,
        cut_terms(rho, BipartiteCut::Cut13_2)?,
        cut_terms(rho, BipartiteCut::Cut23_1)?,
    ];
    let total: f64 = per_cut.iter().map(CutBreakdown::sum_of_squares).sum();
    Ok(((total / 3.0).sqrt(), per_cut))
}

/// Lower bound without any normalization.
pub fn tau3_raw(rho: &DensityMatrix) -> Result<f64> {
    Ok(tau3_parts(rho)?.0)
}

/// Lower bound, normalized so the family's pure initial state scores 1.
pub fn tau3(rho: &DensityMatrix, family: Family) -> Result<Tau3Result> {
    let (raw, per_cut) = tau3_parts(rho)?;
    let normalization_factor = family.tau3_factor();
    Ok(Tau3Result {
        raw,
        normalized: raw * normalization_factor,
        normalization_factor,
        per_cut,
    })
}
