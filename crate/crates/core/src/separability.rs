//! Peres-Horodecki test across the three single-qubit cuts.

use crate::error::Result;
use crate::linalg::hermitian_eigen;
use crate::qsys::{partial_transpose, BipartiteCut, DensityMatrix};

/// A cut counts as NPT when its partial transpose has an eigenvalue below this.
pub const NPT_THRESHOLD: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptReport {
    /// Smallest partial-transpose eigenvalue, ordered like `BipartiteCut::ALL`.
    pub per_cut_min_eigenvalue: [f64; 3],
    pub npt: bool,
}

impl PptReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.per_cut_min_eigenvalue
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// The singleton side of a cut is the qubit that gets transposed.
fn singleton(cut: BipartiteCut) -> usize {
    cut.permutation()[2]
}

pub fn ppt_report(rho: &DensityMatrix) -> Result<PptReport> {
    let mut per_cut_min_eigenvalue = [0.0; 3];
    for (slot, cut) in per_cut_min_eigenvalue.iter_mut().zip(BipartiteCut::ALL) {
        let pt = partial_transpose(rho, singleton(cut))?;
        *slot = hermitian_eigen(&pt)?.min();
    }
    let npt = per_cut_min_eigenvalue.iter().any(|&m| m < NPT_THRESHOLD);
    Ok(PptReport {
        per_cut_min_eigenvalue,
        npt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{evolve_analytic, ChannelKind};
    use crate::qsys::{make_ghz, make_w, permute_qubits, InitialState, PureState};

    #[test]
    fn ghz_is_npt_on_every_cut() {
        let r = ppt_report(&make_ghz().density()).unwrap();
        assert!(r.npt);
        for m in r.per_cut_min_eigenvalue {
            assert!((m + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_is_ppt() {
        let r = ppt_report(&DensityMatrix::maximally_mixed()).unwrap();
        assert!(!r.npt);
        for m in r.per_cut_min_eigenvalue {
            assert!((m - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_is_ppt() {
        let r = ppt_report(&PureState::basis(5).density()).unwrap();
        assert!(!r.npt);
        assert!(r.min_eigenvalue().abs() < 1e-12);
    }

    #[test]
    fn w_cut_minimum_is_minus_schmidt_product() {
        // Schmidt weights are (1/2, 1/2) across 12|3 and (1/4, 3/4) across the others
        let r = ppt_report(&make_w().density()).unwrap();
        let expected = [-0.5, -(3.0f64).sqrt() / 4.0, -(3.0f64).sqrt() / 4.0];
        for (m, e) in r.per_cut_min_eigenvalue.iter().zip(expected) {
            assert!((m - e).abs() < 1e-12, "{m} vs {e}");
        }
    }

    #[test]
    fn cut_minimum_follows_qubit_relabeling() {
        let rho = evolve_analytic(InitialState::W, ChannelKind::PauliX, 0.2).unwrap();
        let swapped = permute_qubits(&rho, [2, 1, 3]).unwrap();
        let a = ppt_report(&rho).unwrap().per_cut_min_eigenvalue;
        let b = ppt_report(&swapped).unwrap().per_cut_min_eigenvalue;
        // swapping qubits 1 and 2 exchanges the 13|2 and 23|1 cuts
        assert!((a[0] - b[0]).abs() < 1e-12);
        assert!((a[1] - b[2]).abs() < 1e-12);
        assert!((a[2] - b[1]).abs() < 1e-12);
    }
}
