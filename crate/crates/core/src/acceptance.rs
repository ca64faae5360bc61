//! End-to-end checks of the published decay laws, shared by the `verify`
//! subcommand and the `acceptance` test target.

use std::fmt;
use std::time::Instant;

use crate::channels::{evolve_analytic, evolve_numeric, ChannelKind, ChannelSpec};
use crate::cli::{render_curve, CurveMode, RunConfig};
use crate::convexroof::{roof_minimize, RoofSettings};
use crate::error::Result;
use crate::linalg::numerical_rank;
use crate::measures::{pure_c3, tau3, tau3_raw, Family};
use crate::qsys::{make_ghz, make_w, InitialState};
use crate::separability::ppt_report;

/// Knobs a verification run may override.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcceptanceConfig {
    /// RK4 step for the integrator comparison.
    pub dt: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            seed: 20100,
            restarts: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{status}] {:>2} {}: {}",
            self.id, self.name, self.detail
        )
    }
}

const ALL_STATES: [InitialState; 2] = [InitialState::Ghz, InitialState::W];

/// 50 points spanning `[0, 1.5]`.
fn standard_grid() -> Vec<f64> {
    (0..50).map(|i| 1.5 * i as f64 / 49.0).collect()
}

fn outcome(id: usize, name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CheckOutcome {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Largest deviation of the normalized bound from `expected` over `grid`.
fn max_closed_form_error(
    state: InitialState,
    kind: ChannelKind,
    grid: &[f64],
    expected: impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    let mut worst = (0.0, 0.0);
    for &kt in grid {
        let rho = evolve_analytic(state, kind, kt)?;
        let err = (tau3(&rho, state.into())?.normalized - expected(kt)).abs();
        if err > worst.0 {
            worst = (err, kt);
        }
    }
    Ok(worst)
}

fn closed_form_check(
    id: usize,
    name: &'static str,
    state: InitialState,
    kind: ChannelKind,
    tol: f64,
    extra_points: &[f64],
    expected: impl Fn(f64) -> f64,
) -> CheckOutcome {
    let mut grid = standard_grid();
    grid.extend_from_slice(extra_points);
    let result = max_closed_form_error(state, kind, &grid, expected).map(|(err, kt)| {
        (
            err <= tol,
            format!("max |error| {err:.3e} at kt={kt:.4} (tol {tol:.0e})"),
        )
    });
    outcome(id, name, result)
}

/// Root of an increasing function on `[lo, hi]` by bisection.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn check_ghz_dephasing() -> CheckOutcome {
    closed_form_check(
        1,
        "GHZ pauli-z decays as exp(-6kt)",
        InitialState::Ghz,
        ChannelKind::PauliZ,
        1e-10,
        &[],
        |kt| (-6.0 * kt).exp(),
    )
}

pub fn check_ghz_bit_flip() -> CheckOutcome {
    closed_form_check(
        2,
        "GHZ pauli-x decays as exp(-4kt)",
        InitialState::Ghz,
        ChannelKind::PauliX,
        1e-10,
        &[],
        |kt| (-4.0 * kt).exp(),
    )
}

/// Time at which the GHZ pauli-y bound reaches zero.
pub fn ghz_pauli_y_death_time() -> f64 {
    let x = bisect(|x| 3.0 * x + x * x + x * x * x - 1.0, 0.0, 1.0);
    -x.ln() / 2.0
}

/// Time at which the GHZ depolarizing bound reaches zero.
pub fn ghz_depolarizing_death_time() -> f64 {
    let u = bisect(|u| 4.0 * u * u * u + u * u - 1.0, 0.0, 1.0);
    -u.ln() / 4.0
}

pub fn check_ghz_pauli_y() -> CheckOutcome {
    let t0 = ghz_pauli_y_death_time();
    closed_form_check(
        3,
        "GHZ pauli-y closed form with finite-time death",
        InitialState::Ghz,
        ChannelKind::PauliY,
        1e-9,
        &[t0 - 1e-3, t0 + 1e-6, t0 + 1e-3, t0 + 0.5],
        |kt| {
            let x = (-2.0 * kt).exp();
            (0.25 * (3.0 * x + x * x + x * x * x - 1.0)).max(0.0)
        },
    )
}

pub fn check_ghz_depolarizing() -> CheckOutcome {
    let t0 = ghz_depolarizing_death_time();
    closed_form_check(
        4,
        "GHZ depolarizing closed form with finite-time death",
        InitialState::Ghz,
        ChannelKind::Depolarizing,
        1e-9,
        &[t0 - 1e-3, t0 + 1e-6, t0 + 1e-3, t0 + 0.5],
        |kt| {
            let u = (-4.0 * kt).exp();
            (0.25 * (4.0 * u * u * u + u * u - 1.0)).max(0.0)
        },
    )
}

pub fn check_w_dephasing() -> CheckOutcome {
    closed_form_check(
        5,
        "W pauli-z decays as exp(-4kt)",
        InitialState::W,
        ChannelKind::PauliZ,
        1e-10,
        &[],
        |kt| (-4.0 * kt).exp(),
    )
}

pub fn check_w_x_y_agree() -> CheckOutcome {
    let result = (|| {
        let mut worst: f64 = 0.0;
        for kt in standard_grid() {
            let x = tau3_raw(&evolve_analytic(InitialState::W, ChannelKind::PauliX, kt)?)?;
            let y = tau3_raw(&evolve_analytic(InitialState::W, ChannelKind::PauliY, kt)?)?;
            worst = worst.max((x - y).abs());
        }
        Ok((
            worst <= 1e-10,
            format!("max |difference| {worst:.3e} (tol 1e-10)"),
        ))
    })();
    outcome(6, "W pauli-x and pauli-y bounds coincide", result)
}

pub fn check_ordering() -> CheckOutcome {
    let result = (|| {
        let mut violations = Vec::new();
        for kt in standard_grid().into_iter().filter(|&kt| kt > 0.0) {
            for kind in ChannelKind::ALL {
                let g =
                    tau3(&evolve_analytic(InitialState::Ghz, kind, kt)?, Family::Ghz)?.normalized;
                let w = tau3(&evolve_analytic(InitialState::W, kind, kt)?, Family::W)?.normalized;
                let ok = match kind {
                    ChannelKind::PauliZ => w > g,
                    _ => (g <= 0.0 && w <= 0.0) || g >= w,
                };
                if !ok {
                    violations.push(format!("{kind} kt={kt:.4} ghz={g:.6} w={w:.6}"));
                }
            }
        }
        let detail = if violations.is_empty() {
            "W above GHZ for pauli-z, GHZ at or above W elsewhere".to_string()
        } else {
            format!("violations: {}", violations.join("; "))
        };
        Ok((violations.is_empty(), detail))
    })();
    outcome(7, "robustness ordering between GHZ and W", result)
}

pub fn check_integrator(dt: f64) -> CheckOutcome {
    let result = (|| {
        let start = Instant::now();
        let mut worst: (f64, String) = (0.0, String::new());
        for state in ALL_STATES {
            for kind in ChannelKind::ALL {
                let spec = ChannelSpec::new(kind, 1.0)?;
                let rho0 = state.pure().density();
                for kt in [0.1, 0.5, 1.0] {
                    let numeric = evolve_numeric(&rho0, &spec, kt, dt)?;
                    let analytic = evolve_analytic(state, kind, kt)?;
                    let err = numeric.matrix().distance(analytic.matrix());
                    if err > worst.0 {
                        worst = (err, format!("{}/{kind} kt={kt}", state.name()));
                    }
                }
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        let passed = worst.0 <= 1e-7 && elapsed <= 10.0;
        Ok((
            passed,
            format!(
                "max Frobenius error {:.3e} ({}), {elapsed:.2} s",
                worst.0, worst.1
            ),
        ))
    })();
    outcome(8, "RK4 reproduces every closed-form matrix", result)
}

/// Expected numerical rank of each evolved state at positive times.
pub fn expected_rank(state: InitialState, kind: ChannelKind) -> usize {
    match (state, kind) {
        (InitialState::Ghz, ChannelKind::PauliZ) => 2,
        (InitialState::Ghz, ChannelKind::PauliX) => 4,
        (InitialState::W, ChannelKind::PauliZ) => 3,
        _ => 8,
    }
}

pub fn check_ranks() -> CheckOutcome {
    let result = (|| {
        let mut mismatches = Vec::new();
        for state in ALL_STATES {
            for kind in ChannelKind::ALL {
                for kt in [0.1, 1.0] {
                    let rank = numerical_rank(evolve_analytic(state, kind, kt)?.matrix(), None)?;
                    let want = expected_rank(state, kind);
                    if rank != want {
                        mismatches
                            .push(format!("{}/{kind} kt={kt}: {rank} != {want}", state.name()));
                    }
                }
            }
        }
        let detail = if mismatches.is_empty() {
            "all ranks as expected".to_string()
        } else {
            mismatches.join("; ")
        };
        Ok((mismatches.is_empty(), detail))
    })();
    outcome(9, "numerical ranks of evolved states", result)
}

/// Low-rank states whose convex roof is compared with the bound.
pub const ROOF_POINTS: [(InitialState, ChannelKind, f64); 7] = [
    (InitialState::Ghz, ChannelKind::PauliZ, 0.1),
    (InitialState::Ghz, ChannelKind::PauliZ, 0.3),
    (InitialState::Ghz, ChannelKind::PauliZ, 0.6),
    (InitialState::Ghz, ChannelKind::PauliX, 0.1),
    (InitialState::Ghz, ChannelKind::PauliX, 0.3),
    (InitialState::W, ChannelKind::PauliZ, 0.1),
    (InitialState::W, ChannelKind::PauliZ, 0.3),
];

pub fn check_roof(seed: u64, restarts: usize) -> CheckOutcome {
    let result = (|| {
        let start = Instant::now();
        let settings = RoofSettings {
            seed,
            restarts,
            ..RoofSettings::default()
        };
        let mut worst: (f64, String) = (0.0, String::new());
        for (state, kind, kt) in ROOF_POINTS {
            let rho = evolve_analytic(state, kind, kt)?;
            let bound = tau3(&rho, state.into())?.normalized;
            let roof = roof_minimize(&rho, state.into(), &settings)?.value_normalized;
            let gap = (roof - bound).abs();
            if gap >= worst.0 {
                worst = (gap, format!("{}/{kind} kt={kt}", state.name()));
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        let passed = worst.0 <= 5e-3 && elapsed <= 300.0;
        Ok((
            passed,
            format!(
                "max |roof - bound| {:.3e} ({}), {elapsed:.1} s",
                worst.0, worst.1
            ),
        ))
    })();
    outcome(10, "convex roof coincides with the bound", result)
}

pub fn check_ppt_persistence() -> CheckOutcome {
    let result = (|| {
        let mut ppt_points = Vec::new();
        for state in ALL_STATES {
            for kind in ChannelKind::ALL {
                for kt in [0.25, 0.5, 1.0, 2.0] {
                    let report = ppt_report(&evolve_analytic(state, kind, kt)?)?;
                    if !report.npt {
                        ppt_points.push(format!(
                            "{}/{kind} kt={kt} (min {:.4})",
                            state.name(),
                            report.min_eigenvalue()
                        ));
                    }
                }
            }
        }
        let detail = if ppt_points.is_empty() {
            "every sampled state is NPT".to_string()
        } else {
            format!("PPT at {}", ppt_points.join(", "))
        };
        Ok((ppt_points.is_empty(), detail))
    })();
    outcome(11, "partial transpose stays negative", result)
}

pub fn check_pure_anchors() -> CheckOutcome {
    let result = (|| {
        let checks = [
            ("C3(GHZ)", pure_c3(&make_ghz()), 0.5f64.sqrt()),
            ("C3(W)", pure_c3(&make_w()), (3.0f64 / 8.0).sqrt()),
            ("raw bound(GHZ)", tau3_raw(&make_ghz().density())?, 1.0),
            (
                "raw bound(W)",
                tau3_raw(&make_w().density())?,
                3.0f64.sqrt() / 2.0,
            ),
        ];
        let failures: Vec<String> = checks
            .iter()
            .filter(|(_, got, want)| (got - want).abs() > 1e-12)
            .map(|(name, got, want)| format!("{name} = {got:.12} != {want:.12}"))
            .collect();
        let detail = if failures.is_empty() {
            "all anchors match".to_string()
        } else {
            failures.join("; ")
        };
        Ok((failures.is_empty(), detail))
    })();
    outcome(12, "pure-state anchors", result)
}

pub fn check_curve_determinism() -> CheckOutcome {
    let result = (|| {
        let config = RunConfig {
            state: InitialState::W,
            channel: ChannelKind::Depolarizing,
            kt_max: 1.5,
            points: 31,
            mode: CurveMode::Numeric { dt: 1e-2 },
            seed: 0,
            output_path: None,
        };
        let dir = std::env::temp_dir();
        let stem = format!("decolab-determinism-{}", std::process::id());
        let paths = [
            dir.join(format!("{stem}-a.csv")),
            dir.join(format!("{stem}-b.csv")),
        ];
        for path in &paths {
            crate::cli::write_curve(&config, path)?;
        }
        let read = |p: &std::path::Path| {
            std::fs::read(p).map_err(|source| crate::Error::Io {
                path: p.to_path_buf(),
                source,
            })
        };
        let (a, b) = (read(&paths[0])?, read(&paths[1])?);
        for path in &paths {
            let _ = std::fs::remove_file(path);
        }
        let same = a == b && a == render_curve(&config)?.into_bytes();
        Ok((same, format!("{} bytes, identical: {same}", a.len())))
    })();
    outcome(13, "curve output is byte-identical across runs", result)
}

/// Every check in order.
pub fn run_all(config: &AcceptanceConfig) -> Vec<CheckOutcome> {
    vec![
        check_ghz_dephasing(),
        check_ghz_bit_flip(),
        check_ghz_pauli_y(),
        check_ghz_depolarizing(),
        check_w_dephasing(),
        check_w_x_y_agree(),
        check_ordering(),
        check_integrator(config.dt),
        check_ranks(),
        check_roof(config.seed, config.restarts),
        check_ppt_persistence(),
        check_pure_anchors(),
        check_curve_determinism(),
    ]
}
