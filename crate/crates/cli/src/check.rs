//! The verification suite behind `dicke-battery check`.
//!
//! Ten independent criteria probe the physics and the plumbing: the
//! short-time amplification table, the weak-drive 4/N law, the global
//! quadratic ceiling, speed-limit violations, the collapse-ratio statistics,
//! envelope tightness, the rate-scaling fit, the classical-field comparison,
//! a brute-force ergotropy oracle, and the determinism/conservation
//! invariants of the sweep. Each returns a [`CriterionResult`] with a
//! one-line quantitative summary; the acceptance-test target drives the same
//! functions, so the CLI and the headless gate cannot disagree.
//!
//! The count and window constants are calibrated to the standard scan
//! ([`SweepConfig::standard`]); running the suite on a modified
//! configuration reports honestly against the same windows.
//!
//! [`SweepConfig::standard`]: dicke_core::sweep::SweepConfig::standard

use std::fmt;

use dicke_core::dynamics::{compute_trajectory, DickeParams, TimeGrid};
use dicke_core::ergotropy::{
    ergotropy_with_levels, mean_energy_with_levels, DensityMatrix,
};
use dicke_core::qsl::{self, CollapsePoint};
use dicke_core::sweep::{self, run_sweep, VIOLATION_SLACK};
use dicke_core::{Complex, Error, SweepConfig64, SweepResult64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one verification criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    /// Stable kebab-case identifier, printed on failure and in reports.
    pub name: &'static str,
    pub passed: bool,
    /// One-line quantitative summary: worst margins, counts, windows.
    pub detail: String,
}

impl CriterionResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}  {:<22} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// One sweep run in parallel and one serial rerun, for the equivalence
/// criterion. Every sweep-backed criterion reads the parallel leg.
pub struct SweepPair {
    pub parallel: SweepResult64,
    pub serial: SweepResult64,
}

/// Run the configured sweep twice: once with `workers` threads through the
/// worker pool (0 = one per core; a request for 1 still goes through the
/// pool so the merge path is exercised) and once on the plain serial path.
pub fn run_sweep_pair(config: &SweepConfig64, workers: usize) -> Result<SweepPair, Error> {
    let pool_workers = if workers == 1 { 0 } else { workers };
    let parallel = run_sweep(config, pool_workers)?;
    let serial = run_sweep(config, 1)?;
    Ok(SweepPair { parallel, serial })
}

/// Run all ten criteria, sharing one sweep pair.
pub fn run_report(config: &SweepConfig64, workers: usize) -> Result<Vec<CriterionResult>, Error> {
    let pair = run_sweep_pair(config, workers)?;
    Ok(report_with_sweeps(&pair))
}

/// The ten criteria in canonical order, against precomputed sweeps.
pub fn report_with_sweeps(pair: &SweepPair) -> Vec<CriterionResult> {
    let sweep = &pair.parallel;
    vec![
        short_time_table(),
        weak_coupling_law(),
        global_bound_certificate(sweep),
        qsl_violations(sweep),
        collapse_statistics_windows(sweep),
        envelope_tightness(sweep),
        fit_slope(sweep),
        classical_field_window(),
        ergotropy_oracle(),
        dynamics_invariants(pair),
    ]
}

// ---------------------------------------------------------------------------
// Reference values.

/// Published short-time amplification coefficients A_num at the standard
/// probe time, one per (N, λ, n̄) cell; cross-validated against an
/// independent implementation before being frozen here. Quoted to four
/// decimals, hence the 0.5% comparison window.
const SHORT_TIME_REFERENCE: [(usize, f64, f64, f64); 36] = [
    (2, 0.1, 1.0, 1.9930),
    (3, 0.1, 1.0, 1.3287),
    (4, 0.1, 1.0, 0.9966),
    (2, 0.1, 5.0, 1.9926),
    (3, 0.1, 5.0, 1.3285),
    (4, 0.1, 5.0, 0.9965),
    (2, 0.1, 10.0, 1.9920),
    (3, 0.1, 10.0, 1.3283),
    (4, 0.1, 10.0, 0.9963),
    (2, 0.3, 1.0, 1.9910),
    (3, 0.3, 1.0, 1.3279),
    (4, 0.3, 1.0, 0.9962),
    (2, 0.3, 5.0, 1.9870),
    (3, 0.3, 5.0, 1.3261),
    (4, 0.3, 5.0, 0.9951),
    (2, 0.3, 10.0, 1.9822),
    (3, 0.3, 10.0, 1.3239),
    (4, 0.3, 10.0, 0.9939),
    (2, 0.5, 1.0, 1.9870),
    (3, 0.5, 1.0, 1.3263),
    (4, 0.5, 1.0, 0.9953),
    (2, 0.5, 5.0, 1.9760),
    (3, 0.5, 5.0, 1.3212),
    (4, 0.5, 5.0, 0.9923),
    (2, 0.5, 10.0, 1.9626),
    (3, 0.5, 10.0, 1.3152),
    (4, 0.5, 10.0, 0.9890),
    (2, 1.0, 1.0, 1.9685),
    (3, 1.0, 1.0, 1.3187),
    (4, 1.0, 1.0, 0.9914),
    (2, 1.0, 5.0, 1.9248),
    (3, 1.0, 5.0, 1.2985),
    (4, 1.0, 5.0, 0.9796),
    (2, 1.0, 10.0, 1.8730),
    (3, 1.0, 10.0, 1.2750),
    (4, 1.0, 10.0, 0.9663),
];

/// Relative window for the tabulated coefficients (they carry 4 decimals).
const SHORT_TIME_REL_TOL: f64 = 5e-3;

/// Weak-drive probe grid: every pair keeps λ²n̄t² < 0.05 at the probe time,
/// well inside the validity window of the quadratic expansion.
const WEAK_COUPLING_PAIRS: [(f64, f64); 11] = [
    (0.1, 1.0),
    (0.1, 2.0),
    (0.1, 5.0),
    (0.1, 10.0),
    (0.2, 1.0),
    (0.2, 2.0),
    (0.2, 5.0),
    (0.2, 10.0),
    (0.3, 1.0),
    (0.3, 2.0),
    (0.3, 5.0),
];

/// Valid-point counts of the published scan; the ±5% window absorbs the
/// unpublished grid spacing.
const EXPECTED_TOTAL_POINTS: f64 = 7797.0;
const EXPECTED_N2_POINTS: f64 = 2032.0;
const COUNT_REL_TOL: f64 = 0.05;

/// Published ratio statistics: minima per battery size sit in
/// [1.00, 1.04], pinned to 1.007 (N = 2) and 1.017 (N = 5) within ±0.01;
/// every median sits at 1.27 ± 0.02. The lower edge leaves room for the
/// 1e-9 violation slack.
const MIN_RATIO_WINDOW: (f64, f64) = (1.0 - 1e-8, 1.04);
const MIN_RATIO_N2: f64 = 1.007;
const MIN_RATIO_N5: f64 = 1.017;
const MIN_RATIO_PIN_TOL: f64 = 0.01;
const MEDIAN_RATIO: f64 = 1.27;
const MEDIAN_RATIO_TOL: f64 = 0.02;

/// Envelope windows: ε targets below this are the tight region where the
/// envelope must touch √ε to 1%.
const ENVELOPE_TIGHT_EPS: f64 = 0.2;
const ENVELOPE_TIGHT_TOL: f64 = 0.01;
/// The loose region is (0.8, 0.94): populated bins must sit in [1.3, 2.3]×√ε.
/// Bins at ε ≥ 0.94 are the reachability edge of the scan — only the
/// strongest couplings still cross there, so the bin height measures grid
/// exhaustion rather than the bound; they are reported but not gated.
const ENVELOPE_LOOSE_EPS: f64 = 0.8;
const ENVELOPE_EDGE_EPS: f64 = 0.94;
const ENVELOPE_LOOSE_WINDOW: (f64, f64) = (1.3, 2.3);

/// Rate-scaling fit: τ*(ε = 0.5) vs 1/Γ_N over the N = 2 points.
const FIT_SLOPE: f64 = 1.86;
const FIT_SLOPE_TOL: f64 = 0.1;
const FIT_SYNTHETIC_TOL: f64 = 1e-6;

/// Sweep-wide conservation gates.
const NORM_DRIFT_TOL: f64 = 1e-9;
const ENERGY_DRIFT_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Criteria.

/// Every tabulated (N, λ, n̄) cell reproduces its published coefficient
/// within 0.5% relative.
pub fn short_time_table() -> CriterionResult {
    let name = "short-time-table";
    let probe = qsl::standard_probe_time();
    let mut worst = 0.0_f64;
    let mut worst_cell = (0usize, 0.0, 0.0);
    for &(n, lambda, n_bar, reference) in &SHORT_TIME_REFERENCE {
        let a_num = match DickeParams::new(n, lambda, n_bar)
            .and_then(|p| qsl::short_time_coefficient_at(&p, probe))
        {
            Ok(a) => a,
            Err(e) => {
                return CriterionResult::new(
                    name,
                    false,
                    format!("cell (N={n}, λ={lambda}, n̄={n_bar}) did not compute: {e}"),
                )
            }
        };
        let rel = ((a_num - reference) / reference).abs();
        if rel > worst {
            worst = rel;
            worst_cell = (n, lambda, n_bar);
        }
    }
    let (n, lambda, n_bar) = worst_cell;
    CriterionResult::new(
        name,
        worst <= SHORT_TIME_REL_TOL,
        format!(
            "36/36 published cells compared at the standard probe; worst {:.3}% \
             at (N={n}, λ={lambda}, n̄={n_bar}), window 0.5%",
            worst * 100.0
        ),
    )
}

/// In the weak-drive window λ²n̄t² < 0.05 the extracted coefficient matches
/// 4/N to 1% for every N ∈ {2..5}.
pub fn weak_coupling_law() -> CriterionResult {
    let name = "weak-coupling-law";
    let probe: f64 = qsl::standard_probe_time();
    let mut worst = 0.0_f64;
    let mut worst_cell = (0usize, 0.0, 0.0);
    let mut cells = 0usize;
    for n in 2..=5usize {
        for &(lambda, n_bar) in &WEAK_COUPLING_PAIRS {
            let drive = lambda * lambda * n_bar * probe * probe;
            if drive >= 0.05 {
                return CriterionResult::new(
                    name,
                    false,
                    format!(
                        "probe grid leaked out of its validity window: \
                         λ²n̄t² = {drive:.3} at (λ={lambda}, n̄={n_bar})"
                    ),
                );
            }
            let a_num = match DickeParams::new(n, lambda, n_bar)
                .and_then(|p| qsl::short_time_coefficient_at(&p, probe))
            {
                Ok(a) => a,
                Err(e) => {
                    return CriterionResult::new(
                        name,
                        false,
                        format!("cell (N={n}, λ={lambda}, n̄={n_bar}) did not compute: {e}"),
                    )
                }
            };
            let a_th = 4.0 / n as f64;
            let rel = ((a_num - a_th) / a_th).abs();
            if rel > worst {
                worst = rel;
                worst_cell = (n, lambda, n_bar);
            }
            cells += 1;
        }
    }
    let (n, lambda, n_bar) = worst_cell;
    CriterionResult::new(
        name,
        worst < 0.01,
        format!(
            "|A_num − 4/N|/(4/N) < 1% on all {cells} weak-drive cells; \
             worst {:.3}% at (N={n}, λ={lambda}, n̄={n_bar})",
            worst * 100.0
        ),
    )
}

/// ε(t) ≤ (4/N)λ²n̄t² + 1e-9 over every trajectory and grid time.
pub fn global_bound_certificate(sweep: &SweepResult64) -> CriterionResult {
    let excess = sweep.max_bound_excess;
    CriterionResult::new(
        "global-bound",
        excess <= VIOLATION_SLACK,
        format!(
            "max ε(t) − (4/N)λ²n̄t² over all {} trajectories × {} grid times: \
             {excess:+.3e} (allowance +1.0e-9)",
            sweep.config.protocol_count(),
            sweep.config.time_grid.n_points()
        ),
    )
}

/// Outcome of scanning collapse points for speed-limit violations.
#[derive(Debug, Clone, Copy)]
pub struct ViolationScan {
    /// Points with X < √ε − 1e-9.
    pub count: usize,
    /// Smallest X − (√ε − 1e-9) margin seen; negative means a violation.
    pub worst_margin: f64,
}

/// Re-derive the violation count from raw points (independently of the
/// statistics the sweep already aggregated). Shared with the
/// `--inject-violation` self-test, so a detector that stopped detecting
/// would be caught.
pub fn scan_violations(points: &[CollapsePoint<f64>]) -> ViolationScan {
    let mut count = 0usize;
    let mut worst_margin = f64::INFINITY;
    for p in points {
        let margin = p.x - (p.eps_target.sqrt() - VIOLATION_SLACK);
        if margin < 0.0 {
            count += 1;
        }
        if margin < worst_margin {
            worst_margin = margin;
        }
    }
    ViolationScan {
        count,
        worst_margin,
    }
}

/// Zero speed-limit violations, and valid-point counts inside the ±5%
/// windows (total ≈ 7797, N = 2 ≈ 2032).
pub fn qsl_violations(sweep: &SweepResult64) -> CriterionResult {
    let scan = scan_violations(&sweep.points);
    let total = sweep.points.len();
    let n2 = sweep
        .points
        .iter()
        .filter(|p| p.n_qubits == 2)
        .count();
    let total_ok = in_count_window(total, EXPECTED_TOTAL_POINTS);
    let n2_ok = in_count_window(n2, EXPECTED_N2_POINTS);
    let clean = scan.count == 0 && sweep.statistics.violation_count == 0;
    CriterionResult::new(
        "qsl-violation",
        clean && total_ok && n2_ok,
        format!(
            "{} violations in {total} valid points (worst margin {:+.3e}); \
             totals {total} vs {EXPECTED_TOTAL_POINTS}±5%, N=2 {n2} vs {EXPECTED_N2_POINTS}±5%",
            scan.count, scan.worst_margin
        ),
    )
}

fn in_count_window(actual: usize, expected: f64) -> bool {
    (actual as f64 - expected).abs() <= expected * COUNT_REL_TOL
}

/// Per-N minima and medians of the collapse ratio sit in their published
/// windows for all four battery sizes.
pub fn collapse_statistics_windows(sweep: &SweepResult64) -> CriterionResult {
    let name = "collapse-statistics";
    let mut mins = Vec::new();
    let mut medians = Vec::new();
    for &n in &[2usize, 3, 4, 5] {
        let Some(stats) = sweep.statistics.per_n.iter().find(|s| s.n_qubits == n) else {
            return CriterionResult::new(
                name,
                false,
                format!("no statistics for N = {n}: the scan produced no valid points there"),
            );
        };
        mins.push(stats.min_ratio);
        medians.push(stats.median_ratio);
    }
    let mins_in_window = mins
        .iter()
        .all(|&m| m >= MIN_RATIO_WINDOW.0 && m <= MIN_RATIO_WINDOW.1);
    let pins_ok = (mins[0] - MIN_RATIO_N2).abs() <= MIN_RATIO_PIN_TOL
        && (mins[3] - MIN_RATIO_N5).abs() <= MIN_RATIO_PIN_TOL;
    let medians_ok = medians
        .iter()
        .all(|&m| (m - MEDIAN_RATIO).abs() <= MEDIAN_RATIO_TOL);
    CriterionResult::new(
        name,
        mins_in_window && pins_ok && medians_ok,
        format!(
            "min ratio per N: {} (window [1.00, 1.04]; N=2 pinned {MIN_RATIO_N2}±{MIN_RATIO_PIN_TOL}, \
             N=5 pinned {MIN_RATIO_N5}±{MIN_RATIO_PIN_TOL}); medians {} (window {MEDIAN_RATIO}±{MEDIAN_RATIO_TOL})",
            brief_list(&mins),
            brief_list(&medians)
        ),
    )
}

fn brief_list(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    format!("{{{}}}", cells.join(", "))
}

/// The lower envelope touches √ε to 1% in the tight region ε < 0.2 (and
/// never dips below it), and populated bins in (0.8, 0.94) spread to
/// 1.3–2.3 × √ε.
pub fn envelope_tightness(sweep: &SweepResult64) -> CriterionResult {
    let name = "envelope-tightness";
    let ratios: Vec<(f64, f64)> = sweep
        .lower_envelope
        .iter()
        .filter(|b| b.count > 0)
        .map(|b| (b.eps, b.x_min / b.eps.sqrt()))
        .collect();
    if ratios.is_empty() {
        return CriterionResult::new(name, false, "empty envelope: no populated bins".into());
    }
    let floor_ok = ratios.iter().all(|&(_, r)| r >= MIN_RATIO_WINDOW.0);
    let tight_min = ratios
        .iter()
        .filter(|&&(eps, _)| eps < ENVELOPE_TIGHT_EPS)
        .map(|&(_, r)| r)
        .fold(f64::INFINITY, f64::min);
    let loose: Vec<f64> = ratios
        .iter()
        .filter(|&&(eps, _)| eps > ENVELOPE_LOOSE_EPS && eps < ENVELOPE_EDGE_EPS)
        .map(|&(_, r)| r)
        .collect();
    let loose_ok = !loose.is_empty()
        && loose
            .iter()
            .all(|&r| r >= ENVELOPE_LOOSE_WINDOW.0 && r <= ENVELOPE_LOOSE_WINDOW.1);
    let edge_max = ratios
        .iter()
        .filter(|&&(eps, _)| eps >= ENVELOPE_EDGE_EPS)
        .map(|&(_, r)| r)
        .fold(0.0_f64, f64::max);
    CriterionResult::new(
        name,
        floor_ok && tight_min <= 1.0 + ENVELOPE_TIGHT_TOL && loose_ok,
        format!(
            "envelope/√ε touches {tight_min:.4} below ε = {ENVELOPE_TIGHT_EPS} \
             (tight window ≤ 1.01, floor ≥ 1); spans {:.3}–{:.3} in ({ENVELOPE_LOOSE_EPS}, \
             {ENVELOPE_EDGE_EPS}) (window [1.3, 2.3]); reachability-edge bins ε ≥ \
             {ENVELOPE_EDGE_EPS} reach {edge_max:.3} (reported, not gated)",
            loose.iter().copied().fold(f64::INFINITY, f64::min),
            loose.iter().copied().fold(0.0_f64, f64::max)
        ),
    )
}

/// A collapse point lying exactly on (or scaled off) the speed limit:
/// τ* = scale·√ε/Γ, so ratio = scale.
fn synthetic_point(eps: f64, gamma: f64, scale: f64) -> CollapsePoint<f64> {
    let tau = scale * eps.sqrt() / gamma;
    CollapsePoint {
        n_qubits: 2,
        lambda: gamma / 2.0,
        n_bar: 2.0,
        eps_target: eps,
        tau_star: tau,
        tau_star_interp: tau,
        tau_qsl: eps.sqrt() / gamma,
        gamma_n: gamma,
        x: gamma * tau,
        ratio: scale,
    }
}

/// The τ*(ε = 0.5) vs 1/Γ_N slope over the N = 2 points is 1.86 ± 0.1, and
/// the same fit on synthetic on-bound data recovers √0.5 to 1e-6.
pub fn fit_slope(sweep: &SweepResult64) -> CriterionResult {
    let name = "fit-slope";
    let Some(&target) = sweep
        .config
        .eps_grid
        .iter()
        .min_by(|a, b| {
            (*a - 0.5)
                .abs()
                .partial_cmp(&(*b - 0.5).abs())
                .expect("grid values are finite")
        })
    else {
        return CriterionResult::new(name, false, "empty ε grid".into());
    };
    let n2_points: Vec<CollapsePoint<f64>> = sweep
        .points
        .iter()
        .filter(|p| p.n_qubits == 2)
        .copied()
        .collect();
    let fit = match sweep::fit_tau_vs_inverse_gamma(&n2_points, target) {
        Ok(f) => f,
        Err(e) => return CriterionResult::new(name, false, format!("fit failed: {e}")),
    };
    let synthetic: Vec<CollapsePoint<f64>> = [0.25, 0.4, 0.6, 0.9, 1.3, 2.0, 3.0]
        .iter()
        .map(|&gamma| synthetic_point(0.5, gamma, 1.0))
        .collect();
    let synthetic_fit = sweep::fit_tau_vs_inverse_gamma(&synthetic, 0.5)
        .expect("seven synthetic points share the target");
    let synthetic_err = (synthetic_fit.slope - 0.5_f64.sqrt()).abs();
    CriterionResult::new(
        name,
        (fit.slope - FIT_SLOPE).abs() <= FIT_SLOPE_TOL && synthetic_err <= FIT_SYNTHETIC_TOL,
        format!(
            "τ*(ε = {target:.4}) vs 1/Γ over {} N=2 points: slope {:.4} \
             (window {FIT_SLOPE}±{FIT_SLOPE_TOL}), intercept {:+.4}; \
             synthetic on-bound slope off √0.5 by {synthetic_err:.2e} (window 1e-6)",
            fit.n_points, fit.slope, fit.intercept
        ),
    )
}

/// At (n̄ = 20, λ = 0.1, N = 2) the simulated ε(t) must track the
/// classical-drive sinusoid [1 − cos Ω_N t]/2 within 0.02 absolute up to
/// the sinusoid's first maximum.
pub fn classical_field_window() -> CriterionResult {
    let name = "classical-field";
    let (n, lambda, n_bar) = (2usize, 0.1, 20.0);
    let result = (|| -> Result<(f64, f64), Error> {
        // A generous cutoff (tail ~1e-13) rules truncation out of the
        // comparison entirely.
        let params = DickeParams::new(n, lambda, n_bar)?.with_n_fock(60)?;
        let omega = qsl::omega_n(lambda, n_bar, n);
        let t_peak = std::f64::consts::PI / omega;
        let grid = TimeGrid::new(t_peak, 500)?;
        let traj = compute_trajectory(&params, &grid)?;
        let max_dev = grid
            .times()
            .iter()
            .zip(&traj.eps)
            .map(|(&t, &eps)| (eps - qsl::classical_field_eps(t, lambda, n_bar, n)).abs())
            .fold(0.0_f64, f64::max);
        Ok((max_dev, omega))
    })();
    match result {
        Ok((max_dev, omega)) => CriterionResult::new(
            name,
            max_dev <= 0.02,
            format!(
                "max |ε_sim − ε_classical| = {max_dev:.3} on [0, π/Ω_N] at \
                 (N={n}, λ={lambda}, n̄={n_bar}), window 0.02; the sinusoid is the \
                 free-rotation limit, which needs Ω_N ≫ ω₀ on top of n̄ ≫ 1, \
                 and here Ω_N = {omega:.2} ω₀"
            ),
        ),
        Err(e) => CriterionResult::new(name, false, format!("trajectory did not compute: {e}")),
    }
}

/// Sorted-pairing ergotropy equals brute-force permutation minimization to
/// 1e-12 on 1000 random mixed states of dimension ≤ 6; offset invariance
/// and the pure-state identity hold to 1e-10.
pub fn ergotropy_oracle() -> CriterionResult {
    let name = "ergotropy-oracle";
    let result = (|| -> Result<(f64, f64, f64), Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x00D1_C4EB);
        let mut worst_pairing = 0.0_f64;
        let mut worst_offset = 0.0_f64;
        for _ in 0..1000 {
            let dim = rng.gen_range(2..=6);
            let rho = random_density(&mut rng, dim)?;
            let levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let lib = ergotropy_with_levels(&rho, &levels)?;
            let mean = mean_energy_with_levels(&rho, &levels)?;
            let passive = min_pairing_energy(&rho.populations()?, &levels);
            let brute = (mean - passive).max(0.0);
            worst_pairing = worst_pairing.max((lib - brute).abs());

            let shift = rng.gen_range(-5.0..5.0);
            let shifted: Vec<f64> = levels.iter().map(|e| e + shift).collect();
            let lib_shifted = ergotropy_with_levels(&rho, &shifted)?;
            worst_offset = worst_offset.max((lib - lib_shifted).abs());
        }
        let mut worst_pure = 0.0_f64;
        for _ in 0..200 {
            let dim = rng.gen_range(2..=6);
            let psi = random_unit_vector(&mut rng, dim);
            let mut m = DMatrix::<Complex<f64>>::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] = psi[i] * psi[j].conj();
                }
            }
            let rho = DensityMatrix::new(m)?;
            let levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let lib = ergotropy_with_levels(&rho, &levels)?;
            let mean = mean_energy_with_levels(&rho, &levels)?;
            let floor = levels.iter().copied().fold(f64::INFINITY, f64::min);
            // A pure state surrenders everything above the lowest level.
            worst_pure = worst_pure.max((lib - (mean - floor)).abs());
        }
        Ok((worst_pairing, worst_offset, worst_pure))
    })();
    match result {
        Ok((pairing, offset, pure)) => CriterionResult::new(
            name,
            pairing <= 1e-12 && offset <= 1e-10 && pure <= 1e-10,
            format!(
                "1000 random states ≤ 6 levels: |sorted − brute-force| ≤ {pairing:.2e} \
                 (window 1e-12); offset invariance ≤ {offset:.2e}, pure-state identity \
                 ≤ {pure:.2e} (window 1e-10)"
            ),
        ),
        Err(e) => CriterionResult::new(name, false, format!("oracle did not compute: {e}")),
    }
}

/// Norm and energy conservation over the whole sweep, plus bit-identical
/// parallel and serial outputs.
pub fn dynamics_invariants(pair: &SweepPair) -> CriterionResult {
    let p = &pair.parallel;
    let s = &pair.serial;
    let failures_match = p.failures.len() == s.failures.len()
        && p.failures
            .iter()
            .zip(&s.failures)
            .all(|(a, b)| {
                (a.n_qubits, a.lambda, a.n_bar) == (b.n_qubits, b.lambda, b.n_bar)
                    && a.error == b.error
            });
    let bit_identical = p.points == s.points
        && p.statistics == s.statistics
        && p.lower_envelope == s.lower_envelope
        && p.max_norm_drift == s.max_norm_drift
        && p.max_energy_drift == s.max_energy_drift
        && p.max_bound_excess == s.max_bound_excess
        && failures_match;
    CriterionResult::new(
        "dynamics-invariants",
        bit_identical && p.max_norm_drift < NORM_DRIFT_TOL && p.max_energy_drift < ENERGY_DRIFT_TOL,
        format!(
            "max norm drift {:.2e} (window 1e-9), max ⟨H⟩ relative drift {:.2e} \
             (window 1e-8); parallel and serial outputs bit-identical: {bit_identical}",
            p.max_norm_drift, p.max_energy_drift
        ),
    )
}

/// Fault-injection self-test: one synthetic point 10% below the speed limit
/// goes through the very scanner `qsl-violation` uses; a healthy scanner
/// flags it, producing a named failure (and exit code 1).
pub fn injected_violation_report() -> Vec<CriterionResult> {
    let bad = synthetic_point(0.5, 1.0, 0.9);
    let scan = scan_violations(&[bad]);
    vec![CriterionResult::new(
        "qsl-violation",
        scan.count == 0,
        format!(
            "self-test: injected 1 synthetic point 10% below the bound; scanner \
             flagged {} with margin {:+.3e} (a flagged injection is the healthy outcome)",
            scan.count, scan.worst_margin
        ),
    )]
}

// ---------------------------------------------------------------------------
// Oracle helpers.

/// Random mixture of `dim` pure states with positive weights, normalized.
fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> Result<DensityMatrix<f64>, Error> {
    let mut m = DMatrix::<Complex<f64>>::zeros(dim, dim);
    for _ in 0..dim {
        let v = random_unit_vector(rng, dim);
        let w = rng.gen_range(0.05..1.0);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += v[i] * v[j].conj() * Complex::new(w, 0.0);
            }
        }
    }
    let trace: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    m /= Complex::new(trace, 0.0);
    DensityMatrix::new(m)
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex<f64>> {
    let mut v: Vec<Complex<f64>> = (0..dim)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// min over all pairings π of Σ_k r_k ε_π(k), by exhaustive enumeration
/// (Heap's algorithm; dim ≤ 6 means at most 720 permutations).
fn min_pairing_energy(populations: &[f64], levels: &[f64]) -> f64 {
    let dim = levels.len();
    let mut perm: Vec<usize> = (0..dim).collect();
    let mut counters = vec![0usize; dim];
    let paired = |perm: &[usize]| -> f64 {
        perm.iter()
            .enumerate()
            .map(|(k, &p)| populations[k] * levels[p])
            .sum()
    };
    let mut best = paired(&perm);
    let mut i = 0;
    while i < dim {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            best = best.min(paired(&perm));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    best
}
