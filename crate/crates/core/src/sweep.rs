//! The full (N, λ, n̄, ε) parameter scan with collapse statistics.
//!
//! One trajectory is propagated per (N, λ, n̄) protocol and all charge
//! targets ε are read off it, so the standard scan costs 224 propagations
//! rather than 11200. Protocols are independent pure computations: the scan
//! runs serially or on any number of workers with bit-identical output,
//! merged in a stable (N, λ, n̄, ε) order.

use rayon::prelude::*;

use crate::dynamics::{compute_trajectory, DickeParams, TimeGrid, DEFAULT_N_FOCK};
use crate::error::{Error, Result};
use crate::qsl::{global_bound, make_collapse_point, CollapsePoint};
use crate::{lit, Real};

/// Slack below √ε before a point counts as violating the bound; absorbs
/// nothing but floating-point noise.
pub const VIOLATION_SLACK: f64 = 1e-9;

/// Truncation-tail tolerance of the standard scan. The largest grid point
/// (n̄ = 20 at 40 Fock levels) parks ≈5×10⁻⁵ of coherent weight beyond the
/// cutoff — orders of magnitude below the ε resolution any statistic here
/// probes, so the strict default would only force a larger cutoff without
/// measurably moving a single number.
pub const SWEEP_TAIL_TOL: f64 = 1e-4;

/// Full description of one parameter scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig<T: Real> {
    /// Battery sizes, ascending, each ≥ 2.
    pub n_qubits_list: Vec<usize>,
    /// Couplings λ, strictly increasing, positive.
    pub lambda_grid: Vec<T>,
    /// Charger photon numbers n̄, strictly increasing, positive.
    pub n_bar_grid: Vec<T>,
    /// Charge targets ε, strictly increasing, within (0, 1].
    pub eps_grid: Vec<T>,
    /// Time grid shared by every trajectory.
    pub time_grid: TimeGrid<T>,
    /// Fock cutoff shared by every trajectory.
    pub n_fock: usize,
    /// Truncation-tail tolerance shared by every trajectory.
    pub tail_tol: T,
}

impl<T: Real> SweepConfig<T> {
    /// The standard desk-scale scan: N ∈ {2,3,4,5}, 8 couplings spanning
    /// [0.1, 2.0] (denser at weak coupling, where the collapse is
    /// sharpest), 7 photon numbers spanning [1, 20], 50 equally spaced
    /// charge targets spanning [0.02, 0.96], and the standard time grid.
    pub fn standard() -> Self {
        let lambda_grid = [0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 1.6, 2.0]
            .iter()
            .map(|&x| lit(x))
            .collect();
        let n_bar_grid = [1.0, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0]
            .iter()
            .map(|&x| lit(x))
            .collect();
        let eps_grid = (0..50)
            .map(|i| {
                lit::<T>(0.02)
                    + lit::<T>(0.94) * T::from_usize(i).expect("index fits the scalar")
                        / lit::<T>(49.0)
            })
            .collect();
        Self {
            n_qubits_list: vec![2, 3, 4, 5],
            lambda_grid,
            n_bar_grid,
            eps_grid,
            time_grid: TimeGrid::standard(),
            n_fock: DEFAULT_N_FOCK,
            tail_tol: lit(SWEEP_TAIL_TOL),
        }
    }

    /// Check every grid constraint (see field docs).
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits_list.is_empty() {
            return Err(Error::config("n_qubits_list must not be empty"));
        }
        if self.n_qubits_list.iter().any(|&n| n < 2) {
            return Err(Error::config("every n_qubits must be at least 2"));
        }
        if self.n_qubits_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("n_qubits_list must be strictly increasing"));
        }
        check_grid("lambda_grid", &self.lambda_grid)?;
        check_grid("n_bar_grid", &self.n_bar_grid)?;
        check_grid("eps_grid", &self.eps_grid)?;
        if *self.eps_grid.last().expect("non-empty") > T::one() {
            return Err(Error::config("eps_grid values must not exceed 1"));
        }
        if self.n_fock == 0 {
            return Err(Error::config("n_fock must be at least 1"));
        }
        if !(self.tail_tol > T::zero()) {
            return Err(Error::config("tail_tol must be positive"));
        }
        Ok(())
    }

    /// Number of trajectories the scan will propagate.
    pub fn protocol_count(&self) -> usize {
        self.n_qubits_list.len() * self.lambda_grid.len() * self.n_bar_grid.len()
    }
}

fn check_grid<T: Real>(name: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config(format!("{name} must not be empty")));
    }
    if !(grid[0] > T::zero()) {
        return Err(Error::config(format!("{name} values must be positive")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

/// A protocol whose trajectory could not be computed, with the cause.
#[derive(Debug, Clone)]
pub struct SweepFailure<T: Real> {
    pub n_qubits: usize,
    pub lambda: T,
    pub n_bar: T,
    pub error: Error,
}

/// Per-battery-size summary of the collapse ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NQubitStatistics<T: Real> {
    pub n_qubits: usize,
    /// Points whose target was reached within the time window.
    pub valid_count: usize,
    pub min_ratio: T,
    pub median_ratio: T,
    /// Points of this size with X < √ε − [`VIOLATION_SLACK`].
    pub violation_count: usize,
}

/// Collapse-ratio statistics over a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseStatistics<T: Real> {
    /// One row per battery size present, ascending.
    pub per_n: Vec<NQubitStatistics<T>>,
    pub total_valid: usize,
    /// Points with X < √ε − [`VIOLATION_SLACK`].
    pub violation_count: usize,
}

/// One bin of the lower envelope X_min(ε).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeBin<T: Real> {
    /// Bin center; for the standard scan this is the ε target itself.
    pub eps: T,
    /// Smallest X among the bin's points.
    pub x_min: T,
    pub count: usize,
}

/// Least-squares line through (1/Γ_N, τ*) points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T: Real> {
    pub slope: T,
    pub intercept: T,
    pub n_points: usize,
}

/// Everything the scan produced.
#[derive(Debug, Clone)]
pub struct SweepResult<T: Real> {
    pub config: SweepConfig<T>,
    /// Valid collapse points in (N, λ, n̄, ε) order.
    pub points: Vec<CollapsePoint<T>>,
    pub failures: Vec<SweepFailure<T>>,
    pub statistics: CollapseStatistics<T>,
    /// Envelope over the smallest battery size in the scan.
    pub lower_envelope: Vec<EnvelopeBin<T>>,
    /// Largest |‖ψ‖ − 1| seen on any trajectory.
    pub max_norm_drift: T,
    /// Largest relative ⟨H⟩ drift seen on any trajectory.
    pub max_energy_drift: T,
    /// Largest ε(t) − (4/N)λ²n̄t² over every trajectory and grid time;
    /// values at or below [`VIOLATION_SLACK`] certify the ceiling holds
    /// everywhere.
    pub max_bound_excess: T,
}

struct ProtocolOutcome<T: Real> {
    points: Vec<CollapsePoint<T>>,
    failure: Option<SweepFailure<T>>,
    max_norm_drift: T,
    max_energy_drift: T,
    max_bound_excess: T,
}

/// Run the scan on `workers` threads (0 = one per available core).
///
/// The outcome is bit-identical for every worker count: each protocol is a
/// pure computation and results are merged in configuration order.
///
/// # Errors
///
/// [`Error::Config`] for an invalid configuration or unbuildable worker
/// pool. Per-protocol failures do not abort the scan; they are reported in
/// [`SweepResult::failures`].
pub fn run_sweep<T>(config: &SweepConfig<T>, workers: usize) -> Result<SweepResult<T>>
where
    T: Real + Send + Sync,
{
    config.validate()?;
    let mut protocols = Vec::with_capacity(config.protocol_count());
    for &n_qubits in &config.n_qubits_list {
        for &lambda in &config.lambda_grid {
            for &n_bar in &config.n_bar_grid {
                protocols.push((n_qubits, lambda, n_bar));
            }
        }
    }

    let run_protocol =
        |&(n_qubits, lambda, n_bar): &(usize, T, T)| run_one(config, n_qubits, lambda, n_bar);
    let outcomes: Vec<ProtocolOutcome<T>> = if workers == 1 {
        protocols.iter().map(run_protocol).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config(format!("failed to build worker pool: {e}")))?;
        pool.install(|| protocols.par_iter().map(run_protocol).collect())
    };

    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut max_norm_drift = T::zero();
    let mut max_energy_drift = T::zero();
    let mut max_bound_excess = T::zero();
    for outcome in outcomes {
        points.extend(outcome.points);
        failures.extend(outcome.failure);
        max_norm_drift = max_norm_drift.max(outcome.max_norm_drift);
        max_energy_drift = max_energy_drift.max(outcome.max_energy_drift);
        max_bound_excess = max_bound_excess.max(outcome.max_bound_excess);
    }

    let statistics = collapse_statistics(&points);
    let envelope_n = config.n_qubits_list[0];
    let envelope_points: Vec<CollapsePoint<T>> = points
        .iter()
        .filter(|p| p.n_qubits == envelope_n)
        .copied()
        .collect();
    let lower_envelope = lower_envelope(&envelope_points, config.eps_grid.len());

    Ok(SweepResult {
        config: config.clone(),
        points,
        failures,
        statistics,
        lower_envelope,
        max_norm_drift,
        max_energy_drift,
        max_bound_excess,
    })
}

fn run_one<T: Real>(
    config: &SweepConfig<T>,
    n_qubits: usize,
    lambda: T,
    n_bar: T,
) -> ProtocolOutcome<T> {
    let fail = |error: Error| ProtocolOutcome {
        points: Vec::new(),
        failure: Some(SweepFailure {
            n_qubits,
            lambda,
            n_bar,
            error,
        }),
        max_norm_drift: T::zero(),
        max_energy_drift: T::zero(),
        max_bound_excess: T::zero(),
    };

    let params = match DickeParams::new(n_qubits, lambda, n_bar)
        .and_then(|p| p.with_n_fock(config.n_fock))
        .and_then(|p| p.with_tail_tol(config.tail_tol))
    {
        Ok(params) => params,
        Err(error) => return fail(error),
    };
    let traj = match compute_trajectory(&params, &config.time_grid) {
        Ok(traj) => traj,
        Err(error) => return fail(error),
    };

    let mut max_bound_excess = T::zero();
    for (&t, &eps) in traj.grid.times().iter().zip(&traj.eps) {
        max_bound_excess = max_bound_excess.max(eps - global_bound(t, lambda, n_bar, n_qubits));
    }

    let mut points = Vec::new();
    for &eps_target in &config.eps_grid {
        match make_collapse_point(&traj, eps_target) {
            Ok(Some(point)) => points.push(point),
            Ok(None) => {}
            Err(error) => return fail(error),
        }
    }

    ProtocolOutcome {
        points,
        failure: None,
        max_norm_drift: traj.max_norm_drift,
        max_energy_drift: traj.max_energy_drift,
        max_bound_excess,
    }
}

/// Min/median collapse ratios per battery size plus the global violation
/// count (X < √ε − [`VIOLATION_SLACK`]).
pub fn collapse_statistics<T: Real>(points: &[CollapsePoint<T>]) -> CollapseStatistics<T> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.n_qubits).collect();
    sizes.sort_unstable();
    sizes.dedup();

    let slack = lit::<T>(VIOLATION_SLACK);
    let violates = |p: &&CollapsePoint<T>| p.x < p.eps_target.sqrt() - slack;

    let per_n: Vec<NQubitStatistics<T>> = sizes
        .into_iter()
        .map(|n_qubits| {
            let of_size = points.iter().filter(|p| p.n_qubits == n_qubits);
            let violation_count = of_size.clone().filter(violates).count();
            let mut ratios: Vec<T> = of_size.map(|p| p.ratio).collect();
            ratios.sort_by(|a, b| a.partial_cmp(b).expect("ratios are finite"));
            let valid_count = ratios.len();
            let median_ratio = if valid_count % 2 == 1 {
                ratios[valid_count / 2]
            } else {
                (ratios[valid_count / 2 - 1] + ratios[valid_count / 2]) / lit::<T>(2.0)
            };
            NQubitStatistics {
                n_qubits,
                valid_count,
                min_ratio: ratios[0],
                median_ratio,
                violation_count,
            }
        })
        .collect();

    CollapseStatistics {
        violation_count: per_n.iter().map(|s| s.violation_count).sum(),
        total_valid: points.len(),
        per_n,
    }
}

/// Per-bin minimum of X over `n_bins` uniform bins spanning the ε range of
/// `points` (nearest-center assignment, so a scan's own targets map to
/// their bins exactly). Empty bins are omitted.
pub fn lower_envelope<T: Real>(points: &[CollapsePoint<T>], n_bins: usize) -> Vec<EnvelopeBin<T>> {
    if points.is_empty() || n_bins == 0 {
        return Vec::new();
    }
    let lo = points
        .iter()
        .map(|p| p.eps_target)
        .fold(T::one(), T::min);
    let hi = points
        .iter()
        .map(|p| p.eps_target)
        .fold(T::zero(), T::max);

    let mut bins: Vec<Option<EnvelopeBin<T>>> = vec![None; n_bins];
    let single = n_bins == 1 || !(hi > lo);
    let step = if single {
        T::one()
    } else {
        (hi - lo) / T::from_usize(n_bins - 1).expect("bin count fits the scalar")
    };
    for point in points {
        let index = if single {
            0
        } else {
            ((point.eps_target - lo) / step)
                .round()
                .to_usize()
                .unwrap_or(0)
                .min(n_bins - 1)
        };
        let center = lo + step * T::from_usize(index).expect("index fits the scalar");
        let bin = bins[index].get_or_insert(EnvelopeBin {
            eps: if single { lo } else { center },
            x_min: point.x,
            count: 0,
        });
        bin.x_min = bin.x_min.min(point.x);
        bin.count += 1;
    }
    bins.into_iter().flatten().collect()
}

/// Least-squares line (with intercept) through (1/Γ_N, τ*) over the points
/// at one charge target.
///
/// # Errors
///
/// [`Error::Config`] when fewer than two points match the target.
pub fn fit_tau_vs_inverse_gamma<T: Real>(
    points: &[CollapsePoint<T>],
    eps_target: T,
) -> Result<LinearFit<T>> {
    let tol = lit::<T>(1e-9);
    let selected: Vec<(T, T)> = points
        .iter()
        .filter(|p| (p.eps_target - eps_target).abs() <= tol)
        .map(|p| (T::one() / p.gamma_n, p.tau_star))
        .collect();
    if selected.len() < 2 {
        return Err(Error::config(
            "linear fit requires at least two points at the chosen target",
        ));
    }
    let n = T::from_usize(selected.len()).expect("point count fits the scalar");
    let (mut sx, mut sy, mut sxx, mut sxy) = (T::zero(), T::zero(), T::zero(), T::zero());
    for &(x, y) in &selected {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() < T::default_epsilon() {
        return Err(Error::config("fit abscissae are degenerate"));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok(LinearFit {
        slope,
        intercept,
        n_points: selected.len(),
    })
}
