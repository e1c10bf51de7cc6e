//! Reduced battery state and passive-state work extraction.
//!
//! The battery observable is H_B = ω₀J_z on the (N+1)-dimensional spin
//! space. Given the reduced state ρ_B, the maximum unitarily extractable
//! work (ergotropy) is
//!
//! W(ρ_B) = Tr[ρ_B H_B] − Σ_k r_k ε_k,
//!
//! with populations r_1 ≥ r_2 ≥ … sorted descending and battery levels
//! ε_1 ≤ ε_2 ≤ … ascending: the subtracted term is the energy of the
//! passive state, the cheapest unitary rearrangement of the spectrum. The
//! normalized charge ε = W/(Nω₀) ∈ [0, 1] is the quantity every charging
//! curve in this crate reports.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{build_jz, HilbertSpace};
use crate::{lit, Complex, Operator, Real, RealVector, StateVector};

/// Eigenvalues of ρ below −`NEGATIVE_EIG_TOL` abort the computation; in
/// [−`NEGATIVE_EIG_TOL`, 0) they are clamped to zero and the spectrum is
/// renormalized. Partial traces of unit-norm states sit many orders of
/// magnitude inside this margin; anything beyond it is a real bug upstream.
const NEGATIVE_EIG_TOL: f64 = 1e-8;

/// Largest tolerated Hermiticity defect and trace defect of a density
/// matrix handed to [`DensityMatrix::new`].
const DENSITY_TOL: f64 = 1e-10;

/// Validated reduced density matrix (Hermitian, unit trace).
///
/// The stored matrix is explicitly hermitized, ρ ← (ρ + ρ†)/2, to scrub the
/// harmless asymmetry floating-point contractions produce.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validate and hermitize a candidate density matrix.
    ///
    /// # Errors
    ///
    /// [`Error::Config`] for a non-square or non-Hermitian matrix,
    /// [`Error::NotNormalized`] when the trace is not 1 within 1e-10.
    pub fn new(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim == 0 {
            return Err(Error::config("density matrix must be square and non-empty"));
        }
        let tol = lit::<T>(DENSITY_TOL);
        let mut defect = T::zero();
        for i in 0..dim {
            for j in i..dim {
                let d = matrix[(i, j)] - matrix[(j, i)].conj();
                defect = defect.max(d.re.abs()).max(d.im.abs());
            }
        }
        if defect > tol {
            return Err(Error::config(format!(
                "density matrix is not Hermitian (defect {:.3e})",
                defect.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let trace: Complex<T> = matrix.diagonal().iter().copied().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
        if (trace.re - T::one()).abs() > tol || trace.im.abs() > tol {
            return Err(Error::NotNormalized {
                trace: trace.re.to_f64().unwrap_or(f64::NAN),
            });
        }
        let half = Complex::new(T::one() / lit::<T>(2.0), T::zero());
        let hermitized = (&matrix + matrix.adjoint()) * half;
        Ok(Self { matrix: hermitized })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    /// Eigenvalues of ρ sorted descending, clamped and renormalized.
    ///
    /// # Errors
    ///
    /// [`Error::NonPositiveDensity`] if any eigenvalue lies below
    /// −[`NEGATIVE_EIG_TOL`]; [`Error::EigSolverFailure`] from the
    /// eigensolver.
    pub fn populations(&self) -> Result<Vec<T>> {
        let mut vals = hermitian_eigenvalues(&self.matrix)?;
        let floor = -lit::<T>(NEGATIVE_EIG_TOL);
        let mut sum = T::zero();
        for v in &mut vals {
            if *v < floor {
                return Err(Error::NonPositiveDensity {
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            *v = v.max(T::zero());
            sum += *v;
        }
        for v in &mut vals {
            *v /= sum;
        }
        vals.sort_by(|a, b| b.partial_cmp(a).expect("populations are finite"));
        Ok(vals)
    }
}

/// Eigenvalues (ascending) of a complex Hermitian matrix M = A + iB via the
/// real symmetric 2d×2d embedding [[A, −B], [B, A]], whose spectrum is that
/// of M doubled. This keeps the whole crate on the real symmetric
/// eigensolver; each adjacent pair of the doubled spectrum is averaged.
fn hermitian_eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> Result<Vec<T>> {
    let dim = m.nrows();
    let mut embedding = DMatrix::<T>::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        for j in 0..dim {
            let z = m[(i, j)];
            embedding[(i, j)] = z.re;
            embedding[(i + dim, j + dim)] = z.re;
            embedding[(i, j + dim)] = -z.im;
            embedding[(i + dim, j)] = z.im;
        }
    }
    let (vals, _) = crate::eigen::decompose_symmetric(&embedding)?;
    let half = T::one() / lit::<T>(2.0);
    Ok((0..dim).map(|k| (vals[2 * k] + vals[2 * k + 1]) * half).collect())
}

/// The battery observable H_B = ω₀J_z with its (exactly known) spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryHamiltonian<T: Real> {
    n_qubits: usize,
    omega0: T,
    matrix: Operator<T>,
    eigenvalues: RealVector<T>,
}

impl<T: Real> BatteryHamiltonian<T> {
    pub fn new(n_qubits: usize, omega0: T) -> Result<Self> {
        if !(omega0 > T::zero()) {
            return Err(Error::config("omega0 must be positive"));
        }
        // The spin factor alone; the Fock cutoff is irrelevant here.
        let space = HilbertSpace::new(n_qubits, 1)?;
        let matrix = build_jz::<T>(&space) * omega0;
        let eigenvalues = matrix.diagonal();
        Ok(Self {
            n_qubits,
            omega0,
            matrix,
            eigenvalues,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn omega0(&self) -> T {
        self.omega0
    }

    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    /// ω₀J_z as a diagonal matrix in the m-basis.
    pub fn matrix(&self) -> &Operator<T> {
        &self.matrix
    }

    /// Levels {−Jω₀, …, +Jω₀}, ascending (the m-basis is already sorted).
    pub fn eigenvalues(&self) -> &RealVector<T> {
        &self.eigenvalues
    }
}

/// Trace out the field: ρ_B[m, m′] = Σ_n ψ[m·n_fock + n]·ψ*[m′·n_fock + n].
///
/// `psi` must be (numerically) unit-norm, since the contraction's trace is
/// ‖ψ‖² and [`DensityMatrix::new`] insists on unit trace.
pub fn partial_trace_field<T: Real>(
    psi: &StateVector<T>,
    space: &HilbertSpace,
) -> Result<DensityMatrix<T>> {
    if psi.len() != space.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "partial_trace_field",
            expected: space.total_dim(),
            actual: psi.len(),
        });
    }
    let (spin_dim, n_fock) = (space.spin_dim(), space.n_fock());
    let mut rho = DMatrix::<Complex<T>>::zeros(spin_dim, spin_dim);
    for m1 in 0..spin_dim {
        for m2 in 0..=m1 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for n in 0..n_fock {
                acc += psi[m1 * n_fock + n] * psi[m2 * n_fock + n].conj();
            }
            rho[(m1, m2)] = acc;
            rho[(m2, m1)] = acc.conj();
        }
    }
    DensityMatrix::new(rho)
}

/// Mean battery energy Tr[ρ H_B].
pub fn mean_energy<T: Real>(rho: &DensityMatrix<T>, battery: &BatteryHamiltonian<T>) -> Result<T> {
    mean_energy_with_levels(rho, battery.eigenvalues().as_slice())
}

/// Passive-state energy Σ_k r_k ε_k (populations descending, levels
/// ascending): the least energy any unitary can leave in the state.
pub fn passive_energy<T: Real>(
    rho: &DensityMatrix<T>,
    battery: &BatteryHamiltonian<T>,
) -> Result<T> {
    passive_energy_with_levels(rho, battery.eigenvalues().as_slice())
}

/// Ergotropy W(ρ) = Tr[ρ H_B] − Σ_k r_k ε_k ≥ 0.
pub fn ergotropy<T: Real>(rho: &DensityMatrix<T>, battery: &BatteryHamiltonian<T>) -> Result<T> {
    ergotropy_with_levels(rho, battery.eigenvalues().as_slice())
}

/// [`mean_energy`] against an arbitrary level ladder aligned with ρ's basis.
pub fn mean_energy_with_levels<T: Real>(rho: &DensityMatrix<T>, levels: &[T]) -> Result<T> {
    check_levels(rho, levels)?;
    let mut mean = T::zero();
    for (k, &level) in levels.iter().enumerate() {
        mean += level * rho.matrix()[(k, k)].re;
    }
    Ok(mean)
}

/// [`passive_energy`] against an arbitrary level ladder; the diagonal basis
/// of the levels is immaterial because only their multiset enters.
pub fn passive_energy_with_levels<T: Real>(rho: &DensityMatrix<T>, levels: &[T]) -> Result<T> {
    check_levels(rho, levels)?;
    let populations = rho.populations()?;
    let mut ascending = levels.to_vec();
    ascending.sort_by(|a, b| a.partial_cmp(b).expect("levels are finite"));
    let mut passive = T::zero();
    for (r, level) in populations.iter().zip(&ascending) {
        passive += *r * *level;
    }
    Ok(passive)
}

/// [`ergotropy`] against an arbitrary level ladder: levels are taken as the
/// diagonal of H_B in the basis ρ is expressed in.
pub fn ergotropy_with_levels<T: Real>(rho: &DensityMatrix<T>, levels: &[T]) -> Result<T> {
    let work = mean_energy_with_levels(rho, levels)? - passive_energy_with_levels(rho, levels)?;
    Ok(work.max(T::zero()))
}

/// Normalized ergotropy ε = W(ρ_B)/(Nω₀) ∈ [0, 1] of the joint pure state.
pub fn normalized_ergotropy<T: Real>(
    psi: &StateVector<T>,
    space: &HilbertSpace,
    battery: &BatteryHamiltonian<T>,
) -> Result<T> {
    if battery.dim() != space.spin_dim() {
        return Err(Error::DimensionMismatch {
            context: "normalized_ergotropy",
            expected: space.spin_dim(),
            actual: battery.dim(),
        });
    }
    let rho = partial_trace_field(psi, space)?;
    let work = ergotropy(&rho, battery)?;
    let capacity = T::from_usize(battery.n_qubits()).expect("qubit count fits the scalar")
        * battery.omega0();
    Ok((work / capacity).clamp(T::zero(), T::one()))
}

fn check_levels<T: Real>(rho: &DensityMatrix<T>, levels: &[T]) -> Result<()> {
    if levels.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "ergotropy levels",
            expected: rho.dim(),
            actual: levels.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::initial_state;
    use crate::to_complex;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix<f64> {
        // GG†/Tr[GG†] for a random complex G is Hermitian, PSD, unit-trace.
        let g = DMatrix::<Complex<f64>>::from_fn(dim, dim, |_, _| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let mut m = &g * g.adjoint();
        let trace: f64 = m.diagonal().iter().map(|z| z.re).sum();
        m /= Complex::new(trace, 0.0);
        DensityMatrix::new(m).unwrap()
    }

    fn pure_density(v: &[Complex<f64>]) -> DensityMatrix<f64> {
        let dim = v.len();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let m = DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj() / (norm * norm));
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn battery_levels_are_the_exact_jz_ladder() {
        let hb = BatteryHamiltonian::new(2, 1.0).unwrap();
        assert_eq!(hb.eigenvalues().as_slice(), &[-1.0, 0.0, 1.0]);
        let hb5 = BatteryHamiltonian::new(5, 2.0).unwrap();
        assert_eq!(hb5.eigenvalues().as_slice(), &[-5.0, -3.0, -1.0, 1.0, 3.0, 5.0]);
        assert_eq!(hb5.dim(), 6);
        assert!(BatteryHamiltonian::<f64>::new(2, 0.0).is_err());
    }

    #[test]
    fn density_matrix_validation_catches_defects() {
        let ok = DMatrix::<Complex<f64>>::identity(3, 3) * Complex::new(1.0 / 3.0, 0.0);
        assert!(DensityMatrix::new(ok.clone()).is_ok());

        let mut skew = ok.clone();
        skew[(0, 1)] = Complex::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(skew), Err(Error::Config(_))));

        let unnormalized = DMatrix::<Complex<f64>>::identity(3, 3);
        assert!(matches!(
            DensityMatrix::new(unnormalized),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn populations_are_descending_clamped_and_renormalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 2..=6 {
            let rho = random_density(&mut rng, dim);
            let pops = rho.populations().unwrap();
            assert!(pops.windows(2).all(|w| w[0] >= w[1]));
            assert!(pops.iter().all(|&p| p >= 0.0));
            assert_relative_eq!(pops.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hermitian_eigenvalues_match_a_known_spectrum() {
        // σ_y has spectrum {−1, +1}: a purely imaginary Hermitian case the
        // real embedding must get right.
        let sigma_y = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.0, 0.0),
                Complex::new(0.0, -1.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, 0.0),
            ],
        );
        let vals = hermitian_eigenvalues(&sigma_y).unwrap();
        assert_relative_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state_is_pure_projector() {
        let space = HilbertSpace::new(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let chi: Vec<Complex<f64>> = (0..3)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let chi_norm: f64 = chi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phi: Vec<Complex<f64>> = (0..4)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let phi_norm: f64 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi = StateVector::<f64>::from_fn(12, |i, _| {
            chi[i / 4] / chi_norm * (phi[i % 4] / phi_norm)
        });
        let rho = partial_trace_field(&psi, &space).unwrap();
        let expected = pure_density(&chi);
        let diff = (rho.matrix() - expected.matrix()).map(|z| z.norm()).max();
        assert!(diff < 1e-12, "projector defect {diff}");
    }

    #[test]
    fn partial_trace_of_schmidt_state_is_diagonal() {
        // (|m=0, n=0⟩ + |m=1, n=1⟩)/√2 traces to diag(1/2, 1/2, 0).
        let space = HilbertSpace::new(2, 4).unwrap();
        let mut psi = StateVector::<f64>::zeros(12);
        let w = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[0] = w;
        psi[4 + 1] = w;
        let rho = partial_trace_field(&psi, &space).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j && i < 2 { 0.5 } else { 0.0 };
                assert_relative_eq!(rho.matrix()[(i, j)].re, expected, epsilon = 1e-14);
                assert_relative_eq!(rho.matrix()[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn partial_trace_preserves_trace_on_random_states() {
        let space = HilbertSpace::new(3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let mut psi = StateVector::<f64>::from_fn(20, |_, _| {
                Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            psi /= Complex::new(norm, 0.0);
            let rho = partial_trace_field(&psi, &space).unwrap();
            let trace: f64 = rho.matrix().diagonal().iter().map(|z| z.re).sum();
            assert_relative_eq!(trace, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn extremal_battery_states_bracket_the_charge() {
        let space = HilbertSpace::new(2, 4).unwrap();
        let hb = BatteryHamiltonian::new(2, 1.0).unwrap();

        let ground = to_complex(&initial_state(&space, 0.0).unwrap());
        assert!(normalized_ergotropy(&ground, &space, &hb).unwrap() < 1e-12);

        // Fully excited battery |J, +J⟩ ⊗ |0⟩: W = Nω₀, ε = 1.
        let mut excited = StateVector::<f64>::zeros(12);
        excited[2 * 4] = Complex::new(1.0, 0.0);
        let rho = partial_trace_field(&excited, &space).unwrap();
        assert_relative_eq!(ergotropy(&rho, &hb).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(
            normalized_ergotropy(&excited, &space, &hb).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn two_level_example_enumerates_both_pairings() {
        // ρ = diag(0.3 ground, 0.7 excited) on levels (0, 1): W = 0.4.
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex::new(0.3, 0.0),
            Complex::new(0.7, 0.0),
        ]));
        let rho = DensityMatrix::new(m).unwrap();
        let w = ergotropy_with_levels(&rho, &[0.0, 1.0]).unwrap();
        assert_relative_eq!(w, 0.4, epsilon = 1e-12);
        // Passive energy is the better of the two pairings: 0.7·0 + 0.3·1.
        assert_relative_eq!(
            passive_energy_with_levels(&rho, &[0.0, 1.0]).unwrap(),
            0.3,
            epsilon = 1e-12
        );
    }

    #[test]
    fn maximally_mixed_state_is_passive() {
        let dim = 4;
        let m = DMatrix::<Complex<f64>>::identity(dim, dim) * Complex::new(0.25, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        let hb = BatteryHamiltonian::new(3, 1.0).unwrap();
        assert_eq!(ergotropy(&rho, &hb).unwrap(), 0.0);
    }

    #[test]
    fn ergotropy_is_offset_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let dim = rng.gen_range(2..=6);
            let rho = random_density(&mut rng, dim);
            let levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let offset: f64 = rng.gen_range(-5.0..5.0);
            let shifted: Vec<f64> = levels.iter().map(|e| e + offset).collect();
            let w = ergotropy_with_levels(&rho, &levels).unwrap();
            let w_shifted = ergotropy_with_levels(&rho, &shifted).unwrap();
            assert!((w - w_shifted).abs() < 1e-10, "offset broke W: {w} vs {w_shifted}");
        }
    }

    #[test]
    fn pure_state_ergotropy_reaches_the_ground_level() {
        // For pure ρ the passive state is the ground state:
        // W = ⟨H_B⟩ − min_k ε_k.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let dim = rng.gen_range(2..=6);
            let v: Vec<Complex<f64>> = (0..dim)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let rho = pure_density(&v);
            let levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let w = ergotropy_with_levels(&rho, &levels).unwrap();
            let mean = mean_energy_with_levels(&rho, &levels).unwrap();
            let ground = levels.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((w - (mean - ground)).abs() < 1e-10);
        }
    }

    #[test]
    fn sorted_pairing_beats_every_permutation() {
        fn permutations(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![Vec::new()];
            }
            let mut out = Vec::new();
            for rest in permutations(n - 1) {
                for pos in 0..=rest.len() {
                    let mut perm = rest.clone();
                    perm.insert(pos, n - 1);
                    out.push(perm);
                }
            }
            out
        }

        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let dim = rng.gen_range(2..=5);
            let rho = random_density(&mut rng, dim);
            let levels: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let pops = rho.populations().unwrap();
            let brute = permutations(dim)
                .into_iter()
                .map(|perm| {
                    perm.iter()
                        .zip(&levels)
                        .map(|(&k, &e)| pops[k] * e)
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            let passive = passive_energy_with_levels(&rho, &levels).unwrap();
            assert!((passive - brute).abs() < 1e-12, "{passive} vs brute {brute}");
        }
    }

    #[test]
    fn diagonal_phases_leave_ergotropy_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let dim = 4;
        let rho = random_density(&mut rng, dim);
        let levels = [-1.5, -0.5, 0.5, 1.5];
        let phases = DMatrix::<Complex<f64>>::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let rotated = DensityMatrix::new(&phases * rho.matrix() * phases.adjoint()).unwrap();
        let w = ergotropy_with_levels(&rho, &levels).unwrap();
        let w_rot = ergotropy_with_levels(&rotated, &levels).unwrap();
        assert_relative_eq!(w, w_rot, epsilon = 1e-12);
    }
}
