//! Collective-spin and truncated-Fock operator algebra.
//!
//! The battery lives in the maximal angular-momentum sector J = N/2 of N
//! qubits (dimension N+1); the charger is a single bosonic mode truncated to
//! `n_fock` levels. Spin basis states are labelled by m = −J … +J with
//! m = −J first; Fock states by n = 0 … n_fock−1. Joint indices are
//! spin-major: `index = m_index · n_fock + n`.
//!
//! All operators returned here are real matrices: J_z, J_x, a, a†, a†a and
//! every product needed by the Hamiltonian are real in this basis, and the
//! coherent-state phase convention (α = +√n̄, real) keeps states real too
//! until time evolution introduces complex phases.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::{lit, Operator, Real, RealVector};

/// Default upper bound on the coherent-state weight allowed beyond the Fock
/// cutoff; exceeding it is an error rather than a silent loss of norm.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Dimensions of the joint spin ⊗ Fock product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    n_qubits: usize,
    n_fock: usize,
}

impl HilbertSpace {
    /// A space for `n_qubits ≥ 2` qubits and a mode truncated to
    /// `n_fock ≥ 1` levels.
    pub fn new(n_qubits: usize, n_fock: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::config(format!(
                "n_qubits must be at least 2, got {n_qubits}"
            )));
        }
        if n_fock < 1 {
            return Err(Error::config("n_fock must be at least 1"));
        }
        Ok(Self { n_qubits, n_fock })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_fock(&self) -> usize {
        self.n_fock
    }

    /// Dimension N+1 of the collective-spin factor (sector J = N/2).
    pub fn spin_dim(&self) -> usize {
        self.n_qubits + 1
    }

    /// Dimension (N+1)·n_fock of the joint space.
    pub fn total_dim(&self) -> usize {
        self.spin_dim() * self.n_fock
    }

    /// Total angular momentum J = N/2.
    pub fn spin_j<T: Real>(&self) -> T {
        T::from_usize(self.n_qubits).expect("qubit count fits the scalar") / lit::<T>(2.0)
    }

    /// m value of spin basis index `k` (k = 0 ↔ m = −J).
    pub fn m_value<T: Real>(&self, k: usize) -> T {
        T::from_usize(k).expect("index fits the scalar") - self.spin_j::<T>()
    }
}

/// Diagonal J_z on the spin factor: eigenvalues −J … +J ascending.
pub fn build_jz<T: Real>(space: &HilbertSpace) -> Operator<T> {
    let d = space.spin_dim();
    DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            space.m_value(r)
        } else {
            T::zero()
        }
    })
}

/// Raising operator J₊ with ⟨J,m+1|J₊|J,m⟩ = √(J(J+1) − m(m+1)).
pub fn build_jp<T: Real>(space: &HilbertSpace) -> Operator<T> {
    let d = space.spin_dim();
    let j: T = space.spin_j();
    let jj = j * (j + T::one());
    let mut op = DMatrix::zeros(d, d);
    for k in 0..d - 1 {
        let m: T = space.m_value(k);
        op[(k + 1, k)] = (jj - m * (m + T::one())).sqrt();
    }
    op
}

/// Lowering operator J₋ = J₊ᵀ (real matrix elements).
pub fn build_jm<T: Real>(space: &HilbertSpace) -> Operator<T> {
    build_jp::<T>(space).transpose()
}

/// J_x = (J₊ + J₋)/2: real symmetric tridiagonal.
pub fn build_jx<T: Real>(space: &HilbertSpace) -> Operator<T> {
    let jp = build_jp::<T>(space);
    let half = T::one() / lit::<T>(2.0);
    let sum = &jp + jp.transpose();
    sum * half
}

/// Truncated bosonic ladder operators on the Fock factor.
pub struct BosonOps<T: Real> {
    /// Annihilation a with a|n⟩ = √n|n−1⟩.
    pub a: Operator<T>,
    /// Creation a† (transpose of `a`; real matrix elements).
    pub a_dag: Operator<T>,
    /// Number operator a†a, diagonal 0 … n_fock−1.
    pub number: Operator<T>,
}

/// Build (a, a†, a†a) for the truncated mode.
///
/// On the last Fock level the canonical commutator [a, a†] = 𝟙 necessarily
/// fails; callers must keep physical weight away from the cutoff (see
/// [`coherent_state`]).
pub fn build_boson_ops<T: Real>(space: &HilbertSpace) -> BosonOps<T> {
    let d = space.n_fock();
    let mut a = DMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = T::from_usize(n).expect("Fock index fits the scalar").sqrt();
    }
    let a_dag = a.transpose();
    let number = &a_dag * &a;
    BosonOps { a, a_dag, number }
}

/// Truncated coherent state |α⟩ with α = +√n̄ (real, non-negative
/// amplitudes), renormalized after truncation.
///
/// The amplitude recurrence c₀ = e^{−n̄/2}, c_n = c_{n−1}·α/√n avoids
/// factorial overflow. The weight left beyond the cutoff,
/// 1 − Σ_n |c_n|², must not exceed `tail_tol`.
///
/// # Errors
///
/// [`Error::Truncation`] when the tail weight exceeds `tail_tol`.
pub fn coherent_state_with_tol<T: Real>(
    n_bar: T,
    n_fock: usize,
    tail_tol: T,
) -> Result<RealVector<T>> {
    if n_bar < T::zero() {
        return Err(Error::config(format!(
            "n_bar must be non-negative, got {}",
            n_bar.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if n_fock < 1 {
        return Err(Error::config("n_fock must be at least 1"));
    }
    let alpha = n_bar.sqrt();
    let half = T::one() / lit::<T>(2.0);
    let mut amps = RealVector::zeros(n_fock);
    let mut c = (-n_bar * half).exp();
    let mut norm_sq = T::zero();
    for n in 0..n_fock {
        if n > 0 {
            c *= alpha / T::from_usize(n).expect("Fock index fits the scalar").sqrt();
        }
        amps[n] = c;
        norm_sq += c * c;
    }
    let tail = T::one() - norm_sq;
    if tail > tail_tol {
        return Err(Error::Truncation {
            n_bar: n_bar.to_f64().unwrap_or(f64::NAN),
            n_fock,
            tail: tail.to_f64().unwrap_or(f64::NAN),
            tol: tail_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    amps /= norm_sq.sqrt();
    Ok(amps)
}

/// [`coherent_state_with_tol`] at the strict default tolerance
/// [`DEFAULT_TAIL_TOL`].
pub fn coherent_state<T: Real>(n_bar: T, n_fock: usize) -> Result<RealVector<T>> {
    coherent_state_with_tol(n_bar, n_fock, lit(DEFAULT_TAIL_TOL))
}

/// Coherent-state weight beyond the cutoff: 1 − Σ_{n<n_fock} e^{−n̄}n̄ⁿ/n!.
///
/// A pure diagnostic — it never fails on a large tail, so run manifests can
/// record the truncation quality of any (n̄, n_fock) combination.
///
/// # Errors
///
/// [`Error::Config`] for n̄ < 0 or n_fock = 0.
pub fn coherent_tail_weight<T: Real>(n_bar: T, n_fock: usize) -> Result<T> {
    if n_bar < T::zero() {
        return Err(Error::config(format!(
            "n_bar must be non-negative, got {}",
            n_bar.to_f64().unwrap_or(f64::NAN)
        )));
    }
    if n_fock < 1 {
        return Err(Error::config("n_fock must be at least 1"));
    }
    let mut p = (-n_bar).exp();
    let mut kept = T::zero();
    for n in 0..n_fock {
        if n > 0 {
            p *= n_bar / T::from_usize(n).expect("Fock index fits the scalar");
        }
        kept += p;
    }
    Ok(T::one() - kept)
}

/// Initial product state |J,−J⟩ ⊗ |α⟩: battery in its ground state, charger
/// coherent with mean photon number n̄.
///
/// Since m = −J is the first spin basis state, the amplitudes occupy the
/// first Fock block of the spin-major layout.
pub fn initial_state_with_tol<T: Real>(
    space: &HilbertSpace,
    n_bar: T,
    tail_tol: T,
) -> Result<RealVector<T>> {
    let coherent = coherent_state_with_tol(n_bar, space.n_fock(), tail_tol)?;
    let mut psi = RealVector::zeros(space.total_dim());
    psi.rows_mut(0, space.n_fock()).copy_from(&coherent);
    Ok(psi)
}

/// [`initial_state_with_tol`] at the strict default tolerance.
pub fn initial_state<T: Real>(space: &HilbertSpace, n_bar: T) -> Result<RealVector<T>> {
    initial_state_with_tol(space, n_bar, lit(DEFAULT_TAIL_TOL))
}

/// Kronecker product A ⊗ B in the crate's spin-major convention
/// (left factor = spin, right factor = field).
pub fn tensor<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    a.kronecker(b)
}

/// Lift a spin operator to the joint space: op ⊗ 𝟙_fock.
pub fn embed_spin<T: Real>(op: &Operator<T>, space: &HilbertSpace) -> Result<Operator<T>> {
    check_dim("embed_spin", op, space.spin_dim())?;
    Ok(op.kronecker(&DMatrix::identity(space.n_fock(), space.n_fock())))
}

/// Lift a field operator to the joint space: 𝟙_spin ⊗ op.
pub fn embed_field<T: Real>(op: &Operator<T>, space: &HilbertSpace) -> Result<Operator<T>> {
    check_dim("embed_field", op, space.n_fock())?;
    Ok(DMatrix::identity(space.spin_dim(), space.spin_dim()).kronecker(op))
}

fn check_dim<T: Real>(context: &'static str, op: &Operator<T>, expected: usize) -> Result<()> {
    if op.nrows() != expected || op.ncols() != expected {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual: op.nrows(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn space(n: usize, nf: usize) -> HilbertSpace {
        HilbertSpace::new(n, nf).unwrap()
    }

    #[test]
    fn space_dimensions() {
        let s = space(4, 40);
        assert_eq!(s.spin_dim(), 5);
        assert_eq!(s.total_dim(), 200);
        assert_eq!(s.spin_j::<f64>(), 2.0);
        assert!(HilbertSpace::new(1, 40).is_err());
        assert!(HilbertSpace::new(2, 0).is_err());
    }

    #[test]
    fn jz_matches_m_ladder() {
        let s = space(2, 4);
        let jz = build_jz::<f64>(&s);
        assert_eq!(jz.diagonal().as_slice(), &[-1.0, 0.0, 1.0]);
        let s3 = space(3, 4);
        let jz3 = build_jz::<f64>(&s3);
        assert_eq!(jz3.diagonal().as_slice(), &[-1.5, -0.5, 0.5, 1.5]);
        assert_relative_eq!(jz3.trace(), 0.0);
    }

    #[test]
    fn jx_for_two_qubits_is_spin_one_ladder() {
        let s = space(2, 4);
        let jx = build_jx::<f64>(&s);
        let x = 1.0 / 2f64.sqrt();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, x, 0.0, x, 0.0, x, 0.0, x, 0.0]);
        assert_relative_eq!(jx, expected, epsilon = 1e-15);
    }

    #[test]
    fn su2_commutators_hold_entrywise() {
        for n in 2..=8 {
            let s = space(n, 2);
            let jz = build_jz::<f64>(&s);
            let jp = build_jp::<f64>(&s);
            let jm = build_jm::<f64>(&s);
            // [J_z, J±] = ±J±  and  [J₊, J₋] = 2 J_z.
            let comm_zp = &jz * &jp - &jp * &jz;
            let comm_zm = &jz * &jm - &jm * &jz;
            let comm_pm = &jp * &jm - &jm * &jp;
            assert_relative_eq!(comm_zp, jp.clone(), epsilon = 1e-12);
            assert_relative_eq!(comm_zm, -jm.clone(), epsilon = 1e-12);
            assert_relative_eq!(comm_pm, 2.0 * jz, epsilon = 1e-12);
        }
    }

    #[test]
    fn jx_commutator_with_jz_gives_ladder_difference() {
        // [J_x, J_z] = −iJ_y, and −iJ_y = (J₋ − J₊)/2 is real.
        let s = space(5, 2);
        let jx = build_jx::<f64>(&s);
        let jz = build_jz::<f64>(&s);
        let jp = build_jp::<f64>(&s);
        let jm = build_jm::<f64>(&s);
        let comm = &jx * &jz - &jz * &jx;
        assert_relative_eq!(comm, (jm - jp) * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ground_state_jx_squared_expectation_is_quarter_n() {
        for n in 2..=8 {
            let s = space(n, 2);
            let jx = build_jx::<f64>(&s);
            let jx2 = &jx * &jx;
            assert_relative_eq!(jx2[(0, 0)], n as f64 / 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn boson_ops_match_ladder_convention() {
        let s = space(2, 3);
        let BosonOps { a, a_dag, number } = build_boson_ops::<f64>(&s);
        let expected =
            DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 2f64.sqrt(), 0.0, 0.0, 0.0]);
        assert_relative_eq!(a, expected, epsilon = 1e-15);
        let expected_number = DMatrix::from_diagonal(&nalgebra::dvector![0.0, 1.0, 2.0]);
        assert_relative_eq!(number, expected_number, epsilon = 1e-15);
        // [a, a†] = 𝟙 except on the truncated last level.
        let comm = &a * &a_dag - &a_dag * &a;
        for n in 0..2 {
            assert_relative_eq!(comm[(n, n)], 1.0, epsilon = 1e-15);
        }
        assert_relative_eq!(comm[(2, 2)], -2.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_state_amplitudes_and_moments() {
        // n̄ = 1: c₀ = c₁ = e^{−1/2} before renormalization (tail ~ 1e-11
        // at 40 levels, so renormalization barely moves them).
        let c = coherent_state::<f64>(1.0, 40).unwrap();
        assert_relative_eq!(c[0], (-0.5f64).exp(), epsilon = 1e-9);
        assert_relative_eq!(c[1], (-0.5f64).exp(), epsilon = 1e-9);

        let s = space(2, 40);
        let BosonOps { a, a_dag, number } = build_boson_ops::<f64>(&s);
        for &n_bar in &[1.0, 5.0, 10.0] {
            let c = coherent_state::<f64>(n_bar, 40).unwrap();
            let mean_n = (c.transpose() * &number * &c)[(0, 0)];
            assert_relative_eq!(mean_n, n_bar, epsilon = 1e-6);
            // ⟨α|(a + a†)|α⟩ = 2√n̄: the classical-drive identity behind
            // the charging-rate figure of merit.
            let x = (c.transpose() * (&a + &a_dag) * &c)[(0, 0)];
            assert_relative_eq!(x, 2.0 * n_bar.sqrt(), epsilon = 1e-8);
        }
    }

    #[test]
    fn coherent_state_vacuum_and_truncation_error() {
        let c = coherent_state::<f64>(0.0, 5).unwrap();
        assert_eq!(c[0], 1.0);
        assert_relative_eq!(c.norm(), 1.0);
        // n̄ = 20 leaves ~5e-5 beyond 40 levels: rejected at the strict
        // default, accepted with an explicit looser tolerance.
        let err = coherent_state::<f64>(20.0, 40);
        assert!(matches!(err, Err(Error::Truncation { .. })));
        assert!(coherent_state_with_tol::<f64>(20.0, 40, 1e-4).is_ok());
        assert!(coherent_state::<f64>(20.0, 60).is_ok());
    }

    #[test]
    fn tail_weight_matches_the_poisson_series() {
        // One level keeps only P(0) = e^{−n̄}.
        assert_relative_eq!(
            coherent_tail_weight::<f64>(2.0, 1).unwrap(),
            1.0 - (-2.0f64).exp(),
            epsilon = 1e-15
        );
        // The diagnostic agrees with the tail the state constructor rejects
        // on (n̄ = 20 beyond 40 levels, the scan's tightest combination).
        let tail = coherent_tail_weight::<f64>(20.0, 40).unwrap();
        assert!(tail > DEFAULT_TAIL_TOL && tail < 1e-4);
        match coherent_state::<f64>(20.0, 40) {
            Err(Error::Truncation { tail: reported, .. }) => {
                assert_relative_eq!(tail, reported, max_relative = 1e-9);
            }
            other => panic!("expected a truncation error, got {other:?}"),
        }
        assert!(coherent_tail_weight::<f64>(-1.0, 10).is_err());
        assert!(coherent_tail_weight::<f64>(1.0, 0).is_err());
    }

    #[test]
    fn initial_state_is_ground_block() {
        let s = space(2, 20);
        let psi = initial_state::<f64>(&s, 0.0).unwrap();
        assert_eq!(psi[0], 1.0);
        assert_relative_eq!(psi.norm(), 1.0);
        let psi1 = initial_state::<f64>(&s, 1.0).unwrap();
        assert_relative_eq!(psi1.norm(), 1.0, epsilon = 1e-12);
        // Battery energy ⟨ω₀ J_z⟩ = −N/2 at t = 0.
        let jz = embed_spin(&build_jz::<f64>(&s), &s).unwrap();
        let e = (psi1.transpose() * &jz * &psi1)[(0, 0)];
        assert_relative_eq!(e, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn tensor_and_embeddings_commute_and_multiply_traces() {
        let s = space(2, 3);
        let jz = build_jz::<f64>(&s);
        let number = build_boson_ops::<f64>(&s).number;
        let id6 = tensor(
            &DMatrix::<f64>::identity(2, 2),
            &DMatrix::<f64>::identity(3, 3),
        );
        assert_relative_eq!(id6, DMatrix::<f64>::identity(6, 6));

        let a = embed_spin(&jz, &s).unwrap();
        let b = embed_field(&number, &s).unwrap();
        let comm = &a * &b - &b * &a;
        assert!(comm.amax() < 1e-12);

        let t = tensor(&jz, &number);
        assert_relative_eq!(t.trace(), jz.trace() * number.trace(), epsilon = 1e-12);
        assert_eq!(t.nrows(), 9);

        // Mismatched factor dimensions are rejected.
        let s_wide = space(2, 4);
        let number4 = build_boson_ops::<f64>(&s_wide).number;
        assert!(embed_spin(&number4, &s_wide).is_err());
        assert!(embed_field(&jz, &s_wide).is_err());
    }
}
