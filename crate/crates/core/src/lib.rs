//! Simulation core for a collective-spin ("Dicke") quantum battery.
//!
//! N two-level systems are coupled symmetrically to a single cavity mode
//! prepared in a coherent state; the cavity acts as the charger. The crate
//! provides everything needed to study how fast work capacity (ergotropy)
//! can be injected into the battery:
//!
//! * [`hilbert`] — collective-spin / truncated-Fock operator algebra and the
//!   initial product state;
//! * [`dynamics`] — Dicke Hamiltonian assembly and spectral time evolution;
//! * [`ergotropy`] — reduced battery state and passive-state work extraction;
//! * [`qsl`] — charging-rate figures of merit, analytic bounds on the
//!   charging curve, and first-passage extraction;
//! * [`sweep`] — the full (N, λ, n̄, ε) parameter scan with collapse
//!   statistics, run serially or in parallel with identical output.
//!
//! # Conventions
//!
//! ħ = 1; energies are in units of the qubit splitting ω₀ and times in
//! ω₀⁻¹. Only the maximal angular-momentum sector J = N/2 is kept (the
//! collective coupling preserves it), so the spin factor is (N+1)-dimensional
//! and the joint space has dimension (N+1)·N_Fock.
//!
//! The joint basis is spin-major: `index = m_index · n_fock + n`, with the
//! spin label m running from −J upward and the Fock label n from 0 upward.
//! In this basis — and with the real, non-negative coherent-state amplitudes
//! used throughout — every operator built by this crate is real symmetric,
//! so operators are stored as real matrices and only evolved states carry
//! complex amplitudes.

pub mod dynamics;
mod eigen;
pub mod ergotropy;
pub mod error;
pub mod hilbert;
pub mod qsl;
pub mod sweep;

pub use error::{Error, Result};

/// Scalar precision for all numerical routines: `f32` or `f64`.
pub trait Real:
    nalgebra::RealField + num_traits::FromPrimitive + num_traits::ToPrimitive + Copy
{
}

impl<T> Real for T where
    T: nalgebra::RealField + num_traits::FromPrimitive + num_traits::ToPrimitive + Copy
{
}

/// Complex amplitude over the crate scalar.
pub type Complex<T> = num_complex::Complex<T>;

/// Dense real matrix representing an observable or Hamiltonian
/// (real symmetric in the basis conventions of this crate).
pub type Operator<T> = nalgebra::DMatrix<T>;

/// Real amplitude vector (initial states in this crate are real).
pub type RealVector<T> = nalgebra::DVector<T>;

/// Complex pure state of the joint or reduced system.
pub type StateVector<T> = nalgebra::DVector<Complex<T>>;

/// Double-precision aliases; the CLI and most tests work at this precision.
pub type Operator64 = Operator<f64>;
pub type StateVector64 = StateVector<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type SweepConfig64 = sweep::SweepConfig<f64>;
pub type SweepResult64 = sweep::SweepResult<f64>;

/// Promote a real amplitude vector to a complex state vector.
pub fn to_complex<T: Real>(v: &RealVector<T>) -> StateVector<T> {
    v.map(|x| Complex::new(x, T::zero()))
}

/// Convert an `f64` literal to the crate scalar.
///
/// Panics only if `T` cannot represent ordinary finite constants, which no
/// supported scalar triggers.
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite literal must convert to the scalar type")
}
