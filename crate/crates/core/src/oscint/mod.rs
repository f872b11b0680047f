//! Oscillating integrals `J_0(a) = (2π)^{-n} ∬ e^{is·ξ} a(s, ξ) ds dξ` for
//! compactly supported amplitudes, the regularizing transpose `L^t`, and the
//! operators `P_a u = J(a(s, ξ) α_{-s}(u))`.

mod amplitude;
mod checks;
mod integral;
mod lt;

pub use amplitude::{
    mapped, Amplitude, AmplitudeRef, FdPartial, FnAmplitude, Mapped, MappedAmplitude, Profile, SeparableAmplitude,
    SeparableTerm, SupportBox, Var, FD_STEP,
};
pub use checks::{j_properties_check, lt_invariance, JPropertyReport};
pub use integral::{fourier_transform, inverse_fourier, j0, j0_with_refinement, p_from_amplitude, J0Report};
pub use lt::{apply_lt, LtAmplitude};
