//! Filter banks on discrete abelian groups.
//!
//! A `K`-channel filter bank on a group `G` filters a signal `x` with analysis
//! filters `h_k`, keeps the samples on a finite-index subgroup `M`, and
//! rebuilds `y = sum_k (up_M c_k) * g_k` with synthesis filters `g_k`. This
//! crate represents such banks in the polyphase and modulation domains,
//! decides perfect reconstruction, computes optimal frame and Riesz bounds,
//! and builds canonical dual (synthesis) banks.
//!
//! Two backends are supported:
//!
//! * finite groups `Z_s1 x ... x Z_sd`, where every spectral quantity is
//!   enumerated exactly over the finite dual group;
//! * `Z^d` with `M = M Z^d` for an integer matrix, where polyphase matrices are
//!   Laurent polynomial matrices. Polynomial identities (perfect
//!   reconstruction) are certified exactly; eigenvalue extremes (frame bounds)
//!   are sampled on a torus grid and tagged as such.
//!
//! ```
//! use abelbank::{FilterBank, Group, Lattice, Signal};
//! use num_complex::Complex64;
//!
//! let z4 = Group::cyclic(4)?;
//! let m = Lattice::from_generators(&z4, &[z4.element([2])?])?;
//! let lazy = vec![
//!     Signal::delta(&z4, &z4.element([0])?)?,
//!     Signal::delta(&z4, &z4.element([3])?)?,
//! ];
//! let synth = vec![
//!     Signal::delta(&z4, &z4.element([0])?)?,
//!     Signal::delta(&z4, &z4.element([1])?)?,
//! ];
//! let bank = FilterBank::new(m, lazy, Some(synth))?;
//! assert!(abelbank::check_perfect_reconstruction(&bank, 1e-10)?.holds);
//! # let _ = Complex64::new(0.0, 0.0);
//! # Ok::<(), abelbank::Error>(())
//! ```

pub mod error;
pub mod frames;
pub mod group;
pub mod intmat;
pub mod lattice;
pub mod laurent;
pub mod modulation;
pub mod polyphase;

pub use error::{Error, Result};
pub use frames::{
    canonical_dual, check_dual_frames, frame_bounds, frame_operator_oracle, is_riesz_basis, is_tight,
    BoundMethod, BoundOptions, DualFrameReport, FrameOperator, FrameReport,
};
pub use group::{DualPoint, Group, GroupElement, GroupKind, Signal};
pub use intmat::IntMatrix;
pub use lattice::{Lattice, LatticeSpec, TransversalConvention};
pub use laurent::{LaurentMatrix, LaurentPoly};
pub use modulation::{
    check_mod_polyphase_relation, decimation_sides, decimation_spectrum, modulation_matrix, output_spectrum,
    ModulationData,
};
pub use polyphase::{
    analysis_matrix, apply_filter_bank, check_perfect_reconstruction, fourier_from_polyphase,
    polyphase_forward, polyphase_inverse, predicted_output, predicted_subbands, quincunx_lambda, synthesis_matrix, BankOutput, FilterBank,
    PolyphaseMatrix, PolyphaseVector, PrMethod, PrReport, Role, Spectra,
};

/// Default numerical tolerance for identity checks and verdicts.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default torus resolution (points per dimension) for sampled bounds on `Z^d`.
pub const DEFAULT_GRID: usize = 64;
