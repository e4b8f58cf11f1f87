//! Quantifiers of local indistinguishability for bipartite pure-state
//! ensembles.
//!
//! The crate measures how much entanglement a CNOT-type global operation
//! generates from a product ensemble ([`delta_s`]) and how far a global
//! unitary can lower the local entropy of an ensemble's average state
//! ([`big_delta`]). Orthogonal product sets can be dissected by local
//! orthogonal-subspace splits ([`dissect()`], [`classify`]), and the
//! [`infobounds`] module evaluates Holevo-type bounds.
//!
//! ```
//! use nle_core::{build, delta_s, Mode, Params};
//!
//! let e = build("nlwe-3x3", &Params::default()).unwrap();
//! let r = delta_s(&e, &Mode::fixed()).unwrap();
//! assert!((r.right.value - 4.0 / 9.0).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod catalog;
pub mod dissect;
pub mod error;
pub mod gates;
pub mod infobounds;
pub mod numkit;
pub mod optimize;
pub mod qstate;
pub mod quantify;
pub mod reproduce;
pub mod tol;

pub use catalog::{build, list, CatalogEntry, Params};
pub use dissect::{
    classify, dissect, reducible_from, weighted_nonlocal_entropy, Classification, DissectionTree, ProductSet,
};
pub use error::{Error, Result};
pub use gates::{apply, cnot, embed_local, param_to_unitary, UnitaryParam};
pub use infobounds::{chsh_max, cnot_bounds, holevo_chi, local_holevo, BoundsReport};
pub use numkit::{eigh, expm_skew_hermitian, partial_trace, tensor, ComplexMatrix, ComplexVector, Dims, Party, C64};
pub use optimize::optimize_unitary;
pub use qstate::{entanglement_entropy, schmidt, vn_entropy, Ensemble, PureState, Schmidt};
pub use quantify::{big_delta, delta_s, Direction, LocalSides, Mode, ModeKind, QuantifierReport};
pub use tol::TOL;
