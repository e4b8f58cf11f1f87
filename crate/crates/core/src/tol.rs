//! Numerical tolerances shared by every module.

/// Tolerance record. All checks in the crate read from [`TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise `M = M†` check for matrices flagged Hermitian.
    pub hermitian: f64,
    /// Looser Hermiticity gate for inputs to `eigh` and `vn_entropy`.
    pub hermitian_input: f64,
    /// `‖M†M − I‖_max` for matrices flagged unitary.
    pub unitary: f64,
    /// Unit norm of state vectors.
    pub norm: f64,
    /// Probabilities summing to one.
    pub probability_sum: f64,
    /// Gram matrix equal to identity.
    pub gram: f64,
    /// `|⟨a|b⟩|` below this counts as orthogonal.
    pub orthogonal: f64,
    /// Most negative eigenvalue still accepted as PSD.
    pub psd: f64,
    /// Trace of a density matrix.
    pub trace: f64,
    /// Eigenvalues below this contribute nothing to an entropy.
    pub entropy_cutoff: f64,
    /// Largest squared Schmidt coefficient at or above `1 - product` means product.
    pub product: f64,
    /// Squared Schmidt coefficients at or below this are dropped.
    pub schmidt_zero: f64,
    /// Jacobi sweeps stop when the off-diagonal Frobenius mass drops below
    /// `jacobi * ‖M‖_F`.
    pub jacobi: f64,
}

pub const TOL: Tolerances = Tolerances {
    hermitian: 1e-12,
    hermitian_input: 1e-10,
    unitary: 1e-10,
    norm: 1e-10,
    probability_sum: 1e-10,
    gram: 1e-9,
    orthogonal: 1e-9,
    psd: 1e-10,
    trace: 1e-10,
    entropy_cutoff: 1e-12,
    product: 1e-10,
    schmidt_zero: 1e-14,
    jacobi: 1e-15,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}
