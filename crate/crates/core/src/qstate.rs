//! Bipartite pure states, ensembles and their entropies.

use crate::error::{Error, Result};
use crate::numkit::{gram, ComplexMatrix, ComplexVector, Dims, Party, C64, ZERO};
use crate::tol::TOL;

/// Von Neumann entropy in bits.
///
/// Eigenvalues below the entropy cutoff contribute nothing (`0 log 0 = 0`).
pub fn vn_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > TOL.trace || tr.im.abs() > TOL.trace {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    let w = rho.eigvalsh()?;
    if let Some(&min) = w.first() {
        if min < -TOL.psd {
            return Err(Error::NotAState(format!("negative eigenvalue {min:.3e}")));
        }
    }
    Ok(shannon_bits(&w))
}

/// Shannon entropy of a probability vector in bits.
pub fn shannon_bits(p: &[f64]) -> f64 {
    let h: f64 = p
        .iter()
        .filter(|&&x| x > TOL.entropy_cutoff)
        .map(|&x| -x * x.log2())
        .sum();
    h.max(0.0)
}

/// A normalized pure state of a bipartite system.
///
/// The amplitude of `|i⟩_A|j⟩_B` lives at index `i·d_B + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Dims,
    amplitudes: ComplexVector,
}

/// Schmidt decomposition `Σ_k λ_k |u_k⟩|v_k⟩`, coefficients descending.
#[derive(Debug, Clone)]
pub struct Schmidt {
    pub coefficients: Vec<f64>,
    pub left: Vec<ComplexVector>,
    pub right: Vec<ComplexVector>,
}

impl Schmidt {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_product(&self) -> bool {
        self.coefficients
            .first()
            .map(|c| c * c >= 1.0 - TOL.product)
            .unwrap_or(false)
    }
}

impl PureState {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(dims: Dims, amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::BadDims(format!(
                "{dims} state needs {} amplitudes, got {}",
                dims.total(),
                amplitudes.len()
            )));
        }
        let n = amplitudes.norm();
        if (n - 1.0).abs() > TOL.norm {
            return Err(Error::NotNormalized(n));
        }
        Ok(PureState { dims, amplitudes })
    }

    /// Normalizes the given amplitudes first.
    pub fn normalized(dims: Dims, amplitudes: ComplexVector) -> Result<Self> {
        Self::new(dims, amplitudes.normalized()?)
    }

    pub fn from_real(dims: Dims, amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(dims, ComplexVector::from_real(amplitudes)?)
    }

    /// `|a⟩ ⊗ |b⟩`, each factor normalized.
    pub fn product(a: &ComplexVector, b: &ComplexVector) -> Result<Self> {
        let dims = Dims::new(a.len(), b.len())?;
        Self::new(dims, a.normalized()?.tensor(&b.normalized()?))
    }

    /// Computational basis state `|i⟩|j⟩`.
    pub fn basis(dims: Dims, i: usize, j: usize) -> Self {
        PureState {
            dims,
            amplitudes: ComplexVector::basis(dims.total(), dims.index(i, j)),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.inner(&other.amplitudes)
    }

    pub fn density(&self) -> ComplexMatrix {
        self.amplitudes.projector()
    }

    /// Reduced density matrix of `party`.
    pub fn reduced(&self, party: Party) -> ComplexMatrix {
        // Work from the d_A x d_B coefficient matrix rather than the full projector.
        let d = self.dims;
        let m = self.coefficients();
        match party {
            Party::A => ComplexMatrix::from_fn(d.a, d.a, |i, k| (0..d.b).map(|j| m[(i, j)] * m[(k, j)].conj()).sum()),
            Party::B => ComplexMatrix::from_fn(d.b, d.b, |j, l| (0..d.a).map(|i| m[(i, j)] * m[(i, l)].conj()).sum()),
        }
    }

    /// The amplitudes reshaped as a `d_A × d_B` matrix.
    pub fn coefficients(&self) -> ComplexMatrix {
        let d = self.dims;
        ComplexMatrix::from_fn(d.a, d.b, |i, j| self.amplitudes[d.index(i, j)])
    }

    pub fn schmidt(&self) -> Schmidt {
        let m = self.coefficients();
        let rho_a = self.reduced(Party::A);
        let (w, u) = rho_a.eigh().expect("reduced state is Hermitian by construction");
        let mut coefficients = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for k in (0..w.len()).rev() {
            if w[k] <= TOL.schmidt_zero {
                continue;
            }
            let sigma = w[k].sqrt();
            let uk = u.column(k);
            // v_k = Mᵀ conj(u_k) / σ_k
            let vk = ComplexVector::new(
                (0..self.dims.b)
                    .map(|j| (0..self.dims.a).map(|i| m[(i, j)] * uk[i].conj()).sum::<C64>() / sigma)
                    .collect(),
            )
            .expect("finite");
            coefficients.push(sigma);
            left.push(uk);
            right.push(vk);
        }
        Schmidt {
            coefficients,
            left,
            right,
        }
    }

    pub fn is_product(&self) -> bool {
        self.schmidt().is_product()
    }

    /// Entanglement entropy `S(tr_B |ψ⟩⟨ψ|)` in bits.
    pub fn entanglement_entropy(&self) -> f64 {
        let smaller = if self.dims.a <= self.dims.b { Party::A } else { Party::B };
        let w = self
            .reduced(smaller)
            .eigvalsh()
            .expect("reduced state is Hermitian by construction");
        shannon_bits(&w)
    }

    /// Splits a product state into its two normalized factors.
    pub fn factors(&self) -> Option<(ComplexVector, ComplexVector)> {
        let s = self.schmidt();
        if !s.is_product() {
            return None;
        }
        let a = s.left[0].clone();
        // Absorb the (unit-modulus) remainder into the B factor.
        let b = s.right[0].clone();
        Some((a, b))
    }
}

pub fn entanglement_entropy(s: &PureState) -> f64 {
    s.entanglement_entropy()
}

pub fn schmidt(s: &PureState) -> Schmidt {
    s.schmidt()
}

/// A probability-weighted list of pure states on common dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dims: Dims,
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let dims = members
            .first()
            .map(|(_, s)| s.dims())
            .ok_or_else(|| Error::BadProbabilities("empty ensemble".into()))?;
        if let Some((_, s)) = members.iter().find(|(_, s)| s.dims() != dims) {
            return Err(Error::BadDims(format!("member dims {} differ from {dims}", s.dims())));
        }
        if let Some((p, _)) = members.iter().find(|(p, _)| !(*p > 0.0 && *p <= 1.0)) {
            return Err(Error::BadProbabilities(format!("probability {p} outside (0, 1]")));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > TOL.probability_sum {
            return Err(Error::BadProbabilities(format!("probabilities sum to {total}")));
        }
        Ok(Ensemble { dims, members })
    }

    /// Equal weights `1/k`.
    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        Self::new(states.into_iter().map(|s| (p, s)).collect())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.members.iter().map(|(p, _)| *p).collect()
    }

    pub fn states(&self) -> impl Iterator<Item = &PureState> {
        self.members.iter().map(|(_, s)| s)
    }

    /// The members at `indices`, probabilities renormalized.
    pub fn subset(&self, indices: &[usize]) -> Result<Ensemble> {
        if indices.is_empty() {
            return Err(Error::BadParams("empty subset".into()));
        }
        let mut seen = vec![false; self.len()];
        for &i in indices {
            if i >= self.len() || seen[i] {
                return Err(Error::BadParams(format!(
                    "subset index {i} invalid for {} members",
                    self.len()
                )));
            }
            seen[i] = true;
        }
        let mass: f64 = indices.iter().map(|&i| self.members[i].0).sum();
        Ensemble::new(
            indices
                .iter()
                .map(|&i| (self.members[i].0 / mass, self.members[i].1.clone()))
                .collect(),
        )
    }

    pub fn gram(&self) -> ComplexMatrix {
        let vs: Vec<ComplexVector> = self.states().map(|s| s.amplitudes().clone()).collect();
        gram(&vs).expect("members share dimensions")
    }

    /// Deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        self.gram().max_abs_diff(&ComplexMatrix::identity(self.len()))
    }

    pub fn is_orthogonal(&self) -> bool {
        self.gram_defect() <= TOL.gram
    }

    pub fn is_product(&self) -> bool {
        self.states().all(PureState::is_product)
    }

    /// Index of the first member with Schmidt rank above one.
    pub fn first_entangled(&self) -> Option<usize> {
        self.states().position(|s| !s.is_product())
    }

    pub fn average_state(&self) -> ComplexMatrix {
        let n = self.dims.total();
        let mut rho = ComplexMatrix::zeros(n, n);
        for (p, s) in &self.members {
            let a = s.amplitudes();
            for i in 0..n {
                if a[i] == ZERO {
                    continue;
                }
                for j in 0..n {
                    rho[(i, j)] += a[i] * a[j].conj() * *p;
                }
            }
        }
        rho
    }

    /// Weighted average of the members' reduced states on `party`.
    pub fn average_reduced(&self, party: Party) -> ComplexMatrix {
        let d = self.dims.of(party);
        let mut out = ComplexMatrix::zeros(d, d);
        for (p, s) in &self.members {
            out = &out + &s.reduced(party).scale(C64::new(*p, 0.0));
        }
        out
    }

    /// `(S(ρ̄^A), S(ρ̄^B))` for the average state.
    pub fn marginal_entropies(&self) -> (f64, f64) {
        let sa = self.average_reduced(Party::A).eigvalsh().expect("Hermitian");
        let sb = self.average_reduced(Party::B).eigvalsh().expect("Hermitian");
        (shannon_bits(&sa), shannon_bits(&sb))
    }

    /// `Σ_i p_i S(ρ_i^party)`.
    pub fn mean_local_entropy(&self) -> f64 {
        self.members.iter().map(|(p, s)| p * s.entanglement_entropy()).sum()
    }

    /// Applies `f` to every member, keeping probabilities.
    pub fn map_states(&self, f: impl Fn(&PureState) -> PureState) -> Ensemble {
        Ensemble {
            dims: self.dims,
            members: self.members.iter().map(|(p, s)| (*p, f(s))).collect(),
        }
    }
}

pub fn average_state(e: &Ensemble) -> ComplexMatrix {
    e.average_state()
}

pub fn marginal_entropies(e: &Ensemble) -> (f64, f64) {
    e.marginal_entropies()
}
