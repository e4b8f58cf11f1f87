//! Generalized CNOT, local-unitary embedding and a smooth chart on U(d).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numkit::{ComplexMatrix, ComplexVector, Dims, Party, C64, I, ONE, ZERO};
use crate::qstate::PureState;
use crate::tol::TOL;

/// The basis permutation performed by `repetitions` generalized CNOTs.
///
/// Control A sends `|i, j⟩ → |i, (j + r·i) mod d_B⟩`; control B sends
/// `|i, j⟩ → |(i + r·j) mod d_A, j⟩`. Entry `k` of the result is the image
/// of basis index `k`.
pub fn cnot_permutation(dims: Dims, control: Party, repetitions: usize) -> Vec<usize> {
    let mut perm = Vec::with_capacity(dims.total());
    for i in 0..dims.a {
        for j in 0..dims.b {
            let target = match control {
                Party::A => dims.index(i, (j + repetitions * i) % dims.b),
                Party::B => dims.index((i + repetitions * j) % dims.a, j),
            };
            perm.push(target);
        }
    }
    perm
}

/// Generalized CNOT applied `repetitions` times, as a permutation matrix.
pub fn cnot(dims: Dims, control: Party, repetitions: usize) -> Result<ComplexMatrix> {
    if repetitions == 0 {
        return Err(Error::BadParams("CNOT repetitions must be at least 1".into()));
    }
    let perm = cnot_permutation(dims, control, repetitions);
    let n = dims.total();
    let mut m = ComplexMatrix::zeros(n, n);
    for (src, &dst) in perm.iter().enumerate() {
        m[(dst, src)] = ONE;
    }
    Ok(m)
}

/// Applies a basis permutation to a state vector.
pub fn permute(perm: &[usize], v: &ComplexVector) -> ComplexVector {
    let mut out = vec![ZERO; v.len()];
    for (src, &dst) in perm.iter().enumerate() {
        out[dst] = v[src];
    }
    ComplexVector::new(out).expect("permutation of a valid vector")
}

/// `u ⊗ I` or `I ⊗ u` on the full space.
pub fn embed_local(u: &ComplexMatrix, dims: Dims, side: Party) -> Result<ComplexMatrix> {
    let d = dims.of(side);
    if u.rows() != d || u.cols() != d {
        return Err(Error::BadDims(format!(
            "local unitary on {side} must be {d}x{d}, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    Ok(match side {
        Party::A => u.tensor(&ComplexMatrix::identity(dims.b)),
        Party::B => ComplexMatrix::identity(dims.a).tensor(u),
    })
}

/// Applies a unitary to a state.
pub fn apply(u: &ComplexMatrix, s: &PureState) -> Result<PureState> {
    let n = s.dims().total();
    if u.rows() != n || u.cols() != n {
        return Err(Error::BadDims(format!(
            "operator is {}x{}, state space is {n}",
            u.rows(),
            u.cols()
        )));
    }
    let defect = u.unitary_defect();
    if defect > TOL.unitary {
        return Err(Error::NotUnitary(defect));
    }
    Ok(apply_unchecked(u, s))
}

/// Applies `u` without the unitarity check; the result is renormalized.
pub(crate) fn apply_unchecked(u: &ComplexMatrix, s: &PureState) -> PureState {
    PureState::normalized(s.dims(), u.apply(s.amplitudes())).expect("unitary image of a unit vector")
}

/// Coordinates of a Hermitian generator `H = Σ_k c_k G_k`.
///
/// The fixed basis `G_k` is: diagonal units `E_jj` first, then for each pair
/// `j < k` the symmetric `E_jk + E_kj` followed by the antisymmetric
/// `−iE_jk + iE_kj`. For `dim = 2` the off-diagonal pair is `(σ_x, σ_y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryParam {
    dim: usize,
    coeffs: Vec<f64>,
}

impl UnitaryParam {
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim == 0 || coeffs.len() != dim * dim {
            return Err(Error::BadParams(format!(
                "U({dim}) chart needs {} coordinates, got {}",
                dim * dim,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::BadParams("non-finite coordinate".into()));
        }
        Ok(UnitaryParam { dim, coeffs })
    }

    pub fn zero(dim: usize) -> Self {
        UnitaryParam {
            dim,
            coeffs: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn generator(&self) -> ComplexMatrix {
        generator_from(self.dim, &self.coeffs)
    }

    pub fn to_unitary(&self) -> ComplexMatrix {
        param_to_unitary(self)
    }
}

/// Index in the chart of the symmetric generator on the pair `(j, k)`, `j < k`.
pub fn symmetric_index(dim: usize, j: usize, k: usize) -> usize {
    assert!(j < k && k < dim);
    let before: usize = (0..j).map(|r| dim - 1 - r).sum();
    dim + 2 * (before + (k - j - 1))
}

pub(crate) fn generator_from(dim: usize, coeffs: &[f64]) -> ComplexMatrix {
    debug_assert_eq!(coeffs.len(), dim * dim);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        h[(j, j)] = C64::new(coeffs[j], 0.0);
    }
    let mut idx = dim;
    for j in 0..dim {
        for k in j + 1..dim {
            let (x, y) = (coeffs[idx], coeffs[idx + 1]);
            // x (E_jk + E_kj) + y (−i E_jk + i E_kj)
            h[(j, k)] = C64::new(x, 0.0) - I * y;
            h[(k, j)] = C64::new(x, 0.0) + I * y;
            idx += 2;
        }
    }
    h
}

/// `exp(i·H(p))`.
pub fn param_to_unitary(p: &UnitaryParam) -> ComplexMatrix {
    unitary_from(p.dim, &p.coeffs)
}

pub(crate) fn unitary_from(dim: usize, coeffs: &[f64]) -> ComplexMatrix {
    if coeffs.iter().all(|&c| c == 0.0) {
        return ComplexMatrix::identity(dim);
    }
    generator_from(dim, coeffs)
        .expm_skew_hermitian()
        .expect("generator is Hermitian by construction")
}

/// Haar-random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<ComplexVector> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = ComplexVector::new(
            (0..dim)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        )
        .expect("finite");
        for c in &cols {
            let proj = c.inner(&v);
            v = &v - &c.scale(proj);
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Haar-random unit vector.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    random_unitary(dim, rng).column(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(a: usize, b: usize) -> Dims {
        Dims::new(a, b).unwrap()
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn standard_cnot_on_two_qubits() {
        let c = cnot(d(2, 2), Party::A, 1).unwrap();
        let out = c.apply(&ComplexVector::basis(4, 2));
        assert_eq!(out, ComplexVector::basis(4, 3));
        for j in 0..2 {
            assert_eq!(c.apply(&ComplexVector::basis(4, j)), ComplexVector::basis(4, j));
        }
    }

    #[test]
    fn qubit_cnot_squared_is_identity() {
        assert_eq!(cnot(d(2, 2), Party::A, 2).unwrap(), ComplexMatrix::identity(4));
        assert_eq!(cnot(d(2, 2), Party::B, 2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn qutrit_cnot_entangles_superposed_control() {
        // (|1⟩ + |2⟩)|0⟩/√2 → (|11⟩ + |22⟩)/√2
        let dims = d(3, 3);
        let s = 0.5f64.sqrt();
        let mut amps = vec![0.0; 9];
        amps[dims.index(1, 0)] = s;
        amps[dims.index(2, 0)] = s;
        let psi = PureState::from_real(dims, &amps).unwrap();
        let out = apply(&cnot(dims, Party::A, 1).unwrap(), &psi).unwrap();
        assert!((out.amplitudes()[dims.index(1, 1)].re - s).abs() < 1e-15);
        assert!((out.amplitudes()[dims.index(2, 2)].re - s).abs() < 1e-15);
        assert!((out.entanglement_entropy() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn three_by_two_cnot_uses_mod_two() {
        let dims = d(3, 2);
        let s = 0.5f64.sqrt();
        for sign in [1.0, -1.0] {
            let mut amps = vec![0.0; 6];
            amps[dims.index(1, 0)] = s;
            amps[dims.index(2, 0)] = sign * s;
            let psi = PureState::from_real(dims, &amps).unwrap();
            let out = apply(&cnot(dims, Party::A, 1).unwrap(), &psi).unwrap();
            assert!((out.entanglement_entropy() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cnot_rejects_zero_repetitions() {
        assert!(cnot(d(2, 2), Party::A, 0).is_err());
    }

    #[test]
    fn embed_identity_and_pauli() {
        let dims = d(2, 3);
        assert_eq!(
            embed_local(&ComplexMatrix::identity(2), dims, Party::A).unwrap(),
            ComplexMatrix::identity(6)
        );
        let xb = embed_local(&sigma_x(), d(2, 2), Party::B).unwrap();
        assert_eq!(xb.apply(&ComplexVector::basis(4, 0)), ComplexVector::basis(4, 1));
        assert_eq!(embed_local(&sigma_x(), dims, Party::B).unwrap_err().code(), "bad-dims");
    }

    #[test]
    fn sigma_z_then_cnot_turns_psi_minus_into_product() {
        // (σ_z ⊗ I)|ψ⁻⟩ = |ψ⁺⟩, which the CNOT maps to |+⟩|1⟩.
        let dims = d(2, 2);
        let s = 0.5f64.sqrt();
        let psi_minus = PureState::from_real(dims, &[0.0, s, -s, 0.0]).unwrap();
        let z = embed_local(&sigma_z(), dims, Party::A).unwrap();
        let rotated = apply(&z, &psi_minus).unwrap();
        assert!((rotated.amplitudes()[1].re - s).abs() < 1e-15 && (rotated.amplitudes()[2].re - s).abs() < 1e-15);
        let out = apply(&cnot(dims, Party::A, 1).unwrap(), &rotated).unwrap();
        assert!(out.is_product());
    }

    #[test]
    fn cnot_disentangles_phi_plus() {
        let dims = d(2, 2);
        let s = 0.5f64.sqrt();
        let phi = PureState::from_real(dims, &[s, 0.0, 0.0, s]).unwrap();
        let out = apply(&cnot(dims, Party::A, 1).unwrap(), &phi).unwrap();
        let expected = PureState::from_real(dims, &[s, 0.0, s, 0.0]).unwrap();
        assert!((out.inner(&expected).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn twice_applied_qutrit_cnot_disentangles_phased_ghz() {
        let dims = d(3, 3);
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut amps = vec![ZERO; 9];
        for k in 0..3 {
            amps[dims.index(k, k)] = w.powu(k as u32);
        }
        let psi = PureState::normalized(dims, ComplexVector::new(amps).unwrap()).unwrap();
        let out = apply(&cnot(dims, Party::A, 2).unwrap(), &psi).unwrap();
        assert!(out.is_product());
        let rb = out.reduced(Party::B);
        assert!((rb[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn apply_rejects_non_unitary() {
        let dims = d(2, 2);
        let m = ComplexMatrix::identity(4).scale(C64::new(2.0, 0.0));
        assert_eq!(
            apply(&m, &PureState::basis(dims, 0, 0)).unwrap_err().code(),
            "not-unitary"
        );
    }

    #[test]
    fn zero_param_is_identity() {
        assert_eq!(param_to_unitary(&UnitaryParam::zero(3)), ComplexMatrix::identity(3));
    }

    #[test]
    fn param_reproduces_sigma_x_up_to_phase() {
        let mut coeffs = vec![0.0; 4];
        coeffs[symmetric_index(2, 0, 1)] = std::f64::consts::FRAC_PI_2;
        let u = param_to_unitary(&UnitaryParam::new(2, coeffs).unwrap());
        // exp(i(π/2)σ_x) = iσ_x
        assert!(u.max_abs_diff(&sigma_x().scale(I)) < 1e-14);
    }

    #[test]
    fn two_dim_generators_are_paulis() {
        let gx = generator_from(2, &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(gx, sigma_x());
        let gy = generator_from(2, &[0.0, 0.0, 0.0, 1.0]);
        let sy = ComplexMatrix::new(2, 2, vec![ZERO, -I, I, ZERO]).unwrap();
        assert_eq!(gy, sy);
    }

    #[test]
    fn random_params_give_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 1..=5 {
            let coeffs: Vec<f64> = (0..dim * dim).map(|_| rng.random_range(-4.0..4.0)).collect();
            let u = param_to_unitary(&UnitaryParam::new(dim, coeffs).unwrap());
            assert!(u.unitary_defect() < 1e-10);
        }
        assert!(UnitaryParam::new(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=6 {
            assert!(random_unitary(dim, &mut rng).unitary_defect() < 1e-12);
        }
    }
}
