//! Holevo quantity, the local Holevo-type bound and their CNOT-transformed
//! counterparts, plus the two-qubit CHSH maximum.
//!
//! Nothing here estimates accessible information itself; only the computable
//! entropy expressions are evaluated.

use crate::error::{Error, Result};
use crate::gates::apply_unchecked;
use crate::qstate::{shannon_bits, Ensemble, PureState};
use crate::quantify::{big_delta, delta_s, Direction, Mode, ModeKind};

/// `S(ρ̄) − Σ p_i S(ρ_i)`; members are pure so the sum vanishes.
pub fn holevo_chi(e: &Ensemble) -> f64 {
    shannon_bits(&e.average_state().eigvalsh().expect("average state is Hermitian"))
}

/// `S(ρ̄^A) + S(ρ̄^B) − max_{X∈{A,B}} Σ p_i S(ρ_i^X)`.
///
/// For pure members both marginals of a member carry the same entropy, so
/// the maximum is the mean entanglement entropy.
pub fn local_holevo(e: &Ensemble) -> f64 {
    let (sa, sb) = e.marginal_entropies();
    (sa + sb - e.mean_local_entropy()).max(0.0)
}

/// Which bound the CNOT-transformed ensemble provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Product input: the transform can only lose local information, so the
    /// original ensemble is at least as accessible as the transformed one.
    Lower,
    /// Entangled input: the transform can only help, so the transformed local
    /// bound caps the original.
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub chi: f64,
    pub local_holevo: f64,
    /// Local bound of the transformed ensemble when the input is product.
    pub cnot_lower: Option<f64>,
    /// Local bound of the transformed ensemble when the input is entangled.
    pub cnot_upper: Option<f64>,
    pub relation: Relation,
    pub mode: Mode,
    pub entangled_before: usize,
    pub entangled_after: usize,
    /// The upper bound only improves on the plain one when some members stay
    /// entangled after the transform.
    pub upper_effective: bool,
}

impl BoundsReport {
    pub fn cnot_bound(&self) -> f64 {
        self.cnot_lower.or(self.cnot_upper).expect("one bound is always set")
    }
}

/// Evaluates both bounds and the local bound of the transformed ensemble.
///
/// The transform is the best right-direction transform of `mode`: the one
/// maximizing generated entanglement for product ensembles, the one
/// maximizing the average-state gap otherwise.
pub fn cnot_bounds(e: &Ensemble, mode: &Mode) -> Result<BoundsReport> {
    if mode.kind == ModeKind::PerStateLu {
        return Err(Error::UnsupportedMode(
            "bounds need a single transform for the whole ensemble".into(),
        ));
    }
    let product = e.is_product();
    let report = if product {
        if mode.kind == ModeKind::Assign {
            return Err(Error::UnsupportedMode(
                "assign applies to the average-state gap only".into(),
            ));
        }
        delta_s(e, mode)?
    } else {
        big_delta(e, mode)?
    };
    let u = report
        .direction(Direction::Right)
        .transform
        .clone()
        .expect("single-transform mode");
    let transformed = e.map_states(|s| apply_unchecked(&u, s));
    let after = local_holevo(&transformed);
    let entangled_before = e.states().filter(|s| !s.is_product()).count();
    let entangled_after = transformed.states().filter(|s| !s.is_product()).count();
    Ok(BoundsReport {
        chi: holevo_chi(e),
        local_holevo: local_holevo(e),
        cnot_lower: product.then_some(after),
        cnot_upper: (!product).then_some(after),
        relation: if product { Relation::Lower } else { Relation::Upper },
        mode: *mode,
        entangled_before,
        entangled_after,
        upper_effective: !product && entangled_after > 0,
    })
}

/// Largest CHSH value of a two-qubit pure state, `2√(1 + C²)` with `C` the
/// concurrence `2|αδ − βγ|`.
pub fn chsh_max(s: &PureState) -> Result<f64> {
    let d = s.dims();
    if (d.a, d.b) != (2, 2) {
        return Err(Error::UnsupportedDims(format!(
            "CHSH needs two qubits, got {}x{}",
            d.a, d.b
        )));
    }
    let a = s.amplitudes();
    let c = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
    Ok(2.0 * (1.0 + c * c).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build, Params};
    use crate::numkit::Dims;

    fn ens(name: &str) -> Ensemble {
        build(name, &Params::default()).unwrap()
    }

    #[test]
    fn bell_basis_values() {
        let e = ens("bell-full");
        assert!((holevo_chi(&e) - 2.0).abs() < 1e-12);
        assert!((local_holevo(&e) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_sets_have_no_subtrahend() {
        let e = ens("nlwe-3x3");
        let (sa, sb) = e.marginal_entropies();
        assert_eq!(local_holevo(&e), sa + sb);
        assert!((local_holevo(&e) - 2.0 * 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn single_state_and_classical_pair() {
        let d = Dims::new(2, 2).unwrap();
        let one = Ensemble::uniform(vec![PureState::basis(d, 0, 0)]).unwrap();
        assert!(holevo_chi(&one).abs() < 1e-12);
        assert!(local_holevo(&one).abs() < 1e-12);
        let pair = Ensemble::uniform(vec![PureState::basis(d, 0, 0), PureState::basis(d, 1, 1)]).unwrap();
        assert!((holevo_chi(&pair) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nlwe_bounds_after_cnot() {
        let r = cnot_bounds(&ens("nlwe-3x3"), &Mode::fixed()).unwrap();
        assert_eq!(r.relation, Relation::Lower);
        assert_eq!(r.entangled_before, 0);
        assert_eq!(r.entangled_after, 4);
        assert!(r.cnot_upper.is_none() && r.cnot_lower.is_some());
    }

    #[test]
    fn orth_pair_upper_bound() {
        let e = ens("orth-pair");
        let r = cnot_bounds(&e, &Mode::fixed()).unwrap();
        assert_eq!(r.relation, Relation::Upper);
        let u = r.cnot_upper.unwrap();
        assert!(u.is_finite() && (0.0..=2.0 + 1e-12).contains(&u));
        assert!(r.entangled_after > 0 && r.upper_effective);
    }

    #[test]
    fn invariant_ensemble_has_equal_bounds() {
        let d = Dims::new(2, 2).unwrap();
        let e = Ensemble::uniform(vec![PureState::basis(d, 0, 0), PureState::basis(d, 0, 1)]).unwrap();
        let r = cnot_bounds(&e, &Mode::fixed()).unwrap();
        assert!((r.cnot_bound() - r.local_holevo).abs() < 1e-12);
    }

    #[test]
    fn per_state_mode_rejected() {
        assert_eq!(
            cnot_bounds(&ens("nlwe-3x3"), &Mode::per_state_lu()).unwrap_err().code(),
            "unsupported-mode"
        );
    }

    #[test]
    fn chsh_extremes() {
        let e = ens("bell-pair");
        let bell = &e.members()[0].1;
        assert!((chsh_max(bell).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let d = Dims::new(2, 2).unwrap();
        assert_eq!(chsh_max(&PureState::basis(d, 0, 0)).unwrap(), 2.0);
        let q = PureState::basis(Dims::new(3, 3).unwrap(), 0, 0);
        assert_eq!(chsh_max(&q).unwrap_err().code(), "unsupported-dims");
    }
}
