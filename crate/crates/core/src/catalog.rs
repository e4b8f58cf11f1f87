//! Named ensembles.
//!
//! Every entry is built from a name and a [`Params`] table. Unknown names
//! fail with `no-such-entry`, unknown or out-of-range parameters with
//! `bad-params`. Probabilities are uniform; selecting a subset with
//! [`Params::indices`] renormalizes them.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::numkit::{ComplexVector, Dims, C64, ONE, ZERO};
use crate::qstate::{Ensemble, PureState};

/// Parameters for [`build`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub values: BTreeMap<String, f64>,
    /// Zero-based member indices to keep, in the given order.
    pub indices: Option<Vec<usize>>,
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn with_indices(mut self, indices: Vec<usize>) -> Self {
        self.indices = Some(indices);
        self
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Content {
    /// Every member is a product state.
    Product,
    /// At least one member is entangled.
    Entangled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    /// Dimensions with default parameters.
    pub dims: (usize, usize),
    /// Member count with default parameters.
    pub members: usize,
    pub content: Content,
    pub orthogonal: bool,
    /// Accepted parameters and their defaults.
    pub params: Vec<(&'static str, f64)>,
    pub description: &'static str,
}

const SQRT7_4: f64 = 0.661_437_827_766_147_8;

/// All entries in a fixed order.
pub fn list() -> Vec<CatalogEntry> {
    use Content::*;
    let e = |name, dims, members, content, params: &[(&'static str, f64)], description| CatalogEntry {
        name,
        dims,
        members,
        content,
        orthogonal: true,
        params: params.to_vec(),
        description,
    };
    vec![
        e(
            "e1-computational",
            (2, 2),
            4,
            Product,
            &[],
            "two-qubit computational basis",
        ),
        e(
            "e2-case2",
            (2, 2),
            4,
            Product,
            &[],
            "{|0+>, |0->, |10>, |11>}, distinguishable only when A starts",
        ),
        e(
            "walgate-hardy",
            (2, 2),
            4,
            Product,
            &[("a1", 0.8), ("b1", 0.6), ("a2", FRAC_1_SQRT_2), ("b2", FRAC_1_SQRT_2)],
            "{|0 n1>, |1 n2>, |0 n1'>, |1 n2'>} with n = a|0> + b|1> and n' its orthogonal complement",
        ),
        e(
            "case-3x2",
            (3, 2),
            6,
            Product,
            &[],
            "qutrit-qubit basis {(|1>+-|2>)|0>, |11>, |21>, |00>, |01>}",
        ),
        e(
            "nlwe-3x3",
            (3, 3),
            9,
            Product,
            &[],
            "nine-state two-qutrit product basis that is not locally distinguishable",
        ),
        e(
            "tiles-upb",
            (3, 3),
            5,
            Product,
            &[],
            "five-state unextendible product basis of two qutrits",
        ),
        e("bell-pair", (2, 2), 2, Entangled, &[], "{phi+, phi-}"),
        e("bell-triple", (2, 2), 3, Entangled, &[], "{phi+, phi-, psi-}"),
        e("bell-full", (2, 2), 4, Entangled, &[], "{phi+, phi-, psi+, psi-}"),
        e(
            "orth-pair",
            (2, 2),
            2,
            Entangled,
            &[("a1", 0.8), ("b1", 0.6), ("a2", 0.75), ("b2", SQRT7_4)],
            "{(|0 n1> + |1 n2>)/sqrt2, (|0 n1'> + |1 n2'>)/sqrt2}",
        ),
        e(
            "ghosh-nonmax",
            (2, 2),
            4,
            Entangled,
            &[("a", 0.8), ("b", 0.6)],
            "{a|00>+b|11>, -b|00>+a|11>, a|01>+b|10>, -b|01>+a|10>}",
        ),
        e(
            "more-nl-mes",
            (3, 3),
            3,
            Entangled,
            &[],
            "three orthogonal maximally entangled two-qutrit states",
        ),
        e(
            "more-nl-mixed",
            (3, 3),
            3,
            Entangled,
            &[],
            "first two states of more-nl-mes together with |01>",
        ),
        e(
            "canonical-mes",
            (3, 3),
            9,
            Entangled,
            &[("d", 3.0)],
            "maximally entangled basis sum_k w^(lk)|k>|k+m>/sqrt d, member index m*d + l",
        ),
    ]
}

pub fn entry(name: &str) -> Result<CatalogEntry> {
    list()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::NoSuchEntry(name.to_string()))
}

pub fn build(name: &str, params: &Params) -> Result<Ensemble> {
    let entry = entry(name)?;
    for key in params.values.keys() {
        if !entry.params.iter().any(|(k, _)| k == key) {
            return Err(Error::BadParams(format!("`{name}` takes no parameter `{key}`")));
        }
    }
    let states = match name {
        "e1-computational" => e1(),
        "e2-case2" => e2(),
        "walgate-hardy" => {
            let (n1, n2) = (qubit(params, &entry, "a1", "b1")?, qubit(params, &entry, "a2", "b2")?);
            walgate_hardy(n1, n2)?
        }
        "case-3x2" => case_3x2(),
        "nlwe-3x3" => nlwe(),
        "tiles-upb" => tiles(),
        "bell-pair" => {
            let b = bell();
            vec![b[0].clone(), b[1].clone()]
        }
        "bell-triple" => {
            let b = bell();
            vec![b[0].clone(), b[1].clone(), b[3].clone()]
        }
        "bell-full" => bell(),
        "orth-pair" => {
            let (n1, n2) = (qubit(params, &entry, "a1", "b1")?, qubit(params, &entry, "a2", "b2")?);
            orth_pair(n1, n2)?
        }
        "ghosh-nonmax" => {
            let [a, b] = qubit(params, &entry, "a", "b")?;
            ghosh(a.re, b.re)
        }
        "more-nl-mes" => more_nl(false),
        "more-nl-mixed" => more_nl(true),
        "canonical-mes" => {
            let d = params.get("d").unwrap_or(3.0);
            if d.fract() != 0.0 || !(2.0..=16.0).contains(&d) {
                return Err(Error::BadParams(format!("d must be an integer in 2..=16, got {d}")));
            }
            canonical_mes(d as usize)
        }
        _ => unreachable!("every listed entry has a builder"),
    };
    let full = Ensemble::uniform(states)?;
    match &params.indices {
        Some(idx) => full.subset(idx),
        None => Ok(full),
    }
}

/// `(a, b)` for a real qubit `a|0> + b|1>`. A missing component is filled in
/// from normalization; explicit values must satisfy `a² + b² = 1`.
fn qubit(params: &Params, entry: &CatalogEntry, ka: &str, kb: &str) -> Result<[C64; 2]> {
    let default = |key: &str| {
        entry
            .params
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .expect("declared parameter")
    };
    let (a, b) = match (params.get(ka), params.get(kb)) {
        (None, None) => (default(ka), default(kb)),
        (Some(a), None) => (a, (1.0 - a * a).max(0.0).sqrt()),
        (None, Some(b)) => ((1.0 - b * b).max(0.0).sqrt(), b),
        (Some(a), Some(b)) => (a, b),
    };
    if !a.is_finite() || !b.is_finite() || a.abs() > 1.0 || b.abs() > 1.0 {
        return Err(Error::BadParams(format!("{ka} = {a}, {kb} = {b} out of range")));
    }
    if (a * a + b * b - 1.0).abs() > 1e-9 {
        return Err(Error::BadParams(format!("{ka}² + {kb}² = {} is not 1", a * a + b * b)));
    }
    Ok([C64::new(a, 0.0), C64::new(b, 0.0)])
}

fn v(entries: &[C64]) -> ComplexVector {
    ComplexVector::new(entries.to_vec()).expect("finite")
}

fn r(entries: &[f64]) -> ComplexVector {
    ComplexVector::from_real(entries).expect("finite")
}

fn prod(a: &[f64], b: &[f64]) -> PureState {
    PureState::product(
        &r(a).normalized().expect("nonzero"),
        &r(b).normalized().expect("nonzero"),
    )
    .expect("valid product")
}

fn perp(n: [C64; 2]) -> [C64; 2] {
    [-n[1].conj(), n[0].conj()]
}

fn e1() -> Vec<PureState> {
    let d = Dims::new(2, 2).expect("dims");
    vec![
        PureState::basis(d, 0, 0),
        PureState::basis(d, 0, 1),
        PureState::basis(d, 1, 0),
        PureState::basis(d, 1, 1),
    ]
}

fn e2() -> Vec<PureState> {
    vec![
        prod(&[1.0, 0.0], &[1.0, 1.0]),
        prod(&[1.0, 0.0], &[1.0, -1.0]),
        prod(&[0.0, 1.0], &[1.0, 0.0]),
        prod(&[0.0, 1.0], &[0.0, 1.0]),
    ]
}

/// Two-qubit product basis `{|0 n1>, |1 n2>, |0 n1'>, |1 n2'>}` for arbitrary
/// normalized qubit states `n1`, `n2`.
pub fn walgate_hardy(n1: [C64; 2], n2: [C64; 2]) -> Result<Vec<PureState>> {
    let zero = v(&[ONE, ZERO]);
    let one = v(&[ZERO, ONE]);
    let (n1, n2) = (v(&n1), v(&n2));
    let (p1, p2) = (perp_vec(&n1), perp_vec(&n2));
    Ok(vec![
        PureState::product(&zero, &n1)?,
        PureState::product(&one, &n2)?,
        PureState::product(&zero, &p1)?,
        PureState::product(&one, &p2)?,
    ])
}

fn perp_vec(n: &ComplexVector) -> ComplexVector {
    v(&perp([n[0], n[1]]))
}

/// `{(|0 n1> + |1 n2>)/√2, (|0 n1'> + |1 n2'>)/√2}`.
pub fn orth_pair(n1: [C64; 2], n2: [C64; 2]) -> Result<Vec<PureState>> {
    let d = Dims::new(2, 2)?;
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let make = |x: [C64; 2], y: [C64; 2]| PureState::new(d, v(&[s * x[0], s * x[1], s * y[0], s * y[1]]));
    Ok(vec![make(n1, n2)?, make(perp(n1), perp(n2))?])
}

fn case_3x2() -> Vec<PureState> {
    vec![
        prod(&[0.0, 1.0, 1.0], &[1.0, 0.0]),
        prod(&[0.0, 1.0, -1.0], &[1.0, 0.0]),
        prod(&[0.0, 1.0, 0.0], &[0.0, 1.0]),
        prod(&[0.0, 0.0, 1.0], &[0.0, 1.0]),
        prod(&[1.0, 0.0, 0.0], &[1.0, 0.0]),
        prod(&[1.0, 0.0, 0.0], &[0.0, 1.0]),
    ]
}

fn nlwe() -> Vec<PureState> {
    vec![
        prod(&[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]),
        prod(&[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0]),
        prod(&[1.0, 0.0, 0.0], &[1.0, -1.0, 0.0]),
        prod(&[0.0, 0.0, 1.0], &[0.0, 1.0, 1.0]),
        prod(&[0.0, 0.0, 1.0], &[0.0, 1.0, -1.0]),
        prod(&[0.0, 1.0, 1.0], &[1.0, 0.0, 0.0]),
        prod(&[0.0, 1.0, -1.0], &[1.0, 0.0, 0.0]),
        prod(&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]),
        prod(&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]),
    ]
}

fn tiles() -> Vec<PureState> {
    vec![
        prod(&[1.0, 0.0, 0.0], &[1.0, -1.0, 0.0]),
        prod(&[0.0, 0.0, 1.0], &[0.0, 1.0, -1.0]),
        prod(&[1.0, -1.0, 0.0], &[0.0, 0.0, 1.0]),
        prod(&[0.0, 1.0, -1.0], &[1.0, 0.0, 0.0]),
        prod(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]),
    ]
}

/// `[φ⁺, φ⁻, ψ⁺, ψ⁻]`.
fn bell() -> Vec<PureState> {
    let d = Dims::new(2, 2).expect("dims");
    let s = FRAC_1_SQRT_2;
    [[s, 0.0, 0.0, s], [s, 0.0, 0.0, -s], [0.0, s, s, 0.0], [0.0, s, -s, 0.0]]
        .iter()
        .map(|a| PureState::from_real(d, a).expect("normalized"))
        .collect()
}

fn ghosh(a: f64, b: f64) -> Vec<PureState> {
    let d = Dims::new(2, 2).expect("dims");
    [[a, 0.0, 0.0, b], [-b, 0.0, 0.0, a], [0.0, a, b, 0.0], [0.0, -b, a, 0.0]]
        .iter()
        .map(|x| PureState::from_real(d, x).expect("normalized"))
        .collect()
}

fn omega(k: usize, d: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64)
}

fn more_nl(mixed: bool) -> Vec<PureState> {
    let d = Dims::new(3, 3).expect("dims");
    let s = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut a1 = vec![ZERO; 9];
    let mut a2 = vec![ZERO; 9];
    for k in 0..3 {
        a1[d.index(k, k)] = s * omega(k, 3);
        a2[d.index(k, k)] = s * omega(2 * k, 3);
    }
    let third = if mixed {
        PureState::basis(d, 0, 1)
    } else {
        let mut a3 = vec![ZERO; 9];
        for k in 0..3 {
            a3[d.index(k, (k + 1) % 3)] = s;
        }
        PureState::new(d, v(&a3)).expect("normalized")
    };
    vec![
        PureState::new(d, v(&a1)).expect("normalized"),
        PureState::new(d, v(&a2)).expect("normalized"),
        third,
    ]
}

/// `|Ψ_lm> = Σ_k ω^{lk} |k>|k+m> / √d` at index `m·d + l`.
pub fn canonical_mes(d: usize) -> Vec<PureState> {
    let dims = Dims::new(d, d).expect("dims");
    let s = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for l in 0..d {
            let mut amp = vec![ZERO; d * d];
            for k in 0..d {
                amp[dims.index(k, (k + m) % d)] = s * omega(l * k, d);
            }
            out.push(PureState::new(dims, v(&amp)).expect("normalized"));
        }
    }
    out
}
