//! Nonlocal entropy of product ensembles and the average-state entropy gap.
//!
//! Both quantifiers maximize over a family of global unitaries. The family is
//! never implicit: it is fixed by a [`Mode`], and every report carries the
//! mode it was computed under.
//!
//! * `fixed`: the generalized CNOT, repeated `r` times for the best `r` in
//!   `1..d_target`.
//! * `ensemble-lu`: up to `depth` layers of `(U_A ⊗ U_B)` followed by the
//!   CNOT, one parameter set shared by the whole ensemble.
//! * `per-state-lu`: the same family with parameters chosen member by member.
//!   This is an upper-bound flavour and has no single global unitary.
//! * `assign`: for orthogonal ensembles, the best relabelling of the members
//!   onto orthonormal product outputs (average-state gap only).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gates::{cnot, cnot_permutation, permute, unitary_from};
use crate::numkit::{ComplexMatrix, ComplexVector, Dims, Party, C64, ONE, ZERO};
use crate::optimize::{maximize, SearchConfig};
use crate::qstate::{shannon_bits, Ensemble, PureState};
use crate::tol::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeKind {
    Fixed,
    EnsembleLu,
    PerStateLu,
    Assign,
}

impl ModeKind {
    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Fixed => "fixed",
            ModeKind::EnsembleLu => "ensemble-lu",
            ModeKind::PerStateLu => "per-state-lu",
            ModeKind::Assign => "assign",
        }
    }
}

impl FromStr for ModeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(ModeKind::Fixed),
            "ensemble-lu" => Ok(ModeKind::EnsembleLu),
            "per-state-lu" => Ok(ModeKind::PerStateLu),
            "assign" => Ok(ModeKind::Assign),
            other => Err(Error::UnsupportedMode(other.to_string())),
        }
    }
}

/// Which parties' local unitaries the lu modes may use, relative to the
/// CNOT direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalSides {
    Both,
    Target,
    Control,
}

impl LocalSides {
    pub fn name(self) -> &'static str {
        match self {
            LocalSides::Both => "both",
            LocalSides::Target => "target",
            LocalSides::Control => "control",
        }
    }

    fn allows(self, party: Party, dir: Direction) -> bool {
        match self {
            LocalSides::Both => true,
            LocalSides::Target => party == dir.target(),
            LocalSides::Control => party == dir.control(),
        }
    }
}

impl FromStr for LocalSides {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(LocalSides::Both),
            "target" => Ok(LocalSides::Target),
            "control" => Ok(LocalSides::Control),
            other => Err(Error::BadParams(format!("unknown local sides `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub kind: ModeKind,
    /// Maximum number of `(local unitary, CNOT)` layers.
    pub depth: usize,
    pub restarts: usize,
    pub seed: u64,
    pub sides: LocalSides,
    /// Objective evaluations per restart.
    pub max_evals: usize,
}

impl Default for Mode {
    fn default() -> Self {
        Mode {
            kind: ModeKind::Fixed,
            depth: 1,
            restarts: 16,
            seed: 0,
            sides: LocalSides::Both,
            max_evals: SearchConfig::default().max_evals,
        }
    }
}

impl Mode {
    pub fn fixed() -> Self {
        Mode::default()
    }

    pub fn ensemble_lu() -> Self {
        Mode {
            kind: ModeKind::EnsembleLu,
            ..Mode::default()
        }
    }

    pub fn per_state_lu() -> Self {
        Mode {
            kind: ModeKind::PerStateLu,
            ..Mode::default()
        }
    }

    pub fn assign() -> Self {
        Mode {
            kind: ModeKind::Assign,
            ..Mode::default()
        }
    }

    pub fn with_depth(self, depth: usize) -> Self {
        Mode { depth, ..self }
    }

    pub fn with_restarts(self, restarts: usize) -> Self {
        Mode { restarts, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Mode { seed, ..self }
    }

    pub fn with_sides(self, sides: LocalSides) -> Self {
        Mode { sides, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::BadParams("depth must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::BadParams("restarts must be at least 1".into()));
        }
        Ok(())
    }

    fn search(&self, salt: u64) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            seed: self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15),
            max_evals: self.max_evals,
            ..SearchConfig::default()
        }
    }
}

/// `Right` uses A as CNOT control, `Left` uses B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    pub fn control(self) -> Party {
        match self {
            Direction::Right => Party::A,
            Direction::Left => Party::B,
        }
    }

    pub fn target(self) -> Party {
        self.control().other()
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Right => "right",
            Direction::Left => "left",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Extractable-work reading for one party: `log₂ d − S` before and after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkReading {
    pub party: Party,
    pub initial: f64,
    pub fin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Average entanglement generated from a product ensemble.
    NonlocalEntropy,
    /// Reduction of the local entropy of the ensemble-average state.
    AverageGap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalReport {
    pub direction: Direction,
    pub value: f64,
    /// Entanglement entropy of each member after the transform.
    pub contributions: Vec<f64>,
    /// `(S(ρ̄^A) − S(ρ̄'^A), S(ρ̄^B) − S(ρ̄'^B))` at the reported transform.
    pub side_gaps: Option<(f64, f64)>,
    /// Readings for A then B.
    pub work: [WorkReading; 2],
    /// CNOT repetitions per layer; 0 when the transform is not CNOT-based.
    pub repetitions: usize,
    /// Layers used by the best transform; 0 for the identity or assign.
    pub layers: usize,
    pub entangled_after: usize,
    /// The global unitary behind `value`, when a single one exists.
    pub transform: Option<ComplexMatrix>,
}

impl DirectionalReport {
    pub fn entangled_fraction(&self) -> f64 {
        self.entangled_after as f64 / self.contributions.len().max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantifierReport {
    pub quantity: Quantity,
    pub mode: Mode,
    pub right: DirectionalReport,
    pub left: DirectionalReport,
    pub symmetric: f64,
}

impl QuantifierReport {
    fn new(quantity: Quantity, mode: Mode, right: DirectionalReport, left: DirectionalReport) -> Self {
        let symmetric = 0.5 * (right.value + left.value);
        QuantifierReport {
            quantity,
            mode,
            right,
            left,
            symmetric,
        }
    }

    pub fn direction(&self, dir: Direction) -> &DirectionalReport {
        match dir {
            Direction::Right => &self.right,
            Direction::Left => &self.left,
        }
    }
}

fn repetition_range(dims: Dims, dir: Direction) -> std::ops::RangeInclusive<usize> {
    1..=dims.of(dir.target()).saturating_sub(1).max(1)
}

/// Parameter layout of one layer: A's chart (if allowed) then B's.
#[derive(Debug, Clone, Copy)]
struct Layout {
    dims: Dims,
    dir: Direction,
    rotate_a: bool,
    rotate_b: bool,
}

impl Layout {
    fn new(dims: Dims, dir: Direction, sides: LocalSides) -> Self {
        Layout {
            dims,
            dir,
            rotate_a: sides.allows(Party::A, dir),
            rotate_b: sides.allows(Party::B, dir),
        }
    }

    fn per_layer(&self) -> usize {
        let a = if self.rotate_a { self.dims.a * self.dims.a } else { 0 };
        let b = if self.rotate_b { self.dims.b * self.dims.b } else { 0 };
        a + b
    }

    /// `C^r L_k ⋯ C^r L_1` for `k = params.len() / per_layer` layers.
    fn compile(&self, params: &[f64], repetitions: usize) -> ComplexMatrix {
        let per = self.per_layer();
        let (da, db) = (self.dims.a, self.dims.b);
        let c = cnot(self.dims, self.dir.control(), repetitions).expect("repetitions >= 1");
        let mut u = ComplexMatrix::identity(self.dims.total());
        for layer in params.chunks(per) {
            let (pa, pb) = layer.split_at(if self.rotate_a { da * da } else { 0 });
            let ua = if self.rotate_a {
                unitary_from(da, pa)
            } else {
                ComplexMatrix::identity(da)
            };
            let ub = if self.rotate_b {
                unitary_from(db, pb)
            } else {
                ComplexMatrix::identity(db)
            };
            let local = ua.tensor(&ub);
            u = &c * &(&local * &u);
        }
        u
    }
}

fn transform_states(u: &ComplexMatrix, states: &[&PureState]) -> Vec<PureState> {
    states.iter().map(|s| crate::gates::apply_unchecked(u, s)).collect()
}

fn permute_states(perm: &[usize], states: &[&PureState]) -> Vec<PureState> {
    states
        .iter()
        .map(|s| PureState::new(s.dims(), permute(perm, s.amplitudes())).expect("permutation keeps the norm"))
        .collect()
}

fn entropies(states: &[PureState]) -> Vec<f64> {
    states.iter().map(PureState::entanglement_entropy).collect()
}

fn weighted(p: &[f64], c: &[f64]) -> f64 {
    p.iter().zip(c).map(|(p, c)| p * c).sum()
}

fn count_entangled(states: &[PureState]) -> usize {
    states.iter().filter(|s| !s.is_product()).count()
}

/// `(log₂ d − S(ρ̄^X)` readings from the average reduced states.
fn average_reduced_entropies(dims: Dims, probs: &[f64], states: &[PureState]) -> (f64, f64) {
    let mut ra = ComplexMatrix::zeros(dims.a, dims.a);
    let mut rb = ComplexMatrix::zeros(dims.b, dims.b);
    for (p, s) in probs.iter().zip(states) {
        let w = C64::new(*p, 0.0);
        ra = &ra + &s.reduced(Party::A).scale(w);
        rb = &rb + &s.reduced(Party::B).scale(w);
    }
    (
        shannon_bits(&ra.eigvalsh().expect("Hermitian")),
        shannon_bits(&rb.eigvalsh().expect("Hermitian")),
    )
}

// ---------------------------------------------------------------------------
// Nonlocal entropy
// ---------------------------------------------------------------------------

/// Nonlocal entropy of a product ensemble in both directions.
pub fn delta_s(e: &Ensemble, mode: &Mode) -> Result<QuantifierReport> {
    mode.validate()?;
    if let Some(k) = e.first_entangled() {
        return Err(Error::NotProductEnsemble(k));
    }
    let right = delta_direction(e, mode, Direction::Right)?;
    let left = delta_direction(e, mode, Direction::Left)?;
    Ok(QuantifierReport::new(Quantity::NonlocalEntropy, *mode, right, left))
}

fn delta_direction(e: &Ensemble, mode: &Mode, dir: Direction) -> Result<DirectionalReport> {
    let dims = e.dims();
    let probs = e.probabilities();
    let states: Vec<&PureState> = e.states().collect();

    let (contributions, repetitions, layers, transform) = match mode.kind {
        ModeKind::Fixed => {
            let (c, r) = fixed_generation(dims, dir, &probs, &states);
            let u = cnot(dims, dir.control(), r)?;
            (c, r, 1, Some(u))
        }
        ModeKind::EnsembleLu => {
            let best = ensemble_generation(dims, dir, mode, &probs, &states);
            let layout = Layout::new(dims, dir, mode.sides);
            let u = layout.compile(&best.params, best.repetitions);
            (best.contributions, best.repetitions, best.layers, Some(u))
        }
        ModeKind::PerStateLu => {
            let c = per_state_generation(dims, dir, mode, &probs, &states);
            (c, 0, 0, None)
        }
        ModeKind::Assign => {
            return Err(Error::UnsupportedMode(
                "assign applies to the average-state gap only".into(),
            ));
        }
    };

    let value = weighted(&probs, &contributions).max(0.0);
    let log_a = (dims.a as f64).log2();
    let log_b = (dims.b as f64).log2();
    let initial: f64 = probs
        .iter()
        .zip(&states)
        .map(|(p, s)| p * s.entanglement_entropy())
        .sum();
    let work = [
        WorkReading {
            party: Party::A,
            initial: log_a - initial,
            fin: log_a - value,
        },
        WorkReading {
            party: Party::B,
            initial: log_b - initial,
            fin: log_b - value,
        },
    ];
    let entangled_after = contributions.iter().filter(|&&c| c > 1e-9).count();
    Ok(DirectionalReport {
        direction: dir,
        value,
        contributions,
        side_gaps: None,
        work,
        repetitions,
        layers,
        entangled_after,
        transform,
    })
}

/// Entanglement per member after the best fixed CNOT power.
fn fixed_generation(dims: Dims, dir: Direction, probs: &[f64], states: &[&PureState]) -> (Vec<f64>, usize) {
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    for r in repetition_range(dims, dir) {
        let perm = cnot_permutation(dims, dir.control(), r);
        let c = entropies(&permute_states(&perm, states));
        let v = weighted(probs, &c);
        if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
            best = Some((v, c, r));
        }
    }
    let (_, c, r) = best.expect("non-empty repetition range");
    (c, r)
}

struct LayeredBest {
    value: f64,
    params: Vec<f64>,
    repetitions: usize,
    layers: usize,
    contributions: Vec<f64>,
}

/// Best score over the layered family, maximizing over the repetitions inside
/// the objective. `score` maps transformed states to a scalar.
fn layered_search<S>(
    dims: Dims,
    dir: Direction,
    mode: &Mode,
    states: &[&PureState],
    salt: u64,
    score: S,
) -> Vec<LayeredBest>
where
    S: Fn(&[PureState]) -> f64 + Sync,
{
    let layout = Layout::new(dims, dir, mode.sides);
    let per = layout.per_layer();
    (1..=mode.depth)
        .map(|k| {
            let n = per * k;
            let eval = |p: &[f64], r: usize| score(&transform_states(&layout.compile(p, r), states));
            let objective = |p: &[f64]| {
                repetition_range(dims, dir)
                    .map(|r| eval(p, r))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let out = maximize(&objective, n, &[vec![0.0; n]], &mode.search(salt ^ (k as u64) << 8));
            let repetitions = repetition_range(dims, dir)
                .map(|r| (r, eval(&out.params, r)))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
                .0;
            let outputs = transform_states(&layout.compile(&out.params, repetitions), states);
            LayeredBest {
                value: out.value,
                params: out.params,
                repetitions,
                layers: k,
                contributions: entropies(&outputs),
            }
        })
        .collect()
}

fn pick_best(results: Vec<LayeredBest>) -> LayeredBest {
    results
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("depth >= 1")
}

fn ensemble_generation(dims: Dims, dir: Direction, mode: &Mode, probs: &[f64], states: &[&PureState]) -> LayeredBest {
    let salt = 0x10 | dir as u64;
    pick_best(layered_search(dims, dir, mode, states, salt, |out| {
        weighted(probs, &entropies(out))
    }))
}

fn per_state_generation(dims: Dims, dir: Direction, mode: &Mode, probs: &[f64], states: &[&PureState]) -> Vec<f64> {
    let layout = Layout::new(dims, dir, mode.sides);
    let per = layout.per_layer();
    let shared = layered_search(dims, dir, mode, states, 0x10 | dir as u64, |out| {
        weighted(probs, &entropies(out))
    });
    let mut contributions: Vec<f64> = pick_best_contributions(&shared);
    for (i, state) in states.iter().enumerate() {
        for (k, shared_k) in shared.iter().enumerate() {
            let n = per * (k + 1);
            let objective = |p: &[f64]| {
                repetition_range(dims, dir)
                    .map(|r| crate::gates::apply_unchecked(&layout.compile(p, r), state).entanglement_entropy())
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let starts = [vec![0.0; n], shared_k.params.clone()];
            let salt = 0x1000 + ((i as u64) << 4) + ((k as u64) << 2) + dir as u64;
            let out = maximize(&objective, n, &starts, &mode.search(salt));
            contributions[i] = contributions[i].max(out.value);
        }
    }
    contributions
}

fn pick_best_contributions(results: &[LayeredBest]) -> Vec<f64> {
    let n = results[0].contributions.len();
    (0..n)
        .map(|i| results.iter().map(|r| r.contributions[i]).fold(0.0, f64::max))
        .collect()
}

// ---------------------------------------------------------------------------
// Average-state gap
// ---------------------------------------------------------------------------

/// Average-state local-entropy gap in both directions.
pub fn big_delta(e: &Ensemble, mode: &Mode) -> Result<QuantifierReport> {
    mode.validate()?;
    let (right, left) = match mode.kind {
        ModeKind::Fixed | ModeKind::EnsembleLu => (
            gap_direction(e, mode, Direction::Right)?,
            gap_direction(e, mode, Direction::Left)?,
        ),
        ModeKind::Assign => {
            let report = assign_gap(e)?;
            let mut left = report.clone();
            left.direction = Direction::Left;
            (report, left)
        }
        ModeKind::PerStateLu => {
            return Err(Error::UnsupportedMode(
                "the average-state gap needs one transform for the whole ensemble".into(),
            ));
        }
    };
    Ok(QuantifierReport::new(Quantity::AverageGap, *mode, right, left))
}

struct GapEval {
    gaps: (f64, f64),
    finals: (f64, f64),
    outputs: Vec<PureState>,
}

fn gap_of(dims: Dims, probs: &[f64], initial: (f64, f64), outputs: Vec<PureState>) -> GapEval {
    let finals = average_reduced_entropies(dims, probs, &outputs);
    GapEval {
        gaps: (initial.0 - finals.0, initial.1 - finals.1),
        finals,
        outputs,
    }
}

fn score(g: &GapEval) -> f64 {
    g.gaps.0.max(g.gaps.1)
}

fn gap_direction(e: &Ensemble, mode: &Mode, dir: Direction) -> Result<DirectionalReport> {
    let dims = e.dims();
    let probs = e.probabilities();
    let states: Vec<&PureState> = e.states().collect();
    let initial = e.marginal_entropies();

    let (eval, repetitions, layers, transform) = match mode.kind {
        ModeKind::Fixed => {
            let mut best: Option<(GapEval, usize)> = None;
            for r in repetition_range(dims, dir) {
                let perm = cnot_permutation(dims, dir.control(), r);
                let g = gap_of(dims, &probs, initial, permute_states(&perm, &states));
                if best.as_ref().is_none_or(|(b, _)| score(&g) > score(b)) {
                    best = Some((g, r));
                }
            }
            let (g, r) = best.expect("non-empty repetition range");
            (g, r, 1, cnot(dims, dir.control(), r)?)
        }
        ModeKind::EnsembleLu => {
            let salt = 0x20 | dir as u64;
            let best = pick_best(layered_search(dims, dir, mode, &states, salt, |out| {
                let f = average_reduced_entropies(dims, &probs, out);
                (initial.0 - f.0).max(initial.1 - f.1)
            }));
            let layout = Layout::new(dims, dir, mode.sides);
            let u = layout.compile(&best.params, best.repetitions);
            let g = gap_of(dims, &probs, initial, transform_states(&u, &states));
            (g, best.repetitions, best.layers, u)
        }
        _ => unreachable!("handled by big_delta"),
    };

    // The identity belongs to every family, so a transform that raises both
    // local entropies is never reported.
    let (eval, repetitions, layers, transform) = if score(&eval) < 0.0 {
        let outputs: Vec<PureState> = states.iter().map(|s| (*s).clone()).collect();
        (
            gap_of(dims, &probs, initial, outputs),
            0,
            0,
            ComplexMatrix::identity(dims.total()),
        )
    } else {
        (eval, repetitions, layers, transform)
    };

    Ok(gap_report(
        dims,
        dir,
        initial,
        eval,
        repetitions,
        layers,
        Some(transform),
    ))
}

fn gap_report(
    dims: Dims,
    dir: Direction,
    initial: (f64, f64),
    eval: GapEval,
    repetitions: usize,
    layers: usize,
    transform: Option<ComplexMatrix>,
) -> DirectionalReport {
    let log_a = (dims.a as f64).log2();
    let log_b = (dims.b as f64).log2();
    let contributions = entropies(&eval.outputs);
    DirectionalReport {
        direction: dir,
        value: score(&eval).max(0.0),
        side_gaps: Some(eval.gaps),
        work: [
            WorkReading {
                party: Party::A,
                initial: log_a - initial.0,
                fin: log_a - eval.finals.0,
            },
            WorkReading {
                party: Party::B,
                initial: log_b - initial.1,
                fin: log_b - eval.finals.1,
            },
        ],
        repetitions,
        layers,
        entangled_after: count_entangled(&eval.outputs),
        contributions,
        transform,
    }
}

/// A relabelling of an orthogonal ensemble onto orthonormal product outputs.
///
/// With `reduced = B`, members are packed into groups of at most `d_A`; the
/// member at slot `t` of group `g` is sent to `|t⟩_A|g⟩_B`, so the B marginal
/// of the average output carries only the group masses. `reduced = A` is the
/// mirror image.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub reduced: Party,
    pub groups: Vec<Vec<usize>>,
    pub outputs: Vec<PureState>,
    pub unitary: ComplexMatrix,
}

impl Assignment {
    pub fn group_masses(&self, probs: &[f64]) -> Vec<f64> {
        self.groups.iter().map(|g| g.iter().map(|&i| probs[i]).sum()).collect()
    }
}

/// Groups that minimize the entropy of the group masses: sort by
/// probability and fill groups to capacity. The resulting mass vector
/// majorizes every other feasible one.
pub fn greedy_groups(probs: &[f64], capacity: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&i, &j| probs[j].total_cmp(&probs[i]).then(i.cmp(&j)));
    order.chunks(capacity.max(1)).map(|c| c.to_vec()).collect()
}

pub fn assignment(e: &Ensemble, reduced: Party) -> Result<Assignment> {
    let defect = e.gram_defect();
    if defect > TOL.gram {
        return Err(Error::GramNotIdentity(defect));
    }
    let dims = e.dims();
    let capacity = dims.of(reduced.other());
    let groups = greedy_groups(&e.probabilities(), capacity);
    debug_assert!(
        groups.len() <= dims.of(reduced),
        "orthogonal ensembles have at most d_A·d_B members"
    );
    let mut outputs: Vec<Option<PureState>> = vec![None; e.len()];
    for (g, group) in groups.iter().enumerate() {
        for (t, &member) in group.iter().enumerate() {
            let (i, j) = match reduced {
                Party::B => (t, g),
                Party::A => (g, t),
            };
            outputs[member] = Some(PureState::basis(dims, i, j));
        }
    }
    let outputs: Vec<PureState> = outputs.into_iter().map(|o| o.expect("every member assigned")).collect();
    let inputs: Vec<&ComplexVector> = e.states().map(PureState::amplitudes).collect();
    let targets: Vec<&ComplexVector> = outputs.iter().map(PureState::amplitudes).collect();
    let unitary = unitary_between(&inputs, &targets);
    Ok(Assignment {
        reduced,
        groups,
        outputs,
        unitary,
    })
}

/// A unitary sending each orthonormal `inputs[i]` to `outputs[i]`, completed
/// on the orthogonal complements.
pub fn unitary_between(inputs: &[&ComplexVector], outputs: &[&ComplexVector]) -> ComplexMatrix {
    assert_eq!(inputs.len(), outputs.len());
    let n = inputs.first().map(|v| v.len()).expect("non-empty frame");
    let complete = |frame: &[&ComplexVector]| -> Vec<ComplexVector> {
        let mut basis: Vec<ComplexVector> = frame.iter().map(|v| (*v).clone()).collect();
        for k in 0..n {
            if basis.len() == n {
                break;
            }
            let mut v = ComplexVector::basis(n, k);
            // Two Gram-Schmidt passes keep the completion orthonormal to round-off.
            for _ in 0..2 {
                for b in &basis {
                    let c = b.inner(&v);
                    v = &v - &b.scale(c);
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                basis.push(v.scale(C64::new(1.0 / norm, 0.0)));
            }
        }
        basis
    };
    let from = complete(inputs);
    let to = complete(outputs);
    let mut u = ComplexMatrix::zeros(n, n);
    for (f, t) in from.iter().zip(&to) {
        for i in 0..n {
            if t[i] == ZERO {
                continue;
            }
            for j in 0..n {
                u[(i, j)] += t[i] * f[j].conj();
            }
        }
    }
    u
}

fn assign_gap(e: &Ensemble) -> Result<DirectionalReport> {
    let dims = e.dims();
    let probs = e.probabilities();
    let initial = e.marginal_entropies();
    let mut best: Option<(GapEval, Assignment)> = None;
    for reduced in [Party::B, Party::A] {
        let a = assignment(e, reduced)?;
        let g = gap_of(dims, &probs, initial, a.outputs.clone());
        if best.as_ref().is_none_or(|(b, _)| score(&g) > score(b)) {
            best = Some((g, a));
        }
    }
    let (eval, a) = best.expect("two candidates");
    Ok(gap_report(dims, Direction::Right, initial, eval, 0, 0, Some(a.unitary)))
}

/// Identity matrix helper used by callers that need the trivial transform.
pub fn identity_transform(dims: Dims) -> ComplexMatrix {
    ComplexMatrix::from_fn(dims.total(), dims.total(), |i, j| if i == j { ONE } else { ZERO })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build, Params};

    fn ens(name: &str) -> Ensemble {
        build(name, &Params::default()).unwrap()
    }

    fn h2(p: f64) -> f64 {
        shannon_bits(&[p, 1.0 - p])
    }

    #[test]
    fn computational_basis_has_no_nonlocal_entropy() {
        let r = delta_s(&ens("e1-computational"), &Mode::fixed()).unwrap();
        assert!(r.right.value.abs() <= 1e-12 && r.left.value.abs() <= 1e-12 && r.symmetric.abs() <= 1e-12);
    }

    #[test]
    fn case_two_is_directional() {
        let r = delta_s(&ens("e2-case2"), &Mode::fixed()).unwrap();
        assert!(r.right.value.abs() < 1e-12);
        assert!((r.left.value - 0.5).abs() < 1e-12);
        assert!((r.symmetric - 0.25).abs() < 1e-12);
        assert_eq!(r.left.entangled_after, 2);
    }

    #[test]
    fn nlwe_fixed_value() {
        let r = delta_s(&ens("nlwe-3x3"), &Mode::fixed()).unwrap();
        assert!((r.right.value - 4.0 / 9.0).abs() < 1e-12);
        assert!((r.left.value - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn three_by_two_fixed_value() {
        let r = delta_s(&ens("case-3x2"), &Mode::fixed()).unwrap();
        assert!((r.right.value - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.left.value.abs() < 1e-12);
    }

    #[test]
    fn upb_fixed_value() {
        let r = delta_s(&ens("tiles-upb"), &Mode::fixed()).unwrap();
        assert!((r.right.value - 0.4).abs() < 1e-12);
        assert!((r.left.value - 0.4).abs() < 1e-12);
    }

    #[test]
    fn delta_rejects_entangled_members() {
        let err = delta_s(&ens("bell-pair"), &Mode::fixed()).unwrap_err();
        assert_eq!(err.code(), "not-product-ensemble");
    }

    #[test]
    fn delta_rejects_assign_mode() {
        assert_eq!(
            delta_s(&ens("e1-computational"), &Mode::assign()).unwrap_err().code(),
            "unsupported-mode"
        );
    }

    #[test]
    fn work_reading_matches_contribution() {
        let r = delta_s(&ens("nlwe-3x3"), &Mode::fixed()).unwrap();
        let w = r.right.work[0];
        assert!((w.initial - w.fin - r.right.value).abs() < 1e-12);
        assert!((w.initial - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn ensemble_lu_depth_one_reproduces_fixed_at_zero() {
        for name in ["e2-case2", "nlwe-3x3", "tiles-upb", "case-3x2"] {
            let e = ens(name);
            let fixed = delta_s(&e, &Mode::fixed()).unwrap();
            let cfg = Mode::ensemble_lu().with_restarts(1);
            let cfg = Mode { max_evals: 1, ..cfg };
            let lu = delta_s(&e, &cfg).unwrap();
            assert_eq!(lu.right.value, fixed.right.value, "{name}");
            assert_eq!(lu.left.value, fixed.left.value, "{name}");
        }
    }

    #[test]
    fn mode_ordering_on_case_two() {
        let e = ens("e2-case2");
        let fixed = delta_s(&e, &Mode::fixed()).unwrap();
        let lu = delta_s(&e, &Mode::ensemble_lu().with_restarts(4)).unwrap();
        let ps = delta_s(&e, &Mode::per_state_lu().with_restarts(4)).unwrap();
        for dir in [Direction::Right, Direction::Left] {
            let (f, l, p) = (
                fixed.direction(dir).value,
                lu.direction(dir).value,
                ps.direction(dir).value,
            );
            assert!(f <= l + 1e-9 && l <= p + 1e-9, "{dir}: {f} {l} {p}");
        }
        // Two-qubit product states reach a Bell state under a suitable local frame.
        assert!((ps.right.value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn bell_pair_gap() {
        for mode in [Mode::fixed(), Mode::assign()] {
            let r = big_delta(&ens("bell-pair"), &mode).unwrap();
            assert!((r.right.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_triple_gap() {
        let expected = 1.0 - h2(1.0 / 3.0);
        for mode in [Mode::fixed(), Mode::assign()] {
            let r = big_delta(&ens("bell-triple"), &mode).unwrap();
            assert!((r.right.value - expected).abs() < 1e-12, "{:?}", mode.kind);
        }
    }

    #[test]
    fn full_bell_basis_gap_vanishes() {
        for mode in [Mode::fixed(), Mode::assign()] {
            let r = big_delta(&ens("bell-full"), &mode).unwrap();
            assert!(r.right.value.abs() < 1e-12);
        }
    }

    #[test]
    fn more_nonlocal_sets() {
        let mes = big_delta(&ens("more-nl-mes"), &Mode::assign()).unwrap();
        assert!((mes.right.value - 3f64.log2()).abs() < 1e-12);
        let mixed = big_delta(&ens("more-nl-mixed"), &Mode::assign()).unwrap();
        let expected = shannon_bits(&[5.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0]);
        assert!((mixed.right.value - expected).abs() < 1e-12);
        assert!(mixed.right.value < 3f64.log2());
    }

    #[test]
    fn assign_requires_orthogonality() {
        let e = Ensemble::uniform(vec![
            PureState::basis(Dims::new(2, 2).unwrap(), 0, 0),
            PureState::from_real(Dims::new(2, 2).unwrap(), &[1.0, 1.0, 0.0, 0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(big_delta(&e, &Mode::assign()).unwrap_err().code(), "gram-not-identity");
    }

    #[test]
    fn per_state_mode_rejected_for_gap() {
        assert_eq!(
            big_delta(&ens("bell-pair"), &Mode::per_state_lu()).unwrap_err().code(),
            "unsupported-mode"
        );
    }

    #[test]
    fn assignment_unitary_realizes_outputs() {
        for name in ["bell-triple", "more-nl-mixed", "nlwe-3x3", "canonical-mes"] {
            let e = ens(name);
            for side in [Party::A, Party::B] {
                let a = assignment(&e, side).unwrap();
                assert!(a.unitary.unitary_defect() < 1e-9, "{name}");
                for (s, out) in e.states().zip(&a.outputs) {
                    let mapped = a.unitary.apply(s.amplitudes());
                    assert!((&mapped - out.amplitudes()).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn greedy_groups_fill_largest_first() {
        let g = greedy_groups(&[0.1, 0.4, 0.2, 0.3], 3);
        assert_eq!(g, vec![vec![1, 3, 2], vec![0]]);
    }

    #[test]
    fn gap_never_negative_under_fixed_mode() {
        // Product states whose average is pure on both sides cannot lose entropy.
        let e = Ensemble::uniform(vec![PureState::from_real(
            Dims::new(2, 2).unwrap(),
            &[1.0, 1.0, 1.0, 1.0],
        )
        .unwrap()])
        .unwrap();
        let r = big_delta(&e, &Mode::fixed()).unwrap();
        assert!(r.right.value >= 0.0 && r.left.value >= 0.0);
    }

    #[test]
    fn mode_validation() {
        let e = ens("e1-computational");
        assert!(delta_s(&e, &Mode::fixed().with_depth(0)).is_err());
        assert!(delta_s(&e, &Mode::fixed().with_restarts(0)).is_err());
        assert_eq!("ensemble-lu".parse::<ModeKind>().unwrap(), ModeKind::EnsembleLu);
        assert!("nope".parse::<ModeKind>().is_err());
    }

    /// Smallest entropy over every assignment of members to at most
    /// `groups` labelled groups of at most `capacity` members.
    fn exhaustive_min_entropy(probs: &[f64], capacity: usize, groups: usize) -> f64 {
        let k = probs.len();
        let mut best = f64::INFINITY;
        let mut labels = vec![0usize; k];
        loop {
            let mut masses = vec![0.0; groups];
            let mut counts = vec![0usize; groups];
            for (i, &g) in labels.iter().enumerate() {
                masses[g] += probs[i];
                counts[g] += 1;
            }
            if counts.iter().all(|&c| c <= capacity) {
                best = best.min(shannon_bits(&masses));
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    return best;
                }
                labels[pos] += 1;
                if labels[pos] < groups {
                    break;
                }
                labels[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn greedy_grouping_matches_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let capacity = rng.random_range(2..=3);
            let groups = rng.random_range(2..=3);
            let k = rng.random_range(2..=capacity * groups);
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
            let g = greedy_groups(&probs, capacity);
            let masses: Vec<f64> = g.iter().map(|g| g.iter().map(|&i| probs[i]).sum()).collect();
            let oracle = exhaustive_min_entropy(&probs, capacity, groups);
            assert!((shannon_bits(&masses) - oracle).abs() < 1e-12, "{probs:?}");
        }
    }

    #[test]
    fn parallel_parts_reducible_yet_entangling() {
        // Both B parts equal |+>: the basis splits from B ({1,2} vs {3,4}),
        // but a control-B CNOT still entangles |0+> and |1+>.
        use crate::dissect::{reducible_from, ProductSet};
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [C64::new(h, 0.0), C64::new(h, 0.0)];
        let e = Ensemble::uniform(crate::catalog::walgate_hardy(plus, plus).unwrap()).unwrap();
        let set = ProductSet::from_ensemble(&e).unwrap();
        assert!(reducible_from(&set, Party::B).unwrap().is_some());
        let r = delta_s(&e, &Mode::fixed()).unwrap();
        assert!((r.left.value - 1.0).abs() < 1e-12);
        assert!(r.right.value.abs() < 1e-12);
    }

    #[test]
    fn b_side_rotation_reaches_maximal_entanglement() {
        // Rotating the uniform qutrit on B to |0> before the CNOT gives a
        // maximally entangled output.
        let s = PureState::from_real(Dims::new(3, 3).unwrap(), &[1.0; 9].map(|x| x / 3.0)).unwrap();
        let c = cnot(s.dims(), Party::A, 1).unwrap();
        let objective = |u: &ComplexMatrix| {
            let local = ComplexMatrix::identity(3).tensor(u);
            crate::gates::apply_unchecked(&(&c * &local), &s).entanglement_entropy()
        };
        let (v, _) = crate::optimize::optimize_unitary(objective, 3, 8, 0);
        assert!((v - 3f64.log2()).abs() < 1e-4, "{v}");
    }
}
