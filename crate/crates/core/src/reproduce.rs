//! Reference values recomputed from scratch, as a regression table.

use crate::catalog::{build, Params};
use crate::dissect::{classify, Classification, ProductSet};
use crate::error::Result;
use crate::infobounds::{holevo_chi, local_holevo};
use crate::numkit::Party;
use crate::qstate::{shannon_bits, Ensemble};
use crate::quantify::{big_delta, delta_s, LocalSides, Mode};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Stated in the literature.
    Published,
    /// Worked out by hand from the definitions.
    Derived,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Published => "published",
            Source::Derived => "derived",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// `|got − expected| ≤ tol`.
    Close { tol: f64 },
    /// `got ≥ expected − tol`.
    AtLeast { tol: f64 },
    /// `lo < got < hi`.
    Between { lo: f64, hi: f64 },
    /// Labels must match; `got`/`expected` are unused.
    Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub expected: f64,
    pub got: f64,
    pub check: Check,
    pub source: Source,
    pub expected_label: Option<String>,
    pub got_label: Option<String>,
}

impl Row {
    pub fn passed(&self) -> bool {
        match self.check {
            Check::Close { tol } => (self.got - self.expected).abs() <= tol,
            Check::AtLeast { tol } => self.got >= self.expected - tol,
            Check::Between { lo, hi } => lo < self.got && self.got < hi,
            Check::Label => self.expected_label == self.got_label,
        }
    }

    pub fn expected_text(&self) -> String {
        match (&self.check, &self.expected_label) {
            (Check::Label, Some(l)) => l.clone(),
            (Check::AtLeast { .. }, _) => format!(">= {:.6}", self.expected),
            (Check::Between { lo, hi }, _) => format!("in ({lo:.6}, {hi:.6})"),
            _ => format!("{:.6}", self.expected),
        }
    }

    pub fn got_text(&self) -> String {
        match &self.got_label {
            Some(l) => l.clone(),
            None => format!("{:.6}", self.got),
        }
    }
}

fn row(label: impl Into<String>, expected: f64, got: f64, check: Check, source: Source) -> Row {
    Row {
        label: label.into(),
        expected,
        got,
        check,
        source,
        expected_label: None,
        got_label: None,
    }
}

fn close(label: impl Into<String>, expected: f64, got: f64, tol: f64, source: Source) -> Row {
    row(label, expected, got, Check::Close { tol }, source)
}

fn ens(name: &str) -> Result<Ensemble> {
    build(name, &Params::default())
}

fn h2(p: f64) -> f64 {
    shannon_bits(&[p, 1.0 - p])
}

/// Recomputes every reference value. `restarts` and `seed` feed the
/// optimizer-based rows.
pub fn reproduce(restarts: usize, seed: u64) -> Result<Vec<Row>> {
    use Source::*;
    let fixed = Mode::fixed();
    let assign = Mode::assign();
    let mut rows = Vec::new();

    let r = delta_s(&ens("e1-computational")?, &fixed)?;
    rows.push(close("E1 fixed delta_sym", 0.0, r.symmetric, 1e-12, Published));

    let r = delta_s(&ens("e2-case2")?, &fixed)?;
    rows.push(close("E2 fixed delta_right", 0.0, r.right.value, 1e-9, Published));
    rows.push(close("E2 fixed delta_left", 0.5, r.left.value, 1e-9, Published));
    rows.push(close("E2 fixed delta_sym", 0.25, r.symmetric, 1e-9, Published));

    let r = delta_s(&ens("case-3x2")?, &fixed)?;
    rows.push(close(
        "3x2 fixed delta_right",
        1.0 / 3.0,
        r.right.value,
        1e-9,
        Published,
    ));

    let r = delta_s(&ens("nlwe-3x3")?, &fixed)?;
    rows.push(close(
        "NLWE fixed delta_right",
        4.0 / 9.0,
        r.right.value,
        1e-9,
        Published,
    ));
    rows.push(close("NLWE fixed delta_left", 4.0 / 9.0, r.left.value, 1e-9, Published));

    let upb = ens("tiles-upb")?;
    let r = delta_s(&upb, &fixed)?;
    rows.push(close("UPB fixed delta_right", 0.4, r.right.value, 1e-9, Derived));
    let ps = Mode::per_state_lu()
        .with_sides(LocalSides::Target)
        .with_restarts(restarts)
        .with_seed(seed);
    let r = delta_s(&upb, &ps)?;
    let upb_target = (2.0 + 3f64.log2()) / 5.0;
    rows.push(row(
        "UPB per-state-lu delta_right",
        upb_target,
        r.right.value,
        Check::AtLeast { tol: 1e-3 },
        Published,
    ));
    rows.push(row(
        "UPB per-state-lu delta_left",
        upb_target,
        r.left.value,
        Check::AtLeast { tol: 1e-3 },
        Published,
    ));

    let pair = ens("bell-pair")?;
    rows.push(close(
        "bell-pair fixed Delta_right",
        1.0,
        big_delta(&pair, &fixed)?.right.value,
        1e-9,
        Published,
    ));
    rows.push(close(
        "bell-pair assign Delta_right",
        1.0,
        big_delta(&pair, &assign)?.right.value,
        1e-9,
        Published,
    ));

    let r = big_delta(&ens("bell-triple")?, &assign)?;
    rows.push(close(
        "bell-triple assign Delta_right",
        1.0 - h2(1.0 / 3.0),
        r.right.value,
        5e-4,
        Published,
    ));

    let full = ens("bell-full")?;
    rows.push(close(
        "bell-full assign Delta_right",
        0.0,
        big_delta(&full, &assign)?.right.value,
        1e-9,
        Published,
    ));
    rows.push(close(
        "bell-full fixed Delta_right",
        0.0,
        big_delta(&full, &fixed)?.right.value,
        1e-9,
        Published,
    ));

    let r = big_delta(&ens("orth-pair")?, &fixed)?;
    rows.push(close(
        "orth-pair fixed Delta_right",
        0.0007,
        r.right.value,
        2e-4,
        Published,
    ));
    rows.push(close("orth-pair fixed Delta_left", 0.0, r.left.value, 1e-6, Published));

    for b in [0.1, 0.3, 0.5, 0.7] {
        let p = Params::new().with("b", b).with_indices(vec![0, 1, 2]);
        let r = big_delta(&build("ghosh-nonmax", &p)?, &fixed)?;
        let b2 = b * b;
        let expected = (2.0 - (2.0 - b2) * (2.0 - b2).log2() - (1.0 + b2) * (1.0 + b2).log2()) / 3.0;
        rows.push(close(
            format!("ghosh b={b} first three Delta_right"),
            expected,
            r.right.value,
            1e-9,
            Published,
        ));
    }
    let r = big_delta(&ens("ghosh-nonmax")?, &assign)?;
    rows.push(close("ghosh full set Delta_right", 0.0, r.right.value, 1e-9, Published));
    for i in 0..4 {
        for j in i + 1..4 {
            let r = big_delta(
                &build("ghosh-nonmax", &Params::new().with_indices(vec![i, j]))?,
                &assign,
            )?;
            rows.push(close(
                format!("ghosh pair {{{},{}}} Delta_right", i + 1, j + 1),
                1.0,
                r.right.value,
                1e-9,
                Published,
            ));
        }
    }

    let r = big_delta(&ens("more-nl-mes")?, &assign)?;
    rows.push(close(
        "more-nl-mes assign Delta_right",
        3f64.log2(),
        r.right.value,
        1e-9,
        Published,
    ));
    let r = big_delta(&ens("more-nl-mixed")?, &assign)?;
    rows.push(close(
        "more-nl-mixed assign Delta_right",
        1.43552,
        r.right.value,
        1e-4,
        Published,
    ));

    for d in [2usize, 3] {
        let log_d = (d as f64).log2();
        let with = |idx: Vec<usize>| build("canonical-mes", &Params::new().with("d", d as f64).with_indices(idx));
        let block = big_delta(&with((0..d).collect())?, &fixed)?;
        rows.push(close(
            format!("canonical d={d} one block"),
            log_d,
            block.right.value,
            1e-9,
            Published,
        ));
        let all = big_delta(&with((0..d * d).collect())?, &fixed)?;
        rows.push(close(
            format!("canonical d={d} all states"),
            0.0,
            all.right.value,
            1e-9,
            Published,
        ));
        let more = big_delta(&with((0..=d).collect())?, &fixed)?;
        rows.push(row(
            format!("canonical d={d} d+1 states"),
            0.0,
            more.right.value,
            Check::Between { lo: 0.0, hi: log_d },
            Published,
        ));
    }

    for (name, expected) in [
        ("e1-computational", Classification::DissectibleEitherSide),
        ("e2-case2", Classification::DissectibleOneSide(Party::A)),
        ("case-3x2", Classification::DissectibleOneSide(Party::B)),
        ("nlwe-3x3", Classification::NonDissectible),
        ("tiles-upb", Classification::NonDissectible),
    ] {
        let got = classify(&ProductSet::from_ensemble(&ens(name)?)?);
        rows.push(Row {
            label: format!("{name} classification"),
            expected: 0.0,
            got: 0.0,
            check: Check::Label,
            source: Published,
            expected_label: Some(expected.to_string()),
            got_label: Some(got.to_string()),
        });
    }

    rows.push(close("bell-full chi", 2.0, holevo_chi(&full), 1e-9, Derived));
    rows.push(close("bell-full local_holevo", 1.0, local_holevo(&full), 1e-9, Derived));
    rows.push(close(
        "NLWE local_holevo",
        2.0 * 3f64.log2(),
        local_holevo(&ens("nlwe-3x3")?),
        1e-9,
        Derived,
    ));
    Ok(rows)
}
