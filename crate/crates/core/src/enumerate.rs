//! Admissible values of the degree of mobility of Einstein metrics, of the
//! dimension of essential projective vector fields, the affine-only lists and
//! the plot data comparing Riemannian and Lorentzian signature.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureClass {
    Riemannian,
    Lorentzian,
}

impl FromStr for SignatureClass {
    type Err = EnumerateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "riemannian" => Ok(SignatureClass::Riemannian),
            "lorentzian" => Ok(SignatureClass::Lorentzian),
            other => Err(EnumerateError::Unknown(other.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Degree of mobility with a non-affine projectively equivalent metric.
    NonAffine,
    AffineOnlyNonzeroScal,
    AffineOnlyRicciFlat,
    /// Dimension of the space of essential projective vector fields.
    ProjectiveDims,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    GenericShared,
    LorentzExtra,
    Maximal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedValue {
    pub value: usize,
    pub tags: Vec<Tag>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueList {
    pub n: usize,
    pub class: Option<SignatureClass>,
    pub regime: Regime,
    pub values: Vec<TaggedValue>,
}

impl ValueList {
    pub fn numbers(&self) -> Vec<usize> {
        self.values.iter().map(|v| v.value).collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.values.iter().any(|t| t.value == v)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("dimension {0} is below 3")]
    DimensionTooSmall(usize),
    #[error("range [{0}, {1}] must lie within [3, 64]")]
    RangeOutOfBounds(usize, usize),
    #[error("unknown value `{0}`")]
    Unknown(String),
}

fn tri(k: usize) -> usize {
    k * (k + 1) / 2
}

fn check(n: usize) -> Result<(), EnumerateError> {
    if n < 3 {
        Err(EnumerateError::DimensionTooSmall(n))
    } else {
        Ok(())
    }
}

/// First bullet: k(k+1)/2 + l, 0 ≤ k ≤ n−4, 1 ≤ l ≤ ⌊(n+1−k)/5⌋ (all values, unfiltered).
fn shared_bullet(n: usize) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    if n >= 5 {
        for k in 0..=n - 4 {
            for l in 1..=(n + 1 - k) / 5 {
                s.insert(tri(k) + l);
            }
        }
    }
    s
}

/// Second bullet: k ≡ n−3 mod 5, 2 ≤ k ≤ n−3, l = ⌊(n+2−k)/5⌋.
fn lorentz_bullet(n: usize) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    if n >= 5 {
        for k in 2..=n - 3 {
            if k % 5 == (n - 3) % 5 {
                s.insert(tri(k) + (n + 2 - k) / 5);
            }
        }
    }
    s
}

fn tagged(
    n: usize,
    class: Option<SignatureClass>,
    regime: Regime,
    shared: &BTreeSet<usize>,
    extra: &BTreeSet<usize>,
    maximal: usize,
) -> ValueList {
    let mut all: BTreeSet<usize> = shared.iter().chain(extra).copied().collect();
    all.insert(maximal);
    let values = all
        .into_iter()
        .map(|v| {
            let mut tags = Vec::new();
            if shared.contains(&v) {
                tags.push(Tag::GenericShared);
            } else if extra.contains(&v) {
                tags.push(Tag::LorentzExtra);
            }
            if v == maximal {
                tags.push(Tag::Maximal);
            }
            TaggedValue { value: v, tags }
        })
        .collect();
    ValueList {
        n,
        class,
        regime,
        values,
    }
}

/// Values ≥ 2 admissible for the degree of mobility of an n-dimensional
/// Einstein metric admitting a non-affine projectively equivalent metric.
pub fn mobility_values(n: usize, class: SignatureClass) -> Result<ValueList, EnumerateError> {
    check(n)?;
    let shared: BTreeSet<usize> = shared_bullet(n).into_iter().filter(|&v| v >= 2).collect();
    let extra: BTreeSet<usize> = match class {
        SignatureClass::Riemannian => BTreeSet::new(),
        SignatureClass::Lorentzian => lorentz_bullet(n)
            .into_iter()
            .filter(|&v| v >= 2 && !shared.contains(&v))
            .collect(),
    };
    Ok(tagged(
        n,
        Some(class),
        Regime::NonAffine,
        &shared,
        &extra,
        (n + 1) * (n + 2) / 2,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AffineRegime {
    NonzeroScal,
    RicciFlat,
}

impl FromStr for AffineRegime {
    type Err = EnumerateError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nonzero-scal" | "nonzero_scal" => Ok(AffineRegime::NonzeroScal),
            "ricci-flat" | "ricci_flat" => Ok(AffineRegime::RicciFlat),
            other => Err(EnumerateError::Unknown(other.into())),
        }
    }
}

/// Degree of mobility when every projectively equivalent metric is affinely equivalent.
pub fn affine_only_values(n: usize, regime: AffineRegime) -> Result<ValueList, EnumerateError> {
    check(n)?;
    let (kmax, div) = match regime {
        AffineRegime::NonzeroScal => (n - 2, 2),
        AffineRegime::RicciFlat => (n.saturating_sub(4), 4),
    };
    let mut shared = BTreeSet::new();
    if regime == AffineRegime::NonzeroScal || n >= 4 {
        for k in 0..=kmax {
            for l in 1..=(n - k) / div {
                shared.insert(tri(k) + l);
            }
        }
    }
    let r = match regime {
        AffineRegime::NonzeroScal => Regime::AffineOnlyNonzeroScal,
        AffineRegime::RicciFlat => Regime::AffineOnlyRicciFlat,
    };
    Ok(tagged(n, None, r, &shared, &BTreeSet::new(), n * (n + 1) / 2))
}

/// Values ≥ 1 for dim(p(g)/i(g)): each mobility value minus one.
pub fn projective_dim_values(n: usize, class: SignatureClass) -> Result<ValueList, EnumerateError> {
    let m = mobility_values(n, class)?;
    let values = m
        .values
        .into_iter()
        .filter(|v| v.value >= 2)
        .map(|v| TaggedValue {
            value: v.value - 1,
            tags: v.tags,
        })
        .collect();
    Ok(ValueList {
        n,
        class: Some(class),
        regime: Regime::ProjectiveDims,
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure1Row {
    pub n: usize,
    /// Values admissible in both signatures.
    pub shared: Vec<usize>,
    /// Values admissible only for Lorentzian metrics.
    pub lorentz_extra: Vec<usize>,
}

pub fn figure1_table(from: usize, to: usize) -> Result<Vec<Figure1Row>, EnumerateError> {
    if from < 3 || to > 64 || from > to {
        return Err(EnumerateError::RangeOutOfBounds(from, to));
    }
    (from..=to)
        .map(|n| {
            let riem = mobility_values(n, SignatureClass::Riemannian)?.numbers();
            let lor = mobility_values(n, SignatureClass::Lorentzian)?.numbers();
            let extra = lor.into_iter().filter(|v| !riem.contains(v)).collect();
            Ok(Figure1Row {
                n,
                shared: riem,
                lorentz_extra: extra,
            })
        })
        .collect()
}

/// Tab-separated rows `n value lorentz_extra` with a header line.
pub fn figure1_tsv(rows: &[Figure1Row]) -> String {
    let mut out = String::from("n\tvalue\tlorentz_extra\n");
    for r in rows {
        let mut all: Vec<(usize, u8)> = r
            .shared
            .iter()
            .map(|&v| (v, 0))
            .chain(r.lorentz_extra.iter().map(|&v| (v, 1)))
            .collect();
        all.sort();
        for (v, flag) in all {
            let _ = writeln!(out, "{}\t{}\t{}", r.n, v, flag);
        }
    }
    out
}
