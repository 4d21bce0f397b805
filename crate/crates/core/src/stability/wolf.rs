//! The shipped table of Wolf spaces and their classification.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    eval_count, index_i1, theorem_a, EigenDim, LambdaMin, SpectralInput, StabilityError,
    StabilityReport,
};
use crate::qfield::RationalFn;
use crate::repcalc::{weyl_dim, SpnWeight};

const BUILTIN: &str = include_str!("../../data/wolf_spaces.json");

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Betti {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b2: Option<RationalFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b4: Option<RationalFn>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordDim {
    pub lambda: RationalFn,
    pub dim: RationalFn,
}

/// `(HE)_{λ₁}` as an irreducible `Sp(n + rank_offset)`-module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeModule {
    pub rank_offset: i64,
    pub weight: Vec<u32>,
}

/// One Wolf space, or a family of them indexed by `n`. Numeric fields are
/// expressions in `n`; eigenvalues are multiples of `scal`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WolfSpaceRecord {
    pub name: String,
    pub quotient: String,
    pub n_min: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<i64>,
    pub lambda_min_functions: LambdaMin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_listed_through: Option<RationalFn>,
    #[serde(default)]
    pub eigenvalue_dims: Vec<RecordDim>,
    pub iso_dim: RationalFn,
    #[serde(default)]
    pub betti: Betti,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<RationalFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_he_at_lambda1: Option<RationalFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub he_lambda1_module: Option<HeModule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_sym2hsym2e_at_lambda1: Option<RationalFn>,
    /// `i0 = i^{0,n+2}`, `i1 = i^{1,n+1}`, `i2 = i^{2,n}`.
    #[serde(default)]
    pub index_values: BTreeMap<String, RationalFn>,
    /// Eigenspace dimensions at `λ₃`, keyed by bundle.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lambda3_dims: BTreeMap<String, RationalFn>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sharpness: Vec<String>,
    pub source: String,
}

impl WolfSpaceRecord {
    pub fn exists_at(&self, n: i64) -> bool {
        n >= self.n_min && self.n_max.is_none_or(|m| n <= m)
    }

    fn check_n(&self, n: i64) -> Result<(), StabilityError> {
        if self.exists_at(n) {
            Ok(())
        } else {
            Err(StabilityError::Domain(format!(
                "{} is not defined at n = {n}",
                self.name
            )))
        }
    }

    fn count(&self, f: &RationalFn, n: i64, what: &str) -> Result<i64, StabilityError> {
        eval_count(f, n, &format!("{} {what}", self.name))
    }

    fn dim(&self, f: &RationalFn, n: i64, what: &str) -> Result<u64, StabilityError> {
        u64::try_from(self.count(f, n, what)?).map_err(|_| {
            StabilityError::Domain(format!("{} {what} is negative at n = {n}", self.name))
        })
    }

    pub fn index(&self, key: &str, n: i64) -> Result<Option<i64>, StabilityError> {
        self.index_values
            .get(key)
            .map(|f| self.count(f, n, key))
            .transpose()
    }

    pub fn spectral_input(&self, n: i64) -> Result<SpectralInput, StabilityError> {
        self.check_n(n)?;
        let opt_dim = |f: &Option<RationalFn>, what: &str| {
            f.as_ref().map(|f| self.dim(f, n, what)).transpose()
        };
        Ok(SpectralInput {
            n,
            lambda_min_functions: match &self.lambda_min_functions {
                LambdaMin::Exact(v) => LambdaMin::Exact(v.specialize(n)?),
                LambdaMin::Above(v) => LambdaMin::Above(v.specialize(n)?),
            },
            eigenvalue_dims: self
                .eigenvalue_dims
                .iter()
                .map(|d| {
                    Ok(EigenDim {
                        lambda: d.lambda.specialize(n)?,
                        dim: self.dim(&d.dim, n, "eigenspace dimension")?,
                    })
                })
                .collect::<Result<_, StabilityError>>()?,
            spectrum_listed_through: self
                .spectrum_listed_through
                .as_ref()
                .map(|t| t.specialize(n))
                .transpose()?,
            dim_sym2hsym2e_at_lambda1: opt_dim(
                &self.dim_sym2hsym2e_at_lambda1,
                "dim (Sym2HSym2E)_lambda1",
            )?,
            dim_he_at_lambda1: opt_dim(&self.dim_he_at_lambda1, "dim (HE)_lambda1")?,
            index_i1: self.index("i1", n)?,
            iso_dim: self.dim(&self.iso_dim, n, "iso_dim")?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WolfTable {
    pub records: Vec<WolfSpaceRecord>,
}

impl WolfTable {
    pub fn builtin() -> WolfTable {
        WolfTable::from_json(BUILTIN).expect("shipped Wolf table is valid")
    }

    pub fn from_json(text: &str) -> Result<WolfTable, StabilityError> {
        let t: WolfTable = serde_json::from_str(text)?;
        for r in &t.records {
            if r.source.trim().is_empty() {
                return Err(StabilityError::Domain(format!(
                    "{} cites no source",
                    r.name
                )));
            }
            if r.n_min < 2 || r.n_max.is_some_and(|m| m < r.n_min) {
                return Err(StabilityError::Domain(format!(
                    "{} has an empty range of n",
                    r.name
                )));
            }
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<WolfTable, StabilityError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StabilityError::Io(format!("{}: {e}", path.display())))?;
        WolfTable::from_json(&text)
    }

    pub fn get(&self, name: &str) -> Option<&WolfSpaceRecord> {
        self.records.iter().find(|r| r.name == name)
    }
}

/// `i^{2,2} = 2χ − b₂ + b₄ − i^{0,4} + i^{1,3}` for a space with `n = 2`;
/// `i^{0,4}` defaults to the dimension of the isometry group.
pub fn fino_salamon_check(record: &WolfSpaceRecord) -> Result<i64, StabilityError> {
    if record.n_min != 2 || record.n_max != Some(2) {
        return Err(StabilityError::Domain(format!(
            "{} is not a space with n = 2",
            record.name
        )));
    }
    let n = 2;
    let need = |f: &Option<RationalFn>, what: &str| {
        f.as_ref()
            .ok_or_else(|| StabilityError::Incomplete(format!("{}: {what} missing", record.name)))
            .and_then(|f| record.count(f, n, what))
    };
    let chi = need(&record.euler, "euler characteristic")?;
    let b2 = need(&record.betti.b2, "b2")?;
    let b4 = need(&record.betti.b4, "b4")?;
    let i0 = match record.index("i0", n)? {
        Some(v) => v,
        None => record.count(&record.iso_dim, n, "iso_dim")?,
    };
    let i1 = record
        .index("i1", n)?
        .ok_or_else(|| StabilityError::Incomplete(format!("{}: i1 missing", record.name)))?;
    Ok(2 * chi - b2 + b4 - i0 + i1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WolfClassification {
    pub name: String,
    pub n: i64,
    pub report: StabilityReport,
    pub index_i1: i64,
    /// Recorded values agree with the computed ones.
    pub consistent: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Classifies every record at every `n` in `lo..=hi` where it exists.
pub fn classify_wolf(
    table: &WolfTable,
    lo: i64,
    hi: i64,
) -> Result<Vec<WolfClassification>, StabilityError> {
    let mut out = Vec::new();
    for rec in &table.records {
        for n in lo.max(rec.n_min)..=hi.min(rec.n_max.unwrap_or(hi)) {
            let input = rec.spectral_input(n)?;
            let report = theorem_a(&input)?;
            let i1 = index_i1(&input)?;
            let mut notes = Vec::new();
            if let Some(recorded) = input.index_i1 {
                if recorded != i1 {
                    notes.push(format!("recorded i1 = {recorded}, computed {i1}"));
                }
            }
            if let (Some(m), Some(d)) = (&rec.he_lambda1_module, input.dim_he_at_lambda1) {
                let w = SpnWeight::new(m.weight.clone())
                    .map_err(|e| StabilityError::Domain(e.to_string()))?;
                let rep = weyl_dim(&w, n + m.rank_offset)
                    .map_err(|e| StabilityError::Domain(e.to_string()))?;
                if rep != d.into() {
                    notes.push(format!(
                        "dim (HE)_lambda1 = {d} but the module has dimension {rep}"
                    ));
                }
            }
            out.push(WolfClassification {
                name: rec.name.clone(),
                n,
                report,
                index_i1: i1,
                consistent: notes.is_empty(),
                notes,
            });
        }
    }
    Ok(out)
}
