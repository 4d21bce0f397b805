//! The identity database: transcribed and derived Weitzenböck identities.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::OpExpr;
use super::symbol::OpSymbol;
use super::WbkError;
use crate::qfield::RationalFn;
use crate::repcalc::{edges, Bundle, Rank};

/// Environment variable overriding the database path.
pub const DB_ENV: &str = "WBK_DB";

const BUILTIN: &str = include_str!("../../data/identities.json");

/// Where an identity comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Provenance {
    Cited {
        anchor: String,
        quote: String,
    },
    /// `derived:<pipeline>` for identities with no printed source.
    Derived(String),
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::Cited { anchor, quote } => format!("{anchor}: \"{quote}\""),
            Provenance::Derived(s) => s.clone(),
        }
    }
}

/// Which forms of `d`/`δ` a comparison constant refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormFamily {
    /// Exterior forms: `d`, `d*`.
    Forms,
    /// Symmetric tensors: `δ`, `δ*`.
    Symmetric,
}

/// How a derived identity is reproduced from other data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Recipe {
    /// Linear elimination. Exactly one of `eliminate` or `keep` is given.
    Eliminate {
        using: Vec<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        eliminate: Vec<OpSymbol>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        keep: Vec<OpSymbol>,
    },
    /// Membership in the span of the inputs, with explicit multipliers.
    Consequence { using: Vec<String> },
    /// Classical constants relating `d d*`, `d* d`, `δ δ*`, `δ* δ` to the
    /// norms of the two natural projections of `∇` on `p`-forms or
    /// symmetric `p`-tensors, with `m = 4n`.
    Compare { family: FormFamily, p: u32 },
    /// Moves a `X[V]` identity on `U` to the lowering operator on `V`
    /// through the relative dimension formula.
    Transfer { from: String },
    /// Reads `X[W]` off a full `X` identity on the same bundle.
    Split { from: String },
}

impl Recipe {
    pub fn kind(&self) -> &'static str {
        match self {
            Recipe::Eliminate { .. } => "eliminate",
            Recipe::Consequence { .. } => "consequence",
            Recipe::Compare { .. } => "compare",
            Recipe::Transfer { .. } => "transfer",
            Recipe::Split { .. } => "split",
        }
    }

    /// Identity ids this recipe reads, pseudo ids excluded.
    pub fn inputs(&self) -> Vec<&str> {
        match self {
            Recipe::Eliminate { using, .. } | Recipe::Consequence { using } => using
                .iter()
                .map(String::as_str)
                .filter(|s| !s.starts_with('@'))
                .collect(),
            Recipe::Compare { .. } => vec![],
            Recipe::Transfer { from } | Recipe::Split { from } => vec![from.as_str()],
        }
    }
}

/// `expr = 0` on `bundle` for `n ≥ n_min`, whenever every symbol in
/// `assumptions` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Identity {
    pub id: String,
    pub bundle: Bundle,
    pub n_min: i64,
    pub assumptions: BTreeSet<OpSymbol>,
    pub expr: OpExpr,
    pub provenance: Provenance,
    /// Empty for transcribed identities. Several entries are independent
    /// routes that must each reproduce `expr`.
    pub derivation: Vec<Recipe>,
}

impl Identity {
    pub fn is_derived(&self) -> bool {
        !self.derivation.is_empty()
    }

    pub fn mentions(&self, s: &OpSymbol) -> bool {
        self.expr.terms().contains_key(s)
    }
}

#[derive(Deserialize, Serialize)]
struct Record {
    id: String,
    bundle: String,
    n_min: i64,
    #[serde(default)]
    assumptions: Vec<String>,
    terms: BTreeMap<String, String>,
    provenance: Option<Provenance>,
    #[serde(default)]
    derivation: Vec<Recipe>,
}

#[derive(Clone, Debug, Default)]
pub struct Database {
    identities: Vec<Identity>,
    index: BTreeMap<String, usize>,
}

impl Database {
    pub fn empty() -> Self {
        Database::default()
    }

    /// The database shipped with the crate.
    pub fn builtin() -> Self {
        Database::from_json(BUILTIN).expect("shipped database is valid")
    }

    /// `$WBK_DB` if set, else the shipped database.
    pub fn from_env() -> Result<Self, WbkError> {
        match std::env::var_os(DB_ENV) {
            Some(p) => database_load(Path::new(&p)),
            None => Ok(Database::builtin()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, WbkError> {
        let records: Vec<Record> = serde_json::from_str(text)?;
        let mut db = Database::empty();
        for r in records {
            let ident = convert(r)?;
            if db.index.contains_key(&ident.id) {
                return Err(WbkError::Malformed {
                    id: ident.id,
                    msg: "duplicate id".into(),
                });
            }
            db.index.insert(ident.id.clone(), db.identities.len());
            db.identities.push(ident);
        }
        db.check_references()?;
        Ok(db)
    }

    /// Serializes back to the exchange format.
    pub fn to_json(&self) -> String {
        let records: Vec<Record> = self
            .identities
            .iter()
            .map(|i| Record {
                id: i.id.clone(),
                bundle: i.bundle.to_string(),
                n_min: i.n_min,
                assumptions: i.assumptions.iter().map(ToString::to_string).collect(),
                terms: i
                    .expr
                    .terms()
                    .iter()
                    .map(|(s, c)| (s.to_string(), c.to_grammar()))
                    .collect(),
                provenance: Some(i.provenance.clone()),
                derivation: i.derivation.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("records serialize")
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Identity> {
        self.identities.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Identity> {
        self.index.get(id).map(|&i| &self.identities[i])
    }

    pub fn require(&self, id: &str) -> Result<&Identity, WbkError> {
        self.get(id)
            .ok_or_else(|| WbkError::UnknownIdentity(id.to_string()))
    }

    pub fn on_bundle<'a>(&'a self, b: &'a Bundle) -> impl Iterator<Item = &'a Identity> + 'a {
        self.identities.iter().filter(move |i| &i.bundle == b)
    }

    /// Identity ids in sorted order.
    pub fn ids(&self) -> Vec<&str> {
        self.index.keys().map(String::as_str).collect()
    }

    /// Replaces the coefficient of `s` in identity `id`. Used to build
    /// deliberately broken databases in tests.
    pub fn with_coefficient(
        &self,
        id: &str,
        s: OpSymbol,
        c: RationalFn,
    ) -> Result<Database, WbkError> {
        let mut db = self.clone();
        let i = *db
            .index
            .get(id)
            .ok_or_else(|| WbkError::UnknownIdentity(id.to_string()))?;
        let e = &mut db.identities[i].expr;
        let old = e.coeff(&s);
        e.add_term(s, &(&c - &old));
        Ok(db)
    }

    fn check_references(&self) -> Result<(), WbkError> {
        for ident in &self.identities {
            for recipe in &ident.derivation {
                for input in recipe.inputs() {
                    let other = self.require(input)?;
                    let bad = |msg: String| WbkError::Malformed {
                        id: ident.id.clone(),
                        msg,
                    };
                    if other.n_min > ident.n_min {
                        return Err(bad(format!("input {input} needs n >= {}", other.n_min)));
                    }
                    let same_bundle = matches!(
                        recipe,
                        Recipe::Eliminate { .. }
                            | Recipe::Consequence { .. }
                            | Recipe::Split { .. }
                    );
                    if same_bundle && other.bundle != ident.bundle {
                        return Err(bad(format!("input {input} lives on {}", other.bundle)));
                    }
                    if !other.assumptions.is_subset(&ident.assumptions) {
                        return Err(bad(format!("input {input} assumes more")));
                    }
                }
                if let Recipe::Eliminate {
                    eliminate, keep, ..
                } = recipe
                {
                    if eliminate.is_empty() == keep.is_empty()
                        && !(eliminate.is_empty() && keep.is_empty())
                    {
                        return Err(WbkError::Malformed {
                            id: ident.id.clone(),
                            msg: "give either eliminate or keep".into(),
                        });
                    }
                }
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), WbkError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.identities.len()];
        fn visit(db: &Database, i: usize, state: &mut [u8]) -> Result<(), WbkError> {
            match state[i] {
                1 => {
                    return Err(WbkError::Malformed {
                        id: db.identities[i].id.clone(),
                        msg: "derivation cycle".into(),
                    })
                }
                2 => return Ok(()),
                _ => {}
            }
            state[i] = 1;
            for r in &db.identities[i].derivation {
                for input in r.inputs() {
                    visit(db, db.index[input], state)?;
                }
            }
            state[i] = 2;
            Ok(())
        }
        for i in 0..self.identities.len() {
            visit(self, i, &mut state)?;
        }
        Ok(())
    }
}

/// Reads and validates a database file.
pub fn database_load(path: &Path) -> Result<Database, WbkError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WbkError::Io(format!("{}: {e}", path.display())))?;
    Database::from_json(&text)
}

fn convert(r: Record) -> Result<Identity, WbkError> {
    let id = r.id.clone();
    let bad = |msg: String| WbkError::Malformed {
        id: id.clone(),
        msg,
    };
    let bundle: Bundle = r.bundle.parse().map_err(|e| bad(format!("{e}")))?;
    if r.n_min < bundle.min_rank().max(1) {
        return Err(bad(format!(
            "n_min {} is below the rank where {bundle} exists",
            r.n_min
        )));
    }
    let provenance = r
        .provenance
        .ok_or_else(|| WbkError::MissingProvenance(id.clone()))?;
    match &provenance {
        Provenance::Cited { anchor, quote } => {
            let words = quote.split_whitespace().count();
            if anchor.trim().is_empty() || !(3..=6).contains(&words) {
                return Err(bad(
                    "provenance needs an anchor and a 3 to 6 word quote".into()
                ));
            }
        }
        Provenance::Derived(s) => {
            if !s.starts_with("derived:") || r.derivation.is_empty() {
                return Err(WbkError::MissingProvenance(id.clone()));
            }
        }
    }
    let assumptions = r
        .assumptions
        .iter()
        .map(|s| s.parse())
        .collect::<Result<BTreeSet<OpSymbol>, _>>()?;
    let mut expr = OpExpr::zero(bundle.clone());
    for (s, c) in &r.terms {
        let sym: OpSymbol = s.parse()?;
        let coeff: RationalFn = c.parse().map_err(|e| bad(format!("term {s}: {e}")))?;
        if coeff.is_zero() {
            return Err(bad(format!("term {s} has zero coefficient")));
        }
        expr.add_term(sym, &coeff);
    }
    if expr.is_zero() {
        return Err(bad("no terms".into()));
    }
    let generic = edges(&bundle, Rank::Generic)?;
    let at_min = edges(&bundle, Rank::At(r.n_min))?;
    for s in expr.symbols().chain(assumptions.iter()) {
        if let Some(e) = s.edge() {
            for (set, label) in [
                (&generic, "generic n".to_string()),
                (&at_min, format!("n = {}", r.n_min)),
            ] {
                if !set.iter().any(|g| g.index == e) {
                    return Err(bad(format!("{s} is not a gradient of {bundle} at {label}")));
                }
            }
        }
        if let Some(w) = s.projection() {
            if !generic.iter().any(|g| &g.target == w) {
                return Err(bad(format!(
                    "{s}: {w} is not a gradient target of {bundle}"
                )));
            }
        }
    }
    if let Some(s) = assumptions.iter().find(|s| expr.terms().contains_key(*s)) {
        return Err(bad(format!("{s} is both assumed zero and present")));
    }
    Ok(Identity {
        id: r.id,
        bundle,
        n_min: r.n_min,
        assumptions,
        expr,
        provenance,
        derivation: r.derivation,
    })
}
