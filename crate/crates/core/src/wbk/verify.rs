//! Re-derivation of the whole database, generically and at concrete ranks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::db::{Database, Identity};
use super::derive::{consequence, input_expr, run_recipe, target_expr};
use super::expr::OpExpr;
use super::scalar::{check_qr_consistency, qr_formula_difference, scalar_solve, QrStatus};
use super::symbol::OpSymbol;
use super::universal::PSEUDO_IDS;
use super::WbkError;
use crate::repcalc::{edges, Bundle, Rank};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub n_lo: i64,
    pub n_hi: i64,
    /// `None` runs every identity plus the cross-checks.
    pub ids: Option<Vec<String>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_lo: 2,
            n_hi: 32,
            ids: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub id: String,
    pub bundle: String,
    pub status: CheckStatus,
    pub expected: String,
    pub actual: String,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub entries: Vec<IdentityCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == CheckStatus::Pass)
    }
}

/// Scenarios where `q(R)` acts by a known scalar: bundle and vanishing set.
const QR_SCENARIOS: [(&str, &[&str]); 3] = [
    ("HE", &["B[+1,+2]", "B[+1,-1]", "B[-1,+1]"]),
    ("Sym2H", &[]),
    ("L20E", &["B[+1,+3]"]),
];

/// Transcribed `q(R)` formula compared against the universal expansion.
const QR_FORMULA: &str = "S2S2-qr";

/// `true` when the identities valid under `assume` do not force `scal = 0`.
pub(crate) fn bundle_consistent(
    db: &Database,
    b: &Bundle,
    assume: &BTreeSet<OpSymbol>,
) -> Result<bool, WbkError> {
    let mut rows: Vec<(String, OpExpr)> = Vec::new();
    for id in PSEUDO_IDS {
        rows.push((
            id.to_string(),
            input_expr(db, id, b, Rank::Generic)?.without(assume),
        ));
    }
    for i in db.on_bundle(b).filter(|i| i.assumptions.is_subset(assume)) {
        rows.push((
            i.id.clone(),
            input_expr(db, &i.id, b, Rank::Generic)?.without(assume),
        ));
    }
    let scal = OpExpr::from_terms(
        b.clone(),
        [(OpSymbol::Scal, crate::qfield::RationalFn::one())],
    );
    match consequence(&rows, &scal) {
        Ok(_) => Ok(false),
        Err(WbkError::NotInSpan(_)) => Ok(true),
        Err(e) => Err(e),
    }
}

fn check_edges_at(ident: &Identity, n: i64) -> Result<(), String> {
    let es = edges(&ident.bundle, Rank::At(n)).map_err(|e| e.to_string())?;
    for s in ident.expr.symbols().chain(ident.assumptions.iter()) {
        if let Some(e) = s.edge() {
            if !es.iter().any(|g| g.index == e) {
                return Err(format!("{s} is not a gradient at n = {n}"));
            }
        }
    }
    ident.expr.specialize(n).map_err(|e| e.to_string())?;
    Ok(())
}

/// Verifies one database identity.
pub fn verify_one(
    db: &Database,
    id: &str,
    opts: &VerifyOptions,
) -> Result<IdentityCheck, WbkError> {
    let ident = db.require(id)?;
    let expected = target_expr(ident, Rank::Generic)?;
    let mut failures: Vec<String> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut actual = expected.listing();

    if !bundle_consistent(db, &ident.bundle, &ident.assumptions)? {
        failures.push(format!("identities on {} force scal = 0", ident.bundle));
    }

    let lo = opts.n_lo.max(ident.n_min);
    let mut excluded = BTreeSet::new();
    if ident.is_derived() {
        for (k, recipe) in ident.derivation.iter().enumerate() {
            match run_recipe(db, ident, recipe, Rank::Generic) {
                Ok(d) => {
                    if k == 0 {
                        actual = d.expr.listing();
                    }
                    if d.expr != expected {
                        failures.push(format!("{} route gives {}", d.route, d.expr.listing()));
                    }
                    if !d.multipliers.is_empty() {
                        let m: Vec<String> = d
                            .multipliers
                            .iter()
                            .map(|(i, c)| format!("{i}: {c}"))
                            .collect();
                        notes.push(format!("{} multipliers {}", d.route, m.join(", ")));
                    }
                    if d.kernel_dim > 0 {
                        notes.push(format!(
                            "{} multipliers not unique (kernel dim {})",
                            d.route, d.kernel_dim
                        ));
                    }
                    excluded.extend(d.excluded);
                }
                Err(e) => {
                    if k == 0 {
                        actual = format!("error: {e}");
                    }
                    failures.push(format!("{} route: {e}", recipe.kind()));
                }
            }
        }
        let mut skipped = Vec::new();
        for n in lo..=opts.n_hi {
            let target = target_expr(ident, Rank::At(n))?;
            for recipe in &ident.derivation {
                match run_recipe(db, ident, recipe, Rank::At(n)) {
                    Ok(d) if d.expr == target => {}
                    Ok(d) => failures.push(format!(
                        "n = {n}, {} route: expected {}, got {}",
                        d.route,
                        target.listing(),
                        d.expr.listing()
                    )),
                    Err(_) if excluded.contains(&n) => skipped.push(n),
                    Err(e) => failures.push(format!("n = {n}, {} route: {e}", recipe.kind())),
                }
            }
        }
        if !skipped.is_empty() {
            notes.push(format!("excluded specializations n = {skipped:?}"));
        }
    } else {
        for n in lo..=opts.n_hi {
            if let Err(e) = check_edges_at(ident, n) {
                failures.push(e);
            }
        }
    }
    if lo > opts.n_hi {
        notes.push(format!(
            "no concrete n checked: valid for n >= {}",
            ident.n_min
        ));
    }
    let status = if failures.is_empty() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    notes.extend(failures);
    Ok(IdentityCheck {
        id: ident.id.clone(),
        bundle: ident.bundle.to_string(),
        status,
        expected: expected.listing(),
        actual,
        provenance: ident.provenance.label(),
        notes,
    })
}

fn qr_checks(db: &Database) -> Result<Vec<IdentityCheck>, WbkError> {
    let mut out = Vec::new();
    for (name, assume) in QR_SCENARIOS {
        let b: Bundle = name.parse()?;
        if db.on_bundle(&b).next().is_none() {
            continue;
        }
        let assume = assume
            .iter()
            .map(|s| s.parse())
            .collect::<Result<BTreeSet<OpSymbol>, _>>()?;
        let (status, expected, actual, notes) = match scalar_solve(db, &b, &assume, None) {
            Ok(sol) => {
                let c = check_qr_consistency(db, &sol)?;
                let show = |f: &Option<super::scalar::LinearForm>| {
                    f.as_ref().map_or("-".to_string(), ToString::to_string)
                };
                let mut notes = vec![];
                if !c.missing.is_empty() {
                    let m: Vec<String> = c.missing.iter().map(ToString::to_string).collect();
                    notes.push(format!("not determinable: {}", m.join(", ")));
                }
                if let Some(r) = &c.residual {
                    notes.push(format!("residual {r}"));
                }
                let status = if c.status == QrStatus::Pass {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                };
                (status, show(&c.expected), show(&c.actual), notes)
            }
            Err(e) => (CheckStatus::Fail, "-".into(), format!("error: {e}"), vec![]),
        };
        out.push(IdentityCheck {
            id: format!("check:qr:{name}"),
            bundle: name.to_string(),
            status,
            expected,
            actual,
            provenance: "derived:scalar-solve+universal-qr".into(),
            notes,
        });
    }
    if let Some(ident) = db.get(QR_FORMULA) {
        let d = qr_formula_difference(db, QR_FORMULA)?;
        let m: Vec<String> = d
            .multipliers
            .iter()
            .map(|(i, c)| format!("{i}: {c}"))
            .collect();
        out.push(IdentityCheck {
            id: format!("check:qr-formula:{QR_FORMULA}"),
            bundle: ident.bundle.to_string(),
            status: if d.qhyper.is_some() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            expected: d.difference.listing(),
            actual: match &d.qhyper {
                Some(q) => format!("QHYPER multiple {q}"),
                None => "not reducible".into(),
            },
            provenance: "derived:universal-qr-difference".into(),
            notes: vec![format!("multipliers {}", m.join(", "))],
        });
    }
    Ok(out)
}

/// Verifies the selected identities (all of them plus the cross-checks by
/// default), one worker per identity. Entries are sorted by id.
pub fn verify_all(db: &Database, opts: &VerifyOptions) -> Result<VerifyReport, WbkError> {
    let ids: Vec<String> = match &opts.ids {
        Some(ids) => ids.clone(),
        None => db.ids().into_iter().map(String::from).collect(),
    };
    let mut entries = std::thread::scope(|s| {
        let handles: Vec<_> = ids
            .iter()
            .map(|id| s.spawn(move || verify_one(db, id, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification worker panicked"))
            .collect::<Result<Vec<_>, WbkError>>()
    })?;
    if opts.ids.is_none() {
        entries.extend(qr_checks(db)?);
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(VerifyReport { entries })
}
