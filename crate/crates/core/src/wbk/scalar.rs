//! Eigen-section analysis: on a `Δ`-eigensection every `B` acts by a scalar.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::db::Database;
use super::derive::input_expr;
use super::expr::OpExpr;
use super::symbol::OpSymbol;
use super::WbkError;
use crate::qfield::{LinearSystem, Matrix, QfieldError, RationalFn, Style};
use crate::repcalc::{edges, Bundle, Rank};

/// `lambda·λ + scal·scal` with coefficients in ℚ(n).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub lambda: RationalFn,
    pub scal: RationalFn,
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm::default()
    }

    pub fn lambda() -> Self {
        LinearForm {
            lambda: RationalFn::one(),
            scal: RationalFn::zero(),
        }
    }

    pub fn scal(c: RationalFn) -> Self {
        LinearForm {
            lambda: RationalFn::zero(),
            scal: c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.scal.is_zero()
    }

    pub fn scaled(&self, c: &RationalFn) -> Self {
        LinearForm {
            lambda: &self.lambda * c,
            scal: &self.scal * c,
        }
    }

    pub fn add(&self, other: &LinearForm) -> Self {
        LinearForm {
            lambda: &self.lambda + &other.lambda,
            scal: &self.scal + &other.scal,
        }
    }

    /// Replaces `λ` by `value`.
    pub fn substitute(&self, value: &LinearForm) -> Self {
        LinearForm::scal(self.scal.clone()).add(&value.scaled(&self.lambda))
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [(&self.lambda, "lambda"), (&self.scal, "scal")]
            .into_iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| c.times_symbol(s, Style::Grammar))
            .collect();
        match parts.as_slice() {
            [] => f.write_str("0"),
            [a] => f.write_str(a),
            [a, b] => match b.strip_prefix('-') {
                Some(rest) => write!(f, "{a} - {rest}"),
                None => write!(f, "{a} + {b}"),
            },
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarSolution {
    pub bundle: Bundle,
    /// Identities used, in order.
    pub active: Vec<String>,
    pub assumed: BTreeSet<OpSymbol>,
    /// `λ` when it was supplied or forced by the system.
    pub lambda: Option<LinearForm>,
    pub forced_lambda: bool,
    /// Determined symbols, assumed ones included as zero.
    pub values: BTreeMap<OpSymbol, LinearForm>,
    pub undetermined: Vec<OpSymbol>,
}

impl ScalarSolution {
    pub fn value(&self, s: &OpSymbol) -> Option<&LinearForm> {
        self.values.get(s)
    }

    /// Evaluates `e` with `LAP ↦ λ`; `None` when some symbol is unknown.
    pub fn evaluate(&self, e: &OpExpr) -> Option<LinearForm> {
        let mut acc = LinearForm::zero();
        for (s, c) in e.terms() {
            let v = match s {
                OpSymbol::Lap => self.lambda.clone().unwrap_or_else(LinearForm::lambda),
                OpSymbol::Scal => LinearForm::scal(RationalFn::one()),
                _ => self.values.get(s)?.clone(),
            };
            acc = acc.add(&v.scaled(c));
        }
        Some(acc)
    }
}

fn default_active(db: &Database, b: &Bundle, assume: &BTreeSet<OpSymbol>) -> Vec<String> {
    let mut ids: Vec<String> = db
        .on_bundle(b)
        .filter(|i| !i.is_derived() && i.assumptions.is_subset(assume))
        .filter(|i| {
            i.expr
                .symbols()
                .all(|s| !s.is_composite() && s != &OpSymbol::QHyper)
        })
        .map(|i| i.id.clone())
        .collect();
    ids.extend(["@rough".to_string(), "@universal".to_string()]);
    ids
}

/// [`scalar_solve_with`] on the transcribed, composite-free identities of `b`
/// valid under `assume`, plus the rough-Laplacian expansion.
pub fn scalar_solve(
    db: &Database,
    b: &Bundle,
    assume: &BTreeSet<OpSymbol>,
    lambda: Option<&RationalFn>,
) -> Result<ScalarSolution, WbkError> {
    let active = default_active(db, b, assume);
    scalar_solve_with(db, b, &active, assume, lambda)
}

/// Solves `active` for the scalars by which each symbol acts, with
/// `LAP = λ` and the symbols in `assume` set to zero. A supplied `λ` is a
/// multiple of `scal`.
pub fn scalar_solve_with(
    db: &Database,
    b: &Bundle,
    active: &[String],
    assume: &BTreeSet<OpSymbol>,
    lambda: Option<&RationalFn>,
) -> Result<ScalarSolution, WbkError> {
    let rows: Vec<(String, OpExpr)> = active
        .iter()
        .map(|id| {
            Ok((
                id.clone(),
                input_expr(db, id, b, Rank::Generic)?.without(assume),
            ))
        })
        .collect::<Result<_, WbkError>>()?;
    if let Some((id, _)) = rows
        .iter()
        .find(|(_, e)| e.symbols().any(|s| s == &OpSymbol::QHyper))
    {
        return Err(WbkError::Unsupported(format!("{id} involves QHYPER")));
    }
    let unknowns: Vec<OpSymbol> = rows
        .iter()
        .flat_map(|(_, e)| e.symbols().cloned())
        .filter(|s| s != &OpSymbol::Lap && s != &OpSymbol::Scal)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let coeffs = |with_lap: bool| {
        let mut cols = unknowns.clone();
        if with_lap {
            cols.push(OpSymbol::Lap);
        }
        Matrix::from_rows(
            rows.iter()
                .map(|(_, e)| cols.iter().map(|s| e.coeff(s)).collect())
                .collect(),
        )
    };
    let rhs_scal: Vec<RationalFn> = rows
        .iter()
        .map(|(_, e)| -&e.coeff(&OpSymbol::Scal))
        .collect();
    let rhs_lap: Vec<RationalFn> = rows
        .iter()
        .map(|(_, e)| -&e.coeff(&OpSymbol::Lap))
        .collect();
    let violated = |err: QfieldError| match err {
        QfieldError::Inconsistent { row, .. } => WbkError::Inconsistent {
            id: rows[row].0.clone(),
        },
        e => e.into(),
    };

    let k = unknowns.len();
    let (lambda_val, forced, sol_scal, sol_lap) = match lambda {
        Some(l) => {
            let rhs: Vec<RationalFn> = rhs_scal
                .iter()
                .zip(&rhs_lap)
                .map(|(s, a)| s + &(a * l))
                .collect();
            let sol = LinearSystem::new(coeffs(false), rhs)?
                .solve()
                .map_err(violated)?;
            (Some(LinearForm::scal(l.clone())), false, sol, None)
        }
        None => {
            let probe = LinearSystem::new(coeffs(true), rhs_scal.clone())?
                .solve()
                .map_err(violated)?;
            let lambda_free = probe.kernel.iter().any(|v| !v[k].is_zero());
            if lambda_free {
                let s = LinearSystem::new(coeffs(false), rhs_scal)?
                    .solve()
                    .map_err(violated)?;
                let l = LinearSystem::new(coeffs(false), rhs_lap)?
                    .solve()
                    .map_err(violated)?;
                (None, false, s, Some(l))
            } else {
                let l = probe.particular[k].clone();
                let mut sol = probe;
                sol.particular.truncate(k);
                for v in &mut sol.kernel {
                    v.truncate(k);
                }
                (Some(LinearForm::scal(l)), true, sol, None)
            }
        }
    };

    let mut values = BTreeMap::new();
    let mut undetermined = Vec::new();
    for (i, s) in unknowns.iter().enumerate() {
        if sol_scal.kernel.iter().any(|v| !v[i].is_zero()) {
            undetermined.push(s.clone());
            continue;
        }
        let lam = sol_lap
            .as_ref()
            .map_or_else(RationalFn::zero, |l| l.particular[i].clone());
        values.insert(
            s.clone(),
            LinearForm {
                lambda: lam,
                scal: sol_scal.particular[i].clone(),
            },
        );
    }
    for s in assume {
        values.insert(s.clone(), LinearForm::zero());
    }
    Ok(ScalarSolution {
        bundle: b.clone(),
        active: active.to_vec(),
        assumed: assume.clone(),
        lambda: lambda_val,
        forced_lambda: forced,
        values,
        undetermined,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QrStatus {
    Pass,
    Fail,
    NotDeterminable,
}

/// Comparison of `Σ w B` evaluated on a solution against the known scalar
/// action of `q(R)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QrCheck {
    pub bundle: Bundle,
    pub status: QrStatus,
    /// Identity stating the scalar action of `q(R)`.
    pub source: Option<String>,
    pub expected: Option<LinearForm>,
    pub actual: Option<LinearForm>,
    pub residual: Option<LinearForm>,
    pub missing: Vec<OpSymbol>,
}

/// A transcribed identity of the form `c·QR + d·SCAL = 0` on `b`.
fn known_qr(db: &Database, b: &Bundle) -> Option<(String, RationalFn)> {
    db.on_bundle(b)
        .filter(|i| !i.is_derived() && i.assumptions.is_empty())
        .find(|i| {
            i.mentions(&OpSymbol::Qr)
                && i.expr
                    .symbols()
                    .all(|s| matches!(s, OpSymbol::Qr | OpSymbol::Scal))
        })
        .map(|i| {
            (
                i.id.clone(),
                -&(&i.expr.coeff(&OpSymbol::Scal) / &i.expr.coeff(&OpSymbol::Qr)),
            )
        })
}

pub fn check_qr_consistency(db: &Database, sol: &ScalarSolution) -> Result<QrCheck, WbkError> {
    let b = &sol.bundle;
    let mut out = QrCheck {
        bundle: b.clone(),
        status: QrStatus::NotDeterminable,
        source: None,
        expected: None,
        actual: None,
        residual: None,
        missing: vec![],
    };
    let Some((id, c)) = known_qr(db, b) else {
        return Ok(out);
    };
    out.source = Some(id);
    out.expected = Some(LinearForm::scal(c));
    let mut acc = LinearForm::zero();
    for e in edges(b, Rank::Generic)? {
        let s = OpSymbol::B(e.index);
        match sol.values.get(&s) {
            Some(v) => acc = acc.add(&v.scaled(&e.universal_coeff)),
            None => out.missing.push(s),
        }
    }
    if !out.missing.is_empty() {
        return Ok(out);
    }
    let expected = out.expected.clone().expect("set above");
    let residual = acc.add(&expected.scaled(&RationalFn::from_int(-1)));
    out.status = if residual.is_zero() {
        QrStatus::Pass
    } else {
        QrStatus::Fail
    };
    out.actual = Some(acc);
    out.residual = Some(residual);
    Ok(out)
}

/// How a transcribed `q(R)` formula on a bundle differs from `Σ w B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QrDifference {
    pub bundle: Bundle,
    pub formula: String,
    /// `Σ w B − q(R)` with `q(R)` read off `formula`.
    pub difference: OpExpr,
    /// Multipliers writing the difference through the other identities.
    pub multipliers: Vec<(String, RationalFn)>,
    /// Coefficient of `QHYPER` left over; `None` if the difference is not
    /// reachable even with a `QHYPER` term.
    pub qhyper: Option<RationalFn>,
}

pub fn qr_formula_difference(db: &Database, formula: &str) -> Result<QrDifference, WbkError> {
    let ident = db.require(formula)?;
    let b = &ident.bundle;
    let cq = ident.expr.coeff(&OpSymbol::Qr);
    if cq.is_zero() {
        return Err(WbkError::Unsupported(format!(
            "{formula} does not mention QR"
        )));
    }
    // q(R) = −(rest)/cq
    let mut difference = ident
        .expr
        .without(&BTreeSet::from([OpSymbol::Qr]))
        .scaled(&cq.inv()?);
    for e in edges(b, Rank::Generic)? {
        difference.add_term(OpSymbol::B(e.index), &e.universal_coeff);
    }
    let others: Vec<(String, OpExpr)> = db
        .on_bundle(b)
        .filter(|i| {
            i.id != formula && !i.is_derived() && i.assumptions.is_subset(&ident.assumptions)
        })
        .filter(|i| i.expr.symbols().all(|s| s.is_b() || s == &OpSymbol::Scal))
        .map(|i| (i.id.clone(), i.expr.without(&ident.assumptions)))
        .collect();
    let mut cols: BTreeSet<OpSymbol> = difference.symbols().cloned().collect();
    cols.extend(others.iter().flat_map(|(_, e)| e.symbols().cloned()));
    cols.insert(OpSymbol::QHyper);
    let cols: Vec<OpSymbol> = cols.into_iter().collect();
    let m = Matrix::from_rows(
        cols.iter()
            .map(|s| {
                let mut row: Vec<RationalFn> = others.iter().map(|(_, e)| e.coeff(s)).collect();
                row.push(if s == &OpSymbol::QHyper {
                    RationalFn::one()
                } else {
                    RationalFn::zero()
                });
                row
            })
            .collect(),
    );
    let rhs: Vec<RationalFn> = cols.iter().map(|s| difference.coeff(s)).collect();
    let (multipliers, qhyper) = match LinearSystem::new(m, rhs)?.solve() {
        Ok(sol) => {
            let k = others.len();
            let mults = others
                .iter()
                .zip(&sol.particular)
                .filter(|(_, c)| !c.is_zero())
                .map(|((id, _), c)| (id.clone(), c.clone()))
                .collect();
            (mults, Some(sol.particular[k].clone()))
        }
        Err(QfieldError::Inconsistent { .. }) => (vec![], None),
        Err(e) => return Err(e.into()),
    };
    Ok(QrDifference {
        bundle: b.clone(),
        formula: formula.to_string(),
        difference,
        multipliers,
        qhyper,
    })
}
