//! Reproducing derived identities by exact linear algebra over ℚ(n).

use std::collections::BTreeSet;

use serde::Serialize;

use super::db::{Database, FormFamily, Identity, Recipe};
use super::expr::OpExpr;
use super::symbol::OpSymbol;
use super::universal::pseudo_identity;
use super::WbkError;
use crate::qfield::{LinearSystem, Matrix, QfieldError, RationalFn};
use crate::repcalc::{edges, relative_dim_constant, Bundle, Family, GradientEdge, Rank};

/// Which columns an elimination must clear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    Eliminate(BTreeSet<OpSymbol>),
    /// Clear everything outside this set.
    Keep(BTreeSet<OpSymbol>),
}

/// Outcome of one derivation route.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Derivation {
    /// Canonically normalized result.
    pub expr: OpExpr,
    /// Input id and the factor it was multiplied by, after normalization.
    pub multipliers: Vec<(String, RationalFn)>,
    /// Integer `n` where the generic computation does not specialize.
    pub excluded: BTreeSet<i64>,
    /// Dimension of the multiplier freedom (consequence routes only).
    pub kernel_dim: usize,
    pub route: &'static str,
}

fn collect_excluded<'a>(coeffs: impl IntoIterator<Item = &'a RationalFn>) -> BTreeSet<i64> {
    coeffs
        .into_iter()
        .flat_map(RationalFn::integer_poles)
        .collect()
}

/// Finds the unique (up to scale) combination of `rows` whose goal
/// columns vanish.
pub fn eliminate(rows: &[(String, OpExpr)], goal: &Goal) -> Result<Derivation, WbkError> {
    let bundle = rows
        .first()
        .map(|(_, e)| e.bundle.clone())
        .ok_or_else(|| WbkError::Unsupported("elimination without inputs".into()))?;
    let cols: Vec<OpSymbol> = rows
        .iter()
        .flat_map(|(_, e)| e.symbols().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if let Goal::Eliminate(set) = goal {
        if let Some(s) = set.iter().find(|s| !cols.contains(s)) {
            return Err(WbkError::Unsupported(format!(
                "{s} does not occur in the inputs"
            )));
        }
    }
    let in_goal = |s: &OpSymbol| match goal {
        Goal::Eliminate(set) => set.contains(s),
        Goal::Keep(set) => !set.contains(s),
    };
    let a = Matrix::from_rows(
        rows.iter()
            .map(|(_, e)| cols.iter().map(|s| e.coeff(s)).collect())
            .collect(),
    );
    let goal_idx: Vec<usize> = (0..cols.len()).filter(|&j| in_goal(&cols[j])).collect();
    let mut a_goal = Matrix::zeros(rows.len(), goal_idx.len());
    for i in 0..rows.len() {
        for (jj, &j) in goal_idx.iter().enumerate() {
            a_goal.set(i, jj, a.get(i, j).clone());
        }
    }
    let goal_rref = a_goal.transpose().rref();
    let combos = a_goal.left_kernel();
    let images: Vec<Vec<RationalFn>> = combos.iter().map(|y| a.vec_mul(y)).collect();
    let dim = if images.is_empty() {
        0
    } else {
        Matrix::from_rows(images.clone()).rank()
    };
    match dim {
        0 => return Err(WbkError::Impossible { rank: a.rank() }),
        1 => {}
        d => return Err(WbkError::Ambiguous { dim: d }),
    }
    let (y, img) = combos
        .iter()
        .zip(&images)
        .find(|(_, img)| img.iter().any(|c| !c.is_zero()))
        .expect("rank one image");
    let lead = img
        .iter()
        .find(|c| !c.is_zero())
        .expect("nonzero image")
        .clone();
    let inv = lead.inv()?;
    let expr = OpExpr::from_terms(
        bundle,
        cols.iter().cloned().zip(img.iter().map(|c| c * &inv)),
    );
    let multipliers: Vec<(String, RationalFn)> = rows
        .iter()
        .zip(y)
        .filter(|(_, c)| !c.is_zero())
        .map(|((id, _), c)| (id.clone(), c * &inv))
        .collect();
    let mut excluded = goal_rref.excluded;
    excluded.extend(collect_excluded(multipliers.iter().map(|(_, c)| c)));
    excluded.extend(collect_excluded(expr.terms().values()));
    excluded.extend(lead.integer_zeros());
    Ok(Derivation {
        expr,
        multipliers,
        excluded,
        kernel_dim: 0,
        route: "eliminate",
    })
}

/// Writes `target` as a combination of `rows`.
pub(crate) fn consequence(
    rows: &[(String, OpExpr)],
    target: &OpExpr,
) -> Result<Derivation, WbkError> {
    let cols: Vec<OpSymbol> = rows
        .iter()
        .flat_map(|(_, e)| e.symbols().cloned())
        .chain(target.symbols().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let m = Matrix::from_rows(
        cols.iter()
            .map(|s| rows.iter().map(|(_, e)| e.coeff(s)).collect())
            .collect(),
    );
    let rhs: Vec<RationalFn> = cols.iter().map(|s| target.coeff(s)).collect();
    let sol = match LinearSystem::new(m, rhs)?.solve() {
        Ok(s) => s,
        Err(QfieldError::Inconsistent { row, .. }) => {
            return Err(WbkError::NotInSpan(format!(
                "{} cannot be matched",
                cols[row]
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let mut expr = OpExpr::zero(target.bundle.clone());
    for ((_, e), c) in rows.iter().zip(&sol.particular) {
        expr.add_scaled(e, c);
    }
    let canon = expr.canonical();
    let scale = canon.ratio_to(&expr).unwrap_or_else(RationalFn::one);
    let multipliers: Vec<(String, RationalFn)> = rows
        .iter()
        .zip(&sol.particular)
        .filter(|(_, c)| !c.is_zero())
        .map(|((id, _), c)| (id.clone(), c * &scale))
        .collect();
    let mut excluded: BTreeSet<i64> = sol.excluded.into_iter().collect();
    excluded.extend(collect_excluded(multipliers.iter().map(|(_, c)| c)));
    Ok(Derivation {
        expr: canon,
        multipliers,
        excluded,
        kernel_dim: sol.kernel.len(),
        route: "consequence",
    })
}

fn has_no_hyper(b: &Bundle) -> bool {
    matches!(b.family(), Some(Family::Lambda { b: 0, .. }))
}

/// The vanishing expression of `id` on `bundle` at `rank`, with `QHYPER`
/// dropped where the hyper-Kähler curvature acts trivially.
pub fn input_expr(
    db: &Database,
    id: &str,
    bundle: &Bundle,
    rank: Rank,
) -> Result<OpExpr, WbkError> {
    let e = if id.starts_with('@') {
        pseudo_identity(bundle, id, rank)?
    } else {
        let ident = db.require(id)?;
        if &ident.bundle != bundle {
            return Err(WbkError::Malformed {
                id: id.to_string(),
                msg: format!("lives on {}, not {bundle}", ident.bundle),
            });
        }
        at_rank(&ident.expr, rank)?
    };
    Ok(strip_hyper(e))
}

fn strip_hyper(e: OpExpr) -> OpExpr {
    if has_no_hyper(&e.bundle) {
        e.without(&BTreeSet::from([OpSymbol::QHyper]))
    } else {
        e
    }
}

fn at_rank(e: &OpExpr, rank: Rank) -> Result<OpExpr, WbkError> {
    match rank {
        Rank::Generic => Ok(e.clone()),
        Rank::At(n) => Ok(e.specialize(n)?),
    }
}

/// The stored expression of an identity at `rank`, canonically scaled.
pub fn target_expr(ident: &Identity, rank: Rank) -> Result<OpExpr, WbkError> {
    Ok(strip_hyper(at_rank(&ident.expr, rank)?).canonical())
}

fn rows_for(
    db: &Database,
    using: &[String],
    bundle: &Bundle,
    assume: &BTreeSet<OpSymbol>,
    rank: Rank,
) -> Result<Vec<(String, OpExpr)>, WbkError> {
    using
        .iter()
        .map(|id| {
            Ok((
                id.clone(),
                input_expr(db, id, bundle, rank)?.without(assume),
            ))
        })
        .collect()
}

/// Eliminates `goal` from the `using` identities on `b`, with every symbol
/// in `assume` set to zero.
pub fn derive(
    db: &Database,
    b: &Bundle,
    goal: &Goal,
    using: &[String],
    assume: &BTreeSet<OpSymbol>,
    rank: Rank,
) -> Result<Derivation, WbkError> {
    eliminate(&rows_for(db, using, b, assume, rank)?, goal)
}

fn edge_to(b: &Bundle, w: &Bundle, rank: Rank) -> Result<GradientEdge, WbkError> {
    edges(b, rank)?
        .into_iter()
        .find(|e| &e.target == w)
        .ok_or_else(|| WbkError::Unsupported(format!("no gradient from {b} to {w}")))
}

fn single_composite(ident: &Identity) -> Result<OpSymbol, WbkError> {
    let comps: Vec<&OpSymbol> = ident.expr.symbols().filter(|s| s.is_composite()).collect();
    match comps.as_slice() {
        [s] => Ok((*s).clone()),
        _ => Err(WbkError::Unsupported(format!(
            "{} does not contain exactly one composite operator",
            ident.id
        ))),
    }
}

fn compare(
    ident: &Identity,
    family: FormFamily,
    p: u32,
    rank: Rank,
) -> Result<Derivation, WbkError> {
    let b = &ident.bundle;
    let degree = if b == &Bundle::trivial() { 0 } else { 1 };
    if b != &Bundle::trivial() && b != &Bundle::he() || p != degree {
        return Err(WbkError::Unsupported(format!(
            "comparison constants for p = {p} on {b}"
        )));
    }
    let x = single_composite(ident)?;
    let m = &RationalFn::from_int(4) * &rank.n();
    let c = |k: i64| &m + &RationalFn::from_int(k);
    let pp = RationalFn::from_int(p as i64);
    let p1 = &pp + &RationalFn::one();
    let two_p = &RationalFn::from_int(2) * &pp;
    let (kappa, edge) = match (&x, family) {
        (OpSymbol::DdStar, FormFamily::Forms) => (
            &(&m - &pp) + &RationalFn::one(),
            edge_to(b, &Bundle::trivial(), rank)?,
        ),
        (OpSymbol::DStarD(Some(w)), FormFamily::Forms) => (p1, edge_to(b, w, rank)?),
        (OpSymbol::DelStarDel, FormFamily::Symmetric) => {
            let num = &(&c(-2) + &two_p) * &(&c(-3) + &pp);
            (
                num.checked_div(&(&c(-4) + &two_p))?,
                edge_to(b, &Bundle::trivial(), rank)?,
            )
        }
        (OpSymbol::DelDelStar(Some(w)), FormFamily::Symmetric) => (p1, edge_to(b, w, rank)?),
        _ => {
            return Err(WbkError::Unsupported(format!(
                "no comparison constant for {x} on {family:?}"
            )))
        }
    };
    let mut expr = OpExpr::from_terms(b.clone(), [(x, RationalFn::one())]);
    expr.add_term(OpSymbol::B(edge.index), &-&kappa);
    let excluded = collect_excluded(expr.terms().values());
    Ok(Derivation {
        expr: expr.canonical(),
        multipliers: vec![],
        excluded,
        kernel_dim: 0,
        route: "compare",
    })
}

fn lowered(x: &OpSymbol) -> Option<OpSymbol> {
    match x {
        OpSymbol::DStarD(Some(_)) => Some(OpSymbol::DdStar),
        OpSymbol::DelDelStar(Some(_)) => Some(OpSymbol::DelStarDel),
        _ => None,
    }
}

/// `x = κ·B(e)` read off a two-term expression.
fn two_term(
    e: &OpExpr,
    id: &str,
) -> Result<(OpSymbol, OpSymbol, RationalFn, RationalFn), WbkError> {
    let terms: Vec<_> = e.terms().iter().collect();
    match terms.as_slice() {
        [(b, cb), (x, cx)] if b.is_b() && x.is_composite() => {
            Ok(((*x).clone(), (*b).clone(), (*cx).clone(), (*cb).clone()))
        }
        _ => Err(WbkError::Unsupported(format!(
            "{id} is not of the form X = c·B"
        ))),
    }
}

fn transfer(
    db: &Database,
    ident: &Identity,
    from: &str,
    rank: Rank,
) -> Result<Derivation, WbkError> {
    let src = db.require(from)?;
    let e = input_expr(db, from, &src.bundle, rank)?;
    let (x, bsym, cx, cb) = two_term(&e, from)?;
    let v = x
        .projection()
        .ok_or_else(|| WbkError::Unsupported(format!("{from}: {x} has no projection")))?;
    if v != &ident.bundle {
        return Err(WbkError::Unsupported(format!(
            "{from} projects to {v}, not {}",
            ident.bundle
        )));
    }
    let edge = edge_to(&src.bundle, v, rank)?;
    if OpSymbol::B(edge.index) != bsym {
        return Err(WbkError::Unsupported(format!(
            "{from}: {bsym} is not the gradient to {v}"
        )));
    }
    let back = edge.index.reversed();
    if !edges(v, rank)?.iter().any(|g| g.index == back) {
        return Err(WbkError::Unsupported(format!("{v} has no gradient {back}")));
    }
    let kappa = -&(&cb / &cx);
    let reldim = relative_dim_constant(&src.bundle, v, rank)?;
    let low = lowered(&x).expect("projected composite");
    let mut expr = OpExpr::from_terms(v.clone(), [(low, RationalFn::one())]);
    expr.add_term(OpSymbol::B(back), &-&(&kappa * &reldim));
    let excluded = collect_excluded(expr.terms().values());
    Ok(Derivation {
        expr: expr.canonical(),
        multipliers: vec![(from.to_string(), cx.inv()?)],
        excluded,
        kernel_dim: 0,
        route: "transfer",
    })
}

fn split(db: &Database, ident: &Identity, from: &str, rank: Rank) -> Result<Derivation, WbkError> {
    let x = single_composite(ident)?;
    let w = x
        .projection()
        .ok_or_else(|| WbkError::Unsupported(format!("{}: {x} has no projection", ident.id)))?;
    let full = match &x {
        OpSymbol::DStarD(_) => OpSymbol::DStarD(None),
        _ => OpSymbol::DelDelStar(None),
    };
    let e = input_expr(db, from, &ident.bundle, rank)?;
    if e.symbols().any(|s| !s.is_b() && s != &full) {
        return Err(WbkError::Unsupported(format!(
            "{from} is not a pure {full} expansion"
        )));
    }
    let c0 = e.coeff(&full);
    if c0.is_zero() {
        return Err(WbkError::Unsupported(format!(
            "{from} does not contain {full}"
        )));
    }
    let edge = edge_to(&ident.bundle, w, rank)?;
    let bsym = OpSymbol::B(edge.index);
    let kappa = -&(&e.coeff(&bsym) / &c0);
    let mut expr = OpExpr::from_terms(ident.bundle.clone(), [(x.clone(), RationalFn::one())]);
    expr.add_term(bsym, &-&kappa);
    let excluded = collect_excluded(expr.terms().values());
    Ok(Derivation {
        expr: expr.canonical(),
        multipliers: vec![(from.to_string(), c0.inv()?)],
        excluded,
        kernel_dim: 0,
        route: "split",
    })
}

/// Runs one derivation route of `ident` at `rank`.
pub fn run_recipe(
    db: &Database,
    ident: &Identity,
    recipe: &Recipe,
    rank: Rank,
) -> Result<Derivation, WbkError> {
    let assume = &ident.assumptions;
    match recipe {
        Recipe::Eliminate {
            using,
            eliminate: elim,
            keep,
        } => {
            let goal = if keep.is_empty() {
                Goal::Eliminate(elim.iter().cloned().collect())
            } else {
                Goal::Keep(keep.iter().cloned().collect())
            };
            derive(db, &ident.bundle, &goal, using, assume, rank)
        }
        Recipe::Consequence { using } => {
            let rows = rows_for(db, using, &ident.bundle, assume, rank)?;
            consequence(&rows, &target_expr(ident, rank)?)
        }
        Recipe::Compare { family, p } => compare(ident, *family, *p, rank),
        Recipe::Transfer { from } => transfer(db, ident, from, rank),
        Recipe::Split { from } => split(db, ident, from, rank),
    }
}

/// Re-derives a database identity along every recorded route. Routes must
/// agree; the first one is returned.
pub fn derive_identity(db: &Database, id: &str, rank: Rank) -> Result<Derivation, WbkError> {
    let ident = db.require(id)?;
    if !ident.is_derived() {
        return Err(WbkError::Unsupported(format!(
            "{id} is transcribed, not derived"
        )));
    }
    let mut first: Option<Derivation> = None;
    for recipe in &ident.derivation {
        let d = run_recipe(db, ident, recipe, rank)?;
        match &first {
            None => first = Some(d),
            Some(f) if f.expr != d.expr => {
                return Err(WbkError::Malformed {
                    id: id.to_string(),
                    msg: format!(
                        "routes disagree: {} vs {}",
                        f.expr.listing(),
                        d.expr.listing()
                    ),
                })
            }
            Some(_) => {}
        }
    }
    Ok(first.expect("derived identity has a route"))
}

/// [`derive_identity`] restricted to identities that carry a composite operator.
pub fn derive_composite(db: &Database, id: &str, rank: Rank) -> Result<Derivation, WbkError> {
    let ident = db.require(id)?;
    single_composite(ident)?;
    derive_identity(db, id, rank)
}
