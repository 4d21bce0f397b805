//! The `wbk` command line.
//!
//! Exit status: 0 when every check passes, 1 on a verification failure,
//! 2 on a usage error, 3 on a domain or I/O error.

mod report;

pub use report::{emit_json, emit_latex, emit_markdown, latex_escape, Format, Report};

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{Read as _, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::qfield::RationalFn;
use crate::repcalc::{edges, weyl_dim, Bundle, Rank, SpnWeight};
use crate::spectra::{minimal_eigenvalue, special_eigenvalues};
use crate::stability::{classify_wolf, index_i1, theorem_a, SpectralInput, WolfTable};
use crate::wbk::{
    check_qr_consistency, derive_identity, scalar_solve, verify_all, Database, OpSymbol, QrStatus,
    VerifyOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "wbk",
    version,
    about = "Exact Weitzenbock calculus on quaternion-Kahler bundles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of an Sp(n)-module or of a bundle's fibre.
    Dim(DimArgs),
    /// Generalized gradients on a bundle.
    Edges {
        #[arg(long)]
        bundle: Bundle,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Minimal-eigenvalue bound on Sym^k H * L(a,b), as a multiple of scal.
    Bound {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Re-derive a database identity.
    Derive {
        id: String,
        #[arg(long, conflicts_with = "n")]
        symbolic: bool,
        /// `symbolic` or an integer.
        #[arg(long, value_parser = parse_rank)]
        n: Option<Rank>,
    },
    /// Solve for the scalars by which the B operators act on an eigensection.
    Solve {
        #[arg(long)]
        bundle: Bundle,
        /// Comma-separated symbols assumed to vanish, e.g. `B[+1,+2],B[-1,+1]`.
        #[arg(long, default_value = "", value_parser = parse_symbols)]
        assume: BTreeSet<OpSymbol>,
        /// Eigenvalue as a multiple of scal, or one of mu, lambda1, lambda2, lambda3.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Re-derive and check identities.
    Verify {
        ids: Vec<String>,
        #[arg(long, conflicts_with = "ids")]
        all: bool,
        #[arg(long, default_value = "2:32", value_parser = parse_range)]
        n_range: (i64, i64),
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stability verdict for spectral data, or for the Wolf-space table.
    Classify(ClassifyArgs),
    /// Full verification report with the bounds table.
    Report {
        #[arg(long, value_enum, default_value = "latex")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "2:32", value_parser = parse_range)]
        n_range: (i64, i64),
    },
}

#[derive(Debug, Args)]
pub struct DimArgs {
    #[arg(long)]
    pub n: Option<i64>,
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "bundle",
        required_unless_present = "bundle"
    )]
    pub weight: Option<Vec<u32>>,
    #[arg(long)]
    pub bundle: Option<Bundle>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// SpectralInput JSON; `-` reads stdin.
    #[arg(long, conflicts_with = "wolf", required_unless_present = "wolf")]
    pub input: Option<PathBuf>,
    /// Classify the Wolf spaces instead.
    #[arg(long)]
    pub wolf: bool,
    /// Wolf table JSON replacing the shipped one.
    #[arg(long, requires = "wolf")]
    pub table: Option<PathBuf>,
    #[arg(long, default_value = "2:32", value_parser = parse_range)]
    pub n_range: (i64, i64),
}

fn parse_rank(s: &str) -> Result<Rank, String> {
    if s == "symbolic" {
        return Ok(Rank::Generic);
    }
    let n: i64 = s
        .parse()
        .map_err(|_| format!("expected `symbolic` or an integer, got `{s}`"))?;
    if n < 1 {
        return Err(format!("n must be positive, got {n}"));
    }
    Ok(Rank::At(n))
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound `{lo}`"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound `{hi}`"))?;
    if lo < 2 || hi < lo {
        return Err(format!("need 2 <= LO <= HI, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Splits on commas outside brackets.
fn parse_symbols(s: &str) -> Result<BTreeSet<OpSymbol>, String> {
    let mut out = BTreeSet::new();
    let mut depth = 0usize;
    let mut start = 0;
    let mut push = |piece: &str| -> Result<(), String> {
        let piece = piece.trim();
        if !piece.is_empty() {
            out.insert(piece.parse::<OpSymbol>().map_err(|e| e.to_string())?);
        }
        Ok(())
    };
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                push(&s[start..i])?;
                start = i + 1;
            }
            _ => {}
        }
    }
    push(&s[start..])?;
    Ok(out)
}

fn parse_lambda(s: &str, rank: Rank) -> Result<RationalFn, Failure> {
    let sp = special_eigenvalues(rank);
    Ok(match s.trim() {
        "mu" => sp.mu,
        "lambda1" => sp.lambda1,
        "lambda2" => sp.lambda2,
        "lambda3" => sp.lambda3,
        other => other
            .parse()
            .map_err(|e| Failure::Usage(format!("--lambda: {e}")))?,
    })
}

/// How a command ended, other than success.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "wbk: {}", f.message());
            f.code()
        }
    }
}

fn load_db() -> Result<Database, Failure> {
    Database::from_env().map_err(|e| Failure::Domain(format!("loading database: {e}")))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(domain)
}

fn emit_to(path: Option<&Path>, out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Domain(format!("{}: {e}", p.display())))
        }
        None => emit(out, text),
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Dim(a) => dim(a, out),
        Command::Edges { bundle, n } => list_edges(&bundle, n, out),
        Command::Bound { k, a, b, n } => {
            let rank = n.map_or(Rank::Generic, Rank::At);
            let v = minimal_eigenvalue(k, a, b, rank).map_err(domain)?;
            emit(
                out,
                &format!(
                    "{}\n",
                    v.times_symbol("scal", crate::qfield::Style::Grammar)
                ),
            )?;
            Ok(EXIT_OK)
        }
        Command::Derive { id, symbolic: _, n } => derive(&id, n.unwrap_or(Rank::Generic), out),
        Command::Solve {
            bundle,
            assume,
            lambda,
        } => solve(&bundle, &assume, lambda.as_deref(), out),
        Command::Verify {
            ids,
            all: _,
            n_range,
            format,
            out: path,
        } => {
            let db = load_db()?;
            let full = ids.is_empty();
            let opts = VerifyOptions {
                n_lo: n_range.0,
                n_hi: n_range.1,
                ids: (!full).then_some(ids),
            };
            let v = verify_all(&db, &opts).map_err(domain)?;
            let mut report = Report::from_verify(format, v);
            if full {
                report = report.with_bounds().map_err(domain)?;
            }
            emit_to(path.as_deref(), out, &report.render())?;
            Ok(if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_FAIL
            })
        }
        Command::Classify(a) => classify(a, out),
        Command::Report {
            format,
            out: path,
            n_range,
        } => {
            let db = load_db()?;
            let opts = VerifyOptions {
                n_lo: n_range.0,
                n_hi: n_range.1,
                ids: None,
            };
            let v = verify_all(&db, &opts).map_err(domain)?;
            let report = Report::from_verify(format, v)
                .with_bounds()
                .map_err(domain)?;
            emit_to(path.as_deref(), out, &report.render())?;
            Ok(if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_FAIL
            })
        }
    }
}

fn dim(a: DimArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = match (a.weight, a.bundle, a.n) {
        (Some(w), _, Some(n)) => {
            let w = SpnWeight::new(w).map_err(domain)?;
            weyl_dim(&w, n).map_err(domain)?.to_string()
        }
        (Some(w), _, None) => {
            let w = SpnWeight::new(w).map_err(domain)?;
            RationalFn::from_poly(w.dim_poly()).to_grammar()
        }
        (None, Some(b), Some(n)) => b.dim(n).map_err(domain)?.to_string(),
        (None, Some(b), None) => RationalFn::from_poly(b.dim_poly()).to_grammar(),
        (None, None, _) => return Err(Failure::Usage("need --weight or --bundle".into())),
    };
    emit(out, &format!("{text}\n"))?;
    Ok(EXIT_OK)
}

fn list_edges(b: &Bundle, n: Option<i64>, out: &mut dyn Write) -> Result<i32, Failure> {
    let rank = n.map_or(Rank::Generic, Rank::At);
    let es = edges(b, rank).map_err(domain)?;
    let mut text = String::from("edge\ttarget\tconformal_weight\tuniversal_coeff\tcommuting\n");
    for e in es {
        let target = e
            .target
            .alias()
            .map_or_else(|| e.target.to_string(), str::to_string);
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            OpSymbol::B(e.index),
            target,
            e.conformal_weight.to_grammar(),
            e.universal_coeff.to_grammar(),
            if e.commuting { "yes" } else { "no" }
        ));
    }
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn derive(id: &str, rank: Rank, out: &mut dyn Write) -> Result<i32, Failure> {
    let db = load_db()?;
    let ident = db.require(id).map_err(domain)?;
    if let Rank::At(n) = rank {
        if n < ident.n_min {
            return Err(Failure::Domain(format!(
                "{id} holds for n >= {}, got n = {n}",
                ident.n_min
            )));
        }
    }
    let d = derive_identity(&db, id, rank).map_err(domain)?;
    emit(out, &format!("{}\n", d.expr.listing()))?;
    Ok(EXIT_OK)
}

fn solve(
    b: &Bundle,
    assume: &BTreeSet<OpSymbol>,
    lambda: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let db = load_db()?;
    let lambda = lambda.map(|s| parse_lambda(s, Rank::Generic)).transpose()?;
    let sol = scalar_solve(&db, b, assume, lambda.as_ref()).map_err(domain)?;
    let qr = check_qr_consistency(&db, &sol).map_err(domain)?;
    let mut text = String::new();
    match &sol.lambda {
        Some(l) if sol.forced_lambda => text.push_str(&format!("LAP = {l} (forced)\n")),
        Some(l) => text.push_str(&format!("LAP = {l}\n")),
        None => text.push_str("LAP = lambda\n"),
    }
    for (s, v) in &sol.values {
        if !assume.contains(s) {
            text.push_str(&format!("{s} = {v}\n"));
        }
    }
    for s in &sol.undetermined {
        text.push_str(&format!("{s} undetermined\n"));
    }
    let status = match qr.status {
        QrStatus::Pass => "pass",
        QrStatus::Fail => "fail",
        QrStatus::NotDeterminable => "not determinable",
    };
    text.push_str(&format!("q(R) check: {status}"));
    if let Some(r) = &qr.residual {
        text.push_str(&format!(", residual {r}"));
    }
    text.push('\n');
    emit(out, &text)?;
    Ok(if qr.status == QrStatus::Fail {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(domain)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
    }
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.wolf {
        let table = match &a.table {
            Some(p) => WolfTable::load(p).map_err(domain)?,
            None => WolfTable::builtin(),
        };
        let rows = classify_wolf(&table, a.n_range.0, a.n_range.1).map_err(domain)?;
        let json = serde_json::to_string_pretty(&rows).map_err(domain)?;
        emit(out, &format!("{json}\n"))?;
        return Ok(if rows.iter().all(|r| r.consistent) {
            EXIT_OK
        } else {
            EXIT_FAIL
        });
    }
    let path = a
        .input
        .ok_or_else(|| Failure::Usage("need --input or --wolf".into()))?;
    let input: SpectralInput = serde_json::from_str(&read_input(&path)?).map_err(domain)?;
    let report = theorem_a(&input).map_err(domain)?;
    let mut json = serde_json::json!({ "report": report });
    // i1 needs dim (Sym2HSym2E)_lambda1 given explicitly
    if let Ok(i1) = index_i1(&input) {
        json["index_i1"] = i1.into();
    }
    emit(
        out,
        &format!("{}\n", serde_json::to_string_pretty(&json).map_err(domain)?),
    )?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("wbk").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn bound_example() {
        let (code, out, _) = call(&["bound", "--k", "1", "--a", "2", "--b", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "scal/(2*(n+2))");
    }

    #[test]
    fn derive_eq1() {
        let (code, out, err) = call(&["derive", "eq1", "--symbolic"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(
            out.trim(),
            "B[-1,+2]: 1, B[-1,-1]: -(n-1), SCAL: -(n-1)/(8*n*(n+2))"
        );
    }

    #[test]
    fn derive_at_three() {
        let (code, out, _) = call(&["derive", "eq1", "--n", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "B[-1,+2]: 1, B[-1,-1]: -2, SCAL: -1/60");
    }

    #[test]
    fn symbols_split_outside_brackets() {
        let s = parse_symbols("B[+1,+2], B[-1,+1],B[+1,-1]").unwrap();
        assert_eq!(s.len(), 3);
        assert!(parse_symbols("").unwrap().is_empty());
        assert!(parse_symbols("B[+1,+2],NOPE").is_err());
    }

    #[test]
    fn usage_and_domain_codes() {
        assert_eq!(call(&["bound", "--k", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["verify", "--n-range", "5:3"]).0, EXIT_USAGE);
        assert_eq!(
            call(&["bound", "--k", "9", "--a", "2", "--b", "1", "--n", "2"]).0,
            EXIT_DOMAIN
        );
        assert_eq!(call(&["derive", "no-such-id"]).0, EXIT_DOMAIN);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn dims() {
        assert_eq!(call(&["dim", "--n", "3", "--weight", "1,1"]).1.trim(), "14");
        assert_eq!(call(&["dim", "--bundle", "HE", "--n", "3"]).1.trim(), "12");
    }
}
