//! Command-line front end. [`run`] executes a parsed [`RunConfig`] and
//! returns the exit code with everything that would be printed, so the
//! binary stays a thin wrapper and the commands are testable in process.
//!
//! Exit codes: 0 on success, 1 on I/O or validation errors, 2 when `mle`
//! or `horn` refuse a pattern that is not doubly chordal bipartite.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::classify::{classify, ClassificationResult};
use crate::cliques::{Clique, CliqueIndex};
use crate::error::{Error, Result};
use crate::horn::{build_horn_pair, restrict_horn};
use crate::mle::{birch_residuals, clique_formula_mle};
use crate::numeric::{
    cycle_critical_points, cycle_ml_polynomial, double_square_critical_points, double_square_critical_poly,
    ipf_mle, loglik, select_positive, CriticalPoint, Polynomial,
};
use crate::pattern::{self, parse_counts_csv, parse_pattern, CountTable, Pattern};
use crate::rational::{format_rational, to_f64};

#[derive(Debug, Clone, Parser)]
#[command(name = "quasimle", version, about = "Exact and numeric maximum likelihood for quasi-independence models")]
pub struct RunConfig {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Decide whether the pattern is doubly chordal bipartite.
    Classify { pattern: PathBuf },
    /// List the maximal cliques and their maximal intersections.
    Cliques { pattern: PathBuf },
    /// Closed-form estimate for a doubly chordal bipartite pattern.
    Mle {
        pattern: PathBuf,
        counts: PathBuf,
        /// Also print each cell's unsimplified product formula.
        #[arg(long)]
        factored: bool,
    },
    /// Print the Horn pair (B, h).
    Horn {
        pattern: PathBuf,
        /// Restrict to an induced subpattern, e.g. `rows=1,2,cols=1,2,3`.
        #[arg(long, value_parser = parse_restriction)]
        restrict: Option<Restriction>,
    },
    /// Compare the exact estimate with iterative proportional fitting.
    Verify {
        pattern: PathBuf,
        counts: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 100_000)]
        max_iter: usize,
    },
    /// Print the critical-equation polynomial of a cycle or the double square.
    Mldegree(MlDegreeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MlDegreeArgs {
    /// Half-length k of the cycle of length 2k.
    #[arg(long, required_unless_present = "double_square", conflicts_with = "double_square")]
    pub cycle: Option<usize>,
    /// Use the 3×3 double square.
    #[arg(long = "double-square")]
    pub double_square: bool,
    /// Counts CSV on the k×k cycle or 3×3 double-square grid.
    pub counts: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub rows: BTreeSet<usize>,
    pub cols: BTreeSet<usize>,
}

/// Parses `rows=1,2,cols=1,2,3`.
pub fn parse_restriction(text: &str) -> std::result::Result<Restriction, String> {
    let body = text
        .strip_prefix("rows=")
        .ok_or_else(|| "expected rows=..,cols=..".to_string())?;
    let (rows, cols) = body
        .split_once(",cols=")
        .or_else(|| body.split_once(";cols="))
        .ok_or_else(|| "expected rows=..,cols=..".to_string())?;
    let list = |s: &str| -> std::result::Result<BTreeSet<usize>, String> {
        s.split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|e| format!("bad index {x:?}: {e}")))
            .collect()
    };
    Ok(Restriction {
        rows: list(rows)?,
        cols: list(cols)?,
    })
}

/// Everything a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(config: &RunConfig) -> Outcome {
    let mut out = Outcome {
        code: 0,
        stdout: String::new(),
        stderr: String::new(),
    };
    if let Err(e) = dispatch(config, &mut out) {
        report_error(config, &e, &mut out);
    }
    out
}

fn report_error(config: &RunConfig, e: &Error, out: &mut Outcome) {
    if let Error::NotDoublyChordalBipartite(result) = e {
        let refusing = matches!(config.command, Command::Mle { .. } | Command::Horn { .. });
        if refusing {
            out.code = 2;
            if config.json {
                out.stdout = to_pretty(&json!({ "error": e.name(), "classification": **result }));
            } else {
                out.stdout = format!("{}\n", classification_text(result));
            }
            return;
        }
    }
    out.code = 1;
    let _ = writeln!(out.stderr, "error[{}]: {e}", e.name());
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Reads a grid pattern, or the JSON export when the file ends in `.json`.
pub fn load_pattern(path: &Path) -> Result<Pattern> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let value: Value = serde_json::from_str(&text)?;
        return Ok(pattern::from_json(&value)?.0);
    }
    parse_pattern(&text)
}

fn load_counts(s: &Pattern, path: &Path, out: &mut Outcome) -> Result<CountTable> {
    let (u, warnings) = parse_counts_csv(s, &read(path)?)?;
    for w in warnings {
        let _ = writeln!(out.stderr, "warning: {w}");
    }
    Ok(u)
}

fn classification_text(r: &ClassificationResult) -> String {
    match &r.witness {
        None => format!("verdict: {}", r.verdict),
        Some(w) => format!("verdict: {}\nwitness: {w}", r.verdict),
    }
}

fn clique_list(cs: &[Clique]) -> Vec<Value> {
    cs.iter()
        .map(|c| {
            let cells: Vec<[usize; 2]> = c.cells().into_iter().map(Into::into).collect();
            json!({ "rows": c.rows, "cols": c.cols, "cells": cells, "label": c.to_string() })
        })
        .collect()
}

fn dispatch(config: &RunConfig, out: &mut Outcome) -> Result<()> {
    match &config.command {
        Command::Classify { pattern } => {
            let s = load_pattern(pattern)?;
            let r = classify(&s);
            out.stdout = if config.json {
                to_pretty(&json!({
                    "m": s.m(),
                    "n": s.n(),
                    "cells": s.len(),
                    "connected": s.is_connected(),
                    "verdict": r.verdict,
                    "witness": r.witness,
                }))
            } else {
                format!(
                    "{}\nconnected: {}\n",
                    classification_text(&r),
                    if s.is_connected() { "yes" } else { "no" }
                )
            };
        }
        Command::Cliques { pattern } => {
            let s = load_pattern(pattern)?;
            let index = CliqueIndex::new(&s);
            let divergence = index.int_divergence();
            if config.json {
                let div: Vec<Value> = divergence
                    .iter()
                    .map(|(c, within, global)| {
                        json!({
                            "cell": <[usize; 2]>::from(*c),
                            "int_ij": clique_list(within),
                            "int_s_containing": clique_list(global),
                        })
                    })
                    .collect();
                out.stdout = to_pretty(&json!({
                    "source": index.source(),
                    "max": clique_list(index.max()),
                    "int": clique_list(index.int()),
                    "int_divergence": div,
                }));
            } else {
                let mut t = String::new();
                let _ = writeln!(t, "Max(S): {} cliques ({:?})", index.max().len(), index.source());
                for c in index.max() {
                    let _ = writeln!(t, "  {c}");
                }
                let _ = writeln!(t, "Int(S): {} sets", index.int().len());
                for c in index.int() {
                    let _ = writeln!(t, "  {c}");
                }
                for (cell, _, _) in &divergence {
                    let _ = writeln!(t, "note: Int({cell}) differs from the members of Int(S) containing it");
                }
                out.stdout = t;
            }
        }
        Command::Mle {
            pattern,
            counts,
            factored,
        } => {
            let s = load_pattern(pattern)?;
            let u = load_counts(&s, counts, out)?;
            let p = clique_formula_mle(&s, &u)?;
            let formulas = p.formulas().expect("clique formula keeps its factors");
            if config.json {
                let cells: Vec<Value> = s
                    .cells()
                    .iter()
                    .zip(p.values())
                    .zip(formulas)
                    .map(|((c, v), f)| {
                        let mut entry = json!({
                            "cell": <[usize; 2]>::from(*c),
                            "value": format_rational(v),
                            "approx": to_f64(v),
                        });
                        if *factored {
                            entry["formula"] = json!(f.to_string());
                        }
                        entry
                    })
                    .collect();
                out.stdout = to_pretty(&json!({ "estimate": cells }));
            } else {
                let mut t = String::new();
                for ((c, v), f) in s.cells().iter().zip(p.values()).zip(formulas) {
                    let _ = write!(t, "p{c}\t{}\t{:.12}", format_rational(v), to_f64(v));
                    if *factored {
                        let _ = write!(t, "\t{f}");
                    }
                    t.push('\n');
                }
                out.stdout = t;
            }
        }
        Command::Horn { pattern, restrict } => {
            let s = load_pattern(pattern)?;
            let mut hp = build_horn_pair(&s)?;
            if let Some(r) = restrict {
                hp = restrict_horn(&hp, &r.rows, &r.cols)?;
            }
            out.stdout = if config.json {
                to_pretty(&hp.to_json())
            } else {
                hp.to_tsv()
            };
        }
        Command::Verify {
            pattern,
            counts,
            tol,
            max_iter,
        } => verify(config, pattern, counts, *tol, *max_iter, out)?,
        Command::Mldegree(args) => mldegree(config, args, out)?,
    }
    Ok(())
}

fn verify(config: &RunConfig, pattern: &Path, counts: &Path, tol: f64, max_iter: usize, out: &mut Outcome) -> Result<()> {
    let s = load_pattern(pattern)?;
    let u = load_counts(&s, counts, out)?;
    if !u.is_positive() {
        let _ = writeln!(out.stderr, "warning: some counts are zero; IPF may converge slowly");
    }
    let fit = ipf_mle(&s, &u, tol, max_iter)?;
    let ipf_loglik = loglik(&s, &u, &fit.values);
    let exact = match clique_formula_mle(&s, &u) {
        Ok(p) => Some(p),
        Err(Error::NotDoublyChordalBipartite(_)) => None,
        Err(e) => return Err(e),
    };
    let verdict = classify(&s).verdict;
    let mut report = json!({
        "verdict": verdict,
        "ipf_iterations": fit.iterations,
        "ipf_margin_gap": fit.max_marginal_gap,
        "ipf_loglik": ipf_loglik,
    });
    if let Some(p) = &exact {
        let birch = birch_residuals(&s, &u, p)?;
        let approx = p.to_f64();
        let gap = approx
            .iter()
            .zip(&fit.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        report["max_gap"] = json!(gap);
        report["exact_loglik"] = json!(loglik(&s, &u, &approx));
        report["birch_exact"] = json!(birch.is_exact());
    }
    out.stdout = if config.json {
        to_pretty(&report)
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "verdict: {verdict}");
        let _ = writeln!(t, "ipf: {} iterations, margin gap {:.3e}", fit.iterations, fit.max_marginal_gap);
        let _ = writeln!(t, "ipf log-likelihood: {ipf_loglik:.12}");
        match &exact {
            Some(_) => {
                let _ = writeln!(t, "exact log-likelihood: {:.12}", report["exact_loglik"].as_f64().unwrap_or(f64::NAN));
                let _ = writeln!(t, "birch residuals exactly zero: {}", report["birch_exact"]);
                let _ = writeln!(t, "max gap: {:.3e}", report["max_gap"].as_f64().unwrap_or(f64::NAN));
            }
            None => {
                let _ = writeln!(t, "exact estimate: none (no rational closed form for this pattern)");
            }
        }
        t
    };
    Ok(())
}

fn points_json(points: &[CriticalPoint]) -> Vec<Value> {
    points
        .iter()
        .map(|p| json!({ "params": p.params, "table": p.table, "positive": p.is_positive() }))
        .collect()
}

fn mldegree(config: &RunConfig, args: &MlDegreeArgs, out: &mut Outcome) -> Result<()> {
    let (s, var, family) = match args.cycle {
        Some(k) => (
            Pattern::cycle(k).map_err(|e| Error::WrongPattern(e.to_string()))?,
            "α",
            format!("cycle of length {}", 2 * k),
        ),
        None => (Pattern::double_square(), "β", "double square".to_string()),
    };
    let u = load_counts(&s, &args.counts, out)?;
    let (poly, points): (Polynomial, Vec<CriticalPoint>) = match args.cycle {
        Some(k) => (cycle_ml_polynomial(k, &u)?, cycle_critical_points(k, &u)?),
        None => (double_square_critical_poly(&u)?, double_square_critical_points(&u)?),
    };
    let degree = poly.degree().unwrap_or(0);
    let roots = poly.real_roots();
    let chosen = select_positive(&points);
    out.stdout = if config.json {
        let coefficients: Vec<String> = poly.coefficients().iter().map(format_rational).collect();
        to_pretty(&json!({
            "family": family,
            "variable": var,
            "polynomial": poly.display_in(var),
            "coefficients": coefficients,
            "degree": degree,
            "real_roots": roots,
            "critical_points": points_json(&points),
            "selected": chosen.map(|p| json!({ "params": p.params, "table": p.table })),
        }))
    } else {
        let mut t = String::new();
        let _ = writeln!(t, "family: {family}");
        let _ = writeln!(t, "polynomial: {}", poly.display_in(var));
        let _ = writeln!(t, "degree: {degree}");
        let _ = writeln!(
            t,
            "real roots: {}",
            roots.iter().map(|r| format!("{r:.12}")).collect::<Vec<_>>().join(", ")
        );
        for p in &points {
            let params: Vec<String> = p.params.iter().map(|x| format!("{x:.12}")).collect();
            let _ = writeln!(
                t,
                "critical point ({}): {}",
                params.join(", "),
                if p.is_positive() { "positive" } else { "not positive" }
            );
        }
        if let Some(p) = chosen {
            let cells: Vec<String> = s
                .cells()
                .iter()
                .zip(&p.table)
                .map(|(c, v)| format!("p{c}={v:.12}"))
                .collect();
            let _ = writeln!(t, "estimate: {}", cells.join(" "));
        }
        t
    };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_syntax() {
        let r = parse_restriction("rows=1,2,cols=1,2,3").unwrap();
        assert_eq!(r.rows, [1, 2].into_iter().collect());
        assert_eq!(r.cols, [1, 2, 3].into_iter().collect());
        assert!(parse_restriction("cols=1").is_err());
        assert!(parse_restriction("rows=1,x,cols=2").is_err());
    }

    #[test]
    fn parses_subcommands() {
        let c = RunConfig::try_parse_from(["quasimle", "mldegree", "--cycle", "3", "u.csv"]).unwrap();
        assert!(matches!(c.command, Command::Mldegree(MlDegreeArgs { cycle: Some(3), .. })));
        assert!(RunConfig::try_parse_from(["quasimle", "mldegree", "u.csv"]).is_err());
        assert!(RunConfig::try_parse_from(["quasimle", "mldegree", "--cycle", "3", "--double-square", "u.csv"]).is_err());
        let c = RunConfig::try_parse_from(["quasimle", "--json", "horn", "p.txt", "--restrict", "rows=1,cols=1"]).unwrap();
        assert!(c.json);
    }

    #[test]
    fn missing_file_is_exit_one() {
        let c = RunConfig::try_parse_from(["quasimle", "classify", "/nonexistent/pattern.txt"]).unwrap();
        let o = run(&c);
        assert_eq!(o.code, 1);
        assert!(o.stderr.starts_with("error[Io]"));
    }

    fn data(name: &str) -> String {
        format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn invoke(args: &[&str]) -> Outcome {
        let mut argv = vec!["quasimle".to_string()];
        argv.extend(args.iter().map(|a| match a.strip_prefix('@') {
            Some(name) => data(name),
            None => a.to_string(),
        }));
        run(&RunConfig::try_parse_from(argv).unwrap())
    }

    #[test]
    fn classify_tree() {
        let o = invoke(&["classify", "@tree_8x9.txt"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("verdict: DoublyChordalBipartite"));
    }

    #[test]
    fn mle_refuses_double_square_with_witness() {
        let o = invoke(&["mle", "@double_square.txt", "@double_square_counts.csv"]);
        assert_eq!(o.code, 2);
        assert!(o.stdout.contains("witness: double square"));

        let o = invoke(&["--json", "mle", "@double_square.txt", "@double_square_counts.csv"]);
        assert_eq!(o.code, 2);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["error"], "NotDoublyChordalBipartite");
        assert_eq!(v["classification"]["witness"]["type"], "double_square");
    }

    #[test]
    fn factored_mle_prints_exact_values() {
        let o = invoke(&["mle", "--factored", "@corner_zero_3x3.txt", "@corner_zero_3x3_counts.csv"]);
        assert_eq!(o.code, 0);
        let p13 = o.stdout.lines().find(|l| l.starts_with("p13")).unwrap();
        assert!(p13.contains("104/713"));
        assert!(p13.contains("(u11 + u12 + u13) (u13 + u23) / u++"));
    }

    #[test]
    fn verify_agrees_with_ipf() {
        let o = invoke(&["verify", "@corner_zero_3x3.txt", "@corner_zero_3x3_ones.csv"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("birch residuals exactly zero: true"));
        let gap: f64 = o
            .stdout
            .lines()
            .find_map(|l| l.strip_prefix("max gap: "))
            .unwrap()
            .parse()
            .unwrap();
        assert!(gap < 1e-8);

        let o = invoke(&["verify", "@double_square.txt", "@double_square_counts.csv"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("exact estimate: none"));
    }

    #[test]
    fn json_cliques_parse_back() {
        let o = invoke(&["--json", "cliques", "@corner_zero_3x3.txt"]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["max"].as_array().unwrap().len(), 2);
        assert_eq!(v["int"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn horn_restriction_marks_inert_rows() {
        let o = invoke(&["horn", "@corner_zero_3x3.txt", "--restrict", "rows=1,2,cols=1,2,3"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.starts_with("row\t11\t12\t13\t21\t22\t23\n"));
        assert!(o.stdout.contains("u3+ (inert)"));
        assert!(o.stdout.trim_end().ends_with("h\t-1\t-1\t1\t-1\t-1\t1"));
    }

    #[test]
    fn mldegree_double_square() {
        let o = invoke(&["mldegree", "--double-square", "@double_square_counts.csv"]);
        assert_eq!(o.code, 0);
        assert!(o.stdout.contains("polynomial: 6β^2 + 24β - 8"));
        assert!(o.stdout.contains("degree: 2"));
    }
}
