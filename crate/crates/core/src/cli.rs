//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::PrimeField;
use crate::audit::{audit_family, AuditOptions, AuditReport, CheckStatus, Mode};
use crate::capacity::{bound_set, BoundSet};
use crate::convert::{conversion_params, convert_pir_to_spir, scheme_stats};
use crate::error::{Error, Result};
use crate::graphdb::{Graph, GraphKind};
use crate::schemes::render::{compact_table, repetition_table, InstanceJson};
use crate::schemes::{Cycle3Pir, P3CapacitySpir, PathPir, SchemeFamily};

#[derive(Debug, Parser)]
#[command(name = "spir", version, about = "SPIR schemes on graph-replicated storage")]
pub struct Cli {
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the reference answer tables.
    Tables(TablesArgs),
    /// Convert the base PIR scheme of a graph into an SPIR scheme.
    Convert(ConvertArgs),
    /// Verify reliability, privacy and the converse inequalities.
    Audit(AuditArgs),
    /// Rate bounds per graph size.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableChoice {
    P3Example,
    C3,
    P3Capacity,
    All,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub which: TableChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphArg {
    Path,
    Cycle,
}

impl From<GraphArg> for GraphKind {
    fn from(g: GraphArg) -> Self {
        match g {
            GraphArg::Path => GraphKind::Path,
            GraphArg::Cycle => GraphKind::Cycle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub graph: GraphArg,
    #[arg(long)]
    pub n: usize,
    /// Desired message for --full.
    #[arg(long, default_value_t = 1)]
    pub theta: usize,
    /// Also print the answer table.
    #[arg(long)]
    pub full: bool,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    /// Hand-built capacity-achieving scheme on P3.
    P3Capacity,
    /// Converted path PIR on P3.
    P3Example,
    /// Converted cycle PIR on C3.
    C3,
    /// Converted path PIR on P_N.
    Path,
    /// Base path PIR on P_N.
    PathPir,
    /// Base cycle PIR on C3.
    C3Pir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeChoice,
    /// Server count for path and path-pir.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest realization space enumerated exhaustively.
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u128,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub kind: GraphArg,
    /// A server count or an inclusive range such as `3..6`.
    #[arg(long, value_parser = parse_range)]
    pub n: (usize, usize),
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a server count: {t:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok((a, b))
        }
        None => num(s).map(|n| (n, n)),
    }
}

pub const TABLE_I_NOTE: &str = "note: database 3 downloads s2 here; s1 would leave b1 undecodable";

fn p3_example(field: PrimeField) -> Result<SchemeFamily> {
    convert_pir_to_spir(&PathPir::family(3, field)?, &Graph::path(3)?)
}

fn c3_example(field: PrimeField) -> Result<SchemeFamily> {
    convert_pir_to_spir(&Cycle3Pir::family(field), &Graph::cycle(3)?)
}

/// Base PIR family for a graph, where one is implemented.
pub fn base_family(kind: GraphKind, n: usize, field: PrimeField) -> Result<SchemeFamily> {
    match kind {
        GraphKind::Path => PathPir::family(n, field),
        GraphKind::Cycle if n == 3 => Ok(Cycle3Pir::family(field)),
        GraphKind::Cycle if n < 3 => Err(Error::TooFewServers { kind: "cycle", min: 3, n }),
        _ => Err(Error::NoBaseScheme(format!("{kind} N={n}"))),
    }
}

pub fn cmd_tables(which: TableChoice) -> Result<String> {
    let f = PrimeField::binary();
    let mut out = String::new();
    let all = which == TableChoice::All;
    if all || which == TableChoice::P3Example {
        let fam = p3_example(f)?;
        // Internal choices: the undesired symbol queried in each repetition.
        let t1 = fam.build(1, &[1, 1])?;
        let t2 = fam.build(2, &[0, 0])?;
        out.push_str("Answer table for P3 (L=4, |R|=5)\n");
        out.push_str(&repetition_table(&[&t1, &t2]));
        out.push_str(TABLE_I_NOTE);
        out.push('\n');
    }
    if all || which == TableChoice::C3 {
        if !out.is_empty() {
            out.push('\n');
        }
        let t = c3_example(f)?.build(1, &[])?;
        out.push_str("Answer table for C3 (L=12, |R|=21)\n");
        out.push_str(&repetition_table(&[&t]));
    }
    if all || which == TableChoice::P3Capacity {
        if !out.is_empty() {
            out.push('\n');
        }
        let fam = P3CapacitySpir::family(f);
        let t1 = fam.build(1, &[])?;
        let t2 = fam.build(2, &[])?;
        out.push_str("Capacity-achieving answer table for P3 (L=2, |R|=2)\n");
        out.push_str(&compact_table(&[&t1, &t2]));
    }
    Ok(out)
}

pub fn cmd_convert(args: &ConvertArgs) -> Result<String> {
    let field = PrimeField::new(args.q)?;
    let kind = GraphKind::from(args.graph);
    let graph = Graph::build(kind, args.n)?;
    let base = base_family(kind, args.n, field)?;
    let fam = convert_pir_to_spir(&base, &graph)?;
    let bp = base.base_params();
    let p = conversion_params(bp.symbols, graph.server_count(), graph.message_count())?;
    let st = scheme_stats(&fam)?;
    let inst = if args.full {
        fam.check_theta(args.theta)?;
        Some(fam.identity_instance(args.theta)?)
    } else {
        None
    };
    Ok(match args.format {
        Format::Json => {
            let mut v = json!({
                "graph": graph,
                "q": args.q,
                "L'": bp.symbols,
                "D'": bp.downloads,
                "x": p.x,
                "y": p.y,
                "L": st.message_len,
                "D": st.downloads,
                "R": p.randomness_len,
                "rate": st.rate,
                "rho": st.rho,
            });
            if let Some(inst) = &inst {
                v["instance"] = serde_json::to_value(InstanceJson::new(inst))?;
            }
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Table | Format::Csv => {
            let mut s = format!(
                "graph: {}\nL' = {}, D' = {}, x = {}, y = {}\nL = {}, D = {}, |R| = {}\nrate = {}\nrho = {}\n",
                graph.label(),
                bp.symbols,
                bp.downloads,
                p.x,
                p.y,
                st.message_len,
                st.downloads,
                p.randomness_len,
                st.rate,
                st.rho
            );
            if let Some(inst) = &inst {
                s.push('\n');
                s.push_str(&repetition_table(&[inst]));
            }
            s
        }
    })
}

/// The family selected by `audit --scheme`.
pub fn audit_target(args: &AuditArgs) -> Result<SchemeFamily> {
    let f = PrimeField::new(args.q)?;
    match args.scheme {
        SchemeChoice::P3Capacity => Ok(P3CapacitySpir::family(f)),
        SchemeChoice::P3Example => p3_example(f),
        SchemeChoice::C3 => c3_example(f),
        SchemeChoice::Path => convert_pir_to_spir(&PathPir::family(args.n, f)?, &Graph::path(args.n)?),
        SchemeChoice::PathPir => PathPir::family(args.n, f),
        SchemeChoice::C3Pir => Ok(Cycle3Pir::family(f)),
    }
}

pub fn cmd_audit(args: &AuditArgs) -> Result<AuditReport> {
    if args.mode == ModeArg::Sample && args.samples == 0 {
        return Err(Error::Parse("sample mode needs --samples > 0".into()));
    }
    let opts = AuditOptions {
        mode: match args.mode {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::Sample => Mode::Sample,
        },
        limit: args.limit,
        samples: args.samples,
        seed: args.seed,
    };
    audit_family(&audit_target(args)?, &opts)
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<String> {
    let kind = GraphKind::from(args.kind);
    let rows: Vec<BoundSet> = (args.n.0..=args.n.1).map(|n| bound_set(kind, n)).collect::<Result<_>>()?;
    Ok(match args.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv | Format::Table => {
            let mut s = String::from("kind,N,graph_replicated,lower,upper,pir\n");
            for b in rows {
                s.push_str(&format!("{},{},{},{},{},{}\n", b.kind, b.n, b.graph_replicated, b.lower, b.upper, b.pir));
            }
            s
        }
    })
}

/// Output text and exit code for a parsed command line.
pub fn execute(cli: &Cli) -> Result<(String, i32)> {
    match &cli.command {
        Command::Tables(a) => Ok((cmd_tables(a.which)?, 0)),
        Command::Convert(a) => Ok((cmd_convert(a)?, 0)),
        Command::Bounds(a) => Ok((cmd_bounds(a)?, 0)),
        Command::Audit(a) => {
            let report = cmd_audit(a)?;
            let code = if report.status() == CheckStatus::Fail { 1 } else { 0 };
            Ok((serde_json::to_string_pretty(&report)? + "\n", code))
        }
    }
}

/// Parse, run and write output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (text, code) = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("spir").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn convert_examples() {
        let Command::Convert(a) = parse(&["convert", "--graph", "path", "--n", "3"]).command else { panic!() };
        let out = cmd_convert(&a).unwrap();
        assert!(out.contains("rate = 4/9\nrho = 5/4\n"), "{out}");
        let Command::Convert(a) = parse(&["convert", "--graph", "cycle", "--n", "3", "--format", "json"]).command else {
            panic!()
        };
        let v: serde_json::Value = serde_json::from_str(&cmd_convert(&a).unwrap()).unwrap();
        assert_eq!((v["rate"].as_str(), v["rho"].as_str()), (Some("4/11"), Some("7/4")));
        let Command::Convert(a) = parse(&["convert", "--graph", "cycle", "--n", "4"]).command else { panic!() };
        let err = cmd_convert(&a).unwrap_err();
        assert_eq!(err.to_string(), "no base PIR family for cycle N=4");
    }

    #[test]
    fn bounds_rows() {
        let Command::Bounds(a) = parse(&["bounds", "--kind", "path", "--n", "3..4"]).command else { panic!() };
        assert_eq!(
            cmd_bounds(&a).unwrap(),
            "kind,N,graph_replicated,lower,upper,pir\npath,3,1/3,1/2,1/2,2/3\npath,4,1/4,3/8,3/7,1/2\n"
        );
        let Command::Bounds(a) = parse(&["bounds", "--kind", "cycle", "--n", "3"]).command else { panic!() };
        assert_eq!(cmd_bounds(&a).unwrap().lines().nth(1), Some("cycle,3,1/3,4/11,4/9,1/2"));
        let Command::Bounds(a) = parse(&["bounds", "--kind", "path", "--n", "2"]).command else { panic!() };
        assert!(cmd_bounds(&a).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["spir", "bounds", "--kind", "path", "--n", "2"]), 2);
        assert_eq!(run(["spir", "frobnicate"]), 2);
        assert_eq!(run(["spir", "audit", "--scheme", "c3", "--q", "4"]), 2);
    }
}
