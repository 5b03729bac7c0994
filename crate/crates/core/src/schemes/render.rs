//! Text tables and JSON for scheme instances.
//!
//! Messages are written as letters (`a` for `W_1`, `b` for `W_2`, ...) and
//! common-randomness symbols as `s`. Table layout: one column per database,
//! an unlabeled row of uncoded randomness downloads, then one row per
//! repetition.

use serde::Serialize;

use crate::graphdb::Graph;
use crate::schemes::{LinearForm, Row, SchemeInstance, SymbolRef, UserRealization};

pub fn symbol_string(sym: SymbolRef, messages: usize) -> String {
    match sym {
        SymbolRef::Message { message, index } if messages <= 26 && message <= 26 => {
            format!("{}{}", (b'a' + (message - 1) as u8) as char, index)
        }
        SymbolRef::Message { message, index } => format!("w{message}_{index}"),
        SymbolRef::Randomness { index } => format!("s{index}"),
    }
}

/// Terms in insertion order, e.g. `a2+b2+s2+s3`.
pub fn form_string(form: &LinearForm, messages: usize) -> String {
    if form.is_empty() {
        return "0".into();
    }
    form.terms()
        .iter()
        .map(|&(s, c)| {
            let sym = symbol_string(s, messages);
            if c == 1 {
                sym
            } else {
                format!("{c}{sym}")
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

fn table_row(cells: &[String]) -> String {
    format!("| {} |", cells.join(" | "))
}

fn header(first: &str, servers: usize) -> Vec<String> {
    let mut cells = vec![first.to_string()];
    cells.extend((1..=servers).map(|n| format!("database {n}")));
    vec![table_row(&cells), format!("|{}", "---|".repeat(servers + 1))]
}

fn cell(inst: &SchemeInstance, server: usize, row: Option<Row>) -> String {
    let k = inst.graph.message_count();
    inst.server_answers(server)
        .iter()
        .filter(|a| row.is_none_or(|r| a.row == r))
        .map(|a| form_string(&a.form, k))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One block per instance: header naming `theta`, the uncoded randomness
/// row, and one row per repetition.
pub fn repetition_table(instances: &[&SchemeInstance]) -> String {
    let mut lines = Vec::new();
    for inst in instances {
        let n = inst.server_count();
        lines.extend(header(&format!("theta={}", inst.theta), n));
        let has_raw = inst.answers.iter().flatten().any(|a| a.row == Row::Raw);
        if has_raw {
            let mut cells = vec![String::new()];
            cells.extend((1..=n).map(|s| cell(inst, s, Some(Row::Raw))));
            lines.push(table_row(&cells));
        }
        let reps = inst
            .answers
            .iter()
            .flatten()
            .filter_map(|a| match a.row {
                Row::Repetition(u) => Some(u),
                Row::Raw => None,
            })
            .max()
            .unwrap_or(0);
        for u in 1..=reps {
            let mut cells = vec![format!("rep. {u}")];
            cells.extend((1..=n).map(|s| cell(inst, s, Some(Row::Repetition(u)))));
            lines.push(table_row(&cells));
        }
    }
    lines.join("\n") + "\n"
}

/// One row per instance with every answer of a server in one cell.
pub fn compact_table(instances: &[&SchemeInstance]) -> String {
    let n = instances.first().map_or(0, |i| i.server_count());
    let mut lines = header("", n);
    for inst in instances {
        let mut cells = vec![format!("theta={}", inst.theta)];
        cells.extend((1..=n).map(|s| cell(inst, s, None)));
        lines.push(table_row(&cells));
    }
    lines.join("\n") + "\n"
}

#[derive(Debug, Clone, Serialize)]
pub struct DecodeStep {
    pub symbol: String,
    pub coefficients: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceJson {
    pub graph: Graph,
    pub q: u64,
    pub theta: usize,
    #[serde(rename = "L")]
    pub message_len: usize,
    #[serde(rename = "R")]
    pub randomness_len: usize,
    pub realization: UserRealization,
    pub servers: Vec<Vec<String>>,
    pub decode_plan: Option<Vec<DecodeStep>>,
}

impl InstanceJson {
    pub fn new(inst: &SchemeInstance) -> Self {
        let k = inst.graph.message_count();
        Self {
            graph: inst.graph.clone(),
            q: inst.field.modulus(),
            theta: inst.theta,
            message_len: inst.message_len,
            randomness_len: inst.randomness_len,
            realization: inst.realization.clone(),
            servers: inst
                .answers
                .iter()
                .map(|a| a.iter().map(|x| form_string(&x.form, k)).collect())
                .collect(),
            decode_plan: inst.decode_plan.as_ref().map(|plan| {
                plan.iter()
                    .enumerate()
                    .map(|(l, c)| DecodeStep {
                        symbol: symbol_string(SymbolRef::msg(inst.theta, l + 1), k),
                        coefficients: c.clone(),
                    })
                    .collect()
            }),
        }
    }
}
