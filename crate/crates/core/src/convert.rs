//! Conversion of a PIR scheme with the symmetric retrieval property into an
//! SPIR scheme whose common randomness is replicated at every server.
//!
//! The converted scheme runs `x` repetitions of the PIR scheme on fresh
//! desired symbols and adds one randomness symbol to every message symbol in
//! every answer:
//!
//! * each queried undesired symbol gets its own mask, shared by the two
//!   servers that store it;
//! * every server `n` owns a pool of `y` randomness symbols which the user
//!   downloads uncoded;
//! * if the desired message lives on servers `i` and `j`, the first `y`
//!   desired symbols queried at `i` are masked with `j`'s pool and vice
//!   versa, and the remaining ones at `i` and `j` share masks drawn from the
//!   pools of the other servers (the `u`-th leftover at `i` pairs with the
//!   `u`-th leftover at `j`).
//!
//! `x` and `y` are the least positive integers with `x * L'/2 = (N-1) * y`.
//! Before the user's permutation, randomness indices are numbered by first
//! appearance in the repetitions (servers ascending, forms in order, masks in
//! the order of the symbols they cover).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_integer::Integer;
use serde::Serialize;

use crate::algebra::{PrimeField, Rational};
use crate::error::{Error, Result};
use crate::graphdb::Graph;
use crate::schemes::{
    check_srp, Answer, BaseParams, LinearForm, Row, Scheme, SchemeFamily, SchemeInstance, SymbolRef, UserRealization,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConversionParams {
    /// `L'`.
    pub base_symbols: usize,
    pub servers: usize,
    pub messages: usize,
    /// `lcm(L'/2, N-1)`.
    pub lcm: usize,
    /// Number of repetitions of the base scheme.
    pub x: usize,
    /// Uncoded randomness symbols downloaded from each server.
    pub y: usize,
    /// `L = x L'`.
    pub message_len: usize,
    /// `|R| = N y + (K-1) L / 2`.
    pub randomness_len: usize,
}

pub fn conversion_params(base_symbols: usize, servers: usize, messages: usize) -> Result<ConversionParams> {
    if base_symbols == 0 || base_symbols % 2 == 1 {
        return Err(Error::OddMessageLength(base_symbols));
    }
    if servers < 2 {
        return Err(Error::TooFewServers { kind: "graph", min: 2, n: servers });
    }
    if messages == 0 {
        return Err(Error::InvalidGraph("no messages".into()));
    }
    let half = base_symbols / 2;
    let lcm = half.lcm(&(servers - 1));
    let x = lcm / half;
    let y = lcm / (servers - 1);
    let message_len = x * base_symbols;
    Ok(ConversionParams {
        base_symbols,
        servers,
        messages,
        lcm,
        x,
        y,
        message_len,
        randomness_len: servers * y + (messages - 1) * message_len / 2,
    })
}

/// Which randomness symbol protects a message symbol, before numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MaskLabel {
    /// Unique mask of one queried undesired symbol.
    Undesired(SymbolRef),
    /// Slot `1..=y` of a server's pool.
    Pool { server: usize, slot: usize },
}

/// Mask assignment of one converted instance, in randomness indices.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MaskAssignment {
    /// Undesired `(message, index)` to its mask.
    pub undesired: BTreeMap<(usize, usize), usize>,
    /// Desired `(server, index)` to its mask.
    pub desired: BTreeMap<(usize, usize), usize>,
    /// Pool of each server, by slot.
    pub pools: BTreeMap<usize, Vec<usize>>,
}

/// The converted scheme. Internal choices are the base scheme's choices for
/// each repetition, concatenated.
pub struct ConvertedScheme {
    base: SchemeFamily,
    params: ConversionParams,
}

impl ConvertedScheme {
    /// Wrap `pir` after checking it is a randomness-free PIR family on
    /// `graph` with the symmetric retrieval property.
    pub fn new(pir: &SchemeFamily, graph: &Graph) -> Result<Self> {
        if pir.graph() != graph {
            return Err(Error::Conversion(format!(
                "base scheme lives on {} but conversion requested on {}",
                pir.graph().label(),
                graph.label()
            )));
        }
        if pir.randomness_len() != 0 {
            return Err(Error::NotPir(pir.randomness_len()));
        }
        let srp = check_srp(pir)?;
        if !srp.pass {
            let w = srp.witness.expect("failing report has a witness");
            return Err(Error::SrpViolation(format!(
                "theta={} server {} yields {} desired symbols, expected {}",
                w.theta, w.server, w.count, srp.expected
            )));
        }
        let params = conversion_params(pir.message_len(), graph.server_count(), graph.message_count())?;
        Ok(Self { base: pir.clone(), params })
    }

    pub fn params(&self) -> ConversionParams {
        self.params
    }

    pub fn base(&self) -> &SchemeFamily {
        &self.base
    }

    fn base_instances(&self, field: PrimeField, theta: usize, choices: &[usize]) -> Result<Vec<SchemeInstance>> {
        let per_rep = self.base.scheme().choice_radices(theta).len();
        if choices.len() != per_rep * self.params.x {
            return Err(Error::InvalidRealization(format!(
                "expected {} choices, got {}",
                per_rep * self.params.x,
                choices.len()
            )));
        }
        (0..self.params.x)
            .map(|u| self.base.scheme().build(field, theta, &choices[u * per_rep..(u + 1) * per_rep]))
            .collect()
    }

    /// Full construction: answers, decode plan and the mask assignment.
    pub fn construct(
        &self,
        field: PrimeField,
        theta: usize,
        choices: &[usize],
    ) -> Result<(SchemeInstance, MaskAssignment)> {
        let p = self.params;
        let graph = self.base.graph();
        let n = graph.server_count();
        let (i, j) = graph.servers_of(theta);
        let base_l = p.base_symbols;
        let bases = self.base_instances(field, theta, choices)?;

        // Repetition forms with message indices shifted into block u.
        let mut reps: Vec<Vec<Vec<LinearForm>>> = Vec::with_capacity(p.x);
        for (u, b) in bases.iter().enumerate() {
            if b.randomness_len != 0 {
                return Err(Error::NotPir(b.randomness_len));
            }
            reps.push(
                b.answers
                    .iter()
                    .map(|srv| {
                        srv.iter()
                            .map(|a| {
                                a.form.map_symbols(|s| match s {
                                    SymbolRef::Message { message, index } => {
                                        SymbolRef::msg(message, u * base_l + index)
                                    }
                                    other => other,
                                })
                            })
                            .collect()
                    })
                    .collect(),
            );
        }

        // Where each message symbol is queried.
        let mut occurrences: BTreeMap<SymbolRef, Vec<usize>> = BTreeMap::new();
        for rep in &reps {
            for (s, forms) in rep.iter().enumerate() {
                for f in forms {
                    for &(sym, _) in f.message_terms() {
                        occurrences.entry(sym).or_default().push(s + 1);
                    }
                }
            }
        }
        let mut labels: HashMap<(usize, SymbolRef), MaskLabel> = HashMap::new();
        for (&sym, servers) in &occurrences {
            let m = sym.message().expect("message term");
            let distinct: BTreeSet<usize> = servers.iter().copied().collect();
            let (mi, mj) = graph.servers_of(m);
            if m == theta {
                if servers.len() != 1 {
                    return Err(Error::Conversion(format!("desired symbol {sym:?} queried {} times", servers.len())));
                }
            } else {
                if distinct != BTreeSet::from([mi, mj]) {
                    return Err(Error::Conversion(format!(
                        "undesired symbol {sym:?} queried at servers {distinct:?}, not at both of {mi} and {mj}"
                    )));
                }
                for &s in &distinct {
                    labels.insert((s, sym), MaskLabel::Undesired(sym));
                }
            }
        }

        // Desired symbols in query order at each storing server.
        let desired_at = |server: usize| -> Vec<SymbolRef> {
            reps.iter()
                .flat_map(|rep| rep[server - 1].iter())
                .flat_map(|f| f.message_terms().map(|&(s, _)| s).collect::<Vec<_>>())
                .filter(|s| s.message() == Some(theta))
                .collect()
        };
        let undesired_count = occurrences.keys().filter(|s| s.message() != Some(theta)).count();
        if undesired_count * 2 != (p.messages - 1) * p.message_len {
            return Err(Error::Conversion(format!(
                "{undesired_count} undesired symbols queried, expected (K-1)L/2 = {}",
                (p.messages - 1) * p.message_len / 2
            )));
        }
        let third: Vec<usize> = (1..=n).filter(|&s| s != i && s != j).collect();
        for (server, partner) in [(i, j), (j, i)] {
            let seq = desired_at(server);
            if seq.len() != (n - 1) * p.y {
                return Err(Error::Conversion(format!(
                    "server {server} carries {} desired symbols, expected (N-1)y = {}",
                    seq.len(),
                    (n - 1) * p.y
                )));
            }
            let pools = (1..=p.y)
                .map(|slot| MaskLabel::Pool { server: partner, slot })
                .chain(third.iter().flat_map(|&t| (1..=p.y).map(move |slot| MaskLabel::Pool { server: t, slot })));
            for (sym, label) in seq.into_iter().zip(pools) {
                labels.insert((server, sym), label);
            }
        }

        // Masked repetition forms; randomness numbered by first appearance.
        let mut index_of: HashMap<MaskLabel, usize> = HashMap::new();
        let mut masked: Vec<Vec<Vec<LinearForm>>> = Vec::with_capacity(p.x);
        for rep in &reps {
            let mut rep_out = Vec::with_capacity(n);
            for (s, forms) in rep.iter().enumerate() {
                let server = s + 1;
                let mut srv_out = Vec::with_capacity(forms.len());
                for f in forms {
                    let mut g = f.clone();
                    for &(sym, c) in f.message_terms() {
                        let label = labels[&(server, sym)];
                        let next = index_of.len() + 1;
                        let r = *index_of.entry(label).or_insert(next);
                        g.add_term(SymbolRef::rand(r), c, Some(field));
                    }
                    srv_out.push(g);
                }
                rep_out.push(srv_out);
            }
            masked.push(rep_out);
        }
        if index_of.len() != p.randomness_len {
            return Err(Error::Conversion(format!(
                "{} randomness symbols used, expected {}",
                index_of.len(),
                p.randomness_len
            )));
        }

        let mut assignment = MaskAssignment::default();
        for (&label, &r) in &index_of {
            match label {
                MaskLabel::Undesired(SymbolRef::Message { message, index }) => {
                    assignment.undesired.insert((message, index), r);
                }
                MaskLabel::Pool { server, slot } => {
                    let pool = assignment.pools.entry(server).or_insert_with(|| vec![0; p.y]);
                    pool[slot - 1] = r;
                }
                MaskLabel::Undesired(SymbolRef::Randomness { .. }) => unreachable!("masks cover message symbols"),
            }
        }
        for (&(server, sym), label) in &labels {
            if let (SymbolRef::Message { message, index }, MaskLabel::Pool { .. }) = (sym, label) {
                if message == theta {
                    assignment.desired.insert((server, index), index_of[label]);
                }
            }
        }

        // Layout: each server's pool first (ascending), then the repetitions.
        let mut answers: Vec<Vec<Answer>> = Vec::with_capacity(n);
        let mut position: HashMap<(usize, usize, usize), usize> = HashMap::new(); // (u, server, t)
        let mut raw_position: HashMap<usize, usize> = HashMap::new(); // randomness index
        let mut flat = 0;
        for server in 1..=n {
            let mut pool = assignment.pools[&server].clone();
            pool.sort_unstable();
            let mut list = Vec::new();
            for r in pool {
                raw_position.insert(r, flat);
                flat += 1;
                list.push(Answer::new(LinearForm::single(SymbolRef::rand(r)), Row::Raw));
            }
            for (u, rep) in masked.iter().enumerate() {
                for (t, f) in rep[server - 1].iter().enumerate() {
                    position.insert((u, server, t), flat);
                    flat += 1;
                    list.push(Answer::new(f.clone(), Row::Repetition(u + 1)));
                }
            }
            answers.push(list);
        }

        // Lift each base decoding combination and cancel the desired symbol's pool mask.
        let mut plan = vec![Vec::new(); p.message_len];
        for (u, b) in bases.iter().enumerate() {
            let base_plan = match &b.decode_plan {
                Some(plan) => plan.clone(),
                None => solve_plan(b)?,
            };
            let base_offsets: Vec<(usize, usize)> = b
                .answers
                .iter()
                .enumerate()
                .flat_map(|(s, a)| (0..a.len()).map(move |t| (s + 1, t)))
                .collect();
            for (l, coeffs) in base_plan.iter().enumerate() {
                let mut v = vec![0u64; flat];
                for (pos, &c) in coeffs.iter().enumerate() {
                    if c != 0 {
                        let (s, t) = base_offsets[pos];
                        v[position[&(u, s, t)]] = c;
                    }
                }
                let index = u * base_l + l + 1;
                let sym = SymbolRef::msg(theta, index);
                let server = occurrences[&sym][0];
                let r = index_of[&labels[&(server, sym)]];
                let raw = raw_position[&r];
                v[raw] = field.sub(v[raw], 1);
                plan[index - 1] = v;
            }
        }

        let inst = SchemeInstance {
            graph: graph.clone(),
            field,
            theta,
            realization: UserRealization::identity(p.messages, p.message_len, p.randomness_len, choices.to_vec()),
            message_len: p.message_len,
            randomness_len: p.randomness_len,
            answers,
            decode_plan: Some(plan),
        };
        Ok((inst, assignment))
    }
}

fn solve_plan(inst: &SchemeInstance) -> Result<Vec<Vec<u64>>> {
    let m = inst.matrix();
    let layout = inst.layout();
    (1..=inst.message_len)
        .map(|l| {
            m.solve_left(&layout.unit(SymbolRef::msg(inst.theta, l)))?
                .ok_or_else(|| Error::Conversion(format!("base scheme cannot decode symbol {l}")))
        })
        .collect()
}

impl Scheme for ConvertedScheme {
    fn name(&self) -> String {
        format!("spir[{}]", self.base.name())
    }

    fn graph(&self) -> &Graph {
        self.base.graph()
    }

    fn message_len(&self) -> usize {
        self.params.message_len
    }

    fn randomness_len(&self) -> usize {
        self.params.randomness_len
    }

    fn base_params(&self) -> BaseParams {
        self.base.base_params()
    }

    fn choice_radices(&self, theta: usize) -> Vec<usize> {
        let per_rep = self.base.scheme().choice_radices(theta);
        (0..self.params.x).flat_map(|_| per_rep.iter().copied()).collect()
    }

    fn build(&self, field: PrimeField, theta: usize, choices: &[usize]) -> Result<SchemeInstance> {
        Ok(self.construct(field, theta, choices)?.0)
    }
}

/// Convert `pir` into an SPIR family on `graph`. The base family must satisfy
/// the symmetric retrieval property and use no common randomness.
pub fn convert_pir_to_spir(pir: &SchemeFamily, graph: &Graph) -> Result<SchemeFamily> {
    Ok(SchemeFamily::new(ConvertedScheme::new(pir, graph)?, pir.field()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeStats {
    #[serde(rename = "L")]
    pub message_len: usize,
    #[serde(rename = "D")]
    pub downloads: usize,
    pub rate: Rational,
    pub rho: Rational,
}

/// Rate `L/D` and randomness ratio `|R|/L`. `D` must not depend on `theta`.
pub fn scheme_stats(family: &SchemeFamily) -> Result<SchemeStats> {
    let mut downloads = None;
    for theta in family.thetas() {
        let d = family.identity_instance(theta)?.download_count();
        match downloads {
            None => downloads = Some(d),
            Some(prev) if prev != d => {
                return Err(Error::DownloadMismatch(format!("theta=1 downloads {prev}, theta={theta} downloads {d}")))
            }
            _ => {}
        }
    }
    let d = downloads.expect("at least one message");
    let l = family.message_len();
    Ok(SchemeStats {
        message_len: l,
        downloads: d,
        rate: Rational::from(l).checked_div(&Rational::from(d))?,
        rho: Rational::from(family.randomness_len()).checked_div(&Rational::from(l))?,
    })
}
