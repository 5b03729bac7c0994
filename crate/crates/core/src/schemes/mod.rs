//! Retrieval schemes as exact linear objects.
//!
//! Every downloaded symbol is a [`LinearForm`] over message symbols and
//! common-randomness symbols. A [`SchemeInstance`] fixes the desired message
//! and one user realization; a [`SchemeFamily`] generates instances for every
//! `(theta, realization)` pair.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{FieldMatrix, PrimeField};
use crate::error::{Error, Result};
use crate::graphdb::Graph;

pub mod cycle3;
pub mod p3;
pub mod path;
pub mod realization;
pub mod render;
pub mod srp;

pub use cycle3::{build_cycle3_pir, Cycle3Pir};
pub use p3::{build_p3_capacity_spir, P3CapacitySpir};
pub use path::{build_path_pir, PathPir};
pub use realization::{enumerate_space, RealizationSpace, Realizations, UserRealization};
pub use srp::{check_srp, SrpReport};

/// One source symbol: `w_k(index)` or `s_index`. All indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolRef {
    Message { message: usize, index: usize },
    Randomness { index: usize },
}

impl SymbolRef {
    pub fn msg(message: usize, index: usize) -> Self {
        SymbolRef::Message { message, index }
    }

    pub fn rand(index: usize) -> Self {
        SymbolRef::Randomness { index }
    }

    pub fn message(&self) -> Option<usize> {
        match *self {
            SymbolRef::Message { message, .. } => Some(message),
            SymbolRef::Randomness { .. } => None,
        }
    }

    pub fn is_randomness(&self) -> bool {
        matches!(self, SymbolRef::Randomness { .. })
    }
}

/// A sum of source symbols with nonzero field coefficients.
///
/// Terms keep insertion order for display; equality and hashing ignore order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LinearForm {
    terms: Vec<(SymbolRef, u64)>,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(sym: SymbolRef) -> Self {
        Self { terms: vec![(sym, 1)] }
    }

    /// Sum of symbols, each with coefficient one.
    pub fn sum<I: IntoIterator<Item = SymbolRef>>(syms: I) -> Self {
        let mut f = Self::new();
        for s in syms {
            f.add_term(s, 1, None);
        }
        f
    }

    /// Add `coeff * sym`, merging with an existing term. Coefficients are
    /// reduced with `field` when one is given; a term that cancels is dropped.
    pub fn add_term(&mut self, sym: SymbolRef, coeff: u64, field: Option<PrimeField>) {
        let reduce = |v: u64| field.map_or(v, |f| v % f.modulus());
        if let Some(pos) = self.terms.iter().position(|(s, _)| *s == sym) {
            let merged = match field {
                Some(f) => f.add(self.terms[pos].1, reduce(coeff)),
                None => self.terms[pos].1 + coeff,
            };
            if merged == 0 {
                self.terms.remove(pos);
            } else {
                self.terms[pos].1 = merged;
            }
        } else if reduce(coeff) != 0 {
            self.terms.push((sym, reduce(coeff)));
        }
    }

    pub fn terms(&self) -> &[(SymbolRef, u64)] {
        &self.terms
    }

    pub fn sorted_terms(&self) -> Vec<(SymbolRef, u64)> {
        let mut t = self.terms.clone();
        t.sort();
        t
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, sym: SymbolRef) -> u64 {
        self.terms.iter().find(|(s, _)| *s == sym).map_or(0, |&(_, c)| c)
    }

    pub fn message_terms(&self) -> impl Iterator<Item = &(SymbolRef, u64)> {
        self.terms.iter().filter(|(s, _)| !s.is_randomness())
    }

    pub fn randomness_terms(&self) -> impl Iterator<Item = &(SymbolRef, u64)> {
        self.terms.iter().filter(|(s, _)| s.is_randomness())
    }

    /// A form consisting of a single common-randomness symbol.
    pub fn is_raw_randomness(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_randomness()
    }

    /// Messages referenced, ascending and deduplicated.
    pub fn messages(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.terms.iter().filter_map(|(s, _)| s.message()).collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    pub fn map_symbols(&self, mut f: impl FnMut(SymbolRef) -> SymbolRef) -> Self {
        Self { terms: self.terms.iter().map(|&(s, c)| (f(s), c)).collect() }
    }

    pub fn without_randomness(&self) -> Self {
        Self { terms: self.message_terms().copied().collect() }
    }

    pub fn without_symbol(&self, sym: SymbolRef) -> Self {
        Self { terms: self.terms.iter().copied().filter(|(s, _)| *s != sym).collect() }
    }
}

impl PartialEq for LinearForm {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len() && self.sorted_terms() == other.sorted_terms()
    }
}

impl Eq for LinearForm {}

impl Hash for LinearForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.sorted_terms().hash(state);
    }
}

/// Where an answer symbol sits in the answer table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Row {
    /// Uncoded common-randomness download.
    Raw,
    /// Part of repetition `u` of the underlying scheme.
    Repetition(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Answer {
    pub form: LinearForm,
    pub row: Row,
}

impl Answer {
    pub fn new(form: LinearForm, row: Row) -> Self {
        Self { form, row }
    }
}

/// Declared per-repetition parameters `(L', D')` of the scheme a family is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseParams {
    pub symbols: usize,
    pub downloads: usize,
}

/// One `(theta, realization)` pair of a scheme, fully expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeInstance {
    pub graph: Graph,
    pub field: PrimeField,
    pub theta: usize,
    pub realization: UserRealization,
    pub message_len: usize,
    pub randomness_len: usize,
    /// `answers[n-1]` lists what server `n` returns, in download order.
    pub answers: Vec<Vec<Answer>>,
    /// `decode_plan[l-1]` holds coefficients over the flattened answers that
    /// recover `w_theta(l)`.
    pub decode_plan: Option<Vec<Vec<u64>>>,
}

/// Column blocks of the global source vector: each message, then the common randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceLayout {
    pub messages: usize,
    pub message_len: usize,
    pub randomness_len: usize,
}

/// A block of source columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceBlock {
    Message(usize),
    Randomness,
}

impl SourceLayout {
    pub fn columns(&self) -> usize {
        self.messages * self.message_len + self.randomness_len
    }

    pub fn column(&self, sym: SymbolRef) -> usize {
        match sym {
            SymbolRef::Message { message, index } => {
                debug_assert!(message >= 1 && message <= self.messages);
                debug_assert!(index >= 1 && index <= self.message_len);
                (message - 1) * self.message_len + index - 1
            }
            SymbolRef::Randomness { index } => {
                debug_assert!(index >= 1 && index <= self.randomness_len);
                self.messages * self.message_len + index - 1
            }
        }
    }

    pub fn symbol(&self, column: usize) -> SymbolRef {
        let ml = self.messages * self.message_len;
        if column < ml {
            SymbolRef::msg(column / self.message_len + 1, column % self.message_len + 1)
        } else {
            SymbolRef::rand(column - ml + 1)
        }
    }

    pub fn block_range(&self, block: SourceBlock) -> std::ops::Range<usize> {
        match block {
            SourceBlock::Message(k) => (k - 1) * self.message_len..k * self.message_len,
            SourceBlock::Randomness => {
                let start = self.messages * self.message_len;
                start..start + self.randomness_len
            }
        }
    }

    pub fn block_of(&self, sym: SymbolRef) -> SourceBlock {
        match sym {
            SymbolRef::Message { message, .. } => SourceBlock::Message(message),
            SymbolRef::Randomness { .. } => SourceBlock::Randomness,
        }
    }

    /// Column mask with `true` on every column of the given blocks.
    pub fn mask(&self, blocks: &[SourceBlock]) -> Vec<bool> {
        let mut m = vec![false; self.columns()];
        for &b in blocks {
            for c in self.block_range(b) {
                m[c] = true;
            }
        }
        m
    }

    pub fn row(&self, form: &LinearForm) -> Vec<u64> {
        let mut row = vec![0u64; self.columns()];
        for &(s, c) in form.terms() {
            row[self.column(s)] = c;
        }
        row
    }

    pub fn unit(&self, sym: SymbolRef) -> Vec<u64> {
        let mut row = vec![0u64; self.columns()];
        row[self.column(sym)] = 1;
        row
    }
}

/// Position of a downloaded symbol: `(server, index within that server's answers)`.
pub type FormRef = (usize, usize);

impl SchemeInstance {
    pub fn server_count(&self) -> usize {
        self.graph.server_count()
    }

    /// Total number of downloaded symbols `D`.
    pub fn download_count(&self) -> usize {
        self.answers.iter().map(Vec::len).sum()
    }

    pub fn layout(&self) -> SourceLayout {
        SourceLayout {
            messages: self.graph.message_count(),
            message_len: self.message_len,
            randomness_len: self.randomness_len,
        }
    }

    pub fn server_answers(&self, server: usize) -> &[Answer] {
        &self.answers[server - 1]
    }

    /// Every downloaded symbol in flattened order.
    pub fn form_refs(&self) -> Vec<FormRef> {
        self.answers
            .iter()
            .enumerate()
            .flat_map(|(s, a)| (0..a.len()).map(move |i| (s + 1, i)))
            .collect()
    }

    pub fn server_refs(&self, server: usize) -> Vec<FormRef> {
        (0..self.answers[server - 1].len()).map(|i| (server, i)).collect()
    }

    pub fn flat_index(&self, r: FormRef) -> usize {
        self.answers[..r.0 - 1].iter().map(Vec::len).sum::<usize>() + r.1
    }

    pub fn form(&self, r: FormRef) -> &LinearForm {
        &self.answers[r.0 - 1][r.1].form
    }

    /// Coefficient matrix of the selected forms over all source columns.
    pub fn matrix_of(&self, refs: &[FormRef]) -> FieldMatrix {
        let layout = self.layout();
        let rows: Vec<Vec<u64>> = refs.iter().map(|&r| layout.row(self.form(r))).collect();
        FieldMatrix::from_rows(self.field, layout.columns(), &rows).expect("consistent layout")
    }

    /// Coefficient matrix of every downloaded symbol.
    pub fn matrix(&self) -> FieldMatrix {
        self.matrix_of(&self.form_refs())
    }

    /// Every message term at server `n` must reference a message stored at `n`.
    pub fn check_locality(&self) -> Result<()> {
        for (s, answers) in self.answers.iter().enumerate() {
            let server = s + 1;
            for a in answers {
                for m in a.form.messages() {
                    if !self.graph.stores(server, m) {
                        return Err(Error::Scheme(format!(
                            "server {server} answers with message {m}, which it does not store"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Check that every symbol index is within `L` and `|R|`.
    pub fn check_bounds(&self) -> Result<()> {
        let k = self.graph.message_count();
        for answers in &self.answers {
            for a in answers {
                for &(s, _) in a.form.terms() {
                    let ok = match s {
                        SymbolRef::Message { message, index } => {
                            (1..=k).contains(&message) && (1..=self.message_len).contains(&index)
                        }
                        SymbolRef::Randomness { index } => (1..=self.randomness_len).contains(&index),
                    };
                    if !ok {
                        return Err(Error::Scheme(format!("symbol {s:?} out of bounds")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Relabel symbol indices by the realization's permutations. The instance
    /// must have been built with identity permutations.
    pub fn permuted(&self, real: &UserRealization) -> SchemeInstance {
        let map = |s: SymbolRef| match s {
            SymbolRef::Message { message, index } => SymbolRef::msg(message, real.map_message(message, index)),
            SymbolRef::Randomness { index } => SymbolRef::rand(real.map_randomness(index)),
        };
        let answers = self
            .answers
            .iter()
            .map(|a| a.iter().map(|ans| Answer::new(ans.form.map_symbols(map), ans.row)).collect())
            .collect();
        let decode_plan = self.decode_plan.as_ref().map(|plan| {
            let mut out = vec![Vec::new(); plan.len()];
            for (l, coeffs) in plan.iter().enumerate() {
                out[real.map_message(self.theta, l + 1) - 1] = coeffs.clone();
            }
            out
        });
        SchemeInstance {
            graph: self.graph.clone(),
            field: self.field,
            theta: self.theta,
            realization: real.clone(),
            message_len: self.message_len,
            randomness_len: self.randomness_len,
            answers,
            decode_plan,
        }
    }

    /// Copy with one downloaded symbol removed (its decode plan is dropped).
    pub fn without_answer(&self, r: FormRef) -> SchemeInstance {
        let mut out = self.clone();
        out.answers[r.0 - 1].remove(r.1);
        out.decode_plan = None;
        out
    }

    /// Copy with one symbol deleted from one downloaded form.
    pub fn with_symbol_removed(&self, r: FormRef, sym: SymbolRef) -> SchemeInstance {
        let mut out = self.clone();
        let a = &mut out.answers[r.0 - 1][r.1];
        a.form = a.form.without_symbol(sym);
        out.decode_plan = None;
        out
    }
}

/// A scheme generator: builds the instance for `theta` and internal choices
/// under identity permutations. [`SchemeFamily`] adds the permutations.
pub trait Scheme: Send + Sync {
    fn name(&self) -> String;
    fn graph(&self) -> &Graph;
    /// `L`.
    fn message_len(&self) -> usize;
    /// `|R|`.
    fn randomness_len(&self) -> usize;
    fn base_params(&self) -> BaseParams;
    fn choice_radices(&self, theta: usize) -> Vec<usize>;
    fn build(&self, field: PrimeField, theta: usize, choices: &[usize]) -> Result<SchemeInstance>;
}

/// A scheme together with the field it is evaluated over.
#[derive(Clone)]
pub struct SchemeFamily {
    scheme: Arc<dyn Scheme>,
    field: PrimeField,
}

impl fmt::Debug for SchemeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeFamily")
            .field("scheme", &self.scheme.name())
            .field("field", &self.field)
            .finish()
    }
}

impl SchemeFamily {
    pub fn new<S: Scheme + 'static>(scheme: S, field: PrimeField) -> Self {
        Self { scheme: Arc::new(scheme), field }
    }

    pub fn from_arc(scheme: Arc<dyn Scheme>, field: PrimeField) -> Self {
        Self { scheme, field }
    }

    pub fn scheme(&self) -> &Arc<dyn Scheme> {
        &self.scheme
    }

    pub fn name(&self) -> String {
        self.scheme.name()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn graph(&self) -> &Graph {
        self.scheme.graph()
    }

    pub fn message_len(&self) -> usize {
        self.scheme.message_len()
    }

    pub fn randomness_len(&self) -> usize {
        self.scheme.randomness_len()
    }

    pub fn base_params(&self) -> BaseParams {
        self.scheme.base_params()
    }

    pub fn thetas(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.graph().message_count()
    }

    pub fn check_theta(&self, theta: usize) -> Result<()> {
        let k = self.graph().message_count();
        if theta == 0 || theta > k {
            return Err(Error::ThetaOutOfRange { theta, k });
        }
        Ok(())
    }

    pub fn realization_space(&self, theta: usize) -> RealizationSpace {
        RealizationSpace {
            messages: self.graph().message_count(),
            message_len: self.message_len(),
            randomness_len: self.randomness_len(),
            choice_radices: self.scheme.choice_radices(theta),
        }
    }

    /// Instance under identity permutations and the given internal choices.
    pub fn build(&self, theta: usize, choices: &[usize]) -> Result<SchemeInstance> {
        self.check_theta(theta)?;
        self.scheme.build(self.field, theta, choices)
    }

    pub fn instance(&self, theta: usize, real: &UserRealization) -> Result<SchemeInstance> {
        self.realization_space(theta).validate(real)?;
        Ok(self.build(theta, &real.choices)?.permuted(real))
    }

    pub fn instance_by_id(&self, theta: usize, id: u128) -> Result<SchemeInstance> {
        let real = self.realization_space(theta).get(id)?;
        self.instance(theta, &real)
    }

    /// Identity permutations and all-zero choices.
    pub fn identity_instance(&self, theta: usize) -> Result<SchemeInstance> {
        let zeros = vec![0; self.scheme.choice_radices(theta).len()];
        self.build(theta, &zeros)
    }

    /// The realization sequence used by exhaustive audits, or a seeded
    /// sample when the space exceeds `limit`.
    pub fn enumerate_realizations(&self, theta: usize, limit: u128, seed: u64) -> Realizations {
        enumerate_space(self.realization_space(theta), limit, seed)
    }
}

/// Flatten a plan given as `(form, coefficient)` pairs into a dense vector.
pub(crate) fn dense_plan(
    field: PrimeField,
    answers: &[Vec<Answer>],
    entries: &[(FormRef, i64)],
) -> Vec<u64> {
    let offsets: Vec<usize> = answers
        .iter()
        .scan(0, |acc, a| {
            let start = *acc;
            *acc += a.len();
            Some(start)
        })
        .collect();
    let total: usize = answers.iter().map(Vec::len).sum();
    let mut v = vec![0u64; total];
    for &((server, idx), c) in entries {
        let pos = offsets[server - 1] + idx;
        v[pos] = field.add(v[pos], field.from_i64(c));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_form_canonical() {
        let mut f = LinearForm::sum([SymbolRef::msg(2, 1), SymbolRef::msg(1, 3)]);
        let g = LinearForm::sum([SymbolRef::msg(1, 3), SymbolRef::msg(2, 1)]);
        assert_eq!(f, g);
        f.add_term(SymbolRef::msg(2, 1), 1, Some(PrimeField::binary()));
        assert_eq!(f, LinearForm::single(SymbolRef::msg(1, 3)));
        f.add_term(SymbolRef::rand(4), 3, Some(PrimeField::new(3).unwrap()));
        assert_eq!(f.len(), 1, "zero coefficients are never stored");
    }

    #[test]
    fn layout_round_trip() {
        let l = SourceLayout { messages: 3, message_len: 4, randomness_len: 5 };
        assert_eq!(l.columns(), 17);
        for c in 0..l.columns() {
            assert_eq!(l.column(l.symbol(c)), c);
        }
        assert_eq!(l.block_range(SourceBlock::Message(2)), 4..8);
        assert_eq!(l.block_range(SourceBlock::Randomness), 12..17);
    }
}
