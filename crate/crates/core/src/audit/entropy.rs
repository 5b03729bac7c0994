//! Entropy of linear functions of uniform, independent source symbols.
//!
//! For `X = M_x s` and `Y = M_y s` with `s` uniform over `F_q^n`,
//! `H(X | Y) = rank([M_x; M_y]) - rank(M_y)` in q-ary units.

use serde::{Deserialize, Serialize};

use crate::algebra::FieldMatrix;
use crate::schemes::{FormRef, SchemeInstance, SourceBlock};

/// A random variable built from an instance: downloaded symbols or source blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variable {
    Forms(Vec<FormRef>),
    /// Everything server `n` returns.
    Server(usize),
    /// Everything every server returns.
    AllAnswers,
    Block(SourceBlock),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntropyQuery {
    pub target: Vec<Variable>,
    pub given: Vec<Variable>,
}

impl EntropyQuery {
    pub fn of(target: impl IntoIterator<Item = Variable>) -> Self {
        Self { target: target.into_iter().collect(), given: Vec::new() }
    }

    pub fn given(mut self, given: impl IntoIterator<Item = Variable>) -> Self {
        self.given.extend(given);
        self
    }
}

/// Coefficient rows of the variables, in order.
pub fn variable_rows(inst: &SchemeInstance, vars: &[Variable]) -> Vec<Vec<u64>> {
    let layout = inst.layout();
    let mut rows = Vec::new();
    for v in vars {
        match v {
            Variable::Forms(refs) => rows.extend(refs.iter().map(|&r| layout.row(inst.form(r)))),
            Variable::Server(n) => rows.extend(inst.server_refs(*n).into_iter().map(|r| layout.row(inst.form(r)))),
            Variable::AllAnswers => rows.extend(inst.form_refs().into_iter().map(|r| layout.row(inst.form(r)))),
            Variable::Block(b) => rows.extend(layout.block_range(*b).map(|c| {
                let mut row = vec![0; layout.columns()];
                row[c] = 1;
                row
            })),
        }
    }
    rows
}

fn rank_of(inst: &SchemeInstance, rows: &[Vec<u64>]) -> usize {
    FieldMatrix::from_rows(inst.field, inst.layout().columns(), rows)
        .expect("rows match layout")
        .rank()
}

/// `H(target | given)` by rank differences.
pub fn query_entropy(inst: &SchemeInstance, q: &EntropyQuery) -> usize {
    let given = variable_rows(inst, &q.given);
    let mut all = variable_rows(inst, &q.target);
    all.extend(given.iter().cloned());
    rank_of(inst, &all) - rank_of(inst, &given)
}

/// Rank of the selected forms with the conditioning blocks' columns removed,
/// i.e. `H(A_S | conditioning)`.
pub fn linear_entropy(inst: &SchemeInstance, forms: &[FormRef], conditioning: &[SourceBlock]) -> usize {
    let layout = inst.layout();
    let masked = layout.mask(conditioning);
    let keep: Vec<bool> = masked.iter().map(|m| !m).collect();
    inst.matrix_of(forms).select_columns(&keep).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PrimeField;
    use crate::schemes::P3CapacitySpir;

    #[test]
    fn p3_capacity_examples() {
        let fam = P3CapacitySpir::family(PrimeField::binary());
        let inst = fam.identity_instance(1).unwrap();
        let all = inst.form_refs();
        assert_eq!(linear_entropy(&inst, &all, &[]), 4);
        let every = [SourceBlock::Message(1), SourceBlock::Message(2), SourceBlock::Randomness];
        assert_eq!(linear_entropy(&inst, &all, &every), 0);
        assert_eq!(linear_entropy(&inst, &[(1, 0)], &[SourceBlock::Message(1)]), 1);
        // H(A | W_1) = 2.
        let q = EntropyQuery::of([Variable::AllAnswers]).given([Variable::Block(SourceBlock::Message(1))]);
        assert_eq!(query_entropy(&inst, &q), 2);
        assert_eq!(linear_entropy(&inst, &all, &[SourceBlock::Message(1)]), 2);
    }
}
