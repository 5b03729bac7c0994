//! PIR scheme on the 3-cycle with six symbols per message and twelve downloads.
//!
//! For `theta = 1` each server returns two singletons and two 2-sums:
//!
//! | server 1 | server 2 | server 3 |
//! |---|---|---|
//! | a1, c1, a2+c2, a3+c3 | a4, b1, a5+b2, a6+b3 | b2, c2, b1+c3, b3+c1 |
//!
//! The other message indices are the images under the rotation
//! `server n -> n+1`, `W_m -> W_{m+1}` (indices mod 3), which is an
//! automorphism of the cycle. Each server's forms are then ordered
//! singletons first, by message id.

use crate::algebra::PrimeField;
use crate::error::{Error, Result};
use crate::graphdb::Graph;
use crate::schemes::{
    dense_plan, Answer, BaseParams, FormRef, LinearForm, Row, Scheme, SchemeFamily, SchemeInstance, SymbolRef,
    UserRealization,
};

const SYMBOLS: usize = 6;

#[derive(Debug, Clone)]
pub struct Cycle3Pir {
    graph: Graph,
}

impl Cycle3Pir {
    pub fn new() -> Self {
        Self { graph: Graph::cycle(3).expect("3-cycle") }
    }

    pub fn family(field: PrimeField) -> SchemeFamily {
        SchemeFamily::new(Self::new(), field)
    }
}

impl Default for Cycle3Pir {
    fn default() -> Self {
        Self::new()
    }
}

fn w(m: usize, i: usize) -> SymbolRef {
    SymbolRef::msg(m, i)
}

/// Forms and decode plan for `theta = 1`.
type Pattern = (Vec<Vec<LinearForm>>, Vec<Vec<(FormRef, i64)>>);

fn theta_one() -> Pattern {
    let (a, b, c) = (1, 2, 3);
    let forms = vec![
        vec![
            LinearForm::single(w(a, 1)),
            LinearForm::single(w(c, 1)),
            LinearForm::sum([w(a, 2), w(c, 2)]),
            LinearForm::sum([w(a, 3), w(c, 3)]),
        ],
        vec![
            LinearForm::single(w(a, 4)),
            LinearForm::single(w(b, 1)),
            LinearForm::sum([w(a, 5), w(b, 2)]),
            LinearForm::sum([w(a, 6), w(b, 3)]),
        ],
        vec![
            LinearForm::single(w(b, 2)),
            LinearForm::single(w(c, 2)),
            LinearForm::sum([w(b, 1), w(c, 3)]),
            LinearForm::sum([w(b, 3), w(c, 1)]),
        ],
    ];
    let plan = vec![
        vec![((1, 0), 1)],
        vec![((1, 2), 1), ((3, 1), -1)],
        vec![((1, 3), 1), ((3, 2), -1), ((2, 1), 1)],
        vec![((2, 0), 1)],
        vec![((2, 2), 1), ((3, 0), -1)],
        vec![((2, 3), 1), ((3, 3), -1), ((1, 1), 1)],
    ];
    (forms, plan)
}

fn rotate(x: usize, t: usize) -> usize {
    (x - 1 + t) % 3 + 1
}

impl Scheme for Cycle3Pir {
    fn name(&self) -> String {
        "c3-pir".into()
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn message_len(&self) -> usize {
        SYMBOLS
    }

    fn randomness_len(&self) -> usize {
        0
    }

    fn base_params(&self) -> BaseParams {
        BaseParams { symbols: SYMBOLS, downloads: 12 }
    }

    fn choice_radices(&self, _theta: usize) -> Vec<usize> {
        Vec::new()
    }

    fn build(&self, field: PrimeField, theta: usize, choices: &[usize]) -> Result<SchemeInstance> {
        if theta == 0 || theta > 3 {
            return Err(Error::ThetaOutOfRange { theta, k: 3 });
        }
        if !choices.is_empty() {
            return Err(Error::InvalidRealization("3-cycle PIR has no internal choices".into()));
        }
        let t = theta - 1;
        let (base_forms, base_plan) = theta_one();

        let mut servers: Vec<Vec<LinearForm>> = vec![Vec::new(); 3];
        for (s, forms) in base_forms.into_iter().enumerate() {
            servers[rotate(s + 1, t) - 1] = forms
                .into_iter()
                .map(|f| {
                    let mut terms: Vec<SymbolRef> = f
                        .terms()
                        .iter()
                        .map(|&(sym, _)| match sym {
                            SymbolRef::Message { message, index } => w(rotate(message, t), index),
                            other => other,
                        })
                        .collect();
                    terms.sort();
                    LinearForm::sum(terms)
                })
                .collect();
        }

        // Singletons first, then by message set; stable so ties keep their order.
        let mut position = vec![Vec::new(); 3];
        for (s, forms) in servers.iter_mut().enumerate() {
            let mut order: Vec<usize> = (0..forms.len()).collect();
            order.sort_by_key(|&i| (forms[i].len(), forms[i].messages()));
            let mut new_pos = vec![0; forms.len()];
            for (new, &old) in order.iter().enumerate() {
                new_pos[old] = new;
            }
            *forms = order.iter().map(|&i| forms[i].clone()).collect();
            position[s] = new_pos;
        }

        let answers: Vec<Vec<Answer>> = servers
            .into_iter()
            .map(|fs| fs.into_iter().map(|f| Answer::new(f, Row::Repetition(1))).collect())
            .collect();
        let plan = base_plan
            .iter()
            .map(|entries| {
                let moved: Vec<(FormRef, i64)> = entries
                    .iter()
                    .map(|&((s, i), c)| {
                        let ns = rotate(s, t);
                        ((ns, position[ns - 1][i]), c)
                    })
                    .collect();
                dense_plan(field, &answers, &moved)
            })
            .collect();

        Ok(SchemeInstance {
            graph: self.graph.clone(),
            field,
            theta,
            realization: UserRealization::identity(3, SYMBOLS, 0, Vec::new()),
            message_len: SYMBOLS,
            randomness_len: 0,
            answers,
            decode_plan: Some(plan),
        })
    }
}

/// 3-cycle PIR instance for one realization.
pub fn build_cycle3_pir(theta: usize, real: &UserRealization, field: PrimeField) -> Result<SchemeInstance> {
    Cycle3Pir::family(field).instance(theta, real)
}
