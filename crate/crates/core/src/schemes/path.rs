//! Chain PIR scheme on the path `P_N` with two symbols per message.
//!
//! Server 1 returns `w_1(.)`, server `n` in `2..N-1` returns
//! `w_{n-1}(.) + w_n(.)` and server `N` returns `w_{N-1}(.)`. Every undesired
//! message contributes the same symbol at both of its servers, so the user
//! peels the chain from either end: the desired message's first symbol sits
//! at its lower server and the second at its upper server.

use crate::algebra::PrimeField;
use crate::error::{Error, Result};
use crate::graphdb::Graph;
use crate::schemes::{
    dense_plan, Answer, BaseParams, LinearForm, Row, Scheme, SchemeFamily, SchemeInstance, SymbolRef,
    UserRealization,
};

#[derive(Debug, Clone)]
pub struct PathPir {
    graph: Graph,
}

impl PathPir {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewServers { kind: "path PIR", min: 3, n });
        }
        Ok(Self { graph: Graph::path(n)? })
    }

    pub fn family(n: usize, field: PrimeField) -> Result<SchemeFamily> {
        Ok(SchemeFamily::new(Self::new(n)?, field))
    }
}

impl Scheme for PathPir {
    fn name(&self) -> String {
        format!("path-pir-{}", self.graph.server_count())
    }

    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn message_len(&self) -> usize {
        2
    }

    fn randomness_len(&self) -> usize {
        0
    }

    fn base_params(&self) -> BaseParams {
        BaseParams { symbols: 2, downloads: self.graph.server_count() }
    }

    /// One digit per undesired message (ascending ids): which of the two
    /// symbols is queried at both of its servers.
    fn choice_radices(&self, _theta: usize) -> Vec<usize> {
        vec![2; self.graph.message_count() - 1]
    }

    fn build(&self, field: PrimeField, theta: usize, choices: &[usize]) -> Result<SchemeInstance> {
        let n = self.graph.server_count();
        let k = self.graph.message_count();
        if theta == 0 || theta > k {
            return Err(Error::ThetaOutOfRange { theta, k });
        }
        if choices.len() != k - 1 || choices.iter().any(|&c| c > 1) {
            return Err(Error::InvalidRealization(format!("path choices {choices:?}")));
        }
        let undesired_index = |m: usize| {
            let pos = if m < theta { m - 1 } else { m - 2 };
            choices[pos] + 1
        };
        let index_at = |m: usize, server: usize| {
            if m == theta {
                if server == m {
                    1
                } else {
                    2
                }
            } else {
                undesired_index(m)
            }
        };

        let answers: Vec<Vec<Answer>> = (1..=n)
            .map(|s| {
                let form = LinearForm::sum(
                    self.graph.storage_of(s).into_iter().map(|m| SymbolRef::msg(m, index_at(m, s))),
                );
                vec![Answer::new(form, Row::Repetition(1))]
            })
            .collect();

        // w_theta(1) telescopes over servers 1..=theta, w_theta(2) over theta+1..=N.
        let sign = |d: usize| if d.is_multiple_of(2) { 1 } else { -1 };
        let first: Vec<_> = (1..=theta).map(|s| ((s, 0), sign(theta - s))).collect();
        let second: Vec<_> = (theta + 1..=n).map(|s| ((s, 0), sign(s - theta - 1))).collect();
        let plan = vec![dense_plan(field, &answers, &first), dense_plan(field, &answers, &second)];

        Ok(SchemeInstance {
            graph: self.graph.clone(),
            field,
            theta,
            realization: UserRealization::identity(k, 2, 0, choices.to_vec()),
            message_len: 2,
            randomness_len: 0,
            answers,
            decode_plan: Some(plan),
        })
    }
}

/// Path PIR instance for one realization.
pub fn build_path_pir(n: usize, theta: usize, real: &UserRealization, field: PrimeField) -> Result<SchemeInstance> {
    PathPir::family(n, field)?.instance(theta, real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::render::form_string;

    fn rendered(inst: &SchemeInstance) -> Vec<String> {
        inst.answers.iter().map(|a| form_string(&a[0].form, 26)).collect()
    }

    #[test]
    fn p3_rows_without_randomness() {
        let fam = PathPir::family(3, PrimeField::binary()).unwrap();
        // Undesired index 2, i.e. digit 1.
        let i1 = fam.build(1, &[1]).unwrap();
        assert_eq!(rendered(&i1), ["a1", "a2+b2", "b2"]);
        let i2 = fam.build(2, &[0]).unwrap();
        assert_eq!(rendered(&i2), ["a1", "a1+b1", "b2"]);
    }

    #[test]
    fn p4_theta2_decodes_by_elimination() {
        let fam = PathPir::family(4, PrimeField::binary()).unwrap();
        let inst = fam.identity_instance(2).unwrap();
        assert_eq!(rendered(&inst), ["a1", "a1+b1", "b2+c1", "c1"]);
        let m = inst.matrix();
        let layout = inst.layout();
        for l in 1..=2 {
            let target = layout.unit(SymbolRef::msg(2, l));
            let x = m.solve_left(&target).unwrap().expect("decodable");
            assert_eq!(m.left_mul(&x).unwrap(), target);
            let plan = &inst.decode_plan.as_ref().unwrap()[l - 1];
            assert_eq!(m.left_mul(plan).unwrap(), target);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(PathPir::new(2).is_err());
        let fam = PathPir::family(3, PrimeField::binary()).unwrap();
        assert!(matches!(fam.build(3, &[0]), Err(Error::ThetaOutOfRange { theta: 3, k: 2 })));
        assert!(fam.build(1, &[2]).is_err());
    }
}
