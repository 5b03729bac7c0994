//! Brute-force entropy: enumerate every source vector and count outcomes.
//!
//! Independent of the rank machinery; used to cross-check it.

use std::collections::HashMap;

use serde::Serialize;

use super::entropy::{variable_rows, EntropyQuery};
use crate::algebra::Rational;
use crate::error::{Error, Result};
use crate::schemes::SchemeInstance;

pub const DEFAULT_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEntropy {
    /// Exact when `uniform`, otherwise a close rational approximation.
    pub value: Rational,
    pub approx: f64,
    /// Both the joint and the conditioning distribution are uniform over
    /// supports of size `q^m`.
    pub uniform: bool,
    pub enumerated: u128,
}

enum Counter {
    Packed(HashMap<u128, u64>),
    Wide(HashMap<Vec<u64>, u64>),
}

impl Counter {
    fn new(rows: usize, q: u64) -> Self {
        let bits = 64 - (q - 1).leading_zeros() as usize;
        if rows * bits <= 128 {
            Counter::Packed(HashMap::new())
        } else {
            Counter::Wide(HashMap::new())
        }
    }

    fn record(&mut self, vals: &[u64], q: u64) {
        match self {
            Counter::Packed(m) => {
                let key = vals.iter().rev().fold(0u128, |acc, &v| acc * q as u128 + v as u128);
                *m.entry(key).or_default() += 1;
            }
            Counter::Wide(m) => *m.entry(vals.to_vec()).or_default() += 1,
        }
    }

    fn counts(&self) -> Vec<u64> {
        match self {
            Counter::Packed(m) => m.values().copied().collect(),
            Counter::Wide(m) => m.values().copied().collect(),
        }
    }
}

struct Dist {
    entropy: f64,
    /// `Some(m)` when uniform over `q^m` outcomes.
    uniform_exp: Option<u32>,
}

fn summarize(counts: &[u64], total: u128, q: u64) -> Dist {
    let t = total as f64;
    let ln_q = (q as f64).ln();
    let entropy = counts.iter().map(|&c| {
        let p = c as f64 / t;
        -p * p.ln() / ln_q
    }).sum::<f64>();
    let first = counts[0];
    let uniform_exp = if counts.iter().all(|&c| c == first) {
        let mut size = counts.len() as u128;
        let mut m = 0;
        while size > 1 && size.is_multiple_of(q as u128) {
            size /= q as u128;
            m += 1;
        }
        (size == 1).then_some(m)
    } else {
        None
    };
    Dist { entropy, uniform_exp }
}

/// `H(target | given)` by enumerating all `q^(KL + r)` source vectors.
pub fn entropy_oracle(inst: &SchemeInstance, query: &EntropyQuery, budget: u128) -> Result<OracleEntropy> {
    let q = inst.field.modulus();
    let n = inst.layout().columns();
    let total = (q as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= budget)
        .ok_or(Error::BudgetExceeded { needed: (q as f64).powi(n as i32) as u128, budget })?;

    let x_rows = variable_rows(inst, &query.target);
    let y_rows = variable_rows(inst, &query.given);
    let rows: Vec<&Vec<u64>> = y_rows.iter().chain(x_rows.iter()).collect();
    let ny = y_rows.len();
    // Column c of the evaluation map, i.e. what one unit of source symbol c adds.
    let cols: Vec<Vec<u64>> = (0..n).map(|c| rows.iter().map(|r| r[c]).collect()).collect();

    let mut joint = Counter::new(rows.len(), q);
    let mut cond = Counter::new(ny, q);
    let mut digits = vec![0u64; n];
    let mut vals = vec![0u64; rows.len()];
    let f = inst.field;
    for step in 0..total {
        joint.record(&vals, q);
        cond.record(&vals[..ny], q);
        if step + 1 == total {
            break;
        }
        // Odometer increment: each touched digit adds its column once, with
        // or without wrap-around, since q copies of a column vanish.
        for (c, d) in digits.iter_mut().enumerate() {
            for (v, &a) in vals.iter_mut().zip(&cols[c]) {
                *v = f.add(*v, a);
            }
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }

    let jd = summarize(&joint.counts(), total, q);
    let yd = summarize(&cond.counts(), total, q);
    let approx = jd.entropy - yd.entropy;
    let (value, uniform) = match (jd.uniform_exp, yd.uniform_exp) {
        (Some(a), Some(b)) => (Rational::from(a as i64 - b as i64), true),
        _ => (Rational::approximate(approx, 1_000_000), false),
    };
    Ok(OracleEntropy { value, approx, uniform, enumerated: total })
}
