//! The user's private randomness: one permutation per message, one for the
//! common randomness, and scheme-specific internal choices.
//!
//! A realization space is a mixed-radix product, so every realization has an
//! index. Index 0 is the identity realization with all choices zero.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UserRealization {
    /// `message_perms[k-1][i-1]` is the post-permutation index of symbol `i` of `W_k`.
    pub message_perms: Vec<Vec<usize>>,
    /// Same convention for the common randomness.
    pub randomness_perm: Vec<usize>,
    /// Internal choices, each a digit in `[0, radix)`.
    pub choices: Vec<usize>,
}

impl UserRealization {
    pub fn identity(messages: usize, message_len: usize, randomness_len: usize, choices: Vec<usize>) -> Self {
        Self {
            message_perms: vec![(1..=message_len).collect(); messages],
            randomness_perm: (1..=randomness_len).collect(),
            choices,
        }
    }

    pub fn is_identity_permutation(&self) -> bool {
        self.message_perms
            .iter()
            .chain(std::iter::once(&self.randomness_perm))
            .all(|p| p.iter().enumerate().all(|(i, &v)| v == i + 1))
    }

    pub fn map_message(&self, k: usize, index: usize) -> usize {
        self.message_perms[k - 1][index - 1]
    }

    pub fn map_randomness(&self, index: usize) -> usize {
        self.randomness_perm[index - 1]
    }
}

/// Shape of the realization space of one family for one message index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationSpace {
    pub messages: usize,
    pub message_len: usize,
    pub randomness_len: usize,
    pub choice_radices: Vec<usize>,
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, v| acc.checked_mul(v))
}

impl RealizationSpace {
    /// Number of internal-choice vectors.
    pub fn choice_count(&self) -> Option<u128> {
        self.choice_radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
    }

    /// Number of permutation tuples.
    pub fn permutation_count(&self) -> Option<u128> {
        let per_message = factorial(self.message_len)?;
        let mut total = factorial(self.randomness_len)?;
        for _ in 0..self.messages {
            total = total.checked_mul(per_message)?;
        }
        Some(total)
    }

    /// Total size, or `None` when it does not fit in a `u128`.
    pub fn size(&self) -> Option<u128> {
        self.choice_count()?.checked_mul(self.permutation_count()?)
    }

    /// Approximate size as a float, for reporting astronomically large spaces.
    pub fn size_f64(&self) -> f64 {
        let lf = |n: usize| (1..=n).map(|v| (v as f64).ln()).sum::<f64>();
        let ln = self.messages as f64 * lf(self.message_len)
            + lf(self.randomness_len)
            + self.choice_radices.iter().map(|&r| (r as f64).ln()).sum::<f64>();
        ln.exp()
    }

    /// Decode a mixed-radix choice index, least significant digit first.
    pub fn choices_at(&self, mut index: u128) -> Vec<usize> {
        self.choice_radices
            .iter()
            .map(|&r| {
                let d = (index % r as u128) as usize;
                index /= r as u128;
                d
            })
            .collect()
    }

    pub fn choice_vectors(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let count = self.choice_count().expect("choice space fits in u128");
        (0..count).map(move |i| self.choices_at(i))
    }

    /// Realization with the given index. Digits are consumed in the order:
    /// choices, randomness permutation, message permutations.
    pub fn get(&self, id: u128) -> Result<UserRealization> {
        let size = self
            .size()
            .ok_or_else(|| Error::InvalidRealization("space too large to index".into()))?;
        if id >= size {
            return Err(Error::InvalidRealization(format!("index {id} >= space size {size}")));
        }
        let choice_count = self.choice_count().unwrap();
        let choices = self.choices_at(id % choice_count);
        let mut rest = id / choice_count;
        let r_fact = factorial(self.randomness_len).unwrap();
        let randomness_perm = unrank_permutation(self.randomness_len, rest % r_fact);
        rest /= r_fact;
        let m_fact = factorial(self.message_len).unwrap();
        let message_perms = (0..self.messages)
            .map(|_| {
                let p = unrank_permutation(self.message_len, rest % m_fact);
                rest /= m_fact;
                p
            })
            .collect();
        Ok(UserRealization { message_perms, randomness_perm, choices })
    }

    pub fn index_of(&self, real: &UserRealization) -> Option<u128> {
        self.validate(real).ok()?;
        let choice_count = self.choice_count()?;
        let mut choice_index = 0u128;
        for (&d, &r) in real.choices.iter().zip(&self.choice_radices).rev() {
            choice_index = choice_index * r as u128 + d as u128;
        }
        let m_fact = factorial(self.message_len)?;
        let mut id = 0u128;
        for p in real.message_perms.iter().rev() {
            id = id.checked_mul(m_fact)?.checked_add(rank_permutation(p))?;
        }
        id = id
            .checked_mul(factorial(self.randomness_len)?)?
            .checked_add(rank_permutation(&real.randomness_perm))?;
        id.checked_mul(choice_count)?.checked_add(choice_index)
    }

    pub fn identity(&self, choices: Vec<usize>) -> UserRealization {
        UserRealization::identity(self.messages, self.message_len, self.randomness_len, choices)
    }

    /// Uniform draw from the whole space.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> UserRealization {
        let mut shuffled = |n: usize| {
            let mut p: Vec<usize> = (1..=n).collect();
            p.shuffle(rng);
            p
        };
        let message_perms = (0..self.messages).map(|_| shuffled(self.message_len)).collect();
        let randomness_perm = shuffled(self.randomness_len);
        let choices = self.choice_radices.iter().map(|&r| rng.gen_range(0..r)).collect();
        UserRealization { message_perms, randomness_perm, choices }
    }

    pub fn validate(&self, real: &UserRealization) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRealization(m));
        if real.message_perms.len() != self.messages {
            return bad(format!("{} message permutations, expected {}", real.message_perms.len(), self.messages));
        }
        for p in &real.message_perms {
            if !is_permutation(p, self.message_len) {
                return bad(format!("not a permutation of 1..={}: {p:?}", self.message_len));
            }
        }
        if !is_permutation(&real.randomness_perm, self.randomness_len) {
            return bad(format!("randomness permutation {:?}", real.randomness_perm));
        }
        if real.choices.len() != self.choice_radices.len()
            || real.choices.iter().zip(&self.choice_radices).any(|(&d, &r)| d >= r)
        {
            return bad(format!("choices {:?} outside radices {:?}", real.choices, self.choice_radices));
        }
        Ok(())
    }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in p {
        if v == 0 || v > n || seen[v - 1] {
            return false;
        }
        seen[v - 1] = true;
    }
    true
}

/// Lehmer-code unranking: index 0 is the identity.
pub fn unrank_permutation(n: usize, mut index: u128) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=n).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i).unwrap();
        let pos = (index / f) as usize;
        index %= f;
        out.push(pool.remove(pos));
    }
    out
}

pub fn rank_permutation(p: &[usize]) -> u128 {
    let n = p.len();
    let mut pool: Vec<usize> = (1..=n).collect();
    let mut index = 0u128;
    for (i, &v) in p.iter().enumerate() {
        let pos = pool.iter().position(|&x| x == v).expect("valid permutation");
        pool.remove(pos);
        index += pos as u128 * factorial(n - 1 - i).unwrap();
    }
    index
}

/// A materialized sequence of realizations.
#[derive(Debug, Clone)]
pub enum Realizations {
    /// Every realization, indexed by id.
    Exhaustive(RealizationSpace),
    /// A seeded uniform sample from a space larger than the limit.
    Sampled { space: RealizationSpace, items: Vec<UserRealization>, seed: u64 },
}

impl Realizations {
    pub fn is_sampled(&self) -> bool {
        matches!(self, Realizations::Sampled { .. })
    }

    pub fn len(&self) -> u128 {
        match self {
            Realizations::Exhaustive(space) => space.size().expect("exhaustive spaces fit"),
            Realizations::Sampled { items, .. } => items.len() as u128,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: u128) -> Result<UserRealization> {
        match self {
            Realizations::Exhaustive(space) => space.get(i),
            Realizations::Sampled { items, .. } => items
                .get(i as usize)
                .cloned()
                .ok_or_else(|| Error::InvalidRealization(format!("sample index {i} out of range"))),
        }
    }

    pub fn space(&self) -> &RealizationSpace {
        match self {
            Realizations::Exhaustive(space) => space,
            Realizations::Sampled { space, .. } => space,
        }
    }
}

/// All realizations when the space has at most `limit` elements, otherwise
/// `limit` seeded uniform samples.
pub fn enumerate_space(space: RealizationSpace, limit: u128, seed: u64) -> Realizations {
    match space.size() {
        Some(size) if size <= limit => Realizations::Exhaustive(space),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let items = (0..limit).map(|_| space.sample(&mut rng)).collect();
            Realizations::Sampled { space, items, seed }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_space() -> RealizationSpace {
        RealizationSpace { messages: 2, message_len: 4, randomness_len: 5, choice_radices: vec![2, 2] }
    }

    #[test]
    fn sizes() {
        assert_eq!(example_space().size(), Some(24 * 24 * 120 * 4));
        assert_eq!(example_space().size(), Some(276_480));
        let p3 = RealizationSpace { messages: 2, message_len: 2, randomness_len: 2, choice_radices: vec![] };
        assert_eq!(p3.size(), Some(8));
        let c3 = RealizationSpace { messages: 3, message_len: 12, randomness_len: 21, choice_radices: vec![] };
        assert_eq!(c3.size(), None);
        assert!(c3.size_f64() > 1e45);
    }

    #[test]
    fn identity_is_index_zero() {
        let s = example_space();
        let r = s.get(0).unwrap();
        assert!(r.is_identity_permutation());
        assert_eq!(r.choices, vec![0, 0]);
        assert!(s.get(276_480).is_err());
    }

    #[test]
    fn exhaustive_enumeration_is_a_bijection() {
        let s = RealizationSpace { messages: 2, message_len: 2, randomness_len: 3, choice_radices: vec![3] };
        let n = s.size().unwrap();
        let all: std::collections::HashSet<UserRealization> = (0..n).map(|i| s.get(i).unwrap()).collect();
        assert_eq!(all.len() as u128, n);
        for i in 0..n {
            assert_eq!(s.index_of(&s.get(i).unwrap()), Some(i));
        }
    }

    #[test]
    fn sampling_is_seeded_and_flagged() {
        let c3 = RealizationSpace { messages: 3, message_len: 12, randomness_len: 21, choice_radices: vec![] };
        let a = enumerate_space(c3.clone(), 10_000, 7);
        let b = enumerate_space(c3, 10_000, 7);
        assert!(a.is_sampled());
        assert_eq!(a.len(), 10_000);
        assert_eq!(a.get(123).unwrap(), b.get(123).unwrap());
        assert!(a.space().validate(&a.get(9_999).unwrap()).is_ok());

        let small = enumerate_space(example_space(), 1_000_000, 0);
        assert!(!small.is_sampled());
        assert_eq!(small.len(), 276_480);
    }

    proptest! {
        #[test]
        fn lehmer_round_trip(n in 0usize..=9, seed in any::<u64>()) {
            let total = factorial(n).unwrap();
            let idx = seed as u128 % total;
            let p = unrank_permutation(n, idx);
            prop_assert!(is_permutation(&p, n));
            prop_assert_eq!(rank_permutation(&p), idx);
        }
    }
}
