//! User privacy: each server's view must have the same distribution for
//! every desired message.
//!
//! A view is the ordered list of forms a server is asked to return, with the
//! symbol indices after the user's permutations. Answers are deterministic
//! given the view and the sources, so equal view distributions give equal
//! answer distributions.
//!
//! When the full realization space is too large, views are compared up to
//! relabeling. A uniform permutation spreads each identity-permutation view
//! uniformly over its orbit under relabeling, so the view distribution is
//! the mixture of those orbits over the internal choices. Two canonical
//! encodings coincide only for views in the same orbit, hence equal
//! canonical multisets prove equal distributions.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{AuditOptions, CheckStatus, Coverage, Visit};
use crate::error::Result;
use crate::schemes::{LinearForm, SchemeFamily, SchemeInstance, SymbolRef, UserRealization};

fn block_code(sym: SymbolRef) -> u32 {
    match sym {
        SymbolRef::Message { message, .. } => message as u32,
        SymbolRef::Randomness { .. } => 0,
    }
}

fn index_of(sym: SymbolRef) -> u32 {
    match sym {
        SymbolRef::Message { index, .. } | SymbolRef::Randomness { index } => index as u32,
    }
}

fn push_form(out: &mut Vec<u32>, terms: &[(SymbolRef, u64)]) {
    out.push(terms.len() as u32);
    for &(s, c) in terms {
        out.extend([block_code(s), index_of(s), c as u32]);
    }
}

/// Concrete view of `server`: its forms in order, each with sorted terms.
pub fn server_view(inst: &SchemeInstance, server: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for a in inst.server_answers(server) {
        push_form(&mut out, &a.form.sorted_terms());
    }
    out
}

/// Concrete view of `server` under `real`, computed from the identity instance.
fn permuted_view(base: &SchemeInstance, real: &UserRealization, server: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for a in base.server_answers(server) {
        let mut terms: Vec<(SymbolRef, u64)> = a
            .form
            .terms()
            .iter()
            .map(|&(s, c)| {
                let s = match s {
                    SymbolRef::Message { message, index } => SymbolRef::msg(message, real.map_message(message, index)),
                    SymbolRef::Randomness { index } => SymbolRef::rand(real.map_randomness(index)),
                };
                (s, c)
            })
            .collect();
        terms.sort_unstable();
        push_form(&mut out, &terms);
    }
    out
}

/// View with indices replaced by first-appearance labels within each block.
/// Terms already labeled come first, sorted by `(block, label, coefficient)`;
/// new symbols follow, sorted by `(block, coefficient)`.
pub fn canonical_view<'a>(forms: impl IntoIterator<Item = &'a LinearForm>) -> Vec<u32> {
    let mut labels: HashMap<SymbolRef, u32> = HashMap::new();
    let mut next: HashMap<u32, u32> = HashMap::new();
    let mut out = Vec::new();
    for f in forms {
        let mut seen: Vec<(u32, u32, u64)> = Vec::new();
        let mut fresh: Vec<(u32, u64, SymbolRef)> = Vec::new();
        for &(s, c) in f.terms() {
            match labels.get(&s) {
                Some(&l) => seen.push((block_code(s), l, c)),
                None => fresh.push((block_code(s), c, s)),
            }
        }
        seen.sort_unstable();
        fresh.sort_by_key(|&(b, c, _)| (b, c));
        out.push(f.len() as u32);
        for (b, l, c) in seen {
            out.extend([b, l, c as u32]);
        }
        for (b, c, s) in fresh {
            let n = next.entry(b).or_insert(0);
            *n += 1;
            labels.insert(s, *n);
            out.extend([b | 1 << 31, *n, c as u32]);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ServerPrivacy {
    pub server: usize,
    pub distinct_views: (usize, usize),
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrivacyOutcome {
    pub thetas: (usize, usize),
    pub status: CheckStatus,
    pub coverage: (Coverage, Coverage),
    /// `concrete` compares exact views, `canonical` compares views up to relabeling.
    pub method: &'static str,
    pub servers: Vec<ServerPrivacy>,
}

type Tally = Vec<HashMap<Vec<u32>, u64>>;

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (x, y) in a.iter_mut().zip(b) {
        for (k, v) in y {
            *x.entry(k).or_default() += v;
        }
    }
    a
}

/// Per-server view counts for `theta`.
fn tally(family: &SchemeFamily, theta: usize, visit: &Visit, canonical: bool) -> Result<Tally> {
    let n = family.graph().server_count();
    let bases = visit.bases(family, theta)?;
    let empty = || vec![HashMap::new(); n];
    Ok((0..visit.len())
        .into_par_iter()
        .fold(empty, |mut acc, i| {
            let real = visit.get(i);
            let base = &bases[&real.choices];
            for s in 1..=n {
                let view = if canonical {
                    canonical_view(base.server_answers(s).iter().map(|a| &a.form))
                } else {
                    permuted_view(base, &real, s)
                };
                *acc[s - 1].entry(view).or_default() += 1;
            }
            acc
        })
        .reduce(empty, merge))
}

/// Same distribution: every view has the same relative frequency.
fn same_distribution(a: &HashMap<Vec<u32>, u64>, b: &HashMap<Vec<u32>, u64>) -> bool {
    let ta: u128 = a.values().map(|&v| v as u128).sum();
    let tb: u128 = b.values().map(|&v| v as u128).sum();
    a.len() == b.len()
        && a.iter().all(|(k, &va)| b.get(k).is_some_and(|&vb| va as u128 * tb == vb as u128 * ta))
}

fn same_support(a: &HashMap<Vec<u32>, u64>, b: &HashMap<Vec<u32>, u64>) -> bool {
    let ka: HashSet<_> = a.keys().collect();
    let kb: HashSet<_> = b.keys().collect();
    ka == kb
}

/// Compare every server's view distribution under `theta` and `theta_prime`.
///
/// Exhaustive mode enumerates the realization spaces when both fit within the
/// limit and otherwise compares canonical views over every internal choice;
/// either way a pass is exact. Sample mode (or an oversized choice space)
/// compares the supports of canonical views over seeded samples and reports
/// sampled-pass at best.
pub fn verify_user_privacy(
    family: &SchemeFamily,
    theta: usize,
    theta_prime: usize,
    opts: &AuditOptions,
) -> Result<PrivacyOutcome> {
    family.check_theta(theta)?;
    family.check_theta(theta_prime)?;
    let va = Visit::new(family, theta, opts);
    let vb = Visit::new(family, theta_prime, opts);
    let sampled = matches!(va.coverage, Coverage::Sampled(_)) || matches!(vb.coverage, Coverage::Sampled(_));
    let concrete = matches!((va.coverage, vb.coverage), (Coverage::Full(_), Coverage::Full(_)));
    // Mixed coverage (one side full, the other not) falls back to canonical views.
    let (va, vb) = if !concrete && !sampled {
        let force = |t| {
            let mut v = Visit::new(family, t, opts);
            if let Coverage::Full(_) = v.coverage {
                v = Visit::choices_only(family, t);
            }
            v
        };
        (force(theta), force(theta_prime))
    } else {
        (va, vb)
    };
    let ta = tally(family, theta, &va, !concrete)?;
    let tb = tally(family, theta_prime, &vb, !concrete)?;
    let servers: Vec<ServerPrivacy> = ta
        .iter()
        .zip(&tb)
        .enumerate()
        .map(|(i, (a, b))| ServerPrivacy {
            server: i + 1,
            distinct_views: (a.len(), b.len()),
            equal: if sampled { same_support(a, b) } else { same_distribution(a, b) },
        })
        .collect();
    let status = if servers.iter().all(|s| s.equal) {
        if sampled {
            CheckStatus::SampledPass
        } else {
            CheckStatus::Pass
        }
    } else {
        CheckStatus::Fail
    };
    Ok(PrivacyOutcome {
        thetas: (theta, theta_prime),
        status,
        coverage: (va.coverage, vb.coverage),
        method: if concrete { "concrete" } else { "canonical" },
        servers,
    })
}
