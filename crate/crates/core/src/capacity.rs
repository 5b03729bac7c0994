//! Closed-form rates and bounds for path and cycle replication.

use serde::Serialize;

use crate::algebra::{ratio, Rational};
use crate::error::{Error, Result};
use crate::graphdb::GraphKind;

fn check(kind: GraphKind, n: usize) -> Result<i64> {
    let min = match kind {
        GraphKind::Path | GraphKind::Cycle => 3,
        GraphKind::Generic => return Err(Error::InvalidGraph("no closed form for generic graphs".into())),
    };
    if n < min {
        return Err(Error::TooFewServers { kind: kind.name(), min, n });
    }
    Ok(n as i64)
}

/// Rate of an SPIR scheme converted from a PIR scheme with parameters `(L', D')`.
pub fn general_rate(base_symbols: usize, base_downloads: usize, n: usize) -> Result<Rational> {
    let p = crate::convert::conversion_params(base_symbols, n, 1)?;
    Rational::from(base_symbols * p.x).checked_div(&Rational::from(base_downloads * p.x + n * p.y))
}

/// Rate and randomness ratio of the converted scheme for `(L', D')`, `N`, `K`.
pub fn general_rate_rho(base_symbols: usize, base_downloads: usize, n: usize, k: usize) -> Result<(Rational, Rational)> {
    let p = crate::convert::conversion_params(base_symbols, n, k)?;
    let lx = Rational::from(base_symbols * p.x);
    let rate = lx.checked_div(&Rational::from(base_downloads * p.x + n * p.y))?;
    let rho = Rational::from(k as i64 - 1) * ratio(1, 2) + Rational::from(n * p.y).checked_div(&lx)?;
    Ok((rate, rho))
}

/// Rate achieved by converting the standard PIR scheme.
pub fn achievable_rate(kind: GraphKind, n: usize) -> Result<Rational> {
    let n = check(kind, n)?;
    let extra = ratio(n, n - 1);
    let base = match kind {
        GraphKind::Path => Rational::from(n),
        _ => Rational::from(n + 1),
    };
    Rational::from(2i64).checked_div(&(base + extra))
}

/// PIR capacity, the trivial upper bound on SPIR rates.
pub fn pir_capacity(kind: GraphKind, n: usize) -> Result<Rational> {
    let n = check(kind, n)?;
    Ok(match kind {
        GraphKind::Path => ratio(2, n),
        _ => ratio(2, n + 1),
    })
}

/// Converse bound on the SPIR rate.
pub fn upper_bound(kind: GraphKind, n: usize) -> Result<Rational> {
    let n = check(kind, n)?;
    let denom = match kind {
        GraphKind::Path => Rational::from(n) + ratio(2, n - 1),
        _ => Rational::from(n + 1) + ratio(1, n - 1),
    };
    Rational::from(2i64).checked_div(&denom)
}

/// Rate of the scheme that downloads every server's full storage.
pub fn graph_replicated(kind: GraphKind, n: usize) -> Result<Rational> {
    let n = check(kind, n)?;
    Ok(ratio(1, n))
}

/// Lower bound on the randomness ratio, where one is known.
pub fn rho_lower_bound(kind: GraphKind, n: usize) -> Option<Rational> {
    (kind == GraphKind::Path && n == 3).then(Rational::one)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundSet {
    pub kind: GraphKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub graph_replicated: Rational,
    /// Best known achievable rate.
    pub lower: Rational,
    pub upper: Rational,
    pub pir: Rational,
}

pub fn bound_set(kind: GraphKind, n: usize) -> Result<BoundSet> {
    let lower = if kind == GraphKind::Path && n == 3 { ratio(1, 2) } else { achievable_rate(kind, n)? };
    Ok(BoundSet {
        kind,
        n,
        graph_replicated: graph_replicated(kind, n)?,
        lower,
        upper: upper_bound(kind, n)?,
        pir: pir_capacity(kind, n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(achievable_rate(GraphKind::Path, 3).unwrap(), ratio(4, 9));
        assert_eq!(achievable_rate(GraphKind::Path, 4).unwrap(), ratio(3, 8));
        assert_eq!(achievable_rate(GraphKind::Cycle, 3).unwrap(), ratio(4, 11));
        assert_eq!(upper_bound(GraphKind::Path, 3).unwrap(), ratio(1, 2));
        assert_eq!(upper_bound(GraphKind::Cycle, 3).unwrap(), ratio(4, 9));
        assert_eq!(pir_capacity(GraphKind::Cycle, 4).unwrap(), ratio(2, 5));
        assert_eq!(rho_lower_bound(GraphKind::Path, 3), Some(Rational::one()));
        assert_eq!(rho_lower_bound(GraphKind::Path, 4), None);
        assert!(achievable_rate(GraphKind::Cycle, 2).is_err());
    }

    #[test]
    fn general_formula_matches() {
        for n in 3..=12usize {
            assert_eq!(general_rate(2, n, n).unwrap(), achievable_rate(GraphKind::Path, n).unwrap());
            // Rate depends only on D'/L'.
            assert_eq!(
                general_rate(6, 3 * (n + 1), n).unwrap(),
                achievable_rate(GraphKind::Cycle, n).unwrap()
            );
            let (_, rho) = general_rate_rho(2, n, n, n - 1).unwrap();
            assert_eq!(rho + Rational::one(), Rational::one().checked_div(&achievable_rate(GraphKind::Path, n).unwrap()).unwrap());
        }
    }

    #[test]
    fn bounds_are_ordered() {
        for kind in [GraphKind::Path, GraphKind::Cycle] {
            for n in 3..=30 {
                let b = bound_set(kind, n).unwrap();
                assert!(b.graph_replicated <= b.lower);
                assert!(b.lower <= b.upper);
                assert!(b.upper < b.pir);
            }
        }
    }
}
