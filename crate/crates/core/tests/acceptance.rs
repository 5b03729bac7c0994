//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spir::algebra::{ratio, PrimeField, Rational};
use spir::audit::{
    audit_converse, audit_family, entropy_oracle, linear_entropy, query_entropy, AuditOptions, CheckStatus,
    EntropyQuery, Variable, DEFAULT_BUDGET,
};
use spir::capacity::{achievable_rate, bound_set, general_rate_rho, pir_capacity, upper_bound};
use spir::cli::{cmd_tables, TableChoice};
use spir::convert::{conversion_params, convert_pir_to_spir, scheme_stats};
use spir::graphdb::{Graph, GraphKind};
use spir::schemes::{check_srp, Cycle3Pir, P3CapacitySpir, PathPir, SchemeFamily, SchemeInstance, SourceBlock};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q2() -> PrimeField {
    PrimeField::binary()
}

fn p3_example() -> SchemeFamily {
    convert_pir_to_spir(&PathPir::family(3, q2()).unwrap(), &Graph::path(3).unwrap()).unwrap()
}

fn c3_example() -> SchemeFamily {
    convert_pir_to_spir(&Cycle3Pir::family(q2()), &Graph::cycle(3).unwrap()).unwrap()
}

fn converted_path(n: usize) -> SchemeFamily {
    convert_pir_to_spir(&PathPir::family(n, q2()).unwrap(), &Graph::path(n).unwrap()).unwrap()
}

// Transcribed answer tables, rendered in the CLI's layout.

fn row(label: &str, cells: &[&str]) -> String {
    format!("| {label} | {} |\n", cells.join(" | "))
}

fn head(label: &str) -> String {
    row(label, &["database 1", "database 2", "database 3"]) + "|---|---|---|---|\n"
}

fn table_one() -> String {
    let mut s = String::from("Answer table for P3 (L=4, |R|=5)\n");
    s += &head("theta=1");
    s += &row("", &["s2", "s1", "s4"]);
    s += &row("rep. 1", &["a1+s1", "a2+b2+s2+s3", "b2+s3"]);
    s += &row("rep. 2", &["a3+s4", "a4+b4+s4+s5", "b4+s5"]);
    s += &head("theta=2");
    // Database 3 downloads s2: with s1 the user could not cancel s2 from a1+b1+s1+s2.
    s += &row("", &["s5", "s3", "s2"]);
    s += &row("rep. 1", &["a1+s1", "a1+b1+s1+s2", "b2+s3"]);
    s += &row("rep. 2", &["a3+s4", "a3+b3+s4+s5", "b4+s5"]);
    s += "note: database 3 downloads s2 here; s1 would leave b1 undecodable\n";
    s
}

fn table_two() -> String {
    let mut s = String::from("Answer table for C3 (L=12, |R|=21)\n");
    s += &head("theta=1");
    s += &row("", &["s7, s9, s11", "s1, s3, s5", "s13, s15, s17"]);
    s += &row(
        "rep. 1",
        &[
            "a1+s1, c1+s2, a2+c2+s3+s4, a3+c3+s5+s6",
            "a4+s7, b1+s8, a5+b2+s9+s10, a6+b3+s11+s12",
            "b2+s10, c2+s4, b1+c3+s8+s6, b3+c1+s12+s2",
        ],
    );
    // The last sum is printed with its two masks swapped in the reference;
    // here masks always follow the order of the symbols they cover.
    s += &row(
        "rep. 2",
        &[
            "a7+s13, c7+s14, a8+c8+s15+s16, a9+c9+s17+s18",
            "a10+s13, b7+s19, a11+b8+s15+s20, a12+b9+s17+s21",
            "b8+s20, c8+s16, b7+c9+s19+s18, b9+c7+s21+s14",
        ],
    );
    s
}

fn table_three() -> String {
    let mut s = String::from("Capacity-achieving answer table for P3 (L=2, |R|=2)\n");
    s += &head("");
    s += &row("theta=1", &["a1+s1", "s1, a2+b2+s2", "b2+s2"]);
    s += &row("theta=2", &["a1+s1", "s2, a1+b1+s1", "b2+s2"]);
    s
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for (which, want) in [
        (TableChoice::P3Example, table_one()),
        (TableChoice::C3, table_two()),
        (TableChoice::P3Capacity, table_three()),
    ] {
        let got = cmd_tables(which).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("{which:?} differs:\n--- got\n{got}--- want\n{want}"))?;
    }
    let all = cmd_tables(TableChoice::All).map_err(|e| e.to_string())?;
    ensure(all == format!("{}\n{}\n{}", table_one(), table_two(), table_three()), || "--which all differs".into())?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("three tables match, {t:?}"))
}

fn criterion_2() -> Outcome {
    let cases = [
        ("converted P3", p3_example(), ratio(4, 9), ratio(5, 4)),
        ("converted C3", c3_example(), ratio(4, 11), ratio(7, 4)),
        ("P3 capacity", P3CapacitySpir::family(q2()), ratio(1, 2), Rational::one()),
    ];
    let mut notes = Vec::new();
    for (name, fam, rate, rho) in cases {
        let st = scheme_stats(&fam).map_err(|e| e.to_string())?;
        ensure(st.rate == rate && st.rho == rho, || {
            format!("{name}: rate {} rho {}, want {rate} {rho}", st.rate, st.rho)
        })?;
        notes.push(format!("{name} rate {} rho {}", st.rate, st.rho));
    }
    Ok(notes.join(", "))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for kind in [GraphKind::Path, GraphKind::Cycle] {
        for n in 3..=32usize {
            let ni = n as i64;
            let r = achievable_rate(kind, n).unwrap();
            let c = pir_capacity(kind, n).unwrap();
            let lhs = r.recip().unwrap();
            let rhs = c.recip().unwrap() + ratio(ni, 2 * (ni - 1));
            ensure(lhs == rhs, || format!("{kind} N={n}: 1/R = {lhs}, 1/C + N/(2(N-1)) = {rhs}"))?;

            // Base parameters (L', D', K): path PIR (2, N, N-1); cycle PIR (2, N+1, N).
            let (dp, k) = match kind {
                GraphKind::Path => (n, n - 1),
                _ => (n + 1, n),
            };
            let (rate, rho) = general_rate_rho(2, dp, n, k).unwrap();
            ensure(rate == r, || format!("{kind} N={n}: general rate {rate} vs {r}"))?;
            ensure(rho == lhs.clone() - Rational::one(), || format!("{kind} N={n}: rho {rho} vs 1/R - 1"))?;

            let p = conversion_params(2, n, k).unwrap();
            ensure(p.x == (n - 1) * p.y, || format!("{kind} N={n}: x L'/2 != (N-1) y"))?;
            let by_hand = Rational::from(2 * p.x).checked_div(&Rational::from(dp * p.x + n * p.y)).unwrap();
            let rho_hand = Rational::from(p.randomness_len).checked_div(&Rational::from(p.message_len)).unwrap();
            ensure(by_hand == rate && rho_hand == rho, || format!("{kind} N={n}: conversion_params disagree"))?;
            // Other L' with the same D'/L' ratio give the same rate.
            let (rate6, _) = general_rate_rho(6, 3 * dp, n, k).unwrap();
            ensure(rate6 == rate, || format!("{kind} N={n}: rate depends on L'"))?;
            count += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("{count} (kind, N) pairs, {t:?}"))
}

fn criterion_4() -> Outcome {
    let opts = AuditOptions::default();
    let mut notes = Vec::new();
    let families = [
        ("P3 capacity", P3CapacitySpir::family(q2()), Some(8u128)),
        ("converted P3", p3_example(), Some(276_480)),
        ("converted P4", converted_path(4), None),
        ("converted P5", converted_path(5), None),
    ];
    for (name, fam, full) in families {
        let start = Instant::now();
        let rep = audit_family(&fam, &opts).map_err(|e| e.to_string())?;
        let feas: Vec<_> = rep
            .checks
            .iter()
            .filter(|c| {
                c.name.starts_with("reliability") || c.name.starts_with("database-privacy") || c.name.starts_with("user-privacy")
            })
            .collect();
        let k = fam.graph().message_count();
        ensure(feas.len() == 2 * k + (k - 1), || format!("{name}: {} feasibility checks", feas.len()))?;
        for c in &feas {
            ensure(c.status == CheckStatus::Pass, || format!("{name}: {} is {}", c.name, c.status.as_str()))?;
        }
        if let Some(size) = full {
            for theta in fam.thetas() {
                let c = rep.check(&format!("reliability[theta={theta}]")).unwrap();
                ensure(c.rhs == Rational::from(size as usize), || format!("{name}: covered {} realizations", c.rhs))?;
            }
            let up = rep.check("user-privacy[theta=1,theta=2]").unwrap();
            let method = up.witness.as_ref().and_then(|w| w["method"].as_str()).unwrap_or("");
            ensure(method == "concrete", || format!("{name}: user privacy compared {method} views"))?;
        }
        notes.push(format!("{name} {:.1?}", start.elapsed()));
    }
    Ok(notes.join(", "))
}

/// Random entropy queries mixing answer subsets and source blocks.
fn random_query(inst: &SchemeInstance, rng: &mut ChaCha8Rng) -> EntropyQuery {
    let mut refs = inst.form_refs();
    refs.shuffle(rng);
    let split = rng.gen_range(1..=refs.len());
    let cut = rng.gen_range(0..=split);
    let target = Variable::Forms(refs[..cut.max(1)].to_vec());
    let mut given = vec![Variable::Forms(refs[cut.max(1)..split].to_vec())];
    let k = inst.graph.message_count();
    for b in (1..=k).map(SourceBlock::Message).chain([SourceBlock::Randomness]) {
        if rng.gen_bool(0.3) {
            given.push(Variable::Block(b));
        }
    }
    EntropyQuery { target: vec![target], given }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut families = vec![P3CapacitySpir::family(q2()), p3_example(), Cycle3Pir::family(q2())];
    families.extend((3..=8).map(|n| PathPir::family(n, q2()).unwrap()));
    let (mut instances, mut queries) = (0, 0);
    for fam in &families {
        for theta in fam.thetas() {
            let space = fam.realization_space(theta);
            let sampled = space.sample(&mut rng);
            for inst in [fam.identity_instance(theta).unwrap(), fam.instance(theta, &sampled).unwrap()] {
                let layout = inst.layout();
                if layout.columns() > 24 {
                    continue;
                }
                instances += 1;
                for i in 0..24 {
                    let q = if i < 4 {
                        // Column-conditioning form of the same quantity.
                        let forms = inst.server_refs(1 + i % inst.server_count());
                        let blocks = [SourceBlock::Message(1 + i % fam.graph().message_count())];
                        let via_cols = linear_entropy(&inst, &forms, &blocks);
                        let q = EntropyQuery::of([Variable::Forms(forms)]).given(blocks.map(Variable::Block));
                        ensure(via_cols == query_entropy(&inst, &q), || format!("{}: column restriction differs", fam.name()))?;
                        q
                    } else {
                        random_query(&inst, &mut rng)
                    };
                    let o = entropy_oracle(&inst, &q, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                    let h = query_entropy(&inst, &q);
                    ensure(o.uniform && o.value == Rational::from(h), || {
                        format!("{} theta={theta}: oracle {} (uniform {}) vs rank {h} on {q:?}", fam.name(), o.value, o.uniform)
                    })?;
                    queries += 1;
                }
            }
        }
    }
    Ok(format!("{instances} instances, {queries} queries"))
}

fn criterion_6() -> Outcome {
    let opts = AuditOptions::default();
    let mut families = vec![
        ("P3 capacity", P3CapacitySpir::family(q2())),
        ("converted P3", p3_example()),
        ("converted C3", c3_example()),
    ];
    for n in 4..=8 {
        families.push((["converted P4", "converted P5", "converted P6", "converted P7", "converted P8"][n - 4], converted_path(n)));
    }
    let mut checked = 0;
    for (name, fam) in &families {
        let rep = audit_converse(fam, &opts).map_err(|e| e.to_string())?;
        for c in &rep.checks {
            ensure(c.status != CheckStatus::Fail && !c.slack.is_negative(), || {
                format!("{name}: {} lhs {} rhs {}", c.name, c.lhs, c.rhs)
            })?;
            checked += 1;
        }
        if *name == "P3 capacity" {
            for check in ["download-sum[theta=1]", "download-sum[theta=2]", "randomness-bound[theta=1]", "randomness-bound[theta=2]"] {
                let c = rep.check(check).ok_or_else(|| format!("missing {check}"))?;
                ensure(c.slack.is_zero() && c.status == CheckStatus::Pass, || format!("P3 capacity {check}: slack {}", c.slack))?;
            }
        }
        if *name == "converted P3" {
            let c = rep.check("download-sum[theta=1]").unwrap();
            ensure(c.lhs == 18i64 && c.rhs == 16i64, || {
                format!("converted P3 download sum {} >= {}", c.lhs, c.rhs)
            })?;
        }
    }
    Ok(format!("{checked} inequalities on {} families", families.len()))
}

fn criterion_7() -> Outcome {
    for kind in [GraphKind::Path, GraphKind::Cycle] {
        for n in 3..=32usize {
            let b = bound_set(kind, n).unwrap();
            let one_over_n = ratio(1, n as i64);
            ensure(b.graph_replicated == one_over_n, || format!("{kind} N={n}: graph-replicated {}", b.graph_replicated))?;
            ensure(one_over_n <= b.lower && b.lower <= b.upper && b.upper <= b.pir, || {
                format!("{kind} N={n}: {} {} {} {}", b.graph_replicated, b.lower, b.upper, b.pir)
            })?;
            let tight = kind == GraphKind::Path && n == 3;
            ensure((b.lower == b.upper) == tight, || format!("{kind} N={n}: lower {} upper {}", b.lower, b.upper))?;
            let ni = n as i64;
            let want = match kind {
                GraphKind::Path => Rational::from(2i64).checked_div(&(Rational::from(ni) + ratio(2, ni - 1))).unwrap(),
                _ => Rational::from(2i64).checked_div(&(Rational::from(ni + 1) + ratio(1, ni - 1))).unwrap(),
            };
            ensure(b.upper == want, || format!("{kind} N={n}: upper {}", b.upper))?;
        }
    }
    let spots = [
        (upper_bound(GraphKind::Path, 3).unwrap(), ratio(1, 2)),
        (upper_bound(GraphKind::Cycle, 3).unwrap(), ratio(4, 9)),
        (upper_bound(GraphKind::Path, 4).unwrap(), ratio(3, 7)),
    ];
    for (got, want) in spots {
        ensure(got == want, || format!("spot value {got}, want {want}"))?;
    }
    Ok("N in 3..=32, both kinds".into())
}

fn criterion_8() -> Outcome {
    let mut families: Vec<(SchemeFamily, usize)> = (3..=8).map(|n| (PathPir::family(n, q2()).unwrap(), 1)).collect();
    families.push((Cycle3Pir::family(q2()), 3));
    for (fam, expected) in &families {
        let rep = check_srp(fam).map_err(|e| e.to_string())?;
        ensure(rep.pass && rep.expected == *expected, || format!("{}: {rep:?}", fam.name()))?;
        for (key, counts) in &rep.counts {
            ensure(counts.len() == 1 && counts.contains(expected), || format!("{} {key}: {counts:?}", fam.name()))?;
        }
    }
    Ok(format!("{} base families", families.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden answer tables", criterion_1),
        ("rates and randomness ratios", criterion_2),
        ("formula identities", criterion_3),
        ("exhaustive feasibility", criterion_4),
        ("entropy oracle agreement", criterion_5),
        ("converse inequalities", criterion_6),
        ("bound sandwich", criterion_7),
        ("symmetric retrieval", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
