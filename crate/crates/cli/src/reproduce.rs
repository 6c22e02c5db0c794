//! The bundled recipe: every worked example with its expected verdict.

use std::fmt::Write as _;

use num_rational::BigRational;
use pfdim_core::asymclass::{FitConfig, TwoValueClass, TwoValueConfig};
use pfdim_core::dimension::{compare_profiles, GapConfig, VerdictKind};
use pfdim_core::dividing::DropOptions;
use pfdim_core::eval::{count_solutions, Assignment};
use pfdim_core::measure::{binomial_gap, find_rich_intersection};
use num_traits::Signed;
use serde_json::json;

use crate::commands::{
    cover_report, drop_report, fit, load_family, load_formula, load_ladder, sweep, tail_rows,
    two_value, witness_rows,
};
use crate::{random, CliError, Emit, Output};

struct Check {
    name: &'static str,
    expected: &'static str,
    observed: String,
    pass: bool,
}

type Observation = Result<(String, bool), CliError>;

fn check(name: &'static str, expected: &'static str, run: impl FnOnce() -> Observation) -> Check {
    let (observed, pass) = run().unwrap_or_else(|e| (format!("error: {e}"), false));
    Check { name, expected, observed, pass }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn gap_check(family: &str, x: (&str, &str), y: (&str, &str), indices: &str) -> Result<pfdim_core::dimension::GapVerdict, CliError> {
    let fam = load_family(family)?;
    let ladder = load_ladder(&fam, indices)?;
    let px = sweep(&fam, x.0, x.1, &ladder, "x")?;
    let py = sweep(&fam, y.0, y.1, &ladder, "x")?;
    compare_profiles(&px, &py, &GapConfig::default()).map_err(CliError::runtime)
}

fn label(c: TwoValueClass) -> String {
    serde_json::to_value(c).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn checks() -> Vec<Check> {
    vec![
        check("sweep dyadic-equiv E(x,b) b-zero 4:10", "8 16 32 64 128 256 512", || {
            let fam = load_family("dyadic-equiv")?;
            let p = sweep(&fam, "E(x,b)", "b-zero", &load_ladder(&fam, "4:10")?, "x")?;
            let got = join(&p.counts());
            let pass = got == "8 16 32 64 128 256 512";
            Ok((got, pass))
        }),
        check("count linear-order n=10 x = x", "10", || {
            let fam = load_family("linear-order")?;
            let m = fam.generate(10).map_err(CliError::runtime)?;
            let f = load_formula("x = x", m.signature())?;
            let c = count_solutions(&m, &f, &["x"], &Assignment::new()).map_err(CliError::runtime)?;
            Ok((c.to_string(), c == 10))
        }),
        check("gap linear-order x<a floor(n^0.3) vs floor(n^0.7) geo:100..1000000", "strictly-less, slope 0.4 +- 0.05", || {
            let v = gap_check("linear-order", ("x < a", "floor(n^0.3)"), ("x < a", "floor(n^0.7)"), "geo:100..1000000")?;
            let slope = v.slope.unwrap_or(f64::NAN);
            Ok((
                format!("{} slope={slope:.4}", v.kind.as_str()),
                v.kind == VerdictKind::StrictlyLess && (slope - 0.4).abs() <= 0.05,
            ))
        }),
        check("gap linear-order profile against itself", "equal", || {
            let v = gap_check("linear-order", ("x < a", "sqrt"), ("x < a", "sqrt"), "geo:100..100000")?;
            Ok((v.kind.as_str().to_string(), v.kind == VerdictKind::Equal))
        }),
        check("gap dyadic-equiv class of 0 vs universe 4:16", "equal, max_gap <= 0.76", || {
            let v = gap_check("dyadic-equiv", ("E(x,b)", "b-zero"), ("x = x", "none"), "4:16")?;
            let max = v.max_gap.unwrap_or(f64::NAN);
            Ok((
                format!("{} max_gap={max:.4}", v.kind.as_str()),
                v.kind == VerdictKind::Equal && max <= 0.76,
            ))
        }),
        check("gap dyadic-equiv last class vs universe 4:16", "strictly-less", || {
            let v = gap_check("dyadic-equiv", ("E(x,b)", "b-last"), ("x = x", "none"), "4:16")?;
            Ok((v.kind.as_str().to_string(), v.kind == VerdictKind::StrictlyLess))
        }),
        check("binomial gap C(m,i) - C(m,i+1) for 2i+1 <= m <= 60", "never positive", || {
            let mut positive = 0;
            for m in 1..=60u64 {
                for i in (0..m).take_while(|i| 2 * i < m) {
                    positive += usize::from(binomial_gap(m, i).map_err(CliError::runtime)?.is_positive());
                }
            }
            Ok((format!("{positive} positive"), positive == 0))
        }),
        check("inclexcl --random 64 4 1/2 7", "odd-start tails >= 0", || {
            let (space, sys) = random::dense_system(64, 4, &half(), 7)?;
            let rows = tail_rows(&space, &sys, None)?;
            let shown: Vec<String> = rows.iter().map(|(s, t, _)| format!("T{s}={t}")).collect();
            Ok((shown.join(" "), rows.iter().all(|r| r.2)))
        }),
        check("intersect --random 64 4 1/2 7 --k 2", "pair with measure >= 1/8", || {
            let (space, sys) = random::dense_system(64, 4, &half(), 7)?;
            let r = find_rich_intersection(&space, &sys, 2, &half()).map_err(CliError::runtime)?;
            Ok(match r.hit {
                Some((pair, m)) => (format!("sets {} measure {m}", join(&pair)), m >= BigRational::new(1.into(), 8.into())),
                None => ("no pair".into(), false),
            })
        }),
        check("intersect --random 64 4 1/2 7 --k 1", "first set", || {
            let (space, sys) = random::dense_system(64, 4, &half(), 7)?;
            let r = find_rich_intersection(&space, &sys, 1, &half()).map_err(CliError::runtime)?;
            Ok(match r.hit {
                Some((sets, m)) => (format!("set {} measure {m}", join(&sets)), sets == [0]),
                None => ("no set".into(), false),
            })
        }),
        check("dividing dyadic-equiv x = x / E(x,b) b-zero,b-last k=2 4:16", "drop witnessed by b-last", || {
            let fam = load_family("dyadic-equiv")?;
            let ladder = load_ladder(&fam, "4:16")?;
            let r = drop_report(&fam, ("x = x", "none"), "E(x,b)", "b-zero,b-last", &ladder, "x", &DropOptions::default())?;
            let pass = r.drop_scheme.as_deref() == Some("b-last") && r.inconsistency.consistent_at.is_empty();
            Ok((r.finding.clone(), pass))
        }),
        check("dividing circular-3n witness sequence n=8,100,1000 k=2", "2-inconsistent at every n", || {
            let fam = load_family("circular-3n")?;
            let rows = witness_rows(&fam, &load_ladder(&fam, "8,100,1000")?, 2, None)?;
            let shown: Vec<String> = rows
                .iter()
                .map(|r| format!("n={}:{}", r["index"], if r["inconsistent"] == true { "inconsistent" } else { "consistent" }))
                .collect();
            Ok((shown.join(" "), rows.iter().all(|r| r["inconsistent"] == true)))
        }),
        check("cover circular-3n n=5 x = x by arcs and endpoints", "covered (15 elements), every disjunct needed", || {
            let r = cover_report("circular-3n", 5, "x = x", &[], true, "x")?;
            let needed = r["necessary"].as_array().is_some_and(|a| a.iter().all(|v| v == true));
            Ok((
                format!("covered={} size={} all-needed={needed}", r["covered"], r["target_size"]),
                r["covered"] == true && r["target_size"] == 15 && needed,
            ))
        }),
        check("asymfit prime-field exists y. y*y + y1 = x primes:11..199", "one mu within 0.05 of 1/2, residual <= 2", || {
            let fam = load_family("prime-field")?;
            let ladder = load_ladder(&fam, "primes:11..199")?;
            let f = fit(&fam, "exists y. y*y + y1 = x", &ladder, "x", &FitConfig::default())?;
            let mu = f.measures();
            Ok((
                format!("E=[{}] residual={:.4}", mu.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(","), f.residual_constant),
                mu.len() == 1 && (mu[0] - 0.5).abs() <= 0.05 && f.residual_constant <= 2.0,
            ))
        }),
        check("asymfit cyclic-group x + y1 = y2 primes:11..199", "E empty, C_b = 1", || {
            let fam = load_family("cyclic-group")?;
            let ladder = load_ladder(&fam, "primes:11..199")?;
            let f = fit(&fam, "x + y1 = y2", &ladder, "x", &FitConfig::default())?;
            Ok((
                format!("E={} C_b={} unclassified={}", f.clusters.len(), f.c_bound, f.unclassified),
                f.clusters.is_empty() && f.c_bound == 1 && f.unclassified == 0,
            ))
        }),
        check("twovalue cyclic-group x = y1, !(x = y1), x = x", "ZERO FULL FULL, no violations", || {
            let fam = load_family("cyclic-group")?;
            let entries = ["x = y1@zero", "!(x = y1)@zero", "x = x"].map(String::from);
            let r = two_value(&fam, &entries, &load_ladder(&fam, "primes:11..199")?, "x", &TwoValueConfig::default())?;
            let classes: Vec<TwoValueClass> = r.entries.iter().map(|e| e.class).collect();
            Ok((
                format!("{} violations={}", join(&classes.iter().map(|&c| label(c)).collect::<Vec<_>>()), r.violations),
                classes == [TwoValueClass::Zero, TwoValueClass::Full, TwoValueClass::Full] && r.violations == 0,
            ))
        }),
        check("twovalue prime-field exists y. y*y = x", "FULL", || {
            let fam = load_family("prime-field")?;
            let entries = ["exists y. y*y = x".to_string()];
            let r = two_value(&fam, &entries, &load_ladder(&fam, "primes:11..199")?, "x", &TwoValueConfig::default())?;
            Ok((label(r.entries[0].class), r.entries[0].class == TwoValueClass::Full && r.violations == 0))
        }),
        check("twovalue linear-order x < a with a = floor(n^0.5)", "VIOLATION", || {
            let fam = load_family("linear-order")?;
            let entries = ["x < a@floor(n^0.5)".to_string()];
            let r = two_value(&fam, &entries, &load_ladder(&fam, "geo:100..1000000")?, "x", &TwoValueConfig::default())?;
            Ok((label(r.entries[0].class), r.violations >= 1))
        }),
    ]
}

pub fn run(emit: Emit) -> Result<Output, CliError> {
    let checks = checks();
    let mismatches = checks.iter().filter(|c| !c.pass).count();
    let text = match emit {
        Emit::Csv => {
            let mut out = String::from("check,expected,observed,status\n");
            for c in &checks {
                let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    quote(c.name),
                    quote(c.expected),
                    quote(&c.observed),
                    if c.pass { "match" } else { "MISMATCH" }
                );
            }
            out
        }
        Emit::Json => {
            let rows: Vec<_> = checks
                .iter()
                .map(|c| json!({"check": c.name, "expected": c.expected, "observed": c.observed, "match": c.pass}))
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({"checks": rows, "mismatches": mismatches})).expect("serializes");
            s.push('\n');
            s
        }
    };
    Ok(Output { text, mismatches })
}
