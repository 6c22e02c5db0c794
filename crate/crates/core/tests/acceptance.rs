//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pfdim_core::asymclass::{
    fit_condition_one, parameter_counts, two_value_check, FitConfig, TwoValueClass, TwoValueConfig,
};
use pfdim_core::dimension::{
    compare_profiles, fiber_bound_check, union_bound_check, GapConfig, VerdictKind,
};
use pfdim_core::dividing::{
    check_k_inconsistent, circular_cover_disjuncts, circular_witness_cap, circular_witness_family,
    circular_witness_sequence, log_step, Consistency,
};
use pfdim_core::eval::{satisfies, sweep_counts, verify_cover, Assignment};
use pfdim_core::logic::{parse_formula, Formula};
use pfdim_core::measure::{
    binomial_gap, find_rich_intersection, inclusion_exclusion_tail, pair_guarantee_size,
    MeasureSpace, SetSystem,
};
use pfdim_core::scheme::parse_ladder;
use pfdim_core::structures::{build_circular_3n, family};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 20_240_611;

struct Outcome {
    pass: bool,
    /// Deterministic summary; compared byte-for-byte across worker counts.
    report: String,
}

fn outcome(pass: bool, report: String) -> Outcome {
    Outcome { pass, report }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---------------------------------------------------------------- 1 ----

/// Non-decreasing sequences of membership patterns (`< 2^sets`) of the
/// given length: one uniform system per configuration of atom sizes.
fn pattern_multisets(patterns: u8, len: usize) -> Vec<Vec<u8>> {
    fn go(patterns: u8, len: usize, lo: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for p in lo..patterns {
            cur.push(p);
            go(patterns, len, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(patterns, len, 0, &mut Vec::new(), &mut out);
    out
}

fn sets_from_patterns(patterns: &[u8], n_sets: usize) -> Vec<Vec<usize>> {
    (0..n_sets)
        .map(|i| (0..patterns.len()).filter(|&p| patterns[p] >> i & 1 == 1).collect())
        .collect()
}

/// Checks every odd-start tail; returns `(tails checked, violations, least tail)`.
fn odd_tails(space: &MeasureSpace, sets: &[Vec<usize>]) -> (u64, u64, BigRational) {
    let sys = SetSystem::new(space.points(), sets).expect("valid system");
    let mut checked = 0;
    let mut bad = 0;
    let mut least = BigRational::one();
    for start in (1..=sets.len()).step_by(2) {
        let t = inclusion_exclusion_tail(space, &sys, start).expect("tail");
        checked += 1;
        if t.is_negative() {
            bad += 1;
        }
        if t < least {
            least = t;
        }
    }
    (checked, bad, least)
}

fn merge(a: (u64, u64, BigRational), b: (u64, u64, BigRational)) -> (u64, u64, BigRational) {
    (a.0 + b.0, a.1 + b.1, if b.2 < a.2 { b.2 } else { a.2 })
}

fn criterion_1() -> Outcome {
    let mut report = String::new();
    let mut pass = true;

    // Exhaustive: {0,1} weights. Zero-weight points never change a tail,
    // so these are uniform systems on the support, and relabelling points
    // changes nothing either: every system is fixed by how many points fall
    // in each atom. Enumerate all such atom-size configurations.
    let plan: [(usize, usize); 6] = [(1, 8), (2, 8), (3, 8), (4, 8), (5, 5), (6, 4)];
    let mut systems = 0u64;
    let mut total = (0u64, 0u64, BigRational::one());
    for (n_sets, max_points) in plan {
        for m in 1..=max_points {
            let space = MeasureSpace::uniform(m).unwrap();
            let configs = pattern_multisets(1 << n_sets, m);
            systems += configs.len() as u64;
            let part = configs
                .par_iter()
                .map(|c| odd_tails(&space, &sets_from_patterns(c, n_sets)))
                .reduce(|| (0, 0, BigRational::one()), merge);
            total = merge(total, part);
        }
    }
    pass &= total.1 == 0;
    writeln!(
        report,
        "exhaustive {{0,1}}: systems={systems} tails={} negative={} least={}",
        total.0, total.1, total.2
    )
    .unwrap();

    // Randomised: rational weights from integer masses (zeros allowed),
    // up to 12 points and 6 sets; then {0,1} weights on 8 points.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut cases = Vec::with_capacity(20_000);
    for i in 0..20_000 {
        let m = if i < 10_000 { rng.gen_range(1..=12) } else { 8 };
        let n_sets = rng.gen_range(1..=6);
        let masses: Vec<u64> = loop {
            let w: Vec<u64> = if i < 10_000 {
                (0..m).map(|_| rng.gen_range(0..=10)).collect()
            } else {
                (0..m).map(|_| rng.gen_range(0..=1)).collect()
            };
            if w.iter().any(|&x| x > 0) {
                break w;
            }
        };
        let sets: Vec<Vec<usize>> = (0..n_sets)
            .map(|_| (0..m).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        cases.push((masses, sets));
    }
    let rational = cases[..10_000]
        .par_iter()
        .map(|(w, s)| odd_tails(&MeasureSpace::from_masses(w).unwrap(), s))
        .reduce(|| (0, 0, BigRational::one()), merge);
    let binary = cases[10_000..]
        .par_iter()
        .map(|(w, s)| odd_tails(&MeasureSpace::from_masses(w).unwrap(), s))
        .reduce(|| (0, 0, BigRational::one()), merge);
    pass &= rational.1 == 0 && binary.1 == 0;
    writeln!(
        report,
        "random rational: systems=10000 tails={} negative={} least={}",
        rational.0, rational.1, rational.2
    )
    .unwrap();
    write!(
        report,
        "random {{0,1}} on 8 points: systems=10000 tails={} negative={} least={}",
        binary.0, binary.1, binary.2
    )
    .unwrap();
    outcome(pass, report)
}

// ---------------------------------------------------------------- 2 ----

fn criterion_2() -> Outcome {
    let mut pairs = 0;
    let mut bad = Vec::new();
    let mut zeros = 0;
    for m in 1..=60u64 {
        for i in 0..m {
            if 2 * i + 1 > m {
                break;
            }
            pairs += 1;
            let g = binomial_gap(m, i).unwrap();
            if g.is_positive() {
                bad.push((m, i));
            }
            if g.is_zero() {
                zeros += 1;
            }
        }
    }
    // Equality exactly on the diagonal m = 2i + 1.
    let pass = bad.is_empty() && zeros == 30;
    outcome(pass, format!("pairs={pairs} positive={} zero={zeros}", bad.len()))
}

// ---------------------------------------------------------------- 3 ----

fn criterion_3() -> Outcome {
    let mut report = String::new();
    let mut pass = true;
    for (d, expected_n) in [(2, 4u64), (3, 9), (4, 16)] {
        let eps = q(1, d);
        let n = pair_guarantee_size(&eps).unwrap();
        // floor(1/ε² + 1/2) = floor(d² + 1/2) = d².
        pass &= n == expected_n;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ d as u64);
        let trials: Vec<(Vec<u64>, Vec<Vec<usize>>)> = (0..10_000)
            .map(|t| {
                let m = rng.gen_range(2 * d as usize..=64);
                let masses: Vec<u64> = if t % 2 == 0 {
                    vec![1; m]
                } else {
                    (0..m).map(|_| rng.gen_range(1..=20)).collect()
                };
                let total: u64 = masses.iter().sum();
                let sets = (0..n)
                    .map(|_| {
                        let mut order: Vec<usize> = (0..m).collect();
                        order.shuffle(&mut rng);
                        let mut set = Vec::new();
                        let mut mass = 0;
                        for p in order {
                            // mass / total ≥ 1/d  ⇔  d·mass ≥ total
                            if d as u64 * mass < total || rng.gen_bool(0.1) {
                                mass += masses[p];
                                set.push(p);
                            }
                        }
                        set.sort_unstable();
                        set
                    })
                    .collect();
                (masses, sets)
            })
            .collect();
        let threshold = eps.clone() * &eps * &eps;
        let (found, verified) = trials
            .par_iter()
            .map(|(masses, sets)| {
                let space = MeasureSpace::from_masses(masses).unwrap();
                let sys = SetSystem::new(masses.len(), sets).unwrap();
                let r = find_rich_intersection(&space, &sys, 2, &eps).unwrap();
                let Some((pair, m)) = r.hit else { return (0u32, 0u32) };
                // Independent check of the reported pair.
                let total: u64 = masses.iter().sum();
                let a: BTreeSet<usize> = sets[pair[0]].iter().copied().collect();
                let common: u64 = sets[pair[1]].iter().filter(|p| a.contains(p)).map(|&p| masses[p]).sum();
                let direct = q(common as i64, total as i64);
                (1, u32::from(direct == m && direct >= threshold))
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        pass &= found == 10_000 && verified == 10_000;
        writeln!(report, "eps=1/{d} N={n}: found={found}/10000 verified={verified}").unwrap();
    }
    outcome(pass, report.trim_end().to_string())
}

// ---------------------------------------------------------------- 4 ----

fn criterion_4() -> Outcome {
    let fam = family("dyadic-equiv").unwrap();
    let sig = fam.signature();
    let indices: Vec<usize> = (4..=16).collect();
    let class = parse_formula("E(x, b)", sig).unwrap();
    let all = parse_formula("x = x", sig).unwrap();
    let universe = sweep_counts(&fam, &all, "x", "none", &indices).unwrap();
    let zero = sweep_counts(&fam, &class, "x", "b-zero", &indices).unwrap();
    let last = sweep_counts(&fam, &class, "x", "b-last", &indices).unwrap();

    // Class sizes straight from the construction: [0, 2^(n-1)) and
    // [2^n − 4, 2^n] inside [0, 2^n].
    let counts_ok = indices.iter().enumerate().all(|(i, &n)| {
        universe.rows[i].count == (1 << n) + 1
            && zero.rows[i].count == 1 << (n - 1)
            && last.rows[i].count == 5
    });

    let cfg = GapConfig::default();
    let eq = compare_profiles(&zero, &universe, &cfg).unwrap();
    let lt = compare_profiles(&last, &universe, &cfg).unwrap();
    let ln2 = std::f64::consts::LN_2;
    let gaps: Vec<f64> = zero
        .rows
        .iter()
        .zip(&universe.rows)
        .map(|(a, b)| (b.count as f64 / a.count as f64).ln())
        .collect();
    let band = gaps.iter().all(|&g| (ln2..=ln2 + 0.07).contains(&g));
    let slope = lt.slope.unwrap_or(f64::NAN);
    let tail = lt.min_tail_gap.unwrap_or(f64::NAN);
    let pass = counts_ok
        && eq.kind == VerdictKind::Equal
        && band
        && lt.kind == VerdictKind::StrictlyLess
        && slope >= 0.6
        && tail >= 3.0;
    outcome(
        pass,
        format!(
            "class-of-0 vs universe: {} gaps in [{:.6}, {:.6}]; last class vs universe: {} slope={:.6} min_tail_gap={:.6}; counts={}",
            eq.kind.as_str(),
            gaps.iter().copied().fold(f64::INFINITY, f64::min),
            gaps.iter().copied().fold(0.0, f64::max),
            lt.kind.as_str(),
            slope,
            tail,
            if counts_ok { "match" } else { "MISMATCH" },
        ),
    )
}

// ---------------------------------------------------------------- 5 ----

fn criterion_5() -> Outcome {
    let mut report = String::new();
    let mut pass = true;
    for n in [8usize, 100, 1000] {
        let m = build_circular_3n(n).unwrap();
        let cap = circular_witness_cap(n);
        let fam = circular_witness_family(&m, n, cap).unwrap();
        let verdict = check_k_inconsistent(&fam, 2).unwrap();
        // Oracle: instance i is the open arc (a_i, b_i) of length s; the
        // arcs are consecutive, so their interiors are pairwise disjoint.
        let s = log_step(n);
        let arcs: Vec<BTreeSet<usize>> = circular_witness_sequence(n, cap)
            .unwrap()
            .iter()
            .map(|&(a, _)| (1..s).map(|d| (a + d) % (3 * n)).collect())
            .collect();
        let sets = fam.solution_sets().unwrap();
        let sets_ok = sets
            .iter()
            .zip(&arcs)
            .all(|(got, want)| got.iter().collect::<BTreeSet<_>>() == *want && !want.is_empty());
        let disjoint = (0..arcs.len())
            .all(|i| (i + 1..arcs.len()).all(|j| arcs[i].is_disjoint(&arcs[j])));
        let ok = matches!(verdict, Consistency::Inconsistent) && sets_ok && disjoint;
        pass &= ok;
        writeln!(
            report,
            "n={n}: instances={cap} step={s} 2-inconsistent={} oracle={}",
            matches!(verdict, Consistency::Inconsistent),
            sets_ok && disjoint
        )
        .unwrap();
    }

    let m = build_circular_3n(5).unwrap();
    let target = parse_formula("x = x", m.signature()).unwrap();
    let parts = circular_cover_disjuncts(&m, 5).unwrap();
    let full = verify_cover(&m, &target, &parts, "x").unwrap();
    let mut cover_ok = full.covered && full.target_size == 15;
    let mut dropped = Vec::new();
    for skip in 0..parts.len() {
        let rest: Vec<Formula> = parts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, f)| f.clone())
            .collect();
        let check = verify_cover(&m, &target, &rest, "x").unwrap();
        // The witness must really escape every remaining disjunct.
        let escapes = check.witness.is_some_and(|w| {
            let a: Assignment = BTreeMap::from([("x".to_string(), w)]);
            rest.iter().all(|f| !satisfies(&m, f, &a).unwrap())
        });
        cover_ok &= !check.covered && escapes;
        dropped.push(check.witness.map_or("-".to_string(), |w| w.to_string()));
    }
    pass &= cover_ok;
    write!(
        report,
        "cover n=5: covered={} size={} witnesses without each disjunct=[{}]",
        full.covered,
        full.target_size,
        dropped.join(",")
    )
    .unwrap();
    outcome(pass, report)
}

// ---------------------------------------------------------------- 6 ----

fn ols(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn criterion_6() -> Outcome {
    let fam = family("linear-order").unwrap();
    let phi = parse_formula("x < a", fam.signature()).unwrap();
    let ladder = parse_ladder("geo:100..1000000").unwrap();
    let px = sweep_counts(&fam, &phi, "x", "floor(n^0.3)", &ladder).unwrap();
    let py = sweep_counts(&fam, &phi, "x", "floor(n^0.7)", &ladder).unwrap();
    let v = compare_profiles(&px, &py, &GapConfig::default()).unwrap();
    // Oracle: |x < a| = a = floor(n^α) with element i standing for i + 1.
    let floor_pow = |n: usize, a: f64| (n as f64).powf(a).floor() as u64;
    let counts_ok = ladder.iter().enumerate().all(|(i, &n)| {
        px.rows[i].count == floor_pow(n, 0.3) && py.rows[i].count == floor_pow(n, 0.7)
    });
    let xs: Vec<f64> = ladder.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = ladder
        .iter()
        .map(|&n| (floor_pow(n, 0.7) as f64 / floor_pow(n, 0.3) as f64).ln())
        .collect();
    let oracle_slope = ols(&xs, &ys);
    let slope = v.slope.unwrap_or(f64::NAN);
    let pass = v.kind == VerdictKind::StrictlyLess
        && (slope - 0.4).abs() <= 0.05
        && (slope - oracle_slope).abs() < 1e-9
        && counts_ok;
    outcome(
        pass,
        format!(
            "indices={} verdict={} slope={slope:.6} oracle_slope={oracle_slope:.6} counts={}",
            ladder.len(),
            v.kind.as_str(),
            if counts_ok { "match" } else { "MISMATCH" }
        ),
    )
}

// ---------------------------------------------------------------- 7 ----

fn criterion_7() -> Outcome {
    use common::{build, fuzz_signature, random_formula, random_raw, ref_holds, ref_set};
    let sig = fuzz_signature();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let cases: Vec<_> = (0..1000)
        .map(|_| {
            let n = rng.gen_range(1..=12);
            let raw = random_raw(&mut rng, &sig, n);
            let f = random_formula(&mut rng, &["x", "y"], 2);
            let g = random_formula(&mut rng, &["x", "y"], 2);
            let h = random_formula(&mut rng, &["x", "y"], 2);
            let y = rng.gen_range(0..n);
            let keep = if rng.gen_bool(0.5) { "x" } else { "y" };
            (raw, f, g, h, y, keep)
        })
        .collect();
    let results: Vec<(bool, bool, bool)> = cases
        .par_iter()
        .map(|(raw, f, g, h, y, keep)| {
            let m = build(&sig, raw);
            let params: Assignment = BTreeMap::from([("y".to_string(), *y)]);
            let u = union_bound_check(&m, f, g, "x", &params).unwrap();
            let sf = ref_set(raw, f, "x", &params);
            let sg = ref_set(raw, g, "x", &params);
            let union = sf.union(&sg).count() as u64;
            let union_oracle = u.count_f == sf.len() as u64
                && u.count_g == sg.len() as u64
                && u.count_union == union;
            let union_holds = u.holds && union <= 2 * (sf.len().max(sg.len()) as u64);

            let fb = fiber_bound_check(&m, h, &["x", "y"], &[*keep], &Assignment::new()).unwrap();
            let mut fibers: BTreeMap<usize, u64> = BTreeMap::new();
            for a in 0..raw.n {
                for b in 0..raw.n {
                    let asg = BTreeMap::from([("x".to_string(), a), ("y".to_string(), b)]);
                    if ref_holds(raw, h, &asg) {
                        *fibers.entry(if *keep == "x" { a } else { b }).or_default() += 1;
                    }
                }
            }
            let total: u64 = fibers.values().sum();
            let max_fiber = fibers.values().copied().max().unwrap_or(0);
            let fiber_oracle =
                fb.total == total && fb.image == fibers.len() as u64 && fb.max_fiber == max_fiber;
            let fiber_holds = fb.holds && total <= fibers.len() as u64 * max_fiber;
            (union_holds && fb.holds == fiber_holds, union_oracle && fiber_oracle, fiber_holds)
        })
        .collect();
    let union_viol = results.iter().filter(|r| !r.0).count();
    let fiber_viol = results.iter().filter(|r| !r.2).count();
    let oracle_miss = results.iter().filter(|r| !r.1).count();
    let pass = union_viol == 0 && fiber_viol == 0 && oracle_miss == 0;
    outcome(
        pass,
        format!(
            "union cases=1000 violations={union_viol}; fiber cases=1000 violations={fiber_viol}; oracle mismatches={oracle_miss}"
        ),
    )
}

// ---------------------------------------------------------------- 8 ----

fn criterion_8() -> Outcome {
    let mut report = String::new();
    let primes = parse_ladder("primes:11..199").unwrap();

    let pf = family("prime-field").unwrap();
    let phi = parse_formula("exists y. y*y + y1 = x", pf.signature()).unwrap();
    let fit = fit_condition_one(&pf, &phi, "x", &primes, &FitConfig::default()).unwrap();
    // Oracle: x − y1 ranges over the squares, of which there are (p+1)/2.
    let oracle_ok = primes.iter().all(|&p| {
        let squares: BTreeSet<usize> = (0..p).map(|y| y * y % p).collect();
        let m = pf.generate(p).unwrap();
        let counts = parameter_counts(&m, &phi, "x", &["y1".to_string()]).unwrap();
        squares.len() == p.div_ceil(2) && counts.iter().all(|&c| c as usize == squares.len())
    });
    let mu = fit.measures();
    let squares_ok = mu.len() == 1
        && (mu[0] - 0.5).abs() <= 0.05
        && fit.residual_constant <= 2.0
        && fit.unclassified == 0
        && oracle_ok;
    writeln!(
        report,
        "prime-field squares: E=[{}] residual={:.6} unclassified={} oracle={}",
        mu.iter().map(|m| format!("{m:.6}")).collect::<Vec<_>>().join(","),
        fit.residual_constant,
        fit.unclassified,
        oracle_ok
    )
    .unwrap();

    let cyc = family("cyclic-group").unwrap();
    let sum = parse_formula("x + y1 = y2", cyc.signature()).unwrap();
    let fit = fit_condition_one(&cyc, &sum, "x", &primes, &FitConfig::default()).unwrap();
    let cyclic_ok = fit.clusters.is_empty() && fit.c_bound == 1 && fit.unclassified == 0;
    writeln!(
        report,
        "cyclic-group x+y1=y2: E={} C_b={} unclassified={}",
        fit.clusters.len(),
        fit.c_bound,
        fit.unclassified
    )
    .unwrap();

    let cfg = TwoValueConfig::default();
    let entries = |sig, list: &[(&str, &str)]| -> Vec<(Formula, String)> {
        list.iter()
            .map(|(f, s)| (parse_formula(f, sig).unwrap(), s.to_string()))
            .collect()
    };
    let cyc_list = entries(
        cyc.signature(),
        &[("x = y1", "zero"), ("!(x = y1)", "zero"), ("x = x", "none")],
    );
    let cyc_two = two_value_check(&cyc, &cyc_list, "x", &primes, &cfg).unwrap();
    let pf_list = entries(
        pf.signature(),
        &[("exists y. y*y = x", "none"), ("x = 0", "none"), ("!(exists y. y*y = x)", "none")],
    );
    let pf_two = two_value_check(&pf, &pf_list, "x", &primes, &cfg).unwrap();
    let lo = family("linear-order").unwrap();
    let lo_list = entries(lo.signature(), &[("x < a", "floor(n^0.5)")]);
    let lo_two = two_value_check(&lo, &lo_list, "x", &parse_ladder("geo:100..1000000").unwrap(), &cfg)
        .unwrap();
    let classes = |r: &pfdim_core::asymclass::TwoValueReport| {
        r.entries
            .iter()
            .map(|e| format!("{:?}", e.class).to_uppercase())
            .collect::<Vec<_>>()
            .join(",")
    };
    let cyc_expected = [TwoValueClass::Zero, TwoValueClass::Full, TwoValueClass::Full];
    let two_ok = cyc_two.violations == 0
        && cyc_two.entries.iter().map(|e| e.class).eq(cyc_expected)
        && pf_two.violations == 0
        && pf_two.entries[0].class == TwoValueClass::Full
        && lo_two.violations >= 1;
    write!(
        report,
        "two-value: cyclic-group [{}] violations={}; prime-field [{}] violations={}; linear-order sqrt [{}] violations={}",
        classes(&cyc_two),
        cyc_two.violations,
        classes(&pf_two),
        pf_two.violations,
        classes(&lo_two),
        lo_two.violations
    )
    .unwrap();
    outcome(squares_ok && cyclic_ok && two_ok, report)
}

// ---------------------------------------------------------------- 9 ----

type Criterion = fn() -> Outcome;

const CRITERIA: [(u32, &str, Criterion, u64); 8] = [
    (1, "truncated inclusion-exclusion tails are non-negative", criterion_1, 60),
    (2, "binomial lemma", criterion_2, 1),
    (3, "pair guarantee", criterion_3, 60),
    (4, "dyadic equivalence example", criterion_4, 10),
    (5, "circular order example", criterion_5, 30),
    (6, "linear-order separation", criterion_6, 5),
    (7, "quasidimension finite axioms", criterion_7, 60),
    (8, "asymptotic-class suite", criterion_8, 120),
];

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(f)
}

fn criterion_9(first: &[String]) -> Outcome {
    let rerun: Vec<String> = with_workers(1, || CRITERIA.iter().map(|c| (c.2)().report).collect());
    let differing: Vec<u32> = CRITERIA
        .iter()
        .zip(first.iter().zip(&rerun))
        .filter(|(_, (a, b))| a != b)
        .map(|(c, _)| c.0)
        .collect();
    outcome(
        differing.is_empty(),
        format!("criteria 1-8 rerun with 1 worker vs 4 workers: differing={differing:?}"),
    )
}

fn main() {
    // Respect a name filter so `cargo test <name>` in other targets skips
    // this suite quickly.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if args.iter().any(|a| !"acceptance".contains(a.as_str())) {
        return;
    }
    let mut failures = 0;
    let mut reports = Vec::new();
    with_workers(4, || {
        for (id, name, run, limit) in CRITERIA {
            let start = Instant::now();
            let out = run();
            let took = start.elapsed();
            let in_time = took < Duration::from_secs(limit);
            let pass = out.pass && in_time;
            failures += usize::from(!pass);
            println!(
                "criterion {id}: {} - {name} ({:.2}s, limit {limit}s)",
                if pass { "PASS" } else { "FAIL" },
                took.as_secs_f64()
            );
            for line in out.report.lines() {
                println!("    {line}");
            }
            reports.push(out.report);
        }
    });
    let start = Instant::now();
    let out = criterion_9(&reports);
    println!(
        "criterion 9: {} - determinism across worker counts ({:.2}s)",
        if out.pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    println!("    {}", out.report);
    failures += usize::from(!out.pass);
    if failures > 0 {
        println!("acceptance: {failures} criterion/criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 9 criteria passed");
}
