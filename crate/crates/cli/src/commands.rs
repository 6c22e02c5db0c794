use std::fmt::Write as _;
use std::path::Path;

use num_rational::BigRational;
use pfdim_core::asymclass::{fit_condition_one, two_value_check, FitConfig, TwoValueConfig};
use pfdim_core::dimension::{compare_profiles, gap_sequence, GapConfig};
use pfdim_core::dividing::{
    check_k_inconsistent, circular_cover_disjuncts, circular_witness_cap, circular_witness_family,
    dividing_drop_report, log_step, Consistency, DropOptions,
};
use pfdim_core::eval::{count_solutions, parameter_variables, sweep_counts, verify_cover, Assignment, GrowthProfile};
use pfdim_core::logic::{parse_formula, Formula, Signature};
use pfdim_core::measure::{
    find_rich_intersection, inclusion_exclusion_tail, load_set_system, parse_weight, s_k,
    MeasureSpace, PointSet, SetSystem,
};
use pfdim_core::scheme::parse_ladder;
use pfdim_core::structures::{
    family, load_structure, FamilyKind, FiniteStructure, StructureFamily, StructureFile,
};
use serde_json::{json, Value};

use crate::{random, reproduce, Cli, CliError, Command, Emit, GapArgs, Output, SourceArgs, SystemArgs};

type Result<T> = std::result::Result<T, CliError>;

pub fn dispatch(cli: &Cli) -> Result<Output> {
    let emit = |default| cli.emit.unwrap_or(default);
    match &cli.command {
        Command::Count { source, index, formula, vars, scheme, params } => {
            cmd_count(source, *index, formula, vars, scheme, params, emit(Emit::Csv)).map(Output::from)
        }
        Command::Sweep { family, formula, scheme, indices, var } => {
            cmd_sweep(family, formula, scheme, indices, var, emit(Emit::Csv)).map(Output::from)
        }
        Command::Gap { family, x, scheme_x, y, scheme_y, indices, var, gap } => {
            let fam = load_family(family)?;
            let ladder = load_ladder(&fam, indices)?;
            let cfg = gap_config(gap)?;
            cmd_gap(&fam, (x, scheme_x), (y, scheme_y), &ladder, var, &cfg, emit(Emit::Json)).map(Output::from)
        }
        Command::Inclexcl { system, start } => {
            let (space, sys, _) = load_system(system, cli.seed)?;
            cmd_inclexcl(&space, &sys, *start, emit(Emit::Json)).map(Output::from)
        }
        Command::Intersect { system, k, eps } => {
            let (space, sys, generated_eps) = load_system(system, cli.seed)?;
            let eps = match (eps, generated_eps) {
                (Some(text), _) => parse_weight(text).map_err(CliError::config)?,
                (None, Some(e)) => e,
                (None, None) => return Err(CliError::Config("--eps is required with --file".into())),
            };
            cmd_intersect(&space, &sys, *k, &eps, emit(Emit::Json)).map(Output::from)
        }
        Command::Dividing {
            family,
            baseline,
            baseline_scheme,
            phi,
            schemes,
            k,
            indices,
            diagram_depth,
            var,
            witness,
            count,
            gap,
        } => {
            let fam = load_family(family)?;
            let ladder = load_ladder(&fam, indices)?;
            if *witness {
                return cmd_witness(&fam, &ladder, *k, *count, emit(Emit::Json)).map(Output::from);
            }
            let missing = |what: &str| CliError::Config(format!("--{what} is required unless --witness is given"));
            let baseline = baseline.as_deref().ok_or_else(|| missing("baseline"))?;
            let phi = phi.as_deref().ok_or_else(|| missing("phi"))?;
            let schemes = schemes.as_deref().ok_or_else(|| missing("schemes"))?;
            let opts = DropOptions {
                k: *k,
                gap: gap_config(gap)?,
                diagram_depth: *diagram_depth,
            };
            cmd_dividing(&fam, (baseline, baseline_scheme), phi, schemes, &ladder, var, &opts, emit(Emit::Json))
                .map(Output::from)
        }
        Command::Cover { family, index, target, disjuncts, paper_cover, var } => {
            cmd_cover(family, *index, target, disjuncts, *paper_cover, var, emit(Emit::Json)).map(Output::from)
        }
        Command::Asymfit { family, formula, indices, var, c_bound, gap, radius, budget } => {
            let fam = load_family(family)?;
            let ladder = load_ladder(&fam, indices)?;
            let cfg = FitConfig {
                c_bound: *c_bound,
                gap: *gap,
                radius: *radius,
                budget: *budget,
            };
            cmd_asymfit(&fam, formula, &ladder, var, &cfg, emit(Emit::Json)).map(Output::from)
        }
        Command::Twovalue { family, entries, indices, var, c_bound, gap } => {
            let fam = load_family(family)?;
            let ladder = load_ladder(&fam, indices)?;
            let cfg = TwoValueConfig {
                c_bound: *c_bound,
                gap: gap_config(gap)?,
            };
            cmd_twovalue(&fam, entries, &ladder, var, &cfg, emit(Emit::Json)).map(Output::from)
        }
        Command::Reproduce => reproduce::run(emit(Emit::Csv)),
    }
}

// ---- input plumbing -------------------------------------------------------

pub fn load_family(name: &str) -> Result<StructureFamily> {
    family(name).map_err(CliError::config)
}

pub fn load_ladder(fam: &StructureFamily, text: &str) -> Result<Vec<usize>> {
    let ladder = parse_ladder(text).map_err(CliError::config)?;
    if let Some(bad) = ladder.iter().find(|&&n| !fam.is_valid_index(n)) {
        return Err(CliError::Config(format!(
            "index {bad} is not valid for family `{}`",
            fam.name()
        )));
    }
    Ok(ladder)
}

pub fn load_formula(text: &str, sig: &Signature) -> Result<Formula> {
    parse_formula(text, sig).map_err(|e| CliError::Config(format!("formula `{text}`: {e}")))
}

/// Resolves a scheme and checks it supplies one element per parameter.
fn check_scheme(fam: &StructureFamily, f: &Formula, x: &str, spec: &str) -> Result<()> {
    let scheme = fam.resolve_scheme(spec).map_err(CliError::config)?;
    let params = parameter_variables(f, x);
    if scheme.len() != params.len() {
        return Err(CliError::Config(format!(
            "scheme `{spec}` gives {} element(s), formula `{f}` has parameter(s) [{}]",
            scheme.len(),
            params.join(", ")
        )));
    }
    Ok(())
}

pub fn gap_config(args: &GapArgs) -> Result<GapConfig> {
    let mut cfg = GapConfig::default();
    if let Some(t) = args.slope_threshold {
        cfg.slope_threshold = t;
    }
    if let Some(t) = args.divergence_threshold {
        cfg.divergence_threshold = t;
    }
    if let Some(s) = args.min_samples {
        cfg.min_samples = s;
    }
    cfg.validate().map_err(CliError::config)?;
    Ok(cfg)
}

/// Reads a structure file, taking relation arities from the first tuple.
fn load_structure_file(path: &Path) -> Result<FiniteStructure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let file: StructureFile = serde_json::from_str(&text).map_err(CliError::config)?;
    let mut relations = Vec::new();
    for (name, tuples) in &file.relations {
        let arity = tuples.first().map(Vec::len).ok_or_else(|| {
            CliError::Config(format!("relation `{name}` is empty, its arity cannot be inferred"))
        })?;
        relations.push((name.clone(), arity));
    }
    let functions = file.functions.iter().map(|(n, f)| (n.clone(), f.arity)).collect();
    let constants = file.constants.keys().cloned().collect();
    let sig = Signature::new(relations, functions, constants).map_err(CliError::config)?;
    load_structure(&text, &sig).map_err(CliError::config)
}

/// `(space, system, ε used by the generator)`.
fn load_system(args: &SystemArgs, default_seed: u64) -> Result<(MeasureSpace, SetSystem, Option<BigRational>)> {
    match (&args.file, &args.random) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let (space, sys) = load_set_system(&text).map_err(CliError::config)?;
            Ok((space, sys, None))
        }
        (None, Some(spec)) => {
            let num = |s: &str, what: &str| {
                s.parse::<u64>()
                    .map_err(|_| CliError::Config(format!("--random: {what} must be a non-negative integer, got `{s}`")))
            };
            let m = num(&spec[0], "M")? as usize;
            let n = num(&spec[1], "N")? as usize;
            let eps = parse_weight(&spec[2]).map_err(CliError::config)?;
            let seed = match spec.get(3) {
                Some(s) => num(s, "SEED")?,
                None => default_seed,
            };
            let (space, sys) = random::dense_system(m, n, &eps, seed)?;
            Ok((space, sys, Some(eps)))
        }
        (None, None) => Err(CliError::Config("give a set system with --file or --random".into())),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn f64_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

// ---- commands -------------------------------------------------------------

fn cmd_count(
    source: &SourceArgs,
    index: Option<usize>,
    formula: &str,
    vars: &str,
    scheme: &str,
    param_args: &[String],
    emit: Emit,
) -> Result<String> {
    let vars: Vec<&str> = vars.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    if vars.is_empty() {
        return Err(CliError::Config("--vars names no variable".into()));
    }
    let (m, f, params, family_name) = match (&source.family, &source.structure) {
        (Some(name), _) => {
            let fam = load_family(name)?;
            let n = index.ok_or_else(|| CliError::Config("--index is required with --family".into()))?;
            if !fam.is_valid_index(n) {
                return Err(CliError::Config(format!("index {n} is not valid for family `{name}`")));
            }
            let f = load_formula(formula, fam.signature())?;
            let free: Vec<String> = f
                .free_variables()
                .into_iter()
                .filter(|v| !vars.contains(&v.as_str()))
                .collect();
            let resolved = fam.resolve_scheme(scheme).map_err(CliError::config)?;
            if resolved.len() != free.len() {
                return Err(CliError::Config(format!(
                    "scheme `{scheme}` gives {} element(s), the formula has parameter(s) [{}]",
                    resolved.len(),
                    free.join(", ")
                )));
            }
            let values = fam.scheme_elements(&resolved, n).map_err(CliError::config)?;
            let params: Assignment = free.into_iter().zip(values).collect();
            (fam.generate(n).map_err(CliError::runtime)?, f, params, name.clone())
        }
        (None, Some(path)) => {
            let m = load_structure_file(path)?;
            let f = load_formula(formula, m.signature())?;
            let mut params = Assignment::new();
            for p in param_args {
                let (name, value) = p
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("--param expects name=element, got `{p}`")))?;
                let value = value
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("--param {name}: `{value}` is not an element")))?;
                params.insert(name.trim().to_string(), value);
            }
            (m, f, params, path.display().to_string())
        }
        (None, None) => return Err(CliError::Config("give --family or --structure".into())),
    };
    let count = count_solutions(&m, &f, &vars, &params).map_err(CliError::runtime)?;
    let index_text = index.map_or(String::new(), |n| n.to_string());
    Ok(match emit {
        Emit::Csv => format!("index,universe,count\n{index_text},{},{count}\n", m.universe_size()),
        Emit::Json => pretty(&json!({
            "source": family_name,
            "index": index,
            "formula": f.to_string(),
            "vars": vars,
            "params": params,
            "universe": m.universe_size(),
            "count": count,
        })),
    })
}

pub fn sweep(fam: &StructureFamily, formula: &str, scheme: &str, ladder: &[usize], var: &str) -> Result<GrowthProfile> {
    let f = load_formula(formula, fam.signature())?;
    check_scheme(fam, &f, var, scheme)?;
    sweep_counts(fam, &f, var, scheme, ladder).map_err(CliError::runtime)
}

fn cmd_sweep(family: &str, formula: &str, scheme: &str, indices: &str, var: &str, emit: Emit) -> Result<String> {
    let fam = load_family(family)?;
    let ladder = load_ladder(&fam, indices)?;
    let profile = sweep(&fam, formula, scheme, &ladder, var)?;
    Ok(match emit {
        Emit::Csv => profile.to_csv(),
        Emit::Json => pretty(&profile),
    })
}

pub fn cmd_gap(
    fam: &StructureFamily,
    x: (&str, &str),
    y: (&str, &str),
    ladder: &[usize],
    var: &str,
    cfg: &GapConfig,
    emit: Emit,
) -> Result<String> {
    let px = sweep(fam, x.0, x.1, ladder, var)?;
    let py = sweep(fam, y.0, y.1, ladder, var)?;
    let verdict = compare_profiles(&px, &py, cfg).map_err(CliError::runtime)?;
    Ok(match emit {
        Emit::Json => pretty(&verdict),
        Emit::Csv => {
            let gaps = gap_sequence(&px, &py).map_err(CliError::runtime)?;
            let mut out = String::from("index,count_x,count_y,gap,verdict\n");
            for g in gaps {
                let gap = g.gap.map_or(String::new(), |v| v.to_string());
                let _ = writeln!(out, "{},{},{},{gap},{}", g.index, g.count_x, g.count_y, verdict.kind.as_str());
            }
            out
        }
    })
}

pub fn tail_rows(space: &MeasureSpace, sys: &SetSystem, start: Option<usize>) -> Result<Vec<(usize, BigRational, bool)>> {
    let starts: Vec<usize> = match start {
        Some(s) => vec![s],
        None => (1..=sys.len()).collect(),
    };
    starts
        .into_iter()
        .map(|s| {
            let t = inclusion_exclusion_tail(space, sys, s).map_err(CliError::config)?;
            // Odd starts are bounded below by 0, even starts above.
            let zero = BigRational::from_integer(0.into());
            let ok = if s % 2 == 1 { t >= zero } else { t <= zero };
            Ok((s, t, ok))
        })
        .collect()
}

fn cmd_inclexcl(space: &MeasureSpace, sys: &SetSystem, start: Option<usize>, emit: Emit) -> Result<String> {
    let rows = tail_rows(space, sys, start)?;
    let float = |r: &BigRational| num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
    Ok(match emit {
        Emit::Csv => {
            let mut out = String::from("start,tail,approx,bonferroni_sign\n");
            for (s, t, ok) in &rows {
                let _ = writeln!(out, "{s},{t},{},{}", float(t), if *ok { "ok" } else { "violated" });
            }
            out
        }
        Emit::Json => {
            let s: Vec<String> = (1..=sys.len())
                .map(|k| s_k(space, sys, k).map(|v| v.to_string()))
                .collect::<std::result::Result<_, _>>()
                .map_err(CliError::runtime)?;
            let tails: Vec<Value> = rows
                .iter()
                .map(|(s, t, ok)| json!({"start": s, "tail": t.to_string(), "approx": f64_json(float(t)), "bonferroni_sign_ok": ok}))
                .collect();
            pretty(&json!({"points": space.points(), "sets": sys.len(), "s": s, "tails": tails}))
        }
    })
}

fn members(sys: &SetSystem, chosen: &[usize]) -> Vec<usize> {
    let mut acc = PointSet::full(sys.points());
    for &i in chosen {
        acc.intersect_with(sys.set(i));
    }
    acc.iter().collect()
}

fn cmd_intersect(space: &MeasureSpace, sys: &SetSystem, k: usize, eps: &BigRational, emit: Emit) -> Result<String> {
    let r = find_rich_intersection(space, sys, k, eps).map_err(CliError::config)?;
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    Ok(match emit {
        Emit::Csv => {
            let (sets, measure) = r.hit.as_ref().unwrap_or(&r.best);
            format!(
                "k,sets,measure,threshold,found\n{k},{},{measure},{},{}\n",
                join(sets),
                r.threshold,
                r.hit.is_some()
            )
        }
        Emit::Json => {
            let entry = |(sets, m): &(Vec<usize>, BigRational)| {
                json!({"sets": sets, "measure": m.to_string(), "points": members(sys, sets)})
            };
            pretty(&json!({
                "k": k,
                "epsilon": eps.to_string(),
                "threshold": r.threshold.to_string(),
                "hit": r.hit.as_ref().map(entry),
                "best": entry(&r.best),
                "examined": r.examined,
            }))
        }
    })
}

pub fn witness_rows(fam: &StructureFamily, ladder: &[usize], k: usize, count: Option<usize>) -> Result<Vec<Value>> {
    if fam.kind() != FamilyKind::Circular3n {
        return Err(CliError::Config("--witness needs the circular-3n family".into()));
    }
    ladder
        .iter()
        .map(|&n| {
            let m = fam.generate(n).map_err(CliError::runtime)?;
            let len = count.unwrap_or_else(|| circular_witness_cap(n));
            let inst = circular_witness_family(&m, n, len).map_err(CliError::config)?;
            let verdict = check_k_inconsistent(&inst, k).map_err(CliError::config)?;
            let (inconsistent, subset) = match &verdict {
                Consistency::Inconsistent => (true, Value::Null),
                Consistency::Consistent { indices, element } => {
                    (false, json!({"instances": indices, "element": element}))
                }
            };
            Ok(json!({
                "index": n,
                "instances": len,
                "step": log_step(n),
                "k": k,
                "inconsistent": inconsistent,
                "consistent_subset": subset,
            }))
        })
        .collect()
}

fn cmd_witness(fam: &StructureFamily, ladder: &[usize], k: usize, count: Option<usize>, emit: Emit) -> Result<String> {
    let rows = witness_rows(fam, ladder, k, count)?;
    Ok(match emit {
        Emit::Json => pretty(&rows),
        Emit::Csv => {
            let mut out = String::from("index,instances,step,k,verdict\n");
            for r in &rows {
                let verdict = if r["inconsistent"] == true { "inconsistent" } else { "consistent" };
                let _ = writeln!(out, "{},{},{},{},{verdict}", r["index"], r["instances"], r["step"], r["k"]);
            }
            out
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_dividing(
    fam: &StructureFamily,
    baseline: (&str, &str),
    phi: &str,
    schemes: &str,
    ladder: &[usize],
    var: &str,
    opts: &DropOptions,
    emit: Emit,
) -> Result<String> {
    let report = drop_report(fam, baseline, phi, schemes, ladder, var, opts)?;
    Ok(match emit {
        Emit::Json => pretty(&report),
        Emit::Csv => report.to_csv(),
    })
}

pub fn drop_report(
    fam: &StructureFamily,
    baseline: (&str, &str),
    phi: &str,
    schemes: &str,
    ladder: &[usize],
    var: &str,
    opts: &DropOptions,
) -> Result<pfdim_core::dividing::DropReport> {
    let psi = load_formula(baseline.0, fam.signature())?;
    check_scheme(fam, &psi, var, baseline.1)?;
    let phi = load_formula(phi, fam.signature())?;
    let schemes: Vec<String> = schemes.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    for s in &schemes {
        check_scheme(fam, &phi, var, s)?;
    }
    dividing_drop_report(fam, var, (&psi, baseline.1), &phi, &schemes, ladder, opts).map_err(CliError::runtime)
}

pub fn cover_report(
    family_name: &str,
    index: usize,
    target: &str,
    disjuncts: &[String],
    paper_cover: bool,
    var: &str,
) -> Result<Value> {
    let fam = load_family(family_name)?;
    if !fam.is_valid_index(index) {
        return Err(CliError::Config(format!("index {index} is not valid for family `{family_name}`")));
    }
    let m = fam.generate(index).map_err(CliError::runtime)?;
    let target_f = load_formula(target, m.signature())?;
    let parts: Vec<Formula> = if paper_cover {
        if fam.kind() != FamilyKind::Circular3n {
            return Err(CliError::Config("--disjuncts-paper-x-eq-x needs the circular-3n family".into()));
        }
        circular_cover_disjuncts(&m, index).map_err(CliError::config)?
    } else {
        disjuncts
            .iter()
            .map(|d| load_formula(d, m.signature()))
            .collect::<Result<_>>()?
    };
    let check = verify_cover(&m, &target_f, &parts, var).map_err(CliError::runtime)?;
    // A disjunct is necessary when the rest no longer cover the target.
    let necessary = (0..parts.len())
        .map(|skip| {
            let rest: Vec<Formula> = parts
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, f)| f.clone())
                .collect();
            verify_cover(&m, &target_f, &rest, var).map(|c| !c.covered)
        })
        .collect::<std::result::Result<Vec<bool>, _>>()
        .map_err(CliError::runtime)?;
    Ok(json!({
        "family": fam.name(),
        "index": index,
        "target": target_f.to_string(),
        "disjuncts": parts.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "covered": check.covered,
        "witness": check.witness,
        "target_size": check.target_size,
        "necessary": necessary,
    }))
}

fn cmd_cover(
    family_name: &str,
    index: usize,
    target: &str,
    disjuncts: &[String],
    paper_cover: bool,
    var: &str,
    emit: Emit,
) -> Result<String> {
    if !paper_cover && disjuncts.is_empty() {
        return Err(CliError::Config("give --disjunct (repeatable) or --disjuncts-paper-x-eq-x".into()));
    }
    let report = cover_report(family_name, index, target, disjuncts, paper_cover, var)?;
    Ok(match emit {
        Emit::Json => pretty(&report),
        Emit::Csv => {
            let mut out = String::from("disjunct,necessary,covered,target_size\n");
            for (d, n) in report["disjuncts"].as_array().unwrap().iter().zip(report["necessary"].as_array().unwrap()) {
                let _ = writeln!(
                    out,
                    "\"{}\",{n},{},{}",
                    d.as_str().unwrap().replace('"', "\"\""),
                    report["covered"],
                    report["target_size"]
                );
            }
            out
        }
    })
}

pub fn fit(fam: &StructureFamily, formula: &str, ladder: &[usize], var: &str, cfg: &FitConfig) -> Result<pfdim_core::asymclass::AsymptoticFit> {
    let f = load_formula(formula, fam.signature())?;
    if parameter_variables(&f, var).is_empty() {
        return Err(CliError::Config(format!("formula `{f}` has no parameters besides `{var}`")));
    }
    fit_condition_one(fam, &f, var, ladder, cfg).map_err(CliError::runtime)
}

fn cmd_asymfit(fam: &StructureFamily, formula: &str, ladder: &[usize], var: &str, cfg: &FitConfig, emit: Emit) -> Result<String> {
    let fit = fit(fam, formula, ladder, var, cfg)?;
    Ok(match emit {
        Emit::Json => pretty(&fit),
        Emit::Csv => fit.to_csv(),
    })
}

pub fn two_value(
    fam: &StructureFamily,
    entries: &[String],
    ladder: &[usize],
    var: &str,
    cfg: &TwoValueConfig,
) -> Result<pfdim_core::asymclass::TwoValueReport> {
    let parsed = entries
        .iter()
        .map(|e| {
            let (f, s) = match e.rsplit_once('@') {
                Some((f, s)) => (f.trim(), s.trim()),
                None => (e.trim(), "none"),
            };
            let f = load_formula(f, fam.signature())?;
            check_scheme(fam, &f, var, s)?;
            Ok((f, s.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    two_value_check(fam, &parsed, var, ladder, cfg).map_err(CliError::runtime)
}

fn cmd_twovalue(
    fam: &StructureFamily,
    entries: &[String],
    ladder: &[usize],
    var: &str,
    cfg: &TwoValueConfig,
    emit: Emit,
) -> Result<String> {
    let report = two_value(fam, entries, ladder, var, cfg)?;
    Ok(match emit {
        Emit::Json => pretty(&report),
        Emit::Csv => {
            let mut out = String::from("formula,scheme,class,counts\n");
            for e in &report.entries {
                let counts: Vec<String> = e.counts.iter().map(u64::to_string).collect();
                let class = serde_json::to_value(e.class).unwrap();
                let _ = writeln!(
                    out,
                    "\"{}\",{},{},{}",
                    e.formula.replace('"', "\"\""),
                    e.scheme,
                    class.as_str().unwrap_or_default(),
                    counts.join(" ")
                );
            }
            out
        }
    })
}
