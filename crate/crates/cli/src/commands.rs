use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::ControlFlow;
use std::path::Path;

use anyhow::Context;
use hanoiwalk::engine::Walker;
use hanoiwalk::experiments::{
    default_budget, density_experiment, random_target_set, scaling_experiment, summarize_density,
    sweep_self_loop, DensityPlan, NaRule, PeakRule, ScalingPlan, SweepPlan, TargetChoice,
    TargetRegion, DENSITY_PEAK_RULE,
};
use hanoiwalk::fit::{fit_scaling, points_from_records, LogBase, RuntimeModel};
use hanoiwalk::io::{
    read_scaling_records, write_density_records, write_scaling_records, write_sweep, TraceWriter,
};
use hanoiwalk::{EdgeMode, GridVertex, TopologyParams, WalkConfig};
use serde_json::json;

use crate::cli::{
    DensityArgs, FitArgs, LogBaseArg, ModelArg, ScaleArgs, SimulateArgs, SweepArgs, TargetArgs,
};
use crate::manifest::{write_manifest, ManifestBuilder};

/// Bad flag values that clap cannot catch on its own.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

const FULL_SIDES: [usize; 4] = [64, 128, 256, 512];
const FULL_TRIALS: usize = 50;
const FULL_FRACTIONS: [f64; 3] = [0.1, 0.2, 0.3];

/// Parses `"x,y;x,y;..."` into 0-based vertices inside `topology`.
pub fn parse_targets(spec: &str, topology: TopologyParams) -> anyhow::Result<Vec<GridVertex>> {
    let mut out = Vec::new();
    for item in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((x, y)) = item.split_once(',') else {
            return usage(format!("target {item:?} is not of the form x,y"));
        };
        let (Ok(x), Ok(y)) = (x.trim().parse::<usize>(), y.trim().parse::<usize>()) else {
            return usage(format!("target {item:?} has non-integer coordinates"));
        };
        let v = GridVertex::new(x, y);
        if !topology.contains(v) {
            return usage(format!(
                "target {v} lies outside the {0}x{0} lattice",
                topology.side()
            ));
        }
        out.push(v);
    }
    if out.is_empty() {
        return usage("no targets given");
    }
    Ok(out)
}

fn topology(side: usize) -> anyhow::Result<TopologyParams> {
    TopologyParams::from_side(side).or_else(|e| usage(e.to_string()))
}

fn resolve_targets(args: &TargetArgs, topo: TopologyParams) -> anyhow::Result<Vec<GridVertex>> {
    match (&args.targets, args.random) {
        (Some(spec), None) => parse_targets(spec, topo),
        (None, Some(m)) if m > 0 => Ok(random_target_set(m, topo, args.seed, args.policy.into())?),
        (None, Some(_)) => usage("--random needs at least one target"),
        _ => usage("give either --targets or --random"),
    }
}

fn resolve_steps(steps: &str, n: usize, m: usize, mode: EdgeMode) -> anyhow::Result<usize> {
    if steps == "auto" {
        Ok(default_budget(n, m, mode))
    } else {
        steps.parse().or_else(|_| {
            usage(format!(
                "--steps must be \"auto\" or an integer, got {steps:?}"
            ))
        })
    }
}

fn targets_json(targets: &[GridVertex]) -> serde_json::Value {
    json!(targets.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn report_memory(config: &WalkConfig) {
    log::info!(
        "{0}x{0} {1} walk: state memory {2} bytes (two buffers of {3} bytes plus shift table)",
        config.topology.side(),
        config.edge_mode,
        config.memory_estimate::<f64>(),
        config.topology.vertices() * config.edge_mode.coin_dim() * 16
    );
}

pub fn simulate(args: &SimulateArgs, workers: usize) -> anyhow::Result<()> {
    let manifest = ManifestBuilder::start("simulate", workers);
    let topo = topology(args.side)?;
    let mode: EdgeMode = args.mode.into();
    let targets = resolve_targets(&args.targets, topo)?;
    let config = WalkConfig::new(topo, args.na, targets.iter().copied(), mode)
        .or_else(|e| usage(e.to_string()))?;
    let steps = resolve_steps(&args.steps, topo.vertices(), config.targets.len(), mode)?;
    report_memory(&config);
    let mut walker = Walker::<f64>::new(config.clone())?;

    let mut out = TraceWriter::new(create(&args.out)?)?;
    let mut trace = Vec::with_capacity(steps + 1);
    let mut failure = None;
    walker.evolve(steps, |t, p| {
        trace.push(p);
        match out.row(t, p) {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    out.finish()?;
    match PeakRule::default().detect(&trace) {
        Ok(p) => log::info!(
            "first peak at step {} with P = {:.6}",
            p.step,
            p.probability
        ),
        Err(e) => log::warn!("{e}"),
    }

    let params = json!({
        "side": args.side,
        "targets": targets_json(&config.targets),
        "random": args.targets.random,
        "seed": args.targets.seed,
        "policy": args.targets.policy,
        "na": args.na,
        "mode": args.mode,
        "steps": steps,
        "out": args.out,
    });
    let m = manifest.finish(params, Some(args.targets.seed), vec![args.out.clone()]);
    write_manifest(&m, &args.out)?;
    Ok(())
}

pub fn sweep(args: &SweepArgs, workers: usize) -> anyhow::Result<()> {
    let manifest = ManifestBuilder::start("sweep", workers);
    let topo = topology(args.side)?;
    let mode: EdgeMode = args.mode.into();
    let targets = resolve_targets(&args.targets, topo)?;
    let budget = resolve_steps(&args.steps, topo.vertices(), targets.len(), mode)?;
    let plan = SweepPlan {
        topology: topo,
        targets: targets.clone(),
        mode,
        na_min: args.na_min,
        na_max: args.na_max,
        na_step: args.na_step,
        rule: PeakRule::default(),
        budget: Some(budget),
    };
    hanoiwalk::experiments::na_grid(args.na_min, args.na_max, args.na_step)
        .or_else(|e| usage(e.to_string()))?;
    let table = sweep_self_loop(&plan)?;
    let best = table.optimal();
    log::info!(
        "optimal Na = {} (first peak at step {} with P = {:.6})",
        best.na,
        best.peak_step,
        best.peak_probability
    );
    let mut w = create(&args.out)?;
    write_sweep(&mut w, &table.rows)?;
    w.flush()?;

    let params = json!({
        "side": args.side,
        "targets": targets_json(&targets),
        "random": args.targets.random,
        "seed": args.targets.seed,
        "policy": args.targets.policy,
        "na_min": args.na_min,
        "na_max": args.na_max,
        "na_step": args.na_step,
        "mode": args.mode,
        "steps": budget,
        "peak_rule": plan.rule,
        "out": args.out,
    });
    let m = manifest.finish(params, Some(args.targets.seed), vec![args.out.clone()]);
    write_manifest(&m, &args.out)?;
    Ok(())
}

fn resolve_list<T: Clone>(
    given: &[T],
    full: bool,
    fallback: &[T],
    flag: &str,
) -> anyhow::Result<Vec<T>> {
    if !given.is_empty() {
        Ok(given.to_vec())
    } else if full {
        Ok(fallback.to_vec())
    } else {
        usage(format!("{flag} is required (or use --full)"))
    }
}

fn resolve_trials(trials: Option<usize>, full: bool) -> anyhow::Result<usize> {
    match (trials, full) {
        (Some(0), _) => usage("--trials must be >= 1"),
        (Some(t), _) => Ok(t),
        (None, true) => Ok(FULL_TRIALS),
        (None, false) => usage("--trials is required (or use --full)"),
    }
}

pub fn scale(args: &ScaleArgs, workers: usize) -> anyhow::Result<()> {
    let manifest = ManifestBuilder::start("scale", workers);
    let sides = resolve_list(&args.sides, args.full, &FULL_SIDES, "--sides")?;
    for &s in &sides {
        topology(s)?;
    }
    let trials = resolve_trials(args.trials, args.full)?;
    let na_rule = match (args.na, &args.na_rule) {
        (Some(na), None) => NaRule::Fixed(na),
        (None, Some(rule)) => rule
            .parse()
            .or_else(|e: hanoiwalk::Error| usage(e.to_string()))?,
        _ => return usage("give either --na or --na-rule"),
    };
    let region = TargetRegion {
        policy: args.policy.into(),
        window: args.window,
    };
    let (targets, ms) = match &args.targets {
        Some(spec) => {
            let smallest = topology(*sides.iter().min().unwrap())?;
            let t = parse_targets(spec, smallest)?;
            let m = t.len();
            (TargetChoice::Fixed(t), vec![m])
        }
        None => {
            let mut ms: Vec<usize> = args
                .m
                .into_iter()
                .chain(args.m_list.iter().copied())
                .collect();
            if ms.is_empty() {
                return usage("give --m, --m-list or --targets");
            }
            if ms.contains(&0) {
                return usage("target counts must be >= 1");
            }
            ms.dedup();
            (TargetChoice::Random(region), ms)
        }
    };
    let plan = ScalingPlan {
        sides: sides.clone(),
        ms: ms.clone(),
        na_rule,
        trials,
        seed: args.seed,
        mode: args.mode.into(),
        targets: targets.clone(),
        rule: PeakRule::default(),
    };
    let records = scaling_experiment(&plan)?;
    let mut w = create(&args.out)?;
    write_scaling_records(&mut w, &records)?;
    w.flush()?;

    let params = json!({
        "sides": sides,
        "ms": ms,
        "targets": match &targets {
            TargetChoice::Fixed(t) => targets_json(t),
            TargetChoice::Random(_) => serde_json::Value::Null,
        },
        "na_rule": na_rule.to_string(),
        "trials": trials,
        "seed": args.seed,
        "mode": args.mode,
        "policy": args.policy,
        "window": args.window,
        "full": args.full,
        "peak_rule": plan.rule,
        "out": args.out,
    });
    let m = manifest.finish(params, Some(args.seed), vec![args.out.clone()]);
    write_manifest(&m, &args.out)?;
    Ok(())
}

pub fn density(args: &DensityArgs, workers: usize) -> anyhow::Result<()> {
    let manifest = ManifestBuilder::start("density", workers);
    let sides = resolve_list(&args.sides, args.full, &FULL_SIDES, "--sides")?;
    for &s in &sides {
        topology(s)?;
    }
    let fractions = resolve_list(&args.fraction, args.full, &FULL_FRACTIONS, "--fraction")?;
    if let Some(f) = fractions.iter().find(|&&f| !(f > 0.0 && f < 1.0)) {
        return usage(format!("marked fraction must be in (0, 1), got {f}"));
    }
    let trials = resolve_trials(args.trials, args.full)?;
    let na_rule: NaRule = args
        .na_rule
        .parse()
        .or_else(|e: hanoiwalk::Error| usage(e.to_string()))?;
    let plan = DensityPlan {
        sides: sides.clone(),
        fractions: fractions.clone(),
        trials,
        seed: args.seed,
        na_rule,
        region: TargetRegion::whole(args.policy.into()),
        rule: DENSITY_PEAK_RULE,
    };
    let records = density_experiment(&plan)?;
    for c in summarize_density(&records) {
        log::info!(
            "{0}x{0} fraction {1}: mean P at step round(1.75 sqrt(N/M)) = {2:.4}, mean first-peak P = {3:.4}",
            c.side,
            c.fraction,
            c.mean_fixed_step_probability,
            c.mean_peak_probability
        );
    }
    let mut w = create(&args.out)?;
    write_density_records(&mut w, &records)?;
    w.flush()?;

    let params = json!({
        "sides": sides,
        "fractions": fractions,
        "trials": trials,
        "na_rule": na_rule.to_string(),
        "seed": args.seed,
        "mode": "hn4",
        "policy": args.policy,
        "full": args.full,
        "peak_rule": plan.rule,
        "out": args.out,
    });
    let m = manifest.finish(params, Some(args.seed), vec![args.out.clone()]);
    write_manifest(&m, &args.out)?;
    Ok(())
}

pub fn fit(args: &FitArgs, workers: usize) -> anyhow::Result<()> {
    let manifest = ManifestBuilder::start("fit", workers);
    let file =
        File::open(&args.input).with_context(|| format!("cannot open {}", args.input.display()))?;
    let mut records = read_scaling_records(file)?;
    if let Some(m) = args.m {
        records.retain(|r| r.m == m);
    }
    if let Some(mode) = args.mode {
        let mode: EdgeMode = mode.into();
        records.retain(|r| r.mode == mode);
    }
    let model = match args.model {
        ModelArg::Sqrt => RuntimeModel::Sqrt,
        ModelArg::SqrtLog => RuntimeModel::SqrtLog(match args.log_base {
            LogBaseArg::E => LogBase::E,
            LogBaseArg::Ten => LogBase::Ten,
            LogBaseArg::Two => LogBase::Two,
        }),
    };
    let result =
        fit_scaling(&points_from_records(&records), model).or_else(|e| usage(e.to_string()))?;
    log::info!(
        "{model}: coefficient {:.6}, rms relative residual {:.6} over {} records",
        result.coefficient,
        result.rms_relative_residual,
        result.points
    );
    let text = serde_json::to_string_pretty(&result)? + "\n";
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
            let params = json!({
                "input": args.input,
                "model": args.model,
                "log_base": args.log_base,
                "m": args.m,
                "mode": args.mode,
                "out": path,
            });
            let m = manifest.finish(params, None, vec![path.clone()]);
            write_manifest(&m, path)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}
