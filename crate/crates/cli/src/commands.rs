use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use cmld_core::estimate::{estimate_event_prob, rate_fit, EstimateResult};
use cmld_core::io::{
    fluid_to_json, parse_degree_input, parse_distribution, parse_state, parse_subprofile, read_to_string,
    write_components_csv, write_estimates_csv, write_fluid_csv, DegreeInput,
};
use cmld_core::lln::{lln_path, LlnSummary};
use cmld_core::path::{cost_closed_form, minimizer_path, path_cost, Minimizer};
use cmld_core::rates::{
    rate_component_degree, rate_component_size, rate_conjectured_largest, rate_conjectured_multi, rate_d_regular,
    rate_d_regular_subgraph, SIGN_CONVENTION,
};
use cmld_core::sim::{eea_run, extract_components, replication_rng, ParityAdjustment};
use cmld_core::verify::{run_battery, CheckOutcome};
use cmld_core::{uniform_grid, DegreeSequence, Masses, PathSegmentSpec};

use crate::{Cli, Command, EstimateArgs, Format, RateCommand};

fn read(path: &Path) -> Result<String> {
    Ok(read_to_string(path)?)
}

fn emit(cli: &Cli, bytes: &[u8]) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(cli, s.as_bytes())
}

fn json_only(cli: &Cli, what: &str) -> Result<()> {
    if cli.format() == Format::Csv {
        bail!("{what} has no CSV form; use --format json");
    }
    Ok(())
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < 2 {
        bail!("--grid must be at least 2, got {grid}");
    }
    Ok(())
}

fn masses_map(m: &Masses) -> Value {
    m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>().into()
}

fn rate_value(quantity: &str, rate: f64, conjecture: bool, extra: Value) -> Value {
    let mut v = json!({
        "quantity": quantity,
        "rate": rate,
        "limit": -rate,
        "sign_convention": SIGN_CONVENTION,
        "conjecture": conjecture,
    });
    if let (Some(obj), Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    v
}

/// Runs the command; `Ok(false)` means it ran but reported failures.
pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Rate(cmd) => {
            json_only(cli, "rate")?;
            emit_json(cli, &rate(cmd)?)?;
        }
        Command::Lln { p, t, grid } => {
            check_grid(*grid)?;
            let p = parse_distribution(&read(p)?)?;
            if !(*t > 0.0) {
                bail!("--T must be positive, got {t}");
            }
            let summary = LlnSummary::new(&p)?;
            let path = lln_path(&p, &uniform_grid(0.0, *t, *grid))?;
            match cli.format() {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_fluid_csv(&path, &mut buf)?;
                    emit(cli, &buf)?;
                }
                Format::Json => {
                    let path: Value = serde_json::from_str(&fluid_to_json(&path)?)?;
                    emit_json(cli, &json!({ "summary": summary, "path": path }))?;
                }
            }
        }
        Command::Path { x1, x2, grid } => {
            check_grid(*grid)?;
            let (x1, x2) = (parse_state(&read(x1)?)?, parse_state(&read(x2)?)?);
            let spec = PathSegmentSpec::new(x1.clone(), x2.clone(), 0.0)?;
            let path = minimizer_path(&spec, &uniform_grid(0.0, spec.t2(), *grid))?;
            match cli.format() {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_fluid_csv(&path, &mut buf)?;
                    emit(cli, &buf)?;
                }
                Format::Json => {
                    let closed = cost_closed_form(&x1, &x2)?;
                    let m = Minimizer::new(spec.clone());
                    let quadrature = path_cost(&m, 0.0, spec.t2())?;
                    let path: Value = serde_json::from_str(&fluid_to_json(&path)?)?;
                    emit_json(
                        cli,
                        &json!({
                            "beta": spec.beta,
                            "case": spec.case,
                            "varsigma": spec.varsigma,
                            "varsigma_tilde": spec.varsigma_tilde(),
                            "cost_closed_form": closed,
                            "cost_quadrature": quadrature,
                            "sign_convention": SIGN_CONVENTION,
                            "path": path,
                        }),
                    )?;
                }
            }
        }
        Command::Simulate { p, n, seed, trajectory } => {
            let (d, parity) = degree_sequence(p, *n)?;
            let rec = eea_run(&d, &mut replication_rng(*seed, 0), *trajectory);
            let summary = extract_components(&rec)?;
            match cli.format() {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_components_csv(&summary.components, &mut buf)?;
                    emit(cli, &buf)?;
                }
                Format::Json => {
                    let mut v = json!({
                        "n": d.len(),
                        "seed": seed,
                        "parity_adjustment": parity,
                        "total_steps": rec.total_steps,
                        "largest_fraction": summary.largest_fraction,
                        "n_components": summary.n_components,
                        "components": summary.components,
                    });
                    if *trajectory {
                        v["record"] = serde_json::to_value(&rec)?;
                    }
                    emit_json(cli, &v)?;
                }
            }
        }
        Command::Estimate(args) => estimate(cli, args)?,
        Command::Verify { fast } => {
            let outcomes = run_battery(*fast);
            let all = outcomes.iter().all(|c| c.passed);
            match cli.format {
                Some(Format::Json) => emit_json(cli, &json!({ "passed": all, "checks": outcomes }))?,
                Some(Format::Csv) => bail!("verify has no CSV form; use --format json"),
                None => emit(cli, verify_table(&outcomes).as_bytes())?,
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn verify_table(outcomes: &[CheckOutcome]) -> String {
    let width = outcomes.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut table = String::new();
    for c in outcomes {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!("{mark}  {:width$}  {:>7.2}s  {}\n", c.name, c.seconds, c.detail));
    }
    let passed = outcomes.iter().filter(|c| c.passed).count();
    table.push_str(&format!("{passed} of {} checks passed\n", outcomes.len()));
    table
}

fn rate(cmd: &RateCommand) -> Result<Value> {
    Ok(match cmd {
        RateCommand::Degree { p, q } => {
            let p = parse_distribution(&read(p)?)?;
            let q = parse_subprofile(&read(q)?)?;
            let r = rate_component_degree(&p, &q)?;
            let mut extra = serde_json::to_value(&r)?;
            extra["q"] = masses_map(q.masses());
            rate_value("component_degree", r.i1, false, extra)
        }
        RateCommand::Dreg { d, q } => match q.as_slice() {
            [single] => rate_value("d_regular", rate_d_regular(*d, *single)?, false, json!({ "D": d, "q": single })),
            many => rate_value("d_regular_multi", rate_conjectured_multi(*d, many)?, true, json!({ "D": d, "q": many })),
        },
        RateCommand::DregSub { p, d, q } => {
            let p = parse_distribution(&read(p)?)?;
            let r = rate_d_regular_subgraph(&p, *d, *q)?;
            rate_value("d_regular_subgraph", r, false, json!({ "D": d, "q": q }))
        }
        RateCommand::Size { p, r } => {
            let p = parse_distribution(&read(p)?)?;
            let opt = rate_component_size(&p, *r)?;
            rate_value("component_size", opt.rate, false, json!({ "r": r, "argmin": masses_map(opt.argmin.masses()) }))
        }
        RateCommand::LargestConj { d, x } => {
            rate_value("largest_component", rate_conjectured_largest(*d, *x)?, true, json!({ "D": d, "x": x }))
        }
    })
}

fn degree_sequence(path: &Path, n: Option<usize>) -> Result<(DegreeSequence, Option<ParityAdjustment>)> {
    match parse_degree_input(&read(path)?)? {
        DegreeInput::Sequence(d) => Ok((d, None)),
        DegreeInput::Distribution(p) => {
            let Some(n) = n else { bail!("--n is required with a degree distribution") };
            if n == 0 {
                bail!("--n must be positive");
            }
            Ok(DegreeSequence::from_distribution(&p, n)?)
        }
    }
}

fn estimate(cli: &Cli, args: &EstimateArgs) -> Result<()> {
    let q = parse_subprofile(&read(&args.q)?)?;
    if args.reps == 0 {
        bail!("--reps must be positive");
    }
    if args.workers == 0 {
        bail!("--workers must be positive");
    }
    let input = parse_degree_input(&read(&args.p)?)?;
    let graphs: Vec<(DegreeSequence, Option<ParityAdjustment>)> = match &input {
        DegreeInput::Sequence(d) => {
            let p = d.empirical_distribution()?;
            q.check_within(&p)?;
            vec![(d.clone(), None)]
        }
        DegreeInput::Distribution(p) => {
            q.check_within(p)?;
            if args.n.is_empty() {
                bail!("--n is required with a degree distribution");
            }
            args.n
                .iter()
                .map(|&n| {
                    if n == 0 {
                        bail!("--n must be positive");
                    }
                    Ok(DegreeSequence::from_distribution(p, n)?)
                })
                .collect::<Result<_>>()?
        }
    };
    let mut results: Vec<EstimateResult> = Vec::new();
    for (d, _) in &graphs {
        let eps = args.eps.unwrap_or(1.0 / d.len() as f64);
        if !(eps > 0.0) {
            bail!("--eps must be positive, got {eps}");
        }
        results.push(estimate_event_prob(d, &q, eps, args.reps, args.seed, args.workers)?);
    }
    match cli.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            write_estimates_csv(&results, &mut buf)?;
            emit(cli, &buf)
        }
        Format::Json => {
            let fit = (results.len() >= 3).then(|| rate_fit(&results).ok()).flatten();
            let parity: Vec<_> = graphs.iter().map(|(_, a)| a).collect();
            emit_json(
                cli,
                &json!({
                    "results": results,
                    "parity_adjustments": parity,
                    "rate_fit": fit,
                    "sign_convention": SIGN_CONVENTION,
                }),
            )
        }
    }
}
