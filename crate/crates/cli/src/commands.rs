use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use charsum::format::{write_spectrum_csv, write_tail_csv};
use charsum::randmodel::{theoretical_laplace, ArithmeticModel, ParameterWindow};
use charsum::spectrum::{arc_max_spectrum, midpoint_spectrum, tail_curve};
use charsum::theory::constants;
use charsum::{DirichletCharacter, PrimeModulus, RandomModel, RandomModelConfig, Spectrum};
use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{
    parse_orders, parse_reals, CharacterArgs, Cli, Command, ConstantsArgs, Kind, RandmodelArgs,
    ReplayArgs, SpectrumArgs, TailArgs,
};
use crate::manifest::ExperimentManifest;
use crate::{svg, verify, CliResult, Failure};

pub const THREADS_ENV: &str = "CHARSUM_THREADS";

/// Rendered results of one command, before anything touches the filesystem.
pub struct Rendered {
    pub command: &'static str,
    pub parameters: Value,
    pub body: Vec<u8>,
    pub out: Option<PathBuf>,
    /// Secondary files (the SVG plot); each also gets a manifest.
    pub extra: Vec<(PathBuf, Vec<u8>)>,
    /// Set by `verify` when some check failed.
    pub failure: Option<String>,
}

pub fn resolve_threads(flag: Option<usize>) -> CliResult<usize> {
    if let Some(n) = flag {
        return if n == 0 { Err(Failure::Usage("--threads must be positive".into())) } else { Ok(n) };
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::Usage(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
        _ => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run(cli: Cli, raw_args: &[String]) -> CliResult<()> {
    let threads = resolve_threads(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    if let Command::Replay(r) = &cli.command {
        return replay(r);
    }
    let start = Instant::now();
    let rendered = pool.install(|| render(&cli.command))?;
    emit(rendered, raw_args, threads, start)
}

fn render(command: &Command) -> CliResult<Rendered> {
    match command {
        Command::Tail(a) => cmd_tail(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Constants(a) => cmd_constants(a),
        Command::Randmodel(a) => cmd_randmodel(a),
        Command::Verify(a) => verify::cmd_verify(a),
        Command::Replay(_) => unreachable!("handled before rendering"),
    }
}

fn emit(r: Rendered, raw_args: &[String], threads: usize, start: Instant) -> CliResult<()> {
    match &r.out {
        Some(path) => std::fs::write(path, &r.body)?,
        None => std::io::stdout().write_all(&r.body)?,
    }
    for (path, bytes) in &r.extra {
        std::fs::write(path, bytes)?;
    }
    let manifest = ExperimentManifest {
        command: r.command.to_string(),
        args: raw_args.to_vec(),
        parameters: r.parameters.clone(),
        threads,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    for path in r.out.iter().chain(r.extra.iter().map(|(p, _)| p)) {
        manifest.write_for(path)?;
    }
    match r.failure {
        Some(msg) => Err(Failure::Check(msg)),
        None => Ok(()),
    }
}

/// Re-runs the recorded command line with the recorded thread count,
/// overwriting the outputs it names.
fn replay(r: &ReplayArgs) -> CliResult<()> {
    let m = ExperimentManifest::read(&r.manifest).map_err(Failure::Usage)?;
    let argv = std::iter::once("charsum".to_string()).chain(m.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| Failure::Usage(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Failure::Usage("a manifest cannot record a replay".into()));
    }
    let recorded = Cli { threads: Some(m.threads), command: cli.command };
    run(recorded, &m.args)
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn modulus(p: u64) -> CliResult<PrimeModulus> {
    Ok(PrimeModulus::new(p)?)
}

fn check_orders(modulus: &PrimeModulus, orders: &[u32]) -> CliResult<()> {
    let p = modulus.p();
    for &d in orders {
        if !modulus.admits_order(d as u64) {
            return Err(usage(format!("order {d} does not divide p - 1 = {}", p - 1)));
        }
    }
    Ok(())
}

fn compute_spectrum(chi: &DirichletCharacter, a: &CharacterArgs) -> CliResult<Spectrum> {
    Ok(match a.kind {
        Kind::Midpoint => midpoint_spectrum(chi, a.shift),
        Kind::Arcmax => arc_max_spectrum(chi, a.shift, a.grid, a.refine_tol)?,
    })
}

fn character_parameters(a: &CharacterArgs, orders: &[u32]) -> Value {
    let mut v = json!({
        "p": a.p,
        "orders": orders,
        "m": a.m,
        "shift": a.shift,
        "kind": match a.kind { Kind::Midpoint => "midpoint", Kind::Arcmax => "arcmax" },
    });
    if a.kind == Kind::Arcmax {
        v["grid"] = json!(a.grid);
        v["refine_tol"] = json!(a.refine_tol);
    }
    v
}

fn cmd_tail(a: &TailArgs) -> CliResult<Rendered> {
    let orders = parse_orders(&a.orders).map_err(usage)?;
    if !(a.vstep > 0.0 && a.vstep.is_finite()) {
        return Err(usage("--vstep must be positive"));
    }
    let modulus = modulus(a.chi.p)?;
    check_orders(&modulus, &orders)?;
    // One spectrum alive at a time: each curve covers its own range, then all
    // are padded with zero counts onto the common grid 0..ceil(max over orders).
    let grid = |n: usize| -> Vec<f64> { (0..=n).map(|i| i as f64 * a.vstep).collect() };
    let mut curves = Vec::with_capacity(orders.len());
    for &d in &orders {
        let chi = DirichletCharacter::new(modulus.clone(), d as u64, a.chi.m)?;
        let spec = compute_spectrum(&chi, &a.chi)?;
        let n = (spec.max().ceil() / a.vstep).round() as usize;
        curves.push(tail_curve(&spec, &grid(n))?);
    }
    let n = curves.iter().map(|c| c.v_grid.len() - 1).max().unwrap_or(0);
    let v_grid = grid(n);
    for c in &mut curves {
        c.phi.resize(v_grid.len(), 0.0);
        c.counts.resize(v_grid.len(), 0);
        c.v_grid.clone_from(&v_grid);
    }

    let mut body = Vec::new();
    write_tail_csv(&mut body, &curves)?;
    let mut extra = Vec::new();
    if let Some(path) = &a.svg {
        extra.push((path.clone(), svg::tail_plot(&curves)?.into_bytes()));
    }
    let mut parameters = character_parameters(&a.chi, &orders);
    parameters["v_grid"] = json!({ "start": 0.0, "step": a.vstep, "points": v_grid.len() });
    Ok(Rendered { command: "tail", parameters, body, out: a.out.clone(), extra, failure: None })
}

fn cmd_spectrum(a: &SpectrumArgs) -> CliResult<Rendered> {
    let orders = parse_orders(&a.orders).map_err(usage)?;
    let &[d] = orders.as_slice() else {
        return Err(usage("spectrum takes a single order"));
    };
    let modulus = modulus(a.chi.p)?;
    check_orders(&modulus, &orders)?;
    let chi = DirichletCharacter::new(modulus, d as u64, a.chi.m)?;
    let spec = compute_spectrum(&chi, &a.chi)?;
    let mut body = Vec::new();
    write_spectrum_csv(&mut body, &spec)?;
    let parameters = character_parameters(&a.chi, &orders);
    Ok(Rendered { command: "spectrum", parameters, body, out: a.out.clone(), extra: Vec::new(), failure: None })
}

fn cmd_constants(a: &ConstantsArgs) -> CliResult<Rendered> {
    let orders = parse_orders(&a.orders).map_err(usage)?;
    let records: Vec<_> = orders.par_iter().map(|&d| constants(d)).collect();
    let mut body = serde_json::to_vec_pretty(&records)?;
    body.push(b'\n');
    Ok(Rendered {
        command: "constants",
        parameters: json!({ "orders": orders }),
        body,
        out: a.out.clone(),
        extra: Vec::new(),
        failure: None,
    })
}

fn cmd_randmodel(a: &RandmodelArgs) -> CliResult<Rendered> {
    let orders = parse_orders(&a.orders).map_err(usage)?;
    let s_list = parse_reals(&a.s).map_err(usage)?;
    if s_list.is_empty() {
        return Err(usage("no s values given"));
    }
    let modulus = modulus(a.p)?;
    let moment_bound = ParameterWindow::Moment.bound(a.p);
    let saddle_bound = ParameterWindow::Saddle.bound(a.p);
    for &s in &s_list {
        if !ParameterWindow::Saddle.contains(a.p, s) {
            eprintln!("warning: s = {s} lies outside the saddle window |s| <= {saddle_bound:.4}");
        } else if !ParameterWindow::Moment.contains(a.p, s) {
            eprintln!("warning: s = {s} lies outside the moment window |s| <= {moment_bound:.4}; arithmetic comparison is informal");
        }
    }

    let mut records = Vec::new();
    for &d in &orders {
        let config = RandomModelConfig::new(a.p, d, a.samples, a.seed)?;
        let samples = RandomModel::new(config).samples();
        let arithmetic = if modulus.admits_order(d as u64) {
            let chi = DirichletCharacter::new(modulus.clone(), d as u64, a.m)?;
            Some(ArithmeticModel::new(&chi))
        } else {
            eprintln!("warning: order {d} does not divide p - 1; arithmetic values are null");
            None
        };
        for &s in &s_list {
            let theo = theoretical_laplace(a.p, d, s);
            let (emp, emp_error) = match samples.laplace(s) {
                Ok(e) => (Some(e), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let arith = arithmetic.as_ref().map(|m| m.laplace(s));
            let gap = |x: Option<f64>, y: Option<f64>| x.zip(y).map(|(x, y)| (x - y).abs());
            let (ev, av, tv) = (emp.as_ref().map(|e| e.value), arith.map(|x| x.value), Some(theo.value));
            records.push(json!({
                "p": a.p,
                "d": d,
                "s": s,
                "empirical": emp,
                "empirical_error": emp_error,
                "theoretical": theo,
                "arithmetic": arith,
                "gaps": {
                    "empirical_theoretical": gap(ev, tv),
                    "arithmetic_theoretical": gap(av, tv),
                    "arithmetic_empirical": gap(av, ev),
                },
                "in_moment_window": ParameterWindow::Moment.contains(a.p, s),
                "in_saddle_window": ParameterWindow::Saddle.contains(a.p, s),
            }));
        }
    }
    let mut body = serde_json::to_vec_pretty(&records)?;
    body.push(b'\n');
    let parameters = json!({
        "p": a.p,
        "orders": orders,
        "m": a.m,
        "s": s_list,
        "samples": a.samples,
        "seed": a.seed,
    });
    Ok(Rendered { command: "randmodel", parameters, body, out: a.out.clone(), extra: Vec::new(), failure: None })
}
