mod args;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use wpcn_core::experiments::{
    self, compare_methods, find_optimal_t1, reproduce_figure, run_sweep, with_workers, CompareSpec, ExperimentConfig,
    FigureId, FigureOptions, SweepSection, SweepSpec, SweptParameter,
};
use wpcn_core::montecarlo::worker_cap_from_env;
use wpcn_core::{Error, Method, Result};

use args::{Cli, Command, Format, GridArgs, PointArgs};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = with_workers(worker_cap_from_env(), || run(cli.command)).and_then(|r| r);
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(point: &PointArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &point.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&point.overrides());
    Ok(cfg)
}

fn methods(point: &PointArgs, cfg: &ExperimentConfig) -> Vec<Method> {
    if point.method.is_empty() {
        vec![cfg.method]
    } else {
        point.method.iter().copied().map(Into::into).collect()
    }
}

fn parse_grid(values: &str) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("not a number: '{s}'")))
    };
    let parts: Vec<&str> = values.split(':').collect();
    if parts.len() == 3 {
        return experiments::config::arithmetic_grid(num(parts[0])?, num(parts[1])?, num(parts[2])?);
    }
    values.split(',').map(num).collect()
}

/// Sweep over the flag grid, the config's `[sweep]`, or the single point.
fn sweep_spec(cfg: &ExperimentConfig, grid: Option<&GridArgs>, methods: Vec<Method>) -> Result<SweepSpec> {
    let mut cfg = cfg.clone();
    if let Some(g) = grid {
        match (&g.param, &g.values) {
            (Some(p), Some(v)) => {
                cfg.sweep = Some(SweepSection {
                    parameter: p.parse()?,
                    values: parse_grid(v)?,
                    start: None,
                    stop: None,
                    step: None,
                })
            }
            (None, None) => {}
            _ => return Err(Error::InvalidParameter("--param and --values go together".into())),
        }
    }
    if cfg.sweep.is_none() {
        cfg.sweep = Some(SweepSection {
            parameter: SweptParameter::PtDbm,
            values: vec![cfg.pt_dbm],
            start: None,
            stop: None,
            step: None,
        });
    }
    let mut spec = SweepSpec::from_config(&cfg)?;
    spec.methods = methods;
    Ok(spec)
}

fn emit<F>(point: &PointArgs, csv: F, json: &dyn erased::Json) -> Result<()>
where
    F: FnOnce(&mut dyn Write, Option<&Path>) -> Result<()>,
{
    match (&point.out, point.format) {
        (Some(path), Format::Csv) => {
            let mut f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            csv(&mut f, Some(path))
        }
        (Some(path), Format::Json) => {
            let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            json.write(Box::new(f))
        }
        (None, Format::Csv) => csv(&mut std::io::stdout().lock(), None),
        (None, Format::Json) => json.write(Box::new(std::io::stdout().lock())),
    }
}

mod erased {
    use std::io::Write;

    use serde::Serialize;
    use wpcn_core::Result;

    pub trait Json {
        fn write(&self, out: Box<dyn Write + '_>) -> Result<()>;
    }

    impl<T: Serialize> Json for T {
        fn write(&self, out: Box<dyn Write + '_>) -> Result<()> {
            wpcn_core::experiments::write_json(self, out)
        }
    }
}

/// Bad rows are logged by the sweep; a single point that fails is an error.
fn write_rows(point: &PointArgs, res: &experiments::SweepResult, strict: bool) -> Result<ExitCode> {
    if strict {
        if let Some(e) = res.errors.first() {
            eprintln!("error: {}", e.message);
            return Ok(ExitCode::from(2));
        }
    }
    emit(
        point,
        |out, path| match path {
            Some(p) => experiments::write_dataset(p, &res.rows, &res.metadata),
            None => experiments::write_csv(&res.rows, out),
        },
        res,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Compute(point) => {
            let cfg = load(&point)?;
            let spec = sweep_spec(
                &ExperimentConfig {
                    sweep: None,
                    ..cfg.clone()
                },
                None,
                methods(&point, &cfg),
            )?;
            return write_rows(&point, &run_sweep(&spec)?, true);
        }
        Command::Simulate(point) => {
            let cfg = load(&point)?;
            let spec = sweep_spec(&ExperimentConfig { sweep: None, ..cfg }, None, vec![Method::MonteCarlo])?;
            return write_rows(&point, &run_sweep(&spec)?, true);
        }
        Command::Sweep(a) => {
            let cfg = load(&a.point)?;
            if cfg.sweep.is_none() && a.grid.param.is_none() {
                return Err(Error::InvalidParameter(
                    "sweep needs --param/--values or a [sweep] section in the config".into(),
                ));
            }
            let spec = sweep_spec(&cfg, Some(&a.grid), methods(&a.point, &cfg))?;
            return write_rows(&a.point, &run_sweep(&spec)?, false);
        }
        Command::Compare(a) => {
            let cfg = load(&a.point)?;
            let mut ms = methods(&a.point, &cfg);
            if ms.len() < 2 {
                ms = vec![Method::Analytic, Method::MonteCarlo];
            }
            let spec = CompareSpec {
                sweep: sweep_spec(&cfg, Some(&a.grid), ms)?,
                tolerance: a.tolerance,
                z_limit: a.z_limit,
            };
            let report = compare_methods(&spec)?;
            eprint!("{}", report.summary());
            emit(
                &a.point,
                |out, path| match path {
                    Some(p) => experiments::write_dataset(p, &report.sweep.rows, &report),
                    None => experiments::write_csv(&report.sweep.rows, out),
                },
                &report,
            )?;
            if !report.all_pass {
                return Ok(ExitCode::from(1));
            }
        }
        Command::ReproduceFigure(a) => {
            let id: FigureId = a.figure.parse()?;
            let opts = FigureOptions {
                mc_trials: a.trials,
                seed: a.seed,
            };
            let path = reproduce_figure(id, &a.out, &opts)?;
            println!("{}", path.display());
        }
        Command::FindT1(a) => {
            let cfg = load(&a.point)?;
            if cfg.j.is_some() {
                return Err(Error::InvalidParameter(
                    "t1 optimization covers single-device schemes".into(),
                ));
            }
            let opt = find_optimal_t1(&cfg.target().scheme_spec(), &cfg.params()?, a.tolerance)?;
            if !opt.unimodal {
                eprintln!("warning: outage has several local minima in t1; reporting the best grid point");
            }
            emit(
                &a.point,
                |out, _| {
                    writeln!(out, "scheme,k,model,t_star,outage,unimodal")?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        cfg.scheme, cfg.k, cfg.model, opt.t_star, opt.outage, opt.unimodal
                    )?;
                    Ok(())
                },
                &opt,
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
