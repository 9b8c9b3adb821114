use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{CliError, Options, OUT_DIR_ENV};
use crate::experiments::{
    lag_sweep, loess_fit, mapping_sweep, write_loess_csv, write_mapping_csv, write_rmse_csv,
    MappingConfig, MappingMode, SweepConfig, LOESS_INTERVAL_METHOD,
};
use crate::inference::{
    build_reference_table, regression_adjust, reject_sample, sample_prior, write_posterior_csv,
    InverseRange, ModelConfig, PriorSpec, ReferenceTable, Weighting,
};
use crate::netmodel::{export_edges, simulate, simulate_seeded, write_edges_csv, EventLog, ParamSet};
use crate::rng::{Domain, StreamKey};
use crate::summaries::{write_summaries_csv, Design, LogIndex, DEFAULT_WINDOW};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_N: usize = 1000;
const DEFAULT_BURN_IN: u64 = 1000;
const DEFAULT_TABLE_COUNT: usize = 10_000;
const DEFAULT_ACCEPT_FRACTION: f64 = 0.01;
const DEFAULT_LOESS_SPAN: f64 = 0.75;

type CmdResult = Result<(), CliError>;

pub(super) fn dispatch(name: &str, mut opts: Options) -> CmdResult {
    let out = out_dir(&opts)?;
    match name {
        "simulate" => cmd_simulate(&mut opts, &out),
        "summarize" => cmd_summarize(&mut opts, &out),
        "reftable" => cmd_reftable(&mut opts, &out),
        "infer" => cmd_infer(&mut opts, &out),
        "lag-sweep" => cmd_lag_sweep(&mut opts, &out),
        "mapping" => cmd_mapping(&mut opts, &out),
        "loess" => cmd_loess(&mut opts, &out),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    }
}

fn out_dir(opts: &Options) -> Result<PathBuf, CliError> {
    let dir = opts
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("netabc-out"));
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Writes `<command>.run.toml`: command, tool version, resolved config and
/// optional result values.
fn write_sidecar(out: &Path, command: &str, opts: &Options, result: Option<toml::Table>) -> CmdResult {
    let mut root = toml::Table::new();
    root.insert("command".into(), command.into());
    root.insert("version".into(), VERSION.into());
    let config = toml::Value::try_from(opts).map_err(|e| CliError::Failed(e.to_string()))?;
    root.insert("config".into(), config);
    if let Some(result) = result {
        root.insert("result".into(), toml::Value::Table(result));
    }
    let body = toml::to_string(&root).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut w = create(&out.join(format!("{command}.run.toml")))?;
    w.write_all(b"# netabc run metadata; pass back with --config to re-run\n")?;
    w.write_all(body.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn range(v: &mut Option<Vec<f64>>, default: InverseRange, name: &str) -> Result<InverseRange, CliError> {
    let v = v.get_or_insert_with(|| vec![default.lo, default.hi]);
    match v.as_slice() {
        [lo, hi] => Ok(InverseRange::new(*lo, *hi)),
        _ => Err(config_err(format!("{name} needs exactly two values"))),
    }
}

fn resolve_model(opts: &mut Options) -> Result<ModelConfig, CliError> {
    let d = PriorSpec::default();
    let prior = PriorSpec {
        rho: range(&mut opts.prior_inv_rho, d.rho, "prior_inv_rho")?,
        sigma: range(&mut opts.prior_inv_sigma, d.sigma, "prior_inv_sigma")?,
        omega0: range(&mut opts.prior_inv_omega0, d.omega0, "prior_inv_omega0")?,
        omega1: range(&mut opts.prior_inv_omega1, d.omega1, "prior_inv_omega1")?,
    };
    let model = ModelConfig {
        n: *opts.n.get_or_insert(DEFAULT_N),
        mu: *opts.mu.get_or_insert(0.0),
        burn_in: *opts.burn_in.get_or_insert(DEFAULT_BURN_IN),
        window: *opts.window.get_or_insert(DEFAULT_WINDOW),
        prior,
    };
    model.validate()?;
    Ok(model)
}

fn resolve_params(opts: &mut Options) -> Result<ParamSet, CliError> {
    let r = ParamSet::REFERENCE;
    let p = ParamSet {
        rho: *opts.rho.get_or_insert(r.rho),
        sigma: *opts.sigma.get_or_insert(r.sigma),
        omega0: *opts.omega0.get_or_insert(r.omega0),
        omega1: *opts.omega1.get_or_insert(r.omega1),
        mu: *opts.mu.get_or_insert(0.0),
        n: *opts.n.get_or_insert(DEFAULT_N),
    };
    p.validate()?;
    Ok(p)
}

fn resolve_design(opts: &mut Options) -> Result<Design, CliError> {
    let tag = opts.design.get_or_insert_with(|| "one-wave".into()).clone();
    if tag == "two-wave" && opts.lag.is_none() {
        return Err(config_err("two-wave design needs --lag"));
    }
    if tag == "one-wave" {
        opts.lag = None;
    }
    Design::from_parts(&tag, opts.lag).map_err(|e| config_err(e.to_string()))
}

fn resolve_weighting(opts: &mut Options) -> Result<Weighting, CliError> {
    opts.weighting
        .get_or_insert_with(|| Weighting::default().to_string())
        .parse()
        .map_err(|e: crate::Error| config_err(e.to_string()))
}

fn cmd_simulate(opts: &mut Options, out: &Path) -> CmdResult {
    let params = resolve_params(opts)?;
    let burn_in = *opts.burn_in.get_or_insert(DEFAULT_BURN_IN);
    let span = *opts.span.get_or_insert(DEFAULT_WINDOW);
    let seed = *opts.seed.get_or_insert(0);
    if span < 1 {
        return Err(config_err("span must be at least 1"));
    }
    let from = *opts.from.get_or_insert(burn_in + 1);
    let to = *opts.to.get_or_insert(burn_in + span);

    let traj = simulate_seeded(&params, burn_in, span, seed)?;
    let rows = export_edges(&traj.log, from, to)?;
    let mut w = create(&out.join("edges.csv"))?;
    write_edges_csv(&rows, &mut w)?;
    w.flush()?;
    let mut w = create(&out.join("trajectory.json"))?;
    serde_json::to_writer(&mut w, &traj.log).map_err(|e| CliError::Failed(e.to_string()))?;
    w.flush()?;
    write_sidecar(out, "simulate", opts, None)
}

fn cmd_summarize(opts: &mut Options, out: &Path) -> CmdResult {
    let path = opts
        .trajectory
        .clone()
        .ok_or_else(|| config_err("summarize needs --trajectory"))?;
    let design = resolve_design(opts)?;
    let window = *opts.window.get_or_insert(DEFAULT_WINDOW);
    let log: EventLog = serde_json::from_reader(open(&path)?)
        .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    let dv = LogIndex::new(&log).design_summaries(design, window)?;
    let mut w = create(&out.join("summaries.csv"))?;
    write_summaries_csv(&[dv], &mut w)?;
    w.flush()?;
    write_sidecar(out, "summarize", opts, None)
}

fn cmd_reftable(opts: &mut Options, out: &Path) -> CmdResult {
    let design = resolve_design(opts)?;
    let model = resolve_model(opts)?;
    let count = *opts.count.get_or_insert(DEFAULT_TABLE_COUNT);
    let seed = *opts.seed.get_or_insert(0);
    let table = build_reference_table(design, count, &model, seed)?;
    let mut w = create(&out.join("reftable.csv"))?;
    table.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&out.join("reftable.meta"))?;
    table.write_meta(&mut w)?;
    w.flush()?;
    write_sidecar(out, "reftable", opts, None)
}

fn cmd_infer(opts: &mut Options, out: &Path) -> CmdResult {
    let table_path = opts.table.get_or_insert_with(|| out.join("reftable.csv")).clone();
    let meta_path = table_path.with_extension("meta");
    let table = ReferenceTable::read(open(&table_path)?, open(&meta_path)?)?;
    let fraction = *opts.accept_fraction.get_or_insert(DEFAULT_ACCEPT_FRACTION);
    let adjust = *opts.adjust.get_or_insert(true);
    let weighting = resolve_weighting(opts)?;

    let mut result = toml::Table::new();
    let observed = match opts.observed.clone() {
        Some(v) => v,
        None => {
            // simulate a ground truth under the table's model settings
            let seed = *opts.truth_seed.get_or_insert(0);
            let mut rng = StreamKey::new(seed, Domain::Truth, 0).rng();
            let m = &table.model;
            let params = match (opts.rho, opts.sigma, opts.omega0, opts.omega1) {
                (Some(rho), Some(sigma), Some(omega0), Some(omega1)) => {
                    ParamSet { rho, sigma, omega0, omega1, mu: m.mu, n: m.n }
                }
                (None, None, None, None) => sample_prior(&m.prior, m.mu, m.n, &mut rng),
                _ => return Err(config_err("give all four of rho, sigma, omega0, omega1 or none")),
            };
            let span = table.design.required_span(m.window);
            let traj = simulate(&params, m.burn_in, span, &mut rng)?;
            let dv = LogIndex::new(&traj.log).design_summaries(table.design, m.window)?;
            let truth: Vec<f64> = params.free().to_vec();
            result.insert("truth".into(), toml::Value::try_from(truth).expect("floats serialize"));
            dv.values()
        }
    };
    result.insert(
        "observed".into(),
        toml::Value::try_from(observed.clone()).expect("floats serialize"),
    );

    let mut posterior = reject_sample(&table, &observed, fraction)?;
    if adjust {
        posterior = regression_adjust(&posterior, &table.column_norms, weighting)?;
    }
    let mut w = create(&out.join("posterior.csv"))?;
    write_posterior_csv(&posterior, &mut w)?;
    w.flush()?;
    write_sidecar(out, "infer", opts, Some(result))
}

fn cmd_lag_sweep(opts: &mut Options, out: &Path) -> CmdResult {
    let seed = *opts.seed.get_or_insert(0);
    let mut cfg = match opts.preset.get_or_insert_with(|| "desk".into()).as_str() {
        "desk" => SweepConfig::desk(seed),
        "full" => SweepConfig::full(seed),
        other => return Err(config_err(format!("unknown preset '{other}'"))),
    };
    // preset values act as defaults for the model settings
    opts.n.get_or_insert(cfg.model.n);
    opts.burn_in.get_or_insert(cfg.model.burn_in);
    opts.window.get_or_insert(cfg.model.window);
    cfg.model = resolve_model(opts)?;
    cfg.lags = opts.lags.get_or_insert(cfg.lags.clone()).clone();
    cfg.include_one_wave = *opts.one_wave.get_or_insert(cfg.include_one_wave);
    cfg.truth_count = *opts.truths.get_or_insert(cfg.truth_count);
    cfg.table_count = *opts.count.get_or_insert(cfg.table_count);
    cfg.accept_fraction = *opts.accept_fraction.get_or_insert(cfg.accept_fraction);
    cfg.weighting = resolve_weighting(opts)?;
    let span = *opts.loess_span.get_or_insert(DEFAULT_LOESS_SPAN);

    let result = lag_sweep(&cfg)?;
    let mut w = create(&out.join("rmse_by_lag.csv"))?;
    write_rmse_csv(&result, &mut w)?;
    w.flush()?;

    let mut extra = toml::Table::new();
    let curve = result.lag_curve(true, "total");
    if curve.len() >= 3 {
        let pts: Vec<(f64, f64)> = curve.iter().map(|&(l, r)| (l as f64, r)).collect();
        let fit = loess_fit(&pts, span)?;
        let mut w = create(&out.join("loess.csv"))?;
        write_loess_csv(&fit, &mut w)?;
        w.flush()?;
        extra.insert("loess_interval".into(), LOESS_INTERVAL_METHOD.into());
    }
    write_sidecar(out, "lag-sweep", opts, Some(extra))
}

fn cmd_mapping(opts: &mut Options, out: &Path) -> CmdResult {
    let base = resolve_params(opts)?;
    opts.burn_in.get_or_insert(DEFAULT_BURN_IN);
    let model = resolve_model(opts)?;
    let param = opts.param.get_or_insert_with(|| "sigma".into()).clone();
    let mode: MappingMode = opts
        .mode
        .get_or_insert_with(|| MappingMode::FixedOthers.to_string())
        .parse()
        .map_err(|e: crate::Error| config_err(e.to_string()))?;
    let cfg = MappingConfig {
        param,
        grid: opts.grid.get_or_insert_with(MappingConfig::default_grid).clone(),
        mode,
        runs_per_value: *opts.runs.get_or_insert(100),
        base,
        model,
        master_seed: *opts.seed.get_or_insert(0),
    };
    let result = mapping_sweep(&cfg)?;
    let mut w = create(&out.join("mapping.csv"))?;
    write_mapping_csv(&result, &mut w)?;
    w.flush()?;
    write_sidecar(out, "mapping", opts, None)
}

fn cmd_loess(opts: &mut Options, out: &Path) -> CmdResult {
    let input = opts.input.clone().ok_or_else(|| config_err("loess needs --input"))?;
    let span = *opts.loess_span.get_or_insert(DEFAULT_LOESS_SPAN);
    let mut reader = csv::Reader::from_reader(open(&input)?);
    let headers = reader.headers().map_err(crate::Error::from)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| config_err(format!("{} has no '{name}' column", input.display())))
    };
    let (xi, yi) = (col("x")?, col("y")?);
    let mut pts = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(crate::Error::from)?;
        let parse = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| CliError::Failed(format!("bad number '{}' in {}", &rec[i], input.display())))
        };
        pts.push((parse(xi)?, parse(yi)?));
    }
    let fit = loess_fit(&pts, span)?;
    let mut w = create(&out.join("loess.csv"))?;
    write_loess_csv(&fit, &mut w)?;
    w.flush()?;
    let mut extra = toml::Table::new();
    extra.insert("interval_method".into(), LOESS_INTERVAL_METHOD.into());
    extra.insert("enp".into(), fit.enp.into());
    extra.insert("residual_sd".into(), fit.residual_sd.into());
    write_sidecar(out, "loess", opts, Some(extra))
}
