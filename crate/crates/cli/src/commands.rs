use std::collections::BTreeMap;
use std::ops::Range;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dlsm_core::diagnostics::{aggregate_network_weights, roc_auc, summarize, Quantity, RocCurve};
use dlsm_core::gibbs::{predict_next, run_chain};
use dlsm_core::net::{pair_count, pair_nodes};
use dlsm_core::synth::{generate, GeneratorSpec};
use dlsm_core::{ChainOutput, DynamicNetwork, TieRule};

use crate::config::{self, RunConfig};
use crate::error::{CliError, CliResult};
use crate::io;
use crate::manifest::ManifestBuilder;

#[derive(Debug, Parser)]
#[command(name = "dlsm", version, about = "Gaussian-process latent space model for dynamic binary networks")]
pub struct Cli {
    /// Worker threads for the sampler (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dynamic network with its ground truth.
    Simulate(SimulateArgs),
    /// Build a co-movement network from a table of log-returns.
    Ingest(IngestArgs),
    /// Run the Gibbs sampler and write posterior summaries.
    Fit(FitArgs),
    /// Fit with an extra fully missing time point and write its predictive draws.
    Predict(PredictArgs),
    /// Score probability estimates against observed edges or known truth.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of nodes.
    #[arg(long)]
    pub v: usize,
    /// Number of unit-spaced time points.
    #[arg(long)]
    pub t: usize,
    /// Latent dimensions of the generator.
    #[arg(long, default_value_t = 2)]
    pub h_true: usize,
    /// Kernel decay `kappa` in `exp(-kappa (t - s)^2)` for both the baseline and the coordinates.
    #[arg(long, default_value_t = 0.01)]
    pub kappa: f64,
    /// Baseline kernel decay; overrides `--kappa`.
    #[arg(long)]
    pub kappa_mu: Option<f64>,
    /// Coordinate kernel decay; overrides `--kappa`.
    #[arg(long)]
    pub kappa_x: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// `t,<series>...` table of log-returns.
    #[arg(long)]
    pub returns: PathBuf,
    /// `missing` or `zero_as_positive`.
    #[arg(long, default_value = "missing")]
    pub tie_rule: String,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Config file plus one override flag per key.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Truncation level of latent dimensions.
    #[arg(long)]
    pub h_star: Option<String>,
    /// Baseline kernel decay `kappa` in `exp(-kappa (t - s)^2)`.
    #[arg(long)]
    pub kappa_mu: Option<String>,
    /// Coordinate kernel decay.
    #[arg(long)]
    pub kappa_x: Option<String>,
    /// Gamma shape for the first shrinkage factor.
    #[arg(long)]
    pub a1: Option<String>,
    /// Gamma shape for later shrinkage factors.
    #[arg(long)]
    pub a2: Option<String>,
    /// Total sweeps.
    #[arg(long)]
    pub n_iter: Option<String>,
    /// Sweeps discarded before retention.
    #[arg(long)]
    pub burn_in: Option<String>,
    /// Keep every n-th sweep after burn-in.
    #[arg(long)]
    pub thin: Option<String>,
    /// Master RNG seed.
    #[arg(long)]
    pub seed: Option<String>,
    /// Diagonal jitter added to GP covariances.
    #[arg(long)]
    pub jitter: Option<String>,
    /// Zero-return handling: `missing` or `zero_as_positive`.
    #[arg(long)]
    pub tie_rule: Option<String>,
    /// Sum the shrinkage rate over all dimensions (`true`/`false`).
    #[arg(long)]
    pub literal_step4_rate: Option<String>,
}

impl ConfigArgs {
    fn overrides(&self) -> BTreeMap<String, String> {
        let flags = [
            ("h_star", &self.h_star),
            ("kappa_mu", &self.kappa_mu),
            ("kappa_x", &self.kappa_x),
            ("a1", &self.a1),
            ("a2", &self.a2),
            ("n_iter", &self.n_iter),
            ("burn_in", &self.burn_in),
            ("thin", &self.thin),
            ("seed", &self.seed),
            ("jitter", &self.jitter),
            ("tie_rule", &self.tie_rule),
            ("literal_step4_rate", &self.literal_step4_rate),
        ];
        flags.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))).collect()
    }

    pub fn resolve(&self) -> CliResult<RunConfig> {
        let cfg = config::resolve(self.config.as_deref(), &self.overrides())?;
        if cfg.gibbs.retained_draws() < 20 {
            return Err(CliError::usage(format!(
                "only {} draws would be retained; interval summaries need at least 20",
                cfg.gibbs.retained_draws()
            )));
        }
        Ok(cfg)
    }
}

/// A network file, or a returns file turned into one with the configured tie rule.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DataArgs {
    /// Network CSV (`t,i,j,y`).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Log-returns CSV, converted with the tie rule.
    #[arg(long)]
    pub returns: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self, tie_rule: TieRule, manifest: &mut ManifestBuilder) -> CliResult<DynamicNetwork> {
        match (&self.data, &self.returns) {
            (Some(path), _) => {
                manifest.input(path);
                io::read_network(path)
            }
            (None, Some(path)) => {
                manifest.input(path);
                let table = io::read_returns(path)?;
                DynamicNetwork::from_log_returns(&table, tie_rule).map_err(|e| CliError::data(path, e.to_string()))
            }
            (None, None) => Err(CliError::usage("either --data or --returns is required")),
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Time indices `a:b` (1-based, inclusive) averaged into the network weights.
    #[arg(long)]
    pub window: Option<String>,
    /// Posterior interval mass.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Time stamp of the forecast matrix; must follow the last observed time.
    #[arg(long)]
    pub t_new: f64,
    /// Posterior interval mass.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// `t,i,j,mean` table of probability estimates.
    #[arg(long)]
    pub scores: PathBuf,
    /// Network whose observed entries are the labels.
    #[arg(long)]
    pub labels: PathBuf,
    /// Restrict scoring to slots that are missing in this network.
    #[arg(long)]
    pub masked_in: Option<PathBuf>,
    /// `t,i,j,mean` table of true probabilities.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// `t,i,j,lower,upper` intervals checked against `--truth`.
    #[arg(long)]
    pub hpd: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot set up thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Ingest(a) => ingest(&a),
        Command::Fit(a) => fit(&a),
        Command::Predict(a) => predict(&a),
        Command::Eval(a) => eval(&a),
    }
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let mut manifest = ManifestBuilder::start("simulate");
    let spec = GeneratorSpec {
        v: args.v,
        t: args.t,
        h_true: args.h_true,
        kappa_mu: args.kappa_mu.unwrap_or(args.kappa),
        kappa_x: args.kappa_x.unwrap_or(args.kappa),
        seed: args.seed,
    };
    spec.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let canonical = format!(
        "h_true={}\nkappa_mu={}\nkappa_x={}\nseed={}\nt={}\nv={}\n",
        spec.h_true, spec.kappa_mu, spec.kappa_x, spec.seed, spec.t, spec.v
    );
    manifest.config(config::sha256_hex(canonical.as_bytes()), Some(spec.seed));

    let syn = generate(&spec).map_err(|e| CliError::model("generator", e))?;
    io::ensure_dir(&args.out)?;
    io::write_network(&syn.network, &args.out.join("network.csv"))?;
    let grid = syn.network.grid();
    io::write_slot_values(&args.out.join("truth_pi.csv"), "mean", spec.v, grid, syn.pi.values())?;
    io::write_trace(&args.out.join("truth_mu.csv"), grid, std::iter::once((0, syn.mu.clone())))?;
    manifest.finish(&args.out)?;
    Ok(())
}

pub fn ingest(args: &IngestArgs) -> CliResult<()> {
    let mut manifest = ManifestBuilder::start("ingest");
    let tie_rule: TieRule = args.tie_rule.parse().map_err(|e: dlsm_core::Error| CliError::usage(e.to_string()))?;
    manifest.config(config::sha256_hex(format!("tie_rule={tie_rule}\n").as_bytes()), None);
    manifest.input(&args.returns);
    let table = io::read_returns(&args.returns)?;
    let net =
        DynamicNetwork::from_log_returns(&table, tie_rule).map_err(|e| CliError::data(&args.returns, e.to_string()))?;
    io::ensure_dir(&args.out)?;
    io::write_network(&net, &args.out.join("network.csv"))?;
    manifest.finish(&args.out)?;
    Ok(())
}

fn parse_window(spec: Option<&str>, times: usize) -> CliResult<Range<usize>> {
    let Some(spec) = spec else { return Ok(0..times) };
    let parsed = spec
        .split_once(':')
        .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)));
    match parsed {
        Some((a, b)) if a >= 1 && a <= b && b <= times => Ok(a - 1..b),
        _ => Err(CliError::usage(format!("--window `{spec}` must be `a:b` with 1 <= a <= b <= {times}"))),
    }
}

fn check_level(level: f64) -> CliResult<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!("--level must lie in (0, 1), got {level}")))
    }
}

fn write_roc(out: &Path, roc: Option<&RocCurve>) -> CliResult<()> {
    let rows: Vec<Vec<String>> = roc
        .map(|r| r.points.iter().map(|p| vec![p.threshold.to_string(), p.fpr.to_string(), p.tpr.to_string()]).collect())
        .unwrap_or_default();
    io::write_table(&out.join("roc_points.csv"), &["threshold", "fpr", "tpr"], rows)?;
    let auc = roc.map_or_else(|| "NA".to_string(), |r| r.auc.to_string());
    io::write_text(&out.join("auc.txt"), &format!("{auc}\n"))
}

/// Every posterior output of a chain fitted to `net`.
fn write_chain_outputs(
    chain: &ChainOutput,
    net: &DynamicNetwork,
    out: &Path,
    level: f64,
    window: Range<usize>,
) -> CliResult<()> {
    let v = chain.nodes();
    let grid = chain.grid();
    let numeric = |e| CliError::model("posterior summary", e);

    let pi_mean = chain.pi_mean();
    io::write_slot_values(&out.join("pi_mean.csv"), "mean", v, grid, pi_mean.values())?;

    let rows = summarize(chain, level).map_err(numeric)?;
    let intervals: Vec<(f64, f64)> =
        rows.iter().filter(|r| matches!(r.quantity, Quantity::Pi { .. })).map(|r| (r.lower, r.upper)).collect();
    io::write_slot_intervals(&out.join("pi_hpd.csv"), v, grid, &intervals)?;
    io::write_table(
        &out.join("ess.csv"),
        &["quantity", "ess"],
        rows.iter().map(|r| vec![r.quantity.to_string(), r.ess.to_string()]),
    )?;

    io::write_trace(&out.join("mu_trace.csv"), grid, (0..chain.draws()).map(|d| (d + 1, chain.mu_draw(d).to_vec())))?;
    io::write_table(
        &out.join("tau_mean.csv"),
        &["h", "mean_inverse_tau"],
        chain.inv_tau_mean().iter().enumerate().map(|(h, m)| vec![(h + 1).to_string(), m.to_string()]),
    )?;

    let p = pair_count(v);
    let imputations = chain.imputation_means().into_iter().map(|(slot, m)| {
        let (i, j) = pair_nodes(slot % p);
        vec![grid.times()[slot / p].to_string(), (i + 1).to_string(), (j + 1).to_string(), m.to_string()]
    });
    io::write_table(&out.join("imputations.csv"), &["t", "i", "j", "posterior_mean"], imputations)?;

    // in-sample ROC on observed slots only
    let (scores, labels): (Vec<f64>, Vec<bool>) =
        net.slots().iter().zip(pi_mean.values()).filter_map(|(y, &s)| y.map(|y| (s, y))).unzip();
    let roc = roc_auc(&scores, &labels).ok();
    if roc.is_none() {
        eprintln!("warning: observed entries contain a single class; AUC is undefined");
    }
    write_roc(out, roc.as_ref())?;

    let weights = aggregate_network_weights(chain, window).map_err(numeric)?;
    let weight_rows = (0..v).flat_map(|i| (0..v).filter(move |&j| j != i).map(move |j| (i, j)));
    io::write_table(
        &out.join("network_weights.csv"),
        &["i", "j", "weight"],
        weight_rows.map(|(i, j)| vec![(i + 1).to_string(), (j + 1).to_string(), weights[(i, j)].to_string()]),
    )?;
    Ok(())
}

pub fn fit(args: &FitArgs) -> CliResult<()> {
    check_level(args.level)?;
    let mut manifest = ManifestBuilder::start("fit");
    let cfg = args.config.resolve()?;
    if let Some(path) = &args.config.config {
        manifest.input(path);
    }
    manifest.config(cfg.hash(), Some(cfg.gibbs.seed));
    let net = args.data.load(cfg.tie_rule, &mut manifest)?;
    let window = parse_window(args.window.as_deref(), net.times())?;

    let chain = run_chain(&net, &cfg.gibbs).map_err(|e| CliError::model("sampler", e))?;
    io::ensure_dir(&args.out)?;
    write_chain_outputs(&chain, &net, &args.out, args.level, window)?;
    manifest.finish(&args.out)?;
    Ok(())
}

pub fn predict(args: &PredictArgs) -> CliResult<()> {
    check_level(args.level)?;
    let mut manifest = ManifestBuilder::start("predict");
    let cfg = args.config.resolve()?;
    if let Some(path) = &args.config.config {
        manifest.input(path);
    }
    manifest.config(cfg.hash(), Some(cfg.gibbs.seed));
    let net = args.data.load(cfg.tie_rule, &mut manifest)?;
    if args.t_new.is_nan() || args.t_new <= net.grid().last() {
        return Err(CliError::usage(format!(
            "--t-new {} must be later than the last observed time {}",
            args.t_new,
            net.grid().last()
        )));
    }

    let chain = predict_next(&net, &cfg.gibbs, args.t_new).map_err(|e| CliError::model("sampler", e))?;
    let extended = net.with_missing_time(args.t_new).map_err(|e| CliError::model("prediction grid", e))?;
    io::ensure_dir(&args.out)?;
    write_chain_outputs(&chain, &extended, &args.out, args.level, 0..chain.times())?;

    let v = chain.nodes();
    let p = pair_count(v);
    let last = chain.times() - 1;
    let t_new = args.t_new.to_string();
    let pi_mean = chain.pi_mean();
    let mean_rows = (0..p).map(|q| {
        let (i, j) = pair_nodes(q);
        vec![t_new.clone(), (i + 1).to_string(), (j + 1).to_string(), pi_mean.get(i, j, last).to_string()]
    });
    io::write_table(&args.out.join("predictive_mean.csv"), &["t", "i", "j", "mean"], mean_rows)?;
    let draw_rows = (0..chain.draws()).flat_map(|d| {
        let draw = &chain.pi_draw(d)[last * p..];
        (0..p)
            .map(|q| {
                let (i, j) = pair_nodes(q);
                vec![(d + 1).to_string(), (i + 1).to_string(), (j + 1).to_string(), draw[q].to_string()]
            })
            .collect::<Vec<_>>()
    });
    io::write_table(&args.out.join("predictive_draws.csv"), &["draw", "i", "j", "value"], draw_rows)?;
    manifest.finish(&args.out)?;
    Ok(())
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    let mut manifest = ManifestBuilder::start("eval");
    for p in [Some(&args.scores), Some(&args.labels), args.masked_in.as_ref(), args.truth.as_ref(), args.hpd.as_ref()]
        .into_iter()
        .flatten()
    {
        manifest.input(p);
    }
    if args.hpd.is_some() && args.truth.is_none() {
        return Err(CliError::usage("--hpd requires --truth"));
    }

    let scores = io::read_slot_values(&args.scores, "mean")?;
    let labels = io::read_network(&args.labels)?;
    let mask = args.masked_in.as_deref().map(io::read_network).transpose()?;
    if let Some(m) = &mask {
        if m.nodes() != labels.nodes() || m.grid() != labels.grid() {
            return Err(CliError::data(
                args.masked_in.as_ref().unwrap(),
                "network does not match the labels' nodes and times",
            ));
        }
    }

    // slots of the label network that are scored, in slot order
    let p = labels.pairs();
    let keyed: Vec<(usize, (u64, usize, usize))> = (0..labels.slots().len())
        .filter(|&s| mask.as_ref().is_none_or(|m| m.slots()[s].is_none()))
        .map(|s| {
            let (i, j) = pair_nodes(s % p);
            (s, (labels.grid().times()[s / p].to_bits(), i, j))
        })
        .filter(|(_, key)| scores.contains_key(key))
        .collect();
    if keyed.is_empty() {
        return Err(CliError::data(&args.scores, "no scored entries match the label network"));
    }

    let mut metrics: Vec<(String, String)> = vec![("n_scored".into(), keyed.len().to_string())];
    let (s, y): (Vec<f64>, Vec<bool>) =
        keyed.iter().filter_map(|(slot, key)| labels.slots()[*slot].map(|y| (scores[key], y))).unzip();
    let roc = roc_auc(&s, &y).ok();
    metrics.push(("n_labelled".into(), y.len().to_string()));
    metrics.push(("auc".into(), roc.as_ref().map_or("NA".into(), |r| r.auc.to_string())));
    io::ensure_dir(&args.out)?;
    write_roc(&args.out, roc.as_ref())?;

    if let Some(truth_path) = &args.truth {
        let truth = io::read_slot_values(truth_path, "mean")?;
        let pairs: Vec<_> = keyed.iter().filter_map(|(_, key)| truth.get(key).map(|t| (*key, *t))).collect();
        if pairs.len() < 2 {
            return Err(CliError::data(truth_path, "fewer than two scored entries have a true value"));
        }
        let est: Vec<f64> = pairs.iter().map(|(k, _)| scores[k]).collect();
        let tru: Vec<f64> = pairs.iter().map(|(_, t)| *t).collect();
        metrics.push(("truth_correlation".into(), pearson(&est, &tru).to_string()));
        metrics.push((
            "truth_mean_abs_error".into(),
            (est.iter().zip(&tru).map(|(a, b)| (a - b).abs()).sum::<f64>() / est.len() as f64).to_string(),
        ));
        if let Some(hpd_path) = &args.hpd {
            let hpd = io::read_slot_intervals(hpd_path)?;
            let checked: Vec<bool> =
                pairs.iter().filter_map(|(k, t)| hpd.get(k).map(|(lo, hi)| lo <= t && t <= hi)).collect();
            if checked.is_empty() {
                return Err(CliError::data(hpd_path, "no intervals match the scored entries"));
            }
            let coverage = checked.iter().filter(|&&c| c).count() as f64 / checked.len() as f64;
            metrics.push(("hpd_coverage".into(), coverage.to_string()));
        }
    }
    io::write_table(&args.out.join("eval.csv"), &["metric", "value"], metrics.into_iter().map(|(k, v)| vec![k, v]))?;
    manifest.finish(&args.out)?;
    Ok(())
}
