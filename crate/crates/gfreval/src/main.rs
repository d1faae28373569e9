//! Command-line surface: `eval`, `polarity`, `baselines`, `tau`, `discpower`,
//! `synth`, and `rerank`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use gfreval::error::{Error, Result};
use gfreval::eval::{
    baselines_run, evaluate_run, polarity_run, BaselineOptions, EvalOptions, UtilityChoice,
};
use gfreval::formats::{self, ScoreRecord, ALL_TOPICS};
use gfreval::model::{set_by_name, AttributeSet, Run, Scale};
use gfreval::stats::{alpha_grid, disc_power_curve, randomised_tukey_hsd_threads, ScoreMatrix};
use gfreval::synth::{
    corpus_files, gen_synthetic, rerank_by_attribute, unique_entity_filter, AttributeSetSpec,
    SynthConfig,
};
use gfreval::user_model::DecayKind;
use gfreval::{baselines::AttentionParams, DivergenceKind};

#[derive(Parser)]
#[command(
    name = "gfreval",
    version,
    about = "Group fairness and relevance evaluation of ranked lists"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score runs with GF per attribute set, relevance, and the combined GFR measure
    Eval(EvalArgs),
    /// Per-topic polarity (delta GF) over a binary attribute set
    Polarity(PolarityArgs),
    /// Baseline measures: Skew extremes, NDKL, MA/ABR, ECE, nDCG, intent measures
    Baselines(BaselinesArgs),
    /// Kendall's tau with a 95% CI between two measures' system rankings
    Tau(TauArgs),
    /// Randomised Tukey HSD p-values and a discriminative power curve
    Discpower(DiscpowerArgs),
    /// Generate a synthetic corpus
    Synth(SynthArgs),
    /// Rerank a run by per-item scores and/or filter to unique owners
    Rerank(RerankArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DecayArg {
    Err,
    Rbp,
}

#[derive(Clone, Copy, ValueEnum)]
enum UtilityArg {
    Err,
    Irbu,
}

#[derive(clap::Args)]
struct EvalArgs {
    /// Run file(s) in TREC format; repeatable
    #[arg(long = "run", required = true)]
    runs: Vec<PathBuf>,
    #[arg(long)]
    membership: PathBuf,
    #[arg(long)]
    targets: PathBuf,
    #[arg(long)]
    attrsets: PathBuf,
    #[arg(long)]
    qrels: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    cutoff: usize,
    /// Attention decay; defaults to `err` with qrels and `rbp` without
    #[arg(long, value_enum)]
    decay: Option<DecayArg>,
    /// Patience of the RBP decay
    #[arg(long, default_value_t = 0.85)]
    phi: f64,
    /// Patience of the iRBU utility
    #[arg(long = "irbu-phi", default_value_t = 0.99)]
    irbu_phi: f64,
    /// `jsd|nmd|rnod` for all sets, or per-set `set=kind` pairs joined by commas
    #[arg(long)]
    divergence: Option<String>,
    /// Utility model of the combined GFR measure
    #[arg(long, value_enum, default_value = "err")]
    utility: UtilityArg,
    /// Comma-separated weights `w0,w1,...` over relevance and attribute sets
    #[arg(long)]
    weights: Option<String>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PolarityArgs {
    #[arg(long = "run", required = true)]
    runs: Vec<PathBuf>,
    #[arg(long)]
    membership: PathBuf,
    #[arg(long)]
    attrsets: PathBuf,
    /// Name of the binary attribute set to score polarity on
    #[arg(long)]
    attrset: String,
    #[arg(long)]
    qrels: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    cutoff: usize,
    #[arg(long, value_enum)]
    decay: Option<DecayArg>,
    #[arg(long, default_value_t = 0.85)]
    phi: f64,
    /// Divergence used inside GF (default jsd)
    #[arg(long)]
    divergence: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BaselinesArgs {
    #[arg(long = "run", required = true)]
    runs: Vec<PathBuf>,
    #[arg(long)]
    membership: PathBuf,
    #[arg(long)]
    targets: PathBuf,
    #[arg(long)]
    attrsets: PathBuf,
    #[arg(long)]
    qrels: Option<PathBuf>,
    #[arg(long)]
    intents: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    cutoff: usize,
    /// Parameter p of the attention curve 100*p*(1-p)^(k-1)
    #[arg(long = "attention-p", default_value_t = 0.15)]
    attention_p: f64,
    /// Smoothing for zero target cells in Skew/NDKL (0 disables)
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct TauArgs {
    /// Long scores CSV (`run,topic,measure,value`) as written by eval/baselines
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long = "measure-a")]
    measure_a: String,
    #[arg(long = "measure-b")]
    measure_b: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DiscpowerArgs {
    /// Wide matrix CSV (`topic,<runs...>`) or a long scores CSV plus --measure
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 5000)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "alpha-max", default_value_t = 0.20)]
    alpha_max: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Measure to pivot when the input is a long scores CSV
    #[arg(long)]
    measure: Option<String>,
    /// Pairwise p-value CSV (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the discriminative power curve CSV
    #[arg(long = "curve-out")]
    curve_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 50)]
    topics: usize,
    #[arg(long, default_value_t = 4)]
    runs: usize,
    /// Items per topic list
    #[arg(long, default_value_t = 20)]
    depth: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Generate soft membership distributions instead of one-hot flags
    #[arg(long)]
    soft: bool,
    #[arg(long = "max-grade", default_value_t = 3)]
    max_grade: u32,
    /// Attribute set specs `name:scale:arity`, comma separated
    #[arg(long)]
    sets: Option<String>,
}

#[derive(clap::Args)]
struct RerankArgs {
    #[arg(long)]
    run: PathBuf,
    /// Rerank the top-k by these per-item scores (TSV `item<TAB>score`)
    #[arg(long = "by-rating")]
    by_rating: Option<PathBuf>,
    /// Keep only the first item per owner (TSV `item<TAB>owner`)
    #[arg(long = "unique-owner")]
    unique_owner: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// Tag of the emitted run (default: input tag plus suffixes)
    #[arg(long)]
    tag: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        // A closed stdout (e.g. piping into `head`) is not a failure.
        if let Error::Io(io) = &e {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("gfreval: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Polarity(args) => cmd_polarity(args),
        Command::Baselines(args) => cmd_baselines(args),
        Command::Tau(args) => cmd_tau(args),
        Command::Discpower(args) => cmd_discpower(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Rerank(args) => cmd_rerank(args),
    }
}

fn reader(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Eval(format!("cannot open {}: {e}", path.display())))
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Error::Eval(format!("cannot create {}: {e}", p.display()))
        })?))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

fn load_runs(paths: &[PathBuf]) -> Result<Vec<Run>> {
    paths
        .iter()
        .map(|p| formats::parse_run(reader(p)?, &label(p)))
        .collect()
}

fn parse_divergence_flag(
    spec: Option<&str>,
    sets: &[Arc<AttributeSet>],
) -> Result<BTreeMap<String, DivergenceKind>> {
    let mut map = BTreeMap::new();
    let Some(spec) = spec else {
        return Ok(map);
    };
    let parse_kind = |s: &str| {
        DivergenceKind::parse(s)
            .ok_or_else(|| Error::Eval(format!("unknown divergence `{s}` (use jsd, nmd, or rnod)")))
    };
    if spec.contains('=') {
        for part in spec.split(',') {
            let (name, kind) = part
                .split_once('=')
                .ok_or_else(|| Error::Eval(format!("bad divergence spec `{part}`")))?;
            if set_by_name(sets, name).is_none() {
                return Err(Error::Eval(format!(
                    "unknown attribute set `{name}` in --divergence"
                )));
            }
            map.insert(name.to_string(), parse_kind(kind)?);
        }
    } else {
        let kind = parse_kind(spec)?;
        for set in sets {
            map.insert(set.name().to_string(), kind);
        }
    }
    Ok(map)
}

fn parse_weights_flag(spec: Option<&str>) -> Result<Option<Vec<f64>>> {
    let Some(spec) = spec else { return Ok(None) };
    let weights: std::result::Result<Vec<f64>, _> =
        spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    weights
        .map(Some)
        .map_err(|_| Error::BadWeights(format!("cannot parse `{spec}`")))
}

fn decay_option(arg: Option<DecayArg>, phi: f64) -> Result<Option<DecayKind>> {
    match arg {
        None => Ok(None),
        Some(DecayArg::Err) => Ok(Some(DecayKind::Err)),
        Some(DecayArg::Rbp) => Ok(Some(DecayKind::rbp(phi)?)),
    }
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let sets = formats::parse_attribute_sets(reader(&args.attrsets)?, &label(&args.attrsets))?;
    let membership =
        formats::parse_membership(reader(&args.membership)?, &label(&args.membership), &sets)?;
    let targets = formats::parse_targets(reader(&args.targets)?, &label(&args.targets), &sets)?;
    let qrels = args
        .qrels
        .as_ref()
        .map(|p| formats::parse_qrels(reader(p)?, &label(p)))
        .transpose()?;
    let runs = load_runs(&args.runs)?;

    let opts = EvalOptions {
        cutoff: args.cutoff,
        decay: decay_option(args.decay, args.phi)?,
        rbp_phi: args.phi,
        irbu_phi: args.irbu_phi,
        gfr_utility: match args.utility {
            UtilityArg::Err => UtilityChoice::Err,
            UtilityArg::Irbu => UtilityChoice::Irbu,
        },
        divergences: parse_divergence_flag(args.divergence.as_deref(), &sets)?,
        weights: parse_weights_flag(args.weights.as_deref())?,
    };

    let mut records = Vec::new();
    for run in &runs {
        records.extend(evaluate_run(
            run,
            &sets,
            &membership,
            &targets,
            qrels.as_ref(),
            &opts,
        )?);
    }
    formats::emit_scores(&mut writer(args.out.as_deref())?, &records)
}

fn cmd_polarity(args: PolarityArgs) -> Result<()> {
    let sets = formats::parse_attribute_sets(reader(&args.attrsets)?, &label(&args.attrsets))?;
    let set = set_by_name(&sets, &args.attrset)
        .ok_or_else(|| Error::Eval(format!("attribute set `{}` not defined", args.attrset)))?
        .clone();
    let membership =
        formats::parse_membership(reader(&args.membership)?, &label(&args.membership), &sets)?;
    let qrels = args
        .qrels
        .as_ref()
        .map(|p| formats::parse_qrels(reader(p)?, &label(p)))
        .transpose()?;
    let runs = load_runs(&args.runs)?;

    let mut divergences = BTreeMap::new();
    if let Some(spec) = args.divergence.as_deref() {
        let kind = DivergenceKind::parse(spec)
            .ok_or_else(|| Error::Eval(format!("unknown divergence `{spec}`")))?;
        divergences.insert(set.name().to_string(), kind);
    }
    let opts = EvalOptions {
        cutoff: args.cutoff,
        decay: decay_option(args.decay, args.phi)?,
        rbp_phi: args.phi,
        divergences,
        ..EvalOptions::default()
    };

    let mut records = Vec::new();
    for run in &runs {
        records.extend(polarity_run(run, &set, &membership, qrels.as_ref(), &opts)?);
    }
    formats::emit_scores(&mut writer(args.out.as_deref())?, &records)
}

fn cmd_baselines(args: BaselinesArgs) -> Result<()> {
    let sets = formats::parse_attribute_sets(reader(&args.attrsets)?, &label(&args.attrsets))?;
    let membership =
        formats::parse_membership(reader(&args.membership)?, &label(&args.membership), &sets)?;
    let targets = formats::parse_targets(reader(&args.targets)?, &label(&args.targets), &sets)?;
    let qrels = args
        .qrels
        .as_ref()
        .map(|p| formats::parse_qrels(reader(p)?, &label(p)))
        .transpose()?;
    let intents = args
        .intents
        .as_ref()
        .map(|p| formats::parse_intents(reader(p)?, &label(p)))
        .transpose()?;
    let runs = load_runs(&args.runs)?;

    let opts = BaselineOptions {
        cutoff: args.cutoff,
        attention: AttentionParams::new(args.attention_p)?,
        epsilon: args.epsilon,
    };

    let mut records = Vec::new();
    for run in &runs {
        let out = baselines_run(
            run,
            &sets,
            &membership,
            &targets,
            qrels.as_ref(),
            intents.as_ref(),
            &opts,
        )?;
        for warning in &out.skipped {
            eprintln!("gfreval: warning: {}: {warning}", run.tag());
        }
        records.extend(out.records);
    }
    formats::emit_scores(&mut writer(args.out.as_deref())?, &records)
}

fn cmd_tau(args: TauArgs) -> Result<()> {
    let records = formats::parse_scores_csv(reader(&args.matrix)?, &label(&args.matrix))?;
    let mean_a = system_means(&records, &args.measure_a)?;
    let mean_b = system_means(&records, &args.measure_b)?;
    if mean_a.len() != mean_b.len() || mean_a.keys().ne(mean_b.keys()) {
        return Err(Error::Eval(format!(
            "measures `{}` and `{}` cover different run sets",
            args.measure_a, args.measure_b
        )));
    }
    let xs: Vec<f64> = mean_a.values().copied().collect();
    let ys: Vec<f64> = mean_b.values().copied().collect();
    let tau = gfreval::kendall_tau(&xs, &ys)?;
    let ci = gfreval::tau_ci(tau, xs.len()).ok();

    let mut w = writer(args.out.as_deref())?;
    writeln!(w, "measure_a,measure_b,n,tau,ci_low,ci_high")?;
    let (lo, hi) = match ci {
        Some((lo, hi)) => (format!("{lo:.6}"), format!("{hi:.6}")),
        None => ("NA".to_string(), "NA".to_string()),
    };
    writeln!(
        w,
        "{},{},{},{tau:.6},{lo},{hi}",
        args.measure_a,
        args.measure_b,
        xs.len()
    )?;
    Ok(())
}

/// Mean score per run for one measure, computed over per-topic rows.
fn system_means(records: &[ScoreRecord], measure: &str) -> Result<BTreeMap<String, f64>> {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in records {
        if r.measure == measure && r.topic != ALL_TOPICS {
            let e = sums.entry(r.run.clone()).or_insert((0.0, 0));
            e.0 += r.value;
            e.1 += 1;
        }
    }
    if sums.is_empty() {
        return Err(Error::Eval(format!("no rows for measure `{measure}`")));
    }
    Ok(sums
        .into_iter()
        .map(|(run, (sum, n))| (run, sum / n as f64))
        .collect())
}

fn cmd_discpower(args: DiscpowerArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.matrix)
        .map_err(|e| Error::Eval(format!("cannot read {}: {e}", args.matrix.display())))?;
    let file = label(&args.matrix);
    let matrix = if text.lines().next() == Some("run,topic,measure,value") {
        let records = formats::parse_scores_csv(text.as_bytes(), &file)?;
        let measure = pick_measure(&records, args.measure.as_deref())?;
        let cells = records
            .into_iter()
            .filter(|r| r.measure == measure && r.topic != ALL_TOPICS)
            .map(|r| (r.topic, r.run, r.value));
        let m = ScoreMatrix::from_cells(cells)?;
        for (topic, run) in m.filled() {
            eprintln!("gfreval: warning: missing score for topic `{topic}`, run `{run}`; using 0");
        }
        m
    } else {
        formats::parse_matrix_csv(text.as_bytes(), &file)?
    };

    let result = randomised_tukey_hsd_threads(&matrix, args.trials, args.seed, args.threads)?;
    formats::emit_pairs(&mut writer(args.out.as_deref())?, &result)?;
    if let Some(curve_path) = &args.curve_out {
        let curve = disc_power_curve(&result.p_values(), &alpha_grid(args.alpha_max));
        formats::emit_curve(&mut writer(Some(curve_path))?, &curve)?;
    }
    Ok(())
}

fn pick_measure(records: &[ScoreRecord], requested: Option<&str>) -> Result<String> {
    let mut measures: Vec<&str> = records.iter().map(|r| r.measure.as_str()).collect();
    measures.sort_unstable();
    measures.dedup();
    match requested {
        Some(m) if measures.contains(&m) => Ok(m.to_string()),
        Some(m) => Err(Error::Eval(format!(
            "measure `{m}` not present in the scores CSV"
        ))),
        None if measures.len() == 1 => Ok(measures[0].to_string()),
        None => Err(Error::Eval(format!(
            "scores CSV holds {} measures; pick one with --measure",
            measures.len()
        ))),
    }
}

fn parse_set_specs(spec: &str) -> Result<Vec<AttributeSetSpec>> {
    spec.split(',')
        .map(|part| {
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 3 {
                return Err(Error::Eval(format!(
                    "bad set spec `{part}` (expected name:scale:arity)"
                )));
            }
            let scale = Scale::parse(fields[1])
                .ok_or_else(|| Error::Eval(format!("unknown scale `{}`", fields[1])))?;
            let arity: usize = fields[2]
                .parse()
                .map_err(|_| Error::Eval(format!("bad arity `{}`", fields[2])))?;
            Ok(AttributeSetSpec {
                name: fields[0].to_string(),
                scale,
                arity,
            })
        })
        .collect()
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let mut cfg = SynthConfig {
        topics: args.topics,
        runs: args.runs,
        list_len: args.depth,
        seed: args.seed,
        soft_membership: args.soft,
        max_grade: args.max_grade,
        ..SynthConfig::default()
    };
    if let Some(spec) = args.sets.as_deref() {
        cfg.sets = parse_set_specs(spec)?;
    }
    let corpus = gen_synthetic(&cfg)?;
    let files = corpus_files(&corpus)?;
    std::fs::create_dir_all(&args.out_dir)?;
    for (name, bytes) in &files {
        std::fs::write(args.out_dir.join(name), bytes)?;
    }
    eprintln!(
        "gfreval: wrote {} files to {}",
        files.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_rerank(args: RerankArgs) -> Result<()> {
    if args.by_rating.is_none() && args.unique_owner.is_none() {
        return Err(Error::Eval(
            "nothing to do: pass --by-rating and/or --unique-owner".into(),
        ));
    }
    let run = formats::parse_run(reader(&args.run)?, &label(&args.run))?;
    let ratings = args
        .by_rating
        .as_ref()
        .map(|p| formats::parse_item_scores(reader(p)?, &label(p)))
        .transpose()?;
    let owners = args
        .unique_owner
        .as_ref()
        .map(|p| formats::parse_item_owners(reader(p)?, &label(p)))
        .transpose()?;

    let tag = args.tag.unwrap_or_else(|| {
        let mut t = run.tag().to_string();
        if ratings.is_some() {
            t.push_str("-rating");
        }
        if owners.is_some() {
            t.push_str("-uc");
        }
        t
    });

    let mut entries = Vec::new();
    for (topic, items) in run.topics() {
        let mut list = items.clone();
        if let Some(r) = &ratings {
            list = rerank_by_attribute(&list, r, args.k);
        }
        if let Some(o) = &owners {
            list = unique_entity_filter(&list, o, args.k);
        }
        // Fresh strictly-decreasing scores keep the emitted order stable
        // across parse cycles.
        for (rank, item) in list.iter().enumerate() {
            entries.push((topic.clone(), item.item.clone(), (list.len() - rank) as f64));
        }
    }
    let reranked = Run::from_entries(tag, entries)?;
    formats::emit_run(&mut writer(args.out.as_deref())?, &reranked)
}
