use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use log::info;
use lyricstat::corpus::{self, IngestConfig, IngestError, IngestOutcome, InputFormat, TokenizeConfig};
use lyricstat::embeddings::{EmbeddingTable, SgnsConfig, SgnsTrainer};
use lyricstat::style::{self, report, WordList};
use lyricstat::weat::{self, OovPolicy, PValueMode, WeatOptions, DEFAULT_SAMPLES};
use lyricstat::{Cohort, Corpus};
use serde::Serialize;

use crate::config;
use crate::{IngestArgs, StyleArgs, TrainArgs, WeatArgs};

/// Outcome of a command that did not hit an environment error.
pub enum Status {
    Ok,
    /// Output written, but the data failed a quality threshold.
    DataQuality,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => ExitCode::SUCCESS,
            Status::DataQuality => ExitCode::from(2),
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).with_context(|| format!("cannot open corpus cache {}", path.display()))?;
    corpus::read_cache(BufReader::with_capacity(1 << 20, file))
        .with_context(|| format!("cannot read corpus cache {}", path.display()))
}

#[derive(Serialize)]
struct IngestResolved<'a> {
    input: &'a Path,
    format: InputFormat,
    ingest: &'a IngestConfig,
}

pub fn ingest(args: &IngestArgs) -> Result<Status> {
    let file = config::load(args.config.as_deref())?.ingest;
    let format = match args.format.or(file.format) {
        Some(f) => f,
        None => InputFormat::from_path(&args.input)
            .ok_or_else(|| anyhow!("cannot tell the format of {}; pass --format", args.input.display()))?,
    };
    let defaults = IngestConfig::default();
    let mut tokenize = file.tokenize.unwrap_or_default();
    if args.keep_annotations {
        tokenize.drop_annotations = false;
    }
    let cfg = IngestConfig {
        year_min: args.year_min.or(file.year_min).unwrap_or(defaults.year_min),
        year_max: args.year_max.or(file.year_max).unwrap_or(defaults.year_max),
        max_reject_fraction: args
            .max_reject_fraction
            .or(file.max_reject_fraction)
            .unwrap_or(defaults.max_reject_fraction),
        tokenize,
    };
    create_dir(&args.out)?;
    config::echo(
        &args.out,
        "ingest",
        &IngestResolved {
            input: &args.input,
            format,
            ingest: &cfg,
        },
    )?;

    let started = Instant::now();
    let (outcome, status) = match corpus::ingest(&args.input, format, &cfg) {
        Ok(outcome) => (outcome, Status::Ok),
        Err(IngestError::TooManyRejects { outcome, max_fraction }) => {
            eprintln!(
                "error: {} of {} records rejected, above the allowed fraction {max_fraction}; partial cache written",
                outcome.report.rejected(),
                outcome.report.total
            );
            (*outcome, Status::DataQuality)
        }
        Err(e) => return Err(e).with_context(|| format!("cannot ingest {}", args.input.display())),
    };
    write_ingest_outputs(&args.out, &outcome)?;
    info!(
        "ingested {} songs ({} rejected) in {:.2?}",
        outcome.corpus.len(),
        outcome.report.rejected(),
        started.elapsed()
    );
    Ok(status)
}

fn write_ingest_outputs(out: &Path, outcome: &IngestOutcome) -> Result<()> {
    let cache = out.join("corpus.cache");
    let mut w = create(&cache)?;
    corpus::write_cache(&outcome.corpus, &mut w).with_context(|| format!("cannot write {}", cache.display()))?;
    w.flush()?;
    let rejects = out.join("rejects.jsonl");
    let mut w = create(&rejects)?;
    outcome.report.write_jsonl(&mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StyleResolved<'a> {
    cache: &'a Path,
    words: &'a [String],
    top_k: usize,
    cohort: &'a str,
    year: Option<i32>,
    swear_words: Option<&'a Path>,
    stopwords: Option<&'a Path>,
    no_stopwords: bool,
}

fn parse_cohort(text: &str) -> Result<Option<Cohort>> {
    if text == "all" {
        return Ok(None);
    }
    text.parse::<Cohort>()
        .map(Some)
        .map_err(|_| anyhow!("unknown cohort {text:?} (expected popular, other or all)"))
}

pub fn style(args: &StyleArgs) -> Result<Status> {
    let file = config::load(args.config.as_deref())?.style;
    let words: Vec<String> = args
        .words
        .clone()
        .or(file.words)
        .unwrap_or_else(|| vec!["rock".into(), "blues".into()])
        .iter()
        .map(|w| w.trim().to_lowercase())
        .collect();
    let top_k = args.top_k.or(file.top_k).unwrap_or(100);
    let cohort_text = args.cohort.clone().or(file.cohort).unwrap_or_else(|| "popular".into());
    let cohort = parse_cohort(&cohort_text)?;
    let year = args.year.or(file.year);
    let swear_path = args.swear_words.clone().or(file.swear_words);
    let stop_path = args.stopwords.clone().or(file.stopwords);
    let no_stopwords = args.no_stopwords || file.no_stopwords.unwrap_or(false);
    if top_k == 0 {
        bail!("--top-k must be at least 1");
    }

    let corpus = load_corpus(&args.cache)?;
    // word lists are normalized the way the corpus was tokenized
    let tokenize = TokenizeConfig::default();
    let swears = match &swear_path {
        Some(p) => WordList::load(p, &tokenize)?,
        None => WordList::bundled_swear_words(),
    };
    let stopwords = match (&stop_path, no_stopwords) {
        (_, true) => None,
        (Some(p), false) => Some(WordList::load(p, &tokenize)?),
        (None, false) => Some(WordList::bundled_stopwords()),
    };

    create_dir(&args.out)?;
    config::echo(
        &args.out,
        "style",
        &StyleResolved {
            cache: &args.cache,
            words: &words,
            top_k,
            cohort: &cohort_text,
            year,
            swear_words: swear_path.as_deref(),
            stopwords: stop_path.as_deref(),
            no_stopwords,
        },
    )?;

    let started = Instant::now();
    let metrics = style::corpus_metrics(&corpus, &swears);
    let aggregates = style::aggregate(&corpus, &metrics)?;
    let series = style::rank_series(&corpus, &words, cohort)?;
    let mut blocks = Vec::new();
    for (y, counts) in style::counts_by_year(&corpus, cohort) {
        if year.is_some_and(|wanted| wanted != y) {
            continue;
        }
        blocks.push(report::TopWords {
            year: y,
            cohort,
            words: style::top_from_counts(&counts, top_k, stopwords.as_ref()),
        });
    }
    if let Some(wanted) = year {
        if blocks.is_empty() {
            bail!("no {cohort_text} songs in year {wanted}");
        }
    }

    let write = |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> Result<()>| -> Result<()> {
        let path = args.out.join(name);
        let mut w = create(&path)?;
        f(&mut w).with_context(|| format!("cannot write {}", path.display()))?;
        w.flush()?;
        Ok(())
    };
    write("per_song.csv", &|w| Ok(report::write_per_song_csv(w, &corpus, &metrics)?))?;
    write("aggregate.csv", &|w| Ok(report::write_aggregate_csv(w, &aggregates)?))?;
    write("top_words.csv", &|w| Ok(report::write_top_words_csv(w, &blocks)?))?;
    write("rank_series.csv", &|w| Ok(report::write_rank_series_csv(w, &series)?))?;
    info!("style tables for {} songs in {:.2?}", corpus.len(), started.elapsed());
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct TrainResolved<'a> {
    cache: &'a Path,
    sgns: &'a SgnsConfig,
}

pub fn train(args: &TrainArgs) -> Result<Status> {
    let file = config::load(args.config.as_deref())?.train;
    let defaults = SgnsConfig::default();
    let seed = args
        .seed
        .or(file.seed)
        .ok_or_else(|| anyhow!("training is stochastic; pass --seed or set train.seed in the config"))?;
    let deterministic = args.deterministic || (args.threads.is_none() && file.deterministic.unwrap_or(false));
    let threads = if deterministic {
        1
    } else {
        args.threads
            .or(file.threads)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    };
    let cfg = SgnsConfig {
        dim: args.dim.or(file.dim).unwrap_or(defaults.dim),
        window: args.window.or(file.window).unwrap_or(defaults.window),
        negatives: args.negatives.or(file.negatives).unwrap_or(defaults.negatives),
        epochs: args.epochs.or(file.epochs).unwrap_or(defaults.epochs),
        initial_learning_rate: args
            .learning_rate
            .or(file.learning_rate)
            .unwrap_or(defaults.initial_learning_rate),
        min_count: args.min_count.or(file.min_count).unwrap_or(defaults.min_count),
        subsample_threshold: args.subsample.or(file.subsample).unwrap_or(defaults.subsample_threshold),
        seed,
        threads,
    };
    cfg.validate()?;
    let corpus = load_corpus(&args.cache)?;
    create_dir(&args.out)?;
    config::echo(&args.out, "train", &TrainResolved { cache: &args.cache, sgns: &cfg })?;

    let started = Instant::now();
    let mut trainer = SgnsTrainer::new(&corpus, cfg.clone())?;
    info!("vocabulary: {} words", trainer.vocabulary().len());
    while trainer.epochs_done() < cfg.epochs {
        trainer.train_epoch();
        info!("epoch {} done after {:.2?}", trainer.epochs_done(), started.elapsed());
    }
    let table = trainer.into_table()?;
    let path = args.out.join("vectors.txt");
    table.save_path(&path)?;
    info!("wrote {} vectors to {}", table.len(), path.display());
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct WeatResolved<'a> {
    vectors: &'a Path,
    tests: Option<&'a Path>,
    options: &'a WeatOptions,
}

pub fn weat(args: &WeatArgs) -> Result<Status> {
    let file = config::load(args.config.as_deref())?.weat;
    let tests_path: Option<PathBuf> = args.tests.clone().or(file.tests);
    let exact = args.exact || (args.samples.is_none() && file.exact.unwrap_or(false));
    let mode = if exact {
        PValueMode::Exact
    } else {
        let samples = args.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        let seed = args
            .seed
            .or(file.seed)
            .ok_or_else(|| anyhow!("Monte Carlo p-values need --seed (or use --exact)"))?;
        PValueMode::MonteCarlo { samples, seed }
    };
    let options = WeatOptions {
        policy: args.policy.or(file.policy).unwrap_or(OovPolicy::DropAndBalance),
        mode,
        inclusive: args.inclusive || file.inclusive.unwrap_or(false),
    };
    let tests = match &tests_path {
        Some(p) => weat::load_battery(p)?,
        None => weat::bundled_battery(),
    };

    let started = Instant::now();
    let wanted = weat::battery_words(&tests);
    let (table, stats) = EmbeddingTable::load_path(&args.vectors, Some(&wanted))
        .with_context(|| format!("cannot load vectors from {}", args.vectors.display()))?;
    info!(
        "loaded {} of {} battery words ({} rows scanned) in {:.2?}",
        table.len(),
        wanted.len(),
        stats.rows,
        started.elapsed()
    );

    create_dir(&args.out)?;
    config::echo(
        &args.out,
        "weat",
        &WeatResolved {
            vectors: &args.vectors,
            tests: tests_path.as_deref(),
            options: &options,
        },
    )?;
    let started = Instant::now();
    let entries = weat::run_battery(&tests, &table, &options);
    info!("ran {} tests in {:.2?}", entries.len(), started.elapsed());

    let path = args.out.join("weat_results.csv");
    let mut w = create(&path)?;
    weat::write_results_csv(&mut w, &entries).with_context(|| format!("cannot write {}", path.display()))?;
    w.flush()?;
    let mut summary = Vec::new();
    weat::write_summary(&mut summary, &entries)?;
    let path = args.out.join("weat_summary.txt");
    fs::write(&path, &summary).with_context(|| format!("cannot write {}", path.display()))?;
    std::io::stdout().write_all(&summary)?;
    Ok(Status::Ok)
}
