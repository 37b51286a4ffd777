//! Command-line front end: one subcommand per pipeline stage, each writing
//! its outputs and a `manifest.json` under the output directory.

pub mod bundled;
pub mod config;
pub mod manifest;
pub mod report;

use std::ffi::OsString;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::augment::{
    augment_corpus, AugmentOptions, FileProvider, HttpProvider, IdentityProvider, MockProvider,
    TranslationCache, TranslationProvider, Translator,
};
use crate::corpus::{
    corpus_stats, labeled_to_tsv, load_labeled_tsv, load_scored_tsv, reported_stats, split_holdout,
    Corpus, Label, Language, Split,
};
use crate::encoder::{build_vocab, Checkpoint, EncoderModel};
use crate::eval::{
    ablation_augmentation, ablation_english, evaluate, grid_search, majority_baseline, EvalReport,
};
use crate::normalize::{NormalizationConfig, Normalizer};
use crate::train::{train_dual, train_single, Classifier};
use crate::weaklabel::build_weak_corpus;

pub use config::{PipelineConfig, ProviderKind};
pub use manifest::{Manifest, RunRecorder};
pub use report::{emit_report_table, TableLayout};

/// Environment variable holding the translation service credential.
pub const TRANSLATE_KEY_ENV: &str = "OFFLANG_TRANSLATE_KEY";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{layout} layout takes {expected} reports, got {found}")]
    ArityMismatch {
        layout: &'static str,
        expected: usize,
        found: usize,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            _ => 1,
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Runtime(e.to_string())
            }
        }
    )*};
}

runtime_from!(
    io::Error,
    crate::corpus::CorpusError,
    crate::normalize::NormalizeError,
    crate::weaklabel::WeakLabelError,
    crate::augment::AugmentError,
    crate::augment::TranslateError,
    crate::encoder::EncoderError,
    crate::train::TrainError,
    crate::eval::EvalError
);

#[derive(Debug, Parser)]
#[command(name = "offlang", version, about = "Offensive-language identification pipeline")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML pipeline configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Language code: en, da, tr, ar or el.
    #[arg(long, global = true)]
    pub language: Option<Language>,
    /// Use the bundled mini-corpus for missing train/test inputs.
    #[arg(long, global = true)]
    pub bundled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    /// Majority class of the training corpus.
    Majority,
    /// Majority baselines from the published class distributions of all
    /// five languages.
    Reported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AblationKind {
    Augmentation,
    English,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print class counts of a labeled TSV file.
    Stats {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Apply the tweet normalization pipeline to a labeled TSV file.
    Normalize {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Build a balanced weakly labeled corpus from confidence scores.
    Weaklabel {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        per_class: Option<usize>,
    },
    /// Cross-lingual augmentation of a training file (language defaults to da).
    Augment {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        provider: Option<ProviderKind>,
        /// Comma-separated pivot codes, e.g. en,fr,de.
        #[arg(long)]
        pivots: Option<String>,
    },
    /// Fine-tune an encoder (two encoders when a weak corpus is given).
    Train {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        weak: Option<PathBuf>,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Score a checkpoint or a baseline on a test file.
    Evaluate {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
    },
    /// Grid search over learning rates and batch sizes on a validation split.
    Gridsearch {
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        validation: Option<PathBuf>,
    },
    /// Run an ablation and emit its report table.
    Ablate {
        #[arg(long, value_enum)]
        kind: AblationKind,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        validation: Option<PathBuf>,
        #[arg(long)]
        weak: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        #[command(flatten)]
        hyper: HyperArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct HyperArgs {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Context {
    cfg: PipelineConfig,
    language: Language,
}

fn set_path(slot: &mut Option<PathBuf>, flag: &Option<PathBuf>) {
    if flag.is_some() {
        slot.clone_from(flag);
    }
}

fn context(common: &Common, command: &Command) -> Result<Context, CliError> {
    let mut cfg = match &common.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(l) = common.language {
        cfg.language = Some(l);
    }
    set_path(&mut cfg.out_dir, &common.out_dir);
    cfg.bundled |= common.bundled;
    let p = &mut cfg.paths;
    let mut hyper = None;
    let default_language = match command {
        Command::Augment { input, provider, pivots } => {
            set_path(&mut p.train, input);
            if let Some(k) = provider {
                cfg.augment.provider = *k;
            }
            if let Some(list) = pivots {
                cfg.augment.pivots = Some(list.split(',').map(|s| s.trim().to_string()).collect());
            }
            Language::Da
        }
        Command::Stats { input } | Command::Normalize { input } => {
            set_path(&mut p.train, input);
            Language::En
        }
        Command::Weaklabel { input, per_class } => {
            set_path(&mut p.scored, input);
            if let Some(k) = per_class {
                cfg.weaklabel.per_class_count = *k;
            }
            Language::En
        }
        Command::Train { train, weak, hyper: h } => {
            set_path(&mut p.train, train);
            set_path(&mut p.weak, weak);
            hyper = Some(h);
            Language::En
        }
        Command::Evaluate { checkpoint, test, train, .. } => {
            set_path(&mut p.checkpoint, checkpoint);
            set_path(&mut p.test, test);
            set_path(&mut p.train, train);
            Language::En
        }
        Command::Gridsearch { train, validation } => {
            set_path(&mut p.train, train);
            set_path(&mut p.validation, validation);
            Language::En
        }
        Command::Ablate { train, validation, weak, test, hyper: h, .. } => {
            set_path(&mut p.train, train);
            set_path(&mut p.validation, validation);
            set_path(&mut p.weak, weak);
            set_path(&mut p.test, test);
            hyper = Some(h);
            Language::En
        }
    };
    if let Some(h) = hyper {
        if h.epochs.is_some() {
            cfg.train.epochs = h.epochs;
        }
        if h.batch_size.is_some() {
            cfg.train.batch_size = h.batch_size;
        }
        if h.learning_rate.is_some() {
            cfg.train.learning_rate = h.learning_rate;
        }
    }
    let language = cfg.language_or(default_language);
    cfg.language = Some(language);
    cfg.validate(language)?;
    Ok(Context { cfg, language })
}

impl Context {
    fn recorder(&self, subcommand: &str) -> Result<RunRecorder, CliError> {
        let dir = self.cfg.out_dir.as_ref().ok_or_else(|| {
            CliError::Config("no output directory: pass --out-dir or set out_dir".into())
        })?;
        Ok(RunRecorder::new(dir, subcommand, self.cfg.fingerprint(), self.cfg.seed)?)
    }

    fn load_labeled(
        &self,
        path: &Option<PathBuf>,
        split: Split,
        what: &str,
        rec: Option<&mut RunRecorder>,
    ) -> Result<Corpus, CliError> {
        match path {
            Some(path) => {
                if let Some(rec) = rec {
                    rec.input(path)?;
                }
                Ok(load_labeled_tsv(path, self.language, split)?)
            }
            None if self.cfg.bundled && split != Split::Validation => {
                let tsv = match split {
                    Split::Test => bundled::test_tsv(self.language),
                    _ => bundled::train_tsv(self.language),
                };
                if let Some(rec) = rec {
                    rec.embedded_input(&format!("bundled:{}_{split}.tsv", self.language.code()), tsv.as_bytes());
                }
                Ok(bundled::load(self.language, split)?)
            }
            None => Err(CliError::Config(format!(
                "no {what} corpus: pass --{what} or set paths.{what} (or --bundled)"
            ))),
        }
    }

    fn normalizer(&self) -> Result<Option<Normalizer>, CliError> {
        if !self.cfg.normalize_enabled(self.language) {
            return Ok(None);
        }
        Normalizer::from_config(&self.cfg.normalize.config)
            .map(Some)
            .map_err(|e| CliError::Config(format!("normalize: {e}")))
    }

    fn provider(&self) -> Result<Box<dyn TranslationProvider>, CliError> {
        let a = &self.cfg.augment;
        Ok(match a.provider {
            ProviderKind::Mock => Box::new(MockProvider::new()),
            ProviderKind::Identity => Box::new(IdentityProvider),
            ProviderKind::File => {
                let path = self.cfg.paths.translations.as_ref().expect("validated");
                Box::new(FileProvider::load(path)?)
            }
            ProviderKind::Http => Box::new(HttpProvider::new(
                a.endpoint.clone().expect("validated"),
                std::env::var(TRANSLATE_KEY_ENV).ok(),
                Duration::from_secs(a.timeout_secs),
            )),
        })
    }

    fn cache(&self) -> Result<TranslationCache, CliError> {
        Ok(match &self.cfg.paths.cache {
            Some(path) => TranslationCache::open(path)?,
            None => TranslationCache::in_memory(),
        })
    }

    fn augment_options(&self) -> AugmentOptions {
        AugmentOptions {
            policy: self.cfg.augment.policy,
            max_in_flight: self.cfg.augment.max_in_flight,
        }
    }

    fn augment(&self, corpus: &Corpus) -> Result<Corpus, CliError> {
        let provider = self.provider()?;
        let cache = self.cache()?;
        let translator = Translator::new(provider.as_ref()).with_cache(&cache);
        let pivots = self.cfg.pivots(self.language)?;
        Ok(augment_corpus(corpus, &pivots, &translator, self.augment_options())?)
    }

    /// Normalization, then augmentation when enabled.
    fn prepare_training(&self, corpus: &Corpus, normalizer: &Option<Normalizer>) -> Result<Corpus, CliError> {
        let corpus = apply_normalizer(corpus, normalizer)?;
        if self.cfg.augment_enabled(self.language) {
            self.augment(&corpus)
        } else {
            Ok(corpus)
        }
    }

    /// Validation corpus from its own file, or a stratified holdout of the
    /// training corpus.
    fn train_and_validation(&self, rec: &mut RunRecorder) -> Result<(Corpus, Corpus), CliError> {
        let train = self.load_labeled(&self.cfg.paths.train, Split::Train, "train", Some(rec))?;
        match &self.cfg.paths.validation {
            Some(_) => {
                let val = self.load_labeled(&self.cfg.paths.validation, Split::Validation, "validation", Some(rec))?;
                Ok((train, val))
            }
            None => Ok(split_holdout(&train, self.cfg.holdout_fraction, self.cfg.seed)?),
        }
    }
}

fn apply_normalizer(corpus: &Corpus, normalizer: &Option<Normalizer>) -> Result<Corpus, CliError> {
    Ok(match normalizer {
        Some(n) => corpus.map_texts(|t| n.normalize(t))?,
        None => corpus.clone(),
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let ctx = context(&cli.common, &cli.command)?;
    match &cli.command {
        Command::Stats { .. } => cmd_stats(&ctx),
        Command::Normalize { .. } => cmd_normalize(&ctx),
        Command::Weaklabel { .. } => cmd_weaklabel(&ctx),
        Command::Augment { .. } => cmd_augment(&ctx),
        Command::Train { .. } => cmd_train(&ctx),
        Command::Evaluate { baseline, .. } => cmd_evaluate(&ctx, *baseline),
        Command::Gridsearch { .. } => cmd_gridsearch(&ctx),
        Command::Ablate { kind, .. } => cmd_ablate(&ctx, *kind),
    }
}

fn cmd_stats(ctx: &Context) -> Result<(), CliError> {
    let mut rec = match ctx.cfg.out_dir {
        Some(_) => Some(ctx.recorder("stats")?),
        None => None,
    };
    let corpus = ctx.load_labeled(&ctx.cfg.paths.train, Split::Train, "input", rec.as_mut())?;
    let stats = corpus_stats(&corpus);
    println!("{stats}");
    if let Some(mut rec) = rec {
        rec.write("stats.json", to_json(&stats))?;
        rec.finish()?;
    }
    Ok(())
}

fn cmd_normalize(ctx: &Context) -> Result<(), CliError> {
    let mut rec = ctx.recorder("normalize")?;
    let corpus = ctx.load_labeled(&ctx.cfg.paths.train, Split::Train, "input", Some(&mut rec))?;
    let normalizer = Normalizer::from_config(&ctx.cfg.normalize.config)
        .map_err(|e| CliError::Config(format!("normalize: {e}")))?;
    let out = corpus.map_texts(|t| normalizer.normalize(t))?;
    rec.write("normalized.tsv", labeled_to_tsv(&out)?)?;
    rec.finish()?;
    println!("normalized {} examples", out.len());
    Ok(())
}

fn cmd_weaklabel(ctx: &Context) -> Result<(), CliError> {
    let mut rec = ctx.recorder("weaklabel")?;
    let path = ctx.cfg.paths.scored.as_ref().ok_or_else(|| {
        CliError::Config("no scored corpus: pass --input or set paths.scored".into())
    })?;
    rec.input(path)?;
    let scored = load_scored_tsv(path)?;
    let corpus = build_weak_corpus(&scored, &ctx.cfg.weaklabel_config())?;
    rec.write("weak.tsv", labeled_to_tsv(&corpus)?)?;
    rec.finish()?;
    println!("{}", corpus_stats(&corpus));
    Ok(())
}

fn cmd_augment(ctx: &Context) -> Result<(), CliError> {
    let mut rec = ctx.recorder("augment")?;
    let corpus = ctx.load_labeled(&ctx.cfg.paths.train, Split::Train, "input", Some(&mut rec))?;
    let out = ctx.augment(&corpus)?;
    rec.write("augmented.tsv", labeled_to_tsv(&out)?)?;
    rec.finish()?;
    println!("{} -> {} examples {}", corpus.len(), out.len(), corpus_stats(&out));
    Ok(())
}

const NORMALIZATION_KEY: &str = "normalization";

fn cmd_train(ctx: &Context) -> Result<(), CliError> {
    let mut rec = ctx.recorder("train")?;
    let normalizer = ctx.normalizer()?;
    let raw = ctx.load_labeled(&ctx.cfg.paths.train, Split::Train, "train", Some(&mut rec))?;
    let train = ctx.prepare_training(&raw, &normalizer)?;
    let weak = match &ctx.cfg.paths.weak {
        Some(_) => Some(apply_normalizer(
            &ctx.load_labeled(&ctx.cfg.paths.weak, Split::Train, "weak", Some(&mut rec))?,
            &normalizer,
        )?),
        None => None,
    };
    let enc_cfg = ctx.cfg.encoder_config();
    let train_cfg = ctx.cfg.train_config(ctx.language);

    let mut vocab_source = train.examples().to_vec();
    if let Some(w) = &weak {
        vocab_source.extend(w.examples().iter().enumerate().map(|(i, e)| {
            let mut e = e.clone();
            e.id = format!("weak-{i}");
            e
        }));
    }
    let vocab = build_vocab(&Corpus::new(ctx.language, Split::Train, vocab_source)?, enc_cfg.vocab_cap)?;
    let fresh = EncoderModel::new(enc_cfg, vocab.len())?;
    let outcome = match &weak {
        None => train_single(&train, &fresh, &vocab, &train_cfg)?,
        Some(weak) => {
            let a = train_single(&train, &fresh, &vocab, &train_cfg)?;
            let b = train_single(weak, &fresh, &vocab, &train_cfg)?;
            train_dual(&train, &a.classifier.encoders[0], &b.classifier.encoders[0], &vocab, &train_cfg)?
        }
    };

    let mut ck = outcome.classifier.to_checkpoint();
    crate::train::push_adam_state(&mut ck, &outcome.optimizer);
    ck.metadata.insert("config_fingerprint".into(), json!(ctx.cfg.fingerprint()));
    ck.metadata.insert("seed".into(), json!(ctx.cfg.seed));
    ck.metadata.insert("language".into(), json!(ctx.language));
    let norm: Option<&NormalizationConfig> = normalizer.as_ref().map(|_| &ctx.cfg.normalize.config);
    ck.metadata.insert(NORMALIZATION_KEY.into(), json!(norm));
    rec.write("checkpoint.json", ck.to_json())?;
    rec.write("vocab.tsv", vocab.to_tsv())?;
    rec.write("loss.csv", outcome.loss_csv())?;
    rec.finish()?;
    println!(
        "trained on {} examples, final mean loss {:.4}",
        train.len(),
        outcome.loss_trace.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn write_report(rec: &mut RunRecorder, report: &EvalReport) -> Result<(), CliError> {
    rec.write("report.json", to_json(report))?;
    rec.write(
        "report.tsv",
        format!("Macro-F1\tAccuracy\n{:.4}\t{:.4}\n", report.macro_f1, report.accuracy),
    )?;
    println!("macro-F1 {:.4}  accuracy {:.4}", report.macro_f1, report.accuracy);
    Ok(())
}

fn cmd_evaluate(ctx: &Context, baseline: Option<Baseline>) -> Result<(), CliError> {
    let mut rec = ctx.recorder("evaluate")?;
    match baseline {
        Some(Baseline::Reported) => {
            let reports = report::TABLE2_LANGUAGES
                .iter()
                .map(|&l| {
                    let train = reported_stats(l, Split::Train).expect("published stats");
                    let test = reported_stats(l, Split::Test).expect("published stats");
                    let mut gold = vec![Label::Off; test.off_count];
                    gold.extend(vec![Label::Not; test.not_count]);
                    majority_baseline(&train, &gold)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let table = emit_report_table(&reports, &TableLayout::Table2 { system: "Majority baseline".into() })?;
            rec.write("baseline.json", to_json(&reports))?;
            rec.write("table2.tsv", &table)?;
            rec.finish()?;
            print!("{table}");
            return Ok(());
        }
        Some(Baseline::Majority) => {
            let train = ctx.load_labeled(&ctx.cfg.paths.train, Split::Train, "train", Some(&mut rec))?;
            let test = ctx.load_labeled(&ctx.cfg.paths.test, Split::Test, "test", Some(&mut rec))?;
            let report = majority_baseline(&corpus_stats(&train), &test.labels())?
                .with_provenance(ctx.cfg.fingerprint(), ctx.cfg.seed);
            write_report(&mut rec, &report)?;
            rec.finish()?;
            return Ok(());
        }
        None => {}
    }

    let ck_path = match &ctx.cfg.paths.checkpoint {
        Some(p) => p.clone(),
        None => {
            let fallback = ctx.cfg.out_dir.as_deref().unwrap_or(Path::new(".")).join("checkpoint.json");
            if !fallback.exists() {
                return Err(CliError::Config(
                    "no checkpoint: pass --checkpoint or set paths.checkpoint".into(),
                ));
            }
            fallback
        }
    };
    rec.input(&ck_path)?;
    let ck = Checkpoint::load(&ck_path)?;
    let classifier = Classifier::from_checkpoint(&ck)?;
    let normalizer = match ck.metadata.get(NORMALIZATION_KEY) {
        Some(v) if !v.is_null() => {
            let c: NormalizationConfig = serde_json::from_value(v.clone())
                .map_err(|e| CliError::Runtime(format!("checkpoint normalization: {e}")))?;
            Some(Normalizer::from_config(&c)?)
        }
        _ => None,
    };
    let test = ctx.load_labeled(&ctx.cfg.paths.test, Split::Test, "test", Some(&mut rec))?;
    let prepared = apply_normalizer(&test, &normalizer)?;
    let predictions = classifier.predict_corpus(&prepared)?;
    let fingerprint = ck
        .metadata
        .get("config_fingerprint")
        .and_then(|v| v.as_str())
        .unwrap_or_default()
        .to_string();
    let seed = ck.metadata.get("seed").and_then(|v| v.as_u64()).unwrap_or(0);
    let report = evaluate(&predictions, &test.labels())?.with_provenance(fingerprint, seed);
    let mut rows = String::from("id\tgold\tpredicted\n");
    for (e, p) in test.examples().iter().zip(&predictions) {
        rows.push_str(&format!("{}\t{}\t{}\n", e.id, e.label, p));
    }
    rec.write("predictions.tsv", rows)?;
    write_report(&mut rec, &report)?;
    rec.finish()?;
    Ok(())
}

fn cmd_gridsearch(ctx: &Context) -> Result<(), CliError> {
    let mut rec = ctx.recorder("gridsearch")?;
    let normalizer = ctx.normalizer()?;
    let (train, validation) = ctx.train_and_validation(&mut rec)?;
    let train = ctx.prepare_training(&train, &normalizer)?;
    let validation = apply_normalizer(&validation, &normalizer)?;
    let result = grid_search(
        &ctx.cfg.grid,
        &train,
        &validation,
        &ctx.cfg.encoder_config(),
        &ctx.cfg.train_config(ctx.language),
    )?;
    let mut tsv = String::from("learning_rate\tbatch_size\tMacro-F1\tAccuracy\n");
    for c in &result.cells {
        match &c.report {
            Some(r) => tsv.push_str(&format!(
                "{}\t{}\t{:.4}\t{:.4}\n",
                c.learning_rate, c.batch_size, r.macro_f1, r.accuracy
            )),
            None => tsv.push_str(&format!("{}\t{}\tdiverged\tdiverged\n", c.learning_rate, c.batch_size)),
        }
    }
    rec.write("grid.json", to_json(&result))?;
    rec.write("grid.tsv", &tsv)?;
    rec.finish()?;
    print!("{tsv}");
    println!(
        "best: learning_rate={} batch_size={}",
        result.best.learning_rate, result.best.batch_size
    );
    Ok(())
}

fn cmd_ablate(ctx: &Context, kind: AblationKind) -> Result<(), CliError> {
    let mut rec = ctx.recorder("ablate")?;
    let normalizer = ctx.normalizer()?;
    let enc_cfg = ctx.cfg.encoder_config();
    let train_cfg = ctx.cfg.train_config(ctx.language);
    let (rows, table) = match kind {
        AblationKind::Augmentation => {
            let (train, validation) = ctx.train_and_validation(&mut rec)?;
            let train = apply_normalizer(&train, &normalizer)?;
            let validation = apply_normalizer(&validation, &normalizer)?;
            let provider = ctx.provider()?;
            let cache = ctx.cache()?;
            let translator = Translator::new(provider.as_ref()).with_cache(&cache);
            let pivots = ctx.cfg.pivots(ctx.language)?;
            let r = ablation_augmentation(
                &train,
                &validation,
                &pivots,
                &translator,
                &ctx.augment_options(),
                &enc_cfg,
                &train_cfg,
            )?;
            let table = emit_report_table(&[r.without.clone(), r.with.clone()], &TableLayout::Table4)?;
            (r.rows(), table)
        }
        AblationKind::English => {
            if ctx.cfg.paths.weak.is_none() {
                return Err(CliError::Config(
                    "english ablation needs a weak corpus: pass --weak or set paths.weak".into(),
                ));
            }
            let clean = ctx.load_labeled(&ctx.cfg.paths.train, Split::Train, "train", Some(&mut rec))?;
            let weak = ctx.load_labeled(&ctx.cfg.paths.weak, Split::Train, "weak", Some(&mut rec))?;
            let test = ctx.load_labeled(&ctx.cfg.paths.test, Split::Test, "test", Some(&mut rec))?;
            let r = ablation_english(
                &apply_normalizer(&clean, &normalizer)?,
                &apply_normalizer(&weak, &normalizer)?,
                &apply_normalizer(&test, &normalizer)?,
                &enc_cfg,
                &train_cfg,
            )?;
            let rows = r.rows();
            let reports: Vec<EvalReport> = rows.iter().map(|l| l.report.clone()).collect();
            (rows, emit_report_table(&reports, &TableLayout::Table3)?)
        }
    };
    let name = match kind {
        AblationKind::Augmentation => "table4.tsv",
        AblationKind::English => "table3.tsv",
    };
    rec.write("ablation.json", to_json(&rows))?;
    rec.write(name, &table)?;
    rec.finish()?;
    print!("{table}");
    Ok(())
}
