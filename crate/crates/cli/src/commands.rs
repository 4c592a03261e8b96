use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use hornex_core::eval::{
    estimate_scores, fraction_valid, generate_random_dataset, run_experiment, EvalConfig,
    ExperimentSpec, DEFAULT_ETA, DEFAULT_T,
};
use hornex_core::exact::dg_basis_with_stats;
use hornex_core::io::{
    load_learner_config, parse_formula, serialize_formula, write_burmeister, ContextDocument,
    Provenance,
};
use hornex_core::rng::session_rng;
use hornex_core::{
    pac_horn_approximation, AttributeUniverse, DatasetOracle, ExactError, LearnerConfig,
};
use serde::Serialize;

use crate::data;
use crate::{BenchArgs, EvalArgs, ExactArgs, GenArgs, LearnArgs, Outcome, ServeArgs};

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn learn(a: LearnArgs) -> Result<Outcome> {
    let mut config = match &a.config {
        Some(p) => load_learner_config(&data::locate(p))?,
        None => LearnerConfig::new(a.epsilon.unwrap_or(1.0), a.delta.unwrap_or(1.0)),
    };
    if let Some(e) = a.epsilon {
        config.epsilon = e;
    }
    if let Some(d) = a.delta {
        config.delta = d;
    }
    if let Some(m) = a.mode {
        config.mode = m.into();
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if a.cache {
        config.cache_counterexamples = true;
        config.cache_confirmed = true;
    }
    config.valid_hypothesis |= a.valid_hypothesis;
    if a.max_counterexamples.is_some() {
        config.max_counterexamples = a.max_counterexamples;
    }
    config.validate()?;

    let doc = data::load(&a.data.data, a.data.scaling.as_deref())?;
    let mut oracle = DatasetOracle::new(Arc::new(doc.family));
    let (h, mut report) = pac_horn_approximation(&mut oracle, &config)?;
    if !a.timings {
        report.wall_time_ms = None;
    }
    write(&a.out, &serialize_formula(&h, &doc.universe))?;
    emit(a.report.as_deref(), &pretty(&report))?;
    Ok(if report.terminated {
        Outcome::Done
    } else {
        Outcome::Stopped
    })
}

#[derive(Serialize)]
struct ExactSummary {
    implications: usize,
    attributes: usize,
    objects: usize,
    visited: u64,
}

pub fn exact_basis(a: ExactArgs) -> Result<Outcome> {
    let doc = data::load(&a.data.data, a.data.scaling.as_deref())?;
    match dg_basis_with_stats(&doc.family, a.budget) {
        Ok((h, stats)) => {
            write(&a.out, &serialize_formula(&h, &doc.universe))?;
            print!(
                "{}",
                pretty(&ExactSummary {
                    implications: h.len(),
                    attributes: doc.universe.len(),
                    objects: doc.family.len(),
                    visited: stats.visited,
                })
            );
            Ok(Outcome::Done)
        }
        Err(e @ ExactError::BudgetExceeded { .. }) => {
            eprintln!("stopped: {e}");
            Ok(Outcome::Stopped)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct EvalReport {
    samples: u64,
    eta: Option<f64>,
    t: Option<f64>,
    seed: u64,
    basis_size: usize,
    precision: f64,
    recall: f64,
    fraction_valid: f64,
}

pub fn eval(a: EvalArgs) -> Result<Outcome> {
    let config = EvalConfig {
        eta: a.eta.unwrap_or(DEFAULT_ETA),
        t: a.t.unwrap_or(DEFAULT_T),
        samples: a.samples,
        seed: a.seed,
    };
    config.validate()?;
    let doc = data::load(&a.data.data, a.data.scaling.as_deref())?;
    let basis = data::locate(&a.basis);
    let text =
        fs::read_to_string(&basis).with_context(|| format!("reading {}", basis.display()))?;
    let h = parse_formula(&text, &doc.universe)
        .with_context(|| format!("parsing {}", basis.display()))?;
    let n = config.sample_size();
    let scores = estimate_scores(&h, &doc.family, n, &mut session_rng(config.seed))?;
    let hoeffding = a.samples.is_none();
    let report = EvalReport {
        samples: n,
        eta: hoeffding.then_some(config.eta),
        t: hoeffding.then_some(config.t),
        seed: config.seed,
        basis_size: h.len(),
        precision: scores.precision,
        recall: scores.recall,
        fraction_valid: fraction_valid(&h, &doc.family)?,
    };
    emit(a.out.as_deref(), &pretty(&report))?;
    Ok(Outcome::Done)
}

pub fn gen_random(a: GenArgs) -> Result<Outcome> {
    let like = a
        .like
        .as_deref()
        .map(|p| data::load(p, a.scaling.as_deref()))
        .transpose()?;
    let rows = a
        .rows
        .or(like.as_ref().map(|d| d.family.len()))
        .expect("clap requires rows");
    let attrs = a
        .attrs
        .or(like.as_ref().map(|d| d.universe.len()))
        .expect("clap requires attrs");
    let density = a
        .density
        .or(like.as_ref().map(|d| d.family.density()))
        .expect("clap requires density");
    let family = generate_random_dataset(rows, attrs, density, &mut session_rng(a.seed))?;
    let doc = ContextDocument {
        title: Some(format!(
            "random {rows}x{attrs} density={density} seed={}",
            a.seed
        )),
        universe: AttributeUniverse::anonymous(attrs),
        family,
        provenance: Provenance::default(),
    };
    write(&a.out, &write_burmeister(&doc))?;
    Ok(Outcome::Done)
}

const DEFAULT_EPSILONS: [f64; 3] = [0.1, 0.01, 0.001];
const EXTREME_EPSILON: f64 = 1e-4;

pub fn bench(a: BenchArgs) -> Result<Outcome> {
    let epsilons = if a.epsilon.is_empty() {
        let mut e = DEFAULT_EPSILONS.to_vec();
        if a.extreme {
            e.push(EXTREME_EPSILON);
        }
        e
    } else {
        a.epsilon.clone()
    };
    if !a.extreme && epsilons.iter().any(|&e| e < 1e-3) {
        bail!("epsilon below 0.001 needs --extreme");
    }
    if a.repetitions == 0 {
        bail!("--repetitions must be at least 1");
    }
    if a.extreme {
        eprintln!("warning: epsilon {EXTREME_EPSILON} runs issue tens of millions of queries and can take hours");
    }
    let grid = epsilons
        .iter()
        .flat_map(|&e| a.delta.iter().map(move |&d| (e, d)))
        .collect();
    let mut learner = LearnerConfig::new(1.0, 1.0).with_mode(a.mode.into());
    learner.cache_counterexamples = a.cache;
    learner.cache_confirmed = a.cache;
    learner.valid_hypothesis = a.valid_hypothesis;
    let spec = ExperimentSpec {
        grid,
        repetitions: a.repetitions,
        learner,
        master_seed: a.seed,
        eval: EvalConfig {
            samples: a.eval_samples,
            seed: a.eval_seed,
            ..EvalConfig::default()
        },
        timing: a.timings,
    };
    let doc = data::load(&a.data.data, a.data.scaling.as_deref())?;
    let report = run_experiment(Arc::new(doc.family), &spec)?;
    if let Some(out) = &a.out {
        write(out, &report.to_jsonl())?;
    }
    print!("{}", report.summary_table());
    if let Some(r) = report.records.iter().find(|r| r.error.is_some()) {
        bail!(
            "run {} of cell ({}, {}) failed: {}",
            r.repetition,
            r.epsilon,
            r.delta,
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(if report.records.iter().all(|r| r.terminated) {
        Outcome::Done
    } else {
        Outcome::Stopped
    })
}

pub fn serve(a: ServeArgs) -> Result<Outcome> {
    use hornex_service::{AppState, Dataset, Store};

    let mut datasets = HashMap::new();
    for p in &a.data {
        let doc = data::load(p, None)?;
        datasets.insert(data::name_of(p), Dataset::from(doc));
    }
    let store = a
        .state_dir
        .as_deref()
        .map(|d| Store::open(d).with_context(|| format!("opening {}", d.display())))
        .transpose()?;
    let state = Arc::new(AppState::new(datasets, store));
    let restored = state.restore()?;

    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.bind.as_str(), a.port))
            .await
            .with_context(|| format!("binding {}:{}", a.bind, a.port))?;
        eprintln!(
            "listening on http://{} ({} datasets: {:?}, {restored} sessions restored)",
            listener.local_addr()?,
            state.dataset_names().len(),
            state.dataset_names()
        );
        hornex_service::serve(listener, state.clone()).await?;
        anyhow::Ok(())
    })?;
    Ok(Outcome::Done)
}
