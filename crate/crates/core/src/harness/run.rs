use std::borrow::Cow;
use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::corpus::{load_ensemble, Ensemble};
use super::report::{add_quartiles, Artifact, RunReport};
use crate::container::{params_from_container, DType, ImportOptions, Tensor, TensorContainer};
use crate::dynamics::{
    deviation, effective_dimension, local_lyapunov, pca_project, transient_chaos_length, ChaosClass,
    LleParams, LyapunovSeries,
};
use crate::embedding::{embed, EmbeddingParams, MASK};
use crate::encoder::{Encoder, StateMatrix, StateTrajectory};
use crate::readout::{
    draw_cell, handwriting_sweep, layer_sweep, ErrorMap, FeatureMap, HandwritingSetup, LetterPath,
    SoftmaxParams, SweepTask, Window,
};
use crate::rng;
use crate::{Error, Result};

/// Encoder and embedding used for one ensemble member.
#[derive(Debug, Clone)]
pub struct Model {
    pub encoder: Encoder,
    pub embedding: EmbeddingParams,
}

struct Setup {
    ensemble: Ensemble,
    shared: Option<Model>,
}

impl Setup {
    fn load(config: &ExperimentConfig) -> Result<Self> {
        if let Some(path) = &config.params.container {
            let container = TensorContainer::read(&config.resolve(path))?;
            let model = import(config, &container)?;
            let ensemble = load_ensemble(config, Some(model.embedding.vocab_size()))?;
            return Ok(Self {
                ensemble,
                shared: Some(model),
            });
        }
        let ensemble = load_ensemble(config, None)?;
        let shared = if config.params.per_member {
            None
        } else {
            Some(random_model(config, ensemble.vocab_size, 0, 1)?)
        };
        Ok(Self { ensemble, shared })
    }

    fn model(&self, config: &ExperimentConfig, member: usize) -> Result<Cow<'_, Model>> {
        match &self.shared {
            Some(m) => Ok(Cow::Borrowed(m)),
            None => {
                let i = member as u64;
                random_model(config, self.ensemble.vocab_size, 20_000 + i, 30_000 + i).map(Cow::Owned)
            }
        }
    }

    fn initial_state(&self, model: &Model, member: usize) -> Result<StateMatrix> {
        embed(&self.ensemble.ids[member], &model.embedding)
    }

    fn size(&self) -> usize {
        self.ensemble.ids.len()
    }
}

fn import(config: &ExperimentConfig, container: &TensorContainer) -> Result<Model> {
    let options = ImportOptions {
        num_heads: config.encoder.num_heads,
        use_positional: config.embedding.use_positional,
        layernorm_epsilon: config.encoder.layernorm_epsilon,
    };
    let m = params_from_container(container, &options)?;
    Ok(Model {
        encoder: m.encoder,
        embedding: m.embedding,
    })
}

fn random_model(config: &ExperimentConfig, vocab_size: usize, enc_stream: u64, emb_stream: u64) -> Result<Model> {
    let encoder = Encoder::random(config.encoder_config()?, rng::derive_seed(config.seed, enc_stream))?;
    let embedding = EmbeddingParams::random(
        &config.embedding_config(vocab_size),
        rng::derive_seed(config.seed, emb_stream),
    )?;
    Ok(Model { encoder, embedding })
}

/// Visit `x_0, ..., x_steps`; returns the step at which `f` overflowed, if any.
fn walk(encoder: &Encoder, x0: &StateMatrix, steps: usize, mut visit: impl FnMut(usize, &StateMatrix)) -> Option<usize> {
    let mut x = x0.clone();
    visit(0, &x);
    for t in 1..=steps {
        match encoder.step(&x) {
            Ok(y) => x = y,
            Err(_) => return Some(t),
        }
        visit(t, &x);
    }
    None
}

fn record(encoder: &Encoder, x0: &StateMatrix, steps: usize, keep: impl Fn(usize) -> bool) -> (StateTrajectory, Option<usize>) {
    let mut traj = StateTrajectory::default();
    let overflow = walk(encoder, x0, steps, |t, x| {
        if keep(t) {
            traj.times.push(t);
            traj.states.push(x.clone());
        }
    });
    (traj, overflow)
}

fn strided(stride: usize, steps: usize) -> impl Fn(usize) -> bool {
    move |t| t % stride == 0 || t == steps
}

/// A recorded trajectory as a container holding `times` `[T]` and `states`
/// `[T, N_w, N_h]`.
pub fn trajectory_container(traj: &StateTrajectory) -> TensorContainer {
    let mut c = TensorContainer::new();
    let (w, h) = traj.states.first().map_or((0, 0), |s| (s.n_tokens(), s.hidden_dim()));
    let times = Tensor {
        dtype: DType::F64,
        dims: vec![traj.len()],
        data: traj.times.iter().map(|&t| t as f64).collect(),
    };
    let states = Tensor {
        dtype: DType::F64,
        dims: vec![traj.len(), w, h],
        data: traj.states.iter().flat_map(|s| s.iter().copied()).collect(),
    };
    c.insert("times", times).expect("fresh container");
    c.insert("states", states).expect("fresh container");
    c
}

/// Inverse of [`trajectory_container`].
pub fn load_trajectory(path: &Path) -> Result<StateTrajectory> {
    let c = TensorContainer::read(path)?;
    let get = |n: &str| c.get(n).ok_or_else(|| Error::MissingTensor(n.into()));
    let times = get("times")?;
    let states = get("states")?;
    let [t, w, h] = states.dims[..] else {
        return Err(Error::Shape {
            name: "states".into(),
            expected: vec![times.data.len(), 0, 0],
            actual: states.dims.clone(),
        });
    };
    if times.dims != [t] {
        return Err(Error::Shape {
            name: "times".into(),
            expected: vec![t],
            actual: times.dims.clone(),
        });
    }
    let states = states
        .data
        .chunks_exact((w * h).max(1))
        .take(t)
        .map(|chunk| StateMatrix::new(Array2::from_shape_vec((w, h), chunk.to_vec()).expect("sized chunk")))
        .collect::<Result<Vec<_>>>()?;
    Ok(StateTrajectory {
        times: times.data.iter().map(|&v| v as usize).collect(),
        states,
    })
}

fn dump_name(member: usize) -> String {
    format!("trajectories/member_{member:04}.tdlab")
}

fn all_failed(report: &RunReport, n: usize) -> Result<()> {
    if report.truncated_members.len() == n {
        return Err(Error::EnsembleFailed(format!("all {n} members overflowed")));
    }
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Execute one experiment on a pool of `workers` threads. The report, and
/// every artifact in it except the wall-clock line, depends only on the
/// config and the input files.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut report = pool.install(|| match config.kind {
        ExperimentKind::ImportCheck => import_check(config),
        kind => {
            let setup = Setup::load(config)?;
            match kind {
                ExperimentKind::Sync => sync(config, &setup),
                ExperimentKind::Lle => lle(config, &setup),
                ExperimentKind::Effdim => effdim(config, &setup),
                ExperimentKind::Transient => transient(config, &setup),
                ExperimentKind::Handwriting => handwriting(config, &setup),
                ExperimentKind::MlmSweep => mlm_sweep(config, &setup),
                ExperimentKind::ImportCheck => unreachable!(),
            }
        }
    })?;
    report.wall_clock = start.elapsed();
    Ok(report)
}

struct SyncMember {
    offset: Option<usize>,
    deviation: Vec<(usize, f64)>,
    attention_error: Option<f64>,
    overflow: Option<usize>,
    traj: Option<StateTrajectory>,
}

fn sync(config: &ExperimentConfig, setup: &Setup) -> Result<RunReport> {
    let steps = config.steps;
    let keep = strided(config.stride, steps);
    let members = (0..setup.size())
        .into_par_iter()
        .map(|i| -> Result<SyncMember> {
            let model = setup.model(config, i)?;
            let x0 = setup.initial_state(&model, i)?;
            let mut offset = None;
            let mut series = Vec::new();
            let mut traj = config.dump_states.then(StateTrajectory::default);
            let mut last = x0.clone();
            let overflow = walk(&model.encoder, &x0, steps, |t, x| {
                let d = deviation(x);
                if offset.is_none() && d < config.sync.threshold {
                    offset = Some(t);
                }
                if keep(t) {
                    series.push((t, d));
                    if let Some(tr) = traj.as_mut() {
                        tr.times.push(t);
                        tr.states.push(x.clone());
                    }
                }
                if t == steps {
                    last = x.clone();
                }
            });
            let attention_error = (overflow.is_none() && offset.is_some()).then(|| {
                let uniform = 1.0 / last.n_tokens() as f64;
                model
                    .encoder
                    .attention(&last)
                    .iter()
                    .flat_map(|p| p.iter().map(|v| (v - uniform).abs()).collect::<Vec<_>>())
                    .fold(0.0, f64::max)
            });
            Ok(SyncMember {
                offset,
                deviation: series,
                attention_error,
                overflow,
                traj,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = RunReport::new(config.clone());
    let mut csv = String::from("member,offset,truncated\n");
    for (i, m) in members.iter().enumerate() {
        csv.push_str(&format!("{i},{},{}\n", opt(m.offset), m.overflow.is_some()));
        if m.overflow.is_some() {
            report.truncated_members.push(i);
        }
    }
    all_failed(&report, members.len())?;
    report.artifacts.push(Artifact::text("sync_offsets.csv", csv));
    report.artifacts.push(Artifact::text("deviation_mean.csv", mean_over_members(members.iter().map(|m| &m.deviation[..]))));
    for (i, m) in members.iter().enumerate() {
        if let Some(tr) = &m.traj {
            report.artifacts.push(Artifact { name: dump_name(i), bytes: trajectory_container(tr).to_bytes() });
        }
    }
    let offsets: Vec<f64> = members.iter().filter_map(|m| m.offset.map(|o| o as f64)).collect();
    report.add("members", members.len());
    report.add("synchronized", offsets.len());
    report.add("synchronized_fraction", offsets.len() as f64 / members.len() as f64);
    add_quartiles(&mut report, "offset", &offsets);
    let att = members.iter().filter_map(|m| m.attention_error).fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
    report.add("max_final_attention_error", opt(att));
    Ok(report)
}

/// `t,value` CSV averaging, at each time, the members that reached it.
fn mean_over_members<'a>(series: impl Iterator<Item = &'a [(usize, f64)]>) -> String {
    let mut acc: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for s in series {
        for &(t, v) in s {
            let e = acc.entry(t).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    let mut out = String::from("t,value\n");
    for (t, (sum, n)) in acc {
        out.push_str(&format!("{t},{}\n", sum / n as f64));
    }
    out
}

fn lle_params(config: &ExperimentConfig, member: usize) -> LleParams {
    LleParams {
        k: config.lle.k,
        tau: config.lle.tau,
        horizon: config.lle.horizon,
        seed: rng::derive_seed(config.seed, 10_000 + member as u64),
    }
}

fn lle_members(config: &ExperimentConfig, setup: &Setup) -> Result<Vec<LyapunovSeries>> {
    (0..setup.size())
        .into_par_iter()
        .map(|i| {
            let model = setup.model(config, i)?;
            let x0 = setup.initial_state(&model, i)?;
            local_lyapunov(&model.encoder, &x0, &lle_params(config, i))
        })
        .collect()
}

fn lle_report(config: &ExperimentConfig, series: &[LyapunovSeries]) -> Result<RunReport> {
    let mut report = RunReport::new(config.clone());
    let mut csv = String::from("member,mean_lambda,samples,truncated\n");
    let mut means = Vec::new();
    for (i, s) in series.iter().enumerate() {
        let mean = s.mean_per_step();
        csv.push_str(&format!("{i},{},{},{}\n", opt(mean), s.len(), s.truncated()));
        if s.truncated() {
            report.truncated_members.push(i);
        }
        means.extend(mean);
    }
    all_failed(&report, series.len())?;
    let per_step: Vec<Vec<(usize, f64)>> = series.iter().map(|s| s.per_step.iter().collect()).collect();
    report.artifacts.push(Artifact::text("lle_members.csv", csv));
    report.artifacts.push(Artifact::text("lle_mean.csv", mean_over_members(per_step.iter().map(Vec::as_slice))));
    report.add("members", series.len());
    add_quartiles(&mut report, "lambda", &means);
    let positive = means.iter().filter(|&&m| m > 0.0).count();
    report.add("positive_fraction", positive as f64 / series.len() as f64);
    Ok(report)
}

fn lle(config: &ExperimentConfig, setup: &Setup) -> Result<RunReport> {
    lle_report(config, &lle_members(config, setup)?)
}

fn transient(config: &ExperimentConfig, setup: &Setup) -> Result<RunReport> {
    let series = lle_members(config, setup)?;
    let mut report = lle_report(config, &series)?;
    let chaos = series
        .iter()
        .map(|s| transient_chaos_length(s, config.transient.consecutive))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("member,length,class\n");
    for (i, c) in chaos.iter().enumerate() {
        csv.push_str(&format!("{i},{},{}\n", c.length, c.class.as_str()));
    }
    report.artifacts.push(Artifact::text("transient_lengths.csv", csv));
    for class in [ChaosClass::NoChaos, ChaosClass::Transient, ChaosClass::StillChaotic] {
        report.add(class.as_str(), chaos.iter().filter(|c| c.class == class).count());
    }
    let lengths: Vec<f64> = chaos.iter().filter(|c| c.class == ChaosClass::Transient).map(|c| c.length as f64).collect();
    add_quartiles(&mut report, "transient_length", &lengths);

    let model = setup.model(config, 0)?;
    let x0 = setup.initial_state(&model, 0)?;
    let horizon = config.lle.horizon;
    let (traj, overflow) = record(&model.encoder, &x0, horizon, strided(config.stride, horizon));
    match pca_project(&traj, config.transient.pca_components) {
        Ok(pca) => {
            let k = pca.coordinates.ncols();
            let mut csv = String::from("t");
            (1..=k).for_each(|c| csv.push_str(&format!(",pc{c}")));
            csv.push('\n');
            for (t, row) in pca.times.iter().zip(pca.coordinates.rows()) {
                csv.push_str(&t.to_string());
                row.iter().for_each(|v| csv.push_str(&format!(",{v}")));
                csv.push('\n');
            }
            report.artifacts.push(Artifact::text("pca_member0.csv", csv));
            let ratios: Vec<String> = pca.explained_variance_ratio.iter().map(f64::to_string).collect();
            report.add("pca_explained_variance_ratio", ratios.join(" "));
        }
        Err(e) => report.add("pca", format!("skipped: {e}")),
    }
    if let Some(t) = overflow {
        report.add("pca_member0_overflow_step", t);
    }
    Ok(report)
}

/// Trajectories of every member, keeping the times `keep` accepts. Members
/// that overflow are dropped and listed.
fn trajectories(
    config: &ExperimentConfig,
    setup: &Setup,
    steps: usize,
    keep: impl Fn(usize) -> bool + Sync,
    mask: Option<&[usize]>,
) -> Result<(Vec<StateTrajectory>, Vec<usize>)> {
    let runs = (0..setup.size())
        .into_par_iter()
        .map(|i| -> Result<_> {
            let model = setup.model(config, i)?;
            let x0 = match mask {
                Some(pos) => {
                    let mut ids = setup.ensemble.ids[i].clone();
                    ids[pos[i]] = mask_id(setup);
                    embed(&ids, &model.embedding)?
                }
                None => setup.initial_state(&model, i)?,
            };
            Ok(record(&model.encoder, &x0, steps, &keep))
        })
        .collect::<Result<Vec<_>>>()?;
    let failed: Vec<usize> = runs.iter().enumerate().filter(|(_, r)| r.1.is_some()).map(|(i, _)| i).collect();
    Ok((runs.into_iter().filter(|r| r.1.is_none()).map(|r| r.0).collect(), failed))
}

fn mask_id(setup: &Setup) -> u32 {
    setup.ensemble.vocab.as_ref().map_or(1, |v| v.id(MASK).expect("reserved token"))
}

fn dump_all(report: &mut RunReport, config: &ExperimentConfig, trajs: &[StateTrajectory], failed: &[usize]) {
    if !config.dump_states {
        return;
    }
    let kept = (0..trajs.len() + failed.len()).filter(|i| !failed.contains(i));
    for (i, tr) in kept.zip(trajs) {
        report.artifacts.push(Artifact { name: dump_name(i), bytes: trajectory_container(tr).to_bytes() });
    }
}

fn effdim(config: &ExperimentConfig, setup: &Setup) -> Result<RunReport> {
    let (trajs, failed) = trajectories(config, setup, config.steps, strided(config.stride, config.steps), None)?;
    let mut report = RunReport::new(config.clone());
    report.truncated_members = failed.clone();
    all_failed(&report, setup.size())?;
    let times = trajs[0].times.clone();
    let values: Vec<Result<f64>> = times
        .par_iter()
        .map(|&t| effective_dimension(trajs.iter().map(|tr| tr.at(t).expect("shared times"))))
        .collect();
    let mut csv = String::from("t,value\n");
    let mut degenerate = 0;
    let mut defined = Vec::new();
    for (t, v) in times.iter().zip(values) {
        match v {
            Ok(v) => {
                csv.push_str(&format!("{t},{v}\n"));
                defined.push(v);
            }
            Err(Error::Degenerate(_)) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    report.artifacts.push(Artifact::text("effdim.csv", csv));
    dump_all(&mut report, config, &trajs, &failed);
    report.add("members", trajs.len());
    report.add("effdim_initial", opt(defined.first()));
    report.add("effdim_final", opt(defined.last()));
    report.add("effdim_max", opt(defined.iter().copied().reduce(f64::max)));
    report.add("degenerate_times", degenerate);
    Ok(report)
}

fn letters(config: &ExperimentConfig) -> Result<[LetterPath; 2]> {
    match &config.handwriting.letters {
        Some([a, b]) => Ok([LetterPath::load(&config.resolve(a))?, LetterPath::load(&config.resolve(b))?]),
        None => Ok([LetterPath::builtin_u(), LetterPath::builtin_s()]),
    }
}

fn error_map_summary(report: &mut RunReport, prefix: &str, map: &ErrorMap) {
    if let Some(c) = map.best() {
        report.add(format!("{prefix}best_t0"), c.t0);
        report.add(format!("{prefix}best_delta_t"), c.delta_t);
        report.add(format!("{prefix}best_nmse"), opt(c.outcome.nmse()));
    } else {
        report.add(format!("{prefix}best_nmse"), "none");
    }
    if let Some(c) = map.worst() {
        report.add(format!("{prefix}worst_nmse"), opt(c.outcome.nmse()));
    }
}

fn handwriting(config: &ExperimentConfig, setup: &Setup) -> Result<RunReport> {
    let labels = setup
        .ensemble
        .labels
        .as_ref()
        .ok_or_else(|| Error::Config("handwriting needs class labels (corpus.labels or the synthetic corpus)".into()))?;
    let (trajs, failed) = trajectories(config, setup, config.steps, |_| true, None)?;
    let mut report = RunReport::new(config.clone());
    report.truncated_members = failed.clone();
    all_failed(&report, setup.size())?;
    let labels: Vec<usize> = (0..setup.size()).filter(|i| !failed.contains(i)).map(|i| labels[i]).collect();
    let hs = HandwritingSetup {
        letters: letters(config)?,
        t0s: config.handwriting.t0s.clone(),
        delta_ts: config.handwriting.delta_ts.clone(),
        ridge: config.handwriting.ridge,
        eval_fraction: config.handwriting.eval_fraction,
        seed: rng::derive_seed(config.seed, 4),
    };
    let map = handwriting_sweep(&trajs, &labels, &hs)?;
    report.artifacts.push(Artifact::text("error_map.csv", map.to_csv()));
    error_map_summary(&mut report, "", &map);
    if let Some(best) = map.best() {
        let window = Window { t0: best.t0, delta_t: best.delta_t };
        let (_, drawn) = draw_cell(&trajs, &labels, &hs, window)?;
        let mut csv = String::from("item,class,step,x,y\n");
        for d in &drawn {
            for (s, p) in d.points.iter().enumerate() {
                csv.push_str(&format!("{},{},{s},{},{}\n", d.item, d.class, p[0], p[1]));
            }
        }
        report.artifacts.push(Artifact::text("drawn_letters.csv", csv));
    }
    if config.handwriting.shuffled_control {
        let mut shuffled = labels.clone();
        shuffled.shuffle(&mut rng::stream(config.seed, 5));
        let control = handwriting_sweep(&trajs, &shuffled, &hs)?;
        report.artifacts.push(Artifact::text("error_map_shuffled.csv", control.to_csv()));
        error_map_summary(&mut report, "shuffled_", &control);
    }
    dump_all(&mut report, config, &trajs, &failed);
    report.add("members", trajs.len());
    Ok(report)
}

fn mlm_sweep(config: &ExperimentConfig, setup: &Setup) -> Result<RunReport> {
    let n_tokens = config.n_tokens;
    let mut pos_rng = rng::stream(config.seed, 3);
    let positions: Vec<usize> = (0..setup.size()).map(|_| pos_rng.random_range(0..n_tokens)).collect();
    let times: BTreeSet<usize> = config.mlm.times.iter().copied().collect();
    let steps = times.last().copied().unwrap_or(0);
    let (trajs, failed) = trajectories(config, setup, steps, |t| times.contains(&t), Some(&positions))?;
    let mut report = RunReport::new(config.clone());
    report.truncated_members = failed.clone();
    all_failed(&report, setup.size())?;
    let kept: Vec<usize> = (0..setup.size()).filter(|i| !failed.contains(i)).collect();
    let targets: Vec<u32> = kept.iter().map(|&i| setup.ensemble.ids[i][positions[i]]).collect();
    let rows: Vec<usize> = kept.iter().map(|&i| positions[i]).collect();
    let params = SoftmaxParams {
        classes: setup.ensemble.vocab_size,
        l2: config.mlm.l2,
        epochs: config.mlm.epochs,
        step: config.mlm.step,
    };
    let task = SweepTask::Classification { labels: &targets, params };
    let times: Vec<usize> = times.into_iter().collect();
    let scores = layer_sweep(
        &trajs,
        &task,
        &times,
        &FeatureMap::TokenRow(rows),
        config.mlm.eval_fraction,
        rng::derive_seed(config.seed, 6),
    )?;
    report.artifacts.push(Artifact::text("mlm_scores.csv", scores.to_csv()));
    let distinct: BTreeSet<u32> = targets.iter().copied().collect();
    report.add("members", trajs.len());
    report.add("distinct_targets", distinct.len());
    let best = scores.times.iter().zip(&scores.scores).filter_map(|(t, s)| s.map(|s| (*t, s))).fold(None, |b: Option<(usize, f64)>, c| match b {
        Some(b) if b.1 >= c.1 => Some(b),
        _ => Some(c),
    });
    if let Some((t, s)) = best {
        report.add("best_t", t);
        report.add("best_accuracy", s);
    }
    Ok(report)
}

fn import_check(config: &ExperimentConfig) -> Result<RunReport> {
    let path = config.resolve(config.params.container.as_ref().expect("validated"));
    let container = TensorContainer::read(&path)?;
    let model = import(config, &container)?;
    let mut report = RunReport::new(config.clone());
    let mut csv = String::from("name,dtype,dims\n");
    for name in container.names() {
        let t = container.get(name).expect("listed");
        let dims: Vec<String> = t.dims.iter().map(usize::to_string).collect();
        let dtype = match t.dtype {
            DType::F32 => "f32",
            DType::F64 => "f64",
        };
        csv.push_str(&format!("{name},{dtype},{}\n", dims.join("x")));
    }
    report.artifacts.push(Artifact::text("manifest.csv", csv));
    let enc = &model.encoder.config;
    report.add("tensors", container.len());
    report.add("hidden_dim", enc.hidden_dim);
    report.add("num_heads", enc.num_heads);
    report.add("intermediate_dim", enc.intermediate_dim);
    report.add("variant", format!("{:?}", enc.variant));
    report.add("vocab_size", model.embedding.vocab_size());
    report.add("embedding_dim", model.embedding.embedding_dim());
    report.add("max_positions", model.embedding.max_positions());
    let n = config.n_tokens.min(model.embedding.max_positions());
    let ids: Vec<u32> = (0..n).map(|i| (i % model.embedding.vocab_size()) as u32).collect();
    let x0 = embed(&ids, &model.embedding)?;
    let x1 = model.encoder.step(&x0)?;
    report.add("smoke_step_deviation", deviation(&x1));
    Ok(report)
}
