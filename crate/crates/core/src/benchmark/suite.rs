//! Evaluation suites: parse, execute and simulate generated episodes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::generate::{generate_episode, Episode};
use super::metrics::score_success;
use super::tasks::{Split, TaskName, TaskSpec};
use super::BenchError;
use crate::ccg::{parse_text, Lexicon};
use crate::dsl::{ConceptKind, ProgramNode};
use crate::executor::{eval_goal, execute, ControlParams, ExecError, ExecutionContext, DEFAULT_ROTATIONS};
use crate::grounding::{
    normalize, EmbeddingBackend, EmbeddingTable, GroundingBackend, GroundingError, GroundingMap, OracleBackend,
    ProjectionWeights, Resolution,
};
use crate::world::{apply_action, attribute_vocabulary, Scene};

/// How object maps are produced from the parsed program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GroundingMode {
    /// Each filter grounds one concept; maps compose through the program.
    #[default]
    Compositional,
    /// Ablation: every object map is the single normalized sum of the
    /// groundings of all property words in the instruction.
    Monolithic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Oracle,
    Embedding,
}

/// Suite configuration, also the JSON config file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub tasks: Vec<TaskName>,
    pub split: Split,
    pub episodes: usize,
    /// Episode `i` uses seed `seed + i`.
    pub seed: u64,
    pub backend: BackendKind,
    /// Lexicon file; the built-in lexicon when absent.
    pub lexicon: Option<PathBuf>,
    /// Projection weights for the embedding backend; identity when absent.
    pub weights: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub rotations: usize,
    /// Grounding resolution; half the scene raster when absent.
    pub resolution: Option<Resolution>,
    pub mode: GroundingMode,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            tasks: super::tasks::ALL_TASKS.to_vec(),
            split: Split::Unseen,
            episodes: 100,
            seed: 0,
            backend: BackendKind::Oracle,
            lexicon: None,
            weights: None,
            embeddings: None,
            rotations: DEFAULT_ROTATIONS,
            resolution: None,
            mode: GroundingMode::Compositional,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.episodes == 0 {
            return Err(BenchError::Config("episodes must be at least 1".into()));
        }
        if self.rotations == 0 {
            return Err(BenchError::Config("rotations must be at least 1".into()));
        }
        if let Some(r) = self.resolution {
            if r.height == 0 || r.width == 0 {
                return Err(BenchError::Config("resolution must be positive".into()));
            }
        }
        for t in &self.tasks {
            TaskSpec::new(*t, self.split).validate()?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Builds a grounding backend. For the embedding backend, missing weights
/// mean identity projections and missing embeddings mean one-hot vectors
/// over the attribute vocabulary.
pub fn make_backend(
    kind: BackendKind,
    weights: Option<&Path>,
    embeddings: Option<&Path>,
) -> Result<Box<dyn GroundingBackend>, GroundingError> {
    match kind {
        BackendKind::Oracle => Ok(Box::new(OracleBackend)),
        BackendKind::Embedding => {
            let vocabulary = attribute_vocabulary();
            let weights = match weights {
                Some(p) => ProjectionWeights::from_path(p)?,
                None => ProjectionWeights::identity(vocabulary.len()),
            };
            let table = match embeddings {
                Some(p) => EmbeddingTable::from_path(p)?,
                None => EmbeddingTable::one_hot(&vocabulary),
            };
            Ok(Box::new(EmbeddingBackend::new(vocabulary, table, weights, 0.0)?))
        }
    }
}

impl SuiteConfig {
    /// The backend named by this config.
    pub fn backend(&self) -> Result<Box<dyn GroundingBackend>, GroundingError> {
        make_backend(self.backend, self.weights.as_deref(), self.embeddings.as_deref())
    }

    /// The configured lexicon, or the built-in one.
    pub fn load_lexicon(&self) -> Result<Lexicon, crate::ccg::CcgError> {
        match &self.lexicon {
            Some(p) => Lexicon::from_path(p),
            None => Ok(Lexicon::default_lexicon()),
        }
    }
}

/// Stage an episode failed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Generation,
    Parse,
    Grounding,
    Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub instruction: String,
    pub program: Option<String>,
    /// In `[0, 1]`.
    pub score: f64,
    pub steps: usize,
    pub failure: Option<FailureKind>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: TaskName,
    pub split: Split,
    /// Arithmetic mean of the episode scores, ×100.
    pub mean: f64,
    pub episodes: Vec<EpisodeRecord>,
    pub failures: BTreeMap<FailureKind, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config_hash: String,
    pub config: SuiteConfig,
    pub tasks: Vec<TaskReport>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn mean(&self, task: TaskName) -> Option<f64> {
        self.tasks.iter().find(|t| t.task == task).map(|t| t.mean)
    }

    /// One row per task: mean score and failure counts by stage.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<30} {:>7} {:>9} {:>7} {:>6} {:>9} {:>9}",
            "task", "split", "episodes", "mean", "parse", "grounding", "placement"
        );
        for t in &self.tasks {
            let f = |k| t.failures.get(&k).copied().unwrap_or(0);
            let _ = writeln!(
                out,
                "{:<30} {:>7} {:>9} {:>7.1} {:>6} {:>9} {:>9}",
                t.task.name(),
                t.split.name(),
                t.episodes.len(),
                t.mean,
                f(FailureKind::Parse),
                f(FailureKind::Grounding),
                f(FailureKind::Placement)
            );
        }
        out
    }
}

/// Everything an episode run needs besides the episode.
pub struct RunSettings<'a> {
    pub backend: &'a dyn GroundingBackend,
    pub lexicon: &'a Lexicon,
    pub rotations: usize,
    pub resolution: Option<Resolution>,
    pub mode: GroundingMode,
}

fn exec_failure(e: &ExecError) -> FailureKind {
    match e {
        ExecError::NoFeasiblePlace => FailureKind::Placement,
        ExecError::Type(_) => FailureKind::Parse,
        _ => FailureKind::Grounding,
    }
}

/// Sum of the groundings of every property word in `program`, min-max
/// normalized.
pub fn monolithic_map(
    program: &ProgramNode,
    scene: &Scene,
    backend: &dyn GroundingBackend,
    res: Resolution,
) -> Result<GroundingMap, ExecError> {
    let mut sum = vec![0.0; res.height * res.width];
    for c in program.concepts() {
        if c.kind() == ConceptKind::Property {
            let m = backend.ground(scene, c, res)?;
            for (s, v) in sum.iter_mut().zip(m.values()) {
                *s += v;
            }
        }
    }
    Ok(normalize(res.height, res.width, &sum)?)
}

/// Control parameters of each goal when every object map is replaced by the
/// monolithic instruction map.
fn monolithic_plan(program: &ProgramNode, ctx: &ExecutionContext) -> Result<Vec<ControlParams>, ExecError> {
    let m = monolithic_map(program, ctx.scene, ctx.backend, ctx.resolution)?;
    let mut out = Vec::new();
    let mut stack = vec![program];
    while let Some(node) = stack.pop() {
        match node {
            ProgramNode::ActionConcat(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            ProgramNode::Do { goals, action } => {
                for g in goals {
                    if let ProgramNode::Goal { rel, .. } = g {
                        let plan = eval_goal(ctx, &m, &m, rel, ctx.primitive_for(action), ("0.0", "0.1"))?;
                        out.push(plan.params);
                    }
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Parses the instruction once, then re-plans on the current scene before
/// each step until the goal is met or the step budget runs out. Errors end
/// the episode with the score reached so far.
pub fn run_episode(episode: &Episode, settings: &RunSettings) -> EpisodeRecord {
    let mut record = EpisodeRecord {
        seed: episode.seed,
        instruction: episode.instruction.clone(),
        program: None,
        score: 0.0,
        steps: 0,
        failure: None,
        message: None,
    };
    let program = match parse_text(&episode.instruction, settings.lexicon, 1) {
        Ok(d) => d[0].program.clone(),
        Err(e) => {
            record.failure = Some(FailureKind::Parse);
            record.message = Some(e.to_string());
            return record;
        }
    };
    record.program = Some(program.to_string());
    let mut scene = episode.scene.clone();
    while record.steps < episode.max_steps && score_success(episode, &scene) < 1.0 {
        let mut ctx = ExecutionContext::new(&scene, settings.backend).with_rotations(settings.rotations);
        if let Some(r) = settings.resolution {
            ctx = ctx.with_resolution(r);
        }
        let params = match settings.mode {
            GroundingMode::Compositional => execute(&program, &ctx).map(|r| r.params),
            GroundingMode::Monolithic => monolithic_plan(&program, &ctx).map(|p| p[0]),
        };
        let params = match params {
            Ok(p) => p,
            Err(e) => {
                record.failure = Some(exec_failure(&e));
                record.message = Some(e.to_string());
                break;
            }
        };
        let next = apply_action(&scene, &params, &ctx.grid).scene;
        record.steps += 1;
        scene = next;
    }
    record.score = score_success(episode, &scene);
    if record.score < 1.0 && record.failure.is_none() {
        record.failure = Some(FailureKind::Placement);
    }
    record
}

/// Runs `config.episodes` episodes of each task in parallel. Episode errors
/// score zero; results are ordered by task as listed, then by seed.
pub fn run_suite(config: &SuiteConfig, backend: &dyn GroundingBackend, lexicon: &Lexicon) -> Result<EvalReport, BenchError> {
    config.validate()?;
    let settings = RunSettings {
        backend,
        lexicon,
        rotations: config.rotations,
        resolution: config.resolution,
        mode: config.mode,
    };
    let jobs: Vec<(usize, u64)> = (0..config.tasks.len())
        .flat_map(|t| (0..config.episodes as u64).map(move |i| (t, config.seed + i)))
        .collect();
    let mut records: Vec<(usize, EpisodeRecord)> = jobs
        .par_iter()
        .map(|&(t, seed)| {
            let spec = TaskSpec::new(config.tasks[t], config.split);
            let rec = match generate_episode(&spec, seed) {
                Ok(ep) => run_episode(&ep, &settings),
                Err(e) => EpisodeRecord {
                    seed,
                    instruction: String::new(),
                    program: None,
                    score: 0.0,
                    steps: 0,
                    failure: Some(FailureKind::Generation),
                    message: Some(e.to_string()),
                },
            };
            (t, rec)
        })
        .collect();
    records.sort_by_key(|(t, r)| (*t, r.seed));
    let mut tasks: Vec<TaskReport> = config
        .tasks
        .iter()
        .map(|&task| TaskReport {
            task,
            split: config.split,
            mean: 0.0,
            episodes: Vec::new(),
            failures: BTreeMap::new(),
        })
        .collect();
    for (t, rec) in records {
        if let Some(f) = rec.failure {
            *tasks[t].failures.entry(f).or_default() += 1;
        }
        tasks[t].episodes.push(rec);
    }
    for t in &mut tasks {
        let n = t.episodes.len().max(1) as f64;
        t.mean = 100.0 * t.episodes.iter().map(|e| e.score).sum::<f64>() / n;
    }
    Ok(EvalReport {
        config_hash: config.hash(),
        config: config.clone(),
        tasks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::OracleBackend;

    fn config(tasks: Vec<TaskName>, n: usize) -> SuiteConfig {
        SuiteConfig {
            tasks,
            episodes: n,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn empty_task_list_gives_empty_report() {
        let r = run_suite(&config(vec![], 3), &OracleBackend, &Lexicon::default_lexicon()).unwrap();
        assert!(r.tasks.is_empty());
    }

    #[test]
    fn zero_episodes_is_a_config_error() {
        let cfg = config(vec![TaskName::PackingShapes], 0);
        assert!(matches!(run_suite(&cfg, &OracleBackend, &Lexicon::default_lexicon()), Err(BenchError::Config(_))));
        assert!(SuiteConfig::from_json(r#"{"episodes": 0}"#).is_err());
        assert!(SuiteConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn report_mean_and_order() {
        let cfg = SuiteConfig {
            seed: 40,
            ..config(vec![TaskName::PackingShapes, TaskName::PushingShapes], 4)
        };
        let r = run_suite(&cfg, &OracleBackend, &Lexicon::default_lexicon()).unwrap();
        assert_eq!(r.tasks.len(), 2);
        for t in &r.tasks {
            let seeds: Vec<u64> = t.episodes.iter().map(|e| e.seed).collect();
            assert_eq!(seeds, vec![40, 41, 42, 43]);
            let mean = 100.0 * t.episodes.iter().map(|e| e.score).sum::<f64>() / 4.0;
            assert_eq!(t.mean, mean);
        }
        assert_eq!(r.config_hash.len(), 64);
        assert!(r.table().contains("packing_shapes"));
    }

    #[test]
    fn parse_failure_is_attributed() {
        let ep = generate_episode(&TaskSpec::new(TaskName::PackingShapes, Split::Seen), 1).unwrap();
        let mut bad = ep.clone();
        bad.instruction = "pack pack pack".into();
        let lex = Lexicon::default_lexicon();
        let settings = RunSettings {
            backend: &OracleBackend,
            lexicon: &lex,
            rotations: 4,
            resolution: None,
            mode: GroundingMode::Compositional,
        };
        let rec = run_episode(&bad, &settings);
        assert_eq!((rec.score, rec.failure), (0.0, Some(FailureKind::Parse)));
        let rec = run_episode(&ep, &settings);
        assert_eq!(rec.score, 1.0, "{rec:?}");
    }
}
