//! `programport` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or configuration error, 2 parse failure,
//! 3 grounding or execution failure.

mod repl;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use programport::benchmark::{
    generate_episode, make_backend, run_suite, BackendKind, Split, SuiteConfig, TaskName, TaskSpec,
};
use programport::ccg::{parse_text, Derivation, Lexicon};
use programport::dsl::ProgramNode;
use programport::executor::{execute, ExecutionContext, ExecutionResult};
use programport::grounding::{GroundingBackend, GroundingMap, Resolution};
use programport::world::{apply_action, render, Scene};

/// A failed command: message for stderr and the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn io(e: impl std::fmt::Display) -> Self {
        CliError { code: 1, message: e.to_string() }
    }

    pub fn parse(e: impl std::fmt::Display) -> Self {
        CliError { code: 2, message: e.to_string() }
    }

    pub fn exec(e: impl std::fmt::Display) -> Self {
        CliError { code: 3, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "programport", version, about = "Parse, execute and evaluate tabletop manipulation instructions")]
struct Cli {
    /// Directory receiving every file a command writes.
    #[arg(long, global = true, default_value = "out")]
    output_dir: PathBuf,
    /// Seed for generated episodes and evaluation suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the top derivations of an instruction.
    Parse {
        instruction: String,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        top_k: u64,
    },
    /// Execute an instruction on a scene and apply the resulting actions.
    Run {
        scene: PathBuf,
        instruction: String,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Run an evaluation suite and write its report.
    Eval {
        /// Suite config JSON; defaults apply when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        episodes: Option<usize>,
        /// Comma-separated task names.
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<TaskName>>,
        #[arg(long)]
        split: Option<Split>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Interactive instruction loop over a scene.
    Repl {
        scene: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Generate one benchmark episode.
    Generate {
        #[arg(long)]
        task: TaskName,
        #[arg(long, default_value = "unseen")]
        split: Split,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Oracle,
    Embedding,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Oracle => BackendKind::Oracle,
            BackendArg::Embedding => BackendKind::Embedding,
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Projection weights file, or `identity`.
    #[arg(long)]
    weights: Option<String>,
    /// Concept embedding table; one-hot when absent.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    rotations: Option<u64>,
    /// Grounding resolution as HEIGHTxWIDTH.
    #[arg(long, value_parser = parse_resolution)]
    resolution: Option<Resolution>,
}

fn parse_resolution(s: &str) -> Result<Resolution, String> {
    let (h, w) = s.split_once('x').ok_or_else(|| format!("expected HEIGHTxWIDTH, got {s:?}"))?;
    let h: usize = h.parse().map_err(|e| format!("height: {e}"))?;
    let w: usize = w.parse().map_err(|e| format!("width: {e}"))?;
    if h == 0 || w == 0 {
        return Err("resolution must be positive".into());
    }
    Ok(Resolution::new(h, w))
}

impl PipelineArgs {
    fn weights_path(&self) -> Option<PathBuf> {
        self.weights.as_deref().filter(|w| *w != "identity").map(PathBuf::from)
    }

    fn require_paths(&self) -> CliResult<()> {
        for p in [self.lexicon.clone(), self.weights_path(), self.embeddings.clone()].into_iter().flatten() {
            if !p.exists() {
                return Err(CliError::io(format!("{}: no such file", p.display())));
            }
        }
        Ok(())
    }

    fn backend(&self) -> CliResult<Box<dyn GroundingBackend>> {
        let kind = self.backend.map(BackendKind::from).unwrap_or_default();
        make_backend(kind, self.weights_path().as_deref(), self.embeddings.as_deref()).map_err(CliError::io)
    }
}

/// Everything `run` and the REPL need to turn an instruction into actions.
pub struct Pipeline {
    pub lexicon: Lexicon,
    pub backend: Box<dyn GroundingBackend>,
    pub rotations: usize,
    pub resolution: Option<Resolution>,
}

/// A parsed and executed instruction with the scene after its actions.
pub struct Outcome {
    pub program: ProgramNode,
    pub result: ExecutionResult,
    pub after: Scene,
}

impl Pipeline {
    fn from_args(args: &PipelineArgs) -> CliResult<Self> {
        args.require_paths()?;
        Ok(Pipeline {
            lexicon: load_lexicon(args.lexicon.as_deref())?,
            backend: args.backend()?,
            rotations: args.rotations.map_or(programport::executor::DEFAULT_ROTATIONS, |r| r as usize),
            resolution: args.resolution,
        })
    }

    pub fn context<'a>(&'a self, scene: &'a Scene) -> ExecutionContext<'a> {
        let ctx = ExecutionContext::new(scene, self.backend.as_ref()).with_rotations(self.rotations);
        match self.resolution {
            Some(r) => ctx.with_resolution(r),
            None => ctx,
        }
    }

    /// Parses, executes and applies every step of the plan in order.
    pub fn run(&self, scene: &Scene, instruction: &str) -> CliResult<Outcome> {
        let program = parse_text(instruction, &self.lexicon, 1).map_err(CliError::parse)?[0].program.clone();
        let ctx = self.context(scene);
        let result = execute(&program, &ctx).map_err(CliError::exec)?;
        let mut after = scene.clone();
        for params in result.plan() {
            after = apply_action(&after, &params, &ctx.grid).scene;
        }
        Ok(Outcome { program, result, after })
    }
}

fn load_lexicon(path: Option<&Path>) -> CliResult<Lexicon> {
    match path {
        Some(p) => Lexicon::from_path(p).map_err(CliError::io),
        None => Ok(Lexicon::default_lexicon()),
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write_map(dir: &Path, name: &str, map: &GroundingMap) -> CliResult<String> {
    write_file(&dir.join(name), map.to_pgm())?;
    Ok(name.to_string())
}

fn derivation_lines(d: &Derivation) -> Vec<String> {
    let mut lines = vec![d.program.to_string(), format!("# score={:.6}", d.log_score)];
    for oov in &d.oov_assignments {
        lines.push(format!("# oov {} {} {}", oov.word, oov.category, oov.template));
    }
    lines
}

fn cmd_parse(instruction: &str, lexicon: Option<&Path>, top_k: usize) -> CliResult<()> {
    let lexicon = load_lexicon(lexicon)?;
    let derivations = parse_text(instruction, &lexicon, top_k).map_err(CliError::parse)?;
    for d in &derivations {
        for line in derivation_lines(d) {
            println!("{line}");
        }
    }
    Ok(())
}

fn cmd_run(scene_path: &Path, instruction: &str, args: &PipelineArgs, out: &Path) -> CliResult<()> {
    let scene = Scene::load(scene_path).map_err(CliError::io)?;
    let pipeline = Pipeline::from_args(args)?;
    let outcome = pipeline.run(&scene, instruction)?;
    ensure_dir(out)?;

    let mut maps = Vec::new();
    for (path, map) in &outcome.result.intermediates {
        maps.push(write_map(out, &format!("map_{path}.pgm"), map)?);
    }
    maps.push(write_map(out, "pick.pgm", outcome.result.pick_map())?);
    for (r, m) in outcome.result.place_maps().iter().enumerate() {
        maps.push(write_map(out, &format!("place_r{r:02}.pgm"), m)?);
    }
    render(&scene).map_err(CliError::io)?.write_ppm(&out.join("before.ppm")).map_err(CliError::io)?;
    render(&outcome.after).map_err(CliError::io)?.write_ppm(&out.join("after.ppm")).map_err(CliError::io)?;
    outcome.after.save(&out.join("scene_after.json")).map_err(CliError::io)?;

    let grid = pipeline.context(&scene).grid;
    let first = outcome.result.params;
    let (pick_x, pick_y) = grid.pixel_center(&scene, first.pick.u, first.pick.v);
    let (place_x, place_y) = grid.pixel_center(&scene, first.place.u, first.place.v);
    let action = json!({
        "program": outcome.program.to_string(),
        "primitive": first.primitive,
        "pick": first.pick,
        "place": first.place,
        "pick_xy": [pick_x, pick_y],
        "place_xy": [place_x, place_y],
        "place_angle": grid.angle(first.place.r),
        "steps": outcome.result.plan(),
        "maps": maps,
    });
    let text = serde_json::to_string_pretty(&action).map_err(CliError::io)?;
    write_file(&out.join("action.json"), &text)?;
    println!("{text}");
    Ok(())
}

struct EvalOverrides<'a> {
    config: Option<&'a Path>,
    episodes: Option<usize>,
    tasks: Option<&'a [TaskName]>,
    split: Option<Split>,
    seed: Option<u64>,
}

fn cmd_eval(o: &EvalOverrides, args: &PipelineArgs, out: &Path) -> CliResult<()> {
    let mut cfg = match o.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            SuiteConfig::from_json(&text).map_err(CliError::io)?
        }
        None => SuiteConfig::default(),
    };
    if let Some(n) = o.episodes {
        cfg.episodes = n;
    }
    if let Some(t) = o.tasks {
        cfg.tasks = t.to_vec();
    }
    if let Some(s) = o.split {
        cfg.split = s;
    }
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(b) = args.backend {
        cfg.backend = b.into();
    }
    if let Some(l) = &args.lexicon {
        cfg.lexicon = Some(l.clone());
    }
    if args.weights.is_some() {
        cfg.weights = args.weights_path();
    }
    if let Some(e) = &args.embeddings {
        cfg.embeddings = Some(e.clone());
    }
    if let Some(r) = args.rotations {
        cfg.rotations = r as usize;
    }
    if let Some(r) = args.resolution {
        cfg.resolution = Some(r);
    }
    cfg.validate().map_err(CliError::io)?;
    let backend = cfg.backend().map_err(CliError::io)?;
    let lexicon = cfg.load_lexicon().map_err(CliError::io)?;
    let report = run_suite(&cfg, backend.as_ref(), &lexicon).map_err(CliError::io)?;
    ensure_dir(out)?;
    write_file(&out.join("report.json"), report.to_json())?;
    let table = report.table();
    write_file(&out.join("report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_generate(task: TaskName, split: Split, seed: u64, out: &Path) -> CliResult<()> {
    let spec = TaskSpec::new(task, split);
    let episode = generate_episode(&spec, seed).map_err(CliError::io)?;
    ensure_dir(out)?;
    let stem = format!("{}_{seed}", task.name());
    let text = serde_json::to_string_pretty(&episode).map_err(CliError::io)?;
    write_file(&out.join(format!("{stem}.json")), text)?;
    episode.scene.save(&out.join(format!("{stem}_scene.json"))).map_err(CliError::io)?;
    println!("{}", episode.instruction);
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let out = cli.output_dir.as_path();
    match &cli.command {
        Command::Parse { instruction, lexicon, top_k } => cmd_parse(instruction, lexicon.as_deref(), *top_k as usize),
        Command::Run { scene, instruction, pipeline } => cmd_run(scene, instruction, pipeline, out),
        Command::Eval { config, episodes, tasks, split, pipeline } => {
            let overrides = EvalOverrides {
                config: config.as_deref(),
                episodes: *episodes,
                tasks: tasks.as_deref(),
                split: *split,
                seed: cli.seed,
            };
            cmd_eval(&overrides, pipeline, out)
        }
        Command::Repl { scene, pipeline } => {
            let scene = Scene::load(scene).map_err(CliError::io)?;
            let pipeline = Pipeline::from_args(pipeline)?;
            let stdin = std::io::stdin();
            repl::run(scene, &pipeline, stdin.lock(), &mut std::io::stdout(), out)
        }
        Command::Generate { task, split } => cmd_generate(*task, *split, cli.seed.unwrap_or(0), out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
