//! Command-line driver: formalize, suggest a grounding, check, verify and
//! emit Lean.

pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use reqverify_core::engine::{EngineError, EquivalenceReport, Verdict, DEFAULT_PLAN_LIMIT};
use reqverify_core::frontend::FrontendError;
use reqverify_core::grounding::{
    draft_grounding, parse_grounding, GroundingError, GroundingMap, TokenJaccard,
    DEFAULT_THRESHOLD,
};
use reqverify_core::ir::{normalize, parse_ir, serialize_ir, Formula, IrError, Signature};
use reqverify_core::lean::{
    default_def_names, emit_lean_theorem, parse_lean_def, LeanError, LeanSide,
    DEFAULT_THEOREM_NAME,
};
use reqverify_core::pipeline::{check_pair, formalize_rules, InputKind, PipelineError};
use reqverify_formalizer::{
    formalize_remote, prove_remote, FormalizerConfig, FormalizerError, HttpTransport,
    RecordingTransport, ReplayTransport, Transcript, Transport,
};

use report::{CheckReport, Inputs, ProverOutcome};

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Success; for `check` and `verify`, EQUIVALENT.
    Ok = 0,
    NotEquivalent = 1,
    Usage = 2,
    Io = 3,
    Parse = 4,
    Grounding = 5,
    Aborted = 6,
    Formalizer = 7,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    fn new(exit: Exit, message: impl Into<String>) -> Self {
        CliError { exit, message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::new(Exit::Io, format!("IO_ERROR: {}: {e}", path.display()))
    }
}

impl From<FrontendError> for CliError {
    fn from(e: FrontendError) -> Self {
        CliError::new(Exit::Parse, e.to_string())
    }
}

impl From<IrError> for CliError {
    fn from(e: IrError) -> Self {
        CliError::new(Exit::Parse, e.to_string())
    }
}

impl From<GroundingError> for CliError {
    fn from(e: GroundingError) -> Self {
        CliError::new(Exit::Grounding, e.to_string())
    }
}

impl From<LeanError> for CliError {
    fn from(e: LeanError) -> Self {
        let exit = match &e {
            LeanError::Grounding(_) => Exit::Grounding,
            LeanError::EmitUnsupported(_) => Exit::Usage,
            _ => Exit::Parse,
        };
        CliError::new(exit, e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let exit = match e {
            EngineError::PlanTooLarge { .. } => Exit::Aborted,
            EngineError::SignatureMismatch(_) => Exit::Parse,
        };
        CliError::new(exit, e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Frontend(e) => e.into(),
            PipelineError::Grounding(e) => e.into(),
            PipelineError::Engine(e) => e.into(),
            PipelineError::Selection(m) => CliError::new(Exit::Usage, m),
        }
    }
}

impl From<FormalizerError> for CliError {
    fn from(e: FormalizerError) -> Self {
        let exit = match e {
            FormalizerError::Usage(_) => Exit::Usage,
            _ => Exit::Formalizer,
        };
        CliError::new(exit, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "reqverify", version, about = "Decide whether two formalized requirements are logically equivalent")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Deterministic controlled-grammar frontends.
    Rules,
    /// The chat-completion formalizer.
    Llm,
}

#[derive(Debug, Args, Clone, Default)]
pub struct LlmArgs {
    /// Answer from recorded fixtures (file or directory) instead of the network.
    #[arg(long, value_name = "PATH")]
    pub fixtures: Option<PathBuf>,
    /// Record every exchange with the live service to this fixture file.
    #[arg(long, value_name = "FILE")]
    pub record: Option<PathBuf>,
    /// Write the conversation transcript as JSON.
    #[arg(long, value_name = "FILE")]
    pub transcript: Option<PathBuf>,
    /// Request timeout in seconds.
    #[arg(long, value_name = "SECS")]
    pub timeout: Option<u64>,
    /// Retries after a failed request or rejected answer.
    #[arg(long, value_name = "N")]
    pub retries: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate a requirement, feature or Lean file into an IR file.
    Formalize {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Rules)]
        engine: Engine,
        /// Output path; defaults to the input with an `.ir` extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Requirement id when the file holds several.
        #[arg(long)]
        id: Option<String>,
        #[command(flatten)]
        llm: LlmArgs,
    },
    /// Print a draft grounding map for review.
    Suggest {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ground the right side into the left and decide equivalence.
    Check {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Formalize a requirement and a feature with the rules engine, then check.
    Verify {
        requirement: PathBuf,
        feature: PathBuf,
        /// Requirement id when the file holds several.
        #[arg(long)]
        id: Option<String>,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Write the Lean equivalence theorem for two formalizations.
    EmitLean {
        left: PathBuf,
        right: PathBuf,
        #[arg(short, long)]
        grounding: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = DEFAULT_THEOREM_NAME)]
        theorem_name: String,
        #[arg(long)]
        left_name: Option<String>,
        #[arg(long)]
        right_name: Option<String>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct CheckArgs {
    #[arg(short, long)]
    pub grounding: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(short, long)]
    pub report: Option<PathBuf>,
    /// Largest domain plan to enumerate.
    #[arg(long, default_value_t = DEFAULT_PLAN_LIMIT)]
    pub limit: u64,
    /// Also send the theorem to the remote prover and attach its answer.
    #[arg(long)]
    pub also_prove: bool,
    #[command(flatten)]
    pub llm: LlmArgs,
}

/// A loaded formalization.
pub struct Loaded {
    pub formula: Formula,
    pub signature: Signature,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Loads any supported input by extension: `.ir`, `.lean`, `.req`, `.txt`
/// or `.feature`.
pub fn load(path: &Path, id: Option<&str>) -> Result<Loaded, CliError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let (formula, signature) = match ext {
        "ir" => {
            let text = read(path)?;
            parse_ir(&text).map_err(|e| CliError::new(Exit::Parse, format!("{}: {e}", path.display())))?
        }
        "lean" => {
            let text = read(path)?;
            parse_lean_def(&text).map_err(|e| {
                let mut c = CliError::from(e);
                c.message = format!("{}: {}", path.display(), c.message);
                c
            })?
        }
        _ => {
            let kind = InputKind::from_path(path).ok_or_else(|| {
                CliError::new(
                    Exit::Usage,
                    format!(
                        "{}: unknown input kind (expected .ir, .lean, .req, .txt or .feature)",
                        path.display()
                    ),
                )
            })?;
            let text = read(path)?;
            formalize_rules(&text, &path.display().to_string(), kind, id).map_err(|e| {
                let mut c = CliError::from(e);
                if !c.message.contains(&path.display().to_string()) {
                    c.message = format!("{}: {}", path.display(), c.message);
                }
                c
            })?
        }
    };
    Ok(Loaded { formula: normalize(&formula), signature })
}

fn load_grounding(path: Option<&Path>) -> Result<GroundingMap, CliError> {
    match path {
        None => Ok(GroundingMap::new()),
        Some(p) => {
            let text = read(p)?;
            parse_grounding(&text).map_err(|e| {
                CliError::new(Exit::Grounding, format!("{}: {e}", p.display()))
            })
        }
    }
}

fn formalizer_config(llm: &LlmArgs) -> Result<FormalizerConfig, CliError> {
    let mut cfg = if llm.fixtures.is_some() {
        FormalizerConfig::from_env().unwrap_or_default()
    } else {
        FormalizerConfig::from_env()?
    };
    if let Some(t) = llm.timeout {
        cfg.timeout_secs = t;
    }
    if let Some(r) = llm.retries {
        cfg.max_retries = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn transport(llm: &LlmArgs, cfg: &FormalizerConfig) -> Result<Box<dyn Transport>, CliError> {
    let inner: Box<dyn Transport> = match &llm.fixtures {
        Some(dir) => Box::new(ReplayTransport::load(dir)?),
        None => Box::new(HttpTransport::new(cfg)?),
    };
    Ok(match &llm.record {
        Some(path) => Box::new(RecordingTransport::new(inner, path.clone())),
        None => inner,
    })
}

fn save_transcript(llm: &LlmArgs, t: Option<&Transcript>) -> Result<(), CliError> {
    if let (Some(path), Some(t)) = (&llm.transcript, t) {
        let text = serde_json::to_string_pretty(t).expect("transcript serializes") + "\n";
        write(path, &text)?;
    }
    Ok(())
}

/// Output streams, injectable for tests.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs a parsed command and returns its exit status. Errors are printed
/// to `io.err` as `error: <CODE>…`.
pub fn run(cli: Cli, io: &mut Io) -> Exit {
    match dispatch(cli.command, io) {
        Ok(exit) => exit,
        Err(e) => {
            let _ = writeln!(io.err, "error: {}", e.message);
            e.exit
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I, io: &mut Io) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, io),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(io.err, "{text}");
                Exit::Usage
            } else {
                let _ = write!(io.out, "{text}");
                Exit::Ok
            }
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io) -> Result<Exit, CliError> {
    match cmd {
        Command::Formalize { input, engine, output, id, llm } => {
            cmd_formalize(&input, engine, output.as_deref(), id.as_deref(), &llm, io)
        }
        Command::Suggest { left, right, threshold, output } => {
            cmd_suggest(&left, &right, threshold, output.as_deref(), io)
        }
        Command::Check { left, right, check } => {
            let l = load(&left, None)?;
            let r = load(&right, None)?;
            cmd_check(&l, &r, &left, &right, &check, io)
        }
        Command::Verify { requirement, feature, id, check } => {
            if InputKind::from_path(&feature) != Some(InputKind::Feature) {
                return Err(CliError::new(
                    Exit::Usage,
                    format!("{}: expected a .feature file", feature.display()),
                ));
            }
            let l = load(&requirement, id.as_deref())?;
            let r = load(&feature, None)?;
            cmd_check(&l, &r, &requirement, &feature, &check, io)
        }
        Command::EmitLean { left, right, grounding, output, theorem_name, left_name, right_name } => {
            let l = load(&left, None)?;
            let r = load(&right, None)?;
            let g = load_grounding(grounding.as_deref())?;
            let text = theorem_text(&l, &r, &g, &theorem_name, left_name, right_name)?;
            write(&output, &text)?;
            let _ = writeln!(io.out, "wrote {}", output.display());
            Ok(Exit::Ok)
        }
    }
}

fn cmd_formalize(
    input: &Path,
    engine: Engine,
    output: Option<&Path>,
    id: Option<&str>,
    llm: &LlmArgs,
    io: &mut Io,
) -> Result<Exit, CliError> {
    let out = output.map(Path::to_path_buf).unwrap_or_else(|| input.with_extension("ir"));
    if out == input {
        return Err(CliError::new(Exit::Usage, "output would overwrite the input; pass --output"));
    }
    let loaded = match engine {
        Engine::Rules => load(input, id)?,
        Engine::Llm => {
            let text = read(input)?;
            let text = text.trim();
            let cfg = formalizer_config(llm)?;
            let t = transport(llm, &cfg)?;
            match formalize_remote(text, &cfg, &t) {
                Ok(f) => {
                    save_transcript(llm, Some(&f.transcript))?;
                    Loaded { formula: f.formula, signature: f.signature }
                }
                Err(e) => {
                    save_transcript(llm, e.transcript())?;
                    return Err(e.into());
                }
            }
        }
    };
    write(&out, &serialize_ir(&loaded.formula, &loaded.signature))?;
    let _ = writeln!(
        io.out,
        "wrote {} ({} variables)",
        out.display(),
        loaded.signature.len()
    );
    Ok(Exit::Ok)
}

fn cmd_suggest(
    left: &Path,
    right: &Path,
    threshold: f64,
    output: Option<&Path>,
    io: &mut Io,
) -> Result<Exit, CliError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(CliError::new(Exit::Usage, "threshold must lie in [0, 1]"));
    }
    let l = load(left, None)?;
    let r = load(right, None)?;
    let draft = draft_grounding(&TokenJaccard, &l.signature, &r.signature, threshold);
    let text = draft.render();
    for w in &draft.warnings {
        let _ = writeln!(io.err, "warning: {w}");
    }
    match output {
        Some(p) => {
            write(p, &text)?;
            let _ = writeln!(io.out, "wrote {} ({} lines)", p.display(), draft.lines.len());
        }
        None => {
            let _ = write!(io.out, "{text}");
        }
    }
    Ok(Exit::Ok)
}

fn def_names(l: &Loaded, r: &Loaded, left: Option<String>, right: Option<String>) -> (String, String) {
    let (a, b) = default_def_names(&l.formula, &r.formula);
    (left.unwrap_or(a), right.unwrap_or(b))
}

fn theorem_text(
    l: &Loaded,
    r: &Loaded,
    g: &GroundingMap,
    theorem_name: &str,
    left_name: Option<String>,
    right_name: Option<String>,
) -> Result<String, CliError> {
    let (a, b) = def_names(l, r, left_name, right_name);
    Ok(emit_lean_theorem(
        LeanSide { formula: &l.formula, signature: &l.signature, def_name: &a },
        LeanSide { formula: &r.formula, signature: &r.signature, def_name: &b },
        g,
        theorem_name,
    )?)
}

fn cmd_check(
    l: &Loaded,
    r: &Loaded,
    left: &Path,
    right: &Path,
    args: &CheckArgs,
    io: &mut Io,
) -> Result<Exit, CliError> {
    let g = load_grounding(args.grounding.as_deref())?;
    let inputs = Inputs {
        left: left.display().to_string(),
        right: right.display().to_string(),
        grounding: args.grounding.as_ref().map(|p| p.display().to_string()),
    };
    let checked = check_pair((&l.formula, &l.signature), (&r.formula, &r.signature), &g, args.limit);
    let (mut report, exit) = match checked {
        Ok(c) => {
            let exit = match c.report.verdict {
                Verdict::Equivalent => Exit::Ok,
                Verdict::NotEquivalent => Exit::NotEquivalent,
                Verdict::Aborted => Exit::Aborted,
            };
            (CheckReport::new(&c.report, Some(&c.grounded), inputs), exit)
        }
        Err(PipelineError::Engine(e @ EngineError::PlanTooLarge { .. })) => {
            let _ = writeln!(io.err, "error: {e}");
            (CheckReport::new(&EquivalenceReport::aborted(e.to_string()), None, inputs), Exit::Aborted)
        }
        Err(e) => return Err(e.into()),
    };
    if args.also_prove {
        report.prover = Some(prove(l, r, &g, &args.llm));
    }
    if let Some(p) = &args.report {
        write(p, &report.to_json())?;
    }
    let _ = write!(io.out, "{}", report.summary());
    Ok(exit)
}

fn prove(l: &Loaded, r: &Loaded, g: &GroundingMap, llm: &LlmArgs) -> ProverOutcome {
    let failed = |e: String| ProverOutcome { completed: None, error: Some(e), proof: None };
    let theorem = match theorem_text(l, r, g, DEFAULT_THEOREM_NAME, None, None) {
        Ok(t) => t,
        Err(e) => return failed(e.message),
    };
    let cfg = match formalizer_config(llm) {
        Ok(c) => c,
        Err(e) => return failed(e.message),
    };
    let t = match transport(llm, &cfg) {
        Ok(t) => t,
        Err(e) => return failed(e.message),
    };
    match prove_remote(&theorem, &cfg, &t) {
        Ok(p) => {
            let _ = save_transcript(llm, Some(&p.transcript));
            ProverOutcome { completed: Some(p.completed), error: None, proof: Some(p.proof) }
        }
        Err(e) => {
            let _ = save_transcript(llm, e.transcript());
            failed(e.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (Exit, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let exit = run_args(
            std::iter::once("reqverify").chain(args.iter().copied()),
            &mut Io { out: &mut out, err: &mut err },
        );
        (exit, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn exit_codes_are_stable() {
        let codes: Vec<u8> = [
            Exit::Ok,
            Exit::NotEquivalent,
            Exit::Usage,
            Exit::Io,
            Exit::Parse,
            Exit::Grounding,
            Exit::Aborted,
            Exit::Formalizer,
        ]
        .iter()
        .map(|e| e.code())
        .collect();
        assert_eq!(codes, (0..=7).collect::<Vec<u8>>());
    }

    #[test]
    fn errors_map_to_exit_classes() {
        let e: CliError = EngineError::PlanTooLarge { size: 10, limit: 1 }.into();
        assert_eq!(e.exit, Exit::Aborted);
        let e: CliError = GroundingError::Malformed { line: 1, column: 1, message: "x".into() }.into();
        assert_eq!(e.exit, Exit::Grounding);
        let e: CliError = PipelineError::Selection("pick one".into()).into();
        assert_eq!(e.exit, Exit::Usage);
        let e: CliError = FormalizerError::Usage("empty".into()).into();
        assert_eq!(e.exit, Exit::Usage);
        let e: CliError = FormalizerError::Config("no url".into()).into();
        assert_eq!(e.exit, Exit::Formalizer);
        let e: CliError = LeanError::EmitUnsupported("same name".into()).into();
        assert_eq!(e.exit, Exit::Usage);
    }

    #[test]
    fn help_goes_to_stdout_and_bad_args_to_stderr() {
        let (exit, out, _) = run_capture(&["--help"]);
        assert_eq!(exit, Exit::Ok);
        assert!(out.contains("emit-lean"));
        let (exit, out, err) = run_capture(&["check"]);
        assert_eq!(exit, Exit::Usage);
        assert!(out.is_empty() && !err.is_empty());
    }

    #[test]
    fn errors_are_printed_with_their_code() {
        let (exit, _, err) = run_capture(&["formalize", "/nonexistent/x.req"]);
        assert_eq!(exit, Exit::Io);
        assert!(err.starts_with("error: IO_ERROR"), "{err}");
    }
}
