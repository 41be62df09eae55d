//! The `heisenbn` command line. [`run`] executes one invocation and returns
//! its output, so tests can drive commands without spawning processes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use heisenbn::bn::{Evidence, Network};
use heisenbn::calibration::{synthesize_records_with, FitSettings, Priors, SynthConfig};
use heisenbn::defect::{rating_scales, DefectModelParams, DefectTemplate, ProjectScenario};
use heisenbn::io::render::{self, DEFAULT_SENSITIVITY_TARGET};
use heisenbn::io::{
    evidence_document, model_document, parse_evidence, parse_fault_tree, parse_model_document, parse_params,
    parse_priors, parse_records, parse_scenario, serialize_evidence, serialize_params, serialize_records,
    to_canonical_json, ErrorKind, ErrorReport, ParseOptions,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "heisenbn", version, about = "Discrete Bayesian networks for defect prediction and fault trees")]
struct Cli {
    /// Accept unknown fields in input documents (also HEISENBN_STRICT=0).
    #[arg(long, global = true)]
    permissive: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

/// A model file, or a scenario instantiated on the defect template.
#[derive(Debug, Args)]
struct Subject {
    /// Model document.
    #[arg(required_unless_present = "scenario", conflicts_with_all = ["scenario", "params"])]
    model: Option<PathBuf>,
    /// Scenario document, used instead of a model.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Defect-model parameters for --scenario.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Evidence document.
    #[arg(long)]
    evidence: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Defect-model parameters; defaults when absent.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Extra evidence layered over the scenario answers.
    #[arg(long)]
    evidence: Option<PathBuf>,
    /// Field-exposure horizon, overriding the scenario's.
    #[arg(long)]
    horizon_months: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model document.
    Validate { model: PathBuf },
    /// Posterior marginals.
    Infer {
        #[command(flatten)]
        subject: Subject,
        /// Nodes to report; every node when absent.
        #[arg(long = "target", num_args = 1..)]
        targets: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Found and field defect distributions for a scenario.
    Predict {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Posteriors after observing how many defects verification found.
    Diagnose {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        found: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Tornado sweep and mutual information for a target.
    Sensitivity {
        #[command(flatten)]
        subject: Subject,
        /// Target node; field_defects for scenarios.
        #[arg(long)]
        target: Option<String>,
        /// Comma-separated inputs; every ancestor of the target when absent.
        #[arg(long, value_delimiter = ',')]
        inputs: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Fit defect-model parameters to project records.
    Calibrate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        priors: Option<PathBuf>,
        /// Starting parameters; defaults when absent.
        #[arg(long = "init")]
        init: Option<PathBuf>,
        /// Write fitted parameters here; the report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = FitSettings::default().sweeps)]
        sweeps: usize,
        #[arg(long, default_value_t = FitSettings::default().refinements)]
        refinements: usize,
    },
    /// Sample synthetic project records from the defect model.
    Synth {
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include sampled latent states alongside the records.
        #[arg(long)]
        latent: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Compile a fault tree to a model document.
    Ft2bn {
        tree: PathBuf,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Top-event probability of a fault tree.
    FtTop { tree: PathBuf },
    /// Rank basic events given soft evidence on the top event.
    FtDiagnose {
        tree: PathBuf,
        /// Likelihoods of the observation under top=true and top=false.
        #[arg(long, value_delimiter = ',', num_args = 1, default_value = "1,0")]
        top_soft: Vec<f64>,
    },
    /// Rating-scale definitions for the questionnaire.
    Scales,
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    opts: ParseOptions,
}

fn read(path: &Path) -> Result<String, ErrorReport> {
    std::fs::read_to_string(path)
        .map_err(|e| ErrorReport::new(ErrorKind::Runtime, path.display().to_string(), format!("cannot read: {e}")))
}

fn write(path: &Path, text: &str) -> Result<(), ErrorReport> {
    std::fs::write(path, text)
        .map_err(|e| ErrorReport::new(ErrorKind::Runtime, path.display().to_string(), format!("cannot write: {e}")))
}

fn located<T, E: Into<ErrorReport>>(path: &Path, r: Result<T, E>) -> Result<T, ErrorReport> {
    r.map_err(|e| e.into().in_document(&path.display().to_string()))
}

impl Ctx {
    fn params(&self, path: Option<&Path>) -> Result<DefectModelParams, ErrorReport> {
        match path {
            Some(p) => located(p, parse_params(&read(p)?, self.opts)),
            None => Ok(DefectModelParams::default()),
        }
    }

    fn scenario(&self, path: &Path, horizon: Option<u32>) -> Result<ProjectScenario, ErrorReport> {
        let mut s = located(path, parse_scenario(&read(path)?, self.opts))?;
        if let Some(h) = horizon {
            s.horizon_months = h;
        }
        Ok(s)
    }

    fn evidence(&self, path: Option<&Path>, net: &Network) -> Result<Evidence, ErrorReport> {
        match path {
            Some(p) => {
                let doc = located(p, parse_evidence(&read(p)?, self.opts))?;
                located(p, render::resolve_evidence(&doc, net))
            }
            None => Ok(Evidence::new()),
        }
    }

    /// Network and evidence for a model or scenario subject.
    fn subject(&self, s: &Subject) -> Result<(Network, Evidence, bool), ErrorReport> {
        match (&s.model, &s.scenario) {
            (Some(m), _) => {
                let doc = located(m, parse_model_document(&read(m)?, self.opts))?;
                let net = located(m, doc.to_network())?;
                let ev = self.evidence(s.evidence.as_deref(), &net)?;
                Ok((net, ev, false))
            }
            (None, Some(sc)) => {
                let template = DefectTemplate::new(self.params(s.params.as_deref())?)?;
                let scenario = self.scenario(sc, None)?;
                let dn = template.instantiate(&scenario)?;
                let extra = self.evidence(s.evidence.as_deref(), &dn.network)?;
                Ok((dn.network, dn.evidence.overlaid(&extra), true))
            }
            (None, None) => Err(ErrorReport::new(ErrorKind::Validation, "$", "a model or --scenario is required")),
        }
    }

    fn scenario_subject(&self, a: &ScenarioArgs) -> Result<(DefectTemplate, ProjectScenario, Evidence), ErrorReport> {
        let template = DefectTemplate::new(self.params(a.params.as_deref())?)?;
        let scenario = self.scenario(&a.scenario, a.horizon_months)?;
        let extra = match &a.evidence {
            Some(_) => {
                let dn = template.instantiate(&scenario)?;
                self.evidence(a.evidence.as_deref(), &dn.network)?
            }
            None => Evidence::new(),
        };
        Ok((template, scenario, extra))
    }
}

fn execute(cmd: Command, ctx: &Ctx) -> Result<String, ErrorReport> {
    match cmd {
        Command::Validate { model } => {
            let doc = located(&model, parse_model_document(&read(&model)?, ctx.opts))?;
            let net = located(&model, doc.to_network())?;
            Ok(format!("{}: ok, {} nodes\n", model.display(), net.len()))
        }
        Command::Infer { subject, targets, format } => {
            let (net, ev, _) = ctx.subject(&subject)?;
            let targets: Vec<&str> = if targets.is_empty() {
                (0..net.len()).map(|i| net.node_at(i).id()).collect()
            } else {
                targets.iter().map(String::as_str).collect()
            };
            let report = render::infer(&net, &ev, &targets)?;
            Ok(match format {
                Format::Json => to_canonical_json(&report),
                Format::Table => render::posterior_table(&report.posteriors),
            })
        }
        Command::Predict { scenario, format } => {
            let (template, s, extra) = ctx.scenario_subject(&scenario)?;
            let out = render::predict(&template, &s, &extra)?;
            Ok(match format {
                Format::Json => to_canonical_json(&out),
                Format::Table => render::posterior_table(&out.posteriors),
            })
        }
        Command::Diagnose { scenario, found, format } => {
            let (template, s, extra) = ctx.scenario_subject(&scenario)?;
            let out = render::diagnose(&template, &s, &extra, found)?;
            Ok(match format {
                Format::Json => to_canonical_json(&out),
                Format::Table => format!("found {} ({})\n{}", out.observed_found, out.found_interval, render::posterior_table(&out.posteriors)),
            })
        }
        Command::Sensitivity { subject, target, inputs, format } => {
            let (net, ev, is_scenario) = ctx.subject(&subject)?;
            let target = match (target, is_scenario) {
                (Some(t), _) => t,
                (None, true) => DEFAULT_SENSITIVITY_TARGET.to_string(),
                (None, false) => {
                    return Err(ErrorReport::new(ErrorKind::Validation, "target", "--target is required for models"))
                }
            };
            let out = render::sensitivity(&net, &ev, &target, inputs.as_deref())?;
            Ok(match format {
                Format::Json => to_canonical_json(&out),
                Format::Table => render::sensitivity_table(&out),
            })
        }
        Command::Calibrate { records, priors, init, out, sweeps, refinements } => {
            let recs = located(&records, parse_records(&read(&records)?, ctx.opts))?;
            let priors = match &priors {
                Some(p) => located(p, parse_priors(&read(p)?, ctx.opts))?,
                None => Priors::default(),
            };
            let init = ctx.params(init.as_deref())?;
            let settings = FitSettings { sweeps, refinements, ..FitSettings::default() };
            let result = render::calibrate(&recs, &init, &priors, &settings)?;
            match out {
                Some(path) => {
                    write(&path, &serialize_params(&result.params))?;
                    Ok(to_canonical_json(&result.report))
                }
                None => Ok(to_canonical_json(&result)),
            }
        }
        Command::Synth { params, count, seed, latent, out } => {
            let params = ctx.params(params.as_deref())?;
            let synth = synthesize_records_with(&params, &SynthConfig::new(seed, count))?;
            let text = if latent {
                let rows: Vec<LatentRow> = synth.iter().map(latent_row).collect();
                to_canonical_json(&rows)
            } else {
                let recs: Vec<_> = synth.into_iter().map(|r| r.record).collect();
                serialize_records(&recs)
            };
            match out {
                Some(path) => write(&path, &text).map(|_| String::new()),
                None => Ok(text),
            }
        }
        Command::Ft2bn { tree, out } => {
            let t = located(&tree, parse_fault_tree(&read(&tree)?, ctx.opts))?;
            let text = to_canonical_json(&model_document(&t.compile()?, None));
            match out {
                Some(path) => write(&path, &text).map(|_| String::new()),
                None => Ok(text),
            }
        }
        Command::FtTop { tree } => {
            let t = located(&tree, parse_fault_tree(&read(&tree)?, ctx.opts))?;
            Ok(to_canonical_json(&render::top_event(&t)?))
        }
        Command::FtDiagnose { tree, top_soft } => {
            if top_soft.len() != 2 {
                return Err(ErrorReport::new(ErrorKind::Validation, "top-soft", "expected two likelihoods: true,false"));
            }
            let t = located(&tree, parse_fault_tree(&read(&tree)?, ctx.opts))?;
            Ok(to_canonical_json(&render::cause_ranking(&t, top_soft[0], top_soft[1])?))
        }
        Command::Scales => Ok(to_canonical_json(&rating_scales())),
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new()
                .map_err(|e| ErrorReport::new(ErrorKind::Runtime, "$", format!("cannot start runtime: {e}")))?;
            let addr = std::net::SocketAddr::new(host, port);
            eprintln!("listening on http://{addr}");
            rt.block_on(heisenbn_service::serve(addr, ctx.opts))
                .map_err(|e| ErrorReport::new(ErrorKind::Runtime, addr.to_string(), e))?;
            Ok(String::new())
        }
    }
}

#[derive(Serialize)]
struct LatentRow<'a> {
    record: heisenbn::io::RecordDoc,
    latent: &'a std::collections::BTreeMap<String, String>,
}

fn latent_row(r: &heisenbn::calibration::SyntheticRecord) -> LatentRow<'_> {
    LatentRow {
        record: heisenbn::io::RecordsDocument::from_records(std::slice::from_ref(&r.record)).records.remove(0),
        latent: &r.latent,
    }
}

/// Exit code for an error report.
pub fn exit_code(r: &ErrorReport) -> i32 {
    if r.kind.is_input_error() {
        EXIT_VALIDATION
    } else {
        EXIT_RUNTIME
    }
}

/// Run one invocation; `args[0]` is the program name.
pub fn run<S: AsRef<str>>(args: &[S]) -> Output {
    let cli = match Cli::try_parse_from(args.iter().map(|a| a.as_ref())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code, stdout: String::new(), stderr: text }
            } else {
                Output { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let opts = if cli.permissive { ParseOptions::permissive() } else { ParseOptions::from_env() };
    match execute(cli.command, &Ctx { opts }) {
        Ok(stdout) => Output { code: EXIT_OK, stdout, stderr: String::new() },
        Err(r) => Output { code: exit_code(&r), stdout: String::new(), stderr: format!("error: {r}\n") },
    }
}

/// Evidence file for `ev` on `net`, as `infer --evidence` reads it.
pub fn evidence_file(ev: &Evidence, net: &Network) -> Result<String, ErrorReport> {
    Ok(serialize_evidence(&evidence_document(ev, net)?))
}
