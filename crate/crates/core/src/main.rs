use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use schurcat::cli::{exit_code, run, Command, RunConfig};
use schurcat::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    RootData,
    Hilbert,
    BuildModule,
    CheckModule,
    Ext,
    SchurCheck,
    KoszulCheck,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::RootData => Command::RootData,
            Cmd::Hilbert => Command::Hilbert,
            Cmd::BuildModule => Command::BuildModule,
            Cmd::CheckModule => Command::CheckModule,
            Cmd::Ext => Command::Ext,
            Cmd::SchurCheck => Command::SchurCheck,
            Cmd::KoszulCheck => Command::KoszulCheck,
        }
    }
}

/// Exact Ext computations for weight-graded modules and flag-cohomology comparisons.
///
/// Exit status 0 means the command completed, whatever the verdict; 2 is a configuration
/// error, 3 a cache error, 1 any other operational failure.
#[derive(Debug, Parser)]
#[command(name = "schurcat", version)]
struct Args {
    command: Cmd,
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cartan type such as A1, B2, G2.
    #[arg(long = "type")]
    cartan_type: Option<String>,
    /// Explicit Cartan matrix as JSON, e.g. [[2,-1],[-1,2]].
    #[arg(long)]
    cartan_matrix: Option<String>,
    /// Symmetrizers as comma-separated integers.
    #[arg(long, value_delimiter = ',')]
    symmetrizers: Option<Vec<u32>>,
    /// f family: classical, qinteger, zero, or a JSON object.
    #[arg(long)]
    f: Option<String>,
    /// generic, one, or an exact rational.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    window: Option<i64>,
    #[arg(long)]
    margin: Option<i64>,
    #[arg(long)]
    homcap: Option<usize>,
    #[arg(long)]
    hilbert_cap: Option<usize>,
    #[arg(long)]
    gb_len: Option<usize>,
    #[arg(long)]
    certify_len: Option<usize>,
    #[arg(long)]
    depth_cap: Option<usize>,
    /// Module spec, repeatable: trivial:W, simple:W, verma:W:DEPTH, file:PATH.
    #[arg(long = "module")]
    modules: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Enable the experimental O-side comparison hook.
    #[arg(long)]
    ext_full_probe: bool,
    /// Print a short table to stderr in addition to the JSON report.
    #[arg(long)]
    table: bool,
}

fn flag_config(a: &Args) -> Result<RunConfig, Error> {
    let cartan_matrix = match &a.cartan_matrix {
        Some(s) => Some(serde_json::from_str(s).map_err(|e| Error::Config {
            field: "cartan_matrix".into(),
            reason: e.to_string(),
        })?),
        None => None,
    };
    Ok(RunConfig {
        cartan_type: a.cartan_type.clone(),
        cartan_matrix,
        symmetrizers: a.symmetrizers.clone(),
        f: a.f.clone().map(|s| match serde_json::from_str::<serde_json::Value>(&s) {
            Ok(v @ serde_json::Value::Object(_)) => v,
            _ => serde_json::Value::String(s),
        }),
        q: a.q.clone(),
        window: a.window,
        margin: a.margin,
        homcap: a.homcap,
        hilbert_cap: a.hilbert_cap,
        gb_len: a.gb_len,
        certify_len: a.certify_len,
        depth_cap: a.depth_cap,
        modules: (!a.modules.is_empty()).then(|| a.modules.clone()),
        out: a.out.clone(),
        cache: a.cache.clone(),
        seed: a.seed,
        ext_full_probe: a.ext_full_probe.then_some(true),
    })
}

fn load(a: &Args) -> Result<RunConfig, Error> {
    let flags = flag_config(a)?;
    let base = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config {
                field: "config".into(),
                reason: format!("{}: {e}", p.display()),
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    Ok(base.overridden_by(&flags))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = load(&args).and_then(|cfg| {
        let report = run(args.command.into(), &cfg)?;
        let text = report.to_json();
        match &cfg.out {
            Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            None => println!("{text}"),
        }
        if args.table {
            eprint!("{}", report.render_table());
        }
        Ok(report)
    });
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&outcome) as u8)
}
