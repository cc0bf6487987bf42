mod commands;
mod expr;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graded_core::algebra::Mode;
use serde_json::{json, Value};

use commands::{InputError, Report};
use manifest::Manifest;

#[derive(Parser)]
#[command(name = "graded", version, about = "Exact checks for divergences and Berezinians on split graded symplectic manifolds")]
struct Cli {
    /// JSON manifest describing the symplectic data
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Print machine-readable output
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random cases per property suite
    #[arg(long, global = true, default_value_t = 100)]
    cases: u64,
    /// Force chart or torus semantics regardless of the manifest
    #[arg(long, global = true, value_enum)]
    mode_override: Option<ModeArg>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Chart,
    Torus,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the manifest data
    Check,
    /// Print the even symplectic form and its inverse
    Theta,
    /// Poisson bracket of two sections
    Bracket { s: String, t: String },
    /// Hamiltonian derivation of a section
    Ham { s: String },
    /// Divergence of a derivation
    Div { d: String },
    /// Modular vector field
    Modular,
    /// Triviality of the modular class
    Class,
    /// Berezin integral (torus only)
    Integrate { s: String },
    /// Continuity equation residual for a density and a derivation
    Continuity { rho: String, d: String },
    /// Randomised integral identity against the manifest (torus only)
    Oracle,
    /// Run every property suite
    Props,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Check => "check",
            Cmd::Theta => "theta",
            Cmd::Bracket { .. } => "bracket",
            Cmd::Ham { .. } => "ham",
            Cmd::Div { .. } => "div",
            Cmd::Modular => "modular",
            Cmd::Class => "class",
            Cmd::Integrate { .. } => "integrate",
            Cmd::Continuity { .. } => "continuity",
            Cmd::Oracle => "oracle",
            Cmd::Props => "props",
        }
    }
}

fn load(cli: &Cli) -> Result<Option<Manifest>, InputError> {
    let mode = cli.mode_override.map(|m| match m {
        ModeArg::Chart => Mode::Chart,
        ModeArg::Torus => Mode::Torus,
    });
    match &cli.manifest {
        Some(p) => Ok(Some(manifest::load(&p.to_string_lossy(), mode)?)),
        None if matches!(cli.command, Cmd::Props) => Ok(None),
        None => Err(InputError("--manifest is required for this command".into())),
    }
}

fn run(cli: &Cli) -> Result<Report, InputError> {
    let m = load(cli)?;
    let Some(m) = m.as_ref() else {
        return commands::props(None, cli.seed, cli.cases);
    };
    match &cli.command {
        Cmd::Check => commands::check(m),
        Cmd::Theta => commands::theta(m),
        Cmd::Bracket { s, t } => commands::bracket(m, s, t),
        Cmd::Ham { s } => commands::ham(m, s),
        Cmd::Div { d } => commands::div(m, d),
        Cmd::Modular => commands::modular(m),
        Cmd::Class => commands::class(m),
        Cmd::Integrate { s } => commands::integrate(m, s),
        Cmd::Continuity { rho, d } => commands::continuity(m, rho, d),
        Cmd::Oracle => commands::oracle(m, cli.seed, cli.cases),
        Cmd::Props => commands::props(Some(m), cli.seed, cli.cases),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                let mut obj = json!({ "command": name, "passed": r.passed });
                if let Value::Object(o) = &mut obj {
                    o.extend(r.fields);
                }
                println!("{obj}");
            } else {
                for l in &r.lines {
                    println!("{l}");
                }
            }
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            if cli.json {
                println!("{}", json!({ "command": name, "passed": false, "error": { "kind": "input", "message": msg } }));
            } else {
                eprintln!("graded: {msg}");
            }
            ExitCode::from(2)
        }
    }
}
