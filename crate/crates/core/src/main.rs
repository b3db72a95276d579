use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use layerctx::cli::{self, BenchOptions, GenerateOptions};

#[derive(Parser)]
#[command(name = "layerctx", version, about = "Context-oriented programming toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check layered source files against the naming conventions.
    Check { inputs: Vec<PathBuf> },
    /// Generate layer declarations and registration shims.
    Generate {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Directory with layer-decl.tmpl and registration-shim.tmpl.
        #[arg(long)]
        templates: Option<PathBuf>,
        /// Also write the merged manifest (JSON) to this path.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Replay the resource storage example and print its trace.
    Demo,
    /// Measure layered dispatch against plain chained calls.
    Bench {
        #[arg(long, default_value_t = 10_000_000)]
        calls: u64,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        no_warmup: bool,
    },
}

fn run(cli: Cli) -> io::Result<i32> {
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    match cli.command {
        Command::Check { inputs } => cli::cmd_check(&inputs, &mut err),
        Command::Generate {
            inputs,
            out_dir,
            templates,
            manifest,
        } => cli::cmd_generate(
            &GenerateOptions {
                inputs: &inputs,
                out_dir: &out_dir,
                template_dir: templates.as_deref(),
                manifest: manifest.as_deref(),
            },
            &mut out,
            &mut err,
        ),
        Command::Demo => cli::cmd_demo(&mut out),
        Command::Bench {
            calls,
            k_max,
            repeats,
            csv,
            no_warmup,
        } => cli::cmd_bench(
            &BenchOptions {
                calls,
                k_max,
                repeats,
                csv,
                no_warmup,
            },
            &mut out,
            &mut err,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("layerctx: {e}");
            ExitCode::FAILURE
        }
    }
}
