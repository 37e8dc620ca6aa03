use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};

use larr::demo::{self, DemoConfig};
use larr::io::{self, Container};
use larr::render::{render_structure, render_table, RenderOptions};
use larr::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NO_INPUT: u8 = 66;

/// Inspect, validate and generate labeled array files.
#[derive(Parser)]
#[command(name = "larr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the structure of a file.
    Show { file: PathBuf },
    /// Print 0-D or 1-D data as a table.
    Table {
        file: PathBuf,
        /// Dataset item to show.
        #[arg(long)]
        item: Option<String>,
    },
    /// Load a file and check all container invariants.
    Validate { file: PathBuf },
    /// Run the synthetic reduction pipeline.
    Demo {
        #[arg(long, default_value_t = 100)]
        pixels: usize,
        #[arg(long, default_value_t = 10_000)]
        events: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(code: u8, e: &Error) -> ExitCode {
    eprintln!("larr: {e}");
    ExitCode::from(code)
}

/// Loads `file`, mapping unreadable or malformed input to exit code 66.
fn open(file: &PathBuf) -> Result<Container, ExitCode> {
    io::load(file).map_err(|e| fail(EXIT_NO_INPUT, &e))
}

fn table(file: &PathBuf, item: Option<&str>) -> Result<String, ExitCode> {
    let text = match open(file)? {
        Container::DataArray(da) => render_table(&da),
        Container::Dataset(ds) => {
            let names: Vec<&str> = ds.names().collect();
            let name = match (item, names.as_slice()) {
                (Some(n), _) => n,
                (None, [only]) => only,
                (None, _) => {
                    eprintln!("larr: dataset has items {names:?}; choose one with --item");
                    return Err(ExitCode::from(EXIT_USAGE));
                }
            };
            ds.get(name).and_then(render_table)
        }
    };
    text.map_err(|e| match e {
        Error::Key(_) => fail(EXIT_USAGE, &e),
        e => fail(1, &e),
    })
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Show { file } => {
            let x = open(&file)?;
            let opts =
                RenderOptions { color: RenderOptions::from_env().color && std::io::stdout().is_terminal() };
            print!("{}", render_structure(&x, opts));
        }
        Command::Table { file, item } => print!("{}", table(&file, item.as_deref())?),
        Command::Validate { file } => {
            let result = io::load(&file).and_then(|x| x.validate());
            match result {
                Ok(()) => println!("{}: ok", file.display()),
                Err(e @ Error::Io(_)) => return Err(fail(EXIT_NO_INPUT, &e)),
                Err(e) => {
                    println!("{}: invalid", file.display());
                    println!("  {e}");
                    return Err(ExitCode::from(EXIT_INVALID));
                }
            }
        }
        Command::Demo { pixels, events, seed, out } => {
            let cfg = DemoConfig { pixels, events, seed };
            let report = demo::run(&cfg, &out).map_err(|e| match e {
                Error::Io(_) => fail(EXIT_NO_INPUT, &e),
                e => fail(1, &e),
            })?;
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            println!("normalized unit: {}", report.normalized.unit());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
