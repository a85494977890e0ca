use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use stabcleanse_cli::{run, Cli, CliError, Outcome};

fn write_outputs(o: &Outcome) -> Result<(), CliError> {
    let io = |p: &std::path::Path, e: std::io::Error| CliError::Usage(format!("cannot write {}: {e}", p.display()));
    for (path, text) in &o.files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        }
        std::fs::write(path, text).map_err(|e| io(path, e))?;
    }
    match &o.output_path {
        Some(p) => std::fs::write(p, &o.primary).map_err(|e| io(p, e)),
        None => std::io::stdout()
            .write_all(o.primary.as_bytes())
            .map_err(|e| CliError::Usage(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("internal error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli).and_then(|o| write_outputs(&o)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
