//! Command-line front end for `cldiam`: graph generation, diameter runs,
//! the Δ-stepping baseline, comparisons, oracles and the acceptance suites.
//!
//! Every run command prints one JSON record on stdout and a short summary
//! on stderr, and appends the record to `--out` or to
//! `$CLDIAM_OUT_DIR/records.jsonl` when that variable is set.

pub mod args;
pub mod commands;
pub mod corpus;
pub mod error;
pub mod record;
pub mod source;
pub mod suites;
pub mod tau;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use args::{Cli, Command, VerifyArgs};
use commands::{cmd_compare, cmd_diam, cmd_gen, cmd_oracle, cmd_sssp, out_dir_from_env, plot_path, write_compare_csv, write_plot_data};
use error::{CliError, CliResult};
use record::RunRecord;

/// Records file inside the output directory.
pub const RECORDS_FILE: &str = "records.jsonl";

fn summary(r: &RunRecord) -> String {
    let mut parts = vec![
        r.command.clone(),
        r.graph.spec.clone(),
        format!("n={}", r.graph.nodes),
        format!("m={}", r.graph.edges),
    ];
    let e = &r.estimates;
    let fields = [
        ("phi", e.phi_approx),
        ("lower", e.lower),
        ("upper", e.upper),
        ("radius", e.radius),
        ("best_delta", e.best_delta),
    ];
    parts.extend(fields.iter().filter_map(|(k, v)| v.map(|v| format!("{k}={v}"))));
    if let Some(c) = e.clusters {
        parts.push(format!("clusters={c}"));
    }
    if let Some(m) = &r.metrics {
        parts.push(format!("rounds={} work={}", m.rounds, m.work()));
    }
    for o in &r.oracle {
        parts.push(format!("{}={}", o.quantity, o.value));
    }
    parts.push(format!("time={:.3}s", r.wall_time));
    parts.join(" ")
}

fn emit(r: &RunRecord, out: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    writeln!(stdout, "{}", r.to_json_line()?)?;
    writeln!(stderr, "{}", summary(r))?;
    let target = out.map(Path::to_path_buf).or_else(|| out_dir_from_env().map(|d| d.join(RECORDS_FILE)));
    if let Some(path) = target {
        r.append_to(&path)?;
    }
    Ok(())
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::File { path: path.display().to_string(), source })
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut failed = Vec::new();
    if let Some(cache) = &args.cache {
        match cldiam::graph::load_binary(cache) {
            Ok(g) => writeln!(stdout, "PASS cache {}: n={} m={}", cache.display(), g.node_count(), g.edge_count())?,
            Err(e) => {
                writeln!(stdout, "FAIL cache {}: {e}", cache.display())?;
                failed.push("cache".to_string());
            }
        }
    }
    let mut write_result = Ok(());
    let outcomes = suites::run_suites(args.level, &args.only, |o| {
        if write_result.is_ok() {
            write_result = writeln!(stdout, "{}", o.line()).and_then(|()| stdout.flush());
        }
    });
    write_result?;
    failed.extend(outcomes.iter().filter(|o| !o.passed).map(|o| format!("criterion {}", o.id)));
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

/// Executes a parsed command line.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        // Only the first configuration in a process takes effect.
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().ok();
    }
    match &cli.command {
        Command::Gen(a) => {
            let (r, path) = cmd_gen(a)?;
            writeln!(stderr, "wrote {}", path.display())?;
            emit(&r, None, stdout, stderr)
        }
        Command::Diam(a) => emit(&cmd_diam(a)?, a.out.as_deref(), stdout, stderr),
        Command::Sssp(a) => emit(&cmd_sssp(a)?, a.out.as_deref(), stdout, stderr),
        Command::Oracle(a) => emit(&cmd_oracle(a)?, a.out.as_deref(), stdout, stderr),
        Command::Compare(a) => {
            let report = cmd_compare(a)?;
            let csv: Option<PathBuf> = a.out.clone().or_else(|| out_dir_from_env().map(|d| d.join("compare.csv")));
            match &csv {
                Some(path) => {
                    write_compare_csv(&report.record.estimates.rows, create(path)?)?;
                    let plot = plot_path(path);
                    write_plot_data(&report.plot, create(&plot)?)?;
                    writeln!(stderr, "wrote {} and {}", path.display(), plot.display())?;
                }
                None => write_compare_csv(&report.record.estimates.rows, &mut *stdout)?,
            }
            writeln!(stderr, "{}", summary(&report.record))?;
            if let Some(dir) = out_dir_from_env() {
                report.record.append_to(&dir.join(RECORDS_FILE))?;
            }
            Ok(())
        }
        Command::Verify(a) => verify(a, stdout),
    }
}
