use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use jellyfuse::pipeline::{
    benchmark_optimizer, evaluate, load_dataset, train_artifact, write_benchmark_csv, write_dataset, Artifact,
    RunConfig,
};
use jellyfuse::sujfo::write_trace_csv;
use jellyfuse::{Error, Result};

#[derive(Parser)]
#[command(name = "jellyfuse", version, about = "Hybrid Bi-GRU/DBN scoring tuned by jellyfish swarm search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML or JSON run configuration; built-in defaults when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write the synthetic dataset as PNG frames with annotations.
    Generate(Common),
    /// Train the SU-JFO model and write artifact.bin and convergence.csv.
    Train(Common),
    /// Repeated split/train/score runs; writes metrics.csv, roc.csv, convergence.csv.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Take the configuration from a trained artifact instead.
        #[arg(long, conflicts_with = "config")]
        artifact: Option<PathBuf>,
    },
    /// Compare SU-JFO with the baseline on test functions and the model objective.
    BenchmarkOptimizer(Common),
    /// Summarise a metrics.csv as a markdown table.
    Report {
        /// metrics.csv written by `evaluate`.
        metrics: PathBuf,
        /// Where to write the markdown; next to the metrics file by default.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

struct RunLog {
    file: Mutex<BufWriter<File>>,
}

impl RunLog {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { file: Mutex::new(BufWriter::new(File::create(dir.join("run.log"))?)) })
    }

    fn line(&self, msg: &str) {
        eprintln!("{msg}");
        let mut f = self.file.lock().unwrap();
        let _ = writeln!(f, "{msg}");
    }

    fn finish(self) -> Result<()> {
        self.file.into_inner().unwrap().flush()?;
        Ok(())
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn create(path: PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(c) => {
            let config = load_config(c.config.as_deref())?;
            config.validate()?;
            let log = RunLog::create(&c.out)?;
            let ds = load_dataset(&config)?;
            let (real, fake) = ds.class_counts();
            write_dataset(&c.out.join("dataset"), &ds)?;
            log.line(&format!("generate: {real} real and {fake} fake samples written to dataset/"));
            log.finish()
        }
        Command::Train(c) => {
            let config = load_config(c.config.as_deref())?;
            let log = RunLog::create(&c.out)?;
            let ds = load_dataset(&config)?;
            let outcome = train_artifact(&config, &ds, &|m| log.line(m))?;
            outcome.artifact.save(c.out.join("artifact.bin"))?;
            let mut w = create(c.out.join("convergence.csv"))?;
            write_trace_csv(&mut w, &outcome.artifact.model.trace)?;
            w.flush()?;
            log.finish()
        }
        Command::Evaluate { common: c, artifact } => {
            let config = match artifact {
                Some(p) => Artifact::load(p)?.config,
                None => load_config(c.config.as_deref())?,
            };
            let log = RunLog::create(&c.out)?;
            let ds = load_dataset(&config)?;
            let report = evaluate(&config, &ds, &|m| log.line(m))?;
            let mut w = create(c.out.join("metrics.csv"))?;
            report.write_metrics_csv(&mut w)?;
            w.flush()?;
            let mut w = create(c.out.join("roc.csv"))?;
            report.write_roc_csv(&mut w)?;
            w.flush()?;
            let mut w = create(c.out.join("convergence.csv"))?;
            write_trace_csv(&mut w, &report.convergence)?;
            w.flush()?;
            for case in &config.test_cases {
                for method in &config.ablations {
                    if let Some(s) = report.get(*method, *case, "accuracy") {
                        log.line(&format!(
                            "evaluate: {} {} accuracy mean {:.4} median {:.4} std {:.4}",
                            method.name(),
                            case.name(),
                            s.mean,
                            s.median,
                            s.std_deviation
                        ));
                    }
                }
            }
            log.line(&format!("evaluate: {} runs hit a degenerate case", report.degenerate_runs));
            log.finish()
        }
        Command::BenchmarkOptimizer(c) => {
            let config = load_config(c.config.as_deref())?;
            let log = RunLog::create(&c.out)?;
            let ds = if config.benchmark.model_seeds > 0 { load_dataset(&config)? } else { Default::default() };
            let traces = benchmark_optimizer(&config, &ds, &|m| log.line(m))?;
            let mut w = create(c.out.join("convergence.csv"))?;
            write_benchmark_csv(&mut w, &traces)?;
            w.flush()?;
            log.finish()
        }
        Command::Report { metrics, out } => {
            let text = fs::read_to_string(&metrics)
                .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", metrics.display())))?;
            let md = render_report(&text)?;
            print!("{md}");
            let out = out.unwrap_or_else(|| metrics.with_file_name("report.md"));
            fs::write(out, md)?;
            Ok(())
        }
    }
}

/// One markdown table per test case: metrics down, methods across,
/// cells `mean ± std`.
fn render_report(csv: &str) -> Result<String> {
    let mut lines = csv.lines();
    let header = lines.next().ok_or_else(|| Error::Format("metrics.csv is empty".into()))?;
    if !header.starts_with("method,test_case,metric,mean,") {
        return Err(Error::Format("metrics.csv has an unexpected header".into()));
    }
    let mut cases: Vec<String> = Vec::new();
    let mut methods: Vec<String> = Vec::new();
    let mut metrics: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, String, String), String> = BTreeMap::new();
    for (n, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::Format(format!("metrics.csv line {}: expected 8 fields", n + 2)));
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::Format(format!("metrics.csv line {}: bad number `{s}`", n + 2)))
        };
        let (mean, std) = (num(f[3])?, num(f[5])?);
        for (list, v) in [(&mut methods, f[0]), (&mut cases, f[1]), (&mut metrics, f[2])] {
            if !list.iter().any(|x| x == v) {
                list.push(v.to_string());
            }
        }
        cells.insert((f[1].into(), f[2].into(), f[0].into()), format!("{mean:.3} ± {std:.3}"));
    }
    let mut out = String::new();
    for case in &cases {
        out.push_str(&format!("## {case}\n\n| metric | {} |\n|---|", methods.join(" | ")));
        out.push_str(&"---|".repeat(methods.len()));
        out.push('\n');
        for metric in &metrics {
            out.push_str(&format!("| {metric} |"));
            for m in &methods {
                let cell = cells.get(&(case.clone(), metric.clone(), m.clone())).map_or("", String::as_str);
                out.push_str(&format!(" {cell} |"));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), e.detail());
            ExitCode::from(match e {
                Error::Config(_) => 2,
                Error::Io(_) => 3,
                Error::Format(_) => 4,
                _ => 1,
            })
        }
    }
}
