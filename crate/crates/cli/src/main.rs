use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pkernel::calibration::{calibrate, observe, CalibrationOptions, OracleOptions};
use pkernel::coset::{coset_product_support, FoldRule};
use pkernel::criterion::{adlv_nonempty, incidence_table, lifts_to, ConventionManifest, Limits};
use pkernel::lab::{eo_classify, sample_shtuka_trial, FieldConfig, LocalShtuka};
use pkernel::polygon::HodgeDatum;
use pkernel::semimodule::enumerate_cochar_block;
use pkernel::{AffineWeylElement, Error, Execution, Permutation};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pkernel", version, about = "Which p-kernels occur in which isogeny classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Hodge {
    #[arg(long)]
    height: usize,
    #[arg(long)]
    dim: usize,
}

impl Hodge {
    fn datum(&self) -> pkernel::Result<HodgeDatum> {
        HodgeDatum::new(self.height, self.dim)
    }
}

#[derive(Args, Clone)]
struct Guard {
    /// Manifest file written by `calibrate`; the literal manifest otherwise.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    max_height: usize,
    /// Wall-clock cap per cell in milliseconds.
    #[arg(long)]
    cell_timeout_ms: Option<u64>,
    /// Evaluate cells one at a time.
    #[arg(long)]
    sequential: bool,
}

impl Guard {
    fn limits(&self) -> Limits {
        Limits {
            max_height: self.max_height,
            cell_timeout: self.cell_timeout_ms.map(Duration::from_millis),
            ..Limits::default()
        }
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn manifest(&self) -> pkernel::Result<ConventionManifest> {
        match &self.manifest {
            None => Ok(ConventionManifest::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
            }
        }
    }
}

#[derive(Args, Clone)]
struct Field {
    #[arg(long, default_value_t = 2)]
    prime: u32,
    #[arg(long, default_value_t = 2)]
    ext: u32,
}

impl Field {
    fn config(&self) -> pkernel::Result<FieldConfig> {
        FieldConfig::new(self.prime, self.ext)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    FullSupport,
    DemazureMax,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a single (EO type, Newton polygon) cell.
    Check {
        #[command(flatten)]
        hodge: Hodge,
        #[arg(long)]
        eo: String,
        #[arg(long)]
        np: String,
        #[command(flatten)]
        guard: Guard,
    },
    /// Full incidence table for a Hodge datum.
    Incidence {
        #[command(flatten)]
        hodge: Hodge,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        guard: Guard,
    },
    /// Non-emptiness of X_x(b) for b with the given Newton polygon.
    Adlv {
        #[arg(long)]
        x: String,
        #[arg(long)]
        np: String,
        #[command(flatten)]
        guard: Guard,
    },
    /// Normalized cocharacters of a block, e.g. `--block 1,2`.
    EnumerateCochars {
        #[arg(long)]
        block: String,
    },
    /// Newton polygons with endpoint (height, dim).
    EnumeratePolygons {
        #[command(flatten)]
        hodge: Hodge,
    },
    /// Double cosets contained in IxI·IyI.
    CosetProduct {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, value_enum, default_value = "full-support")]
        rule: Rule,
    },
    /// Finite-field oracle.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Select the convention manifest and report the evidence.
    Calibrate {
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[command(flatten)]
        field: Field,
        /// Skip oracle sampling and keep the literal manifest.
        #[arg(long)]
        no_oracle: bool,
        /// Where to write the selected manifest.
        #[arg(long, default_value = "pkernel-manifest.json")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Sample shtukas and print their (EO type, Newton polygon) as JSON lines.
    Sample {
        #[command(flatten)]
        hodge: Hodge,
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[command(flatten)]
        field: Field,
    },
    /// Check the oracle against the criterion and print a report.
    Verify {
        #[command(flatten)]
        hodge: Hodge,
        #[arg(long, default_value_t = 300)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[command(flatten)]
        field: Field,
        #[command(flatten)]
        guard: Guard,
    },
}

#[derive(Serialize)]
struct SampleLine {
    eo: Permutation,
    np: String,
}

#[derive(Serialize)]
struct VerifyReport {
    version: String,
    manifest: ConventionManifest,
    hodge: HodgeDatum,
    samples: u64,
    observations: Vec<pkernel::calibration::Observation>,
    violations: Vec<String>,
    minimal_modules_checked: usize,
    ok: bool,
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> pkernel::Result<T> {
    s.parse()
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn run(cli: Cli, out: &mut impl Write) -> pkernel::Result<ExitCode> {
    let io = |e: std::io::Error| Error::Parse(format!("output: {e}"));
    match cli.command {
        Command::Check { hodge, eo, np, guard } => {
            let r = lifts_to(hodge.datum()?, &parse(&eo)?, &parse(&np)?, &guard.manifest()?, &guard.limits())?;
            writeln!(out, "{}", r.value).map_err(io)?;
            writeln!(out, "{}", json(&r)).map_err(io)?;
        }
        Command::Incidence { hodge, format, guard } => {
            let table = incidence_table(hodge.datum()?, &guard.manifest()?, &guard.limits(), guard.exec())?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&table).expect("serializable")).map_err(io)?,
                Format::Csv => {
                    writeln!(out, "# pkernel {} manifest {}", table.version, json(&table.manifest)).map_err(io)?;
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(table.csv_header()).map_err(|e| Error::Parse(e.to_string()))?;
                    for row in table.csv_rows() {
                        w.write_record(row).map_err(|e| Error::Parse(e.to_string()))?;
                    }
                    out.write_all(&w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).map_err(io)?;
                }
            }
        }
        Command::Adlv { x, np, guard } => {
            let x: AffineWeylElement = parse(&x)?;
            let r = adlv_nonempty(&x, &parse(&np)?, &guard.manifest()?, &guard.limits())?;
            writeln!(out, "{}", r.value).map_err(io)?;
            writeln!(out, "{}", json(&r)).map_err(io)?;
        }
        Command::EnumerateCochars { block } => {
            let parts: Vec<u32> = block
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad block {block:?}"))))
                .collect::<pkernel::Result<_>>()?;
            let [n, m] = parts[..] else {
                return Err(Error::Parse(format!("expected n,m but got {block:?}")));
            };
            writeln!(out, "{}", json(&enumerate_cochar_block(n, m)?)).map_err(io)?;
        }
        Command::EnumeratePolygons { hodge } => {
            let polys: Vec<String> = hodge.datum()?.polygons().iter().map(|p| p.to_string()).collect();
            writeln!(out, "{}", json(&polys)).map_err(io)?;
        }
        Command::CosetProduct { x, y, rule } => {
            let rule = match rule {
                Rule::FullSupport => FoldRule::FullSupport,
                Rule::DemazureMax => FoldRule::DemazureMax,
            };
            let s = coset_product_support(&parse(&x)?, &parse(&y)?, rule)?;
            let items: Vec<String> = s.iter().map(|e| e.to_string()).collect();
            writeln!(out, "{}", json(&items)).map_err(io)?;
        }
        Command::Oracle { command: OracleCommand::Sample { hodge, count, seed, degree, field } } => {
            let hd = hodge.datum()?;
            let cfg = field.config()?;
            let lines = Execution::Parallel.map((0..count).collect(), |trial| -> pkernel::Result<SampleLine> {
                let sh = sample_shtuka_trial(hd, cfg, degree, seed, trial)?;
                Ok(SampleLine { eo: eo_classify(&sh.bt1()?, hd)?, np: sh.newton_polygon()?.to_string() })
            });
            for line in lines {
                writeln!(out, "{}", json(&line?)).map_err(io)?;
            }
        }
        Command::Oracle { command: OracleCommand::Verify { hodge, count, seed, degree, field, guard } } => {
            let hd = hodge.datum()?;
            let manifest = guard.manifest()?;
            let limits = guard.limits();
            let opts = OracleOptions { field: field.config()?, samples: count, degree, seed, ..OracleOptions::default() };
            let observations = observe(hd, &opts, guard.exec())?;
            let mut violations = Vec::new();
            for o in &observations {
                if !lifts_to(hd, &o.eo, &o.polygon, &manifest, &limits)?.value {
                    violations.push(format!("observed ({}, {}) {} times but the criterion rejects it", o.eo, o.polygon, o.count));
                }
            }
            let polygons = hd.polygons();
            for p in &polygons {
                let sh = LocalShtuka::minimal(p, opts.field.field()?)?;
                if sh.newton_polygon()? != *p {
                    violations.push(format!("minimal module of {p} has a different Newton polygon"));
                }
                let w = eo_classify(&sh.bt1()?, hd)?;
                if !lifts_to(hd, &w, p, &manifest, &limits)?.value {
                    violations.push(format!("minimal module of {p} has EO type {w}, rejected by the criterion"));
                }
            }
            let ok = violations.is_empty();
            let report = VerifyReport {
                version: pkernel::VERSION.to_string(),
                manifest,
                hodge: hd,
                samples: count,
                observations,
                violations,
                minimal_modules_checked: polygons.len(),
                ok,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).map_err(io)?;
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Calibrate { samples, seed, degree, field, no_oracle, out: path } => {
            let oracle = (!no_oracle).then(|| -> pkernel::Result<OracleOptions> {
                Ok(OracleOptions { field: field.config()?, samples, degree, seed, ..OracleOptions::default() })
            });
            let opts = CalibrationOptions { oracle: oracle.transpose()?, ..CalibrationOptions::default() };
            let report = calibrate(&opts)?;
            let manifest = serde_json::to_string_pretty(&report.manifest).expect("serializable");
            std::fs::write(&path, manifest + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).map_err(io)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ResourceExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
