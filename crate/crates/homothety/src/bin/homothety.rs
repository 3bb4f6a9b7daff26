//! Command-line front end: analyze group specs, print orbit closures,
//! verify them against brute-force enumeration, and export orbits.
//!
//! Exit codes: 0 pass, 2 invalid input, 3 abelian group, 4 verification
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use homothety::affine::Vector;
use homothety::closure::{orbit_closure_with, Params};
use homothety::invariants::GroupSpec;
use homothety::oracle::{
    enumerate_orbit, export_csv, verify_containment, verify_covering, Region,
};
use homothety::report::{analysis_report, parse_spec};
use homothety::Error;

const EXIT_INVALID: u8 = 2;
const EXIT_ABELIAN: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;
const DEFAULT_CAP: usize = 200_000;

#[derive(Parser)]
#[command(
    name = "homothety",
    about = "Orbit closures of finitely generated groups of scalar affine maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the group: case split, ratio closure, invariants, predicates.
    Analyze {
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        relation_bound: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print the symbolic orbit closure of a point.
    Closure {
        spec: PathBuf,
        /// Point as a JSON array of scalars.
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 64)]
        relation_bound: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check the symbolic closure against brute-force enumeration.
    Verify {
        spec: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Covering resolution.
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Axis-aligned box `x0,x1;y0,y1;...`; defaults to [-2,2]^n.
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        #[arg(long, default_value_t = 64)]
        relation_bound: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Enumerate the orbit and write it as CSV.
    ExportOrbit {
        spec: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn params(relation_bound: u32) -> Params {
    let precision_bits = std::env::var("HOMOTHETY_PRECISION_BITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(128);
    Params {
        relation_bound,
        eps: 1e-9,
        precision_bits,
    }
}

fn load_spec(path: &PathBuf) -> Result<GroupSpec, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let json: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_spec(&json).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_point(text: &str, dim: usize) -> Result<Vector, String> {
    let json: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("bad point: {e}"))?;
    let v = Vector::from_json(&json).map_err(|e| format!("bad point: {e}"))?;
    if v.dim() != dim {
        return Err(format!("point has dimension {}, spec has {dim}", v.dim()));
    }
    Ok(v)
}

fn fail_invalid(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INVALID)
}

fn abelian_exit(e: &Error) -> Option<ExitCode> {
    if matches!(e, Error::AbelianGroup) {
        eprintln!("theorems require a non abelian group");
        Some(ExitCode::from(EXIT_ABELIAN))
    } else {
        None
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            spec,
            relation_bound,
            format,
        } => {
            let spec = match load_spec(&spec) {
                Ok(s) => s,
                Err(msg) => return fail_invalid(&msg),
            };
            match analysis_report(&spec, &params(relation_bound)) {
                Ok(report) => {
                    match format {
                        Format::Json => {
                            println!("{}", serde_json::to_string_pretty(&report).unwrap())
                        }
                        Format::Text => print_analysis_text(&report),
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => abelian_exit(&e).unwrap_or_else(|| fail_invalid(&e.to_string())),
            }
        }
        Command::Closure {
            spec,
            point,
            relation_bound,
            format,
        } => {
            let spec = match load_spec(&spec) {
                Ok(s) => s,
                Err(msg) => return fail_invalid(&msg),
            };
            let x = match parse_point(&point, spec.dim()) {
                Ok(v) => v,
                Err(msg) => return fail_invalid(&msg),
            };
            match orbit_closure_with(&spec, &x, &params(relation_bound)) {
                Ok(desc) => {
                    let json = desc.to_json();
                    match format {
                        Format::Json => println!("{}", serde_json::to_string_pretty(&json).unwrap()),
                        Format::Text => println!("orbit closure variant: {}", json["variant"]),
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => abelian_exit(&e).unwrap_or_else(|| fail_invalid(&e.to_string())),
            }
        }
        Command::Verify {
            spec,
            point,
            depth,
            eps,
            region,
            relation_bound,
            format,
        } => {
            if eps <= 0.0 {
                return fail_invalid("eps must be positive");
            }
            let spec = match load_spec(&spec) {
                Ok(s) => s,
                Err(msg) => return fail_invalid(&msg),
            };
            let x = match parse_point(&point, spec.dim()) {
                Ok(v) => v,
                Err(msg) => return fail_invalid(&msg),
            };
            let region = match region {
                Some(text) => match Region::parse(&text) {
                    Ok(r) if r.dim() == spec.dim() => r,
                    Ok(r) => {
                        return fail_invalid(&format!(
                            "region has dimension {}, spec has {}",
                            r.dim(),
                            spec.dim()
                        ))
                    }
                    Err(e) => return fail_invalid(&e.to_string()),
                },
                None => Region(vec![(-2.0, 2.0); spec.dim()]),
            };
            let desc = match orbit_closure_with(&spec, &x, &params(relation_bound)) {
                Ok(d) => d,
                Err(e) => {
                    return abelian_exit(&e).unwrap_or_else(|| fail_invalid(&e.to_string()))
                }
            };
            let enumeration = enumerate_orbit(&spec, &x, depth, DEFAULT_CAP);
            let containment = verify_containment(&enumeration, &desc, 1e-9);
            let covering = verify_covering(&enumeration, &desc, &region, eps, eps / 2.0);
            let pass = containment.pass && covering.pass;
            let json = serde_json::json!({
                "containment": containment.to_json(),
                "covering": covering.to_json(),
                "pass": pass,
            });
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&json).unwrap()),
                Format::Text => {
                    println!(
                        "containment: {} ({} points, {} violations)",
                        if containment.pass { "pass" } else { "FAIL" },
                        containment.points_generated,
                        containment.containment_violations.len(),
                    );
                    println!(
                        "covering: {} ({} gaps at eps {eps})",
                        if covering.pass { "pass" } else { "FAIL" },
                        covering.covering_gaps.len(),
                    );
                }
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY_FAILED)
            }
        }
        Command::ExportOrbit {
            spec,
            point,
            depth,
            csv,
        } => {
            let spec = match load_spec(&spec) {
                Ok(s) => s,
                Err(msg) => return fail_invalid(&msg),
            };
            let x = match parse_point(&point, spec.dim()) {
                Ok(v) => v,
                Err(msg) => return fail_invalid(&msg),
            };
            let enumeration = enumerate_orbit(&spec, &x, depth, DEFAULT_CAP);
            let result = match csv {
                Some(path) => std::fs::File::create(&path)
                    .and_then(|mut f| export_csv(&enumeration.points, &mut f)),
                None => {
                    let stdout = std::io::stdout();
                    export_csv(&enumeration.points, &mut stdout.lock())
                }
            };
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail_invalid(&format!("cannot write CSV: {e}")),
            }
        }
    }
}

fn print_analysis_text(report: &serde_json::Value) {
    println!("nonabelian: {}", report["nonabelian"]);
    println!("case: {}", report["case"]);
    if !report["E_G"].is_null() {
        println!("invariant flat dimension: {}", report["E_G"]["dim"]);
    }
    if !report["H_G"].is_null() {
        println!(
            "translation subgroup generators: {}",
            report["H_G"]["generators"]
        );
    }
    println!("dense orbits: {}", report["predicates"]["dense_orbit"]);
}
