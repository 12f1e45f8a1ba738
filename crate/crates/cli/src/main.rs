//! Command-line front end: field listings, pair qualification, table
//! reproduction, residue-class certificates, and the progression sieve,
//! with stable JSON/CSV serialization.

mod descriptor;
mod render;

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use euclass_core::certify::{
    build_pair_context, choose_residue_class, corollary_driver, field_data, qualify_with_data,
    reproduce_tables, verify_certificate, Conclusion,
};
use euclass_core::cyclo::compositum;
use euclass_core::order::maximal_order;
use euclass_core::sieve::{run_sieve, SieveParams, SieveUnits};
use euclass_core::units::find_units;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "euclass", about = "Euclidean ideal class certificates for abelian fields")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Random seed recorded in reports; all computation is deterministic.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Node budget for exact lattice enumeration.
    #[arg(long, global = true, default_value_t = 20_000_000)]
    max_nodes: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the degree-p subfields of Q(zeta_n) with conductors and genus
    /// data.
    Fields {
        n: u64,
        #[arg(default_value_t = 3)]
        p: u64,
    },
    /// Qualify a pair of fields for the Euclidean-ideal-class conclusion.
    Qualify { field1: String, field2: String },
    /// Qualify all cross pairs of cubic subfields for four primes
    /// p1 q1 p2 q2, each 1 mod 3.
    Corollary { p1: u64, q1: u64, p2: u64, q2: u64 },
    /// Reproduce the cubic subfield tables for prime pairs like "7,13".
    Tables { pairs: Vec<String> },
    /// Run the progression sieve for a qualified pair.
    Sieve {
        field1: String,
        field2: String,
        #[arg(long = "X")]
        x: u64,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Construct and independently verify the residue-class certificate of
    /// a pair.
    CertificateVerify { field1: String, field2: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.cmd {
        Cmd::Fields { n, p } => {
            if *p < 3 || *p % 2 == 0 {
                bail!("degree must be an odd prime, got {p}");
            }
            let rows = render::field_rows(*n, *p);
            emit(cli, &render::fields_json(cli.seed, *n, *p, &rows), render::fields_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Qualify { field1, field2 } => {
            let k1 = descriptor::parse_field(field1)?;
            let k2 = descriptor::parse_field(field2)?;
            let rep = euclass_core::certify::qualify_pair(&k1, &k2, cli.max_nodes);
            emit(
                cli,
                &render::qualification_json(cli.seed, &rep),
                render::qualification_csv(&rep),
            )?;
            Ok(conclusion_code(rep.conclusion))
        }
        Cmd::Corollary { p1, q1, p2, q2 } => {
            let reps = corollary_driver(*p1, *q1, *p2, *q2, cli.max_nodes)
                .map_err(|e| anyhow!("{e}"))?;
            let any = reps.iter().any(|r| r.conclusion == Conclusion::Qualified);
            emit(
                cli,
                &render::corollary_json(cli.seed, &reps),
                render::corollary_csv(&reps),
            )?;
            Ok(if any { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Cmd::Tables { pairs } => {
            let parsed: Vec<(u64, u64)> = pairs
                .iter()
                .map(|s| descriptor::parse_prime_pair(s))
                .collect::<Result<_>>()?;
            let rows = reproduce_tables(&parsed, cli.max_nodes).map_err(|e| anyhow!("{e}"))?;
            emit(cli, &render::tables_json(cli.seed, &rows), render::tables_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CertificateVerify { field1, field2 } => {
            let k1 = descriptor::parse_field(field1)?;
            let k2 = descriptor::parse_field(field2)?;
            let d1 = field_data(&k1, cli.max_nodes).map_err(|e| anyhow!("{e}"))?;
            let d2 = field_data(&k2, cli.max_nodes).map_err(|e| anyhow!("{e}"))?;
            let ctx = build_pair_context(&d1, &d2).map_err(|e| anyhow!("{e}"))?;
            let cert = match choose_residue_class(&ctx) {
                Ok(c) => c,
                Err(e) => bail!("{e}"),
            };
            let checks = verify_certificate(&ctx, &cert);
            let ok = checks.all_pass();
            emit(
                cli,
                &render::certificate_json(cli.seed, &ctx, &cert, &checks),
                render::certificate_csv(&cert, &checks),
            )?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Cmd::Sieve { field1, field2, x, a, b, epsilon } => {
            let k1 = descriptor::parse_field(field1)?;
            let k2 = descriptor::parse_field(field2)?;
            let d1 = field_data(&k1, cli.max_nodes).map_err(|e| anyhow!("{e}"))?;
            let d2 = field_data(&k2, cli.max_nodes).map_err(|e| anyhow!("{e}"))?;
            let rep = qualify_with_data(&d1, &d2);
            let cert = match rep.conclusion {
                Conclusion::Qualified => rep.certificate.clone().expect("qualified"),
                Conclusion::Rejected => bail!("pair rejected: {}", rep.reasons.join("; ")),
                Conclusion::Undecided => {
                    eprintln!("undecided: {}", rep.reasons.join("; "));
                    return Ok(ExitCode::from(3));
                }
            };
            let params = match (a, b, epsilon) {
                (None, None, None) => SieveParams::new(cert.u1 % cert.f, cert.f, *x),
                _ => {
                    let defaults = SieveParams::new(cert.u1 % cert.f, cert.f, *x)
                        .map_err(|e| anyhow!("{e}"))?;
                    SieveParams::with(
                        cert.u1 % cert.f,
                        cert.f,
                        *x,
                        a.unwrap_or(defaults.a),
                        b.unwrap_or(defaults.b),
                        epsilon.unwrap_or(defaults.epsilon),
                    )
                }
            }
            .map_err(|e| anyhow!("{e}"))?;
            let o1 = maximal_order(&d1.spec.defining_polynomial().map_err(|e| anyhow!("{e}"))?.coefficients)
                .map_err(|e| anyhow!("{e}"))?;
            let o2 = maximal_order(&d2.spec.defining_polynomial().map_err(|e| anyhow!("{e}"))?.coefficients)
                .map_err(|e| anyhow!("{e}"))?;
            let s1 = find_units(&o1, Some(&d1.spec), cli.max_nodes).map_err(|e| anyhow!("{e}"))?;
            let s2 = find_units(&o2, Some(&d2.spec), cli.max_nodes).map_err(|e| anyhow!("{e}"))?;
            let k = compositum(&d1.spec, &d2.spec).at_conductor();
            let units = SieveUnits {
                o1: &o1,
                u1a: &s1.units[0],
                u1b: &s1.units[1],
                o2: &o2,
                u2a: &s2.units[0],
            };
            let report = run_sieve(&params, &k, &units).map_err(|e| anyhow!("{e}"))?;
            emit(
                cli,
                &render::sieve_json(cli.seed, &report),
                render::sieve_csv(&report),
            )?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn conclusion_code(c: Conclusion) -> ExitCode {
    match c {
        Conclusion::Qualified => ExitCode::SUCCESS,
        Conclusion::Rejected => ExitCode::from(2),
        Conclusion::Undecided => ExitCode::from(3),
    }
}

fn emit(cli: &Cli, json: &serde_json::Value, csv: String) -> Result<()> {
    match cli.output {
        OutputFormat::Json => {
            let s = serde_json::to_string_pretty(json).context("serialize")?;
            println!("{s}");
        }
        OutputFormat::Csv => print!("{csv}"),
    }
    Ok(())
}
