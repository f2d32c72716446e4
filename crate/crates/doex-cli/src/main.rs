//! `doex` computes PBW normal forms, commutators, centers, normal elements
//! and verification reports for the 26 classified families of trimmed double
//! Ore extensions on four generators.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use doex_cli::commands::{self, family_context, Outcome, RunResult};
use doex_cli::expr::parse_rational;
use doex_cli::registry::{Registry, REGISTRY_ENV};
use doex_core::algebra::Bidegree;
use doex_core::family::Variant;
use doex_core::params::ParamName;
use doex_core::rewrite::DEFAULT_MAX_STEPS;
use num_rational::BigRational;

#[derive(Parser)]
#[command(
    name = "doex",
    about = "Exact PBW rewriting, centers and commutation formulas for double Ore extensions of type (14641)",
    version
)]
struct Cli {
    /// Registry file path (falls back to $DOEX_REGISTRY, then the embedded registry)
    #[arg(long, global = true)]
    registry: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, default_value = "text", value_parser = ["text", "structured"])]
    format: String,

    /// Step budget for normal-form computation
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Family label A..Z
    #[arg(long)]
    family: char,

    /// Record variant
    #[arg(long, default_value = "standard", value_parser = ["standard", "misprint"])]
    variant: String,

    /// Parameter assignment name=value (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the family registry
    Families {
        #[command(subcommand)]
        sub: FamiliesCommand,
    },
    /// Normal form of an expression
    Nf {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Print one line per rewrite step
        #[arg(long)]
        trace: bool,
        expr: String,
    },
    /// Normal form of the commutator of two expressions
    Comm {
        #[command(flatten)]
        fam: FamilyArgs,
        left: String,
        right: String,
    },
    /// Check whether an expression is central
    Central {
        #[command(flatten)]
        fam: FamilyArgs,
        expr: String,
    },
    /// Kernel basis of the centrality system at one bidegree
    Center {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Bidegree "a,b"
        #[arg(long)]
        bidegree: String,
    },
    /// Scan all bidegrees up to a bound for central elements
    Scan {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Componentwise bound "a,b"
        #[arg(long, default_value = "4,4")]
        bound: String,
    },
    /// Solve for a normality witness of an expression
    Normality {
        #[command(flatten)]
        fam: FamilyArgs,
        expr: String,
    },
    /// Check centrality of the n-th power via both routes
    PowerCentral {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        n: u32,
        expr: String,
    },
    /// Verify the compatibility system for one family or all of them
    VerifyConsistency {
        #[arg(long)]
        family: Option<char>,
        #[arg(long, default_value = "standard", value_parser = ["standard", "misprint"])]
        variant: String,
        /// Drop the family's algebraic constraints before checking
        #[arg(long)]
        ignore_constraints: bool,
    },
    /// Verify the closed-form and recursion formulas against the engine
    VerifyFormulas {
        #[arg(long)]
        family: Option<char>,
        #[arg(long, default_value_t = 5)]
        nmax: u32,
    },
    /// Verify the structured center and central-subalgebra claims
    VerifyTables {
        #[arg(long)]
        family: Option<char>,
        #[arg(long, default_value = "standard", value_parser = ["standard", "misprint"])]
        variant: String,
        /// Default scan bound "a,b" for claims without one
        #[arg(long, default_value = "4,4")]
        bound: String,
    },
    /// Termination and local-confluence certification
    VerifyRewriting {
        #[arg(long)]
        family: Option<char>,
    },
    /// Trivial-center cancellation report
    Cancellation {
        #[arg(long)]
        family: Option<char>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long, default_value = "3,3")]
        bound: String,
    },
}

#[derive(Subcommand)]
enum FamiliesCommand {
    /// One line per family
    List,
    /// Full record of one family
    Show {
        #[arg(long)]
        family: char,
        #[arg(long, default_value = "standard", value_parser = ["standard", "misprint"])]
        variant: String,
    },
    /// Render the defining relations from the sigma data
    RenderRelations {
        #[arg(long)]
        family: Option<char>,
    },
}

fn parse_variant(s: &str) -> Variant {
    if s == "misprint" {
        Variant::Misprint
    } else {
        Variant::Standard
    }
}

fn parse_params(raw: &[String]) -> Result<Vec<(ParamName, BigRational)>, String> {
    let mut out = Vec::new();
    for item in raw {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("parameter assignment '{item}' is not NAME=VALUE"))?;
        let name = ParamName::parse(name.trim())
            .ok_or_else(|| format!("unknown parameter '{}'", name.trim()))?;
        let value = parse_rational(value.trim())?;
        out.push((name, value));
    }
    Ok(out)
}

fn parse_bound(s: &str) -> Result<Bidegree, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("bound '{s}' is not 'a,b'"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad bound '{s}'"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad bound '{s}'"))?;
    Ok(Bidegree::new(a, b))
}

fn load_registry(path: &Option<PathBuf>) -> Result<Registry, String> {
    let path = path
        .clone()
        .or_else(|| std::env::var_os(REGISTRY_ENV).map(PathBuf::from));
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| format!("cannot read registry {}: {e}", p.display()))?;
            Registry::parse(&text).map_err(|e| e.to_string())
        }
        None => Ok(Registry::load_default()),
    }
}

fn run(cli: &Cli) -> RunResult {
    let registry = match load_registry(&cli.registry) {
        Ok(r) => r,
        Err(e) => return RunResult::usage(e),
    };
    let max_steps = cli.max_steps;
    let with_ctx =
        |fam: &FamilyArgs, f: &dyn Fn(&commands::FamilyContext<'_>) -> RunResult| -> RunResult {
            let params = match parse_params(&fam.params) {
                Ok(p) => p,
                Err(e) => return RunResult::usage(e),
            };
            match family_context(&registry, fam.family, parse_variant(&fam.variant), &params) {
                Ok(ctx) => f(&ctx),
                Err(r) => r,
            }
        };
    match &cli.command {
        Command::Families { sub } => match sub {
            FamiliesCommand::List => commands::cmd_families_list(&registry),
            FamiliesCommand::Show { family, variant } => {
                commands::cmd_families_show(&registry, *family, parse_variant(variant))
            }
            FamiliesCommand::RenderRelations { family } => {
                commands::cmd_render_relations(&registry, *family)
            }
        },
        Command::Nf { fam, trace, expr } => {
            with_ctx(fam, &|ctx| commands::cmd_nf(ctx, expr, max_steps, *trace))
        }
        Command::Comm { fam, left, right } => {
            with_ctx(fam, &|ctx| commands::cmd_comm(ctx, left, right, max_steps))
        }
        Command::Central { fam, expr } => {
            with_ctx(fam, &|ctx| commands::cmd_central(ctx, expr, max_steps))
        }
        Command::Center { fam, bidegree } => match parse_bound(bidegree) {
            Ok(bd) => with_ctx(fam, &|ctx| commands::cmd_center(ctx, bd, max_steps)),
            Err(e) => RunResult::usage(e),
        },
        Command::Scan { fam, bound } => match parse_bound(bound) {
            Ok(bd) => with_ctx(fam, &|ctx| commands::cmd_scan(ctx, bd, max_steps)),
            Err(e) => RunResult::usage(e),
        },
        Command::Normality { fam, expr } => {
            with_ctx(fam, &|ctx| commands::cmd_normality(ctx, expr, max_steps))
        }
        Command::PowerCentral { fam, n, expr } => with_ctx(fam, &|ctx| {
            commands::cmd_power_central(ctx, expr, *n, max_steps)
        }),
        Command::VerifyConsistency {
            family,
            variant,
            ignore_constraints,
        } => commands::cmd_verify_consistency(
            &registry,
            *family,
            parse_variant(variant),
            *ignore_constraints,
        ),
        Command::VerifyFormulas { family, nmax } => {
            commands::cmd_verify_formulas(&registry, *family, *nmax, max_steps)
        }
        Command::VerifyTables {
            family,
            variant,
            bound,
        } => match parse_bound(bound) {
            Ok(bd) => {
                commands::cmd_verify_tables(&registry, *family, parse_variant(variant), bd, max_steps)
            }
            Err(e) => RunResult::usage(e),
        },
        Command::VerifyRewriting { family } => {
            commands::cmd_verify_rewriting(&registry, *family, max_steps)
        }
        Command::Cancellation {
            family,
            params,
            bound,
        } => {
            let params = match parse_params(params) {
                Ok(p) => p,
                Err(e) => return RunResult::usage(e),
            };
            match parse_bound(bound) {
                Ok(bd) => commands::cmd_cancellation(&registry, *family, &params, bd, max_steps),
                Err(e) => RunResult::usage(e),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    if cli.format == "structured" {
        print!("{}", result.doc.to_json());
    } else {
        print!("{}", result.text);
    }
    match result.outcome {
        Outcome::Confirmed => ExitCode::SUCCESS,
        Outcome::Falsified => ExitCode::from(1),
        Outcome::Usage => ExitCode::from(2),
    }
}
