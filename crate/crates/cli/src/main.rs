//! `symstrat`: build cell complexes, compute homology and spectral sequences,
//! and run the stability verification suites.

mod cache;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use symstrat_core::foxneuwirth::{conf_space_spec, wcomp_spec, FnSpec, DEFAULT_LIMIT};
use symstrat_core::homology::{nonzero, Coefficients, GradedGroups, HomologyGroup};
use symstrat_core::partitions::{enumerate_partitions, ColourVector, Partition};
use symstrat_core::strata::{chi_c_wcomp, strata_by_codimension};
use symstrat_core::verify::{
    overall, spectral_report, verify_coloured, verify_oracles, verify_strata, verify_symcomp, Direct, GroupKind,
    GroupSource, SpectralField, SpectralReport, Verdict, VerificationReport,
};
use symstrat_core::Error;

use cache::{DiskCache, CACHE_ENV, DEFAULT_CACHE_DIR};
use output::{Format, Report, Table};

#[derive(Parser, Debug)]
#[command(name = "symstrat", version, about = "Homology of coloured configuration spaces and symmetric-product complements")]
struct Cli {
    /// Emit JSON
    #[arg(long, global = true, conflicts_with_all = ["csv", "markdown"])]
    json: bool,
    /// Emit CSV tables
    #[arg(long, global = true, conflicts_with = "markdown")]
    csv: bool,
    /// Emit markdown tables
    #[arg(long, global = true)]
    markdown: bool,
    /// Largest total number of points a complex may have
    #[arg(long, global = true, default_value_t = DEFAULT_LIMIT)]
    limit: u32,
    /// Cache directory (default: $SYMSTRAT_CACHE or .symstrat-cache)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Compute everything afresh and write nothing to disk
    #[arg(long, global = true, conflicts_with = "cache")]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the partitions of n
    Partitions { n: u32 },
    /// Strata of the complement of a stratum closure, by codimension
    Strata {
        #[arg(long)]
        partition: Partition,
        #[arg(long, default_value_t = 2)]
        dim: u32,
    },
    /// Compactly supported Euler characteristic of the complement
    Chi {
        #[arg(long)]
        partition: Partition,
        #[arg(long = "chi-x", allow_negative_numbers = true)]
        chi_x: i64,
        #[arg(long, default_value_t = 2)]
        dim: u32,
    },
    /// Compactly supported cohomology, or homology with --dual
    Homology(HomologyArgs),
    /// Pages of the codimension-filtered complex of a complement
    Spectral {
        #[arg(long)]
        partition: Partition,
        /// Q or Zp for a prime p
        #[arg(long, default_value = "Q")]
        field: Coefficients,
    },
    /// Verification suites
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug)]
struct HomologyArgs {
    #[command(subcommand)]
    target: Target,
    /// Z, Q or Zp for a prime p
    #[arg(long, global = true, default_value = "Z")]
    coeff: Coefficients,
    /// Report H_k of the space (Poincaré dual degrees) instead of H_c^k
    #[arg(long, global = true)]
    dual: bool,
}

#[derive(Subcommand, Debug)]
enum Target {
    /// Coloured configuration space
    Conf {
        #[arg(long)]
        colours: ColourVector,
    },
    /// Complement of the closure of a multiplicity stratum
    Wcomp {
        #[arg(long)]
        partition: Partition,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Integral stability of coloured configuration spaces
    ColouredStability {
        /// Instances have total number of points below this
        #[arg(long, default_value_t = 7)]
        max_total: u32,
    },
    /// Rational stability of complements under adding a simple point
    SymcompStability {
        #[arg(long)]
        partition: Partition,
        #[arg(long)]
        j_max: u32,
    },
    /// Stratum counts on both sides of a stabilisation
    Strata {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 6)]
        j_max: u32,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<u32>,
    },
    /// Independent oracle table
    Oracles,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPartition(_)
            | Error::InvalidColourVector(_)
            | Error::MismatchedTotal { .. }
            | Error::DimensionTooSmall(_)
            | Error::IndexOutOfBounds { .. }
            | Error::SizeLimitExceeded { .. }
            | Error::NotOpen(_)
            | Error::IntegralDualityUnavailable
            | Error::InvalidCoefficients(_) => Failure::Usage(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<Report, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else if cli.markdown {
        Format::Markdown
    } else {
        Format::Text
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn source(cli: &Cli) -> std::result::Result<Box<dyn GroupSource>, Failure> {
    if cli.no_cache {
        return Ok(Box::new(Direct { limit: cli.limit }));
    }
    let dir = cli
        .cache
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
    DiskCache::open(&dir, cli.limit)
        .map(|c| Box::new(c) as Box<dyn GroupSource>)
        .map_err(|e| Failure::Internal(format!("cache directory {}: {e}", dir.display())))
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Partitions { n } => Ok(cmd_partitions(*n)),
        Command::Strata { partition, dim } => cmd_strata(partition, *dim),
        Command::Chi { partition, chi_x, dim } => cmd_chi(partition, *chi_x, *dim),
        Command::Homology(args) => cmd_homology(cli, args),
        Command::Spectral { partition, field } => cmd_spectral(partition, *field, cli.limit),
        Command::Verify(v) => cmd_verify(cli, v),
    }
}

fn cmd_partitions(n: u32) -> Report {
    let all = enumerate_partitions(n);
    let mut t = Table::new(format!("partitions of {n}"), &["partition", "parts", "multiplicities"]);
    let mut items = Vec::new();
    for p in &all {
        let m = p.multiplicity_vector();
        t.push(vec![p.to_string(), p.parts_count().to_string(), m.to_string()]);
        items.push(json!({"partition": p.to_csv(), "parts": p.parts_count(), "multiplicities": m.counts()}));
    }
    let mut r = Report::new(json!({"n": n, "count": all.len(), "partitions": items}), vec![t]);
    r.summary = Some(format!("{} partitions", all.len()));
    r
}

fn cmd_strata(lambda: &Partition, dim: u32) -> CmdResult {
    let table = strata_by_codimension(lambda, dim)?;
    let mut t = Table::new(
        format!("strata of the complement of the closure of {lambda}, dim X = {dim}"),
        &["codimension", "pattern", "colours"],
    );
    let mut rows = Vec::new();
    for s in table.strata() {
        t.push(vec![s.codimension.to_string(), s.pattern.to_string(), s.colours().to_string()]);
        rows.push(json!({"codimension": s.codimension, "pattern": s.pattern.to_csv(), "colours": s.colours().counts()}));
    }
    let json = json!({"partition": lambda.to_csv(), "dim": dim, "strata": rows});
    Ok(Report::new(json, vec![t]))
}

/// A JSON number when it fits, otherwise the decimal string.
fn number(x: &impl ToString) -> Value {
    let s = x.to_string();
    s.parse::<i64>().map_or(Value::String(s), Value::from)
}

fn cmd_chi(lambda: &Partition, chi_x: i64, dim: u32) -> CmdResult {
    let chi = chi_c_wcomp(lambda, chi_x, dim)?;
    let mut t = Table::new("compactly supported Euler characteristic", &["partition", "chi(X)", "dim X", "chi_c"]);
    t.push(vec![lambda.to_string(), chi_x.to_string(), dim.to_string(), chi.to_string()]);
    let json = json!({"partition": lambda.to_csv(), "chi_x": chi_x, "dim": dim, "chi_c": number(&chi)});
    Ok(Report::new(json, vec![t]))
}

fn groups_json(groups: &GradedGroups) -> Value {
    let entries: Vec<Value> = nonzero(groups)
        .iter()
        .map(|(k, g)| json!({"degree": k, "betti": g.betti, "torsion": g.torsion}))
        .collect();
    Value::Array(entries)
}

/// `Z^2 + Z/2` over the integers, `Q^2` or `Z5^2` over a field.
fn render_group(g: &HomologyGroup, coeff: Coefficients) -> String {
    if coeff == Coefficients::Integers || g.is_zero() {
        return g.to_string();
    }
    match g.betti {
        1 => coeff.to_string(),
        b => format!("{coeff}^{b}"),
    }
}

fn groups_table(title: String, groups: &GradedGroups, coeff: Coefficients) -> Table {
    let mut t = Table::new(title, &["degree", "group"]);
    for (k, g) in nonzero(groups) {
        t.push(vec![k.to_string(), render_group(&g, coeff)]);
    }
    t
}

fn cmd_homology(cli: &Cli, args: &HomologyArgs) -> CmdResult {
    let spec: FnSpec = match &args.target {
        Target::Conf { colours } => conf_space_spec(colours),
        Target::Wcomp { partition } => wcomp_spec(partition)?,
    };
    let kind = if args.dual { GroupKind::Homology } else { GroupKind::CompactSupport };
    let groups = source(cli)?.groups(&spec, args.coeff, kind)?;
    let (label, title) = match kind {
        GroupKind::Homology => ("homology", format!("H_k({spec}; {})", args.coeff)),
        GroupKind::CompactSupport => ("compact-support", format!("H_c^k({spec}; {})", args.coeff)),
    };
    let json = json!({
        "space": spec.to_string(),
        "coefficients": args.coeff.to_string(),
        "groups": label,
        "manifold_dim": spec.manifold_dim(),
        "entries": groups_json(&groups),
    });
    Ok(Report::new(json, vec![groups_table(title, &groups, args.coeff)]))
}

fn cmd_spectral(lambda: &Partition, field: Coefficients, limit: u32) -> CmdResult {
    if lambda.total() > 6 {
        return Err(Failure::Usage(format!("spectral sequences are limited to n <= 6, got n = {}", lambda.total())));
    }
    let f = SpectralField::from_coefficients(field)?;
    let report = spectral_report(lambda, f, limit)?;
    let tables = spectral_tables(&report);
    let mut r = Report::new(serde_json::to_value(&report).expect("reports serialise"), tables);
    r.ok = report.verdict == Verdict::Pass;
    r.summary = Some(format!(
        "E^1 vs strata and E^infinity vs H_c over {}: {}",
        report.field, report.verdict
    ));
    Ok(r)
}

fn spectral_tables(report: &SpectralReport) -> Vec<Table> {
    let mut tables = Vec::new();
    let last = report.pages.len().saturating_sub(1);
    for page in &report.pages {
        let name = if page.r == last { format!("E^{} = E^infinity", page.r) } else { format!("E^{}", page.r) };
        let mut t = Table::new(format!("{name} of the complement of the closure of {}", report.lambda), &["p", "q", "dim"]);
        for (&(p, q), &d) in &page.dims {
            t.push(vec![p.to_string(), q.to_string(), d.to_string()]);
        }
        tables.push(t);
    }
    let mut t = Table::new("E^1 against stratum homology", &["p", "q", "E^1", "strata", "agrees"]);
    for r in &report.e1_rows {
        t.push(vec![r.p.to_string(), r.q.to_string(), r.e1.to_string(), r.strata.to_string(), yes_no(r.agrees)]);
    }
    tables.push(t);
    let mut t = Table::new("E^infinity against compactly supported cohomology", &["p+q", "E^infinity", "H_c^(dim-p-q)", "agrees"]);
    for r in &report.convergence_rows {
        t.push(vec![
            r.degree.to_string(),
            r.e_infinity.to_string(),
            r.compact_support.to_string(),
            yes_no(r.agrees),
        ]);
    }
    tables.push(t);
    tables
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn cmd_verify(cli: &Cli, v: &VerifyCommand) -> CmdResult {
    let (suite, coeff, reports) = match v {
        VerifyCommand::ColouredStability { max_total } => {
            if *max_total > cli.limit {
                return Err(Error::SizeLimitExceeded { total: *max_total, limit: cli.limit }.into());
            }
            ("coloured-stability", Coefficients::Integers, verify_coloured(*max_total, source(cli)?.as_ref())?)
        }
        VerifyCommand::SymcompStability { partition, j_max } => {
            let reports = verify_symcomp(partition, *j_max, source(cli)?.as_ref(), cli.limit)?;
            ("symcomp-stability", Coefficients::Rationals, reports)
        }
        VerifyCommand::Strata { n_max, j_max, dims } => {
            if dims.iter().any(|&d| d < 2) {
                return Err(Error::DimensionTooSmall(*dims.iter().min().unwrap_or(&0)).into());
            }
            ("strata", Coefficients::Integers, verify_strata(*n_max, *j_max, dims)?)
        }
        VerifyCommand::Oracles => ("oracles", Coefficients::Integers, verify_oracles(source(cli)?.as_ref())?),
    };
    Ok(verification_report(suite, coeff, &reports))
}

fn verification_report(suite: &str, coeff: Coefficients, reports: &[VerificationReport]) -> Report {
    let verdict = overall(reports);
    let mut tables = Vec::new();
    if reports.iter().any(|r| !r.rows.is_empty()) {
        let mut t = Table::new(
            format!("{suite}: homology comparisons"),
            &["instance", "degree", "source", "target", "in range", "agrees"],
        );
        for r in reports {
            for row in &r.rows {
                t.push(vec![
                    r.instance.clone(),
                    row.degree.to_string(),
                    render_group(&row.source, coeff),
                    render_group(&row.target, coeff),
                    yes_no(row.in_range),
                    yes_no(row.agrees),
                ]);
            }
        }
        tables.push(t);
    }
    if reports.iter().any(|r| !r.strata_rows.is_empty()) {
        let mut t = Table::new(
            format!("{suite}: strata counts"),
            &["instance", "codimension", "source", "target", "injective", "bijective", "within bound"],
        );
        for r in reports {
            for row in &r.strata_rows {
                t.push(vec![
                    r.instance.clone(),
                    row.codimension.to_string(),
                    row.count_source.to_string(),
                    row.count_target.to_string(),
                    yes_no(row.injective),
                    yes_no(row.bijective),
                    yes_no(row.within_bound),
                ]);
            }
        }
        tables.push(t);
    }
    let mut t = Table::new(format!("{suite}: verdicts"), &["instance", "range", "properties", "verdict"]);
    for r in reports {
        let props: Vec<String> =
            r.properties.iter().map(|p| format!("{} {}", p.property, if p.holds { "holds" } else { "FAILS" })).collect();
        t.push(vec![
            r.instance.clone(),
            r.range.as_ref().map_or_else(String::new, |x| x.description.clone()),
            props.join("; "),
            r.verdict.to_string(),
        ]);
    }
    tables.push(t);
    let passed = reports.iter().filter(|r| r.passed()).count();
    let json = json!({"suite": suite, "coefficients": coeff.to_string(), "verdict": verdict, "instances": reports.len(), "passed": passed, "reports": reports});
    let mut report = Report::new(json, tables);
    report.ok = verdict == Verdict::Pass;
    report.summary = Some(format!("{suite}: {passed}/{} instances pass, verdict {verdict}", reports.len()));
    report
}
