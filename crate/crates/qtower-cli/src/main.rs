use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qtower::classify::{self, tower_verdict};
use qtower::conic::solve_conic_with_bound;
use qtower::error::Error;
use qtower::group2::{self, TableGroup};
use qtower::qform;
use qtower::units::{delta_invariant, fundamental_unit};
use qtower_cli::config::{self, Config};
use qtower_cli::exit;
use qtower_cli::expr::{parse_disc, parse_list};
use qtower_cli::record::ClassifyReport;
use qtower_cli::scan::{run_scan, ScanError, ScanOptions};

#[derive(Parser)]
#[command(name = "qtower", version, about = "Narrow 2-class field towers of real quadratic fields with 2-class group (2,2)")]
struct Cli {
    /// TOML configuration file (default: ./qtower.toml if present).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a discriminant and give the tower verdict.
    Classify {
        /// Discriminant or product of prime discriminants, e.g. 8*17*-3*-47.
        #[arg(allow_hyphen_values = true)]
        d: String,
        /// 2-class group of the narrow 2-class field, e.g. 2,4,4.
        #[arg(long)]
        octic_cl2: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Scan a range of discriminants into JSON lines.
    Scan(ScanArgs),
    /// Compare computed unit and class number data with the case's table row.
    VerifyRow {
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Primitive solution of a^2 = d1 b^2 + d2 c^2.
    Conic {
        #[arg(allow_hyphen_values = true)]
        d1: i64,
        #[arg(allow_hyphen_values = true)]
        d2: i64,
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Fundamental unit, its norm and delta invariant.
    Unit {
        /// Fundamental discriminant of a real quadratic field.
        d: i64,
    },
    /// Class group structure from binary quadratic forms.
    Classgroup {
        #[arg(allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        narrow: bool,
    },
    /// Finite 2-group checks.
    #[command(subcommand)]
    Group(GroupCommand),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    min: i64,
    #[arg(long)]
    max: i64,
    /// Output file for JSON lines (stdout if omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write a comma-separated export.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Keep only these case labels (repeatable).
    #[arg(long = "case")]
    cases: Vec<String>,
    #[arg(long)]
    verify: bool,
    /// Record per-discriminant timing (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    chunk: Option<i64>,
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Build the class-2 model of 64.150.
    #[command(name = "build-64150")]
    Build64150 {
        #[arg(long, value_enum)]
        check: Option<Check>,
        /// Write the multiplication table to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Validate a multiplication-table file and summarize it.
    Load { file: PathBuf },
    #[command(name = "check-prop10")]
    CheckProp10(GroupSource),
    #[command(name = "check-prop11")]
    CheckProp11(GroupSource),
    #[command(name = "check-prop12")]
    CheckProp12(GroupSource),
    /// Run the triple check over the built-in library.
    Library,
}

#[derive(Args)]
struct GroupSource {
    /// Multiplication-table file.
    #[arg(long, conflicts_with = "builtin")]
    table: Option<PathBuf>,
    /// Built-in group: 64.150, cover128, cover256, or a library name such as D4xC2.
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Prop10,
    Prop11,
    Prop12,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit::code_for(&e), message: e.to_string() }
    }
}

impl From<ScanError> for Failure {
    fn from(e: ScanError) -> Self {
        Failure { code: exit::PRECONDITION, message: e.to_string() }
    }
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type CmdResult = Result<i32, Failure>;

fn emit<T: Serialize>(v: &T) {
    use std::io::Write;
    let line = serde_json::to_string(v).expect("serializable output");
    if writeln!(std::io::stdout().lock(), "{line}").is_err() {
        std::process::exit(exit::OK);
    }
}

fn cmd_classify(d: &str, octic: Option<&str>, format: Format) -> CmdResult {
    let input = parse_disc(d)?;
    let octic = octic.map(parse_list).transpose()?;
    let f = classify::check_preconditions(input.d)?;
    let rec = classify::classify_factors(input.d, &f.factors)?;
    let verdict = tower_verdict(&rec, octic.as_deref());
    let mut fac: Vec<i64> = f.factors.iter().map(|p| p.value()).collect();
    fac.sort_unstable();
    let report = ClassifyReport::new(&rec, fac, &verdict, octic);
    match format {
        Format::Json => emit(&report),
        Format::Text => {
            println!("d = {} = {:?}", report.d, report.assignment);
            println!("type {} case {}", report.case_type, report.label);
            println!("G in {{{}}}, G+/G3+ = {}", report.g_type.join(", "), report.gplus_label);
            println!("verdict {}: {}", report.verdict, report.justification);
        }
    }
    Ok(exit::OK)
}

fn cmd_scan(a: &ScanArgs, cfg: &Config) -> CmdResult {
    if a.min >= a.max {
        return Err(fail(exit::PRECONDITION, format!("need min < max, got [{}, {}]", a.min, a.max)));
    }
    if a.max > cfg.scan.max_bound {
        return Err(fail(exit::RESOURCE, format!("max {} exceeds the configured bound {}", a.max, cfg.scan.max_bound)));
    }
    let o = ScanOptions {
        min: a.min,
        max: a.max,
        cases: a.cases.clone(),
        verify: a.verify || cfg.scan.verify,
        timing: a.timing || cfg.scan.timing,
        chunk: a.chunk.unwrap_or(cfg.scan.chunk),
        threads: a.threads.or(cfg.scan.threads),
    };
    let checkpoint = a
        .checkpoint
        .clone()
        .or_else(|| a.output.as_ref().and(config::checkpoint_dir()).map(|dir| dir.join(format!("scan-{}-{}.json", a.min, a.max))));
    let summary = match &a.output {
        Some(out) => run_scan(&o, out, a.csv.as_deref(), checkpoint.as_deref())?,
        None => {
            if a.checkpoint.is_some() || a.csv.is_some() {
                return Err(fail(exit::PRECONDITION, "--checkpoint and --csv need --output"));
            }
            let dir = std::env::temp_dir().join(format!("qtower-scan-{}", std::process::id()));
            std::fs::create_dir_all(&dir).map_err(|e| fail(exit::PRECONDITION, format!("{}: {e}", dir.display())))?;
            let tmp = dir.join("out.jsonl");
            let s = run_scan(&o, &tmp, None, None)?;
            let text = std::fs::read_to_string(&tmp).map_err(|e| fail(exit::PRECONDITION, format!("{}: {e}", tmp.display())))?;
            print!("{text}");
            let _ = std::fs::remove_dir_all(&dir);
            s
        }
    };
    eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    Ok(exit::OK)
}

fn cmd_verify_row(d: &str) -> CmdResult {
    let input = parse_disc(d)?;
    let rep = classify::verify_appendix_row(input.d)?;
    emit(&json!({
        "d": rep.d,
        "label": rep.label,
        "assignment": rep.assignment,
        "nu34": rep.nu34,
        "nu_matches": rep.nu_matches,
        "branch": rep.branch,
        "g_type": rep.g_type.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "all_match": rep.all_match(),
        "entries": rep.entries,
    }));
    Ok(exit::OK)
}

fn cmd_conic(d1: i64, d2: i64, bound: Option<u64>, cfg: &Config) -> CmdResult {
    let s = solve_conic_with_bound(d1, d2, bound.unwrap_or(cfg.conic.bound))?;
    emit(&json!({"d1": d1, "d2": d2, "a": s.a, "b": s.b, "c": s.c}));
    Ok(exit::OK)
}

fn cmd_unit(d: i64) -> CmdResult {
    let u = fundamental_unit(d)?;
    let delta = if u.norm == 1 { Some(delta_invariant(&u)?.delta) } else { None };
    emit(&json!({"d": d, "unit": u.to_string(), "norm": u.norm, "delta": delta}));
    Ok(exit::OK)
}

fn cmd_classgroup(d: i64, narrow: bool) -> CmdResult {
    let g = qform::class_group(d, narrow)?;
    let two = qform::two_sylow(&g);
    emit(&json!({
        "d": d,
        "narrow": g.narrow,
        "class_number": g.class_number(),
        "elementary_divisors": g.elementary_divisors,
        "two_sylow": two.elementary_divisors,
    }));
    Ok(exit::OK)
}

fn builtin_group(name: &str) -> Result<TableGroup, Failure> {
    match name {
        "64.150" => Ok(group2::build_64_150().to_table_group()),
        "cover128" => Ok(group2::class3_cover_64_150(1)?),
        "cover256" => Ok(group2::class3_cover_64_150(2)?),
        _ => group2::rank3_library()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| fail(exit::PRECONDITION, format!("unknown built-in group {name:?}"))),
    }
}

fn load_group(src: &GroupSource) -> Result<TableGroup, Failure> {
    match (&src.table, &src.builtin) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| fail(exit::PRECONDITION, format!("{}: {e}", p.display())))?;
            Ok(TableGroup::from_table_text(&text)?)
        }
        (None, Some(n)) => builtin_group(n),
        (None, None) => Err(fail(exit::PRECONDITION, "give --table or --builtin")),
    }
}

fn run_checks(g: &TableGroup, which: Check) -> CmdResult {
    let mut ok = true;
    if matches!(which, Check::Prop10 | Check::All) {
        let r = group2::check_prop10(g);
        ok &= r.holds();
        emit(&json!({"check": "prop10", "pass": r.holds(), "report": r}));
    }
    if matches!(which, Check::Prop11 | Check::All) {
        let r = group2::check_prop11(g)?;
        ok &= r.holds();
        emit(&json!({"check": "prop11", "pass": r.holds(), "report": r}));
    }
    if matches!(which, Check::Prop12 | Check::All) {
        let r = group2::check_prop12(g)?;
        ok &= r.holds();
        emit(&json!({"check": "prop12", "pass": r.holds(), "report": r}));
    }
    Ok(if ok { exit::OK } else { exit::INTERNAL })
}

fn cmd_group(c: &GroupCommand) -> CmdResult {
    match c {
        GroupCommand::Build64150 { check, export } => {
            let e = group2::build_64_150();
            let g = e.to_table_group();
            if let Some(p) = export {
                std::fs::write(p, g.to_table_text()).map_err(|err| fail(exit::PRECONDITION, format!("{}: {err}", p.display())))?;
            }
            emit(&json!({
                "group": "64.150",
                "order": g.order(),
                "derived_order": g.derived_subgroup().order(),
                "lower_central_series": g.lower_central_series().iter().map(|s| s.order()).collect::<Vec<_>>(),
                "maximal_subgroups": g.maximal_subgroups().len(),
            }));
            match check {
                Some(w) => run_checks(&g, *w),
                None => Ok(exit::OK),
            }
        }
        GroupCommand::Load { file } => {
            let g = load_group(&GroupSource { table: Some(file.clone()), builtin: None })?;
            emit(&json!({
                "order": g.order(),
                "two_group": g.is_two_group(),
                "abelian": g.is_abelian(),
                "derived_order": g.derived_subgroup().order(),
                "lower_central_series": g.lower_central_series().iter().map(|s| s.order()).collect::<Vec<_>>(),
            }));
            Ok(exit::OK)
        }
        GroupCommand::CheckProp10(s) => run_checks(&load_group(s)?, Check::Prop10),
        GroupCommand::CheckProp11(s) => run_checks(&load_group(s)?, Check::Prop11),
        GroupCommand::CheckProp12(s) => run_checks(&load_group(s)?, Check::Prop12),
        GroupCommand::Library => {
            let mut ok = true;
            for (name, g) in group2::rank3_library() {
                let r = group2::check_prop10(&g);
                ok &= r.holds();
                emit(&json!({"group": name, "order": g.order(), "pass": r.holds(), "qualifying_triples": r.qualifying_triples}));
            }
            Ok(if ok { exit::OK } else { exit::INTERNAL })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::PRECONDITION as u8);
        }
    };
    let result = match &cli.command {
        Command::Classify { d, octic_cl2, format } => cmd_classify(d, octic_cl2.as_deref(), *format),
        Command::Scan(a) => cmd_scan(a, &cfg),
        Command::VerifyRow { d } => cmd_verify_row(d),
        Command::Conic { d1, d2, bound } => cmd_conic(*d1, *d2, *bound, &cfg),
        Command::Unit { d } => cmd_unit(*d),
        Command::Classgroup { d, narrow } => cmd_classgroup(*d, *narrow),
        Command::Group(g) => cmd_group(g),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
