//! Batch experiment runner: constants dumps, identity-verification
//! suites, moment experiments with CSV/JSON reports, and cache
//! management.
//!
//! Exit codes: 0 = all assertions pass; 2 = identity/validation failure;
//! 3 = resource cap exceeded; 4 = configuration error.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analytic::main_terms::C2Convention;
use crate::analytic::zeta::constants;
use crate::arith::{
    mertens_table, verify_pair_series_local, verify_pair_series_local_real,
    verify_ramanujan_series, verify_sigma_series, IdentityReport,
};
use crate::cache;
use crate::error::{Error, Result};
use crate::field::{primes_up_to, NumberField};
use crate::ideals::{enumerate_ideals, ideal_count_table, DEFAULT_MAX_IDEALS};
use crate::moments::{
    avg_sigma_pair_result, avg_sigma_result, first_moment_with, fit_error_exponent,
    second_moment_with, MomentResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILURE: i32 = 2;
pub const EXIT_RESOURCE_CAP: i32 = 3;
pub const EXIT_CONFIG_ERROR: i32 = 4;

/// Env var overriding the cache directory.
pub const CACHE_ENV: &str = "IDEAL_MOMENTS_CACHE";

#[derive(Parser)]
#[command(
    name = "ideal-moments",
    about = "Ramanujan sums over number fields: identities, constants, and moment experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the analytic constants (rho, zeta_K(0), zeta_K(2)) as JSON
    Constants(CommonArgs),
    /// Run the exact Dirichlet-series identity suites
    Verify(CommonArgs),
    /// Run a moment experiment grid and emit CSV rows
    Moment(CommonArgs),
    /// Build, validate, or purge coefficient-table caches
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    Build(CommonArgs),
    Validate(CommonArgs),
    Purge(CommonArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Field descriptor: Q, Q(sqrt{d}), or Q(zeta{m})
    #[arg(long)]
    field: Option<String>,
    /// Flat key=value config file; command-line flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inner-sum norm bound(s), comma separated
    #[arg(long, value_delimiter = ',')]
    x: Option<Vec<u64>>,
    /// Outer norm bound(s), comma separated
    #[arg(long, value_delimiter = ',')]
    y: Option<Vec<u64>>,
    /// Rule deriving y from x, e.g. y=x^3
    #[arg(long = "y-rule")]
    y_rule: Option<String>,
    /// Divisor-function exponent for kind avg-sigma
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    /// First exponent for kind avg-sigma-pair
    #[arg(long, allow_negative_numbers = true)]
    z1: Option<f64>,
    /// Second exponent for kind avg-sigma-pair
    #[arg(long, allow_negative_numbers = true)]
    z2: Option<f64>,
    /// Moment kind: first | second | avg-sigma | avg-sigma-pair
    #[arg(long)]
    kind: Option<String>,
    /// Coefficient convention for the y x^2 term: 1 or 0.5
    #[arg(long)]
    c2: Option<String>,
    #[arg(long = "cache-dir")]
    cache_dir: Option<PathBuf>,
    /// Report file (CSV for moment, text for verify, JSON for constants)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON mirror of the report
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Coefficient range N for verify / table length for cache build
    #[arg(long = "max-n")]
    max_n: Option<u64>,
    /// Negative control: inject a flipped table entry, must fail
    #[arg(long = "selftest-corrupt")]
    selftest_corrupt: bool,
    /// Cache table tag filter for purge (e.g. mertens, a_K)
    #[arg(long)]
    tag: Option<String>,
}

/// Fully resolved configuration: flags merged over the config file.
#[derive(Debug, Clone)]
struct RunConfig {
    field: Option<String>,
    x: Option<Vec<u64>>,
    y: Option<Vec<u64>>,
    y_rule: Option<YRule>,
    z: f64,
    z1: f64,
    z2: f64,
    kind: String,
    c2: C2Convention,
    cache_dir: PathBuf,
    out: Option<PathBuf>,
    json: Option<PathBuf>,
    seed: u64,
    max_n: Option<u64>,
    selftest_corrupt: bool,
    tag: Option<String>,
}

/// y as a monotone power of x, parsed from "y=x^k".
#[derive(Debug, Clone, Copy)]
struct YRule {
    exponent: f64,
}

impl YRule {
    fn parse(text: &str) -> Result<YRule> {
        let body = text.trim().strip_prefix("y=x^").ok_or_else(|| {
            Error::Config(format!("y-rule must look like y=x^3, got {text:?}"))
        })?;
        let exponent: f64 = body
            .parse()
            .map_err(|_| Error::Config(format!("bad y-rule exponent {body:?}")))?;
        if !(exponent >= 0.0) {
            return Err(Error::Config(format!(
                "y-rule exponent must be nonnegative for monotonicity, got {exponent}"
            )));
        }
        Ok(YRule { exponent })
    }

    fn apply(&self, x: u64) -> u64 {
        (x as f64).powf(self.exponent).round() as u64
    }
}

fn parse_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    const KNOWN: &[&str] = &[
        "field", "x", "y", "y-rule", "z", "z1", "z2", "kind", "c2", "cache-dir", "out",
        "json", "seed", "max-n", "selftest-corrupt", "tag",
    ];
    for k in map.keys() {
        if !KNOWN.contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown config key {k:?}")));
        }
    }
    Ok(map)
}

fn parse_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad integer {s:?}")))
        })
        .collect()
}

fn resolve(args: &CommonArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let get = |key: &str| file.get(key).cloned();
    let parse_f64 = |key: &str, v: String| {
        v.parse::<f64>()
            .map_err(|_| Error::Config(format!("bad {key} value {v:?}")))
    };

    let field = args.field.clone().or_else(|| get("field"));
    let x = match (&args.x, get("x")) {
        (Some(v), _) => Some(v.clone()),
        (None, Some(s)) => Some(parse_list(&s)?),
        _ => None,
    };
    let y = match (&args.y, get("y")) {
        (Some(v), _) => Some(v.clone()),
        (None, Some(s)) => Some(parse_list(&s)?),
        _ => None,
    };
    let y_rule = match args.y_rule.clone().or_else(|| get("y-rule")) {
        Some(s) => Some(YRule::parse(&s)?),
        None => None,
    };
    let z = match args.z {
        Some(v) => v,
        None => match get("z") {
            Some(s) => parse_f64("z", s)?,
            None => -0.25,
        },
    };
    let z1 = match args.z1 {
        Some(v) => v,
        None => match get("z1") {
            Some(s) => parse_f64("z1", s)?,
            None => -0.2,
        },
    };
    let z2 = match args.z2 {
        Some(v) => v,
        None => match get("z2") {
            Some(s) => parse_f64("z2", s)?,
            None => -0.1,
        },
    };
    let kind = args
        .kind
        .clone()
        .or_else(|| get("kind"))
        .unwrap_or_else(|| "first".to_string());
    let c2: C2Convention = args
        .c2
        .clone()
        .or_else(|| get("c2"))
        .unwrap_or_else(|| "0.5".to_string())
        .parse()?;
    // env var wins over flag and config
    let cache_dir = std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .or_else(|| args.cache_dir.clone())
        .or_else(|| get("cache-dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".ideal-moments-cache"));
    let out = args.out.clone().or_else(|| get("out").map(PathBuf::from));
    let json = args.json.clone().or_else(|| get("json").map(PathBuf::from));
    let seed = match args.seed {
        Some(v) => v,
        None => match get("seed") {
            Some(s) => s
                .parse()
                .map_err(|_| Error::Config(format!("bad seed {s:?}")))?,
            None => 0,
        },
    };
    let max_n = match args.max_n {
        Some(v) => Some(v),
        None => match get("max-n") {
            Some(s) => Some(
                s.parse()
                    .map_err(|_| Error::Config(format!("bad max-n {s:?}")))?,
            ),
            None => None,
        },
    };
    let selftest_corrupt = args.selftest_corrupt
        || matches!(get("selftest-corrupt").as_deref(), Some("true") | Some("1"));
    let tag = args.tag.clone().or_else(|| get("tag"));
    Ok(RunConfig {
        field,
        x,
        y,
        y_rule,
        z,
        z1,
        z2,
        kind,
        c2,
        cache_dir,
        out,
        json,
        seed,
        max_n,
        selftest_corrupt,
        tag,
    })
}

impl RunConfig {
    fn require_field(&self) -> Result<NumberField> {
        match &self.field {
            Some(s) => s.parse(),
            None => Err(Error::Config("--field is required".to_string())),
        }
    }

    /// Fields for verify: the requested one, or the reference set.
    fn verify_fields(&self) -> Result<Vec<NumberField>> {
        match &self.field {
            Some(s) => Ok(vec![s.parse()?]),
            None => Ok(vec![
                NumberField::rational(),
                NumberField::quadratic(-1).expect("-1 is squarefree"),
                NumberField::quadratic(5).expect("5 is squarefree"),
                NumberField::cyclotomic(5).expect("5 is a valid modulus"),
            ]),
        }
    }
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(p, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::ResourceCap(_) | Error::TableCoverage { .. } | Error::Overflow(_) => {
            EXIT_RESOURCE_CAP
        }
        _ => EXIT_CONFIG_ERROR,
    }
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Constants(args) => resolve(args).and_then(cmd_constants),
        Command::Verify(args) => resolve(args).and_then(cmd_verify),
        Command::Moment(args) => resolve(args).and_then(cmd_moment),
        Command::Cache { action } => match action {
            CacheAction::Build(args) => resolve(args).and_then(cmd_cache_build),
            CacheAction::Validate(args) => resolve(args).and_then(cmd_cache_validate),
            CacheAction::Purge(args) => resolve(args).and_then(cmd_cache_purge),
        },
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_constants(config: RunConfig) -> Result<i32> {
    let field = config.require_field()?;
    let consts = constants(&field)?;
    let text = format!(
        "{}\n",
        serde_json::to_string_pretty(&consts).expect("constants serialize")
    );
    emit(config.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn report_line(report: &IdentityReport) -> String {
    match report.first_failure {
        None => format!(
            "PASS {} {} checked={}",
            report.field, report.label, report.checked
        ),
        Some(n) => format!(
            "FAIL {} {} checked={} first-failure-n={n}",
            report.field, report.label, report.checked
        ),
    }
}

fn cmd_verify(config: RunConfig) -> Result<i32> {
    let fields = config.verify_fields()?;
    let n_max = config.max_n.unwrap_or(500);
    let mut lines = Vec::new();
    let mut failed = false;

    if n_max < 2 {
        lines.push(format!(
            "WARN coefficient range N={n_max} checks only n=1; the suite is vacuous"
        ));
    }

    for field in &fields {
        // Ramanujan-sum Dirichlet series, every ideal of small norm
        let ideal_bound = n_max.min(60);
        for ideal in enumerate_ideals(field, ideal_bound, DEFAULT_MAX_IDEALS)? {
            let report = verify_ramanujan_series(field, &ideal, n_max)?;
            failed |= !report.passed();
            lines.push(report_line(&report));
        }
        // sigma_z series for exact integer z
        for z in [0u32, 1, 2] {
            let report = verify_sigma_series(field, n_max, z)?;
            failed |= !report.passed();
            lines.push(report_line(&report));
        }
        // local sigma-pair series, exact at z1 = z2 = 0 and floating
        for p in primes_up_to(50) {
            let report = verify_pair_series_local(field, p, 5)?;
            failed |= !report.passed();
            lines.push(report_line(&report));
        }
        for p in primes_up_to(20) {
            let report = verify_pair_series_local_real(field, p, 4, config.z1, config.z2)?;
            failed |= !report.passed();
            lines.push(report_line(&report));
        }
        if config.selftest_corrupt {
            // negative control: a flipped ideal-count entry must be caught
            // by re-deriving the table
            let mut table = ideal_count_table(field, n_max)?;
            let n = (n_max / 2).max(1);
            let corrupted = table[n] + 1;
            table = crate::ideals::CoefficientTable::from_values(
                table.field.clone(),
                table.tag.clone(),
                (0..=n_max)
                    .map(|i| if i == n { corrupted } else { table[i] })
                    .collect(),
            );
            let fresh = ideal_count_table(field, n_max)?;
            let first_failure = (1..=n_max).find(|&i| table[i] != fresh[i]);
            let report = IdentityReport {
                field: field.to_string(),
                label: "selftest-corrupt".to_string(),
                checked: n_max,
                first_failure,
            };
            // this check FAILING is the expected outcome
            failed |= report.first_failure.is_some();
            lines.push(report_line(&report));
            if report.first_failure.is_none() {
                lines.push(format!(
                    "FAIL {field} selftest-corrupt injected fault was not detected"
                ));
                failed = true;
            }
        }
    }

    let mut text = lines.join("\n");
    text.push('\n');
    emit(config.out.as_deref(), &text)?;
    if config.out.is_some() {
        // keep a one-line summary on stdout as well
        println!(
            "verify: {} checks, {}",
            lines.len(),
            if failed { "FAIL" } else { "PASS" }
        );
    }
    Ok(if failed { EXIT_IDENTITY_FAILURE } else { EXIT_OK })
}

fn cmd_moment(config: RunConfig) -> Result<i32> {
    let field = config.require_field()?;
    let xs = config
        .x
        .clone()
        .ok_or_else(|| Error::Config("--x is required for moment".to_string()))?;
    if xs.is_empty() || xs.contains(&0) {
        return Err(Error::Config("x values must be >= 1".to_string()));
    }
    let kind = config.kind.as_str();

    // resolve one y per x for the kinds that need it
    let ys: Vec<u64> = match kind {
        "first" | "second" => match (&config.y, &config.y_rule) {
            (Some(list), _) if list.len() == 1 => vec![list[0]; xs.len()],
            (Some(list), _) if list.len() == xs.len() => list.clone(),
            (Some(list), _) => {
                return Err(Error::Config(format!(
                    "y list has {} entries for {} x values",
                    list.len(),
                    xs.len()
                )))
            }
            (None, Some(rule)) => xs.iter().map(|&x| rule.apply(x)).collect(),
            (None, None) => {
                return Err(Error::Config(
                    "moment needs --y or --y-rule for kinds first/second".to_string(),
                ))
            }
        },
        "avg-sigma" | "avg-sigma-pair" => xs.clone(),
        other => {
            return Err(Error::Config(format!(
                "unknown kind {other:?}; expected first, second, avg-sigma, avg-sigma-pair"
            )))
        }
    };

    // incremental CSV so partial results survive a mid-grid error
    let mut csv = String::from(MomentResult::csv_header());
    csv.push('\n');
    let flush = |csv: &str| emit(config.out.as_deref(), csv);

    let mertens = if kind == "first" || kind == "second" {
        let x_max = *xs.iter().max().expect("nonempty");
        let (table, _) = cache::load_or_build(
            &config.cache_dir,
            &field.to_string(),
            "mertens",
            x_max,
            || mertens_table(&field, x_max),
        )?;
        Some(table)
    } else {
        None
    };

    let mut rows: Vec<MomentResult> = Vec::new();
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        let row = match kind {
            "first" => first_moment_with(
                &field,
                x,
                y,
                mertens.as_ref().expect("built above"),
                config.seed,
            ),
            "second" => second_moment_with(
                &field,
                x,
                y,
                mertens.as_ref().expect("built above"),
                config.c2,
                config.seed,
            ),
            "avg-sigma" => avg_sigma_result(&field, x, config.z, config.seed),
            _ => avg_sigma_pair_result(&field, x, config.z1, config.z2, config.seed),
        };
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                flush(&csv)?; // partial results
                return Err(e);
            }
        };
        csv.push_str(&row.csv_row());
        csv.push('\n');
        rows.push(row);
    }

    // fit |residual| against the per-row error scale; slope ~ 1 means the
    // residuals track the predicted error term
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.residual / r.normalized_residual, r.residual.abs()))
        .collect();
    let fit = fit_error_exponent(&points).ok();
    if let Some(f) = &fit {
        csv.push_str(&format!(
            "#fit,slope={:.4},intercept={:.4},r_squared={:.4},used={},dropped={}\n",
            f.slope, f.intercept, f.r_squared, f.used, f.dropped_zero_residuals
        ));
    }
    flush(&csv)?;

    if let Some(json_path) = &config.json {
        let doc = json!({ "rows": rows, "fit": fit });
        emit(
            Some(json_path),
            &format!("{}\n", serde_json::to_string_pretty(&doc).expect("rows serialize")),
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_cache_build(config: RunConfig) -> Result<i32> {
    let field = config.require_field()?;
    let n = config.max_n.unwrap_or(100_000);
    fs::create_dir_all(&config.cache_dir)?;
    let counts = ideal_count_table(&field, n)?;
    let path = cache::save(&config.cache_dir, &counts)?;
    println!("built {}", path.display());
    let mertens = mertens_table(&field, n)?;
    let path = cache::save(&config.cache_dir, &mertens)?;
    println!("built {}", path.display());
    Ok(EXIT_OK)
}

fn cmd_cache_validate(config: RunConfig) -> Result<i32> {
    let dir = &config.cache_dir;
    let mut bad = 0usize;
    let mut total = 0usize;
    if dir.exists() {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "cache"))
            .collect();
        paths.sort();
        for path in paths {
            total += 1;
            match fs::read_to_string(&path).map_err(Error::from).and_then(|t| cache::parse(&t)) {
                Ok(table) => println!(
                    "ok {} field={} table={} N={}",
                    path.display(),
                    table.field,
                    table.tag,
                    table.n_max
                ),
                Err(e) => {
                    println!("INVALID {} ({e})", path.display());
                    bad += 1;
                }
            }
        }
    }
    println!("validated {total} file(s), {bad} invalid");
    Ok(if bad > 0 { EXIT_IDENTITY_FAILURE } else { EXIT_OK })
}

fn cmd_cache_purge(config: RunConfig) -> Result<i32> {
    let removed = cache::purge(
        &config.cache_dir,
        config.field.as_deref(),
        config.tag.as_deref(),
    )?;
    println!("purged {removed} file(s)");
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_rule_parsing() {
        let rule = YRule::parse("y=x^3").unwrap();
        assert_eq!(rule.apply(10), 1000);
        assert_eq!(rule.apply(2), 8);
        let rule = YRule::parse("y=x^2.5").unwrap();
        assert_eq!(rule.apply(4), 32);
        assert!(YRule::parse("y=3x").is_err());
        assert!(YRule::parse("y=x^-1").is_err());
    }

    #[test]
    fn config_file_merging() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(
            &path,
            "# comment\nfield=Q(sqrt{-1})\nx=10,20\nkind=second\nc2=1\nseed=7\n",
        )
        .unwrap();
        let args = CommonArgs {
            config: Some(path.clone()),
            kind: Some("first".to_string()),
            ..Default::default()
        };
        let config = resolve(&args).unwrap();
        assert_eq!(config.field.as_deref(), Some("Q(sqrt{-1})"));
        assert_eq!(config.x, Some(vec![10, 20]));
        assert_eq!(config.kind, "first"); // flag wins
        assert_eq!(config.c2, C2Convention::One);
        assert_eq!(config.seed, 7);

        fs::write(&path, "unknown-key=1\n").unwrap();
        let args = CommonArgs {
            config: Some(path),
            ..Default::default()
        };
        assert!(resolve(&args).is_err());
    }

    #[test]
    fn defaults() {
        let config = resolve(&CommonArgs::default()).unwrap();
        assert_eq!(config.z, -0.25);
        assert_eq!(config.z1, -0.2);
        assert_eq!(config.z2, -0.1);
        assert_eq!(config.c2, C2Convention::Half);
        assert_eq!(config.kind, "first");
        assert_eq!(config.seed, 0);
        assert!(config.require_field().is_err());
        assert_eq!(config.verify_fields().unwrap().len(), 4);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code_for(&Error::ResourceCap("x".into())),
            EXIT_RESOURCE_CAP
        );
        assert_eq!(
            exit_code_for(&Error::Config("x".into())),
            EXIT_CONFIG_ERROR
        );
        assert_eq!(
            exit_code_for(&Error::InvalidField("x".into())),
            EXIT_CONFIG_ERROR
        );
    }
}
