//! `conan` — command-line batch linter for Internet-connectivity issues in
//! Android projects.
//!
//! Runs the full analysis pipeline over a project tree and writes
//! `conan-report.json` / `conan-report.html` into an output directory.
//! One line per finding goes to standard output; analysis diagnostics go to
//! standard error. Exit codes: 0 analysis done (and either no findings or
//! `--fail-on-findings` unset), 1 findings with `--fail-on-findings`,
//! 2 usage error, 3 fatal analysis error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use conan_core::project::{discover_project, load_project};
use conan_core::report::FsSnippetSource;
use conan_core::rules::{evaluate, RuleConfig, RuleId};
use conan_core::{ConanError, Report};

const EXIT_OK: u8 = 0;
const EXIT_FINDINGS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_FATAL: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Html,
    Both,
}

/// Detects Internet-connectivity issues in Android projects.
#[derive(Debug, Parser)]
#[command(name = "conan", version, disable_help_subcommand = true)]
struct CliOptions {
    /// Project root directory to analyze.
    #[arg(long, value_name = "DIR")]
    root: PathBuf,

    /// Module to analyze when the tree holds several manifest-bearing ones.
    #[arg(long, value_name = "NAME")]
    module: Option<String>,

    /// Directory the report files are written into.
    #[arg(long, value_name = "DIR", default_value = "./conan-out")]
    out: PathBuf,

    /// Which report file(s) to write.
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,

    /// Rule ids to enable; every other rule is disabled (comma-separated).
    #[arg(long, value_delimiter = ',', value_name = "RULE,..")]
    enable: Vec<String>,

    /// Rule ids to disable (comma-separated).
    #[arg(long, value_delimiter = ',', value_name = "RULE,..")]
    disable: Vec<String>,

    /// Call-chain hops followed when resolving connectivity checks.
    #[arg(long, value_name = "N", default_value_t = 3)]
    depth: u32,

    /// Also analyze sources under src/test and src/androidTest.
    #[arg(long)]
    include_tests: bool,

    /// Exit with code 1 when any enabled rule reports a finding.
    #[arg(long)]
    fail_on_findings: bool,
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}

/// The whole CLI behind a testable seam: argv in, exit code out.
fn run<I>(argv: I) -> u8
where
    I: IntoIterator,
    I::Item: Into<OsString> + Clone,
{
    let opts = match CliOptions::try_parse_from(argv) {
        Ok(opts) => opts,
        Err(e) => {
            // --help/--version are not usage errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };

    if !opts.root.is_dir() {
        eprintln!("error: --root {} is not a directory", opts.root.display());
        return EXIT_USAGE;
    }
    let config = match rule_config(&opts) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };

    let layout = match discover_project(&opts.root, opts.module.as_deref(), opts.include_tests) {
        Ok(l) => l,
        // Ambiguity is resolvable by passing --module, so it counts as a
        // usage error; a missing manifest is fatal.
        Err(e @ ConanError::AmbiguousModule { .. }) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FATAL;
        }
    };
    let project = match load_project(&layout) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FATAL;
        }
    };

    let findings = evaluate(&project, &config);
    let has_findings = !findings.is_empty();
    let report = Report::new(&project, findings);

    for d in &report.diagnostics {
        eprintln!("diagnostic: {d}");
    }
    // Exactly one summary line per finding on stdout.
    for f in &report.findings {
        println!("{} {} {}", f.rule, f.locations[0], f.message);
    }

    if let Err(msg) = write_reports(&opts, &report) {
        eprintln!("error: {msg}");
        return EXIT_FATAL;
    }

    if has_findings && opts.fail_on_findings {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

/// The effective rule set: `--enable` narrows from all sixteen, `--disable`
/// subtracts; naming a rule in both is a contradiction.
fn rule_config(opts: &CliOptions) -> Result<RuleConfig, String> {
    let parse_list = |raw: &[String]| -> Result<BTreeSet<RuleId>, String> {
        raw.iter()
            .map(|s| RuleId::from_str(s).map_err(|_| format!("unknown rule id `{s}`")))
            .collect()
    };
    let enable = parse_list(&opts.enable)?;
    let disable = parse_list(&opts.disable)?;
    let both: Vec<String> = enable
        .intersection(&disable)
        .map(|r| r.to_string())
        .collect();
    if !both.is_empty() {
        return Err(format!(
            "rule(s) both enabled and disabled: {}",
            both.join(", ")
        ));
    }
    let mut enabled: BTreeSet<RuleId> = if enable.is_empty() {
        RuleId::ALL.into_iter().collect()
    } else {
        enable
    };
    for r in &disable {
        enabled.remove(r);
    }
    Ok(RuleConfig {
        enabled_rules: enabled,
        interprocedural_depth: opts.depth,
        include_tests: opts.include_tests,
    })
}

fn write_reports(opts: &CliOptions, report: &Report) -> Result<(), String> {
    fs::create_dir_all(&opts.out)
        .map_err(|e| format!("cannot create {}: {e}", opts.out.display()))?;
    let write = |name: &str, bytes: Vec<u8>| -> Result<(), String> {
        let path = opts.out.join(name);
        fs::write(&path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
    };
    if matches!(opts.format, Format::Json | Format::Both) {
        write("conan-report.json", report.to_json())?;
    }
    if matches!(opts.format, Format::Html | Format::Both) {
        let snippets = FsSnippetSource::new(&opts.root);
        write("conan-report.html", report.to_html(&snippets))?;
    }
    Ok(())
}
