//! `genphi`: generalized Euler phi, k-th unit groups of Z_n, and totient
//! equation sweeps from the command line.
//!
//! Exit codes: 0 success, 1 bad input, 2 resource bound exceeded,
//! 3 internal inconsistency or unregistered discrepancy.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use genphi::arith::iterated_phi;
use genphi::equations::{
    classify_k2, classify_k3, enumerate_solutions, solve_phik_eq_one, K3Reading, MAX_SWEEP,
};
use genphi::oracle::{oracle_uk, DEFAULT_BOUND};
use genphi::phik::{phi_k, phi_k_trace};
use genphi::phiproduct::{phi_of_product, phi_product_general_expansion};
use genphi::report::{DiscrepancyReport, VERSION};
use genphi::units::{uk_closed_form, uk_decomposition};
use genphi::verify::{run_suite, Manifest, Suite, SuiteConfig};
use genphi::{CyclicDecomposition, Error};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "genphi",
    version,
    about = "Generalized Euler phi and k-th groups of units of Z_n"
)]
struct Cli {
    /// Print a JSON envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// φ^k(n) = |U^k(Z_n)|.
    Phik {
        k: u32,
        n: u64,
        /// One or more of closed, iter, oracle; several are cross-checked.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "closed")]
        method: Vec<Method>,
        /// Largest unit group the oracle will enumerate.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u64,
        /// Show the term-by-term closed-form expansion.
        #[arg(long)]
        trace: bool,
    },
    /// Cyclic decomposition of U^k(Z_n).
    Decompose {
        k: u32,
        n: u64,
        #[arg(long, value_enum, default_value = "primary")]
        form: Form,
        #[arg(long, value_enum, default_value = "iter")]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u64,
    },
    /// Φ^k(n), the classical totient applied k times.
    Iphi { k: u32, n: u64 },
    /// φ(a1 · ... · an) by the gcd-corrected expansion, checked against direct evaluation.
    Phiproduct {
        #[arg(required = true)]
        values: Vec<u64>,
    },
    /// Enumerate solutions of φ^k(n) = Φ^k(n) or φ^k(n) = 1.
    Solve {
        #[arg(value_enum)]
        equation: SolveTag,
        /// k for phik-one (eq-k2 and eq-k3 fix k).
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        max: u64,
        /// Reading of the cubic classification used in the comparison.
        #[arg(long, value_enum, default_value = "divisor-closed")]
        reading: Reading,
    },
    /// Run verification suites; exits 3 on any mismatch not in the manifest.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Sweep limit. Defaults: agreement 2000, inequality 10^6, others 10^5.
        #[arg(long)]
        max: Option<u64>,
        /// Largest k for the agreement suite.
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u64,
        /// Known-discrepancy manifest to use instead of the built-in one.
        #[arg(long)]
        manifest: Option<std::path::PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Iter,
    Oracle,
}

impl Method {
    fn provenance(self) -> &'static str {
        match self {
            Method::Closed => "closed-form",
            Method::Iter => "iteration",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Primary,
    Invariant,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveTag {
    EqK2,
    EqK3,
    PhikOne,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reading {
    Literal,
    DivisorClosed,
}

impl From<Reading> for K3Reading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Literal => K3Reading::Literal,
            Reading::DivisorClosed => K3Reading::DivisorClosed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Agreement,
    Inequality,
    Cyclicity,
    Classifiers,
    Published,
    All,
}

#[derive(Serialize)]
struct Envelope {
    command: &'static str,
    inputs: Value,
    result: Value,
    provenance: Vec<&'static str>,
    version: &'static str,
}

/// A finished command: its envelope, the text rendering, and an exit code.
struct Output {
    envelope: Envelope,
    text: String,
    code: u8,
}

/// Exit code for a failed computation.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BoundExceeded { .. } | Error::Overflow(_) => 2,
        Error::InexactDivision { .. } | Error::InconsistentProfile(_) => 3,
        _ => 1,
    }
}

fn group(k: u32, n: u64, method: Method, bound: u64) -> Result<CyclicDecomposition, Error> {
    match method {
        Method::Closed => uk_closed_form(n, k),
        Method::Iter => uk_decomposition(n, k),
        Method::Oracle => oracle_uk(n, k, bound),
    }
}

fn positive(n: u64) -> Result<u64, Error> {
    if n == 0 {
        Err(Error::ZeroInput)
    } else {
        Ok(n)
    }
}

fn cmd_phik(k: u32, n: u64, methods: &[Method], bound: u64, trace: bool) -> Result<Output, Error> {
    positive(n)?;
    let mut unique: Vec<Method> = Vec::new();
    for &m in methods {
        if !unique.contains(&m) {
            unique.push(m);
        }
    }
    let methods = unique;
    let mut values = serde_json::Map::new();
    let mut lines = Vec::new();
    for &m in &methods {
        let value = match m {
            Method::Closed => phi_k(n, k)?,
            _ => group(k, n, m, bound)?.order()?,
        };
        values.insert(m.provenance().to_string(), json!(value));
        lines.push((m.provenance(), value));
    }
    let first = lines[0].1;
    let agree = lines.iter().all(|&(_, v)| v == first);
    let mut result = json!({ "value": first, "by_method": values, "agree": agree });
    let mut text = if lines.len() == 1 {
        first.to_string()
    } else {
        lines
            .iter()
            .map(|(m, v)| format!("{m}: {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    if trace {
        let t = phi_k_trace(n, k)?;
        result["trace"] = json!(t.to_string());
        text.push_str(&format!("\n{t}"));
    }
    if !agree {
        text.push_str("\nmethods disagree");
    }
    Ok(Output {
        envelope: Envelope {
            command: "phik",
            inputs: json!({ "k": k, "n": n, "bound": bound }),
            result,
            provenance: methods.iter().map(|m| m.provenance()).collect(),
            version: VERSION,
        },
        text,
        code: if agree { 0 } else { 3 },
    })
}

fn cmd_decompose(k: u32, n: u64, form: Form, method: Method, bound: u64) -> Result<Output, Error> {
    positive(n)?;
    let g = group(k, n, method, bound)?;
    let (form_name, orders, text) = match form {
        Form::Primary => ("primary", g.primary_orders().to_vec(), g.to_string()),
        Form::Invariant => ("invariant", g.invariant_factors(), g.display_invariant()),
    };
    Ok(Output {
        envelope: Envelope {
            command: "decompose",
            inputs: json!({ "k": k, "n": n, "form": form_name }),
            result: json!({ "orders": orders, "text": text, "order": g.order()?, "cyclic": g.is_cyclic() }),
            provenance: vec![method.provenance()],
            version: VERSION,
        },
        text,
        code: 0,
    })
}

fn cmd_iphi(k: u32, n: u64) -> Result<Output, Error> {
    let value = iterated_phi(positive(n)?, k)?;
    Ok(Output {
        envelope: Envelope {
            command: "iphi",
            inputs: json!({ "k": k, "n": n }),
            result: json!({ "value": value }),
            provenance: vec!["iteration"],
            version: VERSION,
        },
        text: value.to_string(),
        code: 0,
    })
}

fn cmd_phiproduct(values: &[u64]) -> Result<Output, Error> {
    let expansion = phi_product_general_expansion(values)?;
    let direct = phi_of_product(values)?;
    let agree = expansion.value == direct;
    let mut text = expansion.value.to_string();
    if !agree {
        text.push_str(&format!(
            "\nexpansion {} differs from direct evaluation {direct}",
            expansion.value
        ));
    }
    Ok(Output {
        envelope: Envelope {
            command: "phiproduct",
            inputs: json!({ "values": values }),
            result: json!({
                // u128 values are emitted as strings
                "value": expansion.value.to_string(),
                "direct": direct.to_string(),
                "agree": agree,
                "expansion": expansion.to_string(),
            }),
            provenance: vec!["closed-form", "iteration"],
            version: VERSION,
        },
        text,
        code: if agree { 0 } else { 3 },
    })
}

fn cmd_solve(tag: SolveTag, k: u32, max: u64, reading: Reading) -> Result<Output, Error> {
    if max > MAX_SWEEP {
        return Err(Error::BoundExceeded {
            needed: max,
            bound: MAX_SWEEP,
        });
    }
    let (name, k, solutions, classifier) = match tag {
        SolveTag::EqK2 => {
            let s = enumerate_solutions(2, max)?;
            let c: Vec<u64> = (1..=max).filter(|&n| classify_k2(n).unwrap_or(false)).collect();
            ("eq-k2", 2, s, Some(c))
        }
        SolveTag::EqK3 => {
            let s = enumerate_solutions(3, max)?;
            let reading = K3Reading::from(reading);
            let c: Vec<u64> = (1..=max)
                .filter(|&n| classify_k3(n, reading).unwrap_or(false))
                .collect();
            ("eq-k3", 3, s, Some(c))
        }
        SolveTag::PhikOne => ("phik-one", k, solve_phik_eq_one(k, max)?, None),
    };
    let mut result = json!({ "solutions": solutions, "count": solutions.len() });
    let mut text = solutions.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    if let Some(claimed) = classifier {
        let missing: Vec<u64> = solutions
            .iter()
            .copied()
            .filter(|n| claimed.binary_search(n).is_err())
            .collect();
        let extra: Vec<u64> = claimed
            .iter()
            .copied()
            .filter(|n| solutions.binary_search(n).is_err())
            .collect();
        text.push_str(&format!(
            "\n{} solutions; classifier misses {}, wrongly accepts {}",
            solutions.len(),
            missing.len(),
            extra.len()
        ));
        result["classifier"] =
            json!({ "agree": missing.is_empty() && extra.is_empty(), "missing": missing, "extra": extra });
        if name == "eq-k3" {
            result["classifier"]["reading"] = json!(K3Reading::from(reading).tag());
        }
    }
    Ok(Output {
        envelope: Envelope {
            command: "solve",
            inputs: json!({ "equation": name, "k": k, "max": max }),
            result,
            provenance: vec!["closed-form", "iteration"],
            version: VERSION,
        },
        text,
        code: 0,
    })
}

fn summarize(report: &DiscrepancyReport) -> String {
    let unregistered = report.unregistered().count();
    let status = if report.is_clean() {
        "clean".to_string()
    } else if unregistered == 0 {
        format!("{} mismatches, all registered", report.mismatches.len())
    } else {
        format!(
            "{} mismatches, {unregistered} UNREGISTERED",
            report.mismatches.len()
        )
    };
    let mut known: Vec<&str> = report
        .mismatches
        .iter()
        .filter_map(|m| m.known.as_deref())
        .collect();
    known.sort_unstable();
    known.dedup();
    let mut line = format!("{:<22} n <= {:<8} {status}", report.equation, report.bound);
    if !known.is_empty() {
        line.push_str(&format!(" [{}]", known.join(", ")));
    }
    for m in report.unregistered().take(10) {
        line.push_str(&format!(
            "\n  n={} k={:?}: {:?} vs {:?}",
            m.n, m.k, m.enumerated, m.classifier
        ));
    }
    line
}

fn cmd_verify(
    suite: SuiteArg,
    max: Option<u64>,
    k: u32,
    bound: u64,
    manifest: Option<&std::path::Path>,
) -> Result<Output, Error> {
    let manifest = match manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            Manifest::from_json(&text)?
        }
        None => Manifest::builtin(),
    };
    let suites: Vec<Suite> = match suite {
        SuiteArg::Agreement => vec![Suite::Agreement],
        SuiteArg::Inequality => vec![Suite::Inequality],
        SuiteArg::Cyclicity => vec![Suite::Cyclicity],
        SuiteArg::Classifiers => vec![Suite::Classifiers],
        SuiteArg::Published => vec![Suite::Published],
        SuiteArg::All => vec![
            Suite::Published,
            Suite::Agreement,
            Suite::Inequality,
            Suite::Cyclicity,
            Suite::Classifiers,
        ],
    };
    let mut reports = Vec::new();
    for s in suites {
        let default_max = match s {
            Suite::Agreement => 2000,
            Suite::Inequality => 1_000_000,
            _ => 100_000,
        };
        let max = max.unwrap_or(default_max);
        if max > MAX_SWEEP {
            return Err(Error::BoundExceeded {
                needed: max,
                bound: MAX_SWEEP,
            });
        }
        // the published 1080000 oracle run needs more room than the sweep default
        let bound = if s == Suite::Published {
            bound.max(10_000_000)
        } else {
            bound
        };
        reports.extend(run_suite(s, &SuiteConfig { max, k, bound }, &manifest)?);
    }
    let unregistered: usize = reports.iter().map(|r| r.unregistered().count()).sum();
    let text = reports.iter().map(summarize).collect::<Vec<_>>().join("\n");
    let result = json!({
        "reports": reports,
        "unregistered": unregistered,
        "manifest": manifest.entries,
    });
    Ok(Output {
        envelope: Envelope {
            command: "verify",
            inputs: json!({ "suite": suite_name(suite), "max": max, "k": k, "bound": bound }),
            result,
            provenance: vec!["closed-form", "iteration", "oracle"],
            version: VERSION,
        },
        text,
        code: if unregistered == 0 { 0 } else { 3 },
    })
}

fn suite_name(s: SuiteArg) -> &'static str {
    match s {
        SuiteArg::Agreement => "agreement",
        SuiteArg::Inequality => "inequality",
        SuiteArg::Cyclicity => "cyclicity",
        SuiteArg::Classifiers => "classifiers",
        SuiteArg::Published => "published",
        SuiteArg::All => "all",
    }
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Phik {
            k,
            n,
            method,
            bound,
            trace,
        } => cmd_phik(*k, *n, method, *bound, *trace),
        Command::Decompose {
            k,
            n,
            form,
            method,
            bound,
        } => cmd_decompose(*k, *n, *form, *method, *bound),
        Command::Iphi { k, n } => cmd_iphi(*k, *n),
        Command::Phiproduct { values } => cmd_phiproduct(values),
        Command::Solve {
            equation,
            k,
            max,
            reading,
        } => cmd_solve(*equation, *k, *max, *reading),
        Command::Verify {
            suite,
            max,
            k,
            bound,
            manifest,
        } => cmd_verify(*suite, *max, *k, *bound, manifest.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&out.envelope).expect("envelope serializes")
            } else {
                out.text
            };
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let err = json!({ "error": e.to_string(), "exit_code": code, "version": VERSION });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&err).expect("error serializes")
                );
            } else {
                eprintln!("genphi: {e}");
            }
            ExitCode::from(code)
        }
    }
}
