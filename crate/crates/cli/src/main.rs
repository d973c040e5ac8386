use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use rooted_trees::bgroup::{
    compose, compose_inverse, exact_coeffs, solve_substitution, substitute, substitute_inverse,
    CoefficientMap,
};
use rooted_trees::canonical::{
    canonicalize, count_unlabeled, enumerate_unlabeled, invariant_table,
};
use rooted_trees::elementary::{
    bseries_eval, rk2_coeffs, verify_composition, verify_substitution, VerificationReport,
};
use rooted_trees::increasing::{
    enumerate_increasing_capped, perm_decode, perm_encode, PermCode, DEFAULT_INCREASING_CAP,
};
use rooted_trees::num::{factorial, format_rational, int, parse_rational};
use rooted_trees::prufer::{decode, encode, PruferSequence};
use rooted_trees::series::RationalPoly;
use rooted_trees::trees::{enumerate_labeled_capped, parse_tree, DEFAULT_LABELED_CAP};
use rooted_trees::{Error, UnlabeledTree};

#[derive(Parser)]
#[command(
    name = "trees",
    version,
    about = "Rooted trees, their codes, and the algebra of B-series"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Labeled,
    Increasing,
    Unlabeled,
}

#[derive(Subcommand)]
enum Command {
    /// List every tree of a family on n vertices
    Enumerate {
        family: Family,
        n: usize,
        /// Largest n accepted for labeled or increasing enumeration
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Count the trees of a family on n vertices
    Count { family: Family, n: usize },
    /// Prüfer sequences of labeled rooted trees
    Prufer {
        #[command(subcommand)]
        action: PruferAction,
    },
    /// Permutation codes of increasing trees
    Increasing {
        #[command(subcommand)]
        action: IncreasingAction,
    },
    /// Canonical unlabeled form of a labeled tree, e.g. `0[1,2[3]]`
    Canon { tree: String },
    /// Invariants σ, r, τ!, i of every unlabeled tree on n vertices
    Table { n: usize },
    /// Operations on coefficient maps
    Bgroup {
        #[command(subcommand)]
        action: BgroupAction,
    },
    /// B-series evaluation
    Bseries {
        #[command(subcommand)]
        action: BseriesAction,
    },
    /// Check the composition or substitution law on seeded random maps
    Verify {
        law: Law,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'N', long = "order", default_value_t = 6)]
        order: usize,
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value = "1+x^2/2")]
        beta: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        g0: String,
    },
}

#[derive(Subcommand)]
enum PruferAction {
    /// Tree in bracket notation to its sequence
    Encode { tree: String },
    /// Comma-separated sequence to the tree on n vertices
    Decode {
        n: usize,
        #[arg(default_value = "")]
        sequence: String,
    },
}

#[derive(Subcommand)]
enum IncreasingAction {
    Encode {
        tree: String,
    },
    Decode {
        n: usize,
        #[arg(default_value = "")]
        code: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Law {
    Composition,
    Substitution,
}

#[derive(Subcommand)]
enum BgroupAction {
    /// a * b (subtree convolution)
    Compose {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'N', long = "order")]
        order: Option<usize>,
    },
    /// a ⋆ b (quotient-tree convolution)
    Substitute {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'N', long = "order")]
        order: Option<usize>,
    },
    /// Inverse under composition or substitution
    Inverse {
        a: PathBuf,
        #[arg(long, value_enum, default_value_t = Law::Composition)]
        law: Law,
        #[arg(short = 'N', long = "order")]
        order: Option<usize>,
    },
    /// Solve x ⋆ b = target for x
    Solve {
        target: PathBuf,
        b: PathBuf,
        #[arg(short = 'N', long = "order")]
        order: Option<usize>,
    },
    /// Coefficients 1/τ! of the exact flow
    Exact {
        #[arg(short = 'N', long = "order", default_value_t = 6)]
        order: usize,
    },
    /// Coefficients of the two-stage second-order family with parameter α
    Rk2 {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(short = 'N', long = "order", default_value_t = 6)]
        order: usize,
    },
}

#[derive(Subcommand)]
enum BseriesAction {
    /// Coefficients of f^c(t, g₀) through t^N
    Eval {
        coeffs: PathBuf,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        g0: String,
        #[arg(short = 'N', long = "order")]
        order: Option<usize>,
    },
}

enum Failure {
    Verification,
    Library(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::Enumerate { family, n, cap } => enumerate(format, *family, *n, *cap),
        Command::Count { family, n } => {
            let count = match family {
                Family::Labeled if *n == 0 => BigUint::from(0u32),
                Family::Labeled => BigUint::from(*n).pow(*n as u32 - 1),
                Family::Increasing if *n == 0 => BigUint::from(0u32),
                Family::Increasing => factorial(n - 1),
                Family::Unlabeled => count_unlabeled(*n),
            };
            emit_scalar(format, "count", &count.to_string())
        }
        Command::Prufer { action } => match action {
            PruferAction::Encode { tree } => {
                let tree = parse_tree(tree)?;
                let code = encode(&tree);
                emit_pair(
                    format,
                    ("tree", tree.to_string()),
                    ("sequence", code.to_string()),
                )
            }
            PruferAction::Decode { n, sequence } => {
                let code: PruferSequence = sequence.parse()?;
                let tree = decode(*n, &code)?;
                emit_pair(
                    format,
                    ("sequence", code.to_string()),
                    ("tree", tree.to_string()),
                )
            }
        },
        Command::Increasing { action } => match action {
            IncreasingAction::Encode { tree } => {
                let tree = parse_tree(tree)?;
                let code = perm_encode(&tree)?;
                emit_pair(
                    format,
                    ("tree", tree.to_string()),
                    ("code", code.to_string()),
                )
            }
            IncreasingAction::Decode { n, code } => {
                let code: PermCode = code.parse()?;
                let tree = perm_decode(*n, &code)?;
                emit_pair(
                    format,
                    ("code", code.to_string()),
                    ("tree", tree.to_string()),
                )
            }
        },
        Command::Canon { tree } => {
            let tree = parse_tree(tree)?;
            emit_pair(
                format,
                ("tree", tree.to_string()),
                ("canonical", canonicalize(&tree).to_string()),
            )
        }
        Command::Table { n } => table(format, *n),
        Command::Bgroup { action } => bgroup(format, action),
        Command::Bseries {
            action:
                BseriesAction::Eval {
                    coeffs,
                    beta,
                    g0,
                    order,
                },
        } => {
            let c = read_map(coeffs)?;
            let beta = RationalPoly::parse(beta)?;
            let g0 = parse_rational(g0)?;
            let series = bseries_eval(&c, &beta, &g0, order.unwrap_or(c.order()))?;
            let values: Vec<String> = series.coeffs().iter().map(format_rational).collect();
            match format {
                Format::Text => {
                    print_lines(values.iter().enumerate().map(|(k, v)| format!("t^{k} {v}")))
                }
                Format::Json => print_json(&json!({
                    "beta": beta.to_string(),
                    "g0": format_rational(&g0),
                    "order": series.order(),
                    "coeffs": values,
                })),
                Format::Csv => print_csv(
                    &["power", "coeff"],
                    values
                        .iter()
                        .enumerate()
                        .map(|(k, v)| vec![k.to_string(), v.clone()]),
                ),
            }
        }
        Command::Verify {
            law,
            seed,
            order,
            pairs,
            beta,
            g0,
        } => verify(format, *law, *seed, *order, *pairs, beta, g0),
    }
}

fn enumerate(format: Format, family: Family, n: usize, cap: Option<usize>) -> Outcome {
    let trees: Vec<String> = match family {
        Family::Labeled => enumerate_labeled_capped(n, cap.unwrap_or(DEFAULT_LABELED_CAP))?
            .iter()
            .map(ToString::to_string)
            .collect(),
        Family::Increasing => {
            enumerate_increasing_capped(n, cap.unwrap_or(DEFAULT_INCREASING_CAP))?
                .iter()
                .map(ToString::to_string)
                .collect()
        }
        Family::Unlabeled => enumerate_unlabeled(n)
            .iter()
            .map(ToString::to_string)
            .collect(),
    };
    match format {
        Format::Text => print_lines(trees.iter().cloned()),
        Format::Json => print_json(&trees),
        Format::Csv => print_csv(
            &["index", "tree"],
            trees
                .iter()
                .enumerate()
                .map(|(k, t)| vec![k.to_string(), t.clone()]),
        ),
    }
}

fn table(format: Format, n: usize) -> Outcome {
    let rows = invariant_table(n);
    let cells = |row: &rooted_trees::canonical::TableRow| {
        [&row.symmetry, &row.labeled, &row.factorial, &row.increasing].map(|v| v.to_string())
    };
    match format {
        Format::Text => {
            let mut lines = vec!["tau sigma r tau! i".to_string()];
            for row in &rows {
                lines.push(format!(
                    "{} {}",
                    row.tree.to_compact_string(),
                    cells(row).join(" ")
                ));
            }
            print_lines(lines.into_iter())
        }
        Format::Json => {
            let values: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "tree": row.tree.to_string(),
                        "sigma": number(&row.symmetry),
                        "r": number(&row.labeled),
                        "factorial": number(&row.factorial),
                        "i": number(&row.increasing),
                    })
                })
                .collect();
            print_json(&values)
        }
        Format::Csv => print_csv(
            &["tree", "sigma", "r", "factorial", "i"],
            rows.iter().map(|row| {
                let mut record = vec![row.tree.to_string()];
                record.extend(cells(row));
                record
            }),
        ),
    }
}

/// A JSON number when it fits in `u64`, otherwise a decimal string.
fn number(value: &BigUint) -> Value {
    u64::try_from(value).map_or_else(|_| Value::String(value.to_string()), Value::from)
}

fn bgroup(format: Format, action: &BgroupAction) -> Outcome {
    let result = match action {
        BgroupAction::Compose { a, b, order } => {
            let (a, b) = (read_map(a)?, read_map(b)?);
            let order = order.unwrap_or(a.order().min(b.order()));
            compose(&a, &b, order)?
        }
        BgroupAction::Substitute { a, b, order } => {
            let (a, b) = (read_map(a)?, read_map(b)?);
            let order = order.unwrap_or(a.order().min(b.order()));
            substitute(&a, &b, order)?
        }
        BgroupAction::Inverse { a, law, order } => {
            let a = read_map(a)?;
            let order = order.unwrap_or(a.order());
            match law {
                Law::Composition => compose_inverse(&a, order)?,
                Law::Substitution => substitute_inverse(&a, order)?,
            }
        }
        BgroupAction::Solve { target, b, order } => {
            let (target, b) = (read_map(target)?, read_map(b)?);
            let order = order.unwrap_or(target.order().min(b.order()));
            solve_substitution(&target, &b, order)?
        }
        BgroupAction::Exact { order } => exact_coeffs(*order),
        BgroupAction::Rk2 { alpha, order } => rk2_coeffs(&parse_rational(alpha)?, *order)?,
    };
    emit_map(format, &result)
}

fn emit_map(format: Format, map: &CoefficientMap) -> Outcome {
    let rows = std::iter::once(("empty".to_string(), format_rational(map.empty()))).chain(
        map.iter()
            .map(|(tree, value)| (tree.to_string(), format_rational(value))),
    );
    match format {
        Format::Text => print_lines(rows.map(|(tree, value)| format!("{tree} {value}"))),
        Format::Json => print_json(map),
        Format::Csv => print_csv(&["tree", "coeff"], rows.map(|(t, v)| vec![t, v])),
    }
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    law: &'static str,
    seed: u64,
    order: usize,
    passed: bool,
    reports: &'a [VerificationReport],
}

fn verify(
    format: Format,
    law: Law,
    seed: u64,
    order: usize,
    pairs: usize,
    beta: &str,
    g0: &str,
) -> Outcome {
    let beta = RationalPoly::parse(beta)?;
    let g0 = parse_rational(g0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let report = match law {
            Law::Composition => {
                let a = CoefficientMap::random(order, int(1), &mut rng);
                let b = CoefficientMap::random(order, int(1), &mut rng);
                verify_composition(&a, &b, &beta, &g0, order)?
            }
            Law::Substitution => {
                let mut a = CoefficientMap::random(order, int(0), &mut rng);
                if order > 0 {
                    a.set(&UnlabeledTree::single(), int(1))?;
                }
                let b = CoefficientMap::random(order, int(1), &mut rng);
                verify_substitution(&a, &b, &beta, &g0, order)?
            }
        };
        reports.push(report);
    }
    let passed = reports.iter().all(|r| r.passed);
    let law_name = match law {
        Law::Composition => "composition",
        Law::Substitution => "substitution",
    };
    match format {
        Format::Text => {
            let mut lines: Vec<String> = reports
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    format!(
                        "pair {k}: {} (beta = {}, g0 = {})",
                        if r.passed { "pass" } else { "FAIL" },
                        r.beta,
                        format_rational(&r.g0)
                    )
                })
                .collect();
            lines.push(format!(
                "{law_name} law through t^{order}, seed {seed}: {}",
                if passed { "pass" } else { "FAIL" }
            ));
            print_lines(lines.into_iter())?;
        }
        Format::Json => print_json(&VerifySummary {
            law: law_name,
            seed,
            order,
            passed,
            reports: &reports,
        })?,
        Format::Csv => {
            print_csv(
                &["pair", "power", "lhs", "rhs", "equal"],
                reports.iter().enumerate().flat_map(|(k, r)| {
                    r.lhs.coeffs().iter().zip(r.rhs.coeffs()).enumerate().map(
                        move |(p, (l, rh))| {
                            vec![
                                k.to_string(),
                                p.to_string(),
                                format_rational(l),
                                format_rational(rh),
                                (l == rh).to_string(),
                            ]
                        },
                    )
                }),
            )?
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn read_map(path: &Path) -> Result<CoefficientMap, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit_scalar(format: Format, key: &str, value: &str) -> Outcome {
    match format {
        Format::Text => print_lines(std::iter::once(value.to_string())),
        Format::Json => print_json(&json!({ key: value })),
        Format::Csv => print_csv(&[key], std::iter::once(vec![value.to_string()])),
    }
}

fn emit_pair(format: Format, first: (&str, String), second: (&str, String)) -> Outcome {
    match format {
        Format::Text => print_lines(std::iter::once(second.1)),
        Format::Json => print_json(&json!({ first.0: first.1, second.0: second.1 })),
        Format::Csv => print_csv(
            &[first.0, second.0],
            std::iter::once(vec![first.1, second.1]),
        ),
    }
}

fn print_lines(lines: impl Iterator<Item = String>) -> Outcome {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn print_json<T: Serialize + ?Sized>(value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn print_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Outcome {
    let mut writer = csv::Writer::from_writer(io::stdout());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
