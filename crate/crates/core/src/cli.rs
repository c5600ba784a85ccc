//! Command-line surface: argument parsing, validation, dispatch, and
//! CSV/JSON rendering. Everything here is deterministic for a fixed
//! configuration, whatever the worker count.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charspace::{arrangement, enumerate_fn, enumerate_lines, Character, GroupContext, Line};
use crate::error::Error;
use crate::oracle::{LocalizedBorelElement, Oracle};
use crate::phi::{
    build_phi_presentation, closed_form_series, phi_relations, verify_phi, RelationFamily,
};
use crate::rograde::{
    localized_hilbert, random_arrangement, ro_table, IrrepLabel, MultiDegree, RoGraded,
};
use crate::ssq::{collapse_check, Page, SpectralSequence};
use crate::superalg::{free_count, SuperMonomial};

pub const THREADS_ENV: &str = "COEFRING_THREADS";
pub const BUDGET_ENV: &str = "COEFRING_MAX_COLUMNS";
pub const DEFAULT_BUDGET: u128 = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "coefring",
    version,
    about = "Coefficient rings of HZ/p for G = (Z/p)^n"
)]
pub struct Cli {
    /// Odd prime p.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Rank n of G = (Z/p)^n.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Largest weight computed.
    #[arg(long, global = true, default_value_t = 6)]
    pub cutoff: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Keep one odd generator per character and only the four listed
    /// relation families.
    #[arg(long, global = true)]
    pub verbatim: bool,
    /// Seed for randomized checks and random arrangements.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON arrangement file {"p": .., "n": .., "lines": [[..], ..]}.
    #[arg(long, global = true)]
    pub arrangement: Option<PathBuf>,
    /// A character of the arrangement, e.g. `--line 1,0` (repeatable).
    #[arg(long = "line", global = true)]
    pub lines: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// List the lines of G*.
    Lines,
    /// Enumerate the echelon family F_n.
    FnEnum,
    /// Compare closed form, presentation and oracle dimensions.
    PhiVerify,
    /// Monomial bases of the presentation by weight.
    PhiBasis,
    /// Closed-form Poincaré series coefficients.
    Series,
    /// E¹ page dimensions (rows s, columns d).
    E1Table,
    /// E² page dimensions (rows s, columns d).
    E2Table,
    /// E² totals against the closed form, and E² ≤ E¹.
    CollapseCheck,
    /// Dimension of one RO(G)⁺-graded piece.
    RoDim {
        /// `c1,..,cn:mult`, repeatable; characters are named up to sign.
        #[arg(long = "irrep")]
        irreps: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Dimensions of all pieces up to a total multiplicity.
    RoTable {
        #[arg(long, default_value_t = 2)]
        max_mult: u32,
        #[arg(long, allow_hyphen_values = true)]
        k_min: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        k_max: Option<i64>,
    },
    /// Hilbert functions of localizations, oracle against presentation.
    Localize {
        /// Number of seeded random arrangements to add.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, default_value_t = 1)]
        min_size: usize,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
    },
    /// Check relation vanishing and embedding multiplicativity.
    RelationCheck {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

/// A validated job.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub ctx: GroupContext,
    pub cutoff: usize,
    pub format: Format,
    pub verbatim: bool,
    pub seed: u64,
    pub arrangement: Option<Vec<Line>>,
    pub command: Command,
    /// Largest Macaulay matrix (in columns) a job may build.
    pub budget: u128,
}

#[derive(Debug, Deserialize)]
struct ArrangementFile {
    p: u32,
    n: usize,
    lines: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {reason}")]
    Usage { field: &'static str, reason: String },
    #[error("refusing {command}: estimated {estimate} matrix columns at weight {weight} exceeds the budget of {budget} (set {BUDGET_ENV} to raise it)")]
    Budget {
        command: &'static str,
        estimate: u128,
        weight: usize,
        budget: u128,
    },
    #[error(transparent)]
    Compute(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } | CliError::Budget { .. } => 2,
            CliError::Compute(_) => 2,
        }
    }
}

fn usage(field: &'static str, reason: impl ToString) -> CliError {
    CliError::Usage {
        field,
        reason: reason.to_string(),
    }
}

fn parse_coords(field: &'static str, s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(field, format!("{s:?}: {e}")))
}

impl JobConfig {
    pub fn from_cli(cli: Cli, budget: u128) -> Result<Self, CliError> {
        let file = match &cli.arrangement {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage("--arrangement", format!("{}: {e}", path.display())))?;
                let parsed: ArrangementFile = serde_json::from_str(&text)
                    .map_err(|e| usage("--arrangement", format!("{}: {e}", path.display())))?;
                Some(parsed)
            }
            None => None,
        };
        let p = match (cli.p, &file) {
            (Some(p), Some(f)) if p != f.p => {
                return Err(usage(
                    "--p",
                    format!("{p} disagrees with arrangement file p = {}", f.p),
                ))
            }
            (Some(p), _) => p,
            (None, Some(f)) => f.p,
            (None, None) => return Err(usage("--p", "missing")),
        };
        let n = match (cli.n, &file) {
            (Some(n), Some(f)) if n != f.n => {
                return Err(usage(
                    "--n",
                    format!("{n} disagrees with arrangement file n = {}", f.n),
                ))
            }
            (Some(n), _) => n,
            (None, Some(f)) => f.n,
            (None, None) => return Err(usage("--n", "missing")),
        };
        let ctx = GroupContext::new(p, n).map_err(|e| match e {
            Error::InvalidPrime(_) => usage("--p", e),
            _ => usage("--n", e),
        })?;

        let mut chars = Vec::new();
        let raw = file
            .iter()
            .flat_map(|f| f.lines.iter().cloned())
            .map(|v| ("--arrangement", v));
        let flags = cli
            .lines
            .iter()
            .map(|s| parse_coords("--line", s).map(|v| ("--line", v)))
            .collect::<Result<Vec<_>, _>>()?;
        for (field, v) in raw.chain(flags) {
            let chi = ctx.character_mod(&v).map_err(|e| usage(field, e))?;
            if chi.is_zero() {
                return Err(usage(
                    field,
                    Error::ZeroCharacter(v.iter().map(|&x| x as u32).collect()),
                ));
            }
            chars.push(chi);
        }
        let arrangement = if chars.is_empty() {
            None
        } else {
            Some(arrangement(&ctx, &chars).map_err(|e| usage("--line", e))?)
        };

        if let Command::Localize {
            min_size, max_size, ..
        } = &cli.command
        {
            if *min_size == 0 || min_size > max_size {
                return Err(usage(
                    "--min-size",
                    format!("need 1 <= min-size <= max-size, got {min_size}..{max_size}"),
                ));
            }
            if (*max_size as u64) > ctx.line_count() {
                return Err(usage(
                    "--max-size",
                    format!("{max_size} exceeds the {} lines of G*", ctx.line_count()),
                ));
            }
        }

        Ok(JobConfig {
            ctx,
            cutoff: cli.cutoff,
            format: cli.format,
            verbatim: cli.verbatim,
            seed: cli.seed,
            arrangement,
            command: cli.command,
            budget,
        })
    }
}

/// What a job printed and whether every verification flag held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub diagnostics: Vec<String>,
    pub passed: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            diagnostics: Vec::new(),
            passed: true,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

struct Csv(csv::Writer<Vec<u8>>);

impl Csv {
    fn new() -> Self {
        Csv(csv::WriterBuilder::new()
            .flexible(true)
            .from_writer(Vec::new()))
    }

    fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.0.write_record(fields).expect("writing to memory");
    }

    fn finish(self) -> String {
        String::from_utf8(self.0.into_inner().expect("flush to memory")).expect("utf-8")
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn weights_header(first: &str, cutoff: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((0..=cutoff).map(|w| w.to_string()))
        .collect()
}

fn labelled<T: ToString>(label: &str, xs: &[T]) -> Vec<String> {
    std::iter::once(label.to_string())
        .chain(xs.iter().map(ToString::to_string))
        .collect()
}

fn flags(xs: &[bool]) -> Vec<u8> {
    xs.iter().map(|&b| u8::from(b)).collect()
}

impl JobConfig {
    fn check_budget(&self, command: &'static str, even: usize, odd: usize) -> Result<(), CliError> {
        let (weight, estimate) = (0..=self.cutoff)
            .map(|w| (w, free_count(even, odd, w)))
            .max_by_key(|&(_, c)| c)
            .unwrap_or((0, 1));
        if estimate > self.budget {
            return Err(CliError::Budget {
                command,
                estimate,
                weight,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// Runs a validated job.
pub fn run(config: &JobConfig) -> Result<Outcome, CliError> {
    let ctx = &config.ctx;
    let cutoff = config.cutoff;
    let fmt = config.format;
    match &config.command {
        Command::Lines => {
            let lines = enumerate_lines(ctx);
            Ok(Outcome::ok(match fmt {
                Format::Json => json(&lines.iter().map(|l| l.coords()).collect::<Vec<_>>()),
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(["index", "line"]);
                    for (i, l) in lines.iter().enumerate() {
                        w.row([i.to_string(), l.to_string()]);
                    }
                    w.finish()
                }
            }))
        }
        Command::FnEnum => {
            let family = enumerate_fn(ctx);
            Ok(Outcome::ok(match fmt {
                Format::Json => json(
                    &family
                        .iter()
                        .map(|s| s.elems().iter().map(Character::coords).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                ),
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(["index", "size", "subset"]);
                    for (i, s) in family.iter().enumerate() {
                        w.row([i.to_string(), s.len().to_string(), s.to_string()]);
                    }
                    w.finish()
                }
            }))
        }
        Command::Series => {
            let series = closed_form_series(ctx, cutoff)?;
            Ok(Outcome::ok(match fmt {
                Format::Json => json(&series),
                Format::Csv => format!("{}\n", series.coeffs.iter().join(",")),
            }))
        }
        Command::PhiVerify => {
            let odd = phi_odd_count(ctx, config.verbatim);
            config.check_budget("phi-verify", ctx.line_count() as usize, odd)?;
            let report = verify_phi(ctx, cutoff, config.verbatim)?;
            let mut diagnostics: Vec<String> = report
                .mismatches
                .iter()
                .map(|m| {
                    format!(
                        "mismatch at weight {}: closed-form {}, presentation {}, oracle {}",
                        m.weight, m.closed_form, m.presentation, m.oracle
                    )
                })
                .collect();
            if !report.oracle_le_presentation {
                diagnostics.push("oracle exceeds presentation dimension".into());
            }
            let stdout = match fmt {
                Format::Json => json(&report),
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(weights_header("source", cutoff));
                    for s in [&report.closed_form, &report.presentation, &report.oracle] {
                        w.row(labelled(s.source.label(), &s.coeffs));
                    }
                    w.row(labelled("agree", &flags(&report.agree)));
                    w.finish()
                }
            };
            Ok(Outcome {
                stdout,
                diagnostics,
                passed: report.passed(),
            })
        }
        Command::PhiBasis => {
            let odd = phi_odd_count(ctx, config.verbatim);
            config.check_budget("phi-basis", ctx.line_count() as usize, odd)?;
            let pres = build_phi_presentation(ctx, config.verbatim)?;
            let bases = crate::par::map_range(0..cutoff + 1, |w| {
                pres.monomial_basis(w)
                    .iter()
                    .map(|m| pres.render(m))
                    .collect::<Vec<_>>()
            });
            Ok(Outcome::ok(match fmt {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Entry<'a> {
                        weight: usize,
                        basis: &'a [String],
                    }
                    json(
                        &bases
                            .iter()
                            .enumerate()
                            .map(|(weight, basis)| Entry { weight, basis })
                            .collect::<Vec<_>>(),
                    )
                }
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(["weight", "index", "monomial"]);
                    for (weight, basis) in bases.iter().enumerate() {
                        for (i, m) in basis.iter().enumerate() {
                            w.row([weight.to_string(), i.to_string(), m.clone()]);
                        }
                    }
                    w.finish()
                }
            }))
        }
        Command::E1Table | Command::E2Table => {
            let page = if matches!(config.command, Command::E1Table) {
                Page::E1
            } else {
                Page::E2
            };
            let table = SpectralSequence::new(ctx, cutoff).table(page, cutoff);
            Ok(Outcome::ok(match fmt {
                Format::Json => json(&table),
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(weights_header("s", cutoff));
                    for (s, row) in table.entries.iter().enumerate() {
                        w.row(labelled(&s.to_string(), row));
                    }
                    w.finish()
                }
            }))
        }
        Command::CollapseCheck => {
            let report = collapse_check(ctx, cutoff)?;
            let mut diagnostics = Vec::new();
            for (d, ok) in report.agree.iter().enumerate() {
                if !ok {
                    diagnostics.push(format!(
                        "E2 total {} differs from closed form {} at weight {d}",
                        report.e2_total.coeffs[d], report.closed_form.coeffs[d]
                    ));
                }
            }
            if !report.e2_le_e1 {
                diagnostics.push("E2 exceeds E1 somewhere in range".into());
            }
            let stdout = match fmt {
                Format::Json => json(&report),
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(weights_header("source", cutoff));
                    w.row(labelled(
                        report.e2_total.source.label(),
                        &report.e2_total.coeffs,
                    ));
                    w.row(labelled(
                        report.closed_form.source.label(),
                        &report.closed_form.coeffs,
                    ));
                    w.row(labelled("agree", &flags(&report.agree)));
                    w.row([
                        "e2-le-e1".to_string(),
                        u8::from(report.e2_le_e1).to_string(),
                    ]);
                    w.finish()
                }
            };
            Ok(Outcome {
                stdout,
                diagnostics,
                passed: report.passed(),
            })
        }
        Command::RoDim { irreps, k } => {
            let mut m = BTreeMap::new();
            for item in irreps {
                let (coords, mult) = item.split_once(':').ok_or_else(|| {
                    usage("--irrep", format!("{item:?}: expected CHARACTER:MULT"))
                })?;
                let mult: u32 = mult
                    .trim()
                    .parse()
                    .map_err(|e| usage("--irrep", format!("{item:?}: {e}")))?;
                let chi = ctx
                    .character_mod(&parse_coords("--irrep", coords)?)
                    .map_err(|e| usage("--irrep", e))?;
                let label = IrrepLabel::new(ctx, &chi).map_err(|e| usage("--irrep", e))?;
                *m.entry(label).or_insert(0) += mult;
            }
            let md = MultiDegree::new(m, *k);
            let dim = RoGraded::new(ctx).dimension(&md);
            let desc = md.describe(ctx);
            Ok(Outcome::ok(match fmt {
                Format::Json => {
                    #[derive(Serialize)]
                    struct Piece {
                        multidegree: String,
                        k: i64,
                        dim: usize,
                    }
                    json(&Piece {
                        multidegree: desc,
                        k: *k,
                        dim,
                    })
                }
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(["multidegree", "k", "dim"]);
                    w.row([desc, k.to_string(), dim.to_string()]);
                    w.finish()
                }
            }))
        }
        Command::RoTable {
            max_mult,
            k_min,
            k_max,
        } => {
            let lo = k_min.unwrap_or(0);
            let hi = k_max.unwrap_or(2 * *max_mult as i64);
            let rows = ro_table(ctx, *max_mult, lo..=hi);
            Ok(Outcome::ok(match fmt {
                Format::Json => json(&rows),
                Format::Csv => {
                    let mut w = Csv::new();
                    w.row(["multidegree", "k", "dim"]);
                    for r in &rows {
                        let desc = if r.multidegree.is_empty() {
                            "0".to_string()
                        } else {
                            r.multidegree
                                .iter()
                                .map(|(c, e)| format!("{c}^{e}"))
                                .join(" ")
                        };
                        w.row([desc, r.k.to_string(), r.dim.to_string()]);
                    }
                    w.finish()
                }
            }))
        }
        Command::Localize {
            random,
            min_size,
            max_size,
        } => {
            let mut arrangements: Vec<Vec<Line>> = config.arrangement.iter().cloned().collect();
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            for _ in 0..*random {
                let size = rng.gen_range(*min_size..=*max_size);
                arrangements.push(random_arrangement(ctx, size, &mut rng));
            }
            if arrangements.is_empty() {
                return Err(usage(
                    "--line",
                    "localize needs --line, --arrangement or --random",
                ));
            }
            let widest = arrangements.iter().map(Vec::len).max().unwrap_or(0);
            config.check_budget("localize", widest, widest)?;
            let reports = crate::par::map(&arrangements, |s| localized_hilbert(ctx, s, cutoff))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            let mut diagnostics = Vec::new();
            for r in &reports {
                let name = r.lines.iter().join(" ");
                if !r.oracle_le_presentation {
                    diagnostics.push(format!("{{{name}}}: oracle exceeds presentation"));
                }
                for (w, ok) in r.agree.iter().enumerate() {
                    if !ok {
                        diagnostics.push(format!(
                            "{{{name}}}: weight {w} oracle {} vs presentation {}",
                            r.oracle.coeffs[w], r.presentation.coeffs[w]
                        ));
                    }
                }
            }
            let passed = reports
                .iter()
                .all(|r| r.oracle_le_presentation && r.all_equal());
            let stdout = match fmt {
                Format::Json => json(&reports),
                Format::Csv => {
                    let mut w = Csv::new();
                    let mut header = vec!["arrangement".to_string()];
                    header.extend(weights_header("source", cutoff));
                    w.row(header);
                    for r in &reports {
                        let name = r.lines.iter().join(" ");
                        for row in [
                            labelled(r.oracle.source.label(), &r.oracle.coeffs),
                            labelled(r.presentation.source.label(), &r.presentation.coeffs),
                            labelled("agree", &flags(&r.agree)),
                        ] {
                            w.row(std::iter::once(name.clone()).chain(row));
                        }
                    }
                    w.finish()
                }
            };
            Ok(Outcome {
                stdout,
                diagnostics,
                passed,
            })
        }
        Command::RelationCheck { samples } => relation_check(config, *samples),
    }
}

fn phi_odd_count(ctx: &GroupContext, verbatim: bool) -> usize {
    if verbatim {
        (ctx.order() - 1) as usize
    } else {
        ctx.line_count() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub detail: String,
    pub ok: bool,
}

fn family_name(f: RelationFamily) -> String {
    match f {
        RelationFamily::TTriple => "t-triple".into(),
        RelationFamily::Mixed(i) => format!("mixed-{i}"),
        RelationFamily::UTriple => "u-triple".into(),
    }
}

fn relation_check(config: &JobConfig, samples: usize) -> Result<Outcome, CliError> {
    let ctx = &config.ctx;
    let pres = build_phi_presentation(ctx, config.verbatim)?;
    let oracle = Oracle::for_presentation(&pres);
    let relations = phi_relations(ctx, config.verbatim);
    let mut rows: Vec<CheckRow> = crate::par::map(&relations, |r| CheckRow {
        check: family_name(r.family),
        detail: r.characters.iter().join(" "),
        ok: oracle.relation_image(&r.element).is_zero(),
    });

    let (even, odd) = (
        pres.lines().len() as u32,
        pres.odd_generators().len() as u32,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let random_monomial = |rng: &mut ChaCha8Rng| {
        let t: Vec<u32> = (0..even)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    rng.gen_range(1..3)
                } else {
                    0
                }
            })
            .collect();
        let mut u: Vec<u32> = (0..rng.gen_range(0..3))
            .map(|_| rng.gen_range(0..odd))
            .collect();
        u.sort_unstable();
        u.dedup();
        SuperMonomial::from_parts(&t, u)
    };
    let pairs: Vec<(SuperMonomial, SuperMonomial)> = (0..samples)
        .map(|_| (random_monomial(&mut rng), random_monomial(&mut rng)))
        .collect();
    let p = ctx.p();
    rows.extend(crate::par::map(&pairs, |(a, b)| {
        let lhs = match a.mul(b) {
            None => LocalizedBorelElement::zero(ctx.n()),
            Some((m, neg)) => {
                let e = oracle.embed(&m);
                if neg {
                    e.scale(p - 1, ctx)
                } else {
                    e
                }
            }
        };
        let rhs = oracle.embed(a).mul(&oracle.embed(b), ctx);
        CheckRow {
            check: "multiplicative".into(),
            detail: format!("{} x {}", pres.render(a), pres.render(b)),
            ok: lhs.equals(&rhs, ctx),
        }
    }));

    let diagnostics: Vec<String> = rows
        .iter()
        .filter(|r| !r.ok)
        .map(|r| format!("{} failed: {}", r.check, r.detail))
        .collect();
    let passed = diagnostics.is_empty();
    let stdout = match config.format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut w = Csv::new();
            w.row(["check", "detail", "ok"]);
            for r in &rows {
                w.row([
                    r.check.clone(),
                    r.detail.clone(),
                    u8::from(r.ok).to_string(),
                ]);
            }
            w.finish()
        }
    };
    Ok(Outcome {
        stdout,
        diagnostics,
        passed,
    })
}

/// Reads the worker count and matrix budget from the environment.
pub fn env_settings() -> Result<(Option<usize>, u128), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(
            v.parse::<usize>()
                .map_err(|e| usage(THREADS_ENV, format!("{v:?}: {e}")))?,
        ),
        Err(_) => None,
    };
    let budget = match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .parse::<u128>()
            .map_err(|e| usage(BUDGET_ENV, format!("{v:?}: {e}")))?,
        Err(_) => DEFAULT_BUDGET,
    };
    Ok((threads, budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<JobConfig, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("coefring").chain(args.iter().copied()))
            .expect("parseable");
        JobConfig::from_cli(cli, DEFAULT_BUDGET)
    }

    #[test]
    fn series_output() {
        let out =
            run(&config(&["series", "--p", "3", "--n", "2", "--cutoff", "5"]).unwrap()).unwrap();
        assert_eq!(out.stdout, "1,4,7,10,13,16\n");
        assert!(out.passed);
    }

    #[test]
    fn invalid_fields_are_named() {
        let err = config(&["series", "--p", "4", "--n", "2"]).unwrap_err();
        assert!(matches!(err, CliError::Usage { field: "--p", .. }), "{err}");
        let err = config(&["series", "--p", "3", "--n", "0"]).unwrap_err();
        assert!(matches!(err, CliError::Usage { field: "--n", .. }));
        let err = config(&["localize", "--p", "3", "--n", "2", "--line", "0,0"]).unwrap_err();
        assert!(matches!(
            err,
            CliError::Usage {
                field: "--line",
                ..
            }
        ));
        let err = config(&["localize", "--p", "3", "--n", "2", "--line", "1,0,1"]).unwrap_err();
        assert!(matches!(
            err,
            CliError::Usage {
                field: "--line",
                ..
            }
        ));
        let err = config(&["series", "--n", "2"]).unwrap_err();
        assert!(matches!(err, CliError::Usage { field: "--p", .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn budget_refusal() {
        let cli = Cli::try_parse_from([
            "coefring",
            "phi-verify",
            "--p",
            "3",
            "--n",
            "3",
            "--cutoff",
            "12",
        ])
        .unwrap();
        let cfg = JobConfig::from_cli(cli, 1000).unwrap();
        let err = run(&cfg).unwrap_err();
        assert!(matches!(err, CliError::Budget { .. }), "{err}");
        assert!(err.to_string().contains("exceeds the budget"));
    }

    #[test]
    fn verbatim_exit_status() {
        let out = run(&config(&[
            "phi-verify",
            "--p",
            "3",
            "--n",
            "2",
            "--verbatim",
            "--cutoff",
            "2",
        ])
        .unwrap())
        .unwrap();
        assert!(!out.passed);
        assert_eq!(out.exit_code(), 1);
        assert!(out.diagnostics[0].contains("weight 1"));
        assert!(out.stdout.contains("presentation,1,8,"));
    }

    #[test]
    fn phi_report_json_round_trip() {
        let out = run(&config(&[
            "phi-verify",
            "--p",
            "3",
            "--n",
            "2",
            "--cutoff",
            "4",
            "--format",
            "json",
        ])
        .unwrap())
        .unwrap();
        let parsed: crate::phi::PhiReport = serde_json::from_str(&out.stdout).unwrap();
        let direct = verify_phi(&GroupContext::new(3, 2).unwrap(), 4, false).unwrap();
        assert_eq!(parsed, direct);
    }

    #[test]
    fn arrangement_file() {
        let dir = std::env::temp_dir().join(format!("coefring-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("arr.json");
        std::fs::write(&path, r#"{"p": 3, "n": 2, "lines": [[1,0],[2,0],[0,1]]}"#).unwrap();
        let cfg = config(&[
            "localize",
            "--arrangement",
            path.to_str().unwrap(),
            "--cutoff",
            "4",
        ])
        .unwrap();
        assert_eq!(cfg.arrangement.as_ref().unwrap().len(), 2);
        let out = run(&cfg).unwrap();
        assert!(out.passed, "{out:?}");
        assert!(out.stdout.contains("oracle,1,2,3,4,5"));
        let err = config(&[
            "localize",
            "--arrangement",
            path.to_str().unwrap(),
            "--p",
            "5",
        ])
        .unwrap_err();
        assert!(matches!(err, CliError::Usage { field: "--p", .. }));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn ro_dim_command() {
        let out = run(&config(&[
            "ro-dim", "--p", "3", "--n", "2", "--irrep", "1,0:1", "--irrep", "0,1:1", "--k", "3",
        ])
        .unwrap())
        .unwrap();
        assert_eq!(out.stdout, "multidegree,k,dim\n\"(0,1)^1 (1,0)^1\",3,2\n");
    }
}
