//! `adt`: command-line front end for the adt-core library.

use adt_core::algebra::{builtin_with, parse_algebra, parse_value, sample_value, satisfies_with, star_algebra, Algebra, Builtin, RealMode, SampleConfig, Value};
use adt_core::approx::{self, check_fast_approx, exp_reference, grid_samples, verify_cauchy_uniqueness, ApproxSequence, FastConfig};
use adt_core::corpus::{self, CORPUS};
use adt_core::extract::{ExtractConfig, ExtractionTask, Extractor};
use adt_core::interp::{run, universal_eval, DEFAULT_FUEL};
use adt_core::prover::{base_symbols, initial_model_with, with_nstd, ModelConfig, UniverseMode, DEFAULT_CEILING};
use adt_core::report::{CheckRecord, Report};
use adt_core::schemes::{godel_encode, parse_derivation, Derivation};
use adt_core::spec::{array_axioms, compile_mupr_spec, compile_pr_spec, compiled_algebra, count_report, eliminate_bu, nstd_axioms, parse_spec, print_spec, ElimMode, NStdMode, SpecSet};
use adt_core::syntax::{numeral, parse_signature, parse_term, Signature, Sort, Term};
use adt_core::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "adt", version, about = "Computable functions on many-sorted algebras and their specifications")]
struct Cli {
    /// Seed for every sampling step; required by sampling commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// μ-search fuel per run.
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::JsonLines)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    JsonLines,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Bool,
    SortD,
}

impl From<Mode> for ElimMode {
    fn from(m: Mode) -> ElimMode {
        match m {
            Mode::Bool => ElimMode::Bool,
            Mode::SortD => ElimMode::SortD,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a derivation on an algebra.
    Eval {
        /// Built-in algebra (B, Beq, N0, N, R0, RN, Rd, Id, with an optional `*`) or a .alg file.
        #[arg(long, default_value = "N")]
        alg: String,
        /// A .der file or the name of a corpus derivation.
        #[arg(long)]
        der: String,
        /// Arguments as a list, e.g. "(2 3)".
        #[arg(long, default_value = "()")]
        args: String,
        /// Use binary64 reals instead of exact rationals.
        #[arg(long)]
        float: bool,
    },
    /// Compile a derivation into its equational specification.
    Compile {
        #[arg(long, default_value = "N")]
        alg: String,
        #[arg(long)]
        der: String,
    },
    /// Replace bounded quantifiers by characteristic functions.
    EliminateBu {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::SortD)]
        mode: Mode,
    },
    /// Print the array axioms for an algebra's signature.
    Arrax {
        #[arg(long, default_value = "N")]
        alg: String,
        /// A .sig file to use instead of --alg.
        #[arg(long)]
        sig: Option<PathBuf>,
    },
    /// Print the N-standardness axioms.
    Nstdax {
        #[arg(long, default_value = "N")]
        alg: String,
        #[arg(long)]
        sig: Option<PathBuf>,
        /// Instantiate over closed terms of at most this depth instead of printing open axioms.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Build the bounded term model of a specification and report its flags.
    Model {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 8)]
        cap: u64,
        /// Add the N-standardness axioms first.
        #[arg(long)]
        nstd: bool,
        /// Also print every class.
        #[arg(long)]
        dump: bool,
    },
    /// Ask whether two closed terms are provably equal.
    Query {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, default_value_t = 8)]
        cap: u64,
        #[arg(long)]
        nstd: bool,
    },
    /// Extract a hidden-symbol-free term for the target applied to arguments.
    Extract {
        /// A .spec file with a target symbol.
        #[arg(long, conflicts_with = "der")]
        spec: Option<PathBuf>,
        /// A derivation, compiled (and freed of bounded quantifiers) first.
        #[arg(long)]
        der: Option<String>,
        #[arg(long, default_value = "N")]
        alg: String,
        #[arg(long, default_value = "()")]
        args: String,
        #[arg(long, value_enum, default_value_t = Mode::SortD)]
        mode: Mode,
        #[arg(long, default_value_t = 12)]
        max_depth: u32,
        #[arg(long, default_value_t = 10_000)]
        budget_ms: u64,
    },
    /// Check a fast approximating sequence against a reference evaluator.
    Approx {
        /// A derivation of type nat × u → s over Id (or `exp` for the built-in one).
        #[arg(long, default_value = "exp")]
        der: String,
        #[arg(long, default_value = "exp")]
        oracle: String,
        #[arg(long, default_value_t = 20)]
        nmax: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Guard band exponent; 0 disables it.
        #[arg(long, default_value_t = 20)]
        guard: u32,
    },
    /// Print sort, symbol, axiom and bounded-quantifier counts.
    Counts {
        #[arg(long, conflicts_with = "der")]
        spec: Option<PathBuf>,
        #[arg(long)]
        der: Option<String>,
        #[arg(long, default_value = "N")]
        alg: String,
    },
    /// Run interpreter and specification checks over the built-in corpus.
    CorpusRun {
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn load_algebra(name: &str, mode: RealMode) -> Result<Algebra> {
    if name.ends_with(".alg") {
        return parse_algebra(&read(Path::new(name))?);
    }
    match name.strip_suffix('*') {
        Some(base) => star_algebra(builtin_with(base, mode)?.algebra()),
        None => Ok(builtin_with(name, mode)?.into_algebra()),
    }
}

fn load_derivation(name: &str, a: &Algebra) -> Result<Derivation> {
    let p = Path::new(name);
    if p.exists() {
        return parse_derivation(a.signature(), &read(p)?);
    }
    match corpus::corpus_item(name) {
        Ok(it) => parse_derivation(a.signature(), it.text),
        Err(_) if name.ends_with(".der") => Err(Error::Io(format!("{name}: no such file"))),
        Err(e) => Err(e),
    }
}

fn load_signature(alg: &str, sig: &Option<PathBuf>) -> Result<Signature> {
    match sig {
        Some(p) => parse_signature(&read(p)?),
        None => Ok(load_algebra(alg, RealMode::Exact)?.signature().clone()),
    }
}

/// Top-level items of a parenthesised list, keeping nested (..) and [..] together.
fn list_items(text: &str) -> Result<Vec<String>> {
    let t = text.trim();
    let inner = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).ok_or_else(|| Error::Usage(format!("expected a parenthesised list, got {t:?}")))?;
    let mut items = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in inner.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Usage("unbalanced brackets in argument list".into()));
        }
        if ch.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                items.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Usage("unbalanced brackets in argument list".into()));
    }
    if !cur.is_empty() {
        items.push(cur);
    }
    Ok(items)
}

fn parse_values(text: &str, dom: &[Sort], mode: RealMode) -> Result<Vec<Value>> {
    let items = list_items(text)?;
    if items.len() != dom.len() {
        return Err(Error::Usage(format!("expected {} arguments, got {}", dom.len(), items.len())));
    }
    items.iter().zip(dom).map(|(x, s)| parse_value(s, x, mode)).collect()
}

fn parse_terms(text: &str, sig: &Signature) -> Result<Vec<Term>> {
    list_items(text)?
        .iter()
        .map(|x| match x.parse::<u64>() {
            Ok(n) => Ok(numeral(n)),
            Err(_) => parse_term(sig, x),
        })
        .collect()
}

fn ceiling() -> Result<usize> {
    match std::env::var("ADT_CEILING") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Usage(format!("ADT_CEILING must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_CEILING),
    }
}

fn need_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::Usage("this command samples; pass --seed".into()))
}

fn compile_any(d: &Derivation) -> Result<SpecSet> {
    if d.uses_mu() || d.uses_star() {
        compile_mupr_spec(d)
    } else {
        compile_pr_spec(d)
    }
}

fn model_config(spec: &SpecSet, depth: u32, cap: u64) -> Result<ModelConfig> {
    let mut mc = ModelConfig::new(depth, cap, UniverseMode::Full(base_symbols(spec)));
    mc.ceiling = ceiling()?;
    Ok(mc)
}

enum Output {
    Text(String),
    Report(Report),
}

/// Corpus functions use unary arithmetic, so naturals stay small.
const CORPUS_SAMPLES: SampleConfig = SampleConfig { nat_max: 6, array_max: 4, real_bound: 4, grid_bits: 16 };

fn samples_for(a: &Algebra, dom: &[Sort], n: usize, rng: &mut SplitMix64) -> Result<Vec<Vec<Value>>> {
    let cfg = CORPUS_SAMPLES;
    (0..n).map(|_| dom.iter().map(|s| sample_value(a, s, rng, &cfg)).collect()).collect()
}

fn corpus_run(seed: u64, samples: usize, fuel: u64) -> Result<Report> {
    let mut rep = Report::new();
    for it in CORPUS {
        let (d, a) = corpus::load(it.name)?;
        let (dom, range) = d.result_type();
        let mut rng = SplitMix64::seed_from_u64(seed);
        let code = godel_encode(&d);
        let mut bad = None;
        for args in samples_for(&a, dom, samples, &mut rng)? {
            let direct = run(&d, &a, &args, fuel)?;
            let univ = universal_eval(&a, dom, range, &code, &args, fuel)?;
            if direct != univ {
                bad = Some(format!("args {args:?}: run gave {direct}, universal evaluation gave {univ}"));
                break;
            }
        }
        rep.push(CheckRecord::verdict(format!("universal/{}", it.name), bad.is_none(), format!("{samples} argument tuples"), bad));

        let spec = compile_any(&d)?;
        let ca = compiled_algebra(&d, &a, &spec, fuel)?;
        let mut failed = None;
        for (i, ax) in spec.axioms.iter().enumerate() {
            if let adt_core::algebra::Verdict::Counterexample(env) = satisfies_with(&ca, &ax.formula, samples, seed ^ i as u64, &CORPUS_SAMPLES)? {
                let shown: Vec<String> = env.iter().map(|(v, x)| format!("{v} = {x}")).collect();
                failed = Some(format!("axiom {i} ({}) fails at {}", ax.formula, shown.join(", ")));
                break;
            }
        }
        rep.push(CheckRecord::verdict(format!("spec/{}", it.name), failed.is_none(), format!("{} axioms × {samples} instances", spec.axioms.len()), failed));

        let c = count_report(&spec);
        rep.push(CheckRecord::pass(format!("counts/{}", it.name), serde_json::to_string(&c).expect("counts serialize")));
    }
    Ok(rep)
}

fn approx_run(der: &str, oracle: &str, nmax: u64, samples: usize, guard: u32, seed: u64, fuel: u64) -> Result<Report> {
    let id: Builtin = builtin_with("Id", RealMode::Float)?;
    let a = id.algebra();
    let f = match oracle {
        "exp" => exp_reference(),
        o => return Err(Error::NotFound(format!("unknown oracle {o} (available: exp)"))),
    };
    let d = match der {
        "exp" => approx::exp_derivation(a)?,
        path => parse_derivation(a.signature(), &read(Path::new(path))?)?,
    };
    let seq = ApproxSequence::from_derivation(&d, a, fuel)?;
    let xs = grid_samples(a, &seq.domain, samples, seed)?;
    let m = id.metric().expect("Id is metric");
    let cfg = FastConfig { n_max: nmax, guard_bits: (guard > 0).then_some(guard) };
    let mut rep = Report::new();
    let show = |r: &approx::ApproxReport| r.violation.as_ref().map(|v| serde_json::to_string(v).expect("violation serializes"));
    let fast = check_fast_approx(&seq, &f, m, &xs, &cfg)?;
    rep.push(CheckRecord::verdict("approx/fast", fast.pass, format!("{} checks, max d·2^n = {:.6}", fast.checked, fast.max_scaled), show(&fast)));
    let cauchy = verify_cauchy_uniqueness(&seq, m, &xs, nmax, cfg.guard_bits)?;
    rep.push(CheckRecord::verdict("approx/cauchy", cauchy.pass, format!("{} pairs", cauchy.checked), show(&cauchy)));
    Ok(rep)
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let fuel = cli.fuel;
    Ok(match &cli.command {
        Command::Eval { alg, der, args, float } => {
            let mode = if *float { RealMode::Float } else { RealMode::Exact };
            let a = load_algebra(alg, mode)?;
            let d = load_derivation(der, &a)?;
            let vals = parse_values(args, d.result_type().0, mode)?;
            Output::Text(format!("{}\n", run(&d, &a, &vals, fuel)?))
        }
        Command::Compile { alg, der } => {
            let a = load_algebra(alg, RealMode::Exact)?;
            Output::Text(print_spec(&compile_any(&load_derivation(der, &a)?)?))
        }
        Command::EliminateBu { spec, mode } => Output::Text(print_spec(&eliminate_bu(&parse_spec(&read(spec)?)?, (*mode).into())?)),
        Command::Arrax { alg, sig } => Output::Text(print_spec(&array_axioms(&load_signature(alg, sig)?)?)),
        Command::Nstdax { alg, sig, depth } => {
            let mode = depth.map_or(NStdMode::Open, NStdMode::ClosedInstances);
            Output::Text(print_spec(&nstd_axioms(&load_signature(alg, sig)?, mode)?))
        }
        Command::Model { spec, depth, cap, nstd, dump } => {
            let mut s = parse_spec(&read(spec)?)?;
            if *nstd {
                s = with_nstd(&s)?;
            }
            let m = initial_model_with(&s, model_config(&s, *depth, *cap)?)?;
            let fl = m.flags();
            let detail = format!("depth {depth}, cap {cap}, {} classes, {}", m.dump().len(), serde_json::to_string(&fl).expect("flags serialize"));
            let mut rep = Report::new();
            rep.push(if fl.consistent { CheckRecord::pass("model", detail) } else { CheckRecord::fail("model", "inconsistent", Some("true = false".into())) });
            if *dump {
                for c in m.dump() {
                    rep.push(CheckRecord::pass("class", serde_json::to_string(&c).expect("classes serialize")));
                }
            }
            Output::Report(rep)
        }
        Command::Query { spec, lhs, rhs, depth, cap, nstd } => {
            let mut s = parse_spec(&read(spec)?)?;
            if *nstd {
                s = with_nstd(&s)?;
            }
            let (l, r) = (parse_term(&s.signature, lhs)?, parse_term(&s.signature, rhs)?);
            let mut m = initial_model_with(&s, model_config(&s, *depth, *cap)?)?;
            let proved = m.proves_equal(&l, &r)?;
            let mut rep = Report::new();
            if !m.flags().consistent {
                rep.push(CheckRecord::fail("query", "inconsistent", Some("true = false".into())));
            } else {
                rep.push(CheckRecord::verdict("query", proved, format!("{l} = {r} at depth {depth}"), (!proved).then(|| format!("{l} and {r} lie in different classes"))));
            }
            Output::Report(rep)
        }
        Command::Extract { spec, der, alg, args, mode, max_depth, budget_ms } => {
            let a = load_algebra(alg, RealMode::Exact)?;
            let (s, algebra) = match (spec, der) {
                (Some(p), _) => (parse_spec(&read(p)?)?, None),
                (None, Some(dn)) => {
                    let d = load_derivation(dn, &a)?;
                    let mut s = compile_any(&d)?;
                    if s.bu_occurrences() > 0 {
                        s = eliminate_bu(&s, (*mode).into())?;
                    }
                    (s, Some(a))
                }
                (None, None) => return Err(Error::Usage("extract needs --spec or --der".into())),
            };
            let task = ExtractionTask::for_spec(&s, parse_terms(args, &s.signature)?)?;
            let cfg = ExtractConfig { max_depth: *max_depth, budget: Duration::from_millis(*budget_ms), ceiling: ceiling()?, ..ExtractConfig::default() };
            let r = Extractor::new().extract(&task, algebra.as_ref(), &cfg)?;
            let mut rep = Report::new();
            rep.push(CheckRecord::pass("extract", serde_json::to_string(&r).expect("extraction serializes")));
            Output::Report(rep)
        }
        Command::Approx { der, oracle, nmax, samples, guard } => Output::Report(approx_run(der, oracle, *nmax, *samples, *guard, need_seed(cli.seed)?, fuel)?),
        Command::Counts { spec, der, alg } => {
            let s = match (spec, der) {
                (Some(p), _) => parse_spec(&read(p)?)?,
                (None, Some(dn)) => compile_any(&load_derivation(dn, &load_algebra(alg, RealMode::Exact)?)?)?,
                (None, None) => return Err(Error::Usage("counts needs --spec or --der".into())),
            };
            Output::Text(serde_json::to_string(&count_report(&s)).expect("counts serialize") + "\n")
        }
        Command::CorpusRun { samples } => Output::Report(corpus_run(need_seed(cli.seed)?, *samples, fuel)?),
    })
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = dispatch(&cli).and_then(|out| match out {
        Output::Text(t) => emit(&cli, &t).map(|_| 0),
        Output::Report(r) => {
            let body = if cli.format == Format::Text { r.text() } else { r.json_lines() };
            emit(&cli, &body).map(|_| r.exit_code())
        }
    });
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("adt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
