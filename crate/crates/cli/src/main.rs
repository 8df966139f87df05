use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orbitmatch::cache::Cache;
use orbitmatch::epsmap::{verify_matching, EpsMode, EpsilonMap, TargetGroup, Targets};
use orbitmatch::klengine::{padic_table, parabolic_kl, PermParam};
use orbitmatch::klvengine::{build_block, klv_polynomials};
use orbitmatch::lorbits::enumerate_l_orbits;
use orbitmatch::perm::{Perm, SimpleSet};
use orbitmatch::rootdata::{parse_lambda, CartanType, Grading, RootDataError, RootSystem};
use orbitmatch::verify::{summarize, sweep, verify, OrderingChoice, VerifyError, VerifyOptions};

#[derive(Parser)]
#[command(name = "orbitmatch", version, about = "Orbit matching and KL/KLV polynomial cross-checks for graded Lie algebras")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for the persistent polynomial cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Seed for resampling representatives.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct GradingArgs {
    /// `gl`, a Cartan letter (`a`..`g`), or a letter with rank such as `f4`.
    #[arg(long = "type")]
    ty: String,
    /// Rank of the root system, or `n` for GL(n).
    #[arg(long)]
    rank: Option<usize>,
    /// Diagonal entries for `gl`, simple-root pairings otherwise; a trailing
    /// `-halved` tag is accepted and ignored.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    K,
    P,
}

impl From<Group> for TargetGroup {
    fn from(g: Group) -> Self {
        match g {
            Group::K => TargetGroup::K,
            Group::P => TargetGroup::P,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenspace dimensions, K, and the parabolic family of a grading.
    Grade(GradingArgs),
    /// L-orbits on 𝔤(−1) and the K- or P-orbits on G/P.
    Orbits {
        #[command(flatten)]
        grading: GradingArgs,
        #[arg(long, value_enum, default_value = "k")]
        mode: Group,
    },
    /// Orbit matching through ε with its dimension and stabilizer checks.
    Match {
        #[command(flatten)]
        grading: GradingArgs,
        #[arg(long, default_value = "default")]
        ordering: String,
        #[arg(long, value_enum, default_value = "k")]
        mode: Group,
        /// Use ε′(x) = exp(x)·𝔭.
        #[arg(long)]
        two_step: bool,
    },
    /// A (parabolic) KL polynomial, or the p-adic table of a GL grading.
    Kl {
        /// Permutation in one-line notation, e.g. 1234.
        #[arg(long, requires = "w")]
        x: Option<String>,
        #[arg(long, requires = "x")]
        w: Option<String>,
        /// Block sizes of the parabolic, e.g. 2,2.
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long = "type", requires = "lambda")]
        ty: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// KLV block and polynomial table for K = GL(p)×GL(q).
    Klv {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Dump the block structure instead of the polynomials.
        #[arg(long)]
        block: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Full comparison of both polynomial families on matched orbits.
    Verify {
        #[command(flatten)]
        grading: GradingArgs,
        #[arg(long, default_value = "default")]
        ordering: String,
        #[arg(long, value_enum, default_value = "k")]
        mode: Group,
        #[arg(long)]
        two_step: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs verify on every GL(n) grading with n ≤ max-n.
    Sweep {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long)]
        budget_seconds: Option<u64>,
        #[arg(long, value_enum, default_value = "k")]
        mode: Group,
        #[arg(long)]
        two_step: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Parse(String),
    Coweight(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Coweight(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Coweight(m) | Failure::Check(m) => m,
        }
    }
}

impl From<RootDataError> for Failure {
    fn from(e: RootDataError) -> Self {
        match e {
            RootDataError::NonIntegral(_) | RootDataError::NonDominant(_) => Failure::Coweight(e.to_string()),
            _ => Failure::Parse(e.to_string()),
        }
    }
}

fn check<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Check(e.to_string())
}

fn build_grading(ty: &str, rank: Option<usize>, lambda: &str) -> Result<Grading, Failure> {
    let lambda = parse_lambda(lambda.trim().trim_end_matches("-halved"))?;
    let ty = ty.trim().to_ascii_lowercase();
    if ty == "gl" {
        if let Some(n) = rank {
            if n != lambda.len() {
                return Err(RootDataError::WrongLength { expected: n, got: lambda.len() }.into());
            }
        }
        return Ok(Grading::gl(&lambda)?);
    }
    let (letter, digits) = ty.split_at(1.min(ty.len()));
    let t: CartanType = letter.parse()?;
    let r = if digits.is_empty() {
        rank.ok_or_else(|| Failure::Parse("--rank is required".into()))?
    } else {
        digits.parse().map_err(|_| Failure::Parse(format!("bad type {ty}")))?
    };
    Ok(Grading::new(RootSystem::build(t, r)?, &lambda)?)
}

fn grading_of(a: &GradingArgs) -> Result<Grading, Failure> {
    build_grading(&a.ty, a.rank, &a.lambda)
}

fn emit(json: bool, value: &serde_json::Value, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("json"));
    } else {
        print!("{}", text());
    }
}

fn write_json(path: &PathBuf, v: &serde_json::Value) -> Result<(), Failure> {
    std::fs::write(path, serde_json::to_string_pretty(v).expect("json")).map_err(check)
}

fn mode_of(two_step: bool) -> EpsMode {
    if two_step {
        EpsMode::TwoStep
    } else {
        EpsMode::Truncated
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cache = match &cli.cache_dir {
        Some(d) => Cache::at(d).map_err(check)?,
        None => Cache::memory(),
    };
    match cli.cmd {
        Cmd::Grade(a) => {
            let g = grading_of(&a)?;
            let (s, _) = summarize(&g);
            emit(cli.json, &serde_json::to_value(&s).expect("json"), || {
                let mut out = format!("grading {}\n", s.key);
                for (i, d) in &s.eigenspace_dims {
                    out.push_str(&format!("  dim g({i}) = {d}\n"));
                }
                match s.k_signature {
                    Some((p, q)) => out.push_str(&format!("K = GL({p})×GL({q}), dim k = {}\n", s.dim_k)),
                    None => out.push_str(&format!("dim k = {}\n", s.dim_k)),
                }
                out.push_str(&format!("family: {} member(s), status {}\n", s.family.len(), s.status.label()));
                for m in &s.family {
                    out.push_str(&format!("  Levi nodes {:?} (adds {:?})\n", m.simple, m.added));
                }
                out
            });
            Ok(())
        }
        Cmd::Orbits { grading, mode } => {
            let g = grading_of(&grading)?;
            let (_, fam) = summarize(&g);
            let orbits = enumerate_l_orbits(&g).map_err(check)?;
            let em = EpsilonMap::default(&g, &fam, EpsMode::Truncated).map_err(check)?;
            let targets = Targets::build(&em, mode.into()).map_err(check)?;
            let dims: Vec<usize> = (0..targets.len())
                .map(|i| match &targets {
                    Targets::K(s) => s.orbits[i].dimension,
                    Targets::P { sizes, tables } => {
                        let w = tables[i].representative(sizes);
                        let j = SimpleSet::from_block_sizes(sizes);
                        orbitmatch::porbit::double_coset_max(&w, sizes).length() - Perm::longest_of_parabolic(w.n(), &j).length()
                    }
                })
                .collect();
            let v = serde_json::json!({
                "l_orbits": orbits.iter().map(|o| serde_json::json!({
                    "ranks": o.triangle.ranks, "dimension": o.dimension, "representative": o.representative,
                })).collect::<Vec<_>>(),
                "targets": (0..targets.len()).map(|i| serde_json::json!({
                    "label": targets.label(i), "dimension": dims[i], "signature": targets.signature(i),
                })).collect::<Vec<_>>(),
            });
            emit(cli.json, &v, || {
                let mut out = format!("{} L-orbit(s) on g(-1)\n", orbits.len());
                for (i, o) in orbits.iter().enumerate() {
                    out.push_str(&format!("  [{i}] ranks {:?} dim {}\n", o.triangle.ranks, o.dimension));
                }
                out.push_str(&format!("{} orbit(s) on G/P\n", targets.len()));
                for (i, d) in dims.iter().enumerate() {
                    out.push_str(&format!("  [{i}] {} dim {d}\n", targets.label(i)));
                }
                out
            });
            Ok(())
        }
        Cmd::Match { grading, ordering, mode, two_step } => {
            let g = grading_of(&grading)?;
            let (_, fam) = summarize(&g);
            let ord = match ordering.parse::<OrderingChoice>().map_err(Failure::Parse)? {
                OrderingChoice::Explicit(o) => o,
                _ => (0..fam.len()).collect(),
            };
            let orbits = enumerate_l_orbits(&g).map_err(check)?;
            let em = EpsilonMap::new(&g, &fam, &ord, mode_of(two_step)).map_err(check)?;
            let targets = Targets::build(&em, mode.into()).map_err(check)?;
            let r = verify_matching(&em, &targets, &orbits, cli.seed).map_err(check)?;
            emit(cli.json, &serde_json::to_value(&r).expect("json"), || {
                let mut out = format!("ordering {:?}, base orbit dim {}\n", r.ordering_id, r.base_dim);
                for m in &r.matches {
                    out.push_str(&format!(
                        "  orbit {} ranks {:?} dim {} -> {} dim {}\n",
                        m.orbit, m.orbit_ranks, m.orbit_dim, m.target_label, m.target_dim
                    ));
                }
                out.push_str(&format!(
                    "injective {} dimension law {} stabilizer law {}\n",
                    r.injective, r.dim_law, r.stabilizer_law
                ));
                out
            });
            if r.all_pass() {
                Ok(())
            } else {
                Err(Failure::Check(format!("matching checks failed: {:?}", r.failures)))
            }
        }
        Cmd::Kl { x, w, sizes, ty, rank, lambda, format } => {
            if let (Some(x), Some(w)) = (x, w) {
                let x: Perm = x.parse().map_err(|e| Failure::Parse(format!("{e:?}")))?;
                let w: Perm = w.parse().map_err(|e| Failure::Parse(format!("{e:?}")))?;
                let j = match sizes {
                    Some(s) => SimpleSet::from_block_sizes(
                        &s.split(',').map(|t| t.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|e| Failure::Parse(e.to_string()))?,
                    ),
                    None => SimpleSet::empty(),
                };
                let px = PermParam::new(x, j.clone()).map_err(|e| Failure::Parse(e.to_string()))?;
                let pw = PermParam::new(w, j).map_err(|e| Failure::Parse(e.to_string()))?;
                let p = parabolic_kl(&px, &pw).map_err(check)?;
                emit(cli.json, &serde_json::json!({ "poly": p, "text": p.to_string() }), || format!("{p}\n"));
                return Ok(());
            }
            let (Some(ty), Some(lambda)) = (ty, lambda) else {
                return Err(Failure::Parse("kl needs --x/--w or --type/--lambda".into()));
            };
            let g = build_grading(&ty, rank, &lambda)?;
            let (_, fam) = summarize(&g);
            let orbits = enumerate_l_orbits(&g).map_err(check)?;
            let em = EpsilonMap::default(&g, &fam, EpsMode::Truncated).map_err(check)?;
            let t = padic_table(&em, &orbits).map_err(check)?;
            match format {
                Format::Csv => print!("{}", t.to_csv()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&t.to_json()).expect("json")),
            }
            Ok(())
        }
        Cmd::Klv { p, q, block, format } => {
            if p + q > 6 {
                return Err(Failure::Parse("blocks are limited to p + q ≤ 6".into()));
            }
            let b = build_block(p, q);
            if block {
                println!("{}", serde_json::to_string_pretty(&b.to_json()).expect("json"));
                return Ok(());
            }
            let t = klv_polynomials(b, true).map_err(check)?.to_kl_table();
            match format {
                Format::Csv => print!("{}", t.to_csv()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&t.to_json()).expect("json")),
            }
            Ok(())
        }
        Cmd::Verify { grading, ordering, mode, two_step, out } => {
            let g = grading_of(&grading)?;
            let opts = VerifyOptions {
                ordering: ordering.parse().map_err(Failure::Parse)?,
                group: mode.into(),
                mode: mode_of(two_step),
                seed: cli.seed,
            };
            let r = verify(&g, &opts, &cache).map_err(|e| match e {
                VerifyError::BadOrdering(_) => Failure::Parse(e.to_string()),
                _ => check(e),
            })?;
            let v = serde_json::to_value(&r).expect("json");
            if let Some(path) = &out {
                write_json(path, &v)?;
            }
            emit(cli.json, &v, || {
                let mut s = format!("grading {}: {} orbit(s), {} ordering(s)\n", r.grading.key, r.orbit_dims.len(), r.runs.len());
                for run in &r.runs {
                    s.push_str(&format!("  ordering {:?}: {} pair(s), all equal {}\n", run.ordering, run.pairs.len(), run.all_equal));
                    for p in &run.pairs {
                        s.push_str(&format!("    ({}, {}) p-adic {} real {}\n", p.psi, p.gamma, p.padic, p.real));
                    }
                }
                s.push_str(&format!("all_equal {} matching {}\n", r.all_equal, r.matching_pass));
                s
            });
            if r.passed() {
                Ok(())
            } else {
                Err(Failure::Check(r.witness.unwrap_or_else(|| "verification failed".into())))
            }
        }
        Cmd::Sweep { max_n, budget_seconds, mode, two_step, out } => {
            if !(2..=6).contains(&max_n) {
                return Err(Failure::Parse("--max-n must be between 2 and 6".into()));
            }
            let s = sweep(max_n, mode.into(), mode_of(two_step), budget_seconds.map(Duration::from_secs), cli.seed, &cache);
            let v = serde_json::to_value(&s).expect("json");
            if let Some(path) = &out {
                write_json(path, &v)?;
            }
            emit(cli.json, &v, || {
                let mut t = format!(
                    "max-n {}: {} grading(s), {} nontrivial, {} passed, {} failed, {} skipped\n",
                    s.max_n, s.total, s.nontrivial, s.passed, s.failed, s.skipped
                );
                if s.budget_exhausted {
                    t.push_str("budget exhausted; partial results above\n");
                }
                for c in s.cases.iter().filter(|c| c.skipped.is_none() && !c.passed) {
                    t.push_str(&format!("  FAIL {:?}: {}\n", c.diag, c.error.clone().or(c.witness.clone()).unwrap_or_default()));
                }
                t
            });
            if s.failed == 0 {
                Ok(())
            } else {
                Err(Failure::Check(format!("{} grading(s) failed", s.failed)))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
