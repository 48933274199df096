//! `wchain`: queries, constructions and the verification sweep for weighted
//! chain metrics over finite fields.
//!
//! Reports go to stdout as JSON (or `--format table`). Exit status: 0 success,
//! 1 a check failed, 2 usage or validation error, 3 enumeration budget exceeded.

mod load;
mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use wchain::anticode::{self, ball, ball_size, build_optimal_anticode, diameter};
use wchain::codes::{self, construct_mds, construct_threshold_code, Code};
use wchain::formats::{parse_weight_values, CodeFile};
use wchain::oracle::{self, DEFAULT_CLIQUE_BUDGET};
use wchain::verify::{run_sweep, search_equality, SweepConfig};
use wchain::weights::validate_weight;
use wchain::{Error, FieldElement, Result, Space, DEFAULT_ENUMERATION_BUDGET};

use load::Setting;

#[derive(Parser)]
#[command(
    name = "wchain",
    version,
    about = "Weighted chain metrics over finite fields"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest number of vectors any single enumeration may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Weight tables on F_q.
    #[command(subcommand)]
    Weight(WeightCmd),
    /// Balls in the weighted poset metric.
    #[command(subcommand)]
    Ball(BallCmd),
    /// Optimal anticodes on the weighted chain.
    #[command(subcommand)]
    Anticode(AnticodeCmd),
    /// Codes on the weighted chain.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Run the verification sweep.
    Verify(VerifyArgs),
    /// Scan weights for equality in the diameter perfect criterion.
    SearchEquality(EqualityArgs),
}

#[derive(Args, Clone)]
struct WeightArgs {
    /// Field order: `9`, `3^2` or `q=3^2`.
    #[arg(long)]
    q: String,
    /// `hamming`, `lee`, or a JSON weight table.
    #[arg(long, default_value = "hamming")]
    weight: String,
}

#[derive(Args, Clone)]
struct SpaceArgs {
    #[command(flatten)]
    weight: WeightArgs,
    /// Dimension; taken from the poset file when one is given.
    #[arg(long)]
    n: Option<usize>,
    /// `chain`, `antichain`, or a JSON poset file. Chains given in another
    /// order are relabelled to the usual one.
    #[arg(long, default_value = "chain")]
    poset: String,
}

#[derive(Subcommand)]
enum WeightCmd {
    /// `M_w`, `m_w`, the image, `S_w` and the criterion levels.
    Stats(WeightArgs),
    /// Check the weight axioms; exits 1 when one fails.
    Validate(WeightArgs),
}

#[derive(Subcommand)]
enum BallCmd {
    /// Closed-form ball size on a chain.
    Size {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "D")]
        d: u32,
        /// Also count the ball by enumeration.
        #[arg(long)]
        check: bool,
    },
    /// List the ball around a center (any poset).
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "D")]
        d: u32,
        /// Comma-separated element indices; defaults to 0.
        #[arg(long, value_delimiter = ',')]
        center: Option<Vec<usize>>,
    },
}

#[derive(Subcommand)]
enum AnticodeCmd {
    /// Closed-form `A*(D)` and the shape of the optimal anticodes.
    Size {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "D")]
        d: u32,
        /// Also compute `A*(D)` by maximum clique; exits 1 on disagreement.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = DEFAULT_CLIQUE_BUDGET)]
        clique_budget: u64,
    },
    /// Build the optimal anticode around a center.
    Build {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "D")]
        d: u32,
        #[arg(long, value_delimiter = ',')]
        center: Option<Vec<usize>>,
        /// Member of `W_w(S)`, needed at or above the threshold.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
    },
    /// Decide whether a set (code file format) is an optimal anticode.
    Check {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "D")]
        d: u32,
        #[arg(long)]
        set: String,
        /// Cross-check `A*(D)` by maximum clique; exits 1 on disagreement.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = DEFAULT_CLIQUE_BUDGET)]
        clique_budget: u64,
    },
}

#[derive(Args, Clone)]
struct CodeFileArgs {
    /// JSON code file `{q, n, words}`.
    #[arg(long)]
    code: String,
    #[arg(long, default_value = "hamming")]
    weight: String,
    #[arg(long, default_value = "chain")]
    poset: String,
}

#[derive(Subcommand)]
enum CodeCmd {
    /// Minimum distances, packing radius and the MDS / perfect / diameter
    /// perfect verdicts.
    Report(CodeFileArgs),
    /// `{(x_y, y)}` with `x_y = 0`, or drawn at random with `--seed`.
    BuildMds {
        #[command(flatten)]
        space: SpaceArgs,
        /// Poset minimum distance `d(C)`.
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Threshold code for a criterion level `S` starting at position `R`.
    BuildThreshold {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long = "S")]
        s: u32,
        #[arg(long = "R")]
        r: usize,
    },
    /// Compare the closed forms for a code with exhaustive computation;
    /// exits 1 on disagreement.
    Check(CodeFileArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON sweep configuration; missing fields take their defaults.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run only this check (repeatable).
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Extra weight table file to include in the sweep (repeatable).
    #[arg(long = "weight")]
    weights: Vec<String>,
}

#[derive(Args)]
struct EqualityArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,8,9")]
    fields: Vec<usize>,
    /// Largest weight value scanned.
    #[arg(long, default_value_t = 4)]
    max_value: u32,
    /// Dimension of the threshold codes built for each hit.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_CLIQUE_BUDGET)]
    clique_budget: u64,
}

/// A report and whether every check it carries passed.
struct Outcome {
    value: Value,
    ok: bool,
    sweep: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome {
            value,
            ok: true,
            sweep: false,
        }
    }

    fn checked(value: Value, ok: bool) -> Self {
        Outcome {
            value,
            ok,
            sweep: false,
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn setting(args: &SpaceArgs) -> Result<Setting> {
    let field = load::field(&args.weight.q)?;
    let w = load::weight(&field, &args.weight.weight)?;
    let p = load::poset(&args.poset, args.n)?;
    Setting::new(p, w)
}

fn code_setting(args: &CodeFileArgs) -> Result<(Setting, Code)> {
    let file = load::code_file(&args.code)?;
    let field = wchain::FieldSpec::new(file.q)?;
    let w = load::weight(&field, &args.weight)?;
    let p = load::poset(&args.poset, Some(file.n))?;
    let s = Setting::new(p, w)?;
    let words = s.code_words(&file)?;
    let code = Code::new(s.metric.clone(), words)?;
    Ok((s, code))
}

fn elements(s: &Setting, idx: &[usize]) -> Result<Vec<FieldElement>> {
    idx.iter().map(|&i| s.metric.field().element(i)).collect()
}

fn words_json(s: &Setting, words: &[wchain::Vector]) -> Value {
    to_json(&CodeFile::from_vectors(s.metric.space(), words).words)
}

fn weight_cmd(cmd: &WeightCmd) -> Result<Outcome> {
    match cmd {
        WeightCmd::Stats(a) => {
            let field = load::field(&a.q)?;
            let w = load::weight(&field, &a.weight)?;
            Ok(Outcome::ok(json!({
                "q": field.q(),
                "field": field.to_string(),
                "weight": w.values(),
                "stats": w.stats(),
                "scaled_hamming": w.is_scaled_hamming(),
                "criterion_levels": codes::criterion_levels(&w),
            })))
        }
        WeightCmd::Validate(a) => {
            let field = load::field(&a.q)?;
            let values = match a.weight.as_str() {
                "hamming" | "lee" => load::weight(&field, &a.weight)?.values().to_vec(),
                path => parse_weight_values(&load::read(path)?)?,
            };
            let violations = validate_weight(&field, &values)?;
            let ok = violations.is_empty();
            Ok(Outcome::checked(
                json!({
                    "q": field.q(),
                    "weight": values,
                    "valid": ok,
                    "violations": violations,
                    "messages": violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
                }),
                ok,
            ))
        }
    }
}

fn ball_cmd(cmd: &BallCmd, budget: u64) -> Result<Outcome> {
    match cmd {
        BallCmd::Size { space, d, check } => {
            let s = setting(space)?;
            if !s.metric.is_usual_chain() {
                return Err(Error::NotChain);
            }
            let b = ball_size(s.metric.weight(), s.metric.n(), *d)?;
            let mut v = json!({ "setting": s.info(), "D": d, "ball": b });
            let mut ok = true;
            if *check {
                let brute = oracle::brute_ball_size(&s.metric, *d, budget)?;
                ok = brute == b.size;
                v["enumerated"] = json!(brute);
            }
            Ok(Outcome::checked(v, ok))
        }
        BallCmd::Enumerate { space, d, center } => {
            let s = setting(space)?;
            let c = s.vector_or_zero(center.as_deref())?;
            let vs = ball(&s.metric, &c, *d, budget)?;
            Ok(Outcome::ok(json!({
                "setting": s.info(),
                "D": d,
                "center": c,
                "size": vs.len(),
                "diameter": diameter(&s.metric, &vs)?,
                "vectors": words_json(&s, &vs),
            })))
        }
    }
}

fn clique_cross_check(
    s: &Setting,
    d: u32,
    a_star: u64,
    clique_budget: u64,
) -> Result<(Value, bool)> {
    match oracle::brute_a_star(&s.metric, d, clique_budget) {
        Ok(brute) => Ok((json!(brute), brute == a_star)),
        Err(Error::BudgetExceeded { .. }) => Ok((Value::Null, true)),
        Err(e) => Err(e),
    }
}

fn anticode_cmd(cmd: &AnticodeCmd, budget: u64) -> Result<Outcome> {
    match cmd {
        AnticodeCmd::Size {
            space,
            d,
            check,
            clique_budget,
        } => {
            let s = setting(space)?;
            if !s.metric.is_usual_chain() {
                return Err(Error::NotChain);
            }
            let r = anticode::optimal_anticode_size(s.metric.weight(), s.metric.n(), *d)?;
            let mut v = json!({ "setting": s.info(), "anticode": r });
            let mut ok = true;
            if *check {
                let (brute, agree) = clique_cross_check(&s, *d, r.a_star, *clique_budget)?;
                v["clique_a_star"] = brute;
                ok = agree;
            }
            Ok(Outcome::checked(v, ok))
        }
        AnticodeCmd::Build {
            space,
            d,
            center,
            k,
        } => {
            let s = setting(space)?;
            let c = s.vector_or_zero(center.as_deref())?;
            let k = k.as_deref().map(|k| elements(&s, k)).transpose()?;
            let set = build_optimal_anticode(&s.metric, &c, *d, k.as_deref(), budget)?;
            let r = anticode::optimal_anticode_size(s.metric.weight(), s.metric.n(), *d)?;
            Ok(Outcome::ok(json!({
                "setting": s.info(),
                "D": d,
                "a_star": r.a_star,
                "size": set.len(),
                "diameter": diameter(&s.metric, &set)?,
                "words": words_json(&s, &set),
            })))
        }
        AnticodeCmd::Check {
            space,
            d,
            set,
            check,
            clique_budget,
        } => {
            let s = setting(space)?;
            let file = load::code_file(set)?;
            let words = s.code_words(&file)?;
            let c = anticode::is_optimal_anticode(&s.metric, &words, *d, budget)?;
            let mut v = json!({ "setting": s.info(), "D": d, "check": c });
            let mut ok = true;
            if *check {
                let (brute, agree) = clique_cross_check(&s, *d, c.a_star, *clique_budget)?;
                v["clique_a_star"] = brute;
                ok = agree;
            }
            Ok(Outcome::checked(v, ok))
        }
    }
}

fn random_assign(space: &Space, d: usize, seed: u64) -> Result<Vec<Vec<FieldElement>>> {
    let q = space.field().q();
    let count = space.size().ok_or(Error::Overflow("q^n"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..d - 1)
                .map(|_| space.field().element(rng.gen_range(0..q)))
                .collect()
        })
        .collect()
}

fn code_cmd(cmd: &CodeCmd, budget: u64) -> Result<Outcome> {
    match cmd {
        CodeCmd::Report(a) => {
            let (s, code) = code_setting(a)?;
            Ok(Outcome::ok(json!({
                "setting": s.info(),
                "report": code.report(budget)?,
                "mds": code.is_mds()?,
                "diameter_perfect": code.is_diameter_perfect()?,
            })))
        }
        CodeCmd::BuildMds { space, d, seed } => {
            let s = setting(space)?;
            let n = s.metric.n();
            if *d == 0 || *d > n {
                return Err(Error::Domain(format!("need 1 <= d <= n = {n}, got {d}")));
            }
            let tail = Space::new(s.metric.field().clone(), n - d + 1)?;
            tail.size_within(budget)?;
            let table = match seed {
                Some(seed) => Some(random_assign(&tail, *d, *seed)?),
                None => None,
            };
            let assign = |y: &wchain::Vector| match &table {
                Some(t) => wchain::Vector::new(t[tail.rank(y) as usize].clone()),
                None => wchain::Vector::new(vec![FieldElement::ZERO; d - 1]),
            };
            let code = construct_mds(&s.metric, *d, assign, budget)?;
            Ok(Outcome::ok(json!({
                "setting": s.info(),
                "report": code.report(budget)?,
                "code": CodeFile::from_vectors(s.metric.space(), code.words()),
            })))
        }
        CodeCmd::BuildThreshold { space, s: level, r } => {
            let s = setting(space)?;
            let criterion = codes::diameter_perfect_criterion(s.metric.weight(), *level)?;
            let code = construct_threshold_code(&s.metric, *level, *r, budget)?;
            Ok(Outcome::ok(json!({
                "setting": s.info(),
                "criterion": criterion,
                "report": code.report(budget)?,
                "diameter_perfect": code.is_diameter_perfect()?,
                "code": CodeFile::from_vectors(s.metric.space(), code.words()),
            })))
        }
        CodeCmd::Check(a) => {
            let (s, code) = code_setting(a)?;
            let report = code.report(budget)?;
            let mut checks = serde_json::Map::new();
            if code.len() >= 2 {
                let brute_d = oracle::brute_min_distance(&s.metric, code.words())?;
                checks.insert(
                    "minimum_distance".into(),
                    json!(brute_d == report.d_weighted),
                );
                let brute_r = oracle::brute_packing_radius(&s.metric, code.words(), budget)?;
                checks.insert(
                    "packing_radius".into(),
                    json!(brute_r == report.packing_radius),
                );
                checks.insert("brute_packing_radius".into(), json!(brute_r));
            }
            let mds_ok = report.mds == report.perfect;
            checks.insert("mds_iff_perfect".into(), json!(mds_ok));
            let ok = checks.values().all(|v| v.as_bool() != Some(false));
            Ok(Outcome::checked(
                json!({ "setting": s.info(), "report": report, "checks": checks }),
                ok,
            ))
        }
    }
}

fn verify_cmd(a: &VerifyArgs) -> Result<Outcome> {
    let mut cfg: SweepConfig = match &a.config {
        Some(path) => serde_json::from_str(&load::read(path)?)
            .map_err(|e| Error::Validation(format!("{path}: {e}")))?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    cfg.checks.extend(a.checks.iter().cloned());
    for path in &a.weights {
        cfg.extra_weights
            .push(parse_weight_values(&load::read(path)?)?);
    }
    let report = run_sweep(&cfg)?;
    Ok(Outcome {
        ok: report.passed,
        value: to_json(&report),
        sweep: true,
    })
}

fn equality_cmd(a: &EqualityArgs) -> Result<Outcome> {
    let hunt = search_equality(&a.fields, a.max_value, a.n, a.clique_budget)?;
    let codes_ok = hunt
        .instances
        .iter()
        .flat_map(|i| &i.codes)
        .all(|c| c.diameter_perfect && c.brute_diameter_perfect != Some(false));
    let ok = hunt.violations.is_empty() && codes_ok;
    Ok(Outcome::checked(to_json(&hunt), ok))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Weight(c) => weight_cmd(c),
        Command::Ball(c) => ball_cmd(c, cli.budget),
        Command::Anticode(c) => anticode_cmd(c, cli.budget),
        Command::Code(c) => code_cmd(c, cli.budget),
        Command::Verify(a) => verify_cmd(a),
        Command::SearchEquality(a) => equality_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.value).expect("json") + "\n",
                Format::Table if out.sweep => render::sweep(&out.value),
                Format::Table => render::table(&out.value),
            };
            print!("{text}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
