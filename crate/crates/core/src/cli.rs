//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{self, BoundReport, Status};
use crate::coxeter::{self, Family};
use crate::exact::{double_factorial, factorial, parse_rat, rat_string};
use crate::gap::{self, GapParams, StepStatus};
use crate::group::{self, BallProfile, GroupModel, GroupSpec};
use crate::heat;
use crate::nilpotent::{self, RankVector};
use crate::tower::{Expr, TowerReal, DEFAULT_PREC, MAX_PREC};
use crate::words::{self, Word};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_BUDGET: usize = 10_000_000;
pub const PRECISION_ENV: &str = "GROWTHLAB_PRECISION";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "growthlab", version, about = "Exact growth, bounds and tower-interval certification for finitely generated groups")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Mantissa precision in bits (overrides GROWTHLAB_PRECISION).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Maximum number of enumerated elements.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Constant C in the effective degree bound.
    #[arg(long = "C", global = true, default_value_t = bounds::DEFAULT_C)]
    c: u64,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    /// Built-in group: builtin:zd:<d>, builtin:heisenberg, builtin:ut:<n>, builtin:cyclic:<k>, builtin:dinf.
    #[arg(long)]
    group: Option<String>,
    /// JSON group-spec file.
    #[arg(long)]
    group_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ball sizes s_0..s_R.
    Ball {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 10)]
        radius: usize,
    },
    /// Check a measured profile against the lower bounds and growth criteria.
    VerifyGrowth {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 10)]
        radius: usize,
        /// Growth degree d (inferred for built-in groups).
        #[arg(long)]
        degree: Option<u64>,
        /// Hirsch length h, enabling the virtually nilpotent bound.
        #[arg(long)]
        hirsch: Option<u64>,
        /// Comma-separated subset of nilp,vnilp,deg,vt.
        #[arg(long, default_value = "nilp,vnilp,deg,vt")]
        bounds: String,
    },
    /// Growth series and constants of affine Coxeter groups.
    Coxeter {
        /// Btilde, Gtilde2, Etilde6, Etilde7 or Etilde8.
        #[arg(long)]
        family: Option<String>,
        /// Rank, for Btilde.
        #[arg(long)]
        rank: Option<usize>,
        /// Print the exact asymptotic constant.
        #[arg(long)]
        limit: bool,
        /// Print the cumulative series up to this degree.
        #[arg(long)]
        series: Option<usize>,
        /// Print the mg(d) window for this d.
        #[arg(long)]
        mg: Option<usize>,
    },
    /// Evaluate a named constant.
    Constants {
        #[command(subcommand)]
        which: ConstantCmd,
    },
    /// Exact return probabilities of the lazy walk and their bounds.
    Heat {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        degree: Option<u64>,
        /// Growth constant: `measured`, `epsilon`, or a rational such as `1/2`.
        #[arg(long, default_value = "measured")]
        growth_constant: String,
    },
    /// Certify the percolation-gap constant chain.
    Gap {
        #[arg(long, default_value_t = 3)]
        r: u64,
        #[arg(long = "C0", default_value_t = 4000)]
        c0: u64,
        /// Index n (default 16!).
        #[arg(long)]
        index: Option<String>,
    },
    /// Vertex boundary of a ball, with isoperimetric bounds.
    Boundary {
        #[command(flatten)]
        group: GroupArgs,
        /// A is the ball of this radius.
        #[arg(long, default_value_t = 1)]
        ball: usize,
        #[arg(long)]
        degree: Option<u64>,
        /// Growth constant for the isoperimetric forms, as a rational.
        #[arg(long, default_value = "1")]
        growth_constant: String,
    },
    /// Simple commutators, word evaluation and commutator identities.
    Words {
        /// Weight of the simple commutator.
        #[arg(long)]
        k: Option<usize>,
        /// A word such as "x1 X2 x1".
        #[arg(long)]
        word: Option<String>,
        #[command(flatten)]
        group: GroupArgs,
        /// Exponents for the multilinearity identity, e.g. "2,3".
        #[arg(long, allow_hyphen_values = true)]
        multilinear: Option<String>,
        /// Number of random multilinearity trials (exponents in [-5, 5]).
        #[arg(long)]
        random: Option<usize>,
        /// Power k for the commutator-power identity.
        #[arg(long)]
        power: Option<u64>,
        /// Digit base L for the commutator-power identity.
        #[arg(long)]
        base: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
enum ConstantCmd {
    /// (2k)!
    Minkowski {
        #[arg(long)]
        k: u64,
    },
    /// n^d / 2^{d^2}
    Nilp {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
    /// n^d / (2^{d(d+2)} ((2h)!)^d)
    Vnilp {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        n: u64,
    },
    /// n^d / 2^{floor(7d/4)^2}
    Deg {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
    /// n^d / (2^{d(d+2)} ((2d)!)^{d+1})
    Vt {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
    },
    /// epsilon_d and its branch.
    Epsilon {
        #[arg(long)]
        d: u64,
    },
    /// Return-probability upper bound.
    ReturnProb {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        t: u64,
        /// `epsilon` or a rational.
        #[arg(long, default_value = "epsilon")]
        growth_constant: String,
    },
    /// Isoperimetric lower bounds for |A| = a.
    Iso {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value = "1")]
        growth_constant: String,
    },
    /// 5131 Delta^{5/2} / epsilon_5.
    LoopErased {
        #[arg(long)]
        delta: u64,
    },
    /// lambda(k) = 3 2^{k-1} - 2.
    Lambda {
        #[arg(long)]
        k: u32,
    },
    /// Degree, Hirsch length and checks for a rank vector such as "2,1".
    Ranks {
        #[arg(long, allow_hyphen_values = true)]
        ranks: String,
        #[arg(long)]
        noncyclic: bool,
    },
    /// Largest class with c(c+1) <= 2d-2.
    MaxClass {
        #[arg(long)]
        d: u64,
    },
}

/// Resolved run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub c: u64,
    pub precision: u32,
    pub budget: usize,
    pub format: Format,
    pub seed: u64,
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<Outcome, InputError>;

/// What a subcommand produced.
struct Outcome {
    json: Value,
    text: String,
    csv: String,
    exit: i32,
}

fn exit_from_statuses<I: IntoIterator<Item = Status>>(it: I) -> i32 {
    let mut code = EXIT_OK;
    for s in it {
        match s {
            Status::Violated => return EXIT_FALSE,
            Status::Undecided => code = EXIT_UNDECIDED,
            Status::Satisfied => {}
        }
    }
    code
}

fn resolve_precision(flag: Option<u32>) -> Result<u32, InputError> {
    let p = match flag {
        Some(p) => p,
        None => match std::env::var(PRECISION_ENV) {
            Ok(v) => v.trim().parse::<u32>().map_err(|_| InputError(format!("{PRECISION_ENV}=`{v}` is not a bit count")))?,
            Err(_) => DEFAULT_PREC,
        },
    };
    if p == 0 || p > MAX_PREC {
        return Err(InputError(format!("precision must be in 1..={MAX_PREC}")));
    }
    Ok(p.max(64))
}

fn load_group(a: &GroupArgs) -> Result<(GroupSpec, String), InputError> {
    match (&a.group, &a.group_file) {
        (Some(name), None) => Ok((group::builtin_spec(name)?, name.clone())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            let spec: GroupSpec = serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
            Ok((spec, path.display().to_string()))
        }
        (Some(_), Some(_)) => Err(InputError("give either --group or --group-file, not both".into())),
        (None, None) => Err(InputError("missing --group or --group-file".into())),
    }
}

fn build(a: &GroupArgs) -> Result<(GroupModel, GroupSpec, String), InputError> {
    let (spec, name) = load_group(a)?;
    let g = group::build_group(&spec)?;
    Ok((g, spec, name))
}

/// Growth degree of the standard built-in families.
fn known_degree(spec: &GroupSpec) -> Option<u64> {
    match spec {
        GroupSpec::FreeAbelian { rank } => Some(*rank as u64),
        GroupSpec::FiniteCyclic { .. } => Some(0),
        GroupSpec::DirectProduct { factors } => factors.iter().map(known_degree).sum(),
        GroupSpec::IntegerMatrixGroup { .. } => {
            if *spec == group::infinite_dihedral_spec() {
                return Some(1);
            }
            (2..=12).find(|&n| *spec == group::unitriangular_spec(n)).map(|n| {
                let n = n as u64;
                (1..n).map(|i| i * (n - i)).sum()
            })
        }
    }
}

/// Hirsch length of the standard built-in families.
fn known_hirsch(spec: &GroupSpec) -> Option<u64> {
    match spec {
        GroupSpec::FreeAbelian { rank } => Some(*rank as u64),
        GroupSpec::FiniteCyclic { .. } => Some(0),
        GroupSpec::DirectProduct { factors } => factors.iter().map(known_hirsch).sum(),
        GroupSpec::IntegerMatrixGroup { .. } => {
            if *spec == group::infinite_dihedral_spec() {
                return Some(1);
            }
            (2..=12).find(|&n| *spec == group::unitriangular_spec(n)).map(|n| (n * (n - 1) / 2) as u64)
        }
    }
}

fn parse_positive_rat(s: &str) -> Result<BigRational, InputError> {
    let r = parse_rat(s)
        .or_else(|| crate::tower::parse_decimal(s).ok())
        .ok_or_else(|| InputError(format!("`{s}` is not a rational")))?;
    if r <= BigRational::from_integer(0.into()) {
        return Err(InputError(format!("`{s}` must be positive")));
    }
    Ok(r)
}

fn tower_text(t: &Option<TowerReal>) -> String {
    t.as_ref().map(|t| t.to_string()).unwrap_or_else(|| "unrepresentable".into())
}

fn reports_text(reports: &[BoundReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s.push_str(&format!(
            "{:<14} {:<28} bound={} measured={} {:?}\n",
            r.name,
            params.join(" "),
            r.bound,
            r.measured.as_deref().unwrap_or("-"),
            r.status
        ));
    }
    s
}

fn reports_csv(reports: &[BoundReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        s.push_str(&format!(
            "{},{},{},{},{:?}\n",
            r.name,
            params.join(";"),
            r.bound,
            r.measured.as_deref().unwrap_or(""),
            r.status
        ));
    }
    s
}

fn cmd_ball(cfg: &RunConfig, ga: &GroupArgs, radius: usize) -> CmdResult {
    let (g, _, name) = build(ga)?;
    let p = group::ball_profile(&g, radius, cfg.budget)?;
    let w = p.s(p.radius).to_string().len().max(3);
    let mut text = format!("group {name}, valency {}\n{:>4} {:>w$} {:>w$}\n", g.valency(), "n", "s_n", "a_n");
    let mut csv = String::new();
    for n in 0..=p.radius {
        text.push_str(&format!("{n:>4} {:>w$} {:>w$}\n", p.s(n), if n == 0 { 1 } else { p.a(n) }));
        csv.push_str(&format!("{n},{}\n", p.s(n)));
    }
    if p.exhausted {
        text.push_str("group exhausted\n");
    }
    let json = json!({ "group": name, "valency": g.valency(), "profile": p });
    Ok(Outcome { json, text, csv, exit: EXIT_OK })
}

fn cmd_verify(
    cfg: &RunConfig,
    ga: &GroupArgs,
    radius: usize,
    degree: Option<u64>,
    hirsch: Option<u64>,
    which: &str,
) -> CmdResult {
    let (g, spec, name) = build(ga)?;
    let p = group::ball_profile(&g, radius, cfg.budget)?;
    let d = degree.or_else(|| known_degree(&spec));
    let h = hirsch.or_else(|| known_hirsch(&spec));
    let mut reports = Vec::new();
    for b in which.split(',').map(str::trim).filter(|b| !b.is_empty()) {
        let Some(d) = d else {
            return Err(InputError(format!("bound `{b}` needs --degree")));
        };
        let dp = ("d", d.to_string());
        match b {
            "nilp" => reports.extend(bounds::check_lower_bound("nilp", &p, &[dp], |n| bounds::nilp_lower_bound(d, n))),
            "vnilp" => {
                let h = h.ok_or_else(|| InputError("vnilp needs --hirsch".into()))?;
                reports.extend(bounds::check_lower_bound("vnilp", &p, &[dp, ("h", h.to_string())], |n| {
                    bounds::vnilp_lower_bound(d, h, n)
                }))
            }
            "deg" => reports.extend(bounds::check_lower_bound("deg", &p, &[dp], |n| bounds::deg_at_least_bound(d, n))),
            "vt" => reports.extend(bounds::check_lower_bound("vt", &p, &[dp], |n| bounds::vt_lower_bound(d, n))),
            other => return Err(InputError(format!("unknown bound `{other}`"))),
        }
    }
    // Balls of a symmetric generating set are submultiplicative.
    for m in 1..=p.radius {
        for n in m..=p.radius - m {
            let ok = p.s(m + n) as u128 <= p.s(m) as u128 * p.s(n) as u128;
            reports.push(BoundReport::new(
                "submultiplicative",
                &[("m", m.to_string()), ("n", n.to_string())],
                (p.s(m) as u128 * p.s(n) as u128).to_string(),
                Some(p.s(m + n).to_string()),
                if ok { Status::Satisfied } else { Status::Violated },
            ));
        }
    }
    let linear = bounds::linear_growth_criterion(&p);
    let flags = bounds::finiteness_flags(&p);
    let exit = exit_from_statuses(reports.iter().map(|r| r.status));
    let mut text = format!("group {name}, radius {}\n", p.radius);
    text.push_str(&reports_text(&reports));
    match linear {
        Some((n, idx)) => text.push_str(&format!("linear growth criterion: a_{n} = {idx} <= {n}, cyclic subgroup of index <= {idx}\n")),
        None => text.push_str("linear growth criterion: not triggered\n"),
    }
    text.push_str(&format!("finite flags at n = {:?}\nvirtually cyclic window at n = {:?}\n", flags.finite_at, flags.virtually_cyclic_at));
    let json = json!({
        "group": name,
        "degree": d,
        "hirsch": h,
        "profile": p,
        "reports": reports,
        "linear_growth": linear.map(|(n, idx)| json!({ "n": n, "index_bound": idx })),
        "finiteness": flags,
    });
    Ok(Outcome { json, csv: reports_csv(&reports), text, exit })
}

fn family_from_args(family: &Option<String>, rank: Option<usize>) -> Result<Family, InputError> {
    let f = family.as_deref().ok_or_else(|| InputError("missing --family".into()))?;
    if f.eq_ignore_ascii_case("btilde") || f.eq_ignore_ascii_case("b") {
        let d = rank.ok_or_else(|| InputError("Btilde needs --rank".into()))?;
        if d < 2 {
            return Err(InputError("Btilde needs rank >= 2".into()));
        }
        return Ok(Family::Btilde(d));
    }
    let fam: Family = f.parse()?;
    if let Some(r) = rank {
        if r != fam.rank() {
            return Err(InputError(format!("{fam} has rank {}, not {r}", fam.rank())));
        }
    }
    Ok(fam)
}

fn cmd_coxeter(
    cfg: &RunConfig,
    family: &Option<String>,
    rank: Option<usize>,
    limit: bool,
    series: Option<usize>,
    mg: Option<usize>,
) -> CmdResult {
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    let mut csv = String::new();
    let mut exit = EXIT_OK;
    if family.is_some() {
        let fam = family_from_args(family, rank)?;
        let datum = coxeter::builtin_family(fam);
        json.insert("datum".into(), serde_json::to_value(&datum)?);
        text.push_str(&format!("{} exponents {:?}\n", datum.name, datum.exponents));
        if limit || series.is_none() {
            let c = coxeter::asymptotic_constant(&datum);
            let d = datum.rank as u64;
            let scaled = &c * BigRational::from_integer(factorial(d));
            let form = match fam {
                Family::Btilde(d) => {
                    let r = BigRational::new(double_factorial(2 * d as u64), double_factorial(2 * d as u64 - 1));
                    format!("(1/{d}!)*({}!!/{}!!) = (1/{d}!)*{}", 2 * d, 2 * d - 1, rat_string(&r))
                }
                _ => format!("({})/{d}!", rat_string(&scaled)),
            };
            text.push_str(&format!("limit = {} = {form}\n", rat_string(&c)));
            csv.push_str(&format!("limit,{}\n", rat_string(&c)));
            json.insert("limit".into(), json!(rat_string(&c)));
            json.insert("limit_times_factorial".into(), json!(rat_string(&scaled)));
            json.insert("limit_form".into(), json!(form));
        }
        if let Some(n) = series {
            let s = coxeter::bott_cumulative_series(&datum, n);
            for (i, v) in s.coefficients.iter().enumerate() {
                text.push_str(&format!("{i} {v}\n"));
                csv.push_str(&format!("{i},{v}\n"));
            }
            json.insert("series".into(), serde_json::to_value(&s)?);
        }
    }
    if let Some(d) = mg {
        if d == 0 {
            return Err(InputError("--mg needs d >= 1".into()));
        }
        let w = coxeter::mg_window(d, cfg.c);
        text.push_str(&format!(
            "mg({d}) in [{}, {}] (upper from {}), lower {:?} upper\n",
            tower_text(&w.lower.value),
            rat_string(&w.upper),
            w.upper_source,
            w.ordered
        ));
        csv.push_str(&format!("mg,{d},{},{}\n", tower_text(&w.lower.value), rat_string(&w.upper)));
        exit = match w.ordered {
            crate::tower::Cmp::Less => EXIT_OK,
            crate::tower::Cmp::Undecided => EXIT_UNDECIDED,
            _ => EXIT_FALSE,
        };
        json.insert("mg_window".into(), serde_json::to_value(&w)?);
    }
    if family.is_none() && mg.is_none() {
        return Err(InputError("coxeter needs --family or --mg".into()));
    }
    Ok(Outcome { json: Value::Object(json), text, csv, exit })
}

fn growth_constant_expr(s: &str, d: u64, c: u64) -> Result<(Expr, String), InputError> {
    if s == "epsilon" {
        let r = bounds::epsilon_d(d, c);
        let e = bounds::epsilon_expr(d, c, bounds::EpsBranch::Min, r.branch);
        return Ok((e, format!("epsilon_{d}(C={c})")));
    }
    let r = parse_positive_rat(s)?;
    Ok((Expr::Rat(r.clone()), rat_string(&r)))
}

fn cmd_constants(cfg: &RunConfig, which: &ConstantCmd) -> CmdResult {
    let prec = cfg.precision;
    let rat = |name: &str, params: Value, v: BigRational| {
        let s = rat_string(&v);
        Outcome {
            json: json!({ "name": name, "params": params, "value": s, "decimal": bounds::approx(&v) }),
            text: format!("{name} = {s} ~ {}\n", bounds::approx(&v)),
            csv: format!("{name},{s}\n"),
            exit: EXIT_OK,
        }
    };
    Ok(match which {
        ConstantCmd::Minkowski { k } => {
            let v = bounds::minkowski_bound(*k);
            Outcome {
                json: json!({ "name": "minkowski", "params": { "k": k }, "value": v.to_string() }),
                text: format!("(2k)! = {v}\n"),
                csv: format!("minkowski,{v}\n"),
                exit: EXIT_OK,
            }
        }
        ConstantCmd::Nilp { d, n } => rat("nilp", json!({ "d": d, "n": n }), bounds::nilp_lower_bound(*d, *n)),
        ConstantCmd::Vnilp { d, h, n } => rat("vnilp", json!({ "d": d, "h": h, "n": n }), bounds::vnilp_lower_bound(*d, *h, *n)),
        ConstantCmd::Deg { d, n } => rat("deg", json!({ "d": d, "n": n }), bounds::deg_at_least_bound(*d, *n)),
        ConstantCmd::Vt { d, n } => rat("vt", json!({ "d": d, "n": n }), bounds::vt_lower_bound(*d, *n)),
        ConstantCmd::Epsilon { d } => {
            if *d == 0 {
                return Err(InputError("d must be positive".into()));
            }
            let r = bounds::epsilon_d(*d, cfg.c);
            let exit = if r.branch == bounds::BranchChoice::Undecided { EXIT_UNDECIDED } else { EXIT_OK };
            Outcome {
                text: format!(
                    "epsilon_{d}(C={}) = {}\n  first  = {}\n  second = {}\n  branch = {:?}\n",
                    cfg.c,
                    tower_text(&r.value),
                    tower_text(&r.first),
                    tower_text(&r.second),
                    r.branch
                ),
                csv: format!("epsilon,{d},{},{:?},{}\n", cfg.c, r.branch, tower_text(&r.value)),
                json: serde_json::to_value(&r)?,
                exit,
            }
        }
        ConstantCmd::ReturnProb { d, delta, t, growth_constant } => {
            let (c, label) = growth_constant_expr(growth_constant, *d, cfg.c)?;
            let v = bounds::return_prob_bound(*d, *delta, *t, c).eval(prec).ok();
            Outcome {
                json: json!({ "name": "return_prob", "params": { "d": d, "delta": delta, "t": t, "c": label }, "value": v }),
                text: format!("p_t(o,o) <= {}\n", tower_text(&v)),
                csv: format!("return_prob,{}\n", tower_text(&v)),
                exit: if v.is_some() { EXIT_OK } else { EXIT_UNDECIDED },
            }
        }
        ConstantCmd::Iso { d, a, growth_constant } => {
            let c = parse_positive_rat(growth_constant)?;
            if *d == 0 || *a == 0 {
                return Err(InputError("d and a must be positive".into()));
            }
            let b = bounds::iso_bounds(*d, *a, &c);
            Outcome {
                text: format!("|dA| >= {} (= {}), |dA| >= {} (power form, lower)\n", b.csc, bounds::approx(&b.csc_value), b.power_lower),
                csv: format!("iso,{},{}\n", b.csc, b.power_lower),
                json: serde_json::to_value(&b)?,
                exit: EXIT_OK,
            }
        }
        ConstantCmd::LoopErased { delta } => {
            let r = bounds::epsilon_d(5, cfg.c);
            let eps = bounds::epsilon_expr(5, cfg.c, bounds::EpsBranch::Min, r.branch);
            let v = heat::loop_erased_constant(*delta, eps).eval(prec).ok();
            Outcome {
                json: json!({ "name": "loop_erased", "params": { "delta": delta, "C": cfg.c }, "value": v }),
                text: format!("5131 Delta^(5/2) / epsilon_5 = {}\n", tower_text(&v)),
                csv: format!("loop_erased,{}\n", tower_text(&v)),
                exit: if v.is_some() { EXIT_OK } else { EXIT_UNDECIDED },
            }
        }
        ConstantCmd::Lambda { k } => {
            if *k == 0 {
                return Err(InputError("k must be positive".into()));
            }
            let v = words::lambda(*k);
            Outcome {
                json: json!({ "name": "lambda", "params": { "k": k }, "value": v.to_string() }),
                text: format!("lambda({k}) = {v}\n"),
                csv: format!("lambda,{k},{v}\n"),
                exit: EXIT_OK,
            }
        }
        ConstantCmd::Ranks { ranks, noncyclic } => {
            let rv: RankVector = ranks.parse()?;
            let d = nilpotent::bass_guivarch(&rv);
            let h = nilpotent::hirsch(&rv);
            let report = nilpotent::validate_torsion_free(&rv, *noncyclic);
            let sandwich = nilpotent::sandwich_holds(&rv);
            let mut text = format!("degree {d}, Hirsch length {h}, class {}, h <= d <= hc: {sandwich}\n", rv.class());
            for v in &report.violations {
                text.push_str(&format!("violation: {v}\n"));
            }
            Outcome {
                json: json!({ "ranks": rv, "degree": d, "hirsch": h, "class": rv.class(), "sandwich": sandwich, "torsion_free": report }),
                csv: format!("ranks,{d},{h},{}\n", report.valid),
                text,
                exit: if report.valid && sandwich { EXIT_OK } else { EXIT_FALSE },
            }
        }
        ConstantCmd::MaxClass { d } => {
            let c = nilpotent::max_class(*d)?;
            Outcome {
                json: json!({ "name": "max_class", "params": { "d": d }, "value": c }),
                text: format!("class <= {c}\n"),
                csv: format!("max_class,{d},{c}\n"),
                exit: EXIT_OK,
            }
        }
    })
}

fn bound_decimal(r: &BoundReport) -> String {
    r.bound.clone()
}

fn cmd_heat(cfg: &RunConfig, ga: &GroupArgs, steps: usize, degree: Option<u64>, gc: &str) -> CmdResult {
    let (g, spec, name) = build(ga)?;
    let run = heat::run_walk(&g, steps, cfg.budget)?;
    let profile = group::ball_profile(&g, steps, cfg.budget)?;
    let d = degree.or_else(|| known_degree(&spec)).unwrap_or(0);
    let mass_ok = heat::mass_is_one(&run);
    let mono = heat::is_nonincreasing(&run.series);
    let mut reports = vec![
        BoundReport::new("mass", &[], "1".into(), None, if mass_ok { Status::Satisfied } else { Status::Violated }),
        BoundReport::new("monotone", &[], "p_{t+1} <= p_t".into(), None, if mono { Status::Satisfied } else { Status::Violated }),
    ];
    let (c_label, upper) = if d >= 1 && !profile.exhausted {
        let (c, label) = match gc {
            "measured" => {
                let c = bounds::measured_growth_constant(&profile, d);
                (Expr::Rat(c.clone()), rat_string(&c))
            }
            other => growth_constant_expr(other, d, cfg.c)?,
        };
        let all = heat::check_return_bounds(&run.series, &profile, d, g.valency() as u64, &c);
        (Some(label), all)
    } else {
        // No polynomial upper bound applies; keep only the lower bound.
        let c = Expr::int(1);
        let all = heat::check_return_bounds(&run.series, &profile, 1, g.valency() as u64, &c);
        (None, all.into_iter().filter(|r| r.name != "return_upper").collect())
    };
    reports.extend(upper);
    let exit = exit_from_statuses(reports.iter().map(|r| r.status));
    let mut text = format!("group {name}, valency {}, degree {d}, c = {}\n t  p_t  upper bound\n", g.valency(), c_label.as_deref().unwrap_or("-"));
    let mut csv = String::new();
    for (t, p) in run.series.p.iter().enumerate() {
        let b = reports
            .iter()
            .find(|r| r.name == "return_upper" && r.params.get("t") == Some(&t.to_string()))
            .map(bound_decimal)
            .unwrap_or_default();
        text.push_str(&format!("{t} {} {b}\n", rat_string(p)));
        csv.push_str(&format!("{t},{},{},{b}\n", p.numer(), p.denom()));
    }
    text.push_str(&reports_text(&reports));
    let json = json!({
        "group": name,
        "valency": g.valency(),
        "degree": d,
        "growth_constant": c_label,
        "series": run.series,
        "reports": reports,
    });
    Ok(Outcome { json, text, csv, exit })
}

fn step_exit(s: StepStatus) -> i32 {
    match s {
        StepStatus::CertifiedTrue => EXIT_OK,
        StepStatus::CertifiedFalse => EXIT_FALSE,
        StepStatus::Undecided => EXIT_UNDECIDED,
    }
}

fn cmd_gap(cfg: &RunConfig, r: u64, c0: u64, index: &Option<String>) -> CmdResult {
    let index = match index {
        Some(s) => s.parse::<BigInt>().map_err(|_| InputError(format!("bad index `{s}`")))?,
        None => factorial(16),
    };
    let params = GapParams { c: cfg.c, r, k: 2 * r + 2, index, c0 };
    let report = gap::certify_chain(&params, cfg.precision)?;
    let mut text = String::new();
    let mut csv = String::new();
    for s in &report.steps {
        let br = s.branch.map(|b| format!("{b:?}")).unwrap_or_default();
        text.push_str(&format!(
            "{:<14} {:<7} {:<15} {}\n    {} {} {}\n",
            s.id,
            br,
            s.status.to_string(),
            s.statement,
            tower_text(&s.left),
            s.claimed,
            tower_text(&s.right)
        ));
        csv.push_str(&format!("{},{},{},\"{}\"\n", s.id, br, s.status, s.statement));
    }
    text.push_str(&format!("unconditional steps: {}\n", report.unconditional));
    for (b, s) in &report.per_branch {
        text.push_str(&format!("branch {b}: {s}\n"));
    }
    if report.branch_ambiguous {
        text.push_str("the stated constants hold under some readings of epsilon_k and fail under others\n");
    }
    text.push_str(&format!("verdict: {}\n", report.verdict));
    Ok(Outcome { exit: step_exit(report.verdict), json: serde_json::to_value(&report)?, text, csv })
}

fn cmd_boundary(cfg: &RunConfig, ga: &GroupArgs, radius: usize, degree: Option<u64>, gc: &str) -> CmdResult {
    let (g, spec, name) = build(ga)?;
    let ball = group::enumerate_ball(&g, radius, cfg.budget)?;
    let a = ball.within(radius);
    let size = a.len() as u64;
    let boundary = group::vertex_boundary_size(&g, a) as u64;
    let d = degree.or_else(|| known_degree(&spec)).unwrap_or(0);
    let mut reports = Vec::new();
    let mut iso = None;
    if d >= 1 {
        let c = parse_positive_rat(gc)?;
        let b = bounds::iso_bounds(d, size, &c);
        let m = BigRational::from_integer(boundary.into());
        reports.push(BoundReport::new(
            "iso_csc",
            &[("d", d.to_string()), ("a", size.to_string()), ("c", rat_string(&c))],
            b.csc.clone(),
            Some(boundary.to_string()),
            if b.csc_value <= m { Status::Satisfied } else { Status::Violated },
        ));
        iso = Some(b);
    }
    let exit = exit_from_statuses(reports.iter().map(|r| r.status));
    let text = format!("group {name}, A = B_{radius}, |A| = {size}, |dA| = {boundary}\n{}", reports_text(&reports));
    let csv = format!("{radius},{size},{boundary}\n");
    let json = json!({ "group": name, "radius": radius, "size": size, "boundary": boundary, "iso": iso, "reports": reports });
    Ok(Outcome { json, text, csv, exit })
}

#[allow(clippy::too_many_arguments)]
fn cmd_words(
    cfg: &RunConfig,
    k: Option<usize>,
    word: &Option<String>,
    ga: &GroupArgs,
    multilinear: &Option<String>,
    random: Option<usize>,
    power: Option<u64>,
    base: Option<u64>,
) -> CmdResult {
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    let mut csv = String::new();
    let mut exit = EXIT_OK;
    let have_group = ga.group.is_some() || ga.group_file.is_some();
    let model = if have_group { Some(build(ga)?) } else { None };
    if let Some(k) = k {
        if k == 0 {
            return Err(InputError("k must be positive".into()));
        }
        let w = words::simple_commutator_word(k);
        let lam = words::lambda(k as u32);
        text.push_str(&format!("[x1..x{k}] = {w}\nlength {} = lambda({k}) = {lam}\n", w.len()));
        csv.push_str(&format!("commutator,{k},{},{lam}\n", w.len()));
        json.insert("commutator".into(), json!({ "k": k, "word": w.to_string(), "length": w.len(), "lambda": lam.to_string() }));
    }
    if let Some(ws) = word {
        let w: Word = ws.parse()?;
        let red = w.reduce();
        text.push_str(&format!("word {w} (length {}), reduced {red} (length {})\n", w.len(), red.len()));
        let mut entry = json!({ "word": w.to_string(), "length": w.len(), "reduced": red.to_string(), "reduced_length": red.len() });
        if let Some((g, _, _)) = &model {
            let v = words::evaluate_word(g, &w, g.supplied_generators())?;
            text.push_str(&format!("value {v}\n"));
            entry["value"] = json!(v.to_string());
        }
        csv.push_str(&format!("word,{},{}\n", w.len(), red.len()));
        json.insert("word".into(), entry);
    }
    let gens = |m: &Option<(GroupModel, GroupSpec, String)>| -> Result<(GroupModel, Vec<group::GroupElement>), InputError> {
        let (g, _, _) = m.as_ref().ok_or_else(|| InputError("this check needs --group".into()))?;
        Ok((g.clone(), g.supplied_generators().to_vec()))
    };
    if let Some(ls) = multilinear {
        let (g, x) = gens(&model)?;
        let ell = ls
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|_| InputError(format!("bad exponent list `{ls}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let x: Vec<_> = x.into_iter().take(ell.len()).collect();
        let ok = nilpotent::multilinearity_check(&g, &x, &ell)?;
        text.push_str(&format!("multilinearity with exponents {ell:?}: {ok}\n"));
        csv.push_str(&format!("multilinear,{ls},{ok}\n"));
        json.insert("multilinear".into(), json!({ "exponents": ell, "holds": ok }));
        if !ok {
            exit = EXIT_FALSE;
        }
    }
    if let Some(n) = random {
        let (g, x) = gens(&model)?;
        let r = nilpotent::random_multilinearity(&g, &x, n, 5, cfg.seed)?;
        text.push_str(&format!("random multilinearity: {}/{} passed (seed {})\n", r.passed, r.trials, cfg.seed));
        csv.push_str(&format!("random,{},{}\n", r.passed, r.trials));
        if r.passed != r.trials {
            exit = EXIT_FALSE;
        }
        json.insert("random_multilinearity".into(), serde_json::to_value(&r)?);
    }
    if let Some(kp) = power {
        let (g, x) = gens(&model)?;
        let l = base.ok_or_else(|| InputError("--power needs --base".into()))?;
        match nilpotent::commutator_power_check(&g, &x, kp, l)? {
            Some(r) => {
                text.push_str(&format!(
                    "[x1..x{}]^{kp} as {} commutators of powers, length {} <= {}: {}, identity holds: {}\n",
                    x.len(),
                    r.terms.len(),
                    r.word_length,
                    r.length_bound,
                    r.within_bound,
                    r.identity_holds
                ));
                csv.push_str(&format!("power,{kp},{l},{},{}\n", r.within_bound, r.identity_holds));
                if !(r.within_bound && r.identity_holds) {
                    exit = EXIT_FALSE;
                }
                json.insert("commutator_power".into(), serde_json::to_value(&r)?);
            }
            None => return Err(InputError(format!("k = {kp} is outside [1, L^c]"))),
        }
    }
    if json.is_empty() {
        return Err(InputError("words needs --k, --word, --multilinear, --random or --power".into()));
    }
    Ok(Outcome { json: Value::Object(json), text, csv, exit })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ball { .. } => "ball",
        Command::VerifyGrowth { .. } => "verify-growth",
        Command::Coxeter { .. } => "coxeter",
        Command::Constants { .. } => "constants",
        Command::Heat { .. } => "heat",
        Command::Gap { .. } => "gap",
        Command::Boundary { .. } => "boundary",
        Command::Words { .. } => "words",
    }
}

fn dispatch(cfg: &RunConfig, cmd: &Command) -> CmdResult {
    match cmd {
        Command::Ball { group, radius } => cmd_ball(cfg, group, *radius),
        Command::VerifyGrowth { group, radius, degree, hirsch, bounds } => cmd_verify(cfg, group, *radius, *degree, *hirsch, bounds),
        Command::Coxeter { family, rank, limit, series, mg } => cmd_coxeter(cfg, family, *rank, *limit, *series, *mg),
        Command::Constants { which } => cmd_constants(cfg, which),
        Command::Heat { group, steps, degree, growth_constant } => cmd_heat(cfg, group, *steps, *degree, growth_constant),
        Command::Gap { r, c0, index } => cmd_gap(cfg, *r, *c0, index),
        Command::Boundary { group, ball, degree, growth_constant } => cmd_boundary(cfg, group, *ball, *degree, growth_constant),
        Command::Words { k, word, group, multilinear, random, power, base } => {
            cmd_words(cfg, *k, word, group, multilinear, *random, *power, *base)
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and writes to `out` / `err`.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{e}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_INPUT
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
            return code;
        }
    };
    let precision = match resolve_precision(cli.config.precision) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.0);
            return EXIT_INPUT;
        }
    };
    let cfg = RunConfig { c: cli.config.c, precision, budget: cli.config.budget.max(1), format: cli.config.format, seed: cli.config.seed };
    if cfg.c < 2 {
        let _ = writeln!(err, "error: C must be at least 2");
        return EXIT_INPUT;
    }
    match dispatch(&cfg, &cli.command) {
        Ok(o) => {
            let written = match cfg.format {
                Format::Text => write!(out, "{}", o.text),
                Format::Csv => write!(out, "{}", o.csv),
                Format::Json => {
                    let doc = json!({
                        "schema_version": SCHEMA_VERSION,
                        "command": command_name(&cli.command),
                        "config": cfg,
                        "exit_code": o.exit,
                        "result": o.json,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))
                }
            };
            if written.is_err() {
                return EXIT_INPUT;
            }
            o.exit
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.0);
            EXIT_INPUT
        }
    }
}

/// Entry point used by the binary.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Profile helper for callers that already hold a model.
pub fn profile_for(g: &GroupModel, radius: usize, budget: usize) -> Result<BallProfile, group::GroupError> {
    group::ball_profile(g, radius, budget)
}
