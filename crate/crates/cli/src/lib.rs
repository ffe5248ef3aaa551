//! The `crfem` command line: every verification as a subcommand with a JSON
//! (default) or plain-text report.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crfem::arith::{fmt_q, parse_q, Rationals};
use crfem::continuity::shared_dof_map;
use crfem::dof::{apply_rows, vandermonde, Functional};
use crfem::interp_element::lagrange_node;
use crfem::mesh::{derham_check, global_dim};
use crfem::multiindex::{assumption_violation, binomial, classify, counts_by_codim, dual_node_shift, sigma};
use crfem::partition::partition_suite;
use crfem::{
    build_patch, continuity_trials, parse_mesh, BaryPoly, CartesianPoly, Error, Family, FeElement, InterpElement, Kind,
    Mesh, Mode, MultiIndex, Simplex, SmoothnessVector, Q,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Primal,
    Dual,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Primal => Kind::Primal,
            KindArg::Dual => Kind::Dual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Fe,
    Interp,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Fe => Family::Fe,
            FamilyArg::Interp => Family::Interp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Modular,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Modular => Mode::Modular,
        }
    }
}

fn parse_r(s: &str) -> Result<SmoothnessVector, String> {
    SmoothnessVector::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "crfem", version, about = "C^r finite element and interpolation DOF sets on simplices, verified exactly")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Params {
    /// Simplex dimension.
    #[arg(long)]
    pub d: usize,
    /// Polynomial degree.
    #[arg(long)]
    pub k: u32,
    /// Smoothness vector as a comma list, e.g. `1,2`.
    #[arg(long, value_parser = parse_r, allow_hyphen_values = true)]
    pub r: SmoothnessVector,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RkParams {
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_parser = parse_r, allow_hyphen_values = true)]
    pub r: SmoothnessVector,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Classify one multi-index, or list the refined classes of Σ(d,k).
    Decompose {
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value_t = KindArg::Primal)]
        kind: KindArg,
        /// A single multi-index such as `1,2,6`.
        #[arg(long)]
        alpha: Option<String>,
        /// Also run the exhaustive partition and bijection checks.
        #[arg(long)]
        verify: bool,
    },
    /// DOF counts per sub-simplex codimension.
    Counts {
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value_t = KindArg::Primal)]
        kind: KindArg,
    },
    /// Check r_{i+1} >= 2 r_i and k >= 2 r_d + 1.
    CheckAssumption {
        #[command(flatten)]
        #[serde(flatten)]
        params: RkParams,
    },
    /// Certify that a DOF set is unisolvent for P_k.
    Unisolvency {
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value_t = FamilyArg::Fe)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        /// Mesh file with one cell; defaults to the reference simplex.
        #[arg(long)]
        simplex: Option<PathBuf>,
        /// Number of additional random rational simplices.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// Write the nodal dual basis and DOF manifest to a file.
    Basis {
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value_t = FamilyArg::Fe)]
        family: FamilyArg,
        #[arg(long)]
        simplex: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized exact jump tests on a two-element patch.
    CheckContinuity {
        #[command(flatten)]
        #[serde(flatten)]
        params: RkParams,
        /// Mesh file with exactly two cells sharing a facet.
        #[arg(long)]
        patch: PathBuf,
        #[arg(long, value_enum, default_value_t = FamilyArg::Fe)]
        family: FamilyArg,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Interpolate a Cartesian polynomial on one element.
    Interpolate {
        #[command(flatten)]
        #[serde(flatten)]
        params: Params,
        /// JSON list of `[exponents, coefficient]` pairs in Cartesian monomials.
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, value_enum, default_value_t = FamilyArg::Interp)]
        family: FamilyArg,
        #[arg(long)]
        simplex: Option<PathBuf>,
    },
    /// The 2D de Rham dimension count against the Euler characteristic.
    Derham {
        #[command(flatten)]
        #[serde(flatten)]
        params: RkParams,
        #[arg(long)]
        mesh: PathBuf,
    },
    /// Validate a mesh and report its sub-simplex counts.
    MeshInfo {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, requires = "r")]
        k: Option<u32>,
        #[arg(long, value_parser = parse_r, allow_hyphen_values = true, requires = "k")]
        r: Option<SmoothnessVector>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose { .. } => "decompose",
            Command::Counts { .. } => "counts",
            Command::CheckAssumption { .. } => "check-assumption",
            Command::Unisolvency { .. } => "unisolvency",
            Command::Basis { .. } => "basis",
            Command::CheckContinuity { .. } => "check-continuity",
            Command::Interpolate { .. } => "interpolate",
            Command::Derham { .. } => "derham",
            Command::MeshInfo { .. } => "mesh-info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Serialize)]
struct Report {
    command: &'static str,
    version: &'static str,
    seed: u64,
    params: Value,
    passed: bool,
    result: Value,
}

struct Done {
    passed: bool,
    result: Value,
    text: String,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Caps rayon's worker count from `CR_FEM_THREADS`.
pub fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CR_FEM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CR_FEM_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(done) => {
            let report = Report {
                command: cli.command.name(),
                version: crfem::VERSION,
                seed: cli.seed,
                params: to_value(&cli.command),
                passed: done.passed,
                result: done.result,
            };
            let stdout = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("report") + "\n",
                Format::Text => format!(
                    "{} (crfem {}, seed {})\n{}{}\n",
                    report.command,
                    report.version,
                    report.seed,
                    done.text,
                    if done.passed { "PASS" } else { "FAIL" }
                ),
            };
            Outcome {
                code: if done.passed { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            }
        }
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Verification(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("verification failed: {msg}\n"),
        },
    }
}

fn execute(cli: &Cli) -> Run<Done> {
    match &cli.command {
        Command::Decompose {
            params,
            kind,
            alpha,
            verify,
        } => decompose(params, (*kind).into(), alpha.as_deref(), *verify),
        Command::Counts { params, kind } => counts(params, (*kind).into()),
        Command::CheckAssumption { params } => check_assumption(params),
        Command::Unisolvency {
            params,
            family,
            mode,
            simplex,
            random,
        } => unisolvency(params, (*family).into(), (*mode).into(), simplex.as_deref(), *random, cli.seed),
        Command::Basis {
            params,
            family,
            simplex,
            out,
        } => basis(params, (*family).into(), simplex.as_deref(), out),
        Command::CheckContinuity {
            params,
            patch,
            family,
            trials,
        } => check_continuity(params, patch, (*family).into(), *trials, cli.seed),
        Command::Interpolate {
            params,
            poly,
            family,
            simplex,
        } => interpolate(params, poly, (*family).into(), simplex.as_deref()),
        Command::Derham { params, mesh } => derham(params, mesh),
        Command::MeshInfo { mesh, k, r } => mesh_info(mesh, *k, r.as_ref()),
    }
}

fn check_params(p: &Params) -> Run<()> {
    if p.r.dim() != p.d {
        return Err(usage(format!("r has {} entries but d = {}", p.r.dim(), p.d)));
    }
    if let Some(reason) = assumption_violation(&p.r, p.k as i64) {
        return Err(usage(format!("invalid parameters: {reason}")));
    }
    Ok(())
}

fn read(path: &Path) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_mesh(path: &Path) -> Run<Mesh> {
    parse_mesh(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_simplex(path: Option<&Path>, d: usize) -> Run<Simplex> {
    let Some(path) = path else {
        return Ok(Simplex::reference(d));
    };
    let mesh = load_mesh(path)?;
    if mesh.dim != d || mesh.cells.len() != 1 {
        return Err(usage(format!("{}: expected one {d}-dimensional cell", path.display())));
    }
    Ok(mesh.simplex(0)?)
}

fn vertices_json(s: &Simplex) -> Value {
    to_value(&s.vertices().iter().map(|v| v.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn terms_json(p: &BaryPoly) -> Value {
    to_value(&p.terms().map(|(e, c)| (e.clone(), fmt_q(c))).collect::<Vec<_>>())
}

fn parse_alpha(s: &str) -> Run<MultiIndex> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| usage(format!("bad multi-index entry {t:?}"))))
        .collect::<Run<Vec<u32>>>()
        .map(MultiIndex)
}

fn decompose(p: &Params, kind: Kind, alpha: Option<&str>, verify: bool) -> Run<Done> {
    check_params(p)?;
    let labels: Vec<usize> = (0..=p.d).collect();
    let mut text = String::new();
    let mut passed = true;
    let mut result = serde_json::Map::new();
    if let Some(a) = alpha {
        let alpha = parse_alpha(a)?;
        if alpha.len() != p.d + 1 || alpha.degree() != p.k {
            return Err(usage(format!("{alpha} is not in Σ({}, {})", p.d, p.k)));
        }
        let c = classify(&alpha, &labels, &p.r, kind)?;
        let _ = writeln!(text, "{alpha}: N = {:?}, n = {}, Δ = {:?}", c.n_set, c.n, c.delta_set);
        result.insert("classification".into(), to_value(&c));
        if kind == Kind::Dual {
            let (_, node) = lagrange_node(&alpha, &labels, &p.r)?;
            let shifted = dual_node_shift(&alpha, &labels, &p.r)?;
            let _ = writeln!(text, "node = ({})", node.iter().map(fmt_q).collect::<Vec<_>>().join(", "));
            result.insert("shifted".into(), to_value(&shifted));
            result.insert("node".into(), to_value(&node.iter().map(fmt_q).collect::<Vec<_>>()));
        }
    } else {
        let mut classes: BTreeMap<(std::cmp::Reverse<usize>, Vec<usize>, u32), Vec<MultiIndex>> = BTreeMap::new();
        for alpha in sigma(p.d + 1, p.k) {
            let c = classify(&alpha, &labels, &p.r, kind)?;
            classes.entry((std::cmp::Reverse(c.s), c.n_set, c.n)).or_default().push(alpha);
        }
        let total: usize = classes.values().map(Vec::len).sum();
        let list: Vec<Value> = classes
            .iter()
            .map(|((_, n_set, n), members)| json!({"N": n_set, "n": n, "size": members.len(), "members": members}))
            .collect();
        for ((_, n_set, n), members) in &classes {
            let _ = writeln!(text, "N = {n_set:?}, n = {n}: {}", members.len());
        }
        let _ = writeln!(text, "total {total}");
        passed = total as u64 == binomial(p.k as i64 + p.d as i64, p.d as i64);
        result.insert("kind".into(), to_value(&kind));
        result.insert("total".into(), json!(total));
        result.insert("classes".into(), Value::Array(list));
    }
    if verify {
        let rep = partition_suite(&p.r, p.k)?;
        for c in &rep.checks {
            let _ = writeln!(
                text,
                "{}: {} ({} cases){}",
                c.name,
                if c.ok() { "ok" } else { "FAILED" },
                c.cases,
                c.witness.as_ref().map(|w| format!(", witness {w}")).unwrap_or_default()
            );
        }
        passed &= rep.ok();
        result.insert("verification".into(), to_value(&rep.checks));
    }
    Ok(Done {
        passed,
        result: Value::Object(result),
        text,
    })
}

fn counts(p: &Params, kind: Kind) -> Run<Done> {
    check_params(p)?;
    let t = counts_by_codim(p.d, p.k as i64, &p.r, kind)?;
    let mut text = format!("{:>5} {:>12} {:>14} {:>10}\n", "codim", "subsimplices", "per-subsimplex", "total");
    for row in &t.rows {
        let _ = writeln!(text, "{:>5} {:>12} {:>14} {:>10}", row.codim, row.subsimplices, row.per_subsimplex, row.total);
    }
    for row in t.rows.iter().filter(|r| r.codim > 0) {
        let series: Vec<String> = row.orders.iter().map(|o| o.count.to_string()).collect();
        let _ = writeln!(text, "codim {} by order: {}", row.codim, series.join(" + "));
    }
    let _ = writeln!(text, "total {}", t.total);
    Ok(Done {
        passed: t.total == binomial(p.k as i64 + p.d as i64, p.d as i64),
        result: to_value(&t),
        text,
    })
}

fn check_assumption(p: &RkParams) -> Run<Done> {
    let reason = assumption_violation(&p.r, p.k as i64);
    let text = match &reason {
        None => "valid\n".to_string(),
        Some(why) => format!("invalid: {why}\n"),
    };
    Ok(Done {
        passed: reason.is_none(),
        result: json!({"valid": reason.is_none(), "reason": reason}),
        text,
    })
}

struct Element {
    functionals: Vec<Functional>,
    manifest: Value,
    simplex: Simplex,
}

fn element(family: Family, s: Simplex, p: &Params) -> Run<Element> {
    Ok(match family {
        Family::Fe => {
            let el = FeElement::new(s, p.r.clone(), p.k)?;
            Element {
                manifest: to_value(&el.info),
                functionals: el.functionals,
                simplex: el.simplex,
            }
        }
        Family::Interp => {
            let el = InterpElement::new(s, p.r.clone(), p.k)?;
            Element {
                manifest: to_value(&el.info),
                functionals: el.functionals,
                simplex: el.simplex,
            }
        }
    })
}

fn unisolvency(p: &Params, family: Family, mode: Mode, simplex: Option<&Path>, random: usize, seed: u64) -> Run<Done> {
    check_params(p)?;
    let mut cases: Vec<(String, Simplex)> = vec![(
        if simplex.is_some() { "file" } else { "reference" }.to_string(),
        load_simplex(simplex, p.d)?,
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        cases.push((format!("random {}", i + 1), Simplex::random(p.d, &mut rng)));
    }
    let mut results = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for (label, s) in cases {
        let el = element(family, s, p)?;
        let cert = crfem::dof::check_unisolvent(p.d, p.k, &el.functionals, mode, seed)?;
        passed &= cert.nonsingular;
        let _ = writeln!(
            text,
            "{label}: {} ({}x{}, rank {})",
            if cert.nonsingular { "nonsingular" } else { "singular" },
            cert.size,
            cert.size,
            cert.rank
        );
        results.push(json!({"simplex": label, "vertices": vertices_json(&el.simplex), "certificate": cert}));
    }
    Ok(Done {
        passed,
        result: json!({"family": family, "mode": mode, "elements": results}),
        text,
    })
}

fn basis(p: &Params, family: Family, simplex: Option<&Path>, out: &Path) -> Run<Done> {
    check_params(p)?;
    let el = element(family, load_simplex(simplex, p.d)?, p)?;
    let solver = crfem::Solver::new(p.d, p.k, &el.functionals)?;
    let basis = solver.nodal_basis()?;
    let rows = vandermonde(&Rationals, p.d, p.k, &el.functionals)?;
    let mut kronecker = true;
    for (j, b) in basis.iter().enumerate() {
        let v = apply_rows(&rows, &b.raise_degree(p.k).coefficients());
        kronecker &= v.iter().enumerate().all(|(i, x)| *x == if i == j { Q::from_integer(1.into()) } else { Q::from_integer(0.into()) });
    }
    let file = json!({
        "family": family,
        "d": p.d,
        "k": p.k,
        "r": p.r,
        "vertices": vertices_json(&el.simplex),
        "dofs": el.manifest,
        "basis": basis.iter().map(terms_json).collect::<Vec<_>>(),
    });
    std::fs::write(out, serde_json::to_string_pretty(&file).expect("basis") + "\n")
        .map_err(|e| usage(format!("{}: {e}", out.display())))?;
    Ok(Done {
        passed: kronecker,
        result: json!({"family": family, "out": out.display().to_string(), "size": basis.len(), "kronecker": kronecker}),
        text: format!("{} basis functions written to {}\nkronecker: {kronecker}\n", basis.len(), out.display()),
    })
}

fn check_continuity(p: &RkParams, path: &Path, family: Family, trials: usize, seed: u64) -> Run<Done> {
    let mesh = load_mesh(path)?;
    if mesh.cells.len() != 2 {
        return Err(usage(format!("{}: a patch has exactly two cells", path.display())));
    }
    let params = Params {
        d: mesh.dim,
        k: p.k,
        r: p.r.clone(),
    };
    check_params(&params)?;
    let patch = build_patch(mesh.simplex(0)?, mesh.simplex(1)?)?;
    let rep = continuity_trials(&patch, &p.r, p.k, family, trials, seed)?;
    let pairs = shared_dof_map(&patch, &p.r, p.k, family)?;
    let mut text = format!("shared DOFs: {}\n", pairs.len());
    for o in &rep.orders {
        let _ = writeln!(text, "order {}: zero jump in {}/{} trials", o.order, o.zero_trials, rep.trials);
    }
    if let Some((trial, order)) = rep.first_failure {
        let _ = writeln!(text, "first nonzero jump below r_1 + 1: trial {trial}, order {order}");
    }
    let _ = writeln!(text, "continuous: {}, sharp: {}", rep.continuous(), rep.sharp());
    let passed = rep.continuous() && rep.sharp();
    let mut result = to_value(&rep);
    result["continuous"] = json!(rep.continuous());
    result["sharp"] = json!(rep.sharp());
    result["facet"] = json!(patch.facet);
    result["pairs"] = to_value(&pairs);
    Ok(Done { passed, result, text })
}

/// `[[exponents], coefficient]` pairs; coefficients are integers or `"p/q"` strings.
pub fn parse_polynomial(text: &str, dim: usize) -> Result<CartesianPoly, String> {
    let raw: Vec<(Vec<u32>, Value)> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut terms = Vec::new();
    for (e, c) in raw {
        let c = match &c {
            Value::String(s) => parse_q(s).map_err(|e| e.to_string())?,
            Value::Number(n) if n.is_i64() => Q::from_integer(n.as_i64().expect("i64").into()),
            other => return Err(format!("coefficient {other} is not an integer or \"p/q\" string")),
        };
        terms.push((e, c));
    }
    CartesianPoly::new(dim, terms).map_err(|e| e.to_string())
}

fn interpolate(p: &Params, path: &Path, family: Family, simplex: Option<&Path>) -> Run<Done> {
    check_params(p)?;
    let u = parse_polynomial(&read(path)?, p.d).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let el = element(family, load_simplex(simplex, p.d)?, p)?;
    let solver = crfem::Solver::new(p.d, p.k, &el.functionals)?;
    let ub = u.to_bary(&el.simplex)?;
    let values = el.functionals.iter().map(|f| f.apply(&ub)).collect::<crfem::Result<Vec<Q>>>()?;
    let iu = solver.solve(&values)?;
    let again = el.functionals.iter().map(|f| f.apply(&iu)).collect::<crfem::Result<Vec<Q>>>()?;
    let dofs_match = again == values;
    let reproduced = (u.degree() <= p.k).then(|| iu == ub.raise_degree(p.k));
    let text = format!(
        "input degree {}, {} DOFs\ndof values preserved: {dofs_match}\n{}",
        u.degree(),
        values.len(),
        match reproduced {
            Some(r) => format!("reproduced exactly: {r}\n"),
            None => "input degree exceeds k; reproduction not expected\n".into(),
        }
    );
    Ok(Done {
        passed: dofs_match && reproduced != Some(false),
        result: json!({
            "family": family,
            "vertices": vertices_json(&el.simplex),
            "input_degree": u.degree(),
            "dof_values": values.iter().map(fmt_q).collect::<Vec<_>>(),
            "dof_values_preserved": dofs_match,
            "reproduced": reproduced,
            "interpolant": terms_json(&iu),
        }),
        text,
    })
}

fn derham(p: &RkParams, path: &Path) -> Run<Done> {
    let mesh = load_mesh(path)?;
    let rep = derham_check(&mesh, &p.r, p.k)?;
    let mut text = String::new();
    for leg in &rep.legs {
        let _ = writeln!(text, "D({}, {}) = {} (x{})", leg.r, leg.k, leg.dim, leg.multiplicity);
    }
    let _ = writeln!(
        text,
        "alternating sum {} vs Euler characteristic {}",
        rep.alternating_sum, rep.euler_characteristic
    );
    Ok(Done {
        passed: rep.matches,
        result: to_value(&rep),
        text,
    })
}

fn mesh_info(path: &Path, k: Option<u32>, r: Option<&SmoothnessVector>) -> Run<Done> {
    let mesh = load_mesh(path)?;
    let info = mesh.info();
    let mut text = format!(
        "dimension {}\ncounts by dimension: {:?}\nEuler characteristic {}\n",
        info.dim, info.counts, info.euler_characteristic
    );
    let mut result = to_value(&info);
    if let (Some(k), Some(r)) = (k, r) {
        if let Some(reason) = assumption_violation(r, k as i64) {
            return Err(usage(format!("invalid parameters: {reason}")));
        }
        let dim = global_dim(&mesh, r, k)?;
        let _ = writeln!(text, "global dimension for r = {r}, k = {k}: {dim}");
        result["global_dim"] = json!(dim);
    }
    Ok(Done {
        passed: true,
        result,
        text,
    })
}
