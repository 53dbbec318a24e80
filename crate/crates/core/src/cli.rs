//! Command line front end: input parsing, the built-in examples, the
//! commands and their text, JSON and CSV reports.
//!
//! Exit codes: 0 on success (and equality for `verify`), 1 on a mismatch,
//! 2 on invalid or unsupported input.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::amodel::{disk_potential_a, mirror_maps, Geometry};
use crate::bmodel::{self, build_curve, Solver, VerifyOptions};
use crate::catalog;
use crate::error::Error;
use crate::exactring::{int, parse_rational, CycloNumber, Rational};
use crate::lattice::{
    flag_data, leading_degree, one_based, picard_cokernel, semiprojectivity_check, StackyFan,
};
use crate::series::Series;

pub const DEFAULT_MAX_DEGREE: i64 = 4;
pub const DEFAULT_M_CAP: u32 = 720;

#[derive(Parser, Debug)]
#[command(name = "orbidisk", version, about = "Exact A-side and B-side disk potentials of framed branes in toric CY 3-orbifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Fan data: charge matrix, Box elements and ages, K_eff generators, flag data.
    Inspect(ModelArgs),
    /// A-side disk potential by twisted sector, assembled, and the mirror maps.
    Amodel(ModelArgs),
    /// B-side superpotential W_{H,inst} from the mirror curve.
    Bmodel(ModelArgs),
    /// Compare both sides monomial by monomial.
    Verify(ModelArgs),
    /// Closed form against Newton iteration on random curve exponents.
    AppendixCheck(AppendixArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum SolverArg {
    Closed,
    #[default]
    Newton,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Solver {
        match s {
            SolverArg::Closed => Solver::Closed,
            SolverArg::Newton => Solver::Newton,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Built-in example: c3, x111, x120, x012, x000, conifold, kp2.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub example: Option<String>,
    /// TOML input file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Framing `f` (outer brane) or `f+,f-` (inner brane).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub framing: Option<Vec<i64>>,
    /// Truncation order T (rational), in the weights wt(x) = 1/s1, wt(q_a) = 1.
    #[arg(long)]
    pub max_degree: Option<String>,
    /// Flag (i1,i2,i3), 1-based; overrides the input.
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    /// Largest allowed order M of the root of unity field.
    #[arg(long)]
    pub m_cap: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = SolverArg::Newton)]
    pub solver: SolverArg,
    /// verify only: add 1 to the A-side coefficient of this monomial (exponents of x,q1,..).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub perturb: Option<Vec<String>>,
}

#[derive(Args, Debug, Clone)]
pub struct AppendixArgs {
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// One failed check while reading an input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub section: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.section, self.message)
    }
}

fn diag(section: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        section: section.into(),
        message: message.into(),
    }
}

/// A validated fan with a brane and run settings.
#[derive(Debug, Clone)]
pub struct Model {
    pub source: String,
    pub fan: StackyFan,
    /// 0-based `(i1, i2, i3)`.
    pub order: [usize; 3],
    pub framing: Vec<i64>,
    pub max_degree: Option<Rational>,
    pub m_cap: Option<u32>,
}

impl Model {
    pub fn from_example(name: &str) -> Result<Model, Error> {
        let ex = catalog::example(name)?;
        Ok(Model {
            source: format!("example {}", ex.name),
            fan: ex.fan,
            order: ex.order,
            framing: ex.framing,
            max_degree: None,
            m_cap: None,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InputFile {
    fan: FanSection,
    brane: Option<BraneSection>,
    run: Option<RunSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanSection {
    rank: Option<usize>,
    #[serde(default)]
    torsion: Vec<i64>,
    rays: Vec<Vec<i64>>,
    #[serde(default)]
    extras: Vec<Vec<i64>>,
    #[serde(default)]
    cones: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BraneSection {
    order: Option<Vec<usize>>,
    tau: Option<Vec<usize>>,
    sigma: Option<Vec<usize>>,
    framing: Option<Vec<i64>>,
    #[serde(rename = "type")]
    kind: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    max_degree: Option<Number>,
    m_cap: Option<u32>,
}

fn zero_based(section: &str, what: &str, v: &[usize], r: usize) -> Result<Vec<usize>, Diagnostic> {
    v.iter()
        .map(|i| {
            if *i == 0 || *i > r {
                Err(diag(section, format!("{what} index {i} is out of range 1..={r}")))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

/// Parses and validates the TOML input format.
pub fn parse_input(text: &str) -> Result<Model, Vec<Diagnostic>> {
    let file: InputFile = toml::from_str(text).map_err(|e| vec![diag("syntax", e.message().to_string())])?;
    let mut diags = Vec::new();
    let fan_sec = file.fan;
    if let Some(rank) = fan_sec.rank {
        if rank != 3 {
            diags.push(diag("fan", format!("rank {rank} is not supported; rank must be 3")));
        }
    }
    let r = fan_sec.rays.len() + fan_sec.extras.len();
    let mut cones = Vec::new();
    for c in &fan_sec.cones {
        if c.len() != 3 {
            diags.push(diag("fan", format!("cone {c:?} does not have three rays")));
            continue;
        }
        match zero_based("fan", "cone", c, r) {
            Ok(z) => cones.push([z[0], z[1], z[2]]),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let fan = StackyFan::new(fan_sec.torsion, fan_sec.rays, fan_sec.extras, cones)
        .map_err(|e| vec![diag("fan", e.to_string())])?;

    let Some(brane) = file.brane else {
        return Err(vec![diag("brane", "missing [brane] section")]);
    };
    let order = brane_order(&brane, r)?;
    let flag = flag_data(&fan, order).map_err(|e| vec![diag("brane", e.to_string())])?;
    if let Some(kind) = &brane.kind {
        let actual = if flag.is_outer() { "outer" } else { "inner" };
        if kind != "outer" && kind != "inner" {
            return Err(vec![diag("brane", format!("type {kind:?} must be outer or inner"))]);
        }
        if kind != actual {
            return Err(vec![diag(
                "brane",
                format!("type is {kind} but tau lies on {} maximal cone(s), so the brane is {actual}",
                    if flag.is_outer() { 1 } else { 2 }),
            )]);
        }
    }
    let framing = brane.framing.unwrap_or_else(|| if flag.is_outer() { vec![0] } else { vec![0, 0] });

    let mut max_degree = None;
    let mut m_cap = None;
    if let Some(run) = file.run {
        max_degree = match run.max_degree {
            None => None,
            Some(Number::Int(n)) => Some(int(n)),
            Some(Number::Text(s)) => Some(parse_rational(&s).map_err(|e| vec![diag("run", e.to_string())])?),
        };
        if max_degree.as_ref().is_some_and(|t| *t < int(0)) {
            return Err(vec![diag("run", "max_degree must be nonnegative")]);
        }
        m_cap = run.m_cap;
    }
    Ok(Model {
        source: String::new(),
        fan,
        order,
        framing,
        max_degree,
        m_cap,
    })
}

fn brane_order(b: &BraneSection, r: usize) -> Result<[usize; 3], Vec<Diagnostic>> {
    let one = |d: Diagnostic| vec![d];
    let from_sets = match (&b.tau, &b.sigma) {
        (Some(tau), Some(sigma)) => {
            if tau.len() != 2 || sigma.len() != 3 {
                return Err(one(diag("brane", "tau needs two rays and sigma three")));
            }
            if !tau.iter().all(|i| sigma.contains(i)) {
                return Err(one(diag("brane", "tau is not a face of sigma")));
            }
            let i1 = *sigma.iter().find(|i| !tau.contains(i)).unwrap();
            Some(vec![i1, tau[0], tau[1]])
        }
        (None, None) => None,
        _ => return Err(one(diag("brane", "give both tau and sigma, or neither"))),
    };
    let order = match (&b.order, from_sets) {
        (Some(o), Some(s)) => {
            if o.len() != 3 {
                return Err(one(diag("brane", "order needs three ray indices")));
            }
            let mut a = o.clone();
            let mut c = s.clone();
            a[1..].sort_unstable();
            c[1..].sort_unstable();
            if a != c {
                return Err(one(diag("brane", format!("order {o:?} is inconsistent with tau and sigma"))));
            }
            o.clone()
        }
        (Some(o), None) => o.clone(),
        (None, Some(s)) => s,
        (None, None) => return Err(one(diag("brane", "missing order (or tau and sigma)"))),
    };
    if order.len() != 3 {
        return Err(one(diag("brane", "order needs three ray indices")));
    }
    let z = zero_based("brane", "order", &order, r).map_err(one)?;
    Ok([z[0], z[1], z[2]])
}

/// Exact coefficient `(num/den) * zeta_M^j`, or its power basis when it is not of that shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficient {
    pub num: String,
    pub den: String,
    pub j: u32,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
}

impl Coefficient {
    pub fn of(c: &CycloNumber) -> Coefficient {
        let m = c.field().order();
        match c.as_rational_root() {
            Some((r, j)) => Coefficient {
                num: r.numer().to_string(),
                den: r.denom().to_string(),
                j,
                m,
                basis: None,
            },
            None => Coefficient {
                num: String::new(),
                den: String::new(),
                j: 0,
                m,
                basis: Some(c.coefficients().iter().map(|x| x.to_string()).collect()),
            },
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(b) = &self.basis {
            return write!(f, "[{}] in Q(zeta_{})", b.join(", "), self.m);
        }
        let r = if self.den == "1" {
            self.num.clone()
        } else {
            format!("{}/{}", self.num, self.den)
        };
        if self.j == 0 {
            write!(f, "{r}")
        } else {
            write!(f, "{r} * zeta_{}^{}", self.m, self.j)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<String>,
    pub coefficient: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub variables: Vec<String>,
    pub terms: Vec<Term>,
}

impl Table {
    pub fn of(s: &Series) -> Table {
        let space = s.space();
        Table {
            variables: space.names().to_vec(),
            terms: s
                .terms()
                .map(|(k, c)| Term {
                    exponents: space.exponents(k).iter().map(|e| e.to_string()).collect(),
                    coefficient: Coefficient::of(c),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunInfo {
    pub source: String,
    /// 1-based `(i1, i2, i3)`.
    pub order: [usize; 3],
    pub framing: Vec<i64>,
    pub max_degree: String,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRow {
    pub v: Vec<i64>,
    pub c: Vec<String>,
    pub age: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRow {
    pub beta: Vec<String>,
    pub pairings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingRow {
    pub i: usize,
    pub beta: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InspectReport {
    pub run: RunInfo,
    pub torsion: Vec<i64>,
    pub rays: Vec<Vec<i64>>,
    pub extras: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub semiprojective: bool,
    pub charge_matrix: Vec<Vec<i64>>,
    pub picard: String,
    pub kind: String,
    pub tau: Vec<usize>,
    pub sigma: Vec<usize>,
    pub s1: u64,
    pub g_tau: u64,
    pub g_sigma: u64,
    pub boxes: Vec<BoxRow>,
    pub k_eff: Vec<GeneratorRow>,
    pub leading: Vec<LeadingRow>,
    pub extended_charge_matrix: Vec<Vec<i64>>,
    pub curve_exponents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorRow {
    pub v: Vec<i64>,
    pub sqrt_chi: Coefficient,
    pub potential: Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedRow {
    pub name: String,
    pub log_of: Option<String>,
    pub series: Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorRow {
    pub closed: Vec<ClosedRow>,
    pub open: Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmodelReport {
    pub run: RunInfo,
    pub degrees: usize,
    pub sectors: Vec<SectorRow>,
    pub assembled: Table,
    pub mirror_maps: Option<MirrorRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmodelReport {
    pub run: RunInfo,
    pub solver: String,
    pub eps: Vec<String>,
    /// Exponents of `(x, q_1..)` in each `tq_a`.
    pub tq_images: Vec<Vec<String>>,
    pub inst: Table,
    pub log_term: Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyTerm {
    pub exponents: Vec<String>,
    pub a: Coefficient,
    pub b: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOut {
    pub run: RunInfo,
    pub solver: String,
    pub equal: bool,
    pub solvers_agree: bool,
    pub compared: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<VerifyTerm>,
    pub variables: Vec<String>,
    pub terms: Vec<VerifyTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub eps: Vec<String>,
    pub order: i64,
    pub terms: usize,
    pub equal: bool,
    pub residual_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendixOut {
    pub seed: u64,
    pub log_check: bool,
    pub passed: bool,
    pub instances: Vec<InstanceRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Inspect(InspectReport),
    Amodel(AmodelReport),
    Bmodel(BmodelReport),
    Verify(VerifyOut),
    AppendixCheck(AppendixOut),
}

impl Report {
    /// Process exit code for this outcome.
    pub fn exit_code(&self) -> i32 {
        match self {
            Report::Verify(v) if !v.equal => 1,
            Report::AppendixCheck(a) if !a.passed => 1,
            _ => 0,
        }
    }
}

/// A failure before a report exists; always exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure(pub Vec<String>);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure(vec![e.to_string()])
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join("\n"))
    }
}

pub fn load_model(args: &ModelArgs) -> Result<Model, Failure> {
    let mut model = match (&args.example, &args.input) {
        (Some(name), _) => Model::from_example(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure(vec![format!("cannot read {}: {e}", path.display())]))?;
            let mut m = parse_input(&text).map_err(|d| Failure(d.iter().map(|x| x.to_string()).collect()))?;
            m.source = format!("file {}", path.display());
            m
        }
        (None, None) => return Err(Failure(vec!["give --example or --input".into()])),
    };
    if let Some(o) = &args.order {
        if o.len() != 3 {
            return Err(Failure(vec!["--order needs three indices".into()]));
        }
        let z = zero_based("brane", "order", o, model.fan.r()).map_err(|d| Failure(vec![d.to_string()]))?;
        model.order = [z[0], z[1], z[2]];
    }
    if let Some(f) = &args.framing {
        model.framing = f.clone();
    }
    if let Some(t) = &args.max_degree {
        let t = parse_rational(t)?;
        if t < int(0) {
            return Err(Failure(vec!["--max-degree must be nonnegative".into()]));
        }
        model.max_degree = Some(t);
    }
    if let Some(m) = args.m_cap {
        model.m_cap = Some(m);
    }
    Ok(model)
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn picard_string(inv: &[i64]) -> String {
    if inv.is_empty() {
        return "0".into();
    }
    inv.iter()
        .map(|d| if *d == 0 { "Z".to_string() } else { format!("Z/{d}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn run_info(model: &Model, geo: &Geometry, t: &Rational) -> RunInfo {
    RunInfo {
        source: model.source.clone(),
        order: [model.order[0] + 1, model.order[1] + 1, model.order[2] + 1],
        framing: model.framing.clone(),
        max_degree: t.to_string(),
        m: geo.field.order(),
    }
}

pub fn inspect(model: &Model, geo: &Geometry) -> Result<InspectReport, Failure> {
    let fan = &geo.fan;
    let rp = fan.r_prime();
    let picard = picard_cokernel(fan, &geo.charge);
    let [i1, i2, i3] = geo.flag.order;
    let boxes = geo
        .chart
        .boxes
        .iter()
        .map(|b| BoxRow {
            v: b.v.clone(),
            c: [i1, i2, i3].iter().map(|i| b.c_of(*i).unwrap().to_string()).collect(),
            age: b.age.to_string(),
        })
        .collect();
    let k_eff = (0..geo.k())
        .map(|a| GeneratorRow {
            beta: strings(&geo.chart.dual[a]),
            pairings: geo.chart.pairing.iter().map(|row| row[a].to_string()).collect(),
        })
        .collect();
    let mut leading = Vec::new();
    for i in rp..fan.r() {
        let ld = leading_degree(fan, &geo.charge, i)?;
        leading.push(LeadingRow {
            i: i + 1,
            beta: strings(&ld.beta),
        });
    }
    let curve = build_curve(geo)?;
    let mut sigma = one_based(&geo.flag.order);
    sigma.sort_unstable();
    let mut tau = one_based(&geo.flag.order[1..]);
    tau.sort_unstable();
    Ok(InspectReport {
        run: run_info(model, geo, &model.max_degree.clone().unwrap_or_else(|| int(DEFAULT_MAX_DEGREE))),
        torsion: fan.torsion().to_vec(),
        rays: fan.vectors()[..rp].to_vec(),
        extras: fan.vectors()[rp..].to_vec(),
        cones: fan.cones().iter().map(|c| one_based(c)).collect(),
        semiprojective: semiprojectivity_check(fan),
        charge_matrix: geo.charge.rows.clone(),
        picard: picard_string(&picard),
        kind: if geo.flag.is_outer() { "outer" } else { "inner" }.into(),
        tau,
        sigma,
        s1: geo.flag.s1,
        g_tau: geo.flag.g_tau,
        g_sigma: geo.flag.g_sigma,
        boxes,
        k_eff,
        leading,
        extended_charge_matrix: geo.extended.rows.clone(),
        curve_exponents: strings(&curve.eps),
    })
}

fn refuse_torsion(geo: &Geometry) -> Result<(), Failure> {
    if geo.fan.has_torsion() {
        return Err(Error::Unsupported("torsion unsupported in mirror pipeline".into()).into());
    }
    Ok(())
}

fn solver_name(s: Solver) -> String {
    match s {
        Solver::Closed => "closed",
        Solver::Newton => "newton",
    }
    .into()
}

/// Model commands, for callers that already hold a [`Model`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Inspect,
    Amodel,
    Bmodel,
    Verify,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub solver: Solver,
    /// Exponents of `(x, q_1..)` whose A-side coefficient gets 1 added (verify only).
    pub perturb: Option<Vec<Rational>>,
}

/// Runs one command.
pub fn run(command: &Command) -> Result<Report, Failure> {
    let (task, args) = match command {
        Command::AppendixCheck(a) => return appendix(a),
        Command::Inspect(a) => (Task::Inspect, a),
        Command::Amodel(a) => (Task::Amodel, a),
        Command::Bmodel(a) => (Task::Bmodel, a),
        Command::Verify(a) => (Task::Verify, a),
    };
    let model = load_model(args)?;
    let perturb = match &args.perturb {
        None => None,
        Some(v) => Some(v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?),
    };
    let opts = RunOptions {
        solver: args.solver.into(),
        perturb,
    };
    report(task, &model, &opts)
}

/// Builds the report of `task` for `model`.
pub fn report(task: Task, model: &Model, opts: &RunOptions) -> Result<Report, Failure> {
    let geo = Geometry::new(
        model.fan.clone(),
        model.order,
        &model.framing,
        model.m_cap.unwrap_or(DEFAULT_M_CAP),
    )?;
    let t = model.max_degree.clone().unwrap_or_else(|| int(DEFAULT_MAX_DEGREE));
    let info = run_info(model, &geo, &t);
    match task {
        Task::Inspect => Ok(Report::Inspect(inspect(model, &geo)?)),
        Task::Amodel => {
            let pot = disk_potential_a(&geo, &t)?;
            let sectors = geo
                .chart
                .boxes
                .iter()
                .zip(&pot.sectors)
                .map(|(b, s)| {
                    Ok(SectorRow {
                        v: b.v.clone(),
                        sqrt_chi: Coefficient::of(&crate::amodel::character_sqrt(&geo, b)?),
                        potential: Table::of(s),
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let mirror = if geo.fan.has_torsion() {
                None
            } else {
                let m = mirror_maps(&geo, &t)?;
                Some(MirrorRow {
                    closed: m
                        .closed
                        .iter()
                        .map(|c| ClosedRow {
                            name: c.name.clone(),
                            log_of: c.log_of.clone(),
                            series: Table::of(&c.series),
                        })
                        .collect(),
                    open: Table::of(&m.open),
                })
            };
            Ok(Report::Amodel(AmodelReport {
                run: info,
                degrees: pot.degrees,
                sectors,
                assembled: Table::of(&pot.assembled),
                mirror_maps: mirror,
            }))
        }
        Task::Bmodel => {
            refuse_torsion(&geo)?;
            let curve = build_curve(&geo)?;
            let solver = opts.solver;
            let b = bmodel::w_h_inst(&curve, &t, solver)?;
            Ok(Report::Bmodel(BmodelReport {
                run: info,
                solver: solver_name(solver),
                eps: strings(&curve.eps),
                tq_images: curve.tq_images.iter().map(|r| strings(r)).collect(),
                inst: Table::of(&b.inst),
                log_term: Table::of(&b.log_term),
            }))
        }
        Task::Verify => {
            refuse_torsion(&geo)?;
            if let Some(p) = &opts.perturb {
                if p.len() != geo.k() + 1 {
                    return Err(Failure(vec![format!(
                        "--perturb needs {} exponents (x, q1..q{})",
                        geo.k() + 1,
                        geo.k()
                    )]));
                }
            }
            let solver = opts.solver;
            let vopts = VerifyOptions {
                solver,
                perturb: opts.perturb.clone(),
            };
            let rep = bmodel::verify_identity(&geo, &t, &vopts)?;
            let space = rep.a_side.space().clone();
            let mut keys: Vec<&Vec<i64>> = rep
                .a_side
                .terms()
                .map(|(k, _)| k)
                .chain(rep.b_side.inst.terms().map(|(k, _)| k))
                .collect();
            keys.sort();
            keys.dedup();
            let terms = keys
                .iter()
                .map(|k| {
                    let e = space.exponents(k);
                    VerifyTerm {
                        exponents: strings(&e),
                        a: Coefficient::of(&rep.a_side.coefficient(&e)),
                        b: Coefficient::of(&rep.b_side.inst.coefficient(&e)),
                    }
                })
                .collect();
            Ok(Report::Verify(VerifyOut {
                run: info,
                solver: solver_name(solver),
                equal: rep.equal,
                solvers_agree: rep.solvers_agree,
                compared: rep.compared,
                mismatches: rep.mismatches,
                first_mismatch: rep.first_mismatch.map(|m| VerifyTerm {
                    exponents: strings(&m.exponents),
                    a: Coefficient::of(&m.a),
                    b: Coefficient::of(&m.b),
                }),
                variables: space.names().to_vec(),
                terms,
            }))
        }
    }
}

fn appendix(a: &AppendixArgs) -> Result<Report, Failure> {
    let rep = bmodel::appendix_check(a.seed, a.instances)?;
    Ok(Report::AppendixCheck(AppendixOut {
        seed: a.seed,
        log_check: rep.log_check,
        passed: rep.passed(),
        instances: rep
            .instances
            .iter()
            .map(|i| InstanceRow {
                eps: strings(&i.eps),
                order: i.order,
                terms: i.terms,
                equal: i.equal,
                residual_zero: i.residual_zero,
            })
            .collect(),
    }))
}

fn monomial(vars: &[String], exps: &[String]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(exps)
        .filter(|(_, e)| e.as_str() != "0")
        .map(|(v, e)| if e == "1" { v.clone() } else { format!("{v}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn tuple<T: fmt::Display>(v: &[T]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn set(v: &[usize]) -> String {
    format!("{{{}}}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn write_table(out: &mut String, t: &Table, indent: &str) {
    if t.terms.is_empty() {
        out.push_str(&format!("{indent}0\n"));
    }
    for term in &t.terms {
        out.push_str(&format!(
            "{indent}{:<20} {}\n",
            monomial(&t.variables, &term.exponents),
            term.coefficient
        ));
    }
}

fn header(out: &mut String, title: &str, run: &RunInfo) {
    out.push_str(&format!(
        "{title}: {}, flag (i1,i2,i3) = {}, framing {}, T = {}, M = {}\n",
        run.source,
        tuple(&run.order),
        tuple(&run.framing),
        run.max_degree,
        run.m
    ));
}

fn text(report: &Report) -> String {
    let mut s = String::new();
    match report {
        Report::Inspect(r) => {
            s.push_str(&format!("source: {}\n", r.run.source));
            s.push_str(&format!(
                "torsion: {}\n",
                if r.torsion.is_empty() { "none".to_string() } else { tuple(&r.torsion) }
            ));
            for (i, b) in r.rays.iter().enumerate() {
                s.push_str(&format!("b_{} = {}\n", i + 1, tuple(b)));
            }
            for (i, b) in r.extras.iter().enumerate() {
                s.push_str(&format!("b_{} = {} (extra)\n", r.rays.len() + i + 1, tuple(b)));
            }
            let cones: Vec<String> = r.cones.iter().map(|c| set(c)).collect();
            s.push_str(&format!("maximal cones: {}\n", cones.join(" ")));
            s.push_str(&format!("semi-projective: {}\n", if r.semiprojective { "yes" } else { "no" }));
            s.push_str("charge vectors:\n");
            for (a, row) in r.charge_matrix.iter().enumerate() {
                s.push_str(&format!("  l^({}) = {}\n", a + 1, tuple(row)));
            }
            s.push_str(&format!("Pic = {}\n", r.picard));
            s.push_str(&format!(
                "brane: {}, tau = {}, sigma = {}, (i1,i2,i3) = {}\n",
                r.kind,
                set(&r.tau),
                set(&r.sigma),
                tuple(&r.run.order)
            ));
            s.push_str(&format!("s1 = {}, |G_tau| = {}, |G_sigma| = {}\n", r.s1, r.g_tau, r.g_sigma));
            s.push_str("Box(sigma): v, (c_i1, c_i2, c_i3), age\n");
            for b in &r.boxes {
                s.push_str(&format!("  {:<14} {:<18} {}\n", tuple(&b.v), tuple(&b.c), b.age));
            }
            s.push_str("K_eff generators e^a, with (<D_1,e^a>, .., <D_r,e^a>):\n");
            for (a, g) in r.k_eff.iter().enumerate() {
                s.push_str(&format!("  e^{} = {:<16} {}\n", a + 1, tuple(&g.beta), tuple(&g.pairings)));
            }
            for l in &r.leading {
                s.push_str(&format!("D_{}^vee = {}\n", l.i, tuple(&l.beta)));
            }
            s.push_str(&format!("extended charge vectors (framing {}):\n", tuple(&r.run.framing)));
            for (a, row) in r.extended_charge_matrix.iter().enumerate() {
                s.push_str(&format!("  l~^({a}) = {}\n", tuple(row)));
            }
            s.push_str(&format!("curve exponents eps = {}\n", tuple(&r.curve_exponents)));
        }
        Report::Amodel(r) => {
            header(&mut s, "A-model", &r.run);
            s.push_str(&format!("extended degrees: {}\n", r.degrees));
            for sec in &r.sectors {
                s.push_str(&format!("sector v = {}, sqrt(chi) = {}\n", tuple(&sec.v), sec.sqrt_chi));
                write_table(&mut s, &sec.potential, "  ");
            }
            s.push_str("assembled W:\n");
            write_table(&mut s, &r.assembled, "  ");
            if let Some(m) = &r.mirror_maps {
                s.push_str("closed mirror map:\n");
                for c in &m.closed {
                    match &c.log_of {
                        Some(q) => s.push_str(&format!("  {} = log {} + series:\n", c.name, q)),
                        None => s.push_str(&format!("  {} = series:\n", c.name)),
                    }
                    write_table(&mut s, &c.series, "    ");
                }
                s.push_str("open mirror map, log X - log x:\n");
                write_table(&mut s, &m.open, "  ");
            }
        }
        Report::Bmodel(r) => {
            header(&mut s, "B-model", &r.run);
            s.push_str(&format!("solver: {}\n", r.solver));
            s.push_str(&format!("curve exponents eps = {}\n", tuple(&r.eps)));
            for (a, img) in r.tq_images.iter().enumerate() {
                s.push_str(&format!("  tq{a} -> exponents {} of (x, q)\n", tuple(img)));
            }
            s.push_str("W_H,inst:\n");
            write_table(&mut s, &r.inst, "  ");
            s.push_str("dropped log q0 coefficient:\n");
            write_table(&mut s, &r.log_term, "  ");
        }
        Report::Verify(r) => {
            header(&mut s, "verify", &r.run);
            s.push_str(&format!(
                "solver: {}, closed form and Newton agree: {}\n",
                r.solver,
                if r.solvers_agree { "yes" } else { "no" }
            ));
            for t in &r.terms {
                let mark = if t.a == t.b { "=" } else { "MISMATCH" };
                s.push_str(&format!(
                    "  {:<20} A: {:<24} B: {:<24} {mark}\n",
                    monomial(&r.variables, &t.exponents),
                    t.a.to_string(),
                    t.b.to_string()
                ));
            }
            s.push_str(&format!(
                "compared {} monomials, {} mismatches: {}\n",
                r.compared,
                r.mismatches,
                if r.equal { "EQUAL" } else { "NOT EQUAL" }
            ));
            if let Some(m) = &r.first_mismatch {
                s.push_str(&format!(
                    "first mismatch at {}: A = {}, B = {}\n",
                    monomial(&r.variables, &m.exponents),
                    m.a,
                    m.b
                ));
            }
        }
        Report::AppendixCheck(r) => {
            s.push_str(&format!("appendix check, seed {}\n", r.seed));
            for (n, i) in r.instances.iter().enumerate() {
                s.push_str(&format!(
                    "  #{n:<3} eps = {:<28} T = {} terms = {:<4} closed = newton: {}, residual 0: {}\n",
                    tuple(&i.eps),
                    i.order,
                    i.terms,
                    i.equal,
                    i.residual_zero
                ));
            }
            s.push_str(&format!("log(1+s) check: {}\n", r.log_check));
            s.push_str(&format!("{}\n", if r.passed { "PASSED" } else { "FAILED" }));
        }
    }
    s
}

fn x_fraction(e: &str) -> String {
    if e.contains('/') {
        e.to_string()
    } else {
        format!("{e}/1")
    }
}

fn csv_rows(
    w: &mut csv::Writer<Vec<u8>>,
    variables: &[String],
    rows: impl Iterator<Item = (Vec<String>, Coefficient, Option<bool>)>,
    with_agree: bool,
) -> csv::Result<()> {
    let mut head: Vec<String> = variables.to_vec();
    head.extend(["num", "den", "j", "M"].map(String::from));
    if with_agree {
        head.push("agree".into());
    }
    w.write_record(&head)?;
    for (exps, c, agree) in rows {
        let mut rec: Vec<String> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| if variables[i] == "x" { x_fraction(e) } else { e.clone() })
            .collect();
        match &c.basis {
            None => rec.extend([c.num.clone(), c.den.clone(), c.j.to_string(), c.m.to_string()]),
            Some(b) => rec.extend([b.join(";"), "1".into(), "basis".into(), c.m.to_string()]),
        }
        if let Some(a) = agree {
            rec.push(a.to_string());
        }
        w.write_record(&rec)?;
    }
    Ok(())
}

fn csv_text(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let result = match report {
        Report::Inspect(r) => {
            let res: csv::Result<()> = (|| {
                w.write_record(["v", "c_i1", "c_i2", "c_i3", "age"])?;
                for b in &r.boxes {
                    let v = tuple(&b.v);
                    w.write_record([v.as_str(), &b.c[0], &b.c[1], &b.c[2], &b.age])?;
                }
                Ok(())
            })();
            res
        }
        Report::Amodel(r) => csv_rows(
            &mut w,
            &r.assembled.variables,
            r.assembled.terms.iter().map(|t| (t.exponents.clone(), t.coefficient.clone(), None)),
            false,
        ),
        Report::Bmodel(r) => csv_rows(
            &mut w,
            &r.inst.variables,
            r.inst.terms.iter().map(|t| (t.exponents.clone(), t.coefficient.clone(), None)),
            false,
        ),
        Report::Verify(r) => csv_rows(
            &mut w,
            &r.variables,
            r.terms.iter().map(|t| (t.exponents.clone(), t.a.clone(), Some(t.a == t.b))),
            true,
        ),
        Report::AppendixCheck(r) => {
            let res: csv::Result<()> = (|| {
                w.write_record(["eps", "T", "terms", "equal", "residual_zero"])?;
                for i in &r.instances {
                    w.write_record([
                        i.eps.join(" "),
                        i.order.to_string(),
                        i.terms.to_string(),
                        i.equal.to_string(),
                        i.residual_zero.to_string(),
                    ])?;
                }
                Ok(())
            })();
            res
        }
    };
    result.expect("writing csv to memory");
    String::from_utf8(w.into_inner().expect("flush csv")).expect("csv is utf-8")
}

/// Renders a report in the requested format.
pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Text => text(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => csv_text(report),
    }
}

fn format_of(command: &Command) -> Format {
    match command {
        Command::AppendixCheck(a) => a.format,
        Command::Inspect(a) | Command::Amodel(a) | Command::Bmodel(a) | Command::Verify(a) => a.format,
    }
}

/// Parses `args` (including the program name), runs, writes the report and
/// returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match run(&cli.command) {
        Ok(report) => {
            let _ = write!(out, "{}", emit_report(&report, format_of(&cli.command)));
            report.exit_code()
        }
        Err(f) => {
            for line in &f.0 {
                let _ = writeln!(err, "error: {line}");
            }
            2
        }
    }
}
