//! Command-line front end.
//!
//! Every command produces a [`Certificate`]. Text output is the certificate's
//! report lines followed by its checks and hash; `--format json` prints the
//! certificate itself. Exit codes: 0 all checks pass, 1 a check failed, 2 usage.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{self, DEFAULT_ONAN_BUDGET};
use crate::certificate::{Cache, Certificate, Check, RunConfig, Status};
use crate::error::Error;
use crate::gf::{ExtensionSplit, FieldCtx, FieldElem};
use crate::mode::Mode;
use crate::planar::{Family, PlanarFunction, Witness};
use crate::plane::Plane;
use crate::suite;
use crate::unital::{self, Involution, Unital, EXHAUSTIVE_DESIGN_Q};

#[derive(Parser, Debug)]
#[command(name = "unitalforge", version, about = "Unitals in shift planes of odd order")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Characteristic.
    #[arg(long = "p", global = true)]
    pub p: Option<u32>,
    /// Degree of the field over F_p (even).
    #[arg(long = "m", global = true)]
    pub m: Option<u32>,
    /// Modulus coefficients, constant term first, e.g. `2,2,1`.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    #[arg(long, global = true, default_value = "square")]
    pub spec: String,
    /// `auto` or a field-element index.
    #[arg(long, global = true, default_value = "auto")]
    pub theta: String,
    #[arg(long, global = true, default_value = "frobq")]
    pub kappa: String,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: usize,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Write the certificate (or the dump) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cache_dir: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Which unital to build when no `--input` is given.
    #[arg(long, global = true, value_enum, default_value_t = Source::Utheta)]
    pub source: Source,
    /// A unital file or certificate to operate on.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Utheta,
    Polarity,
    Classical,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    ThroughInfinity,
    Exhaustive,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Field construction and arithmetic.
    Field {
        #[command(subcommand)]
        action: FieldCmd,
    },
    /// Planar function properties.
    Planar {
        #[command(subcommand)]
        action: PlanarCmd,
    },
    /// The shift plane.
    Plane {
        #[command(subcommand)]
        action: PlaneCmd,
    },
    /// Unital construction and certification.
    Unital {
        #[command(subcommand)]
        action: UnitalCmd,
    },
    /// The circle design of `U_theta`.
    Circles {
        /// List every circle.
        #[arg(long)]
        list: bool,
    },
    /// Wilbrink condition II at one vertex or all of them.
    Wilbrink {
        #[arg(long, conflicts_with = "all")]
        vertex: Option<u64>,
        #[arg(long)]
        all: bool,
        /// Require the condition only for some block through the vertex.
        #[arg(long)]
        weak: bool,
    },
    /// O'Nan configurations.
    Onan {
        #[command(subcommand)]
        action: OnanCmd,
    },
    /// Unitary polarities and their absolute points.
    Polarity {
        #[command(subcommand)]
        action: PolarityCmd,
    },
    /// Fixing subgroups of sigma and shift collineations.
    Subgroups,
    /// Invariant profiles of two unitals.
    Compare {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ONAN_BUDGET)]
        budget: u64,
    },
    /// The acceptance matrix.
    Suite {
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        #[arg(long)]
        full: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
pub enum FieldCmd {
    Check,
}

#[derive(Subcommand, Debug)]
pub enum PlanarCmd {
    Verify,
}

#[derive(Subcommand, Debug)]
pub enum PlaneCmd {
    Verify,
    /// Print every line as `L <id> : <point ids>`.
    Dump {
        #[arg(long, required = true)]
        lines: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum UnitalCmd {
    Build {
        /// Also write the unital in the text file format.
        #[arg(long)]
        unital_out: Option<PathBuf>,
    },
    Verify,
    Dual,
    Ovals,
}

#[derive(Subcommand, Debug)]
pub enum OnanCmd {
    Find {
        #[arg(long, value_enum, default_value_t = Search::ThroughInfinity)]
        search: Search,
        #[arg(long, default_value_t = DEFAULT_ONAN_BUDGET)]
        budget: u64,
        /// Print only the count.
        #[arg(long)]
        count_only: bool,
    },
    Construct,
}

#[derive(Subcommand, Debug)]
pub enum PolarityCmd {
    Build {
        #[arg(long)]
        unital_out: Option<PathBuf>,
    },
    Verify,
}

/// Why a command did not complete.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs; exit code 2.
    Usage(String),
    /// A mathematical check failed outside a recorded check; exit code 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::BadSpec(..)
            | Error::SpecConstraintViolated(_)
            | Error::NotPrime(_)
            | Error::EvenCharacteristic(_)
            | Error::NotIrreducible(_)
            | Error::FieldTooLarge(..)
            | Error::OddDegree(_)
            | Error::TooLarge(_)
            | Error::Io(_)
            | Error::Format(_)
            | Error::FamilyMismatch(_)
            | Error::WrongProvenance(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(flag: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{flag}: {e}"))
}

/// Parsed flags with lazily built field, plane and unital.
struct Env {
    c: Common,
    mode: Mode,
}

impl Env {
    fn new(c: Common) -> Env {
        let mode = match c.mode {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::Sampled => Mode::Sampled { seed: c.seed, trials: c.trials },
        };
        Env { c, mode }
    }

    fn p_m(&self) -> Outcome<(u32, u32)> {
        match (self.c.p, self.c.m) {
            (Some(p), Some(m)) => Ok((p, m)),
            (None, _) => Err(Failure::Usage("--p is required".into())),
            (_, None) => Err(Failure::Usage("--m is required".into())),
        }
    }

    fn modulus(&self) -> Outcome<Option<Vec<u32>>> {
        let Some(s) = &self.c.modulus else { return Ok(None) };
        s.trim_matches(|c| c == '[' || c == ']')
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|e| Failure::Usage(format!("--modulus: {e}")))
    }

    fn field(&self) -> Outcome<Arc<FieldCtx>> {
        let (p, m) = self.p_m()?;
        FieldCtx::new(p, m, self.modulus()?).map_err(usage("--p/--m/--modulus"))
    }

    fn function(&self) -> Outcome<Arc<PlanarFunction>> {
        let (p, m) = self.p_m()?;
        let modulus = self.modulus()?;
        FieldCtx::new(p, m, modulus.clone()).map_err(usage("--p/--m/--modulus"))?;
        PlanarFunction::from_parts(p, m, modulus, &self.c.spec).map_err(usage("--spec"))
    }

    fn plane(&self) -> Outcome<Arc<Plane>> {
        Ok(Plane::new(self.function()?))
    }

    fn theta(&self, pl: &Plane) -> Outcome<FieldElem> {
        if self.c.theta == "auto" {
            return Ok(unital::auto_theta(pl)?);
        }
        let i: u32 = self.c.theta.parse().map_err(|_| Failure::Usage(format!("--theta: expected auto or an index, got {:?}", self.c.theta)))?;
        if i == 0 || i >= pl.ctx().size() {
            return Err(Failure::Usage(format!("--theta: index {i} is not a nonzero element")));
        }
        Ok(FieldElem(i))
    }

    fn kappa(&self) -> Outcome<Involution> {
        self.c.kappa.parse().map_err(usage("--kappa"))
    }

    fn descriptor(&self) -> String {
        self.field().map(|f| f.descriptor()).unwrap_or_default()
    }

    /// The unital named by `--input`, else the one built by `--source`.
    fn unital(&self) -> Outcome<Unital> {
        if let Some(path) = &self.c.input {
            return load_unital(path);
        }
        match self.c.source {
            Source::Utheta => {
                let pl = self.plane()?;
                let theta = self.theta(&pl)?;
                Ok(unital::build_u_theta(&pl, theta)?)
            }
            Source::Polarity => {
                let pl = self.plane()?;
                Ok(unital::build_polarity_unital(&pl, self.kappa()?, self.mode)?.0)
            }
            Source::Classical => {
                let (p, m) = self.p_m()?;
                if m % 2 != 0 {
                    return Err(Failure::Usage("--m: the classical unital needs even m".into()));
                }
                unital::build_classical_baseline(p, m / 2).map_err(usage("--p/--m"))
            }
        }
    }
}

/// Reads a unital file (`UNITAL v1`) or a certificate holding a unital.
pub fn load_unital(path: &Path) -> Outcome<Unital> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let r = if text.starts_with("UNITAL v1") {
        Unital::read_from(text.as_bytes())
    } else {
        Certificate::from_json(&text).and_then(|c| c.unital())
    };
    r.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn file_digest(path: &Path) -> String {
    fs::read(path).map(|b| hex::encode(Sha256::digest(&b))).unwrap_or_default()
}

fn ids(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn command_name(cmd: &Command) -> String {
    let s = match cmd {
        Command::Field { .. } => "field check",
        Command::Planar { .. } => "planar verify",
        Command::Plane { action: PlaneCmd::Verify } => "plane verify",
        Command::Plane { action: PlaneCmd::Dump { .. } } => "plane dump",
        Command::Unital { action } => match action {
            UnitalCmd::Build { .. } => "unital build",
            UnitalCmd::Verify => "unital verify",
            UnitalCmd::Dual => "unital dual",
            UnitalCmd::Ovals => "unital ovals",
        },
        Command::Circles { .. } => "circles",
        Command::Wilbrink { .. } => "wilbrink",
        Command::Onan { action: OnanCmd::Find { .. } } => "onan find",
        Command::Onan { action: OnanCmd::Construct } => "onan construct",
        Command::Polarity { action: PolarityCmd::Build { .. } } => "polarity build",
        Command::Polarity { action: PolarityCmd::Verify } => "polarity verify",
        Command::Subgroups => "subgroups",
        Command::Compare { .. } => "compare",
        Command::Suite { .. } => "suite",
    };
    s.into()
}

/// Command arguments that change the result, recorded in the run config.
fn extra_args(cmd: &Command, env: &Env) -> BTreeMap<String, String> {
    let mut x = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        x.insert(k.to_string(), v);
    };
    match cmd {
        Command::Circles { list } => put("list", list.to_string()),
        Command::Wilbrink { vertex, all, weak } => {
            put("vertex", vertex.map(|v| v.to_string()).unwrap_or_default());
            put("all", all.to_string());
            put("weak", weak.to_string());
        }
        Command::Onan { action: OnanCmd::Find { search, budget, count_only } } => {
            put("search", format!("{search:?}"));
            put("budget", budget.to_string());
            put("count_only", count_only.to_string());
        }
        Command::Compare { left, right, budget } => {
            put("left", file_digest(left));
            put("right", file_digest(right));
            put("budget", budget.to_string());
        }
        Command::Suite { quick, only, .. } => {
            put("quick", quick.to_string());
            put("only", format!("{only:?}"));
        }
        _ => {}
    }
    let uses_unital = matches!(
        cmd,
        Command::Unital { .. } | Command::Circles { .. } | Command::Wilbrink { .. } | Command::Onan { .. } | Command::Subgroups
    );
    if uses_unital {
        put("source", format!("{:?}", env.c.source));
        if let Some(p) = &env.c.input {
            put("input", file_digest(p));
        }
    }
    x
}

fn field_check(env: &Env, cert: &mut Certificate) -> Outcome<()> {
    let f = env.field()?;
    cert.check(Check::pass("modulus irreducible", &Mode::Exhaustive));
    cert.line(f.descriptor());
    cert.line(format!("size={}", f.size()));
    let split = ExtensionSplit::new(f.clone());
    cert.check(Check::from_result("subfield split", &Mode::Exhaustive, &split));
    if let Ok(split) = &split {
        cert.line(format!("q={} xi={} alpha={} theta={}", split.q(), split.xi(), split.alpha(), split.choose_theta()));
        cert.put("xi", split.xi());
        cert.put("alpha", split.alpha());
    }
    // Table arithmetic against the schoolbook polynomial reference.
    let n = f.size();
    let pairs: Vec<(u32, u32)> = if n <= 1024 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        use rand::Rng;
        let mut rng = Mode::Sampled { seed: env.c.seed, trials: 0 }.rng();
        (0..env.c.trials).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
    };
    let arith_mode = if n <= 1024 { Mode::Exhaustive } else { Mode::Sampled { seed: env.c.seed, trials: env.c.trials } };
    let bad = pairs.iter().find(|&&(a, b)| {
        let (a, b) = (FieldElem(a), FieldElem(b));
        f.add(a, b) != f.add_reference(a, b) || f.mul(a, b) != f.mul_reference(a, b)
    });
    match bad {
        None => cert.check(Check::pass("arithmetic matches reference", &arith_mode)),
        Some(&(a, b)) => cert.check(Check::fail("arithmetic matches reference", &arith_mode, json!({"a": a, "b": b}))),
    }
    if n <= 25 {
        let mut mismatch = None;
        'outer: for a0 in f.elements() {
            for a1 in f.elements() {
                for a2 in f.elements() {
                    let mut counts = vec![0i64; n as usize];
                    for x0 in f.elements() {
                        for x1 in f.elements() {
                            let v = f.add(f.add(f.mul(a0, f.mul(x0, x0)), f.mul(a1, f.mul(x0, x1))), f.mul(a2, f.mul(x1, x1)));
                            counts[v.0 as usize] += 1;
                        }
                    }
                    for b in f.elements() {
                        if let Ok(k) = f.quadratic_solution_count(a0, a1, a2, b) {
                            if k != counts[b.0 as usize] {
                                mismatch = Some(json!({"a0": a0.0, "a1": a1.0, "a2": a2.0, "b": b.0}));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        match mismatch {
            None => cert.check(Check::pass("quadratic count formula", &Mode::Exhaustive)),
            Some(w) => cert.check(Check::fail("quadratic count formula", &Mode::Exhaustive, w)),
        }
    }
    Ok(())
}

fn planar_verify(env: &Env, cert: &mut Certificate) -> Outcome<()> {
    let f = env.function()?;
    let pc = f.certify(env.mode);
    let find = |pred: fn(&Witness) -> bool| pc.witnesses.iter().find(|w| pred(w)).map(|w| serde_json::to_value(w).unwrap());
    let planar = find(|w| matches!(w, Witness::NotPlanar { .. }));
    let normal = find(|w| matches!(w, Witness::NotNormal { .. } | Witness::NonzeroAtZero { .. }));
    let dist = find(|w| matches!(w, Witness::ValueDistribution { .. }));
    for (name, ok, w, mode) in [
        ("planar", pc.is_planar, planar, env.mode),
        ("normal", pc.is_normal, normal, Mode::Exhaustive),
        ("value distribution", pc.satisfies_value_distribution, dist, Mode::Exhaustive),
    ] {
        cert.check(if ok { Check::pass(name, &mode) } else { Check::fail(name, &mode, w.unwrap_or(Value::Null)) });
    }
    cert.line(format!("planar={} normal={} value_distribution={}", pc.is_planar, pc.is_normal, pc.satisfies_value_distribution));
    cert.put("planarity", &pc);
    Ok(())
}

fn plane_verify(env: &Env, cert: &mut Certificate) -> Outcome<()> {
    let pl = env.plane()?;
    let r = pl.verify_projective_plane(env.mode);
    if let Err(Error::TooLarge(m)) = &r {
        return Err(Failure::Usage(format!("--mode: {m}")));
    }
    cert.check(Check::from_result("projective plane axioms", &env.mode, &r));
    cert.line(format!("order={} points={} lines={}", pl.order(), pl.point_count(), pl.line_count()));
    if let Ok(r) = r {
        cert.put("plane", r);
    }
    Ok(())
}

fn certify_unital(env: &Env, u: &mut Unital, cert: &mut Certificate) -> Outcome<()> {
    let emb = u.verify_embedded(env.mode);
    cert.check(Check::from_result("line intersections 1 or q+1", &env.mode, &emb));
    if let Ok(e) = &emb {
        cert.line(format!("secants={} tangents={} lines_checked={}", e.secants, e.tangents, e.lines_checked));
        cert.put("embedding", e);
    }
    if u.q() <= EXHAUSTIVE_DESIGN_Q || !env.mode.is_exhaustive() {
        let d = u.verify_design(env.mode);
        cert.check(Check::from_result("2-design", &env.mode, &d));
        if let Ok(d) = &d {
            cert.line(format!("design v={} b={} k={} r={}", d.points, d.blocks, d.block_size, d.replication));
            cert.put("design", d);
        }
    }
    Ok(())
}

fn describe_unital(u: &Unital, cert: &mut Certificate) {
    cert.field = u.plane().ctx().descriptor();
    cert.spec = u.plane().function().spec().to_string();
    cert.line(format!("provenance={}", u.provenance()));
    cert.line(format!("points={}", u.points().len()));
    cert.put_unital(u);
}

fn write_unital(u: &Unital, path: &Option<PathBuf>) -> Outcome<()> {
    if let Some(path) = path {
        let file = fs::File::create(path).map_err(|e| Failure::Usage(format!("--unital-out: {e}")))?;
        let mut w = BufWriter::new(file);
        u.write_to(&mut w)?;
        w.flush().map_err(|e| Failure::Usage(format!("--unital-out: {e}")))?;
    }
    Ok(())
}

fn unital_cmd(env: &Env, action: &UnitalCmd, cert: &mut Certificate) -> Outcome<()> {
    let mut u = env.unital()?;
    describe_unital(&u, cert);
    if let Some(t) = u.theta() {
        cert.put("theta", t);
    }
    match action {
        UnitalCmd::Build { unital_out } => {
            certify_unital(env, &mut u, cert)?;
            write_unital(&u, unital_out)?;
        }
        UnitalCmd::Verify => certify_unital(env, &mut u, cert)?,
        UnitalCmd::Dual => {
            let d = unital::dual_unital(&u);
            cert.check(Check::from_result("switch image equals unital", &Mode::Exhaustive, &d));
            if let Ok(d) = d {
                cert.line(format!("dual provenance={}", d.provenance()));
            }
        }
        UnitalCmd::Ovals => {
            let ovals = unital::ovals_decomposition(&u);
            cert.check(Check::from_result("oval decomposition", &Mode::Exhaustive, &ovals));
            for o in ovals.iter().flatten() {
                cert.line(format!("OVAL c={} points=[{}]", o.c, ids(&o.points)));
            }
        }
    }
    Ok(())
}

fn circles_cmd(env: &Env, list: bool, cert: &mut Certificate) -> Outcome<()> {
    let u = env.unital()?;
    describe_unital(&u, cert);
    if list {
        for c in analysis::circles(&u)? {
            let m: Vec<String> = c.members.iter().map(|x| x.to_string()).collect();
            cert.line(format!("CIRCLE a={} beta={} members=[{}]", c.a, c.beta, m.join(",")));
        }
    }
    let r = analysis::verify_circle_design(&u);
    if let Err(Error::TooLarge(m)) = &r {
        return Err(Failure::Usage(m.clone()));
    }
    cert.check(Check::from_result("circle 2-design", &Mode::Exhaustive, &r));
    if let Ok(r) = r {
        cert.line(format!("circles={} size={} lambda={}", r.circles, r.circle_size, r.lambda));
        cert.put("circle_design", r);
    }
    Ok(())
}

fn wilbrink_cmd(env: &Env, vertex: Option<u64>, all: bool, weak: bool, cert: &mut Certificate) -> Outcome<()> {
    let u = env.unital()?;
    describe_unital(&u, cert);
    let reports = if all {
        analysis::wilbrink_all(&u, !weak)?
    } else {
        let v = vertex.unwrap_or_else(|| u.plane().infinity_id());
        if !u.contains(v) {
            return Err(Failure::Usage(format!("--vertex: point {v} is not on the unital")));
        }
        vec![analysis::wilbrink_vertex_check(&u, v, !weak)?]
    };
    for r in &reports {
        cert.line(r.to_string());
    }
    let strong: Vec<u64> = reports.iter().filter(|r| r.strong).map(|r| r.vertex).collect();
    cert.line(format!("strong_vertices={}", strong.len()));
    cert.put("wilbrink", &reports);
    cert.check(Check::pass("wilbrink evaluation", &Mode::Exhaustive));
    Ok(())
}

fn onan_cmd(env: &Env, action: &OnanCmd, cert: &mut Certificate) -> Outcome<()> {
    let u = env.unital()?;
    describe_unital(&u, cert);
    match action {
        OnanCmd::Find { search: Search::ThroughInfinity, count_only, .. } => {
            let count = if *count_only {
                let t = analysis::onan_through_point_count(&u)?;
                cert.line(format!("max_circle_intersection={}", t.max_circle_intersection));
                t.configs as usize
            } else {
                let configs = analysis::find_onan_through_point(&u)?;
                for c in &configs {
                    cert.line(c.to_string());
                }
                configs.len()
            };
            cert.line(format!("count={count}"));
            cert.put("count", count);
            cert.check(Check::pass("configurations through (inf) match the pattern", &Mode::Exhaustive));
        }
        OnanCmd::Find { search: Search::Exhaustive, budget, count_only } => {
            let s = analysis::find_onan_exhaustive(&u, *budget)?;
            if !count_only {
                for c in &s.configs {
                    cert.line(c.to_string());
                }
            }
            cert.line(format!("count={}", s.configs.len()));
            cert.line(format!("complete={} explored={}", s.complete, s.explored));
            cert.put("count", s.configs.len());
            cert.put("complete", s.complete);
            cert.put("explored", s.explored);
            cert.check(Check::pass("configurations match the pattern", &Mode::Exhaustive));
        }
        OnanCmd::Construct => {
            let r = analysis::construct_onan_explicit(&u);
            cert.check(Check::from_result("explicit construction", &Mode::Exhaustive, &r));
            if let Ok(e) = r {
                cert.line(e.config.to_string());
                cert.line(format!("omega={} a=[{},{},{}] t=[{},{},{}]", e.omega, e.a[0], e.a[1], e.a[2], e.t[0], e.t[1], e.t[2]));
                cert.line(format!("closed_form_agrees={}", e.closed_form_agrees));
                let name = "closed form agrees";
                cert.check(if e.closed_form_agrees {
                    Check::pass(name, &Mode::Exhaustive)
                } else {
                    Check::fail(name, &Mode::Exhaustive, Value::String(e.config.to_string()))
                });
                cert.put("explicit", e);
            }
        }
    }
    Ok(())
}

fn polarity_cmd(env: &Env, action: &PolarityCmd, cert: &mut Certificate) -> Outcome<()> {
    let pl = env.plane()?;
    let kappa = env.kappa()?;
    cert.put("kappa", kappa);
    let (report, u) = match action {
        PolarityCmd::Verify => (unital::verify_polarity(&pl, kappa, env.mode), None),
        PolarityCmd::Build { .. } => match unital::build_polarity_unital(&pl, kappa, env.mode) {
            Ok((u, r)) => (Ok(r), Some(u)),
            Err(e) => (Err(e), None),
        },
    };
    if let Err(Error::TooLarge(m)) = &report {
        return Err(Failure::Usage(format!("--mode: {m}")));
    }
    cert.check(Check::from_result("unitary polarity", &env.mode, &report));
    if let Ok(r) = &report {
        cert.line(format!("kappa={kappa} absolute_points={} incident_pairs_checked={}", r.absolute_points, r.incident_pairs_checked));
        cert.put("polarity", r);
    }
    if let (Some(u), PolarityCmd::Build { unital_out }) = (u, action) {
        describe_unital(&u, cert);
        write_unital(&u, unital_out)?;
    }
    Ok(())
}

fn subgroups_cmd(env: &Env, cert: &mut Certificate) -> Outcome<()> {
    let u = env.unital()?;
    describe_unital(&u, cert);
    let mut reports = vec![analysis::fixing_subgroup_sigma(&u)?];
    if matches!(u.plane().function().spec().family(), Family::CoulterMatthews { .. }) {
        reports.push(analysis::fixing_subgroup_shift_cm(&u)?);
    }
    for r in &reports {
        cert.line(format!(
            "SUBGROUP {} order={} abelian={} ({}) fixes_unital={}",
            r.name, r.order, r.is_abelian, r.abelian_check, r.fixes_unital
        ));
        if let Some((g, h)) = &r.commutator_witness {
            cert.line(format!("  non-commuting pair: {g} {h}"));
        }
        let name = format!("{} fixes the unital", r.name);
        cert.check(if r.fixes_unital {
            Check::pass(&name, &Mode::Exhaustive)
        } else {
            Check::fail(&name, &Mode::Exhaustive, Value::String(r.generators.clone()))
        });
        if let Some(closed) = r.closed {
            let name = format!("{} closed under composition", r.name);
            cert.check(if closed { Check::pass(&name, &Mode::Exhaustive) } else { Check::fail(&name, &Mode::Exhaustive, Value::Null) });
        }
    }
    if u.q() <= 3 && u.plane().function().spec().is_dembowski_ostrom() {
        let r = analysis::verify_sigma_composition_law(u.plane());
        cert.check(Check::from_result("sigma composition law", &Mode::Exhaustive, &r));
    }
    cert.put("subgroups", &reports);
    Ok(())
}

fn compare_cmd(left: &Path, right: &Path, budget: u64, cert: &mut Certificate) -> Outcome<()> {
    let l = load_unital(left)?;
    let r = load_unital(right)?;
    let c = analysis::compare(&l, &r, budget)?;
    cert.line(c.verdict.to_string());
    cert.put("comparison", &c);
    cert.check(Check::pass("profiles computed", &Mode::Exhaustive));
    Ok(())
}

fn suite_cmd(quick: bool, only: &[u32], cert: &mut Certificate) -> Outcome<()> {
    let ids: Vec<u32> = if only.is_empty() { (1..=12).collect() } else { only.to_vec() };
    let mut outcomes = Vec::new();
    for &id in &ids {
        outcomes.push(suite::run(id, quick).ok_or_else(|| Failure::Usage(format!("--only: no criterion {id}")))?);
    }
    cert.line("| id | status | criterion".to_string());
    cert.line("|----|--------|----------".to_string());
    for o in &outcomes {
        cert.line(format!("| {:>2} | {} | {}", o.id, if o.passed { "PASS  " } else { "FAIL  " }, o.title));
    }
    for o in &outcomes {
        for d in &o.details {
            cert.line(format!("  [{}] {d}", o.id));
        }
        let name = format!("criterion {}: {}", o.id, o.title);
        let failed: Vec<&String> = o.details.iter().filter(|d| d.starts_with("FAILED")).collect();
        cert.check(if o.passed {
            Check::pass(&name, &Mode::Exhaustive)
        } else {
            Check::fail(&name, &Mode::Exhaustive, json!(failed))
        });
    }
    cert.put("outcomes", &outcomes);
    Ok(())
}

fn execute(cmd: &Command, env: &Env, cert: &mut Certificate) -> Outcome<()> {
    match cmd {
        Command::Field { .. } => field_check(env, cert),
        Command::Planar { .. } => planar_verify(env, cert),
        Command::Plane { .. } => plane_verify(env, cert),
        Command::Unital { action } => unital_cmd(env, action, cert),
        Command::Circles { list } => circles_cmd(env, *list, cert),
        Command::Wilbrink { vertex, all, weak } => wilbrink_cmd(env, *vertex, *all, *weak, cert),
        Command::Onan { action } => onan_cmd(env, action, cert),
        Command::Polarity { action } => polarity_cmd(env, action, cert),
        Command::Subgroups => subgroups_cmd(env, cert),
        Command::Compare { left, right, budget } => compare_cmd(left, right, *budget, cert),
        Command::Suite { quick, only, .. } => suite_cmd(*quick, only, cert),
    }
}

fn render_text(cert: &Certificate, out: &mut impl Write) -> io::Result<()> {
    for l in &cert.report {
        writeln!(out, "{l}")?;
    }
    for c in &cert.checks {
        let status = if c.status == Status::Pass { "pass" } else { "FAIL" };
        write!(out, "CHECK {} {status} ({})", c.name, c.mode)?;
        if let Some(w) = &c.witness {
            write!(out, " witness={w}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "hash={}", cert.hash)
}

fn dump(env: &Env) -> Outcome<()> {
    let pl = env.plane()?;
    let io_err = |e: io::Error| Failure::Usage(format!("--out: {e}"));
    match &env.c.out {
        Some(path) => {
            let mut w = BufWriter::new(fs::File::create(path).map_err(io_err)?);
            pl.dump_lines(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            pl.dump_lines(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let env = Env::new(cli.common.clone());
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(env.c.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: --threads: {e}");
            return 2;
        }
    };
    let result = pool.install(|| -> Outcome<Option<Certificate>> {
        if let Command::Plane { action: PlaneCmd::Dump { .. } } = cli.command {
            dump(&env)?;
            return Ok(None);
        }
        let config = RunConfig {
            command: command_name(&cli.command),
            field: env.descriptor(),
            spec: env.c.spec.clone(),
            theta: env.c.theta.clone(),
            kappa: env.c.kappa.clone(),
            mode: env.mode.to_string(),
            threads: env.c.threads,
            format: format!("{:?}", env.c.format).to_lowercase(),
            cache_dir: env.c.cache_dir.clone(),
            extra: extra_args(&cli.command, &env),
        };
        let cache = Cache::locate(env.c.cache_dir.as_deref());
        if let Some(hit) = cache.as_ref().and_then(|c| c.get(&config)) {
            return Ok(Some(hit));
        }
        let mut cert = Certificate::new(config);
        execute(&cli.command, &env, &mut cert)?;
        cert.seal();
        if let Some(c) = &cache {
            c.put(&cert)?;
        }
        Ok(Some(cert))
    });
    let cert = match result {
        Ok(None) => return 0,
        Ok(Some(c)) => c,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return 2;
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            return 1;
        }
    };
    if let Some(path) = &env.c.out {
        if let Err(e) = fs::write(path, cert.to_json()) {
            eprintln!("error: --out: {e}");
            return 2;
        }
    }
    let stdout = io::stdout();
    let mut w = BufWriter::new(stdout.lock());
    let written = match env.c.format {
        Format::Text => render_text(&cert, &mut w),
        Format::Json => writeln!(w, "{}", cert.to_json()),
    };
    if written.and_then(|_| w.flush()).is_err() {
        return 2;
    }
    if cert.passed() {
        0
    } else {
        1
    }
}

/// Parses `std::env::args` and runs; clap usage errors exit with 2.
pub fn main_entry() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
