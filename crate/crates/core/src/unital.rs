//! Unitals embedded in a shift plane: the `U_theta` family, the general
//! construction from injections, polarity unitals, duals and ovals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{ExtensionSplit, FieldCtx, FieldElem};
use crate::mode::Mode;
use crate::planar::{PlanarFunction, PlanarFunctionSpec};
use crate::plane::{Collineation, Line, Plane, Point};

/// Upper bound on materialized unital sizes.
pub const MAX_UNITAL_POINTS: u64 = 1 << 22;
/// Largest line count for which an exhaustive line sweep is attempted.
pub const MAX_SWEEP_LINES: u64 = 1 << 24;
/// Largest unital order for which pair coverage is checked exhaustively.
pub const EXHAUSTIVE_DESIGN_Q: u64 = 9;
/// Largest unital order for which polarity incidence reversal is checked exhaustively.
pub const EXHAUSTIVE_POLARITY_Q: u64 = 5;

/// An additive involution of `F_{q^2}` used to define a polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Involution {
    /// `x -> x^q`
    FrobQ,
    /// `x0 + x1 xi -> x0 - x1 xi`
    ConjXi,
}

impl Involution {
    pub fn apply(&self, split: &ExtensionSplit, x: FieldElem) -> FieldElem {
        match self {
            Involution::FrobQ => split.conj(x),
            Involution::ConjXi => {
                let (x0, x1) = split.decompose(x);
                split.recompose(x0, split.ctx().neg(x1))
            }
        }
    }
}

impl fmt::Display for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Involution::FrobQ => "frobq",
            Involution::ConjXi => "conjxi",
        })
    }
}

impl FromStr for Involution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frobq" => Ok(Involution::FrobQ),
            "conjxi" => Ok(Involution::ConjXi),
            _ => Err(Error::Format(format!("unknown involution {s:?}"))),
        }
    }
}

/// How a unital was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    UTheta { theta: u32 },
    General { description: String },
    Polarity { kappa: Involution },
    Dual { of: Box<Provenance> },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::UTheta { theta } => write!(f, "utheta:theta={theta}"),
            Provenance::General { description } => write!(f, "general:{description}"),
            Provenance::Polarity { kappa } => write!(f, "polarity:kappa={kappa}"),
            Provenance::Dual { of } => write!(f, "dual:{of}"),
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("bad provenance {s:?}"));
        if let Some(rest) = s.strip_prefix("dual:") {
            return Ok(Provenance::Dual { of: Box::new(rest.parse()?) });
        }
        if let Some(rest) = s.strip_prefix("utheta:theta=") {
            return Ok(Provenance::UTheta { theta: rest.parse().map_err(|_| bad())? });
        }
        if let Some(rest) = s.strip_prefix("polarity:kappa=") {
            return Ok(Provenance::Polarity { kappa: rest.parse()? });
        }
        if let Some(rest) = s.strip_prefix("general:") {
            return Ok(Provenance::General { description: rest.to_string() });
        }
        Err(bad())
    }
}

/// Which checks a unital has passed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verified {
    pub embedded: bool,
    pub design: bool,
}

/// A point set of size `q^3 + 1` in a shift plane.
#[derive(Clone)]
pub struct Unital {
    plane: Arc<Plane>,
    provenance: Provenance,
    points: Vec<u64>,
    pub verified: Verified,
}

impl fmt::Debug for Unital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Unital")
            .field("provenance", &self.provenance.to_string())
            .field("points", &self.points.len())
            .field("verified", &self.verified)
            .finish()
    }
}

/// Histogram of `theta1 f0 - theta0 f1` over `F_{q^2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub holds: bool,
    /// `(value index, preimage count)` for every value that occurs.
    pub histogram: BTreeMap<u32, usize>,
    /// First value (in index order) whose count is wrong.
    pub witness: Option<(u32, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub mode: Mode,
    pub lines_checked: u64,
    pub tangents: u64,
    pub secants: u64,
    /// Present for exhaustive sweeps: every point lies on exactly one tangent.
    pub one_tangent_per_point: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub mode: Mode,
    pub points: usize,
    pub blocks: usize,
    pub block_size: usize,
    pub replication: usize,
    pub pairs_checked: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarityReport {
    pub mode: Mode,
    pub kappa: Involution,
    pub absolute_points: u64,
    pub incident_pairs_checked: u64,
}

/// A block of the design: a secant line and the unital points on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub line: u64,
    pub points: Vec<u64>,
}

/// An oval `O_c = {(x, c)} + (inf)` of a `U_theta` decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oval {
    pub c: FieldElem,
    pub points: Vec<u64>,
}

/// `theta1 f0(x) - theta0 f1(x)` with `theta = theta0 + theta1 xi`.
pub fn phi(f: &PlanarFunction, theta: FieldElem, x: FieldElem) -> FieldElem {
    let ctx = f.ctx();
    let (t0, t1) = f.split().decompose(theta);
    let (f0, f1) = f.components(x);
    ctx.sub(ctx.mul(t1, f0), ctx.mul(t0, f1))
}

/// Checks that `theta1 f0 - theta0 f1` takes 0 once and every nonzero value of `F_q` exactly `q+1` times.
pub fn check_utheta_hypothesis(plane: &Plane, theta: FieldElem) -> Result<HypothesisReport> {
    if theta.is_zero() {
        return Err(Error::ZeroTheta);
    }
    let f = plane.function();
    let split = f.split();
    let q = split.q() as usize;
    let mut counts: BTreeMap<u32, usize> = split.subfield().iter().map(|c| (c.0, 0)).collect();
    for x in f.ctx().elements() {
        *counts.entry(phi(f, theta, x).0).or_insert(0) += 1;
    }
    let witness = counts
        .iter()
        .find(|&(&v, &c)| c != if v == 0 { 1 } else { q + 1 })
        .map(|(&v, &c)| (v, c));
    counts.retain(|_, c| *c > 0);
    Ok(HypothesisReport { holds: witness.is_none(), histogram: counts, witness })
}

impl Unital {
    pub fn plane(&self) -> &Arc<Plane> {
        &self.plane
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Sorted point IDs.
    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn q(&self) -> u64 {
        self.plane.q()
    }

    pub fn theta(&self) -> Option<FieldElem> {
        match self.provenance {
            Provenance::UTheta { theta } => Some(FieldElem(theta)),
            _ => None,
        }
    }

    /// Wraps an arbitrary point set; nothing is verified.
    pub fn from_points(plane: Arc<Plane>, provenance: Provenance, mut points: Vec<u64>) -> Unital {
        points.sort_unstable();
        points.dedup();
        Unital { plane, provenance, points, verified: Verified::default() }
    }

    fn materialize_guard(plane: &Plane) -> Result<()> {
        let q = plane.q();
        if q * q * q + 1 > MAX_UNITAL_POINTS {
            return Err(Error::TooLarge(format!("unital of order {q} has more than {MAX_UNITAL_POINTS} points")));
        }
        Ok(())
    }

    pub fn contains(&self, id: u64) -> bool {
        self.points.binary_search(&id).is_ok()
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.contains(self.plane.point_id(p))
    }

    /// Number of unital points on each line, indexed by line ID.
    pub fn line_counts(&self) -> Result<Vec<u32>> {
        let pl = &self.plane;
        if pl.line_count() > MAX_SWEEP_LINES {
            return Err(Error::TooLarge(format!("{} lines exceed the sweep limit", pl.line_count())));
        }
        let mut counts = vec![0u32; pl.line_count() as usize];
        for &id in &self.points {
            for l in pl.lines_through(&pl.point(id).unwrap()) {
                counts[pl.line_id(&l) as usize] += 1;
            }
        }
        Ok(counts)
    }

    /// Checks that every line meets the set in 1 or `q+1` points.
    pub fn verify_embedded(&mut self, mode: Mode) -> Result<EmbeddingReport> {
        let pl = self.plane.clone();
        let q = pl.q();
        let expected = q * q * q + 1;
        if self.points.len() as u64 != expected {
            return Err(Error::BlockCountMismatch { found: self.points.len(), expected: expected as usize });
        }
        let ok = |c: u64| c == 1 || c == q + 1;
        match mode {
            Mode::Exhaustive => {
                let counts = self.line_counts()?;
                if let Some((line, &c)) = counts.iter().enumerate().find(|(_, &c)| !ok(c as u64)) {
                    return Err(Error::IntersectionViolation { line: line as u64, count: c as usize });
                }
                for &id in &self.points {
                    let t = pl
                        .lines_through(&pl.point(id).unwrap())
                        .iter()
                        .filter(|l| counts[pl.line_id(l) as usize] == 1)
                        .count();
                    if t != 1 {
                        return Err(Error::TangentViolation { point: id, count: t });
                    }
                }
                let tangents = counts.iter().filter(|&&c| c == 1).count() as u64;
                self.verified.embedded = true;
                Ok(EmbeddingReport {
                    mode,
                    lines_checked: counts.len() as u64,
                    tangents,
                    secants: counts.len() as u64 - tangents,
                    one_tangent_per_point: Some(true),
                })
            }
            Mode::Sampled { trials, .. } => {
                // stratified: the line at infinity, a share of verticals, the rest shifted
                let n = pl.order();
                let mut rng = mode.rng();
                let mut ids = vec![pl.line_id(&Line::AtInfinity)];
                let verticals = (trials / 10).max(1);
                ids.extend((0..verticals).map(|_| n * n + rng.gen_range(0..n)));
                ids.extend((0..trials.saturating_sub(verticals + 1)).map(|_| rng.gen_range(0..n * n)));
                ids.sort_unstable();
                ids.dedup();
                let mut tangents = 0;
                for &id in &ids {
                    let l = pl.line(id).unwrap();
                    let c = pl.points_on_line(&l).iter().filter(|p| self.contains_point(p)).count() as u64;
                    if !ok(c) {
                        return Err(Error::IntersectionViolation { line: id, count: c as usize });
                    }
                    tangents += (c == 1) as u64;
                }
                self.verified.embedded = true;
                Ok(EmbeddingReport {
                    mode,
                    lines_checked: ids.len() as u64,
                    tangents,
                    secants: ids.len() as u64 - tangents,
                    one_tangent_per_point: None,
                })
            }
        }
    }

    /// Secant lines with their unital points, in line-ID order.
    pub fn blocks(&self) -> Result<Vec<Block>> {
        let pl = &self.plane;
        let counts = self.line_counts()?;
        let q = pl.q() as u32;
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut blocks: Vec<Block> = Vec::new();
        for (line, &c) in counts.iter().enumerate() {
            if c == q + 1 {
                index.insert(line as u64, blocks.len());
                blocks.push(Block { line: line as u64, points: Vec::with_capacity(c as usize) });
            }
        }
        for &id in &self.points {
            for l in pl.lines_through(&pl.point(id).unwrap()) {
                if let Some(&b) = index.get(&pl.line_id(&l)) {
                    blocks[b].points.push(id);
                }
            }
        }
        Ok(blocks)
    }

    /// Tangent lines, in ID order.
    pub fn tangent_lines(&self) -> Result<Vec<u64>> {
        Ok(self
            .line_counts()?
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(l, _)| l as u64)
            .collect())
    }

    /// Checks the 2-`(q^3+1, q+1, 1)` design property of the secant blocks.
    pub fn verify_design(&mut self, mode: Mode) -> Result<DesignReport> {
        let q = self.q() as usize;
        let blocks = self.blocks()?;
        let v = self.points.len();
        let expected = q * q * q * q - q * q * q + q * q;
        if blocks.len() != expected {
            return Err(Error::BlockCountMismatch { found: blocks.len(), expected });
        }
        if let Some(b) = blocks.iter().find(|b| b.points.len() != q + 1) {
            return Err(Error::IntersectionViolation { line: b.line, count: b.points.len() });
        }
        let local = |id: u64| self.points.binary_search(&id).unwrap();
        let mut replication = vec![0usize; v];
        for b in &blocks {
            for &p in &b.points {
                replication[local(p)] += 1;
            }
        }
        if let Some(i) = replication.iter().position(|&r| r != q * q) {
            return Err(Error::PairCoverageViolation(self.points[i], self.points[i], replication[i]));
        }
        let pairs_checked = match mode {
            Mode::Exhaustive if q as u64 <= EXHAUSTIVE_DESIGN_Q => {
                let mut cover = vec![0u8; v * v];
                for b in &blocks {
                    for (i, &a) in b.points.iter().enumerate() {
                        for &c in &b.points[i + 1..] {
                            let (x, y) = (local(a), local(c));
                            let k = x.min(y) * v + x.max(y);
                            cover[k] = cover[k].saturating_add(1);
                        }
                    }
                }
                for x in 0..v {
                    for y in x + 1..v {
                        let c = cover[x * v + y];
                        if c != 1 {
                            return Err(Error::PairCoverageViolation(self.points[x], self.points[y], c as usize));
                        }
                    }
                }
                (v * (v - 1) / 2) as u64
            }
            Mode::Exhaustive => {
                return Err(Error::TooLarge(format!("exhaustive pair coverage needs q <= {EXHAUSTIVE_DESIGN_Q}")))
            }
            Mode::Sampled { trials, .. } => {
                let mut rng = mode.rng();
                let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); v];
                for (bi, b) in blocks.iter().enumerate() {
                    for &p in &b.points {
                        by_point[local(p)].push(bi);
                    }
                }
                let mut checked = 0;
                while checked < trials {
                    let (x, y) = (rng.gen_range(0..v), rng.gen_range(0..v));
                    if x == y {
                        continue;
                    }
                    let c = by_point[x].iter().filter(|bi| by_point[y].contains(bi)).count();
                    if c != 1 {
                        return Err(Error::PairCoverageViolation(self.points[x], self.points[y], c));
                    }
                    checked += 1;
                }
                trials as u64
            }
        };
        self.verified.design = true;
        Ok(DesignReport { mode, points: v, blocks: blocks.len(), block_size: q + 1, replication: q * q, pairs_checked })
    }

    /// Image of the point set under a collineation, sorted.
    pub fn image(&self, g: &Collineation) -> Vec<u64> {
        let pl = &self.plane;
        let mut img: Vec<u64> = self
            .points
            .iter()
            .map(|&id| pl.point_id(&pl.apply(g, &pl.point(id).unwrap())))
            .collect();
        img.sort_unstable();
        img
    }

    /// Whether `g` maps the unital onto itself.
    pub fn is_fixed_by(&self, g: &Collineation) -> bool {
        let pl = &self.plane;
        self.points.iter().all(|&id| self.contains_point(&pl.apply(g, &pl.point(id).unwrap())))
    }

    /// Writes the text format: header lines then one point ID per line.
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "UNITAL v1")?;
        writeln!(out, "{}", self.plane.ctx().descriptor())?;
        writeln!(out, "{}", self.plane.function().spec())?;
        writeln!(out, "{}", self.provenance)?;
        for id in &self.points {
            writeln!(out, "{id}")?;
        }
        Ok(())
    }

    /// Reads the text format, rebuilding the plane from the header.
    pub fn read_from<R: BufRead>(input: R) -> Result<Unital> {
        let mut lines = input.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::Format(format!("missing {what}")))
        };
        if next("header")?.trim() != "UNITAL v1" {
            return Err(Error::Format("expected 'UNITAL v1' header".into()));
        }
        let descriptor = next("field descriptor")?;
        let spec = next("spec")?;
        let provenance = next("provenance")?;
        let mut points = Vec::new();
        while let Ok(line) = next("") {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            points.push(t.parse().map_err(|_| Error::Format(format!("bad point id {t:?}")))?);
        }
        Unital::from_header(descriptor.trim(), spec.trim(), provenance.trim(), points)
    }

    /// Rebuilds a unital from the header fields of the file format and its
    /// strictly ascending point IDs.
    pub fn from_header(descriptor: &str, spec: &str, provenance: &str, points: Vec<u64>) -> Result<Unital> {
        let ctx = FieldCtx::from_descriptor(descriptor)?;
        let split = ExtensionSplit::new(ctx)?;
        let spec = PlanarFunctionSpec::parse(spec, split)?;
        let provenance: Provenance = provenance.parse()?;
        let plane = Plane::new(PlanarFunction::new(spec));
        if let Some(&id) = points.iter().find(|&&id| id >= plane.point_count()) {
            return Err(Error::Format(format!("point id {id} out of range")));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("point ids must be strictly ascending".into()));
        }
        Ok(Unital { plane, provenance, points, verified: Verified::default() })
    }
}

/// Largest field order for which `auto_theta` scans every element.
pub const THETA_SCAN_LIMIT: u32 = 1 << 12;

/// A `theta` passing the unital hypothesis: the smallest one with nonsquare
/// norm, then `xi`, then (for small fields) a full scan.
pub fn auto_theta(plane: &Plane) -> Result<FieldElem> {
    let split = plane.function().split();
    for theta in [split.choose_theta(), split.xi()] {
        if check_utheta_hypothesis(plane, theta)?.holds {
            return Ok(theta);
        }
    }
    let f = plane.ctx();
    if f.size() <= THETA_SCAN_LIMIT {
        for theta in f.elements().skip(1) {
            if check_utheta_hypothesis(plane, theta)?.holds {
                return Ok(theta);
            }
        }
    }
    let theta = split.choose_theta();
    let rep = check_utheta_hypothesis(plane, theta)?;
    let (value, count) = rep.witness.unwrap_or_default();
    Err(Error::HypothesisFailed { theta: theta.0, value, count })
}

/// `U_theta = {(x, t theta) : t in F_q} + (inf)`.
pub fn build_u_theta(plane: &Arc<Plane>, theta: FieldElem) -> Result<Unital> {
    let rep = check_utheta_hypothesis(plane, theta)?;
    if let Some((value, count)) = rep.witness {
        return Err(Error::HypothesisFailed { theta: theta.0, value, count });
    }
    Unital::materialize_guard(plane)?;
    let f = plane.ctx();
    let sub = plane.function().split().subfield();
    let mut points: Vec<u64> = f
        .elements()
        .flat_map(|x| sub.iter().map(move |&t| (x, t)))
        .map(|(x, t)| plane.affine_id(x, f.mul(t, theta)))
        .collect();
    points.push(plane.infinity_id());
    points.sort_unstable();
    Ok(Unital { plane: plane.clone(), provenance: Provenance::UTheta { theta: theta.0 }, points, verified: Verified::default() })
}

/// A family of maps `g_x : F_q -> F_{q^2}` given as a table: row `x` lists
/// `g_x(t)` for `t` in subfield order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectionTable {
    pub rows: Vec<Vec<FieldElem>>,
    pub description: String,
}

impl InjectionTable {
    /// `g_x(t) = t theta + c`.
    pub fn affine(plane: &Plane, theta: FieldElem, c: FieldElem) -> InjectionTable {
        let f = plane.ctx();
        let sub = plane.function().split().subfield();
        let row: Vec<FieldElem> = sub.iter().map(|&t| f.add(f.mul(t, theta), c)).collect();
        InjectionTable {
            rows: vec![row; f.size() as usize],
            description: format!("t*{}+{}", theta.0, c.0),
        }
    }
}

/// The unital `{(x, g_x(t))} + (inf)`, certified by counting the solutions of
/// `f(x+a) - b = g_x(t)` for every `(a, b)`.
pub fn build_general(plane: &Arc<Plane>, g: &InjectionTable) -> Result<Unital> {
    let f = plane.ctx();
    let q = plane.q() as usize;
    let size = f.size() as usize;
    if g.rows.len() != size || g.rows.iter().any(|r| r.len() != q) {
        return Err(Error::Format(format!("injection table must be {size} x {q}")));
    }
    for (x, row) in g.rows.iter().enumerate() {
        let mut r = row.clone();
        r.sort_unstable();
        if r.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotInjective(x as u32));
        }
        if r.iter().any(|v| v.0 as usize >= size) {
            return Err(Error::Format(format!("row {x} has out-of-range values")));
        }
    }
    Unital::materialize_guard(plane)?;
    let func = plane.function();
    let mut counts = vec![0usize; size];
    for a in f.elements() {
        counts.iter_mut().for_each(|c| *c = 0);
        for x in f.elements() {
            let fx = func.eval(f.add(x, a));
            for &gt in &g.rows[x.0 as usize] {
                counts[f.sub(fx, gt).0 as usize] += 1;
            }
        }
        if let Some(b) = counts.iter().position(|&c| c != 1 && c != q + 1) {
            return Err(Error::CountViolation { a: a.0, b: b as u32, count: counts[b] });
        }
    }
    let mut points: Vec<u64> = g
        .rows
        .iter()
        .enumerate()
        .flat_map(|(x, row)| row.iter().map(move |&y| plane.affine_id(FieldElem(x as u32), y)))
        .collect();
    points.push(plane.infinity_id());
    points.sort_unstable();
    Ok(Unital {
        plane: plane.clone(),
        provenance: Provenance::General { description: g.description.clone() },
        points,
        verified: Verified::default(),
    })
}

/// Checks the three involution conditions: order two, commuting with `f`, and the fiber count `#{y : y + k(y) = f(x + k(x))} = q`.
pub fn check_involution(plane: &Plane, kappa: Involution) -> Result<()> {
    let func = plane.function();
    let split = func.split();
    let f = plane.ctx();
    let k = |x| kappa.apply(split, x);
    for x in f.elements() {
        if k(k(x)) != x {
            return Err(Error::ConditionAFailed(x.0));
        }
    }
    for x in f.elements() {
        if k(func.eval(x)) != func.eval(k(x)) {
            return Err(Error::ConditionBFailed(x.0));
        }
    }
    let mut fiber = vec![0usize; f.size() as usize];
    for y in f.elements() {
        fiber[f.add(y, k(y)).0 as usize] += 1;
    }
    let q = split.q() as usize;
    for x in f.elements() {
        let c = fiber[func.eval(f.add(x, k(x))).0 as usize];
        if c != q {
            return Err(Error::ConditionCFailed { x: x.0, count: c });
        }
    }
    Ok(())
}

/// The correlation `(x,y) -> L_{k(x),k(y)}`, `(a) -> N_{k(a)}`, `(inf) -> L_inf`.
pub fn polarity_point_to_line(plane: &Plane, kappa: Involution, p: &Point) -> Line {
    let split = plane.function().split();
    match *p {
        Point::Affine(x, y) => Line::Shifted(kappa.apply(split, x), kappa.apply(split, y)),
        Point::Slope(a) => Line::Vertical(kappa.apply(split, a)),
        Point::Infinity => Line::AtInfinity,
    }
}

/// Inverse direction of [`polarity_point_to_line`] on lines.
pub fn polarity_line_to_point(plane: &Plane, kappa: Involution, l: &Line) -> Point {
    let split = plane.function().split();
    match *l {
        Line::Shifted(a, b) => Point::Affine(kappa.apply(split, a), kappa.apply(split, b)),
        Line::Vertical(a) => Point::Slope(kappa.apply(split, a)),
        Line::AtInfinity => Point::Infinity,
    }
}

/// Verifies that the correlation defined by `kappa` is a unitary polarity.
pub fn verify_polarity(plane: &Plane, kappa: Involution, mode: Mode) -> Result<PolarityReport> {
    check_involution(plane, kappa)?;
    let n = plane.point_count();
    for id in 0..n {
        let p = plane.point(id).unwrap();
        let back = polarity_line_to_point(plane, kappa, &polarity_point_to_line(plane, kappa, &p));
        if back != p {
            return Err(Error::NotPolarity(format!("rho^2 moves point {id}")));
        }
    }
    let lines = match mode {
        Mode::Exhaustive if plane.q() <= EXHAUSTIVE_POLARITY_Q => plane.sample_lines(Mode::Exhaustive),
        Mode::Exhaustive => {
            return Err(Error::TooLarge(format!(
                "exhaustive incidence reversal needs q <= {EXHAUSTIVE_POLARITY_Q}"
            )))
        }
        sampled => plane.sample_lines(sampled),
    };
    let mut pairs = 0u64;
    for &lid in &lines {
        let l = plane.line(lid).unwrap();
        let lp = polarity_line_to_point(plane, kappa, &l);
        for p in plane.points_on_line(&l) {
            if !plane.incident(&lp, &polarity_point_to_line(plane, kappa, &p)) {
                return Err(Error::NotPolarity(format!(
                    "incidence of point {} and line {lid} is not reversed",
                    plane.point_id(&p)
                )));
            }
            pairs += 1;
        }
    }
    let absolute = (0..n)
        .filter(|&id| {
            let p = plane.point(id).unwrap();
            plane.incident(&p, &polarity_point_to_line(plane, kappa, &p))
        })
        .count() as u64;
    let q = plane.q();
    if absolute != q * q * q + 1 {
        return Err(Error::AbsoluteCountMismatch { found: absolute as usize, expected: (q * q * q + 1) as usize });
    }
    Ok(PolarityReport { mode, kappa, absolute_points: absolute, incident_pairs_checked: pairs })
}

/// The absolute points `{(x,y) : y + k(y) = f(x + k(x))} + (inf)` of a verified polarity.
pub fn build_polarity_unital(plane: &Arc<Plane>, kappa: Involution, mode: Mode) -> Result<(Unital, PolarityReport)> {
    let report = verify_polarity(plane, kappa, mode)?;
    Unital::materialize_guard(plane)?;
    let f = plane.ctx();
    let func = plane.function();
    let split = func.split();
    let mut by_sum: Vec<Vec<FieldElem>> = vec![Vec::new(); f.size() as usize];
    for y in f.elements() {
        by_sum[f.add(y, kappa.apply(split, y)).0 as usize].push(y);
    }
    let mut points = Vec::new();
    for x in f.elements() {
        let target = func.eval(f.add(x, kappa.apply(split, x)));
        points.extend(by_sum[target.0 as usize].iter().map(|&y| plane.affine_id(x, y)));
    }
    points.push(plane.infinity_id());
    points.sort_unstable();
    let mut u = Unital { plane: plane.clone(), provenance: Provenance::Polarity { kappa }, points, verified: Verified::default() };
    let sweep = if plane.line_count() <= MAX_SWEEP_LINES { Mode::Exhaustive } else { mode };
    u.verify_embedded(sweep)?;
    Ok((u, report))
}

/// The Hermitian unital of the Desarguesian plane of order `p^(2n)`.
pub fn build_classical_baseline(p: u32, n: u32) -> Result<Unital> {
    let plane = Plane::new(PlanarFunction::from_parts(p, 2 * n, None, "square")?);
    Ok(build_polarity_unital(&plane, Involution::FrobQ, Mode::Exhaustive)?.0)
}

/// The dual of a `U_theta`: its tangent lines, relabelled as points by the
/// switch `L_{a,b} <-> (a,b)`, `N_a <-> (a)`, `L_inf <-> (inf)`. Succeeds only
/// when the relabelled set equals the unital, which is the self-duality witness.
pub fn dual_unital(u: &Unital) -> Result<Unital> {
    if !matches!(u.provenance, Provenance::UTheta { .. }) {
        return Err(Error::WrongProvenance("utheta".into()));
    }
    let pl = &u.plane;
    let tangents = u.tangent_lines()?;
    let switched: Vec<u64> = tangents
        .iter()
        .map(|&l| {
            let p = match pl.line(l).unwrap() {
                Line::Shifted(a, b) => Point::Affine(a, b),
                Line::Vertical(a) => Point::Slope(a),
                Line::AtInfinity => Point::Infinity,
            };
            pl.point_id(&p)
        })
        .collect();
    let mut sorted = switched.clone();
    sorted.sort_unstable();
    if sorted != u.points {
        let diff = sorted
            .iter()
            .zip(&u.points)
            .find(|(a, b)| a != b)
            .map(|(a, _)| *a)
            .unwrap_or_else(|| *sorted.last().or(u.points.last()).unwrap_or(&0));
        return Err(Error::SwitchMismatch(diff));
    }
    Ok(Unital {
        plane: pl.clone(),
        provenance: Provenance::Dual { of: Box::new(u.provenance.clone()) },
        points: sorted,
        verified: Verified::default(),
    })
}

/// Splits `U_theta` into the ovals `O_{t theta}` and verifies each one.
pub fn ovals_decomposition(u: &Unital) -> Result<Vec<Oval>> {
    let theta = u.theta().ok_or_else(|| Error::WrongProvenance("utheta".into()))?;
    let pl = &u.plane;
    if !pl.function().is_normal().0 {
        return Err(Error::NotNormal);
    }
    let f = pl.ctx();
    let mut ovals = Vec::new();
    let mut union: Vec<u64> = vec![pl.infinity_id()];
    for &t in pl.function().split().subfield() {
        let c = f.mul(t, theta);
        let mut points: Vec<u64> = f.elements().map(|x| pl.affine_id(x, c)).collect();
        points.push(pl.infinity_id());
        let mut counts: HashMap<u64, usize> = HashMap::new();
        for &id in &points {
            for l in pl.lines_through(&pl.point(id).unwrap()) {
                *counts.entry(pl.line_id(&l)).or_insert(0) += 1;
            }
        }
        if let Some((&line, &count)) = counts.iter().filter(|(_, &c)| c > 2).min_by_key(|(&l, _)| l) {
            return Err(Error::OvalViolation { line, c: c.0, count });
        }
        union.extend_from_slice(&points[..points.len() - 1]);
        ovals.push(Oval { c, points });
    }
    union.sort_unstable();
    if union != u.points {
        return Err(Error::Format("ovals do not cover the unital".into()));
    }
    Ok(ovals)
}

/// Groups `thetas` by whether some gamma collineation maps one `U_theta` onto another.
pub fn gamma_orbit_equivalence(plane: &Arc<Plane>, thetas: &[FieldElem]) -> Result<Vec<Vec<FieldElem>>> {
    let f = plane.ctx();
    plane.check_family(&Collineation::Gamma { c: FieldElem::ONE, e: 0 })?;
    let unitals: Vec<Unital> = thetas.iter().map(|&t| build_u_theta(plane, t)).collect::<Result<_>>()?;
    let mut by_set: HashMap<&[u64], Vec<usize>> = HashMap::new();
    for (i, u) in unitals.iter().enumerate() {
        by_set.entry(u.points()).or_default().push(i);
    }
    let mut parent: Vec<usize> = (0..thetas.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for (i, u) in unitals.iter().enumerate() {
        for c in f.elements().skip(1) {
            for e in 0..f.m() {
                let img = u.image(&Collineation::Gamma { c, e });
                if let Some(js) = by_set.get(img.as_slice()) {
                    for &j in js {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<FieldElem>> = BTreeMap::new();
    for (i, &theta) in thetas.iter().enumerate() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(theta);
    }
    Ok(classes.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(p: u32, m: u32, spec: &str) -> Arc<Plane> {
        Plane::new(PlanarFunction::from_parts(p, m, None, spec).unwrap())
    }

    fn utheta(p: u32, m: u32, spec: &str) -> Unital {
        let pl = plane(p, m, spec);
        let theta = pl.function().split().choose_theta();
        build_u_theta(&pl, theta).unwrap()
    }

    #[test]
    fn hypothesis_examples() {
        let pl = plane(3, 2, "square");
        let theta = pl.function().split().choose_theta();
        let rep = check_utheta_hypothesis(&pl, theta).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.histogram.values().sum::<usize>(), 9);
        assert_eq!(rep.histogram[&0], 1);
        assert!(!check_utheta_hypothesis(&pl, FieldElem::ONE).unwrap().holds);
        assert_eq!(check_utheta_hypothesis(&pl, FieldElem::ZERO), Err(Error::ZeroTheta));
        assert!(matches!(build_u_theta(&pl, FieldElem::ONE), Err(Error::HypothesisFailed { .. })));
    }

    #[test]
    fn budaghyan_helleseth_hypothesis_with_xi() {
        let pl = {
            let ctx = FieldCtx::new(3, 6, None).unwrap();
            let split = ExtensionSplit::new(ctx.clone()).unwrap();
            let b = crate::planar::smallest_nonsquare(&ctx);
            let spec = PlanarFunctionSpec::new(crate::planar::Family::BudaghyanHelleseth { k: 1, b }, split).unwrap();
            Plane::new(PlanarFunction::new(spec))
        };
        let xi = pl.function().split().xi();
        assert!(check_utheta_hypothesis(&pl, xi).unwrap().holds);
    }

    #[test]
    fn u_theta_q3_is_a_design() {
        let mut u = utheta(3, 2, "square");
        assert_eq!(u.points().len(), 28);
        assert!(u.contains(0));
        let emb = u.verify_embedded(Mode::Exhaustive).unwrap();
        assert_eq!((emb.tangents, emb.secants), (28, 63));
        let d = u.verify_design(Mode::Exhaustive).unwrap();
        assert_eq!((d.points, d.blocks, d.pairs_checked), (28, 63, 378));
        let s = u.verify_design(Mode::Sampled { seed: 1, trials: 50 }).unwrap();
        assert_eq!(s.pairs_checked, 50);
    }

    #[test]
    fn vertical_lines_are_secants() {
        let u = utheta(3, 2, "square");
        let pl = u.plane().clone();
        let blocks = u.blocks().unwrap();
        for a in pl.ctx().elements() {
            let id = pl.line_id(&Line::Vertical(a));
            assert!(blocks.iter().any(|b| b.line == id));
        }
        let tangents = u.tangent_lines().unwrap();
        assert!(tangents.contains(&pl.line_id(&Line::AtInfinity)));
    }

    #[test]
    fn general_construction() {
        let pl = plane(3, 2, "square");
        let theta = pl.function().split().choose_theta();
        let g = InjectionTable::affine(&pl, theta, FieldElem::ZERO);
        let a = build_general(&pl, &g).unwrap();
        assert_eq!(a.points(), build_u_theta(&pl, theta).unwrap().points());
        let bad = InjectionTable::affine(&pl, FieldElem::ONE, FieldElem::ZERO);
        assert!(matches!(build_general(&pl, &bad), Err(Error::CountViolation { .. })));
        let c = FieldElem(5);
        let mut shifted = build_general(&pl, &InjectionTable::affine(&pl, theta, c)).unwrap();
        shifted.verify_embedded(Mode::Exhaustive).unwrap();
        let u = build_u_theta(&pl, theta).unwrap();
        assert_eq!(u.image(&Collineation::Shift { u: FieldElem::ZERO, v: c }), shifted.points());
        let mut dup = InjectionTable::affine(&pl, theta, FieldElem::ZERO);
        dup.rows[4][1] = dup.rows[4][0];
        assert_eq!(build_general(&pl, &dup).unwrap_err(), Error::NotInjective(4));
    }

    #[test]
    fn polarity_square_q3() {
        let pl = plane(3, 2, "square");
        let rep = verify_polarity(&pl, Involution::FrobQ, Mode::Exhaustive).unwrap();
        assert_eq!(rep.absolute_points, 28);
        let (mut u, _) = build_polarity_unital(&pl, Involution::FrobQ, Mode::Exhaustive).unwrap();
        assert_eq!(u.points().len(), 28);
        assert!(u.contains(pl.infinity_id()));
        // (0, y) is in U exactly when y + y^q = 0
        let on_axis = u.points().iter().filter(|&&id| id < 9).count();
        assert_eq!(on_axis, 3);
        u.verify_design(Mode::Exhaustive).unwrap();
    }

    #[test]
    fn conjugation_matches_frobenius_for_default_xi() {
        let pl = plane(5, 2, "square");
        let split = pl.function().split();
        for x in pl.ctx().elements() {
            assert_eq!(Involution::ConjXi.apply(split, x), Involution::FrobQ.apply(split, x));
            assert_eq!(Involution::ConjXi.apply(split, Involution::ConjXi.apply(split, x)), x);
        }
    }

    #[test]
    fn non_commuting_involution_fails_condition_b() {
        // 4 x^2 with 4 outside F_3
        let pl = plane(3, 2, "custom:2:4");
        assert!(matches!(check_involution(&pl, Involution::FrobQ), Err(Error::ConditionBFailed(_))));
    }

    #[test]
    fn dual_switch_q3() {
        let u = utheta(3, 2, "square");
        let d = dual_unital(&u).unwrap();
        assert_eq!(d.points(), u.points());
        let (pol, _) = build_polarity_unital(u.plane(), Involution::FrobQ, Mode::Exhaustive).unwrap();
        assert_eq!(dual_unital(&pol).unwrap_err(), Error::WrongProvenance("utheta".into()));
    }

    #[test]
    fn ovals_q3() {
        let u = utheta(3, 2, "square");
        let ovals = ovals_decomposition(&u).unwrap();
        assert_eq!(ovals.len(), 3);
        assert!(ovals.iter().all(|o| o.points.len() == 10));
        let affine = plane(3, 2, "custom:2:1,1:1");
        let v = Unital::from_points(affine, u.provenance().clone(), u.points().to_vec());
        assert_eq!(ovals_decomposition(&v), Err(Error::NotNormal));
    }

    #[test]
    fn gamma_orbit_one_class_q3() {
        let pl = plane(3, 2, "square");
        let split = pl.function().split();
        let thetas: Vec<FieldElem> =
            pl.ctx().elements().filter(|&t| !t.is_zero() && split.eta_sub(split.norm(t)) == -1).collect();
        assert_eq!(thetas.len(), 4);
        let classes = gamma_orbit_equivalence(&pl, &thetas).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn file_round_trip() {
        let u = utheta(3, 2, "square");
        let mut buf = Vec::new();
        u.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("UNITAL v1\np=3,m=2,mod=[1,0,1]\nsquare\nutheta:theta="));
        let v = Unital::read_from(&buf[..]).unwrap();
        assert_eq!(v.points(), u.points());
        assert_eq!(v.provenance(), u.provenance());
        assert!(Unital::read_from(&b"UNITAL v2\n"[..]).is_err());
    }

    #[test]
    fn provenance_strings() {
        for s in ["utheta:theta=4", "polarity:kappa=frobq", "dual:utheta:theta=4", "general:t*4+0"] {
            assert_eq!(s.parse::<Provenance>().unwrap().to_string(), s);
        }
    }
}
