//! Circles, Wilbrink's condition II, O'Nan configurations, fixing subgroups
//! and isomorphism invariants of embedded unitals.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{ExtensionSplit, FieldElem};
use crate::mode::Mode;
use crate::planar::Family;
use crate::plane::{Collineation, Line, Plane, Point};
use crate::unital::{Provenance, Unital};

/// Largest order for which circle pair counts are checked.
pub const EXHAUSTIVE_CIRCLE_Q: u64 = 9;
/// Largest `q` for which `derive_delta` checks every field element.
pub const DELTA_EXHAUSTIVE_Q: u32 = 27;
pub const DELTA_SAMPLE: usize = 10_000;
pub const DEFAULT_ONAN_BUDGET: u64 = 100_000_000;
/// Subgroups up to this order get a full pairwise commutation check.
pub const EXHAUSTIVE_ABELIAN_ORDER: usize = 729;
/// Largest order for which profiles include O'Nan and Wilbrink data.
pub const PROFILE_MAX_Q: u64 = 5;

/// Solves `Tr(delta) = theta1`, `Tr(delta xi) = -theta0`, so that
/// `Tr(delta y) = theta1 y0 - theta0 y1` for all `y`.
pub fn derive_delta(split: &ExtensionSplit, theta: FieldElem) -> Result<FieldElem> {
    if theta.is_zero() {
        return Err(Error::ZeroTheta);
    }
    let f = split.ctx();
    let (t0, t1) = split.decompose(theta);
    let xi = split.xi();
    let tr = |x| split.trace(x);
    let (m00, m01, m11) = (tr(FieldElem::ONE), tr(xi), tr(f.mul(xi, xi)));
    let det = f.sub(f.mul(m00, m11), f.mul(m01, m01));
    if det.is_zero() {
        return Err(Error::SingularSystem);
    }
    let (r0, r1) = (t1, f.neg(t0));
    let d0 = f.div(f.sub(f.mul(r0, m11), f.mul(m01, r1)), det)?;
    let d1 = f.div(f.sub(f.mul(m00, r1), f.mul(m01, r0)), det)?;
    let delta = split.recompose(d0, d1);
    let holds = |y: FieldElem| {
        let (y0, y1) = split.decompose(y);
        tr(f.mul(delta, y)) == f.sub(f.mul(t1, y0), f.mul(t0, y1))
    };
    let bad = if split.q() <= DELTA_EXHAUSTIVE_Q {
        f.elements().find(|&y| !holds(y))
    } else {
        let mut rng = Mode::Sampled { seed: 1, trials: DELTA_SAMPLE }.rng();
        (0..DELTA_SAMPLE).map(|_| FieldElem(rng.gen_range(0..f.size()))).find(|&y| !holds(y))
    };
    match bad {
        Some(y) => Err(Error::WitnessCheckFailed(format!("Tr(delta y) differs from phi at y = {y}"))),
        None => Ok(delta),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circle {
    pub a: FieldElem,
    pub beta: FieldElem,
    pub members: Vec<FieldElem>,
    pub delta: FieldElem,
}

fn require_theta(u: &Unital) -> Result<FieldElem> {
    u.theta().ok_or_else(|| Error::WrongProvenance("utheta".into()))
}

/// `phi(x) = theta1 f0(x) - theta0 f1(x)` for every `x`, by index.
pub fn phi_table(u: &Unital) -> Result<Vec<FieldElem>> {
    let theta = require_theta(u)?;
    let func = u.plane().function();
    Ok(func.ctx().elements().map(|x| crate::unital::phi(func, theta, x)).collect())
}

/// `C_{a,beta} = {x : phi(x + a) = beta}`.
pub fn circle(u: &Unital, a: FieldElem, beta: FieldElem) -> Result<Circle> {
    if beta.is_zero() {
        return Err(Error::ZeroBeta);
    }
    let split = u.plane().function().split();
    if !split.in_subfield(beta) {
        return Err(Error::CircleViolation(format!("beta = {beta} is not in the subfield")));
    }
    let phi = phi_table(u)?;
    let f = split.ctx();
    let members = f.elements().filter(|&x| phi[f.add(x, a).0 as usize] == beta).collect();
    Ok(Circle { a, beta, members, delta: derive_delta(split, require_theta(u)?)? })
}

/// All circles, ordered by `a` then `beta`.
pub fn circles(u: &Unital) -> Result<Vec<Circle>> {
    let phi = phi_table(u)?;
    let split = u.plane().function().split();
    let delta = derive_delta(split, require_theta(u)?)?;
    let f = split.ctx();
    let rank = |b: FieldElem| split.subfield_rank(b).unwrap() as usize;
    let q = split.q() as usize;
    let mut out = Vec::with_capacity(f.size() as usize * (q - 1));
    for a in f.elements() {
        let mut by_beta: Vec<Vec<FieldElem>> = vec![Vec::new(); q];
        for x in f.elements() {
            by_beta[rank(phi[f.add(x, a).0 as usize])].push(x);
        }
        for &beta in split.subfield() {
            if !beta.is_zero() {
                let members = std::mem::take(&mut by_beta[rank(beta)]);
                out.push(Circle { a, beta, members, delta });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleDesignReport {
    pub circles: usize,
    pub circle_size: usize,
    pub lambda: usize,
    pub pairs_checked: u64,
}

/// Checks circle sizes, the partition for each `a`, distinctness, and that
/// every pair of field elements lies on exactly `q` circles.
pub fn verify_circle_design(u: &Unital) -> Result<CircleDesignReport> {
    let q = u.q() as usize;
    if q as u64 > EXHAUSTIVE_CIRCLE_Q {
        return Err(Error::TooLarge(format!("circle design check needs q <= {EXHAUSTIVE_CIRCLE_Q}")));
    }
    let cs = circles(u)?;
    let f = u.plane().ctx();
    let n = f.size() as usize;
    if let Some(c) = cs.iter().find(|c| c.members.len() != q + 1) {
        return Err(Error::CircleViolation(format!("C_({},{}) has {} members", c.a, c.beta, c.members.len())));
    }
    for group in cs.chunk_by(|x, y| x.a == y.a) {
        let a = group[0].a;
        let mut seen = vec![0u8; n];
        for c in group {
            for x in &c.members {
                seen[x.0 as usize] += 1;
            }
        }
        let minus_a = f.neg(a).0 as usize;
        if let Some(x) = (0..n).find(|&x| seen[x] != (x != minus_a) as u8) {
            return Err(Error::CircleViolation(format!("circles with a = {a} cover {x} {} times", seen[x])));
        }
    }
    let distinct: HashSet<&[FieldElem]> = cs.iter().map(|c| c.members.as_slice()).collect();
    if distinct.len() != cs.len() || cs.len() != q * q * q - q * q {
        return Err(Error::CircleViolation(format!("{} circles, {} distinct", cs.len(), distinct.len())));
    }
    let mut pairs = vec![0u16; n * n];
    for c in &cs {
        for (i, x) in c.members.iter().enumerate() {
            for y in &c.members[i + 1..] {
                pairs[x.0 as usize * n + y.0 as usize] += 1;
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            let k = pairs[x * n + y] as usize;
            if k != q {
                return Err(Error::CircleViolation(format!("pair ({x}, {y}) lies on {k} circles")));
            }
        }
    }
    Ok(CircleDesignReport { circles: cs.len(), circle_size: q + 1, lambda: q, pairs_checked: (n * (n - 1) / 2) as u64 })
}

/// Circle-pair statistics behind the O'Nan configurations through `(inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThroughInfinity {
    /// Largest `|C ∩ C'|` over circle pairs with different `a`.
    pub max_circle_intersection: usize,
    /// Number of O'Nan configurations containing `(inf)`.
    pub configs: u64,
}

/// Counts the configurations through `(inf)` without listing them. Shifts
/// move `C_{a,beta}` to `C_{a+c,beta}`, so only pairs whose first circle has
/// `a = 0` are scanned; a pair meeting in `k` elements carries
/// `k q (k-1)(k-2)/2` configurations.
pub fn onan_through_point_count(u: &Unital) -> Result<ThroughInfinity> {
    let cs = circles(u)?;
    let q = u.q();
    let n = u.plane().ctx().size() as u64;
    let base: Vec<&Circle> = cs.iter().filter(|c| c.a.is_zero()).collect();
    let (max, weighted) = cs
        .par_iter()
        .filter(|c| !c.a.is_zero())
        .map(|c| {
            base.iter().fold((0usize, 0u64), |(m, w), b| {
                let k = intersect(&b.members, &c.members).len() as u64;
                let w = if k >= 3 { w + k * q * (k - 1) * (k - 2) / 2 } else { w };
                (m.max(k as usize), w)
            })
        })
        .reduce(|| (0, 0), |(m1, w1), (m2, w2)| (m1.max(m2), w1 + w2));
    Ok(ThroughInfinity { max_circle_intersection: max, configs: n * weighted / 2 })
}

/// Largest `|C ∩ C'|` over circle pairs with different `a`.
pub fn max_circle_intersection(u: &Unital) -> Result<usize> {
    Ok(onan_through_point_count(u)?.max_circle_intersection)
}

fn intersect<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Four blocks meeting pairwise in six distinct points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OnanConfig {
    /// Block (line) IDs, ascending.
    pub blocks: [u64; 4],
    /// Point IDs, ascending.
    pub points: [u64; 6],
    /// `incidence[i][j]`: block `i` contains point `j`.
    pub incidence: [[bool; 6]; 4],
}

impl OnanConfig {
    /// Sorts the IDs and checks the incidence pattern against the unital.
    pub fn new(u: &Unital, mut blocks: [u64; 4], mut points: [u64; 6]) -> Result<OnanConfig> {
        blocks.sort_unstable();
        points.sort_unstable();
        let fail = |why: String| Err(Error::WitnessCheckFailed(format!("O'Nan pattern: {why}")));
        if blocks.windows(2).any(|w| w[0] == w[1]) || points.windows(2).any(|w| w[0] == w[1]) {
            return fail("repeated ids".into());
        }
        let pl = u.plane();
        if let Some(p) = points.iter().find(|&&p| !u.contains(p)) {
            return fail(format!("point {p} is not on the unital"));
        }
        let mut incidence = [[false; 6]; 4];
        for (i, &b) in blocks.iter().enumerate() {
            let l = match pl.line(b) {
                Some(l) => l,
                None => return fail(format!("no line {b}")),
            };
            for (j, &p) in points.iter().enumerate() {
                incidence[i][j] = pl.incident(&pl.point(p).unwrap(), &l);
            }
        }
        if let Some(i) = (0..4).find(|&i| incidence[i].iter().filter(|&&x| x).count() != 3) {
            return fail(format!("block {} holds the wrong number of points", blocks[i]));
        }
        if let Some(j) = (0..6).find(|&j| (0..4).filter(|&i| incidence[i][j]).count() != 2) {
            return fail(format!("point {} lies on the wrong number of blocks", points[j]));
        }
        Ok(OnanConfig { blocks, points, incidence })
    }
}

impl fmt::Display for OnanConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "ONAN blocks=[{}] points=[{}]", join(&self.blocks), join(&self.points))
    }
}

/// A unital as an abstract design with local indices and a block-meet bitset.
pub struct BlockDesign {
    points: Vec<u64>,
    lines: Vec<u64>,
    block_points: Vec<Vec<u32>>,
    point_blocks: Vec<Vec<u32>>,
    words: usize,
    meets: Vec<u64>,
}

impl BlockDesign {
    pub fn new(u: &Unital) -> Result<BlockDesign> {
        let blocks = u.blocks()?;
        let points = u.points().to_vec();
        let local = |id: u64| points.binary_search(&id).unwrap() as u32;
        let nb = blocks.len();
        let mut block_points = Vec::with_capacity(nb);
        let mut point_blocks = vec![Vec::new(); points.len()];
        for (b, blk) in blocks.iter().enumerate() {
            let ps: Vec<u32> = blk.points.iter().map(|&p| local(p)).collect();
            for &p in &ps {
                point_blocks[p as usize].push(b as u32);
            }
            block_points.push(ps);
        }
        let words = nb.div_ceil(64);
        let mut meets = vec![0u64; nb * words];
        for through in &point_blocks {
            for &x in through {
                for &y in through {
                    if x != y {
                        meets[x as usize * words + y as usize / 64] |= 1 << (y % 64);
                    }
                }
            }
        }
        let lines = blocks.iter().map(|b| b.line).collect();
        Ok(BlockDesign { points, lines, block_points, point_blocks, words, meets })
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn block_count(&self) -> usize {
        self.lines.len()
    }

    pub fn line_id(&self, b: usize) -> u64 {
        self.lines[b]
    }

    pub fn point_id(&self, p: usize) -> u64 {
        self.points[p]
    }

    pub fn local_point(&self, id: u64) -> Option<usize> {
        self.points.binary_search(&id).ok()
    }

    pub fn block_points(&self, b: usize) -> &[u32] {
        &self.block_points[b]
    }

    pub fn point_blocks(&self, p: usize) -> &[u32] {
        &self.point_blocks[p]
    }

    #[inline]
    pub fn meets(&self, a: usize, b: usize) -> bool {
        self.meets[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    fn row(&self, b: usize) -> &[u64] {
        &self.meets[b * self.words..(b + 1) * self.words]
    }

    /// The common point of two distinct blocks, if any.
    pub fn meet_point(&self, a: usize, b: usize) -> Option<u32> {
        intersect(&self.block_points[a], &self.block_points[b]).first().copied()
    }
}

fn bits_above(words: &[u64], floor: usize) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(move |(i, &w)| {
        let mut w = if (i + 1) * 64 <= floor + 1 {
            0
        } else if i * 64 > floor {
            w
        } else {
            let keep = floor + 1 - i * 64;
            if keep >= 64 { 0 } else { w & (!0u64 << keep) }
        };
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + t)
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilbrinkWitness {
    pub block: u64,
    pub through_vertex: u64,
    pub w: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilbrinkReport {
    pub vertex: u64,
    pub strong: bool,
    pub satisfied: u64,
    pub total: u64,
    /// First failing `(B, C, w)` in ascending ID order.
    pub witness: Option<WilbrinkWitness>,
}

impl fmt::Display for WilbrinkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VERTEX {} strong={} satisfied={}/{}", self.vertex, self.strong, self.satisfied, self.total)
    }
}

/// Wilbrink's condition II at `v`. With `strong` the scan stops at the first
/// failing `(B, C, w)`; otherwise every triple is counted.
pub fn wilbrink_vertex_check(u: &Unital, v: u64, strong: bool) -> Result<WilbrinkReport> {
    wilbrink_in(&BlockDesign::new(u)?, v, strong)
}

/// Same as [`wilbrink_vertex_check`] on a prebuilt design.
pub fn wilbrink_in(d: &BlockDesign, v: u64, strong: bool) -> Result<WilbrinkReport> {
    let vi = d.local_point(v).ok_or_else(|| Error::Format(format!("point {v} is not on the unital")))?;
    let mut via = vec![u32::MAX; d.point_count()];
    let mut on_v = vec![false; d.block_count()];
    for &b in d.point_blocks(vi) {
        on_v[b as usize] = true;
        for &p in d.block_points(b as usize) {
            via[p as usize] = b;
        }
    }
    let (mut satisfied, mut total) = (0u64, 0u64);
    let mut witness = None;
    'scan: for (b, &through_v) in on_v.iter().enumerate() {
        if through_v {
            continue;
        }
        let mut cs: Vec<(u32, u32)> = d.block_points(b).iter().map(|&p| (via[p as usize], p)).collect();
        cs.sort_unstable();
        for &(c, meet) in &cs {
            for &w in d.block_points(c as usize) {
                if w as usize == vi || w == meet {
                    continue;
                }
                total += 1;
                let found = d
                    .point_blocks(w as usize)
                    .iter()
                    .any(|&b2| b2 != c && cs.iter().all(|&(x, _)| d.meets(b2 as usize, x as usize)));
                if found {
                    satisfied += 1;
                } else if witness.is_none() {
                    witness = Some(WilbrinkWitness {
                        block: d.line_id(b),
                        through_vertex: d.line_id(c as usize),
                        w: d.point_id(w as usize),
                    });
                    if strong {
                        break 'scan;
                    }
                }
            }
        }
    }
    Ok(WilbrinkReport { vertex: v, strong: witness.is_none(), satisfied, total, witness })
}

/// Wilbrink reports for every point, in ID order.
pub fn wilbrink_all(u: &Unital, strong: bool) -> Result<Vec<WilbrinkReport>> {
    let d = BlockDesign::new(u)?;
    u.points().par_iter().map(|&v| wilbrink_in(&d, v, strong)).collect()
}

/// O'Nan configurations through `(inf)` of a `U_theta`, found from circle
/// pairs meeting in at least three elements. Sorted by block quadruple.
pub fn find_onan_through_point(u: &Unital) -> Result<Vec<OnanConfig>> {
    let theta = require_theta(u)?;
    let pl = u.plane();
    let func = pl.function();
    let f = pl.ctx();
    let sub = func.split().subfield();
    let cs = circles(u)?;
    let inf = pl.infinity_id();
    let found: Result<Vec<Vec<OnanConfig>>> = (0..cs.len())
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let (c1, a) = (&cs[i], cs[i].a);
            let x0 = c1.members[0];
            for c2 in &cs[i + 1..] {
                if c2.a == a {
                    continue;
                }
                let common = intersect(&c1.members, &c2.members);
                if common.len() < 3 {
                    continue;
                }
                let a2 = c2.a;
                for &u0 in &common {
                    for &s in sub {
                        let b = f.sub(func.eval(f.add(x0, a)), f.mul(s, theta));
                        let b2 = f.add(f.sub(func.eval(f.add(u0, a2)), func.eval(f.add(u0, a))), b);
                        let on1 = |x: FieldElem| pl.affine_id(x, f.sub(func.eval(f.add(x, a)), b));
                        let on2 = |x: FieldElem| pl.affine_id(x, f.sub(func.eval(f.add(x, a2)), b2));
                        let rest: Vec<FieldElem> = common.iter().copied().filter(|&x| x != u0).collect();
                        for (k, &c) in rest.iter().enumerate() {
                            for &c2x in &rest[k + 1..] {
                                let blocks = [
                                    pl.line_id(&Line::Shifted(a, b)),
                                    pl.line_id(&Line::Shifted(a2, b2)),
                                    pl.line_id(&Line::Vertical(c)),
                                    pl.line_id(&Line::Vertical(c2x)),
                                ];
                                let points = [inf, on1(u0), on1(c), on1(c2x), on2(c), on2(c2x)];
                                out.push(OnanConfig::new(u, blocks, points)?);
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let all: BTreeSet<OnanConfig> = found?.into_iter().flatten().collect();
    Ok(all.into_iter().collect())
}

/// The explicit configuration built from `omega^2 - omega + 1 = 0`, with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitOnan {
    pub omega: FieldElem,
    pub a: [FieldElem; 3],
    pub t: [FieldElem; 3],
    pub x: [FieldElem; 3],
    /// Whether `x_w = -2 a_u`, `x_u = -2 a_v`, `x_v = -2 a_w`.
    pub closed_form_agrees: bool,
    pub config: OnanConfig,
}

/// Builds the explicit O'Nan configuration for `x^2`, `x^(p^k+1)` and the
/// two-dimensional semifield families, scanning `omega` and `(a_v, a_w)` over
/// the relevant subfield and keeping the first choice whose `t_u`, `t_v` lie
/// in `F_q` and whose intersection points satisfy both unital conditions.
pub fn construct_onan_explicit(u: &Unital) -> Result<ExplicitOnan> {
    let theta = require_theta(u)?;
    let pl = u.plane();
    let func = pl.function();
    let split = func.split();
    let f = pl.ctx();
    let (p, m) = (f.p(), f.m());
    let n = m / 2;
    let gcd = |a: u32, b: u32| {
        let (mut a, mut b) = (a, b);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let semifield = |g: u32| -> Result<u32> {
        let q = split.q();
        if q % 4 != 1 || n % 2 != 0 {
            return Err(Error::HypothesisUnmet(format!("need q = 1 mod 4 and n even, got q = {q}")));
        }
        if theta != split.xi() {
            return Err(Error::HypothesisUnmet("unital must be U_xi".into()));
        }
        Ok(g)
    };
    let (sub_degree, power_family) = match func.spec().family() {
        Family::Square => (m, true),
        Family::Albert { k } => {
            if k % 2 != 0 || (m / gcd(m, *k)) % 2 == 0 {
                return Err(Error::HypothesisUnmet(format!("albert k = {k} on degree {m}")));
            }
            (gcd(m, *k), true)
        }
        Family::Dickson { .. } => (semifield(n)?, false),
        Family::ZhouPott { k, .. } => (semifield(gcd(*k, n))?, false),
        other => return Err(Error::HypothesisUnmet(format!("no explicit construction for {other}"))),
    };
    let omegas: Vec<FieldElem> = if p == 3 {
        vec![FieldElem(2)]
    } else {
        f.elements()
            .filter(|&w| f.add(f.sub(f.mul(w, w), w), FieldElem::ONE).is_zero())
            .collect()
    };
    let sub: Vec<FieldElem> = f.elements().filter(|&x| !x.is_zero() && f.frobenius(x, sub_degree) == x).collect();
    let in_theta_fq = |y: FieldElem| split.in_subfield(f.div(y, theta).unwrap());
    let star = |x: FieldElem, y: FieldElem| f.sub(f.sub(func.eval(f.add(x, y)), func.eval(x)), func.eval(y));
    let four = f.from_int(4);
    let (mut candidates, mut t_outside, mut collide, mut conditions) = (0u64, 0u64, 0u64, 0u64);
    for &omega in &omegas {
        for &av in &sub {
            for &aw in &sub {
                if av == aw || av == f.mul(omega, aw) {
                    continue;
                }
                candidates += 1;
                let au = f.add(f.mul(aw, f.sub(FieldElem::ONE, omega)), f.mul(omega, av));
                if au.is_zero() || au == av || au == aw {
                    collide += 1;
                    continue;
                }
                let diff = f.sub(av, aw);
                let tu = f.div(f.mul(f.mul(four, aw), f.mul(diff, omega)), theta)?;
                let tv = f.div(f.mul(f.mul(four, av), diff), theta)?;
                let tw = FieldElem::ZERO;
                if !split.in_subfield(tu) || !split.in_subfield(tv) {
                    t_outside += 1;
                    continue;
                }
                let a = [au, av, aw];
                let t = [tu, tv, tw];
                // x_k solves x*a_i - x*a_j = (t_j - t_i) theta for {i, j} = the other two
                let solve = |i: usize, j: usize| {
                    let rhs = f.mul(f.sub(t[j], t[i]), theta);
                    f.elements().find(|&x| f.sub(star(x, a[i]), star(x, a[j])) == rhs)
                };
                let xs = [solve(1, 2), solve(2, 0), solve(0, 1)];
                let [Some(xu), Some(xv), Some(xw)] = xs else {
                    conditions += 1;
                    continue;
                };
                let x = [xu, xv, xw];
                let cond_b = (0..3).all(|k| {
                    (0..3).filter(|&i| i != k).all(|i| in_theta_fq(f.sub(func.eval(f.add(x[k], a[i])), func.eval(a[i]))))
                });
                if !cond_b || xu == xv || xv == xw || xu == xw {
                    conditions += 1;
                    continue;
                }
                let two = f.from_int(2);
                let closed_form_agrees = power_family
                    && (0..3).all(|k| x[k] == f.neg(f.mul(two, a[(k + 1) % 3])));
                let line = |i: usize| Line::Shifted(a[i], f.sub(func.eval(a[i]), f.mul(t[i], theta)));
                let meet = |k: usize, i: usize| {
                    pl.affine_id(x[k], f.add(f.sub(func.eval(f.add(x[k], a[i])), func.eval(a[i])), f.mul(t[i], theta)))
                };
                let blocks = [
                    pl.line_id(&line(0)),
                    pl.line_id(&line(1)),
                    pl.line_id(&line(2)),
                    pl.line_id(&Line::Vertical(FieldElem::ZERO)),
                ];
                let points = [
                    pl.affine_id(FieldElem::ZERO, f.mul(tu, theta)),
                    pl.affine_id(FieldElem::ZERO, f.mul(tv, theta)),
                    pl.affine_id(FieldElem::ZERO, FieldElem::ZERO),
                    meet(0, 1),
                    meet(1, 2),
                    meet(2, 0),
                ];
                match OnanConfig::new(u, blocks, points) {
                    Ok(config) => return Ok(ExplicitOnan { omega, a, t, x, closed_form_agrees, config }),
                    Err(_) => conditions += 1,
                }
            }
        }
    }
    Err(Error::WitnessCheckFailed(format!(
        "{candidates} admissible (omega, a_v, a_w) choices: {t_outside} put t_u or t_v outside F_q, \
         {collide} make a_u collide, {conditions} fail the intersection conditions"
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnanSearch {
    pub configs: Vec<OnanConfig>,
    /// False when the budget ran out; `configs` is then partial.
    pub complete: bool,
    pub explored: u64,
    pub budget: u64,
}

/// All O'Nan configurations, by extending pairs of meeting blocks. `budget`
/// caps the number of explored block triples.
pub fn find_onan_exhaustive(u: &Unital, budget: u64) -> Result<OnanSearch> {
    let d = BlockDesign::new(u)?;
    let explored = AtomicU64::new(0);
    let over = AtomicBool::new(false);
    let found: Vec<Vec<[usize; 4]>> = (0..d.block_count())
        .into_par_iter()
        .map(|b1| {
            let mut out = Vec::new();
            let row1 = d.row(b1);
            for b2 in bits_above(row1, b1) {
                if over.load(Ordering::Relaxed) {
                    return out;
                }
                let p12 = d.meet_point(b1, b2).unwrap();
                let cand3: Vec<u64> = row1.iter().zip(d.row(b2)).map(|(x, y)| x & y).collect();
                let mut local = 0;
                for b3 in bits_above(&cand3, b2) {
                    let (p13, p23) = (d.meet_point(b1, b3).unwrap(), d.meet_point(b2, b3).unwrap());
                    if p13 == p12 || p23 == p12 || p13 == p23 {
                        continue;
                    }
                    local += 1;
                    let cand4: Vec<u64> = cand3.iter().zip(d.row(b3)).map(|(x, y)| x & y).collect();
                    for b4 in bits_above(&cand4, b3) {
                        let six = [
                            p12,
                            p13,
                            p23,
                            d.meet_point(b1, b4).unwrap(),
                            d.meet_point(b2, b4).unwrap(),
                            d.meet_point(b3, b4).unwrap(),
                        ];
                        let distinct: HashSet<u32> = six.iter().copied().collect();
                        if distinct.len() == 6 {
                            out.push([b1, b2, b3, b4]);
                        }
                    }
                }
                if explored.fetch_add(local, Ordering::Relaxed) + local > budget {
                    over.store(true, Ordering::Relaxed);
                }
            }
            out
        })
        .collect();
    let mut configs = Vec::new();
    for q in found.into_iter().flatten() {
        let mut pts = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                pts.push(d.point_id(d.meet_point(q[i], q[j]).unwrap() as usize));
            }
        }
        let blocks = q.map(|b| d.line_id(b));
        configs.push(OnanConfig::new(u, blocks, pts.try_into().unwrap())?);
    }
    configs.sort_unstable();
    configs.dedup();
    Ok(OnanSearch { configs, complete: !over.load(Ordering::Relaxed), explored: explored.into_inner(), budget })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupReport {
    pub name: String,
    pub generators: String,
    pub order: usize,
    pub is_abelian: bool,
    /// `exhaustive` or `structure`.
    pub abelian_check: String,
    pub fixes_unital: bool,
    /// Closure under composition, when checked.
    pub closed: Option<bool>,
    pub commutator_witness: Option<(Collineation, Collineation)>,
}

fn commutation_scan(pl: &Plane, elems: &[Collineation]) -> Result<(bool, Option<(Collineation, Collineation)>)> {
    let set: HashSet<Collineation> = elems.iter().copied().collect();
    let mut closed = true;
    for (i, g) in elems.iter().enumerate() {
        for h in &elems[i..] {
            let gh = pl.sigma_compose(g, h)?;
            let hg = pl.sigma_compose(h, g)?;
            closed &= set.contains(&gh) && set.contains(&hg);
            if gh != hg {
                return Ok((closed, Some((*g, *h))));
            }
        }
    }
    Ok((closed, None))
}

/// The subgroup of sigma collineations fixing the unital: `{s(u, v, 0) : v in theta F_q}`
/// for `U_theta`, `{s(u, v, u + k(u)) : v + k(v) = -f(u + k(u))}` for a polarity unital.
pub fn fixing_subgroup_sigma(u: &Unital) -> Result<SubgroupReport> {
    let pl = u.plane();
    let f = pl.ctx();
    let func = pl.function();
    let split = func.split();
    pl.check_family(&Collineation::Sigma { u: FieldElem::ZERO, v: FieldElem::ZERO, w: FieldElem::ZERO })?;
    let (name, generators, elems): (&str, String, Vec<Collineation>) = match u.provenance() {
        Provenance::UTheta { theta } => {
            let theta = FieldElem(*theta);
            let elems = f
                .elements()
                .flat_map(|x| split.subfield().iter().map(move |&s| (x, s)))
                .map(|(x, s)| Collineation::Sigma { u: x, v: f.mul(s, theta), w: FieldElem::ZERO })
                .collect();
            ("sigma1", format!("sigma(u, s*{theta}, 0)"), elems)
        }
        Provenance::Polarity { kappa } => {
            let k = |x| kappa.apply(split, x);
            let mut elems = Vec::new();
            for x in f.elements() {
                let w = f.add(x, k(x));
                let target = f.neg(func.eval(w));
                elems.extend(
                    f.elements()
                        .filter(|&v| f.add(v, k(v)) == target)
                        .map(|v| Collineation::Sigma { u: x, v, w }),
                );
            }
            ("sigma2", format!("sigma(u, v, u+{kappa}(u)) with v+{kappa}(v) = -f(u+{kappa}(u))"), elems)
        }
        _ => return Err(Error::WrongProvenance("utheta or polarity".into())),
    };
    if let Some(g) = elems.par_iter().find_first(|g| !u.is_fixed_by(g)) {
        return Err(Error::ElementDoesNotFix(g.to_string()));
    }
    let (is_abelian, abelian_check, closed, witness) = if elems.len() <= EXHAUSTIVE_ABELIAN_ORDER {
        let (closed, w) = commutation_scan(pl, &elems)?;
        (w.is_none(), "exhaustive", Some(closed), w)
    } else if name == "sigma1" {
        // w = w' = 0: the composition is coordinatewise addition
        (true, "structure", None, None)
    } else {
        let (_, w) = commutation_scan(pl, &elems)?;
        (w.is_none(), "exhaustive", None, w)
    };
    Ok(SubgroupReport {
        name: name.into(),
        generators,
        order: elems.len(),
        is_abelian,
        abelian_check: abelian_check.into(),
        fixes_unital: true,
        closed,
        commutator_witness: witness,
    })
}

/// Checks `s' o s = s(u+u', v+v'-2w'*u, w+w')` pointwise for every pair of
/// sigma parameters. Returns the number of pairs.
pub fn verify_sigma_composition_law(pl: &Plane) -> Result<u64> {
    let f = pl.ctx();
    let n = f.size() as u64;
    if n.pow(6) > 1 << 20 {
        return Err(Error::TooLarge("composition law check needs q <= 3".into()));
    }
    let elems: Vec<Collineation> = f
        .elements()
        .flat_map(|u| f.elements().flat_map(move |v| f.elements().map(move |w| Collineation::Sigma { u, v, w })))
        .collect();
    let points: Vec<Point> = (0..pl.point_count()).map(|id| pl.point(id).unwrap()).collect();
    let bad = elems.par_iter().find_map_first(|outer| {
        for inner in &elems {
            let comp = match pl.sigma_compose(outer, inner) {
                Ok(c) => c,
                Err(e) => return Some(e.to_string()),
            };
            if points.iter().any(|p| pl.apply(outer, &pl.apply(inner, p)) != pl.apply(&comp, p)) {
                return Some(format!("{outer} o {inner} differs from {comp}"));
            }
        }
        None
    });
    match bad {
        Some(why) => Err(Error::WitnessCheckFailed(why)),
        None => Ok((elems.len() * elems.len()) as u64),
    }
}

/// The shifts `tau(a, b)` fixing the unital in a Coulter-Matthews plane.
pub fn fixing_subgroup_shift_cm(u: &Unital) -> Result<SubgroupReport> {
    let pl = u.plane();
    if !matches!(pl.function().spec().family(), Family::CoulterMatthews { .. }) {
        return Err(Error::FamilyMismatch("shift stabilizer report expects a Coulter-Matthews plane".into()));
    }
    let f = pl.ctx();
    let n = f.size();
    let order = (0..n as u64 * n as u64)
        .into_par_iter()
        .filter(|&k| {
            let g = Collineation::Shift { u: FieldElem((k / n as u64) as u32), v: FieldElem((k % n as u64) as u32) };
            u.is_fixed_by(&g)
        })
        .count();
    Ok(SubgroupReport {
        name: "shift stabilizer".into(),
        generators: "shift(a, b)".into(),
        order,
        is_abelian: true,
        abelian_check: "structure".into(),
        fixes_unital: true,
        closed: None,
        commutator_witness: None,
    })
}

/// Isomorphism invariants of a unital as a design.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub q: u64,
    pub points: usize,
    pub blocks: usize,
    pub block_size: usize,
    /// Number of plane lines by intersection size.
    pub intersection_spectrum: BTreeMap<usize, u64>,
    pub onan_count: Option<usize>,
    /// How many points lie in a given number of O'Nan configurations.
    pub onan_point_histogram: Option<BTreeMap<usize, usize>>,
    pub strong_wilbrink_vertices: Option<usize>,
}

pub fn invariant_profile(u: &Unital, budget: u64) -> Result<Profile> {
    let mut spectrum = BTreeMap::new();
    for c in u.line_counts()? {
        *spectrum.entry(c as usize).or_insert(0) += 1;
    }
    let q = u.q();
    let blocks = spectrum.get(&(q as usize + 1)).copied().unwrap_or(0) as usize;
    let (mut onan_count, mut hist, mut strong) = (None, None, None);
    if q <= PROFILE_MAX_Q {
        let search = find_onan_exhaustive(u, budget)?;
        if search.complete {
            let mut per_point: BTreeMap<u64, usize> = u.points().iter().map(|&p| (p, 0)).collect();
            for c in &search.configs {
                for p in c.points {
                    *per_point.get_mut(&p).unwrap() += 1;
                }
            }
            let mut h = BTreeMap::new();
            for k in per_point.values() {
                *h.entry(*k).or_insert(0) += 1;
            }
            onan_count = Some(search.configs.len());
            hist = Some(h);
        }
        strong = Some(wilbrink_all(u, true)?.iter().filter(|r| r.strong).count());
    }
    Ok(Profile {
        q,
        points: u.points().len(),
        blocks,
        block_size: q as usize + 1,
        intersection_spectrum: spectrum,
        onan_count,
        onan_point_histogram: hist,
        strong_wilbrink_vertices: strong,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    NonIsomorphic { invariant: String, left: String, right: String },
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NonIsomorphic { invariant, left, right } => {
                write!(f, "NON-ISOMORPHIC ({invariant}: {left} vs {right})")
            }
            Verdict::Undecided => write!(f, "UNDECIDED (all computed invariants agree)"),
        }
    }
}

/// The first invariant on which two profiles differ.
pub fn compare_profiles(left: &Profile, right: &Profile) -> Verdict {
    fn show<T: fmt::Debug>(x: &Option<T>) -> String {
        match x {
            Some(v) => format!("{v:?}"),
            None => "n/a".into(),
        }
    }
    let checks: [(&str, String, String, bool); 6] = [
        ("points", left.points.to_string(), right.points.to_string(), true),
        ("blocks", left.blocks.to_string(), right.blocks.to_string(), true),
        ("block size", left.block_size.to_string(), right.block_size.to_string(), true),
        ("onan count", show(&left.onan_count), show(&right.onan_count), left.onan_count.is_some() && right.onan_count.is_some()),
        (
            "onan point histogram",
            show(&left.onan_point_histogram),
            show(&right.onan_point_histogram),
            left.onan_point_histogram.is_some() && right.onan_point_histogram.is_some(),
        ),
        (
            "strong wilbrink vertices",
            show(&left.strong_wilbrink_vertices),
            show(&right.strong_wilbrink_vertices),
            left.strong_wilbrink_vertices.is_some() && right.strong_wilbrink_vertices.is_some(),
        ),
    ];
    checks
        .into_iter()
        .find(|(_, l, r, known)| *known && l != r)
        .map(|(name, l, r, _)| Verdict::NonIsomorphic { invariant: name.into(), left: l, right: r })
        .unwrap_or(Verdict::Undecided)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub left: Profile,
    pub right: Profile,
}

pub fn compare(left: &Unital, right: &Unital, budget: u64) -> Result<Comparison> {
    let (l, r) = (invariant_profile(left, budget)?, invariant_profile(right, budget)?);
    Ok(Comparison { verdict: compare_profiles(&l, &r), left: l, right: r })
}
