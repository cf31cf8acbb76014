//! The shift plane of a planar function: incidence, axiom checks and the
//! parametric collineation families.

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElem};
use crate::mode::Mode;
use crate::planar::PlanarFunction;

/// Largest point count for which [`Plane::verify_projective_plane`] runs exhaustively.
pub const EXHAUSTIVE_PLANE_POINTS: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Affine(FieldElem, FieldElem),
    /// The point `(a)` on the line at infinity.
    Slope(FieldElem),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line {
    /// `L_{a,b} = {(x, f(x+a) - b)} + (a)`
    Shifted(FieldElem, FieldElem),
    /// `N_a = {(a, y)} + (inf)`
    Vertical(FieldElem),
    AtInfinity,
}

/// Collineations of the shift plane given by parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Collineation {
    /// `(x, y) -> (x + u, y + v)`
    Shift { u: FieldElem, v: FieldElem },
    /// `(x, y) -> (s(c x), s(c^d y))` with `s` the `e`-th power of Frobenius; power maps only.
    Gamma { c: FieldElem, e: u32 },
    /// `(x, y) -> (x + u, y + 2 w*x - v)`; Dembowski-Ostrom functions only.
    Sigma { u: FieldElem, v: FieldElem, w: FieldElem },
}

impl fmt::Display for Collineation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Collineation::Shift { u, v } => write!(f, "shift({u},{v})"),
            Collineation::Gamma { c, e } => write!(f, "gamma({c},{e})"),
            Collineation::Sigma { u, v, w } => write!(f, "sigma({u},{v},{w})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneReport {
    pub mode: Mode,
    pub points: u64,
    pub lines: u64,
    pub point_pairs_checked: u64,
    pub line_pairs_checked: u64,
}

/// The projective plane `Pi(f)` of order `q^2`.
pub struct Plane {
    f: Arc<PlanarFunction>,
    order: u64,
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Plane").field("f", &self.f).field("order", &self.order).finish()
    }
}

impl Plane {
    pub fn new(f: Arc<PlanarFunction>) -> Arc<Plane> {
        let order = f.ctx().size() as u64;
        Arc::new(Plane { f, order })
    }

    pub fn function(&self) -> &Arc<PlanarFunction> {
        &self.f
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.f.ctx()
    }

    /// Plane order `q^2`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn q(&self) -> u64 {
        self.f.split().q() as u64
    }

    pub fn point_count(&self) -> u64 {
        self.order * self.order + self.order + 1
    }

    pub fn line_count(&self) -> u64 {
        self.point_count()
    }

    #[inline]
    pub fn affine_id(&self, x: FieldElem, y: FieldElem) -> u64 {
        x.0 as u64 * self.order + y.0 as u64
    }

    pub fn infinity_id(&self) -> u64 {
        self.order * self.order + self.order
    }

    pub fn point_id(&self, p: &Point) -> u64 {
        let n = self.order;
        match *p {
            Point::Affine(x, y) => self.affine_id(x, y),
            Point::Slope(a) => n * n + a.0 as u64,
            Point::Infinity => n * n + n,
        }
    }

    pub fn point(&self, id: u64) -> Option<Point> {
        let n = self.order;
        if id < n * n {
            Some(Point::Affine(FieldElem((id / n) as u32), FieldElem((id % n) as u32)))
        } else if id < n * n + n {
            Some(Point::Slope(FieldElem((id - n * n) as u32)))
        } else if id == n * n + n {
            Some(Point::Infinity)
        } else {
            None
        }
    }

    pub fn line_id(&self, l: &Line) -> u64 {
        let n = self.order;
        match *l {
            Line::Shifted(a, b) => a.0 as u64 * n + b.0 as u64,
            Line::Vertical(a) => n * n + a.0 as u64,
            Line::AtInfinity => n * n + n,
        }
    }

    pub fn line(&self, id: u64) -> Option<Line> {
        let n = self.order;
        if id < n * n {
            Some(Line::Shifted(FieldElem((id / n) as u32), FieldElem((id % n) as u32)))
        } else if id < n * n + n {
            Some(Line::Vertical(FieldElem((id - n * n) as u32)))
        } else if id == n * n + n {
            Some(Line::AtInfinity)
        } else {
            None
        }
    }

    pub fn incident(&self, p: &Point, l: &Line) -> bool {
        let f = self.ctx();
        match (*p, *l) {
            (Point::Affine(x, y), Line::Shifted(a, b)) => y == f.sub(self.f.eval(f.add(x, a)), b),
            (Point::Affine(x, _), Line::Vertical(a)) => x == a,
            (Point::Affine(..), Line::AtInfinity) => false,
            (Point::Slope(s), Line::Shifted(a, _)) => s == a,
            (Point::Slope(_), Line::Vertical(_)) => false,
            (Point::Slope(_), Line::AtInfinity) => true,
            (Point::Infinity, Line::Shifted(..)) => false,
            (Point::Infinity, _) => true,
        }
    }

    /// The `q^2 + 1` points of `l`, in ascending ID order.
    pub fn points_on_line(&self, l: &Line) -> Vec<Point> {
        let f = self.ctx();
        match *l {
            Line::Shifted(a, b) => f
                .elements()
                .map(|x| Point::Affine(x, f.sub(self.f.eval(f.add(x, a)), b)))
                .chain(std::iter::once(Point::Slope(a)))
                .collect(),
            Line::Vertical(a) => f
                .elements()
                .map(|y| Point::Affine(a, y))
                .chain(std::iter::once(Point::Infinity))
                .collect(),
            Line::AtInfinity => f
                .elements()
                .map(Point::Slope)
                .chain(std::iter::once(Point::Infinity))
                .collect(),
        }
    }

    pub fn point_ids_on_line(&self, l: &Line) -> Vec<u64> {
        self.points_on_line(l).iter().map(|p| self.point_id(p)).collect()
    }

    /// The `q^2 + 1` lines through `p`, in ascending ID order.
    pub fn lines_through(&self, p: &Point) -> Vec<Line> {
        let f = self.ctx();
        match *p {
            Point::Affine(x, y) => f
                .elements()
                .map(|a| Line::Shifted(a, f.sub(self.f.eval(f.add(x, a)), y)))
                .chain(std::iter::once(Line::Vertical(x)))
                .collect(),
            Point::Slope(a) => f
                .elements()
                .map(|b| Line::Shifted(a, b))
                .chain(std::iter::once(Line::AtInfinity))
                .collect(),
            Point::Infinity => f
                .elements()
                .map(Line::Vertical)
                .chain(std::iter::once(Line::AtInfinity))
                .collect(),
        }
    }

    /// The line joining two distinct points.
    pub fn line_through(&self, p1: &Point, p2: &Point) -> Result<Line> {
        if p1 == p2 {
            return Err(Error::EqualPoints(self.point_id(p1)));
        }
        let f = self.ctx();
        let (p1, p2) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let missing = || Error::AxiomViolation {
            what: "two points without a common line".into(),
            a: self.point_id(p1),
            b: self.point_id(p2),
        };
        match (*p1, *p2) {
            (Point::Affine(x1, _), Point::Affine(x2, _)) if x1 == x2 => Ok(Line::Vertical(x1)),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => f
                .elements()
                .find(|&a| {
                    let b = f.sub(self.f.eval(f.add(x1, a)), y1);
                    f.sub(self.f.eval(f.add(x2, a)), b) == y2
                })
                .map(|a| Line::Shifted(a, f.sub(self.f.eval(f.add(x1, a)), y1)))
                .ok_or_else(missing),
            (Point::Affine(x, y), Point::Slope(a)) => {
                Ok(Line::Shifted(a, f.sub(self.f.eval(f.add(x, a)), y)))
            }
            (Point::Affine(x, _), Point::Infinity) => Ok(Line::Vertical(x)),
            (Point::Slope(_), _) => Ok(Line::AtInfinity),
            _ => Err(missing()),
        }
    }

    /// Checks the projective plane axioms: every line has `q^2 + 1` points,
    /// two points share exactly one line and two lines share exactly one point.
    pub fn verify_projective_plane(&self, mode: Mode) -> Result<PlaneReport> {
        let n = self.point_count();
        match mode {
            Mode::Exhaustive => {
                if n > EXHAUSTIVE_PLANE_POINTS {
                    return Err(Error::TooLarge(format!(
                        "exhaustive plane check needs at most {EXHAUSTIVE_PLANE_POINTS} points, plane has {n}"
                    )));
                }
                let lines: Vec<Vec<u64>> = (0..n)
                    .map(|id| {
                        let l = self.line(id).unwrap();
                        let pts = self.point_ids_on_line(&l);
                        if pts.len() as u64 != self.order + 1 || pts.windows(2).any(|w| w[0] >= w[1]) {
                            return Err(Error::AxiomViolation {
                                what: "line without q^2+1 distinct points".into(),
                                a: id,
                                b: id,
                            });
                        }
                        Ok(pts)
                    })
                    .collect::<Result<_>>()?;
                let pencils: Vec<Vec<u64>> = (0..n)
                    .map(|id| {
                        let p = self.point(id).unwrap();
                        let mut ls: Vec<u64> =
                            self.lines_through(&p).iter().map(|l| self.line_id(l)).collect();
                        ls.sort_unstable();
                        ls
                    })
                    .collect();
                // pencils must be the transpose of the line lists
                for (lid, pts) in lines.iter().enumerate() {
                    for &pid in pts {
                        if pencils[pid as usize].binary_search(&(lid as u64)).is_err() {
                            return Err(Error::AxiomViolation {
                                what: "incidence tables disagree".into(),
                                a: pid,
                                b: lid as u64,
                            });
                        }
                    }
                }
                check_pair_cover(&lines, n, "two points on more than one line", "two points on no common line")?;
                check_pair_cover(&pencils, n, "two lines meeting in more than one point", "two lines without a common point")?;
                let pairs = n * (n - 1) / 2;
                Ok(PlaneReport { mode, points: n, lines: n, point_pairs_checked: pairs, line_pairs_checked: pairs })
            }
            Mode::Sampled { trials, .. } => {
                let mut rng = mode.rng();
                let mut point_pairs = Vec::with_capacity(trials);
                let mut line_pairs = Vec::with_capacity(trials);
                while point_pairs.len() < trials {
                    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    if a != b {
                        point_pairs.push((a.min(b), a.max(b)));
                    }
                }
                while line_pairs.len() < trials {
                    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    if a != b {
                        line_pairs.push((a.min(b), a.max(b)));
                    }
                }
                let bad_points = point_pairs.par_iter().find_map_first(|&(a, b)| {
                    let (p1, p2) = (self.point(a).unwrap(), self.point(b).unwrap());
                    let common = self.lines_through(&p1).iter().filter(|l| self.incident(&p2, l)).count();
                    (common != 1).then_some((a, b, common))
                });
                if let Some((a, b, c)) = bad_points {
                    return Err(Error::AxiomViolation { what: format!("two points on {c} common lines"), a, b });
                }
                let bad_lines = line_pairs.par_iter().find_map_first(|&(a, b)| {
                    let (l1, l2) = (self.line(a).unwrap(), self.line(b).unwrap());
                    let common = self.points_on_line(&l1).iter().filter(|p| self.incident(p, &l2)).count();
                    (common != 1).then_some((a, b, common))
                });
                if let Some((a, b, c)) = bad_lines {
                    return Err(Error::AxiomViolation { what: format!("two lines with {c} common points"), a, b });
                }
                Ok(PlaneReport {
                    mode,
                    points: n,
                    lines: n,
                    point_pairs_checked: trials as u64,
                    line_pairs_checked: trials as u64,
                })
            }
        }
    }

    /// Rejects collineations whose family does not act on this plane.
    pub fn check_family(&self, g: &Collineation) -> Result<()> {
        match g {
            Collineation::Shift { .. } => Ok(()),
            Collineation::Gamma { c, .. } => {
                if self.f.spec().power_exponent().is_none() {
                    return Err(Error::FamilyMismatch("gamma needs a power map".into()));
                }
                if c.is_zero() {
                    return Err(Error::FamilyMismatch("gamma needs c != 0".into()));
                }
                Ok(())
            }
            Collineation::Sigma { .. } => {
                if !self.f.spec().is_dembowski_ostrom() {
                    return Err(Error::FamilyMismatch("sigma needs a Dembowski-Ostrom function".into()));
                }
                Ok(())
            }
        }
    }

    fn gamma_parts(&self, c: FieldElem, e: u32) -> (impl Fn(FieldElem) -> FieldElem + '_, FieldElem) {
        let f = self.ctx();
        let d = self.f.spec().power_exponent().expect("checked power map");
        let e = e % f.m();
        (move |x| f.frobenius(x, e), f.pow(c, d))
    }

    pub fn apply(&self, g: &Collineation, p: &Point) -> Point {
        let f = self.ctx();
        match (*g, *p) {
            (_, Point::Infinity) => Point::Infinity,
            (Collineation::Shift { u, v }, Point::Affine(x, y)) => Point::Affine(f.add(x, u), f.add(y, v)),
            (Collineation::Shift { u, .. }, Point::Slope(a)) => Point::Slope(f.sub(a, u)),
            (Collineation::Gamma { c, e }, Point::Affine(x, y)) => {
                let (s, cd) = self.gamma_parts(c, e);
                Point::Affine(s(f.mul(c, x)), s(f.mul(cd, y)))
            }
            (Collineation::Gamma { c, e }, Point::Slope(a)) => {
                let (s, _) = self.gamma_parts(c, e);
                Point::Slope(s(f.mul(c, a)))
            }
            (Collineation::Sigma { u, v, w }, Point::Affine(x, y)) => {
                Point::Affine(f.add(x, u), f.sub(f.add(y, self.f.polarization(w, x)), v))
            }
            (Collineation::Sigma { u, w, .. }, Point::Slope(a)) => Point::Slope(f.sub(f.add(a, w), u)),
        }
    }

    pub fn apply_line(&self, g: &Collineation, l: &Line) -> Line {
        let f = self.ctx();
        match (*g, *l) {
            (_, Line::AtInfinity) => Line::AtInfinity,
            (Collineation::Shift { u, v }, Line::Shifted(a, b)) => Line::Shifted(f.sub(a, u), f.sub(b, v)),
            (Collineation::Shift { u, .. }, Line::Vertical(a)) => Line::Vertical(f.add(a, u)),
            (Collineation::Gamma { c, e }, Line::Shifted(a, b)) => {
                let (s, cd) = self.gamma_parts(c, e);
                Line::Shifted(s(f.mul(c, a)), s(f.mul(cd, b)))
            }
            (Collineation::Gamma { c, e }, Line::Vertical(a)) => {
                let (s, _) = self.gamma_parts(c, e);
                Line::Vertical(s(f.mul(c, a)))
            }
            (Collineation::Sigma { u, v, w }, Line::Shifted(a, b)) => {
                // f(x+a) + 2w*x = f(x+a+w) - f(w) - 2w*a
                let shift = f.add(self.f.eval(w), self.f.polarization(w, a));
                Line::Shifted(f.sub(f.add(a, w), u), f.add(f.add(b, v), shift))
            }
            (Collineation::Sigma { u, .. }, Line::Vertical(a)) => Line::Vertical(f.add(a, u)),
        }
    }

    /// `outer o inner` for two sigma collineations.
    pub fn sigma_compose(&self, outer: &Collineation, inner: &Collineation) -> Result<Collineation> {
        let f = self.ctx();
        match (*outer, *inner) {
            (Collineation::Sigma { u: u2, v: v2, w: w2 }, Collineation::Sigma { u, v, w }) => {
                self.check_family(outer)?;
                Ok(Collineation::Sigma {
                    u: f.add(u, u2),
                    v: f.sub(f.add(v, v2), self.f.polarization(w2, u)),
                    w: f.add(w, w2),
                })
            }
            _ => Err(Error::FamilyMismatch("sigma_compose takes two sigma collineations".into())),
        }
    }

    /// Lines to test in a sweep: all of them, or a seeded sample.
    pub fn sample_lines(&self, mode: Mode) -> Vec<u64> {
        let n = self.line_count();
        match mode {
            Mode::Exhaustive => (0..n).collect(),
            Mode::Sampled { trials, .. } => {
                let mut rng = mode.rng();
                let mut v: Vec<u64> = (0..trials).map(|_| rng.gen_range(0..n)).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }

    /// Whether `g` maps every incident point-line pair to an incident pair.
    pub fn verify_collineation(&self, g: &Collineation, mode: Mode) -> Result<bool> {
        self.check_family(g)?;
        let lines = self.sample_lines(mode);
        Ok(lines.par_iter().all(|&id| {
            let l = self.line(id).unwrap();
            let img = self.apply_line(g, &l);
            self.points_on_line(&l).iter().all(|p| self.incident(&self.apply(g, p), &img))
        }))
    }

    /// Checks an arbitrary point map for collinearity preservation; returns
    /// the smallest line ID whose image points are not collinear.
    pub fn verify_point_map<F>(&self, map: F, mode: Mode) -> std::result::Result<(), u64>
    where
        F: Fn(&Point) -> Point + Sync,
    {
        let lines = self.sample_lines(mode);
        let bad = lines.par_iter().find_map_first(|&id| {
            let l = self.line(id).unwrap();
            let imgs: Vec<Point> = self.points_on_line(&l).iter().map(&map).collect();
            let ok = match self.line_through(&imgs[0], &imgs[1]) {
                Ok(m) => imgs.iter().all(|p| self.incident(p, &m)),
                Err(_) => false,
            };
            (!ok).then_some(id)
        });
        match bad {
            None => Ok(()),
            Some(id) => Err(id),
        }
    }

    /// Writes `L <id> : <point ids...>` for every line.
    pub fn dump_lines<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for id in 0..self.line_count() {
            let l = self.line(id).unwrap();
            let ids: Vec<String> = self.point_ids_on_line(&l).iter().map(u64::to_string).collect();
            writeln!(out, "L {id} : {}", ids.join(" "))?;
        }
        Ok(())
    }
}

/// Marks every pair inside each set; each pair of `0..n` must be hit exactly once.
fn check_pair_cover(sets: &[Vec<u64>], n: u64, twice: &str, never: &str) -> Result<()> {
    let n = n as usize;
    let mut seen = vec![0u64; (n * n).div_ceil(64)];
    for set in sets {
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                let bit = a as usize * n + b as usize;
                if seen[bit / 64] >> (bit % 64) & 1 == 1 {
                    return Err(Error::AxiomViolation { what: twice.into(), a, b });
                }
                seen[bit / 64] |= 1 << (bit % 64);
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let bit = a * n + b;
            if seen[bit / 64] >> (bit % 64) & 1 == 0 {
                return Err(Error::AxiomViolation { what: never.into(), a: a as u64, b: b as u64 });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(p: u32, m: u32, spec: &str) -> Arc<Plane> {
        Plane::new(PlanarFunction::from_parts(p, m, None, spec).unwrap())
    }

    #[test]
    fn id_round_trip() {
        let pl = plane(3, 2, "square");
        for id in 0..pl.point_count() {
            assert_eq!(pl.point_id(&pl.point(id).unwrap()), id);
            assert_eq!(pl.line_id(&pl.line(id).unwrap()), id);
        }
        assert_eq!(pl.point(pl.point_count()), None);
        assert_eq!(pl.point_id(&Point::Infinity), 90);
    }

    #[test]
    fn incidence_examples() {
        let pl = plane(3, 2, "square");
        let f = pl.ctx();
        assert!(pl.incident(&Point::Infinity, &Line::AtInfinity));
        for a in f.elements() {
            for b in f.elements() {
                let y = f.sub(pl.function().eval(a), b);
                assert!(pl.incident(&Point::Affine(FieldElem::ZERO, y), &Line::Shifted(a, b)));
            }
            for x in f.elements() {
                assert_eq!(pl.incident(&Point::Affine(x, FieldElem(4)), &Line::Vertical(a)), x == a);
            }
        }
        assert_eq!(pl.points_on_line(&Line::Shifted(FieldElem::ZERO, FieldElem::ZERO)).len(), 10);
    }

    #[test]
    fn line_through_cases() {
        let pl = plane(3, 2, "square");
        let a = FieldElem(5);
        assert_eq!(pl.line_through(&Point::Infinity, &Point::Slope(a)).unwrap(), Line::AtInfinity);
        assert_eq!(
            pl.line_through(&Point::Affine(a, FieldElem(2)), &Point::Infinity).unwrap(),
            Line::Vertical(a)
        );
        assert_eq!(pl.line_through(&Point::Infinity, &Point::Infinity), Err(Error::EqualPoints(90)));
        // every pair of points on a line recovers that line
        for id in (0..pl.line_count()).step_by(7) {
            let l = pl.line(id).unwrap();
            let pts = pl.points_on_line(&l);
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    assert_eq!(pl.line_through(&pts[j], &pts[i]).unwrap(), l);
                }
            }
        }
    }

    #[test]
    fn projective_axioms_small() {
        let r = plane(3, 2, "square").verify_projective_plane(Mode::Exhaustive).unwrap();
        assert_eq!((r.points, r.lines), (91, 91));
        plane(5, 2, "square").verify_projective_plane(Mode::Exhaustive).unwrap();
        plane(3, 2, "square")
            .verify_projective_plane(Mode::Sampled { seed: 3, trials: 200 })
            .unwrap();
    }

    #[test]
    fn non_planar_function_breaks_axioms() {
        let pl = plane(3, 2, "custom:3:1");
        assert!(matches!(
            pl.verify_projective_plane(Mode::Exhaustive),
            Err(Error::AxiomViolation { .. })
        ));
    }

    #[test]
    fn family_restrictions() {
        let dickson = plane(5, 4, "dickson:i=1");
        let g = Collineation::Gamma { c: FieldElem::ONE, e: 0 };
        assert!(matches!(dickson.check_family(&g), Err(Error::FamilyMismatch(_))));
        let cm = plane(3, 4, "cm:k=3");
        let s = Collineation::Sigma { u: FieldElem::ONE, v: FieldElem::ZERO, w: FieldElem::ZERO };
        assert!(matches!(cm.check_family(&s), Err(Error::FamilyMismatch(_))));
        assert!(cm.check_family(&g).is_ok());
    }

    #[test]
    fn collineations_preserve_incidence_q3() {
        let pl = plane(3, 2, "square");
        let f = pl.ctx().clone();
        for u in f.elements() {
            for v in f.elements() {
                assert!(pl.verify_collineation(&Collineation::Shift { u, v }, Mode::Exhaustive).unwrap());
                for w in [FieldElem(0), FieldElem(1), FieldElem(5)] {
                    let g = Collineation::Sigma { u, v, w };
                    assert!(pl.verify_collineation(&g, Mode::Exhaustive).unwrap());
                }
            }
            if !u.is_zero() {
                for e in 0..2 {
                    let g = Collineation::Gamma { c: u, e };
                    assert!(pl.verify_collineation(&g, Mode::Exhaustive).unwrap());
                }
            }
        }
    }

    #[test]
    fn collineation_examples() {
        let pl = plane(3, 2, "square");
        let f = pl.ctx().clone();
        let id = Collineation::Shift { u: FieldElem::ZERO, v: FieldElem::ZERO };
        for pid in 0..pl.point_count() {
            let p = pl.point(pid).unwrap();
            assert_eq!(pl.apply(&id, &p), p);
        }
        let s = Collineation::Sigma { u: FieldElem(2), v: FieldElem(7), w: FieldElem(4) };
        for a in f.elements() {
            assert_eq!(pl.apply_line(&s, &Line::Vertical(a)), Line::Vertical(f.add(a, FieldElem(2))));
            let c = FieldElem(5);
            assert_eq!(
                pl.apply(&Collineation::Gamma { c, e: 0 }, &Point::Slope(a)),
                Point::Slope(f.mul(c, a))
            );
        }
        // elations: sigma(0,0,w) fixes N_0 pointwise
        for w in f.elements() {
            let g = Collineation::Sigma { u: FieldElem::ZERO, v: FieldElem::ZERO, w };
            for p in pl.points_on_line(&Line::Vertical(FieldElem::ZERO)) {
                assert_eq!(pl.apply(&g, &p), p);
            }
        }
    }

    #[test]
    fn sigma_composition_law_exhaustive_q3() {
        let pl = plane(3, 2, "square");
        let f = pl.ctx().clone();
        let probe: Vec<Point> = (0..pl.point_count()).step_by(5).map(|i| pl.point(i).unwrap()).collect();
        let mut all = Vec::new();
        for u in f.elements() {
            for v in f.elements() {
                for w in f.elements() {
                    all.push(Collineation::Sigma { u, v, w });
                }
            }
        }
        assert_eq!(all.len(), 729);
        let step = 13;
        for g1 in all.iter().step_by(step) {
            for g2 in &all {
                let c = pl.sigma_compose(g1, g2).unwrap();
                for p in &probe {
                    assert_eq!(pl.apply(&c, p), pl.apply(g1, &pl.apply(g2, p)));
                }
            }
        }
        // shift subgroup is closed and abelian
        for u in f.elements() {
            for v in f.elements() {
                let a = Collineation::Sigma { u, v, w: FieldElem::ZERO };
                let b = Collineation::Sigma { u: v, v: u, w: FieldElem::ZERO };
                let ab = pl.sigma_compose(&a, &b).unwrap();
                assert_eq!(ab, pl.sigma_compose(&b, &a).unwrap());
                assert_eq!(ab, Collineation::Sigma { u: f.add(u, v), v: f.add(u, v), w: FieldElem::ZERO });
            }
        }
    }

    #[test]
    fn cubing_second_coordinate_is_not_a_collineation() {
        let pl = plane(3, 2, "square");
        let f = pl.ctx().clone();
        let map = |p: &Point| match *p {
            Point::Affine(x, y) => Point::Affine(x, f.pow(y, 3)),
            other => other,
        };
        assert!(pl.verify_point_map(map, Mode::Exhaustive).is_err());
        assert!(pl.verify_point_map(|p: &Point| *p, Mode::Exhaustive).is_ok());
    }

    #[test]
    fn dump_format() {
        let pl = plane(3, 2, "square");
        let mut buf = Vec::new();
        pl.dump_lines(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 91);
        assert_eq!(text.lines().last().unwrap(), "L 90 : 81 82 83 84 85 86 87 88 89 90");
    }
}
