//! Catalog of planar functions on `F_{q^2}` and their verifiers.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{ExtensionSplit, FieldCtx, FieldElem};
use crate::mode::Mode;

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Which catalog entry a planar function comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `x^2`
    Square,
    /// `x^(p^k+1)`
    Albert { k: u32 },
    /// `x^((3^k+1)/2)` over characteristic 3
    CoulterMatthews { k: u32 },
    /// `(x0^2 + alpha x1^(2p^i)) + 2 x0 x1 xi`
    Dickson { i: u32 },
    /// `(x0^(p^k+1) + alpha x1^(p^(k+i)+p^i)) + 2 x0 x1 xi`
    ZhouPott { i: u32, k: u32 },
    /// `(x0^2 + x1^10) + (2 x0 x1 + x1^6) xi`
    Ganley,
    /// `(x0^2 + x1^18) + (2 x0 x1 + x1^54) xi`
    PenttilaWilliams,
    /// `b x^(p^k+1) + (b x^(p^k+1))^q + xi x^(q+1)`
    BudaghyanHelleseth { k: u32, b: FieldElem },
    /// `sum c x^e` over the listed `(e, c)` terms
    Custom(Vec<(u64, FieldElem)>),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Square => write!(f, "square"),
            Family::Albert { k } => write!(f, "albert:k={k}"),
            Family::CoulterMatthews { k } => write!(f, "cm:k={k}"),
            Family::Dickson { i } => write!(f, "dickson:i={i}"),
            Family::ZhouPott { i, k } => write!(f, "zhoupott:i={i},k={k}"),
            Family::Ganley => write!(f, "ganley"),
            Family::PenttilaWilliams => write!(f, "pw"),
            Family::BudaghyanHelleseth { k, b } => write!(f, "bh:k={k},b={}", b.0),
            Family::Custom(terms) => {
                let parts: Vec<String> =
                    terms.iter().map(|(e, c)| format!("{e}:{}", c.0)).collect();
                write!(f, "custom:{}", parts.join(","))
            }
        }
    }
}

fn parse_params(body: &str, spec: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::BadSpec(spec.into(), format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

fn param<T: FromStr>(params: &[(String, String)], key: &str, spec: &str) -> Result<T> {
    let raw = params
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::BadSpec(spec.into(), format!("missing parameter {key}")))?;
    raw.parse()
        .map_err(|_| Error::BadSpec(spec.into(), format!("bad value for {key}: {raw:?}")))
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let s = s.trim();
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let need_body = || {
            if body.is_empty() {
                Err(Error::BadSpec(s.into(), "missing parameters".into()))
            } else {
                Ok(())
            }
        };
        match name {
            "square" => Ok(Family::Square),
            "ganley" => Ok(Family::Ganley),
            "pw" => Ok(Family::PenttilaWilliams),
            "albert" => {
                need_body()?;
                let ps = parse_params(body, s)?;
                Ok(Family::Albert { k: param(&ps, "k", s)? })
            }
            "cm" => {
                need_body()?;
                let ps = parse_params(body, s)?;
                Ok(Family::CoulterMatthews { k: param(&ps, "k", s)? })
            }
            "dickson" => {
                need_body()?;
                let ps = parse_params(body, s)?;
                Ok(Family::Dickson { i: param(&ps, "i", s)? })
            }
            "zhoupott" => {
                need_body()?;
                let ps = parse_params(body, s)?;
                Ok(Family::ZhouPott {
                    i: param(&ps, "i", s)?,
                    k: param(&ps, "k", s)?,
                })
            }
            "bh" => {
                need_body()?;
                let ps = parse_params(body, s)?;
                Ok(Family::BudaghyanHelleseth {
                    k: param(&ps, "k", s)?,
                    b: FieldElem(param(&ps, "b", s)?),
                })
            }
            "custom" => {
                need_body()?;
                let terms = body
                    .split(',')
                    .map(|t| {
                        let (e, c) = t.split_once(':').ok_or_else(|| {
                            Error::BadSpec(s.into(), format!("term {t:?} is not <exp>:<coeff>"))
                        })?;
                        let e: u64 = e
                            .trim()
                            .parse()
                            .map_err(|_| Error::BadSpec(s.into(), format!("bad exponent {e:?}")))?;
                        let c: u32 = c
                            .trim()
                            .parse()
                            .map_err(|_| Error::BadSpec(s.into(), format!("bad coefficient {c:?}")))?;
                        Ok((e, FieldElem(c)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Family::Custom(terms))
            }
            other => Err(Error::BadSpec(s.into(), format!("unknown family {other:?}"))),
        }
    }
}

/// Tunable assumptions for parameter validation.
#[derive(Clone, Copy, Debug)]
pub struct SpecConstraints {
    /// Smallest admissible `n` for the Ganley family.
    pub ganley_min_n: u32,
}

impl Default for SpecConstraints {
    fn default() -> Self {
        SpecConstraints { ganley_min_n: 3 }
    }
}

/// A validated catalog entry bound to a field split.
#[derive(Clone, Debug)]
pub struct PlanarFunctionSpec {
    family: Family,
    split: Arc<ExtensionSplit>,
}

impl PlanarFunctionSpec {
    pub fn new(family: Family, split: Arc<ExtensionSplit>) -> Result<Self> {
        Self::with_constraints(family, split, SpecConstraints::default())
    }

    pub fn with_constraints(
        family: Family,
        split: Arc<ExtensionSplit>,
        constraints: SpecConstraints,
    ) -> Result<Self> {
        validate(&family, &split, constraints)?;
        Ok(PlanarFunctionSpec { family, split })
    }

    pub fn parse(s: &str, split: Arc<ExtensionSplit>) -> Result<Self> {
        Self::new(s.parse()?, split)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn split(&self) -> &Arc<ExtensionSplit> {
        &self.split
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.split.ctx()
    }

    /// The exponent `d` when `f(x) = x^d`.
    pub fn power_exponent(&self) -> Option<u64> {
        let p = self.ctx().p() as u64;
        match self.family {
            Family::Square => Some(2),
            Family::Albert { k } => Some(p.pow(k) + 1),
            Family::CoulterMatthews { k } => Some(3u64.pow(k).div_ceil(2)),
            Family::Custom(ref terms) if terms.len() == 1 && terms[0].1 == FieldElem::ONE => {
                Some(terms[0].0)
            }
            _ => None,
        }
    }

    /// Whether `f` is a Dembowski-Ostrom polynomial, i.e. every exponent is `p^i + p^j`.
    pub fn is_dembowski_ostrom(&self) -> bool {
        match &self.family {
            Family::CoulterMatthews { k } => *k == 1,
            Family::Custom(terms) => {
                let p = self.ctx().p() as u64;
                terms.iter().filter(|(_, c)| !c.is_zero()).all(|&(e, _)| {
                    let mut e = e;
                    let mut digits = 0;
                    while e > 0 {
                        digits += e % p;
                        e /= p;
                    }
                    digits == 2
                })
            }
            _ => true,
        }
    }

    /// Direct evaluation of the defining formula.
    pub fn eval(&self, x: FieldElem) -> FieldElem {
        let f = self.ctx();
        let split = &self.split;
        let p = f.p() as u64;
        let two = f.from_int(2);
        match &self.family {
            Family::Square => f.mul(x, x),
            Family::Albert { k } => f.mul(f.frobenius(x, *k), x),
            Family::CoulterMatthews { k } => f.pow(x, 3u64.pow(*k).div_ceil(2)),
            Family::Dickson { i } => {
                let (x0, x1) = split.decompose(x);
                let alpha = split.alpha();
                let f0 = f.add(f.mul(x0, x0), f.mul(alpha, f.frobenius(f.mul(x1, x1), *i)));
                let f1 = f.mul(two, f.mul(x0, x1));
                split.recompose(f0, f1)
            }
            Family::ZhouPott { i, k } => {
                let (x0, x1) = split.decompose(x);
                let alpha = split.alpha();
                let a = f.mul(x0, f.frobenius(x0, *k));
                let b = f.frobenius(f.mul(x1, f.frobenius(x1, *k)), *i);
                let f0 = f.add(a, f.mul(alpha, b));
                let f1 = f.mul(two, f.mul(x0, x1));
                split.recompose(f0, f1)
            }
            Family::Ganley => {
                let (x0, x1) = split.decompose(x);
                let f0 = f.add(f.mul(x0, x0), f.pow(x1, 10));
                let f1 = f.add(f.mul(two, f.mul(x0, x1)), f.pow(x1, 6));
                split.recompose(f0, f1)
            }
            Family::PenttilaWilliams => {
                let (x0, x1) = split.decompose(x);
                let f0 = f.add(f.mul(x0, x0), f.pow(x1, 18));
                let f1 = f.add(f.mul(two, f.mul(x0, x1)), f.pow(x1, 54));
                split.recompose(f0, f1)
            }
            Family::BudaghyanHelleseth { k, b } => {
                let y = f.mul(*b, f.pow(x, p.pow(*k) + 1));
                let z = f.add(y, split.conj(y));
                f.add(z, f.mul(split.xi(), split.norm(x)))
            }
            Family::Custom(terms) => terms
                .iter()
                .fold(FieldElem::ZERO, |acc, &(e, c)| f.add(acc, f.mul(c, f.pow(x, e)))),
        }
    }
}

impl fmt::Display for PlanarFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

fn validate(family: &Family, split: &ExtensionSplit, c: SpecConstraints) -> Result<()> {
    let f = split.ctx();
    let p = f.p();
    let n = split.sub_degree();
    let q = split.q();
    let fail = |msg: String| Err(Error::SpecConstraintViolated(msg));
    match family {
        Family::Square => Ok(()),
        Family::Albert { k } => {
            let k = *k;
            if k < 1 || k > n {
                return fail(format!("albert needs 1 <= k <= n = {n}, got k = {k}"));
            }
            if ((2 * n) / gcd(2 * n, k)).is_multiple_of(2) {
                return fail(format!("albert needs 2n/gcd(2n,k) odd (n = {n}, k = {k})"));
            }
            Ok(())
        }
        Family::CoulterMatthews { k } => {
            if p != 3 {
                return fail(format!("coulter-matthews needs p = 3, got {p}"));
            }
            if gcd(*k, 2 * n) != 1 {
                return fail(format!("coulter-matthews needs gcd(k, 2n) = 1 (k = {k}, n = {n})"));
            }
            Ok(())
        }
        Family::Dickson { i } => {
            if *i == 0 || *i >= n {
                return fail(format!("dickson needs 0 < i < n = {n}, got {i}"));
            }
            if q % 4 != 1 {
                return fail(format!("dickson needs p^n = 1 mod 4, got {q}"));
            }
            alpha_nonsquare(split)
        }
        Family::ZhouPott { i, k } => {
            if *i == 0 || *i >= n || *k == 0 || *k >= n {
                return fail(format!("zhou-pott needs 0 < i, k < n = {n}"));
            }
            if (n / gcd(*k, n)).is_multiple_of(2) {
                return fail(format!("zhou-pott needs n/gcd(k,n) odd (n = {n}, k = {k})"));
            }
            if q % 4 != 1 {
                return fail(format!("zhou-pott needs p^n = 1 mod 4, got {q}"));
            }
            alpha_nonsquare(split)
        }
        Family::Ganley => {
            if p != 3 || n.is_multiple_of(2) || n < c.ganley_min_n {
                return fail(format!(
                    "ganley needs p = 3 and odd n >= {}, got p = {p}, n = {n}",
                    c.ganley_min_n
                ));
            }
            Ok(())
        }
        Family::PenttilaWilliams => {
            if p != 3 || n != 5 {
                return fail(format!("penttila-williams needs p = 3, n = 5, got p = {p}, n = {n}"));
            }
            Ok(())
        }
        Family::BudaghyanHelleseth { k, b } => {
            if *k == 0 || *k >= n {
                return fail(format!("budaghyan-helleseth needs 0 < k < n = {n}, got {k}"));
            }
            if (n / gcd(*k, n)).is_multiple_of(2) {
                return fail(format!("budaghyan-helleseth needs n/gcd(k,n) odd (n = {n}, k = {k})"));
            }
            if q % 4 != 3 {
                return fail(format!("budaghyan-helleseth needs p^n = 3 mod 4, got {q}"));
            }
            if b.0 >= f.size() || f.quadratic_character(*b) != -1 {
                return fail(format!("budaghyan-helleseth needs b nonsquare, got index {}", b.0));
            }
            Ok(())
        }
        Family::Custom(terms) => {
            if let Some((_, c)) = terms.iter().find(|(_, c)| c.0 >= f.size()) {
                return fail(format!("coefficient index {} out of range", c.0));
            }
            Ok(())
        }
    }
}

fn alpha_nonsquare(split: &ExtensionSplit) -> Result<()> {
    let alpha = split.alpha();
    if !split.in_subfield(alpha) || split.eta_sub(alpha) != -1 {
        return Err(Error::SpecConstraintViolated(
            "xi^2 must be a nonsquare of F_q".into(),
        ));
    }
    Ok(())
}

/// Smallest-index nonsquare of the whole field.
pub fn smallest_nonsquare(ctx: &FieldCtx) -> FieldElem {
    ctx.elements()
        .find(|&x| ctx.quadratic_character(x) == -1)
        .expect("odd-order fields have nonsquares")
}

/// A concrete counterexample to one of the certified properties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f(x+a) - f(x) = f(x'+a) - f(x')` with `x != x'`.
    NotPlanar { a: u32, x: u32, x2: u32 },
    /// `f(0) != 0`.
    NonzeroAtZero { value: u32 },
    /// `f(a) = f(b)` with `a != b` and `a != -b`, or `f(a) != f(-a)` when `b = -a`.
    NotNormal { a: u32, b: u32 },
    /// Value `c` has a different number of preimages under `f` than under squaring.
    ValueDistribution { c: u32, f_count: usize, square_count: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanarityCertificate {
    pub spec: String,
    pub field: String,
    pub mode: Mode,
    pub is_planar: bool,
    pub is_normal: bool,
    pub satisfies_value_distribution: bool,
    pub witnesses: Vec<Witness>,
}

/// A planar function with its full value table over `F_{q^2}`.
pub struct PlanarFunction {
    spec: PlanarFunctionSpec,
    values: Vec<FieldElem>,
    comps: Vec<(FieldElem, FieldElem)>,
}

impl fmt::Debug for PlanarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarFunction").field("spec", &self.spec.to_string()).finish()
    }
}

impl PlanarFunction {
    pub fn new(spec: PlanarFunctionSpec) -> Arc<PlanarFunction> {
        let values: Vec<FieldElem> = spec
            .ctx()
            .elements()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&x| spec.eval(x))
            .collect();
        let comps = values.iter().map(|&v| spec.split().decompose(v)).collect();
        Arc::new(PlanarFunction { spec, values, comps })
    }

    /// Builds field, split and function from `p`, `m` and a spec string.
    pub fn from_parts(p: u32, m: u32, modulus: Option<Vec<u32>>, spec: &str) -> Result<Arc<PlanarFunction>> {
        let ctx = FieldCtx::new(p, m, modulus)?;
        let split = ExtensionSplit::new(ctx)?;
        Ok(PlanarFunction::new(PlanarFunctionSpec::parse(spec, split)?))
    }

    pub fn spec(&self) -> &PlanarFunctionSpec {
        &self.spec
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.spec.ctx()
    }

    pub fn split(&self) -> &Arc<ExtensionSplit> {
        self.spec.split()
    }

    #[inline]
    pub fn eval(&self, x: FieldElem) -> FieldElem {
        self.values[x.0 as usize]
    }

    /// `(f0(x), f1(x))` with `f(x) = f0(x) + f1(x) xi`.
    #[inline]
    pub fn components(&self, x: FieldElem) -> (FieldElem, FieldElem) {
        self.comps[x.0 as usize]
    }

    /// `f(x+y) - f(x) - f(y)`
    pub fn polarization(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        let f = self.ctx();
        f.sub(f.sub(self.eval(f.add(x, y)), self.eval(x)), self.eval(y))
    }

    /// `(f(x+y) - f(x) - f(y)) / 2`
    pub fn half_polarization(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        let f = self.ctx();
        let half = f.inv(f.from_int(2)).expect("odd characteristic");
        f.mul(half, self.polarization(x, y))
    }

    fn check_shift(&self, a: FieldElem) -> Option<Witness> {
        let f = self.ctx();
        let mut first = vec![u32::MAX; f.size() as usize];
        for x in f.elements() {
            let d = f.sub(self.eval(f.add(x, a)), self.eval(x));
            let slot = &mut first[d.0 as usize];
            if *slot != u32::MAX {
                return Some(Witness::NotPlanar { a: a.0, x: *slot, x2: x.0 });
            }
            *slot = x.0;
        }
        None
    }

    /// Checks that `x -> f(x+a) - f(x)` is a bijection for the nonzero `a`
    /// selected by `mode`; the witness is the one with the smallest `a`.
    pub fn is_planar(&self, mode: Mode) -> (bool, Option<Witness>) {
        let shifts = self.sample_shifts(mode);
        let w = shifts.par_iter().find_map_first(|&a| self.check_shift(a));
        (w.is_none(), w)
    }

    /// Nonzero shifts to test; the sampled set is sorted and deduplicated.
    pub fn sample_shifts(&self, mode: Mode) -> Vec<FieldElem> {
        let size = self.ctx().size();
        match mode {
            Mode::Exhaustive => (1..size).map(FieldElem).collect(),
            Mode::Sampled { trials, .. } => {
                if trials as u64 >= size as u64 - 1 {
                    return (1..size).map(FieldElem).collect();
                }
                let mut rng = mode.rng();
                let mut set = BTreeSet::new();
                while set.len() < trials {
                    set.insert(rng.gen_range(1..size));
                }
                set.into_iter().map(FieldElem).collect()
            }
        }
    }

    /// `f(0) = 0` and `f(a) = f(b)` exactly when `a = b` or `a = -b`.
    pub fn is_normal(&self) -> (bool, Option<Witness>) {
        let f = self.ctx();
        let zero = self.eval(FieldElem::ZERO);
        if !zero.is_zero() {
            return (false, Some(Witness::NonzeroAtZero { value: zero.0 }));
        }
        let mut first: Vec<u32> = vec![u32::MAX; f.size() as usize];
        for x in f.elements() {
            let v = self.eval(x);
            let slot = &mut first[v.0 as usize];
            if *slot == u32::MAX {
                *slot = x.0;
                let nx = f.neg(x);
                if nx > x && self.eval(nx) != v {
                    return (false, Some(Witness::NotNormal { a: x.0, b: nx.0 }));
                }
            } else {
                let prev = FieldElem(*slot);
                if prev != f.neg(x) {
                    return (false, Some(Witness::NotNormal { a: prev.0, b: x.0 }));
                }
            }
        }
        (true, None)
    }

    /// Compares the value histogram of `f` with that of `y -> y^2`.
    pub fn verify_value_distribution(&self) -> (bool, Option<Witness>) {
        let f = self.ctx();
        let n = f.size() as usize;
        let mut fc = vec![0usize; n];
        let mut sc = vec![0usize; n];
        for x in f.elements() {
            fc[self.eval(x).0 as usize] += 1;
            sc[f.mul(x, x).0 as usize] += 1;
        }
        match (0..n).find(|&c| fc[c] != sc[c]) {
            None => (true, None),
            Some(c) => (
                false,
                Some(Witness::ValueDistribution { c: c as u32, f_count: fc[c], square_count: sc[c] }),
            ),
        }
    }

    pub fn certify(&self, mode: Mode) -> PlanarityCertificate {
        let (is_planar, w1) = self.is_planar(mode);
        let (is_normal, w2) = self.is_normal();
        let (vd, w3) = self.verify_value_distribution();
        PlanarityCertificate {
            spec: self.spec.to_string(),
            field: self.ctx().descriptor(),
            mode,
            is_planar,
            is_normal,
            satisfies_value_distribution: vd,
            witnesses: [w1, w2, w3].into_iter().flatten().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(p: u32, m: u32) -> Arc<ExtensionSplit> {
        ExtensionSplit::new(FieldCtx::new(p, m, None).unwrap()).unwrap()
    }

    fn func(p: u32, m: u32, spec: &str) -> Arc<PlanarFunction> {
        PlanarFunction::new(PlanarFunctionSpec::parse(spec, split(p, m)).unwrap())
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "square",
            "albert:k=2",
            "cm:k=3",
            "dickson:i=1",
            "zhoupott:i=1,k=1",
            "ganley",
            "pw",
            "bh:k=1,b=5",
            "custom:2:1,0:1",
        ] {
            let fam: Family = s.parse().unwrap();
            assert_eq!(fam.to_string(), s);
        }
        assert!("albert".parse::<Family>().is_err());
        assert!("nope".parse::<Family>().is_err());
        assert!("custom:2".parse::<Family>().is_err());
    }

    #[test]
    fn eager_validation() {
        let s = split(3, 2);
        let bad = |fam: Family, sp: &Arc<ExtensionSplit>| {
            matches!(PlanarFunctionSpec::new(fam, sp.clone()), Err(Error::SpecConstraintViolated(_)))
        };
        // n = 1: 2n/gcd(2n,1) = 2 is even
        assert!(bad(Family::Albert { k: 1 }, &s));
        assert!(bad(Family::Dickson { i: 1 }, &s));
        assert!(bad(Family::Ganley, &s));
        assert!(bad(Family::Ganley, &split(3, 2)));
        assert!(bad(Family::CoulterMatthews { k: 2 }, &split(3, 4)));
        assert!(bad(Family::CoulterMatthews { k: 1 }, &split(5, 2)));
        assert!(bad(Family::PenttilaWilliams, &split(3, 6)));
        let s36 = split(3, 6);
        let square = s36.ctx().from_int(1);
        assert!(bad(Family::BudaghyanHelleseth { k: 1, b: square }, &s36));
        // Dickson at p=5, n=2 is admissible
        assert!(PlanarFunctionSpec::new(Family::Dickson { i: 1 }, split(5, 4)).is_ok());
        // Ganley at n = 1 is rejected by default but allowed with a lower bound of 1
        let c = SpecConstraints { ganley_min_n: 1 };
        assert!(PlanarFunctionSpec::with_constraints(Family::Ganley, split(3, 2), c).is_ok());
    }

    #[test]
    fn square_examples_f9() {
        let f = func(3, 2, "square");
        let xi = f.split().xi();
        assert_eq!(f.eval(FieldElem::ZERO), FieldElem::ZERO);
        assert_eq!(f.eval(xi), FieldElem(2));
        let ctx = f.ctx();
        let alpha = f.split().alpha();
        for x in ctx.elements() {
            let (x0, x1) = f.split().decompose(x);
            let e0 = ctx.add(ctx.mul(x0, x0), ctx.mul(alpha, ctx.mul(x1, x1)));
            let e1 = ctx.mul(ctx.from_int(2), ctx.mul(x0, x1));
            assert_eq!(f.components(x), (e0, e1));
            for y in ctx.elements() {
                assert_eq!(f.half_polarization(x, y), ctx.mul(x, y));
            }
        }
    }

    #[test]
    fn cm_k3_is_x14() {
        let f = func(3, 4, "cm:k=3");
        assert_eq!(f.spec().power_exponent(), Some(14));
        for x in f.ctx().elements() {
            assert_eq!(f.eval(x), f.ctx().pow(x, 14));
        }
    }

    #[test]
    fn dickson_components_match_formula() {
        let f = func(5, 4, "dickson:i=1");
        let ctx = f.ctx();
        let alpha = f.split().alpha();
        for x in ctx.elements() {
            let (x0, x1) = f.split().decompose(x);
            let f0 = ctx.add(ctx.mul(x0, x0), ctx.mul(alpha, ctx.pow(x1, 10)));
            let f1 = ctx.mul(ctx.from_int(2), ctx.mul(x0, x1));
            assert_eq!(f.components(x), (f0, f1));
            assert_eq!(f.half_polarization(x, x), f.eval(x));
        }
    }

    #[test]
    fn components_vanish_at_zero_for_catalog() {
        for (p, m, s) in [(3, 2, "square"), (3, 6, "albert:k=2"), (3, 4, "cm:k=3"), (5, 4, "dickson:i=1"), (3, 6, "ganley")] {
            let f = func(p, m, s);
            assert_eq!(f.components(FieldElem::ZERO), (FieldElem::ZERO, FieldElem::ZERO));
        }
    }

    #[test]
    fn x_cubed_is_not_planar() {
        let f = func(3, 2, "custom:3:1");
        let (ok, w) = f.is_planar(Mode::Exhaustive);
        assert!(!ok);
        let Some(Witness::NotPlanar { a, x, x2 }) = w else { panic!("missing witness") };
        let ctx = f.ctx();
        let d = |x: u32| ctx.sub(f.eval(ctx.add(FieldElem(x), FieldElem(a))), f.eval(FieldElem(x)));
        assert_ne!(x, x2);
        assert_eq!(d(x), d(x2));
        assert_eq!(a, 1);
    }

    #[test]
    fn shifted_square_is_not_normal() {
        let f = func(3, 2, "custom:2:1,0:1");
        assert!(f.is_planar(Mode::Exhaustive).0);
        assert_eq!(f.is_normal(), (false, Some(Witness::NonzeroAtZero { value: 1 })));
    }

    #[test]
    fn identity_map_not_normal_witness() {
        // f(x) = 2x is additive and injective: f(a) = f(-a) fails
        let f = func(3, 2, "custom:1:2");
        let (ok, w) = f.is_normal();
        assert!(!ok);
        assert!(matches!(w, Some(Witness::NotNormal { .. })));
    }

    #[test]
    fn square_certificate() {
        for (p, m) in [(3, 2), (5, 2), (7, 2)] {
            let c = func(p, m, "square").certify(Mode::Exhaustive);
            assert!(c.is_planar && c.is_normal && c.satisfies_value_distribution);
            assert!(c.witnesses.is_empty());
        }
    }

    #[test]
    fn sampled_shifts_are_deterministic() {
        let f = func(3, 6, "square");
        let m = Mode::Sampled { seed: 7, trials: 50 };
        assert_eq!(f.sample_shifts(m), f.sample_shifts(m));
        assert_eq!(f.sample_shifts(m).len(), 50);
    }

    #[test]
    fn dembowski_ostrom_detection() {
        assert!(func(3, 2, "custom:4:1,2:1").spec().is_dembowski_ostrom());
        assert!(!func(3, 2, "custom:3:1").spec().is_dembowski_ostrom());
        assert!(!func(3, 4, "cm:k=3").spec().is_dembowski_ostrom());
    }
}
