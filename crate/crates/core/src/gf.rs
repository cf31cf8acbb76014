//! Table-driven arithmetic in `F_{p^m}` for odd `p`.
//!
//! Elements are identified with their canonical index `sum c_i p^i`, where
//! `c_i` is the coefficient of `x^i` in the residue modulo the defining
//! polynomial. Multiplication goes through discrete log/antilog tables built
//! from the smallest primitive element; addition uses Zech logarithms. A
//! schoolbook polynomial route (`mul_reference`, `add_reference`) is kept as an
//! independent path for cross-checking.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldCtx::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

const NONE: u32 = u32::MAX;

/// A field element, stored as its canonical index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic context for `F_{p^m}`.
pub struct FieldCtx {
    p: u32,
    m: u32,
    modulus: Vec<u32>,
    size: u32,
    generator: FieldElem,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    neg: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .finish()
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `F_p`, coefficients low degree first.
mod poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        super::pow_mod(a, p - 2, p)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = r[r.len() - 1] * lead_inv % p;
            for (i, &bi) in b.iter().enumerate() {
                let t = r[shift + i] + p - c * bi % p;
                r[shift + i] = t % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
        rem(&out, f, p)
    }

    pub fn pow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &b, f, p);
            }
            b = mul_mod(&b, &b, f, p);
            e >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = (x + p - y) % p;
        }
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^(p^k) mod f`.
    pub fn frobenius_x(k: u32, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[0, 1], f, p);
        for _ in 0..k {
            acc = pow_mod(&acc, p, f, p);
        }
        acc
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Rabin's test: `f` of degree `m` is irreducible over `F_p` iff
/// `f | x^(p^m) - x` and `gcd(f, x^(p^(m/r)) - x) = 1` for every prime `r | m`.
pub fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let f: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    if f.len() < 2 || *f.last().unwrap() != 1 {
        return false;
    }
    let m = (f.len() - 1) as u32;
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let full = poly::frobenius_x(m, &f, p64);
    if !poly::sub(&full, &x, p64).is_empty() {
        return false;
    }
    for r in prime_factors(m as u64) {
        let partial = poly::frobenius_x(m / r as u32, &f, p64);
        let diff = poly::sub(&partial, &x, p64);
        let g = poly::gcd(&f, &diff, p64);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `m` over `F_p`,
/// comparing coefficients low degree first.
pub fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    let total = (p as u64).pow(m);
    for r in 0..total {
        let mut coeffs = vec![0u32; m as usize + 1];
        let mut v = r;
        for i in (0..m as usize).rev() {
            coeffs[i] = (v % p as u64) as u32;
            v /= p as u64;
        }
        coeffs[m as usize] = 1;
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    /// Builds `F_{p^m}`; with `modulus == None` the default modulus is used.
    pub fn new(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Result<Arc<FieldCtx>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::EvenCharacteristic(p));
        }
        if m == 0 {
            return Err(Error::NotIrreducible(vec![]));
        }
        let order = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge(p, m));
        }
        let modulus = match modulus {
            Some(f) => {
                let ok = f.len() == m as usize + 1
                    && f.iter().all(|&c| c < p)
                    && is_irreducible(p, &f);
                if !ok {
                    return Err(Error::NotIrreducible(f));
                }
                f
            }
            None => default_modulus(p, m),
        };
        let mut ctx = FieldCtx {
            p,
            m,
            modulus,
            size: order as u32,
            generator: FieldElem::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            zech: Vec::new(),
            neg: Vec::new(),
        };
        ctx.build_tables();
        Ok(Arc::new(ctx))
    }

    fn build_tables(&mut self) {
        let n = self.size;
        let units = n - 1;
        self.neg = (0..n)
            .map(|i| {
                let c = self.coeffs(FieldElem(i));
                let c: Vec<u32> = c.iter().map(|&d| (self.p - d) % self.p).collect();
                self.from_coeffs(&c).0
            })
            .collect();

        // Smallest-index primitive element via the reference multiplication.
        let factors = prime_factors(units as u64);
        let g = (1..n)
            .map(FieldElem)
            .find(|&c| {
                factors
                    .iter()
                    .all(|&r| self.pow_reference(c, units as u64 / r) != FieldElem::ONE)
            })
            .expect("the multiplicative group is cyclic");
        self.generator = g;

        let mut exp = vec![0u32; 2 * units as usize];
        let mut log = vec![NONE; n as usize];
        let mut x = FieldElem::ONE;
        for k in 0..units {
            exp[k as usize] = x.0;
            log[x.0 as usize] = k;
            x = self.mul_reference(x, g);
        }
        for k in 0..units as usize {
            exp[k + units as usize] = exp[k];
        }
        self.exp = exp;
        self.log = log;

        self.zech = (0..units)
            .map(|k| {
                let s = self.add_reference(FieldElem::ONE, FieldElem(self.exp[k as usize]));
                if s.is_zero() {
                    NONE
                } else {
                    self.log[s.0 as usize]
                }
            })
            .collect();
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of elements, `p^m`.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    /// `p=<p>,m=<m>,mod=[c0,c1,...,1]`
    pub fn descriptor(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
        format!("p={},m={},mod=[{}]", self.p, self.m, coeffs.join(","))
    }

    /// Parses a descriptor produced by [`FieldCtx::descriptor`].
    pub fn from_descriptor(s: &str) -> Result<Arc<FieldCtx>> {
        let bad = || Error::Format(format!("bad field descriptor {s:?}"));
        let s = s.trim();
        let rest = s.strip_prefix("p=").ok_or_else(bad)?;
        let (p, rest) = rest.split_once(",m=").ok_or_else(bad)?;
        let (m, rest) = rest.split_once(",mod=[").ok_or_else(bad)?;
        let coeffs = rest.strip_suffix(']').ok_or_else(bad)?;
        let p: u32 = p.parse().map_err(|_| bad())?;
        let m: u32 = m.parse().map_err(|_| bad())?;
        let modulus = coeffs
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        FieldCtx::new(p, m, Some(modulus))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.size).map(FieldElem)
    }

    pub fn elem(&self, index: u32) -> FieldElem {
        assert!(index < self.size, "index {index} out of range");
        FieldElem(index)
    }

    /// The constant `k mod p` of the prime field.
    pub fn from_int(&self, k: i64) -> FieldElem {
        FieldElem(k.rem_euclid(self.p as i64) as u32)
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        let mut v = x.0;
        (0..self.m)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FieldElem {
        let mut idx = 0u32;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        FieldElem(idx)
    }

    /// Coefficient-wise addition.
    pub fn add_reference(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place = place.wrapping_mul(self.p);
        }
        FieldElem(out)
    }

    /// Schoolbook polynomial product reduced modulo the defining polynomial.
    pub fn mul_reference(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p as u64;
        let f: Vec<u64> = self.modulus.iter().map(|&c| c as u64).collect();
        let a: Vec<u64> = self.coeffs(a).iter().map(|&c| c as u64).collect();
        let b: Vec<u64> = self.coeffs(b).iter().map(|&c| c as u64).collect();
        let r = poly::mul_mod(&a, &b, &f, p);
        let r: Vec<u32> = r.iter().map(|&c| c as u32).collect();
        self.from_coeffs(&r)
    }

    pub fn pow_reference(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_reference(acc, base);
            }
            base = self.mul_reference(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let units = self.size - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let d = if lb >= la { lb - la } else { lb + units - la };
        let z = self.zech[d as usize];
        if z == NONE {
            FieldElem::ZERO
        } else {
            FieldElem(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        FieldElem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let units = self.size - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElem(self.exp[((units - l) % units) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply; `pow(0, 0) = 1`.
    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete log to the base [`FieldCtx::generator`].
    pub fn log(&self, a: FieldElem) -> Option<u32> {
        match self.log[a.0 as usize] {
            NONE => None,
            l => Some(l),
        }
    }

    pub fn exp(&self, k: u64) -> FieldElem {
        FieldElem(self.exp[(k % (self.size as u64 - 1)) as usize])
    }

    /// `x^(p^k)`.
    pub fn frobenius(&self, x: FieldElem, k: u32) -> FieldElem {
        let k = k % self.m;
        if x.is_zero() || k == 0 {
            return x;
        }
        let units = (self.size - 1) as u64;
        let e = pow_mod(self.p as u64, k as u64, units);
        let l = self.log[x.0 as usize] as u64;
        FieldElem(self.exp[(l * e % units) as usize])
    }

    /// Quadratic character of the whole field: `x^((|F|-1)/2)` read in {-1, 0, 1}.
    pub fn quadratic_character(&self, x: FieldElem) -> i8 {
        character_from_power(self.pow(x, (self.size as u64 - 1) / 2), self.p)
    }

    /// `q - 1` at zero, `-1` elsewhere, with `q = |F|`.
    pub fn nu(&self, b: FieldElem) -> i64 {
        if b.is_zero() {
            self.size as i64 - 1
        } else {
            -1
        }
    }

    /// Number of `(x0, x1)` with `a0 x0^2 + a1 x0 x1 + a2 x1^2 = b`, via
    /// `q + nu(b) eta(-Delta)` with `Delta = a0 a2 - a1^2/4`.
    pub fn quadratic_solution_count(
        &self,
        a0: FieldElem,
        a1: FieldElem,
        a2: FieldElem,
        b: FieldElem,
    ) -> Result<i64> {
        let four_inv = self.inv(self.from_int(4))?;
        let delta = self.sub(self.mul(a0, a2), self.mul(self.mul(a1, a1), four_inv));
        if delta.is_zero() {
            return Err(Error::DegenerateForm);
        }
        let eta = self.quadratic_character(self.neg(delta)) as i64;
        Ok(self.size as i64 + self.nu(b) * eta)
    }
}

fn character_from_power(v: FieldElem, p: u32) -> i8 {
    match v.0 {
        0 => 0,
        1 => 1,
        x if x == p - 1 => -1,
        x => panic!("Euler criterion produced {x}, not in {{0, 1, -1}}"),
    }
}

/// Smallest `xi` with `xi^2` in `F_q` and `xi` outside `F_q`, with `alpha = xi^2`.
pub fn choose_xi_alpha(ctx: &FieldCtx) -> Result<(FieldElem, FieldElem)> {
    if !ctx.m().is_multiple_of(2) {
        return Err(Error::OddDegree(ctx.m()));
    }
    let q = (ctx.p() as u64).pow(ctx.m() / 2);
    let in_sub = |x: FieldElem| ctx.pow(x, q) == x;
    ctx.elements()
        .find_map(|x| {
            let sq = ctx.mul(x, x);
            (!in_sub(x) && in_sub(sq)).then_some((x, sq))
        })
        .ok_or(Error::SingularSystem)
}

/// `F_{q^2}` viewed as a 2-dimensional space over `F_q` with basis `(1, xi)`.
pub struct ExtensionSplit {
    ctx: Arc<FieldCtx>,
    n: u32,
    q: u32,
    xi: FieldElem,
    frob_q: Vec<u32>,
    sub_elems: Vec<FieldElem>,
    sub_rank: Vec<u32>,
    dec: Vec<(FieldElem, FieldElem)>,
}

impl fmt::Debug for ExtensionSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionSplit")
            .field("field", &self.ctx.descriptor())
            .field("n", &self.n)
            .field("xi", &self.xi)
            .finish()
    }
}

impl ExtensionSplit {
    /// Split with the default `xi` from [`choose_xi_alpha`].
    pub fn new(ctx: Arc<FieldCtx>) -> Result<Arc<ExtensionSplit>> {
        let (xi, _) = choose_xi_alpha(&ctx)?;
        Self::with_xi(ctx, xi)
    }

    pub fn with_xi(ctx: Arc<FieldCtx>, xi: FieldElem) -> Result<Arc<ExtensionSplit>> {
        if !ctx.m().is_multiple_of(2) {
            return Err(Error::OddDegree(ctx.m()));
        }
        let n = ctx.m() / 2;
        let q = ctx.p().pow(n);
        let frob_q: Vec<u32> = ctx.elements().map(|x| ctx.frobenius(x, n).0).collect();
        if frob_q[xi.0 as usize] == xi.0 {
            return Err(Error::XiInSubfield(xi.0));
        }
        let sub_elems: Vec<FieldElem> = ctx
            .elements()
            .filter(|x| frob_q[x.0 as usize] == x.0)
            .collect();
        debug_assert_eq!(sub_elems.len() as u32, q);
        let mut sub_rank = vec![NONE; ctx.size() as usize];
        for (r, x) in sub_elems.iter().enumerate() {
            sub_rank[x.0 as usize] = r as u32;
        }
        // x - x^q = x1 (xi - xi^q)
        let denom = ctx.inv(ctx.sub(xi, FieldElem(frob_q[xi.0 as usize])))?;
        let dec = ctx
            .elements()
            .map(|x| {
                let x1 = ctx.mul(ctx.sub(x, FieldElem(frob_q[x.0 as usize])), denom);
                let x0 = ctx.sub(x, ctx.mul(x1, xi));
                (x0, x1)
            })
            .collect();
        Ok(Arc::new(ExtensionSplit {
            ctx,
            n,
            q,
            xi,
            frob_q,
            sub_elems,
            sub_rank,
            dec,
        }))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// `n` with `q = p^n`.
    pub fn sub_degree(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn xi(&self) -> FieldElem {
        self.xi
    }

    /// `xi^2`, meaningful as a subfield element when `xi^2` lies in `F_q`.
    pub fn alpha(&self) -> FieldElem {
        self.ctx.mul(self.xi, self.xi)
    }

    /// Subfield elements in canonical order.
    pub fn subfield(&self) -> &[FieldElem] {
        &self.sub_elems
    }

    #[inline]
    pub fn in_subfield(&self, x: FieldElem) -> bool {
        self.sub_rank[x.0 as usize] != NONE
    }

    /// Position of `x` in [`ExtensionSplit::subfield`].
    #[inline]
    pub fn subfield_rank(&self, x: FieldElem) -> Option<u32> {
        match self.sub_rank[x.0 as usize] {
            NONE => None,
            r => Some(r),
        }
    }

    /// `x^q`.
    #[inline]
    pub fn conj(&self, x: FieldElem) -> FieldElem {
        FieldElem(self.frob_q[x.0 as usize])
    }

    /// `Tr_{q^2/q}(x) = x + x^q`.
    #[inline]
    pub fn trace(&self, x: FieldElem) -> FieldElem {
        self.ctx.add(x, self.conj(x))
    }

    /// `N_{q^2/q}(x) = x^(q+1)`.
    #[inline]
    pub fn norm(&self, x: FieldElem) -> FieldElem {
        self.ctx.mul(x, self.conj(x))
    }

    #[inline]
    pub fn decompose(&self, x: FieldElem) -> (FieldElem, FieldElem) {
        self.dec[x.0 as usize]
    }

    pub fn recompose(&self, x0: FieldElem, x1: FieldElem) -> FieldElem {
        self.ctx.add(x0, self.ctx.mul(x1, self.xi))
    }

    /// Quadratic character of `F_q`, for `x` in the subfield.
    pub fn eta_sub(&self, x: FieldElem) -> i8 {
        debug_assert!(self.in_subfield(x));
        character_from_power(self.ctx.pow(x, (self.q as u64 - 1) / 2), self.ctx.p())
    }

    /// `nu` of `F_q`.
    pub fn nu_sub(&self, b: FieldElem) -> i64 {
        if b.is_zero() {
            self.q as i64 - 1
        } else {
            -1
        }
    }

    /// Smallest-index `theta` with `theta^(q+1)` a nonsquare of `F_q`.
    pub fn choose_theta(&self) -> FieldElem {
        self.ctx
            .elements()
            .find(|&t| self.eta_sub(self.norm(t)) == -1)
            .expect("odd powers of a primitive element qualify")
    }

    /// Returns the default `(xi, alpha)` pair of the underlying field.
    pub fn choose_xi_alpha(&self) -> (FieldElem, FieldElem) {
        choose_xi_alpha(&self.ctx).expect("even degree checked at construction")
    }
}
