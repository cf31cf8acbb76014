//! Brute-force recomputations that share no code with the library beyond
//! its public entry points: a hand-rolled `F_{p^2} = F_p[i]/(i^2 - n)`, a
//! direct model of `Pi(x^2)`, and a naive O'Nan counter.

use unitalforge::{analysis, suite, unital, FieldElem, Mode, PlanarFunction};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
struct E(u32, u32);

/// `F_p[i]` with `i^2 = n`, `n` a nonsquare mod `p`.
struct Quad {
    p: u32,
    n: u32,
}

impl Quad {
    fn new(p: u32) -> Quad {
        let n = (2..p).find(|&n| (1..p).all(|x| x * x % p != n)).unwrap();
        Quad { p, n }
    }
    fn all(&self) -> Vec<E> {
        (0..self.p).flat_map(|a| (0..self.p).map(move |b| E(a, b))).collect()
    }
    fn add(&self, x: E, y: E) -> E {
        E((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }
    fn neg(&self, x: E) -> E {
        E((self.p - x.0) % self.p, (self.p - x.1) % self.p)
    }
    fn mul(&self, x: E, y: E) -> E {
        let p = self.p;
        E((x.0 * y.0 + self.n * (x.1 * y.1 % p)) % p, (x.0 * y.1 + x.1 * y.0) % p)
    }
    fn pow(&self, x: E, e: u32) -> E {
        (0..e).fold(E(1, 0), |acc, _| self.mul(acc, x))
    }
    fn is_base(&self, x: E) -> bool {
        x.1 == 0
    }
}

/// A point set and its secant lines, as sorted point-index lists.
struct Design {
    points: usize,
    blocks: Vec<Vec<usize>>,
}

/// Secants of a point set in `Pi(x^2)` over `F_{p^2}`, lines built from the definition.
fn shift_plane_design(k: &Quad, member: impl Fn(E, E) -> bool) -> Option<Design> {
    #[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
    enum P {
        A(E, E),
        S(E),
        Inf,
    }
    let els = k.all();
    let mut pts: Vec<P> = Vec::new();
    for &x in &els {
        for &y in &els {
            if member(x, y) {
                pts.push(P::A(x, y));
            }
        }
    }
    pts.push(P::Inf);
    let index = |p: &P| pts.iter().position(|q| q == p);
    let mut lines: Vec<Vec<P>> = Vec::new();
    for &a in &els {
        for &b in &els {
            let mut l: Vec<P> = els.iter().map(|&x| P::A(x, k.add(k.pow(k.add(x, a), 2), k.neg(b)))).collect();
            l.push(P::S(a));
            lines.push(l);
        }
        let mut v: Vec<P> = els.iter().map(|&y| P::A(a, y)).collect();
        v.push(P::Inf);
        lines.push(v);
    }
    let mut inf: Vec<P> = els.iter().map(|&a| P::S(a)).collect();
    inf.push(P::Inf);
    lines.push(inf);
    let q = k.p as usize;
    let mut blocks = Vec::new();
    for l in &lines {
        let mut on: Vec<usize> = l.iter().filter_map(index).collect();
        match on.len() {
            1 => {}
            n if n == q + 1 => {
                on.sort();
                blocks.push(on);
            }
            _ => return None,
        }
    }
    Some(Design { points: pts.len(), blocks })
}

/// Secants of the Hermitian curve `x^{q+1} + y^{q+1} + z^{q+1} = 0` in `PG(2, q^2)`.
fn hermitian_design(k: &Quad) -> Design {
    let q = k.p;
    let els = k.all();
    let reps = |x: &[E; 3]| {
        // normalize: first nonzero coordinate is 1
        let lead = x.iter().position(|c| *c != E(0, 0)).unwrap();
        let inv = els.iter().copied().find(|&c| k.mul(c, x[lead]) == E(1, 0)).unwrap();
        x.map(|c| k.mul(c, inv))
    };
    let mut proj: Vec<[E; 3]> = Vec::new();
    for &a in &els {
        for &b in &els {
            for &c in &els {
                let v = [a, b, c];
                if v != [E(0, 0); 3] && reps(&v) == v {
                    proj.push(v);
                }
            }
        }
    }
    let norm = |x: E| k.pow(x, q + 1);
    let pts: Vec<[E; 3]> =
        proj.iter().copied().filter(|v| k.add(k.add(norm(v[0]), norm(v[1])), norm(v[2])) == E(0, 0)).collect();
    let dot = |l: &[E; 3], p: &[E; 3]| k.add(k.add(k.mul(l[0], p[0]), k.mul(l[1], p[1])), k.mul(l[2], p[2]));
    let blocks = proj
        .iter()
        .map(|l| (0..pts.len()).filter(|&i| dot(l, &pts[i]) == E(0, 0)).collect::<Vec<_>>())
        .filter(|b| b.len() == q as usize + 1)
        .collect();
    Design { points: pts.len(), blocks }
}

/// Counts 4-sets of blocks meeting pairwise in 6 distinct points.
fn count_onan(d: &Design) -> usize {
    let nb = d.blocks.len();
    let meet = |a: usize, b: usize| d.blocks[a].iter().find(|p| d.blocks[b].contains(p)).copied();
    let table: Vec<Vec<Option<usize>>> = (0..nb).map(|a| (0..nb).map(|b| if a == b { None } else { meet(a, b) }).collect()).collect();
    let mut count = 0;
    for a in 0..nb {
        for b in a + 1..nb {
            let Some(ab) = table[a][b] else { continue };
            for c in b + 1..nb {
                let (Some(ac), Some(bc)) = (table[a][c], table[b][c]) else { continue };
                if ab == ac || ab == bc || ac == bc {
                    continue;
                }
                for ((&ae, &be), &ce) in table[a].iter().zip(&table[b]).zip(&table[c]).skip(c + 1) {
                    let (Some(ae), Some(be), Some(ce)) = (ae, be, ce) else { continue };
                    let mut six = [ab, ac, bc, ae, be, ce];
                    six.sort();
                    if six.windows(2).all(|w| w[0] != w[1]) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn utheta_oracle(p: u32) -> Design {
    let k = Quad::new(p);
    // Any theta whose point set is a unital will do; the first one found.
    k.all()
        .into_iter()
        .filter(|&t| t != E(0, 0))
        .find_map(|theta| {
            let base: Vec<E> = k.all().into_iter().filter(|&s| k.is_base(s)).collect();
            let member = |_x: E, y: E| base.iter().any(|&s| k.mul(s, theta) == y);
            shift_plane_design(&k, member)
        })
        .expect("some theta gives a unital")
}

#[test]
fn utheta_q3_matches_oracle() {
    let d = utheta_oracle(3);
    assert_eq!((d.points, d.blocks.len()), (28, 63));
    let u = suite::utheta(3, 2, "square").unwrap();
    assert_eq!(u.points().len(), d.points);
    assert_eq!(u.blocks().unwrap().len(), d.blocks.len());
    let onan = count_onan(&d);
    assert_eq!(onan, suite::ONAN_COUNT_SQUARE_Q3);
    let s = analysis::find_onan_exhaustive(&u, analysis::DEFAULT_ONAN_BUDGET).unwrap();
    assert!(s.complete);
    assert_eq!(s.configs.len(), onan);
}

#[test]
fn utheta_q5_design_matches_oracle() {
    let d = utheta_oracle(5);
    assert_eq!((d.points, d.blocks.len()), (126, 525));
    // every pair of points on exactly one block
    let mut cover = vec![0u8; d.points * d.points];
    for b in &d.blocks {
        for &x in b {
            for &y in b {
                if x < y {
                    cover[x * d.points + y] += 1;
                }
            }
        }
    }
    for x in 0..d.points {
        for y in x + 1..d.points {
            assert_eq!(cover[x * d.points + y], 1);
        }
    }
}

#[test]
fn hermitian_q3_has_no_onan() {
    let d = hermitian_design(&Quad::new(3));
    assert_eq!((d.points, d.blocks.len()), (28, 63));
    assert_eq!(count_onan(&d), 0);
    let h = unital::build_classical_baseline(3, 1).unwrap();
    assert_eq!(h.points().len(), d.points);
    let s = analysis::find_onan_exhaustive(&h, analysis::DEFAULT_ONAN_BUDGET).unwrap();
    assert!(s.configs.is_empty());
}

#[test]
fn every_theta_count_agrees_with_oracle_q3() {
    // Number of theta giving a unital, by oracle and by the hypothesis check.
    let k = Quad::new(3);
    let base: Vec<E> = k.all().into_iter().filter(|&s| k.is_base(s)).collect();
    let oracle = k
        .all()
        .into_iter()
        .filter(|&t| t != E(0, 0))
        .filter(|&theta| shift_plane_design(&k, |_, y| base.iter().any(|&s| k.mul(s, theta) == y)).is_some())
        .count();
    let pl = suite::plane(3, 2, "square").unwrap();
    assert_eq!(suite::admissible_thetas(&pl).unwrap().len(), oracle);
}

/// Planarity by evaluating `f` with the schoolbook reference arithmetic.
fn planar_by_reference(p: u32, m: u32, spec: &str, exponent: u64) -> bool {
    let f = PlanarFunction::from_parts(p, m, None, spec).unwrap();
    let ctx = f.ctx().clone();
    let vals: Vec<FieldElem> = ctx.elements().map(|x| ctx.pow_reference(x, exponent)).collect();
    for (i, x) in ctx.elements().enumerate() {
        assert_eq!(f.eval(x), vals[i], "{spec} at {x}");
    }
    let n = ctx.size() as usize;
    let planar = ctx.elements().skip(1).all(|a| {
        let mut seen = vec![false; n];
        ctx.elements().all(|x| {
            let minus_fx = ctx.mul_reference(FieldElem(p - 1), vals[x.0 as usize]);
            let d = ctx.add_reference(vals[ctx.add_reference(x, a).0 as usize], minus_fx);
            !std::mem::replace(&mut seen[d.0 as usize], true)
        })
    });
    planar
}

#[test]
fn power_maps_planar_by_reference() {
    assert!(planar_by_reference(3, 2, "square", 2));
    assert!(planar_by_reference(3, 6, "albert:k=2", 10));
    assert!(planar_by_reference(3, 4, "cm:k=3", 14));
    let f = PlanarFunction::from_parts(3, 6, None, "albert:k=2").unwrap();
    assert!(f.is_planar(Mode::Exhaustive).0);
}
