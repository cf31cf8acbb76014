use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use unitalforge::{
    suite, Collineation, ExtensionSplit, Family, FieldCtx, FieldElem, Line, Mode, PlanarFunction, Plane, Point,
    Provenance, Unital,
};

fn fields() -> &'static [Arc<FieldCtx>] {
    static F: OnceLock<Vec<Arc<FieldCtx>>> = OnceLock::new();
    F.get_or_init(|| [(3, 2), (5, 2), (7, 2), (3, 4), (3, 6), (5, 4)].iter().map(|&(p, m)| FieldCtx::new(p, m, None).unwrap()).collect())
}

fn functions() -> &'static [Arc<PlanarFunction>] {
    static F: OnceLock<Vec<Arc<PlanarFunction>>> = OnceLock::new();
    F.get_or_init(|| {
        [(3, 2, "square"), (5, 2, "square"), (3, 6, "albert:k=2"), (3, 4, "cm:k=3"), (5, 4, "dickson:i=1"), (3, 6, "ganley")]
            .iter()
            .map(|&(p, m, s)| PlanarFunction::from_parts(p, m, None, s).unwrap())
            .collect()
    })
}

fn planes() -> &'static [Arc<Plane>] {
    static P: OnceLock<Vec<Arc<Plane>>> = OnceLock::new();
    P.get_or_init(|| [(3, "square"), (5, "square")].iter().map(|&(p, s)| suite::plane(p, 2, s).unwrap()).collect())
}

fn elem(f: &FieldCtx, r: u32) -> FieldElem {
    FieldElem(r % f.size())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(i in 0usize..6, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = &fields()[i];
        let (a, b, c) = (elem(f, a), elem(f, b), elem(f, c));
        prop_assert_eq!(f.add(a, b), f.add_reference(a, b));
        prop_assert_eq!(f.mul(a, b), f.mul_reference(a, b));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.from_int(1));
        }
        prop_assert_eq!(f.pow(a, 7), f.pow_reference(a, 7));
    }

    #[test]
    fn subfield_split(i in 0usize..6, a in any::<u32>(), b in any::<u32>()) {
        let f = &fields()[i];
        let s = ExtensionSplit::new(f.clone()).unwrap();
        let (a, b) = (elem(f, a), elem(f, b));
        let (a0, a1) = s.decompose(a);
        prop_assert!(s.in_subfield(a0) && s.in_subfield(a1));
        prop_assert_eq!(s.recompose(a0, a1), a);
        prop_assert_eq!(s.conj(s.conj(a)), a);
        prop_assert!(s.in_subfield(s.trace(a)));
        prop_assert_eq!(s.trace(f.add(a, b)), f.add(s.trace(a), s.trace(b)));
        prop_assert_eq!(s.norm(f.mul(a, b)), f.mul(s.norm(a), s.norm(b)));
    }

    #[test]
    fn trace_fibers_have_q_elements(i in 0usize..3, t in any::<u32>()) {
        let f = &fields()[i];
        let s = ExtensionSplit::new(f.clone()).unwrap();
        let target = s.subfield()[t as usize % s.subfield().len()];
        let fiber = f.elements().filter(|&x| s.trace(x) == target).count();
        prop_assert_eq!(fiber as u32, s.q());
    }

    #[test]
    fn polarization_symmetric_and_biadditive(i in 0usize..6, x in any::<u32>(), y in any::<u32>(), z in any::<u32>()) {
        let func = &functions()[i];
        let f = func.ctx();
        let (x, y, z) = (elem(f, x), elem(f, y), elem(f, z));
        prop_assert_eq!(func.polarization(x, y), func.polarization(y, x));
        prop_assert_eq!(func.polarization(x, y), f.sub(f.sub(func.eval(f.add(x, y)), func.eval(x)), func.eval(y)));
        if func.spec().is_dembowski_ostrom() {
            prop_assert_eq!(func.polarization(f.add(x, z), y), f.add(func.polarization(x, y), func.polarization(z, y)));
        }
    }

    #[test]
    fn collineations_preserve_incidence(
        i in 0usize..2, kind in 0u8..3, u in any::<u32>(), v in any::<u32>(), w in any::<u32>(),
        pt in any::<u64>(), ln in any::<u64>(),
    ) {
        let pl = &planes()[i];
        let f = pl.ctx();
        let (u, v, w) = (elem(f, u), elem(f, v), elem(f, w));
        let g = match kind {
            0 => Collineation::Shift { u, v },
            1 => Collineation::Sigma { u, v, w },
            _ => Collineation::Gamma { c: if u.is_zero() { f.from_int(1) } else { u }, e: w.0 % f.m() },
        };
        let p = pl.point(pt % pl.point_count()).unwrap();
        let l = pl.line(ln % pl.line_count()).unwrap();
        prop_assert_eq!(pl.incident(&p, &l), pl.incident(&pl.apply(&g, &p), &pl.apply_line(&g, &l)));
        let through: Vec<Line> = pl.lines_through(&p);
        prop_assert_eq!(through.len() as u64, pl.order() + 1);
    }

    #[test]
    fn sigma_composition_matches_application(
        i in 0usize..2, a in any::<[u32; 6]>(), pt in any::<u64>(),
    ) {
        let pl = &planes()[i];
        let f = pl.ctx();
        let e = |k: usize| elem(f, a[k]);
        let inner = Collineation::Sigma { u: e(0), v: e(1), w: e(2) };
        let outer = Collineation::Sigma { u: e(3), v: e(4), w: e(5) };
        let both = pl.sigma_compose(&outer, &inner).unwrap();
        let p = pl.point(pt % pl.point_count()).unwrap();
        prop_assert_eq!(pl.apply(&both, &p), pl.apply(&outer, &pl.apply(&inner, &p)));
    }

    #[test]
    fn points_on_line_all_incident(i in 0usize..2, ln in any::<u64>()) {
        let pl = &planes()[i];
        let l = pl.line(ln % pl.line_count()).unwrap();
        let pts: Vec<Point> = pl.points_on_line(&l);
        prop_assert_eq!(pts.len() as u64, pl.order() + 1);
        prop_assert!(pts.iter().all(|p| pl.incident(p, &l)));
    }

    #[test]
    fn shift_images_of_utheta_are_unitals(i in 0usize..2, u in any::<u32>(), v in any::<u32>()) {
        let pl = &planes()[i];
        let f = pl.ctx();
        let theta = unitalforge::unital::auto_theta(pl).unwrap();
        let base = unitalforge::unital::build_u_theta(pl, theta).unwrap();
        let g = Collineation::Shift { u: elem(f, u), v: elem(f, v) };
        let mut img = Unital::from_points(pl.clone(), Provenance::General { description: "shift image".into() }, base.image(&g));
        prop_assert!(img.verify_embedded(Mode::Exhaustive).is_ok());
    }

    #[test]
    fn mode_and_spec_strings_round_trip(seed in any::<u64>(), trials in 1usize..100_000, k in 1u32..9, b in 0u32..1000) {
        let m = Mode::Sampled { seed, trials };
        let s = format!("sampled:{seed}:{trials}");
        prop_assert_eq!(s.parse::<Mode>().unwrap(), m);
        for spec in [format!("albert:k={k}"), format!("bh:k={k},b={b}"), format!("custom:{k}:{b},0:1")] {
            let fam: Family = spec.parse().unwrap();
            prop_assert_eq!(fam.to_string(), spec);
        }
    }
}

#[test]
fn unital_file_round_trip_all_thetas() {
    let pl = &planes()[0];
    for theta in suite::admissible_thetas(pl).unwrap() {
        let u = unitalforge::unital::build_u_theta(pl, theta).unwrap();
        let mut buf = Vec::new();
        u.write_to(&mut buf).unwrap();
        let back = Unital::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.points(), u.points());
        assert_eq!(back.provenance(), u.provenance());
        assert_eq!(back.theta(), Some(theta));
    }
}
