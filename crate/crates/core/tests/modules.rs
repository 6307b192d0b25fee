use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrlat_core::density::center_density;
use wrlat_core::modules::*;
use wrlat_core::svp::enumerate_minimum;
use wrlat_core::{Element, NumberField};

const RAMIFIED: [(u64, u64); 5] = [(3, 9), (3, 63), (5, 25), (5, 275), (7, 49)];
const UNRAMIFIED: [(u64, u64); 4] = [(3, 7), (3, 13), (3, 31), (5, 11)];

fn combo(basis: &ModuleBasis, a: &[i64]) -> Element {
    Element::combination(&basis.field, a, &basis.rows())
}

fn ramified_families(nf: &NumberField) -> Vec<ModuleBasis> {
    let f = &nf.spec;
    let mut out = vec![build_ok(f)];
    for m in 1..=12u64 {
        out.push(build_mm_ramified(f, m).unwrap());
        if m % f.p != 0 {
            out.push(build_orbit_m(f, m).unwrap());
        }
        for c in 0..m.min(4) {
            out.push(build_mmc(f, m, c).unwrap());
        }
    }
    out.push(build_b_ramified(nf).unwrap());
    out
}

fn unramified_families(nf: &NumberField) -> Vec<ModuleBasis> {
    let f = &nf.spec;
    let mut out = vec![build_ok(f)];
    for m in 1..=12u64 {
        out.push(build_mm_unramified(f, m).unwrap());
    }
    for j in 1..=f.s {
        out.push(build_bj_unramified(f, j).unwrap());
    }
    out
}

#[test]
fn gram_determinant_identity() {
    for (p, n) in RAMIFIED {
        let nf = NumberField::new(p, n).unwrap();
        for b in ramified_families(&nf) {
            let g = gram(&nf.traces, &b).unwrap();
            let idx = b.index();
            assert_eq!(g.det(), &idx * &idx * nf.spec.discriminant());
        }
    }
    for (p, n) in UNRAMIFIED {
        let nf = NumberField::new(p, n).unwrap();
        for b in unramified_families(&nf) {
            gram(&nf.traces, &b).unwrap();
        }
    }
}

#[test]
fn rows_and_combinations_satisfy_predicates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let all: Vec<(u64, u64)> = RAMIFIED.iter().chain(UNRAMIFIED.iter()).copied().collect();
    for (p, n) in all {
        let nf = NumberField::new(p, n).unwrap();
        let fams = if nf.spec.ramified {
            ramified_families(&nf)
        } else {
            unramified_families(&nf)
        };
        for b in fams {
            for r in b.rows() {
                assert_ne!(family_predicate(&nf.traces, &b, &r).unwrap(), Some(false));
                assert!(membership(&r, &b).unwrap());
            }
            for _ in 0..2 * p * p {
                let a: Vec<i64> = (0..p).map(|_| rng.gen_range(-4..=4)).collect();
                let x = combo(&b, &a);
                assert_ne!(family_predicate(&nf.traces, &b, &x).unwrap(), Some(false));
                assert!(membership(&x, &b).unwrap());
            }
        }
    }
}

#[test]
fn predicate_and_membership_agree_on_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, n) in [(3, 9), (5, 25), (3, 7), (5, 11)] {
        let nf = NumberField::new(p, n).unwrap();
        let fams = if nf.spec.ramified {
            ramified_families(&nf)
        } else {
            unramified_families(&nf)
        };
        for b in fams {
            for _ in 0..50 {
                let x = nf.element((0..p).map(|_| rng.gen_range(-20..=20)).collect()).unwrap();
                if let Some(v) = family_predicate(&nf.traces, &b, &x).unwrap() {
                    assert_eq!(v, membership(&x, &b).unwrap(), "{} {:?}", b.family, b.params);
                }
            }
        }
    }
}

fn gram_form(nf: &NumberField, b: &ModuleBasis, a: &[i64]) -> i128 {
    gram(&nf.traces, b).unwrap().norm(a)
}

#[test]
fn literal_trace_squares_match_gram_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (p, n) in RAMIFIED {
        let nf = NumberField::new(p, n).unwrap();
        let f = &nf.spec;
        for m in 1..=10u64 {
            let mm = build_mm_ramified(f, m).unwrap();
            let orbit = (m % p != 0).then(|| build_orbit_m(f, m).unwrap());
            let mmc: Vec<ModuleBasis> = (0..m.min(p)).map(|c| build_mmc(f, m, c).unwrap()).collect();
            for _ in 0..200 {
                let a: Vec<i64> = (0..p).map(|_| rng.gen_range(-6..=6)).collect();
                let lit = if m % p == 0 {
                    trace_sq_mm_pdiv(f, m, &a).unwrap()
                } else {
                    trace_sq_mm_pcoprime(f, m, &a).unwrap()
                };
                assert_eq!(lit, gram_form(&nf, &mm, &a), "({p},{n}) m={m} a={a:?}");
                if let Some(o) = &orbit {
                    assert_eq!(trace_sq_orbit(f, m, &a).unwrap(), gram_form(&nf, o, &a));
                    // u Q_1 + m^2 Q_2 split over the full coefficient vector
                    let s: i128 = a.iter().map(|&v| v as i128).sum();
                    let q1 = q_spread(&a, p);
                    let u = f.u_value() as i128;
                    assert_eq!(
                        trace_sq_orbit(f, m, &a).unwrap(),
                        p as i128 * (u * q1 + (m * m) as i128 * s * s)
                    );
                }
                for b in &mmc {
                    let c = b.params.c.unwrap();
                    assert_eq!(trace_sq_mmc(f, m, c, &a).unwrap(), gram_form(&nf, b, &a));
                }
            }
        }
    }
}

#[test]
fn mm_coincides_with_mmc() {
    for (p, n) in RAMIFIED {
        let f = NumberField::new(p, n).unwrap().spec;
        for m in 1..=30u64 {
            let mm = build_mm_ramified(&f, m).unwrap();
            let other = if m % p == 0 {
                build_mmc(&f, m / p, 0).unwrap()
            } else {
                build_mmc(&f, m, 0).unwrap()
            };
            assert!(mm.same_span(&other), "({p},{n}) m={m}");
        }
    }
}

#[test]
fn orbit_module_has_index_p_in_mm() {
    for (p, n) in RAMIFIED {
        let f = NumberField::new(p, n).unwrap().spec;
        for m in (1..=20u64).filter(|m| m % p != 0) {
            let o = build_orbit_m(&f, m).unwrap();
            let mm = build_mm_ramified(&f, m).unwrap();
            for r in o.rows() {
                assert!(membership(&r, &mm).unwrap());
            }
            assert_eq!(o.index(), mm.index() * BigInt::from(p));
            let mi = Element::integer(&f, m as i64);
            assert!(membership(&mi, &mm).unwrap());
            assert!(!membership(&mi, &o).unwrap());
        }
    }
}

#[test]
fn computed_indices() {
    for (p, n) in RAMIFIED {
        let f = NumberField::new(p, n).unwrap().spec;
        for m in 1..=30u64 {
            let b = build_mm_ramified(&f, m).unwrap();
            let want = if m % p == 0 { m / p } else { m };
            assert_eq!(b.index(), BigInt::from(want));
            for c in 0..m.min(3) {
                let mc = build_mmc(&f, m, c).unwrap();
                assert_eq!(mc.index(), BigInt::from(m));
                assert_eq!(mc.quotient_structure().iter().product::<BigInt>(), BigInt::from(m));
            }
        }
    }
    for (p, n) in UNRAMIFIED {
        let f = NumberField::new(p, n).unwrap().spec;
        for m in 1..=30u64 {
            assert_eq!(build_mm_unramified(&f, m).unwrap().index(), BigInt::from(m));
        }
    }
}

#[test]
fn prime_ideals() {
    for (p, n) in [(3, 7), (3, 13), (3, 91), (5, 11), (5, 31)] {
        let nf = NumberField::new(p, n).unwrap();
        for j in 1..=nf.spec.s {
            let b = build_bj_unramified(&nf.spec, j).unwrap();
            assert_eq!(b.index(), BigInt::from(nf.spec.primes[j - 1]));
            assert!(ideal_test(&nf, &b).unwrap());
        }
    }
    for (p, n) in RAMIFIED {
        let nf = NumberField::new(p, n).unwrap();
        let ell = find_ell(&nf).unwrap();
        assert!(ell < p);
        let b = build_b_ramified(&nf).unwrap();
        assert_eq!(b.index(), BigInt::from(p));
        // t ≡ ℓ modulo the prime above p
        let t_minus_ell = Element::t(&nf.spec).sub(&Element::integer(&nf.spec, ell as i64)).unwrap();
        assert!(membership(&t_minus_ell, &b).unwrap());
        // p O_K ⊂ B and B^p ⊂ p O_K: p-th power of any element of B has coordinates divisible by p
        let mut x = b.row(1);
        let y = x.clone();
        for _ in 1..p {
            x = nf.multiply(&x, &y).unwrap();
        }
        assert!(x.coords.iter().all(|c| c % p as i64 == 0));
    }
}

#[test]
fn relative_norm_generates_the_ramified_prime() {
    for (p, n) in [(3, 9), (5, 25), (7, 49)] {
        let nf = NumberField::new(p, n).unwrap();
        let lam = lambda_generator(&nf).unwrap();
        assert!((lam.norm.abs() - p as f64).abs() < 1e-6);
        let b = build_b_ramified(&nf).unwrap();
        assert!(membership(&lam.element, &b).unwrap());
        // B = λ O_K: the multiples λ·b_k span B
        let multiples: Vec<Vec<i64>> = (0..p as usize)
            .map(|k| nf.multiply(&lam.element, &Element::basis(&nf.spec, k)).unwrap().coords)
            .collect();
        let span = ModuleBasis::custom(&nf.spec, multiples).unwrap();
        assert!(span.same_span(&b));
    }
}

#[test]
fn product_engine_is_associative_and_commutative() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (p, n) in [(3, 9), (5, 25), (3, 7), (3, 63)] {
        let nf = NumberField::new(p, n).unwrap();
        for _ in 0..20 {
            let mut el = || nf.element((0..p).map(|_| rng.gen_range(-3..=3)).collect()).unwrap();
            let (x, y, z) = (el(), el(), el());
            let xy = nf.multiply(&x, &y).unwrap();
            assert_eq!(xy, nf.multiply(&y, &x).unwrap());
            assert_eq!(
                nf.multiply(&xy, &z).unwrap(),
                nf.multiply(&x, &nf.multiply(&y, &z).unwrap()).unwrap()
            );
            assert_eq!(nf.trace(&xy).unwrap(), nf.trace_form(&x, &y).unwrap());
        }
    }
}

#[test]
fn unramified_ideal_criterion() {
    for (p, n) in UNRAMIFIED {
        let nf = NumberField::new(p, n).unwrap();
        for m in 1..=30u64 {
            let b = build_mm_unramified(&nf.spec, m).unwrap();
            assert_eq!(ideal_test(&nf, &b).unwrap(), n % m == 0, "({p},{n}) m={m}");
        }
    }
}

#[test]
fn ramified_ideals_are_exactly_divisors_of_n_over_p() {
    for (p, n) in RAMIFIED {
        let nf = NumberField::new(p, n).unwrap();
        for m in 1..=60u64 {
            let b = build_mm_ramified(&nf.spec, m).unwrap();
            assert_eq!(ideal_test(&nf, &b).unwrap(), (n / p) % m == 0, "({p},{n}) m={m}");
        }
    }
}

#[test]
fn density_identity_and_agreement() {
    for (p, n) in RAMIFIED {
        let nf = NumberField::new(p, n).unwrap();
        for b in ramified_families(&nf) {
            let g = gram(&nf.traces, &b).unwrap();
            let t = enumerate_minimum(&g).unwrap().minimum;
            let d = center_density(&b, &g, t);
            assert!(d.identity_holds(p as usize));
            if let Some(div) = d.specialized_divisor {
                if BigInt::from(div) == d.index {
                    assert!(!d.discrepancy_flag, "({p},{n}) {} {:?}", b.family, b.params);
                } else {
                    assert!(d.discrepancy_flag);
                }
            }
        }
    }
}

#[test]
fn quotient_structure_of_congruence_modules_is_cyclic() {
    let f = NumberField::new(3, 9).unwrap().spec;
    for m in 2..=12u64 {
        for c in 0..m {
            let q = build_mmc(&f, m, c).unwrap().quotient_structure();
            assert_eq!(q, vec![BigInt::from(m)]);
        }
    }
}
