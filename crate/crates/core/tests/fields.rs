use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrlat_core::arith::{gcd, mod_pow};
use wrlat_core::field::{trace_table, Provenance};
use wrlat_core::periods::{embedding_matrix, enumerate_characters, gaussian_periods};
use wrlat_core::{intmat, validate_field, Element, Error, NumberField, Precision};

const RAMIFIED: [(u64, u64); 5] = [(3, 9), (3, 63), (5, 25), (5, 275), (7, 49)];
const UNRAMIFIED: [(u64, u64); 6] = [(3, 7), (3, 13), (3, 31), (5, 11), (3, 91), (7, 29)];

/// Periods computed straight from the definition, for the cyclic cases where
/// the subgroup is simply the p-th powers.
fn naive_periods(p: u64, n: u64) -> Vec<f64> {
    let units: Vec<u64> = (1..n).filter(|&x| gcd(x, n) == 1).collect();
    let mut h: Vec<u64> = units.iter().map(|&x| mod_pow(x, p, n)).collect();
    h.sort_unstable();
    h.dedup();
    assert_eq!(h.len() as u64 * p, units.len() as u64);
    let g = *units.iter().find(|x| h.binary_search(x).is_err()).unwrap();
    (0..p)
        .map(|i| {
            let gi = mod_pow(g, i, n);
            h.iter()
                .map(|&x| (std::f64::consts::TAU * ((gi * x) % n) as f64 / n as f64).cos())
                .sum()
        })
        .collect()
}

fn naive_gram(p: u64, n: u64, ramified: bool) -> Vec<Vec<f64>> {
    let eta = naive_periods(p, n);
    let p = p as usize;
    let row = |i: usize| -> Vec<f64> {
        if ramified && i == 0 {
            vec![1.0; p]
        } else {
            (0..p).map(|j| eta[(i + j) % p]).collect()
        }
    };
    (0..p)
        .map(|i| {
            (0..p)
                .map(|j| row(i).iter().zip(row(j)).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}

#[test]
fn validation_shapes() {
    let f = validate_field(3, 9).unwrap();
    assert!(f.ramified && f.s == 0 && f.u == Some(1));
    let f = validate_field(3, 7).unwrap();
    assert!(!f.ramified && f.s == 1);
    let f = validate_field(5, 275).unwrap();
    assert_eq!((f.u, f.primes.clone()), (Some(11), vec![11]));
    assert!(matches!(validate_field(3, 27), Err(Error::BadConductor { .. })));
    assert!(matches!(validate_field(3, 12), Err(Error::BadConductor { .. })));
    assert!(matches!(validate_field(3, 49), Err(Error::BadConductor { .. })));
    assert!(matches!(validate_field(9, 19), Err(Error::NotPrime(9))));
    assert!(matches!(validate_field(2, 5), Err(Error::EvenOrTwo(2))));
    assert!(matches!(validate_field(3, 3), Err(Error::BadConductor { .. })));
}

#[test]
fn cyclic_cases_match_definition() {
    for (p, n) in [(3, 9), (5, 25), (7, 49), (3, 7), (3, 13), (5, 11), (7, 29)] {
        let field = validate_field(p, n).unwrap();
        let choices = enumerate_characters(&field);
        assert_eq!(choices.len(), 1, "({p},{n})");
        let lib = gaussian_periods(&choices[0], Precision::DOUBLE).unwrap();
        let naive = naive_periods(p, n);
        for (a, b) in lib.iter().zip(&naive) {
            assert!((a - b).abs() < 1e-12, "({p},{n}): {a} vs {b}");
        }
    }
}

#[test]
fn exact_gram_matches_naive_numeric_gram() {
    for (p, n) in [(3, 9), (5, 25), (7, 49), (3, 7), (3, 13), (5, 11), (7, 29)] {
        let field = validate_field(p, n).unwrap();
        let exact = trace_table(&field, Precision::DOUBLE).unwrap().basis_gram(&field);
        let naive = naive_gram(p, n, field.ramified);
        for i in 0..p as usize {
            for j in 0..p as usize {
                assert!(
                    (exact[i][j] as f64 - naive[i][j]).abs() < 1e-9,
                    "({p},{n}) [{i}][{j}]"
                );
            }
        }
    }
}

#[test]
fn ramified_closed_forms() {
    for (p, n) in RAMIFIED {
        let field = validate_field(p, n).unwrap();
        let t = trace_table(&field, Precision::DOUBLE).unwrap();
        let (pi, ni) = (p as i64, n as i64);
        assert_eq!(t.tr_one.value, pi);
        assert_eq!(t.tr_theta.value, 0);
        assert_eq!(t.tr_pair_diag.value, ni * (pi - 1) / pi);
        assert_eq!(t.tr_pair_off.value, -ni / pi);
        assert_eq!(t.tr_pair_diag.provenance, Provenance::ClosedForm);
    }
    let t = trace_table(&validate_field(5, 25).unwrap(), Precision::DOUBLE).unwrap();
    assert_eq!((t.tr_pair_diag.value, t.tr_pair_off.value), (20, -5));
}

#[test]
fn unramified_traces_are_derived_and_consistent() {
    for (p, n) in UNRAMIFIED {
        let field = validate_field(p, n).unwrap();
        let t = trace_table(&field, Precision::DOUBLE).unwrap();
        assert_eq!(t.tr_theta.value, field.sign());
        assert_eq!(t.tr_pair_diag.provenance, Provenance::DerivedNumeric);
        // eigenvalues of a circulant a I + b (J - I): a - b (p-1 times), a + (p-1) b
        let (d, o) = (t.tr_pair_diag.value, t.tr_pair_off.value);
        assert_eq!(d - o, n as i64, "({p},{n})");
        assert_eq!(d + (p as i64 - 1) * o, 1, "({p},{n})");
    }
    let t = trace_table(&validate_field(3, 7).unwrap(), Precision::DOUBLE).unwrap();
    assert_eq!((t.tr_pair_diag.value, t.tr_pair_off.value), (5, -2));
    let t = trace_table(&validate_field(3, 13).unwrap(), Precision::DOUBLE).unwrap();
    assert_eq!(intmat::det_i64(&t.basis_gram(&validate_field(3, 13).unwrap())), 169.into());
}

#[test]
fn discriminant_and_positivity() {
    for (p, n) in RAMIFIED.iter().chain(UNRAMIFIED.iter()) {
        let nf = NumberField::new(*p, *n).unwrap();
        let g = nf.basis_gram();
        assert!(intmat::is_positive_definite(&g));
        assert_eq!(intmat::det_i64(&g), nf.spec.discriminant(), "({p},{n})");
        let e = &nf.embedding;
        let d2 = e.determinant().powi(2);
        let disc = (*n as f64).powi(*p as i32 - 1);
        assert!((d2 - disc).abs() < 1e-6 * disc);
    }
}

#[test]
fn every_character_choice_gives_the_same_gram() {
    for (p, n) in [(3, 63), (5, 275), (3, 91)] {
        let field = validate_field(p, n).unwrap();
        let exact = trace_table(&field, Precision::DOUBLE).unwrap().basis_gram(&field);
        let choices = enumerate_characters(&field);
        assert!(choices.len() > 1);
        for c in &choices {
            let g = embedding_matrix(c, Precision::DOUBLE).unwrap().numeric_gram();
            for i in 0..p as usize {
                for j in 0..p as usize {
                    assert!((exact[i][j] as f64 - g[i][j]).abs() < 1e-6 * n as f64);
                }
            }
        }
    }
}

#[test]
fn bilinear_matches_embedding_inner_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, n) in RAMIFIED.iter().chain(UNRAMIFIED.iter()) {
        let nf = NumberField::new(*p, *n).unwrap();
        for _ in 0..100 {
            let x: Vec<i64> = (0..*p).map(|_| rng.gen_range(-9..=9)).collect();
            let y: Vec<i64> = (0..*p).map(|_| rng.gen_range(-9..=9)).collect();
            let (x, y) = (nf.element(x).unwrap(), nf.element(y).unwrap());
            let exact = nf.trace_form(&x, &y).unwrap();
            assert_eq!(exact, nf.trace_form(&y, &x).unwrap());
            let numeric: f64 = nf
                .conjugates(&x)
                .iter()
                .zip(nf.conjugates(&y))
                .map(|(a, b)| a * b)
                .sum();
            assert!((exact as f64 - numeric).abs() < 1e-6 * (*n as f64), "({p},{n})");
            if nf.spec.ramified {
                let one = Element::one(&nf.spec);
                assert_eq!(nf.trace(&x).unwrap(), nf.trace_form(&x, &one).unwrap());
            }
        }
    }
}

#[test]
fn trace_examples() {
    let nf = NumberField::new(3, 9).unwrap();
    assert_eq!(nf.trace(&Element::one(&nf.spec)).unwrap(), 3);
    assert_eq!(nf.trace(&Element::theta_t(&nf.spec, 1)).unwrap(), 0);
    let a = nf.element(vec![1, -1, 0]).unwrap();
    let b = nf.element(vec![1, 0, -1]).unwrap();
    assert_eq!(nf.trace_form(&a, &b).unwrap(), 0);
    assert_eq!(nf.trace_form(&a, &a).unwrap(), 9);
    assert_eq!(nf.trace_form(&Element::zero(&nf.spec), &a).unwrap(), 0);
    let nf = NumberField::new(3, 7).unwrap();
    assert_eq!(nf.trace(&nf.element(vec![1, 1, 1]).unwrap()).unwrap(), -3);
    let other = NumberField::new(3, 9).unwrap();
    assert!(matches!(
        nf.trace_form(&Element::t(&nf.spec), &Element::t(&other.spec)),
        Err(Error::FieldMismatch(..))
    ));
}

#[test]
fn ramified_periods_sum_to_zero() {
    for (p, n) in RAMIFIED {
        let field = validate_field(p, n).unwrap();
        for c in enumerate_characters(&field) {
            let eta = gaussian_periods(&c, Precision::DOUBLE).unwrap();
            assert!(eta.iter().sum::<f64>().abs() < 1e-9);
        }
    }
}

#[test]
fn theta_has_order_p_and_preserves_trace_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, n) in [(3, 9), (5, 25), (3, 7), (5, 11)] {
        let nf = NumberField::new(p, n).unwrap();
        for _ in 0..20 {
            let x = nf
                .element((0..p).map(|_| rng.gen_range(-5..=5)).collect())
                .unwrap();
            let y = x.theta(nf.spec.ramified);
            assert_eq!(nf.trace_form(&x, &x).unwrap(), nf.trace_form(&y, &y).unwrap());
            assert_eq!(x.theta_pow(nf.spec.ramified, p as usize), x);
            // θ acts on conjugates by a cyclic shift
            let (cx, cy) = (nf.conjugates(&x), nf.conjugates(&y));
            for j in 0..p as usize {
                assert!((cy[j] - cx[(j + 1) % p as usize]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn high_precision_mode_agrees() {
    let lo = NumberField::new(5, 275).unwrap();
    let hi = NumberField::with_options(5, 275, 0, Precision::new(160)).unwrap();
    assert_eq!(lo.traces, hi.traces);
    for (a, b) in lo.embedding.entries.iter().flatten().zip(hi.embedding.entries.iter().flatten()) {
        assert!((a - b).abs() < 1e-12);
    }
}
