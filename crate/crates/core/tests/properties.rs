mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use groupweyl::cli::grammar::parse_operator;
use groupweyl::fourier::{forward_ft, inverse_on_rule, plancherel_norm};
use groupweyl::quantize::{extract_symbol, reduce_order, symbol_of, OperatorSpec};
use groupweyl::weyl::{corollary_sequence, counting_function, partial_trace, weyl_scan};
use groupweyl::{CMatrix, Group, GroupKind};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{max_abs_diff, random_ast, random_band_limited, rule};

fn op(text: &str, order: f64) -> OperatorSpec {
    parse_operator(text).unwrap().to_spec(order)
}

fn groups() -> [Group; 3] {
    [Group::t1(), Group::t2(), Group::su2()]
}

fn group_strategy() -> impl Strategy<Value = Group> {
    prop_oneof![Just(Group::t1()), Just(Group::t2()), Just(Group::su2())]
}

fn coords_strategy(g: Group) -> BoxedStrategy<Vec<f64>> {
    match g.kind() {
        GroupKind::Su2 => (0.0..2.0 * PI, 0.0..PI, 0.0..4.0 * PI).prop_map(|(a, b, c)| vec![a, b, c]).boxed(),
        k => proptest::collection::vec(0.0..2.0 * PI, k.dim()).boxed(),
    }
}

fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn irreps_are_unitary_at_every_node() {
    for g in groups() {
        let r = rule(g, 4);
        for l in g.dual_enumerate(4.0) {
            let id = CMatrix::identity(l.dim(), l.dim());
            for n in 0..r.len() {
                let m = r.irrep_at_node(&l, n).unwrap();
                assert!(max_entry(&(&m * m.adjoint() - &id)) <= 1e-12, "{l} at node {n}");
            }
        }
    }
}

#[test]
fn weights_are_a_probability() {
    for g in groups() {
        for b in [1, 4, 9] {
            let r = rule(g, b);
            assert_abs_diff_eq!(r.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn schur_orthogonality() {
    for g in groups() {
        let r = rule(g, 4);
        let labels = g.dual_enumerate(2.0);
        let tables: Vec<Vec<CMatrix>> = labels
            .iter()
            .map(|l| (0..r.len()).map(|n| r.irrep_at_node(l, n).unwrap()).collect())
            .collect();
        for (a, la) in labels.iter().enumerate() {
            for (b, lb) in labels.iter().enumerate() {
                for (i, j, k, l) in index_quads(la.dim(), lb.dim()) {
                    let values: Vec<Complex64> =
                        (0..r.len()).map(|n| tables[a][n][(i, j)] * tables[b][n][(k, l)].conj()).collect();
                    let want = if a == b && i == k && j == l { 1.0 / la.dim() as f64 } else { 0.0 };
                    let got = r.integrate_complex(&values);
                    assert!((got - want).norm() <= 1e-10, "{la}({i},{j}) against {lb}({k},{l}): {got}");
                }
            }
        }
    }
}

fn index_quads(da: usize, db: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..da).flat_map(move |i| {
        (0..da).flat_map(move |j| (0..db).flat_map(move |k| (0..db).map(move |l| (i, j, k, l))))
    })
}

#[test]
fn spectral_symbols_do_not_depend_on_x() {
    for g in groups() {
        let r = rule(g, 6);
        let spec = op("spec(t^2/(1+t^2))", 0.0);
        let labels = g.dual_enumerate(3.0);
        let sigma = symbol_of(&spec, &labels, &r).unwrap();
        for l in &labels {
            let first = sigma.matrix(0, l).unwrap();
            for n in 1..r.len() {
                assert_eq!(sigma.matrix(n, l).unwrap(), first);
            }
            let a = extract_symbol(&spec, l, &r.nodes()[1], &r).unwrap();
            let b = extract_symbol(&spec, l, &r.nodes()[r.len() - 1], &r).unwrap();
            assert!(max_entry(&(a - b)) <= 1e-12);
        }
    }
}

#[test]
fn conjugated_symbol_keeps_its_trace() {
    for g in groups() {
        let r = rule(g, 6);
        let labels = g.dual_enumerate(3.0);
        for text in ["sym((1+cos(x1))*t, P)", "prod(spec(1/(1+t^2)), mult(cos(x1)))"] {
            let sigma = symbol_of(&op(text, 1.0), &labels, &r).unwrap();
            for l in &labels {
                for n in 0..r.len() {
                    let s = sigma.matrix(n, l).unwrap();
                    let x = r.irrep_at_node(l, n).unwrap();
                    let conj = &x * &s * x.adjoint();
                    assert!((conj.trace() - s.trace()).norm() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn extracted_symbol_matches_closed_form() {
    for g in groups() {
        let r = rule(g, 8);
        let spec = op("prod(mult(1+cos(x1)), spec(t^2/(1+t^2)))", 0.0);
        let labels = g.dual_enumerate(3.0);
        let sigma = symbol_of(&spec, &labels, &r).unwrap();
        for l in &labels {
            for n in (0..r.len()).step_by(97) {
                let e = extract_symbol(&spec, l, &r.nodes()[n], &r).unwrap();
                assert!(max_entry(&(e - sigma.matrix(n, l).unwrap())) <= 1e-9);
            }
        }
    }
}

#[test]
fn order_reduction_undoes_the_order() {
    for g in groups() {
        let r = rule(g, 4);
        let labels = g.dual_enumerate(3.0);
        let m = 1.5;
        let sigma = symbol_of(&op("sym((2+sin(x1))*t^(3/2), I)", m), &labels, &r).unwrap();
        let reduced = reduce_order(&sigma).unwrap();
        for l in &labels {
            let scale = g.modulus(l).powf(m);
            for n in 0..r.len() {
                let back = reduced.matrix(n, l).unwrap() * Complex64::new(scale, 0.0);
                if l.is_trivial() {
                    assert_eq!(max_entry(&reduced.matrix(n, l).unwrap()), 0.0);
                } else {
                    assert!(max_entry(&(back - sigma.matrix(n, l).unwrap())) <= 1e-12);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homomorphism((g, x, y) in group_strategy().prop_flat_map(|g| (Just(g), coords_strategy(g), coords_strategy(g)))) {
        let x = g.element(&x).unwrap();
        let y = g.element(&y).unwrap();
        let xy = g.multiply(&x, &y).unwrap();
        for l in g.dual_enumerate(3.0) {
            let lhs = g.irrep_matrix(&l, &xy).unwrap();
            let rhs = g.irrep_matrix(&l, &x).unwrap() * g.irrep_matrix(&l, &y).unwrap();
            prop_assert!(max_entry(&(lhs - rhs)) <= 1e-10, "{}", l);
        }
    }

    #[test]
    fn enumeration_is_monotone(g in group_strategy(), a in 0.0..12.0f64, b in 0.0..12.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = g.dual_enumerate(lo);
        let large = g.dual_enumerate(hi);
        prop_assert_eq!(&large[..small.len()], &small[..]);
        prop_assert!(large.iter().all(|l| g.eigenvalue(l) <= hi * hi + 1e-9));
    }

    #[test]
    fn plancherel_and_inversion(g in group_strategy(), seed in any::<u64>(), band in 0.0..5.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rule(g, 5);
        let (c, f) = random_band_limited(&mut rng, &r, band);
        let fc = forward_ft(&f, band).unwrap();
        prop_assert!((plancherel_norm(&fc) - f.l2_norm()).abs() <= 1e-10 * (1.0 + f.l2_norm()));
        for (l, m) in c.iter() {
            prop_assert!(max_entry(&(fc.get(l).unwrap() - m)) <= 1e-10);
        }
        let back = inverse_on_rule(&fc, &r).unwrap();
        prop_assert!(max_abs_diff(back.values(), f.values()) <= 1e-10);
    }

    #[test]
    fn transforms_are_linear(g in group_strategy(), seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = rule(g, 4);
        let (_, f) = random_band_limited(&mut rng, &r, 4.0);
        let (_, h) = random_band_limited(&mut rng, &r, 4.0);
        let (ca, cb) = (Complex64::new(a, 0.5), Complex64::new(-0.25, b));
        let combo = f.scale(ca).add(&h.scale(cb)).unwrap();
        let (ff, fh, fcombo) = (forward_ft(&f, 4.0).unwrap(), forward_ft(&h, 4.0).unwrap(), forward_ft(&combo, 4.0).unwrap());
        for (l, m) in fcombo.iter() {
            let want = ff.get(l).unwrap() * ca + fh.get(l).unwrap() * cb;
            prop_assert!(max_entry(&(m - want)) <= 1e-10);
        }
        let back = inverse_on_rule(&fcombo, &r).unwrap();
        prop_assert!(max_abs_diff(back.values(), combo.values()) <= 1e-10);
    }

    #[test]
    fn identity_trace_counts_eigenvalues(g in group_strategy(), lambda in 0.0..40.0f64) {
        let r = rule(g, 1);
        let t = partial_trace(&OperatorSpec::identity(), lambda, &r).unwrap();
        prop_assert_eq!(t.re, counting_function(&g, lambda) as f64);
        prop_assert_eq!(t.im, 0.0);
    }

    #[test]
    fn shifting_by_the_identity_shifts_averages(g in group_strategy(), c in -5.0..5.0f64) {
        let r = rule(g, 8);
        let base = op("prod(mult(1+cos(x1)), spec(1/(1+t^2)))", 0.0);
        let shifted = OperatorSpec::Sum(vec![base.clone(), OperatorSpec::scale(Complex64::new(c, 0.0), OperatorSpec::identity())]);
        let grid = [1.0, 2.5, 4.0, 7.0];
        let a = weyl_scan(&base, &grid, None, &r).unwrap();
        let b = weyl_scan(&shifted, &grid, None, &r).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y.avg - x.avg - c).abs() <= 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn scaling_is_equivariant(g in group_strategy(), c in -5.0..5.0f64) {
        let r = rule(g, 8);
        let base = op("sum(mult(cos(x1)^2), spec(t^2/(1+t^2)))", 0.0);
        let scaled = OperatorSpec::scale(Complex64::new(c, 0.0), base.clone());
        let grid = [1.0, 3.0, 6.0];
        let a = weyl_scan(&base, &grid, None, &r).unwrap();
        let b = weyl_scan(&scaled, &grid, None, &r).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y.t - c * x.t).abs() <= 1e-12 * (1.0 + x.t.abs()));
            prop_assert!((y.avg - c * x.avg).abs() <= 1e-12 * (1.0 + x.avg.abs()));
        }
        let sa = corollary_sequence(&base, 4.0, &r).unwrap();
        let sb = corollary_sequence(&scaled, 4.0, &r).unwrap();
        for (x, y) in sa.iter().zip(&sb) {
            prop_assert!((y.a_n - c * x.a_n).abs() <= 1e-12 * (1.0 + x.a_n.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printer_and_parser_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ast = random_ast(&mut rng, 3);
        let text = ast.to_string();
        let parsed = parse_operator(&text);
        prop_assert_eq!(parsed.as_ref(), Ok(&ast), "{}", text);
    }

    #[test]
    fn parser_never_panics(s in "\\PC{0,60}") {
        if let Err(e) = parse_operator(&s) {
            prop_assert!(e.offset() <= s.len());
        }
    }

    #[test]
    fn parser_reports_offsets_on_near_misses(s in "(mult|spec|sym|sum|prod|scale)\\([x1-3t0-9+*/^(),. -]{0,30}") {
        if let Err(e) = parse_operator(&s) {
            prop_assert!(e.offset() <= s.len());
        }
    }
}
