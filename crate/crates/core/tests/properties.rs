mod common;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use tropical_ceresa::ceresa::{
    compute_w, image_lattice, is_class_trivial_graph, pushforward_contract, pushforward_subdivide,
    replay_graph_witness, specialize, CZClass, CeresaCocycle, GraphTestMode,
};
use tropical_ceresa::extalg::{
    alpha_alpha_beta, alpha_beta_beta, delta_ell_h, delta_g_h, delta_minus_i_sum_check,
    delta_q_minus_i_h, delta_q_minus_i_l, image1_coeffs, image2_coeffs, psi_g, wedge_with_omega,
    HElement, LElement, WedgeTriple,
};
use tropical_ceresa::graph::io::{parse_graph, to_json, to_text};
use tropical_ceresa::graph::{build_cycle_context, TropicalCurve};
use tropical_ceresa::intlin::{lattice_membership, smith_invariants, Matrix};
use tropical_ceresa::{EdgeId, IntPolynomial};

fn f3_element(c: &BTreeMap<(usize, usize, usize), IntPolynomial>) -> LElement<IntPolynomial> {
    let mut x = LElement::zero();
    for (&(r, s, t), p) in c {
        x.add_term(WedgeTriple::betas(r, s, t), p.clone());
    }
    x
}

fn substitute_all(
    c: &BTreeMap<(usize, usize, usize), IntPolynomial>,
    f: EdgeId,
    by: &IntPolynomial,
) -> BTreeMap<(usize, usize, usize), IntPolynomial> {
    c.iter()
        .map(|(k, p)| (*k, p.substitute(f, by)))
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn image1_matches_direct_application(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let b = random_b(&mut rng, &graph, genus);
        let direct = delta_q_minus_i_l(ctx.q(), &alpha_beta_beta(&b));
        prop_assert!(direct.in_filtration(3));
        prop_assert_eq!(f3_element(&image1_coeffs(ctx.q(), &b).unwrap()), direct);
    }

    #[test]
    fn image2_matches_direct_application_and_is_even(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let a = random_a(&mut rng, genus);
        let x = alpha_alpha_beta(&a);
        let direct = delta_q_minus_i_l(ctx.q(), &delta_q_minus_i_l(ctx.q(), &x));
        prop_assert!(direct.in_filtration(3));
        let closed = image2_coeffs(ctx.q(), &a).unwrap();
        prop_assert_eq!(f3_element(&closed), direct);
        let two = BigInt::from(2);
        for p in closed.values() {
            prop_assert!(p.terms().all(|(_, c)| (c % &two).is_zero()));
        }
    }

    #[test]
    fn delta_is_unipotent_on_h(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let h = random_h(&mut rng, &graph, genus);
        let once = delta_q_minus_i_h(ctx.q(), &h);
        prop_assert!(once.in_y());
        prop_assert!(delta_q_minus_i_h(ctx.q(), &once).is_zero());
        for e in graph.edge_ids() {
            let step = delta_ell_h(&ctx, e, &h).sub(&h);
            prop_assert!(step.in_y());
            prop_assert!(delta_ell_h(&ctx, e, &step).sub(&step).is_zero());
        }
    }

    #[test]
    fn product_of_twists_minus_identity_is_a_sum(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let h = random_h(&mut rng, &graph, genus);
        let exponents: BTreeMap<EdgeId, i64> =
            graph.edge_ids().map(|e| (e, rng.gen_range(-3..=3))).collect();
        prop_assert!(delta_minus_i_sum_check(&ctx, &exponents, &h).is_zero());
        let mut sum = HElement::zero(genus);
        for e in graph.edge_ids() {
            sum = sum.add(&delta_ell_h(&ctx, e, &h).sub(&h));
        }
        prop_assert_eq!(delta_g_h(&ctx, &h).sub(&h), sum);
    }

    #[test]
    fn delta_minus_identity_raises_filtration(seed: u64, genus in 3usize..=5, level in 0usize..=3) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let x = random_l(&mut rng, &graph, genus, level);
        prop_assert!(x.in_filtration(level));
        let image = delta_q_minus_i_l(ctx.q(), &x);
        prop_assert!(image.in_filtration(level + 1));
        if level == 3 {
            prop_assert!(image.is_zero());
        }
    }

    #[test]
    fn wedges_with_omega_are_killed(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let x = wedge_with_omega(&random_h(&mut rng, &graph, genus));
        prop_assert!(delta_q_minus_i_l(ctx.q(), &delta_q_minus_i_l(ctx.q(), &x)).is_zero());
        prop_assert!(psi_g(&ctx, &x).is_zero());
    }

    #[test]
    fn contraction_commutes_with_delta(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        prop_assume!(!ctx.tree_edges().is_empty());
        let f = *ctx.tree_edges().choose(&mut rng).unwrap();
        let zero = IntPolynomial::zero();
        let contracted = ctx.contract_tree_edge(f).unwrap();
        prop_assert_eq!(contracted.q(), &ctx.q().map(|p| p.substitute(f, &zero)));
        let v = CeresaCocycle::new(ctx.clone(), random_b(&mut rng, &graph, genus)).unwrap();
        let pushed = pushforward_contract(&v, f).unwrap();
        prop_assert_eq!(compute_w(&pushed).c().clone(), substitute_all(compute_w(&v).c(), f, &zero));
    }

    #[test]
    fn subdivision_commutes_with_delta(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let ids: Vec<EdgeId> = graph.edge_ids().collect();
        let f = *ids.choose(&mut rng).unwrap();
        let (sub, fresh) = ctx.subdivide(f).unwrap();
        let halves = IntPolynomial::var(f) + IntPolynomial::var(fresh);
        prop_assert_eq!(sub.q(), &ctx.q().map(|p| p.substitute(f, &halves)));
        let v = CeresaCocycle::new(ctx.clone(), random_b(&mut rng, &graph, genus)).unwrap();
        let (pushed, fresh2) = pushforward_subdivide(&v, f).unwrap();
        prop_assert_eq!(fresh, fresh2);
        prop_assert_eq!(compute_w(&pushed).c().clone(), substitute_all(compute_w(&v).c(), f, &halves));
        let back = pushforward_contract(&pushed, fresh).unwrap();
        prop_assert_eq!(back.b(), v.b());
    }

    #[test]
    fn round_trips(seed: u64, genus in 3usize..=5) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let lengths = random_lengths(&mut rng, &graph);
        for text in [to_text(&graph, Some(&lengths)), to_json(&graph, Some(&lengths))] {
            let parsed = parse_graph(&text).unwrap();
            prop_assert_eq!(&parsed.graph, &graph);
            prop_assert_eq!(parsed.lengths.as_ref(), Some(&lengths));
        }
        let ctx = build_cycle_context(&graph, None).unwrap();
        for p in ctx.q().rows().flatten() {
            prop_assert_eq!(&p.to_string().parse::<IntPolynomial>().unwrap(), p);
        }
        let x = random_l(&mut rng, &graph, genus, 0);
        prop_assert_eq!(x.to_string().parse::<LElement<IntPolynomial>>().unwrap(), x);
        let v = CeresaCocycle::new(ctx, random_b(&mut rng, &graph, genus)).unwrap();
        let json = serde_json::to_string(&v.to_json_value()).unwrap();
        prop_assert_eq!(CeresaCocycle::from_json(&json).unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn images_are_trivial_and_specialize_into_the_lattice(seed: u64, genus in 3usize..=4) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let a = random_a(&mut rng, genus);
        let w = CZClass::new(ctx.clone(), image2_coeffs(ctx.q(), &a).unwrap()).unwrap();
        let verdict = is_class_trivial_graph(&w, GraphTestMode::Image2).unwrap();
        prop_assert!(verdict.trivial);
        prop_assert!(replay_graph_witness(&w, &verdict, GraphTestMode::Image2));

        let curve = TropicalCurve::new(graph.clone(), random_lengths(&mut rng, &graph)).unwrap();
        let lattice = image_lattice(&ctx, &curve).unwrap();
        let target: Vec<BigInt> = {
            let special = specialize(&w, &curve).unwrap();
            lattice.coordinates.iter().map(|k| special.get(k).cloned().unwrap_or_default()).collect()
        };
        prop_assert!(lattice_membership(&lattice.generators, &target).unwrap().member);
    }

    #[test]
    fn lattice_invariants_do_not_depend_on_the_tree(seed: u64, genus in 3usize..=4) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, genus);
        let curve = TropicalCurve::new(graph.clone(), random_lengths(&mut rng, &graph)).unwrap();
        let invariants = |tree: Vec<EdgeId>| {
            let ctx = build_cycle_context(&graph, Some(&tree)).unwrap();
            let lattice = image_lattice(&ctx, &curve).unwrap();
            let cols = lattice.coordinates.len();
            smith_invariants(&Matrix::from_rows(lattice.generators, cols).unwrap())
        };
        let first = invariants(random_tree(&mut rng, &graph));
        let second = invariants(random_tree(&mut rng, &graph));
        prop_assert_eq!(first, second);
    }

    #[test]
    fn psi_mode_accepts_images(seed: u64) {
        let mut rng = rng(seed);
        let graph = random_graph(&mut rng, 3);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let a = random_a(&mut rng, 3);
        let w = CZClass::new(ctx.clone(), image2_coeffs(ctx.q(), &a).unwrap()).unwrap();
        let verdict = is_class_trivial_graph(&w, GraphTestMode::Psi).unwrap();
        prop_assert!(verdict.trivial);
        prop_assert!(replay_graph_witness(&w, &verdict, GraphTestMode::Psi));
    }
}
