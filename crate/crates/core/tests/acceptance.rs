//! Acceptance checks, one line per criterion. Runs without the test
//! harness so the report is always printed; exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;
use tropical_ceresa::ceresa::{
    classify, compute_w, image_lattice, is_cz_trivial_curve, is_cz_trivial_graph, pushforward_contract,
    pushforward_subdivide, v_tau_k4, v_tau_l3, Certificate, CeresaCocycle, GraphTestMode,
};
use tropical_ceresa::extalg::{
    alpha_alpha_beta, alpha_beta_beta, delta_ell_h, delta_g_h, delta_minus_i_sum_check,
    delta_q_minus_i_h, delta_q_minus_i_l, image1_coeffs, image2_coeffs, HElement, LElement, WedgeTriple,
};
use tropical_ceresa::graph::{
    build_cycle_context, enumerate_graphs, is_hyperelliptic_type, MultiGraph, TropicalCurve,
};
use tropical_ceresa::intlin::{hermite_normal_form, lattice_membership, Matrix};
use tropical_ceresa::{fixtures, EdgeId, IntPolynomial, PolyMatrix};

type Index3 = (usize, usize, usize);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn p(s: &str) -> IntPolynomial {
    s.parse().expect("literal polynomial")
}

fn poly_matrix(rows: &[&[&str]]) -> PolyMatrix {
    let n = rows.len();
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|s| p(s)).collect()).collect(), n).unwrap()
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn hnf_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    hermite_normal_form(&Matrix::from_rows(rows, cols).unwrap()).basis()
}

fn show(rows: &[Vec<BigInt>]) -> String {
    let inner: Vec<String> = rows
        .iter()
        .map(|r| format!("[{}]", r.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", inner.join(","))
}

fn q_fixtures() -> Outcome {
    let k4 = poly_matrix(&[
        &["x1 + x5 + x6", "-x6", "-x5"],
        &["-x6", "x2 + x4 + x6", "-x4"],
        &["-x5", "-x4", "x3 + x4 + x5"],
    ]);
    let l3 = poly_matrix(&[
        &["x1 + x6", "0", "x6", "x6"],
        &["0", "x2 + x5", "x5", "x5"],
        &["x6", "x5", "x3 + x5 + x6", "x5 + x6"],
        &["x6", "x5", "x5 + x6", "x4 + x5 + x6"],
    ]);
    let got_k4 = build_cycle_context(&fixtures::k4(), Some(&fixtures::K4_TREE)).unwrap();
    let got_l3 = build_cycle_context(&fixtures::l3(), Some(&fixtures::L3_TREE)).unwrap();
    let (a, b) = (got_k4.q() == &k4, got_l3.q() == &l3);
    outcome(a && b, format!("K4 {}, L3 {}", if a { "exact" } else { "differs" }, if b { "exact" } else { "differs" }))
}

fn cocycle_to_class() -> Outcome {
    let k4 = compute_w(&v_tau_k4());
    let l3 = compute_w(&v_tau_l3());
    let a = k4.c() == &BTreeMap::from([((1, 2, 3), p("-2*x2*x5"))]);
    let b = l3.c() == &BTreeMap::from([((1, 2, 3), p("-2*x5*x6")), ((1, 2, 4), p("-2*x5*x6"))]);
    outcome(a && b, format!("w(K4) = {}; w(L3) = {}", k4.as_l_element(), l3.as_l_element()))
}

fn k4_curves() -> Outcome {
    let v = v_tau_k4();
    let mut parts = Vec::new();
    let mut passed = true;
    for (lengths, expected_hnf, expected_trivial) in [([1u64; 6], 4i64, false), ([2, 1, 1, 1, 1, 1], 1, true)] {
        let curve = TropicalCurve::from_positional(fixtures::k4(), &lengths).unwrap();
        let lattice = image_lattice(v.context(), &curve).unwrap();
        let verdict = is_cz_trivial_curve(&curve, &v).unwrap();
        let hnf_ok = lattice.hnf == vec![ints(&[expected_hnf])];
        let verdict_ok = verdict.trivial == expected_trivial;
        passed &= hnf_ok && verdict_ok;
        parts.push(format!(
            "lengths {:?}: hnf {} (expected [[{expected_hnf}]]), verdict {} (expected {})",
            lengths,
            show(&lattice.hnf),
            if verdict.trivial { "trivial" } else { "not trivial" },
            if expected_trivial { "trivial" } else { "not trivial" },
        ));
    }
    outcome(passed, parts.join("; "))
}

fn l3_curve() -> Outcome {
    let v = v_tau_l3();
    let curve = TropicalCurve::all_ones(fixtures::l3());
    let lattice = image_lattice(v.context(), &curve).unwrap();
    let listed = vec![ints(&[2, 2, 0, 2]), ints(&[0, 4, 0, 0]), ints(&[0, 0, 2, 2]), ints(&[0, 0, 0, 4])];
    let expected = hnf_rows(listed, 4);
    let same = lattice.hnf == expected;
    let member = lattice_membership(&lattice.generators, &ints(&[-2, -2, 0, 0])).unwrap().member;
    let verdict = is_cz_trivial_curve(&curve, &v).unwrap();
    outcome(
        same && !member && !verdict.trivial,
        format!(
            "hnf {} vs listed {}; (-2,-2,0,0) {}; verdict {}",
            show(&lattice.hnf),
            show(&expected),
            if member { "member" } else { "not a member" },
            if verdict.trivial { "trivial" } else { "not trivial" }
        ),
    )
}

fn graph_level() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for (name, v) in [("K4", v_tau_k4()), ("L3", v_tau_l3())] {
        let verdict = is_cz_trivial_graph(v.context().graph(), &v, GraphTestMode::Image2).unwrap();
        let infeasible = matches!(verdict.certificate, Certificate::Infeasible);
        passed &= !verdict.trivial && infeasible;
        parts.push(format!("{name} {}", if infeasible { "infeasible" } else { "feasible" }));
    }
    outcome(passed, parts.join(", "))
}

fn single_step_minors(graph: &MultiGraph) -> Vec<MultiGraph> {
    let mut out = Vec::new();
    for e in graph.edges() {
        if !e.is_loop() {
            out.extend(graph.contract_edge(e.id).ok());
        }
        if !graph.is_bridge(e.id) {
            out.extend(graph.delete_edge(e.id).ok());
        }
    }
    out
}

fn classifier_and_minors() -> Outcome {
    let graphs = enumerate_graphs(8, 2..=8);
    let mut violations = 0;
    let mut not_trivial = 0;
    for g in &graphs {
        let verdict = classify(g).unwrap();
        if verdict.trivial != is_hyperelliptic_type(g) {
            violations += 1;
        }
        if let Certificate::Minor { pattern, witness } = &verdict.certificate {
            not_trivial += 1;
            let replayed = witness.replay(g).ok();
            if !witness.verify(g) || replayed.is_none() || witness.pattern != *pattern {
                violations += 1;
            }
        }
    }
    let mut rng = rng(0x6d696e6f72);
    let hyperelliptic: Vec<&MultiGraph> = graphs.iter().filter(|g| is_hyperelliptic_type(g)).collect();
    let mut spot_checks = 0;
    while spot_checks < 500 {
        let g = hyperelliptic.choose(&mut rng).unwrap();
        let minors = single_step_minors(g);
        let Some(m) = minors.choose(&mut rng) else { continue };
        spot_checks += 1;
        if !is_hyperelliptic_type(m) {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} stable graphs ({not_trivial} with a replayed minor witness), {spot_checks} single-step minors; {violations} violations",
            graphs.len()
        ),
    )
}

fn f3_element(c: &BTreeMap<Index3, IntPolynomial>) -> LElement<IntPolynomial> {
    let mut x = LElement::zero();
    for (&(r, s, t), q) in c {
        x.add_term(WedgeTriple::betas(r, s, t), q.clone());
    }
    x
}

fn substitute_all(c: &BTreeMap<Index3, IntPolynomial>, f: EdgeId, by: &IntPolynomial) -> BTreeMap<Index3, IntPolynomial> {
    c.iter()
        .map(|(k, q)| (*k, q.substitute(f, by)))
        .filter(|(_, q)| !q.is_zero())
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng(0x6f7261636c65);
    let mut violations: BTreeMap<&str, usize> = BTreeMap::new();
    let mut flag = |name: &'static str, ok: bool| {
        if !ok {
            *violations.entry(name).or_default() += 1;
        }
    };
    for _ in 0..200 {
        let genus = rng.gen_range(3..=5);
        let graph = random_graph(&mut rng, genus);
        let ctx = build_cycle_context(&graph, None).unwrap();
        let q = ctx.q();

        let b = random_b(&mut rng, &graph, genus);
        flag("image1", f3_element(&image1_coeffs(q, &b).unwrap()) == delta_q_minus_i_l(q, &alpha_beta_beta(&b)));
        let a = random_a(&mut rng, genus);
        let twice = delta_q_minus_i_l(q, &delta_q_minus_i_l(q, &alpha_alpha_beta(&a)));
        flag("image2", f3_element(&image2_coeffs(q, &a).unwrap()) == twice);

        let h = random_h(&mut rng, &graph, genus);
        let exponents: BTreeMap<EdgeId, i64> = graph.edge_ids().map(|e| (e, rng.gen_range(-3..=3))).collect();
        let mut sum = HElement::zero(genus);
        for e in graph.edge_ids() {
            sum = sum.add(&delta_ell_h(&ctx, e, &h).sub(&h));
        }
        flag(
            "prod2sum",
            delta_minus_i_sum_check(&ctx, &exponents, &h).is_zero() && delta_g_h(&ctx, &h).sub(&h) == sum,
        );
        flag("unipotency", delta_q_minus_i_h(q, &delta_q_minus_i_h(q, &h)).is_zero());

        let level = rng.gen_range(0..=3);
        let x = random_l(&mut rng, &graph, genus, level);
        flag("filtration", delta_q_minus_i_l(q, &x).in_filtration(level + 1));

        let v = CeresaCocycle::new(ctx.clone(), random_b(&mut rng, &graph, genus)).unwrap();
        let w = compute_w(&v);
        if let Some(&f) = ctx.tree_edges().choose(&mut rng) {
            let zero = IntPolynomial::zero();
            let pushed = pushforward_contract(&v, f).unwrap();
            let q_ok = pushed.context().q() == &q.map(|x| x.substitute(f, &zero));
            flag("contraction", q_ok && compute_w(&pushed).c() == &substitute_all(w.c(), f, &zero));
        }
        let ids: Vec<EdgeId> = graph.edge_ids().collect();
        let f = *ids.choose(&mut rng).unwrap();
        let (pushed, fresh) = pushforward_subdivide(&v, f).unwrap();
        let halves = IntPolynomial::var(f) + IntPolynomial::var(fresh);
        let q_ok = pushed.context().q() == &q.map(|x| x.substitute(f, &halves));
        flag("subdivision", q_ok && compute_w(&pushed).c() == &substitute_all(w.c(), f, &halves));
    }
    let total: usize = violations.values().sum();
    let detail = if total == 0 {
        "200 random graphs of genus 3 to 5; image1, image2, prod2sum, unipotency, filtration, contraction, subdivision; 0 violations".to_string()
    } else {
        format!("violations {violations:?}")
    };
    outcome(total == 0, detail)
}

fn transport_consistency() -> Outcome {
    let mut rng = rng(0x7472616e73);
    let mut cases = 0;
    let mut graph_not_trivial = 0;
    let mut classifier_not_trivial = 0;
    let mut curve_not_trivial = 0;
    let mut curve_trivial_examples = Vec::new();
    for base in ["K4", "L3"] {
        for _ in 0..12 {
            let mut v = if base == "K4" { v_tau_k4() } else { v_tau_l3() };
            let steps = rng.gen_range(1..=3);
            let mut path = Vec::new();
            for _ in 0..steps {
                let ids: Vec<EdgeId> = v.context().graph().edge_ids().collect();
                let f = *ids.choose(&mut rng).unwrap();
                path.push(f.0);
                v = pushforward_subdivide(&v, f).unwrap().0;
            }
            let graph = v.context().graph().clone();
            cases += 1;
            if !is_cz_trivial_graph(&graph, &v, GraphTestMode::Image2).unwrap().trivial {
                graph_not_trivial += 1;
            }
            if !classify(&graph).unwrap().trivial {
                classifier_not_trivial += 1;
            }
            if is_cz_trivial_curve(&TropicalCurve::all_ones(graph), &v).unwrap().trivial {
                if curve_trivial_examples.len() < 3 {
                    curve_trivial_examples.push(format!("{base} subdivided at {path:?}"));
                }
            } else {
                curve_not_trivial += 1;
            }
        }
    }
    let passed = graph_not_trivial == cases && classifier_not_trivial == cases && curve_not_trivial == cases;
    let mut detail = format!(
        "{cases} subdivisions: graph level {graph_not_trivial}/{cases} not trivial, classifier {classifier_not_trivial}/{cases}, all-ones curve {curve_not_trivial}/{cases}"
    );
    if !curve_trivial_examples.is_empty() {
        detail.push_str(&format!("; trivial at all-ones e.g. {}", curve_trivial_examples.join(", ")));
    }
    outcome(passed, detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 polarization matrices of the pinned K4 and L3", q_fixtures),
        ("2 Ceresa-Zharkov classes of the shipped cocycles", cocycle_to_class),
        ("3 K4 curve lattices and verdicts", k4_curves),
        ("4 L3 curve lattice, membership and verdict", l3_curve),
        ("5 graph-level Diophantine verdicts", graph_level),
        ("6 classifier, minor witnesses and minor closure", classifier_and_minors),
        ("7 closed forms and identities on random graphs", oracle_equivalence),
        ("8 transport along subdivisions", transport_consistency),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = std::time::Instant::now();
        let result = check();
        if !result.passed {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} ({:.2}s)",
            if result.passed { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("tolerance: exact equality throughout; all arithmetic is over the integers");
    println!(
        "scope: the algebraic side is checked only where a cocycle is available, namely K4, L3 and their subdivisions; other graphs are checked through their minors"
    );
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
