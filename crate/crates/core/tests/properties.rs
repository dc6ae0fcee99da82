use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use proptest::prelude::*;
use quasidense::filtration::{build_filtrated, lemmas, Labelling};
use quasidense::formula::{box_minus, modal_depth_set, parse, sf_closure, Formula, FormulaSet, TargetFormula};
use quasidense::kripke::{is_kl_frame, satisfies, Evaluator, Frame, KLSpec, Model, PointedModel, Relation};
use quasidense::oracle::generate_corpus;
use quasidense::solver::{decide, verify_certificate, SolverConfig, Verdict};
use quasidense::tableau::{saturate, SaturationResult, TableauConfig};

const ATOMS: [&str; 3] = ["p", "q", "r"];

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => (0..ATOMS.len()).prop_map(|i| Formula::atom(ATOMS[i])),
        1 => Just(Formula::bottom()),
        1 => Just(Formula::top()),
    ];
    leaf.prop_recursive(6, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::boxed),
            inner.clone().prop_map(Formula::diamond),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

/// Formulas small enough to saturate quickly.
fn small_formula() -> impl Strategy<Value = Formula> {
    formula().prop_filter("small", |f| f.size() <= 14 && f.modal_depth() <= 3)
}

fn kl_spec() -> impl Strategy<Value = KLSpec> {
    prop_oneof![
        Just("1:2"),
        Just("1:3"),
        Just("2:3"),
        Just("1:2,2:4"),
        Just("2:5"),
    ]
    .prop_map(|s| s.parse().unwrap())
}

fn frame_of(n: usize, pairs: &[(usize, usize)]) -> Frame {
    let names = (0..n).map(|i| format!("w{i}")).collect();
    Frame::new(names, Relation::from_pairs(n, pairs.iter().copied()))
}

/// An arbitrary frame on 1 to 4 worlds.
fn any_frame() -> impl Strategy<Value = Frame> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let pairs: Vec<(usize, usize)> = (0..n * n).filter(|&i| bits[i]).map(|i| (i / n, i % n)).collect();
            frame_of(n, &pairs)
        })
    })
}

fn model_on(frame: Frame, bits: &[bool]) -> Model {
    let n = frame.len();
    let mut valuation = BTreeMap::new();
    for (a, atom) in ATOMS.iter().enumerate() {
        let mut set = FixedBitSet::with_capacity(n);
        for w in 0..n {
            set.set(w, bits[a * n + w]);
        }
        valuation.insert(atom.to_string(), set);
    }
    Model::new(frame, valuation)
}

fn any_model() -> impl Strategy<Value = Model> {
    any_frame().prop_flat_map(|frame| {
        let n = frame.len();
        proptest::collection::vec(any::<bool>(), ATOMS.len() * n).prop_map(move |bits| model_on(frame.clone(), &bits))
    })
}

/// A model rooted at 0 whose shortest paths are unique: a random tree plus
/// edges into worlds no deeper than their source.
fn unique_path_model() -> impl Strategy<Value = PointedModel> {
    (1usize..=7)
        .prop_flat_map(|n| {
            let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            (
                Just(n),
                parents,
                proptest::collection::vec((0..n, 0..n), 0..=2 * n),
                proptest::collection::vec(any::<bool>(), ATOMS.len() * n),
            )
        })
        .prop_map(|(n, parents, extra, bits)| {
            let mut depth = vec![0usize; n];
            let mut pairs = Vec::new();
            for (i, &p) in parents.iter().enumerate() {
                depth[i + 1] = depth[p] + 1;
                pairs.push((p, i + 1));
            }
            pairs.extend(extra.into_iter().filter(|&(x, y)| depth[y] <= depth[x]));
            PointedModel::new(model_on(frame_of(n, &pairs), &bits), 0).unwrap()
        })
}

/// Naive recursive semantics, independent of the evaluator.
fn naive(m: &Model, x: usize, phi: &Formula) -> bool {
    match phi {
        Formula::Atom(p) => m.holds(p, x),
        Formula::Bottom => false,
        Formula::Not(a) => !naive(m, x, a),
        Formula::And(a, b) => naive(m, x, a) && naive(m, x, b),
        Formula::Box(a) => (0..m.frame().len()).all(|y| !m.frame().rel().contains(x, y) || naive(m, y, a)),
    }
}

/// Worlds reachable from `x` in exactly `k` steps.
fn exact_reach(frame: &Frame, x: usize, k: usize) -> Vec<bool> {
    let n = frame.len();
    let mut cur = vec![false; n];
    cur[x] = true;
    for _ in 0..k {
        let mut next = vec![false; n];
        for a in (0..n).filter(|&a| cur[a]) {
            for (b, slot) in next.iter_mut().enumerate() {
                *slot |= frame.rel().contains(a, b);
            }
        }
        cur = next;
    }
    cur
}

fn brute_force_kl(frame: &Frame, kl: &KLSpec) -> bool {
    kl.pairs().iter().all(|&(k, l)| {
        (0..frame.len()).all(|x| {
            let rk = exact_reach(frame, x, k);
            let rl = exact_reach(frame, x, l);
            rk.iter().zip(&rl).all(|(&a, &b)| !a || b)
        })
    })
}

#[test]
fn corpus_round_trips_through_the_printer() {
    let corpus = generate_corpus(&["p", "q"], 2, 8).unwrap();
    assert!(corpus.len() >= 10_000, "{}", corpus.len());
    for phi in &corpus {
        assert_eq!(&parse(&phi.to_string()).unwrap(), phi, "{phi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn printing_then_parsing_is_identity(phi in formula()) {
        prop_assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn closure_is_idempotent_and_contains_its_input(phi in formula()) {
        let s: FormulaSet = [phi].into_iter().collect();
        let c = sf_closure(&s);
        prop_assert!(s.is_subset(&c));
        prop_assert_eq!(sf_closure(&c), c);
    }

    #[test]
    fn box_minus_drops_modal_depth(phi in formula(), psi in formula()) {
        let s: FormulaSet = [phi, psi].into_iter().collect();
        let c = sf_closure(&s);
        let inner = box_minus(&c);
        if inner.is_empty() {
            prop_assert_eq!(modal_depth_set(&c), 0);
        } else {
            prop_assert_eq!(modal_depth_set(&inner) + 1, modal_depth_set(&c));
        }
    }

    #[test]
    fn levels_shrink_and_vanish_past_the_depth(phi in formula()) {
        let target = TargetFormula::new(phi);
        let d = target.depth();
        for i in 0..d {
            let hi = target.level(i).unwrap();
            let lo = target.level(i + 1).unwrap();
            prop_assert!(lo.is_subset(hi));
            prop_assert_eq!(target.sf_neg_i(i + 1).len(), lo.count_ones(..));
        }
        prop_assert!(target.level(d + 1).is_none());
        prop_assert!(target.sf_neg_i(d + 1).is_empty());
    }

    #[test]
    fn relation_powers_compose(frame in any_frame(), a in 0usize..4, b in 0usize..4) {
        let r = frame.rel();
        prop_assert_eq!(r.power(a).compose(&r.power(b)), r.power(a + b));
        prop_assert_eq!(r.power(0), Relation::identity(frame.len()));
        prop_assert_eq!(r.power(1), r.clone());
    }

    #[test]
    fn kl_check_matches_path_counting(frame in any_frame(), kl in kl_spec()) {
        prop_assert_eq!(is_kl_frame(&frame, &kl), brute_force_kl(&frame, &kl));
    }

    #[test]
    fn evaluator_matches_naive_semantics(m in any_model(), phi in formula()) {
        let mut eval = Evaluator::new(&m);
        for x in 0..m.frame().len() {
            prop_assert_eq!(eval.holds(x, &phi), naive(&m, x, &phi));
            prop_assert_eq!(satisfies(&m, x, &phi), naive(&m, x, &phi));
        }
    }

    #[test]
    fn diamond_is_dual_to_box(m in any_model(), phi in formula()) {
        let dia = Formula::diamond(phi.clone());
        let dual = Formula::not(Formula::boxed(Formula::not(phi.clone())));
        prop_assert_eq!(&dia, &dual);
        let box_and = Formula::boxed(Formula::and(phi.clone(), Formula::atom("q")));
        let and_box = Formula::and(Formula::boxed(phi), Formula::boxed(Formula::atom("q")));
        for x in 0..m.frame().len() {
            prop_assert_eq!(naive(&m, x, &box_and), naive(&m, x, &and_box));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn truth_lemma_holds_on_unique_path_models(pm in unique_path_model(), phi in formula()) {
        // Exist-pred and exists-path need tableau edges; see the prefix property below.
        let target = TargetFormula::new(phi);
        let lab = Labelling::new(&pm, &target).unwrap();
        let fm = build_filtrated(&pm, &target).unwrap();
        let checks = lemmas::note_a(&lab, &fm)
            .and_then(|_| lemmas::note_b(&lab, &fm))
            .and_then(|_| lemmas::universal_property(&target, &lab, &fm))
            .and_then(|_| lemmas::truth_lemma(&target, &lab, &fm));
        if let Err(v) = checks {
            return Err(TestCaseError::fail(v.to_string()));
        }
        prop_assert!(fm.classes.len() as u128 <= lemmas::size_bound(&target));
        let root_class = fm.class_of[pm.root()];
        prop_assert_eq!(fm.model.root(), root_class);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn open_prefixes_filtrate_cleanly(phi in small_formula(), kl in kl_spec()) {
        let target = TargetFormula::new(phi);
        if let SaturationResult::Open(prefix) = saturate(&target, &kl, &TableauConfig::default()) {
            let lab = Labelling::new(&prefix.model, &target).unwrap();
            let fm = build_filtrated(&prefix.model, &target).unwrap();
            if let Err(v) = lemmas::check_all(&prefix.model, &target, &lab, &fm) {
                return Err(TestCaseError::fail(v.to_string()));
            }
            prop_assert!(is_kl_frame(fm.model.frame(), &kl));
        }
    }

    #[test]
    fn sat_verdicts_carry_valid_certificates(phi in small_formula(), kl in kl_spec()) {
        match decide(&phi, &kl, &SolverConfig::default()) {
            Verdict::Sat { model, report } => {
                prop_assert!(report.is_some_and(|r| r.ok()));
                prop_assert!(verify_certificate(&model, &phi, &kl).ok());
            }
            Verdict::Unsat => {}
            Verdict::Unknown(r) => return Err(TestCaseError::fail(format!("UNKNOWN: {r}"))),
        }
    }
}
