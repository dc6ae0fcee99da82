//! Acceptance gate. Run with
//! `cargo test -p quasidense --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::fmt::Write as _;
use std::time::Instant;

use quasidense::filtration::{build_filtrated, lemmas, Labelling};
use quasidense::formula::{parse, Formula, TargetFormula};
use quasidense::kripke::{is_kl_frame, KLSpec};
use quasidense::oracle::{corpus_witnesses, enumerate_models, CorpusNodes, SearchBound, SearchResult};
use quasidense::solver::{decide, solve, verify_certificate, SolverConfig, Verdict};
use quasidense::tableau::{saturate, SaturationResult, TableauConfig};

const SPECS: [&str; 4] = ["1:2", "1:3", "2:3", "1:2,2:4"];
/// Every `STRIDE`-th corpus formula is saturated under each KL set for the
/// filtration criteria.
const STRIDE: usize = 7;

struct Outcome {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(outcomes: &[Outcome]) {
    for o in outcomes {
        println!(
            "criterion {} [{}] {}: {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
}

fn corpus() -> CorpusNodes {
    CorpusNodes::generate(&["p", "q"], 2, 9).expect("corpus within limits")
}

#[derive(Default)]
struct FiltrationStats {
    prefixes: usize,
    truth_failures: Vec<String>,
    kl_failures: Vec<String>,
    bound_failures: Vec<String>,
    lemma_failures: Vec<String>,
    lemma_checked: usize,
    max_classes: usize,
    max_classes_formula: String,
    coarse_failures: Vec<String>,
}

/// Criteria 1 to 4: saturate a corpus sample under every KL set, filtrate each
/// open prefix and check the lemmas on it.
fn filtration_suite(corpus: &CorpusNodes) -> FiltrationStats {
    let mut st = FiltrationStats::default();
    let config = TableauConfig::default();
    for spec in SPECS {
        let kl: KLSpec = spec.parse().unwrap();
        for phi in corpus.formulas.iter().step_by(STRIDE) {
            let target = TargetFormula::new(phi.clone());
            let SaturationResult::Open(prefix) = saturate(&target, &kl, &config) else {
                continue;
            };
            st.prefixes += 1;
            let pm = &prefix.model;
            let tag = format!("{phi} under {spec}");
            let lab = match Labelling::new(pm, &target) {
                Ok(l) => l,
                Err(e) => {
                    st.truth_failures.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            let fm = build_filtrated(pm, &target).expect("labelling succeeded");
            if let Err(v) = lemmas::truth_lemma(&target, &lab, &fm) {
                st.truth_failures.push(format!("{tag}: {v}"));
            }
            if !is_kl_frame(fm.model.frame(), &kl) {
                st.kl_failures.push(tag.clone());
            }
            let classes = fm.classes.len();
            if classes as u128 > lemmas::size_bound(&target) {
                st.bound_failures.push(format!("{tag}: {classes} classes"));
            }
            if classes as u128 > coarse_bound(&target) {
                st.coarse_failures.push(format!("{tag}: {classes} classes"));
            }
            if classes > st.max_classes {
                st.max_classes = classes;
                st.max_classes_formula = tag.clone();
            }
            if pm.frame().len() <= 200 {
                st.lemma_checked += 1;
                if let Err(v) = lemmas::exist_pred(pm, &lab, &fm) {
                    st.lemma_failures.push(format!("{tag}: {v}"));
                }
                if let Err(v) = lemmas::exists_path(pm, &fm, 3) {
                    st.lemma_failures.push(format!("{tag}: {v}"));
                }
            }
        }
    }
    st
}

/// `2^{|SF¬(Φ)|·(d(Φ)+1)} + 1`, saturating.
fn coarse_bound(target: &TargetFormula) -> u128 {
    let e = target.len() * (target.depth() + 1);
    if e >= 128 {
        u128::MAX
    } else {
        (1u128 << e).saturating_add(1)
    }
}

fn first(v: &[String]) -> String {
    v.iter().take(3).cloned().collect::<Vec<_>>().join("; ")
}

#[derive(Default)]
struct DifferentialStats {
    formulas: usize,
    sat: usize,
    unsat: usize,
    unknown: Vec<String>,
    missed_sat: Vec<String>,
    bad_certificates: Vec<String>,
    wrong_unsat: Vec<String>,
    over_bound: Vec<String>,
    max_prefix: usize,
}

/// Criteria 5 and 7 over the whole corpus with KL = {(1,2)}.
fn differential_suite(corpus: &CorpusNodes) -> DifferentialStats {
    let kl: KLSpec = "1:2".parse().unwrap();
    let bound = SearchBound { max_worlds: 4 };
    let witnesses = corpus_witnesses(corpus, &kl, bound);
    let config = SolverConfig::default();
    let mut st = DifferentialStats::default();
    for (phi, witness) in corpus.formulas.iter().zip(&witnesses) {
        st.formulas += 1;
        let d = solve(phi, &kl, &config);
        if let Some(n) = d.prefix_worlds {
            st.max_prefix = st.max_prefix.max(n);
            let target = TargetFormula::new(phi.clone());
            if n as u128 > lemmas::size_bound(&target) {
                st.over_bound.push(format!("{phi}: {n} worlds"));
            }
        }
        match &d.verdict {
            Verdict::Sat { model, .. } => {
                st.sat += 1;
                if !verify_certificate(model, phi, &kl).ok() {
                    st.bad_certificates.push(phi.to_string());
                }
            }
            Verdict::Unsat => {
                st.unsat += 1;
                if witness.is_some() {
                    st.wrong_unsat.push(phi.to_string());
                }
            }
            Verdict::Unknown(r) => st.unknown.push(format!("{phi}: {r}")),
        }
        if witness.is_some() && !d.verdict.is_sat() {
            st.missed_sat.push(phi.to_string());
        }
    }
    st
}

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

/// Criterion 6.
fn curated() -> (bool, String) {
    let mut ok = true;
    let mut detail = String::new();
    let dense: KLSpec = "1:2".parse().unwrap();
    let v = decide(&f("<>p & [][]~p"), &dense, &SolverConfig::default());
    let unsat = v.is_unsat()
        && enumerate_models(&f("<>p & [][]~p"), &dense, SearchBound::default()) == SearchResult::NoneUpTo(4);
    ok &= unsat;
    let _ = write!(detail, "<>p & [][]~p is {} under 1:2", v.label());

    let mut verified_specs = 0;
    for spec in SPECS {
        let kl: KLSpec = spec.parse().unwrap();
        let v = decide(&f("<>p"), &kl, &SolverConfig::default());
        let verified = match &v {
            Verdict::Sat { model, report } => {
                report.is_some_and(|r| r.ok()) && verify_certificate(model, &f("<>p"), &kl).ok()
            }
            _ => false,
        };
        ok &= verified;
        verified_specs += usize::from(verified);
    }
    let _ = write!(detail, "; <>p verified SAT under {verified_specs} of {} KL sets", SPECS.len());

    let phi = f("<>(p & <>q) & <>(~p & <>q)");
    let target = TargetFormula::new(phi.clone());
    let mut finer = false;
    if let SaturationResult::Open(prefix) = saturate(&target, &dense, &TableauConfig::default()) {
        let lab = Labelling::new(&prefix.model, &target).unwrap();
        let fm = build_filtrated(&prefix.model, &target).unwrap();
        let n = lab.len();
        finer = (0..n).any(|x| {
            (x + 1..n).any(|y| {
                !lab.restricted(x).is_clear()
                    && lab.restricted(x) == lab.restricted(y)
                    && fm.class_of[x] != fm.class_of[y]
            })
        });
    }
    ok &= finer;
    let _ = write!(
        detail,
        "; equal restricted labels in distinct classes: {}",
        if finer { "yes" } else { "no" }
    );
    (ok, detail)
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let corpus = corpus();
    let mut outcomes = Vec::new();

    let t = Instant::now();
    let fs = filtration_suite(&corpus);
    let filtration_secs = t.elapsed().as_secs_f64();
    outcomes.push(Outcome {
        id: 1,
        name: "truth lemma on canonical prefixes",
        pass: fs.prefixes >= 500 && fs.truth_failures.is_empty(),
        detail: format!(
            "{} prefixes over {} KL sets, {} disagreements, {:.1}s {}",
            fs.prefixes,
            SPECS.len(),
            fs.truth_failures.len(),
            filtration_secs,
            first(&fs.truth_failures)
        ),
    });
    outcomes.push(Outcome {
        id: 2,
        name: "filtrated frames are KL-frames",
        pass: fs.prefixes > 0 && fs.kl_failures.is_empty(),
        detail: format!("{} failures {}", fs.kl_failures.len(), first(&fs.kl_failures)),
    });
    outcomes.push(Outcome {
        id: 3,
        name: "class-count bound",
        pass: fs.bound_failures.is_empty() && fs.coarse_failures.is_empty(),
        detail: format!(
            "{} over the exact bound, {} over the coarse bound; largest model {} classes ({})",
            fs.bound_failures.len(),
            fs.coarse_failures.len(),
            fs.max_classes,
            fs.max_classes_formula
        ),
    });
    outcomes.push(Outcome {
        id: 4,
        name: "exist-pred and exists-path (k <= 3)",
        pass: fs.lemma_checked > 0 && fs.lemma_failures.is_empty(),
        detail: format!(
            "{} prefixes checked, {} violations {}",
            fs.lemma_checked,
            fs.lemma_failures.len(),
            first(&fs.lemma_failures)
        ),
    });

    let t = Instant::now();
    let ds = differential_suite(&corpus);
    let differential_secs = t.elapsed().as_secs_f64();
    outcomes.push(Outcome {
        id: 5,
        name: "differential against the oracle (KL = 1:2)",
        pass: ds.missed_sat.is_empty() && ds.bad_certificates.is_empty() && ds.wrong_unsat.is_empty(),
        detail: format!(
            "{} formulas, {} SAT, {} UNSAT; oracle-SAT not SAT: {}, bad certificates: {}, UNSAT with oracle model: {}, {:.1}s {}",
            ds.formulas,
            ds.sat,
            ds.unsat,
            ds.missed_sat.len(),
            ds.bad_certificates.len(),
            ds.wrong_unsat.len(),
            differential_secs,
            first(&ds.missed_sat)
        ),
    });

    let (curated_ok, curated_detail) = curated();
    outcomes.push(Outcome {
        id: 6,
        name: "curated instances",
        pass: curated_ok,
        detail: curated_detail,
    });
    outcomes.push(Outcome {
        id: 7,
        name: "termination within the class bound",
        pass: ds.unknown.is_empty() && ds.over_bound.is_empty(),
        detail: format!(
            "{} UNKNOWN, {} prefixes over the bound, largest prefix {} worlds {}",
            ds.unknown.len(),
            ds.over_bound.len(),
            ds.max_prefix,
            first(&ds.unknown)
        ),
    });

    report(&outcomes);
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
