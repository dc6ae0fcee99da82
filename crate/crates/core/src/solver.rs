//! The decision procedure: saturate with path-signature blocking, filtrate
//! the open prefix, and accept the result only after an independent check.

use std::fmt;

use thiserror::Error;

use crate::filtration::build_filtrated;
use crate::formula::{Formula, TargetFormula};
use crate::kripke::{check_model, CertificateReport, KLSpec, PointedModel};
use crate::tableau::{saturate_traced, Blocking, ResourceKind, SaturationResult, TableauConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub tableau: TableauConfig,
    pub verify: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tableau: TableauConfig::default(),
            verify: true,
        }
    }
}

/// Why no verdict could be reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    Budget(ResourceKind),
    CertificateRejected(CertificateReport),
    Extraction(String),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Budget(ResourceKind::Steps(n)) => write!(f, "step budget of {n} exhausted"),
            UnknownReason::Budget(ResourceKind::Worlds(n)) => write!(f, "world limit exceeded ({n} worlds)"),
            UnknownReason::Budget(ResourceKind::Time(d)) => write!(f, "time budget of {d:?} exhausted"),
            UnknownReason::CertificateRejected(r) => write!(f, "certificate rejected: {r}"),
            UnknownReason::Extraction(e) => write!(f, "model extraction failed: {e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    /// `report` is `None` only when verification is switched off; otherwise
    /// it is present and `ok()`.
    Sat {
        model: PointedModel,
        report: Option<CertificateReport>,
    },
    Unsat,
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat { .. } => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Unknown(_) => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("saturation result is not open")]
    NotOpen,
    #[error("class `{class}` has members disagreeing on `{atom}`")]
    Inconsistent { class: String, atom: String },
    #[error(transparent)]
    Kripke(#[from] crate::kripke::KripkeError),
}

/// Decides `Φ` over `K_KL`: `Sat` carries a verified finite model, `Unsat`
/// means every branch closed, and `Unknown` covers exhausted budgets and
/// rejected certificates.
pub fn decide(phi: &Formula, kl: &KLSpec, config: &SolverConfig) -> Verdict {
    solve(phi, kl, config).verdict
}

/// A verdict with the size of the open prefix it came from.
#[derive(Debug, Clone)]
pub struct Decision {
    pub verdict: Verdict,
    pub prefix_worlds: Option<usize>,
}

/// [`decide`], also reporting the prefix size.
pub fn solve(phi: &Formula, kl: &KLSpec, config: &SolverConfig) -> Decision {
    solve_traced(phi, kl, config, &mut |_| {})
}

/// [`solve`], passing each tableau rule application to `trace`.
pub fn solve_traced(
    phi: &Formula,
    kl: &KLSpec,
    config: &SolverConfig,
    trace: &mut dyn FnMut(&str),
) -> Decision {
    let target = TargetFormula::new(phi.clone());
    let mut tableau = config.tableau.clone();
    tableau.blocking = Blocking::PathSignature;
    let result = saturate_traced(&target, kl, &tableau, trace);
    let prefix_worlds = match &result {
        SaturationResult::Open(p) => Some(p.model.frame().len()),
        _ => None,
    };
    let verdict = match result {
        SaturationResult::Closed => Verdict::Unsat,
        SaturationResult::ResourceLimit(kind) => Verdict::Unknown(UnknownReason::Budget(kind)),
        SaturationResult::Open(_) => match extract_model(&result, &target) {
            Err(e) => Verdict::Unknown(UnknownReason::Extraction(e.to_string())),
            Ok(model) if !config.verify => Verdict::Sat { model, report: None },
            Ok(model) => {
                let report = verify_certificate(&model, phi, kl);
                if report.ok() {
                    Verdict::Sat {
                        model,
                        report: Some(report),
                    }
                } else {
                    Verdict::Unknown(UnknownReason::CertificateRejected(report))
                }
            }
        },
    };
    Decision { verdict, prefix_worlds }
}

/// Re-checks a claimed model: KL-density of the frame and `Φ` at the root.
pub fn verify_certificate(pm: &PointedModel, phi: &Formula, kl: &KLSpec) -> CertificateReport {
    check_model(pm, phi, kl)
}

/// The path-filtrated model of an open prefix. An atom holds at a class iff
/// every member's label carries it; unconstrained atoms are false.
pub fn extract_model(result: &SaturationResult, target: &TargetFormula) -> Result<PointedModel, ExtractError> {
    let SaturationResult::Open(prefix) = result else {
        return Err(ExtractError::NotOpen);
    };
    let fm = build_filtrated(&prefix.model, target)?;
    for class in &fm.classes {
        for (atom, _) in target.atoms() {
            let p = Formula::Atom(atom.clone());
            let np = Formula::not(p.clone());
            let pos = class.members.iter().any(|&x| prefix.labels[x].contains(&p));
            let neg = class.members.iter().any(|&x| prefix.labels[x].contains(&np));
            if pos && neg {
                return Err(ExtractError::Inconsistent {
                    class: class.name.clone(),
                    atom: atom.to_string(),
                });
            }
        }
    }
    Ok(fm.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::kripke::is_kl_frame;
    use crate::tableau::saturate;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn kl(s: &str) -> KLSpec {
        s.parse().unwrap()
    }

    #[test]
    fn density_counterexample_is_unsat() {
        let v = decide(&f("<>p & [][]~p"), &kl("1:2"), &SolverConfig::default());
        assert!(v.is_unsat(), "{v:?}");
    }

    #[test]
    fn diamond_p_is_sat_with_verified_model() {
        let phi = f("<>p");
        let spec = kl("1:2");
        let Verdict::Sat { model, report } = decide(&phi, &spec, &SolverConfig::default()) else {
            panic!("expected SAT");
        };
        assert!(report.unwrap().ok());
        assert!(verify_certificate(&model, &phi, &spec).ok());
    }

    #[test]
    fn propositional_formula_gives_one_world() {
        let Verdict::Sat { model, .. } = decide(&f("p"), &kl("1:2"), &SolverConfig::default()) else {
            panic!("expected SAT");
        };
        assert_eq!(model.frame().len(), 1);
        assert!(model.model().holds("p", 0));
    }

    #[test]
    fn verification_toggle() {
        let config = SolverConfig {
            verify: false,
            ..SolverConfig::default()
        };
        let Verdict::Sat { report, .. } = decide(&f("<>p"), &kl("1:2"), &config) else {
            panic!("expected SAT");
        };
        assert!(report.is_none());
    }

    #[test]
    fn non_kl_frame_is_rejected() {
        let pm = PointedModel::from_json(
            r#"{"worlds":["s","a"],"root":"s","edges":[["s","a"]],"valuation":{"p":["a"]}}"#,
        )
        .unwrap();
        let r = verify_certificate(&pm, &f("<>p"), &kl("1:2"));
        assert!(!r.kl_frame_ok);
        assert!(r.root_satisfies_phi);
    }

    #[test]
    fn worked_example_filtrates_to_a_certificate() {
        let phi = f("<>(p & <>q) & <>(~p & <>q)");
        let spec = kl("1:2");
        let target = TargetFormula::new(phi.clone());
        let result = saturate(&target, &spec, &TableauConfig::default());
        let model = extract_model(&result, &target).unwrap();
        assert!(verify_certificate(&model, &phi, &spec).ok());
    }

    #[test]
    fn deep_structural_paths_reach_the_sink() {
        let phi = f("<>p");
        let spec = kl("1:3");
        let target = TargetFormula::new(phi.clone());
        let result = saturate(&target, &spec, &TableauConfig::default());
        let model = extract_model(&result, &target).unwrap();
        let sink = model.frame().world("sink").expect("sink class");
        assert!(model.frame().rel().contains(sink, sink));
        assert!(is_kl_frame(model.frame(), &spec));
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let config = SolverConfig {
            tableau: TableauConfig {
                max_steps: 2,
                ..TableauConfig::default()
            },
            ..SolverConfig::default()
        };
        let v = decide(&f("<>p & <>q"), &kl("1:2"), &config);
        assert!(matches!(v, Verdict::Unknown(UnknownReason::Budget(ResourceKind::Steps(2)))));
    }

    #[test]
    fn extraction_needs_an_open_result() {
        let target = TargetFormula::new(f("p"));
        assert_eq!(
            extract_model(&SaturationResult::Closed, &target).unwrap_err(),
            ExtractError::NotOpen
        );
    }

    #[test]
    fn decisions_are_deterministic() {
        let phi = f("<>(p & <>q) & []<>~q");
        let spec = kl("1:2,2:4");
        let a = decide(&phi, &spec, &SolverConfig::default());
        let b = decide(&phi, &spec, &SolverConfig::default());
        match (a, b) {
            (Verdict::Sat { model: ma, .. }, Verdict::Sat { model: mb, .. }) => assert_eq!(ma, mb),
            other => panic!("{other:?}"),
        }
    }
}
