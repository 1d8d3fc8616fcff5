use super::*;
use crate::linalg::hermitian_part;
use crate::linop::default_schedule;
use crate::spaces::{Field, SumKind, C64};
use proptest::prelude::*;

fn names(report: &VerificationReport) -> Vec<String> {
    report.failures().map(|c| format!("{} = {:?}", c.name, c.value)).collect()
}

#[test]
fn battery_spans_space_kinds() {
    let b = curated_battery();
    assert!(b.len() >= 20);
    let kinds: std::collections::BTreeSet<String> = b
        .iter()
        .map(|e| match e.operator.space().kind() {
            crate::spaces::NormKind::PNorm(p) => format!("p{p}{:?}", e.operator.space().field()),
            crate::spaces::NormKind::Polyhedral(_) => "poly".into(),
            crate::spaces::NormKind::Sum(_) => "sum".into(),
        })
        .collect();
    assert!(kinds.len() >= 6, "{kinds:?}");
    assert!(b.iter().any(|e| matches!(e.operator, Operator::Pwl(_))));
}

#[test]
fn known_indices() {
    assert_eq!(known_index(&NormedSpace::l1(3)), Some(1.0));
    assert_eq!(known_index(&NormedSpace::complex_linf(2)), Some(1.0));
    assert_eq!(known_index(&NormedSpace::l2(2)), Some(0.0));
    assert_eq!(known_index(&NormedSpace::complex_l2(3)), Some(0.5));
    assert_eq!(known_index(&NormedSpace::l2(1)), Some(1.0));
    let z = NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::Linf).unwrap();
    assert_eq!(known_index(&z), Some(0.0));
    assert_eq!(known_index(&NormedSpace::random_hexagon(1)), None);
    assert_eq!(known_index(&NormedSpace::lp(2, 3.0, Field::Real).unwrap()), None);
}

#[test]
fn structured_matrices_include_block_lifts() {
    let z = NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::L1).unwrap();
    let ms = structured_matrices(&z);
    let (_, m) = ms.iter().find(|(n, _)| n == "left_rotation_01").unwrap();
    assert_eq!(m[(1, 0)], C64::new(1.0, 0.0));
    assert_eq!(m[(0, 1)], C64::new(-1.0, 0.0));
    assert_eq!(m[(2, 2)], C64::new(0.0, 0.0));
}

#[test]
fn real_hilbert_index_is_zero() {
    let e = estimate_index(&NormedSpace::l2(2), Mode::Linear, 200, 7).unwrap();
    assert_eq!(e.upper, 0.0);
    let Operator::Linear(t) = &e.witness else { panic!("linear witness expected") };
    // A skew matrix: <Tx, x> = 0 for every x.
    let m = t.matrix();
    assert!((m + m.transpose()).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn complex_hilbert_index_is_one_half() {
    let e = estimate_index(&NormedSpace::complex_l2(2), Mode::Linear, 500, 7).unwrap();
    assert!((e.upper - 0.5).abs() < 5e-3, "{}", e.upper);
    // Independent check of the witness: max over angles of the top eigenvalue
    // of Re(e^{i theta} T), divided by the largest singular value.
    let Operator::Linear(t) = &e.witness else { panic!("linear witness expected") };
    let m = t.matrix();
    let scan = (0..4000)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 4000.0;
            hermitian_part(&(m * C64::from_polar(1.0, th))).symmetric_eigenvalues().max()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let sigma = m.singular_values().max();
    assert!(scan / sigma <= e.upper + 1e-9);
    assert!(e.upper - scan / sigma < 1e-3);
}

#[test]
fn index_one_spaces_report_one() {
    for s in [NormedSpace::linf(2), NormedSpace::l1(3)] {
        let e = estimate_index(&s, Mode::Lipschitz, 300, 7).unwrap();
        assert!(e.upper >= 1.0 - 5e-3 && e.upper <= 1.0 + 1e-9, "{s}: {}", e.upper);
    }
}

#[test]
fn estimates_are_deterministic() {
    let s = NormedSpace::random_hexagon(2);
    let a = serde_json::to_string(&estimate_index(&s, Mode::Lipschitz, 300, 11).unwrap()).unwrap();
    let b = serde_json::to_string(&estimate_index(&s, Mode::Lipschitz, 300, 11).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_budget_is_rejected() {
    assert!(matches!(estimate_index(&NormedSpace::l2(2), Mode::Linear, 0, 1), Err(crate::Error::Input(_))));
}

#[test]
fn battery_limit_sequences_decrease_and_meet_the_lower_bound() {
    let schedule = default_schedule();
    for e in curated_battery() {
        let alphas = crate::linop::AlphaGrid::for_field(e.operator.space().field());
        let seq = e.operator.limit_sequence(&schedule, &alphas).unwrap();
        for w in seq.windows(2) {
            // Rounding may move a flat stretch by an ulp.
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{}: {} then {}", e.name, w[0], w[1]);
        }
        let lower = e.operator.radius(1e-9).lower;
        assert!(seq.last().unwrap() - lower <= 1e-3, "{}: {} vs {}", e.name, seq.last().unwrap(), lower);
        assert!(*seq.last().unwrap() >= lower - 1e-9, "{}", e.name);
    }
}

#[test]
fn daugavet_gap_detects_radius_equal_to_norm() {
    for e in curated_battery() {
        let norm = e.operator.norm_bracket();
        let b = e.operator.radius(1e-9);
        let gap = e.operator.daugavet_gap();
        // (1 + ||T||) - max ||I + aT|| never exceeds 2 (||T|| - omega) (plus grid slack).
        assert!(gap <= 2.0 * (norm.upper - b.lower) + 1e-3, "{}: gap {gap}", e.name);
        if b.lower >= norm.upper * (1.0 - 1e-9) {
            assert!(gap <= 1e-6, "{}: pinned but gap {gap}", e.name);
        } else {
            assert!(b.upper < norm.lower - 1e-3, "{}: neither pinned nor separated", e.name);
            assert!(gap >= 1e-3, "{}: gap {gap}", e.name);
        }
    }
}

#[test]
fn report_status_rules() {
    let c = Case::check("a", 0.5, 0.4, 0.05, Relation::Approx, true, None);
    assert_eq!(c.status, Status::Fail);
    let c = Case::check("a", 0.5, 0.4, 0.05, Relation::Approx, false, None);
    assert_eq!(c.status, Status::Unconverged);
    assert_eq!(Case::check("a", 0.5, 0.4, 0.0, Relation::AtLeast, true, None).status, Status::Pass);
    assert_eq!(Case::check("a", 0.5, 0.4, 0.0, Relation::AtMost, true, None).status, Status::Fail);
    let r = VerificationReport::new("demo", 3, serde_json::json!({}), vec![c]);
    assert!(r.passed() && r.has_unconverged());
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("suite,seed,name,status,value,expected,tol,relation"));
    assert!(csv.lines().nth(1).unwrap().starts_with("demo,3,a,unconverged,0.5,0.4,0.05,approx"));
    let back: VerificationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn bk_suite_passes_on_complex_spaces() {
    for s in [NormedSpace::complex_l2(2), NormedSpace::complex_l1(2)] {
        let r = bk_suite(&s, 40, 1).unwrap();
        assert_eq!(r.cases.len(), 40);
        assert!(r.passed(), "{s}: {:?}", names(&r));
        assert!(r.cases.iter().all(|c| c.witness.is_some()));
    }
    // The shift is the worst linear case on complex l2.
    let r = bk_suite(&NormedSpace::complex_l2(2), 3, 1).unwrap();
    let shift = r.cases.iter().find(|c| c.name == "shift").unwrap();
    assert!((shift.value.unwrap() - 0.5).abs() < 1e-9);
    assert!(bk_suite(&NormedSpace::l2(2), 5, 1).is_err());
}

#[test]
fn known_values_suite_passes() {
    let r = known_values_suite(1).unwrap();
    assert!(r.passed(), "{:?}", names(&r));
    let min = |name: &str| r.cases.iter().find(|c| c.name == format!("{name}: battery minimum")).unwrap().value.unwrap();
    assert_eq!(min("l2:2"), 0.0);
    assert!((min("cl2:2") - 0.5).abs() < 1e-3);
    assert!(min("linf:3") >= 1.0 - 5e-3);
}

#[test]
fn rnp_suite_on_the_plane() {
    let r = rnp_equality_suite(&NormedSpace::l2(2), 300, 2).unwrap();
    assert!(r.passed(), "{:?}", names(&r));
    let r = rnp_equality_suite(&NormedSpace::random_hexagon(4), 300, 2).unwrap();
    assert!(r.passed(), "{:?}", names(&r));
}

#[test]
fn sum_suite_on_lines() {
    for kind in [SumKind::L1, SumKind::Linf] {
        let r = sum_stability_suite(&NormedSpace::reals(), &NormedSpace::reals(), kind, 300, 3).unwrap();
        assert!(r.passed() && !r.has_unconverged(), "{kind:?}: {:?}", r.cases);
    }
    let big = NormedSpace::l2(3);
    assert!(sum_stability_suite(&big, &big, SumKind::L1, 10, 1).is_err());
}

#[test]
fn sum_suite_compresses_the_padded_rotation() {
    let x = NormedSpace::l2(2);
    for kind in [SumKind::L1, SumKind::Linf] {
        let r = sum_stability_suite(&x, &NormedSpace::reals(), kind, 300, 3).unwrap();
        assert!(r.passed() && !r.has_unconverged(), "{kind:?}: {:?}", r.cases);
        let c = r.cases.iter().find(|c| c.name.starts_with("compressed")).unwrap();
        assert!(c.value.unwrap() < 2e-2);
    }
}

#[test]
fn ck_suite_boosts_every_instance() {
    let r = ck_suite(10, 5).unwrap();
    assert_eq!(r.cases.len(), 10);
    assert!(r.passed() && !r.has_unconverged(), "{:?}", r.cases);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn estimates_are_reproducible_and_ordered(seed in 0u64..1000, which in 0usize..4) {
        let spaces = [
            NormedSpace::l2(2),
            NormedSpace::complex_l2(2),
            NormedSpace::random_hexagon(seed),
            NormedSpace::linf(2),
        ];
        let s = &spaces[which];
        let lin = estimate_index(s, Mode::Linear, 60, seed).unwrap();
        let lip = estimate_index(s, Mode::Lipschitz, 60, seed).unwrap();
        prop_assert!(lip.upper <= lin.upper + 1e-9);
        for e in [&lin, &lip] {
            prop_assert!((e.reevaluate() - e.upper).abs() <= 1e-6);
            if s.field().is_real() {
                prop_assert!(e.upper >= 0.0 && e.upper <= 1.0 + 1e-9);
            } else {
                prop_assert!(e.upper >= 1.0 / std::f64::consts::E - 1e-6 && e.upper <= 1.0 + 1e-9);
            }
        }
    }
}
