use super::*;
use crate::spaces::parse_space;
use rand::Rng;
use proptest::prelude::*;

fn m(rows: usize, cols: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, v)
}

fn cell(c: &[f64], d: &[f64], a: &[f64], n: usize) -> Cell {
    Cell {
        c: m(d.len(), n, c),
        d: DVector::from_column_slice(d),
        a: m(n, n, a),
        b: DVector::zeros(n),
    }
}

fn abs_on_reals() -> PwlOperator {
    PwlOperator::new(
        NormedSpace::reals(),
        vec![cell(&[1.0], &[0.0], &[-1.0], 1), cell(&[-1.0], &[0.0], &[1.0], 1)],
        1.0,
    )
    .unwrap()
}

/// Coordinatewise absolute value on the plane: four quadrants.
fn abs_2d(space: NormedSpace) -> PwlOperator {
    let mut cells = Vec::new();
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            cells.push(cell(&[-sx, 0.0, 0.0, -sy], &[0.0, 0.0], &[sx, 0.0, 0.0, sy], 2));
        }
    }
    PwlOperator::new(space, cells, 1.0).unwrap()
}

/// `x -> clamp(x, -1, 1)` on the reals.
fn clamp_on_reals() -> PwlOperator {
    let mut cells = vec![
        cell(&[1.0], &[-1.0], &[0.0], 1),
        cell(&[1.0, -1.0], &[1.0, 1.0], &[1.0], 1),
        cell(&[-1.0], &[-1.0], &[0.0], 1),
    ];
    cells[0].b[0] = -1.0;
    cells[2].b[0] = 1.0;
    PwlOperator::new(NormedSpace::reals(), cells, 2.0).unwrap()
}

fn r(v: &[f64]) -> Vector {
    real_vector(v)
}

/// Dense sweep of `(S(x) - S(y))(x - y) / (x - y)^2` over a grid on the line.
fn grid_two_point_sup(t: &PwlOperator, half: f64) -> f64 {
    let pts: Vec<f64> = (0..=80).map(|k| -half + 2.0 * half * k as f64 / 80.0).collect();
    let mut best = 0.0f64;
    for &x in &pts {
        for &y in &pts {
            if x != y {
                let d = t.eval(&r(&[x])).unwrap()[0].re - t.eval(&r(&[y])).unwrap()[0].re;
                best = best.max((d * (x - y)).abs() / ((x - y) * (x - y)));
            }
        }
    }
    best
}

#[test]
fn absolute_value_validates_and_evaluates() {
    let t = abs_on_reals();
    let report = t.validate();
    assert!(report.passed, "{report:?}");
    assert!(report.facets_checked >= 1);
    assert_eq!(t.eval(&r(&[-2.5])).unwrap(), r(&[2.5]));
    assert_eq!(t.eval(&r(&[0.75])).unwrap(), r(&[0.75]));
    assert_eq!(t.eval(&r(&[0.0])).unwrap(), r(&[0.0]));
}

#[test]
fn absolute_value_norm_and_radius() {
    let t = abs_on_reals();
    assert!((t.lip_norm() - 1.0).abs() < 1e-12);
    let oracle = grid_two_point_sup(&t, 2.0);
    assert!((oracle - 1.0).abs() < 1e-12);
    let b = t.lip_radius(1e-6);
    assert!((b.upper - 1.0).abs() < 1e-9, "{b:?}");
    assert!((b.lower - oracle).abs() < 1e-9, "{b:?}");
    assert_eq!(b.upper_method, UpperMethod::CellSup);
    assert!(b.converged);
}

#[test]
fn derivative_detects_kinks() {
    let t = abs_on_reals();
    assert_eq!(t.gateaux_derivative(&r(&[0.0])).unwrap(), Derivative::NonSmooth);
    match t.gateaux_derivative(&r(&[-0.3])).unwrap() {
        Derivative::Linear(op) => assert_eq!(op.matrix()[(0, 0)].re, -1.0),
        d => panic!("expected a derivative, got {d:?}"),
    }
}

#[test]
fn clamp_radius_matches_grid_oracle() {
    let t = clamp_on_reals();
    assert!(t.validate().passed, "{:?}", t.validate());
    assert_eq!(t.eval(&r(&[3.0])).unwrap(), r(&[1.0]));
    assert_eq!(t.eval(&r(&[-0.4])).unwrap(), r(&[-0.4]));
    assert!((t.lip_norm() - 1.0).abs() < 1e-12);
    let oracle = grid_two_point_sup(&t, 3.0);
    let b = t.lip_radius(1e-6);
    assert!((b.upper - 1.0).abs() < 1e-9);
    assert!((b.lower - oracle).abs() < 1e-9, "{b:?} vs {oracle}");
    // The flat pieces never raise the bound.
    assert!(t.daugavet_gap(&AlphaGrid::real()) < 1e-9);
}

#[test]
fn relu_has_radius_one() {
    let t = PwlOperator::new(
        NormedSpace::reals(),
        vec![cell(&[1.0], &[0.0], &[0.0], 1), cell(&[-1.0], &[0.0], &[1.0], 1)],
        1.0,
    )
    .unwrap();
    assert!(t.validate().passed);
    let b = t.lip_radius(1e-6);
    assert!((b.lower - 1.0).abs() < 1e-9 && (b.upper - 1.0).abs() < 1e-9, "{b:?}");
}

#[test]
fn abs_2d_on_linf() {
    let t = abs_2d(NormedSpace::linf(2));
    assert!(t.validate().passed, "{:?}", t.validate());
    assert_eq!(t.eval(&r(&[-0.5, 0.25])).unwrap(), r(&[0.5, 0.25]));
    assert!((t.lip_norm() - 1.0).abs() < 1e-12);
    let b = t.lip_radius(1e-6);
    assert!(b.lower >= b.upper - 1e-6, "{b:?}");
    assert!((b.upper - 1.0).abs() < 1e-9);
}

#[test]
fn mismatched_facet_is_a_discontinuity() {
    let t = PwlOperator::new(
        NormedSpace::reals(),
        vec![
            cell(&[1.0], &[0.5], &[1.0], 1),
            Cell { c: m(1, 1, &[-1.0]), d: DVector::from_element(1, -0.5), a: m(1, 1, &[1.0]), b: DVector::from_element(1, 1.0) },
        ],
        1.0,
    )
    .unwrap();
    let report = t.validate();
    assert!(!report.passed);
    let f = report.failures.iter().find(|f| f.kind == FailureKind::Discontinuity).expect("discontinuity");
    assert_eq!(f.cells, vec![0, 1]);
    assert!((f.point[0] - 0.5).abs() < 1e-9);
}

#[test]
fn origin_offset_gaps_and_overlaps_are_reported() {
    let shifted = PwlOperator::new(
        NormedSpace::reals(),
        vec![Cell { c: DMatrix::zeros(0, 1), d: DVector::zeros(0), a: m(1, 1, &[1.0]), b: DVector::from_element(1, 0.1) }],
        1.0,
    )
    .unwrap();
    let kinds: Vec<FailureKind> = shifted.validate().failures.into_iter().map(|f| f.kind).collect();
    assert_eq!(kinds, vec![FailureKind::NonzeroAtOrigin]);

    let half = PwlOperator::new(NormedSpace::reals(), vec![cell(&[1.0], &[0.0], &[2.0], 1)], 1.0).unwrap();
    let report = half.validate();
    assert!(report.failures.iter().any(|f| f.kind == FailureKind::Uncovered && f.point[0] > 0.0));
    assert!(half.eval(&r(&[0.5])).is_err());

    let twice = PwlOperator::new(NormedSpace::reals(), vec![Cell::whole(m(1, 1, &[1.0])), Cell::whole(m(1, 1, &[1.0]))], 1.0).unwrap();
    assert!(twice.validate().failures.iter().any(|f| f.kind == FailureKind::Overlap));

    let empty = PwlOperator::new(
        NormedSpace::reals(),
        vec![cell(&[1.0, -1.0], &[-1.0, -1.0], &[1.0], 1), Cell::whole(m(1, 1, &[1.0]))],
        1.0,
    )
    .unwrap();
    let report = empty.validate();
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].kind, FailureKind::EmptyCell);
}

#[test]
fn rejects_complex_spaces_and_bad_shapes() {
    assert!(matches!(
        PwlOperator::new(NormedSpace::complex_l2(1), vec![Cell::whole(m(1, 1, &[1.0]))], 1.0),
        Err(Error::UnsupportedKind(_))
    ));
    assert!(matches!(
        PwlOperator::new(NormedSpace::l2(2), vec![Cell::whole(m(1, 1, &[1.0]))], 1.0),
        Err(Error::Dimension { .. })
    ));
    assert!(random_pwl(&NormedSpace::complex_l1(2), 1, 0).is_err());
    assert!(matches!(random_pwl(&NormedSpace::l1(2), 12, 0), Err(Error::Generation(_))));
    assert!(matches!(random_pwl_with_limit(&NormedSpace::l1(3), 3, 4, 2), Err(Error::Generation(_))));
}

#[test]
fn linear_operators_embed() {
    let op = LinearOperator::from_real(NormedSpace::l1(2), &m(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
    let t = PwlOperator::from_linear(&op).unwrap();
    assert!(t.validate().passed);
    assert!((t.lip_norm() - op.op_norm()).abs() < 1e-12);
    let x = r(&[0.3, -0.7]);
    assert_eq!(t.eval(&x).unwrap(), op.apply(&x).unwrap());
}

#[test]
fn json_round_trip_is_exact() {
    let t = random_pwl(&parse_space("linf:2").unwrap(), 2, 17).unwrap();
    let text = t.to_json();
    let back = PwlOperator::from_json(&text).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.to_json(), text);
    assert!(text.starts_with("{\"space\":\"linf:2\",\"cells\":[{\"C\":"));
    assert!(PwlOperator::from_json("{\"space\":\"l2:2\",\"cells\":[{\"C\":[[1]],\"d\":[0],\"A\":[[1,0],[0,1]],\"b\":[0,0]}],\"box_radius\":1}").is_err());
    assert!(PwlOperator::from_json("{\"space\":\"l2:\",\"cells\":[],\"box_radius\":1}").is_err());
}

#[test]
fn limit_sequence_bounds_radius() {
    let t = abs_2d(NormedSpace::l1(2));
    let seq = t.lip_radius_limit(&default_schedule(), &AlphaGrid::real()).unwrap();
    for w in seq.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{seq:?}");
    }
    assert!(seq.last().unwrap() + 1e-9 >= t.lip_radius(1e-6).upper);
}

fn small_space() -> impl Strategy<Value = NormedSpace> {
    prop_oneof![
        (1usize..=3).prop_map(NormedSpace::l1),
        (1usize..=3).prop_map(NormedSpace::linf),
        (1usize..=3).prop_map(NormedSpace::l2),
        any::<u64>().prop_map(NormedSpace::random_hexagon),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn generated_operators_validate(space in small_space(), pieces in 1usize..=2, seed in any::<u64>()) {
        let t = random_pwl(&space, pieces, seed).unwrap();
        let report = t.validate();
        prop_assert!(report.passed, "{:?}", report.failures);
        prop_assert!(t.cells().len() <= 9);
        prop_assert_eq!(t.eval(&space.zero()).unwrap(), space.zero());
    }

    #[test]
    fn sampled_bounds_respect_cells(space in small_space(), seed in any::<u64>()) {
        let t = random_pwl(&space, 2, seed).unwrap();
        let norm = t.lip_norm();
        let sampled = t.lip_norm_sampled(t.box_radius(), 400, seed).unwrap();
        prop_assert!(sampled <= norm + 1e-9, "{} > {}", sampled, norm);
        let b = t.lip_radius(1e-6);
        let (two_point, w) = t.two_point_radius_lower(200, seed);
        prop_assert!(two_point <= b.upper + 1e-9);
        prop_assert!(b.lower <= b.upper + 1e-9);
        prop_assert!((witness_value(&t, &w).unwrap() - two_point).abs() < 1e-9);
    }

    #[test]
    fn eval_is_continuous_across_facets(space in small_space(), seed in any::<u64>(), s in 0.0f64..1.0) {
        let t = random_pwl(&space, 2, seed).unwrap();
        let n = space.dim();
        // Walk a segment and compare the two one-sided maps wherever it crosses a cell boundary.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0) * t.box_radius());
        let q = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0) * t.box_radius());
        let x = &p * (1.0 - s) + &q * s;
        let live: Vec<usize> = t.live_cells().collect();
        let holders: Vec<usize> = live.iter().copied().filter(|&i| t.cells()[i].contains(&x, 1e-7)).collect();
        prop_assert!(!holders.is_empty());
        for &i in &holders {
            for &j in &holders {
                let gap = (t.cells()[i].value(&x) - t.cells()[j].value(&x)).amax();
                prop_assert!(gap <= 1e-6 * (1.0 + x.amax()), "gap {}", gap);
            }
        }
    }

    #[test]
    fn limit_sequence_is_nonincreasing(space in small_space(), seed in any::<u64>()) {
        let t = random_pwl(&space, 1, seed).unwrap();
        let seq = t.lip_radius_limit(&default_schedule(), &AlphaGrid::real()).unwrap();
        for w in seq.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "{:?}", seq);
        }
        prop_assert!(seq.last().unwrap() + 1e-6 >= t.lip_radius(1e-6).upper);
    }
}
