//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

use nalgebra::DMatrix;
use numradius::constructions::{diagonal_lift, segment_extension, DEFAULT_LIFT_CELLS};
use numradius::index::{
    bk_suite, ck_suite, curated_battery, rnp_equality_suite, sum_stability_suite, Status, VerificationReport,
};
use numradius::linop::default_schedule;
use numradius::lipop::random_pwl;
use numradius::{
    estimate_index, AlphaGrid, LinearOperator, Mode, NormedSpace, Operator, PwlOperator, SumKind, Vector, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.sample(StandardNormal))
}

fn real_point(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_fn(n, |_, _| C64::new(scale * r.sample::<f64, _>(StandardNormal), 0.0))
}

fn failures(r: &VerificationReport) -> Vec<String> {
    r.cases
        .iter()
        .filter(|c| c.status != Status::Pass)
        .map(|c| format!("{} [{}] value {:?} expected {}", c.name, c.status.as_str(), c.value, c.expected))
        .collect()
}

/// Max absolute row sum (l_inf) or column sum (l_1): the operator norm, computed directly.
fn induced_norm(m: &DMatrix<f64>, linf: bool) -> f64 {
    let sums: Vec<f64> = if linf {
        m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum()).collect()
    } else {
        m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum()).collect()
    };
    sums.into_iter().fold(0.0, f64::max)
}

fn hilbert_values() -> Outcome {
    let t = Instant::now();
    let e = estimate_index(&NormedSpace::l2(2), Mode::Linear, 10_000, 1).map_err(|e| e.to_string())?;
    let real_time = t.elapsed();
    ensure(e.upper <= 5e-3, || format!("real l2:2 estimate {}", e.upper))?;
    // Oracle: omega is the top |eigenvalue| of the symmetric part, the norm the top singular value.
    let Operator::Linear(w) = &e.witness else { return Err("real witness is not linear".into()) };
    let m = w.matrix().map(|z| z.re);
    let sym = (&m + m.transpose()) * 0.5;
    let omega = sym.symmetric_eigenvalues().iter().fold(0.0f64, |a, x| a.max(x.abs()));
    ensure(omega / m.singular_values().max() <= 5e-3, || "real witness fails the eigenvalue oracle".into())?;

    let t = Instant::now();
    let c = estimate_index(&NormedSpace::complex_l2(2), Mode::Linear, 10_000, 1).map_err(|e| e.to_string())?;
    let complex_time = t.elapsed();
    ensure((c.upper - 0.5).abs() <= 5e-3, || format!("complex l2:2 estimate {}", c.upper))?;
    // Oracle: omega = max over theta of the top eigenvalue of Re(e^{i theta} T).
    let Operator::Linear(w) = &c.witness else { return Err("complex witness is not linear".into()) };
    let m = w.matrix();
    let scan = (0..20_000)
        .map(|k| {
            let a = m * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 20_000.0);
            let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
            h.symmetric_eigenvalues().max()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let ratio = scan / m.singular_values().max();
    ensure(ratio <= c.upper + 1e-9 && (ratio - 0.5).abs() <= 5e-3, || format!("complex witness scan gives {ratio}"))?;
    let limit = Duration::from_secs(60);
    ensure(real_time < limit && complex_time < limit, || format!("runtimes {real_time:?}, {complex_time:?}"))?;
    Ok(format!("n(l2:2) <= {:.3e}, n(cl2:2) <= {:.6} ({real_time:.1?}, {complex_time:.1?})", e.upper, c.upper))
}

fn index_one_spaces() -> Outcome {
    let t = Instant::now();
    let (mut linear, mut pwl, mut worst) = (0, 0, f64::INFINITY);
    for n in 2..=4 {
        for (linf, space) in [(false, NormedSpace::l1(n)), (true, NormedSpace::linf(n))] {
            for k in 0..200u64 {
                let m = gaussian(&mut rng(n as u64, k), n, n);
                let norm = induced_norm(&m, linf);
                let op = LinearOperator::from_real(space.clone(), &m).map_err(|e| e.to_string())?;
                let b = op.numerical_radius(1e-9);
                worst = worst.min(b.lower / norm);
                ensure(b.lower >= norm * (1.0 - 5e-3), || format!("{space} operator {k}: omega >= {} < ||T|| = {norm}", b.lower))?;
                linear += 1;
            }
            let mut k = 0u64;
            let mut made = 0;
            while made < 100 {
                k += 1;
                let Ok(p) = random_pwl(&space, 1 + (k % 3) as usize, 1000 * n as u64 + k) else { continue };
                made += 1;
                let norm = p.live_cells().map(|i| induced_norm(&p.cells()[i].a, linf)).fold(0.0, f64::max);
                let b = p.lip_radius(1e-9);
                worst = worst.min(b.lower / norm);
                ensure(b.lower >= norm * (1.0 - 5e-3), || {
                    format!("{space} CPWL seed {}: omega >= {} < ||T||_L = {norm}\n{}", 1000 * n as u64 + k, b.lower, p.to_json())
                })?;
            }
            pwl += made;
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("runtime {elapsed:?}"))?;
    Ok(format!("{linear} linear + {pwl} CPWL operators, min omega/||T|| = {worst:.9} ({elapsed:.1?})"))
}

fn bohnenblust_karlin() -> Outcome {
    let mut detail = Vec::new();
    for space in [NormedSpace::complex_l2(2), NormedSpace::complex_l1(2)] {
        let r = bk_suite(&space, 200, 1).map_err(|e| e.to_string())?;
        ensure(r.cases.len() == 200, || format!("{space}: {} cases", r.cases.len()))?;
        let bad = failures(&r);
        ensure(bad.is_empty(), || format!("{space}: {}", bad.join("; ")))?;
        let min = r.cases.iter().filter_map(|c| c.value).fold(f64::INFINITY, f64::min);
        detail.push(format!("{space}: min omega/||T|| = {min:.6}"));
    }
    Ok(format!("{} (1/e = {:.6})", detail.join(", "), (-1f64).exp()))
}

fn limit_formula() -> Outcome {
    let battery = curated_battery();
    ensure(battery.len() >= 20, || format!("battery has {} operators", battery.len()))?;
    let schedule = default_schedule();
    let mut widest = 0.0f64;
    for e in &battery {
        let alphas = AlphaGrid::for_field(e.operator.space().field());
        let seq = e.operator.limit_sequence(&schedule, &alphas).map_err(|err| format!("{}: {err}", e.name))?;
        for (i, w) in seq.windows(2).enumerate() {
            // An ulp of slack: the exact sequence can be flat.
            ensure(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), || format!("{}: step {i} rises {} -> {}", e.name, w[0], w[1]))?;
        }
        let last = *seq.last().expect("nonempty schedule");
        let lower = e.operator.radius(1e-9).lower;
        ensure(last - lower <= 1e-3, || format!("{}: limit bound {last} vs lower {lower}", e.name))?;
        ensure(last >= lower - 1e-9, || format!("{}: limit bound {last} below lower {lower}", e.name))?;
        widest = widest.max(last - lower);
    }
    Ok(format!("{} operators, largest final gap {widest:.3e}", battery.len()))
}

fn cpwl_calculus() -> Outcome {
    let spaces = [
        NormedSpace::l1(2),
        NormedSpace::linf(2),
        NormedSpace::l2(2),
        NormedSpace::l1(3),
        NormedSpace::linf(3),
        NormedSpace::random_hexagon(5),
    ];
    let (mut done, mut seed) = (0usize, 0u64);
    let (mut norm_gap, mut radius_gap) = (0.0f64, 0.0f64);
    let mut findings = Vec::new();
    while done < 100 {
        seed += 1;
        let space = &spaces[seed as usize % spaces.len()];
        let Ok(p) = random_pwl(space, 1 + (seed % 2) as usize, seed) else { continue };
        if p.live_cells().count() > 9 {
            continue;
        }
        done += 1;
        let exact = p.lip_norm();
        let sampled = p.lip_norm_sampled(p.box_radius(), 2000, seed).map_err(|e| e.to_string())?;
        let upper = p.lip_radius(1e-9).upper;
        let (lower, witness) = p.two_point_radius_lower(2000, seed);
        norm_gap = norm_gap.max((exact - sampled).abs());
        radius_gap = radius_gap.max((upper - lower).abs());
        if (exact - sampled).abs() > 1e-3 || (upper - lower).abs() > 1e-3 {
            findings.push(format!(
                "seed {seed} on {space}: lip {exact} vs sampled {sampled}, radius {upper} vs {lower}, witness {}",
                serde_json::to_string(&witness).unwrap_or_default()
            ));
        }
    }
    ensure(findings.is_empty(), || findings.join("\n"))?;
    Ok(format!("{done} operators, max |lip - sampled| = {norm_gap:.3e}, max |cell sup - two-point| = {radius_gap:.3e}"))
}

fn daugavet() -> Outcome {
    let (mut pinned, mut separated) = (0, 0);
    for e in curated_battery() {
        let norm = e.operator.norm_bracket();
        let b = e.operator.radius(1e-9);
        let gap = e.operator.daugavet_gap();
        if b.lower >= norm.upper * (1.0 - 1e-9) {
            ensure(gap <= 1e-6, || format!("{}: omega = ||T|| but gap {gap}", e.name))?;
            pinned += 1;
        } else {
            ensure(b.upper < norm.lower - 1e-3, || format!("{}: omega neither pinned nor separated", e.name))?;
            ensure(gap >= 1e-3, || format!("{}: omega < ||T|| but gap {gap}", e.name))?;
            separated += 1;
        }
    }
    Ok(format!("{pinned} pinned with gap <= 1e-6, {separated} separated with gap >= 1e-3"))
}

fn constructions() -> Outcome {
    // Segment extension: exact endpoints and 10^4 pair checks over 20 instances.
    let pairs_of = [
        (NormedSpace::l1(2), NormedSpace::l2(2)),
        (NormedSpace::l2(3), NormedSpace::linf(2)),
        (NormedSpace::linf(2), NormedSpace::l1(3)),
        (NormedSpace::random_hexagon(3), NormedSpace::reals()),
        (NormedSpace::sum(NormedSpace::l2(2), NormedSpace::reals(), SumKind::L1).expect("real sum"), NormedSpace::l2(2)),
    ];
    let mut checks = 0;
    for i in 0..20u64 {
        let (dom, cod) = &pairs_of[i as usize % pairs_of.len()];
        let mut r = rng(7, i);
        let m = 0.5 + 1.5 * r.random::<f64>();
        let (x1, x2) = (real_point(&mut r, dom.dim(), 1.0), real_point(&mut r, dom.dim(), 1.0));
        let a = dom.norm(&(&x2 - &x1)).map_err(|e| e.to_string())?;
        let y1 = real_point(&mut r, cod.dim(), 1.0);
        let w = real_point(&mut r, cod.dim(), 1.0);
        let len = m * a * r.random::<f64>() / cod.norm(&w).map_err(|e| e.to_string())?;
        let y2 = &y1 + w * C64::new(len, 0.0);
        let f = segment_extension(dom, cod, (&x1, &x2), (&y1, &y2), m, i).map_err(|e| e.to_string())?;
        ensure(f.eval(&x1) == y1 && f.eval(&x2) == y2, || format!("instance {i}: endpoints not interpolated"))?;
        for _ in 0..500 {
            let u = real_point(&mut r, dom.dim(), 2.0);
            let v = if r.random::<bool>() { real_point(&mut r, dom.dim(), 2.0) } else { &u + real_point(&mut r, dom.dim(), 0.05) };
            let d = dom.norm(&(&u - &v)).map_err(|e| e.to_string())?;
            let q = cod.norm(&(f.eval(&u) - f.eval(&v))).map_err(|e| e.to_string())?;
            ensure(q <= m * d * (1.0 + 1e-9) + 1e-15, || format!("instance {i}: |F(u) - F(v)| = {q} > {m} * {d}"))?;
            checks += 1;
        }
    }

    // Witness boosting on l_inf^3.
    let ck = ck_suite(100, 1).map_err(|e| e.to_string())?;
    ensure(ck.cases.len() == 100, || format!("ck ran {} instances", ck.cases.len()))?;
    let bad = failures(&ck);
    ensure(bad.is_empty(), || format!("ck: {}", bad.join("; ")))?;
    let ck_min = ck.cases.iter().filter_map(|c| c.value).fold(f64::INFINITY, f64::min);

    // Diagonal lift to l_1^2(X).
    let bases = [NormedSpace::reals(), NormedSpace::l1(2), NormedSpace::linf(2), NormedSpace::l2(2), NormedSpace::random_hexagon(9)];
    let (mut lifts, mut seed, mut worst) = (0, 0u64, 0.0f64);
    while lifts < 50 {
        seed += 1;
        let base = &bases[seed as usize % bases.len()];
        let pieces = if base.dim() == 1 { 1 } else { 1 + (seed % 2) as usize };
        let Ok(s) = random_pwl(base, pieces, seed) else { continue };
        let lifted: PwlOperator = diagonal_lift(&s, 2, DEFAULT_LIFT_CELLS).map_err(|e| format!("lift {seed}: {e}"))?;
        lifts += 1;
        let (l0, l1) = (s.lip_norm(), lifted.lip_norm());
        ensure((l0 - l1).abs() <= 1e-12 * l0.max(1.0), || format!("lift {seed} on {base}: lip {l0} -> {l1}"))?;
        let (b0, b1) = (s.lip_radius(1e-9), lifted.lip_radius(1e-9));
        let d = (b0.lower - b1.lower).abs().max((b0.upper - b1.upper).abs());
        worst = worst.max(d);
        ensure(d <= 1e-3, || format!("lift {seed} on {base}: [{}, {}] -> [{}, {}]", b0.lower, b0.upper, b1.lower, b1.upper))?;
    }
    Ok(format!(
        "extension: 20 instances, {checks} pair checks; boost: min value/||T||_L = {ck_min:.6}; lift: {lifts} instances, max bracket shift {worst:.3e}"
    ))
}

fn sum_stability() -> Outcome {
    let mut detail = Vec::new();
    for (x, y) in [(NormedSpace::l2(2), NormedSpace::reals()), (NormedSpace::reals(), NormedSpace::reals())] {
        for kind in [SumKind::Linf, SumKind::L1] {
            let r = sum_stability_suite(&x, &y, kind, 10_000, 1).map_err(|e| e.to_string())?;
            let bad = failures(&r);
            ensure(bad.is_empty(), || format!("({x}, {y}, {kind:?}): {}", bad.join("; ")))?;
            let z = r.cases[0].value.unwrap_or(f64::NAN);
            let c = r.cases.iter().find(|c| c.name.starts_with("compressed")).and_then(|c| c.value).unwrap_or(f64::NAN);
            detail.push(format!("{kind:?}({x},{y}): Z {z:.2e}, compressed {c:.2e}").to_lowercase());
        }
    }
    Ok(detail.join("; "))
}

fn rnp_equality() -> Outcome {
    let mut detail = Vec::new();
    let spaces = [
        ("l2:2", NormedSpace::l2(2)),
        ("l1:3", NormedSpace::l1(3)),
        ("linf:3", NormedSpace::linf(3)),
        ("random hexagon 4", NormedSpace::random_hexagon(4)),
    ];
    for (label, space) in spaces {
        let r = rnp_equality_suite(&space, 10_000, 1).map_err(|e| e.to_string())?;
        let bad = failures(&r);
        ensure(bad.is_empty(), || format!("{label}: {}", bad.join("; ")))?;
        detail.push(format!("{label}: {} cases", r.cases.len()));
    }
    Ok(detail.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 Hilbert values", hilbert_values),
        ("2 index-one spaces", index_one_spaces),
        ("3 Bohnenblust-Karlin bound", bohnenblust_karlin),
        ("4 limit-formula consistency", limit_formula),
        ("5 CPWL derivative calculus", cpwl_calculus),
        ("6 Daugavet equivalence", daugavet),
        ("7 constructions", constructions),
        ("8 sum stability", sum_stability),
        ("9 RNP equality", rnp_equality),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{:.1?}]", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{:.1?}]", t.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
