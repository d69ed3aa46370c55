//! The acceptance suite: one line per criterion, nonzero exit on failure.

use std::process::Command;
use std::time::{Duration, Instant};

use cadlift::arith::{isolate_real_roots, rat, Interval, MPoly, Rat, UPoly, VarOrder};
use cadlift::chains::SamplePoint;
use cadlift::lifting::{
    build_cad, check_well_oriented, minimal_delineating_polynomial, BuildOptions, Cad, Cell,
    CellIndex, Orientation,
};
use cadlift::projection::OperatorKind;
use cadlift::verify::{
    count_real_roots, sturm_count, verify_cylindricity, verify_partition, verify_preprocessing,
    verify_sign_invariance,
};
use cadlift_cli::parse::{parse_input, JobSpec};
use cadlift_cli::run_job;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240611;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn order(names: &[&str]) -> VarOrder {
    VarOrder::new(names.iter().copied()).unwrap()
}

fn build(f: &[MPoly], order: &VarOrder, op: OperatorKind) -> Result<Cad, String> {
    build_cad(f, order, op, &BuildOptions::default())
        .map_err(|e| e.to_string())?
        .into_cad()
        .ok_or_else(|| "unexpected FAIL".to_string())
}

fn circle() -> MPoly {
    let x = MPoly::var(2, 0);
    let y = MPoly::var(2, 1);
    &(&x.pow(2) + &y.pow(2)) - &MPoly::constant(2, rat(1))
}

fn line() -> MPoly {
    &MPoly::var(2, 1) - &MPoly::var(2, 0)
}

/// A random polynomial in `x, y` of total degree at most 3 that involves `y`.
fn random_poly(rng: &mut ChaCha8Rng) -> MPoly {
    loop {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(2..=5) {
            let i = rng.gen_range(0..=3u32);
            let j = rng.gen_range(0..=3 - i);
            let c = rng.gen_range(-5..=5i64);
            terms.push((vec![i, j], rat(c)));
        }
        let p = MPoly::from_terms(2, terms);
        if p.degree(1) > 0 {
            return p;
        }
    }
}

fn random_systems(seed: u64, count: usize) -> Vec<Vec<MPoly>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..rng.gen_range(1..=2))
                .map(|_| random_poly(&mut rng))
                .collect()
        })
        .collect()
}

fn job_source(f: &[MPoly], order: &VarOrder, extra: &str) -> String {
    let mut s = format!("vars: {}\n", order.names().join(", "));
    for p in f {
        s.push_str(&format!("poly: {}\n", p.display(order)));
    }
    s.push_str(extra);
    s
}

/// The decompositions built by criteria 1 to 3, shared by 4, 6 and 8.
struct Built {
    name: String,
    cad: Cad,
}

fn criterion1(built: &mut Vec<Built>) -> Outcome {
    let start = Instant::now();
    let cad = build(&[circle()], &order(&["x", "y"]), OperatorKind::McCallum)?;
    let elapsed = start.elapsed();
    let level1 = cad.levels[0].len();
    let sizes = cad.stack_sizes(1);
    ensure(cad.num_cells() == 13, || {
        format!("{} cells", cad.num_cells())
    })?;
    ensure(level1 == 5, || format!("{level1} cells in R^1"))?;
    ensure(sizes == [1, 3, 5, 3, 1], || {
        format!("stack sizes {sizes:?}")
    })?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    built.push(Built {
        name: "circle/mccallum".into(),
        cad,
    });
    Ok(format!(
        "13 cells, 5 in R^1, stacks {sizes:?}, {elapsed:.2?}"
    ))
}

fn criterion2(built: &mut Vec<Built>) -> Outcome {
    let xy = order(&["x", "y"]);
    let mut systems = vec![vec![circle()]];
    systems.extend(random_systems(SEED, 10));
    let mut slowest = Duration::ZERO;
    for (i, f) in systems.iter().enumerate() {
        let start = Instant::now();
        let mc = build(f, &xy, OperatorKind::McCallum).map_err(|e| format!("system {i}: {e}"))?;
        let co = build(f, &xy, OperatorKind::Collins).map_err(|e| format!("system {i}: {e}"))?;
        ensure(co.num_cells() >= mc.num_cells(), || {
            format!(
                "system {i}: collins {} < mccallum {}",
                co.num_cells(),
                mc.num_cells()
            )
        })?;
        for (name, cad) in [("mccallum", &mc), ("collins", &co)] {
            let r = verify_sign_invariance(cad, f, 5, SEED);
            ensure(r.passed(), || {
                format!("system {i} {name}: {:?}", r.checks[0].counterexample)
            })?;
        }
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure(elapsed < Duration::from_secs(10), || {
            format!("system {i} took {elapsed:?}")
        })?;
        built.push(Built {
            name: format!("system {i}/mccallum"),
            cad: mc,
        });
        built.push(Built {
            name: format!("system {i}/collins"),
            cad: co,
        });
    }
    Ok(format!(
        "{} systems, collins >= mccallum, 0 violations, slowest {slowest:.2?}",
        systems.len()
    ))
}

/// `g` divides a product of members of `set`, as univariate polynomials.
fn divides_product(g: &MPoly, set: &[MPoly]) -> bool {
    let Some(g) = g.to_upoly(0) else { return false };
    let prod = set
        .iter()
        .filter_map(|p| p.to_upoly(0))
        .fold(UPoly::from_ints(&[1]), |a, b| a.mul(&b));
    prod.rem(&g.squarefree()).is_zero()
}

fn criterion3(built: &mut Vec<Built>) -> Outcome {
    let xy = order(&["x", "y"]);
    let f = [circle(), line()];
    let full = build(&f, &xy, OperatorKind::McCallum)?;
    let ec = build(&f, &xy, OperatorKind::McCallumReducedEC(0))?;
    for g in &ec.proj.levels[0] {
        ensure(divides_product(g, &full.proj.levels[0]), || {
            format!("{} not in the full projection", g.display(&xy))
        })?;
    }
    ensure(ec.num_cells() <= full.num_cells(), || {
        format!("ec {} > full {}", ec.num_cells(), full.num_cells())
    })?;
    let r = verify_sign_invariance(&ec, &[circle()], 5, SEED);
    ensure(r.passed(), || format!("{:?}", r.checks[0].counterexample))?;
    let msg = format!(
        "reduced projection {} within full {}, cells {} <= {}, ec sign-invariant over {} samples",
        ec.proj.levels[0].len(),
        full.proj.levels[0].len(),
        ec.num_cells(),
        full.num_cells(),
        r.samples_used
    );
    built.push(Built {
        name: "circle-line/full".into(),
        cad: full,
    });
    built.push(Built {
        name: "circle-line/ec".into(),
        cad: ec,
    });
    Ok(msg)
}

fn criterion4(built: &[Built]) -> Outcome {
    let mut cells = 0;
    for b in built {
        let r = verify_preprocessing(&b.cad).map_err(|e| format!("{}: {e}", b.name))?;
        ensure(r.passed(), || {
            format!("{}: {:?}", b.name, r.checks[0].counterexample)
        })?;
        cells += r.samples_used;
    }
    Ok(format!(
        "{cells} zero-dimensional base cells over {} decompositions, 0 violations",
        built.len()
    ))
}

fn cadlift(args: &[&str]) -> (Option<i32>, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_cadlift"))
        .args(args)
        .output()
        .unwrap();
    (
        o.status.code(),
        String::from_utf8_lossy(&o.stdout).into_owned(),
    )
}

fn criterion5() -> Outcome {
    // The literal fixture over the 0-dimensional cell x = 0.
    let x = MPoly::var(2, 0);
    let y = MPoly::var(2, 1);
    let p = &(&x * &y.pow(2)) + &x;
    let cell = Cell {
        index: CellIndex::new(vec![2]),
        sample: SamplePoint::from_rationals(2, &[rat(0)]),
        parent: None,
    };
    ensure(
        check_well_oriented(&cell, std::slice::from_ref(&p), OperatorKind::McCallum)
            == Orientation::Nullified(vec![p.clone()]),
        || "x*y^2 + x not reported nullified over x = 0".into(),
    )?;
    let d = minimal_delineating_polynomial(&p, &cell).map_err(|e| e.to_string())?;
    let expect = &y.pow(2) + &MPoly::constant(2, rat(1));
    ensure(d.as_ref() == Some(&expect), || {
        format!("delineating polynomial {d:?}")
    })?;
    let (code, _) = cadlift(&["--vars", "x,y", "--poly", "x*y^2 + x"]);
    ensure(code == Some(0), || format!("x*y^2 + x exit {code:?}"))?;

    // A primitive fixture nullified on the 0-dimensional cell x = y = 0.
    let xyz = order(&["x", "y", "z"]);
    let q = &(&MPoly::var(3, 0) * &MPoly::var(3, 2)) + &MPoly::var(3, 1);
    let cad = build(&[q], &xyz, OperatorKind::McCallum)?;
    let delineated = cad.stacks[2].iter().any(|s| {
        let c = &cad.levels[1][s.base.unwrap()];
        c.dimension() == 0
            && matches!(
                check_well_oriented(c, &cad.proj.levels[2], OperatorKind::McCallum),
                Orientation::Nullified(_)
            )
            && s.lifting.polys.len() > cad.proj.levels[2].len()
    });
    ensure(delineated, || {
        "x*z + y never lifted with a delineating polynomial".into()
    })?;
    let r = verify_partition(&cad, 200, (&rat(-3), &rat(3)), SEED);
    ensure(r.passed(), || {
        format!("x*z + y: {:?}", r.checks[0].counterexample)
    })?;
    let (code, _) = cadlift(&["--vars", "x,y,z", "--poly", "x*z + y"]);
    ensure(code == Some(0), || format!("x*z + y exit {code:?}"))?;

    // Nullified on the 1-dimensional cell y = z = 0.
    let (code, out) = cadlift(&["--vars", "x,y,z,w", "--poly", "y*w + z"]);
    ensure(code == Some(1) && out.starts_with("FAIL cell "), || {
        format!("y*w + z exit {code:?}: {out}")
    })?;
    let (code, _) = cadlift(&[
        "--vars",
        "x,y,z,w",
        "--poly",
        "y*w + z",
        "--operator",
        "collins",
    ]);
    ensure(code == Some(0), || format!("collins exit {code:?}"))?;
    Ok(format!(
        "delineating path taken and completes, {} FAIL exit 1, collins completes",
        out.trim()
    ))
}

fn partition_and_cylindricity(name: &str, cad: &Cad, seed: u64) -> Result<(), String> {
    let r =
        verify_partition(cad, 1000, (&rat(-10), &rat(10)), seed).merge(verify_cylindricity(cad));
    for c in &r.checks {
        ensure(c.passed, || {
            format!("{name} {}: {:?}", c.name, c.counterexample)
        })?;
    }
    Ok(())
}

fn criterion6(built: &[Built]) -> Outcome {
    let start = Instant::now();
    for b in built {
        partition_and_cylindricity(&b.name, &b.cad, SEED)?;
    }
    let xy = order(&["x", "y"]);
    let systems = random_systems(SEED + 1, 20);
    for (i, f) in systems.iter().enumerate() {
        let cad = build(f, &xy, OperatorKind::McCallum).map_err(|e| format!("random {i}: {e}"))?;
        partition_and_cylindricity(&format!("random {i}"), &cad, SEED)?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} decompositions, 1000 points each, 0 violations, {elapsed:.2?}",
        built.len() + systems.len()
    ))
}

fn certified(p: &UPoly, iv: &Interval) -> bool {
    if iv.is_point() {
        return p.eval(&iv.lo) == Rat::from_integer(0.into());
    }
    let q = p.squarefree();
    let (a, b) = (q.sign_at(&iv.lo), q.sign_at(&iv.hi));
    a != 0 && b != 0 && a != b && sturm_count(p, Some(&iv.lo), Some(&iv.hi)) == 1
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut roots = 0;
    for t in 0..200 {
        let deg = rng.gen_range(1..=8usize);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-10..=10)).collect();
        if c[deg] == 0 {
            c[deg] = 1;
        }
        // Repeated factors now and then.
        let mut p = UPoly::from_ints(&c);
        if t % 5 == 0 {
            p = p.mul(&UPoly::from_ints(&c[..2.min(c.len())]).mul(&UPoly::from_ints(&[1, 1])));
        }
        let ivs = isolate_real_roots(&p).map_err(|e| e.to_string())?;
        let expect = count_real_roots(&p);
        ensure(ivs.len() == expect, || {
            format!("{c:?}: {} intervals, sturm {expect}", ivs.len())
        })?;
        for (i, a) in ivs.iter().enumerate() {
            ensure(certified(&p, a), || {
                format!("{c:?}: interval {i} not certified")
            })?;
            for b in &ivs[i + 1..] {
                ensure(a.is_disjoint(b), || format!("{c:?}: overlapping intervals"))?;
            }
        }
        roots += expect;
    }
    Ok(format!(
        "200 polynomials, {roots} roots, counts match sturm, disjoint and certified"
    ))
}

fn criterion8() -> Outcome {
    let xy = order(&["x", "y"]);
    let mut jobs: Vec<JobSpec> = Vec::new();
    let mut add = |f: &[MPoly], extra: &str| {
        jobs.push(parse_input(&job_source(f, &xy, extra)).unwrap());
    };
    add(&[circle()], "output: json\nverify: 5\n");
    add(&[circle(), line()], "output: json\nec: 1\nverify: 5\n");
    for f in random_systems(SEED, 10) {
        add(&f, "output: json\nverify: 5\noperator: collins\n");
        add(&f, "output: json\nverify: 5\n");
    }
    let seeded = format!("output: json\nverify: 2\nseed: {SEED}\n");
    jobs.push(
        parse_input(&job_source(
            &[&(&MPoly::var(3, 0) * &MPoly::var(3, 2)) + &MPoly::var(3, 1)],
            &order(&["x", "y", "z"]),
            &seeded,
        ))
        .unwrap(),
    );
    for (i, job) in jobs.iter().enumerate() {
        let a = run_job(job, false);
        let b = run_job(job, false);
        let c = run_job(job, true);
        ensure(a.code == 0, || {
            format!("job {i} exit {}: {}", a.code, a.stderr)
        })?;
        ensure(a.stdout == b.stdout, || {
            format!("job {i}: repeated runs differ")
        })?;
        ensure(a.stdout == c.stdout, || {
            format!("job {i}: parallel run differs")
        })?;
    }
    Ok(format!(
        "{} jobs, byte-identical JSON across repeats and parallel lifting",
        jobs.len()
    ))
}

fn report(n: usize, name: &str, start: Instant, result: Outcome) -> bool {
    let t = start.elapsed();
    match result {
        Ok(msg) => {
            println!("criterion {n} ({name}): PASS {msg} [{t:.2?}]");
            true
        }
        Err(msg) => {
            println!("criterion {n} ({name}): FAIL {msg} [{t:.2?}]");
            false
        }
    }
}

fn main() {
    let mut built = Vec::new();
    let mut ok = true;
    let t = Instant::now();
    ok &= report(1, "circle fixture", t, criterion1(&mut built));
    let t = Instant::now();
    ok &= report(2, "operator comparison", t, criterion2(&mut built));
    let t = Instant::now();
    ok &= report(3, "equational constraint", t, criterion3(&mut built));
    let t = Instant::now();
    ok &= report(4, "preprocessing", t, criterion4(&built));
    let t = Instant::now();
    ok &= report(5, "well-orientedness", t, criterion5());
    let t = Instant::now();
    ok &= report(6, "partition and cylindricity", t, criterion6(&built));
    let t = Instant::now();
    ok &= report(7, "root isolation", t, criterion7());
    let t = Instant::now();
    ok &= report(8, "determinism", t, criterion8());
    if !ok {
        std::process::exit(1);
    }
}
