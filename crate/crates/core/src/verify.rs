//! Independent checks of a decomposition: point location, sampled sign
//! invariance, partition and cylindricity, and a Sturm-sequence root
//! counter used as an oracle for isolation.
//!
//! Roots are re-derived here from the lifting polynomials stored with each
//! stack; nothing from the construction beyond the stored cells is trusted.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{rat, MPoly, Rat, UPoly};
use crate::chains::{FiberRoot, SamplePoint};
use crate::error::{Error, Result};
use crate::lifting::{fiber_root_set, preprocess, Cad, Cell, Stack};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Check {
            name: name.to_string(),
            passed: true,
            violations: 0,
            counterexample: None,
        }
    }

    fn fail(&mut self, why: String) {
        self.passed = false;
        self.violations += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(why);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub seed: u64,
    pub samples_used: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        self.checks.extend(other.checks);
        self.samples_used += other.samples_used;
        self
    }
}

// Sturm sequences.

/// Sturm sequence of `p`: `p, p', -rem(p, p'), ...`.
pub fn sturm_sequence(p: &UPoly) -> Vec<UPoly> {
    let mut seq = vec![p.clone()];
    if p.degree() == 0 {
        return seq;
    }
    seq.push(p.derivative());
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            return seq;
        }
        seq.push(r.neg());
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_at_infinity(p: &UPoly, positive: bool) -> i8 {
    let s = if p.lc().is_positive() { 1 } else { -1 };
    if positive || p.degree().is_multiple_of(2) {
        s
    } else {
        -s
    }
}

/// Number of distinct real roots of `p` in `(a, b]`, where `None` stands
/// for the corresponding infinity and `a` is not a root.
pub fn sturm_count(p: &UPoly, a: Option<&Rat>, b: Option<&Rat>) -> usize {
    if p.is_zero() || p.degree() == 0 {
        return 0;
    }
    let seq = sturm_sequence(&p.squarefree());
    let at = |x: Option<&Rat>, positive: bool| match x {
        Some(x) => variations(seq.iter().map(|q| q.sign_at(x))),
        None => variations(seq.iter().map(|q| sign_at_infinity(q, positive))),
    };
    at(a, false).saturating_sub(at(b, true))
}

/// Number of distinct real roots of `p`.
pub fn count_real_roots(p: &UPoly) -> usize {
    sturm_count(p, None, None)
}

// Point location.

fn fiber_at_rationals(p: &MPoly, prefix: &[Rat]) -> MPoly {
    let mut vals = vec![None; p.nvars()];
    for (v, q) in prefix.iter().enumerate() {
        vals[v] = Some(q.clone());
    }
    p.subst_many(&vals)
}

/// The squarefree product of the nonzero fibers of a stack's polynomials
/// over a rational prefix, with its Sturm sequence.
#[derive(Clone)]
struct StackFiber {
    fiber: UPoly,
    seq: Vec<UPoly>,
}

impl StackFiber {
    fn new(stack: &Stack, prefix: &[Rat]) -> Self {
        let v = prefix.len();
        let mut prod = UPoly::new(vec![rat(1)]);
        for p in &stack.lifting.polys {
            let f = fiber_at_rationals(p, prefix);
            if f.is_zero() {
                continue;
            }
            let u = f
                .to_upoly(v)
                .expect("fiber over a rational prefix is univariate");
            prod = prod.mul(&u);
        }
        let fiber = prod.squarefree();
        let seq = sturm_sequence(&fiber);
        StackFiber { fiber, seq }
    }

    fn variations_at(&self, x: Option<&Rat>) -> usize {
        match x {
            Some(x) => variations(self.seq.iter().map(|q| q.sign_at(x))),
            None => variations(self.seq.iter().map(|q| sign_at_infinity(q, false))),
        }
    }

    fn roots(&self) -> usize {
        if self.fiber.degree() == 0 {
            return 0;
        }
        let hi = variations(self.seq.iter().map(|q| sign_at_infinity(q, true)));
        self.variations_at(None) - hi
    }

    /// Whether `q` is a root, and the number of roots strictly below it.
    fn locate(&self, q: &Rat) -> (bool, u32) {
        if self.fiber.degree() == 0 {
            return (false, 0);
        }
        let root = self.fiber.eval(q).is_zero();
        let upto = self.variations_at(None) - self.variations_at(Some(q));
        (root, (upto - usize::from(root)) as u32)
    }
}

/// The cell entry of a point with the given location in its stack
/// (sections even, sectors odd).
fn position((root, below): (bool, u32)) -> u32 {
    if root {
        2 * (below + 1)
    } else {
        2 * below + 1
    }
}

/// Membership of a point with the given location in entry `e` of its
/// stack, decided on its own.
fn member((root, below): (bool, u32), e: u32) -> bool {
    if e.is_multiple_of(2) {
        root && below == e / 2 - 1
    } else {
        !root && below == (e - 1) / 2
    }
}

type FiberCache = HashMap<(usize, Option<usize>, Vec<Rat>), StackFiber>;

fn stack_of(cad: &Cad, level: usize, base: Option<usize>) -> Result<&Stack> {
    cad.stack_over(level, base).ok_or_else(|| {
        Error::MalformedCad(format!("no stack at level {} over {:?}", level + 1, base))
    })
}

/// Positions (per level) of the cells containing `pt`, checking every
/// sibling along the way.
fn locate_path(cad: &Cad, pt: &[Rat], cache: &mut FiberCache) -> Result<Vec<usize>> {
    if pt.len() != cad.nvars() {
        return Err(Error::MalformedCad(format!(
            "point has {} coordinates, decomposition has {}",
            pt.len(),
            cad.nvars()
        )));
    }
    let mut path = Vec::with_capacity(pt.len());
    let mut base = None;
    for level in 0..pt.len() {
        let stack = stack_of(cad, level, base)?;
        let fiber = cache
            .entry((level, base, pt[..level].to_vec()))
            .or_insert_with(|| StackFiber::new(stack, &pt[..level]));
        let sections = fiber.roots();
        if sections != stack.sections() {
            return Err(Error::MalformedCad(format!(
                "stack at level {} has {} sections, its polynomials have {} roots here",
                level + 1,
                stack.sections(),
                sections
            )));
        }
        let loc = fiber.locate(&pt[level]);
        let e = position(loc);
        let mut members = Vec::new();
        for i in stack.cells.clone() {
            let cell = cad.levels[level].get(i).ok_or_else(|| {
                Error::MalformedCad(format!("stack at level {} runs past its cells", level + 1))
            })?;
            if member(loc, *cell.index.entries().last().unwrap()) {
                members.push(i);
            }
        }
        let i = stack.cells.start + e as usize - 1;
        if members != [i] || !stack.cells.contains(&i) {
            return Err(Error::MalformedCad(format!(
                "point lies in {} cells of a stack at level {}",
                members.len(),
                level + 1
            )));
        }
        path.push(i);
        base = Some(i);
    }
    Ok(path)
}

/// The cell containing a rational point.
pub fn locate_point<'a>(cad: &'a Cad, pt: &[Rat]) -> Result<&'a Cell> {
    let path = locate_path(cad, pt, &mut FiberCache::new())?;
    let last = *path.last().ok_or(Error::NothingToDecompose)?;
    Ok(&cad.levels[pt.len() - 1][last])
}

// Sampling inside cells.

fn is_nullified(sp: &mut SamplePoint, f: &MPoly, v: usize) -> bool {
    f.coeffs(v).iter().all(|c| sp.sign_at(c) == 0)
}

/// Distinct real roots of the nonzero fibers of the stack polynomials over
/// an algebraic point.
fn roots_over(sp: &mut SamplePoint, stack: &Stack, v: usize) -> Result<Vec<FiberRoot>> {
    fiber_root_set(sp, &stack.lifting.polys, v)
}

fn random_between(rng: &mut ChaCha8Rng, lo: &Rat, hi: &Rat) -> Rat {
    let k: i64 = rng.gen_range(1..1024);
    lo + (hi - lo) * Rat::new(BigInt::from(k), BigInt::from(1024))
}

/// Points over prefixes made of sections only, with their fiber roots; such
/// points do not depend on the random draws.
type RootCache = HashMap<Vec<usize>, (SamplePoint, Vec<FiberRoot>)>;

/// A random point of the cell at `path` (positions per level), with
/// sector coordinates drawn from their gaps and section coordinates exact.
fn perturbed_point(
    cad: &Cad,
    path: &[usize],
    rng: &mut ChaCha8Rng,
    cache: &mut RootCache,
) -> Result<SamplePoint> {
    let n = path.len();
    let mut sp = SamplePoint::origin(cad.nvars());
    let mut base = None;
    let mut exact = true;
    for (level, &i) in path.iter().enumerate() {
        let stack = stack_of(cad, level, base)?;
        let key = path[..level].to_vec();
        let roots = match cache.get(&key) {
            Some((p, r)) if exact => {
                sp = p.clone();
                r.clone()
            }
            _ => {
                let mut r = roots_over(&mut sp, stack, level)?;
                for _ in 0..4 {
                    for root in r.iter_mut() {
                        sp.refine_root(root, level);
                    }
                }
                if exact {
                    cache.insert(key, (sp.clone(), r.clone()));
                }
                r
            }
        };
        if roots.len() != stack.sections() {
            return Err(Error::MalformedCad(format!(
                "cell {}: {} sections stored, {} found at a nearby point",
                cad.levels[level][i].index,
                stack.sections(),
                roots.len()
            )));
        }
        let e = *cad.levels[level][i].index.entries().last().unwrap() as usize;
        exact &= e.is_multiple_of(2);
        if e.is_multiple_of(2) {
            sp = sp.push_root(level, roots[e / 2 - 1].clone());
        } else {
            let k = (e - 1) / 2;
            let width = rat(4);
            let (lo, hi) = match (k.checked_sub(1).map(|j| &roots[j]), roots.get(k)) {
                (None, None) => (-width.clone(), width),
                (Some(l), None) => (l.iv.hi.clone(), &l.iv.hi + &width),
                (None, Some(r)) => (&r.iv.lo - &width, r.iv.lo.clone()),
                (Some(l), Some(r)) => (l.iv.hi.clone(), r.iv.lo.clone()),
            };
            sp = sp.push_rational(level, random_between(rng, &lo, &hi));
        }
        base = Some(i);
    }
    debug_assert_eq!(sp.level(), n);
    Ok(sp)
}

/// Position path from the root to leaf `i`.
fn path_to(cad: &Cad, i: usize) -> Vec<usize> {
    let n = cad.nvars();
    let mut path = vec![i];
    for level in (1..n).rev() {
        let p = cad.levels[level][*path.last().unwrap()].parent.unwrap();
        path.push(p);
    }
    path.reverse();
    path
}

/// For every leaf cell, `k` random points of the cell must give each
/// polynomial of `f` the sign it has at the cell's sample.
pub fn verify_sign_invariance(cad: &Cad, f: &[MPoly], k: usize, seed: u64) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = Check::new("sign-invariance");
    let mut used = 0;
    let mut cache = RootCache::new();
    for (i, cell) in cad.leaves().iter().enumerate() {
        if k == 0 {
            break;
        }
        let mut sample = cell.sample.clone();
        let signs: Vec<i8> = f.iter().map(|p| sample.sign_at(p)).collect();
        let path = path_to(cad, i);
        for _ in 0..k {
            used += 1;
            let mut pt = match perturbed_point(cad, &path, &mut rng, &mut cache) {
                Ok(pt) => pt,
                Err(e) => {
                    check.fail(format!("cell {}: {e}", cell.index));
                    continue;
                }
            };
            for (p, &s) in f.iter().zip(&signs) {
                let t = pt.sign_at(p);
                if t != s {
                    check.fail(format!(
                        "cell {}: {p} has sign {s} at the sample and {t} at {:?}",
                        cell.index,
                        pt.approximate()
                    ));
                }
            }
        }
    }
    VerificationReport {
        checks: vec![check],
        seed,
        samples_used: used,
    }
}

/// Random rational points of the box `[lo, hi]^n` must each lie in exactly
/// one cell.
pub fn verify_partition(
    cad: &Cad,
    trials: usize,
    region: (&Rat, &Rat),
    seed: u64,
) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = Check::new("partition");
    let (lo, hi) = region;
    let mut cache = FiberCache::new();
    for _ in 0..trials {
        let pt: Vec<Rat> = (0..cad.nvars())
            .map(|_| {
                // Integers and simple fractions hit sections now and then.
                let d: i64 = [1, 2, 4, 1024][rng.gen_range(0..4)];
                let span = ((hi - lo) * Rat::from_integer(BigInt::from(d)))
                    .floor()
                    .to_integer();
                let steps = span.to_string().parse::<i64>().unwrap_or(i64::MAX);
                let k = rng.gen_range(0..=steps);
                lo + Rat::new(BigInt::from(k), BigInt::from(d))
            })
            .collect();
        if let Err(e) = locate_path(cad, &pt, &mut cache) {
            let shown: Vec<String> = pt.iter().map(|q| q.to_string()).collect();
            check.fail(format!("({}): {e}", shown.join(", ")));
        }
    }
    VerificationReport {
        checks: vec![check],
        seed,
        samples_used: trials,
    }
}

/// Structural cylindricity: parent links, index prefixes, stack shape, and
/// strictly increasing last coordinates of the samples within each stack.
pub fn verify_cylindricity(cad: &Cad) -> VerificationReport {
    let mut check = Check::new("cylindricity");
    for (level, stacks) in cad.stacks.iter().enumerate() {
        let cells = &cad.levels[level];
        let mut next = 0;
        let mut bases = Vec::new();
        for s in stacks {
            if s.cells.start != next {
                check.fail(format!("level {}: stacks do not tile the cells", level + 1));
            }
            next = s.cells.end;
            bases.push(s.base);
            if s.cells.len() % 2 != 1 {
                check.fail(format!("level {}: stack of even size", level + 1));
            }
            let base_index = match s.base {
                None if level == 0 => crate::lifting::CellIndex::root(),
                Some(b) if level > 0 && b < cad.levels[level - 1].len() => {
                    cad.levels[level - 1][b].index.clone()
                }
                _ => {
                    check.fail(format!("level {}: stack over a missing cell", level + 1));
                    continue;
                }
            };
            for (k, i) in s.cells.clone().enumerate() {
                let Some(c) = cells.get(i) else {
                    check.fail(format!("level {}: stack refers past the cells", level + 1));
                    break;
                };
                if c.parent != s.base {
                    check.fail(format!("cell {}: parent differs from its stack", c.index));
                }
                if c.index != base_index.child(k as u32 + 1) {
                    check.fail(format!(
                        "cell {}: expected index {}",
                        c.index,
                        base_index.child(k as u32 + 1)
                    ));
                }
                if c.sample.level() != level + 1 {
                    check.fail(format!("cell {}: sample has the wrong length", c.index));
                }
            }
            for w in s.cells.clone().collect::<Vec<_>>().windows(2) {
                if let (Some(a), Some(b)) = (cells.get(w[0]), cells.get(w[1])) {
                    if !increasing(&a.sample, &b.sample, level) {
                        check.fail(format!(
                            "cells {} and {} are not ordered along x{}",
                            a.index,
                            b.index,
                            level + 1
                        ));
                    }
                }
            }
        }
        if next != cells.len() {
            check.fail(format!("level {}: cells outside every stack", level + 1));
        }
        let expected: Vec<Option<usize>> = if level == 0 {
            vec![None]
        } else {
            (0..cad.levels[level - 1].len()).map(Some).collect()
        };
        if bases != expected {
            check.fail(format!(
                "level {}: not exactly one stack per base cell",
                level + 1
            ));
        }
    }
    VerificationReport {
        checks: vec![check],
        seed: 0,
        samples_used: 0,
    }
}

/// Whether coordinate `v` of `a` is below that of `b`, two samples over
/// the same base point whose coordinates differ.
fn increasing(a: &SamplePoint, b: &SamplePoint, v: usize) -> bool {
    let (mut a, mut b) = (a.clone(), b.clone());
    for _ in 0..200 {
        let (ia, ib) = (a.interval(v).unwrap(), b.interval(v).unwrap());
        if ia.hi < ib.lo {
            return true;
        }
        if ib.hi < ia.lo || (ia.is_point() && ib.is_point()) {
            return false;
        }
        a.refine();
        b.refine();
    }
    false
}

/// Over every zero-dimensional cell below the top level, the preprocessed
/// lifting polynomials must have pairwise coprime, squarefree fibers with
/// the same real roots as the stored lifting polynomials.
pub fn verify_preprocessing(cad: &Cad) -> Result<VerificationReport> {
    let mut check = Check::new("preprocessing");
    let mut used = 0;
    for level in 1..cad.nvars() {
        for s in &cad.stacks[level] {
            let c = &cad.levels[level - 1][s.base.unwrap()];
            if c.dimension() != 0 {
                continue;
            }
            used += 1;
            let phat = preprocess(c, &s.lifting.polys)?;
            let mut sp = c.sample.clone();
            let v = level;
            let live: Vec<&MPoly> = phat
                .iter()
                .filter(|p| !is_nullified(&mut sp, p, v))
                .collect();
            for (i, p) in live.iter().enumerate() {
                if sp.gcd_at(p, &p.derivative(v), v).degree(v) > 0 {
                    check.fail(format!("cell {}: {p} is not squarefree", c.index));
                }
                for q in &live[i + 1..] {
                    if sp.gcd_at(p, q, v).degree(v) > 0 {
                        check.fail(format!("cell {}: {p} and {q} share a factor", c.index));
                    }
                }
            }
            let original = roots_over(&mut sp, s, v)?;
            let processed = roots_over(
                &mut sp,
                &Stack {
                    base: s.base,
                    cells: s.cells.clone(),
                    lifting: crate::lifting::LiftingSet {
                        polys: phat.clone(),
                    },
                },
                v,
            )?;
            let prod = phat.iter().fold(MPoly::one(sp.nvars()), |a, p| &a * p);
            let subset = original
                .iter()
                .all(|r| prod.degree(v) == 0 || sp.sign_at_root(&prod, v, r) == 0);
            if original.len() != processed.len() || !subset {
                check.fail(format!(
                    "cell {}: {} roots before preprocessing, {} after",
                    c.index,
                    original.len(),
                    processed.len()
                ));
            }
        }
    }
    Ok(VerificationReport {
        checks: vec![check],
        seed: 0,
        samples_used: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::VarOrder;
    use crate::lifting::{build_cad, BuildOptions};
    use crate::projection::OperatorKind;

    fn circle_cad() -> Cad {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let f = &(&x.pow(2) + &y.pow(2)) - &MPoly::one(2);
        build_cad(
            &[f],
            &VarOrder::new(["x", "y"]).unwrap(),
            OperatorKind::McCallum,
            &BuildOptions::default(),
        )
        .unwrap()
        .into_cad()
        .unwrap()
    }

    fn circle() -> MPoly {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        &(&x.pow(2) + &y.pow(2)) - &MPoly::one(2)
    }

    #[test]
    fn sturm_counts() {
        let p = UPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(count_real_roots(&p), 2);
        assert_eq!(sturm_count(&p, Some(&rat(0)), None), 1);
        assert_eq!(count_real_roots(&UPoly::from_ints(&[1, 0, 1])), 0);
        // (x - 1)^2 (x + 3): two distinct roots
        let q = UPoly::from_ints(&[3, -5, 1, 1]);
        assert_eq!(count_real_roots(&q), 2);
        assert_eq!(sturm_count(&q, None, Some(&rat(1))), 2);
        assert_eq!(sturm_count(&q, None, Some(&rat(0))), 1);
    }

    #[test]
    fn locate_examples() {
        let cad = circle_cad();
        let c = locate_point(&cad, &[rat(0), rat(0)]).unwrap();
        assert_eq!(c.index.entries(), &[3, 3]);
        let c = locate_point(&cad, &[rat(2), rat(0)]).unwrap();
        assert_eq!(c.index.entries(), &[5, 1]);
        let c = locate_point(&cad, &[rat(1), rat(0)]).unwrap();
        assert_eq!(c.index.entries(), &[4, 2]);
    }

    #[test]
    fn circle_passes_everything() {
        let cad = circle_cad();
        let r = verify_sign_invariance(&cad, &[circle()], 5, 7);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.samples_used, 65);
        let r = verify_partition(&cad, 300, (&rat(-10), &rat(10)), 7);
        assert!(r.passed(), "{r:?}");
        assert!(verify_cylindricity(&cad).passed());
        assert!(verify_preprocessing(&cad).unwrap().passed());
    }

    #[test]
    fn vacuous_runs() {
        let cad = circle_cad();
        let r = verify_sign_invariance(&cad, &[circle()], 0, 1);
        assert!(r.passed());
        assert_eq!(r.samples_used, 0);
        assert!(verify_partition(&cad, 0, (&rat(-1), &rat(1)), 1).passed());
    }

    #[test]
    fn planted_defects_are_caught() {
        // Merge the three middle cells over x = 0 into one sector.
        let mut merged = circle_cad();
        merged.stacks[1][2].lifting.polys.clear();
        assert!(!verify_sign_invariance(&merged, &[circle()], 3, 1).passed());

        let mut deleted = circle_cad();
        deleted.levels[1].remove(6);
        assert!(!verify_partition(&deleted, 200, (&rat(-2), &rat(2)), 1).passed());
        assert!(!verify_cylindricity(&deleted).passed());

        let mut reparented = circle_cad();
        reparented.levels[1][0].parent = Some(1);
        assert!(!verify_cylindricity(&reparented).passed());
    }
}
