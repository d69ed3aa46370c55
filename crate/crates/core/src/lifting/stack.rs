use super::{Cell, CellIndex};
use crate::arith::MPoly;
use crate::arith::{rat, Rat};
use crate::chains::{FiberRoot, SamplePoint};
use crate::error::{Error, Result};

/// Whether the fiber of `f` in `v` over the point is identically zero.
pub(crate) fn is_nullified(sp: &mut SamplePoint, f: &MPoly, v: usize) -> bool {
    let g = sp.strip_vanishing_leads(f, v);
    g.degree(v) == 0 && sp.sign_at(&g) == 0
}

/// Decide whether two fiber roots over `sp` are the same number.
fn same_root(sp: &mut SamplePoint, a: &FiberRoot, b: &FiberRoot, v: usize) -> bool {
    if a.iv.is_disjoint(&b.iv) {
        return false;
    }
    if b.is_rational() {
        return a.iv.contains(&b.iv.lo) && sp.sign_at(&a.def.subst(v, &b.iv.lo)) == 0;
    }
    if a.is_rational() {
        return b.iv.contains(&a.iv.lo) && sp.sign_at(&b.def.subst(v, &a.iv.lo)) == 0;
    }
    // a must be a root of b's defining fiber, and then the one b isolates.
    if sp.sign_at_root(&b.def, v, a) != 0 {
        return false;
    }
    let mut a = a.clone();
    loop {
        if a.iv.lo > b.iv.lo && a.iv.hi < b.iv.hi {
            return true;
        }
        if a.iv.hi <= b.iv.lo || a.iv.lo >= b.iv.hi {
            return false;
        }
        sp.refine_root(&mut a, v);
    }
}

/// Distinct real roots of the nonzero fibers of `polys` in `v` over the
/// point, sorted, with pairwise disjoint intervals.
pub fn fiber_root_set(sp: &mut SamplePoint, polys: &[MPoly], v: usize) -> Result<Vec<FiberRoot>> {
    let mut roots: Vec<FiberRoot> = Vec::new();
    for p in polys {
        let found = match sp.fiber_roots(p, v) {
            Ok(r) => r,
            Err(Error::NullifiedFiber) => continue,
            Err(e) => return Err(e),
        };
        for r in found {
            let mut dup = false;
            for s in &roots {
                if same_root(sp, &r, s, v) {
                    dup = true;
                    break;
                }
            }
            if !dup {
                roots.push(r);
            }
        }
    }
    loop {
        roots.sort_by(|a, b| a.iv.lo.cmp(&b.iv.lo).then(a.iv.hi.cmp(&b.iv.hi)));
        let mut clean = true;
        for i in 1..roots.len() {
            if !roots[i - 1].iv.is_disjoint(&roots[i].iv) {
                clean = false;
                let (l, r) = roots.split_at_mut(i);
                sp.refine_root(&mut l[i - 1], v);
                sp.refine_root(&mut r[0], v);
            }
        }
        if clean {
            return Ok(roots);
        }
    }
}

/// Rational sample points of the sectors around sorted, disjoint roots.
pub(crate) fn sector_samples(roots: &[FiberRoot]) -> Vec<Rat> {
    if roots.is_empty() {
        return vec![rat(0)];
    }
    let mut out = vec![&roots[0].iv.lo - rat(1)];
    for w in roots.windows(2) {
        out.push((&w[0].iv.hi + &w[1].iv.lo) / rat(2));
    }
    out.push(&roots[roots.len() - 1].iv.hi + rat(1));
    out
}

/// Check the fibers of `polys` are pairwise coprime and squarefree over the
/// point, ignoring nullified ones.
pub(crate) fn check_separation(sp: &mut SamplePoint, polys: &[MPoly], v: usize) -> Result<()> {
    let live: Vec<&MPoly> = polys.iter().filter(|p| !is_nullified(sp, p, v)).collect();
    for (i, p) in live.iter().enumerate() {
        if sp.gcd_at(p, &p.derivative(v), v).degree(v) > 0 {
            return Err(Error::PreprocessingFailed(format!(
                "{p} is not squarefree over the cell"
            )));
        }
        for q in &live[i + 1..] {
            if sp.gcd_at(p, q, v).degree(v) > 0 {
                return Err(Error::PreprocessingFailed(format!(
                    "{p} and {q} share roots over the cell"
                )));
            }
        }
    }
    Ok(())
}

/// The stack over `c` defined by polynomials that already separate above
/// it (pairwise coprime and squarefree fibers at the sample).
pub fn stack_over_cell(c: &Cell, phat: &[MPoly]) -> Result<Vec<Cell>> {
    let mut sp = c.sample.clone();
    let v = sp.level();
    check_separation(&mut sp, phat, v)?;
    let roots = fiber_root_set(&mut sp, phat, v)?;
    let sectors = sector_samples(&roots);
    let mut cells = Vec::with_capacity(2 * roots.len() + 1);
    let mut k = 1;
    for (i, q) in sectors.into_iter().enumerate() {
        cells.push(Cell {
            index: c.index.child(k),
            sample: sp.push_rational(v, q),
            parent: None,
        });
        k += 1;
        if let Some(r) = roots.get(i) {
            cells.push(Cell {
                index: c.index.child(k),
                sample: sp.push_root(v, r.clone()),
                parent: None,
            });
            k += 1;
        }
    }
    Ok(cells)
}

/// Cells of the real line cut by the roots of univariate `p1`.
pub fn decompose_r1(p1: &[MPoly], nvars: usize) -> Result<Vec<Cell>> {
    let base = Cell {
        index: CellIndex::root(),
        sample: SamplePoint::origin(nvars),
        parent: None,
    };
    stack_over_cell(&base, p1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> MPoly {
        MPoly::var(2, 0)
    }
    fn y() -> MPoly {
        MPoly::var(2, 1)
    }
    fn k(c: i64) -> MPoly {
        MPoly::constant(2, rat(c))
    }

    #[test]
    fn real_line_examples() {
        let cells = decompose_r1(&[&x() - &k(1), &x() + &k(1)], 2).unwrap();
        assert_eq!(cells.len(), 5);
        let expect = [-2, -1, 0, 1, 2];
        for (i, (c, e)) in cells.iter().zip(expect).enumerate() {
            assert_eq!(c.index.entries(), &[i as u32 + 1]);
            assert_eq!(c.sample.rational(0), Some(rat(e)));
        }
        assert_eq!(decompose_r1(&[], 2).unwrap().len(), 1);
        assert_eq!(decompose_r1(&[&x().pow(2) + &k(1)], 2).unwrap().len(), 1);
    }

    #[test]
    fn stack_with_linear_fibers() {
        let base = Cell {
            index: CellIndex::new(vec![1]),
            sample: SamplePoint::from_rationals(2, &[rat(5)]),
            parent: None,
        };
        let cells = stack_over_cell(&base, &[&y() - &k(1), &y() + &k(1)]).unwrap();
        let ys: Vec<Rat> = cells
            .iter()
            .map(|c| c.sample.rational(1).unwrap())
            .collect();
        assert_eq!(ys, vec![rat(-2), rat(-1), rat(0), rat(1), rat(2)]);
        let none = stack_over_cell(&base, &[&y().pow(2) + &k(1)]).unwrap();
        assert_eq!(none.len(), 1);
        assert_eq!(none[0].sample.rational(1), Some(rat(0)));
    }

    #[test]
    fn stack_over_irrational_point() {
        let mut o = SamplePoint::origin(2);
        let r = o.fiber_roots(&(&x().pow(2) - &k(2)), 0).unwrap();
        let base = Cell {
            index: CellIndex::new(vec![4]),
            sample: o.push_root(0, r[1].clone()),
            parent: None,
        };
        let cells = stack_over_cell(&base, &[&y().pow(2) - &x()]).unwrap();
        assert_eq!(cells.len(), 5);
        let mut top = cells[3].sample.clone();
        assert_eq!(top.sign_at(&(&y().pow(4) - &k(2))), 0);
        assert_eq!(top.sign_at(&y()), 1);
    }

    #[test]
    fn shared_roots_are_rejected() {
        let base = Cell {
            index: CellIndex::new(vec![1]),
            sample: SamplePoint::from_rationals(2, &[rat(0)]),
            parent: None,
        };
        assert!(matches!(
            stack_over_cell(&base, &[&y() - &x(), y()]),
            Err(Error::PreprocessingFailed(_))
        ));
    }

    #[test]
    fn merged_roots_are_distinct() {
        let mut sp = SamplePoint::from_rationals(2, &[rat(0)]);
        let r = fiber_root_set(&mut sp, &[&y().pow(2) - &k(2), &y().pow(4) - &k(4)], 1).unwrap();
        assert_eq!(r.len(), 2);
    }
}
