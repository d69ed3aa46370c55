//! Chain-level operations: pseudo-reduction, regularity, splitting, gcds and
//! squarefree factorization modulo a chain, and the restricted
//! triangular decomposition consumed when making lifting sets coprime.

use super::{BoundingBox, RegularChain, RegularSystem, SamplePoint};
use crate::arith::{principal_subresultant_coefficients, resultant, subresultant_polys, MPoly};
use crate::error::{Error, Result};

/// Outcome of a regularity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    ZeroDivisorOrZero,
}

/// One branch of a squarefree factorization modulo a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeComponent {
    pub chain: RegularChain,
    pub factors: Vec<(MPoly, u32)>,
}

/// Pseudo-remainder of `h` by every chain polynomial, top down, normalized.
pub fn prem_chain(h: &MPoly, chain: &RegularChain) -> MPoly {
    let mut h = h.clone();
    for t in chain.polys().iter().rev() {
        let v = t.mvar().unwrap();
        if h.degree(v) >= t.degree(v) {
            h = h.prem(t, v);
        }
        if h.is_zero() {
            break;
        }
    }
    h.normalized()
}

/// Iterated resultant of `h` against the chain, eliminating from the top.
pub fn iterated_resultant(h: &MPoly, chain: &RegularChain) -> MPoly {
    let mut h = h.clone();
    for t in chain.polys().iter().rev() {
        if h.is_zero() {
            break;
        }
        let v = t.mvar().unwrap();
        if h.depends_on(v) {
            h = resultant(&h, t, v).expect("chain polynomials have positive degree");
        }
    }
    h
}

/// Regularity of `p` modulo the chain: its initial (or `p` itself when its
/// main variable belongs to the chain) must have a nonzero iterated
/// resultant.
pub fn regularity_test(p: &MPoly, chain: &RegularChain) -> Regularity {
    let h = match p.mvar() {
        Some(v) if !chain.has_var(v) => p.initial(),
        _ => p.clone(),
    };
    if iterated_resultant(&h, chain).is_zero() {
        Regularity::ZeroDivisorOrZero
    } else {
        Regularity::Regular
    }
}

/// `p` minus its leading term in its main variable.
pub fn tail(p: &MPoly) -> Result<MPoly> {
    p.tail().ok_or(Error::Constant)
}

fn drop_lead(p: &MPoly, v: usize) -> MPoly {
    let d = p.degree(v);
    p - &p.lc(v).shift(v, d)
}

/// Pseudo-quotient of `a` by `g` in `v`, reduced modulo the chain.
fn pquo(a: &MPoly, g: &MPoly, v: usize, chain: &RegularChain) -> MPoly {
    let (q, _, _) = a.pseudo_divide(g, v);
    prem_chain(&q, chain)
}

/// Split the chain so that `h` is either zero or regular on each branch.
/// Returns `(branch, h is zero on branch)` pairs whose zero sets partition
/// those of the chain.
pub fn regularize(h: &MPoly, chain: &RegularChain) -> Vec<(RegularChain, bool)> {
    let h = prem_chain(h, chain);
    if h.is_zero() {
        return vec![(chain.clone(), true)];
    }
    let v = match h.mvar() {
        None => return vec![(chain.clone(), false)],
        Some(v) => v,
    };
    if !chain.has_var(v) || !iterated_resultant(&h, chain).is_zero() {
        return vec![(chain.clone(), false)];
    }
    let t = chain.poly_for(v).unwrap().clone();
    let up = chain.above(v);
    let mut out = Vec::new();
    for (low, g) in gcd_split(&t, &h, v, &chain.below(v)) {
        let dg = g.degree(v);
        if dg == 0 {
            out.push((RegularChain::join(&low, Some(t.clone()), &up), false));
        } else if dg == t.degree(v) {
            out.push((RegularChain::join(&low, Some(t.clone()), &up), true));
        } else {
            let q = pquo(&t, &g, v, &low);
            out.push((RegularChain::join(&low, Some(g.clone()), &up), true));
            out.extend(regularize(&h, &RegularChain::join(&low, Some(q), &up)));
        }
    }
    out
}

/// Branches on which `p` either has a regular leading coefficient in `v` or
/// no longer involves `v`.
fn strip(p: &MPoly, v: usize, chain: &RegularChain) -> Vec<(RegularChain, MPoly)> {
    let p = prem_chain(p, chain);
    if p.degree(v) == 0 {
        return vec![(chain.clone(), p)];
    }
    let mut out = Vec::new();
    for (branch, zero) in regularize(&p.lc(v), chain) {
        if zero {
            out.extend(strip(&drop_lead(&p, v), v, &branch));
        } else {
            out.push((branch, p.clone()));
        }
    }
    out
}

/// Gcd of `a` and `b` in `v` modulo the chain, splitting where needed.
fn gcd_split(a: &MPoly, b: &MPoly, v: usize, chain: &RegularChain) -> Vec<(RegularChain, MPoly)> {
    let nv = a.nvars();
    let mut out = Vec::new();
    for (c1, a1) in strip(a, v, chain) {
        for (c2, b1) in strip(b, v, &c1) {
            let a1 = prem_chain(&a1, &c2);
            if a1.degree(v) == 0 {
                out.push((c2, if a1.is_zero() { b1 } else { MPoly::one(nv) }));
                continue;
            }
            if b1.degree(v) == 0 {
                out.push((c2, if b1.is_zero() { a1 } else { MPoly::one(nv) }));
                continue;
            }
            let (p, q) = if a1.degree(v) >= b1.degree(v) {
                (a1, b1)
            } else {
                (b1, a1)
            };
            let psc = principal_subresultant_coefficients(&p, &q, v);
            let subs = subresultant_polys(&p, &q, v);
            walk_subresultants(&psc, &subs, &q, 0, c2, &mut out);
        }
    }
    out
}

fn walk_subresultants(
    psc: &[MPoly],
    subs: &[MPoly],
    q: &MPoly,
    j: usize,
    chain: RegularChain,
    out: &mut Vec<(RegularChain, MPoly)>,
) {
    if j == subs.len() {
        let g = prem_chain(q, &chain);
        out.push((chain, g));
        return;
    }
    for (branch, zero) in regularize(&psc[j], &chain) {
        if zero {
            walk_subresultants(psc, subs, q, j + 1, branch, out);
        } else {
            let g = if j == 0 {
                MPoly::one(q.nvars())
            } else {
                prem_chain(&subs[j], &branch)
            };
            out.push((branch, g));
        }
    }
}

/// Gcd of `p` and `q` modulo a chain. Both must share a main variable above
/// the chain and be regular modulo it. When the computation would need to
/// split the chain, fails with `RequiresSplit` carrying the offending
/// coefficient.
pub fn gcd_mod_chain(p: &MPoly, q: &MPoly, chain: &RegularChain) -> Result<MPoly> {
    let v = p.mvar().ok_or(Error::Constant)?;
    for f in [p, q] {
        if regularity_test(f, chain) != Regularity::Regular {
            return Err(Error::RequiresSplit(f.initial()));
        }
    }
    let (a, b) = if p.degree(v) >= q.degree(v) {
        (p, q)
    } else {
        (q, p)
    };
    let a = prem_chain(a, chain);
    let b = prem_chain(b, chain);
    if b.degree(v) == 0 {
        return Ok(MPoly::one(p.nvars()));
    }
    let psc = principal_subresultant_coefficients(&a, &b, v);
    let subs = subresultant_polys(&a, &b, v);
    for (j, pj) in psc.iter().enumerate().take(subs.len()) {
        let r = prem_chain(pj, chain);
        if r.is_zero() {
            continue;
        }
        if iterated_resultant(&r, chain).is_zero() {
            return Err(Error::RequiresSplit(r));
        }
        return Ok(if j == 0 {
            MPoly::one(p.nvars())
        } else {
            prem_chain(&subs[j], chain)
        });
    }
    Ok(b)
}

/// Squarefree decomposition of `p` modulo the chain (Musser's scheme with
/// gcds taken modulo the chain). Each component's factors multiply to `p`
/// up to a factor that is invertible modulo the component chain.
pub fn squarefree_factorization_mod_chain(
    p: &MPoly,
    chain: &RegularChain,
) -> Result<Vec<SquarefreeComponent>> {
    let v = p.mvar().ok_or(Error::Constant)?;
    if chain.top_var().is_some_and(|t| t >= v) {
        return Err(Error::WrongMainVariable(v));
    }
    if regularity_test(p, chain) != Regularity::Regular {
        return Err(Error::NotRegular);
    }
    let p = prem_chain(p, chain);
    let mut out = Vec::new();
    for (c1, g) in gcd_split(&p, &p.derivative(v), v, chain) {
        if g.degree(v) == 0 {
            out.push(SquarefreeComponent {
                chain: c1,
                factors: vec![(p.clone(), 1)],
            });
            continue;
        }
        let b = pquo(&p, &g, v, &c1);
        musser(b, g, 1, vec![], v, c1, &mut out);
    }
    Ok(out)
}

fn musser(
    b: MPoly,
    c: MPoly,
    i: u32,
    factors: Vec<(MPoly, u32)>,
    v: usize,
    chain: RegularChain,
    out: &mut Vec<SquarefreeComponent>,
) {
    if c.degree(v) == 0 {
        let mut factors = factors;
        if b.degree(v) > 0 {
            factors.push((b, i));
        }
        out.push(SquarefreeComponent { chain, factors });
        return;
    }
    for (branch, d) in gcd_split(&b, &c, v, &chain) {
        let mut fs = factors.clone();
        if d.degree(v) == 0 {
            if b.degree(v) > 0 {
                fs.push((prem_chain(&b, &branch), i));
            }
            out.push(SquarefreeComponent {
                chain: branch,
                factors: fs,
            });
            continue;
        }
        let f = pquo(&b, &d, v, &branch);
        if f.degree(v) > 0 {
            fs.push((f, i));
        }
        let c2 = pquo(&c, &d, v, &branch);
        musser(d, c2, i + 1, fs, v, branch, out);
    }
}

/// Apply one inequation to a component.
fn impose(sys: RegularSystem, q: &MPoly) -> Vec<RegularSystem> {
    let q = prem_chain(q, &sys.chain);
    if q.is_zero() {
        return vec![];
    }
    let v = match q.mvar() {
        None => return vec![sys],
        Some(v) => v,
    };
    if sys.chain.has_var(v) {
        return regularize(&q, &sys.chain)
            .into_iter()
            .filter(|(_, zero)| !zero)
            .map(|(chain, _)| RegularSystem {
                chain,
                inequation: sys.inequation.clone(),
            })
            .collect();
    }
    // q involves a free variable: keep it as part of the inequation once its
    // leading coefficient is regular.
    let mut out = Vec::new();
    for (chain, q1) in strip(&q, v, &sys.chain) {
        if q1.degree(v) > 0 {
            let inequation = (&sys.inequation * &q1).normalized();
            out.push(RegularSystem { chain, inequation });
        } else {
            out.extend(impose(
                RegularSystem {
                    chain,
                    inequation: sys.inequation.clone(),
                },
                &q1,
            ));
        }
    }
    out
}

/// Decompose `{ eqs = 0, chain = 0, ineqs != 0 }` into regular systems.
///
/// Only a single equation over a zero-dimensional chain is supported.
/// Components whose main variable lies below that of the equation are
/// reported too; callers filter them.
pub fn triangularize(
    eqs: &[MPoly],
    ineqs: &[MPoly],
    chain: &RegularChain,
) -> Result<Vec<RegularSystem>> {
    if !chain.is_zero_dimensional() {
        return Err(Error::PositiveDimensional);
    }
    let [p] = eqs else {
        return Err(Error::PositiveDimensional);
    };
    let nv = p.nvars();
    let one = MPoly::one(nv);
    let p = prem_chain(p, chain);
    let mut comps = Vec::new();
    match p.mvar() {
        _ if p.is_zero() => comps.push(RegularSystem {
            chain: chain.clone(),
            inequation: one,
        }),
        None => {}
        Some(v) if chain.has_var(v) => {
            for (branch, zero) in regularize(&p, chain) {
                if zero {
                    comps.push(RegularSystem {
                        chain: branch,
                        inequation: one.clone(),
                    });
                }
            }
        }
        Some(v) => {
            if chain.top_var().is_some_and(|t| t > v) {
                return Err(Error::WrongMainVariable(v));
            }
            for (branch, p1) in strip(&p, v, chain) {
                if p1.degree(v) == 0 {
                    if p1.is_zero() {
                        comps.push(RegularSystem {
                            chain: branch,
                            inequation: one.clone(),
                        });
                    }
                } else {
                    comps.push(RegularSystem {
                        chain: branch.with(p1),
                        inequation: one.clone(),
                    });
                }
            }
        }
    }
    for q in ineqs {
        comps = comps.into_iter().flat_map(|s| impose(s, q)).collect();
    }
    Ok(comps)
}

/// Real solutions of a zero-dimensional chain, optionally only those lying
/// in the closed box `within`.
pub fn real_root_isolate(
    chain: &RegularChain,
    within: Option<&BoundingBox>,
) -> Result<Vec<SamplePoint>> {
    if !chain.is_zero_dimensional() {
        return Err(Error::PositiveDimensional);
    }
    let nv = chain.polys().first().map_or(1, MPoly::nvars);
    let mut points = vec![SamplePoint::origin(nv)];
    for t in chain.polys() {
        let v = t.mvar().unwrap();
        let mut next = Vec::new();
        for mut p in points {
            for r in p.fiber_roots(t, v)? {
                let q = p.push_root(v, r);
                if within.is_none_or(|bb| in_box(&q, v, bb)) {
                    next.push(q);
                }
            }
        }
        points = next;
    }
    Ok(points)
}

/// Whether coordinate `v` of `p` lies in the box's interval for `v`.
fn in_box(p: &SamplePoint, v: usize, bb: &BoundingBox) -> bool {
    let Some(b) = bb.get(v) else {
        return true;
    };
    let mut p = p.clone();
    loop {
        let a = p.interval(v).unwrap().clone();
        if b.contains_interval(&a) {
            return true;
        }
        if a.is_disjoint(b) {
            return false;
        }
        // An endpoint of the box inside the isolating interval may be the
        // coordinate itself.
        for e in [&b.lo, &b.hi] {
            if a.contains(e) {
                let def = p.def(v).unwrap().subst(v, e);
                if p.truncate_below(v).sign_at(&def) == 0 {
                    return true;
                }
            }
        }
        p.refine();
    }
}

/// Whether the point `sol` (over a subset of the coordinates of `sp`)
/// agrees with `sp` on its coordinates.
///
/// Going up, `sp` must satisfy each defining polynomial of `sol`; it then
/// sits on some root of that fiber, and refining `sp` decides whether it is
/// the root isolated by `sol`, whose interval endpoints are not roots.
fn same_point(sol: &SamplePoint, sp: &SamplePoint) -> bool {
    let mut sp = sp.clone();
    for v in sol.vars() {
        if sp.interval(v).is_none() {
            return false;
        }
        if sp.sign_at(sol.def(v).unwrap()) != 0 {
            return false;
        }
        let a = sol.interval(v).unwrap();
        if a.is_point() {
            continue;
        }
        loop {
            let b = sp.interval(v).unwrap();
            if b.lo > a.lo && b.hi < a.hi {
                break;
            }
            if b.hi <= a.lo || b.lo >= a.hi {
                return false;
            }
            sp.refine();
        }
    }
    true
}

/// Whether some real solution of the component, restricted to the
/// variables of `sp`, coincides with the sample point. Polynomials of the
/// component in variables that `sp` lacks are ignored.
pub fn compatible_with_sample(component: &RegularChain, sp: &SamplePoint) -> Result<bool> {
    let vars = sp.vars();
    let lower: Vec<MPoly> = component
        .polys()
        .iter()
        .filter(|p| vars.contains(&p.mvar().unwrap()))
        .cloned()
        .collect();
    if lower.is_empty() {
        return Ok(true);
    }
    let lower = RegularChain::from_sorted(lower);
    if !lower.is_zero_dimensional() {
        return Ok(false);
    }
    let bb = sp.bounding_box();
    for sol in real_root_isolate(&lower, Some(&bb))? {
        if same_point(&sol, sp) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn x() -> MPoly {
        MPoly::var(2, 0)
    }
    fn y() -> MPoly {
        MPoly::var(2, 1)
    }
    fn k(c: i64) -> MPoly {
        MPoly::constant(2, rat(c))
    }
    fn chain(ps: Vec<MPoly>) -> RegularChain {
        RegularChain::new(ps).unwrap()
    }

    #[test]
    fn chain_construction_checks() {
        assert!(RegularChain::new(vec![x(), &x() - &k(1)]).is_err());
        assert!(RegularChain::new(vec![x(), &(&x() * &y()) + &k(1)]).is_err());
        assert!(RegularChain::new(vec![&x().pow(2) - &k(2), &y() - &x()]).is_ok());
    }

    #[test]
    fn regularity_examples() {
        let c = chain(vec![&x().pow(2) - &k(2)]);
        assert_eq!(regularity_test(&(&y() + &k(1)), &c), Regularity::Regular);
        let cx = chain(vec![x()]);
        assert_eq!(
            regularity_test(&(&(&x() * &y()) + &k(1)), &cx),
            Regularity::ZeroDivisorOrZero
        );
        assert_eq!(
            regularity_test(&y(), &RegularChain::empty()),
            Regularity::Regular
        );
    }

    #[test]
    fn tail_examples() {
        let p = &(&(&x() * &y().pow(2)) + &y().scale(&rat(3))) + &k(1);
        assert_eq!(tail(&p).unwrap(), &y().scale(&rat(3)) + &k(1));
        assert!(tail(&y().pow(2)).unwrap().is_zero());
        let q = &(&x() * &y().pow(2)) + &(&x() * &y());
        assert_eq!(tail(&q).unwrap(), &x() * &y());
        assert!(tail(&k(3)).is_err());
    }

    #[test]
    fn regularize_splits_zero_divisor() {
        // x - 1 modulo x^2 - 1: zero on x = 1, regular on x = -1
        let c = chain(vec![&x().pow(2) - &k(1)]);
        let branches = regularize(&(&x() - &k(1)), &c);
        assert_eq!(branches.len(), 2);
        for (b, zero) in branches {
            let t = &b.polys()[0];
            assert_eq!(t.degree(0), 1);
            let root = if zero { rat(1) } else { rat(-1) };
            assert!(t.subst(0, &root).is_zero());
        }
    }

    #[test]
    fn gcd_mod_chain_examples() {
        let c1 = chain(vec![&x() - &k(1)]);
        let p = &y().pow(2) - &k(2);
        assert_eq!(gcd_mod_chain(&p, &p, &c1).unwrap().degree(1), 2);
        let c0 = chain(vec![x()]);
        let g = gcd_mod_chain(&(&y() - &x()), &(&y() + &x()), &c0).unwrap();
        assert_eq!(prem_chain(&g, &c0), y());
        let g = gcd_mod_chain(&(&y() - &k(1)), &(&y() + &k(1)), &RegularChain::empty()).unwrap();
        assert!(g.is_constant());
    }

    #[test]
    fn gcd_mod_chain_reports_split() {
        // y - 1 and (x - 1) y + 1 modulo x^2 - 1: leading coefficient x - 1
        // is a zero divisor.
        let c = chain(vec![&x().pow(2) - &k(1)]);
        let q = &(&(&x() - &k(1)) * &y()) + &k(1);
        assert!(matches!(
            gcd_mod_chain(&(&y() - &k(1)), &q, &c),
            Err(Error::RequiresSplit(_))
        ));
    }

    #[test]
    fn squarefree_examples() {
        let c = chain(vec![&x() - &k(3)]);
        let p = &(&y() - &k(1)).pow(2) * &(&y() + &k(2));
        let comps = squarefree_factorization_mod_chain(&p, &c).unwrap();
        assert_eq!(comps.len(), 1);
        let mut f = comps[0].factors.clone();
        f.sort_by_key(|(_, m)| *m);
        assert_eq!(f, vec![(&y() + &k(2), 1), (&y() - &k(1), 2)]);

        let c0 = chain(vec![x()]);
        let comps = squarefree_factorization_mod_chain(&(&y().pow(2) - &x()), &c0).unwrap();
        assert_eq!(comps[0].factors, vec![(y(), 2)]);

        let comps = squarefree_factorization_mod_chain(&(&y() + &k(5)), &c).unwrap();
        assert_eq!(comps[0].factors, vec![(&y() + &k(5), 1)]);
    }

    #[test]
    fn triangularize_examples() {
        let c = chain(vec![&x() - &k(4)]);
        let t = triangularize(&[&y().pow(2) - &x()], &[], &c).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].chain.polys()[1], &y().pow(2) - &k(4));

        let c0 = chain(vec![x()]);
        assert!(triangularize(&[&y() - &k(1)], &[&y() - &k(1)], &c0)
            .unwrap()
            .is_empty());

        let t = triangularize(&[&(&x() * &y()) - &x()], &[], &c0).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].mvar(), Some(0));
    }

    #[test]
    fn real_roots_of_chains() {
        let pts = real_root_isolate(&chain(vec![&x().pow(2) - &k(2)]), None).unwrap();
        assert_eq!(pts.len(), 2);
        let pts = real_root_isolate(&chain(vec![&x() - &k(1), &y() - &k(2)]), None).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].rational(0), Some(rat(1)));
        assert_eq!(pts[0].rational(1), Some(rat(2)));
        assert!(real_root_isolate(&chain(vec![&x().pow(2) + &k(1)]), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn compatibility_examples() {
        let mut sp = SamplePoint::origin(2);
        let roots = sp.fiber_roots(&(&x().pow(2) - &k(2)), 0).unwrap();
        let sp = sp.push_root(0, roots[1].clone());
        assert!(!compatible_with_sample(&chain(vec![&x() + &k(2)]), &sp).unwrap());
        assert!(compatible_with_sample(&chain(vec![&x().pow(2) - &k(2)]), &sp).unwrap());
        assert!(compatible_with_sample(&RegularChain::empty(), &sp).unwrap());
    }
}
