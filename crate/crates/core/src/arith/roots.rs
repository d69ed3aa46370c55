use num_traits::Zero;

use super::{rat, Interval, MPoly, Rat, UPoly};
use crate::error::{Error, Result};

/// Descartes bound for the number of roots of `p` in the open interval `(a, b)`.
fn descartes_bound(p: &UPoly, a: &Rat, b: &Rat) -> usize {
    p.affine(a, &(b - a))
        .descartes_transform()
        .sign_variations()
}

/// Isolate the real roots of a univariate polynomial.
///
/// Uses Descartes' rule of signs with bisection on the squarefree part.
/// Returned intervals are sorted, pairwise disjoint, and each contains
/// exactly one root; exact rational roots met along the way come back as
/// point intervals, every other interval has a sign change of the
/// squarefree part at its endpoints.
pub fn isolate_real_roots(p: &UPoly) -> Result<Vec<Interval>> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    if p.degree() == 0 {
        return Ok(vec![]);
    }
    let q = p.squarefree();
    if q.degree() == 1 {
        let c = q.coeffs();
        return Ok(vec![Interval::point(-&c[0] / &c[1])]);
    }
    let b = q.cauchy_bound();
    let mut found = Vec::new();
    let mut work = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = work.pop() {
        match descartes_bound(&q, &lo, &hi) {
            0 => {}
            1 => found.push(Interval::new(lo, hi)),
            _ => {
                let mid = (&lo + &hi) / rat(2);
                if q.eval(&mid).is_zero() {
                    found.push(Interval::point(mid.clone()));
                }
                work.push((lo, mid.clone()));
                work.push((mid, hi));
            }
        }
    }
    // Open intervals may touch a neighbouring point root; pull the endpoints
    // off any root so the closed intervals isolate.
    let mut out = Vec::with_capacity(found.len());
    for mut iv in found {
        if !iv.is_point() {
            while q.eval(&iv.lo).is_zero() || q.eval(&iv.hi).is_zero() {
                let mid = iv.midpoint();
                if q.eval(&mid).is_zero() {
                    iv = Interval::point(mid);
                    break;
                }
                iv = if descartes_bound(&q, &iv.lo, &mid) == 1 {
                    Interval::new(iv.lo, mid)
                } else {
                    Interval::new(mid, iv.hi)
                };
            }
        }
        out.push(iv);
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
    // Adjacent intervals sharing an endpoint are separated by refinement.
    for i in 1..out.len() {
        while !out[i - 1].is_disjoint(&out[i]) {
            let w = out[i - 1].width() / rat(2);
            let left = refine_sqf(&q, &out[i - 1], &w);
            let w = out[i].width() / rat(2);
            let right = refine_sqf(&q, &out[i], &w);
            out[i - 1] = left;
            out[i] = right;
        }
    }
    Ok(out)
}

/// Root isolation for a univariate `MPoly` in any single variable.
pub fn isolate_real_roots_univariate(p: &MPoly) -> Result<Vec<Interval>> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let v = p.mvar().unwrap_or(0);
    let u = p.to_upoly(v).ok_or(Error::NotUnivariate)?;
    isolate_real_roots(&u)
}

fn refine_sqf(q: &UPoly, iv: &Interval, target: &Rat) -> Interval {
    let mut iv = iv.clone();
    if iv.is_point() {
        return iv;
    }
    let mut s_lo = q.sign_at(&iv.lo);
    while iv.width() > *target {
        let mid = iv.midpoint();
        let s = q.sign_at(&mid);
        if s == 0 {
            return Interval::point(mid);
        }
        if s == s_lo {
            iv = Interval::new(mid, iv.hi);
            s_lo = s;
        } else {
            iv = Interval::new(iv.lo, mid);
        }
    }
    iv
}

/// Shrink an isolating interval of `p` to width at most `target_width` by
/// bisection with exact sign tests.
pub fn refine_interval(p: &UPoly, iv: &Interval, target_width: &Rat) -> Result<Interval> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    let q = p.squarefree();
    if iv.is_point() {
        return if q.eval(&iv.lo).is_zero() {
            Ok(iv.clone())
        } else {
            Err(Error::NotIsolating)
        };
    }
    let (a, b) = (q.sign_at(&iv.lo), q.sign_at(&iv.hi));
    if a == 0 || b == 0 || a == b || descartes_bound(&q, &iv.lo, &iv.hi) != 1 {
        return Err(Error::NotIsolating);
    }
    Ok(refine_sqf(&q, iv, target_width))
}
