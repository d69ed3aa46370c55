use num_traits::Zero;

use super::{decompose, BoundingBox, RegularChain};
use crate::arith::{
    isolate_real_roots, principal_subresultant_coefficients, sign_of, subresultant_polys, Interval,
    MPoly, Rat,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Coord {
    var: usize,
    def: MPoly,
    iv: Interval,
    // Sign of the defining polynomial at `iv.lo` (over the coordinates below);
    // unused for point intervals.
    sign_lo: i8,
}

/// A real point given as the unique solution of a triangular set inside a
/// box.
///
/// Coordinates are stored in increasing variable order. A rational
/// coordinate `q` has defining polynomial `x - q` and a point interval; an
/// irrational one has a defining polynomial whose fiber over the lower
/// coordinates is squarefree with nonvanishing leading coefficient, and an
/// open isolating interval whose endpoints are not roots of that fiber.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SamplePoint {
    nvars: usize,
    coords: Vec<Coord>,
}

/// A real root of a fiber polynomial over a sample point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberRoot {
    pub def: MPoly,
    pub iv: Interval,
    sign_lo: i8,
}

impl FiberRoot {
    pub fn is_rational(&self) -> bool {
        self.iv.is_point()
    }
}

impl SamplePoint {
    /// The point of `R^0` inside a ring of `nvars` variables.
    pub fn origin(nvars: usize) -> Self {
        SamplePoint {
            nvars,
            coords: vec![],
        }
    }

    pub fn from_rationals(nvars: usize, values: &[Rat]) -> Self {
        let mut p = SamplePoint::origin(nvars);
        for (v, q) in values.iter().enumerate() {
            p = p.push_rational(v, q.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of coordinates.
    pub fn level(&self) -> usize {
        self.coords.len()
    }

    pub fn vars(&self) -> Vec<usize> {
        self.coords.iter().map(|c| c.var).collect()
    }

    fn index_of(&self, v: usize) -> Option<usize> {
        self.coords.iter().position(|c| c.var == v)
    }

    fn check_above(&self, v: usize) {
        assert!(
            self.coords.last().is_none_or(|c| c.var < v),
            "coordinates must be added in increasing variable order"
        );
    }

    pub fn push_rational(&self, v: usize, q: Rat) -> SamplePoint {
        self.check_above(v);
        let def = &MPoly::var(self.nvars, v) - &MPoly::constant(self.nvars, q.clone());
        let mut p = self.clone();
        p.coords.push(Coord {
            var: v,
            def,
            iv: Interval::point(q),
            sign_lo: 0,
        });
        p
    }

    pub fn push_root(&self, v: usize, root: FiberRoot) -> SamplePoint {
        self.check_above(v);
        if root.iv.is_point() {
            return self.push_rational(v, root.iv.lo);
        }
        let mut p = self.clone();
        p.coords.push(Coord {
            var: v,
            def: root.def,
            iv: root.iv,
            sign_lo: root.sign_lo,
        });
        p
    }

    /// The point without its coordinates at or above `v`.
    pub fn truncate_below(&self, v: usize) -> SamplePoint {
        SamplePoint {
            nvars: self.nvars,
            coords: self.coords.iter().filter(|c| c.var < v).cloned().collect(),
        }
    }

    /// Keep only the listed variables.
    pub fn restrict_to(&self, vars: &[usize]) -> SamplePoint {
        SamplePoint {
            nvars: self.nvars,
            coords: self
                .coords
                .iter()
                .filter(|c| vars.contains(&c.var))
                .cloned()
                .collect(),
        }
    }

    pub fn chain(&self) -> RegularChain {
        RegularChain::from_sorted(self.coords.iter().map(|c| c.def.clone()).collect())
    }

    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox {
            vars: self.vars(),
            boxes: self.coords.iter().map(|c| c.iv.clone()).collect(),
        }
    }

    pub fn interval(&self, v: usize) -> Option<&Interval> {
        self.index_of(v).map(|i| &self.coords[i].iv)
    }

    pub fn def(&self, v: usize) -> Option<&MPoly> {
        self.index_of(v).map(|i| &self.coords[i].def)
    }

    pub fn rational(&self, v: usize) -> Option<Rat> {
        self.interval(v)
            .filter(|iv| iv.is_point())
            .map(|iv| iv.lo.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(|c| c.iv.is_point())
    }

    /// Substitute every rational coordinate.
    pub fn substitute_rationals(&self, f: &MPoly) -> MPoly {
        let mut vals = vec![None; self.nvars];
        let mut any = false;
        for c in &self.coords {
            if c.iv.is_point() && f.depends_on(c.var) {
                vals[c.var] = Some(c.iv.lo.clone());
                any = true;
            }
        }
        if any {
            f.subst_many(&vals)
        } else {
            f.clone()
        }
    }

    fn boxes(&self) -> Vec<Interval> {
        let mut b = vec![Interval::point(Rat::zero()); self.nvars];
        for c in &self.coords {
            b[c.var] = c.iv.clone();
        }
        b
    }

    /// Index of the highest coordinate `f` depends on.
    fn top_index(&self, f: &MPoly) -> Option<usize> {
        let top = f.mvar()?;
        let i = self
            .index_of(top)
            .unwrap_or_else(|| panic!("x{} is not a coordinate of the point", top + 1));
        Some(i)
    }

    /// Exact sign of `f` at the point. `f` may only involve coordinate
    /// variables. Refines the box as a side effect.
    pub fn sign_at(&mut self, f: &MPoly) -> i8 {
        let f = self.substitute_rationals(f);
        if let Some(c) = f.constant_value() {
            return sign_of(&c);
        }
        let top = self.top_index(&f).unwrap();
        if let Some(s) = f.eval_interval(&self.boxes()).certain_sign() {
            if s != 0 {
                return s;
            }
        }
        // A few cheap refinements settle most nonzero signs before the exact
        // zero test is paid for.
        for _ in 0..3 {
            for i in 0..=top {
                self.refine_coord(i);
            }
            if let Some(s) = f.eval_interval(&self.boxes()).certain_sign() {
                if s != 0 {
                    return s;
                }
            }
        }
        if self.vanishes_at(&f, top) {
            return 0;
        }
        loop {
            for i in 0..=top {
                self.refine_coord(i);
            }
            if let Some(s) = f.eval_interval(&self.boxes()).certain_sign() {
                if s != 0 {
                    return s;
                }
            }
        }
    }

    /// Exact zero test of `f` at the point, `top` the index of its highest
    /// coordinate.
    fn vanishes_at(&mut self, f: &MPoly, top: usize) -> bool {
        let c = self.coords[top].clone();
        if c.iv.is_point() {
            let g = f.subst(c.var, &c.iv.lo);
            return self.sign_at(&g) == 0;
        }
        let below = self.truncate_below(c.var);
        let mut prefix = below;
        let g = prefix.gcd_at(f, &c.def, c.var);
        self.absorb_prefix(&prefix);
        if g.degree(c.var) == 0 {
            return false;
        }
        // g divides the squarefree defining fiber, so it has at most the one
        // root of the isolating interval, and that root is simple.
        let lo = g.subst(c.var, &c.iv.lo);
        let hi = g.subst(c.var, &c.iv.hi);
        let a = self.sign_at(&lo);
        let b = self.sign_at(&hi);
        a * b < 0
    }

    /// Copy refined lower coordinates back from a truncated copy.
    fn absorb_prefix(&mut self, prefix: &SamplePoint) {
        for (i, c) in prefix.coords.iter().enumerate() {
            self.coords[i] = c.clone();
        }
    }

    /// Halve the isolating interval of coordinate `i`.
    fn refine_coord(&mut self, i: usize) {
        let c = self.coords[i].clone();
        if c.iv.is_point() {
            return;
        }
        let mid = c.iv.midpoint();
        let h = c.def.subst(c.var, &mid);
        let mut prefix = self.truncate_below(c.var);
        let s = prefix.sign_at(&h);
        self.absorb_prefix(&prefix);
        let coord = &mut self.coords[i];
        if s == 0 {
            coord.def = &MPoly::var(self.nvars, c.var) - &MPoly::constant(self.nvars, mid.clone());
            coord.iv = Interval::point(mid);
        } else if s == c.sign_lo {
            coord.iv = Interval::new(mid, c.iv.hi);
        } else {
            coord.iv = Interval::new(c.iv.lo, mid);
        }
    }

    /// Halve every irrational interval once.
    pub fn refine(&mut self) {
        for i in 0..self.coords.len() {
            self.refine_coord(i);
        }
    }

    /// Refine until every interval has width at most `w`.
    pub fn refine_to(&mut self, w: &Rat) {
        while self.coords.iter().any(|c| c.iv.width() > *w) {
            self.refine();
        }
    }

    /// Remove leading coefficients (in `v`) that vanish at the point.
    pub fn strip_vanishing_leads(&mut self, f: &MPoly, v: usize) -> MPoly {
        let mut f = self.substitute_rationals(f);
        while f.degree(v) > 0 {
            let lc = f.lc(v);
            if self.sign_at(&lc) != 0 {
                break;
            }
            let d = f.degree(v);
            let lead = lc.shift(v, d);
            f = &f - &lead;
        }
        f
    }

    /// Gcd of the fibers of `a` and `b` (polynomials in `v` over the point)
    /// as a polynomial whose leading coefficient in `v` is nonzero at the
    /// point. A zero fiber acts as the identity for gcd.
    pub fn gcd_at(&mut self, a: &MPoly, b: &MPoly, v: usize) -> MPoly {
        let nv = self.nvars;
        let mut a = self.strip_vanishing_leads(a, v);
        let mut b = self.strip_vanishing_leads(b, v);
        for p in [&mut a, &mut b] {
            if p.degree(v) == 0 && self.sign_at(p) == 0 {
                *p = MPoly::zero(nv);
            }
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree(v) < b.degree(v) {
            std::mem::swap(&mut a, &mut b);
        }
        if b.degree(v) == 0 {
            return MPoly::one(nv);
        }
        if let (Some(ua), Some(ub)) = (a.to_upoly(v), b.to_upoly(v)) {
            return MPoly::from_upoly(nv, v, &ua.gcd(&ub)).normalized();
        }
        let psc = principal_subresultant_coefficients(&a, &b, v);
        let n = b.degree(v) as usize;
        for (j, pj) in psc.iter().enumerate().take(n) {
            if self.sign_at(pj) != 0 {
                if j == 0 {
                    return MPoly::one(nv);
                }
                let s = subresultant_polys(&a, &b, v);
                return self.substitute_rationals(&s[j]).normalized();
            }
        }
        b.normalized()
    }

    /// A polynomial whose fiber is the squarefree part of the fiber of `f`
    /// (leading coefficient nonzero at the point).
    pub fn squarefree_at(&mut self, f: &MPoly, v: usize) -> MPoly {
        let f = self.strip_vanishing_leads(f, v);
        if f.degree(v) == 0 {
            return f;
        }
        let g = self.gcd_at(&f, &f.derivative(v), v);
        if g.degree(v) == 0 {
            return f.normalized();
        }
        let (q, _, _) = f.pseudo_divide(&g, v);
        self.strip_vanishing_leads(&q, v).normalized()
    }

    /// Replace the defining chain by a branch chain over the same variables
    /// whose polynomials all vanish at this point.
    /// The interval of each coordinate stays isolating, since each new
    /// polynomial divides the old fiber, but its sign at the lower end may
    /// flip and is recomputed.
    fn adopt_branch(&mut self, branch: &RegularChain) {
        for (i, p) in branch.polys().iter().enumerate() {
            let c = self.coords[i].clone();
            debug_assert_eq!(p.mvar(), Some(c.var));
            if c.iv.is_point() || c.def == *p {
                continue;
            }
            let mut prefix = self.truncate_below(c.var);
            let s = prefix.sign_at(&p.subst(c.var, &c.iv.lo));
            self.absorb_prefix(&prefix);
            debug_assert_ne!(s, 0, "adopted polynomial vanishes at an interval end");
            let coord = &mut self.coords[i];
            coord.def = p.clone();
            coord.sign_lo = s;
        }
    }

    /// Make the leading coefficient of `f` in `v` regular modulo the chain
    /// by splitting the chain and keeping the branch through this point.
    fn regularize_initial(&mut self, f: &MPoly, v: usize) {
        let chain = self.chain();
        let lc = f.lc(v);
        if !decompose::iterated_resultant(&lc, &chain).is_zero() {
            return;
        }
        for (branch, zero) in decompose::regularize(&lc, &chain) {
            if zero {
                continue;
            }
            if branch.polys().iter().all(|p| self.sign_at(p) == 0) {
                self.adopt_branch(&branch);
                return;
            }
        }
        unreachable!("no regular branch passes through the sample point");
    }

    /// Real roots of the fiber of `f` in `v` over the point, sorted.
    ///
    /// `v` must lie above every coordinate. Fails with `NullifiedFiber`
    /// when the fiber is identically zero.
    pub fn fiber_roots(&mut self, f: &MPoly, v: usize) -> Result<Vec<FiberRoot>> {
        self.check_above(v);
        let nv = self.nvars;
        let f = self.squarefree_at(f, v);
        if f.degree(v) == 0 {
            return if self.sign_at(&f) == 0 {
                Err(Error::NullifiedFiber)
            } else {
                Ok(vec![])
            };
        }
        if let Some(u) = f.to_upoly(v) {
            let roots = isolate_real_roots(&u)?;
            return Ok(roots
                .into_iter()
                .map(|iv| {
                    if iv.is_point() {
                        FiberRoot {
                            def: &MPoly::var(nv, v) - &MPoly::constant(nv, iv.lo.clone()),
                            iv,
                            sign_lo: 0,
                        }
                    } else {
                        let sign_lo = u.sign_at(&iv.lo);
                        FiberRoot {
                            def: f.clone(),
                            iv,
                            sign_lo,
                        }
                    }
                })
                .collect());
        }
        self.regularize_initial(&f, v);
        let norm = decompose::iterated_resultant(&f, &self.chain());
        let u = norm
            .to_upoly(v)
            .expect("iterated resultant is univariate in the fiber variable");
        let mut out = Vec::new();
        for iv in isolate_real_roots(&u)? {
            if iv.is_point() {
                if self.sign_at(&f.subst(v, &iv.lo)) == 0 {
                    out.push(FiberRoot {
                        def: &MPoly::var(nv, v) - &MPoly::constant(nv, iv.lo.clone()),
                        iv,
                        sign_lo: 0,
                    });
                }
                continue;
            }
            let a = self.sign_at(&f.subst(v, &iv.lo));
            let b = self.sign_at(&f.subst(v, &iv.hi));
            if a * b < 0 {
                out.push(FiberRoot {
                    def: f.clone(),
                    iv,
                    sign_lo: a,
                });
            }
        }
        Ok(out)
    }

    /// Halve the interval of a fiber root of this point.
    pub fn refine_root(&mut self, root: &mut FiberRoot, v: usize) {
        if root.iv.is_point() {
            return;
        }
        let nv = self.nvars;
        let mid = root.iv.midpoint();
        let s = self.sign_at(&root.def.subst(v, &mid));
        if s == 0 {
            root.def = &MPoly::var(nv, v) - &MPoly::constant(nv, mid.clone());
            root.iv = Interval::point(mid);
        } else if s == root.sign_lo {
            root.iv = Interval::new(mid, root.iv.hi.clone());
        } else {
            root.iv = Interval::new(root.iv.lo.clone(), mid);
        }
    }

    /// Sign of `f` at the point extended by `x_v = root`.
    pub fn sign_at_root(&self, f: &MPoly, v: usize, root: &FiberRoot) -> i8 {
        let mut ext = self.push_root(v, root.clone());
        ext.sign_at(f)
    }

    /// A rational inside every isolating interval: the box midpoint,
    /// useful for display.
    pub fn approximate(&self) -> Vec<(usize, Rat)> {
        self.coords
            .iter()
            .map(|c| (c.var, c.iv.midpoint()))
            .collect()
    }

    /// Check that the stored description is internally consistent: each
    /// defining polynomial vanishes at the point and intervals isolate.
    pub fn validate(&self) -> bool {
        let p = self.clone();
        for i in 0..p.coords.len() {
            let c = p.coords[i].clone();
            let mut prefix = p.truncate_below(c.var);
            if c.iv.is_point() {
                if prefix.sign_at(&c.def.subst(c.var, &c.iv.lo)) != 0 {
                    return false;
                }
            } else {
                let a = prefix.sign_at(&c.def.subst(c.var, &c.iv.lo));
                let b = prefix.sign_at(&c.def.subst(c.var, &c.iv.hi));
                if a * b >= 0 || a != c.sign_lo {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    fn x(n: usize) -> MPoly {
        MPoly::var(n, 0)
    }
    fn y(n: usize) -> MPoly {
        MPoly::var(n, 1)
    }
    fn k(n: usize, c: i64) -> MPoly {
        MPoly::constant(n, rat(c))
    }

    fn sqrt2() -> SamplePoint {
        let mut p = SamplePoint::origin(2);
        let roots = p.fiber_roots(&(&x(2).pow(2) - &k(2, 2)), 0).unwrap();
        assert_eq!(roots.len(), 2);
        p.push_root(0, roots[1].clone())
    }

    #[test]
    fn signs_at_sqrt_two() {
        let mut p = sqrt2();
        assert_eq!(p.sign_at(&(&x(2).pow(2) - &k(2, 2))), 0);
        assert_eq!(p.sign_at(&(&x(2) - &k(2, 1))), 1);
        assert_eq!(p.sign_at(&(&x(2).scale(&ratio(-10, 7)) + &k(2, 2))), -1);
        assert_eq!(p.sign_at(&(&x(2).pow(3) - &x(2).scale(&rat(2)))), 0);
    }

    #[test]
    fn nested_roots() {
        // y^2 = x at x = sqrt 2: y = +-2^(1/4)
        let mut p = sqrt2();
        let f = &y(2).pow(2) - &x(2);
        let roots = p.fiber_roots(&f, 1).unwrap();
        assert_eq!(roots.len(), 2);
        let mut top = p.push_root(1, roots[1].clone());
        assert_eq!(top.sign_at(&(&y(2).pow(4) - &k(2, 2))), 0);
        assert_eq!(top.sign_at(&(&y(2) - &x(2))), -1);
        assert!(top.validate());
    }

    #[test]
    fn gcd_over_point() {
        // at x = 0: gcd(y - x, y + x) = y
        let mut p = SamplePoint::from_rationals(2, &[rat(0)]);
        let g = p.gcd_at(&(&y(2) - &x(2)), &(&y(2) + &x(2)), 1);
        assert_eq!(g.degree(1), 1);
        // at x = sqrt 2: y^2 - 2 and y - x share y - sqrt 2
        let mut q = sqrt2();
        let g = q.gcd_at(&(&y(2).pow(2) - &k(2, 2)), &(&y(2) - &x(2)), 1);
        assert_eq!(g.degree(1), 1);
        let g = q.gcd_at(&(&y(2).pow(2) - &k(2, 3)), &(&y(2) - &x(2)), 1);
        assert_eq!(g.degree(1), 0);
    }

    #[test]
    fn fiber_roots_with_vanishing_lead() {
        // (x^2 - 2) y^2 + y - 1 at x = sqrt 2 is y - 1
        let mut p = sqrt2();
        let f = &(&(&(&x(2).pow(2) - &k(2, 2)) * &y(2).pow(2)) + &y(2)) - &k(2, 1);
        let roots = p.fiber_roots(&f, 1).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].iv.contains(&rat(1)));
    }

    #[test]
    fn nullified_fiber() {
        let mut p = SamplePoint::from_rationals(2, &[rat(0)]);
        let f = &x(2) * &(&y(2) + &k(2, 1));
        assert!(matches!(p.fiber_roots(&f, 1), Err(Error::NullifiedFiber)));
    }
}
