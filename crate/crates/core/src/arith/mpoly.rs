use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat, Interval, Rat, UPoly, VarOrder};

/// Sparse multivariate polynomial over the rationals.
///
/// Variable `i` is `x_{i+1}`; the main variable is the highest-indexed
/// variable of positive degree. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        MPoly { nvars, terms }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, rat(1))
    }

    /// The polynomial `x_{v+1}`.
    pub fn var(nvars: usize, v: usize) -> Self {
        assert!(v < nvars);
        let mut e = vec![0; nvars];
        e[v] = 1;
        Self::monomial(e, rat(1))
    }

    pub fn monomial(exps: Vec<u32>, c: Rat) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MPoly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rat)>) -> Self {
        let mut p = MPoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    /// Dense univariate polynomial in `v`, coefficients from lowest degree.
    pub fn univariate(nvars: usize, v: usize, coeffs: &[Rat]) -> Self {
        let mut p = MPoly::zero(nvars);
        for (d, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[v] = d as u32;
            p.add_term(e, c.clone());
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let s = slot.get() + c;
                if s.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    /// Value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    /// Highest variable occurring with positive degree.
    pub fn mvar(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.depends_on(v))
    }

    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.depends_on(v)).collect()
    }

    /// Coefficients with respect to `v`, indexed by degree.
    pub fn coeffs(&self, v: usize) -> Vec<MPoly> {
        let d = self.degree(v) as usize;
        let mut out = vec![MPoly::zero(self.nvars); d + 1];
        if self.is_zero() {
            return vec![];
        }
        for (e, c) in &self.terms {
            let k = e[v] as usize;
            let mut e2 = e.clone();
            e2[v] = 0;
            out[k].terms.insert(e2, c.clone());
        }
        out
    }

    pub fn from_coeffs(nvars: usize, v: usize, coeffs: &[MPoly]) -> Self {
        let mut p = MPoly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, q) in &c.terms {
                debug_assert_eq!(e[v], 0);
                let mut e2 = e.clone();
                e2[v] = k as u32;
                p.add_term(e2, q.clone());
            }
        }
        p
    }

    /// Leading coefficient with respect to `v`.
    pub fn lc(&self, v: usize) -> MPoly {
        self.coeffs(v)
            .pop()
            .unwrap_or_else(|| MPoly::zero(self.nvars))
    }

    /// Leading coefficient with respect to the main variable.
    pub fn initial(&self) -> MPoly {
        match self.mvar() {
            Some(v) => self.lc(v),
            None => self.clone(),
        }
    }

    /// The polynomial minus its leading term in the main variable.
    pub fn tail(&self) -> Option<MPoly> {
        let v = self.mvar()?;
        let d = self.degree(v);
        let mut p = self.clone();
        p.terms.retain(|e, _| e[v] != d);
        Some(p)
    }

    pub fn derivative(&self, v: usize) -> MPoly {
        let mut p = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut e2 = e.clone();
                e2[v] -= 1;
                p.add_term(e2, c * rat(e[v] as i64));
            }
        }
        p
    }

    /// Substitute `x_v := q`.
    pub fn subst(&self, v: usize, q: &Rat) -> MPoly {
        let mut p = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[v];
            e2[v] = 0;
            p.add_term(e2, c * pow_rat(q, k));
        }
        p
    }

    /// Substitute a rational for each `Some` entry.
    pub fn subst_many(&self, values: &[Option<Rat>]) -> MPoly {
        let mut p = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let mut c2 = c.clone();
            for (v, val) in values.iter().enumerate() {
                if let Some(q) = val {
                    c2 *= pow_rat(q, e2[v]);
                    e2[v] = 0;
                }
            }
            p.add_term(e2, c2);
        }
        p
    }

    /// Evaluate at a full point (missing trailing coordinates read as zero).
    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= pow_rat(&point[v], k);
                }
            }
            acc += t;
        }
        acc
    }

    /// Interval enclosure of the values over a box (one interval per variable).
    pub fn eval_interval(&self, boxes: &[Interval]) -> Interval {
        let mut acc = Interval::point(Rat::zero());
        for (e, c) in &self.terms {
            let mut t = Interval::point(c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&interval_pow(&boxes[v], k));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn scale(&self, q: &Rat) -> MPoly {
        if q.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Multiply by `x_v^k`.
    pub fn shift(&self, v: usize, k: u32) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[v] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Sign of the leading coefficient, descending recursively through main variables.
    pub fn leading_sign(&self) -> i8 {
        let mut p = self.clone();
        loop {
            if let Some(c) = p.constant_value() {
                return super::sign_of(&c);
            }
            p = p.initial();
        }
    }

    /// Rescale to integer coefficients with unit content and a positive
    /// recursive leading coefficient. Zero stays zero.
    pub fn normalized(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
        }
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            num = num.gcd(&(c.numer() * (&den / c.denom())));
        }
        let mut f = Rat::new(den, num);
        if self.leading_sign() < 0 {
            f = -f;
        }
        self.scale(&f)
    }

    /// Pseudo-division by `b` in `v`: returns `(q, r, e)` with
    /// `lc_v(b)^e * self = q * b + r` and `deg_v r < deg_v b`.
    pub fn pseudo_divide(&self, b: &MPoly, v: usize) -> (MPoly, MPoly, u32) {
        assert!(!b.is_zero(), "pseudo-division by zero");
        let db = b.degree(v);
        let lcb = b.lc(v);
        let mut r = self.clone();
        let mut q = MPoly::zero(self.nvars);
        let da = self.degree(v);
        if self.is_zero() || da < db {
            return (q, r, 0);
        }
        let full = da - db + 1;
        let mut e = 0;
        while !r.is_zero() && r.degree(v) >= db {
            let dr = r.degree(v);
            let lcr = r.lc(v);
            let t = lcr.shift(v, dr - db);
            q = &(&q * &lcb) + &t;
            r = &(&r * &lcb) - &(&t * b);
            e += 1;
        }
        if e < full {
            let k = lcb.pow(full - e);
            q = &q * &k;
            r = &r * &k;
        }
        (q, r, full)
    }

    pub fn prem(&self, b: &MPoly, v: usize) -> MPoly {
        self.pseudo_divide(b, v).1
    }

    /// Exact quotient `self / b`, or `None` when `b` does not divide.
    pub fn div_exact(&self, b: &MPoly) -> Option<MPoly> {
        if b.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(MPoly::zero(self.nvars));
        }
        let v = match b.mvar() {
            None => {
                let c = b.constant_value().unwrap();
                return Some(self.scale(&c.recip()));
            }
            Some(v) => v,
        };
        let db = b.degree(v);
        let lcb = b.lc(v);
        let mut r = self.clone();
        let mut q = MPoly::zero(self.nvars);
        while !r.is_zero() {
            let dr = r.degree(v);
            if dr < db {
                return None;
            }
            let t = r.lc(v).div_exact(&lcb)?.shift(v, dr - db);
            r = &r - &(&t * b);
            q = &q + &t;
        }
        Some(q)
    }

    /// The univariate polynomial in `v`, if no other variable occurs.
    pub fn to_upoly(&self, v: usize) -> Option<UPoly> {
        if (0..self.nvars).any(|w| w != v && self.depends_on(w)) {
            return None;
        }
        let d = self.degree(v) as usize;
        let mut c = vec![Rat::zero(); if self.is_zero() { 0 } else { d + 1 }];
        for (e, q) in &self.terms {
            c[e[v] as usize] = q.clone();
        }
        Some(UPoly::new(c))
    }

    pub fn from_upoly(nvars: usize, v: usize, u: &UPoly) -> MPoly {
        MPoly::univariate(nvars, v, u.coeffs())
    }

    /// Embed into a ring with more variables (new variables appended).
    pub fn extend_vars(&self, nvars: usize) -> MPoly {
        assert!(nvars >= self.nvars);
        MPoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.resize(nvars, 0);
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Render with the given variable names.
    pub fn display<'a>(&'a self, order: &'a VarOrder) -> impl fmt::Display + 'a {
        Render {
            poly: self,
            names: Some(order),
        }
    }
}

fn pow_rat(q: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k {
        acc *= q;
    }
    acc
}

fn interval_pow(i: &Interval, k: u32) -> Interval {
    if k.is_multiple_of(2) && i.lo.is_negative() && i.hi.is_positive() {
        let m = std::cmp::max(i.lo.abs(), i.hi.abs());
        Interval::new(Rat::zero(), pow_rat(&m, k))
    } else {
        i.pow(k)
    }
}

struct Render<'a> {
    poly: &'a MPoly,
    names: Option<&'a VarOrder>,
}

impl fmt::Display for Render<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Highest terms first: compare exponent vectors from the top variable.
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| {
            let ka: Vec<u32> = a.0.iter().rev().copied().collect();
            let kb: Vec<u32> = b.0.iter().rev().copied().collect();
            kb.cmp(&ka)
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = match self.names {
                        Some(o) if v < o.len() => o.name(v).to_string(),
                        _ => format!("x{}", v + 1),
                    };
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Render {
            poly: self,
            names: None,
        }
        .fmt(f)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut p = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&rat(-1))
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(self, rhs: MPoly) -> MPoly {
        &self + &rhs
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(self, rhs: MPoly) -> MPoly {
        &self - &rhs
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        &self * &rhs
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
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

    #[test]
    fn canonical_form_drops_zero_terms() {
        let p = &(&x() + &y()) - &y();
        assert_eq!(p, x());
        assert_eq!(p.num_terms(), 1);
        assert!((&x() - &x()).is_zero());
    }

    #[test]
    fn main_variable_and_tail() {
        // x*y^2 + 3y + 1
        let p = &(&(&x() * &y().pow(2)) + &y().scale(&rat(3))) + &MPoly::one(2);
        assert_eq!(p.mvar(), Some(1));
        assert_eq!(p.initial(), x());
        let t = p.tail().unwrap();
        assert_eq!(t, &y().scale(&rat(3)) + &MPoly::one(2));
        assert!(y().pow(2).tail().unwrap().is_zero());
        assert!(MPoly::one(2).tail().is_none());
    }

    #[test]
    fn pseudo_division_identity() {
        let a = &(&x() * &y().pow(3)) + &(&y() - &MPoly::one(2));
        let b = &(&x().pow(2) * &y()) + &MPoly::one(2);
        let (q, r, e) = a.pseudo_divide(&b, 1);
        let lhs = &b.lc(1).pow(e) * &a;
        assert_eq!(lhs, &(&q * &b) + &r);
        assert!(r.degree(1) < b.degree(1));
    }

    #[test]
    fn exact_division() {
        let a = &x() - &y();
        let b = &x() + &y();
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!((&prod + &MPoly::one(2)).div_exact(&a), None);
    }

    #[test]
    fn normalized_is_primitive_with_positive_lead() {
        let p = &y().scale(&crate::arith::ratio(-2, 3)) + &x().scale(&crate::arith::ratio(4, 9));
        let n = p.normalized();
        // -2/3 y + 4/9 x -> 3y - 2x
        assert_eq!(n, &y().scale(&rat(3)) - &x().scale(&rat(2)));
    }

    #[test]
    fn interval_enclosure_contains_value() {
        let p = &(&x().pow(2) * &y()) - &x();
        let b = [
            Interval::new(rat(-1), rat(2)),
            Interval::new(crate::arith::ratio(1, 2), rat(1)),
        ];
        let enc = p.eval_interval(&b);
        for xv in [-1, 0, 1, 2] {
            let v = p.eval(&[rat(xv), crate::arith::ratio(3, 4)]);
            assert!(enc.contains(&v));
        }
    }
}
