use num_traits::{One, Signed, Zero};

use super::{rat, sign_of, Rat};

/// Dense univariate polynomial over the rationals, lowest degree first.
/// Trailing zeros are trimmed; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    c: Vec<Rat>,
}

impl UPoly {
    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UPoly::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Rat {
        self.c.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rat) -> i8 {
        sign_of(&self.eval(x))
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * rat(k as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lc();
        UPoly::new(self.c.iter().map(|a| a / &l).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly::new(self.c.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::new(vec![]);
        }
        let mut c = vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    /// Euclidean division `(q, r)`.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dd = d.degree();
        let l = d.lc();
        if r.len() < d.c.len() {
            return (UPoly::new(vec![]), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = &r[k + dd] / &l;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= &t * b;
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.div_rem(d).1
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree part, monic.
    pub fn squarefree(&self) -> UPoly {
        if self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Replace `x` by `a + (b - a) x`.
    pub fn affine(&self, a: &Rat, w: &Rat) -> UPoly {
        // Horner on polynomials: acc = acc * (a + w x) + c_k
        let mut acc: Vec<Rat> = vec![];
        for ck in self.c.iter().rev() {
            let mut next = vec![Rat::zero(); acc.len() + 1];
            for (i, v) in acc.iter().enumerate() {
                next[i] += v * a;
                next[i + 1] += v * w;
            }
            next[0] += ck;
            acc = next;
        }
        UPoly::new(acc)
    }

    /// Coefficients of `(1 + x)^d p(1 / (1 + x))`, used by the Descartes bound
    /// on (0, 1).
    pub fn descartes_transform(&self) -> UPoly {
        let mut rev = self.c.clone();
        rev.reverse();
        UPoly::new(rev).affine(&Rat::one(), &Rat::one())
    }

    /// Number of sign variations in the coefficient sequence.
    pub fn sign_variations(&self) -> usize {
        let mut last = 0i8;
        let mut n = 0;
        for a in &self.c {
            let s = sign_of(a);
            if s != 0 {
                if last != 0 && s != last {
                    n += 1;
                }
                last = s;
            }
        }
        n
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    pub fn cauchy_bound(&self) -> Rat {
        let l = self.lc().abs();
        let m = self.c[..self.c.len().saturating_sub(1)]
            .iter()
            .map(|a| a.abs() / &l)
            .max()
            .unwrap_or_else(Rat::zero);
        m + Rat::one()
    }
}
