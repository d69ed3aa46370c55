//! Resultants, discriminants and subresultants.
//!
//! The resultant itself runs the subresultant pseudo-remainder sequence;
//! principal subresultant coefficients and subresultant polynomials come
//! from fraction-free determinants of the subresultant matrices.

use super::{rat, MPoly};
use crate::error::{Error, Result};

/// Fraction-free (Bareiss) determinant of a square matrix of polynomials.
pub fn bareiss_determinant(mut m: Vec<Vec<MPoly>>, nvars: usize) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one(nvars);
    }
    let mut negate = false;
    let mut prev = MPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return MPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Resultant of `p` and `q` with respect to `v`.
///
/// A nonzero operand of degree zero in `v` yields the usual power
/// `c^deg_v(other)`; both of degree zero, or either zero, is rejected.
pub fn resultant(p: &MPoly, q: &MPoly, v: usize) -> Result<MPoly> {
    let n = p.nvars();
    let (dp, dq) = (p.degree(v), q.degree(v));
    if p.is_zero() || q.is_zero() || (dp == 0 && dq == 0) {
        return Err(Error::NotResultantOperand(v));
    }
    if dq == 0 {
        return Ok(q.pow(dp));
    }
    if dp == 0 {
        return Ok(p.pow(dq));
    }
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut s = 1i64;
    if dp < dq {
        std::mem::swap(&mut a, &mut b);
        if dp % 2 == 1 && dq % 2 == 1 {
            s = -1;
        }
    }
    let mut g = MPoly::one(n);
    let mut h = MPoly::one(n);
    loop {
        let (da, db) = (a.degree(v), b.degree(v));
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = a.prem(&b, v);
        a = b;
        let denom = &g * &h.pow(delta);
        b = r.div_exact(&denom).expect("subresultant division is exact");
        g = a.lc(v);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant division is exact")
        };
        if b.is_zero() {
            return Ok(MPoly::zero(n));
        }
        if b.degree(v) == 0 {
            let da = a.degree(v);
            let res = b
                .pow(da)
                .div_exact(&h.pow(da - 1))
                .expect("subresultant division is exact");
            return Ok(res.scale(&rat(s)));
        }
    }
}

/// Discriminant `(-1)^{d(d-1)/2} res_v(p, p') / lc_v(p)`.
pub fn discriminant(p: &MPoly, v: usize) -> Result<MPoly> {
    let d = p.degree(v);
    if d < 2 {
        return Err(Error::DegreeTooLow(v));
    }
    let r = resultant(p, &p.derivative(v), v)?;
    let q = r
        .div_exact(&p.lc(v))
        .expect("leading coefficient divides the resultant");
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Rows of the `j`-th subresultant matrix, highest power first.
fn subresultant_rows(a: &MPoly, b: &MPoly, v: usize, j: u32) -> Vec<Vec<MPoly>> {
    let nv = a.nvars();
    let (m, n) = (a.degree(v), b.degree(v));
    let cols = (m + n - j) as usize;
    let ca = a.coeffs(v);
    let cb = b.coeffs(v);
    let mut rows = Vec::new();
    let mut push = |coeffs: &[MPoly], deg: u32, shift: u32| {
        let mut row = vec![MPoly::zero(nv); cols];
        for (k, c) in coeffs.iter().enumerate() {
            let power = k as u32 + shift;
            let col = (m + n - j - 1 - power) as usize;
            row[col] = c.clone();
        }
        let _ = deg;
        rows.push(row);
    };
    for r in 0..(n - j) {
        push(&ca, m, n - j - 1 - r);
    }
    for r in 0..(m - j) {
        push(&cb, n, m - j - 1 - r);
    }
    rows
}

fn minor_with_column(rows: &[Vec<MPoly>], lead: usize, col: usize, nv: usize) -> MPoly {
    let mat: Vec<Vec<MPoly>> = rows
        .iter()
        .map(|r| {
            let mut x: Vec<MPoly> = r[..lead].to_vec();
            x.push(r[col].clone());
            x
        })
        .collect();
    bareiss_determinant(mat, nv)
}

/// Principal subresultant coefficients `psc_0, ..., psc_n` of `a` and `b`
/// in `v`, where `n = deg_v b <= deg_v a`. The last entry is
/// `lc_v(b)^(deg_v a - deg_v b)`.
pub fn principal_subresultant_coefficients(a: &MPoly, b: &MPoly, v: usize) -> Vec<MPoly> {
    let nv = a.nvars();
    let (m, n) = (a.degree(v), b.degree(v));
    assert!(m >= n, "principal subresultants need deg a >= deg b");
    if b.is_zero() {
        return vec![MPoly::zero(nv)];
    }
    let mut out = Vec::with_capacity(n as usize + 1);
    for j in 0..n {
        let rows = subresultant_rows(a, b, v, j);
        let size = (m + n - 2 * j) as usize;
        let mat: Vec<Vec<MPoly>> = rows.iter().map(|r| r[..size].to_vec()).collect();
        out.push(bareiss_determinant(mat, nv));
    }
    out.push(b.lc(v).pow(m - n));
    out
}

/// Subresultant polynomials `S_0, ..., S_{n-1}` (determinantal definition),
/// `n = deg_v b <= deg_v a`.
pub fn subresultant_polys(a: &MPoly, b: &MPoly, v: usize) -> Vec<MPoly> {
    let nv = a.nvars();
    let (m, n) = (a.degree(v), b.degree(v));
    assert!(m >= n, "subresultants need deg a >= deg b");
    let mut out = Vec::with_capacity(n as usize);
    for j in 0..n {
        let rows = subresultant_rows(a, b, v, j);
        let lead = (m + n - 2 * j - 1) as usize;
        let mut s = MPoly::zero(nv);
        for i in 0..=j {
            let col = (m + n - j - 1 - i) as usize;
            let d = minor_with_column(&rows, lead, col, nv);
            s = &s + &d.shift(v, i);
        }
        out.push(s);
    }
    out
}

/// Principal subresultant coefficient chain of `p` and `q` in `v`
/// (`deg_v p >= deg_v q`).
pub fn subresultant_prs(p: &MPoly, q: &MPoly, v: usize) -> Result<Vec<MPoly>> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    if p.degree(v) < q.degree(v) {
        return Err(Error::NotResultantOperand(v));
    }
    Ok(principal_subresultant_coefficients(p, q, v))
}
