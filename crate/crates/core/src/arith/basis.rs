use super::MPoly;

/// Content of `p` with respect to `v`: gcd of its coefficients in `v`.
pub fn content(p: &MPoly, v: usize) -> MPoly {
    let mut g = MPoly::zero(p.nvars());
    for c in p.coeffs(v) {
        g = gcd(&g, &c);
        if g.is_constant() && !g.is_zero() {
            return MPoly::one(p.nvars());
        }
    }
    g
}

/// Greatest common divisor over Q, normalized (integer, primitive, positive
/// leading coefficient). `gcd(0, 0) = 0`.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    let nv = a.nvars();
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one(nv);
    }
    let v = a.mvar().max(b.mvar()).unwrap();
    if !a.depends_on(v) {
        return gcd(a, &content(b, v));
    }
    if !b.depends_on(v) {
        return gcd(&content(a, v), b);
    }
    let ca = content(a, v);
    let cb = content(b, v);
    let c = gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).unwrap().normalized();
    let mut q = b.div_exact(&cb).unwrap().normalized();
    if p.degree(v) < q.degree(v) {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        let r = p.prem(&q, v);
        if r.is_zero() {
            break q;
        }
        if r.degree(v) == 0 {
            break MPoly::one(nv);
        }
        let cr = content(&r, v);
        p = q;
        q = r.div_exact(&cr).unwrap().normalized();
    };
    (&c * &g).normalized()
}

/// Squarefree part over Q (product of the distinct irreducible factors, up
/// to a constant), normalized.
pub fn squarefree_part(p: &MPoly) -> MPoly {
    let v = match p.mvar() {
        None => {
            return if p.is_zero() {
                p.clone()
            } else {
                MPoly::one(p.nvars())
            }
        }
        Some(v) => v,
    };
    let c = content(p, v);
    let pp = p.div_exact(&c).unwrap();
    let g = gcd(&pp, &pp.derivative(v));
    let s = pp.div_exact(&g).unwrap();
    (&squarefree_part(&c) * &s).normalized()
}

/// Split `p` into its primitive part and the recursive contents below it.
fn primitive_components(p: &MPoly, out: &mut Vec<MPoly>) {
    let v = match p.mvar() {
        None => return,
        Some(v) => v,
    };
    let c = content(p, v);
    out.push(p.div_exact(&c).unwrap().normalized());
    primitive_components(&c, out);
}

/// Pairwise coprime, squarefree, primitive polynomials whose product has
/// the same zero set as the product of `polys`. Constants are dropped.
///
/// Refines by a gcd cascade rather than a full factorization. Output is
/// sorted by main variable, then degree, then printed form.
pub fn squarefree_coprime_basis(polys: &[MPoly]) -> Vec<MPoly> {
    let mut pieces = Vec::new();
    for p in polys {
        if !p.is_zero() {
            primitive_components(p, &mut pieces);
        }
    }
    let mut basis: Vec<MPoly> = Vec::new();
    for p in pieces {
        let mut f = squarefree_part(&p);
        if f.is_constant() {
            continue;
        }
        let mut i = 0;
        while i < basis.len() && !f.is_constant() {
            let g = gcd(&f, &basis[i]);
            if g.is_constant() {
                i += 1;
                continue;
            }
            let b = basis.remove(i);
            let rest = b.div_exact(&g).unwrap().normalized();
            f = f.div_exact(&g).unwrap().normalized();
            basis.insert(i, g);
            i += 1;
            if !rest.is_constant() {
                basis.insert(i, rest);
                i += 1;
            }
        }
        if !f.is_constant() {
            basis.push(f);
        }
    }
    sort_polys(&mut basis);
    basis.dedup();
    basis
}

/// Deterministic ordering used for every polynomial set handed out.
pub(crate) fn sort_polys(v: &mut [MPoly]) {
    v.sort_by_cached_key(|p| {
        (
            p.mvar(),
            p.degree(p.mvar().unwrap_or(0)),
            p.total_degree(),
            p.to_string(),
        )
    });
}
