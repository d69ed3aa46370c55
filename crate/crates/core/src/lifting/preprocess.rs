use super::Cell;
use crate::arith::{sort_polys, MPoly, Rat};
use crate::chains::{
    compatible_with_sample, regularize, squarefree_factorization_mod_chain, tail, triangularize,
    RegularChain,
};
use crate::error::{Error, Result};

/// Values of the sector coordinates of `c` (rational by construction),
/// indexed by variable.
fn sector_values(c: &Cell) -> Vec<Option<Rat>> {
    let mut vals = vec![None; c.sample.nvars()];
    for (v, &e) in c.index.entries().iter().enumerate() {
        if e % 2 == 1 {
            vals[v] = c.sample.rational(v);
        }
    }
    vals
}

/// Substitute the sector coordinates of `c` into `p`.
pub(crate) fn restrict(c: &Cell, p: &MPoly) -> MPoly {
    let vals = sector_values(c);
    if vals.iter().all(Option::is_none) {
        p.clone()
    } else {
        p.subst_many(&vals)
    }
}

/// The first branch of `branches` that passes through the sample of `c`.
fn pick<T>(c: &Cell, branches: Vec<(RegularChain, T)>) -> Result<(RegularChain, T)> {
    for (chain, t) in branches {
        if compatible_with_sample(&chain, &c.sample)? {
            return Ok((chain, t));
        }
    }
    Err(Error::PreprocessingFailed(
        "no branch passes through the sample point".into(),
    ))
}

/// The chain of the section coordinates of `c`, with sector coordinates
/// substituted, split where needed so that it is regular and passes
/// through the sample.
pub fn restriction_chain(c: &Cell) -> Result<RegularChain> {
    let mut chain = RegularChain::empty();
    for (v, &e) in c.index.entries().iter().enumerate() {
        if e % 2 == 1 {
            continue;
        }
        let t = restrict(c, c.sample.def(v).expect("sample has every coordinate"));
        let (branch, zero) = pick(c, regularize(&t.initial(), &chain))?;
        if zero {
            return Err(Error::PreprocessingFailed(format!(
                "initial of {t} vanishes at the sample"
            )));
        }
        chain = branch.with(t);
    }
    Ok(chain)
}

/// Replace `p` by polynomials that are pairwise coprime over `c` and have
/// the same real zeros there.
pub fn make_coprime(p: &[MPoly], rc_hat: &RegularChain, c: &Cell) -> Result<Vec<MPoly>> {
    let v = c.sample.level();
    let mut out: Vec<MPoly> = Vec::new();
    for f in p {
        for comp in triangularize(std::slice::from_ref(f), &out, rc_hat)? {
            if comp.mvar() != Some(v) {
                continue;
            }
            if !compatible_with_sample(&comp.chain, &c.sample)? {
                continue;
            }
            let g = comp.chain.poly_for(v).unwrap().normalized();
            if !out.contains(&g) {
                out.push(g);
            }
        }
    }
    sort_polys(&mut out);
    Ok(out)
}

/// Replace each polynomial by one that is squarefree over `c` with the same
/// real zeros there.
pub fn make_squarefree(p: &[MPoly], rc_hat: &RegularChain, c: &Cell) -> Result<Vec<MPoly>> {
    let v = c.sample.level();
    let mut out: Vec<MPoly> = Vec::new();
    'next: for f in p {
        let mut f = f.clone();
        let mut chain = rc_hat.clone();
        loop {
            if f.mvar() != Some(v) {
                continue 'next;
            }
            let (branch, zero) = pick(c, regularize(&f.initial(), &chain))?;
            chain = branch;
            if !zero {
                break;
            }
            f = tail(&f)?;
        }
        let comps = squarefree_factorization_mod_chain(&f, &chain)?
            .into_iter()
            .map(|s| (s.chain, s.factors))
            .collect();
        let (_, factors) = pick(c, comps)?;
        let g = factors
            .iter()
            .fold(MPoly::one(f.nvars()), |acc, (h, _)| &acc * h)
            .normalized();
        if g.mvar() == Some(v) && !out.contains(&g) {
            out.push(g);
        }
    }
    sort_polys(&mut out);
    Ok(out)
}

/// The lifting set as handed to the stack construction over `c`.
pub fn preprocess(c: &Cell, l: &[MPoly]) -> Result<Vec<MPoly>> {
    if c.index.entries().iter().all(|e| e % 2 == 1) {
        return Ok(l.to_vec());
    }
    let rc_hat = restriction_chain(c)?;
    let p: Vec<MPoly> = l.iter().map(|f| restrict(c, f)).collect();
    let p = make_coprime(&p, &rc_hat, c)?;
    make_squarefree(&p, &rc_hat, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::chains::SamplePoint;
    use crate::lifting::CellIndex;

    fn x() -> MPoly {
        MPoly::var(2, 0)
    }
    fn y() -> MPoly {
        MPoly::var(2, 1)
    }
    fn k(c: i64) -> MPoly {
        MPoly::constant(2, rat(c))
    }
    fn section_at(q: i64) -> Cell {
        Cell {
            index: CellIndex::new(vec![2]),
            sample: SamplePoint::from_rationals(2, &[rat(q)]),
            parent: None,
        }
    }
    fn prep(c: &Cell, l: &[MPoly]) -> (Vec<MPoly>, Vec<MPoly>) {
        let rc = restriction_chain(c).unwrap();
        let co = make_coprime(l, &rc, c).unwrap();
        let sq = make_squarefree(l, &rc, c).unwrap();
        (co, sq)
    }

    #[test]
    fn coprime_examples() {
        let c = section_at(0);
        let (co, _) = prep(&c, &[&y() - &x(), &y() - &x().scale(&rat(2))]);
        assert_eq!(co.len(), 1);
        assert_eq!(co[0].subst(0, &rat(0)), y());

        let (co, _) = prep(&c, &[&y() - &k(1), &y() + &k(1)]);
        assert_eq!(co.len(), 2);

        // y^2 - x is y^2 over x = 0: one polynomial survives, and it is y
        // once made squarefree
        let (co, _) = prep(&c, &[&y().pow(2) - &x(), y()]);
        assert_eq!(co.len(), 1);
        let rc = restriction_chain(&c).unwrap();
        let sq = make_squarefree(&co, &rc, &c).unwrap();
        assert_eq!(sq, vec![y()]);
    }

    #[test]
    fn squarefree_examples() {
        let c = section_at(5);
        let f = &(&y() - &k(1)).pow(2) * &(&y() + &k(2));
        let (_, sq) = prep(&c, &[f]);
        assert_eq!(sq, vec![(&(&y() - &k(1)) * &(&y() + &k(2))).normalized()]);

        let (_, sq) = prep(&section_at(0), &[&y().pow(2) - &x()]);
        assert_eq!(sq.len(), 1);
        assert_eq!(sq[0].subst(0, &rat(0)), y());

        let (_, sq) = prep(&c, &[&y() + &k(3)]);
        assert_eq!(sq, vec![&y() + &k(3)]);
    }

    #[test]
    fn circle_over_tangent_section() {
        let circle = &(&x().pow(2) + &y().pow(2)) - &k(1);
        let p = preprocess(&section_at(1), &[circle]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].subst(0, &rat(1)), y());
    }

    #[test]
    fn tail_cascade_drops_nullified() {
        // x y + x over x = 0 vanishes identically
        let c = section_at(0);
        let p = preprocess(&c, &[&(&x() * &y()) + &x(), &y() - &k(1)]).unwrap();
        assert_eq!(p, vec![&y() - &k(1)]);
    }
}
