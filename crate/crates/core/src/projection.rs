//! Projection operators and the projection phase.

use serde::Serialize;

use crate::arith::{
    discriminant, principal_subresultant_coefficients, resultant, sort_polys,
    squarefree_coprime_basis, MPoly, VarOrder,
};
use crate::error::{Error, Result};

/// Which projection operator drives the projection phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Collins,
    McCallum,
    /// McCallum's operator with the reduced projection at the level of the
    /// designated equational constraint (an index into the input list).
    McCallumReducedEC(usize),
}

impl OperatorKind {
    pub fn is_mccallum(self) -> bool {
        !matches!(self, OperatorKind::Collins)
    }
}

/// Projection polynomials bucketed by main variable: `levels[i]` holds those
/// with main variable `x_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionSets {
    pub levels: Vec<Vec<MPoly>>,
    /// Basis factors of the designated equational constraint, all with main
    /// variable `x_{ec_level+1}`.
    pub ec_factors: Vec<MPoly>,
    pub ec_level: Option<usize>,
}

impl ProjectionSets {
    pub fn nvars(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, v: usize) -> &[MPoly] {
        &self.levels[v]
    }

    pub fn all(&self) -> impl Iterator<Item = &MPoly> {
        self.levels.iter().flatten()
    }
}

fn check_level(b: &[MPoly], v: usize) -> Result<()> {
    match b.iter().find(|f| f.mvar() != Some(v)) {
        Some(_) => Err(Error::WrongMainVariable(v)),
        None => Ok(()),
    }
}

fn finish(mut out: Vec<MPoly>) -> Vec<MPoly> {
    out.retain(|p| !p.is_constant());
    let mut out: Vec<MPoly> = out.iter().map(MPoly::normalized).collect();
    sort_polys(&mut out);
    out.dedup();
    out
}

fn pairwise_resultants(b: &[MPoly], v: usize, out: &mut Vec<MPoly>) {
    for (i, f) in b.iter().enumerate() {
        for g in &b[i + 1..] {
            out.push(resultant(f, g, v).expect("both operands involve v"));
        }
    }
}

/// McCallum's operator: coefficients, discriminants and pairwise
/// resultants, constants removed.
pub fn mccallum_project(b: &[MPoly], v: usize) -> Result<Vec<MPoly>> {
    check_level(b, v)?;
    let mut out = Vec::new();
    for f in b {
        out.extend(f.coeffs(v));
        if f.degree(v) >= 2 {
            out.push(discriminant(f, v)?);
        }
    }
    pairwise_resultants(b, v, &mut out);
    Ok(finish(out))
}

/// Reducta of `f` in `v` that still involve `v`, starting with `f`.
fn reducta(f: &MPoly, v: usize) -> Vec<MPoly> {
    let mut out = Vec::new();
    let mut r = f.clone();
    while r.degree(v) >= 1 {
        out.push(r.clone());
        r = r.tail().unwrap();
    }
    out
}

fn reducta_floor(f: &MPoly, v: usize) -> MPoly {
    let mut r = f.clone();
    while r.degree(v) >= 1 {
        r = r.tail().unwrap();
    }
    r
}

fn psc_list(a: &MPoly, b: &MPoly, v: usize, out: &mut Vec<MPoly>) {
    let (a, b) = if a.degree(v) >= b.degree(v) {
        (a, b)
    } else {
        (b, a)
    };
    let n = b.degree(v) as usize;
    out.extend(
        principal_subresultant_coefficients(a, b, v)
            .into_iter()
            .take(n),
    );
}

/// Collins' operator over all reducta: leading coefficients, principal
/// subresultant coefficients against derivatives and between pairs.
pub fn collins_project(b: &[MPoly], v: usize) -> Result<Vec<MPoly>> {
    check_level(b, v)?;
    let mut out = Vec::new();
    let reds: Vec<Vec<MPoly>> = b.iter().map(|f| reducta(f, v)).collect();
    for (f, rs) in b.iter().zip(&reds) {
        // The reductum that no longer involves v is its own leading coefficient.
        out.push(reducta_floor(f, v));
        for r in rs {
            out.push(r.lc(v));
            let d = r.derivative(v);
            if d.degree(v) >= 1 {
                psc_list(r, &d, v, &mut out);
            }
        }
    }
    for (i, rf) in reds.iter().enumerate() {
        for rg in &reds[i + 1..] {
            for f in rf {
                for g in rg {
                    psc_list(f, g, v, &mut out);
                }
            }
        }
    }
    Ok(finish(out))
}

/// McCallum's reduced projection for an equational constraint `ec`:
/// the projection of `ec` and its resultants with the rest of `b`.
pub fn reduced_projection_ec(b: &[MPoly], ec: &MPoly, v: usize) -> Result<Vec<MPoly>> {
    check_level(b, v)?;
    let ec = ec.normalized();
    if !b.contains(&ec) {
        return Err(Error::EcLostInBasis);
    }
    reduced_projection(b, std::slice::from_ref(&ec), v)
}

/// Reduced projection with a set of jointly designated constraint factors.
fn reduced_projection(b: &[MPoly], ecs: &[MPoly], v: usize) -> Result<Vec<MPoly>> {
    let mut out = mccallum_project(ecs, v)?;
    for e in ecs {
        for g in b.iter().filter(|g| !ecs.contains(g)) {
            out.push(resultant(e, g, v)?);
        }
    }
    Ok(finish(out))
}

fn bucket(polys: Vec<MPoly>, levels: &mut [Vec<MPoly>]) {
    for p in polys {
        if let Some(v) = p.mvar() {
            levels[v].push(p);
        }
    }
}

/// Compute the projection sets of `f` under `op`.
///
/// Each level is kept as a squarefree coprime basis of everything that
/// landed on it, contents included. The designated equational constraint
/// (if any) is identified with its basis factors at its main variable.
pub fn projection_phase(f: &[MPoly], op: OperatorKind, order: &VarOrder) -> Result<ProjectionSets> {
    let n = order.len();
    if let Some(p) = f.iter().find(|p| p.nvars() != n) {
        return Err(Error::MalformedCad(format!(
            "polynomial {p} has {} variables, ordering has {n}",
            p.nvars()
        )));
    }
    if f.iter().all(MPoly::is_constant) {
        return Err(Error::NothingToDecompose);
    }
    let mut levels = vec![Vec::new(); n];
    bucket(squarefree_coprime_basis(f), &mut levels);

    let (ec_level, ec_factors) = match op {
        OperatorKind::McCallumReducedEC(i) => {
            let ec = f.get(i).ok_or(Error::EcLostInBasis)?;
            let v = ec.mvar().ok_or(Error::EcLostInBasis)?;
            let factors: Vec<MPoly> = levels[v]
                .iter()
                .filter(|b| !crate::arith::gcd(b, ec).is_constant())
                .cloned()
                .collect();
            if factors.is_empty() {
                return Err(Error::EcLostInBasis);
            }
            (Some(v), factors)
        }
        _ => (None, vec![]),
    };

    for v in (1..n).rev() {
        let b = levels[v].clone();
        if b.is_empty() {
            continue;
        }
        let proj = match op {
            OperatorKind::Collins => collins_project(&b, v)?,
            OperatorKind::McCallum => mccallum_project(&b, v)?,
            OperatorKind::McCallumReducedEC(_) if ec_level == Some(v) => {
                reduced_projection(&b, &ec_factors, v)?
            }
            OperatorKind::McCallumReducedEC(_) => mccallum_project(&b, v)?,
        };
        let mut lower: Vec<MPoly> = levels[..v].iter().flatten().cloned().collect();
        lower.extend(proj);
        for l in &mut levels[..v] {
            l.clear();
        }
        bucket(squarefree_coprime_basis(&lower), &mut levels);
    }
    Ok(ProjectionSets {
        levels,
        ec_factors,
        ec_level,
    })
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
    fn circle() -> MPoly {
        &(&y().pow(2) + &x().pow(2)) - &k(1)
    }
    fn order() -> VarOrder {
        VarOrder::new(["x", "y"]).unwrap()
    }

    #[test]
    fn mccallum_examples() {
        let p = mccallum_project(&[circle()], 1).unwrap();
        assert_eq!(p, vec![&x().pow(2) - &k(1)]);
        assert_eq!(mccallum_project(&[&y() - &x()], 1).unwrap(), vec![x()]);
        assert!(mccallum_project(&[&y().pow(2) + &k(1)], 1)
            .unwrap()
            .is_empty());
        assert!(matches!(
            mccallum_project(&[x()], 1),
            Err(Error::WrongMainVariable(1))
        ));
    }

    #[test]
    fn collins_examples() {
        assert_eq!(collins_project(&[&y() - &x()], 1).unwrap(), vec![x()]);
        assert!(collins_project(&[], 1).unwrap().is_empty());
        let c = squarefree_coprime_basis(&collins_project(&[circle()], 1).unwrap());
        for m in squarefree_coprime_basis(&mccallum_project(&[circle()], 1).unwrap()) {
            assert!(c.contains(&m));
        }
    }

    #[test]
    fn reduced_projection_examples() {
        let line = &y() - &x();
        let b = [circle(), line.clone()];
        let r = reduced_projection_ec(&b, &circle(), 1).unwrap();
        let expected = &x().pow(2).scale(&rat(2)) - &k(1);
        assert!(r.contains(&expected));
        assert!(r.contains(&(&x().pow(2) - &k(1))));
        assert_eq!(
            reduced_projection_ec(&[circle()], &circle(), 1).unwrap(),
            mccallum_project(&[circle()], 1).unwrap()
        );
        assert!(matches!(
            reduced_projection_ec(&[line], &circle(), 1),
            Err(Error::EcLostInBasis)
        ));
    }

    #[test]
    fn phase_examples() {
        let ps = projection_phase(&[circle()], OperatorKind::McCallum, &order()).unwrap();
        assert_eq!(ps.levels[1], vec![circle()]);
        assert_eq!(ps.levels[0], vec![&x().pow(2) - &k(1)]);

        let o1 = VarOrder::new(["x"]).unwrap();
        let lin = &MPoly::var(1, 0) - &MPoly::one(1);
        let ps = projection_phase(std::slice::from_ref(&lin), OperatorKind::Collins, &o1).unwrap();
        assert_eq!(ps.levels, vec![vec![lin]]);

        let ps = projection_phase(
            &[&y() - &x(), &y() + &x()],
            OperatorKind::McCallum,
            &order(),
        )
        .unwrap();
        assert!(ps.levels[0].contains(&x()));

        assert!(matches!(
            projection_phase(&[k(3)], OperatorKind::McCallum, &order()),
            Err(Error::NothingToDecompose)
        ));
    }

    #[test]
    fn contents_stay_at_their_level() {
        // (x - 2)(y - x): content x - 2 belongs to level 1
        let f = &(&x() - &k(2)) * &(&y() - &x());
        let ps = projection_phase(&[f], OperatorKind::McCallum, &order()).unwrap();
        assert_eq!(ps.levels[1], vec![&y() - &x()]);
        assert!(ps.levels[0].contains(&(&x() - &k(2))));
    }

    #[test]
    fn ec_factors_are_designated() {
        let f = [circle(), &y() - &x()];
        let ps = projection_phase(&f, OperatorKind::McCallumReducedEC(0), &order()).unwrap();
        assert_eq!(ps.ec_level, Some(1));
        assert_eq!(ps.ec_factors, vec![circle()]);
        assert!(ps.levels[0].contains(&(&x().pow(2).scale(&rat(2)) - &k(1))));
    }
}
