//! Lifting: stacks over cells, well-orientedness, and the full
//! decomposition.

mod preprocess;
mod stack;

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{MPoly, VarOrder};
use crate::chains::SamplePoint;
use crate::error::{Error, Result};
use crate::projection::{projection_phase, OperatorKind, ProjectionSets};

pub use preprocess::{make_coprime, make_squarefree, preprocess, restriction_chain};
pub use stack::{decompose_r1, fiber_root_set, stack_over_cell};

/// Position of a cell: one entry per level, sectors odd and sections even.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CellIndex(Vec<u32>);

impl CellIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(
            entries.iter().all(|&e| e > 0),
            "cell index entries are positive"
        );
        CellIndex(entries)
    }

    /// The index of the single cell of `R^0`.
    pub fn root() -> Self {
        CellIndex(vec![])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, k: u32) -> CellIndex {
        let mut e = self.0.clone();
        e.push(k);
        CellIndex(e)
    }

    pub fn parent(&self) -> Option<CellIndex> {
        let (_, rest) = self.0.split_last()?;
        Some(CellIndex(rest.to_vec()))
    }

    pub fn dimension(&self) -> usize {
        dimension_of_cell(self)
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Number of sector (odd) entries.
pub fn dimension_of_cell(index: &CellIndex) -> usize {
    index.0.iter().filter(|&&e| e % 2 == 1).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub index: CellIndex,
    pub sample: SamplePoint,
    /// Position of the base cell in the previous level.
    pub parent: Option<usize>,
}

impl Cell {
    pub fn level(&self) -> usize {
        self.index.len()
    }

    pub fn dimension(&self) -> usize {
        self.index.dimension()
    }

    pub fn is_section(&self) -> bool {
        self.index.0.last().is_some_and(|e| e % 2 == 0)
    }
}

/// A stack as stored in a decomposition: the base cell, the range of its
/// cells in the next level, and the polynomials it was lifted with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stack {
    pub base: Option<usize>,
    pub cells: Range<usize>,
    pub lifting: LiftingSet,
}

impl Stack {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn sections(&self) -> usize {
        self.cells.len() / 2
    }
}

/// Polynomials whose real roots delineate a stack.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiftingSet {
    pub polys: Vec<MPoly>,
}

#[derive(Debug, Clone)]
pub struct Cad {
    pub order: VarOrder,
    pub operator: OperatorKind,
    pub proj: ProjectionSets,
    /// `levels[i]` holds the cells of `R^{i+1}`.
    pub levels: Vec<Vec<Cell>>,
    /// `stacks[i]` holds the stacks forming `levels[i]`, in order.
    pub stacks: Vec<Vec<Stack>>,
}

impl Cad {
    pub fn nvars(&self) -> usize {
        self.levels.len()
    }

    pub fn leaves(&self) -> &[Cell] {
        self.levels.last().map_or(&[], Vec::as_slice)
    }

    pub fn num_cells(&self) -> usize {
        self.leaves().len()
    }

    pub fn cell(&self, level: usize, i: usize) -> &Cell {
        &self.levels[level][i]
    }

    /// Stack over cell `i` of `levels[level - 1]`, or over `R^0` for level 0.
    pub fn stack_over(&self, level: usize, base: Option<usize>) -> Option<&Stack> {
        self.stacks[level].iter().find(|s| s.base == base)
    }

    pub fn stack_sizes(&self, level: usize) -> Vec<usize> {
        self.stacks[level].iter().map(Stack::len).collect()
    }
}

/// A decomposition, or the cell and polynomial that made the operator
/// inapplicable.
#[derive(Debug, Clone)]
pub enum CadOutcome {
    Complete(Cad),
    Fail { cell: CellIndex, polynomial: MPoly },
}

impl CadOutcome {
    pub fn cad(&self) -> Option<&Cad> {
        match self {
            CadOutcome::Complete(c) => Some(c),
            CadOutcome::Fail { .. } => None,
        }
    }

    pub fn into_cad(self) -> Option<Cad> {
        match self {
            CadOutcome::Complete(c) => Some(c),
            CadOutcome::Fail { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    pub parallel: bool,
    pub max_cells: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Orientation {
    Ok,
    Nullified(Vec<MPoly>),
}

/// Report the members of `pi` nullified over `c` (never under Collins).
pub fn check_well_oriented(c: &Cell, pi: &[MPoly], op: OperatorKind) -> Orientation {
    if !op.is_mccallum() {
        return Orientation::Ok;
    }
    let v = c.level();
    let mut sp = c.sample.clone();
    let bad: Vec<MPoly> = pi
        .iter()
        .filter(|p| p.coeffs(v).iter().all(|a| sp.sign_at(a) == 0))
        .cloned()
        .collect();
    if bad.is_empty() {
        Orientation::Ok
    } else {
        Orientation::Nullified(bad)
    }
}

/// Exponent vectors over `nbase` variables of total degree `d`, in
/// lexicographic order with the first variable varying slowest.
fn exponents(nbase: usize, d: u32) -> Vec<Vec<u32>> {
    if nbase == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in exponents(nbase - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A polynomial to lift with over a zero-dimensional cell on which `p` is
/// nullified: the first partial derivative of `p` in the base variables,
/// by increasing order, that is not nullified there. `None` when that
/// derivative has a constant fiber.
pub fn minimal_delineating_polynomial(p: &MPoly, c: &Cell) -> Result<Option<MPoly>> {
    let dim = c.dimension();
    if dim > 0 {
        return Err(Error::PositiveDimensionalCell(dim));
    }
    let v = c.level();
    let mut sp = c.sample.clone();
    let max: u32 = (0..v).map(|w| p.degree(w)).sum();
    for order in 1..=max {
        for e in exponents(v, order) {
            let mut d = p.clone();
            for (w, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    d = d.derivative(w);
                }
            }
            if d.is_zero() || stack::is_nullified(&mut sp, &d, v) {
                continue;
            }
            let fiber = sp.strip_vanishing_leads(&d, v);
            return Ok((fiber.degree(v) > 0).then(|| d.normalized()));
        }
    }
    Ok(None)
}

/// Cells over `c` sign-invariant for `l` (restricted to the sample's
/// neighbourhood as the operator guarantees).
pub fn generate_stack(c: &Cell, l: &[MPoly]) -> Result<Vec<Cell>> {
    let phat = preprocess(c, l)?;
    stack_over_cell(c, &phat)
}

enum Lifted {
    Stack(Vec<Cell>, LiftingSet),
    Fail(CellIndex, MPoly),
}

fn lift_cell(c: &Cell, pi: &[MPoly], op: OperatorKind) -> Result<Lifted> {
    let mut l = pi.to_vec();
    if let Orientation::Nullified(bad) = check_well_oriented(c, pi, op) {
        if c.dimension() > 0 {
            return Ok(Lifted::Fail(c.index.clone(), bad[0].clone()));
        }
        for p in &bad {
            if let Some(d) = minimal_delineating_polynomial(p, c)? {
                if !l.contains(&d) {
                    l.push(d);
                }
            }
        }
    }
    let cells = generate_stack(c, &l)?;
    Ok(Lifted::Stack(cells, LiftingSet { polys: l }))
}

/// Build a decomposition of `R^n` sign-invariant for `f`.
///
/// With `McCallumReducedEC(i)`, the result is sign-invariant for the
/// equational constraint `f[i]` and the other polynomials are only
/// guaranteed sign-invariant on its sections.
pub fn build_cad(
    f: &[MPoly],
    order: &VarOrder,
    op: OperatorKind,
    opts: &BuildOptions,
) -> Result<CadOutcome> {
    let n = order.len();
    let proj = projection_phase(f, op, order)?;
    if proj.ec_level.is_some_and(|l| l + 1 != n) {
        return Err(Error::EcNotTopLevel);
    }
    let lifting_set = |v: usize| -> &[MPoly] {
        if proj.ec_level == Some(v) {
            &proj.ec_factors
        } else {
            &proj.levels[v]
        }
    };
    let budget = |count: usize| match opts.max_cells {
        Some(m) if count > m => Err(Error::BudgetExceeded(m)),
        _ => Ok(()),
    };

    let l1 = lifting_set(0).to_vec();
    let first = decompose_r1(&l1, n)?;
    budget(first.len())?;
    let mut stacks = vec![vec![Stack {
        base: None,
        cells: 0..first.len(),
        lifting: LiftingSet { polys: l1 },
    }]];
    let mut levels = vec![first];

    for v in 1..n {
        let base = &levels[v - 1];
        let pi = lifting_set(v);
        let lifted: Vec<Result<Lifted>> = if opts.parallel {
            base.par_iter().map(|c| lift_cell(c, pi, op)).collect()
        } else {
            base.iter().map(|c| lift_cell(c, pi, op)).collect()
        };
        let mut cells = Vec::new();
        let mut level_stacks = Vec::with_capacity(base.len());
        for (i, r) in lifted.into_iter().enumerate() {
            match r? {
                Lifted::Fail(cell, polynomial) => {
                    return Ok(CadOutcome::Fail { cell, polynomial });
                }
                Lifted::Stack(stack, lifting) => {
                    let start = cells.len();
                    cells.extend(stack.into_iter().map(|mut c| {
                        c.parent = Some(i);
                        c
                    }));
                    level_stacks.push(Stack {
                        base: Some(i),
                        cells: start..cells.len(),
                        lifting,
                    });
                }
            }
            budget(cells.len())?;
        }
        levels.push(cells);
        stacks.push(level_stacks);
    }
    Ok(CadOutcome::Complete(Cad {
        order: order.clone(),
        operator: op,
        proj,
        levels,
        stacks,
    }))
}
