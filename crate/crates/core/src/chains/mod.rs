//! Zero-dimensional regular chains and the sample points they encode.
//!
//! A sample point is a triangular set of defining polynomials together with
//! a box of rational intervals that singles out one real solution. Signs of
//! polynomials at such a point are decided exactly: interval evaluation
//! settles nonzero signs after enough refinement, and a gcd against the
//! defining polynomial settles zeros.

mod decompose;
mod point;

use std::fmt;

use serde::Serialize;

use crate::arith::{Interval, MPoly};
use crate::error::{Error, Result};

pub use decompose::{
    compatible_with_sample, gcd_mod_chain, iterated_resultant, prem_chain, real_root_isolate,
    regularity_test, regularize, squarefree_factorization_mod_chain, tail, triangularize,
    Regularity, SquarefreeComponent,
};
pub use point::{FiberRoot, SamplePoint};

/// Triangular set with strictly increasing main variables.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RegularChain {
    polys: Vec<MPoly>,
}

impl RegularChain {
    pub fn empty() -> Self {
        RegularChain { polys: vec![] }
    }

    /// Build a chain, checking main variables increase strictly and every
    /// initial is regular modulo the chain below it.
    pub fn new(polys: Vec<MPoly>) -> Result<Self> {
        let mut chain = RegularChain::empty();
        for p in polys {
            let v = p
                .mvar()
                .ok_or_else(|| Error::MalformedChain("constant polynomial".into()))?;
            if let Some(top) = chain.top_var() {
                if v <= top {
                    return Err(Error::MalformedChain(format!(
                        "main variable x{} does not increase",
                        v + 1
                    )));
                }
            }
            if iterated_resultant(&p.initial(), &chain).is_zero() {
                return Err(Error::MalformedChain(format!(
                    "initial of {p} is not regular"
                )));
            }
            chain.polys.push(p);
        }
        Ok(chain)
    }

    pub(crate) fn from_sorted(polys: Vec<MPoly>) -> Self {
        debug_assert!(polys.windows(2).all(|w| w[0].mvar() < w[1].mvar()));
        RegularChain { polys }
    }

    pub fn polys(&self) -> &[MPoly] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Main variables, increasing.
    pub fn vars(&self) -> Vec<usize> {
        self.polys.iter().map(|p| p.mvar().unwrap()).collect()
    }

    pub fn top_var(&self) -> Option<usize> {
        self.polys.last().and_then(MPoly::mvar)
    }

    pub fn has_var(&self, v: usize) -> bool {
        self.poly_for(v).is_some()
    }

    pub fn poly_for(&self, v: usize) -> Option<&MPoly> {
        self.polys.iter().find(|p| p.mvar() == Some(v))
    }

    /// Polynomials with main variable strictly below `v`.
    pub fn below(&self, v: usize) -> RegularChain {
        RegularChain {
            polys: self
                .polys
                .iter()
                .filter(|p| p.mvar().unwrap() < v)
                .cloned()
                .collect(),
        }
    }

    /// Polynomials with main variable strictly above `v`.
    pub fn above(&self, v: usize) -> RegularChain {
        RegularChain {
            polys: self
                .polys
                .iter()
                .filter(|p| p.mvar().unwrap() > v)
                .cloned()
                .collect(),
        }
    }

    /// Insert or replace the polynomial for its main variable.
    pub(crate) fn with(&self, p: MPoly) -> RegularChain {
        let v = p.mvar().expect("chain polynomial has a main variable");
        let mut polys: Vec<MPoly> = self
            .polys
            .iter()
            .filter(|q| q.mvar() != Some(v))
            .cloned()
            .collect();
        let at = polys
            .iter()
            .position(|q| q.mvar().unwrap() > v)
            .unwrap_or(polys.len());
        polys.insert(at, p);
        RegularChain { polys }
    }

    pub(crate) fn join(low: &RegularChain, mid: Option<MPoly>, up: &RegularChain) -> RegularChain {
        let mut polys = low.polys.clone();
        polys.extend(mid);
        polys.extend(up.polys.iter().cloned());
        RegularChain::from_sorted(polys)
    }

    /// True when every polynomial only involves the chain's own variables.
    pub fn is_zero_dimensional(&self) -> bool {
        let vars = self.vars();
        self.polys
            .iter()
            .all(|p| p.variables().iter().all(|v| vars.contains(v)))
    }
}

impl fmt::Debug for RegularChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.polys.iter().map(|p| p.to_string()))
            .finish()
    }
}

/// One rational interval per chain variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BoundingBox {
    pub vars: Vec<usize>,
    #[serde(skip)]
    pub boxes: Vec<Interval>,
}

impl BoundingBox {
    pub fn get(&self, v: usize) -> Option<&Interval> {
        self.vars
            .iter()
            .position(|&w| w == v)
            .map(|i| &self.boxes[i])
    }
}

/// A regular chain with one inequation, regular with respect to the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularSystem {
    pub chain: RegularChain,
    pub inequation: MPoly,
}

impl RegularSystem {
    pub fn mvar(&self) -> Option<usize> {
        self.chain.top_var()
    }
}
