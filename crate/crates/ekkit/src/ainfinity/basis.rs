use std::collections::BTreeMap;
use std::fmt;

use crate::lattice::C64;

/// Objects of the category: `P_i` (degree-0 parameters) and `L_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    P(usize),
    L(usize),
}

/// Rescaled basis of `Ext*(G, G)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisElement {
    IdP(usize),
    IdL(usize),
    XiP(usize),
    XiL(usize),
    /// `θ̃_{ij}: P_i → L_j`
    Theta(usize, usize),
    /// `η̃_{ji}: L_j → P_i`
    Eta(usize, usize),
}

use BasisElement::*;

impl BasisElement {
    pub fn degree(&self) -> i32 {
        match self {
            IdP(_) | IdL(_) | Theta(..) => 0,
            XiP(_) | XiL(_) | Eta(..) => 1,
        }
    }

    pub fn source(&self) -> Object {
        match *self {
            IdP(i) | XiP(i) | Theta(i, _) => Object::P(i),
            IdL(j) | XiL(j) | Eta(j, _) => Object::L(j),
        }
    }

    pub fn target(&self) -> Object {
        match *self {
            IdP(i) | XiP(i) | Eta(_, i) => Object::P(i),
            IdL(j) | XiL(j) | Theta(_, j) => Object::L(j),
        }
    }

    pub fn is_id(&self) -> bool {
        matches!(self, IdP(_) | IdL(_))
    }

    pub fn is_xi(&self) -> bool {
        matches!(self, XiP(_) | XiL(_))
    }

    /// Identity of an object.
    pub fn id_of(o: Object) -> Self {
        match o {
            Object::P(i) => IdP(i),
            Object::L(j) => IdL(j),
        }
    }

    /// `ξ̃` of an object.
    pub fn xi_of(o: Object) -> Self {
        match o {
            Object::P(i) => XiP(i),
            Object::L(j) => XiL(j),
        }
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdP(i) => write!(f, "idP{i}"),
            IdL(j) => write!(f, "idL{j}"),
            XiP(i) => write!(f, "xiP{i}"),
            XiL(j) => write!(f, "xiL{j}"),
            Theta(i, j) => write!(f, "theta{i}{j}"),
            Eta(j, i) => write!(f, "eta{j}{i}"),
        }
    }
}

/// Strings compose left to right: `target(x_k) = source(x_{k+1})`.
pub fn composable(st: &[BasisElement]) -> bool {
    st.windows(2).all(|p| p[0].target() == p[1].source())
}

/// `2r + 2s + 2rs` basis elements.
pub fn basis(r: usize, s: usize) -> Vec<BasisElement> {
    let mut out = Vec::with_capacity(2 * r + 2 * s + 2 * r * s);
    out.extend((0..r).map(IdP));
    out.extend((0..s).map(IdL));
    out.extend((0..r).map(XiP));
    out.extend((0..s).map(XiL));
    for i in 0..r {
        for j in 0..s {
            out.push(Theta(i, j));
        }
    }
    for j in 0..s {
        for i in 0..r {
            out.push(Eta(j, i));
        }
    }
    out
}

/// Every composable string of length `n` over `basis`, in lexicographic
/// order of basis positions.
pub fn composable_strings(basis: &[BasisElement], n: usize) -> Vec<Vec<BasisElement>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut cur: Vec<Vec<BasisElement>> = basis.iter().map(|x| vec![*x]).collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for st in &cur {
            let t = st.last().expect("nonempty").target();
            for x in basis {
                if x.source() == t {
                    let mut s2 = st.clone();
                    s2.push(*x);
                    next.push(s2);
                }
            }
        }
        cur = next;
    }
    cur
}

/// Sparse linear combination of basis elements.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Combination(pub BTreeMap<BasisElement, C64>);

impl Combination {
    pub fn zero() -> Self {
        Self(BTreeMap::new())
    }

    pub fn single(x: BasisElement, c: C64) -> Self {
        let mut m = BTreeMap::new();
        m.insert(x, c);
        Self(m)
    }

    pub fn add_scaled(&mut self, other: &Combination, c: C64) {
        for (k, v) in &other.0 {
            *self.0.entry(*k).or_insert(C64::new(0.0, 0.0)) += v * c;
        }
    }

    pub fn get(&self, x: &BasisElement) -> C64 {
        self.0.get(x).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn max_norm(&self) -> f64 {
        self.0.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Drop coefficients below `1e-15`.
    pub fn pruned(mut self) -> Self {
        self.0.retain(|_, v| v.norm() > 1e-15);
        self
    }

    pub fn sub(&self, other: &Combination) -> Combination {
        let mut out = self.clone();
        out.add_scaled(other, C64::new(-1.0, 0.0));
        out
    }

    pub fn scale(&self, c: C64) -> Combination {
        Combination(self.0.iter().map(|(k, v)| (*k, v * c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.values().all(|v| *v == C64::new(0.0, 0.0))
    }
}
