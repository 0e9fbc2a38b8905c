//! Hochschild cochains over the labeled basis and the Gerstenhaber bracket.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::basis::{composable, BasisElement, Combination};
use super::products::{mu_unchecked, AinfConfig};
use crate::lattice::C64;

use BasisElement::*;

type CochainFn = dyn Fn(&[BasisElement]) -> Combination + Send + Sync;

/// A homogeneous cochain of fixed arity and intrinsic degree. Values on
/// non-composable strings are zero by construction.
#[derive(Clone)]
pub struct Cochain {
    arity: usize,
    deg: i32,
    f: Arc<CochainFn>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain").field("arity", &self.arity).field("deg", &self.deg).finish()
    }
}

impl Cochain {
    pub fn new<F>(arity: usize, deg: i32, f: F) -> Self
    where
        F: Fn(&[BasisElement]) -> Combination + Send + Sync + 'static,
    {
        Self { arity, deg, f: Arc::new(f) }
    }

    /// Cochain given by an explicit sparse table.
    pub fn from_table(arity: usize, deg: i32, table: BTreeMap<Vec<BasisElement>, Combination>) -> Self {
        Self::new(arity, deg, move |st| table.get(st).cloned().unwrap_or_default())
    }

    /// The product `m_n` as a cochain of degree `2 - n`.
    pub fn product(cfg: Arc<AinfConfig>, n: usize) -> Self {
        Self::new(n, 2 - n as i32, move |st| mu_unchecked(&cfg, st))
    }

    pub fn zero(arity: usize, deg: i32) -> Self {
        Self::new(arity, deg, |_| Combination::zero())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn deg(&self) -> i32 {
        self.deg
    }

    /// Shifted degree `|f| = deg + arity - 1`.
    pub fn shifted(&self) -> i32 {
        self.deg + self.arity as i32 - 1
    }

    pub fn eval(&self, st: &[BasisElement]) -> Combination {
        if st.len() != self.arity || (!st.is_empty() && !composable(st)) {
            return Combination::zero();
        }
        (self.f)(st)
    }

    pub fn scale(&self, c: C64) -> Cochain {
        let f = self.clone();
        Cochain::new(self.arity, self.deg, move |st| f.eval(st).scale(c))
    }

    /// Sum of two cochains of equal arity and degree.
    pub fn plus(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let (f, g) = (self.clone(), other.clone());
        Cochain::new(self.arity, self.deg, move |st| {
            let mut c = f.eval(st);
            c.add_scaled(&g.eval(st), C64::new(1.0, 0.0));
            c
        })
    }
}

fn parity(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(f ∘̄ g)(a_1..a_{m+n-1}) = Σ_i (-1)^{(|a_1|+…+|a_{i-1}|+m-1)·deg g + (i-1)(n-1)} f(…, g(a_i..), …)`.
pub fn circ(f: &Cochain, g: &Cochain, st: &[BasisElement]) -> Combination {
    let (m, n) = (f.arity, g.arity);
    let mut acc = Combination::zero();
    if m == 0 || st.len() + 1 != m + n {
        return acc;
    }
    if !st.is_empty() && !composable(st) {
        return acc;
    }
    let mut dsum: i64 = 0;
    for i in 1..=m {
        let sg = parity((dsum + m as i64 - 1) * g.deg as i64 + (i as i64 - 1) * (n as i64 - 1));
        let inner = g.eval(&st[i - 1..i - 1 + n]);
        for (y, cy) in &inner.0 {
            let mut outer = Vec::with_capacity(m);
            outer.extend_from_slice(&st[..i - 1]);
            outer.push(*y);
            outer.extend_from_slice(&st[i - 1 + n..]);
            if composable(&outer) {
                acc.add_scaled(&f.eval(&outer), cy * sg);
            }
        }
        if i <= st.len() {
            dsum += st[i - 1].degree() as i64;
        }
    }
    acc
}

/// `[f, g] = f ∘̄ g - (-1)^{|f||g|} g ∘̄ f`.
pub fn gerstenhaber(f: &Cochain, g: &Cochain) -> Cochain {
    let arity = (f.arity + g.arity).saturating_sub(1);
    let deg = f.deg + g.deg;
    let sg = -parity(f.shifted() as i64 * g.shifted() as i64);
    if f.arity + g.arity == 0 {
        return Cochain::zero(0, deg);
    }
    let (f, g) = (f.clone(), g.clone());
    Cochain::new(arity, deg, move |st| {
        let mut c = circ(&f, &g, st);
        c.add_scaled(&circ(&g, &f, st), C64::new(sg, 0.0));
        c
    })
}

/// Named cochains entering the variation equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    F0Z(usize),
    F0W(usize),
    F1(usize),
    F1P(usize),
    F2Z(usize),
    F2W(usize),
}

/// Which normalization of the built-in cochains to use.
///
/// `Verified` is the set for which the variation equations hold
/// numerically: `f₀(i) = +ξ̃_i`, `f₂(i)(ξ̃_j, η̃_{ji}) = +η̃_{ji}`, and the
/// identity-valued components `f₂(j)(θ̃_{ij}, η̃_{ji}) = id_{P_i}`,
/// `f₂(i)(η̃_{ji}, θ̃_{ij}) = -id_{L_j}`. `AsPrinted` keeps
/// `f₀(i) = -ξ̃_i`, `f₂(i)(ξ̃_j, η̃_{ji}) = -η̃_{ji}` and no identity terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Verified,
    AsPrinted,
}

pub fn builtin_cochain(cfg: &AinfConfig, which: Builtin, conv: Convention) -> Cochain {
    let one = C64::new(1.0, 0.0);
    let verified = conv == Convention::Verified;
    match which {
        Builtin::F0Z(j) => Cochain::new(0, 1, move |_| Combination::single(XiL(j), one)),
        Builtin::F0W(i) => {
            let c = if verified { one } else { -one };
            Cochain::new(0, 1, move |_| Combination::single(XiP(i), c))
        }
        Builtin::F1(i) => {
            let z: Vec<C64> = cfg.z().to_vec();
            Cochain::new(1, 0, move |st| match st[0] {
                Theta(i2, j) if i2 == i => Combination::single(st[0], -z[j].conj()),
                Eta(j, i2) if i2 == i => Combination::single(st[0], z[j].conj()),
                _ => Combination::zero(),
            })
        }
        Builtin::F1P(i) => {
            let z: Vec<C64> = cfg.z().to_vec();
            Cochain::new(1, 0, move |st| match st[0] {
                Theta(i2, j) if i2 == i => Combination::single(st[0], z[j]),
                Eta(j, i2) if i2 == i => Combination::single(st[0], -z[j]),
                _ => Combination::zero(),
            })
        }
        Builtin::F2Z(j) => Cochain::new(2, -1, move |st| match (st[0], st[1]) {
            (XiP(_), Theta(_, j2)) if j2 == j => Combination::single(st[1], -one),
            (Eta(j2, _), XiP(_)) if j2 == j => Combination::single(st[0], one),
            (Theta(i, j2), Eta(_, i2)) if verified && j2 == j && i2 == i => Combination::single(IdP(i), one),
            _ => Combination::zero(),
        }),
        Builtin::F2W(i) => Cochain::new(2, -1, move |st| match (st[0], st[1]) {
            (Theta(i2, _), XiL(_)) if i2 == i => Combination::single(st[0], one),
            (XiL(_), Eta(_, i2)) if i2 == i => Combination::single(st[1], if verified { one } else { -one }),
            (Eta(j, i2), Theta(_, j2)) if verified && i2 == i && j2 == j => Combination::single(IdL(j), -one),
            _ => Combination::zero(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfinity::basis::{basis, composable_strings};
    use crate::classical::Tau;
    use crate::ekseries::SeriesParams;

    fn cfg() -> Arc<AinfConfig> {
        Arc::new(
            AinfConfig::new(
                Tau::new(C64::new(0.5, 1.0)).unwrap(),
                vec![C64::new(0.13, 0.07), C64::new(0.41, 0.29)],
                vec![C64::new(0.22, 0.61), C64::new(0.71, 0.18)],
                SeriesParams::default(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn bracket_is_graded_antisymmetric() {
        let c = cfg();
        let f = builtin_cochain(&c, Builtin::F2Z(0), Convention::Verified);
        let g = builtin_cochain(&c, Builtin::F1(1), Convention::Verified);
        let fg = gerstenhaber(&f, &g);
        let gf = gerstenhaber(&g, &f);
        let sg = parity(f.shifted() as i64 * g.shifted() as i64);
        for st in composable_strings(&basis(2, 2), 2) {
            let mut r = fg.eval(&st);
            r.add_scaled(&gf.eval(&st), C64::new(sg, 0.0));
            assert!(r.max_norm() == 0.0);
        }
    }

    #[test]
    fn builtin_values() {
        let c = cfg();
        let f1 = builtin_cochain(&c, Builtin::F1(0), Convention::Verified);
        assert_eq!(f1.eval(&[Theta(0, 1)]).get(&Theta(0, 1)), -c.z()[1].conj());
        let f2 = builtin_cochain(&c, Builtin::F2W(1), Convention::Verified);
        assert_eq!(f2.eval(&[Theta(1, 0), XiL(0)]).get(&Theta(1, 0)), C64::new(1.0, 0.0));
        let f0 = builtin_cochain(&c, Builtin::F0Z(1), Convention::Verified);
        assert_eq!(f0.arity(), 0);
        assert_eq!(f0.eval(&[]).get(&XiL(1)), C64::new(1.0, 0.0));
    }

    #[test]
    fn mm_matches_stasheff() {
        let c = cfg();
        let b = basis(2, 2);
        let ms: Vec<Cochain> = (0..=5).map(|n| Cochain::product(c.clone(), n)).collect();
        for st in composable_strings(&b, 4) {
            let mut acc = Combination::zero();
            for k in 2..=st.len() {
                let l = st.len() + 1 - k;
                if l >= 2 {
                    acc.add_scaled(&circ(&ms[k], &ms[l], &st), C64::new(1.0, 0.0));
                }
            }
            assert!(acc.max_norm() < 1e-10);
        }
    }
}
