//! Exact polynomial expressions for `g*_{a,b}(z, w)` in a fixed finite set
//! of generators, produced by solving the quadratic recursions.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ekseries::Series;
use crate::error::{EkError, Result};
use crate::lattice::C64;

/// Leaves of the polynomial ring.
///
/// `G00`, `G01` are `g*_{0,0}(z,w)`, `g*_{0,1}(z,w)`; `Zb(k)`, `Wb(k)` are
/// `g*_{0,k}(z,0)`, `g*_{0,k}(w,0)` for `k ≤ 2`; `C(m,n)` is the constant
/// `g*_{m,n}(0,0)` (only `m+n` odd ever appears).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    G00,
    G01,
    Zb(u8),
    Wb(u8),
    C(u32, u32),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::G00 => write!(f, "G00"),
            Generator::G01 => write!(f, "G01"),
            Generator::Zb(k) => write!(f, "Zb{k}"),
            Generator::Wb(k) => write!(f, "Wb{k}"),
            Generator::C(m, n) => write!(f, "C({m},{n})"),
        }
    }
}

/// A monomial; exponents are positive and sorted by generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Generator, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(g: Generator) -> Self {
        Self(vec![(g, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<Generator, u32> = self.0.iter().copied().collect();
        for (g, e) in &other.0 {
            *m.entry(*g).or_insert(0) += e;
        }
        Monomial(m.into_iter().collect())
    }
}

// graded lexicographic: total degree first, then the exponent vectors
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact rational coefficients; no zero
/// coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly(BTreeMap<Monomial, BigRational>);

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl MPoly {
    pub fn zero() -> Self {
        Self(BTreeMap::new())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.push(Monomial::one(), c);
        p
    }

    pub fn var(g: Generator) -> Self {
        // odd parity forces the even constants to vanish
        if let Generator::C(m, n) = g {
            if (m + n) % 2 == 0 {
                return Self::zero();
            }
        }
        let mut p = Self::zero();
        p.push(Monomial::var(g), BigRational::one());
        p
    }

    fn push(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.0.iter()
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.push(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out.push(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly(self.0.iter().map(|(m, v)| (m.clone(), v * c)).collect())
    }

    /// Every generator occurring in the polynomial.
    pub fn generators(&self) -> BTreeSet<Generator> {
        self.0.keys().flat_map(|m| m.0.iter().map(|(g, _)| *g)).collect()
    }

    /// Substitute numeric values for the generators.
    pub fn eval(&self, env: &HashMap<Generator, C64>) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (m, c) in &self.0 {
            let mut t = C64::new(rat_to_f64(c), 0.0);
            for (g, e) in &m.0 {
                let v = env.get(g).ok_or_else(|| EkError::MissingGenerator(g.to_string()))?;
                t *= v.powu(*e);
            }
            s += t;
        }
        Ok(s)
    }
}

fn rat_to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

fn fmt_rat(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Canonical text form `coeff * G00^2 * Zb1 + …`, highest monomials first.
impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.0.iter().rev().enumerate() {
            let mut s = if k == 0 {
                fmt_rat(c)
            } else if c.is_negative() {
                format!(" - {}", fmt_rat(&-c))
            } else {
                format!(" + {}", fmt_rat(c))
            };
            for (g, e) in &m.0 {
                if *e == 1 {
                    s.push_str(&format!(" * {g}"));
                } else {
                    s.push_str(&format!(" * {g}^{e}"));
                }
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn binom_big(n: usize, k: usize) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(r)
}

fn sign(e: usize) -> BigRational {
    if e.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// Which argument of a one-variable reduction `g*_{a,b}(x, 0)` is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Z,
    W,
}

/// Memoized recursion. Unknowns are solved in the fixed order
/// "raise `a` before `b`".
#[derive(Default)]
pub struct Reducer {
    one: HashMap<(Var, usize, usize), MPoly>,
    two: HashMap<(usize, usize), MPoly>,
}

fn cst(m: usize, n: usize) -> MPoly {
    MPoly::var(Generator::C(m as u32, n as u32))
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    /// `g*_{a,b}(x, 0)` in terms of `x`-generators `g*_{0,k}(x,0)`, `k ≤ 2`,
    /// and constants.
    pub fn one_var(&mut self, v: Var, a: usize, b: usize) -> MPoly {
        if let Some(p) = self.one.get(&(v, a, b)) {
            return p.clone();
        }
        let p = self.one_var_uncached(v, a, b);
        self.one.insert((v, a, b), p.clone());
        p
    }

    // R2 of the one-variable system at (A, B)
    fn one_r2(&mut self, v: Var, aa: usize, bb: usize) -> MPoly {
        let mut r2 = MPoly::zero();
        for a1 in 0..=aa {
            let t = cst(aa - a1, 0).mul(&self.one_var(v, a1, bb));
            r2 = r2.add(&t.scale(&binom_big(aa, a1)));
        }
        for b1 in 0..=bb {
            let t = self.one_var(v, 0, b1).mul(&self.one_var(v, aa, bb - b1));
            r2 = r2.sub(&t.scale(&binom_big(bb, b1)));
        }
        if bb == 0 {
            r2 = r2.sub(&cst(aa + 1, 0).scale(&rat(1, aa as i64 + 1)));
        }
        r2
    }

    fn one_var_uncached(&mut self, v: Var, a: usize, b: usize) -> MPoly {
        if a == 0 && b <= 2 {
            return MPoly::var(match v {
                Var::Z => Generator::Zb(b as u8),
                Var::W => Generator::Wb(b as u8),
            });
        }
        if a == 0 {
            let (aa, bb) = (0usize, b - 1);
            let mut r1 = MPoly::zero();
            for a1 in 0..=aa {
                let t = self.one_var(v, aa - a1, 0).mul(&cst(a1, bb));
                r1 = r1.add(&t.scale(&binom_big(aa, a1)));
            }
            for b1 in 0..=bb {
                let t = cst(0, b1).mul(&self.one_var(v, aa, bb - b1));
                r1 = r1.sub(&t.scale(&binom_big(bb, b1)));
            }
            let h00 = self.one_var(v, 0, 0);
            r1 = r1.sub(&h00.mul(&self.one_var(v, aa, bb)));
            r1 = r1.sub(&cst(aa + 1, bb).scale(&rat(1, aa as i64 + 1)));
            let r2 = self.one_r2(v, aa, bb);
            let ap1 = rat(1, aa as i64 + 1);
            let bp1 = rat(1, bb as i64 + 1);
            let c1 = BigRational::one() + if bb == 0 { ap1.clone() } else { BigRational::zero() };
            let c2 = BigRational::one() + ap1;
            let det = c1 - &c2 * &bp1;
            let x = r1.sub(&r2.scale(&bp1)).scale(&(BigRational::one() / det));
            return x.scale(&c2).sub(&r2);
        }
        let (aa, bb) = (a - 1, b);
        let r2 = self.one_r2(v, aa, bb);
        let up = self.one_var(v, aa, bb + 1);
        let d = BigRational::one() + rat(1, aa as i64 + 1);
        r2.add(&up).scale(&(BigRational::one() / d))
    }

    fn two_rhs(&mut self, aa: usize, bb: usize) -> (MPoly, MPoly) {
        let mut r1 = MPoly::zero();
        for a1 in 0..=aa {
            let t = self.gab(aa - a1, 0).mul(&self.one_var(Var::W, bb, a1));
            r1 = r1.add(&t.scale(&(binom_big(aa, a1) * sign(a1 + bb + 1))));
        }
        for b1 in 0..=bb {
            let t = cst(0, b1).mul(&self.gab(aa, bb - b1));
            r1 = r1.sub(&t.scale(&binom_big(bb, b1)));
        }
        r1 = r1.sub(&self.one_var(Var::Z, 0, 0).mul(&self.gab(aa, bb)));

        let mut r2 = MPoly::zero();
        for a1 in 0..=aa {
            let t = cst(aa - a1, 0).mul(&self.gab(a1, bb));
            r2 = r2.add(&t.scale(&binom_big(aa, a1)));
        }
        for b1 in 0..=bb {
            let t = self.gab(0, b1).mul(&self.one_var(Var::Z, aa, bb - b1));
            r2 = r2.sub(&t.scale(&binom_big(bb, b1)));
        }
        r2 = r2.sub(&self.one_var(Var::W, 0, 0).mul(&self.gab(aa, bb)));
        (r1, r2)
    }

    /// `g*_{a,b}(z, w)` as a polynomial in the generators.
    pub fn gab(&mut self, a: usize, b: usize) -> MPoly {
        if let Some(p) = self.two.get(&(a, b)) {
            return p.clone();
        }
        let p = match (a, b) {
            (0, 0) => MPoly::var(Generator::G00),
            (0, 1) => MPoly::var(Generator::G01),
            (1, 0) => {
                let (r1, _) = self.two_rhs(0, 0);
                r1.add(&MPoly::var(Generator::G01))
            }
            _ => {
                let (aa, bb) = if a >= 1 { (a - 1, b) } else { (0, b - 1) };
                let (r1, r2) = self.two_rhs(aa, bb);
                let bp1 = rat(1, bb as i64 + 1);
                let d = BigRational::one() - rat(1, ((aa + 1) * (bb + 1)) as i64);
                let x = r1.sub(&r2.scale(&bp1)).scale(&(BigRational::one() / d));
                if a >= 1 {
                    x
                } else {
                    x.scale(&rat(1, aa as i64 + 1)).sub(&r2)
                }
            }
        };
        self.two.insert((a, b), p.clone());
        p
    }
}

/// `P_{a,b}` with `g*_{a,b}(z,w) = P_{a,b}(generators)`.
pub fn reduce_gab(a: usize, b: usize) -> MPoly {
    Reducer::new().gab(a, b)
}

/// `g*_{a,b}(z, 0)` in the `Zb`-generators and constants.
pub fn reduce_one_var(a: usize, b: usize) -> MPoly {
    Reducer::new().one_var(Var::Z, a, b)
}

/// The constants `(m, n)` consumed by `P_{a,b}` over all `a + b ≤ max_total`.
pub fn constants_used(max_total: usize) -> BTreeSet<(u32, u32)> {
    let mut r = Reducer::new();
    let mut out = BTreeSet::new();
    for a in 0..=max_total {
        for b in 0..=max_total - a {
            for g in r.gab(a, b).generators() {
                if let Generator::C(m, n) = g {
                    out.insert((m, n));
                }
            }
        }
    }
    out
}

/// Numeric values of every generator needed by `p` at `(z, w)`.
pub fn numeric_env(series: &Series, z: C64, w: C64, gens: &BTreeSet<Generator>) -> Result<HashMap<Generator, C64>> {
    let (zp, wp, o) = (series.pt(z), series.pt(w), series.zero());
    let mut env = HashMap::new();
    for g in gens {
        let v = match *g {
            Generator::G00 => series.g(0, 0, &zp, &wp)?,
            Generator::G01 => series.g(0, 1, &zp, &wp)?,
            Generator::Zb(k) => series.g(0, k as usize, &zp, &o)?,
            Generator::Wb(k) => series.g(0, k as usize, &wp, &o)?,
            Generator::C(m, n) => series.g(m as usize, n as usize, &o, &o)?,
        };
        env.insert(*g, v);
    }
    Ok(env)
}
