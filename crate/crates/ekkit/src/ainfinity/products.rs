use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::basis::{composable, BasisElement, Combination};
use crate::classical::Tau;
use crate::ekseries::{binom, factorial, Series, SeriesParams};
use crate::error::{EkError, Result};
use crate::lattice::{Lattice, StratifiedPoint, C64};

use BasisElement::*;

type GKey = (usize, usize, usize, usize, usize, usize);
type FKey = (bool, usize, usize, usize, usize, usize, usize);

/// Parameters of the algebra: `τ`, `(w_i)` for the objects `P_i` and
/// `(z_j)` for the objects `L_j`. Clones share the memo caches, which only
/// hold values determined by `(τ, w, z)`.
#[derive(Clone, Debug)]
pub struct AinfConfig {
    tau: Tau,
    lattice: Lattice,
    w: Vec<C64>,
    z: Vec<C64>,
    series: SeriesParams,
    cache: Arc<RwLock<HashMap<GKey, C64>>>,
    ft_cache: Arc<RwLock<HashMap<FKey, C64>>>,
    corrupt: bool,
}

impl AinfConfig {
    pub fn new(tau: Tau, w: Vec<C64>, z: Vec<C64>, series: SeriesParams) -> Result<Self> {
        if w.is_empty() || z.is_empty() {
            return Err(EkError::InvalidConfig("need r >= 1 and s >= 1".into()));
        }
        let lattice = tau.lattice();
        for (name, v) in [("w", &w), ("z", &z)] {
            for a in 0..v.len() {
                for b in a + 1..v.len() {
                    if lattice.classify(v[a] - v[b], series.snap_eps).on_lattice() {
                        return Err(EkError::InvalidConfig(format!("{name}_{a} - {name}_{b} lies in the lattice")));
                    }
                }
            }
        }
        Ok(Self { tau, lattice, w, z, series, cache: Arc::default(), ft_cache: Arc::default(), corrupt: false })
    }

    /// Debug mutation: flips the sign of every `m_4`. Used to show the
    /// Stasheff check has teeth.
    pub fn with_corrupted_sign(mut self) -> Self {
        self.corrupt = true;
        self
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
    pub fn a(&self) -> f64 {
        self.lattice.a()
    }
    pub fn w(&self) -> &[C64] {
        &self.w
    }
    pub fn z(&self) -> &[C64] {
        &self.z
    }
    pub fn r(&self) -> usize {
        self.w.len()
    }
    pub fn s(&self) -> usize {
        self.z.len()
    }
    pub fn series(&self) -> Series {
        Series::with_params(self.lattice, self.series)
    }

    /// A copy with one parameter moved; rejects configurations where two
    /// parameters collide modulo the lattice.
    pub fn perturbed(&self, param: Param, dz: C64) -> Result<Self> {
        let mut w = self.w.clone();
        let mut z = self.z.clone();
        match param {
            Param::Z(j) | Param::ZBar(j) => z[j] += dz,
            Param::W(i) | Param::WBar(i) => w[i] += dz,
        }
        let mut c = Self::new(self.tau, w, z, self.series)?;
        c.corrupt = self.corrupt;
        Ok(c)
    }

    /// `z_{j'} - z_j` (exactly 0 when `j = j'`).
    pub fn dz(&self, j: usize, jp: usize) -> StratifiedPoint {
        if j == jp {
            self.lattice.lattice_point(0, 0)
        } else {
            self.lattice.classify(self.z[jp] - self.z[j], self.series.snap_eps)
        }
    }

    /// `w_{i'} - w_i` (exactly 0 when `i = i'`).
    pub fn dw(&self, i: usize, ip: usize) -> StratifiedPoint {
        if i == ip {
            self.lattice.lattice_point(0, 0)
        } else {
            self.lattice.classify(self.w[ip] - self.w[i], self.series.snap_eps)
        }
    }

    /// Memoized `g*_{a,b}(z_{j'} - z_j, w_{i'} - w_i)`; NaN if the series
    /// evaluation fails, so downstream residuals fail visibly.
    pub fn g(&self, a: usize, b: usize, j: usize, jp: usize, i: usize, ip: usize) -> C64 {
        let key = (a, b, j, jp, i, ip);
        if let Some(v) = self.cache.read().unwrap_or_else(|p| p.into_inner()).get(&key) {
            return *v;
        }
        let v = self.series().g(a, b, &self.dz(j, jp), &self.dw(i, ip)).unwrap_or(C64::new(f64::NAN, f64::NAN));
        self.cache.write().unwrap_or_else(|p| p.into_inner()).insert(key, v);
        v
    }

    /// Memoized `f̃*_{m,n}(z_{j'}-z_j, w_{i'}-w_i)`, or with the two
    /// arguments swapped when `swap` is set.
    #[allow(clippy::too_many_arguments)]
    pub fn f_tilde(&self, swap: bool, m: usize, n: usize, j: usize, jp: usize, i: usize, ip: usize) -> Result<C64> {
        let key = (swap, m, n, j, jp, i, ip);
        if let Some(v) = self.ft_cache.read().unwrap_or_else(|p| p.into_inner()).get(&key) {
            return Ok(*v);
        }
        let (z, w) = (self.dz(j, jp), self.dw(i, ip));
        let v = if swap { self.series().f_tilde(m, n, &w, &z)? } else { self.series().f_tilde(m, n, &z, &w)? };
        self.ft_cache.write().unwrap_or_else(|p| p.into_inner()).insert(key, v);
        Ok(v)
    }

    /// `M̃(a,b,c,d)^{jj'}_{ii'} = (-1)^{C(n,2)+1}/(a!b!c!d!) · g*_{a+c,b+d}(z_{j'}-z_j, w_{i'}-w_i)`.
    pub fn m_tilde(&self, abcd: [usize; 4], j: usize, jp: usize, i: usize, ip: usize) -> C64 {
        let [a, b, c, d] = abcd;
        let n = a + b + c + d + 3;
        let mut sg = if (binom(n, 2) as u64 + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        if self.corrupt && n == 4 {
            sg = -sg;
        }
        let den = factorial(a) * factorial(b) * factorial(c) * factorial(d);
        self.g(a + c, b + d, j, jp, i, ip) * (sg / den)
    }
}

/// A parameter of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Z(usize),
    W(usize),
    ZBar(usize),
    WBar(usize),
}

/// Non-ξ letters of a string and the lengths of the ξ-runs around them.
fn split(st: &[BasisElement]) -> (Vec<BasisElement>, Vec<usize>) {
    let mut runs = vec![0];
    let mut letters = Vec::new();
    for x in st {
        if x.is_xi() {
            *runs.last_mut().expect("nonempty") += 1;
        } else {
            letters.push(*x);
            runs.push(0);
        }
    }
    (letters, runs)
}

/// Type-I shape `(ξ̃)^a θ̃_{ij} (ξ̃)^b η̃_{ji'} (ξ̃)^c θ̃_{i'j'} (ξ̃)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeI {
    pub abcd: [usize; 4],
    pub i: usize,
    pub j: usize,
    pub ip: usize,
    pub jp: usize,
}

impl TypeI {
    pub fn string(&self) -> Vec<BasisElement> {
        let [a, b, c, d] = self.abcd;
        let mut v = Vec::new();
        v.extend(std::iter::repeat_n(XiP(self.i), a));
        v.push(Theta(self.i, self.j));
        v.extend(std::iter::repeat_n(XiL(self.j), b));
        v.push(Eta(self.j, self.ip));
        v.extend(std::iter::repeat_n(XiP(self.ip), c));
        v.push(Theta(self.ip, self.jp));
        v.extend(std::iter::repeat_n(XiL(self.jp), d));
        v
    }

    pub fn parse(st: &[BasisElement]) -> Option<TypeI> {
        if !composable(st) {
            return None;
        }
        let (letters, runs) = split(st);
        match letters.as_slice() {
            [Theta(i, j), Eta(_, ip), Theta(_, jp)] => {
                Some(TypeI { abcd: [runs[0], runs[1], runs[2], runs[3]], i: *i, j: *j, ip: *ip, jp: *jp })
            }
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.abcd.iter().sum::<usize>() + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// All type-I strings with `a+b+c+d <= max_xi` over `r` and `s` objects.
pub fn type_i_strings(r: usize, s: usize, max_xi: usize) -> Vec<TypeI> {
    let mut out = Vec::new();
    for a in 0..=max_xi {
        for b in 0..=max_xi - a {
            for c in 0..=max_xi - a - b {
                for d in 0..=max_xi - a - b - c {
                    for i in 0..r {
                        for j in 0..s {
                            for ip in 0..r {
                                for jp in 0..s {
                                    out.push(TypeI { abcd: [a, b, c, d], i, j, ip, jp });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `m_n` on a composable string (no composability check).
pub(crate) fn mu_unchecked(cfg: &AinfConfig, st: &[BasisElement]) -> Combination {
    let one = C64::new(1.0, 0.0);
    let n = st.len();
    if n <= 1 {
        return Combination::zero();
    }
    if n == 2 {
        let (x, y) = (st[0], st[1]);
        if x.is_id() {
            return Combination::single(y, one);
        }
        if y.is_id() {
            return Combination::single(x, one);
        }
        return match (x, y) {
            (Theta(i, _), Eta(_, i2)) if i == i2 => Combination::single(XiP(i), one),
            (Eta(j, _), Theta(_, j2)) if j == j2 => Combination::single(XiL(j), one),
            _ => Combination::zero(),
        };
    }
    if st.iter().any(|x| x.is_id()) {
        return Combination::zero();
    }
    let (letters, runs) = split(st);
    match letters.as_slice() {
        [Theta(i, j), Eta(_, ip), Theta(_, jp)] => {
            let v = cfg.m_tilde([runs[0], runs[1], runs[2], runs[3]], *j, *jp, *i, *ip);
            Combination::single(Theta(*i, *jp), v)
        }
        [Eta(j, i), Theta(_, jp), Eta(_, ip)] => {
            let [a, b, c, d] = [runs[0], runs[1], runs[2], runs[3]];
            let v = cfg.m_tilde([b, c, d, a], *jp, *j, *i, *ip);
            Combination::single(Eta(*j, *ip), v)
        }
        [Theta(i, j), Eta(_, ip), Theta(_, jp), Eta(_, i_end)] => {
            if i_end != i {
                return Combination::zero();
            }
            let [a, b, c, d, e] = [runs[0], runs[1], runs[2], runs[3], runs[4]];
            let v = cfg.m_tilde([a + e + 1, b, c, d], *j, *jp, *i, *ip);
            Combination::single(IdP(*i), v)
        }
        [Eta(j, i), Theta(_, jp), Eta(_, ip), Theta(_, j_end)] => {
            if j_end != j {
                return Combination::zero();
            }
            let [a, b, c, d, e] = [runs[0], runs[1], runs[2], runs[3], runs[4]];
            let v = cfg.m_tilde([b, c, d, a + e + 1], *jp, *j, *i, *ip);
            Combination::single(IdL(*j), v)
        }
        _ => Combination::zero(),
    }
}

/// The product `m_n(x_1, …, x_n)` of the minimal A∞ structure.
pub fn mu(cfg: &AinfConfig, st: &[BasisElement]) -> Result<Combination> {
    if st.is_empty() || !composable(st) {
        return Err(EkError::NotComposable);
    }
    Ok(mu_unchecked(cfg, st))
}

/// Unit-normalized symmetric pairing on the rescaled basis.
pub fn pairing_e(x: BasisElement, y: BasisElement) -> Result<C64> {
    if x.degree() + y.degree() != 1 {
        return Err(EkError::Domain(format!("pairing needs complementary degrees, got {x} and {y}")));
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    Ok(match (x, y) {
        (IdP(i), XiP(k)) | (XiP(i), IdP(k)) if i == k => one,
        (IdL(j), XiL(k)) | (XiL(j), IdL(k)) if j == k => one,
        (Theta(i, j), Eta(j2, i2)) | (Eta(j, i), Theta(i2, j2)) if i == i2 && j == j2 => one,
        _ => zero,
    })
}

fn pair_comb(c: &Combination, y: BasisElement) -> Result<C64> {
    let mut s = C64::new(0.0, 0.0);
    for (k, v) in &c.0 {
        s += v * pairing_e(*k, y)?;
    }
    Ok(s)
}

fn parity(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Stasheff combination
/// `Σ (-1)^{r + st + s(|x_1|+…+|x_r|)} m_{r+1+t}(x_1..x_r, m_s(x_{r+1}..x_{r+s}), …)`
/// together with the largest magnitude of any contributing term.
pub fn stasheff_combination(cfg: &AinfConfig, st: &[BasisElement]) -> (Combination, f64) {
    let n = st.len();
    let mut acc = Combination::zero();
    let mut scale: f64 = 0.0;
    for s in 2..=n {
        for r in 0..=n - s {
            let t = n - r - s;
            if r + 1 + t < 2 {
                continue;
            }
            let inner = mu_unchecked(cfg, &st[r..r + s]);
            if inner.is_zero() {
                continue;
            }
            let dsum: i64 = st[..r].iter().map(|x| x.degree() as i64).sum();
            let sg = parity(r as i64 + (s * t) as i64 + s as i64 * dsum);
            for (y, cy) in &inner.0 {
                let mut outer_st = Vec::with_capacity(r + 1 + t);
                outer_st.extend_from_slice(&st[..r]);
                outer_st.push(*y);
                outer_st.extend_from_slice(&st[r + s..]);
                let outer = mu_unchecked(cfg, &outer_st);
                for v in outer.0.values() {
                    scale = scale.max((v * cy).norm());
                }
                acc.add_scaled(&outer, cy * sg);
            }
        }
    }
    (acc, scale)
}

/// Max-norm of the Stasheff combination relative to `max(1, largest term)`.
pub fn stasheff_residual(cfg: &AinfConfig, st: &[BasisElement], max_n: usize) -> Result<f64> {
    if st.len() < 2 || st.len() > max_n {
        return Err(EkError::Domain(format!("string length {} outside [2, {max_n}]", st.len())));
    }
    if !composable(st) {
        return Err(EkError::NotComposable);
    }
    let (c, scale) = stasheff_combination(cfg, st);
    Ok(c.max_norm() / scale.max(1.0))
}

/// Cyclic-symmetry residual
/// `⟨m_n(α_1..α_n), α_{n+1}⟩ - (-1)^{n(|α_1|+1)} ⟨m_n(α_2..α_{n+1}), α_1⟩`
/// for a closed string of length `n+1` with total degree `n-1`; `None`
/// when the string does not qualify.
pub fn cyclic_residual(cfg: &AinfConfig, st: &[BasisElement]) -> Option<f64> {
    let n1 = st.len();
    if n1 < 3 || !composable(st) {
        return None;
    }
    let n = n1 - 1;
    if st[0].source() != st[n].target() {
        return None;
    }
    let deg: i32 = st.iter().map(|x| x.degree()).sum();
    if deg != n as i32 - 1 {
        return None;
    }
    let lhs = pair_comb(&mu_unchecked(cfg, &st[..n]), st[n]).ok()?;
    let rhs = pair_comb(&mu_unchecked(cfg, &st[1..]), st[0]).ok()?;
    let sg = parity((n as i64) * (st[0].degree() as i64 + 1));
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    Some((lhs - rhs * sg).norm() / scale)
}

/// Unitality residual on a string: `m_2(id, x) = x = m_2(x, id)` and
/// `m_n(…, id, …) = 0` for `n >= 3`.
pub fn unital_residual(cfg: &AinfConfig, st: &[BasisElement]) -> Option<f64> {
    if !composable(st) || !st.iter().any(|x| x.is_id()) {
        return None;
    }
    let got = mu_unchecked(cfg, st);
    let want = if st.len() == 2 {
        if st[0].is_id() {
            Combination::single(st[1], C64::new(1.0, 0.0))
        } else {
            Combination::single(st[0], C64::new(1.0, 0.0))
        }
    } else {
        Combination::zero()
    };
    Some(got.sub(&want).max_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfinity::basis::{basis, composable_strings};

    fn cfg(tau: C64) -> AinfConfig {
        AinfConfig::new(
            Tau::new(tau).unwrap(),
            vec![C64::new(0.13, 0.07), C64::new(0.41, 0.29)],
            vec![C64::new(0.22, 0.61), C64::new(0.71, 0.18)],
            SeriesParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn m2_table() {
        let c = cfg(C64::new(0.0, 1.0));
        let one = C64::new(1.0, 0.0);
        assert_eq!(mu(&c, &[Theta(0, 0), Eta(0, 0)]).unwrap(), Combination::single(XiP(0), one));
        assert_eq!(mu(&c, &[Eta(1, 0), Theta(0, 1)]).unwrap(), Combination::single(XiL(1), one));
        assert!(mu(&c, &[Theta(0, 0), Eta(0, 1)]).unwrap().is_zero());
        assert_eq!(mu(&c, &[IdP(0), Theta(0, 1)]).unwrap(), Combination::single(Theta(0, 1), one));
        assert!(mu(&c, &[XiP(0), Theta(0, 1)]).unwrap().is_zero());
    }

    #[test]
    fn m3_theta_eta_theta() {
        let c = cfg(C64::new(0.5, 1.0));
        let v = mu(&c, &[Theta(0, 0), Eta(0, 1), Theta(1, 1)]).unwrap();
        let g = c.series().g(0, 0, &c.dz(0, 1), &c.dw(0, 1)).unwrap();
        assert!((v.get(&Theta(0, 1)) - g).norm() < 1e-14);
        // e-form: m_3 = (-1)^{C(4,2)+1} e*_{0,1}(z_1 - z_0, w_0 - w_1)
        let e = c.series().e(0, 1, &c.dz(0, 1), &c.dw(0, 1).neg()).unwrap();
        assert!((v.get(&Theta(0, 1)) + e).norm() < 1e-12);
    }

    #[test]
    fn ids_kill_higher_products() {
        let c = cfg(C64::new(0.0, 1.0));
        let st = [Theta(0, 0), Eta(0, 0), IdP(0), Theta(0, 1)];
        assert!(mu(&c, &st).unwrap().is_zero());
    }

    #[test]
    fn noncomposable_is_error() {
        let c = cfg(C64::new(0.0, 1.0));
        assert!(mu(&c, &[Theta(0, 0), Theta(0, 0)]).is_err());
    }

    #[test]
    fn pairing_values() {
        let one = C64::new(1.0, 0.0);
        assert_eq!(pairing_e(IdP(1), XiP(1)).unwrap(), one);
        assert_eq!(pairing_e(Theta(1, 2), Eta(2, 1)).unwrap(), one);
        assert_eq!(pairing_e(Theta(1, 2), Eta(2, 2)).unwrap(), C64::new(0.0, 0.0));
        assert!(pairing_e(Theta(1, 2), IdP(1)).is_err());
    }

    #[test]
    fn stasheff_length_four() {
        let c = cfg(C64::new(-0.25, 1.1));
        let b = basis(2, 2);
        for st in composable_strings(&b, 4) {
            assert!(stasheff_residual(&c, &st, 8).unwrap() < 1e-10, "{st:?}");
        }
    }

    #[test]
    fn cyclic_and_unital_up_to_five() {
        let c = cfg(C64::new(0.5, 1.0));
        let b = basis(2, 2);
        let mut seen = 0;
        for n in 2..=5 {
            for st in composable_strings(&b, n) {
                if let Some(r) = cyclic_residual(&c, &st) {
                    seen += 1;
                    assert!(r < 1e-9, "{st:?}: {r:e}");
                }
                if let Some(r) = unital_residual(&c, &st) {
                    assert!(r == 0.0, "{st:?}");
                }
            }
        }
        assert!(seen > 100);
    }

    #[test]
    fn corrupted_sign_is_detected() {
        let c = cfg(C64::new(0.0, 1.0)).with_corrupted_sign();
        let b = basis(2, 2);
        let worst =
            composable_strings(&b, 5).iter().map(|st| stasheff_residual(&c, st, 8).unwrap()).fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn type_i_round_trip() {
        let t = TypeI { abcd: [1, 0, 2, 1], i: 0, j: 1, ip: 1, jp: 0 };
        assert_eq!(TypeI::parse(&t.string()), Some(t));
        assert_eq!(type_i_strings(2, 2, 3).len(), 35 * 16);
    }

    #[test]
    fn invalid_config() {
        let t = Tau::new(C64::new(0.0, 1.0)).unwrap();
        let r = AinfConfig::new(
            t,
            vec![C64::new(0.1, 0.0), C64::new(1.1, 0.0)],
            vec![C64::new(0.0, 0.3)],
            SeriesParams::default(),
        );
        assert!(r.is_err());
    }
}
