//! Classical elliptic functions: theta, Eisenstein series, Weierstrass
//! ζ/℘/℘′, the periodic modification Z, and the Kronecker double series.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{EkError, Result};
use crate::lattice::{Lattice, C64, DEFAULT_SNAP};

/// A point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tau(C64);

impl Tau {
    pub fn new(value: C64) -> Result<Self> {
        if value.im > 0.0 && value.re.is_finite() {
            Ok(Self(value))
        } else {
            Err(EkError::Domain("tau must lie in the upper half-plane".into()))
        }
    }
    pub fn value(&self) -> C64 {
        self.0
    }
    pub fn lattice(&self) -> Lattice {
        Lattice::from_tau(self.0).expect("tau is valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodConstants {
    pub eta1: C64,
    pub eta2: C64,
}

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Riemann ζ(s) for real s >= 2 (Euler–Maclaurin tail).
pub(crate) fn riemann_zeta(s: f64) -> f64 {
    let n = 50.0f64;
    let mut sum = 0.0;
    for k in (1..50).rev() {
        sum += (k as f64).powf(-s);
    }
    sum + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * n.powf(-s - 5.0) / 30240.0
}

/// `θ(z, τ) = Σ exp(πiτn² + 2πinz)`.
pub fn theta(z: C64, tau: Tau, tol: f64) -> C64 {
    let t = tau.value();
    let i = C64::new(0.0, 1.0);
    let mut sum = C64::new(1.0, 0.0);
    let mut n = 1i64;
    loop {
        let nf = n as f64;
        let a = (i * PI * t * nf * nf + 2.0 * PI * i * nf * z).exp();
        let b = (i * PI * t * nf * nf - 2.0 * PI * i * nf * z).exp();
        sum += a + b;
        // bound for the next pair of terms
        let n1 = nf + 1.0;
        let bound = 2.0 * (-PI * t.im * n1 * n1 + 2.0 * PI * n1 * z.im.abs()).exp();
        if bound < tol / 10.0 && n1 * t.im > 2.0 * z.im.abs() {
            break;
        }
        n += 1;
        if n > 100_000 {
            break;
        }
    }
    sum
}

/// `G_{2k}(τ) = Σ' (mτ + n)^{-2k}` for `2k >= 4` via the Lambert series.
fn g2k_normalized(two_k: usize, tau: C64, tol: f64) -> C64 {
    let s = (two_k - 1) as f64;
    let head = 2.0 * riemann_zeta(two_k as f64);
    // 2 (2πi)^{2k}/(2k-1)! = 2 (-1)^k (2π)^{2k}/(2k-1)!
    let log_pref = 2.0f64.ln() + two_k as f64 * (2.0 * PI).ln() - ln_factorial(two_k - 1);
    let sgn = if (two_k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut sum = C64::new(0.0, 0.0);
    let peak = (s / (2.0 * PI * tau.im)).ceil() as usize + 1;
    let mut m = 1usize;
    loop {
        let mf = m as f64;
        let qm = (TWO_PI_I * tau * mf).exp();
        let t = (C64::new(log_pref + s * mf.ln(), 0.0) + TWO_PI_I * tau * mf).exp() / (1.0 - qm);
        sum += t;
        if m > peak && t.norm() < tol * 1e-3 * (head + sum.norm()) {
            break;
        }
        m += 1;
        if m > 200_000 {
            break;
        }
    }
    head + sum * sgn
}

/// `G_2(τ)` in the Eisenstein (row-then-column) order: `(π²/3)(1 - 24 Σ σ₁(n) qⁿ)`.
fn g2_normalized(tau: C64, tol: f64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    let mut m = 1usize;
    loop {
        let qm = (TWO_PI_I * tau * m as f64).exp();
        let t = qm * m as f64 / (1.0 - qm);
        sum += t;
        if t.norm() < tol * 1e-3 {
            break;
        }
        m += 1;
        if m > 200_000 {
            break;
        }
    }
    (PI * PI / 3.0) * (1.0 - 24.0 * sum)
}

/// Per-lattice data for the Laurent route, built once and shared.
#[derive(Debug)]
struct EllipticData {
    lattice: Lattice,
    /// `e[k] = e_{2k}` for `k >= 2` (entries 0 and 1 unused).
    e: Vec<C64>,
    eta: PeriodConstants,
    shortest: f64,
}

const KMAX: usize = 130;

impl EllipticData {
    fn build(l: &Lattice) -> Self {
        let tau = l.tau();
        let w1 = l.omega1();
        let mut e = vec![C64::new(0.0, 0.0); KMAX + 1];
        for (k, slot) in e.iter_mut().enumerate().skip(2) {
            *slot = g2k_normalized(2 * k, tau, 1e-17) * w1.powi(-(2 * k as i32));
        }
        let g2 = g2_normalized(tau, 1e-17);
        let eta1_n = g2;
        let eta2_n = g2 * tau - TWO_PI_I;
        let eta = PeriodConstants { eta1: eta1_n / w1, eta2: eta2_n / w1 };
        Self { lattice: *l, e, eta, shortest: l.shortest() }
    }

    fn get(l: &Lattice) -> Arc<EllipticData> {
        static CACHE: OnceLock<Mutex<HashMap<[u64; 4], Arc<EllipticData>>>> = OnceLock::new();
        let key = [l.omega1().re.to_bits(), l.omega1().im.to_bits(), l.omega2().re.to_bits(), l.omega2().im.to_bits()];
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(d) = cache.lock().unwrap_or_else(|p| p.into_inner()).get(&key) {
            return d.clone();
        }
        let d = Arc::new(EllipticData::build(l));
        cache.lock().unwrap_or_else(|p| p.into_inner()).entry(key).or_insert_with(|| d.clone()).clone()
    }

    /// Number of Laurent terms needed at `|r|` for accuracy `tol`.
    fn kcut(&self, r: f64, tol: f64) -> usize {
        let rho = r / self.shortest;
        let mut k = 2;
        while k < KMAX {
            let kk = 2.0 * k as f64;
            let bound = 12.0 * kk * kk * rho.powf(kk) / r.powi(3).min(1.0);
            if bound < tol / 10.0 {
                break;
            }
            k += 1;
        }
        k
    }

    /// Nearest-point reduction with a pole check.
    fn reduce(&self, z: C64) -> Result<(C64, i64, i64)> {
        let (r, lp) = self.lattice.reduce_nearest(z);
        let scale = self.lattice.omega1().norm().max(self.lattice.omega2().norm());
        if r.norm() < DEFAULT_SNAP * scale {
            return Err(EkError::Pole(format!("{z} lies on the lattice")));
        }
        Ok((r, lp.m, lp.n))
    }
}

/// Lattice Eisenstein series `e_{2k} = Σ' λ^{-2k}`, `2k >= 4`.
pub fn eisenstein(l: &Lattice, two_k: usize, tol: f64) -> Result<C64> {
    if two_k < 4 || two_k % 2 == 1 {
        return Err(EkError::Domain("eisenstein needs an even weight >= 4".into()));
    }
    if two_k / 2 <= KMAX && tol >= 1e-16 {
        return Ok(EllipticData::get(l).e[two_k / 2]);
    }
    Ok(g2k_normalized(two_k, l.tau(), tol) * l.omega1().powi(-(two_k as i32)))
}

/// Brute-force `Σ λ^{-2k}` over the coordinate box `[-n, n]²`.
pub fn eisenstein_box(l: &Lattice, two_k: usize, n: i64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    for m in -n..=n {
        for k in -n..=n {
            if m == 0 && k == 0 {
                continue;
            }
            sum += l.point(m, k).powi(-(two_k as i32));
        }
    }
    sum
}

/// `Σ_{m} Σ_{n} (m·outer + n·inner)^{-2}` with the inner sums closed by
/// `Σ_n (x+n)^{-2} = π²/sin²(πx)`.
fn e2_ordered(inner: C64, outer: C64, tol: f64) -> C64 {
    let x = outer / inner;
    let mut sum = C64::new(PI * PI / 3.0, 0.0);
    let mut m = 1usize;
    loop {
        let s = (x * (PI * m as f64)).sin();
        let t = 2.0 * PI * PI / (s * s);
        sum += t;
        if t.norm() < tol * 1e-3 {
            break;
        }
        m += 1;
        if m > 1_000_000 {
            break;
        }
    }
    sum / (inner * inner)
}

/// Modified Eisenstein series `e*₂`: ordered sum (outer over `λ₂`, inner
/// over `λ₁`) minus `A⁻¹ conj(λ₁)/λ₁`.
pub fn eisenstein2_star(l: &Lattice, tol: f64) -> C64 {
    let w1 = l.omega1();
    e2_ordered(w1, l.omega2(), tol) - w1.conj() / w1 / l.a()
}

/// The same construction with the roles of the generators exchanged.
/// The correction term compensates the order dependence of the raw sum,
/// so this agrees with [`eisenstein2_star`].
pub fn eisenstein2_star_swapped(l: &Lattice, tol: f64) -> C64 {
    let w2 = l.omega2();
    e2_ordered(w2, l.omega1(), tol) - w2.conj() / w2 / l.a()
}

/// Raw conditionally convergent `Σ λ^{-2}`: outer index over `λ₂`, inner
/// over `λ₁` (or the reverse when `swapped`).
pub fn eisenstein2_ordered(l: &Lattice, swapped: bool, tol: f64) -> C64 {
    if swapped {
        e2_ordered(l.omega2(), l.omega1(), tol)
    } else {
        e2_ordered(l.omega1(), l.omega2(), tol)
    }
}

pub fn period_eta(l: &Lattice) -> PeriodConstants {
    EllipticData::get(l).eta
}

fn zeta_reduced(d: &EllipticData, r: C64, tol: f64) -> C64 {
    let k = d.kcut(r.norm(), tol);
    let r2 = r * r;
    let mut pw = r * r2; // r^{2k-1} at k = 2
    let mut s = C64::new(0.0, 0.0);
    for j in 2..=k {
        s += d.e[j] * pw;
        pw *= r2;
    }
    1.0 / r - s
}

/// Weierstrass ζ by nearest-point reduction and the Laurent series
/// `ζ(z) = 1/z - Σ_{k>=2} e_{2k} z^{2k-1}`.
pub fn weier_zeta(z: C64, l: &Lattice, tol: f64) -> Result<C64> {
    let d = EllipticData::get(l);
    let (r, m, n) = d.reduce(z)?;
    Ok(zeta_reduced(&d, r, tol) + d.eta.eta1 * m as f64 + d.eta.eta2 * n as f64)
}

/// `Z(z) = ζ(z) - z₁η₁ - z₂η₂`, periodic in `z`.
pub fn z_fn(z: C64, l: &Lattice, tol: f64) -> Result<C64> {
    let d = EllipticData::get(l);
    let (r, _, _) = d.reduce(z)?;
    let (x1, x2) = l.coords(r);
    Ok(zeta_reduced(&d, r, tol) - d.eta.eta1 * x1 - d.eta.eta2 * x2)
}

/// Weierstrass ℘ (`deriv = 0`) or ℘′ (`deriv = 1`).
pub fn weier_p(z: C64, l: &Lattice, deriv: u8, tol: f64) -> Result<C64> {
    let d = EllipticData::get(l);
    let (r, _, _) = d.reduce(z)?;
    let k = d.kcut(r.norm(), tol) + 2;
    let k = k.min(KMAX);
    let r2 = r * r;
    match deriv {
        0 => {
            let mut pw = r2; // r^{2k-2} at k = 2
            let mut s = 1.0 / r2;
            for j in 2..=k {
                s += d.e[j] * pw * (2 * j - 1) as f64;
                pw *= r2;
            }
            Ok(s)
        }
        1 => {
            let mut pw = r; // r^{2k-3} at k = 2
            let mut s = -2.0 / (r2 * r);
            for j in 2..=k {
                s += d.e[j] * pw * ((2 * j - 1) * (2 * j - 2)) as f64;
                pw *= r2;
            }
            Ok(s)
        }
        _ => Err(EkError::Domain("deriv must be 0 or 1".into())),
    }
}

/// Lower/upper edge of the strip on which the Kronecker double series is used.
pub const KRONECKER_STRIP: (f64, f64) = (0.05, 0.45);

/// Kronecker function by its double series
/// `-Σ_{m,n>=0} + Σ_{m,n<0} exp(2πi(mnτ + mz + nw))`.
pub fn kronecker_f(z: C64, w: C64, tau: Tau, tol: f64) -> Result<C64> {
    let t = tau.value();
    let beta = z.im / t.im;
    let delta = w.im / t.im;
    let (lo, hi) = KRONECKER_STRIP;
    for (name, v) in [("z", beta), ("w", delta)] {
        if !(v > lo && v < hi) {
            return Err(EkError::Domain(format!("{name} has imaginary coordinate {v:.4} outside ({lo}, {hi})")));
        }
    }
    // omitted terms satisfy |term| <= exp(-2π Imτ · K · c)
    let c = beta.min(delta).min(1.0 - beta.max(delta));
    let big_n = ((10.0 / tol).ln() / (2.0 * PI * t.im * c)).ceil() as i64 + 2;
    let mut sum = C64::new(0.0, 0.0);
    for m in 0..=big_n {
        for n in 0..=big_n {
            let (mf, nf) = (m as f64, n as f64);
            sum -= (TWO_PI_I * (mf * nf * t + mf * z + nf * w)).exp();
        }
    }
    for m in 1..=big_n {
        for n in 1..=big_n {
            let (mf, nf) = (-(m as f64), -(n as f64));
            sum += (TWO_PI_I * (mf * nf * t + mf * z + nf * w)).exp();
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn taus() -> Vec<Tau> {
        [c(0.0, 1.0), c(0.5, 1.0), c(-0.25, 1.1)].into_iter().map(|t| Tau::new(t).unwrap()).collect()
    }

    #[test]
    fn riemann_zeta_values() {
        assert!((riemann_zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((riemann_zeta(6.0) - PI.powi(6) / 945.0).abs() < 1e-15);
    }

    #[test]
    fn theta_symmetries() {
        for tau in taus() {
            let z = c(0.23, 0.11);
            let t0 = theta(z, tau, 1e-15);
            assert!((theta(z + 1.0, tau, 1e-15) - t0).norm() < 1e-13);
            assert!((theta(-z, tau, 1e-15) - t0).norm() < 1e-13);
            let t = tau.value();
            let i = c(0.0, 1.0);
            let q = (-PI * i * t - 2.0 * PI * i * z).exp() * t0;
            assert!((theta(z + t, tau, 1e-15) - q).norm() < 1e-10);
        }
    }

    #[test]
    fn square_lattice_e6_vanishes() {
        let l = Lattice::from_tau(c(0.0, 1.0)).unwrap();
        assert!(eisenstein(&l, 6, 1e-14).unwrap().norm() < 1e-10);
    }

    #[test]
    fn hexagonal_e4_vanishes() {
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let l = Lattice::new(c(1.0, 0.0), w).unwrap();
        assert!(eisenstein(&l, 4, 1e-14).unwrap().norm() < 1e-10);
    }

    #[test]
    fn eisenstein_matches_box() {
        let l = Lattice::from_tau(c(0.5, 1.0)).unwrap();
        for k in [4usize, 6, 8] {
            let q = eisenstein(&l, k, 1e-14).unwrap();
            let b = eisenstein_box(&l, k, 200);
            assert!((q - b).norm() < 10.0 * 200f64.powi(2 - k as i32), "{k}");
        }
    }

    #[test]
    fn legendre_relation() {
        for tau in taus() {
            let l = tau.lattice();
            let e = period_eta(&l);
            let r = e.eta1 * l.omega2() - e.eta2 * l.omega1() - TWO_PI_I;
            assert!(r.norm() < 1e-10);
        }
    }

    #[test]
    fn zeta_parity_and_shift() {
        for tau in taus() {
            let l = tau.lattice();
            let z = c(0.31, 0.27);
            let a = weier_zeta(z, &l, 1e-15).unwrap();
            assert!((weier_zeta(-z, &l, 1e-15).unwrap() + a).norm() < 1e-11);
            let e = period_eta(&l);
            assert!((weier_zeta(z + 1.0, &l, 1e-15).unwrap() - a - e.eta1).norm() < 1e-11);
        }
    }

    #[test]
    fn eta1_is_twice_zeta_half_period() {
        for tau in taus() {
            let l = tau.lattice();
            let z = weier_zeta(c(0.5, 0.0), &l, 1e-15).unwrap();
            assert!((2.0 * z - period_eta(&l).eta1).norm() < 1e-8);
        }
    }

    #[test]
    fn pole_is_an_error() {
        let l = Lattice::from_tau(c(0.0, 1.0)).unwrap();
        assert!(weier_zeta(c(1.0, 1.0), &l, 1e-12).is_err());
        assert!(weier_p(c(0.0, 0.0), &l, 0, 1e-12).is_err());
    }

    #[test]
    fn kronecker_domain() {
        let tau = Tau::new(c(0.0, 1.0)).unwrap();
        assert!(kronecker_f(c(0.1, 0.5), c(0.1, 0.2), tau, 1e-12).is_err());
        assert!(kronecker_f(c(0.1, 0.2), c(0.3, 0.3), tau, 1e-12).is_ok());
    }

    #[test]
    fn e2_order_dependence() {
        let l = Lattice::from_tau(c(0.0, 1.0)).unwrap();
        let a = eisenstein2_star(&l, 1e-15);
        let b = eisenstein2_star_swapped(&l, 1e-15);
        assert!(a.im.abs() < 1e-9);
        assert!((a - b).norm() < 1e-9);
        let r1 = eisenstein2_ordered(&l, false, 1e-15);
        let r2 = eisenstein2_ordered(&l, true, 1e-15);
        assert!((r1 - r2).norm() > 1e-6);
    }
}
