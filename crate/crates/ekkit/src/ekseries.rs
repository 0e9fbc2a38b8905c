//! Gaussian-damped lattice series f*, g* and the Eisenstein–Kronecker
//! numbers e*, plus the slowly convergent direct sum used as an oracle.

use crate::error::{EkError, Result};
use crate::lattice::{Lattice, StratifiedPoint, C64, DEFAULT_SNAP};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesParams {
    pub tol: f64,
    pub max_radius: f64,
    pub snap_eps: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        Self { tol: 1e-12, max_radius: 100.0, snap_eps: DEFAULT_SNAP }
    }
}

impl SeriesParams {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EKValue {
    pub value: C64,
    pub radius_used: f64,
    pub tail_bound: f64,
}

impl EKValue {
    fn scaled(self, c: C64) -> Self {
        Self { value: self.value * c, radius_used: self.radius_used, tail_bound: self.tail_bound * c.norm() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Tilde,
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub(crate) fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

fn sign(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `exp(A⁻¹ z (w - w̄))`, the factor relating plain and tilde variants.
pub fn tilde_factor(l: &Lattice, z: C64, w: C64) -> C64 {
    (z * C64::new(0.0, 2.0 * w.im) / l.a()).exp()
}

/// `f*_{m,n}(z, w)`.
///
/// The series is evaluated at the reduced representative of `z`; the
/// shift is restored through quasi-periodicity. The sum runs over annuli
/// of width equal to the shortest lattice vector and stops once three
/// consecutive annuli contribute only terms below `tol/10` (relative to
/// the largest term seen, floored at 1).
pub fn f_star(
    m: usize,
    n: usize,
    z: &StratifiedPoint,
    w: &StratifiedPoint,
    l: &Lattice,
    p: &SeriesParams,
    variant: Variant,
) -> Result<EKValue> {
    let r = z.reduced;
    let wr = w.reduced;
    let a = l.a();
    let s = l.shortest();
    let ainv_m = a.powi(-(m as i32));
    let mut radius = (a * (p.tol.recip().ln() + 10.0)).sqrt() + (m as f64) * a.sqrt() + 2.0 * s;
    loop {
        if radius > p.max_radius {
            return Err(EkError::Truncation { radius, tail_bound: f64::NAN });
        }
        let pts = l.points_near(r, radius);
        let nshell = (radius / s).floor() as usize;
        let mut shell_max = vec![0.0f64; nshell + 1];
        let mut terms: Vec<(usize, C64)> = Vec::with_capacity(pts.len());
        for lp in &pts {
            let lam = lp.value(l);
            let x = lam + r;
            if z.on_lattice() && lp.m == 0 && lp.n == 0 {
                continue;
            }
            let ax = x.norm();
            let k = (ax / s).floor() as usize;
            if k > nshell {
                continue;
            }
            let damp = (-ax * ax / a).exp();
            let mag = ainv_m * ax.powi(m as i32 - n as i32) * damp;
            shell_max[k] = shell_max[k].max(mag);
            let ch = C64::from_polar(1.0, 2.0 * (wr * lam.conj()).im / a);
            let t = x.conj().powu(m as u32) / x.powu(n as u32) * (damp * ainv_m) * ch;
            terms.push((k, t));
        }
        let biggest = shell_max.iter().cloned().fold(0.0, f64::max).max(1.0);
        let thresh = p.tol / 10.0 * biggest;
        // shells strictly inside the enumerated disk are complete
        let complete = nshell.saturating_sub(1);
        let peak = shell_max.iter().enumerate().fold((0, 0.0), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc }).0;
        let mut stop = None;
        let mut run = 0;
        for (k, &mx) in shell_max.iter().enumerate().take(complete) {
            if k <= peak {
                continue;
            }
            if mx < thresh {
                run += 1;
                if run == 3 {
                    stop = Some(k);
                    break;
                }
            } else {
                run = 0;
            }
        }
        if let Some(kmax) = stop {
            let mut sum = C64::new(0.0, 0.0);
            let mut count_last = 0usize;
            for &(k, t) in &terms {
                if k <= kmax {
                    sum += t;
                    if k + 2 >= kmax {
                        count_last += 1;
                    }
                }
            }
            let tail = shell_max[kmax - 2..=kmax].iter().cloned().fold(0.0, f64::max) * count_last.max(1) as f64;
            // quasi-periodicity: f(r + μ, w) = <μ, w> f(r, w)
            let mu = z.shift.value(l);
            let mut out = EKValue { value: sum, radius_used: (kmax + 1) as f64 * s, tail_bound: tail };
            out = out.scaled(l.pairing(mu, wr));
            if variant == Variant::Tilde {
                out = out.scaled(tilde_factor(l, z.raw, w.raw));
            }
            return Ok(out);
        }
        radius *= 1.5;
    }
}

/// `g*_{a,b}(z, w)` as the finite binomial combination of f* terms.
pub fn g_star(
    a: usize,
    b: usize,
    z: &StratifiedPoint,
    w: &StratifiedPoint,
    l: &Lattice,
    p: &SeriesParams,
    variant: Variant,
) -> Result<EKValue> {
    let pzw = l.pairing(z.raw, w.raw);
    let sg = sign(a + b + 1);
    let mut value = C64::new(0.0, 0.0);
    let mut tail = 0.0;
    let mut radius: f64 = 0.0;
    for k in 0..=a.max(b) {
        let kf = factorial(k);
        let ca = binom(a, k);
        if ca != 0.0 {
            let f = f_star(a + b - k, k + 1, w, z, l, p, Variant::Plain)?;
            value += f.value * pzw * (kf * ca);
            tail += f.tail_bound * kf * ca;
            radius = radius.max(f.radius_used);
        }
        let cb = binom(b, k);
        if cb != 0.0 {
            let f = f_star(a + b - k, k + 1, z, w, l, p, Variant::Plain)?;
            value += f.value * (sg * kf * cb);
            tail += f.tail_bound * kf * cb;
            radius = radius.max(f.radius_used);
        }
    }
    let out = EKValue { value, radius_used: radius, tail_bound: tail };
    Ok(match variant {
        Variant::Plain => out,
        Variant::Tilde => out.scaled(tilde_factor(l, z.raw, w.raw)),
    })
}

/// Eisenstein–Kronecker number `e*_{a,b}(z, w)`, `b >= 1`, via
/// `e*_{a,b}(z,w) = (-1)^{a+b} A^a/(b-1)! · g*_{a,b-1}(z,-w)`.
pub fn ek(
    a: usize,
    b: usize,
    z: &StratifiedPoint,
    w: &StratifiedPoint,
    l: &Lattice,
    p: &SeriesParams,
) -> Result<EKValue> {
    if b == 0 {
        return Err(EkError::Domain("e*_{a,b} needs b >= 1".into()));
    }
    let g = g_star(a, b - 1, z, &w.neg(), l, p, Variant::Plain)?;
    let c = sign(a + b) * l.a().powi(a as i32) / factorial(b - 1);
    Ok(g.scaled(C64::new(c, 0.0)))
}

/// Direct partial sum `Σ_{|λ+z| <= R} conj(λ+z)^a/(λ+z)^b <λ, w>`, valid
/// (absolutely convergent) for `b >= a + 3`.
pub fn ek_direct(
    a: usize,
    b: usize,
    z: &StratifiedPoint,
    w: &StratifiedPoint,
    l: &Lattice,
    radius: f64,
) -> Result<EKValue> {
    if b < a + 3 {
        return Err(EkError::Domain("analytic continuation required — use ek".into()));
    }
    if !(radius > 0.0) || radius > 5000.0 {
        return Err(EkError::Domain("radius out of range".into()));
    }
    let r = z.reduced;
    let wr = w.reduced;
    let al = l.a();
    let mut sum = C64::new(0.0, 0.0);
    for lp in l.points_near(r, radius) {
        if z.on_lattice() && lp.m == 0 && lp.n == 0 {
            continue;
        }
        let lam = lp.value(l);
        let x = lam + r;
        let ch = C64::from_polar(1.0, 2.0 * (lam * wr.conj()).im / al);
        sum += x.conj().powu(a as u32) / x.powu(b as u32) * ch;
    }
    // e(r + μ, w) = e(r, w) <μ, w>^{-1}
    let mu = z.shift.value(l);
    let value = sum * l.pairing(wr, mu);
    let d = (b - a - 2) as f64;
    let tail = 2.0 * std::f64::consts::PI * radius.powf(-d) / (d * l.area());
    Ok(EKValue { value, radius_used: radius, tail_bound: tail })
}

/// Convenience evaluator bundling a lattice and series parameters.
#[derive(Clone, Copy, Debug)]
pub struct Series {
    pub lattice: Lattice,
    pub params: SeriesParams,
}

impl Series {
    pub fn new(lattice: Lattice) -> Self {
        Self { lattice, params: SeriesParams::default() }
    }

    pub fn with_params(lattice: Lattice, params: SeriesParams) -> Self {
        Self { lattice, params }
    }

    pub fn pt(&self, z: C64) -> StratifiedPoint {
        self.lattice.classify(z, self.params.snap_eps)
    }

    pub fn zero(&self) -> StratifiedPoint {
        self.lattice.lattice_point(0, 0)
    }

    pub fn f(&self, m: usize, n: usize, z: &StratifiedPoint, w: &StratifiedPoint) -> Result<C64> {
        f_star(m, n, z, w, &self.lattice, &self.params, Variant::Plain).map(|v| v.value)
    }

    pub fn f_tilde(&self, m: usize, n: usize, z: &StratifiedPoint, w: &StratifiedPoint) -> Result<C64> {
        f_star(m, n, z, w, &self.lattice, &self.params, Variant::Tilde).map(|v| v.value)
    }

    pub fn g(&self, a: usize, b: usize, z: &StratifiedPoint, w: &StratifiedPoint) -> Result<C64> {
        g_star(a, b, z, w, &self.lattice, &self.params, Variant::Plain).map(|v| v.value)
    }

    pub fn g_tilde(&self, a: usize, b: usize, z: &StratifiedPoint, w: &StratifiedPoint) -> Result<C64> {
        g_star(a, b, z, w, &self.lattice, &self.params, Variant::Tilde).map(|v| v.value)
    }

    /// `g*` at raw complex arguments, classified with the configured snap.
    pub fn gc(&self, a: usize, b: usize, z: C64, w: C64) -> Result<C64> {
        self.g(a, b, &self.pt(z), &self.pt(w))
    }

    pub fn e(&self, a: usize, b: usize, z: &StratifiedPoint, w: &StratifiedPoint) -> Result<C64> {
        ek(a, b, z, w, &self.lattice, &self.params).map(|v| v.value)
    }

    pub fn ec(&self, a: usize, b: usize, z: C64, w: C64) -> Result<C64> {
        self.e(a, b, &self.pt(z), &self.pt(w))
    }
}

/// Wirtinger derivatives `(∂_z F, ∂_{z̄} F)` by central differences.
pub fn wirtinger<F>(f: F, z: C64, h: f64) -> Result<(C64, C64)>
where
    F: Fn(C64) -> Result<C64>,
{
    let i = C64::new(0.0, 1.0);
    let dx = f(z + h)? - f(z - h)?;
    let dy = f(z + i * h)? - f(z - i * h)?;
    Ok(((dx - i * dy) / (4.0 * h), (dx + i * dy) / (4.0 * h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn series(tau: C64) -> Series {
        Series::new(Lattice::from_tau(tau).unwrap())
    }

    #[test]
    fn odd_f_vanishes_at_origin() {
        let s = series(c(0.5, 1.0));
        let o = s.zero();
        for m in 0..4 {
            for n in 0..4 {
                if (m + n) % 2 == 1 {
                    assert!(s.f(m, n, &o, &o).unwrap().norm() < 1e-13, "{m} {n}");
                }
            }
        }
    }

    #[test]
    fn f_parity() {
        let s = series(c(-0.25, 1.1));
        let z = s.pt(c(0.31, 0.17));
        let w = s.pt(c(0.12, 0.44));
        for m in 0..4 {
            for n in 0..4 {
                let a = s.f(m, n, &z.neg(), &w.neg()).unwrap();
                let b = s.f(m, n, &z, &w).unwrap() * sign(m + n);
                assert!((a - b).norm() < 1e-11 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn g_origin_vanishes() {
        let s = series(c(0.0, 1.0));
        let o = s.zero();
        assert!(s.g(0, 0, &o, &o).unwrap().norm() < 1e-13);
    }

    #[test]
    fn g_flip() {
        let s = series(c(0.5, 1.0));
        let (z, w) = (c(0.31, 0.17), c(0.12, 0.44));
        for a in 0..3 {
            for b in 0..3 {
                let lhs = s.gc(a, b, z, w).unwrap();
                let rhs = s.gc(b, a, w, z).unwrap() * sign(a + b + 1) * s.lattice.pairing(z, w);
                assert!((lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn direct_rejects_slow_region() {
        let s = series(c(0.0, 1.0));
        let z = s.pt(c(0.3, 0.1));
        assert!(ek_direct(0, 2, &z, &z, &s.lattice, 10.0).is_err());
        assert!(ek_direct(0, 3, &z, &z, &s.lattice, 10.0).is_ok());
    }

    #[test]
    fn ek_needs_positive_b() {
        let s = series(c(0.0, 1.0));
        let z = s.pt(c(0.3, 0.1));
        assert!(s.e(0, 0, &z, &z).is_err());
    }

    #[test]
    fn tail_is_reported() {
        let s = series(c(0.0, 1.0));
        let z = s.pt(c(0.3, 0.1));
        let v = f_star(2, 1, &z, &z, &s.lattice, &s.params, Variant::Plain).unwrap();
        assert!(v.tail_bound < s.params.tol);
        assert!(v.radius_used > 1.0);
    }
}
