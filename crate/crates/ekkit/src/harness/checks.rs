//! Residual computations behind each `CheckId`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use super::sample::Sampler;
use super::{CheckId, Env};
use crate::ainfinity::{
    basis, composable_strings, cyclic_residual, gerstenhaber, mu, perturbation_oracle, stasheff_residual,
    type_i_strings, unital_residual, variation_residuals, AinfConfig, BasisElement, Cochain, Param, TypeI,
};
use crate::classical::{
    eisenstein, eisenstein2_ordered, eisenstein2_star, eisenstein2_star_swapped, kronecker_f, period_eta, weier_p,
    z_fn, Tau, KRONECKER_STRIP,
};
use crate::ekseries::{binom, ek_direct, factorial, wirtinger, Series, SeriesParams};
use crate::error::Result;
use crate::lattice::{Lattice, StratifiedPoint, C64};
use crate::symrec::{numeric_env, MPoly, Reducer, Var};

const H: f64 = 1e-4;
/// Finite-difference checks keep points farther from the lattice so the
/// `O(h²)` error stays well under the threshold.
const FD_EXCLUSION: f64 = 0.3;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `|x - y| / max(1, |y|)`
fn rel(x: C64, y: C64) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}

/// Finite-difference residual, scaled by the gradient `(∂, ∂̄)` as well:
/// the truncation error of the stencil grows with it.
fn fd_rel(x: C64, y: C64, d: (C64, C64)) -> f64 {
    (x - y).norm() / y.norm().max(1.0).max(d.0.norm()).max(d.1.norm())
}

fn nan_max(acc: f64, x: f64) -> f64 {
    if acc.is_nan() || x.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

fn sign(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

struct Ctx {
    l: Lattice,
    s: Series,
    smp: Sampler,
}

impl Ctx {
    fn new(id: CheckId, env: &Env) -> Self {
        let l = env.tau.lattice();
        Self { l, s: Series::new(l), smp: Sampler::new(l, env.seed, id.as_str()) }
    }

    fn pt(&self, z: C64) -> StratifiedPoint {
        self.s.pt(z)
    }
}

pub(super) fn residual(id: CheckId, env: &Env) -> Result<f64> {
    let mut cx = Ctx::new(id, env);
    match id {
        CheckId::ThmC => thm_c(&mut cx),
        CheckId::FuncEq => func_eq(&mut cx),
        CheckId::DerivE => deriv_e(&mut cx),
        CheckId::DerivG => deriv_g(&mut cx),
        CheckId::Limits => limits(&mut cx),
        CheckId::Quasi => quasi(&mut cx),
        CheckId::ZetaId => zeta_id(&mut cx),
        CheckId::KronId => kron_id(&mut cx, env.tau),
        CheckId::EFLink => e_f_link(&mut cx, env.tau),
        CheckId::ClassicalX => classical_x(&mut cx, id.threshold()),
        CheckId::Quad => quad(&mut cx),
        CheckId::Aybe => aybe(&mut cx),
        CheckId::Expansion => expansion(&mut cx),
        CheckId::Stasheff => stasheff(&mut cx, env),
        CheckId::Cyclic => cyclic(&mut cx, env),
        CheckId::Unital => unital(&mut cx, env),
        CheckId::PerturbOracle => perturb_oracle(&mut cx, env),
        CheckId::MaurerCartan => maurer_cartan(&mut cx, env),
        CheckId::Variation => variation(&mut cx, env),
        CheckId::Corb => corb(&mut cx),
        CheckId::Constants => constants(&mut cx, id.threshold()),
    }
}

// ---- ekseries ----

fn thm_c(cx: &mut Ctx) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a, b) in [(0, 4), (0, 5), (1, 5), (2, 6)] {
        for k in 0..10 {
            let v = cx.smp.generic_tuple(2);
            // one on-lattice w per pair
            let w = if k == 0 { cx.s.zero() } else { cx.pt(v[1]) };
            let z = cx.pt(v[0]);
            let e = cx.s.e(a, b, &z, &w)?;
            let d = ek_direct(a, b, &z, &w, &cx.l, 150.0)?;
            worst = nan_max(worst, rel(d.value, e));
        }
    }
    Ok(worst)
}

fn func_eq(cx: &mut Ctx) -> Result<f64> {
    let al = cx.l.a();
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let v = cx.smp.generic_tuple(2);
        let (z, w) = (cx.pt(v[0]), if k == 0 { cx.s.zero() } else { cx.pt(v[1]) });
        let pwz = cx.l.pairing(w.raw, z.raw);
        for a in 0..=4 {
            for b in 1..=5 {
                let lhs = cx.s.e(a, b, &z, &w)? * factorial(b - 1);
                let rhs = cx.s.e(b - 1, a + 1, &w, &z)? * pwz * (al.powi(a as i32 - b as i32 + 1) * factorial(a));
                worst = nan_max(worst, rel(rhs, lhs));
            }
        }
    }
    Ok(worst)
}

fn deriv_e(cx: &mut Ctx) -> Result<f64> {
    let al = cx.l.a();
    let s = cx.s;
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let z = cx.smp.generic_with(FD_EXCLUSION);
        let w = if k == 0 { c(0.0, 0.0) } else { cx.smp.generic_with(FD_EXCLUSION) };
        for a in 0..=3 {
            for b in 1..=3 {
                let dz = wirtinger(|x| s.ec(a, b, x, w), z, H)?;
                worst = nan_max(worst, fd_rel(dz.0, s.ec(a, b + 1, z, w)? * -(b as f64), dz));
                if k > 0 {
                    let dw = wirtinger(|x| s.ec(a, b, z, x), w, H)?;
                    let rhs = (s.ec(a, b, z, w)? * z.conj() - s.ec(a + 1, b, z, w)?) / al;
                    worst = nan_max(worst, fd_rel(dw.0, rhs, dw));
                }
            }
        }
    }
    Ok(worst)
}

fn deriv_g(cx: &mut Ctx) -> Result<f64> {
    let al = cx.l.a();
    let s = cx.s;
    let zero = c(0.0, 0.0);
    let mut worst: f64 = 0.0;
    let mut upd = |x: f64| worst = nan_max(worst, x);
    // k = 0: w on the lattice (z-derivatives); k = 1: z on the lattice (w-derivatives)
    for k in 0..4 {
        let z = if k == 1 { zero } else { cx.smp.generic_with(FD_EXCLUSION) };
        let w = if k == 0 { zero } else { cx.smp.generic_with(FD_EXCLUSION) };
        let dw_ = if s.pt(w).on_lattice() { 1.0 } else { 0.0 };
        let dz_ = if s.pt(z).on_lattice() { 1.0 } else { 0.0 };
        let g = |a: usize, b: usize, x: C64, y: C64| s.gc(a, b, x, y);
        for a in 0..=3usize {
            for b in 0..=3usize {
                let d0 = if a + b == 0 { 1.0 } else { 0.0 };
                if k != 1 {
                    let gz = wirtinger(|x| g(a, b, x, w), z, H)?;
                    let (dz, dzb) = gz;
                    upd(fd_rel(dz, g(a, b + 1, z, w)?, gz));
                    let mut rhs = c(d0 * dw_, 0.0);
                    if a > 0 {
                        rhs -= g(a - 1, b, z, w)? * a as f64;
                    }
                    upd(fd_rel(dzb * al, rhs, (gz.0 * al, gz.1 * al)));
                    // f-level derivatives
                    let (m, n) = (a, b);
                    let f = |m: usize, n: usize, x: C64, y: C64| s.f(m, n, &s.pt(x), &s.pt(y));
                    let fd = wirtinger(|x| f(m, n, x, w), z, H)?;
                    let (fz, fzb) = fd;
                    upd(fd_rel(fz, -f(m + 1, n, z, w)? - f(m, n + 1, z, w)? * n as f64, fd));
                    if n >= 1 {
                        let mut r = -f(m, n - 1, z, w)?;
                        if m > 0 {
                            r += f(m - 1, n, z, w)? * m as f64;
                        }
                        upd(fd_rel(fzb * al, r, (fd.0 * al, fd.1 * al)));
                    }
                }
                if k != 0 {
                    let gw = wirtinger(|y| g(a, b, z, y), w, H)?;
                    let (dw, dwb) = gw;
                    let gv = g(a, b, z, w)?;
                    upd(fd_rel(dw, -g(a + 1, b, z, w)? - gv * z.conj() / al, gw));
                    let mut rhs = gv * z - cx.l.pairing(z, w) * (d0 * dz_);
                    if b > 0 {
                        rhs += g(a, b - 1, z, w)? * b as f64;
                    }
                    upd(fd_rel(dwb * al, rhs, (gw.0 * al, gw.1 * al)));
                    let (m, n) = (a, b);
                    let f = |m: usize, n: usize, x: C64, y: C64| s.f(m, n, &s.pt(x), &s.pt(y));
                    if z != zero {
                        let fd = wirtinger(|y| f(m, n, z, y), w, H)?;
                        let (fw, fwb) = fd;
                        let fv = f(m, n, z, w)?;
                        upd(fd_rel(fw, f(m + 1, n, z, w)? - fv * z.conj() / al, fd));
                        if n >= 1 {
                            // the factor on `z·f` is 1: differentiate the character ⟨w, λ⟩ and
                            // write λ = (λ + z) − z
                            upd(fd_rel(fwb * al, -f(m, n - 1, z, w)? + fv * z, (fd.0 * al, fd.1 * al)));
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Richardson table on values at `t_0 / 2^k`, eliminating `t, t², …`.
fn richardson(vals: &[C64]) -> C64 {
    let mut row = vals.to_vec();
    for k in 1..vals.len() {
        let p = 2f64.powi(k as i32);
        row = (0..row.len() - 1).map(|i| (row[i + 1] * p - row[i]) / (p - 1.0)).collect();
    }
    row[0]
}

fn limits(cx: &mut Ctx) -> Result<f64> {
    let al = cx.l.a();
    let z1 = c(0.3, 0.4);
    let ts: Vec<f64> = (0..5).map(|k| 0.1 / 2f64.powi(k)).collect();
    let w = cx.smp.generic_with(FD_EXCLUSION);
    let (wp, o) = (cx.pt(w), cx.s.zero());
    let mut worst: f64 = 0.0;
    for a in 0..=2usize {
        for b in 0..=2usize {
            let mut gv = Vec::new();
            for t in &ts {
                let z = z1 * *t;
                let sing =
                    z.conj().powu(a as u32) / z.powu(b as u32 + 1) * (sign(a + b) * factorial(b) / al.powi(a as i32));
                gv.push(cx.s.g(a, b, &cx.pt(z), &wp)? + sing);
            }
            worst = nan_max(worst, (richardson(&gv) - cx.s.g(a, b, &o, &wp)?).norm());
            if b >= 1 {
                let mut ev = Vec::new();
                for t in &ts {
                    let z = z1 * *t;
                    ev.push(cx.s.e(a, b, &cx.pt(z), &wp)? - z.conj().powu(a as u32) / z.powu(b as u32));
                }
                worst = nan_max(worst, (richardson(&ev) - cx.s.e(a, b, &o, &wp)?).norm());
            }
        }
    }
    Ok(worst)
}

fn quasi(cx: &mut Ctx) -> Result<f64> {
    let lams = [(1, 0), (0, 1), (2, -1), (-1, 3)];
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let v = cx.smp.generic_tuple(2);
        let z = if k == 0 { c(0.0, 0.0) } else { v[0] };
        let w = v[1];
        for (m, n) in lams {
            let lam = cx.l.point(m, n);
            let p = cx.l.pairing(lam, w);
            for a in 0..=3 {
                for b in 0..=3 {
                    let g0 = cx.s.gc(a, b, z, w)?;
                    worst = nan_max(worst, rel(cx.s.gc(a, b, z, w + lam)?, g0));
                    worst = nan_max(worst, rel(cx.s.gc(a, b, z + lam, w)?, g0 * p));
                    let pm = cx.s.gc(a, b, -z, -w)?;
                    worst = nan_max(worst, rel(pm, g0 * sign(a + b + 1)));
                    if b >= 1 {
                        let e0 = cx.s.ec(a, b, z, w)?;
                        worst = nan_max(worst, rel(cx.s.ec(a, b, z, w + lam)?, e0));
                        worst = nan_max(worst, rel(cx.s.ec(a, b, z + lam, w)?, e0 / p));
                        worst = nan_max(worst, rel(cx.s.ec(a, b, -z, -w)?, e0 * sign(a + b)));
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn zeta_id(cx: &mut Ctx) -> Result<f64> {
    let o = cx.s.zero();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let z = cx.smp.generic();
        let zp = cx.pt(z);
        let zz = z_fn(z, &cx.l, 1e-15)?;
        let g = cx.s.g(0, 0, &zp, &o)?;
        let gt = cx.s.g_tilde(0, 0, &zp, &o)?;
        let d = cx.s.f(0, 1, &o, &zp)? - cx.s.f(0, 1, &zp, &o)?;
        let e = cx.s.e(0, 1, &zp, &o)?;
        for r in [rel(g, -zz), rel(gt, g), rel(d, -zz), rel(e, zz)] {
            worst = nan_max(worst, r);
        }
    }
    Ok(worst)
}

fn kron_id(cx: &mut Ctx, tau: Tau) -> Result<f64> {
    let (lo, hi) = KRONECKER_STRIP;
    let t = tau.value();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let z = cx.smp.strip_point(t, lo + 0.01, hi - 0.01);
        let u = cx.smp.strip_point(t, lo + 0.01, hi - 0.01);
        // g̃*_{0,0}(z, w) = -2πi F(z, -w) with w = -u
        let gt = cx.s.g_tilde(0, 0, &cx.pt(z), &cx.pt(-u))?;
        let k = c(0.0, -2.0 * PI) * kronecker_f(z, u, tau, 1e-14)?;
        worst = nan_max(worst, rel(gt, k));
    }
    Ok(worst)
}

fn e_f_link(cx: &mut Ctx, tau: Tau) -> Result<f64> {
    let (lo, hi) = KRONECKER_STRIP;
    let t = tau.value();
    let al = cx.l.a();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let z = cx.smp.strip_point(t, lo + 0.01, hi - 0.01);
        let w = cx.smp.strip_point(t, lo + 0.01, hi - 0.01);
        let e = cx.s.ec(0, 1, z, w)?;
        let f = c(0.0, 2.0 * PI) * (z * (w - w.conj()) / al).exp() * kronecker_f(z, w, tau, 1e-14)?;
        worst = nan_max(worst, rel(e, f));
    }
    Ok(worst)
}

/// Sub-identities carry their own tolerances; each residual is rescaled to
/// the headline threshold `thr`.
fn classical_x(cx: &mut Ctx, thr: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut add = |r: f64, own: f64| worst = nan_max(worst, r * thr / own);
    let o = cx.s.zero();
    let mut consts = Vec::new();
    for _ in 0..3 {
        let z = cx.smp.generic();
        let zp = cx.pt(z);
        let wpd = weier_p(z, &cx.l, 1, 1e-15)?;
        add(rel(cx.s.g(0, 2, &zp, &o)?, wpd), 1e-8);
        consts.push(cx.s.g(0, 1, &zp, &o)? - weier_p(z, &cx.l, 0, 1e-15)?);
        // ℘′² = 4℘³ − g₂℘ − g₃
        let p = weier_p(z, &cx.l, 0, 1e-15)?;
        let g2 = eisenstein(&cx.l, 4, 1e-15)? * 60.0;
        let g3 = eisenstein(&cx.l, 6, 1e-15)? * 140.0;
        let lhs = wpd * wpd;
        add((lhs - (p * p * p * 4.0 - g2 * p - g3)).norm() / lhs.norm().max(1.0), 1e-7);
    }
    for x in &consts[1..] {
        add(rel(*x, consts[0]), 1e-8);
    }
    let sq = Lattice::from_tau(c(0.0, 1.0))?;
    add(eisenstein(&sq, 6, 1e-15)?.norm(), 1e-10);
    let hex = Lattice::from_tau(C64::from_polar(1.0, 2.0 * PI / 3.0))?;
    add(eisenstein(&hex, 4, 1e-15)?.norm(), 1e-10);
    let e = period_eta(&cx.l);
    let leg = e.eta1 * cx.l.omega2() - e.eta2 * cx.l.omega1() - c(0.0, 2.0 * PI);
    add(leg.norm(), 1e-10);
    Ok(worst)
}

// ---- quadratic identities ----

fn quad(cx: &mut Ctx) -> Result<f64> {
    let v = cx.smp.generic_tuple(4);
    let l = cx.l;
    let s = cx.s;
    let mut worst: f64 = 0.0;
    for mask in 0..16u32 {
        let pick = |k: usize| if mask & (1 << k) != 0 { s.pt(v[k]) } else { s.zero() };
        let (z, zp, w, wp) = (pick(0), pick(1), pick(2), pick(3));
        let zzp = z.add(&zp, &l);
        let wwp = w.add(&wp, &l);
        let gg = |a: usize, b: usize, x: &StratifiedPoint, y: &StratifiedPoint| s.g(a, b, x, y);
        for a in 0..4usize {
            for b in 0..4usize {
                // residual relative to the largest product entering the sum
                let mut scale: f64 = 1.0;
                let mut lhs = c(0.0, 0.0);
                let mut acc = |t: C64| {
                    scale = scale.max(t.norm());
                    lhs += t;
                };
                for a1 in 0..=a {
                    acc(gg(a - a1, 0, &z, &w)? * gg(a1, b, &zp, &wwp)? * binom(a, a1));
                }
                for b1 in 0..=b {
                    acc(-gg(0, b1, &zp, &wp)? * gg(a, b - b1, &zzp, &w)? * binom(b, b1));
                }
                acc(gg(0, 0, &z.neg(), &wp)? * gg(a, b, &zzp, &wwp)?);
                let (a1f, b1f) = ((a + 1) as f64, (b + 1) as f64);
                let mut rhs = c(0.0, 0.0);
                if b == 0 && wwp.on_lattice() {
                    rhs += gg(a + 1, 0, &z, &w)? / a1f;
                }
                if a == 0 && zzp.on_lattice() {
                    rhs -= l.pairing(zzp.raw, w.raw) * gg(0, b + 1, &zp, &wp)? / b1f;
                }
                if w.on_lattice() {
                    rhs += gg(a + 1, b, &zp, &wp)? / a1f;
                }
                if z.on_lattice() {
                    rhs -= l.pairing(z.raw, w.raw) * gg(a, b + 1, &zp, &wwp)?;
                }
                if wp.on_lattice() {
                    rhs += gg(a + 1, b, &zzp, &w)?;
                }
                if zp.on_lattice() {
                    rhs -= l.pairing(zp.raw, wwp.raw) * gg(a, b + 1, &z, &w)? / b1f;
                }
                worst = nan_max(worst, (lhs - rhs).norm() / scale.max(rhs.norm()));
            }
        }
    }
    Ok(worst)
}

fn aybe(cx: &mut Ctx) -> Result<f64> {
    let (s, l) = (cx.s, cx.l);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let v = cx.smp.generic_tuple(4);
        let (z, zp, w, wp) = (s.pt(v[0]), s.pt(v[1]), s.pt(v[2]), s.pt(v[3]));
        let (zzp, wwp) = (z.add(&zp, &l), w.add(&wp, &l));
        let terms = [
            s.g(0, 0, &z, &w)? * s.g(0, 0, &zp, &wwp)?,
            -s.g(0, 0, &zp, &wp)? * s.g(0, 0, &zzp, &w)?,
            s.g(0, 0, &z.neg(), &wp)? * s.g(0, 0, &zzp, &wwp)?,
        ];
        let scale = terms.iter().map(|t| t.norm()).fold(1.0, f64::max);
        let sum: C64 = terms.iter().sum();
        worst = nan_max(worst, sum.norm() / scale);
    }
    Ok(worst)
}

fn expansion(cx: &mut Ctx) -> Result<f64> {
    const N: usize = 64;
    const R: f64 = 0.1;
    let (s, al) = (cx.s, cx.l.a());
    let z0 = cx.smp.generic_with(FD_EXCLUSION);
    let w0 = cx.smp.generic_with(FD_EXCLUSION);
    let nodes: Vec<C64> = (0..N).map(|k| C64::from_polar(R, 2.0 * PI * k as f64 / N as f64)).collect();
    // G(z, w) = exp(((z+z0) w̄ - w z̄0)/A) g*_{0,0}(z0 + z, -w0 - w)
    let mut grid = vec![c(0.0, 0.0); N * N];
    for (k, z) in nodes.iter().enumerate() {
        for (m, w) in nodes.iter().enumerate() {
            let pre = (((z + z0) * w.conj() - w * z0.conj()) / al).exp();
            grid[k * N + m] = pre * s.gc(0, 0, z0 + z, -w0 - w)?;
        }
    }
    let (zp, wn) = (s.pt(z0), s.pt(-w0));
    let mut worst: f64 = 0.0;
    for a in 0..=4usize {
        for b in 0..=4 - a {
            // coefficient of z^b w^a
            let mut acc = c(0.0, 0.0);
            for (k, z) in nodes.iter().enumerate() {
                for (m, w) in nodes.iter().enumerate() {
                    acc += grid[k * N + m] / (z.powu(b as u32) * w.powu(a as u32));
                }
            }
            let coef = acc / (N * N) as f64;
            let want = s.g(a, b, &zp, &wn)? / (factorial(a) * factorial(b));
            worst = nan_max(worst, rel(coef, want));
        }
    }
    Ok(worst)
}

// ---- A∞ ----

fn config(cx: &mut Ctx, env: &Env) -> Result<AinfConfig> {
    let v = cx.smp.generic_tuple(env.r + env.s);
    let cfg = AinfConfig::new(env.tau, v[..env.r].to_vec(), v[env.r..].to_vec(), SeriesParams::default())?;
    Ok(if env.corrupt_m4 { cfg.with_corrupted_sign() } else { cfg })
}

fn random_string(smp: &mut Sampler, b: &[BasisElement], n: usize) -> Vec<BasisElement> {
    let mut st = vec![b[smp.below(b.len())]];
    while st.len() < n {
        let t = st.last().expect("nonempty").target();
        let next: Vec<BasisElement> = b.iter().copied().filter(|x| x.source() == t).collect();
        st.push(next[smp.below(next.len())]);
    }
    st
}

fn stasheff(cx: &mut Ctx, env: &Env) -> Result<f64> {
    let cfg = config(cx, env)?;
    let b = basis(env.r, env.s);
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        for st in composable_strings(&b, n) {
            worst = nan_max(worst, stasheff_residual(&cfg, &st, 8)?);
        }
    }
    for k in 0..500 {
        let st = random_string(&mut cx.smp, &b, 6 + k % 3);
        worst = nan_max(worst, stasheff_residual(&cfg, &st, 8)?);
    }
    Ok(worst)
}

fn maurer_cartan(cx: &mut Ctx, env: &Env) -> Result<f64> {
    let cfg = Arc::new(config(cx, env)?);
    let b = basis(env.r, env.s);
    let ms: Vec<Cochain> = (0..=7).map(|k| Cochain::product(cfg.clone(), k)).collect();
    let mut strings = Vec::new();
    for n in 3..=4 {
        strings.extend(composable_strings(&b, n));
    }
    for k in 0..100 {
        strings.push(random_string(&mut cx.smp, &b, 5 + k % 2));
    }
    let mut worst: f64 = 0.0;
    for st in &strings {
        let n = st.len();
        let mut acc = crate::ainfinity::Combination::zero();
        let mut scale: f64 = 1.0;
        for k in 2..n {
            let l = n + 1 - k;
            let term = gerstenhaber(&ms[k], &ms[l]).eval(st);
            scale = scale.max(term.max_norm());
            acc.add_scaled(&term, c(1.0, 0.0));
        }
        worst = nan_max(worst, acc.max_norm() / scale);
    }
    Ok(worst)
}

fn cyclic(cx: &mut Ctx, env: &Env) -> Result<f64> {
    let cfg = config(cx, env)?;
    let b = basis(env.r, env.s);
    let mut worst: f64 = 0.0;
    for n in 3..=7 {
        for st in composable_strings(&b, n) {
            if let Some(r) = cyclic_residual(&cfg, &st) {
                worst = nan_max(worst, r);
            }
        }
    }
    Ok(worst)
}

fn unital(cx: &mut Ctx, env: &Env) -> Result<f64> {
    let cfg = config(cx, env)?;
    let b = basis(env.r, env.s);
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        for st in composable_strings(&b, n) {
            if let Some(r) = unital_residual(&cfg, &st) {
                worst = nan_max(worst, r);
            }
        }
    }
    Ok(worst)
}

fn perturb_oracle(cx: &mut Ctx, env: &Env) -> Result<f64> {
    let cfg = config(cx, env)?;
    let mut worst: f64 = 0.0;
    for code in 0..256usize {
        let abcd = [code & 3, (code >> 2) & 3, (code >> 4) & 3, (code >> 6) & 3];
        for i in 0..env.r {
            for j in 0..env.s {
                for ip in 0..env.r {
                    for jp in 0..env.s {
                        let st = TypeI { abcd, i, j, ip, jp }.string();
                        let m = mu(&cfg, &st)?;
                        let o = perturbation_oracle(&cfg, &st)?;
                        worst = nan_max(worst, m.sub(&o).max_norm() / m.max_norm().max(1.0));
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn variation(cx: &mut Ctx, env: &Env) -> Result<f64> {
    let cfg = config(cx, env)?;
    let mut params = Vec::new();
    for j in 0..env.s {
        params.extend([Param::Z(j), Param::ZBar(j)]);
    }
    for i in 0..env.r {
        params.extend([Param::W(i), Param::WBar(i)]);
    }
    let mut worst: f64 = 0.0;
    for t in type_i_strings(env.r, env.s, 3) {
        let st = t.string();
        for p in &params {
            for r in variation_residuals(&cfg, *p, &st, H)? {
                worst = nan_max(worst, r);
            }
        }
    }
    Ok(worst)
}

// ---- symbolic ----

type Table = Vec<((usize, usize), MPoly, MPoly)>;

/// `P_{a,b}` and the one-variable forms for `a + b ≤ 6`, computed once.
fn corb_table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let mut r = Reducer::new();
        let mut out = Vec::new();
        for a in 0..=6 {
            for b in 0..=6 - a {
                let p = r.gab(a, b);
                let q = r.one_var(Var::Z, a, b);
                out.push(((a, b), p, q));
            }
        }
        out
    })
}

fn corb(cx: &mut Ctx) -> Result<f64> {
    let s = cx.s;
    let table = corb_table();
    let gens: BTreeSet<_> =
        table.iter().flat_map(|(_, p, q)| p.generators().into_iter().chain(q.generators())).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let v = cx.smp.generic_tuple(2);
        let (z, w) = (v[0], v[1]);
        let env = numeric_env(&s, z, w, &gens)?;
        for ((a, b), p, q) in table {
            let want = s.g(*a, *b, &s.pt(z), &s.pt(w))?;
            worst = nan_max(worst, rel(p.eval(&env)?, want));
            let want = s.g(*a, *b, &s.pt(z), &s.zero())?;
            worst = nan_max(worst, rel(q.eval(&env)?, want));
        }
    }
    Ok(worst)
}

fn constants(cx: &mut Ctx, thr: f64) -> Result<f64> {
    let (s, l) = (cx.s, cx.l);
    let o = s.zero();
    let mut worst: f64 = 0.0;
    let mut add = |r: f64, own: f64| worst = nan_max(worst, r * thr / own);
    let e2 = eisenstein2_star(&l, 1e-15);
    add(rel(s.g(0, 1, &o, &o)?, e2), 1e-8);
    add(rel(eisenstein2_star_swapped(&l, 1e-15), e2), 1e-8);
    // leaves C(0, 2k-1) = (2k-1)! e_{2k}; even leaves vanish
    let used: BTreeSet<(u32, u32)> = corb_table()
        .iter()
        .flat_map(|(_, p, q)| p.generators().into_iter().chain(q.generators()))
        .filter_map(|g| match g {
            crate::symrec::Generator::C(m, n) => Some((m, n)),
            _ => None,
        })
        .collect();
    for (m, n) in used {
        let v = s.g(m as usize, n as usize, &o, &o)?;
        if !v.is_finite() {
            add(f64::INFINITY, 1.0);
        }
        if m == 0 && n >= 3 {
            let e = eisenstein(&l, n as usize + 1, 1e-15)? * factorial(n as usize);
            add(rel(v, e), 1e-8);
        }
    }
    for m in 0..=6usize {
        for n in 0..=6 - m {
            if (m + n) % 2 == 0 {
                add(s.g(m, n, &o, &o)?.norm(), 1e-8);
            }
        }
    }
    // the square lattice: e*₂ real, the raw ordered sums differ
    let sq = Lattice::from_tau(c(0.0, 1.0))?;
    add(eisenstein2_star(&sq, 1e-15).im.abs(), 1e-9);
    let gap = (eisenstein2_ordered(&sq, false, 1e-15) - eisenstein2_ordered(&sq, true, 1e-15)).norm();
    add(if gap > 1e-6 { 0.0 } else { f64::INFINITY }, 1.0);
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_kills_polynomial_error() {
        let f = |t: f64| c(1.0 + 2.0 * t - 3.0 * t * t + t * t * t, 0.0);
        let v: Vec<C64> = (0..4).map(|k| f(0.1 / 2f64.powi(k))).collect();
        assert!((richardson(&v) - c(1.0, 0.0)).norm() < 1e-13);
    }
}
