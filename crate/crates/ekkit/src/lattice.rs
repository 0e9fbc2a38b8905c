//! Lattices in the complex plane, the unimodular pairing, and point strata.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{EkError, Result};

pub type C64 = Complex64;

/// Default snap tolerance (in units of the longer generator).
pub const DEFAULT_SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    omega1: C64,
    omega2: C64,
    area: f64,
    a: f64,
}

impl Lattice {
    /// Build a lattice, swapping the generators if needed so that
    /// `Im(omega2 / omega1) > 0`.
    pub fn new(omega1: C64, omega2: C64) -> Result<Self> {
        if omega1.norm() == 0.0 || omega2.norm() == 0.0 {
            return Err(EkError::Degenerate("zero generator".into()));
        }
        let t = omega2 / omega1;
        if !t.im.is_finite() || t.im.abs() <= 1e-14 * t.norm().max(1.0) {
            return Err(EkError::Degenerate("collinear generators".into()));
        }
        let (o1, o2) = if t.im < 0.0 { (omega2, omega1) } else { (omega1, omega2) };
        let area = (o1.conj() * o2).im.abs();
        Ok(Self { omega1: o1, omega2: o2, area, a: area / PI })
    }

    /// The normalized lattice `Z + Z tau`.
    pub fn from_tau(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(EkError::Domain("tau must lie in the upper half-plane".into()));
        }
        Self::new(C64::new(1.0, 0.0), tau)
    }

    pub fn omega1(&self) -> C64 {
        self.omega1
    }
    pub fn omega2(&self) -> C64 {
        self.omega2
    }
    pub fn area(&self) -> f64 {
        self.area
    }
    /// `A = area / pi`.
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn tau(&self) -> C64 {
        self.omega2 / self.omega1
    }

    pub fn point(&self, m: i64, n: i64) -> C64 {
        self.omega1 * m as f64 + self.omega2 * n as f64
    }

    /// Real coordinates `(x1, x2)` with `z = x1*omega1 + x2*omega2`.
    pub fn coords(&self, z: C64) -> (f64, f64) {
        let d = (self.omega1.conj() * self.omega2).im;
        let x2 = (self.omega1.conj() * z).im / d;
        let x1 = (z.conj() * self.omega2).im / d;
        (x1, x2)
    }

    /// `exp((z w̄ - w z̄)/A)`, a unit-modulus character.
    pub fn pairing(&self, z: C64, w: C64) -> C64 {
        // z w̄ - w z̄ = 2i Im(z w̄)
        let e = 2.0 * (z * w.conj()).im / self.a;
        C64::from_polar(1.0, e)
    }

    /// Reduce to the centered fundamental cell: coordinates in `[-1/2, 1/2)`.
    pub fn reduce(&self, z: C64) -> (C64, LatticePoint) {
        let (x1, x2) = self.coords(z);
        let m = (x1 + 0.5).floor() as i64;
        let n = (x2 + 0.5).floor() as i64;
        let lp = LatticePoint { m, n };
        (z - self.point(m, n), lp)
    }

    /// Nearest lattice point (Voronoi reduction); returns `(z - λ, λ)`.
    pub fn reduce_nearest(&self, z: C64) -> (C64, LatticePoint) {
        let (r, lp) = self.reduce(z);
        let mut best = (r, lp);
        for dm in -1..=1 {
            for dn in -1..=1 {
                let cand = r - self.point(dm, dn);
                if cand.norm() < best.0.norm() {
                    best = (cand, LatticePoint { m: lp.m + dm, n: lp.n + dn });
                }
            }
        }
        best
    }

    pub fn classify(&self, z: C64, snap_eps: f64) -> StratifiedPoint {
        let (r, shift) = self.reduce(z);
        let scale = self.omega1.norm().max(self.omega2.norm());
        if r.norm() < snap_eps * scale {
            StratifiedPoint { raw: z, stratum: Stratum::OnLattice, reduced: C64::new(0.0, 0.0), shift }
        } else {
            StratifiedPoint { raw: z, stratum: Stratum::Generic, reduced: r, shift }
        }
    }

    /// Classify with the default snap tolerance.
    pub fn strat(&self, z: C64) -> StratifiedPoint {
        self.classify(z, DEFAULT_SNAP)
    }

    /// The exact lattice point `λ`, flagged on-lattice.
    pub fn lattice_point(&self, m: i64, n: i64) -> StratifiedPoint {
        StratifiedPoint {
            raw: self.point(m, n),
            stratum: Stratum::OnLattice,
            reduced: C64::new(0.0, 0.0),
            shift: LatticePoint { m, n },
        }
    }

    /// Length of a shortest nonzero lattice vector.
    pub fn shortest(&self) -> f64 {
        let mut best = f64::INFINITY;
        let k = 6;
        for m in -k..=k {
            for n in -k..=k {
                if m != 0 || n != 0 {
                    best = best.min(self.point(m, n).norm());
                }
            }
        }
        best
    }

    /// Integer coordinate box covering the disk `|λ + center| <= r`.
    fn box_bounds(&self, center: C64, r: f64) -> (i64, i64, i64, i64) {
        let (c1, c2) = self.coords(-center);
        let r1 = r * self.omega2.norm() / self.area;
        let r2 = r * self.omega1.norm() / self.area;
        ((c1 - r1).floor() as i64, (c1 + r1).ceil() as i64, (c2 - r2).floor() as i64, (c2 + r2).ceil() as i64)
    }

    /// All `λ` with `|λ + center| <= r`, each exactly once.
    pub fn points_near(&self, center: C64, r: f64) -> Vec<LatticePoint> {
        let (m0, m1, n0, n1) = self.box_bounds(center, r);
        let mut out = Vec::new();
        for m in m0..=m1 {
            for n in n0..=n1 {
                if (self.point(m, n) + center).norm() <= r {
                    out.push(LatticePoint { m, n });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub m: i64,
    pub n: i64,
}

impl LatticePoint {
    pub fn value(&self, l: &Lattice) -> C64 {
        l.point(self.m, self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stratum {
    OnLattice,
    Generic,
}

/// A point of C together with its stratum in `{0} ⊔ (C/Λ ∖ {0})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StratifiedPoint {
    pub raw: C64,
    pub stratum: Stratum,
    pub reduced: C64,
    pub shift: LatticePoint,
}

impl StratifiedPoint {
    pub fn on_lattice(&self) -> bool {
        self.stratum == Stratum::OnLattice
    }

    /// `δ_Λ`: 1 on the lattice stratum, 0 otherwise.
    pub fn delta(&self) -> f64 {
        if self.on_lattice() {
            1.0
        } else {
            0.0
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            raw: -self.raw,
            stratum: self.stratum,
            reduced: -self.reduced,
            shift: LatticePoint { m: -self.shift.m, n: -self.shift.n },
        }
    }

    /// Sum of two stratified points, reclassified exactly when both are on
    /// the lattice and by snapping otherwise.
    pub fn add(&self, other: &Self, l: &Lattice) -> Self {
        if self.on_lattice() && other.on_lattice() {
            let m = self.shift.m + other.shift.m;
            let n = self.shift.n + other.shift.n;
            let mut p = l.lattice_point(m, n);
            p.raw = self.raw + other.raw;
            p
        } else {
            l.strat(self.raw + other.raw)
        }
    }
}
