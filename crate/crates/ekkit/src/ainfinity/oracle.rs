//! Independent route to the type-I structure constants through the
//! combinatorial double sum of Φ-terms.

use super::basis::{BasisElement, Combination};
use super::products::{AinfConfig, TypeI};
use crate::ekseries::{binom, factorial};
use crate::error::{EkError, Result};
use crate::lattice::C64;

fn sign(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `Φ_{z0,w0}(k, l, p) = A^{k+p+l+1}/(k! p!) · f̃*_{k+p,l+1}(z0, w0)` with
/// `(z0, w0)` the string's z/w differences, swapped when `swap` is set.
fn phi(cfg: &AinfConfig, t: &TypeI, swap: bool, k: usize, l: usize, p: usize) -> Result<C64> {
    let a = cfg.a();
    let f = cfg.f_tilde(swap, k + p, l + 1, t.j, t.jp, t.i, t.ip)?;
    Ok(f * (a.powi((k + p + l + 1) as i32) / (factorial(k) * factorial(p))))
}

/// Structure constant of a type-I string computed from the double
/// binomial sum, converted to the rescaled basis.
pub fn perturbation_oracle(cfg: &AinfConfig, st: &[BasisElement]) -> Result<Combination> {
    let t = TypeI::parse(st).ok_or_else(|| EkError::Shape("expected a type-I string".into()))?;
    let [a, b, c, d] = t.abcd;
    let n = t.len();
    let z = cfg.dz(t.j, t.jp);
    let w = cfg.dw(t.i, t.ip);
    let mut s1 = C64::new(0.0, 0.0);
    for a1 in 0..=a {
        for c1 in 0..=c {
            let coef = binom(a - a1 + b, a - a1) * binom(a1 + c1, a1) * binom(c - c1 + d, c - c1);
            s1 += phi(cfg, &t, true, a - a1 + b, a1 + c1, c - c1 + d)? * coef;
        }
    }
    let mut s2 = C64::new(0.0, 0.0);
    for b1 in 0..=b {
        for d1 in 0..=d {
            let coef = binom(c + d1, c) * binom(b - b1 + d - d1, b - b1) * binom(a + b1, a);
            s2 += phi(cfg, &t, false, c + d1, b - b1 + d - d1, a + b1)? * coef;
        }
    }
    let cn2 = binom(n, 2) as usize;
    let m = s1 * sign(cn2 + 1) + s2 * sign(cn2 + n + 1);
    let l = cfg.lattice();
    let rescale = l.a().powi(2 - n as i32) * (-(z.raw * C64::new(0.0, 2.0 * w.raw.im)) / l.a()).exp();
    Ok(Combination::single(BasisElement::Theta(t.i, t.jp), m * rescale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfinity::products::{mu, type_i_strings};
    use crate::classical::Tau;
    use crate::ekseries::SeriesParams;

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
    fn agrees_with_mu() {
        for tau in [C64::new(0.0, 1.0), C64::new(-0.25, 1.1)] {
            let c = cfg(tau);
            for t in type_i_strings(2, 2, 3) {
                let st = t.string();
                let m = mu(&c, &st).unwrap();
                let o = perturbation_oracle(&c, &st).unwrap();
                let scale = m.max_norm().max(1.0);
                assert!(m.sub(&o).max_norm() / scale < 1e-9, "{st:?}");
            }
        }
    }

    #[test]
    fn rejects_other_shapes() {
        let c = cfg(C64::new(0.0, 1.0));
        let st = [BasisElement::Eta(0, 0), BasisElement::Theta(0, 1), BasisElement::Eta(1, 1)];
        assert!(matches!(perturbation_oracle(&c, &st), Err(EkError::Shape(_))));
    }
}
