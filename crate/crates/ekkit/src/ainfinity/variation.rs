//! Finite-difference checks of how the products vary with the parameters.

use std::sync::Arc;

use super::basis::{composable, BasisElement, Combination};
use super::cochain::{builtin_cochain, gerstenhaber, Builtin, Cochain, Convention};
use super::products::{mu, mu_unchecked, AinfConfig, Param};
use crate::error::{EkError, Result};
use crate::lattice::C64;

/// Which side gets the diagonal connection terms.
///
/// * `Raw`: `∂m_n` against the full bracket right-hand side, including
///   `A⁻¹[m_n, f₁(i)]` and `[m_n, f′₁(i)]` for the `w`-parameters.
/// * `Connection`: `∇m_n` (the derivative with the diagonal connection
///   terms moved to the left) against `[m_{n±1}, f]` alone.
/// * `Insertion`: like `Connection`, but for `z_j`, `w_i` the right-hand
///   side is the signed sum of `ξ̃` insertions into `m_{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Raw,
    Connection,
    Insertion,
}

fn parity(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^n Σ_{k=1}^{n+1} (-1)^{k-1+|x_1|+…+|x_{k-1}|} m_{n+1}(x_1, …, x_{k-1}, ξ, x_k, …, x_n)`.
pub fn insertion_form(cfg: &AinfConfig, xi: BasisElement, st: &[BasisElement]) -> Combination {
    let n = st.len();
    let mut acc = Combination::zero();
    let mut dsum = 0i64;
    for k in 1..=n + 1 {
        let mut s = Vec::with_capacity(n + 1);
        s.extend_from_slice(&st[..k - 1]);
        s.push(xi);
        s.extend_from_slice(&st[k - 1..]);
        if composable(&s) {
            let sg = parity(n as i64 + k as i64 - 1 + dsum);
            acc.add_scaled(&mu_unchecked(cfg, &s), C64::new(sg, 0.0));
        }
        if k <= n {
            dsum += st[k - 1].degree() as i64;
        }
    }
    acc
}

/// Wirtinger derivative of every coefficient of `mu(st)` in one parameter,
/// by central differences along the real and imaginary axes, together with
/// the derivative in the conjugate direction.
fn fd_derivative(cfg: &AinfConfig, param: Param, st: &[BasisElement], h: f64) -> Result<(Combination, Combination)> {
    let i = C64::new(0.0, 1.0);
    let at = |d: C64| -> Result<Combination> { mu(&cfg.perturbed(param, d)?, st) };
    let dx = at(C64::new(h, 0.0))?.sub(&at(C64::new(-h, 0.0))?);
    let dy = at(i * h)?.sub(&at(-i * h)?);
    let sy = match param {
        Param::Z(_) | Param::W(_) => -i,
        Param::ZBar(_) | Param::WBar(_) => i,
    };
    let k = C64::new(1.0 / (4.0 * h), 0.0);
    let mut d = dx.clone();
    d.add_scaled(&dy, sy);
    let mut other = dx;
    other.add_scaled(&dy, -sy);
    Ok((d.scale(k), other.scale(k)))
}

fn bracket_eval(f: &Cochain, g: &Cochain, st: &[BasisElement]) -> Combination {
    gerstenhaber(f, g).eval(st)
}

/// Max-norm residual of the variation equation for `param` on `st`,
/// relative to the largest coefficient on either side, the conjugate-direction
/// derivative, and 1.
pub fn variation_residual(cfg: &AinfConfig, param: Param, st: &[BasisElement], h: f64, form: Form) -> Result<f64> {
    let r = variation_residuals(cfg, param, st, h)?;
    Ok(match form {
        Form::Raw => r[0],
        Form::Connection => r[1],
        Form::Insertion => r[2],
    })
}

/// Residuals of all three forms `[Raw, Connection, Insertion]` from a single
/// finite-difference evaluation. The scale also includes the derivative in
/// the conjugate direction, which bounds the stencil's truncation error.
pub fn variation_residuals(cfg: &AinfConfig, param: Param, st: &[BasisElement], h: f64) -> Result<[f64; 3]> {
    if st.is_empty() || !composable(st) {
        return Err(EkError::NotComposable);
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(EkError::Domain(format!("step h = {h} must be positive")));
    }
    match param {
        Param::Z(j) | Param::ZBar(j) if j >= cfg.s() => {
            return Err(EkError::Domain(format!("z index {j} out of range")))
        }
        Param::W(i) | Param::WBar(i) if i >= cfg.r() => {
            return Err(EkError::Domain(format!("w index {i} out of range")))
        }
        _ => {}
    }
    let n = st.len();
    let a = cfg.a();
    let shared = Arc::new(cfg.clone());
    let m = |k: usize| Cochain::product(shared.clone(), k);
    let conv = Convention::Verified;
    let one = C64::new(1.0, 0.0);

    let (mut lhs, other) = fd_derivative(cfg, param, st, h)?;
    let mut floor = other.max_norm().max(1.0);
    if matches!(param, Param::ZBar(_) | Param::WBar(_)) {
        lhs = lhs.scale(C64::new(a, 0.0));
        floor *= a.max(1.0);
    }
    // diagonal part: A⁻¹[m_n, f₁(i)] resp. [m_n, f′₁(i)]
    let diag = match param {
        Param::W(i) => {
            bracket_eval(&m(n), &builtin_cochain(cfg, Builtin::F1(i), conv), st).scale(C64::new(1.0 / a, 0.0))
        }
        Param::WBar(i) => bracket_eval(&m(n), &builtin_cochain(cfg, Builtin::F1P(i), conv), st),
        _ => Combination::zero(),
    };
    let main = match param {
        Param::Z(j) => bracket_eval(&m(n + 1), &builtin_cochain(cfg, Builtin::F0Z(j), conv), st),
        Param::W(i) => bracket_eval(&m(n + 1), &builtin_cochain(cfg, Builtin::F0W(i), conv), st),
        Param::ZBar(j) if n >= 2 => bracket_eval(&m(n - 1), &builtin_cochain(cfg, Builtin::F2Z(j), conv), st),
        Param::WBar(i) if n >= 2 => bracket_eval(&m(n - 1), &builtin_cochain(cfg, Builtin::F2W(i), conv), st),
        _ => Combination::zero(),
    };
    let nabla = lhs.sub(&diag);
    let mut raw_rhs = main.clone();
    raw_rhs.add_scaled(&diag, one);
    let ins = match param {
        Param::Z(j) => insertion_form(cfg, BasisElement::XiL(j), st),
        Param::W(i) => insertion_form(cfg, BasisElement::XiP(i), st),
        _ => main.clone(),
    };
    let res = |l: &Combination, r: &Combination| {
        let scale = l.max_norm().max(r.max_norm()).max(floor);
        l.sub(r).max_norm() / scale
    };
    Ok([res(&lhs, &raw_rhs), res(&nabla, &main), res(&nabla, &ins)])
}
