//! Second-order machinery behind the contraction bound.
//!
//! With `g` the entropy of a distribution `p` over `n` symbols and
//! `f(p) = g(p A)`, both are parametrized by the free coordinates
//! `p_1..p_{n-1}` (the last symbol absorbs the remainder). The ratio of
//! their Hessian quadratic forms bounds the mutual-information contraction,
//! and the quadratic-form identity
//!
//! ```text
//! Q_g(c) = Q_f(c) + Σ_{s<t} Q_st(c) Σ_j a_sj a_tj / (p A)_j
//! ```
//!
//! with `Q_f = -c'H_f c`, `Q_g = -c'H_g c`, is checked numerically by
//! [`appendix_identity_check`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{Channel, Distribution};

/// Smallest coordinate accepted for Hessian evaluation.
pub const INTERIOR_THRESHOLD: f64 = 1e-9;

const EIGEN_TOLERANCE: f64 = 1e-10;
const EIGEN_MAX_ITERATIONS: usize = 10_000;
/// Largest accepted ratio between the extreme Cholesky pivots of `-H_g`.
const MAX_PIVOT_RATIO: f64 = 1e7;

fn check_interior(p: &Distribution) -> Result<()> {
    if p.alphabet_size() < 2 {
        return Err(Error::TooFewInputs(p.alphabet_size()));
    }
    let min = p.probs().iter().copied().fold(f64::INFINITY, f64::min);
    if min < INTERIOR_THRESHOLD {
        return Err(Error::BoundaryPoint {
            min,
            threshold: INTERIOR_THRESHOLD,
        });
    }
    Ok(())
}

fn check_dims(c: &Channel, p: &Distribution) -> Result<()> {
    if c.n_inputs() != p.alphabet_size() {
        return Err(Error::DimensionMismatch {
            what: "channel inputs vs distribution size",
            left: c.n_inputs(),
            right: p.alphabet_size(),
        });
    }
    Ok(())
}

/// Hessian of the entropy in the free coordinates; negative definite.
///
/// Diagonal `-(p_i + p_n)/(p_i p_n)`, off-diagonal `-1/p_n`.
pub fn hessian_g(p: &Distribution) -> Result<DMatrix<f64>> {
    check_interior(p)?;
    let probs = p.probs();
    let k = probs.len() - 1;
    let last = probs[k];
    Ok(DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            -(probs[i] + last) / (probs[i] * last)
        } else {
            -1.0 / last
        }
    }))
}

/// Hessian of `f(p) = g(p A)` in the free coordinates.
///
/// Entry `(k, l)` is `-Σ_j (a_kj - a_nj)(a_lj - a_nj) / (p A)_j`; output
/// columns with `(p A)_j = 0` are all-zero and skipped.
pub fn hessian_f(c: &Channel, p: &Distribution) -> Result<DMatrix<f64>> {
    check_dims(c, p)?;
    check_interior(p)?;
    let n = c.n_inputs();
    let k = n - 1;
    let out = p.push_forward(c)?;
    let last = c.row(k);
    let mut h = DMatrix::zeros(k, k);
    for (j, &denom) in out.probs().iter().enumerate() {
        let diffs: Vec<f64> = (0..k).map(|i| c.entry(i, j) - last[j]).collect();
        if denom <= 0.0 {
            if diffs.iter().any(|&d| d != 0.0) {
                return Err(Error::ZeroDenominator { column: j });
            }
            continue;
        }
        for a in 0..k {
            for b in 0..k {
                h[(a, b)] -= diffs[a] * diffs[b] / denom;
            }
        }
    }
    Ok(h)
}

/// `sup_c (c'H_f c)/(c'H_g c)` at a fixed interior `p`: the largest
/// generalized eigenvalue of the definite pencil `(-H_f, -H_g)`.
///
/// `-H_g = L L'` is factored and the problem reduced to the symmetric
/// eigenproblem for `L⁻¹ (-H_f) L⁻ᵀ`.
pub fn rayleigh_sup(c: &Channel, p: &Distribution) -> Result<f64> {
    let hf = hessian_f(c, p)?;
    let hg = hessian_g(p)?;
    let neg_g = -hg;
    let neg_f = -hf;
    let chol = neg_g
        .cholesky()
        .ok_or_else(|| Error::IllConditioned("-H_g is not positive definite".into()))?;
    let l = chol.l();
    let diag = l.diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| {
        (lo.min(d), hi.max(d))
    });
    if lo.is_nan() || lo <= 0.0 || hi / lo > MAX_PIVOT_RATIO {
        return Err(Error::IllConditioned(format!(
            "Cholesky pivot ratio {} exceeds {MAX_PIVOT_RATIO}",
            hi / lo
        )));
    }
    // M = L^{-1} (-H_f) L^{-T}
    let left = l
        .solve_lower_triangular(&neg_f)
        .ok_or_else(|| Error::IllConditioned("triangular solve failed".into()))?;
    let m = l
        .solve_lower_triangular(&left.transpose())
        .ok_or_else(|| Error::IllConditioned("triangular solve failed".into()))?;
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, EIGEN_TOLERANCE, EIGEN_MAX_ITERATIONS)
        .ok_or_else(|| Error::IllConditioned("eigenvalue iteration did not converge".into()))?;
    let top = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(top.clamp(0.0, 1.0))
}

/// Result of [`appendix_identity_check`].
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub q_f: f64,
    pub q_g: f64,
    /// `|Q_g - Q_f - Σ Q_st W_st| / Q_g`.
    pub identity_residual: f64,
    /// Smallest square form `Q_st` over all pairs.
    pub min_pair_form: f64,
    /// `|Q_g - Σ Q_st| / Q_g`: the identity specialized to equal rows.
    pub equal_rows_residual: f64,
    /// `|Q_f|` for the channel whose rows all equal the output marginal.
    pub equal_rows_q_f: f64,
}

/// Square forms `Q_st(c)` for every pair `s < t` over all `n` symbols,
/// row-major in `(s, t)`.
///
/// For `t < n-1` (both free coordinates):
/// `(sqrt(p_t/p_s) c_s - sqrt(p_s/p_t) c_t)²`. For `t = n-1`:
/// `[c_s (sqrt(p_s/p_n) + sqrt(p_n/p_s)) + Σ_{u≠s} sqrt(p_s/p_n) c_u]²`.
pub fn pair_square_forms(p: &Distribution, coeffs: &[f64]) -> Result<Vec<((usize, usize), f64)>> {
    check_interior(p)?;
    let probs = p.probs();
    let n = probs.len();
    if coeffs.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            what: "coefficient vector vs free coordinates",
            left: coeffs.len(),
            right: n - 1,
        });
    }
    let last = n - 1;
    let total: f64 = coeffs.iter().sum();
    let mut forms = Vec::with_capacity(n * (n - 1) / 2);
    for s in 0..n {
        for t in (s + 1)..n {
            let q = if t < last {
                let v = (probs[t] / probs[s]).sqrt() * coeffs[s]
                    - (probs[s] / probs[t]).sqrt() * coeffs[t];
                v * v
            } else {
                let r = (probs[s] / probs[last]).sqrt();
                let v = coeffs[s] * (r + 1.0 / r) + r * (total - coeffs[s]);
                v * v
            };
            forms.push(((s, t), q));
        }
    }
    Ok(forms)
}

/// `W_st = Σ_j a_sj a_tj / (p A)_j`, skipping empty output columns.
fn pair_weight(c: &Channel, out: &[f64], s: usize, t: usize) -> f64 {
    out.iter()
        .enumerate()
        .filter(|(_, &d)| d > 0.0)
        .map(|(j, &d)| c.entry(s, j) * c.entry(t, j) / d)
        .sum()
}

fn quadratic_form(h: &DMatrix<f64>, coeffs: &[f64]) -> f64 {
    let v = DVector::from_column_slice(coeffs);
    -(v.transpose() * h * &v)[(0, 0)]
}

/// Evaluates both sides of the quadratic-form decomposition at `(A, p, c)`.
///
/// `Q_f` and `Q_g` come from the Hessian matrices; the `Q_st` from their
/// closed square forms. Residuals are relative to `Q_g` (positive for
/// nonzero `c`).
pub fn appendix_identity_check(
    c: &Channel,
    p: &Distribution,
    coeffs: &[f64],
) -> Result<IdentityReport> {
    check_dims(c, p)?;
    let forms = pair_square_forms(p, coeffs)?;
    let q_f = quadratic_form(&hessian_f(c, p)?, coeffs);
    let q_g = quadratic_form(&hessian_g(p)?, coeffs);
    let out = p.push_forward(c)?;

    let weighted: f64 = forms
        .iter()
        .map(|&((s, t), q)| q * pair_weight(c, out.probs(), s, t))
        .sum();
    let plain: f64 = forms.iter().map(|(_, q)| q).sum();
    let min_pair_form = forms.iter().map(|(_, q)| *q).fold(f64::INFINITY, f64::min);

    let flat = Channel::constant(c.n_inputs(), &out);
    let equal_rows_q_f = quadratic_form(&hessian_f(&flat, p)?, coeffs).abs();

    let scale = if q_g > 0.0 { q_g } else { 1.0 };
    Ok(IdentityReport {
        q_f,
        q_g,
        identity_residual: (q_g - q_f - weighted).abs() / scale,
        min_pair_form,
        equal_rows_residual: (q_g - plain).abs() / scale,
        equal_rows_q_f,
    })
}
