use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact_arith::{ExactMatrix, Scalar};
use crate::g_modules::WeightModule;
use crate::lie_core::{E, F};

use super::{GeneralizedVermaModule, GradedVector, VKey};

/// Which argument gets reduced to degree zero first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormOrder {
    /// Peel modes off the left argument.
    Left,
    /// Peel modes off the right argument.
    Right,
}

fn check_dual_pair(dual: &GeneralizedVermaModule, module: &GeneralizedVermaModule) -> Result<()> {
    if dual.level() != module.level() {
        return Err(Error::Domain("paired modules must share the level".into()));
    }
    if dual.base().kind() != module.base().dual()?.kind() {
        return Err(Error::Domain(format!(
            "{} is not the dual of {}",
            dual.base().describe(),
            module.base().describe()
        )));
    }
    Ok(())
}

/// `<x, y>` between `V(ℓ,U*)` and `V(ℓ,U)`, extending the pairing of `U*`
/// with `U` by `<a(n) x, y> = −<x, a(−n) y>`.
pub fn invariant_pairing(
    dual: &GeneralizedVermaModule,
    module: &GeneralizedVermaModule,
    x: &GradedVector,
    y: &GradedVector,
    order: FormOrder,
) -> Result<Scalar> {
    check_dual_pair(dual, module)?;
    match order {
        FormOrder::Left => {
            let mut total = Scalar::zero();
            for (key, c) in x {
                total += c * pair_left(dual, module, key, y)?;
            }
            Ok(total)
        }
        FormOrder::Right => {
            let mut total = Scalar::zero();
            for (key, c) in y {
                total += c * pair_right(dual, module, x, key)?;
            }
            Ok(total)
        }
    }
}

fn base_pair(module: &GeneralizedVermaModule, dual_label: i64, y: &GradedVector) -> Result<Scalar> {
    let mut total = Scalar::zero();
    for ((mono, k), c) in y {
        if mono.is_empty() {
            total += c * module.base().dual_pairing(dual_label, *k)?;
        }
    }
    Ok(total)
}

fn pair_left(
    dual: &GeneralizedVermaModule,
    module: &GeneralizedVermaModule,
    key: &VKey,
    y: &GradedVector,
) -> Result<Scalar> {
    let Some((m, rest)) = key.0.split_first() else {
        return base_pair(module, key.1, y);
    };
    let lowered = module.apply_mode(m.gen, m.depth as i64, y)?;
    if lowered.is_zero() {
        return Ok(Scalar::zero());
    }
    Ok(-pair_left(dual, module, &(rest, key.1), &lowered)?)
}

fn pair_right(
    dual: &GeneralizedVermaModule,
    module: &GeneralizedVermaModule,
    x: &GradedVector,
    key: &VKey,
) -> Result<Scalar> {
    let Some((m, rest)) = key.0.split_first() else {
        let mut total = Scalar::zero();
        for ((mono, k), c) in x {
            if mono.is_empty() {
                total += c * module.base().dual_pairing(*k, key.1)?;
            }
        }
        return Ok(total);
    };
    let lowered = dual.apply_mode(m.gen, m.depth as i64, x)?;
    if lowered.is_zero() {
        return Ok(Scalar::zero());
    }
    Ok(-pair_right(dual, module, &lowered, &(rest, key.1))?)
}

/// Pairing matrix between the weight `−w` part of `V(ℓ,U*)(m)` (rows) and
/// the weight `w` part of `V(ℓ,U)(m)` (columns).
pub fn pairing_matrix(
    dual: &GeneralizedVermaModule,
    module: &GeneralizedVermaModule,
    m: usize,
    w: &Scalar,
    order: FormOrder,
) -> Result<(Vec<VKey>, Vec<VKey>, ExactMatrix)> {
    let rows = dual.degree_basis(m, &-w)?;
    let cols = module.degree_basis(m, w)?;
    let mut mat = ExactMatrix::zeros(rows.len(), cols.len());
    for (i, r) in rows.iter().enumerate() {
        let x = GradedVector::basis(r.clone());
        for (j, c) in cols.iter().enumerate() {
            mat[(i, j)] = invariant_pairing(dual, module, &x, &GradedVector::basis(c.clone()), order)?;
        }
    }
    Ok((rows, cols, mat))
}

/// The pairing matrix computed by both reduction orders, which must agree.
pub fn checked_pairing_matrix(
    dual: &GeneralizedVermaModule,
    module: &GeneralizedVermaModule,
    m: usize,
    w: &Scalar,
) -> Result<(Vec<VKey>, Vec<VKey>, ExactMatrix)> {
    let left = pairing_matrix(dual, module, m, w, FormOrder::Left)?;
    let right = pairing_matrix(dual, module, m, w, FormOrder::Right)?;
    if left.2 != right.2 {
        return Err(Error::RouteMismatch(format!("invariant pairing at degree {m}, weight {w}")));
    }
    Ok(left)
}

/// Vectors of `V(ℓ,U)(m)` of weight `w` orthogonal to all of `V(ℓ,U*)`.
pub fn pairing_radical(
    dual: &GeneralizedVermaModule,
    module: &GeneralizedVermaModule,
    m: usize,
    w: &Scalar,
) -> Result<Vec<GradedVector>> {
    let (_, cols, mat) = checked_pairing_matrix(dual, module, m, w)?;
    Ok(kernel_vectors(&cols, &mat))
}

pub(crate) fn kernel_vectors(cols: &[VKey], mat: &ExactMatrix) -> Vec<GradedVector> {
    let kernel = if mat.rows() == 0 {
        (0..cols.len())
            .map(|j| (0..cols.len()).map(|i| Scalar::from_int((i == j) as i64)).collect())
            .collect()
    } else {
        mat.kernel()
    };
    kernel
        .into_iter()
        .map(|v| cols.iter().cloned().zip(v).collect())
        .collect()
}

fn sigma(gen: usize) -> usize {
    match gen {
        E => F,
        F => E,
        other => other,
    }
}

/// The contravariant form on `V(ℓ,U)` for sl2, extending the diagonal form
/// of `U` by `(a(n) x, y) = (x, σ(a)(−n) y)` with `σ: e ↔ f, h ↦ h`.
pub fn contravariant_form(
    module: &GeneralizedVermaModule,
    x: &GradedVector,
    y: &GradedVector,
    order: FormOrder,
) -> Result<Scalar> {
    module.algebra().require_sl2("contravariant form")?;
    let mut total = Scalar::zero();
    match order {
        FormOrder::Left => {
            for (key, c) in x {
                total += c * contra_left(module, key, y)?;
            }
        }
        FormOrder::Right => {
            for (key, c) in y {
                total += c * contra_right(module, x, key)?;
            }
        }
    }
    Ok(total)
}

fn contra_base(module: &GeneralizedVermaModule, k: i64, y: &GradedVector) -> Result<Scalar> {
    let c = y.coeff(&(super::PBWMonomial::empty(), k));
    if c.is_zero() {
        return Ok(c);
    }
    Ok(c * module.base().contravariant_norm(k)?)
}

fn contra_left(module: &GeneralizedVermaModule, key: &VKey, y: &GradedVector) -> Result<Scalar> {
    let Some((m, rest)) = key.0.split_first() else {
        return contra_base(module, key.1, y);
    };
    let lowered = module.apply_mode(sigma(m.gen), m.depth as i64, y)?;
    if lowered.is_zero() {
        return Ok(Scalar::zero());
    }
    contra_left(module, &(rest, key.1), &lowered)
}

fn contra_right(module: &GeneralizedVermaModule, x: &GradedVector, key: &VKey) -> Result<Scalar> {
    let Some((m, rest)) = key.0.split_first() else {
        return contra_base(module, key.1, x);
    };
    let lowered = module.apply_mode(sigma(m.gen), m.depth as i64, x)?;
    if lowered.is_zero() {
        return Ok(Scalar::zero());
    }
    contra_right(module, &lowered, &(rest, key.1))
}

/// Gram matrix of the contravariant form on the weight-`w` part of `V(m)`,
/// checked against the other reduction order.
pub fn contravariant_gram(module: &GeneralizedVermaModule, m: usize, w: &Scalar) -> Result<(Vec<VKey>, ExactMatrix)> {
    let basis = module.degree_basis(m, w)?;
    let n = basis.len();
    let vecs: Vec<GradedVector> = basis.iter().cloned().map(GradedVector::basis).collect();
    let mut gram = ExactMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let l = contravariant_form(module, &vecs[i], &vecs[j], FormOrder::Left)?;
            let r = contravariant_form(module, &vecs[i], &vecs[j], FormOrder::Right)?;
            if l != r {
                return Err(Error::RouteMismatch(format!("contravariant form at degree {m}, weight {w}")));
            }
            gram[(i, j)] = l;
        }
    }
    Ok((basis, gram))
}

/// Radical of the contravariant form on the weight-`w` part of `V(m)`.
pub fn contravariant_radical(module: &GeneralizedVermaModule, m: usize, w: &Scalar) -> Result<Vec<GradedVector>> {
    let (basis, gram) = contravariant_gram(module, m, w)?;
    Ok(kernel_vectors(&basis, &gram))
}

/// Dimension of the radical of the contravariant form on the weight-`w` part
/// of `V(m)` at a generic level.
///
/// Gram entries are polynomials in ℓ of degree at most `m`, so every minor of
/// a `n×n` block has degree at most `n·m`; sampling `n·m + 1` distinct levels
/// therefore attains the generic rank.
pub fn generic_contravariant_radical(base: &Arc<WeightModule>, m: usize, w: &Scalar) -> Result<usize> {
    let mut best: Option<(usize, usize)> = None;
    let mut sample = 0i64;
    let mut needed = 1usize;
    let mut tried = 0usize;
    while tried < needed {
        sample += 1;
        let level = Scalar::frac(7 * sample + 3, 11) + Scalar::frac(1, 997);
        if (&level + base.algebra().dual_coxeter()).is_zero() {
            continue;
        }
        let module = GeneralizedVermaModule::new(base.clone(), level, m)?;
        let (basis, gram) = contravariant_gram(&module, m, w)?;
        let n = basis.len();
        needed = n * m + 1;
        let rank = gram.rank();
        if best.is_none_or(|(r, _)| rank > r) {
            best = Some((rank, n));
        }
        if rank == n {
            break;
        }
        tried += 1;
    }
    Ok(best.map(|(r, n)| n - r).unwrap_or(0))
}
