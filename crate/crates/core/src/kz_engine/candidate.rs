use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::affine_verma::{contravariant_form, invariant_pairing, FormOrder, GeneralizedVermaModule, GradedVector};
use crate::error::{Error, Result};
use crate::exact_arith::Scalar;
use crate::g_modules::{GHom, ModuleKind, TensorVector};

use super::prefix::{build_prefix, IntertwinerPrefix, PrefixTarget};

/// `Σ_a Σ_{k=1}^N x_a(−k) Y_{N−k}((x^a ⊗ 1) v)` for an eigenvector `v` of
/// `C_{U1⊗U2}` with eigenvalue `2(ℓ+h^vee)(h3+N)`, where `N` is the degree
/// at which `prefix` was obstructed.
pub fn singular_candidate(prefix: &IntertwinerPrefix, eigvec: &TensorVector) -> Result<GradedVector> {
    let PrefixTarget::Verma(module) = prefix.target() else {
        return Err(Error::Candidate("candidates live in a Verma target".into()));
    };
    let obs = prefix
        .obstruction()
        .ok_or_else(|| Error::Candidate("the prefix is not obstructed".into()))?;
    let n = obs.degree;
    if eigvec.is_zero() {
        return Err(Error::Candidate("zero eigenvector".into()));
    }
    let tensor = prefix.tensor();
    if tensor.casimir(eigvec)? != eigvec.scaled(&obs.eigenvalue) {
        return Err(Error::Candidate(format!("not an eigenvector for {}", obs.eigenvalue)));
    }
    let duals = tensor.first().algebra().dual_bases()?;
    let mut out = GradedVector::new();
    for (xa, xb) in duals.pairs() {
        let moved = tensor.act_first(xb, eigvec)?;
        if moved.is_zero() {
            continue;
        }
        for k in 1..=n {
            let inner = prefix.y(n - k, &moved)?;
            if !inner.is_zero() {
                out.add(&module.apply(xa, -(k as i64), &inner)?);
            }
        }
    }
    Ok(out)
}

/// Builds the prefix for `f` up to degree `n` and evaluates the candidate.
/// Fails unless `n` is the first obstructed degree.
pub fn singular_candidate_from(
    f: &GHom,
    level: &Scalar,
    n: usize,
    eigvec: &TensorVector,
    window: Option<&[Scalar]>,
) -> Result<(IntertwinerPrefix, GradedVector)> {
    let prefix = build_prefix(f, level, n, window)?;
    match prefix.obstruction() {
        Some(o) if o.degree == n => {}
        Some(o) => {
            return Err(Error::Candidate(format!("degree {n} is not minimal: obstructed already at {}", o.degree)))
        }
        None => return Err(Error::Candidate(format!("no obstruction at degree {n}"))),
    }
    let v = singular_candidate(&prefix, eigvec)?;
    Ok((prefix, v))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateDiagnostics {
    pub is_zero: bool,
    pub in_radical: bool,
    pub annihilated_by_positive_modes: bool,
    /// Forms used for the radical test.
    pub radical_routes: Vec<String>,
}

fn components(module: &GeneralizedVermaModule, v: &GradedVector) -> BTreeMap<(usize, Scalar), GradedVector> {
    let mut out: BTreeMap<(usize, Scalar), GradedVector> = BTreeMap::new();
    for (key, c) in v {
        out.entry((key.0.degree(), module.key_weight(key))).or_default().add_term(key.clone(), c.clone());
    }
    out
}

fn contravariant_route(module: &GeneralizedVermaModule, v: &GradedVector) -> Result<Option<bool>> {
    if !module.algebra().is_standard_sl2() || matches!(module.base().kind(), ModuleKind::Adjoint) {
        return Ok(None);
    }
    for ((m, w), part) in components(module, v) {
        for b in module.degree_basis(m, &w)? {
            if !contravariant_form(module, &GradedVector::basis(b), &part, FormOrder::Left)?.is_zero() {
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}

fn pairing_route(module: &GeneralizedVermaModule, v: &GradedVector) -> Result<Option<bool>> {
    let Ok(dual_base) = module.base().dual() else {
        return Ok(None);
    };
    let dual = GeneralizedVermaModule::new(Arc::new(dual_base), module.level().clone(), module.cutoff())?;
    for ((m, w), part) in components(module, v) {
        for b in dual.degree_basis(m, &-&w)? {
            if !invariant_pairing(&dual, module, &GradedVector::basis(b), &part, FormOrder::Left)?.is_zero() {
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}

/// Whether `v` lies in the maximal proper graded submodule meeting the top
/// trivially, tested against the contravariant form and against the
/// invariant pairing with `V(ℓ,U*)` wherever each is available.
pub fn in_radical(module: &GeneralizedVermaModule, v: &GradedVector) -> Result<(bool, Vec<String>)> {
    let mut routes = Vec::new();
    let mut verdicts = Vec::new();
    if let Some(r) = contravariant_route(module, v)? {
        routes.push("contravariant".to_string());
        verdicts.push(r);
    }
    if let Some(r) = pairing_route(module, v)? {
        routes.push("invariant_pairing".to_string());
        verdicts.push(r);
    }
    match verdicts.as_slice() {
        [] => Err(Error::Unsupported(format!("no form available on {}", module.describe()))),
        [a, rest @ ..] if rest.iter().all(|b| b == a) => Ok((*a, routes)),
        _ => Err(Error::RouteMismatch("radical membership differs between forms".into())),
    }
}

pub fn candidate_diagnostics(module: &GeneralizedVermaModule, v: &GradedVector) -> Result<CandidateDiagnostics> {
    if v.is_zero() {
        return Ok(CandidateDiagnostics {
            is_zero: true,
            in_radical: true,
            annihilated_by_positive_modes: true,
            radical_routes: Vec::new(),
        });
    }
    let (in_rad, routes) = in_radical(module, v)?;
    let degree = v.keys().map(|k| k.0.degree()).max().unwrap_or(0);
    let mut annihilated = true;
    'outer: for a in 0..module.algebra().dim() {
        for n in 1..=degree as i64 {
            if !module.apply_mode(a, n, v)?.is_zero() {
                annihilated = false;
                break 'outer;
            }
        }
    }
    Ok(CandidateDiagnostics {
        is_zero: false,
        in_radical: in_rad,
        annihilated_by_positive_modes: annihilated,
        radical_routes: routes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::q;
    use crate::g_modules::{hom_space, TensorModule, WeightModule};
    use crate::lie_core::{E, H};

    fn invariant_form_seed() -> GHom {
        let t = Arc::new(TensorModule::of(WeightModule::finite(2), WeightModule::finite(2)).unwrap());
        hom_space(&t, &Arc::new(WeightModule::finite(0)), None).unwrap().remove(0)
    }

    #[test]
    fn level_four_candidates() {
        let f = invariant_form_seed();
        let prefix = build_prefix(&f, &q(4, 1), 1, None).unwrap();
        let obs = prefix.obstruction().unwrap().clone();
        assert_eq!(obs.degree, 1);
        let PrefixTarget::Verma(module) = prefix.target() else { unreachable!() };
        let mut count = 0;
        for block in &obs.eigenvectors {
            for v in &block.vectors {
                let cand = singular_candidate(&prefix, v).unwrap();
                let d = candidate_diagnostics(module, &cand).unwrap();
                assert!(d.in_radical);
                if block.weight == q(2, 1) {
                    assert!(d.is_zero);
                }
                count += 1;
            }
        }
        assert_eq!(count, 5);
    }

    #[test]
    fn diagnostics_on_known_vectors() {
        let module = GeneralizedVermaModule::new(Arc::new(WeightModule::finite(0)), q(1, 1), 3).unwrap();
        let zero = candidate_diagnostics(&module, &GradedVector::new()).unwrap();
        assert!(zero.is_zero && zero.in_radical && zero.annihilated_by_positive_modes);
        // e(-1)^2 1 is singular at level 1
        let e2 = module.apply_mode(E, -1, &module.apply_mode(E, -1, &module.base_vector(0)).unwrap()).unwrap();
        let d = candidate_diagnostics(&module, &e2).unwrap();
        assert!(!d.is_zero && d.in_radical && d.annihilated_by_positive_modes);
        assert_eq!(d.radical_routes.len(), 2);
        let h1 = module.apply_mode(H, -1, &module.base_vector(0)).unwrap();
        let d = candidate_diagnostics(&module, &h1).unwrap();
        assert!(!d.in_radical && !d.annihilated_by_positive_modes);
    }

    #[test]
    fn candidate_preconditions() {
        let f = invariant_form_seed();
        let not_eigen = TensorVector::basis((0, 1));
        let prefix = build_prefix(&f, &q(4, 1), 1, None).unwrap();
        assert!(matches!(singular_candidate(&prefix, &not_eigen), Err(Error::Candidate(_))));
        let v = prefix.obstruction().unwrap().eigenvectors[0].vectors[0].clone();
        assert!(matches!(singular_candidate_from(&f, &q(4, 1), 2, &v, None), Err(Error::Candidate(_))));
        let clean = build_prefix(&f, &q(3, 1), 2, None).unwrap();
        assert!(matches!(singular_candidate(&clean, &v), Err(Error::Candidate(_))));
    }
}
