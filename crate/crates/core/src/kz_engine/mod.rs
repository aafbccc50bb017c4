//! The KZ recursion for intertwining operators among generalized Verma
//! modules: obstruction scans, prefixes `Y_0..Y_N` into a Verma or
//! contragredient target, independent verification, and singular-vector
//! candidates at obstructed degrees.

mod candidate;
mod prefix;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact_arith::{Level, Scalar};
use crate::g_modules::{ModuleKind, TensorModule, TensorVector, WeightModule};

pub use candidate::{candidate_diagnostics, in_radical, singular_candidate, singular_candidate_from, CandidateDiagnostics};
pub use prefix::{
    build_prefix, build_prefix_contragredient, kz_residual, verify_commcomp, Counterexample, IntertwinerPrefix,
    PrefixTarget, Verification,
};

/// Eigenvectors of `C_{U1⊗U2}` on one weight space.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenBlock {
    pub weight: Scalar,
    pub vectors: Vec<TensorVector>,
}

/// A degree `N >= 1` at which `(ℓ+h^vee)(h+N) − C_{U1,U2}` is singular.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionEntry {
    pub degree: usize,
    /// Eigenvalue `μ = 2(ℓ+h^vee)(h3+N)` of `C_{U1⊗U2}`.
    pub eigenvalue: Scalar,
    pub eigenvectors: Vec<EigenBlock>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ObstructionReport {
    pub entries: Vec<ObstructionEntry>,
    pub generic_level: bool,
    /// Set when only degrees up to this bound were examined.
    pub max_degree: Option<usize>,
}

impl ObstructionReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.degree).collect()
    }

    pub fn first(&self) -> Option<&ObstructionEntry> {
        self.entries.first()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "generic_level": self.generic_level,
            "max_degree": self.max_degree,
            "entries": self.entries.iter().map(entry_json).collect::<Vec<_>>(),
        })
    }
}

pub fn tensor_vector_json(v: &TensorVector) -> serde_json::Value {
    serde_json::Value::Array(
        v.iter()
            .map(|(&(k1, k2), c)| serde_json::json!({ "pair": [k1, k2], "coeff": c }))
            .collect(),
    )
}

pub(crate) fn entry_json(e: &ObstructionEntry) -> serde_json::Value {
    serde_json::json!({
        "degree": e.degree,
        "eigenvalue": e.eigenvalue,
        "eigenvectors": e.eigenvectors.iter().map(|b| serde_json::json!({
            "weight": b.weight,
            "vectors": b.vectors.iter().map(tensor_vector_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    /// Upper bound on `N`; required when the eigenvalue set is infinite or
    /// only available through the rank scan.
    pub max_degree: Option<usize>,
    /// Weight spaces on which eigenvectors are reported for
    /// infinite-dimensional tensor products.
    pub weights: Option<Vec<Scalar>>,
}

/// `h_3 = C_{U3} / (2(ℓ+h^vee))`.
pub fn target_conformal_weight(target: &WeightModule, level: &Scalar) -> Result<Scalar> {
    crate::affine_verma::conformal_weight(target.algebra(), &target.casimir_scalar(), level)
}

fn solve_degree(mu: &Scalar, shifted: &Scalar, h3: &Scalar) -> Option<usize> {
    let n = mu / (Scalar::from_int(2) * shifted) - h3;
    n.to_i64().filter(|&n| n >= 1).map(|n| n as usize)
}

fn report_weights(tensor: &TensorModule, opts: &ScanOptions) -> Result<Vec<Scalar>> {
    if let Some(ws) = tensor.weights() {
        return Ok(ws);
    }
    match &opts.weights {
        Some(ws) => Ok(ws.clone()),
        None => tensor.default_window(3),
    }
}

fn eigen_blocks(tensor: &TensorModule, mu: &Scalar, weights: &[Scalar]) -> Result<Vec<EigenBlock>> {
    let mut out = Vec::new();
    for w in weights {
        let basis = tensor.block(w)?;
        if basis.is_empty() {
            continue;
        }
        let vectors: Vec<TensorVector> = tensor
            .casimir_block(w)?
            .eigenspace(mu)?
            .into_iter()
            .map(|v| basis.iter().cloned().zip(v).collect())
            .collect();
        if !vectors.is_empty() {
            out.push(EigenBlock { weight: w.clone(), vectors });
        }
    }
    Ok(out)
}

/// Casimir eigenvalues of `M_{λ1} ⊗ M_{λ2}` that give obstructions up to
/// `max_degree`: the summand weights are `λ1 + λ2 − 2j`, `j >= 0`.
fn hw_pair_entries(
    tensor: &TensorModule,
    l1: &Scalar,
    l2: &Scalar,
    shifted: &Scalar,
    h3: &Scalar,
    max_degree: usize,
    opts: &ScanOptions,
) -> Result<Vec<ObstructionEntry>> {
    let two = Scalar::from_int(2);
    let mut out = Vec::new();
    for n in 1..=max_degree {
        let mu = &two * shifted * (h3 + Scalar::from_int(n as i64));
        // μ = c(ν) = ν(ν+2)/2 ⇔ ν = −1 ± sqrt(1 + 2μ)
        let Some(disc) = (Scalar::one() + &two * &mu).to_rational().cloned() else {
            continue;
        };
        let root = Scalar::sqrt_rational(&disc)?;
        let mut witness = Vec::new();
        for nu in [-Scalar::one() + &root, -Scalar::one() - &root] {
            let Ok(j) = (l1 + l2 - &nu).try_mul(&Scalar::frac(1, 2)) else { continue };
            if j.is_natural() {
                witness.push(nu);
            }
        }
        if witness.is_empty() {
            continue;
        }
        let mut weights = opts.weights.clone().unwrap_or_default();
        weights.extend(witness);
        weights.sort();
        weights.dedup();
        weights.reverse();
        out.push(ObstructionEntry { degree: n, eigenvectors: eigen_blocks(tensor, &mu, &weights)?, eigenvalue: mu });
    }
    Ok(out)
}

/// All degrees `N >= 1` with `2(ℓ+h^vee)(h3+N)` an eigenvalue of
/// `C_{U1⊗U2}`, read off from the decomposition of the tensor product.
pub fn obstruction_scan(
    tensor: &TensorModule,
    level: &Level,
    h3: &Scalar,
    opts: &ScanOptions,
) -> Result<ObstructionReport> {
    let Some(level) = level.exact() else {
        return Ok(ObstructionReport { generic_level: true, ..Default::default() });
    };
    let alg = tensor.first().algebra().clone();
    let shifted = level + alg.dual_coxeter();
    if shifted.is_zero() {
        return Err(Error::CriticalLevel);
    }
    let summands = match tensor.decompose() {
        Ok(s) => s,
        Err(Error::Unsupported(msg)) => {
            if let (ModuleKind::HighestWeight { lambda: l1 }, ModuleKind::HighestWeight { lambda: l2 }) =
                (tensor.first().kind(), tensor.second().kind())
            {
                let max = opts.max_degree.ok_or_else(|| {
                    Error::Unsupported("M ⊗ M has infinitely many Casimir eigenvalues; give a maximal degree".into())
                })?;
                let entries = hw_pair_entries(tensor, l1, l2, &shifted, h3, max, opts)?;
                return Ok(ObstructionReport { entries, generic_level: false, max_degree: Some(max) });
            }
            let max = opts.max_degree.ok_or(Error::Unsupported(msg))?;
            return rank_scan(tensor, level, h3, max, &report_weights(tensor, opts)?);
        }
        Err(e) => return Err(e),
    };
    let weights = report_weights(tensor, opts)?;
    let mut by_degree: Vec<(usize, Scalar)> = summands
        .iter()
        .filter_map(|s| solve_degree(&s.eigenvalue, &shifted, h3).map(|n| (n, s.eigenvalue.clone())))
        .filter(|(n, _)| opts.max_degree.is_none_or(|m| *n <= m))
        .collect();
    by_degree.sort();
    by_degree.dedup();
    let mut entries = Vec::new();
    for (n, mu) in by_degree {
        entries.push(ObstructionEntry { degree: n, eigenvectors: eigen_blocks(tensor, &mu, &weights)?, eigenvalue: mu });
    }
    Ok(ObstructionReport { entries, generic_level: false, max_degree: opts.max_degree })
}

/// Obstructions found by testing singularity of
/// `2(ℓ+h^vee)(h3+N) − C_{U1⊗U2}` on each listed weight space directly.
/// Stops early once `|2(ℓ+h^vee)(h3+N)|` exceeds the ∞-norm of every block
/// and keeps growing.
pub fn rank_scan(
    tensor: &TensorModule,
    level: &Scalar,
    h3: &Scalar,
    max_degree: usize,
    weights: &[Scalar],
) -> Result<ObstructionReport> {
    let alg = tensor.first().algebra().clone();
    let shifted = level + alg.dual_coxeter();
    if shifted.is_zero() {
        return Err(Error::CriticalLevel);
    }
    let mut blocks = Vec::new();
    let mut bound: Option<Scalar> = Some(Scalar::zero());
    for w in weights {
        let basis = tensor.block(w)?;
        if basis.is_empty() {
            continue;
        }
        let c = tensor.casimir_block(w)?;
        bound = match (bound, c.infinity_norm()) {
            (Some(b), Ok(n)) => Some(if n > b { n } else { b }),
            _ => None,
        };
        blocks.push((w.clone(), basis, c));
    }
    let two = Scalar::from_int(2);
    let magnitude = |x: &Scalar| -> Option<Scalar> {
        match x.signum_rational()? {
            std::cmp::Ordering::Less => Some(-x),
            _ => Some(x.clone()),
        }
    };
    let mut entries = Vec::new();
    for n in 1..=max_degree {
        let mu = &two * &shifted * (h3 + Scalar::from_int(n as i64));
        let mut found = Vec::new();
        for (w, basis, c) in &blocks {
            let vecs = c.eigenspace(&mu)?;
            if !vecs.is_empty() {
                found.push(EigenBlock {
                    weight: w.clone(),
                    vectors: vecs.into_iter().map(|v| basis.iter().cloned().zip(v).collect()).collect(),
                });
            }
        }
        if !found.is_empty() {
            entries.push(ObstructionEntry { degree: n, eigenvalue: mu.clone(), eigenvectors: found });
        }
        let next = &two * &shifted * (h3 + Scalar::from_int(n as i64 + 1));
        if let (Some(b), Some(m0), Some(m1)) = (&bound, magnitude(&mu), magnitude(&next)) {
            if &m0 > b && m1 > m0 {
                break;
            }
        }
    }
    Ok(ObstructionReport { entries, generic_level: false, max_degree: Some(max_degree) })
}

/// Convenience wrapper taking the target module instead of `h3`.
pub fn obstruction_scan_for(
    u1: &Arc<WeightModule>,
    u2: &Arc<WeightModule>,
    target: &WeightModule,
    level: &Level,
    opts: &ScanOptions,
) -> Result<ObstructionReport> {
    let tensor = TensorModule::new(u1.clone(), u2.clone())?;
    match level.exact() {
        None => obstruction_scan(&tensor, level, &Scalar::zero(), opts),
        Some(l) => obstruction_scan(&tensor, level, &target_conformal_weight(target, l)?, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::q;

    fn scan(p: u32, q_: u32, level: Scalar, h3: Scalar) -> ObstructionReport {
        let t = TensorModule::of(WeightModule::finite(p), WeightModule::finite(q_)).unwrap();
        obstruction_scan(&t, &Level::Exact(level), &h3, &ScanOptions::default()).unwrap()
    }

    #[test]
    fn level_four_adjoint_pair() {
        let r = scan(2, 2, q(4, 1), q(0, 1));
        assert_eq!(r.degrees(), vec![1]);
        assert_eq!(r.entries[0].eigenvalue, q(12, 1));
        let top = r.entries[0].eigenvectors.iter().find(|b| b.weight == q(2, 1)).unwrap();
        assert_eq!(top.vectors.len(), 1);
    }

    #[test]
    fn level_zero_candidate_degree() {
        let r = scan(2, 3, q(0, 1), q(3, 8));
        assert_eq!(r.degrees(), vec![4]);
        assert_eq!(q(3, 8) + q(4, 1), q(35, 8));
    }

    #[test]
    fn generic_level_is_empty() {
        let t = TensorModule::of(WeightModule::finite(2), WeightModule::finite(2)).unwrap();
        let r = obstruction_scan(&t, &Level::Generic, &q(0, 1), &ScanOptions::default()).unwrap();
        assert!(r.is_empty() && r.generic_level);
    }

    #[test]
    fn rank_scan_agrees_with_decomposition() {
        for (p, q_) in [(1u32, 1u32), (2, 2), (2, 3), (1, 4)] {
            for level in [q(0, 1), q(1, 1), q(4, 1), q(-1, 2), q(3, 2), q(-5, 2)] {
                for h3 in [q(0, 1), q(3, 8), q(-1, 3), q(1, 1)] {
                    let t = TensorModule::of(WeightModule::finite(p), WeightModule::finite(q_)).unwrap();
                    let a = obstruction_scan(
                        &t,
                        &Level::Exact(level.clone()),
                        &h3,
                        &ScanOptions { max_degree: Some(40), weights: None },
                    )
                    .unwrap();
                    let b = rank_scan(&t, &level, &h3, 40, &t.weights().unwrap()).unwrap();
                    assert_eq!(a.degrees(), b.degrees(), "p={p} q={q_} ℓ={level} h3={h3}");
                }
            }
        }
    }

    #[test]
    fn verma_pairs_need_a_bound() {
        let t = TensorModule::of(
            WeightModule::highest_weight(q(-1, 2)).unwrap(),
            WeightModule::highest_weight(q(-3, 2)).unwrap(),
        )
        .unwrap();
        let l = Level::Exact(q(-1, 2));
        assert!(obstruction_scan(&t, &l, &q(0, 1), &ScanOptions::default()).is_err());
        // weights −2 − 2j, c(ν) = ν(ν+2)/2; s = 3/2, h3 = 0: μ = 3N
        let r = obstruction_scan(&t, &l, &q(0, 1), &ScanOptions { max_degree: Some(20), weights: None }).unwrap();
        let oracle: Vec<usize> = (1..=20)
            .filter(|&n| {
                (0..60).any(|j| {
                    let nu = Scalar::from_int(-2 - 2 * j);
                    &nu * (&nu + Scalar::from_int(2)) * q(1, 2) == Scalar::from_int(3 * n as i64)
                })
            })
            .collect();
        assert_eq!(r.degrees(), oracle);
        for e in &r.entries {
            assert!(!e.eigenvectors.is_empty());
        }
    }

    #[test]
    fn mixed_and_dense_shapes() {
        let t = TensorModule::of(WeightModule::finite(1), WeightModule::highest_weight(q(-3, 2)).unwrap()).unwrap();
        let l = Level::Exact(q(-1, 2));
        let h3 = conformal_weight_hw(q(-1, 2), q(-1, 2));
        assert!(obstruction_scan(&t, &l, &h3, &ScanOptions::default()).unwrap().is_empty());
        let t = TensorModule::of(WeightModule::finite(1), WeightModule::dense(q(0, 1), q(5, 8)).unwrap()).unwrap();
        // δ± = 9/8 ± 3/2; ℓ = 0 (s = 2): 4(h3 + N) = μ
        let r = obstruction_scan(&t, &Level::Exact(q(0, 1)), &q(-11, 32), &ScanOptions::default()).unwrap();
        assert_eq!(r.degrees(), vec![1]);
        assert_eq!(r.entries[0].eigenvalue, q(21, 8));
    }

    fn conformal_weight_hw(lambda: Scalar, level: Scalar) -> Scalar {
        crate::affine_verma::conformal_weight_sl2(&lambda, &level).unwrap()
    }
}
