use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::{operator_block, ModVector, ModuleKind, WeightModule};
use crate::error::{Error, Result};
use crate::exact_arith::{ExactMatrix, Lin, Scalar};
use crate::lie_core::Element;

/// A vector of `U1 ⊗ U2` in the basis of label pairs.
pub type TensorVector = Lin<(i64, i64)>;

/// One irreducible summand of a tensor product together with the eigenvalue
/// of `C_{U1⊗U2}` on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summand {
    pub label: String,
    pub kind: ModuleKind,
    pub eigenvalue: Scalar,
    pub multiplicity: usize,
}

/// The tensor product of two weight modules, organized by weight blocks.
#[derive(Clone, Debug)]
pub struct TensorModule {
    u1: Arc<WeightModule>,
    u2: Arc<WeightModule>,
}

impl TensorModule {
    pub fn new(u1: Arc<WeightModule>, u2: Arc<WeightModule>) -> Result<Self> {
        if u1.algebra().config() != u2.algebra().config() {
            return Err(Error::DimensionMismatch("tensor factors over different algebras".into()));
        }
        Ok(TensorModule { u1, u2 })
    }

    pub fn of(u1: WeightModule, u2: WeightModule) -> Result<Self> {
        Self::new(Arc::new(u1), Arc::new(u2))
    }

    pub fn first(&self) -> &Arc<WeightModule> {
        &self.u1
    }

    pub fn second(&self) -> &Arc<WeightModule> {
        &self.u2
    }

    pub fn is_finite_dimensional(&self) -> bool {
        self.u1.is_finite_dimensional() && self.u2.is_finite_dimensional()
    }

    pub fn describe(&self) -> String {
        format!("{} ⊗ {}", self.u1.describe(), self.u2.describe())
    }

    pub fn weight_of(&self, (k1, k2): (i64, i64)) -> Scalar {
        self.u1.weight_of(k1) + self.u2.weight_of(k2)
    }

    /// Sorted basis of the weight-`w` space.
    pub fn block(&self, w: &Scalar) -> Result<Vec<(i64, i64)>> {
        let mut out = Vec::new();
        if let Some(l1) = self.u1.labels() {
            for k1 in l1 {
                for k2 in self.u2.labels_of_weight(&(w - self.u1.weight_of(k1))) {
                    out.push((k1, k2));
                }
            }
        } else if let Some(l2) = self.u2.labels() {
            for k2 in l2 {
                for k1 in self.u1.labels_of_weight(&(w - self.u2.weight_of(k2))) {
                    out.push((k1, k2));
                }
            }
        } else {
            match (self.u1.kind(), self.u2.kind()) {
                (ModuleKind::HighestWeight { lambda: l1 }, ModuleKind::HighestWeight { lambda: l2 }) => {
                    let total = ((l1 + l2 - w) * Scalar::frac(1, 2)).to_i64();
                    if let Some(k) = total.filter(|&k| k >= 0) {
                        out.extend((0..=k).map(|k1| (k1, k - k1)));
                    }
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "weight spaces of {} are infinite-dimensional",
                        self.describe()
                    )))
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// All weights of a finite-dimensional tensor product, in decreasing
    /// structural order.
    pub fn weights(&self) -> Option<Vec<Scalar>> {
        let l1 = self.u1.labels()?;
        let l2 = self.u2.labels()?;
        let mut ws: Vec<Scalar> = l1
            .iter()
            .flat_map(|&a| l2.iter().map(move |&b| (a, b)))
            .map(|p| self.weight_of(p))
            .collect();
        ws.sort();
        ws.dedup();
        ws.reverse();
        Some(ws)
    }

    fn factor_extent(m: &WeightModule) -> Option<(Scalar, Scalar)> {
        let labels = m.labels()?;
        let ws: Vec<Scalar> = labels.iter().map(|&k| m.weight_of(k)).collect();
        Some((ws.iter().max()?.clone(), ws.iter().min()?.clone()))
    }

    /// A window of weights around the top (or the reference weight for
    /// dense factors), `radius` steps deep in every unbounded direction.
    pub fn default_window(&self, radius: usize) -> Result<Vec<Scalar>> {
        if let Some(ws) = self.weights() {
            return Ok(ws);
        }
        let two = Scalar::from_int(2);
        let radius = radius as i64;
        let (finite, infinite) = match (Self::factor_extent(&self.u1), Self::factor_extent(&self.u2)) {
            (Some(ext), None) => (Some(ext), &self.u2),
            (None, Some(ext)) => (Some(ext), &self.u1),
            (None, None) => (None, &self.u1),
            (Some(_), Some(_)) => unreachable!("finite tensor handled above"),
        };
        let mut out = Vec::new();
        match (finite, infinite.kind()) {
            (Some((top, bottom)), ModuleKind::HighestWeight { lambda }) => {
                let span = ((&top - &bottom) * Scalar::frac(1, 2)).to_i64().unwrap_or(0);
                let start = &top + lambda;
                for k in 0..=(span + radius) {
                    out.push(&start - &two * Scalar::from_int(k));
                }
            }
            (Some((top, _)), ModuleKind::Dense { lambda, .. }) => {
                let base = &top + lambda;
                for j in (-radius..=radius).rev() {
                    out.push(&base + &two * Scalar::from_int(j));
                }
            }
            (None, ModuleKind::HighestWeight { .. }) => {
                let top = self.u1.weight_of(0) + self.u2.weight_of(0);
                for k in 0..=radius {
                    out.push(&top - &two * Scalar::from_int(k));
                }
            }
            _ => return Err(Error::Unsupported(format!("no weight window for {}", self.describe()))),
        }
        Ok(out)
    }

    /// `window` together with all weights up to `steps` root steps away that
    /// carry a nonzero block.
    pub fn enlarge_window(&self, window: &[Scalar], steps: usize) -> Result<Vec<Scalar>> {
        if let Some(ws) = self.weights() {
            return Ok(ws);
        }
        let mut set: Vec<Scalar> = window.to_vec();
        for w in window {
            for j in 1..=steps as i64 {
                for cand in [w + Scalar::from_int(2 * j), w - Scalar::from_int(2 * j)] {
                    if !set.contains(&cand) && !self.block(&cand)?.is_empty() {
                        set.push(cand);
                    }
                }
            }
        }
        set.sort();
        set.reverse();
        Ok(set)
    }

    /// `Δx = x ⊗ 1 + 1 ⊗ x`.
    pub fn act(&self, x: &Element, v: &TensorVector) -> Result<TensorVector> {
        let mut out = self.act_first(x, v)?;
        out.add(&self.act_second(x, v)?);
        Ok(out)
    }

    /// `x ⊗ 1`.
    pub fn act_first(&self, x: &Element, v: &TensorVector) -> Result<TensorVector> {
        let mut out = TensorVector::new();
        for (&(k1, k2), c) in v {
            let img = self.u1.act(x, &ModVector::basis(k1))?;
            for (&j, cj) in &img {
                out.add_term((j, k2), c * cj);
            }
        }
        Ok(out)
    }

    /// `1 ⊗ x`.
    pub fn act_second(&self, x: &Element, v: &TensorVector) -> Result<TensorVector> {
        let mut out = TensorVector::new();
        for (&(k1, k2), c) in v {
            let img = self.u2.act(x, &ModVector::basis(k2))?;
            for (&j, cj) in &img {
                out.add_term((k1, j), c * cj);
            }
        }
        Ok(out)
    }

    /// `C_{U1,U2} = Σ_a (x_a·u1) ⊗ (x^a·u2)`.
    pub fn pair_casimir(&self, v: &TensorVector) -> Result<TensorVector> {
        let duals = self.u1.algebra().dual_bases()?;
        let mut out = TensorVector::new();
        for (xa, xb) in duals.pairs() {
            out.add(&self.act_first(xa, &self.act_second(xb, v)?)?);
        }
        Ok(out)
    }

    /// Casimir of the tensor module, `Σ_a Δx_a Δx^a`.
    pub fn casimir(&self, v: &TensorVector) -> Result<TensorVector> {
        let duals = self.u1.algebra().dual_bases()?;
        let mut out = TensorVector::new();
        for (xa, xb) in duals.pairs() {
            out.add(&self.act(xa, &self.act(xb, v)?)?);
        }
        Ok(out)
    }

    pub fn pair_casimir_block(&self, w: &Scalar) -> Result<ExactMatrix> {
        let basis = self.block(w)?;
        operator_block(&basis, |p| self.pair_casimir(&TensorVector::basis(p)))
    }

    pub fn casimir_block(&self, w: &Scalar) -> Result<ExactMatrix> {
        let basis = self.block(w)?;
        operator_block(&basis, |p| self.casimir(&TensorVector::basis(p)))
    }

    /// Checks `C_{U1,U2} = ½(C_{U1⊗U2} − C_{U1}⊗1 − 1⊗C_{U2})` on the
    /// weight-`w` block, with the factor Casimirs computed from the action
    /// maps.
    pub fn check_pair_casimir_identity(&self, w: &Scalar) -> Result<bool> {
        let basis = self.block(w)?;
        let factors = operator_block(&basis, |(k1, k2)| {
            let mut out = TensorVector::new();
            for (&j, c) in &self.u1.casimir_on(&ModVector::basis(k1))? {
                out.add_term((j, k2), c.clone());
            }
            for (&j, c) in &self.u2.casimir_on(&ModVector::basis(k2))? {
                out.add_term((k1, j), c.clone());
            }
            Ok(out)
        })?;
        let rhs = self.casimir_block(w)?.try_sub(&factors)?.scale(&Scalar::frac(1, 2));
        Ok(self.pair_casimir_block(w)? == rhs)
    }

    /// Irreducible summands with the eigenvalue of `C_{U1⊗U2}` on each.
    ///
    /// Supported: a trivial factor, `L_p ⊗ L_q`, `L_p ⊗ L_λ` (λ, p+λ not
    /// natural) and `L_1 ⊗ E_{λ̄,δ}`, in either order.
    pub fn decompose(&self) -> Result<Vec<Summand>> {
        let half = Scalar::frac(1, 2);
        let cas = |mu: &Scalar| mu * (mu + Scalar::from_int(2)) * &half;
        let single = |m: &WeightModule| {
            vec![Summand {
                label: m.describe(),
                kind: m.kind().clone(),
                eigenvalue: m.casimir_scalar(),
                multiplicity: 1,
            }]
        };
        if *self.u2.kind() == ModuleKind::Trivial {
            return Ok(single(&self.u1));
        }
        if *self.u1.kind() == ModuleKind::Trivial {
            return Ok(single(&self.u2));
        }
        let (finite, other) = match (self.u1.sl2_finite_param(), self.u2.sl2_finite_param()) {
            (Some(p), Some(q)) => {
                let (p, q) = (p as i64, q as i64);
                return Ok((0..=p.min(q))
                    .map(|k| {
                        let r = p + q - 2 * k;
                        Summand {
                            label: format!("L_{r}"),
                            kind: ModuleKind::Finite { p: r as u32 },
                            eigenvalue: cas(&Scalar::from_int(r)),
                            multiplicity: 1,
                        }
                    })
                    .collect());
            }
            (Some(p), None) => (p, &self.u2),
            (None, Some(q)) => (q, &self.u1),
            (None, None) => {
                return Err(Error::Unsupported(format!("decomposition of {}", self.describe())))
            }
        };
        match other.kind() {
            ModuleKind::HighestWeight { lambda } => {
                let p = Scalar::from_int(finite as i64);
                if (&p + lambda).is_natural() {
                    return Err(Error::Domain(format!("p + λ = {} is a natural number", &p + lambda)));
                }
                Ok((0..=finite as i64)
                    .map(|k| {
                        let mu = &p + lambda - Scalar::from_int(2 * k);
                        Summand {
                            label: format!("L_{mu}"),
                            kind: ModuleKind::HighestWeight { lambda: mu.clone() },
                            eigenvalue: cas(&mu),
                            multiplicity: 1,
                        }
                    })
                    .collect())
            }
            ModuleKind::Dense { lambda, delta } if finite == 1 => {
                let (minus, plus) = dense_tensor_eigenvalues(delta)?;
                let shifted = lambda + Scalar::one();
                let mk = |ev: Scalar, mult: usize| Summand {
                    label: format!("E[{shifted},{ev}]"),
                    kind: ModuleKind::Dense { lambda: shifted.clone(), delta: ev.clone() },
                    eigenvalue: ev,
                    multiplicity: mult,
                };
                if minus == plus {
                    Ok(vec![mk(minus, 2)])
                } else {
                    Ok(vec![mk(minus, 1), mk(plus, 1)])
                }
            }
            _ => Err(Error::Unsupported(format!("decomposition of {}", self.describe()))),
        }
    }
}

/// `δ± = ½(2δ+1) ± sqrt(2δ+1)`, the Casimir eigenvalues on `L_1 ⊗ E_{λ̄,δ}`,
/// returned as `(δ−, δ+)`.
pub fn dense_tensor_eigenvalues(delta: &Scalar) -> Result<(Scalar, Scalar)> {
    let t = Scalar::from_int(2) * delta + Scalar::one();
    let root = t.sqrt()?;
    let mid = &t * Scalar::frac(1, 2);
    Ok((&mid - &root, &mid + &root))
}

/// Groups `(eigenvalue, multiplicity)` pairs.
pub fn eigenvalue_multiset(summands: &[Summand]) -> BTreeMap<Scalar, usize> {
    let mut out = BTreeMap::new();
    for s in summands {
        *out.entry(s.eigenvalue.clone()).or_insert(0) += s.multiplicity;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::q;
    use crate::lie_core::{LieAlgebra, E, F, H};

    fn t(u1: WeightModule, u2: WeightModule) -> TensorModule {
        TensorModule::of(u1, u2).unwrap()
    }

    #[test]
    fn l2_l2_weight_two_eigenvector() {
        let tm = t(WeightModule::finite(2), WeightModule::finite(2));
        let w = q(2, 1);
        assert_eq!(tm.block(&w).unwrap(), vec![(0, 1), (1, 0)]);
        let c = tm.casimir_block(&w).unwrap();
        let ker = c.eigenspace(&q(12, 1)).unwrap();
        assert_eq!(ker.len(), 1);
        // e⊗h + h⊗e with e = v0, h = −v1
        assert_eq!(ker[0], vec![q(1, 1), q(1, 1)]);
        assert_eq!(c.eigenspace(&q(4, 1)).unwrap().len(), 1);
    }

    #[test]
    fn decompositions() {
        let ev = |tm: &TensorModule| -> Vec<Scalar> { tm.decompose().unwrap().into_iter().map(|s| s.eigenvalue).collect() };
        assert_eq!(ev(&t(WeightModule::finite(2), WeightModule::finite(2))), vec![q(12, 1), q(4, 1), q(0, 1)]);
        let mixed = t(WeightModule::finite(1), WeightModule::highest_weight(q(-3, 2)).unwrap());
        let labels: Vec<String> = mixed.decompose().unwrap().into_iter().map(|s| s.label).collect();
        assert_eq!(labels, vec!["L_-1/2", "L_-5/2"]);
        let dense = t(WeightModule::finite(1), WeightModule::dense(q(0, 1), q(-3, 8)).unwrap());
        assert_eq!(ev(&dense), vec![q(-3, 8), q(5, 8)]);
        let dd = t(
            WeightModule::dense(q(0, 1), q(-3, 8)).unwrap(),
            WeightModule::dense(q(0, 1), q(-3, 8)).unwrap(),
        );
        assert!(matches!(dd.decompose(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dense_blocks_have_both_eigenvalues() {
        let tm = t(WeightModule::finite(1), WeightModule::dense(q(0, 1), q(-3, 8)).unwrap());
        for w in tm.default_window(4).unwrap() {
            let c = tm.casimir_block(&w).unwrap();
            assert_eq!(c.rows(), 2);
            assert_eq!(c.eigenspace(&q(-3, 8)).unwrap().len(), 1);
            assert_eq!(c.eigenspace(&q(5, 8)).unwrap().len(), 1);
        }
    }

    #[test]
    fn pair_casimir_examples() {
        let tm = t(WeightModule::finite(3), WeightModule::finite(0));
        for w in tm.weights().unwrap() {
            assert!(tm.pair_casimir_block(&w).unwrap().is_zero());
        }
        let tm = t(WeightModule::finite(1), WeightModule::finite(1));
        let c = tm.pair_casimir_block(&q(0, 1)).unwrap();
        assert_eq!(c.eigenspace(&q(1, 2)).unwrap().len(), 1);
        assert_eq!(c.eigenspace(&q(-3, 2)).unwrap().len(), 1);
        let tm = t(WeightModule::finite(2), WeightModule::finite(2));
        assert_eq!(tm.pair_casimir_block(&q(4, 1)).unwrap(), ExactMatrix::diagonal(&[q(2, 1)]));
    }

    #[test]
    fn pair_casimir_identity_all_shapes() {
        let alg = LieAlgebra::sl2();
        let shapes = vec![
            t(WeightModule::finite(2), WeightModule::finite(3)),
            t(WeightModule::finite(1), WeightModule::highest_weight(q(-3, 2)).unwrap()),
            t(WeightModule::highest_weight(q(-1, 2)).unwrap(), WeightModule::finite(2)),
            t(WeightModule::finite(1), WeightModule::dense(q(0, 1), q(-3, 8)).unwrap()),
            t(WeightModule::dense(q(1, 3), q(1, 1)).unwrap(), WeightModule::finite(1)),
            t(WeightModule::highest_weight(q(-1, 2)).unwrap(), WeightModule::highest_weight(q(1, 3)).unwrap()),
            t(WeightModule::adjoint(alg.clone()), WeightModule::adjoint(alg)),
        ];
        for tm in shapes {
            for w in tm.default_window(4).unwrap() {
                assert!(tm.check_pair_casimir_identity(&w).unwrap(), "{} at {w}", tm.describe());
            }
        }
    }

    #[test]
    fn decomposition_matches_block_eigenspaces() {
        let shapes = vec![
            t(WeightModule::finite(2), WeightModule::finite(3)),
            t(WeightModule::finite(2), WeightModule::highest_weight(q(-3, 2)).unwrap()),
            t(WeightModule::highest_weight(q(1, 2)).unwrap(), WeightModule::finite(1)),
            t(WeightModule::finite(1), WeightModule::dense(q(1, 1), q(1, 1)).unwrap()),
        ];
        for tm in shapes {
            let multiset = eigenvalue_multiset(&tm.decompose().unwrap());
            for w in tm.default_window(4).unwrap() {
                let c = tm.casimir_block(&w).unwrap();
                let total: usize = multiset.keys().map(|mu| c.eigenspace(mu).unwrap().len()).sum();
                assert_eq!(total, c.rows(), "{} at {w}", tm.describe());
            }
        }
    }

    #[test]
    fn casimir_commutes_with_generators_on_tensor() {
        let tm = t(WeightModule::finite(1), WeightModule::highest_weight(q(-3, 2)).unwrap());
        for w in tm.default_window(3).unwrap() {
            for p in tm.block(&w).unwrap() {
                let v = TensorVector::basis(p);
                for a in [E, H, F] {
                    let x = Element::basis(a);
                    let lhs = tm.casimir(&tm.act(&x, &v).unwrap()).unwrap();
                    let rhs = tm.act(&x, &tm.casimir(&v).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn degenerate_dense_discriminant() {
        let (m, p) = dense_tensor_eigenvalues(&q(-1, 2)).unwrap();
        assert_eq!(m, p);
        assert!(m.is_zero());
        let (m, p) = dense_tensor_eigenvalues(&q(1, 1)).unwrap();
        assert_eq!(m.radicand(), 3);
        assert_eq!(&m + &p, q(3, 1));
    }
}
