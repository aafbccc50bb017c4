use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact_arith::Scalar;
use crate::lie_core::Element;

use super::forms::{invariant_pairing, FormOrder};
use super::{GeneralizedVermaModule, GradedVector, VKey};

/// The graded dual `V(ℓ,U*)'`. A functional is stored by its values on the
/// PBW basis of `V(ℓ,U*)`.
#[derive(Clone, Debug)]
pub struct ContragredientModule {
    dual: Arc<GeneralizedVermaModule>,
}

impl ContragredientModule {
    /// The contragredient of `V(ℓ,U*)`, given the latter.
    pub fn new(dual: Arc<GeneralizedVermaModule>) -> Self {
        ContragredientModule { dual }
    }

    /// The contragredient built over `V(ℓ,U*)` for the given `V(ℓ,U)`.
    pub fn for_module(module: &GeneralizedVermaModule) -> Result<Self> {
        let base = Arc::new(module.base().dual()?);
        let dual = GeneralizedVermaModule::new(base, module.level().clone(), module.cutoff())?;
        Ok(ContragredientModule { dual: Arc::new(dual) })
    }

    pub fn dual_module(&self) -> &Arc<GeneralizedVermaModule> {
        &self.dual
    }

    pub fn describe(&self) -> String {
        format!("{}'", self.dual.describe())
    }

    /// `φ(v)`.
    pub fn evaluate(&self, phi: &GradedVector, v: &GradedVector) -> Scalar {
        let (small, large) = if phi.len() <= v.len() { (phi, v) } else { (v, phi) };
        small.iter().map(|(k, c)| c * large.coeff(k)).sum()
    }

    fn blocks(&self, v: &GradedVector) -> BTreeSet<(usize, Scalar)> {
        v.keys().map(|k| (k.0.degree(), self.dual.key_weight(k))).collect()
    }

    /// `(x_a(n) φ)(b) = −φ(x_a(−n) b)`.
    pub fn act_mode(&self, a: usize, n: i64, phi: &GradedVector) -> Result<GradedVector> {
        let alg = self.dual.algebra();
        let mut out = GradedVector::new();
        for (m, w) in self.blocks(phi) {
            let target = m as i64 - n;
            if target < 0 {
                continue;
            }
            let tw = &w - alg.weight(a);
            for b in self.dual.degree_basis(target as usize, &tw)? {
                let image = self.dual.apply_key(a, -n, &b)?;
                let value = -self.evaluate(phi, &image);
                out.add_term(b, value);
            }
        }
        Ok(out)
    }

    pub fn act(&self, x: &Element, n: i64, phi: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::new();
        for (&a, c) in x {
            out.add_scaled(&self.act_mode(a, n, phi)?, c);
        }
        Ok(out)
    }

    /// The pairing of a functional with a vector of `V(ℓ,U*)`.
    pub fn contragredient_pair(&self, phi: &GradedVector, v: &GradedVector) -> Scalar {
        self.evaluate(phi, v)
    }

    /// `ι(w)(b) = <b, w>` for `w` in `V(ℓ,U)`, evaluated with both reduction
    /// orders of the invariant pairing.
    pub fn natural_map(&self, module: &GeneralizedVermaModule, w: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::new();
        let blocks: BTreeSet<(usize, Scalar)> = w.keys().map(|k| (k.0.degree(), module.key_weight(k))).collect();
        for (m, wt) in blocks {
            for b in self.dual.degree_basis(m, &-&wt)? {
                let bv = GradedVector::basis(b.clone());
                let left = invariant_pairing(&self.dual, module, &bv, w, FormOrder::Left)?;
                let right = invariant_pairing(&self.dual, module, &bv, w, FormOrder::Right)?;
                if left != right {
                    return Err(Error::RouteMismatch(format!("natural map at degree {m}")));
                }
                out.add_term(b, left);
            }
        }
        Ok(out)
    }

    /// Keys of `V(ℓ,U*)` on which functionals of degree `m` and weight `w`
    /// may be nonzero.
    pub fn support(&self, m: usize, w: &Scalar) -> Result<Vec<VKey>> {
        self.dual.degree_basis(m, &-w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::q;
    use crate::g_modules::WeightModule;
    use crate::lie_core::{E, F, H};

    use super::super::{Mode, PBWMonomial};

    fn key(modes: &[(usize, u32)], k: i64) -> VKey {
        let modes = modes.iter().map(|&(gen, depth)| Mode { gen, depth }).collect();
        (PBWMonomial::from_modes(modes).unwrap(), k)
    }

    #[test]
    fn natural_map_intertwines() {
        let module = GeneralizedVermaModule::new(Arc::new(WeightModule::finite(1)), q(3, 4), 4).unwrap();
        let c = ContragredientModule::for_module(&module).unwrap();
        let mut w = GradedVector::basis(key(&[(F, 1)], 0));
        w.add_term(key(&[(H, 1)], 1), q(-2, 3));
        w.add_term(key(&[(E, 1), (F, 1)], 1), q(5, 1));
        for a in 0..3 {
            for n in [-1i64, 0, 1, 2] {
                let lhs = c.natural_map(&module, &module.apply_mode(a, n, &w).unwrap()).unwrap();
                let rhs = c.act_mode(a, n, &c.natural_map(&module, &w).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn adjunction() {
        let module = GeneralizedVermaModule::new(Arc::new(WeightModule::finite(2)), q(-1, 3), 4).unwrap();
        let c = ContragredientModule::for_module(&module).unwrap();
        let dual = c.dual_module().clone();
        let mut phi = GradedVector::basis(key(&[(F, 1)], 0));
        phi.add_term(key(&[(H, 1)], 1), q(7, 2));
        phi.add_term(key(&[(E, 2)], 2), q(-1, 1));
        let mut v = GradedVector::basis(key(&[(H, 1)], 2));
        v.add_term(key(&[], 1), q(2, 1));
        for a in 0..3 {
            for n in [-2i64, -1, 0, 1] {
                let lhs = c.contragredient_pair(&c.act_mode(a, n, &phi).unwrap(), &v);
                let rhs = c.contragredient_pair(&phi, &dual.apply_mode(a, -n, &v).unwrap());
                assert_eq!(lhs, -rhs);
            }
        }
    }
}
