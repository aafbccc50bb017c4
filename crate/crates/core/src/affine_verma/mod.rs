//! The affine algebra at level ℓ acting on generalized Verma modules
//! `V(ℓ,U) = U(ĝ₋) ⊗ U`: PBW normal forms, degree bases, Sugawara operators,
//! invariant and contravariant forms, and the contragredient module.

mod contragredient;
mod forms;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_arith::{Level, Lin, Scalar};
use crate::g_modules::{ModVector, WeightModule};
use crate::lie_core::{DualBasisPair, Element, LieAlgebra};

pub use contragredient::ContragredientModule;
pub use forms::{
    checked_pairing_matrix, contravariant_form, contravariant_gram, contravariant_radical, generic_contravariant_radical,
    invariant_pairing, pairing_matrix, pairing_radical, FormOrder,
};

/// A mode `x_gen(−depth)` with `depth >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Mode {
    pub depth: u32,
    pub gen: usize,
}

impl Mode {
    /// Canonical PBW order: deeper modes first, ties by basis index.
    fn precedes_or_equal(&self, other: &Mode) -> bool {
        self.depth > other.depth || (self.depth == other.depth && self.gen <= other.gen)
    }
}

/// An ordered product `x_1(−n_1)⋯x_k(−n_k)` in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PBWMonomial(Vec<Mode>);

impl PBWMonomial {
    pub fn empty() -> Self {
        PBWMonomial(Vec::new())
    }

    /// Sorts `modes` into canonical order.
    pub fn from_modes(mut modes: Vec<Mode>) -> Result<Self> {
        if modes.iter().any(|m| m.depth == 0) {
            return Err(Error::Domain("PBW modes need depth >= 1".into()));
        }
        modes.sort_by(|a, b| b.depth.cmp(&a.depth).then(a.gen.cmp(&b.gen)));
        Ok(PBWMonomial(modes))
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|m| m.depth as usize).sum()
    }

    pub fn weight(&self, alg: &LieAlgebra) -> Scalar {
        self.0.iter().map(|m| alg.weight(m.gen).clone()).sum()
    }

    fn split_first(&self) -> Option<(Mode, PBWMonomial)> {
        let (first, rest) = self.0.split_first()?;
        Some((*first, PBWMonomial(rest.to_vec())))
    }

    fn prepend(&self, m: Mode) -> PBWMonomial {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(m);
        v.extend_from_slice(&self.0);
        PBWMonomial(v)
    }

    pub fn display(&self, alg: &LieAlgebra) -> String {
        self.0
            .iter()
            .map(|m| format!("{}(-{})", alg.basis_name(m.gen), m.depth))
            .collect::<Vec<_>>()
            .join("")
    }
}

/// A PBW basis vector `monomial ⊗ v[label]`.
pub type VKey = (PBWMonomial, i64);

/// A vector of a generalized Verma module (or a functional on one, for the
/// contragredient module) in the PBW basis.
pub type GradedVector = Lin<VKey>;

/// All canonical monomials of total depth `degree`.
pub fn monomials(dim: usize, degree: usize) -> Vec<PBWMonomial> {
    fn rec(dim: usize, remaining: usize, max: Mode, acc: &mut Vec<Mode>, out: &mut Vec<PBWMonomial>) {
        if remaining == 0 {
            out.push(PBWMonomial(acc.clone()));
            return;
        }
        for depth in (1..=remaining.min(max.depth as usize) as u32).rev() {
            let start = if depth == max.depth { max.gen } else { 0 };
            for gen in start..dim {
                let m = Mode { depth, gen };
                acc.push(m);
                rec(dim, remaining - depth as usize, m, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    let top = Mode { depth: degree.max(1) as u32, gen: 0 };
    rec(dim, degree, top, &mut Vec::new(), &mut out);
    out.sort();
    out
}

type CacheKey = (usize, i64, VKey);

/// `V(ℓ,U)` truncated at a degree cutoff.
pub struct GeneralizedVermaModule {
    alg: Arc<LieAlgebra>,
    level: Scalar,
    base: Arc<WeightModule>,
    cutoff: usize,
    duals: DualBasisPair,
    cache: Mutex<HashMap<CacheKey, GradedVector>>,
}

impl fmt::Debug for GeneralizedVermaModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V({}, {}) up to degree {}", self.level, self.base.describe(), self.cutoff)
    }
}

impl Clone for GeneralizedVermaModule {
    fn clone(&self) -> Self {
        GeneralizedVermaModule {
            alg: self.alg.clone(),
            level: self.level.clone(),
            base: self.base.clone(),
            cutoff: self.cutoff,
            duals: self.duals.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl GeneralizedVermaModule {
    pub fn new(base: Arc<WeightModule>, level: Scalar, cutoff: usize) -> Result<Self> {
        let alg = base.algebra().clone();
        if (&level + alg.dual_coxeter()).is_zero() {
            return Err(Error::CriticalLevel);
        }
        let duals = alg.dual_bases()?;
        Ok(GeneralizedVermaModule { alg, level, base, cutoff, duals, cache: Mutex::new(HashMap::new()) })
    }

    /// Same as [`GeneralizedVermaModule::new`] but refuses a generic level.
    pub fn at_level(base: Arc<WeightModule>, level: &Level, cutoff: usize) -> Result<Self> {
        let l = level.require_exact("generalized Verma modules are materialized at exact levels")?;
        Self::new(base, l.clone(), cutoff)
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.alg
    }

    pub fn level(&self) -> &Scalar {
        &self.level
    }

    pub fn base(&self) -> &Arc<WeightModule> {
        &self.base
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dual_bases(&self) -> &DualBasisPair {
        &self.duals
    }

    /// `ℓ + h^vee`.
    pub fn shifted_level(&self) -> Scalar {
        &self.level + self.alg.dual_coxeter()
    }

    pub fn describe(&self) -> String {
        format!("V({}, {})", self.level, self.base.describe())
    }

    /// The same module with a different cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut m = self.clone();
        m.cutoff = cutoff;
        m
    }

    pub fn key_weight(&self, key: &VKey) -> Scalar {
        key.0.weight(&self.alg) + self.base.weight_of(key.1)
    }

    pub fn base_vector(&self, k: i64) -> GradedVector {
        GradedVector::basis((PBWMonomial::empty(), k))
    }

    /// Embeds a degree-zero vector.
    pub fn embed(&self, v: &ModVector) -> GradedVector {
        v.iter().map(|(&k, c)| ((PBWMonomial::empty(), k), c.clone())).collect()
    }

    /// Degree-zero component as a base-module vector.
    pub fn degree_zero_part(&self, v: &GradedVector) -> ModVector {
        v.iter().filter(|(key, _)| key.0.is_empty()).map(|(key, c)| (key.1, c.clone())).collect()
    }

    /// `x_a(n)` applied to a PBW basis vector, in canonical form.
    pub fn apply_key(&self, a: usize, n: i64, key: &VKey) -> Result<GradedVector> {
        let deg = key.0.degree() as i64;
        if n > deg {
            return Ok(GradedVector::new());
        }
        let needed = (deg - n) as usize;
        if needed > self.cutoff {
            return Err(Error::CutoffExceeded { needed, cutoff: self.cutoff });
        }
        let ck = (a, n, key.clone());
        if let Some(v) = self.cache.lock().expect("cache lock").get(&ck) {
            return Ok(v.clone());
        }
        let out = self.compute_apply(a, n, key)?;
        self.cache.lock().expect("cache lock").insert(ck, out.clone());
        Ok(out)
    }

    fn compute_apply(&self, a: usize, n: i64, key: &VKey) -> Result<GradedVector> {
        let (mono, k) = key;
        if n < 0 {
            let m = Mode { depth: (-n) as u32, gen: a };
            let Some((y, rest)) = mono.split_first().filter(|(y, _)| !m.precedes_or_equal(y)) else {
                return Ok(GradedVector::basis((mono.prepend(m), *k)));
            };
            // a(n) y(-d) R = y(-d) a(n) R + [a,y](n-d) R
            let rest = (rest, *k);
            let inner = self.apply_key(a, n, &rest)?;
            let mut out = self.apply_mode(y.gen, -(y.depth as i64), &inner)?;
            for (&c, coeff) in self.alg.bracket_basis(a, y.gen) {
                out.add_scaled(&self.apply_key(c, n - y.depth as i64, &rest)?, coeff);
            }
            return Ok(out);
        }
        let Some((y, rest)) = mono.split_first() else {
            // n == 0 on the base module
            let img = self.base.act_basis(a, *k)?;
            return Ok(self.embed(&img));
        };
        // a(n) y(-d) R = y(-d) a(n) R + [a,y](n-d) R + n δ_{n,d} <a,y> ℓ R
        let rest = (rest, *k);
        let inner = self.apply_key(a, n, &rest)?;
        let mut out = self.apply_mode(y.gen, -(y.depth as i64), &inner)?;
        for (&c, coeff) in self.alg.bracket_basis(a, y.gen) {
            out.add_scaled(&self.apply_key(c, n - y.depth as i64, &rest)?, coeff);
        }
        if n == y.depth as i64 {
            let central = Scalar::from_int(n) * self.alg.form_basis(a, y.gen) * &self.level;
            out.add_term(rest, central);
        }
        Ok(out)
    }

    /// `x_a(n) v`.
    pub fn apply_mode(&self, a: usize, n: i64, v: &GradedVector) -> Result<GradedVector> {
        v.map_linear(|key| self.apply_key(a, n, key))
    }

    /// `x(n) v` for an algebra element `x`.
    pub fn apply(&self, x: &Element, n: i64, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::new();
        for (&a, c) in x {
            out.add_scaled(&self.apply_mode(a, n, v)?, c);
        }
        Ok(out)
    }

    /// Ordered PBW basis of the weight-`w` subspace of `V(m)`.
    pub fn degree_basis(&self, m: usize, w: &Scalar) -> Result<Vec<VKey>> {
        if m > self.cutoff {
            return Err(Error::CutoffExceeded { needed: m, cutoff: self.cutoff });
        }
        let mut out = Vec::new();
        for mono in monomials(self.alg.dim(), m) {
            let bw = w - mono.weight(&self.alg);
            for k in self.base.labels_of_weight(&bw) {
                out.push((mono.clone(), k));
            }
        }
        out.sort();
        Ok(out)
    }

    /// All weights of `V(m)` for a finite-dimensional base module.
    pub fn degree_weights(&self, m: usize) -> Result<Vec<Scalar>> {
        let labels = self
            .base
            .labels()
            .ok_or_else(|| Error::Unsupported("weights of V(m) over an infinite base need a window".into()))?;
        let mut ws: Vec<Scalar> = monomials(self.alg.dim(), m)
            .iter()
            .flat_map(|mono| {
                let mw = mono.weight(&self.alg);
                labels.iter().map(move |&k| &mw + self.base.weight_of(k)).collect::<Vec<_>>()
            })
            .collect();
        ws.sort();
        ws.dedup();
        ws.reverse();
        Ok(ws)
    }

    /// Total dimension of `V(m)` for a finite-dimensional base module.
    pub fn degree_dimension(&self, m: usize) -> Result<usize> {
        let n = self.base.dim().ok_or_else(|| Error::Unsupported("infinite-dimensional base".into()))?;
        Ok(monomials(self.alg.dim(), m).len() * n)
    }

    /// `L(0)` in dual-basis form.
    pub fn sugawara_l0(&self, v: &GradedVector) -> Result<GradedVector> {
        let s = self.shifted_level();
        let max_deg = v.keys().map(|k| k.0.degree()).max().unwrap_or(0) as i64;
        let mut zero = GradedVector::new();
        let mut positive = GradedVector::new();
        for (xa, xb) in self.duals.pairs() {
            zero.add(&self.apply(xa, 0, &self.apply(xb, 0, v)?)?);
            for n in 1..=max_deg {
                let lowered = self.apply(xb, n, v)?;
                if !lowered.is_zero() {
                    positive.add(&self.apply(xa, -n, &lowered)?);
                }
            }
        }
        let mut out = zero.scaled(&(Scalar::from_int(2) * &s).inv());
        out.add_scaled(&positive, &s.inv());
        Ok(out)
    }

    /// `L(−1)` in dual-basis form.
    pub fn sugawara_lm1(&self, v: &GradedVector) -> Result<GradedVector> {
        let s = self.shifted_level();
        let max_deg = v.keys().map(|k| k.0.degree()).max().unwrap_or(0) as i64;
        let mut out = GradedVector::new();
        for (xa, xb) in self.duals.pairs() {
            for n in 0..=max_deg {
                let lowered = self.apply(xb, n, v)?;
                if !lowered.is_zero() {
                    out.add(&self.apply(xa, -n - 1, &lowered)?);
                }
            }
        }
        Ok(out.scaled(&s.inv()))
    }

    /// Lowest conformal weight `C_U / (2(ℓ + h^vee))`.
    pub fn lowest_conformal_weight(&self) -> Scalar {
        self.base.casimir_scalar() / (Scalar::from_int(2) * self.shifted_level())
    }

    /// JSON export: `[{monomial: [[name, n], ...], base, coeff}]` with `n`
    /// the (negative) mode index.
    pub fn vector_json(&self, v: &GradedVector) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = v
            .iter()
            .map(|((mono, k), c)| {
                let modes: Vec<serde_json::Value> = mono
                    .modes()
                    .iter()
                    .map(|m| serde_json::json!([self.alg.basis_name(m.gen), -(m.depth as i64)]))
                    .collect();
                serde_json::json!({ "monomial": modes, "base": k, "coeff": c })
            })
            .collect();
        serde_json::Value::Array(terms)
    }
}

/// Lowest conformal weight `C / (2(ℓ + h^vee))` of `V(ℓ,U)` for a base module
/// with Casimir scalar `casimir`.
pub fn conformal_weight(alg: &LieAlgebra, casimir: &Scalar, level: &Scalar) -> Result<Scalar> {
    let s = level + alg.dual_coxeter();
    if s.is_zero() {
        return Err(Error::CriticalLevel);
    }
    Ok(casimir / (Scalar::from_int(2) * s))
}

/// `h_{λ,ℓ} = λ(λ+2) / (4(ℓ+2))` for sl2.
pub fn conformal_weight_sl2(lambda: &Scalar, level: &Scalar) -> Result<Scalar> {
    let s = level + Scalar::from_int(2);
    if s.is_zero() {
        return Err(Error::CriticalLevel);
    }
    Ok(lambda * (lambda + Scalar::from_int(2)) / (Scalar::from_int(4) * s))
}

/// Number of canonical monomials of degree `m` in `colors` generators,
/// counted by the generating function `∏_{n>=1} (1 − t^n)^{−colors}`.
pub fn colored_partition_count(colors: usize, m: usize) -> usize {
    let mut coeffs = vec![0usize; m + 1];
    coeffs[0] = 1;
    for n in 1..=m {
        for _ in 0..colors {
            for i in n..=m {
                coeffs[i] += coeffs[i - n];
            }
        }
    }
    coeffs[m]
}
