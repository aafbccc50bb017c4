use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::affine_verma::{ContragredientModule, GeneralizedVermaModule, GradedVector, PBWMonomial};
use crate::error::{Error, Result};
use crate::exact_arith::{ExactMatrix, Scalar};
use crate::g_modules::{GHom, TensorModule, TensorVector, WeightModule};
use crate::lie_core::Element;

use super::{entry_json, target_conformal_weight, EigenBlock, ObstructionEntry};

type Pair = (i64, i64);

/// Where the maps `Y_m` land.
#[derive(Clone, Debug)]
pub enum PrefixTarget {
    /// `V(ℓ,U3)`.
    Verma(Arc<GeneralizedVermaModule>),
    /// `V(ℓ,U3*)'`, functionals stored by their values on the PBW basis of
    /// `V(ℓ,U3*)`.
    Contragredient(Arc<ContragredientModule>),
}

impl PrefixTarget {
    fn act_mode(&self, a: usize, n: i64, v: &GradedVector) -> Result<GradedVector> {
        match self {
            PrefixTarget::Verma(m) => m.apply_mode(a, n, v),
            PrefixTarget::Contragredient(c) => c.act_mode(a, n, v),
        }
    }

    fn act(&self, x: &Element, n: i64, v: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::new();
        for (&a, c) in x {
            out.add_scaled(&self.act_mode(a, n, v)?, c);
        }
        Ok(out)
    }

    fn vector_json(&self, v: &GradedVector) -> serde_json::Value {
        match self {
            PrefixTarget::Verma(m) => m.vector_json(v),
            PrefixTarget::Contragredient(c) => c.dual_module().vector_json(v),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PrefixTarget::Verma(m) => m.describe(),
            PrefixTarget::Contragredient(c) => c.describe(),
        }
    }
}

/// The maps `Y_0, …, Y_{N}` of an intertwining operator of type
/// `(W3; U1, U2)`, with `Y(u1,x)u2 = Σ_m Y_m(u1⊗u2) x^{h+m}`.
///
/// Maps are computed lazily per basis vector of `U1⊗U2` and memoized; the
/// weight spaces in [`IntertwinerPrefix::window`] are materialized eagerly
/// by the builders.
pub struct IntertwinerPrefix {
    seed: GHom,
    tensor: Arc<TensorModule>,
    target: PrefixTarget,
    level: Scalar,
    shifted: Scalar,
    h: Scalar,
    h3: Scalar,
    requested: usize,
    built: usize,
    window: Vec<Scalar>,
    obstruction: Option<ObstructionEntry>,
    maps: Mutex<HashMap<(usize, Pair), GradedVector>>,
    inverses: Mutex<HashMap<(usize, Scalar), Option<(Vec<Pair>, ExactMatrix)>>>,
}

impl std::fmt::Debug for IntertwinerPrefix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "prefix {} -> {} (built {} of {})",
            self.tensor.describe(),
            self.target.describe(),
            self.built,
            self.requested + 1
        )
    }
}

impl Clone for IntertwinerPrefix {
    fn clone(&self) -> Self {
        IntertwinerPrefix {
            seed: self.seed.clone(),
            tensor: self.tensor.clone(),
            target: self.target.clone(),
            level: self.level.clone(),
            shifted: self.shifted.clone(),
            h: self.h.clone(),
            h3: self.h3.clone(),
            requested: self.requested,
            built: self.built,
            window: self.window.clone(),
            obstruction: self.obstruction.clone(),
            maps: Mutex::new(self.maps.lock().expect("maps lock").clone()),
            inverses: Mutex::new(self.inverses.lock().expect("inverse lock").clone()),
        }
    }
}

/// Outcome of [`verify_commcomp`].
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

/// A failing instance `g(n) Y_m(u1⊗u2) ≠ …`.
#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub generator: String,
    pub n: i64,
    pub m: usize,
    pub pair: Pair,
}

impl Verification {
    fn ok() -> Self {
        Verification { holds: true, counterexample: None }
    }
}

fn prepare_seed(f: &GHom, n: usize, window: Option<&[Scalar]>) -> Result<(GHom, Vec<Scalar>)> {
    let tensor = f.tensor().clone();
    let window = match (tensor.weights(), window) {
        (Some(all), _) => all,
        (None, Some(w)) => w.to_vec(),
        (None, None) => f.weights(),
    };
    let needed = tensor.enlarge_window(&window, n + 1)?;
    Ok((f.extend(&needed)?, window))
}

impl IntertwinerPrefix {
    fn new(f: &GHom, level: &Scalar, n: usize, window: Option<&[Scalar]>, target: PrefixTarget) -> Result<Self> {
        let tensor = f.tensor().clone();
        let alg = tensor.first().algebra().clone();
        let shifted = level + alg.dual_coxeter();
        if shifted.is_zero() {
            return Err(Error::CriticalLevel);
        }
        let (seed, window) = prepare_seed(f, n, window)?;
        let h3 = target_conformal_weight(f.target(), level)?;
        let h1 = target_conformal_weight(tensor.first(), level)?;
        let h2 = target_conformal_weight(tensor.second(), level)?;
        Ok(IntertwinerPrefix {
            seed,
            tensor,
            target,
            level: level.clone(),
            shifted,
            h: &h3 - h1 - h2,
            h3,
            requested: n,
            built: n + 1,
            window,
            obstruction: None,
            maps: Mutex::new(HashMap::new()),
            inverses: Mutex::new(HashMap::new()),
        })
    }

    pub fn seed(&self) -> &GHom {
        &self.seed
    }

    pub fn tensor(&self) -> &Arc<TensorModule> {
        &self.tensor
    }

    pub fn target(&self) -> &PrefixTarget {
        &self.target
    }

    pub fn level(&self) -> &Scalar {
        &self.level
    }

    /// `h = h3 − h1 − h2`.
    pub fn h(&self) -> &Scalar {
        &self.h
    }

    pub fn h3(&self) -> &Scalar {
        &self.h3
    }

    pub fn window(&self) -> &[Scalar] {
        &self.window
    }

    pub fn requested_degree(&self) -> usize {
        self.requested
    }

    /// Number of maps available: `Y_0..Y_{built−1}`.
    pub fn built_degrees(&self) -> usize {
        self.built
    }

    pub fn is_complete(&self) -> bool {
        self.built == self.requested + 1
    }

    /// The obstruction that stopped the build, if any.
    pub fn obstruction(&self) -> Option<&ObstructionEntry> {
        self.obstruction.as_ref()
    }

    /// `(ℓ+h^vee)(h+m) − C_{U1,U2}` on the weight-`w` space.
    fn kz_operator_block(&self, m: usize, w: &Scalar) -> Result<(Vec<Pair>, ExactMatrix)> {
        let basis = self.tensor.block(w)?;
        let c = self.tensor.pair_casimir_block(w)?;
        let diag = &self.shifted * (&self.h + Scalar::from_int(m as i64));
        Ok((basis, c.scale(&-Scalar::one()).shift_diagonal(&-diag)?))
    }

    /// `(ℓ+h^vee)(h+m)u − C_{U1,U2}u`.
    pub fn kz_operator(&self, m: usize, u: &TensorVector) -> Result<TensorVector> {
        let diag = &self.shifted * (&self.h + Scalar::from_int(m as i64));
        Ok(u.scaled(&diag).sub(&self.tensor.pair_casimir(u)?))
    }

    fn inverse_block(&self, m: usize, w: &Scalar) -> Result<Option<(Vec<Pair>, ExactMatrix)>> {
        let key = (m, w.clone());
        if let Some(v) = self.inverses.lock().expect("inverse lock").get(&key) {
            return Ok(v.clone());
        }
        let (basis, op) = self.kz_operator_block(m, w)?;
        let inv = op.inverse()?.map(|i| (basis, i));
        self.inverses.lock().expect("inverse lock").insert(key, inv.clone());
        Ok(inv)
    }

    /// `Y_m(u1[k1] ⊗ u2[k2])`.
    pub fn y_basis(&self, m: usize, pair: Pair) -> Result<GradedVector> {
        if m >= self.built {
            return Err(Error::CutoffExceeded { needed: m, cutoff: self.built.saturating_sub(1) });
        }
        if let Some(v) = self.maps.lock().expect("maps lock").get(&(m, pair)) {
            return Ok(v.clone());
        }
        let v = match &self.target {
            PrefixTarget::Verma(module) => self.verma_y(module, m, pair)?,
            PrefixTarget::Contragredient(c) => self.contragredient_y(c, m, pair)?,
        };
        self.maps.lock().expect("maps lock").insert((m, pair), v.clone());
        Ok(v)
    }

    /// `Y_m(u)` for a tensor vector `u`.
    pub fn y(&self, m: usize, u: &TensorVector) -> Result<GradedVector> {
        u.map_linear(|&p| self.y_basis(m, p))
    }

    fn verma_y(&self, module: &GeneralizedVermaModule, m: usize, pair: Pair) -> Result<GradedVector> {
        if m == 0 {
            return Ok(module.embed(&self.seed.apply_basis(pair)?));
        }
        let w = self.tensor.weight_of(pair);
        let Some((basis, inv)) = self.inverse_block(m, &w)? else {
            return Err(Error::Obstructed { degree: m, weight: w.to_string() });
        };
        let col = basis.binary_search(&pair).map_err(|_| Error::WindowEscape(format!("{pair:?}")))?;
        let solved: TensorVector = basis.iter().enumerate().map(|(i, p)| (*p, inv[(i, col)].clone())).collect();
        self.kz_sum(m, &solved)
    }

    /// `Σ_a Σ_{k=1}^m x_a(−k) Y_{m−k}((x^a ⊗ 1) u)`.
    fn kz_sum(&self, m: usize, u: &TensorVector) -> Result<GradedVector> {
        let duals = self.tensor.first().algebra().dual_bases()?;
        let mut out = GradedVector::new();
        for (xa, xb) in duals.pairs() {
            let moved = self.tensor.act_first(xb, u)?;
            if moved.is_zero() {
                continue;
            }
            for k in 1..=m {
                let inner = self.y(m - k, &moved)?;
                if !inner.is_zero() {
                    out.add(&self.target.act(xa, -(k as i64), &inner)?);
                }
            }
        }
        Ok(out)
    }

    fn contragredient_y(&self, c: &ContragredientModule, m: usize, pair: Pair) -> Result<GradedVector> {
        let w = self.tensor.weight_of(pair);
        let u3 = self.seed.target();
        let mut out = GradedVector::new();
        if m == 0 {
            let image = self.seed.apply_basis(pair)?;
            for b in c.support(0, &w)? {
                let mut value = Scalar::zero();
                for (&k, coeff) in &image {
                    value += coeff * u3.dual_pairing(b.1, k)?;
                }
                out.add_term(b, value);
            }
            return Ok(out);
        }
        // <Y_m(u), g(−n) b> = −<Y_{m−n}(g·u1 ⊗ u2), b>
        let alg = self.tensor.first().algebra().clone();
        for b in c.support(m, &w)? {
            let (first, rest) = b.0.modes().split_first().expect("degree m > 0 has a leading mode");
            let rest_key = (PBWMonomial::from_modes(rest.to_vec())?, b.1);
            let moved = self.tensor.act_first(&alg.basis_element(first.gen), &TensorVector::basis(pair))?;
            let inner = self.y(m - first.depth as usize, &moved)?;
            out.add_term(b, -inner.coeff(&rest_key));
        }
        Ok(out)
    }

    fn materialize(&mut self) -> Result<()> {
        for m in 0..=self.requested {
            for w in self.window.clone() {
                for pair in self.tensor.block(&w)? {
                    match self.y_basis(m, pair) {
                        Ok(_) => {}
                        Err(Error::Obstructed { degree, weight }) => {
                            self.record_obstruction(degree, &weight)?;
                            return Ok(());
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(())
    }

    fn record_obstruction(&mut self, degree: usize, weight: &str) -> Result<()> {
        self.built = degree;
        self.maps.lock().expect("maps lock").retain(|(m, _), _| *m < degree);
        let mu = Scalar::from_int(2) * &self.shifted * (&self.h3 + Scalar::from_int(degree as i64));
        let mut blocks = Vec::new();
        let mut weights = self.window.clone();
        let w: Scalar = weight.parse()?;
        if !weights.contains(&w) {
            weights.push(w);
        }
        for w in weights {
            let basis = self.tensor.block(&w)?;
            if basis.is_empty() {
                continue;
            }
            let vectors: Vec<TensorVector> = self
                .tensor
                .casimir_block(&w)?
                .eigenspace(&mu)?
                .into_iter()
                .map(|v| basis.iter().cloned().zip(v).collect())
                .collect();
            if !vectors.is_empty() {
                blocks.push(EigenBlock { weight: w, vectors });
            }
        }
        self.obstruction = Some(ObstructionEntry { degree, eigenvalue: mu, eigenvectors: blocks });
        Ok(())
    }

    /// Adds `delta` to one coefficient of a stored map. Used to exercise the
    /// verifiers.
    pub fn perturb(&self, m: usize, pair: Pair, delta: &Scalar) -> Result<()> {
        let current = self.y_basis(m, pair)?;
        let key = current
            .keys()
            .next()
            .cloned()
            .ok_or_else(|| Error::Domain("cannot perturb a zero image".into()))?;
        let mut v = current;
        v.add_term(key, delta.clone());
        self.maps.lock().expect("maps lock").insert((m, pair), v);
        Ok(())
    }

    /// Whether every map of `other` is `c` times the corresponding map of
    /// `self` on the shared window and degrees.
    pub fn scaled_maps_equal(&self, other: &IntertwinerPrefix, c: &Scalar) -> Result<bool> {
        for m in 0..self.built.min(other.built) {
            for w in &self.window {
                for pair in self.tensor.block(w)? {
                    if self.y_basis(m, pair)?.scaled(c) != other.y_basis(m, pair)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        let mut degrees = Vec::new();
        for m in 0..self.built {
            let mut blocks = Vec::new();
            for w in &self.window {
                let mut images = Vec::new();
                for pair in self.tensor.block(w)? {
                    let v = self.y_basis(m, pair)?;
                    images.push(serde_json::json!({ "pair": [pair.0, pair.1], "image": self.target.vector_json(&v) }));
                }
                blocks.push(serde_json::json!({ "weight": w, "images": images }));
            }
            degrees.push(serde_json::json!({ "degree": m, "blocks": blocks }));
        }
        Ok(serde_json::json!({
            "level": self.level,
            "tensor": self.tensor.describe(),
            "target": self.target.describe(),
            "h": self.h,
            "h3": self.h3,
            "requested_degree": self.requested,
            "prefix_degrees": self.built,
            "obstruction": self.obstruction.as_ref().map(entry_json),
            "maps": degrees,
        }))
    }
}

/// Builds `Y_0 = f, Y_1, …, Y_N` into `V(ℓ,U3)` by the KZ recursion. On an
/// obstruction at degree `M <= N` the maps `Y_0..Y_{M−1}` are kept and the
/// obstruction is recorded.
pub fn build_prefix(f: &GHom, level: &Scalar, n: usize, window: Option<&[Scalar]>) -> Result<IntertwinerPrefix> {
    if !f.verify()? {
        return Err(Error::Domain("seed is not a g-module homomorphism".into()));
    }
    let module = GeneralizedVermaModule::new(f.target().clone(), level.clone(), n)?;
    let mut p = IntertwinerPrefix::new(f, level, n, window, PrefixTarget::Verma(Arc::new(module)))?;
    p.materialize()?;
    Ok(p)
}

/// Builds `Y_0..Y_N` into the contragredient `V(ℓ,U3*)'` by pairing against
/// `g(−n)w3`. Never obstructed.
pub fn build_prefix_contragredient(
    f: &GHom,
    level: &Scalar,
    n: usize,
    window: Option<&[Scalar]>,
) -> Result<IntertwinerPrefix> {
    if !f.verify()? {
        return Err(Error::Domain("seed is not a g-module homomorphism".into()));
    }
    let dual: WeightModule = f.target().dual()?;
    let dual = GeneralizedVermaModule::new(Arc::new(dual), level.clone(), n)?;
    let c = ContragredientModule::new(Arc::new(dual));
    let mut p = IntertwinerPrefix::new(f, level, n, window, PrefixTarget::Contragredient(Arc::new(c)))?;
    p.materialize()?;
    Ok(p)
}

fn available(p: &IntertwinerPrefix, m: usize, u: &TensorVector) -> Result<Option<GradedVector>> {
    match p.y(m, u) {
        Ok(v) => Ok(Some(v)),
        Err(Error::WindowEscape(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Checks `g(n) Y_m(u1⊗u2) = Y_{m−n}(g u1 ⊗ u2) + Y_m(u1 ⊗ g(n) u2)` for
/// every basis `g`, `0 <= n <= m` and every basis vector in the window.
pub fn verify_commcomp(p: &IntertwinerPrefix) -> Result<Verification> {
    let alg = p.tensor.first().algebra().clone();
    for m in 0..p.built {
        for w in &p.window {
            for pair in p.tensor.block(w)? {
                let u = TensorVector::basis(pair);
                let y = p.y_basis(m, pair)?;
                for a in 0..alg.dim() {
                    let g = alg.basis_element(a);
                    for n in 0..=m as i64 {
                        let lhs = p.target.act_mode(a, n, &y)?;
                        let mut rhs = match available(p, m - n as usize, &p.tensor.act_first(&g, &u)?)? {
                            Some(v) => v,
                            None => continue,
                        };
                        if n == 0 {
                            match available(p, m, &p.tensor.act_second(&g, &u)?)? {
                                Some(v) => rhs.add(&v),
                                None => continue,
                            }
                        }
                        if lhs != rhs {
                            return Ok(Verification {
                                holds: false,
                                counterexample: Some(Counterexample {
                                    generator: alg.basis_name(a).to_string(),
                                    n,
                                    m,
                                    pair,
                                }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(Verification::ok())
}

/// Checks `Y_m([(ℓ+h^vee)(h+m) − C_{U1,U2}] u) = Σ_a Σ_{k=1}^m x_a(−k)
/// Y_{m−k}((x^a ⊗ 1) u)` for all built degrees on the window.
pub fn kz_residual(p: &IntertwinerPrefix) -> Result<bool> {
    let duals = p.tensor.first().algebra().dual_bases()?;
    for m in 0..p.built {
        for w in &p.window {
            for pair in p.tensor.block(w)? {
                let u = TensorVector::basis(pair);
                let Some(lhs) = available(p, m, &p.kz_operator(m, &u)?)? else { continue };
                let mut rhs = GradedVector::new();
                let mut complete = true;
                for (xa, xb) in duals.pairs() {
                    let moved = p.tensor.act_first(xb, &u)?;
                    for k in 1..=m {
                        match available(p, m - k, &moved)? {
                            Some(inner) => rhs.add(&p.target.act(xa, -(k as i64), &inner)?),
                            None => complete = false,
                        }
                    }
                }
                if complete && lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
