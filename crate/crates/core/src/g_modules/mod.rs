//! Weight modules for sl2 and for structure-constant algebras: finite
//! irreducibles `L_p`, highest-weight modules `L_λ`, dense modules
//! `E_{λ̄,δ}`, the trivial and adjoint modules, their tensor products and
//! hom spaces.

mod hom;
mod tensor;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{ExactMatrix, Lin, Scalar};
use crate::lie_core::{Element, FiniteRepresentation, LieAlgebra, E, F, H};

pub use hom::{hom_space, GHom, HomBlock};
pub use tensor::{dense_tensor_eigenvalues, eigenvalue_multiset, Summand, TensorModule, TensorVector};

/// A vector of a weight module in its label basis.
pub type ModVector = Lin<i64>;

/// Module types. Labels are `k = 0..=p` for `Finite`, `k >= 0` for
/// `HighestWeight` (vector `f^k v_λ`), `k ∈ Z` for `Dense` (vector of weight
/// `λ + 2k`), `0` for `Trivial` and the algebra basis index for `Adjoint`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModuleKind {
    Trivial,
    Adjoint,
    Finite { p: u32 },
    HighestWeight { lambda: Scalar },
    Dense { lambda: Scalar, delta: Scalar },
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleKind::Trivial => write!(f, "trivial"),
            ModuleKind::Adjoint => write!(f, "adjoint"),
            ModuleKind::Finite { p } => write!(f, "finite:{p}"),
            ModuleKind::HighestWeight { lambda } => write!(f, "hw:{lambda}"),
            ModuleKind::Dense { lambda, delta } => write!(f, "dense:{lambda},{delta}"),
        }
    }
}

impl FromStr for ModuleKind {
    type Err = Error;

    /// Parses `trivial`, `adjoint`, `finite:p`, `hw:λ`, `dense:λ,δ`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "trivial" => Ok(ModuleKind::Trivial),
            "adjoint" => Ok(ModuleKind::Adjoint),
            "finite" => rest
                .trim()
                .parse()
                .map(|p| ModuleKind::Finite { p })
                .map_err(|_| Error::Parse(format!("bad finite module parameter {rest:?}"))),
            "hw" => Ok(ModuleKind::HighestWeight { lambda: rest.parse()? }),
            "dense" => {
                let (l, d) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("dense module needs λ,δ: {rest:?}")))?;
                Ok(ModuleKind::Dense { lambda: l.parse()?, delta: d.parse()? })
            }
            _ => Err(Error::Parse(format!("unknown module kind {s:?}"))),
        }
    }
}

/// `½(δ − ½μ(μ−2))`, the value of `ef` on the weight-`μ` vector of a dense module.
pub fn dense_ef(delta: &Scalar, mu: &Scalar) -> Scalar {
    let half = Scalar::frac(1, 2);
    &half * (delta - &half * mu * (mu - Scalar::from_int(2)))
}

/// A weight module with exact action. Infinite-dimensional kinds may carry a
/// label window; actions leaving it raise [`Error::WindowEscape`].
#[derive(Clone, Debug)]
pub struct WeightModule {
    alg: Arc<LieAlgebra>,
    kind: ModuleKind,
    window: Option<(i64, i64)>,
}

impl PartialEq for WeightModule {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.window == other.window
            && self.alg.config() == other.alg.config()
    }
}

impl WeightModule {
    pub fn new(alg: Arc<LieAlgebra>, kind: ModuleKind) -> Result<Self> {
        match &kind {
            ModuleKind::Trivial | ModuleKind::Adjoint => {}
            ModuleKind::Finite { .. } => alg.require_sl2("finite irreducible modules")?,
            ModuleKind::HighestWeight { lambda } => {
                alg.require_sl2("highest-weight modules")?;
                if lambda.is_natural() {
                    return Err(Error::Domain(format!(
                        "highest weight {lambda} is a natural number; use finite:{lambda}"
                    )));
                }
            }
            ModuleKind::Dense { lambda, delta } => {
                alg.require_sl2("dense modules")?;
                if let Some(mu) = dense_extremal_weight(lambda, delta)? {
                    return Err(Error::Domain(format!(
                        "E[{lambda},{delta}] has an extremal weight vector at weight {mu}"
                    )));
                }
            }
        }
        Ok(WeightModule { alg, kind, window: None })
    }

    pub fn trivial(alg: Arc<LieAlgebra>) -> Self {
        WeightModule { alg, kind: ModuleKind::Trivial, window: None }
    }

    pub fn adjoint(alg: Arc<LieAlgebra>) -> Self {
        WeightModule { alg, kind: ModuleKind::Adjoint, window: None }
    }

    pub fn finite(p: u32) -> Self {
        WeightModule { alg: LieAlgebra::sl2(), kind: ModuleKind::Finite { p }, window: None }
    }

    pub fn highest_weight(lambda: Scalar) -> Result<Self> {
        Self::new(LieAlgebra::sl2(), ModuleKind::HighestWeight { lambda })
    }

    pub fn dense(lambda: Scalar, delta: Scalar) -> Result<Self> {
        Self::new(LieAlgebra::sl2(), ModuleKind::Dense { lambda, delta })
    }

    /// An sl2 module from a descriptor such as `hw:-3/2`.
    pub fn parse_sl2(descriptor: &str) -> Result<Self> {
        Self::new(LieAlgebra::sl2(), descriptor.parse()?)
    }

    /// Restricts an infinite-dimensional module to labels `lo..=hi`.
    pub fn with_window(mut self, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty window {lo}..={hi}")));
        }
        if self.is_finite_dimensional() {
            return Err(Error::Unsupported("windows apply to infinite-dimensional modules only".into()));
        }
        self.window = Some((lo, hi));
        Ok(self)
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.alg
    }

    pub fn kind(&self) -> &ModuleKind {
        &self.kind
    }

    pub fn window(&self) -> Option<(i64, i64)> {
        self.window
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            ModuleKind::Trivial => Some(1),
            ModuleKind::Adjoint => Some(self.alg.dim()),
            ModuleKind::Finite { p } => Some(*p as usize + 1),
            _ => None,
        }
    }

    pub fn is_finite_dimensional(&self) -> bool {
        self.dim().is_some()
    }

    /// `p` if this is the finite sl2 irreducible `L_p` (the trivial and
    /// adjoint sl2 modules count as `L_0` and `L_2`).
    pub fn sl2_finite_param(&self) -> Option<u32> {
        match &self.kind {
            ModuleKind::Finite { p } => Some(*p),
            ModuleKind::Trivial => Some(0),
            ModuleKind::Adjoint if self.alg.is_standard_sl2() => Some(2),
            _ => None,
        }
    }

    /// Highest weight for `L_p`, `L_λ` (in units of `α/2`).
    pub fn highest_weight_value(&self) -> Option<Scalar> {
        match &self.kind {
            ModuleKind::HighestWeight { lambda } => Some(lambda.clone()),
            _ => self.sl2_finite_param().map(|p| Scalar::from_int(p as i64)),
        }
    }

    fn in_support(&self, k: i64) -> bool {
        match &self.kind {
            ModuleKind::Trivial => k == 0,
            ModuleKind::Adjoint => k >= 0 && (k as usize) < self.alg.dim(),
            ModuleKind::Finite { p } => (0..=*p as i64).contains(&k),
            ModuleKind::HighestWeight { .. } => k >= 0,
            ModuleKind::Dense { .. } => true,
        }
    }

    pub fn contains(&self, k: i64) -> bool {
        self.in_support(k) && self.window.is_none_or(|(lo, hi)| (lo..=hi).contains(&k))
    }

    /// All labels, when the module or its window is finite.
    pub fn labels(&self) -> Option<Vec<i64>> {
        match (self.dim(), self.window) {
            (Some(n), _) => Some((0..n as i64).collect()),
            (None, Some((lo, hi))) => Some((lo..=hi).filter(|&k| self.in_support(k)).collect()),
            (None, None) => None,
        }
    }

    pub fn weight_of(&self, k: i64) -> Scalar {
        match &self.kind {
            ModuleKind::Trivial => Scalar::zero(),
            ModuleKind::Adjoint => self.alg.weight(k as usize).clone(),
            ModuleKind::Finite { p } => Scalar::from_int(*p as i64 - 2 * k),
            ModuleKind::HighestWeight { lambda } => lambda - Scalar::from_int(2 * k),
            ModuleKind::Dense { lambda, .. } => lambda + Scalar::from_int(2 * k),
        }
    }

    /// Labels of the weight-`w` space in increasing order.
    pub fn labels_of_weight(&self, w: &Scalar) -> Vec<i64> {
        let from_offset = |x: Scalar| -> Option<i64> {
            (x * Scalar::frac(1, 2)).to_i64()
        };
        let found = match &self.kind {
            ModuleKind::Trivial => {
                if w.is_zero() {
                    vec![0]
                } else {
                    vec![]
                }
            }
            ModuleKind::Adjoint => {
                return (0..self.alg.dim() as i64).filter(|&k| self.alg.weight(k as usize) == w).collect();
            }
            ModuleKind::Finite { p } => from_offset(Scalar::from_int(*p as i64) - w).into_iter().collect(),
            ModuleKind::HighestWeight { lambda } => from_offset(lambda - w).into_iter().collect(),
            ModuleKind::Dense { lambda, .. } => from_offset(w - lambda).into_iter().collect(),
        };
        found.into_iter().filter(|&k| self.contains(k)).collect()
    }

    fn check_label(&self, k: i64) -> Result<()> {
        if self.contains(k) {
            Ok(())
        } else {
            Err(Error::WindowEscape(format!("label {k} is outside {}", self.describe())))
        }
    }

    /// Action of the basis element `a` on the basis vector `k`, without the
    /// window check on the image.
    fn raw_act_basis(&self, a: usize, k: i64) -> ModVector {
        match &self.kind {
            ModuleKind::Trivial => ModVector::new(),
            ModuleKind::Adjoint => self
                .alg
                .bracket_basis(a, k as usize)
                .iter()
                .map(|(&c, v)| (c as i64, v.clone()))
                .collect(),
            ModuleKind::Finite { p } => {
                let lambda = Scalar::from_int(*p as i64);
                match a {
                    F if k == *p as i64 => ModVector::new(),
                    _ => hw_action(&lambda, a, k),
                }
            }
            ModuleKind::HighestWeight { lambda } => hw_action(lambda, a, k),
            ModuleKind::Dense { lambda, delta } => {
                let mu = lambda + Scalar::from_int(2 * k);
                match a {
                    E => ModVector::basis(k + 1),
                    H => ModVector::single(k, mu),
                    F => ModVector::single(k - 1, dense_ef(delta, &mu)),
                    _ => unreachable!("sl2 has three basis elements"),
                }
            }
        }
    }

    pub fn act_basis(&self, a: usize, k: i64) -> Result<ModVector> {
        self.check_label(k)?;
        let out = self.raw_act_basis(a, k);
        for &j in out.keys() {
            if !self.contains(j) {
                return Err(Error::WindowEscape(format!(
                    "{}·v[{k}] reaches label {j} outside {}",
                    self.alg.basis_name(a),
                    self.describe()
                )));
            }
        }
        Ok(out)
    }

    pub fn act(&self, x: &Element, v: &ModVector) -> Result<ModVector> {
        let mut out = ModVector::new();
        for (&a, ca) in x {
            for (&k, ck) in v {
                out.add_scaled(&self.act_basis(a, k)?, &(ca * ck));
            }
        }
        Ok(out)
    }

    /// True if some basis action on `v[k]` leaves the window (boundary of a
    /// truncation).
    pub fn is_boundary(&self, k: i64) -> bool {
        (0..self.alg.dim()).any(|a| self.raw_act_basis(a, k).keys().any(|&j| !self.contains(j)))
    }

    /// The scalar by which the Casimir `Σ x_a x^a` acts.
    pub fn casimir_scalar(&self) -> Scalar {
        match &self.kind {
            ModuleKind::Trivial => Scalar::zero(),
            ModuleKind::Adjoint => Scalar::from_int(2) * self.alg.dual_coxeter(),
            ModuleKind::Finite { p } => {
                let s = Scalar::from_int(*p as i64);
                &s * (&s + Scalar::from_int(2)) * Scalar::frac(1, 2)
            }
            ModuleKind::HighestWeight { lambda } => {
                lambda * (lambda + Scalar::from_int(2)) * Scalar::frac(1, 2)
            }
            ModuleKind::Dense { delta, .. } => delta.clone(),
        }
    }

    /// `Σ_a x_a x^a v` computed from the action maps.
    pub fn casimir_on(&self, v: &ModVector) -> Result<ModVector> {
        let duals = self.alg.dual_bases()?;
        let mut out = ModVector::new();
        for (xa, xb) in duals.pairs() {
            out.add(&self.act(xa, &self.act(xb, v)?)?);
        }
        Ok(out)
    }

    /// Casimir matrix on the weight-`w` space.
    pub fn casimir_block(&self, w: &Scalar) -> Result<ExactMatrix> {
        let labels = self.labels_of_weight(w);
        operator_block(&labels, |k| self.casimir_on(&ModVector::basis(k)))
    }

    /// Matrix of the basis element `a` from the weight-`w` space to the
    /// weight-`(w + wt a)` space.
    pub fn action_block(&self, a: usize, w: &Scalar) -> Result<(Vec<i64>, Vec<i64>, ExactMatrix)> {
        let dom = self.labels_of_weight(w);
        let cod = self.labels_of_weight(&(w + self.alg.weight(a)));
        let mut m = ExactMatrix::zeros(cod.len(), dom.len());
        for (j, &k) in dom.iter().enumerate() {
            let img = self.act_basis(a, k)?;
            for (&l, c) in &img {
                let i = cod.iter().position(|&x| x == l).ok_or_else(|| {
                    Error::InvalidAlgebra(format!("action of {} is not weight-homogeneous", self.alg.basis_name(a)))
                })?;
                m[(i, j)] = c.clone();
            }
        }
        Ok((dom, cod, m))
    }

    /// The dual module `U*`, realized so that [`WeightModule::dual_pairing`]
    /// is invariant.
    pub fn dual(&self) -> Result<WeightModule> {
        match &self.kind {
            ModuleKind::Trivial | ModuleKind::Adjoint | ModuleKind::Finite { .. } => Ok(self.clone()),
            _ => Err(Error::Unsupported(format!("dual of {} is not a module of the same family", self.describe()))),
        }
    }

    /// The invariant pairing `<u*, u>` between `U*` (label `dual_label`) and
    /// `U` (label `label`): `<x·u*, u> = −<u*, x·u>`.
    pub fn dual_pairing(&self, dual_label: i64, label: i64) -> Result<Scalar> {
        match &self.kind {
            ModuleKind::Trivial => Ok(Scalar::from_int((dual_label == 0 && label == 0) as i64)),
            ModuleKind::Adjoint => Ok(self.alg.form_basis(dual_label as usize, label as usize).clone()),
            ModuleKind::Finite { p } => {
                let p = *p as i64;
                if dual_label + label == p && (0..=p).contains(&label) {
                    Ok(Scalar::from_int(if dual_label % 2 == 0 { 1 } else { -1 }))
                } else {
                    Ok(Scalar::zero())
                }
            }
            _ => Err(Error::Unsupported(format!("no dual pairing for {}", self.describe()))),
        }
    }

    /// Diagonal value `(v_k, v_k)` of the contravariant form with
    /// `(x·u, u') = (u, σ(x)·u')`, `σ: e ↔ f, h ↦ h`. The form is diagonal in
    /// the label basis.
    pub fn contravariant_norm(&self, k: i64) -> Result<Scalar> {
        self.check_label(k)?;
        match &self.kind {
            ModuleKind::Trivial => Ok(Scalar::one()),
            ModuleKind::Finite { p } => Ok(hw_norm(&Scalar::from_int(*p as i64), k)),
            ModuleKind::HighestWeight { lambda } => Ok(hw_norm(lambda, k)),
            ModuleKind::Dense { lambda, delta } => {
                let mut n = Scalar::one();
                if k > 0 {
                    for j in 1..=k {
                        n = n * dense_ef(delta, &(lambda + Scalar::from_int(2 * j)));
                    }
                } else {
                    for j in (k + 1)..=0 {
                        n = n / dense_ef(delta, &(lambda + Scalar::from_int(2 * j)));
                    }
                }
                Ok(n)
            }
            ModuleKind::Adjoint => {
                Err(Error::Unsupported("contravariant form on the adjoint module of a general algebra".into()))
            }
        }
    }

    /// Short descriptor, e.g. `finite:2`, `hw:-3/2`.
    pub fn describe(&self) -> String {
        match self.window {
            None => self.kind.to_string(),
            Some((lo, hi)) => format!("{}[{lo}..={hi}]", self.kind),
        }
    }

    /// Action matrices of every basis element on the weight spaces in
    /// `weights`, as JSON for inspection.
    pub fn to_json(&self, weights: &[Scalar]) -> Result<serde_json::Value> {
        let mut blocks = Vec::new();
        for w in weights {
            for a in 0..self.alg.dim() {
                let (dom, cod, m) = self.action_block(a, w)?;
                blocks.push(serde_json::json!({
                    "generator": self.alg.basis_name(a),
                    "weight": w,
                    "domain": dom,
                    "codomain": cod,
                    "matrix": m.to_rows(),
                }));
            }
        }
        Ok(serde_json::json!({ "module": self.describe(), "blocks": blocks }))
    }
}

impl FiniteRepresentation for WeightModule {
    fn rep_dim(&self) -> usize {
        self.labels().map_or(0, |l| l.len())
    }

    fn basis_action(&self, a: usize) -> Result<ExactMatrix> {
        let labels = self
            .labels()
            .ok_or_else(|| Error::Unsupported(format!("{} is not finite-dimensional", self.describe())))?;
        let mut m = ExactMatrix::zeros(labels.len(), labels.len());
        for (j, &k) in labels.iter().enumerate() {
            for (l, c) in &self.act_basis(a, k)? {
                let i = labels.binary_search(l).expect("finite module is closed under the action");
                m[(i, j)] = c.clone();
            }
        }
        Ok(m)
    }
}

fn hw_action(lambda: &Scalar, a: usize, k: i64) -> ModVector {
    match a {
        E if k == 0 => ModVector::new(),
        E => ModVector::single(k - 1, Scalar::from_int(k) * (lambda - Scalar::from_int(k - 1))),
        H => ModVector::single(k, lambda - Scalar::from_int(2 * k)),
        F => ModVector::basis(k + 1),
        _ => unreachable!("sl2 has three basis elements"),
    }
}

fn hw_norm(lambda: &Scalar, k: i64) -> Scalar {
    (1..=k).map(|i| Scalar::from_int(i) * (lambda - Scalar::from_int(i - 1))).product()
}

/// A weight `μ = λ + 2j` of the coset with `δ = ½μ(μ−2)`, if one exists.
pub fn dense_extremal_weight(lambda: &Scalar, delta: &Scalar) -> Result<Option<Scalar>> {
    // δ = ½μ(μ−2)  ⇔  μ = 1 ± sqrt(1 + 2δ)
    let disc = Scalar::one() + Scalar::from_int(2) * delta;
    let root = disc.sqrt()?;
    for mu in [Scalar::one() + &root, Scalar::one() - &root] {
        if let Ok(diff) = mu.try_sub(lambda) {
            if (diff * Scalar::frac(1, 2)).to_integer().is_some() {
                return Ok(Some(mu));
            }
        }
    }
    Ok(None)
}

/// Matrix of a linear operator on the span of `labels` (which must be
/// invariant).
pub(crate) fn operator_block<K: Ord + Clone>(
    labels: &[K],
    mut op: impl FnMut(K) -> Result<Lin<K>>,
) -> Result<ExactMatrix> {
    let n = labels.len();
    let mut m = ExactMatrix::zeros(n, n);
    for (j, k) in labels.iter().enumerate() {
        let img = op(k.clone())?;
        for (l, c) in &img {
            let i = labels
                .binary_search(l)
                .map_err(|_| Error::DimensionMismatch("operator leaves the block".into()))?;
            m[(i, j)] = c.clone();
        }
    }
    Ok(m)
}
