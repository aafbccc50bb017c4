//! Finite-dimensional simple Lie algebras given by structure constants and an
//! invariant form, together with dual bases and the operator identities the
//! recursion relies on.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{ExactMatrix, Lin, Scalar};

/// Index of `e` in the built-in sl2 basis.
pub const E: usize = 0;
/// Index of `h` in the built-in sl2 basis.
pub const H: usize = 1;
/// Index of `f` in the built-in sl2 basis.
pub const F: usize = 2;

const SL2_FIXTURE: &str = include_str!("../fixtures/sl2.toml");

/// An element of the algebra in coordinates of its basis.
pub type Element = Lin<usize>;

/// On-disk description of an algebra (TOML or JSON).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlgebraConfig {
    pub name: String,
    pub basis: Vec<String>,
    pub dual_coxeter: Scalar,
    #[serde(default)]
    pub long_roots_square_length_two: bool,
    #[serde(default)]
    pub weights: Option<Vec<Scalar>>,
    pub structure_constants: Vec<(String, String, String, Scalar)>,
    pub gram: Vec<Vec<Scalar>>,
}

impl AlgebraConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn sl2() -> Self {
        Self::from_toml(SL2_FIXTURE).expect("embedded sl2 fixture parses")
    }
}

/// A Lie algebra with bracket, invariant form, dual Coxeter number and an
/// optional weight grading of its basis.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    basis: Vec<String>,
    brackets: Vec<Vec<Element>>,
    gram: ExactMatrix,
    dual_coxeter: Scalar,
    weights: Vec<Scalar>,
    long_roots_normalized: bool,
    standard_sl2: bool,
    config: AlgebraConfig,
}

impl LieAlgebra {
    /// Builds the algebra without validating it; see [`LieAlgebra::validate`].
    pub fn from_config(config: AlgebraConfig) -> Result<Self> {
        let n = config.basis.len();
        if n == 0 {
            return Err(Error::InvalidAlgebra("empty basis".into()));
        }
        let index: BTreeMap<&str, usize> =
            config.basis.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if index.len() != n {
            return Err(Error::InvalidAlgebra("duplicate basis names".into()));
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::InvalidAlgebra(format!("unknown basis element {s:?}")))
        };
        let mut given: BTreeMap<(usize, usize), Element> = BTreeMap::new();
        for (a, b, c, v) in &config.structure_constants {
            let key = (lookup(a)?, lookup(b)?);
            given.entry(key).or_default().add_term(lookup(c)?, v.clone());
        }
        let mut brackets = vec![vec![Element::new(); n]; n];
        for (&(a, b), value) in &given {
            brackets[a][b] = value.clone();
            if !given.contains_key(&(b, a)) {
                brackets[b][a] = value.scaled(&-Scalar::one());
            }
        }
        if config.gram.len() != n || config.gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidAlgebra("gram matrix must be dim x dim".into()));
        }
        let gram = ExactMatrix::from_rows(config.gram.clone())?;
        let weights = match &config.weights {
            Some(w) if w.len() == n => w.clone(),
            Some(_) => return Err(Error::InvalidAlgebra("weights length must equal dim".into())),
            None => vec![Scalar::zero(); n],
        };
        let mut alg = LieAlgebra {
            name: config.name.clone(),
            basis: config.basis.clone(),
            brackets,
            gram,
            dual_coxeter: config.dual_coxeter.clone(),
            weights,
            long_roots_normalized: config.long_roots_square_length_two,
            standard_sl2: false,
            config,
        };
        alg.standard_sl2 = alg.detect_standard_sl2();
        Ok(alg)
    }

    /// The built-in sl2 instance, shared.
    pub fn sl2() -> Arc<LieAlgebra> {
        static SL2: OnceLock<Arc<LieAlgebra>> = OnceLock::new();
        SL2.get_or_init(|| {
            let alg = LieAlgebra::from_config(AlgebraConfig::sl2()).expect("sl2 fixture");
            alg.validate().expect("sl2 fixture validates");
            Arc::new(alg)
        })
        .clone()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn basis_name(&self, a: usize) -> &str {
        &self.basis[a]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    pub fn dual_coxeter(&self) -> &Scalar {
        &self.dual_coxeter
    }

    pub fn gram(&self) -> &ExactMatrix {
        &self.gram
    }

    pub fn config(&self) -> &AlgebraConfig {
        &self.config
    }

    /// Weight of basis element `a` (sl2: units of alpha/2).
    pub fn weight(&self, a: usize) -> &Scalar {
        &self.weights[a]
    }

    pub fn long_roots_normalized(&self) -> bool {
        self.long_roots_normalized
    }

    pub fn basis_element(&self, a: usize) -> Element {
        Element::basis(a)
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> &Element {
        &self.brackets[a][b]
    }

    pub fn bracket(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::new();
        for (&a, ca) in x {
            for (&b, cb) in y {
                out.add_scaled(&self.brackets[a][b], &(ca * cb));
            }
        }
        out
    }

    pub fn form_basis(&self, a: usize, b: usize) -> &Scalar {
        &self.gram[(a, b)]
    }

    pub fn form(&self, x: &Element, y: &Element) -> Scalar {
        let mut s = Scalar::zero();
        for (&a, ca) in x {
            for (&b, cb) in y {
                let g = &self.gram[(a, b)];
                if !g.is_zero() {
                    s += ca * cb * g;
                }
            }
        }
        s
    }

    /// True if this is sl2 in the standard basis e, h, f with `<e,f> = 1`,
    /// `<h,h> = 2`.
    pub fn is_standard_sl2(&self) -> bool {
        self.standard_sl2
    }

    fn detect_standard_sl2(&self) -> bool {
        if self.dim() != 3 || self.dual_coxeter != Scalar::from_int(2) {
            return false;
        }
        let gram = ExactMatrix::from_ints(&[&[0, 0, 1], &[0, 2, 0], &[1, 0, 0]]);
        let expected = |a: usize, b: usize| -> Element {
            match (a, b) {
                (E, F) => Element::basis(H),
                (F, E) => Element::single(H, -Scalar::one()),
                (H, E) => Element::single(E, Scalar::from_int(2)),
                (E, H) => Element::single(E, Scalar::from_int(-2)),
                (H, F) => Element::single(F, Scalar::from_int(-2)),
                (F, H) => Element::single(F, Scalar::from_int(2)),
                _ => Element::new(),
            }
        };
        self.gram == gram && (0..3).all(|a| (0..3).all(|b| self.brackets[a][b] == expected(a, b)))
    }

    pub fn require_sl2(&self, context: &str) -> Result<()> {
        if self.is_standard_sl2() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{context} requires the standard sl2 algebra")))
        }
    }

    /// The dual bases `(x_a, x^a)` with `x_a` the given basis.
    pub fn dual_bases(&self) -> Result<DualBasisPair> {
        let basis: Vec<Element> = (0..self.dim()).map(Element::basis).collect();
        DualBasisPair::for_basis(self, basis)
    }

    /// Matrix of `ad(x)` in the algebra basis.
    pub fn ad_matrix(&self, x: &Element) -> ExactMatrix {
        let n = self.dim();
        let mut m = ExactMatrix::zeros(n, n);
        for b in 0..n {
            let col = self.bracket(x, &Element::basis(b));
            for (&c, v) in &col {
                m[(c, b)] = v.clone();
            }
        }
        m
    }

    /// Checks antisymmetry, Jacobi, symmetry/nondegeneracy/invariance of the
    /// form, the sl2 length normalization (when flagged), and that the Casimir
    /// acts on the adjoint module by `2 h^vee`.
    pub fn validate(&self) -> Result<ValidationReport> {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                let sum = {
                    let mut s = self.brackets[a][b].clone();
                    s.add(&self.brackets[b][a]);
                    s
                };
                if !sum.is_zero() {
                    return Err(Error::InvalidAlgebra(format!(
                        "bracket not antisymmetric on ({}, {})",
                        self.basis[a], self.basis[b]
                    )));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y, z) = (Element::basis(a), Element::basis(b), Element::basis(c));
                    let mut j = self.bracket(&x, &self.bracket(&y, &z));
                    j.add(&self.bracket(&y, &self.bracket(&z, &x)));
                    j.add(&self.bracket(&z, &self.bracket(&x, &y)));
                    if !j.is_zero() {
                        return Err(Error::InvalidAlgebra(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.basis[a], self.basis[b], self.basis[c]
                        )));
                    }
                }
            }
        }
        if self.gram != self.gram.transpose() {
            return Err(Error::InvalidAlgebra("form is not symmetric".into()));
        }
        if self.gram.determinant()?.is_zero() {
            return Err(Error::DegenerateForm);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y, z) = (Element::basis(a), Element::basis(b), Element::basis(c));
                    if self.form(&self.bracket(&x, &y), &z) != self.form(&x, &self.bracket(&y, &z)) {
                        return Err(Error::InvalidAlgebra(format!(
                            "form is not invariant on ({}, {}, {})",
                            self.basis[a], self.basis[b], self.basis[c]
                        )));
                    }
                }
            }
        }
        if self.long_roots_normalized && self.is_standard_sl2() && self.gram[(H, H)] != Scalar::from_int(2) {
            return Err(Error::InvalidAlgebra("<h,h> must be 2".into()));
        }
        let duals = self.dual_bases()?;
        let adjoint = AdjointRep(self);
        let cas = duals.casimir_matrix(self, &adjoint)?;
        let expected = ExactMatrix::identity(n).scale(&(Scalar::from_int(2) * &self.dual_coxeter));
        if cas != expected {
            return Err(Error::InvalidAlgebra(format!(
                "Casimir on the adjoint module is not 2*h^vee = {}",
                Scalar::from_int(2) * &self.dual_coxeter
            )));
        }
        Ok(ValidationReport {
            name: self.name.clone(),
            dim: n,
            dual_coxeter: self.dual_coxeter.clone(),
            antisymmetry: true,
            jacobi: true,
            form_symmetric: true,
            form_nondegenerate: true,
            form_invariant: true,
            adjoint_casimir: Scalar::from_int(2) * &self.dual_coxeter,
        })
    }
}

/// Outcome of a successful [`LieAlgebra::validate`].
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ValidationReport {
    pub name: String,
    pub dim: usize,
    pub dual_coxeter: Scalar,
    pub antisymmetry: bool,
    pub jacobi: bool,
    pub form_symmetric: bool,
    pub form_nondegenerate: bool,
    pub form_invariant: bool,
    pub adjoint_casimir: Scalar,
}

/// A finite-dimensional representation given by basis action matrices.
pub trait FiniteRepresentation {
    fn rep_dim(&self) -> usize;
    fn basis_action(&self, a: usize) -> Result<ExactMatrix>;

    fn element_action(&self, x: &Element) -> Result<ExactMatrix> {
        let n = self.rep_dim();
        let mut m = ExactMatrix::zeros(n, n);
        for (&a, c) in x {
            m = m.try_add(&self.basis_action(a)?.scale(c))?;
        }
        Ok(m)
    }
}

/// The adjoint representation of an algebra.
pub struct AdjointRep<'a>(pub &'a LieAlgebra);

impl FiniteRepresentation for AdjointRep<'_> {
    fn rep_dim(&self) -> usize {
        self.0.dim()
    }

    fn basis_action(&self, a: usize) -> Result<ExactMatrix> {
        Ok(self.0.ad_matrix(&Element::basis(a)))
    }
}

/// Ordered pairs `(x_a, x^a)` with `<x_a, x^b> = δ_ab`.
///
/// Every quadratic expression `Σ_i γ_i(..)γ_i(..)` over an orthonormal basis
/// equals `Σ_a x_a(..)x^a(..)` over any dual-basis pair; this form stays
/// rational for sl2.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBasisPair {
    pairs: Vec<(Element, Element)>,
}

impl DualBasisPair {
    /// Dual basis of an arbitrary basis `basis` of the algebra.
    pub fn for_basis(alg: &LieAlgebra, basis: Vec<Element>) -> Result<Self> {
        let n = alg.dim();
        if basis.len() != n {
            return Err(Error::DimensionMismatch("basis size differs from algebra dimension".into()));
        }
        // Gram matrix of the chosen basis; its inverse gives the dual basis.
        let mut g = ExactMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = alg.form(&basis[i], &basis[j]);
            }
        }
        let inv = g.inverse()?.ok_or(Error::DegenerateForm)?;
        let pairs = basis
            .iter()
            .enumerate()
            .map(|(a, xa)| {
                let mut dual = Element::new();
                for (b, xb) in basis.iter().enumerate() {
                    dual.add_scaled(xb, &inv[(b, a)]);
                }
                (xa.clone(), dual)
            })
            .collect();
        Ok(DualBasisPair { pairs })
    }

    pub fn pairs(&self) -> &[(Element, Element)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `<x_a, x^b>` for all `a, b`.
    pub fn pairing_matrix(&self, alg: &LieAlgebra) -> ExactMatrix {
        let n = self.pairs.len();
        let mut m = ExactMatrix::zeros(n, n);
        for (a, (xa, _)) in self.pairs.iter().enumerate() {
            for (b, (_, xb)) in self.pairs.iter().enumerate() {
                m[(a, b)] = alg.form(xa, xb);
            }
        }
        m
    }

    /// The Casimir element `Σ_a x_a x^a` as a formal sum of basis words
    /// `(i, j) -> coefficient` of `x_i x_j` in `U(g)`.
    pub fn casimir_words(&self) -> Lin<(usize, usize)> {
        let mut out = Lin::new();
        for (xa, xb) in &self.pairs {
            for (&i, ci) in xa {
                for (&j, cj) in xb {
                    out.add_term((i, j), ci * cj);
                }
            }
        }
        out
    }

    pub fn casimir_matrix(&self, _alg: &LieAlgebra, rep: &dyn FiniteRepresentation) -> Result<ExactMatrix> {
        let n = rep.rep_dim();
        let mut m = ExactMatrix::zeros(n, n);
        for (xa, xb) in &self.pairs {
            m = m.try_add(&rep.element_action(xa)?.try_mul(&rep.element_action(xb)?)?)?;
        }
        Ok(m)
    }

    /// `Σ_a ρ(x_a) ⊗ ρ(x^a)` on `U ⊗ U`.
    pub fn split_casimir_operator(&self, rep: &dyn FiniteRepresentation) -> Result<ExactMatrix> {
        let n = rep.rep_dim();
        let mut m = ExactMatrix::zeros(n * n, n * n);
        for (xa, xb) in &self.pairs {
            m = m.try_add(&rep.element_action(xa)?.kronecker(&rep.element_action(xb)?))?;
        }
        Ok(m)
    }
}

/// Checks `Σ_a [g,x_a] ⊗ x^a = -Σ_a x_a ⊗ [g,x^a]` as operators on `U ⊗ U`
/// for every probe `U`.
pub fn check_lemma1(alg: &LieAlgebra, g: &Element, probes: &[&dyn FiniteRepresentation]) -> Result<bool> {
    let duals = alg.dual_bases()?;
    for rep in probes {
        let n = rep.rep_dim();
        let mut lhs = ExactMatrix::zeros(n * n, n * n);
        let mut rhs = ExactMatrix::zeros(n * n, n * n);
        for (xa, xb) in duals.pairs() {
            let left = rep.element_action(&alg.bracket(g, xa))?;
            lhs = lhs.try_add(&left.kronecker(&rep.element_action(xb)?))?;
            let right = rep.element_action(&alg.bracket(g, xb))?;
            rhs = rhs.try_sub(&rep.element_action(xa)?.kronecker(&right))?;
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `Σ_a [g,x_a] x^a = h^vee g` as operators on every probe.
pub fn check_lemma2(alg: &LieAlgebra, g: &Element, probes: &[&dyn FiniteRepresentation]) -> Result<bool> {
    let duals = alg.dual_bases()?;
    for rep in probes {
        let n = rep.rep_dim();
        let mut lhs = ExactMatrix::zeros(n, n);
        for (xa, xb) in duals.pairs() {
            let m = rep.element_action(&alg.bracket(g, xa))?.try_mul(&rep.element_action(xb)?)?;
            lhs = lhs.try_add(&m)?;
        }
        if lhs != rep.element_action(g)?.scale(alg.dual_coxeter()) {
            return Ok(false);
        }
    }
    Ok(true)
}
