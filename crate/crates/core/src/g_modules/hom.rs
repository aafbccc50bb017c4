use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::{ModVector, TensorModule, TensorVector, WeightModule};
use crate::error::{Error, Result};
use crate::exact_arith::{ExactMatrix, Lin, Scalar};
use crate::lie_core::Element;

/// Extra root steps used to confirm that a windowed hom space has stabilized.
const STABILITY_STEPS: usize = 4;

/// Default window depth for infinite-dimensional tensor products.
const DEFAULT_RADIUS: usize = 3;

/// The matrix of a hom on one weight space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomBlock {
    pub weight: Scalar,
    pub domain: Vec<(i64, i64)>,
    pub codomain: Vec<i64>,
    pub matrix: ExactMatrix,
}

/// A 𝔤-homomorphism `U1 ⊗ U2 → U3`, stored on a window of weight spaces.
#[derive(Clone, Debug)]
pub struct GHom {
    tensor: Arc<TensorModule>,
    target: Arc<WeightModule>,
    blocks: BTreeMap<Scalar, HomBlock>,
}

impl PartialEq for GHom {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }
}

struct Layout {
    blocks: Vec<HomBlock>,
    offsets: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(tensor: &TensorModule, target: &WeightModule, window: &[Scalar]) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut offsets = Vec::new();
        let mut total = 0;
        for w in window {
            let domain = tensor.block(w)?;
            let codomain = target.labels_of_weight(w);
            offsets.push(total);
            total += domain.len() * codomain.len();
            blocks.push(HomBlock {
                weight: w.clone(),
                matrix: ExactMatrix::zeros(codomain.len(), domain.len()),
                domain,
                codomain,
            });
        }
        Ok(Layout { blocks, offsets, total })
    }

    fn index_of(&self, w: &Scalar) -> Option<usize> {
        self.blocks.iter().position(|b| &b.weight == w)
    }

    fn var(&self, block: usize, row: usize, col: usize) -> usize {
        self.offsets[block] + row * self.blocks[block].domain.len() + col
    }

    fn fill(&self, solution: &[Scalar]) -> Vec<HomBlock> {
        let mut out = self.blocks.clone();
        for (b, block) in out.iter_mut().enumerate() {
            for i in 0..block.codomain.len() {
                for j in 0..block.domain.len() {
                    block.matrix[(i, j)] = solution[self.var(b, i, j)].clone();
                }
            }
        }
        out
    }
}

/// Kernel of the intertwining equations on `window`, as lists of blocks.
fn solve_window(tensor: &TensorModule, target: &WeightModule, window: &[Scalar]) -> Result<(Layout, Vec<Vec<Scalar>>)> {
    let alg = tensor.first().algebra().clone();
    let layout = Layout::new(tensor, target, window)?;
    let mut rows: Vec<Lin<usize>> = Vec::new();

    for (b, block) in layout.blocks.iter().enumerate() {
        let w = &block.weight;
        for a in 0..alg.dim() {
            let x = Element::basis(a);
            let shifted = w + alg.weight(a);
            let next = layout.index_of(&shifted);
            let next_domain = match next {
                Some(_) => None,
                None => Some(tensor.block(&shifted)?),
            };
            if matches!(&next_domain, Some(d) if !d.is_empty()) {
                continue;
            }
            let cod = target.labels_of_weight(&shifted);
            for (col, &pair) in block.domain.iter().enumerate() {
                // F(Δx t) − x F(t) = 0, one equation per target basis vector
                let image = tensor.act(&x, &TensorVector::basis(pair))?;
                let mut eqs: BTreeMap<i64, Lin<usize>> = cod.iter().map(|&j| (j, Lin::new())).collect();
                if let Some(nb) = next {
                    let nblock = &layout.blocks[nb];
                    for (p, c) in &image {
                        let pc = nblock.domain.binary_search(p).map_err(|_| {
                            Error::DimensionMismatch("tensor action left its weight block".into())
                        })?;
                        for (r, j) in nblock.codomain.iter().enumerate() {
                            eqs.get_mut(j).expect("codomain labels").add_term(layout.var(nb, r, pc), c.clone());
                        }
                    }
                }
                for (r, &k) in block.codomain.iter().enumerate() {
                    for (j, c) in &target.act_basis(a, k)? {
                        let eq = eqs.get_mut(j).ok_or_else(|| {
                            Error::DimensionMismatch("target action left its weight space".into())
                        })?;
                        eq.add_term(layout.var(b, r, col), -c.clone());
                    }
                }
                rows.extend(eqs.into_values().filter(|e| !e.is_zero()));
            }
        }
        // C_{U3} F = F C_{U1⊗U2}
        let ct = target.casimir_block(w)?;
        let cs = tensor.casimir_block(w)?;
        for i in 0..block.codomain.len() {
            for j in 0..block.domain.len() {
                let mut eq = Lin::new();
                for r in 0..block.codomain.len() {
                    eq.add_term(layout.var(b, r, j), ct[(i, r)].clone());
                }
                for c in 0..block.domain.len() {
                    eq.add_term(layout.var(b, i, c), -cs[(c, j)].clone());
                }
                if !eq.is_zero() {
                    rows.push(eq);
                }
            }
        }
    }

    let mut m = ExactMatrix::zeros(rows.len(), layout.total);
    for (i, row) in rows.iter().enumerate() {
        for (&j, c) in row {
            m[(i, j)] = c.clone();
        }
    }
    let kernel = if layout.total == 0 { Vec::new() } else { m.kernel() };
    Ok((layout, kernel))
}

/// A basis of `Hom_𝔤(U1 ⊗ U2, U3)`, materialized on `window` (all weights for
/// finite-dimensional tensors, a default window otherwise).
///
/// For infinite-dimensional tensors the computation is repeated on a wider
/// window; if the dimensions disagree or the restriction is not bijective the
/// window does not determine the maps and [`Error::UnderDetermined`] is
/// returned.
pub fn hom_space(tensor: &Arc<TensorModule>, target: &Arc<WeightModule>, window: Option<&[Scalar]>) -> Result<Vec<GHom>> {
    let window = match window {
        Some(w) => dedup_weights(w),
        None => tensor.default_window(DEFAULT_RADIUS)?,
    };
    let (layout, kernel) = solve_window(tensor, target, &window)?;
    if !tensor.is_finite_dimensional() {
        let wide = tensor.enlarge_window(&window, STABILITY_STEPS)?;
        let (wide_layout, wide_kernel) = solve_window(tensor, target, &wide)?;
        if wide_kernel.len() != kernel.len() {
            return Err(Error::UnderDetermined(format!(
                "dimension {} on {} weights but {} on {} weights",
                kernel.len(),
                window.len(),
                wide_kernel.len(),
                wide.len()
            )));
        }
        let restricted: Vec<Vec<Scalar>> = wide_kernel.iter().map(|v| restrict(&wide_layout, &layout, v)).collect();
        if !restricted.is_empty() && ExactMatrix::from_rows(restricted)?.rank() != kernel.len() {
            return Err(Error::UnderDetermined("restriction to the window is not injective".into()));
        }
    }
    Ok(kernel
        .iter()
        .map(|v| GHom {
            tensor: tensor.clone(),
            target: target.clone(),
            blocks: layout.fill(v).into_iter().map(|b| (b.weight.clone(), b)).collect(),
        })
        .collect())
}

fn dedup_weights(w: &[Scalar]) -> Vec<Scalar> {
    let mut out = w.to_vec();
    out.sort();
    out.dedup();
    out.reverse();
    out
}

fn restrict(from: &Layout, to: &Layout, v: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); to.total];
    for (b, block) in to.blocks.iter().enumerate() {
        let fb = from.index_of(&block.weight).expect("wide window contains the window");
        for i in 0..block.codomain.len() {
            for j in 0..block.domain.len() {
                out[to.var(b, i, j)] = v[from.var(fb, i, j)].clone();
            }
        }
    }
    out
}

impl GHom {
    pub fn tensor(&self) -> &Arc<TensorModule> {
        &self.tensor
    }

    pub fn target(&self) -> &Arc<WeightModule> {
        &self.target
    }

    pub fn blocks(&self) -> impl Iterator<Item = &HomBlock> {
        self.blocks.values()
    }

    pub fn weights(&self) -> Vec<Scalar> {
        self.blocks.keys().rev().cloned().collect()
    }

    pub fn covers(&self, w: &Scalar) -> bool {
        self.blocks.contains_key(w)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|b| b.matrix.is_zero())
    }

    pub fn apply_basis(&self, pair: (i64, i64)) -> Result<ModVector> {
        let w = self.tensor.weight_of(pair);
        let block = self
            .blocks
            .get(&w)
            .ok_or_else(|| Error::WindowEscape(format!("hom is not materialized at weight {w}")))?;
        let col = block
            .domain
            .binary_search(&pair)
            .map_err(|_| Error::WindowEscape(format!("{pair:?} is not in the tensor window")))?;
        Ok(block
            .codomain
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, block.matrix[(i, col)].clone()))
            .collect())
    }

    pub fn apply(&self, v: &TensorVector) -> Result<ModVector> {
        v.map_linear(|&p| self.apply_basis(p))
    }

    pub fn scaled(&self, c: &Scalar) -> GHom {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            b.matrix = b.matrix.scale(c);
        }
        out
    }

    /// `self + other` on the common window.
    pub fn try_add(&self, other: &GHom) -> Result<GHom> {
        if self.blocks.keys().ne(other.blocks.keys()) {
            return Err(Error::DimensionMismatch("homs live on different windows".into()));
        }
        let mut out = self.clone();
        for (w, b) in out.blocks.iter_mut() {
            b.matrix = b.matrix.try_add(&other.blocks[w].matrix)?;
        }
        Ok(out)
    }

    /// The same hom materialized on `self`'s window together with `extra`.
    pub fn extend(&self, extra: &[Scalar]) -> Result<GHom> {
        if extra.iter().all(|w| self.covers(w)) {
            return Ok(self.clone());
        }
        let mut window = self.weights();
        window.extend(extra.iter().cloned());
        let basis = hom_space(&self.tensor, &self.target, Some(&window))?;
        // Find the combination restricting to self on the old window.
        let old: Vec<&Scalar> = self.blocks.keys().collect();
        let flatten = |h: &GHom| -> Vec<Scalar> {
            old.iter()
                .flat_map(|w| {
                    let m = &h.blocks[*w].matrix;
                    (0..m.rows()).flat_map(move |i| (0..m.cols()).map(move |j| m[(i, j)].clone()))
                })
                .collect()
        };
        let target = flatten(self);
        let cols: Vec<Vec<Scalar>> = basis.iter().map(flatten).collect();
        let sol = if cols.is_empty() {
            None
        } else {
            ExactMatrix::from_columns(&cols, target.len())?.solve_linear(&target)?.particular
        };
        let coeffs = match sol {
            Some(c) => c,
            None if self.is_zero() => vec![Scalar::zero(); basis.len()],
            None => return Err(Error::UnderDetermined("hom does not extend to the wider window".into())),
        };
        let mut out = GHom {
            tensor: self.tensor.clone(),
            target: self.target.clone(),
            blocks: Layout::new(&self.tensor, &self.target, &dedup_weights(&window))?
                .blocks
                .into_iter()
                .map(|b| (b.weight.clone(), b))
                .collect(),
        };
        for (h, c) in basis.iter().zip(&coeffs) {
            out = out.try_add(&h.scaled(c))?;
        }
        Ok(out)
    }

    /// Checks `F(Δx t) = x F(t)` for every basis element `x` and every basis
    /// vector `t` whose image weight space is materialized (or empty).
    pub fn verify(&self) -> Result<bool> {
        let alg = self.tensor.first().algebra();
        for block in self.blocks.values() {
            for a in 0..alg.dim() {
                let x = Element::basis(a);
                let shifted = &block.weight + alg.weight(a);
                if !self.covers(&shifted) && !self.tensor.block(&shifted)?.is_empty() {
                    continue;
                }
                for &pair in &block.domain {
                    let t = TensorVector::basis(pair);
                    let lhs = self.apply(&self.tensor.act(&x, &t)?)?;
                    let rhs = self.target.act(&x, &self.apply(&t)?)?;
                    if lhs != rhs {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "domain": self.tensor.describe(),
            "codomain": self.target.describe(),
            "blocks": self.blocks.values().rev().collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::q;
    use crate::lie_core::LieAlgebra;

    fn homs(u1: WeightModule, u2: WeightModule, u3: WeightModule) -> Result<Vec<GHom>> {
        hom_space(&Arc::new(TensorModule::of(u1, u2)?), &Arc::new(u3), None)
    }

    #[test]
    fn clebsch_gordan_dimensions() {
        assert_eq!(homs(WeightModule::finite(2), WeightModule::finite(3), WeightModule::finite(1)).unwrap().len(), 1);
        assert_eq!(homs(WeightModule::finite(1), WeightModule::finite(1), WeightModule::finite(3)).unwrap().len(), 0);
        for p in 0..4u32 {
            for q in 0..4u32 {
                for r in 0..8u32 {
                    let expected = (r + 2 * p.min(q) >= p + q && r <= p + q && (p + q - r) % 2 == 0) as usize;
                    let d = homs(WeightModule::finite(p), WeightModule::finite(q), WeightModule::finite(r)).unwrap();
                    assert_eq!(d.len(), expected, "p={p} q={q} r={r}");
                    for f in &d {
                        assert!(f.verify().unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn invariant_form_on_adjoint() {
        let alg = LieAlgebra::sl2();
        let d = homs(WeightModule::adjoint(alg.clone()), WeightModule::adjoint(alg.clone()), WeightModule::trivial(alg))
            .unwrap();
        assert_eq!(d.len(), 1);
        let f = &d[0];
        // proportional to the invariant form: <e,f> = 1, <h,h> = 2
        let ef = f.apply_basis((0, 2)).unwrap().coeff(&0);
        let hh = f.apply_basis((1, 1)).unwrap().coeff(&0);
        assert_eq!(hh, ef * q(2, 1));
    }

    #[test]
    fn mixed_hom_dimension() {
        let d = homs(
            WeightModule::finite(1),
            WeightModule::highest_weight(q(-3, 2)).unwrap(),
            WeightModule::highest_weight(q(-1, 2)).unwrap(),
        )
        .unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].verify().unwrap());
        let d = homs(
            WeightModule::finite(1),
            WeightModule::highest_weight(q(-3, 2)).unwrap(),
            WeightModule::highest_weight(q(-7, 2)).unwrap(),
        )
        .unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn dense_hom_dimension() {
        let d = homs(
            WeightModule::finite(1),
            WeightModule::dense(q(0, 1), q(-3, 8)).unwrap(),
            WeightModule::dense(q(1, 1), q(-3, 8)).unwrap(),
        )
        .unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].verify().unwrap());
        let d = homs(
            WeightModule::finite(1),
            WeightModule::dense(q(0, 1), q(21, 8)).unwrap(),
            WeightModule::dense(q(1, 1), q(21, 8)).unwrap(),
        )
        .unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn extension_agrees_with_original() {
        let tm = Arc::new(TensorModule::of(WeightModule::finite(1), WeightModule::highest_weight(q(-3, 2)).unwrap()).unwrap());
        let target = Arc::new(WeightModule::highest_weight(q(-1, 2)).unwrap());
        let f = hom_space(&tm, &target, None).unwrap().remove(0);
        let deeper: Vec<Scalar> = (0..12).map(|k| q(-1, 2) - Scalar::from_int(2 * k)).collect();
        let g = f.extend(&deeper).unwrap();
        for w in f.weights() {
            assert_eq!(f.blocks[&w], g.blocks[&w]);
        }
        assert!(g.covers(&deeper[11]));
        assert!(g.verify().unwrap());
    }
}
