//! Decision procedures for fusion rules among sl2 generalized Verma modules,
//! admissible weights and Garland-Lepowsky weights.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{in_positive_multiples, Level, Scalar};
use crate::g_modules::{dense_tensor_eigenvalues, hom_space, ModuleKind, TensorModule, WeightModule};

/// Upper limit on the period scanned by [`check_doubly_infinite`].
const MAX_PERIOD: u64 = 50_000_000;

/// One evaluated instance of the eigenvalue condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// `m` for the highest-weight criteria, `N` for dense modules.
    pub m: i64,
    pub value: Scalar,
    /// `value / (ℓ+2)` when this is a positive integer: the obstructed degree.
    pub degree: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FusionVerdict {
    /// The fusion rule is 1.
    One { checked: Vec<Check> },
    /// The weight condition holds but the eigenvalue condition fails at the
    /// witnesses; the fusion rule is not decided.
    Unknown { witnesses: Vec<Check>, checked: Vec<Check> },
    /// No 𝔤-homomorphism exists.
    Zero { reason: String },
}

impl FusionVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            FusionVerdict::One { .. } => "one",
            FusionVerdict::Unknown { .. } => "unknown",
            FusionVerdict::Zero { .. } => "zero",
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, FusionVerdict::One { .. })
    }

    pub fn witnesses(&self) -> &[Check] {
        match self {
            FusionVerdict::Unknown { witnesses, .. } => witnesses,
            _ => &[],
        }
    }

    pub fn checked(&self) -> &[Check] {
        match self {
            FusionVerdict::One { checked } | FusionVerdict::Unknown { checked, .. } => checked,
            FusionVerdict::Zero { .. } => &[],
        }
    }

    fn from_checks(checked: Vec<Check>) -> Self {
        let witnesses: Vec<Check> = checked.iter().filter(|c| c.degree.is_some()).cloned().collect();
        if witnesses.is_empty() {
            FusionVerdict::One { checked }
        } else {
            FusionVerdict::Unknown { witnesses, checked }
        }
    }
}

fn require_rational(x: &Scalar, what: &str) -> Result<()> {
    if x.is_rational() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {x} must be rational")))
    }
}

/// `ℓ + 2` for an exact level, rejecting the critical level and irrational
/// levels.
fn shifted(level: &Level) -> Result<Option<Scalar>> {
    match level {
        Level::Generic => Ok(None),
        Level::Exact(l) => {
            require_rational(l, "level")?;
            let s = l + Scalar::from_int(2);
            if s.is_zero() {
                return Err(Error::CriticalLevel);
            }
            Ok(Some(s))
        }
    }
}

/// `m(m + ν + 1)` and its membership in `(ℓ+2)Z₊`.
fn check(m: i64, nu: &Scalar, s: &Scalar) -> Result<Check> {
    let mm = Scalar::from_int(m);
    let value = &mm * (&mm + nu + Scalar::one());
    let degree = if in_positive_multiples(&value, s)? { (&value / s).to_i64() } else { None };
    Ok(Check { m, value, degree })
}

fn checks(range: impl Iterator<Item = i64>, nu: &Scalar, s: &Scalar) -> Result<Vec<Check>> {
    range.map(|m| check(m, nu, s)).collect()
}

/// `N^{V(ℓ,r)}_{V(ℓ,p) V(ℓ,q)}` for `p, q, r ∈ N`.
pub fn check_finite(level: &Level, p: u32, q: u32, r: u32) -> Result<FusionVerdict> {
    let s = shifted(level)?;
    let (p, q, r) = (p as i64, q as i64, r as i64);
    let span = p + q - r;
    if span < 0 || span % 2 != 0 || span / 2 > p.min(q) {
        return Ok(FusionVerdict::Zero { reason: format!("L_{r} is not a summand of L_{p} ⊗ L_{q}") });
    }
    let n = span / 2;
    let Some(s) = s else {
        return Ok(FusionVerdict::One { checked: Vec::new() });
    };
    let nu = Scalar::from_int(r);
    let positive = s.signum_rational() == Some(std::cmp::Ordering::Greater);
    let range: Vec<i64> = if positive { (1..=n).rev().collect() } else { ((n - p.min(q))..=n).rev().collect() };
    Ok(FusionVerdict::from_checks(checks(range.into_iter(), &nu, &s)?))
}

/// The eigenvalue condition of `check_finite` over the full range
/// `n − min(p,q) <= m <= n` regardless of the sign of `ℓ + 2`.
pub fn check_finite_full_range(level: &Level, p: u32, q: u32, r: u32) -> Result<FusionVerdict> {
    let s = shifted(level)?;
    let (p, q, r) = (p as i64, q as i64, r as i64);
    let span = p + q - r;
    if span < 0 || span % 2 != 0 || span / 2 > p.min(q) {
        return Ok(FusionVerdict::Zero { reason: format!("L_{r} is not a summand of L_{p} ⊗ L_{q}") });
    }
    let n = span / 2;
    let Some(s) = s else {
        return Ok(FusionVerdict::One { checked: Vec::new() });
    };
    Ok(FusionVerdict::from_checks(checks(((n - p.min(q))..=n).rev(), &Scalar::from_int(r), &s)?))
}

/// `n` with `target = top − 2n`, if it is a natural number.
fn offset(top: &Scalar, target: &Scalar) -> Option<i64> {
    let n = (top - target) * Scalar::frac(1, 2);
    n.is_natural().then(|| n.to_i64()).flatten()
}

/// `N^{V(ℓ,μ)}_{V(ℓ,p) V(ℓ,λ)}` for `p ∈ N`, `λ, p+λ ∉ N`.
pub fn check_mixed(level: &Level, p: u32, lambda: &Scalar, mu: &Scalar) -> Result<FusionVerdict> {
    require_rational(lambda, "λ")?;
    require_rational(mu, "μ")?;
    let pp = Scalar::from_int(p as i64);
    if lambda.is_natural() || (&pp + lambda).is_natural() {
        return Err(Error::Domain(format!("λ = {lambda} and p + λ must not be natural numbers")));
    }
    let s = shifted(level)?;
    let n = match offset(&(&pp + lambda), mu) {
        Some(n) if n <= p as i64 => n,
        _ => {
            return Ok(FusionVerdict::Zero { reason: format!("μ = {mu} is not p + λ − 2n with 0 <= n <= {p}") })
        }
    };
    let Some(s) = s else {
        return Ok(FusionVerdict::One { checked: Vec::new() });
    };
    Ok(FusionVerdict::from_checks(checks(((n - p as i64)..=n).rev(), mu, &s)?))
}

fn floor_scalar(x: &Scalar) -> BigInt {
    x.to_rational().expect("rational").floor().to_integer()
}

/// `N^{V(ℓ,λ3)}_{V(ℓ,λ1) V(ℓ,λ2)}` for `λ1, λ2, λ1+λ2 ∉ N`. The condition
/// over the unbounded range `m = n, n−1, …` is decided exactly: write
/// `λ3 = a/b`, `ℓ+2 = c/d`, so that `m(m+λ3+1) = (c/d)·t` with
/// `t = d·m(bm+a+b)/(bc)`. Below `T < min(0, −λ3−1)` the product is
/// positive and divisibility by `bc` is periodic in `m`, so one period
/// settles the tail.
pub fn check_doubly_infinite(level: &Level, l1: &Scalar, l2: &Scalar, l3: &Scalar) -> Result<FusionVerdict> {
    for (x, name) in [(l1, "λ1"), (l2, "λ2"), (l3, "λ3")] {
        require_rational(x, name)?;
    }
    let sum = l1 + l2;
    if l1.is_natural() || l2.is_natural() || sum.is_natural() {
        return Err(Error::Domain("λ1, λ2 and λ1 + λ2 must not be natural numbers".into()));
    }
    let s = shifted(level)?;
    let Some(n) = offset(&sum, l3) else {
        return Ok(FusionVerdict::Zero { reason: format!("λ3 = {l3} is not λ1 + λ2 − 2n with n ∈ N") });
    };
    let Some(s) = s else {
        return Ok(FusionVerdict::One { checked: Vec::new() });
    };
    let l3r = l3.to_rational().expect("rational");
    let sr = s.to_rational().expect("rational");
    let b = l3r.denom().clone();
    let c = sr.numer().clone();
    let period = (&b * &c).abs();
    let period = period
        .to_u64()
        .filter(|&p| p <= MAX_PERIOD)
        .ok_or_else(|| Error::Unsupported(format!("period {period} is too large to scan")))?;
    let bound = {
        let root = -l3 - Scalar::one();
        if root < Scalar::zero() { root } else { Scalar::zero() }
    };
    // largest integer strictly below `bound`
    let t = {
        let f = floor_scalar(&bound);
        if Scalar::from_rational(f.clone().into()) == bound { f - BigInt::one() } else { f }
    };
    let t = t.to_i64().ok_or_else(|| Error::Unsupported("λ3 out of range".into()))?;
    let mut range: Vec<i64> = ((t + 1)..=n).rev().collect();
    if c.is_positive() {
        let top = n.min(t);
        range.extend((0..period as i64).map(|k| top - k));
    }
    Ok(FusionVerdict::from_checks(checks(range.into_iter(), l3, &s)?))
}

/// `N^{V(ℓ,E_{λ̄+1,δ3})}_{V(ℓ,1) V(ℓ,E_{λ̄,δ})}`. `target_delta` defaults to
/// `δ`.
pub fn dense_fusion_check(
    level: &Level,
    lambda: &Scalar,
    delta: &Scalar,
    target_delta: Option<&Scalar>,
) -> Result<FusionVerdict> {
    require_rational(lambda, "λ̄")?;
    require_rational(delta, "δ")?;
    let delta3 = target_delta.unwrap_or(delta).clone();
    require_rational(&delta3, "δ3")?;
    let s = shifted(level)?;
    let source = WeightModule::dense(lambda.clone(), delta.clone())?;
    let target = WeightModule::dense(lambda + Scalar::one(), delta3.clone())?;
    let tensor = Arc::new(TensorModule::of(WeightModule::finite(1), source)?);
    let homs = hom_space(&tensor, &Arc::new(target), None)?;
    match homs.len() {
        0 => return Ok(FusionVerdict::Zero { reason: "no g-homomorphism L_1 ⊗ E → E'".into() }),
        1 => {}
        k => return Err(Error::Unsupported(format!("hom space of dimension {k}"))),
    }
    let Some(s) = s else {
        return Ok(FusionVerdict::One { checked: Vec::new() });
    };
    let (minus, plus) = dense_tensor_eigenvalues(delta)?;
    let two_s = Scalar::from_int(2) * &s;
    let mut checked = Vec::new();
    for ev in [minus, plus] {
        let value = &ev - &delta3;
        let degree = if value.is_rational() && in_positive_multiples(&value, &two_s)? {
            (&value / &two_s).to_i64()
        } else {
            None
        };
        checked.push(Check { m: degree.unwrap_or(0), value: ev, degree });
    }
    checked.dedup();
    Ok(FusionVerdict::from_checks(checked))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibleWeight {
    pub r: i64,
    pub s: i64,
    pub lambda: Scalar,
}

/// `λ_{r,s} = r − 1 − (u/v)s` for `1 <= r <= u−1`, `0 <= s <= v−1`, at the
/// admissible level `ℓ = −2 + u/v`.
pub fn admissible_weights(u: i64, v: i64) -> Result<Vec<AdmissibleWeight>> {
    if u < 2 || v < 1 || u.gcd(&v) != 1 {
        return Err(Error::Domain(format!("(u, v) = ({u}, {v}) needs u >= 2, v >= 1, gcd 1")));
    }
    let step = Scalar::frac(u, v);
    let mut out = Vec::new();
    for r in 1..u {
        for s in 0..v {
            out.push(AdmissibleWeight { r, s, lambda: Scalar::from_int(r - 1) - &step * Scalar::from_int(s) });
        }
    }
    Ok(out)
}

pub fn admissible_level(u: i64, v: i64) -> Result<Scalar> {
    admissible_weights(u, v)?;
    Ok(Scalar::frac(u, v) - Scalar::from_int(2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GarlandLepowsky {
    pub m: i64,
    pub r_prime: i64,
    pub r_double_prime: i64,
}

fn gl_weight(j: i64, n: i64, level: i64) -> i64 {
    let sign = if j % 2 == 0 { 1 } else { -1 };
    (level + 2) * j + if j % 2 == 0 { 0 } else { level } + sign * n
}

/// `m(j,n) = (ℓ+2)j + (ℓ/2)(1 − (−1)^j) + (−1)^j n` with the next two
/// weights of the resolution.
pub fn garland_lepowsky(j: i64, n: i64, level: i64) -> Result<GarlandLepowsky> {
    if j < 0 || level < 0 || !(0..=level).contains(&n) {
        return Err(Error::Domain(format!("need j >= 0, ℓ ∈ N and 0 <= n <= ℓ (got j={j}, n={n}, ℓ={level})")));
    }
    Ok(GarlandLepowsky {
        m: gl_weight(j, n, level),
        r_prime: gl_weight(j + 1, n, level),
        r_double_prime: gl_weight(j + 2, n, level),
    })
}

/// The first `count` positive integers that are not of the form `m(j,n)`:
/// `(ℓ+2)j − 1` for `j >= 1`.
pub fn non_garland_lepowsky_weights(level: i64, count: usize) -> Result<Vec<i64>> {
    if level < 0 {
        return Err(Error::Domain("ℓ must be a natural number".into()));
    }
    Ok((1..=count as i64).map(|j| (level + 2) * j - 1).collect())
}

/// One line of a batch file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionQuery {
    pub level: Level,
    /// Module descriptors such as `finite:2`, `hw:-3/2`, `dense:0,-3/8`.
    pub u1: String,
    pub u2: String,
    pub u3: String,
}

impl FusionQuery {
    pub fn evaluate(&self) -> Result<FusionVerdict> {
        let k1: ModuleKind = self.u1.parse()?;
        let k2: ModuleKind = self.u2.parse()?;
        let k3: ModuleKind = self.u3.parse()?;
        use ModuleKind::*;
        match (&k1, &k2, &k3) {
            (Finite { p }, Finite { p: q }, Finite { p: r }) => check_finite(&self.level, *p, *q, *r),
            (Finite { p }, HighestWeight { lambda }, HighestWeight { lambda: mu })
            | (HighestWeight { lambda }, Finite { p }, HighestWeight { lambda: mu }) => {
                check_mixed(&self.level, *p, lambda, mu)
            }
            (HighestWeight { lambda: a }, HighestWeight { lambda: b }, HighestWeight { lambda: c }) => {
                check_doubly_infinite(&self.level, a, b, c)
            }
            (Finite { p: 1 }, Dense { lambda, delta }, Dense { lambda: l3, delta: d3 })
            | (Dense { lambda, delta }, Finite { p: 1 }, Dense { lambda: l3, delta: d3 }) => {
                let shift = l3 - lambda - Scalar::one();
                let even = (&shift * Scalar::frac(1, 2)).to_i64().is_some();
                if !even {
                    return Ok(FusionVerdict::Zero { reason: "target weights are not λ̄ + 1".into() });
                }
                dense_fusion_check(&self.level, lambda, delta, Some(d3))
            }
            _ => Err(Error::Unsupported(format!("fusion query {} ⊗ {} → {}", self.u1, self.u2, self.u3))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::q;
    use crate::kz_engine::{obstruction_scan, ScanOptions};

    fn lv(l: Scalar) -> Level {
        Level::Exact(l)
    }

    #[test]
    fn finite_examples() {
        for l in [q(0, 1), q(1, 1), q(-1, 2), q(7, 3)] {
            for p in 0..4 {
                for qq in 0..4 {
                    assert!(check_finite(&lv(l.clone()), p, qq, p + qq).unwrap().is_one());
                }
            }
        }
        let v = check_finite(&lv(q(4, 1)), 2, 2, 0).unwrap();
        let w = v.witnesses();
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].m, w[0].value.clone(), w[0].degree), (2, q(6, 1), Some(1)));
        assert!(matches!(check_finite(&lv(q(1, 1)), 2, 2, 1).unwrap(), FusionVerdict::Zero { .. }));
        assert!(matches!(check_finite(&lv(q(1, 1)), 1, 1, 4).unwrap(), FusionVerdict::Zero { .. }));
        assert!(check_finite(&lv(q(-2, 1)), 1, 1, 0).is_err());
        assert!(check_finite(&Level::Generic, 2, 2, 0).unwrap().is_one());
    }

    #[test]
    fn n_one_and_two_patterns() {
        for l in [q(0, 1), q(1, 1), q(2, 1), q(4, 1), q(-1, 2), q(3, 2), q(-4, 3)] {
            let s = &l + q(2, 1);
            for p in 1..=6u32 {
                for qq in 1..=6u32 {
                    let pq = Scalar::from_int((p + qq) as i64);
                    let v = check_finite(&lv(l.clone()), p, qq, p + qq - 2).unwrap();
                    assert_eq!(!v.is_one(), in_positive_multiples(&pq, &s).unwrap());
                    if p.min(qq) >= 2 {
                        let v = check_finite(&lv(l.clone()), p, qq, p + qq - 4).unwrap();
                        let a = in_positive_multiples(&(Scalar::from_int(2) * (&pq - q(1, 1))), &s).unwrap();
                        let b = in_positive_multiples(&(&pq - q(2, 1)), &s).unwrap();
                        assert_eq!(!v.is_one(), a || b);
                    }
                }
            }
        }
    }

    #[test]
    fn restricted_range_agrees_for_positive_shift() {
        for l in [q(0, 1), q(1, 1), q(4, 1), q(-1, 2), q(3, 2), q(-3, 2)] {
            for p in 0..=6 {
                for qq in 0..=6 {
                    for n in 0..=p.min(qq) {
                        let r = p + qq - 2 * n;
                        let a = check_finite(&lv(l.clone()), p, qq, r).unwrap();
                        let b = check_finite_full_range(&lv(l.clone()), p, qq, r).unwrap();
                        assert_eq!(a.is_one(), b.is_one());
                    }
                }
            }
        }
    }

    #[test]
    fn finite_verdicts_match_obstruction_scans() {
        for l in [q(0, 1), q(1, 1), q(4, 1), q(-1, 2), q(3, 2)] {
            for p in 0..=6u32 {
                for qq in 0..=6u32 {
                    for n in 0..=p.min(qq) {
                        let r = p + qq - 2 * n;
                        let v = check_finite(&lv(l.clone()), p, qq, r).unwrap();
                        let t = TensorModule::of(WeightModule::finite(p), WeightModule::finite(qq)).unwrap();
                        let h3 = crate::affine_verma::conformal_weight_sl2(&Scalar::from_int(r as i64), &l).unwrap();
                        let scan = obstruction_scan(&t, &lv(l.clone()), &h3, &ScanOptions::default()).unwrap();
                        assert_eq!(v.is_one(), scan.is_empty(), "ℓ={l} p={p} q={qq} r={r}");
                        for w in v.witnesses() {
                            assert!(scan.degrees().contains(&(w.degree.unwrap() as usize)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_examples() {
        let l = lv(q(-1, 2));
        let v = check_mixed(&l, 1, &q(-3, 2), &q(-1, 2)).unwrap();
        assert!(v.is_one());
        let got: Vec<(i64, Scalar)> = v.checked().iter().map(|c| (c.m, c.value.clone())).collect();
        assert_eq!(got, vec![(0, q(0, 1)), (-1, q(1, 2))]);
        let v = check_mixed(&l, 1, &q(-1, 2), &q(-3, 2)).unwrap();
        assert!(v.is_one());
        let got: Vec<(i64, Scalar)> = v.checked().iter().map(|c| (c.m, c.value.clone())).collect();
        assert_eq!(got, vec![(1, q(1, 2)), (0, q(0, 1))]);
        assert!(matches!(check_mixed(&l, 1, &q(-3, 2), &q(0, 1)).unwrap(), FusionVerdict::Zero { .. }));
        assert!(check_mixed(&l, 1, &q(-1, 1), &q(0, 1)).is_err());
        assert!(check_mixed(&l, 2, &q(3, 1), &q(1, 1)).is_err());
    }

    #[test]
    fn doubly_infinite_examples() {
        let l = lv(q(-1, 2));
        let v = check_doubly_infinite(&l, &q(-3, 4), &q(-3, 4), &q(-3, 2)).unwrap();
        let w = v.witnesses();
        assert_eq!((w[0].m, w[0].value.clone()), (-1, q(3, 2)));
        assert!(matches!(
            check_doubly_infinite(&l, &q(-3, 4), &q(-3, 4), &q(-1, 1)).unwrap(),
            FusionVerdict::Zero { .. }
        ));
        assert!(check_doubly_infinite(&Level::Generic, &q(-3, 4), &q(-3, 4), &q(-3, 2)).unwrap().is_one());
        // ℓ + 2 < 0: the tail never contributes
        let v = check_doubly_infinite(&lv(q(-5, 2)), &q(-1, 3), &q(-1, 3), &q(-2, 3)).unwrap();
        assert!(v.checked().iter().all(|c| c.m > -2));
    }

    #[test]
    fn doubly_infinite_matches_brute_force() {
        for l in [q(-1, 2), q(1, 1), q(4, 1), q(-5, 2), q(1, 3), q(-7, 3)] {
            let s = &l + q(2, 1);
            for (l1, l2) in [(q(-3, 4), q(-3, 4)), (q(-1, 2), q(-3, 2)), (q(1, 3), q(-5, 3)), (q(-7, 5), q(2, 5))] {
                for n in 0..3i64 {
                    let l3 = &l1 + &l2 - Scalar::from_int(2 * n);
                    let v = check_doubly_infinite(&lv(l.clone()), &l1, &l2, &l3).unwrap();
                    let brute = (-(600i64)..=n).any(|m| {
                        let mm = Scalar::from_int(m);
                        in_positive_multiples(&(&mm * (&mm + &l3 + q(1, 1))), &s).unwrap()
                    });
                    assert_eq!(!v.is_one(), brute, "ℓ={l} λ1={l1} λ2={l2} n={n}");
                }
            }
        }
    }

    #[test]
    fn dense_examples() {
        let l = lv(q(-1, 2));
        for lam in [q(0, 1), q(1, 1), q(1, 3), q(-2, 5)] {
            assert!(dense_fusion_check(&l, &lam, &q(-3, 8), None).unwrap().is_one());
        }
        let v = dense_fusion_check(&l, &q(0, 1), &q(5, 8), Some(&q(-3, 8))).unwrap();
        assert_eq!(v.witnesses().iter().map(|c| c.degree).collect::<Vec<_>>(), vec![Some(1)]);
        let t = TensorModule::of(WeightModule::finite(1), WeightModule::dense(q(0, 1), q(5, 8)).unwrap()).unwrap();
        // h3 = δ3 / (2s), μ = 2s(h3 + N) = δ3 + 2sN
        let h3 = q(-3, 8) / q(3, 1);
        let scan = obstruction_scan(&t, &l, &h3, &ScanOptions::default()).unwrap();
        assert_eq!(scan.degrees(), vec![1]);
        assert!(matches!(dense_fusion_check(&l, &q(0, 1), &q(21, 8), None).unwrap(), FusionVerdict::Zero { .. }));
        assert!(matches!(dense_fusion_check(&l, &q(1, 3), &q(-1, 2), None).unwrap(), FusionVerdict::Zero { .. }));
        assert!(dense_fusion_check(&Level::Generic, &q(0, 1), &q(-3, 8), None).unwrap().is_one());
        let v = dense_fusion_check(&lv(q(-3, 2)), &q(0, 1), &q(-3, 8), None).unwrap();
        assert_eq!(v.witnesses().iter().map(|c| c.degree).collect::<Vec<_>>(), vec![Some(1)]);
    }

    #[test]
    fn admissible_and_gl() {
        let ws: Vec<Scalar> = admissible_weights(3, 2).unwrap().into_iter().map(|w| w.lambda).collect();
        assert_eq!(ws, vec![q(0, 1), q(-3, 2), q(1, 1), q(-1, 2)]);
        assert_eq!(admissible_level(3, 2).unwrap(), q(-1, 2));
        assert_eq!(admissible_weights(2, 1).unwrap().len(), 1);
        for u in 2..7 {
            let ws: Vec<Scalar> = admissible_weights(u, 1).unwrap().into_iter().map(|w| w.lambda).collect();
            assert_eq!(ws, (0..=u - 2).map(Scalar::from_int).collect::<Vec<_>>());
        }
        assert!(admissible_weights(4, 2).is_err());
        for level in 0..6 {
            for n in 0..=level {
                assert_eq!(garland_lepowsky(0, n, level).unwrap().m, n);
            }
            if level % 2 == 0 {
                let g = garland_lepowsky(0, 0, level).unwrap();
                assert_eq!((g.r_prime, g.r_double_prime), (2 * level + 2, 2 * level + 4));
            }
            let mut hit = vec![false; 200];
            for j in 0..200 {
                for n in 0..=level {
                    let m = garland_lepowsky(j, n, level).unwrap().m;
                    if (m as usize) < hit.len() {
                        hit[m as usize] = true;
                    }
                }
            }
            let missing: Vec<i64> = (1..200).filter(|&m| !hit[m as usize]).collect();
            let expected: Vec<i64> =
                non_garland_lepowsky_weights(level, 200).unwrap().into_iter().filter(|&m| m < 200).collect();
            assert_eq!(missing, expected);
        }
        assert!(garland_lepowsky(0, 3, 2).is_err());
    }

    #[test]
    fn query_dispatch() {
        let qy: FusionQuery =
            serde_json::from_str(r#"{"level":"4","u1":"finite:2","u2":"finite:2","u3":"finite:0"}"#).unwrap();
        assert_eq!(qy.evaluate().unwrap().name(), "unknown");
        let qy: FusionQuery =
            serde_json::from_str(r#"{"level":"-1/2","u1":"finite:1","u2":"hw:-3/2","u3":"hw:-1/2"}"#).unwrap();
        assert_eq!(qy.evaluate().unwrap().name(), "one");
        let qy: FusionQuery =
            serde_json::from_str(r#"{"level":"-1/2","u1":"finite:1","u2":"dense:0,-3/8","u3":"dense:1,-3/8"}"#)
                .unwrap();
        assert_eq!(qy.evaluate().unwrap().name(), "one");
        let qy: FusionQuery =
            serde_json::from_str(r#"{"level":"1","u1":"adjoint","u2":"finite:1","u3":"finite:1"}"#).unwrap();
        assert!(qy.evaluate().is_err());
    }
}
