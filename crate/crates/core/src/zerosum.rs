//! Zero-sum finders over `F_p^2` and `F_p^3`, sumsets, and the contraction
//! finders that move a batch of primitive vectors up exactly one level.
//!
//! Every finder returns distinct indices into its input and re-checks its
//! witness by direct summation before returning.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::subset::lex_smallest;
use crate::system::ProjClass;

pub type FpVec2 = [u64; 2];

/// Alon-Dubiner constant used by the linear contraction threshold.
pub const ALON_C: u64 = 9996;

/// `3p - 2`: the Olson bound for `F_p^2`.
pub fn olson_threshold(p: u64) -> usize {
    3 * p as usize - 2
}

/// `3p^2 - 2`: enough primitive vectors for a pigeonholed class contraction.
pub fn lift_threshold(p: u64) -> usize {
    3 * (p * p) as usize - 2
}

/// Number of primitive vectors after which the linear contraction is
/// guaranteed: `min(C p, 3p^2 - 2)`, or `C p` with `strict`.
pub fn alon_threshold(p: u64, strict: bool) -> usize {
    let cp = (ALON_C * p) as usize;
    if strict {
        cp
    } else {
        cp.min(lift_threshold(p))
    }
}

/// `A + B` in `F_p`, each element with one witness pair `(a, b)`.
pub fn sumset(a: &[u64], b: &[u64], p: u64) -> Result<BTreeMap<u64, (u64, u64)>> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("sumset operands must be nonempty"));
    }
    let mut out = BTreeMap::new();
    for &x in a {
        for &y in b {
            out.entry((x + y) % p).or_insert((x % p, y % p));
        }
    }
    Ok(out)
}

fn check_reduced(vs: &[FpVec2], p: u64) -> Result<()> {
    if vs.iter().flatten().any(|&x| x >= p) {
        return Err(invalid("vector entries must be reduced mod p"));
    }
    Ok(())
}

/// Lexicographically smallest nonempty zero-sum subsequence of length at
/// most `max_len`, if any.
pub fn find_zero_sum(vs: &[FpVec2], p: u64, max_len: usize) -> Option<Vec<usize>> {
    let pu = p as usize;
    let sums = pu * pu;
    let found = lex_smallest(
        vs.len(),
        sums * (max_len + 1),
        0,
        |i, s| {
            let (len, sum) = (s / sums, s % sums);
            if len == max_len {
                return None;
            }
            let (u, v) = (sum / pu, sum % pu);
            let [a, b] = vs[i];
            Some((len + 1) * sums + ((u + a as usize) % pu) * pu + (v + b as usize) % pu)
        },
        |s| s >= sums && s % sums == 0,
    )?;
    let total = found.iter().fold([0u64; 2], |acc, &i| [(acc[0] + vs[i][0]) % p, (acc[1] + vs[i][1]) % p]);
    assert_eq!(total, [0, 0], "zero-sum witness failed recomputation");
    Some(found)
}

/// Zero-sum subsequence with `1 <= t <= p` among at least `3p - 2` vectors.
pub fn olson_zero_sum(vs: &[FpVec2], p: u64) -> Result<Vec<usize>> {
    check_reduced(vs, p)?;
    if vs.len() < olson_threshold(p) {
        return Err(Error::BelowThreshold { len: vs.len(), threshold: olson_threshold(p) });
    }
    find_zero_sum(vs, p, p as usize)
        .ok_or_else(|| Error::Counterexample(format!("no zero-sum of length <= {p} in {vs:?}")))
}

/// Among at least `3p - 2` units mod `p^2`, up to `p` whose sum has
/// valuation exactly one. Writes `c = a + p b` and takes an Olson zero-sum
/// of the digit vectors `(a, b)`.
pub fn unit_sum_val_one(cs: &[u128], p: u64) -> Result<Vec<usize>> {
    let pp = p as u128;
    if cs.iter().any(|&c| c % pp == 0) {
        return Err(invalid("all entries must be units"));
    }
    let digits: Vec<FpVec2> = cs.iter().map(|&c| [(c % pp) as u64, ((c / pp) % pp) as u64]).collect();
    let idx = olson_zero_sum(&digits, p)?;
    let sum = idx.iter().map(|&i| cs[i] % (pp * pp)).sum::<u128>() % (pp * pp);
    assert!(sum % pp == 0 && sum != 0, "valuation-one witness failed recomputation");
    Ok(idx)
}

fn reduce_mod_p(v: [u128; 2], p: u64) -> FpVec2 {
    [(v[0] % p as u128) as u64, (v[1] % p as u128) as u64]
}

fn class_of(v: [u128; 2], p: u64) -> Option<ProjClass> {
    let [a, b] = reduce_mod_p(v, p);
    ProjClass::of(a, b, p)
}

/// Whether `idx` picks `1..=p` distinct vectors whose sum has both entries
/// divisible by `p` and not both by `p^2`.
pub fn is_contraction(vs: &[[u128; 2]], idx: &[usize], p: u64) -> bool {
    let pp = p as u128;
    let p2 = pp * pp;
    let mut seen = std::collections::HashSet::new();
    if idx.is_empty() || idx.len() > p as usize || !idx.iter().all(|&i| i < vs.len() && seen.insert(i)) {
        return false;
    }
    let a = idx.iter().map(|&i| vs[i][0] % p2).sum::<u128>() % p2;
    let b = idx.iter().map(|&i| vs[i][1] % p2).sum::<u128>() % p2;
    a % pp == 0 && b % pp == 0 && (a != 0 || b != 0)
}

/// Contraction among at least `3p - 2` primitive vectors in one projective class.
pub fn class_contraction(vs: &[[u128; 2]], p: u64) -> Result<Vec<usize>> {
    let first = vs.first().ok_or_else(|| invalid("empty input"))?;
    let class = class_of(*first, p).ok_or_else(|| invalid("vectors must be primitive"))?;
    if vs.iter().any(|&v| class_of(v, p) != Some(class)) {
        return Err(invalid("vectors must share one projective class"));
    }
    // the coordinate that is a unit throughout the class
    let coord = if class.index() as u64 == p { 1 } else { 0 };
    let p2 = (p * p) as u128;
    let cs: Vec<u128> = vs.iter().map(|v| v[coord] % p2).collect();
    let idx = unit_sum_val_one(&cs, p)?;
    assert!(is_contraction(vs, &idx, p), "class contraction failed recomputation");
    Ok(idx)
}

/// Contraction among at least `3p^2 - 2` primitive vectors: some class holds
/// `3p - 2` of them.
pub fn lift_contraction(vs: &[[u128; 2]], p: u64) -> Result<Vec<usize>> {
    if vs.len() < lift_threshold(p) {
        return Err(Error::BelowThreshold { len: vs.len(), threshold: lift_threshold(p) });
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ProjClass::count(p)];
    for (i, &v) in vs.iter().enumerate() {
        by_class[class_of(v, p).ok_or_else(|| invalid("vectors must be primitive"))?.index()].push(i);
    }
    let members = by_class
        .iter()
        .find(|m| m.len() >= olson_threshold(p))
        .expect("pigeonhole over p+1 classes");
    let sub: Vec<[u128; 2]> = members.iter().map(|&i| vs[i]).collect();
    let mut idx: Vec<usize> = class_contraction(&sub, p)?.into_iter().map(|j| members[j]).collect();
    idx.sort_unstable();
    Ok(idx)
}

/// Exhaustive search over sums mod `p^2` for the lexicographically smallest
/// contraction of any size up to `p`; used below the guaranteed thresholds.
pub fn search_contraction(vs: &[[u128; 2]], p: u64) -> Option<Vec<usize>> {
    let pu = p as usize;
    let p2 = pu * pu;
    let sums = p2 * p2;
    let reduced: Vec<[usize; 2]> = vs.iter().map(|v| [(v[0] % p2 as u128) as usize, (v[1] % p2 as u128) as usize]).collect();
    let idx = lex_smallest(
        vs.len(),
        sums * (pu + 1),
        0,
        |i, s| {
            let (len, sum) = (s / sums, s % sums);
            if len == pu {
                return None;
            }
            let (a, b) = (sum / p2, sum % p2);
            Some((len + 1) * sums + ((a + reduced[i][0]) % p2) * p2 + (b + reduced[i][1]) % p2)
        },
        |s| {
            let (len, sum) = (s / sums, s % sums);
            let (a, b) = (sum / p2, sum % p2);
            len > 0 && a % pu == 0 && b % pu == 0 && sum != 0
        },
    )?;
    assert!(is_contraction(vs, &idx, p));
    Some(idx)
}

/// Lexicographically smallest zero-sum subsequence of length exactly `p` in `F_p^3`.
pub fn find_zero_sum_length_p(ws: &[[u64; 3]], p: u64) -> Option<Vec<usize>> {
    let pu = p as usize;
    let sums = pu * pu * pu;
    let idx = lex_smallest(
        ws.len(),
        sums * (pu + 1),
        0,
        |i, s| {
            let (len, sum) = (s / sums, s % sums);
            if len == pu {
                return None;
            }
            let (x, y, z) = (sum / (pu * pu), sum / pu % pu, sum % pu);
            let w = ws[i].map(|c| c as usize);
            Some((len + 1) * sums + ((x + w[0]) % pu * pu + (y + w[1]) % pu) * pu + (z + w[2]) % pu)
        },
        |s| s == pu * sums,
    )?;
    let mut total = [0u64; 3];
    for &i in &idx {
        for c in 0..3 {
            total[c] = (total[c] + ws[i][c]) % p;
        }
    }
    assert!(idx.len() == pu && total == [0, 0, 0], "length-p zero-sum failed recomputation");
    Some(idx)
}

/// How the linear contraction finder produced its witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlonBranch {
    /// A length-`p` zero-sum of the `F_p^3` encoding in the given round.
    LengthP { round: u8 },
    /// Three rounds met only class `(0:1)`; contracted those `3p` vectors.
    SameClass,
    /// No length-`p` zero-sum; pigeonholed over `3p^2 - 2` vectors.
    Pigeonhole,
    /// Below every threshold; exhaustive search found a witness.
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlonWitness {
    pub indices: Vec<usize>,
    pub branch: AlonBranch,
    /// Whether the input met the guaranteed threshold.
    pub guaranteed: bool,
}

/// Contraction among primitive vectors through the `F_p^3` encoding
/// `w = (a, b, c)` with `v(1) = a + p b mod p^2`, `v(2) = c mod p`.
pub fn alon_lift_contraction(vs: &[[u128; 2]], p: u64, strict: bool) -> Result<AlonWitness> {
    if vs.iter().any(|&v| class_of(v, p).is_none()) {
        return Err(invalid("vectors must be primitive"));
    }
    let threshold = alon_threshold(p, strict);
    let guaranteed = vs.len() >= threshold;
    let pp = p as u128;
    let mut remaining: Vec<usize> = (0..vs.len()).collect();
    let mut same_class: Vec<usize> = Vec::new();
    let mut exhausted = false;
    for round in 1..=3u8 {
        let ws: Vec<[u64; 3]> = remaining
            .iter()
            .map(|&i| {
                let [x, y] = vs[i];
                [(x % pp) as u64, (x / pp % pp) as u64, (y % pp) as u64]
            })
            .collect();
        let Some(found) = find_zero_sum_length_p(&ws, p) else {
            exhausted = true;
            break;
        };
        let picked: Vec<usize> = found.iter().map(|&j| remaining[j]).collect();
        if picked.iter().any(|&i| vs[i][0] % pp != 0) {
            assert!(is_contraction(vs, &picked, p));
            return Ok(AlonWitness { indices: picked, branch: AlonBranch::LengthP { round }, guaranteed });
        }
        same_class.extend_from_slice(&picked);
        remaining.retain(|i| !picked.contains(i));
    }
    if !exhausted {
        let sub: Vec<[u128; 2]> = same_class.iter().map(|&i| vs[i]).collect();
        let mut idx: Vec<usize> = class_contraction(&sub, p)?.into_iter().map(|j| same_class[j]).collect();
        idx.sort_unstable();
        return Ok(AlonWitness { indices: idx, branch: AlonBranch::SameClass, guaranteed });
    }
    if vs.len() >= lift_threshold(p) {
        let idx = lift_contraction(vs, p)?;
        return Ok(AlonWitness { indices: idx, branch: AlonBranch::Pigeonhole, guaranteed });
    }
    match search_contraction(vs, p) {
        Some(idx) => Ok(AlonWitness { indices: idx, branch: AlonBranch::Search, guaranteed }),
        None if guaranteed => Err(Error::Counterexample(format!(
            "{} primitive vectors with no contraction at p={p}",
            vs.len()
        ))),
        None => Err(Error::BelowThreshold { len: vs.len(), threshold }),
    }
}

/// A polynomial over `F_p` in at most three variables, each of degree at
/// most `p - 1`, stored densely: the coefficient of `x_1^e_1 .. x_n^e_n`
/// sits at index `sum e_j p^(j-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    p: u64,
    vars: u32,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn zero(p: u64, vars: u32) -> Result<Self> {
        if vars > 3 {
            return Err(invalid("at most three variables"));
        }
        Ok(FpPoly { p, vars, coeffs: vec![0; (p as usize).pow(vars)] })
    }

    /// Build from `(exponents, coefficient)` terms; exponents above `p - 1`
    /// are rejected.
    pub fn from_terms(p: u64, vars: u32, terms: &[(Vec<u32>, u64)]) -> Result<Self> {
        let mut poly = Self::zero(p, vars)?;
        for (exps, c) in terms {
            if exps.len() != vars as usize {
                return Err(invalid("exponent vector length does not match variable count"));
            }
            if exps.iter().any(|&e| e as u64 >= p) {
                return Err(invalid(format!("per-variable degree must be at most {}", p - 1)));
            }
            let idx = exps.iter().rev().fold(0usize, |acc, &e| acc * p as usize + e as usize);
            poly.coeffs[idx] = (poly.coeffs[idx] + c) % p;
        }
        Ok(poly)
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut total = 0;
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut term = c;
            let mut rest = idx;
            for &x in point.iter().take(self.vars as usize) {
                let e = (rest % p as usize) as u32;
                rest /= p as usize;
                term = term * mod_pow(x % p, e, p) % p;
            }
            total = (total + term) % p;
        }
        total
    }
}

fn mod_pow(mut b: u64, mut e: u32, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Whether `poly` vanishes at every point of `F_p^n`.
pub fn is_zero_function(poly: &FpPoly) -> bool {
    let p = poly.p as usize;
    let n = poly.vars as usize;
    let mut point = vec![0u64; n];
    for code in 0..p.pow(n as u32) {
        let mut rest = code;
        for x in point.iter_mut() {
            *x = (rest % p) as u64;
            rest /= p;
        }
        if poly.eval(&point) != 0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sumset_examples() {
        let s = sumset(&[0], &[0, 2], 5).unwrap();
        assert_eq!(s.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
        let s = sumset(&[0, 1], &[0, 1], 3).unwrap();
        assert_eq!(s.len(), 3);
        for (&x, &(a, b)) in &s {
            assert_eq!((a + b) % 3, x);
        }
        let all: Vec<u64> = (0..7).collect();
        assert_eq!(sumset(&all, &all, 7).unwrap().len(), 7);
        assert!(sumset(&[], &[1], 3).is_err());
    }

    #[test]
    fn olson_examples() {
        let vs = vec![[1, 0]; 7];
        assert_eq!(olson_zero_sum(&vs, 3).unwrap(), vec![0, 1, 2]);
        let vs = vec![[1, 0], [2, 0], [0, 1], [0, 2], [1, 1], [2, 2], [1, 2]];
        assert_eq!(olson_zero_sum(&vs, 3).unwrap(), vec![0, 1]);
        assert!(matches!(olson_zero_sum(&vs[..6], 3), Err(Error::BelowThreshold { .. })));
    }

    #[test]
    fn valuation_one_examples() {
        assert_eq!(unit_sum_val_one(&[1; 7], 3).unwrap(), vec![0, 1, 2]);
        assert_eq!(unit_sum_val_one(&[1, 2, 4, 5, 7, 8, 1], 3).unwrap(), vec![0, 1]);
        assert!(unit_sum_val_one(&[3, 1, 1, 1, 1, 1, 1], 3).is_err());
    }

    #[test]
    fn valuation_one_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in [3u64, 5, 7] {
            for _ in 0..300 {
                let cs: Vec<u128> = (0..olson_threshold(p))
                    .map(|_| loop {
                        let c = rng.gen_range(1..p * p) as u128;
                        if c % p as u128 != 0 {
                            break c;
                        }
                    })
                    .collect();
                let idx = unit_sum_val_one(&cs, p).unwrap();
                let s: u128 = idx.iter().map(|&i| cs[i]).sum();
                assert!(idx.len() <= p as usize);
                assert!(s % p as u128 == 0 && s % (p * p) as u128 != 0);
            }
        }
    }

    #[test]
    fn class_contraction_examples() {
        assert_eq!(class_contraction(&[[1, 1]; 7], 3).unwrap(), vec![0, 1, 2]);
        let vs = [[1, 3], [2, 6], [1, 0], [1, 3], [2, 3], [1, 6], [2, 0]];
        let idx = class_contraction(&vs, 3).unwrap();
        let a: u128 = idx.iter().map(|&i| vs[i][0]).sum();
        assert!(a % 3 == 0 && a % 9 != 0);
        assert!(class_contraction(&[[1, 0], [0, 1], [1, 0], [1, 0], [1, 0], [1, 0], [1, 0]], 3).is_err());
    }

    #[test]
    fn class_contraction_agrees_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = 5u64;
        let p2 = 25u128;
        for _ in 0..1000 {
            let m = rng.gen_range(0..p + 1);
            let vs: Vec<[u128; 2]> = (0..olson_threshold(p))
                .map(|_| {
                    let lam = rng.gen_range(1..p) as u128;
                    let (u, v) = if m == p { (0, lam) } else { (lam, lam * m as u128) };
                    [(u + p as u128 * rng.gen_range(0..p) as u128) % p2, (v + p as u128 * rng.gen_range(0..p) as u128) % p2]
                })
                .collect();
            let idx = class_contraction(&vs, p).unwrap();
            assert!(is_contraction(&vs, &idx, p));
            assert!(search_contraction(&vs, p).is_some());
        }
    }

    #[test]
    fn lift_contraction_examples() {
        assert_eq!(lift_contraction(&[[1, 0]; 25], 3).unwrap(), vec![0, 1, 2]);
        let reps = [[1u128, 0], [0, 1], [1, 1], [1, 2]];
        let vs: Vec<[u128; 2]> = (0..25).map(|i| reps[i % 4]).collect();
        let idx = lift_contraction(&vs, 3).unwrap();
        assert!(is_contraction(&vs, &idx, 3));
        assert!(idx.len() <= 3);
    }

    #[test]
    fn alon_examples() {
        let w = alon_lift_contraction(&[[1, 0]; 9], 3, false).unwrap();
        assert_eq!(w.indices, vec![0, 1, 2]);
        assert_eq!(w.branch, AlonBranch::LengthP { round: 1 });
        assert_eq!(alon_threshold(3, false), 25);
        assert_eq!(alon_threshold(3, true), 29988);
    }

    #[test]
    fn alon_same_class_fallback_is_taken() {
        // nine vectors of class (0:1) lead: each round's length-p zero-sum
        // lies among them, so all three rounds see first entries = 0 mod p
        let mut vs: Vec<[u128; 2]> = vec![[3, 1]; 9];
        vs.extend((0..16).map(|i| [1 + 3 * (i % 3), 1 + (i / 3) % 2]));
        let w = alon_lift_contraction(&vs, 3, false).unwrap();
        assert_eq!(w.branch, AlonBranch::SameClass);
        assert!(is_contraction(&vs, &w.indices, 3));
    }

    #[test]
    fn alon_random_p5() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..50 {
            let vs: Vec<[u128; 2]> = (0..73)
                .map(|_| loop {
                    let v = [rng.gen_range(0..625u128), rng.gen_range(0..625u128)];
                    if v[0] % 5 != 0 || v[1] % 5 != 0 {
                        break v;
                    }
                })
                .collect();
            let w = alon_lift_contraction(&vs, 5, false).unwrap();
            assert!(w.guaranteed);
            assert!(is_contraction(&vs, &w.indices, 5));
        }
    }

    #[test]
    fn zero_function_examples() {
        assert!(is_zero_function(&FpPoly::zero(5, 2).unwrap()));
        // x^(p-1) - 1 vanishes on units only
        let f = FpPoly::from_terms(5, 1, &[(vec![4], 1), (vec![0], 4)]).unwrap();
        assert!(!is_zero_function(&f));
        assert!(FpPoly::from_terms(3, 1, &[(vec![3], 1)]).is_err());
    }

    #[test]
    fn zero_function_iff_zero_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let terms: Vec<(Vec<u32>, u64)> = (0..rng.gen_range(0..4))
                .map(|_| (vec![rng.gen_range(0..3), rng.gen_range(0..3)], rng.gen_range(0..3)))
                .collect();
            let f = FpPoly::from_terms(3, 2, &terms).unwrap();
            assert_eq!(is_zero_function(&f), f.coefficients().iter().all(|&c| c == 0));
        }
    }
}
