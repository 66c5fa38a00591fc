//! Solvers for the mod-`p` congruence systems used to build contractions, in
//! subset form: since `x^(p-1)` is 0 or 1 mod `p`, a solution is the set of
//! variables set to 1.
//!
//! Also the reference oracle for the full system mod `p^(tau+1)`.

use std::collections::HashMap;

use crate::certificate::{verify, Certificate};
use crate::error::{invalid, Error, Result};
use crate::subset::lex_smallest;
use crate::system::{ProjClass, System};
use crate::zerosum::{sumset, FpVec2};

/// `0/1` assignment with the given support.
pub fn support_to_values(support: &[usize], n: usize) -> Vec<u64> {
    let mut out = vec![0; n];
    for &i in support {
        out[i] = 1;
    }
    out
}

/// Subset of `p - 1` units summing to `c` mod `p`, built from the chain of
/// sumsets `{0, a_1} + .. + {0, a_k}`, preferring to leave `a_k` out.
pub fn solve_single_target(coeffs: &[u64], c: u64, p: u64) -> Result<Vec<usize>> {
    if coeffs.len() != p as usize - 1 || coeffs.iter().any(|&a| a % p == 0) {
        return Err(invalid(format!("need exactly {} units mod {p}", p - 1)));
    }
    let mut chain = vec![sumset(&[0], &[0], p)?];
    for &a in coeffs {
        let prev: Vec<u64> = chain.last().unwrap().keys().copied().collect();
        chain.push(sumset(&[0, a % p], &prev, p)?);
    }
    let target = c % p;
    if !chain.last().unwrap().contains_key(&target) {
        return Err(Error::Counterexample(format!("sumset chain misses {target} for {coeffs:?}")));
    }
    let mut support = Vec::new();
    let mut x = target;
    for k in (1..chain.len()).rev() {
        let (used, prev) = chain[k][&x];
        if used != 0 {
            support.push(k - 1);
        }
        x = prev;
    }
    support.reverse();
    let sum: u64 = support.iter().map(|&i| coeffs[i] % p).sum();
    assert_eq!(sum % p, target, "single-target witness failed recomputation");
    Ok(support)
}

/// Lexicographically smallest nonempty subset of `p` coefficients summing
/// to zero mod `p`.
pub fn solve_single_nontrivial(coeffs: &[u64], p: u64) -> Result<Vec<usize>> {
    if coeffs.len() != p as usize {
        return Err(invalid(format!("need exactly {p} coefficients")));
    }
    if let Some(i) = coeffs.iter().position(|&a| a % p == 0) {
        return Ok(vec![i]);
    }
    let pu = p as usize;
    let found = lex_smallest(
        coeffs.len(),
        2 * pu,
        0,
        |i, s| Some(2 * ((s / 2 + (coeffs[i] % p) as usize) % pu) + 1),
        |s| s == 1,
    )
    .ok_or_else(|| Error::Counterexample(format!("no nontrivial zero sum in {coeffs:?}")))?;
    assert_eq!(found.iter().map(|&i| coeffs[i] % p).sum::<u64>() % p, 0);
    Ok(found)
}

/// Row operation sending `class` to `(1:0)`, as a map on `F_p^2`.
fn to_first_axis(class: ProjClass, p: u64) -> impl Fn(FpVec2) -> FpVec2 {
    let m = class.representative(p);
    move |[a, b]: FpVec2| {
        if m == (0, 1) {
            [b, a]
        } else {
            [a, (b + p * p - m.1 * a % p) % p]
        }
    }
}

fn sums_vanish(cols: &[FpVec2], support: &[usize], p: u64) -> bool {
    let a: u64 = support.iter().map(|&i| cols[i][0] % p).sum();
    let b: u64 = support.iter().map(|&i| cols[i][1] % p).sum();
    a % p == 0 && b % p == 0
}

/// `2p - 1` nonzero columns mod `p` whose last `p - 1` share a projective
/// class: a solution meeting the first `p` columns.
pub fn solve_pair_class_tail(cols: &[FpVec2], p: u64) -> Result<Vec<usize>> {
    let pu = p as usize;
    if cols.len() != 2 * pu - 1 {
        return Err(invalid(format!("need exactly {} columns", 2 * pu - 1)));
    }
    let classes: Vec<ProjClass> = cols
        .iter()
        .map(|c| ProjClass::of(c[0], c[1], p).ok_or_else(|| invalid("columns must be nonzero mod p")))
        .collect::<Result<_>>()?;
    let tail = classes[pu];
    if classes[pu..].iter().any(|&c| c != tail) {
        return Err(invalid("the last p-1 columns must share a projective class"));
    }
    let map = to_first_axis(tail, p);
    let moved: Vec<FpVec2> = cols.iter().map(|&c| map([c[0] % p, c[1] % p])).collect();
    let head: Vec<u64> = moved[..pu].iter().map(|c| c[1]).collect();
    let mut support = solve_single_nontrivial(&head, p)?;
    let c: u64 = support.iter().map(|&i| moved[i][0]).sum::<u64>() % p;
    let tail_coeffs: Vec<u64> = moved[pu..].iter().map(|c| c[0]).collect();
    support.extend(solve_single_target(&tail_coeffs, (p - c) % p, p)?.into_iter().map(|j| j + pu));
    assert!(sums_vanish(cols, &support, p), "class-tail witness failed recomputation");
    Ok(support)
}

/// Lexicographically smallest `S` with both column sums zero mod `p` and
/// `S` meeting the first `required` columns.
pub fn solve_pair_meeting_prefix(cols: &[FpVec2], required: usize, p: u64) -> Option<Vec<usize>> {
    let pu = p as usize;
    let sums = pu * pu;
    let found = lex_smallest(
        cols.len(),
        2 * sums,
        0,
        |i, s| {
            let (touched, sum) = (s / sums, s % sums);
            let [a, b] = cols[i];
            let sum = ((sum / pu + (a % p) as usize) % pu) * pu + (sum % pu + (b % p) as usize) % pu;
            Some(if touched == 1 || i < required { sums + sum } else { sum })
        },
        |s| s == sums,
    )?;
    assert!(sums_vanish(cols, &found, p) && found.iter().any(|&i| i < required));
    Some(found)
}

/// `3p - 3` nonzero columns mod `p`: a solution with some `x_i`, `i <= p`,
/// nonzero. A failure would contradict the existence statement this
/// realizes and is reported as a counterexample.
pub fn solve_pair_constrained(cols: &[FpVec2], p: u64) -> Result<Vec<usize>> {
    if cols.len() != 3 * p as usize - 3 {
        return Err(invalid(format!("need exactly {} columns", 3 * p - 3)));
    }
    if cols.iter().any(|c| c[0] % p == 0 && c[1] % p == 0) {
        return Err(invalid("columns must be nonzero mod p"));
    }
    solve_pair_meeting_prefix(cols, p as usize, p)
        .ok_or_else(|| Error::Counterexample(format!("no constrained solution for {cols:?}")))
}

/// Rank state of a partial support: 0 empty, `1 + class` for one class,
/// `p + 2` for rank two.
fn rank_step(state: usize, class: Option<ProjClass>, p: u64) -> usize {
    let rank2 = p as usize + 2;
    match class {
        None => state,
        Some(c) if state == 0 => 1 + c.index(),
        Some(c) if state != rank2 && state != 1 + c.index() => rank2,
        Some(_) => state,
    }
}

/// Some support solving the system mod `p^(tau+1)` with rank two mod `p`,
/// found by breadth over the columns with parent pointers; `None` if no
/// subset works.
pub fn oracle_subset_solution(sys: &System) -> Option<Certificate> {
    let p = sys.p();
    let modulus = (p as u128).pow(sys.tau() + 1);
    let pp = p as u128;
    let ranks = p as u128 + 3;
    let encode = |a: u128, b: u128, r: usize| (a * modulus + b) * ranks + r as u128;
    let target = encode(0, 0, p as usize + 2);
    let mut parent: HashMap<u128, (u128, u32)> = HashMap::new();
    let mut reached: Vec<u128> = vec![0];
    parent.insert(0, (0, u32::MAX));
    for (i, col) in sys.columns().iter().enumerate() {
        let (a, b) = (col[0].value() % modulus, col[1].value() % modulus);
        if a == 0 && b == 0 {
            continue;
        }
        let class = ProjClass::of((a % pp) as u64, (b % pp) as u64, p);
        let frontier = reached.len();
        for k in 0..frontier {
            let st = reached[k];
            let r = (st % ranks) as usize;
            let rest = st / ranks;
            let (sa, sb) = (rest / modulus, rest % modulus);
            let next = encode((sa + a) % modulus, (sb + b) % modulus, rank_step(r, class, p));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert((st, i as u32));
                reached.push(next);
                if next == target {
                    let mut support = Vec::new();
                    let mut cur = target;
                    while cur != 0 {
                        let (prev, col) = parent[&cur];
                        support.push(col as usize);
                        cur = prev;
                    }
                    let cert = Certificate::new(support);
                    assert!(verify(sys, &cert), "oracle certificate failed verification");
                    return Some(cert);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_target_examples() {
        assert_eq!(solve_single_target(&[1, 1, 1, 1], 0, 5).unwrap(), Vec::<usize>::new());
        assert_eq!(solve_single_target(&[1, 1, 1, 1], 3, 5).unwrap(), vec![0, 1, 2]);
        for a in [[1u64, 1], [1, 2], [2, 1], [2, 2]] {
            for c in 0..3 {
                let s = solve_single_target(&a, c, 3).unwrap();
                assert_eq!(s.iter().map(|&i| a[i]).sum::<u64>() % 3, c);
            }
        }
    }

    #[test]
    fn single_target_all_patterns_p5() {
        for code in 0..4u64.pow(4) {
            let a: Vec<u64> = (0..4).map(|k| code / 4u64.pow(k) % 4 + 1).collect();
            for c in 0..5 {
                let s = solve_single_target(&a, c, 5).unwrap();
                assert_eq!(s.iter().map(|&i| a[i]).sum::<u64>() % 5, c);
            }
        }
    }

    #[test]
    fn single_nontrivial_examples() {
        assert_eq!(solve_single_nontrivial(&[1, 0, 2], 3).unwrap(), vec![1]);
        assert_eq!(solve_single_nontrivial(&[1, 1, 1], 3).unwrap(), vec![0, 1, 2]);
        for code in 0..5u64.pow(5) {
            let a: Vec<u64> = (0..5).map(|k| code / 5u64.pow(k) % 5).collect();
            let s = solve_single_nontrivial(&a, 5).unwrap();
            assert!(!s.is_empty());
            assert_eq!(s.iter().map(|&i| a[i]).sum::<u64>() % 5, 0);
        }
    }

    #[test]
    fn class_tail_examples() {
        let cols = [[1, 0], [1, 0], [1, 0], [0, 1], [0, 1]];
        assert_eq!(solve_pair_class_tail(&cols, 3).unwrap(), vec![0, 1, 2]);
        let cols = [[1, 1], [2, 1], [0, 1], [1, 0], [2, 0]];
        assert_eq!(solve_pair_class_tail(&cols, 3).unwrap(), vec![0, 1, 2]);
        let bad = [[1, 1], [2, 1], [0, 1], [1, 0], [0, 2]];
        assert!(solve_pair_class_tail(&bad, 3).is_err());
    }

    #[test]
    fn class_tail_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for p in [5u64, 7] {
            let pu = p as usize;
            for _ in 0..10_000 {
                let (tu, tv) = loop {
                    let t = (rng.gen_range(0..p), rng.gen_range(0..p));
                    if t != (0, 0) {
                        break t;
                    }
                };
                let mut cols: Vec<FpVec2> = (0..pu)
                    .map(|_| loop {
                        let c = [rng.gen_range(0..p), rng.gen_range(0..p)];
                        if c != [0, 0] {
                            break c;
                        }
                    })
                    .collect();
                cols.extend((0..pu - 1).map(|_| {
                    let l = rng.gen_range(1..p);
                    [tu * l % p, tv * l % p]
                }));
                let s = solve_pair_class_tail(&cols, p).unwrap();
                assert!(sums_vanish(&cols, &s, p) && s.iter().any(|&i| i < pu));
                let padded = solve_pair_meeting_prefix(&cols, pu, p).unwrap();
                assert!(padded <= s);
            }
        }
    }

    /// Lexicographically smallest solution by enumerating every subset.
    fn brute_constrained(cols: &[FpVec2], p: u64) -> Option<Vec<usize>> {
        let n = cols.len();
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..1 << n {
            let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if s[0] < p as usize && sums_vanish(cols, &s, p) && best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
        best
    }

    #[test]
    fn pair_constrained_examples() {
        let cols = [[1, 0], [1, 0], [0, 1], [1, 1], [2, 1], [1, 2]];
        assert!(sums_vanish(&cols, &[2, 3, 4], 3));
        let got = solve_pair_constrained(&cols, 3).unwrap();
        assert_eq!(got, vec![0, 1, 2, 5]);
        assert_eq!(Some(got), brute_constrained(&cols, 3));
        assert_eq!(solve_pair_constrained(&[[1, 1]; 6], 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn pair_constrained_matches_brute_force_p5() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..300 {
            let cols: Vec<FpVec2> = (0..12)
                .map(|_| loop {
                    let c = [rng.gen_range(0..5), rng.gen_range(0..5)];
                    if c != [0, 0] {
                        break c;
                    }
                })
                .collect();
            assert_eq!(Some(solve_pair_constrained(&cols, 5).unwrap()), brute_constrained(&cols, 5));
        }
    }

    #[test]
    fn oracle_examples() {
        let sys = System::new(3, 1, 4, &[[1, 3], [3, 1], [5, 5]]).unwrap();
        assert_eq!(oracle_subset_solution(&sys).unwrap().support, vec![0, 1, 2]);
        let sys = System::new(3, 1, 4, &[[9, 9]]).unwrap();
        assert!(oracle_subset_solution(&sys).is_none());
        let sys = System::new(3, 1, 4, &[[1, 0]]).unwrap();
        assert!(oracle_subset_solution(&sys).is_none());
    }
}
