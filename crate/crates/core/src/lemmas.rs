//! Check suites for the combinatorial lemmas: each finder runs over an
//! exhaustive or seeded-random input family and every witness is recomputed.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::congruence::solve_pair_constrained;
use crate::error::{invalid, Error, Result};
use crate::padic::is_prime;
use crate::zerosum::{alon_lift_contraction, alon_threshold, is_zero_function, olson_zero_sum, sumset, FpPoly, FpVec2};

/// Inputs larger than this are never enumerated.
pub const EXHAUSTIVE_LIMIT: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub lemma: &'static str,
    pub p: u64,
    pub sampling: Sampling,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let how = match self.sampling {
            Sampling::Exhaustive => "exhaustive".to_string(),
            Sampling::Random { seed, .. } => format!("random seed={seed}"),
        };
        write!(
            f,
            "{} p={} {how}: {} cases, {} failures ({:.2}s)",
            self.lemma,
            self.p,
            self.cases,
            self.failures,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(first) = &self.first_failure {
            write!(f, "; first failure: {first}")?;
        }
        Ok(())
    }
}

struct Tally {
    report: SuiteReport,
    start: Instant,
}

impl Tally {
    fn new(lemma: &'static str, p: u64, sampling: Sampling) -> Self {
        Tally {
            report: SuiteReport { lemma, p, sampling, cases: 0, failures: 0, first_failure: None, elapsed: Duration::ZERO },
            start: Instant::now(),
        }
    }

    fn record(&mut self, outcome: std::result::Result<(), String>) {
        self.report.cases += 1;
        if let Err(msg) = outcome {
            self.report.failures += 1;
            self.report.first_failure.get_or_insert(msg);
        }
    }

    fn finish(mut self) -> SuiteReport {
        self.report.elapsed = self.start.elapsed();
        self.report
    }
}

fn check_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(invalid(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Run `case` on every code below `count`, or on `samples` random codes.
fn over_codes(count: Option<u64>, sampling: Sampling, mut case: impl FnMut(u64, &mut ChaCha8Rng)) -> Result<()> {
    match sampling {
        Sampling::Exhaustive => {
            let n = count.filter(|&n| n <= EXHAUSTIVE_LIMIT).ok_or_else(|| invalid("input family too large to enumerate"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for code in 0..n {
                case(code, &mut rng);
            }
        }
        Sampling::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let code = match count {
                    Some(n) => rng.gen_range(0..n),
                    None => 0,
                };
                case(code, &mut rng);
            }
        }
    }
    Ok(())
}

fn family_size(base: u64, len: usize) -> Option<u64> {
    base.checked_pow(len as u32)
}

fn digits(mut code: u64, base: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = code % base;
            code /= base;
            d
        })
        .collect()
}

fn zero_sum(vs: &[FpVec2], idx: &[usize], p: u64) -> bool {
    let s = idx.iter().fold([0u64; 2], |a, &i| [(a[0] + vs[i][0]) % p, (a[1] + vs[i][1]) % p]);
    s == [0, 0]
}

fn distinct(idx: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    idx.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// Every `3p - 2` vectors of `F_p^2` hold a zero-sum of length at most `p`.
pub fn olson_suite(p: u64, sampling: Sampling) -> Result<SuiteReport> {
    check_prime(p)?;
    let n = 3 * p as usize - 2;
    let mut tally = Tally::new("olson", p, sampling);
    over_codes(family_size(p * p, n), sampling, |code, rng| {
        let vs: Vec<FpVec2> = match sampling {
            Sampling::Exhaustive => digits(code, p * p, n).into_iter().map(|d| [d % p, d / p]).collect(),
            Sampling::Random { .. } => (0..n).map(|_| [rng.gen_range(0..p), rng.gen_range(0..p)]).collect(),
        };
        tally.record(match olson_zero_sum(&vs, p) {
            Ok(idx) if !idx.is_empty() && idx.len() <= p as usize && distinct(&idx, n) && zero_sum(&vs, &idx, p) => Ok(()),
            Ok(idx) => Err(format!("bad witness {idx:?} for {vs:?}")),
            Err(e) => Err(e.to_string()),
        });
    })?;
    Ok(tally.finish())
}

/// `|A + B| >= min(p, |A| + |B| - 1)` for nonempty `A, B` in `F_p`.
pub fn cauchy_davenport_suite(p: u64, sampling: Sampling) -> Result<SuiteReport> {
    check_prime(p)?;
    let subsets = 1u64.checked_shl(p as u32).map(|n| n - 1);
    let mut tally = Tally::new("cd", p, sampling);
    let count = subsets.and_then(|n| n.checked_mul(n));
    over_codes(count, sampling, |code, rng| {
        let (ma, mb) = match sampling {
            Sampling::Exhaustive => {
                let n = subsets.expect("enumerable");
                (code / n + 1, code % n + 1)
            }
            Sampling::Random { .. } => {
                let full = if p >= 64 { u64::MAX } else { (1u64 << p) - 1 };
                (rng.gen_range(1..=full), rng.gen_range(1..=full))
            }
        };
        let set = |mask: u64| -> Vec<u64> { (0..p).filter(|&x| mask >> x & 1 == 1).collect() };
        let (a, b) = (set(ma), set(mb));
        let mut naive = vec![false; p as usize];
        for &x in &a {
            for &y in &b {
                naive[((x + y) % p) as usize] = true;
            }
        }
        let size = naive.iter().filter(|&&t| t).count();
        tally.record(match sumset(&a, &b, p) {
            Ok(found) => {
                let witnessed = found.iter().all(|(&z, &(x, y))| a.contains(&x) && b.contains(&y) && (x + y) % p == z);
                if found.len() != size || !witnessed {
                    Err(format!("sumset of {a:?} and {b:?} disagrees with enumeration"))
                } else if size < (p as usize).min(a.len() + b.len() - 1) {
                    Err(format!("|{a:?} + {b:?}| = {size} is below the bound"))
                } else {
                    Ok(())
                }
            }
            Err(e) => Err(e.to_string()),
        });
    })?;
    Ok(tally.finish())
}

/// Every `3p - 3` nonzero columns of `F_p^2` admit a zero-sum support that
/// meets the first `p`.
pub fn constrained_pair_suite(p: u64, sampling: Sampling) -> Result<SuiteReport> {
    check_prime(p)?;
    let n = 3 * p as usize - 3;
    let nonzero = p * p - 1;
    let mut tally = Tally::new("prop71", p, sampling);
    over_codes(family_size(nonzero, n), sampling, |code, rng| {
        let vs: Vec<FpVec2> = match sampling {
            Sampling::Exhaustive => digits(code, nonzero, n).into_iter().map(|d| [(d + 1) % p, (d + 1) / p]).collect(),
            Sampling::Random { .. } => (0..n)
                .map(|_| {
                    let d = rng.gen_range(1..p * p);
                    [d % p, d / p]
                })
                .collect(),
        };
        tally.record(match solve_pair_constrained(&vs, p) {
            Ok(idx) if distinct(&idx, n) && idx.iter().any(|&i| i < p as usize) && zero_sum(&vs, &idx, p) => Ok(()),
            Ok(idx) => Err(format!("bad witness {idx:?} for {vs:?}")),
            Err(e) => Err(e.to_string()),
        });
    })?;
    Ok(tally.finish())
}

/// Among `alon_threshold(p)` primitive vectors mod `p^2`, at most `p` whose
/// sums vanish mod `p` but not both mod `p^2`.
pub fn alon_suite(p: u64, sampling: Sampling, strict: bool) -> Result<SuiteReport> {
    check_prime(p)?;
    let Sampling::Random { .. } = sampling else {
        return Err(invalid("the alon suite is random only"));
    };
    let n = alon_threshold(p, strict);
    let (pp, p2) = (p as u128, (p * p) as u128);
    let mut tally = Tally::new("alon", p, sampling);
    over_codes(None, sampling, |_, rng| {
        let vs: Vec<[u128; 2]> = (0..n)
            .map(|_| loop {
                let v = [rng.gen_range(0..p2), rng.gen_range(0..p2)];
                if v[0] % pp != 0 || v[1] % pp != 0 {
                    break v;
                }
            })
            .collect();
        tally.record(match alon_lift_contraction(&vs, p, strict) {
            Ok(w) => {
                let idx = &w.indices;
                let s = idx.iter().fold([0u128; 2], |a, &i| [(a[0] + vs[i][0]) % p2, (a[1] + vs[i][1]) % p2]);
                if !idx.is_empty() && idx.len() <= p as usize && distinct(idx, n) && s[0] % pp == 0 && s[1] % pp == 0 && s != [0, 0] {
                    Ok(())
                } else {
                    Err(format!("bad witness {idx:?}"))
                }
            }
            Err(Error::BelowThreshold { .. }) => Err("below threshold".into()),
            Err(e) => Err(e.to_string()),
        });
    })?;
    Ok(tally.finish())
}

/// A polynomial in two variables of degree below `p` in each vanishes on
/// all of `F_p^2` exactly when its coefficients do.
pub fn davenport_suite(p: u64, sampling: Sampling) -> Result<SuiteReport> {
    check_prime(p)?;
    let vars = 2u32;
    let slots = (p as usize).pow(vars);
    let mut tally = Tally::new("davenport", p, sampling);
    over_codes(family_size(p, slots), sampling, |code, rng| {
        let coeffs: Vec<u64> = match sampling {
            Sampling::Exhaustive => digits(code, p, slots),
            // half the samples are sparse so near-zero polynomials show up
            Sampling::Random { .. } if rng.gen_bool(0.5) => {
                let mut c = vec![0; slots];
                for _ in 0..rng.gen_range(0..3) {
                    c[rng.gen_range(0..slots)] = rng.gen_range(0..p);
                }
                c
            }
            Sampling::Random { .. } => (0..slots).map(|_| rng.gen_range(0..p)).collect(),
        };
        let terms: Vec<(Vec<u32>, u64)> = coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| (vec![(idx % p as usize) as u32, (idx / p as usize) as u32], c))
            .collect();
        tally.record(match FpPoly::from_terms(p, vars, &terms) {
            Ok(poly) => {
                let zero_coeffs = poly.coefficients().iter().all(|&c| c == 0);
                if is_zero_function(&poly) == zero_coeffs {
                    Ok(())
                } else {
                    Err(format!("coefficients {coeffs:?}"))
                }
            }
            Err(e) => Err(e.to_string()),
        });
    })?;
    Ok(tally.finish())
}
