//! Greedy reduction of a system to a form satisfying the level-count bounds
//! `d (m_0 + .. + m_l) >= (l+1) s` for `l <= tau` and `2 d q_0 >= s`.
//!
//! Moves are applied to exact integer representatives of the columns, so no
//! digits are lost to row divisions; the result is reduced mod `p^K` at the
//! end. Every move strictly lowers theta, which bounds the number of steps.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::Residue;
use crate::system::{theta, ProjClass, System, Theta};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum NormalizeMove {
    /// Column divided by `p^(d k)`.
    ColumnReduction { column: usize, k: u64 },
    /// Columns of level `<= level` multiplied by `p^d`, then both rows divided by `p^(level+1)`.
    LevelRaise { level: u32, scaled: usize },
    /// Rows mixed so `class` sits in the first row's kernel, the other
    /// level-zero columns multiplied by `p^d`, then the first row divided by `p`.
    ClassSplit { class: ProjClass, scaled: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizeStep {
    #[serde(flatten)]
    pub mv: NormalizeMove,
    pub theta_delta: i128,
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub system: System,
    pub steps: Vec<NormalizeStep>,
    /// Net exponent `nu_i`: column `i` of the result is `p^(d nu_i)` times the
    /// transformed input column.
    pub col_scales: Vec<i64>,
    pub theta_before: u64,
    pub theta_after: u64,
    /// Columns whose level reached `K` and therefore vanish in the result.
    pub vanished: usize,
}

impl Normalized {
    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    /// Map a solution of the normalized system, valid mod `p^k`, back to the
    /// input system: `x_i = p^(nu_i - m) x'_i` with `m` the least `nu_i` over
    /// the support. Returns the assignment and the precision it is valid to.
    pub fn pull_back(&self, original: &System, x: &[Residue], k: u32) -> (Vec<Residue>, u32) {
        let modulus = original.modulus();
        let support = x.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i);
        let m = support.map(|i| self.col_scales[i]).min().unwrap_or(0);
        let d = original.degree() as i128;
        let out = x
            .iter()
            .zip(&self.col_scales)
            .map(|(&v, &nu)| {
                let shift = (nu - m) as u64;
                if shift >= modulus.precision() as u64 {
                    Residue::ZERO
                } else {
                    modulus.mul_p_pow(modulus.residue(v.value()), shift as u32)
                }
            })
            .collect();
        let valid = (k as i128 - d * m as i128).clamp(0, modulus.precision() as i128) as u32;
        (out, valid)
    }
}

fn vord_big(x: &BigInt, p: &BigInt) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.clone();
    let mut e = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return Some(e);
        }
        x = q;
        e += 1;
    }
}

struct Work {
    p: BigInt,
    p_u64: u64,
    d: u64,
    cols: Vec<[BigInt; 2]>,
    levels: Vec<u64>,
}

impl Work {
    fn level(&self, c: &[BigInt; 2]) -> u64 {
        match (vord_big(&c[0], &self.p), vord_big(&c[1], &self.p)) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => unreachable!("finite theta excludes zero columns"),
        }
    }

    fn refresh(&mut self) {
        self.levels = self.cols.iter().map(|c| self.level(c)).collect();
    }

    fn cumulative(&self, l: u64) -> usize {
        self.levels.iter().filter(|&&x| x <= l).count()
    }

    fn class(&self, i: usize) -> ProjClass {
        let p = self.p_u64;
        let r = |x: &BigInt| x.mod_floor(&self.p).to_u64().expect("reduced mod p");
        ProjClass::of(r(&self.cols[i][0]), r(&self.cols[i][1]), p).expect("level-zero column")
    }

    fn pd(&self) -> BigInt {
        num_traits::pow(self.p.clone(), self.d as usize)
    }
}

/// Normalize `sys`; the input must have finite theta at its precision.
pub fn normalize(sys: &System) -> Result<Normalized> {
    let theta_before = match theta(sys) {
        Theta::Finite(t) => t,
        Theta::Infinite => {
            return Err(Error::InfiniteTheta {
                precision: sys.precision(),
                detail: "some column pair has determinant divisible by p^K; raise K or perturb".into(),
            })
        }
    };
    let s = sys.len();
    let tau = sys.tau() as u64;
    let mut w = Work {
        p: BigInt::from(sys.p()),
        p_u64: sys.p(),
        d: sys.degree(),
        cols: sys
            .columns()
            .iter()
            .map(|c| [BigInt::from(c[0].value()), BigInt::from(c[1].value())])
            .collect(),
        levels: vec![],
    };
    w.refresh();
    let mut steps = Vec::new();
    let mut col_scales = vec![0i64; s];
    let s_i = s as i128;
    let d_i = w.d as i128;
    let pairs = s_i * (s_i - 1) / 2;
    loop {
        if let Some(i) = w.levels.iter().position(|&l| l >= w.d) {
            let k = w.levels[i] / w.d;
            let divisor = num_traits::pow(w.p.clone(), (w.d * k) as usize);
            for x in w.cols[i].iter_mut() {
                *x /= &divisor;
            }
            w.levels[i] -= w.d * k;
            col_scales[i] -= k as i64;
            steps.push(NormalizeStep {
                mv: NormalizeMove::ColumnReduction { column: i, k },
                theta_delta: -d_i * (s_i - 1) * k as i128,
            });
            continue;
        }
        if let Some(l) = (0..=tau).find(|&l| (w.d as u128) * (w.cumulative(l) as u128) < (l as u128 + 1) * s as u128) {
            let pd = w.pd();
            let div = num_traits::pow(w.p.clone(), (l + 1) as usize);
            let mut scaled = 0;
            for i in 0..s {
                if w.levels[i] <= l {
                    for x in w.cols[i].iter_mut() {
                        *x *= &pd;
                    }
                    col_scales[i] += 1;
                    scaled += 1;
                }
                for x in w.cols[i].iter_mut() {
                    debug_assert!((&*x % &div).is_zero());
                    *x /= &div;
                }
            }
            w.refresh();
            steps.push(NormalizeStep {
                mv: NormalizeMove::LevelRaise { level: l as u32, scaled },
                theta_delta: d_i * (s_i - 1) * scaled as i128 - pairs * 2 * (l as i128 + 1),
            });
            continue;
        }
        let mut counts = vec![0usize; ProjClass::count(w.p_u64)];
        for i in 0..s {
            if w.levels[i] == 0 {
                counts[w.class(i).index()] += 1;
            }
        }
        let (big, big_count) = counts
            .iter()
            .enumerate()
            .fold((0, 0), |best, (idx, &n)| if n > best.1 { (idx, n) } else { best });
        let q0 = w.cumulative(0) - big_count;
        if (2 * w.d as u128) * q0 as u128 >= s as u128 {
            break;
        }
        let class = ProjClass::from_index(big, w.p_u64).expect("class index");
        let pd = w.pd();
        let mut scaled = 0;
        for i in 0..s {
            let move_it = w.levels[i] == 0 && w.class(i) != class;
            let [a, b] = &w.cols[i];
            // (a, b) -> (b - m a, a) sends class (1:m) into the first row's kernel
            let mut first = if class.index() as u64 == w.p_u64 {
                a.clone()
            } else {
                let (_, m) = class.representative(w.p_u64);
                b - a * BigInt::from(m)
            };
            let mut second = if class.index() as u64 == w.p_u64 { b.clone() } else { a.clone() };
            if move_it {
                first *= &pd;
                second *= &pd;
                col_scales[i] += 1;
                scaled += 1;
            }
            debug_assert!((&first % &w.p).is_zero());
            first /= &w.p;
            w.cols[i] = [first, second];
        }
        w.refresh();
        steps.push(NormalizeStep {
            mv: NormalizeMove::ClassSplit { class, scaled },
            theta_delta: d_i * (s_i - 1) * scaled as i128 - pairs,
        });
    }
    let theta_after = (theta_before as i128 + steps.iter().map(|s| s.theta_delta).sum::<i128>()) as u64;
    let modulus = *sys.modulus();
    let big_m = BigInt::from(modulus.modulus());
    let reduce = |x: &BigInt| modulus.residue(x.mod_floor(&big_m).to_u128().expect("reduced"));
    let columns: Vec<[Residue; 2]> = w.cols.iter().map(|[a, b]| [reduce(a), reduce(b)]).collect();
    let vanished = columns.iter().filter(|c| c[0].is_zero() && c[1].is_zero()).count();
    let system = System::from_residues(modulus, sys.tau(), columns)?;
    if vanished > 0 {
        log::warn!("normalization pushed {vanished} column(s) past precision {}", modulus.precision());
    }
    Ok(Normalized { system, steps, col_scales, theta_before, theta_after, vanished })
}

/// Theta of the reduced result, when finite; equals `theta_after` unless
/// columns vanished.
pub fn observed_theta(n: &Normalized) -> Option<u64> {
    theta(&n.system).finite()
}
