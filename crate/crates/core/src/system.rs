//! The system data model: columns `(a_i, b_i)` over `Z/p^K`, the theta
//! invariant, equivalence moves, levels and projective classes, and the
//! selection of the level-zero set used to generate primary variables.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::padic::{degree, Modulus, Residue};

/// Inverse of a nonzero element of `F_p`.
pub(crate) fn fp_inv(x: u64, p: u64) -> u64 {
    debug_assert!(x % p != 0);
    let (mut base, mut e, mut acc) = (x % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// A point of `P^1(F_p)`: index `m < p` is the class of `(1, m)`, index `p`
/// is the class of `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProjClass(u64);

impl ProjClass {
    /// Class of `(u, v)` reduced mod `p`, or `None` for the zero vector.
    pub fn of(u: u64, v: u64, p: u64) -> Option<Self> {
        let (u, v) = (u % p, v % p);
        if u != 0 {
            Some(ProjClass(v * fp_inv(u, p) % p))
        } else if v != 0 {
            Some(ProjClass(p))
        } else {
            None
        }
    }

    pub fn from_index(index: usize, p: u64) -> Option<Self> {
        (index as u64 <= p).then_some(ProjClass(index as u64))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Canonical representative in `F_p^2`.
    pub fn representative(self, p: u64) -> (u64, u64) {
        if self.0 == p {
            (0, 1)
        } else {
            (1, self.0)
        }
    }

    /// Number of classes, `p + 1`.
    pub fn count(p: u64) -> usize {
        p as usize + 1
    }
}

/// `min(vord(a), vord(b))`; rejects columns vanishing at the working precision.
pub fn level_of(modulus: &Modulus, column: [Residue; 2]) -> Result<u32> {
    match (modulus.vord(column[0]), modulus.vord(column[1])) {
        (None, None) => Err(invalid(format!(
            "column vanishes modulo {}^{}",
            modulus.p(),
            modulus.precision()
        ))),
        (Some(x), None) | (None, Some(x)) => Ok(x),
        (Some(x), Some(y)) => Ok(x.min(y)),
    }
}

/// A pair of diagonal forms of degree `d = p^tau (p-1)` at precision `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    tau: u32,
    degree: u64,
    modulus: Modulus,
    columns: Vec<[Residue; 2]>,
}

impl System {
    pub fn new(p: u64, tau: u32, precision: u32, columns: &[[u128; 2]]) -> Result<Self> {
        let modulus = Modulus::new(p, precision)?;
        let columns = columns
            .iter()
            .map(|c| Ok([modulus.try_residue(c[0])?, modulus.try_residue(c[1])?]))
            .collect::<Result<Vec<_>>>()?;
        Self::from_residues(modulus, tau, columns)
    }

    pub fn from_residues(modulus: Modulus, tau: u32, columns: Vec<[Residue; 2]>) -> Result<Self> {
        let p = modulus.p();
        if p == 2 {
            return Err(invalid("p must be an odd prime"));
        }
        if modulus.precision() < tau + 2 {
            return Err(invalid(format!(
                "precision K={} must be at least tau+2={}",
                modulus.precision(),
                tau + 2
            )));
        }
        if columns.is_empty() {
            return Err(invalid("a system needs at least one column"));
        }
        if columns.iter().flatten().any(|r| r.value() >= modulus.modulus()) {
            return Err(invalid("column entries must be reduced modulo p^K"));
        }
        Ok(System { tau, degree: degree(p, tau)?, modulus, columns })
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn precision(&self) -> u32 {
        self.modulus.precision()
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn columns(&self) -> &[[Residue; 2]] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> [Residue; 2] {
        self.columns[i]
    }

    /// Number of variables `s`.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Level of column `i`, `None` when it vanishes at precision `K`.
    pub fn level(&self, i: usize) -> Option<u32> {
        level_of(&self.modulus, self.columns[i]).ok()
    }

    /// Projective class of column `i` after dividing out its level.
    pub fn class_of(&self, i: usize) -> Option<ProjClass> {
        let l = self.level(i)?;
        let p = self.p();
        let q = self.modulus.p_pow(l);
        let [a, b] = self.columns[i];
        ProjClass::of(((a.value() / q) % p as u128) as u64, ((b.value() / q) % p as u128) as u64, p)
    }

    pub fn census(&self) -> Census {
        let p = self.p();
        let k = self.precision() as usize;
        let mut per_level = vec![0usize; k];
        let mut vanishing = 0;
        let mut level0_classes = vec![0usize; ProjClass::count(p)];
        for (i, c) in self.columns.iter().enumerate() {
            match level_of(&self.modulus, *c) {
                Ok(l) => {
                    per_level[l as usize] += 1;
                    if l == 0 {
                        let class = ProjClass::of(
                            (c[0].value() % p as u128) as u64,
                            (c[1].value() % p as u128) as u64,
                            p,
                        )
                        .expect("level-0 column is nonzero mod p");
                        level0_classes[class.index()] += 1;
                    }
                }
                Err(_) => vanishing += 1,
            }
            debug_assert!(i < self.columns.len());
        }
        Census { s: self.len(), degree: self.degree, tau: self.tau, per_level, vanishing, level0_classes }
    }
}

/// Per-level variable counts `m_l` and level-zero class counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub s: usize,
    pub degree: u64,
    pub tau: u32,
    pub per_level: Vec<usize>,
    pub vanishing: usize,
    pub level0_classes: Vec<usize>,
}

impl Census {
    pub fn m(&self, level: u32) -> usize {
        self.per_level.get(level as usize).copied().unwrap_or(0)
    }

    /// `m_0 + ... + m_l`.
    pub fn cumulative(&self, level: u32) -> usize {
        (0..=level).map(|l| self.m(l)).sum()
    }

    /// Largest level-zero class; ties go to the smallest class index.
    pub fn largest_class(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for (idx, &n) in self.level0_classes.iter().enumerate() {
            if n > best.1 {
                best = (idx, n);
            }
        }
        best
    }

    /// `q_0 = m_0 - I_0`.
    pub fn q0(&self) -> usize {
        self.m(0) - self.largest_class().1
    }

    /// First violated normalization bound among `d (m_0 + .. + m_l) >= (l+1) s`
    /// for `l = 0..=tau` and `2 d q_0 >= s`.
    pub fn violated_bound(&self) -> Option<String> {
        let s = self.s as u128;
        let d = self.degree as u128;
        for l in 0..=self.tau {
            let n = self.cumulative(l) as u128;
            if d * n < (l as u128 + 1) * s {
                return Some(format!(
                    "m_0+..+m_{l} = {n} < (l+1)s/d = {}/{}",
                    (l as u128 + 1) * s,
                    d
                ));
            }
        }
        let q0 = self.q0() as u128;
        if 2 * d * q0 < s {
            return Some(format!("q_0 = {q0} < s/(2d) = {s}/{}", 2 * d));
        }
        None
    }
}

/// The theta invariant: sum over column pairs of `ord_p det`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theta {
    Finite(u64),
    Infinite,
}

impl Theta {
    pub fn finite(self) -> Option<u64> {
        match self {
            Theta::Finite(t) => Some(t),
            Theta::Infinite => None,
        }
    }
}

/// Point of `P^1(Z/p^n)` for a primitive column: kind 0 is `(1, t)`, kind 1
/// is `(t, 1)` with `p | t`.
fn projective_coordinate(modulus: &Modulus, column: [Residue; 2], level: u32) -> (u8, u128) {
    let local = Modulus::new(modulus.p(), modulus.precision() - level).expect("valid precision");
    let q = modulus.p_pow(level);
    let a = local.residue(column[0].value() / q);
    let b = local.residue(column[1].value() / q);
    if local.is_unit(a) {
        (0, local.mul(b, local.inv(a).expect("unit")).value())
    } else {
        (1, local.mul(a, local.inv(b).expect("unit")).value())
    }
}

/// Theta at precision `K`. A pair whose determinant vanishes modulo `p^K`
/// makes the invariant infinite.
///
/// Pairs are not enumerated: two primitive columns at levels `l_i, l_j` have
/// `ord det = l_i + l_j + depth`, where `depth` is how far their points of
/// `P^1` agree p-adically. Grouping columns by their point modulo `p^n`
/// counts every pair's depth in `O(s K)` hash operations.
pub fn theta(sys: &System) -> Theta {
    let s = sys.len();
    if s < 2 {
        return Theta::Finite(0);
    }
    let k = sys.precision();
    let modulus = sys.modulus();
    let mut levels = Vec::with_capacity(s);
    let mut coords = Vec::with_capacity(s);
    for &c in sys.columns() {
        match level_of(modulus, c) {
            Ok(l) => {
                levels.push(l);
                coords.push(projective_coordinate(modulus, c, l));
            }
            Err(_) => return Theta::Infinite,
        }
    }
    // depth 0: every pair shares it
    let (mut top1, mut top2) = (0u32, 0u32);
    for &l in &levels {
        if l > top1 {
            top2 = top1;
            top1 = l;
        } else if l > top2 {
            top2 = l;
        }
    }
    if top1 + top2 >= k {
        return Theta::Infinite;
    }
    let level_sum: u64 = levels.iter().map(|&l| l as u64).sum();
    let mut total = (s as u64 - 1) * level_sum;
    let p = sys.p() as u128;
    let mut pn = 1u128;
    for n in 1..=k {
        pn *= p;
        let mut groups: HashMap<(u8, u128), (u64, u32, u32)> = HashMap::new();
        for (i, &l) in levels.iter().enumerate() {
            if n > k - l {
                continue;
            }
            let (kind, t) = coords[i];
            let e = groups.entry((kind, t % pn)).or_insert((0, 0, 0));
            e.0 += 1;
            if l >= e.1 {
                e.2 = e.1;
                e.1 = l;
            } else if l > e.2 {
                e.2 = l;
            }
        }
        if groups.is_empty() {
            break;
        }
        for &(count, l1, l2) in groups.values() {
            if count >= 2 {
                if l1 + l2 + n >= k {
                    return Theta::Infinite;
                }
                total += count * (count - 1) / 2;
            }
        }
    }
    Theta::Finite(total)
}

/// `q(H)`: the fewest entries not divisible by `p` among `lambda a_i + mu b_i`
/// over `(lambda, mu)` not both divisible by `p`; equals `#H` minus the largest
/// projective class in `H`.
pub fn q_of(sys: &System, h: &[usize]) -> Result<usize> {
    let mut counts = vec![0usize; ProjClass::count(sys.p())];
    for &i in h {
        if i >= sys.len() {
            return Err(invalid(format!("column index {i} out of range")));
        }
        if sys.level(i) != Some(0) {
            return Err(invalid(format!("column {i} is not at level zero")));
        }
        counts[sys.class_of(i).expect("level-0 class").index()] += 1;
    }
    Ok(h.len() - counts.iter().copied().max().unwrap_or(0))
}

/// Which branch of the level-zero selection produced `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SelectionCase {
    /// The largest class had at least `p^(tau+1)` members; `#H = 2 p^(tau+1)`.
    LargeClass,
    /// The largest class had fewer; `#H = 2 p^(tau+1) - 1`.
    SmallClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSelection {
    pub indices: Vec<usize>,
    pub case: SelectionCase,
    pub largest_class: ProjClass,
}

/// Select `H` among level-zero columns with `2p^(tau+1) - 1 <= #H <= 2p^(tau+1)`
/// and `q(H) >= p^(tau+1)`. Removals drop the largest indices first.
pub fn select_h(sys: &System) -> Result<HSelection> {
    let p = sys.p();
    let target = (p as usize)
        .checked_pow(sys.tau() + 1)
        .ok_or_else(|| invalid("p^(tau+1) overflows"))?;
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ProjClass::count(p)];
    for i in 0..sys.len() {
        if sys.level(i) == Some(0) {
            by_class[sys.class_of(i).expect("level-0 class").index()].push(i);
        }
    }
    let m0: usize = by_class.iter().map(Vec::len).sum();
    let (big, i0) = by_class
        .iter()
        .enumerate()
        .fold((0, 0), |best, (idx, v)| if v.len() > best.1 { (idx, v.len()) } else { best });
    let q0 = m0 - i0;
    if m0 < 2 * target - 1 {
        return Err(Error::InsufficientVariables(format!(
            "m_0 = {m0} < 2p^(tau+1) - 1 = {}",
            2 * target - 1
        )));
    }
    if q0 < target {
        return Err(Error::InsufficientVariables(format!("q_0 = {q0} < p^(tau+1) = {target}")));
    }
    let mut others: Vec<usize> = by_class
        .iter()
        .enumerate()
        .filter(|(idx, _)| *idx != big)
        .flat_map(|(_, v)| v.iter().copied())
        .collect();
    others.sort_unstable();
    let (mut indices, case) = if i0 >= target {
        let mut h: Vec<usize> = by_class[big][..target].to_vec();
        h.extend_from_slice(&others[..target]);
        (h, SelectionCase::LargeClass)
    } else {
        let mut h = by_class[big].clone();
        h.extend_from_slice(&others[..2 * target - 1 - i0]);
        (h, SelectionCase::SmallClass)
    };
    indices.sort_unstable();
    Ok(HSelection { indices, case, largest_class: ProjClass(big as u64) })
}

/// `A -> M A D P` with `M = diag(p^e1, p^e2) U`, `D = diag(p^(d nu_i))`.
///
/// Negative exponents divide; they are only allowed where the affected
/// entries are divisible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceMove {
    pub row_transform: [[Residue; 2]; 2],
    pub row_scales: [i32; 2],
    pub perm: Vec<usize>,
    pub col_scales: Vec<i64>,
}

impl EquivalenceMove {
    pub fn identity(s: usize) -> Self {
        EquivalenceMove {
            row_transform: [[Residue::ONE, Residue::ZERO], [Residue::ZERO, Residue::ONE]],
            row_scales: [0, 0],
            perm: (0..s).collect(),
            col_scales: vec![0; s],
        }
    }

    /// Predicted change of theta:
    /// `C(s,2) ord_p det M + d (s-1) (nu_1 + .. + nu_s)`.
    pub fn theta_shift(&self, s: usize, degree: u64) -> i128 {
        let s = s as i128;
        let pairs = s * (s - 1) / 2;
        let rows = (self.row_scales[0] + self.row_scales[1]) as i128;
        let nu: i128 = self.col_scales.iter().map(|&v| v as i128).sum();
        pairs * rows + degree as i128 * (s - 1) * nu
    }
}

pub fn apply_move(sys: &System, mv: &EquivalenceMove) -> Result<System> {
    let s = sys.len();
    let m = sys.modulus();
    if mv.perm.len() != s || mv.col_scales.len() != s {
        return Err(invalid("move does not match the number of columns"));
    }
    let mut seen = vec![false; s];
    for &j in &mv.perm {
        if j >= s || std::mem::replace(&mut seen[j], true) {
            return Err(invalid("perm is not a permutation"));
        }
    }
    let u = mv.row_transform;
    let det = m.sub(m.mul(u[0][0], u[1][1]), m.mul(u[0][1], u[1][0]));
    if !m.is_unit(det) {
        return Err(invalid("row transform determinant is not a unit mod p"));
    }
    let d = sys.degree();
    let k = sys.precision() as u64;
    let mut cols = Vec::with_capacity(s);
    for (i, &[a, b]) in sys.columns().iter().enumerate() {
        let was_zero = a.is_zero() && b.is_zero();
        let mut col = [
            m.add(m.mul(u[0][0], a), m.mul(u[0][1], b)),
            m.add(m.mul(u[1][0], a), m.mul(u[1][1], b)),
        ];
        let nu = mv.col_scales[i];
        let shift = d as i128 * nu.unsigned_abs() as i128;
        if nu > 0 {
            let e = if shift >= k as i128 { k as u32 } else { shift as u32 };
            col = col.map(|x| m.mul_p_pow(x, e));
        } else if nu < 0 {
            if shift >= k as i128 {
                return Err(Error::PrecisionUnderflow(format!(
                    "column {i}: dividing by p^{shift} exceeds precision {k}"
                )));
            }
            col = [m.div_p_pow(col[0], shift as u32)?, m.div_p_pow(col[1], shift as u32)?];
        }
        cols.push((col, was_zero));
    }
    for r in 0..2 {
        let e = mv.row_scales[r];
        for (i, (col, _)) in cols.iter_mut().enumerate() {
            if e > 0 {
                col[r] = m.mul_p_pow(col[r], e as u32);
            } else if e < 0 {
                col[r] = m.div_p_pow(col[r], e.unsigned_abs()).map_err(|_| {
                    invalid(format!("row {r} is not divisible by p^{} at column {i}", -e))
                })?;
            }
        }
    }
    if let Some(i) = cols.iter().position(|(c, was_zero)| !was_zero && c[0].is_zero() && c[1].is_zero()) {
        return Err(Error::PrecisionUnderflow(format!(
            "column {i} would vanish modulo p^{k}"
        )));
    }
    let columns = mv.perm.iter().map(|&j| cols[j].0).collect();
    System::from_residues(*m, sys.tau(), columns)
}
