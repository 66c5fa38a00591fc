//! Bounded-precision arithmetic in `Z/p^K`.
//!
//! Residues are stored as canonical representatives in `[0, p^K)`. Moduli up
//! to 64 bits multiply through a single `u128` product; larger moduli (up to
//! 2^126) fall back to a shift-and-add multiplication over two limbs.

use crate::error::{invalid, Error, Result};

const MAX_MODULUS_BITS: u32 = 126;

/// An element of `Z/p^K`, represented by its canonical value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct Residue(u128);

impl Residue {
    pub const ZERO: Residue = Residue(0);
    pub const ONE: Residue = Residue(1);

    pub fn value(self) -> u128 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// `p^tau (p - 1)`, the only degree the solver handles.
pub fn degree(p: u64, tau: u32) -> Result<u64> {
    p.checked_pow(tau)
        .and_then(|q| q.checked_mul(p - 1))
        .ok_or_else(|| invalid(format!("degree p^tau(p-1) overflows for p={p}, tau={tau}")))
}

/// The ring `Z/p^K` for a prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    p: u64,
    k: u32,
    m: u128,
}

impl Modulus {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(invalid(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(invalid("precision must be at least 1"));
        }
        let m = (p as u128)
            .checked_pow(k)
            .filter(|m| *m < (1u128 << MAX_MODULUS_BITS))
            .ok_or_else(|| invalid(format!("{p}^{k} exceeds the supported 126-bit modulus")))?;
        Ok(Modulus { p, k, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The precision `K`.
    pub fn precision(&self) -> u32 {
        self.k
    }

    /// `p^K`.
    pub fn modulus(&self) -> u128 {
        self.m
    }

    /// `p^e` as an integer; `e` may exceed `K` as long as the value fits.
    pub fn p_pow(&self, e: u32) -> u128 {
        (self.p as u128).pow(e)
    }

    pub fn residue(&self, x: u128) -> Residue {
        Residue(x % self.m)
    }

    pub fn from_i128(&self, x: i128) -> Residue {
        Residue(x.rem_euclid(self.m as i128) as u128)
    }

    /// Checked constructor: rejects values outside `[0, p^K)`.
    pub fn try_residue(&self, x: u128) -> Result<Residue> {
        if x < self.m {
            Ok(Residue(x))
        } else {
            Err(invalid(format!("{x} is not reduced modulo {}", self.m)))
        }
    }

    pub fn add(&self, x: Residue, y: Residue) -> Residue {
        let s = x.0 + y.0;
        Residue(if s >= self.m { s - self.m } else { s })
    }

    pub fn sub(&self, x: Residue, y: Residue) -> Residue {
        Residue(if x.0 >= y.0 { x.0 - y.0 } else { x.0 + self.m - y.0 })
    }

    pub fn neg(&self, x: Residue) -> Residue {
        if x.0 == 0 {
            x
        } else {
            Residue(self.m - x.0)
        }
    }

    pub fn mul(&self, x: Residue, y: Residue) -> Residue {
        if self.m <= u64::MAX as u128 {
            return Residue(x.0 * y.0 % self.m);
        }
        // m < 2^126, so doubling an accumulator below m cannot overflow.
        let mut acc = 0u128;
        for bit in (0..128 - y.0.leading_zeros()).rev() {
            acc <<= 1;
            if acc >= self.m {
                acc -= self.m;
            }
            if (y.0 >> bit) & 1 == 1 {
                acc += x.0;
                if acc >= self.m {
                    acc -= self.m;
                }
            }
        }
        Residue(acc)
    }

    pub fn pow(&self, x: Residue, mut e: u128) -> Residue {
        let mut base = x;
        let mut acc = self.residue(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Largest `e <= K` with `p^e | x`; `None` stands for "at least K" (x = 0).
    pub fn vord(&self, x: Residue) -> Option<u32> {
        if x.0 == 0 {
            return None;
        }
        let p = self.p as u128;
        let (mut v, mut e) = (x.0, 0);
        while v % p == 0 {
            v /= p;
            e += 1;
        }
        Some(e)
    }

    pub fn is_unit(&self, x: Residue) -> bool {
        x.0 % self.p as u128 != 0
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self, x: Residue) -> Result<Residue> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit { value: x.0, p: self.p });
        }
        let m = self.m as i128;
        let (mut r0, mut r1) = (m, x.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_i128(t0))
    }

    /// `x^d` for a unit `x` and `d = p^tau (p-1)`; the result is `1 mod p^(tau+1)`.
    pub fn unit_pow_d(&self, x: Residue, tau: u32) -> Result<Residue> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit { value: x.0, p: self.p });
        }
        if self.k < tau + 1 {
            return Err(invalid(format!("precision {} below tau+1 = {}", self.k, tau + 1)));
        }
        Ok(self.pow(x, degree(self.p, tau)? as u128))
    }

    /// `x / p^e` for `x` divisible by `p^e`. The result is exact as an integer;
    /// its top `e` digits are zero-filled.
    pub fn div_p_pow(&self, x: Residue, e: u32) -> Result<Residue> {
        if e == 0 {
            return Ok(x);
        }
        if e >= self.k {
            return Err(Error::PrecisionUnderflow(format!(
                "dividing by {}^{e} leaves no digits at precision {}",
                self.p, self.k
            )));
        }
        let q = self.p_pow(e);
        if x.0 % q != 0 {
            return Err(invalid(format!("{} is not divisible by {}^{e}", x.0, self.p)));
        }
        Ok(Residue(x.0 / q))
    }

    /// `x * p^e`.
    pub fn mul_p_pow(&self, x: Residue, e: u32) -> Residue {
        if e >= self.k {
            return Residue::ZERO;
        }
        self.mul(x, Residue(self.p_pow(e)))
    }

    /// `x mod p^j` as a plain integer.
    pub fn truncate(&self, x: Residue, j: u32) -> u128 {
        if j >= self.k {
            x.0
        } else {
            x.0 % self.p_pow(j)
        }
    }

    /// The same representative read modulo `p^k'` for a different precision.
    pub fn with_precision(&self, k: u32) -> Result<Modulus> {
        Modulus::new(self.p, k)
    }
}
