//! Seeded random systems.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::padic::{degree, Modulus};
use crate::system::{ProjClass, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Primitive columns only, repaired so the level-count bounds hold.
    Normalized,
    /// Primitive columns scaled by `p^v`, `v` uniform up to the degree;
    /// usually needs normalizing.
    Raw,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Normalized => "normalized",
            Profile::Raw => "raw",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(Profile::Normalized),
            "raw" => Ok(Profile::Raw),
            _ => Err(invalid(format!("unknown profile {s:?}"))),
        }
    }
}

fn primitive(rng: &mut ChaCha8Rng, m: &Modulus) -> [u128; 2] {
    let p = m.p() as u128;
    loop {
        let c = [rng.gen_range(0..m.modulus()), rng.gen_range(0..m.modulus())];
        if c[0] % p != 0 || c[1] % p != 0 {
            return c;
        }
    }
}

/// A primitive column in `class`, random above the first digit.
fn in_class(rng: &mut ChaCha8Rng, m: &Modulus, class: ProjClass) -> [u128; 2] {
    let p = m.p() as u128;
    let (u, v) = class.representative(m.p());
    let lam = rng.gen_range(1..p);
    let high = m.modulus() / p;
    [
        (u as u128 * lam % p) + p * rng.gen_range(0..high),
        (v as u128 * lam % p) + p * rng.gen_range(0..high),
    ]
}

pub fn random_system(p: u64, tau: u32, precision: u32, s: usize, seed: u64, profile: Profile) -> Result<System> {
    if s == 0 {
        return Err(invalid("s must be at least 1"));
    }
    let m = Modulus::new(p, precision)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<[u128; 2]> = match profile {
        Profile::Normalized => {
            let mut cols: Vec<[u128; 2]> = (0..s).map(|_| primitive(&mut rng, &m)).collect();
            let sys = System::new(p, tau, precision, &cols)?;
            if sys.census().violated_bound().is_some() {
                // move columns out of the largest class until q_0 is big enough
                let d = sys.degree() as usize;
                let big = sys.census().largest_class().0;
                let other = ProjClass::from_index((big + 1) % ProjClass::count(p), p).expect("class index");
                let mut q0 = sys.census().q0();
                for i in (0..s).rev() {
                    if 2 * d * q0 >= s {
                        break;
                    }
                    if sys.class_of(i).map(ProjClass::index) == Some(big) {
                        cols[i] = in_class(&mut rng, &m, other);
                        q0 += 1;
                    }
                }
            }
            cols
        }
        Profile::Raw => (0..s)
            .map(|_| {
                let deepest = (degree(p, tau)? as u32).min(precision - 1);
                let v = rng.gen_range(0..=deepest);
                let c = primitive(&mut rng, &m);
                let scale = m.p_pow(v);
                Ok([c[0] * scale % m.modulus(), c[1] * scale % m.modulus()])
            })
            .collect::<Result<_>>()?,
    };
    System::new(p, tau, precision, &cols)
}
