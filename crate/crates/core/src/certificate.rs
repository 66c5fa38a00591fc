use serde::Serialize;

use crate::system::{ProjClass, System};

/// A set of columns whose coefficient sums vanish mod `p^(tau+1)` and which
/// spans rank two mod `p`. Setting those variables to 1 and the rest to 0
/// solves the system mod `p^(tau+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub support: Vec<usize>,
}

impl Certificate {
    pub fn new(mut support: Vec<usize>) -> Self {
        support.sort_unstable();
        support.dedup();
        Certificate { support }
    }
}

/// Why a candidate support fails, or `Ok` if it is a certificate.
pub fn check_certificate(sys: &System, cert: &Certificate) -> Result<(), String> {
    if cert.support.is_empty() {
        return Err("empty support".into());
    }
    if cert.support.windows(2).any(|w| w[0] >= w[1]) {
        return Err("support must be sorted without repeats".into());
    }
    if let Some(&i) = cert.support.iter().find(|&&i| i >= sys.len()) {
        return Err(format!("index {i} out of range for s = {}", sys.len()));
    }
    let p = sys.p();
    let target = sys.tau() + 1;
    let m = sys.modulus();
    let mut sums = [crate::padic::Residue::ZERO; 2];
    for &i in &cert.support {
        let c = sys.column(i);
        sums = [m.add(sums[0], c[0]), m.add(sums[1], c[1])];
    }
    for (r, &x) in sums.iter().enumerate() {
        if m.vord(x).is_some_and(|v| v < target) {
            return Err(format!("row {} sums to a value of valuation {} < {target}", r + 1, m.vord(x).unwrap()));
        }
    }
    let pp = p as u128;
    let mut first: Option<ProjClass> = None;
    for &i in &cert.support {
        let c = sys.column(i);
        if let Some(class) = ProjClass::of((c[0].value() % pp) as u64, (c[1].value() % pp) as u64, p) {
            match first {
                None => first = Some(class),
                Some(f) if f != class => return Ok(()),
                _ => {}
            }
        }
    }
    Err("support has rank below two mod p".into())
}

pub fn verify(sys: &System, cert: &Certificate) -> bool {
    check_certificate(sys, cert).is_ok()
}
