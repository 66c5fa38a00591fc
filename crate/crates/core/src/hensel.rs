//! Lifting a certificate to a solution modulo higher powers of `p`.
//!
//! Two support columns `i, j` with a unit determinant mod `p` are corrected
//! at every stage. For `e >= 1`, `(x (1 + p^e w))^d = x^d (1 + (p-1) p^(e+tau) w)`
//! mod `p^(e+tau+1)`, so multiplying `x_i, x_j` by `1 + p^(k-tau) w` shifts the
//! residual by `-(a_i w_i + a_j w_j, b_i w_i + b_j w_j) p^k` mod `p^(k+1)`: a
//! 2x2 system mod `p` clears the next digit.

use serde::Serialize;

use crate::certificate::{check_certificate, Certificate};
use crate::error::{invalid, Error, Result};
use crate::padic::{Modulus, Residue};
use crate::system::System;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftStage {
    /// The residual is divisible by `p^k` before this stage.
    pub k: u32,
    /// Valuations of both residuals after the stage (`None`: zero mod `p^K`).
    pub valuations: [Option<u32>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftedSolution {
    pub values: Vec<Residue>,
    pub precision: u32,
    pub pair: (usize, usize),
    pub stages: Vec<LiftStage>,
}

/// `(sum a_i x_i^d, sum b_i x_i^d)` mod `p^K`.
pub fn residual(sys: &System, values: &[Residue]) -> [Residue; 2] {
    let m = sys.modulus();
    let d = sys.degree() as u128;
    let mut out = [Residue::ZERO; 2];
    for (c, &x) in sys.columns().iter().zip(values) {
        if x.is_zero() {
            continue;
        }
        let xd = m.pow(x, d);
        out = [m.add(out[0], m.mul(c[0], xd)), m.add(out[1], m.mul(c[1], xd))];
    }
    out
}

fn unit_pair(sys: &System, support: &[usize]) -> Option<(usize, usize)> {
    let p = sys.p() as u128;
    for (n, &i) in support.iter().enumerate() {
        for &j in &support[n + 1..] {
            let [a, b] = sys.column(i);
            let [c, e] = sys.column(j);
            let det = ((a.value() % p) * (e.value() % p) + p * p - (c.value() % p) * (b.value() % p)) % p;
            if det != 0 {
                return Some((i, j));
            }
        }
    }
    None
}

fn valuations(m: &Modulus, r: [Residue; 2]) -> [Option<u32>; 2] {
    [m.vord(r[0]), m.vord(r[1])]
}

fn at_least(v: Option<u32>, k: u32) -> bool {
    v.is_none_or(|v| v >= k)
}

/// Lift the all-ones support assignment of `cert` to a solution mod
/// `p^k_target`.
pub fn lift(sys: &System, cert: &Certificate, k_target: u32) -> Result<LiftedSolution> {
    check_certificate(sys, cert).map_err(|e| invalid(format!("not a certificate: {e}")))?;
    let tau = sys.tau();
    if k_target > sys.precision() {
        return Err(invalid(format!(
            "target precision {k_target} exceeds system precision {}",
            sys.precision()
        )));
    }
    if k_target < tau + 1 {
        return Err(invalid(format!("target precision must be at least tau+1 = {}", tau + 1)));
    }
    let pair = unit_pair(sys, &cert.support).ok_or_else(|| invalid("support has no unit-determinant pair"))?;
    let m = *sys.modulus();
    let p = sys.p();
    let fp = Modulus::new(p, 1)?;
    let (i, j) = pair;
    let [ai, bi] = sys.column(i).map(|x| fp.residue(x.value()));
    let [aj, bj] = sys.column(j).map(|x| fp.residue(x.value()));
    let det_inv = fp.inv(fp.sub(fp.mul(ai, bj), fp.mul(aj, bi)))?;
    let mut values = vec![Residue::ZERO; sys.len()];
    for &k in &cert.support {
        values[k] = Residue::ONE;
    }
    let mut r = residual(sys, &values);
    let mut stages = Vec::new();
    for k in tau + 1..k_target {
        let vals = valuations(&m, r);
        if !(at_least(vals[0], k) && at_least(vals[1], k)) {
            return Err(Error::PipelineFailure {
                stage: format!("lift stage {k}"),
                detail: format!("residual valuations {vals:?} below {k}"),
            });
        }
        let rhs = [fp.residue(m.div_p_pow(r[0], k)?.value()), fp.residue(m.div_p_pow(r[1], k)?.value())];
        // [ai aj; bi bj] w = rhs
        let wi = fp.mul(det_inv, fp.sub(fp.mul(bj, rhs[0]), fp.mul(aj, rhs[1])));
        let wj = fp.mul(det_inv, fp.sub(fp.mul(ai, rhs[1]), fp.mul(bi, rhs[0])));
        for (idx, w) in [(i, wi), (j, wj)] {
            let factor = m.add(Residue::ONE, m.mul_p_pow(m.residue(w.value()), k - tau));
            values[idx] = m.mul(values[idx], factor);
        }
        r = residual(sys, &values);
        let after = valuations(&m, r);
        if !(at_least(after[0], k + 1) && at_least(after[1], k + 1)) {
            return Err(Error::PipelineFailure {
                stage: format!("lift stage {k}"),
                detail: format!("residual valuations {after:?} did not reach {}", k + 1),
            });
        }
        stages.push(LiftStage { k, valuations: after });
    }
    Ok(LiftedSolution { values, precision: k_target, pair, stages })
}

/// Whether `values` solves both forms mod `p^k_check` with some unit entry.
pub fn check_solution(sys: &System, values: &[Residue], k_check: u32) -> bool {
    if values.len() != sys.len() || k_check > sys.precision() {
        return false;
    }
    let m = sys.modulus();
    if !values.iter().any(|&x| m.is_unit(x)) {
        return false;
    }
    residual(sys, values).iter().all(|&x| at_least(m.vord(x), k_check))
}
