//! Information measures (base-2 logarithms) and state/channel composition.
//!
//! `0 log 0` and `0 log (0/0)` are taken to be zero throughout.

use crate::dist::{Avc, Channel, ConditionalChannel, Dist};
use crate::error::{Error, Result};
use crate::types::JointType;

/// Shannon entropy in bits of a nonnegative weight vector summing to one.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// `V(y|x) = Σ_s W(y|x,s) Q(s)`.
pub fn compose_state(avc: &Avc, q: &Dist) -> Result<Channel> {
    if q.len() != avc.ns() {
        return Err(Error::Dimension(format!(
            "state distribution of length {} for {} states",
            q.len(),
            avc.ns()
        )));
    }
    let (nx, ns, ny) = (avc.nx(), avc.ns(), avc.ny());
    let mut v = vec![0.0; nx * ny];
    for x in 0..nx {
        let row = &mut v[x * ny..(x + 1) * ny];
        for s in 0..ns {
            let qs = q[s];
            if qs == 0.0 {
                continue;
            }
            for (acc, w) in row.iter_mut().zip(avc.w_row(x, s)) {
                *acc += qs * w;
            }
        }
    }
    Ok(Channel::from_raw(nx, ny, v))
}

/// `V(y|x) = Σ_s W(y|x,s) U(s|x)` for an input-dependent state kernel.
pub fn compose_dependent(avc: &Avc, u: &ConditionalChannel) -> Result<Channel> {
    if u.arity() != 1 || u.nx() != avc.nx() || u.ns() != avc.ns() {
        return Err(Error::Dimension(format!(
            "kernel of arity {} over {}x{} for AVC with {} inputs and {} states",
            u.arity(),
            u.nx(),
            u.ns(),
            avc.nx(),
            avc.ns()
        )));
    }
    let (nx, ny) = (avc.nx(), avc.ny());
    let mut v = vec![0.0; nx * ny];
    for x in 0..nx {
        let row = &mut v[x * ny..(x + 1) * ny];
        for (s, &us) in u.row(x).iter().enumerate() {
            if us == 0.0 {
                continue;
            }
            for (acc, w) in row.iter_mut().zip(avc.w_row(x, s)) {
                *acc += us * w;
            }
        }
    }
    Ok(Channel::from_raw(nx, ny, v))
}

/// Output distribution `(PV)(y) = Σ_x P(x) V(y|x)`.
pub fn output_distribution(p: &[f64], v: &[f64], ny: usize) -> Vec<f64> {
    let mut out = vec![0.0; ny];
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (acc, &vy) in out.iter_mut().zip(&v[x * ny..(x + 1) * ny]) {
            *acc += px * vy;
        }
    }
    out
}

/// `I(P, V)` on a raw row-major channel table.
pub(crate) fn mutual_information_raw(p: &[f64], v: &[f64], ny: usize) -> f64 {
    let py = output_distribution(p, v, ny);
    let mut total = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (y, &vy) in v[x * ny..(x + 1) * ny].iter().enumerate() {
            if vy > 0.0 {
                total += px * vy * (vy / py[y]).log2();
            }
        }
    }
    total.max(0.0)
}

/// Mutual information `I(P, V)` in bits between input and output of `V`.
pub fn mutual_information(p: &Dist, v: &Channel) -> Result<f64> {
    if p.len() != v.nx() {
        return Err(Error::Dimension(format!(
            "input distribution of length {} for a channel with {} inputs",
            p.len(),
            v.nx()
        )));
    }
    Ok(mutual_information_raw(p.as_slice(), v.as_slice(), v.ny()))
}

/// Gradient of `Q ↦ I(P, W_Q)` with `W_Q = Σ_s Q(s) W(·|·,s)`:
/// `Σ_{x,y} P(x) W(y|x,s) log2(W_Q(y|x) / (P W_Q)(y))` for each state `s`.
pub fn state_gradient(avc: &Avc, p: &Dist, q: &Dist) -> Result<Vec<f64>> {
    let v = compose_state(avc, q)?;
    if p.len() != avc.nx() {
        return Err(Error::Dimension(format!(
            "input distribution of length {} for {} inputs",
            p.len(),
            avc.nx()
        )));
    }
    let ny = avc.ny();
    let py = output_distribution(p.as_slice(), v.as_slice(), ny);
    let mut grad = vec![0.0; avc.ns()];
    for (s, g) in grad.iter_mut().enumerate() {
        for x in 0..avc.nx() {
            if p[x] == 0.0 {
                continue;
            }
            for (y, &w) in avc.w_row(x, s).iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let vy = v.get(x, y);
                *g += if vy > 0.0 {
                    p[x] * w * (vy / py[y]).log2()
                } else {
                    f64::NEG_INFINITY
                };
            }
        }
    }
    Ok(grad)
}

/// `D(p ‖ q)` in bits; infinite when `p` is not absolutely continuous w.r.t. `q`.
pub fn kl_divergence(p: &Dist, q: &Dist) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "divergence between lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(kl_divergence_raw(p.as_slice(), q.as_slice()))
}

pub(crate) fn kl_divergence_raw(p: &[f64], q: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).log2();
        }
    }
    d.max(0.0)
}

/// `I(A; B | C)` in bits for a joint type over three coordinates `(A, B, C)`.
pub fn conditional_mutual_information(joint: &JointType) -> Result<f64> {
    if joint.dims().len() != 3 {
        return Err(Error::Dimension(format!(
            "conditional mutual information needs 3 coordinates, got {}",
            joint.dims().len()
        )));
    }
    let h_ac = joint.marginal(&[0, 2]).entropy();
    let h_bc = joint.marginal(&[1, 2]).entropy();
    let h_c = joint.marginal(&[2]).entropy();
    let h_abc = joint.entropy();
    Ok((h_ac + h_bc - h_abc - h_c).max(0.0))
}
