//! Kraus noise channels: combined amplitude and phase damping for idling
//! qubits, depolarizing noise for faulty gates.
//!
//! The damping channel uses the exact three-operator Kraus form with
//! gamma = 1 - e^{-t/T1} and alpha = 1 - e^{-2t/T2*}; no Pauli-twirling
//! approximation anywhere. A qubit passing through it has its excited
//! population scaled by e^{-t/T1} and its coherences by e^{-t/T2} with
//! 1/T2 = 1/T2* + 1/(2 T1).
//!
//! `T1 = f64::INFINITY` (and likewise `T2*`) is accepted and disables the
//! corresponding decay; this covers the pure-dephasing regime of
//! semiconductor spin qubits where relaxation is negligible.

use crate::densmat::{self, cr, CMat, DensityMatrix};
use crate::{Error, Result};

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    arity: usize,
    ops: Vec<CMat>,
}

pub const TOL_CPTP: f64 = 1e-12;

impl KrausChannel {
    /// Validates completeness (sum of E_k^dagger E_k = I within 1e-12).
    pub fn new(arity: usize, ops: Vec<CMat>) -> Result<Self> {
        let dim = 1usize << arity;
        for op in &ops {
            if op.dim() != (dim, dim) {
                return Err(Error::DimMismatch(format!(
                    "Kraus operator shape {:?} does not match arity {arity}",
                    op.dim()
                )));
            }
        }
        let mut acc = CMat::zeros((dim, dim));
        for op in &ops {
            acc += &densmat::dagger(op).dot(op);
        }
        let dev = densmat::max_abs_diff(&acc, &densmat::identity(dim));
        if dev > TOL_CPTP {
            return Err(Error::NotCptp(dev));
        }
        Ok(Self { arity, ops })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn operators(&self) -> &[CMat] {
        &self.ops
    }
}

fn check_time(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v <= 0.0 {
        return Err(Error::InvalidTime(format!(
            "{name} must be positive (or infinite to disable); got {v}"
        )));
    }
    Ok(())
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Decay exponent e^{-t/tau}, with tau = infinity giving exactly 1.
#[inline]
fn decay(t: f64, tau: f64) -> f64 {
    if tau.is_infinite() {
        1.0
    } else {
        (-t / tau).exp()
    }
}

/// Combined amplitude and phase damping acting for a time `t`.
pub fn damping_channel(t1: f64, t2star: f64, t: f64) -> Result<KrausChannel> {
    check_time("T1", t1)?;
    check_time("T2*", t2star)?;
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidTime(format!("idle time must be >= 0; got {t}")));
    }
    let gamma = 1.0 - decay(t, t1);
    let alpha = 1.0 - decay(2.0 * t, t2star);
    let z = cr(0.0);
    let e1 = ndarray::array![
        [cr((1.0 - alpha).sqrt()), z],
        [z, cr((1.0 - gamma).sqrt())]
    ];
    let e2 = ndarray::array![[z, cr(gamma.sqrt())], [z, z]];
    let e3 = ndarray::array![[cr(alpha.sqrt()), z], [z, z]];
    KrausChannel::new(1, vec![e1, e2, e3])
}

/// Single-qubit depolarizing channel rho -> (1 - 4p/3) rho + (2p/3) I.
pub fn depolarizing_1q(p1: f64) -> Result<KrausChannel> {
    check_prob(p1)?;
    let ops = vec![
        densmat::id2() * cr((1.0 - p1).sqrt()),
        densmat::pauli_x() * cr((p1 / 3.0).sqrt()),
        densmat::pauli_y() * cr((p1 / 3.0).sqrt()),
        densmat::pauli_z() * cr((p1 / 3.0).sqrt()),
    ];
    KrausChannel::new(1, ops)
}

/// Two-qubit depolarizing channel rho -> (1 - 16p/15) rho + (4p/15) I,
/// with sixteen Kraus operators built from Pauli tensor products.
pub fn depolarizing_2q(p2: f64) -> Result<KrausChannel> {
    check_prob(p2)?;
    let paulis = [
        densmat::id2(),
        densmat::pauli_x(),
        densmat::pauli_y(),
        densmat::pauli_z(),
    ];
    let mut ops = Vec::with_capacity(16);
    ops.push(densmat::identity(4) * cr((1.0 - p2).sqrt()));
    let w = cr((p2 / 15.0).sqrt());
    for (i, p) in paulis.iter().enumerate() {
        for (j, q) in paulis.iter().enumerate() {
            if i == 0 && j == 0 {
                continue;
            }
            ops.push(densmat::kron(p, q) * w);
        }
    }
    KrausChannel::new(2, ops)
}

/// Applies the channel on `targets`, identity on the rest of the register.
pub fn apply_channel(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    targets: &[usize],
) -> Result<DensityMatrix> {
    if ch.arity != targets.len() {
        return Err(Error::ArityMismatch {
            arity: ch.arity,
            targets: targets.len(),
        });
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= rho.n_qubits() {
            return Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: rho.n_qubits(),
            });
        }
        if targets[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(densmat::kraus_sum_on_targets(&ch.ops, targets, rho))
}

/// Idle-noise parameters plus gate-error probabilities for a protocol run.
///
/// `t1` and `t2star` may be `f64::INFINITY` to disable relaxation or pure
/// dephasing. The combined decoherence time follows 1/T2 = 1/T2* + 1/(2 T1).
#[derive(Debug, Clone, Copy)]
pub struct NoiseParams {
    pub t1: f64,
    pub t2star: f64,
    pub p1: f64,
    pub p2: f64,
}

impl NoiseParams {
    pub fn new(t1: f64, t2star: f64, p1: f64, p2: f64) -> Result<Self> {
        check_time("T1", t1)?;
        check_time("T2*", t2star)?;
        check_prob(p1)?;
        check_prob(p2)?;
        Ok(Self { t1, t2star, p1, p2 })
    }

    /// Noise-free parameters (infinite coherence times, perfect gates).
    pub fn noiseless() -> Self {
        Self {
            t1: f64::INFINITY,
            t2star: f64::INFINITY,
            p1: 0.0,
            p2: 0.0,
        }
    }

    /// Combined decoherence time from 1/T2 = 1/T2* + 1/(2 T1).
    pub fn t2(&self) -> f64 {
        let inv = 1.0 / self.t2star + 1.0 / (2.0 * self.t1);
        if inv == 0.0 {
            f64::INFINITY
        } else {
            1.0 / inv
        }
    }
}
