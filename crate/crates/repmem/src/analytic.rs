//! Closed-form average-fidelity expressions for repetition-code memories and
//! the quantities derived from them: break-even inequalities, the
//! infinite-cycle limit, and optimal code-size selection.
//!
//! All formulas depend on time only through the ratios t/T1 and t/T2 with
//! 1/T2 = 1/T2* + 1/(2 T1); `T1 = f64::INFINITY` selects the pure-dephasing
//! regime. Every expression here has a simulation counterpart in
//! [`crate::circuits`] and the two are cross-checked to 1e-10 by the
//! acceptance suite.

use crate::circuits::Decomposition;
use crate::{Error, Result};

/// Time parameters entering the closed forms. `t` is the idle time of a
/// single cycle, or the total storage time for the multi-cycle formulas.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormParams {
    pub t1: f64,
    pub t2star: f64,
    pub t: f64,
}

impl ClosedFormParams {
    pub fn new(t1: f64, t2star: f64, t: f64) -> Result<Self> {
        if t1.is_nan() || t1 <= 0.0 {
            return Err(Error::InvalidTime(format!("T1 must be positive; got {t1}")));
        }
        if t2star.is_nan() || t2star <= 0.0 {
            return Err(Error::InvalidTime(format!(
                "T2* must be positive; got {t2star}"
            )));
        }
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidTime(format!("t must be >= 0; got {t}")));
        }
        Ok(Self { t1, t2star, t })
    }

    /// 1/T2 = 1/T2* + 1/(2 T1).
    pub fn t2(&self) -> f64 {
        let inv = 1.0 / self.t2star + 1.0 / (2.0 * self.t1);
        if inv == 0.0 {
            f64::INFINITY
        } else {
            1.0 / inv
        }
    }

    /// e^{-t/T1}.
    fn q1(&self) -> f64 {
        exp_decay(self.t, self.t1)
    }

    /// e^{-t/T2}.
    fn q2(&self) -> f64 {
        exp_decay(self.t, self.t2())
    }
}

#[inline]
fn exp_decay(t: f64, tau: f64) -> f64 {
    if tau.is_infinite() {
        1.0
    } else {
        (-t / tau).exp()
    }
}

/// Average fidelity of a single idle qubit: (3 + e^{-t/T1} + 2 e^{-t/T2}) / 6.
pub fn f_idle(p: &ClosedFormParams) -> f64 {
    (3.0 + p.q1() + 2.0 * p.q2()) / 6.0
}

/// One cycle of the three-qubit bit-flip code:
/// (3 + 2 e^{-3t/T2} - 2 e^{-3t/T1} + 3 e^{-2t/T1}) / 6.
pub fn f_bit(p: &ClosedFormParams) -> f64 {
    let (q1, q2) = (p.q1(), p.q2());
    (3.0 + 2.0 * q2.powi(3) - 2.0 * q1.powi(3) + 3.0 * q1.powi(2)) / 6.0
}

/// One cycle of the three-qubit phase-flip code:
/// [6 + 2 e^{-3t/T1} - 2 e^{-3t/T2} + 3 e^{-t/T2}(1 + e^{-2t/T1})] / 12.
pub fn f_phase(p: &ClosedFormParams) -> f64 {
    let (q1, q2) = (p.q1(), p.q2());
    (6.0 + 2.0 * q1.powi(3) - 2.0 * q2.powi(3) + 3.0 * q2 * (1.0 + q1.powi(2))) / 12.0
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// One cycle of the n-qubit phase-flip code (n odd):
/// 1/3 + (1/3) 2^{-n} sum_{k=0}^{(n-1)/2} C(n,k)
///   [(1-q2)^k (1+q2)^{n-k} + (q1-q2)^k (q1+q2)^{n-k}].
/// Reduces to [`f_idle`] at n = 1 and [`f_phase`] at n = 3.
pub fn f_phase_n(n: usize, p: &ClosedFormParams) -> Result<f64> {
    if n % 2 == 0 || n < 1 {
        return Err(Error::InvalidCodeSize(n));
    }
    let (q1, q2) = (p.q1(), p.q2());
    let mut sum = 0.0;
    for k in 0..=(n - 1) / 2 {
        let ki = k as i32;
        let ni = (n - k) as i32;
        sum += binomial(n, k)
            * ((1.0 - q2).powi(ki) * (1.0 + q2).powi(ni)
                + (q1 - q2).powi(ki) * (q1 + q2).powi(ni));
    }
    Ok(1.0 / 3.0 + sum / (3.0 * 2f64.powi(n as i32)))
}

/// N cycles of the three-qubit phase-flip code with ancilla reset between
/// cycles; `p.t` is the total storage time and each cycle idles for t/N.
///
/// Evaluated as
/// (1/6) {3 + e^{-3t/T1} + exp[N ln(A/2) - 3t/T2] + exp[N ln(B/2) - 3t/T2]}
/// with A = 3 e^{2t/(N T2)} - 1 and B = 3 e^{2t/(N T2)} e^{-2t/(N T1)} - 1,
/// which avoids overflow of A^N at large N.
pub fn f_phase_reset(n_cycles: usize, p: &ClosedFormParams) -> Result<f64> {
    if n_cycles < 1 {
        return Err(Error::InvalidCycleCount);
    }
    let nn = n_cycles as f64;
    let t2 = p.t2();
    let x = if t2.is_infinite() { 0.0 } else { 2.0 * p.t / (nn * t2) };
    let y = if p.t1.is_infinite() { 0.0 } else { 2.0 * p.t / (nn * p.t1) };
    let exp3t2 = if t2.is_infinite() { 0.0 } else { 3.0 * p.t / t2 };
    let a_half = (3.0 * x.exp() - 1.0) / 2.0;
    let b_half = (3.0 * (x - y).exp() - 1.0) / 2.0;
    let term = |half: f64| -> f64 {
        if half > 0.0 {
            (nn * half.ln() - exp3t2).exp()
        } else {
            // B can go negative for very long per-cycle idles; integer power.
            half.powi(n_cycles as i32) * (-exp3t2).exp()
        }
    };
    Ok((3.0 + p.q1().powi(3) + term(a_half) + term(b_half)) / 6.0)
}

/// N -> infinity limit of [`f_phase_reset`]: (2 + e^{-3t/T1}) / 3. Pure
/// dephasing is fully removed; only threefold-amplified relaxation remains.
pub fn f_phase_reset_limit(p: &ClosedFormParams) -> f64 {
    (2.0 + p.q1().powi(3)) / 3.0
}

/// Two cycles without ancilla reset at total time `p.t`:
/// [12 + 4 e^{-3t/T1} - 2 e^{-3t/T2} + 5 e^{-t/T2}(1 + e^{-2t/T1})] / 24.
pub fn f_phase_noreset_2(p: &ClosedFormParams) -> f64 {
    let (q1, q2) = (p.q1(), p.q2());
    (12.0 + 4.0 * q1.powi(3) - 2.0 * q2.powi(3) + 5.0 * q2 * (1.0 + q1.powi(2))) / 24.0
}

/// First-order gate-error coefficients (f1, f2) of the linearized fidelity
/// drop F = F_phase - p1 f1 - p2 f2 after one cycle.
///
/// f1 depends on the circuit realization:
///   CNOT:  (4/3) (2 e^{-3t/T1} - 2 e^{-3t/T2} + 2 e^{-t/T2} + 3 e^{-t/T2 - 2t/T1})
///   CS-CZ: (4/9) (4 e^{-3t/T1} - 6 e^{-3t/T2} + 5 e^{-t/T2} + 7 e^{-t/T2 - 2t/T1})
/// while f2 is common to both realizations:
///   (8/45) (8 e^{-3t/T1} - 8 e^{-3t/T2} + 11 e^{-t/T2} + 12 e^{-t/T2 - 2t/T1}).
/// Every coefficient is reproduced exactly by single-faulty-gate extraction
/// from the corresponding circuit (see the scan module's tests).
pub fn gate_error_coefficients(decomposition: Decomposition, p: &ClosedFormParams) -> (f64, f64) {
    let (q1, q2) = (p.q1(), p.q2());
    let (e3t1, e3t2, et2) = (q1.powi(3), q2.powi(3), q2);
    let emix = q2 * q1.powi(2); // e^{-t(1/T2 + 2/T1)}
    let f1 = match decomposition {
        Decomposition::Cnot => (4.0 / 3.0) * (2.0 * e3t1 - 2.0 * e3t2 + 2.0 * et2 + 3.0 * emix),
        Decomposition::Cscz => (4.0 / 9.0) * (4.0 * e3t1 - 6.0 * e3t2 + 5.0 * et2 + 7.0 * emix),
        Decomposition::Ideal => 0.0,
    };
    let f2 = match decomposition {
        Decomposition::Ideal => 0.0,
        _ => (8.0 / 45.0) * (8.0 * e3t1 - 8.0 * e3t2 + 11.0 * et2 + 12.0 * emix),
    };
    (f1, f2)
}

/// Linearized one-cycle fidelity with gate errors:
/// F_phase - p1 f1 - p2 f2. Valid for p1, p2 << 1.
pub fn f_phase_error(
    decomposition: Decomposition,
    p: &ClosedFormParams,
    p1: f64,
    p2: f64,
) -> f64 {
    let (f1, f2) = gate_error_coefficients(decomposition, p);
    f_phase(p) - p1 * f1 - p2 * f2
}

/// The break-even half-plane p2 < c0 - c1 p1.
///
/// c0 <= 0 signals that break-even is unreachable at any gate error for
/// these parameters (the code loses to the idle qubit even with perfect
/// gates).
#[derive(Debug, Clone, Copy)]
pub struct BreakEvenLine {
    pub c0: f64,
    pub c1: f64,
}

impl BreakEvenLine {
    /// Whether (p1, p2) satisfies the break-even condition.
    pub fn admits(&self, p1: f64, p2: f64) -> bool {
        p2 < self.c0 - self.c1 * p1
    }
}

/// Region of gate errors where one cycle of the phase-flip code beats the
/// idle qubit: F_phase^error > F_idle, i.e. p2 < c0 - c1 p1 with
/// c0 = (F_phase - F_idle)/f2 and c1 = f1/f2.
pub fn breakeven_inequality(decomposition: Decomposition, p: &ClosedFormParams) -> BreakEvenLine {
    let (f1, f2) = gate_error_coefficients(decomposition, p);
    BreakEvenLine {
        c0: (f_phase(p) - f_idle(p)) / f2,
        c1: f1 / f2,
    }
}

/// Best odd code size n in {1, 3, ..., n_max} for one error-correction cycle
/// with perfect gates, together with its fidelity. n = 1 means the bare idle
/// qubit. Ties break toward smaller n.
pub fn optimal_code_size(p: &ClosedFormParams, n_max: usize) -> Result<(usize, f64)> {
    if n_max % 2 == 0 || n_max < 1 {
        return Err(Error::InvalidCodeSize(n_max));
    }
    let mut best = (1usize, f_idle(p));
    let mut n = 3;
    while n <= n_max {
        let f = f_phase_n(n, p)?;
        if f > best.1 {
            best = (n, f);
        }
        n += 2;
    }
    Ok(best)
}
