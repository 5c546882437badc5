//! Dense complex linear algebra for small qubit registers.
//!
//! States and operators are stored as dense `ndarray` arrays of `Complex64`.
//! Registers are limited to a handful of qubits (the memory circuits here never
//! exceed nine, i.e. 512x512 matrices), so everything is straightforward dense
//! arithmetic with no sparse or stabilizer back end.
//!
//! Qubit ordering convention: qubit 0 is the data qubit and occupies the most
//! significant bit of a basis index, so `kron(a, b)` places `a` on the
//! lower-numbered qubits. All values are immutable after construction and all
//! operations are pure functions.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

pub const TOL_UNITARY: f64 = 1e-10;
pub const TOL_STATE: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// 2x2 identity.
pub fn id2() -> CMat {
    identity(2)
}

pub fn identity(dim: usize) -> CMat {
    CMat::eye(dim)
}

pub fn pauli_x() -> CMat {
    ndarray::array![[cr(0.0), cr(1.0)], [cr(1.0), cr(0.0)]]
}

pub fn pauli_y() -> CMat {
    ndarray::array![[cr(0.0), c(0.0, -1.0)], [c(0.0, 1.0), cr(0.0)]]
}

pub fn pauli_z() -> CMat {
    ndarray::array![[cr(1.0), cr(0.0)], [cr(0.0), cr(-1.0)]]
}

pub fn hadamard() -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ndarray::array![[cr(h), cr(h)], [cr(h), cr(-h)]]
}

/// +90 degree rotation about Y: maps |0> to |+>. Composes with a Z gate into
/// an exact Hadamard (Y90 . Z = H).
pub fn y90() -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ndarray::array![[cr(h), cr(-h)], [cr(h), cr(h)]]
}

/// S = diag(1, i).
pub fn phase_s() -> CMat {
    ndarray::array![[cr(1.0), cr(0.0)], [cr(0.0), c(0.0, 1.0)]]
}

/// S^-1 = diag(1, -i).
pub fn phase_s_dag() -> CMat {
    ndarray::array![[cr(1.0), cr(0.0)], [cr(0.0), c(0.0, -1.0)]]
}

/// T = diag(1, e^{i pi/4}).
pub fn t_gate() -> CMat {
    let p = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    ndarray::array![[cr(1.0), cr(0.0)], [cr(0.0), p]]
}

pub fn t_gate_dag() -> CMat {
    dagger(&t_gate())
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    let (r, cdim) = m.dim();
    CMat::from_shape_fn((cdim, r), |(i, j)| m[(j, i)].conj())
}

/// Kronecker product; `a` goes on the lower-numbered (more significant) qubits.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == cr(0.0) {
                continue;
            }
            let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.assign(&(b * aij));
        }
    }
    out
}

pub fn trace(m: &CMat) -> C64 {
    m.diag().sum()
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    let (r, cdim) = m.dim();
    if r != cdim {
        return false;
    }
    let prod = dagger(m).dot(m);
    let mut dev: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let want = if i == j { cr(1.0) } else { cr(0.0) };
            dev = dev.max((prod[(i, j)] - want).norm());
        }
    }
    dev <= tol
}

/// Maximum absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Checks targets are distinct and in range.
fn validate_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        if targets[..i].contains(&q) {
            return Err(Error::DuplicateTarget(q));
        }
    }
    Ok(())
}

/// A normalized pure state on a power-of-two dimension.
#[derive(Debug, Clone)]
pub struct PureState {
    amps: CVec,
}

impl PureState {
    pub fn new(amps: CVec) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimMismatch(format!(
                "state dimension {dim} is not a power of two"
            )));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > TOL_STATE {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amps })
    }

    /// Single-qubit state a|0> + b|1>.
    pub fn qubit(a: C64, b: C64) -> Result<Self> {
        Self::new(ndarray::array![a, b])
    }

    pub fn ket0() -> Self {
        Self::qubit(cr(1.0), cr(0.0)).unwrap()
    }

    pub fn ket1() -> Self {
        Self::qubit(cr(0.0), cr(1.0)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    /// |psi><psi| as a raw matrix.
    pub fn projector(&self) -> CMat {
        let d = self.dim();
        CMat::from_shape_fn((d, d), |(i, j)| self.amps[i] * self.amps[j].conj())
    }

    /// Tensor product with `other`, `self` on the lower-numbered qubits.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = CVec::zeros(self.dim() * other.dim());
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                amps[i * other.dim() + j] = self.amps[i] * other.amps[j];
            }
        }
        PureState { amps }
    }
}

/// A density matrix on an ordered qubit register.
///
/// Invariants (checked on construction with [`DensityMatrix::new`]): Hermitian
/// and unit trace within 1e-12. Positivity is not re-verified on every
/// operation; see [`hermitian_eigenvalues`] for explicit spectrum checks.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: CMat,
}

impl DensityMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        let (r, cdim) = mat.dim();
        if r != cdim || !r.is_power_of_two() || r == 0 {
            return Err(Error::DimMismatch(format!(
                "density matrix shape {r}x{cdim} is not square power-of-two"
            )));
        }
        let tr = trace(&mat);
        if (tr - cr(1.0)).norm() > TOL_STATE {
            return Err(Error::DimMismatch(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        let herm_dev = {
            let mut dev: f64 = 0.0;
            for i in 0..r {
                for j in i..r {
                    dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
                }
            }
            dev
        };
        if herm_dev > TOL_STATE {
            return Err(Error::DimMismatch(format!(
                "density matrix is not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        Ok(Self {
            n_qubits: r.trailing_zeros() as usize,
            mat,
        })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            n_qubits: psi.n_qubits(),
            mat: psi.projector(),
        }
    }

    /// |0...0><0...0| on `n_qubits`.
    pub fn ground(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut mat = CMat::zeros((dim, dim));
        mat[(0, 0)] = cr(1.0);
        Self { n_qubits, mat }
    }

    /// Maximally mixed state I/2^n.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            mat: identity(dim) * cr(1.0 / dim as f64),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        trace(&self.mat)
    }

    /// Tensor product, `self` on the lower-numbered qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits + other.n_qubits,
            mat: kron(&self.mat, &other.mat),
        }
    }

    pub(crate) fn from_parts_unchecked(n_qubits: usize, mat: CMat) -> Self {
        Self { n_qubits, mat }
    }
}

/// Bit position (from the least significant end) of qubit `q` in an `n`-qubit
/// register index.
#[inline]
fn bitpos(q: usize, n: usize) -> usize {
    n - 1 - q
}

/// Applies a 2^k x 2^k operator to the row index of `m`, embedded on `targets`.
/// `targets[0]` corresponds to the most significant bit of the operator index.
fn apply_op_rows(op: &CMat, targets: &[usize], n_qubits: usize, m: &CMat) -> CMat {
    let dim = m.dim().0;
    let k = targets.len();
    let kd = 1usize << k;
    let pos: Vec<usize> = targets.iter().map(|&q| bitpos(q, n_qubits)).collect();
    let mut out = CMat::zeros(m.raw_dim());
    for i in 0..dim {
        // Extract the operator-row index from i and clear those bits.
        let mut ti = 0usize;
        let mut base = i;
        for (j, &p) in pos.iter().enumerate() {
            ti |= ((i >> p) & 1) << (k - 1 - j);
            base &= !(1 << p);
        }
        let mut out_row = out.row_mut(i);
        for tj in 0..kd {
            let coeff = op[(ti, tj)];
            if coeff == cr(0.0) {
                continue;
            }
            let mut src = base;
            for (j, &p) in pos.iter().enumerate() {
                src |= ((tj >> (k - 1 - j)) & 1) << p;
            }
            out_row.scaled_add(coeff, &m.row(src));
        }
    }
    out
}

/// E rho E^dagger with E embedded on `targets`.
fn conjugate_on_targets(op: &CMat, targets: &[usize], n_qubits: usize, rho: &CMat) -> CMat {
    let a = apply_op_rows(op, targets, n_qubits, rho);
    let a_dag = dagger(&a);
    apply_op_rows(op, targets, n_qubits, &a_dag)
}

/// rho -> U rho U^dagger with `u` embedded on `targets` and identity elsewhere.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMat, targets: &[usize]) -> Result<DensityMatrix> {
    let (r, cdim) = u.dim();
    let kd = 1usize << targets.len();
    if r != cdim || r != kd {
        return Err(Error::DimMismatch(format!(
            "operator is {r}x{cdim} but {} target(s) require {kd}x{kd}",
            targets.len()
        )));
    }
    validate_targets(targets, rho.n_qubits())?;
    if !is_unitary(u, TOL_UNITARY) {
        let dev = max_abs_diff(&dagger(u).dot(u), &identity(r));
        return Err(Error::NotUnitary(dev));
    }
    Ok(DensityMatrix::from_parts_unchecked(
        rho.n_qubits(),
        conjugate_on_targets(u, targets, rho.n_qubits(), &rho.mat),
    ))
}

/// Same as [`apply_unitary`] without the unitarity check; for internal use by
/// the circuit executor where gate matrices are already validated.
pub(crate) fn apply_unitary_unchecked(rho: &DensityMatrix, u: &CMat, targets: &[usize]) -> DensityMatrix {
    DensityMatrix::from_parts_unchecked(
        rho.n_qubits(),
        conjugate_on_targets(u, targets, rho.n_qubits(), &rho.mat),
    )
}

/// Sum of E_k rho E_k^dagger over the given operators, embedded on `targets`.
pub(crate) fn kraus_sum_on_targets(
    ops: &[CMat],
    targets: &[usize],
    rho: &DensityMatrix,
) -> DensityMatrix {
    let n = rho.n_qubits();
    let mut acc = CMat::zeros(rho.mat.raw_dim());
    for op in ops {
        acc += &conjugate_on_targets(op, targets, n, &rho.mat);
    }
    DensityMatrix::from_parts_unchecked(n, acc)
}

/// (1 - s) rho + s (I/2^k (x) tr_targets rho): mixes in the fully
/// depolarized state on `targets`. Algebraically identical to the Kraus sum
/// of the depolarizing channel (with s = 4p/3 or 16p/15) at a fraction of
/// the work; used by the circuit executor on its hot path.
pub(crate) fn depolarize_on_targets(
    rho: &DensityMatrix,
    targets: &[usize],
    s: f64,
) -> DensityMatrix {
    let n = rho.n_qubits();
    let dim = rho.dim();
    let k = targets.len();
    let kd = 1usize << k;
    let pos: Vec<usize> = targets.iter().map(|&q| bitpos(q, n)).collect();
    let mut tmask = 0usize;
    for &p in &pos {
        tmask |= 1 << p;
    }
    let mut out = &rho.mat * cr(1.0 - s);
    let w = cr(s / kd as f64);
    for i in 0..dim {
        let ibase = i & !tmask;
        for j in 0..dim {
            if (i & tmask) != (j & tmask) {
                continue;
            }
            let jbase = j & !tmask;
            // Sum the target-diagonal block of the (rest_i, rest_j) sector.
            let mut acc = cr(0.0);
            for t in 0..kd {
                let mut tbits = 0usize;
                for (b, &p) in pos.iter().enumerate() {
                    tbits |= ((t >> (k - 1 - b)) & 1) << p;
                }
                acc += rho.mat[(ibase | tbits, jbase | tbits)];
            }
            out[(i, j)] += w * acc;
        }
    }
    DensityMatrix::from_parts_unchecked(n, out)
}

/// Reduced state on `keep` (register order), tracing out the rest.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let n = rho.n_qubits();
    validate_targets(keep, n)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    let k = keep_sorted.len();
    let kd = 1usize << k;
    let traced: Vec<usize> = (0..n).filter(|q| !keep_sorted.contains(q)).collect();
    let td = 1usize << traced.len();
    let keep_pos: Vec<usize> = keep_sorted.iter().map(|&q| bitpos(q, n)).collect();
    let traced_pos: Vec<usize> = traced.iter().map(|&q| bitpos(q, n)).collect();

    let compose = |kept_idx: usize, rest_idx: usize| -> usize {
        let mut idx = 0usize;
        for (j, &p) in keep_pos.iter().enumerate() {
            idx |= ((kept_idx >> (k - 1 - j)) & 1) << p;
        }
        for (j, &p) in traced_pos.iter().enumerate() {
            idx |= ((rest_idx >> (traced_pos.len() - 1 - j)) & 1) << p;
        }
        idx
    };

    let mut out = CMat::zeros((kd, kd));
    for i in 0..kd {
        for j in 0..kd {
            let mut s = cr(0.0);
            for r in 0..td {
                s += rho.mat[(compose(i, r), compose(j, r))];
            }
            out[(i, j)] = s;
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(k, out))
}

/// <psi| rho |psi>. The imaginary residue (roundoff) is discarded.
pub fn fidelity(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::DimMismatch(format!(
            "state dim {} vs density matrix dim {}",
            psi.dim(),
            rho.dim()
        )));
    }
    let mut acc = cr(0.0);
    for i in 0..psi.dim() {
        let mut row = cr(0.0);
        for j in 0..psi.dim() {
            row += rho.mat[(i, j)] * psi.amps[j];
        }
        acc += psi.amps[i].conj() * row;
    }
    Ok(acc.re)
}

/// The six Pauli eigenstates |0>, |1>, |+>, |->, |+i>, |-i>.
///
/// These form a state 2-design, so their arithmetic mean reproduces the
/// uniform Bloch-sphere average of any expression at most quadratic in the
/// input density matrix, which covers every fidelity average in this crate.
pub fn bloch_2design_states() -> Vec<PureState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        PureState::qubit(cr(1.0), cr(0.0)).unwrap(),
        PureState::qubit(cr(0.0), cr(1.0)).unwrap(),
        PureState::qubit(cr(h), cr(h)).unwrap(),
        PureState::qubit(cr(h), cr(-h)).unwrap(),
        PureState::qubit(cr(h), c(0.0, h)).unwrap(),
        PureState::qubit(cr(h), c(0.0, -h)).unwrap(),
    ]
}

/// Eigenvalues of a Hermitian matrix via cyclic complex Jacobi rotations.
/// Intended for invariant checks on small matrices, not performance.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let n = m.dim().0;
    let mut a = m.clone();
    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[(i, j)].norm());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm() < 1e-16 {
                    continue;
                }
                // Diagonalize the 2x2 Hermitian block [[app, apq], [apq*, aqq]].
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phi = apq.arg();
                let r = apq.norm();
                let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                let (ct, st) = (theta.cos(), theta.sin());
                let e_iphi = C64::from_polar(1.0, phi);
                // Column rotation: [cp] = ct*p + st*e^{i phi} q ; [cq] = -st*e^{-i phi} p + ct*q
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cr(ct) + aiq * e_iphi * cr(st);
                    a[(i, q)] = aiq * cr(ct) - aip * e_iphi.conj() * cr(st);
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cr(ct) + aqj * e_iphi.conj() * cr(st);
                    a[(q, j)] = aqj * cr(ct) - apj * e_iphi * cr(st);
                }
            }
        }
    }
    let mut evs: Vec<f64> = a.diag().iter().map(|z| z.re).collect();
    evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    evs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ket(bits: &[u8]) -> PureState {
        let mut s = if bits[0] == 0 {
            PureState::ket0()
        } else {
            PureState::ket1()
        };
        for &b in &bits[1..] {
            let q = if b == 0 {
                PureState::ket0()
            } else {
                PureState::ket1()
            };
            s = s.tensor(&q);
        }
        s
    }

    #[test]
    fn kron_identities() {
        let i4 = kron(&id2(), &id2());
        assert_eq!(max_abs_diff(&i4, &identity(4)), 0.0);
    }

    #[test]
    fn kron_x_with_projector() {
        // X (x) |0><0| has its only nonzero entries at (2,0) and (0,2).
        let p0 = DensityMatrix::ground(1).mat().clone();
        let m = kron(&pauli_x(), &p0);
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (2, 0) || (i, j) == (0, 2) {
                    cr(1.0)
                } else {
                    cr(0.0)
                };
                assert_eq!(m[(i, j)], want, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn kron_trace_multiplicative() {
        // Fixed pseudo-random 2x2 inputs.
        let a = ndarray::array![[c(0.3, 0.1), c(-0.2, 0.7)], [c(1.1, 0.0), c(0.4, -0.5)]];
        let b = ndarray::array![[c(-0.9, 0.2), c(0.0, 0.3)], [c(0.5, 0.5), c(0.2, 0.8)]];
        let lhs = trace(&kron(&a, &b));
        let rhs = trace(&a) * trace(&b);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn apply_x_flips_ground() {
        let rho = DensityMatrix::ground(1);
        let out = apply_unitary(&rho, &pauli_x(), &[0]).unwrap();
        assert_abs_diff_eq!(out.mat()[(1, 1)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.mat()[(0, 0)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let psi = PureState::qubit(cr(0.6), c(0.0, 0.8)).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let h = hadamard();
        let out = apply_unitary(&apply_unitary(&rho, &h, &[0]).unwrap(), &h, &[0]).unwrap();
        assert!(max_abs_diff(out.mat(), rho.mat()) < 1e-12);
    }

    #[test]
    fn cnot_encodes_two_qubits() {
        // CNOT(0 -> 1) on (a|0> + b|1>)|0> gives a|00> + b|11>.
        let a = cr(0.6);
        let b = c(0.48, 0.64);
        let psi = PureState::qubit(a, b).unwrap().tensor(&PureState::ket0());
        let rho = DensityMatrix::from_pure(&psi);
        let cnot = crate::circuits::cnot_matrix();
        let out = apply_unitary(&rho, &cnot, &[0, 1]).unwrap();
        let want = PureState::new(ndarray::array![a, cr(0.0), cr(0.0), b]).unwrap();
        assert!(max_abs_diff(out.mat(), DensityMatrix::from_pure(&want).mat()) < 1e-12);
    }

    #[test]
    fn embedding_respects_targets() {
        // X on qubit 1 of a 2-qubit register: |00> -> |01>.
        let rho = DensityMatrix::ground(2);
        let out = apply_unitary(&rho, &pauli_x(), &[1]).unwrap();
        assert_abs_diff_eq!(out.mat()[(1, 1)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_unitary_and_bad_targets() {
        let rho = DensityMatrix::ground(2);
        let bad = ndarray::array![[cr(1.0), cr(1.0)], [cr(0.0), cr(1.0)]];
        assert!(apply_unitary(&rho, &bad, &[0]).is_err());
        assert!(apply_unitary(&rho, &pauli_x(), &[2]).is_err());
        let cnot = crate::circuits::cnot_matrix();
        assert!(apply_unitary(&rho, &cnot, &[0, 0]).is_err());
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = DensityMatrix::from_pure(&ket(&[0, 0, 0]));
        let out = partial_trace(&rho, &[0]).unwrap();
        assert!(max_abs_diff(out.mat(), DensityMatrix::ground(1).mat()) < 1e-14);
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(ndarray::array![cr(h), cr(0.0), cr(0.0), cr(h)]).unwrap();
        let out = partial_trace(&DensityMatrix::from_pure(&bell), &[0]).unwrap();
        assert!(max_abs_diff(out.mat(), DensityMatrix::maximally_mixed(1).mat()) < 1e-14);
    }

    #[test]
    fn partial_trace_recovers_product_factor() {
        // rho_A (x) rho_B traced over B gives rho_A, for mixed inputs.
        let a = PureState::qubit(cr(0.8), c(0.36, 0.48)).unwrap();
        let b = PureState::qubit(cr(0.28), c(0.96, 0.0)).unwrap();
        let mix_a = DensityMatrix::new(
            DensityMatrix::from_pure(&a).mat() * cr(0.7)
                + DensityMatrix::maximally_mixed(1).mat() * cr(0.3),
        )
        .unwrap();
        let mix_b = DensityMatrix::new(
            DensityMatrix::from_pure(&b).mat() * cr(0.4)
                + DensityMatrix::maximally_mixed(1).mat() * cr(0.6),
        )
        .unwrap();
        let joint = mix_a.tensor(&mix_b);
        let back = partial_trace(&joint, &[0]).unwrap();
        assert!(max_abs_diff(back.mat(), mix_a.mat()) < 1e-13);
        let back_b = partial_trace(&joint, &[1]).unwrap();
        assert!(max_abs_diff(back_b.mat(), mix_b.mat()) < 1e-13);
    }

    #[test]
    fn partial_trace_keep_order_is_register_order() {
        // keep = [2, 0] returns the state on (qubit 0, qubit 2).
        let a = PureState::ket1();
        let b = PureState::ket0();
        let c_state = PureState::qubit(cr(0.6), cr(0.8)).unwrap();
        let rho = DensityMatrix::from_pure(&a.tensor(&b).tensor(&c_state));
        let red = partial_trace(&rho, &[2, 0]).unwrap();
        let want = DensityMatrix::from_pure(&a.tensor(&c_state));
        assert!(max_abs_diff(red.mat(), want.mat()) < 1e-14);
    }

    #[test]
    fn fidelity_basics() {
        let rho0 = DensityMatrix::ground(1);
        assert_abs_diff_eq!(
            fidelity(&PureState::ket0(), &rho0).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            fidelity(&PureState::ket1(), &rho0).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        let plus = &bloch_2design_states()[2];
        assert_abs_diff_eq!(
            fidelity(plus, &DensityMatrix::maximally_mixed(1)).unwrap(),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn two_design_states_are_mutually_unbiased() {
        let states = bloch_2design_states();
        assert_eq!(states.len(), 6);
        for s in &states {
            let n2: f64 = s.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert_abs_diff_eq!(n2, 1.0, epsilon = 1e-14);
        }
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let ov: C64 = states[i]
                    .amplitudes()
                    .iter()
                    .zip(states[j].amplitudes().iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let o2 = ov.norm_sqr();
                assert!(
                    o2 < 1e-12 || (o2 - 0.5).abs() < 1e-12,
                    "overlap^2 {o2} between states {i},{j}"
                );
            }
        }
    }

    /// Deterministic 101 x 100 sphere grid (Simpson in cos(theta), midpoint in
    /// phi). Exact for the degree-(2,2) fidelity integrand, so it serves as an
    /// independent quadrature oracle for the 2-design average.
    fn sphere_quadrature_average(f: impl Fn(&PureState) -> f64) -> f64 {
        let nu = 101usize; // Simpson nodes, even interval count
        let nphi = 100usize;
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for iu in 0..nu {
            let u = -1.0 + 2.0 * iu as f64 / (nu - 1) as f64;
            let w_u = if iu == 0 || iu == nu - 1 {
                1.0
            } else if iu % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let theta = u.acos();
            let (st2, ct2) = ((theta / 2.0).sin(), (theta / 2.0).cos());
            for ip in 0..nphi {
                let phi = (ip as f64 + 0.5) * std::f64::consts::TAU / nphi as f64;
                let psi =
                    PureState::qubit(cr(ct2), C64::from_polar(st2, phi)).unwrap();
                acc += w_u * f(&psi);
                wsum += w_u;
            }
        }
        acc / wsum
    }

    #[test]
    fn two_design_average_matches_sphere_quadrature() {
        // Random-ish CPTP map built from a fixed 2-qubit unitary via Stinespring.
        let g = ndarray::array![
            [c(0.3, -0.4), c(0.1, 0.9), c(-0.7, 0.2), c(0.5, 0.0)],
            [c(1.0, 0.1), c(0.2, -0.3), c(0.4, 0.4), c(-0.1, 0.8)],
            [c(-0.5, 0.6), c(0.7, 0.0), c(0.3, -0.9), c(0.2, 0.2)],
            [c(0.1, 0.1), c(-0.6, 0.5), c(0.8, 0.1), c(0.0, -0.7)]
        ];
        let u = gram_schmidt_unitary(&g);
        let kraus: Vec<CMat> = (0..2)
            .map(|k| {
                CMat::from_shape_fn((2, 2), |(i, j)| u[(i * 2 + k, j * 2)])
            })
            .collect();
        let apply = |psi: &PureState| -> f64 {
            let rho = DensityMatrix::from_pure(psi);
            let out = kraus_sum_on_targets(&kraus, &[0], &rho);
            fidelity(psi, &out).unwrap()
        };
        let mean6: f64 =
            bloch_2design_states().iter().map(&apply).sum::<f64>() / 6.0;
        let quad = sphere_quadrature_average(apply);
        assert!(
            (mean6 - quad).abs() < 1e-6,
            "2-design {mean6} vs quadrature {quad}"
        );
    }

    fn gram_schmidt_unitary(g: &CMat) -> CMat {
        let n = g.dim().0;
        let mut cols: Vec<CVec> = (0..n).map(|j| g.column(j).to_owned()).collect();
        for j in 0..n {
            for i in 0..j {
                let proj: C64 = cols[i]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let prev = cols[i].clone();
                cols[j].zip_mut_with(&prev, |y, x| *y -= proj * x);
            }
            let norm: f64 = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            cols[j].mapv_inplace(|x| x / cr(norm));
        }
        let mut u = CMat::zeros((n, n));
        for j in 0..n {
            for i in 0..n {
                u[(i, j)] = cols[j][i];
            }
        }
        u
    }

    #[test]
    fn jacobi_eigenvalues_match_known_spectrum() {
        // diag(0.1, 0.9) rotated by Hadamard has the same spectrum.
        let d = ndarray::array![[cr(0.1), cr(0.0)], [cr(0.0), cr(0.9)]];
        let h = hadamard();
        let m = h.dot(&d).dot(&dagger(&h));
        let evs = hermitian_eigenvalues(&m);
        assert_abs_diff_eq!(evs[0], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(evs[1], 0.9, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn unitary_preserves_trace_and_hermiticity(
            re in -1.0f64..1.0, im in -1.0f64..1.0, theta in 0.0f64..std::f64::consts::TAU
        ) {
            // Build a normalized single-qubit state and a rotation unitary.
            let norm = (1.0 + re * re + im * im).sqrt();
            let psi = PureState::qubit(cr(1.0 / norm), c(re / norm, im / norm)).unwrap();
            let mut rho = DensityMatrix::from_pure(&psi).tensor(&DensityMatrix::maximally_mixed(1));
            let u = ndarray::array![
                [cr(theta.cos()), cr(-theta.sin())],
                [cr(theta.sin()), cr(theta.cos())]
            ];
            rho = apply_unitary(&rho, &u, &[1]).unwrap();
            prop_assert!((rho.trace() - cr(1.0)).norm() < 1e-12);
            let m = rho.mat();
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert!((m[(i, j)] - m[(j, i)].conj()).norm() < 1e-12);
                }
            }
            // Partial trace preserves total trace.
            let red = partial_trace(&rho, &[0]).unwrap();
            prop_assert!((red.trace() - cr(1.0)).norm() < 1e-12);
            // Fidelity stays in range.
            let f = fidelity(&psi, &red).unwrap();
            prop_assert!((-1e-10..=1.0 + 1e-10).contains(&f));
        }
    }
}
