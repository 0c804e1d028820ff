//! Dense complex-matrix substrate for qubit registers: density matrices,
//! unitaries, tensor products, two-qubit operator embedding, partial trace,
//! and small Hermitian eigensolves.
//!
//! Convention used throughout: qubit 0 is the most significant bit of a basis
//! index, so the two-qubit basis is ordered {|00>, |01>, |10>, |11>}.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on register size; keeps every state dense and bounded in memory.
pub const MAX_QUBITS: usize = 10;
/// Matrix dimension corresponding to [`MAX_QUBITS`].
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

/// Tolerance for Hermiticity checks.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Tolerance for unit-trace checks.
pub const TOL_TRACE: f64 = 1e-10;
/// Most negative admissible eigenvalue in positivity checks.
pub const TOL_PSD: f64 = 1e-10;
/// Tolerance on max |U U† - I| entry for unitarity checks.
pub const TOL_UNITARY: f64 = 1e-12;

/// Trace drift beyond which a conjugation output is renormalized.
const TRACE_RENORM_THRESHOLD: f64 = 1e-13;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Insert `bit` at bit position `pos` of `index`, shifting higher bits up.
#[inline]
fn insert_bit(index: usize, pos: usize, bit: usize) -> usize {
    let low = index & ((1 << pos) - 1);
    ((index >> pos) << (pos + 1)) | (bit << pos) | low
}

fn check_register_shape(m: &DMatrix<Complex64>) -> Result<usize> {
    let dim = m.nrows();
    if dim != m.ncols() {
        return Err(Error::invalid(format!(
            "matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::invalid(format!(
            "register dimension must be a power of two, got {dim}"
        )));
    }
    if dim > MAX_DIM {
        return Err(Error::Capacity {
            requested: dim,
            max: MAX_DIM,
        });
    }
    Ok(dim)
}

/// Real eigenvalues of a Hermitian matrix, sorted ascending.
///
/// Dimension 2 uses the closed-form discriminant; larger matrices go through
/// an iterative Hermitian eigensolve. Rejects inputs whose Hermitian
/// deviation exceeds [`TOL_HERMITIAN`].
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid(format!(
            "eigensolve needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev > TOL_HERMITIAN {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: TOL_HERMITIAN,
        });
    }
    let n = m.nrows();
    let mut values = match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = (m[(0, 1)] + m[(1, 0)].conj()) * Complex64::new(0.5, 0.0);
            let mid = 0.5 * (a + d);
            let radius = ((0.5 * (a - d)).powi(2) + b.norm_sqr()).sqrt();
            vec![mid - radius, mid + radius]
        }
        _ => {
            // Work on the exactly-Hermitian part so roundoff in the input
            // cannot leak imaginary components into the solver.
            let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
            h.symmetric_eigen().eigenvalues.iter().copied().collect()
        }
    };
    values.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(values)
}

/// A density matrix over a register of up to [`MAX_QUBITS`] qubits.
///
/// Valid values are Hermitian, unit-trace and positive semidefinite within
/// the module tolerances. All operations are pure: they return new values and
/// never mutate their inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    amps: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validating constructor; rejects anything that is not a state.
    pub fn new(amps: DMatrix<Complex64>) -> Result<Self> {
        check_register_shape(&amps)?;
        let dm = Self { amps };
        dm.validate()?;
        Ok(dm)
    }

    /// Internal constructor for outputs that are states by construction.
    pub(crate) fn from_amps_unchecked(amps: DMatrix<Complex64>) -> Self {
        Self { amps }
    }

    /// Projector |psi><psi| onto the (normalized) ket `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        if !psi.len().is_power_of_two() || psi.len() > MAX_DIM {
            return Err(Error::invalid(format!(
                "ket length must be a power of two within the register cap, got {}",
                psi.len()
            )));
        }
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::invalid("cannot normalize a zero ket"));
        }
        let scale = 1.0 / norm_sqr;
        let dim = psi.len();
        let amps = DMatrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj() * scale);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amps(&self) -> &DMatrix<Complex64> {
        &self.amps
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.amps[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.amps.diagonal().sum()
    }

    /// Checks the three state invariants: Hermiticity, unit trace, positivity.
    pub fn validate(&self) -> Result<()> {
        let dev = hermitian_deviation(&self.amps);
        if dev > TOL_HERMITIAN {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: TOL_HERMITIAN,
            });
        }
        let tr = self.trace();
        let tr_dev = (tr.re - 1.0).abs().max(tr.im.abs());
        if tr_dev > TOL_TRACE {
            return Err(Error::invalid(format!(
                "trace deviates from one by {tr_dev:.3e}"
            )));
        }
        let eigenvalues = hermitian_eigenvalues(&self.amps)?;
        if let Some(&min) = eigenvalues.first() {
            if min < -TOL_PSD {
                return Err(Error::invalid(format!(
                    "state has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Kronecker product; the left factor owns the most significant qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > MAX_DIM {
            return Err(Error::Capacity {
                requested: dim,
                max: MAX_DIM,
            });
        }
        Ok(Self {
            amps: self.amps.kronecker(&other.amps),
        })
    }

    /// Unitary conjugation u ρ u†.
    ///
    /// The output is re-Hermitized as (m + m†)/2 and its trace renormalized
    /// when drift exceeds 1e-13, so million-step iterations do not wander.
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimMismatch {
                left: self.dim(),
                right: u.dim(),
            });
        }
        let m = u.amps() * &self.amps * u.amps().adjoint();
        let mut m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = m.diagonal().sum().re;
        if (tr - 1.0).abs() > TRACE_RENORM_THRESHOLD {
            m /= Complex64::new(tr, 0.0);
        }
        Ok(Self { amps: m })
    }

    /// Trace out qubit `drop`, producing a state one qubit smaller.
    pub fn partial_trace(&self, drop: usize) -> Result<Self> {
        let k = self.num_qubits();
        if k < 2 {
            return Err(Error::invalid(
                "partial trace needs a register of at least two qubits",
            ));
        }
        if drop >= k {
            return Err(Error::QubitOutOfRange {
                index: drop,
                num_qubits: k,
            });
        }
        let pos = k - 1 - drop;
        let out_dim = self.dim() / 2;
        let amps = DMatrix::from_fn(out_dim, out_dim, |r, c| {
            self.amps[(insert_bit(r, pos, 0), insert_bit(c, pos, 0))]
                + self.amps[(insert_bit(r, pos, 1), insert_bit(c, pos, 1))]
        });
        Ok(Self { amps })
    }

    /// Single-qubit reduced state of qubit `qubit`.
    pub fn reduced_qubit(&self, qubit: usize) -> Result<Self> {
        let k = self.num_qubits();
        if qubit >= k {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: k,
            });
        }
        if k == 1 {
            return Ok(self.clone());
        }
        Ok(Self {
            amps: reduced_qubit_raw(&self.amps, k, qubit),
        })
    }
}

/// Reduced 2x2 state of one qubit, computed directly from a raw register matrix.
pub(crate) fn reduced_qubit_raw(
    amps: &DMatrix<Complex64>,
    num_qubits: usize,
    qubit: usize,
) -> DMatrix<Complex64> {
    let pos = num_qubits - 1 - qubit;
    let rest = amps.nrows() >> 1;
    DMatrix::from_fn(2, 2, |a, b| {
        let mut acc = zero();
        for m in 0..rest {
            acc += amps[(insert_bit(m, pos, a), insert_bit(m, pos, b))];
        }
        acc
    })
}

/// A unitary matrix (max |U U† - I| within [`TOL_UNITARY`] at construction).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    amps: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn new(amps: DMatrix<Complex64>) -> Result<Self> {
        check_register_shape(&amps)?;
        let product = &amps * amps.adjoint();
        let mut dev = 0.0f64;
        for i in 0..amps.nrows() {
            for j in 0..amps.ncols() {
                let expect = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    zero()
                };
                dev = dev.max((product[(i, j)] - expect).norm());
            }
        }
        if dev > TOL_UNITARY {
            return Err(Error::invalid(format!(
                "matrix is not unitary: max |U U† - I| entry is {dev:.3e}"
            )));
        }
        Ok(Self { amps })
    }

    pub(crate) fn from_amps_unchecked(amps: DMatrix<Complex64>) -> Self {
        Self { amps }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            amps: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.nrows()
    }

    pub fn amps(&self) -> &DMatrix<Complex64> {
        &self.amps
    }

    /// Embed this 4x4 unitary so it acts on qubits `(hi, lo)` of a
    /// `num_qubits`-register, identity elsewhere. `hi` supplies the more
    /// significant bit of the gate's own two-qubit basis.
    pub fn embed_two_qubit(&self, num_qubits: usize, hi: usize, lo: usize) -> Result<Self> {
        if self.dim() != 4 {
            return Err(Error::invalid(format!(
                "embedding requires a 4x4 gate, got {}x{}",
                self.dim(),
                self.dim()
            )));
        }
        if hi == lo {
            return Err(Error::invalid("embedding requires two distinct qubits"));
        }
        for &q in &[hi, lo] {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: 1 << num_qubits,
                max: MAX_DIM,
            });
        }
        let dim = 1 << num_qubits;
        let pos_hi = num_qubits - 1 - hi;
        let pos_lo = num_qubits - 1 - lo;
        let (p_small, p_big) = if pos_hi < pos_lo {
            (pos_hi, pos_lo)
        } else {
            (pos_lo, pos_hi)
        };
        let mut out = DMatrix::from_element(dim, dim, zero());
        for rest in 0..(dim >> 2) {
            let base = insert_bit(insert_bit(rest, p_small, 0), p_big, 0);
            for a in 0..4 {
                let row = base | ((a >> 1) << pos_hi) | ((a & 1) << pos_lo);
                for b in 0..4 {
                    let col = base | ((b >> 1) << pos_hi) | ((b & 1) << pos_lo);
                    out[(row, col)] = self.amps[(a, b)];
                }
            }
        }
        Ok(Self { amps: out })
    }
}

/// Apply a 4x4 gate to qubits `(hi, lo)` of a raw register matrix in place,
/// as ρ <- U ρ U†, without materializing the embedded unitary.
pub(crate) fn apply_two_qubit(
    amps: &mut DMatrix<Complex64>,
    gate: &DMatrix<Complex64>,
    num_qubits: usize,
    hi: usize,
    lo: usize,
) {
    debug_assert_eq!(gate.nrows(), 4);
    debug_assert!(hi != lo && hi < num_qubits && lo < num_qubits);
    let dim = amps.nrows();
    let pos_hi = num_qubits - 1 - hi;
    let pos_lo = num_qubits - 1 - lo;
    let (p_small, p_big) = if pos_hi < pos_lo {
        (pos_hi, pos_lo)
    } else {
        (pos_lo, pos_hi)
    };
    let quarter = dim >> 2;
    let sub = |base: usize, s: usize| base | ((s >> 1) << pos_hi) | ((s & 1) << pos_lo);

    // Left factor: rows mix within each 4-row block.
    for r in 0..quarter {
        let base = insert_bit(insert_bit(r, p_small, 0), p_big, 0);
        let rows = [sub(base, 0), sub(base, 1), sub(base, 2), sub(base, 3)];
        for col in 0..dim {
            let v = [
                amps[(rows[0], col)],
                amps[(rows[1], col)],
                amps[(rows[2], col)],
                amps[(rows[3], col)],
            ];
            for (s, &row) in rows.iter().enumerate() {
                amps[(row, col)] = gate[(s, 0)] * v[0]
                    + gate[(s, 1)] * v[1]
                    + gate[(s, 2)] * v[2]
                    + gate[(s, 3)] * v[3];
            }
        }
    }
    // Right factor U†: columns mix within each 4-column block.
    for c in 0..quarter {
        let base = insert_bit(insert_bit(c, p_small, 0), p_big, 0);
        let cols = [sub(base, 0), sub(base, 1), sub(base, 2), sub(base, 3)];
        for row in 0..dim {
            let v = [
                amps[(row, cols[0])],
                amps[(row, cols[1])],
                amps[(row, cols[2])],
                amps[(row, cols[3])],
            ];
            for (s, &col) in cols.iter().enumerate() {
                amps[(row, col)] = v[0] * gate[(s, 0)].conj()
                    + v[1] * gate[(s, 1)].conj()
                    + v[2] * gate[(s, 2)].conj()
                    + v[3] * gate[(s, 3)].conj();
            }
        }
    }
}
