//! Dense statevector over `k` qubits and the linear-algebra primitives the
//! analyzer needs: unitary gate actions, oracle permutations, halting
//! projections and inner products.
//!
//! Basis convention: qubit 0 is the most significant bit of the basis index,
//! so a ket written `|q0 q1 ... q(k-1)>` reads directly as a binary index.

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude of a basis state.
pub type Amplitude = Complex64;

/// Weights below this are structural zeros; branches carrying them are pruned.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// Largest register the dense representation is meant for.
pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("register of {0} qubits is not supported (1..={MAX_QUBITS})")]
    BadQubitCount(usize),
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisOutOfRange { index: usize, num_qubits: usize },
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} referenced more than once")]
    DuplicateQubit(usize),
    #[error("oracle arity {arity} does not match {inputs} input qubits")]
    ArityMismatch { arity: usize, inputs: usize },
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
}

/// A 2x2 complex matrix acting on one qubit, rows indexed by output bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[c(1.0), c(0.0)], [c(0.0), c(1.0)]])
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Mat2([[c(h), c(h)], [c(h), c(-h)]])
    }

    pub fn pauli_x() -> Self {
        Mat2([[c(0.0), c(1.0)], [c(1.0), c(0.0)]])
    }

    /// `cos(theta) I + i sin(theta) sigma_y`, i.e. `[[c, s], [-s, c]]`.
    pub fn u_theta(theta: f64) -> Self {
        let (s, co) = theta.sin_cos();
        Mat2([[c(co), c(s)], [c(-s), c(co)]])
    }

    /// Real reflection `[[c, s], [s, -c]]`.
    pub fn x_theta(theta: f64) -> Self {
        let (s, co) = theta.sin_cos();
        Mat2([[c(co), c(s)], [c(s), c(-co)]])
    }

    /// `e^{i alpha} e^{-i phi Z} (cos(theta) I - i sin(theta) Y) e^{-i psi Z}`.
    pub fn u2(alpha: f64, theta: f64, phi: f64, psi: f64) -> Self {
        let (s, co) = theta.sin_cos();
        let rot = Mat2([[c(co), c(-s)], [c(s), c(co)]]);
        let zphi = Mat2::diag(Complex64::from_polar(1.0, -phi), Complex64::from_polar(1.0, phi));
        let zpsi = Mat2::diag(Complex64::from_polar(1.0, -psi), Complex64::from_polar(1.0, psi));
        zphi.mul(&rot).mul(&zpsi).scale(Complex64::from_polar(1.0, alpha))
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        Mat2([[a, c(0.0)], [c(0.0), b]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[c(0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn scale(&self, k: Complex64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let id = Mat2::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.0[i][j] - id.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }
}

/// A unitary action on the register.
#[derive(Debug, Clone, PartialEq)]
pub enum Unitary {
    Single { target: usize, matrix: Mat2 },
    /// Applies `matrix` to `target` on the subspace where `control` is 1.
    Controlled { control: usize, target: usize, matrix: Mat2 },
    /// Multiplies basis states with both qubits set by `e^{i phase}`.
    Phase { a: usize, b: usize, phase: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl StateVector {
    /// Computational basis state `|basis_index>`.
    pub fn basis(num_qubits: usize, basis_index: usize) -> Result<Self, StateError> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(StateError::BadQubitCount(num_qubits));
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(StateError::BasisOutOfRange { index: basis_index, num_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[basis_index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> Result<Self, StateError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len.trailing_zeros() as usize > MAX_QUBITS {
            return Err(StateError::BadQubitCount(len));
        }
        Ok(StateVector { num_qubits: len.trailing_zeros() as usize, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask of `qubit` inside a basis index.
    #[inline]
    pub fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<(), StateError> {
        if qubit >= self.num_qubits {
            Err(StateError::QubitOutOfRange { qubit, num_qubits: self.num_qubits })
        } else {
            Ok(())
        }
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<(), StateError> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(StateError::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, op: &Unitary) -> Result<(), StateError> {
        match *op {
            Unitary::Single { target, ref matrix } => {
                self.check_qubit(target)?;
                self.apply_masked(0, self.mask(target), matrix);
            }
            Unitary::Controlled { control, target, ref matrix } => {
                self.check_distinct(&[control, target])?;
                self.apply_masked(self.mask(control), self.mask(target), matrix);
            }
            Unitary::Phase { a, b, phase } => {
                self.check_distinct(&[a, b])?;
                let both = self.mask(a) | self.mask(b);
                let factor = Complex64::from_polar(1.0, phase);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & both == both {
                        *amp *= factor;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies `m` to the target bit on every index pair whose control bits
    /// are all set.
    fn apply_masked(&mut self, control: usize, target: usize, m: &Mat2) {
        let m = &m.0;
        for i in 0..self.amps.len() {
            if i & target != 0 || i & control != control {
                continue;
            }
            let j = i | target;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// `|x>|b> -> |x>|b xor f(x)>`, where `f` is looked up by the input
    /// string read from `inputs` in order (first listed qubit most significant).
    pub fn apply_oracle<F>(&mut self, f: F, arity: usize, inputs: &[usize], output: usize) -> Result<(), StateError>
    where
        F: Fn(usize) -> bool,
    {
        if inputs.len() != arity {
            return Err(StateError::ArityMismatch { arity, inputs: inputs.len() });
        }
        let mut all = inputs.to_vec();
        all.push(output);
        self.check_distinct(&all)?;
        let masks: Vec<usize> = inputs.iter().map(|&q| self.mask(q)).collect();
        let out = self.mask(output);
        for i in 0..self.amps.len() {
            if i & out != 0 {
                continue;
            }
            let x = masks.iter().fold(0usize, |acc, &m| (acc << 1) | usize::from(i & m != 0));
            if f(x) {
                self.amps.swap(i, i | out);
            }
        }
        Ok(())
    }

    /// Splits off the `bit` component of `qubit`.  Returns its squared norm
    /// and the (unnormalized) component with the opposite value.
    pub fn project_measure(&self, qubit: usize, bit: bool) -> Result<(f64, StateVector), StateError> {
        self.check_qubit(qubit)?;
        let (taken, rest) = self.split(qubit);
        let (hit, miss) = if bit { (rest, taken) } else { (taken, rest) };
        Ok((hit.norm_sqr(), miss))
    }

    /// Returns the (qubit = 0, qubit = 1) components, both unnormalized.
    pub fn split(&self, qubit: usize) -> (StateVector, StateVector) {
        let m = self.mask(qubit);
        let zero = Complex64::new(0.0, 0.0);
        let mut lo = self.clone();
        let mut hi = self.clone();
        for i in 0..self.amps.len() {
            if i & m == 0 {
                hi.amps[i] = zero;
            } else {
                lo.amps[i] = zero;
            }
        }
        (lo, hi)
    }

    /// Probability mass with `qubit` equal to `bit`.
    pub fn marginal(&self, qubit: usize, bit: bool) -> f64 {
        let m = self.mask(qubit);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & m != 0) == bit)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Multiplies every amplitude by `1/sqrt(norm_sqr)`.
    pub fn renormalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Amplitude, StateError> {
        if self.num_qubits != other.num_qubits {
            return Err(StateError::DimensionMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest entrywise distance to `other`; `f64::INFINITY` on dimension mismatch.
    pub fn max_deviation(&self, other: &StateVector) -> f64 {
        if self.num_qubits != other.num_qubits {
            return f64::INFINITY;
        }
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}
