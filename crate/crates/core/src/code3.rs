//! The 3-qubit phase-flip code: encoded states, syndromes, per-cycle
//! statistics, residual coherence and entropy.
//!
//! Basis ordering: qubit 1 is the most significant bit, `|↑⟩ = 0`, `|↓⟩ = 1`.
//! The stabilisers are `X₁X₂` and `X₁X₃`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

const NORM_TOL: f64 = 1e-12;

/// Logical amplitudes `α|↑⟩ + β|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalState {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl LogicalState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("|α|² + |β|² = {norm}, expected 1")));
        }
        Ok(Self { alpha, beta })
    }

    /// Real amplitudes, normalised.
    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        let n = alpha.hypot(beta);
        if n == 0.0 || !n.is_finite() {
            return Err(param("state", "amplitudes must not both vanish"));
        }
        Self::new(Complex64::new(alpha / n, 0.0), Complex64::new(beta / n, 0.0))
    }

    /// `(|↑⟩ + |↓⟩)/√2`.
    pub fn plus() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: a, beta: a }
    }

    /// Bare coherence `αβ*`.
    pub fn coherence(&self) -> Complex64 {
        self.alpha * self.beta.conj()
    }
}

/// Validated 2×2 density matrix of one logical qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(Matrix2<Complex64>);

impl DensityMatrix2 {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > NORM_TOL {
            return Err(Error::Validation(format!("matrix is not Hermitian (deviation {herm:e})")));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::Validation(format!("trace is {trace}, expected 1")));
        }
        let rho = Self(m);
        let (lo, hi) = rho.eigenvalues();
        if lo < -NORM_TOL || hi > 1.0 + NORM_TOL {
            return Err(Error::Validation(format!("eigenvalues ({lo}, {hi}) outside [0, 1]")));
        }
        Ok(rho)
    }

    /// `[[|α|², αβ*·c], [α*β·c*, |β|²]]` for a coherence factor `c`.
    pub fn from_state(state: &LogicalState, factor: Complex64) -> Result<Self> {
        let off = state.coherence() * factor;
        Self::new(Matrix2::new(
            Complex64::new(state.alpha.norm_sqr(), 0.0),
            off,
            off.conj(),
            Complex64::new(state.beta.norm_sqr(), 0.0),
        ))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.0[(0, 0)].re;
        let d = self.0[(1, 1)].re;
        let b = self.0[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let r = (0.5 * (a - d)).hypot(b);
        (mean - r, mean + r)
    }
}

/// Amplitudes of three physical qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeQubitState {
    pub amps: [Complex64; 8],
}

fn mask(qubit: usize) -> usize {
    assert!((1..=3).contains(&qubit), "qubit index {qubit} outside 1..=3");
    1 << (3 - qubit)
}

impl ThreeQubitState {
    pub fn basis(index: usize) -> Self {
        let mut amps = [Complex64::default(); 8];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Product state `(α|↑⟩ + β|↓⟩) ⊗ |+⟩ ⊗ |+⟩`.
    pub fn product_with_plus(state: &LogicalState) -> Self {
        let mut amps = [Complex64::default(); 8];
        for (i, a) in amps.iter_mut().enumerate() {
            let first = if i & 4 == 0 { state.alpha } else { state.beta };
            *a = first * 0.5;
        }
        Self { amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.amps.iter_mut().for_each(|a| *a *= s);
        self
    }

    pub fn normalized(self) -> Self {
        let n = self.norm_sqr().sqrt();
        self.scaled(1.0 / n)
    }

    pub fn apply_x(&mut self, qubit: usize) {
        let m = mask(qubit);
        for i in 0..8 {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    pub fn apply_z(&mut self, qubit: usize) {
        let m = mask(qubit);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target, "CNOT needs distinct qubits");
        let (mc, mt) = (mask(control), mask(target));
        for i in 0..8 {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    /// Applies `exp(−i φ_j σ^z_j / 2)` to each qubit.
    pub fn apply_phases(&mut self, phases: &[f64; 3]) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            let angle: f64 = (1..=3)
                .map(|q| if i & mask(q) == 0 { -0.5 } else { 0.5 } * phases[q - 1])
                .sum();
            *a *= Complex64::from_polar(1.0, angle);
        }
    }

    /// Applies the Pauli string `X_a X_b`.
    fn xx(&self, a: usize, b: usize) -> Self {
        let m = mask(a) | mask(b);
        let mut out = *self;
        for i in 0..8 {
            out.amps[i] = self.amps[i ^ m];
        }
        out
    }

    /// Unnormalised projection onto stabiliser eigenvalues `(s12, s13)` of `(X₁X₂, X₁X₃)`.
    pub fn project_syndrome(&self, syndrome: Syndrome) -> Self {
        let (s12, s13) = syndrome.signs();
        let half = |psi: &Self, s: f64, a: usize, b: usize| {
            let flipped = psi.xx(a, b);
            let mut out = *psi;
            for (o, f) in out.amps.iter_mut().zip(&flipped.amps) {
                *o = (*o + *f * s) * 0.5;
            }
            out
        };
        let p = half(self, s12, 1, 2);
        half(&p, s13, 1, 3)
    }

    /// Inverse of [`encode`]: the two CNOTs in reverse order.
    pub fn decode(&mut self) {
        self.apply_cnot(3, 1);
        self.apply_cnot(2, 1);
    }
}

/// Stabiliser outcomes; `true` means eigenvalue −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome {
    pub x1x2_flipped: bool,
    pub x1x3_flipped: bool,
}

impl Syndrome {
    pub const TRIVIAL: Self = Self {
        x1x2_flipped: false,
        x1x3_flipped: false,
    };

    pub const ALL: [Self; 4] = [
        Self::TRIVIAL,
        Self {
            x1x2_flipped: true,
            x1x3_flipped: true,
        },
        Self {
            x1x2_flipped: true,
            x1x3_flipped: false,
        },
        Self {
            x1x2_flipped: false,
            x1x3_flipped: true,
        },
    ];

    pub fn signs(&self) -> (f64, f64) {
        let s = |f: bool| if f { -1.0 } else { 1.0 };
        (s(self.x1x2_flipped), s(self.x1x3_flipped))
    }

    /// Qubit whose phase flip produces this syndrome.
    pub fn flipped_qubit(&self) -> Option<usize> {
        match (self.x1x2_flipped, self.x1x3_flipped) {
            (false, false) => None,
            (true, true) => Some(1),
            (true, false) => Some(2),
            (false, true) => Some(3),
        }
    }
}

/// Code words `|bar↑⟩` and `|bar↓⟩`.
pub fn encoded_states() -> (ThreeQubitState, ThreeQubitState) {
    let mut up = [Complex64::default(); 8];
    let mut down = [Complex64::default(); 8];
    for i in 0..8usize {
        if i.count_ones() % 2 == 0 {
            up[i] = Complex64::new(0.5, 0.0);
        } else {
            down[i] = Complex64::new(0.5, 0.0);
        }
    }
    (ThreeQubitState { amps: up }, ThreeQubitState { amps: down })
}

/// Encoding circuit: `CNOT(2→1)` then `CNOT(3→1)` on `ψ ⊗ |+⟩ ⊗ |+⟩`.
pub fn encode(state: &LogicalState) -> ThreeQubitState {
    let mut psi = ThreeQubitState::product_with_plus(state);
    psi.apply_cnot(2, 1);
    psi.apply_cnot(3, 1);
    psi
}

/// Logical amplitudes `(⟨bar↑|ψ⟩, ⟨bar↓|ψ⟩)`.
pub fn logical_amplitudes(psi: &ThreeQubitState) -> (Complex64, Complex64) {
    let (up, down) = encoded_states();
    (up.inner(psi), down.inner(psi))
}

/// Per-cycle statistics of the code at leading order in ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    pub p0: f64,
    pub p1: f64,
    /// Coherence factor `1 − 2ε³` after a cycle with trivial syndrome.
    pub dephasing_no_error: f64,
    /// Coherence factor `1 − 2ε` after a corrected error cycle.
    pub dephasing_error: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0 / 3.0).contains(&epsilon) {
        return Err(param("epsilon", format!("p1 = 3ε exceeds 1 or ε < 0 (ε = {epsilon})")));
    }
    Ok(())
}

pub fn cycle_stats(epsilon: f64) -> Result<CycleStats> {
    check_epsilon(epsilon)?;
    let p1 = 3.0 * epsilon;
    Ok(CycleStats {
        p0: 1.0 - p1,
        p1,
        dephasing_no_error: 1.0 - 2.0 * epsilon.powi(3),
        dephasing_error: 1.0 - 2.0 * epsilon,
    })
}

fn ln_binomial(n: u64, m: u64) -> f64 {
    let k = m.min(n - m);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// `C(N, m) p₀^{N−m} p₁^m`, evaluated in log space.
pub fn history_probability(n_cycles: u64, m: u64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if m > n_cycles {
        return Err(param("m", format!("{m} error cycles exceed N = {n_cycles}")));
    }
    let stats = cycle_stats(epsilon)?;
    let term = |count: u64, p: f64| if count == 0 { 0.0 } else { count as f64 * p.ln() };
    let log = ln_binomial(n_cycles, m) + term(n_cycles - m, stats.p0) + term(m, stats.p1);
    Ok(log.exp())
}

/// `αβ* (1 − 2ε³)^{N−m} (1 − 2ε)^m`.
pub fn residual_offdiagonal(n_cycles: u64, m: u64, state: &LogicalState, epsilon: f64) -> Result<Complex64> {
    if m > n_cycles {
        return Err(param("m", format!("{m} error cycles exceed N = {n_cycles}")));
    }
    let s = cycle_stats(epsilon)?;
    let factor = s.dephasing_no_error.powf((n_cycles - m) as f64) * s.dephasing_error.powf(m as f64);
    Ok(state.coherence() * factor)
}

/// Coherence of the mean history `m = N p₁` in product and exponential form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanHistoryCoherence {
    pub mean_errors: f64,
    /// `αβ* (1 − 2ε³)^{N−m} (1 − 2ε)^m` at the (real) mean `m`.
    pub product: Complex64,
    /// `αβ* e^{−6Nε²}`.
    pub exponential: Complex64,
    /// `|product − exponential| / |exponential|`.
    pub relative_gap: f64,
}

pub fn mean_history_offdiagonal(n_cycles: u64, state: &LogicalState, epsilon: f64) -> Result<MeanHistoryCoherence> {
    let s = cycle_stats(epsilon)?;
    let n = n_cycles as f64;
    let m = n * s.p1;
    let product = state.coherence() * (s.dephasing_no_error.powf(n - m) * s.dephasing_error.powf(m));
    let exponential = state.coherence() * (-6.0 * n * epsilon * epsilon).exp();
    let relative_gap = if exponential.norm() > 0.0 {
        (product - exponential).norm() / exponential.norm()
    } else {
        0.0
    };
    Ok(MeanHistoryCoherence {
        mean_errors: m,
        product,
        exponential,
        relative_gap,
    })
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `S = −tr(ρ ln ρ)` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix2) -> f64 {
    let (lo, hi) = rho.eigenvalues();
    (-xlnx(lo) - xlnx(hi)).max(0.0)
}

/// Small-`N` and large-`N` limits of the logical-qubit entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyLimits {
    /// `x (1 − ln x)` with `x = 12 N |α|²|β|² ε²`, valid for `N ≪ ε⁻²`.
    pub small_n: f64,
    /// `−|α|² ln|α|² − |β|² ln|β|²`, valid for `N ≫ ε⁻²`.
    pub large_n: f64,
}

pub fn entropy_asymptotics(n_cycles: u64, epsilon: f64, state: &LogicalState) -> Result<EntropyLimits> {
    check_epsilon(epsilon)?;
    let (a2, b2) = (state.alpha.norm_sqr(), state.beta.norm_sqr());
    let x = 12.0 * n_cycles as f64 * a2 * b2 * epsilon * epsilon;
    Ok(EntropyLimits {
        small_n: if x > 0.0 { x * (1.0 - x.ln()) } else { 0.0 },
        large_n: -xlnx(a2) - xlnx(b2),
    })
}
