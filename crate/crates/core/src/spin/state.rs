use nalgebra::{Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::hamiltonian::{MINUS, PLUS, ZERO};

/// Density matrix of the NV ground triplet in the {|−1⟩, |0⟩, |+1⟩} basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub rho: Matrix3<C64>,
}

/// The {|0⟩, |+1⟩} block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelView {
    pub rho00: f64,
    pub rho11: f64,
    /// ⟨0|ρ|+1⟩
    pub rho01: (f64, f64),
}

impl TwoLevelView {
    pub fn rho01(&self) -> C64 {
        C64::new(self.rho01.0, self.rho01.1)
    }
}

impl SpinState {
    /// All population in |0⟩.
    pub fn ground() -> Self {
        let mut rho = Matrix3::zeros();
        rho[(ZERO, ZERO)] = C64::new(1.0, 0.0);
        SpinState { rho }
    }

    /// State supported on {|0⟩, |+1⟩} with ρ₁₁ = `rho11`, ρ₀₁ = `rho01`.
    pub fn from_two_level(rho11: f64, rho01: C64) -> Self {
        let mut rho = Matrix3::zeros();
        rho[(ZERO, ZERO)] = C64::new(1.0 - rho11, 0.0);
        rho[(PLUS, PLUS)] = C64::new(rho11, 0.0);
        rho[(ZERO, PLUS)] = rho01;
        rho[(PLUS, ZERO)] = rho01.conj();
        SpinState { rho }
    }

    /// Packs the two-level block as (ρ₁₁, Re ρ₀₁, Im ρ₀₁).
    pub fn to_bloch(&self) -> [f64; 3] {
        let r = self.rho[(ZERO, PLUS)];
        [self.rho[(PLUS, PLUS)].re, r.re, r.im]
    }

    pub fn from_bloch(y: &[f64; 3]) -> Self {
        Self::from_two_level(y[0], C64::new(y[1], y[2]))
    }

    pub fn two_level(&self) -> TwoLevelView {
        let r = self.rho[(ZERO, PLUS)];
        TwoLevelView {
            rho00: self.rho[(ZERO, ZERO)].re,
            rho11: self.rho[(PLUS, PLUS)].re,
            rho01: (r.re, r.im),
        }
    }

    pub fn population_minus(&self) -> f64 {
        self.rho[(MINUS, MINUS)].re
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    /// Tr(ρ A).
    pub fn expect(&self, op: &Matrix3<C64>) -> C64 {
        (self.rho * op).trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.rho - self.rho.adjoint()).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Hermitian, unit trace and positive, each within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
            && (self.trace() - C64::new(1.0, 0.0)).norm() <= tol
            && self.min_eigenvalue() >= -tol
    }

    /// Row-major real/imag parts of all nine elements.
    pub fn pack(&self) -> [f64; 18] {
        let mut out = [0.0; 18];
        for i in 0..3 {
            for j in 0..3 {
                let z = self.rho[(i, j)];
                out[2 * (3 * i + j)] = z.re;
                out[2 * (3 * i + j) + 1] = z.im;
            }
        }
        out
    }

    pub fn unpack(y: &[f64; 18]) -> Self {
        let mut rho = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                rho[(i, j)] = C64::new(y[2 * (3 * i + j)], y[2 * (3 * i + j) + 1]);
            }
        }
        SpinState { rho }
    }
}
