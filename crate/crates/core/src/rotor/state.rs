use std::f64::consts::{PI, TAU};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotorState {
    pub alpha: f64,
    pub beta: f64,
    /// Third Euler angle.
    pub gamma_euler: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
    pub gamma_dot: f64,
}

impl RotorState {
    pub fn at_rest(alpha: f64, beta: f64) -> Self {
        RotorState {
            alpha,
            beta,
            gamma_euler: 0.0,
            alpha_dot: 0.0,
            beta_dot: 0.0,
            gamma_dot: 0.0,
        }
    }

    pub fn with_beta_dot(mut self, beta_dot: f64) -> Self {
        self.beta_dot = beta_dot;
        self
    }

    /// Body-axis angular velocity ω₃ = α̇cosβ + γ̇.
    pub fn spin_rate(&self) -> f64 {
        self.alpha_dot * self.beta.cos() + self.gamma_dot
    }

    /// Same orientation with β ∈ [0, π] and α, γ ∈ [0, 2π).
    pub fn canonical(self) -> Self {
        let mut s = self;
        s.beta -= TAU * (s.beta / TAU).round();
        if s.beta < 0.0 {
            s.beta = -s.beta;
            s.beta_dot = -s.beta_dot;
            s.alpha += PI;
            s.gamma_euler -= PI;
        }
        s.alpha = s.alpha.rem_euclid(TAU);
        s.gamma_euler = s.gamma_euler.rem_euclid(TAU);
        s
    }
}
