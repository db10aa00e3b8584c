use serde::Serialize;

use crate::params::SystemConfig;
use crate::response::{dynamic_friction, friction_analytic};

/// Spin-torque coefficients felt by the rotor at one orientation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FieldValue {
    /// N·m
    pub m_beta_0: f64,
    /// J·s
    pub kappa_alphabeta: f64,
    /// J·s
    pub kappa_beta: f64,
    /// J²·s
    pub d_p: f64,
}

pub trait FrictionField: Sync {
    fn at(&self, alpha: f64, beta: f64) -> FieldValue;
}

/// Orientation-independent coefficients.
#[derive(Debug, Clone, Copy)]
pub struct ConstantField(pub FieldValue);

impl ConstantField {
    pub fn kappa_only(kappa_beta: f64) -> Self {
        ConstantField(FieldValue {
            kappa_beta,
            ..FieldValue::default()
        })
    }
}

impl FrictionField for ConstantField {
    fn at(&self, _: f64, _: f64) -> FieldValue {
        self.0
    }
}

/// Closed-form linear-response coefficients at the instantaneous
/// orientation. Where the drive vanishes the spin sits in |0⟩ and exerts no
/// torque.
#[derive(Debug, Clone)]
pub struct AnalyticField {
    pub cfg: SystemConfig,
}

impl AnalyticField {
    pub fn new(cfg: &SystemConfig) -> Self {
        AnalyticField { cfg: cfg.clone() }
    }
}

impl FrictionField for AnalyticField {
    fn at(&self, alpha: f64, beta: f64) -> FieldValue {
        match friction_analytic(&self.cfg, alpha, beta) {
            Ok(r) => FieldValue {
                m_beta_0: r.m_beta_0,
                kappa_alphabeta: r.kappa_alphabeta,
                kappa_beta: r.kappa_beta,
                d_p: r.d_p,
            },
            Err(_) => FieldValue::default(),
        }
    }
}

/// Friction from the full two-level equations linearised in the velocities
/// (no adiabatic elimination), taken at libration frequency `omega` (real,
/// dissipative part); static torque and diffusion as in [`AnalyticField`].
#[derive(Debug, Clone)]
pub struct LinearResponseField {
    pub cfg: SystemConfig,
    pub omega: f64,
}

impl LinearResponseField {
    /// Zero-frequency (Markov) friction.
    pub fn new(cfg: &SystemConfig) -> Self {
        Self::at_frequency(cfg, 0.0)
    }

    pub fn at_frequency(cfg: &SystemConfig, omega: f64) -> Self {
        LinearResponseField {
            cfg: cfg.clone(),
            omega,
        }
    }
}

impl FrictionField for LinearResponseField {
    fn at(&self, alpha: f64, beta: f64) -> FieldValue {
        let base = AnalyticField::new(&self.cfg).at(alpha, beta);
        match dynamic_friction(&self.cfg, alpha, beta, self.omega) {
            Ok((ka, kb)) => FieldValue {
                kappa_alphabeta: ka.re,
                kappa_beta: kb.re,
                ..base
            },
            Err(_) => base,
        }
    }
}
