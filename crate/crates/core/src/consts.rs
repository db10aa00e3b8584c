//! CODATA 2018 physical constants (SI).

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK_H: f64 = 6.626_070_15e-34;
pub const K_B: f64 = 1.380_649e-23;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const TWO_PI: f64 = std::f64::consts::TAU;
