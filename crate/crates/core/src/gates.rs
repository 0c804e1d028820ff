//! Parameterized partial-swap unitaries and the thermal / pure states the
//! collision engines start from.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, UnitaryMatrix};

/// Default frequency ratio ω/ω₀ of the qubit transition to the reference
/// frequency that makes the temperature dimensionless.
pub const DEFAULT_OMEGA_RATIO: f64 = 5.0;

/// A dimensionless collision strength, restricted to [0, π/2].
///
/// π/2 exchanges the two qubit states completely; 0 is a no-op.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapStrength(f64);

impl SwapStrength {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::Domain {
                name: "swap strength".into(),
                value: theta,
                lo: 0.0,
                hi: FRAC_PI_2,
            });
        }
        Ok(Self(theta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Thermal preparation of an environment qubit: dimensionless temperature
/// T = k_B T_R / (ħ ω₀) and the frequency ratio ω/ω₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    temperature: f64,
    omega_ratio: f64,
}

impl ThermalSpec {
    pub fn new(temperature: f64, omega_ratio: f64) -> Result<Self> {
        if !temperature.is_finite() || temperature < 0.0 {
            return Err(Error::Domain {
                name: "T".into(),
                value: temperature,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if !omega_ratio.is_finite() || omega_ratio <= 0.0 {
            return Err(Error::Domain {
                name: "omega_ratio".into(),
                value: omega_ratio,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        Ok(Self {
            temperature,
            omega_ratio,
        })
    }

    pub fn with_default_ratio(temperature: f64) -> Result<Self> {
        Self::new(temperature, DEFAULT_OMEGA_RATIO)
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn omega_ratio(&self) -> f64 {
        self.omega_ratio
    }

    /// Gibbs weight of the ground state |0>: 1 / (1 + e^{-ω/(ω₀ T)}).
    ///
    /// T = 0 is handled as an exact limit rather than through 1/T.
    pub fn ground_population(&self) -> f64 {
        if self.temperature == 0.0 {
            return 1.0;
        }
        1.0 / (1.0 + (-self.omega_ratio / self.temperature).exp())
    }
}

/// The partial-swap unitary cos θ · I + i sin θ · SWAP on two qubits.
///
/// In the ordered basis {|00>, |01>, |10>, |11>} this is diagonal phases
/// e^{iθ} on |00>, |11> and a central block [[cos θ, i sin θ], [i sin θ, cos θ]].
pub fn partial_swap(theta: SwapStrength) -> UnitaryMatrix {
    let (sin, cos) = theta.value().sin_cos();
    let phase = Complex64::new(cos, sin);
    let diag = Complex64::new(cos, 0.0);
    let cross = Complex64::new(0.0, sin);
    let z = Complex64::new(0.0, 0.0);
    UnitaryMatrix::from_amps_unchecked(DMatrix::from_row_slice(
        4,
        4,
        &[
            phase, z, z, z, //
            z, diag, cross, z, //
            z, cross, diag, z, //
            z, z, z, phase,
        ],
    ))
}

/// Thermal (Gibbs) qubit state for H = ω σ_z / 2 with σ_z = |1><1| - |0><0|,
/// so |0> is the lower-energy state and gains weight as T drops.
pub fn thermal_state(spec: &ThermalSpec) -> DensityMatrix {
    let p0 = spec.ground_population();
    let z = Complex64::new(0.0, 0.0);
    DensityMatrix::from_amps_unchecked(DMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(p0, 0.0), z, z, Complex64::new(1.0 - p0, 0.0)],
    ))
}

/// The antipodal pure pair (|+><+|, |-><-|) that maximizes the discrete
/// backflow measure; the two members start at trace distance 1.
pub fn optimal_pair() -> (DensityMatrix, DensityMatrix) {
    let h = Complex64::new(0.5, 0.0);
    let m = Complex64::new(-0.5, 0.0);
    let plus = DensityMatrix::from_amps_unchecked(DMatrix::from_row_slice(2, 2, &[h, h, h, h]));
    let minus = DensityMatrix::from_amps_unchecked(DMatrix::from_row_slice(2, 2, &[h, m, m, h]));
    (plus, minus)
}
