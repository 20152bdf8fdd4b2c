//! Closed-form three-site model.
//!
//! The three defects of the seven-site chain behave as a trimer with equal
//! couplings η. Nothing here calls the numerical propagator, so the two can
//! be checked against each other.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix4, Vector4};

use crate::chain::CouplingScale;
use crate::dynamics::C64;
use crate::entanglement::{eof, TwoQubitDensity};
use crate::error::{Error, Result};

/// Effective defect-defect coupling
/// `η = √(Δ² + 3δ² − √(Δ⁴ + 6Δ²δ² + δ⁴)) / 2`.
///
/// `√2·η` is exactly the smallest positive single-excitation energy of the
/// clean seven-site chain.
pub fn effective_eta(scale: CouplingScale) -> Result<f64> {
    let CouplingScale { big_delta, delta } = CouplingScale::new(scale.big_delta, scale.delta)?;
    let (s2, w2) = (big_delta * big_delta, delta * delta);
    let inner = (s2 * s2 + 6.0 * s2 * w2 + w2 * w2).sqrt();
    // s2 + 3 w2 - inner cancels catastrophically for small δ; use the
    // conjugate form (s2+3w2)² - inner² = 8 w2².
    let radicand = 8.0 * w2 * w2 / (s2 + 3.0 * w2 + inner);
    Ok(radicand.sqrt() / 2.0)
}

/// Mirroring time `t_M = π / (√2 η)`.
pub fn mirroring_time(eta: f64) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be positive, got {eta}")));
    }
    Ok(PI / (SQRT_2 * eta))
}

/// Equal-coupling trimer `[[0,η,0],[η,0,η],[0,η,0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimerModel {
    eta: f64,
}

/// Energies ascending with their eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimerEigensystem {
    pub energies: [f64; 3],
    pub vectors: [[f64; 3]; 3],
}

impl TrimerModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::param("eta", format!("must be positive, got {eta}")));
        }
        Ok(TrimerModel { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mirroring_time(&self) -> f64 {
        PI / (SQRT_2 * self.eta)
    }

    pub fn eigensystem(&self) -> TrimerEigensystem {
        let e = SQRT_2 * self.eta;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TrimerEigensystem {
            energies: [-e, 0.0, e],
            vectors: [[-0.5, h, -0.5], [h, 0.0, -h], [0.5, h, 0.5]],
        }
    }

    /// Reduced state of the outer sites at time `t` after `|+⟩|+⟩` injection:
    /// `ρ = |α⟩⟨α| + |β⟩⟨β|` with
    /// `|α⟩ = (|00⟩ + cos θ (|01⟩ + |10⟩ + |11⟩)) / 2`,
    /// `|β⟩ = −i sin θ / √2 (|00⟩ + |01⟩/2 + |10⟩/2)`, `θ = √2 η t`.
    pub fn outer_pair_density(&self, t: f64) -> TwoQubitDensity {
        let theta = SQRT_2 * self.eta * t;
        let (cos, sin) = (theta.cos(), theta.sin());
        let re = |x: f64| C64::new(x, 0.0);
        let alpha = Vector4::new(re(0.5), re(0.5 * cos), re(0.5 * cos), re(0.5 * cos));
        let b = C64::new(0.0, -sin / SQRT_2);
        let beta = Vector4::new(b, b * 0.5, b * 0.5, re(0.0));
        let m: Matrix4<C64> = alpha * alpha.adjoint() + beta * beta.adjoint();
        TwoQubitDensity::from_gram(m)
    }
}

/// Trimer eigensystem for coupling `eta`.
pub fn trimer_eigensystem(eta: f64) -> Result<TrimerEigensystem> {
    Ok(TrimerModel::new(eta)?.eigensystem())
}

/// EoF between the outer trimer sites at time `t`.
pub fn analytic_eof_profile(eta: f64, t: f64) -> Result<f64> {
    Ok(eof(&TrimerModel::new(eta)?.outer_pair_density(t)))
}

/// Spectrum of the trimer with couplings `η + d` and `η + e`, ascending.
///
/// The zero mode is untouched by coupling noise.
pub fn noisy_trimer_eigenvalues(eta: f64, d: f64, e: f64) -> [f64; 3] {
    let r = (2.0 * eta * eta + 2.0 * eta * d + 2.0 * eta * e + d * d + e * e).sqrt();
    [-r, 0.0, r]
}
