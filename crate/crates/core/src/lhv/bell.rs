//! A dispersion-free hidden-variable model for a single qubit and its
//! factored extension to several parties.
//!
//! The qubit state is its Bloch vector `p`. The hidden variable `λ` is
//! uniform on `[-1, 1]` and the projector `(1 + a·σ)/2` takes the value 1
//! exactly when `λ + a·p >= 0`, so its λ-average is `(1 + a·p)/2`. A
//! general observable `μ₁P₁ + μ₂P₂` takes `μ₁` when its top projector fires
//! and `μ₂` otherwise, which makes the average linear in the observable.

use crate::error::{Error, Result};
use crate::qcore::{bloch_components, norm3, spectral_decompose2, Observable, StateVector, UnitVector3, EXACT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellD2Model {
    bloch: [f64; 3],
}

impl BellD2Model {
    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let r = norm3(bloch);
        if !r.is_finite() || r > 1.0 + EXACT_TOL {
            return Err(Error::InvalidParameter(format!("Bloch vector length {r} exceeds 1")));
        }
        Ok(Self { bloch })
    }

    pub fn pure(n: UnitVector3) -> Self {
        Self { bloch: n.to_array() }
    }

    /// Model of the maximally mixed qubit.
    pub fn maximally_mixed() -> Self {
        Self { bloch: [0.0; 3] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// The pure state with this Bloch vector, if the model is pure.
    pub fn pure_state(&self) -> Option<StateVector> {
        let n = UnitVector3::new_with_tol(self.bloch[0], self.bloch[1], self.bloch[2], 1e-10).ok()?;
        Some(StateVector::from_bloch(n))
    }
}

/// Value of the projector `(1 + a·σ)/2` at hidden variable `lambda`;
/// a tie `λ + a·p = 0` counts as 1.
pub fn bell_d2_value(a: UnitVector3, m: &BellD2Model, lambda: f64) -> Result<u8> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} is outside [-1, 1]")));
    }
    Ok(u8::from(lambda + a.dot(m.bloch) >= 0.0))
}

/// Closed-form λ-average of [`bell_d2_value`].
pub fn projector_mean(a: UnitVector3, m: &BellD2Model) -> f64 {
    (1.0 + a.dot(m.bloch).clamp(-1.0, 1.0)) / 2.0
}

fn top_axis(o: &Observable) -> Result<Option<UnitVector3>> {
    let (_, c) = bloch_components(o)?;
    let r = norm3(c);
    if r < EXACT_TOL {
        return Ok(None);
    }
    Ok(Some(UnitVector3::normalize(c[0], c[1], c[2])?))
}

/// Dispersion-free value of a qubit observable at `lambda`.
pub fn observable_value(o: &Observable, m: &BellD2Model, lambda: f64) -> Result<f64> {
    let sp = spectral_decompose2(o)?;
    match top_axis(o)? {
        None => Ok(sp.mu1),
        Some(axis) => Ok(if bell_d2_value(axis, m, lambda)? == 1 { sp.mu1 } else { sp.mu2 }),
    }
}

/// Closed-form λ-average of [`observable_value`]; equals `c₀ + c·p` for
/// `o = c₀ + c·σ`.
pub fn observable_mean(o: &Observable, m: &BellD2Model) -> Result<f64> {
    let sp = spectral_decompose2(o)?;
    match top_axis(o)? {
        None => Ok(sp.mu1),
        Some(axis) => {
            let fire = projector_mean(axis, m);
            Ok(sp.mu1 * fire + sp.mu2 * (1.0 - fire))
        }
    }
}

/// `∫P₁ a₁ · ∫P₂ b₂`: two independent single-qubit models, one per party.
pub fn product_lhv_expectation(a1: &Observable, b2: &Observable, m1: &BellD2Model, m2: &BellD2Model) -> Result<f64> {
    Ok(observable_mean(a1, m1)? * observable_mean(b2, m2)?)
}
