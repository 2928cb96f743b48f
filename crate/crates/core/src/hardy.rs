//! Hardy's two-qubit state, its measurement projectors and the quantum
//! predictions built from them.
//!
//! The state is `α|++> - β|-->` with real `α, β >= 0` and `α² + β² = 1`.
//! Each party measures the projectors `U = |u><u|` and `D = |d><d|` where
//!
//! ```text
//! |u> = (√β |+> + √α |->) / √(α + β)
//! |d> = (β^{3/2} |+> - α^{3/2} |->) / √(α³ + β³)
//! ```
//!
//! Every prediction is available in closed form ([`hardy_moments`],
//! [`hardy_joint`]) and by direct matrix evaluation
//! ([`hardy_moments_matrix`], [`hardy_joint_matrix`]).

use crate::error::{Error, Result};
use crate::optimize::bisect_root;
use crate::qcore::{expectation, projector, tensor_product, Observable, StateVector};

/// Real amplitudes of Hardy's state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyParams {
    alpha: f64,
    beta: f64,
}

impl HardyParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} is outside [0, 1]")));
        }
        let beta = (1.0 - alpha * alpha).max(0.0).sqrt();
        Ok(Self { alpha, beta })
    }

    /// The parameters with `αβ = t` and `α >= β`.
    pub fn from_product(t: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&t) {
            return Err(Error::InvalidParameter(format!("alpha*beta = {t} is outside [0, 1/2]")));
        }
        let alpha = ((1.0 + (1.0 - 4.0 * t * t).max(0.0).sqrt()) / 2.0).sqrt();
        let beta = t / alpha;
        Ok(Self { alpha, beta })
    }

    pub fn maximally_entangled() -> Self {
        Self { alpha: std::f64::consts::FRAC_1_SQRT_2, beta: std::f64::consts::FRAC_1_SQRT_2 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `αβ`, which ranges over `[0, 1/2]`.
    pub fn ab(&self) -> f64 {
        self.alpha * self.beta
    }
}

/// `α|++> - β|-->` in the order `++, +-, -+, --`.
pub fn hardy_state(p: HardyParams) -> StateVector {
    StateVector::from_real(&[p.alpha, 0.0, 0.0, -p.beta]).expect("Hardy amplitudes have unit norm")
}

/// The single-party vectors `|u_i>` and `|d_i>`; both parties use the same pair.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyBasis {
    pub u1: StateVector,
    pub d1: StateVector,
    pub u2: StateVector,
    pub d2: StateVector,
}

/// At `α = 0` both vectors reduce to `|+>`; at `α = 1`, `|u> = |->` and
/// `|d> = -|->`. The formulas stay finite there because `α + β >= 1`.
pub fn hardy_basis(p: HardyParams) -> HardyBasis {
    let (a, b) = (p.alpha, p.beta);
    let u = StateVector::from_real(&[b.sqrt(), a.sqrt()]).expect("α + β >= 1");
    let d = StateVector::from_real(&[b.powf(1.5), -a.powf(1.5)]).expect("α³ + β³ > 0");
    HardyBasis { u1: u.clone(), d1: d.clone(), u2: u, d2: d }
}

/// Closed form of `<u_i|d_i> = (β² - α²) / √((α + β)(α³ + β³))`.
pub fn ud_overlap(p: HardyParams) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    (b * b - a * a) / ((a + b) * (a.powi(3) + b.powi(3))).sqrt()
}

/// The measurement projectors, both as single-qubit operators and lifted
/// to the two-qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyOperators {
    pub u: Observable,
    pub d: Observable,
    pub u1: Observable,
    pub d1: Observable,
    pub u2: Observable,
    pub d2: Observable,
}

pub fn hardy_operators(p: HardyParams) -> HardyOperators {
    let basis = hardy_basis(p);
    let u = projector(&basis.u1).expect("normalized");
    let d = projector(&basis.d1).expect("normalized");
    let id = Observable::identity(2).expect("dimension 2");
    let lift1 = |o: &Observable| tensor_product(o, &id).expect("2 x 2 = 4");
    let lift2 = |o: &Observable| tensor_product(&id, o).expect("2 x 2 = 4");
    HardyOperators { u1: lift1(&u), d1: lift1(&d), u2: lift2(&u), d2: lift2(&d), u, d }
}

/// `U_i + D_i` on a single qubit.
pub fn u_plus_d(p: HardyParams) -> Observable {
    let ops = hardy_operators(p);
    ops.u.add(&ops.d).expect("same dimension")
}

/// Quantum predictions of Hardy's model.
///
/// The three conditionals divide by `<D_i>` and are `None` when `αβ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyMoments {
    pub d1: f64,
    pub d2: f64,
    pub u1: f64,
    pub u2: f64,
    /// `<D₁U₂D₁> / <D₁>`
    pub cond_d1u2: Option<f64>,
    /// `<D₂U₁D₂> / <D₂>`
    pub cond_d2u1: Option<f64>,
    /// `<D₁D₂D₁> / <D₁>`
    pub cond_d1d2: Option<f64>,
    /// `<U₁U₂>`
    pub u1u2: f64,
}

impl HardyMoments {
    /// Largest field-wise difference; infinite if one side has a defined
    /// conditional and the other does not.
    pub fn max_abs_diff(&self, other: &HardyMoments) -> f64 {
        let opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => (x - y).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        [
            (self.d1 - other.d1).abs(),
            (self.d2 - other.d2).abs(),
            (self.u1 - other.u1).abs(),
            (self.u2 - other.u2).abs(),
            opt(self.cond_d1u2, other.cond_d1u2),
            opt(self.cond_d2u1, other.cond_d2u1),
            opt(self.cond_d1d2, other.cond_d1d2),
            (self.u1u2 - other.u1u2).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Closed-form predictions.
pub fn hardy_moments(p: HardyParams) -> HardyMoments {
    let t = p.ab();
    let d = t * t / (1.0 - t);
    let defined = t > 0.0;
    HardyMoments {
        d1: d,
        d2: d,
        u1: t,
        u2: t,
        cond_d1u2: defined.then_some(1.0),
        cond_d2u1: defined.then_some(1.0),
        cond_d1d2: defined.then(|| 1.0 - t / (1.0 - t)),
        u1u2: 0.0,
    }
}

/// The same predictions evaluated as `<ψ|·|ψ>` on 4×4 matrices.
pub fn hardy_moments_matrix(p: HardyParams) -> Result<HardyMoments> {
    let psi = hardy_state(p);
    let ops = hardy_operators(p);
    let ev = |o: &Observable| expectation(o, &psi);
    let d1 = ev(&ops.d1)?;
    let d2 = ev(&ops.d2)?;
    let defined = p.ab() > 0.0;
    let cond = |num: f64, den: f64| defined.then(|| num / den);
    Ok(HardyMoments {
        d1,
        d2,
        u1: ev(&ops.u1)?,
        u2: ev(&ops.u2)?,
        cond_d1u2: cond(ev(&ops.d1.sandwich(&ops.u2)?)?, d1),
        cond_d2u1: cond(ev(&ops.d2.sandwich(&ops.u1)?)?, d2),
        cond_d1d2: cond(ev(&ops.d1.sandwich(&ops.d2)?)?, d1),
        u1u2: ev(&ops.u1.product(&ops.u2)?)?,
    })
}

// 1 - 2t is clamped: t = αβ can exceed 1/2 by an ulp
fn joint_of_product(t: f64) -> f64 {
    t * t * (1.0 - 2.0 * t).max(0.0) / ((1.0 - t) * (1.0 - t))
}

fn joint_derivative(t: f64) -> f64 {
    2.0 * t * (1.0 - 3.0 * t + t * t) / (1.0 - t).powi(3)
}

/// `<D₁D₂> = α²β²(1 - 2αβ) / (1 - αβ)²`, the product of `<D₁>` and the
/// conditional `<D₁D₂D₁>/<D₁>`.
pub fn hardy_joint(p: HardyParams) -> f64 {
    joint_of_product(p.ab())
}

pub fn hardy_joint_matrix(p: HardyParams) -> Result<f64> {
    let ops = hardy_operators(p);
    expectation(&ops.d1.product(&ops.d2)?, &hardy_state(p))
}

/// Location and height of the largest `<D₁D₂>` over `αβ ∈ (0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyMaximum {
    pub t_star: f64,
    pub p_star: f64,
    pub gradient: f64,
}

const MAXIMUM_GRID: usize = 1000;

/// Coarse grid over `αβ` followed by bisection on the analytic derivative
/// inside the bracketing cell.
pub fn hardy_maximum() -> HardyMaximum {
    let h = 0.5 / MAXIMUM_GRID as f64;
    let best = (1..=MAXIMUM_GRID)
        .max_by(|&i, &j| joint_of_product(i as f64 * h).total_cmp(&joint_of_product(j as f64 * h)))
        .expect("grid is nonempty");
    let lo = (best - 1) as f64 * h;
    let hi = ((best + 1) as f64 * h).min(0.5);
    let t_star = bisect_root(joint_derivative, lo.max(h * 1e-3), hi, 200).unwrap_or(best as f64 * h);
    HardyMaximum { t_star, p_star: joint_of_product(t_star), gradient: joint_derivative(t_star) }
}
