//! Local hidden-variable models for Hardy's scenario.
//!
//! Only the pushforward of a hidden-variable measure onto joint 0/1 value
//! assignments of `(U₁, D₁, U₂, D₂)` enters any moment, so a model is a
//! probability vector over the 16 deterministic strategies and every
//! question about it is a small linear program.

mod bell;
pub mod simplex;

pub use bell::{bell_d2_value, observable_mean, projector_mean, observable_value, product_lhv_expectation, BellD2Model};

use std::fmt;

use crate::error::{Error, Result};
use crate::hardy::{hardy_joint, hardy_moments, hardy_operators, hardy_state, HardyParams};
use crate::qcore::{expectation, spectral_decompose2, tensor_product, Observable};
use simplex::PhaseOne;

pub const STRATEGY_COUNT: usize = 16;

/// Witnesses must reproduce every constraint to this accuracy.
pub const WITNESS_TOL: f64 = 1e-9;

/// One joint value assignment to the four projectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub u1: bool,
    pub d1: bool,
    pub u2: bool,
    pub d2: bool,
}

impl DeterministicStrategy {
    /// Binary counter over `(u1, d1, u2, d2)`, `u1` most significant.
    pub fn from_index(index: usize) -> Self {
        assert!(index < STRATEGY_COUNT, "strategy index {index} out of range");
        Self { u1: index & 8 != 0, d1: index & 4 != 0, u2: index & 2 != 0, d2: index & 1 != 0 }
    }

    pub fn index(&self) -> usize {
        (self.u1 as usize) << 3 | (self.d1 as usize) << 2 | (self.u2 as usize) << 1 | self.d2 as usize
    }

    pub fn bits(&self) -> [u8; 4] {
        [self.u1 as u8, self.d1 as u8, self.u2 as u8, self.d2 as u8]
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.bits();
        write!(f, "({a},{b},{c},{d})")
    }
}

pub fn enumerate_strategies() -> Vec<DeterministicStrategy> {
    (0..STRATEGY_COUNT).map(DeterministicStrategy::from_index).collect()
}

/// Value of a monomial on every strategy, indexed like [`enumerate_strategies`].
pub fn monomial(f: impl Fn(&DeterministicStrategy) -> bool) -> [f64; STRATEGY_COUNT] {
    let mut coeffs = [0.0; STRATEGY_COUNT];
    for s in enumerate_strategies() {
        coeffs[s.index()] = if f(&s) { 1.0 } else { 0.0 };
    }
    coeffs
}

/// `E[monomial] = target`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentConstraint {
    pub label: String,
    pub coeffs: [f64; STRATEGY_COUNT],
    pub target: f64,
}

impl MomentConstraint {
    pub fn new(label: impl Into<String>, coeffs: [f64; STRATEGY_COUNT], target: f64) -> Self {
        Self { label: label.into(), coeffs, target }
    }
}

/// Probability weights over the 16 strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvDistribution {
    weights: [f64; STRATEGY_COUNT],
}

impl LhvDistribution {
    /// Weights above `-1e-12` are accepted (and clamped at zero); the total
    /// must be 1 within `1e-9`.
    pub fn new(weights: [f64; STRATEGY_COUNT]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -1e-12) {
            return Err(Error::InvalidParameter(format!("negative weight {w}")));
        }
        let weights = weights.map(|w| w.max(0.0));
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WITNESS_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {total}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform() -> Self {
        Self { weights: [1.0 / STRATEGY_COUNT as f64; STRATEGY_COUNT] }
    }

    pub fn point(s: DeterministicStrategy) -> Self {
        let mut weights = [0.0; STRATEGY_COUNT];
        weights[s.index()] = 1.0;
        Self { weights }
    }

    pub fn weights(&self) -> &[f64; STRATEGY_COUNT] {
        &self.weights
    }

    pub fn weight(&self, s: DeterministicStrategy) -> f64 {
        self.weights[s.index()]
    }

    pub fn moment(&self, coeffs: &[f64; STRATEGY_COUNT]) -> f64 {
        self.weights.iter().zip(coeffs).map(|(w, c)| w * c).sum()
    }

    /// Largest `|E[c] - target|` over the constraints.
    pub fn max_violation(&self, cs: &[MomentConstraint]) -> f64 {
        cs.iter().map(|c| (self.moment(&c.coeffs) - c.target).abs()).fold(0.0, f64::max)
    }
}

/// The eight moment equalities a local model of Hardy's state must meet.
///
/// In order: `E[u1]`, `E[u2]`, `E[d1]`, `E[d2]`, `E[d1 u2] = E[d1]`,
/// `E[d2 u1] = E[d2]`, `E[u1 u2] = 0`, `E[d1 d2] = <D₁D₂>`. The two
/// conditionals equal one, so they become moment equalities against the
/// marginal, which for nonnegative weights is the same as requiring
/// `d1 = 1 ⇒ u2 = 1` on every strategy carrying weight.
pub fn hardy_constraints(p: HardyParams) -> Result<Vec<MomentConstraint>> {
    if p.ab() <= 0.0 {
        return Err(Error::InvalidParameter(
            "alpha*beta = 0: the state is a product and the Hardy constraint set is trivial".into(),
        ));
    }
    let m = hardy_moments(p);
    Ok(vec![
        MomentConstraint::new("E[u1]", monomial(|s| s.u1), m.u1),
        MomentConstraint::new("E[u2]", monomial(|s| s.u2), m.u2),
        MomentConstraint::new("E[d1]", monomial(|s| s.d1), m.d1),
        MomentConstraint::new("E[d2]", monomial(|s| s.d2), m.d2),
        MomentConstraint::new("E[d1*u2]", monomial(|s| s.d1 && s.u2), m.d1),
        MomentConstraint::new("E[d2*u1]", monomial(|s| s.d2 && s.u1), m.d2),
        MomentConstraint::new("E[u1*u2]", monomial(|s| s.u1 && s.u2), m.u1u2),
        MomentConstraint::new("E[d1*d2]", monomial(|s| s.d1 && s.d2), hardy_joint(p)),
    ])
}

/// Hardy's constraints without the `E[u1 u2]` equality, the base set for
/// asking what a local model predicts for `E[u1 u2]`.
pub fn hardy_range_constraints(p: HardyParams) -> Result<Vec<MomentConstraint>> {
    Ok(hardy_constraints(p)?.into_iter().filter(|c| c.label != "E[u1*u2]").collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

impl fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeasibilityStatus::Feasible => "FEASIBLE",
            FeasibilityStatus::Infeasible => "INFEASIBLE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub witness: Option<LhvDistribution>,
    /// Constraint residual of the witness when feasible, the optimal
    /// artificial-variable sum otherwise.
    pub max_violation: f64,
}

fn lp_rows(cs: &[MomentConstraint]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut a = vec![vec![1.0; STRATEGY_COUNT]];
    let mut b = vec![1.0];
    for c in cs {
        a.push(c.coeffs.to_vec());
        b.push(c.target);
    }
    (a, b)
}

/// Decides whether some distribution over strategies meets every constraint.
pub fn solve_feasibility(cs: &[MomentConstraint]) -> Result<FeasibilityResult> {
    if cs.is_empty() {
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            witness: Some(LhvDistribution::uniform()),
            max_violation: 0.0,
        });
    }
    let (a, b) = lp_rows(cs);
    match simplex::phase_one(&a, &b, STRATEGY_COUNT)? {
        PhaseOne::Infeasible { artificial_sum } => Ok(FeasibilityResult {
            status: FeasibilityStatus::Infeasible,
            witness: None,
            max_violation: artificial_sum,
        }),
        PhaseOne::Feasible(x) => {
            let mut weights = [0.0; STRATEGY_COUNT];
            weights.copy_from_slice(&x);
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let witness = LhvDistribution::new(weights)?;
            let max_violation = witness.max_violation(cs);
            if max_violation > WITNESS_TOL {
                return Err(Error::Numerical(format!(
                    "phase one accepted a point with residual {max_violation:e}"
                )));
            }
            Ok(FeasibilityResult { status: FeasibilityStatus::Feasible, witness: Some(witness), max_violation })
        }
    }
}

/// Smallest and largest `E[objective]` over distributions meeting `cs`.
pub fn lhv_moment_range(cs: &[MomentConstraint], objective: &[f64; STRATEGY_COUNT]) -> Result<(f64, f64)> {
    let (a, b) = lp_rows(cs);
    let (min, _) = simplex::minimize(&a, &b, objective)?;
    let negated: Vec<f64> = objective.iter().map(|c| -c).collect();
    let (neg_max, _) = simplex::minimize(&a, &b, &negated)?;
    Ok((min, -neg_max))
}

/// `<U₁U₂>` written as `<(U₁+D₁)U₂> - <D₁U₂>` with `U₁+D₁` replaced by its
/// spectral decomposition `μ₁P₁ + μ₂P₂`.
///
/// This is the value a hidden-variable model assigns when the sum `U₁+D₁`
/// is given its own dispersion-free representation; it reproduces the
/// quantum zero for every `α`.
pub fn clustered_u1u2(p: HardyParams) -> Result<f64> {
    let ops = hardy_operators(p);
    let psi = hardy_state(p);
    let sp = spectral_decompose2(&ops.u.add(&ops.d)?)?;
    let term = |proj: &Observable| expectation(&tensor_product(proj, &ops.u)?, &psi);
    let clustered = sp.mu1 * term(&sp.p1)? + sp.mu2 * term(&sp.p2)?;
    Ok(clustered - term(&ops.d)?)
}

/// Two hidden-variable readings of the same quantum expression `<U₁U₂>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationComparison {
    /// LP range of `E[u1 u2]` under the standard product translation.
    pub standard_min: f64,
    pub standard_max: f64,
    /// Value under the spectrally clustered translation.
    pub clustered: f64,
    /// Quantum `<D₁D₂>`, the lower bound the standard reading inherits.
    pub joint: f64,
}

impl TranslationComparison {
    pub fn gap(&self) -> f64 {
        self.standard_min - self.clustered
    }
}

pub fn compare_translations(p: HardyParams) -> Result<TranslationComparison> {
    let cs = hardy_range_constraints(p)?;
    let (standard_min, standard_max) = lhv_moment_range(&cs, &monomial(|s| s.u1 && s.u2))?;
    Ok(TranslationComparison { standard_min, standard_max, clustered: clustered_u1u2(p)?, joint: hardy_joint(p) })
}

/// CHSH combination with `(u1, d1)` read as Alice's two ±1 outcomes and
/// `(u2, d2)` as Bob's.
pub fn lhv_chsh(dist: &LhvDistribution) -> f64 {
    enumerate_strategies()
        .into_iter()
        .map(|s| {
            let pm = |b: bool| if b { 1.0 } else { -1.0 };
            let (a, a2, b, b2) = (pm(s.u1), pm(s.d1), pm(s.u2), pm(s.d2));
            dist.weight(s) * (a * b + a * b2 + a2 * b - a2 * b2)
        })
        .sum()
}
