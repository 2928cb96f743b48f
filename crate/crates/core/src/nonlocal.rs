//! CHSH structure of two-qubit states and the three-qubit GHZ checks.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lhv::{observable_mean, BellD2Model};
use crate::optimize::golden_section_maximize;
use crate::qcore::{
    add3, expectation, norm3, pauli_observable, pauli_x, pauli_y, pauli_z, sub3, tensor_product, Complex, Observable,
    StateVector, UnitVector3, EXACT_TOL,
};

pub const CLASSICAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// Alice measures along `a` or `a_prime`, Bob along `b` or `b_prime`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: UnitVector3,
    pub a_prime: UnitVector3,
    pub b: UnitVector3,
    pub b_prime: UnitVector3,
}

impl ChshSettings {
    /// `a = z`, `a' = x`, `b, b' = (z ± x)/√2`: the planar settings that
    /// saturate the operator bound.
    pub fn tsirelson() -> Self {
        let s = FRAC_1_SQRT_2;
        Self {
            a: UnitVector3::Z,
            a_prime: UnitVector3::X,
            b: UnitVector3::normalize(s, 0.0, s).expect("nonzero"),
            b_prime: UnitVector3::normalize(-s, 0.0, s).expect("nonzero"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshReport {
    pub value: f64,
    pub settings: ChshSettings,
    /// Bound from translating the four-term expansion term by term.
    pub bound_standard: f64,
    /// Bound from translating the `(b ± b')` grouping, `|b+b'| + |b-b'|`.
    pub bound_clustered: f64,
    pub tsirelson: f64,
}

fn correlator(a: [f64; 3], b: [f64; 3]) -> Result<Observable> {
    let sa = pauli_combination(a);
    let sb = pauli_combination(b);
    tensor_product(&sa, &sb)
}

// v·σ for an arbitrary (not necessarily unit) real vector
fn pauli_combination(v: [f64; 3]) -> Observable {
    let r = norm3(v);
    if r == 0.0 {
        return Observable::identity(2).expect("dimension 2").scale(0.0);
    }
    let n = UnitVector3::normalize(v[0], v[1], v[2]).expect("nonzero");
    pauli_observable(n).scale(r)
}

/// `a·σ ⊗ (b + b')·σ + a'·σ ⊗ (b - b')·σ`.
pub fn chsh_operator(s: &ChshSettings) -> Observable {
    let b = s.b.to_array();
    let bp = s.b_prime.to_array();
    let first = correlator(s.a.to_array(), add3(b, bp)).expect("2 x 2 = 4");
    let second = correlator(s.a_prime.to_array(), sub3(b, bp)).expect("2 x 2 = 4");
    first.add(&second).expect("same dimension")
}

/// `|b + b'| + |b - b'|`, between 2 (collinear) and `2√2` (orthogonal).
pub fn clustered_bound(b: UnitVector3, b_prime: UnitVector3) -> f64 {
    norm3(add3(b.to_array(), b_prime.to_array())) + norm3(sub3(b.to_array(), b_prime.to_array()))
}

/// `<ψ|B|ψ>`, cross-checked against the four-term expansion
/// `<ab> + <ab'> + <a'b> - <a'b'>`.
pub fn chsh_value(psi: &StateVector, s: &ChshSettings) -> Result<ChshReport> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: psi.dim() });
    }
    let value = expectation(&chsh_operator(s), psi)?;
    let term = |x: UnitVector3, y: UnitVector3| expectation(&correlator(x.to_array(), y.to_array())?, psi);
    let expanded = term(s.a, s.b)? + term(s.a, s.b_prime)? + term(s.a_prime, s.b)? - term(s.a_prime, s.b_prime)?;
    let gap = (value - expanded).abs();
    if gap > EXACT_TOL {
        return Err(Error::Numerical(format!("CHSH expansion disagrees with operator form by {gap:e}")));
    }
    Ok(ChshReport {
        value,
        settings: *s,
        bound_standard: CLASSICAL_BOUND,
        bound_clustered: clustered_bound(s.b, s.b_prime),
        tsirelson: TSIRELSON_BOUND,
    })
}

/// `T_ij = <σ_i ⊗ σ_j>` for a two-qubit state.
pub fn correlation_matrix(psi: &StateVector) -> Result<[[f64; 3]; 3]> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: psi.dim() });
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut t = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            t[i][j] = expectation(&tensor_product(si, sj)?, psi)?;
        }
    }
    Ok(t)
}

/// `T_ij = <σ_i ⊗ σ_j>` on qubits `first < second` of a three-qubit state,
/// identity on the remaining qubit.
pub fn pair_correlation_matrix(psi: &StateVector, first: usize, second: usize) -> Result<[[f64; 3]; 3]> {
    if psi.dim() != 8 {
        return Err(Error::DimensionMismatch { expected: 8, got: psi.dim() });
    }
    if first >= second || second > 2 {
        return Err(Error::InvalidParameter(format!("qubit pair ({first}, {second}) is not ordered within 0..3")));
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let id = Observable::identity(2)?;
    let mut t = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            let mut factors = [&id, &id, &id];
            factors[first] = si;
            factors[second] = sj;
            let op = tensor_product(&tensor_product(factors[0], factors[1])?, factors[2])?;
            t[i][j] = expectation(&op, psi)?;
        }
    }
    Ok(t)
}

/// Maximal CHSH value `2√(t₁² + t₂²)` from the two largest singular values
/// of a correlation matrix.
pub fn max_chsh_from_correlations(t: &[[f64; 3]; 3]) -> f64 {
    let m = Matrix3::from_fn(|i, j| t[i][j]);
    let eig = SymmetricEigen::new(m.transpose() * m);
    let mut ev: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    2.0 * (ev[0] + ev[1]).sqrt()
}

/// The correlation-matrix value of the largest CHSH violation of `psi`.
pub fn horodecki_chsh(psi: &StateVector) -> Result<f64> {
    Ok(max_chsh_from_correlations(&correlation_matrix(psi)?))
}

const THETA_STEPS: usize = 12;
const PHI_STEPS: usize = 24;
const MAX_SWEEPS: usize = 500;

struct BobResponse<'a> {
    psi: &'a StateVector,
    sigma: [Observable; 3],
}

impl BobResponse<'_> {
    // v_j(a) = <a·σ ⊗ σ_j>, so that <a·σ ⊗ b·σ> = v(a)·b
    fn response(&self, a: UnitVector3) -> [f64; 3] {
        let sa = pauli_observable(a);
        self.sigma
            .each_ref()
            .map(|sj| expectation(&tensor_product(&sa, sj).expect("2 x 2 = 4"), self.psi).expect("Hermitian"))
    }

    // best value over b, b' for fixed a, a'
    fn objective(&self, va: [f64; 3], vap: [f64; 3]) -> f64 {
        norm3(add3(va, vap)) + norm3(sub3(va, vap))
    }
}

fn direction(angles: &[f64; 4], k: usize) -> UnitVector3 {
    UnitVector3::from_angles(angles[2 * k], angles[2 * k + 1])
}

fn unit_or_z(v: [f64; 3]) -> UnitVector3 {
    UnitVector3::normalize(v[0], v[1], v[2]).unwrap_or(UnitVector3::Z)
}

/// Maximum of `|<ψ|B|ψ>|` over all settings.
///
/// `<B> = b·(v(a) + v(a')) + b'·(v(a) - v(a'))` is linear in each of Bob's
/// vectors, so they are chosen in closed form and only Alice's two
/// directions are searched: a 12×24 polar/azimuth grid for each, then
/// coordinate-wise golden-section refinement of the four angles.
pub fn max_chsh(psi: &StateVector) -> Result<ChshReport> {
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: psi.dim() });
    }
    let bob = BobResponse { psi, sigma: [pauli_x(), pauli_y(), pauli_z()] };

    let grid: Vec<(f64, f64)> = (0..THETA_STEPS)
        .flat_map(|i| {
            let theta = (i as f64 + 0.5) * PI / THETA_STEPS as f64;
            (0..PHI_STEPS).map(move |j| (theta, j as f64 * 2.0 * PI / PHI_STEPS as f64))
        })
        .collect();
    let responses: Vec<[f64; 3]> =
        grid.iter().map(|&(t, p)| bob.response(UnitVector3::from_angles(t, p))).collect();

    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, vi) in responses.iter().enumerate() {
        for (j, vj) in responses.iter().enumerate() {
            let f = bob.objective(*vi, *vj);
            if f > best.0 {
                best = (f, i, j);
            }
        }
    }
    let mut angles = [grid[best.1].0, grid[best.1].1, grid[best.2].0, grid[best.2].1];
    let eval = |x: &[f64; 4]| bob.objective(bob.response(direction(x, 0)), bob.response(direction(x, 1)));
    let mut value = eval(&angles);

    let mut half_width = PI / THETA_STEPS as f64;
    for _ in 0..MAX_SWEEPS {
        let start = value;
        let mut largest_step = 0.0f64;
        for k in 0..4 {
            let centre = angles[k];
            let line = |x: f64| {
                let mut trial = angles;
                trial[k] = x;
                eval(&trial)
            };
            let (x, fx) = golden_section_maximize(line, centre - half_width, centre + half_width, 1e-13, 200);
            if fx > value {
                angles[k] = x;
                value = fx;
                largest_step = largest_step.max((x - centre).abs());
            }
        }
        half_width = (4.0 * largest_step).clamp(1e-9, PI / THETA_STEPS as f64);
        if value - start < 1e-15 && largest_step < 1e-9 {
            break;
        }
    }

    let a = direction(&angles, 0);
    let a_prime = direction(&angles, 1);
    let (va, vap) = (bob.response(a), bob.response(a_prime));
    let settings = ChshSettings { a, a_prime, b: unit_or_z(add3(va, vap)), b_prime: unit_or_z(sub3(va, vap)) };
    chsh_value(psi, &settings)
}

/// `(|+++> + |--->)/√2`.
pub fn ghz_state() -> StateVector {
    let mut amps = vec![Complex::new(0.0, 0.0); 8];
    amps[0] = Complex::new(FRAC_1_SQRT_2, 0.0);
    amps[7] = Complex::new(FRAC_1_SQRT_2, 0.0);
    StateVector::new(amps).expect("unit norm")
}

/// `<a ⊗ b ⊗ c>` in a model that factors into three independent
/// single-qubit hidden-variable models.
pub fn ghz_factored_expectation(
    a: &Observable,
    b: &Observable,
    c: &Observable,
    m1: &BellD2Model,
    m2: &BellD2Model,
    m3: &BellD2Model,
) -> Result<f64> {
    Ok(observable_mean(a, m1)? * observable_mean(b, m2)? * observable_mean(c, m3)?)
}

/// Single-qubit models carrying the one-party marginals of `psi`.
pub fn marginal_models(psi: &StateVector) -> Result<[BellD2Model; 3]> {
    if psi.dim() != 8 {
        return Err(Error::DimensionMismatch { expected: 8, got: psi.dim() });
    }
    let id = Observable::identity(2)?;
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut models = [BellD2Model::maximally_mixed(); 3];
    for (party, model) in models.iter_mut().enumerate() {
        let mut bloch = [0.0; 3];
        for (k, s) in paulis.iter().enumerate() {
            let mut factors = [&id, &id, &id];
            factors[party] = s;
            let op = tensor_product(&tensor_product(factors[0], factors[1])?, factors[2])?;
            bloch[k] = expectation(&op, psi)?;
        }
        *model = BellD2Model::new(bloch)?;
    }
    Ok(models)
}

/// CHSH combination for two parties of a factored model.
pub fn factored_pair_chsh(s: &ChshSettings, m1: &BellD2Model, m2: &BellD2Model) -> Result<f64> {
    let mean = |n: UnitVector3, m: &BellD2Model| observable_mean(&pauli_observable(n), m);
    let (a, ap) = (mean(s.a, m1)?, mean(s.a_prime, m1)?);
    let (b, bp) = (mean(s.b, m2)?, mean(s.b_prime, m2)?);
    Ok(a * b + a * bp + ap * b - ap * bp)
}

/// Largest factored-model CHSH value over all settings, `2|p₁||p₂|`.
pub fn factored_pair_chsh_max(m1: &BellD2Model, m2: &BellD2Model) -> f64 {
    2.0 * norm3(m1.bloch()) * norm3(m2.bloch())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::{hardy_state, HardyParams};
    use crate::qcore::{operator_norm, random_state, random_unit_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_settings(rng: &mut ChaCha8Rng) -> ChshSettings {
        ChshSettings {
            a: random_unit_vector(rng),
            a_prime: random_unit_vector(rng),
            b: random_unit_vector(rng),
            b_prime: random_unit_vector(rng),
        }
    }

    #[test]
    fn equal_bob_settings_double_the_correlator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = random_settings(&mut rng);
        s.b_prime = s.b;
        let expected = tensor_product(&pauli_observable(s.a), &pauli_observable(s.b)).unwrap().scale(2.0);
        assert!(chsh_operator(&s).max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn all_z_settings() {
        let z = UnitVector3::Z;
        let s = ChshSettings { a: z, a_prime: z, b: z, b_prime: z };
        let b = chsh_operator(&s);
        let expected = tensor_product(&pauli_z(), &pauli_z()).unwrap().scale(2.0);
        assert!(b.max_abs_diff(&expected).unwrap() < 1e-15);
        assert!((operator_norm(&b).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_never_exceeds_tsirelson() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let n = operator_norm(&chsh_operator(&random_settings(&mut rng))).unwrap();
            assert!(n <= TSIRELSON_BOUND + 1e-9);
        }
        let n = operator_norm(&chsh_operator(&ChshSettings::tsirelson())).unwrap();
        assert!((n - TSIRELSON_BOUND).abs() < 1e-9);
    }

    #[test]
    fn expansion_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let psi = random_state(4, &mut rng).unwrap();
            chsh_value(&psi, &random_settings(&mut rng)).unwrap();
        }
        let psi = StateVector::basis(2, 0).unwrap();
        assert!(matches!(chsh_value(&psi, &ChshSettings::tsirelson()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn product_states_stay_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let psi = random_state(2, &mut rng).unwrap().tensor(&random_state(2, &mut rng).unwrap()).unwrap();
            let r = chsh_value(&psi, &random_settings(&mut rng)).unwrap();
            assert!(r.value.abs() <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn clustered_bound_cases() {
        assert!((clustered_bound(UnitVector3::Z, UnitVector3::X) - TSIRELSON_BOUND).abs() < 1e-15);
        assert!((clustered_bound(UnitVector3::Z, UnitVector3::Z) - 2.0).abs() < 1e-15);
        let sixty = UnitVector3::from_angles(PI / 3.0, 0.0);
        assert!((clustered_bound(UnitVector3::Z, sixty) - (3f64.sqrt() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn max_chsh_known_values() {
        let r = max_chsh(&hardy_state(HardyParams::maximally_entangled())).unwrap();
        assert!((r.value - TSIRELSON_BOUND).abs() < 1e-4);
        let r = max_chsh(&hardy_state(HardyParams::new(1.0).unwrap())).unwrap();
        assert!((r.value - 2.0).abs() < 1e-4);
        let p = HardyParams::new(0.8).unwrap();
        let expected = 2.0 * (1.0 + 4.0 * p.ab() * p.ab()).sqrt();
        let r = max_chsh(&hardy_state(p)).unwrap();
        assert!((r.value - expected).abs() < 1e-4, "{} vs {expected}", r.value);
        assert!((r.value - 2.7724).abs() < 1e-4);
    }

    #[test]
    fn horodecki_matches_closed_form_for_hardy() {
        for k in 0..=20 {
            let p = HardyParams::new(k as f64 / 20.0).unwrap();
            let expected = 2.0 * (1.0 + 4.0 * p.ab() * p.ab()).sqrt();
            assert!((horodecki_chsh(&hardy_state(p)).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_basics() {
        let g = ghz_state();
        assert!((g.norm() - 1.0).abs() < 1e-15);
        let id = Observable::identity(2).unwrap();
        let zzi = tensor_product(&tensor_product(&pauli_z(), &pauli_z()).unwrap(), &id).unwrap();
        assert!((expectation(&zzi, &g).unwrap() - 1.0).abs() < 1e-12);
        let xii = tensor_product(&tensor_product(&pauli_x(), &id).unwrap(), &id).unwrap();
        assert!(expectation(&xii, &g).unwrap().abs() < 1e-12);
        for m in marginal_models(&g).unwrap() {
            assert!(norm3(m.bloch()) < 1e-12);
        }
    }

    #[test]
    fn factored_model_products() {
        let id = Observable::identity(2).unwrap();
        let mixed = BellD2Model::maximally_mixed();
        assert_eq!(ghz_factored_expectation(&id, &id, &id, &mixed, &mixed, &mixed).unwrap(), 1.0);
        let x = pauli_x();
        assert!(ghz_factored_expectation(&x, &x, &x, &mixed, &mixed, &mixed).unwrap().abs() < 1e-12);
    }

    #[test]
    fn factored_pair_chsh_is_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let m1 = BellD2Model::pure(random_unit_vector(&mut rng));
            let m2 = BellD2Model::pure(random_unit_vector(&mut rng));
            let v = factored_pair_chsh(&random_settings(&mut rng), &m1, &m2).unwrap();
            assert!(v.abs() <= factored_pair_chsh_max(&m1, &m2) + 1e-12);
            assert!(factored_pair_chsh_max(&m1, &m2) <= 2.0 + 1e-12);
        }
    }
}
