//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::process::{Command, ExitCode};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hardy_core::hardy::{
    hardy_joint, hardy_joint_matrix, hardy_maximum, hardy_moments, hardy_moments_matrix, hardy_state, u_plus_d,
    HardyParams,
};
use hardy_core::lhv::{
    compare_translations, hardy_constraints, hardy_range_constraints, lhv_moment_range, monomial, observable_mean,
    product_lhv_expectation, solve_feasibility, BellD2Model, DeterministicStrategy, FeasibilityStatus,
};
use hardy_core::nonlocal::{
    chsh_operator, factored_pair_chsh, factored_pair_chsh_max, ghz_factored_expectation, ghz_state, horodecki_chsh,
    marginal_models, max_chsh, ChshSettings, TSIRELSON_BOUND,
};
use hardy_core::optimize::golden_section_maximize;
use hardy_core::qcore::{
    expectation, operator_norm, pauli_x, random_hermitian, random_unit_vector, spin_projector, spectral_decompose2,
    tensor_product, Observable, StateVector,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn closed_form_agreement() -> Check {
    let mut worst = 0.0f64;
    for k in 1..=99 {
        let p = e(HardyParams::new(k as f64 / 100.0))?;
        let closed = hardy_moments(p);
        let matrix = e(hardy_moments_matrix(p))?;
        worst = worst.max(closed.max_abs_diff(&matrix));
        worst = worst.max((hardy_joint(p) - e(hardy_joint_matrix(p))?).abs());
        ensure(matrix.u1u2.abs() <= 1e-12, format!("<U1U2> = {:e} at alpha = {}", matrix.u1u2, p.alpha()))?;
        ensure((matrix.u1 - p.ab()).abs() <= 1e-12, format!("<U1> != ab at alpha = {}", p.alpha()))?;
    }
    ensure(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    Ok(format!("max closed/matrix deviation {worst:.2e} over 99 alphas"))
}

fn lp_dichotomy() -> Check {
    let mut least = f64::INFINITY;
    for k in 1..=49 {
        let t = k as f64 / 100.0;
        let r = e(solve_feasibility(&e(hardy_constraints(e(HardyParams::from_product(t))?))?))?;
        ensure(r.status == FeasibilityStatus::Infeasible, format!("feasible at ab = {t}"))?;
        ensure(r.max_violation > 1e-7, format!("violation {:e} at ab = {t}", r.max_violation))?;
        least = least.min(r.max_violation);
    }
    let r = e(solve_feasibility(&e(hardy_constraints(HardyParams::maximally_entangled()))?))?;
    ensure(r.status == FeasibilityStatus::Feasible, "infeasible at ab = 1/2")?;
    let w = r.witness.ok_or("no witness at ab = 1/2")?;
    let mut dev = 0.0f64;
    for i in 0..16 {
        let s = DeterministicStrategy::from_index(i);
        let expected = if i == 9 || i == 6 { 0.5 } else { 0.0 };
        dev = dev.max((w.weight(s) - expected).abs());
    }
    ensure(dev <= 1e-9, format!("witness deviates from the half/half certificate by {dev:e}"))?;
    Ok(format!("infeasible for ab = 0.01..0.49 (least violation {least:.3e}); witness deviation {dev:.1e}"))
}

fn translation_non_uniqueness() -> Check {
    let p = e(HardyParams::from_product(0.48))?;
    let (min, max) = e(lhv_moment_range(&e(hardy_range_constraints(p))?, &monomial(|s| s.u1 && s.u2)))?;
    let cmp = e(compare_translations(p))?;
    ensure(min >= 0.034, format!("standard min {min}"))?;
    ensure(cmp.clustered.abs() <= 1e-12, format!("clustered {}", cmp.clustered))?;
    ensure(cmp.gap() > 0.03, format!("gap {}", cmp.gap()))?;
    Ok(format!("standard range [{min:.7}, {max:.7}], clustered {:.1e}, joint {:.7}", cmp.clustered, cmp.joint))
}

// real 2n x 2n embedding of a complex Hermitian matrix; each eigenvalue appears twice
fn independent_eigenvalues(o: &Observable) -> Vec<f64> {
    let n = o.dim();
    let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = o.entry(r % n, c % n);
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).collect()
}

fn spectral_degeneracies() -> Check {
    let basis = |i| StateVector::basis(2, i).expect("qubit basis");
    // (alpha, value on |->, value on |+>)
    for (alpha, minus, plus) in [(FRAC_1_SQRT_2, 1.0, 1.0), (1.0, 2.0, 0.0), (0.0, 0.0, 2.0)] {
        let sum = u_plus_d(e(HardyParams::new(alpha))?);
        let sp = e(spectral_decompose2(&sum))?;
        let mut got = [sp.mu1, sp.mu2];
        let mut want = [minus, plus];
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        ensure(
            (got[0] - want[0]).abs() <= 1e-12 && (got[1] - want[1]).abs() <= 1e-12,
            format!("eigenvalues {got:?} at alpha = {alpha}"),
        )?;
        let on_minus = e(expectation(&sum, &basis(1)))?;
        let on_plus = e(expectation(&sum, &basis(0)))?;
        ensure(
            (on_minus - minus).abs() <= 1e-12 && (on_plus - plus).abs() <= 1e-12,
            format!("eigenvector labels at alpha = {alpha}"),
        )?;
    }
    let sum = u_plus_d(e(HardyParams::new(0.8))?);
    let sp = e(spectral_decompose2(&sum))?;
    let oracle = independent_eigenvalues(&sum);
    for (ours, theirs, reference) in [(sp.mu1, oracle[0], 1.27735), (sp.mu2, oracle[1], 0.72265)] {
        ensure((ours - theirs).abs() <= 1e-5, format!("{ours} vs eigensolver {theirs}"))?;
        ensure((ours - reference).abs() <= 1e-5, format!("{ours} vs {reference}"))?;
    }
    Ok(format!("{{1,1}}, {{2,0}}, {{0,2}} exact; alpha = 0.8 gives {{{:.6}, {:.6}}}", sp.mu1, sp.mu2))
}

fn tsirelson() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut largest = 0.0f64;
    for _ in 0..1000 {
        let s = ChshSettings {
            a: random_unit_vector(&mut rng),
            a_prime: random_unit_vector(&mut rng),
            b: random_unit_vector(&mut rng),
            b_prime: random_unit_vector(&mut rng),
        };
        largest = largest.max(e(operator_norm(&chsh_operator(&s)))?);
    }
    ensure(largest <= TSIRELSON_BOUND + 1e-9, format!("norm {largest} exceeds the bound"))?;
    let at_optimum = e(operator_norm(&chsh_operator(&ChshSettings::tsirelson())))?;
    ensure((at_optimum - 2.0 * SQRT_2).abs() <= 1e-6, format!("norm {at_optimum} at orthogonal settings"))?;
    let best = e(max_chsh(&hardy_state(HardyParams::maximally_entangled())))?.value;
    ensure((best - 2.828427).abs() <= 1e-4, format!("max_chsh {best} for the maximally entangled state"))?;
    Ok(format!("random max norm {largest:.9}; orthogonal {at_optimum:.9}; max_chsh {best:.7}"))
}

fn gisin_endpoint() -> Check {
    let mut worst = 0.0f64;
    let mut least_interior = f64::INFINITY;
    for k in 0..20 {
        let alpha = k as f64 / 19.0;
        let psi = hardy_state(e(HardyParams::new(alpha))?);
        let found = e(max_chsh(&psi))?.value;
        let oracle = e(horodecki_chsh(&psi))?;
        worst = worst.max((found - oracle).abs());
        ensure((found - oracle).abs() <= 1e-4, format!("{found} vs oracle {oracle} at alpha = {alpha}"))?;
        if k == 0 || k == 19 {
            ensure((found - 2.0).abs() <= 1e-4, format!("{found} at product alpha = {alpha}"))?;
        } else {
            ensure(found > 2.0 + 1e-6, format!("{found} at entangled alpha = {alpha}"))?;
            least_interior = least_interior.min(found);
        }
    }
    Ok(format!("max oracle gap {worst:.2e}; smallest interior value {least_interior:.6}"))
}

fn product_separability() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let (a, b) = (random_unit_vector(&mut rng), random_unit_vector(&mut rng));
        let (n1, n2) = (random_unit_vector(&mut rng), random_unit_vector(&mut rng));
        let (pa, pb) = (spin_projector(a), spin_projector(b));
        let (m1, m2) = (BellD2Model::pure(n1), BellD2Model::pure(n2));
        let psi = e(StateVector::from_bloch(n1).tensor(&StateVector::from_bloch(n2)))?;
        let quantum = e(expectation(&e(tensor_product(&pa, &pb))?, &psi))?;
        let model = e(product_lhv_expectation(&pa, &pb, &m1, &m2))?;
        worst = worst.max((quantum - model).abs());
    }
    ensure(worst <= 1e-12, format!("product deviation {worst:e}"))?;

    let mut additivity = 0.0f64;
    for _ in 0..500 {
        let (a, a2, b) = (
            e(random_hermitian(2, &mut rng))?,
            e(random_hermitian(2, &mut rng))?,
            e(random_hermitian(2, &mut rng))?,
        );
        let (m1, m2) = (BellD2Model::pure(random_unit_vector(&mut rng)), BellD2Model::pure(random_unit_vector(&mut rng)));
        let lhs = e(product_lhv_expectation(&e(a.add(&a2))?, &b, &m1, &m2))?;
        let rhs = e(product_lhv_expectation(&a, &b, &m1, &m2))? + e(product_lhv_expectation(&a2, &b, &m1, &m2))?;
        additivity = additivity.max((lhs - rhs).abs());
        let lhs = e(observable_mean(&e(a.add(&b))?, &m1))?;
        let rhs = e(observable_mean(&a, &m1))? + e(observable_mean(&b, &m1))?;
        additivity = additivity.max((lhs - rhs).abs());
    }
    ensure(additivity <= 1e-12, format!("additivity deviation {additivity:e}"))?;
    Ok(format!("product deviation {worst:.1e}; additivity deviation {additivity:.1e}"))
}

fn hardy_max() -> Check {
    let m = hardy_maximum();
    let f = |t: f64| t * t * (1.0 - 2.0 * t) / ((1.0 - t) * (1.0 - t));
    let (t_oracle, p_oracle) = golden_section_maximize(f, 0.0, 0.5, 1e-12, 500);
    for (name, got, oracle, reference) in
        [("t*", m.t_star, t_oracle, 0.381966), ("p*", m.p_star, p_oracle, 0.090170)]
    {
        ensure((got - reference).abs() <= 1e-6, format!("{name} = {got}"))?;
        ensure((got - oracle).abs() <= 1e-6, format!("{name} = {got} vs oracle {oracle}"))?;
    }
    Ok(format!("t* = {:.9}, p* = {:.9}", m.t_star, m.p_star))
}

fn ghz() -> Check {
    let psi = ghz_state();
    let x = pauli_x();
    let xxx = e(tensor_product(&e(tensor_product(&x, &x))?, &x))?;
    let quantum = e(expectation(&xxx, &psi))?;
    let models = e(marginal_models(&psi))?;
    let factored = e(ghz_factored_expectation(&x, &x, &x, &models[0], &models[1], &models[2]))?;
    ensure((quantum - 1.0).abs() <= 1e-12, format!("quantum XXX = {quantum}"))?;
    ensure(factored.abs() <= 1e-12, format!("factored XXX = {factored}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut largest = 0.0f64;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        largest = largest.max(factored_pair_chsh_max(&models[i], &models[j]));
        for _ in 0..2000 {
            let s = ChshSettings {
                a: random_unit_vector(&mut rng),
                a_prime: random_unit_vector(&mut rng),
                b: random_unit_vector(&mut rng),
                b_prime: random_unit_vector(&mut rng),
            };
            largest = largest.max(e(factored_pair_chsh(&s, &models[i], &models[j]))?.abs());
        }
    }
    ensure(largest <= 2.0 + 1e-9, format!("pairwise factored CHSH {largest}"))?;
    Ok(format!("XXX quantum {quantum:.12}, factored {factored:.1e}; pairwise factored CHSH <= {largest:.3}"))
}

fn run_cli(args: &[&str]) -> Result<(Option<i32>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).output().map_err(|err| err.to_string())?;
    Ok((out.status.code(), out.stdout))
}

fn cli_determinism() -> Check {
    for args in [
        &["hardy-table", "--steps", "25", "--seed", "11"][..],
        &["chsh-scan", "--steps", "9", "--seed", "11"][..],
    ] {
        let (code1, first) = run_cli(args)?;
        let (code2, second) = run_cli(args)?;
        ensure(code1 == Some(0) && code2 == Some(0), format!("{args:?} exited with {code1:?}/{code2:?}"))?;
        ensure(!first.is_empty() && first == second, format!("{args:?} output differs between runs"))?;
    }
    for args in [
        &["hardy-table", "--steps", "many"][..],
        &["hardy-table", "--alpha-min", "0.9", "--alpha-max", "0.1"][..],
        &["feasibility"][..],
        &["feasibility", "--alpha", "1.5"][..],
        &["chsh-scan", "--tol", "-1"][..],
        &["no-such-command"][..],
    ] {
        let (code, _) = run_cli(args)?;
        ensure(code == Some(2), format!("{args:?} exited with {code:?}, expected 2"))?;
    }
    Ok("byte-identical repeated runs; malformed flags exit with 2".to_string())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("closed form vs matrix evaluation", closed_form_agreement),
        ("LP dichotomy", lp_dichotomy),
        ("translation non-uniqueness", translation_non_uniqueness),
        ("spectral degeneracies", spectral_degeneracies),
        ("Tsirelson bound", tsirelson),
        ("pure-state CHSH endpoint", gisin_endpoint),
        ("product-model separability", product_separability),
        ("Hardy maximum", hardy_max),
        ("GHZ factored model", ghz),
        ("CLI determinism and exit codes", cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
