//! Canned reproduction suites. Each suite runs fixed, seeded experiments and
//! records one check per asserted pattern.

use std::f64::consts::TAU;

use hyperlab_core::constructions::{
    a2_ray, line_trace_a2_phase, make_alpha, sample_a_alpha, sample_a_alpha_beta, sample_a_alpha_exact, sample_b,
    subspace_trace, subspace_trace_exact, A2Params, IrrationalBasis, RayDescription,
};
use hyperlab_core::density::{coverage, density_trend, sample_trend, GridCover, Thresholds, Verdict, Window};
use hyperlab_core::dynamics::{
    canonical_invariant_subspace, example_dense_spectrum, example_g_theta, hypercyclicity_probe, javaheri_precondition,
    javaheri_semigroup, javaheri_trace, line_trace_g_theta, subspace_hypercyclicity_probe, witness_in_subspace, Budget,
};
use hyperlab_core::linalg::{
    membership_distance, subspace_from_basis, ExactSubspace, ExactVector, Field, Matrix, Surd, Vector,
};
use hyperlab_core::normal_form::normal_form;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{CliError, Result};

pub const IDS: [&str; 8] = ["thm2.1", "thm2.4", "prop2.5", "prop2.6", "rem2.6", "thm3.1", "ex4.1", "prop5.1"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproOutcome {
    pub id: String,
    pub seed: u64,
    /// Parameters of the canned experiment.
    pub config: Value,
    pub checks: Vec<Check>,
}

impl ReproOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: Value) {
        self.checks.push(Check { name: name.into(), pass, detail });
    }
}

pub fn repro(id: &str, seed: u64) -> Result<ReproOutcome> {
    let mut s = Suite::new();
    let config = match id {
        "thm2.1" => thm21(&mut s, seed)?,
        "thm2.4" => thm24(&mut s)?,
        "prop2.5" => prop25(&mut s, seed)?,
        "prop2.6" => prop26(&mut s)?,
        "rem2.6" => rem26(&mut s, seed)?,
        "thm3.1" => thm31(&mut s)?,
        "ex4.1" => ex41(&mut s, seed)?,
        "prop5.1" => prop51(&mut s)?,
        other => return Err(CliError::UnknownId(other.to_string())),
    };
    Ok(ReproOutcome { id: id.to_string(), seed, config, checks: s.checks })
}

fn square(r: f64, dim: usize) -> Window {
    Window::cube(dim, -r, r).expect("valid cube")
}

fn ints(v: &[i64]) -> ExactVector {
    ExactVector::from_ints(v)
}

/// A_α is dense while its trace on lines is not.
fn thm21(s: &mut Suite, seed: u64) -> Result<Value> {
    let alpha = make_alpha(2, &[2, 3])?;
    let window = square(2.0, 2);
    let schedule = [250u64, 500, 1000];
    let eps = 0.1;
    let th = Thresholds::default();
    let ambient = sample_trend(|b| sample_a_alpha(&alpha, b, &window), &window, eps, &schedule, th)?;
    s.check("ambient A_alpha coverage", ambient.verdict == Verdict::DenseEvidence, json!(ambient.trend));

    let exact: Vec<_> = schedule.iter().map(|&b| sample_a_alpha_exact(&alpha, b, &window)).collect::<hyperlab_core::Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines: Vec<(String, Vec<Surd>)> = Vec::new();
    while lines.len() < 8 {
        let (p, q) = (rng.random_range(-9i64..=9), rng.random_range(-9i64..=9));
        if (p, q) != (0, 0) {
            lines.push((format!("({p},{q})"), vec![Surd::from_int(p), Surd::from_int(q)]));
        }
    }
    for (a, b) in [("√2", "√3"), ("1", "√2"), ("√3", "1"), ("√2", "1+√3"), ("1+√2", "√3")] {
        lines.push((format!("({a},{b})"), vec![Surd::parse(a)?, Surd::parse(b)?]));
    }
    let mw = square(2.0, 1);
    for (name, dir) in &lines {
        let em = ExactSubspace::from_basis(&[ExactVector(dir.clone())])?;
        let m = subspace_from_basis(&[ExactVector(dir.clone()).to_vector()])?;
        let rep = density_trend(
            |b| {
                let i = schedule.iter().position(|&x| x == b).expect("scheduled budget");
                let trace = subspace_trace_exact(&exact[i], &em)?;
                let mut c = GridCover::new(&mw, eps)?;
                for (_, x) in &trace {
                    c.insert(&m.coordinates(&x.to_vector())?);
                }
                Ok((c, trace.len() as u64))
            },
            &schedule,
            th,
        )?;
        let pass = rep.verdict == Verdict::NotDenseEvidence && rep.coverage < 0.2;
        s.check(format!("trace on line {name}"), pass, json!(rep.trend));
    }
    Ok(json!({ "alpha_primes": [2, 3], "window": 2.0, "epsilon": eps, "schedule": schedule, "lines": lines.len() }))
}

fn sorted_bits(points: impl Iterator<Item = Vec<f64>>) -> Vec<Vec<u64>> {
    let mut v: Vec<Vec<u64>> = points.map(|p| p.iter().map(|x| x.to_bits()).collect()).collect();
    v.sort();
    v
}

/// φ(A_{α,β}) equals A_μ point for point.
fn thm24(s: &mut Suite) -> Result<Value> {
    let cases: [(&[u64], &[u64], u64); 2] = [(&[2], &[3], 30), (&[2, 3], &[5, 7], 6)];
    for (a, b, bound) in cases {
        let alpha = make_alpha(a.len(), a)?;
        let beta = make_alpha(b.len(), b)?;
        let mu = IrrationalBasis::interleave(&alpha, &beta)?;
        let w = square(2.0, 2 * a.len());
        let lhs = sample_a_alpha_beta(&alpha, &beta, bound, &w)?;
        let rhs = sample_a_alpha(&mu, bound, &w)?;
        let exact = sample_a_alpha_exact(&mu, bound, &w)?;
        let equal = sorted_bits(lhs.iter().map(<[f64]>::to_vec)) == sorted_bits(rhs.iter().map(<[f64]>::to_vec));
        s.check(
            format!("n = {}: phi(A_alpha_beta) = A_mu", a.len()),
            equal && exact.len() == rhs.len() && !rhs.is_empty(),
            json!({ "points": lhs.len(), "exact_points": exact.len() }),
        );
    }
    Ok(json!({ "cases": [[[2], [3], 30], [[2, 3], [5, 7], 6]], "window": 2.0 }))
}

/// Planted phases on A₂ lines are recovered as the unique ray.
fn prop25(s: &mut Suite, seed: u64) -> Result<Value> {
    let params = A2Params::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = 0;
    let mut failures = Vec::new();
    for _ in 0..50 {
        let (n1, n2) = (rng.random_range(0u64..=10), rng.random_range(0u64..=10));
        let ratio: f64 = rng.random_range(0.5..2.0);
        let raw = n2 as f64 * params.theta2 - n1 as f64 * params.theta1;
        let theta = raw.rem_euclid(1.0);
        let want = a2_ray(&params, n1, n2, ratio);
        match line_trace_a2_phase(&params, ratio, theta, 10) {
            Ok(RayDescription::Ray { n1: r1, n2: r2, v, .. })
                if (r1, r2) == (n1, n2) && v == [[want[0].re, want[0].im], [want[1].re, want[1].im]] =>
            {
                ok += 1
            }
            other => failures.push(format!("({n1},{n2}) -> {other:?}")),
        }
    }
    s.check("50 planted phases recovered", ok == 50, json!({ "recovered": ok, "failures": failures }));
    Ok(json!({ "theta1": params.theta1, "theta2": params.theta2, "search_bound": 10, "planted": 50 }))
}

/// Sampled B traces on lines are half lines.
fn prop26(s: &mut Suite) -> Result<Value> {
    let radii: Vec<f64> = (1..=141).map(|j| j as f64 / 100.0).collect();
    let sample = sample_b(&radii, 720)?;
    let mw = square(1.0, 1);
    let eps = 0.1;
    let whole = coverage(&sample, &square(1.0, 2), eps)?;
    s.check("B covers the square", whole.coverage() >= 0.9, json!(whole.coverage()));
    for j in 0..8 {
        let phi = j as f64 / 16.0;
        let u = Vector::real(vec![(TAU * phi).cos(), (TAU * phi).sin()]);
        let m = subspace_from_basis(&[u.clone()])?;
        let trace = subspace_trace(&sample, &m, 1e-9)?;
        let signed: Vec<f64> = trace.ambient.vectors().map(|p| p.real_dot(&u)).collect();
        let c = coverage(&trace.intrinsic, &mw, eps)?;
        let pass = !signed.is_empty() && signed.iter().all(|&x| x > 0.0) && c.coverage() <= 0.5 + 1.0 / 20.0;
        s.check(
            format!("line at angle {j}/16 is one-sided"),
            pass,
            json!({ "points": signed.len(), "coverage": c.coverage() }),
        );
    }
    Ok(json!({ "radii": "j/100, j = 1..141", "angles": 720, "window": 1.0, "epsilon": eps }))
}

/// `d(e, Y) = 2` but `e ∈ Vect{Y, a}` for every `a ∉ Y`.
fn rem26(s: &mut Suite, seed: u64) -> Result<Value> {
    let y = ExactSubspace::from_basis(&[ints(&[1, 0, 0]), ints(&[0, 1, 0])])?;
    let e = ints(&[0, 0, 2]);
    let d = y.distance_squared(&e)?;
    s.check("d(e, Y) = 2", d == Surd::from_int(4), json!(d.to_f64().sqrt()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    while count < 5 {
        let a: Vec<i64> = (0..3).map(|_| rng.random_range(-5i64..=5)).collect();
        if a[2] == 0 {
            continue;
        }
        count += 1;
        let ya = ExactSubspace::from_basis(&[ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&a)])?;
        let d = ya.distance_squared(&e)?;
        let mf = subspace_from_basis(&[e.to_vector(), ints(&a).to_vector()])?;
        let fd = membership_distance(&e.to_vector(), &mf)?;
        s.check(format!("d(e, Vect{{Y, {a:?}}}) = 0"), d.is_zero() && fd <= 1e-12, json!(d.to_f64().sqrt()));
    }
    Ok(json!({ "n": 3, "e": [0, 0, 2], "samples": 5 }))
}

fn dense_budget() -> Budget {
    Budget::weighted(vec![0.2, 0.2, 1.0, 0.2, 0.2, 1.0])
}

/// Hypercyclic instances over ℂ² and ℝ³ are subspace-hypercyclic on the canonical M.
fn thm31(s: &mut Suite) -> Result<Value> {
    let schedule = [50u64, 100, 200];
    let th = Thresholds::default();
    for field in [Field::Complex, Field::Real] {
        let g = example_dense_spectrum(field)?;
        let label = if field == Field::Complex { "C^2" } else { "R^3" };
        let b = dense_budget();
        let w = square(2.0, g.n() * field.width());
        let hp = hypercyclicity_probe(&g, &w, 0.1, &b, &schedule, th)?;
        s.check(format!("{label}: u_eta orbit"), hp.hypercyclic_evidence(), json!(hp.report.trend));
        let nf = normal_form(g.generators(), field)?;
        let m = canonical_invariant_subspace(&nf)?;
        let mw = square(2.0, m.real_dim());
        let x = m.basis()[0].clone();
        let rep = subspace_hypercyclicity_probe(&g, &m, &x, &mw, 0.1, &b, &schedule, th)?;
        s.check(format!("{label}: canonical subspace"), rep.verdict == Verdict::DenseEvidence, json!(rep.trend));
        let y = witness_in_subspace(&g, &m, &mw, 0.1, &b, &schedule, th, 3, None)?;
        s.check(format!("{label}: witness found"), y.is_some(), json!(y.map(|v| v.coords().to_vec())));
    }
    Ok(json!({ "weights": [0.2, 0.2, 1.0, 0.2, 0.2, 1.0], "schedule": schedule, "window": 2.0, "epsilon": 0.1 }))
}

/// G_θ is hypercyclic, has no canonical subspace and no dense line traces.
fn ex41(s: &mut Suite, seed: u64) -> Result<Value> {
    let theta = Surd::sqrt(2);
    let g = example_g_theta(2, 3, &theta)?;
    let b = Budget::weighted(vec![0.2, 0.2, 1.0]);
    let schedule = [50u64, 100, 200];
    let th = Thresholds::default();
    let hp = hypercyclicity_probe(&g, &square(2.0, 2), 0.1, &b, &schedule, th)?;
    s.check("hypercyclic", hp.hypercyclic_evidence(), json!(hp.report.trend));
    let nf = normal_form(g.generators(), Field::Real)?;
    let canon = canonical_invariant_subspace(&nf);
    s.check(
        "no canonical subspace",
        matches!(canon, Err(hyperlab_core::Error::NoNontrivialCanonical(_))),
        json!(canon.err().map(|e| e.to_string())),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..8 {
        let phi: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let v = Vector::real(vec![phi.cos(), phi.sin()]);
        let m = subspace_from_basis(&[v.clone()])?;
        let off: f64 = rng.random_range(0.2..1.0);
        let x = Vector::real(vec![(phi + off).cos(), (phi + off).sin()]);
        let rep = subspace_hypercyclicity_probe(&g, &m, &x, &square(2.0, 1), 0.1, &b, &schedule, th)?;
        let trace = line_trace_g_theta(2, 3, &theta, &v, 20)?;
        s.check(
            format!("line {i}: not dense, trace positive"),
            rep.verdict == Verdict::NotDenseEvidence && trace.all_positive(),
            json!({ "angle": phi, "trend": rep.trend }),
        );
    }
    let guard = line_trace_g_theta(2, 3, &theta, &Vector::real(vec![1.0, 0.0]), 200)?;
    s.check("sin guard positive", guard.min_sin > 0.0, json!(guard.min_sin));
    Ok(json!({ "p": 2, "q": 3, "theta": "√2", "weights": [0.2, 0.2, 1.0], "schedule": schedule, "lines": 8 }))
}

/// The planted non-abelian pair has a dense trace on 𝕂eₙ.
fn prop51(s: &mut Suite) -> Result<Value> {
    let a = Matrix::real(&[vec![1.0, 0.0], vec![1.0, 2.0]])?;
    let b = Matrix::real(&[vec![3.0, 0.0], vec![0.0, 1.0]])?;
    let j = javaheri_semigroup(&a, &b, false)?;
    s.check("A and B do not commute", !j.semigroup.is_abelian(), json!(j.semigroup.commutator_residual()));
    let pre = javaheri_precondition(&j, 40, 2.0, 0.1)?;
    s.check("ratio set is dense in R+", pre.coverage() >= 0.9, json!(pre.coverage()));
    let mut exact = true;
    for k in 0..6 {
        for l in 0..6 {
            let want = num_traits::pow(BigRational::new(1.into(), 3.into()), k) * num_traits::pow(BigRational::from_integer(2.into()), l);
            let got = j.subword_exact(k as u32, l as u32)?.map(|w| w[1].clone());
            exact &= got == Some(want);
        }
    }
    s.check("(BB')^k (AA')^l e_n exact", exact, Value::Null);
    let trend: Vec<f64> =
        [12usize, 16, 20].iter().map(|&l| javaheri_trace(&j, l, 2.0, 0.1).map(|t| t.cover.coverage())).collect::<hyperlab_core::Result<_>>()?;
    let verdict = Thresholds::default().verdict(&trend);
    s.check("trace on K e_n", verdict == Verdict::DenseEvidence, json!(trend));
    Ok(json!({ "A": [[1, 0], [1, 2]], "B": [[3, 0], [0, 1]], "word_lengths": [12, 16, 20], "log_radius": 2.0, "epsilon": 0.1 }))
}
