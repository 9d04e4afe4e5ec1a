//! The four experiment commands. Each returns the resolved config, a result
//! object, the primary verdict and an optional point dump.

use hyperlab_core::constructions::{
    cover_a2, make_alpha, sample_a2, sample_a_alpha, sample_a_alpha_beta, sample_a_alpha_exact, sample_b,
    sample_z_module, A2Params, LatticeCosetSet, PointSample,
};
use hyperlab_core::density::{coverage, density_trend, sample_trend, CoverageReport, Verdict, Window};
use hyperlab_core::dynamics::{
    canonical_invariant_subspace, hypercyclicity_probe, orbit, orbit_cover, orbit_exact, subspace_hypercyclicity_probe,
    witness_in_subspace, Budget, MatrixSemigroup, OrbitEngine, PATTERN_SNAP,
};
use hyperlab_core::linalg::{
    rational_to_f64, subspace_from_basis, Field, Mode, QMatrix, Surd, Vector, VectorJson,
};
use hyperlab_core::normal_form::{check_k_eta_membership, normal_form};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{is_decimal, CommandKind, ExperimentConfig, DEFAULT_RADIUS};
use crate::{CliError, Result};

/// Witness candidates tried by `probe` on a user subspace.
const WITNESS_CANDIDATES: usize = 8;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub config: ExperimentConfig,
    pub result: Value,
    pub verdict: Option<Verdict>,
    pub flags: Vec<String>,
    pub csv: Option<String>,
}

pub fn run(config: ExperimentConfig) -> Result<Outcome> {
    let config = config.resolve()?;
    match config.command {
        CommandKind::Kronecker => kronecker(config),
        CommandKind::Orbit => run_orbit(config),
        CommandKind::Probe => probe(config),
        CommandKind::Normalform => normalform(config),
    }
}

fn report_json(r: &CoverageReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

/// Parses a scalar token; decimals are accepted as floats and flagged.
fn scalar_token(token: &str, flags: &mut Vec<String>) -> Result<(f64, Option<Surd>)> {
    if is_decimal(token) {
        let x: f64 = token.parse().map_err(|_| CliError::Config(format!("'{token}' is not a number")))?;
        flags.push(format!("decimal input '{token}' is unverified"));
        return Ok((x, None));
    }
    let s = Surd::parse(token)?;
    Ok((s.to_f64(), Some(s)))
}

/// Whether `1, θ₁, …` are linearly independent over ℚ, decided on surd coordinates.
fn independent_over_q(thetas: &[Surd]) -> Result<bool> {
    let mut radicands: Vec<u64> = vec![1];
    for t in thetas {
        for (r, _) in t.terms() {
            if !radicands.contains(&r) {
                radicands.push(r);
            }
        }
    }
    let mut rows = vec![radicands.iter().map(|&r| if r == 1 { one() } else { BigRational::zero() }).collect::<Vec<_>>()];
    for t in thetas {
        let terms: Vec<(u64, BigRational)> = t.terms().map(|(r, c)| (r, c.clone())).collect();
        rows.push(
            radicands
                .iter()
                .map(|r| terms.iter().find(|(q, _)| q == r).map_or_else(BigRational::zero, |(_, c)| c.clone()))
                .collect(),
        );
    }
    Ok(QMatrix::from_rows(rows)?.rank() == thetas.len() + 1)
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

fn radial_grid(step: f64, count: usize) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) || count == 0 {
        return Err(CliError::Config("radial grid needs a positive step and count".into()));
    }
    Ok((1..=count).map(|j| j as f64 * step).collect())
}

fn kronecker(config: ExperimentConfig) -> Result<Outcome> {
    let set = config.set.clone().expect("resolved");
    let window = config.window()?;
    let eps = config.epsilon;
    let th = config.thresholds;
    let mut flags = Vec::new();
    let mut last: Option<PointSample> = None;
    let exact = config.mode == Mode::Exact;
    let report = match &set {
        LatticeCosetSet::AAlpha { alpha_primes } => {
            let alpha = make_alpha(alpha_primes.len(), alpha_primes)?;
            sample_trend(
                |s| {
                    let sample = if exact {
                        exact_sample(&sample_a_alpha_exact(&alpha, s, &window)?, alpha.n())
                    } else {
                        sample_a_alpha(&alpha, s, &window)?
                    };
                    last = Some(sample.clone());
                    Ok(sample)
                },
                &window,
                eps,
                config.schedule(),
                th,
            )?
        }
        LatticeCosetSet::AAlphaBeta { alpha_primes, beta_primes } => {
            if exact {
                flags.push("exact mode not available for A_alpha_beta; float sampler used".into());
            }
            let alpha = make_alpha(alpha_primes.len(), alpha_primes)?;
            let beta = make_alpha(beta_primes.len(), beta_primes)?;
            let mu: Vec<u64> = alpha_primes.iter().zip(beta_primes).flat_map(|(a, b)| [*a, *b]).collect();
            make_alpha(mu.len(), &mu)?;
            sample_trend(
                |s| {
                    let sample = sample_a_alpha_beta(&alpha, &beta, s, &window)?;
                    last = Some(sample.clone());
                    Ok(sample)
                },
                &window,
                eps,
                config.schedule(),
                th,
            )?
        }
        LatticeCosetSet::A2 { theta1, theta2, radial_step, radial_count } => {
            let (t1, s1) = scalar_token(theta1, &mut flags)?;
            let (t2, s2) = scalar_token(theta2, &mut flags)?;
            if let (Some(a), Some(b)) = (&s1, &s2) {
                if a.is_rational() || b.is_rational() {
                    return Err(hyperlab_core::Error::RationalTheta.into());
                }
                if !independent_over_q(&[a.clone(), b.clone()])? {
                    return Err(CliError::Config("1, θ₁, θ₂ are linearly dependent over ℚ".into()));
                }
            }
            let params = A2Params { theta1: t1, theta2: t2 };
            let radii = radial_grid(*radial_step, *radial_count)?;
            let rep = density_trend(
                |s| {
                    let c = cover_a2(&params, &radii, s, &window, eps, None)?;
                    let n = c.hit_count();
                    Ok((c, n))
                },
                config.schedule(),
                th,
            )?;
            if config.points_csv {
                last = Some(sample_a2(&params, &radii, *config.schedule().last().unwrap(), &window)?);
            }
            flags.push("points counts for A2 are hit cells".into());
            rep
        }
        LatticeCosetSet::B { radial_step, radial_count, .. } => {
            let radii = radial_grid(*radial_step, *radial_count)?;
            sample_trend(
                |a| {
                    let mut sample = sample_b(&radii, a as usize)?;
                    sample.retain(|p, _| window.contains(p));
                    last = Some(sample.clone());
                    Ok(sample)
                },
                &window,
                eps,
                config.schedule(),
                th,
            )?
        }
        LatticeCosetSet::ZModule { generators } => {
            let gens = generators
                .iter()
                .map(|row| {
                    let coords = row.iter().map(|t| scalar_token(t, &mut flags).map(|x| x.0)).collect::<Result<Vec<_>>>()?;
                    Ok(Vector::real(coords))
                })
                .collect::<Result<Vec<_>>>()?;
            sample_trend(
                |s| {
                    let sample = sample_z_module(&gens, s, &window)?;
                    last = Some(sample.clone());
                    Ok(sample)
                },
                &window,
                eps,
                config.schedule(),
                th,
            )?
        }
    };
    if let Some(s) = &last {
        flags.extend(s.flags().iter().cloned());
    }
    flags.dedup();
    let csv = if config.points_csv { last.map(|s| s.to_csv()) } else { None };
    Ok(Outcome { result: json!({ "coverage": report_json(&report) }), verdict: Some(report.verdict), config, flags, csv })
}

fn exact_sample(points: &[(Vec<i64>, hyperlab_core::linalg::ExactVector)], n: usize) -> PointSample {
    let labels: Vec<String> = std::iter::once("s".to_string()).chain((1..=n).map(|i| format!("s{i}"))).collect();
    let mut out = PointSample::new(Field::Real, n, labels);
    for (meta, x) in points {
        out.push(x.to_vector().coords(), meta);
    }
    out
}

fn semigroup(config: &ExperimentConfig) -> Result<MatrixSemigroup> {
    let g = config.semigroup.as_ref().expect("resolved").to_semigroup()?;
    g.require_abelian()?;
    Ok(g)
}

fn budget(config: &ExperimentConfig) -> Budget {
    Budget { weights: config.weights.clone() }
}

fn rational_start(v: &VectorJson) -> Option<Vec<BigRational>> {
    if v.field != Field::Real {
        return None;
    }
    v.to_scalars().ok()?.iter().map(|s| s.exact_parts().and_then(|(re, _)| re.as_rational())).collect()
}

fn run_orbit(config: ExperimentConfig) -> Result<Outcome> {
    let g = semigroup(&config)?;
    let start = config.start.clone().expect("resolved");
    let v = start.to_vector()?;
    let window = config.window()?;
    let b = budget(&config);
    let mut flags = Vec::new();
    let exact = match (config.mode, g.exact_generators(), rational_start(&start)) {
        (Mode::Exact, Some(q), Some(r)) => Some((q.to_vec(), r)),
        (Mode::Exact, _, _) => {
            flags.push("exact mode needs rational generators and start; float enumeration used".into());
            None
        }
        _ => None,
    };
    let exact_points = |bounds: &[u32]| -> hyperlab_core::Result<PointSample> {
        let (q, r) = exact.as_ref().expect("exact mode");
        let pts = orbit_exact(q, r, bounds, Some(&window))?;
        let labels: Vec<String> = (1..=g.len()).map(|i| format!("k{i}")).collect();
        let mut s = PointSample::new(Field::Real, g.n(), labels);
        for (k, x) in pts {
            let coords: Vec<f64> = x.iter().map(rational_to_f64).collect();
            let meta: Vec<i64> = k.iter().map(|&e| e as i64).collect();
            s.push(&coords, &meta);
        }
        Ok(s)
    };
    let report = density_trend(
        |k| {
            let bounds = b.bounds(g.len(), k)?;
            if exact.is_some() {
                let s = exact_points(&bounds)?;
                Ok((coverage(&s, &window, config.epsilon)?, s.len() as u64))
            } else {
                Ok(orbit_cover(&g, &v, &bounds, &window, config.epsilon)?)
            }
        },
        config.schedule(),
        config.thresholds,
    )?;
    let csv = if config.points_csv {
        let bounds = b.bounds(g.len(), *config.schedule().last().unwrap())?;
        let mut s = if exact.is_some() { exact_points(&bounds)? } else { orbit(&g, &v, &bounds, Some(&window))? };
        s.sort_by_meta();
        Some(s.to_csv())
    } else {
        None
    };
    let result = json!({
        "coverage": report_json(&report),
        "generators": g.len(),
        "commutator_residual": g.commutator_residual(),
        "exact": exact.is_some(),
    });
    Ok(Outcome { config, result, verdict: Some(report.verdict), flags, csv })
}

fn random_vector(rng: &mut ChaCha8Rng, field: Field, n: usize) -> Vector {
    match field {
        Field::Real => Vector::real((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()),
        Field::Complex => {
            let z: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            Vector::complex(&z)
        }
    }
}

fn cube(dim: usize) -> Vec<[f64; 2]> {
    vec![[-DEFAULT_RADIUS, DEFAULT_RADIUS]; dim]
}

fn probe(mut config: ExperimentConfig) -> Result<Outcome> {
    let g = semigroup(&config)?;
    let window = config.window()?;
    let b = budget(&config);
    let (eps, th) = (config.epsilon, config.thresholds);
    let schedule = config.schedule().to_vec();
    let nf = normal_form(g.generators(), g.field())?;
    let hp = hypercyclicity_probe(&g, &window, eps, &b, &schedule, th)?;
    let mut flags = Vec::new();

    let mats: Vec<DMatrix<f64>> = nf.conjugated.iter().map(|a| a.realified()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut random = Vec::new();
    for i in 0..config.random_starts {
        let v = random_vector(&mut rng, g.field(), g.n());
        let engine = OrbitEngine::new(&mats, v.coords(), PATTERN_SNAP)?;
        let rep = density_trend(|k| engine.cover(&b.bounds(g.len(), k)?, &window, eps), &schedule, th)?;
        if rep.verdict != hp.report.verdict {
            flags.push(format!("random start {i}: {} differs from u_eta verdict {}", rep.verdict, hp.report.verdict));
        }
        random.push(json!({ "start_normal_coords": v.coords(), "coverage": report_json(&rep) }));
    }

    let canonical = match canonical_invariant_subspace(&nf) {
        Ok(m) => {
            let sw = config.subspace_window.clone().unwrap_or_else(|| cube(m.real_dim()));
            let mw = Window::new(sw.iter().map(|w| (w[0], w[1])).collect())?;
            let x = m.basis()[0].clone();
            let rep = subspace_hypercyclicity_probe(&g, &m, &x, &mw, eps, &b, &schedule, th)?;
            json!({
                "dim": m.dim(),
                "basis": m.basis().iter().map(|v| VectorJson::from_vector(v)).collect::<Vec<_>>(),
                "start": VectorJson::from_vector(&x),
                "coverage": report_json(&rep),
            })
        }
        Err(e @ hyperlab_core::Error::NoNontrivialCanonical(_)) => json!({ "error": e.to_string() }),
        Err(e) => return Err(e.into()),
    };

    let user = match &config.subspace {
        None => Value::Null,
        Some(vs) => {
            let basis = vs.iter().map(VectorJson::to_vector).collect::<hyperlab_core::Result<Vec<_>>>()?;
            let m = subspace_from_basis(&basis)?;
            let sw = config.subspace_window.get_or_insert_with(|| cube(m.real_dim())).clone();
            let mw = Window::new(sw.iter().map(|w| (w[0], w[1])).collect())?;
            let x = match &config.start {
                Some(s) => s.to_vector()?,
                None => m.basis()[0].clone(),
            };
            let rep = subspace_hypercyclicity_probe(&g, &m, &x, &mw, eps, &b, &schedule, th)?;
            let witness = if rep.verdict == Verdict::DenseEvidence {
                Some(x.clone())
            } else {
                witness_in_subspace(&g, &m, &mw, eps, &b, &schedule, th, WITNESS_CANDIDATES, Some(&x))?
            };
            json!({
                "dim": m.dim(),
                "start": VectorJson::from_vector(&x),
                "coverage": report_json(&rep),
                "witness": witness.as_ref().map(VectorJson::from_vector),
            })
        }
    };

    let result = json!({
        "normal_form": nf.to_json(),
        "hypercyclic": {
            "coverage": report_json(&hp.report),
            "u_eta": VectorJson::from_vector(&hp.u_eta),
            "start": VectorJson::from_vector(&hp.start),
            "evidence": hp.hypercyclic_evidence(),
        },
        "random_starts": random,
        "canonical_subspace": canonical,
        "user_subspace": user,
    });
    Ok(Outcome { config, result, verdict: Some(hp.report.verdict), flags, csv: None })
}

fn normalform(config: ExperimentConfig) -> Result<Outcome> {
    let g = semigroup(&config)?;
    let nf = normal_form(g.generators(), g.field())?;
    let scale = g.generators().iter().fold(0.0f64, |a, m| a.max(m.max_abs()));
    let tol = 1e-8 * (1.0 + scale);
    let membership = nf
        .conjugated
        .iter()
        .map(|a| check_k_eta_membership(a, &nf.eta, tol).map(|(ok, r)| json!({ "member": ok, "residual": r })))
        .collect::<hyperlab_core::Result<Vec<_>>>()?;
    let result = json!({
        "normal_form": nf.to_json(),
        "eigenvalues": nf.eigenvalues.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "membership": membership,
        "tolerance": tol,
    });
    Ok(Outcome { config, result, verdict: None, flags: Vec::new(), csv: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_is_exact() {
        assert!(independent_over_q(&[Surd::sqrt(2), Surd::sqrt(3)]).unwrap());
        let s = Surd::parse("1+√2").unwrap();
        assert!(!independent_over_q(&[Surd::sqrt(2), s]).unwrap());
        assert!(!independent_over_q(&[Surd::sqrt(8), Surd::sqrt(2)]).unwrap());
    }

    #[test]
    fn decimal_tokens_are_flagged() {
        let mut f = Vec::new();
        let (x, s) = scalar_token("1.5", &mut f).unwrap();
        assert_eq!((x, s), (1.5, None));
        assert_eq!(f.len(), 1);
        let (_, s) = scalar_token("√2", &mut f).unwrap();
        assert!(s.is_some());
        assert_eq!(f.len(), 1);
    }
}
