use hyperlab_core::density::{Thresholds, Verdict, Window};
use hyperlab_core::dynamics::*;
use hyperlab_core::linalg::{membership_distance, subspace_from_basis, Field, Matrix, Surd, Vector};
use hyperlab_core::normal_form::{normal_form, BlockKind};
use hyperlab_core::Error;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn g_theta() -> MatrixSemigroup {
    example_g_theta(2, 3, &Surd::sqrt(2)).unwrap()
}

fn weighted(g: usize) -> Budget {
    let mut w = vec![0.2; g];
    for (i, x) in w.iter_mut().enumerate() {
        if i % 3 == 2 {
            *x = 1.0;
        }
    }
    Budget::weighted(w)
}

#[test]
fn g_theta_orbit_follows_the_closed_form() {
    let g = g_theta();
    let v = Vector::basis(Field::Real, 2, 0);
    let s = orbit(&g, &v, &[3, 3, 5], None).unwrap();
    assert_eq!(s.len(), 4 * 4 * 6);
    let t = std::f64::consts::PI * 2f64.sqrt();
    for i in 0..s.len() {
        let m = s.meta(i);
        let r = 2f64.powi(m[0] as i32) / 3f64.powi(m[1] as i32);
        let a = t * m[2] as f64;
        let p = s.point(i);
        assert!((p[0] - r * a.cos()).abs() < 1e-12 * (1.0 + r));
        assert!((p[1] - r * a.sin()).abs() < 1e-12 * (1.0 + r));
    }
}

#[test]
fn homothety_orbit_lists_powers() {
    let a = Matrix::real(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
    let g = MatrixSemigroup::abelian(vec![a], Field::Real).unwrap();
    let s = orbit(&g, &Vector::basis(Field::Real, 2, 0), &[3], None).unwrap();
    let xs: Vec<f64> = s.iter().map(|p| p[0]).collect();
    assert_eq!(xs, vec![1.0, 2.0, 4.0, 8.0]);
    assert!(s.iter().all(|p| p[1] == 0.0));
}

#[test]
fn g_theta_preconditions_are_checked() {
    assert!(g_theta().is_abelian());
    assert_eq!(example_g_theta(2, 4, &Surd::sqrt(2)).unwrap_err(), Error::NotCoprime { p: 2, q: 4 });
    assert_eq!(example_g_theta(2, 3, &Surd::ratio(1, 2)).unwrap_err(), Error::RationalTheta);
}

#[test]
fn g_theta_is_hypercyclic_but_lines_are_not_reached() {
    let g = g_theta();
    let w = Window::cube(2, -2.0, 2.0).unwrap();
    let rep = hypercyclicity_probe(&g, &w, 0.1, &weighted(3), &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(rep.report.verdict, Verdict::DenseEvidence);
    assert!(rep.report.coverage >= 0.95, "{}", rep.report.coverage);
    let nf = normal_form(g.generators(), Field::Real).unwrap();
    assert!(matches!(canonical_invariant_subspace(&nf), Err(Error::NoNontrivialCanonical(_))));
}

#[test]
fn g_theta_line_traces_are_positive_rays() {
    let theta = Surd::sqrt(2);
    let v = Vector::real(vec![0.6, -0.8]);
    let t0 = line_trace_g_theta(2, 3, &theta, &v, 0).unwrap();
    assert_eq!(t0.scalars.len(), 1);
    let t = line_trace_g_theta(2, 3, &theta, &v, 3).unwrap();
    assert_eq!(t.scalars.len(), 16);
    assert!(t.all_positive());
    for (k, m, q) in &t.scalars {
        let want = BigRational::new(2.into(), 1.into()).pow(*k as i32) / BigRational::new(3.into(), 1.into()).pow(*m as i32);
        assert_eq!(q, &want);
    }
    assert!(t.min_sin > 0.0);
}

#[test]
fn line_subspace_probe_of_g_theta_is_not_dense() {
    let g = g_theta();
    let m = subspace_from_basis(&[Vector::real(vec![1.0, 2.0])]).unwrap();
    let win = Window::cube(1, -2.0, 2.0).unwrap();
    let x = Vector::real(vec![0.3, -0.7]);
    let rep = subspace_hypercyclicity_probe(&g, &m, &x, &win, 0.1, &weighted(3), &[50, 100, 200], Thresholds::default())
        .unwrap();
    assert_eq!(rep.verdict, Verdict::NotDenseEvidence);
    let y = Vector::real(vec![0.5, 1.0]);
    let rep = subspace_hypercyclicity_probe(&g, &m, &y, &win, 0.1, &weighted(3), &[50, 100, 200], Thresholds::default())
        .unwrap();
    assert!(rep.coverage <= 0.5 + 1.0 / 40.0, "{}", rep.coverage);
    let found =
        witness_in_subspace(&g, &m, &win, 0.1, &weighted(3), &[50, 100, 200], Thresholds::default(), 8, None).unwrap();
    assert!(found.is_none());
}

#[test]
fn single_homothety_is_not_dense() {
    let a = Matrix::real(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
    let g = MatrixSemigroup::abelian(vec![a], Field::Real).unwrap();
    let w = Window::cube(2, -2.0, 2.0).unwrap();
    let rep = hypercyclicity_probe(&g, &w, 0.1, &Budget::uniform(), &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(rep.report.verdict, Verdict::NotDenseEvidence);
}

#[test]
fn scalings_without_rotation_are_not_dense() {
    let g = g_theta();
    let two = MatrixSemigroup::abelian(g.generators()[..2].to_vec(), Field::Real).unwrap();
    let w = Window::cube(2, -2.0, 2.0).unwrap();
    let rep = hypercyclicity_probe(&two, &w, 0.1, &Budget::uniform(), &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(rep.report.verdict, Verdict::NotDenseEvidence);
    assert!(rep.report.coverage < 0.05);
}

#[test]
fn identity_semigroup() {
    let g = MatrixSemigroup::abelian(vec![Matrix::identity(Field::Real, 2)], Field::Real).unwrap();
    let v = Vector::real(vec![0.5, 0.5]);
    let s = orbit(&g, &v, &[10], None).unwrap();
    assert_eq!(s.len(), 1);
    let nf = normal_form(g.generators(), Field::Real).unwrap();
    let sp = spectrum(&g, &nf, 0, &[5]).unwrap();
    assert!(sp.values.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));
}

#[test]
fn complex_pipeline_shows_dense_evidence() {
    let g = example_dense_spectrum(Field::Complex).unwrap();
    let w = Window::cube(4, -2.0, 2.0).unwrap();
    let b = weighted(6);
    let rep = hypercyclicity_probe(&g, &w, 0.1, &b, &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(rep.report.verdict, Verdict::DenseEvidence, "{:?}", rep.report.trend);
    let nf = normal_form(g.generators(), Field::Complex).unwrap();
    let m = canonical_invariant_subspace(&nf).unwrap();
    assert_eq!(m.dim(), 1);
    let x = m.basis()[0].clone();
    let mw = Window::cube(2, -2.0, 2.0).unwrap();
    let sub = subspace_hypercyclicity_probe(&g, &m, &x, &mw, 0.1, &b, &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(sub.verdict, Verdict::DenseEvidence, "{:?}", sub.trend);
    let y = witness_in_subspace(&g, &m, &mw, 0.1, &b, &[50, 100, 200], Thresholds::default(), 3, None).unwrap();
    assert!(y.is_some());
    let hinted = witness_in_subspace(&g, &m, &mw, 0.1, &b, &[50, 100, 200], Thresholds::default(), 3, Some(&x)).unwrap();
    assert_eq!(hinted, Some(x));
}

#[test]
fn real_pipeline_with_one_triangular_block() {
    let g = example_dense_spectrum(Field::Real).unwrap();
    let w = Window::cube(3, -2.0, 2.0).unwrap();
    let b = weighted(6);
    let rep = hypercyclicity_probe(&g, &w, 0.1, &b, &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(rep.report.verdict, Verdict::DenseEvidence, "{:?}", rep.report.trend);
    let nf = normal_form(g.generators(), Field::Real).unwrap();
    assert_eq!(nf.blocks()[0].kind, BlockKind::T);
    let m = canonical_invariant_subspace(&nf).unwrap();
    for a in g.generators() {
        let image = a.apply(&m.basis()[0]).unwrap();
        assert!(membership_distance(&image, &m).unwrap() < 1e-8);
    }
    let x = m.basis()[0].clone();
    let mw = Window::cube(1, -2.0, 2.0).unwrap();
    let sub = subspace_hypercyclicity_probe(&g, &m, &x, &mw, 0.1, &b, &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(sub.verdict, Verdict::DenseEvidence, "{:?}", sub.trend);
    let sp = spectrum_report(&g, &nf, 0, &b, &mw, 0.1, &[50, 100, 200], Thresholds::default()).unwrap();
    assert_eq!(sp.verdict, Verdict::DenseEvidence);
}

#[test]
fn full_space_subspace_probe_matches_ambient() {
    let g = g_theta();
    let m = subspace_from_basis(&[Vector::basis(Field::Real, 2, 0), Vector::basis(Field::Real, 2, 1)]).unwrap();
    let w = Window::cube(2, -2.0, 2.0).unwrap();
    let x = Vector::real(vec![1.0, 0.0]);
    let sub = subspace_hypercyclicity_probe(&g, &m, &x, &w, 0.1, &weighted(3), &[50, 100, 200], Thresholds::default()).unwrap();
    let cover = orbit_cover(&g, &x, &[40, 40, 200], &w, 0.1).unwrap().0;
    assert_eq!(sub.cells_hit, cover.hit_count());
}

#[test]
fn javaheri_planted_trace_is_dense() {
    let a = Matrix::real(&[vec![1.0, 0.0], vec![1.0, 2.0]]).unwrap();
    let b = Matrix::real(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let j = javaheri_semigroup(&a, &b, false).unwrap();
    assert!(!j.semigroup.is_abelian());
    let t = javaheri_trace(&j, 20, 2.0, 0.1).unwrap();
    assert!(t.cover.coverage() >= 0.9);
    let signed = javaheri_semigroup(&a, &b, true).unwrap();
    assert_eq!(signed.semigroup.len(), 5);
    let v = Vector::basis(Field::Real, 2, 1);
    assert_eq!(javaheri_orbit(&j, 0, &v).unwrap().len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn abelian_reordering_is_harmless(k in proptest::collection::vec(0u32..6, 6), seed in 0usize..2) {
        let field = if seed == 0 { Field::Real } else { Field::Complex };
        let g = example_dense_spectrum(field).unwrap();
        let v = Vector::basis(field, g.n(), 0).add(&Vector::basis(field, g.n(), 1)).unwrap();
        let e = g.element(&k).unwrap();
        let p = OrbitPoint { exponents: k.clone(), point: e.apply(&v).unwrap() };
        let r = p.recompute_reversed(&g, &v).unwrap();
        let diff = r.sub(&p.point).unwrap().norm();
        prop_assert!(diff <= 1e-9 * (1.0 + p.point.norm()));
    }

    #[test]
    fn exact_orbit_reorders_exactly(k in 0u32..5, m in 0u32..5) {
        let g = hyperlab_core::linalg::QMatrix::from_rows(vec![
            vec![BigRational::new(2.into(), 1.into()), BigRational::from_integer(0.into())],
            vec![BigRational::new(1.into(), 1.into()), BigRational::new(2.into(), 1.into())],
        ]).unwrap();
        let h = g.mul(&g).unwrap();
        let ab = g.pow(k).unwrap().mul(&h.pow(m).unwrap()).unwrap();
        let ba = h.pow(m).unwrap().mul(&g.pow(k).unwrap()).unwrap();
        prop_assert_eq!(ab, ba);
    }
}
