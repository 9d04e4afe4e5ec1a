use hyperlab_core::constructions::{a_alpha_point, make_alpha, sample_a_alpha, sample_a_alpha_exact};
use hyperlab_core::density::{merge, GridCover, Thresholds, Window};
use hyperlab_core::linalg::{
    complex_to_real_embedding, membership_distance, project, subspace_from_basis, ExactSubspace, ExactVector, Field,
    QMatrix, Vector,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0f64..3.0, dim)
}

fn cloud(dim: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(coords(dim), 0..max)
}

fn cover(points: &[Vec<f64>], window: &Window, eps: f64) -> GridCover {
    let mut c = GridCover::new(window, eps).unwrap();
    for p in points {
        c.insert(p);
    }
    c
}

fn square() -> Window {
    Window::cube(2, -2.0, 2.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn projection_is_idempotent_and_contracting(basis in proptest::collection::vec(coords(4), 1..4), p in coords(4)) {
        let vs: Vec<Vector> = basis.into_iter().map(Vector::real).collect();
        prop_assume!(vs.iter().any(|v| v.norm() > 1e-3));
        let m = subspace_from_basis(&vs).unwrap();
        let p = Vector::real(p);
        let q = project(&p, &m).unwrap();
        let qq = project(&q, &m).unwrap();
        prop_assert!(q.sub(&qq).unwrap().norm() <= 1e-9 * (1.0 + p.norm()));
        prop_assert!(q.norm() <= p.norm() * (1.0 + 1e-12) + 1e-12);
        prop_assert!(membership_distance(&q, &m).unwrap() <= 1e-9 * (1.0 + p.norm()));
    }

    #[test]
    fn distance_vanishes_on_the_span(basis in proptest::collection::vec(coords(3), 1..3), c in coords(2)) {
        let vs: Vec<Vector> = basis.into_iter().map(Vector::real).collect();
        prop_assume!(vs.iter().any(|v| v.norm() > 1e-3));
        let m = subspace_from_basis(&vs).unwrap();
        let mut x = Vector::zeros(Field::Real, 3);
        for (v, k) in vs.iter().zip(&c) {
            x = x.add(&v.scale(*k)).unwrap();
        }
        let d = membership_distance(&x, &m).unwrap();
        prop_assert!(d <= 1e-9 * (1.0 + x.norm()));
        let q = project(&x, &m).unwrap();
        prop_assert!(x.sub(&q).unwrap().norm() <= 1e-9 * (1.0 + x.norm()));
    }

    #[test]
    fn embedding_is_additive_injective_isometric(a in coords(6), b in coords(6)) {
        let z = |c: &[f64]| Vector::complex(&c.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect::<Vec<_>>());
        let (za, zb) = (z(&a), z(&b));
        let sum = complex_to_real_embedding(&za.add(&zb).unwrap());
        let parts = complex_to_real_embedding(&za).add(&complex_to_real_embedding(&zb)).unwrap();
        prop_assert_eq!(sum.coords(), parts.coords());
        prop_assert_eq!(complex_to_real_embedding(&za).norm(), za.norm());
        prop_assert_eq!(complex_to_real_embedding(&za) == complex_to_real_embedding(&zb), a == b);
    }

    #[test]
    fn span_dimension_is_rational_rank(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 1..5)) {
        prop_assume!(rows.iter().flatten().any(|&x| x != 0));
        let rank = QMatrix::from_i64(&rows).unwrap().rank();
        let vs: Vec<Vector> = rows.iter().map(|r| Vector::real(r.iter().map(|&x| x as f64).collect())).collect();
        prop_assert_eq!(subspace_from_basis(&vs).unwrap().dim(), rank);
        let ev: Vec<ExactVector> = rows.iter().map(|r| ExactVector::from_ints(r)).collect();
        let em = ExactSubspace::from_basis(&ev).unwrap();
        prop_assert_eq!(em.dim(), rank);
        for v in &ev {
            prop_assert!(em.contains(v).unwrap());
        }
    }

    #[test]
    fn coverage_is_monotone(a in cloud(2, 60), b in cloud(2, 60)) {
        let w = square();
        let ca = cover(&a, &w, 0.1);
        let both: Vec<Vec<f64>> = a.iter().chain(&b).cloned().collect();
        let cab = cover(&both, &w, 0.1);
        prop_assert!((0.0..=1.0).contains(&ca.coverage()));
        prop_assert!(ca.coverage() <= cab.coverage());
        prop_assert!(ca.hit_indices().iter().all(|&i| cab.contains_cell(i)));
    }

    #[test]
    fn merge_is_a_semilattice(a in cloud(2, 40), b in cloud(2, 40), c in cloud(2, 40)) {
        let w = square();
        let (ca, cb, cc) = (cover(&a, &w, 0.1), cover(&b, &w, 0.1), cover(&c, &w, 0.1));
        let ab = merge(&ca, &cb).unwrap();
        prop_assert_eq!(ab.hit_indices(), merge(&cb, &ca).unwrap().hit_indices());
        prop_assert_eq!(
            merge(&ab, &cc).unwrap().hit_indices(),
            merge(&ca, &merge(&cb, &cc).unwrap()).unwrap().hit_indices()
        );
        prop_assert_eq!(merge(&ca, &ca).unwrap().hit_indices(), ca.hit_indices());
    }

    #[test]
    fn refinement_never_grows_the_hit_measure(a in cloud(2, 80)) {
        let w = Window::cube(2, -2.0, 2.0).unwrap();
        let coarse = cover(&a, &w, 0.25).cell_measure();
        let fine = cover(&a, &w, 0.125).cell_measure();
        prop_assert!(fine <= coarse);
    }

    #[test]
    fn verdict_is_a_function_of_the_trend(t in proptest::collection::vec(0.0f64..=1.0, 3..6)) {
        let th = Thresholds::default();
        prop_assert_eq!(th.verdict(&t), th.verdict(&t.clone()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn samples_rebuild_from_metadata(bound in 1u64..60, lo in -3.0f64..1.0, width in 0.5f64..3.0) {
        let alpha = make_alpha(2, &[2, 3]).unwrap();
        let w = Window::cube(2, lo, lo + width).unwrap();
        let s = sample_a_alpha(&alpha, bound, &w).unwrap();
        for i in 0..s.len() {
            let m = s.meta(i);
            let rebuilt = a_alpha_point(alpha.values(), m[0], &m[1..]);
            prop_assert_eq!(rebuilt.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), s.point(i).iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn samples_grow_with_the_bound(bound in 1u64..40, extra in 0u64..40) {
        let alpha = make_alpha(2, &[2, 5]).unwrap();
        let w = square();
        let small = sample_a_alpha(&alpha, bound, &w).unwrap();
        let big = sample_a_alpha(&alpha, bound + extra, &w).unwrap();
        let metas: std::collections::HashSet<Vec<i64>> = (0..big.len()).map(|i| big.meta(i).to_vec()).collect();
        prop_assert!((0..small.len()).all(|i| metas.contains(small.meta(i))));
        let exact = sample_a_alpha_exact(&alpha, bound, &w).unwrap();
        prop_assert_eq!(exact.len(), small.len());
    }
}
