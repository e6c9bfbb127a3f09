use qgraph::composer::{
    kernel_decoupling_check, loop_matrix, star, star_cascade, star_via_series, star_via_transfer, Wiring,
};
use qgraph::numerics::{operator_norm, svd};
use qgraph::random::{random_bounded_scatterer, random_scatterer, random_spec, random_wiring, singular_loop_pair};
use qgraph::smatrix::{distance, Group, PortSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn engineered_pairs_have_singular_decoupled_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..30 {
        let k = rng.random_range(1..=3);
        let d = rng.random_range(1..=3);
        {
            let (s2, s1) = singular_loop_pair(&mut rng, k, d);
            assert!(s1.unitarity_defect() < 1e-12 && s2.unitarity_defect() < 1e-12);
            let sigma = svd(&loop_matrix(&s2, &s1).unwrap()).unwrap().sigma;
            assert!(*sigma.last().unwrap() < 1e-12, "k={k} d={d}: {sigma:?}");

            let report = kernel_decoupling_check(&s2, &s1).unwrap();
            assert!(report.kernel_dim() >= 1);
            assert!(report.is_decoupled(), "{report:?}");

            let g = star_cascade(&s2, &s1).unwrap();
            assert!(g.unitarity_defect() < 1e-9);
        }
    }
}

#[test]
fn star_of_random_pairs_is_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..200 {
        let d = rng.random_range(1..=3);
        let spec1 = random_spec(&mut rng, 3, d);
        let spec2 = random_spec(&mut rng, 3, d);
        let s1 = random_scatterer(&mut rng, spec1);
        let s2 = random_scatterer(&mut rng, spec2);
        let w = random_wiring(&mut rng, &spec1, &spec2);
        let g = star(&s2, &s1, &w).unwrap();
        assert!(g.unitarity_defect() < 1e-9, "{spec1:?} {spec2:?} {w:?}");
        assert_eq!(g.spec().total_in(), spec1.total_in() + spec2.total_in() - w.s1_to_s2.len() - w.s2_to_s1.len());
    }
}

#[test]
fn three_routes_agree_on_contractive_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..60 {
        let k = rng.random_range(1..=3);
        let d = rng.random_range(1..=3);
        let s1 = random_bounded_scatterer(&mut rng, k, d, 0.94);
        let s2 = random_bounded_scatterer(&mut rng, k, d, 0.94);
        let round_trip = s2.block(Group::Left, Group::Left) * s1.block(Group::Right, Group::Right);
        assert!(operator_norm(&round_trip).unwrap() <= 0.9);

        let direct = star_cascade(&s2, &s1).unwrap();
        let w = Wiring::cascade(s1.spec(), s2.spec()).unwrap();
        let series = star_via_series(&s2, &s1, &w, 100_000, 1e-14).unwrap();
        let transfer = star_via_transfer(&s2, &s1).unwrap();
        assert!(distance(&direct, &series) < 1e-8);
        assert!(distance(&direct, &transfer) < 1e-8);
        assert!(distance(&series, &transfer) < 1e-8);
    }
}

#[test]
fn dishomogeneous_star_matches_unpadded_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut compared = 0;
    for _ in 0..400 {
        let d = rng.random_range(1..=2);
        let spec1 = random_spec(&mut rng, 3, d);
        let spec2 = random_spec(&mut rng, 3, d);
        let s1 = random_scatterer(&mut rng, spec1);
        let s2 = random_scatterer(&mut rng, spec2);
        let w = random_wiring(&mut rng, &spec1, &spec2);
        match star_via_series(&s2, &s1, &w, 200_000, 1e-15) {
            Ok(series) => {
                let g = star(&s2, &s1, &w).unwrap();
                assert!(distance(&g, &series) < 1e-8, "{spec1:?} {spec2:?} {w:?}");
                compared += 1;
            }
            Err(qgraph::Error::SeriesDivergent { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(compared > 100, "only {compared} convergent cases");
}

#[test]
fn feed_forward_wiring_is_plain_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for k in 1..=3 {
        let spec = PortSpec::new(k, 0, 0, k, 2).unwrap();
        let s1 = random_scatterer(&mut rng, spec);
        let s2 = random_scatterer(&mut rng, spec);
        let g = star_cascade(&s2, &s1).unwrap();
        let direct = s2.matrix() * s1.matrix();
        assert!(qgraph::numerics::max_abs(&(g.matrix() - direct)) < 1e-13);
    }
}
