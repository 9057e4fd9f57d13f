use num_complex::Complex;
use qwalk_core::coin::{dft_coin, grover_coin, CoinMatrix};
use qwalk_core::dense::{build_global, evolve_dense};
use qwalk_core::walk::{evolve, Direction, Lattice, LatticeState, Site, WalkConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

/// Reference operator built as the product of a block-diagonal coin and a shift permutation.
fn reference_operator(coin: &CoinMatrix<f64>, l: usize) -> Vec<Vec<C>> {
    let n = 4 * l * l;
    let idx = |x: usize, y: usize, c: usize| 4 * (l * y + x) + c;
    let zero = C::new(0.0, 0.0);
    let mut shift = vec![vec![zero; n]; n];
    for y in 0..l {
        for x in 0..l {
            let moves = [((x + 1) % l, y), ((x + l - 1) % l, y), (x, (y + 1) % l), (x, (y + l - 1) % l)];
            for (c, &(tx, ty)) in moves.iter().enumerate() {
                shift[idx(tx, ty, c)][idx(x, y, c)] = C::new(1.0, 0.0);
            }
        }
    }
    let mut coin_op = vec![vec![zero; n]; n];
    for cell in 0..l * l {
        for r in 0..4 {
            for k in 0..4 {
                coin_op[4 * cell + r][4 * cell + k] = *coin.entry(r, k);
            }
        }
    }
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| coin_op[i][k] * shift[k][j]).sum()).collect())
        .collect()
}

#[test]
fn global_operator_matches_reference_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for coin in [grover_coin::<f64>(), dft_coin(), CoinMatrix::random_unitary(&mut rng)] {
        for l in [3, 4] {
            let u = build_global(&coin, l).unwrap();
            let reference = reference_operator(&coin, l);
            let worst = u
                .to_rows()
                .iter()
                .zip(&reference)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).norm()))
                .fold(0.0, f64::max);
            assert!(worst <= 1e-15, "L={l}: {worst}");
        }
    }
}

#[test]
fn random_coins_give_unitary_global_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for l in [3, 5] {
        for _ in 0..50 {
            let coin = CoinMatrix::<f64>::random_unitary(&mut rng);
            let defect = build_global(&coin, l).unwrap().unitarity_defect();
            assert!(defect <= 1e-10, "L={l}: {defect}");
        }
    }
    for _ in 0..5 {
        let coin = CoinMatrix::<f64>::random_unitary(&mut rng);
        assert!(build_global(&coin, 9).unwrap().unitarity_defect() <= 1e-10);
    }
}

#[test]
fn dense_evolution_preserves_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let coin = CoinMatrix::<f64>::random_unitary(&mut rng);
    let u = build_global(&coin, 5).unwrap();
    let out = evolve_dense(&u, &LatticeState::symmetric_origin(), 50).unwrap();
    assert!((out.norm_sqr() - 1.0).abs() <= 1e-10);
    assert_eq!(out.step_count(), 50);
}

#[test]
fn grover_thirty_steps_matches_periodic_engine() {
    let l = 9;
    let coin = grover_coin::<f64>();
    let initial = LatticeState::symmetric_origin().translated(4, 4);
    let dense = evolve_dense(&build_global(&coin, l).unwrap(), &initial, 30).unwrap();
    let cfg = WalkConfig::new(coin, 30, initial).unwrap().with_lattice(Lattice::Periodic { side: l }).unwrap();
    let sparse = evolve(&cfg).unwrap();
    assert!(sparse.max_abs_diff(&dense) <= 1e-10);
}

#[test]
fn dense_rejects_state_outside_torus() {
    let u = build_global(&grover_coin::<f64>(), 3).unwrap();
    let s = LatticeState::basis(Site::new(-1, 0), Direction::U);
    assert!(evolve_dense(&u, &s, 1).is_err());
    assert!(build_global(&grover_coin::<f64>(), 2).is_err());
}
