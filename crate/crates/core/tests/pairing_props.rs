use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use refrig_imc_core::{rga, GainMatrix};

fn random_matrix(rng: &mut ChaCha8Rng) -> GainMatrix {
    loop {
        let mut a = [[0.0; 2]; 2];
        for v in a.iter_mut().flatten() {
            *v = rng.gen_range(-10.0..10.0);
        }
        let m = GainMatrix(a);
        if m.det().abs() > 1e-3 * m.norm() * m.norm() {
            return m;
        }
    }
}

#[test]
fn rows_and_columns_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let l = rga(&random_matrix(&mut rng)).unwrap();
        for s in l.row_sums().into_iter().chain(l.col_sums()) {
            assert!((s - 1.0).abs() < 1e-9, "{s}");
        }
    }
}

#[test]
fn invariant_under_diagonal_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let a = random_matrix(&mut rng);
        let mut s = [0.0; 4];
        for v in &mut s {
            let mag = rng.gen_range(0.1..10.0);
            *v = if rng.gen_bool(0.5) { mag } else { -mag };
        }
        let (s1, s2) = ([s[0], s[1]], [s[2], s[3]]);
        let mut b = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                b[i][j] = s1[i] * a.0[i][j] * s2[j];
            }
        }
        let (la, lb) = (rga(&a).unwrap(), rga(&GainMatrix(b)).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let tol = 1e-9 * (1.0 + la.0[i][j].abs());
                assert!((la.0[i][j] - lb.0[i][j]).abs() < tol, "{:?} {:?}", la, lb);
            }
        }
    }
}
