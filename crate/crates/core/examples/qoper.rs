use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qoper_core::qoper::verify_trs_point;
use qoper_core::trs::{duality_solve, sample_duality_data, SolveOptions};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=3 {
        let d = sample_duality_data(&mut rng, n);
        let sol = duality_solve(&d.xi, &d.a, d.q, &SolveOptions::default()).unwrap();
        for (i, pt) in sol.points.iter().enumerate() {
            let v = verify_trs_point(&d.xi, &pt.momenta, &d.a, d.q).unwrap();
            println!("rank {} solution {i}: D~Lambda {:.1e}  QQ {:.1e}  Bethe {:.1e}", n - 1, v.d_check, v.max_qq(), v.max_bethe());
        }
    }
}
