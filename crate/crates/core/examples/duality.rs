use qoper_core::qoper::verify_trs_point;
use qoper_core::trs::{duality_solve, sample_duality_data, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let samples: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in 0..samples {
        let data = sample_duality_data(&mut rng, n);
        let sol = duality_solve(&data.xi, &data.a, data.q, &SolveOptions { seed: s, ..Default::default() }).unwrap();
        let mut worst = (0.0f64, 0.0f64, 0.0f64);
        for pt in &sol.points {
            let v = verify_trs_point(&data.xi, &pt.momenta, &data.a, data.q).unwrap();
            worst.0 = worst.0.max(v.d_check);
            worst.1 = worst.1.max(v.max_qq());
            worst.2 = worst.2.max(v.max_bethe());
        }
        println!(
            "sample {s}: {} of {} solutions, residual {:.1e}, D~Lambda {:.1e}, QQ {:.1e}, Bethe {:.1e}",
            sol.count(),
            sol.expected,
            sol.max_residual(),
            worst.0,
            worst.1,
            worst.2
        );
    }
}
