use std::time::Instant;

use qoper_core::dell::{dell_commutativity_certificate, DellModel, ThetaVariant};

fn main() {
    for theta in [ThetaVariant::Full, ThetaVariant::Corrupted] {
        for (p, w) in [(1, 0), (0, 1), (1, 1)] {
            let t = Instant::now();
            let c = dell_commutativity_certificate(&DellModel::new(3, p, w).unwrap().with_theta(theta)).unwrap();
            println!(
                "{theta:?} caps ({p},{w}): passed {} verified {:?} first failure {:?} ({:.1}s)",
                c.passed(),
                c.max_verified_order(),
                c.first_failure(),
                t.elapsed().as_secs_f64()
            );
        }
    }
}
