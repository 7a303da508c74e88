use std::time::Instant;

use qoper_core::trs::{check_commutativity, trs_hamiltonian, TrsFrame};

fn main() {
    let frame = TrsFrame::generic(2, "x", "t");
    println!("H_1 = {}", trs_hamiltonian(&frame, 1).unwrap());
    for n in 2..=4 {
        let t = Instant::now();
        let r = check_commutativity(&TrsFrame::generic(n, "x", "t")).unwrap();
        println!("N={n}: {} pairs, all zero {} ({:.1}s)", r.pairs_checked, r.all_zero(), t.elapsed().as_secs_f64());
    }
}
