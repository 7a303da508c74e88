use qoper_core::macdonald::{LocusConvention, Partition};
use qoper_core::vertex::{resolve_conventions, truncation_check};

fn main() {
    let r = resolve_conventions().unwrap();
    println!("tried {} conventions, matches {:?}", r.tried, r.matches.iter().map(|(c, fp)| format!("{c:?} {fp}")).collect::<Vec<_>>());
    for (n, max) in [(2, 4), (3, 2)] {
        for size in 0..=max {
            for lambda in Partition::all(size, n) {
                match truncation_check(&lambda, n, max.max(1), LocusConvention::resolved()) {
                    Ok(t) => println!("n={n} {lambda}: bound {:?} symmetric {} equals P {}", t.degree_bound, t.symmetric, t.matches_oracle),
                    Err(e) => println!("n={n} {lambda}: {e}"),
                }
            }
        }
    }
}
