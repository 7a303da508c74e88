use qoper_core::dell::degeneration_check;

fn main() {
    for n in 2..=3 {
        let r = degeneration_check(n, 1, 1).unwrap();
        for m in &r.dell_to_ers {
            println!("N={n} DELL->eRS H_{}: factor {}", m.r, m.factor.as_ref().map_or("-".into(), |f| f.to_string()));
        }
        for m in &r.ers_to_trs {
            println!("N={n} eRS->tRS H_{}: matches {}", m.r, m.matches);
        }
        println!("N={n}: passed {} (without rescaling {})", r.passed(), r.matches_without_rescaling);
    }
}
