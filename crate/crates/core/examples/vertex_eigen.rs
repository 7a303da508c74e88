use qoper_core::vertex::eigen_residual;

fn main() {
    let r = eigen_residual(2, 4).unwrap();
    if let Some(fit) = &r.fit {
        println!("prefactor {:?}", fit.pochhammer);
        for (k, kappa) in fit.kappas.iter().enumerate() {
            println!("kappa_{} = {kappa}", k + 1);
        }
    }
    println!("vanishes through z^4: {} (lowest orders {:?})", r.vanishes(), r.lowest_orders());
}
