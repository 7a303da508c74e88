use qoper_core::macdonald::{eigencheck, macdonald_gram_schmidt, schur_specialization_check, LocusConvention, Partition};

fn main() {
    for n in 1..=3usize {
        for size in 0..=4u32 {
            for lambda in Partition::all(size, n) {
                let rep = eigencheck(&lambda, n).expect("eigencheck");
                let gs = macdonald_gram_schmidt(&lambda, n).expect("gram-schmidt") == rep.polynomial;
                let schur = schur_specialization_check(&lambda, n).expect("schur");
                let inverted = rep.locus_for(LocusConvention::HbarInverted).map_or(false, |l| l.all());
                let paper = rep.locus_for(LocusConvention::Paper).map_or(false, |l| l.all());
                println!(
                    "n={n} lambda={lambda}: eigenvector {} formula {} top=q^|l| {} gram-schmidt {gs} schur {schur} locus paper {paper} inverted {inverted}",
                    rep.simultaneous(),
                    rep.eigenvalues_match_formula(),
                    rep.top_eigenvalue_is_q_power(),
                );
            }
        }
    }
}
