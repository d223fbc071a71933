//! Pieces of the ellipsis-site derivation at each bound.

use typelogic::prover::{prove, Sequent, SearchLimits, StructTree};
use typelogic::syntax::parse_formula;

fn leaf(i: usize, f: &str) -> StructTree {
    StructTree::word_leaf(i, parse_formula(f).unwrap())
}

fn main() {
    let vp = StructTree::tensor(
        leaf(0, "(np\\s)/np"),
        StructTree::tensor(leaf(1, "<>np\\(np/n)"), leaf(2, "n")),
    );
    for bound in [0, 1, 2] {
        let outcome = prove(
            &Sequent::new(vp.clone(), parse_formula("np\\s").unwrap()),
            bound,
            &SearchLimits::default(),
        );
        println!("vp -> np\\s bound {bound}: {} proofs", outcome.proofs.len());
        for p in outcome.proofs.iter().take(1) {
            println!("contractions = {}", p.contractions());
        }
    }
    // the residuated form with an explicit subject hypothesis
    let clause = StructTree::tensor(StructTree::hypothesis(parse_formula("np").unwrap()), vp);
    for bound in [1] {
        let outcome = prove(
            &Sequent::new(clause.clone(), parse_formula("s").unwrap()),
            bound,
            &SearchLimits::default(),
        );
        println!("x vp -> s bound {bound}: {} proofs", outcome.proofs.len());
    }
}
