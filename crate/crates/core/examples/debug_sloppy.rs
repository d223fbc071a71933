//! Isolate the pieces of the sloppy reading.

use typelogic::prover::{prove, Sequent, SearchLimits, StructTree};
use typelogic::syntax::parse_formula;

fn main() {
    // loves his code -> np\s (the ellipsis-site subderivation)
    let tree = StructTree::tensor(
        StructTree::word_leaf(0, parse_formula("(np\\s)/np").unwrap()),
        StructTree::tensor(
            StructTree::word_leaf(1, parse_formula("<>np\\(np/n)").unwrap()),
            StructTree::word_leaf(2, parse_formula("n").unwrap()),
        ),
    );
    let goal = parse_formula("np\\s").unwrap();
    let outcome = prove(&Sequent::new(tree.clone(), goal), 2, &SearchLimits::default());
    println!("vp -> np\\s at bound 2: {} proofs", outcome.proofs.len());

    // <>(loves his code) -> <>(np\s)
    let dia = StructTree::diamond(tree);
    let goal = parse_formula("<>(np\\s)").unwrap();
    let outcome = prove(&Sequent::new(dia, goal), 2, &SearchLimits::default());
    println!("<>vp -> <>(np\\s) at bound 2: {} proofs", outcome.proofs.len());
    for p in outcome.proofs.iter().take(1) {
        println!("{}", p.trace());
    }
}
