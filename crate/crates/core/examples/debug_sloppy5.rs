//! The marked ellipsis-site argument at the exact budget it gets in context.

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
    let dia = StructTree::diamond(vp);
    let goal = parse_formula("<>(np\\s)").unwrap();
    for bound in [0, 1, 2] {
        let outcome = prove(
            &Sequent::new(dia.clone(), goal.clone()),
            bound,
            &SearchLimits::default(),
        );
        println!("bound {bound}: {} proofs", outcome.proofs.len());
    }
}
