//! Narrow further: the continuation after consuming the parked copy.

use typelogic::prover::{prove, Sequent, SearchLimits, StructTree};
use typelogic::syntax::parse_formula;

fn leaf(i: usize, f: &str) -> StructTree {
    StructTree::word_leaf(i, parse_formula(f).unwrap())
}

fn rb(items: Vec<StructTree>) -> StructTree {
    let mut it = items.into_iter().rev();
    let mut out = it.next().unwrap();
    for t in it {
        out = StructTree::tensor(t, out);
    }
    out
}

fn main() {
    let goal = parse_formula("s").unwrap();
    // gary loves his code and bill VP2(hyp np\s) -> s at bound 1
    let tree = rb(vec![
        leaf(0, "np"),
        leaf(1, "(np\\s)/np"),
        leaf(2, "<>np\\(np/n)"),
        leaf(3, "n"),
        leaf(4, "(s\\s)/s"),
        leaf(5, "np"),
        StructTree::hypothesis(parse_formula("np\\s").unwrap()),
    ]);
    let outcome = prove(&Sequent::new(tree, goal.clone()), 1, &SearchLimits::default());
    println!("continuation at bound 1: {} proofs", outcome.proofs.len());

    // gary loves his code -> s at bound 1 (lone first clause)
    let tree = rb(vec![
        leaf(0, "np"),
        leaf(1, "(np\\s)/np"),
        leaf(2, "<>np\\(np/n)"),
        leaf(3, "n"),
    ]);
    let outcome = prove(&Sequent::new(tree, goal), 1, &SearchLimits::default());
    println!("first clause alone at bound 1: {} proofs", outcome.proofs.len());
}
