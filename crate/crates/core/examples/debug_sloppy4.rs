//! March through the canonical sloppy chain state by state.

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

fn vp() -> StructTree {
    rb(vec![
        leaf(10, "(np\\s)/np"),
        leaf(11, "<>np\\(np/n)"),
        leaf(12, "n"),
    ])
}

fn run(label: &str, tree: StructTree, bound: usize) {
    let goal = parse_formula("s").unwrap();
    let outcome = prove(&Sequent::new(tree, goal), bound, &SearchLimits::default());
    println!("{label}: {} proofs (bound {bound})", outcome.proofs.len());
}

fn main() {
    // B: gary loves <gary> his code and bill <vp> dt at c=1
    run(
        "B",
        rb(vec![
            leaf(0, "np"),
            leaf(1, "(np\\s)/np"),
            StructTree::diamond(leaf(0, "np")),
            leaf(2, "<>np\\(np/n)"),
            leaf(3, "n"),
            leaf(4, "(s\\s)/s"),
            leaf(5, "np"),
            StructTree::diamond(vp()),
            leaf(6, "<>(np\\s)\\(np\\s)"),
        ]),
        1,
    );
    // C: S1 and bill <vp> dt at c=1
    run(
        "C",
        rb(vec![
            StructTree::hypothesis(parse_formula("s").unwrap()),
            leaf(4, "(s\\s)/s"),
            leaf(5, "np"),
            StructTree::diamond(vp()),
            leaf(6, "<>(np\\s)\\(np\\s)"),
        ]),
        1,
    );
}
