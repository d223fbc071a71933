//! Drive the sloppy reading's intermediate states directly.

use typelogic::prover::{prove, Proof, Rule, Sequent, SearchLimits, StructTree};
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

fn count(proof: &Proof, rule: Rule) -> usize {
    proof.premises().iter().map(|p| count(p, rule)).sum::<usize>()
        + usize::from(proof.rule() == rule)
}

fn main() {
    let vp = vec![leaf(1, "(np\\s)/np"), leaf(2, "<>np\\(np/n)"), leaf(3, "n")];
    // state A: copy parked before does_too
    let tree = rb(vec![
        leaf(0, "np"),
        leaf(1, "(np\\s)/np"),
        leaf(2, "<>np\\(np/n)"),
        leaf(3, "n"),
        leaf(4, "(s\\s)/s"),
        leaf(5, "np"),
        StructTree::diamond(rb(vp.clone())),
        leaf(6, "<>(np\\s)\\(np\\s)"),
    ]);
    let goal = parse_formula("s").unwrap();
    let outcome = prove(&Sequent::new(tree, goal.clone()), 2, &SearchLimits::default());
    println!("state A at bound 2: {} proofs", outcome.proofs.len());
    for p in &outcome.proofs {
        println!("  contracts={}", p.contractions());
    }
}

#[allow(dead_code)]
fn extra() {}
