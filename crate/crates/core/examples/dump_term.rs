//! Show the first ellipsis reading's abstract term.

use typelogic::lambda::abstract_term;
use typelogic::prover::{prove, sentence_sequent, SearchLimits};
use typelogic::syntax::{parse_formula, Lexicon};

fn main() {
    let lexicon = Lexicon::parse(
        "alice\tnp\nbob\tnp\ndrinks\tnp\\s\nand\t(s\\s)/s\ndoes_too\t<>(np\\s)\\(np\\s)\n",
    )
    .unwrap();
    let goal = parse_formula("s").unwrap();
    let words = ["alice", "drinks", "and", "bob", "does_too"];
    let seqs = sentence_sequent(&words, &lexicon, &goal).unwrap();
    let outcome = prove(&seqs[0], 1, &SearchLimits::default());
    for (i, proof) in outcome.proofs.iter().enumerate() {
        match abstract_term(proof, &words) {
            Ok(term) => println!("#{i}: {term}"),
            Err(e) => println!("#{i}: ERROR {e}"),
        }
    }
}
