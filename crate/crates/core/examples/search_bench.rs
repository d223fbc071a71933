//! Quick timing probe for the proof search on the regression sentences.

use std::time::Instant;

use typelogic::prover::{prove, sentence_sequent, SearchLimits};
use typelogic::syntax::{parse_formula, Lexicon};

fn main() {
    let lexicon = Lexicon::parse(concat!(
        "alice\tnp\n",
        "bob\tnp\n",
        "gary\tnp\n",
        "bill\tnp\n",
        "beer\tnp\n",
        "code\tn\n",
        "drinks\tnp\\s\n",
        "loves\t(np\\s)/np\n",
        "his\t<>np\\(np/n)\n",
        "and\t(s\\s)/s\n",
        "does_too\t<>(np\\s)\\(np\\s)\n",
    ))
    .unwrap();
    let goal = parse_formula("s").unwrap();
    let cases: [(&[&str], usize); 4] = [
        (&["alice", "drinks"], 0),
        (&["alice", "drinks", "and", "bob", "does_too"], 1),
        (&["gary", "loves", "beer", "and", "bill", "does_too"], 1),
        (
            &["gary", "loves", "his", "code", "and", "bill", "does_too"],
            3,
        ),
    ];
    for (words, bound) in cases {
        let seqs = sentence_sequent(words, &lexicon, &goal).unwrap();
        let start = Instant::now();
        let outcome = prove(&seqs[0], bound, &SearchLimits::default());
        println!(
            "{:?} bound {}: {} proofs, exhausted={}, {:?}",
            words.join(" "),
            bound,
            outcome.proofs.len(),
            outcome.exhausted,
            start.elapsed()
        );
    }
}
