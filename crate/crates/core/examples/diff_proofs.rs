//! Diff two same-profile readings to find residual variant dimensions.

use typelogic::prover::{prove, sentence_sequent, SearchLimits};
use typelogic::syntax::{parse_formula, Lexicon};

fn main() {
    let lexicon = Lexicon::parse(concat!(
        "gary\tnp\nbill\tnp\ncode\tn\n",
        "loves\t(np\\s)/np\n",
        "his\t<>np\\(np/n)\n",
        "and\t(s\\s)/s\n",
        "does_too\t<>(np\\s)\\(np\\s)\n",
    ))
    .unwrap();
    let goal = parse_formula("s").unwrap();
    let words = ["gary", "loves", "his", "code", "and", "bill", "does_too"];
    let seqs = sentence_sequent(&words, &lexicon, &goal).unwrap();
    let mut limits = SearchLimits::default();
    limits.max_proofs = 24;
    let outcome = prove(&seqs[0], 3, &limits);
    for (i, p) in outcome.proofs.iter().enumerate().take(4) {
        println!("===== proof {i} =====");
        println!("{}", p.trace());
    }
}
