//! Dump contraction profiles of anaphora readings.

use typelogic::prover::{prove, sentence_sequent, Proof, Rule, SearchLimits};
use typelogic::syntax::{parse_formula, Lexicon};

fn rule_count(proof: &Proof, rule: Rule) -> usize {
    proof.premises().iter().map(|p| rule_count(p, rule)).sum::<usize>()
        + usize::from(proof.rule() == rule)
}

fn contract_sites(proof: &Proof, out: &mut Vec<String>) {
    if proof.rule() == Rule::Contract {
        // the copied group formula: conclusion site subtree
        if let Some(site) = proof.site() {
            if let Some(sub) = proof.conclusion().antecedent.subtree(site) {
                out.push(sub.formula().to_string());
            }
        }
    }
    for p in proof.premises() {
        contract_sites(p, out);
    }
}

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
    limits.max_proofs = 200;
    let outcome = prove(&seqs[0], 3, &limits);
    println!("{} proofs exhausted={}", outcome.proofs.len(), outcome.exhausted);
    for (i, p) in outcome.proofs.iter().enumerate() {
        let mut sites = Vec::new();
        contract_sites(p, &mut sites);
        println!(
            "#{i}: contracts={} moves={} sites={:?}",
            p.contractions(),
            rule_count(p, Rule::Move),
            sites
        );
    }
}
