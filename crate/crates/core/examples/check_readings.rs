//! Evaluate every anaphora reading under both backends and compare against
//! the closed forms.

use typelogic::embeddings::EmbeddingStore;
use typelogic::frobenius::{compile_sentence, evaluate_with_store, FrobeniusLexicon};
use typelogic::lambda::{evaluate_reading, Homomorphism, SemLexicon};
use typelogic::prover::{prove, sentence_sequent, SearchLimits};
use typelogic::syntax::{parse_formula, Lexicon, SpaceAssignment};

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
    let outcome = prove(&seqs[0], 3, &SearchLimits::default());
    println!("{} readings", outcome.proofs.len());

    let a = SpaceAssignment::new().with("np", 2).with("s", 2).with("n", 2);
    let store = EmbeddingStore::seeded(42);
    let gary = store.get("gary", &[2]);
    let bill = store.get("bill", &[2]);
    let code = store.get("code", &[2]);
    let loves_f = store.get("loves", &[2, 2, 2]); // frobenius: np s np
    let loves_l = store.get("loves", &[2, 2, 2]); // lambda: s np np (same here)

    // frobenius closed form: out[j] = sum_i g_i b_i c_i loves[i,j,i]
    let frob_want: Vec<f64> = (0..2)
        .map(|j| {
            (0..2)
                .map(|i| {
                    gary.data()[i] * bill.data()[i] * code.data()[i]
                        * loves_f.data()[(i * 2 + j) * 2 + i]
                })
                .sum()
        })
        .collect();
    // lambda strict: (g x1 loves x2 (g.c)) (.) (b x1 loves x2 (g.c))
    // lambda sloppy: (g x1 loves x2 (g.c)) (.) (b x1 loves x2 (b.c))
    let clause = |subj: &[f64], poss: &[f64]| -> Vec<f64> {
        (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| {
                        (0..2)
                            .map(|k| {
                                loves_l.data()[(i * 2 + j) * 2 + k]
                                    * poss[k] * code.data()[k] / code.data()[k]
                            })
                            .sum::<f64>()
                    })
                    .sum::<f64>()
            })
            .collect()
    };
    let _ = clause;
    let clause = |subj: &[f64], poss: &[f64]| -> Vec<f64> {
        // out[i] = sum_j loves[i,j,k-summed] ... compute (loves x2 (poss.code)) x1 subj
        let obj: Vec<f64> = (0..2).map(|k| poss[k] * code.data()[k]).collect();
        let mat: Vec<f64> = (0..4)
            .map(|ij| (0..2).map(|k| loves_l.data()[ij * 2 + k] * obj[k]).sum())
            .collect();
        (0..2)
            .map(|i| (0..2).map(|j| mat[i * 2 + j] * subj[j]).sum())
            .collect()
    };
    let strict: Vec<f64> = {
        let c1 = clause(gary.data(), gary.data());
        let c2 = clause(bill.data(), gary.data());
        (0..2).map(|j| c1[j] * c2[j]).collect()
    };
    let sloppy: Vec<f64> = {
        let c1 = clause(gary.data(), gary.data());
        let c2 = clause(bill.data(), bill.data());
        (0..2).map(|j| c1[j] * c2[j]).collect()
    };

    let frob_lex = FrobeniusLexicon;
    let h1 = SemLexicon::new(Homomorphism::Contraction, a.clone());
    let close = |u: &[f64], v: &[f64]| -> bool {
        u.iter().zip(v).all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-30))
    };
    let mut frob_match = 0;
    let mut h1_strict = 0;
    let mut h1_sloppy = 0;
    let mut h1_other = 0;
    for (i, proof) in outcome.proofs.iter().enumerate() {
        let expr = compile_sentence(proof, &words, &a, &frob_lex).unwrap();
        let f_out = evaluate_with_store(&expr, &store).unwrap();
        let fm = close(f_out.data(), &frob_want);
        if fm {
            frob_match += 1;
        }
        let (_term, l_out) = evaluate_reading(proof, &words, &h1, &store).unwrap();
        let tag = if close(l_out.data(), &strict) {
            h1_strict += 1;
            "strict"
        } else if close(l_out.data(), &sloppy) {
            h1_sloppy += 1;
            "sloppy"
        } else {
            h1_other += 1;
            "OTHER"
        };
        println!("#{i}: frob-match={fm} h1={tag}");
    }
    println!("frob matching closed form: {frob_match}/{}", outcome.proofs.len());
    println!("h1: strict {h1_strict}, sloppy {h1_sloppy}, other {h1_other}");
}
