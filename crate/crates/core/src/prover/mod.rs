//! Sequents, proof trees, and proof checking for the modal Lambek calculus
//! with controlled contraction, plus backward proof search under a
//! contraction bound.

mod search;

pub use search::{prove, ProveOutcome, SearchLimits};

#[cfg(feature = "search-trace")]
thread_local! {
    pub(crate) static NODE_COUNT: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::syntax::{Formula, Lexicon};

/// Antecedent structure: a binary `⊗`-tree over formula leaves, with `◇`
/// brackets around moved or copied constituents.
///
/// Leaves carry the originating word occurrence when they come from the
/// sentence; hypothesis leaves introduced during search carry none. Leaf
/// order equals sentence word order at the root sequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StructTree {
    Leaf {
        occurrence: Option<usize>,
        formula: Formula,
    },
    Tensor(Rc<StructTree>, Rc<StructTree>),
    Diamond(Rc<StructTree>),
}

/// Path into a [`StructTree`]: 0 descends left (or into a `◇`), 1 right.
pub type TreePath = Vec<u8>;

impl StructTree {
    pub fn word_leaf(occurrence: usize, formula: Formula) -> StructTree {
        StructTree::Leaf {
            occurrence: Some(occurrence),
            formula,
        }
    }

    /// Hypothesis leaf; top-level `⊗`/`◇` structure unfolds into tree nodes
    /// so later rules can address it.
    pub fn hypothesis(formula: Formula) -> StructTree {
        match formula {
            Formula::Tensor(l, r) => StructTree::tensor(
                StructTree::hypothesis(l.as_ref().clone()),
                StructTree::hypothesis(r.as_ref().clone()),
            ),
            Formula::Diamond(inner) => {
                StructTree::diamond(StructTree::hypothesis(inner.as_ref().clone()))
            }
            other => StructTree::Leaf {
                occurrence: None,
                formula: other,
            },
        }
    }

    pub fn tensor(l: StructTree, r: StructTree) -> StructTree {
        StructTree::Tensor(Rc::new(l), Rc::new(r))
    }

    pub fn diamond(inner: StructTree) -> StructTree {
        StructTree::Diamond(Rc::new(inner))
    }

    /// The formula image of the tree: `⊗` nodes become `⊗`, `◇` nodes `◇`.
    pub fn formula(&self) -> Formula {
        match self {
            StructTree::Leaf { formula, .. } => formula.clone(),
            StructTree::Tensor(l, r) => Formula::tensor(l.formula(), r.formula()),
            StructTree::Diamond(inner) => Formula::diamond(inner.formula()),
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&StructTree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a StructTree>) {
        match self {
            StructTree::Leaf { .. } => out.push(self),
            StructTree::Tensor(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
            StructTree::Diamond(inner) => inner.collect_leaves(out),
        }
    }

    pub fn subtree(&self, path: &[u8]) -> Option<&StructTree> {
        let mut cur = self;
        for step in path {
            cur = match (cur, step) {
                (StructTree::Tensor(l, _), 0) => l,
                (StructTree::Tensor(_, r), 1) => r,
                (StructTree::Diamond(inner), 0) => inner,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// A copy of the tree with the subtree at `path` replaced.
    pub fn replace(&self, path: &[u8], new: StructTree) -> StructTree {
        match path.split_first() {
            None => new,
            Some((step, rest)) => match (self, step) {
                (StructTree::Tensor(l, r), 0) => {
                    StructTree::Tensor(Rc::new(l.replace(rest, new)), Rc::clone(r))
                }
                (StructTree::Tensor(l, r), 1) => {
                    StructTree::Tensor(Rc::clone(l), Rc::new(r.replace(rest, new)))
                }
                (StructTree::Diamond(inner), 0) => {
                    StructTree::Diamond(Rc::new(inner.replace(rest, new)))
                }
                _ => panic!("invalid tree path"),
            },
        }
    }

    /// Occurrence-free copy, used as a search key: two antecedents that agree
    /// up to word identity behave identically under every rule.
    pub fn stripped(&self) -> StructTree {
        match self {
            StructTree::Leaf { formula, .. } => StructTree::Leaf {
                occurrence: None,
                formula: formula.clone(),
            },
            StructTree::Tensor(l, r) => StructTree::tensor(l.stripped(), r.stripped()),
            StructTree::Diamond(inner) => StructTree::diamond(inner.stripped()),
        }
    }
}

impl fmt::Display for StructTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructTree::Leaf { formula, .. } => write!(f, "{formula}"),
            StructTree::Tensor(l, r) => write!(f, "({l} . {r})"),
            StructTree::Diamond(inner) => write!(f, "<{inner}>"),
        }
    }
}

/// A sequent `antecedent → succedent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub antecedent: StructTree,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: StructTree, succedent: Formula) -> Sequent {
        Sequent {
            antecedent,
            succedent,
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.antecedent, self.succedent)
    }
}

/// Rule labels. Axiom and composition, the six residuation rules, the
/// structural postulates for reassociation, controlled copying and moving,
/// and the derived monotonicity rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom,
    Compose,
    ResUnder,
    ResOver,
    ResDia,
    UnResUnder,
    UnResOver,
    UnResDia,
    AssocL,
    AssocR,
    Contract,
    Move,
    Swap,
    MonoTensor,
    MonoUnder,
    MonoOver,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Axiom => "axiom",
            Rule::Compose => "compose",
            Rule::ResUnder => "res\\",
            Rule::ResOver => "res/",
            Rule::ResDia => "res<>",
            Rule::UnResUnder => "unres\\",
            Rule::UnResOver => "unres/",
            Rule::UnResDia => "unres<>",
            Rule::AssocL => "assoc-l",
            Rule::AssocR => "assoc-r",
            Rule::Contract => "contract",
            Rule::Move => "move",
            Rule::Swap => "swap",
            Rule::MonoTensor => "mono*",
            Rule::MonoUnder => "mono\\",
            Rule::MonoOver => "mono/",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct ProofNode {
    rule: Rule,
    premises: Vec<Proof>,
    conclusion: Sequent,
    /// For structural rules and elaborated application steps: the antecedent
    /// position the step rewrites.
    site: Option<TreePath>,
    /// The flat antecedent positions the step touches, used to canonicalise
    /// the order of independent steps during search.
    span: Option<(usize, usize)>,
    /// Contract nodes in this subtree, cached for bound accounting.
    contractions: usize,
}

/// A derivation tree. Each node instantiates the named rule schema; this is
/// checkable after the fact with [`check_proof`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proof(Rc<ProofNode>);

impl Proof {
    pub fn new(rule: Rule, premises: Vec<Proof>, conclusion: Sequent) -> Proof {
        Proof::with_site(rule, premises, conclusion, None)
    }

    pub fn with_site(
        rule: Rule,
        premises: Vec<Proof>,
        conclusion: Sequent,
        site: Option<TreePath>,
    ) -> Proof {
        Proof::with_metadata(rule, premises, conclusion, site, None)
    }

    pub(crate) fn with_metadata(
        rule: Rule,
        premises: Vec<Proof>,
        conclusion: Sequent,
        site: Option<TreePath>,
        span: Option<(usize, usize)>,
    ) -> Proof {
        #[cfg(feature = "search-trace")]
        NODE_COUNT.with(|c| c.set(c.get() + 1));
        let contractions = premises.iter().map(|p| p.contractions()).sum::<usize>()
            + usize::from(rule == Rule::Contract);
        Proof(Rc::new(ProofNode {
            rule,
            premises,
            conclusion,
            site,
            span,
            contractions,
        }))
    }

    pub fn rule(&self) -> Rule {
        self.0.rule
    }

    pub fn premises(&self) -> &[Proof] {
        &self.0.premises
    }

    pub fn conclusion(&self) -> &Sequent {
        &self.0.conclusion
    }

    pub fn site(&self) -> Option<&TreePath> {
        self.0.site.as_ref()
    }

    /// The flat span of the first positioned step on this proof's spine,
    /// looking through reassociation plumbing.
    pub(crate) fn leading_span(&self) -> Option<(usize, usize)> {
        let mut cur = self;
        loop {
            if cur.0.span.is_some() {
                return cur.0.span;
            }
            match cur.rule() {
                Rule::AssocL | Rule::AssocR => cur = &cur.0.premises[0],
                _ => return None,
            }
        }
    }

    /// Number of Contract nodes in the tree.
    pub fn contractions(&self) -> usize {
        self.0.contractions
    }

    /// Plain-text indented rule trace, one rule name and conclusion per line.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        self.trace_into(&mut out, 0);
        out
    }

    fn trace_into(&self, out: &mut String, depth: usize) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str(self.rule().name());
        out.push_str("  ");
        out.push_str(&self.conclusion().to_string());
        out.push('\n');
        for premise in self.premises() {
            premise.trace_into(out, depth + 1);
        }
    }
}

/// Why a proof failed validation, with the path to the offending node.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid {rule} node at proof path {path:?}: {msg}")]
pub struct ProofCheckError {
    pub rule: Rule,
    pub path: Vec<usize>,
    pub msg: String,
}

/// Validate every node against its rule schema, including the `◇`-guards on
/// contraction, moving and swapping. Comparison is at the formula level;
/// word occurrences never affect validity.
pub fn check_proof(proof: &Proof) -> bool {
    check_proof_report(proof).is_ok()
}

pub fn check_proof_report(proof: &Proof) -> Result<(), ProofCheckError> {
    let mut path = Vec::new();
    check_node(proof, &mut path)
}

fn fail(proof: &Proof, path: &[usize], msg: impl Into<String>) -> ProofCheckError {
    ProofCheckError {
        rule: proof.rule(),
        path: path.to_vec(),
        msg: msg.into(),
    }
}

fn check_node(proof: &Proof, path: &mut Vec<usize>) -> Result<(), ProofCheckError> {
    for (i, premise) in proof.premises().iter().enumerate() {
        path.push(i);
        check_node(premise, path)?;
        path.pop();
    }
    check_schema(proof).map_err(|msg| fail(proof, path, msg))
}

fn arity(proof: &Proof, n: usize) -> Result<(), String> {
    if proof.premises().len() != n {
        Err(format!(
            "expected {n} premises, found {}",
            proof.premises().len()
        ))
    } else {
        Ok(())
    }
}

fn check_schema(proof: &Proof) -> Result<(), String> {
    let concl = proof.conclusion();
    match proof.rule() {
        Rule::Axiom => {
            arity(proof, 0)?;
            if concl.antecedent.formula() != concl.succedent {
                return Err("axiom endpoints differ".to_string());
            }
            Ok(())
        }
        Rule::Compose => {
            arity(proof, 2)?;
            let f = proof.premises()[0].conclusion();
            let g = proof.premises()[1].conclusion();
            if f.succedent != g.antecedent.formula() {
                return Err("composition formulas do not meet".to_string());
            }
            if concl.antecedent.formula() != f.antecedent.formula()
                || concl.succedent != g.succedent
            {
                return Err("composite endpoints differ from conclusion".to_string());
            }
            Ok(())
        }
        Rule::ResUnder => {
            arity(proof, 1)?;
            let prem = proof.premises()[0].conclusion();
            let StructTree::Tensor(x, t) = &prem.antecedent else {
                return Err("premise antecedent is not a product".to_string());
            };
            let want = Formula::under(x.formula(), prem.succedent.clone());
            if concl.antecedent.formula() != t.formula() || concl.succedent != want {
                return Err("residuation endpoints differ".to_string());
            }
            Ok(())
        }
        Rule::ResOver => {
            arity(proof, 1)?;
            let prem = proof.premises()[0].conclusion();
            let StructTree::Tensor(t, y) = &prem.antecedent else {
                return Err("premise antecedent is not a product".to_string());
            };
            let want = Formula::over(prem.succedent.clone(), y.formula());
            if concl.antecedent.formula() != t.formula() || concl.succedent != want {
                return Err("residuation endpoints differ".to_string());
            }
            Ok(())
        }
        Rule::ResDia => {
            arity(proof, 1)?;
            let prem = proof.premises()[0].conclusion();
            let StructTree::Diamond(t) = &prem.antecedent else {
                return Err("premise antecedent is not <>-marked".to_string());
            };
            let want = Formula::box_(prem.succedent.clone());
            if concl.antecedent.formula() != t.formula() || concl.succedent != want {
                return Err("residuation endpoints differ".to_string());
            }
            Ok(())
        }
        Rule::UnResUnder => {
            arity(proof, 1)?;
            let prem = proof.premises()[0].conclusion();
            let StructTree::Tensor(x, y) = &concl.antecedent else {
                return Err("conclusion antecedent is not a product".to_string());
            };
            let want = Formula::under(x.formula(), concl.succedent.clone());
            if prem.antecedent.formula() != y.formula() || prem.succedent != want {
                return Err("inverse residuation premise differs".to_string());
            }
            Ok(())
        }
        Rule::UnResOver => {
            arity(proof, 1)?;
            let prem = proof.premises()[0].conclusion();
            let StructTree::Tensor(x, y) = &concl.antecedent else {
                return Err("conclusion antecedent is not a product".to_string());
            };
            let want = Formula::over(concl.succedent.clone(), y.formula());
            if prem.antecedent.formula() != x.formula() || prem.succedent != want {
                return Err("inverse residuation premise differs".to_string());
            }
            Ok(())
        }
        Rule::UnResDia => {
            arity(proof, 1)?;
            let prem = proof.premises()[0].conclusion();
            let StructTree::Diamond(t) = &concl.antecedent else {
                return Err("conclusion antecedent is not <>-marked".to_string());
            };
            let want = Formula::box_(concl.succedent.clone());
            if prem.antecedent.formula() != t.formula() || prem.succedent != want {
                return Err("inverse residuation premise differs".to_string());
            }
            Ok(())
        }
        Rule::AssocL | Rule::AssocR | Rule::Contract | Rule::Move | Rule::Swap => {
            arity(proof, 1)?;
            let prem = proof.premises()[0].conclusion();
            if prem.succedent != concl.succedent {
                return Err("structural rule changed the succedent".to_string());
            }
            if structural_site(proof.rule(), &concl.antecedent, &prem.antecedent).is_none() {
                return Err("no antecedent position matches the rule schema".to_string());
            }
            Ok(())
        }
        Rule::MonoTensor => {
            arity(proof, 2)?;
            let f = proof.premises()[0].conclusion();
            let g = proof.premises()[1].conclusion();
            let want_ant = Formula::tensor(f.antecedent.formula(), g.antecedent.formula());
            let want_succ = Formula::tensor(f.succedent.clone(), g.succedent.clone());
            if concl.antecedent.formula() != want_ant || concl.succedent != want_succ {
                return Err("parallel composite endpoints differ".to_string());
            }
            Ok(())
        }
        Rule::MonoUnder => {
            // from f : A -> B and g : C -> D conclude B\C -> A\D
            arity(proof, 2)?;
            let f = proof.premises()[0].conclusion();
            let g = proof.premises()[1].conclusion();
            let want_ant = Formula::under(f.succedent.clone(), g.antecedent.formula());
            let want_succ = Formula::under(f.antecedent.formula(), g.succedent.clone());
            if concl.antecedent.formula() != want_ant || concl.succedent != want_succ {
                return Err("monotonicity endpoints differ".to_string());
            }
            Ok(())
        }
        Rule::MonoOver => {
            // from f : A -> B and g : C -> D conclude A/D -> B/C
            arity(proof, 2)?;
            let f = proof.premises()[0].conclusion();
            let g = proof.premises()[1].conclusion();
            let want_ant = Formula::over(f.antecedent.formula(), g.succedent.clone());
            let want_succ = Formula::over(f.succedent.clone(), g.antecedent.formula());
            if concl.antecedent.formula() != want_ant || concl.succedent != want_succ {
                return Err("monotonicity endpoints differ".to_string());
            }
            Ok(())
        }
    }
}

/// Find a position where `premise` is `conclusion` rewritten by the given
/// structural rule, comparing at the formula level.
pub(crate) fn structural_site(
    rule: Rule,
    conclusion: &StructTree,
    premise: &StructTree,
) -> Option<TreePath> {
    let premise_form = premise.formula();
    let mut found = None;
    visit_positions(conclusion, &mut Vec::new(), &mut |path, sub| {
        if found.is_some() {
            return;
        }
        if let Some(rewritten) = rewrite_structural(rule, sub) {
            // formula-level: the premise must be the conclusion with this
            // site rewritten, everything else untouched
            if conclusion.replace(path, rewritten).formula() == premise_form {
                found = Some(path.to_vec());
            }
        }
    });
    found
}

/// The premise-side shape produced by applying a structural rule backward at
/// a subtree, when the subtree matches the rule's conclusion pattern.
pub(crate) fn rewrite_structural(rule: Rule, sub: &StructTree) -> Option<StructTree> {
    match rule {
        Rule::Contract => Some(StructTree::Tensor(
            Rc::new(StructTree::Diamond(Rc::new(sub.clone()))),
            Rc::new(sub.clone()),
        )),
        Rule::Move => {
            // conclusion (<>B . A) . C  =>  premise A . (<>B . C)
            let StructTree::Tensor(left, c) = sub else {
                return None;
            };
            let StructTree::Tensor(dia, a) = left.as_ref() else {
                return None;
            };
            let StructTree::Diamond(_) = dia.as_ref() else {
                return None;
            };
            Some(StructTree::Tensor(
                Rc::clone(a),
                Rc::new(StructTree::Tensor(Rc::clone(dia), Rc::clone(c))),
            ))
        }
        Rule::Swap => {
            // conclusion <>B . (<>A . C)  =>  premise <>A . (<>B . C)
            let StructTree::Tensor(dia_b, right) = sub else {
                return None;
            };
            let StructTree::Diamond(_) = dia_b.as_ref() else {
                return None;
            };
            let StructTree::Tensor(dia_a, c) = right.as_ref() else {
                return None;
            };
            let StructTree::Diamond(_) = dia_a.as_ref() else {
                return None;
            };
            Some(StructTree::Tensor(
                Rc::clone(dia_a),
                Rc::new(StructTree::Tensor(Rc::clone(dia_b), Rc::clone(c))),
            ))
        }
        Rule::AssocL => {
            // conclusion A . (B . C)  =>  premise (A . B) . C
            let StructTree::Tensor(a, right) = sub else {
                return None;
            };
            let StructTree::Tensor(b, c) = right.as_ref() else {
                return None;
            };
            Some(StructTree::Tensor(
                Rc::new(StructTree::Tensor(Rc::clone(a), Rc::clone(b))),
                Rc::clone(c),
            ))
        }
        Rule::AssocR => {
            // conclusion (A . B) . C  =>  premise A . (B . C)
            let StructTree::Tensor(left, c) = sub else {
                return None;
            };
            let StructTree::Tensor(a, b) = left.as_ref() else {
                return None;
            };
            Some(StructTree::Tensor(
                Rc::clone(a),
                Rc::new(StructTree::Tensor(Rc::clone(b), Rc::clone(c))),
            ))
        }
        _ => None,
    }
}

/// Visit every position in the antecedent structure, pre-order, descending
/// into `◇` brackets as well.
pub(crate) fn visit_positions(
    tree: &StructTree,
    path: &mut TreePath,
    f: &mut impl FnMut(&TreePath, &StructTree),
) {
    f(path, tree);
    match tree {
        StructTree::Tensor(l, r) => {
            path.push(0);
            visit_positions(l, path, f);
            path.pop();
            path.push(1);
            visit_positions(r, path, f);
            path.pop();
        }
        StructTree::Diamond(inner) => {
            path.push(0);
            visit_positions(inner, path, f);
            path.pop();
        }
        StructTree::Leaf { .. } => {}
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProverError {
    #[error("unknown word `{0}`")]
    UnknownWord(String),
}

/// One sequent per combination of lexical choices, the antecedent being the
/// right-branching product of the chosen formulas.
pub fn sentence_sequent(
    words: &[&str],
    lexicon: &Lexicon,
    goal: &Formula,
) -> Result<Vec<Sequent>, ProverError> {
    let choices: Vec<&[Formula]> = words
        .iter()
        .map(|w| {
            lexicon
                .lookup(w)
                .ok_or_else(|| ProverError::UnknownWord(w.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let mut sequents = Vec::new();
    let mut pick = vec![0usize; words.len()];
    loop {
        let leaves: Vec<StructTree> = pick
            .iter()
            .enumerate()
            .map(|(i, &k)| StructTree::word_leaf(i, choices[i][k].clone()))
            .collect();
        let antecedent = right_branching(leaves);
        sequents.push(Sequent::new(antecedent, goal.clone()));
        // advance the odometer, last word fastest
        let mut axis = words.len();
        loop {
            if axis == 0 {
                return Ok(sequents);
            }
            axis -= 1;
            pick[axis] += 1;
            if pick[axis] < choices[axis].len() {
                break;
            }
            pick[axis] = 0;
        }
    }
}

fn right_branching(mut leaves: Vec<StructTree>) -> StructTree {
    assert!(!leaves.is_empty(), "sentence must be non-empty");
    let mut tree = leaves.pop().unwrap();
    while let Some(leaf) = leaves.pop() {
        tree = StructTree::tensor(leaf, tree);
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn lex() -> Lexicon {
        Lexicon::parse(
            "alice\tnp\nbob\tnp\ndrinks\tnp\\s\nand\t(s\\s)/s\ndoes_too\t<>(np\\s)\\(np\\s)\n",
        )
        .unwrap()
    }

    #[test]
    fn sentence_sequent_builds_right_branching_tree() {
        let goal = parse_formula("s").unwrap();
        let seqs = sentence_sequent(&["alice", "drinks"], &lex(), &goal).unwrap();
        assert_eq!(seqs.len(), 1);
        assert_eq!(seqs[0].to_string(), "(np . np\\s) -> s");

        let seqs = sentence_sequent(
            &["alice", "drinks", "and", "bob", "does_too"],
            &lex(),
            &goal,
        )
        .unwrap();
        assert_eq!(seqs.len(), 1);
        assert_eq!(seqs[0].antecedent.leaves().len(), 5);
    }

    #[test]
    fn sentence_sequent_takes_lexical_products() {
        let mut lexicon = lex();
        lexicon.add("drinks", parse_formula("(np\\s)/np").unwrap());
        let goal = parse_formula("s").unwrap();
        let seqs = sentence_sequent(&["alice", "drinks", "bob"], &lexicon, &goal).unwrap();
        assert_eq!(seqs.len(), 2);
    }

    #[test]
    fn sentence_sequent_rejects_unknown_words() {
        let goal = parse_formula("s").unwrap();
        let err = sentence_sequent(&["alice", "flies"], &lex(), &goal).unwrap_err();
        assert_eq!(err, ProverError::UnknownWord("flies".to_string()));
    }

    #[test]
    fn axiom_checks_endpoints() {
        let np = parse_formula("np").unwrap();
        let good = Proof::new(
            Rule::Axiom,
            vec![],
            Sequent::new(StructTree::word_leaf(0, np.clone()), np.clone()),
        );
        assert!(check_proof(&good));
        let bad = Proof::new(
            Rule::Axiom,
            vec![],
            Sequent::new(StructTree::word_leaf(0, np), parse_formula("s").unwrap()),
        );
        assert!(!check_proof(&bad));
    }

    #[test]
    fn contract_requires_diamond_copy() {
        let vp = parse_formula("np\\s").unwrap();
        let s = parse_formula("s").unwrap();
        let np = parse_formula("np").unwrap();
        let copy_ok = StructTree::tensor(
            StructTree::diamond(StructTree::word_leaf(1, vp.clone())),
            StructTree::word_leaf(1, vp.clone()),
        );
        // stand-in premise: its own shape is what Contract validates against
        let premise_ok = Proof::new(
            Rule::Axiom,
            vec![],
            Sequent::new(
                StructTree::tensor(StructTree::word_leaf(0, np.clone()), copy_ok),
                parse_formula("np*(<>(np\\s)*(np\\s))").unwrap(),
            ),
        );
        let concl = Sequent::new(
            StructTree::tensor(
                StructTree::word_leaf(0, np.clone()),
                StructTree::word_leaf(1, vp.clone()),
            ),
            parse_formula("np*(<>(np\\s)*(np\\s))").unwrap(),
        );
        // succedents must agree for a structural rule; reuse the premise's
        let contract = Proof::new(Rule::Contract, vec![premise_ok], concl);
        check_proof_report(&contract).unwrap();

        // copying without the <> mark violates the guard
        let copy_bad = StructTree::tensor(
            StructTree::word_leaf(1, vp.clone()),
            StructTree::word_leaf(1, vp.clone()),
        );
        let premise_bad = Proof::new(
            Rule::Axiom,
            vec![],
            Sequent::new(
                StructTree::tensor(StructTree::word_leaf(0, np.clone()), copy_bad),
                parse_formula("np*((np\\s)*(np\\s))").unwrap(),
            ),
        );
        let concl_bad = Sequent::new(
            StructTree::tensor(StructTree::word_leaf(0, np), StructTree::word_leaf(1, vp)),
            parse_formula("np*((np\\s)*(np\\s))").unwrap(),
        );
        let bad = Proof::new(Rule::Contract, vec![premise_bad], concl_bad);
        let err = check_proof_report(&bad).unwrap_err();
        assert_eq!(err.rule, Rule::Contract);
        let _ = s;
    }

    #[test]
    fn hypothesis_unfolds_products_and_diamonds() {
        let f = parse_formula("<>(np*s)").unwrap();
        let tree = StructTree::hypothesis(f.clone());
        assert!(matches!(tree, StructTree::Diamond(_)));
        assert_eq!(tree.formula(), f);
        assert_eq!(tree.leaves().len(), 2);
    }
}
