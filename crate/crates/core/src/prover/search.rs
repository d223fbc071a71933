//! Backward proof search. The searcher works on antecedents flattened
//! modulo associativity — reassociation is unrestricted in this calculus,
//! so bracketing never separates readings — while `◇` brackets stay rigid.
//! Found derivations are emitted as ordinary binary proof trees with
//! canonical reassociation chains spliced in where a rule needs a
//! particular bracketing.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::{Proof, Rule, Sequent, StructTree, TreePath};
use crate::syntax::Formula;

/// Caps that keep the search finite beyond the contraction bound.
#[derive(Debug, Clone)]
pub struct SearchLimits {
    /// Copy/move/swap applications allowed along one branch. Reassociation
    /// is canonical plumbing and does not count against the cap.
    pub structural_depth: usize,
    /// Search-state expansions before giving up with the exhaustion flag.
    pub max_steps: u64,
    /// Proofs kept per subgoal and overall.
    pub max_proofs: usize,
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits {
            structural_depth: 24,
            max_steps: 200_000,
            max_proofs: 64,
        }
    }
}

/// Proofs found within the limits. `exhausted` reports that a cap cut the
/// enumeration short somewhere; hitting a cap is not an error.
#[derive(Debug, Clone)]
pub struct ProveOutcome {
    pub proofs: Vec<Proof>,
    pub exhausted: bool,
}

/// All proofs of the sequent with at most `contraction_bound` contractions,
/// up to the limits, deduplicated up to rule-tree equality. Deterministic:
/// identical inputs yield identical lists in identical order.
pub fn prove(sequent: &Sequent, contraction_bound: usize, limits: &SearchLimits) -> ProveOutcome {
    let mut searcher = Searcher {
        limits,
        table: HashMap::new(),
        steps: 0,
        exhausted: false,
    };
    let seq = flatten(&sequent.antecedent);
    let solved = searcher.solve(
        &seq,
        &sequent.succedent,
        contraction_bound,
        limits.structural_depth,
    );
    #[cfg(feature = "search-trace")]
    {
        eprintln!(
            "search: {} steps, {} table entries, {} proofs",
            searcher.steps,
            searcher.table.len(),
            solved.len()
        );
        TIMINGS.with(|t| {
            let t = t.borrow();
            eprintln!(
                "  assoc_adapt {:?} match_succ {:?} feasible {:?} canonical {:?} serve {:?} calls {:?} nodes {}",
                t[1], t[2], t[3], t[4], t[5], t[7],
                super::NODE_COUNT.with(|c| c.get())
            );
        });
    }
    // found proofs conclude at the canonical bracketing; re-bracket to the
    // antecedent actually asked about
    let canonical = canonical_tree(&seq);
    let proofs = solved
        .iter()
        .map(|p| assoc_adapt(&sequent.antecedent, &canonical, &sequent.succedent, p.clone()))
        .collect();
    ProveOutcome {
        proofs,
        exhausted: searcher.exhausted,
    }
}

/// Antecedent modulo associativity: a sequence of leaves and rigid `◇`
/// groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum FlatItem {
    Leaf {
        occurrence: Option<usize>,
        formula: Formula,
    },
    Diamond(FlatSeq),
}

type FlatSeq = Vec<FlatItem>;

impl FlatItem {
    fn formula(&self) -> Formula {
        match self {
            FlatItem::Leaf { formula, .. } => formula.clone(),
            FlatItem::Diamond(inner) => Formula::diamond(seq_formula(inner)),
        }
    }

    fn stripped(&self) -> FlatItem {
        match self {
            FlatItem::Leaf { formula, .. } => FlatItem::Leaf {
                occurrence: None,
                formula: formula.clone(),
            },
            FlatItem::Diamond(inner) => FlatItem::Diamond(strip_seq(inner)),
        }
    }

    fn tree(&self) -> StructTree {
        match self {
            FlatItem::Leaf {
                occurrence,
                formula,
            } => StructTree::Leaf {
                occurrence: *occurrence,
                formula: formula.clone(),
            },
            FlatItem::Diamond(inner) => StructTree::diamond(canonical_tree(inner)),
        }
    }
}

fn flatten(tree: &StructTree) -> FlatSeq {
    let mut out = Vec::new();
    flatten_into(tree, &mut out);
    out
}

fn flatten_into(tree: &StructTree, out: &mut FlatSeq) {
    match tree {
        StructTree::Leaf {
            occurrence,
            formula,
        } => out.push(FlatItem::Leaf {
            occurrence: *occurrence,
            formula: formula.clone(),
        }),
        StructTree::Tensor(l, r) => {
            flatten_into(l, out);
            flatten_into(r, out);
        }
        StructTree::Diamond(inner) => out.push(FlatItem::Diamond(flatten(inner))),
    }
}

fn strip_seq(seq: &FlatSeq) -> FlatSeq {
    seq.iter().map(FlatItem::stripped).collect()
}

/// Right-branching canonical bracketing of a sequence.
fn canonical_tree(seq: &FlatSeq) -> StructTree {
    #[cfg(feature = "search-trace")]
    let _t = Timer::new(4);
    rb_trees(seq.iter().map(FlatItem::tree).collect())
}

fn rb_trees(mut trees: Vec<StructTree>) -> StructTree {
    assert!(!trees.is_empty(), "empty antecedent");
    let mut out = trees.pop().unwrap();
    while let Some(t) = trees.pop() {
        out = StructTree::tensor(t, out);
    }
    out
}

fn seq_formula(seq: &FlatSeq) -> Formula {
    let mut iter = seq.iter().rev();
    let mut out = iter.next().expect("empty antecedent").formula();
    for item in iter {
        out = Formula::tensor(item.formula(), out);
    }
    out
}

type StateKey = (FlatSeq, Formula);

/// Everything the searcher knows about one `(antecedent, succedent)` state:
/// whether it sits on the current path, and solved results per remaining
/// contraction budget.
#[derive(Default)]
struct StateEntry {
    on_path: bool,
    results: Vec<(usize, Rc<Vec<Proof>>)>,
}

#[cfg(feature = "search-trace")]
thread_local! {
    static TIMINGS: std::cell::RefCell<[std::time::Duration; 8]> =
        std::cell::RefCell::new([std::time::Duration::ZERO; 8]);
}

#[cfg(feature = "search-trace")]
struct Timer {
    slot: usize,
    start: std::time::Instant,
}

#[cfg(feature = "search-trace")]
impl Timer {
    fn new(slot: usize) -> Timer {
        Timer { slot, start: std::time::Instant::now() }
    }
}

#[cfg(feature = "search-trace")]
impl Drop for Timer {
    fn drop(&mut self) {
        let elapsed = self.start.elapsed();
        TIMINGS.with(|t| t.borrow_mut()[self.slot] += elapsed);
    }
}

struct Searcher<'a> {
    limits: &'a SearchLimits,
    /// Per-state memo keyed on the occurrence-stripped flat antecedent and
    /// the succedent, holding path membership and solved results per
    /// contraction budget. The remaining structural depth is deliberately
    /// not part of the key: the cap bounds exploration, and a subgoal
    /// solved once under the depth it first had is not re-expanded more
    /// deeply later. Per-invocation.
    table: HashMap<StateKey, Rc<std::cell::RefCell<StateEntry>>>,
    steps: u64,
    exhausted: bool,
}

impl Searcher<'_> {
    /// Proofs concluding at `(canonical_tree(seq), succ)`.
    fn solve(&mut self, seq: &FlatSeq, succ: &Formula, c_left: usize, s_left: usize) -> Rc<Vec<Proof>> {
        #[cfg(feature = "search-trace")]
        TIMINGS.with(|t| t.borrow_mut()[7] += std::time::Duration::from_nanos(1));
        let key: StateKey = (strip_seq(seq), succ.clone());
        let cell = Rc::clone(self.table.entry(key).or_default());
        {
            let entry = cell.borrow();
            // re-deriving a sequent already on the path is a loop
            if entry.on_path {
                return Rc::new(Vec::new());
            }
            if let Some((_, cached)) = entry.results.iter().find(|(c, _)| *c == c_left) {
                return Rc::clone(cached);
            }
        }
        if !feasible(seq, succ, c_left) {
            let empty: Rc<Vec<Proof>> = Rc::new(Vec::new());
            cell.borrow_mut().results.push((c_left, Rc::clone(&empty)));
            return empty;
        }
        if self.steps >= self.limits.max_steps {
            self.exhausted = true;
            return Rc::new(Vec::new());
        }
        self.steps += 1;

        cell.borrow_mut().on_path = true;
        let mut found: Vec<Proof> = Vec::new();
        self.expand(seq, succ, c_left, s_left, &mut found);
        let result = Rc::new(found);
        {
            let mut entry = cell.borrow_mut();
            entry.on_path = false;
            entry.results.push((c_left, Rc::clone(&result)));
        }
        result
    }

    // Within one expansion every enumerated move is distinct, so pushes
    // need no deduplication.
    fn push(&mut self, found: &mut Vec<Proof>, proof: Proof) -> bool {
        if found.len() >= self.limits.max_proofs {
            self.exhausted = true;
            return false;
        }
        found.push(proof);
        true
    }

    fn expand(
        &mut self,
        seq: &FlatSeq,
        succ: &Formula,
        c_left: usize,
        s_left: usize,
        found: &mut Vec<Proof>,
    ) {
        let canonical = canonical_tree(seq);
        let here = Sequent::new(canonical.clone(), succ.clone());

        // axiom, modulo bracketing; identity proofs subsume any expansion of
        // the same endpoints
        if let Some(matched) = match_succ_tree(succ, seq) {
            let axiom = Proof::new(Rule::Axiom, vec![], Sequent::new(matched.clone(), succ.clone()));
            self.push(found, assoc_adapt(&canonical, &matched, succ, axiom));
            return;
        }

        // Residuation is a bijection on derivations, so a complex succedent
        // residuates eagerly and exclusively: every reading of the original
        // sequent is the image of a reading of the residuated one.
        match succ {
            Formula::Under(a, b) => {
                let mut goal = flatten(&StructTree::hypothesis((**a).clone()));
                goal.extend(seq.iter().cloned());
                let premise_tree =
                    StructTree::tensor(StructTree::hypothesis((**a).clone()), canonical.clone());
                for sub in self.solve(&goal, b, c_left, s_left).as_ref().clone() {
                    let adapted = assoc_adapt(&premise_tree, &canonical_tree(&goal), b, sub);
                    if !self.push(found, Proof::new(Rule::ResUnder, vec![adapted], here.clone()))
                    {
                        return;
                    }
                }
                return;
            }
            Formula::Over(b, a) => {
                let mut goal = seq.clone();
                goal.extend(flatten(&StructTree::hypothesis((**a).clone())));
                let premise_tree =
                    StructTree::tensor(canonical.clone(), StructTree::hypothesis((**a).clone()));
                for sub in self.solve(&goal, b, c_left, s_left).as_ref().clone() {
                    let adapted = assoc_adapt(&premise_tree, &canonical_tree(&goal), b, sub);
                    if !self.push(found, Proof::new(Rule::ResOver, vec![adapted], here.clone()))
                    {
                        return;
                    }
                }
                return;
            }
            Formula::Box_(b) => {
                let goal = vec![FlatItem::Diamond(seq.clone())];
                for sub in self.solve(&goal, b, c_left, s_left).as_ref().clone() {
                    if !self.push(found, Proof::new(Rule::ResDia, vec![sub], here.clone())) {
                        return;
                    }
                }
                return;
            }
            _ => {}
        }

        // slash applications anywhere in the sequence
        if !self.applications(seq, succ, c_left, s_left, &canonical, &here, found) {
            return;
        }

        // decomposition of the antecedent
        if seq.len() == 1 {
            if let FlatItem::Diamond(inner) = &seq[0] {
                let boxed = Formula::box_(succ.clone());
                for sub in self.solve(inner, &boxed, c_left, s_left).as_ref().clone() {
                    if !self.push(found, Proof::new(Rule::UnResDia, vec![sub], here.clone()))
                    {
                        return;
                    }
                }
                // derived monotonicity for <>: from T -> B conclude <>T -> <>B
                if let Formula::Diamond(b) = succ {
                    if seq_formula(inner) != **b {
                        for sub in self.solve(inner, b, c_left, s_left).as_ref().clone() {
                            let proof = diamond_mono(&canonical_tree(inner), b, sub, &here);
                            if !self.push(found, proof) {
                                return;
                            }
                        }
                    }
                }
            }
        } else {
            // Inverse residuation at a split. Under the eager-residuation
            // discipline its subgoal could only ever close by an axiom
            // (anything else residuates straight back into this sequent),
            // so check for that axiom directly instead of recursing.
            for split in 1..seq.len() {
                let prefix = &seq[..split];
                let suffix = &seq[split..];
                let prefix_tree = rb_trees(prefix.iter().map(FlatItem::tree).collect());
                let suffix_tree = rb_trees(suffix.iter().map(FlatItem::tree).collect());

                let under = Formula::under(prefix_tree.formula(), succ.clone());
                if let Some(matched) = match_succ_tree(&under, suffix) {
                    let axiom =
                        Proof::new(Rule::Axiom, vec![], Sequent::new(matched.clone(), under));
                    let split_tree = StructTree::tensor(prefix_tree.clone(), matched);
                    let node = Proof::new(
                        Rule::UnResUnder,
                        vec![axiom],
                        Sequent::new(split_tree.clone(), succ.clone()),
                    );
                    let adapted = assoc_adapt(&canonical, &split_tree, succ, node);
                    if !self.push(found, adapted) {
                        return;
                    }
                }
                let over = Formula::over(succ.clone(), suffix_tree.formula());
                if let Some(matched) = match_succ_tree(&over, prefix) {
                    let axiom =
                        Proof::new(Rule::Axiom, vec![], Sequent::new(matched.clone(), over));
                    let split_tree = StructTree::tensor(matched, suffix_tree.clone());
                    let node = Proof::new(
                        Rule::UnResOver,
                        vec![axiom],
                        Sequent::new(split_tree.clone(), succ.clone()),
                    );
                    let adapted = assoc_adapt(&canonical, &split_tree, succ, node);
                    if !self.push(found, adapted) {
                        return;
                    }
                }
            }
        }

        // structural rules: copying and moving under the caps
        if s_left == 0 {
            return;
        }
        // A `◇`-marked constituent is only ever consumed by a leaf taking a
        // `◇`-argument somewhere to its right, unless the goal formula
        // itself mentions `◇`. In the directed case, contraction fuses with
        // the rightward transport of the fresh copy to a consumer position;
        // a copy never idles between consumers, which any derivation can be
        // normalised to because moving commutes with unrelated steps.
        let undirected = formula_has_diamond(succ);
        if undirected {
            self.undirected_structural(seq, succ, c_left, s_left, &canonical, found);
            return;
        }
        if c_left == 0 {
            return;
        }
        let consumer_args = consumer_arguments(seq);
        if consumer_args.is_empty() {
            return;
        }
        for start in 0..seq.len() {
            for end in (start + 1)..=seq.len() {
                let group = &seq[start..end];
                if !copy_can_serve(group, &consumer_args, c_left - 1) {
                    continue;
                }
                // the state right after copying: the marked copy sits at
                // `start`, immediately left of the original group
                let mut copied = seq[..start].to_vec();
                copied.push(FlatItem::Diamond(group.to_vec()));
                copied.extend_from_slice(&seq[start..]);
                for target in consumer_leaf_positions(&copied) {
                    if target <= start {
                        continue;
                    }
                    let moves = target - 1 - start;
                    if 1 + moves > s_left {
                        continue;
                    }
                    if !self.contract_and_transport(
                        seq, &copied, start, moves, succ, c_left, s_left, &canonical, found,
                    ) {
                        return;
                    }
                }
            }
        }
    }

    /// Copy the group whose `◇`-marked duplicate sits at `from` in `copied`,
    /// then emit `moves` rightward transport steps, solving the transported
    /// state.
    #[allow(clippy::too_many_arguments)]
    fn contract_and_transport(
        &mut self,
        seq: &FlatSeq,
        copied: &FlatSeq,
        from: usize,
        moves: usize,
        succ: &Formula,
        c_left: usize,
        s_left: usize,
        canonical: &StructTree,
        found: &mut Vec<Proof>,
    ) -> bool {
        // the flat states the copy passes through
        let mut states = vec![copied.clone()];
        for step in 0..moves {
            let mut next = states[step].clone();
            next.swap(from + step, from + step + 1);
            states.push(next);
        }
        let final_seq = states.last().unwrap();
        let subs = self
            .solve(final_seq, succ, c_left - 1, s_left - 1 - moves)
            .as_ref()
            .clone();
        if subs.is_empty() {
            return true;
        }
        for sub in subs {
            // canonical order: a continuation step entirely left of the copy
            // site commutes with the whole copy-and-transport
            if let Some((_, hi)) = sub.leading_span() {
                if hi <= from {
                    continue;
                }
            }
            let mut proof = sub;
            // wrap the transport chain, last step innermost
            for step in (0..moves).rev() {
                let state = &states[step];
                let (source, premise_shape) = move_shapes(state, from + step);
                let current = proof.conclusion().antecedent.clone();
                proof = assoc_adapt(&premise_shape, &current, succ, proof);
                proof = Proof::with_site(
                    Rule::Move,
                    vec![proof],
                    Sequent::new(source, succ.clone()),
                    Some(vec![1; from + step]),
                );
            }
            // the contraction itself
            let (contract_source, contract_premise) = contract_shapes(seq, copied, from);
            let current = proof.conclusion().antecedent.clone();
            proof = assoc_adapt(&contract_premise, &current, succ, proof);
            proof = Proof::with_metadata(
                Rule::Contract,
                vec![proof],
                Sequent::new(contract_source.clone(), succ.clone()),
                Some(contract_site_path(seq, copied, from)),
                Some((from, from + moves + 2)),
            );
            let adapted = assoc_adapt(canonical, &contract_source, succ, proof);
            if !self.push(found, adapted) {
                return false;
            }
        }
        true
    }

    /// Emit one single-step structural rewrite: re-bracket to the rule's
    /// source shape, apply it, re-bracket its premise to canonical, recurse.
    #[allow(clippy::too_many_arguments)]
    fn structural(
        &mut self,
        rule: Rule,
        next: &FlatSeq,
        source: StructTree,
        premise: StructTree,
        site: TreePath,
        succ: &Formula,
        c_left: usize,
        s_left: usize,
        canonical: &StructTree,
        found: &mut Vec<Proof>,
    ) -> bool {
        let c_next = c_left - usize::from(rule == Rule::Contract);
        let subs = self.solve(next, succ, c_next, s_left - 1).as_ref().clone();
        if subs.is_empty() {
            return true;
        }
        let next_canonical = canonical_tree(next);
        for sub in subs {
            let premise_proof = assoc_adapt(&premise, &next_canonical, succ, sub);
            let node = Proof::with_site(
                rule,
                vec![premise_proof],
                Sequent::new(source.clone(), succ.clone()),
                Some(site.clone()),
            );
            let adapted = assoc_adapt(canonical, &source, succ, node);
            if !self.push(found, adapted) {
                return false;
            }
        }
        true
    }

    /// Single-step structural moves for goals that mention `◇` themselves:
    /// exercised by unit-scale sequents, so no transport fusion is needed.
    #[allow(clippy::too_many_arguments)]
    fn undirected_structural(
        &mut self,
        seq: &FlatSeq,
        succ: &Formula,
        c_left: usize,
        s_left: usize,
        canonical: &StructTree,
        found: &mut Vec<Proof>,
    ) {
        // move a `◇` group one item rightward (material must remain on its
        // right for the rule pattern to apply)
        for i in 0..seq.len().saturating_sub(2) {
            let FlatItem::Diamond(_) = &seq[i] else {
                continue;
            };
            let mut next = seq.to_vec();
            next.swap(i, i + 1);
            let (source, premise) = move_shapes(seq, i);
            if !self.structural(
                Rule::Move,
                &next,
                source,
                premise,
                vec![1; i],
                succ,
                c_left,
                s_left,
                canonical,
                found,
            ) {
                return;
            }
        }

        // swap two adjacent `◇` groups
        for i in 0..seq.len().saturating_sub(2) {
            let (FlatItem::Diamond(_), FlatItem::Diamond(_)) = (&seq[i], &seq[i + 1]) else {
                continue;
            };
            let mut next = seq.to_vec();
            next.swap(i, i + 1);
            let rest = rb_trees(seq[i + 2..].iter().map(FlatItem::tree).collect());
            let source = rb_with_tail(
                &seq[..i],
                StructTree::tensor(
                    seq[i].tree(),
                    StructTree::tensor(seq[i + 1].tree(), rest.clone()),
                ),
            );
            let premise = rb_with_tail(
                &seq[..i],
                StructTree::tensor(seq[i + 1].tree(), StructTree::tensor(seq[i].tree(), rest)),
            );
            if !self.structural(
                Rule::Swap,
                &next,
                source,
                premise,
                vec![1; i],
                succ,
                c_left,
                s_left,
                canonical,
                found,
            ) {
                return;
            }
        }

        // copy any consecutive group, marking the copy
        if c_left == 0 {
            return;
        }
        for start in 0..seq.len() {
            for end in (start + 1)..=seq.len() {
                let mut next = seq[..start].to_vec();
                next.push(FlatItem::Diamond(seq[start..end].to_vec()));
                next.extend_from_slice(&seq[start..]);
                let (source, premise) = contract_shapes(seq, &next, start);
                if !self.structural(
                    Rule::Contract,
                    &next,
                    source,
                    premise,
                    contract_site_path(seq, &next, start),
                    succ,
                    c_left,
                    s_left,
                    canonical,
                    found,
                ) {
                    return;
                }
            }
        }
    }

    /// Slash applications: a leaf functor consumes an adjacent group of
    /// items; the argument subgoal and the continuation are searched
    /// independently and recombined through composition and monotonicity.
    #[allow(clippy::too_many_arguments)]
    fn applications(
        &mut self,
        seq: &FlatSeq,
        succ: &Formula,
        c_left: usize,
        s_left: usize,
        canonical: &StructTree,
        _here: &Sequent,
        found: &mut Vec<Proof>,
    ) -> bool {
        for i in 0..seq.len() {
            let FlatItem::Leaf { formula, .. } = &seq[i] else {
                continue;
            };
            match formula {
                // argument group on the left of an `A\B` functor
                Formula::Under(a, b) => {
                    for start in (0..i).rev() {
                        let group = &seq[start..i];
                        if !arg_group_plausible(a, group) {
                            continue;
                        }
                        // the full-split case with an exactly typed argument
                        // duplicates plain inverse residuation
                        let duplicate = start == 0
                            && i == seq.len() - 1
                            && **b == *succ
                            && rb_trees(group.iter().map(FlatItem::tree).collect()).formula()
                                == **a;
                        if duplicate {
                            continue;
                        }
                        if !self.apply_at(
                            seq, succ, c_left, s_left, canonical, start, i, a, b, true, found,
                        ) {
                            return false;
                        }
                    }
                }
                // argument group on the right of a `B/A` functor
                Formula::Over(b, a) => {
                    for end in (i + 2)..=seq.len() {
                        let group = &seq[i + 1..end];
                        if !arg_group_plausible(a, group) {
                            continue;
                        }
                        let duplicate = i == 0
                            && end == seq.len()
                            && **b == *succ
                            && rb_trees(group.iter().map(FlatItem::tree).collect()).formula()
                                == **a;
                        if duplicate {
                            continue;
                        }
                        if !self.apply_at(
                            seq,
                            succ,
                            c_left,
                            s_left,
                            canonical,
                            i + 1,
                            end,
                            a,
                            b,
                            false,
                            found,
                        ) {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    /// One application: functor leaf adjacent to the argument group
    /// `seq[start..end]` (functor right of it when `under`, left otherwise).
    #[allow(clippy::too_many_arguments)]
    fn apply_at(
        &mut self,
        seq: &FlatSeq,
        succ: &Formula,
        c_left: usize,
        s_left: usize,
        canonical: &StructTree,
        start: usize,
        end: usize,
        arg_formula: &Formula,
        result_formula: &Formula,
        under: bool,
        found: &mut Vec<Proof>,
    ) -> bool {
        let group = seq[start..end].to_vec();
        let functor_index = if under { end } else { start - 1 };
        let functor_tree = seq[functor_index].tree();
        let arg_proofs = self.solve(&group, arg_formula, c_left, s_left).as_ref().clone();
        #[cfg(feature = "search-trace")]
        eprintln!(
            "apply_at len={} functor#{functor_index} arg={arg_formula} got {} arg proofs (c={c_left})",
            seq.len(),
            arg_proofs.len()
        );
        if arg_proofs.is_empty() {
            return true;
        }
        let group_tree = canonical_tree(&group);
        let (site_lo, site_hi) = if under { (start, end + 1) } else { (start - 1, end) };
        // continuation: the functor and its argument collapse to the result
        let mut rest: FlatSeq = seq[..site_lo].to_vec();
        rest.extend(flatten(&StructTree::hypothesis(result_formula.clone())));
        rest.extend_from_slice(&seq[site_hi..]);
        let rest_canonical = canonical_tree(&rest);

        // source bracketing: the site grouped as (argument . functor) or
        // (functor . argument) inside the spine
        let site_tree = if under {
            StructTree::tensor(group_tree.clone(), functor_tree.clone())
        } else {
            StructTree::tensor(functor_tree.clone(), group_tree.clone())
        };
        let mut tail: Vec<StructTree> = vec![site_tree.clone()];
        tail.extend(seq[site_hi..].iter().map(FlatItem::tree));
        let source = rb_with_tail(&seq[..site_lo], rb_trees(tail));
        let mut site_path: TreePath = vec![1; site_lo];
        if site_hi < seq.len() {
            site_path.push(0);
        }
        let replaced = source.replace(
            &site_path,
            StructTree::hypothesis(result_formula.clone()),
        );

        for arg in arg_proofs {
            // canonical order: a positioned step opening the argument
            // subproof acts on a contiguous region of this sequent, so the
            // same reading is enumerated with that step done here first
            if arg.leading_span().is_some() {
                continue;
            }
            let c_next = c_left - arg.contractions();
            let rest_proofs = self.solve(&rest, succ, c_next, s_left).as_ref().clone();
            for rest_proof in rest_proofs {
                // canonical order: a continuation whose first step lies
                // entirely left of this site commutes with it and is
                // enumerated left-to-right instead
                if let Some((_, hi)) = rest_proof.leading_span() {
                    if hi <= site_lo {
                        continue;
                    }
                }
                let step = application_step(
                    &site_tree,
                    &group_tree,
                    &functor_tree,
                    arg_formula,
                    result_formula,
                    under,
                    &arg,
                );
                let embedded = embed_at(&source, &site_path, step);
                let rest_adapted =
                    assoc_adapt(&replaced, &rest_canonical, succ, rest_proof.clone());
                let composed = Proof::with_metadata(
                    Rule::Compose,
                    vec![embedded, rest_adapted],
                    Sequent::new(source.clone(), succ.clone()),
                    Some(site_path.clone()),
                    Some((site_lo, site_hi)),
                );
                let adapted = assoc_adapt(canonical, &source, succ, composed);
                if !self.push(found, adapted) {
                    return false;
                }
            }
        }
        true
    }
}

/// A `◇`-rooted argument can only come from a single marked constituent:
/// no rule introduces `◇` on the succedent side of a multi-item sequence,
/// so wider groups are hopeless. Other argument types accept any group.
fn arg_group_plausible(arg: &Formula, group: &[FlatItem]) -> bool {
    if !matches!(arg, Formula::Diamond(_)) {
        return true;
    }
    match group {
        [FlatItem::Diamond(_)] => true,
        [FlatItem::Leaf { formula, .. }] => matches!(formula, Formula::Diamond(_)),
        _ => false,
    }
}

/// The application redex at the site: pair the argument derivation with the
/// functor by monotonicity, then apply inverse residuation.
fn application_step(
    site_tree: &StructTree,
    group_tree: &StructTree,
    functor_tree: &StructTree,
    arg_formula: &Formula,
    result_formula: &Formula,
    under: bool,
    arg: &Proof,
) -> Proof {
    let functor_formula = functor_tree.formula();
    let functor_axiom = Proof::new(
        Rule::Axiom,
        vec![],
        Sequent::new(functor_tree.clone(), functor_formula.clone()),
    );
    let _ = group_tree;
    let (paired, redex, rule) = if under {
        (
            Proof::new(
                Rule::MonoTensor,
                vec![arg.clone(), functor_axiom],
                Sequent::new(
                    site_tree.clone(),
                    Formula::tensor(arg_formula.clone(), functor_formula.clone()),
                ),
            ),
            StructTree::tensor(
                StructTree::hypothesis(arg_formula.clone()),
                StructTree::hypothesis(functor_formula.clone()),
            ),
            Rule::UnResUnder,
        )
    } else {
        (
            Proof::new(
                Rule::MonoTensor,
                vec![functor_axiom, arg.clone()],
                Sequent::new(
                    site_tree.clone(),
                    Formula::tensor(functor_formula.clone(), arg_formula.clone()),
                ),
            ),
            StructTree::tensor(
                StructTree::hypothesis(functor_formula.clone()),
                StructTree::hypothesis(arg_formula.clone()),
            ),
            Rule::UnResOver,
        )
    };
    let app_axiom = Proof::new(
        Rule::Axiom,
        vec![],
        Sequent::new(
            StructTree::hypothesis(functor_formula.clone()),
            functor_formula,
        ),
    );
    let app = Proof::new(rule, vec![app_axiom], Sequent::new(redex, result_formula.clone()));
    Proof::new(
        Rule::Compose,
        vec![paired, app],
        Sequent::new(site_tree.clone(), result_formula.clone()),
    )
}

/// Embed a step proved at `path` into the whole antecedent by tensoring with
/// identities on the untouched siblings.
fn embed_at(tree: &StructTree, path: &TreePath, mut current: Proof) -> Proof {
    for depth in (0..path.len()).rev() {
        let parent = tree.subtree(&path[..depth]).expect("valid application path");
        let StructTree::Tensor(l, r) = parent else {
            panic!("application paths cross products only");
        };
        let (premises, succedent) = if path[depth] == 0 {
            let sibling = Proof::new(
                Rule::Axiom,
                vec![],
                Sequent::new(r.as_ref().clone(), r.formula()),
            );
            let succ = Formula::tensor(current.conclusion().succedent.clone(), r.formula());
            (vec![current, sibling], succ)
        } else {
            let sibling = Proof::new(
                Rule::Axiom,
                vec![],
                Sequent::new(l.as_ref().clone(), l.formula()),
            );
            let succ = Formula::tensor(l.formula(), current.conclusion().succedent.clone());
            (vec![sibling, current], succ)
        };
        current = Proof::new(Rule::MonoTensor, premises, Sequent::new(parent.clone(), succedent));
    }
    current
}

/// `<>T -> <>B` from `T -> B`, elaborated through residuation of the
/// modalities and a composition with the unit `B -> []<>B`.
fn diamond_mono(inner_tree: &StructTree, b: &Formula, sub: Proof, conclusion: &Sequent) -> Proof {
    let dia_b = Formula::diamond(b.clone());
    let unit_axiom = Proof::new(
        Rule::Axiom,
        vec![],
        Sequent::new(
            StructTree::diamond(StructTree::hypothesis(b.clone())),
            dia_b.clone(),
        ),
    );
    let unit = Proof::new(
        Rule::ResDia,
        vec![unit_axiom],
        Sequent::new(StructTree::hypothesis(b.clone()), Formula::box_(dia_b.clone())),
    );
    let composed = Proof::new(
        Rule::Compose,
        vec![sub, unit],
        Sequent::new(inner_tree.clone(), Formula::box_(dia_b)),
    );
    Proof::new(Rule::UnResDia, vec![composed], conclusion.clone())
}

/// Right-branching spine over `prefix` items ending in `tail`.
fn rb_with_tail(prefix: &[FlatItem], tail: StructTree) -> StructTree {
    let mut out = tail;
    for item in prefix.iter().rev() {
        out = StructTree::tensor(item.tree(), out);
    }
    out
}

/// Conclusion and premise bracketings for moving the `◇` group at `i` one
/// item rightward: `(◇B . A) . C` versus `A . (◇B . C)` on the spine.
/// Requires material after `i + 1`.
fn move_shapes(seq: &FlatSeq, i: usize) -> (StructTree, StructTree) {
    let rest = rb_trees(seq[i + 2..].iter().map(FlatItem::tree).collect());
    let source = rb_with_tail(
        &seq[..i],
        StructTree::tensor(
            StructTree::tensor(seq[i].tree(), seq[i + 1].tree()),
            rest.clone(),
        ),
    );
    let premise = rb_with_tail(
        &seq[..i],
        StructTree::tensor(seq[i + 1].tree(), StructTree::tensor(seq[i].tree(), rest)),
    );
    (source, premise)
}

/// Conclusion and premise bracketings for copying the group at `start`;
/// `copied` is the sequence with the fresh `◇` group already inserted.
fn contract_shapes(seq: &FlatSeq, copied: &FlatSeq, start: usize) -> (StructTree, StructTree) {
    let FlatItem::Diamond(group) = &copied[start] else {
        panic!("copy site must hold the marked group");
    };
    let group_len = group.len();
    let group_tree = rb_trees(
        seq[start..start + group_len]
            .iter()
            .map(FlatItem::tree)
            .collect(),
    );
    let mut source_tail = vec![group_tree.clone()];
    source_tail.extend(seq[start + group_len..].iter().map(FlatItem::tree));
    let source = rb_with_tail(&seq[..start], rb_trees(source_tail));
    let site = StructTree::tensor(copied[start].tree(), group_tree);
    let mut premise_tail = vec![site];
    premise_tail.extend(seq[start + group_len..].iter().map(FlatItem::tree));
    let premise = rb_with_tail(&seq[..start], rb_trees(premise_tail));
    (source, premise)
}

/// Position of the copied group within the contract conclusion's
/// bracketing: at the end of the prefix spine, left of the suffix when one
/// exists.
fn contract_site_path(seq: &FlatSeq, copied: &FlatSeq, start: usize) -> TreePath {
    let FlatItem::Diamond(group) = &copied[start] else {
        panic!("copy site must hold the marked group");
    };
    let mut path = vec![1; start];
    if start + group.len() < seq.len() {
        path.push(0);
    }
    path
}

/// Indices of top-level leaves whose type mentions `◇` and can therefore
/// consume a transported copy.
fn consumer_leaf_positions(seq: &FlatSeq) -> Vec<usize> {
    seq.iter()
        .enumerate()
        .filter_map(|(i, item)| match item {
            FlatItem::Leaf { formula, .. } if formula_has_diamond(formula) => Some(i),
            _ => None,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// reassociation chains

/// Wrap `inner` (proving `(to, succ)`) into a proof of `(from, succ)` by a
/// canonical chain of reassociation steps through right-spine normal form.
/// `from` and `to` must agree modulo associativity.
fn assoc_adapt(from: &StructTree, to: &StructTree, succ: &Formula, inner: Proof) -> Proof {
    if from == to {
        return inner;
    }
    #[cfg(feature = "search-trace")]
    let _t = Timer::new(1);
    debug_assert_eq!(
        strip_seq(&flatten(from)),
        strip_seq(&flatten(to)),
        "reassociation endpoints must agree modulo associativity"
    );
    let mut proof = inner;
    // `to` rotates to the spine; replaying each rotation backwards is an
    // AssocL step whose conclusion is the rotated tree
    for (site, _before, after) in spine_steps(to) {
        proof = Proof::with_site(
            Rule::AssocL,
            vec![proof],
            Sequent::new(after, succ.clone()),
            Some(site),
        );
    }
    // `from` rotates to the spine directly as AssocR steps
    for (site, before, _after) in spine_steps(from).into_iter().rev() {
        proof = Proof::with_site(
            Rule::AssocR,
            vec![proof],
            Sequent::new(before, succ.clone()),
            Some(site),
        );
    }
    proof
}

/// The rotations taking `tree` to right-spine normal form, in application
/// order: each entry rewrites `(A.B).C` to `A.(B.C)` at the site, recorded
/// with the trees before and after.
fn spine_steps(tree: &StructTree) -> Vec<(TreePath, StructTree, StructTree)> {
    let mut steps = Vec::new();
    let mut cur = tree.clone();
    while let Some(site) = find_left_heavy(&cur) {
        let sub = cur.subtree(&site).unwrap().clone();
        let StructTree::Tensor(left, c) = &sub else {
            unreachable!()
        };
        let StructTree::Tensor(a, b) = left.as_ref() else {
            unreachable!()
        };
        let rewritten = StructTree::Tensor(
            Rc::clone(a),
            Rc::new(StructTree::Tensor(Rc::clone(b), Rc::clone(c))),
        );
        let next = cur.replace(&site, rewritten);
        steps.push((site, cur, next.clone()));
        cur = next;
    }
    steps
}

/// First position (pre-order, crossing `◇`) whose subtree is `(A.B).C`.
fn find_left_heavy(tree: &StructTree) -> Option<TreePath> {
    fn walk(tree: &StructTree, path: &mut TreePath) -> Option<TreePath> {
        match tree {
            StructTree::Leaf { .. } => None,
            StructTree::Diamond(inner) => {
                path.push(0);
                let r = walk(inner, path);
                path.pop();
                r
            }
            StructTree::Tensor(l, r) => {
                if matches!(l.as_ref(), StructTree::Tensor(..)) {
                    return Some(path.clone());
                }
                path.push(0);
                if let Some(found) = walk(l, path) {
                    return Some(found);
                }
                path.pop();
                path.push(1);
                let found = walk(r, path);
                path.pop();
                found
            }
        }
    }
    walk(tree, &mut Vec::new())
}

/// A bracketing of the sequence whose formula equals `succ`, if any.
fn match_succ_tree(succ: &Formula, seq: &[FlatItem]) -> Option<StructTree> {
    #[cfg(feature = "search-trace")]
    let _t = Timer::new(2);
    if seq.len() == 1 {
        return match &seq[0] {
            FlatItem::Leaf { .. } => {
                let tree = seq[0].tree();
                (tree.formula() == *succ).then_some(tree)
            }
            FlatItem::Diamond(inner) => {
                let Formula::Diamond(g) = succ else {
                    return None;
                };
                match_succ_tree(g, inner).map(StructTree::diamond)
            }
        };
    }
    let Formula::Tensor(l, r) = succ else {
        return None;
    };
    for split in 1..seq.len() {
        if let (Some(lt), Some(rt)) = (
            match_succ_tree(l, &seq[..split]),
            match_succ_tree(r, &seq[split..]),
        ) {
            return Some(StructTree::tensor(lt, rt));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// goal-directed filters

/// The `◇`-marked argument formulas demanded anywhere in the sequence's
/// leaf types: `A` for each `◇A \ _` or `_ / ◇A` subformula.
fn consumer_arguments(seq: &[FlatItem]) -> Vec<Formula> {
    fn from_formula(f: &Formula, out: &mut Vec<Formula>) {
        match f {
            Formula::Basic(_) => {}
            Formula::Under(l, r) => {
                if let Formula::Diamond(a) = l.as_ref() {
                    out.push((**a).clone());
                }
                from_formula(l, out);
                from_formula(r, out);
            }
            Formula::Over(l, r) => {
                if let Formula::Diamond(a) = r.as_ref() {
                    out.push((**a).clone());
                }
                from_formula(l, out);
                from_formula(r, out);
            }
            Formula::Tensor(l, r) => {
                from_formula(l, out);
                from_formula(r, out);
            }
            Formula::Diamond(inner) | Formula::Box_(inner) => from_formula(inner, out),
        }
    }
    let mut out = Vec::new();
    for item in seq {
        match item {
            FlatItem::Leaf { formula, .. } => from_formula(formula, &mut out),
            FlatItem::Diamond(inner) => out.extend(consumer_arguments(inner)),
        }
    }
    out
}


fn formula_has_diamond(f: &Formula) -> bool {
    match f {
        Formula::Basic(_) => false,
        Formula::Diamond(_) => true,
        Formula::Box_(inner) => formula_has_diamond(inner),
        Formula::Tensor(l, r) | Formula::Under(l, r) | Formula::Over(l, r) => {
            formula_has_diamond(l) || formula_has_diamond(r)
        }
    }
}

/// Necessary condition for a copy of the group to be consumable as some
/// `◇`-argument: with further copies in budget, the argument's atoms must
/// occur in the group; with none, the signed counts must match exactly.
fn copy_can_serve<'a>(
    group: &'a [FlatItem],
    consumer_args: &'a [Formula],
    copies_left: usize,
) -> bool {
    #[cfg(feature = "search-trace")]
    let _t = Timer::new(5);
    let mut group_counts = BTreeMap::new();
    for item in group {
        item_counts(item, 1, &mut group_counts);
    }
    consumer_args.iter().any(|arg| {
        let mut arg_counts = BTreeMap::new();
        formula_counts(arg, 1, &mut arg_counts);
        if copies_left == 0 {
            let mut diff = group_counts.clone();
            for (atom, value) in &arg_counts {
                *diff.entry(atom).or_insert(0) -= value;
            }
            diff.values().all(|&v| v == 0)
        } else {
            arg_counts
                .iter()
                .filter(|(_, v)| **v != 0)
                .all(|(atom, _)| group_counts.get(atom).is_some_and(|v| *v != 0))
        }
    })
}

// ---------------------------------------------------------------------------
// feasibility pruning

/// Cheap necessary conditions. Every rule except contraction preserves the
/// per-atom signed count balance between antecedent and succedent, so with
/// no contractions left the balance must already be zero, and with one left
/// the deficit must be coverable by copying some of the present leaves; and
/// no rule ever introduces a basic type absent from the antecedent.
fn feasible(seq: &FlatSeq, succ: &Formula, c_left: usize) -> bool {
    #[cfg(feature = "search-trace")]
    let _t = Timer::new(3);
    let mut counts: BTreeMap<&str, i64> = BTreeMap::new();
    for item in seq {
        item_counts(item, 1, &mut counts);
    }
    let mut succ_atoms: Vec<&Formula> = vec![succ];
    let mut missing = false;
    while let Some(f) = succ_atoms.pop() {
        match f {
            Formula::Basic(name) => {
                if !counts.contains_key(name.as_str()) {
                    missing = true;
                    break;
                }
            }
            Formula::Tensor(l, r) | Formula::Under(l, r) | Formula::Over(l, r) => {
                succ_atoms.push(l);
                succ_atoms.push(r);
            }
            Formula::Diamond(inner) | Formula::Box_(inner) => succ_atoms.push(inner),
        }
    }
    if missing {
        return false;
    }
    if c_left >= 2 {
        return true;
    }
    // deficit the remaining copies must contribute: succedent minus antecedent
    let mut deficit = counts;
    for value in deficit.values_mut() {
        *value = -*value;
    }
    formula_counts(succ, 1, &mut deficit);
    deficit.retain(|_, v| *v != 0);
    if deficit.is_empty() {
        return true;
    }
    if c_left == 0 {
        return false;
    }
    // one contraction left: whatever it copies is made of leaves already
    // present or of hypotheses that residuating the succedent will
    // introduce, so the deficit must be a subset sum of those counts
    let mut leaf_vectors = Vec::new();
    collect_leaf_vectors(seq, &mut leaf_vectors);
    collect_hypothesis_vectors(succ, &mut leaf_vectors);
    subset_covers(&deficit, &leaf_vectors)
}

/// Count vectors of the hypothesis leaves that residuating the succedent
/// can introduce: the unfolded fringes of its argument-position subformulas.
fn collect_hypothesis_vectors<'a>(succ: &'a Formula, out: &mut Vec<BTreeMap<&'a str, i64>>) {
    fn fringe<'a>(f: &'a Formula, out: &mut Vec<BTreeMap<&'a str, i64>>) {
        match f {
            Formula::Tensor(l, r) => {
                fringe(l, out);
                fringe(r, out);
            }
            Formula::Diamond(inner) => fringe(inner, out),
            other => {
                let mut v = BTreeMap::new();
                formula_counts(other, 1, &mut v);
                v.retain(|_, val| *val != 0);
                if !v.is_empty() {
                    out.push(v);
                }
            }
        }
    }
    match succ {
        Formula::Basic(_) => {}
        Formula::Under(a, b) => {
            fringe(a, out);
            collect_hypothesis_vectors(b, out);
        }
        Formula::Over(b, a) => {
            fringe(a, out);
            collect_hypothesis_vectors(b, out);
        }
        Formula::Tensor(l, r) => {
            collect_hypothesis_vectors(l, out);
            collect_hypothesis_vectors(r, out);
        }
        Formula::Diamond(inner) | Formula::Box_(inner) => collect_hypothesis_vectors(inner, out),
    }
}

fn collect_leaf_vectors<'a>(seq: &'a FlatSeq, out: &mut Vec<BTreeMap<&'a str, i64>>) {
    for item in seq {
        match item {
            FlatItem::Leaf { formula, .. } => {
                let mut v = BTreeMap::new();
                formula_counts(formula, 1, &mut v);
                v.retain(|_, val| *val != 0);
                if !v.is_empty() {
                    out.push(v);
                }
            }
            FlatItem::Diamond(inner) => collect_leaf_vectors(inner, out),
        }
    }
}

/// Whether some sub-multiset of `vectors` sums exactly to `deficit`.
/// Backtracking over interned atom indices, identical vectors grouped with
/// their multiplicities.
fn subset_covers(deficit: &BTreeMap<&str, i64>, vectors: &[BTreeMap<&str, i64>]) -> bool {
    let mut atoms: Vec<&str> = deficit.keys().copied().collect();
    for v in vectors {
        for atom in v.keys() {
            if !atoms.contains(atom) {
                atoms.push(atom);
            }
        }
    }
    let dense = |m: &BTreeMap<&str, i64>| -> Vec<i64> {
        atoms.iter().map(|a| m.get(a).copied().unwrap_or(0)).collect()
    };
    let mut target = dense(deficit);
    let mut grouped: Vec<(Vec<i64>, usize)> = Vec::new();
    for v in vectors {
        let d = dense(v);
        match grouped.iter_mut().find(|(g, _)| *g == d) {
            Some((_, count)) => *count += 1,
            None => grouped.push((d, 1)),
        }
    }

    fn walk(target: &mut [i64], groups: &[(Vec<i64>, usize)]) -> bool {
        if target.iter().all(|&v| v == 0) {
            return true;
        }
        let Some(((vector, mult), rest)) = groups.split_first() else {
            return false;
        };
        for taken in 0..=*mult {
            if taken > 0 {
                for (t, v) in target.iter_mut().zip(vector) {
                    *t -= v;
                }
            }
            if walk(target, rest) {
                for (t, v) in target.iter_mut().zip(vector) {
                    *t += v * taken as i64;
                }
                return true;
            }
        }
        for (t, v) in target.iter_mut().zip(vector) {
            *t += v * *mult as i64;
        }
        false
    }
    walk(&mut target, &grouped)
}

fn item_counts<'a>(item: &'a FlatItem, sign: i64, acc: &mut BTreeMap<&'a str, i64>) {
    match item {
        FlatItem::Leaf { formula, .. } => formula_counts(formula, sign, acc),
        FlatItem::Diamond(inner) => {
            for i in inner {
                item_counts(i, sign, acc);
            }
        }
    }
}

fn formula_counts<'a>(f: &'a Formula, sign: i64, acc: &mut BTreeMap<&'a str, i64>) {
    match f {
        Formula::Basic(name) => *acc.entry(name.as_str()).or_insert(0) += sign,
        Formula::Tensor(l, r) => {
            formula_counts(l, sign, acc);
            formula_counts(r, sign, acc);
        }
        Formula::Under(l, r) => {
            formula_counts(l, -sign, acc);
            formula_counts(r, sign, acc);
        }
        Formula::Over(l, r) => {
            formula_counts(l, sign, acc);
            formula_counts(r, -sign, acc);
        }
        Formula::Diamond(inner) | Formula::Box_(inner) => formula_counts(inner, sign, acc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{check_proof, check_proof_report, sentence_sequent};
    use crate::syntax::{parse_formula, Lexicon};

    fn ellipsis_lexicon() -> Lexicon {
        Lexicon::parse(concat!(
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
        .unwrap()
    }

    fn prove_sentence(words: &[&str], bound: usize) -> ProveOutcome {
        let goal = parse_formula("s").unwrap();
        let seqs = sentence_sequent(words, &ellipsis_lexicon(), &goal).unwrap();
        assert_eq!(seqs.len(), 1);
        prove(&seqs[0], bound, &SearchLimits::default())
    }

    #[test]
    fn simple_sentence_has_exactly_one_proof() {
        let outcome = prove_sentence(&["alice", "drinks"], 0);
        assert_eq!(outcome.proofs.len(), 1);
        let proof = &outcome.proofs[0];
        assert!(check_proof(proof));
        // only inverse residuation over an axiom
        assert_eq!(proof.rule(), Rule::UnResUnder);
        assert_eq!(proof.premises()[0].rule(), Rule::Axiom);
    }

    #[test]
    fn transitive_sentence_derivable_without_contraction() {
        let outcome = prove_sentence(&["gary", "loves", "beer"], 0);
        assert!(!outcome.proofs.is_empty());
        for proof in &outcome.proofs {
            assert!(check_proof_report(proof).is_ok(), "{}", proof.trace());
            assert_eq!(proof.contractions(), 0);
        }
    }

    #[test]
    fn underivable_sentence_yields_nothing() {
        let outcome = prove_sentence(&["alice", "alice"], 1);
        assert!(outcome.proofs.is_empty());
    }

    #[test]
    fn ellipsis_needs_a_contraction() {
        let words = ["alice", "drinks", "and", "bob", "does_too"];
        assert!(prove_sentence(&words, 0).proofs.is_empty());
        let outcome = prove_sentence(&words, 1);
        assert!(!outcome.proofs.is_empty(), "expected a proof at bound 1");
        for proof in &outcome.proofs {
            assert!(check_proof_report(proof).is_ok(), "{}", proof.trace());
            assert!(proof.contractions() <= 1);
        }
        // the reading copies the verb phrase and moves the copy rightward
        let first = &outcome.proofs[0];
        assert!(rule_count(first, Rule::Contract) == 1);
        assert!(rule_count(first, Rule::Move) >= 1);
    }

    #[test]
    fn swap_reorders_two_marked_constituents() {
        // <>b . (<>a . c) -> <>a * (<>b * c) needs exactly one swap
        let a = parse_formula("a").unwrap();
        let b = parse_formula("b").unwrap();
        let c = parse_formula("c").unwrap();
        let tree = StructTree::tensor(
            StructTree::diamond(StructTree::word_leaf(0, b.clone())),
            StructTree::tensor(
                StructTree::diamond(StructTree::word_leaf(1, a.clone())),
                StructTree::word_leaf(2, c.clone()),
            ),
        );
        let goal = parse_formula("<>a*(<>b*c)").unwrap();
        let outcome = prove(&Sequent::new(tree, goal), 0, &SearchLimits::default());
        assert!(!outcome.proofs.is_empty());
        assert!(outcome.proofs.iter().any(|p| rule_count(p, Rule::Swap) == 1));
        for proof in &outcome.proofs {
            assert!(check_proof_report(proof).is_ok(), "{}", proof.trace());
        }
    }

    #[test]
    fn search_is_deterministic() {
        let words = ["alice", "drinks", "and", "bob", "does_too"];
        let a = prove_sentence(&words, 1);
        let b = prove_sentence(&words, 1);
        assert_eq!(a.proofs, b.proofs);
        assert_eq!(a.exhausted, b.exhausted);
    }

    fn rule_count(proof: &Proof, rule: Rule) -> usize {
        proof
            .premises()
            .iter()
            .map(|p| rule_count(p, rule))
            .sum::<usize>()
            + usize::from(proof.rule() == rule)
    }

    #[test]
    fn anaphora_sentence_has_two_structurally_distinct_readings() {
        let words = ["gary", "loves", "his", "code", "and", "bill", "does_too"];
        let outcome = prove_sentence(&words, 3);
        assert!(
            outcome.proofs.len() >= 2,
            "expected at least two readings, found {}",
            outcome.proofs.len()
        );
        for proof in &outcome.proofs {
            assert!(check_proof_report(proof).is_ok(), "{}", proof.trace());
            assert!(proof.contractions() <= 3);
        }
    }
}
