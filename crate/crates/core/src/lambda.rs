//! The classical backend: proofs translate to non-linear simply typed
//! lambda terms over word constants, a lexical homomorphism substitutes
//! tensor-operation terms for the constants, and the closed result
//! evaluates numerically. Copying is ordinary variable reuse.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::embeddings::EmbeddingStore;
use crate::prover::{Proof, Rule, StructTree};
use crate::syntax::{sem_type, Formula, SemType, SpaceAssignment, SyntaxError};
use crate::tensor::{self, Tensor, TensorError};

#[derive(Debug, Error)]
pub enum LambdaError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("no lexical entry for `{word}` at type {formula}")]
    MissingLexicalEntry { word: String, formula: String },
    #[error("missing embedding for `{0}`")]
    MissingEmbedding(String),
    #[error("normalization exceeded the {0}-step budget")]
    BudgetExhausted(usize),
    #[error("ill-typed redex: pattern {pattern} cannot match {argument}")]
    PatternMismatch { pattern: String, argument: String },
    #[error("term does not denote a tensor: {0}")]
    NotATensor(String),
    #[error("type error: {0}")]
    Type(String),
}

/// Reduction budget for [`normalize`]; exhausting it is a hard failure.
pub const NORMALIZE_BUDGET: usize = 100_000;

/// The four tensor operations of the concrete model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorOp {
    /// `×₁`: matrix-vector contraction.
    MatVec,
    /// `×₂`: cube-vector contraction.
    CubeVec,
    /// `⊙`: element-wise multiplication.
    ElemMul,
    /// pointwise addition.
    Add,
}

impl TensorOp {
    pub fn symbol(self) -> &'static str {
        match self {
            TensorOp::MatVec => "x1",
            TensorOp::CubeVec => "x2",
            TensorOp::ElemMul => "(.)",
            TensorOp::Add => "+",
        }
    }
}

/// Named constants: word constants awaiting lexical substitution, embedding
/// constants denoting concrete tensors, the operation constants, and scalar
/// literals.
#[derive(Debug, Clone, PartialEq)]
pub enum Constant {
    /// A word occurrence from the derivation, typed by its syntactic type.
    Word { name: String, formula: Formula },
    /// A concrete embedding, fetched by name and shape at evaluation.
    Emb { name: String, shape: Vec<usize> },
    Op(TensorOp),
    Scalar(f64),
}

/// A variable or a tuple of patterns.
#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    Var(String),
    Tuple(Vec<Pattern>),
}

impl Pattern {
    fn binds(&self, name: &str) -> bool {
        match self {
            Pattern::Var(v) => v == name,
            Pattern::Tuple(ps) => ps.iter().any(|p| p.binds(name)),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(v) => write!(f, "{v}"),
            Pattern::Tuple(ps) => {
                write!(f, "⟨")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "⟩")
            }
        }
    }
}

/// Non-linear simply typed lambda terms with tuples; variables may occur
/// any number of times in a body.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaTerm {
    Var(String),
    Const(Constant),
    Abs(Pattern, Rc<LambdaTerm>),
    App(Rc<LambdaTerm>, Rc<LambdaTerm>),
    Tuple(Vec<Rc<LambdaTerm>>),
}

impl LambdaTerm {
    pub fn var(name: &str) -> LambdaTerm {
        LambdaTerm::Var(name.to_string())
    }

    pub fn abs(pattern: Pattern, body: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Abs(pattern, Rc::new(body))
    }

    pub fn app(fun: LambdaTerm, arg: LambdaTerm) -> LambdaTerm {
        LambdaTerm::App(Rc::new(fun), Rc::new(arg))
    }

    pub fn pair(left: LambdaTerm, right: LambdaTerm) -> LambdaTerm {
        LambdaTerm::Tuple(vec![Rc::new(left), Rc::new(right)])
    }

    pub fn op(op: TensorOp, left: LambdaTerm, right: LambdaTerm) -> LambdaTerm {
        LambdaTerm::app(LambdaTerm::app(LambdaTerm::Const(Constant::Op(op)), left), right)
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaTerm::Var(v) => write!(f, "{v}"),
            LambdaTerm::Const(Constant::Word { name, .. }) => write!(f, "{name}"),
            LambdaTerm::Const(Constant::Emb { name, .. }) => write!(f, "**{name}**"),
            LambdaTerm::Const(Constant::Op(op)) => write!(f, "{}", op.symbol()),
            LambdaTerm::Const(Constant::Scalar(x)) => write!(f, "{x}"),
            LambdaTerm::Abs(p, body) => write!(f, "(λ{p}. {body})"),
            LambdaTerm::App(fun, arg) => write!(f, "({fun} {arg})"),
            LambdaTerm::Tuple(parts) => {
                write!(f, "⟨")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "⟩")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// proof-to-term translation

struct Fresh(usize);

impl Fresh {
    fn var(&mut self) -> String {
        self.0 += 1;
        format!("x{}", self.0)
    }
}

/// Translate a checked proof to a closed term of type
/// `sem_type(antecedent) -> sem_type(succedent)`: residuation becomes
/// abstraction and application, contraction identifies the variables of the
/// copy with the original's, moving and reassociating re-tuple.
pub fn translate(proof: &Proof) -> LambdaTerm {
    translate_node(proof, &mut Fresh(0))
}

fn translate_node(proof: &Proof, fresh: &mut Fresh) -> LambdaTerm {
    match proof.rule() {
        Rule::Axiom => {
            let x = fresh.var();
            LambdaTerm::abs(Pattern::Var(x.clone()), LambdaTerm::var(&x))
        }
        Rule::Compose => {
            let f = translate_node(&proof.premises()[0], fresh);
            let g = translate_node(&proof.premises()[1], fresh);
            let x = fresh.var();
            LambdaTerm::abs(
                Pattern::Var(x.clone()),
                LambdaTerm::app(g, LambdaTerm::app(f, LambdaTerm::var(&x))),
            )
        }
        Rule::ResUnder => {
            // from f : A . T -> B conclude λt. λa. F ⟨a, t⟩
            let f = translate_node(&proof.premises()[0], fresh);
            let t = fresh.var();
            let a = fresh.var();
            LambdaTerm::abs(
                Pattern::Var(t.clone()),
                LambdaTerm::abs(
                    Pattern::Var(a.clone()),
                    LambdaTerm::app(f, LambdaTerm::pair(LambdaTerm::var(&a), LambdaTerm::var(&t))),
                ),
            )
        }
        Rule::ResOver => {
            // from f : T . B -> C conclude λt. λb. F ⟨t, b⟩
            let f = translate_node(&proof.premises()[0], fresh);
            let t = fresh.var();
            let b = fresh.var();
            LambdaTerm::abs(
                Pattern::Var(t.clone()),
                LambdaTerm::abs(
                    Pattern::Var(b.clone()),
                    LambdaTerm::app(f, LambdaTerm::pair(LambdaTerm::var(&t), LambdaTerm::var(&b))),
                ),
            )
        }
        // the modalities leave terms untouched
        Rule::ResDia | Rule::UnResDia => translate_node(&proof.premises()[0], fresh),
        Rule::UnResUnder => {
            // from g : Y -> A \ C conclude λ⟨a, y⟩. (G y) a
            let g = translate_node(&proof.premises()[0], fresh);
            let a = fresh.var();
            let y = fresh.var();
            LambdaTerm::abs(
                Pattern::Tuple(vec![Pattern::Var(a.clone()), Pattern::Var(y.clone())]),
                LambdaTerm::app(LambdaTerm::app(g, LambdaTerm::var(&y)), LambdaTerm::var(&a)),
            )
        }
        Rule::UnResOver => {
            // from g : X -> C / B conclude λ⟨x, b⟩. (G x) b
            let g = translate_node(&proof.premises()[0], fresh);
            let x = fresh.var();
            let b = fresh.var();
            LambdaTerm::abs(
                Pattern::Tuple(vec![Pattern::Var(x.clone()), Pattern::Var(b.clone())]),
                LambdaTerm::app(LambdaTerm::app(g, LambdaTerm::var(&x)), LambdaTerm::var(&b)),
            )
        }
        Rule::MonoTensor => {
            let f = translate_node(&proof.premises()[0], fresh);
            let g = translate_node(&proof.premises()[1], fresh);
            let x = fresh.var();
            let y = fresh.var();
            LambdaTerm::abs(
                Pattern::Tuple(vec![Pattern::Var(x.clone()), Pattern::Var(y.clone())]),
                LambdaTerm::pair(
                    LambdaTerm::app(f, LambdaTerm::var(&x)),
                    LambdaTerm::app(g, LambdaTerm::var(&y)),
                ),
            )
        }
        Rule::MonoUnder => {
            // from f : A -> B and g : C -> D conclude λh. λa. G (h (F a))
            let f = translate_node(&proof.premises()[0], fresh);
            let g = translate_node(&proof.premises()[1], fresh);
            let h = fresh.var();
            let a = fresh.var();
            LambdaTerm::abs(
                Pattern::Var(h.clone()),
                LambdaTerm::abs(
                    Pattern::Var(a.clone()),
                    LambdaTerm::app(
                        g,
                        LambdaTerm::app(
                            LambdaTerm::var(&h),
                            LambdaTerm::app(f, LambdaTerm::var(&a)),
                        ),
                    ),
                ),
            )
        }
        Rule::MonoOver => {
            // from f : A -> B and g : C -> D conclude λh. λc. F (h (G c))
            let f = translate_node(&proof.premises()[0], fresh);
            let g = translate_node(&proof.premises()[1], fresh);
            let h = fresh.var();
            let c = fresh.var();
            LambdaTerm::abs(
                Pattern::Var(h.clone()),
                LambdaTerm::abs(
                    Pattern::Var(c.clone()),
                    LambdaTerm::app(
                        f,
                        LambdaTerm::app(
                            LambdaTerm::var(&h),
                            LambdaTerm::app(g, LambdaTerm::var(&c)),
                        ),
                    ),
                ),
            )
        }
        Rule::AssocL | Rule::AssocR | Rule::Contract | Rule::Move | Rule::Swap => {
            // bind one variable per conclusion leaf; rebuild the premise
            // tuple, duplicating variables where the copy identifies them
            let f = translate_node(&proof.premises()[0], fresh);
            let concl_tree = &proof.conclusion().antecedent;
            let prem_tree = &proof.premises()[0].conclusion().antecedent;
            let mut leaf_vars = Vec::new();
            let pattern = leaf_pattern(concl_tree, fresh, &mut leaf_vars);
            let tuple = premise_tuple(prem_tree, &leaf_vars);
            LambdaTerm::abs(pattern, LambdaTerm::app(f, tuple))
        }
    }
}

type LeafVar = (Option<usize>, Formula, String);

fn leaf_pattern(tree: &StructTree, fresh: &mut Fresh, vars: &mut Vec<LeafVar>) -> Pattern {
    match tree {
        StructTree::Leaf {
            occurrence,
            formula,
        } => {
            let v = fresh.var();
            vars.push((*occurrence, formula.clone(), v.clone()));
            Pattern::Var(v)
        }
        StructTree::Tensor(l, r) => Pattern::Tuple(vec![
            leaf_pattern(l, fresh, vars),
            leaf_pattern(r, fresh, vars),
        ]),
        StructTree::Diamond(inner) => leaf_pattern(inner, fresh, vars),
    }
}

/// Rebuild the premise antecedent as a tuple over conclusion variables.
/// A premise leaf takes the variable of a conclusion leaf with the same
/// occurrence and formula; a copy reuses the original's variable, which is
/// exactly how contraction identifies them.
fn premise_tuple(tree: &StructTree, vars: &[LeafVar]) -> LambdaTerm {
    match tree {
        StructTree::Leaf {
            occurrence,
            formula,
        } => {
            let (_, _, v) = vars
                .iter()
                .find(|(o, f, _)| o == occurrence && f == formula)
                .expect("premise leaves come from conclusion leaves");
            LambdaTerm::var(v)
        }
        StructTree::Tensor(l, r) => {
            LambdaTerm::pair(premise_tuple(l, vars), premise_tuple(r, vars))
        }
        StructTree::Diamond(inner) => premise_tuple(inner, vars),
    }
}

/// The sentence's word-constant tuple shaped like the root antecedent.
pub fn word_tuple(antecedent: &StructTree, words: &[&str]) -> LambdaTerm {
    match antecedent {
        StructTree::Leaf {
            occurrence,
            formula,
        } => {
            let occurrence = occurrence.expect("root sequent leaves carry occurrences");
            LambdaTerm::Const(Constant::Word {
                name: words[occurrence].to_string(),
                formula: formula.clone(),
            })
        }
        StructTree::Tensor(l, r) => {
            LambdaTerm::pair(word_tuple(l, words), word_tuple(r, words))
        }
        StructTree::Diamond(inner) => word_tuple(inner, words),
    }
}

/// The abstract proof term: the translated proof applied to the sentence's
/// word constants, beta-normalized.
pub fn abstract_term(proof: &Proof, words: &[&str]) -> Result<LambdaTerm, LambdaError> {
    let function = translate(proof);
    let applied = LambdaTerm::app(function, word_tuple(&proof.conclusion().antecedent, words));
    normalize(&applied)
}

// ---------------------------------------------------------------------------
// normalization

/// Beta-normal form under normal-order reduction, tuple patterns reducing
/// component-wise against matching tuples. Exceeding the step budget is a
/// hard failure.
pub fn normalize(term: &LambdaTerm) -> Result<LambdaTerm, LambdaError> {
    let mut current = term.clone();
    let mut rename = Fresh(1_000_000);
    for _ in 0..NORMALIZE_BUDGET {
        match step(&current, &mut rename)? {
            Some(next) => current = next,
            None => return Ok(current),
        }
    }
    Err(LambdaError::BudgetExhausted(NORMALIZE_BUDGET))
}

/// One leftmost-outermost step, or `None` at normal form.
fn step(term: &LambdaTerm, rename: &mut Fresh) -> Result<Option<LambdaTerm>, LambdaError> {
    match term {
        LambdaTerm::App(fun, arg) => {
            if let LambdaTerm::Abs(pattern, body) = fun.as_ref() {
                let mut bindings = BTreeMap::new();
                match bind_pattern(pattern, arg, &mut bindings) {
                    Ok(()) => {
                        let mut reduced = body.as_ref().clone();
                        for (name, value) in bindings {
                            reduced = substitute_var(&reduced, &name, &value, rename);
                        }
                        return Ok(Some(reduced));
                    }
                    Err(mismatch) => {
                        // the argument may still reduce to a matching tuple
                        if let Some(next) = step(arg, rename)? {
                            return Ok(Some(LambdaTerm::App(Rc::clone(fun), Rc::new(next))));
                        }
                        return Err(mismatch);
                    }
                }
            }
            if let Some(next) = step(fun, rename)? {
                return Ok(Some(LambdaTerm::App(Rc::new(next), Rc::clone(arg))));
            }
            if let Some(next) = step(arg, rename)? {
                return Ok(Some(LambdaTerm::App(Rc::clone(fun), Rc::new(next))));
            }
            Ok(None)
        }
        LambdaTerm::Abs(pattern, body) => Ok(step(body, rename)?
            .map(|next| LambdaTerm::Abs(pattern.clone(), Rc::new(next)))),
        LambdaTerm::Tuple(parts) => {
            for (i, part) in parts.iter().enumerate() {
                if let Some(next) = step(part, rename)? {
                    let mut out = parts.clone();
                    out[i] = Rc::new(next);
                    return Ok(Some(LambdaTerm::Tuple(out)));
                }
            }
            Ok(None)
        }
        LambdaTerm::Var(_) | LambdaTerm::Const(_) => Ok(None),
    }
}

fn bind_pattern(
    pattern: &Pattern,
    arg: &LambdaTerm,
    bindings: &mut BTreeMap<String, LambdaTerm>,
) -> Result<(), LambdaError> {
    match (pattern, arg) {
        (Pattern::Var(v), value) => {
            bindings.insert(v.clone(), value.clone());
            Ok(())
        }
        (Pattern::Tuple(ps), LambdaTerm::Tuple(parts)) if ps.len() == parts.len() => {
            for (p, part) in ps.iter().zip(parts) {
                bind_pattern(p, part, bindings)?;
            }
            Ok(())
        }
        _ => Err(LambdaError::PatternMismatch {
            pattern: pattern.to_string(),
            argument: arg.to_string(),
        }),
    }
}

fn free_in(term: &LambdaTerm, name: &str) -> bool {
    match term {
        LambdaTerm::Var(v) => v == name,
        LambdaTerm::Const(_) => false,
        LambdaTerm::Abs(pattern, body) => !pattern.binds(name) && free_in(body, name),
        LambdaTerm::App(fun, arg) => free_in(fun, name) || free_in(arg, name),
        LambdaTerm::Tuple(parts) => parts.iter().any(|p| free_in(p, name)),
    }
}

fn pattern_vars(pattern: &Pattern, out: &mut Vec<String>) {
    match pattern {
        Pattern::Var(v) => out.push(v.clone()),
        Pattern::Tuple(ps) => {
            for p in ps {
                pattern_vars(p, out);
            }
        }
    }
}

fn rename_pattern(pattern: &Pattern, map: &BTreeMap<String, String>) -> Pattern {
    match pattern {
        Pattern::Var(v) => Pattern::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
        Pattern::Tuple(ps) => Pattern::Tuple(ps.iter().map(|p| rename_pattern(p, map)).collect()),
    }
}

/// Capture-avoiding substitution; binders are renamed when they would
/// capture a free variable of the value.
fn substitute_var(
    term: &LambdaTerm,
    name: &str,
    value: &LambdaTerm,
    rename: &mut Fresh,
) -> LambdaTerm {
    match term {
        LambdaTerm::Var(v) if v == name => value.clone(),
        LambdaTerm::Var(_) | LambdaTerm::Const(_) => term.clone(),
        LambdaTerm::Abs(pattern, body) => {
            if pattern.binds(name) {
                return term.clone();
            }
            let mut bound = Vec::new();
            pattern_vars(pattern, &mut bound);
            // a binder captures when the value is about to be placed under
            // it (the substituted variable occurs in the body) and the value
            // mentions the binder's name freely
            let relevant = free_in(body, name);
            let capturing: Vec<String> = bound
                .into_iter()
                .filter(|b| relevant && free_in(value, b))
                .collect();
            if capturing.is_empty() {
                LambdaTerm::Abs(
                    pattern.clone(),
                    Rc::new(substitute_var(body, name, value, rename)),
                )
            } else {
                let map: BTreeMap<String, String> = capturing
                    .into_iter()
                    .map(|old| (old, rename.var()))
                    .collect();
                let fresh_pattern = rename_pattern(pattern, &map);
                let mut fresh_body = body.as_ref().clone();
                for (old, new) in &map {
                    fresh_body = substitute_var(&fresh_body, old, &LambdaTerm::var(new), rename);
                }
                LambdaTerm::Abs(
                    fresh_pattern,
                    Rc::new(substitute_var(&fresh_body, name, value, rename)),
                )
            }
        }
        LambdaTerm::App(fun, arg) => LambdaTerm::App(
            Rc::new(substitute_var(fun, name, value, rename)),
            Rc::new(substitute_var(arg, name, value, rename)),
        ),
        LambdaTerm::Tuple(parts) => LambdaTerm::Tuple(
            parts
                .iter()
                .map(|p| Rc::new(substitute_var(p, name, value, rename)))
                .collect(),
        ),
    }
}

/// Canonical renaming of all binders in traversal order, for comparison up
/// to alpha-equivalence.
pub fn canonical_alpha(term: &LambdaTerm) -> LambdaTerm {
    fn walk(term: &LambdaTerm, env: &BTreeMap<String, String>, counter: &mut usize) -> LambdaTerm {
        match term {
            LambdaTerm::Var(v) => {
                LambdaTerm::Var(env.get(v).cloned().unwrap_or_else(|| v.clone()))
            }
            LambdaTerm::Const(_) => term.clone(),
            LambdaTerm::Abs(pattern, body) => {
                let mut env = env.clone();
                let pattern = rename_canonical(pattern, &mut env, counter);
                LambdaTerm::Abs(pattern, Rc::new(walk(body, &env, counter)))
            }
            LambdaTerm::App(fun, arg) => LambdaTerm::App(
                Rc::new(walk(fun, env, counter)),
                Rc::new(walk(arg, env, counter)),
            ),
            LambdaTerm::Tuple(parts) => LambdaTerm::Tuple(
                parts.iter().map(|p| Rc::new(walk(p, env, counter))).collect(),
            ),
        }
    }
    fn rename_canonical(
        pattern: &Pattern,
        env: &mut BTreeMap<String, String>,
        counter: &mut usize,
    ) -> Pattern {
        match pattern {
            Pattern::Var(v) => {
                let new = format!("v{counter}");
                *counter += 1;
                env.insert(v.clone(), new.clone());
                Pattern::Var(new)
            }
            Pattern::Tuple(ps) => Pattern::Tuple(
                ps.iter().map(|p| rename_canonical(p, env, counter)).collect(),
            ),
        }
    }
    walk(term, &BTreeMap::new(), &mut 0)
}

pub fn alpha_eq(a: &LambdaTerm, b: &LambdaTerm) -> bool {
    canonical_alpha(a) == canonical_alpha(b)
}

// ---------------------------------------------------------------------------
// type checking

/// Bidirectional check of a term against an expected semantic type, for the
/// abstract terms whose constants carry their types.
pub fn check_type(term: &LambdaTerm, expected: &SemType) -> Result<(), LambdaError> {
    check(term, expected, &BTreeMap::new())
}

fn check(
    term: &LambdaTerm,
    expected: &SemType,
    env: &BTreeMap<String, SemType>,
) -> Result<(), LambdaError> {
    match (term, expected) {
        (LambdaTerm::Abs(pattern, body), SemType::Arrow(from, to)) => {
            let mut env = env.clone();
            bind_pattern_type(pattern, from, &mut env)?;
            check(body, to, &env)
        }
        (LambdaTerm::Tuple(parts), SemType::Product(l, r)) if parts.len() == 2 => {
            check(&parts[0], l, env)?;
            check(&parts[1], r, env)
        }
        _ => {
            let found = infer(term, env)?;
            if found == *expected {
                Ok(())
            } else {
                Err(LambdaError::Type(format!(
                    "expected {expected}, found {found} in {term}"
                )))
            }
        }
    }
}

fn bind_pattern_type(
    pattern: &Pattern,
    ty: &SemType,
    env: &mut BTreeMap<String, SemType>,
) -> Result<(), LambdaError> {
    match (pattern, ty) {
        (Pattern::Var(v), ty) => {
            env.insert(v.clone(), ty.clone());
            Ok(())
        }
        (Pattern::Tuple(ps), SemType::Product(l, r)) if ps.len() == 2 => {
            bind_pattern_type(&ps[0], l, env)?;
            bind_pattern_type(&ps[1], r, env)
        }
        _ => Err(LambdaError::Type(format!(
            "pattern {pattern} does not match type {ty}"
        ))),
    }
}

fn infer(term: &LambdaTerm, env: &BTreeMap<String, SemType>) -> Result<SemType, LambdaError> {
    match term {
        LambdaTerm::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| LambdaError::Type(format!("unbound variable {v}"))),
        LambdaTerm::Const(Constant::Word { formula, .. }) => Ok(sem_type(formula)),
        LambdaTerm::Const(other) => Err(LambdaError::Type(format!(
            "cannot infer a semantic type for {other:?}"
        ))),
        LambdaTerm::App(fun, arg) => {
            // a beta-redex types by binding the pattern at the argument's
            // inferred type
            if let LambdaTerm::Abs(pattern, body) = fun.as_ref() {
                let arg_ty = infer(arg, env)?;
                let mut env = env.clone();
                bind_pattern_type(pattern, &arg_ty, &mut env)?;
                return infer(body, &env);
            }
            let fun_ty = infer(fun, env)?;
            let SemType::Arrow(from, to) = fun_ty else {
                return Err(LambdaError::Type(format!(
                    "applied non-function of type {fun_ty}"
                )));
            };
            check(arg, &from, env)?;
            Ok(*to)
        }
        LambdaTerm::Tuple(parts) if parts.len() == 2 => Ok(SemType::product(
            infer(&parts[0], env)?,
            infer(&parts[1], env)?,
        )),
        LambdaTerm::Tuple(_) => Err(LambdaError::Type(
            "only binary tuples are inferable".to_string(),
        )),
        LambdaTerm::Abs(..) => Err(LambdaError::Type(
            "cannot infer an abstraction without an expected type".to_string(),
        )),
    }
}

// ---------------------------------------------------------------------------
// lexical homomorphisms

/// Which column of the lexical translation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homomorphism {
    /// Tensor contraction as the main operation.
    Contraction,
    /// Addition as the main operation, all embeddings vectors in one space.
    Additive,
}

/// The lexical homomorphism: maps each word constant, by its syntactic
/// type, to a term over embedding constants and the tensor operations.
#[derive(Debug, Clone)]
pub struct SemLexicon {
    pub column: Homomorphism,
    assignment: SpaceAssignment,
}

impl SemLexicon {
    pub fn new(column: Homomorphism, assignment: SpaceAssignment) -> SemLexicon {
        SemLexicon { column, assignment }
    }

    fn dim(&self, basic: &str) -> Result<usize, LambdaError> {
        Ok(self.assignment.dim(basic)?)
    }

    fn emb(&self, name: &str, shape: Vec<usize>) -> LambdaTerm {
        LambdaTerm::Const(Constant::Emb {
            name: name.to_string(),
            shape,
        })
    }

    /// The substitution for a word constant at its type.
    pub fn entry(&self, word: &str, formula: &Formula) -> Result<LambdaTerm, LambdaError> {
        use Formula as F;
        let missing = || LambdaError::MissingLexicalEntry {
            word: word.to_string(),
            formula: formula.to_string(),
        };
        let parse = |text: &str| crate::syntax::parse_formula(text).expect("fixed type parses");
        let contraction = self.column == Homomorphism::Contraction;

        // noun-like: the embedding itself
        if let F::Basic(space) = formula {
            return Ok(self.emb(word, vec![self.dim(space)?]));
        }
        // intransitive verb np\s: λv. verb ×₁ v  (or verb + v)
        if *formula == parse("np\\s") {
            let emb = if contraction {
                self.emb(word, vec![self.dim("s")?, self.dim("np")?])
            } else {
                self.emb(word, vec![self.dim("s")?])
            };
            let op = if contraction { TensorOp::MatVec } else { TensorOp::Add };
            return Ok(LambdaTerm::abs(
                Pattern::Var("v".into()),
                LambdaTerm::op(op, emb, LambdaTerm::var("v")),
            ));
        }
        // adjective np/n: λv. adj ×₁ v  (or adj + v)
        if *formula == parse("np/n") {
            let emb = if contraction {
                self.emb(word, vec![self.dim("np")?, self.dim("n")?])
            } else {
                self.emb(word, vec![self.dim("np")?])
            };
            let op = if contraction { TensorOp::MatVec } else { TensorOp::Add };
            return Ok(LambdaTerm::abs(
                Pattern::Var("v".into()),
                LambdaTerm::op(op, emb, LambdaTerm::var("v")),
            ));
        }
        // transitive verb (np\s)/np: object first by the type, so
        // λv. λu. (verb ×₂ v) ×₁ u  (or λv. λu. (verb + v) + u)
        if *formula == parse("(np\\s)/np") {
            let body = if contraction {
                let emb = self.emb(
                    word,
                    vec![self.dim("s")?, self.dim("np")?, self.dim("np")?],
                );
                LambdaTerm::op(
                    TensorOp::MatVec,
                    LambdaTerm::op(TensorOp::CubeVec, emb, LambdaTerm::var("v")),
                    LambdaTerm::var("u"),
                )
            } else {
                let emb = self.emb(word, vec![self.dim("s")?]);
                LambdaTerm::op(
                    TensorOp::Add,
                    LambdaTerm::op(TensorOp::Add, emb, LambdaTerm::var("v")),
                    LambdaTerm::var("u"),
                )
            };
            return Ok(LambdaTerm::abs(
                Pattern::Var("v".into()),
                LambdaTerm::abs(Pattern::Var("u".into()), body),
            ));
        }
        // coordinator (s\s)/s: element-wise multiplication in both columns,
        // first argument the right conjunct
        if *formula == parse("(s\\s)/s") {
            return Ok(LambdaTerm::abs(
                Pattern::Var("p".into()),
                LambdaTerm::abs(
                    Pattern::Var("q".into()),
                    LambdaTerm::op(TensorOp::ElemMul, LambdaTerm::var("p"), LambdaTerm::var("q")),
                ),
            ));
        }
        // ellipsis marker <>(np\s)\(np\s): the identity on verb-phrase
        // meanings in both columns
        if *formula == parse("<>(np\\s)\\(np\\s)") {
            return Ok(LambdaTerm::abs(
                Pattern::Var("m".into()),
                LambdaTerm::var("m"),
            ));
        }
        // anaphor <>np\(np/n): the subject copy multiplied element-wise
        // with the noun, in both columns
        if *formula == parse("<>np\\(np/n)") {
            return Ok(LambdaTerm::abs(
                Pattern::Var("x".into()),
                LambdaTerm::abs(
                    Pattern::Var("v".into()),
                    LambdaTerm::op(TensorOp::ElemMul, LambdaTerm::var("x"), LambdaTerm::var("v")),
                ),
            ));
        }
        // adverb (np\s)\(np\s): identity, or the additive pointwise lift
        if *formula == parse("(np\\s)\\(np\\s)") {
            if contraction {
                return Ok(LambdaTerm::abs(
                    Pattern::Var("m".into()),
                    LambdaTerm::var("m"),
                ));
            }
            let emb = self.emb(word, vec![self.dim("s")?]);
            return Ok(LambdaTerm::abs(
                Pattern::Var("m".into()),
                LambdaTerm::abs(
                    Pattern::Var("v".into()),
                    LambdaTerm::op(
                        TensorOp::Add,
                        emb,
                        LambdaTerm::app(LambdaTerm::var("m"), LambdaTerm::var("v")),
                    ),
                ),
            ));
        }
        // quantifier (s/(np\s))/n: λv. λz. z (quant ×₁ v)  (or +)
        if *formula == parse("(s/(np\\s))/n") {
            let inner = if contraction {
                let emb = self.emb(word, vec![self.dim("np")?, self.dim("n")?]);
                LambdaTerm::op(TensorOp::MatVec, emb, LambdaTerm::var("v"))
            } else {
                let emb = self.emb(word, vec![self.dim("np")?]);
                LambdaTerm::op(TensorOp::Add, emb, LambdaTerm::var("v"))
            };
            return Ok(LambdaTerm::abs(
                Pattern::Var("v".into()),
                LambdaTerm::abs(
                    Pattern::Var("z".into()),
                    LambdaTerm::app(LambdaTerm::var("z"), inner),
                ),
            ));
        }
        Err(missing())
    }
}

/// Homomorphic replacement of the word constants by their lexical terms;
/// operation and embedding constants stay.
pub fn substitute(term: &LambdaTerm, lexicon: &SemLexicon) -> Result<LambdaTerm, LambdaError> {
    match term {
        LambdaTerm::Const(Constant::Word { name, formula }) => lexicon.entry(name, formula),
        LambdaTerm::Const(_) | LambdaTerm::Var(_) => Ok(term.clone()),
        LambdaTerm::Abs(pattern, body) => Ok(LambdaTerm::Abs(
            pattern.clone(),
            Rc::new(substitute(body, lexicon)?),
        )),
        LambdaTerm::App(fun, arg) => Ok(LambdaTerm::App(
            Rc::new(substitute(fun, lexicon)?),
            Rc::new(substitute(arg, lexicon)?),
        )),
        LambdaTerm::Tuple(parts) => Ok(LambdaTerm::Tuple(
            parts
                .iter()
                .map(|p| substitute(p, lexicon).map(Rc::new))
                .collect::<Result<_, _>>()?,
        )),
    }
}

// ---------------------------------------------------------------------------
// evaluation

/// Evaluate a closed, normalized, tensor-typed term: embedding constants
/// resolve through the store and the operation constants through the tensor
/// primitives. A tuple of tensor terms denotes their tensor product.
pub fn evaluate_term(term: &LambdaTerm, store: &EmbeddingStore) -> Result<Tensor, LambdaError> {
    evaluate_with(term, &|name, shape| Some(store.get(name, shape)))
}

pub fn evaluate_with(
    term: &LambdaTerm,
    lookup: &dyn Fn(&str, &[usize]) -> Option<Tensor>,
) -> Result<Tensor, LambdaError> {
    match term {
        LambdaTerm::Const(Constant::Emb { name, shape }) => lookup(name, shape)
            .ok_or_else(|| LambdaError::MissingEmbedding(name.clone())),
        LambdaTerm::Const(Constant::Scalar(x)) => Ok(Tensor::scalar(*x)),
        LambdaTerm::App(outer, right) => {
            let LambdaTerm::App(inner, left) = outer.as_ref() else {
                return Err(LambdaError::NotATensor(term.to_string()));
            };
            let LambdaTerm::Const(Constant::Op(op)) = inner.as_ref() else {
                return Err(LambdaError::NotATensor(term.to_string()));
            };
            let left = evaluate_with(left, lookup)?;
            let right = evaluate_with(right, lookup)?;
            let out = match op {
                TensorOp::MatVec => tensor::mat_vec(&left, &right)?,
                TensorOp::CubeVec => tensor::cube_vec(&left, &right)?,
                TensorOp::ElemMul => tensor::elem_mul(&left, &right)?,
                TensorOp::Add => tensor::add(&left, &right)?,
            };
            Ok(out)
        }
        LambdaTerm::Tuple(parts) => {
            let mut out: Option<Tensor> = None;
            for part in parts {
                let t = evaluate_with(part, lookup)?;
                out = Some(match out {
                    None => t,
                    Some(acc) => tensor::tensor_product(&acc, &t),
                });
            }
            out.ok_or_else(|| LambdaError::NotATensor(term.to_string()))
        }
        other => Err(LambdaError::NotATensor(other.to_string())),
    }
}

/// The whole classical pipeline for one reading: translate, apply the word
/// constants, normalize, substitute the lexical homomorphism, normalize
/// again, and evaluate.
pub fn evaluate_reading(
    proof: &Proof,
    words: &[&str],
    lexicon: &SemLexicon,
    store: &EmbeddingStore,
) -> Result<(LambdaTerm, Tensor), LambdaError> {
    let abstract_form = abstract_term(proof, words)?;
    let substituted = substitute(&abstract_form, lexicon)?;
    let normal = normalize(&substituted)?;
    let value = evaluate_term(&normal, store)?;
    Ok((normal, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{prove, sentence_sequent, SearchLimits};
    use crate::syntax::{parse_formula, Lexicon};

    fn assignment() -> SpaceAssignment {
        SpaceAssignment::new()
            .with("np", 2)
            .with("s", 2)
            .with("n", 2)
    }

    fn word(name: &str, formula: &str) -> LambdaTerm {
        LambdaTerm::Const(Constant::Word {
            name: name.to_string(),
            formula: parse_formula(formula).unwrap(),
        })
    }

    #[test]
    fn identity_and_projection_reduce() {
        let c = word("c", "np");
        let id = LambdaTerm::abs(Pattern::Var("x".into()), LambdaTerm::var("x"));
        let reduced = normalize(&LambdaTerm::app(id, c.clone())).unwrap();
        assert_eq!(reduced, c);

        let proj = LambdaTerm::abs(
            Pattern::Tuple(vec![Pattern::Var("x".into()), Pattern::Var("y".into())]),
            LambdaTerm::var("y"),
        );
        let pair = LambdaTerm::pair(word("a", "np"), word("b", "np"));
        let reduced = normalize(&LambdaTerm::app(proj, pair)).unwrap();
        assert_eq!(reduced, word("b", "np"));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λx. λy. x) y  must not capture the free y
        let t = LambdaTerm::app(
            LambdaTerm::abs(
                Pattern::Var("x".into()),
                LambdaTerm::abs(Pattern::Var("y".into()), LambdaTerm::var("x")),
            ),
            LambdaTerm::var("y"),
        );
        let normal = normalize(&t).unwrap();
        let LambdaTerm::Abs(Pattern::Var(binder), body) = &normal else {
            panic!("expected an abstraction, got {normal}");
        };
        assert_ne!(binder, "y");
        assert_eq!(body.as_ref(), &LambdaTerm::var("y"));
    }

    #[test]
    fn simple_sentence_translates_to_application() {
        let lexicon = Lexicon::parse("alice\tnp\ndrinks\tnp\\s\n").unwrap();
        let goal = parse_formula("s").unwrap();
        let seqs = sentence_sequent(&["alice", "drinks"], &lexicon, &goal).unwrap();
        let outcome = prove(&seqs[0], 0, &SearchLimits::default());
        let term = abstract_term(&outcome.proofs[0], &["alice", "drinks"]).unwrap();
        let expected = LambdaTerm::app(word("drinks", "np\\s"), word("alice", "np"));
        assert!(alpha_eq(&term, &expected), "got {term}");
    }

    #[test]
    fn translated_terms_type_check() {
        let lexicon = Lexicon::parse(
            "alice\tnp\nbob\tnp\ndrinks\tnp\\s\nand\t(s\\s)/s\ndoes_too\t<>(np\\s)\\(np\\s)\n",
        )
        .unwrap();
        let goal = parse_formula("s").unwrap();
        let words = ["alice", "drinks", "and", "bob", "does_too"];
        let seqs = sentence_sequent(&words, &lexicon, &goal).unwrap();
        let outcome = prove(&seqs[0], 1, &SearchLimits::default());
        for proof in &outcome.proofs {
            let function = translate(proof);
            let expected = SemType::arrow(
                sem_type(&proof.conclusion().antecedent.formula()),
                sem_type(&proof.conclusion().succedent),
            );
            check_type(&function, &expected).unwrap_or_else(|e| {
                panic!("translation ill-typed: {e}\n{}", proof.trace());
            });
        }
    }

    #[test]
    fn ellipsis_term_matches_the_expected_shape() {
        // the first reading's abstract term is
        // (and ((does_too drinks) bob)) (drinks alice)
        let lexicon = Lexicon::parse(
            "alice\tnp\nbob\tnp\ndrinks\tnp\\s\nand\t(s\\s)/s\ndoes_too\t<>(np\\s)\\(np\\s)\n",
        )
        .unwrap();
        let goal = parse_formula("s").unwrap();
        let words = ["alice", "drinks", "and", "bob", "does_too"];
        let seqs = sentence_sequent(&words, &lexicon, &goal).unwrap();
        let outcome = prove(&seqs[0], 1, &SearchLimits::default());
        let expected = LambdaTerm::app(
            LambdaTerm::app(
                word("and", "(s\\s)/s"),
                LambdaTerm::app(
                    LambdaTerm::app(word("does_too", "<>(np\\s)\\(np\\s)"), word("drinks", "np\\s")),
                    word("bob", "np"),
                ),
            ),
            LambdaTerm::app(word("drinks", "np\\s"), word("alice", "np")),
        );
        let found = outcome.proofs.iter().any(|proof| {
            abstract_term(proof, &words)
                .map(|t| alpha_eq(&t, &expected))
                .unwrap_or(false)
        });
        assert!(found, "no reading produced the expected abstract term");
    }

    #[test]
    fn contraction_based_meaning_matches_closed_form() {
        let lexicon = Lexicon::parse(
            "alice\tnp\nbob\tnp\ndrinks\tnp\\s\nand\t(s\\s)/s\ndoes_too\t<>(np\\s)\\(np\\s)\n",
        )
        .unwrap();
        let goal = parse_formula("s").unwrap();
        let words = ["alice", "drinks", "and", "bob", "does_too"];
        let seqs = sentence_sequent(&words, &lexicon, &goal).unwrap();
        let outcome = prove(&seqs[0], 1, &SearchLimits::default());
        let sem = SemLexicon::new(Homomorphism::Contraction, assignment());
        let store = EmbeddingStore::seeded(5);
        let (_, value) = evaluate_reading(&outcome.proofs[0], &words, &sem, &store).unwrap();
        let alice = store.get("alice", &[2]);
        let bob = store.get("bob", &[2]);
        let drinks = store.get("drinks", &[2, 2]);
        // (drinks x1 bob) (.) (drinks x1 alice)
        for j in 0..2 {
            let lhs: f64 = (0..2).map(|k| drinks.data()[j * 2 + k] * bob.data()[k]).sum();
            let rhs: f64 = (0..2).map(|k| drinks.data()[j * 2 + k] * alice.data()[k]).sum();
            let want = lhs * rhs;
            let got = value.data()[j];
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn additive_meaning_at_dimension_one() {
        // with scalars alice=2, bob=3, drinks=5: (5+2)*(5+3) = 56
        let lexicon = Lexicon::parse(
            "alice\tnp\nbob\tnp\ndrinks\tnp\\s\nand\t(s\\s)/s\ndoes_too\t<>(np\\s)\\(np\\s)\n",
        )
        .unwrap();
        let goal = parse_formula("s").unwrap();
        let words = ["alice", "drinks", "and", "bob", "does_too"];
        let seqs = sentence_sequent(&words, &lexicon, &goal).unwrap();
        let outcome = prove(&seqs[0], 1, &SearchLimits::default());
        let assignment = SpaceAssignment::new().with("np", 1).with("s", 1).with("n", 1);
        let sem = SemLexicon::new(Homomorphism::Additive, assignment);
        let lookup = |name: &str, _shape: &[usize]| -> Option<Tensor> {
            match name {
                "alice" => Some(Tensor::vector(vec![2.0])),
                "bob" => Some(Tensor::vector(vec![3.0])),
                "drinks" => Some(Tensor::vector(vec![5.0])),
                _ => None,
            }
        };
        let abstract_form = abstract_term(&outcome.proofs[0], &words).unwrap();
        let substituted = substitute(&abstract_form, &sem).unwrap();
        let normal = normalize(&substituted).unwrap();
        let value = evaluate_with(&normal, &lookup).unwrap();
        assert_eq!(value.data(), &[56.0]);
    }

    #[test]
    fn quantifier_entry_type_checks_against_its_type() {
        let sem = SemLexicon::new(Homomorphism::Contraction, assignment());
        let quant = parse_formula("(s/(np\\s))/n").unwrap();
        let term = sem.entry("every", &quant).unwrap();
        // G = n -> ((np -> s) -> s); the embedding applications leave the
        // arrow shape intact
        let LambdaTerm::Abs(_, body) = &term else {
            panic!("expected an abstraction");
        };
        assert!(matches!(body.as_ref(), LambdaTerm::Abs(..)));
    }
}
