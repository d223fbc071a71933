//! The entangled backend: proofs compile functorially to compositions of
//! compact-closed and Frobenius primitives over the word spaces, then
//! evaluate on concrete tensors. Copying is the diagonal map, so the two
//! occurrences of a copied constituent stay correlated.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::embeddings::EmbeddingStore;
use crate::prover::{Proof, Rule, StructTree};
use crate::syntax::{space_shape, Formula, SpaceAssignment, SyntaxError};
use crate::tensor::{self, Tensor, TensorError};

#[derive(Debug, Error)]
pub enum FrobeniusError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("shape inconsistency at {context}: expected {expected:?}, found {found:?}")]
    ShapeInconsistency {
        context: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("missing tensor for word `{0}`")]
    MissingWord(String),
    #[error("word `{word}` has type {found}, but its fixed interpretation needs {expected}")]
    LexicalTypeMismatch {
        word: String,
        found: String,
        expected: String,
    },
    #[error("readings must share one shape: {0:?} vs {1:?}")]
    ReadingShapeMismatch(Vec<usize>, Vec<usize>),
}

/// A composition/tensor expression over the primitive morphisms of the
/// fixed-basis vector-space model, with word-tensor leaves.
///
/// Every expression has a checkable input and output shape; sequencing
/// requires adjacent shapes to match and parallel composition concatenates.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMapExpr {
    /// Identity on a factor list.
    Id(Vec<usize>),
    /// Inner product pairing two factors of the given dimension.
    Eps(usize),
    /// Identity-tensor introduction.
    Eta(usize),
    /// Diagonal copying: one factor becomes two correlated ones.
    Delta(usize),
    /// Diagonal extraction, the multiplication of the Frobenius algebra.
    Mu(usize),
    /// Coefficient sum.
    Iota(usize),
    /// All-ones vector introduction.
    Zeta(usize),
    /// Reorder factors: output position of input axis `i` is `perm[i]`.
    Sym {
        shape: Vec<usize>,
        perm: Vec<usize>,
    },
    /// Associativity marker; the identity on this flat representation,
    /// recorded for faithfulness to the categorical composite.
    Assoc(Vec<usize>),
    /// Sequential composition, applied left to right.
    Seq(Vec<LinearMapExpr>),
    /// Parallel (tensor) composition.
    Par(Vec<LinearMapExpr>),
    /// A word tensor used as a state: no input, output the word's space.
    Leaf {
        occurrence: usize,
        word: String,
        shape: Vec<usize>,
    },
}

impl LinearMapExpr {
    pub fn input_shape(&self) -> Vec<usize> {
        match self {
            LinearMapExpr::Id(shape) | LinearMapExpr::Assoc(shape) => shape.clone(),
            LinearMapExpr::Eps(d) | LinearMapExpr::Mu(d) => vec![*d, *d],
            LinearMapExpr::Eta(_) | LinearMapExpr::Zeta(_) => vec![],
            LinearMapExpr::Delta(d) | LinearMapExpr::Iota(d) => vec![*d],
            LinearMapExpr::Sym { shape, .. } => shape.clone(),
            LinearMapExpr::Seq(steps) => steps
                .first()
                .map(LinearMapExpr::input_shape)
                .unwrap_or_default(),
            LinearMapExpr::Par(parts) => {
                parts.iter().flat_map(|p| p.input_shape()).collect()
            }
            LinearMapExpr::Leaf { .. } => vec![],
        }
    }

    pub fn output_shape(&self) -> Vec<usize> {
        match self {
            LinearMapExpr::Id(shape) | LinearMapExpr::Assoc(shape) => shape.clone(),
            LinearMapExpr::Eps(_) | LinearMapExpr::Iota(_) => vec![],
            LinearMapExpr::Eta(d) | LinearMapExpr::Delta(d) => vec![*d, *d],
            LinearMapExpr::Mu(d) | LinearMapExpr::Zeta(d) => vec![*d],
            LinearMapExpr::Sym { shape, perm } => {
                let mut out = vec![0usize; shape.len()];
                for (i, &p) in perm.iter().enumerate() {
                    out[p] = shape[i];
                }
                out
            }
            LinearMapExpr::Seq(steps) => steps
                .last()
                .map(LinearMapExpr::output_shape)
                .unwrap_or_default(),
            LinearMapExpr::Par(parts) => {
                parts.iter().flat_map(|p| p.output_shape()).collect()
            }
            LinearMapExpr::Leaf { shape, .. } => shape.clone(),
        }
    }

    /// Indented one-primitive-per-line trace with shapes.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        self.trace_into(&mut out, 0);
        out
    }

    fn trace_into(&self, out: &mut String, depth: usize) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        match self {
            LinearMapExpr::Seq(steps) => {
                out.push_str("seq\n");
                for step in steps {
                    step.trace_into(out, depth + 1);
                }
                return;
            }
            LinearMapExpr::Par(parts) => {
                out.push_str("par\n");
                for part in parts {
                    part.trace_into(out, depth + 1);
                }
                return;
            }
            LinearMapExpr::Id(shape) => out.push_str(&format!("id {shape:?}")),
            LinearMapExpr::Eps(d) => out.push_str(&format!("eps {d}")),
            LinearMapExpr::Eta(d) => out.push_str(&format!("eta {d}")),
            LinearMapExpr::Delta(d) => out.push_str(&format!("delta {d}")),
            LinearMapExpr::Mu(d) => out.push_str(&format!("mu {d}")),
            LinearMapExpr::Iota(d) => out.push_str(&format!("iota {d}")),
            LinearMapExpr::Zeta(d) => out.push_str(&format!("zeta {d}")),
            LinearMapExpr::Sym { perm, .. } => out.push_str(&format!("sym {perm:?}")),
            LinearMapExpr::Assoc(_) => out.push_str("assoc"),
            LinearMapExpr::Leaf {
                occurrence,
                word,
                shape,
            } => out.push_str(&format!("word #{occurrence} {word} {shape:?}")),
        }
        out.push_str(&format!(
            "  : {:?} -> {:?}\n",
            self.input_shape(),
            self.output_shape()
        ));
    }
}

impl fmt::Display for LinearMapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.trace().trim_end())
    }
}

/// `η` on a composite space: pairs of identity tensors interleaved so the
/// output is the space followed by its (collapsed) dual copy.
fn eta_group(shape: &[usize]) -> LinearMapExpr {
    if shape.len() == 1 {
        return LinearMapExpr::Eta(shape[0]);
    }
    let n = shape.len();
    let pairs: Vec<LinearMapExpr> = shape.iter().map(|&d| LinearMapExpr::Eta(d)).collect();
    // after Par the axes come (a a)(b b)...; interleave to (a b ..)(a b ..)
    let mut perm = vec![0usize; 2 * n];
    for i in 0..n {
        perm[2 * i] = i;
        perm[2 * i + 1] = n + i;
    }
    let mut par_shape = Vec::with_capacity(2 * n);
    for &d in shape {
        par_shape.push(d);
        par_shape.push(d);
    }
    LinearMapExpr::Seq(vec![
        LinearMapExpr::Par(pairs),
        LinearMapExpr::Sym {
            shape: par_shape,
            perm,
        },
    ])
}

/// `ε` on a composite space: pair the first copy's axes with the second's.
fn eps_group(shape: &[usize]) -> LinearMapExpr {
    if shape.len() == 1 {
        return LinearMapExpr::Eps(shape[0]);
    }
    let n = shape.len();
    // interleave (a b ..)(a b ..) into (a a)(b b).. then contract pairs
    let mut perm = vec![0usize; 2 * n];
    for i in 0..n {
        perm[i] = 2 * i;
        perm[n + i] = 2 * i + 1;
    }
    let mut in_shape = Vec::with_capacity(2 * n);
    in_shape.extend_from_slice(shape);
    in_shape.extend_from_slice(shape);
    let pairs: Vec<LinearMapExpr> = shape.iter().map(|&d| LinearMapExpr::Eps(d)).collect();
    LinearMapExpr::Seq(vec![
        LinearMapExpr::Sym {
            shape: in_shape,
            perm,
        },
        LinearMapExpr::Par(pairs),
    ])
}

/// `Δ` on a composite space: duplicate each axis, then interleave so the
/// first copy's axes precede the second's.
fn delta_group(shape: &[usize]) -> LinearMapExpr {
    if shape.len() == 1 {
        return LinearMapExpr::Delta(shape[0]);
    }
    let n = shape.len();
    let deltas: Vec<LinearMapExpr> = shape.iter().map(|&d| LinearMapExpr::Delta(d)).collect();
    let mut perm = vec![0usize; 2 * n];
    for i in 0..n {
        perm[2 * i] = i;
        perm[2 * i + 1] = n + i;
    }
    let mut par_shape = Vec::with_capacity(2 * n);
    for &d in shape {
        par_shape.push(d);
        par_shape.push(d);
    }
    LinearMapExpr::Seq(vec![
        LinearMapExpr::Par(deltas),
        LinearMapExpr::Sym {
            shape: par_shape,
            perm,
        },
    ])
}

fn par3(left: Vec<usize>, mid: LinearMapExpr, right: Vec<usize>) -> LinearMapExpr {
    let mut parts = Vec::new();
    if !left.is_empty() {
        parts.push(LinearMapExpr::Id(left));
    }
    parts.push(mid);
    if !right.is_empty() {
        parts.push(LinearMapExpr::Id(right));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        LinearMapExpr::Par(parts)
    }
}

fn seq2(a: LinearMapExpr, b: LinearMapExpr) -> LinearMapExpr {
    LinearMapExpr::Seq(vec![a, b])
}

/// Compile a proof to the linear map interpreting it: input shape is the
/// antecedent's flattened space, output shape the succedent's.
///
/// The proof must pass `check_proof`; shape inconsistencies signal a prover
/// or interpretation bug and are reported loudly.
pub fn interpret(proof: &Proof, a: &SpaceAssignment) -> Result<LinearMapExpr, FrobeniusError> {
    let expr = interpret_node(proof, a)?;
    let concl = proof.conclusion();
    let want_in = space_shape(&concl.antecedent.formula(), a)?;
    let want_out = space_shape(&concl.succedent, a)?;
    check_shapes(&expr, &want_in, &want_out, "proof root")?;
    Ok(expr)
}

fn check_shapes(
    expr: &LinearMapExpr,
    want_in: &[usize],
    want_out: &[usize],
    context: &str,
) -> Result<(), FrobeniusError> {
    if expr.input_shape() != want_in {
        return Err(FrobeniusError::ShapeInconsistency {
            context: format!("{context} (input)"),
            expected: want_in.to_vec(),
            found: expr.input_shape(),
        });
    }
    if expr.output_shape() != want_out {
        return Err(FrobeniusError::ShapeInconsistency {
            context: format!("{context} (output)"),
            expected: want_out.to_vec(),
            found: expr.output_shape(),
        });
    }
    Ok(())
}

fn interpret_node(proof: &Proof, a: &SpaceAssignment) -> Result<LinearMapExpr, FrobeniusError> {
    let concl = proof.conclusion();
    match proof.rule() {
        Rule::Axiom => Ok(LinearMapExpr::Id(space_shape(
            &concl.antecedent.formula(),
            a,
        )?)),
        Rule::Compose => {
            let f = interpret_node(&proof.premises()[0], a)?;
            let g = interpret_node(&proof.premises()[1], a)?;
            Ok(seq2(f, g))
        }
        Rule::ResUnder => {
            // from f : A . T -> B conclude T -> A \ B: introduce the A pair,
            // feed the premise on the second copy
            let prem = proof.premises()[0].conclusion();
            let StructTree::Tensor(x, _) = &prem.antecedent else {
                unreachable!("checked proof");
            };
            let a_shape = space_shape(&x.formula(), a)?;
            let t_shape = space_shape(&concl.antecedent.formula(), a)?;
            let f = interpret_node(&proof.premises()[0], a)?;
            Ok(seq2(
                par3(vec![], eta_group(&a_shape), t_shape),
                par3(a_shape, f, vec![]),
            ))
        }
        Rule::ResOver => {
            let prem = proof.premises()[0].conclusion();
            let StructTree::Tensor(_, y) = &prem.antecedent else {
                unreachable!("checked proof");
            };
            let b_shape = space_shape(&y.formula(), a)?;
            let t_shape = space_shape(&concl.antecedent.formula(), a)?;
            let f = interpret_node(&proof.premises()[0], a)?;
            Ok(seq2(
                par3(t_shape, eta_group(&b_shape), vec![]),
                par3(vec![], f, b_shape),
            ))
        }
        Rule::UnResUnder => {
            // from g : Y -> A \ C conclude A . Y -> C by pairing the A's
            let StructTree::Tensor(x, _) = &concl.antecedent else {
                unreachable!("checked proof");
            };
            let a_shape = space_shape(&x.formula(), a)?;
            let c_shape = space_shape(&concl.succedent, a)?;
            let g = interpret_node(&proof.premises()[0], a)?;
            Ok(seq2(
                par3(a_shape.clone(), g, vec![]),
                par3(vec![], eps_group(&a_shape), c_shape),
            ))
        }
        Rule::UnResOver => {
            let StructTree::Tensor(_, y) = &concl.antecedent else {
                unreachable!("checked proof");
            };
            let b_shape = space_shape(&y.formula(), a)?;
            let c_shape = space_shape(&concl.succedent, a)?;
            let g = interpret_node(&proof.premises()[0], a)?;
            Ok(seq2(
                par3(vec![], g, b_shape.clone()),
                par3(c_shape, eps_group(&b_shape), vec![]),
            ))
        }
        // the modalities are transparent on spaces
        Rule::ResDia | Rule::UnResDia => interpret_node(&proof.premises()[0], a),
        Rule::AssocL | Rule::AssocR => {
            let f = interpret_node(&proof.premises()[0], a)?;
            let shape = space_shape(&concl.antecedent.formula(), a)?;
            Ok(seq2(LinearMapExpr::Assoc(shape), f))
        }
        Rule::Contract => {
            // insert the diagonal on the copied factor group
            let f = interpret_node(&proof.premises()[0], a)?;
            let prem = proof.premises()[0].conclusion();
            let (before, group, after) = contract_split(&concl.antecedent, &prem.antecedent, a)?;
            Ok(seq2(par3(before, delta_group(&group), after), f))
        }
        Rule::Move | Rule::Swap => {
            // a symmetry reordering the factor groups, then the premise
            let f = interpret_node(&proof.premises()[0], a)?;
            let prem = proof.premises()[0].conclusion();
            let perm = axis_permutation(&concl.antecedent, &prem.antecedent, a)?;
            let shape = space_shape(&concl.antecedent.formula(), a)?;
            Ok(LinearMapExpr::Seq(vec![
                LinearMapExpr::Sym { shape, perm },
                LinearMapExpr::Assoc(space_shape(&prem.antecedent.formula(), a)?),
                f,
            ]))
        }
        Rule::MonoTensor => {
            let f = interpret_node(&proof.premises()[0], a)?;
            let g = interpret_node(&proof.premises()[1], a)?;
            Ok(LinearMapExpr::Par(vec![f, g]))
        }
        Rule::MonoUnder => {
            // from f : A -> B and g : C -> D conclude B\C -> A\D:
            // B* C -> B* (A A*) D -> B* B A* D -> A* D
            let f_prem = proof.premises()[0].conclusion();
            let g_prem = proof.premises()[1].conclusion();
            let a_shape = space_shape(&f_prem.antecedent.formula(), a)?;
            let b_shape = space_shape(&f_prem.succedent, a)?;
            let d_shape = space_shape(&g_prem.succedent, a)?;
            let f = interpret_node(&proof.premises()[0], a)?;
            let g = interpret_node(&proof.premises()[1], a)?;
            let stage1 = LinearMapExpr::Par(vec![
                LinearMapExpr::Id(b_shape.clone()),
                eta_group(&a_shape),
                g,
            ]);
            let stage2 = LinearMapExpr::Par(vec![
                LinearMapExpr::Id(b_shape.clone()),
                f,
                LinearMapExpr::Id(a_shape.iter().chain(d_shape.iter()).copied().collect()),
            ]);
            let stage3 = par3(
                vec![],
                eps_group(&b_shape),
                a_shape.iter().chain(d_shape.iter()).copied().collect(),
            );
            Ok(LinearMapExpr::Seq(vec![stage1, stage2, stage3]))
        }
        Rule::MonoOver => {
            // from f : A -> B and g : C -> D conclude A/D -> B/C:
            // A D -> B (C C) D -> B C D D -> B C
            let f_prem = proof.premises()[0].conclusion();
            let g_prem = proof.premises()[1].conclusion();
            let b_shape = space_shape(&f_prem.succedent, a)?;
            let c_shape = space_shape(&g_prem.antecedent.formula(), a)?;
            let d_shape = space_shape(&g_prem.succedent, a)?;
            let f = interpret_node(&proof.premises()[0], a)?;
            let g = interpret_node(&proof.premises()[1], a)?;
            let stage1 = LinearMapExpr::Par(vec![
                f,
                eta_group(&c_shape),
                LinearMapExpr::Id(d_shape.clone()),
            ]);
            let stage2 = LinearMapExpr::Par(vec![
                LinearMapExpr::Id(b_shape.iter().chain(c_shape.iter()).copied().collect()),
                g,
                LinearMapExpr::Id(d_shape.clone()),
            ]);
            let stage3 = par3(
                b_shape.iter().chain(c_shape.iter()).copied().collect(),
                eps_group(&d_shape),
                vec![],
            );
            Ok(LinearMapExpr::Seq(vec![stage1, stage2, stage3]))
        }
    }
}

/// For a contraction node: the axis dims before the copied group, the
/// group's shape, and the dims after it.
fn contract_split(
    conclusion: &StructTree,
    premise: &StructTree,
    a: &SpaceAssignment,
) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>), FrobeniusError> {
    let site = crate::prover::structural_site(Rule::Contract, conclusion, premise)
        .expect("checked contraction has a site");
    let full = space_shape(&conclusion.formula(), a)?;
    let (offset, group_len) = subtree_axis_range(conclusion, &site, a)?;
    let group = full[offset..offset + group_len].to_vec();
    let before = full[..offset].to_vec();
    let after = full[offset + group_len..].to_vec();
    Ok((before, group, after))
}

/// Axis offset and length of the subtree at `path` within the flattened
/// antecedent space.
fn subtree_axis_range(
    tree: &StructTree,
    path: &[u8],
    a: &SpaceAssignment,
) -> Result<(usize, usize), FrobeniusError> {
    let mut offset = 0usize;
    let mut cur = tree;
    for step in path {
        match (cur, step) {
            (StructTree::Tensor(l, _), 0) => cur = l,
            (StructTree::Tensor(l, r), 1) => {
                offset += space_shape(&l.formula(), a)?.len();
                cur = r;
            }
            (StructTree::Diamond(inner), _) => cur = inner,
            _ => unreachable!("checked path"),
        }
    }
    let len = space_shape(&cur.formula(), a)?.len();
    Ok((offset, len))
}

type LeafKey = (Option<usize>, Formula, usize);

/// The axis permutation realised by a move/swap step: each conclusion leaf
/// maps to its axis range in the premise.
fn axis_permutation(
    conclusion: &StructTree,
    premise: &StructTree,
    a: &SpaceAssignment,
) -> Result<Vec<usize>, FrobeniusError> {
    let concl_leaves = leaf_axis_spans(conclusion, a)?;
    let prem_leaves = leaf_axis_spans(premise, a)?;
    debug_assert_eq!(concl_leaves.len(), prem_leaves.len());
    let mut used = vec![false; prem_leaves.len()];
    let mut axis_perm = Vec::new();
    for (key, span) in &concl_leaves {
        let (j, target_span) = prem_leaves
            .iter()
            .enumerate()
            .find(|(j, (k, _))| !used[*j] && k == key)
            .map(|(j, (_, s))| (j, s.clone()))
            .expect("a move step permutes the same leaves");
        used[j] = true;
        debug_assert_eq!(span.len(), target_span.len());
        axis_perm.extend(target_span);
    }
    Ok(axis_perm)
}

/// Leaves in order with their flattened axis index ranges; identical leaves
/// are numbered so copies match positionally.
fn leaf_axis_spans(
    tree: &StructTree,
    a: &SpaceAssignment,
) -> Result<Vec<(LeafKey, Vec<usize>)>, FrobeniusError> {
    let mut out = Vec::new();
    let mut axis = 0usize;
    let mut dup: BTreeMap<(Option<usize>, Formula), usize> = BTreeMap::new();
    for leaf in tree.leaves() {
        let StructTree::Leaf {
            occurrence,
            formula,
        } = leaf
        else {
            unreachable!("leaves() yields leaves");
        };
        let len = space_shape(formula, a)?.len();
        let copy_index = *dup
            .entry((*occurrence, formula.clone()))
            .and_modify(|c| *c += 1)
            .or_insert(0);
        let span: Vec<usize> = (axis..axis + len).collect();
        out.push(((*occurrence, formula.clone(), copy_index), span));
        axis += len;
    }
    Ok(out)
}

/// How a word's tensor enters the sentence state.
enum WordState {
    /// Content word: its embedding tensor, fetched by shape.
    Embedding,
    /// Fixed composite built from the Frobenius maps.
    Composite(LinearMapExpr),
}

/// The backend's lexical interpretations for function words; content words
/// default to their embedding tensors.
///
/// The coordinator realises element-wise sentence multiplication, the
/// ellipsis marker is the identity composite on the copied verb phrase, and
/// the anaphor multiplies its subject copy element-wise with the noun.
#[derive(Debug, Clone, Default)]
pub struct FrobeniusLexicon;

impl FrobeniusLexicon {
    fn state_for(
        &self,
        word: &str,
        formula: &Formula,
        a: &SpaceAssignment,
    ) -> Result<WordState, FrobeniusError> {
        let check = |expected: &str| -> Result<(), FrobeniusError> {
            let want = crate::syntax::parse_formula(expected).expect("fixed type parses");
            if *formula != want {
                return Err(FrobeniusError::LexicalTypeMismatch {
                    word: word.to_string(),
                    found: formula.to_string(),
                    expected: expected.to_string(),
                });
            }
            Ok(())
        };
        match word {
            "and" => {
                check("(s\\s)/s")?;
                Ok(WordState::Composite(spider3(a.dim("s")?)))
            }
            "does_too" => {
                check("<>(np\\s)\\(np\\s)")?;
                let np = a.dim("np")?;
                let s = a.dim("s")?;
                // identity on the verb-phrase space as a state, legs ordered
                // np s np s
                Ok(WordState::Composite(LinearMapExpr::Seq(vec![
                    LinearMapExpr::Par(vec![LinearMapExpr::Eta(np), LinearMapExpr::Eta(s)]),
                    LinearMapExpr::Sym {
                        shape: vec![np, np, s, s],
                        perm: vec![0, 2, 1, 3],
                    },
                ])))
            }
            "his" => {
                check("<>np\\(np/n)")?;
                let np = a.dim("np")?;
                let n = a.dim("n")?;
                if np != n {
                    return Err(FrobeniusError::ShapeInconsistency {
                        context: "anaphor composite needs dim(np) = dim(n)".to_string(),
                        expected: vec![np],
                        found: vec![n],
                    });
                }
                Ok(WordState::Composite(spider3(np)))
            }
            _ => Ok(WordState::Embedding),
        }
    }
}

/// The three-legged spider: 1 on the joint diagonal, realising element-wise
/// multiplication when two legs are contracted.
fn spider3(dim: usize) -> LinearMapExpr {
    LinearMapExpr::Seq(vec![
        LinearMapExpr::Zeta(dim),
        LinearMapExpr::Delta(dim),
        LinearMapExpr::Par(vec![
            LinearMapExpr::Delta(dim),
            LinearMapExpr::Id(vec![dim]),
        ]),
    ])
}

/// The full sentence expression: the word states in sentence order feeding
/// the proof's compiled map.
pub fn compile_sentence(
    proof: &Proof,
    words: &[&str],
    a: &SpaceAssignment,
    lexicon: &FrobeniusLexicon,
) -> Result<LinearMapExpr, FrobeniusError> {
    let morphism = interpret(proof, a)?;
    let states = word_states(&proof.conclusion().antecedent, words, a, lexicon)?;
    Ok(LinearMapExpr::Seq(vec![
        LinearMapExpr::Par(states),
        morphism,
    ]))
}

fn word_states(
    antecedent: &StructTree,
    words: &[&str],
    a: &SpaceAssignment,
    lexicon: &FrobeniusLexicon,
) -> Result<Vec<LinearMapExpr>, FrobeniusError> {
    let mut states = Vec::new();
    for leaf in antecedent.leaves() {
        let StructTree::Leaf {
            occurrence,
            formula,
        } = leaf
        else {
            unreachable!("leaves() yields leaves");
        };
        let occurrence = occurrence.expect("root sequent leaves carry occurrences");
        let word = words[occurrence];
        let shape = space_shape(formula, a)?;
        match lexicon.state_for(word, formula, a)? {
            WordState::Embedding => states.push(LinearMapExpr::Leaf {
                occurrence,
                word: word.to_string(),
                shape,
            }),
            WordState::Composite(expr) => {
                check_shapes(&expr, &[], &shape, &format!("composite for `{word}`"))?;
                states.push(expr);
            }
        }
    }
    Ok(states)
}

// ---------------------------------------------------------------------------
// evaluation

/// Evaluate a closed expression given tensors for its word leaves.
///
/// The state is kept as a list of blocks — an implicit tensor product — so
/// `η` introductions stay as small identity blocks until an `ε` consumes
/// them, and the full product space is never materialised.
pub fn evaluate(
    expr: &LinearMapExpr,
    words: &dyn Fn(&str, &[usize]) -> Option<Tensor>,
) -> Result<Tensor, FrobeniusError> {
    let input_shape = expr.input_shape();
    if !input_shape.is_empty() {
        return Err(FrobeniusError::ShapeInconsistency {
            context: "evaluate expects a state with no open input".to_string(),
            expected: vec![],
            found: input_shape,
        });
    }
    let mut state = BlockState::new();
    apply(expr, &mut state, 0, words)?;
    state.materialise()
}

/// Evaluate with embeddings served per `(word, shape)` by the store.
pub fn evaluate_with_store(
    expr: &LinearMapExpr,
    store: &EmbeddingStore,
) -> Result<Tensor, FrobeniusError> {
    evaluate(expr, &|word, shape| Some(store.get(word, shape)))
}

/// Open axes tracked as (block, axis-within-block) pairs; blocks combine
/// only when a contraction or diagonal joins them.
struct BlockState {
    blocks: Vec<Option<Tensor>>,
    axes: Vec<(usize, usize)>,
}

impl BlockState {
    fn new() -> BlockState {
        BlockState {
            blocks: Vec::new(),
            axes: Vec::new(),
        }
    }

    fn insert_block(&mut self, at: usize, tensor: Tensor) {
        let rank = tensor.rank();
        self.blocks.push(Some(tensor));
        let b = self.blocks.len() - 1;
        for i in (0..rank).rev() {
            self.axes.insert(at, (b, i));
        }
    }

    /// Contract state axes `x` and `y`, summing them away.
    fn contract_pair(&mut self, x: usize, y: usize) -> Result<(), FrobeniusError> {
        let (bx, ix) = self.axes[x];
        let (by, iy) = self.axes[y];
        if bx == by {
            let t = self.blocks[bx].take().unwrap();
            let reduced = tensor::contract(&t, &[(ix, iy)])?;
            self.blocks[bx] = Some(reduced);
            self.remove_axes(&[x, y]);
            self.reindex_block(bx, &[ix, iy]);
        } else {
            let tx = self.blocks[bx].take().unwrap();
            let ty = self.blocks[by].take().unwrap();
            let rx = tx.rank();
            let product = tensor::tensor_product(&tx, &ty);
            let joined = tensor::contract(&product, &[(ix, rx + iy)])?;
            self.blocks.push(Some(joined));
            let nb = self.blocks.len() - 1;
            let mut next = 0usize;
            let mut map_x = vec![usize::MAX; rx];
            for (i, slot) in map_x.iter_mut().enumerate() {
                if i != ix {
                    *slot = next;
                    next += 1;
                }
            }
            let ry = ty.rank();
            let mut map_y = vec![usize::MAX; ry];
            for (i, slot) in map_y.iter_mut().enumerate() {
                if i != iy {
                    *slot = next;
                    next += 1;
                }
            }
            self.remove_axes(&[x, y]);
            for entry in &mut self.axes {
                if entry.0 == bx {
                    *entry = (nb, map_x[entry.1]);
                } else if entry.0 == by {
                    *entry = (nb, map_y[entry.1]);
                }
            }
        }
        Ok(())
    }

    fn remove_axes(&mut self, positions: &[usize]) {
        let mut sorted: Vec<usize> = positions.to_vec();
        sorted.sort_unstable();
        for p in sorted.into_iter().rev() {
            self.axes.remove(p);
        }
    }

    fn reindex_block(&mut self, block: usize, removed: &[usize]) {
        for entry in &mut self.axes {
            if entry.0 == block {
                let shift = removed.iter().filter(|&&r| r < entry.1).count();
                entry.1 -= shift;
            }
        }
    }

    /// Duplicate state axis `x` diagonally: the block's axis becomes two
    /// correlated axes at positions `x` and `x + 1`.
    fn duplicate_axis(&mut self, x: usize) -> Result<(), FrobeniusError> {
        let (b, i) = self.axes[x];
        let t = self.blocks[b].take().unwrap();
        let d = t.shape()[i];
        let mut new_shape = t.shape().to_vec();
        new_shape.insert(i + 1, d);
        let mut out_data = vec![0.0; new_shape.iter().product()];
        let in_strides = t.strides();
        let out = Tensor::zeros(new_shape.clone());
        let out_strides = out.strides();
        for flat in 0..t.len() {
            let mut rem = flat;
            let mut dst = 0usize;
            for (axis, stride) in in_strides.iter().enumerate() {
                let idx = rem / stride;
                rem %= stride;
                let out_axis = if axis > i { axis + 1 } else { axis };
                dst += idx * out_strides[out_axis];
                if axis == i {
                    dst += idx * out_strides[i + 1];
                }
            }
            out_data[dst] = t.data()[flat];
        }
        self.blocks[b] = Some(Tensor::new(new_shape, out_data));
        for entry in &mut self.axes {
            if entry.0 == b && entry.1 > i {
                entry.1 += 1;
            }
        }
        self.axes.insert(x + 1, (b, i + 1));
        Ok(())
    }

    /// Collapse state axes `x`, `y` onto their diagonal; `x` survives.
    fn diagonal_pair(&mut self, x: usize, y: usize) -> Result<(), FrobeniusError> {
        let (bx, ix) = self.axes[x];
        let (by, iy) = self.axes[y];
        if bx == by {
            let t = self.blocks[bx].take().unwrap();
            let keep = ix.min(iy);
            let drop = ix.max(iy);
            let mut shape = t.shape().to_vec();
            shape.remove(drop);
            let strides = t.strides();
            let out = Tensor::zeros(shape.clone());
            let out_strides = out.strides();
            let mut out_data = vec![0.0; out.len()];
            for flat in 0..t.len() {
                let mut rem = flat;
                let mut keep_idx = 0usize;
                let mut drop_idx = 0usize;
                let mut dst = 0usize;
                for (axis, stride) in strides.iter().enumerate() {
                    let idx = rem / stride;
                    rem %= stride;
                    if axis == keep {
                        keep_idx = idx;
                    }
                    if axis == drop {
                        drop_idx = idx;
                        continue;
                    }
                    let out_axis = if axis > drop { axis - 1 } else { axis };
                    dst += idx * out_strides[out_axis];
                }
                if keep_idx == drop_idx {
                    out_data[dst] += t.data()[flat];
                }
            }
            self.blocks[bx] = Some(Tensor::new(shape, out_data));
            self.remove_axes(&[y]);
            self.reindex_block(bx, &[drop]);
        } else {
            // pointwise-join two blocks along the pair; the joined block's
            // axes are bx's axes then by's minus the dropped one
            let tx = self.blocks[bx].take().unwrap();
            let ty = self.blocks[by].take().unwrap();
            let rx = tx.rank();
            let ry = ty.rank();
            let mut shape: Vec<usize> = tx.shape().to_vec();
            shape.extend(
                ty.shape()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &s)| (i != iy).then_some(s)),
            );
            let tx_strides = tx.strides();
            let ty_strides = ty.strides();
            let out = Tensor::zeros(shape.clone());
            let out_strides = out.strides();
            let mut out_data = vec![0.0; out.len()];
            for fx in 0..tx.len() {
                let mut rem = fx;
                let mut diag = 0usize;
                let mut dst_base = 0usize;
                for (axis, stride) in tx_strides.iter().enumerate() {
                    let idx = rem / stride;
                    rem %= stride;
                    if axis == ix {
                        diag = idx;
                    }
                    dst_base += idx * out_strides[axis];
                }
                for fy in 0..ty.len() {
                    let mut rem = fy;
                    let mut matches = true;
                    let mut dst = dst_base;
                    let mut out_axis = rx;
                    for (axis, stride) in ty_strides.iter().enumerate() {
                        let idx = rem / stride;
                        rem %= stride;
                        if axis == iy {
                            if idx != diag {
                                matches = false;
                                break;
                            }
                            continue;
                        }
                        dst += idx * out_strides[out_axis];
                        out_axis += 1;
                    }
                    if matches {
                        out_data[dst] = tx.data()[fx] * ty.data()[fy];
                    }
                }
            }
            self.blocks.push(Some(Tensor::new(shape, out_data)));
            let nb = self.blocks.len() - 1;
            let mut map_y = vec![usize::MAX; ry];
            let mut next = rx;
            for (i, slot) in map_y.iter_mut().enumerate() {
                if i != iy {
                    *slot = next;
                    next += 1;
                }
            }
            self.remove_axes(&[y]);
            for entry in &mut self.axes {
                if entry.0 == bx {
                    *entry = (nb, entry.1);
                } else if entry.0 == by {
                    *entry = (nb, map_y[entry.1]);
                }
            }
        }
        Ok(())
    }

    /// Sum away state axis `x`.
    fn sum_axis(&mut self, x: usize) -> Result<(), FrobeniusError> {
        let (b, i) = self.axes[x];
        let t = self.blocks[b].take().unwrap();
        let d = t.shape()[i];
        let ones = tensor::frob_zeta(1.0, d);
        let rx = t.rank();
        let product = tensor::tensor_product(&t, &ones);
        let reduced = tensor::contract(&product, &[(i, rx)])?;
        self.blocks[b] = Some(reduced);
        self.remove_axes(&[x]);
        self.reindex_block(b, &[i]);
        Ok(())
    }

    /// Assemble the remaining open axes, in order, into one tensor.
    fn materialise(mut self) -> Result<Tensor, FrobeniusError> {
        let mut scalar = 1.0;
        let open_blocks: Vec<usize> = {
            let mut order = Vec::new();
            for (b, _) in &self.axes {
                if !order.contains(b) {
                    order.push(*b);
                }
            }
            order
        };
        for (slot, block) in self.blocks.iter_mut().enumerate() {
            if open_blocks.contains(&slot) {
                continue;
            }
            if let Some(t) = block.take() {
                scalar *= t.scalar_value()?;
            }
        }
        if self.axes.is_empty() {
            return Ok(Tensor::scalar(scalar));
        }
        let mut combined: Option<Tensor> = None;
        let mut axis_base: BTreeMap<usize, usize> = BTreeMap::new();
        for &b in &open_blocks {
            let t = self.blocks[b].take().unwrap();
            let base = combined.as_ref().map_or(0, Tensor::rank);
            axis_base.insert(b, base);
            combined = Some(match combined {
                None => t,
                Some(acc) => tensor::tensor_product(&acc, &t),
            });
        }
        let mut combined = combined.unwrap();
        if scalar != 1.0 {
            let data: Vec<f64> = combined.data().iter().map(|v| v * scalar).collect();
            combined = Tensor::new(combined.shape().to_vec(), data);
        }
        // permute the combined axes into state order
        let mut perm = vec![0usize; self.axes.len()];
        for (out_pos, (b, i)) in self.axes.iter().enumerate() {
            perm[axis_base[b] + i] = out_pos;
        }
        Ok(tensor::permute(&combined, &perm)?)
    }
}

/// Apply `expr` to the state, its inputs starting at state axis `at`;
/// returns the number of output axes it leaves there.
fn apply(
    expr: &LinearMapExpr,
    state: &mut BlockState,
    at: usize,
    words: &dyn Fn(&str, &[usize]) -> Option<Tensor>,
) -> Result<usize, FrobeniusError> {
    match expr {
        LinearMapExpr::Id(shape) | LinearMapExpr::Assoc(shape) => Ok(shape.len()),
        LinearMapExpr::Eps(_) => {
            state.contract_pair(at, at + 1)?;
            Ok(0)
        }
        LinearMapExpr::Eta(d) => {
            state.insert_block(at, Tensor::identity(*d));
            Ok(2)
        }
        LinearMapExpr::Delta(_) => {
            state.duplicate_axis(at)?;
            Ok(2)
        }
        LinearMapExpr::Mu(_) => {
            state.diagonal_pair(at, at + 1)?;
            Ok(1)
        }
        LinearMapExpr::Iota(_) => {
            state.sum_axis(at)?;
            Ok(0)
        }
        LinearMapExpr::Zeta(d) => {
            state.insert_block(at, tensor::frob_zeta(1.0, *d));
            Ok(1)
        }
        LinearMapExpr::Sym { shape, perm } => {
            let n = shape.len();
            let moved: Vec<(usize, usize)> = state.axes[at..at + n].to_vec();
            let mut reordered = vec![(0usize, 0usize); n];
            for (i, &p) in perm.iter().enumerate() {
                reordered[p] = moved[i];
            }
            state.axes.splice(at..at + n, reordered);
            Ok(n)
        }
        LinearMapExpr::Seq(steps) => {
            let mut width = steps
                .first()
                .map(|s| s.input_shape().len())
                .unwrap_or_default();
            for step in steps {
                debug_assert_eq!(step.input_shape().len(), width, "sequence shapes must chain");
                width = apply(step, state, at, words)?;
            }
            Ok(width)
        }
        LinearMapExpr::Par(parts) => {
            let mut cursor = at;
            for part in parts {
                let consumed = part.input_shape().len();
                let produced = apply(part, state, cursor, words)?;
                let _ = consumed;
                cursor += produced;
            }
            Ok(cursor - at)
        }
        LinearMapExpr::Leaf { word, shape, .. } => {
            let tensor =
                words(word, shape).ok_or_else(|| FrobeniusError::MissingWord(word.clone()))?;
            if tensor.shape() != shape.as_slice() {
                return Err(FrobeniusError::ShapeInconsistency {
                    context: format!("tensor for `{word}`"),
                    expected: shape.clone(),
                    found: tensor.shape().to_vec(),
                });
            }
            state.insert_block(at, tensor);
            Ok(shape.len())
        }
    }
}

// ---------------------------------------------------------------------------
// comparing readings

pub const READING_TOLERANCE: f64 = 1e-9;

/// Pairwise comparison of evaluated readings.
#[derive(Debug, Clone)]
pub struct ReadingComparison {
    /// Max-norm relative difference between readings.
    pub rel_diff: Vec<Vec<f64>>,
    /// Cosine similarity of the flattened tensors; `None` for zero vectors.
    pub cosine: Vec<Vec<Option<f64>>>,
    /// Whether the pair agrees within the relative tolerance.
    pub equal: Vec<Vec<bool>>,
    pub tolerance: f64,
}

/// Relative difference under the max norm; zero against zero is equal.
pub fn relative_difference(u: &Tensor, v: &Tensor) -> f64 {
    let max_u = u.data().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let max_v = v.data().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = max_u.max(max_v);
    if scale == 0.0 {
        return 0.0;
    }
    let diff = u
        .data()
        .iter()
        .zip(v.data())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    diff / scale
}

/// Pairwise relative differences, cosines, and equal/distinct verdicts at
/// the reading tolerance.
pub fn compare_readings(outputs: &[Tensor]) -> Result<ReadingComparison, FrobeniusError> {
    for pair in outputs.windows(2) {
        if pair[0].shape() != pair[1].shape() {
            return Err(FrobeniusError::ReadingShapeMismatch(
                pair[0].shape().to_vec(),
                pair[1].shape().to_vec(),
            ));
        }
    }
    let n = outputs.len();
    let mut rel_diff = vec![vec![0.0; n]; n];
    let mut cos = vec![vec![None; n]; n];
    let mut equal = vec![vec![true; n]; n];
    for i in 0..n {
        for j in 0..n {
            let d = relative_difference(&outputs[i], &outputs[j]);
            rel_diff[i][j] = d;
            equal[i][j] = d <= READING_TOLERANCE;
            let u = Tensor::vector(outputs[i].data().to_vec());
            let v = Tensor::vector(outputs[j].data().to_vec());
            cos[i][j] = tensor::cosine(&u, &v)?;
        }
    }
    Ok(ReadingComparison {
        rel_diff,
        cosine: cos,
        equal,
        tolerance: READING_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{prove, sentence_sequent, Sequent, SearchLimits};
    use crate::syntax::{parse_formula, Lexicon};

    fn assignment() -> SpaceAssignment {
        SpaceAssignment::new()
            .with("np", 2)
            .with("s", 2)
            .with("n", 2)
    }

    fn lexicon() -> Lexicon {
        Lexicon::parse(concat!(
            "alice\tnp\n",
            "bob\tnp\n",
            "drinks\tnp\\s\n",
            "and\t(s\\s)/s\n",
            "does_too\t<>(np\\s)\\(np\\s)\n",
        ))
        .unwrap()
    }

    #[test]
    fn axiom_interprets_as_identity() {
        let np = parse_formula("np").unwrap();
        let proof = Proof::new(
            Rule::Axiom,
            vec![],
            Sequent::new(StructTree::word_leaf(0, np.clone()), np),
        );
        let expr = interpret(&proof, &assignment()).unwrap();
        assert_eq!(expr, LinearMapExpr::Id(vec![2]));
    }

    #[test]
    fn simple_sentence_is_a_contraction() {
        // evaluation of "alice drinks" equals sum_i alice_i drinks_{i j}
        let goal = parse_formula("s").unwrap();
        let seqs = sentence_sequent(&["alice", "drinks"], &lexicon(), &goal).unwrap();
        let outcome = prove(&seqs[0], 0, &SearchLimits::default());
        let proof = &outcome.proofs[0];
        let a = assignment();
        let expr = compile_sentence(proof, &["alice", "drinks"], &a, &FrobeniusLexicon).unwrap();

        let alice = Tensor::vector(vec![2.0, 3.0]);
        let drinks = Tensor::matrix(vec![vec![1.0, -1.0], vec![0.5, 2.0]]);
        let lookup = |word: &str, _shape: &[usize]| -> Option<Tensor> {
            match word {
                "alice" => Some(alice.clone()),
                "drinks" => Some(drinks.clone()),
                _ => None,
            }
        };
        let out = evaluate(&expr, &lookup).unwrap();
        let want = [2.0 * 1.0 + 3.0 * 0.5, 2.0 * (-1.0) + 3.0 * 2.0];
        assert_eq!(out.shape(), &[2]);
        for (got, want) in out.data().iter().zip(&want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn ellipsis_sentence_matches_closed_form() {
        let goal = parse_formula("s").unwrap();
        let words = ["alice", "drinks", "and", "bob", "does_too"];
        let seqs = sentence_sequent(&words, &lexicon(), &goal).unwrap();
        let outcome = prove(&seqs[0], 1, &SearchLimits::default());
        assert!(!outcome.proofs.is_empty());
        let a = assignment();
        let store = EmbeddingStore::seeded(11);
        for proof in &outcome.proofs {
            let expr = compile_sentence(proof, &words, &a, &FrobeniusLexicon).unwrap();
            let out = evaluate_with_store(&expr, &store).unwrap();
            let alice = store.get("alice", &[2]);
            let bob = store.get("bob", &[2]);
            let drinks = store.get("drinks", &[2, 2]);
            // out[j] = sum_i alice[i] bob[i] drinks[i][j]
            for j in 0..2 {
                let want: f64 = (0..2)
                    .map(|i| alice.data()[i] * bob.data()[i] * drinks.data()[i * 2 + j])
                    .sum();
                let got = out.data()[j];
                assert!(
                    (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                    "reading disagrees with closed form: {got} vs {want}\n{}",
                    proof.trace()
                );
            }
        }
    }

    #[test]
    fn compare_readings_verdicts() {
        let v = Tensor::vector(vec![1.0, 2.0]);
        let same = compare_readings(&[v.clone(), v.clone()]).unwrap();
        assert!(same.equal[0][1]);
        assert!((same.cosine[0][1].unwrap() - 1.0).abs() < 1e-12);

        let double = Tensor::vector(vec![2.0, 4.0]);
        let scaled = compare_readings(&[v.clone(), double]).unwrap();
        assert!(!scaled.equal[0][1]);
        assert!((scaled.cosine[0][1].unwrap() - 1.0).abs() < 1e-12);

        let mismatched = compare_readings(&[v, Tensor::vector(vec![1.0, 2.0, 3.0])]);
        assert!(mismatched.is_err());
    }
}
