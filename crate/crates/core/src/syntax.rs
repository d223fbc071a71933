//! Formulas of the modal Lambek calculus, lexicons, and the two type-level
//! interpretations: vector-space shapes and semantic function types.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

/// A syntactic type built from basic types with `⊗`, `\`, `/`, `◇`, `□`.
///
/// Surface notation uses `*` for `⊗`, `<>` for `◇` and `[]` for `□`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// Basic type such as `np`, `n`, `s`.
    Basic(String),
    /// Product `A * B`.
    Tensor(Rc<Formula>, Rc<Formula>),
    /// Left implication `A \ B`: expects an `A` to the left, yields a `B`.
    Under(Rc<Formula>, Rc<Formula>),
    /// Right implication `A / B`: expects a `B` to the right, yields an `A`.
    Over(Rc<Formula>, Rc<Formula>),
    /// Control modality `<> A`.
    Diamond(Rc<Formula>),
    /// Residual modality `[] A`.
    Box_(Rc<Formula>),
}

impl Formula {
    pub fn basic(name: &str) -> Formula {
        Formula::Basic(name.to_string())
    }

    pub fn tensor(l: Formula, r: Formula) -> Formula {
        Formula::Tensor(Rc::new(l), Rc::new(r))
    }

    pub fn under(l: Formula, r: Formula) -> Formula {
        Formula::Under(Rc::new(l), Rc::new(r))
    }

    pub fn over(l: Formula, r: Formula) -> Formula {
        Formula::Over(Rc::new(l), Rc::new(r))
    }

    pub fn diamond(f: Formula) -> Formula {
        Formula::Diamond(Rc::new(f))
    }

    pub fn box_(f: Formula) -> Formula {
        Formula::Box_(Rc::new(f))
    }

    /// All basic-type names occurring in the formula, in occurrence order.
    pub fn basic_occurrences(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_basics(&mut out);
        out
    }

    fn collect_basics<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Basic(name) => out.push(name),
            Formula::Tensor(l, r) | Formula::Under(l, r) | Formula::Over(l, r) => {
                l.collect_basics(out);
                r.collect_basics(out);
            }
            Formula::Diamond(inner) | Formula::Box_(inner) => inner.collect_basics(out),
        }
    }
}

// Precedence levels for printing/parsing: unary modalities bind tightest,
// then `*`, then the slashes. Slashes are non-associative; `*` associates
// to the right in surface syntax.
const PREC_SLASH: u8 = 0;
const PREC_TENSOR: u8 = 1;
const PREC_UNARY: u8 = 2;

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Basic(_) => 3,
            Formula::Diamond(_) | Formula::Box_(_) => PREC_UNARY,
            Formula::Tensor(..) => PREC_TENSOR,
            Formula::Under(..) | Formula::Over(..) => PREC_SLASH,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let me = self.prec();
        let parens = me < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Basic(name) => write!(f, "{name}")?,
            Formula::Diamond(inner) => {
                write!(f, "<>")?;
                inner.fmt_prec(f, PREC_UNARY)?;
            }
            Formula::Box_(inner) => {
                write!(f, "[]")?;
                inner.fmt_prec(f, PREC_UNARY)?;
            }
            Formula::Tensor(l, r) => {
                // right-associative: left operand needs the next level up
                l.fmt_prec(f, PREC_TENSOR + 1)?;
                write!(f, "*")?;
                r.fmt_prec(f, PREC_TENSOR)?;
            }
            Formula::Under(l, r) => {
                l.fmt_prec(f, PREC_SLASH + 1)?;
                write!(f, "\\")?;
                r.fmt_prec(f, PREC_SLASH + 1)?;
            }
            Formula::Over(l, r) => {
                l.fmt_prec(f, PREC_SLASH + 1)?;
                write!(f, "/")?;
                r.fmt_prec(f, PREC_SLASH + 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("lexicon line {line}: {msg}")]
    Lexicon { line: usize, msg: String },
    #[error("unknown basic type `{0}`")]
    UnknownBasicType(String),
}

/// Parse the surface notation for formulas.
///
/// Grammar: `F ::= atom | '(' F ')' | '<>' F | '[]' F | F '\' F | F '/' F | F '*' F`
/// with precedence `<>`,`[]` > `*` > `\`,`/`. Slashes are non-associative and
/// need explicit parentheses when nested on the same level.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut parser = FormulaParser {
        src: text.as_bytes(),
        pos: 0,
    };
    let formula = parser.slash_level()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.err("unexpected trailing input"));
    }
    Ok(formula)
}

/// Render a formula in the surface notation accepted by [`parse_formula`].
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

struct FormulaParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> FormulaParser<'a> {
    fn err(&self, msg: &str) -> SyntaxError {
        SyntaxError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    // slashes: a single optional non-associative `\` or `/` between tensor levels
    fn slash_level(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.tensor_level()?;
        match self.peek() {
            Some(b'\\') => {
                self.pos += 1;
                let right = self.tensor_level()?;
                self.no_more_slash()?;
                Ok(Formula::under(left, right))
            }
            Some(b'/') => {
                self.pos += 1;
                let right = self.tensor_level()?;
                self.no_more_slash()?;
                Ok(Formula::over(left, right))
            }
            _ => Ok(left),
        }
    }

    fn no_more_slash(&mut self) -> Result<(), SyntaxError> {
        if matches!(self.peek(), Some(b'\\') | Some(b'/')) {
            Err(self.err("slashes are non-associative; add parentheses"))
        } else {
            Ok(())
        }
    }

    // `*` is right-associative in surface syntax
    fn tensor_level(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.unary_level()?;
        if self.peek() == Some(b'*') {
            self.pos += 1;
            let right = self.tensor_level()?;
            Ok(Formula::tensor(left, right))
        } else {
            Ok(left)
        }
    }

    fn unary_level(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat("<>") {
            return Ok(Formula::diamond(self.unary_level()?));
        }
        if self.eat("[]") {
            return Ok(Formula::box_(self.unary_level()?));
        }
        self.atom_level()
    }

    fn atom_level(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.slash_level()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(self.err("expected `)`"))
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Formula::basic(name))
            }
            Some(_) => Err(self.err("expected an atom, `(`, `<>` or `[]`")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Word-to-type assignment. A word may carry several alternative types.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<Formula>>,
}

impl Lexicon {
    pub fn new() -> Lexicon {
        Lexicon::default()
    }

    pub fn add(&mut self, word: &str, formula: Formula) {
        self.entries.entry(word.to_string()).or_default().push(formula);
    }

    pub fn lookup(&self, word: &str) -> Option<&[Formula]> {
        self.entries.get(word).map(|v| v.as_slice())
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }

    /// Parse the lexicon file format: one `word<TAB>formula` entry per line,
    /// `#` starting a comment line, repeated words accumulating alternatives.
    pub fn parse(text: &str) -> Result<Lexicon, SyntaxError> {
        let mut lexicon = Lexicon::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, formula_text) = line.split_once('\t').ok_or(SyntaxError::Lexicon {
                line: idx + 1,
                msg: "expected `word<TAB>formula`".to_string(),
            })?;
            let word = word.trim();
            if word.is_empty() {
                return Err(SyntaxError::Lexicon {
                    line: idx + 1,
                    msg: "empty word".to_string(),
                });
            }
            let formula = parse_formula(formula_text).map_err(|e| SyntaxError::Lexicon {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            lexicon.add(word, formula);
        }
        Ok(lexicon)
    }
}

/// Dimension of the vector space interpreting each basic type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpaceAssignment {
    dims: BTreeMap<String, usize>,
}

impl SpaceAssignment {
    pub fn new() -> SpaceAssignment {
        SpaceAssignment::default()
    }

    /// Panics if `dim` is zero; every space must have dimension >= 1.
    pub fn set(&mut self, basic: &str, dim: usize) {
        assert!(dim >= 1, "space dimension must be >= 1");
        self.dims.insert(basic.to_string(), dim);
    }

    pub fn with(mut self, basic: &str, dim: usize) -> SpaceAssignment {
        self.set(basic, dim);
        self
    }

    pub fn dim(&self, basic: &str) -> Result<usize, SyntaxError> {
        self.dims
            .get(basic)
            .copied()
            .ok_or_else(|| SyntaxError::UnknownBasicType(basic.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.dims.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// The ordered factor dimensions of the space interpreting `f`.
///
/// Adjoints are collapsed, so `⊗`, `\` and `/` all concatenate the operand
/// shapes, and the modalities are transparent.
pub fn space_shape(f: &Formula, a: &SpaceAssignment) -> Result<Vec<usize>, SyntaxError> {
    let mut shape = Vec::new();
    shape_into(f, a, &mut shape)?;
    Ok(shape)
}

fn shape_into(f: &Formula, a: &SpaceAssignment, out: &mut Vec<usize>) -> Result<(), SyntaxError> {
    match f {
        Formula::Basic(name) => {
            out.push(a.dim(name)?);
            Ok(())
        }
        Formula::Tensor(l, r) | Formula::Under(l, r) | Formula::Over(l, r) => {
            shape_into(l, a, out)?;
            shape_into(r, a, out)
        }
        Formula::Diamond(inner) | Formula::Box_(inner) => shape_into(inner, a, out),
    }
}

/// Semantic function type over indexed vector spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemType {
    /// The space of a basic type.
    Atom(String),
    Product(Box<SemType>, Box<SemType>),
    Arrow(Box<SemType>, Box<SemType>),
}

impl SemType {
    pub fn atom(name: &str) -> SemType {
        SemType::Atom(name.to_string())
    }

    pub fn product(l: SemType, r: SemType) -> SemType {
        SemType::Product(Box::new(l), Box::new(r))
    }

    pub fn arrow(from: SemType, to: SemType) -> SemType {
        SemType::Arrow(Box::new(from), Box::new(to))
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::Atom(name) => write!(f, "{name}"),
            SemType::Product(l, r) => write!(f, "({l} x {r})"),
            SemType::Arrow(from, to) => write!(f, "({from} -> {to})"),
        }
    }
}

/// The semantic type of a formula.
///
/// `A\B` maps to `G(A) -> G(B)`. `A/B` maps to `G(B) -> G(A)`: the argument
/// comes first, which is the direction under which the lexical terms
/// type-check. Modalities are transparent.
pub fn sem_type(f: &Formula) -> SemType {
    match f {
        Formula::Basic(name) => SemType::atom(name),
        Formula::Tensor(l, r) => SemType::product(sem_type(l), sem_type(r)),
        Formula::Under(l, r) => SemType::arrow(sem_type(l), sem_type(r)),
        Formula::Over(l, r) => SemType::arrow(sem_type(r), sem_type(l)),
        Formula::Diamond(inner) | Formula::Box_(inner) => sem_type(inner),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np() -> Formula {
        Formula::basic("np")
    }

    fn s() -> Formula {
        Formula::basic("s")
    }

    #[test]
    fn parses_atoms_and_slashes() {
        assert_eq!(parse_formula("np").unwrap(), np());
        assert_eq!(
            parse_formula("(np\\s)/np").unwrap(),
            Formula::over(Formula::under(np(), s()), np())
        );
    }

    #[test]
    fn parses_modal_auxiliary_type() {
        let aux = parse_formula("<>(np\\s)\\(np\\s)").unwrap();
        assert_eq!(
            aux,
            Formula::under(
                Formula::diamond(Formula::under(np(), s())),
                Formula::under(np(), s())
            )
        );
    }

    #[test]
    fn unary_binds_tighter_than_slash() {
        // <>np\(np/n) must parse as (<>np) \ (np/n)
        let f = parse_formula("<>np\\(np/n)").unwrap();
        assert_eq!(
            f,
            Formula::under(
                Formula::diamond(np()),
                Formula::over(np(), Formula::basic("n"))
            )
        );
    }

    #[test]
    fn rejects_unparenthesized_slash_nesting() {
        assert!(parse_formula("np\\s/np").is_err());
        assert!(parse_formula("a\\b\\c").is_err());
    }

    #[test]
    fn reports_error_position() {
        match parse_formula("np\\") {
            Err(SyntaxError::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn space_shape_follows_factor_order() {
        let a = SpaceAssignment::new().with("np", 4).with("s", 2);
        assert_eq!(space_shape(&np(), &a).unwrap(), vec![4]);
        let tv = parse_formula("(np\\s)/np").unwrap();
        assert_eq!(space_shape(&tv, &a).unwrap(), vec![4, 2, 4]);
        let dia_vp = parse_formula("<>(np\\s)").unwrap();
        assert_eq!(space_shape(&dia_vp, &a).unwrap(), vec![4, 2]);
    }

    #[test]
    fn space_shape_rejects_unknown_basic() {
        let a = SpaceAssignment::new().with("np", 4);
        assert!(space_shape(&s(), &a).is_err());
    }

    #[test]
    fn shape_length_matches_basic_occurrences() {
        let a = SpaceAssignment::new().with("np", 4).with("s", 2).with("n", 3);
        for text in ["np", "(np\\s)/np", "<>np\\(np/n)", "(s\\s)/s", "[](np*s)"] {
            let f = parse_formula(text).unwrap();
            assert_eq!(
                space_shape(&f, &a).unwrap().len(),
                f.basic_occurrences().len()
            );
        }
    }

    #[test]
    fn sem_type_directions() {
        let itv = parse_formula("np\\s").unwrap();
        assert_eq!(
            sem_type(&itv),
            SemType::arrow(SemType::atom("np"), SemType::atom("s"))
        );
        // modality transparency
        assert_eq!(sem_type(&parse_formula("<>np").unwrap()), SemType::atom("np"));
        assert_eq!(
            sem_type(&parse_formula("<>np").unwrap()),
            sem_type(&parse_formula("[]np").unwrap())
        );
        // coordinator type unfolds to s -> s -> s
        let coord = parse_formula("(s\\s)/s").unwrap();
        assert_eq!(
            sem_type(&coord),
            SemType::arrow(
                SemType::atom("s"),
                SemType::arrow(SemType::atom("s"), SemType::atom("s"))
            )
        );
    }

    #[test]
    fn lexicon_accumulates_and_skips_comments() {
        let text = "# test lexicon\nalice\tnp\ndrinks\tnp\\s\ndrinks\t(np\\s)/np\n\n";
        let lex = Lexicon::parse(text).unwrap();
        assert_eq!(lex.lookup("alice").unwrap().len(), 1);
        assert_eq!(lex.lookup("drinks").unwrap().len(), 2);
        assert!(lex.lookup("bob").is_none());
    }

    #[test]
    fn lexicon_rejects_malformed_lines() {
        assert!(Lexicon::parse("alice np").is_err());
        assert!(Lexicon::parse("alice\tnp\\").is_err());
    }
}
