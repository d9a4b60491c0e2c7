//! Quantified Boolean formulas with a 3DNF matrix.
//!
//! Text format: `forall 1 exists 2 forall 3 exists 4 : (1 2 -4)(-1 2 3)`.
//! A quantifier keyword may bind several variables (`forall 1 3`), a literal
//! is a signed variable index, and `#` starts a comment.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

pub const MAX_EVAL_VARIABLES: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QbfError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: term has {found} literals, expected 3")]
    Arity { line: usize, col: usize, found: usize },
    #[error("variable {0} is quantified more than once")]
    DuplicateVariable(u32),
    #[error("variable {0} occurs in a term but is not quantified")]
    Unquantified(u32),
    #[error("formula has {vars} variables, evaluation is limited to {max}")]
    TooLarge { vars: usize, max: usize },
    #[error("formula is not normalized (alternating prefix over 1..n starting with forall, n even)")]
    NotNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }

    fn flipped(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var, positive: false }
    }

    fn from_signed(x: i64) -> Self {
        Literal { var: x.unsigned_abs() as u32, positive: x > 0 }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "-{}", self.var)
        }
    }
}

pub type Term = [Literal; 3];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    prefix: Vec<(Quantifier, u32)>,
    terms: Vec<Term>,
}

impl Formula {
    /// Validates that every variable is quantified exactly once and every
    /// literal refers to a quantified variable.
    pub fn new(prefix: Vec<(Quantifier, u32)>, terms: Vec<Term>) -> Result<Self, QbfError> {
        let mut seen = std::collections::HashSet::new();
        for &(_, v) in &prefix {
            if v == 0 {
                return Err(QbfError::Syntax { line: 1, col: 1, msg: "variable 0 is not allowed".into() });
            }
            if !seen.insert(v) {
                return Err(QbfError::DuplicateVariable(v));
            }
        }
        for term in &terms {
            for lit in term {
                if !seen.contains(&lit.var) {
                    return Err(QbfError::Unquantified(lit.var));
                }
            }
        }
        Ok(Formula { prefix, terms })
    }

    /// Normalized formula `forall x1 exists x2 ... exists xn` over `terms`.
    pub fn normalized(n: usize, terms: Vec<Term>) -> Result<Self, QbfError> {
        if !n.is_multiple_of(2) {
            return Err(QbfError::NotNormalized);
        }
        Formula::new(alternating_prefix(n), terms)
    }

    pub fn prefix(&self) -> &[(Quantifier, u32)] {
        &self.prefix
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn num_vars(&self) -> usize {
        self.prefix.len()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.prefix.len().is_multiple_of(2) && self.prefix == alternating_prefix(self.prefix.len())
    }

    /// Alternating, forall-first, even-length equivalent. Dummy variables
    /// are inserted where the prefix fails to alternate; `mapping[v]` is the
    /// new index of original variable `v` (index 0 unused).
    pub fn normalize(&self) -> (Formula, Vec<u32>) {
        let max_var = self.prefix.iter().map(|&(_, v)| v).max().unwrap_or(0) as usize;
        let mut mapping = vec![0u32; max_var + 1];
        let mut next = Quantifier::Forall;
        let mut position = 0u32;
        for &(q, v) in &self.prefix {
            if q != next {
                position += 1; // dummy of the expected kind
                next = next.flipped();
            }
            position += 1;
            mapping[v as usize] = position;
            next = next.flipped();
        }
        if position % 2 == 1 {
            position += 1;
        }
        let terms = self
            .terms
            .iter()
            .map(|t| t.map(|l| Literal { var: mapping[l.var as usize], positive: l.positive }))
            .collect();
        let formula = Formula { prefix: alternating_prefix(position as usize), terms };
        (formula, mapping)
    }

    pub fn parse(text: &str) -> Result<Self, QbfError> {
        Parser::new(text).formula()
    }

    /// Truth value by full expansion along the prefix.
    pub fn evaluate(&self) -> Result<bool, QbfError> {
        if self.prefix.len() > MAX_EVAL_VARIABLES {
            return Err(QbfError::TooLarge { vars: self.prefix.len(), max: MAX_EVAL_VARIABLES });
        }
        let matrix = Matrix::new(self);
        Ok(expand(&self.prefix, &matrix, 0, 0))
    }

    /// Whether the assignment (variable `v` true iff `assignment[v - 1]`)
    /// satisfies some term. Only meaningful for normalized formulas.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.terms.iter().any(|t| t.iter().all(|l| assignment[l.var as usize - 1] == l.positive))
    }

    /// Index of the first term satisfied by the assignment.
    pub fn satisfied_term(&self, assignment: &[bool]) -> Option<usize> {
        self.terms.iter().position(|t| t.iter().all(|l| assignment[l.var as usize - 1] == l.positive))
    }

    /// Random normalized formula with `n` variables and `t` terms.
    pub fn random_normalized(rng: &mut impl Rng, n: usize, t: usize) -> Formula {
        assert!(n >= 2 && n.is_multiple_of(2), "n must be even and positive");
        let terms = (0..t).map(|_| random_term(rng, n)).collect();
        Formula { prefix: alternating_prefix(n), terms }
    }

    /// Random formula with an arbitrary prefix over variables `1..=n`.
    pub fn random_prefixed(rng: &mut impl Rng, n: usize, t: usize) -> Formula {
        assert!(n >= 1);
        let mut vars: Vec<u32> = (1..=n as u32).collect();
        vars.shuffle(rng);
        let prefix = vars
            .into_iter()
            .map(|v| (if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists }, v))
            .collect();
        let terms = (0..t).map(|_| random_term(rng, n)).collect();
        Formula { prefix, terms }
    }
}

fn random_term(rng: &mut impl Rng, n: usize) -> Term {
    [(); 3].map(|_| Literal { var: rng.gen_range(1..=n as u32), positive: rng.gen_bool(0.5) })
}

fn alternating_prefix(n: usize) -> Vec<(Quantifier, u32)> {
    (0..n)
        .map(|i| (if i % 2 == 0 { Quantifier::Forall } else { Quantifier::Exists }, i as u32 + 1))
        .collect()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut current: Option<Quantifier> = None;
        for &(q, v) in &self.prefix {
            if current != Some(q) {
                if current.is_some() {
                    write!(f, " ")?;
                }
                write!(f, "{}", q.keyword())?;
                current = Some(q);
            }
            write!(f, " {v}")?;
        }
        write!(f, " :")?;
        for t in &self.terms {
            write!(f, " ({} {} {})", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

/// Terms as (positive mask, negative mask) over variable bits `var - 1`.
struct Matrix {
    terms: Vec<(u32, u32)>,
}

impl Matrix {
    fn new(f: &Formula) -> Self {
        let terms = f
            .terms
            .iter()
            .map(|t| {
                let mut pos = 0u32;
                let mut neg = 0u32;
                for l in t {
                    let b = 1u32 << (l.var - 1);
                    if l.positive {
                        pos |= b;
                    } else {
                        neg |= b;
                    }
                }
                (pos, neg)
            })
            .collect();
        Matrix { terms }
    }

    fn satisfied(&self, assignment: u32) -> bool {
        self.terms.iter().any(|&(p, n)| assignment & p == p && assignment & n == 0)
    }
}

fn expand(prefix: &[(Quantifier, u32)], m: &Matrix, depth: usize, assignment: u32) -> bool {
    let Some(&(q, v)) = prefix.get(depth) else {
        return m.satisfied(assignment);
    };
    let with_true = assignment | 1 << (v - 1);
    match q {
        Quantifier::Forall => {
            expand(prefix, m, depth + 1, assignment) && expand(prefix, m, depth + 1, with_true)
        }
        Quantifier::Exists => {
            expand(prefix, m, depth + 1, with_true) || expand(prefix, m, depth + 1, assignment)
        }
    }
}

/// Subgame oracle for a normalized formula: values of partial assignments
/// (prefixes `x1..xi`), memoized.
pub struct QbfOracle {
    n: usize,
    matrix: Matrix,
    memo: HashMap<(usize, u32), bool>,
}

impl QbfOracle {
    pub fn new(f: &Formula) -> Result<Self, QbfError> {
        if !f.is_normalized() {
            return Err(QbfError::NotNormalized);
        }
        if f.num_vars() > MAX_EVAL_VARIABLES {
            return Err(QbfError::TooLarge { vars: f.num_vars(), max: MAX_EVAL_VARIABLES });
        }
        Ok(QbfOracle { n: f.num_vars(), matrix: Matrix::new(f), memo: HashMap::new() })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Whether the existential player wins from this assignment prefix.
    pub fn value(&mut self, prefix: &[bool]) -> bool {
        assert!(prefix.len() <= self.n, "assignment longer than the formula");
        let bits = prefix.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << i);
        self.value_bits(prefix.len(), bits)
    }

    fn value_bits(&mut self, depth: usize, bits: u32) -> bool {
        if depth == self.n {
            return self.matrix.satisfied(bits);
        }
        if let Some(&v) = self.memo.get(&(depth, bits)) {
            return v;
        }
        let t = self.value_bits(depth + 1, bits | 1 << depth);
        let f = self.value_bits(depth + 1, bits);
        // depth is the 0-based index; even depth means an odd (universal) variable
        let v = if depth.is_multiple_of(2) { t && f } else { t || f };
        self.memo.insert((depth, bits), v);
        v
    }

    /// Value for the existential variable following `prefix` that keeps a
    /// win whenever one can be kept; ties go to true.
    pub fn winning_move(&mut self, prefix: &[bool]) -> bool {
        assert!(prefix.len() % 2 == 1, "existential variables have even indices");
        let mut next = prefix.to_vec();
        next.push(true);
        if self.value(&next) {
            return true;
        }
        next[prefix.len()] = false;
        !self.value(&next)
    }

    /// Value for the universal variable following `prefix` that keeps the
    /// formula false whenever possible; ties go to true.
    pub fn falsifying_move(&mut self, prefix: &[bool]) -> bool {
        assert!(prefix.len().is_multiple_of(2), "universal variables have odd indices");
        let mut next = prefix.to_vec();
        next.push(true);
        if !self.value(&next) {
            return true;
        }
        next[prefix.len()] = false;
        self.value(&next)
    }

    /// Whether following `winning_move` at every existential variable
    /// satisfies the matrix against every universal play.
    pub fn strategy_wins(&mut self) -> bool {
        fn walk(o: &mut QbfOracle, a: &mut Vec<bool>) -> bool {
            if a.len() == o.n {
                let bits = a.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << i);
                return o.matrix.satisfied(bits);
            }
            if a.len().is_multiple_of(2) {
                for v in [false, true] {
                    a.push(v);
                    let ok = walk(o, a);
                    a.pop();
                    if !ok {
                        return false;
                    }
                }
                true
            } else {
                let v = o.winning_move(a);
                a.push(v);
                let ok = walk(o, a);
                a.pop();
                ok
            }
        }
        walk(self, &mut Vec::new())
    }
}

/// Eagerly computed values of every assignment prefix of a normalized
/// formula. Cheap to share between cloned strategy scripts.
#[derive(Debug, Clone)]
pub struct ValueTable {
    n: usize,
    /// `levels[d][bits]`: value after fixing `x1..xd` to `bits`.
    levels: Vec<Vec<bool>>,
}

pub const MAX_TABLE_VARIABLES: usize = 20;

impl ValueTable {
    pub fn new(f: &Formula) -> Result<Self, QbfError> {
        if !f.is_normalized() {
            return Err(QbfError::NotNormalized);
        }
        let n = f.num_vars();
        if n > MAX_TABLE_VARIABLES {
            return Err(QbfError::TooLarge { vars: n, max: MAX_TABLE_VARIABLES });
        }
        let matrix = Matrix::new(f);
        let mut levels = vec![Vec::new(); n + 1];
        levels[n] = (0..1u32 << n).map(|bits| matrix.satisfied(bits)).collect();
        for d in (0..n).rev() {
            let below = &levels[d + 1];
            levels[d] = (0..1usize << d)
                .map(|bits| {
                    let (f, t) = (below[bits], below[bits | 1 << d]);
                    if d % 2 == 0 { f && t } else { f || t }
                })
                .collect();
        }
        Ok(ValueTable { n, levels })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn value(&self, prefix: &[bool]) -> bool {
        let bits = prefix.iter().enumerate().fold(0usize, |acc, (i, &b)| acc | (b as usize) << i);
        self.levels[prefix.len()][bits]
    }

    /// Same contract as [`QbfOracle::winning_move`].
    pub fn winning_move(&self, prefix: &[bool]) -> bool {
        assert!(prefix.len() % 2 == 1, "existential variables have even indices");
        let mut next = prefix.to_vec();
        next.push(true);
        if self.value(&next) {
            return true;
        }
        next[prefix.len()] = false;
        !self.value(&next)
    }

    /// Same contract as [`QbfOracle::falsifying_move`].
    pub fn falsifying_move(&self, prefix: &[bool]) -> bool {
        assert!(prefix.len().is_multiple_of(2), "universal variables have odd indices");
        let mut next = prefix.to_vec();
        next.push(true);
        if !self.value(&next) {
            return true;
        }
        next[prefix.len()] = false;
        self.value(&next)
    }
}

/// Value at existential variable `i` (1-based, even) given the values of
/// `x1..x(i-1)`.
pub fn winning_move(f: &Formula, assignment: &[bool], i: usize) -> Result<bool, QbfError> {
    assert_eq!(assignment.len() + 1, i, "assignment must cover x1..x(i-1)");
    Ok(QbfOracle::new(f)?.winning_move(assignment))
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

#[derive(Debug, PartialEq)]
enum Token {
    Word(String),
    Int(i64),
    Colon,
    Open,
    Close,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn error<T>(&self, line: usize, col: usize, msg: impl Into<String>) -> Result<T, QbfError> {
        Err(QbfError::Syntax { line, col, msg: msg.into() })
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Next token with its starting position.
    fn token(&mut self) -> Result<Option<(Token, usize, usize)>, QbfError> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while self.chars.peek().is_some_and(|&c| c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(&c) = self.chars.peek() else { return Ok(None) };
        let tok = match c {
            ':' => {
                self.bump();
                Token::Colon
            }
            '(' => {
                self.bump();
                Token::Open
            }
            ')' => {
                self.bump();
                Token::Close
            }
            c if c == '-' || c.is_ascii_digit() => {
                let mut s = String::new();
                s.push(self.bump().unwrap());
                while self.chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    s.push(self.bump().unwrap());
                }
                match s.parse::<i64>() {
                    Ok(v) if v.unsigned_abs() <= u32::MAX as u64 => Token::Int(v),
                    _ => return self.error(line, col, format!("invalid integer `{s}`")),
                }
            }
            c if c.is_alphabetic() => {
                let mut s = String::new();
                while self.chars.peek().is_some_and(|c| c.is_alphanumeric()) {
                    s.push(self.bump().unwrap());
                }
                Token::Word(s)
            }
            c => return self.error(line, col, format!("unexpected character `{c}`")),
        };
        Ok(Some((tok, line, col)))
    }

    fn formula(mut self) -> Result<Formula, QbfError> {
        let mut prefix = Vec::new();
        let mut quantifier: Option<Quantifier> = None;
        loop {
            let Some((tok, line, col)) = self.token()? else {
                return self.error(self.line, self.col, "unexpected end of input, expected `:`");
            };
            match tok {
                Token::Word(w) if w == "forall" => quantifier = Some(Quantifier::Forall),
                Token::Word(w) if w == "exists" => quantifier = Some(Quantifier::Exists),
                Token::Word(w) => return self.error(line, col, format!("unknown keyword `{w}`")),
                Token::Int(v) => {
                    let Some(q) = quantifier else {
                        return self.error(line, col, "variable before any quantifier");
                    };
                    if v <= 0 {
                        return self.error(line, col, "quantified variables must be positive");
                    }
                    prefix.push((q, v as u32));
                }
                Token::Colon => break,
                _ => return self.error(line, col, "expected quantifier, variable or `:`"),
            }
        }
        let mut terms = Vec::new();
        while let Some((tok, line, col)) = self.token()? {
            if tok != Token::Open {
                return self.error(line, col, "expected `(`");
            }
            let mut lits = Vec::new();
            loop {
                match self.token()? {
                    Some((Token::Int(0), l, c)) => return self.error(l, c, "literal 0 is not allowed"),
                    Some((Token::Int(v), _, _)) => lits.push(Literal::from_signed(v)),
                    Some((Token::Close, _, _)) => break,
                    Some((_, l, c)) => return self.error(l, c, "expected literal or `)`"),
                    None => return self.error(self.line, self.col, "unterminated term"),
                }
            }
            let term: Term = lits
                .clone()
                .try_into()
                .map_err(|_| QbfError::Arity { line, col, found: lits.len() })?;
            terms.push(term);
        }
        Formula::new(prefix, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EXAMPLE_FORMULA: &str = "forall 1 exists 2 forall 3 exists 4 : (1 2 -4)(-1 2 3)(-1 -2 3)";

    /// Independent evaluator: enumerate every assignment and fold along
    /// the prefix from the innermost variable outwards.
    fn brute(f: &Formula) -> bool {
        let n = f.num_vars();
        let index: HashMap<u32, usize> = f.prefix().iter().enumerate().map(|(i, &(_, v))| (v, i)).collect();
        let mut layer: Vec<bool> = (0..1u32 << n)
            .map(|bits| f.terms().iter().any(|t| t.iter().all(|l| (bits >> index[&l.var] & 1 == 1) == l.positive)))
            .collect();
        for &(q, _) in f.prefix().iter().rev() {
            // the variable at prefix position i is bit i; outer positions are low bits
            let half = layer.len() / 2;
            layer = (0..half)
                .map(|lo| {
                    let (a, b) = (layer[lo], layer[lo + half]);
                    if q == Quantifier::Forall { a && b } else { a || b }
                })
                .collect();
        }
        layer[0]
    }

    #[test]
    fn parses_examples() {
        let f = Formula::parse("forall 1 exists 2 : (2 2 2)").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.terms(), &[[Literal::pos(2); 3]]);
        let f = Formula::parse(EXAMPLE_FORMULA).unwrap();
        assert_eq!((f.num_vars(), f.num_terms()), (4, 3));
        assert_eq!(f.terms()[0], [Literal::pos(1), Literal::pos(2), Literal::neg(4)]);
        assert!(f.is_normalized());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            Formula::parse("forall 1 exists 2 :\n  (1 2)").unwrap_err(),
            QbfError::Arity { line: 2, col: 3, found: 2 }
        );
        assert!(matches!(Formula::parse("forall 1 : (1 1 x)"), Err(QbfError::Syntax { line: 1, col: 17, .. })));
        assert_eq!(Formula::parse("forall 1 : (1 1 3)").unwrap_err(), QbfError::Unquantified(3));
        assert_eq!(Formula::parse("forall 1 exists 1 : ").unwrap_err(), QbfError::DuplicateVariable(1));
        assert!(matches!(Formula::parse("forall 1 (1 1 1)"), Err(QbfError::Syntax { .. })));
        assert!(matches!(Formula::parse("forall 1 : (1 1 1"), Err(QbfError::Syntax { .. })));
    }

    #[test]
    fn comments_and_whitespace() {
        let f = Formula::parse("# header\nforall 1 # first\n exists 2:(1 -2 2)# tail").unwrap();
        assert_eq!(f, Formula::parse("forall 1 exists 2 : (1 -2 2)").unwrap());
    }

    #[test]
    fn print_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (n, t) = (rng.gen_range(1..7), rng.gen_range(0..5));
            let f = Formula::random_prefixed(&mut rng, n, t);
            assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
        }
        assert_eq!(Formula::parse(EXAMPLE_FORMULA).unwrap().to_string(), "forall 1 exists 2 forall 3 exists 4 : (1 2 -4) (-1 2 3) (-1 -2 3)");
    }

    #[test]
    fn evaluation_examples() {
        assert!(Formula::parse("forall 1 exists 2 : (2 2 2)").unwrap().evaluate().unwrap());
        assert!(!Formula::parse("forall 1 exists 2 : (1 1 1)").unwrap().evaluate().unwrap());
        assert!(!Formula::parse(EXAMPLE_FORMULA).unwrap().evaluate().unwrap());
        assert!(!Formula::parse("forall 1 exists 2 : (1 -1 2)").unwrap().evaluate().unwrap());
    }

    #[test]
    fn evaluate_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let (n, t) = (rng.gen_range(1..9), rng.gen_range(0..8));
            let f = Formula::random_prefixed(&mut rng, n, t);
            assert_eq!(f.evaluate().unwrap(), brute(&f), "{f}");
        }
    }

    #[test]
    fn size_guard() {
        let f = Formula::normalized(26, vec![]).unwrap();
        assert_eq!(f.evaluate().unwrap_err(), QbfError::TooLarge { vars: 26, max: 24 });
    }

    #[test]
    fn normalize_examples() {
        let f = Formula::parse(EXAMPLE_FORMULA).unwrap();
        let (g, map) = f.normalize();
        assert_eq!(g, f);
        assert_eq!(map, vec![0, 1, 2, 3, 4]);

        let f = Formula::parse("exists 1 : (1 1 1)").unwrap();
        let (g, map) = f.normalize();
        assert_eq!(g, Formula::parse("forall 1 exists 2 : (2 2 2)").unwrap());
        assert_eq!(map[1], 2);

        let f = Formula::parse("forall 1 2 : (1 2 2)").unwrap();
        let (g, map) = f.normalize();
        assert!(g.is_normalized());
        assert_eq!(g.num_vars(), 4);
        assert_eq!(&map[1..], &[1, 3]);
    }

    #[test]
    fn normalize_preserves_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let (n, t) = (rng.gen_range(1..9), rng.gen_range(0..7));
            let f = Formula::random_prefixed(&mut rng, n, t);
            let (g, _) = f.normalize();
            assert!(g.is_normalized());
            assert_eq!(f.evaluate().unwrap(), g.evaluate().unwrap(), "{f} vs {g}");
        }
    }

    #[test]
    fn winning_move_examples() {
        let f = Formula::parse("forall 1 exists 2 : (2 2 2)").unwrap();
        assert!(winning_move(&f, &[false], 2).unwrap());
        let f = Formula::parse("forall 1 exists 2 : (1 2 2)").unwrap();
        assert!(winning_move(&f, &[true], 2).unwrap());
        let f = Formula::parse("forall 1 exists 2 : (1 2 2)(-1 -2 -2)").unwrap();
        assert!(!winning_move(&f, &[false], 2).unwrap());
    }

    #[test]
    fn falsifying_move_mirrors() {
        let f = Formula::parse(EXAMPLE_FORMULA).unwrap();
        let mut o = QbfOracle::new(&f).unwrap();
        assert!(!o.value(&[]));
        let x1 = o.falsifying_move(&[]);
        assert!(!o.value(&[x1]));
    }

    #[test]
    fn value_table_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = 2 * rng.gen_range(1..4);
            let t = rng.gen_range(1..5);
            let f = Formula::random_normalized(&mut rng, n, t);
            let table = ValueTable::new(&f).unwrap();
            let mut oracle = QbfOracle::new(&f).unwrap();
            for d in 0..=n {
                for bits in 0..1u32 << d {
                    let prefix: Vec<bool> = (0..d).map(|i| bits >> i & 1 == 1).collect();
                    assert_eq!(table.value(&prefix), oracle.value(&prefix));
                    if d % 2 == 1 {
                        assert_eq!(table.winning_move(&prefix), oracle.winning_move(&prefix));
                    } else if d < n {
                        assert_eq!(table.falsifying_move(&prefix), oracle.falsifying_move(&prefix));
                    }
                }
            }
            assert_eq!(table.value(&[]), f.evaluate().unwrap());
        }
    }

    #[test]
    fn strategy_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = 2 * rng.gen_range(1..4);
            let t = rng.gen_range(1..6);
            let f = Formula::random_normalized(&mut rng, n, t);
            let mut o = QbfOracle::new(&f).unwrap();
            assert_eq!(o.strategy_wins(), brute(&f));
        }
    }
}
