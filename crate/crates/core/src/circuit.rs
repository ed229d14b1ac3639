//! Arithmetic circuit DAGs, Boolean formulas, and the bridges between them.
//!
//! A [`Circuit`] is an ordered gate list in which every `Add`/`Mul` gate
//! references strictly earlier gates, so the list order *is* a topological
//! order and evaluation is a single forward sweep.  Constants are stored as
//! signed base-field integers and reduced at evaluation time, which keeps
//! circuit files portable across fields and lets generators write `-1`
//! instead of `q - 1`.
//!
//! The syntactic degree (`Input` = 1, `Const` = 0, `Add` = max, `Mul` = sum)
//! upper-bounds the degree of the computed polynomial and is the `d` fed
//! into protocol parameter selection.  Formulas are deliberately *not*
//! rebalanced before arithmetization: the exact syntactic degree of the
//! direct translation is used instead, trading worst-case depth blowup for
//! zero rewriting machinery.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

// ---------------------------------------------------------------------------
// Circuits
// ---------------------------------------------------------------------------

/// One gate of an arithmetic circuit.  `Add` and `Mul` operands are indices
/// of strictly earlier gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// The `j`-th circuit input.
    Input(usize),
    /// A base-field constant, reduced modulo `q` (negatives allowed).
    Const(i64),
    Add(usize, usize),
    Mul(usize, usize),
}

/// An arithmetic circuit: gate list, input arity, and designated output gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    n_inputs: usize,
    output: usize,
}

impl Circuit {
    /// Builds a circuit after validating the DAG invariants: operand
    /// references strictly backward, input indices below `n_inputs`, and a
    /// valid output id.
    pub fn new(gates: Vec<Gate>, n_inputs: usize, output: usize) -> Result<Circuit> {
        for (g, gate) in gates.iter().enumerate() {
            match *gate {
                Gate::Input(j) if j >= n_inputs => {
                    return Err(Error::usage(format!(
                        "gate {g}: input index {j} out of range for {n_inputs} inputs"
                    )));
                }
                Gate::Add(x, y) | Gate::Mul(x, y) if x >= g || y >= g => {
                    return Err(Error::usage(format!(
                        "gate {g} references a gate that is not strictly earlier"
                    )));
                }
                _ => {}
            }
        }
        if output >= gates.len() {
            return Err(Error::usage(format!(
                "output gate {output} out of range ({} gates)",
                gates.len()
            )));
        }
        Ok(Circuit { gates, n_inputs, output })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Gate count, the size parameter `s`.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Degree bound propagated structurally: inputs are degree 1, constants
    /// degree 0, addition takes the max, multiplication the (saturating)
    /// sum.  Always an upper bound on the degree of the computed polynomial.
    pub fn syntactic_degree(&self) -> u64 {
        let mut deg = vec![0u64; self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            deg[g] = match *gate {
                Gate::Input(_) => 1,
                Gate::Const(_) => 0,
                Gate::Add(x, y) => deg[x].max(deg[y]),
                Gate::Mul(x, y) => deg[x].saturating_add(deg[y]),
            };
        }
        deg[self.output]
    }

    /// Evaluates the circuit at one point.  Every coordinate must belong to
    /// `field`; constants are embedded via their base-field residue.
    pub fn evaluate(&self, field: &Field, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.n_inputs {
            return Err(Error::usage(format!(
                "circuit takes {} inputs, point has {}",
                self.n_inputs,
                point.len()
            )));
        }
        let mut cols = Vec::with_capacity(point.len());
        for (j, p) in point.iter().enumerate() {
            if p.field() != field {
                return Err(Error::usage(format!(
                    "point coordinate {j} lies in {}, expected {field}",
                    p.field()
                )));
            }
            cols.push(p.limbs().to_vec());
        }
        let out = self.evaluate_columns(field, &cols, 1)?;
        field.from_limbs(out)
    }

    /// Batch evaluation over flat limb buffers, the prover's hot path.
    /// `cols[j]` holds the values of input `j` for all `count` points,
    /// `count * ell` limbs; the returned buffer holds the `count` outputs in
    /// the same layout.
    pub(crate) fn evaluate_columns(
        &self,
        field: &Field,
        cols: &[Vec<u64>],
        count: usize,
    ) -> Result<Vec<u64>> {
        let repr = field.repr();
        let ell = repr.ell();
        if cols.len() != self.n_inputs {
            return Err(Error::usage(format!(
                "circuit takes {} inputs, got {} columns",
                self.n_inputs,
                cols.len()
            )));
        }
        for (j, col) in cols.iter().enumerate() {
            if col.len() != count * ell {
                return Err(Error::usage(format!(
                    "input column {j} has {} limbs, expected {}",
                    col.len(),
                    count * ell
                )));
            }
        }
        let consts: Vec<u64> = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Const(c) => const_residue(*c, repr.q()),
                _ => 0,
            })
            .collect();
        let mut vals = vec![0u64; self.gates.len() * ell];
        let mut scratch: Vec<u128> = Vec::new();
        let mut out = vec![0u64; count * ell];
        for b in 0..count {
            for (g, gate) in self.gates.iter().enumerate() {
                let (lo, hi) = vals.split_at_mut(g * ell);
                let dst = &mut hi[..ell];
                match *gate {
                    Gate::Input(j) => dst.copy_from_slice(&cols[j][b * ell..(b + 1) * ell]),
                    Gate::Const(_) => {
                        dst.fill(0);
                        dst[0] = consts[g];
                    }
                    Gate::Add(x, y) => {
                        repr.limb_add(&lo[x * ell..(x + 1) * ell], &lo[y * ell..(y + 1) * ell], dst)
                    }
                    Gate::Mul(x, y) => repr.limb_mul(
                        &lo[x * ell..(x + 1) * ell],
                        &lo[y * ell..(y + 1) * ell],
                        dst,
                        &mut scratch,
                    ),
                }
            }
            out[b * ell..(b + 1) * ell]
                .copy_from_slice(&vals[self.output * ell..(self.output + 1) * ell]);
        }
        Ok(out)
    }
}

/// Residue of a signed constant modulo `q`.
fn const_residue(c: i64, q: u64) -> u64 {
    i128::from(c).rem_euclid(i128::from(q)) as u64
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

/// Incremental circuit construction for the protocol-circuit generators.
/// Input and constant gates are deduplicated; everything else is appended
/// verbatim (no common-subexpression elimination).
pub(crate) struct CircuitBuilder {
    gates: Vec<Gate>,
    n_inputs: usize,
    input_gate: Vec<Option<usize>>,
    const_gate: HashMap<i64, usize>,
}

impl CircuitBuilder {
    pub(crate) fn new(n_inputs: usize) -> CircuitBuilder {
        CircuitBuilder {
            gates: Vec::new(),
            n_inputs,
            input_gate: vec![None; n_inputs],
            const_gate: HashMap::new(),
        }
    }

    fn push(&mut self, gate: Gate) -> usize {
        self.gates.push(gate);
        self.gates.len() - 1
    }

    pub(crate) fn input(&mut self, j: usize) -> usize {
        assert!(j < self.n_inputs, "input {j} out of range for {} inputs", self.n_inputs);
        match self.input_gate[j] {
            Some(id) => id,
            None => {
                let id = self.push(Gate::Input(j));
                self.input_gate[j] = Some(id);
                id
            }
        }
    }

    pub(crate) fn constant(&mut self, c: i64) -> usize {
        if let Some(&id) = self.const_gate.get(&c) {
            return id;
        }
        let id = self.push(Gate::Const(c));
        self.const_gate.insert(c, id);
        id
    }

    pub(crate) fn add(&mut self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.gates.len() && b < self.gates.len());
        self.push(Gate::Add(a, b))
    }

    pub(crate) fn mul(&mut self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.gates.len() && b < self.gates.len());
        self.push(Gate::Mul(a, b))
    }

    /// `a - b`, expressed as `a + (-1)·b` since there is no subtraction gate.
    pub(crate) fn sub(&mut self, a: usize, b: usize) -> usize {
        let minus_one = self.constant(-1);
        let nb = self.mul(minus_one, b);
        self.add(a, nb)
    }

    /// Sum as a balanced binary tree (keeps the syntactic degree equal to
    /// the max of the operands instead of growing with tree shape).  The
    /// empty sum is the constant 0.
    pub(crate) fn balanced_sum(&mut self, ids: &[usize]) -> usize {
        self.balanced_fold(ids, true)
    }

    /// Product as a balanced binary tree; the empty product is 1.
    pub(crate) fn balanced_product(&mut self, ids: &[usize]) -> usize {
        self.balanced_fold(ids, false)
    }

    fn balanced_fold(&mut self, ids: &[usize], additive: bool) -> usize {
        if ids.is_empty() {
            return self.constant(if additive { 0 } else { 1 });
        }
        let mut layer = ids.to_vec();
        while layer.len() > 1 {
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            for pair in layer.chunks(2) {
                next.push(match pair {
                    [a, b] if additive => self.add(*a, *b),
                    [a, b] => self.mul(*a, *b),
                    [a] => *a,
                    _ => unreachable!(),
                });
            }
            layer = next;
        }
        layer[0]
    }

    /// Appends a copy of `other`, substituting the existing gate
    /// `input_map[j]` for its input `j`; returns the id computing `other`'s
    /// output.  Constants are deduplicated into this builder's pool.
    pub(crate) fn inline(&mut self, other: &Circuit, input_map: &[usize]) -> usize {
        assert_eq!(input_map.len(), other.n_inputs, "inline input map arity mismatch");
        for &id in input_map {
            assert!(id < self.gates.len(), "inline input map references gate {id} before it exists");
        }
        let mut map = Vec::with_capacity(other.gates.len());
        for gate in &other.gates {
            let id = match *gate {
                Gate::Input(j) => input_map[j],
                Gate::Const(c) => self.constant(c),
                Gate::Add(x, y) => self.add(map[x], map[y]),
                Gate::Mul(x, y) => self.mul(map[x], map[y]),
            };
            map.push(id);
        }
        map[other.output]
    }

    pub(crate) fn finish(self, output: usize) -> Circuit {
        Circuit::new(self.gates, self.n_inputs, output)
            .expect("builder maintains the circuit invariants")
    }
}

// ---------------------------------------------------------------------------
// Boolean formulas and arithmetization
// ---------------------------------------------------------------------------

/// A Boolean formula over AND, OR, NOT, variables, and constants.
/// Variables are 0-indexed internally; the surface syntax names them
/// `x1..xn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolFormula {
    Const(bool),
    Var(usize),
    Not(Box<BoolFormula>),
    And(Box<BoolFormula>, Box<BoolFormula>),
    Or(Box<BoolFormula>, Box<BoolFormula>),
}

impl std::ops::Not for BoolFormula {
    type Output = BoolFormula;
    fn not(self) -> BoolFormula {
        BoolFormula::Not(Box::new(self))
    }
}

impl BoolFormula {
    pub fn and(l: BoolFormula, r: BoolFormula) -> BoolFormula {
        BoolFormula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: BoolFormula, r: BoolFormula) -> BoolFormula {
        BoolFormula::Or(Box::new(l), Box::new(r))
    }

    /// Number of variables: one past the highest index mentioned.
    pub fn num_vars(&self) -> usize {
        match self {
            BoolFormula::Const(_) => 0,
            BoolFormula::Var(j) => j + 1,
            BoolFormula::Not(f) => f.num_vars(),
            BoolFormula::And(l, r) | BoolFormula::Or(l, r) => l.num_vars().max(r.num_vars()),
        }
    }

    /// Connective count `m`: the number of AND/OR/NOT nodes.
    pub fn connectives(&self) -> usize {
        match self {
            BoolFormula::Const(_) | BoolFormula::Var(_) => 0,
            BoolFormula::Not(f) => 1 + f.connectives(),
            BoolFormula::And(l, r) | BoolFormula::Or(l, r) => {
                1 + l.connectives() + r.connectives()
            }
        }
    }

    /// Truth value under an assignment; `assignment` must cover
    /// [`BoolFormula::num_vars`] entries.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            BoolFormula::Const(v) => *v,
            BoolFormula::Var(j) => assignment[*j],
            BoolFormula::Not(f) => !f.eval(assignment),
            BoolFormula::And(l, r) => l.eval(assignment) && r.eval(assignment),
            BoolFormula::Or(l, r) => l.eval(assignment) || r.eval(assignment),
        }
    }
}

/// Translates a formula into a circuit agreeing with it on all Boolean
/// inputs over every field: `AND(x,y) -> x·y`, `OR(x,y) -> x + y - x·y`,
/// `NOT(x) -> 1 - x`.
pub fn arithmetize(formula: &BoolFormula) -> Circuit {
    arithmetize_padded(formula, formula.num_vars())
        .expect("arity from num_vars always suffices")
}

/// Arithmetization with an explicit input arity, for embedding a formula in
/// a wider variable space (quantified prefixes, dummy variables).
pub fn arithmetize_padded(formula: &BoolFormula, n_inputs: usize) -> Result<Circuit> {
    if n_inputs < formula.num_vars() {
        return Err(Error::usage(format!(
            "formula mentions {} variables, cannot restrict to {n_inputs} inputs",
            formula.num_vars()
        )));
    }
    let mut b = CircuitBuilder::new(n_inputs);
    let out = arith_node(formula, &mut b);
    Ok(b.finish(out))
}

fn arith_node(f: &BoolFormula, b: &mut CircuitBuilder) -> usize {
    match f {
        BoolFormula::Const(v) => b.constant(i64::from(*v)),
        BoolFormula::Var(j) => b.input(*j),
        BoolFormula::Not(inner) => {
            let x = arith_node(inner, b);
            let one = b.constant(1);
            b.sub(one, x)
        }
        BoolFormula::And(l, r) => {
            let x = arith_node(l, b);
            let y = arith_node(r, b);
            b.mul(x, y)
        }
        BoolFormula::Or(l, r) => {
            let x = arith_node(l, b);
            let y = arith_node(r, b);
            let s = b.add(x, y);
            let p = b.mul(x, y);
            b.sub(s, p)
        }
    }
}

// ---------------------------------------------------------------------------
// Quantified formulas
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    Exists,
    ForAll,
}

/// A fully quantified Boolean formula `(Q_1 x_1)⋯(Q_n x_n) F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifiedFormula {
    prefix: Vec<Quant>,
    matrix: BoolFormula,
}

impl QuantifiedFormula {
    /// `prefix[i]` quantifies variable `i`; the matrix may mention only
    /// quantified variables.
    pub fn new(prefix: Vec<Quant>, matrix: BoolFormula) -> Result<QuantifiedFormula> {
        if matrix.num_vars() > prefix.len() {
            return Err(Error::usage(format!(
                "matrix mentions x{} but only {} variables are quantified",
                matrix.num_vars(),
                prefix.len()
            )));
        }
        Ok(QuantifiedFormula { prefix, matrix })
    }

    pub fn prefix(&self) -> &[Quant] {
        &self.prefix
    }

    pub fn matrix(&self) -> &BoolFormula {
        &self.matrix
    }

    pub fn num_vars(&self) -> usize {
        self.prefix.len()
    }
}

// ---------------------------------------------------------------------------
// Tokenizer shared by the formula and QBF parsers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

/// Splits `text` into words (alphanumeric + `_`) and single-character
/// symbols from `syms`, tracking 1-based line/column positions.  Returns the
/// tokens and the position just past the end of input.
fn tokenize(text: &str, syms: &str) -> Result<(Vec<Token>, (usize, usize))> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            line += 1;
            col = 1;
            chars.next();
        } else if c.is_whitespace() {
            col += 1;
            chars.next();
        } else if syms.contains(c) {
            out.push(Token { tok: Tok::Sym(c), line, col });
            col += 1;
            chars.next();
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = col;
            let mut word = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    word.push(c2);
                    col += 1;
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Word(word), line, col: start });
        } else {
            return Err(Error::parse(line, col, format!("unexpected character '{c}'")));
        }
    }
    Ok((out, (line, col)))
}

/// Recursive-descent parser for the formula grammar: `!` binds tighter than
/// `&`, which binds tighter than `|`; parentheses and the constants `0`/`1`
/// are allowed; variables are `x1..xn`.
struct FormulaParser<'a> {
    toks: &'a [Token],
    pos: usize,
    eof: (usize, usize),
    /// When set, variable indices must be below this bound (used by the QBF
    /// parser to enforce the declared variable list).
    max_vars: Option<usize>,
}

impl<'a> FormulaParser<'a> {
    fn new(toks: &'a [Token], eof: (usize, usize), max_vars: Option<usize>) -> Self {
        FormulaParser { toks, pos: 0, eof, max_vars }
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.eof)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.here();
        Error::parse(line, col, msg)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or_expr(&mut self) -> Result<BoolFormula> {
        let mut f = self.and_expr()?;
        while self.eat_sym('|') {
            f = BoolFormula::or(f, self.and_expr()?);
        }
        Ok(f)
    }

    fn and_expr(&mut self) -> Result<BoolFormula> {
        let mut f = self.unary()?;
        while self.eat_sym('&') {
            f = BoolFormula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<BoolFormula> {
        if self.eat_sym('!') {
            Ok(!self.unary()?)
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<BoolFormula> {
        if self.eat_sym('(') {
            let f = self.or_expr()?;
            if !self.eat_sym(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(f);
        }
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Err(self.error("expected a variable, constant, '!' or '('")),
        };
        match &tok.tok {
            Tok::Word(w) if w == "0" => {
                self.pos += 1;
                Ok(BoolFormula::Const(false))
            }
            Tok::Word(w) if w == "1" => {
                self.pos += 1;
                Ok(BoolFormula::Const(true))
            }
            Tok::Word(w) if w.starts_with('x') => {
                let index = self.var_index(w, tok.line, tok.col)?;
                self.pos += 1;
                Ok(BoolFormula::Var(index))
            }
            _ => Err(self.error("expected a variable, constant, '!' or '('")),
        }
    }

    fn var_index(&self, word: &str, line: usize, col: usize) -> Result<usize> {
        let digits = &word[1..];
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(line, col, format!("expected a variable like x1, found '{word}'")));
        }
        let k: usize = digits
            .parse()
            .map_err(|_| Error::parse(line, col, format!("variable index in '{word}' is too large")))?;
        if k == 0 {
            return Err(Error::parse(line, col, "variable indices start at x1".to_string()));
        }
        if let Some(n) = self.max_vars {
            if k > n {
                return Err(Error::parse(
                    line,
                    col,
                    format!("formula uses {word} but only {n} variables are declared"),
                ));
            }
        }
        Ok(k - 1)
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return Err(self.error("expected end of input"));
        }
        Ok(())
    }
}

/// Parses a Boolean formula: variables `x1..xn`, operators `!` `&` `|` in
/// decreasing precedence, parentheses, constants `0` and `1`.
pub fn parse_formula(text: &str) -> Result<BoolFormula> {
    let (toks, eof) = tokenize(text, "!&|()")?;
    let mut p = FormulaParser::new(&toks, eof, None);
    let f = p.or_expr()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a quantified formula: a quantifier word of `E`/`A` characters, the
/// variable list `x1..xn` in order, a colon, and the matrix formula —
/// e.g. `EA x1 x2 : x1 | x2`.
pub fn parse_qbf(text: &str) -> Result<QuantifiedFormula> {
    let (toks, eof) = tokenize(text, "!&|():")?;
    let mut pos = 0usize;
    let quant_tok = toks
        .first()
        .ok_or_else(|| Error::parse(eof.0, eof.1, "expected a quantifier string of 'E'/'A'"))?;
    let word = match &quant_tok.tok {
        Tok::Word(w) => w,
        _ => {
            return Err(Error::parse(
                quant_tok.line,
                quant_tok.col,
                "expected a quantifier string of 'E'/'A'",
            ))
        }
    };
    let mut prefix = Vec::with_capacity(word.len());
    for (i, c) in word.chars().enumerate() {
        match c {
            'E' => prefix.push(Quant::Exists),
            'A' => prefix.push(Quant::ForAll),
            _ => {
                return Err(Error::parse(
                    quant_tok.line,
                    quant_tok.col + i,
                    format!("quantifier string must use only 'E' and 'A', found '{c}'"),
                ))
            }
        }
    }
    pos += 1;
    let n = prefix.len();
    for i in 0..n {
        let expected = format!("x{}", i + 1);
        match toks.get(pos) {
            Some(Token { tok: Tok::Word(w), .. }) if *w == expected => pos += 1,
            Some(t) => {
                return Err(Error::parse(
                    t.line,
                    t.col,
                    format!("expected variable {expected} (variables are listed in order)"),
                ))
            }
            None => {
                return Err(Error::parse(
                    eof.0,
                    eof.1,
                    format!("expected variable {expected} (variables are listed in order)"),
                ))
            }
        }
    }
    match toks.get(pos) {
        Some(Token { tok: Tok::Sym(':'), .. }) => pos += 1,
        Some(t) => return Err(Error::parse(t.line, t.col, "expected ':' after the variable list")),
        None => return Err(Error::parse(eof.0, eof.1, "expected ':' after the variable list")),
    }
    let mut p = FormulaParser::new(&toks[pos..], eof, Some(n));
    let matrix = p.or_expr()?;
    p.expect_end()?;
    QuantifiedFormula::new(prefix, matrix)
}

// ---------------------------------------------------------------------------
// Circuit text format
// ---------------------------------------------------------------------------

const RESERVED: [&str; 6] = ["circuit", "output", "input", "const", "add", "mul"];

/// Parses the line-oriented circuit text format:
///
/// ```text
/// # comment
/// circuit n=2
/// g1 input 0
/// g2 input 1
/// g3 mul g1 g2
/// output g3
/// ```
///
/// Gate ids must be defined before use (so the gate list is a DAG by
/// construction) and the `output` line must come last.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    struct Line<'a> {
        no: usize,
        toks: Vec<(&'a str, usize)>,
    }
    let mut sig: Vec<Line> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let toks = split_line_tokens(body);
        if !toks.is_empty() {
            sig.push(Line { no: i + 1, toks });
        }
    }
    let Some(header) = sig.first() else {
        return Err(Error::parse(1, 1, "expected 'circuit n=<count>' header"));
    };
    let n_inputs = parse_header(header.no, &header.toks)?;
    let last = sig.last().unwrap();
    if last.toks[0].0 != "output" {
        return Err(Error::parse(
            last.no,
            last.toks[0].1,
            "expected 'output <gate>' as the final line",
        ));
    }
    if sig.len() < 2 {
        // the header line doubled as the "output" line; unreachable in
        // practice because the header starts with "circuit"
        return Err(Error::parse(header.no, 1, "missing 'output' declaration"));
    }
    let gate_lines = &sig[1..sig.len() - 1];
    for line in gate_lines {
        if line.toks[0].0 == "output" {
            return Err(Error::parse(
                line.no,
                line.toks[0].1,
                "'output' must be the final line",
            ));
        }
    }

    // First pass: collect definitions so that forward references can be
    // distinguished from unknown ids.
    let mut defs: HashMap<&str, usize> = HashMap::new();
    for (k, line) in gate_lines.iter().enumerate() {
        let (id, col) = line.toks[0];
        if RESERVED.contains(&id) {
            return Err(Error::parse(
                line.no,
                col,
                format!("'{id}' is a reserved word and cannot name a gate"),
            ));
        }
        if defs.insert(id, k).is_some() {
            return Err(Error::parse(line.no, col, format!("duplicate gate id '{id}'")));
        }
    }

    let resolve = |name: &str, k: usize, line_no: usize, col: usize| -> Result<usize> {
        match defs.get(name) {
            None => Err(Error::parse(line_no, col, format!("unknown gate '{name}'"))),
            Some(&idx) if idx >= k => {
                Err(Error::parse(line_no, col, format!("forward reference to gate '{name}'")))
            }
            Some(&idx) => Ok(idx),
        }
    };

    let mut gates = Vec::with_capacity(gate_lines.len());
    for (k, line) in gate_lines.iter().enumerate() {
        let toks = &line.toks;
        let kind = toks.get(1).copied().ok_or_else(|| {
            Error::parse(line.no, toks[0].1, "expected a gate kind after the id")
        })?;
        let arity_err = |want: usize| {
            Error::parse(
                line.no,
                toks[0].1,
                format!("'{}' takes {} operand(s), line has {}", kind.0, want, toks.len() - 2),
            )
        };
        let gate = match kind.0 {
            "input" => {
                let (val, col) = *toks.get(2).ok_or_else(|| arity_err(1))?;
                if toks.len() != 3 {
                    return Err(arity_err(1));
                }
                let j: usize = val.parse().map_err(|_| {
                    Error::parse(line.no, col, format!("expected an input index, found '{val}'"))
                })?;
                if j >= n_inputs {
                    return Err(Error::parse(
                        line.no,
                        col,
                        format!("input index {j} out of range for n={n_inputs}"),
                    ));
                }
                Gate::Input(j)
            }
            "const" => {
                let (val, col) = *toks.get(2).ok_or_else(|| arity_err(1))?;
                if toks.len() != 3 {
                    return Err(arity_err(1));
                }
                let c: i64 = val.parse().map_err(|_| {
                    Error::parse(line.no, col, format!("expected an integer constant, found '{val}'"))
                })?;
                Gate::Const(c)
            }
            "add" | "mul" => {
                if toks.len() != 4 {
                    return Err(arity_err(2));
                }
                let a = resolve(toks[2].0, k, line.no, toks[2].1)?;
                let b = resolve(toks[3].0, k, line.no, toks[3].1)?;
                if kind.0 == "add" {
                    Gate::Add(a, b)
                } else {
                    Gate::Mul(a, b)
                }
            }
            other => {
                return Err(Error::parse(
                    line.no,
                    kind.1,
                    format!("unknown gate kind '{other}' (expected input, const, add, or mul)"),
                ))
            }
        };
        gates.push(gate);
    }

    if last.toks.len() != 2 {
        return Err(Error::parse(last.no, last.toks[0].1, "expected 'output <gate>'"));
    }
    let (out_name, out_col) = last.toks[1];
    let output = match defs.get(out_name) {
        Some(&idx) => idx,
        None => {
            return Err(Error::parse(last.no, out_col, format!("unknown gate '{out_name}'")))
        }
    };
    Circuit::new(gates, n_inputs, output)
}

fn parse_header(line_no: usize, toks: &[(&str, usize)]) -> Result<usize> {
    if toks[0].0 != "circuit" {
        return Err(Error::parse(line_no, toks[0].1, "expected 'circuit n=<count>' header"));
    }
    let (decl, col) = match toks.get(1) {
        Some(&t) if toks.len() == 2 => t,
        _ => {
            return Err(Error::parse(
                line_no,
                toks[0].1,
                "header must be exactly 'circuit n=<count>'",
            ))
        }
    };
    let Some(digits) = decl.strip_prefix("n=") else {
        return Err(Error::parse(line_no, col, format!("expected 'n=<count>', found '{decl}'")));
    };
    digits
        .parse()
        .map_err(|_| Error::parse(line_no, col, format!("expected 'n=<count>', found '{decl}'")))
}

/// Whitespace-splits a line, keeping the 1-based column of each token.
fn split_line_tokens(line: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col0, (i, ch)) in line.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                out.push((&line[s..i], c));
            }
        } else if start.is_none() {
            start = Some((i, col0 + 1));
        }
    }
    if let Some((s, c)) = start {
        out.push((&line[s..], c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{mulmod, powmod};
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn product_plus_input() -> Circuit {
        // x1·x2 + x3
        Circuit::new(
            vec![
                Gate::Input(0),
                Gate::Input(1),
                Gate::Mul(0, 1),
                Gate::Input(2),
                Gate::Add(2, 3),
            ],
            3,
            4,
        )
        .unwrap()
    }

    #[test]
    fn hand_built_circuit_evaluates() {
        let f7 = Field::prime(7).unwrap();
        let c = product_plus_input();
        let point = [f7.embed(2), f7.embed(3), f7.embed(1)];
        assert_eq!(c.evaluate(&f7, &point).unwrap(), f7.zero()); // 2·3 + 1 = 7 ≡ 0
        assert_eq!(c.syntactic_degree(), 2);
        assert_eq!(c.size(), 5);
    }

    #[test]
    fn constant_circuit_needs_no_inputs() {
        let c = Circuit::new(vec![Gate::Const(5)], 0, 0).unwrap();
        for field in [Field::prime(7).unwrap(), Field::extension(2, 4).unwrap()] {
            assert_eq!(c.evaluate(&field, &[]).unwrap(), field.embed(5));
        }
        assert_eq!(c.syntactic_degree(), 0);
    }

    #[test]
    fn negative_constants_reduce_into_the_field() {
        let f7 = Field::prime(7).unwrap();
        let c = Circuit::new(vec![Gate::Const(-1)], 0, 0).unwrap();
        assert_eq!(c.evaluate(&f7, &[]).unwrap(), f7.embed(6));
        let c = Circuit::new(vec![Gate::Const(i64::MIN)], 0, 0).unwrap();
        let expect = i128::from(i64::MIN).rem_euclid(7) as u64;
        assert_eq!(c.evaluate(&f7, &[]).unwrap(), f7.embed(expect));
    }

    #[test]
    fn syntactic_degree_rules() {
        let square =
            Circuit::new(vec![Gate::Input(0), Gate::Mul(0, 0)], 1, 1).unwrap();
        assert_eq!(square.syntactic_degree(), 2);
        let lone = Circuit::new(vec![Gate::Input(0)], 1, 0).unwrap();
        assert_eq!(lone.syntactic_degree(), 1);
        // Add takes the max of its operands
        let c = Circuit::new(
            vec![Gate::Input(0), Gate::Mul(0, 0), Gate::Const(3), Gate::Add(1, 2)],
            1,
            3,
        )
        .unwrap();
        assert_eq!(c.syntactic_degree(), 2);
    }

    #[test]
    fn syntactic_degree_saturates_instead_of_overflowing() {
        // 70 squarings: degree 2^70 saturates to u64::MAX
        let mut gates = vec![Gate::Input(0)];
        for g in 0..70 {
            gates.push(Gate::Mul(g, g));
        }
        let c = Circuit::new(gates, 1, 70).unwrap();
        assert_eq!(c.syntactic_degree(), u64::MAX);
    }

    #[test]
    fn construction_rejects_invalid_circuits() {
        // forward reference
        assert!(Circuit::new(vec![Gate::Add(0, 1), Gate::Input(0)], 1, 0).is_err());
        // self reference
        assert!(Circuit::new(vec![Gate::Input(0), Gate::Mul(1, 0)], 1, 1).is_err());
        // input out of range
        assert!(Circuit::new(vec![Gate::Input(2)], 2, 0).is_err());
        // output out of range
        assert!(Circuit::new(vec![Gate::Input(0)], 1, 1).is_err());
        // empty gate list has no valid output
        assert!(Circuit::new(vec![], 0, 0).is_err());
    }

    #[test]
    fn evaluate_validates_the_point() {
        let f7 = Field::prime(7).unwrap();
        let f5 = Field::prime(5).unwrap();
        let c = product_plus_input();
        assert!(matches!(c.evaluate(&f7, &[f7.embed(1)]), Err(Error::Usage(_))));
        let mixed = [f7.embed(1), f5.embed(1), f7.embed(1)];
        assert!(matches!(c.evaluate(&f7, &mixed), Err(Error::Usage(_))));
    }

    // -- randomized cross-checks against a symbolic expansion oracle --------

    /// Multivariate polynomial as exponent-vector -> coefficient (mod q).
    type Expanded = HashMap<Vec<u16>, u64>;

    fn expand(c: &Circuit, q: u64) -> Expanded {
        let n = c.n_inputs();
        let mut polys: Vec<Expanded> = Vec::with_capacity(c.size());
        for gate in c.gates() {
            let poly = match *gate {
                Gate::Input(j) => {
                    let mut e = vec![0u16; n];
                    e[j] = 1;
                    HashMap::from([(e, 1u64)])
                }
                Gate::Const(v) => {
                    let r = const_residue(v, q);
                    if r == 0 {
                        HashMap::new()
                    } else {
                        HashMap::from([(vec![0u16; n], r)])
                    }
                }
                Gate::Add(a, b) => {
                    let mut out = polys[a].clone();
                    for (e, &cb) in &polys[b] {
                        let slot = out.entry(e.clone()).or_insert(0);
                        *slot = (*slot + cb) % q;
                    }
                    out.retain(|_, v| *v != 0);
                    out
                }
                Gate::Mul(a, b) => {
                    let mut out: Expanded = HashMap::new();
                    for (ea, &ca) in &polys[a] {
                        for (eb, &cb) in &polys[b] {
                            let e: Vec<u16> =
                                ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                            let slot = out.entry(e).or_insert(0);
                            *slot = (*slot + mulmod(ca, cb, q)) % q;
                        }
                    }
                    out.retain(|_, v| *v != 0);
                    out
                }
            };
            polys.push(poly);
        }
        polys.swap_remove(c.output())
    }

    fn eval_expanded(poly: &Expanded, point: &[u64], q: u64) -> u64 {
        let mut acc = 0u64;
        for (e, &c) in poly {
            let mut term = c;
            for (j, &exp) in e.iter().enumerate() {
                term = mulmod(term, powmod(point[j], u64::from(exp), q), q);
            }
            acc = (acc + term) % q;
        }
        acc
    }

    fn random_low_degree_circuit(rng: &mut ChaCha12Rng, n: usize, extra: usize) -> Circuit {
        loop {
            let mut gates: Vec<Gate> = (0..n).map(Gate::Input).collect();
            for _ in 0..extra {
                let g = gates.len();
                let pick = |rng: &mut ChaCha12Rng| (rng.next_u64() as usize) % g;
                let gate = match rng.next_u64() % 10 {
                    0..=2 => Gate::Const((rng.next_u64() % 11) as i64 - 5),
                    3..=6 => Gate::Add(pick(rng), pick(rng)),
                    _ => Gate::Mul(pick(rng), pick(rng)),
                };
                gates.push(gate);
            }
            let output = gates.len() - 1;
            let c = Circuit::new(gates, n, output).unwrap();
            if (1..=12).contains(&c.syntactic_degree()) {
                return c;
            }
        }
    }

    #[test]
    fn evaluation_matches_symbolic_expansion() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for q in [5u64, 101] {
            let field = Field::prime(q).unwrap();
            for _ in 0..20 {
                let c = random_low_degree_circuit(&mut rng, 3, 15);
                let poly = expand(&c, q);
                for _ in 0..10 {
                    let point: Vec<u64> = (0..3).map(|_| rng.next_u64() % q).collect();
                    let elems: Vec<FieldElement> =
                        point.iter().map(|&v| field.embed(v)).collect();
                    let got = c.evaluate(&field, &elems).unwrap();
                    assert_eq!(got, field.embed(eval_expanded(&poly, &point, q)));
                }
                // and the syntactic degree bounds the true total degree
                let true_deg = poly
                    .keys()
                    .map(|e| e.iter().map(|&x| u64::from(x)).sum::<u64>())
                    .max()
                    .unwrap_or(0);
                assert!(true_deg <= c.syntactic_degree());
            }
        }
    }

    #[test]
    fn batch_evaluation_agrees_with_single_points() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let field = Field::extension(3, 2).unwrap();
        let c = random_low_degree_circuit(&mut rng, 3, 12);
        let count = 17;
        let mut cols: Vec<Vec<u64>> = vec![Vec::new(); 3];
        let mut points: Vec<Vec<FieldElement>> = Vec::new();
        for i in 0..count {
            let point: Vec<FieldElement> = (0..3)
                .map(|j| field.canonical_element(((i * 3 + j) % 9) as u128).unwrap())
                .collect();
            for (j, p) in point.iter().enumerate() {
                cols[j].extend_from_slice(p.limbs());
            }
            points.push(point);
        }
        let out = c.evaluate_columns(&field, &cols, count).unwrap();
        let ell = field.ell();
        for (i, point) in points.iter().enumerate() {
            let single = c.evaluate(&field, point).unwrap();
            assert_eq!(&out[i * ell..(i + 1) * ell], single.limbs());
        }
        // malformed column lengths are a usage error
        assert!(matches!(
            c.evaluate_columns(&field, &cols, count + 1),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn evaluation_commutes_with_embedding() {
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        for (q, ell) in [(5u64, 2u32), (2, 4)] {
            let base = Field::prime(q).unwrap();
            let ext = Field::extension(q, ell).unwrap();
            for _ in 0..10 {
                let c = random_low_degree_circuit(&mut rng, 3, 12);
                let residues: Vec<u64> = (0..3).map(|_| rng.next_u64() % q).collect();
                let base_point: Vec<FieldElement> =
                    residues.iter().map(|&v| base.embed(v)).collect();
                let ext_point: Vec<FieldElement> =
                    residues.iter().map(|&v| ext.embed(v)).collect();
                let over_base = c.evaluate(&base, &base_point).unwrap();
                let over_ext = c.evaluate(&ext, &ext_point).unwrap();
                assert_eq!(over_ext, ext.embed(over_base.project_base().unwrap()));
            }
        }
    }

    // -- arithmetization ----------------------------------------------------

    #[test]
    fn arithmetized_connective_identities() {
        let f7 = Field::prime(7).unwrap();
        let not = arithmetize(&!(BoolFormula::Var(0)));
        assert_eq!(not.evaluate(&f7, &[f7.embed(0)]).unwrap(), f7.one());
        assert_eq!(not.evaluate(&f7, &[f7.embed(1)]).unwrap(), f7.zero());
        let or = arithmetize(&BoolFormula::or(BoolFormula::Var(0), BoolFormula::Var(1)));
        assert_eq!(or.evaluate(&f7, &[f7.one(), f7.one()]).unwrap(), f7.one());
    }

    #[test]
    fn balanced_and_tree_has_degree_two_to_the_depth() {
        fn and_tree(lo: usize, hi: usize) -> BoolFormula {
            if hi - lo == 1 {
                BoolFormula::Var(lo)
            } else {
                let mid = lo + (hi - lo) / 2;
                BoolFormula::and(and_tree(lo, mid), and_tree(mid, hi))
            }
        }
        // depth 4 over 16 distinct variables
        let c = arithmetize(&and_tree(0, 16));
        assert_eq!(c.syntactic_degree(), 16);
        assert_eq!(c.n_inputs(), 16);
    }

    #[test]
    fn builder_deduplicates_inputs_and_constants() {
        let c = arithmetize(&BoolFormula::and(BoolFormula::Var(0), BoolFormula::Var(0)));
        let inputs = c.gates().iter().filter(|g| matches!(g, Gate::Input(_))).count();
        assert_eq!(inputs, 1);
        // NOT(x) twice shares the 1 and -1 constants
        let f = BoolFormula::and(
            !(BoolFormula::Var(0)),
            !(BoolFormula::Var(1)),
        );
        let c = arithmetize(&f);
        let consts = c.gates().iter().filter(|g| matches!(g, Gate::Const(_))).count();
        assert_eq!(consts, 2);
    }

    #[test]
    fn builder_balanced_fold_and_inline() {
        let square = parse_circuit("circuit n=1\ng1 input 0\ng2 mul g1 g1\noutput g2").unwrap();
        let mut b = CircuitBuilder::new(2);
        let x = b.input(0);
        let y = b.input(1);
        let sx = b.inline(&square, &[x]);
        let sy = b.inline(&square, &[y]);
        let total = b.balanced_sum(&[sx, sy]);
        let c = b.finish(total);
        let f11 = Field::prime(11).unwrap();
        // 3^2 + 4^2 = 25 ≡ 3 (mod 11)
        let got = c.evaluate(&f11, &[f11.embed(3), f11.embed(4)]).unwrap();
        assert_eq!(got, f11.embed(3));
        assert_eq!(c.syntactic_degree(), 2);

        let mut b = CircuitBuilder::new(0);
        let empty_sum = b.balanced_sum(&[]);
        let empty_product = b.balanced_product(&[]);
        let pair = b.add(empty_sum, empty_product);
        let c = b.finish(pair);
        assert_eq!(c.evaluate(&f11, &[]).unwrap(), f11.one());
    }

    #[test]
    fn arithmetize_padded_widens_the_input_space() {
        let f = BoolFormula::Var(0);
        let c = arithmetize_padded(&f, 3).unwrap();
        assert_eq!(c.n_inputs(), 3);
        assert!(arithmetize_padded(&BoolFormula::Var(2), 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn arithmetized_formula_matches_truth_table(f in formula_strategy()) {
            let n = f.num_vars();
            prop_assume!(n <= 6);
            let c = arithmetize(&f);
            prop_assert_eq!(c.n_inputs(), n);
            for field in [Field::prime(2).unwrap(), Field::prime(101).unwrap()] {
                for mask in 0u32..(1 << n) {
                    let bools: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
                    let point: Vec<FieldElement> =
                        bools.iter().map(|&b| field.embed(u64::from(b))).collect();
                    let got = c.evaluate(&field, &point).unwrap();
                    // Boolean inputs stay Boolean, and match the formula
                    prop_assert_eq!(got, field.embed(u64::from(f.eval(&bools))));
                }
            }
        }

        #[test]
        fn formula_rendering_round_trips(f in formula_strategy()) {
            let text = render(&f);
            let parsed = parse_formula(&text).unwrap();
            prop_assert_eq!(parsed, f);
        }
    }

    fn formula_strategy() -> impl Strategy<Value = BoolFormula> {
        let leaf = prop_oneof![
            (0usize..6).prop_map(BoolFormula::Var),
            any::<bool>().prop_map(BoolFormula::Const),
        ];
        leaf.prop_recursive(5, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| !f),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| BoolFormula::and(l, r)),
                (inner.clone(), inner).prop_map(|(l, r)| BoolFormula::or(l, r)),
            ]
        })
    }

    fn render(f: &BoolFormula) -> String {
        match f {
            BoolFormula::Const(false) => "0".to_string(),
            BoolFormula::Const(true) => "1".to_string(),
            BoolFormula::Var(j) => format!("x{}", j + 1),
            BoolFormula::Not(g) => format!("!({})", render(g)),
            BoolFormula::And(l, r) => format!("({} & {})", render(l), render(r)),
            BoolFormula::Or(l, r) => format!("({} | {})", render(l), render(r)),
        }
    }

    // -- parsers ------------------------------------------------------------

    #[test]
    fn parse_formula_examples() {
        assert_eq!(
            parse_formula("x1 & !x2").unwrap(),
            BoolFormula::and(BoolFormula::Var(0), !(BoolFormula::Var(1)))
        );
        // precedence: ! over & over |
        assert_eq!(
            parse_formula("!x1 | x2 & x3").unwrap(),
            BoolFormula::or(
                !(BoolFormula::Var(0)),
                BoolFormula::and(BoolFormula::Var(1), BoolFormula::Var(2))
            )
        );
        // parentheses override
        assert_eq!(
            parse_formula("!(x1 | x2) & x3").unwrap(),
            BoolFormula::and(
                !(BoolFormula::or(BoolFormula::Var(0), BoolFormula::Var(1))),
                BoolFormula::Var(2)
            )
        );
        assert_eq!(
            parse_formula("0 | 1").unwrap(),
            BoolFormula::or(BoolFormula::Const(false), BoolFormula::Const(true))
        );
        // double negation and tight spacing
        assert_eq!(
            parse_formula("!!x10").unwrap(),
            !(!(BoolFormula::Var(9)))
        );
    }

    #[test]
    fn parse_formula_errors_carry_positions() {
        match parse_formula("x1 & & x2") {
            Err(Error::Parse { line: 1, col: 6, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
        match parse_formula("x1 @ x2") {
            Err(Error::Parse { line: 1, col: 4, msg }) => {
                assert!(msg.contains('@'), "message should name the character: {msg}")
            }
            other => panic!("unexpected result {other:?}"),
        }
        assert!(matches!(parse_formula("x0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_formula("(x1"), Err(Error::Parse { .. })));
        // trailing input reported at the stray token
        match parse_formula("x1 x2") {
            Err(Error::Parse { line: 1, col: 4, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn parse_circuit_squaring_example() {
        let text = "# squaring\n\ncircuit n=1\ng1 input 0   # the input\ng2 mul g1 g1\noutput g2\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.n_inputs(), 1);
        assert_eq!(c.syntactic_degree(), 2);
        let f7 = Field::prime(7).unwrap();
        assert_eq!(c.evaluate(&f7, &[f7.embed(3)]).unwrap(), f7.embed(2));
    }

    #[test]
    fn parse_circuit_negative_constant() {
        let text = "circuit n=1\ng1 input 0\nneg const -1\ng3 mul g1 neg\noutput g3";
        let c = parse_circuit(text).unwrap();
        let f5 = Field::prime(5).unwrap();
        assert_eq!(c.evaluate(&f5, &[f5.embed(3)]).unwrap(), f5.embed(2));
    }

    #[test]
    fn parse_circuit_rejects_bad_input() {
        let check = |text: &str, line: usize, needle: &str| match parse_circuit(text) {
            Err(Error::Parse { line: l, msg, .. }) => {
                assert_eq!(l, line, "wrong line for {text:?}: {msg}");
                assert!(msg.contains(needle), "message {msg:?} should contain {needle:?}");
            }
            other => panic!("expected a parse error for {text:?}, got {other:?}"),
        };
        check("g1 input 0\noutput g1", 1, "header");
        check("circuit n=x\ng1 input 0\noutput g1", 1, "n=<count>");
        check("circuit n=1\ng1 input 0", 2, "output");
        check("circuit n=1\ng1 input 1\noutput g1", 2, "out of range");
        check("circuit n=1\ng1 input 0\ng1 input 0\noutput g1", 3, "duplicate");
        check("circuit n=1\ng1 add g2 g2\ng2 input 0\noutput g2", 2, "forward reference");
        check("circuit n=1\ng1 add g9 g9\noutput g1", 2, "unknown gate");
        check("circuit n=1\nadd input 0\noutput add", 2, "reserved");
        check("circuit n=1\ng1 squared 0\noutput g1", 2, "unknown gate kind");
        check("circuit n=1\ng1 input 0\noutput g1\ng2 input 0", 4, "final line");
        check("circuit n=1\ng1 input 0\noutput g1\noutput g1", 3, "final line");
        check("circuit n=1\ng1 const 99999999999999999999\noutput g1", 2, "integer");
        check("circuit n=1\ng1 input 0\ng2 mul g1\noutput g2", 3, "operand");
        check("", 1, "header");
    }

    #[test]
    fn parse_qbf_example() {
        let q = parse_qbf("EA x1 x2 : x1 | x2").unwrap();
        assert_eq!(q.prefix(), &[Quant::Exists, Quant::ForAll]);
        assert_eq!(
            *q.matrix(),
            BoolFormula::or(BoolFormula::Var(0), BoolFormula::Var(1))
        );
        assert_eq!(q.num_vars(), 2);
        // a variable the matrix does not mention is still fine
        let q = parse_qbf("AEA x1 x2 x3 : x1 & x2").unwrap();
        assert_eq!(q.num_vars(), 3);
    }

    #[test]
    fn parse_qbf_rejects_bad_input() {
        let check = |text: &str, needle: &str| match parse_qbf(text) {
            Err(Error::Parse { msg, .. }) => {
                assert!(msg.contains(needle), "message {msg:?} should contain {needle:?}")
            }
            other => panic!("expected a parse error for {text:?}, got {other:?}"),
        };
        check("EB x1 x2 : x1", "'E' and 'A'");
        check("EA x2 x1 : x1", "expected variable x1");
        check("EA x1 : x1", "expected variable x2");
        check("EA x1 x2 x1", "':'");
        check("E x1 : x2", "declared");
        check("EA x1 x2 : x1 | x2 extra", "end of input");
        check("", "quantifier");
        // the quantifier-string position points into the word
        match parse_qbf("EAXE x1 x2 x3 x4 : x1") {
            Err(Error::Parse { line: 1, col: 3, .. }) => {}
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn quantified_formula_validates_variable_coverage() {
        let matrix = BoolFormula::Var(2);
        assert!(QuantifiedFormula::new(vec![Quant::Exists], matrix.clone()).is_err());
        assert!(QuantifiedFormula::new(
            vec![Quant::Exists, Quant::ForAll, Quant::Exists],
            matrix
        )
        .is_ok());
    }
}
