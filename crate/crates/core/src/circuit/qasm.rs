//! OpenQASM 2 reader and writer for the gate set in [`GateKind`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;

use super::{Circuit, CircuitError, Gate, GateKind};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum QasmErrorKind {
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unexpected end of input")]
    Eof,
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("index {index} out of range for register of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("register arguments of different sizes")]
    BroadcastMismatch,
    #[error("unsupported statement `{0}`")]
    Unsupported(String),
    #[error("measurement writes classical bit {got}, expected bit {expected}")]
    MeasureOrder { expected: usize, got: usize },
    #[error("no quantum register declared")]
    MissingQreg,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Parse failure with 1-based source position.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct QasmError {
    pub kind: QasmErrorKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Str(String),
    Arrow,
    Sym(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => alloc::format!("`{s}`"),
            Tok::Num(s) => alloc::format!("number {s}"),
            Tok::Str(s) => alloc::format!("string \"{s}\""),
            Tok::Arrow => "`->`".to_string(),
            Tok::Sym(c) => alloc::format!("`{c}`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, QasmError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            Tok::Num(chars[start..i].iter().collect())
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(QasmError {
                    kind: QasmErrorKind::Eof,
                    line: l0,
                    column: c0,
                });
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            Tok::Arrow
        } else if "()[];,+-*/^{}".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(QasmError {
                kind: QasmErrorKind::Unexpected {
                    expected: "a token".to_string(),
                    found: alloc::format!("`{c}`"),
                },
                line: l0,
                column: c0,
            });
        };
        col += i - start;
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
    }
    Ok(out)
}

struct Register {
    offset: usize,
    size: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    qregs: BTreeMap<String, Register>,
    cregs: BTreeMap<String, Register>,
    n_qubits: usize,
    n_clbits: usize,
    gates: Vec<Gate>,
    n_measured: usize,
}

impl Parser {
    fn err_here(&self, kind: QasmErrorKind) -> QasmError {
        let (line, column) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(s) => (s.line, s.column),
            None => (1, 1),
        };
        QasmError { kind, line, column }
    }

    fn err_at(&self, at: usize, kind: QasmErrorKind) -> QasmError {
        let s = &self.toks[at.min(self.toks.len().saturating_sub(1))];
        QasmError {
            kind,
            line: s.line,
            column: s.column,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Result<Tok, QasmError> {
        match self.toks.get(self.pos) {
            Some(s) => {
                self.pos += 1;
                Ok(s.tok.clone())
            }
            None => Err(self.err_here(QasmErrorKind::Eof)),
        }
    }

    fn unexpected(&self, expected: &str) -> QasmError {
        match self.peek() {
            Some(t) => self.err_here(QasmErrorKind::Unexpected {
                expected: expected.to_string(),
                found: t.describe(),
            }),
            None => self.err_here(QasmErrorKind::Eof),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&alloc::format!("`{c}`")))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, QasmError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn integer(&mut self) -> Result<usize, QasmError> {
        match self.peek() {
            Some(Tok::Num(s)) => match s.parse::<usize>() {
                Ok(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                Err(_) => Err(self.unexpected("an integer")),
            },
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn program(&mut self) -> Result<(), QasmError> {
        if self.peek() == Some(&Tok::Ident("OPENQASM".to_string())) {
            self.pos += 1;
            match self.next()? {
                Tok::Num(_) => {}
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("a version number"));
                }
            }
            self.expect_sym(';')?;
        }
        while self.peek().is_some() {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let at = self.pos;
        let word = self.ident()?;
        match word.as_str() {
            "include" => {
                match self.next()? {
                    Tok::Str(_) => {}
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("a file name"));
                    }
                }
                self.expect_sym(';')
            }
            "qreg" | "creg" => {
                let name = self.ident()?;
                self.expect_sym('[')?;
                let size = self.integer()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                if word == "qreg" {
                    self.qregs.insert(
                        name,
                        Register {
                            offset: self.n_qubits,
                            size,
                        },
                    );
                    self.n_qubits += size;
                } else {
                    self.cregs.insert(
                        name,
                        Register {
                            offset: self.n_clbits,
                            size,
                        },
                    );
                    self.n_clbits += size;
                }
                Ok(())
            }
            "measure" => {
                let qs = self.qarg()?;
                if self.peek() != Some(&Tok::Arrow) {
                    return Err(self.unexpected("`->`"));
                }
                self.pos += 1;
                let c_at = self.pos;
                let cs = self.carg()?;
                self.expect_sym(';')?;
                if qs.len() != cs.len() {
                    return Err(self.err_at(at, QasmErrorKind::BroadcastMismatch));
                }
                for (q, c) in qs.into_iter().zip(cs) {
                    if c != self.n_measured {
                        return Err(self.err_at(
                            c_at,
                            QasmErrorKind::MeasureOrder {
                                expected: self.n_measured,
                                got: c,
                            },
                        ));
                    }
                    self.n_measured += 1;
                    self.gates.push(Gate::measure(q));
                }
                Ok(())
            }
            "barrier" => {
                let mut qubits = Vec::new();
                loop {
                    qubits.extend(self.qarg()?);
                    if !self.eat_sym(',') {
                        break;
                    }
                }
                self.expect_sym(';')?;
                qubits.dedup();
                let g = Gate::new(GateKind::Barrier, qubits, Vec::new())
                    .map_err(|e| self.err_at(at, e.into()))?;
                self.gates.push(g);
                Ok(())
            }
            "gate" | "opaque" | "if" | "reset" => {
                Err(self.err_at(at, QasmErrorKind::Unsupported(word)))
            }
            _ => self.gate_statement(at, &word),
        }
    }

    fn gate_statement(&mut self, at: usize, name: &str) -> Result<(), QasmError> {
        let kind = GateKind::from_name(name)
            .filter(|k| !matches!(k, GateKind::Measure | GateKind::Barrier))
            .ok_or_else(|| self.err_at(at, QasmErrorKind::UnknownGate(name.to_string())))?;
        let mut params = Vec::new();
        if self.eat_sym('(') && !self.eat_sym(')') {
            loop {
                params.push(self.expr()?);
                if self.eat_sym(')') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        let mut args: Vec<Vec<usize>> = Vec::new();
        if self.peek() != Some(&Tok::Sym(';')) {
            loop {
                args.push(self.qarg()?);
                if !self.eat_sym(',') {
                    break;
                }
            }
        }
        self.expect_sym(';')?;
        if args.is_empty() {
            let g = Gate::new(kind, Vec::new(), params).map_err(|e| self.err_at(at, e.into()))?;
            self.gates.push(g);
            return Ok(());
        }
        // Register arguments broadcast; single-qubit arguments repeat.
        let width = args.iter().map(Vec::len).max().unwrap_or(1);
        if args.iter().any(|a| a.len() != 1 && a.len() != width) {
            return Err(self.err_at(at, QasmErrorKind::BroadcastMismatch));
        }
        for i in 0..width {
            let qubits = args
                .iter()
                .map(|a| if a.len() == 1 { a[0] } else { a[i] })
                .collect();
            let g =
                Gate::new(kind, qubits, params.clone()).map_err(|e| self.err_at(at, e.into()))?;
            self.gates.push(g);
        }
        Ok(())
    }

    fn reg_arg(&mut self, quantum: bool) -> Result<Vec<usize>, QasmError> {
        let at = self.pos;
        let name = self.ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let (offset, size) = match regs.get(&name) {
            Some(r) => (r.offset, r.size),
            None => return Err(self.err_at(at, QasmErrorKind::UnknownRegister(name))),
        };
        if self.eat_sym('[') {
            let idx_at = self.pos;
            let index = self.integer()?;
            self.expect_sym(']')?;
            if index >= size {
                return Err(self.err_at(idx_at, QasmErrorKind::IndexOutOfRange { index, size }));
            }
            Ok(alloc::vec![offset + index])
        } else {
            Ok((offset..offset + size).collect())
        }
    }

    fn qarg(&mut self) -> Result<Vec<usize>, QasmError> {
        self.reg_arg(true)
    }

    fn carg(&mut self) -> Result<Vec<usize>, QasmError> {
        self.reg_arg(false)
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.factor()?;
        loop {
            if self.eat_sym('*') {
                v *= self.factor()?;
            } else if self.eat_sym('/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym('-') {
            return Ok(-self.factor()?);
        }
        if self.eat_sym('+') {
            return self.factor();
        }
        let base = self.primary()?;
        if self.eat_sym('^') {
            let e = self.factor()?;
            return Ok(libm::pow(base, e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<f64, QasmError> {
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.pos += 1;
                s.parse::<f64>().map_err(|_| {
                    self.pos -= 1;
                    self.unexpected("a number")
                })
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "pi" {
                    return Ok(PI);
                }
                let f: fn(f64) -> f64 = match name.as_str() {
                    "sin" => libm::sin,
                    "cos" => libm::cos,
                    "tan" => libm::tan,
                    "exp" => libm::exp,
                    "ln" => libm::log,
                    "sqrt" => libm::sqrt,
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("an expression"));
                    }
                };
                self.expect_sym('(')?;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(f(v))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// Parses an OpenQASM 2 program.
pub fn parse_qasm(src: &str) -> Result<Circuit, QasmError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        qregs: BTreeMap::new(),
        cregs: BTreeMap::new(),
        n_qubits: 0,
        n_clbits: 0,
        gates: Vec::new(),
        n_measured: 0,
    };
    p.program()?;
    if p.qregs.is_empty() && (!p.gates.is_empty() || !p.cregs.is_empty()) {
        return Err(QasmError {
            kind: QasmErrorKind::MissingQreg,
            line: 1,
            column: 1,
        });
    }
    Ok(Circuit {
        n_qubits: p.n_qubits,
        gates: p.gates,
    })
}

/// Writes a circuit as OpenQASM 2 with register `q` and, when measured, register `c`.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut s = String::new();
    s.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", c.n_qubits);
    let n_meas = c
        .gates
        .iter()
        .filter(|g| g.kind == GateKind::Measure)
        .count();
    if n_meas > 0 {
        let _ = writeln!(s, "creg c[{n_meas}];");
    }
    let mut clbit = 0;
    for g in &c.gates {
        if g.kind == GateKind::Measure {
            let _ = writeln!(s, "measure q[{}] -> c[{clbit}];", g.qubits[0]);
            clbit += 1;
            continue;
        }
        s.push_str(g.kind.name());
        if !g.params.is_empty() {
            s.push('(');
            for (i, p) in g.params.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{p}");
            }
            s.push(')');
        }
        for (i, q) in g.qubits.iter().enumerate() {
            s.push(if i == 0 { ' ' } else { ',' });
            let _ = write!(s, "q[{q}]");
        }
        s.push_str(";\n");
    }
    s
}
