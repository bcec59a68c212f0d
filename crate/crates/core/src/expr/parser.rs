use super::ast::{BinOp, Constant, Expr, Func, Var};
use super::ExprError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(c as char), i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only if followed by a digit (optionally signed), so `2*e` stays a constant
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let value = lexeme.parse::<f64>().map_err(|_| ExprError::Syntax {
                    offset: start,
                    expected: "a number".into(),
                    found: format!("`{lexeme}`"),
                })?;
                out.push((Tok::Num(value), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax { offset: i, expected: "an expression".into(), found: format!("`{ch}`") });
            }
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    cursor: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.cursor].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.cursor].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.cursor].clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ExprError {
        ExprError::Syntax { offset: self.offset(), expected: expected.into(), found: self.peek().describe() }
    }

    fn infix(&self) -> Option<BinOp> {
        match self.peek() {
            Tok::Op('+') => Some(BinOp::Add),
            Tok::Op('-') => Some(BinOp::Sub),
            Tok::Op('*') => Some(BinOp::Mul),
            Tok::Op('/') => Some(BinOp::Div),
            _ => None,
        }
    }

    // sum := product (('+'|'-') product)*
    // product := unary (('*'|'/') unary)*
    fn binary(&mut self, level: u8) -> Result<Expr, ExprError> {
        let mut lhs = if level == 1 { self.binary(2)? } else { self.unary()? };
        while let Some(op) = self.infix() {
            let op_level = if matches!(op, BinOp::Add | BinOp::Sub) { 1 } else { 2 };
            if op_level != level {
                break;
            }
            self.bump();
            let rhs = if level == 1 { self.binary(2)? } else { self.unary()? };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == &Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // power := atom ('^' unary)?   (right-associative through unary → power)
    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Num(x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.binary(1)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let offset = self.offset();
                self.bump();
                match name.as_str() {
                    "u" => Ok(Expr::Var(Var::U)),
                    "v" => Ok(Expr::Var(Var::V)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    "e" => Ok(Expr::Const(Constant::E)),
                    _ => match Func::from_name(&name) {
                        Some(func) => {
                            if self.peek() != &Tok::LParen {
                                return Err(self.error("`(` after function name"));
                            }
                            self.bump();
                            let arg = self.binary(1)?;
                            self.expect_rparen()?;
                            Ok(Expr::call(func, arg))
                        }
                        None => Err(ExprError::UnknownIdentifier { offset, name }),
                    },
                }
            }
            _ => Err(self.error("a number, variable, function or `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.peek() == &Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.error("`)`"))
        }
    }
}

/// Parses `text` into an expression tree.
///
/// Precedence from tightest: `^` (right-associative), unary `-`, `* /`, `+ -`.
/// Errors carry the byte offset of the offending token.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut parser = Parser { tokens: lex(text)?, cursor: 0 };
    let expr = parser.binary(1)?;
    if parser.peek() != &Tok::Eof {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(expr)
}
