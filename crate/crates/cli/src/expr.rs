//! Cost expressions for `custom-cost`.
//!
//! Grammar (`^` binds tighter than unary minus and is right-associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'pi' | x<k> | func '(' expr ')' | '(' expr ')'
//! func    := 'sin' | 'cos' | 'exp'
//! ```
//!
//! Variables are 1-based (`x1` is the first coordinate). Partial derivatives
//! are computed exactly by forward-mode differentiation of the tree.

use std::fmt;

use sfpl::CostModel;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 0-based coordinate index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.message, self.position)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v = text.parse().map_err(|_| ParseError {
                position: start,
                message: format!("malformed number '{text}'"),
            })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(ParseError {
                position: i,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            self.error(format!("expected '{op}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some((offset, token)) = self.tokens.get(self.pos).cloned() else {
            return self.error("unexpected end of expression");
        };
        self.pos += 1;
        match token {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Ident(name) => match name.as_str() {
                "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                "sin" | "cos" | "exp" => {
                    self.expect('(')?;
                    let arg = Box::new(self.expr()?);
                    self.expect(')')?;
                    Ok(match name.as_str() {
                        "sin" => Expr::Sin(arg),
                        "cos" => Expr::Cos(arg),
                        _ => Expr::Exp(arg),
                    })
                }
                _ => match name.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()) {
                    Some(k) if k >= 1 && !name[1..].starts_with('0') => Ok(Expr::Var(k - 1)),
                    _ => Err(ParseError {
                        position: offset,
                        message: format!("unknown identifier '{name}'"),
                    }),
                },
            },
            Token::Op(c) => Err(ParseError {
                position: offset,
                message: format!("unexpected '{c}'"),
            }),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        tokens: tokenize(src)?,
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

impl Expr {
    /// Number of coordinates referenced, i.e. the largest variable index.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(k) => k + 1,
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => a.arity(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.dual(x, None).0
    }

    /// Value and derivative with respect to `x[n]`.
    pub fn eval_partial(&self, x: &[f64], n: usize) -> (f64, f64) {
        self.dual(x, Some(n))
    }

    fn dual(&self, x: &[f64], wrt: Option<usize>) -> (f64, f64) {
        match self {
            Expr::Num(v) => (*v, 0.0),
            Expr::Var(k) => (x[*k], if wrt == Some(*k) { 1.0 } else { 0.0 }),
            Expr::Neg(a) => {
                let (v, d) = a.dual(x, wrt);
                (-v, -d)
            }
            Expr::Add(a, b) => {
                let ((u, du), (v, dv)) = (a.dual(x, wrt), b.dual(x, wrt));
                (u + v, du + dv)
            }
            Expr::Sub(a, b) => {
                let ((u, du), (v, dv)) = (a.dual(x, wrt), b.dual(x, wrt));
                (u - v, du - dv)
            }
            Expr::Mul(a, b) => {
                let ((u, du), (v, dv)) = (a.dual(x, wrt), b.dual(x, wrt));
                (u * v, du * v + u * dv)
            }
            Expr::Div(a, b) => {
                let ((u, du), (v, dv)) = (a.dual(x, wrt), b.dual(x, wrt));
                (u / v, (du * v - u * dv) / (v * v))
            }
            Expr::Pow(a, b) => {
                let ((u, du), (v, dv)) = (a.dual(x, wrt), b.dual(x, wrt));
                let p = u.powf(v);
                let d = if dv == 0.0 {
                    // constant exponent: valid for negative bases too
                    if du == 0.0 {
                        0.0
                    } else {
                        v * u.powf(v - 1.0) * du
                    }
                } else {
                    p * (dv * u.ln() + if du == 0.0 { 0.0 } else { v * du / u })
                };
                (p, d)
            }
            Expr::Sin(a) => {
                let (v, d) = a.dual(x, wrt);
                (v.sin(), v.cos() * d)
            }
            Expr::Cos(a) => {
                let (v, d) = a.dual(x, wrt);
                (v.cos(), -v.sin() * d)
            }
            Expr::Exp(a) => {
                let (v, d) = a.dual(x, wrt);
                let e = v.exp();
                (e, e * d)
            }
        }
    }
}

/// A parsed expression as a cost over `dim` coordinates.
#[derive(Debug, Clone)]
pub struct ExprCost {
    expr: Expr,
    dim: usize,
}

impl ExprCost {
    /// Fails if the expression references a coordinate beyond `dim`.
    pub fn new(expr: Expr, dim: usize) -> Result<Self, String> {
        if expr.arity() > dim {
            return Err(format!(
                "expression uses x{} but the search space has {dim} dimensions",
                expr.arity()
            ));
        }
        Ok(Self { expr, dim })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl CostModel for ExprCost {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    fn partial(&self, x: &[f64], n: usize) -> f64 {
        self.expr.eval_partial(x, n).1
    }
}
