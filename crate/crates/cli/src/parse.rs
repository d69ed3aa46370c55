//! The line-oriented job format.
//!
//! ```text
//! # unit circle
//! vars: x, y
//! poly: x^2 + y^2 - 1
//! operator: mccallum
//! ```

use std::fmt;
use std::str::FromStr;

use cadlift::arith::{MPoly, Rat, VarOrder};
use cadlift::projection::OperatorKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "command line, column {}: {}", self.column, self.message)
        } else {
            write!(
                f,
                "line {}, column {}: {}",
                self.line, self.column, self.message
            )
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            _ => Err(format!("unknown output format `{s}` (text, json or svg)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorName {
    Collins,
    McCallum,
}

impl FromStr for OperatorName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "collins" => Ok(OperatorName::Collins),
            "mccallum" => Ok(OperatorName::McCallum),
            _ => Err(format!("unknown operator `{s}` (collins or mccallum)")),
        }
    }
}

/// A fully resolved job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub polynomials: Vec<MPoly>,
    pub order: VarOrder,
    pub operator: OperatorKind,
    pub output: OutputFormat,
    /// Samples per cell for the sign-invariance check, when verifying.
    pub verify: Option<usize>,
    pub seed: u64,
    pub max_cells: Option<usize>,
}

impl JobSpec {
    /// 1-based index of the equational constraint, if any.
    pub fn ec(&self) -> Option<usize> {
        match self.operator {
            OperatorKind::McCallumReducedEC(i) => Some(i + 1),
            _ => None,
        }
    }

    /// The job in the input format.
    pub fn to_input(&self) -> String {
        let mut s = format!("vars: {}\n", self.order.names().join(", "));
        for p in &self.polynomials {
            s.push_str(&format!("poly: {}\n", p.display(&self.order)));
        }
        let op = match self.operator {
            OperatorKind::Collins => "collins",
            _ => "mccallum",
        };
        s.push_str(&format!("operator: {op}\n"));
        if let Some(k) = self.ec() {
            s.push_str(&format!("ec: {k}\n"));
        }
        let out = match self.output {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        };
        s.push_str(&format!("output: {out}\n"));
        if let Some(k) = self.verify {
            s.push_str(&format!("verify: {k}\n"));
        }
        s.push_str(&format!("seed: {}\n", self.seed));
        if let Some(m) = self.max_cells {
            s.push_str(&format!("max-cells: {m}\n"));
        }
        s
    }
}

/// Raw settings before resolution; the command line fills the same slots.
#[derive(Debug, Clone, Default)]
pub struct RawJob {
    /// Declared names with their source position.
    pub vars: Option<(Vec<String>, usize, usize)>,
    /// Polynomial sources with their position.
    pub polys: Vec<(String, usize, usize)>,
    pub operator: Option<OperatorName>,
    pub ec: Option<(usize, usize)>,
    pub output: Option<OutputFormat>,
    pub verify: Option<usize>,
    pub seed: Option<u64>,
    pub max_cells: Option<usize>,
}

fn value<T: FromStr>(s: &str, line: usize, col: usize, what: &str) -> Result<T, ParseError> {
    s.parse()
        .map_err(|_| ParseError::new(line, col, format!("invalid {what} `{s}`")))
}

/// Read the key/value lines of a job file.
pub fn parse_raw(source: &str) -> Result<RawJob, ParseError> {
    let mut job = RawJob::default();
    for (i, full) in source.lines().enumerate() {
        let line = i + 1;
        let text = full.split('#').next().unwrap();
        if text.trim().is_empty() {
            continue;
        }
        let Some(colon) = text.find(':') else {
            let col = text.len() - text.trim_start().len() + 1;
            return Err(ParseError::new(line, col, "expected `key: value`"));
        };
        let key = text[..colon].trim();
        let rest = &text[colon + 1..];
        let vcol = colon + 2 + (rest.len() - rest.trim_start().len());
        let val = rest.trim();
        let kcol = text.len() - text.trim_start().len() + 1;
        match key {
            "vars" => {
                let names: Vec<String> = val.split(',').map(|s| s.trim().to_string()).collect();
                job.vars = Some((names, line, vcol));
            }
            "poly" => job.polys.push((rest.to_string(), line, colon + 2)),
            "operator" => {
                job.operator = Some(
                    val.parse()
                        .map_err(|e: String| ParseError::new(line, vcol, e))?,
                )
            }
            "ec" => job.ec = Some((value(val, line, vcol, "ec index")?, line)),
            "output" => {
                job.output = Some(
                    val.parse()
                        .map_err(|e: String| ParseError::new(line, vcol, e))?,
                )
            }
            "verify" => job.verify = Some(value(val, line, vcol, "sample count")?),
            "seed" => job.seed = Some(value(val, line, vcol, "seed")?),
            "max-cells" => job.max_cells = Some(value(val, line, vcol, "cell budget")?),
            _ => return Err(ParseError::new(line, kcol, format!("unknown key `{key}`"))),
        }
    }
    Ok(job)
}

/// Resolve raw settings into a job.
pub fn resolve(raw: &RawJob) -> Result<JobSpec, ParseError> {
    let first_poly = raw.polys.first().map_or((1, 1), |p| (p.1, p.2));
    let Some((names, vline, vcol)) = &raw.vars else {
        return Err(ParseError::new(
            first_poly.0,
            first_poly.1,
            "variables undeclared",
        ));
    };
    for n in names {
        if !is_identifier(n) {
            return Err(ParseError::new(
                *vline,
                *vcol,
                format!("invalid variable name `{n}`"),
            ));
        }
    }
    let order = VarOrder::new(names.iter().cloned())
        .ok_or_else(|| ParseError::new(*vline, *vcol, "variable names must be distinct"))?;
    if raw.polys.is_empty() {
        return Err(ParseError::new(
            first_poly.0,
            first_poly.1,
            "no polynomials given",
        ));
    }
    let mut polynomials = Vec::new();
    for (src, line, col) in &raw.polys {
        polynomials.push(parse_poly(src, &order, *line, *col)?);
    }
    let operator = match (raw.operator.unwrap_or(OperatorName::McCallum), raw.ec) {
        (OperatorName::Collins, Some((_, line))) => {
            return Err(ParseError::new(line, 1, "ec needs the mccallum operator"))
        }
        (OperatorName::Collins, None) => OperatorKind::Collins,
        (OperatorName::McCallum, None) => OperatorKind::McCallum,
        (OperatorName::McCallum, Some((k, line))) => {
            if k == 0 || k > polynomials.len() {
                return Err(ParseError::new(
                    line,
                    1,
                    format!("ec index {k} out of range 1..={}", polynomials.len()),
                ));
            }
            OperatorKind::McCallumReducedEC(k - 1)
        }
    };
    let output = raw.output.unwrap_or(OutputFormat::Text);
    if output == OutputFormat::Svg && order.len() != 2 {
        return Err(ParseError::new(
            1,
            1,
            "svg output needs exactly two variables",
        ));
    }
    Ok(JobSpec {
        polynomials,
        order,
        operator,
        output,
        verify: raw.verify,
        seed: raw.seed.unwrap_or(0),
        max_cells: raw.max_cells,
    })
}

/// Parse a job file.
pub fn parse_input(source: &str) -> Result<JobSpec, ParseError> {
    resolve(&parse_raw(source)?)
}

fn is_identifier(s: &str) -> bool {
    let mut c = s.chars();
    c.next()
        .is_some_and(|h| h.is_ascii_alphabetic() || h == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    order: &'a VarOrder,
    line: usize,
}

fn tokenize(src: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(chars[s..i].iter().collect()), col));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[s..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else if c == '\u{2212}' {
            out.push((Tok::Sym('-'), col));
            i += 1;
        } else {
            return Err(ParseError::new(
                line,
                col,
                format!("unexpected character `{c}`"),
            ));
        }
    }
    out.push((Tok::End, col0 + chars.len()));
    Ok(out)
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Sym('/') => {
                    self.bump();
                    let col = self.col();
                    let d = self.power()?;
                    let q = d
                        .constant_value()
                        .filter(|q| *q != Rat::from_integer(0.into()))
                        .ok_or_else(|| {
                            ParseError::new(self.line, col, "can only divide by a nonzero constant")
                        })?;
                    acc = acc.scale(&(Rat::from_integer(1.into()) / q));
                }
                // Juxtaposition multiplies: 2x, 3(x + 1).
                Tok::Num(_) | Tok::Ident(_) | Tok::Sym('(') => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<MPoly, ParseError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Sym('^') {
            self.bump();
            let col = self.col();
            match self.bump() {
                Tok::Num(n) => {
                    let k: u32 = n
                        .parse()
                        .map_err(|_| ParseError::new(self.line, col, "exponent too large"))?;
                    Ok(base.pow(k))
                }
                _ => Err(ParseError::new(
                    self.line,
                    col,
                    "expected a nonnegative integer exponent",
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MPoly, ParseError> {
        let n = self.order.len();
        let col = self.col();
        match self.bump() {
            Tok::Num(s) => {
                let q: Rat = s
                    .parse()
                    .map_err(|_| ParseError::new(self.line, col, "bad number"))?;
                Ok(MPoly::constant(n, q))
            }
            Tok::Ident(name) => match self.order.position(&name) {
                Some(v) => Ok(MPoly::var(n, v)),
                None => Err(ParseError::new(
                    self.line,
                    col,
                    format!("unknown variable `{name}`"),
                )),
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                if self.peek() != &Tok::Sym(')') {
                    return Err(self.err("expected `)`"));
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(ParseError::new(
                self.line,
                col,
                "unexpected end of polynomial",
            )),
            Tok::Sym(c) => Err(ParseError::new(self.line, col, format!("unexpected `{c}`"))),
        }
    }
}

/// Parse one polynomial; `line` and `col` locate `src` for error messages.
pub fn parse_poly(
    src: &str,
    order: &VarOrder,
    line: usize,
    col: usize,
) -> Result<MPoly, ParseError> {
    let toks = tokenize(src, line, col)?;
    let mut p = Parser {
        toks,
        pos: 0,
        order,
        line,
    };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.err("unexpected input after polynomial"));
    }
    Ok(e)
}
