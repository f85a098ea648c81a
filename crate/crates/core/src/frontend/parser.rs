//! Recursive-descent parser for the manifold spec format.
//!
//! ```text
//! manifold heisenberg1
//! dim 3
//! hdim 2
//! coords x y z
//! hframe
//!   X1 = dx - (y/2) dz
//!   X2 = dy + (x/2) dz
//! vframe
//!   Z = dz
//! metric identity
//! oneform 1, 0
//! box z -2 2
//! ```
//!
//! `metric` may instead be followed by `hdim` row lines. Entries in metric
//! rows and `oneform` are separated by commas or by juxtaposition.

use crate::error::{Error, Result};
use crate::expr::{Expression, Func};
use crate::manifold::{ManifoldSpec, VectorFieldSpec};

const KEYWORDS: [&str; 9] = [
    "manifold", "dim", "hdim", "coords", "hframe", "vframe", "metric", "oneform", "box",
];

/// Parsed spec together with where each declaration came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecDocument {
    pub text: String,
    pub spec: ManifoldSpec,
    /// `(declaration, line, column)`, 1-based.
    pub locations: Vec<(String, usize, usize)>,
}

impl SpecDocument {
    pub fn location(&self, name: &str) -> Option<(usize, usize)> {
        self.locations
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, l, c)| (*l, *c))
    }
}

pub fn parse_manifold(text: &str) -> Result<ManifoldSpec> {
    Ok(parse_document(text)?.spec)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num { value: f64, int: Option<i64> },
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn describe(t: Option<&Token>) -> String {
    match t.map(|t| &t.tok) {
        None => "end of line".into(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(Tok::Num { value, .. }) => format!("number {value}"),
        Some(Tok::Sym(c)) => format!("`{c}`"),
    }
}

fn lex(line: usize, text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            let mut integral = true;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                integral = false;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    integral = false;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let value: f64 = s.parse().map_err(|_| Error::Parse {
                line,
                column: col,
                message: format!("malformed number `{s}`"),
            })?;
            let int = if integral { s.parse::<i64>().ok() } else { None };
            out.push(Token {
                tok: Tok::Num { value, int },
                col,
            });
        } else if "+-*/^()=,".contains(c) {
            out.push(Token { tok: Tok::Sym(c), col });
            i += 1;
        } else {
            return Err(Error::Parse {
                line,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct LineParser<'a> {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
    coords: &'a [String],
    /// Inside a vector-field expression `d<coord>` names a basis field.
    vf_mode: bool,
}

impl<'a> LineParser<'a> {
    fn new(line: usize, text: &str, coords: &'a [String]) -> Result<Self> {
        Ok(Self {
            toks: lex(line, text)?,
            pos: 0,
            line,
            end_col: text.chars().count() + 1,
            coords,
            vf_mode: false,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.toks.get(self.pos + k)
    }

    fn col(&self) -> usize {
        self.peek().map_or(self.end_col, |t| t.col)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse {
            line: self.line,
            column: self.col(),
            message: format!("expected {expected}, found {}", describe(self.peek())),
        }
    }

    fn is_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of line"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize)> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(s),
                col,
            }) => {
                let out = (s.clone(), *col);
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.error(what)),
        }
    }

    fn integer(&mut self, what: &str) -> Result<i64> {
        match self.peek() {
            Some(Token {
                tok: Tok::Num { int: Some(v), .. },
                ..
            }) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error(what)),
        }
    }

    fn signed_number(&mut self) -> Result<f64> {
        let sign = if self.eat_sym('-') {
            -1.0
        } else {
            self.eat_sym('+');
            1.0
        };
        match self.peek() {
            Some(Token {
                tok: Tok::Num { value, .. },
                ..
            }) => {
                let v = *value;
                self.pos += 1;
                Ok(sign * v)
            }
            _ => Err(self.error("a number")),
        }
    }

    fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    /// Coordinate index of a basis symbol `d<coord>`.
    fn basis_index(&self, t: Option<&Token>) -> Option<usize> {
        if !self.vf_mode {
            return None;
        }
        match t {
            Some(Token {
                tok: Tok::Ident(s), ..
            }) if self.coord_index(s).is_none() => s.strip_prefix('d').and_then(|r| self.coord_index(r)),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut lhs = self.term()?;
        loop {
            if self.vf_mode {
                // In a vector field, `+`/`-` separate basis terms.
                return Ok(lhs);
            }
            if self.eat_sym('+') {
                lhs = lhs + self.term()?;
            } else if self.eat_sym('-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expression> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym('*') {
                if self.basis_index(self.peek_at(1)).is_some() {
                    return Ok(lhs);
                }
                self.pos += 1;
                lhs = lhs * self.unary()?;
            } else if self.eat_sym('/') {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expression> {
        if self.eat_sym('-') {
            Ok(-self.unary()?)
        } else if self.eat_sym('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.primary()?;
        if self.eat_sym('^') {
            let col = self.col();
            let k = self.exponent()?;
            let k = i32::try_from(k).map_err(|_| Error::Parse {
                line: self.line,
                column: col,
                message: format!("exponent {k} out of range"),
            })?;
            Ok(base.powi(k))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let col = self.col();
        let base = if self.eat_sym('(') {
            let neg = self.eat_sym('-');
            if !neg {
                self.eat_sym('+');
            }
            let v = self.integer("an integer exponent")?;
            self.expect_sym(')')?;
            if neg {
                -v
            } else {
                v
            }
        } else {
            self.integer("an integer exponent")?
        };
        if self.eat_sym('^') {
            let top = self.exponent()?;
            let overflow = || Error::Parse {
                line: self.line,
                column: col,
                message: "exponent is not a representable integer".into(),
            };
            let top = u32::try_from(top).map_err(|_| overflow())?;
            base.checked_pow(top).ok_or_else(overflow)
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Expression> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.error("an expression"));
        };
        match t.tok {
            Tok::Num { value, .. } => {
                self.pos += 1;
                Ok(Expression::constant(value))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let saved = self.vf_mode;
                self.vf_mode = false;
                let e = self.expr();
                self.vf_mode = saved;
                let e = e?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(ref name) => {
                if let Some(i) = self.coord_index(name) {
                    self.pos += 1;
                    return Ok(Expression::coord(i));
                }
                if let Some(f) = Func::from_name(name) {
                    self.pos += 1;
                    self.expect_sym('(')?;
                    let saved = self.vf_mode;
                    self.vf_mode = false;
                    let e = self.expr();
                    self.vf_mode = saved;
                    let e = e?;
                    self.expect_sym(')')?;
                    return Ok(e.apply(f));
                }
                Err(Error::Parse {
                    line: self.line,
                    column: t.col,
                    message: format!("unknown identifier `{name}`"),
                })
            }
            _ => Err(self.error("an expression")),
        }
    }

    /// `[sign] [coef] d<coord> ((+|-) [coef] d<coord>)*`
    fn vector_field(&mut self, n: usize) -> Result<Vec<Expression>> {
        self.vf_mode = true;
        let mut comps: Vec<Option<Expression>> = vec![None; n];
        let mut first = true;
        loop {
            let negate = if self.eat_sym('-') {
                true
            } else if self.eat_sym('+') {
                false
            } else if first {
                false
            } else if self.at_end() {
                break;
            } else {
                return Err(self.error("`+`, `-` or end of line"));
            };
            first = false;
            let coef = if self.basis_index(self.peek()).is_some() {
                Expression::constant(1.0)
            } else {
                let c = self.term()?;
                self.eat_sym('*');
                c
            };
            let Some(k) = self.basis_index(self.peek()) else {
                return Err(self.error("a basis field `d<coord>`"));
            };
            self.pos += 1;
            let coef = if negate { -coef } else { coef };
            comps[k] = Some(match comps[k].take() {
                Some(prev) => prev + coef,
                None => coef,
            });
        }
        self.vf_mode = false;
        Ok(comps
            .into_iter()
            .map(|c| c.unwrap_or(Expression::constant(0.0)).canonical())
            .collect())
    }

    /// Expressions separated by commas or juxtaposition, up to end of line.
    fn entries(&mut self) -> Result<Vec<Expression>> {
        let mut out = Vec::new();
        if self.at_end() {
            return Err(self.error("an expression"));
        }
        while !self.at_end() {
            out.push(self.expr()?.canonical());
            if self.eat_sym(',') && self.at_end() {
                return Err(self.error("an expression"));
            }
        }
        Ok(out)
    }
}

struct Line<'t> {
    no: usize,
    text: &'t str,
}

fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
}

fn keyword_of(text: &str) -> Option<&str> {
    let first = text.split_whitespace().next()?;
    KEYWORDS.iter().find(|k| **k == first).copied()
}

fn validation(line: usize, message: impl Into<String>) -> Error {
    Error::Validation {
        line,
        message: message.into(),
    }
}

fn column_of(text: &str, word: &str) -> usize {
    text.find(word).map_or(1, |b| text[..b].chars().count() + 1)
}

#[derive(Default)]
struct Draft {
    name: Option<(String, usize)>,
    dim: Option<(usize, usize)>,
    hdim: Option<(usize, usize)>,
    coords: Option<(Vec<String>, usize)>,
    hframe: Option<(Vec<VectorFieldSpec>, usize)>,
    vframe: Option<(Vec<VectorFieldSpec>, usize)>,
    metric: Option<(Vec<Vec<Expression>>, usize)>,
    oneform: Option<(Vec<Expression>, usize)>,
    boxes: Vec<(usize, f64, f64, usize)>,
}

pub fn parse_document(text: &str) -> Result<SpecDocument> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .map(|(i, l)| Line {
            no: i + 1,
            text: strip_comment(l),
        })
        .filter(|l| !l.text.trim().is_empty())
        .collect();
    let last_line = text.lines().count().max(1);
    let mut d = Draft::default();
    let mut locations = Vec::new();
    let no_coords: Vec<String> = Vec::new();
    let mut idx = 0;

    while idx < lines.len() {
        let Line { no, text: raw } = lines[idx];
        idx += 1;
        let Some(kw) = keyword_of(raw) else {
            let first = raw.trim_start();
            let col = raw.chars().count() - first.chars().count() + 1;
            return Err(Error::Parse {
                line: no,
                column: col,
                message: format!(
                    "expected a declaration keyword, found `{}`",
                    first.split_whitespace().next().unwrap_or("")
                ),
            });
        };
        locations.push((kw.to_string(), no, column_of(raw, kw)));
        let duplicate = match kw {
            "manifold" => d.name.is_some(),
            "dim" => d.dim.is_some(),
            "hdim" => d.hdim.is_some(),
            "coords" => d.coords.is_some(),
            "hframe" => d.hframe.is_some(),
            "vframe" => d.vframe.is_some(),
            "metric" => d.metric.is_some(),
            "oneform" => d.oneform.is_some(),
            _ => false,
        };
        if duplicate {
            return Err(validation(no, format!("duplicate `{kw}` declaration")));
        }
        let coords: &[String] = d.coords.as_ref().map_or(&no_coords, |c| &c.0);
        // The manifold name is free text and is not tokenized.
        let mut p = LineParser::new(no, if kw == "manifold" { "" } else { raw }, coords)?;
        p.pos = 1;

        match kw {
            "manifold" => {
                let rest = raw.trim_start()["manifold".len()..].trim();
                let name = rest
                    .strip_prefix('"')
                    .and_then(|r| r.strip_suffix('"'))
                    .unwrap_or(rest)
                    .trim();
                if name.is_empty() {
                    return Err(Error::Parse {
                        line: no,
                        column: raw.trim_end().chars().count() + 1,
                        message: "expected a manifold name, found end of line".into(),
                    });
                }
                d.name = Some((name.to_string(), no));
            }
            "dim" | "hdim" => {
                let v = p.integer("a non-negative integer")?;
                p.expect_end()?;
                let v = usize::try_from(v).map_err(|_| validation(no, format!("{kw} must be non-negative")))?;
                if kw == "dim" {
                    d.dim = Some((v, no));
                } else {
                    d.hdim = Some((v, no));
                }
            }
            "coords" => {
                let mut names: Vec<String> = Vec::new();
                while !p.at_end() {
                    let (name, _) = p.ident("a coordinate name")?;
                    if KEYWORDS.contains(&name.as_str()) || Func::from_name(&name).is_some() {
                        return Err(validation(no, format!("`{name}` is reserved and cannot name a coordinate")));
                    }
                    if names.contains(&name) {
                        return Err(validation(no, format!("duplicate coordinate `{name}`")));
                    }
                    names.push(name);
                }
                if names.is_empty() {
                    return Err(p.error("a coordinate name"));
                }
                for a in &names {
                    if let Some(r) = a.strip_prefix('d') {
                        if names.iter().any(|b| b == r) {
                            return Err(validation(no, format!("coordinate `{a}` clashes with the basis field of `{r}`")));
                        }
                    }
                }
                d.coords = Some((names, no));
            }
            "hframe" | "vframe" => {
                p.expect_end()?;
                let Some((coords, _)) = d.coords.as_ref() else {
                    return Err(validation(no, format!("`coords` must precede `{kw}`")));
                };
                let mut fields = Vec::new();
                while idx < lines.len() && keyword_of(lines[idx].text).is_none() {
                    let Line { no: fno, text: ftext } = lines[idx];
                    idx += 1;
                    let mut fp = LineParser::new(fno, ftext, coords)?;
                    let (name, col) = fp.ident("a field name")?;
                    fp.expect_sym('=')?;
                    let comps = fp.vector_field(coords.len())?;
                    locations.push((name.clone(), fno, col));
                    fields.push(VectorFieldSpec::new(name, comps));
                }
                if kw == "hframe" {
                    d.hframe = Some((fields, no));
                } else {
                    d.vframe = Some((fields, no));
                }
            }
            "metric" => {
                let Some((coords, _)) = d.coords.as_ref() else {
                    return Err(validation(no, "`coords` must precede `metric`"));
                };
                let Some((hdim, _)) = d.hdim else {
                    return Err(validation(no, "`hdim` must precede `metric`"));
                };
                let mode = if p.at_end() { None } else { Some(p.ident("`identity` or `rows`")?.0) };
                p.expect_end()?;
                let rows = match mode.as_deref() {
                    Some("identity") => (0..hdim)
                        .map(|i| {
                            (0..hdim)
                                .map(|j| Expression::constant(if i == j { 1.0 } else { 0.0 }))
                                .collect()
                        })
                        .collect(),
                    None | Some("rows") => {
                        let mut rows = Vec::new();
                        while idx < lines.len() && keyword_of(lines[idx].text).is_none() {
                            let Line { no: rno, text: rtext } = lines[idx];
                            idx += 1;
                            let row = LineParser::new(rno, rtext, coords)?.entries()?;
                            if row.len() != hdim {
                                return Err(validation(
                                    rno,
                                    format!("metric row has {} entries, expected {hdim}", row.len()),
                                ));
                            }
                            rows.push((row, rno));
                        }
                        if rows.len() != hdim {
                            return Err(validation(no, format!("metric has {} rows, expected {hdim}", rows.len())));
                        }
                        for i in 0..hdim {
                            for j in 0..i {
                                if rows[i].0[j] != rows[j].0[i] {
                                    return Err(validation(
                                        rows[i].1,
                                        format!("metric is not symmetric: entry ({}, {}) differs from ({}, {})", i + 1, j + 1, j + 1, i + 1),
                                    ));
                                }
                            }
                        }
                        rows.into_iter().map(|r| r.0).collect()
                    }
                    Some(other) => {
                        return Err(Error::Parse {
                            line: no,
                            column: column_of(raw, other),
                            message: format!("expected `identity` or `rows`, found `{other}`"),
                        })
                    }
                };
                d.metric = Some((rows, no));
            }
            "oneform" => {
                if d.coords.is_none() {
                    return Err(validation(no, "`coords` must precede `oneform`"));
                }
                d.oneform = Some((p.entries()?, no));
            }
            "box" => {
                let Some((coords, _)) = d.coords.as_ref() else {
                    return Err(validation(no, "`coords` must precede `box`"));
                };
                let (name, col) = p.ident("a coordinate name")?;
                let Some(k) = coords.iter().position(|c| *c == name) else {
                    return Err(Error::Parse {
                        line: no,
                        column: col,
                        message: format!("unknown coordinate `{name}`"),
                    });
                };
                let lo = p.signed_number()?;
                let hi = p.signed_number()?;
                p.expect_end()?;
                d.boxes.push((k, lo, hi, no));
            }
            _ => unreachable!("keyword list is closed"),
        }
    }

    let missing = |what: &str| validation(last_line, format!("missing `{what}` declaration"));
    let (name, name_line) = d.name.ok_or_else(|| missing("manifold"))?;
    let (dim, dim_line) = d.dim.ok_or_else(|| missing("dim"))?;
    let (hdim, hdim_line) = d.hdim.ok_or_else(|| missing("hdim"))?;
    let (coords, coords_line) = d.coords.ok_or_else(|| missing("coords"))?;
    let (hframe, hframe_line) = d.hframe.ok_or_else(|| missing("hframe"))?;
    let (vframe, vframe_line) = d.vframe.ok_or_else(|| missing("vframe"))?;
    let (metric, metric_line) = d.metric.ok_or_else(|| missing("metric"))?;

    if coords.len() != dim {
        return Err(validation(coords_line, format!("{} coordinates declared, dim is {dim}", coords.len())));
    }
    if hdim < 2 || hdim >= dim {
        return Err(validation(hdim_line, format!("need 2 <= hdim < dim, got hdim = {hdim}, dim = {dim}")));
    }
    let _ = dim_line;
    if hframe.len() != hdim {
        return Err(validation(hframe_line, format!("hframe has {} fields, expected hdim = {hdim}", hframe.len())));
    }
    if vframe.len() != dim - hdim {
        return Err(validation(
            vframe_line,
            format!("vframe has {} fields, expected dim - hdim = {}", vframe.len(), dim - hdim),
        ));
    }
    let relocate = |line: usize| {
        move |e: Error| match e {
            Error::Validation { message, .. } => Error::Validation { line, message },
            other => other,
        }
    };
    let mut spec = ManifoldSpec::new(name, coords, hframe, vframe, metric).map_err(relocate(metric_line))?;
    if let Some((pi, line)) = d.oneform {
        spec = spec.with_oneform(pi).map_err(relocate(line))?;
    }
    for (k, lo, hi, line) in d.boxes {
        spec = spec.with_box(k, lo, hi).map_err(relocate(line))?;
    }
    let _ = name_line;
    Ok(SpecDocument {
        text: text.to_string(),
        spec,
        locations,
    })
}

/// Parse one scalar expression over the given coordinate names.
pub fn parse_expression(text: &str, coords: &[String]) -> Result<Expression> {
    let mut p = LineParser::new(1, text, coords)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e.canonical())
}

/// Parse a vector-field expression such as `dx - (y/2) dz`.
pub fn parse_vector_field(text: &str, coords: &[String]) -> Result<Vec<Expression>> {
    let mut p = LineParser::new(1, text, coords)?;
    p.vector_field(coords.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEISENBERG: &str = "\
# Heisenberg group
manifold heisenberg1
dim 3
hdim 2
coords x y z
hframe
  X1 = dx - (y/2) dz
  X2 = dy + (x/2) dz
vframe
  Z = dz
metric identity
";

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn heisenberg_source() {
        let doc = parse_document(HEISENBERG).unwrap();
        let s = &doc.spec;
        assert_eq!((s.n(), s.ell()), (3, 2));
        assert_eq!(s.hframe().len(), 2);
        assert_eq!(s.vframe().len(), 1);
        assert_eq!(s.name(), "heisenberg1");
        assert_eq!(doc.location("X2"), Some((8, 3)));
        assert_eq!(doc.location("metric"), Some((11, 1)));
    }

    #[test]
    fn vector_field_ast() {
        let c = names(&["x", "y", "z"]);
        let v = parse_vector_field("dx - (y/2) dz", &c).unwrap();
        let expected = vec![
            Expression::constant(1.0),
            Expression::constant(0.0),
            Expression::Neg(Box::new(Expression::Div(
                Box::new(Expression::coord(1)),
                Box::new(Expression::constant(2.0)),
            ))),
        ];
        assert_eq!(v, expected);
        let w = parse_vector_field("x*dy + 2 * dy - 3 dz", &c).unwrap();
        assert_eq!(w[1], Expression::coord(0) + Expression::constant(2.0));
        assert_eq!(w[2], Expression::constant(-3.0));
    }

    #[test]
    fn precedence_and_powers() {
        let c = names(&["x", "y"]);
        let e = parse_expression("-x^2 + 2^3^2 * y", &c).unwrap();
        assert_eq!(e.eval(&[3.0, 1.0]).unwrap(), -9.0 + 512.0);
        let e = parse_expression("x^(-2) / y - 1", &c).unwrap();
        assert_eq!(e.eval(&[2.0, 0.5]).unwrap(), 0.25 / 0.5 - 1.0);
        let e = parse_expression("sqrt(x) * exp(0) - log(y) + sin(0) + cos(0)", &c).unwrap();
        assert_eq!(e.eval(&[4.0, 1.0]).unwrap(), 3.0);
        assert_eq!(parse_expression("-2", &c).unwrap(), Expression::constant(-2.0));
    }

    #[test]
    fn located_errors() {
        let c = names(&["x", "y"]);
        let err = |t: &str| parse_expression(t, &c).unwrap_err();
        assert!(matches!(err("x + "), Error::Parse { column: 5, .. }));
        assert!(matches!(err("x ^ 1.5"), Error::Parse { column: 5, .. }));
        assert!(matches!(err("q + 1"), Error::Parse { column: 1, .. }));
        assert!(matches!(err("(x"), Error::Parse { column: 3, .. }));
        assert!(matches!(err("x $ y"), Error::Parse { column: 3, .. }));
    }

    #[test]
    fn frame_count_mismatch_names_line() {
        let text = HEISENBERG.replace("  X2 = dy + (x/2) dz\n", "");
        assert!(matches!(parse_manifold(&text), Err(Error::Validation { line: 6, .. })));
    }

    #[test]
    fn metric_rows_and_oneform() {
        let text = "\
manifold m
dim 3
hdim 2
coords x y z
hframe
  A = dx
  B = dy
vframe
  C = dz
metric
  1 + x^2, 0
  0 1
box x -0.5 0.5
";
        let s = parse_manifold(text).unwrap();
        assert_eq!(s.metric()[0][0].eval(&[2.0, 0.0, 0.0]).unwrap(), 5.0);
        assert_eq!(s.metric()[1][1], Expression::constant(1.0));
        assert_eq!(s.sample_box()[0], (-0.5, 0.5));
    }

    #[test]
    fn oneform_separators() {
        let base = HEISENBERG.to_string();
        let s = parse_manifold(&(base.clone() + "oneform 1, -1\n")).unwrap();
        assert_eq!(s.oneform().unwrap(), &[Expression::constant(1.0), Expression::constant(-1.0)]);
        let s = parse_manifold(&(base.clone() + "oneform x y\n")).unwrap();
        assert_eq!(s.oneform().unwrap(), &[Expression::coord(0), Expression::coord(1)]);
        assert!(matches!(
            parse_manifold(&(base + "oneform x -1\n")),
            Err(Error::Validation { line: 12, .. })
        ));
    }

    #[test]
    fn asymmetric_metric_is_rejected() {
        let text = HEISENBERG.replace("metric identity", "metric\n 1 x\n 0 1");
        assert!(matches!(parse_manifold(&text), Err(Error::Validation { line: 13, .. })));
    }
}
