//! Plain-text tableau files.
//!
//! ```text
//! # ETDRK4
//! name = ETDRK4
//! order = 4
//! stages = 4
//! steps = 1
//! c = 0 1/2 1/2 1
//! A[2][1] = sum
//! A[3][1] = sum
//! A[3][2] = 1/2*phi1(1/2*z)
//! A[4][1] = sum
//! A[4][3] = phi1(1/2*z)
//! B[1] = sum
//! B[2] = 2*phi2(z) - 4*phi3(z)
//! B[3] = 2*phi2(z) - 4*phi3(z)
//! B[4] = -phi2(z) + 4*phi3(z)
//! ```
//!
//! Indices are 1-based. `U[i][j]` multiplies `N(u^{n-j})` in stage `i`,
//! `V[j]` multiplies it in the update. Coefficients are sums of terms
//! `c*phi<l>(a*z)`, `c*exp(a*z)` or bare rationals `c`; numbers may be
//! integers, fractions `p/q` or finite decimals. `sum` marks `B[1]` or
//! `A[i][1]` for filling from the summation properties. `summation = false`
//! declares a scheme (such as a Lawson method) that does not satisfy them.
//! Omitted entries are zero.

use std::path::Path;

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{complete_summation, Family, Tableau};
use crate::error::{Error, Result};
use crate::phifun::{PhiExpr, PhiTerm};

pub fn load_tableau_file(path: impl AsRef<Path>) -> Result<Tableau> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tableau(&text, &path.display().to_string())
}

struct Ctx<'a> {
    source: &'a str,
    line: usize,
}

impl Ctx<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            source_name: self.source.to_string(),
            line: self.line,
            column,
            message: message.into(),
        }
    }
}

enum Entry {
    Sum,
    Expr(PhiExpr),
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    order: Option<u32>,
    stages: Option<usize>,
    steps: Option<usize>,
    summation: Option<bool>,
    c: Option<Vec<Rational64>>,
}

enum Slot {
    A(usize, usize),
    B(usize),
    U(usize, usize),
    V(usize),
}

pub fn parse_tableau(text: &str, source_name: &str) -> Result<Tableau> {
    let mut header = Header::default();
    let mut entries: Vec<(usize, usize, Slot, Entry)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let ctx = Ctx {
            source: source_name,
            line: lineno + 1,
        };
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let eq = line
            .find('=')
            .ok_or_else(|| ctx.err(1, "expected `key = value`"))?;
        let key = line[..eq].trim();
        let key_col = line.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let value = &line[eq + 1..];
        let val_col = eq + 2 + (value.len() - value.trim_start().len());
        let value = value.trim();
        match key {
            "name" => header.name = Some(value.to_string()),
            "order" => header.order = Some(parse_int(&ctx, value, val_col)? as u32),
            "stages" => header.stages = Some(parse_int(&ctx, value, val_col)?),
            "steps" => header.steps = Some(parse_int(&ctx, value, val_col)?),
            "summation" => {
                header.summation = Some(match value {
                    "true" | "yes" => true,
                    "false" | "no" => false,
                    _ => return Err(ctx.err(val_col, format!("expected true/false, got `{value}`"))),
                })
            }
            "c" => {
                let mut c = Vec::new();
                let mut col = val_col;
                for tok in value.split_whitespace() {
                    let off = value[col - val_col..].find(tok).unwrap_or(0);
                    col += off;
                    c.push(parse_number(&ctx, tok, col)?);
                    col += tok.len();
                }
                header.c = Some(c);
            }
            _ => {
                let slot = parse_slot(&ctx, key, key_col)?;
                let entry = if value == "sum" {
                    Entry::Sum
                } else {
                    Entry::Expr(Parser::new(&ctx, value, val_col).expr()?)
                };
                entries.push((lineno + 1, key_col, slot, entry));
            }
        }
    }

    let ctx = Ctx {
        source: source_name,
        line: text.lines().count().max(1),
    };
    let missing = |what: &str| ctx.err(1, format!("missing `{what}`"));
    let name = header.name.ok_or_else(|| missing("name"))?;
    let order = header.order.ok_or_else(|| missing("order"))?;
    let s = header.stages.ok_or_else(|| missing("stages"))?;
    let q = header.steps.ok_or_else(|| missing("steps"))?;
    if s == 0 || q == 0 {
        return Err(Error::Dimension(format!("{name}: stages and steps must be positive")));
    }
    let mut t = Tableau::empty(&name, Family::External, order, s, q);
    if let Some(c) = header.c {
        if c.len() != s {
            return Err(Error::Dimension(format!(
                "{name}: c has {} entries, expected {s}",
                c.len()
            )));
        }
        t.c = c;
    }
    t.satisfies_summation = header.summation.unwrap_or(true);

    let mut wants_sum = false;
    for (line, col, slot, entry) in entries {
        let ctx = Ctx {
            source: source_name,
            line,
        };
        let dim = |m: String| Error::Dimension(format!("{name}:{line}: {m}"));
        let target = match slot {
            Slot::A(i, j) => {
                if i > s || j >= i {
                    return Err(dim(format!("A[{i}][{j}] is outside the strictly lower triangle of a {s}-stage tableau")));
                }
                &mut t.a[i - 1][j - 1]
            }
            Slot::B(i) => {
                if i > s {
                    return Err(dim(format!("B[{i}] exceeds {s} stages")));
                }
                &mut t.b[i - 1]
            }
            Slot::U(i, j) => {
                if i > s || j >= q {
                    return Err(dim(format!("U[{i}][{j}] outside {s}x{}", q - 1)));
                }
                &mut t.u[i - 1][j - 1]
            }
            Slot::V(j) => {
                if j >= q {
                    return Err(dim(format!("V[{j}] exceeds {} history slots", q - 1)));
                }
                &mut t.v[j - 1]
            }
        };
        match entry {
            Entry::Sum => {
                let first_col = matches!(slot, Slot::B(1) | Slot::A(_, 1));
                if !first_col {
                    return Err(ctx.err(col, "`sum` is only valid for B[1] and A[i][1]"));
                }
                wants_sum = true;
                *target = None;
            }
            Entry::Expr(e) => *target = Some(e),
        }
    }
    t.validate()?;
    if wants_sum {
        t = complete_summation(&t)?;
    } else {
        t.summation_filled = true;
    }
    Ok(t)
}

fn parse_int(ctx: &Ctx, s: &str, col: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| ctx.err(col, format!("expected a nonnegative integer, got `{s}`")))
}

fn parse_slot(ctx: &Ctx, key: &str, col: usize) -> Result<Slot> {
    let bad = || ctx.err(col, format!("unknown key `{key}`"));
    let (head, rest) = key.split_at(1);
    let mut idx = Vec::new();
    let mut rest = rest.trim();
    while let Some(r) = rest.strip_prefix('[') {
        let close = r.find(']').ok_or_else(bad)?;
        let n: usize = r[..close].trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(ctx.err(col, format!("indices are 1-based in `{key}`")));
        }
        idx.push(n);
        rest = r[close + 1..].trim();
    }
    if !rest.is_empty() {
        return Err(bad());
    }
    match (head, idx.as_slice()) {
        ("A", &[i, j]) => Ok(Slot::A(i, j)),
        ("B", &[i]) => Ok(Slot::B(i)),
        ("U", &[i, j]) => Ok(Slot::U(i, j)),
        ("V", &[j]) => Ok(Slot::V(j)),
        _ => Err(bad()),
    }
}

fn parse_number(ctx: &Ctx, tok: &str, col: usize) -> Result<Rational64> {
    let bad = || ctx.err(col, format!("bad number `{tok}`"));
    if let Some((n, d)) = tok.split_once('/') {
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(ctx.err(col, "zero denominator"));
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((ip, fp)) = tok.split_once('.') {
        if fp.len() > 15 || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip: i64 = if ip.is_empty() || ip == "-" { 0 } else { ip.parse().map_err(|_| bad())? };
        let den = 10i64.pow(fp.len() as u32);
        let frac: i64 = if fp.is_empty() { 0 } else { fp.parse().map_err(|_| bad())? };
        let mag = Rational64::new(ip.abs() * den + frac, den);
        return Ok(if neg { -mag } else { mag });
    }
    tok.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
}

/// Recursive-descent reader for one coefficient expression.
struct Parser<'a, 'c> {
    ctx: &'c Ctx<'a>,
    s: &'c str,
    pos: usize,
    base: usize,
}

impl<'a, 'c> Parser<'a, 'c> {
    fn new(ctx: &'c Ctx<'a>, s: &'c str, base: usize) -> Self {
        Parser { ctx, s, pos: 0, base }
    }

    fn col(&self) -> usize {
        self.base + self.pos
    }

    fn err(&self, m: impl Into<String>) -> Error {
        self.ctx.err(self.col(), m)
    }

    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(' ') || self.s[self.pos..].starts_with('\t') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> Result<Rational64> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.s[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/'))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a number"));
        }
        self.pos += len;
        parse_number(self.ctx, &rest[..len], self.base + start)
    }

    fn expr(&mut self) -> Result<PhiExpr> {
        let mut terms = Vec::new();
        let mut sign = Rational64::one();
        if self.eat('-') {
            sign = -sign;
        } else {
            self.eat('+');
        }
        loop {
            let t = self.term()?;
            terms.push(PhiTerm { coeff: t.coeff * sign, ..t });
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('+') => {
                    self.pos += 1;
                    sign = Rational64::one();
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -Rational64::one();
                }
                Some(c) => return Err(self.err(format!("unexpected `{c}`"))),
            }
        }
        Ok(PhiExpr::from_terms(terms))
    }

    fn term(&mut self) -> Result<PhiTerm> {
        self.skip_ws();
        let coeff = if self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            let c = self.number()?;
            if !self.eat('*') {
                return Ok(PhiTerm::new(c, 0, Rational64::zero()));
            }
            c
        } else {
            Rational64::one()
        };
        self.skip_ws();
        let start = self.pos;
        let ident_len = self.s[start..]
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .unwrap_or(self.s.len() - start);
        let ident = &self.s[start..start + ident_len];
        let index = if ident == "exp" {
            0
        } else if let Some(l) = ident.strip_prefix("phi").filter(|l| !l.is_empty()) {
            l.parse::<u32>()
                .map_err(|_| self.err(format!("bad phi index in `{ident}`")))?
        } else if ident.is_empty() {
            return Err(self.err("expected a term"));
        } else {
            return Err(self.err(format!("unknown function `{ident}`")));
        };
        self.pos += ident_len;
        self.expect('(')?;
        self.skip_ws();
        let mut scale = Rational64::one();
        let neg = self.eat('-');
        self.skip_ws();
        if self.peek() != Some('z') {
            scale = self.number()?;
            self.expect('*')?;
        }
        if neg {
            scale = -scale;
        }
        self.expect('z')?;
        self.expect(')')?;
        if scale.is_zero() {
            return Err(self.ctx.err(self.col(), "zero argument scale; write the constant instead"));
        }
        Ok(PhiTerm::new(coeff, index, scale))
    }
}
