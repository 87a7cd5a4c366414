//! Text format for forms: `3*x0^2*x1 - x2^3`.
//!
//! A term is an optional sign, an optional coefficient and `*`-separated
//! factors `x<i>` or `x<i>^<e>`. The `*` between the coefficient and the
//! first factor may be omitted (`3x0`). Whitespace is ignored everywhere.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{Form, FormError};

/// Parses `text` as a homogeneous form in `nvars` variables.
pub fn parse_form(text: &str, nvars: usize) -> Result<Form, FormError> {
    let terms = Parser::new(text).terms()?;
    let mut out = Vec::with_capacity(terms.len());
    for (coef, factors) in terms {
        let mut exps = vec![0u32; nvars];
        for (var, e) in factors {
            if var >= nvars {
                return Err(FormError::VariableOutOfRange { index: var, nvars });
            }
            exps[var] += e;
        }
        out.push((exps, coef));
    }
    Form::new(nvars, out)
}

/// Smallest variable count covering every `x<i>` in `text`, but at least
/// `min_vars`.
pub fn infer_nvars(text: &str, min_vars: usize) -> Result<usize, FormError> {
    let terms = Parser::new(text).terms()?;
    let max = terms
        .iter()
        .flat_map(|(_, fs)| fs.iter().map(|(v, _)| v + 1))
        .max()
        .unwrap_or(0);
    Ok(max.max(min_vars))
}

type RawTerm = (BigInt, Vec<(usize, u32)>);

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { bytes: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormError> {
        Err(FormError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.bytes[start..self.pos]).unwrap())
    }

    fn terms(&mut self) -> Result<Vec<RawTerm>, FormError> {
        let mut out = Vec::new();
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let mut first = true;
        while let Some(c) = self.peek() {
            let negative = match c {
                b'+' => {
                    self.pos += 1;
                    false
                }
                b'-' => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => return self.err(format!("expected '+' or '-', found '{}'", c as char)),
            };
            first = false;
            let (mut coef, factors) = self.term()?;
            if negative {
                coef = -coef;
            }
            out.push((coef, factors));
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<RawTerm, FormError> {
        let mut coef = BigInt::one();
        let mut factors = Vec::new();
        if let Some(ds) = self.digits() {
            coef = ds.parse().expect("ascii digits");
            match self.peek() {
                Some(b'*') => self.pos += 1,
                Some(b'x') => {}
                _ => return Ok((coef, factors)),
            }
        }
        loop {
            factors.push(self.factor()?);
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((coef, factors))
    }

    fn factor(&mut self) -> Result<(usize, u32), FormError> {
        match self.peek() {
            Some(b'x') => self.pos += 1,
            Some(c) => return self.err(format!("expected variable, found '{}'", c as char)),
            None => return self.err("expected variable, found end of input"),
        }
        let Some(idx) = self.digits() else {
            return self.err("expected variable index after 'x'");
        };
        let var: usize = idx.parse().map_err(|_| FormError::Syntax {
            pos: self.pos,
            msg: "variable index too large".into(),
        })?;
        let mut e = 1u32;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let Some(ds) = self.digits() else {
                return self.err("expected exponent after '^'");
            };
            e = ds.parse().map_err(|_| FormError::Syntax {
                pos: self.pos,
                msg: "exponent too large".into(),
            })?;
        }
        Ok((var, e))
    }
}

impl fmt::Display for Form {
    /// Terms in descending right-to-left lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}
