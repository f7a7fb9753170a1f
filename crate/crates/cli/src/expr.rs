//! Arithmetic expressions for parameters: `2-sqrt(3)`, `sqrt(3)/3`, `1/3`,
//! `1+5/3*i`, `2i`.
//!
//! Grammar (usual precedence, `^` right-associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' unary)?
//! atom  := number ['i'] | 'i' | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```

use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().find(|c| !c.is_whitespace())
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn error(&self, what: &str) -> anyhow::Error {
        anyhow!("{what} at position {} in \"{}\"", self.pos + 1, self.src)
    }

    fn expr(&mut self) -> Result<Complex64> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<Complex64> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.norm() == 0.0 {
                    return Err(self.error("division by zero"));
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Complex64> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0 {
                return Ok(base.powi(e.re as i32));
            }
            return Ok(base.powc(e));
        }
        Ok(base)
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .chars()
            .take_while(|c| c.is_ascii_alphabetic())
            .map(char::len_utf8)
            .sum();
        self.pos += len;
        rest[..len].to_string()
    }

    fn atom(&mut self) -> Result<Complex64> {
        match self.peek() {
            Some('(') => {
                self.eat('(');
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let x = self.number()?;
                // `2i` is an imaginary literal.
                let save = self.pos;
                if self.ident() == "i" {
                    Ok(Complex64::new(0.0, x))
                } else {
                    self.pos = save;
                    Ok(Complex64::new(x, 0.0))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => match self.ident().as_str() {
                "i" => Ok(Complex64::new(0.0, 1.0)),
                "pi" => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
                "sqrt" => {
                    if !self.eat('(') {
                        return Err(self.error("expected '(' after sqrt"));
                    }
                    let v = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.error("expected ')'"));
                    }
                    Ok(match (v.im == 0.0, v.re >= 0.0) {
                        (true, true) => Complex64::new(v.re.sqrt(), 0.0),
                        (true, false) => Complex64::new(0.0, (-v.re).sqrt()),
                        _ => v.sqrt(),
                    })
                }
                other => Err(self.error(&format!("unknown name '{other}'"))),
            },
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let bytes = rest.as_bytes();
        let mut end = 0;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &rest[..end];
        let v = text
            .parse::<f64>()
            .map_err(|_| self.error(&format!("bad number '{text}'")))?;
        self.pos += end;
        Ok(v)
    }
}

/// Evaluates a complex expression.
pub fn eval(src: &str) -> Result<Complex64> {
    let mut p = Parser { src, pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("trailing input"));
    }
    if !v.re.is_finite() || !v.im.is_finite() {
        bail!("\"{src}\" does not evaluate to a finite number");
    }
    Ok(v)
}

/// Evaluates an expression that must be real.
pub fn eval_real(src: &str) -> Result<f64> {
    let v = eval(src)?;
    if v.im != 0.0 {
        bail!("\"{src}\" is not real");
    }
    Ok(v.re)
}

/// Comma-separated list of expressions.
pub fn eval_list(src: &str) -> Result<Vec<Complex64>> {
    src.split(',').map(|part| eval(part.trim())).collect()
}
