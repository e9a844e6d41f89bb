//! Parser for constant complex points given on the command line, e.g.
//! `0.6+0.3i` or `0.85*exp(i*pi/7)`. This is deliberately separate from
//! the boundary-function language: point-valued flags get `pi` and `exp`,
//! boundary functions stay Laurent-rational.

use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;

struct P<'a> {
    bytes: &'a [u8],
    pos: usize,
}

pub fn parse_point(text: &str) -> Result<Complex64> {
    let mut p = P {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        bail!("trailing input at byte {} of `{text}`", p.pos);
    }
    Ok(v)
}

impl<'a> P<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Complex64> {
        let mut v = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    v += self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<Complex64> {
        let mut v = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    v *= self.factor()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    if d.norm() < 1e-300 {
                        bail!("division by zero in point expression");
                    }
                    v /= d;
                }
                _ => return Ok(v),
            }
        }
    }

    fn factor(&mut self) -> Result<Complex64> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Complex64> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                bail!("expected an integer exponent at byte {start}");
            }
            let k: i32 = std::str::from_utf8(&self.bytes[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|e| anyhow!("bad exponent: {e}"))?;
            return Ok(base.powi(if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Complex64> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    bail!("expected `)` at byte {}", self.pos);
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                match name {
                    "i" => Ok(Complex64::new(0.0, 1.0)),
                    "pi" => Ok(Complex64::new(std::f64::consts::PI, 0.0)),
                    "exp" => {
                        if self.peek() != Some(b'(') {
                            bail!("expected `(` after exp");
                        }
                        self.pos += 1;
                        let v = self.expr()?;
                        if self.peek() != Some(b')') {
                            bail!("expected `)` at byte {}", self.pos);
                        }
                        self.pos += 1;
                        Ok(v.exp())
                    }
                    _ => bail!("unknown name `{name}` in point expression"),
                }
            }
            Some(c) => bail!("unexpected character `{}` at byte {}", c as char, self.pos),
            None => bail!("unexpected end of point expression"),
        }
    }

    fn number(&mut self) -> Result<Complex64> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && (self.bytes[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.bytes.len() && (self.bytes[probe] == b'+' || self.bytes[probe] == b'-')
            {
                probe += 1;
            }
            if probe < self.bytes.len() && self.bytes[probe].is_ascii_digit() {
                while probe < self.bytes.len() && self.bytes[probe].is_ascii_digit() {
                    probe += 1;
                }
                self.pos = probe;
            }
        }
        let v: f64 = std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| anyhow!("bad number at byte {start}"))?;
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'i' {
            self.pos += 1;
            return Ok(Complex64::new(0.0, v));
        }
        Ok(Complex64::new(v, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_and_polar_form() {
        assert_eq!(parse_point("0.6+0.3i").unwrap(), Complex64::new(0.6, 0.3));
        let v = parse_point("0.85*exp(i*pi/7)").unwrap();
        let angle = std::f64::consts::PI / 7.0;
        assert!((v - 0.85 * Complex64::new(angle.cos(), angle.sin())).norm() < 1e-15);
        assert_eq!(parse_point("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert!((parse_point("2^-1").unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_point("0.6+").is_err());
        assert!(parse_point("foo(1)").is_err());
        assert!(parse_point("1 2").is_err());
    }
}
