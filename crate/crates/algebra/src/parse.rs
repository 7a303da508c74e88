//! A small infix parser: `(t*x1 - x2)/(x1 - x2)`, `q^-1*a2`, `2/3*z^2`.
//!
//! Unknown identifiers are appended to the registry of the result.

use num_bigint::BigInt;

use crate::error::{AlgebraError, Result};
use crate::laurent::LaurentPoly;
use crate::ratfunc::RationalFunction;
use crate::registry::Registry;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = s.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_digit() {
            let mut t = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_digit() {
                    t.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Num(t.parse().unwrap())));
        } else if c.is_alphabetic() || c == '_' {
            let mut t = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_alphanumeric() || d == '_' {
                    t.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Ident(t)));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            it.next();
        } else {
            return Err(AlgebraError::Parse {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    at: usize,
    reg: Registry,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(AlgebraError::Parse {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.unary()?;
                acc = acc.checked_div(&d).map_err(|_| AlgebraError::Parse {
                    pos,
                    msg: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn int_exponent(&mut self) -> Result<i32> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let v = match self.peek() {
            Some(Tok::Num(n)) => {
                let n: i32 = match n.try_into() {
                    Ok(n) => n,
                    Err(_) => return self.err("exponent too large"),
                };
                self.at += 1;
                n
            }
            _ => return self.err("expected integer exponent"),
        };
        if paren && !self.eat(')') {
            return self.err("expected `)`");
        }
        Ok(if neg { -v } else { v })
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.eat('^') {
            let pos = self.pos();
            let k = self.int_exponent()?;
            return base.pow(k).map_err(|_| AlgebraError::Parse {
                pos,
                msg: "negative power of zero".into(),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(RationalFunction::constant(&self.reg, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                RationalFunction::var(&self.reg, &name)
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            _ => self.err("expected a number, variable or `(`"),
        }
    }
}

/// Parses an expression into a rational function over `reg` plus any new names.
pub fn parse_rational_function(reg: &Registry, s: &str) -> Result<RationalFunction> {
    let toks = tokenize(s)?;
    let names: Vec<String> = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Ident(n) => Some(n.clone()),
            _ => None,
        })
        .collect();
    let reg = reg.union(&Registry::new(&names));
    let mut p = Parser {
        toks: &toks,
        at: 0,
        reg,
        end: s.len(),
    };
    let e = p.expr()?;
    if p.at != toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Like [`parse_rational_function`] but requires a Laurent polynomial result.
pub fn parse_polynomial(reg: &Registry, s: &str) -> Result<LaurentPoly> {
    let f = parse_rational_function(reg, s)?;
    match f.as_polynomial() {
        Some(p) => Ok(p.clone()),
        None => Err(AlgebraError::Parse {
            pos: 0,
            msg: format!("`{s}` is not a Laurent polynomial"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_powers() {
        let reg = Registry::new(&["x"]);
        let a = parse_polynomial(&reg, "2*x^2 - x^-1 + 3").unwrap();
        assert_eq!(a.len(), 3);
        let b = parse_polynomial(&reg, "-(x^(-1)) + 2*x*x + 1 + 2").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn new_names_extend_the_registry() {
        let reg = Registry::new(&["x"]);
        let f = parse_rational_function(&reg, "y/(x - y)").unwrap();
        assert_eq!(f.registry().names(), &["x", "y"]);
    }

    #[test]
    fn errors_carry_positions() {
        let reg = Registry::new::<&str>(&[]);
        match parse_rational_function(&reg, "x + * y") {
            Err(AlgebraError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_rational_function(&reg, "1/(x - x)").is_err());
        assert!(parse_polynomial(&reg, "1/(1 - x)").is_err());
    }
}
