//! Text form of sequence expressions:
//!
//! ```text
//! expr    := atom | "ser(" expr "," expr ")" | "par(" expr "," expr ")" | "rev(" expr ")"
//! atom    := "atom(" re "," im [";" outcome ("," outcome)*] [";rev"] ")"
//! outcome := time ":" label ("|" label)*
//! ```
//!
//! `Display` writes the same grammar, with floats in shortest round-trip
//! form, so `parse(e.to_string()) == e`.

use std::fmt;
use std::str::FromStr;

use super::{c, AtomicSequence, Outcome, SequenceExpr};
use crate::error::{Error, Result};

impl fmt::Display for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceExpr::Atom(a) => {
                write!(f, "atom({},{}", a.amplitude.re, a.amplitude.im)?;
                if let Some(outcomes) = &a.outcomes {
                    f.write_str(";")?;
                    for (k, o) in outcomes.iter().enumerate() {
                        if k > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{o}")?;
                    }
                }
                if a.reversible {
                    f.write_str(";rev")?;
                }
                f.write_str(")")
            }
            SequenceExpr::Series(a, b) => write!(f, "ser({a},{b})"),
            SequenceExpr::Parallel(a, b) => write!(f, "par({a},{b})"),
            SequenceExpr::Reverse(x) => write!(f, "rev({x})"),
        }
    }
}

impl FromStr for SequenceExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::parse(format!("column {}", self.pos + 1), msg)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {token:?}")))
        }
    }

    fn expr(&mut self) -> Result<SequenceExpr> {
        if self.eat("atom(") {
            self.atom()
        } else if self.eat("ser(") {
            let (a, b) = self.pair()?;
            Ok(SequenceExpr::series(a, b))
        } else if self.eat("par(") {
            let (a, b) = self.pair()?;
            Ok(SequenceExpr::parallel(a, b))
        } else if self.eat("rev(") {
            let x = self.expr()?;
            self.expect(")")?;
            Ok(SequenceExpr::reverse(x))
        } else {
            Err(self.error("expected atom(, ser(, par( or rev("))
        }
    }

    fn pair(&mut self) -> Result<(SequenceExpr, SequenceExpr)> {
        let a = self.expr()?;
        self.expect(",")?;
        let b = self.expr()?;
        self.expect(")")?;
        Ok((a, b))
    }

    fn token(&mut self, stop: &[char]) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|ch: char| stop.contains(&ch) || ch.is_whitespace())
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn number<T: FromStr>(&mut self, stop: &[char], what: &str) -> Result<T> {
        let start = self.pos;
        let tok = self.token(stop).to_owned();
        tok.parse().map_err(|_| {
            self.pos = start;
            self.error(&format!("invalid {what} {tok:?}"))
        })
    }

    fn atom(&mut self) -> Result<SequenceExpr> {
        let re: f64 = self.number(&[','], "real part")?;
        self.expect(",")?;
        let im: f64 = self.number(&[';', ')'], "imaginary part")?;
        let mut outcomes = None;
        let mut reversible = false;
        while self.eat(";") {
            if self.eat("rev") {
                reversible = true;
                continue;
            }
            if outcomes.is_some() {
                return Err(self.error("outcome list given twice"));
            }
            let mut list = vec![self.outcome()?];
            while self.eat(",") {
                list.push(self.outcome()?);
            }
            outcomes = Some(list);
        }
        self.expect(")")?;
        let amplitude = c(re, im);
        let atom = match outcomes {
            Some(list) => AtomicSequence::new(list, amplitude),
            None => AtomicSequence::unrecorded(amplitude),
        };
        Ok(atom.reversible(reversible).into())
    }

    fn outcome(&mut self) -> Result<Outcome> {
        let time: u32 = self.number(&[':'], "time")?;
        self.expect(":")?;
        let mut labels = vec![self.number::<u32>(&['|', ',', ';', ')'], "label")?];
        while self.eat("|") {
            labels.push(self.number(&['|', ',', ';', ')'], "label")?);
        }
        Ok(Outcome::coarse(time, labels))
    }
}
