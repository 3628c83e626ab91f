//! Recursive-descent expression parser with precedence climbing.
//!
//! Grammar: integers, declared variables, + - * / ^ with integer exponents,
//! parentheses. `^` binds tighter than unary minus, so `-z^2` is `-(z^2)`.
//! Expressions evaluate directly to normalized field elements; errors carry
//! the byte position and what was expected.

use diffalg::{FieldElement, TowerSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Syntax { position: usize, expected: String },
    UnknownVariable { position: usize, name: String },
    ZeroDenominator { position: usize },
    ExponentTooLarge { position: usize },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "syntax-error",
            ParseError::UnknownVariable { .. } => "unknown-variable",
            ParseError::ZeroDenominator { .. } => "zero-denominator",
            ParseError::ExponentTooLarge { .. } => "exponent-too-large",
        }
    }

    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownVariable { position, .. }
            | ParseError::ZeroDenominator { position }
            | ParseError::ExponentTooLarge { position } => *position,
        }
    }
}

impl std::error::Error for ParseError {}

impl From<ParseError> for String {
    fn from(e: ParseError) -> String {
        format!("{e} (at byte {})", e.position())
    }
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Syntax { position, expected } => {
                write!(f, "syntax error at position {position}: expected {expected}")
            }
            ParseError::UnknownVariable { position, name } => {
                write!(f, "unknown variable `{name}` at position {position}")
            }
            ParseError::ZeroDenominator { position } => {
                write!(f, "division by zero at position {position}")
            }
            ParseError::ExponentTooLarge { position } => {
                write!(f, "exponent out of range at position {position}")
            }
        }
    }
}

pub fn parse_expression(text: &str, tower: &TowerSpec) -> Result<FieldElement, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        tower,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(ParseError::Syntax {
            position: p.pos,
            expected: "end of input".into(),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    tower: &'a TowerSpec,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FieldElement, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.factor()?;
                    acc = acc.mul(&rhs);
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.factor()?;
                    acc = acc
                        .div(&rhs)
                        .map_err(|_| ParseError::ZeroDenominator { position: at })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<FieldElement, ParseError> {
        self.skip_ws();
        if self.eat(b'-') {
            self.skip_ws();
            return Ok(self.factor()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElement, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let negative = self.eat(b'-');
            let e = self.integer()?;
            let e = i64::try_from(e).map_err(|_| ParseError::ExponentTooLarge { position: at })?;
            let e = if negative { -e } else { e };
            return base
                .pow_i(e)
                .map_err(|_| ParseError::ZeroDenominator { position: at });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FieldElement, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(ParseError::Syntax {
                        position: self.pos,
                        expected: "`)`".into(),
                    });
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(FieldElement::from_int(v as i64))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .peek()
                    .map_or(false, |c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                match self.tower.level_of(name) {
                    Some(level) => Ok(FieldElement::var(level)),
                    None => Err(ParseError::UnknownVariable {
                        position: start,
                        name: name.into(),
                    }),
                }
            }
            _ => Err(ParseError::Syntax {
                position: self.pos,
                expected: "integer, variable, `-`, or `(`".into(),
            }),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ParseError::Syntax {
                position: self.pos,
                expected: "integer".into(),
            });
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse::<u64>().map_err(|_| ParseError::ExponentTooLarge {
            position: start,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use diffalg::{Action, RPoly, VarSpec};

    fn tower() -> TowerSpec {
        TowerSpec::new(vec![
            VarSpec {
                name: "t".into(),
                phi: Action::Identity,
                sigma: Action::Identity,
            },
            VarSpec {
                name: "z".into(),
                phi: Action::Shift(RPoly::one()),
                sigma: Action::Shift(RPoly::var(0)),
            },
        ])
        .unwrap()
    }

    #[test]
    fn parses_basic_rational_function() {
        let t = tower();
        let f = parse_expression("z/(z-1)", &t).unwrap();
        let z = FieldElement::var(1);
        let expect = z.div(&z.sub(&FieldElement::one())).unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        let t = tower();
        let f = parse_expression("-z^2", &t).unwrap();
        let z = FieldElement::var(1);
        assert_eq!(f, z.mul(&z).neg());
        let g = parse_expression("z^-1", &t).unwrap();
        assert_eq!(g, FieldElement::one().div(&z).unwrap());
    }

    #[test]
    fn unknown_variable_with_position() {
        let t = tower();
        let err = parse_expression("z/(w-1)", &t).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownVariable {
                position: 3,
                name: "w".into()
            }
        );
    }

    #[test]
    fn syntax_error_carries_position() {
        let t = tower();
        let err = parse_expression("z + ", &t).unwrap_err();
        assert_eq!(err.code(), "syntax-error");
        assert_eq!(err.position(), 4);
        let err = parse_expression("(z+1", &t).unwrap_err();
        assert_eq!(err.code(), "syntax-error");
    }

    #[test]
    fn zero_denominator_detected() {
        let t = tower();
        let err = parse_expression("1/(z-z)", &t).unwrap_err();
        assert_eq!(err.code(), "zero-denominator");
    }

    #[test]
    fn renders_round_trip() {
        let t = tower();
        let exprs = [
            "z/(z - 1)",
            "z^2 - t*z",
            "(2*z + 1)/(z^2 + z)",
            "-1/2*z + 3",
        ];
        for e in exprs {
            let f = parse_expression(e, &t).unwrap();
            let printed = f.render(&t);
            let g = parse_expression(&printed, &t).unwrap();
            assert_eq!(f, g, "round trip through `{printed}`");
        }
    }
}
