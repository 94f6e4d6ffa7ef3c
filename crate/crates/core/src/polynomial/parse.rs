//! Text form of polynomials: `3*x1^2*x3 - x2 + 7`.
//!
//! Variables are `x1..xn`, coefficients are integers (optionally `a/b` for
//! rational coefficient domains), whitespace is ignored. The printer emits
//! terms in descending graded lexicographic order and its output parses back
//! to the same polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{Exponents, SparsePoly};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected `{found}` at offset {offset}")]
    Unexpected { found: String, offset: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("variable x{index} outside x1..x{nvars}")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("coefficient {0} does not fit the scalar domain")]
    CoefficientOverflow(String),
    #[error("{0} is not an element of the scalar domain")]
    InexactCoefficient(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

struct Cursor {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor {
            chars: src
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn unexpected(&self) -> ParseError {
        match self.chars.get(self.pos) {
            Some(&(offset, c)) => ParseError::Unexpected {
                found: c.to_string(),
                offset,
            },
            None => ParseError::UnexpectedEnd,
        }
    }

    fn digits(&mut self) -> Result<String, ParseError> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        if s.is_empty() {
            return Err(self.unexpected());
        }
        Ok(s)
    }
}

fn scalar<T: Scalar>(n: &BigInt) -> Result<T, ParseError> {
    T::from_integer(n).ok_or_else(|| ParseError::CoefficientOverflow(n.to_string()))
}

/// Parses the text form into a polynomial in `nvars` variables.
pub fn parse_poly<T: Scalar>(text: &str, nvars: usize) -> Result<SparsePoly<T>, ParseError> {
    let mut cur = Cursor::new(text);
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let negative = match cur.peek() {
            Some('+') => {
                cur.bump();
                false
            }
            Some('-') => {
                cur.bump();
                true
            }
            None if !first => break,
            _ if first => false,
            _ => return Err(cur.unexpected()),
        };
        first = false;
        let (e, mut c) = term::<T>(&mut cur, nvars)?;
        if negative {
            c = -c;
        }
        terms.push((e, c));
    }
    Ok(SparsePoly::from_terms(nvars, terms).expect("exponent vectors sized to nvars"))
}

fn term<T: Scalar>(cur: &mut Cursor, nvars: usize) -> Result<(Exponents, T), ParseError> {
    let mut exps = vec![0u32; nvars];
    let mut coeff = T::one();
    loop {
        match cur.peek() {
            Some('x') => {
                cur.bump();
                let index: usize = cur.digits()?.parse().map_err(|_| cur.unexpected())?;
                if index == 0 || index > nvars {
                    return Err(ParseError::VariableOutOfRange { index, nvars });
                }
                let power = if cur.peek() == Some('^') {
                    cur.bump();
                    cur.digits()?.parse().map_err(|_| cur.unexpected())?
                } else {
                    1
                };
                exps[index - 1] += power;
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = cur.digits()?.parse().expect("digits");
                let mut value = scalar::<T>(&num)?;
                if cur.peek() == Some('/') {
                    cur.bump();
                    let den_text = cur.digits()?;
                    let den: BigInt = den_text.parse().expect("digits");
                    if den.is_zero() {
                        return Err(ParseError::ZeroDenominator);
                    }
                    let den = scalar::<T>(&den)?;
                    let quotient = value.clone() / den.clone();
                    if quotient.clone() * den != value {
                        return Err(ParseError::InexactCoefficient(format!("{num}/{den_text}")));
                    }
                    value = quotient;
                }
                coeff *= value;
            }
            _ => return Err(cur.unexpected()),
        }
        if cur.peek() == Some('*') {
            cur.bump();
        } else {
            return Ok((Exponents::new(exps), coeff));
        }
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, e: &Exponents) -> fmt::Result {
    let mut sep = "";
    for (i, &p) in e.as_slice().iter().enumerate() {
        match p {
            0 => continue,
            1 => write!(f, "{sep}x{}", i + 1)?,
            _ => write!(f, "{sep}x{}^{p}", i + 1)?,
        }
        sep = "*";
    }
    Ok(())
}

impl<T: Scalar> fmt::Display for SparsePoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms().rev().enumerate() {
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if e.degree() == 0 {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write_monomial(f, e)?;
            } else {
                write!(f, "{a}*")?;
                write_monomial(f, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    #[test]
    fn parses_spec_example() {
        let p: SparsePoly<i64> = parse_poly("3*x1^2*x3 - x2 + 7", 3).unwrap();
        assert_eq!(p.coefficient_of(&Exponents::new(vec![2, 0, 1])).unwrap(), 3);
        assert_eq!(
            p.coefficient_of(&Exponents::new(vec![0, 1, 0])).unwrap(),
            -1
        );
        assert_eq!(p.coefficient_of(&Exponents::new(vec![0, 0, 0])).unwrap(), 7);
        assert_eq!(p.to_string(), "3*x1^2*x3 - x2 + 7");
        let q: SparsePoly<i64> = parse_poly(" 3 * x1 ^2*x3-x2+ 7 ", 3).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn edge_forms() {
        let p: SparsePoly<i64> = parse_poly("-x1*x1 + 2*3 + x1^2", 1).unwrap();
        assert_eq!(p.to_string(), "6");
        let z: SparsePoly<i64> = parse_poly("x1 - x1", 1).unwrap();
        assert_eq!(z.to_string(), "0");
        assert_eq!(parse_poly::<i64>("0", 2).unwrap(), SparsePoly::zero(2));
        let r: SparsePoly<BigRational> = parse_poly("1/2*x1 - 3/4", 1).unwrap();
        assert_eq!(r.to_string(), "1/2*x1 - 3/4");
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_poly::<i64>("x3", 2),
            Err(ParseError::VariableOutOfRange { index: 3, .. })
        ));
        assert!(matches!(
            parse_poly::<i64>("x0", 2),
            Err(ParseError::VariableOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            parse_poly::<i64>("x1 +", 2),
            Err(ParseError::UnexpectedEnd)
        ));
        assert!(matches!(
            parse_poly::<i64>("x1 ++ x2", 2),
            Err(ParseError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_poly::<i64>("y1", 2),
            Err(ParseError::Unexpected { .. })
        ));
        assert!(matches!(
            parse_poly::<i64>("", 2),
            Err(ParseError::UnexpectedEnd)
        ));
        assert!(matches!(
            parse_poly::<i64>("99999999999999999999", 1),
            Err(ParseError::CoefficientOverflow(_))
        ));
        assert!(matches!(
            parse_poly::<BigRational>("1/0", 1),
            Err(ParseError::ZeroDenominator)
        ));
        assert!(matches!(
            parse_poly::<i64>("1/2*x1", 1),
            Err(ParseError::InexactCoefficient(_))
        ));
        assert_eq!(
            parse_poly::<i64>("6/2*x1", 1).unwrap(),
            parse_poly("3*x1", 1).unwrap()
        );
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(ts in prop::collection::vec((prop::collection::vec(0u32..4, 3), -9i64..10), 0..8)) {
            let p = SparsePoly::from_terms(3, ts.into_iter().map(|(e, c)| (Exponents::new(e), BigInt::from(c)))).unwrap();
            let back: SparsePoly<BigInt> = parse_poly(&p.to_string(), 3).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
