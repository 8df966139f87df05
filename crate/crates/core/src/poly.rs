//! Polynomials in `q` with arbitrary-precision integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `Σ c_i q^i`, trailing zeros trimmed (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<BigInt>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![BigInt::one()])
    }

    /// `c · q^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c.into();
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut v: Vec<BigInt>) -> Self {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        Poly(v)
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        Poly::from_coeffs(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.0.iter().sum()
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.0.iter().cloned());
        Poly(v)
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        Poly::from_coeffs(self.0.iter().map(|a| a * c).collect())
    }

    /// Terms of degree strictly below `k`.
    pub fn truncate_below(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.0.iter().take(k).cloned().collect())
    }

    /// `q^d · P(1/q)`; requires `deg P ≤ d`.
    pub fn reflect(&self, d: usize) -> Poly {
        let mut v = vec![BigInt::zero(); d + 1];
        for (i, c) in self.0.iter().enumerate() {
            assert!(i <= d, "reflect: degree exceeds {d}");
            v[d - i] = c.clone();
        }
        Poly::from_coeffs(v)
    }

    pub fn to_i64s(&self) -> Vec<i64> {
        self.0.iter().map(|c| i64::try_from(c).expect("coefficient exceeds i64")).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{a}*q")?,
                (_, true) => write!(f, "q^{i}")?,
                (_, false) => write!(f, "{a}*q^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse polynomial term {0:?}")]
pub struct ParsePolyError(pub String);

impl FromStr for Poly {
    type Err = ParsePolyError;

    /// Parses the text form produced by `Display`, e.g. `1+2*q-q^3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParsePolyError(s));
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut acc = Poly::zero();
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let bad = || ParsePolyError(t.clone());
            let (coef, deg) = if let Some(pos) = body.find('q') {
                let c = match &body[..pos] {
                    "" => BigInt::one(),
                    pre => pre.strip_suffix('*').ok_or_else(bad)?.parse().map_err(|_| bad())?,
                };
                let d = match &body[pos + 1..] {
                    "" => 1,
                    rest => rest.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?,
                };
                (c, d)
            } else {
                (body.parse::<BigInt>().map_err(|_| bad())?, 0)
            };
            let term = Poly::monomial(if neg { -coef } else { coef }, deg);
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, o: Poly) -> Poly {
        &self + &o
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_forms() {
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(Poly::one().to_string(), "1");
        assert_eq!(Poly::from_i64s(&[1, 1]).to_string(), "1+q");
        assert_eq!(Poly::from_i64s(&[1, 0, 1]).to_string(), "1+q^2");
        assert_eq!(Poly::from_i64s(&[0, -2, 3]).to_string(), "-2*q+3*q^2");
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Poly::from_i64s(&[1, 0, 0]);
        assert_eq!(p.degree(), Some(0));
        assert!(Poly::from_i64s(&[0, 0]).is_zero());
    }

    #[test]
    fn reflect_is_q_power_times_bar() {
        let p = Poly::from_i64s(&[1, 2]);
        assert_eq!(p.reflect(3), Poly::from_i64s(&[0, 0, 2, 1]));
    }

    #[test]
    fn rejects_garbage() {
        assert!("1+x".parse::<Poly>().is_err());
        assert!("".parse::<Poly>().is_err());
    }

    proptest! {
        #[test]
        fn text_form_round_trips(c in proptest::collection::vec(-5i64..6, 0..6)) {
            let p = Poly::from_i64s(&c);
            let back: Poly = p.to_string().parse().unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn multiplication_evaluates_at_one(a in proptest::collection::vec(-4i64..5, 0..5),
                                           b in proptest::collection::vec(-4i64..5, 0..5)) {
            let (pa, pb) = (Poly::from_i64s(&a), Poly::from_i64s(&b));
            prop_assert_eq!((&pa * &pb).eval_at_one(), pa.eval_at_one() * pb.eval_at_one());
        }
    }
}
