use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Base field of every space, vector and map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u32),
}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        if !(2..1 << 31).contains(&p) || !is_prime(p) {
            return Err(Error::Input(format!("{p} is not a prime below 2^31")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rat(Rat::Small(Ratio::from_integer(n))),
            Field::Prime(p) => Scalar::Mod(n.rem_euclid(p as i64) as u32, p),
        }
    }

    pub fn sign(self, odd: bool) -> Scalar {
        self.from_i64(if odd { -1 } else { 1 })
    }

    /// Parses "p/q" (lowest terms, q > 0) or an integer; residues must be canonical in F_p.
    pub fn parse_scalar(self, s: &str) -> Result<Scalar> {
        let bad = || Error::Input(format!("invalid scalar {s:?} for field {self}"));
        match self {
            Field::Rational => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (
                        BigInt::from_str(a.trim()).map_err(|_| bad())?,
                        BigInt::from_str(b.trim()).map_err(|_| bad())?,
                    ),
                    None => (BigInt::from_str(s.trim()).map_err(|_| bad())?, BigInt::one()),
                };
                if !den.is_positive() || !num.gcd(&den).is_one() {
                    return Err(Error::Input(format!(
                        "rational {s:?} is not in lowest terms with positive denominator"
                    )));
                }
                Ok(Scalar::Rat(Rat::from_big(BigRational::new_raw(num, den))))
            }
            Field::Prime(p) => {
                let v: u64 = s.trim().parse().map_err(|_| bad())?;
                if v >= p as u64 {
                    return Err(Error::Input(format!("residue {s:?} is not reduced mod {p}")));
                }
                Ok(Scalar::Mod(v as u32, p))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        match s {
            "Q" => Ok(Field::Rational),
            _ => match s.strip_prefix("Fp:") {
                Some(p) => Field::prime(
                    p.parse().map_err(|_| Error::Input(format!("bad field spec {s:?}")))?,
                ),
                None => Err(Error::Input(format!("bad field spec {s:?}"))),
            },
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Rational number with a machine-word fast path.
#[derive(Clone, Debug)]
pub enum Rat {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl Rat {
    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::Small(Ratio::new_raw(n, d)),
            _ => Rat::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Rat::Big(r) => r.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Rat::Small(r) => r.is_zero(),
            Rat::Big(r) => r.is_zero(),
        }
    }

    fn add(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a), Rat::Small(b)) = (self, o) {
            if let Some(c) = a.checked_add(b) {
                return Rat::Small(c);
            }
        }
        Rat::from_big(self.to_big() + o.to_big())
    }

    fn sub(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a), Rat::Small(b)) = (self, o) {
            if let Some(c) = a.checked_sub(b) {
                return Rat::Small(c);
            }
        }
        Rat::from_big(self.to_big() - o.to_big())
    }

    fn mul(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a), Rat::Small(b)) = (self, o) {
            if let Some(c) = a.checked_mul(b) {
                return Rat::Small(c);
            }
        }
        Rat::from_big(self.to_big() * o.to_big())
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(r) if *r.numer() != i64::MIN => Rat::Small(-*r),
            _ => Rat::from_big(-self.to_big()),
        }
    }

    fn inv(&self) -> Rat {
        match self {
            Rat::Small(r) if *r.numer() != i64::MIN => Rat::Small(r.recip()),
            _ => Rat::from_big(self.to_big().recip()),
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, o: &Rat) -> bool {
        match (self, o) {
            (Rat::Small(a), Rat::Small(b)) => a == b,
            _ => self.to_big() == o.to_big(),
        }
    }
}

impl Eq for Rat {}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = match self {
            Rat::Small(r) => (BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Rat::Big(r) => (r.numer().clone(), r.denom().clone()),
        };
        if d.is_one() {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

/// Exact field element. Residues carry their modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rat(Rat),
    Mod(u32, u32),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rational,
            Scalar::Mod(_, p) => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field().one()
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.add(b)),
            (Scalar::Mod(a, p), Scalar::Mod(b, q)) if p == q => {
                Scalar::Mod(((*a as u64 + *b as u64) % *p as u64) as u32, *p)
            }
            _ => mismatch(self, o),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.sub(b)),
            (Scalar::Mod(a, p), Scalar::Mod(b, q)) if p == q => {
                Scalar::Mod(((*a as u64 + *p as u64 - *b as u64) % *p as u64) as u32, *p)
            }
            _ => mismatch(self, o),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.mul(b)),
            (Scalar::Mod(a, p), Scalar::Mod(b, q)) if p == q => {
                Scalar::Mod(((*a as u64 * *b as u64) % *p as u64) as u32, *p)
            }
            _ => mismatch(self, o),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.neg()),
            Scalar::Mod(a, p) => Scalar::Mod((*p - *a) % *p, *p),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.inv()),
            Scalar::Mod(a, p) => Scalar::Mod(pow_mod(*a as u64, *p as u64 - 2, *p as u64) as u32, *p),
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self.mul(&o.inv())
    }

    /// Negates when `odd`.
    pub fn signed(&self, odd: bool) -> Scalar {
        if odd {
            self.neg()
        } else {
            self.clone()
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("field mismatch: {} vs {}", a.field(), b.field())
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Mod(v, _) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip_and_lowest_terms() {
        let q = Field::Rational;
        assert_eq!(q.parse_scalar("1/2").unwrap().to_string(), "1/2");
        assert_eq!(q.parse_scalar("-3").unwrap().to_string(), "-3");
        assert!(q.parse_scalar("2/4").is_err());
        assert!(q.parse_scalar("1/-2").is_err());
    }

    #[test]
    fn small_path_overflows_into_big() {
        let q = Field::Rational;
        let big = q.from_i64(i64::MAX);
        let sq = big.mul(&big);
        assert!(matches!(sq, Scalar::Rat(Rat::Big(_))));
        assert_eq!(sq.div(&big), big);
        assert!(matches!(sq.div(&big), Scalar::Rat(Rat::Small(_))));
        let m = q.from_i64(i64::MIN);
        assert_eq!(m.neg().add(&m), q.zero());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(101).unwrap();
        let a = f.from_i64(-3);
        assert_eq!(a, Scalar::Mod(98, 101));
        assert!(a.mul(&a.inv()).is_one());
        assert!(Field::prime(100).is_err());
        assert!(f.parse_scalar("101").is_err());
    }

    #[test]
    fn field_specs_parse() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rational);
        assert_eq!("Fp:7".parse::<Field>().unwrap(), Field::Prime(7));
        assert!("Fp:9".parse::<Field>().is_err());
    }
}
