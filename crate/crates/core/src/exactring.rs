//! Exact coefficients: big rationals, the cyclotomic field `Q(zeta_M)`,
//! phases `(-1)^r = exp(i pi r)` and the Pochhammer symbol.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn ceil_i64(x: &Rational) -> i64 {
    x.ceil().to_integer().to_i64().expect("ceiling fits in i64")
}

pub fn floor_i64(x: &Rational) -> i64 {
    x.floor().to_integer().to_i64().expect("floor fits in i64")
}

pub fn to_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        a.max(b)
    } else {
        a.lcm(&b)
    }
}

pub fn denom_u64(x: &Rational) -> u64 {
    x.denom().to_u64().expect("denominator fits in u64")
}

/// Parses `"p"`, `"p/q"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// `(a)_n`: `a(a-1)...(a-n+1)` for `n > 0`, `1` for `n = 0`, and
/// `1/((a+1)(a+2)...(a-n))` for `n < 0`.
pub fn pochhammer(a: &Rational, n: i64) -> Result<Rational> {
    match n.cmp(&0) {
        std::cmp::Ordering::Equal => Ok(Rational::one()),
        std::cmp::Ordering::Greater => {
            let mut acc = Rational::one();
            for j in 0..n {
                acc *= a - int(j);
            }
            Ok(acc)
        }
        std::cmp::Ordering::Less => {
            let mut den = Rational::one();
            for j in 1..=(-n) {
                den *= a + int(j);
            }
            if den.is_zero() {
                return Err(Error::Pole {
                    a: a.to_string(),
                    n,
                });
            }
            Ok(den.recip())
        }
    }
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coef = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &coef * bi;
        }
        q[shift] = coef;
        r.pop();
        trim(&mut r);
    }
    (q, r)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

/// Integer coefficients of the n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut p: Vec<Rational> = vec![Rational::zero(); n as usize + 1];
    p[0] = int(-1);
    p[n as usize] = int(1);
    for d in 1..n {
        if n.is_multiple_of(d) {
            let phi_d: Vec<Rational> = cyclotomic_polynomial(d)
                .into_iter()
                .map(BigRational::from_integer)
                .collect();
            let (q, r) = poly_divrem(&p, &phi_d);
            debug_assert!(r.is_empty());
            p = q;
        }
    }
    p.into_iter().map(|c| c.to_integer()).collect()
}

/// The field `Q(zeta_M) = Q[x]/(Phi_M(x))`, `x -> exp(2 pi i / M)`.
#[derive(Debug)]
pub struct CycloField {
    m: u32,
    phi: Vec<Rational>,
    powers: Vec<Vec<Rational>>,
}

impl CycloField {
    /// `m` must be even so that `-1` is a power of `zeta_M`.
    pub fn new(m: u32) -> Result<Arc<CycloField>> {
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::Order {
                needed: "even order".into(),
                m,
            });
        }
        let phi: Vec<Rational> = cyclotomic_polynomial(m)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let deg = phi.len() - 1;
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![Rational::zero(); deg];
        cur[0] = Rational::one();
        for _ in 0..m {
            powers.push(cur.clone());
            // multiply by x and reduce the x^deg term with the monic Phi_M
            let top = cur[deg - 1].clone();
            for i in (1..deg).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = Rational::zero();
            if !top.is_zero() {
                for i in 0..deg {
                    cur[i] -= &top * &phi[i];
                }
            }
        }
        Ok(Arc::new(CycloField { m, phi, powers }))
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }
}

/// Element of `Q(zeta_M)` in the power basis `1, zeta, ..., zeta^(phi(M)-1)`.
#[derive(Clone)]
pub struct CycloNumber {
    field: Arc<CycloField>,
    c: Vec<Rational>,
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.m == other.field.m && self.c == other.c
    }
}

impl Eq for CycloNumber {}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl CycloNumber {
    pub fn zero(field: &Arc<CycloField>) -> Self {
        CycloNumber {
            field: field.clone(),
            c: vec![Rational::zero(); field.degree()],
        }
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    pub fn from_rational(field: &Arc<CycloField>, r: Rational) -> Self {
        let mut z = Self::zero(field);
        z.c[0] = r;
        z
    }

    /// `zeta_M^j`.
    pub fn zeta_power(field: &Arc<CycloField>, j: i64) -> Self {
        let m = field.m as i64;
        CycloNumber {
            field: field.clone(),
            c: field.powers[j.rem_euclid(m) as usize].clone(),
        }
    }

    /// `zeta_n^j`; `n` must divide `M`.
    pub fn root_of_unity(field: &Arc<CycloField>, n: u32, j: i64) -> Result<Self> {
        if n == 0 || !field.m.is_multiple_of(n) {
            return Err(Error::Order {
                needed: n.to_string(),
                m: field.m,
            });
        }
        Ok(Self::zeta_power(field, j * (field.m / n) as i64))
    }

    /// `(-1)^r := exp(i pi r)`.
    pub fn phase(field: &Arc<CycloField>, r: &Rational) -> Result<Self> {
        let t = r * int(field.m as i64) / int(2);
        match to_i64(&t) {
            Some(j) => Ok(Self::zeta_power(field, j)),
            None => Err(Error::Order {
                needed: format!("2*{}", r.denom()),
                m: field.m,
            }),
        }
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.c.iter().skip(1).all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycloNumber {
            field: self.field.clone(),
            c: self.c.iter().map(|x| x * r).collect(),
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.field.m, other.field.m,
            "cyclotomic operands of different order"
        );
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // extended Euclid: s*a + t*phi = g with g a nonzero constant
        let mut a = self.c.clone();
        trim(&mut a);
        let (mut r0, mut r1) = (self.field.phi.clone(), a);
        let (mut s0, mut s1) = (Vec::<Rational>::new(), vec![Rational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r1.is_empty() {
            return Err(Error::Internal("non-invertible cyclotomic element".into()));
        }
        let g = r1[0].clone();
        let inv: Vec<Rational> = s1.iter().map(|x| x / &g).collect();
        Ok(self.reduce(&inv))
    }

    fn reduce(&self, p: &[Rational]) -> Self {
        let deg = self.field.degree();
        let m = self.field.m as usize;
        let mut c = vec![Rational::zero(); deg];
        for (j, x) in p.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if j < deg {
                c[j] += x;
            } else {
                for (i, y) in self.field.powers[j % m].iter().enumerate() {
                    if !y.is_zero() {
                        c[i] += x * y;
                    }
                }
            }
        }
        CycloNumber {
            field: self.field.clone(),
            c,
        }
    }

    /// Writes the element as `r * zeta_M^j` with `r` rational and `0 <= j < M/2`, if possible.
    pub fn as_rational_root(&self) -> Option<(Rational, u32)> {
        if self.is_zero() {
            return Some((Rational::zero(), 0));
        }
        for j in 0..self.field.m / 2 {
            let z = self * &Self::zeta_power(&self.field, -(j as i64));
            if let Some(r) = z.as_rational() {
                return Some((r, j));
            }
        }
        None
    }

    /// Value under the embedding `zeta -> exp(2 pi i / M)`, in double precision.
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.field.m as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, x) in self.c.iter().enumerate() {
            let v = x.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * j as f64 / m;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational_root() {
            Some((r, 0)) => write!(f, "{r}"),
            Some((r, j)) => write!(f, "{r}*z{}^{j}", self.field.m),
            None => {
                let parts: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]_{}", parts.join(", "), self.field.m)
            }
        }
    }
}

impl Add for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        self.check(rhs);
        CycloNumber {
            field: self.field.clone(),
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        self.check(rhs);
        CycloNumber {
            field: self.field.clone(),
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            field: self.field.clone(),
            c: self.c.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        self.check(rhs);
        if let Some(r) = rhs.as_rational() {
            return self.scale(&r);
        }
        if let Some(r) = self.as_rational() {
            return rhs.scale(&r);
        }
        let deg = self.field.degree();
        let mut p = vec![Rational::zero(); 2 * deg - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.c.iter().enumerate() {
                if !y.is_zero() {
                    p[i + j] += x * y;
                }
            }
        }
        self.reduce(&p)
    }
}

/// Sign of a rational that must be an integer: `(-1)^e`.
pub fn sign_of_integer(e: &Rational) -> Result<i64> {
    let n = to_i64(e).ok_or_else(|| Error::Internal(format!("sign exponent {e} is not an integer")))?;
    Ok(if n.rem_euclid(2) == 0 { 1 } else { -1 })
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}
