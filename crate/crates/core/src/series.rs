//! Truncated multivariate Puiseux series over `Q(zeta_M)`.
//!
//! A monomial `prod v_i^{e_i}` is stored by its scaled exponents
//! `e_i * d_i` where `d_i` is the exponent denominator of variable `i`. A
//! monomial is kept iff its weight `sum w_i |e_i|` is at most the order `T`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactring::{int, CycloField, CycloNumber, Rational};
use crate::lattice::{rat_det, RatMatrix};

/// Variables, exponent denominators, weights and truncation order of a series ring.
#[derive(Debug, Clone)]
pub struct SeriesSpace {
    names: Vec<String>,
    denoms: Vec<u32>,
    weights: Vec<Rational>,
    laurent: Vec<bool>,
    order: Rational,
    field: Arc<CycloField>,
}

impl PartialEq for SeriesSpace {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.denoms == other.denoms
            && self.weights == other.weights
            && self.laurent == other.laurent
            && self.order == other.order
            && self.field.order() == other.field.order()
    }
}

pub struct VarSpec {
    pub name: String,
    pub denom: u32,
    pub weight: Rational,
    pub laurent: bool,
}

impl VarSpec {
    pub fn new(name: impl Into<String>, weight: Rational) -> VarSpec {
        VarSpec {
            name: name.into(),
            denom: 1,
            weight,
            laurent: false,
        }
    }

    pub fn denom(mut self, d: u32) -> VarSpec {
        self.denom = d;
        self
    }

    pub fn laurent(mut self, yes: bool) -> VarSpec {
        self.laurent = yes;
        self
    }
}

impl SeriesSpace {
    pub fn new(vars: Vec<VarSpec>, order: Rational, field: &Arc<CycloField>) -> Result<Arc<SeriesSpace>> {
        if vars.iter().any(|v| !v.weight.is_positive() || v.denom == 0) {
            return Err(Error::Series("weights and denominators must be positive".into()));
        }
        Ok(Arc::new(SeriesSpace {
            names: vars.iter().map(|v| v.name.clone()).collect(),
            denoms: vars.iter().map(|v| v.denom).collect(),
            weights: vars.iter().map(|v| v.weight.clone()).collect(),
            laurent: vars.iter().map(|v| v.laurent).collect(),
            order,
            field: field.clone(),
        }))
    }

    /// Same variables over `k` unit-weight, integer-exponent power series variables.
    pub fn uniform(names: &[String], order: Rational, field: &Arc<CycloField>) -> Result<Arc<SeriesSpace>> {
        Self::new(
            names.iter().map(|n| VarSpec::new(n.clone(), int(1))).collect(),
            order,
            field,
        )
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn denoms(&self) -> &[u32] {
        &self.denoms
    }

    pub fn order(&self) -> &Rational {
        &self.order
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn weight(&self, key: &[i64]) -> Rational {
        key.iter()
            .enumerate()
            .map(|(i, k)| &self.weights[i] * int(k.abs()) / int(self.denoms[i] as i64))
            .sum()
    }

    pub fn exponents(&self, key: &[i64]) -> Vec<Rational> {
        key.iter()
            .enumerate()
            .map(|(i, k)| Rational::new((*k).into(), (self.denoms[i] as i64).into()))
            .collect()
    }

    pub fn key_of(&self, exps: &[Rational]) -> Result<Vec<i64>> {
        if exps.len() != self.nvars() {
            return Err(Error::Series("exponent vector has the wrong length".into()));
        }
        exps.iter()
            .enumerate()
            .map(|(i, e)| {
                let scaled = e * int(self.denoms[i] as i64);
                if !scaled.is_integer() {
                    return Err(Error::Denominator {
                        var: self.names[i].clone(),
                        exponent: e.to_string(),
                        denom: self.denoms[i],
                    });
                }
                let k = scaled.to_integer().to_i64().ok_or_else(|| Error::Series("exponent overflow".into()))?;
                if k < 0 && !self.laurent[i] {
                    return Err(Error::Series(format!(
                        "negative exponent {e} of {} in a power series variable",
                        self.names[i]
                    )));
                }
                Ok(k)
            })
            .collect()
    }
}

/// A truncated series; immutable in use, cheap to clone.
#[derive(Clone)]
pub struct Series {
    space: Arc<SeriesSpace>,
    terms: BTreeMap<Vec<i64>, CycloNumber>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        *self.space == *other.space && self.terms == other.terms
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Series {
    pub fn zero(space: &Arc<SeriesSpace>) -> Series {
        Series {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &Arc<SeriesSpace>, c: CycloNumber) -> Series {
        let mut s = Series::zero(space);
        s.add_term(vec![0; space.nvars()], c);
        s
    }

    pub fn one(space: &Arc<SeriesSpace>) -> Series {
        Self::constant(space, CycloNumber::one(&space.field))
    }

    pub fn monomial(space: &Arc<SeriesSpace>, exps: &[Rational], c: CycloNumber) -> Result<Series> {
        let key = space.key_of(exps)?;
        let mut s = Series::zero(space);
        s.add_term(key, c);
        Ok(s)
    }

    /// The variable `i` itself.
    pub fn var(space: &Arc<SeriesSpace>, i: usize) -> Series {
        let mut key = vec![0; space.nvars()];
        key[i] = space.denoms[i] as i64;
        let mut s = Series::zero(space);
        s.add_term(key, CycloNumber::one(&space.field));
        s
    }

    pub fn space(&self) -> &Arc<SeriesSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * monomial(key)` unless it is zero or above the truncation order.
    pub fn add_term(&mut self, key: Vec<i64>, c: CycloNumber) {
        if c.is_zero() || self.space.weight(&key) > self.space.order {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_monomial(&mut self, exps: &[Rational], c: CycloNumber) -> Result<()> {
        let key = self.space.key_of(exps)?;
        self.add_term(key, c);
        Ok(())
    }

    /// Terms in lexicographic order of scaled exponents.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &CycloNumber)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[Rational]) -> CycloNumber {
        match self.space.key_of(exps) {
            Ok(k) => self
                .terms
                .get(&k)
                .cloned()
                .unwrap_or_else(|| CycloNumber::zero(&self.space.field)),
            Err(_) => CycloNumber::zero(&self.space.field),
        }
    }

    pub fn constant_term(&self) -> CycloNumber {
        self.terms
            .get(&vec![0; self.space.nvars()])
            .cloned()
            .unwrap_or_else(|| CycloNumber::zero(&self.space.field))
    }

    fn check(&self, other: &Series) -> Result<()> {
        if *self.space != *other.space {
            return Err(Error::Series("operands live in different series rings".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        Series {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &CycloNumber) -> Series {
        let mut out = Series::zero(&self.space);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Series {
        let mut out = Series::zero(&self.space);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x.scale(r));
        }
        out
    }

    fn by_weight(&self) -> Vec<(Rational, &Vec<i64>, &CycloNumber)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (self.space.weight(k), k, c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    fn has_negative_exponent(&self) -> bool {
        self.terms.keys().any(|k| k.iter().any(|e| *e < 0))
    }

    /// Truncated product. Refused for series with negative exponents, where
    /// truncation does not commute with multiplication.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        if self.has_negative_exponent() || other.has_negative_exponent() {
            return Err(Error::Series("truncated products of Laurent series are not exact".into()));
        }
        let order = &self.space.order;
        let a = self.by_weight();
        let b = other.by_weight();
        let mut acc: BTreeMap<Vec<i64>, CycloNumber> = BTreeMap::new();
        for (wa, ka, ca) in &a {
            for (wb, kb, cb) in &b {
                if wa + wb > *order {
                    break;
                }
                let key: Vec<i64> = ka.iter().zip(kb.iter()).map(|(x, y)| x + y).collect();
                let prod = *ca * *cb;
                match acc.get_mut(&key) {
                    Some(e) => *e = &*e + &prod,
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Series {
            space: self.space.clone(),
            terms: acc,
        })
    }

    pub fn exp(&self) -> Result<Series> {
        if !self.constant_term().is_zero() {
            return Err(Error::Series("exp needs a series without constant term".into()));
        }
        let mut result = Series::one(&self.space);
        let mut term = Series::one(&self.space);
        for n in 1.. {
            term = term.mul(self)?.scale_rational(&Rational::new(1.into(), (n as i64).into()));
            if term.is_zero() {
                break;
            }
            result = result.add(&term)?;
        }
        Ok(result)
    }

    pub fn log(&self) -> Result<Series> {
        if self.constant_term() != CycloNumber::one(&self.space.field) {
            return Err(Error::Series("log needs a series with constant term 1".into()));
        }
        let g = self.sub(&Series::one(&self.space))?;
        let mut result = Series::zero(&self.space);
        let mut power = Series::one(&self.space);
        for n in 1i64.. {
            power = power.mul(&g)?;
            if power.is_zero() {
                break;
            }
            let sign = if n % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale_rational(&Rational::new(sign.into(), n.into())))?;
        }
        Ok(result)
    }

    /// Multiplicative inverse of a series with invertible constant term.
    pub fn inverse(&self) -> Result<Series> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::Series("series has no inverse: constant term is 0".into()));
        }
        let cinv = c.inverse()?;
        let g = Series::one(&self.space).sub(&self.scale(&cinv))?;
        let mut result = Series::one(&self.space);
        let mut power = Series::one(&self.space);
        loop {
            power = power.mul(&g)?;
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result.scale(&cinv))
    }

    /// Rewrites every coefficient; `f` receives the rational exponents.
    pub fn map_coefficients<F>(&self, mut f: F) -> Result<Series>
    where
        F: FnMut(&[Rational], &CycloNumber) -> Result<CycloNumber>,
    {
        let mut out = Series::zero(&self.space);
        for (k, c) in &self.terms {
            let e = self.space.exponents(k);
            out.add_term(k.clone(), f(&e, c)?);
        }
        Ok(out)
    }

    /// Sends source variable `i` to the monomial `prod_j t_j^{images[i][j]}` of
    /// the target ring, term by term.
    pub fn substitute_monomial(&self, target: &Arc<SeriesSpace>, images: &RatMatrix) -> Result<Series> {
        if images.len() != self.space.nvars() || images.iter().any(|r| r.len() != target.nvars()) {
            return Err(Error::Series("substitution matrix has the wrong shape".into()));
        }
        if images.len() == target.nvars() && rat_det(images).is_zero() {
            return Err(Error::Series("substitution matrix is singular".into()));
        }
        if images.len() != target.nvars() {
            return Err(Error::Series("substitution must be square and invertible".into()));
        }
        let mut out = Series::zero(target);
        for (k, c) in &self.terms {
            let e = self.space.exponents(k);
            let te: Vec<Rational> = (0..target.nvars())
                .map(|j| e.iter().zip(images).map(|(ei, row)| ei * &row[j]).sum())
                .collect();
            let key = target.key_of(&te)?;
            out.add_term(key, c.clone());
        }
        Ok(out)
    }

    /// `int f dq0/q0` with `q0 = v^{s1}` for the variable `v = var`: each
    /// `v^d` picks up the factor `s1/d`.
    pub fn integrate_dlog(&self, var: usize, s1: u64) -> Result<Series> {
        let mut out = Series::zero(&self.space);
        for (k, c) in &self.terms {
            if k[var] == 0 {
                return Err(Error::Series(format!(
                    "term of degree 0 in {} cannot be integrated against dq0/q0",
                    self.space.names[var]
                )));
            }
            let d = Rational::new(k[var].into(), (self.space.denoms[var] as i64).into());
            out.add_term(k.clone(), c.scale(&(int(s1 as i64) / d)));
        }
        Ok(out)
    }

    /// Splits into the terms of degree 0 in `var` and the rest.
    pub fn split_degree_zero(&self, var: usize) -> (Series, Series) {
        let mut zero = Series::zero(&self.space);
        let mut rest = Series::zero(&self.space);
        for (k, c) in &self.terms {
            if k[var] == 0 {
                zero.add_term(k.clone(), c.clone());
            } else {
                rest.add_term(k.clone(), c.clone());
            }
        }
        (zero, rest)
    }

    /// Retruncates into another space with the same variables.
    pub fn retruncate(&self, target: &Arc<SeriesSpace>) -> Result<Series> {
        if target.names != self.space.names || target.denoms != self.space.denoms {
            return Err(Error::Series("retruncation needs the same variables".into()));
        }
        let mut out = Series::zero(target);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, e) in self.space.exponents(k).iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                if e.is_one() {
                    write!(f, "*{}", self.space.names[i])?;
                } else {
                    write!(f, "*{}^{}", self.space.names[i], e)?;
                }
            }
        }
        Ok(())
    }
}

/// Solves `H(u) = 0` for a series `u` without constant term by the iteration
/// `u <- u - H(u)/H'(u)`. `eval(u)` returns `(H(u), H'(u))`. Stops when the
/// residual vanishes to the truncation order.
pub fn newton_solve<F>(space: &Arc<SeriesSpace>, mut eval: F) -> Result<Series>
where
    F: FnMut(&Series) -> Result<(Series, Series)>,
{
    const MAX_STEPS: usize = 64;
    let mut u = Series::zero(space);
    let (h0, dh0) = eval(&u)?;
    if !h0.constant_term().is_zero() {
        return Err(Error::Series("H(0, 0) is not zero".into()));
    }
    if dh0.constant_term().is_zero() {
        return Err(Error::Series("singular linearization: dH/du(0, 0) = 0".into()));
    }
    for _ in 0..MAX_STEPS {
        let (h, dh) = eval(&u)?;
        if h.is_zero() {
            return Ok(u);
        }
        u = u.sub(&h.mul(&dh.inverse()?)?)?;
    }
    Err(Error::NoConvergence(MAX_STEPS))
}
