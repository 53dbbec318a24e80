//! The A-side: extended charge data of a framed brane, the extended effective
//! cone, disk factors, closed-form amplitudes, character weights and the
//! assembled disk potential, plus the `A_i(q)` series of the mirror map.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactring::{
    ceil_i64, denom_u64, factorial, floor_i64, frac, int, lcm_u64, pochhammer, sign_of_integer,
    to_i64, CycloField, CycloNumber, Rational,
};
use crate::lattice::{
    box_elements, character_order, charge_matrix, compositions, flag_data, BoxElement,
    ChargeMatrix, ConeChart, FlagData, IntMatrix, StackyFan,
};
use crate::series::{Series, SeriesSpace, VarSpec};

/// Framing of a brane: one integer for an outer brane, `(f+, f-)` for an inner one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Framing {
    Outer(i64),
    Inner { plus: i64, minus: i64 },
}

/// Data of the second cone `sigma_-` adjacent to an inner brane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerData {
    pub cone_idx: usize,
    pub i4: usize,
    pub s1_minus: u64,
    /// `<D_i, alpha>` for every `i`.
    pub alpha: Vec<Rational>,
    pub a2: Rational,
    pub a3: Rational,
}

/// `(k+1) x (r+2)` extended charge matrix; row 0 is the framing row and the
/// last two columns are phantom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtendedChargeMatrix {
    pub rows: IntMatrix,
}

impl ExtendedChargeMatrix {
    /// `<D_i, beta~>` for `beta~ = (beta_0, beta_1..beta_k)`.
    pub fn pair(&self, i: usize, beta_tilde: &[Rational]) -> Rational {
        self.rows
            .iter()
            .zip(beta_tilde)
            .map(|(row, b)| int(row[i]) * b)
            .sum()
    }
}

pub fn extended_charge_matrix(
    fan: &StackyFan,
    charge: &ChargeMatrix,
    flag: &FlagData,
    f: i64,
) -> Result<ExtendedChargeMatrix> {
    let r = fan.r();
    let [i1, i2, i3] = flag.order;
    let mut framing = vec![0i64; r + 2];
    framing[i1] = 1;
    framing[i2] = f;
    framing[i3] = -f - 1;
    framing[r] = 1;
    framing[r + 1] = -1;
    let mut rows = vec![framing];
    for row in &charge.rows {
        let mut padded = row.clone();
        padded.extend([0, 0]);
        rows.push(padded);
    }
    if let Some(a) = rows.iter().position(|row| row.iter().sum::<i64>() != 0) {
        return Err(Error::InvalidFan(format!(
            "extended charge row {a} does not sum to zero"
        )));
    }
    Ok(ExtendedChargeMatrix { rows })
}

/// A fan with a framed brane, the cone chart of `sigma` and the coefficient field.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub fan: StackyFan,
    pub charge: ChargeMatrix,
    pub flag: FlagData,
    pub chart: ConeChart,
    pub framing: Framing,
    pub inner: Option<InnerData>,
    pub extended: ExtendedChargeMatrix,
    pub field: Arc<CycloField>,
}

impl Geometry {
    /// `order` is the 0-based flag `(i1, i2, i3)`; `framing` is `[f]` or `[f+, f-]`.
    pub fn new(fan: StackyFan, order: [usize; 3], framing: &[i64], m_cap: u32) -> Result<Geometry> {
        let charge = charge_matrix(&fan)?;
        let flag = flag_data(&fan, order)?;
        let chart = ConeChart::new(&fan, &charge, flag.cone_idx)?;
        let framing = match (flag.opposite, framing) {
            (None, [f]) => Framing::Outer(*f),
            (Some(_), [p, m]) => Framing::Inner { plus: *p, minus: *m },
            (None, _) => {
                return Err(Error::InvalidBrane(format!(
                    "an outer brane takes one framing integer, got {}",
                    framing.len()
                )))
            }
            (Some(_), _) => {
                return Err(Error::InvalidBrane(format!(
                    "an inner brane takes two framing integers (f+, f-), got {}",
                    framing.len()
                )))
            }
        };
        let inner = match (flag.opposite, framing) {
            (Some((cone_idx, i4)), Framing::Inner { plus, minus }) => Some(inner_data(
                &fan, &flag, &chart, cone_idx, i4, plus, minus,
            )?),
            _ => None,
        };
        let f = match framing {
            Framing::Outer(f) => f,
            Framing::Inner { plus, .. } => plus,
        };
        let extended = extended_charge_matrix(&fan, &charge, &flag, f)?;
        let m = field_order(&chart, flag.s1);
        if m > m_cap as u64 {
            return Err(Error::OrderCap {
                m: m.min(u32::MAX as u64) as u32,
                cap: m_cap,
            });
        }
        let field = CycloField::new(m as u32)?;
        Ok(Geometry {
            fan,
            charge,
            flag,
            chart,
            framing,
            inner,
            extended,
            field,
        })
    }

    /// The framing entering the amplitudes (`f+` for inner branes).
    pub fn f(&self) -> i64 {
        match self.framing {
            Framing::Outer(f) => f,
            Framing::Inner { plus, .. } => plus,
        }
    }

    pub fn s1(&self) -> u64 {
        self.flag.s1
    }

    pub fn k(&self) -> usize {
        self.chart.k()
    }

    pub fn is_outer(&self) -> bool {
        self.inner.is_none()
    }

    /// `I_tau = {i1} + I_sigma`.
    pub fn i_tau(&self) -> Vec<usize> {
        let mut v = vec![self.flag.i1()];
        v.extend(self.chart.anticone.iter().copied());
        v
    }

    /// `max(0, max_a <D_{i1}, e^a>)`: how far the source degree can exceed the target weight.
    pub fn overshoot(&self) -> Rational {
        self.chart.pairing[self.flag.i1()]
            .iter()
            .cloned()
            .fold(Rational::zero(), |acc, x| if x > acc { x } else { acc })
    }

    /// Ring of `x, q_1..q_k` with weights `1/s1, 1, .., 1`; Laurent in `x` for inner branes.
    pub fn xq_space(&self, t: &Rational) -> Result<Arc<SeriesSpace>> {
        xq_space(self.s1(), self.k(), !self.is_outer(), t, &self.field)
    }

    /// Ring of `q_1..q_k` with unit weights.
    pub fn q_space(&self, t: &Rational) -> Result<Arc<SeriesSpace>> {
        SeriesSpace::uniform(&q_names(self.k()), t.clone(), &self.field)
    }
}

pub fn xq_space(
    s1: u64,
    k: usize,
    laurent: bool,
    t: &Rational,
    field: &Arc<CycloField>,
) -> Result<Arc<SeriesSpace>> {
    let mut vars = vec![VarSpec::new("x", Rational::new(1.into(), (s1 as i64).into())).laurent(laurent)];
    vars.extend(q_names(k).into_iter().map(|n| VarSpec::new(n, int(1))));
    SeriesSpace::new(vars, t.clone(), field)
}

pub fn q_names(k: usize) -> Vec<String> {
    (1..=k).map(|a| format!("q{a}")).collect()
}

/// `2 * lcm(s1, denominators of <D_i, e^a> and of all c_i(v))`.
fn field_order(chart: &ConeChart, s1: u64) -> u64 {
    let mut l = s1;
    for row in &chart.pairing {
        for x in row {
            l = lcm_u64(l, denom_u64(x));
        }
    }
    for b in &chart.boxes {
        for c in &b.c {
            l = lcm_u64(l, denom_u64(c));
        }
    }
    2 * l
}

fn inner_data(
    fan: &StackyFan,
    flag: &FlagData,
    chart: &ConeChart,
    cone_idx: usize,
    i4: usize,
    f_plus: i64,
    f_minus: i64,
) -> Result<InnerData> {
    let boxes = box_elements(fan, cone_idx)?;
    let s1_minus = character_order(&boxes, i4);
    let a = chart
        .anticone_position(i4)
        .ok_or_else(|| Error::Internal("i4 is not outside sigma_+".into()))?;
    let sm = int(s1_minus as i64);
    let sp = int(flag.s1 as i64);
    let alpha: Vec<Rational> = chart.pairing.iter().map(|row| &row[a] / &sm).collect();
    let [i1, i2, i3] = flag.order;
    if alpha[i1] != sp.recip() {
        return Err(Error::InvalidBrane(format!(
            "<D_i1, alpha> = {} differs from 1/s1+ = 1/{}",
            alpha[i1], flag.s1
        )));
    }
    let (fp, fm) = (int(f_plus), int(f_minus));
    let a2 = alpha[i2].clone();
    let a3 = alpha[i3].clone();
    let want2 = &fp / &sp - (&fm + int(1)) / &sm;
    let want3 = &fm / &sm - (&fp + int(1)) / &sp;
    if a2 != want2 || a3 != want3 {
        let fm_needed = &sm * (&fp / &sp - &a2) - int(1);
        return Err(Error::InvalidBrane(format!(
            "framing ({f_plus}, {f_minus}) is inconsistent with deg L2 = {a2}, deg L3 = {a3}; \
             with f+ = {f_plus} the fan requires f- = {fm_needed}"
        )));
    }
    Ok(InnerData {
        cone_idx,
        i4,
        s1_minus,
        alpha,
        a2,
        a3,
    })
}

/// An element `beta~ = (d0, beta)` of the extended effective cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedDegree {
    pub d0: i64,
    /// `(<D_{i1}, beta~>, n_1, .., n_k)`, the exponent of `tq~`.
    pub ntilde: Vec<u64>,
    /// `beta` in `L_Q` coordinates.
    pub beta: Vec<Rational>,
    /// `<D_i, beta>` for every `i`.
    pub closed: Vec<Rational>,
    /// `<D_i, beta~>` for every `i` (phantom columns excluded).
    pub pairings: Vec<Rational>,
    /// Index of `v(beta)` in `Box(sigma)`.
    pub sector: usize,
    /// `|d0|/s1 + sum n_a`.
    pub weight: Rational,
}

impl ExtendedDegree {
    /// Exponents of `x, q_1..q_k` in `q^beta~`.
    pub fn exponents(&self) -> Vec<Rational> {
        let mut e = vec![int(self.d0)];
        e.extend(self.ntilde[1..].iter().map(|n| int(*n as i64)));
        e
    }
}

/// All `beta~` with `d0 != 0`, `<D_i, beta~>` in `Z_{>=0}` for `i` in `I_tau`,
/// and weight at most `t`.
pub fn enumerate_extended(geo: &Geometry, t: &Rational) -> Result<Vec<ExtendedDegree>> {
    if !t.is_positive() {
        return Ok(vec![]);
    }
    let s1 = int(geo.s1() as i64);
    let i1 = geo.flag.i1();
    let bound = ((int(1) + geo.overshoot()) * t).floor();
    let max = to_i64(&bound).unwrap_or(0).max(0) as u64;
    let mut out = Vec::new();
    for nt in compositions(geo.k() + 1, max) {
        let n: Vec<Rational> = nt[1..].iter().map(|x| int(*x as i64)).collect();
        let closed = geo.chart.pairings_of(&n);
        let d0r = &s1 * (int(nt[0] as i64) - &closed[i1]);
        let d0 = to_i64(&d0r)
            .ok_or_else(|| Error::Internal(format!("winding {d0r} is not an integer")))?;
        if d0 == 0 {
            continue;
        }
        let weight = int(d0.abs()) / &s1 + n.iter().sum::<Rational>();
        if weight > *t {
            continue;
        }
        let beta = geo.chart.beta_of(&n);
        let mut bt = vec![int(d0) / &s1];
        bt.extend(beta.iter().cloned());
        let pairings: Vec<Rational> = (0..geo.fan.r()).map(|i| geo.extended.pair(i, &bt)).collect();
        let sector = geo.chart.sector_of(&geo.fan, &closed)?;
        out.push(ExtendedDegree {
            d0,
            ntilde: nt,
            beta,
            closed,
            pairings,
            sector,
            weight,
        });
    }
    Ok(out)
}

/// The closed-form coefficient `A_{beta~}`; zero if a pairing over `I_tau` is negative.
pub fn amplitude_coefficient(geo: &Geometry, deg: &ExtendedDegree) -> Result<Rational> {
    let [i1, i2, i3] = geo.flag.order;
    let p = &deg.pairings;
    let i_tau = geo.i_tau();
    if i_tau.iter().any(|i| p[*i].is_negative()) {
        return Ok(Rational::zero());
    }
    if let Some(i) = i_tau.iter().find(|i| !p[**i].is_integer()) {
        return Err(Error::Internal(format!(
            "<D_{}, beta~> = {} is not an integer",
            i + 1,
            p[*i]
        )));
    }
    let s1 = int(geo.s1() as i64);
    let f = int(geo.f());
    let d0s = int(deg.d0) / &s1;
    let v = &geo.chart.boxes[deg.sector];
    let c1 = v.c_of(i1).expect("i1 is a ray of sigma");
    let c2 = v.c_of(i2).expect("i2 is a ray of sigma");
    let exponent = &d0s * (-&f - int(1)) - frac(&(c2 - &f * c1)) + &deg.closed[i3];
    let sign = sign_of_integer(&exponent)?;
    let offset = -(&p[i2] + &p[i3]) - int(1);
    let n = to_i64(&offset)
        .ok_or_else(|| Error::Internal(format!("Pochhammer length {offset} is not an integer")))?;
    if n < 0 {
        return Err(Error::Internal(format!("Pochhammer length {n} is negative")));
    }
    let poch = pochhammer(&(-&p[i3] - int(1)), n)?;
    let mut den = d0s;
    for i in &i_tau {
        den *= Rational::from_integer(factorial(to_i64(&p[*i]).unwrap() as u64));
    }
    Ok(-(poch * int(sign)) / den)
}

/// `D'(d0, k; f)` with its `w1`-power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskFactor {
    pub value: Rational,
    pub w1_power: i64,
}

/// The outer-brane disk factor for winding `d0 > 0` and twisted sector `k`.
pub fn disk_factor_prime(geo: &Geometry, d0: i64, k: &BoxElement) -> Result<DiskFactor> {
    let [i1, i2, i3] = geo.flag.order;
    let (Some(c1), Some(c2), Some(c3)) = (k.c_of(i1), k.c_of(i2), k.c_of(i3)) else {
        return Err(Error::InvalidBrane("box element does not live on sigma".into()));
    };
    let s1 = int(geo.s1() as i64);
    let d0s = int(d0) / &s1;
    if d0 <= 0 || frac(&d0s) != *c1 {
        return Err(Error::InvalidBrane(format!(
            "(d0, k) = ({d0}, {:?}) is not in H_tau,sigma",
            k.v
        )));
    }
    let f = int(geo.f());
    let age = to_i64(&k.age).ok_or_else(|| Error::Internal("non-integral age".into()))?;
    let exponent = &d0s * (-&f - int(1)) - c3 - frac(&(c2 - &f * c1));
    let sign = sign_of_integer(&exponent)?;
    let fl = floor_i64(&d0s);
    let mut prod = Rational::one();
    for a in 1..=(fl + age - 1) {
        prod *= &f * &d0s - c2 + int(a);
    }
    let ratio = &s1 / int(d0);
    let mut value = -int(sign) * &ratio * prod / Rational::from_integer(factorial(fl as u64));
    for _ in 0..age {
        value *= &ratio;
    }
    Ok(DiskFactor { value, w1_power: age })
}

/// `sqrt(chi)(v) = exp(pi i {c_{i2}(v) - f c_{i1}(v)})`.
pub fn character_sqrt(geo: &Geometry, v: &BoxElement) -> Result<CycloNumber> {
    let [i1, i2, _] = geo.flag.order;
    let c1 = v.c_of(i1).ok_or_else(|| Error::InvalidBrane("box element does not live on sigma".into()))?;
    let c2 = v.c_of(i2).expect("same cone");
    CycloNumber::phase(&geo.field, &frac(&(c2 - int(geo.f()) * c1)))
}

/// Sector potentials `W_v` and the assembled `W = sum_v sqrt(chi)(v) W_v`.
#[derive(Debug, Clone)]
pub struct APotential {
    pub sectors: Vec<Series>,
    pub assembled: Series,
    pub degrees: usize,
}

pub fn disk_potential_a(geo: &Geometry, t: &Rational) -> Result<APotential> {
    let space = geo.xq_space(t)?;
    let mut sectors = vec![Series::zero(&space); geo.chart.boxes.len()];
    let degrees = enumerate_extended(geo, t)?;
    for deg in &degrees {
        let a = amplitude_coefficient(geo, deg)?;
        sectors[deg.sector].add_monomial(&deg.exponents(), CycloNumber::from_rational(&geo.field, a))?;
    }
    let mut assembled = Series::zero(&space);
    for (v, w) in geo.chart.boxes.iter().zip(&sectors) {
        assembled = assembled.add(&w.scale(&character_sqrt(geo, v)?))?;
    }
    Ok(APotential {
        sectors,
        assembled,
        degrees: degrees.len(),
    })
}

/// The finite ratio `prod_{m >= ceil(p)} (p - m) / prod_{m >= 0} (p - m)`.
fn gamma_ratio(p: &Rational) -> Rational {
    let c = ceil_i64(p);
    let mut acc = Rational::one();
    if c > 0 {
        for m in 0..c {
            acc /= p - int(m);
        }
    } else {
        for m in c..0 {
            acc *= p - int(m);
        }
    }
    acc
}

/// The series `A_1(q)..A_r(q)` in the chart of `sigma`.
#[derive(Debug, Clone)]
pub struct ClosedSeries {
    pub a: Vec<Series>,
}

pub fn a_i_series(geo: &Geometry, t: &Rational) -> Result<ClosedSeries> {
    let space = geo.q_space(t)?;
    let fan = &geo.fan;
    let r = fan.r();
    let mut a = vec![Series::zero(&space); r];
    let max = if t.is_negative() { 0 } else { floor_i64(t) as u64 };
    for n in compositions(geo.k(), max) {
        if n.iter().all(|x| *x == 0) {
            continue;
        }
        let nr: Vec<Rational> = n.iter().map(|x| int(*x as i64)).collect();
        let p = geo.chart.pairings_of(&nr);
        let sector = geo.chart.sector_of(fan, &p)?;
        let v = &geo.chart.boxes[sector];
        let one = |c: Rational| CycloNumber::from_rational(&geo.field, c);
        if v.is_identity() {
            for i in 0..fan.r_prime() {
                if !p[i].is_negative() || (0..r).any(|j| j != i && p[j].is_negative()) {
                    continue;
                }
                let m = to_i64(&(-&p[i] - int(1))).expect("integral pairing");
                let mut c = Rational::from_integer(factorial(m as u64));
                if m % 2 == 1 {
                    c = -c;
                }
                for j in (0..r).filter(|j| *j != i) {
                    c /= Rational::from_integer(factorial(to_i64(&p[j]).unwrap() as u64));
                }
                a[i].add_monomial(&nr, one(c))?;
            }
        }
        for i in fan.r_prime()..r {
            if v.v.as_slice() != fan.vector(i) {
                continue;
            }
            if p.iter().any(|x| x.is_integer() && x.is_negative()) {
                continue;
            }
            let c: Rational = p.iter().map(gamma_ratio).product();
            a[i].add_monomial(&nr, one(c))?;
        }
    }
    Ok(ClosedSeries { a })
}

/// One closed flat coordinate `tau_a = [log q_a +] series`.
#[derive(Debug, Clone)]
pub struct ClosedCoordinate {
    pub name: String,
    pub log_of: Option<String>,
    pub series: Series,
}

#[derive(Debug, Clone)]
pub struct MirrorMaps {
    pub closed: Vec<ClosedCoordinate>,
    /// `log X - log x`.
    pub open: Series,
}

pub fn mirror_maps(geo: &Geometry, t: &Rational) -> Result<MirrorMaps> {
    if geo.fan.has_torsion() {
        return Err(Error::Unsupported("mirror maps need a trivial generic stabilizer".into()));
    }
    let cs = a_i_series(geo, t)?;
    let space = geo.q_space(t)?;
    let rp = geo.fan.r_prime();
    let mut closed = Vec::new();
    for (a, i) in geo.chart.anticone.iter().enumerate() {
        let name = format!("tau{}", a + 1);
        if *i < rp {
            let mut s = Series::zero(&space);
            for j in 0..rp {
                s = s.add(&cs.a[j].scale_rational(&geo.chart.pairing[j][a]))?;
            }
            closed.push(ClosedCoordinate {
                name,
                log_of: Some(format!("q{}", a + 1)),
                series: s,
            });
        } else {
            closed.push(ClosedCoordinate {
                name,
                log_of: None,
                series: cs.a[*i].clone(),
            });
        }
    }
    let s1 = int(geo.s1() as i64);
    let mut open = Series::zero(&space);
    for i in 0..rp {
        let l = int(geo.extended.rows[0][i]);
        if !l.is_zero() {
            open = open.add(&cs.a[i].scale_rational(&(l / &s1)))?;
        }
    }
    Ok(MirrorMaps { closed, open })
}
