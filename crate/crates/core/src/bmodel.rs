//! The B-side: the normalized mirror curve, `log y` as a Puiseux series
//! (closed form and Newton iteration), `W_{H,inst}`, and the comparison with
//! the A-side potential.
//!
//! Only `v' = log y - i pi` is ever stored. In the variables
//! `tq'_a = (-1)^{eps_a} tq_a` the curve reads
//! `1 - e^{v'} + sum_a tq'_a e^{eps_a v'} = 0`.

use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amodel::{disk_potential_a, xq_space, Geometry};
use crate::error::{Error, Result};
use crate::exactring::{factorial, int, pochhammer, rat, to_i64, CycloField, CycloNumber, Rational};
use crate::lattice::{compositions, rat_inverse, semiprojectivity_check, RatMatrix};
use crate::series::{newton_solve, Series, SeriesSpace};

/// How `v'` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    Closed,
    #[default]
    Newton,
}

impl FromStr for Solver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Solver> {
        match s {
            "closed" => Ok(Solver::Closed),
            "newton" => Ok(Solver::Newton),
            _ => Err(Error::Input(format!("unknown solver {s:?}; use closed or newton"))),
        }
    }
}

/// `tq_0 y^{eps_0} + .. + tq_k y^{eps_k} + y + 1 = 0` with its coordinate changes.
#[derive(Debug, Clone)]
pub struct MirrorCurve {
    pub s1: u64,
    pub eps: Vec<Rational>,
    /// `ptilde[a][b] = l~^(b)_{i(a)}` for `i = (i1, I_sigma)`.
    pub ptilde: RatMatrix,
    pub ptilde_inv: RatMatrix,
    /// `qhat_b` as exponents of `(x, q_1..q_k)`.
    pub qhat_images: RatMatrix,
    /// `tq_a` as exponents of `(x, q_1..q_k)`.
    pub tq_images: RatMatrix,
    pub laurent: bool,
    /// `max(0, max_a <D_{i1}, e^a>)`.
    pub overshoot: Rational,
    pub field: Arc<CycloField>,
}

impl MirrorCurve {
    pub fn k(&self) -> usize {
        self.eps.len() - 1
    }

    /// Total `tq`-degree needed so that every target monomial of weight `<= t` is exact.
    pub fn source_order(&self, t: &Rational) -> Rational {
        ((int(1) + &self.overshoot) * t).floor()
    }

    pub fn tq_space(&self, t: &Rational) -> Result<Arc<SeriesSpace>> {
        tq_space(self.k() + 1, &self.source_order(t), &self.field)
    }

    pub fn xq_space(&self, t: &Rational) -> Result<Arc<SeriesSpace>> {
        xq_space(self.s1, self.k(), self.laurent, t, &self.field)
    }
}

pub fn tq_space(nvars: usize, order: &Rational, field: &Arc<CycloField>) -> Result<Arc<SeriesSpace>> {
    let names: Vec<String> = (0..nvars).map(|a| format!("tq{a}")).collect();
    SeriesSpace::uniform(&names, order.clone(), field)
}

pub fn build_curve(geo: &Geometry) -> Result<MirrorCurve> {
    let k = geo.k();
    let [i1, i2, _] = geo.flag.order;
    let s1 = geo.s1();
    let f = int(geo.f());
    let pairing = &geo.chart.pairing;
    let mut eps = vec![-f.clone()];
    eps.extend((0..k).map(|a| &f * &pairing[i1][a] - &pairing[i2][a]));

    let mut rows_idx = vec![i1];
    rows_idx.extend(geo.chart.anticone.iter().copied());
    let ptilde: RatMatrix = rows_idx
        .iter()
        .map(|i| geo.extended.rows.iter().map(|row| int(row[*i])).collect())
        .collect();
    let ptilde_inv = rat_inverse(&ptilde)
        .ok_or_else(|| Error::InvalidFan("the matrix p~ is singular".into()))?;

    let s1r = int(s1 as i64);
    let mut qhat_images = Vec::with_capacity(k + 1);
    for (b, row) in geo.extended.rows.iter().enumerate() {
        let mut img = vec![Rational::zero(); k + 1];
        if b == 0 {
            img[0] = s1r.clone();
        }
        for (a, i) in geo.chart.anticone.iter().enumerate() {
            img[a + 1] = int(row[*i]);
        }
        qhat_images.push(img);
    }
    let mut tq_images = Vec::with_capacity(k + 1);
    let mut first = vec![Rational::zero(); k + 1];
    first[0] = s1r.clone();
    tq_images.push(first);
    for a in 0..k {
        let mut img = vec![Rational::zero(); k + 1];
        img[0] = -&s1r * &pairing[i1][a];
        img[a + 1] = int(1);
        tq_images.push(img);
    }
    for (a, want) in tq_images.iter().enumerate() {
        let via: Vec<Rational> = (0..=k)
            .map(|j| (0..=k).map(|b| &ptilde_inv[b][a] * &qhat_images[b][j]).sum())
            .collect();
        if via != *want {
            return Err(Error::Internal(format!(
                "tq{a} disagrees with its expression through qhat"
            )));
        }
    }
    Ok(MirrorCurve {
        s1,
        eps,
        ptilde,
        ptilde_inv,
        qhat_images,
        tq_images,
        laurent: !geo.is_outer(),
        overshoot: geo.overshoot(),
        field: geo.field.clone(),
    })
}

/// `v'` in the variables `tq'`: coefficient of `tq'^n` is
/// `(eps.n - 1)_{|n| - 1} / prod n_a!`.
pub fn closed_form_series(eps: &[Rational], space: &Arc<SeriesSpace>) -> Result<Series> {
    if space.nvars() != eps.len() {
        return Err(Error::Series("one exponent per variable expected".into()));
    }
    let max = to_i64(&space.order().floor()).unwrap_or(0).max(0) as u64;
    let mut out = Series::zero(space);
    for n in compositions(eps.len(), max) {
        let total: u64 = n.iter().sum();
        if total == 0 {
            continue;
        }
        let en: Rational = eps.iter().zip(&n).map(|(e, x)| e * int(*x as i64)).sum();
        let mut c = pochhammer(&(en - int(1)), total as i64 - 1)?;
        for x in &n {
            c /= Rational::from_integer(factorial(*x));
        }
        let exps: Vec<Rational> = n.iter().map(|x| int(*x as i64)).collect();
        out.add_monomial(&exps, CycloNumber::from_rational(space.field(), c))?;
    }
    Ok(out)
}

/// `v'` in the variables `tq'` by Newton iteration on `1 - e^u + sum tq'_a e^{eps_a u}`.
pub fn newton_series(eps: &[Rational], space: &Arc<SeriesSpace>) -> Result<Series> {
    if space.nvars() != eps.len() {
        return Err(Error::Series("one exponent per variable expected".into()));
    }
    newton_solve(space, |u| curve_residual(eps, u))
}

/// `(H(u), H'(u))` for the normalized curve.
pub fn curve_residual(eps: &[Rational], u: &Series) -> Result<(Series, Series)> {
    let space = u.space();
    let eu = u.exp()?;
    let mut h = Series::one(space).sub(&eu)?;
    let mut dh = eu.neg();
    for (a, e) in eps.iter().enumerate() {
        let term = Series::var(space, a).mul(&u.scale_rational(e).exp()?)?;
        h = h.add(&term)?;
        dh = dh.add(&term.scale_rational(e))?;
    }
    Ok((h, dh))
}

/// Rewrites a series in `tq'` as a series in `tq`: `tq'^n = (-1)^{eps.n} tq^n`.
pub fn apply_phases(v: &Series, eps: &[Rational]) -> Result<Series> {
    let field = v.space().field().clone();
    v.map_coefficients(|e, c| {
        let en: Rational = eps.iter().zip(e).map(|(a, b)| a * b).sum();
        Ok(c * &CycloNumber::phase(&field, &en)?)
    })
}

fn solve(curve: &MirrorCurve, t: &Rational, solver: Solver) -> Result<Series> {
    let space = curve.tq_space(t)?;
    let v = match solver {
        Solver::Closed => closed_form_series(&curve.eps, &space)?,
        Solver::Newton => newton_series(&curve.eps, &space)?,
    };
    apply_phases(&v, &curve.eps)
}

/// `v'` as a series in `tq_0..tq_k`, from the closed form.
pub fn solve_log_y_closed(curve: &MirrorCurve, t: &Rational) -> Result<Series> {
    solve(curve, t, Solver::Closed)
}

/// `v'` as a series in `tq_0..tq_k`, from Newton iteration.
pub fn solve_log_y_newton(curve: &MirrorCurve, t: &Rational) -> Result<Series> {
    solve(curve, t, Solver::Newton)
}

/// `W_{H,inst}` and the dropped `x`-degree-0 part of `v'`.
#[derive(Debug, Clone)]
pub struct BPotential {
    pub inst: Series,
    pub log_term: Series,
    pub v: Series,
}

pub fn w_h_inst(curve: &MirrorCurve, t: &Rational, solver: Solver) -> Result<BPotential> {
    let v = solve(curve, t, solver)?;
    w_h_from(curve, t, v)
}

fn w_h_from(curve: &MirrorCurve, t: &Rational, v: Series) -> Result<BPotential> {
    let target = curve.xq_space(t)?;
    let in_xq = v.substitute_monomial(&target, &curve.tq_images)?;
    let (log_term, rest) = in_xq.split_degree_zero(0);
    let inst = rest.integrate_dlog(0, curve.s1)?;
    Ok(BPotential { inst, log_term, v })
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub solver: Solver,
    /// Adds 1 to the A-side coefficient of this `(x, q_1..q_k)` monomial.
    pub perturb: Option<Vec<Rational>>,
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub exponents: Vec<Rational>,
    pub a: CycloNumber,
    pub b: CycloNumber,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub equal: bool,
    /// Whether the closed form and Newton iteration agree on `v'`.
    pub solvers_agree: bool,
    pub compared: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<Mismatch>,
    pub a_side: Series,
    pub b_side: BPotential,
}

/// Compares the assembled A-side potential with `W_{H,inst}` monomial by monomial.
pub fn verify_identity(geo: &Geometry, t: &Rational, opts: &VerifyOptions) -> Result<VerifyReport> {
    if geo.fan.has_torsion() {
        return Err(Error::Unsupported("torsion unsupported in mirror pipeline".into()));
    }
    if !semiprojectivity_check(&geo.fan) {
        return Err(Error::Unsupported("the fan is not semi-projective".into()));
    }
    let mut a_side = disk_potential_a(geo, t)?.assembled;
    if let Some(e) = &opts.perturb {
        let space = a_side.space().clone();
        let key = space.key_of(e)?;
        if space.weight(&key) > *t {
            return Err(Error::Input("perturbed monomial lies above the truncation".into()));
        }
        a_side.add_monomial(e, CycloNumber::one(&geo.field))?;
    }
    let curve = build_curve(geo)?;
    let v = solve(&curve, t, opts.solver)?;
    let other = match opts.solver {
        Solver::Closed => Solver::Newton,
        Solver::Newton => Solver::Closed,
    };
    let solvers_agree = solve(&curve, t, other)? == v;
    let b_side = w_h_from(&curve, t, v)?;

    let mut keys: Vec<&Vec<i64>> = a_side.terms().map(|(k, _)| k).chain(b_side.inst.terms().map(|(k, _)| k)).collect();
    keys.sort();
    keys.dedup();
    let space = a_side.space();
    let mut mismatches = 0;
    let mut first_mismatch = None;
    for key in &keys {
        let e = space.exponents(key);
        let a = a_side.coefficient(&e);
        let b = b_side.inst.coefficient(&e);
        if a != b {
            mismatches += 1;
            if first_mismatch.is_none() {
                first_mismatch = Some(Mismatch { exponents: e, a, b });
            }
        }
    }
    Ok(VerifyReport {
        equal: mismatches == 0 && solvers_agree,
        solvers_agree,
        compared: keys.len(),
        mismatches,
        first_mismatch,
        a_side,
        b_side,
    })
}

/// One randomized closed-form-versus-Newton instance.
#[derive(Debug, Clone)]
pub struct AppendixInstance {
    pub eps: Vec<Rational>,
    pub order: i64,
    pub terms: usize,
    pub equal: bool,
    pub residual_zero: bool,
}

#[derive(Debug, Clone)]
pub struct AppendixReport {
    pub instances: Vec<AppendixInstance>,
    /// The single-variable `eps = 0` case equals `log(1 + s)`.
    pub log_check: bool,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.log_check && self.instances.iter().all(|i| i.equal && i.residual_zero)
    }
}

/// Random exponent vectors with `k <= 3` (up to four variables), denominators
/// `<= 4`, `|eps| <= 2` and order `<= 5`.
pub fn random_eps(rng: &mut impl Rng) -> (Vec<Rational>, i64) {
    let nvars = rng.gen_range(1..=4);
    let eps = (0..nvars)
        .map(|_| {
            let d = rng.gen_range(1..=4i64);
            rat(rng.gen_range(-2 * d..=2 * d), d)
        })
        .collect();
    let max_order = if nvars == 4 { 4 } else { 5 };
    (eps, rng.gen_range(1..=max_order))
}

pub fn check_instance(eps: &[Rational], order: i64) -> Result<AppendixInstance> {
    let field = CycloField::new(2)?;
    let space = tq_space(eps.len(), &int(order), &field)?;
    let closed = closed_form_series(eps, &space)?;
    let newton = newton_series(eps, &space)?;
    let (h, _) = curve_residual(eps, &closed)?;
    Ok(AppendixInstance {
        eps: eps.to_vec(),
        order,
        terms: closed.len(),
        equal: closed == newton,
        residual_zero: h.is_zero(),
    })
}

pub fn appendix_check(seed: u64, instances: usize) -> Result<AppendixReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(instances);
    for _ in 0..instances {
        let (eps, order) = random_eps(&mut rng);
        out.push(check_instance(&eps, order)?);
    }
    let field = CycloField::new(2)?;
    let space = tq_space(1, &int(8), &field)?;
    let v = closed_form_series(&[int(0)], &space)?;
    let s = Series::var(&space, 0);
    let log = Series::one(&space).add(&s)?.log()?;
    Ok(AppendixReport {
        instances: out,
        log_check: v == log,
    })
}
