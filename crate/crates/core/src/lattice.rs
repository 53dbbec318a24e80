//! Integer and rational linear algebra, and the combinatorics of a
//! 3-dimensional simplicial stacky fan: charge matrix, Box elements and ages,
//! flag data, effective cones.
//!
//! Ray indices are 0-based everywhere in this module. Vectors of `N` are
//! integer tuples `(x, y, z, t_1, ..., t_s)` whose last `s` coordinates live in
//! `Z/m_j` for the torsion invariant factors `m_j`.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactring::{ceil_i64, denom_u64, frac, int, lcm_u64, Rational};

pub type IntMatrix = Vec<Vec<i64>>;
pub type RatMatrix = Vec<Vec<Rational>>;

/// Result of [`smith_normal_form`]: `u * m * v = s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i64> {
        let n = self.s.len().min(self.s.first().map_or(0, |r| r.len()));
        (0..n).map(|i| self.s[i][i]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| **d != 0).count()
    }
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn int_mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, v);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }

            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t] / a[t][t];
                if q != 0 {
                    for j in 0..cols {
                        a[i][j] -= q * a[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = a[t][j] / a[t][t];
                if q != 0 {
                    for i in 0..rows {
                        a[i][j] -= q * a[i][t];
                    }
                    for i in 0..cols {
                        v[i][j] -= q * v[i][t];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            let p = a[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in 0..cols {
                        a[t][j] += a[i][j];
                    }
                    for j in 0..rows {
                        u[t][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for j in 0..cols {
                a[t][j] = -a[t][j];
            }
            for j in 0..rows {
                u[t][j] = -u[t][j];
            }
        }
    }
    finish(a, u, v)
}

fn finish(s: IntMatrix, u: IntMatrix, v: IntMatrix) -> Snf {
    Snf { u, s, v }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: echelon
/// rows with positive pivots and entries above each pivot reduced into
/// `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(rows: &IntMatrix) -> IntMatrix {
    let mut a: IntMatrix = rows.iter().filter(|r| r.iter().any(|x| *x != 0)).cloned().collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut t = 0;
    for j in 0..cols {
        if t == a.len() {
            break;
        }
        loop {
            let piv = (t..a.len())
                .filter(|&i| a[i][j] != 0)
                .min_by_key(|&i| a[i][j].abs());
            let Some(p) = piv else { break };
            a.swap(t, p);
            let mut done = true;
            for i in t + 1..a.len() {
                let q = a[i][j] / a[t][j];
                if q != 0 {
                    for c in 0..cols {
                        a[i][c] -= q * a[t][c];
                    }
                }
                done &= a[i][j] == 0;
            }
            if done {
                break;
            }
        }
        if a[t][j] == 0 {
            continue;
        }
        if a[t][j] < 0 {
            for c in 0..cols {
                a[t][c] = -a[t][c];
            }
        }
        for i in 0..t {
            let q = a[i][j].div_euclid(a[t][j]);
            if q != 0 {
                for c in 0..cols {
                    a[i][c] -= q * a[t][c];
                }
            }
        }
        t += 1;
    }
    a.truncate(t);
    a
}

/// Basis of the integer kernel `{x : m x = 0}` (columns of `v` past the rank).
pub fn integer_kernel(m: &IntMatrix, cols: usize) -> IntMatrix {
    if m.is_empty() {
        return identity(cols);
    }
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    (rank..cols)
        .map(|j| (0..cols).map(|i| snf.v[i][j]).collect())
        .collect()
}

pub fn to_rat_matrix(m: &IntMatrix) -> RatMatrix {
    m.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect()
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn rat_inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pivot_row = m[col].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rat_mat_vec(a: &RatMatrix, x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn rat_mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn det3(m: [[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// A 3-dimensional simplicial stacky fan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackyFan {
    torsion: Vec<i64>,
    vectors: Vec<Vec<i64>>,
    r_prime: usize,
    cones: Vec<[usize; 3]>,
}

impl StackyFan {
    pub const RANK: usize = 3;

    /// `rays` are `b_1..b_{r'}`, `extras` are `b_{r'+1}..b_r`; cones list ray indices.
    pub fn new(
        torsion: Vec<i64>,
        rays: Vec<Vec<i64>>,
        extras: Vec<Vec<i64>>,
        cones: Vec<[usize; 3]>,
    ) -> Result<StackyFan> {
        let bad = |s: String| Error::InvalidFan(s);
        if let Some(m) = torsion.iter().find(|m| **m < 2) {
            return Err(bad(format!("torsion factor {m} must be at least 2")));
        }
        let width = Self::RANK + torsion.len();
        let r_prime = rays.len();
        let mut vectors: Vec<Vec<i64>> = rays.into_iter().chain(extras).collect();
        for (i, v) in vectors.iter_mut().enumerate() {
            if v.len() != width {
                return Err(bad(format!(
                    "vector b_{} has {} coordinates, expected {width}",
                    i + 1,
                    v.len()
                )));
            }
            for (t, m) in torsion.iter().enumerate() {
                v[Self::RANK + t] = v[Self::RANK + t].rem_euclid(*m);
            }
        }
        if cones.is_empty() {
            return Err(bad("no maximal cones".into()));
        }
        let mut sorted_cones = Vec::new();
        for c in &cones {
            let mut s = *c;
            s.sort_unstable();
            if s[0] == s[1] || s[1] == s[2] {
                return Err(bad(format!("cone {:?} repeats a ray", one_based(c))));
            }
            if s[2] >= r_prime {
                return Err(bad(format!(
                    "cone {:?} uses an index that is not a ray",
                    one_based(c)
                )));
            }
            if sorted_cones.contains(&s) {
                return Err(bad(format!("cone {:?} listed twice", one_based(c))));
            }
            sorted_cones.push(s);
        }
        let fan = StackyFan {
            torsion,
            vectors,
            r_prime,
            cones: sorted_cones,
        };
        for c in &fan.cones {
            if fan.cone_det(*c) == 0 {
                return Err(bad(format!("cone {:?} is not simplicial", one_based(c))));
            }
        }
        for i in 0..r_prime {
            if !fan.cones.iter().any(|c| c.contains(&i)) {
                return Err(bad(format!("ray b_{} lies in no cone", i + 1)));
            }
        }
        for i in r_prime..fan.r() {
            if fan.containing_cone(i).is_none() {
                return Err(bad(format!("extra vector b_{} lies in no cone", i + 1)));
            }
        }
        fan.check_surjective()?;
        fan.check_calabi_yau()?;
        Ok(fan)
    }

    pub fn r(&self) -> usize {
        self.vectors.len()
    }

    pub fn r_prime(&self) -> usize {
        self.r_prime
    }

    /// Rank of the charge lattice.
    pub fn k(&self) -> usize {
        self.r() - Self::RANK
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    pub fn has_torsion(&self) -> bool {
        !self.torsion.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[i64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn bar(&self, i: usize) -> [i64; 3] {
        let v = &self.vectors[i];
        [v[0], v[1], v[2]]
    }

    pub fn cones(&self) -> &[[usize; 3]] {
        &self.cones
    }

    pub fn cone_index(&self, rays: [usize; 3]) -> Option<usize> {
        let mut s = rays;
        s.sort_unstable();
        self.cones.iter().position(|c| *c == s)
    }

    pub fn is_extra(&self, i: usize) -> bool {
        i >= self.r_prime
    }

    /// Complements of the maximal cones, the minimal anti-cones.
    pub fn anticones(&self) -> Vec<Vec<usize>> {
        self.cones
            .iter()
            .map(|c| (0..self.r()).filter(|i| !c.contains(i)).collect())
            .collect()
    }

    fn cone_matrix(&self, c: [usize; 3]) -> [[i64; 3]; 3] {
        let b: Vec<[i64; 3]> = c.iter().map(|i| self.bar(*i)).collect();
        [
            [b[0][0], b[1][0], b[2][0]],
            [b[0][1], b[1][1], b[2][1]],
            [b[0][2], b[1][2], b[2][2]],
        ]
    }

    pub fn cone_det(&self, c: [usize; 3]) -> i64 {
        det3(self.cone_matrix(c))
    }

    /// Coordinates of `bar(i)` in the basis of the cone's rays.
    pub fn cone_coordinates(&self, c: [usize; 3], x: [i64; 3]) -> [Rational; 3] {
        let m = self.cone_matrix(c);
        let inv = rat_inverse(&to_rat_matrix(&m.iter().map(|r| r.to_vec()).collect()))
            .expect("simplicial cone");
        let y = rat_mat_vec(&inv, &x.map(int));
        [y[0].clone(), y[1].clone(), y[2].clone()]
    }

    /// A maximal cone containing `bar(i)`, with the coordinates of `bar(i)`.
    pub fn containing_cone(&self, i: usize) -> Option<(usize, [Rational; 3])> {
        self.cones.iter().enumerate().find_map(|(idx, c)| {
            let y = self.cone_coordinates(*c, self.bar(i));
            if y.iter().all(|t| !t.is_negative()) {
                Some((idx, y))
            } else {
                None
            }
        })
    }

    /// The matrix of `phi: Z^r -> N` with torsion relation columns appended.
    fn presentation(&self) -> IntMatrix {
        let t = self.torsion.len();
        let rows = Self::RANK + t;
        let mut m = vec![vec![0i64; self.r() + t]; rows];
        for (i, v) in self.vectors.iter().enumerate() {
            for (row, x) in v.iter().enumerate() {
                m[row][i] = *x;
            }
        }
        for (j, mj) in self.torsion.iter().enumerate() {
            m[Self::RANK + j][self.r() + j] = *mj;
        }
        m
    }

    fn check_surjective(&self) -> Result<()> {
        let m = self.presentation();
        let snf = smith_normal_form(&m);
        let d = snf.diagonal();
        if d.len() < m.len() || d.iter().any(|x| *x != 1) {
            return Err(Error::InvalidFan(
                "the vectors b_i do not generate N".into(),
            ));
        }
        Ok(())
    }

    fn check_calabi_yau(&self) -> Result<()> {
        let c = self.cones[0];
        let m = self.cone_matrix(c);
        let mt: IntMatrix = (0..3).map(|i| (0..3).map(|j| m[j][i]).collect()).collect();
        let inv = rat_inverse(&to_rat_matrix(&mt)).expect("simplicial cone");
        let func = rat_mat_vec(&inv, &[int(1), int(1), int(1)]);
        if func.iter().any(|x| !x.is_integer()) {
            return Err(Error::InvalidFan(
                "no integral functional takes the value 1 on every b_i".into(),
            ));
        }
        for i in 0..self.r() {
            let b = self.bar(i);
            let val: Rational = (0..3).map(|j| &func[j] * int(b[j])).sum();
            if val != int(1) {
                return Err(Error::InvalidFan(format!(
                    "b_{} is not at height 1 (not Calabi-Yau)",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for (t, m) in self.torsion.iter().enumerate() {
            v[Self::RANK + t] = v[Self::RANK + t].rem_euclid(*m);
        }
    }

    pub fn torsion_order(&self) -> i64 {
        self.torsion.iter().product()
    }
}

pub fn one_based(c: &[usize]) -> Vec<usize> {
    c.iter().map(|i| i + 1).collect()
}

/// The charge matrix: rows `l^(a)` spanning `ker(Z^r -> N)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeMatrix {
    pub rows: IntMatrix,
    pub r: usize,
}

impl ChargeMatrix {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// `D_i` as a vector in `L^vee = Z^k`.
    pub fn column(&self, i: usize) -> Vec<i64> {
        self.rows.iter().map(|row| row[i]).collect()
    }

    /// `<D_i, beta>` for `beta` in `L_Q` coordinates.
    pub fn pair(&self, i: usize, beta: &[Rational]) -> Rational {
        self.rows
            .iter()
            .zip(beta)
            .map(|(row, b)| int(row[i]) * b)
            .sum()
    }
}

/// Hermite-reduced basis of the kernel, rows ordered by descending pivot column.
pub fn charge_matrix(fan: &StackyFan) -> Result<ChargeMatrix> {
    let m = fan.presentation();
    let total = m[0].len();
    let ker = integer_kernel(&m, total);
    let projected: IntMatrix = ker.iter().map(|v| v[..fan.r()].to_vec()).collect();
    let mut rows = hermite_normal_form(&projected);
    if rows.len() != fan.k() {
        return Err(Error::InvalidFan(format!(
            "charge lattice has rank {}, expected {}",
            rows.len(),
            fan.k()
        )));
    }
    rows.reverse();
    for row in &rows {
        let mut acc = vec![0i64; fan.vectors[0].len()];
        for (i, l) in row.iter().enumerate() {
            for (a, x) in acc.iter_mut().zip(fan.vector(i)) {
                *a += l * x;
            }
        }
        fan.reduce(&mut acc);
        if acc.iter().any(|x| *x != 0) {
            return Err(Error::Internal("charge row does not annihilate the b_i".into()));
        }
    }
    Ok(ChargeMatrix { rows, r: fan.r() })
}

/// Invariant factors of `L^vee / sum_{i > r'} Z D_i`; a `0` entry stands for `Z`.
pub fn picard_cokernel(fan: &StackyFan, charge: &ChargeMatrix) -> Vec<i64> {
    let k = charge.k();
    if k == 0 {
        return vec![];
    }
    let extras: Vec<usize> = (fan.r_prime()..fan.r()).collect();
    if extras.is_empty() {
        return vec![0; k];
    }
    let m: IntMatrix = (0..k)
        .map(|a| extras.iter().map(|i| charge.rows[a][*i]).collect())
        .collect();
    let snf = smith_normal_form(&m);
    let d = snf.diagonal();
    let mut out: Vec<i64> = d.iter().filter(|x| **x > 1).copied().collect();
    let rank = d.iter().filter(|x| **x != 0).count();
    out.extend(std::iter::repeat_n(0, k - rank));
    out
}

/// An element of `Box(sigma)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxElement {
    pub v: Vec<i64>,
    pub cone: [usize; 3],
    #[serde(with = "rat3")]
    pub c: [Rational; 3],
    #[serde(with = "rat1")]
    pub age: Rational,
}

impl BoxElement {
    /// `c_i(v)` for a ray `i` of the host cone.
    pub fn c_of(&self, ray: usize) -> Option<&Rational> {
        self.cone.iter().position(|j| *j == ray).map(|p| &self.c[p])
    }

    pub fn is_identity(&self) -> bool {
        self.v.iter().all(|x| *x == 0)
    }
}

mod rat1 {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};
    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::exactring::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

mod rat3 {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    pub fn serialize<S: Serializer>(x: &[Rational; 3], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = x.iter().map(|r| r.to_string()).collect();
        v.serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Rational; 3], D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        if v.len() != 3 {
            return Err(serde::de::Error::custom("expected three weights"));
        }
        let p = |s: &str| crate::exactring::parse_rational(s).map_err(serde::de::Error::custom);
        Ok([p(&v[0])?, p(&v[1])?, p(&v[2])?])
    }
}

fn int_inverse(m: &IntMatrix) -> IntMatrix {
    let inv = rat_inverse(&to_rat_matrix(m)).expect("unimodular");
    inv.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_integer().to_i64().expect("unimodular inverse is integral"))
                .collect()
        })
        .collect()
}

fn torsion_elements(fan: &StackyFan) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for m in fan.torsion() {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..*m).map(move |t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    out
}

/// `Box(sigma)`, sorted by age and then by `v`.
pub fn box_elements(fan: &StackyFan, cone_idx: usize) -> Result<Vec<BoxElement>> {
    let cone = *fan
        .cones()
        .get(cone_idx)
        .ok_or_else(|| Error::InvalidFan(format!("no cone with index {cone_idx}")))?;
    let bm = fan.cone_matrix(cone);
    let bmat: IntMatrix = bm.iter().map(|r| r.to_vec()).collect();
    let snf = smith_normal_form(&bmat);
    let uinv = int_inverse(&snf.u);
    let diag = snf.diagonal();
    if diag.contains(&0) {
        return Err(Error::InvalidFan(format!(
            "cone {:?} is not simplicial",
            one_based(&cone)
        )));
    }
    let mut reps: Vec<[i64; 3]> = Vec::new();
    for t0 in 0..diag[0] {
        for t1 in 0..diag[1] {
            for t2 in 0..diag[2] {
                let y: Vec<i64> = (0..3)
                    .map(|i| uinv[i][0] * t0 + uinv[i][1] * t1 + uinv[i][2] * t2)
                    .collect();
                reps.push([y[0], y[1], y[2]]);
            }
        }
    }
    let tors = torsion_elements(fan);
    let mut out = Vec::new();
    for y in reps {
        let c = fan.cone_coordinates(cone, y);
        let c = [frac(&c[0]), frac(&c[1]), frac(&c[2])];
        let mut vbar = [Rational::zero(), Rational::zero(), Rational::zero()];
        for (j, ray) in cone.iter().enumerate() {
            let b = fan.bar(*ray);
            for i in 0..3 {
                vbar[i] += &c[j] * int(b[i]);
            }
        }
        let vbar: Vec<i64> = vbar
            .iter()
            .map(|x| {
                x.to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::Internal("box element is not a lattice point".into()))
            })
            .collect::<Result<_>>()?;
        let age: Rational = c.iter().sum();
        for t in &tors {
            let mut v = vbar.clone();
            v.extend(t.iter().copied());
            out.push(BoxElement {
                v,
                cone,
                c: c.clone(),
                age: age.clone(),
            });
        }
    }
    out.sort_by(|a, b| a.age.cmp(&b.age).then_with(|| a.v.cmp(&b.v)));
    out.dedup_by(|a, b| a.v == b.v);
    Ok(out)
}

/// Cone-adapted data: the anti-cone `I_sigma`, the dual basis `e^a` of
/// `{p_a} = {D_i}_{i in I_sigma}`, all pairings `<D_i, e^a>`, and `Box(sigma)`.
#[derive(Debug, Clone)]
pub struct ConeChart {
    pub cone_idx: usize,
    pub cone: [usize; 3],
    pub anticone: Vec<usize>,
    pub dual: Vec<Vec<Rational>>,
    pub pairing: Vec<Vec<Rational>>,
    pub boxes: Vec<BoxElement>,
}

/// An element of `K_eff,sigma` written as `sum n_a e^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KEffElement {
    pub n: Vec<u64>,
    pub beta: Vec<Rational>,
    pub pairings: Vec<Rational>,
    pub sector: usize,
}

impl ConeChart {
    pub fn new(fan: &StackyFan, charge: &ChargeMatrix, cone_idx: usize) -> Result<ConeChart> {
        let cone = *fan
            .cones()
            .get(cone_idx)
            .ok_or_else(|| Error::InvalidFan(format!("no cone with index {cone_idx}")))?;
        let anticone: Vec<usize> = (0..fan.r()).filter(|i| !cone.contains(i)).collect();
        let k = charge.k();
        let p: RatMatrix = anticone
            .iter()
            .map(|i| charge.column(*i).into_iter().map(int).collect())
            .collect();
        let pinv = if k == 0 {
            vec![]
        } else {
            rat_inverse(&p).ok_or_else(|| {
                Error::InvalidFan("the divisors outside a cone are not a basis".into())
            })?
        };
        let dual: Vec<Vec<Rational>> = (0..k).map(|b| (0..k).map(|c| pinv[c][b].clone()).collect()).collect();
        let pairing: Vec<Vec<Rational>> = (0..fan.r())
            .map(|i| dual.iter().map(|e| charge.pair(i, e)).collect())
            .collect();
        let boxes = box_elements(fan, cone_idx)?;
        Ok(ConeChart {
            cone_idx,
            cone,
            anticone,
            dual,
            pairing,
            boxes,
        })
    }

    pub fn k(&self) -> usize {
        self.anticone.len()
    }

    /// Position of ray `i` in `I_sigma`.
    pub fn anticone_position(&self, i: usize) -> Option<usize> {
        self.anticone.iter().position(|j| *j == i)
    }

    pub fn beta_of(&self, n: &[Rational]) -> Vec<Rational> {
        let k = self.k();
        (0..k)
            .map(|c| self.dual.iter().zip(n).map(|(e, x)| &e[c] * x).sum())
            .collect()
    }

    /// Pairings `<D_i, sum n_a e^a>` for every `i`.
    pub fn pairings_of(&self, n: &[Rational]) -> Vec<Rational> {
        self.pairing
            .iter()
            .map(|row| row.iter().zip(n).map(|(p, x)| p * x).sum())
            .collect()
    }

    /// Index into `boxes` of `v(beta) = sum_i ceil(<D_i, beta>) b_i`.
    pub fn sector_of(&self, fan: &StackyFan, pairings: &[Rational]) -> Result<usize> {
        let mut v = vec![0i64; fan.vector(0).len()];
        for (i, p) in pairings.iter().enumerate() {
            let c = ceil_i64(p);
            for (a, x) in v.iter_mut().zip(fan.vector(i)) {
                *a += c * x;
            }
        }
        fan.reduce(&mut v);
        let idx = self
            .boxes
            .iter()
            .position(|b| b.v == v)
            .ok_or_else(|| Error::Internal(format!("v(beta) = {v:?} is not in Box(sigma)")))?;
        let b = &self.boxes[idx];
        for (j, ray) in self.cone.iter().enumerate() {
            if b.c[j] != frac(&-&pairings[*ray]) {
                return Err(Error::Internal("c_i(v(beta)) disagrees with {-<D_i,beta>}".into()));
            }
        }
        Ok(idx)
    }

    pub fn identity_sector(&self) -> usize {
        self.boxes.iter().position(|b| b.is_identity()).expect("Box contains 0")
    }
}

/// Nonnegative integer vectors of length `k` with entry sum at most `max_total`,
/// ordered by total and then lexicographically.
pub fn compositions(k: usize, max_total: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        exact_compositions(k, total, &mut vec![], &mut out);
    }
    out
}

fn exact_compositions(k: usize, total: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if k == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if k == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        exact_compositions(k - 1, total - first, prefix, out);
        prefix.pop();
    }
}

/// All `beta = sum n_a e^a` with `n_a >= 0` and `sum n_a <= bound`.
pub fn k_eff_enumerate(
    fan: &StackyFan,
    chart: &ConeChart,
    bound: &Rational,
) -> Result<Vec<KEffElement>> {
    if bound.is_negative() {
        return Ok(vec![]);
    }
    let max = bound.floor().to_integer().to_u64().unwrap_or(0);
    compositions(chart.k(), max)
        .into_iter()
        .map(|n| {
            let nr: Vec<Rational> = n.iter().map(|x| int(*x as i64)).collect();
            let pairings = chart.pairings_of(&nr);
            let sector = chart.sector_of(fan, &pairings)?;
            Ok(KEffElement {
                beta: chart.beta_of(&nr),
                n,
                pairings,
                sector,
            })
        })
        .collect()
}

/// The oriented flag `(tau, sigma)` of a brane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagData {
    /// `(i1, i2, i3)`: `sigma = {i1, i2, i3}`, `tau = {i2, i3}`.
    pub order: [usize; 3],
    pub cone_idx: usize,
    pub s1: u64,
    pub g_tau: u64,
    pub g_sigma: u64,
    /// For an inner brane, the other maximal cone containing `tau` and its ray off `tau`.
    pub opposite: Option<(usize, usize)>,
}

impl FlagData {
    pub fn is_outer(&self) -> bool {
        self.opposite.is_none()
    }

    pub fn i1(&self) -> usize {
        self.order[0]
    }

    pub fn i2(&self) -> usize {
        self.order[1]
    }

    pub fn i3(&self) -> usize {
        self.order[2]
    }
}

/// Order of the image of `chi_i` on `G_sigma`: lcm of the denominators of `c_i(v)`.
pub fn character_order(boxes: &[BoxElement], ray: usize) -> u64 {
    boxes
        .iter()
        .filter_map(|b| b.c_of(ray))
        .fold(1, |acc, c| lcm_u64(acc, denom_u64(c)))
}

pub fn flag_data(fan: &StackyFan, order: [usize; 3]) -> Result<FlagData> {
    let bad = |s: String| Error::InvalidBrane(s);
    if order.iter().any(|i| *i >= fan.r_prime()) {
        return Err(bad("flag indices must be rays".into()));
    }
    let cone_idx = fan.cone_index(order).ok_or_else(|| {
        bad(format!(
            "{{{}}} is not a maximal cone",
            one_based(&order).iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        ))
    })?;
    let (i2, i3) = (order[1], order[2]);
    let adjacent: Vec<usize> = fan
        .cones()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.contains(&i2) && c.contains(&i3))
        .map(|(j, _)| j)
        .collect();
    let opposite = match adjacent.len() {
        1 => None,
        2 => {
            let other = adjacent.into_iter().find(|j| *j != cone_idx).unwrap();
            let ray = *fan.cones()[other]
                .iter()
                .find(|x| **x != i2 && **x != i3)
                .unwrap();
            Some((other, ray))
        }
        n => return Err(bad(format!("tau is a face of {n} maximal cones"))),
    };
    let boxes = box_elements(fan, cone_idx)?;
    let s1 = character_order(&boxes, order[0]);
    let g_sigma = boxes.len() as u64;
    let g_tau = boxes.iter().filter(|b| b.c_of(order[0]).unwrap().is_zero()).count() as u64;
    if s1 * g_tau != g_sigma {
        return Err(Error::Internal(format!(
            "s1 * |G_tau| = {s1} * {g_tau} differs from |G_sigma| = {g_sigma}"
        )));
    }
    Ok(FlagData {
        order,
        cone_idx,
        s1,
        g_tau,
        g_sigma,
        opposite,
    })
}

/// `D_i^vee` for an extra vector `b_i`, in `L_Q` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingDegree {
    pub cone_idx: usize,
    pub beta: Vec<Rational>,
}

pub fn leading_degree(fan: &StackyFan, charge: &ChargeMatrix, i: usize) -> Result<LeadingDegree> {
    if !fan.is_extra(i) {
        return Err(Error::InvalidFan(format!("b_{} is not an extra vector", i + 1)));
    }
    let (cone_idx, coords) = fan
        .containing_cone(i)
        .ok_or_else(|| Error::InvalidFan(format!("b_{} lies in no cone", i + 1)))?;
    let chart = ConeChart::new(fan, charge, cone_idx)?;
    let a = chart.anticone_position(i).expect("extra vectors lie in every anti-cone");
    let beta = chart.dual[a].clone();
    for j in 0..fan.r() {
        let expect = if j == i {
            int(1)
        } else if let Some(p) = chart.cone.iter().position(|x| *x == j) {
            -coords[p].clone()
        } else {
            Rational::zero()
        };
        if charge.pair(j, &beta) != expect {
            return Err(Error::Internal(format!("D^vee pairing with D_{} is off", j + 1)));
        }
    }
    Ok(LeadingDegree { cone_idx, beta })
}

/// Whether the support of the fan is the convex cone spanned by all `b_i`.
pub fn semiprojectivity_check(fan: &StackyFan) -> bool {
    for (ci, c) in fan.cones().iter().enumerate() {
        for skip in 0..3 {
            let face: Vec<usize> = (0..3).filter(|j| *j != skip).map(|j| c[j]).collect();
            let shared = fan
                .cones()
                .iter()
                .enumerate()
                .filter(|(cj, d)| *cj != ci && d.contains(&face[0]) && d.contains(&face[1]))
                .count();
            if shared > 0 {
                continue;
            }
            let normal = cross(fan.bar(face[0]), fan.bar(face[1]));
            let side = dot(normal, fan.bar(c[skip])).signum();
            if (0..fan.r()).any(|j| dot(normal, fan.bar(j)) * side < 0) {
                return false;
            }
        }
    }
    true
}

/// Exact rational determinant of a square matrix.
pub fn rat_det(a: &RatMatrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det *= &m[col][col];
        for i in col + 1..n {
            let f = &m[i][col] / &m[col][col];
            if !f.is_zero() {
                let pivot_row = m[col].clone();
                for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    det
}
