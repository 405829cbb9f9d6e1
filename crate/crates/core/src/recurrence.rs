//! Guessing linear recurrences with polynomial coefficients.
//!
//! The input is first normalized: leading zeros are trimmed and, when the
//! remaining non-zero terms all sit on a progression `shift + stride*k`
//! (binary trees only have odd sizes, say), the sequence is read along it.
//! A candidate of order `r` and degree `d` has unknown coefficients
//! `p_i(n) = Σ_j c_{i,j} n^j`; every index `n >= r` of the normalized
//! sequence contributes one linear equation `Σ_i p_i(n) u(n-i) = 0`.
//! Candidates are tried by increasing order, then degree; the first whose
//! exact rational null space holds a vector with `p_0 != 0` wins.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::counter::series;
use crate::error::{Error, Result};
use crate::grammar::{Mode, SpecSystem};

/// `Σ_{i=0..order} p_i(n) u(n - i) = 0` for every `n >= order`, where
/// `u(k)` is term `shift + stride*k` of the sequence it was guessed from and
/// every other term is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    /// `coeffs[i][j]` is the coefficient of `n^j` in `p_i`.
    pub coeffs: Vec<Vec<BigInt>>,
    /// Number of leading zero terms skipped before `u(0)`.
    pub shift: usize,
    /// Spacing of the non-zero terms; 1 unless the support is periodic.
    pub stride: usize,
}

impl Recurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(|p| p.iter().rposition(|c| !c.is_zero()))
            .max()
            .unwrap_or(0)
    }

    /// `p_i(n)`.
    pub fn eval(&self, i: usize, n: usize) -> BigInt {
        let n = BigInt::from(n);
        self.coeffs[i].iter().rev().fold(BigInt::zero(), |acc, c| acc * &n + c)
    }

    /// Whether `terms` holds no index where the relation applies.
    pub fn is_vacuous_on(&self, len: usize) -> bool {
        progression_len(len, self.shift, self.stride) <= self.order()
    }

    /// Size of the structures counted by `u(k)`.
    pub fn size_of_index(&self, k: usize) -> usize {
        self.shift + self.stride * k
    }
}

/// How many of `0..len` lie on `shift + stride*k`.
fn progression_len(len: usize, shift: usize, stride: usize) -> usize {
    if len <= shift {
        0
    } else {
        (len - shift - 1) / stride + 1
    }
}

/// Minimum number of input terms [`guess_recurrence`] asks for, given the
/// bounds.
pub fn terms_needed(max_order: usize, max_degree: usize) -> usize {
    candidate_needs(max_order, max_degree)
}

/// Normalized terms needed to decide one candidate: enough equations to pin
/// the `(r+1)(d+1)` unknowns plus a holdout of `2(r+d)` checks.
fn candidate_needs(order: usize, degree: usize) -> usize {
    (order + 1) * (degree + 1) + order + 2 * (order + degree)
}

/// Finds the recurrence of least order, then least degree, satisfied by all
/// of `terms`. `Ok(None)` means no candidate within the bounds fits.
///
/// Reading along a stride leaves fewer terms than were given; if some
/// candidate ahead of any fit cannot be decided with what is left, the
/// result is an insufficient-terms error rather than a weaker answer.
pub fn guess_recurrence(terms: &[BigInt], max_order: usize, max_degree: usize) -> Result<Option<Recurrence>> {
    let needed = terms_needed(max_order, max_degree);
    if terms.len() < needed {
        return Err(Error::InsufficientTerms { needed, got: terms.len() });
    }
    let shift = terms.iter().take_while(|t| t.is_zero()).count();
    let stride = terms
        .iter()
        .enumerate()
        .skip(shift + 1)
        .filter(|(_, t)| !t.is_zero())
        .fold(0usize, |g, (i, _)| g.gcd(&(i - shift)))
        .max(1);
    let u: Vec<BigInt> = terms.iter().skip(shift).step_by(stride).cloned().collect();
    for order in 1..=max_order {
        for degree in 0..=max_degree {
            let want = candidate_needs(order, degree);
            if u.len() < want {
                let needed = shift + stride * (want - 1) + 1;
                return Err(Error::InsufficientTerms { needed, got: terms.len() });
            }
            if let Some(coeffs) = solve(&u, order, degree) {
                return Ok(Some(Recurrence { coeffs, shift, stride }));
            }
        }
    }
    Ok(None)
}

fn solve(u: &[BigInt], order: usize, degree: usize) -> Option<Vec<Vec<BigInt>>> {
    let width = degree + 1;
    let cols = (order + 1) * width;
    let mut rows: Vec<Vec<BigRational>> = (order..u.len())
        .map(|n| {
            let mut row = Vec::with_capacity(cols);
            for i in 0..=order {
                let mut power = BigInt::one();
                for _ in 0..width {
                    row.push(BigRational::from_integer(&power * &u[n - i]));
                    power *= BigInt::from(n);
                }
            }
            row
        })
        .collect();
    let pivots = reduce(&mut rows, cols);
    let mut best: Option<Vec<BigInt>> = None;
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -rows[row][free].clone();
        }
        let Some(ints) = normalize(&v, width) else { continue };
        if best.as_ref().is_none_or(|b| ints < *b) {
            best = Some(ints);
        }
    }
    best.map(|flat| flat.chunks(width).map(<[BigInt]>::to_vec).collect())
}

/// Reduced row echelon form in place; returns the pivot column of each
/// leading row.
fn reduce(rows: &mut Vec<Vec<BigRational>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Integer vector with content 1 and positive leading coefficient of `p_0`;
/// `None` when `p_0` vanishes.
fn normalize(v: &[BigRational], width: usize) -> Option<Vec<BigInt>> {
    let lead = v[..width].iter().rposition(|x| !x.is_zero())?;
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sign = if ints[lead].is_negative() { -BigInt::one() } else { BigInt::one() };
    let scale = content * sign;
    for x in ints.iter_mut() {
        *x = &*x / &scale;
    }
    Some(ints)
}

/// Whether `rec` holds at every applicable index of `terms` and every term
/// off its progression is zero; the relation part is vacuously true when no
/// index applies.
pub fn verify(rec: &Recurrence, terms: &[BigInt]) -> bool {
    let off_progression_zero = terms
        .iter()
        .enumerate()
        .all(|(i, t)| t.is_zero() || (i >= rec.shift && (i - rec.shift).is_multiple_of(rec.stride)));
    if !off_progression_zero {
        return false;
    }
    if rec.is_vacuous_on(terms.len()) {
        return true;
    }
    let u: Vec<&BigInt> = terms.iter().skip(rec.shift).step_by(rec.stride).collect();
    (rec.order()..u.len()).all(|n| {
        (0..=rec.order())
            .map(|i| rec.eval(i, n) * u[n - i])
            .sum::<BigInt>()
            .is_zero()
    })
}

/// Counts at sizes `0..=upto`, guessed and then checked on every term.
pub fn recurrence_for(sys: &SpecSystem, class: &str, upto: usize, max_order: usize, max_degree: usize, mode: Mode) -> Result<Option<Recurrence>> {
    let terms: Vec<BigInt> = series(sys, class, upto, mode)?.into_iter().map(BigInt::from).collect();
    let rec = guess_recurrence(&terms, max_order, max_degree)?;
    if let Some(r) = &rec {
        assert!(verify(r, &terms), "guessed recurrence fails on its own input");
    }
    Ok(rec)
}

fn render_poly(q: &[BigInt]) -> String {
    let mut out = String::new();
    for (j, c) in q.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let var = match j {
            0 => String::new(),
            1 => "n".to_string(),
            _ => format!("n^{j}"),
        };
        match (mag.is_one(), var.is_empty()) {
            (_, true) => out.push_str(&mag.to_string()),
            (true, false) => out.push_str(&var),
            (false, false) => out.push_str(&format!("{mag}*{var}")),
        }
    }
    out
}

impl fmt::Display for Recurrence {
    /// Each `p_i` is written as `±g*(q)` with `g` its integer content and `q`
    /// having a positive leading coefficient, e.g.
    /// `(n + 1)*u(n) - 2*(2*n - 1)*u(n - 1) = 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.coeffs.iter().enumerate() {
            let Some(lead) = p.iter().rposition(|c| !c.is_zero()) else { continue };
            let content = p.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            let negative = p[lead].is_negative();
            let q: Vec<BigInt> = p
                .iter()
                .map(|c| if negative { -c / &content } else { c / &content })
                .collect();
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let mut factors = Vec::new();
            if !content.is_one() {
                factors.push(content.to_string());
            }
            if lead > 0 || !q[0].is_one() {
                let text = render_poly(&q);
                let terms = q.iter().filter(|c| !c.is_zero()).count();
                factors.push(if terms > 1 { format!("({text})") } else { text });
            }
            factors.push(if i == 0 { "u(n)".to_string() } else { format!("u(n - {i})") });
            f.write_str(&factors.join("*"))?;
        }
        f.write_str(" = 0")
    }
}

/// Converts machine integers for callers holding small sequences.
pub fn big_terms<T: Into<BigInt> + Copy>(terms: &[T]) -> Vec<BigInt> {
    terms.iter().map(|&t| t.into()).collect()
}
