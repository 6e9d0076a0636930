//! Sparse integer polynomials in a (Laurent), y, z and an idempotent w.
//!
//! Coefficients are arbitrary precision. Products reduce `w² = w`, so every
//! stored monomial has `w`-exponent 0 or 1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exponent vector. Field order gives the storage order; canonical output
/// order is the reverse (descending z, then w, then a, then y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono {
    pub ez: u32,
    pub ew: u8,
    pub ea: i32,
    pub ey: u32,
}

impl Mono {
    pub fn new(ea: i32, ey: u32, ez: u32, ew: u8) -> Self {
        assert!(ew <= 1, "w exponent must be reduced");
        Mono { ez, ew, ea, ey }
    }

    fn times(self, other: Mono) -> Mono {
        Mono {
            ez: self.ez + other.ez,
            ew: self.ew.max(other.ew),
            ea: self.ea + other.ea,
            ey: self.ey + other.ey,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has no unit normal form")]
    Zero,
}

/// `original = (-a)^shift * normalized`, with `normalized` having minimum
/// a-exponent zero.
/// `(z, w, y)` exponents shared by a group of terms.
type GroupKey = (u32, u8, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitNormalForm {
    pub normalized: Poly,
    pub shift: i32,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Poly::term(c, Mono::default())
    }

    pub fn term(c: impl Into<BigInt>, m: Mono) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c.into());
        p
    }

    pub fn a() -> Self {
        Poly::term(1, Mono::new(1, 0, 0, 0))
    }

    pub fn a_pow(e: i32) -> Self {
        Poly::term(1, Mono::new(e, 0, 0, 0))
    }

    pub fn y() -> Self {
        Poly::term(1, Mono::new(0, 1, 0, 0))
    }

    pub fn z() -> Self {
        Poly::term(1, Mono::new(0, 0, 1, 0))
    }

    pub fn w() -> Self {
        Poly::term(1, Mono::new(0, 0, 0, 1))
    }

    /// `a + 1 + a⁻¹`.
    pub fn sigma() -> Self {
        Poly::a() + Poly::one() + Poly::a_pow(-1)
    }

    /// The image of `y`, namely `-a - 2 - a⁻¹`.
    pub fn y_image() -> Self {
        -(Poly::a() + Poly::constant(2) + Poly::a_pow(-1))
    }

    /// Builds a Laurent polynomial in `a` from `(exponent, coefficient)` pairs.
    pub fn from_a_coeffs(coeffs: &[(i32, i64)]) -> Self {
        let mut p = Poly::zero();
        for &(e, c) in coeffs {
            p.add_term(Mono::new(e, 0, 0, 0), BigInt::from(c));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> BigInt {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn shift_a(&self, e: i32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (Mono { ea: m.ea + e, ..*m }, v.clone()))
                .collect(),
        }
    }

    /// Replaces `y` by `-a - 2 - a⁻¹`.
    pub fn subst_y(&self) -> Poly {
        let max_y = self.terms.keys().map(|m| m.ey).max().unwrap_or(0) as usize;
        let image = Poly::y_image();
        let mut powers = vec![Poly::one()];
        for i in 1..=max_y {
            let next = &powers[i - 1] * &image;
            powers.push(next);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let rest = Mono { ey: 0, ..*m };
            for (pm, pc) in &powers[m.ey as usize].terms {
                out.add_term(pm.times(rest), pc * c);
            }
        }
        out
    }

    /// Sets `z = 1` and `w = 1`.
    pub fn at_z1_w1(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(Mono { ez: 0, ew: 0, ..*m }, c.clone());
        }
        out
    }

    /// Exchanges `a` and `a⁻¹`.
    pub fn mirror(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (Mono { ea: -m.ea, ..*m }, v.clone()))
                .collect(),
        }
    }

    pub fn z_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.ez).max()
    }

    pub fn min_a_exp(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.ea).min()
    }

    pub fn max_a_exp(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.ea).max()
    }

    pub fn unit_normalize(&self) -> Result<UnitNormalForm, PolyError> {
        let m = self.min_a_exp().ok_or(PolyError::Zero)?;
        let mut normalized = self.shift_a(-m);
        if m.rem_euclid(2) == 1 {
            normalized = -normalized;
        }
        Ok(UnitNormalForm {
            normalized,
            shift: m,
        })
    }

    /// Equality up to a factor `(-a)^n`, and optionally up to `a ↔ a⁻¹`.
    pub fn equal_up_to_unit(&self, other: &Poly, allow_mirror: bool) -> bool {
        match (self.unit_normalize(), other.unit_normalize()) {
            (Err(_), Err(_)) => true,
            (Ok(p), Ok(q)) => {
                p.normalized == q.normalized
                    || (allow_mirror
                        && p.normalized == other.mirror().unit_normalize().unwrap().normalized)
            }
            _ => false,
        }
    }

    /// Coefficient of `z^ez w^ew y^ey` as a Laurent polynomial in `a`.
    pub fn a_part(&self, ez: u32, ew: u8, ey: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.ez == ez && m.ew == ew && m.ey == ey {
                out.add_term(Mono::new(m.ea, 0, 0, 0), c.clone());
            }
        }
        out
    }

    fn groups(&self) -> Vec<(GroupKey, Vec<(i32, BigInt)>)> {
        let mut groups: BTreeMap<GroupKey, Vec<(i32, BigInt)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            groups
                .entry((m.ez, m.ew, m.ey))
                .or_default()
                .push((m.ea, c.clone()));
        }
        groups
            .into_iter()
            .rev()
            .map(|(k, mut v)| {
                v.sort_by_key(|x| std::cmp::Reverse(x.0));
                (k, v)
            })
            .collect()
    }

    /// LaTeX rendering in canonical order.
    pub fn to_latex(&self) -> String {
        self.render(&Style::Latex)
    }

    /// Plain-text rendering in canonical order (also the `Display` form).
    pub fn to_plain(&self) -> String {
        self.render(&Style::Plain)
    }

    fn render(&self, style: &Style) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (gi, ((ez, ew, ey), coeffs)) in self.groups().into_iter().enumerate() {
            let factor = style.factor(ey, ez, ew);
            let (negative, body) = if coeffs.len() == 1 {
                let (ea, c) = &coeffs[0];
                (c.is_negative(), style.a_term(&c.abs(), *ea))
            } else {
                let lead_negative = coeffs[0].1.is_negative();
                let inner: Vec<(i32, BigInt)> = coeffs
                    .iter()
                    .map(|(e, c)| (*e, if lead_negative { -c } else { c.clone() }))
                    .collect();
                let needs_parens = !factor.is_empty();
                let mut s = String::new();
                for (i, (e, c)) in inner.iter().enumerate() {
                    if i > 0 {
                        s.push_str(if c.is_negative() { " - " } else { " + " });
                    }
                    s.push_str(&style.a_term(&c.abs(), *e));
                }
                if needs_parens {
                    (lead_negative, style.paren(&s))
                } else {
                    // Without a factor there is nothing to group; print terms
                    // directly with their own signs.
                    let mut s = String::new();
                    for (i, (e, c)) in coeffs.iter().enumerate() {
                        if i == 0 {
                            if c.is_negative() {
                                s.push('-');
                            }
                        } else {
                            s.push_str(if c.is_negative() { " - " } else { " + " });
                        }
                        s.push_str(&style.a_term(&c.abs(), *e));
                    }
                    if gi == 0 {
                        out.push_str(&s);
                    } else if let Some(rest) = s.strip_prefix('-') {
                        out.push_str(" - ");
                        out.push_str(rest);
                    } else {
                        out.push_str(" + ");
                        out.push_str(&s);
                    }
                    continue;
                }
            };
            let mut piece = body;
            if !factor.is_empty() {
                if piece == "1" {
                    piece = factor.clone();
                } else {
                    piece = format!("{piece}{}{factor}", style.times());
                }
            }
            if gi == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&piece);
        }
        out
    }

    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms()
            .map(|(m, c)| JsonTerm {
                ea: m.ea,
                ey: m.ey,
                ez: m.ez,
                ew: m.ew,
                coeff: c.to_string(),
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(m, c)| {
                    let coeff: serde_json::Number = c.to_string().parse().expect("integer literal");
                    serde_json::json!({ "ea": m.ea, "ey": m.ey, "ez": m.ez, "ew": m.ew, "coeff": coeff })
                })
                .collect(),
        )
    }

    /// Inverse of [`Poly::to_json`]; accepts coefficients as numbers or strings.
    pub fn from_json(v: &serde_json::Value) -> Option<Poly> {
        let mut p = Poly::zero();
        for t in v.as_array()? {
            let get = |k: &str| t.get(k)?.as_i64();
            let coeff: BigInt = match t.get("coeff")? {
                serde_json::Value::Number(n) => n.to_string().parse().ok()?,
                serde_json::Value::String(s) => s.parse().ok()?,
                _ => return None,
            };
            let ew = get("ew")?;
            if !(0..=1).contains(&ew) {
                return None;
            }
            let m = Mono::new(
                get("ea")?.to_i32()?,
                get("ey")?.to_u32()?,
                get("ez")?.to_u32()?,
                ew as u8,
            );
            p.add_term(m, coeff);
        }
        Some(p)
    }
}

/// Serializable term record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub ea: i32,
    pub ey: u32,
    pub ez: u32,
    pub ew: u8,
    pub coeff: String,
}

enum Style {
    Plain,
    Latex,
}

impl Style {
    fn times(&self) -> &'static str {
        match self {
            Style::Plain => "*",
            Style::Latex => "",
        }
    }

    fn paren(&self, s: &str) -> String {
        match self {
            Style::Plain => format!("({s})"),
            Style::Latex => format!("\\left({s}\\right)"),
        }
    }

    fn power(&self, var: &str, e: i64) -> String {
        match (self, e) {
            (_, 1) => var.to_string(),
            (Style::Plain, _) => format!("{var}^{e}"),
            (Style::Latex, _) if (0..10).contains(&e) => format!("{var}^{e}"),
            (Style::Latex, _) => format!("{var}^{{{e}}}"),
        }
    }

    fn factor(&self, ey: u32, ez: u32, ew: u8) -> String {
        let mut parts = Vec::new();
        if ey > 0 {
            parts.push(self.power("y", ey as i64));
        }
        if ez > 0 {
            parts.push(self.power("z", ez as i64));
        }
        if ew > 0 {
            parts.push("w".to_string());
        }
        parts.join(self.times())
    }

    /// `c·a^e` for `c > 0`.
    fn a_term(&self, c: &BigInt, e: i32) -> String {
        let var = if e == 0 {
            String::new()
        } else {
            self.power("a", e as i64)
        };
        match (c.is_one(), var.is_empty()) {
            (true, true) => "1".into(),
            (true, false) => var,
            (false, true) => c.to_string(),
            (false, false) => format!("{c}{}{var}", self.times()),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        *self += &rhs;
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.times(*m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}
