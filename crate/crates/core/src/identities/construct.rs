use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::expr::WordExpr;
use super::{Identity, Monoid};
use crate::error::{Error, Result};
use crate::scalar::lcm_upto;
use crate::words::{Letter, Word};

/// The two forms of the inductive step. `I` substitutes powers of `qr`;
/// `II` works from the common border `p` of `q = p q̂ p` and `r = p r̂ p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "i")]
    I,
    #[default]
    #[serde(rename = "ii")]
    II,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::I => "i",
            Variant::II => "ii",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "i" | "1" => Ok(Variant::I),
            "ii" | "2" => Ok(Variant::II),
            _ => Err(Error::Parse(format!("variant must be i or ii, got {s:?}"))),
        }
    }
}

/// An identity of upper-triangular matrices, either as a plain pair `(q, r)`
/// or as `(p q̂ p, p r̂ p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TriangularBase {
    Triple { p: Word, q_hat: Word, r_hat: Word },
    Pair { q: Word, r: Word },
}

impl TriangularBase {
    pub fn pair(&self) -> (Word, Word) {
        match self {
            TriangularBase::Pair { q, r } => (q.clone(), r.clone()),
            TriangularBase::Triple { p, q_hat, r_hat } => (p.concat(q_hat).concat(p), p.concat(r_hat).concat(p)),
        }
    }

    /// `(p, q̂, r̂)`; for a plain pair, `p` is the longest common border
    /// leaving both middles nonempty.
    pub fn triple(&self) -> Result<(Word, Word, Word)> {
        let (q, r) = match self {
            TriangularBase::Triple { p, q_hat, r_hat } => return Ok((p.clone(), q_hat.clone(), r_hat.clone())),
            TriangularBase::Pair { q, r } => (q.to_plain(), r.to_plain()),
        };
        let limit = (q.len().min(r.len()) - 1) / 2;
        for k in (1..=limit).rev() {
            let p = &q[..k];
            if r.starts_with(p) && q.ends_with(p) && r.ends_with(p) {
                let middle = |s: &str| s[k..s.len() - k].parse::<Word>();
                return Ok((p.parse()?, middle(&q)?, middle(&r)?));
            }
        }
        Err(Error::Precondition(format!("{q} and {r} have no common border p")))
    }

    pub fn identity(&self) -> Result<Identity> {
        let (q, r) = self.pair();
        Identity::new(q, r)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ConstructOptions {
    pub variant: Variant,
    /// Defaults to `(n-1)^2 + 1`, the least value the construction is proved for.
    pub t: Option<u64>,
    /// Defaults to `lcm(1..=n)`.
    pub nbar: Option<u64>,
    /// Accept `t` below the threshold (the result is then unproved).
    pub allow_below_threshold: bool,
}

pub fn t_threshold(n: usize) -> u64 {
    let m = n as u64 - 1;
    m * m + 1
}

fn resolve(n: usize, opts: &ConstructOptions) -> Result<(u64, u64)> {
    if n < 2 {
        return Err(Error::Precondition("the inductive step needs n >= 2".into()));
    }
    let threshold = t_threshold(n);
    let t = opts.t.unwrap_or(threshold);
    if t == 0 {
        return Err(Error::Precondition("t must be positive".into()));
    }
    if t < threshold && !opts.allow_below_threshold {
        return Err(Error::BelowThreshold { t, threshold });
    }
    let nbar = opts.nbar.unwrap_or_else(|| lcm_upto(n as u64));
    if nbar == 0 {
        return Err(Error::Precondition("nbar must be positive".into()));
    }
    Ok((t, nbar))
}

/// Builds an identity of `n×n` matrices from an identity `(u, v)` of
/// `(n-1)×(n-1)` matrices and an identity of `n×n` upper-triangular ones:
/// `(ua, va)` with `a ↦ X`, `b ↦ Y`.
pub fn construct_identity(
    n: usize,
    base_prev: &Identity,
    tri: &TriangularBase,
    opts: &ConstructOptions,
) -> Result<Identity> {
    let (t, nbar) = resolve(n, opts)?;
    if !base_prev.is_balanced() {
        return Err(Error::Precondition(format!("base identity {} = {} is not balanced", base_prev.u, base_prev.v)));
    }
    let lit = |w: Word| WordExpr::word(w);
    let align = |e: WordExpr| e.subst(lit(Word::letter_power(Letter::A, nbar)), lit(Word::letter_power(Letter::B, nbar)));
    let (x, y) = match opts.variant {
        Variant::I => {
            let (q, r) = tri.pair();
            let cycle = lit(q.concat(&r)).power(t);
            (align(cycle.clone()), align(WordExpr::concat(vec![cycle, lit(r)])))
        }
        Variant::II => {
            let (p, q_hat, r_hat) = tri.triple()?;
            let w = lit(Word::concat_all([&p, &q_hat, &p, &r_hat, &p])?).power(t);
            let x = WordExpr::concat(vec![w.clone(), lit(q_hat.concat(&p))]);
            let y = WordExpr::concat(vec![w, lit(r_hat.concat(&p))]);
            (align(x), align(y))
        }
    };
    let a = Word::letter(Letter::A);
    let big_u = lit(base_prev.u.concat(&a)).subst(x.clone(), y.clone());
    let big_v = lit(base_prev.v.concat(&a)).subst(x, y);
    for l in [Letter::A, Letter::B] {
        assert_eq!(big_u.count(l), big_v.count(l), "constructed identity is unbalanced");
    }
    let mut id = Identity::new(big_u.materialize(), big_v.materialize())?;
    id.monoid = Some(Monoid::Full(n));
    id.structure = Some(Arc::new((big_u, big_v)));
    Ok(id)
}

/// Inputs of [`construction_length`]. Letter counts are `b`-counts of the base
/// words `u`, `v` (before appending `a`); the optional counts of the
/// triangular words let the report carry the `b`-counts of the result, which
/// feeds the next level of the recursion.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthParams {
    pub n: usize,
    pub variant: Variant,
    pub t: u64,
    #[serde(default)]
    pub nbar: Option<u64>,
    pub len_u: u64,
    pub len_v: u64,
    pub b_count_u: u64,
    /// Defaults to `b_count_u`.
    #[serde(default)]
    pub b_count_v: Option<u64>,
    #[serde(default)]
    pub len_p: Option<u64>,
    #[serde(default)]
    pub len_q_hat: Option<u64>,
    #[serde(default)]
    pub len_r_hat: Option<u64>,
    #[serde(default)]
    pub len_q: Option<u64>,
    #[serde(default)]
    pub len_r: Option<u64>,
    #[serde(default)]
    pub b_count_p: Option<u64>,
    #[serde(default)]
    pub b_count_q_hat: Option<u64>,
    #[serde(default)]
    pub b_count_r_hat: Option<u64>,
    #[serde(default)]
    pub b_count_q: Option<u64>,
    #[serde(default)]
    pub b_count_r: Option<u64>,
}

impl LengthParams {
    /// Parameters read off actual words.
    pub fn from_words(
        n: usize,
        base_prev: &Identity,
        tri: &TriangularBase,
        opts: &ConstructOptions,
    ) -> Result<LengthParams> {
        let (t, nbar) = resolve(n, opts)?;
        let b = |w: &Word| w.count(Letter::B);
        let mut params = LengthParams {
            n,
            variant: opts.variant,
            t,
            nbar: Some(nbar),
            len_u: base_prev.u.len(),
            len_v: base_prev.v.len(),
            b_count_u: b(&base_prev.u),
            b_count_v: Some(b(&base_prev.v)),
            ..LengthParams::default()
        };
        let (q, r) = tri.pair();
        (params.len_q, params.len_r, params.b_count_q, params.b_count_r) = (Some(q.len()), Some(r.len()), Some(b(&q)), Some(b(&r)));
        if let Ok((p, q_hat, r_hat)) = tri.triple() {
            (params.len_p, params.len_q_hat, params.len_r_hat) = (Some(p.len()), Some(q_hat.len()), Some(r_hat.len()));
            (params.b_count_p, params.b_count_q_hat, params.b_count_r_hat) = (Some(b(&p)), Some(b(&q_hat)), Some(b(&r_hat)));
        }
        Ok(params)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthReport {
    pub len_x: u128,
    pub len_y: u128,
    pub len_u: u128,
    pub len_v: u128,
    /// `max(len_u, len_v)`.
    pub length: u128,
    pub b_count_u: Option<u128>,
    pub b_count_v: Option<u128>,
}

/// Length and `b`-count of a word; the count may be unknown.
#[derive(Clone, Copy, Debug)]
struct Tally {
    len: u128,
    b: Option<u128>,
}

fn overflow() -> Error {
    Error::Precondition("construction length overflows 128 bits".into())
}

fn mul(x: u128, y: u128) -> Result<u128> {
    x.checked_mul(y).ok_or_else(overflow)
}

fn add(x: u128, y: u128) -> Result<u128> {
    x.checked_add(y).ok_or_else(overflow)
}

impl Tally {
    fn new(len: u64, b: Option<u64>) -> Result<Tally> {
        if let Some(b) = b {
            if b > len {
                return Err(Error::Precondition(format!("b-count {b} exceeds length {len}")));
            }
        }
        Ok(Tally { len: len as u128, b: b.map(u128::from) })
    }

    fn cat(self, other: Tally) -> Result<Tally> {
        let b = match (self.b, other.b) {
            (Some(x), Some(y)) => Some(add(x, y)?),
            _ => None,
        };
        Ok(Tally { len: add(self.len, other.len)?, b })
    }

    fn times(self, k: u64) -> Result<Tally> {
        Ok(Tally { len: mul(self.len, k as u128)?, b: self.b.map(|b| mul(b, k as u128)).transpose()? })
    }

    /// `self` with `a ↦ x`, `b ↦ y`; needs the `b`-count of `self`.
    fn subst(self, x: Tally, y: Tally) -> Result<Tally> {
        let nb = self.b.expect("outer b-count known");
        let na = self.len - nb;
        let b = match (x.b, y.b) {
            (Some(xb), Some(yb)) => Some(add(mul(na, xb)?, mul(nb, yb)?)?),
            _ => None,
        };
        Ok(Tally { len: add(mul(na, x.len)?, mul(nb, y.len)?)?, b })
    }
}

/// Lengths of the constructed words by letter-count arithmetic alone.
pub fn construction_length(params: &LengthParams) -> Result<LengthReport> {
    let n = params.n;
    let opts = ConstructOptions { variant: params.variant, t: Some(params.t), nbar: params.nbar, allow_below_threshold: true };
    let (t, nbar) = resolve(n, &opts)?;
    let triple = match (params.len_p, params.len_q_hat, params.len_r_hat) {
        (Some(p), Some(qh), Some(rh)) => Some((
            Tally::new(p, params.b_count_p)?,
            Tally::new(qh, params.b_count_q_hat)?,
            Tally::new(rh, params.b_count_r_hat)?,
        )),
        _ => None,
    };
    let (x, y) = match params.variant {
        Variant::I => {
            let from_triple = triple.map(|(p, qh, rh)| -> Result<_> { Ok((p.cat(qh)?.cat(p)?, p.cat(rh)?.cat(p)?)) }).transpose()?;
            let direct = match (params.len_q, params.len_r) {
                (Some(q), Some(r)) => Some((Tally::new(q, params.b_count_q)?, Tally::new(r, params.b_count_r)?)),
                _ => None,
            };
            let (q, r) = match (direct, from_triple) {
                (Some(d), Some(f)) if (d.0.len, d.1.len) != (f.0.len, f.1.len) => {
                    return Err(Error::Precondition("len_q/len_r disagree with p, q_hat, r_hat".into()))
                }
                (Some(d), _) => d,
                (None, Some(f)) => f,
                (None, None) => {
                    return Err(Error::Precondition("variant i needs len_q and len_r, or len_p, len_q_hat and len_r_hat".into()))
                }
            };
            let cycle = q.cat(r)?.times(t)?;
            (cycle.times(nbar)?, cycle.cat(r)?.times(nbar)?)
        }
        Variant::II => {
            let (p, qh, rh) = match triple {
                Some(tr) => tr,
                None => return Err(Error::Precondition("variant ii needs len_p, len_q_hat and len_r_hat".into())),
            };
            let w = p.cat(qh)?.cat(p)?.cat(rh)?.cat(p)?.times(t)?;
            (w.cat(qh)?.cat(p)?.times(nbar)?, w.cat(rh)?.cat(p)?.times(nbar)?)
        }
    };
    let a = Tally { len: 1, b: Some(0) };
    let ua = Tally::new(params.len_u, Some(params.b_count_u))?.cat(a)?;
    let va = Tally::new(params.len_v, Some(params.b_count_v.unwrap_or(params.b_count_u)))?.cat(a)?;
    let big_u = ua.subst(x, y)?;
    let big_v = va.subst(x, y)?;
    Ok(LengthReport {
        len_x: x.len,
        len_y: y.len,
        len_u: big_u.len,
        len_v: big_v.len,
        length: big_u.len.max(big_v.len),
        b_count_u: big_u.b,
        b_count_v: big_v.b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn small_variant_i_example() {
        let base = Identity::parse("ab", "ba").unwrap();
        let tri = TriangularBase::Pair { q: w("a"), r: w("b") };
        let opts = ConstructOptions { variant: Variant::I, t: Some(2), nbar: Some(2), allow_below_threshold: false };
        let id = construct_identity(2, &base, &tri, &opts).unwrap();
        // X = ((ab)^2)[a^2, b^2], Y = ((ab)^2 b)[a^2, b^2]; ua = aba, va = baa.
        let x = w("a^2 b^2 a^2 b^2");
        let y = x.concat(&w("b^2"));
        assert_eq!(id.u, Word::concat_all([&x, &y, &x]).unwrap());
        assert_eq!(id.v, Word::concat_all([&y, &x, &x]).unwrap());
        assert_eq!((id.u.len(), id.v.len()), (26, 26));
        assert!(id.is_balanced());
        let r = construction_length(&LengthParams::from_words(2, &base, &tri, &opts).unwrap()).unwrap();
        assert_eq!((r.len_x, r.len_y, r.len_u, r.len_v), (8, 10, 26, 26));
        assert_eq!(r.b_count_u, Some(id.u.count(Letter::B) as u128));
    }

    #[test]
    fn threshold_is_enforced_unless_overridden() {
        let base = Identity::parse("ab", "ba").unwrap();
        let tri = TriangularBase::Pair { q: w("a"), r: w("b") };
        let mut opts = ConstructOptions { variant: Variant::I, t: Some(4), ..Default::default() };
        assert!(matches!(
            construct_identity(3, &base, &tri, &opts),
            Err(Error::BelowThreshold { t: 4, threshold: 5 })
        ));
        opts.allow_below_threshold = true;
        assert!(construct_identity(3, &base, &tri, &opts).is_ok());
        assert!(construct_identity(3, &Identity::parse("ab", "b").unwrap(), &tri, &opts).is_err());
    }

    #[test]
    fn border_split() {
        let tri = TriangularBase::Pair { q: w("abbaababba"), r: w("abbabaabba") };
        assert_eq!(tri.triple().unwrap(), (w("abba"), w("ab"), w("ba")));
        let t2 = TriangularBase::Triple { p: w("abba"), q_hat: w("ab"), r_hat: w("ba") };
        assert_eq!(t2.pair(), tri.pair());
        assert!(TriangularBase::Pair { q: w("ab"), r: w("ba") }.triple().is_err());
    }

    #[test]
    fn example_lengths() {
        let base = LengthParams {
            n: 3,
            t: 5,
            nbar: Some(6),
            len_u: 17,
            len_v: 17,
            b_count_u: 8,
            len_p: Some(10),
            len_q_hat: Some(2),
            len_r_hat: Some(2),
            ..Default::default()
        };
        let len = |variant, t| construction_length(&LengthParams { variant, t, ..base.clone() }).unwrap().length;
        assert_eq!(len(Variant::II, 5), 19_656);
        assert_eq!(len(Variant::I, 5), 24_816);
        assert_eq!(len(Variant::II, 1), 4_968);
        assert_eq!(len(Variant::I, 1), 5_808);
    }

    #[test]
    fn inconsistent_parameters() {
        let p = LengthParams { n: 3, t: 5, len_u: 3, len_v: 3, b_count_u: 4, len_q: Some(1), len_r: Some(1), variant: Variant::I, ..Default::default() };
        assert!(construction_length(&p).is_err());
        let p = LengthParams { b_count_u: 1, len_q: None, ..p };
        assert!(construction_length(&p).is_err());
        let p = LengthParams { len_q: Some(5), len_r: Some(5), len_p: Some(1), len_q_hat: Some(1), len_r_hat: Some(1), ..p };
        assert!(construction_length(&p).is_err());
    }
}
