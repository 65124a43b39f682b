use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a generator in the model's ordered alphabet. The derived `Ord`
/// is the alphabet order used for canonical representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    /// Free group of the given rank on generators `a_i^{±1}`.
    Free { rank: usize },
    /// Free product of finite cyclic groups; every nontrivial factor element
    /// is a generator.
    FreeProduct { orders: Vec<u32> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LetterInfo {
    factor: u8,
    /// Free groups: +1 / -1. Free products: the exponent in `1..order`.
    power: i32,
}

/// Result of juxtaposing two letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// The pair is already reduced.
    Keep,
    /// The pair multiplies to the identity.
    Cancel,
    /// The pair collapses to a single letter of the same factor.
    Merge(Letter),
}

/// An exactly computable group acting on its Cayley graph with basepoint at
/// the identity vertex.
#[derive(Debug, Clone)]
pub struct GroupModel {
    kind: ModelKind,
    names: Vec<String>,
    letters: Vec<LetterInfo>,
    inverse: Vec<Letter>,
    /// `follow[x]` lists letters allowed after `x`; the last entry is for the
    /// empty word.
    follow: Vec<Vec<Letter>>,
    tag: u64,
}

impl PartialEq for GroupModel {
    fn eq(&self, other: &Self) -> bool {
        self.tag == other.tag && self.kind == other.kind && self.names == other.names
    }
}

impl Eq for GroupModel {}

fn default_names(count: usize) -> Vec<String> {
    (0..count)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

impl GroupModel {
    /// Free group of rank `rank >= 2`.
    pub fn free(rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(Error::Input(format!(
                "free group of rank {rank} is elementary; rank must be at least 2"
            )));
        }
        if rank > 26 {
            return Err(Error::Input("free group rank is limited to 26".into()));
        }
        Self::build(ModelKind::Free { rank }, default_names(rank))
    }

    /// Free product of cyclic groups of the given orders.
    pub fn free_product(orders: &[u32]) -> Result<Self> {
        if orders.len() < 2 {
            return Err(Error::Input(
                "a free product needs at least two factors".into(),
            ));
        }
        if orders.len() > 26 {
            return Err(Error::Input("at most 26 factors are supported".into()));
        }
        if let Some(m) = orders.iter().find(|&&m| m < 2) {
            return Err(Error::Input(format!("factor order {m} is below 2")));
        }
        if orders == [2, 2] {
            return Err(Error::Input(
                "Z/2 * Z/2 is virtually cyclic (elementary)".into(),
            ));
        }
        let total: u32 = orders.iter().map(|m| m - 1).sum();
        if total > 255 {
            return Err(Error::Input("alphabet exceeds 255 letters".into()));
        }
        Self::build(
            ModelKind::FreeProduct {
                orders: orders.to_vec(),
            },
            default_names(orders.len()),
        )
    }

    /// Builds a model from its kind, validating it as the constructors do.
    pub fn from_kind(kind: &ModelKind) -> Result<Self> {
        match kind {
            ModelKind::Free { rank } => Self::free(*rank),
            ModelKind::FreeProduct { orders } => Self::free_product(orders),
        }
    }

    /// Renames the generators (one name per free generator or factor). Names
    /// must be distinct single lowercase ASCII letters.
    pub fn with_alphabet<S: AsRef<str>>(self, names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.len() != self.factor_count() {
            return Err(Error::Input(format!(
                "expected {} generator names, got {}",
                self.factor_count(),
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = n.len() == 1 && n.as_bytes()[0].is_ascii_lowercase();
            if !ok {
                return Err(Error::Input(format!("invalid generator name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::Input(format!("duplicate generator name {n:?}")));
            }
        }
        Self::build(self.kind, names)
    }

    fn build(kind: ModelKind, names: Vec<String>) -> Result<Self> {
        let mut letters = Vec::new();
        let mut inverse = Vec::new();
        match &kind {
            ModelKind::Free { rank } => {
                for i in 0..*rank {
                    letters.push(LetterInfo {
                        factor: i as u8,
                        power: 1,
                    });
                    letters.push(LetterInfo {
                        factor: i as u8,
                        power: -1,
                    });
                    inverse.push(Letter((2 * i + 1) as u8));
                    inverse.push(Letter((2 * i) as u8));
                }
            }
            ModelKind::FreeProduct { orders } => {
                let mut offset = 0usize;
                for (i, &m) in orders.iter().enumerate() {
                    for p in 1..m {
                        letters.push(LetterInfo {
                            factor: i as u8,
                            power: p as i32,
                        });
                        inverse.push(Letter((offset + (m - p) as usize - 1) as u8));
                    }
                    offset += (m - 1) as usize;
                }
            }
        }
        let mut hasher = DefaultHasher::new();
        kind.hash(&mut hasher);
        names.hash(&mut hasher);
        let tag = hasher.finish();
        let mut model = GroupModel {
            kind,
            names,
            letters,
            inverse,
            follow: Vec::new(),
            tag,
        };
        let n = model.alphabet_len();
        let mut follow = Vec::with_capacity(n + 1);
        for x in 0..n {
            let x = Letter(x as u8);
            follow.push(
                model
                    .alphabet()
                    .filter(|&y| model.combine(x, y) == Combine::Keep)
                    .collect(),
            );
        }
        follow.push(model.alphabet().collect());
        model.follow = follow;
        Ok(model)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, ModelKind::Free { .. })
    }

    /// Number of free generators (free groups) or factors (free products).
    pub fn factor_count(&self) -> usize {
        match &self.kind {
            ModelKind::Free { rank } => *rank,
            ModelKind::FreeProduct { orders } => orders.len(),
        }
    }

    pub fn alphabet_len(&self) -> usize {
        self.letters.len()
    }

    /// Letters in alphabet order.
    pub fn alphabet(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.letters.len()).map(|i| Letter(i as u8))
    }

    #[inline]
    pub fn inverse(&self, x: Letter) -> Letter {
        self.inverse[x.index()]
    }

    #[inline]
    pub fn factor(&self, x: Letter) -> u8 {
        self.letters[x.index()].factor
    }

    /// Letters that may follow `last` in a normal form.
    #[inline]
    pub fn successors(&self, last: Option<Letter>) -> &[Letter] {
        match last {
            Some(x) => &self.follow[x.index()],
            None => &self.follow[self.letters.len()],
        }
    }

    #[inline]
    pub fn follows(&self, x: Letter, y: Letter) -> bool {
        self.combine(x, y) == Combine::Keep
    }

    #[inline]
    pub fn combine(&self, x: Letter, y: Letter) -> Combine {
        let (a, b) = (self.letters[x.index()], self.letters[y.index()]);
        if a.factor != b.factor {
            return Combine::Keep;
        }
        match &self.kind {
            ModelKind::Free { .. } => {
                if a.power == -b.power {
                    Combine::Cancel
                } else {
                    Combine::Keep
                }
            }
            ModelKind::FreeProduct { orders } => {
                let m = orders[a.factor as usize] as i32;
                let p = (a.power + b.power) % m;
                if p == 0 {
                    Combine::Cancel
                } else {
                    Combine::Merge(self.factor_letter(a.factor, p))
                }
            }
        }
    }

    fn factor_letter(&self, factor: u8, power: i32) -> Letter {
        let ModelKind::FreeProduct { orders } = &self.kind else {
            unreachable!("factor powers only exist in free products")
        };
        let offset: u32 = orders[..factor as usize].iter().map(|m| m - 1).sum();
        Letter((offset + power as u32 - 1) as u8)
    }

    /// True iff `word` is in normal form.
    pub fn is_normal(&self, word: &[Letter]) -> bool {
        word.iter().all(|x| x.index() < self.letters.len())
            && word.windows(2).all(|p| self.follows(p[0], p[1]))
    }

    /// Appends `x` to a normal-form word, reducing at the junction.
    #[inline]
    pub(crate) fn push_reduced(&self, word: &mut Vec<Letter>, x: Letter) {
        match word.last() {
            None => word.push(x),
            Some(&last) => match self.combine(last, x) {
                Combine::Keep => word.push(x),
                Combine::Cancel => {
                    word.pop();
                }
                Combine::Merge(z) => {
                    word.pop();
                    word.push(z);
                }
            },
        }
    }

    pub fn identity(&self) -> Element {
        Element {
            tag: self.tag,
            word: Vec::new(),
        }
    }

    /// Element for a single generator letter.
    pub fn generator(&self, x: Letter) -> Element {
        Element {
            tag: self.tag,
            word: vec![x],
        }
    }

    /// Reduces an arbitrary letter sequence to its normal form.
    pub fn normalize(&self, raw: &[Letter]) -> Result<Element> {
        let mut word = Vec::with_capacity(raw.len());
        for &x in raw {
            if x.index() >= self.letters.len() {
                return Err(Error::Input(format!("letter index {} out of range", x.0)));
            }
            self.push_reduced(&mut word, x);
        }
        Ok(Element {
            tag: self.tag,
            word,
        })
    }

    /// Wraps a word already known to be in normal form.
    pub(crate) fn element_unchecked(&self, word: Vec<Letter>) -> Element {
        debug_assert!(self.is_normal(&word));
        Element {
            tag: self.tag,
            word,
        }
    }

    /// Wraps a normal-form word, rejecting anything else.
    pub fn element(&self, word: Vec<Letter>) -> Result<Element> {
        if !self.is_normal(&word) {
            return Err(Error::Input("word is not in normal form".into()));
        }
        Ok(self.element_unchecked(word))
    }

    fn check(&self, g: &Element) -> Result<()> {
        if g.tag != self.tag {
            Err(Error::ModelMismatch)
        } else {
            Ok(())
        }
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn invert(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// Product of normal-form words.
    pub(crate) fn mul_words(&self, g: &[Letter], h: &[Letter]) -> Vec<Letter> {
        let mut word = Vec::with_capacity(g.len() + h.len());
        word.extend_from_slice(g);
        let mut rest = h.iter();
        for &x in rest.by_ref() {
            let before = word.len();
            self.push_reduced(&mut word, x);
            // Keep or Merge ends cancellation: the remainder is reduced.
            if word.len() >= before {
                break;
            }
        }
        word.extend(rest);
        word
    }

    pub(crate) fn inv_word(&self, g: &[Letter]) -> Vec<Letter> {
        g.iter().rev().map(|&x| self.inverse(x)).collect()
    }

    /// Unchecked product; both operands must come from this model.
    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        debug_assert!(g.tag == self.tag && h.tag == self.tag);
        self.element_unchecked(self.mul_words(&g.word, &h.word))
    }

    pub fn inv(&self, g: &Element) -> Element {
        self.element_unchecked(self.inv_word(&g.word))
    }

    /// `g^k` for any integer `k`.
    pub fn pow(&self, g: &Element, k: i64) -> Element {
        let base = if k < 0 { self.inv(g) } else { g.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// `t g t^{-1}`.
    pub fn conjugate(&self, t: &Element, g: &Element) -> Element {
        let tg = self.mul_words(&t.word, &g.word);
        let ti = self.inv_word(&t.word);
        self.element_unchecked(self.mul_words(&tg, &ti))
    }

    /// Word metric distance `d(p·o, q·o) = |p^{-1} q|` without allocation.
    #[inline]
    pub fn distance_words(&self, p: &[Letter], q: &[Letter]) -> usize {
        let k = p.iter().zip(q).take_while(|(x, y)| x == y).count();
        let (rp, rq) = (p.len() - k, q.len() - k);
        if rp > 0 && rq > 0 && !self.is_free() && self.factor(p[k]) == self.factor(q[k]) {
            rp + rq - 1
        } else {
            rp + rq
        }
    }

    pub fn distance(&self, p: &Element, q: &Element) -> usize {
        self.distance_words(&p.word, &q.word)
    }

    /// Vertices `o, …, g·o` of the unique geodesic from the basepoint.
    pub fn geodesic_vertices(&self, g: &Element) -> Vec<Element> {
        (0..=g.word.len())
            .map(|i| self.element_unchecked(g.word[..i].to_vec()))
            .collect()
    }

    fn letter_token(&self, x: Letter) -> String {
        let info = self.letters[x.index()];
        let name = &self.names[info.factor as usize];
        match (&self.kind, info.power) {
            (ModelKind::Free { .. }, 1) => name.clone(),
            (ModelKind::Free { .. }, _) => format!("{name}'"),
            (ModelKind::FreeProduct { .. }, 1) => name.clone(),
            (ModelKind::FreeProduct { .. }, p) => format!("{name}^{p}"),
        }
    }

    /// Space-separated ASCII rendering, e.g. `a b a'` or `s t^2`. The
    /// identity renders as `e`.
    pub fn format(&self, g: &Element) -> String {
        self.format_word(&g.word)
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "e".to_string();
        }
        word.iter()
            .map(|&x| self.letter_token(x))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn parse_token(&self, tok: &str, out: &mut Vec<Letter>) -> Result<()> {
        let bad = || Error::Input(format!("unknown token {tok:?}"));
        let mut chars = tok.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest: String = chars.collect();
        let factor = self
            .names
            .iter()
            .position(|n| n.starts_with(head))
            .ok_or_else(bad)? as u8;
        // Exponent relative to the generator: "'" and "⁻¹" invert, "^k" powers.
        let exponent: i64 = if rest.is_empty() {
            1
        } else if rest == "'" || rest == "⁻¹" {
            -1
        } else if let Some(k) = rest.strip_prefix('^') {
            if self.is_free() {
                return Err(Error::Input(format!(
                    "power token {tok:?} is only valid for free-product factors"
                )));
            }
            k.parse::<i64>().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        match &self.kind {
            ModelKind::Free { .. } => {
                let idx = 2 * factor + u8::from(exponent < 0);
                out.push(Letter(idx));
            }
            ModelKind::FreeProduct { orders } => {
                let m = orders[factor as usize] as i64;
                let p = exponent.rem_euclid(m);
                if p != 0 {
                    out.push(self.factor_letter(factor, p as i32));
                }
            }
        }
        Ok(())
    }

    /// Parses space-separated tokens (`a`, `a'`, `a⁻¹`, `t^2`) into normal
    /// form. `e` and the empty string denote the identity.
    pub fn parse(&self, text: &str) -> Result<Element> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "e" && !self.names.iter().any(|n| n == "e") {
                continue;
            }
            self.parse_token(tok, &mut raw)?;
        }
        self.normalize(&raw)
    }

    /// Random element: a uniform length in `0..=max_len`, then uniform
    /// normal-form letters.
    pub fn random_element<R: rand::Rng + ?Sized>(&self, max_len: usize, rng: &mut R) -> Element {
        let n = rng.gen_range(0..=max_len);
        let mut word: Vec<Letter> = Vec::with_capacity(n);
        for _ in 0..n {
            let next = self.successors(word.last().copied());
            word.push(next[rng.gen_range(0..next.len())]);
        }
        self.element_unchecked(word)
    }

    /// Human-readable model name such as `F_2` or `Z/2*Z/3`.
    pub fn display_name(&self) -> String {
        match &self.kind {
            ModelKind::Free { rank } => format!("F_{rank}"),
            ModelKind::FreeProduct { orders } => orders
                .iter()
                .map(|m| format!("Z/{m}"))
                .collect::<Vec<_>>()
                .join("*"),
        }
    }
}

/// A group element as a normal-form word. Its length is `d(o, g·o)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    tag: u64,
    word: Vec<Letter>,
}

impl Element {
    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn into_word(self) -> Vec<Letter> {
        self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    fn z2z3() -> GroupModel {
        GroupModel::free_product(&[2, 3])
            .unwrap()
            .with_alphabet(&["s", "t"])
            .unwrap()
    }

    #[test]
    fn normalize_free_cancellation() {
        let m = f2();
        let g = m.parse("a b b'").unwrap();
        assert_eq!(m.format(&g), "a");
        assert_eq!(g.len(), 1);
        assert!(m.parse("").unwrap().is_identity());
    }

    #[test]
    fn normalize_factor_arithmetic() {
        let m = z2z3();
        let g = m.parse("s t t").unwrap();
        assert_eq!(m.format(&g), "s t^2");
        assert_eq!(g.len(), 2);
        assert!(m.parse("t t t").unwrap().is_identity());
        assert_eq!(m.format(&m.parse("t'").unwrap()), "t^2");
    }

    #[test]
    fn unknown_letters_are_rejected() {
        assert!(matches!(f2().parse("a c"), Err(Error::Input(_))));
        assert!(matches!(f2().parse("a^2"), Err(Error::Input(_))));
        assert!(f2().normalize(&[Letter(9)]).is_err());
    }

    #[test]
    fn multiply_and_invert() {
        let m = f2();
        let ab = m.parse("a b").unwrap();
        let g = m.multiply(&ab, &m.parse("b' a").unwrap()).unwrap();
        assert_eq!(m.format(&g), "a a");
        assert_eq!(m.format(&m.invert(&ab).unwrap()), "b' a'");
        let p = z2z3();
        let t = p.parse("t").unwrap();
        assert!(p
            .multiply(&t, &p.parse("t^2").unwrap())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn model_mismatch_is_detected() {
        let (a, b) = (f2(), z2z3());
        let g = a.parse("a").unwrap();
        let h = b.parse("s").unwrap();
        assert_eq!(a.multiply(&g, &h), Err(Error::ModelMismatch));
    }

    #[test]
    fn geodesic_vertices_are_prefixes() {
        let m = f2();
        let g = m.parse("a b a b").unwrap();
        let v: Vec<String> = m
            .geodesic_vertices(&g)
            .iter()
            .map(|x| m.format(x))
            .collect();
        assert_eq!(v, ["e", "a", "a b", "a b a", "a b a b"]);
        assert_eq!(m.geodesic_vertices(&m.identity()).len(), 1);
        let p = z2z3();
        let v: Vec<String> = p
            .geodesic_vertices(&p.parse("s t^2").unwrap())
            .iter()
            .map(|x| p.format(x))
            .collect();
        assert_eq!(v, ["e", "s", "s t^2"]);
    }

    #[test]
    fn elementary_products_are_rejected() {
        assert!(GroupModel::free(1).is_err());
        assert!(GroupModel::free_product(&[2, 2]).is_err());
        assert!(GroupModel::free_product(&[3]).is_err());
        assert!(GroupModel::free_product(&[2, 2, 2]).is_ok());
    }

    #[test]
    fn distance_matches_word_length_of_quotient() {
        let p = z2z3();
        let x = p.parse("s t").unwrap();
        let y = p.parse("s t^2").unwrap();
        assert_eq!(p.distance(&x, &y), 1);
        assert_eq!(p.distance(&x, &y), p.mul(&p.inv(&x), &y).len());
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let m = f2();
        let g = m.parse("a b").unwrap();
        assert_eq!(m.format(&m.pow(&g, -2)), "b' a' b' a'");
        assert!(m.pow(&g, 0).is_identity());
    }
}
