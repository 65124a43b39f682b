//! Cyclic reduction, conjugacy class keys, stable and pointed lengths, and
//! primitive roots.

use num_rational::Ratio;

use super::model::{Combine, Element, GroupModel, Letter};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    Identity,
    /// Nontrivial finite order (free products only); stable length 0.
    Torsion,
    /// Infinite order; acts loxodromically on the Cayley graph.
    Loxodromic,
}

/// Canonical data for a conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyRecord {
    /// Least rotation of the cyclically reduced core.
    pub canonical_rep: Element,
    pub kind: ClassKind,
    /// Stable length `τ[g]`.
    pub tau: usize,
    /// Minimal length over the class.
    pub pointed_length: usize,
    pub is_primitive: bool,
    /// Root of the canonical representative; the representative itself for
    /// identity and torsion classes.
    pub root: Element,
    pub exponent: usize,
}

/// Lexicographically least rotation offset (two-pointer minimum expression).
pub fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Smallest rotation period of a cyclic word: the least `p | n` with
/// `rotate(s, p) == s`. Computed from the prefix function.
pub fn rotation_period(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && s[i] != s[k] {
            k = pi[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

pub(crate) fn rotate(s: &[Letter], by: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(s.len());
    out.extend_from_slice(&s[by..]);
    out.extend_from_slice(&s[..by]);
    out
}

impl GroupModel {
    /// Splits `g = conjugator · core · conjugator⁻¹` with `core` cyclically
    /// reduced.
    pub fn cyclic_reduce(&self, g: &Element) -> (Element, Element) {
        let (core, conj) = self.cyclic_reduce_word(g.word());
        (self.element_unchecked(core), self.element_unchecked(conj))
    }

    pub(crate) fn cyclic_reduce_word(&self, w: &[Letter]) -> (Vec<Letter>, Vec<Letter>) {
        let (mut lo, mut hi) = (0usize, w.len());
        let mut conj = Vec::new();
        let mut merged = None;
        while hi - lo >= 2 {
            let (first, last) = (w[lo], w[hi - 1]);
            match self.combine(last, first) {
                Combine::Keep => break,
                Combine::Cancel => {
                    conj.push(first);
                    lo += 1;
                    hi -= 1;
                }
                Combine::Merge(z) => {
                    // first · (middle · z) · first⁻¹ = first · middle · last
                    conj.push(first);
                    lo += 1;
                    hi -= 1;
                    merged = Some(z);
                    break;
                }
            }
        }
        let mut core = w[lo..hi].to_vec();
        if let Some(z) = merged {
            core.push(z);
        }
        (core, conj)
    }

    /// Class kind of a cyclically reduced core.
    pub(crate) fn core_kind(&self, core: &[Letter]) -> ClassKind {
        match core.len() {
            0 => ClassKind::Identity,
            1 if !self.is_free() => ClassKind::Torsion,
            _ => ClassKind::Loxodromic,
        }
    }

    /// Stable length `τ[g]`: the cyclic core length for infinite-order
    /// elements, 0 otherwise.
    pub fn stable_length(&self, g: &Element) -> usize {
        let (core, _) = self.cyclic_reduce_word(g.word());
        match self.core_kind(&core) {
            ClassKind::Loxodromic => core.len(),
            _ => 0,
        }
    }

    pub fn is_torsion(&self, g: &Element) -> bool {
        let (core, _) = self.cyclic_reduce_word(g.word());
        self.core_kind(&core) != ClassKind::Loxodromic
    }

    /// `d(o, g^n o) / n`.
    pub fn stable_length_estimate(&self, g: &Element, n: u64) -> Result<Ratio<u64>> {
        if n == 0 {
            return Err(Error::Input("power must be at least 1".into()));
        }
        let gn = self.pow(g, n as i64);
        Ok(Ratio::new(gn.len() as u64, n))
    }

    /// Canonical record of the conjugacy class of `g`.
    pub fn conjugacy_canonical(&self, g: &Element) -> ConjugacyRecord {
        let (core, _) = self.cyclic_reduce_word(g.word());
        self.record_for_core(&core)
    }

    /// Record for a cyclically reduced core (any rotation).
    pub(crate) fn record_for_core(&self, core: &[Letter]) -> ConjugacyRecord {
        let kind = self.core_kind(core);
        let rep = rotate(core, least_rotation(core));
        let canonical_rep = self.element_unchecked(rep);
        match kind {
            ClassKind::Loxodromic => {
                let n = canonical_rep.len();
                let p = rotation_period(canonical_rep.word());
                ConjugacyRecord {
                    root: self.element_unchecked(canonical_rep.word()[..p].to_vec()),
                    canonical_rep,
                    kind,
                    tau: n,
                    pointed_length: n,
                    is_primitive: p == n,
                    exponent: n / p,
                }
            }
            _ => ConjugacyRecord {
                root: canonical_rep.clone(),
                pointed_length: canonical_rep.len(),
                canonical_rep,
                kind,
                tau: 0,
                is_primitive: false,
                exponent: 1,
            },
        }
    }

    /// True iff `g` and `h` are conjugate.
    pub fn are_conjugate(&self, g: &Element, h: &Element) -> bool {
        self.conjugacy_canonical(g).canonical_rep == self.conjugacy_canonical(h).canonical_rep
    }

    /// Primitive root `r` and exponent `k` with `r^k = g`.
    pub fn primitive_root(&self, g: &Element) -> Result<(Element, usize)> {
        let (core, conj) = self.cyclic_reduce_word(g.word());
        if self.core_kind(&core) != ClassKind::Loxodromic {
            return Err(Error::Domain(
                "identity and torsion elements have no primitive root".into(),
            ));
        }
        let p = rotation_period(&core);
        let c = self.element_unchecked(conj);
        let r = self.element_unchecked(core[..p].to_vec());
        Ok((self.conjugate(&c, &r), core.len() / p))
    }
}
