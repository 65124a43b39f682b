//! Geodesic vertex paths and periodic axis lines.

use crate::error::{Error, Result};
use crate::group::{ClassKind, Element, GroupModel, Letter};

/// The unique geodesic from `start·o` to `start·word·o`, for a normal-form
/// `word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicPath {
    pub start: Element,
    pub word: Vec<Letter>,
}

impl GeodesicPath {
    /// `[o, g·o]`.
    pub fn from_origin(model: &GroupModel, g: &Element) -> Self {
        GeodesicPath {
            start: model.identity(),
            word: g.word().to_vec(),
        }
    }

    /// `[x·o, y·o]`.
    pub fn between(model: &GroupModel, x: &Element, y: &Element) -> Self {
        GeodesicPath {
            start: x.clone(),
            word: model.mul_words(&model.inv_word(x.word()), y.word()),
        }
    }

    /// Reconstructs the path through `vertices`, which must be consecutive
    /// vertices of a geodesic.
    pub fn from_vertices(model: &GroupModel, vertices: &[Element]) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Input("a path needs at least one vertex".into()));
        };
        let last = vertices.last().unwrap_or(first);
        let path = Self::between(model, first, last);
        if path.word.len() + 1 != vertices.len() || path.vertices(model) != vertices {
            return Err(Error::Input("vertices do not form a geodesic".into()));
        }
        Ok(path)
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn vertex(&self, model: &GroupModel, k: usize) -> Element {
        model.element_unchecked(model.mul_words(self.start.word(), &self.word[..k]))
    }

    pub fn vertices(&self, model: &GroupModel) -> Vec<Element> {
        (0..=self.word.len())
            .map(|k| self.vertex(model, k))
            .collect()
    }

    pub fn end(&self, model: &GroupModel) -> Element {
        self.vertex(model, self.word.len())
    }

    /// Left translate `g·path`.
    pub fn translate(&self, model: &GroupModel, g: &Element) -> Self {
        GeodesicPath {
            start: model.mul(g, &self.start),
            word: self.word.clone(),
        }
    }
}

/// True iff consecutive vertices are adjacent and the path length equals the
/// distance between its endpoints.
pub fn is_geodesic_vertex_path(model: &GroupModel, vertices: &[Element]) -> bool {
    match (vertices.first(), vertices.last()) {
        (Some(a), Some(b)) => {
            vertices
                .windows(2)
                .all(|w| model.distance(&w[0], &w[1]) == 1)
                && model.distance(a, b) + 1 == vertices.len()
        }
        _ => false,
    }
}

/// The bi-infinite geodesic through `{g^k·o}` shifted by the conjugator:
/// vertices `ℓ(j) = c·core^q·core[..r]` for `j = q·τ + r`, where
/// `g = c·core·c⁻¹` with `core` cyclically reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisLine {
    pub conjugator: Vec<Letter>,
    pub core: Vec<Letter>,
}

impl AxisLine {
    pub fn of(model: &GroupModel, g: &Element) -> Result<Self> {
        let (core, conjugator) = model.cyclic_reduce_word(g.word());
        if model.core_kind(&core) != ClassKind::Loxodromic {
            return Err(Error::Domain(format!(
                "{} has finite order and no axis",
                model.format(g)
            )));
        }
        Ok(AxisLine { conjugator, core })
    }

    /// Translation length `τ[g]`.
    pub fn period(&self) -> usize {
        self.core.len()
    }

    fn core_power(&self, model: &GroupModel, q: i64) -> Vec<Letter> {
        let piece = if q >= 0 {
            self.core.clone()
        } else {
            model.inv_word(&self.core)
        };
        let mut w = Vec::with_capacity(piece.len() * q.unsigned_abs() as usize);
        for _ in 0..q.unsigned_abs() {
            w.extend_from_slice(&piece);
        }
        w
    }

    pub fn vertex(&self, model: &GroupModel, j: i64) -> Element {
        let t = self.period() as i64;
        let (q, r) = (j.div_euclid(t), j.rem_euclid(t) as usize);
        let w = model.mul_words(&self.core_power(model, q), &self.core[..r]);
        model.element_unchecked(model.mul_words(&self.conjugator, &w))
    }

    /// The segment `ℓ(lo) … ℓ(hi)` as a geodesic path.
    pub fn segment(&self, model: &GroupModel, lo: i64, hi: i64) -> GeodesicPath {
        let t = self.period() as i64;
        let mut word = Vec::with_capacity((hi - lo).max(0) as usize);
        for j in lo..hi {
            word.push(self.core[j.rem_euclid(t) as usize]);
        }
        GeodesicPath {
            start: self.vertex(model, lo),
            word,
        }
    }
}
