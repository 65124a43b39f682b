//! Bounded search for the finite data of the maximal elementary subgroup
//! `E(g)`: the finite kernel of `E⁺(g) → Z` and the index of `E⁺(g)`.

use super::model::{Element, GroupModel};
use crate::enumeration::enumerate_ball;
use crate::error::{Error, Result};
use crate::exec::ShardPlan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryGroupReport {
    /// Primitive root of `g`; generates the infinite cyclic direction.
    pub root_generator: Element,
    /// Finite-order elements commuting with a power of `g`, identity first.
    pub kernel_elements: Vec<Element>,
    /// `[E(g) : E⁺(g)]`.
    pub orientation_index: u8,
    /// Shortest element found reversing the axis orientation.
    pub flip: Option<Element>,
    pub search_radius: usize,
}

impl GroupModel {
    /// Searches `h` with `|h| <= search_radius` and `h g^n h⁻¹ = g^{±n}` for
    /// some `1 <= n <= search_radius`.
    pub fn elementary_subgroup(
        &self,
        g: &Element,
        search_radius: usize,
        plan: &ShardPlan,
    ) -> Result<ElementaryGroupReport> {
        if search_radius == 0 {
            return Err(Error::Input("search radius must be positive".into()));
        }
        let (root, _) = self.primitive_root(g)?;
        // The root has the same E(g), and its powers are shorter.
        let powers: Vec<(Element, Element)> = (1..=search_radius as i64)
            .map(|n| (self.pow(&root, n), self.pow(&root, -n)))
            .collect();
        let ball = enumerate_ball(self, search_radius, plan)?;
        let classified = plan.map(ball, |h| {
            let mut fixes = false;
            let mut flips = false;
            for (p, q) in &powers {
                let c = self.conjugate(&h, p);
                fixes |= &c == p;
                flips |= &c == q;
                if fixes || flips {
                    break;
                }
            }
            (h, fixes, flips)
        });
        let mut kernel = Vec::new();
        let mut flip = None;
        for (h, fixes, flips) in classified {
            if fixes && self.is_torsion(&h) {
                kernel.push(h);
            } else if flips && flip.is_none() {
                flip = Some(h);
            }
        }
        Ok(ElementaryGroupReport {
            root_generator: root,
            kernel_elements: kernel,
            orientation_index: if flip.is_some() { 2 } else { 1 },
            flip,
            search_radius,
        })
    }

    /// Membership of `h` in `E(r)` for a primitive loxodromic `r` with
    /// trivial kernel: `h r h⁻¹ = r^{±1}`.
    pub fn in_elementary(&self, root: &Element, h: &Element) -> bool {
        let c = self.conjugate(h, root);
        c == *root || c == self.inv(root)
    }
}
