//! Two-leg ladder geometry.
//!
//! Sites are `(col, leg)` with `col` in `0..=P` and `leg` in `{0, 1}`. Links
//! point in `+x` along a leg or `+y` up a rung. Sites are visited column by
//! column, leg 0 before leg 1; this order is both the fermionic (Jordan-Wigner)
//! order and the order in which qubits are handed out. Each site's qubit is
//! followed by the qubits of the links starting at that site (rung first), so
//! matter and link qubits alternate along the register.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Site {
    pub col: usize,
    pub leg: usize,
}

impl Site {
    pub const fn new(col: usize, leg: usize) -> Self {
        Self { col, leg }
    }
}

impl From<(usize, usize)> for Site {
    fn from((col, leg): (usize, usize)) -> Self {
        Self { col, leg }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    Y,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Link {
    pub origin: Site,
    pub dir: Direction,
}

impl Link {
    pub fn target(&self) -> Site {
        match self.dir {
            Direction::X => Site::new(self.origin.col + 1, self.origin.leg),
            Direction::Y => Site::new(self.origin.col, self.origin.leg + 1),
        }
    }

    pub fn touches(&self, site: Site) -> bool {
        self.origin == site || self.target() == site
    }
}

#[derive(Clone, Debug)]
pub struct LadderLattice {
    n_plaquettes: usize,
    sites: Vec<Site>,
    links: Vec<Link>,
    /// Link indices `[bottom, left rung, right rung, top]` per plaquette.
    plaquettes: Vec<[usize; 4]>,
    site_qubits: Vec<usize>,
    link_qubits: Vec<usize>,
    fermion_order: Vec<usize>,
}

impl LadderLattice {
    pub fn build(n_plaquettes: usize) -> Result<Self> {
        if n_plaquettes < 1 {
            return Err(Error::InvalidArgument(
                "a ladder needs at least one plaquette".into(),
            ));
        }
        let cols = n_plaquettes + 1;
        let mut sites = Vec::with_capacity(2 * cols);
        let mut links = Vec::with_capacity(3 * n_plaquettes + 1);
        let mut site_qubits = Vec::with_capacity(2 * cols);
        let mut link_qubits = Vec::with_capacity(3 * n_plaquettes + 1);
        let mut next_qubit = 0;
        for col in 0..cols {
            for leg in 0..2 {
                let site = Site::new(col, leg);
                sites.push(site);
                site_qubits.push(next_qubit);
                next_qubit += 1;
                if leg == 0 {
                    links.push(Link {
                        origin: site,
                        dir: Direction::Y,
                    });
                    link_qubits.push(next_qubit);
                    next_qubit += 1;
                }
                if col + 1 < cols {
                    links.push(Link {
                        origin: site,
                        dir: Direction::X,
                    });
                    link_qubits.push(next_qubit);
                    next_qubit += 1;
                }
            }
        }
        let find = |origin: Site, dir: Direction| {
            links
                .iter()
                .position(|l| l.origin == origin && l.dir == dir)
                .expect("ladder link exists")
        };
        let plaquettes = (0..n_plaquettes)
            .map(|c| {
                [
                    find(Site::new(c, 0), Direction::X),
                    find(Site::new(c, 0), Direction::Y),
                    find(Site::new(c + 1, 0), Direction::Y),
                    find(Site::new(c, 1), Direction::X),
                ]
            })
            .collect();
        let fermion_order = (0..sites.len()).collect();
        Ok(Self {
            n_plaquettes,
            sites,
            links,
            plaquettes,
            site_qubits,
            link_qubits,
            fermion_order,
        })
    }

    pub fn n_plaquettes(&self) -> usize {
        self.n_plaquettes
    }

    pub fn n_qubits(&self) -> usize {
        self.sites.len() + self.links.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn plaquettes(&self) -> &[[usize; 4]] {
        &self.plaquettes
    }

    /// Site indices in Jordan-Wigner order.
    pub fn fermion_order(&self) -> &[usize] {
        &self.fermion_order
    }

    pub fn contains(&self, site: Site) -> bool {
        site.col <= self.n_plaquettes && site.leg < 2
    }

    pub fn site_index(&self, site: Site) -> Result<usize> {
        if !self.contains(site) {
            return Err(Error::OffLattice(site));
        }
        Ok(2 * site.col + site.leg)
    }

    pub fn qubit_of_site(&self, site: Site) -> Result<usize> {
        Ok(self.site_qubits[self.site_index(site)?])
    }

    pub fn qubit_of_link(&self, link: usize) -> usize {
        self.link_qubits[link]
    }

    /// Position of `site` in the fermionic order.
    pub fn fermion_rank(&self, site: Site) -> Result<usize> {
        let idx = self.site_index(site)?;
        Ok(self
            .fermion_order
            .iter()
            .position(|&s| s == idx)
            .expect("fermion order is a permutation"))
    }

    /// Bit mask of all matter qubits.
    pub fn matter_mask(&self) -> u64 {
        self.site_qubits.iter().fold(0, |m, &q| m | (1u64 << q))
    }

    /// Bit mask of all link qubits.
    pub fn link_mask(&self) -> u64 {
        self.link_qubits.iter().fold(0, |m, &q| m | (1u64 << q))
    }

    /// `(-1)^(col + leg)`.
    pub fn staggered_sign(&self, site: Site) -> Result<i8> {
        self.site_index(site)?;
        Ok(if (site.col + site.leg).is_multiple_of(2) {
            1
        } else {
            -1
        })
    }

    /// Indices of the links incident on `site`; links that would leave the
    /// ladder simply do not exist.
    pub fn links_of_site(&self, site: Site) -> Result<Vec<usize>> {
        self.site_index(site)?;
        Ok(self
            .links
            .iter()
            .enumerate()
            .filter(|(_, l)| l.touches(site))
            .map(|(i, _)| i)
            .collect())
    }

    /// Number of links on a shortest path between two sites.
    pub fn link_distance(&self, a: Site, b: Site) -> Result<usize> {
        let start = self.site_index(a)?;
        let goal = self.site_index(b)?;
        let mut dist = vec![usize::MAX; self.sites.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(cur) = queue.pop_front() {
            if cur == goal {
                return Ok(dist[cur]);
            }
            let here = self.sites[cur];
            for l in &self.links {
                let next = if l.origin == here {
                    l.target()
                } else if l.target() == here {
                    l.origin
                } else {
                    continue;
                };
                let ni = self.site_index(next)?;
                if dist[ni] == usize::MAX {
                    dist[ni] = dist[cur] + 1;
                    queue.push_back(ni);
                }
            }
        }
        Err(Error::Invariant("ladder graph is disconnected".into()))
    }

    /// JSON object mapping every qubit index to what it represents.
    pub fn layout_json(&self) -> Value {
        let mut entries: Vec<(usize, Value)> = Vec::with_capacity(self.n_qubits());
        for (site, &q) in self.sites.iter().zip(&self.site_qubits) {
            entries.push((q, json!({"kind": "site", "coord": [site.col, site.leg]})));
        }
        for (link, &q) in self.links.iter().zip(&self.link_qubits) {
            entries.push((
                q,
                json!({
                    "kind": "link",
                    "coord": [link.origin.col, link.origin.leg],
                    "direction": link.dir,
                }),
            ));
        }
        entries.sort_by_key(|(q, _)| *q);
        let map: Map<String, Value> = entries
            .into_iter()
            .map(|(q, v)| (q.to_string(), v))
            .collect();
        Value::Object(map)
    }
}

/// Placement of static charges: `q = -1` on charged sites, `+1` elsewhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StaticCharges {
    charged: BTreeSet<Site>,
}

impl StaticCharges {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(lattice: &LadderLattice, sites: &[Site]) -> Result<Self> {
        let mut charged = BTreeSet::new();
        for &s in sites {
            if !lattice.contains(s) {
                return Err(Error::OffLattice(s));
            }
            if !charged.insert(s) {
                return Err(Error::InvalidArgument(format!(
                    "site ({}, {}) carries more than one static charge",
                    s.col, s.leg
                )));
            }
        }
        Ok(Self { charged })
    }

    pub fn charged_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.charged.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.charged.is_empty()
    }

    pub fn q(&self, site: Site) -> i8 {
        if self.charged.contains(&site) {
            -1
        } else {
            1
        }
    }

    /// Target eigenvalue per site, in site-index order.
    pub fn targets(&self, lattice: &LadderLattice) -> Vec<i8> {
        lattice.sites().iter().map(|&s| self.q(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_ladder_formulas() {
        for p in 1..=8 {
            let lat = LadderLattice::build(p).unwrap();
            assert_eq!(lat.sites().len(), 2 * (p + 1));
            assert_eq!(lat.links().len(), 3 * p + 1);
            assert_eq!(lat.plaquettes().len(), p);
            assert_eq!(lat.n_qubits(), 5 * p + 3);
        }
        assert_eq!(LadderLattice::build(3).unwrap().n_qubits(), 18);
        assert_eq!(LadderLattice::build(4).unwrap().n_qubits(), 23);
        assert!(LadderLattice::build(0).is_err());
    }

    #[test]
    fn qubits_cover_register_once() {
        for p in 1..=6 {
            let lat = LadderLattice::build(p).unwrap();
            let mut seen = vec![false; lat.n_qubits()];
            for &s in lat.sites() {
                let q = lat.qubit_of_site(s).unwrap();
                assert!(!seen[q]);
                seen[q] = true;
            }
            for l in 0..lat.links().len() {
                let q = lat.qubit_of_link(l);
                assert!(!seen[q]);
                seen[q] = true;
            }
            assert!(seen.into_iter().all(|b| b));
            assert_eq!(lat.matter_mask() & lat.link_mask(), 0);
        }
    }

    #[test]
    fn layout_alternates_matter_and_links() {
        let lat = LadderLattice::build(1).unwrap();
        let kinds: Vec<String> = (0..8)
            .map(|q| {
                lat.layout_json()[q.to_string()]["kind"]
                    .as_str()
                    .unwrap()
                    .to_owned()
            })
            .collect();
        assert_eq!(
            kinds,
            ["site", "link", "link", "site", "link", "site", "link", "site"]
        );
    }

    #[test]
    fn plaquettes_are_closed_squares() {
        let lat = LadderLattice::build(4).unwrap();
        for plaq in lat.plaquettes() {
            let mut degree = std::collections::HashMap::new();
            for &l in plaq {
                let link = lat.links()[l];
                *degree.entry(link.origin).or_insert(0) += 1;
                *degree.entry(link.target()).or_insert(0) += 1;
            }
            assert_eq!(degree.len(), 4);
            assert!(degree.values().all(|&d| d == 2));
        }
    }

    #[test]
    fn staggered_signs() {
        let lat = LadderLattice::build(3).unwrap();
        assert_eq!(lat.staggered_sign(Site::new(0, 0)).unwrap(), 1);
        assert_eq!(lat.staggered_sign(Site::new(0, 1)).unwrap(), -1);
        assert_eq!(lat.staggered_sign(Site::new(2, 1)).unwrap(), -1);
        assert!(lat.staggered_sign(Site::new(4, 0)).is_err());
        assert!(lat.staggered_sign(Site::new(0, 2)).is_err());
    }

    #[test]
    fn incident_links() {
        let lat = LadderLattice::build(1).unwrap();
        let corner = lat.links_of_site(Site::new(0, 0)).unwrap();
        assert_eq!(corner.len(), 2);
        let dirs: BTreeSet<_> = corner
            .iter()
            .map(|&l| (lat.links()[l].origin, lat.links()[l].dir == Direction::X))
            .collect();
        assert!(dirs.contains(&(Site::new(0, 0), true)));
        assert!(dirs.contains(&(Site::new(0, 0), false)));
        let far = lat.links_of_site(Site::new(1, 1)).unwrap();
        assert_eq!(far.len(), 2);
        assert!(far
            .iter()
            .all(|&l| lat.links()[l].target() == Site::new(1, 1)));

        let lat2 = LadderLattice::build(2).unwrap();
        assert_eq!(lat2.links_of_site(Site::new(1, 0)).unwrap().len(), 3);
        for p in 1..=5 {
            let lat = LadderLattice::build(p).unwrap();
            for &s in lat.sites() {
                let corner = s.col == 0 || s.col == p;
                let expected = if corner { 2 } else { 3 };
                assert_eq!(lat.links_of_site(s).unwrap().len(), expected);
            }
        }
    }

    #[test]
    fn distances() {
        let lat = LadderLattice::build(3).unwrap();
        let o = Site::new(0, 0);
        assert_eq!(lat.link_distance(o, Site::new(1, 0)).unwrap(), 1);
        assert_eq!(lat.link_distance(o, Site::new(0, 1)).unwrap(), 1);
        assert_eq!(lat.link_distance(o, o).unwrap(), 0);
        assert_eq!(lat.link_distance(o, Site::new(3, 1)).unwrap(), 4);
        assert!(lat.link_distance(o, Site::new(5, 0)).is_err());
    }

    #[test]
    fn distance_is_a_metric() {
        for p in 1..=4 {
            let lat = LadderLattice::build(p).unwrap();
            let s = lat.sites();
            for &a in s {
                for &b in s {
                    let dab = lat.link_distance(a, b).unwrap();
                    assert_eq!(dab, lat.link_distance(b, a).unwrap());
                    assert_eq!(dab == 0, a == b);
                    // Manhattan distance on the ladder is the closed form.
                    assert_eq!(dab, a.col.abs_diff(b.col) + a.leg.abs_diff(b.leg));
                    for &c in s {
                        assert!(
                            lat.link_distance(a, c).unwrap()
                                <= dab + lat.link_distance(b, c).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn charges_validate() {
        let lat = LadderLattice::build(3).unwrap();
        assert!(StaticCharges::new(&lat, &[Site::new(5, 0)]).is_err());
        assert!(StaticCharges::new(&lat, &[Site::new(0, 0), Site::new(0, 0)]).is_err());
        let c = StaticCharges::new(&lat, &[Site::new(0, 0), Site::new(2, 0)]).unwrap();
        assert_eq!(c.q(Site::new(0, 0)), -1);
        assert_eq!(c.q(Site::new(1, 0)), 1);
        assert_eq!(c.targets(&lat).iter().filter(|&&q| q == -1).count(), 2);
    }
}
