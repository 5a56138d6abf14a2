//! Integer partitions, colour vectors and the coarsening relation.
//!
//! A [`Partition`] is kept in canonical form (parts weakly decreasing), so
//! structural equality is multiset equality. Text form everywhere is a
//! comma-separated list of positive integers in any order, e.g. `1,4,4`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition of `n`: a weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts in any order.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `1^n`, the partition into singletons.
    pub fn ones(n: u32) -> Self {
        Self { parts: vec![1; n as usize] }
    }

    /// Parts in weakly decreasing order.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn parts_count(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Entry `i` (1-based) counts the parts equal to `i`; length is the largest part.
    pub fn multiplicity_vector(&self) -> ColourVector {
        let len = self.parts.first().copied().unwrap_or(0) as usize;
        let mut counts = vec![0u32; len];
        for &p in &self.parts {
            counts[p as usize - 1] += 1;
        }
        ColourVector { counts }
    }

    /// `1^j λ`: adjoin `j` parts equal to one.
    pub fn prepend_ones(&self, j: u32) -> Self {
        let mut parts = self.parts.clone();
        parts.extend(std::iter::repeat(1).take(j as usize));
        Self { parts }
    }

    /// Number of parts equal to one.
    pub fn ones_count(&self) -> usize {
        self.parts.iter().rev().take_while(|&&p| p == 1).count()
    }

    /// Comma-separated form, ascending (`1,4,4`).
    pub fn to_csv(&self) -> String {
        let mut asc = self.parts.clone();
        asc.reverse();
        asc.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    /// Written ascending with `+`, e.g. `1+4+4`; the empty partition is `∅`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        let s = self.parts.iter().rev().map(u32::to_string).collect::<Vec<_>>();
        write!(f, "{}", s.join("+"))
    }
}

fn parse_csv(s: &str, allow_zero: bool) -> std::result::Result<Vec<u32>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: u32 = tok.parse().map_err(|_| format!("bad token {tok:?}"))?;
            if v == 0 && !allow_zero {
                return Err(format!("non-positive token {tok:?}"));
            }
            Ok(v)
        })
        .collect()
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts = parse_csv(s, false).map_err(Error::InvalidPartition)?;
        Self::new(parts)
    }
}

/// Colour counts `v(1), …, v(k)`; trailing zeros do not change the space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColourVector {
    counts: Vec<u32>,
}

impl ColourVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// ‖v‖.
    pub fn norm(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// `v(i)` with `i` 1-based.
    pub fn get(&self, colour: usize) -> Result<u32> {
        if colour == 0 || colour > self.counts.len() {
            return Err(Error::IndexOutOfBounds { index: colour, len: self.counts.len() });
        }
        Ok(self.counts[colour - 1])
    }

    /// `v + e_i`, extending with zeros when `i` is past the end.
    pub fn plus_unit(&self, colour: usize) -> Result<Self> {
        if colour == 0 {
            return Err(Error::IndexOutOfBounds { index: 0, len: self.counts.len() });
        }
        let mut counts = self.counts.clone();
        if counts.len() < colour {
            counts.resize(colour, 0);
        }
        counts[colour - 1] += 1;
        Ok(Self { counts })
    }

    /// Drops trailing zeros.
    pub fn trimmed(&self) -> Self {
        let mut counts = self.counts.clone();
        while counts.last() == Some(&0) {
            counts.pop();
        }
        Self { counts }
    }

    /// Sorted descending with zeros removed; equal spaces up to relabelling colours.
    pub fn canonical(&self) -> Self {
        let mut counts: Vec<u32> = self.counts.iter().copied().filter(|&c| c > 0).collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        Self { counts }
    }

    pub fn to_csv(&self) -> String {
        self.counts.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for ColourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_csv())
    }
}

impl FromStr for ColourVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_csv(s, true).map(Self::new).map_err(Error::InvalidColourVector)
    }
}

/// All partitions of `n` in lexicographic descending order (`[4], [3,1], [2,2], …`).
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Whether `coarse ≤ fine`: the parts of `fine` can be grouped into blocks
/// whose sums are exactly the parts of `coarse`.
pub fn is_subpartition(coarse: &Partition, fine: &Partition) -> Result<bool> {
    if coarse.total() != fine.total() {
        return Err(Error::MismatchedTotal { left: coarse.total(), right: fine.total() });
    }
    if coarse.parts_count() > fine.parts_count() {
        return Ok(false);
    }
    if coarse == fine {
        return Ok(true);
    }
    // Place parts of `fine` (largest first) into bins with the capacities of `coarse`.
    // Memo key: next item index plus the sorted multiset of remaining capacities.
    fn place(
        items: &[u32],
        idx: usize,
        caps: &mut Vec<u32>,
        memo: &mut HashMap<(usize, Vec<u32>), bool>,
    ) -> bool {
        if idx == items.len() {
            return caps.iter().all(|&c| c == 0);
        }
        let mut key_caps = caps.clone();
        key_caps.sort_unstable();
        let key = (idx, key_caps);
        if let Some(&hit) = memo.get(&key) {
            return hit;
        }
        let item = items[idx];
        let mut found = false;
        let mut tried: Vec<u32> = Vec::new();
        for b in 0..caps.len() {
            let c = caps[b];
            if c < item || tried.contains(&c) {
                continue;
            }
            tried.push(c);
            caps[b] -= item;
            let ok = place(items, idx + 1, caps, memo);
            caps[b] += item;
            if ok {
                found = true;
                break;
            }
        }
        memo.insert(key, found);
        found
    }
    let mut caps = coarse.parts.clone();
    let mut memo = HashMap::new();
    Ok(place(&fine.parts, 0, &mut caps, &mut memo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(4).len(), 5);
        assert_eq!(enumerate_partitions(7).len(), 15);
        let four: Vec<String> = enumerate_partitions(4).iter().map(|q| q.to_string()).collect();
        assert_eq!(four, ["4", "1+3", "2+2", "1+1+2", "1+1+1+1"]);
    }

    #[test]
    fn multiplicity_vectors() {
        assert_eq!(p("1,4,4").multiplicity_vector().counts(), &[1, 0, 0, 2]);
        assert!(Partition::empty().multiplicity_vector().is_empty());
        assert_eq!(p("1,1,1").multiplicity_vector().counts(), &[3]);
    }

    #[test]
    fn parts_counts() {
        assert_eq!(p("1,4,4").parts_count(), 3);
        assert_eq!(Partition::empty().parts_count(), 0);
        assert_eq!(p("2,2,3,4").parts_count(), 4);
    }

    #[test]
    fn subpartition_examples() {
        assert!(is_subpartition(&p("2,3,6"), &p("2,2,3,4")).unwrap());
        assert!(is_subpartition(&p("2,2,3,4"), &p("2,2,3,4")).unwrap());
        assert!(is_subpartition(&p("3,3"), &p("2,2,1,1")).unwrap());
        assert!(!is_subpartition(&p("1,2"), &p("3")).unwrap());
        assert!(!is_subpartition(&p("4,4"), &p("3,3,2")).unwrap());
        assert_eq!(
            is_subpartition(&p("3"), &p("1,1")),
            Err(Error::MismatchedTotal { left: 3, right: 2 })
        );
    }

    #[test]
    fn prepend_ones_examples() {
        assert_eq!(p("2").prepend_ones(3), p("1,1,1,2"));
        assert_eq!(p("1,4,4").prepend_ones(0), p("1,4,4"));
        assert_eq!(p("1,4,4").prepend_ones(2), p("1,1,1,4,4"));
    }

    #[test]
    fn parsing() {
        assert_eq!(p("4, 1,4").parts(), &[4, 4, 1]);
        assert!("1,0".parse::<Partition>().is_err());
        assert!("1,-2".parse::<Partition>().is_err());
        assert!("1,x".parse::<Partition>().is_err());
        assert!("1.5".parse::<Partition>().is_err());
        assert_eq!("".parse::<Partition>().unwrap(), Partition::empty());
        let v: ColourVector = "2,0,3".parse().unwrap();
        assert_eq!(v.norm(), 5);
        assert_eq!(v.canonical().counts(), &[3, 2]);
        assert_eq!(v.get(3).unwrap(), 3);
        assert!(v.get(4).is_err());
    }
}
