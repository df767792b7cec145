use std::fmt;

/// A set of nodes (0-based) stored as a bitmask; supports up to 64 nodes.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(pub u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn full(d: usize) -> NodeSet {
        if d >= 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << d) - 1)
        }
    }

    pub fn singleton(i: usize) -> NodeSet {
        NodeSet(1u64 << i)
    }

    pub fn from_nodes<I: IntoIterator<Item = usize>>(nodes: I) -> NodeSet {
        NodeSet(nodes.into_iter().fold(0u64, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }
    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }
    pub fn with(self, i: usize) -> NodeSet {
        NodeSet(self.0 | 1u64 << i)
    }
    pub fn without(self, i: usize) -> NodeSet {
        NodeSet(self.0 & !(1u64 << i))
    }
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    pub fn union(self, o: NodeSet) -> NodeSet {
        NodeSet(self.0 | o.0)
    }
    pub fn intersection(self, o: NodeSet) -> NodeSet {
        NodeSet(self.0 & o.0)
    }
    pub fn difference(self, o: NodeSet) -> NodeSet {
        NodeSet(self.0 & !o.0)
    }
    pub fn is_subset(self, o: NodeSet) -> bool {
        self.0 & !o.0 == 0
    }
    pub fn is_disjoint(self, o: NodeSet) -> bool {
        self.0 & o.0 == 0
    }
    /// Lowest member, if any.
    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }
    pub fn iter(self) -> NodeIter {
        NodeIter(self.0)
    }
    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
    /// Members as 1-based labels.
    pub fn labels(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Ordering used for reports: by size, then lexicographically by members.
    pub fn canonical_cmp(&self, other: &NodeSet) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.to_vec().cmp(&other.to_vec()))
    }

    /// All subsets of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = NodeSet> {
        let m = self.0;
        let mut cur = Some(0u64);
        std::iter::from_fn(move || {
            let s = cur?;
            cur = if s == m { None } else { Some((s.wrapping_sub(m)) & m) };
            Some(NodeSet(s))
        })
    }
}

pub struct NodeIter(u64);

impl Iterator for NodeIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        NodeSet::from_nodes(iter)
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Displays 1-based labels, e.g. `{1,3,4}`.
impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

/// Serialized as the sorted list of 1-based labels.
impl serde::Serialize for NodeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for NodeSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(d)?;
        let mut s = NodeSet::EMPTY;
        for l in labels {
            if l == 0 || l > 64 {
                return Err(serde::de::Error::custom(format!("node label {l} outside 1..=64")));
            }
            s.insert(l - 1);
        }
        Ok(s)
    }
}
