use fixedbitset::FixedBitSet;

/// A binary relation on `0..n`, stored as one successor bitset per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        Relation {
            rows: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
        }
    }

    pub fn identity(n: usize) -> Relation {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.rows[i].insert(i);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Relation {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn successors(&self, a: usize) -> &FixedBitSet {
        &self.rows[a]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.ones().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_clear())
    }

    /// Relational composition: `(a, c)` iff `(a, b) ∈ self` and `(b, c) ∈ other`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let n = self.size();
        let mut out = Relation::empty(n);
        for a in 0..n {
            for b in self.rows[a].ones() {
                out.rows[a].union_with(&other.rows[b]);
            }
        }
        out
    }

    /// `self^k`, with `self^0` the identity.
    pub fn power(&self, k: usize) -> Relation {
        let mut acc = Relation::identity(self.size());
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    /// All powers `self^0 ..= self^max`.
    pub fn powers_up_to(&self, max: usize) -> Vec<Relation> {
        let mut out = Vec::with_capacity(max + 1);
        out.push(Relation::identity(self.size()));
        for k in 1..=max {
            let next = out[k - 1].compose(self);
            out.push(next);
        }
        out
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(b))
    }
}
