use std::fmt;

/// A finite set of integers drawn from a dense range `[offset, offset + capacity)`.
///
/// Membership is a bitset, so removal is O(1) and iteration is in increasing
/// value order.
#[derive(Clone, PartialEq, Eq)]
pub struct Domain {
    offset: i32,
    capacity: u32,
    words: Vec<u64>,
    size: u32,
    initial_size: u32,
}

impl Domain {
    /// The full range `lo..=hi`.
    pub fn range(lo: i32, hi: i32) -> Self {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let capacity = (hi as i64 - lo as i64 + 1) as u32;
        let mut words = vec![u64::MAX; capacity.div_ceil(64) as usize];
        let tail = capacity % 64;
        if tail != 0 {
            *words.last_mut().unwrap() = (1u64 << tail) - 1;
        }
        Domain {
            offset: lo,
            capacity,
            words,
            size: capacity,
            initial_size: capacity,
        }
    }

    /// The set of the given values (duplicates are ignored).
    pub fn from_values(values: &[i32]) -> Self {
        let lo = *values.iter().min().expect("a domain needs at least one value");
        let hi = *values.iter().max().unwrap();
        let mut dom = Domain::range(lo, hi);
        dom.words.iter_mut().for_each(|w| *w = 0);
        dom.size = 0;
        for &v in values {
            let (w, b) = dom.slot(v).unwrap();
            if dom.words[w] & (1 << b) == 0 {
                dom.words[w] |= 1 << b;
                dom.size += 1;
            }
        }
        dom.initial_size = dom.size;
        dom
    }

    fn slot(&self, value: i32) -> Option<(usize, u32)> {
        let idx = value as i64 - self.offset as i64;
        if idx < 0 || idx >= self.capacity as i64 {
            return None;
        }
        Some(((idx / 64) as usize, (idx % 64) as u32))
    }

    pub fn contains(&self, value: i32) -> bool {
        self.slot(value)
            .is_some_and(|(w, b)| self.words[w] & (1 << b) != 0)
    }

    /// Removes `value`, returning whether it was present.
    pub(crate) fn remove(&mut self, value: i32) -> bool {
        match self.slot(value) {
            Some((w, b)) if self.words[w] & (1 << b) != 0 => {
                self.words[w] &= !(1 << b);
                self.size -= 1;
                true
            }
            _ => false,
        }
    }

    /// Puts back a value removed earlier. Only the trail calls this.
    pub(crate) fn reinsert(&mut self, value: i32) {
        let (w, b) = self.slot(value).expect("reinserted value outside the initial range");
        debug_assert!(self.words[w] & (1 << b) == 0);
        self.words[w] |= 1 << b;
        self.size += 1;
    }

    pub fn size(&self) -> usize {
        self.size as usize
    }

    pub fn initial_size(&self) -> usize {
        self.initial_size as usize
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn is_fixed(&self) -> bool {
        self.size == 1
    }

    /// The single remaining value, if the domain is a singleton.
    pub fn value(&self) -> Option<i32> {
        if self.is_fixed() {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn min(&self) -> Option<i32> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<i32> {
        self.words.iter().enumerate().rev().find_map(|(w, &bits)| {
            (bits != 0).then(|| self.offset + (w as i32) * 64 + 63 - bits.leading_zeros() as i32)
        })
    }

    /// Values in increasing order.
    pub fn iter(&self) -> DomainIter<'_> {
        DomainIter {
            dom: self,
            word: 0,
            bits: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<i32> {
        self.iter().collect()
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct DomainIter<'a> {
    dom: &'a Domain,
    word: usize,
    bits: u64,
}

impl Iterator for DomainIter<'_> {
    type Item = i32;

    fn next(&mut self) -> Option<i32> {
        loop {
            if self.bits != 0 {
                let b = self.bits.trailing_zeros();
                self.bits &= self.bits - 1;
                return Some(self.dom.offset + (self.word as i32) * 64 + b as i32);
            }
            self.word += 1;
            if self.word >= self.dom.words.len() {
                return None;
            }
            self.bits = self.dom.words[self.word];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_and_removal() {
        let mut d = Domain::range(1, 70);
        assert_eq!(d.size(), 70);
        assert_eq!(d.min(), Some(1));
        assert_eq!(d.max(), Some(70));
        assert!(d.remove(70));
        assert!(!d.remove(70));
        assert!(!d.remove(200));
        assert_eq!(d.max(), Some(69));
        assert_eq!(d.iter().count(), 69);
        assert_eq!(d.initial_size(), 70);
    }

    #[test]
    fn from_values_is_sorted_and_deduplicated() {
        let d = Domain::from_values(&[5, -2, 5, 9]);
        assert_eq!(d.to_vec(), vec![-2, 5, 9]);
        assert_eq!(d.size(), 3);
        assert!(!d.contains(0));
    }

    #[test]
    fn singleton_value() {
        let mut d = Domain::range(0, 2);
        d.remove(0);
        assert_eq!(d.value(), None);
        d.remove(2);
        assert_eq!(d.value(), Some(1));
    }
}
