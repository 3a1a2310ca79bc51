//! Indexed 4-ary min-heap keyed by `(key, id)`, so equal keys pop in id
//! order. Ids index a caller-owned slab; `pos` maps an id to its heap slot.

const ABSENT: u32 = u32::MAX;
const ARITY: usize = 4;

#[derive(Clone, Debug, Default)]
pub(crate) struct IndexedHeap {
    heap: Vec<(u64, u32)>,
    pos: Vec<u32>,
}

impl IndexedHeap {
    /// Heap holding ids `0..keys.len()`.
    pub fn from_keys(keys: impl Iterator<Item = u64>) -> IndexedHeap {
        let heap: Vec<(u64, u32)> = keys.enumerate().map(|(i, k)| (k, i as u32)).collect();
        let pos = (0..heap.len() as u32).collect();
        let mut h = IndexedHeap { heap, pos };
        if h.heap.len() > 1 {
            for i in (0..=(h.heap.len() - 2) / ARITY).rev() {
                h.sift_down(i);
            }
        }
        h
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.heap.len()
    }

    #[cfg(test)]
    pub fn contains(&self, id: u32) -> bool {
        self.pos.get(id as usize).is_some_and(|&p| p != ABSENT)
    }

    pub fn peek(&self) -> Option<(u64, u32)> {
        self.heap.first().copied()
    }

    pub fn pop(&mut self) -> Option<(u64, u32)> {
        let top = *self.heap.first()?;
        self.take(0);
        Some(top)
    }

    pub fn push(&mut self, id: u32, key: u64) {
        let i = id as usize;
        if self.pos.len() <= i {
            self.pos.resize(i + 1, ABSENT);
        }
        debug_assert_eq!(self.pos[i], ABSENT, "id {id} already queued");
        self.heap.push((key, id));
        self.pos[i] = (self.heap.len() - 1) as u32;
        self.sift_up(self.heap.len() - 1);
    }

    pub fn remove(&mut self, id: u32) {
        let p = self.pos[id as usize];
        debug_assert_ne!(p, ABSENT, "id {id} not queued");
        self.take(p as usize);
    }

    pub fn update(&mut self, id: u32, key: u64) {
        let p = self.pos[id as usize] as usize;
        let old = self.heap[p].0;
        self.heap[p].0 = key;
        if key < old {
            self.sift_up(p);
        } else {
            self.sift_down(p);
        }
    }

    fn take(&mut self, slot: usize) {
        let (_, id) = self.heap.swap_remove(slot);
        self.pos[id as usize] = ABSENT;
        if slot < self.heap.len() {
            self.pos[self.heap[slot].1 as usize] = slot as u32;
            self.sift_down(slot);
            self.sift_up(slot);
        }
    }

    fn sift_up(&mut self, mut i: usize) {
        let item = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / ARITY;
            if self.heap[parent] <= item {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i].1 as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = item;
        self.pos[item.1 as usize] = i as u32;
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        let item = self.heap[i];
        loop {
            let first = ARITY * i + 1;
            if first >= n {
                break;
            }
            let mut best = first;
            for c in first + 1..(first + ARITY).min(n) {
                if self.heap[c] < self.heap[best] {
                    best = c;
                }
            }
            if self.heap[best] >= item {
                break;
            }
            self.heap[i] = self.heap[best];
            self.pos[self.heap[i].1 as usize] = i as u32;
            i = best;
        }
        self.heap[i] = item;
        self.pos[item.1 as usize] = i as u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[derive(Clone, Debug)]
    enum Op {
        Push(u64),
        Pop,
        Remove(usize),
        Update(usize, u64),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (0u64..50).prop_map(Op::Push),
            Just(Op::Pop),
            any::<usize>().prop_map(Op::Remove),
            (any::<usize>(), 0u64..50).prop_map(|(i, k)| Op::Update(i, k)),
        ]
    }

    proptest! {
        #[test]
        fn agrees_with_ordered_set(init in prop::collection::vec(0u64..50, 0..40),
                                   ops in prop::collection::vec(op(), 0..200)) {
            let mut heap = IndexedHeap::from_keys(init.iter().copied());
            let mut model: BTreeSet<(u64, u32)> =
                init.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
            let mut next_id = init.len() as u32;
            for op in ops {
                match op {
                    Op::Push(k) => {
                        heap.push(next_id, k);
                        model.insert((k, next_id));
                        next_id += 1;
                    }
                    Op::Pop => {
                        let want = model.iter().next().copied();
                        if let Some(w) = want {
                            model.remove(&w);
                        }
                        prop_assert_eq!(heap.pop(), want);
                    }
                    Op::Remove(i) if !model.is_empty() => {
                        let e = *model.iter().nth(i % model.len()).unwrap();
                        model.remove(&e);
                        heap.remove(e.1);
                        prop_assert!(!heap.contains(e.1));
                    }
                    Op::Update(i, k) if !model.is_empty() => {
                        let e = *model.iter().nth(i % model.len()).unwrap();
                        model.remove(&e);
                        model.insert((k, e.1));
                        heap.update(e.1, k);
                    }
                    _ => {}
                }
                prop_assert_eq!(heap.len(), model.len());
                prop_assert_eq!(heap.peek(), model.iter().next().copied());
            }
        }
    }
}
