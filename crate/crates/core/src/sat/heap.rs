/// Binary max-heap over variable slots keyed by an external activity array.
#[derive(Clone, Debug, Default)]
pub(super) struct VarHeap {
    heap: Vec<u32>,
    /// Position in `heap`, or `u32::MAX` when absent.
    index: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl VarHeap {
    pub fn grow(&mut self, n: usize) {
        if self.index.len() < n {
            self.index.resize(n, ABSENT);
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.index[v as usize] != ABSENT
    }

    /// Ties go to the lower variable index.
    fn better(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    pub fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.index[v as usize] = self.heap.len() as u32;
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    /// Restores the heap after `v`'s activity increased.
    pub fn increased(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            let pos = self.index[v as usize] as usize;
            self.sift_up(pos, act);
        }
    }

    pub fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.index[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.index[self.heap[0] as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, mut pos: usize, act: &[f64]) {
        let v = self.heap[pos];
        while pos > 0 {
            let parent = (pos - 1) / 2;
            let p = self.heap[parent];
            if !Self::better(act, v, p) {
                break;
            }
            self.heap[pos] = p;
            self.index[p as usize] = pos as u32;
            pos = parent;
        }
        self.heap[pos] = v;
        self.index[v as usize] = pos as u32;
    }

    fn sift_down(&mut self, mut pos: usize, act: &[f64]) {
        let v = self.heap[pos];
        let n = self.heap.len();
        loop {
            let left = 2 * pos + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && Self::better(act, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            let c = self.heap[child];
            if !Self::better(act, c, v) {
                break;
            }
            self.heap[pos] = c;
            self.index[c as usize] = pos as u32;
            pos = child;
        }
        self.heap[pos] = v;
        self.index[v as usize] = pos as u32;
    }
}
