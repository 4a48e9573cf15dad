//! Ordering of one sibling list under BEFORE/AFTER constraints.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

/// Orders `keys` so that every `(a, b)` constraint puts `a` before `b`.
///
/// Among all valid orders the lexicographically least sequence of keys is
/// returned. Keys must be distinct. On a cycle, the shortest cycle through
/// the least key that lies on any cycle is returned, starting at that key.
pub fn order_siblings<K: Ord>(keys: &[K], constraints: &[(usize, usize)]) -> Result<Vec<usize>, Vec<usize>> {
    let n = keys.len();
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(a, b) in constraints {
        succ[a].push(b);
        indeg[b] += 1;
    }

    let mut ready: BinaryHeap<Reverse<(&K, usize)>> =
        (0..n).filter(|&i| indeg[i] == 0).map(|i| Reverse((&keys[i], i))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(Reverse((&keys[j], j)));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }

    let mut stuck: Vec<usize> = (0..n).filter(|&i| indeg[i] > 0).collect();
    stuck.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    for start in stuck {
        if let Some(cycle) = shortest_cycle(&succ, start) {
            return Err(cycle);
        }
    }
    unreachable!("a stalled topological sort always leaves a cycle")
}

/// Breadth-first search from `start` back to itself.
fn shortest_cycle(succ: &[Vec<usize>], start: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; succ.len()];
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if v == start {
                let mut cycle = vec![u];
                let mut cur = u;
                while cur != start {
                    cur = parent[cur];
                    cycle.push(cur);
                }
                cycle.reverse();
                return Some(cycle);
            }
            if parent[v] == usize::MAX && v != start {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    None
}
