//! Floyd-Warshall over a small value graph, with first-hop tracking so
//! that cheapest paths can be replayed as representative sequences.

use alloc::vec;
use alloc::vec::Vec;

use crate::cost::Units;
use crate::sas_model::Value;

pub(crate) struct Apsp {
    n: usize,
    dist: Vec<Units>,
    first: Vec<Option<(usize, Value)>>,
}

impl Apsp {
    /// Arcs are (from, to, cost, label).
    pub(crate) fn new<I: IntoIterator<Item = (Value, Value, Units, usize)>>(n: usize, arcs: I) -> Apsp {
        let mut dist = vec![Units::INF; n * n];
        let mut first = vec![None; n * n];
        for x in 0..n {
            dist[x * n + x] = Units::ZERO;
        }
        for (x, y, c, label) in arcs {
            let i = x as usize * n + y as usize;
            if c < dist[i] {
                dist[i] = c;
                first[i] = Some((label, y));
            }
        }
        for k in 0..n {
            for i in 0..n {
                let ik = dist[i * n + k];
                if ik.is_inf() {
                    continue;
                }
                for j in 0..n {
                    let via = ik + dist[k * n + j];
                    if via < dist[i * n + j] {
                        dist[i * n + j] = via;
                        first[i * n + j] = first[i * n + k];
                    }
                }
            }
        }
        Apsp { n, dist, first }
    }

    #[inline]
    pub(crate) fn dist(&self, x: Value, y: Value) -> Units {
        self.dist[x as usize * self.n + y as usize]
    }

    pub(crate) fn into_table(self) -> Vec<Units> {
        self.dist
    }

    /// Labels along a cheapest path; `None` when unreachable.
    pub(crate) fn path(&self, x: Value, y: Value) -> Option<Vec<usize>> {
        if self.dist(x, y).is_inf() {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = x;
        while cur != y {
            let (label, next) = self.first[cur as usize * self.n + y as usize].expect("finite distance has a first hop");
            out.push(label);
            cur = next;
            debug_assert!(out.len() <= self.n * self.n, "first-hop chain does not terminate");
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheapest_path_and_labels() {
        // direct 0 -> 2 costs 5, via 1 costs 2
        let g = Apsp::new(3, [(0, 2, Units(5), 7), (0, 1, Units(1), 8), (1, 2, Units(1), 9)]);
        assert_eq!(g.dist(0, 2), Units(2));
        assert_eq!(g.path(0, 2), Some(vec![8, 9]));
        assert_eq!(g.path(1, 1), Some(vec![]));
        assert_eq!(g.path(2, 0), None);
        assert!(g.dist(2, 0).is_inf());
    }

    #[test]
    fn parallel_arcs_keep_cheapest() {
        let g = Apsp::new(2, [(0, 1, Units(3), 0), (0, 1, Units(2), 1), (0, 1, Units(2), 2)]);
        assert_eq!(g.path(0, 1), Some(vec![1]));
        assert_eq!(g.into_table(), vec![Units(0), Units(2), Units::INF, Units(0)]);
    }
}
