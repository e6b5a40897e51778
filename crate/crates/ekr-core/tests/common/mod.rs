//! Independent maximum-clique oracle: Bron-Kerbosch with pivoting over the
//! full vertex set. A different algorithm family from the coloring-bounded
//! branch-and-bound in the library, used to cross-check its answers.

use ekr_core::ekrgraph::DerangementGraph;

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Bits {
        Bits(vec![0; (n + 63) / 64])
    }

    fn full(n: usize) -> Bits {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(move |&i| self.get(i))
    }
}

/// Exact maximum clique size over all group elements.
pub fn oracle_max_clique(graph: &DerangementGraph) -> usize {
    let n = graph.order();
    let adj: Vec<Bits> = (0..n)
        .map(|i| {
            let mut row = Bits::empty(n);
            for j in 0..n {
                if graph.adjacent(i as u32, j as u32) {
                    row.set(j);
                }
            }
            row
        })
        .collect();
    let mut best = 0;
    expand(&adj, 0, Bits::full(n), Bits::empty(n), &mut best);
    best
}

fn expand(adj: &[Bits], r: usize, mut p: Bits, mut x: Bits, best: &mut usize) {
    if p.is_empty() {
        if x.is_empty() && r > *best {
            *best = r;
        }
        return;
    }
    if r + p.count() <= *best {
        return;
    }
    // pivot: the vertex of P u X covering the most of P
    let pivot = p
        .iter_ones()
        .chain(x.iter_ones())
        .max_by_key(|&u| p.and(&adj[u]).count())
        .unwrap();
    let branches: Vec<usize> = p.iter_ones().filter(|&v| !adj[pivot].get(v)).collect();
    for v in branches {
        expand(adj, r + 1, p.and(&adj[v]), x.and(&adj[v]), best);
        p.clear(v);
        x.set(v);
    }
}
