use rand::seq::SliceRandom;
use rand::Rng;

use super::sequence::DegreeSequence;

/// Uniform configuration-model multigraph: the half-edge array is shuffled
/// and consecutive pairs become edges. Self-loops and multi-edges are kept.
/// Vertices are numbered `0..n`.
pub fn sample_multigraph<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Vec<(u32, u32)> {
    let mut half: Vec<u32> = Vec::with_capacity(d.half_edges() as usize);
    for (v, &deg) in d.degrees().iter().enumerate() {
        half.extend(std::iter::repeat_n(v as u32, deg as usize));
    }
    half.shuffle(rng);
    half.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Connected-component vertex counts of an edge list on `n` vertices,
/// sorted in decreasing order.
pub fn component_sizes(n: usize, edges: &[(u32, u32)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut sizes = vec![0usize; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        sizes[r] += 1;
    }
    let mut out: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}
