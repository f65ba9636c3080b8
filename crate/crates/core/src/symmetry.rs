//! Automorphisms of conflict graphs that follow from their construction.
//!
//! Permuting positions and, position by position, swapping `A↔T` or `C↔G`
//! preserves Hamming distance and GC content, so every such map is an
//! automorphism of the weak graph. For the reverse-complement graph the map
//! must also commute with `RC`: the position permutation commutes with
//! reversal and mirrored positions share the same swaps.

use itertools::Itertools;

use crate::graph::{ConflictGraph, GraphKind};
use crate::seq::Sequence;

/// A sequence map: the base at position `i` moves to `perm[i]`; an AT base is
/// complemented when bit `i` of `at_flip` is set, a GC base when bit `i` of
/// `gc_flip` is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqMap {
    perm: Vec<u8>,
    at_flip: u32,
    gc_flip: u32,
}

impl SeqMap {
    pub fn apply(&self, s: &Sequence) -> Sequence {
        let n = s.len();
        let bits = s.packed();
        let mut out = 0u64;
        for i in 0..n {
            let b = (bits >> (2 * (n - 1 - i))) & 3;
            let gc = (b ^ (b >> 1)) & 1 == 1;
            let flip = if gc { self.gc_flip } else { self.at_flip } >> i & 1;
            let target = self.perm[i] as usize;
            out |= (b ^ (3 * flip as u64)) << (2 * (n - 1 - target));
        }
        Sequence::from_packed(n, out).expect("length preserved")
    }
}

/// Every map in the automorphism group described above for words of length
/// `n`. The group has `n!·4ⁿ` elements for [`GraphKind::GcOnly`] and is much
/// smaller for [`GraphKind::GcRc`].
pub fn automorphisms(kind: GraphKind, n: usize) -> impl Iterator<Item = SeqMap> {
    let mirrored = |mask: &u32| (0..n).all(|i| (mask >> i & 1) == (mask >> (n - 1 - i) & 1));
    let masks: Vec<u32> = (0..1u32 << n)
        .filter(|m| kind == GraphKind::GcOnly || mirrored(m))
        .collect();
    let perms: Vec<Vec<u8>> = (0..n as u8)
        .permutations(n)
        .filter(|p| kind == GraphKind::GcOnly || (0..n).all(|i| p[n - 1 - i] as usize == n - 1 - p[i] as usize))
        .collect();
    perms.into_iter().flat_map(move |perm| {
        let masks = masks.clone();
        masks.clone().into_iter().flat_map(move |at_flip| {
            let perm = perm.clone();
            masks.clone().into_iter().map(move |gc_flip| SeqMap {
                perm: perm.clone(),
                at_flip,
                gc_flip,
            })
        })
    })
}

fn index_of(vertices: &[Sequence], s: &Sequence) -> usize {
    vertices.binary_search(s).expect("automorphism leaves the vertex set")
}

/// Orbits of the automorphism group on the vertices, each sorted, ordered by
/// smallest member.
pub fn vertex_orbits(g: &ConflictGraph) -> Vec<Vec<usize>> {
    let vertices = g.vertices();
    let mut orbit_of = vec![usize::MAX; vertices.len()];
    let mut orbits = Vec::new();
    for v in 0..vertices.len() {
        if orbit_of[v] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = Vec::new();
        for map in automorphisms(g.kind, g.params.n) {
            let u = index_of(vertices, &map.apply(&vertices[v]));
            if orbit_of[u] == usize::MAX {
                orbit_of[u] = id;
                members.push(u);
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits
}

/// The stabiliser of vertex `v` as explicit vertex permutations.
pub fn stabilizer(g: &ConflictGraph, v: usize) -> Vec<Vec<u32>> {
    let vertices = g.vertices();
    let fixed = vertices[v];
    automorphisms(g.kind, g.params.n)
        .filter(|map| map.apply(&fixed) == fixed)
        .map(|map| {
            vertices
                .iter()
                .map(|s| index_of(vertices, &map.apply(s)) as u32)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeParams;

    fn check_group(kind: GraphKind, n: usize, d: usize, w: usize) {
        let g = ConflictGraph::build(kind, CodeParams::new(n, d, w).unwrap()).unwrap();
        let vs = g.vertices();
        let mut count = 0;
        for map in automorphisms(kind, n) {
            count += 1;
            let image: Vec<usize> = vs.iter().map(|s| index_of(vs, &map.apply(s))).collect();
            let mut sorted = image.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), vs.len(), "not a bijection");
            for (a, b) in g.graph().edges() {
                assert!(g.graph().has_edge(image[a], image[b]), "edge not preserved");
            }
        }
        let expected = match kind {
            GraphKind::GcOnly => (1..=n as u64).product::<u64>() << (2 * n),
            GraphKind::GcRc => {
                let pairs = (n / 2) as u64;
                let free = n.div_ceil(2) as u32;
                (1..=pairs).product::<u64>() * (1 << pairs) * (1u64 << (2 * free))
            }
        };
        assert_eq!(count, expected);
    }

    #[test]
    fn maps_are_automorphisms() {
        check_group(GraphKind::GcOnly, 4, 2, 2);
        check_group(GraphKind::GcRc, 4, 2, 2);
        check_group(GraphKind::GcRc, 5, 3, 2);
        check_group(GraphKind::GcRc, 6, 4, 3);
    }

    #[test]
    fn identity_and_rc_are_included() {
        let s = Sequence::parse("ACGGT").unwrap();
        let maps: Vec<SeqMap> = automorphisms(GraphKind::GcRc, 5).collect();
        assert!(maps.iter().any(|m| m.apply(&s) == s));
        assert!(maps.iter().any(|m| m.apply(&s) == s.reverse_complement()));
    }

    #[test]
    fn orbits_partition_and_stabilizers_fix() {
        let g = ConflictGraph::build(GraphKind::GcRc, CodeParams::new(5, 3, 2).unwrap()).unwrap();
        let orbits = vertex_orbits(&g);
        let mut all: Vec<usize> = orbits.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..g.vertices().len()).collect::<Vec<_>>());
        let rep = orbits[0][0];
        let stab = stabilizer(&g, rep);
        let total: u64 = automorphisms(g.kind, 5).count() as u64;
        // Orbit-stabiliser theorem.
        assert_eq!(stab.len() as u64 * orbits[0].len() as u64, total);
        assert!(stab.iter().all(|p| p[rep] as usize == rep));
    }
}
