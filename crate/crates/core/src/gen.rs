//! Random valid circuits for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{Circuit, Edge, GateKind, NodeRef, Polarity, WorkingNode};

fn random_polarity<R: Rng + ?Sized>(rng: &mut R) -> Polarity {
    Polarity::from_negated(rng.gen())
}

/// A valid Nodes-form circuit with exactly `d` live nodes over `n ≥ 2`
/// inputs. Operands of a node are always distinct sources.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Circuit {
    assert!(n >= 2 && d >= 1);
    let mut nodes: Vec<WorkingNode> = Vec::with_capacity(d);
    let mut unused: Vec<usize> = Vec::new();
    for i in 0..d {
        let remaining = d - 1 - i;
        let forced = unused.len().saturating_sub(remaining);
        debug_assert!(forced <= 2);
        unused.shuffle(rng);
        let mut picks: Vec<NodeRef> = unused[..forced].iter().map(|&k| NodeRef::Working(k)).collect();
        let pool = n + i;
        while picks.len() < 2 {
            let p = rng.gen_range(0..pool);
            let r = if p < n { NodeRef::Input(p) } else { NodeRef::Working(p - n) };
            if !picks.contains(&r) {
                picks.push(r);
            }
        }
        if rng.gen() {
            picks.swap(0, 1);
        }
        for r in &picks {
            if let NodeRef::Working(k) = r {
                unused.retain(|u| u != k);
            }
        }
        let gate = if rng.gen() { GateKind::And } else { GateKind::Or };
        nodes.push(WorkingNode::new(
            gate,
            Edge::new(picks[0], random_polarity(rng)),
            Edge::new(picks[1], random_polarity(rng)),
        ));
        unused.push(i);
    }
    Circuit::from_nodes(n, nodes).expect("generator keeps every node live")
}

/// Any circuit shape, including constants and literals.
pub fn random_any_circuit<R: Rng + ?Sized>(rng: &mut R, n: usize, max_d: usize) -> Circuit {
    let d = rng.gen_range(0..=max_d);
    if d == 0 || n < 2 {
        return match rng.gen_range(0..3) {
            0 => Circuit::constant(n, rng.gen()),
            _ => Circuit::literal(n, rng.gen_range(0..n), random_polarity(rng)),
        };
    }
    random_circuit(rng, n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_circuits_are_valid_with_exact_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(2..=4);
            let d = rng.gen_range(1..=8);
            let c = random_circuit(&mut rng, n, d);
            assert!(c.is_valid());
            assert_eq!(c.node_count(), d);
            assert!(c.to_connection_matrix().is_ok());
        }
    }
}
