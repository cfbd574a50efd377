//! Values frozen from an independent brute-force enumeration.

use num_bigint::BigUint;
use qgrass::expansion::{enumerate_minimal_connected, expansion_constant, restriction_inequality, Rational};
use qgrass::homology::homology_dims;
use qgrass::independence::local_sparsity;
use qgrass::operators::heisenberg_defect;
use qgrass::qnum::gaussian_binomial;
use qgrass::special::mts_count;
use qgrass::Ambient;

#[test]
fn grassmannian_sizes() {
    for (n, k, q, size) in [(3, 1, 2, 7u64), (4, 2, 2, 35), (3, 1, 3, 13), (4, 2, 3, 130)] {
        let amb = Ambient::with_q(q, n).unwrap();
        assert_eq!(amb.level(k).unwrap().len() as u64, size);
        assert_eq!(gaussian_binomial(n as u64, k as u64, q as u64), BigUint::from(size));
    }
}

#[test]
fn exact_expansion_constant() {
    let rep = expansion_constant(3, 1, 2, 3, false).unwrap();
    assert_eq!(rep.h, Some(Rational::new(1, 2)));
    assert_eq!(rep.h_noncocycle, Some(Rational::new(1, 2)));
}

#[test]
fn restriction_constants() {
    let a = restriction_inequality(3, 2, 3, 0, 0).unwrap();
    assert_eq!(a.c, Some(Rational::new(1, 6)));
    let b = restriction_inequality(4, 2, 3, 0, 0).unwrap();
    assert!(b.exhaustive);
    assert_eq!(b.c, Some(Rational::new(3, 14)));
}

#[test]
fn minimal_connected_table() {
    let t = enumerate_minimal_connected(3, 1, 2, 3, 3).unwrap();
    let total: u64 = t.buckets.iter().map(|b| b.count).sum();
    assert_eq!(total, 14 + 84 + 280);
    let above = t.above(t.theta_display);
    assert_eq!(above.len(), 1);
    assert_eq!((above[0].m, above[0].theta, above[0].count), (3, Rational::new(5, 9), 168));
}

#[test]
fn maximal_totally_singular_counts() {
    for (n, q, count) in [(1, 2, 2), (2, 2, 6), (3, 2, 30), (2, 3, 8), (1, 3, 2)] {
        assert_eq!(mts_count(n, q), count, "n={n} q={q}");
    }
}

#[test]
fn independence_complex_intersections() {
    for (n, lines, pairs, inter) in [(3, 7, 21, 11), (4, 15, 105, 27)] {
        assert_eq!(local_sparsity(n, 1, 2).unwrap().faces, lines);
        let r = local_sparsity(n, 2, 2).unwrap();
        assert_eq!((r.faces, r.max_intersecting), (pairs, inter));
    }
}

#[test]
fn heisenberg_scalars() {
    for (n, k, q, m, lam) in [(5, 1, 2, 3, 2), (5, 2, 2, 3, 1), (3, 1, 2, 5, 2)] {
        assert_eq!(heisenberg_defect(n, k, q, m).unwrap(), lam);
    }
}

#[test]
fn homology_dimensions() {
    assert_eq!(homology_dims(4, 2, 3).unwrap().dims(), vec![0, 0, 7, 0, 0]);
    assert_eq!(homology_dims(5, 2, 3).unwrap().dims(), vec![0; 6]);
    assert_eq!(homology_dims(3, 2, 3).unwrap().dims(), vec![0; 4]);
    assert_eq!(homology_dims(4, 3, 2).unwrap().dims(), vec![0, 0, 52, 0, 0]);
}
