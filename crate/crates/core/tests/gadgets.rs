use num_bigint::BigInt;
use num_traits::Zero;

use sections_core::gadgets::verify::*;
use sections_core::gadgets::*;
use sections_core::group::{HeisenbergElement, QuotientElement};
use sections_core::words::{find_words_with_value, EnumerationBudget};
use sections_core::Verdict;

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&a| BigInt::from(a)).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Twice the signed area enclosed by the lattice path with steps
/// `(1, b_1), .., (1, b_n)` followed by the path with steps
/// `(1, b_{p(1)}), .., (1, b_{p(n)})` walked backwards (shoelace formula).
fn twice_area(b: &[BigInt], order: &[usize]) -> BigInt {
    let walk = |seq: &mut dyn Iterator<Item = &BigInt>| {
        let mut pts = vec![(BigInt::zero(), BigInt::zero())];
        for bi in seq {
            let (x, y) = pts.last().unwrap().clone();
            pts.push((x + 1, y + bi));
        }
        pts
    };
    let forward = walk(&mut b.iter());
    let mut back = walk(&mut order.iter().map(|&i| &b[i]));
    back.reverse();
    let poly: Vec<(BigInt, BigInt)> = forward.into_iter().chain(back.into_iter().skip(1)).collect();
    let mut s = BigInt::zero();
    for k in 0..poly.len() {
        let (x0, y0) = &poly[k];
        let (x1, y1) = &poly[(k + 1) % poly.len()];
        s += x0 * y1 - x1 * y0;
    }
    s
}

#[test]
fn superincreasing_examples() {
    assert_eq!(make_superincreasing(1).unwrap().terms(), big(&[1]).as_slice());
    assert_eq!(make_superincreasing(3).unwrap().terms(), big(&[1, 3, 10]).as_slice());
    let mut b = vec![1i64];
    for i in 2..=5 {
        b.push(i * b.last().unwrap() + 1);
    }
    assert_eq!(make_superincreasing(5).unwrap().terms(), big(&b).as_slice());
    assert_eq!(b, vec![1, 3, 10, 41, 206]);
    assert!(matches!(make_superincreasing(0), Err(GadgetError::Usage(_))));
}

#[test]
fn unique_sum_up_to_eight() {
    for m in 1..=8u64 {
        let c = verify_unique_sum(&make_superincreasing(m as usize).unwrap());
        assert!(c.is_verified());
        // weak compositions of m into m parts: C(2m-1, m)
        let expected = (1..=m).fold(1u64, |acc, k| acc * (m - 1 + k) / k);
        assert_eq!(c.examined, expected, "m={m}");
    }
}

#[test]
fn unique_product_gadget_values() {
    let g = make_unique_product_gadget(3).unwrap();
    assert_eq!(g.b().terms(), big(&[1, 3, 10]).as_slice());
    assert_eq!(g.modulus(), &BigInt::from(19));
    // x^{sum b} y^n z^{-sum_{k<l} b_l}
    let raw = HeisenbergElement::from_i64(&[14], &[3], -(3 + 10 + 10));
    assert_eq!(g.target(), &QuotientElement::project(&raw, &BigInt::from(19)).unwrap());
    assert_eq!(g.target().base().z(), &BigInt::from(15));

    let g2 = make_unique_product_gadget(2).unwrap();
    assert_eq!(g2.modulus(), &BigInt::from(3));
    let g1 = make_unique_product_gadget(1).unwrap();
    assert_eq!(g1.modulus(), &BigInt::from(1));
    assert_eq!(g1.target().base(), &HeisenbergElement::from_i64(&[1], &[1], 0));
}

#[test]
fn defect_equals_signed_area() {
    for n in 1..=5 {
        let g = make_unique_product_gadget(n).unwrap();
        for p in permutations(n) {
            assert_eq!(
                BigInt::from(2) * g.defect(&p),
                twice_area(g.b().terms(), &p),
                "n={n} {p:?}"
            );
        }
    }
}

#[test]
fn defect_multiset_n3() {
    let g = make_unique_product_gadget(3).unwrap();
    let mut oracle: Vec<BigInt> = permutations(3)
        .iter()
        .map(|p| twice_area(g.b().terms(), p) / 2)
        .collect();
    oracle.sort();
    assert_eq!(oracle, big(&[0, 2, 7, 11, 16, 18]));
    let c = verify_unique_product_permutations(&g);
    assert!(c.is_verified());
    let reported: Vec<BigInt> = c.details["defects"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().parse().unwrap())
        .collect();
    assert_eq!(reported, oracle);
    assert_eq!(g.max_defect(), BigInt::from(18));
    assert_eq!(c.details["max_defect_order"], serde_json::json!([2, 1, 0]));
}

#[test]
fn unique_product_both_modes() {
    for n in 1..=5 {
        let g = make_unique_product_gadget(n).unwrap();
        let c = verify_unique_product_permutations(&g);
        assert!(c.is_verified(), "n={n}");
        assert_eq!(c.examined, (1..=n as u64).product::<u64>());
    }
    for n in 1..=4 {
        let g = make_unique_product_gadget(n).unwrap();
        let c = verify_unique_product_words(&g, &EnumerationBudget::pruned(n)).unwrap();
        assert!(c.is_verified(), "n={n}");
    }
}

#[test]
fn unique_product_fails_without_enough_room() {
    // e = 2 for b = (1, 3): h_2 h_1 = h_1 h_2 z^2 = h_1 h_2 in the quotient
    let g = make_unique_product_gadget(2).unwrap();
    let e = BigInt::from(2);
    let letters: Vec<_> = g
        .letters()
        .iter()
        .map(|h| QuotientElement::project(h, &e).unwrap())
        .collect();
    let a = letters[0].multiply(&letters[1]).unwrap();
    let b = letters[1].multiply(&letters[0]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn h5_vectors_example_n3() {
    let g = make_h5_vectors(3).unwrap();
    let to = |rows: &[[i64; 2]]| rows.iter().map(|r| vec2(r[0], r[1])).collect::<Vec<_>>();
    assert_eq!(g.u(), to(&[[-3, 0], [3, -1], [0, 1]]).as_slice());
    assert_eq!(g.v(), to(&[[1, 2], [1, 5]]).as_slice());
    assert_eq!(g.chain_a(), big(&[1, 3, 6]).as_slice());
    assert_eq!(g.chain_b(), big(&[2, 5]).as_slice());
    let e: Vec<Vec<BigInt>> = g.inner().to_vec();
    assert_eq!(e, vec![big(&[-3, -3]), big(&[1, -2]), big(&[2, 5])]);
    // recompute every entry from the vectors
    for (i, ui) in g.u().iter().enumerate() {
        for (j, vj) in g.v().iter().enumerate() {
            assert_eq!(e[i][j], &ui[0] * &vj[0] + &ui[1] * &vj[1]);
        }
    }
}

#[test]
fn h5_vectors_example_n2() {
    let g = make_h5_vectors(2).unwrap();
    assert_eq!(g.u(), &[vec2(-1, 0), vec2(1, 0)]);
    assert_eq!(g.v(), &[vec2(1, 1)]);
    assert_eq!(g.inner().to_vec(), vec![big(&[-1]), big(&[1])]);
    assert!(matches!(make_h5_vectors(1), Err(GadgetError::Usage(_))));
}

#[test]
fn h5_vectors_verify_to_ten() {
    for n in 2..=10 {
        let c = verify_h5_vectors(&make_h5_vectors(n).unwrap());
        assert!(c.is_verified(), "n={n}: {:?}", c.verdict);
    }
}

#[test]
fn polygon_examples() {
    let sq = make_polygon_gadget(4).unwrap();
    assert_eq!(sq.radius(), 2);
    let expected = [vec2(2, 0), vec2(0, 2), vec2(-2, 0), vec2(0, -2)];
    assert_eq!(sq.u(), &expected);
    assert_eq!(sq.v(), &expected);
    let tri = make_polygon_gadget(3).unwrap();
    assert!(tri.radius() <= 8);
    for n in 3..=8 {
        let g = make_polygon_gadget(n).unwrap();
        assert!(g.zero_sum());
        // unique argmax, checked directly
        for (i, vi) in g.v().iter().enumerate() {
            let score = |p: &Vec2| &p[0] * &vi[0] + &p[1] * &vi[1];
            let best = score(&g.u()[i]);
            for (j, uj) in g.u().iter().enumerate() {
                assert!(j == i || score(uj) < best, "n={n} i={i} j={j}");
            }
        }
    }
}

#[test]
fn polygon_conjugation_and_telescoping() {
    for n in 2..=8 {
        let g = make_polygon_gadget(n).unwrap();
        let c = verify_polygon(&g, 5);
        assert!(c.is_verified(), "n={n}: {:?}", c.verdict);
        // (uu_i)^{y^{-v_j}} has z-exponent <u_i, v_i> - <u_i, v_j>
        for (i, uu) in g.lifted_vertices().iter().enumerate() {
            for (j, h) in g.conjugators().iter().enumerate() {
                let t = uu.conjugate(h).unwrap();
                let dot = |a: &Vec2, b: &Vec2| &a[0] * &b[0] + &a[1] * &b[1];
                assert_eq!(t.z(), &(dot(&g.u()[i], &g.v()[i]) - dot(&g.u()[i], &g.v()[j])));
            }
        }
    }
}

#[test]
fn main_elements_n3() {
    let m = make_main_gadget_elements(&make_h5_vectors(3).unwrap());
    let uu: Vec<HeisenbergElement> = vec![
        HeisenbergElement::from_i64(&[-3, 0], &[0, 0], 0),
        HeisenbergElement::from_i64(&[3, -1], &[0, 0], 1),
        HeisenbergElement::from_i64(&[0, 1], &[0, 0], 7),
    ];
    assert_eq!(m.uu(), uu.as_slice());
    let vv = vec![
        HeisenbergElement::from_i64(&[0, 0], &[1, 2], 0),
        HeisenbergElement::from_i64(&[0, 0], &[1, 5], 0),
    ];
    assert_eq!(m.vv(), vv.as_slice());
    assert_eq!(m.target(), &HeisenbergElement::from_i64(&[0, 0], &[2, 7], 0));
    let chain = uu[0]
        .multiply(&vv[0])
        .and_then(|a| a.multiply(&uu[1]))
        .and_then(|a| a.multiply(&vv[1]))
        .and_then(|a| a.multiply(&uu[2]))
        .unwrap();
    assert_eq!(&chain, m.target());
}

#[test]
fn main_identity_item_one() {
    for n in 2..=6 {
        let m = make_main_gadget_elements(&make_h5_vectors(n).unwrap());
        assert!(m.uu()[0].z().is_zero());
        assert!(m.target().x().iter().all(Zero::is_zero) && m.target().z().is_zero());
        for l in 1..=5 {
            assert_eq!(&m.interleaved_power(l), m.target(), "n={n} l={l}");
        }
    }
}

#[test]
fn main_identity_item_two() {
    let m = make_main_gadget_elements(&make_h5_vectors(3).unwrap());
    let c = verify_main_identity(&m, 2, &EnumerationBudget::pruned(8)).unwrap();
    assert!(c.is_verified(), "{:?}", c.verdict);
    let found =
        find_words_with_value(&m.alphabet(), &m.target().clone().into(), &EnumerationBudget::pruned(8)).unwrap();
    // uu_1^l vv_1 uu_2^l vv_2 uu_3^l for l = 1, 2
    assert!(found.words.iter().any(|w| w.0 == vec![0, 3, 1, 4, 2]));
    assert!(found.words.iter().any(|w| w.0 == vec![0, 0, 3, 1, 1, 4, 2, 2]));
}

#[test]
fn verify_gadget_dispatch_and_inconclusive() {
    let g = make_unique_product_gadget(3).unwrap();
    let opts = VerifyOptions {
        mode: CheckMode::AllWords,
        budget: EnumerationBudget::pruned(2),
        max_l: 1,
    };
    let c = verify_gadget(GadgetRef::UniqueProduct(&g), &opts).unwrap();
    assert!(matches!(c.verdict, Verdict::Inconclusive { .. }));
    assert!(!c.is_verified());
}
