mod common;

use common::*;
use ginv_core::decomp;
use ginv_core::ginv::{self, block_params};
use ginv_core::relations::{self, below_drazin, below_gd1, below_onegd, inner_equivalent, po_membership, PoVariant};
use ginv_core::verify::generate::{self, random_contractive_drazin, BlockShape};
use ginv_core::{gd1, InnerInverse, Matrix, C64};
use proptest::prelude::*;

/// Another inner inverse with the same `Y` block (same class) or a fresh one.
fn sibling(c: &mut Case, same_class: bool) -> InnerInverse {
    let cfg = cfg();
    let dec = decomp::core_nilpotent(&c.t, &cfg).unwrap();
    let (_, z, w) = generate::random_block_params(&dec, BlockShape::default(), &mut c.rng, &cfg);
    let y = if same_class {
        block_params(&dec, &c.inner.value).unwrap().0
    } else {
        generate::random_block_params(&dec, BlockShape::default(), &mut c.rng, &cfg).0
    };
    ginv::inner_block(&dec, &y, &z, &w, &cfg).unwrap()
}

proptest! {
    #[test]
    fn inner_equivalence_is_an_equivalence(mut c in case(), same in prop::collection::vec(any::<bool>(), 2)) {
        let cfg = cfg();
        let a = c.inner.clone();
        let b = sibling(&mut c, same[0]);
        let d = sibling(&mut c, same[1]);
        let eq = |x: &InnerInverse, y: &InnerInverse| inner_equivalent(&c.t, x, y, &cfg).unwrap();
        prop_assert!(eq(&a, &a));
        prop_assert_eq!(eq(&a, &b), eq(&b, &a));
        if eq(&a, &b) && eq(&b, &d) {
            prop_assert!(eq(&a, &d));
        }
        if same[0] {
            prop_assert!(eq(&a, &b));
            prop_assert!(close(&gd1(&c.t, &a, &cfg).unwrap(), &gd1(&c.t, &b, &cfg).unwrap()));
        }
        prop_assert_eq!(eq(&a, &b), close(&gd1(&c.t, &a, &cfg).unwrap(), &gd1(&c.t, &b, &cfg).unwrap()));
    }

    #[test]
    fn relations_are_reflexive(c in case()) {
        let cfg = cfg();
        prop_assert!(below_gd1(&c.t, &c.t, &c.inner, &cfg).unwrap().holds);
        prop_assert!(below_onegd(&c.t, &c.t, &c.inner, &cfg).unwrap().holds);
        prop_assert!(below_drazin(&c.t, &c.t, &cfg).unwrap().holds);
    }

    #[test]
    fn characterizations_agree(mut c in case(), above in any::<bool>()) {
        let cfg = cfg();
        let dec = decomp::core_nilpotent(&c.t, &cfg).unwrap();
        let (y, z, _) = block_params(&dec, &c.inner.value).unwrap();
        let s = dec.nil_dim();
        let x4 = generate::gaussian(s, s, &mut c.rng);
        let n = c.t.rows();
        for (construct, gd) in [(relations::construct_above_gd1(&dec, &y, &x4).unwrap(), true), (relations::construct_above_onegd(&dec, &z, &x4).unwrap(), false)] {
            let other = if above { construct } else { generate::gaussian(n, n, &mut c.rng) };
            let rep = if gd { below_gd1(&c.t, &other, &c.inner, &cfg) } else { below_onegd(&c.t, &other, &c.inner, &cfg) }.unwrap();
            prop_assert!(rep.consistent, "{:?}", rep);
            prop_assert!(!above || rep.holds);
        }
    }

    #[test]
    fn po_members_reduce_to_the_drazin_order(n in 2usize..=6, k in 1usize..=3, seed in any::<u64>(), above in any::<bool>()) {
        let cfg = cfg();
        let k = k.min(n);
        let s = random_contractive_drazin(n, k, seed).unwrap();
        let dec = decomp::core_nilpotent(&s, &cfg).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed ^ 1);
        let sm = generate::random_inner_block(&dec, BlockShape { zero_y: true, zero_z: false }, &mut rng, &cfg).unwrap();
        let m = po_membership(&s, &sm, PoVariant::Gd1, relations::DEFAULT_N_MAX, &cfg).unwrap();
        prop_assert!(m.member);
        let t = if above {
            let x4 = generate::gaussian(dec.nil_dim(), dec.nil_dim(), &mut rng);
            let (r, q) = (dec.core_dim(), dec.nil_dim());
            dec.from_blocks(&dec.t1, &Matrix::zeros(r, q), &Matrix::zeros(q, r), &x4).unwrap()
        } else {
            generate::gaussian(n, n, &mut rng)
        };
        let g = below_gd1(&s, &t, &sm, &cfg).unwrap().holds;
        let d = below_drazin(&s, &t, &cfg).unwrap().holds;
        prop_assert_eq!(g, d);
        // a nilpotent S has S^d = 0 and lies below everything
        prop_assert_eq!(d, above || dec.core_dim() == 0);
    }
}

/// Grid of `X4` values on 2x2 and 3x3 splits: every constructed operator lies
/// above `T`.
#[test]
fn construct_above_grid() {
    let cfg = cfg();
    let values = [-2.0, -0.5, 0.0, 1.0, 3.0];
    for (n, k) in [(2usize, 1usize), (3, 1), (3, 2)] {
        let spec =
            ginv_core::verify::InstanceSpec { dimension: n, target_index: k, core_spectral_radius: 1.0, seed: 11 };
        let c = build(spec, 5, true);
        let dec = decomp::core_nilpotent(&c.t, &cfg).unwrap();
        let (y, z, _) = block_params(&dec, &c.inner.value).unwrap();
        let s = dec.nil_dim();
        let mut checked = 0;
        for a in values {
            for b in values {
                let mut x4 = Matrix::zeros(s, s);
                x4.set(0, 0, C64::new(a, 0.0));
                x4.set(s - 1, s - 1, x4.get(s - 1, s - 1) + C64::new(0.0, b));
                let up = relations::construct_above_gd1(&dec, &y, &x4).unwrap();
                assert!(below_gd1(&c.t, &up, &c.inner, &cfg).unwrap().holds);
                let up = relations::construct_above_onegd(&dec, &z, &x4).unwrap();
                assert!(below_onegd(&c.t, &up, &c.inner, &cfg).unwrap().holds);
                checked += 1;
            }
        }
        assert_eq!(checked, values.len() * values.len());
    }
}

#[test]
fn constructive_transitivity_on_po_members() {
    let cfg = cfg();
    for seed in 0..20 {
        let s = random_contractive_drazin(5, 2, seed).unwrap();
        let dec = decomp::core_nilpotent(&s, &cfg).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let sm =
            generate::random_inner_block(&dec, BlockShape { zero_y: true, zero_z: false }, &mut rng, &cfg).unwrap();
        let r = ginv_core::verify::check("cor-po-preorder", &s, &sm, None, &cfg).unwrap();
        assert!(r.passed, "{:?}", r.failures());
        assert!(r.claims.iter().all(|c| c.lhs), "{:?}", r.claims);
    }
}
