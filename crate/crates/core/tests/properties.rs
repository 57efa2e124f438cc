use std::sync::OnceLock;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use lopsp_forge::lopsp::{
    enumerate_ops, expand, is_c2, is_c3, Dedup, LopspOperation, Predecoration,
};
use lopsp_forge::lopsp_apply::apply;
use lopsp_forge::map::codec::read_lopsp_text;
use lopsp_forge::map::{decode, encode, Format, Kind, PlaneMap};
use lopsp_forge::plane_map_gen::generate_maps;
use lopsp_forge::quad_gen::{generate, GenConfig};
use lopsp_forge::rotation_audit::{apply as rotate, moves};

fn quads() -> &'static Vec<PlaneMap> {
    static Q: OnceLock<Vec<PlaneMap>> = OnceLock::new();
    Q.get_or_init(|| {
        let mut v = Vec::new();
        for n in 3..=8 {
            generate(&GenConfig::new(n), |q| v.push(q.clone()));
        }
        v
    })
}

fn small_maps() -> &'static Vec<PlaneMap> {
    static M: OnceLock<Vec<PlaneMap>> = OnceLock::new();
    M.get_or_init(|| {
        let mut v = Vec::new();
        for e in 1..=4 {
            generate_maps(e, |m| v.push(m.clone()));
        }
        v
    })
}

fn predecorations() -> &'static Vec<Predecoration> {
    static P: OnceLock<Vec<Predecoration>> = OnceLock::new();
    P.get_or_init(|| {
        let mut v = Vec::new();
        for k in 1..=7 {
            let (n, _) = lopsp_forge::lopsp::predecoration_params(k);
            generate(&GenConfig::new(n), |q| {
                enumerate_ops(q, k, Dedup::Full, |p| v.push(p.clone()));
            });
        }
        v
    })
}

/// Random relabelling: edges permuted, each edge possibly reversed,
/// vertices permuted.
fn shuffle(m: &PlaneMap, seed: u64) -> (PlaneMap, Vec<usize>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut edges: Vec<usize> = (0..m.edge_count()).collect();
    edges.shuffle(&mut rng);
    let mut darts = vec![0; m.dart_count()];
    for (e, &to) in edges.iter().enumerate() {
        let flip = rng.gen_bool(0.5) as usize;
        darts[2 * e] = 2 * to + flip;
        darts[2 * e + 1] = 2 * to + 1 - flip;
    }
    let mut verts: Vec<usize> = (0..m.vertex_count()).collect();
    verts.shuffle(&mut rng);
    (m.relabel(&darts, &verts), verts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_code_survives_relabelling(i in 0..1000usize, seed in any::<u64>()) {
        let q = &quads()[i % quads().len()];
        let (r, _) = shuffle(q, seed);
        prop_assert_eq!(r.canonical_form(None).code, q.canonical_form(None).code);
        prop_assert_eq!(r.mirror().canonical_form(None).code, q.canonical_form(None).code);
    }

    #[test]
    fn automorphisms_form_a_group(i in 0..1000usize) {
        let q = &quads()[i % quads().len()];
        let auts = q.automorphisms(None);
        for a in &auts {
            prop_assert!(a.is_valid_for(q));
            for b in &auts {
                let c = a.compose(b);
                prop_assert!(auts.contains(&c));
            }
        }
    }

    #[test]
    fn faces_and_euler(i in 0..1000usize) {
        let q = &quads()[i % quads().len()];
        let faces = q.faces();
        prop_assert_eq!(faces.sizes().iter().sum::<usize>(), q.dart_count());
        prop_assert_eq!(q.vertex_count() + faces.len(), q.edge_count() + 2);
        prop_assert!(q.validate(Kind::Quadrangulation));
    }

    #[test]
    fn codecs_round_trip(i in 0..1000usize) {
        let q = quads()[i % quads().len()].clone();
        for format in [Format::PlanarCode, Format::EdgeCode] {
            let bytes = encode(std::slice::from_ref(&q), format).unwrap();
            let back = decode(&bytes, format).unwrap();
            prop_assert_eq!(back.len(), 1);
            // Neighbour lists do not fix the embedding of parallel edges.
            if format == Format::EdgeCode || q.max_parallel_class() == 1 {
                prop_assert!(back[0].is_isomorphic(&q));
            } else {
                prop_assert_eq!(back[0].genus(), 0);
                let lists = |m: &PlaneMap| (0..m.vertex_count()).map(|v| m.neighbours(v)).collect::<Vec<_>>();
                prop_assert_eq!(lists(&back[0]), lists(&q));
            }
        }
    }

    #[test]
    fn barycentric_is_proper_triangulation(i in 0..1000usize) {
        let m = &small_maps()[i % small_maps().len()];
        let b = m.barycentric();
        prop_assert!(b.map.validate(Kind::Triangulation));
        prop_assert!(b.is_proper());
        prop_assert_eq!(b.map.face_count(), 4 * m.edge_count());
        prop_assert_eq!(b.map.vertex_count(), m.vertex_count() + m.edge_count() + m.face_count());
    }

    #[test]
    fn rotations_keep_size(i in 0..1000usize, j in any::<usize>()) {
        let q = &quads()[i % quads().len()];
        let all = moves(q);
        prop_assume!(!all.is_empty());
        let r = rotate(q, &all[j % all.len()]).unwrap();
        prop_assert!(r.is_quadrangulation());
        prop_assert_eq!((r.vertex_count(), r.edge_count()), (q.vertex_count(), q.edge_count()));
    }

    #[test]
    fn classification_survives_relabelling(i in 0..100_000usize, seed in any::<u64>()) {
        let p = &predecorations()[i % predecorations().len()];
        let (q, verts) = shuffle(&p.quad, seed);
        let marks = p.marks.map(|v| verts[v]);
        let u = verts.iter().position(|&v| v == 0).unwrap();
        let c0 = match p.colour[u] {
            1 => 2 - p.colour[p.quad.neighbours(u)[0]],
            c => c,
        };
        let r = Predecoration::new(q, marks, p.v1_colour1, c0).unwrap();
        prop_assert_eq!(is_c2(&r), is_c2(p));
        if is_c2(p) {
            prop_assert_eq!(is_c3(&r).unwrap(), is_c3(p).unwrap());
        }
    }

    #[test]
    fn operation_text_round_trip(i in 0..100_000usize) {
        let p = &predecorations()[i % predecorations().len()];
        let o = expand(p).unwrap();
        prop_assert!(o.validate().is_ok());
        let back = read_lopsp_text(&o.to_record().to_text()).unwrap();
        prop_assert_eq!(LopspOperation::from_record(&back[0]).unwrap(), o);
        let pre = read_lopsp_text(&p.to_record().to_text()).unwrap();
        prop_assert_eq!(&Predecoration::from_record(&pre[0]).unwrap(), p);
    }

    #[test]
    fn application_multiplies_edges(i in 0..100_000usize, j in 0..1000usize) {
        let p = &predecorations()[i % predecorations().len()];
        let m = &small_maps()[j % small_maps().len()];
        let o = expand(p).unwrap();
        let r = apply(&o, m);
        prop_assert_eq!(r.edge_count(), o.inflation_factor() * m.edge_count());
        prop_assert_eq!(r.genus(), 0);
    }
}
