//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use lopsp_forge::cli::thread_count;
use lopsp_forge::lopsp::{
    count_report, enumerate_ops, expand, for_each_op, is_c2, is_c3, predecoration_params, Dedup,
    LopspOperation, OpClass,
};
use lopsp_forge::lopsp_apply::{apply, apply_with_path};
use lopsp_forge::map::{CodeScratch, PlaneMap};
use lopsp_forge::oracle_suite::{
    c2_oracle, c3_oracle, dedup_oracle, minimal_cut_paths, rooted_identity, rooted_sum,
    submap_c3_oracle,
};
use lopsp_forge::plane_map_gen::{generate_maps, join, split};
use lopsp_forge::quad_gen::{generate, GenConfig};
use lopsp_forge::rotation_audit::closure_audit;

type Outcome = Result<String, String>;

fn quads(n: usize) -> Vec<PlaneMap> {
    let mut v = Vec::new();
    generate(&GenConfig::new(n), |q| v.push(q.clone()));
    v
}

fn maps(e: usize) -> Vec<PlaneMap> {
    let mut v = Vec::new();
    generate_maps(e, |m| v.push(m.clone()));
    v
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn quad_counts() -> Outcome {
    let table = [
        1u64, 3, 7, 30, 124, 733, 4586, 33373, 259434, 2152298, 18615182,
    ];
    for (i, &want) in table.iter().enumerate() {
        let n = i + 3;
        let mut got = 0u64;
        generate(&GenConfig::new(n), |_| got += 1);
        check(got == want, || format!("n={n}: {got} != {want}"))?;
    }
    Ok("n=3..13 match".into())
}

fn lopsp_counts() -> Outcome {
    #[rustfmt::skip]
    let table: [[u64; 6]; 12] = [
        [2, 2, 2, 2, 2, 2],
        [6, 6, 6, 6, 2, 2],
        [12, 12, 8, 8, 4, 4],
        [54, 54, 30, 30, 6, 6],
        [86, 64, 38, 34, 8, 4],
        [466, 392, 154, 140, 20, 20],
        [730, 380, 194, 148, 30, 20],
        [4182, 2694, 810, 630, 62, 54],
        [6828, 2316, 1034, 638, 102, 64],
        [39624, 18012, 4386, 2766, 198, 144],
        [68402, 14332, 5732, 2728, 318, 132],
        [395976, 118356, 24528, 11928, 664, 404],
    ];
    for (i, row) in table.iter().enumerate() {
        let k = i + 1;
        let r = count_report(k, OpClass::All, thread_count());
        let (a, c2, c3) = (r.all.unwrap(), r.c2.unwrap(), r.c3);
        let got = [a.tot, a.lsp, c2.tot, c2.lsp, c3.tot, c3.lsp];
        check(&got == row, || format!("k={k}: {got:?} != {row:?}"))?;
    }
    Ok("k=1..12, six columns match".into())
}

fn c3_at_scale() -> Outcome {
    let r = count_report(20, OpClass::C3, thread_count());
    check(r.c3.tot == 103028 && r.c3.lsp == 21300, || {
        format!("c3 {} lsp {}", r.c3.tot, r.c3.lsp)
    })?;
    let g = &r.diagnostics.gen;
    let generated = g.accepted[12] + g.pruned_by_filter[12];
    Ok(format!(
        "c3 103028 lsp 21300; soft: quads generated {generated} (598628), candidates {} (17940), bearing {} (9867)",
        r.diagnostics.candidates, r.diagnostics.bearing
    ))
}

fn rooted() -> Outcome {
    for f in 1..=8u32 {
        let (got, want) = (rooted_sum(&quads(f as usize + 2)), rooted_identity(f));
        check(got == want, || format!("f={f}: {got} != {want}"))?;
    }
    Ok("f=1..8 match".into())
}

fn isomorph_free() -> Outcome {
    for n in 3..=9 {
        let all = quads(n);
        let codes: HashSet<Vec<u32>> = all.iter().map(|q| q.canonical_form(None).code).collect();
        check(codes.len() == all.len(), || format!("n={n}: repeated code"))?;
        if n <= 7 {
            let classes = dedup_oracle(&all);
            check(classes == all.len(), || {
                format!("n={n}: search finds {classes} classes")
            })?;
        }
    }
    Ok("codes distinct n<=9, search agrees n<=7".into())
}

fn closure() -> Outcome {
    for n in 3..=8 {
        let r = closure_audit(n, &quads(n));
        check(r.closed && r.connected, || r.to_string())?;
    }
    Ok("closed and connected n<=8".into())
}

fn oracles() -> Outcome {
    let mut compared = 0;
    for k in 1..=10 {
        let (n, _) = predecoration_params(k);
        let mut bad = Vec::new();
        generate(&GenConfig::new(n), |q| {
            enumerate_ops(q, k, Dedup::Full, |p| {
                let c2 = is_c2(p);
                let c3 = c2 && is_c3(p).unwrap();
                let mut ok = submap_c3_oracle(p) == c3;
                if k <= 8 {
                    let o = expand(p).unwrap();
                    ok &= c2_oracle(&o) == c2 && c3_oracle(&o) == c3;
                }
                compared += 1;
                if !ok {
                    bad.push(format!("k={k} marks {:?}", p.marks));
                }
            });
        });
        check(bad.is_empty(), || {
            format!("{} disagreements, first {}", bad.len(), bad[0])
        })?;
    }
    Ok(format!("{compared} operations, zero disagreements"))
}

/// Code up to orientation-preserving isomorphism respecting colours and marks.
fn oriented_op_code(m: &PlaneMap, o: &LopspOperation) -> Vec<u32> {
    let labels: Vec<u32> = (0..m.vertex_count())
        .map(|v| {
            4 * o.colour[v] as u32
                + o.marks
                    .iter()
                    .position(|&x| x == v)
                    .map_or(0, |i| i as u32 + 1)
        })
        .collect();
    let mut s = CodeScratch::new();
    let mut best: Vec<u32> = Vec::new();
    for d in 0..m.dart_count() {
        let prev = if best.is_empty() {
            None
        } else {
            Some(&best[..])
        };
        if s.compute(m, d, true, Some(&labels), prev) == std::cmp::Ordering::Less {
            best = s.code().to_vec();
        }
    }
    best
}

fn counting_identity() -> Outcome {
    for k in 1..=10 {
        let mut tot = 0u64;
        let mut lsp = 0u64;
        let mut oriented = HashSet::new();
        for_each_op(k, OpClass::All, Dedup::Full, |p, f| {
            tot += 1;
            lsp += f.lsp as u64;
            let o = expand(p).unwrap();
            oriented.insert(oriented_op_code(&o.map, &o));
            oriented.insert(oriented_op_code(&o.map.mirror(), &o));
        });
        let mut op = 0u64;
        for_each_op(k, OpClass::All, Dedup::OrientationPreserving, |_, _| {
            op += 1
        });
        let want = 2 * tot - lsp;
        check(op == want && oriented.len() as u64 == want, || {
            format!(
                "k={k}: op run {op}, mirror classes {}, 2tot-lsp {want}",
                oriented.len()
            )
        })?;
    }
    Ok("k<=10 match".into())
}

fn plane_maps() -> Outcome {
    check(maps(1).len() == 2 && maps(2).len() == 4, || {
        "small map counts".into()
    })?;
    let mut n = 0;
    for e in 1..=6 {
        for m in maps(e) {
            let back = split(&join(&m), false);
            check(back.is_isomorphic(&m), || {
                format!("round trip fails for {:?}", m.rotations())
            })?;
            n += 1;
        }
    }
    Ok(format!("counts 2, 4; round trip on {n} maps"))
}

fn application() -> Outcome {
    let mut small: Vec<PlaneMap> = (1..=4).flat_map(maps).collect();
    let id = LopspOperation::identity();
    small.extend([
        PlaneMap::cube(),
        PlaneMap::dodecahedron(),
        PlaneMap::tetrahedron(),
    ]);
    for m in &small {
        check(apply(&id, m).is_isomorphic(m), || {
            "identity changes a map".into()
        })?;
    }
    small.truncate(small.len() - 3);
    let cube = PlaneMap::cube();
    let j = apply(&LopspOperation::join(), &cube);
    check(
        j.is_isomorphic(&join(&cube))
            && (j.vertex_count(), j.edge_count(), j.face_count()) == (14, 24, 12)
            && j.is_quadrangulation(),
        || "join of the cube".into(),
    )?;
    let mut applied = 0;
    for k in 1..=6 {
        let mut ops = Vec::new();
        for_each_op(k, OpClass::All, Dedup::Full, |p, _| {
            ops.push(expand(p).unwrap())
        });
        for o in &ops {
            let paths = if k <= 5 {
                minimal_cut_paths(o)
            } else {
                Vec::new()
            };
            for m in &small {
                let r = apply(o, m);
                check(r.edge_count() == k * m.edge_count(), || {
                    format!("k={k}: edge count")
                })?;
                for p in &paths {
                    let other = apply_with_path(o, m, p).map_err(|e| e.to_string())?;
                    check(other.is_isomorphic(&r), || {
                        format!("k={k}: cut-path dependence")
                    })?;
                }
                applied += 1;
            }
        }
    }
    Ok(format!("{applied} applications checked"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("quadrangulation counts", quad_counts),
        ("lopsp counts", lopsp_counts),
        ("c3 at k=20", c3_at_scale),
        ("rooted identity", rooted),
        ("isomorph-freeness", isomorph_free),
        ("rotation closure", closure),
        ("oracle equivalence", oracles),
        ("counting identity", counting_identity),
        ("plane maps", plane_maps),
        ("application", application),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
