//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --release --test acceptance -- --nocapture`
//! to see the criterion summary and keep the stated runtimes.

use std::collections::BTreeSet;

use khc_core::algebra::{bn_f2h, kh_f2, kh_z, make_theory, Label, Theory};
use khc_core::complex::{
    build_complex, dual_homology, quotient_to_kh, Chain, Gen, HomologyModule,
};
use khc_core::diagram::LinkDiagram;
use khc_core::formal::{
    bracket, check_4tu, deloop, gauss_reduce, normalize, r1_fg_closed, tqft_homology, tqft_morphism,
    verify_r1_proof, verify_r1_proof_with, Cobordism, TangleObj,
};
use khc_core::invariants::{
    bn_generators, plamenevskaya, ribbon_double_check, s_invariant, theta_classes, torsion_profile,
};
use khc_core::movie::{
    closed_surface_value, difference_class, insert_kink, insert_r2, movie_map, Movie, MovieOptions,
};
use khc_core::ring::{EucRing, F2Poly, Int, Ring, F2};

fn data(path: &str) -> String {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/");
    std::fs::read_to_string(format!("{root}{path}")).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn pd(path: &str) -> LinkDiagram {
    LinkDiagram::parse_pd(&data(path)).unwrap()
}

fn movie(path: &str) -> Movie {
    Movie::parse(&data(path)).unwrap()
}

fn braid_file(path: &str) -> (Vec<i32>, usize) {
    let text = data(path);
    let toks: Vec<&str> = text.split_whitespace().collect();
    let strands = toks[1].parse().unwrap();
    let word = toks[2..].iter().map(|t| t.parse().unwrap()).collect();
    (word, strands)
}

fn opts() -> MovieOptions {
    MovieOptions::default()
}

fn verified() -> MovieOptions {
    MovieOptions { verify_steps: true, ..MovieOptions::default() }
}

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

fn golden_knots() -> Vec<(&'static str, LinkDiagram)> {
    vec![
        ("unknot", pd("pd/unknot.pd")),
        ("trefoil-right", pd("pd/trefoil-right.pd")),
        ("trefoil-left", pd("pd/trefoil-left.pd")),
        ("figure8", pd("pd/figure8.pd")),
        ("6_1", pd("pd/6_1.pd")),
        ("8_20", pd("pd/8_20.pd")),
        ("9_46", pd("pd/9_46.pd")),
    ]
}

fn golden_links() -> Vec<(&'static str, LinkDiagram)> {
    let mut v = golden_knots();
    v.push(("hopf-plus", pd("pd/hopf-plus.pd")));
    v.push(("hopf-minus", pd("pd/hopf-minus.pd")));
    v
}

#[test]
fn criterion_01_frobenius_axioms() {
    assert!(kh_z().check_axioms().is_ok());
    assert!(kh_f2().check_axioms().is_ok());
    assert!(bn_f2h().check_axioms().is_ok());
    // the (name, ring) gate
    assert!(make_theory("khovanov", "int").is_ok());
    assert!(make_theory("bar_natan", "f2h").is_ok());
    assert!(make_theory("bar_natan", "int").is_err());
    // sphere and torus composites
    assert_eq!(kh_z().closed_surface(0), Int(0));
    assert_eq!(kh_z().closed_surface(1), Int(2));
    assert!(bn_f2h().closed_surface(1).is_zero());
    println!("criterion 1 (frobenius axioms, sphere 0, torus 2): PASS");
}

#[test]
fn criterion_02_homology_golden_set() {
    for (name, d) in golden_links() {
        let jones = d.kauffman_jones();
        let cz = build_complex(&d, &kh_z()).unwrap();
        cz.verify_d_squared();
        assert_eq!(cz.graded_euler(), jones, "{name}: euler vs jones over Z");
        let hz = cz.homology().module();
        // mirror duality: homology of the transposed complex equals the
        // homology of the mirror diagram, torsion included
        let dual = dual_homology(&cz);
        let hm = build_complex(&d.mirror(), &kh_z()).unwrap().homology().module();
        assert_eq!(dual, hm, "{name}: UCT mirror duality");

        let cf = build_complex(&d, &kh_f2()).unwrap();
        cf.verify_d_squared();
        assert_eq!(cf.graded_euler(), jones, "{name}: euler vs jones over F2");
        let hf = cf.homology().module();
        // over F2 the total rank is the Z free rank plus twice the torsion
        let torsion: usize = hz.entries.values().map(|e| e.torsion.len()).sum();
        assert_eq!(hf.total_free_rank(), hz.total_free_rank() + 2 * torsion, "{name}: F2 rank");
    }

    // 6_1 and 9_46: isomorphic as abstract groups. As *bigraded*
    // modules they provably differ, since their Jones polynomials differ;
    // both facts are checked.
    let k61 = build_complex(&pd("pd/6_1.pd"), &kh_z()).unwrap().homology().module();
    let k946 = build_complex(&pd("pd/9_46.pd"), &kh_z()).unwrap().homology().module();
    let total = |m: &HomologyModule| -> (usize, Vec<u128>) {
        let mut t: Vec<u128> = m.entries.values().flat_map(|e| e.torsion.iter().copied()).collect();
        t.sort_unstable();
        (m.total_free_rank(), t)
    };
    assert_eq!(total(&k61), total(&k946), "total groups of Kh(6_1) and Kh(9_46)");
    assert_eq!(total(&k61), (10, vec![2, 2, 2, 2]));
    assert_ne!(k61, k946, "bigraded modules differ (their Jones polynomials differ)");
    assert_ne!(
        pd("pd/6_1.pd").kauffman_jones(),
        pd("pd/9_46.pd").kauffman_jones(),
        "J(6_1) != J(9_46)"
    );
    println!("criterion 2 (golden set: d2=0, jones oracle, duality, 6_1/9_46 groups): PASS");
}

#[test]
fn criterion_03_reidemeister_invariance_randomized() {
    let mut rng = Rng(0x9e3779b97f4a7c15);
    let theory = kh_f2();
    let mut done = 0;
    while done < 100 {
        let strands = 2 + rng.below(3);
        let len = 3 + rng.below(5);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let k = 1 + rng.below(strands - 1) as i32;
                if rng.below(2) == 0 {
                    k
                } else {
                    -k
                }
            })
            .collect();
        let Ok(base) = LinkDiagram::from_braid(&word, strands) else { continue };
        if base.n() > 8 {
            continue;
        }
        let h0 = build_complex(&base, &theory).unwrap().homology().module();
        let mut cur = base.clone();
        let mut moves_done = 0;
        let mut attempts = 0;
        while moves_done < 3 && attempts < 200 {
            attempts += 1;
            let grow = cur.n() < 9 && rng.below(2) == 0;
            if grow {
                let arcs: Vec<u32> = cur.arcs.clone();
                if rng.below(2) == 0 {
                    let arc = *rng.pick(&arcs);
                    let sign = if rng.below(2) == 0 { 1 } else { -1 };
                    let side = if rng.below(2) == 0 { 'l' } else { 'r' };
                    if let Ok((next, _)) = insert_kink(&cur, arc, sign, side) {
                        cur = next;
                        moves_done += 1;
                    }
                } else {
                    let a = *rng.pick(&arcs);
                    let b = *rng.pick(&arcs);
                    if a != b {
                        if let Ok((next, _)) = insert_r2(&cur, a, b, rng.below(2) as u8) {
                            cur = next;
                            moves_done += 1;
                        }
                    }
                }
            } else {
                // removal: any kink or bigon
                let arcs: Vec<u32> = cur.arcs.clone();
                let mut removed = false;
                for _ in 0..20 {
                    let l = *rng.pick(&arcs);
                    if let Some(next) = khc_core::movie::apply_removal(
                        &cur,
                        &khc_core::movie::MoveSpec::R1 { sign: 1, arc: l, side: None },
                    )
                    .or_else(|| {
                        khc_core::movie::apply_removal(
                            &cur,
                            &khc_core::movie::MoveSpec::R1 { sign: -1, arc: l, side: None },
                        )
                    }) {
                        cur = next;
                        removed = true;
                        break;
                    }
                    let y = *rng.pick(&arcs);
                    if let Some(next) = khc_core::movie::apply_removal(
                        &cur,
                        &khc_core::movie::MoveSpec::R2 { insert: false, over: y, under: l },
                    ) {
                        cur = next;
                        removed = true;
                        break;
                    }
                }
                if removed {
                    moves_done += 1;
                }
            }
        }
        if moves_done < 3 {
            continue;
        }
        let h1 = build_complex(&cur, &theory).unwrap().homology().module();
        assert_eq!(h0, h1, "homology changed: braid {:?} strands {}", word, strands);
        done += 1;
    }
    println!("criterion 3 (100 random diagrams x 3 R-moves, homology unchanged): PASS");
}

#[test]
fn criterion_04_closed_surfaces() {
    let sphere = movie("movies/sphere.movie");
    let torus = movie("movies/torus.movie");
    let genus2 = movie("movies/genus2.movie");
    assert_eq!(closed_surface_value(&sphere, &kh_z(), verified()).unwrap(), Int(0));
    let t = closed_surface_value(&torus, &kh_z(), verified()).unwrap();
    assert!(t == Int(2) || t == Int(-2), "torus gave {t}");
    assert_eq!(closed_surface_value(&genus2, &kh_z(), verified()).unwrap(), Int(0));
    assert!(closed_surface_value(&torus, &bn_f2h(), verified()).unwrap().is_zero());
    assert!(closed_surface_value(&sphere, &bn_f2h(), verified()).unwrap().is_zero());
    println!("criterion 4 (closed surfaces: sphere 0, torus 2, genus-2 0, BN torus 0): PASS");
}

#[test]
fn criterion_05_946_disk_distinction() {
    let m946 = pd("pd/m9_46.pd");
    let m_d = movie("movies/946-mD.movie");
    let m_dp = movie("movies/946-mDprime.movie");
    assert_eq!(m_d.source(), &m946);
    assert_eq!(m_d.chi(), 1);

    // phi and psi at (0, -1), cycles
    let cx = build_complex(&m946, &kh_f2()).unwrap();
    let phi_vertex = 0b000000111u32;
    let phi = Gen { vertex: phi_vertex, labels: (1 << cx.circle_map(phi_vertex).count) - 1 };
    let or = m946.oriented_resolution();
    let sm = m946.resolve(or);
    let mut psi_labels = 0u32;
    for ci in 0..sm.circle_count() {
        let touched = m946.crossings.iter().enumerate().any(|(i, x)| {
            (or >> i) & 1 == 0 && (sm.circle_of(x.arcs[0]) == ci || sm.circle_of(x.arcs[2]) == ci)
        });
        if touched {
            psi_labels |= 1 << ci;
        }
    }
    let psi = Gen { vertex: or, labels: psi_labels };
    for g in [phi, psi] {
        assert_eq!((cx.h_of(g), cx.q_of(g)), (0, -1));
        assert!(cx.is_cycle(g));
    }

    // Kh(-D)(phi) = 1, Kh(-D')(phi) = 0, both send psi to 1 (over F2)
    let scalar = |f: &khc_core::movie::MovieMap<F2>, g: Gen| -> u8 {
        f.apply(&Chain::gen(g)).0.get(&Gen { vertex: 0, labels: 0 }).map(|v| v.0 as u8).unwrap_or(0)
    };
    let f_d = movie_map(&m_d, &kh_f2(), opts()).unwrap();
    let f_dp = movie_map(&m_dp, &kh_f2(), opts()).unwrap();
    assert_eq!(scalar(&f_d, phi), 1, "Kh(-D)(phi)");
    assert_eq!(scalar(&f_dp, phi), 0, "Kh(-D')(phi)");
    assert_eq!(scalar(&f_d, psi), 1, "Kh(-D)(psi)");
    assert_eq!(scalar(&f_dp, psi), 1, "Kh(-D')(psi)");

    // BN: both disks send theta to 1, and pi(theta) = psi at the chain level
    let thetas = theta_classes(&m946).unwrap();
    let fb_d = movie_map(&m_d, &bn_f2h(), opts()).unwrap();
    let fb_dp = movie_map(&m_dp, &bn_f2h(), opts()).unwrap();
    for th in &thetas {
        for f in [&fb_d, &fb_dp] {
            let img = f.apply(th);
            assert_eq!(img.0.len(), 1);
            assert!(img.0.get(&Gen { vertex: 0, labels: 0 }).unwrap().is_one(), "BN(disk)(theta) = 1");
        }
    }
    let bn_cx = build_complex(&m946, &bn_f2h()).unwrap();
    let (_, project) = quotient_to_kh(&bn_cx);
    assert_eq!(project(&thetas[0]), Chain::gen(psi), "pi(theta) = psi");

    // the forward disks: delta_Kh != 0, delta_BN != 0, pi(delta_BN) = delta_Kh
    let d_fwd = movie("movies/946-D.movie");
    let dp_fwd = movie("movies/946-Dprime.movie");
    let one_f2: Chain<F2> = Chain::gen(Gen { vertex: 0, labels: 0 });
    let (dc_kh, f1, _) = difference_class(&d_fwd, &dp_fwd, &kh_f2(), &one_f2, opts()).unwrap();
    assert!(!dc_kh.is_zero_class, "delta_Kh nonzero");
    let one_bn: Chain<F2Poly> = Chain::gen(Gen { vertex: 0, labels: 0 });
    let (dc_bn, f1b, _) = difference_class(&d_fwd, &dp_fwd, &bn_f2h(), &one_bn, opts()).unwrap();
    assert!(!dc_bn.is_zero_class, "delta_BN nonzero");
    let (_, project946) = quotient_to_kh(&f1b.target);
    let diff = project946(&dc_bn.chain).sub(&dc_kh.chain);
    let hom = f1.target.homology();
    assert_eq!(hom.is_zero_class(&f1.target, &diff), Some(true), "pi(delta_BN) = delta_Kh");
    println!("criterion 5 (9_46 disks: phi values, theta to 1, delta classes): PASS");
}

/// Insert a square move (with a duplicated frame) after frame `k`.
fn with_square(m: &Movie, k: usize, arc: u32) -> Movie {
    let mut text = String::new();
    for (i, f) in m.frames.iter().enumerate() {
        text.push_str("frame\n");
        text.push_str(&f.serialize());
        if i == k {
            text.push_str(&format!("square {arc}\n"));
            text.push_str("frame\n");
            text.push_str(&f.serialize());
        }
        if i < m.specs.len() {
            text.push_str(&m.specs[i].line());
            text.push('\n');
        }
    }
    Movie::parse(&text).unwrap()
}

#[test]
fn criterion_06_bn_stabilization() {
    let h = F2Poly::h();
    for name in ["movies/tref-seifert.movie", "movies/946-mD.movie", "movies/torus.movie"] {
        let m = movie(name);
        let f = movie_map(&m, &bn_f2h(), opts()).unwrap();
        // insert the square at every frame with arcs, near the start and end
        let spots: Vec<usize> = (0..m.frames.len())
            .filter(|k| !m.frames[*k].arcs.is_empty())
            .collect();
        for k in [spots.first(), spots.last()].into_iter().flatten() {
            let arc = m.frames[*k].arcs[0];
            let stab = with_square(&m, *k, arc);
            assert_eq!(stab.chi(), m.chi() - 2);
            let g = movie_map(&stab, &bn_f2h(), opts()).unwrap();
            for (gen, img) in &f.images {
                let expected = img.scaled(&h);
                assert_eq!(g.images[gen], expected, "{name}: square at {k} is not H times the map");
            }
        }
    }
    println!("criterion 6 (inserting a square multiplies the BN map by H): PASS");
}

#[test]
fn criterion_07_formal_layer() {
    // normalization confluence: 500 random raw cobordisms, two random orders
    let mut rng = Rng(0x2545f4914f6cdd1d);
    for _ in 0..500 {
        let src_circles = rng.below(3);
        let tgt_circles = rng.below(3);
        let src = TangleObj::closed(src_circles, 0);
        let tgt = TangleObj::closed(tgt_circles, 0);
        let total = src_circles + tgt_circles;
        let ncomp = 1 + rng.below(4);
        // random partition of the curves over the components
        let mut comps: Vec<(u64, usize, usize)> = (0..ncomp)
            .map(|_| (0u64, rng.below(2), rng.below(3)))
            .collect();
        for c in 0..total {
            let k = rng.below(ncomp);
            comps[k].0 |= 1 << c;
        }
        let a = normalize(src.clone(), tgt.clone(), &comps, 1);
        // shuffled component order
        for i in (1..comps.len()).rev() {
            comps.swap(i, rng.below(i + 1));
        }
        let b = normalize(src, tgt, &comps, 1);
        assert!(a.equals(&b), "confluence failure");
    }

    // R1 proof certificate, with its negative control
    assert!(verify_r1_proof().pass());
    assert!(!verify_r1_proof_with(true).pass());

    // 4Tu on four cups
    let e = TangleObj::closed(0, 0);
    let four = TangleObj::closed(4, 0);
    let cs = khc_core::formal::curves(&e, &four);
    let cups: Vec<(u64, usize, usize)> = (0..4).map(|i| (1u64 << cs.tgt(i), 0, 0)).collect();
    assert!(check_4tu(&e, &four, &cups, [0, 1, 2, 3]));

    // tqft of the formal R1 maps equals the movie-layer R1 rows, all theories
    fn compare_r1<R: EucRing>(theory: &Theory<R>) {
        let (f, g) = r1_fg_closed();
        // removal: (strand, kink) -> strand against m - square.counit
        for (s, k) in [(Label::One, Label::One), (Label::One, Label::X), (Label::X, Label::One), (Label::X, Label::X)] {
            let bits = (matches!(s, Label::X) as u32) | ((matches!(k, Label::X) as u32) << 1);
            let got = tqft_morphism(&f, theory, bits);
            // expected: m(s,k) - square(s) . counit(k)
            let mut want: Vec<(u32, R)> = Vec::new();
            for (l, c) in theory.mul(s, k) {
                push(&mut want, matches!(l, Label::X) as u32, c.clone());
            }
            let eps = theory.counit(k);
            for (l, c) in theory.square(s) {
                push(&mut want, matches!(l, Label::X) as u32, c.mul(&eps).neg());
            }
            assert_eq!(sortv(got), sortv(want), "r1 removal row");
        }
        // insertion: strand -> (strand, kink circle labeled 1)
        for s in [Label::One, Label::X] {
            let got = tqft_morphism(&g, theory, matches!(s, Label::X) as u32);
            let want = vec![(matches!(s, Label::X) as u32, R::one())];
            assert_eq!(sortv(got), sortv(want), "r1 insertion row");
        }
        fn push<R: Ring>(acc: &mut Vec<(u32, R)>, k: u32, v: R) {
            if let Some(e) = acc.iter_mut().find(|(b, _)| *b == k) {
                e.1 = e.1.add(&v);
            } else {
                acc.push((k, v));
            }
            acc.retain(|(_, v)| !v.is_zero());
        }
        fn sortv<R: Ring>(mut v: Vec<(u32, R)>) -> Vec<(u32, R)> {
            v.sort_by_key(|(b, _)| *b);
            v
        }
    }
    compare_r1(&kh_z());
    compare_r1(&kh_f2());
    // over Bar-Natan the dotted canonical form is not faithful (its genus
    // reduction bakes in a factor of 2), so the cross-check runs against the
    // movie layer's ornament composite instead: a kink-removal movie must
    // realize m(s, k) - square(s) counit(k) exactly
    {
        let kink = "frame\npd 1\nx 2 1 1 2 -1\nr1- 1\nframe\npd 0\ncomponent 2\n";
        let m = Movie::parse(kink).unwrap();
        let f = movie_map(&m, &bn_f2h(), verified()).unwrap();
        let t = bn_f2h();
        // circles of the kinked unknot at the 1-resolution: strand and loop
        let cx = &f.source;
        let v = 1u32;
        let strand_circle = cx.circle_of_arc(v, 2);
        let loop_circle = cx.circle_of_arc(v, 1);
        for (s, k) in
            [(Label::One, Label::One), (Label::One, Label::X), (Label::X, Label::One), (Label::X, Label::X)]
        {
            let mut labels = 0u32;
            if matches!(s, Label::X) {
                labels |= 1 << strand_circle;
            }
            if matches!(k, Label::X) {
                labels |= 1 << loop_circle;
            }
            let img = f.apply(&Chain::gen(Gen { vertex: v, labels }));
            let mut want: Chain<F2Poly> = Chain::zero();
            for (l, c) in t.mul(s, k) {
                want.add_term(
                    Gen { vertex: 0, labels: matches!(l, Label::X) as u32 },
                    c.clone(),
                );
            }
            let eps = t.counit(k);
            for (l, c) in t.square(s) {
                want.add_term(
                    Gen { vertex: 0, labels: matches!(l, Label::X) as u32 },
                    c.mul(&eps).neg(),
                );
            }
            assert_eq!(img, want, "bn r1 removal row at ({s}, {k})");
        }
    }

    // deloop + gaussian reduction reproduces golden homology with a large
    // generator reduction on the diagrams with at most 7 crossings
    for (name, d) in golden_links() {
        if d.n() > 7 {
            continue;
        }
        let fc = bracket(&d);
        let before = fc.generator_count();
        let (dl, eq1) = deloop(&fc);
        let (red, eq2) = gauss_reduce(&dl);
        if d.n() <= 4 {
            eq1.verify(&fc, &dl);
            eq2.verify(&dl, &red);
        }
        let after = red.generator_count();
        for_both_kh(&d, |theory_name, module| {
            let reduced = match theory_name {
                "kh-z" => tqft_homology(&red, &kh_z()),
                _ => tqft_homology(&red, &kh_f2()),
            };
            assert_eq!(reduced, module, "{name} over {theory_name}: reduced pipeline");
        });
        // the informational 10x threshold is meaningful once the cube is
        // large enough; tiny complexes bottom out at their homology rank
        if d.n() >= 6 {
            assert!(before >= 10 * after, "{name}: reduction {before} -> {after} below 10x");
        } else if d.n() >= 1 {
            assert!(after < before, "{name}: no reduction at all");
        }
    }
    fn for_both_kh(d: &LinkDiagram, mut f: impl FnMut(&str, HomologyModule)) {
        f("kh-z", build_complex(d, &kh_z()).unwrap().homology().module());
        f("kh-f2", build_complex(d, &kh_f2()).unwrap().homology().module());
    }
    println!("criterion 7 (confluence, R1 certificate, tqft tables, reduction pipeline): PASS");
}

#[test]
fn criterion_08_plamenevskaya() {
    let mut rng = Rng(0x853c49e6748fea9b);
    for _ in 0..50 {
        let strands = 2 + rng.below(3);
        let len = 1 + rng.below(8);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let k = 1 + rng.below(strands - 1) as i32;
                if rng.below(2) == 0 {
                    k
                } else {
                    -k
                }
            })
            .collect();
        let psi = plamenevskaya(&word, strands).unwrap();
        let w: i64 = word.iter().map(|x| x.signum() as i64).sum();
        assert_eq!((psi.h, psi.q), (0, w - strands as i64), "bigrading (0, w - n)");
        assert!(psi.certify_cycle(&kh_f2()).unwrap());
    }
    let pos = plamenevskaya(&[1, 1, 1], 2).unwrap();
    assert!(pos.nonzero_in_homology(&kh_f2()).unwrap());
    assert!(pos.nonzero_in_homology(&kh_z()).unwrap());
    let (word, strands) = braid_file("pd/10_148.braid");
    let qp = plamenevskaya(&word, strands).unwrap();
    assert!(qp.certify_cycle(&kh_f2()).unwrap());
    assert!(qp.certify_cycle(&kh_z()).unwrap());
    // quasipositive closure: the state sum agrees with the complex, and the
    // s-invariant takes the slice-Bennequin value w - n + 1 = 2
    let d148 = qp.diagram.clone();
    let cx = build_complex(&d148, &kh_z()).unwrap();
    assert_eq!(cx.graded_euler(), d148.kauffman_jones());
    assert_eq!(s_invariant(&d148).unwrap(), 2, "s of the quasipositive closure");
    println!("criterion 8 (psi bigradings, positive braid nonvanishing, 10_148 cycle and s): PASS");
}

#[test]
fn criterion_09_s_invariant_and_towers() {
    let unknot = pd("pd/unknot.pd");
    assert_eq!(s_invariant(&unknot).unwrap(), 0);
    let t = pd("pd/trefoil-right.pd");
    assert_eq!(s_invariant(&t).unwrap(), 2);
    assert_eq!(s_invariant(&t.mirror()).unwrap(), -2);
    for (name, d) in golden_knots() {
        let s = s_invariant(&d).unwrap();
        let sm = s_invariant(&d.mirror()).unwrap();
        assert_eq!(s, -sm, "{name}: s(mirror) = -s");
        assert_eq!(s % 2, 0, "{name}: s is even");
        // tower structure: s_invariant already demands exactly two free
        // towers at h = 0; confirm no free summands elsewhere
        let bn = build_complex(&d, &bn_f2h()).unwrap();
        let hom = bn.homology();
        for (h, block) in &hom.blocks {
            let free = block.hom.free_rank();
            if *h == 0 {
                assert_eq!(free, 2, "{name}: towers at h=0");
            } else {
                assert_eq!(free, 0, "{name}: stray tower at h={h}");
            }
        }
    }
    println!("criterion 9 (s-invariant values, duality, tower structure): PASS");
}

#[test]
fn criterion_10_ribbon_doubling() {
    let c = movie("movies/tref-ribbon.movie");
    // a genuinely knotted band: the end knot differs from the trefoil
    assert_ne!(c.target().kauffman_jones(), c.source().kauffman_jones());
    let rep = ribbon_double_check(&c, opts()).unwrap();
    assert_eq!(rep.doubled_chi, 0);
    assert!(rep.map_is_identity, "Kh(Cbar . C) = id over F2");
    println!("criterion 10 (ribbon doubling acts as the identity): PASS");
}

#[test]
fn criterion_11_stretch_torsion_profile() {
    // The strongly invertible knot of the paper's spectral-sequence table is
    // given only as a picture; its transcription is not available, so the
    // stretch target runs the profile machinery on the stock knots instead.
    for (name, d) in golden_knots() {
        let p = torsion_profile(&d).unwrap();
        assert!(p.is_monotone(), "{name}: page monotonicity");
        assert_eq!(p.total_stable_rank, 2, "{name}: stable rank 2^1");
        // page 1 must agree with Kh over F2
        let f2 = build_complex(&d, &kh_f2()).unwrap().homology().module();
        for ((h, q), e) in &f2.entries {
            assert_eq!(p.dim(1, *h, *q), e.free, "{name}: page 1 vs Kh/F2 at ({h},{q})");
        }
    }
    let hopf = pd("pd/hopf-plus.pd");
    let p = torsion_profile(&hopf).unwrap();
    assert_eq!(p.total_stable_rank, 4, "hopf: 2^2 towers");
    println!("criterion 11 (stretch surrogate: torsion profiles on stock set; table-3 knot not transcribable): PASS");
}

// ------------------------------------------------ module-level invariants

#[test]
fn invariant_d_squared_random_diagrams() {
    let mut rng = Rng(0xda942042e4dd58b5);
    let mut done = 0;
    while done < 100 {
        let strands = 2 + rng.below(3);
        let len = 2 + rng.below(6);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let k = 1 + rng.below(strands - 1) as i32;
                if rng.below(2) == 0 {
                    k
                } else {
                    -k
                }
            })
            .collect();
        let Ok(d) = LinkDiagram::from_braid(&word, strands) else { continue };
        if d.n() > 8 {
            continue;
        }
        build_complex(&d, &kh_z()).unwrap().verify_d_squared();
        build_complex(&d, &bn_f2h()).unwrap().verify_d_squared();
        // parse . serialize = identity
        assert_eq!(LinkDiagram::parse_pd(&d.serialize()).unwrap(), d);
        done += 1;
    }
    println!("invariant (d^2 = 0 and parse/serialize roundtrip on 100 random diagrams): PASS");
}

#[test]
fn invariant_movie_composition_and_isotopy() {
    // composition: map(concat(m1, m2)) = map(m2) . map(m1)
    let m1 = movie("movies/tref-seifert.movie");
    let m2 = m1.reverse();
    let loop_m = m1.concat(&m2).unwrap();
    let f1 = movie_map(&m1, &kh_z(), opts()).unwrap();
    let f2 = movie_map(&m2, &kh_z(), opts()).unwrap();
    let f = movie_map(&loop_m, &kh_z(), opts()).unwrap();
    for (g, img) in &f.images {
        assert_eq!(*img, f2.apply(&f1.images[g]), "composition at {g}");
    }

    // isotopy smoke test: distant commuting moves give equal maps, and the
    // birth/saddle exchange gives equal maps
    let a = "frame\npd 0\nbirth 1\nframe\npd 0\ncomponent 1\nbirth 2\nframe\npd 0\ncomponent 1\ncomponent 2\nsaddle 1 2\nframe\npd 0\ncomponent 1\n";
    let b = "frame\npd 0\nbirth 2\nframe\npd 0\ncomponent 2\nbirth 1\nframe\npd 0\ncomponent 1\ncomponent 2\nsaddle 1 2\nframe\npd 0\ncomponent 1\n";
    let ma = Movie::parse(a).unwrap();
    let mb = Movie::parse(b).unwrap();
    for_all_theories(|tname| match tname {
        "kh-z" => cmp_maps(&ma, &mb, &kh_z()),
        "kh-f2" => cmp_maps(&ma, &mb, &kh_f2()),
        _ => cmp_maps(&ma, &mb, &bn_f2h()),
    });
    fn cmp_maps<R: EucRing>(a: &Movie, b: &Movie, t: &Theory<R>) {
        let fa = movie_map(a, t, verified()).unwrap();
        let fb = movie_map(b, t, verified()).unwrap();
        for (g, img) in &fa.images {
            assert_eq!(*img, fb.images[g]);
        }
    }
    fn for_all_theories(mut f: impl FnMut(&str)) {
        for t in ["kh-z", "kh-f2", "bn-f2h"] {
            f(t);
        }
    }

    // birth/saddle exchange: a distant birth commutes with a saddle
    let c = "frame\npd 0\ncomponent 1\ncomponent 2\nbirth 3\nframe\npd 0\ncomponent 1\ncomponent 2\ncomponent 3\nsaddle 1 2\nframe\npd 0\ncomponent 1\ncomponent 3\n";
    let d = "frame\npd 0\ncomponent 1\ncomponent 2\nsaddle 1 2\nframe\npd 0\ncomponent 1\nbirth 3\nframe\npd 0\ncomponent 1\ncomponent 3\n";
    let mc = Movie::parse(c).unwrap();
    let md = Movie::parse(d).unwrap();
    cmp_maps(&mc, &md, &kh_z());
    cmp_maps(&mc, &md, &bn_f2h());

    // reordered distant kinks on the trefoil: equal maps up to a global
    // sign over the integers, equal on the nose in characteristic two
    let t = pd("pd/trefoil-right.pd");
    let (t1, s1) = insert_kink(&t, 1, -1, 'l').unwrap();
    let (t12, s2) = insert_kink(&t1, 4, 1, 'r').unwrap();
    let (u1, r1) = insert_kink(&t, 4, 1, 'r').unwrap();
    let (u12, r2) = insert_kink(&u1, 1, -1, 'l').unwrap();
    // the two orders insert the same kinks with different crossing order;
    // align the end diagrams by an explicit relabel+isomorphism check
    let ta = format!(
        "frame\n{}{}\nframe\n{}{}\nframe\n{}",
        t.serialize(), s1.line(), t1.serialize(), s2.line(), t12.serialize()
    );
    let tb = format!(
        "frame\n{}{}\nframe\n{}{}\nframe\n{}",
        t.serialize(), r1.line(), u1.serialize(), r2.line(), u12.serialize()
    );
    let ma = Movie::parse(&ta).unwrap();
    let mb = Movie::parse(&tb).unwrap();
    let fa = movie_map(&ma, &kh_f2(), verified()).unwrap();
    let fb = movie_map(&mb, &kh_f2(), verified()).unwrap();
    // compare through the isomorphism matching the end diagrams
    let iso = khc_core::movie::pd_isomorphism(&ma.frames[2], &mb.frames[2]).expect("end diagrams match");
    let perm = &iso.perm;
    for (g, img) in &fa.images {
        let mapped: Chain<F2> = {
            let mut out = Chain::zero();
            for (tg, c) in &img.0 {
                let mut nv = 0u32;
                for i in 0..ma.frames[2].n() {
                    nv |= ((tg.vertex >> i) & 1) << perm[i];
                }
                // labels transport by arc representatives
                let pm = fa.target.circle_map(tg.vertex);
                let mut labels = 0u32;
                for (ai, ci) in pm.assign.iter().enumerate() {
                    if (tg.labels >> *ci) & 1 == 1 {
                        let arc = fa.target.diagram.arcs[ai];
                        let na = iso.arcs[&arc];
                        labels |= 1 << fb.target.circle_of_arc(nv, na);
                    }
                }
                out.add_term(Gen { vertex: nv, labels }, *c);
            }
            out
        };
        assert_eq!(mapped, fb.images[g], "distant kinks commute at {g}");
    }
    println!("invariant (movie composition and commuting-move isotopy): PASS");
}

#[test]
fn invariant_stock_files_parse_and_verify() {
    // every stock movie parses and carries exactly verified step maps (F2)
    for name in [
        "movies/sphere.movie",
        "movies/torus.movie",
        "movies/genus2.movie",
        "movies/tref-seifert.movie",
        "movies/tref-seifert-reverse.movie",
        "movies/946-mD.movie",
        "movies/946-mDprime.movie",
        "movies/946-D.movie",
        "movies/946-Dprime.movie",
        "movies/tref-ribbon.movie",
    ] {
        let m = movie(name);
        movie_map(&m, &kh_f2(), verified()).unwrap_or_else(|e| panic!("{name}: {e}"));
        // composite-level verification over the integers as well
        movie_map(&m, &kh_z(), opts()).unwrap_or_else(|e| panic!("{name} over Z: {e}"));
    }
    // braid stock files load
    let (w, s) = braid_file("pd/10_148.braid");
    assert_eq!(LinkDiagram::from_braid(&w, s).unwrap().n(), 10);
    let (w, s) = braid_file("pd/2cable-trefoil.braid");
    let cable = LinkDiagram::from_braid(&w, s).unwrap();
    assert_eq!(cable.components.len(), 2, "2-cable has two components");
    // the Seifert-framed 2-copy has linking number zero
    let comp_of = |a: u32| cable.components.iter().position(|c| c.contains(&a)).unwrap();
    let mut lk2 = 0i64;
    for x in &cable.crossings {
        let over_in = if x.sign > 0 { x.arcs[3] } else { x.arcs[1] };
        if comp_of(x.arcs[0]) != comp_of(over_in) {
            lk2 += x.sign as i64;
        }
    }
    assert_eq!(lk2, 0, "0-framed 2-copy linking number");
    println!("invariant (stock data parses; steps verify over F2): PASS");
}

#[test]
fn invariant_bn_generators_and_seifert_image() {
    for (name, d) in golden_knots() {
        let gens = bn_generators(&d).unwrap();
        assert_eq!(gens.len(), 2, "{name}: 2 Lee generators for a knot");
        let (khc, project) = quotient_to_kh(&build_complex(&d, &bn_f2h()).unwrap());
        for g in &gens {
            let p = project(&g.chain);
            // image at H = 0 is the all-x labeling of the oriented resolution
            assert_eq!(p.0.len(), 1);
            let (pg, _) = p.0.iter().next().unwrap();
            assert_eq!(pg.vertex, g.vertex);
            assert_eq!(pg.labels, (1 << khc.circle_map(g.vertex).count) - 1);
        }
    }
    // the Seifert-surface movie hits the all-1 generator of the all-1 vertex
    let m = movie("movies/tref-seifert.movie");
    let f = movie_map(&m, &kh_z(), verified()).unwrap();
    let img = f.apply(&Chain::gen(Gen { vertex: 0, labels: 0 }));
    assert_eq!(img.0.len(), 1);
    let (g, c) = img.0.iter().next().unwrap();
    assert_eq!(g.vertex, 0b111);
    assert_eq!(g.labels, 0);
    assert_eq!(c.norm(), 1, "unit coefficient (sign is conventional over Z)");
    // and the class is nonzero: only split maps can reach the all-1 vertex
    let hom = f.target.homology();
    assert_eq!(hom.is_zero_class(&f.target, &img), Some(false));
    println!("invariant (Lee generators project to the x-pattern; Seifert image nonzero): PASS");
}

#[test]
fn invariant_duality_square_on_movies() {
    // rank of the induced map on homology equals that of the reverse mirror
    let m = movie("movies/tref-seifert.movie");
    let rm = m.reverse_mirror();
    let f = movie_map(&m, &kh_f2(), opts()).unwrap();
    let g = movie_map(&rm, &kh_f2(), opts()).unwrap();
    // m: empty -> -3_1 sends 1 to a nonzero class; rm: 3_1 -> empty must hit
    // a nonzero functional, detected by some basis class mapping to 1
    let img = f.apply(&Chain::gen(Gen { vertex: 0, labels: 0 }));
    let fh = f.target.homology();
    assert_eq!(fh.is_zero_class(&f.target, &img), Some(false));
    let gh = g.source.homology();
    let mut hits = 0;
    for block in gh.blocks.values() {
        for i in 0..block.hom.summands.len() {
            let z = block.chain_of_summand(i);
            let out = g.apply(&z);
            if out.0.get(&Gen { vertex: 0, labels: 0 }).map_or(false, |v| v.0) {
                hits += 1;
            }
        }
    }
    assert!(hits > 0, "dual movie map is nonzero");
    assert_eq!(m.chi(), rm.chi());
    println!("invariant (duality square smoke test): PASS");
}

#[test]
fn invariant_formal_functor_soundness() {
    // tqft of a composition equals the composition of tqft images, for
    // randomized closed cobordism words over the Khovanov theories
    let mut rng = Rng(0xc2b2ae3d27d4eb4f);
    for _ in 0..200 {
        let a = TangleObj::closed(1 + rng.below(2), 0);
        let b = TangleObj::closed(1 + rng.below(2), 0);
        let c = TangleObj::closed(1 + rng.below(2), 0);
        let rand_cob = |rng: &mut Rng, src: &TangleObj, tgt: &TangleObj| -> Cobordism {
            let total = src.circles + tgt.circles;
            let ncomp = 1 + rng.below(2);
            let mut comps: Vec<(u64, usize, usize)> =
                (0..ncomp).map(|_| (0u64, rng.below(2), rng.below(2))).collect();
            for k in 0..total {
                let i = rng.below(ncomp);
                comps[i].0 |= 1 << k;
            }
            normalize(src.clone(), tgt.clone(), &comps, 1 + rng.below(2) as i64)
        };
        let f = rand_cob(&mut rng, &b, &c);
        let g = rand_cob(&mut rng, &a, &b);
        let fg = f.compose(&g);
        let t = kh_z();
        for labels in 0u32..(1 << a.circles) {
            // evaluate g then f against the composite, matching coefficients
            let mut via: Vec<(u32, Int)> = Vec::new();
            for (mid, cg) in tqft_morphism(&g, &t, labels) {
                for (out, cf) in tqft_morphism(&f, &t, mid) {
                    if let Some(e) = via.iter_mut().find(|(b, _)| *b == out) {
                        e.1 = e.1.add(&cg.mul(&cf));
                    } else {
                        via.push((out, cg.mul(&cf)));
                    }
                }
            }
            via.retain(|(_, v)| !v.is_zero());
            via.sort_by_key(|(b, _)| *b);
            let mut direct = tqft_morphism(&fg, &t, labels);
            direct.sort_by_key(|(b, _)| *b);
            assert_eq!(via, direct, "functor soundness");
        }
        // degree additivity when defined
        if let (Some(df), Some(dg), Some(dfg)) = (f.degree(), g.degree(), fg.degree()) {
            if !fg.is_stored_zero() {
                assert_eq!(dfg, df + dg, "degree additive under composition");
            }
        }
    }
    println!("invariant (tqft functor soundness on random cobordisms): PASS");
}

#[test]
fn invariant_euler_matches_jones_on_random_diagrams() {
    let mut rng = Rng(0xa0761d6478bd642f);
    let mut done = 0;
    while done < 30 {
        let strands = 2 + rng.below(2);
        let len = 2 + rng.below(6);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let k = 1 + rng.below(strands - 1) as i32;
                if rng.below(2) == 0 {
                    k
                } else {
                    -k
                }
            })
            .collect();
        let Ok(d) = LinkDiagram::from_braid(&word, strands) else { continue };
        let cx = build_complex(&d, &kh_z()).unwrap();
        assert_eq!(cx.graded_euler(), d.kauffman_jones());
        done += 1;
    }
    println!("invariant (graded euler = state sum on random braids): PASS");
}

#[test]
fn invariant_nontrivial_r2_sites_exhaustive_small() {
    // every planar R2 insertion on the golden <= 6 crossing set yields
    // verified chain maps in every theory (koszul signs exercised)
    let mut sites = 0;
    for (_, d) in golden_links() {
        if d.n() > 4 {
            continue;
        }
        let arcs: Vec<u32> = d.arcs.clone();
        for a in &arcs {
            for b in &arcs {
                if a == b {
                    continue;
                }
                for v in [0u8, 1] {
                    let Ok((next, spec)) = insert_r2(&d, *a, *b, v) else { continue };
                    let text =
                        format!("frame\n{}{}\nframe\n{}", d.serialize(), spec.line(), next.serialize());
                    let m = Movie::parse(&text).unwrap();
                    movie_map(&m, &kh_z(), verified()).unwrap();
                    movie_map(&m, &bn_f2h(), verified()).unwrap();
                    sites += 1;
                }
            }
        }
    }
    assert!(sites >= 20, "too few r2 sites exercised: {sites}");
    let _ = BTreeSet::<u32>::new();
    println!("invariant (exhaustive small r2 insertions verify in all theories): PASS");
}

#[test]
fn invariant_bn_breaks_the_cycle_criterion() {
    // phi and psi are Khovanov cycles but not Bar-Natan cycles, so the
    // fast-path criterion must not be used there
    let m946 = pd("pd/m9_46.pd");
    let bn = build_complex(&m946, &bn_f2h()).unwrap();
    let kh = build_complex(&m946, &kh_f2()).unwrap();
    let phi_vertex = 0b000000111u32;
    let phi = Gen { vertex: phi_vertex, labels: (1 << bn.circle_map(phi_vertex).count) - 1 };
    assert!(kh.is_cycle(phi));
    assert!(!bn.is_cycle(phi), "phi is not a BN cycle");
    let or = m946.oriented_resolution();
    let sm = m946.resolve(or);
    let mut psi_labels = 0u32;
    for ci in 0..sm.circle_count() {
        let touched = m946.crossings.iter().enumerate().any(|(i, x)| {
            (or >> i) & 1 == 0 && (sm.circle_of(x.arcs[0]) == ci || sm.circle_of(x.arcs[2]) == ci)
        });
        if touched {
            psi_labels |= 1 << ci;
        }
    }
    let psi = Gen { vertex: or, labels: psi_labels };
    assert!(kh.is_cycle(psi));
    assert!(!bn.is_cycle(psi), "psi is not a BN cycle");
    println!("invariant (phi, psi cycles over Kh but not over BN): PASS");
}

#[test]
fn invariant_r3_strict_mode_rejects() {
    // an r3 line is refused outright unless --allow-r3 is given
    let d = pd("pd/trefoil-right.pd");
    let text = format!("frame\n{}r3 1 2 3\nframe\n{}", d.serialize(), d.serialize());
    match Movie::parse(&text) {
        Err(khc_core::movie::MovieError::R3Rejected { step: 0 }) => {}
        other => panic!("expected strict-mode rejection, got {:?}", other.map(|_| ())),
    }
    println!("invariant (strict mode rejects R3 moves): PASS");
}

#[test]
fn invariant_trefoil_generator_gallery() {
    // the classic gallery of labeled smoothings in CKh(3_1): bigradings
    // (0,1), (2,5), (3,5), (3,7), (3,9); the (2,5) element is not a cycle
    // and bounds the (3,5) one; the (3,7) classes are nonzero 2-torsion;
    // the (0,1) and (3,9) classes are nonzero
    let d = pd("pd/trefoil-right.pd");
    let cx = build_complex(&d, &kh_z()).unwrap();
    let hom = cx.homology();

    // a1: all-x at the all-0 vertex, bigrading (0,1)
    let a1 = Gen { vertex: 0, labels: 0b11 };
    assert_eq!((cx.h_of(a1), cx.q_of(a1)), (0, 1));
    assert!(cx.is_cycle(a1));
    assert_eq!(hom.is_zero_class(&cx, &Chain::gen(a1)), Some(false));

    // a5: all-1 at the all-1 vertex, bigrading (3,9)
    let a5 = Gen { vertex: 0b111, labels: 0 };
    assert_eq!((cx.h_of(a5), cx.q_of(a5)), (3, 9));
    assert!(cx.is_cycle(a5));
    assert_eq!(hom.is_zero_class(&cx, &Chain::gen(a5)), Some(false));

    // a2 at (2,5): a one-1-one-x labeling of a two-1 vertex that is not a
    // cycle; its boundary is (up to sign) a single generator a3 at (3,5)
    let mut found_a2 = false;
    for v in [0b011u32, 0b101, 0b110] {
        for labels in [0b01u32, 0b10] {
            let g = Gen { vertex: v, labels };
            assert_eq!((cx.h_of(g), cx.q_of(g)), (2, 5));
            if cx.is_cycle(g) {
                continue;
            }
            let dg = cx.d_gen(g);
            if dg.0.len() == 1 {
                let (a3, c) = dg.0.iter().next().unwrap();
                assert_eq!((cx.h_of(*a3), cx.q_of(*a3)), (3, 5));
                assert_eq!(c.norm(), 1);
                assert!(cx.is_cycle(*a3));
                assert_eq!(hom.is_zero_class(&cx, &Chain::gen(*a3)), Some(true), "a3 bounds");
                found_a2 = true;
            }
        }
    }
    assert!(found_a2, "no non-cycle with single-generator boundary at (2,5)");

    // a4 at (3,7): every generator there is a cycle; the nonzero classes
    // are 2-torsion
    let mut nonzero_torsion = 0;
    for labels in [0b001u32, 0b010, 0b100] {
        let g = Gen { vertex: 0b111, labels };
        assert_eq!((cx.h_of(g), cx.q_of(g)), (3, 7));
        assert!(cx.is_cycle(g));
        let z = Chain::gen(g);
        if hom.is_zero_class(&cx, &z) == Some(false) {
            let two_z = z.scaled(&Int(2));
            assert_eq!(hom.is_zero_class(&cx, &two_z), Some(true), "2-torsion");
            nonzero_torsion += 1;
        }
    }
    assert!(nonzero_torsion > 0, "some (3,7) generator represents the torsion class");
    println!("invariant (trefoil generator gallery: cycles, boundary, 2-torsion): PASS");
}

#[test]
fn invariant_once_punctured_torus() {
    // the torus movie without its final death: empty -> unknot sends 1 to a
    // circle labeled 2x
    let text = "frame\npd 0\nbirth 1\nframe\npd 0\ncomponent 1\nsaddle 1 1\nframe\npd 0\ncomponent 1\ncomponent 2\nsaddle 1 2\nframe\npd 0\ncomponent 1\n";
    let m = Movie::parse(text).unwrap();
    assert_eq!(m.chi(), -1);
    let f = movie_map(&m, &kh_z(), verified()).unwrap();
    let img = f.apply(&Chain::gen(Gen { vertex: 0, labels: 0 }));
    assert_eq!(img.0.len(), 1);
    let (g, c) = img.0.iter().next().unwrap();
    assert_eq!((g.vertex, g.labels), (0, 1));
    assert_eq!(*c, Int(2), "1 maps to the 2x-labeled circle");
    // and the class is nonzero but twice a generator
    let hom = f.target.homology();
    assert_eq!(hom.is_zero_class(&f.target, &img), Some(false));
    println!("invariant (once-punctured torus sends 1 to 2x): PASS");
}

#[test]
fn invariant_r3_cone_transport() {
    // the permissive cone accepts configurations whose two resolutions
    // match by relabeling; a crossing-reordered copy of a diagram is the
    // cleanest such instance and exercises the full koszul transport
    let d = pd("pd/trefoil-right.pd");
    let mut reordered = d.crossings.clone();
    reordered.swap(0, 2);
    let d2 = LinkDiagram::new(reordered, vec![]).unwrap();
    let text = format!("frame\n{}r3 1 2 3\nframe\n{}", d.serialize(), d2.serialize());
    // strict mode refuses
    assert!(matches!(
        Movie::parse(&text),
        Err(khc_core::movie::MovieError::R3Rejected { .. })
    ));
    // permissive mode builds the cone and the a-posteriori check passes
    let m = khc_core::movie::parse_movie_with(&text, true).unwrap();
    let f = movie_map(&m, &kh_z(), verified()).unwrap();
    assert_eq!(f.chi, 0);
    movie_map(&m, &bn_f2h(), verified()).unwrap();

    // a genuine R3: the braid relation s1 s2 s1 = s2 s1 s2 on the trefoil
    let a = LinkDiagram::from_braid(&[1, 2, 1], 3).unwrap();
    let b = LinkDiagram::from_braid(&[2, 1, 2], 3).unwrap();
    let site: Vec<String> = a.arcs.iter().map(|x| x.to_string()).collect();
    let text = format!("frame\n{}r3 {}\nframe\n{}", a.serialize(), site.join(" "), b.serialize());
    let m = khc_core::movie::parse_movie_with(&text, true).unwrap();
    let f = movie_map(&m, &kh_z(), verified()).unwrap();
    assert_eq!(f.chi, 0);
    movie_map(&m, &bn_f2h(), verified()).unwrap();
    println!("invariant (permissive r3 cone verifies as a chain map, incl. braid relation): PASS");
}
