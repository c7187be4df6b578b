//! Acceptance run: one PASS/FAIL line per criterion, exact comparisons
//! throughout, each criterion under its stated time limit.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use sections_core::gadgets::verify::{
    verify_h5_vectors, verify_main_identity, verify_polygon, verify_unique_product_permutations,
    verify_unique_product_words, verify_unique_sum,
};
use sections_core::gadgets::{
    make_h5_vectors, make_main_gadget_elements, make_polygon_gadget, make_superincreasing, make_unique_product_gadget,
    vec2,
};
use sections_core::group::{Element, GroupDescriptor, HeisenbergElement};
use sections_core::reductions::{
    bounded_submonoid_membership, build_reduction, reduce_conjugate_membership, section_equivalence_check,
    ProductInstance, ReductionKind, SectionReduction, SubmonoidPresentation,
};
use sections_core::words::{check_prop21, t_y_x_word, Word};
use sections_core::EnumerationBudget;

type Check = Result<String, String>;

type Criterion = (u32, &'static str, Option<Duration>, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

// H3 with i64 coordinates: x^a y^b z^c, y^b x^a' = x^a' y^b z^{-a'b}.
type H3 = (i64, i64, i64);

fn h3_mul(p: H3, q: H3) -> H3 {
    (p.0 + q.0, p.1 + q.1, p.2 + q.2 - q.0 * p.1)
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

/// Twice the signed area between the lattice path with steps `(1, b_k)` in
/// order and the one with the steps permuted, walked back (shoelace).
fn twice_area(b: &[i64], order: &[usize]) -> i64 {
    let walk = |steps: Vec<i64>| {
        let mut pts = vec![(0i64, 0i64)];
        for s in steps {
            let (x, y) = *pts.last().unwrap();
            pts.push((x + 1, y + s));
        }
        pts
    };
    let mut back = walk(order.iter().map(|&i| b[i]).collect());
    back.reverse();
    let poly: Vec<(i64, i64)> = walk(b.to_vec()).into_iter().chain(back.into_iter().skip(1)).collect();
    (0..poly.len())
        .map(|k| {
            let (x0, y0) = poly[k];
            let (x1, y1) = poly[(k + 1) % poly.len()];
            x0 * y1 - x1 * y0
        })
        .sum()
}

fn canonical_b(n: usize) -> Vec<i64> {
    let mut b = vec![1i64];
    for i in 2..=n as i64 {
        b.push(i * b.last().unwrap() + 1);
    }
    b
}

fn criterion_1() -> Check {
    let cert = check_prop21(4, 9).map_err(err)?;
    ensure(cert.is_verified(), format!("{:?}", cert.verdict))?;
    ensure(cert.examined == 29524, format!("examined {}", cert.examined))?;
    // independent enumeration with i64 arithmetic
    let letters: [H3; 3] = [(-1, 0, 1), (0, 1, 0), (1, 0, 0)];
    let mut found = Vec::new();
    let mut count = 0u64;
    let mut layer: Vec<(Vec<usize>, H3)> = vec![(vec![], (0, 0, 0))];
    for len in 0..=9 {
        for (w, v) in &layer {
            count += 1;
            if *v == (0, 1, 0) {
                found.push(Word(w.clone()));
            }
        }
        if len == 9 {
            break;
        }
        layer = layer
            .iter()
            .flat_map(|(w, v)| {
                letters.iter().enumerate().map(move |(i, l)| {
                    let mut w2 = w.clone();
                    w2.push(i);
                    (w2, h3_mul(*v, *l))
                })
            })
            .collect();
    }
    found.sort();
    let expected: Vec<Word> = (0..=4).map(t_y_x_word).collect();
    ensure(count == 29524, format!("oracle enumerated {count} words"))?;
    ensure(found == expected, format!("oracle found {found:?}"))?;
    Ok("29524 words, value y exactly for t^n y x^n, n <= 4".into())
}

fn criterion_2() -> Check {
    for n in 1..=8usize {
        let c = verify_unique_sum(&make_superincreasing(n).map_err(err)?);
        ensure(c.is_verified(), format!("n={n}: {:?}", c.verdict))?;
        let compositions = (1..=n as u64).fold(1u64, |acc, k| acc * (n as u64 - 1 + k) / k);
        ensure(c.examined == compositions, format!("n={n}: examined {}", c.examined))?;
        ensure(
            make_superincreasing(n).unwrap().terms() == canonical_b(n).into_iter().map(big).collect::<Vec<_>>(),
            format!("n={n}: unexpected b"),
        )?;
    }
    Ok("n <= 8, all alpha with sum n examined".into())
}

fn criterion_3() -> Check {
    for n in 1..=5 {
        let g = make_unique_product_gadget(n).map_err(err)?;
        let b = canonical_b(n);
        let e: i64 = 1
            + (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| b[j] - b[i])
                .sum::<i64>();
        ensure(
            g.modulus() == &big(e),
            format!("n={n}: e = {}, expected {e}", g.modulus()),
        )?;
        let c = verify_unique_product_permutations(&g);
        ensure(c.is_verified(), format!("n={n} permutations: {:?}", c.verdict))?;
    }
    for n in 1..=4 {
        let g = make_unique_product_gadget(n).map_err(err)?;
        let c = verify_unique_product_words(&g, &EnumerationBudget::pruned(n)).map_err(err)?;
        ensure(c.is_verified(), format!("n={n} all-words: {:?}", c.verdict))?;
    }
    let g = make_unique_product_gadget(3).map_err(err)?;
    let b = canonical_b(3);
    let mut oracle: Vec<i64> = permutations(3).iter().map(|p| twice_area(&b, p) / 2).collect();
    oracle.sort();
    let mut computed: Vec<BigInt> = permutations(3).iter().map(|p| g.defect(p)).collect();
    computed.sort();
    ensure(
        computed == oracle.iter().copied().map(big).collect::<Vec<_>>(),
        format!("defects {computed:?}, oracle {oracle:?}"),
    )?;
    ensure(oracle == [0, 2, 7, 11, 16, 18], format!("oracle multiset {oracle:?}"))?;
    let cert = verify_unique_product_permutations(&g);
    ensure(
        cert.details["max_defect_order"] == serde_json::json!([2, 1, 0]),
        "maximum not attained by h_3 h_2 h_1",
    )?;
    let stated = [0, 2, 7, 9, 16, 18];
    Ok(format!(
        "n <= 5 permutations, n <= 4 all-words; n=3 defects {oracle:?}, max 18 at h_3 h_2 h_1 \
         (stated multiset {stated:?} lists 9, which no ordering attains: the transposition of h_1, h_3 alone \
         is not an inversion set)"
    ))
}

fn criterion_4() -> Check {
    let mut checked = 0;
    for n in 1..=5 {
        let g = make_unique_product_gadget(n).map_err(err)?;
        let b = canonical_b(n);
        for p in permutations(n) {
            ensure(
                big(2) * g.defect(&p) == big(twice_area(&b, &p)),
                format!(
                    "n={n} order {p:?}: defect {} vs area/2 {}",
                    g.defect(&p),
                    twice_area(&b, &p)
                ),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} orderings, defect = shoelace area exactly"))
}

fn criterion_5() -> Check {
    for n in 2..=10 {
        let c = verify_h5_vectors(&make_h5_vectors(n).map_err(err)?);
        ensure(c.is_verified(), format!("n={n}: {:?}", c.verdict))?;
    }
    let g = make_h5_vectors(3).map_err(err)?;
    ensure(g.u() == [vec2(-3, 0), vec2(3, -1), vec2(0, 1)], "n=3 u differs")?;
    ensure(g.v() == [vec2(1, 2), vec2(1, 5)], "n=3 v differs")?;
    Ok("2 <= n <= 10; n=3 u=((-3,0),(3,-1),(0,1)), v=((1,2),(1,5))".into())
}

fn criterion_6() -> Check {
    for n in 2..=6 {
        let m = make_main_gadget_elements(&make_h5_vectors(n).map_err(err)?);
        for l in 1..=5 {
            ensure(
                &m.interleaved_power(l) == m.target(),
                format!("identity fails at n={n} l={l}"),
            )?;
        }
        // the target is vv_1 .. vv_{n-1}, multiplied out here
        let mut h = HeisenbergElement::identity(2);
        for v in m.vv() {
            h = h.multiply(v).map_err(err)?;
        }
        ensure(&h == m.target(), format!("n={n}: target is not vv_1 .. vv_(n-1)"))?;
    }
    let mut words = 0;
    for n in 2..=3 {
        let m = make_main_gadget_elements(&make_h5_vectors(n).map_err(err)?);
        let c = verify_main_identity(&m, 2, &EnumerationBudget::pruned(8)).map_err(err)?;
        ensure(c.is_verified(), format!("ordering n={n}: {:?}", c.verdict))?;
        words += c.examined;
    }
    Ok(format!(
        "identity n <= 6, l <= 5; ordering n <= 3, l <= 2, length <= 8 ({words} cases)"
    ))
}

fn criterion_7() -> Check {
    for n in 2..=8 {
        let g = make_polygon_gadget(n).map_err(err)?;
        let c = verify_polygon(&g, 5);
        ensure(c.is_verified(), format!("n={n}: {:?}", c.verdict))?;
        for (i, uu) in g.lifted_vertices().iter().enumerate() {
            for (j, y) in g.conjugators().iter().enumerate() {
                let z = uu.conjugate(y).map_err(err)?.z().clone();
                ensure(z >= big(0), format!("n={n} i={i} j={j}: exponent {z}"))?;
                ensure((z == big(0)) == (i == j), format!("n={n} i={i} j={j}: exponent {z}"))?;
            }
        }
        for l in 1..=5u64 {
            let mut acc = HeisenbergElement::identity(2);
            for u in g.u() {
                let lu: Vec<BigInt> = u.iter().map(|c| c * l).collect();
                acc = acc.multiply(&HeisenbergElement::x_pow(&lu)).map_err(err)?;
            }
            ensure(acc.is_identity(), format!("n={n} l={l}: telescoping product {acc}"))?;
        }
    }
    Ok("polygons n <= 8: exponent >= 0, zero iff i = j; telescoping for l <= 5".into())
}

fn z1(v: i64) -> Element {
    Element::lattice_i64(&[v])
}

fn z2(a: i64, b: i64) -> Element {
    Element::lattice_i64(&[a, b])
}

fn h3(x: i64, y: i64, z: i64) -> Element {
    HeisenbergElement::from_i64(&[x], &[y], z).into()
}

fn regression_suite() -> Vec<(String, ProductInstance)> {
    let z = GroupDescriptor::lattice(1);
    let zz = GroupDescriptor::lattice(2);
    let h = GroupDescriptor::heisenberg(1);
    let cases: Vec<(&str, GroupDescriptor, Vec<Vec<Element>>)> = vec![
        ("Z n=1", z.clone(), vec![vec![z1(2), z1(3)]]),
        ("Z n=2", z.clone(), vec![vec![z1(1)], vec![z1(-2)]]),
        ("Z n=3", z, vec![vec![z1(1)], vec![z1(-2)], vec![z1(2)]]),
        ("Z^2 n=1", zz.clone(), vec![vec![z2(1, 0), z2(0, 1)]]),
        ("Z^2 n=2", zz.clone(), vec![vec![z2(1, 0)], vec![z2(0, 1)]]),
        ("Z^2 n=3", zz, vec![vec![z2(1, 0)], vec![z2(0, 1)], vec![z2(-1, -2)]]),
        ("H3 n=1", h.clone(), vec![vec![h3(1, 0, 0), h3(0, 1, 0)]]),
        ("H3 n=2", h.clone(), vec![vec![h3(1, 0, 0)], vec![h3(0, 1, 0)]]),
        (
            "H3 n=3",
            h,
            vec![vec![h3(1, 0, 0)], vec![h3(0, 1, 0)], vec![h3(1, -1, 2)]],
        ),
    ];
    cases
        .into_iter()
        .map(|(name, g, subs)| (name.to_string(), ProductInstance::new(g, subs, None).unwrap()))
        .collect()
}

fn corrupt(red: &SectionReduction, k: i64) -> Result<SectionReduction, String> {
    let z: Element = HeisenbergElement::z_pow(2, big(k)).into();
    red.with_target(red.target().multiply(&z).map_err(err)?).map_err(err)
}

fn criterion_8() -> Check {
    let mut runs = 0;
    for (name, inst) in regression_suite() {
        for kind in [ReductionKind::ProductH5, ReductionKind::ConjugateH5] {
            let red = build_reduction(kind, &inst).map_err(err)?;
            let rep = section_equivalence_check(&red, 3, 12, None).map_err(err)?;
            ensure(rep.passed(), format!("{name} {kind}: {}", rep.to_json()))?;
            runs += 1;
        }
    }
    let inst =
        ProductInstance::new(GroupDescriptor::lattice(2), vec![vec![z2(1, 0)], vec![z2(0, 1)]], None).map_err(err)?;
    let red = build_reduction(ReductionKind::ProductH5, &inst).map_err(err)?;
    for k in [1, -1] {
        let rep = section_equivalence_check(&corrupt(&red, k)?, 3, 12, None).map_err(err)?;
        ensure(
            rep.status() == "failed",
            format!("corrupted target (z^{k}) not flagged"),
        )?;
    }
    Ok(format!(
        "{runs} reductions passed at ball 3, word bound 12; both corrupted targets flagged"
    ))
}

fn criterion_9() -> Check {
    type Oracle = fn(&[i64]) -> bool;
    type Case = (&'static str, GroupDescriptor, Vec<Element>, Vec<Element>, Oracle);
    let cases: Vec<Case> = vec![
        (
            "Z, S={1}",
            GroupDescriptor::lattice(1),
            vec![z1(1)],
            vec![z1(2), z1(-1), z1(0)],
            |g| g[0] >= 0,
        ),
        (
            "Z, S={2,3}",
            GroupDescriptor::lattice(1),
            vec![z1(2), z1(3)],
            vec![z1(1), z1(-3)],
            |g| g[0] >= 0 && g[0] != 1,
        ),
        (
            "Z^2, S={(1,0),(0,1)}",
            GroupDescriptor::lattice(2),
            vec![z2(1, 0), z2(0, 1)],
            vec![z2(1, 0), z2(0, 2), z2(-1, -1)],
            |g| g[0] >= 0 && g[1] >= 0,
        ),
    ];
    let mut agreed = 0;
    for (name, group, gens, conj, oracle) in cases {
        let s = SubmonoidPresentation::new(group.clone(), gens).map_err(err)?;
        let rank = group.abelian_rank();
        let ball: Vec<Vec<i64>> = if rank == 1 {
            (-3..=3).map(|a| vec![a]).collect()
        } else {
            (-3i64..=3)
                .flat_map(|a| (-3i64..=3).map(move |b| vec![a, b]))
                .filter(|v| v[0].abs() + v[1].abs() <= 3)
                .collect()
        };
        for g in ball {
            let (red, query) = reduce_conjugate_membership(&Element::lattice_i64(&g), &s, &conj).map_err(err)?;
            let len = red.completeness_length(3);
            let v = bounded_submonoid_membership(&red, &query, &EnumerationBudget::pruned(len)).map_err(err)?;
            ensure(!v.is_truncated(), format!("{name} g={g:?}: search truncated"))?;
            ensure(
                v.is_member() == oracle(&g),
                format!(
                    "{name} g={g:?}: reduction says {}, oracle {}",
                    v.is_member(),
                    oracle(&g)
                ),
            )?;
            agreed += 1;
        }
    }
    Ok(format!("{agreed}/{agreed} ball elements agree with the direct check"))
}

fn sections(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_sections"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(err)?;
    let mut bytes = o.stdout;
    bytes.extend(o.stderr);
    bytes.extend(format!("exit {:?}", o.status.code()).bytes());
    Ok(bytes)
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let d = dir.path();
    let files = [
        (
            "z2.json",
            r#"{"version": 1, "group": {"lattice": {"rank": 2}}, "submonoids": [[["1", "0"]], [["0", "1"]]]}"#,
        ),
        (
            "h3.json",
            r#"{"version": 1, "group": {"heisenberg": {"d": 1}}, "submonoids": [[{"x": ["1"], "y": ["0"], "z": "0"}], [{"x": ["0"], "y": ["1"], "z": "0"}]]}"#,
        ),
        (
            "zc.json",
            r#"{"version": 1, "group": {"lattice": {"rank": 1}}, "submonoids": [[["2"]]], "conjugators": [["-1"], ["1"]]}"#,
        ),
        ("e.json", r#"["2", "1"]"#),
    ];
    for (name, text) in files {
        fs::write(d.join(name), text).map_err(err)?;
    }
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify", "prop21", "--max-n", "4", "--max-len", "9", "--out", "c1.json"],
        vec!["verify", "unique-sum", "--n", "6", "--out", "c2.json"],
        vec!["verify", "unique-product", "--n", "4", "--out", "c3.json"],
        vec![
            "verify",
            "unique-product",
            "--n",
            "3",
            "--mode",
            "all-words",
            "--out",
            "c4.json",
        ],
        vec!["verify", "h5-vectors", "--n", "5", "--out", "c5.json"],
        vec!["verify", "polygon", "--n", "6", "--out", "c6.json"],
        vec![
            "verify",
            "main-identity",
            "--n",
            "3",
            "--l",
            "2",
            "--max-len",
            "8",
            "--out",
            "c7.json",
        ],
        vec!["build", "pair", "--instance", "h3.json", "--out", "r1.json"],
        vec!["build", "conjugate", "--instance", "zc.json", "--out", "r2.json"],
        vec!["build", "product-h5", "--instance", "z2.json", "--out", "r3.json"],
        vec!["build", "conjugate-h5", "--instance", "z2.json", "--out", "r4.json"],
        vec![
            "member",
            "--reduction",
            "r3.json",
            "--element",
            "e.json",
            "--max-len",
            "9",
            "--witness-out",
            "w3.json",
        ],
        vec![
            "member",
            "--reduction",
            "r4.json",
            "--element",
            "e.json",
            "--max-len",
            "12",
            "--witness-out",
            "w4.json",
        ],
        vec![
            "check-equivalence",
            "--instance",
            "z2.json",
            "--ball",
            "2",
            "--word-bound",
            "8",
        ],
    ];
    let artifacts = [
        "c1.json", "c2.json", "c3.json", "c4.json", "c5.json", "c6.json", "c7.json", "r1.json", "r2.json", "r3.json",
        "r4.json", "w3.json", "w4.json",
    ];
    let mut runs: Vec<HashMap<String, Vec<u8>>> = Vec::new();
    for workers in ["1", "3"] {
        let mut out = HashMap::new();
        for (i, cmd) in commands.iter().enumerate() {
            let mut args = vec!["--workers", workers];
            args.extend(cmd.iter().copied());
            out.insert(format!("command {i}"), sections(d, &args)?);
        }
        for a in artifacts {
            out.insert(a.to_string(), fs::read(d.join(a)).map_err(|e| format!("{a}: {e}"))?);
        }
        for a in artifacts {
            fs::remove_file(d.join(a)).map_err(err)?;
        }
        runs.push(out);
    }
    let differing: BTreeSet<&String> = runs[0].keys().filter(|k| runs[0][*k] != runs[1][*k]).collect();
    ensure(
        differing.is_empty(),
        format!("outputs differ between runs: {differing:?}"),
    )?;
    Ok(format!(
        "{} commands run twice (1 and 3 workers), outputs and {} artifacts byte-identical",
        commands.len(),
        artifacts.len()
    ))
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "words with value y", Some(Duration::from_secs(5)), criterion_1),
        (2, "unique sum", Some(Duration::from_secs(1)), criterion_2),
        (3, "unique product", Some(Duration::from_secs(30)), criterion_3),
        (4, "signed-area law", None, criterion_4),
        (5, "H5 vectors", Some(Duration::from_secs(1)), criterion_5),
        (
            6,
            "interleaved identity and ordering",
            Some(Duration::from_secs(60)),
            criterion_6,
        ),
        (7, "polygon conjugation", None, criterion_7),
        (8, "section equals product", Some(Duration::from_secs(300)), criterion_8),
        (9, "conjugate membership pipeline", None, criterion_9),
        (10, "determinism", None, criterion_10),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match (result, limit) {
            (Ok(msg), Some(l)) if took > l => Err(format!("{msg}; took {took:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        match result {
            Ok(msg) => println!("PASS criterion {id:>2} ({name}): {msg} [{took:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({name}): {msg} [{took:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
