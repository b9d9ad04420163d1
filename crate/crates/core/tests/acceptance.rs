//! Acceptance criteria 1–8 at exact equality. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use schurcat::cli::{run, Command, RunConfig};
use schurcat::ext::{
    direct_gb, euler_check, ext_table, koszul_check, run_window, schur_check, ExtConfig, KoszulVerdict, SchurReport, Verdict,
};
use schurcat::gbasis::{dense_component_dim, groebner, hilbert, DegreeCap};
use schurcat::modules::{build_simple, check_relations, trivial_module, truncated_verma, GradedModule, RelationCheck};
use schurcat::presentation::{un_presentation, FSpec, Gen, Params, QMode};
use schurcat::rootdata::{build_cartan, positive_roots, weyl_table, DEFAULT_WEYL_CAP};
use schurcat::{qbinom, QPoint, QScalar};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    ensure(start.elapsed() <= budget, || format!("took {:?}, budget {budget:?}", start.elapsed()))
}

/// Coefficient of `x^β` in `Π_α 1/(1 - x^α)` for every `β` of height ≤ cap.
fn partition_oracle(roots: &[Vec<i64>], cap: i64) -> BTreeMap<Vec<i64>, u64> {
    let r = roots[0].len();
    let mut betas = vec![vec![]];
    for _ in 0..r {
        betas = betas
            .into_iter()
            .flat_map(|b: Vec<i64>| {
                let used: i64 = b.iter().sum();
                (0..=cap - used).map(move |k| {
                    let mut x = b.clone();
                    x.push(k);
                    x
                })
            })
            .collect();
    }
    betas.sort_by_key(|b| b.iter().sum::<i64>());
    let mut t: BTreeMap<Vec<i64>, u64> = betas.iter().map(|b| (b.clone(), u64::from(b.iter().all(|&x| x == 0)))).collect();
    for a in roots {
        for b in &betas {
            let prev: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
            if prev.iter().all(|&x| x >= 0) {
                let add = t[&prev];
                *t.get_mut(b).unwrap() += add;
            }
        }
    }
    t
}

fn c1_pbw() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (s, cap) in [('A', 8usize), ('B', 6)] {
        let c = build_cartan(s, 2).unwrap();
        let p = un_presentation(&c);
        let g = groebner(&p, DegreeCap::len(cap)).map_err(|e| e.to_string())?;
        let h = hilbert(&g, &p.quiver, cap).map_err(|e| e.to_string())?;
        for (beta, want) in partition_oracle(&positive_roots(&c).roots, cap as i64) {
            let got = h.get(&beta).copied().unwrap_or(0);
            ensure(got == want, || format!("{s}2 β={beta:?}: {got} vs {want}"))?;
            checked += 1;
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{checked} multidegrees equal, {:?}", start.elapsed()))
}

fn a1(f: FSpec) -> Params {
    Params::new(build_cartan('A', 1).unwrap(), f)
}

fn check_schur(rep: &SchurReport, label: &str) -> Result<(), String> {
    let e = rep.table.entry(0, 0).unwrap();
    ensure(e.dims() == [1, 0, 1, 0, 0], || format!("{label}: dims {:?}", e.dims()))?;
    ensure(e.stable.iter().all(|&s| s), || format!("{label}: unstable {:?}", e.stable))?;
    ensure(e.dims_by_window[0] == e.dims_by_window[1], || format!("{label}: windows disagree"))?;
    ensure(rep.verdict == Verdict::Match, || format!("{label}: verdict {:?}", rep.verdict))?;
    let ring = rep.ring.as_ref().ok_or("no ring invariants")?;
    ensure(ring.generators == [0, 0, 1, 0, 0], || format!("{label}: generators {:?}", ring.generators))?;
    let y = rep.structure.as_ref().ok_or_else(|| format!("{label}: no structure constants"))?;
    let zz = y.product(2, 0, 2, 0).ok_or("no z·z entry")?;
    ensure(zz.coords.iter().all(QScalar::is_zero), || format!("{label}: z² = {:?}", zz.coords))?;
    ensure(y.unit_ok, || format!("{label}: unit law fails"))
}

fn c2_classical_sl2() -> Outcome {
    let start = Instant::now();
    let p = a1(FSpec::ClassicalLinear);
    let cfg = ExtConfig::new(6, 4, 4);
    for m in [trivial_module(&p, &[0]).unwrap(), build_simple(&p, &[1], 8).unwrap()] {
        let rep = schur_check(&p, &m, &cfg, &mut direct_gb).map_err(|e| e.to_string())?;
        check_schur(&rep, &m.label)?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("trivial and 3-dim simple: (1,0,1,0,0) stable on N=6,8, z²=0, match, {:?}", start.elapsed()))
}

fn c3_quantum_sl2() -> Outcome {
    let start = Instant::now();
    let p = a1(FSpec::QInteger);
    ensure(p.q == QMode::Generic, || "QInteger should default to generic q".into())?;
    let t = trivial_module(&p, &[0]).unwrap();
    let rep = schur_check(&p, &t, &ExtConfig::new(6, 4, 4), &mut direct_gb).map_err(|e| e.to_string())?;
    check_schur(&rep, "quantum trivial")?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("generic q trivial: (1,0,1,0,0), z²=0, match, {:?}", start.elapsed()))
}

fn c4_q_one() -> Outcome {
    let classical = a1(FSpec::ClassicalLinear);
    let at_one = Params::with_q(build_cartan('A', 1).unwrap(), FSpec::QInteger, QMode::At(QPoint::One));
    let build = |p: &Params| vec![trivial_module(p, &[0]).unwrap(), build_simple(p, &[1], 8).unwrap()];
    let cfg = ExtConfig::new(6, 4, 4);
    let a = ext_table(&classical, &build(&classical), &cfg, &mut direct_gb).map_err(|e| e.to_string())?;
    let b = ext_table(&at_one, &build(&at_one), &cfg, &mut direct_gb).map_err(|e| e.to_string())?;
    ensure(a.entries == b.entries, || format!("{:?}\nvs\n{:?}", a.entries, b.entries))?;
    Ok(format!("{} entries equal", a.entries.len()))
}

fn c5_sl3_probe() -> Outcome {
    let start = Instant::now();
    let p = Params::new(build_cartan('A', 2).unwrap(), FSpec::ClassicalLinear);
    let t = trivial_module(&p, &[0, 0]).unwrap();
    let rep = schur_check(&p, &t, &ExtConfig::new(4, 2, 2), &mut direct_gb).map_err(|e| e.to_string())?;
    let e = rep.table.entry(0, 0).unwrap();
    ensure(e.dims() == [1, 0, 2], || format!("dims {:?}", e.dims()))?;
    ensure(e.stable.iter().all(|&s| s), || format!("unstable {:?}", e.stable))?;
    ensure(rep.expected == [1, 0, 2], || format!("target {:?}", rep.expected))?;
    ensure(matches!(rep.verdict, Verdict::Inconclusive { .. }), || format!("verdict {:?}", rep.verdict))?;
    within(start, Duration::from_secs(3600))?;
    Ok(format!("stable (1,0,2), verdict inconclusive below 2ℓ(w0), {:?}", start.elapsed()))
}

fn c6_koszul() -> Outcome {
    let p = a1(FSpec::ClassicalLinear);
    let t = trivial_module(&p, &[0]).unwrap();
    let m = truncated_verma(&p, &[-1], 3).unwrap();
    let cfg = ExtConfig::new(7, 2, 2);
    let rep = koszul_check(&p, &[t.clone(), m], &cfg, &mut direct_gb).map_err(|e| e.to_string())?;
    for (v, w) in [(0, 1), (1, 0)] {
        let d = rep.table.entry(v, w).unwrap();
        ensure(d.dims()[1] == 1 && d.stable[1], || format!("Ext¹({v},{w}) = {} stable {}", d.dims()[1], d.stable[1]))?;
    }
    let g = rep
        .generation
        .iter()
        .find(|g| (g.v, g.w, g.degree) == (0, 0, 2))
        .ok_or("no degree-2 diagonal entry")?;
    ensure(g.ext_dim == 1 && g.generated() && g.reliable, || format!("{g:?}"))?;
    ensure(
        matches!(rep.verdict, KoszulVerdict::Supported { .. } | KoszulVerdict::SupportedOnReliable { .. }),
        || format!("pair verdict {:?}", rep.verdict),
    )?;
    let single = koszul_check(&p, &[t], &cfg, &mut direct_gb).map_err(|e| e.to_string())?;
    ensure(matches!(single.verdict, KoszulVerdict::ListInsufficient { .. }), || format!("single verdict {:?}", single.verdict))?;
    Ok("Ext¹ = 1 both ways, degree-2 class generated, single list insufficient".into())
}

fn c7_euler() -> Outcome {
    let p = a1(FSpec::ClassicalLinear);
    let t = trivial_module(&p, &[0]).unwrap();
    let e = euler_check(&p, &t, &t, &ExtConfig::new(6, 4, 4), &mut direct_gb).map_err(|e| e.to_string())?;
    let order = weyl_table(&p.cartan, DEFAULT_WEYL_CAP).unwrap().order() as i64;
    ensure(e.euler_ext == order && e.consistent, || format!("{e:?} vs |W| = {order}"))?;
    Ok(format!("χ = {} = |W|", e.euler_ext))
}

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn c8_properties() -> Outcome {
    // q-Pascal and bar invariance
    for d in 1..=3u32 {
        let di = d as i64;
        for n in 1..=8u32 {
            for k in 0..=n as i64 {
                let lhs = qbinom(n, k, d);
                let rhs = &(&QScalar::q_pow(-di * k) * &qbinom(n - 1, k, d))
                    + &(&QScalar::q_pow(di * (n as i64 - k)) * &qbinom(n - 1, k - 1, d));
                ensure(lhs == rhs, || format!("q-Pascal n={n} k={k} d={d}"))?;
                ensure(lhs.bar() == lhs, || format!("bar n={n} k={k} d={d}"))?;
                let one = lhs.specialize(&QPoint::One).map_err(|e| e.to_string())?;
                ensure(one == num_rational::BigRational::from_integer(binom(n, k as u32).into()), || format!("q=1 n={n} k={k}"))?;
            }
        }
    }
    // relation checker
    let mut built: Vec<(Params, GradedModule)> = vec![];
    for f in [FSpec::ClassicalLinear, FSpec::QInteger] {
        let p1 = a1(f.clone());
        built.push((p1.clone(), trivial_module(&p1, &[0]).unwrap()));
        built.push((p1.clone(), build_simple(&p1, &[1], 8).unwrap()));
        built.push((p1.clone(), truncated_verma(&p1, &[-1], 3).unwrap()));
        let p2 = Params::new(build_cartan('A', 2).unwrap(), f.clone());
        built.push((p2.clone(), trivial_module(&p2, &[0, 0]).unwrap()));
        built.push((p2.clone(), build_simple(&p2, &[1, 1], 12).unwrap()));
        let b2 = Params::new(build_cartan('B', 2).unwrap(), f);
        built.push((b2.clone(), trivial_module(&b2, &[0, 0]).unwrap()));
    }
    for (p, m) in &built {
        ensure(check_relations(p, m).passed(), || format!("relations fail on {}", m.label))?;
    }
    let (p, mut m) = built[1].clone();
    let (key, block) = m.ops.iter().find(|((g, _), _)| matches!(g, Gen::X(_))).map(|(k, v)| (k.clone(), v.clone())).unwrap();
    m.set_op(key.0, &key.1, block.scale(&QScalar::from_int(2)));
    ensure(matches!(check_relations(&p, &m), RelationCheck::Fail { .. }), || "perturbed module passed".into())?;
    // Gröbner basis against dense rank
    let mut dense = 0;
    for (s, cap) in [('A', 6usize), ('B', 6)] {
        let c = build_cartan(s, 2).unwrap();
        let pres = un_presentation(&c);
        let g = groebner(&pres, DegreeCap::len(cap)).map_err(|e| e.to_string())?;
        for (beta, dim) in hilbert(&g, &pres.quiver, g.certified_len.min(cap)).map_err(|e| e.to_string())? {
            ensure(dim as usize == dense_component_dim(&pres, &beta), || format!("{s}2 {beta:?}"))?;
            dense += 1;
        }
    }
    // d∘d and Ext⁰ Schur lemma on every computed pair
    let p = a1(FSpec::ClassicalLinear);
    let mods = vec![trivial_module(&p, &[0]).unwrap(), build_simple(&p, &[1], 8).unwrap(), truncated_verma(&p, &[-1], 3).unwrap()];
    let n = mods.len();
    let (run_rec, ext0) = run_window(&p, &mods, &ExtConfig::new(7, 3, 2), &mut direct_gb, |ws| {
        let mut out = vec![];
        for i in 0..n {
            for j in 0..n {
                out.push((i, j, ws.ext(i, j, 2)?.dims[0]));
            }
        }
        Ok(out)
    })
    .map_err(|e| e.to_string())?;
    for certs in &run_rec.certificates {
        ensure(certs.iter().all(|c| c.d_squared_zero), || "d∘d ≠ 0".into())?;
    }
    for (i, j, d) in ext0 {
        ensure(d == usize::from(i == j), || format!("Ext⁰({i},{j}) = {d}"))?;
    }
    // reports
    let cfg = RunConfig::from_json(r#"{"type": "A1", "modules": ["trivial:0", "simple:1"], "homcap": 2, "margin": 3}"#).unwrap();
    let a = run(Command::Ext, &cfg).map_err(|e| e.to_string())?;
    let b = run(Command::Ext, &cfg).map_err(|e| e.to_string())?;
    ensure(a.deterministic_json() == b.deterministic_json(), || "reports differ".into())?;
    Ok(format!("identities n ≤ 8, {} modules, {dense} dense degrees, {} pairs, reports identical", built.len(), n * n))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 PBW/Hilbert A2 ≤ 8, B2 ≤ 6", c1_pbw),
        ("2 classical sl2 Schur check", c2_classical_sl2),
        ("3 quantum sl2 Schur check", c3_quantum_sl2),
        ("4 q=1 coherence", c4_q_one),
        ("5 sl3 degree-2 probe", c5_sl3_probe),
        ("6 Koszul pair probe", c6_koszul),
        ("7 Euler characteristic", c7_euler),
        ("8 property suites", c8_properties),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
