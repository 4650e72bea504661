//! End-to-end acceptance checks. Runs as a plain binary that prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use cellarith::debruijn::{
    adjacency_entry, build_colored_graph, enumerate_spatial_fixed_points, fixed_point_subgraph,
    nonlocal_step,
};
use cellarith::digitcore::scan::{digit_scan_form, scan_form_oracle};
use cellarith::digitcore::{boxcar, digit_of, BigCount};
use cellarith::globaldyn::{
    attractors, gardens_of_eden, global_ca_step_u64, shift_group_report, transition_table,
};
use cellarith::lattice::{neighborhood_sequence, step, RingState};
use cellarith::realmap::{
    asymptotic_step, classify_behavior, cycle_detect, parse_rational, phi_of, Behavior, InducedCa,
    MapSpec, Orbit, Thresholds,
};
use cellarith::rulespace::{
    code_of_rule, local_update, rule_from_code, shift_rule, EvalPath, Geometry, RuleSpec, Window,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn geom(l: usize, r: usize, p: u32) -> Geometry {
    Geometry::new(l, r, p).unwrap()
}

fn random_rule(rng: &mut impl Rng, g: Geometry) -> RuleSpec {
    let table = (0..g.table_len())
        .map(|_| rng.gen_range(0..g.radix))
        .collect();
    RuleSpec::from_table(g, table).unwrap()
}

fn rule_code_fidelity() -> Check {
    let g = geom(1, 1, 2);
    let rule = rule_from_code(g, "110").map_err(|e| e.to_string())?;
    ensure!(
        rule.table() == [0, 1, 1, 1, 0, 1, 1, 0],
        "table of 110 is {:?}",
        rule.table()
    );
    ensure!(code_of_rule(&rule) == "110", "110 does not round-trip");
    for (m, code) in [(1, "170"), (2, "204"), (3, "240")] {
        let got = code_of_rule(&shift_rule(g, m).unwrap());
        ensure!(got == code, "shift m={m} has code {got}, expected {code}");
    }
    Ok(())
}

fn path_equivalence() -> Check {
    let g = geom(1, 1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for code in 0..256u32 {
        let rule = rule_from_code(g, &code.to_string()).unwrap();
        for _ in 0..200 {
            let values: Vec<u32> = (0..3).map(|_| rng.gen_range(0..2)).collect();
            let w = Window::new(&g, values.clone()).unwrap();
            let outs: Vec<u32> = EvalPath::ALL
                .iter()
                .map(|&path| local_update(&rule, &w, path).unwrap())
                .collect();
            ensure!(
                outs.iter().all(|&o| o == outs[0]),
                "rule {code} window {values:?}: {outs:?}"
            );
        }
    }
    Ok(())
}

const REFERENCE_9519: [u32; 27] = [
    0, 7, 4, 21, 19, 19, 12, 13, 13, 11, 15, 13, 5, 0, 1, 5, 3, 4, 10, 15, 13, 13, 9, 10, 13, 12,
    13,
];

fn reference_table() -> Check {
    let rule = rule_from_code(geom(0, 1, 3), "9519").unwrap();
    let t = transition_table(&rule, 3).map_err(|e| e.to_string())?;
    ensure!(t.image() == REFERENCE_9519, "image {:?}", t.image());
    let goe = gardens_of_eden(&t);
    ensure!(
        goe == [2, 6, 8, 14, 16, 17, 18, 20, 22, 23, 24, 25, 26],
        "gardens {goe:?}"
    );
    let cycles: Vec<Vec<u64>> = attractors(&t).into_iter().map(|a| a.cycle).collect();
    ensure!(
        cycles == [vec![0], vec![19, 15, 5]],
        "attractors {cycles:?}"
    );
    Ok(())
}

fn garden_window() -> Check {
    let rule = rule_from_code(geom(0, 1, 3), "9519").unwrap();
    let t = transition_table(&rule, 6).map_err(|e| e.to_string())?;
    let total = 729u64;
    for (i, &v) in t.image().iter().enumerate() {
        let digits: Vec<u64> = (0..6).map(|k| (v as u64 / 3u64.pow(k)) % 3).collect();
        let has_block = (0..6).any(|k| digits[k] == 2 && digits[(k + 1) % 6] == 2);
        ensure!(!has_block, "image of {i} is {v}, which contains 22");
        // chi = v / 729 must not lie in (8/9, 1)
        ensure!(
            !(9 * v as u64 > 8 * total && (v as u64) < total),
            "chi({i}) = {v}/729"
        );
    }
    Ok(())
}

fn de_bruijn_structure() -> Check {
    let rule = rule_from_code(geom(1, 1, 2), "232").unwrap();
    let sub = fixed_point_subgraph(&rule);
    let removed: Vec<usize> = (0..8).filter(|&n| !sub.is_kept(n)).collect();
    ensure!(removed == [2, 5], "removed vertices {removed:?}");
    let full = build_colored_graph(&rule);
    for pair in [7usize, 3, 5, 2].windows(2) {
        ensure!(
            full.out_edges(pair[0]).contains(&pair[1]),
            "edge {} -> {} missing",
            pair[0],
            pair[1]
        );
    }
    for ns in 1..=9usize {
        let found: BTreeSet<Vec<u32>> = enumerate_spatial_fixed_points(&rule, ns)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|s| s.sites().to_vec())
            .collect();
        let mut brute = BTreeSet::new();
        for i in 0..(1u64 << ns) {
            let sites: Vec<u32> = (0..ns).map(|k| ((i >> k) & 1) as u32).collect();
            let s = RingState::new(2, sites.clone()).unwrap();
            if step(&rule, &s).unwrap() == s {
                brute.insert(sites);
            }
        }
        ensure!(
            found == brute,
            "N_s = {ns}: {} found, {} by brute force",
            found.len(),
            brute.len()
        );
    }
    Ok(())
}

fn nonlocal_global_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    for (g, ns) in [
        (geom(1, 1, 2), 11usize),
        (geom(0, 1, 3), 9),
        (geom(0, 2, 2), 8),
        (geom(1, 0, 3), 7),
    ] {
        for _ in 0..100 {
            let rule = random_rule(&mut rng, g);
            let s = RingState::random(g.radix, ns, &mut rng).unwrap();
            let seq = neighborhood_sequence(&g, &s);
            let next = nonlocal_step(&rule, &seq).map_err(|e| e.to_string())?;
            let oracle = neighborhood_sequence(&g, &step(&rule, &s).unwrap());
            ensure!(
                next == oracle,
                "rule {} state {:?}",
                code_of_rule(&rule),
                s.sites()
            );
            for j in 0..ns {
                let a = next[j];
                let b = next[(j + 1) % ns];
                ensure!(
                    adjacency_entry(g.radix, g.range(), a, b) == 1,
                    "{a} -> {b} is not adjacent"
                );
            }
        }
    }
    for g in [
        geom(1, 1, 2),
        geom(0, 2, 2),
        geom(2, 0, 2),
        geom(0, 1, 3),
        geom(1, 0, 3),
    ] {
        for _ in 0..50 {
            let rule = random_rule(&mut rng, g);
            let t = transition_table(&rule, g.range()).unwrap();
            for (i, &v) in t.image().iter().enumerate() {
                let got = global_ca_step_u64(&rule, i as u64).map_err(|e| e.to_string())?;
                ensure!(
                    got == v as u64,
                    "global step of {i} is {got}, table says {v}"
                );
            }
        }
    }
    Ok(())
}

fn group_axioms() -> Check {
    for rho in 2..=4usize {
        for p in [2u32, 3, 5] {
            for left in 0..rho {
                let g = geom(left, rho - 1 - left, p);
                let report = shift_group_report(g, rho).map_err(|e| e.to_string())?;
                ensure!(
                    report.all_passed(),
                    "{g} on {rho} sites:\n{}",
                    report.to_text()
                );
                ensure!(report.order == rho, "{g}: order {}", report.order);
            }
        }
    }
    let report = shift_group_report(geom(1, 1, 2), 4).unwrap();
    ensure!(
        !report.axiom("closure").unwrap().passed,
        "closure holds on 4 sites"
    );
    Ok(())
}

fn digit_identity_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let radices = [2u32, 3, 5, 7, 10];
    for _ in 0..10_000 {
        let p = radices[rng.gen_range(0..radices.len())];
        let a: u128 = rng.gen_range(0..10u128.pow(30));
        let big = BigCount::from(BigUint::from(a));
        let count = big.digit_count(p);
        // identity: digits reconstruct A
        let mut total = 0u128;
        let mut w = 1u128;
        for i in 1..=count as u64 {
            total += w * digit_of(p, i, &big).unwrap() as u128;
            w = w.saturating_mul(p as u128);
        }
        ensure!(total == a, "reconstruction of {a} in base {p}");
        // bound: digits beyond the length vanish
        let beyond = count as u64 + rng.gen_range(1..50);
        ensure!(
            digit_of(p, beyond, &big).unwrap() == 0,
            "digit {beyond} of {a} in base {p}"
        );

        // Kronecker form on powers
        let i = rng.gen_range(1..=12u64);
        let m = rng.gen_range(1..=12u32);
        let power = BigCount::pow(p as u64, m - 1);
        ensure!(
            digit_of(p, i, &power).unwrap() as u8 == boxcar(i as i64 - m as i64),
            "krone {p} {i} {m}"
        );
        let swapped = BigCount::pow(p as u64, i as u32 - 1);
        ensure!(
            digit_of(p, m as u64, &swapped).unwrap() == digit_of(p, i, &power).unwrap(),
            "krone symmetry"
        );

        // cut form: digit i of A (A <= 12) as a sum over j <= B
        let small = rng.gen_range(1..=12u64);
        let b = rng.gen_range(small..=small + 20);
        let pa = BigCount::pow(p as u64, small as u32 - 1);
        let sum: u64 = (1..=b)
            .map(|j| {
                digit_of(p, i, &BigCount::from(j)).unwrap() as u64
                    * digit_of(p, j, &pa).unwrap() as u64
            })
            .sum();
        ensure!(
            sum == digit_of(p, i, &BigCount::from(small)).unwrap() as u64,
            "cut form {p} {i} {small} {b}"
        );

        // boxcar scan of a digit
        let a_small = rng.gen_range(0..=10_000u64);
        let q = rng.gen_range(2..=16u64);
        let pos = rng.gen_range(1..=5u32);
        let scan = digit_scan_form(q, pos, a_small);
        let direct = digit_of(q as u32, pos as u64, &BigCount::from(a_small)).unwrap() as u64;
        ensure!(scan == direct, "scan digit {q} {pos} {a_small}");
    }
    for _ in 0..1000 {
        let m = rng.gen_range(0..=10_000u64);
        let p = rng.gen_range(1..=16u64);
        ensure!(
            scan_form_oracle(m, p) == (m / p, m % p),
            "scan division {m} / {p}"
        );
    }
    Ok(())
}

fn defect_contract() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    for mu in ["4/5", "16/5", "383/100"] {
        let map = MapSpec::logistic(&parse_rational(mu).unwrap()).unwrap();
        for ns in [10u32, 50] {
            let total = BigUint::from(1u64 << ns);
            let inv = BigRational::new(1.into(), num_bigint::BigInt::from(total.clone()));
            for _ in 0..1000 {
                let i = BigUint::from(rng.gen_range(0..1u64 << ns));
                let phi = phi_of(&i, &total);
                let chi = map.evaluate_exact(&phi).unwrap();
                let next = map.image(&i, &total).map_err(|e| e.to_string())?;
                let defect = chi - phi_of(&next, &total);
                ensure!(
                    !defect.is_negative() && defect < inv,
                    "mu {mu}, N_s {ns}, I {i}"
                );
            }
        }
    }
    Ok(())
}

fn real_period(mu: f64) -> Option<u64> {
    let mut x = 1e-6;
    for _ in 0..200_000 {
        x = mu * x * (1.0 - x);
    }
    let start = x;
    (1..=64).find(|_| {
        x = mu * x * (1.0 - x);
        (x - start).abs() < 1e-9
    })
}

fn logistic_phenomenology() -> Check {
    let run = |mu: &str, max_steps: u64| {
        let ca = InducedCa::new(MapSpec::logistic_str(mu).unwrap(), 2, 50).unwrap();
        let start = ca.seed_index(1).unwrap();
        let orbit = cycle_detect(|s| ca.step(s), start, max_steps).unwrap();
        let class = classify_behavior(&orbit, |s| ca.is_homogeneous(s), Thresholds::default());
        (orbit, class)
    };

    let (orbit, class) = run("0.8", 150);
    let r = orbit.report().ok_or("mu 0.8 unresolved")?;
    ensure!(
        r.period == 1 && r.cycle[0].is_zero(),
        "mu 0.8 ends on {:?}",
        r.cycle
    );
    ensure!(
        r.transient <= 150 && class == Behavior::Class1,
        "mu 0.8: {class}"
    );

    let (orbit, class) = run("1.21", 10_000);
    let r = orbit.report().ok_or("mu 1.21 unresolved")?;
    ensure!(
        r.period <= 4 && !r.cycle[0].is_zero(),
        "mu 1.21: period {}",
        r.period
    );
    ensure!(class == Behavior::Class2, "mu 1.21: {class}");

    let (orbit, _) = run("3.2", 10_000);
    ensure!(orbit.period() == Some(2), "mu 3.2: {:?}", orbit.period());

    let p = 1_000_000u64;
    for (mu, expected) in [("3.2", 2u64), ("3.83", 3)] {
        let oracle = real_period(mu.parse().unwrap());
        ensure!(
            oracle == Some(expected),
            "real map at {mu} has period {oracle:?}"
        );
        let map = MapSpec::logistic_str(mu).unwrap();
        let orbit = cycle_detect(|&x| asymptotic_step(&map, p, x), 1u64, 1_000_000).unwrap();
        match orbit {
            Orbit::Resolved(r) => ensure!(
                r.period == expected,
                "asymptotic map at {mu}: period {}",
                r.period
            ),
            Orbit::Unresolved { .. } => return Err(format!("asymptotic map at {mu} unresolved")),
        }
    }
    Ok(())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for case in common::GOLDENS {
        let expected =
            std::fs::read(common::golden_dir().join(case.name)).map_err(|e| e.to_string())?;
        for threads in [1, 2, 8] {
            for run in 0..2 {
                let got = common::produce(case, threads, dir.path());
                ensure!(
                    got == expected,
                    "{} differs (threads {threads}, run {run})",
                    case.name
                );
            }
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "rule-code fidelity",
            rule_code_fidelity,
            Duration::from_secs(1),
        ),
        (
            "local-update path equivalence",
            path_equivalence,
            Duration::from_secs(5),
        ),
        (
            "reference transition table",
            reference_table,
            Duration::from_secs(1),
        ),
        (
            "characteristic-function gap",
            garden_window,
            Duration::from_secs(1),
        ),
        (
            "de Bruijn structure",
            de_bruijn_structure,
            Duration::from_secs(2),
        ),
        (
            "nonlocal and global consistency",
            nonlocal_global_consistency,
            Duration::from_secs(30),
        ),
        ("shift group axioms", group_axioms, Duration::from_secs(10)),
        (
            "digit identities",
            digit_identity_suite,
            Duration::from_secs(10),
        ),
        (
            "one-step defect bound",
            defect_contract,
            Duration::from_secs(30),
        ),
        (
            "logistic phenomenology",
            logistic_phenomenology,
            Duration::from_secs(60),
        ),
        ("CLI determinism", determinism, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let status = match &outcome {
            Ok(()) if elapsed <= *budget => "PASS".to_string(),
            Ok(()) => format!("FAIL (over the {:.0}s budget)", budget.as_secs_f64()),
            Err(msg) => format!("FAIL ({msg})"),
        };
        if !status.starts_with("PASS") {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {:>8.3}s  {status}",
            k + 1,
            name,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
