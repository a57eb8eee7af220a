//! Acceptance criteria 1–10, one PASS/FAIL line each. Every expected value
//! is computed here from closed forms or by enumeration, not by the library.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use emtor::graded::{GradedModule, WeightedGradedVectorSpace};
use emtor::groups::catalog_lookup;
use emtor::random::{random_filtered_complex, random_module, ModuleShape};
use emtor::spectral::{degeneration_certificate, em_residue_field, Page, PurityFlags};
use emtor::strata::{equivariant_series, OrbitStratification};
use emtor::toric::{Fan, FanFile};
use emtor::tor::{assemble_cohomology, bar_tor_modules, koszul_tor, tor_with_residue_field, BigradedTor, Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x00ac_ce97;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fans_from(file: &str) -> Vec<(String, Fan)> {
    let path = fixtures_dir().join("fans").join(file);
    let text = std::fs::read_to_string(&path).unwrap();
    let stem = file.trim_end_matches(".json");
    FanFile::parse(&text).unwrap().fans(stem).unwrap()
}

fn fan(file: &str) -> Fan {
    fans_from(file).remove(0).1
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// (degree, weight) -> dim of an exterior algebra with one generator of
/// degree `d - 1` and weight `d` per classifying-ring generator of degree `d`.
fn exterior(bg_degrees: &[usize]) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for mask in 0u32..1 << bg_degrees.len() {
        let (mut n, mut w) = (0, 0);
        for (i, d) in bg_degrees.iter().enumerate() {
            if mask >> i & 1 == 1 {
                n += d - 1;
                w += d;
            }
        }
        *out.entry((n, w)).or_default() += 1;
    }
    out
}

fn table(w: &WeightedGradedVectorSpace, max_weight: usize) -> BTreeMap<(usize, usize), usize> {
    w.entries().filter(|e| e.weight <= max_weight).map(|e| ((e.n, e.weight), e.dim)).collect()
}

/// Dimensions of `H^*(BT) = Q[x_1..x_n]` with `deg x_i = 2`, times the h-polynomial
/// in `t^2`: the Hilbert series of the Stanley-Reisner ring of a complete fan.
fn stanley_reisner_series(h: &[i64], n: usize, top: usize) -> Vec<i64> {
    (0..=top)
        .map(|k| {
            if k % 2 == 1 {
                return 0;
            }
            let m = k / 2;
            (0..=m.min(h.len() - 1)).map(|j| h[j] * binomial(m - j + n - 1, n - 1) as i64).sum()
        })
        .collect()
}

/// h-vector from the f-vector `(f_{-1}, f_0, ...)` of a simplicial fan of rank `n`.
fn h_from_f(f: &[usize], n: usize) -> Vec<i64> {
    (0..=n)
        .map(|k| {
            (0..=k)
                .map(|i| {
                    let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
                    sign * binomial(n - i, k - i) as i64 * f.get(i).copied().unwrap_or(0) as i64
                })
                .sum()
        })
        .collect()
}

/// Predicted `E_r` dimensions from the pairing of a random filtered complex.
fn pairing_page(levels: &[Vec<usize>], pairs: &[(usize, usize, usize)], r: usize) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for (n, lv) in levels.iter().enumerate() {
        for (i, &s) in lv.iter().enumerate() {
            let dead = pairs.iter().any(|&(m, a, b)| {
                (m == n && a == i && levels[n + 1][b] - s < r) || (m + 1 == n && b == i && s - levels[m][a] < r)
            });
            if !dead {
                *out.entry((s, n)).or_default() += 1;
            }
        }
    }
    out
}

struct Run {
    lines: Vec<(u8, bool, String)>,
    tables: Vec<BigradedTor>,
    pure: Vec<(String, GradedModule, usize, BigradedTor)>,
}

impl Run {
    fn record(&mut self, t: BigradedTor) -> BigradedTor {
        self.tables.push(t.clone());
        t
    }

    fn report(&mut self, id: u8, title: &str, failures: Vec<String>, start: Instant, budget: Option<f64>) {
        let secs = start.elapsed().as_secs_f64();
        let mut failures = failures;
        if let Some(limit) = budget.filter(|&l| secs > l) {
            failures.push(format!("took {secs:.1} s, budget {limit:.0} s"));
        }
        let passed = failures.is_empty();
        let detail = if passed { format!("{secs:.2} s") } else { failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ") };
        println!("criterion {id:>2} {title}: {} ({detail})", if passed { "PASS" } else { "FAIL" });
        self.lines.push((id, passed, detail));
    }
}

fn criterion_1_and_6(run: &mut Run) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let degrees = [12, 10, 8];
    let mut instances = Vec::new();
    for i in 0..60 {
        let r = 1 + i % 3;
        let d = degrees[r - 1];
        let m = random_module(&mut rng, ModuleShape { variables: r, truncation: d + 4, max_dim: 4 });
        assert!(m.dims().iter().all(|&x| x <= 4));
        let small = m.truncate(d).unwrap();
        let tors: Vec<BigradedTor> =
            Method::ALL.iter().map(|&meth| run.record(tor_with_residue_field(meth, &small, d).unwrap())).collect();
        for t in &tors[1..] {
            if !tors[0].diff_trusted(t).is_empty() {
                failures.push(format!("module {i}: methods disagree {:?}", tors[0].diff_trusted(t)));
            }
        }
        instances.push((m, d, tors));
    }
    run.report(1, "three-method Tor agreement (60 modules)", failures, start, Some(60.0));

    let start = Instant::now();
    let mut failures = Vec::new();
    for (i, (m, d, tors)) in instances.iter().enumerate() {
        for (&meth, small) in Method::ALL.iter().zip(tors) {
            let big = run.record(tor_with_residue_field(meth, m, d + 4).unwrap());
            let bound = small.trusted_q();
            if big.trusted_q() < bound || big.restrict(bound) != small.restrict(bound) {
                failures.push(format!("module {i} {}: trusted entries moved at D+4", meth.name()));
            }
        }
    }
    run.report(6, "stabilization at D+4", failures, start, None);
}

fn criterion_2(run: &mut Run) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let cases: [(&str, &[usize]); 7] = [
        ("torus:1", &[2]),
        ("torus:2", &[2, 2]),
        ("torus:3", &[2, 2, 2]),
        ("SL:2", &[4]),
        ("SL:3", &[4, 6]),
        ("GL:2", &[2, 4]),
        ("Sp:4", &[4, 8]),
    ];
    for (spec, degrees) in cases {
        let g = catalog_lookup(spec).unwrap();
        assert_eq!(g.bg_generator_degrees(), degrees);
        let trivial = GradedModule::trivial(&g.classifying_ring(), 24);
        let t = run.record(koszul_tor(&trivial, 24).unwrap());
        let bound = t.trusted_q();
        let expected: BTreeMap<_, _> = exterior(degrees).into_iter().filter(|&((_, w), _)| w <= bound).collect();
        if degrees.iter().sum::<usize>() > bound {
            failures.push(format!("{spec}: D = 24 does not reach the top weight"));
        }
        if table(&assemble_cohomology(&t), bound) != expected {
            failures.push(format!("{spec}: assembled cohomology differs from the exterior algebra"));
        }
        run.pure.push((spec.to_string(), trivial, 12, t));
    }
    run.report(2, "free actions recover H*(G)", failures, start, Some(30.0));
}

fn criterion_3(run: &mut Run) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases: Vec<(String, Fan, Vec<usize>)> = vec![
        ("p1".into(), fan("p1.json"), vec![1, 0, 1]),
        ("pp2".into(), fan("pp2.json"), vec![1, 0, 1, 0, 1]),
        ("p1xp1".into(), fan("p1xp1.json"), vec![1, 0, 2, 0, 1]),
        ("blowup_p2".into(), fan("blowup_p2.json"), vec![1, 0, 2, 0, 1]),
    ];
    for (name, f) in fans_from("hirzebruch_a.json") {
        cases.push((name, f, vec![1, 0, 2, 0, 1]));
    }
    assert_eq!(cases.len(), 8);
    for (name, f, betti_expected) in cases {
        let n = f.rank;
        if !f.is_smooth() || !f.is_complete() {
            failures.push(format!("{name}: not smooth and complete"));
            continue;
        }
        let module = f.stanley_reisner_module(12).unwrap();
        let t = run.record(koszul_tor(&module, 12).unwrap());
        let w = assemble_cohomology(&t);
        let betti: Vec<usize> = (0..=2 * n).map(|k| w.total(k)).collect();
        let h = h_from_f(&f.f_vector(), n);
        if betti != betti_expected {
            failures.push(format!("{name}: Betti numbers {betti:?}"));
        }
        if (0..=2 * n).any(|k| k % 2 == 1 && betti[k] != 0) || (0..=n).any(|k| betti[2 * k] as i64 != h[k]) {
            failures.push(format!("{name}: b_2k != h_k ({betti:?} vs {h:?})"));
        }
        if (0..=2 * n).any(|k| betti[k] != betti[2 * n - k]) {
            failures.push(format!("{name}: no Poincare duality"));
        }
        if w.entries().any(|e| e.weight != e.n) {
            failures.push(format!("{name}: impure"));
        }
        run.pure.push((name, module, 10, t));
    }
    run.report(3, "toric Betti numbers and h-vectors", failures, start, Some(60.0));
}

fn criterion_4(run: &mut Run) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut cases = fans_from("cn_minus_origin.json");
    cases.push(("c2_minus_origin".into(), fan("c2_minus_origin.json")));
    for (name, f) in cases {
        let n = f.rank;
        let module = f.stanley_reisner_module(10).unwrap();
        let t = run.record(koszul_tor(&module, 10).unwrap());
        let got = table(&assemble_cohomology(&t), t.trusted_q());
        let expected = BTreeMap::from([((0, 0), 1), ((2 * n - 1, 2 * n), 1)]);
        if got != expected {
            failures.push(format!("{name}: {got:?}"));
        }
        run.pure.push((name, module, 8, t));
    }
    for (name, f) in fans_from("cstar_n.json") {
        let n = f.rank;
        let module = f.stanley_reisner_module(10).unwrap();
        let t = run.record(koszul_tor(&module, 10).unwrap());
        let w = assemble_cohomology(&t);
        let expected: BTreeMap<_, _> = (0..=n).map(|k| ((k, 2 * k), binomial(n, k))).collect();
        if table(&w, t.trusted_q()) != expected {
            failures.push(format!("{name}: {:?}", table(&w, t.trusted_q())));
        }
        // every primitive class has degree 1 and weight 2, so W_{k+a} H^k is
        // all of H^k once a >= k and zero below
        for k in 0..=n {
            for a in 0..=n {
                let want = if a >= k { binomial(n, k) } else { 0 };
                if w.filtered_dim(k, k + a) != want {
                    failures.push(format!("{name}: W_{} H^{k}", k + a));
                }
            }
        }
        run.pure.push((name, module, 8, t));
    }
    run.report(4, "non-complete weights", failures, start, Some(30.0));
}

fn criterion_7(run: &mut Run, pages: &mut BTreeMap<String, Vec<Page>>) {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    for i in 0..60 {
        let f = random_filtered_complex(&mut rng, 30, 4);
        assert!((0..f.complex.degrees()).map(|n| f.complex.dim(n)).sum::<usize>() <= 30);
        assert!(f.complex.length() <= 4);
        let ps = f.complex.pages().unwrap();
        let h = f.complex.cohomology().unwrap();
        let last = ps.last().unwrap();
        if (0..h.len()).any(|n| last.total(n) != h[n]) {
            failures.push(format!("complex {i}: E_infinity totals differ from H"));
        }
        for p in &ps {
            if p.dims != pairing_page(&f.levels, &f.pairs, p.r) {
                failures.push(format!("complex {i}: E_{} differs from the pairing", p.r));
            }
        }
    }
    let mut em_cases: Vec<(String, GradedModule, usize)> =
        run.pure.iter().map(|(n, m, b, _)| (n.clone(), m.clone(), *b)).collect();
    let qt = GradedModule::trivial(&catalog_lookup("torus:1").unwrap().classifying_ring(), 6);
    em_cases.push(("trivial Q[t]".into(), qt, 6));
    for (name, m, bound) in em_cases {
        let em = em_residue_field(&m, bound).unwrap();
        let ps = em.pages().unwrap();
        let top = em.max_bar_degree().unwrap();
        let small = m.truncate(bound).unwrap();
        let bar = run.record(bar_tor_modules(&small, &GradedModule::trivial(m.ring(), bound), bound).unwrap());
        let bar_map: BTreeMap<_, _> = bar.entries().map(|e| ((e.p, e.q), e.dim)).collect();
        if ps[2].bar_bigraded(top) != bar_map {
            failures.push(format!("{name}: E_2 != bar Tor"));
        }
        if ps.iter().any(|p| p.r >= 2 && p.differentials_nonzero() > 0) {
            failures.push(format!("{name}: d_r != 0 for some r >= 2"));
        }
        pages.insert(name, ps);
    }
    run.report(7, "spectral engine convergence", failures, start, Some(60.0));
}

fn criterion_8(run: &mut Run, pages: &BTreeMap<String, Vec<Page>>) {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, _, _, t) in &run.pure {
        let cert = degeneration_certificate(t, PurityFlags::PURE).unwrap();
        // each pair (p, q) -> (p - r, q - r + 1) changes the weight q
        let by_weight = cert.obligations.iter().all(|o| o.source.1 != o.target.1 && o.r >= 2);
        if !(cert.verify(t) && by_weight) {
            failures.push(format!("{name}: certificate does not discharge every d_r"));
        }
        let computed = pages[name].iter().filter(|p| p.r >= 2).all(|p| p.differentials_nonzero() == 0);
        if computed != cert.agrees_with(&pages[name]) || !computed {
            failures.push(format!("{name}: certificate and pages disagree"));
        }
    }
    run.report(8, "degeneration certificate", failures, start, None);
}

fn criterion_9(run: &mut Run) {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (orbits, fan_file) in [("p1_orbits", "p1.json"), ("pp2_orbits", "pp2.json"), ("p1xp1_orbits", "p1xp1.json")] {
        let text = std::fs::read_to_string(fixtures_dir().join("orbits").join(format!("{orbits}.json"))).unwrap();
        let s = OrbitStratification::from_json(&text).unwrap();
        let f = fan(fan_file);
        let series = equivariant_series(&s, 20);
        let module = f.stanley_reisner_module(20).unwrap();
        let closed = stanley_reisner_series(&h_from_f(&f.f_vector(), f.rank), f.rank, 20);
        for k in 0..=20 {
            if series.total(k) != module.dim(k) || module.dim(k) as i64 != closed[k] {
                failures.push(format!("{orbits}: degree {k}: {} {} {}", series.total(k), module.dim(k), closed[k]));
            }
        }
        run.record(koszul_tor(&module, 20).unwrap());
    }
    run.report(9, "strata and toric series agree", failures, start, None);
}

fn criterion_5(run: &mut Run) {
    let start = Instant::now();
    let failures: Vec<String> = run
        .tables
        .iter()
        .flat_map(|t| t.entries().filter(|e| e.dim > 0 && e.q < 2 * e.p).map(|e| format!("Tor_{}^{}", e.p, e.q)))
        .collect();
    let n = run.tables.len();
    run.report(5, &format!("vanishing bound ({n} tables)"), failures, start, None);
}

fn selftest(dir: Option<&Path>) -> Option<i32> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_emtor"));
    cmd.arg("selftest");
    if let Some(d) = dir {
        cmd.arg("--fixtures").arg(d);
    }
    cmd.output().ok().and_then(|o| o.status.code())
}

fn copy_fixtures(to: &Path) {
    for rel in emtor::selftest::FixtureSet::paths() {
        let dst = to.join(rel);
        std::fs::create_dir_all(dst.parent().unwrap()).unwrap();
        std::fs::copy(fixtures_dir().join(rel), dst).unwrap();
    }
}

/// Adds 5 to the first integer literal in `text`.
fn bump_first_integer(text: &str) -> String {
    let start = text.find(|c: char| c.is_ascii_digit()).expect("fixture has a number");
    let end = start + text[start..].find(|c: char| !c.is_ascii_digit()).unwrap_or(text.len() - start);
    let value: u64 = text[start..end].parse().unwrap();
    format!("{}{}{}", &text[..start], value + 5, &text[end..])
}

fn criterion_10(run: &mut Run) {
    let start = Instant::now();
    let mut failures = Vec::new();
    if selftest(None) != Some(0) {
        failures.push("selftest on the bundled fixtures does not exit 0".into());
    }
    let base = tempfile::tempdir().unwrap();
    copy_fixtures(base.path());
    if selftest(Some(base.path())) != Some(0) {
        failures.push("selftest on a copy of the fixtures does not exit 0".into());
    }
    let mut corruptions: Vec<(String, Box<dyn Fn(&str) -> String>)> = Vec::new();
    for rel in emtor::selftest::FixtureSet::paths() {
        corruptions.push((rel.to_string(), Box::new(|t: &str| t[..t.len() / 2].to_string())));
        corruptions.push((rel.to_string(), Box::new(bump_first_integer)));
    }
    // well-formed but wrong content
    corruptions.push(("fans/pp2.json".into(), Box::new(|t: &str| t.replace("[-1, -1]", "[-1, -2]"))));
    corruptions.push(("selftest.json".into(), Box::new(|t: &str| t.replacen("\"h\": [1, 2, 1]", "\"h\": [1, 3, 1]", 1))));
    corruptions.push(("orbits/pp2_orbits.json".into(), Box::new(|t: &str| t.replacen("\"torus:2\"}", "\"torus:1\"}", 1))));
    for (rel, corrupt) in &corruptions {
        let dir = tempfile::tempdir().unwrap();
        copy_fixtures(dir.path());
        let path = dir.path().join(rel);
        let original = std::fs::read_to_string(&path).unwrap();
        let changed = corrupt(&original);
        assert_ne!(changed, original, "corruption of {rel} must change it");
        std::fs::write(&path, changed).unwrap();
        match selftest(Some(dir.path())) {
            Some(2) | Some(3) => {}
            other => failures.push(format!("corrupted {rel}: exit {other:?}")),
        }
    }
    run.report(10, &format!("CLI selftest contract ({} corruptions)", corruptions.len()), failures, start, None);
}

fn main() {
    let mut run = Run { lines: Vec::new(), tables: Vec::new(), pure: Vec::new() };
    let mut pages = BTreeMap::new();
    criterion_1_and_6(&mut run);
    criterion_2(&mut run);
    criterion_3(&mut run);
    criterion_4(&mut run);
    criterion_7(&mut run, &mut pages);
    criterion_8(&mut run, &pages);
    criterion_9(&mut run);
    criterion_5(&mut run);
    criterion_10(&mut run);
    let failed: Vec<u8> = run.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
