//! End-to-end self test over the bundled fixtures: one verdict per
//! acceptance criterion 1–9.
//!
//! Loading problems (unreadable or invalid fixtures) are reported as
//! [`SelftestError`]; failed checks show up as failing criteria.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graded::{GradedModule, WeightedGradedVectorSpace};
use crate::groups::{catalog_lookup, GroupData};
use crate::random::{random_filtered_complex, random_module, ModuleShape};
use crate::spectral::{degeneration_certificate, em_residue_field, Page, PurityFlags};
use crate::strata::{equivariant_series, OrbitStratification};
use crate::toric::{Fan, FanFile};
use crate::tor::{
    assemble_cohomology, bar_tor_modules, koszul_tor, purity_check, tor_with_residue_field, BigradedTor, Method,
    TorError,
};

pub const MANIFEST: &str = "selftest.json";
pub const FAN_FILES: [&str; 9] = [
    "fans/p1.json",
    "fans/pp2.json",
    "fans/p1xp1.json",
    "fans/hirzebruch_a.json",
    "fans/blowup_p2.json",
    "fans/c2.json",
    "fans/c2_minus_origin.json",
    "fans/cn_minus_origin.json",
    "fans/cstar_n.json",
];
pub const ORBIT_FILES: [&str; 3] = ["orbits/p1_orbits.json", "orbits/pp2_orbits.json", "orbits/p1xp1_orbits.json"];

const COMPLETE_REQUIRED: [&str; 7] =
    ["p1", "pp2", "p1xp1", "hirzebruch_0", "hirzebruch_1", "hirzebruch_2", "hirzebruch_3"];
const PUNCTURED_REQUIRED: [&str; 3] = ["punctured_affine_1", "punctured_affine_2", "punctured_affine_3"];
const TORUS_REQUIRED: [&str; 3] = ["torus_1", "torus_2", "torus_3"];
const GROUPS_REQUIRED: [&str; 7] = ["torus:1", "torus:2", "torus:3", "SL:2", "SL:3", "GL:2", "Sp:4"];
const STRATA_REQUIRED: [&str; 3] = ["p1", "pp2", "p1xp1"];

macro_rules! bundled {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../fixtures/", $path)))),*]
    };
}

const BUNDLED: &[(&str, &str)] = bundled!(
    "selftest.json",
    "fans/p1.json",
    "fans/pp2.json",
    "fans/p1xp1.json",
    "fans/hirzebruch_a.json",
    "fans/blowup_p2.json",
    "fans/c2.json",
    "fans/c2_minus_origin.json",
    "fans/cn_minus_origin.json",
    "fans/cstar_n.json",
    "orbits/p1_orbits.json",
    "orbits/pp2_orbits.json",
    "orbits/p1xp1_orbits.json",
);

#[derive(Debug, Error)]
pub enum SelftestError {
    #[error("cannot read fixture {file}: {message}")]
    Io { file: String, message: String },
    #[error("invalid fixture {file}: {message}")]
    Invalid { file: String, message: String },
}

/// Raw fixture texts keyed by path relative to the fixture directory.
#[derive(Clone, Debug)]
pub struct FixtureSet {
    files: BTreeMap<String, String>,
}

impl FixtureSet {
    pub fn bundled() -> Self {
        FixtureSet { files: BUNDLED.iter().map(|(p, t)| (p.to_string(), t.to_string())).collect() }
    }

    pub fn from_dir(dir: &Path) -> Result<Self, SelftestError> {
        let mut files = BTreeMap::new();
        for rel in Self::paths() {
            let path = dir.join(rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| SelftestError::Io { file: path.display().to_string(), message: e.to_string() })?;
            files.insert(rel.to_string(), text);
        }
        Ok(FixtureSet { files })
    }

    /// Every fixture path, relative to the fixture directory.
    pub fn paths() -> impl Iterator<Item = &'static str> {
        std::iter::once(MANIFEST).chain(FAN_FILES).chain(ORBIT_FILES)
    }

    pub fn get(&self, rel: &str) -> Option<&str> {
        self.files.get(rel).map(String::as_str)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    seed: u64,
    random_modules: RandomModules,
    random_complexes: RandomComplexes,
    groups: GroupsSection,
    toric: ToricSection,
    noncomplete: NoncompleteSection,
    strata: StrataSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomModules {
    count: usize,
    /// Truncation degree for 1, 2 and 3 variables.
    degrees: [usize; 3],
    max_dim: usize,
    /// Extra degrees for the stabilization rerun.
    extra: usize,
    fingerprint: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomComplexes {
    count: usize,
    max_total: usize,
    max_length: usize,
    fingerprint: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupsSection {
    degree: usize,
    pages_degree: usize,
    specs: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ToricSection {
    degree: usize,
    pages_degree: usize,
    fans: BTreeMap<String, CompleteExpectation>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompleteExpectation {
    smooth: bool,
    complete: bool,
    h: Vec<i64>,
    betti: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoncompleteSection {
    degree: usize,
    pages_degree: usize,
    /// `[degree, weight, dim]` for every nonzero piece.
    fans: BTreeMap<String, Vec<[usize; 3]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrataSection {
    degree: usize,
    /// Orbit file stem -> fan name.
    pairs: BTreeMap<String, String>,
}

struct Loaded {
    manifest: Manifest,
    fans: BTreeMap<String, Fan>,
    orbits: BTreeMap<String, OrbitStratification>,
    groups: Vec<GroupData>,
}

fn invalid(file: &str, message: impl ToString) -> SelftestError {
    SelftestError::Invalid { file: file.to_string(), message: message.to_string() }
}

fn stem(rel: &str) -> &str {
    let name = rel.rsplit('/').next().unwrap_or(rel);
    name.strip_suffix(".json").unwrap_or(name)
}

fn load(fixtures: &FixtureSet) -> Result<Loaded, SelftestError> {
    let text = |rel: &str| fixtures.get(rel).ok_or_else(|| invalid(rel, "missing"));
    let manifest: Manifest = serde_json::from_str(text(MANIFEST)?).map_err(|e| invalid(MANIFEST, e))?;
    let mut fans = BTreeMap::new();
    for rel in FAN_FILES {
        let file = FanFile::parse(text(rel)?).map_err(|e| invalid(rel, e))?;
        for (name, fan) in file.fans(stem(rel)).map_err(|e| invalid(rel, e))? {
            if fans.insert(name.clone(), fan).is_some() {
                return Err(invalid(rel, format!("fan {name} defined twice")));
            }
        }
    }
    let mut orbits = BTreeMap::new();
    for rel in ORBIT_FILES {
        let s = OrbitStratification::from_json(text(rel)?).map_err(|e| invalid(rel, e))?;
        orbits.insert(stem(rel).to_string(), s);
    }
    let groups = manifest
        .groups
        .specs
        .iter()
        .map(|s| catalog_lookup(s).map_err(|e| invalid(MANIFEST, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let named = manifest.toric.fans.keys().chain(manifest.noncomplete.fans.keys()).chain(manifest.strata.pairs.values());
    for name in named {
        if !fans.contains_key(name) {
            return Err(invalid(MANIFEST, format!("unknown fan {name}")));
        }
    }
    for name in manifest.strata.pairs.keys() {
        if !orbits.contains_key(name) {
            return Err(invalid(MANIFEST, format!("unknown orbit file {name}")));
        }
    }
    Ok(Loaded { manifest, fans, orbits, groups })
}

/// Overrides for a run.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Replaces the manifest seed; the recorded fingerprints are then not checked.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {}: {} ({}; {:.2} s)",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail,
            self.seconds
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub criteria: Vec<CriterionReport>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

const TITLES: [&str; 9] = [
    "three-method Tor agreement",
    "free actions recover H*(G)",
    "toric Betti numbers and h-vectors",
    "non-complete weights",
    "vanishing bound",
    "stabilization at D+4",
    "spectral engine convergence",
    "degeneration certificate",
    "strata and toric series agree",
];

/// A pure input whose pages and certificate criterion 8 compares.
struct PurePipeline {
    label: String,
    module: GradedModule,
    pages_bound: usize,
    /// The Tor table of the main run.
    tor: BigradedTor,
}

#[derive(Default)]
struct Context {
    tor_count: usize,
    vanishing: Vec<String>,
    instances: Vec<(usize, GradedModule, Vec<BigradedTor>)>,
    pure: Vec<PurePipeline>,
    pages: BTreeMap<String, Vec<Page>>,
}

impl Context {
    fn record(&mut self, label: &str, t: Result<BigradedTor, TorError>) -> Result<BigradedTor, String> {
        self.tor_count += 1;
        match t {
            Ok(t) => {
                if let Some((p, q)) = t.vanishing_violation() {
                    self.vanishing.push(format!("{label}: Tor_{p}^{q}"));
                }
                Ok(t)
            }
            Err(TorError::VanishingViolated { p, q }) => {
                self.vanishing.push(format!("{label}: Tor_{p}^{q}"));
                Err(format!("{label}: vanishing bound violated at ({p}, {q})"))
            }
            Err(e) => Err(format!("{label}: {e}")),
        }
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Result<Outcome, String> {
    if failures.is_empty() {
        Ok(Outcome { passed: true, detail: summary })
    } else {
        let shown: Vec<_> = failures.iter().take(3).cloned().collect();
        let more = if failures.len() > 3 { format!(" and {} more", failures.len() - 3) } else { String::new() };
        Ok(Outcome { passed: false, detail: format!("{}{more}", shown.join("; ")) })
    }
}

fn fnv1a(bytes: &[u8], mut h: u64) -> u64 {
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;

fn check_fingerprint(failures: &mut Vec<String>, recorded: &str, h: u64, checked: bool) {
    let computed = format!("{h:016x}");
    if checked && recorded != computed {
        failures.push(format!("instance fingerprint {computed} differs from the recorded {recorded}"));
    }
}

fn criterion_1(l: &Loaded, ctx: &mut Context, seed: u64, checked: bool) -> Result<Outcome, String> {
    let spec = &l.manifest.random_modules;
    let mut failures = Vec::new();
    if spec.count < 50 {
        failures.push(format!("only {} modules requested, need at least 50", spec.count));
    }
    if spec.degrees.iter().any(|&d| d > 12) || spec.max_dim > 4 {
        failures.push("module shape exceeds D <= 12 or dims <= 4".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = FNV_OFFSET;
    for i in 0..spec.count {
        let r = 1 + i % 3;
        let d = spec.degrees[r - 1];
        let m = random_module(&mut rng, ModuleShape { variables: r, truncation: d + spec.extra, max_dim: spec.max_dim });
        h = fnv1a(serde_json::to_string(&m.to_json()).map_err(|e| e.to_string())?.as_bytes(), h);
        let small = m.truncate(d).map_err(|e| e.to_string())?;
        let mut tors = Vec::new();
        for method in Method::ALL {
            tors.push(ctx.record(&format!("module {i} {}", method.name()), tor_with_residue_field(method, &small, d))?);
        }
        for (method, t) in Method::ALL.iter().zip(&tors).skip(1) {
            let diff = tors[0].diff_trusted(t);
            if !diff.is_empty() {
                failures.push(format!("module {i}: koszul and {} differ at {:?}", method.name(), diff[0]));
            }
        }
        ctx.instances.push((d, m, tors));
    }
    check_fingerprint(&mut failures, &spec.fingerprint, h, checked);
    outcome(failures, format!("{} modules, three methods agree", spec.count))
}

fn criterion_6(l: &Loaded, ctx: &mut Context) -> Result<Outcome, String> {
    let extra = l.manifest.random_modules.extra;
    let mut failures = Vec::new();
    if extra < 4 {
        failures.push(format!("rerun adds {extra} degrees, need 4"));
    }
    let instances = std::mem::take(&mut ctx.instances);
    for (i, (d, m, tors)) in instances.iter().enumerate() {
        for (method, small) in Method::ALL.iter().zip(tors) {
            let big = ctx.record(&format!("module {i} {} at D+{extra}", method.name()), tor_with_residue_field(*method, m, d + extra))?;
            let diff = small.diff_trusted(&big);
            if !diff.is_empty() {
                failures.push(format!("module {i} {}: entry {:?} moved", method.name(), diff[0]));
            }
        }
    }
    outcome(failures, format!("{} modules recomputed at D+{extra}, zero diffs", instances.len()))
}

/// Entries of `w` with weight at most `bound`.
fn entries_up_to(w: &WeightedGradedVectorSpace, bound: usize) -> Vec<[usize; 3]> {
    w.entries().filter(|e| e.weight <= bound).map(|e| [e.n, e.weight, e.dim]).collect()
}

fn criterion_2(l: &Loaded, ctx: &mut Context) -> Result<Outcome, String> {
    let sec = &l.manifest.groups;
    let mut failures = Vec::new();
    for name in GROUPS_REQUIRED {
        if !sec.specs.iter().any(|s| s == name) {
            failures.push(format!("group {name} missing from the manifest"));
        }
    }
    for g in &l.groups {
        let ring = g.classifying_ring();
        let trivial = GradedModule::trivial(&ring, sec.degree);
        let t = ctx.record(&g.name, koszul_tor(&trivial, sec.degree))?;
        let expected = g.group_cohomology().to_weighted();
        let top_weight: usize = g.bg_generator_degrees().iter().sum();
        if top_weight > t.trusted_q() {
            failures.push(format!("{}: degree {} does not reach weight {top_weight}", g.name, sec.degree));
        }
        let got = entries_up_to(&assemble_cohomology(&t), t.trusted_q());
        if got != entries_up_to(&expected, t.trusted_q()) {
            failures.push(format!("{}: assembled cohomology {:?} differs from the exterior algebra", g.name, got));
        }
        ctx.pure.push(PurePipeline { label: g.name.clone(), module: trivial, pages_bound: sec.pages_degree, tor: t });
    }
    outcome(failures, format!("{} groups at D = {}", l.groups.len(), sec.degree))
}

fn criterion_3(l: &Loaded, ctx: &mut Context) -> Result<Outcome, String> {
    let sec = &l.manifest.toric;
    let mut failures = Vec::new();
    for name in COMPLETE_REQUIRED.iter().chain(&["blowup_p2"]) {
        if !sec.fans.contains_key(*name) {
            failures.push(format!("fan {name} missing from the manifest"));
        }
    }
    for (name, want) in &sec.fans {
        let fan = &l.fans[name];
        if (fan.is_smooth(), fan.is_complete()) != (want.smooth, want.complete) {
            failures.push(format!("{name}: smooth/complete flags differ from the manifest"));
        }
        if !(fan.is_smooth() && fan.is_complete()) {
            failures.push(format!("{name}: not smooth and complete"));
            continue;
        }
        let n = fan.rank;
        let module = fan.stanley_reisner_module(sec.degree).map_err(|e| e.to_string())?;
        let t = ctx.record(name, koszul_tor(&module, sec.degree))?;
        if t.trusted_q() < 4 * n {
            failures.push(format!("{name}: D = {} is too small for rank {n}", sec.degree));
        }
        let w = assemble_cohomology(&t);
        let betti: Vec<usize> = (0..=2 * n).map(|k| w.total(k)).collect();
        let h = fan.h_vector();
        if (0..=2 * n).any(|k| k % 2 == 1 && betti[k] != 0) {
            failures.push(format!("{name}: odd Betti numbers {betti:?}"));
        }
        if (0..=n).any(|k| betti[2 * k] as i64 != h[k]) {
            failures.push(format!("{name}: Betti {betti:?} against h-vector {h:?}"));
        }
        if (0..=2 * n).any(|k| betti[k] != betti[2 * n - k]) {
            failures.push(format!("{name}: Poincare duality fails for {betti:?}"));
        }
        if let (false, Some((d, wt))) = purity_check(&w) {
            failures.push(format!("{name}: weight {wt} in degree {d}"));
        }
        if betti != want.betti || h != want.h {
            failures.push(format!("{name}: Betti {betti:?}, h {h:?} differ from the manifest"));
        }
        ctx.pure.push(PurePipeline { label: name.clone(), module, pages_bound: sec.pages_degree, tor: t });
    }
    outcome(failures, format!("{} smooth complete fans", sec.fans.len()))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_4(l: &Loaded, ctx: &mut Context) -> Result<Outcome, String> {
    let sec = &l.manifest.noncomplete;
    let mut failures = Vec::new();
    for name in PUNCTURED_REQUIRED.iter().chain(&TORUS_REQUIRED) {
        if !sec.fans.contains_key(*name) {
            failures.push(format!("fan {name} missing from the manifest"));
        }
    }
    for (name, want) in &sec.fans {
        let fan = &l.fans[name];
        let module = fan.stanley_reisner_module(sec.degree).map_err(|e| e.to_string())?;
        let t = ctx.record(name, koszul_tor(&module, sec.degree))?;
        let n = fan.rank;
        if t.trusted_q() < 2 * n {
            failures.push(format!("{name}: D = {} is too small for rank {n}", sec.degree));
        }
        let w = assemble_cohomology(&t);
        let got = entries_up_to(&w, t.trusted_q());
        if &got != want {
            failures.push(format!("{name}: cohomology {got:?} differs from the manifest"));
        }
        if PUNCTURED_REQUIRED.contains(&name.as_str()) && n >= 2 && got != vec![[0, 0, 1], [2 * n - 1, 2 * n, 1]] {
            failures.push(format!("{name}: expected H^0 and H^{}", 2 * n - 1));
        }
        if TORUS_REQUIRED.contains(&name.as_str()) {
            let g = GroupData::torus(n);
            for k in 0..=n {
                if w.dim(k, 2 * k) != binomial(n, k) || w.total(k) != binomial(n, k) {
                    failures.push(format!("{name}: H^{k} is not C({n},{k}) in weight {}", 2 * k));
                }
                for a in 0..=n {
                    if w.filtered_dim(k, a + k) != g.complexity_filtration(k, a) {
                        failures.push(format!("{name}: W_{} H^{k} differs from the complexity filtration", a + k));
                    }
                }
            }
        }
        ctx.pure.push(PurePipeline { label: name.clone(), module, pages_bound: sec.pages_degree, tor: t });
    }
    outcome(failures, format!("{} non-complete fans", sec.fans.len()))
}

/// Dimension of `E_r` at `(s, n)` predicted by the pairing a random complex was built from.
fn predicted_page(levels: &[Vec<usize>], pairs: &[(usize, usize, usize)], r: usize) -> BTreeMap<(usize, usize), usize> {
    let mut alive: Vec<Vec<bool>> = levels.iter().map(|l| vec![true; l.len()]).collect();
    for &(n, i, j) in pairs {
        if levels[n + 1][j] - levels[n][i] < r {
            alive[n][i] = false;
            alive[n + 1][j] = false;
        }
    }
    let mut out = BTreeMap::new();
    for (n, lv) in levels.iter().enumerate() {
        for (i, &s) in lv.iter().enumerate() {
            if alive[n][i] {
                *out.entry((s, n)).or_default() += 1;
            }
        }
    }
    out
}

fn criterion_7(l: &Loaded, ctx: &mut Context, seed: u64, checked: bool) -> Result<Outcome, String> {
    let spec = &l.manifest.random_complexes;
    let mut failures = Vec::new();
    if spec.count < 50 || spec.max_total > 30 || spec.max_length > 4 {
        failures.push("random complexes must number at least 50 with dim <= 30 and length <= 4".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut h = FNV_OFFSET;
    for i in 0..spec.count {
        let f = random_filtered_complex(&mut rng, spec.max_total, spec.max_length);
        h = fnv1a(format!("{:?}{:?}", f.levels, f.pairs).as_bytes(), h);
        let pages = f.complex.pages().map_err(|e| format!("complex {i}: {e}"))?;
        let cohomology = f.complex.cohomology().map_err(|e| e.to_string())?;
        let last = pages.last().expect("pages are never empty");
        if (0..cohomology.len()).any(|n| last.total(n) != cohomology[n]) {
            failures.push(format!("complex {i}: E_infinity totals differ from H"));
        }
        for page in &pages {
            if page.dims != predicted_page(&f.levels, &f.pairs, page.r) {
                failures.push(format!("complex {i}: E_{} differs from the pairing", page.r));
            }
        }
    }
    check_fingerprint(&mut failures, &spec.fingerprint, h, checked);
    let pure = std::mem::take(&mut ctx.pure);
    for p in &pure {
        let em = em_residue_field(&p.module, p.pages_bound).map_err(|e| format!("{}: {e}", p.label))?;
        let pages = em.pages().map_err(|e| format!("{}: {e}", p.label))?;
        let top = em.max_bar_degree().unwrap_or(0);
        let trivial = GradedModule::trivial(p.module.ring(), p.pages_bound);
        let module = p.module.truncate(p.pages_bound).map_err(|e| e.to_string())?;
        let bar = ctx.record(&format!("{} bar", p.label), bar_tor_modules(&module, &trivial, p.pages_bound))?;
        let bar_map: BTreeMap<(usize, usize), usize> = bar.entries().map(|e| ((e.p, e.q), e.dim)).collect();
        if pages.len() < 3 || pages[2].bar_bigraded(top) != bar_map {
            failures.push(format!("{}: E_2 differs from bar Tor", p.label));
        }
        if pages.iter().any(|pg| pg.r >= 2 && pg.differentials_nonzero() > 0) {
            failures.push(format!("{}: nonzero d_r with r >= 2", p.label));
        }
        ctx.pages.insert(p.label.clone(), pages);
    }
    ctx.pure = pure;
    outcome(failures, format!("{} random complexes, {} em complexes", spec.count, ctx.pure.len()))
}

fn criterion_8(ctx: &mut Context) -> Result<Outcome, String> {
    let mut failures = Vec::new();
    let mut obligations = 0;
    let pure = std::mem::take(&mut ctx.pure);
    for p in &pure {
        let small = ctx.record(&format!("{} at the page bound", p.label), koszul_tor(&p.module.truncate(p.pages_bound).map_err(|e| e.to_string())?, p.pages_bound))?;
        for t in [&p.tor, &small] {
            let cert = degeneration_certificate(t, PurityFlags::PURE).map_err(|e| e.to_string())?;
            obligations += cert.obligations.len();
            if !cert.verify(t) || !cert.obligations.iter().all(|o| o.discharged()) {
                failures.push(format!("{}: certificate does not discharge every d_r", p.label));
            }
            if !ctx.pages.get(&p.label).is_some_and(|pages| cert.agrees_with(pages)) {
                failures.push(format!("{}: certificate and pages disagree", p.label));
            }
        }
    }
    let n = pure.len();
    ctx.pure = pure;
    outcome(failures, format!("{n} pure pipelines, {obligations} obligations discharged"))
}

fn criterion_9(l: &Loaded) -> Result<Outcome, String> {
    let sec = &l.manifest.strata;
    let mut failures = Vec::new();
    for name in STRATA_REQUIRED {
        if !sec.pairs.values().any(|f| f == name) {
            failures.push(format!("no orbit file paired with {name}"));
        }
    }
    if sec.degree < 20 {
        failures.push(format!("series compared only up to degree {}", sec.degree));
    }
    for (orbits, fan) in &sec.pairs {
        let torus = GroupData::torus(l.fans[fan].rank);
        if l.orbits[orbits].group.as_ref().map(GroupData::bg_generator_degrees) != Some(torus.bg_generator_degrees()) {
            failures.push(format!("{orbits}: acting group is not the torus of {fan}"));
        }
        let series = equivariant_series(&l.orbits[orbits], sec.degree);
        let module = l.fans[fan].stanley_reisner_module(sec.degree).map_err(|e| e.to_string())?;
        if let Some(k) = (0..=sec.degree).find(|&k| series.total(k) != module.dim(k)) {
            failures.push(format!("{orbits}: degree {k} has {} from orbits, {} from the fan", series.total(k), module.dim(k)));
        }
        if !series.is_pure() {
            failures.push(format!("{orbits}: series is not pure"));
        }
    }
    outcome(failures, format!("{} stratifications up to degree {}", sec.pairs.len(), sec.degree))
}

/// Runs criteria 1–9 on `fixtures`.
pub fn run(fixtures: &FixtureSet, options: Options) -> Result<SelftestReport, SelftestError> {
    let loaded = load(fixtures)?;
    let seed = options.seed.unwrap_or(loaded.manifest.seed);
    let checked = options.seed.is_none();
    let mut ctx = Context::default();
    let mut results: BTreeMap<u8, (Result<Outcome, String>, f64)> = BTreeMap::new();
    let mut timed = |id: u8, ctx: &mut Context, f: &dyn Fn(&mut Context) -> Result<Outcome, String>| {
        let start = Instant::now();
        let out = f(ctx);
        results.insert(id, (out, start.elapsed().as_secs_f64()));
    };
    timed(1, &mut ctx, &|c| criterion_1(&loaded, c, seed, checked));
    timed(6, &mut ctx, &|c| criterion_6(&loaded, c));
    timed(2, &mut ctx, &|c| criterion_2(&loaded, c));
    timed(3, &mut ctx, &|c| criterion_3(&loaded, c));
    timed(4, &mut ctx, &|c| criterion_4(&loaded, c));
    timed(7, &mut ctx, &|c| criterion_7(&loaded, c, seed, checked));
    timed(8, &mut ctx, &|c| criterion_8(c));
    timed(9, &mut ctx, &|_| criterion_9(&loaded));
    let vanishing = if ctx.vanishing.is_empty() {
        Outcome { passed: true, detail: format!("{} Tor tables, no entry below q = 2p", ctx.tor_count) }
    } else {
        Outcome { passed: false, detail: format!("violations: {}", ctx.vanishing.join(", ")) }
    };
    results.insert(5, (Ok(vanishing), 0.0));
    // runtime targets in seconds
    let budget = |id: u8| match id {
        1 | 3 | 7 => Some(60.0),
        2 | 4 => Some(30.0),
        _ => None,
    };
    let criteria = results
        .into_iter()
        .map(|(id, (out, seconds))| {
            let (mut passed, mut detail) = match out {
                Ok(o) => (o.passed, o.detail),
                Err(e) => (false, e),
            };
            if let Some(limit) = budget(id).filter(|&l| seconds > l) {
                passed = false;
                detail = format!("{detail}; over the {limit:.0} s budget");
            }
            CriterionReport { id, title: TITLES[usize::from(id) - 1], passed, detail, seconds }
        })
        .collect();
    Ok(SelftestReport { seed, criteria })
}
