//! Record search over integer polynomials of bounded degree and height.
//!
//! The space is cut into slices by leading coefficient. Every slice runs a
//! double-precision prefilter first; only polynomials whose gaps could still
//! enter the record lists get a certified measurement.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::{MeasureKind, MeasureOptions, Measurer};
use crate::poly::{canonicalize, IntPolynomial};
use crate::rootfind::{aberth_f64_into, DEFAULT_PRECISION_CEILING};

pub const RECORD_VERSION: u32 = 1;
const RANDOM_SLICE: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Random { seed: u64, count: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub degree: usize,
    pub max_height: u64,
    pub measures: Vec<MeasureKind>,
    pub mode: SearchMode,
    pub top_k: usize,
    /// Keep every polynomial whose quality reaches this, besides the top k.
    pub min_quality: Option<f64>,
}

impl SearchSpec {
    pub fn exhaustive(degree: usize, max_height: u64, measures: &[MeasureKind]) -> Self {
        SearchSpec {
            degree,
            max_height,
            measures: measures.to_vec(),
            mode: SearchMode::Exhaustive,
            top_k: 1,
            min_quality: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        if self.max_height < 1 || self.max_height > 1 << 30 {
            return Err(Error::InvalidParameter("max height must lie in 1..=2^30".into()));
        }
        if self.top_k < 1 {
            return Err(Error::InvalidParameter("top_k must be at least 1".into()));
        }
        if self.degree > 12 {
            return Err(Error::InvalidParameter("degree above 12 is not supported".into()));
        }
        Ok(())
    }

    /// Measures sorted and deduplicated.
    pub fn measure_set(&self) -> Vec<MeasureKind> {
        let s: BTreeSet<MeasureKind> = self.measures.iter().copied().collect();
        s.into_iter().collect()
    }

    /// Hex sha256 of the canonical JSON form; binds checkpoints to a spec.
    pub fn hash(&self) -> String {
        let mut norm = self.clone();
        norm.measures = self.measure_set();
        let json = serde_json::to_string(&norm).expect("spec serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn slice_count(&self) -> u64 {
        match self.mode {
            SearchMode::Exhaustive => self.max_height,
            SearchMode::Random { count, .. } => count.div_ceil(RANDOM_SLICE),
        }
    }
}

/// A search hit as stored in the JSON-lines record file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub v: u32,
    pub polynomial: String,
    pub measure: MeasureKind,
    pub value: String,
    pub quality: Option<String>,
    pub degree: usize,
    pub max_height: u64,
    pub slice: u64,
    pub index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl SearchRecord {
    pub fn poly(&self) -> Result<IntPolynomial> {
        self.polynomial.parse()
    }

    pub fn key(&self) -> (DecimalValue, &str) {
        (DecimalValue::parse(&self.value).unwrap_or(DecimalValue::MAX), self.polynomial.as_str())
    }

    fn quality_f64(&self) -> Option<f64> {
        self.quality.as_deref().and_then(|q| q.parse().ok())
    }
}

/// Positive decimal `m.mmm…e±x` with an exact ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecimalValue {
    exp: i64,
    mant: u128,
}

impl DecimalValue {
    pub const MAX: DecimalValue = DecimalValue { exp: i64::MAX, mant: u128::MAX };
    const DIGITS: usize = 30;

    pub fn parse(s: &str) -> Option<DecimalValue> {
        let (m, e) = s.split_once(['e', 'E']).unwrap_or((s, "0"));
        let mut exp: i64 = e.parse().ok()?;
        let (int, frac) = m.split_once('.').unwrap_or((m, ""));
        let digits: String = format!("{int}{frac}");
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        exp += int.len() as i64;
        let trimmed = digits.trim_start_matches('0');
        if trimmed.is_empty() {
            return Some(DecimalValue { exp: i64::MIN, mant: 0 });
        }
        exp -= (digits.len() - trimmed.len()) as i64;
        let mut t = trimmed.to_string();
        if t.len() > Self::DIGITS {
            return None;
        }
        while t.len() < Self::DIGITS {
            t.push('0');
        }
        Some(DecimalValue { exp, mant: t.parse().ok()? })
    }

    pub fn to_f64(self) -> f64 {
        if self.mant == 0 {
            return 0.0;
        }
        let m = self.mant as f64 / 10f64.powi(Self::DIGITS as i32);
        m * 10f64.powi(self.exp as i32)
    }
}

fn now_stamp() -> String {
    let t = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    t.to_string()
}

/// Records kept for one measure: the k smallest (ties kept) and the
/// high-quality ones.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct Bucket {
    top: Vec<SearchRecord>,
    good: Vec<SearchRecord>,
}

impl Bucket {
    fn cutoff(&self, k: usize) -> Option<DecimalValue> {
        (self.top.len() >= k).then(|| self.top[k - 1].key().0)
    }

    fn push_top(&mut self, r: SearchRecord, k: usize) {
        let pos = self.top.binary_search_by(|x| x.key().cmp(&r.key()));
        let Err(pos) = pos else { return };
        self.top.insert(pos, r);
        if self.top.len() > k {
            let kth = self.top[k - 1].key().0;
            while self.top.last().map(|x| x.key().0 > kth).unwrap_or(false) {
                self.top.pop();
            }
        }
    }

    fn merge(&mut self, other: Bucket, k: usize) {
        for r in other.top {
            self.push_top(r, k);
        }
        self.good.extend(other.good);
    }
}

/// Commutative min-merge accumulator over all measures.
#[derive(Clone, Debug, Default)]
pub struct Accumulator {
    buckets: BTreeMap<MeasureKind, Bucket>,
}

impl Accumulator {
    fn insert(&mut self, r: SearchRecord, spec: &SearchSpec) {
        let b = self.buckets.entry(r.measure).or_default();
        let good = match (spec.min_quality, r.quality_f64()) {
            (Some(m), Some(q)) => q >= m,
            _ => false,
        };
        if good {
            b.good.push(r.clone());
        }
        b.push_top(r, spec.top_k);
    }

    fn merge(&mut self, other: Accumulator, k: usize) {
        for (m, b) in other.buckets {
            self.buckets.entry(m).or_default().merge(b, k);
        }
    }

    fn cutoff(&self, m: MeasureKind, k: usize) -> Option<f64> {
        self.buckets.get(&m).and_then(|b| b.cutoff(k)).map(DecimalValue::to_f64)
    }

    /// Final list: sorted by measure, value, polynomial; duplicates removed.
    pub fn records(&self) -> Vec<SearchRecord> {
        let mut out = Vec::new();
        for b in self.buckets.values() {
            let mut all: Vec<&SearchRecord> = b.top.iter().chain(b.good.iter()).collect();
            all.sort_by(|x, y| x.key().cmp(&y.key()).then(x.slice.cmp(&y.slice)).then(x.index.cmp(&y.index)));
            all.dedup_by(|x, y| x.polynomial == y.polynomial);
            out.extend(all.into_iter().cloned());
        }
        out
    }

    fn from_records(recs: Vec<SearchRecord>, spec: &SearchSpec) -> Self {
        let mut acc = Accumulator::default();
        for r in recs {
            acc.insert(r, spec);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// enumeration

/// Leading-coefficient slice of the exhaustive space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slice {
    pub id: u64,
    pub lead: i64,
}

pub fn slices(spec: &SearchSpec) -> Vec<Slice> {
    (0..spec.max_height).map(|i| Slice { id: i, lead: i as i64 + 1 }).collect()
}

fn gcd_all(c: &[i64]) -> i64 {
    c.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Is the ascending coefficient vector the canonical member of its orbit?
fn is_canonical(c: &[i64]) -> bool {
    let d = c.len() - 1;
    if c[d] <= 0 || gcd_all(c) != 1 {
        return false;
    }
    for (i, &ci) in c.iter().enumerate() {
        let qi = if (i + d) % 2 == 0 { ci } else { -ci };
        match ci.cmp(&qi) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    true
}

/// Odometer over the non-leading coefficients with the leading one fixed.
/// Visits tuples in lexicographic order of `(a_{d-1}, …, a_0)`.
struct SliceIter {
    c: Vec<i64>,
    out: Vec<i64>,
    h: i64,
    index: u64,
    done: bool,
}

impl SliceIter {
    fn new(degree: usize, h: i64, lead: i64) -> Self {
        let mut c = vec![-h; degree + 1];
        c[degree] = lead;
        SliceIter { out: c.clone(), c, h, index: 0, done: false }
    }

    /// Next canonical tuple and its raw index within the slice.
    fn next_canonical(&mut self) -> Option<(&[i64], u64)> {
        loop {
            if self.done {
                return None;
            }
            let idx = self.index;
            let hit = is_canonical(&self.c);
            if hit {
                self.out.copy_from_slice(&self.c);
            }
            self.advance();
            if hit {
                return Some((&self.out, idx));
            }
        }
    }

    fn advance(&mut self) {
        self.index += 1;
        let d = self.c.len() - 1;
        for i in 0..d {
            if self.c[i] < self.h {
                self.c[i] += 1;
                return;
            }
            self.c[i] = -self.h;
        }
        self.done = true;
    }
}

/// All canonical representatives in deterministic order.
pub fn enumerate_space(spec: &SearchSpec) -> impl Iterator<Item = IntPolynomial> + '_ {
    let h = spec.max_height as i64;
    slices(spec).into_iter().flat_map(move |s| enumerate_slice(spec.degree, h, s.lead))
}

pub fn enumerate_slice(degree: usize, h: i64, lead: i64) -> impl Iterator<Item = IntPolynomial> {
    let mut it = SliceIter::new(degree, h, lead);
    std::iter::from_fn(move || it.next_canonical().map(|(c, _)| IntPolynomial::from_i64s(c)))
}

// ---------------------------------------------------------------------------
// prefilter

/// Double-precision root discs for the prefilter.
struct FastRoots {
    z: Vec<Complex64>,
    r: Vec<f64>,
    mate: Vec<usize>,
    f: Vec<f64>,
}

impl FastRoots {
    fn new(d: usize) -> Self {
        FastRoots {
            z: vec![Complex64::new(0.0, 0.0); d],
            r: vec![0.0; d],
            mate: vec![0; d],
            f: vec![0.0; d + 1],
        }
    }

    /// Disjoint inclusion discs, one root each, with conjugate matching.
    fn solve(&mut self, c: &[i64]) -> bool {
        let d = c.len() - 1;
        for (f, &x) in self.f.iter_mut().zip(c) {
            *f = x as f64;
        }
        if !aberth_f64_into(&self.f, &mut self.z) {
            return false;
        }
        let eps = f64::EPSILON;
        let lead = self.f[d].abs();
        for i in 0..d {
            let zi = self.z[i];
            let a = zi.norm();
            let mut v = Complex64::new(0.0, 0.0);
            let mut bound = 0.0;
            for k in (0..=d).rev() {
                v = v * zi + self.f[k];
                bound = bound * a + self.f[k].abs();
            }
            let mut prod = lead;
            for (j, zj) in self.z.iter().enumerate() {
                if j != i {
                    prod *= (zi - zj).norm();
                }
            }
            if prod == 0.0 || !prod.is_finite() {
                return false;
            }
            let num = v.norm() + 4.0 * (d as f64 + 1.0) * eps * bound;
            self.r[i] = d as f64 * num / prod * (1.0 + 1e-9) + 4.0 * eps * a;
        }
        for i in 0..d {
            for j in i + 1..d {
                if (self.z[i] - self.z[j]).norm() <= self.r[i] + self.r[j] {
                    return false;
                }
            }
        }
        for i in 0..d {
            let m = self.z[i].conj();
            let mut hit = None;
            for j in 0..d {
                if (m - self.z[j]).norm() <= self.r[i] + self.r[j] {
                    if hit.is_some() {
                        return false;
                    }
                    hit = Some(j);
                }
            }
            match hit {
                Some(j) => self.mate[i] = j,
                None => return false,
            }
        }
        true
    }

    /// Lower bound for the measure; `None` when some admissible pair could be
    /// arbitrarily close to zero, `Some(inf)` when no pair qualifies.
    fn lower_bound(&self, kind: MeasureKind) -> Option<f64> {
        let d = self.z.len();
        let eps = 8.0 * f64::EPSILON;
        let mut best = f64::INFINITY;
        for i in 0..d {
            for j in i + 1..d {
                let (zi, zj) = (self.z[i], self.z[j]);
                let ri = self.mate[i] == i;
                let rj = self.mate[j] == j;
                let conj = self.mate[i] == j;
                let slack = self.r[i] + self.r[j] + eps * (zi.norm() + zj.norm());
                let gap = match kind {
                    MeasureKind::Sep => (zi - zj).norm(),
                    MeasureKind::AbsSep => {
                        if conj {
                            continue;
                        }
                        (zi.norm() - zj.norm()).abs()
                    }
                    MeasureKind::ReGap => {
                        if conj {
                            continue;
                        }
                        (zi.re - zj.re).abs()
                    }
                    MeasureKind::ImGap => {
                        if ri && rj {
                            continue;
                        }
                        let a = if ri { 0.0 } else { zi.im };
                        let b = if rj { 0.0 } else { zj.im };
                        (a - b).abs()
                    }
                    MeasureKind::TopTwoAbsGap => return None,
                };
                let lo = gap - slack;
                if lo <= 0.0 {
                    return None;
                }
                best = best.min(lo);
            }
        }
        Some(best)
    }
}

// ---------------------------------------------------------------------------
// running

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
    pub ceiling_bits: u32,
    pub checkpoint: Option<PathBuf>,
    pub timestamps: bool,
    /// Stop after this many newly completed slices (simulates an interruption).
    pub max_slices: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            jobs: None,
            ceiling_bits: DEFAULT_PRECISION_CEILING,
            checkpoint: None,
            timestamps: false,
            max_slices: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub spec_hash: String,
    pub slices_total: u64,
    pub slices_done: u64,
    pub complete: bool,
    pub enumerated: u64,
    pub certified: u64,
    pub skipped: u64,
    pub records: Vec<SearchRecord>,
}

#[derive(Clone, Debug, Default)]
struct SliceStats {
    enumerated: u64,
    certified: u64,
    skipped: u64,
}

impl SliceStats {
    fn add(&mut self, o: &SliceStats) {
        self.enumerated += o.enumerated;
        self.certified += o.certified;
        self.skipped += o.skipped;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    v: u32,
    spec_hash: String,
    /// One character per slice, `1` when complete.
    completed: String,
    enumerated: u64,
    certified: u64,
    skipped: u64,
    partial: Vec<SearchRecord>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Shared {
    acc: Accumulator,
    done: Vec<bool>,
    stats: SliceStats,
    newly_done: usize,
}

/// Runs the search and appends the final records to `store` (if any).
pub fn run_search(spec: &SearchSpec, store: Option<&RecordStore>, cfg: &SearchConfig) -> Result<SearchSummary> {
    spec.validate()?;
    let hash = spec.hash();
    let n = spec.slice_count();
    let mut shared = Shared {
        acc: Accumulator::default(),
        done: vec![false; n as usize],
        stats: SliceStats::default(),
        newly_done: 0,
    };
    if let Some(path) = &cfg.checkpoint {
        if path.exists() {
            let cp: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)
                .map_err(|e| Error::Store(format!("bad checkpoint: {e}")))?;
            if cp.spec_hash != hash || cp.completed.len() != n as usize {
                return Err(Error::CheckpointMismatch);
            }
            shared.done = cp.completed.bytes().map(|b| b == b'1').collect();
            shared.acc = Accumulator::from_records(cp.partial, spec);
            shared.stats = SliceStats { enumerated: cp.enumerated, certified: cp.certified, skipped: cp.skipped };
            log::info!("resuming: {} of {} slices done", shared.done.iter().filter(|x| **x).count(), n);
        }
    }
    let todo: Vec<u64> = (0..n).filter(|&i| !shared.done[i as usize]).collect();
    let shared = Mutex::new(shared);
    let measures = spec.measure_set();
    let opts = MeasureOptions { ceiling_bits: cfg.ceiling_bits, ..MeasureOptions::default() };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let result: Result<()> = pool.install(|| {
        todo.par_iter().try_for_each(|&slice| -> Result<()> {
            if let Some(m) = cfg.max_slices {
                if shared.lock().unwrap().newly_done >= m {
                    return Ok(());
                }
            }
            let (acc, stats) = run_slice(spec, &measures, slice, opts, cfg.timestamps);
            let mut sh = shared.lock().unwrap();
            if let Some(m) = cfg.max_slices {
                if sh.newly_done >= m {
                    return Ok(());
                }
            }
            sh.acc.merge(acc, spec.top_k);
            sh.stats.add(&stats);
            sh.done[slice as usize] = true;
            sh.newly_done += 1;
            log::debug!("slice {slice} done ({} polynomials)", stats.enumerated);
            if let Some(path) = &cfg.checkpoint {
                let cp = Checkpoint {
                    v: RECORD_VERSION,
                    spec_hash: hash.clone(),
                    completed: sh.done.iter().map(|&b| if b { '1' } else { '0' }).collect(),
                    enumerated: sh.stats.enumerated,
                    certified: sh.stats.certified,
                    skipped: sh.stats.skipped,
                    partial: sh.acc.records(),
                };
                let json = serde_json::to_vec(&cp).map_err(|e| Error::Store(e.to_string()))?;
                write_atomic(path, &json)?;
            }
            Ok(())
        })
    });
    result?;

    let sh = shared.into_inner().unwrap();
    let done = sh.done.iter().filter(|x| **x).count() as u64;
    let records = sh.acc.records();
    let complete = done == n;
    if complete {
        if let Some(store) = store {
            store.append(&records)?;
        }
    }
    Ok(SearchSummary {
        spec_hash: hash,
        slices_total: n,
        slices_done: done,
        complete,
        enumerated: sh.stats.enumerated,
        certified: sh.stats.certified,
        skipped: sh.stats.skipped,
        records,
    })
}

/// One slice, split further over the second coefficient for parallelism.
fn run_slice(
    spec: &SearchSpec,
    measures: &[MeasureKind],
    slice: u64,
    opts: MeasureOptions,
    stamps: bool,
) -> (Accumulator, SliceStats) {
    let h = spec.max_height as i64;
    let d = spec.degree;
    let parts: Vec<(Accumulator, SliceStats)> = match spec.mode {
        SearchMode::Exhaustive if d >= 2 => {
            let lead = slice as i64 + 1;
            let block = (2 * h + 1) as u64;
            let inner = block.pow(d as u32 - 1);
            (-h..=h)
                .into_par_iter()
                .map(|second| {
                    let mut it = SliceIter::new(d, h, lead);
                    it.c[d - 1] = second;
                    it.index = (second + h) as u64 * inner;
                    let end = it.index + inner;
                    let mut w = Worker::new(spec, measures, slice, opts, stamps);
                    while let Some((c, idx)) = it.next_canonical() {
                        if idx >= end {
                            break;
                        }
                        let c = c.to_vec();
                        w.visit(&c, idx);
                    }
                    (w.acc, w.stats)
                })
                .collect()
        }
        SearchMode::Exhaustive => {
            let mut it = SliceIter::new(d, h, slice as i64 + 1);
            let mut w = Worker::new(spec, measures, slice, opts, stamps);
            while let Some((c, idx)) = it.next_canonical() {
                let c = c.to_vec();
                w.visit(&c, idx);
            }
            vec![(w.acc, w.stats)]
        }
        SearchMode::Random { seed, count } => {
            let start = slice * RANDOM_SLICE;
            let len = RANDOM_SLICE.min(count - start);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (slice + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut w = Worker::new(spec, measures, slice, opts, stamps);
            for idx in 0..len {
                let mut c: Vec<i64> = (0..=d).map(|_| rng.gen_range(-h..=h)).collect();
                c[d] = rng.gen_range(1..=h);
                let g = gcd_all(&c);
                for x in c.iter_mut() {
                    *x /= g;
                }
                let canon = canonicalize(&IntPolynomial::from_i64s(&c)).expect("nonzero");
                let c = canon.to_i64s().expect("small coefficients");
                w.visit(&c, idx);
            }
            vec![(w.acc, w.stats)]
        }
    };
    let mut acc = Accumulator::default();
    let mut stats = SliceStats::default();
    for (a, s) in parts {
        acc.merge(a, spec.top_k);
        stats.add(&s);
    }
    (acc, stats)
}

struct Worker<'a> {
    spec: &'a SearchSpec,
    measures: &'a [MeasureKind],
    slice: u64,
    opts: MeasureOptions,
    stamps: bool,
    fast: FastRoots,
    acc: Accumulator,
    stats: SliceStats,
}

impl<'a> Worker<'a> {
    fn new(spec: &'a SearchSpec, measures: &'a [MeasureKind], slice: u64, opts: MeasureOptions, stamps: bool) -> Self {
        Worker {
            spec,
            measures,
            slice,
            opts,
            stamps,
            fast: FastRoots::new(spec.degree),
            acc: Accumulator::default(),
            stats: SliceStats::default(),
        }
    }

    fn visit(&mut self, c: &[i64], idx: u64) {
        self.stats.enumerated += 1;
        if c.len() < 3 {
            return;
        }
        if c[0] == 0 && c[1] == 0 {
            // double root at zero
            return;
        }
        let height = c.iter().map(|x| x.abs()).max().unwrap_or(0) as f64;
        let ok = self.fast.solve(c);
        let mut wanted: Vec<MeasureKind> = Vec::new();
        for &m in self.measures {
            let lb = if ok { self.fast.lower_bound(m) } else { None };
            let keep = match lb {
                None => true,
                Some(lb) if lb.is_infinite() => false,
                Some(lb) => {
                    let cut = self.acc.cutoff(m, self.spec.top_k).unwrap_or(f64::INFINITY);
                    let q = self.spec.min_quality.map(|q| height.powf(-q)).unwrap_or(0.0);
                    lb <= cut.max(q) * (1.0 + 1e-9)
                }
            };
            if keep {
                wanted.push(m);
            }
        }
        if wanted.is_empty() {
            return;
        }
        let p = IntPolynomial::from_i64s(c);
        let mut ms = match Measurer::new(&p, self.opts) {
            Ok(m) => m,
            Err(_) => {
                self.stats.skipped += 1;
                return;
            }
        };
        self.stats.certified += 1;
        for m in wanted {
            match ms.measure(m) {
                Ok(r) => {
                    let rec = SearchRecord {
                        v: RECORD_VERSION,
                        polynomial: p.to_string(),
                        measure: m,
                        value: r.value().to_sci(20),
                        quality: r.quality.map(|q| format!("{q:.6}")),
                        degree: self.spec.degree,
                        max_height: self.spec.max_height,
                        slice: self.slice,
                        index: idx,
                        timestamp: self.stamps.then(now_stamp),
                    };
                    self.acc.insert(rec, self.spec);
                }
                Err(Error::PrecisionCeiling(b)) => {
                    log::warn!("{p}: {m} hit the {b}-bit ceiling, skipped");
                    self.stats.skipped += 1;
                }
                Err(_) => {}
            }
        }
    }
}

// ---------------------------------------------------------------------------
// record files

/// Append-only JSON-lines record file.
#[derive(Clone, Debug)]
pub struct RecordStore {
    path: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadedRecords {
    pub records: Vec<SearchRecord>,
    /// Malformed trailing lines dropped while loading.
    pub warnings: usize,
}

impl RecordStore {
    /// Opens (creating if needed) and truncates a malformed trailing line.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        if path.exists() {
            let loaded = load_records(&path)?;
            if loaded.warnings > 0 {
                save_records(&loaded.records, &path)?;
            }
        } else {
            File::create(&path)?;
        }
        Ok(RecordStore { path })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, recs: &[SearchRecord]) -> Result<()> {
        let mut f = OpenOptions::new().append(true).create(true).open(&self.path)?;
        let mut buf = Vec::new();
        for r in recs {
            serde_json::to_writer(&mut buf, r).map_err(|e| Error::Store(e.to_string()))?;
            buf.push(b'\n');
        }
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn load(&self) -> Result<LoadedRecords> {
        load_records(&self.path)
    }
}

pub fn load_records(path: impl AsRef<Path>) -> Result<LoadedRecords> {
    let f = File::open(path.as_ref())?;
    let lines: Vec<String> = BufReader::new(f).lines().collect::<std::io::Result<_>>()?;
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    let mut out = LoadedRecords::default();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) if Some(i) == last => {
                log::warn!("dropping malformed final record line: {e}");
                out.warnings += 1;
                continue;
            }
            Err(e) => return Err(Error::Store(format!("line {}: {e}", i + 1))),
        };
        let v = value.get("v").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if v != RECORD_VERSION {
            return Err(Error::Schema { found: v, expected: RECORD_VERSION });
        }
        match serde_json::from_value::<SearchRecord>(value) {
            Ok(r) => out.records.push(r),
            Err(e) if Some(i) == last => {
                log::warn!("dropping malformed final record line: {e}");
                out.warnings += 1;
            }
            Err(e) => return Err(Error::Store(format!("line {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

/// Writes the whole file atomically.
pub fn save_records(recs: &[SearchRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    for r in recs {
        serde_json::to_writer(&mut buf, r).map_err(|e| Error::Store(e.to_string()))?;
        buf.push(b'\n');
    }
    write_atomic(path.as_ref(), &buf)
}

/// Records with the timestamp removed, for byte-level comparisons.
pub fn without_timestamps(recs: &[SearchRecord]) -> Vec<SearchRecord> {
    recs.iter().cloned().map(|mut r| {
        r.timestamp = None;
        r
    }).collect()
}
