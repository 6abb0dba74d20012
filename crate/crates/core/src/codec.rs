//! Bit-exact simulation over GF(256): coded cache placement, plan execution,
//! and decoding checks at every node.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::delivery::{plan, DeliveryPlan, Message, Payload, RlcScope};
use crate::error::{Error, Result};
use crate::gf256::{dot, rank_on, Basis};
use crate::rational::{binom, Rational};
use crate::scheme::Scheme;
use crate::topology::{DemandVector, Topology};

pub const DEFAULT_SYMBOLS_PER_PIECE: usize = 2;
pub const MAX_RETRIES: usize = 16;
const RANK_CHECK_LIMIT: u64 = 4096;

/// Symbol addressing: file `f` (1-based) occupies `[(f-1)B, fB)`; inside it the
/// `k`-th `t`-subset of groups (lexicographic) owns `max(t,1) c` symbols, split
/// into one `c`-symbol piece per member of the subset.
#[derive(Clone, Debug)]
pub struct Layout {
    pub n: usize,
    pub g: usize,
    pub t: usize,
    pub c: usize,
    subsets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

impl Layout {
    pub fn new(n: usize, g: usize, t: usize, c: usize) -> Self {
        let subsets = k_subsets(g, t);
        let index = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Layout { n, g, t, c, subsets, index }
    }

    pub fn symbols_per_subfile(&self) -> usize {
        self.t.max(1) * self.c
    }

    pub fn symbols_per_file(&self) -> usize {
        self.subsets.len() * self.symbols_per_subfile()
    }

    pub fn width(&self) -> usize {
        self.n * self.symbols_per_file()
    }

    /// The `t`-subsets of 0-based groups in storage order.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn file(&self, f: usize) -> Range<usize> {
        let b = self.symbols_per_file();
        (f - 1) * b..f * b
    }

    /// Subfile of file `f` cached by the 0-based groups in `w`.
    pub fn subfile(&self, f: usize, w: &[usize]) -> Range<usize> {
        let k = self.index[w];
        let s = self.symbols_per_subfile();
        let start = self.file(f).start + k * s;
        start..start + s
    }

    /// Piece of subfile `(f, w)` owned by 0-based group `owner`.
    pub fn piece(&self, f: usize, w: &[usize], owner: usize) -> Range<usize> {
        let pos = w.iter().position(|&x| x == owner).expect("owner belongs to the subset");
        let start = self.subfile(f, w).start + pos * self.c;
        start..start + self.c
    }
}

fn zero_based(subset: &[usize]) -> Vec<usize> {
    subset.iter().map(|&x| x - 1).collect()
}

#[derive(Clone, Debug)]
pub struct Library {
    pub n: usize,
    pub b: usize,
    data: Vec<u8>,
}

impl Library {
    pub fn random(n: usize, b: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * b).map(|_| rng.random()).collect();
        Library { n, b, data }
    }

    pub fn symbols(&self) -> &[u8] {
        &self.data
    }

    pub fn file(&self, f: usize) -> &[u8] {
        &self.data[(f - 1) * self.b..f * self.b]
    }
}

/// Combinations of one `F_W` block, shared by every SBS whose group is in `W`.
#[derive(Clone, Debug)]
pub struct CacheBlock {
    /// 0-based groups.
    pub subset: Vec<usize>,
    pub rows: Vec<Vec<u8>>,
    pub values: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct CacheContents {
    pub blocks: Vec<CacheBlock>,
    group_of: Vec<usize>,
}

impl CacheContents {
    /// Blocks held by 0-based SBS `h`.
    pub fn blocks_of(&self, h: usize) -> impl Iterator<Item = &CacheBlock> {
        let g = self.group_of[h];
        self.blocks.iter().filter(move |b| b.subset.contains(&g))
    }

    pub fn stored_symbols(&self, h: usize) -> usize {
        self.blocks_of(h).map(|b| b.rows.len()).sum()
    }
}

fn block_columns(layout: &Layout, w: &[usize], files: impl Iterator<Item = usize>) -> Vec<usize> {
    files.flat_map(|f| layout.subfile(f, w)).collect()
}

/// Every choice of `K_mbs` broadcast files must leave the block solvable.
fn block_is_generic(layout: &Layout, k_mbs: usize, w: &[usize], rows: &[Vec<u8>]) -> bool {
    let n = layout.n;
    let need = rows.len();
    let count = binom(n as i64, k_mbs as i64);
    if count > RANK_CHECK_LIMIT.into() {
        let all = block_columns(layout, w, 1..=n);
        return rank_on(rows, &all) == need;
    }
    k_subsets(n, k_mbs).iter().all(|known| {
        let cols = block_columns(layout, w, (1..=n).filter(|f| !known.contains(&(f - 1))));
        rank_on(rows, &cols) == need
    })
}

/// Places `(N - K_mbs) max(t,1) c` random combinations of each `F_W` at the SBSs of `W`.
pub fn place(topology: &Topology, scheme: &Scheme, layout: &Layout, library: &Library, seed: u64) -> Result<CacheContents> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = layout.width();
    let per_block = (topology.n() - topology.k_mbs()) * layout.symbols_per_subfile();
    let mut blocks = Vec::new();
    if layout.t > 0 {
        for w in layout.subsets() {
            let cols = block_columns(layout, w, 1..=layout.n);
            let mut attempt = 0;
            let rows = loop {
                let rows: Vec<Vec<u8>> = (0..per_block)
                    .map(|_| {
                        let mut r = vec![0u8; width];
                        for &c in &cols {
                            r[c] = rng.random();
                        }
                        r
                    })
                    .collect();
                if block_is_generic(layout, topology.k_mbs(), w, &rows) {
                    break rows;
                }
                attempt += 1;
                if attempt >= MAX_RETRIES {
                    return Err(Error::DegenerateSampling(MAX_RETRIES));
                }
            };
            let values = rows.iter().map(|r| dot(r, library.symbols())).collect();
            blocks.push(CacheBlock { subset: w.clone(), rows, values });
        }
    }
    Ok(CacheContents { blocks, group_of: scheme.partition.group_of() })
}

/// Outcome of one simulated delivery.
#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    pub seed: u64,
    pub attempts: usize,
    #[serde(rename = "B")]
    pub b: usize,
    pub decoded: Vec<bool>,
    /// Symbols sent by each node; index 0 is the MBS.
    pub symbols_per_link: Vec<usize>,
    pub cache_symbols: Vec<usize>,
    #[serde(rename = "R_mbs")]
    pub r_mbs: Rational,
    #[serde(rename = "R_sbs")]
    pub r_sbs: Rational,
}

fn unit_sum(width: usize, positions: impl Iterator<Item = usize>) -> Vec<u8> {
    let mut r = vec![0u8; width];
    for p in positions {
        r[p] ^= 1;
    }
    r
}

fn random_rows(width: usize, cols: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    (0..count)
        .map(|_| {
            let mut r = vec![0u8; width];
            for &c in cols {
                r[c] = rng.random();
            }
            r
        })
        .collect()
}

fn message_rows(layout: &Layout, m: &Message, rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
    let width = layout.width();
    let count = m.units as usize * layout.c;
    match &m.payload {
        Payload::WholeFile { file } => layout.file(*file).map(|p| unit_sum(width, std::iter::once(p))).collect(),
        Payload::XorSubfiles { terms } => {
            let ranges: Vec<Range<usize>> = terms.iter().map(|s| layout.subfile(s.file, &zero_based(&s.subset))).collect();
            (0..layout.symbols_per_subfile()).map(|j| unit_sum(width, ranges.iter().map(|r| r.start + j))).collect()
        }
        Payload::XorSubpieces { terms } => {
            let ranges: Vec<Range<usize>> =
                terms.iter().map(|s| layout.piece(s.file, &zero_based(&s.subset), s.owner - 1)).collect();
            (0..layout.c).map(|j| unit_sum(width, ranges.iter().map(|r| r.start + j))).collect()
        }
        Payload::Rlc { mix: RlcScope::File { file } } => {
            let cols: Vec<usize> = layout.file(*file).collect();
            random_rows(width, &cols, count, rng)
        }
        Payload::Rlc { mix: RlcScope::OwnedSubpieces { file, group } } => {
            let owner = group - 1;
            let cols: Vec<usize> = layout
                .subsets()
                .iter()
                .filter(|w| w.contains(&owner))
                .flat_map(|w| layout.piece(*file, w, owner))
                .collect();
            random_rows(width, &cols, count, rng)
        }
    }
}

fn cache_basis(layout: &Layout, caches: &CacheContents, h: usize) -> Basis {
    let mut basis = Basis::new(layout.width());
    for block in caches.blocks_of(h) {
        for (r, &v) in block.rows.iter().zip(&block.values) {
            basis.insert(r.clone(), v);
        }
    }
    basis
}

fn decode_files(basis: &Basis, layout: &Layout, library: &Library, files: &[usize], node: &str) -> Result<()> {
    for &f in files {
        for (j, p) in layout.file(f).enumerate() {
            match basis.symbol(p) {
                Some(v) if v == library.symbols()[p] => {}
                Some(_) => {
                    return Err(Error::DecodeFailure { node: node.into(), missing: format!("file {f} symbol {j} decoded wrongly") })
                }
                None => return Err(Error::DecodeFailure { node: node.into(), missing: format!("file {f} symbol {j}") }),
            }
        }
    }
    Ok(())
}

/// Source, whether sent in step 1, coefficient rows and symbol values.
type SentMessage = (usize, bool, Vec<Vec<u8>>, Vec<u8>);

/// Runs both delivery steps and checks that every user recovers its file.
pub fn execute(
    topology: &Topology,
    layout: &Layout,
    library: &Library,
    caches: &CacheContents,
    plan: &DeliveryPlan,
    seed: u64,
) -> Result<Transcript> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = layout.width();
    let h_count = topology.h();
    let mut sent: Vec<SentMessage> = Vec::new();
    let step1_len = plan.step1.len();

    let mut downlink = Basis::new(width);
    let mut pending = Vec::new();
    for (i, m) in plan.messages().enumerate() {
        let rows = message_rows(layout, m, &mut rng);
        if rows.len() != m.units as usize * layout.c {
            return Err(Error::EncoderInfeasible(format!("message {i} has {} symbols, planned {}", rows.len(), m.units as usize * layout.c)));
        }
        if m.source == 0 {
            let values: Vec<u8> = rows.iter().map(|r| dot(r, library.symbols())).collect();
            for (r, &v) in rows.iter().zip(&values) {
                downlink.insert(r.clone(), v);
            }
            sent.push((0, i < step1_len, rows, values));
        } else {
            pending.push((i, m.source, rows));
        }
    }

    let mut sender_basis: BTreeMap<usize, Basis> = BTreeMap::new();
    for (i, source, rows) in pending {
        let basis = sender_basis.entry(source).or_insert_with(|| {
            let mut b = cache_basis(layout, caches, source - 1);
            for (_, _, rs, vs) in sent.iter().filter(|s| s.0 == 0) {
                for (r, &v) in rs.iter().zip(vs) {
                    b.insert(r.clone(), v);
                }
            }
            b
        });
        let values = rows
            .iter()
            .map(|r| basis.evaluate(r))
            .collect::<Option<Vec<u8>>>()
            .ok_or_else(|| Error::EncoderInfeasible(format!("SBS {source} cannot form message {i} from its cache and the downlink")))?;
        sent.push((source, i < step1_len, rows, values));
    }

    let mut symbols_per_link = vec![0usize; h_count + 1];
    for (src, _, rows, _) in &sent {
        symbols_per_link[*src] += rows.len();
    }

    let mut step1_basis = Basis::new(width);
    for (_, _, rows, values) in sent.iter().filter(|s| s.1 && s.0 == 0) {
        for (r, &v) in rows.iter().zip(values) {
            step1_basis.insert(r.clone(), v);
        }
    }
    let mbs_files: Vec<usize> = (0..topology.k_mbs()).map(|u| plan.demand.get(u)).collect();
    decode_files(&step1_basis, layout, library, &mbs_files, "MBS users")?;

    for h in 0..h_count {
        let mut files: Vec<usize> = topology.users_of(h).map(|u| plan.demand.get(u)).collect();
        files.sort_unstable();
        files.dedup();
        if files.is_empty() {
            continue;
        }
        let mut basis = cache_basis(layout, caches, h);
        for (_, _, rows, values) in &sent {
            for (r, &v) in rows.iter().zip(values) {
                basis.insert(r.clone(), v);
            }
        }
        decode_files(&basis, layout, library, &files, &format!("SBS {}", h + 1))?;
    }

    let b = layout.symbols_per_file();
    let sbs_symbols: usize = symbols_per_link[1..].iter().sum();
    Ok(Transcript {
        seed,
        attempts: 1,
        b,
        decoded: vec![true; topology.k()],
        r_mbs: Rational::new(symbols_per_link[0] as i64, b as i64),
        r_sbs: Rational::new(sbs_symbols as i64, b as i64),
        symbols_per_link,
        cache_symbols: (0..h_count).map(|h| caches.stored_symbols(h)).collect(),
    })
}

fn has_rlc(plan: &DeliveryPlan) -> bool {
    plan.messages().any(|m| matches!(m.payload, Payload::Rlc { .. }))
}

/// Places, plans and executes with `c` symbols per sub-piece, resampling all
/// random coefficients when a random-combination message fails to decode.
pub fn simulate(topology: &Topology, scheme: &Scheme, d: &DemandVector, seed: u64, c: usize) -> Result<Transcript> {
    if c == 0 {
        return Err(Error::Domain("symbols per sub-piece must be positive".into()));
    }
    let layout = Layout::new(topology.n(), scheme.g(), scheme.t, c);
    let library = Library::random(topology.n(), layout.symbols_per_file(), seed);
    let plan = plan(topology, scheme, d)?;
    let mut last = None;
    for attempt in 0..MAX_RETRIES {
        let round_seed = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(attempt as u64 + 1));
        let caches = place(topology, scheme, &layout, &library, round_seed)?;
        match execute(topology, &layout, &library, &caches, &plan, round_seed ^ 0xA5A5) {
            Ok(mut tr) => {
                tr.seed = seed;
                tr.attempts = attempt + 1;
                return Ok(tr);
            }
            Err(e @ Error::DecodeFailure { .. }) if has_rlc(&plan) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::DegenerateSampling(MAX_RETRIES)))
}

/// File size in symbols for `c` symbols per sub-piece.
pub fn block_length(scheme: &Scheme, c: usize) -> usize {
    scheme.units_per_file() as usize * c
}
