//! Randomized and exhaustive differential checks of the index against the
//! brute-force oracles in [`crate::oracle`].

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block_trie::TrieNodeId;
use crate::error::Error;
use crate::index::{k_offset, Index, IndexConfig};
use crate::interval::RankInterval;
use crate::oracle::{
    naive_find_all, naive_ord, naive_pattern_codes, naive_rank_interval, naive_reversed_block,
    naive_sampled_sa, PrefixOracle,
};
use crate::right_search::right_search;
use crate::sparse_tree::NodeId;
use crate::text::Code;

/// Texts at most this long also check rank intervals with the sorting oracle.
const SMALL_TEXT: usize = 256;
const MINIMIZE_BUDGET: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub seed: u64,
    /// Alphabet sizes to draw texts from.
    pub sigmas: Vec<usize>,
    pub text_len: RangeInclusive<usize>,
    pub blocks: Vec<usize>,
    pub pattern_len: RangeInclusive<usize>,
    pub instances: usize,
    pub queries_per_instance: usize,
    pub probes_per_instance: usize,
    /// Also run every binary text up to length 10 with `r = 2` against every
    /// pattern up to length 4.
    pub exhaustive: bool,
    /// Skew applied to every upper bound computed by `interval_step`.
    pub fault: Option<isize>,
    pub threads: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0x5eed,
            sigmas: vec![2, 4, 16],
            text_len: 1..=4096,
            blocks: vec![1, 2, 4, 8],
            pattern_len: 1..=32,
            instances: 500,
            queries_per_instance: 12,
            probes_per_instance: 24,
            exhaustive: true,
            fault: None,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub check: &'static str,
    /// A minimized reproducer when one could be found.
    pub text: Vec<u8>,
    pub block: usize,
    pub pattern: Option<Vec<u8>>,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FAIL {} r={} text={:?}", self.check, self.block, String::from_utf8_lossy(&self.text))?;
        if let Some(p) = &self.pattern {
            write!(f, " pattern={:?}", String::from_utf8_lossy(p))?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Worst observed ratio of measured work to an allowed budget.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Bound {
    pub worst: f64,
    pub checked: usize,
}

impl Bound {
    fn record(&mut self, work: usize, budget: usize) -> bool {
        self.checked += 1;
        let ratio = work as f64 / budget as f64;
        if ratio > self.worst {
            self.worst = ratio;
        }
        work <= budget
    }

    fn merge(&mut self, other: &Bound) {
        self.worst = self.worst.max(other.worst);
        self.checked += other.checked;
    }
}

/// Outcome of a differential run.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub instances: usize,
    pub exhaustive_texts: usize,
    pub queries: usize,
    pub short_queries: usize,
    pub suffix_checks: usize,
    pub links_checked: usize,
    pub chains_checked: usize,
    pub ord_checked: usize,
    pub probes: usize,
    pub right_cost: Bound,
    pub traverse_cost: Bound,
    pub total_cost: Bound,
    pub rho_bound_ok: usize,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn count(&self, check: &str) -> usize {
        self.failures.iter().filter(|f| f.check == check).count()
    }

    fn merge(&mut self, other: Report) {
        self.instances += other.instances;
        self.exhaustive_texts += other.exhaustive_texts;
        self.queries += other.queries;
        self.short_queries += other.short_queries;
        self.suffix_checks += other.suffix_checks;
        self.links_checked += other.links_checked;
        self.chains_checked += other.chains_checked;
        self.ord_checked += other.ord_checked;
        self.probes += other.probes;
        self.right_cost.merge(&other.right_cost);
        self.traverse_cost.merge(&other.traverse_cost);
        self.total_cost.merge(&other.total_cost);
        self.rho_bound_ok += other.rho_bound_ok;
        self.failures.extend(other.failures);
    }

    /// Key/value summary on one line.
    pub fn summary(&self) -> String {
        format!(
            "failures={} instances={} exhaustive_texts={} queries={} short_queries={} suffix_checks={} \
             links={} chains={} ord_nodes={} probes={} right_cost_max={:.3} traverse_cost_max={:.3} \
             total_cost_max={:.3}",
            self.failures.len(),
            self.instances,
            self.exhaustive_texts,
            self.queries,
            self.short_queries,
            self.suffix_checks,
            self.links_checked,
            self.chains_checked,
            self.ord_checked,
            self.probes,
            self.right_cost.worst,
            self.traverse_cost.worst,
            self.total_cost.worst,
        )
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for failure in &self.failures {
            writeln!(f, "{failure}")?;
        }
        writeln!(f, "{}", self.summary())
    }
}

struct Instance {
    text: Vec<u8>,
    block: usize,
    patterns: Vec<Vec<u8>>,
    seed: u64,
}

/// Runs the randomized suite and, if enabled, the exhaustive binary suite.
pub fn run_differential(config: &OracleConfig) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut instances: Vec<Instance> = (0..config.instances).map(|_| random_instance(config, &mut rng)).collect();
    let randomized = instances.len();
    if config.exhaustive && config.instances > 0 {
        instances.extend(exhaustive_instances());
    }

    let threads = config.threads.max(1);
    let instances = &instances;
    let mut parts: Vec<(usize, Report)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    (t..instances.len())
                        .step_by(threads)
                        .map(|i| {
                            let inst = &instances[i];
                            let mut rng = ChaCha8Rng::seed_from_u64(inst.seed);
                            (i, check_instance(inst, config, &mut rng))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("checker thread panicked")).collect()
    });
    parts.sort_by_key(|&(i, _)| i);
    let mut report = Report::default();
    for (_, part) in parts {
        report.merge(part);
    }
    report.instances = randomized;
    report.exhaustive_texts = instances.len() - randomized;
    report
}

/// Checks one already built index against the oracles using patterns drawn
/// from its own text.
pub fn verify_index(index: &Index, seed: u64, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = index.text().raw_bytes();
    let symbols = index.text().alphabet().symbols().to_vec();
    let patterns = (0..samples).map(|_| random_pattern(&text, &symbols, 1..=32, &mut rng)).collect();
    let inst = Instance { text, block: index.block(), patterns, seed };
    let config = OracleConfig { probes_per_instance: samples, ..OracleConfig::default() };
    let mut report = Report::default();
    if samples > 0 {
        check_index(index, &inst, &config, &mut rng, &mut report);
        report.instances = 1;
    }
    report
}

fn random_instance(config: &OracleConfig, rng: &mut ChaCha8Rng) -> Instance {
    let sigma = *config.sigmas.choose(rng).unwrap_or(&2);
    let symbols: Vec<u8> = (0..sigma.clamp(1, 255)).map(|i| b'a'.wrapping_add(i as u8)).collect();
    let n = rng.gen_range(config.text_len.clone());
    // Mix uniform texts with repetitive ones, which exercise deep nodes.
    let text: Vec<u8> = if rng.gen_bool(0.7) {
        (0..n).map(|_| *symbols.choose(rng).unwrap()).collect()
    } else {
        let period = rng.gen_range(1..=8usize);
        let unit: Vec<u8> = (0..period).map(|_| *symbols.choose(rng).unwrap()).collect();
        (0..n)
            .map(|i| if rng.gen_bool(0.02) { *symbols.choose(rng).unwrap() } else { unit[i % period] })
            .collect()
    };
    let block = *config.blocks.choose(rng).unwrap_or(&1);
    let patterns = (0..config.queries_per_instance)
        .map(|_| random_pattern(&text, &symbols, config.pattern_len.clone(), rng))
        .collect();
    Instance { text, block, patterns, seed: rng.gen() }
}

fn random_pattern(text: &[u8], symbols: &[u8], len: RangeInclusive<usize>, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let m = rng.gen_range(len);
    if !text.is_empty() && rng.gen_bool(0.6) {
        let m = m.min(text.len());
        let start = rng.gen_range(0..=text.len() - m);
        let mut p = text[start..start + m].to_vec();
        if rng.gen_bool(0.2) && !symbols.is_empty() {
            let i = rng.gen_range(0..m);
            p[i] = *symbols.choose(rng).unwrap();
        }
        p
    } else {
        (0..m).map(|_| *symbols.choose(rng).unwrap_or(&b'a')).collect()
    }
}

fn exhaustive_instances() -> Vec<Instance> {
    let mut patterns = Vec::new();
    for m in 1..=4usize {
        for bits in 0..1u32 << m {
            patterns.push((0..m).map(|i| if bits >> i & 1 == 1 { b'b' } else { b'a' }).collect());
        }
    }
    let mut out = Vec::new();
    for n in 1..=10usize {
        for bits in 0..1u32 << n {
            let text = (0..n).map(|i| if bits >> i & 1 == 1 { b'b' } else { b'a' }).collect();
            out.push(Instance { text, block: 2, patterns: patterns.clone(), seed: bits as u64 ^ (n as u64) << 32 });
        }
    }
    out
}

fn build(text: &[u8], block: usize, fault: Option<isize>) -> Result<Index, Error> {
    let mut config = IndexConfig::new(block);
    config.retain_ord = true;
    let mut index = Index::build(text, &config)?;
    if let Some(skew) = fault {
        index.trie_mut().inject_interval_fault(skew);
    }
    Ok(index)
}

fn check_instance(inst: &Instance, config: &OracleConfig, rng: &mut ChaCha8Rng) -> Report {
    let mut report = Report::default();
    match catch_unwind(AssertUnwindSafe(|| build(&inst.text, inst.block, config.fault))) {
        Ok(Ok(index)) => check_index(&index, inst, config, rng, &mut report),
        Ok(Err(e)) => report.failures.push(failure("build", inst, None, format!("{e}"))),
        Err(_) => report.failures.push(failure("build", inst, None, "panicked".into())),
    }
    report
}

fn failure(check: &'static str, inst: &Instance, pattern: Option<&[u8]>, detail: String) -> Failure {
    Failure { check, text: inst.text.clone(), block: inst.block, pattern: pattern.map(<[u8]>::to_vec), detail }
}

fn check_index(index: &Index, inst: &Instance, config: &OracleConfig, rng: &mut ChaCha8Rng, report: &mut Report) {
    let r = inst.block;
    let symbols = index.text().alphabet().symbols().to_vec();
    let codes = padded_codes(&inst.text, &symbols, r);
    if index.text().codes() != codes {
        report.failures.push(failure("text", inst, None, "packed codes differ from the oracle".into()));
        return;
    }
    let prefixes = PrefixOracle::new(&codes, r);

    for pattern in &inst.patterns {
        check_query(index, inst, &codes, &prefixes, pattern, config.fault, report);
    }
    check_links(index, inst, &codes, &prefixes, report);
    check_trie(index, inst, &codes, config.probes_per_instance, rng, report);

    let stats = index.stats();
    if stats.rho_within_bound() {
        report.rho_bound_ok += 1;
    } else {
        let detail = format!("{} rho letters > n + n/r = {}", stats.rho_letters, stats.len + stats.blocks);
        report.failures.push(failure("rho_bound", inst, None, detail));
    }
}

fn padded_codes(raw: &[u8], symbols: &[u8], r: usize) -> Vec<Code> {
    let filler = symbols.len() as Code + 1;
    let mut codes: Vec<Code> = raw
        .iter()
        .map(|b| symbols.binary_search(b).map_or(Code::MAX, |i| i as Code + 1))
        .collect();
    let n = (raw.len() + 1).div_ceil(r) * r;
    codes.resize(n - 1, filler);
    codes.push(0);
    codes
}

fn query_mismatch(index: &Index, pattern: &[u8]) -> Option<String> {
    let expected = naive_find_all(&index.text().raw_bytes(), pattern);
    let got = match catch_unwind(AssertUnwindSafe(|| index.find_all(pattern))) {
        Ok(Ok(occ)) => occ,
        Ok(Err(e)) => return Some(format!("error {e}")),
        Err(_) => return Some("panicked".into()),
    };
    let r = index.block();
    let positions: Vec<usize> = got.iter().map(|o| o.pos).collect();
    if positions != expected {
        return Some(format!("got {positions:?}, expected {expected:?}"));
    }
    if let Some(o) = got.iter().find(|o| o.k != k_offset(o.pos, r)) {
        return Some(format!("position {} reported with offset {}", o.pos, o.k));
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn check_query(
    index: &Index,
    inst: &Instance,
    codes: &[Code],
    prefixes: &PrefixOracle,
    pattern: &[u8],
    fault: Option<isize>,
    report: &mut Report,
) {
    let r = inst.block;
    let m = pattern.len();
    report.queries += 1;
    if let Some(detail) = query_mismatch(index, pattern) {
        let (text, pat) = minimize(&inst.text, pattern, r, fault);
        report.failures.push(Failure { check: "find_all", text, block: r, pattern: Some(pat), detail });
    }

    if m < r {
        report.short_queries += 1;
        let expected = naive_find_all(&inst.text, pattern);
        match index.find_short(pattern) {
            Ok(got) if got == expected => {}
            other => {
                let detail = format!("got {other:?}, expected {expected:?}");
                report.failures.push(failure("find_short", inst, Some(pattern), detail));
            }
        }
        return;
    }

    let Some(pcodes) = naive_pattern_codes(&inst.text, pattern) else {
        return;
    };
    let text = index.text();
    let Ok(packed) = text.pack_pattern(&pcodes) else {
        report.failures.push(failure("right_search", inst, Some(pattern), "pattern rejected".into()));
        return;
    };
    let (hits, counters) = match right_search(index.tree(), text, &packed) {
        Ok(x) => x,
        Err(e) => {
            report.failures.push(failure("right_search", inst, Some(pattern), format!("{e}")));
            return;
        }
    };
    let mut expected = Vec::new();
    for k in 0..r {
        let interval = prefixes.rank_interval(&pcodes[k..]);
        if codes.len() <= SMALL_TEXT && interval != naive_rank_interval(codes, r, &pcodes[k..]) {
            report.failures.push(failure("oracle", inst, Some(pattern), format!("rank interval oracles disagree at k={k}")));
        }
        if !interval.is_empty() {
            expected.push((k, interval));
        }
    }
    report.suffix_checks += r;
    let got: Vec<(usize, RankInterval)> = hits.iter().map(|h| (h.k, h.interval)).collect();
    if got != expected {
        let detail = format!("hits {got:?}, expected {expected:?}");
        report.failures.push(failure("right_search", inst, Some(pattern), detail));
    }
    let budget = 8 * (m + r * r + r);
    if !report.right_cost.record(counters.total(), budget) {
        let detail = format!("work {} > {budget}", counters.total());
        report.failures.push(failure("right_cost", inst, Some(pattern), detail));
    }

    let Ok((occ, stats)) = index.find_all_with_stats(pattern) else {
        return;
    };
    let sigma = text.alphabet().size();
    for call in &stats.left_calls {
        let budget = (sigma + 2) * r * (call.found + 1);
        if !report.traverse_cost.record(call.counters.traverse_visits, budget) {
            let detail = format!("k={} visited {} > {budget}", call.k, call.counters.traverse_visits);
            report.failures.push(failure("traverse_cost", inst, Some(pattern), detail));
        }
    }
    let budget = 16 * (m + r * r + r * (occ.len() + 1));
    if !report.total_cost.record(stats.total_work(), budget) {
        let detail = format!("work {} > {budget}", stats.total_work());
        report.failures.push(failure("total_cost", inst, Some(pattern), detail));
    }
}

/// Shrinks a failing (text, pattern) pair by deleting chunks while the
/// query still disagrees with the oracle.
fn minimize(text: &[u8], pattern: &[u8], r: usize, fault: Option<isize>) -> (Vec<u8>, Vec<u8>) {
    let mut budget = MINIMIZE_BUDGET;
    let mut fails = |t: &[u8], p: &[u8]| -> bool {
        if budget == 0 || t.is_empty() || p.is_empty() {
            return false;
        }
        budget -= 1;
        match catch_unwind(AssertUnwindSafe(|| build(t, r, fault))) {
            Ok(Ok(index)) => query_mismatch(&index, p).is_some(),
            _ => true,
        }
    };
    let mut t = text.to_vec();
    let mut p = pattern.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        let mut size = t.len() / 2;
        while size >= 1 {
            let mut start = 0;
            while start + size <= t.len() {
                let mut cand = t.clone();
                cand.drain(start..start + size);
                if fails(&cand, &p) {
                    t = cand;
                    changed = true;
                } else {
                    start += size;
                }
            }
            size /= 2;
        }
        for i in (0..p.len()).rev() {
            let mut cand = p.clone();
            cand.remove(i);
            if fails(&t, &cand) {
                p = cand;
                changed = true;
            }
        }
    }
    (t, p)
}

fn text_slice(codes: &[Code], (start, len): (usize, usize)) -> &[Code] {
    &codes[start - 1..start - 1 + len]
}

fn check_links(index: &Index, inst: &Instance, codes: &[Code], prefixes: &PrefixOracle, report: &mut Report) {
    let tree = index.tree();
    for v in tree.node_ids().filter(|&v| v != NodeId::ROOT) {
        report.links_checked += 1;
        let Some(link) = tree.link(v) else {
            report.failures.push(failure("suffix_link", inst, None, format!("node {v:?} has no link")));
            continue;
        };
        let alpha = text_slice(codes, tree.label_span(v));
        let (want, kind) = prefixes.suffix_link(alpha);
        let got = text_slice(codes, tree.locus_span(&link.target));
        if got != want.as_slice() || link.kind != kind {
            let detail = format!("node {v:?}: type {} to {got:?}, expected type {kind} to {want:?}", link.kind);
            report.failures.push(failure("suffix_link", inst, None, detail));
        }
        if let Some(parent) = tree.parent(v).filter(|&p| p != NodeId::ROOT) {
            report.chains_checked += 1;
            let above = tree.link(parent).map_or(0, |l| l.kind);
            if above > link.kind {
                let detail = format!("parent type {above} > child type {}", link.kind);
                report.failures.push(failure("link_monotone", inst, None, detail));
            }
        }
    }
}

fn check_trie(
    index: &Index,
    inst: &Instance,
    codes: &[Code],
    probes: usize,
    rng: &mut ChaCha8Rng,
    report: &mut Report,
) {
    let r = inst.block;
    let trie = index.trie();
    let filler = index.text().alphabet().filler();
    let sa = naive_sampled_sa(codes, r);

    // Full labels by walking down from the root.
    let mut labels: Vec<Vec<Code>> = vec![Vec::new(); trie.node_count()];
    let mut stack = vec![TrieNodeId::ROOT];
    while let Some(v) = stack.pop() {
        for &(_, u) in trie.children(v) {
            let mut label = labels[v.index()].clone();
            label.extend_from_slice(trie.edge_label(u));
            labels[u.index()] = label;
            stack.push(u);
        }
    }

    let ords: Vec<Vec<usize>> = labels.iter().map(|l| naive_ord(codes, r, &sa, l, filler)).collect();
    for v in trie.node_ids() {
        // Internal sequences are only kept when the index was built to retain them.
        let Some(got) = trie.ord(v).map(|o| o.iter().map(|&j| j as usize).collect::<Vec<_>>()) else {
            continue;
        };
        report.ord_checked += 1;
        if got != ords[v.index()] {
            let detail = format!("node {v:?} label {:?}: Ord {got:?}, expected {:?}", labels[v.index()], ords[v.index()]);
            report.failures.push(failure("ord", inst, None, detail));
        }
    }

    let internal: Vec<TrieNodeId> = trie.node_ids().filter(|&v| !trie.is_leaf(v)).collect();
    for _ in 0..probes {
        let Some(&v) = internal.choose(rng) else {
            break;
        };
        report.probes += 1;
        let ord_v = &ords[v.index()];
        let size = ord_v.len();
        let lo = rng.gen_range(1..=size);
        let hi = if rng.gen_bool(0.1) { lo - 1 } else { rng.gen_range(lo..=size) };
        let iv = RankInterval::new(lo, hi);
        let depth = labels[v.index()].len();
        let letters: Vec<Code> = trie.children(v).iter().map(|&(a, _)| a).collect();
        let a = *letters.choose(rng).unwrap();

        let selected: Vec<usize> = if iv.is_empty() {
            Vec::new()
        } else {
            ord_v[lo - 1..hi]
                .iter()
                .copied()
                .filter(|&j| naive_reversed_block(codes, r, j, filler)[depth] == a)
                .collect()
        };
        let child = trie.child_by_letter(v, a).unwrap();
        let ord_u = &ords[child.index()];
        let positions: Vec<usize> = selected.iter().map(|j| ord_u.iter().position(|x| x == j).unwrap() + 1).collect();
        let expected = match (positions.first(), positions.last()) {
            (Some(&first), Some(&last)) => RankInterval::new(first, last),
            _ => RankInterval::EMPTY,
        };
        if expected.len() != positions.len() {
            report.failures.push(failure("interval_step", inst, None, "brute-force positions not contiguous".into()));
        }
        let got = catch_unwind(AssertUnwindSafe(|| trie.interval_step(v, a, iv)));
        let ok = match &got {
            Ok(Ok((u, got))) => *u == child && (got == &expected || (got.is_empty() && expected.is_empty())),
            _ => false,
        };
        if !ok {
            let detail = format!("node {v:?} letter {a} interval {iv}: got {got:?}, expected {expected}");
            report.failures.push(failure("interval_step", inst, None, detail));
        }
    }
}

/// Renders a report as text lines with the summary last.
pub fn render(report: &Report) -> String {
    let mut out = String::new();
    let _ = write!(out, "{report}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(instances: usize) -> OracleConfig {
        OracleConfig {
            instances,
            text_len: 1..=200,
            exhaustive: false,
            threads: 2,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn clean_build_passes() {
        let report = run_differential(&small(20));
        assert!(report.passed(), "{report}");
        assert_eq!(report.instances, 20);
        assert!(report.probes > 0 && report.links_checked > 0);
    }

    #[test]
    fn empty_config_gives_empty_report() {
        let report = run_differential(&OracleConfig { instances: 0, ..OracleConfig::default() });
        assert!(report.passed());
        assert_eq!(report.queries, 0);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = run_differential(&small(5));
        let b = run_differential(&small(5));
        assert_eq!(a.summary(), b.summary());
    }

    #[test]
    fn seeded_mutant_is_caught() {
        let report = run_differential(&OracleConfig { fault: Some(-1), ..small(10) });
        assert!(report.count("interval_step") > 0);
    }
}
