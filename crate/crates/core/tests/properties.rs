use proptest::prelude::*;
use psi_core::block_trie::TrieNodeId;
use psi_core::format;
use psi_core::oracle::{
    naive_find_all, naive_ord, naive_padded_codes, naive_rank_interval, naive_reversed_block,
    naive_sampled_sa, naive_suffix_link,
};
use psi_core::right_search::right_search;
use psi_core::oracle::PrefixOracle;
use psi_core::sparse_tree::{
    build_suffix_array_r, compute_r_suffix_links, locate_beta_loci, NodeId, SparseSuffixTree,
};
use psi_core::{AlphabetMode, Code, Index, IndexConfig, PackedText, RankInterval};

fn text_strategy(max_len: usize) -> impl Strategy<Value = (Vec<u8>, usize)> {
    (prop::sample::select(vec![2u8, 3, 4, 16]), 1..=max_len, prop::sample::select(vec![1usize, 2, 3, 4, 8]))
        .prop_flat_map(|(sigma, n, r)| (prop::collection::vec(0..sigma, n), Just(r)))
        .prop_map(|(letters, r)| (letters.into_iter().map(|c| b'a' + c).collect(), r))
}

fn slice(codes: &[Code], (start, len): (usize, usize)) -> &[Code] {
    &codes[start - 1..start - 1 + len]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn text_round_trip((raw, r) in text_strategy(300)) {
        let t = PackedText::encode(&raw, r, AlphabetMode::Auto, None).unwrap();
        prop_assert_eq!(t.raw_bytes(), raw.clone());
        prop_assert_eq!(t.codes(), naive_padded_codes(&raw, r));
        prop_assert_eq!(t.len() % r, 0);
        for p in 1..=t.len() {
            prop_assert_eq!(t.char_at(p).unwrap(), t.codes()[p - 1]);
        }
    }

    #[test]
    fn compare_span_matches_naive(
        (raw, r) in text_strategy(200),
        pat in prop::collection::vec(b'a'..b'c', 1..40),
        tp in 1usize..200,
        pp in 1usize..40,
        len in 0usize..32,
    ) {
        let t = PackedText::encode(&raw, r, AlphabetMode::Auto, None).unwrap();
        let Ok(codes) = t.alphabet().encode(&pat) else { return Ok(()); };
        let packed = t.pack_pattern(&codes).unwrap();
        let text = t.codes();
        let result = t.compare_span(tp, &packed, pp, len);
        if len == 0 {
            prop_assert_eq!(result.unwrap(), 0);
        } else if len > t.capacity() || tp + len - 1 > t.len() || pp + len - 1 > codes.len() {
            prop_assert!(result.is_err());
        } else {
            let naive = (0..len).take_while(|&i| text[tp - 1 + i] == codes[pp - 1 + i]).count();
            prop_assert_eq!(result.unwrap(), naive);
        }
    }

    #[test]
    fn pack_halfblock_is_injective(letters in prop::collection::vec(0u16..6, 8)) {
        let t = PackedText::encode(b"abcd", 4, AlphabetMode::Auto, None).unwrap();
        let h = t.half_block();
        let a = t.pack_halfblock(&letters[..h]).unwrap();
        let b = t.pack_halfblock(&letters[h..2 * h]).unwrap();
        prop_assert_eq!(a == b, letters[..h] == letters[h..2 * h]);
        prop_assert_eq!(psi_core::text::unpack_halfblock(a, t.alphabet().base(), h), letters[..h].to_vec());
    }

    #[test]
    fn suffix_array_and_intervals_match_naive((raw, r) in text_strategy(200), s in prop::collection::vec(1u16..4, 0..6)) {
        let t = PackedText::encode(&raw, r, AlphabetMode::Auto, None).unwrap();
        let codes = t.codes();
        let sa = build_suffix_array_r(&t);
        prop_assert_eq!(sa.order().to_vec(), naive_sampled_sa(&codes, r));

        let tree = SparseSuffixTree::build(&t).unwrap();
        let expected = naive_rank_interval(&codes, r, &s);
        // Walk the tree by hand to the locus of `s`.
        let mut v = NodeId::ROOT;
        let mut d = 0;
        let mut found = true;
        while d < s.len() {
            let Some(child) = tree.child_by_letter(v, s[d]) else { found = false; break; };
            let (start, len) = tree.edge_span(child);
            let take = len.min(s.len() - d);
            if codes[start - 1..start - 1 + take] != s[d..d + take] { found = false; break; }
            d += take;
            v = child;
        }
        if found {
            prop_assert_eq!(RankInterval::new(tree.min_rank(v), tree.max_rank(v)), expected);
        } else {
            prop_assert!(expected.is_empty());
        }
    }

    #[test]
    fn typed_links_match_naive((raw, r) in text_strategy(120)) {
        let t = PackedText::encode(&raw, r, AlphabetMode::Auto, None).unwrap();
        let codes = t.codes();
        let tree = SparseSuffixTree::build(&t).unwrap();
        for v in tree.node_ids().filter(|&v| v != NodeId::ROOT) {
            let link = tree.link(v).unwrap();
            let alpha = slice(&codes, tree.label_span(v));
            let (want, kind) = naive_suffix_link(&codes, r, alpha);
            prop_assert_eq!(link.kind, kind);
            prop_assert!(kind <= r);
            prop_assert_eq!(slice(&codes, tree.locus_span(&link.target)), want.as_slice());
            if let Some(p) = tree.parent(v).filter(|&p| p != NodeId::ROOT) {
                prop_assert!(tree.link(p).unwrap().kind <= link.kind);
            }
        }
    }

    #[test]
    fn interval_step_matches_brute_force((raw, r) in text_strategy(200), seed in any::<u64>()) {
        let mut config = IndexConfig::new(r);
        config.retain_ord = true;
        let index = Index::build(&raw, &config).unwrap();
        let trie = index.trie();
        let codes = index.text().codes();
        let filler = index.text().alphabet().filler();
        let sa = naive_sampled_sa(&codes, r);
        let mut state = seed | 1;
        let mut next = |bound: usize| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % bound as u64) as usize
        };
        let mut stack = vec![(TrieNodeId::ROOT, Vec::<Code>::new())];
        while let Some((v, label)) = stack.pop() {
            if trie.is_leaf(v) {
                continue;
            }
            let ord_v = naive_ord(&codes, r, &sa, &label, filler);
            prop_assert_eq!(trie.ord(v).unwrap().iter().map(|&j| j as usize).collect::<Vec<_>>(), ord_v.clone());
            for &(a, u) in trie.children(v) {
                let lo = 1 + next(ord_v.len());
                let hi = lo + next(ord_v.len() - lo + 1);
                let (child, got) = trie.interval_step(v, a, RankInterval::new(lo, hi)).unwrap();
                prop_assert_eq!(child, u);
                let mut child_label = label.clone();
                child_label.extend_from_slice(trie.edge_label(u));
                let ord_u = naive_ord(&codes, r, &sa, &child_label, filler);
                let kept: Vec<usize> = ord_v[lo - 1..hi]
                    .iter()
                    .copied()
                    .filter(|&j| naive_reversed_block(&codes, r, j, filler)[label.len()] == a)
                    .map(|j| ord_u.iter().position(|&x| x == j).unwrap() + 1)
                    .collect();
                if kept.is_empty() {
                    prop_assert!(got.is_empty());
                } else {
                    prop_assert_eq!(got, RankInterval::new(kept[0], *kept.last().unwrap()));
                }
                stack.push((u, child_label));
            }
        }
    }

    #[test]
    fn find_all_matches_naive((raw, r) in text_strategy(300), pats in prop::collection::vec(prop::collection::vec(b'a'..b'e', 1..12), 1..8)) {
        let index = Index::build(&raw, &IndexConfig::new(r)).unwrap();
        let mut patterns = pats;
        // Substrings of the text make sure some queries hit.
        let m = raw.len().min(r + 2);
        patterns.push(raw[raw.len() - m..].to_vec());
        for pat in patterns {
            let got: Vec<usize> = index.find_all(&pat).unwrap().iter().map(|o| o.pos).collect();
            prop_assert_eq!(got, naive_find_all(&raw, &pat));
        }
    }

    #[test]
    fn right_search_reports_every_boundary_suffix((raw, r) in text_strategy(200), pat in prop::collection::vec(b'a'..b'c', 8..20)) {
        let t = PackedText::encode(&raw, r, AlphabetMode::Auto, None).unwrap();
        let Ok(codes) = t.alphabet().encode(&pat) else { return Ok(()); };
        let tree = SparseSuffixTree::build(&t).unwrap();
        let (hits, _) = right_search(&tree, &t, &t.pack_pattern(&codes).unwrap()).unwrap();
        let text = t.codes();
        let expected: Vec<(usize, RankInterval)> = (0..r)
            .map(|k| (k, naive_rank_interval(&text, r, &codes[k..])))
            .filter(|(_, iv)| !iv.is_empty())
            .collect();
        prop_assert_eq!(hits.iter().map(|h| (h.k, h.interval)).collect::<Vec<_>>(), expected);
    }

    #[test]
    fn serialization_round_trips((raw, r) in text_strategy(200)) {
        let index = Index::build(&raw, &IndexConfig::new(r)).unwrap();
        let bytes = format::to_bytes(&index);
        let back = format::from_bytes(&bytes).unwrap();
        prop_assert_eq!(&back, &index);
        prop_assert_eq!(format::to_bytes(&back), bytes);
    }

    #[test]
    fn node_intervals_are_sound((raw, r) in text_strategy(150)) {
        let t = PackedText::encode(&raw, r, AlphabetMode::Auto, None).unwrap();
        let codes = t.codes();
        let tree = SparseSuffixTree::build(&t).unwrap();
        let sa = tree.suffix_array();
        for v in tree.node_ids() {
            let label = slice(&codes, tree.label_span(v));
            for rank in 1..=sa.len() {
                let inside = (tree.min_rank(v)..=tree.max_rank(v)).contains(&rank);
                prop_assert_eq!(codes[r * sa.ordinal(rank)..].starts_with(label), inside);
            }
        }
    }

    #[test]
    fn beta_loci_are_longest_represented_prefixes((raw, r) in text_strategy(300)) {
        let t = PackedText::encode(&raw, r, AlphabetMode::Auto, None).unwrap();
        let codes = t.codes();
        let n = codes.len();
        let tree = SparseSuffixTree::build(&t).unwrap();
        let r_links = compute_r_suffix_links(&tree).unwrap();
        let prefixes = PrefixOracle::new(&codes, r);
        for i in 1..=r {
            let (beta, stats) = locate_beta_loci(&tree, &t, &r_links, i);
            for (j, locus) in beta.iter().enumerate() {
                let rest = &codes[(r * j + i).min(n)..];
                let longest = (0..=rest.len()).rev().find(|&l| prefixes.is_represented(&rest[..l])).unwrap();
                prop_assert_eq!(tree.locus_depth(locus), longest);
                if longest > 0 {
                    prop_assert_eq!(slice(&codes, tree.locus_span(locus)), &rest[..longest]);
                }
            }
            // Amortized walk: linear work per round.
            prop_assert!(stats.skip_steps + stats.extend_steps <= 2 * n + 4 * (n / r) + 4);
        }
    }
}
