use std::collections::{BTreeMap, BTreeSet};

use fpindex::fingerprint_index::{BuildOptions, BuilderKind, FingerprintIndex};
use fpindex::naming::name_fingerprints;
use fpindex::online_builders::{build_mc, build_names_randomized, enumerate_change_lists};
use fpindex::oracle::{oracle_all, phi_partition};
use fpindex::participation_tree::ParticipationTree;
use fpindex::polyhash::{add_mod, pow_mod, HashParams};
use fpindex::set_equality::{eq_bits, eq_hash, eq_partitioned, EqualityScratch};
use fpindex::suffix_tree::SuffixTree;
use fpindex::{normalize, Error, Fingerprint, MaximalLocation, Rank, Sequence};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn text(max_sigma: u8, max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    (1..=max_sigma)
        .prop_flat_map(move |s| prop::collection::vec((0..s).prop_map(|x| b'a' + x), 1..=max_len))
}

fn seq_of(raw: &[u8]) -> Sequence {
    normalize(raw).unwrap().0
}

fn distinct(v: &[Rank]) -> bool {
    v.iter().collect::<BTreeSet<_>>().len() == v.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_text_is_simple(raw in text(6, 80)) {
        let (seq, alpha) = normalize(&raw).unwrap();
        prop_assert!(seq.ranks().windows(2).all(|w| w[0] != w[1]));
        prop_assert_eq!(seq.raw_len(), raw.len());
        for p in 1..=seq.len() {
            let (a, b) = seq.denormalize(MaximalLocation::new(p, p)).unwrap();
            prop_assert!(raw[a - 1..b].iter().all(|&c| alpha.rank(c) == Some(seq.at(p))));
        }
    }

    #[test]
    fn oracle_strategies_agree(raw in text(5, 40)) {
        let seq = seq_of(&raw);
        let gt = oracle_all(&seq).unwrap();
        let mut via_extend = BTreeSet::new();
        for i in 1..=seq.len() {
            for j in i..=seq.len() {
                via_extend.insert(seq.extend(i, j).unwrap());
            }
        }
        let direct: BTreeSet<MaximalLocation> = gt.locations.iter().map(|(l, _)| *l).collect();
        prop_assert_eq!(via_extend, direct);
        prop_assert!(gt.location_count() <= seq.len() * seq.sigma());
    }

    #[test]
    fn participation_tree_invariants(raw in text(6, 60)) {
        let seq = seq_of(&raw);
        let tree = SuffixTree::build(&seq);
        let pt = ParticipationTree::build(&tree, &seq);
        let gt = oracle_all(&seq).unwrap();
        let paths: Vec<_> = pt.root_paths().collect();
        for (word, _) in &paths {
            prop_assert!(distinct(word));
            prop_assert!(word.iter().all(|&c| (c as usize) < seq.sigma()));
        }
        prop_assert!(pt.edge_count() <= gt.class_count());
        let mut attached: Vec<usize> =
            pt.nodes().iter().flat_map(|n| n.attached.iter().map(|a| a.suffix)).collect();
        attached.sort_unstable();
        prop_assert_eq!(attached, (1..=seq.len() + 1).collect::<Vec<_>>());
        let phi = phi_partition(&seq, &gt, &paths);
        prop_assert_eq!(phi.check(&gt), Ok(()));
        let labelled: BTreeSet<Fingerprint> =
            paths.iter().map(|(w, _)| Fingerprint::from_ranks(w.iter().copied(), seq.sigma())).collect();
        prop_assert_eq!(labelled.into_iter().collect::<Vec<_>>(), gt.fingerprints.clone());
    }

    #[test]
    fn tree_names_identify_sets(raw in text(8, 100)) {
        let seq = seq_of(&raw);
        let tree = SuffixTree::build(&seq);
        let pt = ParticipationTree::build(&tree, &seq);
        let naming = name_fingerprints(&pt);
        prop_assert!(naming.tables_restored);
        prop_assert!(naming.level_counts.iter().all(|&c| c <= pt.edge_count() + 1));
        let mut by_name: BTreeMap<u32, Fingerprint> = BTreeMap::new();
        let mut by_set: BTreeMap<Fingerprint, u32> = BTreeMap::new();
        for v in 0..pt.node_count() {
            let f = Fingerprint::from_ranks(pt.word(v), seq.sigma());
            let name = naming.names[v];
            prop_assert_eq!(by_name.entry(name).or_insert_with(|| f.clone()).clone(), f.clone());
            prop_assert_eq!(*by_set.entry(f).or_insert(name), name);
        }
    }

    #[test]
    fn change_lists_match_supports(raw in text(6, 60)) {
        let seq = seq_of(&raw);
        let gt = oracle_all(&seq).unwrap();
        let mut total = 0;
        for list in enumerate_change_lists(&seq) {
            prop_assert!(distinct(&list.chars));
            prop_assert!(list.chars.iter().all(|&c| c != seq.sentinel()));
            for t in 1..=list.location_prefixes() {
                let loc = seq.extend(list.support, list.ends[t - 1]).unwrap();
                prop_assert_eq!(seq.support(loc.start, loc.end).unwrap(), list.support);
                prop_assert_eq!(&seq.o_label(loc.start, loc.end).unwrap()[..], &list.chars[..t]);
                total += 1;
            }
        }
        prop_assert_eq!(total, gt.location_count());
    }

    #[test]
    fn randomized_partition_matches_oracle(raw in text(8, 100)) {
        let seq = seq_of(&raw);
        let gt = oracle_all(&seq).unwrap();
        let names = build_names_randomized(&seq);
        prop_assert_eq!(names.entries.len(), gt.fingerprint_count());
        let mut groups: Vec<Vec<MaximalLocation>> = Vec::new();
        for (entry, supports) in names.entries.iter().zip(&names.supports) {
            let f = Fingerprint::from_ranks(entry.witness_string(&seq), seq.sigma());
            let mut locs: Vec<MaximalLocation> =
                supports.iter().map(|&m| fpindex::fingerprint_index::expand(&seq, &f, m as usize)).collect();
            locs.sort();
            prop_assert_eq!(&locs, &gt.locations_of(&f));
            groups.push(locs);
        }
        prop_assert_eq!(groups.iter().map(Vec::len).sum::<usize>(), gt.location_count());
    }

    #[test]
    fn mc_names_count(raw in text(8, 120), seed in any::<u64>()) {
        let seq = seq_of(&raw);
        let gt = oracle_all(&seq).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = build_mc(&seq, 1, true, &mut rng).unwrap();
        prop_assert_eq!(mc.entries.len(), gt.fingerprint_count());
        prop_assert_eq!(mc.supports.unwrap().iter().map(Vec::len).sum::<usize>(), gt.location_count());
    }

    #[test]
    fn index_matches_oracle(raw in text(7, 80), seed in any::<u64>()) {
        let seq = seq_of(&raw);
        let gt = oracle_all(&seq).unwrap();
        for builder in [BuilderKind::Exact, BuilderKind::Randomized] {
            let index = FingerprintIndex::build(&raw, BuildOptions::new(builder, seed)).unwrap();
            let mut got: Vec<(Fingerprint, Vec<MaximalLocation>)> = index.all_locations();
            got.sort();
            let expect: Vec<_> = gt.fingerprints.iter().map(|f| (f.clone(), gt.locations_of(f))).collect();
            prop_assert_eq!(got, expect);
            for v in 1..index.trie().len() {
                let s = index.trie().string(v);
                let mut sorted = s.clone();
                sorted.sort_unstable();
                prop_assert_eq!(index.peel(&sorted), s);
            }
        }
    }

    #[test]
    fn exists_is_permutation_invariant(raw in text(8, 80), query in prop::collection::vec(0u8..8, 1..8)) {
        let index = FingerprintIndex::build(&raw, BuildOptions::default()).unwrap();
        let bytes: Vec<u8> = query.iter().map(|&x| b'a' + x).collect();
        let mut reversed = bytes.clone();
        reversed.reverse();
        let mut doubled = bytes.clone();
        doubled.extend_from_slice(&bytes);
        let answer = index.exists(&bytes);
        prop_assert_eq!(index.exists(&reversed), answer);
        prop_assert_eq!(index.exists(&doubled), answer);
        let seq = index.sequence();
        let expect = match index.query_ranks(&bytes) {
            Some(r) => oracle_all(seq).unwrap().contains(&Fingerprint::from_ranks(r, seq.sigma())),
            None => false,
        };
        prop_assert_eq!(answer, expect);
    }

    #[test]
    fn serialization_round_trip(raw in text(6, 60), seed in any::<u64>()) {
        let index = FingerprintIndex::build(&raw, BuildOptions::new(BuilderKind::Mc, seed)).unwrap();
        let back = FingerprintIndex::from_bytes(&index.to_bytes()).unwrap();
        prop_assert_eq!(back.all_locations(), index.all_locations());
        prop_assert_eq!(back.to_bytes(), index.to_bytes());
    }

    #[test]
    fn incremental_hash_identity(
        x in 1u64..1_000_000,
        set in prop::collection::btree_set(0u32..64, 0..20),
        extra in 0u32..64,
        c in 1usize..4,
    ) {
        let p = 1_000_003;
        let params = HashParams::new(p, x, 64, c);
        prop_assume!(!set.contains(&extra));
        let base = params.hash_set(set.iter().copied()).unwrap();
        let grown = params.hash_set(set.iter().copied().chain([extra])).unwrap();
        prop_assert_eq!(grown, add_mod(base, params.power(extra).unwrap(), p));
        prop_assert_eq!(params.power(extra).unwrap(), pow_mod(x, extra as u64, p));
    }

    #[test]
    fn equality_methods_agree(
        s1 in prop::collection::vec(0u32..64, 0..12),
        s2 in prop::collection::vec(0u32..64, 0..12),
        sigma_bits in 1u32..7,
    ) {
        let sigma = 1usize << sigma_bits;
        let s1: Vec<Rank> = s1.into_iter().map(|c| c % sigma as u32).collect();
        let mut s2: Vec<Rank> = s2.into_iter().map(|c| c % sigma as u32).collect();
        s2.resize(s1.len(), 0);
        let mut scratch = EqualityScratch::new(sigma);
        let kind = |r: &Result<bool, Error>| match r {
            Ok(b) => Some(*b),
            Err(Error::DuplicateCharacter(_)) => None,
            Err(e) => panic!("unexpected {e}"),
        };
        let bits = eq_bits(&s1, &s2, &mut scratch);
        let hash = eq_hash(&s1, &s2);
        let k2 = eq_partitioned(&s1, &s2, 2, &mut scratch);
        let k3 = eq_partitioned(&s1, &s2, 3, &mut scratch);
        let sym = eq_bits(&s2, &s1, &mut scratch);
        prop_assert_eq!(kind(&bits), kind(&hash));
        prop_assert_eq!(kind(&bits), kind(&k2));
        prop_assert_eq!(kind(&bits), kind(&k3));
        prop_assert_eq!(kind(&bits), kind(&sym));
        prop_assert!(scratch.is_clean());
        prop_assert_eq!(scratch.checksum(), 0);
        let expect = if !distinct(&s1) || !distinct(&s2) {
            None
        } else {
            Some(s1.iter().collect::<BTreeSet<_>>() == s2.iter().collect::<BTreeSet<_>>())
        };
        prop_assert_eq!(kind(&bits), expect);
    }

    #[test]
    fn equal_sets_as_permutations(set in prop::collection::btree_set(0u32..32, 0..16), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let s1: Vec<Rank> = set.into_iter().collect();
        let mut s2 = s1.clone();
        s2.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut scratch = EqualityScratch::new(32);
        prop_assert_eq!(eq_bits(&s1, &s2, &mut scratch), Ok(true));
        prop_assert_eq!(eq_partitioned(&s1, &s2, 2, &mut scratch), Ok(true));
        prop_assert_eq!(eq_partitioned(&s1, &s2, 3, &mut scratch), Ok(true));
        prop_assert_eq!(eq_hash(&s1, &s2), Ok(true));
        prop_assert!(scratch.is_clean());
    }
}
