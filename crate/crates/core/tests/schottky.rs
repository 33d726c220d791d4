mod common;

use common::*;
use hyperwalk::schottky::*;
use hyperwalk::{Error, FreeGroup, Mobius, Plane, PointedAction, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> FreeGroup {
    FreeGroup::new(2).unwrap()
}

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|s| s.parse().unwrap()).collect()
}

/// Number of `s` with `(y, s·z)_e > c`, computed on raw codes.
fn replay_failures(set: &[Vec<u8>], y: &[u8], z: &[u8], c: usize) -> usize {
    let y = naive_reduce(y);
    set.iter()
        .filter(|s| {
            let sz = naive_reduce(&[s.as_slice(), z].concat());
            let common = y.iter().zip(&sz).take_while(|(a, b)| a == b).count();
            common > c
        })
        .count()
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>) {
    let ly = rng.gen_range(0..=50);
    let lz = rng.gen_range(0..=50);
    (random_steps(2, ly, rng), random_steps(2, lz, rng))
}

#[test]
fn generators_are_not_schottky_at_c1() {
    let cert = verify_tree(&f2(), &words(&["a", "A", "b", "B"]), 1).unwrap();
    assert!(!cert.valid);
    assert_eq!((cert.worst_failures, cert.allowed_failures), (2, 1));
    assert_eq!(cert.worst_fraction, 0.5);
    let w = cert.witness.unwrap();
    assert!(w.y_class.starts_with('a'));
    let y: Word = w.y_class.parse().unwrap();
    let z: Word = w.z_class.parse().unwrap();
    let set: Vec<Vec<u8>> = ["a", "A", "b", "B"]
        .iter()
        .map(|s| codes_of(&s.parse().unwrap()))
        .collect();
    assert_eq!(replay_failures(&set, &codes_of(&y), &codes_of(&z), 1), 2);
}

#[test]
fn elementary_set_is_rejected_for_small_constants() {
    let g = f2();
    let set = words(&["a", "A"]);
    for c in 0..=5 {
        let cert = verify_tree(&g, &set, c).unwrap();
        assert!(!cert.valid, "C = {c}");
        assert!(cert.witness.is_some());
    }
    assert_eq!(minimal_constant(&g, &set, 5).unwrap(), None);
    assert!(minimal_constant(&g, &[], 5).is_err());
    assert!(verify_tree(&g, &[], 1).is_err());
    assert!(verify_tree(&g, &words(&["c"]), 1).is_err());
}

#[test]
fn certificates_serialize_with_mode_tag() {
    let cert = verify_tree(&f2(), &words(&["a", "A", "b", "B"]), 1).unwrap();
    let json = serde_json::to_value(&cert).unwrap();
    assert_eq!(json["mode"]["kind"], "tree-exact");
    assert_eq!(json["elements"].as_array().unwrap().len(), 4);
    assert_eq!(json["backend"], "free:q=2");
}

#[test]
fn pingpong_on_the_tree() {
    let g = f2();
    let (a, b) = ("a".parse().unwrap(), "b".parse().unwrap());
    let pp = construct_pingpong_tree(&g, &a, &b, &PingPongOptions::default(), 8).unwrap();
    assert_eq!(pp.elements.len(), 128);
    assert_eq!(pp.labels.len(), 128);
    assert!(pp.certificate.valid);
    let mut sorted = pp.labels.clone();
    sorted.sort();
    assert_eq!(sorted, pp.labels);
    let n = pp.n as usize;
    for (s, label) in pp.elements.iter().zip(&pp.labels) {
        assert_eq!(label.len(), 7);
        assert_eq!(s.len(), 7 * 2 * n);
        assert_eq!(g.translation_length(s), (14 * n) as f64);
    }
    // The same set re-verified at the reported constant.
    let again = verify_tree(&g, &pp.elements, pp.certificate.constant as usize).unwrap();
    assert_eq!(again, pp.certificate);

    // Replay random pairs against the certified worst case.
    let set: Vec<Vec<u8>> = pp.elements.iter().map(codes_of).collect();
    let c = pp.certificate.constant as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let (y, z) = random_pair(&mut rng);
        assert!(replay_failures(&set, &y, &z, c) <= pp.certificate.worst_failures);
    }
}

#[test]
fn replay_never_beats_the_certificate_for_small_sets() {
    let g = f2();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for list in [&["a", "A", "b", "B"][..], &["ab", "ba", "AB", "BA", "aab", "bba"], &["aa", "bb", "aB"]] {
        let set = words(list);
        let raw: Vec<Vec<u8>> = set.iter().map(codes_of).collect();
        for c in 0..=3 {
            let cert = verify_tree(&g, &set, c).unwrap();
            for _ in 0..2000 {
                let (y, z) = random_pair(&mut rng);
                assert!(replay_failures(&raw, &y, &z, c) <= cert.worst_failures, "{list:?} C={c}");
            }
            // The witness attains the reported count.
            if let Some(w) = &cert.witness {
                let y: Word = w.y_class.parse().unwrap();
                let z: Word = w.z_class.parse().unwrap();
                assert_eq!(replay_failures(&raw, &codes_of(&y), &codes_of(&z), c), cert.worst_failures);
            }
        }
    }
}

#[test]
fn pingpong_rejects_dependent_and_elliptic_inputs() {
    let g = f2();
    let a: Word = "a".parse().unwrap();
    let opts = PingPongOptions { n_cap: 4, ..Default::default() };
    assert!(matches!(
        construct_pingpong_tree(&g, &a, &a, &opts, 6),
        Err(Error::Construction(_))
    ));
    let e = Word::identity();
    assert!(construct_pingpong_tree(&g, &a, &e, &opts, 6).is_err());
    let plane = Plane::new();
    assert!(construct_pingpong(&plane, &Mobius::rotation(0.7), &Mobius::hyperbolic(1.0), &opts, |_, _| Ok(None)).is_err());
}

#[test]
fn pingpong_on_the_disc() {
    let plane = Plane::new();
    let g1 = Mobius::hyperbolic(1.0);
    let r = Mobius::rotation(std::f64::consts::FRAC_PI_4);
    let g2 = r.compose(&g1).compose(&r.inverse());
    let pp = construct_pingpong(&plane, &g1, &g2, &PingPongOptions::default(), |set, labels| {
        minimal_constant_sampled(&plane, "disc", set, labels.to_vec(), 50, 2000, 9)
    })
    .unwrap();
    assert_eq!(pp.elements.len(), 128);
    assert!(pp.certificate.valid);
    assert!(matches!(pp.certificate.mode, Mode::Sampled { trials: 2000 }));
    for s in &pp.elements {
        assert!(plane.translation_length(s) > LOXODROMIC_THRESHOLD);
    }
    let again = verify_sampled(&plane, "disc", &pp.elements, pp.labels.clone(), pp.certificate.constant, 2000, 10).unwrap();
    assert!(again.valid, "{again:?}");
}

#[test]
fn sampled_examples() {
    let plane = Plane::new();
    let g = Mobius::hyperbolic(1.0);
    let set = vec![g, g.inverse()];
    let labels = vec!["g".to_string(), "G".to_string()];
    let cert = verify_sampled(&plane, "disc", &set, labels.clone(), 3.0, 200, 1).unwrap();
    assert!(!cert.valid);
    assert!(cert.witness.is_some());
    assert!(verify_sampled(&plane, "disc", &set, labels.clone(), 3.0, 0, 1).is_err());
    assert!(verify_sampled(&plane, "disc", &set, vec![], 3.0, 10, 1).is_err());
    assert!(sampled_scan(&plane, &[], Some(1.0), 10, 1).is_err());
}

#[test]
fn sampled_and_exact_agree_on_the_tree() {
    let g = f2();
    let set = words(&["a", "A", "b", "B"]);
    let labels = set.iter().map(|w| w.to_string()).collect();
    let sampled = verify_sampled(&g, "free:q=2", &set, labels, 1.0, 5000, 3).unwrap();
    let exact = verify_tree(&g, &set, 1).unwrap();
    assert!(sampled.worst_failures <= exact.worst_failures);
}

#[test]
fn boost_examples() {
    let g = f2();
    let set = words(&["ab", "ba", "aB", "bA"]);
    let a10 = Word::generator_power(0, 10);
    let boost = boost_translation(&g, &set, &a10).unwrap();
    let max_s = 2.0;
    assert!(boost.deficit <= 2.0 * max_s);
    assert_eq!(boost.displacement, 10.0);
    let brute = set
        .iter()
        .map(|s| naive_cyclic_reduce(&[codes_of(s), codes_of(&a10)].concat()).len())
        .max()
        .unwrap();
    assert_eq!(boost.tau, brute as f64);
    let id = boost_translation(&g, &set, &Word::identity()).unwrap();
    assert_eq!((id.index, id.tau), (0, 2.0));
    assert!(boost_translation(&g, &[], &a10).is_err());
}

#[test]
fn boost_deficit_does_not_grow_with_length() {
    let g = f2();
    let pp = construct_pingpong_tree(&g, &"a".parse().unwrap(), &"b".parse().unwrap(), &PingPongOptions::default(), 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tracker = DeficitTracker::default();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for _ in 0..1000 {
        let len = rng.gen_range(50..=400);
        let w = hyperwalk::free_group::uniform_sphere_sample(2, len, &mut rng).unwrap();
        let b = boost_translation(&g, &pp.elements, &w).unwrap();
        tracker.record(&b);
        xs.push(len as f64);
        ys.push(b.deficit);
    }
    assert_eq!(tracker.calls, 1000);
    let slope = hyperwalk::stats::linear_fit(&xs, &ys).unwrap().slope;
    assert!(slope.abs() < 0.01, "{slope}");
    assert!(tracker.max_deficit <= 2.0 * 14.0 * pp.n as f64);
}

#[test]
fn rotation_lengths_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=30 {
        let steps = random_steps(2, n, &mut rng);
        let w: Vec<_> = steps.iter().map(|&c| hyperwalk::Letter::from_code(c as usize)).collect();
        assert_eq!(rotation_lengths(&w), brute_rotations(&steps));
    }
}

#[test]
fn moving_tau_endpoints_and_gaps() {
    for n in 1..=7 {
        for steps in all_sequences(2, n) {
            let letters: Vec<_> = steps.iter().map(|&c| hyperwalk::Letter::from_code(c as usize)).collect();
            let d = naive_reduce(&steps).len() as f64;
            let tau = naive_cyclic_reduce(&steps).len() as f64;
            assert_eq!(moving_tau_search(&letters, d).unwrap().gap, 0.0);
            assert_eq!(moving_tau_search(&letters, tau).unwrap().gap, 0.0);
            let mut r = tau;
            while r <= d {
                assert!(moving_tau_search(&letters, r).unwrap().gap <= 2.0);
                r += 0.5;
            }
            assert!(moving_tau_search(&letters, d + 1.0).is_err());
        }
    }
}

#[test]
fn moving_tau_tie_goes_to_smallest_index() {
    let letters: Vec<_> = "abab".parse::<Word>().unwrap().letters().to_vec();
    let m = moving_tau_search(&letters, 4.0).unwrap();
    assert_eq!((m.index, m.gap), (1, 0.0));
    assert!(moving_tau_search(&[], 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moving_tau_gap_is_at_most_two(steps in prop::collection::vec(0u8..4, 1..=40), t in 0.0f64..=1.0) {
        let letters: Vec<_> = steps.iter().map(|&c| hyperwalk::Letter::from_code(c as usize)).collect();
        let d = naive_reduce(&steps).len() as f64;
        let tau = naive_cyclic_reduce(&steps).len() as f64;
        let m = moving_tau_search(&letters, tau + t * (d - tau)).unwrap();
        prop_assert!(m.gap <= 2.0);
        prop_assert!(m.index >= 1 && m.index <= steps.len());
    }
}
