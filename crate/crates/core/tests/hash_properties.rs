mod oracles;

use compana_core::datasets::texture;
use compana_core::hashing::{dhash, hamming, hash, is_duplicate};
use compana_core::rng::Stream;
use compana_core::{GrayImage, HashKind};

const SIDE: usize = 64;

fn image(seed: u64) -> Vec<f64> {
    texture(SIDE, SIDE, seed, 0.1, 0.9)
}

fn gray(px: Vec<f64>) -> GrayImage {
    GrayImage::new(SIDE, SIDE, px).unwrap()
}

#[test]
fn noisy_copies_are_flagged_as_duplicates() {
    let hits = (0..200)
        .filter(|&seed| {
            let px = image(seed);
            let mut s = Stream::new(seed ^ 0xD0);
            let noisy = px
                .iter()
                .map(|p| p + 0.02 * (2.0 * s.uniform() - 1.0))
                .collect();
            is_duplicate(&dhash(&gray(px)), &dhash(&gray(noisy)), 10).unwrap()
        })
        .count();
    assert!(hits >= 190, "{hits}/200");
}

#[test]
fn unrelated_textures_are_far_apart() {
    let distances: Vec<f64> = (0..200)
        .map(|i| {
            let a = dhash(&gray(image(10_000 + 2 * i)));
            let b = dhash(&gray(image(10_001 + 2 * i)));
            hamming(&a, &b).unwrap() as f64
        })
        .collect();
    let med = oracles::median(&distances);
    assert!(med >= 20.0, "median distance {med}");
}

#[test]
fn hashes_ignore_brightness_shifts() {
    for seed in 0..100 {
        let px = image(seed);
        let c = 0.08 * (seed as f64 / 50.0 - 1.0);
        let shifted = px.iter().map(|p| p + c).collect();
        let (a, b) = (gray(px), gray(shifted));
        for kind in [HashKind::AHash, HashKind::DHash, HashKind::PHash] {
            assert_eq!(hash(&a, kind), hash(&b, kind), "seed {seed} {kind}");
        }
    }
}
