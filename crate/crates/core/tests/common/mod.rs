#![allow(dead_code)]

use codestat::code::{
    extended_hamming_8_4, full_space, hamming_7_4, make_reed_solomon, random_code, repetition, Code,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The shared corpus: named codes plus seeded random codes over q ∈ {2,3,5}.
pub fn test_codes() -> Vec<(String, Code)> {
    let mut out: Vec<(String, Code)> = vec![
        ("hamming[7,4]".into(), hamming_7_4()),
        ("ext-hamming[8,4]".into(), extended_hamming_8_4()),
        ("rep2^3".into(), Code::from_strs(2, &["000", "111"]).unwrap()),
        ("rep3^4".into(), repetition(3, 4).unwrap()),
        ("rep5^2".into(), repetition(5, 2).unwrap()),
        ("full2^3".into(), full_space(2, 3).unwrap()),
        ("full3^2".into(), full_space(3, 2).unwrap()),
        ("rs3k2".into(), make_reed_solomon(3, 2).unwrap()),
        ("rs5k3".into(), make_reed_solomon(5, 3).unwrap()),
        ("rs7k2".into(), make_reed_solomon(7, 2).unwrap()),
        ("pair".into(), Code::from_strs(2, &["00000", "11100"]).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    while out.len() < 50 {
        let q = [2u32, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(2..=8usize);
        let space = (q as usize).pow(n as u32);
        let size = rng.gen_range(2..=space.min(64));
        let seed = rng.gen();
        out.push((format!("random q{q} n{n} #{size} s{seed}"), random_code(q, n, size, seed).unwrap()));
    }
    out
}
