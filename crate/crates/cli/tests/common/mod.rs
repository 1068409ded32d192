#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sr_difficulty::{LumaPlane, RgbImage};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sr-difficulty"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sr-difficulty")
}

pub fn arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Textured RGB test image: a few seeded gradients and blobs plus noise.
pub fn textured(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fx: f64 = rng.gen_range(0.05..0.4);
    let fy: f64 = rng.gen_range(0.05..0.4);
    let phase: f64 = rng.gen_range(0.0..6.0);
    let edge = rng.gen_range(width / 4..3 * width / 4);
    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let base = 120.0 + 50.0 * (fx * x as f64 + fy * y as f64 + phase).sin()
                + if x + y / 2 > edge { 40.0 } else { -40.0 };
            for c in 0..3 {
                let v = base + 10.0 * c as f64 + rng.gen_range(-12.0..12.0);
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RgbImage::new(width, height, data).unwrap()
}

/// Copy of `img` with seeded noise of amplitude `amp` added to every channel.
pub fn degraded(img: &RgbImage, amp: f64, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = img
        .data()
        .iter()
        .map(|&v| (v as f64 + rng.gen_range(-amp..=amp)).round().clamp(0.0, 255.0) as u8)
        .collect();
    RgbImage::new(img.width(), img.height(), data).unwrap()
}

pub fn save(img: &RgbImage, dir: &Path, id: &str) -> PathBuf {
    let path = dir.join(format!("{id}.png"));
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    img.save_png(&path).unwrap();
    path
}

pub fn constant_png(dir: &Path, id: &str, value: u8) -> PathBuf {
    save(&RgbImage::filled(48, 48, [value; 3]).unwrap(), dir, id)
}

pub fn gray(p: &LumaPlane) -> RgbImage {
    RgbImage::from_gray(p).unwrap()
}

/// HR, SR and LR trees with `n` images each.
pub struct Dataset {
    pub hr: PathBuf,
    pub sr: PathBuf,
    pub lr: PathBuf,
}

pub fn dataset(root: &Path, n: usize, seed: u64) -> Dataset {
    let ds = Dataset { hr: root.join("hr"), sr: root.join("sr"), lr: root.join("lr") };
    for i in 0..n {
        let id = format!("img_{i:03}");
        let hr = textured(256, 256, seed + i as u64);
        save(&hr, &ds.hr, &id);
        save(&degraded(&hr, 4.0 + 3.0 * i as f64, seed + 100 + i as u64), &ds.sr, &id);
        save(&hr.bicubic_downscale4().unwrap(), &ds.lr, &id);
    }
    ds
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
