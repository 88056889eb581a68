use amuse_core::backend::transform::{block_dct4, block_idct4, haar_dwt_1level, haar_idwt_1level};
use amuse_core::backend::{psnr, DctDwt, DctDwtParams, RgbImage, Synthetic, SyntheticRecord, WatermarkBackend};
use amuse_core::channel::{mix_seed, random_message, rng};
use amuse_core::corpus::{natural_corpus, natural_image};
use amuse_core::metrics::bit_accuracy;
use amuse_core::BitString;
use rand::Rng;

fn dctdwt(scale: f64) -> DctDwt {
    DctDwt::new(DctDwtParams::new(scale).unwrap()).unwrap()
}

fn crop(img: &RgbImage, x0: u32, y0: u32, w: u32, h: u32) -> RgbImage {
    let mut data = Vec::with_capacity((w * h * 3) as usize);
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            data.extend_from_slice(&img.pixel(x, y));
        }
    }
    RgbImage::from_raw(w, h, data).unwrap()
}

fn interface_law<B: WatermarkBackend>(backend: &B, sample: &B::Sample, bits: &BitString) {
    let marked = backend.embed(sample, bits).unwrap();
    assert_eq!(backend.extract(&marked, bits.len()).unwrap(), *bits, "{}", backend.id());
}

#[test]
fn both_backends_satisfy_interface_law() {
    let bits = random_message(63, 2);
    interface_law(&Synthetic, &SyntheticRecord::default(), &bits);
    interface_law(&dctdwt(36.0), &natural_image(96, 96, 4).unwrap(), &bits);
}

#[test]
fn blind_round_trip_on_random_crops() {
    let sources = natural_corpus(10, 256, 77).unwrap();
    let mut r = rng(mix_seed(77, &[1]));
    for case in 0..100 {
        let src = &sources[case % sources.len()];
        let w = r.random_range(64..=256u32);
        let h = r.random_range(64..=256u32);
        let img = crop(src, r.random_range(0..=256 - w), r.random_range(0..=256 - h), w, h);
        let capacity = DctDwt::capacity(w, h);
        let len = r.random_range(1..=capacity);
        let scale = if case % 2 == 0 { 30.0 } else { 36.0 };
        let bits = random_message(len, case as u64);
        let dw = dctdwt(scale);
        let marked = dw.embed(&img, &bits).unwrap();
        let ba = bit_accuracy(&dw.extract(&marked, len).unwrap(), &bits).unwrap();
        assert_eq!(ba, 1.0, "case {case}: {w}x{h} len {len} scale {scale}");
    }
}

#[test]
fn coefficient_noise_inside_half_step_is_harmless() {
    let dw = dctdwt(30.0);
    let img = natural_image(128, 128, 9).unwrap();
    let (luma, _, _) = DctDwt::luma_plane(&img);
    let bits = random_message(100, 9);
    let marked = dw.embed_luma(&luma, &bits).unwrap();

    let mut bands = haar_dwt_1level(&marked).unwrap();
    let mut r = rng(5);
    let (bw, bh) = (bands.ll.width() / 4, bands.ll.height() / 4);
    for by in 0..bh {
        for bx in 0..bw {
            let mut c = block_dct4(&bands.ll.block4(bx, by));
            c[1][2] += r.random_range(-14.99..14.99);
            bands.ll.set_block4(bx, by, &block_idct4(&c));
        }
    }
    let noisy = haar_idwt_1level(&bands).unwrap();
    let blocks = dw.block_bits(&noisy).unwrap();
    assert!(blocks.iter().enumerate().all(|(j, &b)| b == bits[j % 100]));
}

#[test]
fn pixel_rounding_keeps_every_block_at_scale_30() {
    let dw = dctdwt(30.0);
    for (i, img) in natural_corpus(10, 128, 3).unwrap().iter().enumerate() {
        let bits = random_message(256, i as u64);
        let marked = dw.embed(img, &bits).unwrap();
        let (luma, _, _) = DctDwt::luma_plane(&marked);
        let blocks = dw.block_bits(&luma).unwrap();
        assert!(blocks.iter().enumerate().all(|(j, &b)| b == bits[j % 256]));
    }
}

#[test]
fn psnr_non_increasing_in_scale() {
    let corpus = natural_corpus(8, 128, 12).unwrap();
    let mean_psnr = |scale: f64| {
        let dw = dctdwt(scale);
        corpus
            .iter()
            .enumerate()
            .map(|(i, img)| psnr(img, &dw.embed(img, &random_message(100, i as u64)).unwrap()).unwrap())
            .sum::<f64>()
            / corpus.len() as f64
    };
    let values: Vec<f64> = [10.0, 20.0, 30.0, 36.0, 50.0].iter().map(|&s| mean_psnr(s)).collect();
    assert!(values.windows(2).all(|w| w[0] >= w[1]), "{values:?}");
    // a 36 dB class image at the default strength
    assert!(values[3] > 30.0 && values[3] < 45.0, "{values:?}");
}

#[test]
fn unmarked_images_read_as_chance() {
    let dw = dctdwt(36.0);
    let corpus = natural_corpus(20, 128, 21).unwrap();
    let mean: f64 = corpus
        .iter()
        .enumerate()
        .map(|(i, img)| {
            let m = random_message(100, 500 + i as u64);
            bit_accuracy(&dw.extract(img, 100).unwrap(), &m).unwrap()
        })
        .sum::<f64>()
        / corpus.len() as f64;
    // 2000 fair coin flips: 3 sigma is about 0.034
    assert!((mean - 0.5).abs() < 0.034, "{mean}");
}

#[test]
fn shorter_messages_get_at_least_as_many_repeats() {
    let capacity = DctDwt::capacity(256, 256);
    let min_repeats = |len: usize| capacity / len;
    for len in 1..capacity {
        assert!(min_repeats(len) >= min_repeats(len + 1));
    }
}

#[test]
fn shorter_messages_extract_no_worse_under_stress() {
    // scale 5 is where 8-bit rounding starts to flip blocks
    let corpus = natural_corpus(10, 256, 31).unwrap();
    for scale in [20.0, 5.0] {
        let dw = dctdwt(scale);
        let ba = |len: usize| {
            corpus
                .iter()
                .enumerate()
                .map(|(i, img)| {
                    let m = random_message(len, i as u64);
                    bit_accuracy(&dw.extract(&dw.embed(img, &m).unwrap(), len).unwrap(), &m).unwrap()
                })
                .sum::<f64>()
                / corpus.len() as f64
        };
        let (short, long) = (ba(100), ba(300));
        assert!(short >= long, "scale {scale}: {short} < {long}");
    }
}
