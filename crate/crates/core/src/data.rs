//! MNIST ingestion and dataset preparation.
//!
//! IDX files are big-endian: magic `0x00000803` (images) or `0x00000801`
//! (labels), item count, then for images the row and column counts, then raw
//! `u8` payload. Images are center-cropped to 24×24, averaged over 3×3 blocks
//! to 8×8, and flattened row-major into 64 amplitudes.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;

use crate::error::{config, Error, Result};
use crate::rng::stream_rng;
use crate::scalar::Scalar;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const SIDE: usize = 28;
pub const PIXELS: usize = SIDE * SIDE;
pub const DOWN_SIDE: usize = 8;
const CROP: usize = 2;
const BLOCK: usize = 3;

/// Added to every downsampled value before normalization.
pub const NORM_GUARD: f64 = 1e-8;

/// Standard MNIST file names inside a data directory.
pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawImage {
    /// Row-major 28×28 grayscale.
    pub pixels: Vec<u8>,
    pub label: u8,
}

impl RawImage {
    pub fn new(pixels: Vec<u8>, label: u8) -> Result<Self> {
        if pixels.len() != PIXELS {
            return Err(config(format!("image has {} pixels, need {PIXELS}", pixels.len())));
        }
        if label > 9 {
            return Err(config(format!("label {label} outside 0..=9")));
        }
        Ok(RawImage { pixels, label })
    }

    pub fn flipped_horizontally(&self) -> RawImage {
        let pixels = self
            .pixels
            .chunks(SIDE)
            .flat_map(|row| row.iter().rev().copied())
            .collect();
        RawImage {
            pixels,
            label: self.label,
        }
    }
}

/// Unit-norm amplitude vector with its class label.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedSample<T: Scalar = f64> {
    pub amplitudes: Vec<T>,
    pub label: usize,
}

fn read_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")))
        .ok_or_else(|| Error::Format {
            offset: offset as u64,
            message: format!("truncated header: missing {what}"),
        })
}

fn expect_magic(bytes: &[u8], magic: u32, what: &str) -> Result<()> {
    let found = read_u32(bytes, 0, "magic number")?;
    if found != magic {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad {what} magic 0x{found:08x}, expected 0x{magic:08x}"),
        });
    }
    Ok(())
}

/// Parses an IDX3 image file into row-major 28×28 buffers.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<Vec<u8>>> {
    expect_magic(bytes, IMAGE_MAGIC, "image")?;
    let count = read_u32(bytes, 4, "item count")? as usize;
    let rows = read_u32(bytes, 8, "row count")? as usize;
    let cols = read_u32(bytes, 12, "column count")? as usize;
    if rows != SIDE || cols != SIDE {
        return Err(Error::Format {
            offset: 8,
            message: format!("images are {rows}x{cols}, expected {SIDE}x{SIDE}"),
        });
    }
    let payload = &bytes[16..];
    if payload.len() < count * PIXELS {
        let complete = payload.len() / PIXELS;
        return Err(Error::Format {
            offset: (16 + complete * PIXELS) as u64,
            message: format!(
                "truncated pixel data: image {complete} of {count} is incomplete"
            ),
        });
    }
    Ok(payload[..count * PIXELS]
        .chunks(PIXELS)
        .map(<[u8]>::to_vec)
        .collect())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    expect_magic(bytes, LABEL_MAGIC, "label")?;
    let count = read_u32(bytes, 4, "item count")? as usize;
    let payload = &bytes[8..];
    if payload.len() < count {
        return Err(Error::Format {
            offset: (8 + payload.len()) as u64,
            message: format!("truncated labels: {} of {count} present", payload.len()),
        });
    }
    if let Some(i) = payload[..count].iter().position(|&l| l > 9) {
        return Err(Error::Format {
            offset: (8 + i) as u64,
            message: format!("label {} outside 0..=9", payload[i]),
        });
    }
    Ok(payload[..count].to_vec())
}

/// Reads an image/label file pair, in file order.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Vec<RawImage>> {
    let images = parse_idx_images(&fs::read(images_path)?)?;
    let labels = parse_idx_labels(&fs::read(labels_path)?)?;
    if images.len() != labels.len() {
        return Err(Error::Format {
            offset: 4,
            message: format!(
                "image count {} does not match label count {}",
                images.len(),
                labels.len()
            ),
        });
    }
    Ok(images
        .into_iter()
        .zip(labels)
        .map(|(pixels, label)| RawImage { pixels, label })
        .collect())
}

pub fn encode_idx(images: &[RawImage]) -> (Vec<u8>, Vec<u8>) {
    let n = images.len() as u32;
    let mut img = Vec::with_capacity(16 + images.len() * PIXELS);
    for word in [IMAGE_MAGIC, n, SIDE as u32, SIDE as u32] {
        img.extend_from_slice(&word.to_be_bytes());
    }
    let mut lbl = Vec::with_capacity(8 + images.len());
    for word in [LABEL_MAGIC, n] {
        lbl.extend_from_slice(&word.to_be_bytes());
    }
    for im in images {
        img.extend_from_slice(&im.pixels);
        lbl.push(im.label);
    }
    (img, lbl)
}

pub fn write_idx(
    images: &[RawImage],
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<()> {
    let (img, lbl) = encode_idx(images);
    fs::write(images_path, img)?;
    fs::write(labels_path, lbl)?;
    Ok(())
}

/// Crop 2 pixels per side, then 3×3 block mean. Row-major 8×8, values in `[0, 255]`.
pub fn downsample(image: &RawImage) -> [f64; DOWN_SIDE * DOWN_SIDE] {
    let mut out = [0.0; DOWN_SIDE * DOWN_SIDE];
    for (idx, cell) in out.iter_mut().enumerate() {
        let (br, bc) = (idx / DOWN_SIDE, idx % DOWN_SIDE);
        let mut sum = 0u32;
        for r in 0..BLOCK {
            for c in 0..BLOCK {
                let row = CROP + br * BLOCK + r;
                let col = CROP + bc * BLOCK + c;
                sum += u32::from(image.pixels[row * SIDE + col]);
            }
        }
        *cell = f64::from(sum) / (BLOCK * BLOCK) as f64;
    }
    out
}

/// Downsample, add [`NORM_GUARD`], L2-normalize.
pub fn prepare<T: Scalar>(image: &RawImage, n_classes: usize) -> Result<PreparedSample<T>> {
    let label = usize::from(image.label);
    if label >= n_classes {
        return Err(config(format!("label {label} not below n_classes {n_classes}")));
    }
    let guarded: Vec<f64> = downsample(image).iter().map(|v| v + NORM_GUARD).collect();
    let norm = guarded.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(PreparedSample {
        amplitudes: guarded.iter().map(|v| T::lit(v / norm)).collect(),
        label,
    })
}

/// Images whose label is below `n_classes` ("classes 0 to n_classes-1").
pub fn filter_classes(images: &[RawImage], n_classes: usize) -> impl Iterator<Item = &RawImage> {
    images
        .iter()
        .filter(move |im| usize::from(im.label) < n_classes)
}

/// First `limit` images of the requested classes, prepared.
pub fn prepare_subset<T: Scalar>(
    images: &[RawImage],
    n_classes: usize,
    limit: usize,
) -> Result<Vec<PreparedSample<T>>> {
    filter_classes(images, n_classes)
        .take(limit)
        .map(|im| prepare(im, n_classes))
        .collect()
}

/// Train and test sample sets.
pub type TrainTest<T> = (Vec<PreparedSample<T>>, Vec<PreparedSample<T>>);

/// Loads the standard MNIST files from `dir` and returns `(train, test)`
/// subsets: the first `n_train` (train file) and `n_test` (t10k file) images
/// of classes `0..n_classes`, in file order.
pub fn load_mnist_split<T: Scalar>(
    dir: impl AsRef<Path>,
    n_classes: usize,
    n_train: usize,
    n_test: usize,
) -> Result<TrainTest<T>> {
    let dir = dir.as_ref();
    let train = load_idx(dir.join(TRAIN_IMAGES), dir.join(TRAIN_LABELS))?;
    let test = load_idx(dir.join(TEST_IMAGES), dir.join(TEST_LABELS))?;
    Ok((
        prepare_subset(&train, n_classes, n_train)?,
        prepare_subset(&test, n_classes, n_test)?,
    ))
}

/// Flat-Dirichlet draw: `n_outcomes` uniforms on `(0, 1]`, normalized.
pub fn random_target_distribution<T: Scalar>(n_outcomes: usize, seed: u64) -> Result<Vec<T>> {
    if n_outcomes < 2 {
        return Err(config(format!("need at least 2 outcomes, got {n_outcomes}")));
    }
    let mut rng = stream_rng(seed, 0);
    let raw: Vec<f64> = (0..n_outcomes).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|&x| T::lit(x / total)).collect())
}

const CACHE_MAGIC: &[u8; 4] = b"VQLB";
const CACHE_VERSION: u32 = 1;
const CACHE_HEADER: usize = 16;
const CACHE_RECORD: usize = 64 * 8 + 1;

/// Binary cache of prepared 64-amplitude samples: `"VQLB"`, version `u32`,
/// count `u64`, then per record 64 little-endian `f64` and one label byte.
pub fn encode_prepared_cache(samples: &[PreparedSample<f64>]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(CACHE_HEADER + samples.len() * CACHE_RECORD);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    for (i, s) in samples.iter().enumerate() {
        if s.amplitudes.len() != 64 || s.label > usize::from(u8::MAX) {
            return Err(config(format!("sample {i} cannot be cached")));
        }
        for a in &s.amplitudes {
            out.extend_from_slice(&a.to_le_bytes());
        }
        out.push(s.label as u8);
    }
    Ok(out)
}

pub fn decode_prepared_cache(bytes: &[u8]) -> Result<Vec<PreparedSample<f64>>> {
    if bytes.len() < CACHE_HEADER {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: "truncated cache header".into(),
        });
    }
    if &bytes[..4] != CACHE_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: "bad cache magic".into(),
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != CACHE_VERSION {
        return Err(Error::Format {
            offset: 4,
            message: format!("unsupported cache version {version}"),
        });
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = &bytes[CACHE_HEADER..];
    if body.len() != count * CACHE_RECORD {
        return Err(Error::Format {
            offset: (CACHE_HEADER + body.len().min(count * CACHE_RECORD)) as u64,
            message: format!(
                "cache body is {} bytes, {count} records need {}",
                body.len(),
                count * CACHE_RECORD
            ),
        });
    }
    Ok(body
        .chunks(CACHE_RECORD)
        .map(|rec| PreparedSample {
            amplitudes: rec[..64 * 8]
                .chunks(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                .collect(),
            label: usize::from(rec[64 * 8]),
        })
        .collect())
}

pub fn write_prepared_cache(path: impl AsRef<Path>, samples: &[PreparedSample<f64>]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_prepared_cache(samples)?)?;
    Ok(())
}

pub fn read_prepared_cache(path: impl AsRef<Path>) -> Result<Vec<PreparedSample<f64>>> {
    decode_prepared_cache(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image_with(f: impl Fn(usize, usize) -> u8, label: u8) -> RawImage {
        let pixels = (0..PIXELS).map(|i| f(i / SIDE, i % SIDE)).collect();
        RawImage::new(pixels, label).unwrap()
    }

    #[test]
    fn downsample_examples() {
        assert!(downsample(&image_with(|_, _| 0, 0)).iter().all(|&v| v == 0.0));
        assert!(downsample(&image_with(|_, _| 77, 0)).iter().all(|&v| v == 77.0));
        let spot = image_with(|r, c| if (r, c) == (4, 4) { 255 } else { 0 }, 0);
        let d = downsample(&spot);
        assert_eq!(d[0], 255.0 / 9.0);
        assert!(d[1..].iter().all(|&v| v == 0.0));
        // border pixels are cropped away
        let border = image_with(|r, c| if r < 2 || c >= 26 { 255 } else { 0 }, 0);
        assert!(downsample(&border).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn prepare_examples() {
        let blank = prepare::<f64>(&image_with(|_, _| 0, 3), 4).unwrap();
        assert!(blank.amplitudes.iter().all(|&a| (a - 0.125).abs() < 1e-12));
        assert_eq!(blank.label, 3);

        let block = image_with(|r, c| if (2..5).contains(&r) && (2..5).contains(&c) { 255 } else { 0 }, 1);
        let s = prepare::<f64>(&block, 2).unwrap();
        assert!(s.amplitudes[0] > 1.0 - 1e-12);
        let norm: f64 = s.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-10);

        assert!(prepare::<f64>(&block, 1).is_err());
    }

    #[test]
    fn class_filter_keeps_requested_labels() {
        let images: Vec<_> = (0..30).map(|i| image_with(|_, _| 0, (i % 10) as u8)).collect();
        let kept: Vec<u8> = filter_classes(&images, 4).map(|im| im.label).collect();
        assert_eq!(kept.len(), 12);
        let mut distinct = kept.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct, vec![0, 1, 2, 3]);
    }

    #[test]
    fn idx_errors() {
        let images: Vec<_> = (0..3).map(|i| image_with(|r, c| (r * 3 + c + i) as u8, i as u8)).collect();
        let (img, lbl) = encode_idx(&images);
        assert_eq!(parse_idx_images(&img).unwrap().len(), 3);
        assert_eq!(parse_idx_labels(&lbl).unwrap(), vec![0, 1, 2]);

        // labels magic on an image file
        let mut wrong = img.clone();
        wrong[..4].copy_from_slice(&LABEL_MAGIC.to_be_bytes());
        assert!(matches!(parse_idx_images(&wrong), Err(Error::Format { offset: 0, .. })));

        // cut into the third image
        let cut = &img[..16 + 2 * PIXELS + 100];
        match parse_idx_images(cut) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, (16 + 2 * PIXELS) as u64),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_idx_images(&img[..10]), Err(Error::Format { .. })));
        assert!(matches!(parse_idx_labels(&lbl[..9]), Err(Error::Format { .. })));
    }

    #[test]
    fn target_distribution_examples() {
        let a = random_target_distribution::<f64>(64, 5).unwrap();
        let b = random_target_distribution::<f64>(64, 5).unwrap();
        assert_eq!(a, b);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(a.iter().all(|&x| x > 0.0));
        assert_ne!(a, random_target_distribution::<f64>(64, 6).unwrap());
        assert!(random_target_distribution::<f64>(1, 0).is_err());
    }

    #[test]
    fn cache_round_trip_and_errors() {
        let samples = vec![
            prepare::<f64>(&image_with(|r, c| (r + c) as u8, 1), 2).unwrap(),
            prepare::<f64>(&image_with(|r, _| r as u8, 0), 2).unwrap(),
        ];
        let bytes = encode_prepared_cache(&samples).unwrap();
        assert_eq!(&bytes[..4], b"VQLB");
        assert_eq!(bytes.len(), 16 + 2 * (64 * 8 + 1));
        assert_eq!(decode_prepared_cache(&bytes).unwrap(), samples);
        assert!(decode_prepared_cache(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_prepared_cache(&bad).is_err());
    }
}
