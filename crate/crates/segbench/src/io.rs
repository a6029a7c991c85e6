//! PNG images and masks, JSON files.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};
use serde::de::DeserializeOwned;
use serde::Serialize;
use segbench_core::{Annotation, BinaryMask, Raster};

use crate::error::{BenchError, Result};

/// Decodes an 8-bit gray or RGB PNG; alpha is dropped. 16-bit and
/// palette images are rejected.
pub fn decode_png(bytes: &[u8]) -> Result<Raster> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| BenchError::UnsupportedFormat(format!("not a PNG: {e}")))?;
    let (color, depth) = reader.output_color_type();
    if depth != BitDepth::Eight {
        return Err(BenchError::UnsupportedFormat(format!("{depth:?} bit depth, expected 8")));
    }
    let channels = match color {
        ColorType::Grayscale => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        ColorType::Indexed => return Err(BenchError::UnsupportedFormat("palette PNG".into())),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| BenchError::UnsupportedFormat("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| BenchError::UnsupportedFormat(format!("corrupt PNG: {e}")))?;
    let (w, h) = (info.width as usize, info.height as usize);
    let out_channels = if channels >= 3 { 3 } else { 1 };
    let mut data = Vec::with_capacity(w * h * out_channels);
    for y in 0..h {
        let row = &buf[y * info.line_size..y * info.line_size + w * channels];
        match channels {
            1 | 3 => data.extend_from_slice(row),
            2 => data.extend(row.chunks_exact(2).map(|p| p[0])),
            _ => row.chunks_exact(4).for_each(|p| data.extend_from_slice(&p[..3])),
        }
    }
    Ok(Raster::new(w, h, out_channels, data)?)
}

pub fn encode_png(img: &Raster) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(if img.channels() == 1 { ColorType::Grayscale } else { ColorType::Rgb });
        enc.set_depth(BitDepth::Eight);
        let mut writer = enc.write_header().expect("in-memory write");
        writer.write_image_data(img.data()).expect("in-memory write");
    }
    out
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| BenchError::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| BenchError::io(path, e))
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Raster> {
    decode_png(&read_bytes(path.as_ref())?)
}

pub fn save_image(img: &Raster, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_png(img))
}

/// Gray pixel `>= 128` is foreground. Color masks are rejected.
pub fn mask_from_raster(img: &Raster) -> Result<BinaryMask> {
    if img.channels() != 1 {
        return Err(BenchError::UnsupportedFormat("mask PNG must be grayscale".into()));
    }
    let labels = img.data().iter().map(|&v| v >= 128).collect();
    Ok(BinaryMask::from_labels(img.width(), img.height(), labels)?)
}

/// Foreground 255, background 0.
pub fn mask_to_raster(mask: &BinaryMask) -> Raster {
    let data = mask.labels().iter().map(|&v| if v { 255 } else { 0 }).collect();
    Raster::gray(mask.width(), mask.height(), data).expect("mask dimensions")
}

pub fn decode_mask_png(bytes: &[u8]) -> Result<BinaryMask> {
    mask_from_raster(&decode_png(bytes)?)
}

pub fn encode_mask_png(mask: &BinaryMask) -> Vec<u8> {
    encode_png(&mask_to_raster(mask))
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    decode_mask_png(&read_bytes(path.as_ref())?)
}

pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_mask_png(mask))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    serde_json::from_slice(&read_bytes(path)?).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    write_bytes(path.as_ref(), &bytes)
}

pub fn load_annotation(path: impl AsRef<Path>) -> Result<Annotation> {
    read_json(path)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    write_bytes(path, bytes)
}
