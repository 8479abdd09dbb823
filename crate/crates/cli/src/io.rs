//! Portable tensor files and image-stack ingestion.
//!
//! A tensor file is a short textual header followed by the raw buffer:
//!
//! ```text
//! TNSR1
//! dtype f64
//! shape 3 4 5
//! layout col-major
//! end
//! <8 * 3*4*5 bytes of little-endian f64>
//! ```
//!
//! Round trips are byte-identical.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use tenrec_core::DenseTensor;
use thiserror::Error;

pub const MAGIC: &str = "TNSR1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic: expected {MAGIC}, found {0:?}")]
    BadMagic(String),
    #[error("unsupported dtype {0:?} (only f64)")]
    BadDtype(String),
    #[error("unsupported layout {0:?} (only col-major)")]
    BadLayout(String),
    #[error("malformed header line {0:?}")]
    MalformedHeader(String),
    #[error("header is missing the {0:?} record")]
    MissingRecord(&'static str),
    #[error("shape must be nonempty with positive extents, got {0:?}")]
    BadShape(Vec<usize>),
    #[error("payload has {got} bytes, shape {shape:?} requires {expected}")]
    TruncatedPayload {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },
    #[error("images have mismatched sizes: {0}x{1} vs {2}x{3}")]
    ImageSizeMismatch(u32, u32, u32, u32),
    #[error("no images supplied")]
    NoImages,
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
}

pub fn write_tensor(t: &DenseTensor, path: &Path) -> Result<(), IoError> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "dtype f64")?;
    let shape: Vec<String> = t.shape().iter().map(|e| e.to_string()).collect();
    writeln!(w, "shape {}", shape.join(" "))?;
    writeln!(w, "layout col-major")?;
    writeln!(w, "end")?;
    for v in t.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor, IoError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut offset = 0usize;
    let mut line = |bytes: &[u8]| -> Result<String, IoError> {
        let rest = &bytes[offset..];
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| IoError::MalformedHeader(String::from_utf8_lossy(rest).into_owned()))?;
        let s = String::from_utf8_lossy(&rest[..end]).into_owned();
        offset += end + 1;
        Ok(s)
    };
    let magic = line(&bytes)?;
    if magic != MAGIC {
        return Err(IoError::BadMagic(magic));
    }
    let mut dtype = None;
    let mut shape: Option<Vec<usize>> = None;
    let mut layout = None;
    loop {
        let l = line(&bytes)?;
        if l == "end" {
            break;
        }
        let (key, value) = l
            .split_once(' ')
            .ok_or_else(|| IoError::MalformedHeader(l.clone()))?;
        match key {
            "dtype" => dtype = Some(value.to_string()),
            "layout" => layout = Some(value.to_string()),
            "shape" => {
                let parsed: Result<Vec<usize>, _> =
                    value.split_whitespace().map(|s| s.parse::<usize>()).collect();
                shape = Some(parsed.map_err(|_| IoError::MalformedHeader(l.clone()))?);
            }
            _ => return Err(IoError::MalformedHeader(l)),
        }
    }
    let dtype = dtype.ok_or(IoError::MissingRecord("dtype"))?;
    if dtype != "f64" {
        return Err(IoError::BadDtype(dtype));
    }
    let layout = layout.ok_or(IoError::MissingRecord("layout"))?;
    if layout != "col-major" {
        return Err(IoError::BadLayout(layout));
    }
    let shape = shape.ok_or(IoError::MissingRecord("shape"))?;
    if shape.is_empty() || shape.iter().any(|&e| e == 0) {
        return Err(IoError::BadShape(shape));
    }
    let count: usize = shape.iter().product();
    let payload = &bytes[offset..];
    if payload.len() != count * 8 {
        return Err(IoError::TruncatedPayload {
            shape,
            expected: count * 8,
            got: payload.len(),
        });
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DenseTensor::new(shape, data).expect("validated above"))
}

/// How image pixels map into tensor modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StackLayout {
    /// `H x W x 3` per frame, frames stacked on a trailing mode.
    Rgb,
    /// `H x W` per frame, frames stacked on a trailing mode.
    Grayscale,
}

/// Loads equal-sized 8-bit raster images, scales to `[0, 1]` by dividing by
/// 255, and stacks them: one RGB image becomes `H x W x 3`, `F` of them
/// `H x W x 3 x F`; grayscale frames become `H x W` or `H x W x F`.
pub fn ingest_image_stack(
    paths: &[std::path::PathBuf],
    layout: StackLayout,
) -> Result<DenseTensor, IoError> {
    if paths.is_empty() {
        return Err(IoError::NoImages);
    }
    let mut dims: Option<(u32, u32)> = None;
    let frames = paths.len();
    let mut planes: Vec<Vec<f64>> = Vec::with_capacity(frames);
    for p in paths {
        let img = image::open(p)?;
        let (w, h) = match layout {
            StackLayout::Rgb => img.to_rgb8().dimensions(),
            StackLayout::Grayscale => img.to_luma8().dimensions(),
        };
        if let Some((w0, h0)) = dims {
            if (w0, h0) != (w, h) {
                return Err(IoError::ImageSizeMismatch(w0, h0, w, h));
            }
        } else {
            dims = Some((w, h));
        }
        let (hu, wu) = (h as usize, w as usize);
        match layout {
            StackLayout::Rgb => {
                let rgb = img.to_rgb8();
                let mut plane = vec![0.0f64; hu * wu * 3];
                for c in 0..3usize {
                    for j in 0..wu {
                        for i in 0..hu {
                            let px = rgb.get_pixel(j as u32, i as u32).0[c];
                            plane[i + j * hu + c * hu * wu] = px as f64 / 255.0;
                        }
                    }
                }
                planes.push(plane);
            }
            StackLayout::Grayscale => {
                let gray = img.to_luma8();
                let mut plane = vec![0.0f64; hu * wu];
                for j in 0..wu {
                    for i in 0..hu {
                        plane[i + j * hu] = gray.get_pixel(j as u32, i as u32).0[0] as f64 / 255.0;
                    }
                }
                planes.push(plane);
            }
        }
    }
    let (w, h) = dims.unwrap();
    let (h, w) = (h as usize, w as usize);
    let mut shape = match layout {
        StackLayout::Rgb => vec![h, w, 3],
        StackLayout::Grayscale => vec![h, w],
    };
    if frames > 1 {
        shape.push(frames);
    }
    let data: Vec<f64> = planes.into_iter().flatten().collect();
    Ok(DenseTensor::new(shape, data).expect("dimensions computed above"))
}
