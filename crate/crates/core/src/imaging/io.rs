//! Binary PPM (P6, maxval 255), 8-bit PNG, and mask files (8-bit grayscale
//! PNG with 255 = observed, or run-length text).

use std::fs;
use std::path::Path;

use super::{ColorImage, ObservationMask};
use crate::error::{QslrError, Result};

const RLE_MAGIC: &str = "QSLR-MASK-RLE 1";

/// `floor(v * 255 + 0.5)` after clamping to `[0, 1]`.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

fn from_rgb_bytes(rows: usize, cols: usize, bytes: &[u8], stride: usize) -> ColorImage {
    ColorImage::from_fn(rows, cols, |i, j| {
        let k = (i * cols + j) * stride;
        if stride < 3 {
            let v = bytes[k] as f64 / 255.0;
            [v, v, v]
        } else {
            [
                bytes[k] as f64 / 255.0,
                bytes[k + 1] as f64 / 255.0,
                bytes[k + 2] as f64 / 255.0,
            ]
        }
    })
}

fn to_rgb_bytes(img: &ColorImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(3 * img.r.len());
    for k in 0..img.r.len() {
        out.push(quantize(img.r[k]));
        out.push(quantize(img.g[k]));
        out.push(quantize(img.b[k]));
    }
    out
}

pub fn encode_ppm(img: &ColorImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(to_rgb_bytes(img));
    out
}

/// Header tokens may be separated by any whitespace and `#` comments.
pub fn decode_ppm(bytes: &[u8]) -> std::result::Result<ColorImage, String> {
    let mut pos = 0;
    let mut tokens = Vec::new();
    while tokens.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err("truncated PPM header".into());
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if tokens[0] != "P6" {
        return Err(format!("not a binary PPM (magic {:?})", tokens[0]));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| format!("bad PPM header field {s:?}"));
    let cols = num(&tokens[1])?;
    let rows = num(&tokens[2])?;
    let maxval = num(&tokens[3])?;
    if maxval != 255 {
        return Err(format!("only maxval 255 is supported, got {maxval}"));
    }
    // exactly one whitespace byte ends the header
    pos += 1;
    let need = rows * cols * 3;
    if bytes.len() < pos + need {
        return Err(format!("PPM pixel data truncated: need {need} bytes"));
    }
    Ok(from_rgb_bytes(rows, cols, &bytes[pos..pos + need], 3))
}

fn decode_png(bytes: &[u8]) -> std::result::Result<ColorImage, String> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let size = reader.output_buffer_size().ok_or("PNG too large")?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(format!("only 8-bit PNG is supported, got {:?}", info.bit_depth));
    }
    let stride = match info.color_type {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        other => return Err(format!("unsupported PNG color type {other:?}")),
    };
    let (rows, cols) = (info.height as usize, info.width as usize);
    let rowbytes = info.line_size;
    let mut packed = Vec::with_capacity(rows * cols * stride);
    for i in 0..rows {
        packed.extend_from_slice(&buf[i * rowbytes..i * rowbytes + cols * stride]);
    }
    Ok(from_rgb_bytes(rows, cols, &packed, stride))
}

fn encode_png(rows: usize, cols: usize, data: &[u8], color: png::ColorType) -> std::result::Result<Vec<u8>, String> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, cols as u32, rows as u32);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(|e| e.to_string())?;
        w.write_image_data(data).map_err(|e| e.to_string())?;
    }
    Ok(out)
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default()
}

/// Load a `.ppm` or `.png` file; values are scaled to `[0, 1]`.
pub fn load_image(path: &Path) -> Result<ColorImage> {
    let bytes = fs::read(path).map_err(|e| QslrError::io(path, e))?;
    let res = if bytes.starts_with(b"P6") {
        decode_ppm(&bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(&bytes)
    } else {
        Err("unsupported image format".to_string())
    };
    res.map_err(|m| QslrError::io(path, m))
}

/// Save by extension (`.ppm` or `.png`), quantizing to 8 bits.
pub fn save_image(path: &Path, img: &ColorImage) -> Result<()> {
    let bytes = match extension(path).as_str() {
        "ppm" => encode_ppm(img),
        "png" => encode_png(img.rows(), img.cols(), &to_rgb_bytes(img), png::ColorType::Rgb)
            .map_err(|m| QslrError::io(path, m))?,
        other => return Err(QslrError::io(path, format!("unsupported image extension {other:?}"))),
    };
    fs::write(path, bytes).map_err(|e| QslrError::io(path, e))
}

/// Run-length text: a magic line, `rows cols`, then alternating run lengths
/// starting with unobserved pixels in row-major order.
pub fn mask_to_rle(m: &ObservationMask) -> String {
    let (rows, cols) = m.dims();
    let mut runs = Vec::new();
    let mut cur = false;
    let mut len = 0usize;
    for &o in m.observed() {
        if o == cur {
            len += 1;
        } else {
            runs.push(len);
            cur = o;
            len = 1;
        }
    }
    runs.push(len);
    let body: Vec<String> = runs.iter().map(|r| r.to_string()).collect();
    format!("{RLE_MAGIC}\n{rows} {cols}\n{}\n", body.join(" "))
}

pub fn mask_from_rle(text: &str) -> std::result::Result<ObservationMask, String> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(RLE_MAGIC) {
        return Err("not a mask RLE file".into());
    }
    let dims: Vec<usize> = lines
        .next()
        .ok_or("missing dimensions")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("bad dimension {t:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if dims.len() != 2 {
        return Err("dimension line needs two numbers".into());
    }
    let mut observed = Vec::with_capacity(dims[0] * dims[1]);
    let mut cur = false;
    for tok in lines.flat_map(str::split_whitespace) {
        let n: usize = tok.parse().map_err(|_| format!("bad run length {tok:?}"))?;
        observed.extend(std::iter::repeat(cur).take(n));
        cur = !cur;
    }
    ObservationMask::new(dims[0], dims[1], observed).map_err(|e| e.to_string())
}

/// `.png` gives 8-bit grayscale (255 = observed), anything else RLE text.
pub fn save_mask(path: &Path, m: &ObservationMask) -> Result<()> {
    let bytes = if extension(path) == "png" {
        let data: Vec<u8> = m.observed().iter().map(|&o| if o { 255 } else { 0 }).collect();
        encode_png(m.dims().0, m.dims().1, &data, png::ColorType::Grayscale).map_err(|e| QslrError::io(path, e))?
    } else {
        mask_to_rle(m).into_bytes()
    };
    fs::write(path, bytes).map_err(|e| QslrError::io(path, e))
}

/// A pixel counts as observed when its gray level is at least 128.
pub fn load_mask(path: &Path) -> Result<ObservationMask> {
    let bytes = fs::read(path).map_err(|e| QslrError::io(path, e))?;
    let res = if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(&bytes).and_then(|img| {
            let obs = img.r.iter().map(|&v| v >= 0.5).collect();
            ObservationMask::new(img.rows(), img.cols(), obs).map_err(|e| e.to_string())
        })
    } else {
        std::str::from_utf8(&bytes)
            .map_err(|_| "mask file is neither PNG nor text".to_string())
            .and_then(mask_from_rle)
    };
    res.map_err(|m| QslrError::io(path, m))
}
