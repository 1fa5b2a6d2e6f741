//! File emitters: CSV tables, 16-bit PGM/PNG images and JSON documents.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use superres_core::{CorrelationCurve, CorrelationImage};

use crate::error::CliError;

pub const CURVE_HEADER: &str = "scan_x_lambda,value";
pub const IMAGE_HEADER: &str = "x_lambda,y_lambda,value";

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Rows of already formatted cells under `header`.
pub fn table_csv(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn curve_csv(curve: &CorrelationCurve) -> String {
    let mut out = String::with_capacity(48 * (curve.len() + 1));
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for (x, v) in curve.scan_x.iter().zip(&curve.values) {
        let _ = writeln!(out, "{x:?},{v:?}");
    }
    out
}

/// One row per pixel, `y` outer and ascending.
pub fn image_csv(image: &CorrelationImage) -> String {
    let mut out = String::with_capacity(48 * (image.xs.len() * image.ys.len() + 1));
    out.push_str(IMAGE_HEADER);
    out.push('\n');
    for (y, row) in image.ys.iter().zip(&image.values) {
        for (x, v) in image.xs.iter().zip(row) {
            let _ = writeln!(out, "{x:?},{y:?},{v:?}");
        }
    }
    out
}

/// Max-normalized 16-bit samples, top row first (largest `y`).
pub fn image_levels(image: &CorrelationImage) -> Vec<u16> {
    let max = image.max();
    let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
    image
        .values
        .iter()
        .rev()
        .flat_map(|row| {
            row.iter()
                .map(move |v| (v * scale).round().clamp(0.0, 65535.0) as u16)
        })
        .collect()
}

/// Binary PGM (P5), 16-bit big-endian.
pub fn pgm_bytes(image: &CorrelationImage) -> Vec<u8> {
    let (w, h) = (image.xs.len(), image.ys.len());
    let mut out = format!("P5\n{w} {h}\n65535\n").into_bytes();
    out.reserve(2 * w * h);
    for level in image_levels(image) {
        out.extend_from_slice(&level.to_be_bytes());
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    write_bytes(path, text.as_bytes())
}

pub fn write_pgm(path: &Path, image: &CorrelationImage) -> Result<(), CliError> {
    write_bytes(path, &pgm_bytes(image))
}

pub fn write_png(path: &Path, image: &CorrelationImage) -> Result<(), CliError> {
    let (w, h) = (image.xs.len() as u32, image.ys.len() as u32);
    let buf: image::ImageBuffer<image::Luma<u16>, Vec<u16>> =
        image::ImageBuffer::from_raw(w, h, image_levels(image)).ok_or_else(|| CliError::Image {
            path: path.to_path_buf(),
            reason: "pixel buffer does not match image size".into(),
        })?;
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => CliError::io(path, io),
            other => CliError::Image {
                path: path.to_path_buf(),
                reason: other.to_string(),
            },
        })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Image {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use superres_core::imaging::ScanSetup;
    use superres_core::SetupConfig;

    fn tiny_image() -> CorrelationImage {
        CorrelationImage {
            xs: vec![-1.0, 0.0, 1.0],
            ys: vec![-2.0, 2.0],
            values: vec![vec![0.0, 1.0, 2.0], vec![4.0, 3.0, 0.5]],
            order: 1,
            normalized: false,
            peak: 4.0,
            config: SetupConfig::default(),
            setup: ScanSetup::preset(1, 0.1),
            quadrature: vec![],
        }
    }

    #[test]
    fn pgm_layout() {
        let bytes = pgm_bytes(&tiny_image());
        let header = b"P5\n3 2\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        let px: Vec<u16> = bytes[header.len()..]
            .chunks(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        // Top row is y = 2.
        assert_eq!(px, vec![65535, 49151, 8192, 0, 16384, 32768]);
    }

    #[test]
    fn csv_headers() {
        let img = tiny_image();
        let text = image_csv(&img);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(IMAGE_HEADER));
        assert_eq!(lines.next(), Some("-1.0,-2.0,0.0"));
        assert_eq!(text.lines().count(), 7);
        let t = table_csv("a,b", &[vec!["1".into(), "2".into()]]);
        assert_eq!(t, "a,b\n1,2\n");
    }
}
