//! 8-bit grayscale frame files: binary PGM (P5) and grayscale PNG.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use bagtrack_core::Frame;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{Error, Result};

/// Decodes an 8-bit grayscale PGM or PNG into a frame with values `v/255`.
pub fn read_frame(path: &Path) -> Result<Frame> {
    let reader = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let img = reader
        .decode()
        .map_err(|e| Error::format(path, e.to_string()))?;
    let gray = match img {
        DynamicImage::ImageLuma8(g) => g,
        other => {
            return Err(Error::format(
                path,
                format!("expected 8-bit grayscale, got {:?}", other.color()),
            ))
        }
    };
    let (w, h) = gray.dimensions();
    Ok(frame_from_u8(w as usize, h as usize, gray.as_raw())?)
}

/// Frame from raw 8-bit samples.
pub fn frame_from_u8(width: usize, height: usize, samples: &[u8]) -> bagtrack_core::Result<Frame> {
    Frame::new(
        width,
        height,
        samples.iter().map(|&v| f64::from(v) / 255.0).collect(),
    )
}

/// Quantises to 8 bits, rounding to nearest.
pub fn frame_to_u8(frame: &Frame) -> Vec<u8> {
    frame
        .pixels()
        .iter()
        .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Writes a binary PGM (P5, maxval 255).
pub fn write_pgm(path: &Path, frame: &Frame) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let encoder = PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary));
    encoder
        .write_image(
            &frame_to_u8(frame),
            frame.width() as u32,
            frame.height() as u32,
            ExtendedColorType::L8,
        )
        .map_err(|e| Error::format(path, e.to_string()))
}
