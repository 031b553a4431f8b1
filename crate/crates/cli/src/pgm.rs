//! Binary 8-bit PGM (P5) input and output.

use std::io::Cursor;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat};
use subregion::features::GrayImage;

use crate::error::{CliError, CliResult};

pub fn decode_pgm(bytes: &[u8]) -> CliResult<GrayImage> {
    if !bytes.starts_with(b"P5") {
        return Err(CliError::Data("not a binary PGM (P5) file".into()));
    }
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Pnm)
        .map_err(|e| CliError::Data(format!("cannot decode PGM: {e}")))?;
    let luma = img
        .as_luma8()
        .ok_or_else(|| CliError::Data("PGM is not 8-bit grayscale".into()))?;
    Ok(GrayImage::new(luma.width() as usize, luma.height() as usize, luma.as_raw().clone())?)
}

pub fn read_pgm(path: &Path) -> CliResult<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_pgm(&bytes).map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn encode_pgm(img: &GrayImage) -> CliResult<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(img.pixels(), img.width as u32, img.height as u32, ExtendedColorType::L8)
        .map_err(|e| CliError::Data(format!("cannot encode PGM: {e}")))?;
    Ok(out.into_inner())
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> CliResult<()> {
    std::fs::write(path, encode_pgm(img)?).map_err(|e| CliError::io(path, e))
}
