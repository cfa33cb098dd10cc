//! RGBA8 images and boolean masks, with PNG and raw codecs.
//!
//! The raw format is a dependency-free escape hatch: a 16-byte header of
//! width and height as little-endian u64, followed by row-major RGBA8
//! samples. It is accepted anywhere PNG is.

use thiserror::Error;

const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1A, b'\n'];

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("malformed image data: {0}")]
    Malformed(String),
    #[error("png: {0}")]
    Png(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Un-premultiplied RGBA8, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl Image {
    /// Fully transparent canvas.
    pub fn new(width: u32, height: u32) -> Image {
        Image { width, height, data: vec![0; 4 * width as usize * height as usize] }
    }

    pub fn solid(width: u32, height: u32, rgba: [u8; 4]) -> Image {
        let mut data = Vec::with_capacity(4 * width as usize * height as usize);
        for _ in 0..(width as usize * height as usize) {
            data.extend_from_slice(&rgba);
        }
        Image { width, height, data }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 4]) -> Image {
        let mut img = Image::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.set(x, y, f(x, y));
            }
        }
        img
    }

    fn index(&self, x: u32, y: u32) -> usize {
        4 * (y as usize * self.width as usize + x as usize)
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 4] {
        let i = self.index(x, y);
        [self.data[i], self.data[i + 1], self.data[i + 2], self.data[i + 3]]
    }

    pub fn set(&mut self, x: u32, y: u32, rgba: [u8; 4]) {
        let i = self.index(x, y);
        self.data[i..i + 4].copy_from_slice(&rgba);
    }

    pub fn same_dims(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Sniffs PNG by magic; anything else must be the raw format.
    pub fn decode(bytes: &[u8]) -> Result<Image, ImageError> {
        if bytes.starts_with(&PNG_MAGIC) {
            let decoded =
                image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?.to_rgba8();
            let (width, height) = decoded.dimensions();
            return Ok(Image { width, height, data: decoded.into_raw() });
        }
        Image::decode_raw(bytes)
    }

    pub fn decode_raw(bytes: &[u8]) -> Result<Image, ImageError> {
        if bytes.len() < 16 {
            return Err(ImageError::Malformed("raw header shorter than 16 bytes".into()));
        }
        let width = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
        let height = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let expected = (width as usize)
            .checked_mul(height as usize)
            .and_then(|n| n.checked_mul(4))
            .ok_or_else(|| ImageError::Malformed("raw dimensions overflow".into()))?;
        if bytes.len() - 16 != expected {
            return Err(ImageError::Malformed(format!(
                "raw payload is {} bytes, {}x{} needs {}",
                bytes.len() - 16,
                width,
                height,
                expected
            )));
        }
        if width > u64::from(u32::MAX) || height > u64::from(u32::MAX) {
            return Err(ImageError::Malformed("raw dimensions exceed u32".into()));
        }
        Ok(Image { width: width as u32, height: height as u32, data: bytes[16..].to_vec() })
    }

    pub fn encode_raw(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.data.len());
        out.extend_from_slice(&u64::from(self.width).to_le_bytes());
        out.extend_from_slice(&u64::from(self.height).to_le_bytes());
        out.extend_from_slice(&self.data);
        out
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, ImageError> {
        use image::ImageEncoder;
        let mut out = Vec::new();
        image::codecs::png::PngEncoder::new(&mut out).write_image(
            &self.data,
            self.width,
            self.height,
            image::ExtendedColorType::Rgba8,
        )?;
        Ok(out)
    }

    pub fn load(path: &std::path::Path) -> Result<Image, ImageError> {
        Image::decode(&std::fs::read(path)?)
    }

    /// Extension picks the codec: `.raw` for the raw format, PNG otherwise.
    pub fn save(&self, path: &std::path::Path) -> Result<(), ImageError> {
        let bytes = if path.extension().is_some_and(|e| e == "raw") {
            self.encode_raw()
        } else {
            self.encode_png()?
        };
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

/// Boolean pixel grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: u32,
    pub height: u32,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn filled(width: u32, height: u32, value: bool) -> Mask {
        Mask { width, height, data: vec![value; width as usize * height as usize] }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Mask {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Mask { width, height, data }
    }

    /// Support of an image's first channel: true where it is non-zero.
    pub fn from_image(img: &Image) -> Mask {
        Mask::from_fn(img.width, img.height, |x, y| img.get(x, y)[0] != 0)
    }

    fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let i = self.index(x, y);
        self.data[i] = value;
    }

    pub fn count_true(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Inclusive bounding box of true pixels: (min_x, min_y, max_x, max_y).
    pub fn bounding_box(&self) -> Option<(u32, u32, u32, u32)> {
        let mut bbox: Option<(u32, u32, u32, u32)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    bbox = Some(match bbox {
                        None => (x, y, x, y),
                        Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                    });
                }
            }
        }
        bbox
    }

    pub fn invert(&self) -> Mask {
        Mask { width: self.width, height: self.height, data: self.data.iter().map(|b| !b).collect() }
    }

    pub fn union_with(&mut self, other: &Mask) {
        debug_assert!(self.width == other.width && self.height == other.height);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
    }
}
