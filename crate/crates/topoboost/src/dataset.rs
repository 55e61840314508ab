//! Dataset ingestion: `root/<class_name>/*.{png,bmp}` with labels assigned
//! by sorted class-directory name. Every file must decode or the manifest
//! build fails naming the offender.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::image_topo::Image;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("no class directories under {0}")]
    NoClasses(PathBuf),
    #[error("unreadable image {path}: {reason}")]
    UnreadableImage { path: PathBuf, reason: String },
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One decoded sample with its label.
#[derive(Clone, Debug)]
pub struct Sample {
    pub path: PathBuf,
    pub label: usize,
    pub image: Image,
}

/// Deterministic manifest of a class-per-directory dataset.
#[derive(Clone, Debug)]
pub struct DatasetManifest {
    pub classes: Vec<String>,
    pub samples: Vec<Sample>,
}

impl DatasetManifest {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.label).collect()
    }
}

fn is_supported(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()),
        Some(ref e) if e == "png" || e == "bmp"
    )
}

/// Decode one PNG/BMP file into a normalized [0, 1] image.
pub fn load_image(path: &Path) -> Result<Image, DatasetError> {
    let decoded = image::open(path).map_err(|e| DatasetError::UnreadableImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let img = match decoded {
        image::DynamicImage::ImageLuma8(g) => {
            let (w, h) = (g.width() as usize, g.height() as usize);
            let data = g.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
            Image::new(h, w, 1, data)
        }
        other => {
            let rgb = other.into_rgb8();
            let (w, h) = (rgb.width() as usize, rgb.height() as usize);
            let data = rgb.into_raw().into_iter().map(|v| v as f64 / 255.0).collect();
            Image::new(h, w, 3, data)
        }
    };
    img.map_err(|e| DatasetError::UnreadableImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Build the manifest, decoding every image up front.
pub fn ingest_dataset(root: &Path) -> Result<DatasetManifest, DatasetError> {
    let read = |p: &Path| {
        fs::read_dir(p).map_err(|e| DatasetError::Io { path: p.to_path_buf(), source: e })
    };
    let mut class_dirs: Vec<PathBuf> = Vec::new();
    for entry in read(root)? {
        let entry = entry.map_err(|e| DatasetError::Io { path: root.to_path_buf(), source: e })?;
        if entry.path().is_dir() {
            class_dirs.push(entry.path());
        }
    }
    class_dirs.sort();
    if class_dirs.is_empty() {
        return Err(DatasetError::NoClasses(root.to_path_buf()));
    }

    let mut classes = Vec::new();
    let mut samples = Vec::new();
    for (label, dir) in class_dirs.iter().enumerate() {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut files: Vec<PathBuf> = Vec::new();
        for entry in read(dir)? {
            let entry = entry.map_err(|e| DatasetError::Io { path: dir.clone(), source: e })?;
            let path = entry.path();
            if path.is_file() && is_supported(&path) {
                files.push(path);
            }
        }
        files.sort();
        for path in files {
            let image = load_image(&path)?;
            samples.push(Sample { path, label, image });
        }
        classes.push(name);
    }
    Ok(DatasetManifest { classes, samples })
}

/// Write a grayscale-or-color [0, 1] image as an 8-bit PNG.
pub fn save_image_png(img: &Image, path: &Path) -> Result<(), DatasetError> {
    let quantize = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    let (w, h) = (img.width as u32, img.height as u32);
    let result = match img.channels {
        1 => {
            let buf: Vec<u8> = img.data.iter().map(|&v| quantize(v)).collect();
            image::GrayImage::from_raw(w, h, buf)
                .expect("buffer size matches")
                .save(path)
        }
        _ => {
            let buf: Vec<u8> = img.data.iter().map(|&v| quantize(v)).collect();
            image::RgbImage::from_raw(w, h, buf)
                .expect("buffer size matches")
                .save(path)
        }
    };
    result.map_err(|e| DatasetError::UnreadableImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
