//! Raw little-endian payload (`<name>.raw`) plus JSON sidecar (`<name>.json`).

use std::fs;
use std::path::{Path, PathBuf};

use super::{
    DType, DisplacementField, FeatureVolume, LabelVolume, ScalarVolume, VolumeHeader,
};
use crate::error::{Error, Result};

/// Resolves `(sidecar, payload)` paths for a volume.
///
/// `path` may name the `.raw` file, the `.json` file, or the bare stem.
pub fn sidecar_paths(path: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let path = path.as_ref();
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("raw") | Some("json") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let mut json = stem.clone().into_os_string();
    json.push(".json");
    let mut raw = stem.into_os_string();
    raw.push(".raw");
    (json.into(), raw.into())
}

pub fn read_header(path: impl AsRef<Path>) -> Result<VolumeHeader> {
    let (json, _) = sidecar_paths(path);
    let text = match fs::read_to_string(&json) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingSidecar(json))
        }
        Err(e) => return Err(Error::io(json, e)),
    };
    let header: VolumeHeader = serde_json::from_str(&text).map_err(|e| Error::BadSidecar {
        path: json.clone(),
        reason: e.to_string(),
    })?;
    header.validate().map_err(|e| Error::BadSidecar {
        path: json,
        reason: e.to_string(),
    })?;
    Ok(header)
}

fn read_payload(path: &Path, header: &VolumeHeader) -> Result<Vec<u8>> {
    let (_, raw) = sidecar_paths(path);
    let bytes = fs::read(&raw).map_err(|e| Error::io(&raw, e))?;
    let size = header.dtype.size();
    let expected = header.element_count();
    if bytes.len() != expected * size {
        return Err(Error::LengthMismatch {
            expected,
            actual: bytes.len() / size,
        });
    }
    Ok(bytes)
}

fn decode_real(bytes: &[u8], dtype: DType) -> Result<Vec<f32>> {
    let out: Vec<f32> = match dtype {
        DType::Float32 => bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect(),
        DType::Uint8 => bytes.iter().map(|&b| b as f32).collect(),
        DType::Uint16 => bytes
            .chunks_exact(2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]) as f32)
            .collect(),
        DType::Int32 => bytes
            .chunks_exact(4)
            .map(|b| i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f32)
            .collect(),
    };
    if let Some(index) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(out)
}

fn decode_labels(bytes: &[u8], dtype: DType) -> Result<Vec<u32>> {
    match dtype {
        DType::Float32 => Err(Error::WrongKind {
            expected: "integer label dtype",
            found: dtype.name().into(),
        }),
        DType::Uint8 => Ok(bytes.iter().map(|&b| b as u32).collect()),
        DType::Uint16 => Ok(bytes
            .chunks_exact(2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]) as u32)
            .collect()),
        DType::Int32 => bytes
            .chunks_exact(4)
            .map(|b| {
                let v = i32::from_le_bytes([b[0], b[1], b[2], b[3]]);
                u32::try_from(v)
                    .map_err(|_| Error::InvalidParameter(format!("negative label {v} in payload")))
            })
            .collect(),
    }
}

/// A volume loaded without knowing its kind in advance.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyVolume {
    Scalar(ScalarVolume),
    Features(FeatureVolume),
    Labels(LabelVolume),
}

impl AnyVolume {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyVolume::Scalar(_) => "scalar",
            AnyVolume::Features(_) => "features",
            AnyVolume::Labels(_) => "labels",
        }
    }
}

/// Loads a volume, classifying it by its sidecar.
///
/// Multi-channel files load as features, single-channel integer files as
/// labels and single-channel float files as scalars. Use the typed loaders
/// when the intended kind is known (e.g. a uint16 MR image).
pub fn load_volume(path: impl AsRef<Path>) -> Result<AnyVolume> {
    let path = path.as_ref();
    let header = read_header(path)?;
    if header.channels > 1 {
        load_features(path).map(AnyVolume::Features)
    } else if header.dtype.is_integer() {
        load_labels(path).map(AnyVolume::Labels)
    } else {
        load_scalar(path).map(AnyVolume::Scalar)
    }
}

/// Loads any single-channel file as real intensities.
pub fn load_scalar(path: impl AsRef<Path>) -> Result<ScalarVolume> {
    let path = path.as_ref();
    let header = read_header(path)?;
    if header.channels != 1 {
        return Err(Error::WrongKind {
            expected: "single-channel volume",
            found: format!("{} channels", header.channels),
        });
    }
    let data = decode_real(&read_payload(path, &header)?, header.dtype)?;
    ScalarVolume::new(header.dims, header.spacing, data)
}

pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureVolume> {
    let path = path.as_ref();
    let header = read_header(path)?;
    let data = decode_real(&read_payload(path, &header)?, header.dtype)?;
    FeatureVolume::new(header.dims, header.spacing, header.channels, data)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelVolume> {
    let path = path.as_ref();
    let header = read_header(path)?;
    if header.channels != 1 {
        return Err(Error::WrongKind {
            expected: "single-channel label volume",
            found: format!("{} channels", header.channels),
        });
    }
    let data = decode_labels(&read_payload(path, &header)?, header.dtype)?;
    LabelVolume::with_dtype(header.dims, header.spacing, header.dtype, data)
}

pub fn load_field(path: impl AsRef<Path>) -> Result<DisplacementField> {
    let path = path.as_ref();
    let header = read_header(path)?;
    if header.channels != 3 || header.dtype != DType::Float32 {
        return Err(Error::WrongKind {
            expected: "3-channel float32 displacement field",
            found: format!("{} channels of {}", header.channels, header.dtype.name()),
        });
    }
    let data = decode_real(&read_payload(path, &header)?, header.dtype)?;
    let vectors = data.chunks_exact(3).map(|v| [v[0], v[1], v[2]]).collect();
    DisplacementField::new(header.dims, header.spacing, vectors)
}

/// Anything that can be written in the raw+JSON format.
pub trait RawVolume {
    fn raw_header(&self) -> VolumeHeader;
    fn payload(&self) -> Vec<u8>;
}

fn f32_bytes<'a>(values: impl Iterator<Item = &'a f32>) -> Vec<u8> {
    values.flat_map(|v| v.to_le_bytes()).collect()
}

impl RawVolume for ScalarVolume {
    fn raw_header(&self) -> VolumeHeader {
        *self.header()
    }

    fn payload(&self) -> Vec<u8> {
        f32_bytes(self.data().iter())
    }
}

impl RawVolume for FeatureVolume {
    fn raw_header(&self) -> VolumeHeader {
        *self.header()
    }

    fn payload(&self) -> Vec<u8> {
        f32_bytes(self.data().iter())
    }
}

impl RawVolume for LabelVolume {
    fn raw_header(&self) -> VolumeHeader {
        *self.header()
    }

    fn payload(&self) -> Vec<u8> {
        let data = self.data();
        match self.header().dtype {
            DType::Uint8 => data.iter().map(|&l| l as u8).collect(),
            DType::Uint16 => data.iter().flat_map(|&l| (l as u16).to_le_bytes()).collect(),
            // float labels are rejected at construction
            _ => data.iter().flat_map(|&l| (l as i32).to_le_bytes()).collect(),
        }
    }
}

impl RawVolume for DisplacementField {
    fn raw_header(&self) -> VolumeHeader {
        self.header()
    }

    fn payload(&self) -> Vec<u8> {
        f32_bytes(self.data().iter().flatten())
    }
}

impl RawVolume for AnyVolume {
    fn raw_header(&self) -> VolumeHeader {
        match self {
            AnyVolume::Scalar(v) => v.raw_header(),
            AnyVolume::Features(v) => v.raw_header(),
            AnyVolume::Labels(v) => v.raw_header(),
        }
    }

    fn payload(&self) -> Vec<u8> {
        match self {
            AnyVolume::Scalar(v) => v.payload(),
            AnyVolume::Features(v) => v.payload(),
            AnyVolume::Labels(v) => v.payload(),
        }
    }
}

/// Writes `<name>.raw` and `<name>.json`.
pub fn save_volume<V: RawVolume + ?Sized>(vol: &V, path: impl AsRef<Path>) -> Result<()> {
    let (json, raw) = sidecar_paths(path);
    let header = vol.raw_header();
    fs::write(&raw, vol.payload()).map_err(|e| Error::io(&raw, e))?;
    let text = serde_json::to_string_pretty(&header).expect("header serializes");
    fs::write(&json, text).map_err(|e| Error::io(&json, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::Dims;

    fn write_raw(dir: &Path, name: &str, sidecar: &str, payload: &[u8]) -> PathBuf {
        let stem = dir.join(name);
        let (json, raw) = sidecar_paths(&stem);
        fs::write(json, sidecar).unwrap();
        fs::write(raw, payload).unwrap();
        stem
    }

    #[test]
    fn sidecar_paths_accept_any_spelling() {
        let expect = (PathBuf::from("a/vol.json"), PathBuf::from("a/vol.raw"));
        assert_eq!(sidecar_paths("a/vol"), expect);
        assert_eq!(sidecar_paths("a/vol.raw"), expect);
        assert_eq!(sidecar_paths("a/vol.json"), expect);
        assert_eq!(
            sidecar_paths("case.01").1,
            PathBuf::from("case.01.raw")
        );
    }

    #[test]
    fn zero_payload_loads_as_scalar() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_raw(
            dir.path(),
            "z",
            r#"{"dims":[2,2,2],"spacing":[1,1,1],"channels":1,"dtype":"float32"}"#,
            &[0u8; 32],
        );
        match load_volume(&p).unwrap() {
            AnyVolume::Scalar(v) => {
                assert_eq!(v.dims(), Dims::cube(2));
                assert!(v.data().iter().all(|&x| x == 0.0));
            }
            other => panic!("loaded as {}", other.kind()),
        }
    }

    #[test]
    fn short_payload_is_length_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_raw(
            dir.path(),
            "s",
            r#"{"dims":[4,4,4],"spacing":[1,1,1],"channels":1,"dtype":"float32"}"#,
            &[0u8; 63 * 4],
        );
        assert!(matches!(
            load_volume(&p),
            Err(Error::LengthMismatch {
                expected: 64,
                actual: 63
            })
        ));
    }

    #[test]
    fn sidecar_errors_are_distinct() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_volume(dir.path().join("nothing")),
            Err(Error::MissingSidecar(_))
        ));
        let p = write_raw(dir.path(), "g", "{\"dims\": [2,2", &[]);
        assert!(matches!(load_volume(&p), Err(Error::BadSidecar { .. })));
        let p = write_raw(
            dir.path(),
            "neg",
            r#"{"dims":[2,2,0],"spacing":[1,1,1],"channels":1,"dtype":"float32"}"#,
            &[],
        );
        assert!(matches!(load_volume(&p), Err(Error::BadSidecar { .. })));
    }

    #[test]
    fn nan_payload_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut payload: Vec<u8> = [1.0f32; 8].iter().flat_map(|v| v.to_le_bytes()).collect();
        payload[8..12].copy_from_slice(&f32::NAN.to_le_bytes());
        let p = write_raw(
            dir.path(),
            "n",
            r#"{"dims":[2,2,2],"spacing":[1,1,1],"channels":1,"dtype":"float32"}"#,
            &payload,
        );
        assert!(matches!(load_volume(&p), Err(Error::NonFinite { index: 2 })));
    }

    #[test]
    fn uint16_labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = Dims::cube(3);
        let labels: Vec<u32> = (0..27).map(|i| i % 3).collect();
        let v = LabelVolume::with_dtype(d, [0.5, 1.0, 2.0], DType::Uint16, labels).unwrap();
        let p = dir.path().join("labels");
        save_volume(&v, &p).unwrap();
        let back = load_labels(&p).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.label_set().into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(matches!(load_volume(&p).unwrap(), AnyVolume::Labels(_)));
    }

    #[test]
    fn negative_int32_label_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_raw(
            dir.path(),
            "l",
            r#"{"dims":[1,1,1],"spacing":[1,1,1],"channels":1,"dtype":"int32"}"#,
            &(-1i32).to_le_bytes(),
        );
        assert!(load_labels(&p).is_err());
    }

    #[test]
    fn field_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let f = DisplacementField::from_fn(Dims::new(2, 3, 1), |x, y, _| {
            [x as f32, -(y as f32), 0.25]
        })
        .unwrap();
        let p = dir.path().join("field.raw");
        save_volume(&f, &p).unwrap();
        assert_eq!(load_field(&p).unwrap(), f);
        assert!(matches!(load_volume(&p).unwrap(), AnyVolume::Features(_)));
    }

    #[test]
    fn save_into_missing_directory_fails() {
        let dir = tempfile::tempdir().unwrap();
        let v = ScalarVolume::filled(Dims::cube(2), 1.0).unwrap();
        let err = save_volume(&v, dir.path().join("no/such/dir/vol")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
