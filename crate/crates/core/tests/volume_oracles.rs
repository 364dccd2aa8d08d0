mod common;

use common::*;
use discreg::volume::*;
use discreg::Error;

#[test]
fn scalar_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let v = random_scalar(Dims::cube(5), 3);
    save_volume(&v, dir.path().join("v.raw")).unwrap();
    let back = load_scalar(dir.path().join("v")).unwrap();
    assert_eq!(back, v);
    assert!(back.data().iter().zip(v.data()).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn twelve_channel_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = random_features(Dims::new(4, 3, 5), 12, 9);
    let path = dir.path().join("f.raw");
    save_volume(&f, &path).unwrap();
    let back = load_features(&path).unwrap();
    assert_eq!(back.header(), f.header());
    assert_eq!(back, f);
    match load_volume(&path).unwrap() {
        AnyVolume::Features(g) => assert_eq!(g, f),
        other => panic!("loaded as {}", other.kind()),
    }
}

#[test]
fn sidecar_contract_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let v = ScalarVolume::from_fn(Dims::new(2, 1, 1), |x, _, _| x as f32 + 0.5).unwrap();
    save_volume(&v, dir.path().join("s.raw")).unwrap();
    let header: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(header["dims"], serde_json::json!([2, 1, 1]));
    assert_eq!(header["channels"], 1);
    assert_eq!(header["dtype"], "float32");
    let raw = std::fs::read(dir.path().join("s.raw")).unwrap();
    let mut expected = 0.5f32.to_le_bytes().to_vec();
    expected.extend(1.5f32.to_le_bytes());
    assert_eq!(raw, expected);
}

#[test]
fn uint8_and_int32_payloads_load() {
    let dir = tempfile::tempdir().unwrap();
    for (dtype, bytes) in [("uint8", vec![0u8, 7]), ("int32", [0i32, 300].iter().flat_map(|v| v.to_le_bytes()).collect())] {
        let stem = dir.path().join(dtype);
        std::fs::write(stem.with_extension("raw"), &bytes).unwrap();
        std::fs::write(
            stem.with_extension("json"),
            format!(r#"{{"dims":[2,1,1],"spacing":[1,1,1],"channels":1,"dtype":"{dtype}"}}"#),
        )
        .unwrap();
        let labels = load_labels(&stem).unwrap();
        assert_eq!(labels.data()[0], 0);
        let scalar = load_scalar(&stem).unwrap();
        assert_eq!(scalar.data()[1], labels.data()[1] as f32);
    }
}

#[test]
fn unwritable_path_is_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let v = random_scalar(Dims::cube(2), 0);
    assert!(matches!(save_volume(&v, blocker.join("v.raw")), Err(Error::Io { .. })));
}

#[test]
fn trilinear_examples() {
    let d = Dims::cube(4);
    let v = random_scalar(d, 1);
    assert_eq!(sample_trilinear(&v, [1.0, 1.0, 1.0]), v.get(1, 1, 1));
    assert_eq!(sample_trilinear(&v, [-5.0, 0.0, 0.0]), v.get(0, 0, 0));
    let two = ScalarVolume::from_fn(Dims::new(2, 1, 1), |x, _, _| 2.0 * x as f32).unwrap();
    assert_eq!(sample_trilinear(&two, [0.5, 0.0, 0.0]), 1.0);
}

#[test]
fn warp_matches_per_voxel_oracle() {
    let d = Dims::new(9, 7, 6);
    let v = random_scalar(d, 4);
    let field = random_field(d, 2.5, 5);
    let w = warp_scalar(&v, &field).unwrap();
    for [x, y, z] in d.iter() {
        let u = field.get(x, y, z);
        let p = [x as f64 + u[0] as f64, y as f64 + u[1] as f64, z as f64 + u[2] as f64];
        let expected = naive_trilinear(|a, b, c| v.get(a, b, c) as f64, d, p);
        assert!((w.get(x, y, z) as f64 - expected).abs() < 1e-6);
    }
}

#[test]
fn constant_shift_of_index_ramp() {
    let d = Dims::new(5, 2, 2);
    let v = ScalarVolume::from_fn(d, |x, _, _| x as f32).unwrap();
    let w = warp_scalar(&v, &DisplacementField::constant(d, [1.0, 0.0, 0.0])).unwrap();
    for [x, y, z] in d.iter() {
        assert_eq!(w.get(x, y, z), (x + 1).min(4) as f32);
    }
}

#[test]
fn label_warp_matches_nearest_oracle() {
    let d = Dims::new(8, 6, 5);
    let labels = random_labels(d, 5, 2);
    let field = random_field(d, 3.0, 6);
    let w = warp_labels(&labels, &field).unwrap();
    for [x, y, z] in d.iter() {
        let u = field.get(x, y, z);
        let n = |p: f32, c: usize, len: usize| clampi((p as f64 + c as f64).round() as isize, len);
        let expected = labels.get(n(u[0], x, d.x), n(u[1], y, d.y), n(u[2], z, d.z));
        assert_eq!(w.get(x, y, z), expected);
    }
    let shifted = warp_labels(&labels, &DisplacementField::constant(d, [0.0, -2.0, 0.0])).unwrap();
    assert_eq!(shifted.get(3, 4, 1), labels.get(3, 2, 1));
    assert_eq!(shifted.get(3, 0, 1), labels.get(3, 0, 1));
}

fn gaussian_weights(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let w: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

#[test]
fn downsample_matches_direct_convolution() {
    let d = Dims::new(9, 8, 7);
    let v = ScalarVolume::from_fn(d, |x, y, z| 0.1 * x as f32 + 0.2 * y as f32 - 0.05 * z as f32).unwrap();
    let out = downsample(&v, 2).unwrap();
    assert_eq!(out.dims(), Dims::new(5, 4, 4));
    assert_eq!(out.spacing(), [2.0; 3]);
    let w = gaussian_weights(1.0);
    let r = (w.len() / 2) as isize;
    for [x, y, z] in out.dims().iter() {
        let c = [2 * x as isize, 2 * y as isize, 2 * z as isize];
        let mut acc = 0.0;
        for (k, wz) in w.iter().enumerate() {
            for (j, wy) in w.iter().enumerate() {
                for (i, wx) in w.iter().enumerate() {
                    let p = [c[0] + i as isize - r, c[1] + j as isize - r, c[2] + k as isize - r];
                    acc += wx * wy * wz * v.get(clampi(p[0], d.x), clampi(p[1], d.y), clampi(p[2], d.z)) as f64;
                }
            }
        }
        assert!((out.get(x, y, z) as f64 - acc).abs() < 1e-5);
    }
}

#[test]
fn downsample_constant_and_identity() {
    let c = ScalarVolume::filled(Dims::new(7, 6, 5), 3.25).unwrap();
    let out = downsample(&c, 2).unwrap();
    assert_eq!(out.dims(), Dims::new(4, 3, 3));
    assert!(out.data().iter().all(|&v| (v - 3.25).abs() < 1e-5));
    let v = random_scalar(Dims::cube(4), 0);
    assert_eq!(downsample(&v, 1).unwrap(), v);
    assert!(downsample(&v, 0).is_err());
}

#[test]
fn upsample_matches_trilinear_oracle() {
    let coarse = Dims::new(4, 3, 3);
    let fine = Dims::new(8, 6, 6);
    let zero = upsample_field(&DisplacementField::zeros(coarse), 2, fine).unwrap();
    assert!(zero.is_zero() && zero.dims() == fine);
    let ones = upsample_field(&DisplacementField::constant(coarse, [1.0; 3]), 2, fine).unwrap();
    assert!(ones.data().iter().all(|v| *v == [2.0; 3]));
    let lin = DisplacementField::from_fn(coarse, |x, y, z| [x as f32, 0.5 * y as f32, z as f32 - y as f32]).unwrap();
    let up = upsample_field(&lin, 2, fine).unwrap();
    for [x, y, z] in fine.iter() {
        let p = [x as f64 / 2.0, y as f64 / 2.0, z as f64 / 2.0];
        for c in 0..3 {
            let expected = 2.0 * naive_trilinear(|a, b, cc| lin.get(a, b, cc)[c] as f64, coarse, p);
            assert!((up.get(x, y, z)[c] as f64 - expected).abs() < 1e-5);
        }
    }
}
