use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use thermfuse::depth::{fuse_cloud, CloudFilterConfig};
use thermfuse::geometry::Pose;
use thermfuse::hotspot::detect_blobs;
use thermfuse::pipeline::locate_hotspots;
use thermfuse::sim::{render_thermal, NoiseSpec};
use thermfuse::thermal::decode_raw_to_celsius;
use thermfuse_bench::{board_scene, dense_cloud, intrinsics, sensor_frame};

fn hotspot_pipeline(c: &mut Criterion) {
    let frame = sensor_frame();
    let k = intrinsics();
    c.bench_function("decode_detect_localize_160x120", |b| {
        b.iter(|| locate_hotspots(black_box(&frame), 44.45, 858.8, &k, Pose::default()).unwrap())
    });
    let celsius = decode_raw_to_celsius(&frame);
    c.bench_function("detect_blobs_160x120", |b| {
        b.iter(|| detect_blobs(black_box(&celsius), 44.45))
    });
}

fn cloud_fusion(c: &mut Criterion) {
    let cloud = dense_cloud();
    let celsius = decode_raw_to_celsius(&sensor_frame());
    let k = intrinsics();
    let filt = CloudFilterConfig::default();
    c.bench_function("fuse_cloud_102400", |b| {
        b.iter(|| fuse_cloud(black_box(&cloud), &filt, &k, &celsius))
    });
}

fn rendering(c: &mut Criterion) {
    let scene = board_scene();
    let k = intrinsics();
    let noise = NoiseSpec::new(0.0, 0.3, 7).unwrap();
    c.bench_function("render_thermal_160x120", |b| {
        b.iter(|| render_thermal(black_box(&scene), &k, 160, 120, &noise).unwrap())
    });
}

criterion_group!(benches, hotspot_pipeline, cloud_fusion, rendering);
criterion_main!(benches);
