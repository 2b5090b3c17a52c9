//! Fixtures shared by the benchmarks.

use thermfuse::geometry::{Intrinsics, WorldPoint};
use thermfuse::sim::{
    render_thermal, simulate_cloud, NoiseSpec, PlanarTarget, Scene, TemperatureField,
};
use thermfuse::thermal::{RawThermalFrame, SENSOR_HEIGHT, SENSOR_WIDTH};
use thermfuse::PointCloud;

pub fn intrinsics() -> Intrinsics {
    Intrinsics::new(138.6, 138.6, 80.0, 60.0).expect("valid intrinsics")
}

/// Heated board at 858.8 mm with a hot center, like a bench test rig.
pub fn board_scene() -> Scene {
    Scene::new(
        20.0,
        vec![PlanarTarget {
            center: WorldPoint::new(-35.0, 20.0, 858.8),
            width_mm: 600.0,
            height_mm: 450.0,
            field: TemperatureField::GaussianBump {
                peak_c: 75.55,
                sigma_mm: 45.0,
            },
        }],
    )
    .expect("valid scene")
}

pub fn sensor_frame() -> RawThermalFrame {
    let noise = NoiseSpec::new(0.0, 0.3, 7).expect("valid noise");
    render_thermal(
        &board_scene(),
        &intrinsics(),
        SENSOR_WIDTH,
        SENSOR_HEIGHT,
        &noise,
    )
    .expect("render")
}

pub fn dense_cloud() -> PointCloud {
    simulate_cloud(&board_scene(), (320, 320), &NoiseSpec::default())
}
