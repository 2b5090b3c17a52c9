//! Scene description files.
//!
//! ```text
//! ambient_c=20
//! depth_sigma_mm=8.1
//! thermal_sigma_c=0
//! seed=42
//!
//! [target]
//! center_x_mm=0
//! center_y_mm=0
//! depth_mm=710
//! width_mm=400
//! height_mm=400
//! field=bump
//! t_peak_c=75.55
//! sigma_mm=40
//! ```
//!
//! Global keys come first; every `[target]` line opens a new target section.
//! For `field=uniform` the target sits at `t_peak_c` everywhere and
//! `sigma_mm` is not allowed. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::geometry::WorldPoint;

use super::{NoiseSpec, PlanarTarget, Scene, SimError, TemperatureField, DEFAULT_DEPTH_SIGMA_MM};

const TARGET_SECTION: &str = "[target]";
const GLOBAL_KEYS: [&str; 4] = ["ambient_c", "depth_sigma_mm", "thermal_sigma_c", "seed"];
const TARGET_KEYS: [&str; 8] = [
    "center_x_mm",
    "center_y_mm",
    "depth_mm",
    "width_mm",
    "height_mm",
    "field",
    "t_peak_c",
    "sigma_mm",
];

/// Key/value pairs of one section with the line each key was found on.
#[derive(Default)]
struct Section {
    start_line: usize,
    values: BTreeMap<String, (String, usize)>,
}

impl Section {
    fn number(&self, key: &str) -> Result<Option<f64>, SimError> {
        self.values
            .get(key)
            .map(|(v, line)| {
                v.parse::<f64>().map_err(|_| SimError::SceneFile {
                    line: *line,
                    reason: format!("{key}: not a number: {v:?}"),
                })
            })
            .transpose()
    }

    fn required(&self, key: &str) -> Result<f64, SimError> {
        self.number(key)?.ok_or_else(|| SimError::SceneFile {
            line: self.start_line,
            reason: format!("missing key {key}"),
        })
    }
}

pub fn parse_scene<R: Read>(source: R) -> Result<(Scene, NoiseSpec), SimError> {
    let mut global = Section::default();
    let mut targets: Vec<Section> = Vec::new();
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == TARGET_SECTION {
            targets.push(Section {
                start_line: line_no,
                ..Section::default()
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| SimError::SceneFile {
            line: line_no,
            reason: format!("expected key=value, got {line:?}"),
        })?;
        let key = key.trim();
        let (section, allowed): (&mut Section, &[&str]) = match targets.last_mut() {
            Some(t) => (t, &TARGET_KEYS),
            None => (&mut global, &GLOBAL_KEYS),
        };
        if !allowed.contains(&key) {
            return Err(SimError::SceneFile {
                line: line_no,
                reason: format!("unknown key {key:?} in this section"),
            });
        }
        if section
            .values
            .insert(key.to_string(), (value.trim().to_string(), line_no))
            .is_some()
        {
            return Err(SimError::SceneFile {
                line: line_no,
                reason: format!("duplicate key {key:?}"),
            });
        }
    }

    let ambient_c = global.required("ambient_c")?;
    let seed = match global.values.get("seed") {
        Some((v, line)) => v.parse::<u64>().map_err(|_| SimError::SceneFile {
            line: *line,
            reason: format!("seed: not an unsigned integer: {v:?}"),
        })?,
        None => 0,
    };
    let noise = NoiseSpec::new(
        global
            .number("depth_sigma_mm")?
            .unwrap_or(DEFAULT_DEPTH_SIGMA_MM),
        global.number("thermal_sigma_c")?.unwrap_or(0.0),
        seed,
    )?;

    let targets = targets
        .iter()
        .map(parse_target)
        .collect::<Result<Vec<_>, _>>()?;
    Ok((Scene::new(ambient_c, targets)?, noise))
}

fn parse_target(s: &Section) -> Result<PlanarTarget, SimError> {
    let peak = s.required("t_peak_c")?;
    let field = match s.values.get("field").map(|(v, l)| (v.as_str(), *l)) {
        Some(("uniform", line)) => {
            if s.values.contains_key("sigma_mm") {
                return Err(SimError::SceneFile {
                    line,
                    reason: "sigma_mm only applies to field=bump".into(),
                });
            }
            TemperatureField::Uniform { t_c: peak }
        }
        Some(("bump", _)) => TemperatureField::GaussianBump {
            peak_c: peak,
            sigma_mm: s.required("sigma_mm")?,
        },
        Some((other, line)) => {
            return Err(SimError::SceneFile {
                line,
                reason: format!("field must be uniform or bump, got {other:?}"),
            })
        }
        None => {
            return Err(SimError::SceneFile {
                line: s.start_line,
                reason: "missing key field".into(),
            })
        }
    };
    Ok(PlanarTarget {
        center: WorldPoint::new(
            s.required("center_x_mm")?,
            s.required("center_y_mm")?,
            s.required("depth_mm")?,
        ),
        width_mm: s.required("width_mm")?,
        height_mm: s.required("height_mm")?,
        field,
    })
}

pub fn write_scene<W: Write>(
    scene: &Scene,
    noise: &NoiseSpec,
    mut sink: W,
) -> Result<(), SimError> {
    writeln!(sink, "ambient_c={}", scene.ambient_c())?;
    writeln!(sink, "depth_sigma_mm={}", noise.depth_sigma_mm())?;
    writeln!(sink, "thermal_sigma_c={}", noise.thermal_sigma_c())?;
    writeln!(sink, "seed={}", noise.seed())?;
    for t in scene.targets() {
        writeln!(sink)?;
        writeln!(sink, "{TARGET_SECTION}")?;
        writeln!(sink, "center_x_mm={}", t.center.x)?;
        writeln!(sink, "center_y_mm={}", t.center.y)?;
        writeln!(sink, "depth_mm={}", t.center.z)?;
        writeln!(sink, "width_mm={}", t.width_mm)?;
        writeln!(sink, "height_mm={}", t.height_mm)?;
        match t.field {
            TemperatureField::Uniform { t_c } => {
                writeln!(sink, "field=uniform")?;
                writeln!(sink, "t_peak_c={t_c}")?;
            }
            TemperatureField::GaussianBump { peak_c, sigma_mm } => {
                writeln!(sink, "field=bump")?;
                writeln!(sink, "t_peak_c={peak_c}")?;
                writeln!(sink, "sigma_mm={sigma_mm}")?;
            }
        }
    }
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# heated board
ambient_c=20
depth_sigma_mm=8.1
seed=42

[target]
center_x_mm=0
center_y_mm=0
depth_mm=710
width_mm=400
height_mm=400
field=bump
t_peak_c=75.55
sigma_mm=40

[target]
center_x_mm=-100
center_y_mm=50
depth_mm=1000
width_mm=100
height_mm=80
field=uniform
t_peak_c=44.15
";

    #[test]
    fn parses_sample() {
        let (scene, noise) = parse_scene(SAMPLE.as_bytes()).unwrap();
        assert_eq!(scene.ambient_c(), 20.0);
        assert_eq!(noise, NoiseSpec::new(8.1, 0.0, 42).unwrap());
        assert_eq!(scene.targets().len(), 2);
        assert_eq!(
            scene.targets()[0].field,
            TemperatureField::GaussianBump {
                peak_c: 75.55,
                sigma_mm: 40.0
            }
        );
        assert_eq!(
            scene.targets()[1].center,
            WorldPoint::new(-100.0, 50.0, 1000.0)
        );
    }

    #[test]
    fn round_trips() {
        let (scene, noise) = parse_scene(SAMPLE.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_scene(&scene, &noise, &mut out).unwrap();
        let (scene2, noise2) = parse_scene(out.as_slice()).unwrap();
        assert_eq!((scene, noise), (scene2, noise2));
    }

    #[test]
    fn reports_errors_with_lines() {
        let cases = [
            ("ambient_c=20\nbogus=1\n", 2),
            ("ambient_c=abc\n", 1),
            ("ambient_c=20\n[target]\nfield=disk\nt_peak_c=30\n", 3),
            ("ambient_c=20\nambient_c=21\n", 2),
            ("ambient_c 20\n", 1),
            (
                "ambient_c=20\n[target]\nfield=uniform\nt_peak_c=30\nsigma_mm=4\n",
                3,
            ),
            ("ambient_c=20\n[target]\nfield=bump\nt_peak_c=30\n", 2),
        ];
        for (text, line) in cases {
            match parse_scene(text.as_bytes()) {
                Err(SimError::SceneFile { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_scene("seed=1\n".as_bytes()),
            Err(SimError::SceneFile { .. })
        ));
    }
}
