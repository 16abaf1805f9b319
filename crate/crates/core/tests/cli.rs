use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use brainsym::edges::EdgeMap;
use brainsym::imaging::{encode_netpbm, load_netpbm, GrayImage, Image};
use brainsym::phantom::{generate, PhantomSpec};

fn brainsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brainsym"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_gray(dir: &Path, name: &str, img: GrayImage) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, encode_netpbm(&Image::Gray(img))).unwrap();
    path
}

fn phantom_file(dir: &Path, name: &str, spec: &PhantomSpec) -> PathBuf {
    write_gray(dir, name, generate(spec).unwrap().0)
}

#[test]
fn edges_on_constant_background() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_gray(dir.path(), "bg.pgm", GrayImage::filled(64, 64, 20).unwrap());
    let out = dir.path().join("e.pgm");
    let o = brainsym(&["edges", p(&input), "--operator", "canny", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "edges=0");
}

#[test]
fn unknown_operator_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_gray(dir.path(), "bg.pgm", GrayImage::filled(8, 8, 20).unwrap());
    let o = brainsym(&["edges", p(&input), "--operator", "foo", "-o", "x.pgm"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for op in ["sobel", "prewitt", "roberts", "canny"] {
        assert!(err.contains(op), "{err}");
    }
}

#[test]
fn edge_image_matches_printed_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = phantom_file(dir.path(), "ph.pgm", &PhantomSpec::default());
    for op in ["canny", "sobel", "prewitt", "roberts"] {
        let out = dir.path().join(format!("{op}.pgm"));
        let o = brainsym(&["edges", p(&input), "--operator", op, "-o", p(&out)]);
        assert_eq!(o.status.code(), Some(0));
        let map = EdgeMap::from_gray(&load_netpbm(&out).unwrap().into_gray());
        assert!(map.count() > 0);
        assert_eq!(stdout(&o).trim(), format!("edges={}", map.count()));
    }
}

#[test]
fn axis_of_symmetric_phantom() {
    let dir = tempfile::tempdir().unwrap();
    let input = phantom_file(dir.path(), "sym.pgm", &PhantomSpec::symmetric(3));
    let out = dir.path().join("axis.ppm");
    let o = brainsym(&["axis", p(&input), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    let coeffs: Vec<f64> = line
        .split_whitespace()
        .map(|kv| kv.split_once('=').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(coeffs.len(), 2);
    assert!((coeffs[0] - 128.0).abs() <= 0.5 && coeffs[1].abs() <= 0.01, "{line}");
    let Image::Rgb(overlay) = load_netpbm(&out).unwrap() else {
        panic!("overlay must be P6")
    };
    assert_eq!((overlay.width(), overlay.height()), (257, 257));
    assert_eq!(overlay.get(128, 128), [0, 255, 0]);

    let o = brainsym(&["axis", p(&input), "-o", p(&out), "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c2="));
}

#[test]
fn axis_of_flat_image_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_gray(dir.path(), "flat.pgm", GrayImage::filled(40, 40, 100).unwrap());
    let o = brainsym(&["axis", p(&input), "-o", p(&dir.path().join("a.ppm"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no foreground separable"));
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn detect_lesioned_and_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let lesion = phantom_file(dir.path(), "lesion.pgm", &PhantomSpec::default());
    let sym = phantom_file(dir.path(), "sym.pgm", &PhantomSpec::symmetric(0));

    let o = brainsym(&["detect", p(&lesion), "--out-dir", p(&out), "--pixel-spacing", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out.join("lesion.json"));
    assert_eq!(v["verdict"], "found");
    assert_eq!((v["width"].as_u64(), v["height"].as_u64()), (Some(257), Some(257)));
    let regions = v["regions"].as_array().unwrap();
    assert!(!regions.is_empty());
    let total: u64 = regions.iter().map(|r| r["area_px"].as_u64().unwrap()).sum();
    assert_eq!(v["total_area_px"].as_u64(), Some(total));
    assert_eq!(v["total_area_mm2"].as_f64(), Some(total as f64 * 0.25));
    assert_eq!(v["axis"]["degree"], 1);
    assert!(v["edge_count"].as_u64().unwrap() > 0);
    let raw = std::fs::read_to_string(out.join("lesion.json")).unwrap();
    let order = [
        "width",
        "height",
        "axis",
        "regions",
        "total_area_px",
        "total_area_mm2",
        "verdict",
        "message",
        "edge_count",
    ];
    let positions: Vec<usize> = order
        .iter()
        .map(|k| raw.find(&format!("\n  \"{k}\"")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{raw}");
    assert!(out.join("lesion.overlay.ppm").exists());

    let o = brainsym(&["detect", p(&sym), "--out-dir", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "Possible tumor area are not found");
    let v = read_json(&out.join("sym.json"));
    assert_eq!(v["verdict"], "not-found");
    assert_eq!(v["message"], "Possible tumor area are not found");
    assert_eq!(v["regions"].as_array().unwrap().len(), 0);
    assert_eq!(v["total_area_px"], 0);
}

#[test]
fn detect_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let input = phantom_file(dir.path(), "x.pgm", &PhantomSpec::default());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(
        brainsym(&["detect", p(&input), "--out-dir", p(&a)]).status.code(),
        Some(0)
    );
    assert_eq!(
        brainsym(&["detect", p(&input), "--out-dir", p(&b)]).status.code(),
        Some(0)
    );
    for f in ["x.json", "x.overlay.ppm"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
    }
}

#[test]
fn detect_failures_leave_no_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let flat = write_gray(dir.path(), "flat.pgm", GrayImage::filled(40, 40, 100).unwrap());
    let o = brainsym(&["detect", p(&flat), "--out-dir", p(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.join("flat.json").exists());

    let missing = dir.path().join("missing.pgm");
    assert_eq!(
        brainsym(&["detect", p(&missing), "--out-dir", p(&out)]).status.code(),
        Some(4)
    );
    let garbage = dir.path().join("garbage.pgm");
    std::fs::write(&garbage, b"P5\n4 4\n255\n\x00").unwrap();
    assert_eq!(
        brainsym(&["detect", p(&garbage), "--out-dir", p(&out)]).status.code(),
        Some(4)
    );
    assert!(!out.join("garbage.json").exists());

    let o = brainsym(&["detect", p(&flat), "--out-dir", p(&out), "--sigma", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = brainsym(&["detect", p(&flat), "--out-dir", p(&out), "--canny-low", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn color_input_is_converted() {
    let dir = tempfile::tempdir().unwrap();
    let (gray, _) = generate(&PhantomSpec::default()).unwrap();
    let rgb = brainsym::RgbImage::from_gray(&gray);
    let input = dir.path().join("c.ppm");
    std::fs::write(&input, encode_netpbm(&Image::Rgb(rgb))).unwrap();
    let gray_in = write_gray(dir.path(), "c.pgm", gray);
    let out = dir.path().join("out");
    assert_eq!(
        brainsym(&["detect", p(&input), "--out-dir", p(&out)]).status.code(),
        Some(0)
    );
    let a = std::fs::read(out.join("c.json")).unwrap();
    assert_eq!(
        brainsym(&["detect", p(&gray_in), "--out-dir", p(&out)]).status.code(),
        Some(0)
    );
    assert_eq!(a, std::fs::read(out.join("c.json")).unwrap());
}

#[test]
fn report_csv_shape_and_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write_gray(dir.path(), "flat.pgm", GrayImage::filled(30, 30, 9).unwrap());
    let o = brainsym(&["report", p(&flat)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "operator,edges\nsobel,0\nprewitt,0\nroberts,0\ncanny,0\n");

    let input = phantom_file(dir.path(), "ph.pgm", &PhantomSpec::default());
    let csv_path = dir.path().join("r.csv");
    assert_eq!(
        brainsym(&["report", p(&input), "-o", p(&csv_path)]).status.code(),
        Some(0)
    );
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let (op, n) = row.split_once(',').unwrap();
        let o = brainsym(&["edges", p(&input), "--operator", op, "-o", p(&dir.path().join("e.pgm"))]);
        assert_eq!(stdout(&o).trim(), format!("edges={n}"));
    }
}

#[test]
fn phantom_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
    assert_eq!(
        brainsym(&["phantom", "-o", p(&a), "--seed", "5"]).status.code(),
        Some(0)
    );
    assert_eq!(
        brainsym(&["phantom", "-o", p(&b), "--seed", "5"]).status.code(),
        Some(0)
    );
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("b.json")).unwrap()
    );
    let side = read_json(&dir.path().join("a.json"));
    assert_eq!(side["axis_column"].as_f64(), Some(128.0));
    assert_eq!(side["lesion"]["radius"], 10);
    assert_eq!(side["lesion"]["center"][0].as_f64(), Some(168.0));
    let (img, _) = generate(&PhantomSpec {
        seed: 5,
        ..PhantomSpec::default()
    })
    .unwrap();
    assert_eq!(load_netpbm(&a).unwrap(), Image::Gray(img));

    let c = dir.path().join("c.pgm");
    let o = brainsym(&[
        "phantom",
        "-o",
        p(&c),
        "--width",
        "101",
        "--height",
        "81",
        "--semi-axis-x",
        "40",
        "--semi-axis-y",
        "30",
        "--no-lesion",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let side = read_json(&dir.path().join("c.json"));
    assert_eq!(side["axis_column"].as_f64(), Some(50.0));
    assert!(side["lesion"].is_null());

    let o = brainsym(&["phantom", "-o", p(&dir.path().join("d.pgm")), "--lesion-radius", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("d.pgm").exists());
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("no_such_dir").join("p.pgm");
    assert_eq!(brainsym(&["phantom", "-o", p(&target)]).status.code(), Some(4));
}
