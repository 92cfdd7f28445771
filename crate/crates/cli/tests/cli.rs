use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use histspec::io::{read_pgm_path, write_pgm, GrayscaleImage, PgmEncoding};
use histspec::{
    normal_inverse_cdf, quantile_transform, specify, PNorm, PlottingPositions, SortedReference,
};
use serde_json::Value;
use tempfile::TempDir;

fn histspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_histspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

fn path_str(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Parses a CSV written by the tool into a header and numeric rows.
fn read_table(path: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

fn json(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn specify_with_reference_file() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", "a,b\n3,1\n1,1\n2,5\n");
    let reference = write(&dir, "ref.csv", "b,a\n10,0\n30,4\n20,1\n");
    let output = path_str(&dir, "out.csv");
    let out = histspec(&[
        "specify",
        "--p",
        "1",
        "--reference",
        &format!("file:{reference}"),
        &input,
        "-o",
        &output,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let (header, rows) = read_table(&output);
    assert_eq!(header, ["a", "b"]);
    // Paired by name: a gets [0, 1, 4], b gets [10, 20, 30].
    assert_eq!(column(&rows, 0), [4.0, 0.0, 1.0]);
    assert_eq!(column(&rows, 1), [15.0, 15.0, 30.0]);

    let report = json(&format!("{output}.report.json"));
    assert_eq!(report["rows"][0]["error"], 0.0);
    assert_eq!(report["rows"][1]["error"], 10.0);
    assert_eq!(report["parameters"]["p"], "1");
    assert_eq!(report["aggregates"][0]["column_sum"], 10.0);
}

#[test]
fn specify_pairs_by_position_and_broadcasts_single_columns() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", "a,b\n3,1\n1,2\n2,3\n");
    let single = write(&dir, "one.csv", "r\n5\n6\n7\n");
    let out = histspec(&["specify", "--reference", &format!("file:{single}"), &input]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "a,b\n7,5\n5,6\n6,7\n"
    );

    let short = write(&dir, "short.csv", "x,y,z\n0,0,0\n1,1,1\n");
    let out = histspec(&["specify", "--reference", &format!("file:{short}"), &input]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("input column 'a' has 3 rows"),
        "{}",
        stderr(&out)
    );

    let narrow = write(&dir, "narrow.csv", "x,y\n0,0\n1,1\n2,2\n");
    let wide_input = write(&dir, "wide.csv", "a,b,c\n1,2,3\n4,5,6\n7,8,9\n");
    let out = histspec(&[
        "specify",
        "--reference",
        &format!("file:{narrow}"),
        &wide_input,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("'c' has no reference column"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn invalid_p_is_a_usage_error() {
    let out = histspec(&["specify", "--p", "0.5", &data("iris.csv")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("p = 0.5"));
    let out = histspec(&["specify", "--p", "abc", &data("iris.csv")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_name_the_location() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.csv", "a,b\n1,2\n3,\n");
    let out = histspec(&["specify", &input]);
    assert_eq!(out.status.code(), Some(1));
    let message = stderr(&out);
    assert!(
        message.contains("bad.csv") && message.contains("row 2"),
        "{message}"
    );

    let out = histspec(&["specify", &path_str(&dir, "missing.csv")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quantile_outputs_are_probabilities() {
    let dir = TempDir::new().unwrap();
    let output = path_str(&dir, "q.csv");
    let out = histspec(&["quantile", &data("iris.csv"), "-o", &output]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_table(&output);
    assert_eq!(header.len(), 4);
    assert_eq!(rows.len(), 150);
    assert!(rows.iter().flatten().all(|&v| v > 0.0 && v < 1.0));
}

#[test]
fn quantile_normal_scores() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", "a\n3\n1\n2\n2\n9\n");
    let output = path_str(&dir, "z.csv");
    let out = histspec(&[
        "quantile",
        "--reference",
        "normal:0,1",
        &input,
        "-o",
        &output,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_table(&output);
    let uniform =
        quantile_transform(&[3.0, 1.0, 2.0, 2.0, 9.0], PlottingPositions::TYPE_6).unwrap();
    for (row, q) in rows.iter().zip(uniform) {
        assert_eq!(row[0], normal_inverse_cdf(q, 0.0, 1.0).unwrap());
    }
}

#[test]
fn quantile_rejects_impossible_positions_and_file_references() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", "a\n1\n2\n");
    let out = histspec(&["quantile", "--alpha", "10", "--beta", "10", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("plotting positions"),
        "{}",
        stderr(&out)
    );

    let out = histspec(&["quantile", "--reference", &format!("file:{input}"), &input]);
    assert_eq!(out.status.code(), Some(2));
    let out = histspec(&["quantile", "--reference", "normal:0,-1", &input]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_grid_on_iris() {
    let dir = TempDir::new().unwrap();
    let output = path_str(&dir, "iris.json");
    let out = histspec(&[
        "compare",
        &data("iris.csv"),
        "--references",
        "uniform,normal",
        "-o",
        &output,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&output);
    // 2 references x 3 norms x 3 methods, per column and aggregated.
    assert_eq!(report["aggregates"].as_array().unwrap().len(), 18);
    assert_eq!(report["rows"].as_array().unwrap().len(), 18 * 4);
    assert_eq!(report["dominance"], true);
    let cell = report["aggregates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["reference"] == "uniform" && a["p"] == "1" && a["method"] == "algorithm1")
        .unwrap();
    assert!((cell["column_sum"].as_f64().unwrap() - 8.662).abs() < 1e-3);
}

#[test]
fn compare_single_column_uniform_methods_agree() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "one.csv", "a\n4\n1\n4\n2\n2\n2\n7\n");
    let output = path_str(&dir, "one.json");
    let out = histspec(&[
        "compare",
        &input,
        "--references",
        "uniform",
        "--p",
        "1",
        "--methods",
        "algorithm1,algorithm2",
        "-o",
        &output,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&output);
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let (a1, a2) = (
        rows[0]["error"].as_f64().unwrap(),
        rows[1]["error"].as_f64().unwrap(),
    );
    assert!(a1 > 0.0);
    assert!((a1 - a2).abs() < 1e-12);
}

#[test]
fn compare_distinct_column_is_exact_for_algorithm1() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.csv", "a\n0.3\n-1\n7\n2.5\n");
    let output = path_str(&dir, "d.csv.json");
    let out = histspec(&["compare", &input, "--p", "1,2,inf,3", "-o", &output]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&output);
    for row in report["rows"].as_array().unwrap() {
        if row["method"] == "algorithm1" {
            assert_eq!(row["error"], 0.0, "{row}");
        }
    }
}

#[test]
fn compare_csv_report_and_references_with_parameters() {
    let out = histspec(&[
        "compare",
        &data("iris.csv"),
        "--references",
        "normal:1,2",
        "--p",
        "2",
        "--report-format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("dataset,column,reference,p,method,error,n,m,merged_unique_values")
    );
    // 4 columns x 3 methods, then sum and pooled rows per method.
    assert_eq!(lines.count(), 12 + 6);
    assert!(text.contains("normal(1,2)"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let output = path_str(&dir, name);
        let out = histspec(&["compare", &data("wine.csv"), "-o", &output]);
        assert!(out.status.success());
        let specified = histspec(&[
            "specify",
            "--p",
            "2.5",
            "--reference",
            "normal",
            &data("wine.csv"),
        ]);
        assert!(specified.status.success());
        (fs::read(&output).unwrap(), specified.stdout)
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn headerless_input_with_custom_delimiter() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.txt", "3;10\n1;20\n2;30\n");
    let out = histspec(&["specify", "--no-header", "--delimiter", ";", &input]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "0.75;0.25\n0.25;0.5\n0.5;0.75\n"
    );
}

fn save_pgm(dir: &TempDir, name: &str, img: &GrayscaleImage) -> String {
    let path = dir.path().join(name);
    fs::write(&path, write_pgm(img, PgmEncoding::Binary)).unwrap();
    path.display().to_string()
}

fn gradient(width: usize, height: usize, step: usize) -> GrayscaleImage {
    let pixels = (0..width * height)
        .map(|k| (k * step % 251) as u8)
        .collect();
    GrayscaleImage::new(width, height, pixels).unwrap()
}

#[test]
fn image_demo_keeps_the_rectangle_constant() {
    let dir = TempDir::new().unwrap();
    let input = save_pgm(&dir, "in.pgm", &gradient(16, 12, 7));
    let reference = save_pgm(&dir, "ref.pgm", &gradient(16, 12, 3));
    let output = path_str(&dir, "out.csv");
    let out = histspec(&[
        "image-demo",
        &input,
        "--reference",
        &reference,
        "--rect",
        "4,3,6,5",
        "-o",
        &output,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let text = fs::read_to_string(&output).unwrap();
    let grid: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!((grid.len(), grid[0].len()), (12, 16));
    let value = grid[3][4];
    for row in &grid[3..8] {
        assert!(row[4..10].iter().all(|&v| v == value));
    }

    let (header, scan) = read_table(&path_str(&dir, "out.scanline.csv"));
    assert_eq!(header, ["y", "input", "reference", "output"]);
    assert_eq!(scan.len(), 12);
    assert!(scan[3..8].iter().all(|r| r[1] == 148.0 && r[3] == value));

    for which in ["input", "reference", "output"] {
        let (header, points) = read_table(&path_str(&dir, &format!("out.ecdf_{which}.csv")));
        assert_eq!(header, ["value", "cdf"]);
        assert_eq!(points.last().unwrap()[1], 1.0);
    }
    let report = json(&path_str(&dir, "out.report.json"));
    assert_eq!(report["rows"][0]["column"], "pixels");
    assert_eq!(report["rows"][1]["column"], "pixels_quantized");
    assert_eq!(report["parameters"]["rect"], "4,3,6,5");
}

#[test]
fn image_demo_against_itself_matches_grouped_specification() {
    let dir = TempDir::new().unwrap();
    let img = gradient(9, 7, 29);
    let input = save_pgm(&dir, "in.pgm", &img);
    let data_dir = dir.path().join("plots");
    let output = path_str(&dir, "out.pgm");
    let out = histspec(&[
        "image-demo",
        &input,
        "--reference",
        &input,
        "--quantize",
        "-o",
        &output,
        "--data-dir",
        &data_dir.display().to_string(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(data_dir.join("out.report.json").exists());

    // Oracle: specification of the column-major pixels against themselves.
    let flat: Vec<f64> = (0..9)
        .flat_map(|x| (0..7).map(move |y| (x, y)))
        .map(|(x, y)| f64::from(img.get(x, y)))
        .collect();
    let expected = specify(
        &flat,
        &SortedReference::from_unsorted(flat.clone()).unwrap(),
        PNorm::P1,
    )
    .unwrap();
    let written = read_pgm_path(Path::new(&output)).unwrap();
    for (k, &e) in expected.iter().enumerate() {
        let (x, y) = (k / 7, k % 7);
        assert_eq!(f64::from(written.get(x, y)), e.round().clamp(0.0, 255.0));
    }
    let report = json(&data_dir.join("out.report.json").display().to_string());
    let distinct = flat
        .iter()
        .all(|v| flat.iter().filter(|w| *w == v).count() == 1);
    assert_eq!(report["rows"][0]["error"] == 0.0, distinct);
}

#[test]
fn image_demo_errors() {
    let dir = TempDir::new().unwrap();
    let input = save_pgm(&dir, "in.pgm", &gradient(4, 4, 5));
    let reference = save_pgm(&dir, "ref.pgm", &gradient(5, 4, 5));
    let out = histspec(&[
        "image-demo",
        &input,
        "--reference",
        &reference,
        "-o",
        &path_str(&dir, "o.csv"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("pixel count mismatch"),
        "{}",
        stderr(&out)
    );

    let out = histspec(&[
        "image-demo",
        &input,
        "--reference",
        &input,
        "-o",
        &path_str(&dir, "o.pgm"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = histspec(&[
        "image-demo",
        &input,
        "--reference",
        &input,
        "--rect",
        "3,3,2,2",
        "-o",
        &path_str(&dir, "o.csv"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = histspec(&[
        "image-demo",
        &input,
        "--reference",
        &input,
        "--rect",
        "1,2",
        "-o",
        &path_str(&dir, "o.csv"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
